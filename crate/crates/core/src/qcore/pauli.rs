//! Pauli strings with exact phase tracking.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    /// a·b = i^k · c, returned as (k, c).
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }

    pub fn matrix(self) -> ComplexMatrix {
        let (o, z, i) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0));
        let data = match self {
            Pauli::I => vec![o, z, z, o],
            Pauli::X => vec![z, o, o, z],
            Pauli::Y => vec![z, -i, i, z],
            Pauli::Z => vec![o, z, z, -o],
        };
        ComplexMatrix::from_vec(2, data).unwrap()
    }

    /// Flips the computational basis bit.
    pub fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    /// Carries a (-1)^bit sign (up to a global i for Y).
    pub fn signs(self) -> bool {
        matches!(self, Pauli::Y | Pauli::Z)
    }

    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    fn power(self) -> u8 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    fn from_power(k: u8) -> Self {
        match k % 4 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn value(self) -> C64 {
        match self {
            Phase::PlusOne => C64::new(1.0, 0.0),
            Phase::PlusI => C64::new(0.0, 1.0),
            Phase::MinusOne => C64::new(-1.0, 0.0),
            Phase::MinusI => C64::new(0.0, -1.0),
        }
    }

    pub fn is_real(self) -> bool {
        matches!(self, Phase::PlusOne | Phase::MinusOne)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
    phase: Phase,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>, phase: Phase) -> Self {
        Self { letters, phase }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![Pauli::I; n], Phase::PlusOne)
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// +1 or -1 for Hermitian strings, `None` otherwise.
    pub fn sign(&self) -> Option<f64> {
        match self.phase {
            Phase::PlusOne => Some(1.0),
            Phase::MinusOne => Some(-1.0),
            _ => None,
        }
    }

    pub fn negate(&self) -> Self {
        Self::new(self.letters.clone(), Phase::from_power(self.phase.power() + 2))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Dimension(format!("Pauli strings of length {} and {}", self.len(), other.len())));
        }
        let mut k = self.phase.power() + other.phase.power();
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (dk, p) = a.mul(b);
                k += dk;
                p
            })
            .collect();
        Ok(Self::new(letters, Phase::from_power(k)))
    }

    /// Letter-wise equality, ignoring phase.
    pub fn same_letters(&self, other: &Self) -> bool {
        self.letters == other.letters
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::identity(1);
        for p in &self.letters {
            m = m.kron(&p.matrix()).expect("Pauli string within qubit cap");
        }
        m.scale(self.phase.value())
    }
}

impl Mul for &PauliString {
    type Output = PauliString;
    /// Panics on length mismatch; use `checked_mul` to handle that case.
    fn mul(self, rhs: &PauliString) -> PauliString {
        self.checked_mul(rhs).unwrap()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            Phase::PlusOne => "",
            Phase::PlusI => "i",
            Phase::MinusOne => "-",
            Phase::MinusI => "-i",
        };
        write!(f, "{prefix}")?;
        for p in &self.letters {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Accepts an optional `+`, `-`, `i`, `+i` or `-i` prefix, e.g. `-YY`.
    fn from_str(s: &str) -> Result<Self> {
        let (phase, rest) = if let Some(r) = s.strip_prefix("-i") {
            (Phase::MinusI, r)
        } else if let Some(r) = s.strip_prefix("+i").or_else(|| s.strip_prefix('i')) {
            (Phase::PlusI, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (Phase::MinusOne, r)
        } else {
            (Phase::PlusOne, s.strip_prefix('+').unwrap_or(s))
        };
        let letters = rest
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Dimension(format!("bad Pauli letter {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(letters, phase))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_two_qubit() -> Vec<PauliString> {
        let phases = [Phase::PlusOne, Phase::PlusI, Phase::MinusOne, Phase::MinusI];
        let mut out = Vec::new();
        for &a in &Pauli::ALL {
            for &b in &Pauli::ALL {
                for &ph in &phases {
                    out.push(PauliString::new(vec![a, b], ph));
                }
            }
        }
        out
    }

    #[test]
    fn associativity_exhaustive_two_qubit() {
        let all = all_two_qubit();
        for p in &all {
            for q in &all {
                let pq = p * q;
                for r in &all {
                    assert_eq!(&pq * r, p * &(q * r));
                }
            }
        }
    }

    #[test]
    fn product_matches_matrix_product() {
        let all = all_two_qubit();
        for p in all.iter().step_by(3) {
            for q in all.iter().step_by(5) {
                let lhs = (p * q).to_matrix();
                let rhs = p.to_matrix().matmul(&q.to_matrix()).unwrap();
                assert!(lhs.max_abs_diff(&rhs) < 1e-15, "{p} * {q}");
            }
        }
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["II", "XX", "-YY", "iXZ", "-iZI"] {
            let p: PauliString = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert!("XQ".parse::<PauliString>().is_err());
    }

    #[test]
    fn bell_stabilizers_multiply_within_the_set() {
        let xx: PauliString = "XX".parse().unwrap();
        let zz: PauliString = "ZZ".parse().unwrap();
        let myy: PauliString = "-YY".parse().unwrap();
        assert_eq!(&xx * &zz, myy);
        assert_eq!(&xx * &myy, zz);
    }
}
