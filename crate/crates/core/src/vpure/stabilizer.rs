use crate::error::{Error, Result};
use crate::qcore::{ComplexMatrix, DensityOp, Kind, Pauli, PauliString};

/// Ordered signed Bell stabilizers; the standard set is [II, XX, -YY, ZZ].
#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerSet {
    elems: [PauliString; 4],
}

impl Default for StabilizerSet {
    fn default() -> Self {
        Self::standard()
    }
}

impl StabilizerSet {
    pub fn standard() -> Self {
        let p = |s: &str| s.parse::<PauliString>().unwrap();
        Self { elems: [p("II"), p("XX"), p("-YY"), p("ZZ")] }
    }

    /// Arbitrary two-qubit elements of the form ±P⊗P, e.g. with a flipped sign.
    pub fn from_elements(elems: [PauliString; 4]) -> Result<Self> {
        for e in &elems {
            let l = e.letters();
            if l.len() != 2 || l[0] != l[1] || e.sign().is_none() {
                return Err(Error::Dimension(format!("stabilizer element {e} is not of the form ±P⊗P")));
            }
        }
        Ok(Self { elems })
    }

    pub fn elements(&self) -> &[PauliString; 4] {
        &self.elems
    }

    pub fn sign(&self, i: usize) -> f64 {
        self.elems[i].sign().unwrap()
    }

    /// The single-party Pauli of element i.
    pub fn letter(&self, i: usize) -> Pauli {
        self.elems[i].letters()[0]
    }

    /// Σ S_i / 4
    pub fn projector(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(4);
        for e in &self.elems {
            m.add_scaled(&e.to_matrix(), 0.25).unwrap();
        }
        m
    }

    /// k with S_i S_j = S_k exactly, phase included.
    pub fn product_index(&self, i: usize, j: usize) -> Result<usize> {
        let prod = &self.elems[i] * &self.elems[j];
        self.elems
            .iter()
            .position(|e| *e == prod)
            .ok_or_else(|| Error::Dimension(format!("{} * {} = {prod} is outside the set", self.elems[i], self.elems[j])))
    }
}

/// One virtual insertion (S_ket ρ S_bra + h.c.)/2, indices 0-based into the set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StabilizerTerm {
    pub ket: usize,
    pub bra: usize,
}

impl StabilizerTerm {
    pub fn new(ket: usize, bra: usize) -> Result<Self> {
        if ket > 3 || bra > 3 {
            return Err(Error::Dimension(format!("stabilizer term ({ket}, {bra}) out of range 0..4")));
        }
        Ok(Self { ket, bra })
    }

    /// Circuit for the sampled pair (i, j): S_i on the ket, S_k = S_i S_j on the bra.
    pub fn from_sampled(set: &StabilizerSet, i: usize, j: usize) -> Result<Self> {
        Self::new(i, set.product_index(i, j)?)
    }

    /// s_ket · s_bra
    pub fn sign(&self, set: &StabilizerSet) -> f64 {
        set.sign(self.ket) * set.sign(self.bra)
    }

    pub fn is_identity(&self) -> bool {
        self.ket == 0 && self.bra == 0
    }

    pub fn is_local(&self) -> bool {
        self.ket == self.bra
    }

    pub fn index(&self) -> usize {
        self.ket * 4 + self.bra
    }

    pub fn from_index(idx: usize) -> Self {
        Self { ket: idx / 4, bra: idx % 4 }
    }
}

/// Which circuits realize the uniform average over sampled (i, j).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TermSet {
    /// All 16 ordered (ket, bra) circuits with weight 1/16 each.
    Full,
    /// Identity, three local and six controlled circuits; (p, q) and (q, p)
    /// give the same virtual output, so the pair is merged with weight 2/16.
    #[default]
    Reduced,
}

/// Terms and their signed weights (sign folded in).
pub fn gadget_terms(set: &StabilizerSet, terms: TermSet) -> Vec<(StabilizerTerm, f64)> {
    let mut out = Vec::new();
    for ket in 0..4 {
        for bra in 0..4 {
            let t = StabilizerTerm { ket, bra };
            let w = match terms {
                TermSet::Full => 1.0 / 16.0,
                TermSet::Reduced if ket == bra => 1.0 / 16.0,
                TermSet::Reduced if ket < bra => 2.0 / 16.0,
                TermSet::Reduced => continue,
            };
            out.push((t, w * t.sign(set)));
        }
    }
    out
}

/// The noiseless target of one term, evaluated directly: (S_ket ρ S_bra + h.c.)/2
/// with the stabilizers acting on `pair` of ρ.
pub fn ideal_insertion(set: &StabilizerSet, term: StabilizerTerm, rho: &DensityOp, pair: [usize; 2]) -> Result<DensityOp> {
    let k = set.elements()[term.ket].to_matrix();
    let b = set.elements()[term.bra].to_matrix();
    let m = crate::qcore::sandwich(rho.matrix(), &k, &b, &pair)?;
    let h = &m + &m.adjoint();
    Ok(DensityOp::from_parts(h.scale_real(0.5), Kind::Virtual))
}
