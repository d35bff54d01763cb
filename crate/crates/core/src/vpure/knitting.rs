//! Separable-ancilla variant: |+⟩|+⟩ replaces the entangled ancilla and the
//! parity estimator becomes X⊗X − Y⊗Y, doubling γ.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::engine::{AncillaMode, ParityReadout, Protocol, VirtualEstimate};
use crate::error::Result;
use crate::noise::NoiseParams;
use crate::qcore::{ComplexMatrix, DensityOp};
use crate::states::plus_plus;

/// Exact evaluation or a finite shot budget. Serializes as `"exact"` or an integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shots {
    Exact,
    Finite(u64),
}

impl Serialize for Shots {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Shots::Exact => s.serialize_str("exact"),
            Shots::Finite(n) => s.serialize_u64(*n),
        }
    }
}

impl<'de> Deserialize<'de> for Shots {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(0) => Err(serde::de::Error::custom("shots must be positive or \"exact\"")),
            Raw::Num(n) => Ok(Shots::Finite(n)),
            Raw::Str(s) if s == "exact" => Ok(Shots::Exact),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("shots must be an integer or \"exact\", got {s:?}"))),
        }
    }
}

pub fn knitting_protocol(noise: NoiseParams) -> Result<Protocol> {
    Ok(Protocol::new(plus_plus(), noise, AncillaMode::Reuse)?.readout(ParityReadout::knitting()))
}

pub fn knitting_variant(
    inputs: &[DensityOp],
    noise: &NoiseParams,
    observable: &ComplexMatrix,
    shots: Shots,
    seed: u64,
) -> Result<VirtualEstimate> {
    let p = knitting_protocol(*noise)?;
    match shots {
        Shots::Exact => p.exact(inputs, observable),
        Shots::Finite(n) => p.sample(inputs, observable, n, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{bell_projector, bell_projector_product};
    use crate::states::{werner, zero_zero};
    use crate::vpure::exact_virtual;

    #[test]
    fn separable_inputs_give_power_of_two_gamma() {
        for n in 1..=3 {
            let inputs = vec![zero_zero(); n];
            let est = knitting_variant(&inputs, &NoiseParams::zero(), &bell_projector_product(n).unwrap(), Shots::Exact, 0)
                .unwrap();
            assert!((est.ratio - 1.0).abs() < 1e-12);
            assert!((est.gamma - 2f64.powi(n as i32 + 1)).abs() < 1e-9);
        }
    }

    #[test]
    fn noiseless_ratio_matches_bell_ancilla() {
        let inputs = [werner(0.2).unwrap()];
        let k = knitting_variant(&inputs, &NoiseParams::zero(), &bell_projector(), Shots::Exact, 0).unwrap();
        let b = exact_virtual(&inputs, 0.0, &NoiseParams::zero(), &bell_projector(), AncillaMode::Reuse).unwrap();
        assert!((k.ratio - b.ratio).abs() < 1e-14);
        assert!((k.gamma - 2.0 * b.gamma).abs() < 1e-12);
    }

    #[test]
    fn shots_serde() {
        assert_eq!(serde_json::from_str::<Shots>("\"exact\"").unwrap(), Shots::Exact);
        assert_eq!(serde_json::from_str::<Shots>("1000").unwrap(), Shots::Finite(1000));
        assert!(serde_json::from_str::<Shots>("0").is_err());
        assert!(serde_json::from_str::<Shots>("\"many\"").is_err());
        assert_eq!(serde_json::to_string(&Shots::Finite(5)).unwrap(), "5");
    }
}
