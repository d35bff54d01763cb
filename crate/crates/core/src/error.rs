use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("system of {qubits} qubits exceeds the {max}-qubit cap")]
    TooLarge { qubits: usize, max: usize },

    #[error("invalid target list: {0}")]
    Targets(String),

    #[error("operator is not Hermitian (max |M - M^dag| = {0:e})")]
    NotHermitian(f64),

    #[error("operator is not unitary: {0}")]
    NotUnitary(String),

    #[error("imaginary residue {0:e} in expectation value")]
    ImaginaryResidue(f64),

    #[error("not a physical state: {0}")]
    NotPhysical(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("parameter {name} = {value} outside {range}")]
    Parameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("degenerate denominator {0:e}")]
    DegenerateDenominator(f64),

    #[error("denominator estimate {b:e} lies within 3 standard errors ({stderr:e}) of zero; ratio withheld")]
    UnreliableDenominator { b: f64, stderr: f64 },

    #[error("post-selection probability {0:e} below 1e-12")]
    PostSelection(f64),

    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64, range: &'static str) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::Parameter { name, value, range })
    }
}
