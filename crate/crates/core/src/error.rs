use thiserror::Error;

use crate::sector_algebra::SectorLabel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid sector: {0}")]
    InvalidSector(String),
    #[error("operator {op} not applicable at rank {rank}")]
    Inapplicable { op: String, rank: u8 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("ansatz rank deficiency in harmonic oracle: {0}")]
    Ansatz(String),
    #[error("degenerate indicial matrix in {sector}: {detail}")]
    DegenerateIndicial { sector: SectorLabel, detail: String },
    #[error("frobenius series did not converge in {sector}: tail ratio {ratio:e}")]
    SeriesDivergence { sector: SectorLabel, ratio: f64 },
    #[error("logarithmic term required in {sector} at power {power} (residual {residual:e})")]
    LogTerm { sector: SectorLabel, power: usize, residual: f64 },
    #[error("integrator failure: {0}")]
    Integrator(String),
    #[error("conditioning below threshold in {sector}: {angle:e}")]
    Conditioning { sector: SectorLabel, angle: f64 },
    #[error("transversality failure in {sector}: smallest angle {angle:e}")]
    Transversality { sector: SectorLabel, angle: f64 },
    #[error("sector {0} has no kernel data; use the invertible construction")]
    NoKernel(SectorLabel),
    #[error("data not in E_TT: residual {0:e}")]
    Membership(f64),
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;
