use thiserror::Error;

use crate::solver::ContractionReport;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("non-finite value encountered in {0}")]
    NonFinite(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("profile not representable on the frequency lattice (tail fraction {0:.3e})")]
    NotRepresentable(f64),
    #[error("generator {generator} is not part of the {family} family in dimension {dim}")]
    InvalidGenerator { generator: String, family: String, dim: usize },
    #[error("module order {0} exceeds the implementation cap of 4")]
    OrderTooLarge(usize),
    #[error("time {0} is inside the excluded window around t = 0")]
    TimeTooSmall(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no contraction up to S = {s_cap} (smallness quantity {smallness:.3e})")]
    NoContraction { s_cap: f64, smallness: f64, report: Box<ContractionReport> },
    #[error("step size contract violated at t = {t}: {reason}")]
    StepSize { t: f64, reason: String },
    #[error("boundary mass fraction {fraction:.3e} at t = {t} exceeds the monitor threshold")]
    BoundaryMass { t: f64, fraction: f64 },
    #[error("blow-up detected at t = {t}: sup norm {linf:.3e} exceeds ceiling {ceiling:.3e}")]
    BlowUp { t: f64, linf: f64, ceiling: f64 },
    #[error("insufficient trajectory coverage: {0}")]
    Coverage(String),
    #[error("degenerate series: {0}")]
    DegenerateSeries(String),
    #[error("inadmissible Strichartz pair (q = {q}, r = {r}) in dimension {dim}")]
    InadmissiblePair { q: f64, r: f64, dim: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
