use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("r = {r} lies within the horizon guard band around r_s = {r_s}")]
    HorizonSingularity { r: f64, r_s: f64 },
    #[error("coordinate singularity at theta = {theta} (sin theta = 0)")]
    CoordinateSingularity { theta: f64 },
    #[error("r = {r} is not outside the horizon r_s = {r_s}")]
    InsideHorizon { r: f64, r_s: f64 },
    #[error("observer turning point: u^r radicand {radicand} < 0 at r = {r}")]
    TurningPoint { r: f64, radicand: f64 },
    #[error("photon turning point reached: radicand {radicand} < 0 at r = {r}")]
    TurningPointReached { r: f64, radicand: f64 },
    #[error("variance mismatch: expected {expected}, got {got}")]
    VarianceMismatch { expected: &'static str, got: &'static str },
    #[error("finite-difference step {h} at r = {r} crosses the horizon guard band")]
    StepTooLarge { r: f64, h: f64 },
    #[error("constraint drift {residual:e} exceeds tolerance at xi = {xi}")]
    ConstraintDrift { xi: f64, residual: f64 },
    #[error("start point r = {r} is inside the horizon guard band")]
    HorizonApproach { r: f64 },
    #[error("momentum is not a usable null vector: {0}")]
    NonNull(String),
    #[error("direction is antipodal to the standard axis (1 + n3 = {one_plus_n3:e})")]
    AntipodalDirection { one_plus_n3: f64 },
    #[error("degenerate transform: {0}")]
    DegenerateTransform(String),
    #[error("step too coarse: |lambda| d_xi = {value:e} at sample {index}")]
    StepTooCoarse { index: usize, value: f64 },
    #[error("polarization vector is not transverse (overlap {overlap:e})")]
    NonTransverse { overlap: f64 },
    #[error("polarization and SL(2,C) routes disagree: {polarization} vs {spinor}")]
    RouteMismatch { polarization: f64, spinor: f64 },
    #[error("unsupported helicity structure: {0}")]
    UnsupportedStructure(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
