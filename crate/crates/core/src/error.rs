//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid needs an even point count of at least 8, got {0}")]
    GridSize(usize),

    #[error("grid length must be positive and finite, got {0}")]
    GridLength(f64),

    #[error("field has {got} values but the grid has {want} points")]
    LengthMismatch { got: usize, want: usize },

    #[error("field values must be finite")]
    NonFinite,

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("derivative order {0} exceeds the supported maximum of 8")]
    DerivativeOrder(u32),

    #[error("quartic heat flow needs eps > 0 and t >= 0, got eps = {eps}, t = {t}")]
    HeatParams { eps: f64, t: f64 },

    #[error("blow-up schedule needs a positive amplitude scale, got {0}")]
    ScheduleScale(f64),

    #[error("initial data touches the domain boundary at {level:.3e} of its peak (tolerance {tol:.1e})")]
    BoundaryContamination { level: f64, tol: f64 },

    #[error("exponential weight overflows on the data support (max |x| = {0})")]
    WeightOverflow(f64),

    #[error("data must be supported in the middle half of the grid")]
    SupportOutsideCore,

    #[error("cutoff family needs eps > 0 and b >= 5 eps, got eps = {eps}, b = {b}")]
    CutoffParams { eps: f64, b: f64 },

    #[error("cutoff profile failed the {0} check at construction")]
    CutoffCheck(&'static str),

    #[error("weight support [{lo:.3}, {hi:.3}] does not fit inside the grid")]
    WeightSupport { lo: f64, hi: f64 },

    #[error("interval too short for a Holder estimate (need at least 10 grid cells)")]
    DegenerateInterval,

    #[error("mollifier width {eps} is below the resolvable limit 2 dx = {min}")]
    MollifierWidth { eps: f64, min: f64 },

    #[error("invalid solver configuration: {0}")]
    Config(String),

    #[error("solver unstable at t = {time:.6}: {reason}")]
    Instability { time: f64, reason: String },

    #[error("peakon state is collided (minimum separation {0:.3e})")]
    PeakonCollision(f64),

    #[error("peakon positions must lie in the middle half of the grid")]
    PeakOutsideCore,

    #[error("characteristic seeds must lie inside the grid")]
    SeedOutsideGrid,

    #[error("trajectory is empty or lacks uniform save times")]
    BadTrajectory,
}
