//! Measurement instruments: cutoff families, solution-dependent weights,
//! half-line energies, smoothing functionals, Holder/jump detectors, and
//! decay-weighted norms.

pub mod cutoff;
pub mod measures;
pub mod psi;

pub use cutoff::{CutoffFamily, SmoothStep};
pub use measures::{
    dp_momentum, halfline_energy, holder_seminorm, jump_indicator, locate_jumps,
    smoothing_integral, weighted_decay_norm, Jump, RegularityReport,
};
pub use psi::{exponent_for, make_psi, psi_ode_residual, PsiWeight};
