//! Right-hand sides of the three integro-differential models. Thanks to the
//! smoothing of `(1 - d2/dx2)^{-1}` these are bounded operators on the grid,
//! so the equations are ordinary differential equations in function space.

use crate::fieldkit::{bessel_inverse_dx, spectral_derivative, RealField};
use crate::solvers::steppers::maybe_dealias;

/// BBM: `u_t = -d/dx (1 - d2/dx2)^{-1} (u + u^2/2)`.
pub fn rhs_bbm(u: &RealField) -> RealField {
    rhs_bbm_impl(u, true)
}

pub(crate) fn rhs_bbm_impl(u: &RealField, dealias: bool) -> RealField {
    let u2 = maybe_dealias(u.mul(u), dealias);
    let w = u.axpy(0.5, &u2);
    bessel_inverse_dx(&w).scale(-1.0)
}

/// DP: `u_t = -u u_x - (3/2) d/dx (1 - d2/dx2)^{-1} (u^2)`.
pub fn rhs_dp(u: &RealField) -> RealField {
    rhs_dp_impl(u, true)
}

pub(crate) fn rhs_dp_impl(u: &RealField, dealias: bool) -> RealField {
    let ux = spectral_derivative(u, 1).expect("first derivative");
    let advect = maybe_dealias(u.mul(&ux), dealias);
    let u2 = maybe_dealias(u.mul(u), dealias);
    advect.axpy(1.5, &bessel_inverse_dx(&u2)).scale(-1.0)
}

/// Brinkman: `rho_t = d/dx ( rho (1 - d2/dx2)^{-1} d/dx (rho^2) )`.
/// The outer derivative is applied last, so the discrete mass
/// `integral rho dx` is conserved to round-off.
pub fn rhs_brinkman(rho: &RealField) -> RealField {
    rhs_brinkman_impl(rho, true)
}

pub(crate) fn rhs_brinkman_impl(rho: &RealField, dealias: bool) -> RealField {
    let rho2 = maybe_dealias(rho.mul(rho), dealias);
    let drift = bessel_inverse_dx(&rho2);
    let flux = maybe_dealias(rho.mul(&drift), dealias);
    spectral_derivative(&flux, 1).expect("first derivative")
}
