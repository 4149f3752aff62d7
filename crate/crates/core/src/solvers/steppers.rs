//! Time steppers.
//!
//! The stiff dispersive equations (gKdV, quasilinear KdV) advance by
//! integrating-factor RK4: the linear symbol is applied exactly in Fourier
//! space and only the nonlinear remainder is treated explicitly. The bounded
//! integro-differential equations (BBM, DP, Brinkman) advance by classical
//! RK4 on their right-hand sides.

use crate::error::Error;
use crate::fieldkit::{dealias_two_thirds, spectral_derivative, RealField, Spectrum};
use crate::Result;
use rustfft::num_complex::Complex;

pub(crate) fn maybe_dealias(f: RealField, on: bool) -> RealField {
    if on {
        dealias_two_thirds(&f)
    } else {
        f
    }
}

/// `i k^3`: exact symbol of `-d3/dx3`.
pub(crate) fn symbol_airy(grid: crate::fieldkit::Grid) -> Vec<Complex<f64>> {
    (0..grid.mode_count())
        .map(|m| {
            let k = grid.wavenumber(m);
            Complex::new(0.0, k * k * k)
        })
        .collect()
}

/// `i k^3 - eps k^4`: exact symbol of `-d3/dx3 - eps d4/dx4`.
pub(crate) fn symbol_quasilinear(grid: crate::fieldkit::Grid, eps: f64) -> Vec<Complex<f64>> {
    (0..grid.mode_count())
        .map(|m| {
            let k = grid.wavenumber(m);
            Complex::new(-eps * k.powi(4), k * k * k)
        })
        .collect()
}

/// One integrating-factor RK4 step for `du/dt = L u + N(u)` with diagonal
/// symbol `L` and explicit nonlinearity `N`.
pub(crate) fn ifrk4_step(
    u: &RealField,
    dt: f64,
    symbol: &[Complex<f64>],
    nonlin: &dyn Fn(&RealField) -> RealField,
) -> RealField {
    let grid = u.grid();
    let e1: Vec<Complex<f64>> = symbol.iter().map(|l| (l * (0.5 * dt)).exp()).collect();
    let e2: Vec<Complex<f64>> = symbol.iter().map(|l| (l * dt).exp()).collect();

    let s0 = u.spectrum().coeffs().to_vec();
    let n1 = nonlin(u).spectrum().coeffs().to_vec();

    let sa: Vec<Complex<f64>> = (0..s0.len())
        .map(|m| e1[m] * (s0[m] + n1[m] * (0.5 * dt)))
        .collect();
    let n2 = nonlin(&Spectrum::from_parts(grid, sa).to_field())
        .spectrum()
        .coeffs()
        .to_vec();

    let sb: Vec<Complex<f64>> = (0..s0.len())
        .map(|m| e1[m] * s0[m] + n2[m] * (0.5 * dt))
        .collect();
    let n3 = nonlin(&Spectrum::from_parts(grid, sb).to_field())
        .spectrum()
        .coeffs()
        .to_vec();

    let sc: Vec<Complex<f64>> = (0..s0.len())
        .map(|m| e2[m] * s0[m] + e1[m] * n3[m] * dt)
        .collect();
    let n4 = nonlin(&Spectrum::from_parts(grid, sc).to_field())
        .spectrum()
        .coeffs()
        .to_vec();

    let out: Vec<Complex<f64>> = (0..s0.len())
        .map(|m| {
            e2[m] * s0[m]
                + (dt / 6.0) * (e2[m] * n1[m] + e1[m] * (n2[m] + n3[m]) * 2.0 + n4[m])
        })
        .collect();
    Spectrum::from_parts(grid, out).to_field()
}

/// One classical RK4 step for `du/dt = rhs(u)`.
pub(crate) fn rk4_step(u: &RealField, dt: f64, rhs: &dyn Fn(&RealField) -> RealField) -> RealField {
    let k1 = rhs(u);
    let k2 = rhs(&u.axpy(0.5 * dt, &k1));
    let k3 = rhs(&u.axpy(0.5 * dt, &k2));
    let k4 = rhs(&u.axpy(dt, &k3));
    let sum = k1.add(&k2.scale(2.0)).add(&k3.scale(2.0)).add(&k4);
    u.axpy(dt / 6.0, &sum)
}

/// Reject steps that blow past a 10x amplitude growth or go non-finite.
fn check_growth(old: &RealField, new: RealField) -> Result<RealField> {
    if !new.values().iter().all(|v| v.is_finite()) {
        return Err(Error::Instability {
            time: 0.0,
            reason: "state became non-finite".into(),
        });
    }
    let before = old.max_abs();
    if before > 0.0 && new.max_abs() > 10.0 * before {
        return Err(Error::Instability {
            time: 0.0,
            reason: format!(
                "amplitude grew from {before:.3e} to {:.3e} in one step",
                new.max_abs()
            ),
        });
    }
    Ok(new)
}

/// `-u^k u_x`, products dealiased pairwise.
pub(crate) fn gkdv_nonlinearity(u: &RealField, k: u32, dealias: bool) -> RealField {
    let ux = spectral_derivative(u, 1).expect("first derivative");
    let mut pow = u.clone();
    for _ in 1..k {
        pow = maybe_dealias(pow.mul(u), dealias);
    }
    maybe_dealias(pow.mul(&ux), dealias).scale(-1.0)
}

/// `-(u_xx)^2 u_xxx`, the variable-coefficient remainder of the quasilinear
/// model once `-d3/dx3 - eps d4/dx4` is peeled off.
pub(crate) fn quasilinear_nonlinearity(u: &RealField, dealias: bool) -> RealField {
    let z = spectral_derivative(u, 2).expect("second derivative");
    let z2 = maybe_dealias(z.mul(&z), dealias);
    let u3 = spectral_derivative(u, 3).expect("third derivative");
    maybe_dealias(z2.mul(&u3), dealias).scale(-1.0)
}

pub(crate) fn step_gkdv_impl(u: &RealField, k: u32, dt: f64, dealias: bool) -> Result<RealField> {
    let symbol = symbol_airy(u.grid());
    let nonlin = move |f: &RealField| gkdv_nonlinearity(f, k, dealias);
    check_growth(u, ifrk4_step(u, dt, &symbol, &nonlin))
}

pub(crate) fn step_quasilinear_impl(
    u: &RealField,
    eps_visc: f64,
    dt: f64,
    dealias: bool,
) -> Result<RealField> {
    let symbol = symbol_quasilinear(u.grid(), eps_visc);
    let nonlin = move |f: &RealField| quasilinear_nonlinearity(f, dealias);
    check_growth(u, ifrk4_step(u, dt, &symbol, &nonlin))
}

/// One integrating-factor RK4 step of `u_t + u_xxx + u^k u_x = 0`.
pub fn step_gkdv(u: &RealField, k: u32, dt: f64) -> Result<RealField> {
    if k < 1 {
        return Err(Error::Config(format!("gkdv needs k >= 1, got {k}")));
    }
    if !(dt > 0.0) {
        return Err(Error::Config(format!("time step must be positive, got {dt}")));
    }
    step_gkdv_impl(u, k, dt, true)
}

/// One integrating-factor RK4 step of
/// `u_t + (1 + (u_xx)^2) u_xxx = -eps u_xxxx`.
pub fn step_quasilinear(u: &RealField, eps_visc: f64, dt: f64) -> Result<RealField> {
    if !(eps_visc > 0.0 && eps_visc < 1.0) {
        return Err(Error::Config(format!(
            "viscosity must lie in (0, 1), got {eps_visc}"
        )));
    }
    if !(dt > 0.0) {
        return Err(Error::Config(format!("time step must be positive, got {dt}")));
    }
    step_quasilinear_impl(u, eps_visc, dt, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::airy::airy_propagate;
    use crate::fieldkit::Grid;

    #[test]
    fn zero_state_stays_zero() {
        let g = Grid::new(256, 60.0, -30.0).unwrap();
        let z = RealField::zeros(g);
        assert_eq!(step_gkdv(&z, 1, 1e-3).unwrap().max_abs(), 0.0);
        assert_eq!(step_quasilinear(&z, 0.01, 1e-4).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn tiny_amplitude_matches_linear_flow() {
        // nonlinearity is O(amp^2): one step agrees with the Airy group
        let g = Grid::new(512, 60.0, -30.0).unwrap();
        let amp = 1e-8;
        let u = RealField::from_fn(g, |x| amp * (-x * x / 9.0).exp());
        let u = crate::fieldkit::dealias_two_thirds(&u);
        let dt = 1e-3;
        let stepped = step_gkdv(&u, 1, dt).unwrap();
        let lin = airy_propagate(&u, dt);
        assert!(stepped.sub(&lin).max_abs() < 1e-12);
    }

    #[test]
    fn quasilinear_tiny_amplitude_matches_exact_symbol() {
        let g = Grid::new(512, 60.0, -30.0).unwrap();
        let amp = 1e-6;
        let u = RealField::from_fn(g, |x| amp * (-x * x / 9.0).exp());
        let u = crate::fieldkit::dealias_two_thirds(&u);
        let dt = 1e-3;
        let eps = 0.01;
        let stepped = step_quasilinear(&u, eps, dt).unwrap();
        let symbol = symbol_quasilinear(g, eps);
        let lin: Vec<Complex<f64>> = u
            .spectrum()
            .coeffs()
            .iter()
            .zip(&symbol)
            .map(|(c, l)| c * (l * dt).exp())
            .collect();
        let lin = Spectrum::from_parts(g, lin).to_field();
        assert!(stepped.sub(&lin).max_abs() < 1e-14);
    }

    #[test]
    fn parameter_validation() {
        let g = Grid::new(256, 60.0, -30.0).unwrap();
        let u = RealField::zeros(g);
        assert!(step_gkdv(&u, 0, 1e-3).is_err());
        assert!(step_gkdv(&u, 1, -1.0).is_err());
        assert!(step_quasilinear(&u, 0.0, 1e-3).is_err());
        assert!(step_quasilinear(&u, 1.0, 1e-3).is_err());
    }

    #[test]
    fn blowup_is_signalled() {
        // absurd time step on large data must trip the growth guard
        let g = Grid::new(256, 20.0, -10.0).unwrap();
        let u = RealField::from_fn(g, |x| 5.0 * (-x * x).exp());
        let mut state = u;
        let mut tripped = false;
        for _ in 0..50 {
            match step_gkdv(&state, 1, 0.5) {
                Ok(next) => state = next,
                Err(Error::Instability { .. }) => {
                    tripped = true;
                    break;
                }
                Err(e) => panic!("unexpected error {e}"),
            }
        }
        assert!(tripped, "growth guard never fired");
    }
}
