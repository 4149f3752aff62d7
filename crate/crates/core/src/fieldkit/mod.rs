//! Uniform periodic grid, sampled real fields, and the spectral operator
//! toolbox: differentiation, the Bessel-potential inverse `(1 - d2/dx2)^{-1}`,
//! Sobolev norms, dealiasing, and the quadrature oracles used to cross-check
//! the spectral operators.

mod fft;

use crate::error::Error;
use crate::Result;
use rustfft::num_complex::Complex;
use std::f64::consts::TAU;

/// Uniform periodic grid: `n` samples at `x_i = left + i dx`, `dx = length/n`,
/// with `x_n` identified with `x_0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    length: f64,
    left: f64,
}

impl Grid {
    /// Point counts must be even (unambiguous real half-layout) and at least 8.
    pub fn new(n: usize, length: f64, left: f64) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::GridSize(n));
        }
        if !(length > 0.0) || !length.is_finite() || !left.is_finite() {
            return Err(Error::GridLength(length));
        }
        Ok(Grid { n, length, left })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn left(&self) -> f64 {
        self.left
    }

    pub fn right(&self) -> f64 {
        self.left + self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.left + i as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    /// Wavenumber of half-layout mode `m`: `k_m = 2 pi m / L`.
    pub fn wavenumber(&self, m: usize) -> f64 {
        TAU * m as f64 / self.length
    }

    /// Number of half-layout modes, `n/2 + 1`.
    pub fn mode_count(&self) -> usize {
        self.n / 2 + 1
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.left && x <= self.right()
    }
}

/// Sampled real-valued function on a [`Grid`]; the universal state of all
/// solvers. Values are immutable once constructed.
#[derive(Debug, Clone)]
pub struct RealField {
    grid: Grid,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::LengthMismatch {
                got: values.len(),
                want: grid.n(),
            });
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(RealField { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        RealField {
            grid,
            values: vec![0.0; grid.n()],
        }
    }

    /// Sample a closed-form function at the grid points.
    ///
    /// Panics on non-finite samples; use [`RealField::new`] at library
    /// boundaries where data is untrusted.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let values: Vec<f64> = (0..grid.n()).map(|i| f(grid.point(i))).collect();
        assert!(
            values.iter().all(|v| v.is_finite()),
            "sampled function produced a non-finite value"
        );
        RealField { grid, values }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `integral f dx` over one period (exact trapezoid for periodic data).
    pub fn integral(&self) -> f64 {
        self.grid.dx() * self.values.iter().sum::<f64>()
    }

    /// Continuum `L^2` norm of the sampled function, `sqrt(integral f^2 dx)`.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.dx() * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        RealField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two fields. Panics if the grids differ;
    /// fields sharing an operation must carry identical grids.
    pub fn zip_with(&self, other: &RealField, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        RealField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &RealField) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RealField) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &RealField) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| s * v)
    }

    pub fn axpy(&self, s: f64, other: &RealField) -> Self {
        self.zip_with(other, |a, b| a + s * b)
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum {
            grid: self.grid,
            coeffs: fft::forward(&self.values),
        }
    }
}

/// Half-layout spectral representation: coefficients for modes `0..=n/2`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex<f64>>,
}

impl Spectrum {
    /// Assemble a spectrum from raw half-layout coefficients.
    pub fn from_parts(grid: Grid, coeffs: Vec<Complex<f64>>) -> Self {
        assert_eq!(coeffs.len(), grid.mode_count(), "half layout needs n/2 + 1 modes");
        Spectrum { grid, coeffs }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex<f64>] {
        &self.coeffs
    }

    pub fn coeff(&self, m: usize) -> Complex<f64> {
        self.coeffs[m]
    }

    pub fn to_field(&self) -> RealField {
        RealField {
            grid: self.grid,
            values: fft::inverse(&self.coeffs, self.grid.n()),
        }
    }

    /// Apply a Fourier multiplier `c_m -> f(k_m) c_m`.
    pub fn apply_multiplier(mut self, f: impl Fn(f64) -> Complex<f64>) -> Self {
        for (m, c) in self.coeffs.iter_mut().enumerate() {
            *c *= f(self.grid.wavenumber(m));
        }
        self
    }

    /// Zero all modes above `m_keep`.
    pub fn truncate_above(mut self, m_keep: usize) -> Self {
        for c in self.coeffs.iter_mut().skip(m_keep + 1) {
            *c = Complex::new(0.0, 0.0);
        }
        self
    }

}

/// `make_grid` with the documented preconditions; see [`Grid::new`].
pub fn make_grid(n: usize, length: f64, left: f64) -> Result<Grid> {
    Grid::new(n, length, left)
}

/// Spectral derivative of band-limited data; order 0 is the identity.
///
/// Odd orders zero the Nyquist mode (its sine partner is not representable),
/// even orders keep it with the real multiplier `(-1)^{order/2} k^order`.
pub fn spectral_derivative(f: &RealField, order: u32) -> Result<RealField> {
    if order > 8 {
        return Err(Error::DerivativeOrder(order));
    }
    if order == 0 {
        return Ok(f.clone());
    }
    let nyq = f.grid().n() / 2;
    let spec = f.spectrum().apply_multiplier(|k| Complex::new(0.0, k).powu(order));
    let spec = if order % 2 == 1 {
        let mut s = spec;
        s.coeffs[nyq] = Complex::new(0.0, 0.0);
        s
    } else {
        spec
    };
    Ok(spec.to_field())
}

/// `(1 - d2/dx2)^{-1} f` via the multiplier `1/(1 + k^2)`.
pub fn bessel_inverse(f: &RealField) -> RealField {
    f.spectrum()
        .apply_multiplier(|k| Complex::new(1.0 / (1.0 + k * k), 0.0))
        .to_field()
}

/// `d/dx (1 - d2/dx2)^{-1} f` in one pass (multiplier `ik/(1 + k^2)`).
pub fn bessel_inverse_dx(f: &RealField) -> RealField {
    let nyq = f.grid().n() / 2;
    let mut spec = f
        .spectrum()
        .apply_multiplier(|k| Complex::new(0.0, k / (1.0 + k * k)));
    spec.coeffs[nyq] = Complex::new(0.0, 0.0);
    spec.to_field()
}

/// Direct-quadrature oracle for [`bessel_inverse`]: trapezoidal evaluation of
/// `(1/2) integral exp(-|x - y|) f(y) dy` over one period, deliberately
/// without periodic images. The discrepancy against the spectral operator
/// measures wrap-around and must stay small for a scenario to be trusted as a
/// whole-line surrogate.
///
/// The integrand's derivative jumps by `-f(x)` at `y = x`, which sits on a
/// grid node; the Euler-Maclaurin corner term `(dx^2/12) f(x)` is subtracted
/// so the rule keeps its interior O(dx^4) accuracy.
pub fn kernel_convolve_exp(f: &RealField) -> RealField {
    let g = f.grid();
    let n = g.n();
    let dx = g.dx();
    let v = f.values();
    let right = g.right();
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate() {
        let xi = g.point(i);
        let mut acc = 0.5 * 0.5 * (-(xi - g.left()).abs()).exp() * v[0];
        for (j, &vj) in v.iter().enumerate().skip(1) {
            acc += 0.5 * (-(xi - g.point(j)).abs()).exp() * vj;
        }
        // trapezoid endpoint at x = left + L carries the wrapped sample f(x_0)
        acc += 0.5 * 0.5 * (-(xi - right).abs()).exp() * v[0];
        *o = acc * dx - dx * dx / 12.0 * v[i];
    }
    RealField { grid: g, values: out }
}

/// Sobolev norm `( sum_m w_m (1 + k_m^2)^s |c_m|^2 L )^{1/2}` with half-layout
/// weights `w = 1` at modes 0 and n/2, `w = 2` in between; `s = 0` reproduces
/// the continuum `L^2` norm of the sampled function.
pub fn sobolev_norm(f: &RealField, s: f64) -> f64 {
    let g = f.grid();
    let spec = f.spectrum();
    let nyq = g.n() / 2;
    let mut acc = 0.0;
    for (m, c) in spec.coeffs().iter().enumerate() {
        let w = if m == 0 || m == nyq { 1.0 } else { 2.0 };
        let k = g.wavenumber(m);
        acc += w * (1.0 + k * k).powf(s) * c.norm_sqr();
    }
    (acc * g.length()).sqrt()
}

/// Two-thirds-rule dealiasing: zero every mode with index above `n/3`.
pub fn dealias_two_thirds(f: &RealField) -> RealField {
    let keep = f.grid().n() / 3;
    f.spectrum().truncate_above(keep).to_field()
}

/// Periodic translation `f(x) -> f(x - a)` (phase multiplier `exp(-ika)`).
pub fn translate(f: &RealField, a: f64) -> RealField {
    let nyq = f.grid().n() / 2;
    let mut spec = f.spectrum().apply_multiplier(|k| Complex::from_polar(1.0, -k * a));
    // cosine projection of the untranslatable Nyquist sine component
    let c = spec.coeffs[nyq];
    spec.coeffs[nyq] = Complex::new(c.re * (f.grid().wavenumber(nyq) * a).cos(), 0.0);
    spec.to_field()
}

/// Heat semigroup `exp(s d2/dx2)`, `s >= 0` (multiplier `exp(-s k^2)`).
pub fn heat_propagate(f: &RealField, s: f64) -> RealField {
    assert!(s >= 0.0, "heat semigroup runs forward only");
    f.spectrum()
        .apply_multiplier(|k| Complex::new((-s * k * k).exp(), 0.0))
        .to_field()
}

/// Gaussian spectral low-pass `exp(-(k sigma)^2 / 2)`.
pub fn gaussian_lowpass(f: &RealField, sigma: f64) -> RealField {
    f.spectrum()
        .apply_multiplier(|k| Complex::new((-0.5 * (k * sigma).powi(2)).exp(), 0.0))
        .to_field()
}

/// Trapezoid of `f` from `a` to the right edge of the box (the wrap cell uses
/// the periodic sample `f(x_0)`). Returns the full-period integral when
/// `a <= left` and 0 when `a >= right`.
pub fn integral_from(f: &RealField, a: f64) -> f64 {
    let g = f.grid();
    let n = g.n();
    let dx = g.dx();
    let v = f.values();
    if a >= g.right() {
        return 0.0;
    }
    if a <= g.left() {
        return f.integral();
    }
    let u = (a - g.left()) / dx;
    let i0 = u.floor() as usize; // cell [x_{i0}, x_{i0+1}) contains a
    let frac = u - i0 as f64;
    let vi = v[i0];
    let vi1 = if i0 + 1 < n { v[i0 + 1] } else { v[0] };
    let va = vi + frac * (vi1 - vi);
    let mut acc = 0.5 * (va + vi1) * (1.0 - frac) * dx;
    for j in i0 + 1..n - 1 {
        acc += 0.5 * (v[j] + v[j + 1]) * dx;
    }
    if i0 + 1 < n {
        acc += 0.5 * (v[n - 1] + v[0]) * dx; // wrap cell
    }
    acc
}
