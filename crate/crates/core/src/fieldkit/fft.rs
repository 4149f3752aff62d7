//! Cached FFT plans and the real half-layout transform.
//!
//! Forward transforms return coefficients `c_m` for modes `m = 0..=n/2` with
//! the normalization `f(x_i) = sum_m C_m exp(i k_m (x_i - left))`, `C_{n-m} =
//! conj(C_m)`, so `c_0` is the mean of the samples. Plans are cached per size
//! behind a mutex; `process` itself runs outside the lock.

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

fn plans(n: usize) -> PlanPair {
    static CACHE: OnceLock<Mutex<HashMap<usize, PlanPair>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("fft plan cache poisoned");
    map.entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
        })
        .clone()
}

/// Real samples -> half-layout coefficients (modes `0..=n/2`), normalized by `1/n`.
pub fn forward(values: &[f64]) -> Vec<Complex<f64>> {
    let n = values.len();
    let (fwd, _) = plans(n);
    let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fwd.process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.truncate(n / 2 + 1);
    for c in &mut buf {
        *c *= scale;
    }
    buf
}

/// Half-layout coefficients -> real samples on `n` points.
///
/// The full spectrum is rebuilt by conjugate symmetry; the imaginary part of
/// the Nyquist coefficient has no effect at the sample points (`sin(pi i) = 0`)
/// and is dropped.
pub fn inverse(coeffs: &[Complex<f64>], n: usize) -> Vec<f64> {
    assert_eq!(coeffs.len(), n / 2 + 1, "half layout needs n/2 + 1 coefficients");
    let (_, inv) = plans(n);
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    buf[..coeffs.len()].copy_from_slice(coeffs);
    buf[n / 2] = Complex::new(coeffs[n / 2].re, 0.0);
    for m in 1..n / 2 {
        buf[n - m] = coeffs[m].conj();
    }
    inv.process(&mut buf);
    buf.into_iter().map(|c| c.re).collect()
}
