//! Monotone smooth cutoff families with verified derivative bounds.
//!
//! `CutoffFamily::new(eps, b)` builds a C-infinity switch `chi` with
//!
//! * `chi = 0` on `(-inf, eps]` and `chi = 1` on `[b, inf)`,
//! * `supp chi'` inside `[eps, b]` with `chi' >= 0`,
//! * `chi' >= 1/(b - 3 eps)` on `[3 eps, b - 2 eps]`,
//! * derivative domination: the steeper reference family `(eps/3, b + eps)`
//!   satisfies `chi_ref' >= c_j |chi^(j)|` for `j = 1, 2, 3` with computed
//!   constants `c_j`.
//!
//! The profile is a smoothed trapezoid: `chi'` is an exact plateau of height
//! `h = 1/(b - 5 eps + w)` on `[3 eps, b - 2 eps]` with compactly supported
//! smooth shoulders of width `w = 1.8 eps`. Symmetric shoulders carry mass
//! `h w`, so the total mass is exactly 1 and the plateau clears the required
//! bound by the factor `(b - 3 eps)/(b - 3.2 eps) > 1`. Every listed property
//! is asserted on a 10^4-point sample at construction.

use crate::error::Error;
use crate::Result;
use std::sync::OnceLock;

/// Sample count for the construction-time property checks.
const VERIFY_SAMPLES: usize = 10_000;

/// Shoulder width in units of eps; any value below 2 keeps the plateau
/// strictly above the `1/(b - 3 eps)` bound.
const SHOULDER_WIDTH: f64 = 1.8;

fn bump(y: f64) -> f64 {
    if y > 0.0 {
        (-1.0 / y).exp()
    } else {
        0.0
    }
}

fn bump_d1(y: f64) -> f64 {
    if y > 0.0 {
        bump(y) / (y * y)
    } else {
        0.0
    }
}

fn bump_d2(y: f64) -> f64 {
    if y > 0.0 {
        bump(y) * (1.0 / y.powi(4) - 2.0 / y.powi(3))
    } else {
        0.0
    }
}

/// The standard C-infinity step `S(y) = B(y) / (B(y) + B(1-y))`,
/// `B(y) = exp(-1/y)`: exactly 0 for `y <= 0`, exactly 1 for `y >= 1`,
/// symmetric about 1/2.
#[derive(Debug, Clone, Copy)]
pub struct SmoothStep;

impl SmoothStep {
    pub fn value(y: f64) -> f64 {
        if y <= 0.0 {
            0.0
        } else if y >= 1.0 {
            1.0
        } else {
            let b = bump(y);
            b / (b + bump(1.0 - y))
        }
    }

    pub fn deriv1(y: f64) -> f64 {
        if y <= 0.0 || y >= 1.0 {
            return 0.0;
        }
        let b = bump(y);
        let c = bump(1.0 - y);
        let db = bump_d1(y);
        let dc = -bump_d1(1.0 - y);
        let d = b + c;
        (db * d - b * (db + dc)) / (d * d)
    }

    pub fn deriv2(y: f64) -> f64 {
        if y <= 0.0 || y >= 1.0 {
            return 0.0;
        }
        let b = bump(y);
        let c = bump(1.0 - y);
        let db = bump_d1(y);
        let dc = -bump_d1(1.0 - y);
        let d2b = bump_d2(y);
        let d2c = bump_d2(1.0 - y);
        let d = b + c;
        let dd = db + dc;
        let d2d = d2b + d2c;
        (d2b * d - b * d2d) / (d * d) - 2.0 * dd * (db * d - b * dd) / (d * d * d)
    }

    /// `integral_0^y S`, exact to near machine precision. Uses the symmetry
    /// `T(y) = y - 1/2 + T(1-y)` above the midpoint (so `T(1) = 1/2`
    /// exactly) and composite Gauss-Legendre below it.
    pub fn integral(y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        if y >= 1.0 {
            return 0.5 + (y - 1.0);
        }
        if y > 0.5 {
            return y - 0.5 + Self::integral(1.0 - y);
        }
        let (nodes, weights) = gauss_legendre_15();
        let panels = 16usize;
        let full = (y * panels as f64).floor() as usize;
        let width = 1.0 / panels as f64;
        let mut acc = 0.0;
        let quad = |a: f64, b: f64| {
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            let mut s = 0.0;
            for (x, w) in nodes.iter().zip(weights.iter()) {
                s += w * Self::value(mid + half * x);
            }
            s * half
        };
        for p in 0..full {
            acc += quad(p as f64 * width, (p + 1) as f64 * width);
        }
        acc + quad(full as f64 * width, y)
    }
}

/// 15-point Gauss-Legendre nodes and weights on [-1, 1], computed once by
/// Newton iteration on the Legendre recurrence.
fn gauss_legendre_15() -> &'static ([f64; 15], [f64; 15]) {
    static RULE: OnceLock<([f64; 15], [f64; 15])> = OnceLock::new();
    RULE.get_or_init(|| {
        const N: usize = 15;
        let mut nodes = [0.0; N];
        let mut weights = [0.0; N];
        for i in 0..N {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (N as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(N, x);
                let dxn = p / dp;
                x -= dxn;
                if dxn.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(N, x);
            nodes[N - 1 - i] = x;
            weights[N - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

/// Legendre polynomial `P_n` and its derivative at `x`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for m in 2..=n {
        let m = m as f64;
        let p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Pure trapezoid-profile geometry; all checks live in [`CutoffFamily`].
#[derive(Debug, Clone, Copy)]
pub(crate) struct StepProfile {
    pub eps: f64,
    pub b: f64,
    /// shoulder width
    pub w: f64,
    /// plateau height of chi'
    pub h: f64,
}

impl StepProfile {
    pub fn new(eps: f64, b: f64) -> Self {
        let w = SHOULDER_WIDTH * eps;
        let h = 1.0 / (b - 5.0 * eps + w);
        StepProfile { eps, b, w, h }
    }

    fn rise_start(&self) -> f64 {
        3.0 * self.eps - self.w
    }

    fn fall_end(&self) -> f64 {
        self.b - 2.0 * self.eps + self.w
    }

    pub fn value(&self, x: f64) -> f64 {
        let r0 = self.rise_start();
        let p0 = 3.0 * self.eps;
        let p1 = self.b - 2.0 * self.eps;
        let f1 = self.fall_end();
        if x <= r0 {
            0.0
        } else if x < p0 {
            self.h * self.w * SmoothStep::integral((x - r0) / self.w)
        } else if x <= p1 {
            self.h * (0.5 * self.w + (x - p0))
        } else if x < f1 {
            let s = (f1 - x) / self.w;
            self.h * (0.5 * self.w + (p1 - p0) + self.w * (0.5 - SmoothStep::integral(s)))
        } else {
            1.0
        }
    }

    pub fn deriv(&self, x: f64, order: u32) -> f64 {
        let r0 = self.rise_start();
        let p0 = 3.0 * self.eps;
        let p1 = self.b - 2.0 * self.eps;
        let f1 = self.fall_end();
        let (s, sign) = if x > r0 && x < p0 {
            ((x - r0) / self.w, 1.0)
        } else if x > p1 && x < f1 {
            ((f1 - x) / self.w, -1.0)
        } else if x >= p0 && x <= p1 {
            return if order == 1 { self.h } else { 0.0 };
        } else {
            return 0.0;
        };
        match order {
            1 => self.h * SmoothStep::value(s),
            2 => sign * self.h * SmoothStep::deriv1(s) / self.w,
            3 => self.h * SmoothStep::deriv2(s) / (self.w * self.w),
            _ => panic!("cutoff derivatives are available up to order 3"),
        }
    }
}

/// The verified cutoff family; see the module docs for the property list.
#[derive(Debug, Clone)]
pub struct CutoffFamily {
    profile: StepProfile,
    reference: StepProfile,
    domination: [f64; 3],
}

impl CutoffFamily {
    pub fn new(eps: f64, b: f64) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() || !b.is_finite() || b < 5.0 * eps {
            return Err(Error::CutoffParams { eps, b });
        }
        let profile = StepProfile::new(eps, b);
        let reference = StepProfile::new(eps / 3.0, b + eps);

        let lo = -eps;
        let hi = b + 2.0 * eps;
        let step = (hi - lo) / (VERIFY_SAMPLES - 1) as f64;
        let xs: Vec<f64> = (0..VERIFY_SAMPLES).map(|i| lo + i as f64 * step).collect();

        let lower = 1.0 / (b - 3.0 * eps);
        let mut max_abs = [0.0f64; 3];
        for &x in &xs {
            let v = profile.value(x);
            let d1 = profile.deriv(x, 1);
            if !(0.0..=1.0 + 1e-14).contains(&v) {
                return Err(Error::CutoffCheck("range"));
            }
            if x <= eps && v != 0.0 {
                return Err(Error::CutoffCheck("vanishing left of eps"));
            }
            if x >= b && (v - 1.0).abs() > 1e-14 {
                return Err(Error::CutoffCheck("saturation right of b"));
            }
            if d1 < 0.0 {
                return Err(Error::CutoffCheck("monotonicity"));
            }
            if (x < eps || x > b) && d1 != 0.0 {
                return Err(Error::CutoffCheck("derivative support"));
            }
            if x >= 3.0 * eps && x <= b - 2.0 * eps && d1 < lower {
                return Err(Error::CutoffCheck("plateau lower bound"));
            }
            for (j, m) in max_abs.iter_mut().enumerate() {
                *m = m.max(profile.deriv(x, (j + 1) as u32).abs());
            }
        }

        // domination constants c_j with respect to the wider reference family
        let mut domination = [f64::INFINITY; 3];
        for &x in &xs {
            let r = reference.deriv(x, 1);
            for j in 0..3 {
                let dj = profile.deriv(x, (j + 1) as u32).abs();
                if dj > 1e-12 * max_abs[j] {
                    domination[j] = domination[j].min(r / dj);
                }
            }
        }
        for c in domination {
            if !(c > 0.0) || !c.is_finite() {
                return Err(Error::CutoffCheck("derivative domination"));
            }
        }

        Ok(CutoffFamily {
            profile,
            reference,
            domination,
        })
    }

    pub fn eps(&self) -> f64 {
        self.profile.eps
    }

    pub fn b(&self) -> f64 {
        self.profile.b
    }

    /// Height of the exact plateau of `chi'`.
    pub fn plateau_height(&self) -> f64 {
        self.profile.h
    }

    /// Constants `c_j` of the derivative-domination bound, `j = 1, 2, 3`.
    pub fn domination_constants(&self) -> [f64; 3] {
        self.domination
    }

    /// `chi(x)`.
    pub fn value(&self, x: f64) -> f64 {
        self.profile.value(x)
    }

    /// `chi^(order)(x)` for `order` in 1..=3.
    pub fn derivative(&self, x: f64, order: u32) -> f64 {
        self.profile.deriv(x, order)
    }

    /// `chi'` of the reference family `(eps/3, b + eps)`.
    pub fn reference_derivative(&self, x: f64) -> f64 {
        self.reference.deriv(x, 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_step_basics() {
        assert_eq!(SmoothStep::value(-0.2), 0.0);
        assert_eq!(SmoothStep::value(1.3), 1.0);
        assert!((SmoothStep::value(0.5) - 0.5).abs() < 1e-15);
        // symmetric mass: T(1) = 1/2
        assert!((SmoothStep::integral(1.0) - 0.5).abs() < 1e-14);
        // antiderivative consistency against a fine Riemann sum
        let n = 20_000;
        let mut acc = 0.0;
        let dy = 0.73 / n as f64;
        for i in 0..n {
            acc += SmoothStep::value((i as f64 + 0.5) * dy) * dy;
        }
        assert!((SmoothStep::integral(0.73) - acc).abs() < 1e-9);
    }

    #[test]
    fn smooth_step_derivative_consistency() {
        for y in [0.1, 0.3, 0.5, 0.77, 0.9] {
            let h = 1e-6;
            let fd1 = (SmoothStep::value(y + h) - SmoothStep::value(y - h)) / (2.0 * h);
            assert!((fd1 - SmoothStep::deriv1(y)).abs() < 1e-7, "y = {y}");
            let fd2 = (SmoothStep::deriv1(y + h) - SmoothStep::deriv1(y - h)) / (2.0 * h);
            assert!((fd2 - SmoothStep::deriv2(y)).abs() < 1e-5, "y = {y}");
        }
    }

    #[test]
    fn family_support_examples() {
        let f = CutoffFamily::new(0.1, 1.0).unwrap();
        assert_eq!(f.value(0.05), 0.0);
        assert_eq!(f.value(1.2), 1.0);
        assert_eq!(f.value(-3.0), 0.0);
    }

    #[test]
    fn plateau_bound_example() {
        let f = CutoffFamily::new(0.1, 1.0).unwrap();
        let mut min = f64::INFINITY;
        for i in 0..=500 {
            let x = 0.3 + 0.5 * i as f64 / 500.0;
            min = min.min(f.derivative(x, 1));
        }
        assert!(min >= 1.0 / 0.7, "min plateau value {min}");
    }

    #[test]
    fn rejects_narrow_family() {
        assert!(CutoffFamily::new(0.1, 0.4).is_err());
        assert!(CutoffFamily::new(-0.1, 1.0).is_err());
        assert!(CutoffFamily::new(0.0, 0.0).is_err());
    }

    #[test]
    fn acceptance_parameter_pairs_construct() {
        for (eps, b) in [(0.1, 1.0), (0.05, 0.5), (0.2, 1.5)] {
            let f = CutoffFamily::new(eps, b).unwrap();
            assert!(f.domination_constants().iter().all(|&c| c > 0.0));
            assert!(f.plateau_height() > 1.0 / (b - 3.0 * eps));
        }
    }

    #[test]
    fn mass_is_one() {
        let f = CutoffFamily::new(0.1, 1.0).unwrap();
        // chi(b) = total mass of chi'
        assert!((f.value(1.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let f = CutoffFamily::new(0.1, 1.0).unwrap();
        let h = 1e-6;
        for x in [0.2, 0.25, 0.5, 0.82, 0.9] {
            let fd = (f.value(x + h) - f.value(x - h)) / (2.0 * h);
            assert!((fd - f.derivative(x, 1)).abs() < 1e-8, "x = {x}");
            let fd2 = (f.derivative(x + h, 1) - f.derivative(x - h, 1)) / (2.0 * h);
            assert!((fd2 - f.derivative(x, 2)).abs() < 2e-4, "x = {x}");
            let fd3 = (f.derivative(x + h, 2) - f.derivative(x - h, 2)) / (2.0 * h);
            assert!(
                (fd3 - f.derivative(x, 3)).abs() < 2e-2 * f.derivative(x, 3).abs().max(1.0),
                "x = {x}"
            );
        }
    }
}
