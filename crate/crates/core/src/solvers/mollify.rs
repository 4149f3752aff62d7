//! Mollification with the even compactly supported bump
//! `G(x) ~ exp(-1/(1 - x^2))` on (-1, 1), discretely normalized to unit mass.
//! Evenness enforces the vanishing first moment; unit mass makes constants
//! exact fixed points and preserves `integral f dx` to round-off.

use crate::error::Error;
use crate::fieldkit::RealField;
use crate::Result;

/// Convolve `f` with `G_eps(x) = G(x/eps)/eps` (circularly).
pub fn mollify(f: &RealField, eps: f64) -> Result<RealField> {
    let grid = f.grid();
    let dx = grid.dx();
    if !(eps >= 2.0 * dx) {
        return Err(Error::MollifierWidth { eps, min: 2.0 * dx });
    }
    let radius = (eps / dx).floor() as i64;
    let mut weights = Vec::with_capacity(2 * radius as usize + 1);
    for r in -radius..=radius {
        let y = r as f64 * dx / eps;
        weights.push(if y.abs() < 1.0 {
            (-1.0 / (1.0 - y * y)).exp()
        } else {
            0.0
        });
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let n = grid.n() as i64;
    let v = f.values();
    let out: Vec<f64> = (0..n)
        .map(|i| {
            weights
                .iter()
                .enumerate()
                .map(|(idx, w)| {
                    let r = idx as i64 - radius;
                    w * v[((i - r).rem_euclid(n)) as usize]
                })
                .sum()
        })
        .collect();
    RealField::new(grid, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldkit::Grid;

    #[test]
    fn constants_and_mass() {
        let g = Grid::new(512, 20.0, -10.0).unwrap();
        let c = RealField::from_fn(g, |_| 1.3);
        let m = mollify(&c, 0.5).unwrap();
        assert!(m.sub(&c).max_abs() < 1e-10);
        let f = RealField::from_fn(g, |x| (-x * x).exp() * (1.0 + x.sin()));
        let m = mollify(&f, 0.3).unwrap();
        assert!((m.integral() - f.integral()).abs() < 1e-10);
    }

    #[test]
    fn rejects_unresolvable_width() {
        let g = Grid::new(64, 20.0, -10.0).unwrap();
        let f = RealField::zeros(g);
        assert!(mollify(&f, 0.1).is_err());
    }

    #[test]
    fn corner_error_first_order_in_eps() {
        let g = Grid::new(8192, 20.0, -10.0).unwrap();
        let f = RealField::from_fn(g, |x| (-2.0 * x.abs()).exp());
        let mut errs = Vec::new();
        for eps in [0.2, 0.1, 0.05] {
            let m = mollify(&f, eps).unwrap();
            errs.push(m.sub(&f).l2_norm());
        }
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
        // halving eps should roughly halve the error near a corner
        let r1 = errs[0] / errs[1];
        let r2 = errs[1] / errs[2];
        assert!(r1 > 1.5 && r1 < 4.0, "ratio {r1}");
        assert!(r2 > 1.5 && r2 < 4.0, "ratio {r2}");
    }
}
