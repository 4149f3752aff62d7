//! Declarative experiment descriptions and their translation into grids,
//! initial data, and solver configurations. Every physical parameter is
//! explicit; nothing falls back to a hidden default.

use dispersia_core::airy::BlowupSchedule;
use dispersia_core::fieldkit::{Grid, RealField};
use dispersia_core::flow::{peakon_field, PeakonState};
use dispersia_core::solvers::{mollify, Equation, SolverConfig};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub equation: EquationSpec,
    pub grid: GridSpec,
    pub stepping: SteppingSpec,
    pub initial_data: InitialData,
    #[serde(default)]
    pub diagnostics: Vec<DiagnosticSpec>,
    /// Seed for stochastic initial data; identical seeds give byte-identical
    /// artifacts.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub save_fields: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EquationSpec {
    Gkdv { k: u32 },
    Quasilinear { eps_visc: f64 },
    Bbm,
    Dp,
    Brinkman,
}

impl EquationSpec {
    pub fn to_equation(&self) -> Equation {
        match *self {
            EquationSpec::Gkdv { k } => Equation::GKdv { k },
            EquationSpec::Quasilinear { eps_visc } => Equation::Quasilinear { eps_visc },
            EquationSpec::Bbm => Equation::Bbm,
            EquationSpec::Dp => Equation::Dp,
            EquationSpec::Brinkman => Equation::Brinkman,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    pub length: f64,
    pub left: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteppingSpec {
    pub dt: f64,
    pub t_end: f64,
    pub save_stride: usize,
    #[serde(default = "default_true")]
    pub dealias: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Peak {
    pub x: f64,
    pub amp: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// Named closed forms; see [`closed_form`] for the catalogue.
    ClosedForm {
        name: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
    /// Sum of backward Airy evolutions of the exponential corner.
    BlowupSchedule { terms: u32, scale: f64 },
    /// Multi-peakon ansatz; pre-mollified to `2 dx` when the equation is DP
    /// (corners alias under spectral stepping, and existence for peaked data
    /// comes by mollified approximation anyway).
    Peakons { peaks: Vec<Peak> },
    /// Band of Fourier modes `m in [modes.0, modes.1]` with magnitudes
    /// `k^{-s - 1/2}` and seeded random phases, windowed to the left of the
    /// origin and rescaled so the sampled field has max amplitude
    /// `amplitude`. The band is grid-independent, so refining `n` realizes
    /// the same function.
    RoughLeft {
        s: f64,
        amplitude: f64,
        modes: (usize, usize),
        window: (f64, f64),
    },
    Composite { parts: Vec<InitialData> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DiagnosticSpec {
    Mass,
    L2,
    Sobolev { s: f64 },
    /// `integral_a (d^j u)^2` from a fixed station.
    Halfline { j: u32, a: f64 },
    /// Half-line energy from the moving station `x0 + eps - v t`.
    HalflineMoving { j: u32, x0: f64, eps: f64, v: f64 },
    WeightedDecay { j: u32, delta: f64 },
    /// Strongest detected derivative jump (count, position, size).
    Jumps { threshold: f64 },
    Holder { k: u32, theta: f64, a: f64, b: f64 },
    /// Trajectory-level smoothing functional, reported at the final time.
    Smoothing { l: u32, v: f64, eps: f64, b: f64 },
}

fn require(params: &BTreeMap<String, f64>, key: &str, form: &str) -> Result<f64, CliError> {
    let v = params
        .get(key)
        .copied()
        .ok_or_else(|| CliError::Config(format!("closed form '{form}' needs parameter '{key}'")))?;
    if !v.is_finite() {
        return Err(CliError::Config(format!(
            "closed form '{form}' parameter '{key}' must be finite"
        )));
    }
    Ok(v)
}

fn sech2(z: f64) -> f64 {
    let c = z.cosh();
    1.0 / (c * c)
}

/// Catalogue of closed-form initial data.
pub fn closed_form(
    name: &str,
    params: &BTreeMap<String, f64>,
    grid: Grid,
) -> Result<RealField, CliError> {
    match name {
        "zero" => Ok(RealField::zeros(grid)),
        "constant" => {
            let v = require(params, "value", name)?;
            Ok(RealField::from_fn(grid, |_| v))
        }
        "gaussian" => {
            let a = require(params, "amplitude", name)?;
            let c = require(params, "center", name)?;
            let w = require(params, "width", name)?;
            if !(w > 0.0) {
                return Err(CliError::Config("gaussian needs width > 0".into()));
            }
            Ok(RealField::from_fn(grid, |x| {
                a * (-((x - c) / w).powi(2)).exp()
            }))
        }
        "cosine" => {
            let a = require(params, "amplitude", name)?;
            let m = require(params, "mode", name)?;
            if m < 0.0 || m.fract() != 0.0 {
                return Err(CliError::Config("cosine mode must be a non-negative integer".into()));
            }
            let k = grid.wavenumber(m as usize);
            let left = grid.left();
            Ok(RealField::from_fn(grid, |x| a * (k * (x - left)).cos()))
        }
        "exp_corner" => {
            let a = require(params, "amplitude", name)?;
            let c = require(params, "center", name)?;
            let r = require(params, "rate", name)?;
            if !(r > 0.0) {
                return Err(CliError::Config("exp_corner needs rate > 0".into()));
            }
            Ok(RealField::from_fn(grid, |x| a * (-r * (x - c).abs()).exp()))
        }
        "kdv_soliton" => {
            let c = require(params, "c", name)?;
            let x0 = require(params, "x0", name)?;
            if !(c > 0.0) {
                return Err(CliError::Config("kdv_soliton needs c > 0".into()));
            }
            Ok(RealField::from_fn(grid, |x| {
                3.0 * c * sech2(0.5 * c.sqrt() * (x - x0))
            }))
        }
        "bbm_solitary" => {
            let c = require(params, "c", name)?;
            let x0 = require(params, "x0", name)?;
            if !(c > 1.0) {
                return Err(CliError::Config("bbm_solitary needs c > 1".into()));
            }
            let w = 0.5 * ((c - 1.0) / c).sqrt();
            Ok(RealField::from_fn(grid, |x| {
                3.0 * (c - 1.0) * sech2(w * (x - x0))
            }))
        }
        other => Err(CliError::Config(format!("unknown closed form '{other}'"))),
    }
}

/// Rough-left generator; see [`InitialData::RoughLeft`].
pub fn rough_left(
    grid: Grid,
    s: f64,
    amplitude: f64,
    modes: (usize, usize),
    window: (f64, f64),
    seed: u64,
) -> Result<RealField, CliError> {
    let (m_lo, m_hi) = modes;
    if m_lo < 1 || m_hi < m_lo {
        return Err(CliError::Config("rough_left needs 1 <= modes.0 <= modes.1".into()));
    }
    if m_hi > grid.n() / 3 {
        return Err(CliError::Config(format!(
            "rough_left band reaches mode {m_hi}, beyond the dealiased spectrum n/3 = {}",
            grid.n() / 3
        )));
    }
    let (w_lo, w_hi) = window;
    if !(w_lo < w_hi) || w_hi > 0.0 {
        return Err(CliError::Config(
            "rough_left window must satisfy w_lo < w_hi <= 0 (supported left of the origin)".into(),
        ));
    }
    if w_lo <= grid.left() {
        return Err(CliError::Config(format!(
            "rough_left window [{w_lo}, {w_hi}] reaches the left grid edge"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let comps: Vec<(f64, f64, f64)> = (m_lo..=m_hi)
        .map(|m| {
            let k = grid.wavenumber(m);
            let mag = k.powf(-s - 0.5);
            let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            (k, mag, phase)
        })
        .collect();
    // super-Gaussian window: below 1e-14 outside (w_lo, w_hi), and spectrally
    // concentrated, so the windowed field stays essentially inside its mode
    // band. A compactly supported bump window would leak a slowly decaying
    // spectral tail that dominates high-order derivative energies and shifts
    // with the dealiasing cutoff.
    let center = 0.5 * (w_lo + w_hi);
    let sigma = 0.5 * (w_hi - w_lo) / f64::ln(1e14).powf(0.25);
    let window = |x: f64| (-((x - center) / sigma).powi(4)).exp();
    let value = |x: f64| -> f64 {
        window(x)
            * comps
                .iter()
                .map(|(k, mag, phase)| 2.0 * mag * (k * x + phase).cos())
                .sum::<f64>()
    };
    // normalize on a fixed dense sampling of the window, not on the grid
    // points, so every grid realizes the same continuum function
    let probe = 8192;
    let mut peak = 0.0f64;
    for i in 0..probe {
        let x = (w_lo - sigma) + (w_hi - w_lo + sigma) * i as f64 / (probe - 1) as f64;
        peak = peak.max(value(x).abs());
    }
    if peak == 0.0 {
        return Err(CliError::Config("rough_left produced a zero field".into()));
    }
    let scale = amplitude / peak;
    Ok(RealField::from_fn(grid, |x| scale * value(x)))
}

/// Assemble the initial state of a scenario (including the DP peakon
/// pre-mollification rule).
pub fn build_initial_data(cfg: &ScenarioConfig, grid: Grid) -> Result<RealField, CliError> {
    build_data(&cfg.initial_data, cfg, grid)
}

fn build_data(data: &InitialData, cfg: &ScenarioConfig, grid: Grid) -> Result<RealField, CliError> {
    match data {
        InitialData::ClosedForm { name, params } => closed_form(name, params, grid),
        InitialData::BlowupSchedule { terms, scale } => {
            let schedule = BlowupSchedule::new(*terms, *scale)?;
            Ok(dispersia_core::airy::build_blowup_data(&schedule, grid)?.field)
        }
        InitialData::Peakons { peaks } => {
            let state = PeakonState::new(
                peaks.iter().map(|p| p.x).collect(),
                peaks.iter().map(|p| p.amp).collect(),
            )?;
            let field = peakon_field(&state, grid)?;
            if matches!(cfg.equation, EquationSpec::Dp) {
                Ok(mollify(&field, 2.0 * grid.dx())?)
            } else {
                Ok(field)
            }
        }
        InitialData::RoughLeft {
            s,
            amplitude,
            modes,
            window,
        } => rough_left(grid, *s, *amplitude, *modes, *window, cfg.seed),
        InitialData::Composite { parts } => {
            let mut acc = RealField::zeros(grid);
            for part in parts {
                acc = acc.add(&build_data(part, cfg, grid)?);
            }
            Ok(acc)
        }
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config parse error: {e}")))
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        Ok(Grid::new(self.grid.n, self.grid.length, self.grid.left)?)
    }

    pub fn solver_config(&self) -> Result<SolverConfig, CliError> {
        Ok(SolverConfig::new(
            self.equation.to_equation(),
            self.stepping.dt,
            self.stepping.t_end,
        )?
        .with_save_stride(self.stepping.save_stride)?
        .with_dealias(self.stepping.dealias))
    }

    /// Full validation pass: everything is checked before any computation.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(CliError::Config(
                "scenario name must be non-empty and use [A-Za-z0-9_-]".into(),
            ));
        }
        let grid = self.grid()?;
        self.solver_config()?;
        build_initial_data(self, grid)?;
        for d in &self.diagnostics {
            match d {
                DiagnosticSpec::Sobolev { s } if !(*s >= 0.0) => {
                    return Err(CliError::Config("sobolev diagnostic needs s >= 0".into()));
                }
                DiagnosticSpec::Halfline { j, .. } | DiagnosticSpec::HalflineMoving { j, .. }
                    if *j > 8 =>
                {
                    return Err(CliError::Config("halfline diagnostic needs j <= 8".into()));
                }
                DiagnosticSpec::Smoothing { l, eps, b, .. } => {
                    if *l >= 8 {
                        return Err(CliError::Config("smoothing diagnostic needs l < 8".into()));
                    }
                    dispersia_core::diagnostics::CutoffFamily::new(*eps, *b)?;
                }
                DiagnosticSpec::Jumps { threshold } if !(*threshold > 0.0) => {
                    return Err(CliError::Config("jumps diagnostic needs threshold > 0".into()));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config() -> ScenarioConfig {
        ScenarioConfig {
            name: "t".into(),
            equation: EquationSpec::Gkdv { k: 1 },
            grid: GridSpec {
                n: 256,
                length: 60.0,
                left: -30.0,
            },
            stepping: SteppingSpec {
                dt: 1e-3,
                t_end: 0.01,
                save_stride: 1,
                dealias: true,
            },
            initial_data: InitialData::ClosedForm {
                name: "zero".into(),
                params: BTreeMap::new(),
            },
            diagnostics: vec![],
            seed: 0,
            save_fields: false,
        }
    }

    #[test]
    fn closed_form_catalogue() {
        let grid = Grid::new(256, 60.0, -30.0).unwrap();
        let mut p = BTreeMap::new();
        p.insert("c".into(), 1.0);
        p.insert("x0".into(), 0.0);
        let sol = closed_form("kdv_soliton", &p, grid).unwrap();
        assert!((sol.max_abs() - 3.0).abs() < 1e-10);
        assert!(closed_form("kdv_soliton", &BTreeMap::new(), grid).is_err());
        assert!(closed_form("nonsense", &p, grid).is_err());
    }

    #[test]
    fn rough_left_is_deterministic_and_windowed() {
        let grid = Grid::new(1024, 80.0, -40.0).unwrap();
        let a = rough_left(grid, 1.2, 0.35, (13, 51), (-30.0, -8.0), 7).unwrap();
        let b = rough_left(grid, 1.2, 0.35, (13, 51), (-30.0, -8.0), 7).unwrap();
        assert_eq!(a.values(), b.values());
        let c = rough_left(grid, 1.2, 0.35, (13, 51), (-30.0, -8.0), 8).unwrap();
        assert!(a.sub(&c).max_abs() > 1e-3);
        assert!((a.max_abs() - 0.35).abs() < 0.01);
        for (i, v) in a.values().iter().enumerate() {
            if grid.point(i) >= -8.0 || grid.point(i) <= -30.0 {
                assert!(v.abs() < 1e-12, "window leak at x = {}", grid.point(i));
            }
        }
        // same band on the doubled grid realizes the same function
        let fine = Grid::new(2048, 80.0, -40.0).unwrap();
        let af = rough_left(fine, 1.2, 0.35, (13, 51), (-30.0, -8.0), 7).unwrap();
        for i in 0..grid.n() {
            assert!((a.values()[i] - af.values()[2 * i]).abs() < 1e-12);
        }
    }

    #[test]
    fn rough_left_rejects_bad_bands() {
        let grid = Grid::new(256, 80.0, -40.0).unwrap();
        assert!(rough_left(grid, 1.2, 0.3, (0, 10), (-30.0, -8.0), 1).is_err());
        assert!(rough_left(grid, 1.2, 0.3, (10, 200), (-30.0, -8.0), 1).is_err());
        assert!(rough_left(grid, 1.2, 0.3, (5, 10), (-8.0, 2.0), 1).is_err());
    }

    #[test]
    fn validation_catches_errors() {
        let mut cfg = base_config();
        cfg.validate().unwrap();
        cfg.grid.n = 7;
        assert!(cfg.validate().is_err());
        let mut cfg = base_config();
        cfg.name = "bad name!".into();
        assert!(cfg.validate().is_err());
        let mut cfg = base_config();
        cfg.diagnostics = vec![DiagnosticSpec::Smoothing {
            l: 1,
            v: 1.0,
            eps: 0.5,
            b: 1.0, // b < 5 eps
        }];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn dp_peakons_are_mollified() {
        let mut cfg = base_config();
        cfg.equation = EquationSpec::Dp;
        cfg.grid = GridSpec {
            n: 2048,
            length: 60.0,
            left: -30.0,
        };
        cfg.initial_data = InitialData::Peakons {
            peaks: vec![Peak { x: 0.0, amp: 1.0 }],
        };
        let grid = cfg.grid().unwrap();
        let dp = build_initial_data(&cfg, grid).unwrap();
        cfg.equation = EquationSpec::Gkdv { k: 1 };
        let raw = build_initial_data(&cfg, grid).unwrap();
        // mollification rounds the peak down
        assert!(dp.max_abs() < raw.max_abs());
        assert!((dp.integral() - raw.integral()).abs() < 1e-10);
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = base_config();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back = ScenarioConfig::parse(&text).unwrap();
        assert_eq!(back.name, cfg.name);
        assert!(ScenarioConfig::parse("{ not json").is_err());
        // unknown fields are rejected
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["surprise"] = serde_json::json!(1);
        assert!(ScenarioConfig::parse(&v.to_string()).is_err());
    }
}
