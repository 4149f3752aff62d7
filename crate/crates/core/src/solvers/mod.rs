//! Time integration for the five model equations, each in the formulation
//! that makes its structure explicit: integrating-factor RK4 with the exact
//! linear symbol for the stiff dispersive models, classical RK4 for the
//! bounded integro-differential ones.

mod mollify;
mod rhs;
pub(crate) mod steppers;

pub use mollify::mollify;
pub use rhs::{rhs_bbm, rhs_brinkman, rhs_dp};
pub use steppers::{step_gkdv, step_quasilinear};

use crate::error::Error;
use crate::fieldkit::{dealias_two_thirds, spectral_derivative, RealField};
use crate::Result;

/// Which model to integrate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Equation {
    /// `u_t + u_xxx + u^k u_x = 0`
    GKdv { k: u32 },
    /// `u_t + (1 + (u_xx)^2) u_xxx = -eps u_xxxx`
    Quasilinear { eps_visc: f64 },
    /// `u_t = -d/dx (1 - d2/dx2)^{-1} (u + u^2/2)`
    Bbm,
    /// `u_t = -u u_x - (3/2) d/dx (1 - d2/dx2)^{-1} (u^2)`
    Dp,
    /// `rho_t = d/dx (rho (1 - d2/dx2)^{-1} d/dx (rho^2))`
    Brinkman,
}

impl Equation {
    pub fn name(&self) -> &'static str {
        match self {
            Equation::GKdv { .. } => "gkdv",
            Equation::Quasilinear { .. } => "quasilinear",
            Equation::Bbm => "bbm",
            Equation::Dp => "dp",
            Equation::Brinkman => "brinkman",
        }
    }

    /// Names of the tracked functionals, aligned with [`Equation::conserved`].
    pub fn conserved_names(&self) -> &'static [&'static str] {
        match self {
            Equation::GKdv { .. } => &["mass", "l2_squared"],
            Equation::Bbm => &["mass", "h1_invariant"],
            Equation::Quasilinear { .. } | Equation::Dp | Equation::Brinkman => &["mass"],
        }
    }

    pub fn conserved(&self, u: &RealField) -> Vec<f64> {
        let dx = u.grid().dx();
        match self {
            Equation::GKdv { .. } => {
                let l2sq = dx * u.values().iter().map(|v| v * v).sum::<f64>();
                vec![u.integral(), l2sq]
            }
            Equation::Bbm => {
                let ux = spectral_derivative(u, 1).expect("first derivative");
                let inv = dx
                    * u.values()
                        .iter()
                        .zip(ux.values())
                        .map(|(v, w)| v * v + w * w)
                        .sum::<f64>();
                vec![u.integral(), inv]
            }
            _ => vec![u.integral()],
        }
    }
}

/// Run description: equation, step, horizon, snapshot cadence.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    equation: Equation,
    dt: f64,
    t_end: f64,
    dealias: bool,
    save_stride: usize,
}

impl SolverConfig {
    pub fn new(equation: Equation, dt: f64, t_end: f64) -> Result<Self> {
        match equation {
            Equation::GKdv { k } if k < 1 => {
                return Err(Error::Config(format!("gkdv needs k >= 1, got {k}")));
            }
            Equation::Quasilinear { eps_visc } if !(eps_visc > 0.0 && eps_visc < 1.0) => {
                return Err(Error::Config(format!(
                    "viscosity must lie in (0, 1), got {eps_visc}"
                )));
            }
            _ => {}
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Config(format!("time step must be positive, got {dt}")));
        }
        if !(t_end >= 0.0) || !t_end.is_finite() {
            return Err(Error::Config(format!("horizon must be >= 0, got {t_end}")));
        }
        Ok(SolverConfig {
            equation,
            dt,
            t_end,
            dealias: true,
            save_stride: 1,
        })
    }

    pub fn with_save_stride(mut self, stride: usize) -> Result<Self> {
        if stride < 1 {
            return Err(Error::Config("save stride must be at least 1".into()));
        }
        self.save_stride = stride;
        Ok(self)
    }

    pub fn with_dealias(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    pub fn equation(&self) -> Equation {
        self.equation
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn dealias(&self) -> bool {
        self.dealias
    }

    pub fn save_stride(&self) -> usize {
        self.save_stride
    }
}

/// Largest stable explicit step for the current state.
///
/// gKdV bounds the advective term `u^k u_x`: `dt <= 2 / (k_max |u|^k safety)`;
/// the quasilinear model bounds the explicit third-derivative remainder:
/// `dt <= 1 / (k_max^3 max (u_xx)^2 safety)`, safety factor 4. The linear
/// symbols are integrated exactly and impose no restriction, as do the
/// bounded BBM/DP/Brinkman operators (their accuracy, not stability, sets dt).
pub fn stability_limit(equation: &Equation, u: &RealField, dealias: bool) -> f64 {
    let grid = u.grid();
    let m_eff = if dealias { grid.n() / 3 } else { grid.n() / 2 };
    let k_eff = grid.wavenumber(m_eff);
    const SAFETY: f64 = 4.0;
    match equation {
        Equation::GKdv { k } => {
            let a = u.max_abs().powi(*k as i32);
            if a == 0.0 {
                f64::INFINITY
            } else {
                2.0 / (k_eff * a * SAFETY)
            }
        }
        Equation::Quasilinear { .. } => {
            let z = spectral_derivative(u, 2).expect("second derivative").max_abs();
            if z == 0.0 {
                f64::INFINITY
            } else {
                1.0 / (k_eff.powi(3) * z * z * SAFETY)
            }
        }
        _ => f64::INFINITY,
    }
}

/// Snapshots of one run: strictly increasing times, states on one grid, and
/// the per-snapshot record of the equation's tracked functionals.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<RealField>,
    conserved: Vec<Vec<f64>>,
    conserved_names: &'static [&'static str],
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[RealField] {
        &self.states
    }

    pub fn conserved(&self) -> &[Vec<f64>] {
        &self.conserved
    }

    pub fn conserved_names(&self) -> &'static [&'static str] {
        self.conserved_names
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &RealField {
        self.states.last().expect("trajectory holds at least the initial state")
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().expect("trajectory holds at least the initial state")
    }

    /// Snapshot spacing if uniform (within 1e-9 relative), else None.
    pub fn save_dt(&self) -> Option<f64> {
        if self.times.len() < 2 {
            return None;
        }
        let dt = self.times[1] - self.times[0];
        for w in self.times.windows(2) {
            if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1e-12) {
                return None;
            }
        }
        Some(dt)
    }

    /// Largest drift of each conserved functional relative to its initial value.
    pub fn conserved_drift(&self) -> Vec<f64> {
        let first = match self.conserved.first() {
            Some(f) => f,
            None => return Vec::new(),
        };
        let mut drift = vec![0.0f64; first.len()];
        for row in &self.conserved {
            for (d, (v, v0)) in drift.iter_mut().zip(row.iter().zip(first)) {
                *d = f64::max(*d, (v - v0).abs());
            }
        }
        drift
    }
}

/// Integrate `u0` under the configured equation, sampling every
/// `save_stride` steps (the final state is always captured). The stability
/// rule is re-evaluated every step; a violated rule or a 10x amplitude jump
/// aborts with the failure time.
pub fn run(u0: &RealField, config: &SolverConfig) -> Result<Trajectory> {
    let eq = config.equation;
    let mut state = if config.dealias {
        dealias_two_thirds(u0)
    } else {
        u0.clone()
    };
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![state.clone()],
        conserved: vec![eq.conserved(&state)],
        conserved_names: eq.conserved_names(),
    };
    if config.t_end == 0.0 {
        return Ok(traj);
    }
    let steps = (config.t_end / config.dt - 1e-9).ceil().max(1.0) as usize;
    for step in 1..=steps {
        let t_prev = (step - 1) as f64 * config.dt;
        let dt = if step == steps {
            config.t_end - t_prev
        } else {
            config.dt
        };
        let limit = stability_limit(&eq, &state, config.dealias);
        if dt > limit {
            return Err(Error::Instability {
                time: t_prev,
                reason: format!("time step {dt:.3e} exceeds the stability limit {limit:.3e}"),
            });
        }
        let next = match eq {
            Equation::GKdv { k } => steppers::step_gkdv_impl(&state, k, dt, config.dealias),
            Equation::Quasilinear { eps_visc } => {
                steppers::step_quasilinear_impl(&state, eps_visc, dt, config.dealias)
            }
            Equation::Bbm => Ok(steppers::rk4_step(&state, dt, &|f| {
                rhs::rhs_bbm_impl(f, config.dealias)
            })),
            Equation::Dp => Ok(steppers::rk4_step(&state, dt, &|f| {
                rhs::rhs_dp_impl(f, config.dealias)
            })),
            Equation::Brinkman => Ok(steppers::rk4_step(&state, dt, &|f| {
                rhs::rhs_brinkman_impl(f, config.dealias)
            })),
        };
        state = match next {
            Ok(s) => s,
            Err(Error::Instability { reason, .. }) => {
                return Err(Error::Instability {
                    time: t_prev,
                    reason,
                })
            }
            Err(e) => return Err(e),
        };
        if !state.values().iter().all(|v| v.is_finite()) {
            return Err(Error::Instability {
                time: t_prev,
                reason: "state became non-finite".into(),
            });
        }
        let t = if step == steps {
            config.t_end
        } else {
            step as f64 * config.dt
        };
        if step % config.save_stride == 0 || step == steps {
            traj.times.push(t);
            traj.states.push(state.clone());
            traj.conserved.push(eq.conserved(&state));
        }
    }
    Ok(traj)
}
