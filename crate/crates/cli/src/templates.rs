//! Built-in scenario templates, printable via `dispersia list` and usable as
//! starting points for custom configs.

use crate::scenario::{
    DiagnosticSpec, EquationSpec, GridSpec, InitialData, Peak, ScenarioConfig, SteppingSpec,
};
use std::collections::BTreeMap;

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

pub fn all() -> Vec<(ScenarioConfig, &'static str)> {
    vec![
        (
            kdv_soliton(),
            "KdV soliton over unit time; conserved functionals and the translated profile",
        ),
        (
            bbm_solitary(),
            "BBM solitary wave; speed and the quadratic invariant",
        ),
        (
            bbm_corner(),
            "BBM with corner data; the derivative jump stays put",
        ),
        (
            dp_peakon(),
            "single DP peakon; the corner rides the characteristic at its amplitude",
        ),
        (
            dp_two_peakons(),
            "two-peakon DP interaction inside the pre-collision window",
        ),
        (
            brinkman_corner(),
            "Brinkman density corner advected by the induced drift",
        ),
        (
            quasilinear_smooth(),
            "quasilinear KdV with smooth data; base case of the vanishing-viscosity ladder",
        ),
        (
            kdv_rough_left(),
            "KdV with one-sided rough data; half-line energies and the smoothing functional",
        ),
    ]
}

pub fn by_name(name: &str) -> Option<ScenarioConfig> {
    all().into_iter().map(|(c, _)| c).find(|c| c.name == name)
}

pub fn kdv_soliton() -> ScenarioConfig {
    ScenarioConfig {
        name: "kdv_soliton".into(),
        equation: EquationSpec::Gkdv { k: 1 },
        grid: GridSpec {
            n: 1024,
            length: 60.0,
            left: -30.0,
        },
        stepping: SteppingSpec {
            dt: 1e-3,
            t_end: 1.0,
            save_stride: 100,
            dealias: true,
        },
        initial_data: InitialData::ClosedForm {
            name: "kdv_soliton".into(),
            params: params(&[("c", 1.0), ("x0", -5.0)]),
        },
        diagnostics: vec![DiagnosticSpec::L2, DiagnosticSpec::Sobolev { s: 1.0 }],
        seed: 0,
        save_fields: false,
    }
}

pub fn bbm_solitary() -> ScenarioConfig {
    ScenarioConfig {
        name: "bbm_solitary".into(),
        equation: EquationSpec::Bbm,
        grid: GridSpec {
            n: 2048,
            length: 100.0,
            left: -50.0,
        },
        stepping: SteppingSpec {
            dt: 2e-3,
            t_end: 2.0,
            save_stride: 250,
            dealias: true,
        },
        initial_data: InitialData::ClosedForm {
            name: "bbm_solitary".into(),
            params: params(&[("c", 1.5), ("x0", -15.0)]),
        },
        diagnostics: vec![DiagnosticSpec::L2],
        seed: 0,
        save_fields: false,
    }
}

pub fn bbm_corner() -> ScenarioConfig {
    ScenarioConfig {
        name: "bbm_corner".into(),
        equation: EquationSpec::Bbm,
        grid: GridSpec {
            n: 2048,
            length: 60.0,
            left: -30.0,
        },
        stepping: SteppingSpec {
            dt: 2e-3,
            t_end: 5.0,
            save_stride: 250,
            dealias: true,
        },
        initial_data: InitialData::ClosedForm {
            name: "exp_corner".into(),
            params: params(&[("amplitude", 0.5), ("center", 0.0), ("rate", 2.0)]),
        },
        diagnostics: vec![DiagnosticSpec::Jumps { threshold: 0.5 }],
        seed: 0,
        save_fields: false,
    }
}

pub fn dp_peakon() -> ScenarioConfig {
    ScenarioConfig {
        name: "dp_peakon".into(),
        equation: EquationSpec::Dp,
        grid: GridSpec {
            n: 3000,
            length: 60.0,
            left: -30.0,
        },
        stepping: SteppingSpec {
            dt: 1e-3,
            t_end: 2.0,
            save_stride: 100,
            dealias: true,
        },
        initial_data: InitialData::Peakons {
            peaks: vec![Peak { x: -10.0, amp: 1.0 }],
        },
        diagnostics: vec![DiagnosticSpec::Jumps { threshold: 0.5 }],
        seed: 0,
        save_fields: false,
    }
}

pub fn dp_two_peakons() -> ScenarioConfig {
    ScenarioConfig {
        name: "dp_two_peakons".into(),
        equation: EquationSpec::Dp,
        grid: GridSpec {
            n: 4096,
            length: 60.0,
            left: -30.0,
        },
        stepping: SteppingSpec {
            dt: 1e-3,
            t_end: 3.0,
            save_stride: 100,
            dealias: true,
        },
        initial_data: InitialData::Peakons {
            peaks: vec![
                Peak { x: -5.0, amp: 1.0 },
                Peak { x: 5.0, amp: 0.5 },
            ],
        },
        diagnostics: vec![DiagnosticSpec::L2, DiagnosticSpec::Jumps { threshold: 0.3 }],
        seed: 0,
        save_fields: false,
    }
}

pub fn brinkman_corner() -> ScenarioConfig {
    ScenarioConfig {
        name: "brinkman_corner".into(),
        equation: EquationSpec::Brinkman,
        grid: GridSpec {
            n: 3000,
            length: 60.0,
            left: -30.0,
        },
        stepping: SteppingSpec {
            dt: 1e-3,
            t_end: 1.5,
            save_stride: 75,
            dealias: true,
        },
        initial_data: InitialData::Composite {
            parts: vec![
                InitialData::ClosedForm {
                    name: "exp_corner".into(),
                    params: params(&[("amplitude", 0.5), ("center", -2.0), ("rate", 2.0)]),
                },
                InitialData::ClosedForm {
                    name: "gaussian".into(),
                    params: params(&[("amplitude", 0.8), ("center", 2.0), ("width", 2.0)]),
                },
            ],
        },
        diagnostics: vec![DiagnosticSpec::Jumps { threshold: 0.3 }],
        seed: 0,
        save_fields: false,
    }
}

pub fn quasilinear_smooth() -> ScenarioConfig {
    ScenarioConfig {
        name: "quasilinear_smooth".into(),
        equation: EquationSpec::Quasilinear { eps_visc: 1e-2 },
        grid: GridSpec {
            n: 512,
            length: 40.0,
            left: -20.0,
        },
        stepping: SteppingSpec {
            dt: 6e-6,
            t_end: 0.05,
            save_stride: 1000,
            dealias: true,
        },
        initial_data: InitialData::ClosedForm {
            name: "gaussian".into(),
            params: params(&[("amplitude", 0.5), ("center", 0.0), ("width", 1.0)]),
        },
        diagnostics: vec![DiagnosticSpec::Sobolev { s: 3.0 }],
        seed: 0,
        save_fields: false,
    }
}

pub fn kdv_rough_left() -> ScenarioConfig {
    ScenarioConfig {
        name: "kdv_rough_left".into(),
        equation: EquationSpec::Gkdv { k: 1 },
        grid: GridSpec {
            n: 1024,
            length: 80.0,
            left: -40.0,
        },
        stepping: SteppingSpec {
            dt: 2e-3,
            t_end: 0.5,
            save_stride: 25,
            dealias: true,
        },
        initial_data: InitialData::Composite {
            parts: vec![
                InitialData::RoughLeft {
                    s: 1.2,
                    amplitude: 0.35,
                    modes: (13, 51),
                    window: (-30.0, -8.0),
                },
                InitialData::ClosedForm {
                    name: "gaussian".into(),
                    params: params(&[("amplitude", 0.45), ("center", 8.0), ("width", 1.5)]),
                },
            ],
        },
        diagnostics: vec![
            DiagnosticSpec::HalflineMoving {
                j: 2,
                x0: 0.0,
                eps: 0.1,
                v: 1.0,
            },
            DiagnosticSpec::Halfline { j: 2, a: -40.0 },
            DiagnosticSpec::Smoothing {
                l: 1,
                v: 1.0,
                eps: 0.25,
                b: 1.6,
            },
        ],
        seed: 11,
        save_fields: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_templates_validate() {
        for (cfg, _) in all() {
            cfg.validate().unwrap_or_else(|e| panic!("{}: {e}", cfg.name));
        }
    }

    #[test]
    fn lookup_by_name() {
        assert!(by_name("kdv_soliton").is_some());
        assert!(by_name("missing").is_none());
    }
}
