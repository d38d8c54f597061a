//! Classical worked examples, wired end to end.
//!
//! Each preset fixes a law, a validated pair, a noise specification, and,
//! where meaningful, a jump-mark specification, so the CLI and the browser
//! demo can run them without any configuration.

use crate::compensator::{compensated_martingale, JumpMarkSpec};
use crate::error::Result;
use crate::func::RealFunction;
use crate::measure::Distribution;
use crate::options::NumericOptions;
use crate::solver::{solve_f_from_h, ConditionMPair, NoiseSpec};

/// Named example instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Unit mark against the unit exponential: the compensator is `t∧γ` and
    /// the compensated process has `F(t) = t`, `H(t) = t - 1`.
    Dellacherie,
    /// Exponential jump time with an orthogonal `±γ^{-1}` noise: a
    /// σ-martingale that is not a local martingale.
    Emery,
    /// `H ≡ 0`, uniform jump time, `F(0) = 1`: the reciprocal supermartingale
    /// `F(t) = (1-t)^{-1}`, a local martingale that is not a martingale.
    UsualCond,
    /// Monotone `H(s) = 2s-1` on the uniform law with `F(0) = 0`: the
    /// maximal-function construction, a uniformly integrable martingale with
    /// `sup M = F(γ)`.
    DubinsGilat,
    /// Two atoms at 1 and 2 with `H(1) = 1`, `H(2) = -1`: the endpoint atom
    /// forces `F(0)` and everything is exact rational arithmetic.
    CaseBTwoAtoms,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Dellacherie,
        Preset::Emery,
        Preset::UsualCond,
        Preset::DubinsGilat,
        Preset::CaseBTwoAtoms,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Dellacherie => "dellacherie",
            Preset::Emery => "emery",
            Preset::UsualCond => "usualcond",
            Preset::DubinsGilat => "dubins-gilat",
            Preset::CaseBTwoAtoms => "caseB-two-atoms",
        }
    }

    pub fn from_name(name: &str) -> Option<Preset> {
        Preset::ALL.iter().copied().find(|p| p.name() == name)
    }

    pub fn description(&self) -> &'static str {
        match self {
            Preset::Dellacherie => {
                "unit mark, unit exponential jump time: compensator t∧γ, compensated martingale F(t)=t, H(t)=t-1"
            }
            Preset::Emery => {
                "exponential jump time, orthogonal ±γ⁻¹ noise: σ-martingale that is not a local martingale"
            }
            Preset::UsualCond => {
                "H≡0 on uniform(0,1), F(0)=1: F(t)=(1-t)⁻¹, supermartingale and local martingale, not a martingale"
            }
            Preset::DubinsGilat => {
                "H(s)=2s-1 on uniform(0,1), F(0)=0: F(t)=t, uniformly integrable with sup M = F(γ)"
            }
            Preset::CaseBTwoAtoms => {
                "atoms ½δ₁+½δ₂ with H(1)=1, H(2)=-1: endpoint atom forces F(0)=0, all sums exact"
            }
        }
    }
}

/// The preset as an editable run configuration (closed-form blocks only),
/// the starting point offered by the browser demo and handy as documentation
/// of the config schema.
pub fn run_config(preset: Preset) -> crate::config::RunConfig {
    use crate::config::{
        DistributionConfig, FunctionConfig, MarkConfig, Mode, NoiseConfig, PairConfig, PieceConfig,
        RunConfig,
    };
    let uniform = DistributionConfig {
        pieces: vec![PieceConfig::Const {
            from: 0.0,
            to: 1.0,
            weight: 1.0,
        }],
        ..Default::default()
    };
    let exponential = DistributionConfig {
        pieces: vec![PieceConfig::Exp {
            rate: 1.0,
            from: 0.0,
            to: None,
            weight: 1.0,
        }],
        ..Default::default()
    };
    let base = RunConfig {
        mode: Mode::Simulate,
        name: None,
        distribution: None,
        f0: None,
        h: None,
        pair: None,
        noise: None,
        mark: None,
        k: None,
        times: None,
        grid: None,
        seed: Some(1),
        n_paths: Some(20_000),
        options: None,
    };
    match preset {
        Preset::UsualCond => RunConfig {
            distribution: Some(uniform),
            pair: Some(PairConfig {
                f0: 1.0,
                z: FunctionConfig::PowerRecip2 {},
                h: Some(FunctionConfig::Const { c: 0.0 }),
                declared_limit: None,
            }),
            grid: Some(vec![0.25, 0.5, 0.9]),
            ..base
        },
        Preset::DubinsGilat => RunConfig {
            distribution: Some(uniform),
            pair: Some(PairConfig {
                f0: 0.0,
                z: FunctionConfig::Const { c: 1.0 },
                h: Some(FunctionConfig::Affine { a: 2.0, b: -1.0 }),
                declared_limit: None,
            }),
            grid: Some(vec![0.25, 0.5, 0.75]),
            ..base
        },
        Preset::Dellacherie => RunConfig {
            distribution: Some(exponential),
            pair: Some(PairConfig {
                f0: 0.0,
                z: FunctionConfig::Exp { rate: 1.0, scale: 1.0 },
                h: Some(FunctionConfig::Affine { a: 1.0, b: -1.0 }),
                declared_limit: None,
            }),
            mark: Some(MarkConfig {
                k: FunctionConfig::Const { c: 1.0 },
                kabs: FunctionConfig::Const { c: 1.0 },
            }),
            grid: Some(vec![0.5, 1.0, 2.0, 3.0, 5.0]),
            ..base
        },
        Preset::Emery => RunConfig {
            distribution: Some(exponential),
            pair: Some(PairConfig {
                f0: 0.0,
                z: FunctionConfig::Const { c: 0.0 },
                h: Some(FunctionConfig::Const { c: 0.0 }),
                declared_limit: None,
            }),
            noise: Some(NoiseConfig::TwoPoint {
                j: FunctionConfig::Power { alpha: -1.0 },
            }),
            mark: Some(MarkConfig {
                k: FunctionConfig::Const { c: 0.0 },
                kabs: FunctionConfig::Power { alpha: -1.0 },
            }),
            grid: Some(vec![0.5, 1.0, 2.0]),
            ..base
        },
        Preset::CaseBTwoAtoms => RunConfig {
            distribution: Some(DistributionConfig {
                atoms: vec![(1.0, 0.5), (2.0, 0.5)],
                ..Default::default()
            }),
            pair: Some(PairConfig {
                f0: 0.0,
                z: FunctionConfig::Table {
                    ts: vec![1.0, 2.0],
                    vs: vec![-2.0, 0.0],
                },
                h: Some(FunctionConfig::Table {
                    ts: vec![1.0, 2.0],
                    vs: vec![1.0, -1.0],
                }),
                declared_limit: None,
            }),
            mark: Some(MarkConfig {
                k: FunctionConfig::Const { c: 1.0 },
                kabs: FunctionConfig::Const { c: 1.0 },
            }),
            grid: Some(vec![0.5, 1.0, 1.5]),
            ..base
        },
    }
}

/// A preset instantiated into runnable objects.
#[derive(Debug, Clone)]
pub struct PresetBundle {
    pub preset: Preset,
    pub distribution: Distribution,
    pub pair: ConditionMPair,
    pub noise: NoiseSpec,
    pub mark: Option<JumpMarkSpec>,
    /// Grid used by the preset's simulation checks.
    pub sim_grid: Vec<f64>,
}

/// Builds the runnable bundle for a preset.
pub fn bundle(preset: Preset, opts: &NumericOptions) -> Result<PresetBundle> {
    match preset {
        Preset::Dellacherie => {
            let d = Distribution::exponential(1.0);
            let mark = JumpMarkSpec::unit();
            let (_, cm) = compensated_martingale(&mark, &d, opts)?;
            Ok(PresetBundle {
                preset,
                distribution: d,
                pair: cm,
                noise: NoiseSpec::Zero,
                mark: Some(mark),
                sim_grid: vec![0.5, 1.0, 2.0, 3.0, 5.0],
            })
        }
        Preset::Emery => {
            let d = Distribution::exponential(1.0);
            let pair = crate::solver::DerivativePair::new(
                0.0,
                RealFunction::constant(0.0),
                d.clone(),
                opts,
            )?;
            let cm = ConditionMPair::new(pair, RealFunction::constant(0.0));
            let noise = NoiseSpec::two_point(RealFunction::power(-1.0));
            // The mark of the product process Y·γ^{-1}·1{t≥γ}: conditional
            // mean 0, conditional absolute mean γ^{-1}.
            let mark = JumpMarkSpec {
                k: RealFunction::constant(0.0),
                kabs: RealFunction::power(-1.0),
            };
            Ok(PresetBundle {
                preset,
                distribution: d,
                pair: cm,
                noise,
                mark: Some(mark),
                sim_grid: vec![0.5, 1.0, 2.0],
            })
        }
        Preset::UsualCond => {
            let d = Distribution::uniform(0.0, 1.0);
            let cm = solve_f_from_h(RealFunction::constant(0.0), d.clone(), Some(1.0), opts)?;
            Ok(PresetBundle {
                preset,
                distribution: d,
                pair: cm,
                noise: NoiseSpec::Zero,
                mark: None,
                sim_grid: vec![0.25, 0.5, 0.9],
            })
        }
        Preset::DubinsGilat => {
            let d = Distribution::uniform(0.0, 1.0);
            let cm = solve_f_from_h(RealFunction::affine(2.0, -1.0), d.clone(), Some(0.0), opts)?;
            Ok(PresetBundle {
                preset,
                distribution: d,
                pair: cm,
                noise: NoiseSpec::Zero,
                mark: None,
                sim_grid: vec![0.25, 0.5, 0.75],
            })
        }
        Preset::CaseBTwoAtoms => {
            let d = Distribution::from_atoms(&[(1.0, 0.5), (2.0, 0.5)])?;
            let h = RealFunction::table(vec![1.0, 2.0], vec![1.0, -1.0])?;
            let cm = solve_f_from_h(h, d.clone(), None, opts)?;
            Ok(PresetBundle {
                preset,
                distribution: d,
                pair: cm,
                noise: NoiseSpec::Zero,
                mark: Some(JumpMarkSpec::unit()),
                sim_grid: vec![0.5, 1.0, 1.5],
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{classify, sigma_status, verify_condition_m, MartingaleType, SigmaStatus};

    #[test]
    fn every_preset_builds_and_self_verifies() {
        let opts = NumericOptions::default();
        for p in Preset::ALL {
            let b = bundle(p, &opts).unwrap();
            let report = verify_condition_m(&b.pair, 32, 1e-8, &opts).unwrap();
            assert!(report.passes(), "{}: residual {}", p.name(), report.max_residual);
            assert_eq!(Preset::from_name(p.name()), Some(p));
        }
    }

    #[test]
    fn run_configs_reproduce_the_bundles() {
        let opts = NumericOptions::default();
        for p in Preset::ALL {
            let cfg = run_config(p);
            let d = cfg.distribution.as_ref().unwrap().build().unwrap();
            let cm = cfg.pair.as_ref().unwrap().build(&d, &opts).unwrap();
            let b = bundle(p, &opts).unwrap();
            for t in d.support_grid(16, 1e-9) {
                assert!(
                    (cm.pair.f(t) - b.pair.pair.f(t)).abs() <= 1e-7,
                    "{}: F({t}) {} vs {}",
                    p.name(),
                    cm.pair.f(t),
                    b.pair.pair.f(t)
                );
            }
            let report = verify_condition_m(&cm, 16, 1e-7, &opts).unwrap();
            assert!(report.passes(), "{}: residual {}", p.name(), report.max_residual);
        }
    }

    #[test]
    fn preset_headline_verdicts() {
        let opts = NumericOptions::default();

        let usual = bundle(Preset::UsualCond, &opts).unwrap();
        assert_eq!(
            classify(&usual.pair, &usual.noise, &opts).unwrap().tag,
            MartingaleType::Type2a
        );

        let dg = bundle(Preset::DubinsGilat, &opts).unwrap();
        assert_eq!(
            classify(&dg.pair, &dg.noise, &opts).unwrap().tag,
            MartingaleType::Type4
        );

        let emery = bundle(Preset::Emery, &opts).unwrap();
        assert_eq!(
            sigma_status(&emery.pair, &emery.noise, &opts).unwrap(),
            SigmaStatus::StrictlySigma
        );

        let case_b = bundle(Preset::CaseBTwoAtoms, &opts).unwrap();
        assert_eq!(
            classify(&case_b.pair, &case_b.noise, &opts).unwrap().tag,
            MartingaleType::Type4
        );

        let della = bundle(Preset::Dellacherie, &opts).unwrap();
        for t in [0.5, 1.0, 2.0, 5.0] {
            assert!((della.pair.pair.f(t) - t).abs() <= 1e-8);
        }
    }
}
