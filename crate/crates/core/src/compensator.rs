//! Compensators of single-jump processes `X_t = V·1{t≥γ}`.
//!
//! The mark `V` enters only through its conditional moments given the jump
//! time: `K(t) = E[V | γ=t]` and `Kabs(t) = E[|V| | γ=t]`. Locally integrable
//! variation is equivalent to local dG-integrability of `Kabs`, and the
//! compensator is the deterministic curve `F(t) = ∫_{(0,t]} Ḡ(s-)^{-1} K(s) dG(s)`
//! run until the jump, plus an endpoint term when the law puts an atom at a
//! finite right endpoint. The module also inverts the relation: a positive
//! conditional mean `K` determines the survival function through
//! `exp(-∫_0^t ds / K(s))`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::func::RealFunction;
use crate::integrate::{adaptive_quadrature, CumulativeIntegral};
use crate::measure::{CaseTag, Distribution, EndpointCase};
use crate::options::NumericOptions;
use crate::solver::{ConditionMPair, DerivativePair};

/// Conditional moments of the jump mark given the jump time.
#[derive(Debug, Clone)]
pub struct JumpMarkSpec {
    /// `K(t) = E[V | γ = t]`.
    pub k: RealFunction,
    /// `Kabs(t) = E[|V| | γ = t] ≥ |K(t)|`.
    pub kabs: RealFunction,
}

impl JumpMarkSpec {
    /// Validates `|K| ≤ Kabs` on a probe grid and, when the law has an atom
    /// at 0, the convention `K(0) = 0` (no mark on an immediate jump).
    pub fn new(k: RealFunction, kabs: RealFunction, d: &Distribution, opts: &NumericOptions) -> Result<Self> {
        let mut probe = d.support_grid(opts.grid_size, opts.survival_floor);
        probe.extend(d.atoms().iter().map(|a| a.at));
        for t in probe {
            let (kv, av) = (k.eval(t), kabs.eval(t));
            if kv.is_finite() && av.is_finite() && kv.abs() > av + 1e-12 {
                return Err(Error::Precondition(format!(
                    "|K({t})| = {} exceeds Kabs({t}) = {}",
                    kv.abs(),
                    av
                )));
            }
        }
        if d.cdf(0.0) > 0.0 && k.eval(0.0).abs() > 1e-12 {
            return Err(Error::Precondition(
                "the law has an atom at 0, so K(0) must be 0".into(),
            ));
        }
        Ok(JumpMarkSpec { k, kabs })
    }

    /// Unit mark: `V ≡ 1`, the single-jump counting process.
    pub fn unit() -> Self {
        JumpMarkSpec {
            k: RealFunction::constant(1.0),
            kabs: RealFunction::constant(1.0),
        }
    }
}

/// Whether `X` has locally integrable variation:
/// `∫_{(0,t]} Kabs dG < ∞` for every `t` in the time set (including `t_G`
/// itself in Case B).
pub fn check_locally_integrable(
    mark: &JumpMarkSpec,
    d: &Distribution,
    opts: &NumericOptions,
) -> Result<bool> {
    let local = CumulativeIntegral::new(RealFunction::abs(mark.kabs.clone()), d.clone(), opts);
    match local {
        Err(Error::NotLocallyIntegrable { .. }) => return Ok(false),
        Err(e) => return Err(e),
        Ok(_) => {}
    }
    let ec = d.endpoint_case();
    if ec.tag == CaseTag::B && !mark.kabs.eval(ec.t_g).is_finite() {
        return Ok(false);
    }
    Ok(true)
}

/// The compensator of `X_t = V·1{t≥γ}`.
#[derive(Debug, Clone)]
pub struct CompensatorResult {
    /// Deterministic part: `F(0) = 0`, density `z(t) = K(t)/Ḡ(t-)`.
    pub pair: Arc<DerivativePair>,
    /// Case B endpoint increment `K(t_G)`; 0 in Case A.
    pub case_b_jump: f64,
    pub case: EndpointCase,
}

impl CompensatorResult {
    /// `F(t)` for `t < t_G`, extended by its limit at `t_G` in Case B.
    pub fn f(&self, t: f64, opts: &NumericOptions) -> Result<f64> {
        if self.case.tag == CaseTag::B && t >= self.case.t_g {
            return self.pair.f_limit(opts)?.require_converged();
        }
        Ok(self.pair.f(t))
    }
}

/// Computes the compensator curve; fails unless the variation is locally
/// integrable.
pub fn compensate(
    mark: &JumpMarkSpec,
    d: &Distribution,
    opts: &NumericOptions,
) -> Result<CompensatorResult> {
    if !check_locally_integrable(mark, d, opts)? {
        return Err(Error::NotLocallyIntegrable { at: d.t_g() });
    }
    let case = d.endpoint_case();
    let z = {
        let d = d.clone();
        let k = mark.k.clone();
        RealFunction::dynamic(move |s| {
            if s <= 0.0 {
                return 0.0;
            }
            let gbar_left = d.survival_left(s);
            if gbar_left <= 0.0 {
                return 0.0;
            }
            k.eval(s) / gbar_left
        })
    };
    let pair = DerivativePair::new(0.0, z, d.clone(), opts)?;
    let case_b_jump = if case.tag == CaseTag::B {
        mark.k.eval_checked(case.t_g)? * 1.0
    } else {
        0.0
    };
    Ok(CompensatorResult {
        pair: Arc::new(pair),
        case_b_jump,
        case,
    })
}

/// Pathwise compensator value `A_t = F(t∧γ) + K(t_G)·1{γ≥t_G}·1{t≥t_G}`.
pub fn compensator_path(
    res: &CompensatorResult,
    gamma: f64,
    t: f64,
    opts: &NumericOptions,
) -> Result<f64> {
    if t <= 0.0 {
        return Ok(0.0);
    }
    let stopped = t.min(gamma);
    let mut a = res.f(stopped, opts)?;
    if res.case.tag == CaseTag::B && gamma >= res.case.t_g && t >= res.case.t_g {
        a += res.case_b_jump;
    }
    Ok(a)
}

/// The martingale `M = A - X` of a compensated single-jump process, as a
/// validated pair: same `F`, and `H = F - K` (with the Case B endpoint value
/// `F(t_G)`). Useful for verifying the compensator through the balance
/// equation or by simulation.
pub fn compensated_martingale(
    mark: &JumpMarkSpec,
    d: &Distribution,
    opts: &NumericOptions,
) -> Result<(CompensatorResult, ConditionMPair)> {
    let res = compensate(mark, d, opts)?;
    let case = res.case;
    let h = {
        let pair = Arc::clone(&res.pair);
        let k = mark.k.clone();
        let endpoint = if case.tag == CaseTag::B {
            Some(res.f(case.t_g, opts)?)
        } else {
            None
        };
        RealFunction::dynamic(move |t| {
            if t <= 0.0 {
                return 0.0;
            }
            if let Some(end) = endpoint {
                if t >= case.t_g {
                    return end;
                }
            }
            pair.f(t) - k.eval(t)
        })
    };
    let cm = ConditionMPair {
        pair: Arc::clone(&res.pair),
        h,
        declared_limit: None,
    };
    Ok((res, cm))
}

/// Survival function recovered from a positive conditional mean:
/// `P(γ > t) = exp(-∫_0^t ds / K(s))`, by ordinary quadrature.
pub fn survival_from_k(k: &RealFunction, t: f64, opts: &NumericOptions) -> Result<f64> {
    if t <= 0.0 {
        return Ok(1.0);
    }
    // Positivity probe: the inversion is meaningless once K touches 0.
    for i in 0..=64 {
        let s = t * i as f64 / 64.0;
        let v = k.eval(s);
        if !(v > 0.0) {
            return Err(Error::VanishingK { at: s, value: v });
        }
    }
    let integrand = |s: f64| 1.0 / k.eval(s);
    let r = adaptive_quadrature(
        &integrand,
        0.0,
        t,
        opts.quad_abs_tol,
        opts.quad_rel_tol,
        opts.max_subdivisions,
    )?;
    let hazard = r.require_converged()?;
    Ok((-hazard).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::RealFunction as F;
    use crate::integrate::atomic_oracle;
    use crate::solver::verify_condition_m;

    fn opts() -> NumericOptions {
        NumericOptions::default()
    }

    fn two_atoms() -> Distribution {
        Distribution::from_atoms(&[(1.0, 0.5), (2.0, 0.5)]).unwrap()
    }

    #[test]
    fn local_integrability_probe() {
        let d = Distribution::exponential(1.0);
        let bad = JumpMarkSpec {
            k: F::constant(0.0),
            kabs: F::power(-1.0),
        };
        assert!(!check_locally_integrable(&bad, &d, &opts()).unwrap());

        let ok = JumpMarkSpec {
            k: F::constant(0.0),
            kabs: F::power(-0.5),
        };
        assert!(check_locally_integrable(&ok, &d, &opts()).unwrap());

        assert!(check_locally_integrable(&JumpMarkSpec::unit(), &d, &opts()).unwrap());
        assert!(check_locally_integrable(&JumpMarkSpec::unit(), &two_atoms(), &opts()).unwrap());
    }

    #[test]
    fn hazard_identity_exponential() {
        // K ≡ 1 against the unit exponential: F(t) = t.
        let res = compensate(&JumpMarkSpec::unit(), &Distribution::exponential(1.0), &opts()).unwrap();
        for t in [0.1, 0.5, 1.0, 2.0, 5.0] {
            assert!(
                (res.pair.f(t) - t).abs() <= 1e-8,
                "F({t}) = {}",
                res.pair.f(t)
            );
        }
        assert_eq!(res.case_b_jump, 0.0);
    }

    #[test]
    fn two_atom_compensator_exact() {
        let d = two_atoms();
        let res = compensate(&JumpMarkSpec::unit(), &d, &opts()).unwrap();
        // Hazard increment at t=1: ΔG/Ḡ(1-) = 0.5.
        assert!((res.pair.f(1.0) - 0.5).abs() <= 1e-12);
        assert!((res.pair.f(1.5) - 0.5).abs() <= 1e-12);
        assert_eq!(res.case_b_jump, 1.0);

        // A_∞ on {γ=2} is F(2) + K(2) = 0.5 + 1.
        let a_inf_2 = compensator_path(&res, 2.0, 10.0, &opts()).unwrap();
        assert!((a_inf_2 - 1.5).abs() <= 1e-12);
        let a_inf_1 = compensator_path(&res, 1.0, 10.0, &opts()).unwrap();
        assert!((a_inf_1 - 0.5).abs() <= 1e-12);

        // E A_∞ = 0.5·0.5 + 0.5·1.5 = 1 = E X_∞ for the unit mark.
        let e_a_inf = 0.5 * a_inf_1 + 0.5 * a_inf_2;
        let e_x_inf = atomic_oracle(&F::constant(1.0), &d, 0.0, 2.0).unwrap();
        assert_eq!(e_a_inf, e_x_inf);
    }

    #[test]
    fn zero_mark_gives_zero_compensator() {
        let mark = JumpMarkSpec {
            k: F::constant(0.0),
            kabs: F::constant(0.0),
        };
        let res = compensate(&mark, &Distribution::uniform(0.0, 1.0), &opts()).unwrap();
        assert_eq!(res.pair.f(0.5), 0.0);
        assert_eq!(res.case_b_jump, 0.0);
    }

    #[test]
    fn compensator_path_examples() {
        let res = compensate(&JumpMarkSpec::unit(), &Distribution::exponential(1.0), &opts()).unwrap();
        // Case A: A_t = F(t∧γ) = t∧γ.
        let a = compensator_path(&res, 2.0, 3.0, &opts()).unwrap();
        assert!((a - 2.0).abs() <= 1e-8);
        assert_eq!(compensator_path(&res, 2.0, 0.0, &opts()).unwrap(), 0.0);

        let res_b = compensate(&JumpMarkSpec::unit(), &two_atoms(), &opts()).unwrap();
        let a_b = compensator_path(&res_b, 2.0, 2.0, &opts()).unwrap();
        assert!((a_b - 1.5).abs() <= 1e-12);
    }

    #[test]
    fn compensate_requires_integrability() {
        let d = Distribution::exponential(1.0);
        let bad = JumpMarkSpec {
            k: F::power(-1.0),
            kabs: F::power(-1.0),
        };
        assert!(matches!(
            compensate(&bad, &d, &opts()),
            Err(Error::NotLocallyIntegrable { .. })
        ));
    }

    #[test]
    fn compensated_process_is_a_martingale() {
        for d in [Distribution::exponential(1.0), two_atoms()] {
            let (_, cm) = compensated_martingale(&JumpMarkSpec::unit(), &d, &opts()).unwrap();
            let report = verify_condition_m(&cm, 32, 1e-8, &opts()).unwrap();
            assert!(report.passes(), "residual {}", report.max_residual);
        }
    }

    #[test]
    fn survival_inversion_closed_forms() {
        // K ≡ 1: exp(-t).
        let s = survival_from_k(&F::constant(1.0), 1.0, &opts()).unwrap();
        assert!((s - (-1.0f64).exp()).abs() <= 1e-10);
        // K = 1+s: ∫ ds/(1+s) = ln 2 at t=1.
        let s = survival_from_k(&F::affine(1.0, 1.0), 1.0, &opts()).unwrap();
        assert!((s - 0.5).abs() <= 1e-10);
        assert_eq!(survival_from_k(&F::constant(1.0), 0.0, &opts()).unwrap(), 1.0);
    }

    #[test]
    fn survival_inversion_rejects_vanishing_k() {
        let k = F::affine(-1.0, 1.0); // 1 - s, vanishes at 1
        assert!(matches!(
            survival_from_k(&k, 2.0, &opts()),
            Err(Error::VanishingK { .. })
        ));
    }

    #[test]
    fn survival_round_trip_through_unit_time() {
        // With F(t) = t the conditional mean determined by a continuous law
        // is K = Ḡ/g; feeding it back must reproduce the survival function.
        // Uniform: K(s) = 1-s. Exponential: K ≡ 1.
        for t in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let s = survival_from_k(&F::affine(-1.0, 1.0), t, &opts()).unwrap();
            assert!((s - (1.0 - t)).abs() <= 1e-8, "t={t}: {s}");
        }
        for t in [0.5, 1.0, 2.0] {
            let s = survival_from_k(&F::constant(1.0), t, &opts()).unwrap();
            assert!((s - (-t).exp()).abs() <= 1e-8);
        }
    }

    #[test]
    fn mark_validation() {
        let d = Distribution::exponential(1.0);
        assert!(JumpMarkSpec::new(F::constant(2.0), F::constant(1.0), &d, &opts()).is_err());
        assert!(JumpMarkSpec::new(F::constant(0.5), F::constant(1.0), &d, &opts()).is_ok());

        let with_zero_atom = Distribution::from_atoms(&[(0.0, 0.5), (1.0, 0.5)]).unwrap();
        assert!(JumpMarkSpec::new(F::constant(1.0), F::constant(1.0), &with_zero_atom, &opts()).is_err());
    }
}
