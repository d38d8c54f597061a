//! Solving, validating and classifying the balance equation
//!
//! ```text
//! F(t)·Ḡ(t) + ∫_{(0,t]} H dG = F(0)·Ḡ(0),   t < t_G,
//! ```
//!
//! the necessary and sufficient condition for the single-jump process built
//! from `(F, H)` to be a local martingale. `F` is always carried as
//! `(F(0), z = dF/dG)`, so absolute continuity with respect to `G` holds by
//! construction. Both solution directions are implemented: `F` from `H`
//! (initial value free in Case A, forced in Case B) and `H` from `F`. On top
//! sit the martingale-property check, the decomposition into a jump-adapted
//! part and an orthogonal part, the five-way classification of global
//! behaviour, and the σ-martingale status of the orthogonal noise.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::func::RealFunction;
use crate::integrate::{improper_integral, CumulativeIntegral, IntegralResult};
use crate::measure::{CaseTag, Distribution, EndpointCase};
use crate::options::NumericOptions;

/// A function `F` on `[0, t_G)` stored as `(F(0), z = dF/dG)`, together with
/// the reference law. `F(t) = F(0) + ∫_{(0,t]} z dG` by construction.
///
/// The stored values `z(0)` and, in Case B, `z(t_G)` are conventions: all
/// integrals are over intervals excluding those points, so they can never
/// affect a computed value.
#[derive(Debug, Clone)]
pub struct DerivativePair {
    f0: f64,
    z: RealFunction,
    d: Distribution,
    case: EndpointCase,
    cum_z: CumulativeIntegral,
    cum_abs_z: CumulativeIntegral,
}

impl DerivativePair {
    /// Validates `z ∈ L¹_loc(dG)` (and, in Case B, dG-integrability of `|z|`
    /// up to the endpoint) and precomputes the cumulative integrals.
    pub fn new(f0: f64, z: RealFunction, d: Distribution, opts: &NumericOptions) -> Result<Self> {
        let case = d.endpoint_case();
        let cum_abs_z = CumulativeIntegral::new(RealFunction::abs(z.clone()), d.clone(), opts)?;
        let cum_z = CumulativeIntegral::new(z.clone(), d.clone(), opts)?;
        if case.tag == CaseTag::B {
            let total = improper_integral(&RealFunction::abs(z.clone()), &d, opts)?;
            if !total.converged {
                return Err(Error::CaseBNonIntegrable { t_g: case.t_g });
            }
        }
        Ok(DerivativePair {
            f0,
            z,
            d,
            case,
            cum_z,
            cum_abs_z,
        })
    }

    pub fn f0(&self) -> f64 {
        self.f0
    }

    pub fn z(&self) -> &RealFunction {
        &self.z
    }

    pub fn distribution(&self) -> &Distribution {
        &self.d
    }

    pub fn case(&self) -> EndpointCase {
        self.case
    }

    /// `F(t) = F(0) + ∫_{(0,t]} z dG`.
    pub fn f(&self, t: f64) -> f64 {
        self.f0 + self.cum_z.eval(t)
    }

    /// Left limit `F(t-) = F(0) + ∫_{(0,t)} z dG`.
    pub fn f_left(&self, t: f64) -> f64 {
        self.f0 + self.cum_z.eval_open(t)
    }

    /// `lim_{t↑t_G} F(t)`, when the improper integral of `z` settles.
    pub fn f_limit(&self, opts: &NumericOptions) -> Result<IntegralResult> {
        let r = improper_integral(&self.z, &self.d, opts)?;
        Ok(IntegralResult {
            value: self.f0 + r.value,
            converged: r.converged,
            error_estimate: r.error_estimate,
        })
    }

    /// Total variation of `F` over `(0, t)`: `∫_{(0,t)} |z| dG`.
    pub fn variation_before(&self, t: f64) -> f64 {
        self.cum_abs_z.eval_open(t)
    }
}

/// A validated pair `(F, H)` satisfying the balance equation for its law.
#[derive(Debug, Clone)]
pub struct ConditionMPair {
    pub pair: Arc<DerivativePair>,
    pub h: RealFunction,
    /// Optional analytically-known value of `lim F·Ḡ`, for laws whose tail
    /// converges too slowly for the numeric probe (log-order boundaries).
    pub declared_limit: Option<f64>,
}

impl ConditionMPair {
    pub fn new(pair: DerivativePair, h: RealFunction) -> Self {
        ConditionMPair {
            pair: Arc::new(pair),
            h,
            declared_limit: None,
        }
    }

    /// Declares `lim_{t↑t_G} F(t)Ḡ(t)`, overriding the numeric estimate.
    pub fn with_declared_limit(mut self, lim: f64) -> Self {
        self.declared_limit = Some(lim);
        self
    }

    pub fn distribution(&self) -> &Distribution {
        self.pair.distribution()
    }

    pub fn case(&self) -> EndpointCase {
        self.pair.case()
    }

    /// Scales the pair by `c`: `(cF, cH)` satisfies the balance equation too.
    pub fn scaled(&self, c: f64, opts: &NumericOptions) -> Result<ConditionMPair> {
        let pair = DerivativePair::new(
            c * self.pair.f0,
            RealFunction::scale(c, self.pair.z.clone()),
            self.pair.d.clone(),
            opts,
        )?;
        Ok(ConditionMPair {
            pair: Arc::new(pair),
            h: RealFunction::scale(c, self.h.clone()),
            declared_limit: self.declared_limit.map(|l| c * l),
        })
    }
}

/// Conditional law of the orthogonal noise given the jump time; centered by
/// construction.
#[derive(Debug, Clone)]
pub enum NoiseSpec {
    /// No orthogonal part.
    Zero,
    /// `±scale(t)` with probability 1/2 each; `E[|L'| | γ=t] = scale(t)`.
    TwoPoint { scale: RealFunction },
    /// Finite mixture with zero mean, independent of the jump time.
    Mixture { values: Vec<f64>, probs: Vec<f64> },
}

impl NoiseSpec {
    pub fn two_point(scale: RealFunction) -> Self {
        NoiseSpec::TwoPoint { scale }
    }

    /// Validates that probabilities sum to 1 and the mean vanishes.
    pub fn mixture(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if values.len() != probs.len() || values.is_empty() {
            return Err(Error::Precondition(
                "mixture needs matching, non-empty values and probs".into(),
            ));
        }
        if probs.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::Precondition("mixture probabilities must be >= 0".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Precondition(format!(
                "mixture probabilities sum to {total}, expected 1"
            )));
        }
        let mean: f64 = values.iter().zip(&probs).map(|(v, p)| v * p).sum();
        if mean.abs() > 1e-12 {
            return Err(Error::Precondition(format!(
                "mixture mean {mean} must vanish: the noise is centered by construction"
            )));
        }
        Ok(NoiseSpec::Mixture { values, probs })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, NoiseSpec::Zero)
    }

    /// `J(t) = E[|L'| | γ = t]` as an evaluable function.
    pub fn conditional_abs_mean(&self) -> RealFunction {
        match self {
            NoiseSpec::Zero => RealFunction::constant(0.0),
            NoiseSpec::TwoPoint { scale } => RealFunction::abs(scale.clone()),
            NoiseSpec::Mixture { values, probs } => {
                let j = values.iter().zip(probs).map(|(v, p)| v.abs() * p).sum();
                RealFunction::constant(j)
            }
        }
    }

    /// Draws the noise given the jump time and a uniform variate.
    pub fn sample(&self, gamma: f64, u: f64) -> f64 {
        match self {
            NoiseSpec::Zero => 0.0,
            NoiseSpec::TwoPoint { scale } => {
                let j = scale.eval(gamma).abs();
                if u < 0.5 {
                    -j
                } else {
                    j
                }
            }
            NoiseSpec::Mixture { values, probs } => {
                let mut cum = 0.0;
                for (v, p) in values.iter().zip(probs) {
                    cum += p;
                    if u <= cum {
                        return *v;
                    }
                }
                *values.last().unwrap()
            }
        }
    }

    /// Noise of the scaled process `c·M`: the conditional law of `c·L'`.
    pub fn scaled(&self, c: f64) -> NoiseSpec {
        match self {
            NoiseSpec::Zero => NoiseSpec::Zero,
            NoiseSpec::TwoPoint { scale } => NoiseSpec::TwoPoint {
                scale: RealFunction::scale(c.abs(), RealFunction::abs(scale.clone())),
            },
            NoiseSpec::Mixture { values, probs } => NoiseSpec::Mixture {
                values: values.iter().map(|v| c * v).collect(),
                probs: probs.clone(),
            },
        }
    }
}

/// Solves for `F` given `H`: `F(t) = Ḡ(t)^{-1} [F(0)Ḡ(0) - ∫_{(0,t]} H dG]`,
/// with `F(0)` free in Case A and forced to `Ḡ(0)^{-1} ∫_{(0,t_G]} H dG` in
/// Case B. The density is recovered as `z(t) = (F(t) - H(t)) / Ḡ(t-)`.
pub fn solve_f_from_h(
    h: RealFunction,
    d: Distribution,
    f0: Option<f64>,
    opts: &NumericOptions,
) -> Result<ConditionMPair> {
    let case = d.endpoint_case();

    // Local dG-integrability of |H| on compacts of the time set.
    CumulativeIntegral::new(RealFunction::abs(h.clone()), d.clone(), opts)?;
    let cum_h = CumulativeIntegral::new(h.clone(), d.clone(), opts)?;

    let gbar0 = d.survival(0.0);
    let f0 = match case.tag {
        CaseTag::A => f0.ok_or(Error::MissingInitialValue)?,
        CaseTag::B => {
            let abs_open = improper_integral(&RealFunction::abs(h.clone()), &d, opts)?;
            if !abs_open.converged {
                return Err(Error::CaseBNonIntegrable { t_g: case.t_g });
            }
            let open = improper_integral(&h, &d, opts)?.require_converged()?;
            let endpoint = h.eval_checked(case.t_g)? * d.atom_mass_at(case.t_g);
            (open + endpoint) / gbar0
        }
    };

    let z = {
        let d = d.clone();
        let h = h.clone();
        let t_g = case.t_g;
        let case_b = case.tag == CaseTag::B;
        RealFunction::dynamic(move |s| {
            if s <= 0.0 || (case_b && s >= t_g) {
                return 0.0; // arbitrary by convention, never integrated
            }
            let gbar = d.survival(s);
            let gbar_left = d.survival_left(s);
            if gbar_left <= 0.0 || gbar <= 0.0 {
                return 0.0;
            }
            let f_s = (f0 * gbar0 - cum_h.eval(s)) / gbar;
            (f_s - h.eval(s)) / gbar_left
        })
    };

    let pair = DerivativePair::new(f0, z, d, opts)?;
    Ok(ConditionMPair::new(pair, h))
}

/// Solves for `H` given `F`: `H(t) = F(t) - Ḡ(t-)·z(t)` on `(0, t_G)`, with
/// `H(0) = F(0)` by convention and, in Case B, `H(t_G) = lim_{t↑t_G} F(t)`.
pub fn solve_h_from_f(pair: DerivativePair, opts: &NumericOptions) -> Result<ConditionMPair> {
    let case = pair.case();
    let endpoint_value = if case.tag == CaseTag::B {
        Some(pair.f_limit(opts)?.require_converged()?)
    } else {
        None
    };

    let shared = Arc::new(pair);
    let h = {
        let pair = Arc::clone(&shared);
        let t_g = case.t_g;
        RealFunction::dynamic(move |t| {
            if t <= 0.0 {
                return pair.f0();
            }
            if let Some(end) = endpoint_value {
                if t >= t_g {
                    return end;
                }
            }
            pair.f(t) - pair.distribution().survival_left(t) * pair.z().eval(t)
        })
    };

    Ok(ConditionMPair {
        pair: shared,
        h,
        declared_limit: None,
    })
}

/// Pointwise residual report for the balance equation.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    /// Largest residual of `F(t)Ḡ(t) + ∫_{(0,t]} H dG - F(0)Ḡ(0)` on the grid.
    pub max_residual: f64,
    /// Grid point attaining it.
    pub worst_t: f64,
    /// Case B endpoint mismatch `|lim F - H(t_G)|`, when applicable.
    pub endpoint_residual: Option<f64>,
    pub grid_points: usize,
    pub tol: f64,
}

impl ResidualReport {
    pub fn passes(&self) -> bool {
        self.max_residual <= self.tol && self.endpoint_residual.is_none_or(|r| r <= self.tol)
    }
}

/// Evaluates the balance-equation residual on a validation grid (atoms plus
/// quantile-spaced points of the continuous part, all with `Ḡ(t)` above the
/// floor) and, in Case B, the endpoint matching condition.
pub fn verify_condition_m(
    cm: &ConditionMPair,
    grid_size: usize,
    tol: f64,
    opts: &NumericOptions,
) -> Result<ResidualReport> {
    let d = cm.distribution();
    let case = cm.case();
    let gbar0 = d.survival(0.0);
    let f0 = cm.pair.f0();

    let grid = d.support_grid(grid_size, opts.survival_floor);
    let mut max_residual: f64 = 0.0;
    let mut worst_t = 0.0;
    let cum_h = CumulativeIntegral::new(cm.h.clone(), d.clone(), opts)?;
    for &t in &grid {
        if case.t_g.is_finite() && t >= case.t_g {
            continue;
        }
        let residual = (cm.pair.f(t) * d.survival(t) + cum_h.eval(t) - f0 * gbar0).abs();
        if residual > max_residual {
            max_residual = residual;
            worst_t = t;
        }
    }

    let endpoint_residual = if case.tag == CaseTag::B {
        let lim = cm.pair.f_limit(opts)?.require_converged()?;
        Some((lim - cm.h.eval_checked(case.t_g)?).abs())
    } else {
        None
    };

    Ok(ResidualReport {
        max_residual,
        worst_t,
        endpoint_residual,
        grid_points: grid.len(),
        tol,
    })
}

/// Outcome of the martingale-property check.
#[derive(Debug, Clone)]
pub struct MartingaleCheck {
    /// `E|M_t| < ∞` held at every grid point.
    pub integrable: bool,
    /// The balance-equation residual stayed within tolerance.
    pub mean_invariant: bool,
    pub max_residual: f64,
    /// First grid point where integrability failed, if any.
    pub first_failure: Option<f64>,
}

impl MartingaleCheck {
    pub fn verdict(&self) -> bool {
        self.integrable && self.mean_invariant
    }
}

/// Checks the two halves of the martingale criterion on a grid:
/// `E|M_t| < ∞` via `|F(t)|Ḡ(t) + ∫_{(0,t]} |H| dG + ∫_{(0,t]} J dG < ∞`, and
/// mean invariance through the balance-equation residual.
pub fn verify_martingale_property(
    cm: &ConditionMPair,
    noise: &NoiseSpec,
    grid: &[f64],
    opts: &NumericOptions,
) -> Result<MartingaleCheck> {
    let d = cm.distribution();
    let j = noise.conditional_abs_mean();

    let mut integrable = true;
    let mut first_failure = None;

    let abs_h = CumulativeIntegral::new(RealFunction::abs(cm.h.clone()), d.clone(), opts);
    let abs_j = CumulativeIntegral::new(j, d.clone(), opts);
    match (&abs_h, &abs_j) {
        (Ok(ch), Ok(cj)) => {
            for &t in grid {
                let bound = cm.pair.f(t).abs() * d.survival(t) + ch.eval(t) + cj.eval(t);
                if !bound.is_finite() {
                    integrable = false;
                    first_failure = Some(t);
                    break;
                }
            }
        }
        (Err(Error::NotLocallyIntegrable { at }), _)
        | (_, Err(Error::NotLocallyIntegrable { at })) => {
            integrable = false;
            first_failure = Some(*at);
        }
        (Err(e), _) | (_, Err(e)) => return Err(e.clone()),
    }

    let report = verify_condition_m(cm, opts.grid_size, opts.condition_m_tol, opts)?;
    Ok(MartingaleCheck {
        integrable,
        mean_invariant: report.passes(),
        max_residual: report.max_residual,
        first_failure,
    })
}

/// The unique two-part decomposition of a local martingale.
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// The part adapted to the plain jump-time filtration: same `(F, H)`,
    /// no orthogonal noise.
    pub jump_adapted: (ConditionMPair, NoiseSpec),
    /// The orthogonal part: vanishes before the jump (`F ≡ 0`, `H ≡ 0`) and
    /// carries all the noise.
    pub orthogonal: (ConditionMPair, NoiseSpec),
}

/// Splits `M` into `M' + M''` as above.
pub fn decompose(
    cm: &ConditionMPair,
    noise: &NoiseSpec,
    opts: &NumericOptions,
) -> Result<Decomposition> {
    let zero_pair = DerivativePair::new(
        0.0,
        RealFunction::constant(0.0),
        cm.distribution().clone(),
        opts,
    )?;
    let orthogonal = ConditionMPair::new(zero_pair, RealFunction::constant(0.0));
    Ok(Decomposition {
        jump_adapted: (cm.clone(), NoiseSpec::Zero),
        orthogonal: (orthogonal, noise.clone()),
    })
}

/// Global-behaviour classes of a local martingale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MartingaleType {
    /// Terminal value missing or non-integrable.
    Type1,
    /// Closed supermartingale losing mass at infinity.
    Type2a,
    /// Closed submartingale gaining mass at infinity.
    Type2b,
    /// Uniformly integrable martingale without integrable running supremum.
    Type3,
    /// Integrable total variation.
    Type4,
}

impl std::fmt::Display for MartingaleType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            MartingaleType::Type1 => "Type1",
            MartingaleType::Type2a => "Type2a",
            MartingaleType::Type2b => "Type2b",
            MartingaleType::Type3 => "Type3",
            MartingaleType::Type4 => "Type4",
        };
        f.write_str(s)
    }
}

/// Classification verdict together with the evaluated decision path.
#[derive(Debug, Clone)]
pub struct Classification {
    pub tag: MartingaleType,
    pub case: EndpointCase,
    /// `∫_{[0,t_G)} |H| dG` (atom at 0 included), when evaluated.
    pub h_abs_integral: Option<IntegralResult>,
    /// `E(|L'| 1_{γ<∞}) = ∫_{[0,t_G)} J dG`, when evaluated.
    pub noise_abs_integral: Option<IntegralResult>,
    /// `lim_{t↑t_G} F(t)Ḡ(t)`, when evaluated.
    pub lim_f_gbar: Option<f64>,
    /// `∫_{[0,t_G)} Ḡ |dF/dG| dG`, when evaluated.
    pub h1_integral: Option<IntegralResult>,
    pub mass_at_infinity: f64,
    /// Human-readable decision path.
    pub notes: Vec<String>,
}

/// Classifies the global behaviour of the local martingale `(pair, noise)`.
///
/// Case B is always Type 4. In Case A the decision runs: non-integrable
/// terminal data → Type 1; positive mass at infinity → Type 4; then the sign
/// of `lim F·Ḡ` separates Type 2a/2b, and on the null boundary the
/// variation integral separates Type 3 (divergent) from Type 4 (convergent).
pub fn classify(
    cm: &ConditionMPair,
    noise: &NoiseSpec,
    opts: &NumericOptions,
) -> Result<Classification> {
    let d = cm.distribution();
    let case = cm.case();
    let mut notes = Vec::new();

    if case.tag == CaseTag::B {
        notes.push(format!(
            "Case B (atom of mass {} at t_G = {}): integrable variation",
            d.atom_mass_at(case.t_g),
            case.t_g
        ));
        return Ok(Classification {
            tag: MartingaleType::Type4,
            case,
            h_abs_integral: None,
            noise_abs_integral: None,
            lim_f_gbar: None,
            h1_integral: None,
            mass_at_infinity: d.mass_at_infinity(),
            notes,
        });
    }

    let g0 = d.cdf(0.0);
    let atom0 = |f: &RealFunction| -> Result<f64> {
        if g0 > 0.0 {
            Ok(f.eval_checked(0.0)?.abs() * g0)
        } else {
            Ok(0.0)
        }
    };

    // ∫_{[0,t_G)} |H| dG and E(|L'| 1_{γ<∞}).
    let mut h_abs = improper_integral(&RealFunction::abs(cm.h.clone()), d, opts)?;
    h_abs.value += atom0(&cm.h)?;
    let j = noise.conditional_abs_mean();
    let mut j_abs = improper_integral(&j, d, opts)?;
    j_abs.value += atom0(&j)?;

    if !h_abs.converged || !j_abs.converged {
        notes.push(format!(
            "non-integrable terminal data: ∫|H| dG {}, E|L'| {}",
            verdict_word(h_abs.converged),
            verdict_word(j_abs.converged)
        ));
        return Ok(Classification {
            tag: MartingaleType::Type1,
            case,
            h_abs_integral: Some(h_abs),
            noise_abs_integral: Some(j_abs),
            lim_f_gbar: None,
            h1_integral: None,
            mass_at_infinity: d.mass_at_infinity(),
            notes,
        });
    }
    notes.push(format!(
        "∫|H| dG = {:.6e} and E|L'| = {:.6e}, both finite",
        h_abs.value, j_abs.value
    ));

    if d.mass_at_infinity() > 0.0 {
        notes.push(format!(
            "P(γ = ∞) = {} > 0 with integrable terminal data: integrable variation",
            d.mass_at_infinity()
        ));
        return Ok(Classification {
            tag: MartingaleType::Type4,
            case,
            h_abs_integral: Some(h_abs),
            noise_abs_integral: Some(j_abs),
            lim_f_gbar: None,
            h1_integral: None,
            mass_at_infinity: d.mass_at_infinity(),
            notes,
        });
    }

    // lim F·Ḡ = F(0)Ḡ(0) - ∫_{(0,t_G)} H dG.
    let (lim, uncertainty) = match cm.declared_limit {
        Some(v) => {
            notes.push(format!("lim F·Ḡ = {v} (declared)"));
            (v, 0.0)
        }
        None => {
            let ih = improper_integral(&cm.h, d, opts)?;
            let lim = cm.pair.f0() * d.survival(0.0) - ih.value;
            let unc = if ih.converged {
                ih.error_estimate
            } else {
                f64::INFINITY
            };
            notes.push(format!("lim F·Ḡ ≈ {lim:.6e} (uncertainty {unc:.2e})"));
            (lim, unc)
        }
    };

    let tol = opts.sign_tol;
    if lim.abs() <= tol && uncertainty <= tol {
        // Null boundary: the variation integral decides type 3 vs 4.
        let h1_integrand = {
            let d2 = d.clone();
            let z = cm.pair.z().clone();
            let mut f = RealFunction::dynamic(move |s| d2.survival(s) * z.eval(s).abs());
            if let Some(v) = cm.pair.z().declared_tail() {
                f = f.with_declared_tail(v);
            }
            f
        };
        let mut h1 = improper_integral(&h1_integrand, d, opts)?;
        h1.value += atom0(&h1_integrand)?;
        let tag = if h1.converged {
            notes.push(format!(
                "lim F·Ḡ = 0 and ∫ Ḡ|dF/dG| dG = {:.6e} < ∞: integrable variation",
                h1.value
            ));
            MartingaleType::Type4
        } else {
            notes.push(
                "lim F·Ḡ = 0 and ∫ Ḡ|dF/dG| dG = ∞: uniformly integrable, \
                 supremum not integrable"
                    .into(),
            );
            MartingaleType::Type3
        };
        return Ok(Classification {
            tag,
            case,
            h_abs_integral: Some(h_abs),
            noise_abs_integral: Some(j_abs),
            lim_f_gbar: Some(lim),
            h1_integral: Some(h1),
            mass_at_infinity: 0.0,
            notes,
        });
    }

    if lim.abs() >= 10.0 * tol && lim.abs() >= 4.0 * uncertainty {
        let tag = if lim > 0.0 {
            notes.push(format!("lim F·Ḡ = {lim:.6e} > 0: closed supermartingale"));
            MartingaleType::Type2a
        } else {
            notes.push(format!("lim F·Ḡ = {lim:.6e} < 0: closed submartingale"));
            MartingaleType::Type2b
        };
        return Ok(Classification {
            tag,
            case,
            h_abs_integral: Some(h_abs),
            noise_abs_integral: Some(j_abs),
            lim_f_gbar: Some(lim),
            h1_integral: None,
            mass_at_infinity: 0.0,
            notes,
        });
    }

    Err(Error::IndeterminateLimit {
        value: lim,
        low: tol,
        high: 10.0 * tol,
    })
}

fn verdict_word(converged: bool) -> &'static str {
    if converged {
        "finite"
    } else {
        "divergent"
    }
}

/// σ-martingale status of the orthogonal noise attached to a valid pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaStatus {
    /// `∫_{(0,t]} J dG < ∞` on every compact of the time set.
    LocalMartingale,
    /// `J < ∞` dG-a.e. but not locally dG-integrable.
    StrictlySigma,
    /// `J = ∞` on a set of positive dG-mass: no σ-martingale representation.
    NotSigma,
}

impl std::fmt::Display for SigmaStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SigmaStatus::LocalMartingale => "LocalMartingale",
            SigmaStatus::StrictlySigma => "StrictlySigma",
            SigmaStatus::NotSigma => "NotSigma",
        };
        f.write_str(s)
    }
}

/// Decides whether the process is a local martingale, a σ-martingale that is
/// not local, or not a σ-martingale at all.
pub fn sigma_status(
    cm: &ConditionMPair,
    noise: &NoiseSpec,
    opts: &NumericOptions,
) -> Result<SigmaStatus> {
    if noise.is_zero() {
        return Ok(SigmaStatus::LocalMartingale);
    }
    let d = cm.distribution();
    let j = noise.conditional_abs_mean();

    // J must be finite at every atom and across the density support;
    // an infinite value on positive mass defeats the representation.
    for atom in d.atoms() {
        if atom.at > 0.0 && !j.eval(atom.at).is_finite() {
            return Ok(SigmaStatus::NotSigma);
        }
    }
    for t in d.support_grid(opts.grid_size, opts.survival_floor) {
        if d.atom_mass_at(t) == 0.0 && !j.eval(t).is_finite() {
            return Ok(SigmaStatus::NotSigma);
        }
    }

    match CumulativeIntegral::new(j.clone(), d.clone(), opts) {
        Ok(_) => {
            if cm.case().tag == CaseTag::B {
                let endpoint = j.eval(cm.case().t_g);
                if !endpoint.is_finite() {
                    return Ok(SigmaStatus::NotSigma);
                }
            }
            Ok(SigmaStatus::LocalMartingale)
        }
        Err(Error::NotLocallyIntegrable { .. }) => Ok(SigmaStatus::StrictlySigma),
        Err(e) => Err(e),
    }
}
