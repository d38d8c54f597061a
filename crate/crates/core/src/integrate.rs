//! Lebesgue–Stieltjes integration `∫_{(a,b]} h dG` against mixed measures,
//! improper integration up to the open endpoint of the support with
//! divergence detection, and an exact oracle for purely atomic laws.
//!
//! Atoms contribute `h(t_i) · p_i` exactly; density pieces are handled by
//! adaptive Gauss–Kronrod quadrature (15-point rule, bisection driven by the
//! embedded error estimate). The interval convention is half-open `(a, b]`
//! throughout: the atom at `b` is included, the atom at `a` excluded.

use crate::error::{Error, Result};
use crate::func::{RealFunction, TailVerdict};
use crate::measure::{CaseTag, Distribution};
use crate::options::NumericOptions;

/// Value of an integral together with a convergence verdict.
///
/// `converged == false` is a legitimate answer consumed by the classifier; the
/// reported value is then the last finite truncation and must not be used in
/// downstream equality checks.
#[derive(Debug, Clone, Copy)]
pub struct IntegralResult {
    pub value: f64,
    pub converged: bool,
    pub error_estimate: f64,
}

/// Relative error below which an unconverged quadrature is accepted as
/// precision-limited rather than divergent: the Gauss–Kronrod estimator
/// bottoms out near 1e-8·|value| for very steep integrands, a floor set by
/// rounding noise, not by missing mass.
const PRECISION_LIMIT_REL: f64 = 1e-6;

/// Absolute error floor for the same acceptance: integrands assembled from
/// nested quadratures carry evaluation jitter around 1e-12 per point, which
/// the error estimator faithfully reports but no subdivision can remove.
const PRECISION_LIMIT_ABS: f64 = 1e-8;

/// Cells or truncation slabs carrying at most this much dG-mass are taken at
/// face value even when their quadrature is noisy: solver-built densities are
/// defined through global integrals and turn into pure cancellation noise in
/// the far tail, where the mass they weight is negligible. Integrability
/// verdicts near the endpoint rest on the truncation increments, not on
/// individual deep cells.
const DEEP_CELL_MASS: f64 = 1e-5;

impl IntegralResult {
    fn exact(value: f64) -> Self {
        IntegralResult {
            value,
            converged: true,
            error_estimate: 0.0,
        }
    }

    /// Converged, or unconverged with an error estimate so small (relative to
    /// the value, or absolutely) that only estimator noise is left.
    pub fn effectively_converged(&self) -> bool {
        self.converged
            || self.error_estimate <= (PRECISION_LIMIT_REL * self.value.abs()).max(PRECISION_LIMIT_ABS)
    }

    /// Extracts the value, failing when the integral did not converge.
    pub fn require_converged(&self) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::DivergentIntegral {
                value: self.value,
                error_estimate: self.error_estimate,
            })
        }
    }
}

// 15-point Gauss–Kronrod abscissae and weights (7-point Gauss embedded).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One Gauss–Kronrod 15 evaluation over `[a, b]`.
/// Returns `(value, error, first_bad_node)`; the flag in the bad-node pair
/// distinguishes NaN (undefined) from overflow to ±∞ (singular).
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64, Option<(f64, bool)>) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut bad = None;
    let mut check = |x: f64, v: f64| {
        if !v.is_finite() && bad.is_none() {
            bad = Some((x, v.is_nan()));
        }
        v
    };

    let f_center = check(center, f(center));
    let mut res_gauss = 0.0;
    let mut res_kronrod = f_center * WGK[7];
    let mut res_abs = res_kronrod.abs();
    let mut fv = [[0.0f64; 2]; 7];

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = check(center - x, f(center - x));
        let f2 = check(center + x, f(center + x));
        fv[j] = [f1, f2];
        let fsum = f1 + f2;
        if j % 2 != 0 {
            res_gauss += WG[j / 2] * fsum;
        }
        res_kronrod += WGK[j] * fsum;
        res_abs += WGK[j] * (f1.abs() + f2.abs());
    }
    res_gauss += WG[3] * f_center;

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv[j][0] - mean).abs() + (fv[j][1] - mean).abs());
    }

    let err = rescale_error((res_kronrod - res_gauss) * half, res_abs * half.abs(), res_asc * half.abs());
    (res_kronrod * half, err, bad)
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Adaptive quadrature of `f` over a finite interval `[a, b]`.
///
/// Never evaluates `f` at `a` or `b`, so integrable endpoint singularities
/// are admissible. Segments whose error estimate reaches the rounding floor
/// of the Gauss–Kronrod estimator are retired rather than split forever, so
/// `converged == false` with a small relative error means precision-limited,
/// while a large relative error means a divergent (or hopelessly rough)
/// integrand; see [`IntegralResult::effectively_converged`].
pub(crate) fn adaptive_quadrature(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<IntegralResult> {
    if !(b > a) {
        return Ok(IntegralResult::exact(0.0));
    }
    // Settled segments: error at the estimator's rounding floor.
    let settle = |v: f64, e: f64| e <= 1e-14 * v.abs();

    let mut active: std::collections::BinaryHeap<Segment> = std::collections::BinaryHeap::new();
    let (mut done_value, mut done_err) = (0.0f64, 0.0f64);
    let (mut act_value, mut act_err) = (0.0f64, 0.0f64);

    let push = |seg: Segment,
                    active: &mut std::collections::BinaryHeap<Segment>,
                    done_value: &mut f64,
                    done_err: &mut f64,
                    act_value: &mut f64,
                    act_err: &mut f64| {
        if settle(seg.value, seg.err) {
            *done_value += seg.value;
            *done_err += seg.err;
        } else {
            *act_value += seg.value;
            *act_err += seg.err;
            active.push(seg);
        }
    };

    let (value, err, bad) = gk15(f, a, b);
    match bad {
        Some((at, true)) => {
            return Err(Error::NonEvaluable {
                at,
                reason: "integrand is NaN inside the interval".into(),
            });
        }
        Some((_, false)) => done_err = f64::INFINITY,
        None if !value.is_finite() => done_err = f64::INFINITY,
        None => push(
            Segment { a, b, value, err },
            &mut active,
            &mut done_value,
            &mut done_err,
            &mut act_value,
            &mut act_err,
        ),
    }

    let mut splits = 0;
    let mut best_err = f64::INFINITY;
    let mut stagnant = 0usize;
    loop {
        let total_value = done_value + act_value;
        let total_err = done_err + act_err;
        let tol = abs_tol.max(rel_tol * total_value.abs());
        if total_err <= tol {
            return Ok(IntegralResult {
                value: total_value,
                converged: true,
                error_estimate: total_err,
            });
        }
        // Noise-limited exits: the estimate sits deep inside the
        // precision-acceptance band and refinement has stopped paying, or no
        // meaningful progress has been made for a long stretch.
        if total_err < 0.5 * best_err {
            best_err = total_err;
            stagnant = 0;
        } else {
            stagnant += 1;
        }
        let in_noise_band = total_err <= 0.1 * PRECISION_LIMIT_REL * total_value.abs();
        if (in_noise_band && stagnant >= 20) || stagnant > 200 {
            return Ok(IntegralResult {
                value: total_value,
                converged: false,
                error_estimate: total_err,
            });
        }
        if splits >= max_subdivisions || active.is_empty() {
            return Ok(IntegralResult {
                value: total_value,
                converged: false,
                error_estimate: total_err,
            });
        }

        // Bisect the segment with the largest error estimate.
        let seg = active.pop().unwrap();
        act_value -= seg.value;
        act_err -= seg.err;
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // Width at the resolution limit; nothing more to gain.
            done_value += seg.value;
            done_err += seg.err;
            continue;
        }
        splits += 1;
        for (lo, hi) in [(seg.a, mid), (mid, seg.b)] {
            let (v, e, bad) = gk15(f, lo, hi);
            if bad.is_some() || !v.is_finite() {
                // Overflow at a node while refining: evidence of a
                // non-integrable singularity, recorded as irreducible error
                // so the call reports divergence instead of failing.
                done_err = f64::INFINITY;
            } else {
                push(
                    Segment { a: lo, b: hi, value: v, err: e },
                    &mut active,
                    &mut done_value,
                    &mut done_err,
                    &mut act_value,
                    &mut act_err,
                );
            }
        }
    }
}

/// `∫_{(a,b]} h dG`: atoms in `(a, b]` weighted exactly, density parts by
/// adaptive quadrature. `b` must be finite; use [`improper_integral`] to
/// approach an unbounded or open endpoint.
pub fn stieltjes_integral(
    h: &RealFunction,
    d: &Distribution,
    a: f64,
    b: f64,
    opts: &NumericOptions,
) -> Result<IntegralResult> {
    stieltjes_inner(h, d, a, b, true, opts)
}

/// Same as [`stieltjes_integral`] but with the atom at `b` excluded, i.e.
/// the integral over the open-ended `(a, b)`.
pub fn stieltjes_open(
    h: &RealFunction,
    d: &Distribution,
    a: f64,
    b: f64,
    opts: &NumericOptions,
) -> Result<IntegralResult> {
    stieltjes_inner(h, d, a, b, false, opts)
}

fn stieltjes_inner(
    h: &RealFunction,
    d: &Distribution,
    a: f64,
    b: f64,
    include_b_atom: bool,
    opts: &NumericOptions,
) -> Result<IntegralResult> {
    if !b.is_finite() || !a.is_finite() {
        return Err(Error::Precondition(
            "stieltjes_integral needs finite bounds; use improper_integral for open endpoints".into(),
        ));
    }
    if b <= a {
        return Ok(IntegralResult::exact(0.0));
    }

    let mut value = 0.0;
    let mut err = 0.0;
    let mut converged = true;

    for atom in d.atoms() {
        let inside = atom.at > a && (atom.at < b || (atom.at == b && include_b_atom));
        if inside {
            value += h.eval_checked(atom.at)? * atom.mass;
        }
    }

    for piece in d.pieces() {
        let lo = piece.from.max(a);
        let hi = piece.to.min(b);
        if hi <= lo {
            continue;
        }
        let f = |s: f64| h.eval(s) * piece.density(s);
        let r = adaptive_quadrature(
            &f,
            lo,
            hi,
            opts.quad_abs_tol,
            opts.quad_rel_tol,
            opts.max_subdivisions,
        )?;
        value += r.value;
        err += r.error_estimate;
        converged &= r.converged;
    }

    Ok(IntegralResult {
        value,
        converged,
        error_estimate: err,
    })
}

/// Exact finite sum `Σ h(t_i) p_i` over atoms in `(a, b]`; no quadrature.
///
/// The independent oracle for tests and for Case B exact arithmetic.
pub fn atomic_oracle(h: &RealFunction, d: &Distribution, a: f64, b: f64) -> Result<f64> {
    if !d.is_atomic() {
        return Err(Error::NotAtomic);
    }
    let mut value = 0.0;
    for atom in d.atoms() {
        if atom.at > a && atom.at <= b {
            value += h.eval_checked(atom.at)? * atom.mass;
        }
    }
    Ok(value)
}

/// `∫_{(0, t_G)} h dG` as a limit of truncations `(0, t_k]` with the mass
/// remaining below `t_G` halving at each step.
///
/// Convergence requires every truncation's quadrature to converge and the
/// increment sequence to pass a Cauchy criterion; a declared tail verdict on
/// `h` overrides the probe. The Case B endpoint atom is never included.
pub fn improper_integral(
    h: &RealFunction,
    d: &Distribution,
    opts: &NumericOptions,
) -> Result<IntegralResult> {
    let ec = d.endpoint_case();
    let endpoint_atom = if ec.tag == CaseTag::B {
        d.atom_mass_at(ec.t_g)
    } else {
        0.0
    };
    // Mass carried strictly inside (0, t_G).
    let open_mass = 1.0 - d.mass_at_infinity() - endpoint_atom - d.cdf(0.0);
    if open_mass <= 0.0 {
        return Ok(IntegralResult::exact(0.0));
    }

    let declared = h.declared_tail();
    let steps = match declared {
        Some(TailVerdict::Divergent) => 3.min(opts.tail_steps),
        _ => opts.tail_steps,
    };

    let mut value = 0.0;
    let mut quad_err = 0.0;
    let mut prev_t = 0.0;
    let mut increments: Vec<f64> = Vec::with_capacity(steps);
    let mut all_converged = true;

    for k in 0..steps {
        let remaining = endpoint_atom + open_mass * 0.5f64.powi(k as i32 + 1);
        let t_k = d.truncation_point(remaining);
        if t_k > prev_t {
            let r = stieltjes_inner(h, d, prev_t, t_k, true, opts)?;
            value += r.value;
            quad_err += r.error_estimate;
            let slab_mass = d.cdf(t_k) - d.cdf(prev_t);
            all_converged &= r.effectively_converged() || slab_mass <= DEEP_CELL_MASS;
            increments.push(r.value);
            prev_t = t_k;
        } else {
            increments.push(0.0);
        }

        if !all_converged {
            break;
        }
        // Cauchy criterion on two consecutive increments; the remaining tail
        // is corrected by geometric extrapolation of the increments.
        if k >= 1 {
            let tol = opts.quad_abs_tol.max(opts.quad_rel_tol * value.abs());
            let last_two = increments[k].abs() + increments[k - 1].abs();
            if last_two <= tol && declared != Some(TailVerdict::Divergent) {
                let tail = geometric_tail(&increments).unwrap_or(0.0);
                return Ok(IntegralResult {
                    value: value + tail,
                    converged: true,
                    error_estimate: quad_err + last_two,
                });
            }
        }
    }

    match declared {
        // The declaration covers the endpoint tail only; a truncation whose
        // own quadrature diverged is an inner singularity and wins.
        Some(TailVerdict::Convergent) if all_converged => {
            let tail = geometric_tail(&increments).unwrap_or(0.0);
            Ok(IntegralResult {
                value: value + tail,
                converged: true,
                error_estimate: quad_err + tail.abs(),
            })
        }
        Some(TailVerdict::Convergent) => Ok(IntegralResult {
            value,
            converged: false,
            error_estimate: f64::INFINITY,
        }),
        Some(TailVerdict::Divergent) => Ok(IntegralResult {
            value,
            converged: false,
            error_estimate: f64::INFINITY,
        }),
        None => {
            if !all_converged {
                // A truncation itself diverged: inner singularity.
                return Ok(IntegralResult {
                    value,
                    converged: false,
                    error_estimate: f64::INFINITY,
                });
            }
            // Budget exhausted. Decreasing increments admit a geometric tail
            // estimate; non-decreasing increments mean divergence.
            match geometric_tail(&increments) {
                Some(tail) => Ok(IntegralResult {
                    value: value + tail,
                    converged: true,
                    error_estimate: quad_err + tail.abs(),
                }),
                None => Ok(IntegralResult {
                    value,
                    converged: false,
                    error_estimate: quad_err
                        + increments.last().copied().unwrap_or(0.0).abs(),
                }),
            }
        }
    }
}

/// Geometric extrapolation of the truncation tail from the last increments.
///
/// Returns `None` when the increments do not decrease (the divergence
/// signature under mass-halving truncation) or decrease too slowly to trust.
fn geometric_tail(increments: &[f64]) -> Option<f64> {
    let n = increments.len();
    if n < 4 {
        return Some(0.0);
    }
    let last = &increments[n - 3..];
    if last.iter().any(|d| !d.is_finite()) {
        return None;
    }
    let mut ratio: f64 = 0.0;
    for w in last.windows(2) {
        let (prev, next) = (w[0].abs(), w[1].abs());
        if next <= f64::MIN_POSITIVE {
            return Some(0.0);
        }
        if next >= prev {
            return None;
        }
        ratio = ratio.max(next / prev);
    }
    if ratio > 0.95 {
        // Too close to harmonic-type behaviour to call numerically.
        return None;
    }
    let delta = increments[n - 1];
    Some(delta * ratio / (1.0 - ratio))
}

/// Precomputed cumulative integral `t ↦ ∫_{(0, t]} h dG`.
///
/// Construction integrates cell by cell over a support-adapted cut list
/// (atoms, piece boundaries, quantile points, tail-halving points); a cell
/// whose quadrature fails to converge means `h ∉ L¹_loc(dG)` and construction
/// reports where. Point queries then cost one short quadrature from the
/// nearest cut.
#[derive(Debug, Clone)]
pub struct CumulativeIntegral {
    h: RealFunction,
    d: Distribution,
    cuts: Vec<f64>,
    cum: Vec<f64>,
    opts: NumericOptions,
}

impl CumulativeIntegral {
    pub fn new(h: RealFunction, d: Distribution, opts: &NumericOptions) -> Result<Self> {
        // Tighter per-cell tolerances: cell errors accumulate along the cuts.
        let mut cell_opts = opts.clone();
        cell_opts.quad_abs_tol = opts.quad_abs_tol * 1e-2;
        cell_opts.quad_rel_tol = opts.quad_rel_tol * 1e-1;

        let ec = d.endpoint_case();
        let endpoint_atom = if ec.tag == CaseTag::B {
            d.atom_mass_at(ec.t_g)
        } else {
            0.0
        };
        let open_mass = 1.0 - d.mass_at_infinity() - endpoint_atom - d.cdf(0.0);

        let mut cuts: Vec<f64> = vec![0.0];
        cuts.extend(d.atoms().iter().map(|a| a.at).filter(|&t| t > 0.0 && t.is_finite()));
        for p in d.pieces() {
            cuts.push(p.from);
            if p.to.is_finite() {
                cuts.push(p.to);
            }
        }
        for j in 1..opts.grid_size {
            let m = d.continuous_mass() * j as f64 / opts.grid_size as f64;
            let t = d.continuous_quantile(m);
            if t.is_finite() {
                cuts.push(t);
            }
        }
        if open_mass > 0.0 {
            for k in 0..opts.tail_steps {
                let remaining = endpoint_atom + open_mass * 0.5f64.powi(k as i32 + 1);
                let t = d.truncation_point(remaining);
                if t.is_finite() {
                    cuts.push(t);
                }
            }
        }
        cuts.retain(|t| *t >= 0.0 && t.is_finite());
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        // Stay strictly below a finite endpoint: local integrability is about
        // compacts of [0, t_G), and in Case B the endpoint atom must never
        // enter a cell.
        if ec.t_g.is_finite() {
            cuts.retain(|&t| t < ec.t_g);
        }

        let mut cum = Vec::with_capacity(cuts.len());
        cum.push(0.0);
        let mut acc = 0.0;
        for w in 0..cuts.len() - 1 {
            let (a, b) = (cuts[w], cuts[w + 1]);
            let r = stieltjes_inner(&h, &d, a, b, true, &cell_opts)?;
            let cell_mass = d.cdf(b) - d.cdf(a);
            if !r.effectively_converged() && cell_mass > DEEP_CELL_MASS {
                return Err(Error::NotLocallyIntegrable { at: b });
            }
            acc += r.value;
            cum.push(acc);
        }

        Ok(CumulativeIntegral {
            h,
            d,
            cuts,
            cum,
            opts: cell_opts,
        })
    }

    /// `∫_{(0, t]} h dG`; non-finite evaluation problems surface as NaN.
    pub fn eval(&self, t: f64) -> f64 {
        self.eval_inner(t, true)
    }

    /// `∫_{(0, t)} h dG`: the atom at `t` (if any) is excluded, so stored
    /// conventions for `h` at the endpoint cannot leak into the value.
    pub fn eval_open(&self, t: f64) -> f64 {
        self.eval_inner(t, false)
    }

    fn eval_inner(&self, t: f64, include_t_atom: bool) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        // Open evaluation must restart from a cut strictly below `t`: the cut
        // at `t` itself would already contain the excluded atom.
        let i = if include_t_atom {
            self.cuts.partition_point(|&c| c <= t) - 1
        } else {
            self.cuts.partition_point(|&c| c < t) - 1
        };
        let base = self.cum[i];
        if self.cuts[i] == t && include_t_atom {
            return base;
        }
        match stieltjes_inner(&self.h, &self.d, self.cuts[i], t, include_t_atom, &self.opts) {
            Ok(r) => base + r.value,
            Err(_) => f64::NAN,
        }
    }

    /// Largest precomputed cut (the tail-marching depth).
    pub fn last_cut(&self) -> f64 {
        *self.cuts.last().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::RealFunction as F;

    fn opts() -> NumericOptions {
        NumericOptions::default()
    }

    #[test]
    fn interval_mass() {
        let d = Distribution::uniform(0.0, 1.0);
        let r = stieltjes_integral(&F::constant(1.0), &d, 0.0, 0.5, &opts()).unwrap();
        assert!(r.converged);
        assert!((r.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn signed_integrand_cancels() {
        // ∫_0^1 (2s - 1) ds = 0 by hand.
        let d = Distribution::uniform(0.0, 1.0);
        let r = stieltjes_integral(&F::affine(2.0, -1.0), &d, 0.0, 1.0, &opts()).unwrap();
        assert!(r.converged);
        assert!(r.value.abs() < 1e-12);
    }

    #[test]
    fn atoms_sum_exactly() {
        let d = Distribution::from_atoms(&[(1.0, 0.5), (2.0, 0.5)]).unwrap();
        let r = stieltjes_integral(&F::affine(1.0, 0.0), &d, 0.0, 2.0, &opts()).unwrap();
        assert_eq!(r.value, 1.5);
        assert_eq!(r.error_estimate, 0.0);
    }

    #[test]
    fn open_variant_drops_right_atom() {
        let d = Distribution::from_atoms(&[(1.0, 0.5), (2.0, 0.5)]).unwrap();
        let r = stieltjes_open(&F::constant(1.0), &d, 0.0, 2.0, &opts()).unwrap();
        assert_eq!(r.value, 0.5);
    }

    #[test]
    fn atomic_oracle_examples() {
        let d = Distribution::from_atoms(&[(1.0, 0.5), (2.0, 0.5)]).unwrap();
        let sq = F::product(F::affine(1.0, 0.0), F::affine(1.0, 0.0));
        assert_eq!(atomic_oracle(&sq, &d, 0.0, 2.0).unwrap(), 2.5);

        let single = Distribution::from_atoms(&[(0.5, 1.0)]).unwrap();
        assert_eq!(atomic_oracle(&F::constant(1.0), &single, 0.0, 1.0).unwrap(), 1.0);

        // 0.5·4 + 0.5·2 = 3 by hand.
        let quarters = Distribution::from_atoms(&[(0.25, 0.5), (0.5, 0.5)]).unwrap();
        assert_eq!(atomic_oracle(&F::power(-1.0), &quarters, 0.0, 1.0).unwrap(), 3.0);

        assert!(matches!(
            atomic_oracle(&F::constant(1.0), &Distribution::uniform(0.0, 1.0), 0.0, 1.0),
            Err(Error::NotAtomic)
        ));
    }

    #[test]
    fn improper_gamma_half() {
        // ∫_0^∞ s^{-1/2} e^{-s} ds = Γ(1/2) = √π.
        let d = Distribution::exponential(1.0);
        let r = improper_integral(&F::power(-0.5), &d, &opts()).unwrap();
        assert!(r.converged);
        assert!((r.value - std::f64::consts::PI.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn improper_detects_divergence_at_zero() {
        let d = Distribution::exponential(1.0);
        let r = improper_integral(&F::power(-1.0), &d, &opts()).unwrap();
        assert!(!r.converged);
    }

    #[test]
    fn improper_zero_integrand() {
        for d in [Distribution::exponential(1.0), Distribution::uniform(0.0, 1.0)] {
            let r = improper_integral(&F::constant(0.0), &d, &opts()).unwrap();
            assert!(r.converged);
            assert_eq!(r.value, 0.0);
        }
    }

    #[test]
    fn improper_case_b_excludes_endpoint_atom() {
        let d = Distribution::from_atoms(&[(1.0, 0.5), (2.0, 0.5)]).unwrap();
        let r = improper_integral(&F::constant(1.0), &d, &opts()).unwrap();
        assert!(r.converged);
        assert_eq!(r.value, 0.5);
    }

    #[test]
    fn declared_verdicts_override_probing() {
        let d = Distribution::uniform(0.0, 1.0);
        // (1-s)^{-1} against uniform diverges at 1; declare it and force the verdict.
        let div = F::one_minus_pow(-1.0).with_declared_tail(TailVerdict::Divergent);
        let r = improper_integral(&div, &d, &opts()).unwrap();
        assert!(!r.converged);

        let conv = F::one_minus_pow(-0.5).with_declared_tail(TailVerdict::Convergent);
        let r = improper_integral(&conv, &d, &opts()).unwrap();
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-6);
    }

    #[test]
    fn divergent_truncations_grow_without_bound() {
        // Successive truncations toward 0 of ∫ s^{-1} e^{-s} ds must strictly
        // increase beyond any fixed bound: check 10 refinements.
        let d = Distribution::exponential(1.0);
        let h = F::power(-1.0);
        let mut prev = 0.0;
        let mut values = Vec::new();
        for k in 1..=10 {
            let a = 0.5f64.powi(k);
            let r = stieltjes_integral(&h, &d, a, 1.0, &opts()).unwrap();
            values.push(r.value);
            assert!(r.value > prev);
            prev = r.value;
        }
        // ln 2 per halving, no flattening.
        let last_step = values[9] - values[8];
        assert!(last_step > 0.5);
    }

    #[test]
    fn additivity_within_error() {
        let d = Distribution::exponential(1.0);
        let h = F::poly(vec![0.3, -1.0, 0.5]);
        let whole = stieltjes_integral(&h, &d, 0.1, 2.3, &opts()).unwrap();
        let left = stieltjes_integral(&h, &d, 0.1, 0.9, &opts()).unwrap();
        let right = stieltjes_integral(&h, &d, 0.9, 2.3, &opts()).unwrap();
        let gap = (whole.value - left.value - right.value).abs();
        assert!(gap <= 2.0 * (whole.error_estimate + left.error_estimate + right.error_estimate) + 1e-12);
    }

    #[test]
    fn cumulative_matches_direct() {
        let d = Distribution::exponential(1.0);
        let h = F::affine(1.0, 0.0);
        let cum = CumulativeIntegral::new(h.clone(), d.clone(), &opts()).unwrap();
        for t in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
            let direct = stieltjes_integral(&h, &d, 0.0, t, &opts()).unwrap().value;
            assert!((cum.eval(t) - direct).abs() < 1e-9, "t = {t}");
        }
        assert_eq!(cum.eval(0.0), 0.0);
    }

    #[test]
    fn cumulative_rejects_non_integrable() {
        let d = Distribution::exponential(1.0);
        let err = CumulativeIntegral::new(F::power(-1.0), d, &opts());
        assert!(matches!(err, Err(Error::NotLocallyIntegrable { .. })));
    }

    #[test]
    fn cumulative_open_excludes_atom() {
        let d = Distribution::from_atoms(&[(1.0, 0.5), (2.0, 0.5)]).unwrap();
        let cum = CumulativeIntegral::new(F::constant(1.0), d, &opts()).unwrap();
        assert_eq!(cum.eval(1.0), 0.5);
        assert_eq!(cum.eval_open(1.0), 0.0);
        assert_eq!(cum.eval_open(1.5), 0.5);
    }

    #[test]
    fn non_evaluable_atom_reports() {
        let d = Distribution::from_atoms(&[(1.0, 1.0)]).unwrap();
        let h = F::dynamic(|s| if s == 1.0 { f64::NAN } else { s });
        assert!(matches!(
            stieltjes_integral(&h, &d, 0.0, 2.0, &opts()),
            Err(Error::NonEvaluable { .. })
        ));
    }
}
