//! Reproducible Monte Carlo over the jump representation
//! `M_t = F(t)·1{t<γ} + (H(γ)+L')·1{t≥γ}`.
//!
//! Paths are exact: between grid points the process is the deterministic
//! curve `F`, so there is no discretization error — only sampling error.
//! Randomness is counter-based: each path derives its own generator from
//! `(seed, path index)`, so results are bit-identical for any number of
//! workers and any partition of paths. Aggregation folds fixed-size blocks
//! in index order.

use crate::error::{Error, Result};
use crate::options::NumericOptions;
use crate::solver::{ConditionMPair, MartingaleType, NoiseSpec};

const BLOCK: usize = 1024;

/// SplitMix64 step; the standard 64-bit finalizer.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-path generator keyed by `(seed, path index)`; scheduling-independent.
#[derive(Debug, Clone)]
pub struct PathRng {
    state: u64,
}

impl PathRng {
    pub fn new(seed: u64, path: u64) -> Self {
        let mut state = seed ^ path.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x243F_6A88_85A3_08D3);
        // Two warm-up scrambles decorrelate nearby path indices.
        splitmix64(&mut state);
        splitmix64(&mut state);
        PathRng { state }
    }

    pub fn next_u64(&mut self) -> u64 {
        splitmix64(&mut self.state)
    }

    /// Uniform variate in the open interval (0, 1).
    pub fn next_f64_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }
}

/// One simulated path, evaluated on the requested grid.
#[derive(Debug, Clone)]
pub struct PathSample {
    /// Sampled jump time; may be `+∞`.
    pub gamma: f64,
    /// Post-jump level `L = H(γ) + L'`; NaN when the path never jumps.
    pub level: f64,
    /// `(grid time, M value)` pairs.
    pub values: Vec<(f64, f64)>,
    /// Running supremum of `M` over the whole path (grid, pre-jump curve,
    /// left limit at the jump, and the post-jump level).
    pub sup: f64,
    /// Same for `|M|`.
    pub sup_abs: f64,
    /// Total variation of the path over `[0, ∞)`.
    pub variation: f64,
}

/// Draws a single path given the uniform variates.
pub fn sample_path(
    cm: &ConditionMPair,
    noise: &NoiseSpec,
    grid: &[f64],
    u_gamma: f64,
    u_noise: f64,
) -> Result<PathSample> {
    let d = cm.distribution();
    let gamma = d.sample(u_gamma);
    let f0 = cm.pair.f0();

    let (level, f_left_gamma) = if gamma.is_finite() {
        let h_gamma = cm.h.eval(gamma);
        if !h_gamma.is_finite() {
            return Err(Error::NonFiniteValue {
                what: "H".into(),
                at: gamma,
            });
        }
        let lp = noise.sample(gamma, u_noise);
        if !lp.is_finite() {
            return Err(Error::NonFiniteValue {
                what: "noise".into(),
                at: gamma,
            });
        }
        (h_gamma + lp, cm.pair.f_left(gamma))
    } else {
        (f64::NAN, f64::NAN)
    };

    let mut values = Vec::with_capacity(grid.len());
    let mut sup;
    let mut sup_abs;
    if gamma > 0.0 {
        sup = f0;
        sup_abs = f0.abs();
    } else {
        sup = level;
        sup_abs = level.abs();
    }
    for &t in grid {
        let m = if t < gamma {
            let v = cm.pair.f(t);
            if !v.is_finite() {
                return Err(Error::NonFiniteValue {
                    what: "F".into(),
                    at: t,
                });
            }
            v
        } else {
            level
        };
        values.push((t, m));
        sup = sup.max(m);
        sup_abs = sup_abs.max(m.abs());
    }
    if gamma.is_finite() && gamma > 0.0 {
        sup = sup.max(f_left_gamma).max(level);
        sup_abs = sup_abs.max(f_left_gamma.abs()).max(level.abs());
    }

    // Total variation along the path: initial value, the accumulated
    // variation of F before the jump, and the jump itself.
    let variation = if gamma == 0.0 {
        level.abs()
    } else if gamma.is_finite() {
        f0.abs() + cm.pair.variation_before(gamma) + (level - f_left_gamma).abs()
    } else {
        f0.abs() + cm.pair.variation_before(f64::INFINITY)
    };

    Ok(PathSample {
        gamma,
        level,
        values,
        sup,
        sup_abs,
        variation,
    })
}

/// Aggregated Monte Carlo estimates.
#[derive(Debug, Clone)]
pub struct SimulationReport {
    pub n_paths: usize,
    pub seed: u64,
    pub grid: Vec<f64>,
    /// Per-grid-time empirical mean of `M_t`.
    pub mean: Vec<f64>,
    /// Per-grid-time standard error.
    pub se: Vec<f64>,
    /// Analytic `E M_0 = F(0)Ḡ(0) + H(0)G(0)`, the mean-invariance target.
    pub target_mean: f64,
    pub e_sup: f64,
    pub se_sup: f64,
    pub e_sup_abs: f64,
    pub se_sup_abs: f64,
    pub e_variation: f64,
    pub se_variation: f64,
    /// Empirical terminal mean, when the limit exists on never-jump paths.
    pub e_m_inf: Option<f64>,
    pub se_m_inf: Option<f64>,
    /// First-half statistics, for growth diagnostics under sample doubling.
    pub half_e_sup_abs: f64,
    pub half_e_variation: f64,
    pub half_e_abs_m_inf: f64,
    pub e_abs_m_inf: f64,
}

#[derive(Clone)]
struct BlockStats {
    n: usize,
    sum: Vec<f64>,
    sumsq: Vec<f64>,
    sup: f64,
    supsq: f64,
    sup_abs: f64,
    sup_abssq: f64,
    var: f64,
    varsq: f64,
    m_inf: f64,
    m_infsq: f64,
    abs_m_inf: f64,
    m_inf_defined: bool,
    half_n: usize,
    half_sup_abs: f64,
    half_var: f64,
    half_abs_m_inf: f64,
}

impl BlockStats {
    fn new(grid_len: usize) -> Self {
        BlockStats {
            n: 0,
            sum: vec![0.0; grid_len],
            sumsq: vec![0.0; grid_len],
            sup: 0.0,
            supsq: 0.0,
            sup_abs: 0.0,
            sup_abssq: 0.0,
            var: 0.0,
            varsq: 0.0,
            m_inf: 0.0,
            m_infsq: 0.0,
            abs_m_inf: 0.0,
            m_inf_defined: true,
            half_n: 0,
            half_sup_abs: 0.0,
            half_var: 0.0,
            half_abs_m_inf: 0.0,
        }
    }

    fn merge(&mut self, other: &BlockStats) {
        self.n += other.n;
        for i in 0..self.sum.len() {
            self.sum[i] += other.sum[i];
            self.sumsq[i] += other.sumsq[i];
        }
        self.sup += other.sup;
        self.supsq += other.supsq;
        self.sup_abs += other.sup_abs;
        self.sup_abssq += other.sup_abssq;
        self.var += other.var;
        self.varsq += other.varsq;
        self.m_inf += other.m_inf;
        self.m_infsq += other.m_infsq;
        self.abs_m_inf += other.abs_m_inf;
        self.m_inf_defined &= other.m_inf_defined;
        self.half_n += other.half_n;
        self.half_sup_abs += other.half_sup_abs;
        self.half_var += other.half_var;
        self.half_abs_m_inf += other.half_abs_m_inf;
    }
}

fn run_block(
    cm: &ConditionMPair,
    noise: &NoiseSpec,
    grid: &[f64],
    seed: u64,
    range: std::ops::Range<usize>,
    half: usize,
    f_limit: Option<f64>,
) -> Result<BlockStats> {
    let mut stats = BlockStats::new(grid.len());
    for p in range {
        let mut rng = PathRng::new(seed, p as u64);
        let u_gamma = rng.next_f64_open();
        let u_noise = rng.next_f64_open();
        let path = sample_path(cm, noise, grid, u_gamma, u_noise)?;

        stats.n += 1;
        for (i, &(_, m)) in path.values.iter().enumerate() {
            stats.sum[i] += m;
            stats.sumsq[i] += m * m;
        }
        stats.sup += path.sup;
        stats.supsq += path.sup * path.sup;
        stats.sup_abs += path.sup_abs;
        stats.sup_abssq += path.sup_abs * path.sup_abs;
        stats.var += path.variation;
        stats.varsq += path.variation * path.variation;

        let terminal = if path.gamma.is_finite() {
            Some(path.level)
        } else {
            f_limit
        };
        match terminal {
            Some(v) => {
                stats.m_inf += v;
                stats.m_infsq += v * v;
                stats.abs_m_inf += v.abs();
            }
            None => stats.m_inf_defined = false,
        }

        if p < half {
            stats.half_n += 1;
            stats.half_sup_abs += path.sup_abs;
            stats.half_var += path.variation;
            if let Some(v) = terminal {
                stats.half_abs_m_inf += v.abs();
            }
        }
    }
    Ok(stats)
}

/// Runs `n_paths` exact paths on the grid and aggregates their statistics.
///
/// Deterministic given `(seed, config)`; grid points must carry survival at
/// least the configured floor.
pub fn simulate(
    cm: &ConditionMPair,
    noise: &NoiseSpec,
    grid: &[f64],
    n_paths: usize,
    seed: u64,
    opts: &NumericOptions,
) -> Result<SimulationReport> {
    if n_paths < 100 {
        return Err(Error::Precondition(format!(
            "n_paths = {n_paths} is below the minimum of 100"
        )));
    }
    if grid.is_empty() {
        return Err(Error::Precondition("simulation grid is empty".into()));
    }
    let d = cm.distribution();
    for &t in grid {
        if !(t >= 0.0) || d.survival(t) < opts.survival_floor {
            return Err(Error::Precondition(format!(
                "grid point {t} lies outside the admissible time set (survival below floor)"
            )));
        }
    }

    // Never-jump paths settle at lim F; only needed when P(γ=∞) > 0.
    let f_limit = if d.mass_at_infinity() > 0.0 {
        let lim = cm.pair.f_limit(opts)?;
        if lim.converged {
            Some(lim.value)
        } else {
            None
        }
    } else {
        None
    };

    let half = n_paths / 2;
    let n_blocks = n_paths.div_ceil(BLOCK);
    let ranges: Vec<std::ops::Range<usize>> = (0..n_blocks)
        .map(|b| b * BLOCK..((b + 1) * BLOCK).min(n_paths))
        .collect();

    #[cfg(feature = "parallel")]
    let blocks: Vec<Result<BlockStats>> = {
        use rayon::prelude::*;
        ranges
            .into_par_iter()
            .map(|r| run_block(cm, noise, grid, seed, r, half, f_limit))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let blocks: Vec<Result<BlockStats>> = ranges
        .into_iter()
        .map(|r| run_block(cm, noise, grid, seed, r, half, f_limit))
        .collect();

    let mut total = BlockStats::new(grid.len());
    for b in blocks {
        total.merge(&b?);
    }

    let n = total.n as f64;
    let mean_se = |sum: f64, sumsq: f64| -> (f64, f64) {
        let m = sum / n;
        let var = ((sumsq - sum * sum / n) / (n - 1.0)).max(0.0);
        (m, (var / n).sqrt())
    };

    let mut mean = Vec::with_capacity(grid.len());
    let mut se = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let (m, s) = mean_se(total.sum[i], total.sumsq[i]);
        mean.push(m);
        se.push(s);
    }
    let (e_sup, se_sup) = mean_se(total.sup, total.supsq);
    let (e_sup_abs, se_sup_abs) = mean_se(total.sup_abs, total.sup_abssq);
    let (e_variation, se_variation) = mean_se(total.var, total.varsq);
    let (e_m_inf, se_m_inf) = if total.m_inf_defined {
        let (m, s) = mean_se(total.m_inf, total.m_infsq);
        (Some(m), Some(s))
    } else {
        (None, None)
    };

    let g0 = d.cdf(0.0);
    let target_mean = cm.pair.f0() * d.survival(0.0) + if g0 > 0.0 { cm.h.eval(0.0) * g0 } else { 0.0 };

    Ok(SimulationReport {
        n_paths,
        seed,
        grid: grid.to_vec(),
        mean,
        se,
        target_mean,
        e_sup,
        se_sup,
        e_sup_abs,
        se_sup_abs,
        e_variation,
        se_variation,
        e_m_inf,
        se_m_inf,
        half_e_sup_abs: total.half_sup_abs / total.half_n as f64,
        half_e_variation: total.half_var / total.half_n as f64,
        half_e_abs_m_inf: total.half_abs_m_inf / total.half_n as f64,
        e_abs_m_inf: total.abs_m_inf / n,
    })
}

/// Confidence grade of an empirical diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Confidence {
    /// Backed by a standard-error band.
    Statistical,
    /// Growth-under-doubling style evidence; suggestive only. The analytic
    /// classifier remains authoritative.
    Heuristic,
}

/// Outcome of comparing a report against an expected classification.
#[derive(Debug, Clone)]
pub struct DiagnosticsVerdict {
    pub expected: MartingaleType,
    pub consistent: bool,
    pub confidence: Confidence,
    pub notes: Vec<String>,
}

/// Checks whether the empirical statistics are consistent with the expected
/// type: terminal-mean direction for 2a/2b, stability of the variation mean
/// under sample doubling for type 4, growth of the supremum mean for type 3,
/// growth of the absolute terminal mean for type 1.
pub fn empirical_type_diagnostics(
    report: &SimulationReport,
    expected: MartingaleType,
) -> DiagnosticsVerdict {
    let mut notes = Vec::new();
    let (consistent, confidence) = match expected {
        MartingaleType::Type2a | MartingaleType::Type2b => match (report.e_m_inf, report.se_m_inf) {
            (Some(m), Some(s)) => {
                let gap = report.target_mean - m;
                let want_positive = expected == MartingaleType::Type2a;
                notes.push(format!(
                    "E M_∞ = {m:.6} vs E M_0 = {:.6} (SE {s:.2e})",
                    report.target_mean
                ));
                let ok = if want_positive {
                    gap > 2.0 * s
                } else {
                    gap < -2.0 * s
                };
                (ok, Confidence::Statistical)
            }
            _ => {
                notes.push("terminal mean undefined on never-jump paths".into());
                (false, Confidence::Heuristic)
            }
        },
        MartingaleType::Type3 => {
            let mean_ok = match (report.e_m_inf, report.se_m_inf) {
                (Some(m), Some(s)) => (m - report.target_mean).abs() <= 4.0 * s,
                _ => false,
            };
            let growth = report.e_sup_abs - report.half_e_sup_abs;
            notes.push(format!(
                "E sup|M|: half {:.6}, full {:.6} (growth {growth:.3e})",
                report.half_e_sup_abs, report.e_sup_abs
            ));
            (mean_ok && growth > 0.0, Confidence::Heuristic)
        }
        MartingaleType::Type4 => {
            let finite = report.e_variation.is_finite();
            let drift = (report.e_variation - report.half_e_variation).abs();
            let stable = drift <= 2.0 * report.se_variation * 1.5;
            notes.push(format!(
                "E Var(M): half {:.6}, full {:.6} (SE {:.2e})",
                report.half_e_variation, report.e_variation, report.se_variation
            ));
            (finite && stable, Confidence::Heuristic)
        }
        MartingaleType::Type1 => {
            let growth = report.e_abs_m_inf - report.half_e_abs_m_inf;
            notes.push(format!(
                "E|M_∞|: half {:.6}, full {:.6}",
                report.half_e_abs_m_inf, report.e_abs_m_inf
            ));
            (report.e_m_inf.is_none() || growth > 0.0, Confidence::Heuristic)
        }
    };
    DiagnosticsVerdict {
        expected,
        consistent,
        confidence,
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::RealFunction as F;
    use crate::measure::Distribution;
    use crate::solver::{solve_f_from_h, DerivativePair};

    fn opts() -> NumericOptions {
        NumericOptions::default()
    }

    fn usualcond() -> ConditionMPair {
        solve_f_from_h(
            F::constant(0.0),
            Distribution::uniform(0.0, 1.0),
            Some(1.0),
            &opts(),
        )
        .unwrap()
    }

    #[test]
    fn rng_is_deterministic_and_open() {
        let mut a = PathRng::new(42, 7);
        let mut b = PathRng::new(42, 7);
        for _ in 0..100 {
            let (x, y) = (a.next_f64_open(), b.next_f64_open());
            assert_eq!(x, y);
            assert!(x > 0.0 && x < 1.0);
        }
        let mut c = PathRng::new(42, 8);
        assert_ne!(a.next_u64(), c.next_u64());
    }

    #[test]
    fn constant_pair_paths_are_constant() {
        let d = Distribution::exponential(1.0);
        let pair = DerivativePair::new(3.0, F::constant(0.0), d, &opts()).unwrap();
        let cm = ConditionMPair::new(pair, F::constant(3.0));
        let report = simulate(&cm, &NoiseSpec::Zero, &[0.5, 1.0, 2.0], 500, 1, &opts()).unwrap();
        for (m, s) in report.mean.iter().zip(&report.se) {
            assert_eq!(*m, 3.0);
            assert_eq!(*s, 0.0);
        }
        assert_eq!(report.e_m_inf, Some(3.0));
        assert_eq!(report.e_variation, 3.0);
    }

    #[test]
    fn paths_freeze_after_the_jump() {
        let cm = usualcond();
        let grid = [0.1, 0.3, 0.5, 0.7, 0.9];
        for p in 0..200u64 {
            let mut rng = PathRng::new(9, p);
            let u1 = rng.next_f64_open();
            let u2 = rng.next_f64_open();
            let path = sample_path(&cm, &NoiseSpec::Zero, &grid, u1, u2).unwrap();
            for &(t, m) in &path.values {
                if t >= path.gamma {
                    assert_eq!(m, path.level);
                } else {
                    assert!((m - cm.pair.f(t)).abs() <= 1e-12);
                    assert!(path.sup_abs >= m.abs());
                }
            }
        }
    }

    #[test]
    fn mean_invariance_usualcond() {
        let cm = usualcond();
        let report = simulate(&cm, &NoiseSpec::Zero, &[0.25, 0.5, 0.9], 20_000, 7, &opts()).unwrap();
        for (m, s) in report.mean.iter().zip(&report.se) {
            assert!((m - 1.0).abs() <= 4.0 * s, "mean {m} se {s}");
        }
        // H ≡ 0 makes every jumped path settle at 0 exactly.
        assert_eq!(report.e_m_inf, Some(0.0));
    }

    #[test]
    fn orthogonal_part_has_zero_means()  {
        let d = Distribution::exponential(1.0);
        let pair = DerivativePair::new(0.0, F::constant(0.0), d, &opts()).unwrap();
        let cm = ConditionMPair::new(pair, F::constant(0.0));
        let noise = NoiseSpec::two_point(F::constant(1.0));
        let report = simulate(&cm, &noise, &[0.5, 1.0, 2.0], 20_000, 3, &opts()).unwrap();
        for (m, s) in report.mean.iter().zip(&report.se) {
            assert!(m.abs() <= 4.0 * s.max(1e-12), "mean {m} se {s}");
        }
    }

    #[test]
    fn identical_seeds_reproduce_bitwise() {
        let cm = usualcond();
        let a = simulate(&cm, &NoiseSpec::Zero, &[0.25, 0.5], 5_000, 99, &opts()).unwrap();
        let b = simulate(&cm, &NoiseSpec::Zero, &[0.25, 0.5], 5_000, 99, &opts()).unwrap();
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.se, b.se);
        assert_eq!(a.e_sup_abs, b.e_sup_abs);
        assert_eq!(a.e_variation, b.e_variation);
        let c = simulate(&cm, &NoiseSpec::Zero, &[0.25, 0.5], 5_000, 100, &opts()).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn grid_outside_support_is_rejected() {
        let cm = usualcond();
        let err = simulate(&cm, &NoiseSpec::Zero, &[1.5], 500, 1, &opts());
        assert!(matches!(err, Err(Error::Precondition(_))));
        let err = simulate(&cm, &NoiseSpec::Zero, &[0.5], 50, 1, &opts());
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn dubins_gilat_sup_matches_f_gamma() {
        // F is increasing and H(t) ≤ F(t), so sup M = F(γ) path by path;
        // E F(γ) = ∫ t dt = 1/2.
        let cm = solve_f_from_h(
            F::affine(2.0, -1.0),
            Distribution::uniform(0.0, 1.0),
            Some(0.0),
            &opts(),
        )
        .unwrap();
        let report = simulate(&cm, &NoiseSpec::Zero, &[0.25, 0.5, 0.75], 20_000, 11, &opts()).unwrap();
        assert!((report.e_sup - 0.5).abs() <= 4.0 * report.se_sup);
        let m_inf = report.e_m_inf.unwrap();
        assert!(m_inf.abs() <= 4.0 * report.se_m_inf.unwrap());
        let verdict = empirical_type_diagnostics(&report, MartingaleType::Type4);
        assert!(verdict.consistent, "{:?}", verdict.notes);
    }

    #[test]
    fn supermartingale_diagnostics_consistent() {
        let cm = usualcond();
        let report = simulate(&cm, &NoiseSpec::Zero, &[0.25, 0.5, 0.9], 20_000, 5, &opts()).unwrap();
        let verdict = empirical_type_diagnostics(&report, MartingaleType::Type2a);
        assert!(verdict.consistent, "{:?}", verdict.notes);
        assert_eq!(verdict.confidence, Confidence::Statistical);
    }
}
