//! Deterministic real-valued functions on sub-intervals of the time axis.
//!
//! The catalog is deliberately small: closed forms whose integrals against
//! mixed measures are well behaved (constant, polynomial, powers of `s` and
//! of `1 - s`, exponentials, a log-composite for slowly divergent tails,
//! tabulated grids with linear interpolation) plus pointwise combinations.
//! Solver modules inject computed functions through [`RealFunction::dynamic`].

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A user-declared integrability verdict for improper integrals against dG
/// approaching the open endpoint of the support.
///
/// Numeric probing of log-log divergences is unreliable; a declared verdict
/// overrides probing in [`crate::integrate::improper_integral`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailVerdict {
    /// The improper integral converges near the endpoint.
    Convergent,
    /// The improper integral diverges near the endpoint.
    Divergent,
}

#[derive(Clone)]
enum FuncKind {
    Const(f64),
    /// `slope * s + intercept`
    Affine { slope: f64, intercept: f64 },
    /// Coefficients in increasing degree: `c[0] + c[1] s + ...`
    Poly(Vec<f64>),
    /// `s^alpha` on `(0, ∞)` (at 0 only for `alpha >= 0`)
    Power { alpha: f64 },
    /// `(1 - s)^alpha` on `(-∞, 1)` (at 1 only for `alpha >= 0`)
    OneMinusPow { alpha: f64 },
    /// `scale * e^{rate s}`
    Exp { rate: f64, scale: f64 },
    /// `(1 - ln(1 - s))^{-k}` on `[0, 1)`
    LogShiftRecip { k: f64 },
    /// Linear interpolation through `(ts[i], vs[i])`, clamped outside the grid
    Table { ts: Vec<f64>, vs: Vec<f64> },
    Scale(f64, Box<RealFunction>),
    Sum(Box<RealFunction>, Box<RealFunction>),
    Product(Box<RealFunction>, Box<RealFunction>),
    Abs(Box<RealFunction>),
    Dynamic(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// A deterministic evaluable function of time.
#[derive(Clone)]
pub struct RealFunction {
    kind: FuncKind,
    tail: Option<TailVerdict>,
}

impl RealFunction {
    fn from_kind(kind: FuncKind) -> Self {
        RealFunction { kind, tail: None }
    }

    /// Constant function `c`.
    pub fn constant(c: f64) -> Self {
        Self::from_kind(FuncKind::Const(c))
    }

    /// Affine function `slope * s + intercept`.
    pub fn affine(slope: f64, intercept: f64) -> Self {
        Self::from_kind(FuncKind::Affine { slope, intercept })
    }

    /// Polynomial with coefficients in increasing degree.
    pub fn poly(coeffs: Vec<f64>) -> Self {
        Self::from_kind(FuncKind::Poly(coeffs))
    }

    /// Power function `s^alpha`.
    pub fn power(alpha: f64) -> Self {
        Self::from_kind(FuncKind::Power { alpha })
    }

    /// `(1 - s)^alpha`; `alpha = -1` is the reciprocal `(1-s)^{-1}`,
    /// `alpha = -2` the square reciprocal used by the canonical
    /// uniform-law supermartingale.
    pub fn one_minus_pow(alpha: f64) -> Self {
        Self::from_kind(FuncKind::OneMinusPow { alpha })
    }

    /// `scale * e^{rate s}`.
    pub fn exp(rate: f64, scale: f64) -> Self {
        Self::from_kind(FuncKind::Exp { rate, scale })
    }

    /// `(1 - ln(1 - s))^{-k}` on `[0, 1)`; decays to 0 at 1 slower than any
    /// power, which makes it the building block for integrable-but-barely
    /// and divergent-but-barely tails.
    pub fn log_shift_recip(k: f64) -> Self {
        Self::from_kind(FuncKind::LogShiftRecip { k })
    }

    /// Tabulated function with linear interpolation; clamps outside the grid.
    pub fn table(ts: Vec<f64>, vs: Vec<f64>) -> Result<Self> {
        if ts.len() != vs.len() || ts.is_empty() {
            return Err(Error::Precondition(
                "table requires equally long, non-empty ts and vs".into(),
            ));
        }
        if ts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition(
                "table abscissae must be strictly increasing".into(),
            ));
        }
        Ok(Self::from_kind(FuncKind::Table { ts, vs }))
    }

    /// Pointwise scaling `c * f`.
    pub fn scale(c: f64, f: RealFunction) -> Self {
        Self::from_kind(FuncKind::Scale(c, Box::new(f)))
    }

    /// Pointwise sum.
    pub fn sum(f: RealFunction, g: RealFunction) -> Self {
        Self::from_kind(FuncKind::Sum(Box::new(f), Box::new(g)))
    }

    /// Pointwise product.
    pub fn product(f: RealFunction, g: RealFunction) -> Self {
        Self::from_kind(FuncKind::Product(Box::new(f), Box::new(g)))
    }

    /// Pointwise absolute value. Inherits the declared tail verdict of the
    /// inner function, since declared verdicts are about absolute integrability.
    pub fn abs(f: RealFunction) -> Self {
        let tail = f.tail;
        RealFunction {
            kind: FuncKind::Abs(Box::new(f)),
            tail,
        }
    }

    /// Wraps an arbitrary evaluator. Used by the solver for functions defined
    /// through integrals of the underlying law.
    pub fn dynamic(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::from_kind(FuncKind::Dynamic(Arc::new(f)))
    }

    /// Attaches a declared tail verdict, overriding numeric probing.
    pub fn with_declared_tail(mut self, verdict: TailVerdict) -> Self {
        self.tail = Some(verdict);
        self
    }

    /// The declared tail verdict, if any.
    pub fn declared_tail(&self) -> Option<TailVerdict> {
        self.tail
    }

    /// Evaluates the function; may return non-finite values at singular points.
    pub fn eval(&self, s: f64) -> f64 {
        match &self.kind {
            FuncKind::Const(c) => *c,
            FuncKind::Affine { slope, intercept } => slope * s + intercept,
            FuncKind::Poly(coeffs) => coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c),
            FuncKind::Power { alpha } => s.powf(*alpha),
            FuncKind::OneMinusPow { alpha } => (1.0 - s).powf(*alpha),
            FuncKind::Exp { rate, scale } => scale * (rate * s).exp(),
            FuncKind::LogShiftRecip { k } => {
                if s >= 1.0 {
                    return if s == 1.0 { 0.0 } else { f64::NAN };
                }
                (1.0 - (1.0 - s).ln()).powf(-k)
            }
            FuncKind::Table { ts, vs } => {
                if s <= ts[0] {
                    return vs[0];
                }
                if s >= *ts.last().unwrap() {
                    return *vs.last().unwrap();
                }
                let i = ts.partition_point(|&t| t <= s) - 1;
                let w = (s - ts[i]) / (ts[i + 1] - ts[i]);
                vs[i] + w * (vs[i + 1] - vs[i])
            }
            FuncKind::Scale(c, f) => c * f.eval(s),
            FuncKind::Sum(f, g) => f.eval(s) + g.eval(s),
            FuncKind::Product(f, g) => f.eval(s) * g.eval(s),
            FuncKind::Abs(f) => f.eval(s).abs(),
            FuncKind::Dynamic(f) => f(s),
        }
    }

    /// Evaluates and rejects non-finite results.
    pub fn eval_checked(&self, s: f64) -> Result<f64> {
        let v = self.eval(s);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonEvaluable {
                at: s,
                reason: format!("evaluated to {v}"),
            })
        }
    }
}

impl fmt::Debug for RealFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FuncKind::Const(c) => write!(f, "Const({c})"),
            FuncKind::Affine { slope, intercept } => write!(f, "Affine({slope} s + {intercept})"),
            FuncKind::Poly(c) => write!(f, "Poly({c:?})"),
            FuncKind::Power { alpha } => write!(f, "s^{alpha}"),
            FuncKind::OneMinusPow { alpha } => write!(f, "(1-s)^{alpha}"),
            FuncKind::Exp { rate, scale } => write!(f, "{scale} e^({rate} s)"),
            FuncKind::LogShiftRecip { k } => write!(f, "(1-ln(1-s))^-{k}"),
            FuncKind::Table { ts, .. } => write!(f, "Table[{} pts]", ts.len()),
            FuncKind::Scale(c, g) => write!(f, "{c} * {g:?}"),
            FuncKind::Sum(a, b) => write!(f, "({a:?} + {b:?})"),
            FuncKind::Product(a, b) => write!(f, "({a:?} * {b:?})"),
            FuncKind::Abs(g) => write!(f, "|{g:?}|"),
            FuncKind::Dynamic(_) => write!(f, "<computed>"),
        }
    }
}
