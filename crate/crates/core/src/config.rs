//! Strict JSON run configuration shared by the CLI and the browser demo.
//!
//! Parsing is strict: unknown keys are rejected, and mode/block mismatches
//! are reported as validation errors distinct from syntax errors, each with
//! source positions where the parser provides them.

use serde::{Deserialize, Serialize};

use crate::compensator::JumpMarkSpec;
use crate::error::{Error, Result};
use crate::func::{RealFunction, TailVerdict};
use crate::measure::{Atom, DensityPiece, Distribution, PieceShape};
use crate::options::NumericOptions;
use crate::solver::{solve_h_from_f, ConditionMPair, DerivativePair, NoiseSpec};

/// Errors from reading a run configuration.
#[derive(Debug, Clone, thiserror::Error)]
pub enum ConfigError {
    /// Malformed JSON (syntax, truncation).
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    /// Well-formed JSON that does not fit the schema or the mode.
    #[error("invalid configuration: {message}")]
    Validation { message: String },
}

/// Operation selector; mirrors the CLI subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    SolveF,
    SolveH,
    Classify,
    Sigma,
    Compensate,
    Survival,
    Simulate,
    Example,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::SolveF => "solve-f",
            Mode::SolveH => "solve-h",
            Mode::Classify => "classify",
            Mode::Sigma => "sigma",
            Mode::Compensate => "compensate",
            Mode::Survival => "survival",
            Mode::Simulate => "simulate",
            Mode::Example => "example",
        }
    }
}

/// Evaluable-function description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionConfig {
    Const {
        c: f64,
    },
    /// `a·s + b`.
    Affine {
        a: f64,
        b: f64,
    },
    Poly {
        coeffs: Vec<f64>,
    },
    /// `s^alpha`.
    Power {
        alpha: f64,
    },
    /// `(1-s)^alpha`.
    OneMinusPow {
        alpha: f64,
    },
    /// `(1-s)^{-1}`.
    RecipOneMinus {},
    /// `(1-s)^{-2}`.
    PowerRecip2 {},
    /// `scale · e^{rate·s}`.
    Exp {
        rate: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `(1 - ln(1-s))^{-k}`.
    Log1mRecip {
        k: f64,
    },
    Table {
        ts: Vec<f64>,
        vs: Vec<f64>,
    },
    Scale {
        c: f64,
        f: Box<FunctionConfig>,
    },
    Sum {
        terms: Vec<FunctionConfig>,
    },
    Product {
        f: Box<FunctionConfig>,
        g: Box<FunctionConfig>,
    },
    Abs {
        f: Box<FunctionConfig>,
    },
    /// Attaches a declared tail verdict ("convergent" / "divergent") to the
    /// wrapped function, overriding numeric probing of improper integrals.
    Declared {
        verdict: DeclaredVerdict,
        f: Box<FunctionConfig>,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeclaredVerdict {
    Convergent,
    Divergent,
}

impl FunctionConfig {
    pub fn build(&self) -> Result<RealFunction> {
        Ok(match self {
            FunctionConfig::Const { c } => RealFunction::constant(*c),
            FunctionConfig::Affine { a, b } => RealFunction::affine(*a, *b),
            FunctionConfig::Poly { coeffs } => RealFunction::poly(coeffs.clone()),
            FunctionConfig::Power { alpha } => RealFunction::power(*alpha),
            FunctionConfig::OneMinusPow { alpha } => RealFunction::one_minus_pow(*alpha),
            FunctionConfig::RecipOneMinus {} => RealFunction::one_minus_pow(-1.0),
            FunctionConfig::PowerRecip2 {} => RealFunction::one_minus_pow(-2.0),
            FunctionConfig::Exp { rate, scale } => RealFunction::exp(*rate, *scale),
            FunctionConfig::Log1mRecip { k } => RealFunction::log_shift_recip(*k),
            FunctionConfig::Table { ts, vs } => RealFunction::table(ts.clone(), vs.clone())?,
            FunctionConfig::Scale { c, f } => RealFunction::scale(*c, f.build()?),
            FunctionConfig::Sum { terms } => {
                let mut iter = terms.iter();
                let first = iter
                    .next()
                    .ok_or_else(|| Error::Precondition("sum needs at least one term".into()))?
                    .build()?;
                iter.try_fold(first, |acc, t| Ok(RealFunction::sum(acc, t.build()?)))?
            }
            FunctionConfig::Product { f, g } => RealFunction::product(f.build()?, g.build()?),
            FunctionConfig::Abs { f } => RealFunction::abs(f.build()?),
            FunctionConfig::Declared { verdict, f } => {
                let v = match verdict {
                    DeclaredVerdict::Convergent => TailVerdict::Convergent,
                    DeclaredVerdict::Divergent => TailVerdict::Divergent,
                };
                f.build()?.with_declared_tail(v)
            }
        })
    }
}

/// Density-piece description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PieceConfig {
    Const {
        from: f64,
        to: f64,
        weight: f64,
    },
    Poly {
        coeffs: Vec<f64>,
        from: f64,
        to: f64,
        weight: f64,
    },
    /// `to: null` extends the piece to +∞.
    Exp {
        rate: f64,
        from: f64,
        to: Option<f64>,
        weight: f64,
    },
    Power {
        alpha: f64,
        from: f64,
        to: f64,
        weight: f64,
    },
    Table {
        ts: Vec<f64>,
        vs: Vec<f64>,
        weight: f64,
    },
}

impl PieceConfig {
    fn build(&self) -> Result<DensityPiece> {
        match self {
            PieceConfig::Const { from, to, weight } => {
                DensityPiece::new(*from, *to, *weight, PieceShape::Const)
            }
            PieceConfig::Poly {
                coeffs,
                from,
                to,
                weight,
            } => DensityPiece::new(*from, *to, *weight, PieceShape::Poly(coeffs.clone())),
            PieceConfig::Exp {
                rate,
                from,
                to,
                weight,
            } => DensityPiece::new(
                *from,
                to.unwrap_or(f64::INFINITY),
                *weight,
                PieceShape::Exp { rate: *rate },
            ),
            PieceConfig::Power {
                alpha,
                from,
                to,
                weight,
            } => DensityPiece::new(*from, *to, *weight, PieceShape::Power { alpha: *alpha }),
            PieceConfig::Table { ts, vs, weight } => {
                let (from, to) = (ts.first().copied().unwrap_or(0.0), ts.last().copied().unwrap_or(0.0));
                DensityPiece::new(
                    from,
                    to,
                    *weight,
                    PieceShape::Table {
                        ts: ts.clone(),
                        vs: vs.clone(),
                    },
                )
            }
        }
    }
}

/// Jump-time law description.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionConfig {
    #[serde(default)]
    pub atoms: Vec<(f64, f64)>,
    #[serde(default)]
    pub pieces: Vec<PieceConfig>,
    #[serde(default)]
    pub mass_inf: f64,
    /// Rescale all masses to total 1 instead of rejecting the input.
    #[serde(default)]
    pub renormalize: bool,
}

impl DistributionConfig {
    pub fn build(&self) -> Result<Distribution> {
        let atoms = self
            .atoms
            .iter()
            .map(|&(at, mass)| Atom { at, mass })
            .collect();
        let pieces = self
            .pieces
            .iter()
            .map(|p| p.build())
            .collect::<Result<Vec<_>>>()?;
        if self.renormalize {
            Distribution::new_renormalized(atoms, pieces, self.mass_inf)
        } else {
            Distribution::new(atoms, pieces, self.mass_inf)
        }
    }
}

/// `(F(0), z)` pair description, optionally with an explicit `H`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairConfig {
    #[serde(rename = "F0")]
    pub f0: f64,
    pub z: FunctionConfig,
    #[serde(rename = "H", default)]
    pub h: Option<FunctionConfig>,
    /// Analytically-known `lim F·Ḡ`, for slow log-order tails.
    #[serde(default)]
    pub declared_limit: Option<f64>,
}

impl PairConfig {
    pub fn build(&self, d: &Distribution, opts: &NumericOptions) -> Result<ConditionMPair> {
        let pair = DerivativePair::new(self.f0, self.z.build()?, d.clone(), opts)?;
        let mut cm = match &self.h {
            Some(h) => ConditionMPair::new(pair, h.build()?),
            None => solve_h_from_f(pair, opts)?,
        };
        if let Some(lim) = self.declared_limit {
            cm = cm.with_declared_limit(lim);
        }
        Ok(cm)
    }
}

/// Orthogonal-noise description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseConfig {
    Zero,
    TwoPoint {
        #[serde(rename = "J")]
        j: FunctionConfig,
    },
    Mixture {
        values: Vec<f64>,
        probs: Vec<f64>,
    },
}

impl NoiseConfig {
    pub fn build(&self) -> Result<NoiseSpec> {
        Ok(match self {
            NoiseConfig::Zero => NoiseSpec::Zero,
            NoiseConfig::TwoPoint { j } => NoiseSpec::two_point(j.build()?),
            NoiseConfig::Mixture { values, probs } => {
                NoiseSpec::mixture(values.clone(), probs.clone())?
            }
        })
    }
}

/// Jump-mark description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkConfig {
    #[serde(rename = "K")]
    pub k: FunctionConfig,
    #[serde(rename = "Kabs")]
    pub kabs: FunctionConfig,
}

impl MarkConfig {
    pub fn build(&self, d: &Distribution, opts: &NumericOptions) -> Result<JumpMarkSpec> {
        JumpMarkSpec::new(self.k.build()?, self.kabs.build()?, d, opts)
    }
}

/// A complete run description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    /// Preset name, for `mode = "example"`.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub distribution: Option<DistributionConfig>,
    /// Initial value for `solve-f` (Case A).
    #[serde(rename = "F0", default)]
    pub f0: Option<f64>,
    /// Conditional terminal mean for `solve-f`.
    #[serde(rename = "H", default)]
    pub h: Option<FunctionConfig>,
    #[serde(default)]
    pub pair: Option<PairConfig>,
    #[serde(default)]
    pub noise: Option<NoiseConfig>,
    #[serde(default)]
    pub mark: Option<MarkConfig>,
    /// Conditional mean for `survival`.
    #[serde(rename = "K", default)]
    pub k: Option<FunctionConfig>,
    /// Evaluation times for `survival`.
    #[serde(default)]
    pub times: Option<Vec<f64>>,
    /// Grid for `simulate`; defaults to quantile-spaced points.
    #[serde(default)]
    pub grid: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub n_paths: Option<usize>,
    #[serde(default)]
    pub options: Option<NumericOptions>,
}

impl RunConfig {
    /// Mode-specific block requirements; strict parsing has already rejected
    /// unknown keys.
    pub fn validate(&self) -> std::result::Result<(), ConfigError> {
        let need = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(ConfigError::Validation {
                    message: format!("mode \"{}\" requires the \"{what}\" block", self.mode.name()),
                })
            }
        };
        match self.mode {
            Mode::SolveF => {
                need(self.distribution.is_some(), "distribution")?;
                need(self.h.is_some(), "H")?;
            }
            Mode::SolveH => {
                need(self.distribution.is_some(), "distribution")?;
                need(self.pair.is_some(), "pair")?;
            }
            Mode::Classify | Mode::Sigma | Mode::Simulate => {
                need(self.distribution.is_some(), "distribution")?;
                need(self.pair.is_some(), "pair")?;
            }
            Mode::Compensate => {
                need(self.distribution.is_some(), "distribution")?;
                need(self.mark.is_some(), "mark")?;
            }
            Mode::Survival => {
                need(self.k.is_some(), "K")?;
                need(self.times.is_some(), "times")?;
            }
            Mode::Example => {
                let name = self.name.as_deref().ok_or(ConfigError::Validation {
                    message: "mode \"example\" requires the \"name\" field".into(),
                })?;
                if crate::preset::Preset::from_name(name).is_none() {
                    return Err(ConfigError::Validation {
                        message: format!(
                            "unknown preset \"{name}\"; available: {}",
                            crate::preset::Preset::ALL
                                .iter()
                                .map(|p| p.name())
                                .collect::<Vec<_>>()
                                .join(", ")
                        ),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Parses and validates a run configuration from JSON text.
pub fn parse_config(text: &str) -> std::result::Result<RunConfig, ConfigError> {
    let config: RunConfig = match serde_json::from_str(text) {
        Ok(c) => c,
        Err(e) => {
            let (line, column, message) = (e.line(), e.column(), e.to_string());
            return Err(match e.classify() {
                serde_json::error::Category::Data => ConfigError::Validation {
                    message: format!("{message} (line {line}, column {column})"),
                },
                _ => ConfigError::Parse {
                    line,
                    column,
                    message,
                },
            });
        }
    };
    config.validate()?;
    Ok(config)
}
