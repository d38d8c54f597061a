//! The law `G` of the jump time on the extended half-line `[0, +∞]`.
//!
//! A distribution is a finite mixture of atoms, density pieces from a small
//! catalog (each with a closed-form integral, so CDF and quantile evaluation
//! are exact up to rounding), and an explicit mass at infinity. Atoms strictly
//! inside a density piece are allowed in the input; construction splits the
//! piece so that downstream code can walk a clean, ordered timeline of mass
//! carriers.

use std::fmt;

use crate::error::{Error, Result};

const MASS_TOL: f64 = 1e-10;

/// A point mass of the jump-time law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    /// Location in time units, `>= 0`.
    pub at: f64,
    /// Probability mass in `(0, 1]`.
    pub mass: f64,
}

/// Density shapes with closed-form integrals.
#[derive(Debug, Clone)]
pub enum PieceShape {
    /// Constant density (uniform over the piece interval).
    Const,
    /// Polynomial density, coefficients in increasing degree; must be
    /// nonnegative on the piece interval.
    Poly(Vec<f64>),
    /// `e^{-rate t}`, `rate > 0`; the only shape allowed on an unbounded interval.
    Exp { rate: f64 },
    /// `(1 - t)^alpha` with `alpha > -1`; the interval must sit inside `[0, 1]`.
    Power { alpha: f64 },
    /// Piecewise-linear density through `(ts[i], vs[i])`, `vs[i] >= 0`.
    Table { ts: Vec<f64>, vs: Vec<f64> },
}

impl PieceShape {
    /// Unnormalized density value.
    fn raw(&self, t: f64) -> f64 {
        match self {
            PieceShape::Const => 1.0,
            PieceShape::Poly(c) => c.iter().rev().fold(0.0, |acc, k| acc * t + k),
            PieceShape::Exp { rate } => (-rate * t).exp(),
            PieceShape::Power { alpha } => (1.0 - t).powf(*alpha),
            PieceShape::Table { ts, vs } => {
                if t <= ts[0] {
                    return vs[0];
                }
                if t >= *ts.last().unwrap() {
                    return *vs.last().unwrap();
                }
                let i = ts.partition_point(|&x| x <= t) - 1;
                let w = (t - ts[i]) / (ts[i + 1] - ts[i]);
                vs[i] + w * (vs[i + 1] - vs[i])
            }
        }
    }

    /// Integral of the unnormalized density over `[a, x]`.
    fn raw_integral(&self, a: f64, x: f64) -> f64 {
        if x <= a {
            return 0.0;
        }
        match self {
            PieceShape::Const => x - a,
            PieceShape::Poly(c) => {
                let anti = |t: f64| {
                    c.iter()
                        .enumerate()
                        .fold(0.0, |acc, (j, k)| acc + k * t.powi(j as i32 + 1) / (j as f64 + 1.0))
                };
                anti(x) - anti(a)
            }
            PieceShape::Exp { rate } => {
                let hi = if x.is_finite() { (-rate * x).exp() } else { 0.0 };
                ((-rate * a).exp() - hi) / rate
            }
            PieceShape::Power { alpha } => {
                let p = alpha + 1.0;
                ((1.0 - a).powf(p) - (1.0 - x).powf(p)) / p
            }
            PieceShape::Table { ts, .. } => {
                let mut total = 0.0;
                for i in 0..ts.len() - 1 {
                    let (lo, hi) = (ts[i].max(a), ts[i + 1].min(x));
                    if lo >= hi {
                        continue;
                    }
                    total += 0.5 * (self.raw(lo) + self.raw(hi)) * (hi - lo);
                }
                total
            }
        }
    }

    /// Solves `raw_integral(a, x) = target` for `x` in `[a, b]`.
    fn raw_inverse(&self, a: f64, b: f64, target: f64) -> f64 {
        match self {
            PieceShape::Const => a + target,
            PieceShape::Exp { rate } => {
                let v = (-rate * a).exp() - rate * target;
                if v <= 0.0 {
                    b
                } else {
                    -v.ln() / rate
                }
            }
            PieceShape::Power { alpha } => {
                let p = alpha + 1.0;
                let v = (1.0 - a).powf(p) - p * target;
                if v <= 0.0 {
                    b
                } else {
                    1.0 - v.powf(1.0 / p)
                }
            }
            PieceShape::Poly(_) => {
                // Bisection on the exact antiderivative.
                let (mut lo, mut hi) = (a, if b.is_finite() { b } else { a + 1.0 });
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.raw_integral(a, mid) < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
            PieceShape::Table { ts, .. } => {
                let mut acc = 0.0;
                for i in 0..ts.len() - 1 {
                    let (lo, hi) = (ts[i].max(a), ts[i + 1].min(b));
                    if lo >= hi {
                        continue;
                    }
                    let cell = 0.5 * (self.raw(lo) + self.raw(hi)) * (hi - lo);
                    if acc + cell >= target {
                        let want = target - acc;
                        let v0 = self.raw(lo);
                        let slope = (self.raw(hi) - v0) / (hi - lo);
                        // 0.5 slope dx^2 + v0 dx = want, stable root
                        let dx = if slope.abs() < 1e-300 {
                            want / v0
                        } else {
                            let disc = (v0 * v0 + 2.0 * slope * want).max(0.0);
                            if slope > 0.0 {
                                (disc.sqrt() - v0) / slope
                            } else {
                                2.0 * want / (v0 + disc.sqrt())
                            }
                        };
                        return lo + dx.clamp(0.0, hi - lo);
                    }
                    acc += cell;
                }
                b
            }
        }
    }
}

/// A weighted density piece on `[from, to)`; `weight` is its total mass.
#[derive(Debug, Clone)]
pub struct DensityPiece {
    pub from: f64,
    /// Right end of the interval; may be `+∞` for the exponential shape.
    pub to: f64,
    /// Total probability mass carried by the piece.
    pub weight: f64,
    shape: PieceShape,
    norm: f64,
}

impl DensityPiece {
    pub fn new(from: f64, to: f64, weight: f64, shape: PieceShape) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidDistribution(msg));
        if !(from >= 0.0) || !(to > from) || from.is_infinite() {
            return bad(format!("piece interval [{from}, {to}) is not valid"));
        }
        if !(weight > 0.0) || weight > 1.0 + MASS_TOL {
            return bad(format!("piece weight {weight} outside (0, 1]"));
        }
        match &shape {
            PieceShape::Exp { rate } => {
                if !(*rate > 0.0) {
                    return bad(format!("exponential rate {rate} must be positive"));
                }
            }
            PieceShape::Power { alpha } => {
                if !(*alpha > -1.0) {
                    return bad(format!("power shape needs alpha > -1, got {alpha}"));
                }
                if to > 1.0 {
                    return bad("power shape (1-t)^alpha requires the interval inside [0, 1]".into());
                }
            }
            PieceShape::Table { ts, vs } => {
                if ts.len() != vs.len() || ts.len() < 2 {
                    return bad("table shape needs at least two matching nodes".into());
                }
                if ts.windows(2).any(|w| w[0] >= w[1]) {
                    return bad("table abscissae must be strictly increasing".into());
                }
                if vs.iter().any(|v| !(*v >= 0.0)) {
                    return bad("table densities must be nonnegative".into());
                }
            }
            PieceShape::Poly(c) => {
                if c.is_empty() {
                    return bad("polynomial shape needs coefficients".into());
                }
                // Probe nonnegativity on a modest grid.
                let hi = if to.is_finite() { to } else { from + 1.0 };
                for i in 0..=128 {
                    let t = from + (hi - from) * i as f64 / 128.0;
                    if PieceShape::Poly(c.clone()).raw(t) < -1e-12 {
                        return bad(format!("polynomial density negative at t = {t}"));
                    }
                }
            }
            PieceShape::Const => {}
        }
        if to.is_infinite() && !matches!(shape, PieceShape::Exp { .. }) {
            return bad("only the exponential shape may extend to +∞".into());
        }
        let norm = shape.raw_integral(from, to);
        if !(norm > 0.0) || !norm.is_finite() {
            return bad(format!("piece shape has non-positive or non-finite mass {norm}"));
        }
        Ok(DensityPiece {
            from,
            to,
            weight,
            shape,
            norm,
        })
    }

    /// Normalized density at `t` (0 outside the interval).
    pub fn density(&self, t: f64) -> f64 {
        if t < self.from || t >= self.to {
            return 0.0;
        }
        self.weight * self.shape.raw(t) / self.norm
    }

    /// Mass of the piece on `[from, x]`.
    pub fn mass_to(&self, x: f64) -> f64 {
        if x <= self.from {
            0.0
        } else if x >= self.to {
            self.weight
        } else {
            self.weight * self.shape.raw_integral(self.from, x) / self.norm
        }
    }

    /// Point `x` with `mass_to(x) = m`, for `m` in `[0, weight]`.
    pub fn quantile(&self, m: f64) -> f64 {
        if m <= 0.0 {
            return self.from;
        }
        if m >= self.weight {
            return self.to;
        }
        self.shape
            .raw_inverse(self.from, self.to, m / self.weight * self.norm)
    }

    fn split_at(&self, t: f64) -> (DensityPiece, DensityPiece) {
        let left_mass = self.mass_to(t);
        let left = DensityPiece {
            from: self.from,
            to: t,
            weight: left_mass,
            shape: self.shape.clone(),
            norm: self.shape.raw_integral(self.from, t),
        };
        let right = DensityPiece {
            from: t,
            to: self.to,
            weight: self.weight - left_mass,
            shape: self.shape.clone(),
            norm: self.shape.raw_integral(t, self.to),
        };
        (left, right)
    }
}

/// Case tag for the right endpoint of the support.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    /// No atom at a finite right endpoint; the time set is `[0, t_G)`.
    A,
    /// An atom sits at the finite right endpoint; the time set is `[0, t_G]`.
    B,
}

/// Right endpoint `t_G` of the support together with its case tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointCase {
    pub tag: CaseTag,
    /// `sup { t : G(t) < 1 }`; may be `+∞`.
    pub t_g: f64,
}

impl EndpointCase {
    /// Whether `t_G` itself belongs to the time set (Case B only).
    pub fn includes_endpoint(&self) -> bool {
        self.tag == CaseTag::B
    }
}

impl fmt::Display for EndpointCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tag {
            CaseTag::A => write!(f, "Case A, t_G = {}, support [0, t_G)", self.t_g),
            CaseTag::B => write!(f, "Case B, t_G = {}, support [0, t_G]", self.t_g),
        }
    }
}

/// Mixed law of the jump time: atoms + density pieces + mass at infinity.
///
/// Immutable after construction; all evaluation methods take `&self`.
#[derive(Debug, Clone)]
pub struct Distribution {
    atoms: Vec<Atom>,
    pieces: Vec<DensityPiece>,
    mass_at_infinity: f64,
}

impl Distribution {
    /// Validates and builds a distribution. Total mass must be 1 within 1e-10.
    pub fn new(atoms: Vec<Atom>, pieces: Vec<DensityPiece>, mass_at_infinity: f64) -> Result<Self> {
        Self::build(atoms, pieces, mass_at_infinity, false)
    }

    /// Same as [`Distribution::new`] but rescales all masses to total 1.
    pub fn new_renormalized(
        atoms: Vec<Atom>,
        pieces: Vec<DensityPiece>,
        mass_at_infinity: f64,
    ) -> Result<Self> {
        Self::build(atoms, pieces, mass_at_infinity, true)
    }

    fn build(
        mut atoms: Vec<Atom>,
        mut pieces: Vec<DensityPiece>,
        mut mass_at_infinity: f64,
        renormalize: bool,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidDistribution(msg));

        for a in &atoms {
            if !(a.at >= 0.0) || a.at.is_infinite() {
                return bad(format!("atom location {} invalid", a.at));
            }
            if !(a.mass > 0.0) {
                return bad(format!("atom mass {} must be positive", a.mass));
            }
        }
        if !(mass_at_infinity >= 0.0) || mass_at_infinity > 1.0 + MASS_TOL {
            return bad(format!("mass at infinity {mass_at_infinity} outside [0, 1]"));
        }
        atoms.sort_by(|x, y| x.at.total_cmp(&y.at));
        if atoms.windows(2).any(|w| w[0].at >= w[1].at) {
            return bad("atom locations must be strictly increasing".into());
        }
        pieces.sort_by(|x, y| x.from.total_cmp(&y.from));
        for w in pieces.windows(2) {
            if w[0].to > w[1].from {
                return bad(format!(
                    "density pieces overlap: [{}, {}) and [{}, {})",
                    w[0].from, w[0].to, w[1].from, w[1].to
                ));
            }
        }

        // Split pieces at interior atom locations so the timeline is ordered.
        for a in &atoms {
            let mut split = Vec::with_capacity(pieces.len() + 1);
            for p in pieces.drain(..) {
                if a.at > p.from && a.at < p.to {
                    let (l, r) = p.split_at(a.at);
                    if l.weight > 0.0 {
                        split.push(l);
                    }
                    if r.weight > 0.0 {
                        split.push(r);
                    }
                } else {
                    split.push(p);
                }
            }
            pieces = split;
        }

        let total: f64 = atoms.iter().map(|a| a.mass).sum::<f64>()
            + pieces.iter().map(|p| p.weight).sum::<f64>()
            + mass_at_infinity;
        if renormalize {
            if !(total > 0.0) {
                return bad("cannot renormalize a zero-mass specification".into());
            }
            for a in &mut atoms {
                a.mass /= total;
            }
            for p in &mut pieces {
                p.weight /= total;
            }
            mass_at_infinity /= total;
        } else if (total - 1.0).abs() > MASS_TOL {
            return bad(format!("total mass {total} differs from 1 by more than {MASS_TOL:e}"));
        }

        let d = Distribution {
            atoms,
            pieces,
            mass_at_infinity,
        };
        // Standing assumption: the jump happens after 0 with positive probability.
        if d.survival(0.0) <= 0.0 {
            return bad("P(jump time > 0) must be positive".into());
        }
        Ok(d)
    }

    /// Uniform law on `[a, b)`.
    pub fn uniform(a: f64, b: f64) -> Self {
        let piece = DensityPiece::new(a, b, 1.0, PieceShape::Const).expect("valid uniform");
        Distribution::new(vec![], vec![piece], 0.0).expect("valid uniform")
    }

    /// Exponential law with the given rate on `[0, ∞)`.
    pub fn exponential(rate: f64) -> Self {
        let piece =
            DensityPiece::new(0.0, f64::INFINITY, 1.0, PieceShape::Exp { rate }).expect("valid exp");
        Distribution::new(vec![], vec![piece], 0.0).expect("valid exp")
    }

    /// Purely atomic law from `(location, mass)` pairs.
    pub fn from_atoms(atoms: &[(f64, f64)]) -> Result<Self> {
        Distribution::new(
            atoms.iter().map(|&(at, mass)| Atom { at, mass }).collect(),
            vec![],
            0.0,
        )
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn pieces(&self) -> &[DensityPiece] {
        &self.pieces
    }

    pub fn mass_at_infinity(&self) -> f64 {
        self.mass_at_infinity
    }

    /// Whether the law has no density pieces.
    pub fn is_atomic(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Distribution function `G(t)`, right-continuous.
    pub fn cdf(&self, t: f64) -> f64 {
        let mut g = 0.0;
        for a in &self.atoms {
            if a.at <= t {
                g += a.mass;
            }
        }
        for p in &self.pieces {
            g += p.mass_to(t);
        }
        g
    }

    /// Survival function `Ḡ(t) = 1 - G(t)`.
    pub fn survival(&self, t: f64) -> f64 {
        1.0 - self.cdf(t)
    }

    /// Left limit `Ḡ(t-) = Ḡ(t) + ΔG(t)`.
    pub fn survival_left(&self, t: f64) -> f64 {
        self.survival(t) + self.atom_mass_at(t)
    }

    /// Mass of the atom at exactly `t`, 0 if there is none.
    pub fn atom_mass_at(&self, t: f64) -> f64 {
        self.atoms
            .iter()
            .find(|a| a.at == t)
            .map(|a| a.mass)
            .unwrap_or(0.0)
    }

    /// Right endpoint of the support and its case tag.
    pub fn endpoint_case(&self) -> EndpointCase {
        if self.mass_at_infinity > 0.0 {
            return EndpointCase {
                tag: CaseTag::A,
                t_g: f64::INFINITY,
            };
        }
        let mut t_g: f64 = 0.0;
        if let Some(a) = self.atoms.last() {
            t_g = t_g.max(a.at);
        }
        if let Some(p) = self.pieces.last() {
            t_g = t_g.max(p.to);
        }
        let tag = if t_g.is_finite() && self.atom_mass_at(t_g) > 0.0 {
            CaseTag::B
        } else {
            CaseTag::A
        };
        EndpointCase { tag, t_g }
    }

    /// `sup { t : G(t) < 1 }`.
    pub fn t_g(&self) -> f64 {
        self.endpoint_case().t_g
    }

    /// Generalized inverse of the CDF; returns `+∞` when `u` exceeds the
    /// total finite mass. Deterministic given `u`; randomness lives with the
    /// caller.
    pub fn sample(&self, u: f64) -> f64 {
        assert!(u > 0.0 && u < 1.0, "uniform variate must lie in (0, 1)");
        if u > 1.0 - self.mass_at_infinity {
            return f64::INFINITY;
        }
        let mut cum = 0.0;
        for item in self.timeline() {
            match item {
                MassCarrier::Atom(a) => {
                    cum += a.mass;
                    if u <= cum {
                        return a.at;
                    }
                }
                MassCarrier::Piece(p) => {
                    if u <= cum + p.weight {
                        return p.quantile(u - cum);
                    }
                    cum += p.weight;
                }
            }
        }
        // Only reachable through rounding at the far edge of the support.
        self.t_g()
    }

    /// Point where the mass of the continuous part reaches `m`.
    pub fn continuous_quantile(&self, m: f64) -> f64 {
        let mut cum = 0.0;
        for p in &self.pieces {
            if m <= cum + p.weight {
                return p.quantile(m - cum);
            }
            cum += p.weight;
        }
        self.pieces.last().map(|p| p.to).unwrap_or(0.0)
    }

    /// Total mass of the density pieces.
    pub fn continuous_mass(&self) -> f64 {
        self.pieces.iter().map(|p| p.weight).sum()
    }

    /// Evaluation grid: atom locations plus `n` quantile-spaced points of the
    /// continuous part, keeping only points with `Ḡ(t) >= floor`.
    pub fn support_grid(&self, n: usize, floor: f64) -> Vec<f64> {
        let mut grid: Vec<f64> = self
            .atoms
            .iter()
            .map(|a| a.at)
            .filter(|&t| self.survival(t) >= floor)
            .collect();
        let c_total = self.continuous_mass();
        if c_total > 0.0 {
            for j in 1..=n {
                let t = self.continuous_quantile(c_total * j as f64 / (n + 1) as f64);
                if t.is_finite() && self.survival(t) >= floor {
                    grid.push(t);
                }
            }
        }
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        grid
    }

    /// Point `t` below `t_G` such that the mass remaining in `(t, t_G)` is
    /// (approximately) `remaining`; used to march truncation points toward the
    /// open endpoint.
    pub(crate) fn truncation_point(&self, remaining: f64) -> f64 {
        let target = 1.0 - self.mass_at_infinity - remaining;
        let mut cum = 0.0;
        for item in self.timeline() {
            match item {
                MassCarrier::Atom(a) => {
                    cum += a.mass;
                    if target <= cum {
                        return a.at;
                    }
                }
                MassCarrier::Piece(p) => {
                    if target <= cum + p.weight {
                        return p.quantile(target - cum);
                    }
                    cum += p.weight;
                }
            }
        }
        self.t_g()
    }

    fn timeline(&self) -> impl Iterator<Item = MassCarrier<'_>> {
        // Atoms never sit strictly inside a piece after construction, so a
        // merge by position (atom first on ties) is a valid mass ordering.
        let mut items: Vec<MassCarrier<'_>> = self
            .atoms
            .iter()
            .map(MassCarrier::Atom)
            .chain(self.pieces.iter().map(MassCarrier::Piece))
            .collect();
        items.sort_by(|x, y| {
            x.position()
                .total_cmp(&y.position())
                .then_with(|| x.is_piece().cmp(&y.is_piece()))
        });
        items.into_iter()
    }
}

enum MassCarrier<'a> {
    Atom(&'a Atom),
    Piece(&'a DensityPiece),
}

impl MassCarrier<'_> {
    fn position(&self) -> f64 {
        match self {
            MassCarrier::Atom(a) => a.at,
            MassCarrier::Piece(p) => p.from,
        }
    }

    fn is_piece(&self) -> bool {
        matches!(self, MassCarrier::Piece(_))
    }
}
