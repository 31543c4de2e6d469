//! The level-crossing function phi and its admissibility conditions.
//!
//! A bell-shaped function's canonical Fourier representation is driven by a
//! function phi with: phi(s) sign(s) >= 0; for every integer k, phi - k
//! changes sign at most once (the level-crossing condition, with the k = 0
//! change at the origin); and the tail integrability condition
//! int_{|s|>=1} |phi(s)| / |s|^3 ds < infinity.
//!
//! The data model is a piecewise-affine core between knots (one of which is
//! 0), declared tails (constant, affine, or a power law A |s|^gamma with
//! gamma < 2 and sign matching sign(s)), plus an optional list of unit-style
//! steps so that the same type carries the integer-valued step functions
//! produced by factorisation. Every piece is monotone on its interval, which
//! keeps crossing points exactly solvable.

use serde::{Deserialize, Serialize};

/// Tail behaviour of phi outside the knot range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Tail {
    /// phi(s) = value.
    Constant { value: f64 },
    /// phi(s) = slope * s + intercept.
    Affine { slope: f64, intercept: f64 },
    /// phi(s) = sign(s) * amplitude * |s|^gamma, amplitude >= 0, 0 <= gamma < 2.
    Power { amplitude: f64, gamma: f64 },
}

/// One affine piece between two consecutive knots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffinePiece {
    pub slope: f64,
    pub intercept: f64,
}

/// A unit-style step: for `location > 0` it contributes `height` on
/// [location, inf); for `location < 0` it contributes `height` on
/// (-inf, location].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub location: f64,
    pub height: f64,
}

/// The level-crossing function phi.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiFunction {
    /// Strictly increasing breakpoints; must contain 0.
    pub knots: Vec<f64>,
    /// One affine segment per interval between consecutive knots.
    pub pieces: Vec<AffinePiece>,
    pub left_tail: Tail,
    pub right_tail: Tail,
    /// Step part (empty for a plain piecewise-affine phi).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub steps: Vec<Step>,
}

#[derive(Debug, thiserror::Error)]
pub enum PhiError {
    #[error("knots must be strictly increasing, got {0} then {1}")]
    KnotsNotIncreasing(f64, f64),
    #[error("knots must contain 0")]
    MissingZeroKnot,
    #[error("{pieces} pieces for {knots} knots; expected knots - 1")]
    PieceCountMismatch { knots: usize, pieces: usize },
    #[error("power tail exponent gamma = {0} violates 0 <= gamma < 2")]
    BadTailExponent(f64),
    #[error("power tail amplitude {0} must be nonnegative")]
    BadTailAmplitude(f64),
    #[error("step location must be nonzero")]
    ZeroStepLocation,
    #[error("phi exceeds level {k_max} inside the knot range; rerun with larger k_max")]
    KMaxTooSmall { k_max: i64 },
}

/// Outcome of the level-crossing validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LevelCrossingVerdict {
    Accept,
    /// A level whose sign pattern changes more than once, with two witness
    /// points around the offending (second) sign change.
    Reject { level: i64, witnesses: (f64, f64) },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum IntegrabilityVerdict {
    Finite(f64),
    Infinite,
}

/// Crossing point of phi - k, for each level in a symmetric range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingEntry {
    pub k: i64,
    /// +inf / -inf when the level is never reached on that side.
    pub s: f64,
    /// phi - k vanishes on an interval; `s` is its leftmost point.
    pub non_unique: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingTable {
    pub entries: Vec<CrossingEntry>,
}

impl CrossingTable {
    pub fn get(&self, k: i64) -> Option<&CrossingEntry> {
        self.entries.iter().find(|e| e.k == k)
    }
}

/// Parameters (a, b, c, phi) of the canonical representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub phi: PhiFunction,
}

#[derive(Debug, thiserror::Error)]
pub enum ParamsError {
    #[error("gaussian coefficient a = {0} must be nonnegative")]
    NegativeA(f64),
    #[error(transparent)]
    Phi(#[from] PhiError),
    #[error("phi fails the level-crossing condition at level {level}")]
    LevelCrossing { level: i64 },
}

impl BellParams {
    /// Validate a >= 0 and phi's level-crossing and structural conditions
    /// (levels checked up to |k| <= 64 by default).
    pub fn validate(&self) -> Result<(), ParamsError> {
        if self.a < 0.0 {
            return Err(ParamsError::NegativeA(self.a));
        }
        self.phi.validate_structure()?;
        match validate_level_crossing(&self.phi, -64, 64)? {
            LevelCrossingVerdict::Accept => Ok(()),
            LevelCrossingVerdict::Reject { level, .. } => {
                Err(ParamsError::LevelCrossing { level })
            }
        }
    }

    /// Componentwise division by n: the convolution n-th root's parameters.
    pub fn divided_by(&self, n: u32) -> BellParams {
        let n = n as f64;
        BellParams {
            a: self.a / n,
            b: self.b / n,
            c: self.c / n,
            phi: self.phi.scale_values(1.0 / n),
        }
    }
}

// ---------------------------------------------------------------------------
// Resolved monotone segments
// ---------------------------------------------------------------------------

/// Base shape of phi on one maximal interval, before the step offset.
#[derive(Debug, Clone, Copy)]
pub(crate) enum SegBase {
    Affine { slope: f64, intercept: f64 },
    /// sign * amplitude * |s|^gamma, where sign = -1 on the left tail.
    Power { amplitude: f64, gamma: f64, sign: f64 },
}

/// phi restricted to one open interval (a, b) where it is monotone:
/// phi(s) = base(s) + offset.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Segment {
    pub(crate) a: f64,
    pub(crate) b: f64,
    pub(crate) base: SegBase,
    pub(crate) offset: f64,
}

impl SegBase {
    pub(crate) fn value(&self, s: f64) -> f64 {
        match *self {
            SegBase::Affine { slope, intercept } => slope * s + intercept,
            SegBase::Power { amplitude, gamma, sign } => sign * amplitude * s.abs().powf(gamma),
        }
    }

    /// Limit value toward +/- infinity (s = +-inf allowed).
    fn limit(&self, s: f64) -> f64 {
        if s.is_finite() {
            return self.value(s);
        }
        match *self {
            SegBase::Affine { slope, intercept } => {
                if slope == 0.0 {
                    intercept
                } else {
                    slope.signum() * s.signum() * f64::INFINITY
                }
            }
            SegBase::Power { amplitude, gamma, sign } => {
                if gamma == 0.0 || amplitude == 0.0 {
                    sign * amplitude
                } else {
                    sign * f64::INFINITY
                }
            }
        }
    }

    fn is_constant(&self) -> bool {
        match *self {
            SegBase::Affine { slope, .. } => slope == 0.0,
            SegBase::Power { amplitude, gamma, .. } => amplitude == 0.0 || gamma == 0.0,
        }
    }
}

impl Segment {
    pub(crate) fn value_at_left(&self) -> f64 {
        self.base.limit(self.a) + self.offset
    }

    pub(crate) fn value_at_right(&self) -> f64 {
        self.base.limit(self.b) + self.offset
    }

    /// Solve base(s) + offset = y inside (a, b); the segment is monotone so
    /// the solution is unique when it exists.
    fn solve(&self, y: f64) -> Option<f64> {
        let t = y - self.offset;
        let s = match self.base {
            SegBase::Affine { slope, intercept } => {
                if slope == 0.0 {
                    return None;
                }
                (t - intercept) / slope
            }
            SegBase::Power { amplitude, gamma, sign } => {
                if amplitude == 0.0 || gamma == 0.0 || t * sign < 0.0 {
                    return None;
                }
                sign * (t * sign / amplitude).powf(1.0 / gamma)
            }
        };
        if s > self.a && s < self.b {
            Some(s)
        } else {
            None
        }
    }
}

impl PhiFunction {
    /// A phi that is identically zero.
    pub fn zero() -> PhiFunction {
        PhiFunction {
            knots: vec![0.0],
            pieces: vec![],
            left_tail: Tail::Constant { value: 0.0 },
            right_tail: Tail::Constant { value: 0.0 },
            steps: vec![],
        }
    }

    /// A single affine law phi(s) = slope * s on the whole line.
    pub fn linear(slope: f64) -> PhiFunction {
        PhiFunction {
            knots: vec![0.0],
            pieces: vec![],
            left_tail: Tail::Affine { slope, intercept: 0.0 },
            right_tail: Tail::Affine { slope, intercept: 0.0 },
            steps: vec![],
        }
    }

    /// A pure step function (phi of a Polya frequency factor).
    pub fn from_steps(steps: Vec<Step>) -> PhiFunction {
        PhiFunction {
            knots: vec![0.0],
            pieces: vec![],
            left_tail: Tail::Constant { value: 0.0 },
            right_tail: Tail::Constant { value: 0.0 },
            steps,
        }
    }

    pub fn validate_structure(&self) -> Result<(), PhiError> {
        for w in self.knots.windows(2) {
            if w[1] <= w[0] {
                return Err(PhiError::KnotsNotIncreasing(w[0], w[1]));
            }
        }
        if !self.knots.contains(&0.0) {
            return Err(PhiError::MissingZeroKnot);
        }
        if self.pieces.len() + 1 != self.knots.len() {
            return Err(PhiError::PieceCountMismatch {
                knots: self.knots.len(),
                pieces: self.pieces.len(),
            });
        }
        for tail in [&self.left_tail, &self.right_tail] {
            if let Tail::Power { amplitude, gamma } = tail {
                if !(0.0..2.0).contains(gamma) {
                    return Err(PhiError::BadTailExponent(*gamma));
                }
                if *amplitude < 0.0 {
                    return Err(PhiError::BadTailAmplitude(*amplitude));
                }
            }
        }
        if self.steps.iter().any(|st| st.location == 0.0) {
            return Err(PhiError::ZeroStepLocation);
        }
        Ok(())
    }

    /// Total step contribution at s.
    fn step_offset(&self, s: f64) -> f64 {
        let mut v = 0.0;
        for st in &self.steps {
            if st.location > 0.0 {
                if s >= st.location {
                    v += st.height;
                }
            } else if s <= st.location {
                v += st.height;
            }
        }
        v
    }

    /// Evaluate phi at s.
    pub fn eval(&self, s: f64) -> f64 {
        let core = if self.knots.is_empty() || s < self.knots[0] {
            match self.left_tail {
                Tail::Constant { value } => value,
                Tail::Affine { slope, intercept } => slope * s + intercept,
                Tail::Power { amplitude, gamma } => -amplitude * s.abs().powf(gamma),
            }
        } else if s >= *self.knots.last().unwrap() {
            match self.right_tail {
                Tail::Constant { value } => value,
                Tail::Affine { slope, intercept } => slope * s + intercept,
                Tail::Power { amplitude, gamma } => amplitude * s.abs().powf(gamma),
            }
        } else {
            let i = self.knots.partition_point(|&k| k <= s) - 1;
            self.pieces[i].slope * s + self.pieces[i].intercept
        };
        core + self.step_offset(s)
    }

    /// Multiply all phi values by `factor` (e.g. phi / n for convolution
    /// roots). Step heights scale too, so the result is generally no longer
    /// integer-stepped.
    pub fn scale_values(&self, factor: f64) -> PhiFunction {
        PhiFunction {
            knots: self.knots.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| AffinePiece { slope: p.slope * factor, intercept: p.intercept * factor })
                .collect(),
            left_tail: scale_tail(&self.left_tail, factor),
            right_tail: scale_tail(&self.right_tail, factor),
            steps: self
                .steps
                .iter()
                .map(|st| Step { location: st.location, height: st.height * factor })
                .collect(),
        }
    }

    /// Replace phi(s) by phi(lambda * s), lambda > 0.
    pub fn rescale_argument(&self, lambda: f64) -> PhiFunction {
        assert!(lambda > 0.0);
        PhiFunction {
            knots: self.knots.iter().map(|k| k / lambda).collect(),
            pieces: self
                .pieces
                .iter()
                .map(|p| AffinePiece { slope: p.slope * lambda, intercept: p.intercept })
                .collect(),
            left_tail: rescale_tail(&self.left_tail, lambda),
            right_tail: rescale_tail(&self.right_tail, lambda),
            steps: self
                .steps
                .iter()
                .map(|st| Step { location: st.location / lambda, height: st.height })
                .collect(),
        }
    }

    /// Break phi into maximal monotone segments covering the real line.
    pub(crate) fn resolve(&self) -> Vec<Segment> {
        // breakpoints: knots and step locations (0 is always a knot)
        let mut bps: Vec<f64> = self.knots.clone();
        for st in &self.steps {
            bps.push(st.location);
        }
        bps.sort_by(|x, y| x.partial_cmp(y).unwrap());
        bps.dedup();

        let (k_lo, k_hi) = (self.knots[0], *self.knots.last().unwrap());
        let base_at = |a: f64, b: f64| -> SegBase {
            // interval (a, b) lies within exactly one core region
            let probe = if a == f64::NEG_INFINITY {
                b - 1.0
            } else if b == f64::INFINITY {
                a + 1.0
            } else {
                0.5 * (a + b)
            };
            if probe < k_lo {
                tail_base(&self.left_tail, -1.0)
            } else if probe >= k_hi {
                tail_base(&self.right_tail, 1.0)
            } else {
                let i = self.knots.partition_point(|&k| k <= probe) - 1;
                SegBase::Affine {
                    slope: self.pieces[i].slope,
                    intercept: self.pieces[i].intercept,
                }
            }
        };

        let mut segs = Vec::new();
        let mut prev = f64::NEG_INFINITY;
        for &bp in bps.iter().chain(std::iter::once(&f64::INFINITY)) {
            if bp > prev {
                let probe = if prev == f64::NEG_INFINITY {
                    bp - 1.0
                } else if bp == f64::INFINITY {
                    prev + 1.0
                } else {
                    0.5 * (prev + bp)
                };
                segs.push(Segment {
                    a: prev,
                    b: bp,
                    base: base_at(prev, bp),
                    offset: self.step_offset(probe),
                });
            }
            prev = bp;
        }
        segs
    }
}

fn scale_tail(t: &Tail, factor: f64) -> Tail {
    match *t {
        Tail::Constant { value } => Tail::Constant { value: value * factor },
        Tail::Affine { slope, intercept } => Tail::Affine {
            slope: slope * factor,
            intercept: intercept * factor,
        },
        Tail::Power { amplitude, gamma } => Tail::Power { amplitude: amplitude * factor, gamma },
    }
}

fn rescale_tail(t: &Tail, lambda: f64) -> Tail {
    match *t {
        Tail::Constant { value } => Tail::Constant { value },
        Tail::Affine { slope, intercept } => Tail::Affine { slope: slope * lambda, intercept },
        Tail::Power { amplitude, gamma } => Tail::Power {
            amplitude: amplitude * lambda.powf(gamma),
            gamma,
        },
    }
}

fn tail_base(t: &Tail, sign: f64) -> SegBase {
    match *t {
        Tail::Constant { value } => SegBase::Affine { slope: 0.0, intercept: value },
        Tail::Affine { slope, intercept } => SegBase::Affine { slope, intercept },
        Tail::Power { amplitude, gamma } => SegBase::Power { amplitude, gamma, sign },
    }
}

// ---------------------------------------------------------------------------
// Level-crossing validation
// ---------------------------------------------------------------------------

fn fsign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Accept iff phi(s) sign(s) >= 0 and, for every integer level k in
/// [k_min, k_max], phi - k has at most one sign change. On reject, returns
/// the level and two points around the second sign change.
pub fn validate_level_crossing(
    phi: &PhiFunction,
    k_min: i64,
    k_max: i64,
) -> Result<LevelCrossingVerdict, PhiError> {
    phi.validate_structure()?;
    let segs = phi.resolve();

    // sign condition: each monotone segment attains its extrema at the ends
    for seg in &segs {
        let (va, vb) = (seg.value_at_left(), seg.value_at_right());
        if seg.b <= 0.0 && (va > 0.0 || vb > 0.0) || seg.a >= 0.0 && (va < 0.0 || vb < 0.0) {
            let w = representative(seg, 0.5);
            return Ok(LevelCrossingVerdict::Reject { level: 0, witnesses: (w, w) });
        }
    }

    for k in k_min..=k_max {
        // signed sequence of phi - k across segments, with representatives
        let mut signs: Vec<(i8, f64)> = Vec::new();
        for seg in &segs {
            let fa = fsign(seg.value_at_left() - k as f64);
            let fb = fsign(seg.value_at_right() - k as f64);
            signs.push((fa, representative(seg, 0.25)));
            if fb != fa {
                signs.push((fb, representative(seg, 0.75)));
            }
        }
        // compress zeros, count strict sign flips
        let mut transitions = 0usize;
        let mut last: Option<(i8, f64)> = None;
        for &(s, rep) in &signs {
            if s == 0 {
                continue;
            }
            if let Some((ls, lrep)) = last {
                if ls != s {
                    transitions += 1;
                    if transitions > 1 {
                        return Ok(LevelCrossingVerdict::Reject {
                            level: k,
                            witnesses: (lrep, rep),
                        });
                    }
                }
            }
            last = Some((s, rep));
        }
    }
    Ok(LevelCrossingVerdict::Accept)
}

/// A finite interior point of a segment, biased toward its left (t = 0.25)
/// or right (t = 0.75) part.
fn representative(seg: &Segment, t: f64) -> f64 {
    if seg.a.is_finite() && seg.b.is_finite() {
        seg.a + t * (seg.b - seg.a)
    } else if seg.a.is_finite() {
        seg.a + 1.0
    } else if seg.b.is_finite() {
        seg.b - 1.0
    } else {
        2.0 * t - 1.0
    }
}

// ---------------------------------------------------------------------------
// Integrability
// ---------------------------------------------------------------------------

/// Evaluate int_{|s| >= 1} |phi(s)| / |s|^3 ds. Affine segments integrate in
/// closed form; power-tail segments use adaptive quadrature. Infinite only
/// when a tail exponent violates gamma < 2 (unreachable for a structurally
/// valid PhiFunction).
pub fn validate_integrability(phi: &PhiFunction) -> Result<IntegrabilityVerdict, PhiError> {
    phi.validate_structure()?;
    let mut total = 0.0;
    for seg in phi.resolve() {
        // clip to |s| >= 1
        for (a, b) in [(seg.a.max(1.0), seg.b), (seg.a, seg.b.min(-1.0))] {
            if a >= b {
                continue;
            }
            let clipped = Segment { a, b, ..seg };
            match clipped.base {
                SegBase::Affine { slope, intercept } => {
                    total += affine_tail_integral(slope, intercept + clipped.offset, a, b);
                }
                SegBase::Power { gamma, .. } => {
                    if gamma >= 2.0 {
                        return Ok(IntegrabilityVerdict::Infinite);
                    }
                    let f = |s: f64| {
                        (clipped.base.value(s) + clipped.offset).abs() / s.abs().powi(3)
                    };
                    let (v, _) = if b == f64::INFINITY {
                        crate::quad::integrate_to_inf(f, a, 1e-12)
                    } else if a == f64::NEG_INFINITY {
                        crate::quad::integrate_from_neg_inf(f, b, 1e-12)
                    } else {
                        crate::quad::integrate(f, a, b, 1e-12)
                    };
                    total += v;
                }
            }
        }
    }
    Ok(IntegrabilityVerdict::Finite(total))
}

/// int_a^b |m s + q| / |s|^3 ds over an interval with |s| >= 1 throughout,
/// in closed form. F(s) = int (m s + q)/s^3 ds = -m/s - q/(2 s^2); the sign
/// of s^3 is constant on the interval, and |m s + q| splits at its root.
fn affine_tail_integral(m: f64, q: f64, a: f64, b: f64) -> f64 {
    let af = |s: f64| {
        if s.is_infinite() {
            0.0
        } else {
            -m / s - q / (2.0 * s * s)
        }
    };
    let piece = |x: f64, y: f64| -> f64 { (af(y) - af(x)).abs() };
    if m != 0.0 {
        let r = -q / m;
        if r > a && r < b {
            return piece(a, r) + piece(r, b);
        }
    }
    piece(a, b)
}

// ---------------------------------------------------------------------------
// Crossing table
// ---------------------------------------------------------------------------

/// For |k| <= k_max, the point where phi - k changes sign (leftmost point of
/// the vanishing interval when non-unique); +inf / -inf when the level is
/// never reached. Assumes phi passes the level-crossing validation.
pub fn crossing_table(phi: &PhiFunction, k_max: u32) -> Result<CrossingTable, PhiError> {
    phi.validate_structure()?;
    let segs = phi.resolve();
    let mut entries = Vec::new();
    for k in -(k_max as i64)..=(k_max as i64) {
        if k == 0 {
            entries.push(CrossingEntry { k, s: 0.0, non_unique: false });
            continue;
        }
        let y = k as f64;
        // phi - k vanishes on a plateau?
        let plateau = segs
            .iter()
            .find(|seg| seg.base.is_constant() && seg.value_at_left() == y && seg.a < seg.b);
        let non_unique = plateau.is_some();
        // leftmost point of a finite-start plateau wins (deterministic
        // convention); a plateau stretching to -inf degenerates, so fall
        // through to the boundary where phi leaves the level.
        if let Some(p) = plateau {
            if p.a.is_finite() {
                entries.push(CrossingEntry { k, s: p.a, non_unique });
                continue;
            }
        }
        let s = if k > 0 {
            // leftmost point where phi >= k
            let mut s = f64::INFINITY;
            for seg in &segs {
                let (va, vb) = (seg.value_at_left(), seg.value_at_right());
                if va >= y {
                    s = seg.a;
                    break;
                }
                if vb >= y {
                    // None means phi jumps past the level at the endpoint
                    s = seg.solve(y).unwrap_or(seg.b);
                    break;
                }
            }
            s
        } else {
            // rightmost point where phi <= k
            let mut s = f64::NEG_INFINITY;
            for seg in segs.iter().rev() {
                let (va, vb) = (seg.value_at_left(), seg.value_at_right());
                if vb <= y {
                    s = seg.b;
                    break;
                }
                if va <= y {
                    s = seg.solve(y).unwrap_or(seg.a);
                    break;
                }
            }
            s
        };
        entries.push(CrossingEntry { k, s, non_unique });
    }
    entries.sort_by_key(|e| e.k);
    Ok(CrossingTable { entries })
}

/// True iff phi is non-decreasing across all pieces, tails and steps; then
/// every multiple n phi also satisfies the level-crossing condition.
pub fn is_ggc(phi: &PhiFunction) -> Result<bool, PhiError> {
    phi.validate_structure()?;
    let segs = phi.resolve();
    let mut prev_right: Option<f64> = None;
    for seg in &segs {
        let (va, vb) = (seg.value_at_left(), seg.value_at_right());
        if vb < va {
            return Ok(false);
        }
        if let Some(pr) = prev_right {
            if va < pr {
                return Ok(false);
            }
        }
        prev_right = Some(vb);
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Heuristic adapter for generic callables
// ---------------------------------------------------------------------------

/// Verdict of the sampling-based validation for callables not expressible as
/// a PhiFunction. Always labelled heuristic.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledVerdict {
    pub accept: bool,
    /// Always true: sampling cannot prove the condition.
    pub heuristic: bool,
    pub rejected_level: Option<i64>,
}

/// Validate the level-crossing condition for an arbitrary callable by
/// sampling on a geometric grid (ratio 1.05, |s| in [1e-6, 1e6]).
pub fn validate_level_crossing_sampled<F: Fn(f64) -> f64>(
    phi: F,
    k_min: i64,
    k_max: i64,
) -> SampledVerdict {
    let mut grid = Vec::new();
    let mut s = 1e-6;
    while s <= 1e6 {
        grid.push(s);
        s *= 1.05;
    }
    let mut full: Vec<f64> = grid.iter().rev().map(|x| -x).collect();
    full.extend(&grid);

    for (i, &x) in full.iter().enumerate() {
        let v = phi(x);
        if v * x.signum() < 0.0 {
            let _ = i;
            return SampledVerdict { accept: false, heuristic: true, rejected_level: Some(0) };
        }
    }
    for k in k_min..=k_max {
        let mut transitions = 0usize;
        let mut last: i8 = 0;
        for &x in &full {
            let s = fsign(phi(x) - k as f64);
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                transitions += 1;
                if transitions > 1 {
                    return SampledVerdict {
                        accept: false,
                        heuristic: true,
                        rejected_level: Some(k),
                    };
                }
            }
            last = s;
        }
    }
    SampledVerdict { accept: true, heuristic: true, rejected_level: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    pub fn cauchy_phi() -> PhiFunction {
        PhiFunction::linear(1.0 / PI)
    }

    pub fn sqrt_phi() -> PhiFunction {
        // (2/pi) sqrt(s) for s > 0, 0 for s < 0
        PhiFunction {
            knots: vec![0.0],
            pieces: vec![],
            left_tail: Tail::Constant { value: 0.0 },
            right_tail: Tail::Power { amplitude: 2.0 / PI, gamma: 0.5 },
            steps: vec![],
        }
    }

    #[test]
    fn linear_phi_accepts() {
        let phi = cauchy_phi();
        assert_eq!(
            validate_level_crossing(&phi, -10, 10).unwrap(),
            LevelCrossingVerdict::Accept
        );
    }

    #[test]
    fn bump_rejects_at_level_one() {
        // phi = 2 on (1, 2), 0 elsewhere for s > 0
        let phi = PhiFunction {
            knots: vec![0.0, 1.0, 2.0],
            pieces: vec![
                AffinePiece { slope: 0.0, intercept: 0.0 },
                AffinePiece { slope: 0.0, intercept: 2.0 },
            ],
            left_tail: Tail::Constant { value: 0.0 },
            right_tail: Tail::Constant { value: 0.0 },
            steps: vec![],
        };
        match validate_level_crossing(&phi, -3, 3).unwrap() {
            LevelCrossingVerdict::Reject { level, witnesses } => {
                assert_eq!(level, 1);
                // second sign change is the down-crossing at s = 2
                assert!(witnesses.0 > 1.0 && witnesses.0 < 2.0);
                assert!(witnesses.1 > 2.0);
            }
            v => panic!("expected reject, got {v:?}"),
        }
    }

    #[test]
    fn power_tail_accepts() {
        assert_eq!(
            validate_level_crossing(&sqrt_phi(), -5, 5).unwrap(),
            LevelCrossingVerdict::Accept
        );
    }

    #[test]
    fn integrability_linear() {
        // int_{|s|>=1} |s/pi| / |s|^3 ds = 2/pi
        match validate_integrability(&cauchy_phi()).unwrap() {
            IntegrabilityVerdict::Finite(v) => assert!((v - 2.0 / PI).abs() < 1e-12),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn integrability_zero_and_sqrt() {
        match validate_integrability(&PhiFunction::zero()).unwrap() {
            IntegrabilityVerdict::Finite(v) => assert_eq!(v, 0.0),
            v => panic!("{v:?}"),
        }
        // (2/pi) int_1^inf s^{-5/2} ds = 4/(3 pi)
        match validate_integrability(&sqrt_phi()).unwrap() {
            IntegrabilityVerdict::Finite(v) => {
                assert!((v - 4.0 / (3.0 * PI)).abs() < 1e-8, "v = {v}");
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn crossing_table_linear() {
        let table = crossing_table(&cauchy_phi(), 3).unwrap();
        for k in [-3i64, -2, -1, 1, 2, 3] {
            let e = table.get(k).unwrap();
            assert!((e.s - k as f64 * PI).abs() < 1e-12, "k = {k}, s = {}", e.s);
            assert!(!e.non_unique);
        }
        assert_eq!(table.get(0).unwrap().s, 0.0);
    }

    #[test]
    fn crossing_table_zero_phi() {
        let table = crossing_table(&PhiFunction::zero(), 2).unwrap();
        assert_eq!(table.get(1).unwrap().s, f64::INFINITY);
        assert_eq!(table.get(2).unwrap().s, f64::INFINITY);
        assert_eq!(table.get(-1).unwrap().s, f64::NEG_INFINITY);
    }

    #[test]
    fn crossing_table_sqrt() {
        // (2/pi) sqrt(s) = k at s = k^2 pi^2 / 4
        let table = crossing_table(&sqrt_phi(), 3).unwrap();
        for k in 1..=3i64 {
            let expect = (k * k) as f64 * PI * PI / 4.0;
            let e = table.get(k).unwrap();
            assert!((e.s - expect).abs() < 1e-9 * expect, "k = {k}, s = {}", e.s);
        }
        assert_eq!(table.get(-1).unwrap().s, f64::NEG_INFINITY);
    }

    #[test]
    fn crossing_table_monotone_in_k() {
        let table = crossing_table(&cauchy_phi(), 5).unwrap();
        for w in table.entries.windows(2) {
            assert!(w[0].s <= w[1].s);
        }
    }

    #[test]
    fn ggc_classification() {
        assert!(is_ggc(&cauchy_phi()).unwrap());
        assert!(is_ggc(&sqrt_phi()).unwrap());
        // a decreasing interior piece that stays within (0, 1): passes
        // level-crossing but is not a GGC
        let dip = PhiFunction {
            knots: vec![0.0, 1.0, 2.0, 3.0],
            pieces: vec![
                AffinePiece { slope: 0.9, intercept: 0.0 },
                AffinePiece { slope: -0.4, intercept: 1.3 },
                AffinePiece { slope: 0.0, intercept: 0.5 },
            ],
            left_tail: Tail::Constant { value: 0.0 },
            right_tail: Tail::Constant { value: 0.5 },
            steps: vec![],
        };
        assert_eq!(
            validate_level_crossing(&dip, -5, 5).unwrap(),
            LevelCrossingVerdict::Accept
        );
        assert!(!is_ggc(&dip).unwrap());
    }

    #[test]
    fn steps_evaluate_and_cross() {
        // unit steps at +-pi: the phi of a two-atom Polya frequency factor
        let phi = PhiFunction::from_steps(vec![
            Step { location: PI, height: 1.0 },
            Step { location: -PI, height: -1.0 },
        ]);
        assert_eq!(phi.eval(0.5), 0.0);
        assert_eq!(phi.eval(4.0), 1.0);
        assert_eq!(phi.eval(-4.0), -1.0);
        assert_eq!(
            validate_level_crossing(&phi, -3, 3).unwrap(),
            LevelCrossingVerdict::Accept
        );
        let table = crossing_table(&phi, 2).unwrap();
        assert!((table.get(1).unwrap().s - PI).abs() < 1e-12);
        assert!((table.get(-1).unwrap().s + PI).abs() < 1e-12);
        assert_eq!(table.get(2).unwrap().s, f64::INFINITY);
    }

    #[test]
    fn rescaling_preserves_acceptance() {
        let phi = cauchy_phi();
        for lambda in [0.1, 2.0, 17.5] {
            let scaled = phi.rescale_argument(lambda);
            assert_eq!(
                validate_level_crossing(&scaled, -5, 5).unwrap(),
                LevelCrossingVerdict::Accept
            );
            // crossing points scale by 1/lambda
            let t = crossing_table(&scaled, 2).unwrap();
            assert!((t.get(1).unwrap().s - PI / lambda).abs() < 1e-9);
        }
    }

    #[test]
    fn sampled_adapter_agrees() {
        let v = validate_level_crossing_sampled(|s: f64| s / PI, -5, 5);
        assert!(v.accept && v.heuristic);
        // double-crossing callable rejected
        let v = validate_level_crossing_sampled(
            |s: f64| if s > 1.0 && s < 2.0 { 2.0 } else { 0.0 },
            -3,
            3,
        );
        assert!(!v.accept);
        assert_eq!(v.rejected_level, Some(1));
    }

    #[test]
    fn structural_errors() {
        let bad = PhiFunction {
            knots: vec![1.0, 0.0],
            pieces: vec![AffinePiece { slope: 0.0, intercept: 0.0 }],
            left_tail: Tail::Constant { value: 0.0 },
            right_tail: Tail::Constant { value: 0.0 },
            steps: vec![],
        };
        assert!(matches!(bad.validate_structure(), Err(PhiError::KnotsNotIncreasing(..))));
        let no_zero = PhiFunction {
            knots: vec![1.0, 2.0],
            pieces: vec![AffinePiece { slope: 0.0, intercept: 0.0 }],
            left_tail: Tail::Constant { value: 0.0 },
            right_tail: Tail::Constant { value: 0.0 },
            steps: vec![],
        };
        assert!(matches!(no_zero.validate_structure(), Err(PhiError::MissingZeroKnot)));
    }

    #[test]
    fn json_schema_roundtrip() {
        let phi = PhiFunction {
            knots: vec![-1.0, 0.0, 1.0],
            pieces: vec![
                AffinePiece { slope: 0.5, intercept: 0.0 },
                AffinePiece { slope: 0.25, intercept: 0.0 },
            ],
            left_tail: Tail::Affine { slope: 0.5, intercept: 0.0 },
            right_tail: Tail::Power { amplitude: 0.25, gamma: 1.0 },
            steps: vec![],
        };
        let json = serde_json::to_string(&phi).unwrap();
        assert!(json.contains("\"knots\""));
        assert!(json.contains("\"pieces\""));
        assert!(json.contains("\"slope\""));
        assert!(json.contains("\"intercept\""));
        assert!(json.contains("\"left_tail\""));
        assert!(json.contains("\"right_tail\""));
        let back: PhiFunction = serde_json::from_str(&json).unwrap();
        assert_eq!(back, phi);
    }
}
