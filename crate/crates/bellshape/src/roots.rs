//! Certified real-root isolation for integer polynomials.
//!
//! Descartes-rule bisection (Vincent-Collins-Akritas) on the square-free part,
//! with dyadic interval endpoints so every sign evaluation is exact integer
//! arithmetic. Each returned enclosure contains exactly one distinct real root;
//! the `crossing` flag records whether the original polynomial changes sign
//! there (odd multiplicity) or merely touches zero.

use crate::poly::{IntPoly, Poly};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Dyadic rational num * 2^exp.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dyadic {
    pub num: BigInt,
    pub exp: i64,
}

impl Dyadic {
    pub fn new(num: BigInt, exp: i64) -> Self {
        Dyadic { num, exp }
    }

    pub fn zero() -> Self {
        Dyadic::new(BigInt::zero(), 0)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.num << self.exp as usize)
        } else {
            BigRational::new(self.num.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    pub fn to_f64(&self) -> f64 {
        crate::poly::rational_to_f64(&self.to_rational())
    }

    /// Rewrite both operands to a common exponent and add.
    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let e = self.exp.min(other.exp);
        let a = &self.num << (self.exp - e) as usize;
        let b = &other.num << (other.exp - e) as usize;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        let e = self.exp.min(other.exp);
        let a = &self.num << (self.exp - e) as usize;
        let b = &other.num << (other.exp - e) as usize;
        Dyadic::new(a - b, e)
    }

    pub fn half_sum(&self, other: &Dyadic) -> Dyadic {
        let s = self.add(other);
        Dyadic::new(s.num, s.exp - 1)
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic::new(-&self.num, self.exp)
    }

    /// Sign of p at this point, exactly.
    pub fn sign_of(&self, p: &IntPoly) -> i8 {
        if self.exp >= 0 {
            p.sign_at_dyadic(&(&self.num << self.exp as usize), 0)
        } else {
            p.sign_at_dyadic(&self.num, (-self.exp) as u32)
        }
    }
}

/// One isolated distinct real root. `lo == hi` means the root is this exact
/// dyadic point.
#[derive(Debug, Clone)]
pub struct RootEnclosure {
    pub lo: Dyadic,
    pub hi: Dyadic,
    /// The original (possibly non-square-free) polynomial changes sign here.
    pub crossing: bool,
}

impl RootEnclosure {
    pub fn midpoint_f64(&self) -> f64 {
        self.lo.half_sum(&self.hi).to_f64()
    }

    pub fn width_f64(&self) -> f64 {
        self.hi.sub(&self.lo).to_f64()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    RealLine,
    /// Open half-line (0, inf).
    PositiveHalfLine,
    /// Open interval (0, 1); roots at the endpoints are discarded.
    UnitInterval,
}

#[derive(Debug, thiserror::Error)]
pub enum RootError {
    #[error("cannot isolate roots of the zero polynomial")]
    ZeroPolynomial,
}

/// Isolate all distinct real roots of `p` in `domain`, refining each
/// enclosure to width at most `width`.
pub fn isolate_roots(
    p: &IntPoly,
    domain: Domain,
    width: f64,
) -> Result<Vec<RootEnclosure>, RootError> {
    if p.is_zero() {
        return Err(RootError::ZeroPolynomial);
    }
    if p.degree() == 0 {
        return Ok(vec![]);
    }

    let (stripped, zero_mult) = p.strip_zero_roots();
    let mut sf = squarefree_part(&stripped);

    let mut out: Vec<RootEnclosure> = Vec::new();

    match domain {
        Domain::RealLine => {
            if zero_mult > 0 {
                out.push(RootEnclosure {
                    lo: Dyadic::zero(),
                    hi: Dyadic::zero(),
                    crossing: zero_mult % 2 == 1,
                });
            }
            let s = sf.root_bound_pow2();
            let pos = isolate_open_01(&sf.compose_int_scale(&(BigInt::one() << s)), s as i64);
            let neg_poly = sf.compose_neg();
            let sneg = neg_poly.root_bound_pow2();
            let neg = isolate_open_01(&neg_poly.compose_int_scale(&(BigInt::one() << sneg)), sneg as i64);
            for iv in neg {
                out.push(finish(&stripped, mirror(iv), width));
            }
            for iv in pos {
                out.push(finish(&stripped, iv, width));
            }
        }
        Domain::PositiveHalfLine => {
            let s = sf.root_bound_pow2();
            let pos = isolate_open_01(&sf.compose_int_scale(&(BigInt::one() << s)), s as i64);
            for iv in pos {
                out.push(finish(&stripped, iv, width));
            }
        }
        Domain::UnitInterval => {
            // strip roots at u = 1 (domain boundary)
            let one = BigRational::one();
            while sf.eval(&one).is_zero() {
                sf = divide_linear(&sf, 1);
            }
            let ivs = isolate_open_01(&sf, 0);
            for iv in ivs {
                out.push(finish(&stripped, iv, width));
            }
        }
    }

    out.sort_by(|a, b| a.lo.to_rational().cmp(&b.lo.to_rational()));
    Ok(out)
}

/// Raw isolating interval, before refinement. `local` is the bisection-box
/// polynomial mapped so its unique root in (0, 1) corresponds to the root in
/// (lo, hi) under u -> lo + u (hi - lo). Roots at the box boundary (exact
/// split-point hits elsewhere in the tree) have been divided out of `local`,
/// so unlike the global square-free polynomial it is nonzero at u = 0 and
/// u = 1; refinement must bisect with `local` for its endpoint signs to be
/// trustworthy.
struct RawInterval {
    lo: Dyadic,
    hi: Dyadic,
    exact: bool,
    local: IntPoly,
}

fn mirror(iv: RawInterval) -> RawInterval {
    RawInterval {
        lo: iv.hi.neg(),
        hi: iv.lo.neg(),
        exact: iv.exact,
        // reorient: u -> t(1 - u)
        local: iv.local.shift_one().compose_neg(),
    }
}

/// Descartes upper bound for the number of roots of t in (0, 1).
fn descartes_01(t: &IntPoly) -> usize {
    t.reverse().shift_one().sign_variations()
}

/// Isolate roots of the square-free polynomial `t0` in the open interval
/// (0, 2^scale_exp); `t0` is already mapped so its (0,1) roots are the
/// targets, and intervals are rescaled by 2^scale_exp on output.
fn isolate_open_01(t0: &IntPoly, scale_exp: i64) -> Vec<RawInterval> {
    let mut out = Vec::new();
    // (polynomial mapped to (0,1), interval lo, interval log2-width)
    let mut stack: Vec<(IntPoly, Dyadic, i64)> = vec![(
        t0.clone(),
        Dyadic::new(BigInt::zero(), 0),
        scale_exp,
    )];
    while let Some((t, lo, wexp)) = stack.pop() {
        match descartes_01(&t) {
            0 => {}
            1 => {
                let hi = lo.add(&Dyadic::new(BigInt::one(), wexp));
                out.push(RawInterval { lo, hi, exact: false, local: t });
            }
            _ => {
                let left = t.half_scale();
                let mut right = left.shift_one();
                let mid = lo.add(&Dyadic::new(BigInt::one(), wexp - 1));
                if right.coeffs()[0].is_zero() {
                    // exact root at the split point
                    out.push(RawInterval {
                        lo: mid.clone(),
                        hi: mid.clone(),
                        exact: true,
                        local: IntPoly::new(vec![]),
                    });
                    let (r2, _) = right.strip_zero_roots();
                    right = r2;
                    stack.push((divide_linear(&left, 1), lo, wexp - 1));
                } else {
                    stack.push((left, lo, wexp - 1));
                }
                stack.push((right, mid, wexp - 1));
            }
        }
    }
    out
}

/// Exact synthetic division of p by (x - r) for integer root r in {1}.
/// Panics if r is not a root.
fn divide_linear(p: &IntPoly, r: i64) -> IntPoly {
    let c = p.coeffs();
    let n = c.len();
    let mut out = vec![BigInt::zero(); n - 1];
    let mut acc = BigInt::zero();
    let rb = BigInt::from(r);
    for i in (1..n).rev() {
        acc = &acc * &rb + &c[i];
        out[i - 1] = acc.clone();
    }
    debug_assert!((&acc * &rb + &c[0]).is_zero(), "not a root");
    IntPoly::new(out)
}

/// Refine a raw interval by bisecting its local box polynomial, then classify
/// the sign behaviour of the original polynomial across the enclosed root.
fn finish(original: &IntPoly, iv: RawInterval, width: f64) -> RootEnclosure {
    if iv.exact {
        return exact_enclosure(original, iv.lo);
    }

    let mut t = iv.local;
    let mut lo = iv.lo;
    let mut hi = iv.hi;
    // The local polynomial is nonzero at the box boundary and has exactly one
    // (simple) root inside, so its endpoint values bracket with a sign change.
    let mut s0 = sign_of_bigint(&t.coeffs()[0]);
    debug_assert!(s0 != 0, "box polynomial vanishes at the boundary");
    while hi.sub(&lo).to_f64() > width {
        let left = t.half_scale();
        let right = left.shift_one();
        let mid = lo.half_sum(&hi);
        let sm = sign_of_bigint(&right.coeffs()[0]);
        if sm == 0 {
            return exact_enclosure(original, mid);
        }
        if sm == s0 {
            // no sign change on the left half; the root is on the right
            t = right;
            lo = mid;
            s0 = sm;
        } else {
            t = left;
            hi = mid;
        }
    }
    // The refined endpoints sit strictly between this root and its neighbours
    // (enclosure width is far below the root separation), so the original
    // polynomial has a definite sign at each.
    let ol = lo.sign_of(original);
    let or = hi.sign_of(original);
    debug_assert!(ol != 0 && or != 0, "enclosure endpoint landed on a root");
    RootEnclosure {
        lo,
        hi,
        crossing: ol != or,
    }
}

fn exact_enclosure(original: &IntPoly, point: Dyadic) -> RootEnclosure {
    // The root is a known rational point: its multiplicity in the original
    // polynomial decides crossing vs touch.
    let r = point.to_rational();
    let mult = rational_root_multiplicity(original, &r);
    RootEnclosure {
        lo: point.clone(),
        hi: point,
        crossing: mult % 2 == 1,
    }
}

fn sign_of_bigint(x: &BigInt) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Multiplicity of a known rational root.
fn rational_root_multiplicity(p: &IntPoly, r: &BigRational) -> usize {
    let mut cur = p.to_rational_poly();
    let mut mult = 0;
    while cur.eval(r).is_zero() && cur.degree() > 0 {
        // synthetic division by (x - r)
        let c = cur.coeffs();
        let n = c.len();
        let mut out = vec![BigRational::zero(); n - 1];
        let mut acc = BigRational::zero();
        for i in (1..n).rev() {
            acc = &acc * r + &c[i];
            out[i - 1] = acc.clone();
        }
        cur = Poly::new(out);
        mult += 1;
    }
    mult
}

/// Square-free part of an integer polynomial. Fast certified check first;
/// exact gcd fallback only when the modular test is inconclusive.
pub fn squarefree_part(p: &IntPoly) -> IntPoly {
    if p.degree() <= 1 || p.certified_squarefree() {
        return p.clone();
    }
    let pr = p.to_rational_poly();
    let g = rational_gcd(&pr, &pr.derivative());
    if g.degree() == 0 {
        return p.clone();
    }
    let (q, r) = rational_divmod(&pr, &g);
    debug_assert!(r.is_zero());
    q.primitive_int()
}

fn rational_divmod(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let mut rem = a.clone();
    let db = b.degree();
    let lead = b.coeffs()[db].clone();
    let mut q = vec![BigRational::zero(); a.degree().saturating_sub(db) + 1];
    while !rem.is_zero() && rem.degree() >= db {
        let dr = rem.degree();
        let c = &rem.coeffs()[dr] / &lead;
        q[dr - db] = c.clone();
        let sub = b.scale(&c).mul_xpow(dr - db);
        rem = &rem - &sub;
        if rem.degree() == dr && !rem.is_zero() {
            // leading term must have cancelled; force-truncate
            let mut cs = rem.coeffs().to_vec();
            cs.truncate(dr);
            rem = Poly::new(cs);
        }
    }
    (Poly::new(q), rem)
}

fn rational_gcd(a: &Poly, b: &Poly) -> Poly {
    let mut f = a.clone();
    let mut g = b.clone();
    while !g.is_zero() {
        let (_, r) = rational_divmod(&f, &g);
        f = g;
        g = r;
    }
    // monic normalisation
    let lead = f.coeffs()[f.degree()].clone();
    if lead.is_zero() || lead.is_one() {
        f
    } else {
        f.scale(&lead.recip())
    }
}
