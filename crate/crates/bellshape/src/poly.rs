//! Dense univariate polynomials with exact rational coefficients.
//!
//! Everything downstream that needs certified sign information (derivative
//! recurrences, root isolation, whale certificates) is built on this type.
//! Coefficients are `BigRational`, stored in increasing degree order.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::ops::{Add, Mul, Neg, Sub};

/// Dense polynomial over Q, coefficients in increasing degree order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigRational::zero());
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly::new(vec![])
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial x.
    pub fn x() -> Self {
        Poly::new(vec![BigRational::zero(), BigRational::one()])
    }

    /// Build from integer coefficients, increasing degree.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + rational_to_f64(c);
        }
        acc
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// self(x) * x^k
    pub fn mul_xpow(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![BigRational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly::new(coeffs)
    }

    /// Substitute x -> c*x.
    pub fn compose_scale(&self, c: &BigRational) -> Poly {
        let mut pow = BigRational::one();
        Poly::new(
            self.coeffs
                .iter()
                .map(|a| {
                    let r = a * &pow;
                    pow = &pow * c;
                    r
                })
                .collect(),
        )
    }

    /// Substitute x -> -x.
    pub fn compose_neg(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, a)| if i % 2 == 1 { -a } else { a.clone() })
                .collect(),
        )
    }

    /// Clear denominators and content: the primitive integer polynomial with
    /// the same roots and the same sign as `self` (positive scaling only).
    pub fn primitive_int(&self) -> IntPoly {
        use num_integer::Integer;
        let mut denom_lcm = BigInt::one();
        for c in &self.coeffs {
            denom_lcm = denom_lcm.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&denom_lcm / c.denom()))
            .collect();
        let mut content = BigInt::zero();
        for c in &ints {
            content = content.gcd(c);
        }
        if content.is_zero() {
            content = BigInt::one();
        }
        IntPoly::new(ints.into_iter().map(|c| c / &content).collect())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero);
            let b = rhs.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero);
            out.push(a + b);
        }
        Poly::new(out)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Poly::new(out)
    }
}

/// Integer-coefficient polynomial used by the root isolation engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        IntPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn derivative(&self) -> IntPoly {
        if self.coeffs.len() == 1 {
            return IntPoly::new(vec![]);
        }
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// Sign of self at a dyadic point num/2^k, without building rationals.
    /// Evaluates sum c_i num^i 2^(k(d-i)), whose sign equals sign(p(num/2^k)).
    pub fn sign_at_dyadic(&self, num: &BigInt, k: u32) -> i8 {
        let d = self.degree();
        let mut acc = BigInt::zero();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            // Horner on the scaled polynomial: acc = acc*num + c*2^(k*(d-i))
            acc = acc * num + (c << (k as usize * (d - i)));
            if i == 0 {
                break;
            }
        }
        match acc.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Number of sign variations in the coefficient sequence (Descartes).
    pub fn sign_variations(&self) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for c in &self.coeffs {
            let s = match c.sign() {
                Sign::Minus => -1,
                Sign::NoSign => 0,
                Sign::Plus => 1,
            };
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    /// Taylor shift: p(x + 1), via repeated synthetic division.
    pub fn shift_one(&self) -> IntPoly {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let (lo, hi) = c.split_at_mut(j + 1);
                lo[j] += &hi[0];
            }
        }
        IntPoly::new(c)
    }

    /// p(x / 2), scaled by 2^deg to stay integral: 2^d p(x/2).
    pub fn half_scale(&self) -> IntPoly {
        let d = self.degree();
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c << (d - i))
                .collect(),
        )
    }

    /// Reverse coefficients: x^d p(1/x).
    pub fn reverse(&self) -> IntPoly {
        let mut c = self.coeffs.clone();
        c.reverse();
        IntPoly::new(c)
    }

    /// Substitute x -> c*x for integer c (used with powers of two).
    pub fn compose_int_scale(&self, c: &BigInt) -> IntPoly {
        let mut pow = BigInt::one();
        IntPoly::new(
            self.coeffs
                .iter()
                .map(|a| {
                    let r = a * &pow;
                    pow = &pow * c;
                    r
                })
                .collect(),
        )
    }

    /// Substitute x -> -x.
    pub fn compose_neg(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, a)| if i % 2 == 1 { -a } else { a.clone() })
                .collect(),
        )
    }

    /// Strip a factor x^k; returns (reduced polynomial, k).
    pub fn strip_zero_roots(&self) -> (IntPoly, usize) {
        let k = self
            .coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(0);
        (IntPoly::new(self.coeffs[k..].to_vec()), k)
    }

    /// Cauchy root bound rounded up to a power of two.
    pub fn root_bound_pow2(&self) -> u32 {
        let lead = self.coeffs.last().expect("nonempty").magnitude();
        let max_bits = self
            .coeffs
            .iter()
            .take(self.coeffs.len() - 1)
            .map(|c| c.magnitude().bits())
            .max()
            .unwrap_or(0);
        if max_bits == 0 {
            return 1;
        }
        let lead_bits = lead.bits();
        // |root| <= 1 + max|c_i|/|c_d| <= 2^(max_bits - lead_bits + 2)
        let shift = (max_bits as i64 - lead_bits as i64 + 2).max(1);
        shift.min(1 << 20) as u32
    }

    pub fn to_rational_poly(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }

    /// Reduce coefficients modulo a u64 prime.
    fn mod_prime(&self, p: u64) -> Vec<u64> {
        let bp = BigInt::from(p);
        let mut v: Vec<u64> = self
            .coeffs
            .iter()
            .map(|c| {
                let m = ((c % &bp) + &bp) % &bp;
                m.try_into().unwrap_or(0u64)
            })
            .collect();
        while v.len() > 1 && *v.last().unwrap() == 0 {
            v.pop();
        }
        v
    }

    /// True when the polynomial is certified square-free: gcd(p, p') = 1
    /// modulo some prime that does not drop the leading coefficient.
    /// A `false` answer is inconclusive.
    pub fn certified_squarefree(&self) -> bool {
        const PRIMES: [u64; 3] = [4611686018427388039, 2305843009213693951, 4611686018427387847];
        let dp = self.derivative();
        if dp.is_zero() {
            return self.degree() == 0;
        }
        for p in PRIMES {
            let a = self.mod_prime(p);
            let b = dp.mod_prime(p);
            if a.len() != self.coeffs.len() || b.len() != dp.coeffs.len() {
                continue; // bad prime: degree dropped
            }
            if gcd_mod_is_constant(&a, &b, p) {
                return true;
            }
        }
        false
    }
}

fn mod_mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, p);
        }
        base = mod_mul(base, base, p);
        exp >>= 1;
    }
    acc
}

fn gcd_mod_is_constant(a: &[u64], b: &[u64], p: u64) -> bool {
    let mut f = a.to_vec();
    let mut g = b.to_vec();
    loop {
        if g.len() == 1 {
            return g[0] != 0;
        }
        // f mod g over Z_p
        let inv_lead = mod_pow(g[g.len() - 1], p - 2, p);
        while f.len() >= g.len() {
            let k = f.len() - g.len();
            let c = mod_mul(*f.last().unwrap(), inv_lead, p);
            if c != 0 {
                for (i, gc) in g.iter().enumerate() {
                    let t = mod_mul(c, *gc, p);
                    f[k + i] = (f[k + i] + p - t) % p;
                }
            }
            while f.len() > 1 && *f.last().unwrap() == 0 {
                f.pop();
            }
            if f.len() == 1 && f[0] == 0 {
                return false; // g divides f: gcd has positive degree
            }
            if f.len() < g.len() {
                break;
            }
        }
        std::mem::swap(&mut f, &mut g);
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    let (sign, log2) = rational_sign_log2(r);
    sign as f64 * log2.exp2()
}

/// Decompose a rational into (sign, log2 |r|). Stable for values far outside
/// the f64 range; log2 of zero is -inf.
pub fn rational_sign_log2(r: &BigRational) -> (i8, f64) {
    let n = r.numer();
    let d = r.denom();
    if n.is_zero() {
        return (0, f64::NEG_INFINITY);
    }
    let sign = if n.is_negative() { -1 } else { 1 };
    (sign, bigint_log2(n.magnitude()) - bigint_log2(d.magnitude()))
}

fn bigint_log2(n: &num_bigint::BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 52 {
        let v: u64 = n.try_into().expect("fits");
        return (v as f64).log2();
    }
    let shift = bits - 52;
    let top: u64 = (n >> shift).try_into().expect("52 bits fit");
    (top as f64).log2() + shift as f64
}
