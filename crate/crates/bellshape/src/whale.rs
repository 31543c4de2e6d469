//! Whale-shaped functions: convolutions of exponential factors with a
//! finite-atom completely monotone part.
//!
//! A convolution of m exponential densities with a completely monotone
//! function has n-th derivatives changing sign exactly min{n, m} times. With
//! distinct rates the convolution collapses, by partial fractions of its
//! Laplace transform, to an exact exponential sum sum_i c_i e^{-lambda_i x}
//! on (0, inf). Substituting t = e^{-x/L} (L clearing the rate denominators)
//! turns each derivative into an integer polynomial on (0, 1), so the sign
//! changes are counted by certified root isolation and the zeros refined to
//! full double precision.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::poly::{IntPoly, Poly};
use crate::roots::{self, Domain, Dyadic, RootError};

/// Convolution specification: m exponential factor rates and the atoms
/// (location, mass) of the completely monotone part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhaleSpec {
    pub rates: Vec<f64>,
    pub cm_atoms: Vec<(f64, f64)>,
}

#[derive(Debug, thiserror::Error)]
pub enum WhaleError {
    #[error("the completely monotone part needs at least one atom")]
    EmptyCmPart,
    #[error("rates and atom locations must be positive, masses positive")]
    NonPositiveInput,
    #[error("rates must be distinct from each other and from the atom locations")]
    CoincidingRates,
    #[error("rates need a common denominator with max scaled rate <= {cap}")]
    RatesTooFine { cap: u64 },
    #[error(transparent)]
    Root(#[from] RootError),
}

/// Exact exponential sum sum_i c_i e^{-lambda_i x} on (0, inf).
#[derive(Debug, Clone, PartialEq)]
pub struct ExpSum {
    /// (coefficient, rate) sorted by increasing rate; rates distinct.
    pub terms: Vec<(BigRational, BigRational)>,
}

impl ExpSum {
    pub fn eval(&self, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|(c, l)| to_f64(c) * (-to_f64(l) * x).exp())
            .sum()
    }

    /// Fourier transform sum_i c_i / (lambda_i + i xi).
    pub fn transform(&self, xi: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(c, l)| to_f64(c) / Complex64::new(to_f64(l), xi))
            .sum()
    }

    pub fn mass(&self) -> f64 {
        self.terms.iter().map(|(c, l)| to_f64(c) / to_f64(l)).sum()
    }

    /// Exact sum c_i lambda_i^j — the j-th derivative at 0+ is
    /// (-1)^j times this.
    pub fn moment_at_zero(&self, j: u32) -> BigRational {
        let mut acc = BigRational::zero();
        for (c, l) in &self.terms {
            let mut p = BigRational::one();
            for _ in 0..j {
                p *= l;
            }
            acc += c * &p;
        }
        acc
    }
}

fn to_f64(r: &BigRational) -> f64 {
    crate::poly::rational_to_f64(r)
}

/// Build the exponential-sum density of the convolution by partial fractions
/// of the product transform.
pub fn whale_build(spec: &WhaleSpec) -> Result<ExpSum, WhaleError> {
    if spec.cm_atoms.is_empty() {
        return Err(WhaleError::EmptyCmPart);
    }
    if spec.rates.iter().any(|&r| !(r > 0.0))
        || spec.cm_atoms.iter().any(|&(l, w)| !(l > 0.0) || !(w > 0.0))
    {
        return Err(WhaleError::NonPositiveInput);
    }
    let rates: Vec<BigRational> = spec
        .rates
        .iter()
        .map(|&r| BigRational::from_f64(r).expect("finite rate"))
        .collect();
    let atoms: Vec<(BigRational, BigRational)> = spec
        .cm_atoms
        .iter()
        .map(|&(l, w)| {
            (
                BigRational::from_f64(l).expect("finite location"),
                BigRational::from_f64(w).expect("finite mass"),
            )
        })
        .collect();

    // all pole locations must be pairwise distinct
    let mut poles: Vec<BigRational> = rates.clone();
    poles.extend(atoms.iter().map(|(l, _)| l.clone()));
    for i in 0..poles.len() {
        for j in i + 1..poles.len() {
            if poles[i] == poles[j] {
                return Err(WhaleError::CoincidingRates);
            }
        }
    }

    // transform N(s)/D(s): D = prod (s + r_j) prod (s + l_i),
    // N = (prod r_j) * sum_i w_i prod_{i' != i} (s + l_{i'})
    let linear = |a: &BigRational| Poly::new(vec![a.clone(), BigRational::one()]);
    let mut den = Poly::one();
    for p in &poles {
        den = &den * &linear(p);
    }
    let mut num = Poly::zero();
    for (i, (_, w)) in atoms.iter().enumerate() {
        let mut term = Poly::constant(w.clone());
        for (i2, (l2, _)) in atoms.iter().enumerate() {
            if i2 != i {
                term = &term * &linear(l2);
            }
        }
        num = &num + &term;
    }
    let rate_product = rates.iter().fold(BigRational::one(), |a, r| a * r);
    num = num.scale(&rate_product);

    // residues c = N(-mu) / D'(-mu) at each pole -mu
    let dprime = den.derivative();
    let mut terms: Vec<(BigRational, BigRational)> = poles
        .iter()
        .map(|mu| {
            let at = -mu.clone();
            (num.eval(&at) / dprime.eval(&at), mu.clone())
        })
        .collect();
    terms.sort_by(|a, b| a.1.cmp(&b.1));
    Ok(ExpSum { terms })
}

/// Certified sign-change counts and zero locations of the derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhaleCertificate {
    pub m: u32,
    pub n_max: u32,
    /// counts[n] = certified sign changes of f^(n) on (0, inf).
    pub counts: Vec<usize>,
    /// zeros[n] = refined sign-change locations, sorted.
    pub zeros: Vec<Vec<f64>>,
    /// true iff counts[n] = min{n, m} for every n and the first m
    /// derivatives vanish exactly at 0+.
    pub consistent: bool,
}

/// Count sign changes of every f^(n), n <= n_max, and check the whale
/// profile min{n, m} together with exact boundary flatness at 0+.
pub fn whale_certify(
    f: &ExpSum,
    m: u32,
    n_max: u32,
) -> Result<WhaleCertificate, WhaleError> {
    // common denominator L of the rates; exponents N_i = lambda_i L
    let mut l_common = BigInt::one();
    for (_, l) in &f.terms {
        l_common = l_common.lcm(l.denom());
    }
    let exponents: Vec<BigInt> = f
        .terms
        .iter()
        .map(|(_, l)| (l * BigRational::from_integer(l_common.clone())).to_integer())
        .collect();
    const EXP_CAP: u64 = 20_000;
    let max_exp = exponents.iter().max().cloned().unwrap_or_default();
    if max_exp > BigInt::from(EXP_CAP) {
        return Err(WhaleError::RatesTooFine { cap: EXP_CAP });
    }
    let l_f64 = l_common.to_f64().expect("small common denominator");

    let mut counts = Vec::new();
    let mut zeros = Vec::new();
    let mut consistent = true;
    for n in 0..=n_max {
        // f^(n)(x) = sum c_i (-lambda_i)^n e^{-lambda_i x}; in u = e^{-x/L}
        // this is sum a_i u^{N_i} on (0, 1)
        let mut coeffs =
            vec![BigRational::zero(); max_exp.to_usize().unwrap_or(0) + 1];
        for ((c, l), e) in f.terms.iter().zip(&exponents) {
            let mut a = c.clone();
            for _ in 0..n {
                a *= -l.clone();
            }
            coeffs[e.to_usize().expect("capped exponent")] += a;
        }
        let poly = Poly::new(coeffs).primitive_int();
        let encl = roots::isolate_roots(&poly, Domain::UnitInterval, 1e-3)?;
        let mut xs: Vec<f64> = encl
            .iter()
            .filter(|e| e.crossing)
            .map(|e| -l_f64 * refine_log(&poly, &e.lo, &e.hi))
            .collect();
        xs.sort_by(f64::total_cmp);
        if xs.len() != n.min(m) as usize {
            consistent = false;
        }
        counts.push(xs.len());
        zeros.push(xs);
    }

    // boundary flatness: f^(j)(0+) = 0 exactly for j < m
    for j in 0..m {
        if !f.moment_at_zero(j).is_zero() {
            consistent = false;
        }
    }
    Ok(WhaleCertificate { m, n_max, counts, zeros, consistent })
}

/// Bisect the enclosure down to full relative precision and return ln(u) of
/// the root, computed from the dyadic parts so that u far below the double
/// underflow threshold still yields an accurate logarithm.
fn refine_log(p: &IntPoly, lo0: &Dyadic, hi0: &Dyadic) -> f64 {
    let mut lo = lo0.clone();
    let mut hi = hi0.clone();
    let mut s_lo = lo.sign_of(p);
    if s_lo == 0 {
        return ln_dyadic(&lo);
    }
    for _ in 0..300 {
        let ln_lo = ln_dyadic(&lo);
        let ln_hi = ln_dyadic(&hi);
        if (ln_hi - ln_lo).abs() < 1e-13 {
            break;
        }
        let mid = lo.half_sum(&hi);
        let s_mid = mid.sign_of(p);
        if s_mid == 0 {
            return ln_dyadic(&mid);
        }
        if s_mid == s_lo {
            s_lo = s_mid;
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (ln_dyadic(&lo) + ln_dyadic(&hi))
}

/// ln of a positive dyadic num * 2^exp without converting the value itself
/// to f64 (it may underflow).
fn ln_dyadic(d: &Dyadic) -> f64 {
    if d.num.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = d.num.bits();
    debug_assert!(d.num.is_positive(), "unit-interval roots are positive");
    let (top, shift) = if bits > 53 {
        ((&d.num >> (bits - 53)).to_f64().unwrap(), bits - 53)
    } else {
        (d.num.to_f64().unwrap(), 0)
    };
    top.ln() + (shift as f64 + d.exp as f64) * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn single_exp_conv() -> ExpSum {
        // m = 1, rate 1, cm part delta_2: f = e^{-x} - e^{-2x}
        whale_build(&WhaleSpec { rates: vec![1.0], cm_atoms: vec![(2.0, 1.0)] }).unwrap()
    }

    #[test]
    fn single_factor_partial_fractions() {
        let f = single_exp_conv();
        assert_eq!(f.terms.len(), 2);
        assert_eq!(to_f64(&f.terms[0].0), 1.0);
        assert_eq!(to_f64(&f.terms[1].0), -1.0);
        for x in [0.1, 1.0, 3.0] {
            assert_abs_diff_eq!(f.eval(x), (-x).exp() - (-2.0 * x).exp(), epsilon = 1e-14);
        }
    }

    #[test]
    fn pure_cm_part_passthrough() {
        let f = whale_build(&WhaleSpec { rates: vec![], cm_atoms: vec![(1.0, 1.0)] }).unwrap();
        assert_eq!(f.terms.len(), 1);
        assert_abs_diff_eq!(f.eval(1.0), (-1.0f64).exp(), epsilon = 1e-15);
        let cert = whale_certify(&f, 0, 8).unwrap();
        assert!(cert.consistent);
        assert!(cert.counts.iter().all(|&c| c == 0));
    }

    #[test]
    fn order_one_profile_and_log2_zeros() {
        let f = single_exp_conv();
        let cert = whale_certify(&f, 1, 10).unwrap();
        assert!(cert.consistent);
        for (n, c) in cert.counts.iter().enumerate() {
            assert_eq!(*c, n.min(1));
        }
        // the single zero of f^(n) sits exactly at n ln 2
        for n in 1..=10 {
            assert_eq!(cert.zeros[n].len(), 1);
            assert_abs_diff_eq!(
                cert.zeros[n][0],
                n as f64 * std::f64::consts::LN_2,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn order_two_profile() {
        // m = 2, rates {1, 1/2}, cm part delta_3
        let spec = WhaleSpec { rates: vec![1.0, 0.5], cm_atoms: vec![(3.0, 1.0)] };
        let f = whale_build(&spec).unwrap();
        assert_eq!(f.terms.len(), 3);
        let cert = whale_certify(&f, 2, 10).unwrap();
        assert!(cert.consistent, "counts {:?}", cert.counts);
        for (n, c) in cert.counts.iter().enumerate() {
            assert_eq!(*c, n.min(2));
        }
    }

    #[test]
    fn boundary_flatness_exact() {
        let spec = WhaleSpec { rates: vec![1.0, 0.5], cm_atoms: vec![(3.0, 1.0)] };
        let f = whale_build(&spec).unwrap();
        assert!(f.moment_at_zero(0).is_zero());
        assert!(f.moment_at_zero(1).is_zero());
        assert!(!f.moment_at_zero(2).is_zero());
    }

    #[test]
    fn degenerate_specs_rejected() {
        let dup = WhaleSpec { rates: vec![1.0, 1.0], cm_atoms: vec![(3.0, 1.0)] };
        assert!(matches!(whale_build(&dup), Err(WhaleError::CoincidingRates)));
        let clash = WhaleSpec { rates: vec![2.0], cm_atoms: vec![(2.0, 1.0)] };
        assert!(matches!(whale_build(&clash), Err(WhaleError::CoincidingRates)));
        let empty = WhaleSpec { rates: vec![1.0], cm_atoms: vec![] };
        assert!(matches!(whale_build(&empty), Err(WhaleError::EmptyCmPart)));
        let neg = WhaleSpec { rates: vec![-1.0], cm_atoms: vec![(2.0, 1.0)] };
        assert!(matches!(whale_build(&neg), Err(WhaleError::NonPositiveInput)));
    }

    #[test]
    fn transform_matches_product_form() {
        // transform of the built sum equals the product of factor transforms
        let f = single_exp_conv();
        for xi in [0.0, 0.7, -2.3] {
            let direct = f.transform(xi);
            let product = (Complex64::new(1.0, xi)).inv()
                * (Complex64::new(2.0, xi)).inv();
            assert_abs_diff_eq!(direct.re, product.re, epsilon = 1e-14);
            assert_abs_diff_eq!(direct.im, product.im, epsilon = 1e-14);
        }
    }

    #[test]
    fn canonical_representation_of_whale_transform() {
        // The transform of f = e^{-x} - e^{-2x}, normalised and with a
        // Gaussian factor e^{-t xi^2}, is reproduced by the canonical
        // route through the step phi of the Polya frequency product with
        // atoms 1/r (phi values {0, 1, 2}) and pinned drift/constant.
        use crate::pff::{pff_phi_params, PolyaFrequency};
        use crate::transform::log_transform;
        let f = single_exp_conv();
        let t = 0.3;
        let pf = PolyaFrequency { a: t, b: 0.0, atoms: vec![1.0, 0.5] };
        let mut params = pff_phi_params(&pf, 1e-10).unwrap();
        // f's transform = mass-normalisation * product without the e^{i a xi}
        // drift factors: shift b and c accordingly
        params.b += 1.5;
        params.c += f.mass().ln();
        for xi in [0.3, 1.0, 4.0] {
            let lt = log_transform(&params, xi, 1e-10).unwrap();
            let target = f.transform(xi) * (-t * xi * xi).exp();
            assert_abs_diff_eq!(lt.re_log, target.norm().ln(), epsilon = 1e-7);
            assert_abs_diff_eq!(lt.im_log, target.arg(), epsilon = 1e-7);
        }
    }
}
