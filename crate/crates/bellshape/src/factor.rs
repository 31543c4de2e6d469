//! Canonical factorisation f = g * h.
//!
//! Every bell-shaped function factors as the convolution of a Polya
//! frequency function h and a density g whose restriction to each half-line
//! is completely monotone. On the level-crossing side the factorisation is a
//! decomposition phi = phi_g + phi_h: phi_h is an integer-valued,
//! non-decreasing step function with unit jumps at the level crossings of
//! phi, and the remainder phi_g satisfies phi_g(s) sign(s) in [0, 1]. The
//! Polya frequency factor gets the Gaussian coefficient a and one atom
//! alpha_k = 1/s_k per crossing; the remainder keeps c and the drift b. A
//! drift correction on the PFF (and a matching constant on the remainder)
//! makes the product identity log Phi = log Phi_g + log Phi_h exact.

use crate::pff::{self, PolyaFrequency};
use crate::phi::{self, BellParams, ParamsError, PhiError, PhiFunction, Step};
use crate::transform::{self, TransformError};
use serde::{Deserialize, Serialize};

/// The two factors of f = g * h plus the corrections that make the product
/// identity hold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorPair {
    /// The Polya frequency factor; its drift is `b_correction`.
    pub pff: PolyaFrequency,
    /// Parameters of the completely-monotone-sided factor: a = 0, the
    /// original drift b, phi = phi_g, and c adjusted by the constant that
    /// atoms inside (-1, 1) leave behind.
    pub amcm_params: BellParams,
    /// Drift applied to the PFF so that the imaginary parts add up.
    pub b_correction: f64,
    /// Max |log Phi - log Phi_g - log Phi_h| over the verification grid.
    pub residual: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum FactorError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Phi(#[from] PhiError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error("product identity residual {residual:e} exceeds tolerance {tol:e}")]
    ResidualTooLarge { residual: f64, tol: f64 },
}

/// Split phi into the integer step part phi_h (returned as its jump list)
/// and the remainder phi_g = phi - phi_h, which carries the original pieces
/// plus cancelling steps. Crossings are taken from the deterministic
/// leftmost-crossing table up to level k_max.
pub fn split_phi(
    phi: &PhiFunction,
    k_max: u32,
) -> Result<(Vec<Step>, PhiFunction), PhiError> {
    phi.validate_structure()?;

    // phi must stay within reach of k_max levels over the knot range,
    // otherwise the sandwich phi_h <= phi <= phi_h + 1 is unattainable
    let span = k_max as f64;
    let lo = phi.knots[0];
    let hi = *phi.knots.last().unwrap();
    for seg in phi.resolve() {
        let (a, b) = (seg.a.max(lo), seg.b.min(hi));
        if a > b {
            continue;
        }
        for v in [seg.value_at_left(), seg.value_at_right()] {
            if v.is_finite() && v.abs() > span + 1.0 {
                return Err(PhiError::KMaxTooSmall { k_max: k_max as i64 });
            }
        }
    }

    let table = phi::crossing_table(phi, k_max)?;
    let mut steps = Vec::new();
    for e in &table.entries {
        if e.k == 0 || !e.s.is_finite() {
            continue;
        }
        steps.push(Step { location: e.s, height: (e.k as f64).signum() });
    }

    let mut phi_g = phi.clone();
    for st in &steps {
        phi_g.steps.push(Step { location: st.location, height: -st.height });
    }
    Ok((steps, phi_g))
}

/// Factorise validated parameters into the PFF and AM-CM sides, with the
/// drift correction pinned at xi = 1 and the product identity verified on a
/// 31-point log-spaced grid over [1e-2, 1e2].
pub fn factorise(params: &BellParams, k_max: u32, tol: f64) -> Result<FactorPair, FactorError> {
    params.validate()?;
    let (steps, phi_g) = split_phi(&params.phi, k_max)?;
    let atoms: Vec<f64> = steps.iter().map(|st| 1.0 / st.location).collect();

    // pin the corrections at xi = 1: the drift mismatch is linear in xi and
    // the real mismatch (one ln|s_k| per atom inside the unit interval) is
    // constant, so one equation fixes each exactly
    let lt_full = transform::log_transform(params, 1.0, tol)?;
    let mut amcm_params =
        BellParams { a: 0.0, b: params.b, c: params.c, phi: phi_g };
    let lt_g = transform::log_transform(&amcm_params, 1.0, tol)?;
    let bare = PolyaFrequency { a: params.a, b: 0.0, atoms };
    let (re_h, im_h) = pff::pff_log_transform(&bare, 1.0);

    let b_correction = lt_g.im_log + im_h - lt_full.im_log;
    amcm_params.c += lt_full.re_log - lt_g.re_log - re_h;
    let pff = PolyaFrequency { b: b_correction, ..bare };

    // grid verification of log Phi = log Phi_g + log Phi_h
    let mut residual = 0.0f64;
    for i in 0..31 {
        let xi = 10f64.powf(-2.0 + 4.0 * i as f64 / 30.0);
        let full = transform::log_transform(params, xi, tol)?;
        let g = transform::log_transform(&amcm_params, xi, tol)?;
        let (hre, him) = pff::pff_log_transform(&pff, xi);
        residual = residual
            .max((full.re_log - g.re_log - hre).abs())
            .max((full.im_log - g.im_log - him).abs());
    }
    if residual > tol {
        return Err(FactorError::ResidualTooLarge { residual, tol });
    }
    Ok(FactorPair { pff, amcm_params, b_correction, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phi::{AffinePiece, Tail};
    use std::f64::consts::PI;

    fn cauchy_params() -> BellParams {
        BellParams {
            a: 0.0,
            b: 0.0,
            c: PI.ln() - 2.0 / PI,
            phi: PhiFunction::linear(1.0 / PI),
        }
    }

    /// Sandwich and range invariants on a sampled grid.
    fn assert_sandwich(phi: &PhiFunction, steps: &[Step], phi_g: &PhiFunction, range: f64) {
        let phi_h = PhiFunction::from_steps(steps.to_vec());
        let mut s = -range;
        while s <= range {
            if s != 0.0 {
                let v = phi.eval(s);
                let h = phi_h.eval(s);
                let g = phi_g.eval(s);
                assert!((g - (v - h)).abs() < 1e-12, "phi_g != phi - phi_h at {s}");
                if s > 0.0 {
                    assert!(h - 1e-12 <= v && v <= h + 1.0 + 1e-12, "sandwich at {s}");
                    assert!((-1e-12..=1.0 + 1e-12).contains(&g), "range at {s}: {g}");
                } else {
                    assert!(h - 1.0 - 1e-12 <= v && v <= h + 1e-12, "sandwich at {s}");
                    assert!((-1.0 - 1e-12..=1e-12).contains(&g), "range at {s}: {g}");
                }
            }
            s += 0.093;
        }
    }

    #[test]
    fn split_linear_phi() {
        let phi = PhiFunction::linear(1.0 / PI);
        let (steps, phi_g) = split_phi(&phi, 12).unwrap();
        assert_eq!(steps.len(), 24);
        for st in &steps {
            let k = (st.location / PI).round();
            assert!((st.location - k * PI).abs() < 1e-9, "step at {}", st.location);
            assert_eq!(st.height, k.signum());
        }
        // phi_g is the signed fractional part of s/pi
        for s in [0.5, 2.0, 4.0, 10.0, -0.5, -4.0] {
            let expect = if s > 0.0 {
                (s / PI).fract()
            } else {
                (s / PI) - (s / PI).ceil()
            };
            assert!((phi_g.eval(s) - expect).abs() < 1e-12, "s = {s}");
        }
        assert_sandwich(&phi, &steps, &phi_g, 37.0);
    }

    #[test]
    fn split_zero_phi() {
        let (steps, phi_g) = split_phi(&PhiFunction::zero(), 5).unwrap();
        assert!(steps.is_empty());
        assert_eq!(phi_g.eval(3.0), 0.0);
        assert_eq!(phi_g.eval(-3.0), 0.0);
    }

    #[test]
    fn split_sqrt_phi() {
        // (2/pi) sqrt(s): crossings at s_k = k^2 pi^2 / 4
        let phi = PhiFunction {
            knots: vec![0.0],
            pieces: vec![],
            left_tail: Tail::Constant { value: 0.0 },
            right_tail: Tail::Power { amplitude: 2.0 / PI, gamma: 0.5 },
            steps: vec![],
        };
        let (steps, phi_g) = split_phi(&phi, 3).unwrap();
        assert_eq!(steps.len(), 3);
        for (i, st) in steps.iter().enumerate() {
            let k = (i + 1) as f64;
            let expect = k * k * PI * PI / 4.0;
            assert!((st.location - expect).abs() < 1e-8 * expect);
        }
        // valid up to the first dropped crossing s_4 = 4 pi^2
        assert_sandwich(&phi, &steps, &phi_g, 35.0);
    }

    #[test]
    fn truncation_is_monotone_in_k_max() {
        let phi = PhiFunction::linear(1.0 / PI);
        let (small, _) = split_phi(&phi, 3).unwrap();
        let (large, _) = split_phi(&phi, 6).unwrap();
        for st in &small {
            assert!(large.iter().any(|l| l.location == st.location && l.height == st.height));
        }
    }

    #[test]
    fn k_max_too_small_rejected() {
        // phi climbs to 5 inside the knot range; k_max = 2 cannot sandwich
        let phi = PhiFunction {
            knots: vec![0.0, 10.0],
            pieces: vec![AffinePiece { slope: 0.5, intercept: 0.0 }],
            left_tail: Tail::Constant { value: 0.0 },
            right_tail: Tail::Constant { value: 5.0 },
            steps: vec![],
        };
        assert!(matches!(split_phi(&phi, 2), Err(PhiError::KMaxTooSmall { k_max: 2 })));
        assert!(split_phi(&phi, 6).is_ok());
    }

    #[test]
    fn factorise_cauchy_roundtrip() {
        let pair = factorise(&cauchy_params(), 50, 1e-6).unwrap();
        assert_eq!(pair.pff.atoms.len(), 100);
        for al in &pair.pff.atoms {
            let k = (1.0 / (al * PI)).round();
            assert!((al - 1.0 / (k * PI)).abs() < 1e-12 * al.abs());
        }
        assert!(pair.residual <= 1e-6, "residual {}", pair.residual);
        assert_eq!(pair.amcm_params.a, 0.0);

        // explicit roundtrip on xi in [0.1, 10]
        for i in 0..=20 {
            let xi = 10f64.powf(-1.0 + 2.0 * i as f64 / 20.0);
            let full = transform::log_transform(&cauchy_params(), xi, 1e-10).unwrap();
            let g = transform::log_transform(&pair.amcm_params, xi, 1e-10).unwrap();
            let (hre, him) = pff::pff_log_transform(&pair.pff, xi);
            assert!((full.re_log - g.re_log - hre).abs() < 1e-6, "xi = {xi}");
            assert!((full.im_log - g.im_log - him).abs() < 1e-6, "xi = {xi}");
        }
    }

    #[test]
    fn factorise_gaussian_is_pure_pff() {
        let params = BellParams { a: 0.8, b: 0.0, c: 0.0, phi: PhiFunction::zero() };
        let pair = factorise(&params, 10, 1e-9).unwrap();
        assert!(pair.pff.atoms.is_empty());
        assert_eq!(pair.pff.a, 0.8);
        assert_eq!(pair.amcm_params.phi.eval(1.0), 0.0);
        assert!(pair.b_correction.abs() < 1e-9);
        assert!(pair.residual < 1e-9);
    }

    #[test]
    fn factorise_pure_step_phi() {
        // phi = unit step at s = 1: already integer-valued, so phi_g = 0 and
        // the PFF gets the single atom alpha = 1
        let params = BellParams {
            a: 0.0,
            b: 0.0,
            c: 0.0,
            phi: PhiFunction::from_steps(vec![Step { location: 1.0, height: 1.0 }]),
        };
        let pair = factorise(&params, 5, 1e-8).unwrap();
        assert_eq!(pair.pff.atoms, vec![1.0]);
        for s in [0.5, 1.5, 10.0, -2.0] {
            assert_eq!(pair.amcm_params.phi.eval(s), 0.0, "phi_g at {s}");
        }
        assert!(pair.residual < 1e-8);
    }

    #[test]
    fn product_identity_with_atom_inside_unit_interval() {
        // a crossing at s = 1/2 puts an atom alpha = 2 inside (-1, 1), which
        // exercises the constant correction folded into amcm c
        let phi = PhiFunction {
            knots: vec![0.0, 1.0],
            pieces: vec![AffinePiece { slope: 2.0, intercept: 0.0 }],
            left_tail: Tail::Constant { value: 0.0 },
            right_tail: Tail::Constant { value: 2.0 },
            steps: vec![],
        };
        let params = BellParams { a: 0.1, b: 0.3, c: -0.2, phi };
        let pair = factorise(&params, 4, 1e-7).unwrap();
        assert_eq!(pair.pff.atoms.len(), 2);
        assert!((pair.pff.atoms[0] - 2.0).abs() < 1e-10);
        assert!((pair.pff.atoms[1] - 1.0).abs() < 1e-10);
        assert!(pair.residual <= 1e-7, "residual {}", pair.residual);
    }
}
