//! The canonical Fourier representation built from (a, b, c, phi).
//!
//! For xi != 0,
//!
//! log Phi(xi) = -a xi^2 - i b xi + c
//!     + int ( 1/(i xi + s) - (1/s - i xi / s^2) 1_{|s| >= 1} ) phi(s) ds,
//!
//! which splits into
//!
//! re log Phi = -a xi^2 + c + int ( s/(xi^2+s^2) - (1/s) 1_{|s|>=1} ) phi ds,
//! im log Phi = -b xi - xi int ( 1/(xi^2+s^2) - (1/s^2) 1_{|s|>=1} ) phi ds.
//!
//! Affine pieces of phi integrate in closed form (arctan / log kernels, with
//! the tail-divergent parts cancelled analytically against the compensator);
//! power-law pieces go through adaptive quadrature with an exponential tail
//! substitution. The integrand changes analytic character exactly at the
//! compensator switch |s| = 1, so segments are split there.

use crate::phi::{BellParams, PhiFunction, SegBase};
use crate::quad;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogTransformValue {
    pub xi: f64,
    /// log |Phi(xi)|.
    pub re_log: f64,
    /// Continuous argument of Phi(xi).
    pub im_log: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum TransformError {
    #[error("the transform is defined for xi != 0 only")]
    ZeroXi,
    #[error("quadrature did not reach the requested tolerance (achieved {achieved:e})")]
    NonConvergence { achieved: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RegularityVerdict {
    /// Numerical evidence only, not a proof.
    Pass,
    Fail { reason: String },
}

/// Evaluate re log Phi and im log Phi at xi.
pub fn log_transform(
    params: &BellParams,
    xi: f64,
    tol: f64,
) -> Result<LogTransformValue, TransformError> {
    if xi == 0.0 {
        return Err(TransformError::ZeroXi);
    }
    let (re_int, im_int, err) = phi_integrals(&params.phi, xi, tol);
    let re_log = -params.a * xi * xi + params.c + re_int;
    let im_log = -params.b * xi - xi * im_int;
    let scale = re_log.abs().max(im_log.abs()).max(1.0);
    if !err.is_finite() || err > 1e3 * tol * scale {
        return Err(TransformError::NonConvergence { achieved: err / scale });
    }
    Ok(LogTransformValue { xi, re_log, im_log })
}

/// Phi(xi) = exp(log Phi(xi)).
pub fn transform(params: &BellParams, xi: f64, tol: f64) -> Result<Complex64, TransformError> {
    let lt = log_transform(params, xi, tol)?;
    Ok(Complex64::from_polar(lt.re_log.exp(), lt.im_log))
}

/// The compensated phi integrals:
/// returns (int for re log, int for im log without the -xi factor, error).
fn phi_integrals(phi: &PhiFunction, xi: f64, tol: f64) -> (f64, f64, f64) {
    let mut re = 0.0;
    let mut im = 0.0;
    let mut err = 0.0;
    for seg in phi.resolve() {
        // split at the compensator switch points +-1
        let mut cuts = vec![seg.a, seg.b];
        for c in [-1.0, 1.0] {
            if c > seg.a && c < seg.b {
                cuts.push(c);
            }
        }
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for w in cuts.windows(2) {
            let (u, v) = (w[0], w[1]);
            let compensated = u >= 1.0 || v <= -1.0;
            match seg.base {
                SegBase::Affine { slope, intercept } => {
                    let q = intercept + seg.offset;
                    if compensated {
                        re += re_comp(slope, q, xi, v) - re_comp(slope, q, xi, u);
                        im += im_comp(slope, q, xi, v) - im_comp(slope, q, xi, u);
                    } else {
                        re += re_plain(slope, q, xi, v) - re_plain(slope, q, xi, u);
                        im += im_plain(slope, q, xi, v) - im_plain(slope, q, xi, u);
                    }
                }
                SegBase::Power { .. } => {
                    let val = |s: f64| seg.base.value(s) + seg.offset;
                    // cancellation-free compensated kernels:
                    // s/(xi^2+s^2) - 1/s = -xi^2 / (s (xi^2+s^2)),
                    // 1/(xi^2+s^2) - 1/s^2 = -xi^2 / (s^2 (xi^2+s^2))
                    let fre = move |s: f64| {
                        let k = if compensated {
                            -xi * xi / (s * (xi * xi + s * s))
                        } else {
                            s / (xi * xi + s * s)
                        };
                        val(s) * k
                    };
                    let fim = move |s: f64| {
                        let k = if compensated {
                            -xi * xi / (s * s * (xi * xi + s * s))
                        } else {
                            1.0 / (xi * xi + s * s)
                        };
                        val(s) * k
                    };
                    let (r, e1) = quad_any(fre, u, v, tol);
                    let (i, e2) = quad_any(fim, u, v, tol);
                    re += r;
                    im += i;
                    err += e1 + e2;
                }
            }
        }
    }
    (re, im, err)
}

fn quad_any<F: Fn(f64) -> f64>(f: F, u: f64, v: f64, tol: f64) -> (f64, f64) {
    if v == f64::INFINITY {
        quad::integrate_to_inf(f, u, tol)
    } else if u == f64::NEG_INFINITY {
        quad::integrate_from_neg_inf(f, v, tol)
    } else {
        quad::integrate(f, u, v, tol)
    }
}

/// Antiderivative of (m s + q) s / (xi^2 + s^2) (no compensator; finite s).
fn re_plain(m: f64, q: f64, xi: f64, s: f64) -> f64 {
    m * (s - xi * (s / xi).atan()) + 0.5 * q * (xi * xi + s * s).ln()
}

/// Antiderivative of (m s + q) (s/(xi^2+s^2) - 1/s); finite at s = +-inf.
fn re_comp(m: f64, q: f64, xi: f64, s: f64) -> f64 {
    if s.is_infinite() {
        return -m * xi * (s / xi).atan();
    }
    -m * xi * (s / xi).atan() + 0.5 * q * ((xi * xi + s * s) / (s * s)).ln()
}

/// Antiderivative of (m s + q) / (xi^2 + s^2) (no compensator; finite s).
fn im_plain(m: f64, q: f64, xi: f64, s: f64) -> f64 {
    0.5 * m * (xi * xi + s * s).ln() + q / xi * (s / xi).atan()
}

/// Antiderivative of (m s + q) (1/(xi^2+s^2) - 1/s^2); finite at s = +-inf.
fn im_comp(m: f64, q: f64, xi: f64, s: f64) -> f64 {
    if s.is_infinite() {
        return q / xi * (s / xi).atan();
    }
    0.5 * m * ((xi * xi + s * s) / (s * s)).ln() + q / xi * (s / xi).atan() + q / s
}

/// Numerical check of the regularity condition: finiteness of
/// int_{-1}^{1} re Phi(xi) dxi and vanishing of xi im Phi(xi) as xi -> 0.
/// The verdict is numerical evidence, not a proof.
pub fn check_regularity(params: &BellParams, tol: f64) -> Result<RegularityVerdict, TransformError> {
    // dyadic panels [2^{-j-1}, 2^{-j}] refining toward 0; re Phi is even, so
    // the negative side doubles the total
    let re_phi = |xi: f64| -> Result<f64, TransformError> {
        let lt = log_transform(params, xi, tol)?;
        Ok(lt.re_log.exp() * lt.im_log.cos())
    };
    let mut panels = Vec::new();
    for j in 0..26 {
        let hi = 2f64.powi(-j);
        let lo = 0.5 * hi;
        let (v, _) = quad::integrate(|xi| re_phi(xi).unwrap_or(f64::NAN), lo, hi, tol);
        if !v.is_finite() {
            return Err(TransformError::NonConvergence { achieved: f64::INFINITY });
        }
        panels.push(v.abs());
    }
    let n = panels.len();
    let growing = panels[n - 1] > panels[n - 2] && panels[n - 2] > panels[n - 3];
    let total: f64 = 2.0 * panels.iter().sum::<f64>();
    const CAP: f64 = 1e9;
    if growing || total > CAP {
        return Ok(RegularityVerdict::Fail {
            reason: format!(
                "integral of re Phi over (-1, 1) shows divergence near 0 \
                 (last panels {:.3e}, {:.3e}, {:.3e}; total {total:.3e})",
                panels[n - 3],
                panels[n - 2],
                panels[n - 1]
            ),
        });
    }

    // xi im Phi(xi) along xi = 2^{-j}, j = 4..20
    let mut ts = Vec::new();
    for j in 4..=20 {
        let xi = 2f64.powi(-j);
        let lt = log_transform(params, xi, tol)?;
        ts.push(xi * lt.re_log.exp() * lt.im_log.sin());
    }
    let t_last = ts[ts.len() - 1].abs();
    let t_mid = ts[ts.len() - 5].abs();
    let decaying = t_last <= 0.75 * t_mid + 1e-9 || t_last <= 1e-9;
    if !decaying {
        return Ok(RegularityVerdict::Fail {
            reason: format!(
                "xi * im Phi(xi) does not vanish as xi -> 0 (|t(2^-16)| = {t_mid:.3e}, \
                 |t(2^-20)| = {t_last:.3e})"
            ),
        });
    }
    Ok(RegularityVerdict::Pass)
}

/// Parameters of the n-th convolution root: (a/n, b/n, c/n, phi/n).
pub fn convolution_root(params: &BellParams, n: u32) -> BellParams {
    params.divided_by(n)
}

/// Entry point for the integrable-case representation, whose constant c
/// relates to the canonical one by c = -c_int - int_{-1}^{1} phi(s)/s ds.
/// The integral is evaluated in closed form on affine pieces and by
/// quadrature on power pieces; it may be +inf when phi does not vanish fast
/// enough at 0, in which case c becomes -inf and the conversion fails.
pub fn params_from_integrable(
    a: f64,
    b: f64,
    c_int: f64,
    phi: PhiFunction,
    tol: f64,
) -> Result<BellParams, TransformError> {
    let mut int = 0.0;
    for seg in phi.resolve() {
        let u = seg.a.max(-1.0);
        let v = seg.b.min(1.0);
        if u >= v {
            continue;
        }
        match seg.base {
            SegBase::Affine { slope, intercept } => {
                let q = intercept + seg.offset;
                // int (m + q/s) ds; the q ln|s| part diverges at 0 unless q = 0
                if q != 0.0 && (u == 0.0 || v == 0.0 || (u < 0.0 && v > 0.0)) {
                    return Err(TransformError::NonConvergence { achieved: f64::INFINITY });
                }
                int += slope * (v - u)
                    + if q == 0.0 { 0.0 } else { q * (v.abs().ln() - u.abs().ln()) };
            }
            SegBase::Power { .. } => {
                let (r, _) = quad::integrate(|s| (seg.base.value(s) + seg.offset) / s, u, v, tol);
                if !r.is_finite() {
                    return Err(TransformError::NonConvergence { achieved: f64::INFINITY });
                }
                int += r;
            }
        }
    }
    Ok(BellParams { a, b, c: -c_int - int, phi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phi::{PhiFunction, Tail};
    use std::f64::consts::PI;

    pub fn cauchy_params() -> BellParams {
        BellParams {
            a: 0.0,
            b: 0.0,
            c: PI.ln() - 2.0 / PI,
            phi: PhiFunction::linear(1.0 / PI),
        }
    }

    fn gaussian_params(t: f64) -> BellParams {
        BellParams { a: t, b: 0.0, c: 0.0, phi: PhiFunction::zero() }
    }

    /// Brute-force oracle for the compensated integrals, independent of the
    /// closed-form path: plain Simpson panels on a dense grid.
    fn oracle_integrals(phi: &PhiFunction, xi: f64) -> (f64, f64) {
        let fre = |s: f64| {
            let comp = if s.abs() >= 1.0 { 1.0 / s } else { 0.0 };
            phi.eval(s) * (s / (xi * xi + s * s) - comp)
        };
        let fim = |s: f64| {
            let comp = if s.abs() >= 1.0 { 1.0 / (s * s) } else { 0.0 };
            phi.eval(s) * (1.0 / (xi * xi + s * s) - comp)
        };
        let simpson = |f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize| -> f64 {
            let h = (b - a) / n as f64;
            let mut acc = f(a) + f(b);
            for i in 1..n {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * f(a + i as f64 * h);
            }
            acc * h / 3.0
        };
        // integrand decays like |s|^{-2} for affine phi; go far out
        let mut re = 0.0;
        let mut im = 0.0;
        // inner regions split at the compensator switches and phi's own
        // breakpoints (uniform Simpson; discontinuity points nudged so
        // panel endpoints never sample the wrong side of a jump); outer
        // regions use log-spaced panels matched to the 1/s^2 decay
        let eps = 1e-9;
        for (a, b) in [
            (-1.0f64 + eps, -eps),
            (eps, 0.5 - eps),
            (0.5, 1.0 - eps),
            (1.0, 2.0 - eps),
        ] {
            re += simpson(&fre, a, b, 4096);
            im += simpson(&fim, a, b, 4096);
        }
        for (a, b) in [(-1e6f64, -1.0f64), (2.0, 1e6)] {
            let steps = 400;
            for i in 0..steps {
                let t0 = i as f64 / steps as f64;
                let t1 = (i + 1) as f64 / steps as f64;
                let map = |t: f64| a.signum() * a.abs().powf(1.0 - t) * b.abs().powf(t);
                let (u, v) = (map(t0), map(t1));
                let (u, v) = if u < v { (u, v) } else { (v, u) };
                re += simpson(&fre, u, v, 16);
                im += simpson(&fim, u, v, 16);
            }
        }
        (re, im)
    }

    #[test]
    fn gaussian_log_transform() {
        let p = gaussian_params(0.25);
        let lt = log_transform(&p, 1.7, 1e-10).unwrap();
        assert!((lt.re_log + 0.25 * 1.7 * 1.7).abs() < 1e-12);
        assert_eq!(lt.im_log, 0.0);
    }

    #[test]
    fn cauchy_closed_form() {
        // re log Phi = log pi - |xi|, im log Phi = 0
        let p = cauchy_params();
        for xi in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, -1.0, -3.5] {
            let lt = log_transform(&p, xi, 1e-10).unwrap();
            assert!(
                (lt.re_log - (PI.ln() - xi.abs())).abs() < 1e-9,
                "xi = {xi}: re_log = {}",
                lt.re_log
            );
            assert!(lt.im_log.abs() < 1e-9, "xi = {xi}: im_log = {}", lt.im_log);
        }
        let v = transform(&p, 1.0, 1e-10).unwrap();
        assert!((v.re - PI * (-1.0f64).exp()).abs() < 1e-6);
        assert!(v.im.abs() < 1e-8);
    }

    #[test]
    fn closed_form_matches_brute_force_oracle() {
        // independent Simpson oracle on the same compensated integrands
        let phi = PhiFunction::linear(1.0 / PI);
        for xi in [0.7, 2.3] {
            let (re_o, im_o) = oracle_integrals(&phi, xi);
            let (re, im, _) = phi_integrals(&phi, xi, 1e-11);
            assert!((re - re_o).abs() < 1e-5, "re {re} vs oracle {re_o}");
            assert!((im - im_o).abs() < 1e-5, "im {im} vs oracle {im_o}");
        }
        // piecewise phi with a step and a power tail
        let phi = PhiFunction {
            knots: vec![0.0, 0.5],
            pieces: vec![crate::phi::AffinePiece { slope: 0.4, intercept: 0.0 }],
            left_tail: Tail::Constant { value: -0.3 },
            right_tail: Tail::Power { amplitude: 0.3, gamma: 0.5 },
            steps: vec![crate::phi::Step { location: 2.0, height: 1.0 }],
        };
        let (re_o, im_o) = oracle_integrals(&phi, 1.3);
        let (re, im, _) = phi_integrals(&phi, 1.3, 1e-11);
        assert!((re - re_o).abs() < 1e-4, "re {re} vs oracle {re_o}");
        assert!((im - im_o).abs() < 1e-4, "im {im} vs oracle {im_o}");
    }

    #[test]
    fn cauchy_transform_against_fourier_integral() {
        // direct numerical Fourier transform of (1+x^2)^{-1}
        let p = cauchy_params();
        for xi in [1.0f64, 2.0] {
            let (re_num, _) = quad::integrate_real_line(
                |x| (xi * x).cos() / (1.0 + x * x),
                1e-12,
            );
            let v = transform(&p, xi, 1e-10).unwrap();
            assert!((v.re - re_num).abs() < 1e-6, "xi = {xi}: {} vs {re_num}", v.re);
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let p = cauchy_params();
        for xi in [0.3, 1.0, 4.2] {
            let plus = log_transform(&p, xi, 1e-10).unwrap();
            let minus = log_transform(&p, -xi, 1e-10).unwrap();
            assert!((plus.re_log - minus.re_log).abs() < 1e-9);
            assert!((plus.im_log + minus.im_log).abs() < 1e-9);
        }
        // asymmetric phi exercises a nonzero imaginary part
        let p = BellParams {
            a: 0.0,
            b: 0.4,
            c: 0.0,
            phi: PhiFunction {
                knots: vec![0.0],
                pieces: vec![],
                left_tail: Tail::Constant { value: 0.0 },
                right_tail: Tail::Power { amplitude: 2.0 / PI, gamma: 0.5 },
                steps: vec![],
            },
        };
        let plus = log_transform(&p, 1.3, 1e-10).unwrap();
        let minus = log_transform(&p, -1.3, 1e-10).unwrap();
        assert!(plus.im_log.abs() > 1e-3, "test should exercise im part");
        assert!((plus.re_log - minus.re_log).abs() < 1e-9);
        assert!((plus.im_log + minus.im_log).abs() < 1e-9);
    }

    #[test]
    fn regularity_pass_cases() {
        assert_eq!(check_regularity(&cauchy_params(), 1e-9).unwrap(), RegularityVerdict::Pass);
        assert_eq!(
            check_regularity(&gaussian_params(0.5), 1e-9).unwrap(),
            RegularityVerdict::Pass
        );
    }

    #[test]
    fn regularity_fail_case() {
        // phi = sign(s): re log Phi = -2 ln|xi| + c, so re Phi ~ xi^{-2}
        // and the integral over (-1, 1) diverges
        let p = BellParams {
            a: 0.0,
            b: 0.0,
            c: 0.0,
            phi: PhiFunction {
                knots: vec![0.0],
                pieces: vec![],
                left_tail: Tail::Constant { value: -1.0 },
                right_tail: Tail::Constant { value: 1.0 },
                steps: vec![],
            },
        };
        match check_regularity(&p, 1e-9).unwrap() {
            RegularityVerdict::Fail { .. } => {}
            v => panic!("expected fail, got {v:?}"),
        }
    }

    #[test]
    fn convolution_root_reassembles() {
        for params in [cauchy_params(), gaussian_params(0.7)] {
            for n in [2u32, 3, 5] {
                let root = convolution_root(&params, n);
                for xi in [0.5, 1.0, 2.0] {
                    let whole = transform(&params, xi, 1e-10).unwrap();
                    let part = transform(&root, xi, 1e-10).unwrap();
                    let prod = part.powu(n);
                    assert!(
                        (prod - whole).norm() < 1e-8 * whole.norm().max(1.0),
                        "n = {n}, xi = {xi}"
                    );
                }
            }
        }
    }

    #[test]
    fn integrable_entry_point_converts_c() {
        // phi = s/pi: int_{-1}^{1} phi/s ds = 2/pi, so c_int = -(c + 2/pi)
        let p = cauchy_params();
        let c_int = -p.c - 2.0 / PI;
        let back = params_from_integrable(0.0, 0.0, c_int, PhiFunction::linear(1.0 / PI), 1e-10)
            .unwrap();
        assert!((back.c - p.c).abs() < 1e-12);
    }

    #[test]
    fn zero_xi_rejected() {
        assert!(matches!(
            log_transform(&cauchy_params(), 0.0, 1e-9),
            Err(TransformError::ZeroXi)
        ));
    }
}
