//! Post-style inversion approximants and the g_n construction.
//!
//! For a density f with exact n-th derivatives, the Fourier transform is
//! approximated by
//!
//!   F_n(xi) = n^{n+1} / (n! z^n) * int f^(n)(n x) / (1 + x z) dx,  z = i xi,
//!
//! which by repeated integration by parts equals
//! int f(y) (1 + i xi y / n)^{-(n+1)} dy and converges to the transform as
//! n grows. The companion function
//!
//!   g_n(x) = (-1)^n n^{n+1} / n! * f^(n)(n x) * prod_k (x - alpha_{n,k}),
//!
//! with alpha_{n,k} the scaled zeros of f^(n), is nonnegative, carries the
//! same mass as f, and splits the approximant into a product of a
//! Polya-frequency-like factor prod (1 + alpha_{n,k} z)^{-1} and the
//! transform of g_n. All magnitudes are combined in log space so orders in
//! the hundreds do not overflow.

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::exact::{self, ExactDensity, ExactError, FastEval};
use crate::quad;

/// Order cap for the approximants; beyond this the exact derivative degree
/// and coefficient sizes exceed a desk-scale runtime budget.
pub const POST_ORDER_CAP: u32 = 400;

#[derive(Debug, thiserror::Error)]
pub enum PostError {
    #[error("the approximant requires derivative order n >= 1")]
    ZeroOrder,
    #[error("the approximant is undefined at xi = 0")]
    ZeroXi,
    #[error("order {n} exceeds the approximant cap {cap}")]
    OrderBeyondCap { n: u32, cap: u32 },
    #[error("g_{n} dips to {min:e} against peak {max:e}: zero table inconsistent")]
    NegativeGn { n: u32, min: f64, max: f64 },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// ln( n^{n+1} / n! ).
fn ln_post_factor(n: u32) -> f64 {
    (n as f64 + 1.0) * (n as f64).ln() - ln_gamma(n as f64 + 1.0)
}

/// Integrate a real integrand over the support with panel breaks at the
/// given points (sorted); the tails run to the support boundary / infinity.
fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    positive_support: bool,
    tol: f64,
) -> f64 {
    let panel_tol = tol / (breaks.len() + 2) as f64;
    if breaks.is_empty() {
        return if positive_support {
            quad::integrate_to_inf(&f, 0.0, panel_tol).0
        } else {
            quad::integrate_real_line(&f, panel_tol).0
        };
    }
    let mut total = 0.0;
    if positive_support {
        total += quad::integrate(&f, 0.0, breaks[0], panel_tol).0;
    } else {
        total += quad::integrate_from_neg_inf(&f, breaks[0], panel_tol).0;
    }
    for w in breaks.windows(2) {
        total += quad::integrate(&f, w[0], w[1], panel_tol).0;
    }
    total += quad::integrate_to_inf(&f, *breaks.last().unwrap(), panel_tol).0;
    total
}

/// The order-n Post approximant to the Fourier transform of f at xi.
///
/// Evaluated through the exact integration-by-parts equivalent
/// int f(y) (1 + i xi y / n)^{-(n+1)} dy: the derivative-side integrand
/// reaches e^{Theta(n log n)} and cancels back to order one, which no
/// floating-point quadrature survives, while this form is bounded by f
/// pointwise. The derivative-side route is still exercised, stably, through
/// g_n in [`verify_factor_identity`].
pub fn post_approximant(
    f: &ExactDensity,
    xi: f64,
    n: u32,
    tol: f64,
) -> Result<Complex64, PostError> {
    if n == 0 {
        return Err(PostError::ZeroOrder);
    }
    if xi == 0.0 {
        return Err(PostError::ZeroXi);
    }
    if n > POST_ORDER_CAP {
        return Err(PostError::OrderBeyondCap { n, cap: POST_ORDER_CAP });
    }
    let density = exact::nth_derivative_capped(f, 0, shift_reserve(f))?.fast();
    let kernel = move |y: f64, c: fn(f64) -> f64| {
        let t = xi * y / n as f64;
        let ln_r = 0.5 * (1.0 + t * t).ln();
        let theta = t.atan();
        (-(n as f64 + 1.0) * ln_r).exp() * c((n as f64 + 1.0) * theta)
    };
    let re_int = |y: f64| density.eval_f64(y) * kernel(y, f64::cos);
    let im_int = |y: f64| -density.eval_f64(y) * kernel(y, f64::sin);
    let (re, im) = if f.positive_support() {
        (
            quad::integrate_to_inf(re_int, 0.0, tol).0,
            quad::integrate_to_inf(im_int, 0.0, tol).0,
        )
    } else {
        (
            quad::integrate_real_line(re_int, tol).0,
            quad::integrate_real_line(im_int, tol).0,
        )
    };
    Ok(Complex64::new(re, im))
}

fn shift_reserve(f: &ExactDensity) -> u32 {
    match f {
        ExactDensity::Shift { base, .. } => 1 + shift_reserve(base),
        _ => 0,
    }
}

/// g_n evaluated through its log-space closed form.
pub struct GnFunction {
    pub n: u32,
    pub base: ExactDensity,
    /// Scaled zeros alpha_{n,k} of f^(n), sorted.
    pub zeros: Vec<f64>,
    fast: FastEval,
    ln_pref: f64,
}

impl GnFunction {
    /// (sign, ln |g_n(x)|); the sign is +1 wherever the zero table is
    /// consistent.
    pub fn eval_log(&self, x: f64) -> (i8, f64) {
        let scale = self.n.max(1) as f64;
        let (mut sign, mut ln) = self.fast.eval_log(scale * x);
        if self.n % 2 == 1 {
            sign = -sign;
        }
        for &a in &self.zeros {
            let d = x - a;
            if d == 0.0 {
                return (0, f64::NEG_INFINITY);
            }
            if d < 0.0 {
                sign = -sign;
            }
            ln += d.abs().ln();
        }
        (sign, ln + self.ln_pref)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (sign, ln) = self.eval_log(x);
        sign as f64 * ln.exp()
    }

    /// int g_n, by quadrature with panels at the zeros.
    pub fn mass(&self, tol: f64) -> f64 {
        integrate_with_breaks(
            |x| self.eval(x),
            &self.zeros,
            self.base.positive_support(),
            tol,
        )
    }
}

/// Build g_n with certified zeros and check nonnegativity on a grid.
pub fn gn_build(f: &ExactDensity, n: u32) -> Result<GnFunction, PostError> {
    if n > POST_ORDER_CAP {
        return Err(PostError::OrderBeyondCap { n, cap: POST_ORDER_CAP });
    }
    let cap = n + shift_reserve(f);
    let table = exact::sign_changes_capped(f, n, cap)?;
    let sd = exact::nth_derivative_capped(f, n, cap)?;
    let zeros: Vec<f64> =
        table.zeros.iter().map(|z| z.midpoint_f64() / n.max(1) as f64).collect();
    let gn = GnFunction {
        n,
        base: f.clone(),
        zeros,
        fast: sd.fast(),
        ln_pref: if n == 0 { 0.0 } else { ln_post_factor(n) },
    };

    // grid nonnegativity check over the zero range plus margin
    let (lo0, hi0) = match (gn.zeros.first(), gn.zeros.last()) {
        (Some(&a), Some(&b)) => (a - 2.0, b + 2.0),
        _ => (-2.0, 2.0),
    };
    let lo = if f.positive_support() { lo0.max(1e-6) } else { lo0 };
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..=2000 {
        let x = lo + (hi0 - lo) * i as f64 / 2000.0;
        let v = gn.eval(x);
        min = min.min(v);
        max = max.max(v);
    }
    if min < -1e-9 * max {
        return Err(PostError::NegativeGn { n, min, max });
    }
    Ok(gn)
}

/// int g_n(x) / (1 + i xi x) dx — the AM-CM factor's transform.
pub fn amcm_factor_transform(gn: &GnFunction, xi: f64, tol: f64) -> Complex64 {
    let positive = gn.base.positive_support();
    let re = integrate_with_breaks(
        |x| gn.eval(x) / (1.0 + xi * xi * x * x),
        &gn.zeros,
        positive,
        tol,
    );
    let im = integrate_with_breaks(
        |x| -xi * x * gn.eval(x) / (1.0 + xi * xi * x * x),
        &gn.zeros,
        positive,
        tol,
    );
    Complex64::new(re, im)
}

/// Relative residual of the product identity
/// F_n(xi) = prod_k (1 + i alpha_{n,k} xi)^{-1} * int g_n(x)/(1 + i xi x) dx.
/// The identity is analytic; the residual measures quadrature error only.
pub fn verify_factor_identity(
    f: &ExactDensity,
    n: u32,
    xi: f64,
    tol: f64,
) -> Result<f64, PostError> {
    if n == 0 {
        return Ok(0.0);
    }
    let lhs = post_approximant(f, xi, n, tol)?;
    let gn = gn_build(f, n)?;
    let mut prod = Complex64::new(1.0, 0.0);
    for &a in &gn.zeros {
        prod /= Complex64::new(1.0, a * xi);
    }
    let rhs = prod * amcm_factor_transform(&gn, xi, tol);
    Ok((lhs - rhs).norm() / lhs.norm())
}
