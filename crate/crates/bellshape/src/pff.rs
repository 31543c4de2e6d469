//! Polya frequency functions.
//!
//! A (normalised) Polya frequency function h is characterised by its Fourier
//! transform
//!
//! Phi_h(xi) = exp(-a xi^2 - i b xi) * prod_k e^{i alpha_k xi} / (1 + i alpha_k xi),
//!
//! with a >= 0, b real and sum alpha_k^2 < infinity: h is the (weak limit of)
//! convolutions of shifted exponential densities and a Gaussian. The module
//! evaluates this product in log space, converts between the atom list and
//! the equivalent integer-step level-crossing function (unit jumps at
//! s_k = 1/alpha_k), samples the density by Fourier inversion, and provides
//! an empirical check of the variation-diminishing property of convolution
//! with h.

use crate::phi::{BellParams, PhiFunction, Step};
use crate::transform::{self, TransformError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Parameters (a, b, alpha_1..alpha_N) of a Polya frequency function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyaFrequency {
    /// Gaussian coefficient, nonnegative.
    pub a: f64,
    /// Drift.
    pub b: f64,
    /// Nonzero exponential scales; atom alpha contributes a factor
    /// e^{i alpha xi} / (1 + i alpha xi).
    pub atoms: Vec<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum PffError {
    #[error("gaussian coefficient a = {0} must be nonnegative")]
    NegativeA(f64),
    #[error("atom scales must be nonzero")]
    ZeroAtom,
    #[error(
        "density sampling requires a > 0 or at least two atoms; a single \
         exponential atom has the closed form single_atom_density"
    )]
    InsufficientDecay,
    #[error("grid too coarse: convolution mass leakage {leak:.3e} exceeds 1%")]
    MassLeakage { leak: f64 },
    #[error(transparent)]
    Transform(#[from] TransformError),
}

impl PolyaFrequency {
    pub fn validate(&self) -> Result<(), PffError> {
        if self.a < 0.0 {
            return Err(PffError::NegativeA(self.a));
        }
        if self.atoms.iter().any(|&al| al == 0.0) {
            return Err(PffError::ZeroAtom);
        }
        Ok(())
    }

    /// True when the object is the unit point mass (possibly shifted by b).
    pub fn is_point_mass(&self) -> bool {
        self.a == 0.0 && self.atoms.is_empty()
    }
}

/// Evaluate the transform Phi_h(xi) in log space:
/// re log = -a xi^2 - (1/2) sum ln(1 + alpha_k^2 xi^2),
/// im log = -b xi + sum (alpha_k xi - atan(alpha_k xi)).
pub fn pff_transform(h: &PolyaFrequency, xi: f64) -> Complex64 {
    let (re, im) = pff_log_transform(h, xi);
    Complex64::from_polar(re.exp(), im)
}

/// (log |Phi_h|, continuous arg Phi_h) at xi.
pub fn pff_log_transform(h: &PolyaFrequency, xi: f64) -> (f64, f64) {
    let mut re = -h.a * xi * xi;
    let mut im = -h.b * xi;
    for &al in &h.atoms {
        let t = al * xi;
        re -= 0.5 * t.mul_add(t, 1.0).ln();
        im += t - t.atan();
    }
    (re, im)
}

/// The level-crossing function of h: unit jumps at s_k = 1/alpha_k
/// (positive atoms step up on [s_k, inf), negative atoms step down on
/// (-inf, s_k]), normalised to 0 at the origin.
pub fn pff_phi(h: &PolyaFrequency) -> PhiFunction {
    let steps = h
        .atoms
        .iter()
        .map(|&al| Step { location: 1.0 / al, height: al.signum() })
        .collect();
    PhiFunction::from_steps(steps)
}

/// Canonical representation parameters (a, b', c', pff_phi) that reproduce
/// pff_transform through the generic transform path. The drift b' absorbs
/// the linear-in-xi mismatch between the e^{i alpha_k xi} factors and the
/// canonical compensators; c' absorbs the constant mismatch ln|s_k| that
/// each jump inside (-1, 1) leaves behind. Both are pinned by matching the
/// two formulas at xi = 1, which the representation theory makes exact for
/// every xi.
pub fn pff_phi_params(h: &PolyaFrequency, tol: f64) -> Result<BellParams, TransformError> {
    let phi = pff_phi(h);
    let bare = BellParams { a: h.a, b: 0.0, c: 0.0, phi };
    let lt = transform::log_transform(&bare, 1.0, tol)?;
    let (re_pff, im_pff) = pff_log_transform(h, 1.0);
    Ok(BellParams { b: lt.im_log - im_pff, c: re_pff - lt.re_log, ..bare })
}

/// Density of the single-atom, a = 0 Polya frequency function: a shifted
/// exponential with scale |alpha| supported on x > b - alpha (alpha > 0)
/// or x < b - alpha (alpha < 0).
pub fn single_atom_density(alpha: f64, b: f64, x: f64) -> f64 {
    let t = (x - b + alpha) / alpha;
    if t > 0.0 {
        (-t).exp() / alpha.abs()
    } else {
        0.0
    }
}

/// Sample the density h on a uniform grid of n points spanning [lo, hi] by
/// trapezoid Fourier inversion h(x) = (1/pi) int_0^Xi re(e^{i xi x} Phi_h) dxi.
/// The integral is truncated where the transform modulus underflows 1e-16 or
/// where the remaining tail provably contributes less than tol.
/// Returns (x points, density values); values are clipped at -tol from below
/// before a final renormalisation, whose correction must stay within tol.
pub fn pff_sample(
    h: &PolyaFrequency,
    lo: f64,
    hi: f64,
    n: usize,
    tol: f64,
) -> Result<(Vec<f64>, Vec<f64>), PffError> {
    h.validate()?;
    if h.a == 0.0 && h.atoms.len() < 2 {
        return Err(PffError::InsufficientDecay);
    }

    // effective support: mean b, spread from the Gaussian part, the atom
    // scales and their shifts; the inversion grid period must exceed the
    // combined extent of support and requested window to avoid aliasing
    let sigma = (2.0 * h.a + h.atoms.iter().map(|al| al * al).sum::<f64>()).sqrt();
    let spread = h.atoms.iter().map(|al| al.abs()).sum::<f64>() + 8.0 * sigma + 1.0;
    let period = (hi - lo) + 2.0 * ((lo - h.b).abs().max((hi - h.b).abs()) + spread);
    let dxi = 2.0 * std::f64::consts::PI / period;

    // truncation point: modulus underflow, or certified tail bound
    // (1/pi) int_Xi^inf |Phi| <= |Phi(Xi)| * Xi for the >= quadratic decay
    // guaranteed by a > 0 or two atoms
    let mut m = 1usize;
    loop {
        let xi = m as f64 * dxi;
        let (re_log, _) = pff_log_transform(h, xi);
        let modulus = re_log.exp();
        if modulus < 1e-16 || modulus * xi < 0.1 * tol {
            break;
        }
        m += 1;
        if m > 50_000_000 {
            break;
        }
    }

    // precompute transform samples (shared across all x)
    let samples: Vec<Complex64> = (1..=m).map(|j| pff_transform(h, j as f64 * dxi)).collect();

    let xs: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n.max(2) - 1) as f64)
        .collect();
    let mut vals = Vec::with_capacity(n);
    for &x in &xs {
        // trapezoid on [0, Xi]; Phi(0) = 1
        let mut acc = 0.5;
        for (j, phi) in samples.iter().enumerate() {
            let xi = (j + 1) as f64 * dxi;
            let w = if j + 1 == m { 0.5 } else { 1.0 };
            acc += w * (phi * Complex64::new(0.0, xi * x).exp()).re;
        }
        vals.push(acc * dxi / std::f64::consts::PI);
    }

    // nonnegativity within tolerance, then renormalise
    let dx = (hi - lo) / (n.max(2) - 1) as f64;
    for v in &mut vals {
        if *v < -tol {
            return Err(PffError::MassLeakage { leak: -*v });
        }
        *v = v.max(0.0);
    }
    let mass: f64 = vals.iter().sum::<f64>() * dx;
    if (mass - 1.0).abs() > 0.01 {
        return Err(PffError::MassLeakage { leak: (mass - 1.0).abs() });
    }
    for v in &mut vals {
        *v /= mass;
    }
    Ok((xs, vals))
}

/// A bounded piecewise-constant test signal: value `values[i]` on
/// (breaks[i-1], breaks[i]), with values.len() = breaks.len() + 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSignal {
    pub breaks: Vec<f64>,
    pub values: Vec<f64>,
}

impl StepSignal {
    pub fn eval(&self, x: f64) -> f64 {
        let i = self.breaks.partition_point(|&b| b <= x);
        self.values[i]
    }
}

/// Count sign changes of a sampled sequence, treating |v| < band as zero.
fn sign_changes(vals: &[f64], band: f64) -> usize {
    let mut changes = 0;
    let mut last = 0i8;
    for &v in vals {
        let s = if v > band {
            1
        } else if v < -band {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
    }
    changes
}

/// Empirical variation-diminishing check: sample the test signal and its
/// discrete convolution with h on a uniform grid over [lo, hi] and count
/// sign changes of each (tolerance band tol * max|convolution|). Convolution
/// with a Polya frequency function never increases the count.
pub fn variation_diminishing_check(
    h: &PolyaFrequency,
    test: &StepSignal,
    lo: f64,
    hi: f64,
    n: usize,
    tol: f64,
) -> Result<(usize, usize), PffError> {
    // sample h on a window wide enough to hold essentially all of its mass
    let sigma = (2.0 * h.a + h.atoms.iter().map(|al| al * al).sum::<f64>()).sqrt();
    let spread = h.atoms.iter().map(|al| al.abs()).sum::<f64>() + 10.0 * sigma + 1.0;
    let (hy, hv) = if h.a == 0.0 && h.atoms.len() == 1 {
        // closed form for the single-exponential kernel
        let m = 4096usize;
        let (ylo, yhi) = (h.b - spread, h.b + spread);
        let ys: Vec<f64> = (0..m).map(|i| ylo + (yhi - ylo) * i as f64 / (m - 1) as f64).collect();
        let vs: Vec<f64> = ys.iter().map(|&y| single_atom_density(h.atoms[0], h.b, y)).collect();
        (ys, vs)
    } else {
        pff_sample(h, h.b - spread, h.b + spread, 4096, 1e-3)?
    };
    let dy = hy[1] - hy[0];
    let mass: f64 = hv.iter().sum::<f64>() * dy;
    if (mass - 1.0).abs() > 0.01 {
        return Err(PffError::MassLeakage { leak: (mass - 1.0).abs() });
    }

    let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n.max(2) - 1) as f64).collect();
    let before: Vec<f64> = xs.iter().map(|&x| test.eval(x)).collect();
    let after: Vec<f64> = xs
        .iter()
        .map(|&x| {
            hy.iter()
                .zip(&hv)
                .map(|(&y, &v)| test.eval(x - y) * v * dy)
                .sum::<f64>()
        })
        .collect();

    let max_after = after.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let nb = sign_changes(&before, 0.0);
    let na = sign_changes(&after, tol * max_after);
    Ok((nb, na))
}
