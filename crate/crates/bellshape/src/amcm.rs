//! Densities that are completely monotone on each half-line.
//!
//! The non-Polya factor of a bell-shaped function is a function g that is
//! absolutely monotone on (-inf, 0) and completely monotone on (0, inf):
//! g(x) is the Laplace transform of a Bernstein measure mu_plus for x > 0
//! and of mu_minus (in -x) for x < 0, plus an atom of mass m at 0. Its
//! Fourier transform is
//!
//! Phi_g(xi) = m + int 1/(i xi + s) mu_plus(ds) - int 1/(i xi - s) mu_minus(ds).
//!
//! Measures are modelled as finite atom lists plus an optional
//! piecewise-affine density, which covers every case exercised here.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::quad;

/// A nonnegative measure on (0, inf): finite atoms plus an optional
/// piecewise-affine density between grid points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernsteinMeasure {
    /// (location, mass) pairs; locations positive, masses nonnegative.
    pub atoms: Vec<(f64, f64)>,
    /// Density grid (strictly increasing, positive) and nonnegative values,
    /// interpolated linearly; empty means no continuous part.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub density_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub density_values: Vec<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum AmCmError {
    #[error("measure location {0} must be positive")]
    NonPositiveLocation(f64),
    #[error("measure mass/density {0} must be nonnegative")]
    NegativeMass(f64),
    #[error("density grid must be strictly increasing with one value per point")]
    BadDensityGrid,
    #[error("atom mass at zero m = {0} must be nonnegative")]
    NegativeM(f64),
    #[error("exact complete-monotonicity spot check supports atom-only measures")]
    DensityUnsupported,
    #[error("evaluation point must be nonzero")]
    ZeroPoint,
}

impl BernsteinMeasure {
    pub fn from_atoms(atoms: Vec<(f64, f64)>) -> BernsteinMeasure {
        BernsteinMeasure { atoms, density_grid: vec![], density_values: vec![] }
    }

    pub fn empty() -> BernsteinMeasure {
        BernsteinMeasure::from_atoms(vec![])
    }

    pub fn validate(&self) -> Result<(), AmCmError> {
        for &(s, w) in &self.atoms {
            if s <= 0.0 {
                return Err(AmCmError::NonPositiveLocation(s));
            }
            if w < 0.0 {
                return Err(AmCmError::NegativeMass(w));
            }
        }
        if self.density_grid.len() != self.density_values.len()
            || self.density_grid.len() == 1
        {
            return Err(AmCmError::BadDensityGrid);
        }
        for w in self.density_grid.windows(2) {
            if w[1] <= w[0] {
                return Err(AmCmError::BadDensityGrid);
            }
        }
        if let Some(&s0) = self.density_grid.first() {
            if s0 <= 0.0 {
                return Err(AmCmError::NonPositiveLocation(s0));
            }
        }
        for &v in &self.density_values {
            if v < 0.0 {
                return Err(AmCmError::NegativeMass(v));
            }
        }
        Ok(())
    }

    fn has_density(&self) -> bool {
        !self.density_grid.is_empty()
    }

    /// Piecewise-linear density value at s (0 outside the grid).
    fn density_at(&self, s: f64) -> f64 {
        let g = &self.density_grid;
        if g.is_empty() || s < g[0] || s > *g.last().unwrap() {
            return 0.0;
        }
        let i = g.partition_point(|&x| x <= s).min(g.len() - 1).max(1) - 1;
        let t = (s - g[i]) / (g[i + 1] - g[i]);
        self.density_values[i] * (1.0 - t) + self.density_values[i + 1] * t
    }

    /// int e^{-s y} dmu(s): atoms exactly, density by quadrature.
    fn laplace(&self, y: f64, tol: f64) -> f64 {
        let mut v: f64 = self.atoms.iter().map(|&(s, w)| w * (-s * y).exp()).sum();
        if self.has_density() {
            let (a, b) = (self.density_grid[0], *self.density_grid.last().unwrap());
            let (d, _) = quad::integrate(|s| self.density_at(s) * (-s * y).exp(), a, b, tol);
            v += d;
        }
        v
    }

    /// int 1/(i xi + sigma s) dmu(s) with sigma = +-1.
    fn resolvent(&self, xi: f64, sigma: f64, tol: f64) -> Complex64 {
        let kernel = |s: f64| {
            let d = xi * xi + s * s;
            Complex64::new(sigma * s / d, -xi / d)
        };
        let mut v: Complex64 = self.atoms.iter().map(|&(s, w)| w * kernel(s)).sum();
        if self.has_density() {
            let (a, b) = (self.density_grid[0], *self.density_grid.last().unwrap());
            let (re, _) = quad::integrate(|s| self.density_at(s) * kernel(s).re, a, b, tol);
            let (im, _) = quad::integrate(|s| self.density_at(s) * kernel(s).im, a, b, tol);
            v += Complex64::new(re, im);
        }
        v
    }
}

/// A density absolutely monotone on the left half-line and completely
/// monotone on the right one, with an atom of mass m at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmCmFunction {
    pub mu_plus: BernsteinMeasure,
    pub mu_minus: BernsteinMeasure,
    pub m: f64,
}

impl AmCmFunction {
    pub fn validate(&self) -> Result<(), AmCmError> {
        if self.m < 0.0 {
            return Err(AmCmError::NegativeM(self.m));
        }
        self.mu_plus.validate()?;
        self.mu_minus.validate()
    }
}

/// g(x) for x != 0: the Laplace transform of mu_plus at x (x > 0) or of
/// mu_minus at -x (x < 0).
pub fn amcm_eval(g: &AmCmFunction, x: f64, tol: f64) -> Result<f64, AmCmError> {
    if x == 0.0 {
        return Err(AmCmError::ZeroPoint);
    }
    Ok(if x > 0.0 {
        g.mu_plus.laplace(x, tol)
    } else {
        g.mu_minus.laplace(-x, tol)
    })
}

/// Phi_g(xi) = m + int 1/(i xi + s) mu_plus(ds) - int 1/(i xi - s) mu_minus(ds).
pub fn amcm_transform(g: &AmCmFunction, xi: f64, tol: f64) -> Result<Complex64, AmCmError> {
    if xi == 0.0 {
        return Err(AmCmError::ZeroPoint);
    }
    Ok(Complex64::new(g.m, 0.0) + g.mu_plus.resolvent(xi, 1.0, tol)
        - g.mu_minus.resolvent(xi, -1.0, tol))
}

/// Outcome of the exact complete-monotonicity spot check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CmVerdict {
    Pass,
    /// (-1)^j g^(j)(x) dipped below zero at this point and order.
    Fail { x: f64, order: u32 },
}

/// Check (-1)^j g^(j)(x) >= 0 for j <= j_max at each positive x, and the
/// mirrored condition for g(-x). Derivatives are exact sums of
/// mass * s^j e^{-s x} terms, so the measures must be atom-only.
pub fn cm_spotcheck(
    g: &AmCmFunction,
    x_points: &[f64],
    j_max: u32,
) -> Result<CmVerdict, AmCmError> {
    g.validate()?;
    if g.mu_plus.has_density() || g.mu_minus.has_density() {
        return Err(AmCmError::DensityUnsupported);
    }
    for &x in x_points {
        if x <= 0.0 {
            return Err(AmCmError::ZeroPoint);
        }
        for (mu, sign) in [(&g.mu_plus, 1.0f64), (&g.mu_minus, -1.0f64)] {
            for j in 0..=j_max {
                // (-1)^j d^j/dx^j L mu(x) = int s^j e^{-s x} dmu(s) >= 0;
                // evaluate the alternating form literally as a guard against
                // representation bugs
                let d: f64 = mu
                    .atoms
                    .iter()
                    .map(|&(s, w)| w * (-s).powi(j as i32) * (-s * x).exp())
                    .sum();
                let v = (-1.0f64).powi(j as i32) * d;
                if v < -1e-300 {
                    return Ok(CmVerdict::Fail { x: sign * x, order: j });
                }
            }
        }
    }
    Ok(CmVerdict::Pass)
}
