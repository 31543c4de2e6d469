//! Empirical zero measures of high-order derivatives and their limits.
//!
//! For a bell-shaped density f, write the zeros of f^(n) as n*alpha_{n,k}.
//! The weighted empirical measure sum_k alpha_{n,k}^2 delta_{alpha_{n,k}}
//! stays tight as n grows, and its partial limits consist of a Gaussian mass
//! at the origin plus atoms at the reciprocal crossing levels of the
//! level-crossing density. This module builds the empirical measures from
//! certified sign-change tables and reports trend diagnostics against a
//! candidate limit; convergence is diagnosed, never asserted.

use serde::{Deserialize, Serialize};

use crate::exact::{self, ExactDensity, ExactError};

/// Weighted empirical measure of the scaled zeros of f^(n).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroMeasure {
    pub n: u32,
    /// Sorted (location, weight) pairs with weight = location^2.
    pub atoms: Vec<(f64, f64)>,
}

impl ZeroMeasure {
    /// No zeros at all (n = 0 of a positive density).
    pub fn empty(n: u32) -> ZeroMeasure {
        ZeroMeasure { n, atoms: vec![] }
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|&(_, w)| w).sum()
    }

    pub fn max_location(&self) -> f64 {
        self.atoms.iter().map(|&(x, _)| x.abs()).fold(0.0, f64::max)
    }

    /// Integral of u against the measure.
    pub fn integrate(&self, u: &Hat) -> f64 {
        self.atoms.iter().map(|&(x, w)| w * u.eval(x)).sum()
    }
}

/// Candidate weak limit: Gaussian mass at the origin plus discrete atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitMeasure {
    /// Mass 2a sitting at 0 (a the Gaussian coefficient of the density).
    pub gaussian_mass: f64,
    /// (location, weight) atoms away from the origin.
    pub atoms: Vec<(f64, f64)>,
}

impl LimitMeasure {
    pub fn empty() -> LimitMeasure {
        LimitMeasure { gaussian_mass: 0.0, atoms: vec![] }
    }

    /// The Cauchy limit: atoms at +-1/(k pi) with weight 1/(k pi)^2,
    /// k = 1..=k_max.
    pub fn cauchy(k_max: u32) -> LimitMeasure {
        let mut atoms = Vec::new();
        for k in 1..=k_max {
            let s = 1.0 / (k as f64 * std::f64::consts::PI);
            atoms.push((-s, s * s));
            atoms.push((s, s * s));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        LimitMeasure { gaussian_mass: 0.0, atoms }
    }

    pub fn integrate(&self, u: &Hat) -> f64 {
        self.gaussian_mass * u.eval(0.0)
            + self.atoms.iter().map(|&(x, w)| w * u.eval(x)).sum::<f64>()
    }
}

/// Compactly supported piecewise-affine test function: 0 outside [lo, hi],
/// 1 on the inner plateau, affine ramps of the given width at both ends. A
/// flat top keeps the integral insensitive to small location errors of atoms
/// well inside the support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hat {
    pub lo: f64,
    pub hi: f64,
    pub ramp: f64,
}

impl Hat {
    /// Ramps default to a tenth of the support width.
    pub fn new(lo: f64, hi: f64) -> Hat {
        assert!(lo < hi, "hat support must be a proper interval");
        Hat { lo, hi, ramp: 0.1 * (hi - lo) }
    }

    /// A hat of half-width centred on the given limit atom location.
    pub fn around(center: f64, half_width: f64) -> Hat {
        Hat::new(center - half_width, center + half_width)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let d = (x - self.lo).min(self.hi - x);
        (d / self.ramp).clamp(0.0, 1.0)
    }
}

/// Scaled-zero measure of f^(n): enclosure midpoints divided by n, weights
/// squared locations. Sign touches (even-multiplicity zeros) are excluded,
/// matching the sign-change count.
pub fn zero_measure(f: &ExactDensity, n: u32) -> Result<ZeroMeasure, ExactError> {
    if n == 0 {
        return Ok(ZeroMeasure::empty(0));
    }
    let table = exact::sign_changes(f, n)?;
    let atoms = table
        .zeros
        .iter()
        .map(|enc| {
            let x = enc.midpoint_f64() / n as f64;
            (x, x * x)
        })
        .collect();
    Ok(ZeroMeasure { n, atoms })
}

/// Discrepancy of one empirical measure against the limit for one hat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub hat: Hat,
    /// (n, |integral difference|) for each supplied measure, in input order.
    pub discrepancies: Vec<(u32, f64)>,
}

/// Weak-convergence trend report: per test function, the absolute difference
/// of integrals for each measure in the sequence. The caller supplies
/// measures for increasing n and reads the trend; no limit is asserted.
pub fn compare_to_limit(
    measures: &[ZeroMeasure],
    limit: &LimitMeasure,
    tests: &[Hat],
) -> Vec<ConvergenceRow> {
    tests
        .iter()
        .map(|hat| {
            let target = limit.integrate(hat);
            let discrepancies = measures
                .iter()
                .map(|m| (m.n, (m.integrate(hat) - target).abs()))
                .collect();
            ConvergenceRow { hat: *hat, discrepancies }
        })
        .collect()
}

/// Flat (n, alpha_{n,k}) table over n = 1..=n_max, as plotted location data.
pub fn figure3_data(f: &ExactDensity, n_max: u32) -> Result<Vec<(u32, f64)>, ExactError> {
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let m = zero_measure(f, n)?;
        rows.extend(m.atoms.iter().map(|&(x, _)| (n, x)));
    }
    Ok(rows)
}
