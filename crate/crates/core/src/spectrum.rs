//! Periodic eigenvalue data.
//!
//! For a periodic point `p` of period `n` the exponents are
//! `χ_i = (1/n) log|α_i|`, with `α_i` the eigenvalues of the return map
//! `A^n(p)` ordered by modulus. They are computed as successive differences
//! of `log ρ(Λ^k A^n(p)) = log|α_1 ⋯ α_k|`, which keeps every partial sum a
//! top-eigenvalue problem and makes the top-degree term exactly
//! `log|det A^n(p)|`.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::cocycle::{ExteriorTower, FiniteRangeCocycle};
use crate::error::{Error, Result};
use crate::linalg::ScaledMatrix;
use crate::sample::periodic_orbits;
use crate::sft::{CyclicWord, ShiftSpace};

/// Absolute tolerance for calling periodic data constant.
pub const CONSTANT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicExponents {
    #[serde(serialize_with = "serialize_display")]
    pub orbit: CyclicWord,
    /// Non-increasing, length `d`.
    pub exponents: Vec<f64>,
}

fn serialize_display<T: fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Exponents of the periodic orbit `p`.
pub fn periodic_exponents(cocycle: &FiniteRangeCocycle, p: &CyclicWord) -> Result<PeriodicExponents> {
    periodic_exponents_with(&ExteriorTower::new(cocycle)?, p)
}

/// As [`periodic_exponents`], reusing precomputed exterior powers.
pub fn periodic_exponents_with(tower: &ExteriorTower, p: &CyclicWord) -> Result<PeriodicExponents> {
    let n = p.period();
    let mut previous = 0.0;
    let mut exponents = Vec::with_capacity(tower.dimension());
    for k in 1..=tower.dimension() {
        let power = tower.power(k);
        let mut acc = ScaledMatrix::identity(power.dimension());
        for i in 0..n as isize {
            acc.left_multiply(power.evaluate(p, i)?);
        }
        let log_rho = acc.log_spectral_radius()?;
        if !log_rho.is_finite() {
            return Err(Error::NumericalBreakdown(format!("return map of {p} is singular")));
        }
        exponents.push((log_rho - previous) / n as f64);
        previous = log_rho;
    }
    exponents.sort_by(|a, b| b.total_cmp(a));
    Ok(PeriodicExponents { orbit: p.clone(), exponents })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_witness: String,
    pub hi_witness: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub max_period: usize,
    pub dimension: usize,
    /// One interval per exponent index.
    pub intervals: Vec<ExponentInterval>,
    pub orbits: Vec<PeriodicExponents>,
}

/// Exponent intervals over every periodic orbit of period `1..=max_period`.
pub fn spectrum_report(cocycle: &FiniteRangeCocycle, shift: &ShiftSpace, max_period: usize) -> Result<SpectrumReport> {
    if max_period == 0 {
        return Err(Error::InvalidParameter("max period must be at least 1".into()));
    }
    let tower = ExteriorTower::new(cocycle)?;
    let words = periodic_orbits(shift, max_period)?;
    let orbits = words
        .par_iter()
        .map(|p| periodic_exponents_with(&tower, p))
        .collect::<Result<Vec<_>>>()?;
    let d = cocycle.dimension();
    let intervals = (0..d)
        .map(|i| {
            let values = orbits.iter().map(|o| o.exponents[i]);
            let lo = values.clone().fold(f64::INFINITY, f64::min);
            let hi = values.fold(f64::NEG_INFINITY, f64::max);
            ExponentInterval {
                lo,
                hi,
                lo_witness: first_witness(&orbits, i, lo),
                hi_witness: first_witness(&orbits, i, hi),
            }
        })
        .collect();
    Ok(SpectrumReport { max_period, dimension: d, intervals, orbits })
}

// Shortest (then lexicographically first) orbit within rounding of `target`.
fn first_witness(orbits: &[PeriodicExponents], i: usize, target: f64) -> String {
    let tol = 1e-12 * target.abs().max(1.0);
    orbits
        .iter()
        .find(|o| (o.exponents[i] - target).abs() <= tol)
        .map(|o| o.orbit.to_string())
        .unwrap_or_default()
}

impl SpectrumReport {
    pub fn lower(&self) -> Vec<f64> {
        self.intervals.iter().map(|iv| iv.lo).collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        self.intervals.iter().map(|iv| iv.hi).collect()
    }

    /// The midpoint center and the half-width δ that makes the data narrow
    /// around it.
    pub fn tightest_center(&self) -> (Vec<f64>, f64) {
        let center = self.intervals.iter().map(|iv| 0.5 * (iv.lo + iv.hi)).collect();
        let delta = self
            .intervals
            .iter()
            .map(|iv| 0.5 * (iv.hi - iv.lo))
            .fold(0.0, f64::max);
        (center, delta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    Constant,
    Narrow,
    Neither,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Constant => "Constant",
            Classification::Narrow => "Narrow",
            Classification::Neither => "Neither",
        })
    }
}

/// Constant if every interval collapses onto `center` (within
/// [`CONSTANT_TOLERANCE`]), Narrow if every interval lies inside
/// `[λ_i − δ, λ_i + δ]`, Neither otherwise.
pub fn classify(report: &SpectrumReport, center: &[f64], delta: f64) -> Result<Classification> {
    if center.len() != report.dimension {
        return Err(Error::DimensionMismatch { expected: report.dimension, got: center.len() });
    }
    if center.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::CenterNotSorted);
    }
    if !(delta >= 0.0) {
        return Err(Error::InvalidParameter(format!("delta must be non-negative, got {delta}")));
    }
    let within = |tol: f64| {
        report
            .intervals
            .iter()
            .zip(center)
            .all(|(iv, &c)| iv.lo >= c - tol && iv.hi <= c + tol)
    };
    Ok(if within(CONSTANT_TOLERANCE) {
        Classification::Constant
    } else if within(delta) {
        Classification::Narrow
    } else {
        Classification::Neither
    })
}
