//! Closed-form feasibility calculators for the parameter inequalities behind
//! the domination criteria.
//!
//! Everything here is plain double-precision arithmetic on explicit
//! formulas; no interval arithmetic is attempted, so verdicts exactly at a
//! boundary are subject to rounding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bisection tolerance for [`delta_max`].
pub const DELTA_TOLERANCE: f64 = 1e-12;

/// Parameters of the constant-data selection. `lambda` is the exponent list
/// (non-increasing), `mu` an upper bound for the log-norm of the generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityParams {
    pub epsilon: f64,
    pub epsilon0: f64,
    pub kappa: f64,
    pub beta: f64,
    pub mu: f64,
    pub lambda: Vec<f64>,
}

impl FeasibilityParams {
    pub fn validate(&self) -> Result<()> {
        positive("epsilon", self.epsilon)?;
        positive("kappa", self.kappa)?;
        // ε₀ = 0 is the degenerate limit and yields an empty interval
        if !(self.epsilon0 >= 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon0 must be non-negative, got {}", self.epsilon0)));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::InvalidParameter(format!("beta must lie in (0, 1], got {}", self.beta)));
        }
        if !self.mu.is_finite() {
            return Err(Error::InvalidParameter(format!("mu must be finite, got {}", self.mu)));
        }
        if self.lambda.iter().any(|l| !l.is_finite()) || self.lambda.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::CenterNotSorted);
        }
        Ok(())
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityResult {
    pub feasible: bool,
    /// `(lo, hi)`; empty when `lo >= hi`.
    pub gamma_interval: (f64, f64),
    /// Names of the constraints attaining the binding endpoints.
    pub binding_constraints: Vec<String>,
}

impl FeasibilityResult {
    fn from_bounds(lower: Vec<(&str, f64)>, upper: Vec<(&str, f64)>) -> Self {
        let lo = lower.iter().fold(0.0f64, |acc, &(_, v)| acc.max(v));
        let hi = upper.iter().fold(1.0f64, |acc, &(_, v)| acc.min(v)).max(0.0);
        let lo = lo.min(1.0);
        let binding = lower
            .iter()
            .filter(|&&(_, v)| v == lo && lo > 0.0)
            .chain(upper.iter().filter(|&&(_, v)| v == hi && hi < 1.0))
            .map(|(name, _)| (*name).to_string())
            .collect();
        FeasibilityResult { feasible: lo < hi, gamma_interval: (lo, hi), binding_constraints: binding }
    }

    pub fn contains(&self, gamma: f64) -> bool {
        self.feasible && gamma > self.gamma_interval.0 && gamma < self.gamma_interval.1
    }
}

/// Admissible `γ` for the constant-data selection at index `k` (1-based):
/// `0 < γ < min{ε₀/|λ_k − ε|, ε₀/|λ_{k+1} + ε|, (β − ε₀)/(μ + β + κ)}`,
/// provided the gap condition `λ_k − λ_{k+1} − 2ε > 0` holds.
pub fn gamma_feasible_constant(p: &FeasibilityParams, k: usize) -> Result<FeasibilityResult> {
    p.validate()?;
    if k == 0 || k >= p.lambda.len() {
        return Err(Error::InvalidParameter(format!(
            "index k = {k} must satisfy 1 <= k < {}",
            p.lambda.len()
        )));
    }
    let (lk, lk1) = (p.lambda[k - 1], p.lambda[k]);
    if !(lk > lk1) {
        return Err(Error::InvalidParameter(format!("need lambda_k > lambda_(k+1), got {lk} <= {lk1}")));
    }
    let half_gap = (lk - lk1) / 2.0;
    if p.epsilon >= half_gap {
        return Err(Error::Ineq4Violated { epsilon: p.epsilon, half_gap });
    }
    let upper = vec![
        ("ineq1", p.epsilon0 / (lk - p.epsilon).abs()),
        ("ineq2", p.epsilon0 / (lk1 + p.epsilon).abs()),
        ("ineq3", (p.beta - p.epsilon0) / (p.mu + p.beta + p.kappa)),
    ];
    Ok(FeasibilityResult::from_bounds(vec![], upper))
}

/// Admissible `γ` for two-dimensional δ-narrow data:
/// `(4δ + 2ε)/(λ₁ − λ₂ + ε) ≤ γ < min{(β − 2δ − ε)/(μ − λ₁ − δ − ε + β + κ),
/// (β + 2δ + ε)/(μ − λ₂ − δ + β + κ)}`, intersected with `(0, 1)`.
#[allow(clippy::too_many_arguments)]
pub fn gamma_feasible_narrow(
    beta: f64,
    mu: f64,
    lambda1: f64,
    lambda2: f64,
    delta: f64,
    epsilon: f64,
    kappa: f64,
) -> Result<FeasibilityResult> {
    if !(lambda1 > lambda2) {
        return Err(Error::InvalidParameter(format!("need lambda1 > lambda2, got {lambda1} <= {lambda2}")));
    }
    if !(delta >= 0.0) || !(epsilon >= 0.0) || !(kappa >= 0.0) {
        return Err(Error::InvalidParameter("delta, epsilon and kappa must be non-negative".into()));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidParameter(format!("beta must lie in (0, 1], got {beta}")));
    }
    let lower = vec![("gap", (4.0 * delta + 2.0 * epsilon) / (lambda1 - lambda2 + epsilon))];
    let upper = vec![
        ("top_growth", (beta - 2.0 * delta - epsilon) / (mu - lambda1 - delta - epsilon + beta + kappa)),
        ("second_growth", (beta + 2.0 * delta + epsilon) / (mu - lambda2 - delta + beta + kappa)),
    ];
    Ok(FeasibilityResult::from_bounds(lower, upper))
}

/// The limiting narrow-data condition with `ε, κ → 0` and `μ = λ₁ + δ`.
pub fn narrow_condition(beta: f64, lambda1: f64, lambda2: f64, delta: f64) -> bool {
    let gap = lambda1 - lambda2;
    let lhs = 4.0 * delta / gap;
    lhs < (beta - 2.0 * delta) / beta && lhs < (beta + delta) / (gap + beta)
}

/// Supremum of the `δ` satisfying [`narrow_condition`], by bisection.
pub fn delta_max(beta: f64, lambda1: f64, lambda2: f64) -> Result<f64> {
    if !(lambda1 > lambda2) {
        return Err(Error::InvalidParameter(format!("need lambda1 > lambda2, got {lambda1} <= {lambda2}")));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidParameter(format!("beta must lie in (0, 1], got {beta}")));
    }
    // the first branch already fails at δ = β/2
    let (mut lo, mut hi) = (0.0, beta / 2.0);
    while hi - lo > DELTA_TOLERANCE * hi.max(f64::MIN_POSITIVE) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if narrow_condition(beta, lambda1, lambda2, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The volume-preserving condition `2δ/(λ + δ) < (λβ − 2δ)/(λβ)`.
pub fn sl2_feasible(lambda: f64, beta: f64, delta: f64) -> Result<bool> {
    positive("lambda", lambda)?;
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidParameter(format!("beta must lie in (0, 1], got {beta}")));
    }
    if !(delta >= 0.0) {
        return Err(Error::InvalidParameter(format!("delta must be non-negative, got {delta}")));
    }
    Ok(2.0 * delta / (lambda + delta) < (lambda * beta - 2.0 * delta) / (lambda * beta))
}

/// Smallest narrowness `δ` compatible with Hölder exponents `θ` for a
/// conjugacy and `ω` for its inverse: `max(λ(1 − θ), λ(1 − ω)/ω)`.
pub fn conjugacy_delta(theta: f64, omega: f64, lambda: f64) -> Result<f64> {
    for (name, v) in [("theta", theta), ("omega", omega)] {
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::InvalidParameter(format!("{name} must lie in (0, 1], got {v}")));
        }
    }
    positive("lambda", lambda)?;
    Ok((lambda * (1.0 - theta)).max(lambda * (1.0 - omega) / omega))
}

/// The regularity threshold for `ωθ`: the positive root of `x² + x − 1`.
pub fn conjugacy_threshold() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}
