//! Shadowing estimates that transfer periodic data to arbitrary orbits.
//!
//! A window `ω_{-n} … ω_n` is closed into a periodic word `p` agreeing with
//! it on `|i| ≤ n`. Along the two orbits the generators differ by
//! `E_{n,i} = A(σ^i ω) − A(σ^i p)`, which the Hölder bound controls by
//! `C₁ e^{−β(n−|i|)}`; singular values of products along the two orbits then
//! differ by at most the norm of the accumulated error (Weyl). This module
//! evaluates each of those quantities so the chain of estimates can be
//! checked numerically.

use rayon::prelude::*;
use serde::Serialize;

use crate::cocycle::FiniteRangeCocycle;
use crate::domination::fit_line;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, ScaledMatrix};
use crate::sample::{sample_orbits, Orbit, SampleSpec};
use crate::sft::{CyclicWord, ShiftSpace, Word};

pub use crate::bounds::FeasibilityParams;

/// Relative slack allowed when comparing a computed value with its bound.
const BOUND_SLACK: f64 = 1e-12;

/// A target window and the periodic word that shadows it. Both are indexed
/// so that position 0 is `ω_0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShadowPair {
    #[serde(serialize_with = "serialize_display")]
    pub target: Word,
    #[serde(serialize_with = "serialize_display")]
    pub periodic: CyclicWord,
    /// `p_i = ω_i` for `|i| ≤ radius`.
    pub radius: usize,
    pub connector_len: usize,
}

fn serialize_display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl ShadowPair {
    pub fn period(&self) -> usize {
        self.periodic.period()
    }
}

/// Close `ω_{-n..=n}` into a periodic orbit of period `2n + 1 + ℓ_n`,
/// `ℓ_n ≤ ℓ`. The full `omega` window is kept as the target.
pub fn shadow_pair(omega: &Word, n: usize, shift: &ShiftSpace) -> Result<ShadowPair> {
    let n_i = n as isize;
    let core = omega.slice(-n_i, n_i)?;
    shift.require_admissible(omega.symbols())?;
    let closed = shift.close_word(&Word::from_start(core.symbols().to_vec()))?;
    let connector_len = closed.period() - core.len();
    Ok(ShadowPair {
        target: omega.clone(),
        periodic: closed.rotated(n_i),
        radius: n,
        connector_len,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorTermRow {
    pub i: isize,
    /// `‖A(σ^i ω) − A(σ^i p)‖`.
    pub norm: f64,
    /// `C₁ e^{−β(n−|i|)}`.
    pub bound: f64,
    pub pass: bool,
}

/// `‖E_{n,i}‖` against its Hölder bound for every `i` in `positions`, with
/// `C₁` the exact Hölder constant of the cocycle.
pub fn error_terms(
    cocycle: &FiniteRangeCocycle,
    pair: &ShadowPair,
    positions: impl IntoIterator<Item = isize>,
) -> Result<Vec<ErrorTermRow>> {
    let c1 = cocycle.holder_constant(pair.radius.max(cocycle.range()))?;
    positions
        .into_iter()
        .map(|i| {
            if i.unsigned_abs() > pair.radius {
                return Err(Error::InvalidParameter(format!(
                    "position {i} lies outside the agreement radius {}",
                    pair.radius
                )));
            }
            let a = cocycle.evaluate(&pair.target, i)?;
            let b = cocycle.evaluate(&pair.periodic, i)?;
            let norm = linalg::norm(&(a - b))?;
            let bound = c1 * (-cocycle.beta() * (pair.radius as f64 - i.abs() as f64)).exp();
            Ok(ErrorTermRow { i, norm, bound, pass: norm <= bound * (1.0 + BOUND_SLACK) })
        })
        .collect()
}

/// Largest `(1/n) log‖A^n(x)‖ − λ₁` over the sample, `n = 1..=N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KalininReport {
    pub lambda: f64,
    pub excess: Vec<f64>,
    pub worst_orbit: Vec<usize>,
    pub orbit_labels: Vec<String>,
}

impl KalininReport {
    /// `n · excess_n`; bounded in `n` when the growth bound holds.
    pub fn scaled_excess(&self) -> Vec<f64> {
        self.excess.iter().enumerate().map(|(i, e)| (i + 1) as f64 * e).collect()
    }

    /// Least-squares slope of `n · excess_n` against `n`.
    pub fn growth_slope(&self) -> Result<f64> {
        let pts: Vec<(f64, f64)> = self
            .scaled_excess()
            .into_iter()
            .enumerate()
            .map(|(i, v)| ((i + 1) as f64, v))
            .collect();
        Ok(fit_line(&pts)?.slope)
    }

    /// `sup_n n · excess_n`, i.e. `log C` in `‖A^n‖ ≤ C e^{nλ₁}`.
    pub fn log_constant(&self) -> f64 {
        self.scaled_excess().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Empirical excess of the norm growth over `λ₁`.
pub fn kalinin_gap(
    cocycle: &FiniteRangeCocycle,
    shift: &ShiftSpace,
    lambda: f64,
    steps: usize,
    sample: &SampleSpec,
) -> Result<KalininReport> {
    if steps == 0 {
        return Err(Error::InsufficientSamples("need at least one step".into()));
    }
    let orbits = sample_orbits(shift, sample, cocycle.range(), steps + cocycle.range())?;
    let per_orbit = orbits
        .par_iter()
        .map(|o| {
            let mut acc = ScaledMatrix::identity(cocycle.dimension());
            let mut out = Vec::with_capacity(steps);
            for i in 0..steps as isize {
                acc.left_multiply(cocycle.evaluate(o, i)?);
                out.push(acc.log_norm()? / (i + 1) as f64 - lambda);
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut excess = vec![f64::NEG_INFINITY; steps];
    let mut worst_orbit = vec![0; steps];
    for (idx, row) in per_orbit.iter().enumerate() {
        for (n, &v) in row.iter().enumerate() {
            if v > excess[n] {
                excess[n] = v;
                worst_orbit[n] = idx;
            }
        }
    }
    Ok(KalininReport {
        lambda,
        excess,
        worst_orbit,
        orbit_labels: orbits.iter().map(Orbit::label).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinomialBound {
    pub kappa: f64,
    pub n_min: usize,
    pub n_max: usize,
    /// `max C(n,k) e^{−nkκ}` over `1 ≤ k ≤ n`, `n_min ≤ n ≤ n_max`.
    pub c_kappa: f64,
    pub argmax: (usize, usize),
    /// Pairs where the ratio exceeds 1, i.e. where `C_κ = 1` fails.
    pub pairs_above_one: usize,
}

/// Scan `C(n,k) ≤ C_κ e^{nkκ}` over `1 ≤ k ≤ n ≤ n_max`.
pub fn binom_bound_check(kappa: f64, n_max: usize) -> Result<BinomialBound> {
    binom_bound_scan(kappa, 1, n_max)
}

/// As [`binom_bound_check`], restricted to `n ≥ n_min`.
pub fn binom_bound_scan(kappa: f64, n_min: usize, n_max: usize) -> Result<BinomialBound> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidParameter(format!("kappa must be positive, got {kappa}")));
    }
    let n_min = n_min.max(1);
    if n_max < n_min {
        return Err(Error::InvalidParameter(format!("empty range {n_min}..={n_max}")));
    }
    let mut ln_fact = vec![0.0f64; n_max + 1];
    for i in 1..=n_max {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }
    let mut best = (f64::NEG_INFINITY, (0, 0));
    let mut above = 0;
    for n in n_min..=n_max {
        for k in 1..=n {
            let log_ratio = ln_fact[n] - ln_fact[k] - ln_fact[n - k] - kappa * (n * k) as f64;
            if log_ratio > 0.0 {
                above += 1;
            }
            if log_ratio > best.0 {
                best = (log_ratio, (n, k));
            }
        }
    }
    Ok(BinomialBound {
        kappa,
        n_min,
        n_max,
        c_kappa: best.0.exp(),
        argmax: best.1,
        pairs_above_one: above,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularComparisonRow {
    pub i: usize,
    pub j: usize,
    /// `σ_j(A^i(ω))`.
    pub sigma_target: f64,
    /// `σ_j(A^i(p))`.
    pub sigma_periodic: f64,
    pub difference: f64,
    /// `∏(‖B_m‖ + ‖E_m‖) − ∏‖B_m‖` with `B_m = A(σ^m p)`, an upper bound for
    /// `‖A^i(ω) − A^i(p)‖` and hence, by Weyl, for the difference.
    pub bound: f64,
    pub pass: bool,
}

/// Compare singular values of `A^i(ω)` and `A^i(p)` for
/// `⌊γn⌋ ≤ i ≤ ⌊γn⌋ + ℓ`, where `p` shadows `ω` up to radius `n`.
pub fn singular_comparison(
    cocycle: &FiniteRangeCocycle,
    shift: &ShiftSpace,
    omega: &Word,
    gamma: f64,
    n: usize,
) -> Result<Vec<SingularComparisonRow>> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!("gamma must lie in (0, 1), got {gamma}")));
    }
    let pair = shadow_pair(omega, n, shift)?;
    let first = (gamma * n as f64).floor() as usize;
    let last = first + shift.closing_constant();
    let rows: Vec<Vec<SingularComparisonRow>> = (first..=last)
        .into_par_iter()
        .map(|i| comparison_rows(cocycle, &pair, i))
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn comparison_rows(cocycle: &FiniteRangeCocycle, pair: &ShadowPair, i: usize) -> Result<Vec<SingularComparisonRow>> {
    let d = cocycle.dimension();
    let mut target = Matrix::identity(d, d);
    let mut periodic = Matrix::identity(d, d);
    let mut with_error = 1.0;
    let mut without_error = 1.0;
    for m in 0..i as isize {
        let a = cocycle.evaluate(&pair.target, m)?;
        let b = cocycle.evaluate(&pair.periodic, m)?;
        let b_norm = linalg::norm(b)?;
        let e_norm = linalg::norm(&(a - b))?;
        with_error *= b_norm + e_norm;
        without_error *= b_norm;
        target = a * target;
        periodic = b * periodic;
    }
    let bound = with_error - without_error;
    let st = linalg::singular_values_raw(&target)?;
    let sp = linalg::singular_values_raw(&periodic)?;
    let scale = st[0].max(sp[0]);
    if !bound.is_finite() || !scale.is_finite() {
        return Err(Error::NumericalBreakdown(format!("products of length {i} overflow")));
    }
    Ok((0..d)
        .map(|j| {
            let difference = (st[j] - sp[j]).abs();
            SingularComparisonRow {
                i,
                j: j + 1,
                sigma_target: st[j],
                sigma_periodic: sp[j],
                difference,
                bound,
                pass: difference <= bound + BOUND_SLACK * scale,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sft::{parse_symbols, SymbolSource};
    use std::collections::BTreeMap;

    fn m2(a: f64, b: f64, c: f64, d: f64) -> Matrix {
        Matrix::from_row_slice(2, 2, &[a, b, c, d])
    }

    fn golden() -> ShiftSpace {
        ShiftSpace::new(&[vec![1, 1], vec![1, 0]]).unwrap()
    }

    fn positive_pair() -> FiniteRangeCocycle {
        FiniteRangeCocycle::locally_constant(vec![m2(2.0, 1.0, 1.0, 1.0), m2(3.0, 1.0, 2.0, 1.0)], 1.0).unwrap()
    }

    fn centered(s: &str) -> Word {
        Word::centered(parse_symbols(s).unwrap()).unwrap()
    }

    #[test]
    fn shadow_pair_examples() {
        let full = ShiftSpace::full(2).unwrap();
        let w = centered("1,2,2,1,1,1,2");
        let pair = shadow_pair(&w, 3, &full).unwrap();
        assert_eq!(pair.period(), 7);
        for i in -3..=3 {
            assert_eq!(pair.periodic.symbol_at(i), w.symbol_at(i));
        }

        let pair = shadow_pair(&centered("1,2,1,1,2"), 2, &golden()).unwrap();
        assert_eq!(pair.period(), 5);
        assert_eq!(pair.connector_len, 0);

        let w = centered("2,1,1,1,2");
        let pair = shadow_pair(&w, 2, &golden()).unwrap();
        assert_eq!(pair.period(), 6);
        assert_eq!(pair.connector_len, 1);
        for i in -2..=2 {
            assert_eq!(pair.periodic.symbol_at(i), w.symbol_at(i));
        }
        assert!(golden().is_admissible_cyclic(&pair.periodic).unwrap());
    }

    #[test]
    fn error_terms_vanish_for_locally_constant() {
        let w = centered("2,1,1,1,2,1,2");
        let pair = shadow_pair(&w, 3, &golden()).unwrap();
        let rows = error_terms(&positive_pair(), &pair, -3..=3).unwrap();
        assert!(rows.iter().all(|r| r.norm == 0.0 && r.pass));
        assert!(error_terms(&positive_pair(), &pair, [4]).is_err());
    }

    #[test]
    fn error_terms_for_range_one() {
        // generator depends on the right neighbour only through a shear
        let mut table = BTreeMap::new();
        for a in 0..2u16 {
            for b in 0..2u16 {
                for c in 0..2u16 {
                    let shear = if c == 1 { 1.0 } else { 0.0 };
                    table.insert(vec![a, b, c], m2(2.0 + b as f64, shear, 0.0, 0.5));
                }
            }
        }
        let a = FiniteRangeCocycle::new(2, 1, 1.0, table).unwrap();
        let full = ShiftSpace::full(2).unwrap();
        // radius 3 window; closing with radius 2 leaves positions ±3 free
        let w = centered("2,1,1,1,2,1,2");
        let pair = shadow_pair(&w, 2, &full).unwrap();
        let rows = error_terms(&a, &pair, -2..=2).unwrap();
        for r in &rows {
            if r.i.abs() <= 1 {
                assert_eq!(r.norm, 0.0);
            }
            assert!(r.pass, "{r:?}");
        }
        // the periodic word continues with ω_{-2} after ω_2, unlike ω_3 = 2
        assert!(rows.iter().any(|r| r.i == 2 && r.norm > 0.0));
    }

    #[test]
    fn kalinin_examples() {
        let full = ShiftSpace::full(2).unwrap();
        let c = FiniteRangeCocycle::constant(m2(2.0, 0.0, 0.0, 0.5), 2).unwrap();
        let rep = kalinin_gap(&c, &full, 2f64.ln(), 20, &SampleSpec::new(4, 4, 3)).unwrap();
        assert!(rep.excess.iter().all(|e| e.abs() < 1e-14));

        let two = FiniteRangeCocycle::locally_constant(vec![m2(2.0, 0.0, 0.0, 0.5), m2(3.0, 0.0, 0.0, 1.0 / 3.0)], 1.0)
            .unwrap();
        let rep = kalinin_gap(&two, &full, 3f64.ln(), 30, &SampleSpec::new(6, 10, 3)).unwrap();
        assert!(rep.excess.iter().all(|&e| e <= 1e-14));
        assert!(rep.excess.iter().any(|&e| e.abs() <= 1e-14));
    }

    #[test]
    fn binomial_examples() {
        let b = binom_bound_scan(1.0, 2, 100).unwrap();
        assert!(b.c_kappa <= 1.0);
        assert_eq!(b.pairs_above_one, 0);
        let b = binom_bound_check(0.1, 200).unwrap();
        assert!(b.c_kappa.is_finite() && b.c_kappa > 1.0);
        assert!(b.argmax.0 < 200);
        assert!(binom_bound_check(0.0, 10).is_err());
    }

    #[test]
    fn comparison_is_exact_for_locally_constant() {
        let full = ShiftSpace::full(2).unwrap();
        let symbols: Vec<u16> = (0..81).map(|i| ((i * 7 + i / 3) % 2) as u16).collect();
        let w = Word::centered(symbols).unwrap();
        let rows = singular_comparison(&positive_pair(), &full, &w, 0.3, 40).unwrap();
        assert_eq!(rows.len(), 2);
        for r in &rows {
            assert_eq!(r.i, 12);
            assert_eq!(r.difference, 0.0);
            assert!(r.pass);
        }
        assert!(singular_comparison(&positive_pair(), &full, &w, 1.2, 40).is_err());
    }

    #[test]
    fn comparison_rows_for_constant_cocycle_are_identical() {
        let c = FiniteRangeCocycle::constant(m2(2.0, 0.0, 0.0, 0.5), 2).unwrap();
        let w = centered("2,1,1,1,2,1,1,1,2");
        let rows = singular_comparison(&c, &golden(), &w, 0.5, 4).unwrap();
        // i in {2, 3} with ℓ = 1
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.sigma_target == r.sigma_periodic));
    }
}
