//! Finite-range matrix cocycles over a shift.
//!
//! A cocycle of range `r` assigns an invertible `d×d` matrix to every
//! admissible window `ω_{-r} … ω_r`; the generator at position `i` of a
//! sequence is the table entry for the window centred at `i`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, ScaledMatrix};
use crate::sft::{format_symbols, parse_symbols, ShiftSpace, Symbol, SymbolSource, DEFAULT_ENUMERATION_CAP};

/// Generators with a larger condition number are rejected.
pub const DEFAULT_CONDITION_CAP: f64 = 1e12;

/// On-disk form of a cocycle. Window keys are 1-based symbol lists of
/// length `2·range + 1`; matrices are row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocycleFile {
    pub dimension: usize,
    #[serde(default)]
    pub range: usize,
    #[serde(default = "default_beta")]
    pub beta: f64,
    pub matrices: BTreeMap<String, Vec<Vec<f64>>>,
}

fn default_beta() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteRangeCocycle {
    dimension: usize,
    range: usize,
    beta: f64,
    norm_bound: f64,
    table: BTreeMap<Vec<Symbol>, Matrix>,
}

impl FiniteRangeCocycle {
    pub fn new(dimension: usize, range: usize, beta: f64, table: BTreeMap<Vec<Symbol>, Matrix>) -> Result<Self> {
        Self::with_condition_cap(dimension, range, beta, table, DEFAULT_CONDITION_CAP)
    }

    pub fn with_condition_cap(
        dimension: usize,
        range: usize,
        beta: f64,
        table: BTreeMap<Vec<Symbol>, Matrix>,
        condition_cap: f64,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::InvalidParameter(format!("Hölder exponent {beta} is not in (0, 1]")));
        }
        if table.is_empty() {
            return Err(Error::InvalidParameter("cocycle table is empty".into()));
        }
        let mut max_norm: f64 = 0.0;
        for (window, m) in &table {
            if window.len() != 2 * range + 1 {
                return Err(Error::InvalidParameter(format!(
                    "window {} has length {}, expected {}",
                    format_symbols(window),
                    window.len(),
                    2 * range + 1
                )));
            }
            if m.nrows() != dimension || m.ncols() != dimension {
                return Err(Error::DimensionMismatch { expected: dimension, got: m.nrows().max(m.ncols()) });
            }
            let spec = linalg::singular_values(m).map_err(|e| {
                Error::NumericalBreakdown(format!("matrix for window {}: {e}", format_symbols(window)))
            })?;
            if spec.condition_number() > condition_cap {
                return Err(Error::NumericalBreakdown(format!(
                    "matrix for window {} has condition number {:.3e} above the cap {:.1e}",
                    format_symbols(window),
                    spec.condition_number(),
                    condition_cap
                )));
            }
            max_norm = max_norm.max(spec.norm());
        }
        Ok(Self { dimension, range, beta, norm_bound: max_norm.ln(), table })
    }

    /// Range-0 cocycle `symbol ↦ matrices[symbol]`.
    pub fn locally_constant(matrices: Vec<Matrix>, beta: f64) -> Result<Self> {
        let dimension = matrices.first().map_or(0, |m| m.nrows());
        let table = matrices
            .into_iter()
            .enumerate()
            .map(|(s, m)| (vec![s as Symbol], m))
            .collect();
        Self::new(dimension, 0, beta, table)
    }

    /// The same matrix on every symbol of an `alphabet`-letter shift.
    pub fn constant(matrix: Matrix, alphabet: usize) -> Result<Self> {
        Self::locally_constant(vec![matrix; alphabet], 1.0)
    }

    pub fn from_file(file: &CocycleFile) -> Result<Self> {
        let mut table = BTreeMap::new();
        for (key, rows) in &file.matrices {
            let window = parse_symbols(key)?;
            let m = linalg::from_rows(rows)?;
            if table.insert(window, m).is_some() {
                return Err(Error::Parse(format!("duplicate window {key:?}")));
            }
        }
        Self::new(file.dimension, file.range, file.beta, table)
    }

    pub fn to_file(&self) -> CocycleFile {
        CocycleFile {
            dimension: self.dimension,
            range: self.range,
            beta: self.beta,
            matrices: self
                .table
                .iter()
                .map(|(w, m)| (format_symbols(w), linalg::to_rows(m)))
                .collect(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn range(&self) -> usize {
        self.range
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `μ` with `‖A(ω)‖ ≤ e^μ` for every window.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    pub fn table(&self) -> &BTreeMap<Vec<Symbol>, Matrix> {
        &self.table
    }

    /// Check that every admissible window of the shift has a matrix.
    pub fn check_covers(&self, shift: &ShiftSpace) -> Result<()> {
        for window in shift.enumerate_words(2 * self.range + 1, DEFAULT_ENUMERATION_CAP)? {
            if !self.table.contains_key(&window) {
                return Err(Error::InadmissibleWindow { window: format_symbols(&window) });
            }
        }
        Ok(())
    }

    /// The generator at `position` of `source`.
    pub fn evaluate<S: SymbolSource + ?Sized>(&self, source: &S, position: isize) -> Result<&Matrix> {
        let r = self.range as isize;
        let window = source.symbols_in(position - r, position + r)?;
        self.table
            .get(&window)
            .ok_or_else(|| Error::InadmissibleWindow { window: format_symbols(&window) })
    }

    /// `A^n(σ^start x) = A(σ^{start+n-1}x) ⋯ A(σ^{start}x)`, log-scaled.
    pub fn product<S: SymbolSource + ?Sized>(&self, source: &S, n: usize, start: isize) -> Result<ScaledMatrix> {
        let mut acc = ScaledMatrix::identity(self.dimension);
        for i in 0..n as isize {
            acc.left_multiply(self.evaluate(source, start + i)?);
        }
        Ok(acc)
    }

    /// Same as [`product`](Self::product) but as a plain matrix.
    pub fn product_matrix<S: SymbolSource + ?Sized>(&self, source: &S, n: usize, start: isize) -> Result<Matrix> {
        let mut acc = Matrix::identity(self.dimension, self.dimension);
        for i in 0..n as isize {
            acc = self.evaluate(source, start + i)? * acc;
        }
        Ok(acc)
    }

    /// The induced cocycle on `Λ^k ℝ^d` (compound matrices, lexicographic
    /// basis).
    pub fn exterior_power(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.dimension {
            return Err(Error::InvalidParameter(format!(
                "exterior power {k} of a {}-dimensional cocycle",
                self.dimension
            )));
        }
        if k == 1 {
            return Ok(self.clone());
        }
        let table = self
            .table
            .iter()
            .map(|(w, m)| Ok((w.clone(), linalg::compound(m, k)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let mut norm_bound = f64::NEG_INFINITY;
        for m in table.values() {
            norm_bound = norm_bound.max(linalg::norm(m)?.ln());
        }
        Ok(Self {
            dimension: linalg::binomial(self.dimension, k),
            range: self.range,
            beta: self.beta,
            norm_bound,
            table,
        })
    }

    /// `P A(ω) P⁻¹` for every window.
    pub fn conjugated(&self, p: &Matrix) -> Result<Self> {
        let p_inv = p
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::NumericalBreakdown("conjugating matrix is singular".into()))?;
        let table = self.table.iter().map(|(w, m)| (w.clone(), p * m * &p_inv)).collect();
        Self::with_condition_cap(self.dimension, self.range, self.beta, table, f64::INFINITY)
    }

    /// Smallest `C` with `‖A(ω) − A(η)‖ ≤ C e^{-βN(ω,η)}` over all pairs of
    /// table windows whose first disagreement `N` is at most `depth`.
    /// Windows agreeing on `|i| ≤ r` share a matrix, so the value is exact
    /// once `depth ≥ r`.
    pub fn holder_constant(&self, depth: usize) -> Result<f64> {
        let entries: Vec<_> = self.table.iter().collect();
        let r = self.range;
        let mut best: f64 = 0.0;
        for (a, (wa, ma)) in entries.iter().enumerate() {
            for (wb, mb) in entries.iter().skip(a + 1) {
                let Some(n) = (0..=r).find(|&n| wa[r + n] != wb[r + n] || wa[r - n] != wb[r - n]) else {
                    continue;
                };
                if n > depth {
                    continue;
                }
                let diff = linalg::norm(&(*ma - *mb))?;
                best = best.max(diff * (self.beta * n as f64).exp());
            }
        }
        Ok(best)
    }
}

/// All exterior powers `Λ^1 … Λ^d` of one cocycle, built once.
#[derive(Debug, Clone)]
pub struct ExteriorTower {
    powers: Vec<FiniteRangeCocycle>,
}

impl ExteriorTower {
    pub fn new(cocycle: &FiniteRangeCocycle) -> Result<Self> {
        let powers = (1..=cocycle.dimension())
            .map(|k| cocycle.exterior_power(k))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { powers })
    }

    pub fn dimension(&self) -> usize {
        self.powers.len()
    }

    pub fn base(&self) -> &FiniteRangeCocycle {
        &self.powers[0]
    }

    /// `Λ^k`, for `1 ≤ k ≤ d`.
    pub fn power(&self, k: usize) -> &FiniteRangeCocycle {
        &self.powers[k - 1]
    }

    /// `log ‖Λ^k A^n(σ^start x)‖ = log(σ₁⋯σ_k)` for `n = 1..=steps`.
    pub fn log_volume_growth<S: SymbolSource + ?Sized>(
        &self,
        source: &S,
        k: usize,
        steps: usize,
        start: isize,
    ) -> Result<Vec<f64>> {
        let power = self.power(k);
        let mut acc = ScaledMatrix::identity(power.dimension());
        let mut out = Vec::with_capacity(steps);
        for i in 0..steps as isize {
            acc.left_multiply(power.evaluate(source, start + i)?);
            out.push(acc.log_norm()?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sft::{CyclicWord, Word};
    use approx::assert_relative_eq;

    fn m2(a: f64, b: f64, c: f64, d: f64) -> Matrix {
        Matrix::from_row_slice(2, 2, &[a, b, c, d])
    }

    fn two_diagonal() -> FiniteRangeCocycle {
        FiniteRangeCocycle::locally_constant(vec![m2(2.0, 0.0, 0.0, 0.5), m2(3.0, 0.0, 0.0, 1.0 / 3.0)], 1.0).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let a = two_diagonal();
        let w = Word::new(vec![1, 0, 1], 1);
        assert_eq!(a.evaluate(&w, 0).unwrap(), &m2(2.0, 0.0, 0.0, 0.5));

        let mut table = BTreeMap::new();
        table.insert(vec![0, 1, 0], m2(1.0, 1.0, 0.0, 1.0));
        table.insert(vec![1, 0, 1], m2(2.0, 0.0, 0.0, 1.0));
        let b = FiniteRangeCocycle::new(2, 1, 1.0, table).unwrap();
        let w = Word::new(vec![0, 1, 0], 1);
        assert_eq!(b.evaluate(&w, 0).unwrap(), &m2(1.0, 1.0, 0.0, 1.0));
        assert_eq!(b.evaluate(&w, 1).unwrap_err(), Error::WindowTooShort { position: 2 });
        let w = Word::new(vec![0, 0, 0], 1);
        assert!(matches!(b.evaluate(&w, 0), Err(Error::InadmissibleWindow { .. })));
    }

    #[test]
    fn product_examples() {
        let c = FiniteRangeCocycle::constant(m2(2.0, 0.0, 0.0, 0.5), 2).unwrap();
        let p = c.product_matrix(&CyclicWord::new(vec![0]).unwrap(), 5, 0).unwrap();
        assert_eq!(p, m2(32.0, 0.0, 0.0, 1.0 / 32.0));

        let m1 = m2(2.0, 1.0, 1.0, 1.0);
        let mm2 = m2(3.0, 1.0, 2.0, 1.0);
        let a = FiniteRangeCocycle::locally_constant(vec![m1.clone(), mm2.clone()], 1.0).unwrap();
        let w = CyclicWord::new(vec![0, 1]).unwrap();
        assert_eq!(a.product_matrix(&w, 2, 0).unwrap(), &mm2 * &m1);
        assert_eq!(a.product_matrix(&w, 2, 0).unwrap(), m2(7.0, 4.0, 5.0, 3.0));
        let scaled = a.product(&w, 2, 0).unwrap();
        assert_eq!(scaled.to_matrix(), m2(7.0, 4.0, 5.0, 3.0));
        let short = Word::from_start(vec![0]);
        assert_eq!(a.product(&short, 2, 0).unwrap_err(), Error::WindowTooShort { position: 1 });
    }

    #[test]
    fn exterior_power_examples() {
        let a = two_diagonal();
        let top = a.exterior_power(2).unwrap();
        assert_eq!(top.dimension(), 1);
        for m in top.table().values() {
            assert_relative_eq!(m[(0, 0)], 1.0, max_relative = 1e-15);
        }
        assert_eq!(a.exterior_power(1).unwrap(), a);
        assert!(a.exterior_power(3).is_err());
    }

    #[test]
    fn holder_examples() {
        let a = two_diagonal();
        let expected = linalg::norm(&(m2(2.0, 0.0, 0.0, 0.5) - m2(3.0, 0.0, 0.0, 1.0 / 3.0))).unwrap();
        assert_eq!(a.holder_constant(0).unwrap(), expected);
        assert_eq!(a.holder_constant(5).unwrap(), expected);
        let c = FiniteRangeCocycle::constant(m2(2.0, 0.0, 0.0, 0.5), 2).unwrap();
        assert_eq!(c.holder_constant(3).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(FiniteRangeCocycle::locally_constant(vec![m2(1.0, 2.0, 2.0, 4.0)], 1.0).is_err());
        assert!(FiniteRangeCocycle::locally_constant(vec![Matrix::identity(2, 2)], 1.5).is_err());
        assert!(FiniteRangeCocycle::locally_constant(vec![m2(1e7, 0.0, 0.0, 1e-7)], 1.0).is_err());
    }

    #[test]
    fn coverage_check() {
        let golden = ShiftSpace::new(&[vec![1, 1], vec![1, 0]]).unwrap();
        let mut table = BTreeMap::new();
        for w in [[0, 0, 0], [0, 0, 1], [0, 1, 0], [1, 0, 0], [1, 0, 1]] {
            table.insert(w.to_vec(), Matrix::identity(2, 2));
        }
        let a = FiniteRangeCocycle::new(2, 1, 1.0, table.clone()).unwrap();
        a.check_covers(&golden).unwrap();
        table.remove(&vec![1, 0, 1]);
        let b = FiniteRangeCocycle::new(2, 1, 1.0, table).unwrap();
        assert!(matches!(b.check_covers(&golden), Err(Error::InadmissibleWindow { .. })));
    }

    #[test]
    fn file_round_trip() {
        let a = two_diagonal();
        let text = serde_json::to_string(&a.to_file()).unwrap();
        let back: CocycleFile = serde_json::from_str(&text).unwrap();
        assert_eq!(FiniteRangeCocycle::from_file(&back).unwrap(), a);
    }
}
