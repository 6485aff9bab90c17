//! Small dense linear algebra on top of `nalgebra`: singular spectra,
//! compound matrices, log-scaled products and subspace angles.

use nalgebra::{DMatrix, Schur};
use serde::Serialize;

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;

// Renormalize a running product once its norm leaves [e^-300, e^300].
const RESCALE_LOG_BOUND: f64 = 300.0;

/// Non-increasing singular values `σ₁ ≥ … ≥ σ_d > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularSpectrum {
    values: Vec<f64>,
}

impl SingularSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `σ₁`, the spectral norm.
    pub fn norm(&self) -> f64 {
        self.values[0]
    }

    /// `σ_d = ‖A⁻¹‖⁻¹`.
    pub fn conorm(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    pub fn condition_number(&self) -> f64 {
        self.norm() / self.conorm()
    }
}

/// Singular values of `m` in non-increasing order.
pub fn singular_values(m: &Matrix) -> Result<SingularSpectrum> {
    let values = singular_values_raw(m)?;
    if values.last().is_none_or(|&s| s <= 0.0) {
        return Err(Error::NumericalBreakdown("matrix is singular".into()));
    }
    Ok(SingularSpectrum { values })
}

/// Singular values, allowing zeros (used on renormalized mantissas whose
/// smallest directions may have underflowed).
pub fn singular_values_raw(m: &Matrix) -> Result<Vec<f64>> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericalBreakdown("non-finite matrix entry".into()));
    }
    let mut values: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Spectral norm.
pub fn norm(m: &Matrix) -> Result<f64> {
    match m.shape() {
        (1, 1) if m[(0, 0)].is_finite() => Ok(m[(0, 0)].abs()),
        (2, 2) if m.iter().all(|x| x.is_finite()) => Ok(norm_2x2(m)),
        _ => Ok(singular_values_raw(m)?[0]),
    }
}

// σ₁ of a 2×2 matrix in closed form: σ₁² = (s + √(s² − 4 det²)) / 2 with
// s = ‖M‖_F². The larger root has no cancellation.
fn norm_2x2(m: &Matrix) -> f64 {
    let scale = m.amax();
    if scale == 0.0 {
        return 0.0;
    }
    let (a, b, c, d) = (m[(0, 0)] / scale, m[(0, 1)] / scale, m[(1, 0)] / scale, m[(1, 1)] / scale);
    let s = a * a + b * b + c * c + d * d;
    let disc = ((a - d).powi(2) + (b + c).powi(2)) * ((a + d).powi(2) + (b - c).powi(2));
    scale * ((s + disc.max(0.0).sqrt()) / 2.0).sqrt()
}

/// Sorted singular values together with the right singular vectors as the
/// columns of `V` (same order).
pub fn svd_right(m: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericalBreakdown("non-finite matrix entry".into()));
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::NumericalBreakdown("SVD did not return singular vectors".into()))?;
    let values: Vec<f64> = svd.singular_values.iter().copied().collect();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let v = Matrix::from_fn(m.ncols(), order.len(), |r, c| v_t[(order[c], r)]);
    Ok((order.iter().map(|&i| values[i]).collect(), v))
}

/// k-element subsets of `0..n` in lexicographic order.
pub fn index_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // advance the rightmost index that still has room
        let mut i = k;
        while i > 0 && cur[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for j in i..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// The k-th compound matrix: all k×k minors, rows and columns indexed by
/// k-subsets in lexicographic order. Represents the action on `Λ^k ℝ^d`.
pub fn compound(m: &Matrix, k: usize) -> Result<Matrix> {
    let d = m.nrows();
    if m.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: m.ncols() });
    }
    if k == 0 || k > d {
        return Err(Error::InvalidParameter(format!("exterior power {k} of dimension {d}")));
    }
    if k == 1 {
        return Ok(m.clone());
    }
    let subsets = index_subsets(d, k);
    let size = subsets.len();
    let mut out = Matrix::zeros(size, size);
    let mut minor = Matrix::zeros(k, k);
    for (r, rows) in subsets.iter().enumerate() {
        for (c, cols) in subsets.iter().enumerate() {
            for (a, &i) in rows.iter().enumerate() {
                for (b, &j) in cols.iter().enumerate() {
                    minor[(a, b)] = m[(i, j)];
                }
            }
            out[(r, c)] = minor.clone().determinant();
        }
    }
    Ok(out)
}

/// Binomial coefficient as usize (small arguments only).
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Largest eigenvalue modulus, via a real Schur decomposition.
pub fn spectral_radius(m: &Matrix) -> Result<f64> {
    Ok(eigenvalue_moduli(m)?[0])
}

/// Eigenvalue moduli in non-increasing order, repeated by algebraic
/// multiplicity; a complex pair contributes its modulus twice.
pub fn eigenvalue_moduli(m: &Matrix) -> Result<Vec<f64>> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::InvalidParameter("eigenvalues need a non-empty square matrix".into()));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericalBreakdown("non-finite matrix entry".into()));
    }
    if m.nrows() == 1 {
        return Ok(vec![m[(0, 0)].abs()]);
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 100_000)
        .ok_or_else(|| Error::NumericalBreakdown("Schur iteration did not converge".into()))?;
    let mut moduli: Vec<f64> = schur.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    Ok(moduli)
}

/// A matrix stored as `mantissa · e^{log_scale}` so long products neither
/// overflow nor underflow.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledMatrix {
    pub mantissa: Matrix,
    pub log_scale: f64,
}

impl ScaledMatrix {
    pub fn identity(d: usize) -> Self {
        Self { mantissa: Matrix::identity(d, d), log_scale: 0.0 }
    }

    pub fn from_matrix(m: Matrix) -> Self {
        Self { mantissa: m, log_scale: 0.0 }
    }

    /// `self ← factor · self`.
    pub fn left_multiply(&mut self, factor: &Matrix) {
        self.mantissa = factor * &self.mantissa;
        self.renormalize();
    }

    /// `self ← self · factor`.
    pub fn right_multiply(&mut self, factor: &Matrix) {
        self.mantissa = &self.mantissa * factor;
        self.renormalize();
    }

    pub fn compose(&self, rhs: &ScaledMatrix) -> ScaledMatrix {
        let mut out = ScaledMatrix {
            mantissa: &self.mantissa * &rhs.mantissa,
            log_scale: self.log_scale + rhs.log_scale,
        };
        out.renormalize();
        out
    }

    // Rescale by an exact power of two, so renormalization adds no rounding.
    fn renormalize(&mut self) {
        let size = self.mantissa.norm();
        if size == 0.0 || !size.is_finite() {
            return;
        }
        let log_size = size.ln();
        if log_size.abs() > RESCALE_LOG_BOUND {
            let exponent = size.log2().round() as i32;
            self.mantissa *= 2f64.powi(-exponent);
            self.log_scale += exponent as f64 * std::f64::consts::LN_2;
        }
    }

    /// The plain matrix; overflows to infinity when the scale is too large.
    pub fn to_matrix(&self) -> Matrix {
        &self.mantissa * self.log_scale.exp()
    }

    /// `log σ_i` for all i (`-inf` for underflowed directions).
    pub fn log_singular_values(&self) -> Result<Vec<f64>> {
        Ok(singular_values_raw(&self.mantissa)?
            .into_iter()
            .map(|s| s.ln() + self.log_scale)
            .collect())
    }

    pub fn log_norm(&self) -> Result<f64> {
        Ok(norm(&self.mantissa)?.ln() + self.log_scale)
    }

    pub fn log_spectral_radius(&self) -> Result<f64> {
        Ok(spectral_radius(&self.mantissa)?.ln() + self.log_scale)
    }
}

/// Orthonormal basis of the column span (thin QR).
pub fn orthonormalize(m: &Matrix) -> Matrix {
    let k = m.ncols();
    let q = m.clone().qr().q();
    q.columns(0, k).into_owned()
}

/// Largest principal angle between the column spans of two orthonormal
/// frames of equal rank, computed as `asin ‖(I − QQᵀ)P‖` for accuracy at
/// small angles.
pub fn max_principal_angle(p: &Matrix, q: &Matrix) -> Result<f64> {
    if p.nrows() != q.nrows() || p.ncols() != q.ncols() {
        return Err(Error::DimensionMismatch { expected: p.ncols(), got: q.ncols() });
    }
    let residual = p - q * (q.transpose() * p);
    Ok(norm(&residual)?.min(1.0).asin())
}

/// Smallest principal angle between two subspaces given by orthonormal
/// frames (any ranks); zero iff they intersect non-trivially.
pub fn min_principal_angle(p: &Matrix, q: &Matrix) -> Result<f64> {
    if p.nrows() != q.nrows() {
        return Err(Error::DimensionMismatch { expected: p.nrows(), got: q.nrows() });
    }
    let cosines = singular_values_raw(&(p.transpose() * q))?;
    Ok(cosines[0].clamp(-1.0, 1.0).acos())
}

/// Build a matrix from row-major nested rows.
pub fn from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
    let r = rows.len();
    if r == 0 {
        return Err(Error::InvalidParameter("matrix has no rows".into()));
    }
    let c = rows[0].len();
    if let Some(bad) = rows.iter().find(|row| row.len() != c) {
        return Err(Error::DimensionMismatch { expected: c, got: bad.len() });
    }
    Ok(Matrix::from_fn(r, c, |i, j| rows[i][j]))
}

pub fn to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn m(rows: &[&[f64]]) -> Matrix {
        from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn singular_value_examples() {
        let s = singular_values(&m(&[&[3.0, 0.0], &[0.0, -2.0]])).unwrap();
        assert_eq!(s.values(), &[3.0, 2.0]);
        let s = singular_values(&m(&[&[0.0, 0.5], &[2.0, 0.0]])).unwrap();
        assert_relative_eq!(s.values()[0], 2.0, max_relative = 1e-12);
        assert_relative_eq!(s.values()[1], 0.5, max_relative = 1e-12);
        let s = singular_values(&Matrix::identity(4, 4)).unwrap();
        assert!(s.values().iter().all(|&v| (v - 1.0).abs() < 1e-12));
        assert!(singular_values(&m(&[&[1.0, 2.0], &[2.0, 4.0]])).is_err());
        assert!(singular_values(&m(&[&[f64::NAN, 0.0], &[0.0, 1.0]])).is_err());
    }

    #[test]
    fn subsets_are_lexicographic() {
        assert_eq!(
            index_subsets(4, 2),
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(index_subsets(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(index_subsets(3, 1).len(), 3);
        assert_eq!(binomial(5, 2), 10);
    }

    #[test]
    fn compound_of_top_degree_is_determinant() {
        let a = m(&[&[2.0, 1.0, 0.0], &[1.0, 3.0, 1.0], &[0.0, 1.0, 4.0]]);
        let c = compound(&a, 3).unwrap();
        assert_eq!(c.shape(), (1, 1));
        assert_relative_eq!(c[(0, 0)], a.clone().determinant(), max_relative = 1e-12);
        assert_eq!(compound(&a, 1).unwrap(), a);
        let d = compound(&m(&[&[2.0, 0.0], &[0.0, 0.5]]), 2).unwrap();
        assert_eq!(d[(0, 0)], 1.0);
    }

    #[test]
    fn eigen_moduli_of_rotation_pair() {
        let r = m(&[&[0.0, -2.0], &[2.0, 0.0]]);
        let mods = eigenvalue_moduli(&r).unwrap();
        assert_relative_eq!(mods[0], 2.0, max_relative = 1e-12);
        assert_relative_eq!(mods[1], 2.0, max_relative = 1e-12);
    }

    #[test]
    fn scaled_products_do_not_overflow() {
        let a = m(&[&[2.0, 0.0], &[0.0, 0.5]]);
        let mut p = ScaledMatrix::identity(2);
        for _ in 0..2000 {
            p.left_multiply(&a);
        }
        let logs = p.log_singular_values().unwrap();
        assert_relative_eq!(logs[0], 2000.0 * 2f64.ln(), max_relative = 1e-12);
        assert!(p.mantissa.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn closed_form_norm_matches_svd() {
        let cases = [
            m(&[&[2.0, 1.0], &[1.0, 1.0]]),
            m(&[&[0.0, 0.5], &[2.0, 0.0]]),
            m(&[&[1e-3, 7.0], &[-4.0, 1e5]]),
            m(&[&[1.0, 1.0], &[1.0, 1.0]]),
        ];
        for a in cases {
            let direct = singular_values_raw(&a).unwrap()[0];
            assert_relative_eq!(norm(&a).unwrap(), direct, max_relative = 1e-14);
        }
        assert_eq!(norm(&m(&[&[-3.0]])).unwrap(), 3.0);
    }

    #[test]
    fn right_singular_vectors() {
        let a = m(&[&[0.0, 0.5], &[2.0, 0.0]]);
        let (values, v) = svd_right(&a).unwrap();
        assert_relative_eq!(values[0], 2.0, max_relative = 1e-14);
        // most expanded direction is e1
        assert!(v[(0, 0)].abs() > 1.0 - 1e-14);
        assert!(v[(1, 1)].abs() > 1.0 - 1e-14);
    }

    #[test]
    fn angles() {
        let e1 = m(&[&[1.0], &[0.0]]);
        let e2 = m(&[&[0.0], &[1.0]]);
        assert!(max_principal_angle(&e1, &e1).unwrap() < 1e-15);
        assert_relative_eq!(
            max_principal_angle(&e1, &e2).unwrap(),
            std::f64::consts::FRAC_PI_2,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            min_principal_angle(&e1, &e2).unwrap(),
            std::f64::consts::FRAC_PI_2,
            max_relative = 1e-12
        );
    }
}
