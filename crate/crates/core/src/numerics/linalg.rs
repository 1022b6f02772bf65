use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Dense real matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                what: "matrix entries",
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    what: "matrix row",
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::from_row_major(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Copy keeping only the listed rows, in order.
    pub fn select_rows(&self, keep: &[usize]) -> Self {
        let mut data = Vec::with_capacity(keep.len() * self.cols);
        for &i in keep {
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: keep.len(),
            cols: self.cols,
            data,
        }
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn vstack(&self, other: &DenseMatrix) -> Result<Self> {
        if self.rows > 0 && other.rows > 0 && self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                what: "stacked matrix columns",
                expected: self.cols,
                found: other.cols,
            });
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self {
            rows: self.rows + other.rows,
            cols,
            data,
        })
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|v| *v *= s);
    }

    /// `out = M x`
    pub fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.cols.max(1))) {
            *o = dot(row, x);
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        if self.cols > 0 {
            self.matvec_into(x, &mut out);
        }
        out
    }

    /// `out = Mᵀ y`
    pub fn matvec_t_into(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        out.iter_mut().for_each(|v| *v = 0.0);
        if self.cols == 0 {
            return;
        }
        for (&yi, row) in y.iter().zip(self.data.chunks_exact(self.cols)) {
            if yi != 0.0 {
                for (o, r) in out.iter_mut().zip(row) {
                    *o += yi * r;
                }
            }
        }
    }

    pub fn matvec_t(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        self.matvec_t_into(y, &mut out);
        out
    }

    /// `M Mᵀ` (rows × rows).
    pub fn gram_rows(&self) -> DenseMatrix {
        let m = self.rows;
        let mut g = DenseMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..=i {
                let v = dot(self.row(i), self.row(j));
                g.data[i * m + j] = v;
                g.data[j * m + i] = v;
            }
        }
        g
    }

    /// `Mᵀ M` (cols × cols).
    pub fn gram_cols(&self) -> DenseMatrix {
        let n = self.cols;
        let mut g = DenseMatrix::zeros(n, n);
        for row in self.data.chunks_exact(n.max(1)).take(self.rows) {
            for i in 0..n {
                let ri = row[i];
                if ri == 0.0 {
                    continue;
                }
                let gi = &mut g.data[i * n..i * n + i + 1];
                for (gij, rj) in gi.iter_mut().zip(row) {
                    *gij += ri * rj;
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                g.data[j * n + i] = g.data[i * n + j];
            }
        }
        g
    }

    /// `M Qᵀ` for a dense `Q` given as rows.
    pub fn mul_transpose(&self, q: &DenseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, q.rows);
        for i in 0..self.rows {
            for j in 0..q.rows {
                out.data[i * q.rows + j] = dot(self.row(i), q.row(j));
            }
        }
        out
    }

    pub fn add_diagonal(&mut self, s: f64) {
        let n = self.rows.min(self.cols);
        for i in 0..n {
            self.data[i * self.cols + i] += s;
        }
    }

    fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

/// Cholesky factor of a symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    inner: Option<nalgebra::Cholesky<f64, nalgebra::Dyn>>,
    dim: usize,
}

/// Pivots below this fraction of the largest diagonal entry count as rank loss.
const RANK_TOL: f64 = 1e-13;

impl CholeskyFactor {
    pub fn new(m: &DenseMatrix, what: &'static str) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::DimensionMismatch {
                what: "square matrix",
                expected: m.rows,
                found: m.cols,
            });
        }
        if m.rows == 0 {
            return Ok(Self { inner: None, dim: 0 });
        }
        let max_diag = (0..m.rows).map(|i| m.get(i, i)).fold(0.0, f64::max);
        let chol = nalgebra::Cholesky::new(m.to_nalgebra()).ok_or(Error::Singular(what))?;
        let l = chol.l_dirty();
        let min_pivot = (0..m.rows).map(|i| l[(i, i)] * l[(i, i)]).fold(f64::INFINITY, f64::min);
        if !(min_pivot > RANK_TOL * max_diag) {
            return Err(Error::Singular(what));
        }
        Ok(Self {
            inner: Some(chol),
            dim: m.rows,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        debug_assert_eq!(rhs.len(), self.dim);
        if let Some(chol) = &self.inner {
            let mut v = DVector::from_column_slice(rhs);
            chol.solve_mut(&mut v);
            rhs.copy_from_slice(v.as_slice());
        }
    }
}

/// Orthogonal projector onto the null space of a full-row-rank `A`,
/// `P x = x - Aᵀ (A Aᵀ)⁻¹ A x`, kept in factored form.
#[derive(Debug, Clone)]
pub struct NullspaceProjector {
    a: DenseMatrix,
    gram: CholeskyFactor,
}

impl NullspaceProjector {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        if a.rows > a.cols {
            return Err(Error::Singular("more equality rows than columns"));
        }
        let gram = CholeskyFactor::new(&a.gram_rows(), "A Aᵀ")?;
        Ok(Self { a: a.clone(), gram })
    }

    pub fn dim(&self) -> usize {
        self.a.cols
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.apply_affine(x, None)
    }

    /// Projection onto `{x : A x = target}` (or the null space when `None`).
    pub fn apply_affine(&self, x: &[f64], target: Option<&[f64]>) -> Vec<f64> {
        if self.a.rows == 0 {
            return x.to_vec();
        }
        let mut r = self.a.matvec(x);
        if let Some(t) = target {
            r.iter_mut().zip(t).for_each(|(ri, ti)| *ri -= ti);
        }
        self.gram.solve_in_place(&mut r);
        let corr = self.a.matvec_t(&r);
        x.iter().zip(&corr).map(|(xi, ci)| xi - ci).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{gaussian_vector, RngStream};

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        let mut s = RngStream::new(seed, 0);
        let data = if rows * cols == 0 {
            Vec::new()
        } else {
            gaussian_vector(&mut s, rows * cols).unwrap()
        };
        DenseMatrix::from_row_major(rows, cols, data).unwrap()
    }

    #[test]
    fn projector_annihilates_row_space() {
        let a = random_matrix(4, 9, 1);
        let p = NullspaceProjector::new(&a).unwrap();
        let y = gaussian_vector(&mut RngStream::new(2, 0), 4).unwrap();
        let aty = a.matvec_t(&y);
        let out = p.apply(&aty);
        assert!(norm2(&out) <= 1e-10 * norm2(&aty));
    }

    #[test]
    fn projector_idempotent_and_symmetric() {
        let a = random_matrix(5, 12, 3);
        let p = NullspaceProjector::new(&a).unwrap();
        let mut s = RngStream::new(4, 0);
        let x = gaussian_vector(&mut s, 12).unwrap();
        let y = gaussian_vector(&mut s, 12).unwrap();
        let px = p.apply(&x);
        let ppx = p.apply(&px);
        for (u, v) in px.iter().zip(&ppx) {
            assert!((u - v).abs() < 1e-10);
        }
        let lhs = dot(&px, &y);
        let rhs = dot(&x, &p.apply(&y));
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn empty_constraint_is_identity() {
        let a = DenseMatrix::zeros(0, 5);
        let p = NullspaceProjector::new(&a).unwrap();
        let x = vec![1.0, -2.0, 3.0, 0.5, 0.0];
        assert_eq!(p.apply(&x), x);
    }

    #[test]
    fn rank_deficiency_detected() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0]]).unwrap();
        assert!(matches!(NullspaceProjector::new(&a), Err(Error::Singular(_))));
    }

    #[test]
    fn gram_cols_matches_definition() {
        let a = random_matrix(3, 4, 9);
        let g = a.gram_cols();
        for i in 0..4 {
            for j in 0..4 {
                let want: f64 = (0..3).map(|r| a.get(r, i) * a.get(r, j)).sum();
                assert!((g.get(i, j) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn non_finite_entries_rejected() {
        assert!(DenseMatrix::from_row_major(1, 2, vec![1.0, f64::NAN]).is_err());
    }
}
