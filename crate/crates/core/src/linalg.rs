//! Small dense matrices over any [`Scalar`], with exact determinant and
//! positive-semidefiniteness tests and an `f64` eigenvalue bridge.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Self { rows: rows.len(), cols, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = a.mul_ref(other.get(k, j));
                    out.data[i * other.cols + j] += v;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(T::zero(), |acc, (a, b)| acc + a.mul_ref(b)))
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| (self.get(i, j).clone() - self.get(j, i).clone()).is_negligible()))
    }

    /// Determinant by Gaussian elimination with largest-magnitude pivots.
    pub fn determinant(&self) -> T {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = T::one();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a.get(i, k).abs().partial_cmp(&a.get(j, k).abs()).unwrap_or(std::cmp::Ordering::Equal))
                .expect("nonempty range");
            if a.get(p, k).is_zero() {
                return T::zero();
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            let pivot = a.get(k, k).clone();
            det *= pivot.clone();
            for i in k + 1..n {
                let f = a.get(i, k).clone() / pivot.clone();
                if f.is_zero() {
                    continue;
                }
                for j in k..n {
                    let v = a.get(i, j).clone() - f.mul_ref(a.get(k, j));
                    a.set(i, j, v);
                }
            }
        }
        det
    }

    /// Positive semidefiniteness of a symmetric matrix by symmetric
    /// elimination: every pivot must be non-negative and a zero pivot needs
    /// a zero row in the remaining Schur complement. Exact for rationals;
    /// floats use [`Scalar::is_negligible`] for the zero tests.
    pub fn is_psd_by_elimination(&self) -> bool {
        assert_eq!(self.rows, self.cols, "PSD test of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        for k in 0..n {
            let pivot = a.get(k, k).clone();
            if pivot.is_negligible() {
                if (k + 1..n).any(|j| !a.get(k, j).is_negligible()) {
                    return false;
                }
                continue;
            }
            if pivot.is_negative() {
                return false;
            }
            for i in k + 1..n {
                let f = a.get(i, k).clone() / pivot.clone();
                if f.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let v = a.get(i, j).clone() - f.mul_ref(a.get(k, j));
                    a.set(i, j, v);
                }
            }
        }
        true
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_f64_lossy())
    }

    /// Eigenvalues (ascending) of the symmetric `f64` view.
    pub fn symmetric_eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.to_nalgebra()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// Eigen-decomposition of a symmetric matrix: `(eigenvalues, eigenvectors as columns)`.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let e = SymmetricEigen::new(m.clone());
    (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
}

/// Outcome of a positive-semidefiniteness test.
#[derive(Clone, Debug, PartialEq)]
pub struct PsdVerdict {
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// Float verdict: `min >= -eps * max(|max|, 1e-300)`.
    pub psd: bool,
    /// Exact elimination verdict, computed when the float verdict is within
    /// tolerance of the boundary and the matrix is exact.
    pub exact: Option<bool>,
}

impl PsdVerdict {
    /// The exact verdict when available, else the float one.
    pub fn accepted(&self) -> bool {
        self.exact.unwrap_or(self.psd)
    }
}

/// PSD test with relative tolerance `eps` on the smallest eigenvalue.
pub fn psd_verdict<T: Scalar>(m: &DenseMatrix<T>, eps: f64) -> PsdVerdict {
    if m.rows() == 0 {
        return PsdVerdict { min_eigenvalue: 0.0, max_eigenvalue: 0.0, psd: true, exact: None };
    }
    let ev = m.symmetric_eigenvalues();
    let (lo, hi) = (ev[0], *ev.last().expect("nonempty"));
    let scale = hi.abs().max(1e-300);
    let psd = lo >= -eps * scale;
    let near_boundary = lo.abs() <= eps * scale * 1e3;
    let exact = (T::EXACT && near_boundary).then(|| m.is_psd_by_elimination());
    PsdVerdict { min_eigenvalue: lo, max_eigenvalue: hi, psd, exact }
}

/// Row-wise sparse matrix for the operator models, whose dimensions grow
/// geometrically with the Fock depth.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> SparseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Vec::new(); rows] }
    }

    pub fn scaled_identity(n: usize, c: T) -> Self {
        let mut m = Self::zeros(n, n);
        if !c.is_zero() {
            for i in 0..n {
                m.entries[i].push((i, c.clone()));
            }
        }
        m
    }

    pub fn from_dense(d: &DenseMatrix<T>) -> Self {
        let mut m = Self::zeros(d.rows(), d.cols());
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                if !d.get(i, j).is_zero() {
                    m.entries[i].push((j, d.get(i, j).clone()));
                }
            }
        }
        m
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut d = DenseMatrix::zeros(self.rows, self.cols);
        for (i, row) in self.entries.iter().enumerate() {
            for (j, v) in row {
                d.set(i, *j, v.clone());
            }
        }
        d
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Nonzero entries as `(row, col, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &T)> + '_ {
        self.entries.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |(j, v)| (i, *j, v)))
    }

    pub fn nnz(&self) -> usize {
        self.entries.iter().map(Vec::len).sum()
    }

    /// Adds `v` to entry `(i, j)`.
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        if v.is_zero() {
            return;
        }
        let row = &mut self.entries[i];
        match row.iter_mut().find(|(c, _)| *c == j) {
            Some((_, x)) => *x += v,
            None => row.push((j, v)),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i].iter().find(|(c, _)| *c == j).map_or_else(T::zero, |(_, v)| v.clone())
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        self.entries
            .iter()
            .map(|row| row.iter().fold(T::zero(), |acc, (j, a)| if v[*j].is_zero() { acc } else { acc + a.mul_ref(&v[*j]) }))
            .collect()
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, row) in other.entries.iter().enumerate() {
            for (j, v) in row {
                out.add(i, *j, v.clone());
            }
        }
        out
    }

    /// Kronecker product, with `(a, b) -> a * other.rows + b` indexing.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for (a, row) in self.entries.iter().enumerate() {
            for (a2, x) in row {
                for (b, orow) in other.entries.iter().enumerate() {
                    for (b2, y) in orow {
                        out.entries[a * other.rows + b].push((a2 * other.cols + b2, x.mul_ref(y)));
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for (i, row) in self.entries.iter().enumerate() {
            for (j, v) in row {
                out.entries[*j].push((i, v.clone()));
            }
        }
        out
    }

    /// Largest `|A - A^T|` entry.
    pub fn asymmetry(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for (i, row) in self.entries.iter().enumerate() {
            for (j, v) in row {
                worst = worst.max((v.clone() - self.get(*j, i)).abs().to_f64_lossy());
            }
        }
        worst
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SparseMatrix<U> {
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|r| r.iter().map(|(j, v)| (*j, f(v))).collect()).collect(),
        }
    }
}
