//! Small dense linear algebra kernels: rotations, rank-one factors,
//! numerical rank and the matrix exponential.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use nalgebra::{DMatrix, SymmetricEigen, SVD};

use crate::error::{Error, Result};

/// Row-major dense matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| format!("{x:>12.6}")).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::WrongSize {
                expected: format!("{} entries", rows * cols),
                got: format!("{} entries", entries.len()),
            });
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::Overflow("matrix entries"));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::WrongSize { expected: format!("rows of length {c}"), got: "ragged rows".into() });
        }
        Self::new(r, c, rows.concat())
    }

    /// Outer product `u vᵀ`.
    pub fn outer(u: &[f64], v: &[f64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = &mut out.entries[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect();
        Self { rows: self.rows, cols: self.cols, entries }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect();
        Self { rows: self.rows, cols: self.cols, entries }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|x| x * s).collect() }
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, blk: &Self) {
        for i in 0..blk.rows {
            for j in 0..blk.cols {
                self[(r0 + i, c0 + j)] = blk[(i, j)];
            }
        }
    }

    pub fn symmetrized(&self) -> Self {
        self.add(&self.transpose()).scale(0.5)
    }

    pub fn determinant(&self) -> f64 {
        assert!(self.is_square(), "determinant of a non-square matrix");
        if self.rows == 0 {
            return 1.0;
        }
        self.to_nalgebra().determinant()
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.entries)
    }

    pub fn from_nalgebra(m: &DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.entries[i * self.cols + j]
    }
}

impl Mul for &DenseMatrix {
    type Output = DenseMatrix;
    fn mul(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.matmul(rhs)
    }
}

/// Tolerance bundle shared by every module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub algebraic: f64,
    pub ode: f64,
    pub rank: f64,
    pub action: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { algebraic: 1e-9, ode: 1e-8, rank: 1e-7, action: 1e-6 }
    }
}

impl Tolerances {
    pub fn validated(self) -> Result<Self> {
        let all = [self.algebraic, self.ode, self.rank, self.action];
        if all.iter().any(|t| !(t.is_finite() && *t > 0.0)) || self.algebraic > self.action {
            return Err(Error::BadParameters(format!("invalid tolerances {self:?}")));
        }
        Ok(self)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalized(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    a.iter().map(|x| x / n).collect()
}

pub fn axpy(alpha: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| alpha * a + b).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn unit_vector(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

const UNIT_TOL: f64 = 1e-9;

/// Rotation in the plane of `a` and `b` carrying `a` onto `b`.
pub fn rotation_sending(a: &[f64], b: &[f64]) -> Result<DenseMatrix> {
    let n = a.len();
    if b.len() != n {
        return Err(Error::WrongSize { expected: format!("length {n}"), got: format!("length {}", b.len()) });
    }
    for v in [a, b] {
        let nv = norm(v);
        if (nv - 1.0).abs() > UNIT_TOL {
            return Err(Error::NonUnitInput { norm: nv });
        }
    }
    let s: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
    let ns = norm(&s);
    if n < 2 {
        return if ns > 1.0 { Ok(DenseMatrix::identity(n)) } else { Err(Error::DimensionTooSmall { n }) };
    }
    if ns < 1e-8 {
        // route through the axis least aligned with a
        let pivot = (0..n).fold(0, |best, i| if a[i].abs() < a[best].abs() { i } else { best });
        let mut m = unit_vector(n, pivot);
        m = normalized(&axpy(-a[pivot], a, &m));
        let first = plane_rotation(a, &m);
        let second = plane_rotation(&m, b);
        return Ok(second.matmul(&first));
    }
    Ok(plane_rotation(a, b))
}

fn plane_rotation(a: &[f64], b: &[f64]) -> DenseMatrix {
    let n = a.len();
    let t = sub(b, a);
    let s: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
    let (nt, ns) = (norm(&t), norm(&s));
    let (c, d) = if nt < ns {
        let one_minus_c = nt * nt / 2.0;
        (1.0 - one_minus_c, axpy(one_minus_c, a, &t))
    } else {
        let one_plus_c = ns * ns / 2.0;
        (one_plus_c - 1.0, axpy(-one_plus_c, a, &s))
    };
    let sin = norm(&d);
    let mut r = DenseMatrix::identity(n);
    if sin < 1e-300 {
        return r;
    }
    let w: Vec<f64> = d.iter().map(|x| x / sin).collect();
    for i in 0..n {
        for j in 0..n {
            r[(i, j)] += (c - 1.0) * (a[i] * a[j] + w[i] * w[j]) + sin * (w[i] * a[j] - a[i] * w[j]);
        }
    }
    r
}

/// Factor a PSD rank-one matrix as `scale · u uᵀ` with `scale = trace(Q)`.
pub fn rank_one_factor(q: &DenseMatrix, tol: &Tolerances) -> Result<(f64, Vec<f64>)> {
    if !q.is_square() {
        return Err(Error::WrongSize { expected: "square matrix".into(), got: format!("{}x{}", q.rows(), q.cols()) });
    }
    let eig = SymmetricEigen::new(q.symmetrized().to_nalgebra());
    let mut order: Vec<usize> = (0..q.rows()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let trace = q.trace();
    let second = order.iter().skip(1).map(|&i| eig.eigenvalues[i].abs()).fold(0.0, f64::max);
    if second > tol.rank * trace.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NotRankOne { second, trace });
    }
    let top = order[0];
    let mut u: Vec<f64> = eig.eigenvectors.column(top).iter().copied().collect();
    u = normalized(&u);
    canonicalize_sign(&mut u);
    Ok((trace, u))
}

/// Flip `u` so that its first non-negligible component is positive.
pub fn canonicalize_sign(u: &mut [f64]) {
    if let Some(first) = u.iter().find(|x| x.abs() > 1e-9) {
        if *first < 0.0 {
            u.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub rank: usize,
    /// Ratio of the last retained singular value to the first dropped one.
    pub gap: f64,
    pub singular_values: Vec<f64>,
}

pub fn singular_values(m: &DenseMatrix) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.to_nalgebra().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn numerical_rank(m: &DenseMatrix, tol: &Tolerances) -> usize {
    rank_report(m, tol.rank).rank
}

pub fn rank_report(m: &DenseMatrix, rel_tol: f64) -> RankReport {
    let sv = singular_values(m);
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return RankReport { rank: 0, gap: f64::INFINITY, singular_values: sv };
    }
    let rank = sv.iter().filter(|&&s| s > rel_tol * smax).count();
    let gap = match sv.get(rank) {
        Some(&next) if next > 0.0 => sv[rank - 1] / next,
        _ => f64::INFINITY,
    };
    RankReport { rank, gap, singular_values: sv }
}

/// Orthonormal basis of the right kernel of `m`; singular values at or
/// below `rel_tol · σ_max` count as zero.
pub fn null_space(m: &DenseMatrix, rel_tol: f64) -> Vec<Vec<f64>> {
    let n = m.cols();
    let padded = if m.rows() < n {
        let mut p = DenseMatrix::zeros(n, n);
        p.set_block(0, 0, m);
        p
    } else {
        m.clone()
    };
    let svd = SVD::new(padded.to_nalgebra(), false, true);
    let v_t = svd.v_t.expect("SVD with v_t requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= rel_tol * smax || smax == 0.0)
        .map(|i| v_t.row(i).iter().copied().collect())
        .collect()
}

/// Orthonormal basis for the span of `vectors`.
pub fn orthonormal_span(vectors: &[Vec<f64>], rel_tol: f64) -> Vec<Vec<f64>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let dim = vectors[0].len();
    let a = DenseMatrix::from_fn(dim, vectors.len(), |i, j| vectors[j][i]);
    let svd = SVD::new(a.to_nalgebra(), true, false);
    let u = svd.u.expect("SVD with u requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    (0..svd.singular_values.len())
        .filter(|&i| smax > 0.0 && svd.singular_values[i] > rel_tol * smax)
        .map(|i| u.column(i).iter().copied().collect())
        .collect()
}

/// Largest principal angle of `span(sub)` against `span(sup)`: zero iff
/// the first span is contained in the second.
pub fn containment_angle(sub: &[Vec<f64>], sup: &[Vec<f64>]) -> f64 {
    let qa = orthonormal_span(sub, 1e-10);
    let qb = orthonormal_span(sup, 1e-10);
    if qa.is_empty() {
        return 0.0;
    }
    let residuals: Vec<Vec<f64>> =
        qa.iter().map(|a| qb.iter().fold(a.clone(), |r, b| axpy(-dot(b, a), b, &r))).collect();
    let dim = qa[0].len();
    let m = DenseMatrix::from_fn(dim, residuals.len(), |i, j| residuals[j][i]);
    singular_values(&m).first().copied().unwrap_or(0.0).clamp(0.0, 1.0).asin()
}

const EXP_ORDER: usize = 18;

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
pub fn matrix_exp(a: &DenseMatrix) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(Error::WrongSize { expected: "square matrix".into(), got: format!("{}x{}", a.rows(), a.cols()) });
    }
    let norm1 = a.norm_one();
    if !norm1.is_finite() || norm1 > 700.0 {
        return Err(Error::Overflow("matrix_exp"));
    }
    let squarings = if norm1 > 0.25 { (norm1 / 0.25).log2().ceil() as i32 } else { 0 };
    let scaled = a.scale(0.5f64.powi(squarings));
    let n = a.rows();
    let mut result = DenseMatrix::identity(n);
    for k in (1..=EXP_ORDER).rev() {
        result = DenseMatrix::identity(n).add(&scaled.matmul(&result).scale(1.0 / k as f64));
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    if result.entries.iter().any(|x| !x.is_finite()) {
        return Err(Error::Overflow("matrix_exp"));
    }
    Ok(result)
}
