//! The group SO°(p,q), its Lie algebra and the distinguished elements
//! m(θ), j1, j2 and the maximal compact K = SO(p)×SO(q).

use nalgebra::SymmetricEigen;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkit::{dot, matrix_exp, norm, null_space, DenseMatrix, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Signature {
    p: usize,
    q: usize,
}

impl Signature {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p < 3 || q < 3 {
            return Err(Error::BadSignature { p, q });
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Ambient dimension p+q.
    pub fn n(&self) -> usize {
        self.p + self.q
    }

    pub fn algebra_dim(&self) -> usize {
        let n = self.n();
        n * (n - 1) / 2
    }

    /// Index of ε1, the first vector of the q-block.
    pub fn eps1(&self) -> usize {
        self.p
    }

    /// The roles-swapped signature (q,p).
    pub fn swapped(&self) -> Self {
        Self { p: self.q, q: self.p }
    }

    /// Quadratic form of signature (p,q): −Σ x_i² over the p-block plus Σ over the q-block.
    pub fn form(&self, x: &[f64], y: &[f64]) -> f64 {
        let (xp, xq) = x.split_at(self.p);
        let (yp, yq) = y.split_at(self.p);
        dot(xq, yq) - dot(xp, yp)
    }

    pub fn flip_p_block(&self, x: &[f64]) -> Vec<f64> {
        x.iter().enumerate().map(|(i, v)| if i < self.p { -v } else { *v }).collect()
    }
}

/// Gram matrix I_{p,q} = diag(−1,…,−1, 1,…,1).
pub fn gram(sig: Signature) -> DenseMatrix {
    let diag: Vec<f64> = (0..sig.n()).map(|i| if i < sig.p { -1.0 } else { 1.0 }).collect();
    DenseMatrix::diagonal(&diag)
}

/// A matrix certified to lie in SO°(p,q).
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    sig: Signature,
    mat: DenseMatrix,
}

impl GroupElement {
    pub(crate) fn trusted(sig: Signature, mat: DenseMatrix) -> Self {
        debug_assert_eq!(mat.rows(), sig.n());
        Self { sig, mat }
    }

    pub fn identity(sig: Signature) -> Self {
        Self::trusted(sig, DenseMatrix::identity(sig.n()))
    }

    pub fn sig(&self) -> Signature {
        self.sig
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.mat
    }

    pub fn compose(&self, rhs: &GroupElement) -> GroupElement {
        assert_eq!(self.sig, rhs.sig, "signature mismatch");
        Self::trusted(self.sig, self.mat.matmul(&rhs.mat))
    }

    /// Inverse through the defining relation: X⁻¹ = I Xᵀ I.
    pub fn inverse(&self) -> GroupElement {
        let p = self.sig.p;
        let t = self.mat.transpose();
        let inv = DenseMatrix::from_fn(t.rows(), t.cols(), |i, j| {
            let s = if (i < p) == (j < p) { 1.0 } else { -1.0 };
            s * t[(i, j)]
        });
        Self::trusted(self.sig, inv)
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.mat.matvec(v)
    }

    /// Block-diagonal parts (κ1, κ2) when the element lies in K.
    pub fn k_blocks(&self) -> (DenseMatrix, DenseMatrix) {
        let (p, q) = (self.sig.p, self.sig.q);
        (self.mat.block(0, 0, p, p), self.mat.block(p, p, q, q))
    }

    /// Distance of the element from K (size of its off-diagonal blocks).
    pub fn off_k_residual(&self) -> f64 {
        let (p, q) = (self.sig.p, self.sig.q);
        self.mat.block(0, p, p, q).max_abs().max(self.mat.block(p, 0, q, p).max_abs())
    }
}

/// An element of so(p,q): X I + I Xᵀ = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    sig: Signature,
    mat: DenseMatrix,
}

impl AlgebraElement {
    pub fn new(sig: Signature, mat: DenseMatrix, tol: &Tolerances) -> Result<Self> {
        let n = sig.n();
        if mat.rows() != n || mat.cols() != n {
            return Err(Error::WrongSize {
                expected: format!("{n}x{n}"),
                got: format!("{}x{}", mat.rows(), mat.cols()),
            });
        }
        let i = gram(sig);
        let residual = mat.matmul(&i).add(&i.matmul(&mat.transpose())).frobenius_norm();
        if residual > tol.algebraic * mat.frobenius_norm().max(1.0) {
            return Err(Error::NotInGroup { check: "algebra relation", residual });
        }
        Ok(Self { sig, mat })
    }

    pub fn sig(&self) -> Signature {
        self.sig
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.mat
    }

    pub fn scaled(&self, s: f64) -> AlgebraElement {
        Self { sig: self.sig, mat: self.mat.scale(s) }
    }

    /// exp lands in the identity component by connectedness.
    pub fn exp(&self) -> GroupElement {
        GroupElement::trusted(self.sig, matrix_exp(&self.mat).expect("algebra element within exp range"))
    }

    pub fn try_exp(&self) -> Result<GroupElement> {
        Ok(GroupElement::trusted(self.sig, matrix_exp(&self.mat)?))
    }
}

/// Certify `x` as an element of SO°(p,q), reporting the first failed check.
pub fn is_in_group(x: &DenseMatrix, sig: Signature, tol: &Tolerances) -> Result<GroupElement> {
    let n = sig.n();
    if x.rows() != n || x.cols() != n {
        return Err(Error::WrongSize { expected: format!("{n}x{n}"), got: format!("{}x{}", x.rows(), x.cols()) });
    }
    let scale = (x.frobenius_norm().powi(2) / n as f64).max(1.0);
    let i = gram(sig);
    let residual = x.matmul(&i).matmul(&x.transpose()).sub(&i).frobenius_norm();
    if residual > tol.algebraic * scale {
        return Err(Error::NotInGroup { check: "form preservation", residual });
    }
    let det = x.determinant();
    if (det - 1.0).abs() > tol.algebraic * scale {
        return Err(Error::NotInGroup { check: "determinant", residual: (det - 1.0).abs() });
    }
    let block_det = x.block(0, 0, sig.p, sig.p).determinant();
    if block_det <= 0.0 {
        return Err(Error::NotInGroup { check: "identity component", residual: block_det });
    }
    Ok(GroupElement::trusted(sig, x.clone()))
}

/// Hyperbolic rotation m(θ) in the (e1, ε1) plane.
pub fn boost(sig: Signature, theta: f64) -> Result<GroupElement> {
    if !theta.is_finite() || theta.abs() > 700.0 {
        return Err(Error::Overflow("boost"));
    }
    let mut m = DenseMatrix::identity(sig.n());
    let e = sig.eps1();
    let (c, s) = (theta.cosh(), theta.sinh());
    m[(0, 0)] = c;
    m[(e, e)] = c;
    m[(0, e)] = s;
    m[(e, 0)] = s;
    Ok(GroupElement::trusted(sig, m))
}

/// j1 flips e1 and e2; j2 flips ε1 and ε2.
pub fn involution(sig: Signature, which: u8) -> GroupElement {
    let start = match which {
        1 => 0,
        2 => sig.eps1(),
        _ => panic!("involution index must be 1 or 2"),
    };
    let mut m = DenseMatrix::identity(sig.n());
    m[(start, start)] = -1.0;
    m[(start + 1, start + 1)] = -1.0;
    GroupElement::trusted(sig, m)
}

fn check_special_orthogonal(k: &DenseMatrix, tol: &Tolerances) -> Result<()> {
    let n = k.rows();
    let residual = k.transpose().matmul(k).sub(&DenseMatrix::identity(n)).frobenius_norm();
    let det_err = (k.determinant() - 1.0).abs();
    if residual > tol.algebraic || det_err > tol.algebraic {
        return Err(Error::NotSpecialOrthogonal { residual: residual.max(det_err) });
    }
    Ok(())
}

/// The K element block-diag(κ1, κ2).
pub fn embed_k(sig: Signature, kappa1: &DenseMatrix, kappa2: &DenseMatrix, tol: &Tolerances) -> Result<GroupElement> {
    if kappa1.rows() != sig.p || kappa1.cols() != sig.p || kappa2.rows() != sig.q || kappa2.cols() != sig.q {
        return Err(Error::WrongSize {
            expected: format!("{0}x{0} and {1}x{1} blocks", sig.p, sig.q),
            got: format!("{}x{} and {}x{}", kappa1.rows(), kappa1.cols(), kappa2.rows(), kappa2.cols()),
        });
    }
    check_special_orthogonal(kappa1, tol)?;
    check_special_orthogonal(kappa2, tol)?;
    Ok(embed_k_unchecked(sig, kappa1, kappa2))
}

pub(crate) fn embed_k_unchecked(sig: Signature, kappa1: &DenseMatrix, kappa2: &DenseMatrix) -> GroupElement {
    let mut m = DenseMatrix::zeros(sig.n(), sig.n());
    m.set_block(0, 0, kappa1);
    m.set_block(sig.p, sig.p, kappa2);
    GroupElement::trusted(sig, m)
}

/// κ̃ = diag(κ, 1) acting on R^{p+1} and fixing the pole N = e_{p+1}.
pub fn embed_sop_plus1(kappa1: &DenseMatrix, tol: &Tolerances) -> Result<DenseMatrix> {
    check_special_orthogonal(kappa1, tol)?;
    let p = kappa1.rows();
    let mut m = DenseMatrix::identity(p + 1);
    m.set_block(0, 0, kappa1);
    Ok(m)
}

/// Basis ordered as p-rotations, q-rotations, then boosts E_{i,p+k} + E_{p+k,i}.
pub fn algebra_basis(sig: Signature) -> Vec<AlgebraElement> {
    let n = sig.n();
    let mut basis = Vec::with_capacity(sig.algebra_dim());
    let rotation = |i: usize, j: usize| {
        let mut m = DenseMatrix::zeros(n, n);
        m[(j, i)] = 1.0;
        m[(i, j)] = -1.0;
        AlgebraElement { sig, mat: m }
    };
    for (lo, hi) in [(0, sig.p), (sig.p, n)] {
        for i in lo..hi {
            for j in (i + 1)..hi {
                basis.push(rotation(i, j));
            }
        }
    }
    for i in 0..sig.p {
        for k in sig.p..n {
            let mut m = DenseMatrix::zeros(n, n);
            m[(i, k)] = 1.0;
            m[(k, i)] = 1.0;
            basis.push(AlgebraElement { sig, mat: m });
        }
    }
    basis
}

/// Σ c_i B_i over [`algebra_basis`].
pub fn algebra_element(sig: Signature, coeffs: &[f64]) -> AlgebraElement {
    assert_eq!(coeffs.len(), sig.algebra_dim(), "coefficient vector length");
    let mat = algebra_basis(sig)
        .iter()
        .zip(coeffs)
        .fold(DenseMatrix::zeros(sig.n(), sig.n()), |acc, (b, &c)| acc.add(&b.mat.scale(c)));
    AlgebraElement { sig, mat }
}

/// Coefficients of `x` over [`algebra_basis`].
pub fn algebra_coordinates(x: &AlgebraElement) -> Vec<f64> {
    let sig = x.sig;
    let n = sig.n();
    let m = &x.mat;
    let mut coeffs = Vec::with_capacity(sig.algebra_dim());
    for (lo, hi) in [(0, sig.p), (sig.p, n)] {
        for i in lo..hi {
            for j in (i + 1)..hi {
                coeffs.push(0.5 * (m[(j, i)] - m[(i, j)]));
            }
        }
    }
    for i in 0..sig.p {
        for k in sig.p..n {
            coeffs.push(0.5 * (m[(i, k)] + m[(k, i)]));
        }
    }
    coeffs
}

#[derive(Debug, Clone)]
pub struct StabilizerAlgebra {
    /// Kernel basis in coefficient coordinates over [`algebra_basis`].
    pub coefficients: Vec<Vec<f64>>,
    pub elements: Vec<AlgebraElement>,
}

impl StabilizerAlgebra {
    pub fn dim(&self) -> usize {
        self.coefficients.len()
    }
}

/// Basis of h_v = {X ∈ so(p,q) : Xv = 0}.
pub fn stabilizer_algebra(sig: Signature, v: &[f64], tol: &Tolerances) -> Result<StabilizerAlgebra> {
    if v.len() != sig.n() {
        return Err(Error::WrongSize { expected: format!("length {}", sig.n()), got: format!("length {}", v.len()) });
    }
    if norm(v) < 1e-12 {
        return Err(Error::ZeroVector);
    }
    let basis = algebra_basis(sig);
    let images: Vec<Vec<f64>> = basis.iter().map(|b| b.mat.matvec(v)).collect();
    let map = DenseMatrix::from_fn(sig.n(), basis.len(), |i, j| images[j][i]);
    let coefficients = null_space(&map, tol.rank);
    let elements = coefficients.iter().map(|c| algebra_element(sig, c)).collect();
    Ok(StabilizerAlgebra { coefficients, elements })
}

/// Whether a stabilizer `u` of `v` lies in the identity component of the
/// stabilizer, via an adapted form-orthonormal basis of v⊥ (or of a
/// complement of span{v, w} with w null and ⟨v,w⟩ = 1 when v is null).
pub fn stabilizer_identity_component_test(u: &GroupElement, v: &[f64], tol: &Tolerances) -> Result<bool> {
    let sig = u.sig;
    if norm(v) < 1e-12 {
        return Err(Error::ZeroVector);
    }
    let residual = crate::numkit::norm(&crate::numkit::sub(&u.apply(v), v)) / norm(v);
    if residual > tol.action {
        return Err(Error::NotAStabilizer { residual });
    }
    let iv = sig.flip_p_block(v);
    let qv = sig.form(v, v);
    let mut constraints = vec![iv.clone()];
    if qv.abs() <= 1e-10 * dot(v, v) {
        let c = dot(&iv, &iv);
        let x: Vec<f64> = iv.iter().map(|t| t / c).collect();
        let alpha = sig.form(&x, &x) / 2.0;
        let w: Vec<f64> = x.iter().zip(v).map(|(xi, vi)| xi - alpha * vi).collect();
        constraints.push(sig.flip_p_block(&w));
    }
    let cmat = DenseMatrix::from_rows(&constraints)?;
    let complement = null_space(&cmat, 1e-12);
    let n = sig.n();
    let b = DenseMatrix::from_fn(n, complement.len(), |i, j| complement[j][i]);
    let i_form = gram(sig);
    let restricted = b.transpose().matmul(&i_form).matmul(&b);
    let eig = SymmetricEigen::new(restricted.symmetrized().to_nalgebra());
    let mut order: Vec<usize> = (0..complement.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let negatives = order.iter().filter(|&&i| eig.eigenvalues[i] < 0.0).count();
    let adapted = DenseMatrix::from_fn(n, order.len(), |r, c| {
        let k = order[c];
        let lam = eig.eigenvalues[k];
        let col: f64 = (0..complement.len()).map(|t| b[(r, t)] * eig.eigenvectors[(t, k)]).sum();
        col / lam.abs().sqrt()
    });
    let mixed = adapted.transpose().matmul(&i_form).matmul(u.matrix()).matmul(&adapted);
    let induced = DenseMatrix::from_fn(mixed.rows(), mixed.cols(), |r, c| {
        let eta = if r < negatives { -1.0 } else { 1.0 };
        eta * mixed[(r, c)]
    });
    let det_all = induced.determinant();
    let det_neg = induced.block(0, 0, negatives, negatives).determinant();
    Ok(det_all > 0.0 && det_neg > 0.0)
}
