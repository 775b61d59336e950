//! The constructed SO°(p,q) actions on S^p × S^{q−1}, S^{p+q−1} and
//! G ×_P S¹, their decomposition solver and the chart route F0/F1.

mod bundle;
mod chart;
mod decompose;
mod product;
mod sphere;
mod swap;

use std::f64::consts::PI;

use serde::Serialize;

use crate::circleflow::FlowFunctionPair;
use crate::error::{Error, Result};
use crate::numkit::{norm, DenseMatrix, Tolerances};
use crate::sopq::{boost, embed_k, stabilizer_algebra, GroupElement, Signature};

pub use bundle::{
    bundle_act, bundle_canonical, bundle_discrepancy, bundle_eq, bundle_pi, null_datum, BundleAction, BundlePoint,
};
pub use chart::{act_via_chart, chart_f0, chart_f1, even_series_fit, ChartSide, EvenSeriesFit};
pub use decompose::{
    decompose, decompose_datum, solve_theta, solve_theta_datum, Branch, DecompositionResult, ThetaRoots, BOUNDARY_GAP,
};
pub use product::{act_from_slice, act_product, point_to_slice, BasicConstruction};
pub use sphere::{act_sphere, sphere_to_slice, UchidaAction};
pub use swap::{block_swap, SwapAdapter, SwapPoint};

/// Which space an action lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PointSpace {
    ProductSphere,
    Sphere,
    Bundle,
}

/// A smooth action of SO°(p,q) with points embedded in a linear space.
pub trait GroupAction {
    type Point: Clone + std::fmt::Debug;

    fn signature(&self) -> Signature;
    fn point_space(&self) -> PointSpace;
    fn act(&self, g: &GroupElement, x: &Self::Point) -> Result<Self::Point>;
    /// Coordinates of a point in the ambient linear space used for tangent vectors.
    fn embed(&self, x: &Self::Point) -> Vec<f64>;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> f64 {
        norm(&crate::numkit::sub(&self.embed(x), &self.embed(y)))
    }
}

fn check_unit(x: &[f64], tol: f64) -> Result<()> {
    let n = norm(x);
    if (n - 1.0).abs() > tol {
        return Err(Error::NonUnitInput { norm: n });
    }
    Ok(())
}

/// (v, w) ∈ S^p × S^{q−1}; v uses e1..ep then the pole N, w uses ε1..εq.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductSpherePoint {
    v: Vec<f64>,
    w: Vec<f64>,
}

impl ProductSpherePoint {
    pub fn new(v: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        check_unit(&v, 1e-9)?;
        check_unit(&w, 1e-9)?;
        if v.len() < 2 || w.is_empty() {
            return Err(Error::DimensionTooSmall { n: v.len().min(w.len()) });
        }
        Ok(Self { v, w })
    }

    /// Normalizes both factors.
    pub fn normalized(v: &[f64], w: &[f64]) -> Result<Self> {
        let (nv, nw) = (norm(v), norm(w));
        if nv == 0.0 || nw == 0.0 {
            return Err(Error::ZeroVector);
        }
        Self::new(v.iter().map(|x| x / nv).collect(), w.iter().map(|x| x / nw).collect())
    }

    pub(crate) fn raw(v: Vec<f64>, w: Vec<f64>) -> Self {
        Self { v, w }
    }

    /// (cos φ e1 + sin φ N, ε1).
    pub fn slice(sig: Signature, phi: f64) -> Self {
        let mut v = vec![0.0; sig.p() + 1];
        v[0] = phi.cos();
        v[sig.p()] = phi.sin();
        let mut w = vec![0.0; sig.q()];
        w[0] = 1.0;
        Self { v, w }
    }

    /// (N, ε1).
    pub fn pole(sig: Signature) -> Self {
        Self::slice(sig, PI / 2.0)
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn check_signature(&self, sig: Signature) -> Result<()> {
        if self.v.len() != sig.p() + 1 || self.w.len() != sig.q() {
            return Err(Error::WrongSize {
                expected: format!("S^{} x S^{}", sig.p(), sig.q() - 1),
                got: format!("vectors of length {} and {}", self.v.len(), self.w.len()),
            });
        }
        Ok(())
    }

    /// max of the chordal distances on the two factors.
    pub fn distance(&self, other: &Self) -> f64 {
        let dv = norm(&crate::numkit::sub(&self.v, &other.v));
        let dw = norm(&crate::numkit::sub(&self.w, &other.w));
        dv.max(dw)
    }

    pub fn embedding(&self) -> Vec<f64> {
        self.v.iter().chain(&self.w).copied().collect()
    }
}

/// y ∈ S^{p+q−1} ⊂ R^{p+q}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpherePoint {
    y: Vec<f64>,
}

impl SpherePoint {
    pub fn new(y: Vec<f64>) -> Result<Self> {
        check_unit(&y, 1e-9)?;
        Ok(Self { y })
    }

    pub fn normalized(y: &[f64]) -> Result<Self> {
        let n = norm(y);
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Self { y: y.iter().map(|x| x / n).collect() })
    }

    pub(crate) fn raw(y: Vec<f64>) -> Self {
        Self { y }
    }

    /// cos φ e1 + sin φ ε1.
    pub fn slice(sig: Signature, phi: f64) -> Self {
        let mut y = vec![0.0; sig.n()];
        y[0] = phi.cos();
        y[sig.eps1()] = phi.sin();
        Self { y }
    }

    pub fn coords(&self) -> &[f64] {
        &self.y
    }

    pub fn check_signature(&self, sig: Signature) -> Result<()> {
        if self.y.len() != sig.n() {
            return Err(Error::WrongSize {
                expected: format!("length {}", sig.n()),
                got: format!("length {}", self.y.len()),
            });
        }
        Ok(())
    }

    pub fn distance(&self, other: &Self) -> f64 {
        norm(&crate::numkit::sub(&self.y, &other.y))
    }
}

/// (κ̃1 v, κ2 w) for k = block-diag(κ1, κ2).
pub(crate) fn k_act(k: &GroupElement, x: &ProductSpherePoint) -> ProductSpherePoint {
    let (kappa1, kappa2) = k.k_blocks();
    let p = kappa1.rows();
    let mut v = kappa1.matvec(&x.v[..p]);
    v.push(x.v[p]);
    ProductSpherePoint { v, w: kappa2.matvec(&x.w) }
}

/// The standard action of K = SO(p) × SO(q) on S^p × S^{q−1}.
pub fn standard_k_act(
    sig: Signature,
    kappa1: &DenseMatrix,
    kappa2: &DenseMatrix,
    x: &ProductSpherePoint,
    tol: &Tolerances,
) -> Result<ProductSpherePoint> {
    x.check_signature(sig)?;
    let k = embed_k(sig, kappa1, kappa2, tol)?;
    Ok(k_act(&k, x))
}

/// g·y/‖g·y‖.
pub fn projective_act(g: &GroupElement, y: &SpherePoint) -> Result<SpherePoint> {
    y.check_signature(g.sig())?;
    SpherePoint::normalized(&g.apply(&y.y))
}

/// P = u uᵀ/‖u‖² for u = a e1 + b ε1.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneProjector {
    pub a: f64,
    pub b: f64,
    pub mat: DenseMatrix,
}

/// Unit vector along a e1 + b ε1.
pub(crate) fn datum_vector(sig: Signature, a: f64, b: f64) -> Vec<f64> {
    let r = a.hypot(b);
    let mut u = vec![0.0; sig.n()];
    u[0] = a / r;
    u[sig.eps1()] = b / r;
    u
}

/// The projector onto f e1 + ε1.
pub fn projector(sig: Signature, f: f64) -> RankOneProjector {
    projector_datum(sig, f, 1.0)
}

/// The projector onto a e1 + b ε1 (the projective [a:b] variant).
pub fn projector_datum(sig: Signature, a: f64, b: f64) -> RankOneProjector {
    let u = datum_vector(sig, a, b);
    RankOneProjector { a, b, mat: DenseMatrix::outer(&u, &u) }
}

/// λ(θ, f) = cosh 2θ + (2f/(1+f²)) sinh 2θ.
pub fn lambda_scale(theta: f64, f: f64) -> f64 {
    lambda_datum(theta, f, 1.0)
}

pub fn lambda_datum(theta: f64, a: f64, b: f64) -> f64 {
    let s = 2.0 * a * b / (a * a + b * b);
    (2.0 * theta).cosh() + s * (2.0 * theta).sinh()
}

/// Residuals of the boost conjugation identities at (θ, f).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConjugationResiduals {
    /// f-value of Φ_θ(z) supplied by the flow pair.
    pub f_image: f64,
    /// ‖m(θ) P(z) m(θ) − λ P(Φ_θ z)‖_F.
    pub projector: f64,
    /// Largest ‖Y u′‖/‖Y‖ over Y = m(θ) X m(−θ), X in a basis of h_{f e1+ε1}, u′ = f′e1 + ε1.
    pub stabilizer: f64,
    /// dim h_{f′e1+ε1} − dim h_{f e1+ε1}.
    pub dimension_change: i64,
}

/// Checks m(θ)P(z)m(θ) = λ(θ,z)P(Φ_θ z) and m(θ) h_z m(−θ) = h_{Φ_θ z} with f-values from the pair.
pub fn conjugation_identity_check(
    sig: Signature,
    theta: f64,
    f: f64,
    pair: &FlowFunctionPair,
    tol: &Tolerances,
) -> Result<ConjugationResiduals> {
    if f.abs() >= 1.0 {
        return Err(Error::BadParameters(format!("|f| = {} is not below 1", f.abs())));
    }
    let phi = pair.angle_with_f(f, PI / 2.0)?;
    let f_image = pair.f(pair.flow_on(crate::circleflow::Component::S, theta, phi)?)?;
    let m = boost(sig, theta)?;
    let lhs = m.matrix().matmul(&projector(sig, f).mat).matmul(m.matrix());
    let rhs = projector(sig, f_image).mat.scale(lambda_scale(theta, f));
    let projector_residual = lhs.sub(&rhs).frobenius_norm();

    let u = datum_vector(sig, f, 1.0);
    let u_image = datum_vector(sig, f_image, 1.0);
    let h = stabilizer_algebra(sig, &u, tol)?;
    let h_image = stabilizer_algebra(sig, &u_image, tol)?;
    let m_inv = m.inverse();
    let mut stabilizer = 0.0f64;
    for x in &h.elements {
        let y = m.matrix().matmul(x.matrix()).matmul(m_inv.matrix());
        stabilizer = stabilizer.max(norm(&y.matvec(&u_image)) / y.frobenius_norm());
    }
    Ok(ConjugationResiduals {
        f_image,
        projector: projector_residual,
        stabilizer,
        dimension_change: h_image.dim() as i64 - h.dim() as i64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circleflow::{make_flow, FlowKind};
    use crate::sampling::{random_rotation, rng};
    use crate::sopq::involution;

    fn sig33() -> Signature {
        Signature::new(3, 3).unwrap()
    }

    #[test]
    fn k_action_examples() {
        let sig = sig33();
        let tol = Tolerances::default();
        let x = ProductSpherePoint::slice(sig, 0.4);
        let id = DenseMatrix::identity(3);
        assert_eq!(standard_k_act(sig, &id, &id, &x, &tol).unwrap(), x);
        let j1 = involution(sig, 1);
        let moved = k_act(&j1, &x);
        assert_eq!(moved.v(), &[-0.4f64.cos(), 0.0, 0.0, 0.4f64.sin()][..]);
        let mut r = rng(5);
        let kappa = random_rotation(&mut r, 3);
        let pole = standard_k_act(sig, &kappa, &id, &ProductSpherePoint::pole(sig), &tol).unwrap();
        assert!(pole.distance(&ProductSpherePoint::pole(sig)) < 1e-15);
        let bad = DenseMatrix::diagonal(&[-1.0, 1.0, 1.0]);
        assert!(matches!(standard_k_act(sig, &bad, &id, &x, &tol), Err(Error::NotSpecialOrthogonal { .. })));
    }

    #[test]
    fn projector_and_lambda_examples() {
        let sig = sig33();
        for f in [-0.7, 0.0, 0.3, 1.0] {
            assert!((projector(sig, f).mat.trace() - 1.0).abs() < 1e-15);
            assert_eq!(lambda_scale(0.0, f), 1.0);
        }
        assert!((lambda_scale(1.0, 0.0) - 2f64.cosh()).abs() < 1e-15);
        assert!((lambda_scale(1.0, 0.0) - 3.76220).abs() < 1e-5);
        for theta in [-1.5, 0.2, 2.0] {
            assert!((lambda_scale(theta, 1.0) - (2.0 * theta).exp()).abs() < 1e-12 * (2.0 * theta).exp());
        }
        let p0 = projector(sig, 0.0).mat;
        let (scale, u) = crate::numkit::rank_one_factor(&p0, &Tolerances::default()).unwrap();
        assert!((scale - 1.0).abs() < 1e-15 && (u[3] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn projective_boost_of_eps1() {
        let sig = sig33();
        let theta: f64 = 0.9;
        let y = SpherePoint::slice(sig, PI / 2.0);
        let img = projective_act(&boost(sig, theta).unwrap(), &y).unwrap();
        let scale = theta.cosh() * (1.0 + theta.tanh().powi(2)).sqrt();
        assert!((img.coords()[0] - theta.sinh() / scale).abs() < 1e-15);
        assert!((img.coords()[3] - theta.cosh() / scale).abs() < 1e-15);
    }

    #[test]
    fn conjugation_identities_hold() {
        let sig = sig33();
        let tol = Tolerances::default();
        let pair = FlowFunctionPair::new(make_flow(FlowKind::BasicJ1, 1, 0.3).unwrap());
        let zero = conjugation_identity_check(sig, 0.0, 0.3, &pair, &tol).unwrap();
        assert!(zero.projector < 1e-14 && zero.stabilizer < 1e-14);
        let r = conjugation_identity_check(sig, 0.8, 0.3, &pair, &tol).unwrap();
        let t = 0.8f64.tanh();
        assert!((r.f_image - (0.3 + t) / (1.0 + 0.3 * t)).abs() < 1e-9);
        assert!(r.projector <= 1e-9, "{r:?}");
        assert!(r.stabilizer <= 1e-9, "{r:?}");
        assert_eq!(r.dimension_change, 0);
    }
}
