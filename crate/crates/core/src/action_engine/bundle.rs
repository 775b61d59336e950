//! The twisted product G ×_P S¹, with P the stabilizer of the null line R(e1 + ε1)
//! acting on S¹ through its boost part: p ⋆ φ = Φ_{π(p)}(φ).

use super::decompose::decompose_datum;
use super::{GroupAction, PointSpace};
use crate::circleflow::{circle_dist, CircleFlow};
use crate::error::{Error, Result};
use crate::numkit::{norm, Tolerances};
use crate::sopq::{GroupElement, Signature};

/// e1 + ε1.
pub fn null_datum(sig: Signature) -> Vec<f64> {
    let mut n = vec![0.0; sig.n()];
    n[0] = 1.0;
    n[sig.eps1()] = 1.0;
    n
}

/// π(p) = ln|c| where p(e1 + ε1) = c(e1 + ε1).
pub fn bundle_pi(p: &GroupElement, tol: &Tolerances) -> Result<f64> {
    let sig = p.sig();
    let n = null_datum(sig);
    let image = p.apply(&n);
    let i = if image[0].abs() >= image[sig.eps1()].abs() { 0 } else { sig.eps1() };
    let c = image[i];
    let residual = norm(&image.iter().zip(&n).map(|(x, y)| x - c * y).collect::<Vec<_>>()) / norm(&image);
    if residual.is_nan() || residual > tol.action || c == 0.0 {
        return Err(Error::NotInP { residual });
    }
    Ok(c.abs().ln())
}

/// [g, φ] ∈ G ×_P S¹; `g` is a witness of its coset, compared only through [`bundle_eq`].
#[derive(Debug, Clone, PartialEq)]
pub struct BundlePoint {
    pub g: GroupElement,
    pub phi: f64,
}

impl BundlePoint {
    pub fn new(g: GroupElement, phi: f64) -> Self {
        Self { g, phi: crate::circleflow::wrap(phi) }
    }

    /// vec(a bᵀ) ⊕ (cos φ, sin φ) with a = κ1 e1, b = κ2 ε1 of a K-witness;
    /// constant on the coset of a canonical point.
    pub fn embedding(&self) -> Vec<f64> {
        let sig = self.g.sig();
        let p = sig.p();
        let a: Vec<f64> = self.g.matrix().column(0)[..p].to_vec();
        let b: Vec<f64> = self.g.matrix().column(sig.eps1())[p..].to_vec();
        let mut out: Vec<f64> = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
        out.push(self.phi.cos());
        out.push(self.phi.sin());
        out
    }
}

/// [k, Φ_θ(φ)] from g = k · m(θ) · u with u fixing e1 + ε1.
pub fn bundle_canonical(pt: &BundlePoint, flow: &CircleFlow, tol: &Tolerances) -> Result<BundlePoint> {
    let d = decompose_datum(&pt.g, 1.0, 1.0, tol).map_err(|e| Error::CanonicalizationFailure(e.to_string()))?;
    let phi = flow.flow_map(d.theta, pt.phi)?;
    Ok(BundlePoint::new(d.k, phi))
}

/// g ⋆ [g0, φ] = canonical [g g0, φ].
pub fn bundle_act(g: &GroupElement, pt: &BundlePoint, flow: &CircleFlow, tol: &Tolerances) -> Result<BundlePoint> {
    bundle_canonical(&BundlePoint::new(g.compose(&pt.g), pt.phi), flow, tol)
}

/// Whether g2⁻¹g1 ∈ P and φ2 = Φ_{π(g2⁻¹g1)}(φ1); returns the angle discrepancy when in P.
pub fn bundle_discrepancy(a: &BundlePoint, b: &BundlePoint, flow: &CircleFlow, tol: &Tolerances) -> Result<f64> {
    let h = b.g.inverse().compose(&a.g);
    let theta = bundle_pi(&h, tol)?;
    Ok(circle_dist(flow.flow_map(theta, a.phi)?, b.phi))
}

pub fn bundle_eq(a: &BundlePoint, b: &BundlePoint, flow: &CircleFlow, tol: &Tolerances) -> bool {
    matches!(bundle_discrepancy(a, b, flow, tol), Ok(d) if d <= tol.ode)
}

#[derive(Debug, Clone)]
pub struct BundleAction {
    sig: Signature,
    flow: CircleFlow,
    tol: Tolerances,
}

impl BundleAction {
    pub fn new(sig: Signature, flow: CircleFlow, tol: Tolerances) -> Result<Self> {
        Ok(Self { sig, flow, tol: tol.validated()? })
    }

    pub fn flow(&self) -> &CircleFlow {
        &self.flow
    }

    pub fn point(&self, g: GroupElement, phi: f64) -> Result<BundlePoint> {
        bundle_canonical(&BundlePoint::new(g, phi), &self.flow, &self.tol)
    }
}

impl GroupAction for BundleAction {
    type Point = BundlePoint;

    fn signature(&self) -> Signature {
        self.sig
    }

    fn point_space(&self) -> PointSpace {
        PointSpace::Bundle
    }

    fn act(&self, g: &GroupElement, x: &BundlePoint) -> Result<BundlePoint> {
        bundle_act(g, x, &self.flow, &self.tol)
    }

    fn embed(&self, x: &BundlePoint) -> Vec<f64> {
        x.embedding()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circleflow::{make_flow, FlowKind};
    use crate::numkit::DenseMatrix;
    use crate::sampling::{coeffs_in_ball, random_group, rng};
    use crate::sopq::{boost, stabilizer_algebra, AlgebraElement};

    fn setup() -> (Signature, CircleFlow, Tolerances) {
        (Signature::new(3, 3).unwrap(), make_flow(FlowKind::BasicJ1, 1, 0.3).unwrap(), Tolerances::default())
    }

    fn random_null_stabilizer(sig: Signature, r: &mut crate::sampling::SampleRng, tol: &Tolerances) -> GroupElement {
        let h = stabilizer_algebra(sig, &null_datum(sig), tol).unwrap();
        let c = coeffs_in_ball(r, h.dim(), 1.0);
        let x = h
            .elements
            .iter()
            .zip(&c)
            .fold(DenseMatrix::zeros(sig.n(), sig.n()), |acc, (e, &w)| acc.add(&e.matrix().scale(w)));
        AlgebraElement::new(sig, x, tol).unwrap().exp()
    }

    #[test]
    fn pi_examples() {
        let (sig, _, tol) = setup();
        for theta in [-2.0, 0.0, 1.0, 3.5] {
            assert!((bundle_pi(&boost(sig, theta).unwrap(), &tol).unwrap() - theta).abs() <= 1e-12);
        }
        let mut r = rng(21);
        for _ in 0..20 {
            let u = random_null_stabilizer(sig, &mut r, &tol);
            assert!(bundle_pi(&u, &tol).unwrap().abs() <= 1e-9);
            let p = u.compose(&boost(sig, 0.4).unwrap()).compose(&random_null_stabilizer(sig, &mut r, &tol));
            let q = boost(sig, -1.1).unwrap().compose(&random_null_stabilizer(sig, &mut r, &tol));
            let lhs = bundle_pi(&p.compose(&q), &tol).unwrap();
            assert!((lhs - bundle_pi(&p, &tol).unwrap() - bundle_pi(&q, &tol).unwrap()).abs() <= 1e-10);
        }
        let g = random_group(sig, &mut r, 1.0);
        assert!(matches!(bundle_pi(&g, &tol), Err(Error::NotInP { .. })));
    }

    #[test]
    fn canonical_form_of_boost() {
        let (sig, flow, tol) = setup();
        let pt = bundle_canonical(&BundlePoint::new(boost(sig, 0.8).unwrap(), 1.0), &flow, &tol).unwrap();
        assert!(pt.g.matrix().sub(&DenseMatrix::identity(6)).max_abs() < 1e-10);
        assert!(circle_dist(pt.phi, flow.flow_map(0.8, 1.0).unwrap()) < 1e-10);
        let again = bundle_canonical(&pt, &flow, &tol).unwrap();
        assert!(bundle_eq(&again, &pt, &flow, &tol));
        assert!(circle_dist(again.phi, pt.phi) < 1e-10);
    }

    #[test]
    fn action_axiom_through_bundle_eq() {
        let (sig, flow, tol) = setup();
        let mut r = rng(22);
        for _ in 0..30 {
            let pt =
                BundlePoint::new(random_group(sig, &mut r, 1.5), 6.0 * crate::sampling::uniform_coeffs(&mut r, 1)[0]);
            let (g1, g2) = (random_group(sig, &mut r, 1.5), random_group(sig, &mut r, 1.5));
            let seq = bundle_act(&g2, &bundle_act(&g1, &pt, &flow, &tol).unwrap(), &flow, &tol).unwrap();
            let comp = bundle_act(&g2.compose(&g1), &pt, &flow, &tol).unwrap();
            assert!(bundle_eq(&seq, &comp, &flow, &tol));
            let ident = bundle_act(&GroupElement::identity(sig), &pt, &flow, &tol).unwrap();
            assert!(bundle_eq(&ident, &pt, &flow, &tol));
        }
    }
}
