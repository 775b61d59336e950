//! The basic construction on S^p × S^{q−1}: g ⋆ (k0 ⋆ z) = k ⋆ Φ_θ(z) where g k0 = k m(θ) u.

use std::f64::consts::PI;

use super::chart::act_via_chart;
use super::decompose::decompose;
use super::{k_act, GroupAction, PointSpace, ProductSpherePoint};
use crate::circleflow::{Component, FlowFunctionPair, FlowKind};
use crate::error::{Error, Result};
use crate::numkit::{norm, rotation_sending, unit_vector, DenseMatrix, Tolerances};
use crate::sopq::{embed_k_unchecked, involution, GroupElement, Signature};

/// x = k0 ⋆ (‖v0‖ e1 + v_{p+1} N, ε1); returns k0 and the slice angle in [−π/2, π/2].
pub fn point_to_slice(sig: Signature, x: &ProductSpherePoint) -> Result<(GroupElement, f64)> {
    x.check_signature(sig)?;
    let (p, q) = (sig.p(), sig.q());
    let v0 = &x.v()[..p];
    let alpha = norm(v0);
    let beta = x.v()[p];
    let kappa1 = if alpha < 1e-12 {
        DenseMatrix::identity(p)
    } else {
        rotation_sending(&unit_vector(p, 0), &v0.iter().map(|t| t / alpha).collect::<Vec<_>>())?
    };
    let nw = norm(x.w());
    let kappa2 = rotation_sending(&unit_vector(q, 0), &x.w().iter().map(|t| t / nw).collect::<Vec<_>>())?;
    Ok((embed_k_unchecked(sig, &kappa1, &kappa2), beta.atan2(alpha)))
}

/// g ⋆ (k0 ⋆ z_φ) for any slice angle φ; the slice fixed point with f = −1
/// is first moved to f = +1 through j1.
pub fn act_from_slice(
    g: &GroupElement,
    k0: &GroupElement,
    phi: f64,
    pair: &FlowFunctionPair,
    tol: &Tolerances,
) -> Result<ProductSpherePoint> {
    let sig = g.sig();
    let mut k0 = k0.clone();
    let mut phi = phi;
    let mut f = pair.f(phi)?;
    if f <= -1.0 + 1e-12 {
        k0 = k0.compose(&involution(sig, 1));
        phi = PI - phi;
        f = pair.f(phi)?;
    }
    let gk = g.compose(&k0);
    match decompose(&gk, f, tol) {
        Ok(d) => {
            let image = pair.flow_on(Component::S, d.theta, phi)?;
            Ok(k_act(&d.k, &ProductSpherePoint::slice(sig, image)))
        }
        Err(Error::OutsideWPlus { .. } | Error::NumericalAmbiguity { .. }) if f.abs() < 1.0 => {
            let x = k_act(&k0, &ProductSpherePoint::slice(sig, phi));
            act_via_chart(g, &x, pair).map_err(|e| Error::Unreachable(format!("both routes failed: {e}")))
        }
        Err(e) => Err(Error::Unreachable(format!("decomposition failed off the chart domain: {e}"))),
    }
}

/// g ⋆ x for the basic construction.
pub fn act_product(
    g: &GroupElement,
    x: &ProductSpherePoint,
    pair: &FlowFunctionPair,
    tol: &Tolerances,
) -> Result<ProductSpherePoint> {
    let (k0, phi) = point_to_slice(g.sig(), x)?;
    act_from_slice(g, &k0, phi, pair, tol)
}

/// The basic construction for a fixed signature and two-fixed-point flow.
#[derive(Debug, Clone)]
pub struct BasicConstruction {
    sig: Signature,
    pair: FlowFunctionPair,
    tol: Tolerances,
}

impl BasicConstruction {
    pub fn new(sig: Signature, pair: FlowFunctionPair, tol: Tolerances) -> Result<Self> {
        if pair.flow().kind() != FlowKind::BasicJ1 {
            return Err(Error::WrongKind { expected: "basicJ1" });
        }
        Ok(Self { sig, pair, tol: tol.validated()? })
    }

    pub fn pair(&self) -> &FlowFunctionPair {
        &self.pair
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// f-value of the slice point a product-sphere point sits over.
    pub fn slice_f(&self, x: &ProductSpherePoint) -> Result<f64> {
        let (_, phi) = point_to_slice(self.sig, x)?;
        self.pair.f(phi)
    }
}

impl GroupAction for BasicConstruction {
    type Point = ProductSpherePoint;

    fn signature(&self) -> Signature {
        self.sig
    }

    fn point_space(&self) -> PointSpace {
        PointSpace::ProductSphere
    }

    fn act(&self, g: &GroupElement, x: &ProductSpherePoint) -> Result<ProductSpherePoint> {
        act_product(g, x, &self.pair, &self.tol)
    }

    fn embed(&self, x: &ProductSpherePoint) -> Vec<f64> {
        x.embedding()
    }

    fn distance(&self, x: &ProductSpherePoint, y: &ProductSpherePoint) -> f64 {
        x.distance(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circleflow::make_flow;
    use crate::sampling::{random_group, random_rotation, random_unit, rng};
    use crate::sopq::{boost, embed_k, stabilizer_algebra, AlgebraElement};

    fn setup(a: f64) -> (Signature, FlowFunctionPair, Tolerances) {
        (
            Signature::new(3, 3).unwrap(),
            FlowFunctionPair::new(make_flow(FlowKind::BasicJ1, 1, a).unwrap()),
            Tolerances::default(),
        )
    }

    fn random_point(sig: Signature, r: &mut crate::sampling::SampleRng) -> ProductSpherePoint {
        ProductSpherePoint::new(random_unit(r, sig.p() + 1), random_unit(r, sig.q())).unwrap()
    }

    #[test]
    fn slice_reconstruction() {
        let (sig, _, _) = setup(0.0);
        let (k0, phi) = point_to_slice(sig, &ProductSpherePoint::pole(sig)).unwrap();
        assert_eq!(k0.matrix(), &DenseMatrix::identity(6));
        assert_eq!(phi, PI / 2.0);
        let x = ProductSpherePoint::slice(sig, 0.3);
        let (k0, phi) = point_to_slice(sig, &x).unwrap();
        assert_eq!(k0.matrix(), &DenseMatrix::identity(6));
        assert!((phi - 0.3).abs() < 1e-15);
        let mut r = rng(1);
        for _ in 0..100 {
            let x = random_point(sig, &mut r);
            let (k0, phi) = point_to_slice(sig, &x).unwrap();
            assert!(k_act(&k0, &ProductSpherePoint::slice(sig, phi)).distance(&x) <= 1e-10);
        }
    }

    #[test]
    fn boost_moves_pole_along_flow() {
        let (sig, pair, tol) = setup(0.0);
        let img = act_product(&boost(sig, 0.5).unwrap(), &ProductSpherePoint::pole(sig), &pair, &tol).unwrap();
        let want = ProductSpherePoint::slice(sig, 2.0 * (-1.0f64).exp().atan());
        assert!(img.distance(&want) < 1e-10);
        let (_, phi) = point_to_slice(sig, &img).unwrap();
        assert!((pair.f(phi).unwrap() - 0.5f64.tanh()).abs() < 1e-10);
    }

    #[test]
    fn extends_k_action() {
        let (sig, pair, tol) = setup(0.3);
        let mut r = rng(2);
        for _ in 0..50 {
            let (k1, k2) = (random_rotation(&mut r, 3), random_rotation(&mut r, 3));
            let k = embed_k(sig, &k1, &k2, &tol).unwrap();
            let x = random_point(sig, &mut r);
            let got = act_product(&k, &x, &pair, &tol).unwrap();
            assert!(got.distance(&k_act(&k, &x)) <= 1e-10);
        }
    }

    #[test]
    fn stabilizer_fixes_slice_point() {
        let (sig, pair, tol) = setup(0.3);
        let phi = pair.angle_with_f(0.4, PI / 2.0).unwrap();
        let z = ProductSpherePoint::slice(sig, phi);
        let mut u = vec![0.0; 6];
        u[0] = 0.4;
        u[3] = 1.0;
        let h = stabilizer_algebra(sig, &u, &tol).unwrap();
        for x in h.elements.iter().take(6) {
            let g = AlgebraElement::new(sig, x.matrix().scale(0.7), &tol).unwrap().exp();
            assert!(act_product(&g, &z, &pair, &tol).unwrap().distance(&z) <= 1e-9);
        }
    }

    #[test]
    fn action_axiom_samples() {
        let (sig, pair, tol) = setup(0.3);
        let mut r = rng(7);
        for _ in 0..30 {
            let g1 = random_group(sig, &mut r, 1.5);
            let g2 = random_group(sig, &mut r, 1.5);
            let x = random_point(sig, &mut r);
            let seq = act_product(&g2, &act_product(&g1, &x, &pair, &tol).unwrap(), &pair, &tol).unwrap();
            let comp = act_product(&g2.compose(&g1), &x, &pair, &tol).unwrap();
            assert!(seq.distance(&comp) <= 1e-6, "{}", seq.distance(&comp));
        }
    }

    #[test]
    fn closed_orbit_stays_closed() {
        let (sig, pair, tol) = setup(0.3);
        let mut r = rng(9);
        for phi in [0.0, PI] {
            let z = ProductSpherePoint::slice(sig, phi);
            for _ in 0..10 {
                let g = random_group(sig, &mut r, 1.5);
                let img = act_product(&g, &z, &pair, &tol).unwrap();
                assert!((img.v()[sig.p()]).abs() <= 1e-9);
            }
        }
    }
}
