//! The mirrored construction on S^{p−1} × S^q, obtained by running the basic
//! construction for SO°(q,p) through the block swap.

use serde::Serialize;

use super::product::BasicConstruction;
use super::{GroupAction, PointSpace, ProductSpherePoint};
use crate::circleflow::FlowFunctionPair;
use crate::error::{Error, Result};
use crate::numkit::{norm, DenseMatrix, Tolerances};
use crate::sopq::{GroupElement, Signature};

/// Π with Π(x_p ⊕ y_q) = y_q ⊕ x_p; Π I_{p,q} Πᵀ = −I_{q,p}.
pub fn block_swap(sig: Signature) -> DenseMatrix {
    let (p, q) = (sig.p(), sig.q());
    DenseMatrix::from_fn(sig.n(), sig.n(), |i, j| {
        let src = if i < q { p + i } else { i - q };
        if j == src {
            1.0
        } else {
            0.0
        }
    })
}

/// (a, b) ∈ S^{p−1} × S^q; b carries the pole as its last coordinate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwapPoint {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl SwapPoint {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        for part in [&a, &b] {
            if (norm(part) - 1.0).abs() > 1e-9 {
                return Err(Error::NonUnitInput { norm: norm(part) });
            }
        }
        Ok(Self { a, b })
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let da = norm(&crate::numkit::sub(&self.a, &other.a));
        let db = norm(&crate::numkit::sub(&self.b, &other.b));
        da.max(db)
    }
}

#[derive(Debug, Clone)]
pub struct SwapAdapter {
    sig: Signature,
    swap: DenseMatrix,
    inner: BasicConstruction,
}

impl SwapAdapter {
    pub fn new(sig: Signature, pair: FlowFunctionPair, tol: Tolerances) -> Result<Self> {
        Ok(Self { sig, swap: block_swap(sig), inner: BasicConstruction::new(sig.swapped(), pair, tol)? })
    }

    pub fn permutation(&self) -> &DenseMatrix {
        &self.swap
    }

    /// Π g Πᵀ ∈ SO°(q,p).
    pub fn conjugate(&self, g: &GroupElement) -> GroupElement {
        let m = self.swap.matmul(g.matrix()).matmul(&self.swap.transpose());
        GroupElement::trusted(self.sig.swapped(), m)
    }
}

impl GroupAction for SwapAdapter {
    type Point = SwapPoint;

    fn signature(&self) -> Signature {
        self.sig
    }

    fn point_space(&self) -> PointSpace {
        PointSpace::ProductSphere
    }

    fn act(&self, g: &GroupElement, x: &SwapPoint) -> Result<SwapPoint> {
        let inner_point = ProductSpherePoint::new(x.b.clone(), x.a.clone())?;
        let moved = self.inner.act(&self.conjugate(g), &inner_point)?;
        Ok(SwapPoint { a: moved.w().to_vec(), b: moved.v().to_vec() })
    }

    fn embed(&self, x: &SwapPoint) -> Vec<f64> {
        x.a.iter().chain(&x.b).copied().collect()
    }

    fn distance(&self, x: &SwapPoint, y: &SwapPoint) -> f64 {
        x.distance(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circleflow::{make_flow, FlowKind};
    use crate::sampling::{random_group, random_rotation, random_unit, rng};
    use crate::sopq::{embed_k, gram, is_in_group};

    #[test]
    fn permutation_identities() {
        let sig = Signature::new(3, 4).unwrap();
        let pi = block_swap(sig);
        let back = block_swap(sig.swapped());
        assert_eq!(back.matmul(&pi), DenseMatrix::identity(7));
        let lhs = pi.matmul(&gram(sig)).matmul(&pi.transpose());
        assert_eq!(lhs, gram(sig.swapped()).scale(-1.0));
        let tol = Tolerances::default();
        let pair = FlowFunctionPair::new(make_flow(FlowKind::BasicJ1, 1, 0.2).unwrap());
        let adapter = SwapAdapter::new(sig, pair, tol).unwrap();
        let g = random_group(sig, &mut rng(1), 1.5);
        assert!(is_in_group(adapter.conjugate(&g).matrix(), sig.swapped(), &tol).is_ok());
    }

    #[test]
    fn k_restriction_is_standard() {
        let sig = Signature::new(3, 4).unwrap();
        let tol = Tolerances::default();
        let pair = FlowFunctionPair::new(make_flow(FlowKind::BasicJ1, 1, 0.2).unwrap());
        let adapter = SwapAdapter::new(sig, pair, tol).unwrap();
        let mut r = rng(3);
        for _ in 0..20 {
            let (k1, k2) = (random_rotation(&mut r, 3), random_rotation(&mut r, 4));
            let k = embed_k(sig, &k1, &k2, &tol).unwrap();
            let x = SwapPoint::new(random_unit(&mut r, 3), random_unit(&mut r, 5)).unwrap();
            let got = adapter.act(&k, &x).unwrap();
            let mut b = k2.matvec(&x.b[..4]);
            b.push(x.b[4]);
            let want = SwapPoint { a: k1.matvec(&x.a), b };
            assert!(got.distance(&want) <= 1e-10);
        }
    }

    #[test]
    fn action_axiom_samples() {
        let sig = Signature::new(3, 3).unwrap();
        let tol = Tolerances::default();
        let pair = FlowFunctionPair::new(make_flow(FlowKind::BasicJ1, 1, 0.2).unwrap());
        let adapter = SwapAdapter::new(sig, pair, tol).unwrap();
        let mut r = rng(5);
        for _ in 0..10 {
            let (g1, g2) = (random_group(sig, &mut r, 1.0), random_group(sig, &mut r, 1.0));
            let x = SwapPoint::new(random_unit(&mut r, 3), random_unit(&mut r, 4)).unwrap();
            let seq = adapter.act(&g2, &adapter.act(&g1, &x).unwrap()).unwrap();
            let comp = adapter.act(&g2.compose(&g1), &x).unwrap();
            assert!(seq.distance(&comp) <= 1e-6);
        }
    }
}
