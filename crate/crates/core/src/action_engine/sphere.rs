//! The four-fixed-point construction on S^{p+q−1}: the slice is {α e1 + β ε1}
//! and f̃ = [a:b] replaces the scalar f.

use super::decompose::decompose_best;
use super::{GroupAction, PointSpace, SpherePoint};
use crate::circleflow::{FlowFunctionPair, FlowKind};
use crate::error::{Error, Result};
use crate::numkit::{norm, rotation_sending, unit_vector, DenseMatrix, Tolerances};
use crate::sopq::{embed_k_unchecked, GroupElement, Signature};

/// y = k0 · (cos φ e1 + sin φ ε1) with φ ∈ [0, π/2].
pub fn sphere_to_slice(sig: Signature, y: &SpherePoint) -> Result<(GroupElement, f64)> {
    y.check_signature(sig)?;
    let (p, q) = (sig.p(), sig.q());
    let (yp, yq) = y.coords().split_at(p);
    let (alpha, beta) = (norm(yp), norm(yq));
    let block = |part: &[f64], r: f64, dim: usize| -> Result<DenseMatrix> {
        if r < 1e-12 {
            Ok(DenseMatrix::identity(dim))
        } else {
            rotation_sending(&unit_vector(dim, 0), &part.iter().map(|t| t / r).collect::<Vec<_>>())
        }
    };
    let k0 = embed_k_unchecked(sig, &block(yp, alpha, p)?, &block(yq, beta, q)?);
    Ok((k0, beta.atan2(alpha)))
}

/// g ⋆ y for the sphere construction driven by a four-fixed-point pair.
pub fn act_sphere(g: &GroupElement, y: &SpherePoint, pair: &FlowFunctionPair, tol: &Tolerances) -> Result<SpherePoint> {
    if pair.flow().kind() != FlowKind::BasicJ1J2 {
        return Err(Error::WrongKind { expected: "basicJ1J2" });
    }
    let sig = g.sig();
    let (k0, phi) = sphere_to_slice(sig, y)?;
    let ft = pair.f_tilde(phi)?;
    let d = decompose_best(&g.compose(&k0), ft.a(), ft.b(), tol)
        .map_err(|e| Error::Unreachable(format!("sphere decomposition failed: {e}")))?;
    let image = pair.flow().flow_map(d.theta, phi)?;
    Ok(SpherePoint::raw(d.k.apply(SpherePoint::slice(sig, image).coords())))
}

#[derive(Debug, Clone)]
pub struct UchidaAction {
    sig: Signature,
    pair: FlowFunctionPair,
    tol: Tolerances,
}

impl UchidaAction {
    pub fn new(sig: Signature, pair: FlowFunctionPair, tol: Tolerances) -> Result<Self> {
        if pair.flow().kind() != FlowKind::BasicJ1J2 {
            return Err(Error::WrongKind { expected: "basicJ1J2" });
        }
        Ok(Self { sig, pair, tol: tol.validated()? })
    }

    pub fn pair(&self) -> &FlowFunctionPair {
        &self.pair
    }
}

impl GroupAction for UchidaAction {
    type Point = SpherePoint;

    fn signature(&self) -> Signature {
        self.sig
    }

    fn point_space(&self) -> PointSpace {
        PointSpace::Sphere
    }

    fn act(&self, g: &GroupElement, y: &SpherePoint) -> Result<SpherePoint> {
        act_sphere(g, y, &self.pair, &self.tol)
    }

    fn embed(&self, y: &SpherePoint) -> Vec<f64> {
        y.coords().to_vec()
    }
}
