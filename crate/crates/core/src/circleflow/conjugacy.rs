//! Arcwise conjugacies between circle flows built by matching transit times.

use std::f64::consts::TAU;
use std::fmt;

use serde::Serialize;

use super::solver::{circle_dist, flow_map, locate, transit_unwrapped, unwrap_into_arc, wrap, Location, VectorField};
use crate::error::{Error, Result};

/// Ψ(φ) = Φ^B_τ(anchor_B) where τ is the A-transit time from anchor_A to φ on the same arc.
#[derive(Debug, Clone)]
pub struct ConjugacyMap<A, B> {
    source: A,
    target: B,
    /// Largest sampled |Ψ∘Φ^A_θ − Φ^B_θ∘Ψ|.
    pub defect: f64,
    /// (left, right) slope of Ψ at each fixed point of A.
    pub fixed_point_slopes: Vec<(f64, f64)>,
}

impl<A: VectorField, B: VectorField> ConjugacyMap<A, B> {
    pub fn eval(&self, phi: f64) -> Result<f64> {
        psi(&self.source, &self.target, phi)
    }

    pub fn source(&self) -> &A {
        &self.source
    }

    pub fn target(&self) -> &B {
        &self.target
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugacyFailure {
    /// Short name of the violated invariant.
    pub invariant: &'static str,
    pub detail: String,
}

impl fmt::Display for ConjugacyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.detail)
    }
}

#[derive(Debug, Clone)]
pub enum ConjugacyOutcome<A, B> {
    Conjugate(ConjugacyMap<A, B>),
    NotConjugate(ConjugacyFailure),
}

impl<A, B> ConjugacyOutcome<A, B> {
    pub fn is_conjugate(&self) -> bool {
        matches!(self, ConjugacyOutcome::Conjugate(_))
    }

    pub fn failure(&self) -> Option<&ConjugacyFailure> {
        match self {
            ConjugacyOutcome::NotConjugate(f) => Some(f),
            ConjugacyOutcome::Conjugate(_) => None,
        }
    }
}

const DEFECT_TOL: f64 = 1e-6;
const SLOPE_TOL: f64 = 1e-3;
const SLOPE_STEPS: [f64; 2] = [1e-3, 1e-4];

fn signed(x: f64) -> String {
    let s = format!("{}", x);
    s.replace('-', "\u{2212}")
}

fn psi<A: VectorField + ?Sized, B: VectorField + ?Sized>(source: &A, target: &B, phi: f64) -> Result<f64> {
    let zeros = source.zeros();
    match locate(&zeros, phi) {
        Location::Fixed(i) => Ok(target.zeros()[i]),
        Location::Arc { index, phi, .. } => {
            let anchor = unwrap_into_arc(&zeros, index, source.anchors()[index])
                .ok_or_else(|| Error::BadInputFlow(format!("anchor {index} is not inside its arc")))?;
            let tau = transit_unwrapped(source, anchor, phi);
            Ok(wrap(flow_map(target, tau, target.anchors()[index])?))
        }
    }
}

/// Ψ(z ± δ) − Ψ(z) taken along the arc, so wrapping at 2π does not matter.
fn one_sided_slope<A: VectorField + ?Sized, B: VectorField + ?Sized>(
    source: &A,
    target: &B,
    index: usize,
    side: f64,
) -> Result<f64> {
    let z = source.zeros()[index];
    let zb = target.zeros()[index];
    let at = |delta: f64| -> Result<f64> {
        let image = psi(source, target, z + side * delta)?;
        Ok(circle_dist(image, zb) / delta)
    };
    let (d1, d2) = (SLOPE_STEPS[0], SLOPE_STEPS[1]);
    let (s1, s2) = (at(d1)?, at(d2)?);
    Ok((d1 * s2 - d2 * s1) / (d1 - d2))
}

/// Builds Ψ from flow A to flow B and certifies it on a grid.
pub fn conjugacy_map<A, B>(source: A, target: B) -> Result<ConjugacyOutcome<A, B>>
where
    A: VectorField,
    B: VectorField,
{
    let (za, zb) = (source.zeros(), target.zeros());
    if za.len() != zb.len() {
        return Err(Error::KindMismatch);
    }
    for (&x, &y) in za.iter().zip(&zb) {
        let (ja, jb) = (source.derivative(x), target.derivative(y));
        if (ja - jb).abs() > 1e-12 * ja.abs().max(jb.abs()) {
            return Ok(ConjugacyOutcome::NotConjugate(ConjugacyFailure {
                invariant: "jacobian",
                detail: format!("Jacobian mismatch {} vs {}", signed(ja), signed(jb)),
            }));
        }
    }

    let mut defect = 0.0f64;
    let grid = 48;
    for k in 0..grid {
        let phi = TAU * (k as f64 + 0.31) / grid as f64;
        let image = psi(&source, &target, phi)?;
        for m in 0..9 {
            let theta = -2.0 + 0.5 * m as f64;
            let lhs = psi(&source, &target, flow_map(&source, theta, phi)?)?;
            let rhs = flow_map(&target, theta, image)?;
            defect = defect.max(circle_dist(lhs, rhs));
        }
    }

    let mut slopes = Vec::with_capacity(za.len());
    for i in 0..za.len() {
        slopes.push((one_sided_slope(&source, &target, i, -1.0)?, one_sided_slope(&source, &target, i, 1.0)?));
    }

    if defect > DEFECT_TOL {
        return Ok(ConjugacyOutcome::NotConjugate(ConjugacyFailure {
            invariant: "defect",
            detail: format!("conjugacy defect {defect:e} exceeds {DEFECT_TOL:e}"),
        }));
    }
    for (i, &(left, right)) in slopes.iter().enumerate() {
        if (left - right).abs() > SLOPE_TOL {
            return Ok(ConjugacyOutcome::NotConjugate(ConjugacyFailure {
                invariant: "derivative",
                detail: format!("one-sided derivatives at fixed point {} differ: {left:.6} vs {right:.6}", za[i]),
            }));
        }
    }
    Ok(ConjugacyOutcome::Conjugate(ConjugacyMap { source, target, defect, fixed_point_slopes: slopes }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circleflow::{make_flow, FlowKind};

    #[test]
    fn identical_flows_give_identity() {
        let f = make_flow(FlowKind::BasicJ1, 2, 0.3).unwrap();
        let out = conjugacy_map(f, f).unwrap();
        let ConjugacyOutcome::Conjugate(map) = out else { panic!("expected success") };
        for k in 0..50 {
            let phi = TAU * k as f64 / 50.0;
            assert!(circle_dist(map.eval(phi).unwrap(), phi) < 1e-10);
        }
        for &(l, r) in &map.fixed_point_slopes {
            assert!((l - 1.0).abs() < 1e-6 && (r - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn jacobian_mismatch_is_reported() {
        let a = make_flow(FlowKind::BasicJ1, 1, 0.2).unwrap();
        let b = make_flow(FlowKind::BasicJ1, 2, 0.2).unwrap();
        let out = conjugacy_map(a, b).unwrap();
        assert_eq!(out.failure().unwrap().to_string(), "Jacobian mismatch \u{2212}2 vs \u{2212}1");
    }

    #[test]
    fn different_pv_invariant_breaks_smoothness() {
        let a = make_flow(FlowKind::BasicJ1, 1, 0.0).unwrap();
        let b = make_flow(FlowKind::BasicJ1, 1, 0.5).unwrap();
        let out = conjugacy_map(a, b).unwrap();
        assert_eq!(out.failure().unwrap().invariant, "derivative");
    }

    #[test]
    fn kinds_must_match() {
        let a = make_flow(FlowKind::BasicJ1, 1, 0.0).unwrap();
        let b = make_flow(FlowKind::BasicJ1J2, 1, 0.0).unwrap();
        assert!(matches!(conjugacy_map(a, b), Err(Error::KindMismatch)));
    }

    #[test]
    fn four_point_flows_conjugate_to_themselves() {
        let f = make_flow(FlowKind::BasicJ1J2, 1, -0.4).unwrap();
        assert!(conjugacy_map(f, f).unwrap().is_conjugate());
    }
}
