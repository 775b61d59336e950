//! Flows on RP¹ and their lift to the double cover S¹ → RP¹, φ ↦ 2φ.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::Serialize;

use super::solver::{circle_dist, flow_map, wrap, VectorField};
use super::{CircleFlow, FlowKind};
use crate::error::{Error, Result};

/// A vector field G(χ)∂_χ on RP¹ written in the doubled angle χ = 2ψ ∈ [0, 2π),
/// G(χ) = Σ c_k cos kχ + Σ s_k sin kχ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectiveLineFlow {
    cos: Vec<f64>,
    sin: Vec<f64>,
    zeros: Vec<f64>,
}

impl ProjectiveLineFlow {
    pub fn new(cos: Vec<f64>, sin: Vec<f64>) -> Self {
        let mut flow = Self { cos, sin, zeros: Vec::new() };
        flow.zeros = find_zeros(&flow);
        flow
    }

    /// The four-fixed-point family pushed down to RP¹.
    pub fn projection_of(flow: &CircleFlow) -> Result<Self> {
        if flow.kind() != FlowKind::BasicJ1J2 {
            return Err(Error::WrongKind { expected: "basicJ1J2" });
        }
        // 2 g(χ/2) = (2/n) cos χ (1 + a cos χ)
        let (n, a) = (flow.n() as f64, flow.a());
        Ok(Self::new(vec![a / n, 2.0 / n, a / n], Vec::new()))
    }

    pub fn cos_coefficients(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coefficients(&self) -> &[f64] {
        &self.sin
    }

    pub fn flow_map(&self, theta: f64, chi: f64) -> Result<f64> {
        Ok(wrap(flow_map(self, theta, chi)?))
    }
}

impl VectorField for ProjectiveLineFlow {
    fn value(&self, chi: f64) -> f64 {
        let c: f64 = self.cos.iter().enumerate().map(|(k, c)| c * (k as f64 * chi).cos()).sum();
        let s: f64 = self.sin.iter().enumerate().map(|(k, s)| s * (k as f64 * chi).sin()).sum();
        c + s
    }

    fn derivative(&self, chi: f64) -> f64 {
        let c: f64 = self.cos.iter().enumerate().map(|(k, c)| -(k as f64) * c * (k as f64 * chi).sin()).sum();
        let s: f64 = self.sin.iter().enumerate().map(|(k, s)| k as f64 * s * (k as f64 * chi).cos()).sum();
        c + s
    }

    fn zeros(&self) -> Vec<f64> {
        self.zeros.clone()
    }

    fn anchors(&self) -> Vec<f64> {
        midpoints(&self.zeros)
    }
}

fn midpoints(zeros: &[f64]) -> Vec<f64> {
    let m = zeros.len();
    (0..m)
        .map(|i| {
            let hi = if i + 1 < m { zeros[i + 1] } else { zeros[0] + TAU };
            wrap(0.5 * (zeros[i] + hi))
        })
        .collect()
}

const SCAN: usize = 4096;

/// Sign changes on a fine grid, refined by bisection, then snapped to
/// exact zeros of the field when rounding allows.
fn find_zeros<F: VectorField>(field: &F) -> Vec<f64> {
    let mut out = Vec::new();
    let h = TAU / SCAN as f64;
    for k in 0..SCAN {
        let (mut lo, mut hi) = (k as f64 * h, (k + 1) as f64 * h);
        let (glo, ghi) = (field.value(lo), field.value(hi));
        if glo == 0.0 {
            out.push(lo);
            continue;
        }
        if glo.signum() == ghi.signum() || ghi == 0.0 {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if field.value(mid).signum() == glo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let z = if field.value(lo).abs() <= field.value(hi).abs() { lo } else { hi };
        out.push(snap(z));
    }
    out
}

/// Rounds to the nearest multiple of π/8 when that is numerically the same point.
fn snap(z: f64) -> f64 {
    let step = PI / 8.0;
    let k = (z / step).round();
    if (z - k * step).abs() < 1e-14 {
        wrap(k * step)
    } else {
        z
    }
}

/// The lifted field g″(φ) = G(2φ)/2 on S¹.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftedFlow {
    base: ProjectiveLineFlow,
    zeros: Vec<f64>,
    anchors: Vec<f64>,
}

impl LiftedFlow {
    pub fn base(&self) -> &ProjectiveLineFlow {
        &self.base
    }

    pub fn flow_map(&self, theta: f64, phi: f64) -> Result<f64> {
        Ok(wrap(flow_map(self, theta, phi)?))
    }

    /// sup |2Φ″_θ(φ) − Φ′_θ(2φ)| over a grid in φ and θ ∈ [−3, 3].
    pub fn covering_defect(&self, grid: usize) -> Result<f64> {
        let mut worst = 0.0f64;
        for k in 0..grid {
            let phi = TAU * (k as f64 + 0.5) / grid as f64;
            for m in 0..=12 {
                let theta = -3.0 + 0.5 * m as f64;
                let up = self.flow_map(theta, phi)?;
                let down = self.base.flow_map(theta, wrap(2.0 * phi))?;
                worst = worst.max(circle_dist(wrap(2.0 * up), down));
            }
        }
        Ok(worst)
    }
}

impl VectorField for LiftedFlow {
    fn value(&self, phi: f64) -> f64 {
        0.5 * self.base.value(2.0 * phi)
    }

    fn derivative(&self, phi: f64) -> f64 {
        self.base.derivative(2.0 * phi)
    }

    fn zeros(&self) -> Vec<f64> {
        self.zeros.clone()
    }

    fn anchors(&self) -> Vec<f64> {
        self.anchors.clone()
    }
}

/// Lifts a two-fixed-point, reflection-reversed flow on RP¹ to S¹.
pub fn lift_double_cover(base: ProjectiveLineFlow) -> Result<LiftedFlow> {
    let zeros = base.zeros();
    if zeros.len() != 2 {
        return Err(Error::BadInputFlow(format!("expected 2 fixed points on RP¹, found {}", zeros.len())));
    }
    for &z in &zeros {
        if base.derivative(z).abs() < 1e-8 {
            return Err(Error::BadInputFlow(format!("fixed point {z} is not hyperbolic")));
        }
    }
    let asym = (0..64)
        .map(|k| {
            let chi = TAU * (k as f64 + 0.3) / 64.0;
            (base.value(-chi) - base.value(chi)).abs()
        })
        .fold(0.0, f64::max);
    if asym > 1e-12 {
        return Err(Error::BadInputFlow(format!("field is not even under χ ↦ −χ (defect {asym:e})")));
    }
    let mut lifted: Vec<f64> = zeros.iter().flat_map(|&z| [0.5 * z, 0.5 * z + PI]).collect();
    lifted.sort_by(f64::total_cmp);
    // each arc contains exactly one of 0, π/2, π, 3π/2
    let anchors = midpoints(&lifted).into_iter().map(|m| wrap((m / FRAC_PI_2).round() * FRAC_PI_2)).collect::<Vec<_>>();
    let lifted_flow = LiftedFlow { base, zeros: lifted.clone(), anchors: anchors.clone() };
    for (i, &a) in anchors.iter().enumerate() {
        let hi = if i + 1 < lifted.len() { lifted[i + 1] } else { lifted[0] + TAU };
        let a_un = if a < lifted[i] { a + TAU } else { a };
        if !(a_un > lifted[i] && a_un < hi) {
            return Err(Error::BadInputFlow("fixed points are not separated by the quarter points".into()));
        }
    }
    Ok(lifted_flow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circleflow::{conjugacy_map, make_flow};

    #[test]
    fn projection_round_trip() {
        for (n, a) in [(1, 0.0), (2, 0.4), (3, -0.7)] {
            let flow = make_flow(FlowKind::BasicJ1J2, n, a).unwrap();
            let base = ProjectiveLineFlow::projection_of(&flow).unwrap();
            assert_eq!(base.zeros(), vec![FRAC_PI_2, 3.0 * FRAC_PI_2]);
            let lift = lift_double_cover(base).unwrap();
            assert_eq!(lift.zeros(), flow.zeros());
            for k in 0..64 {
                let phi = TAU * k as f64 / 64.0;
                assert!((lift.value(phi) - flow.value(phi)).abs() < 1e-15);
            }
            assert!(conjugacy_map(lift.clone(), flow).unwrap().is_conjugate());
            assert!(lift.covering_defect(16).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn lifted_fixed_points_cover_base_twice() {
        let base = ProjectiveLineFlow::new(vec![0.1, 1.0, 0.2], vec![]);
        let lift = lift_double_cover(base.clone()).unwrap();
        let images: Vec<f64> = lift.zeros().iter().map(|&z| wrap(2.0 * z)).collect();
        for z in base.zeros() {
            assert_eq!(images.iter().filter(|&&w| circle_dist(w, z) < 1e-12).count(), 2);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let four = ProjectiveLineFlow::new(vec![0.0, 0.0, 1.0], vec![]);
        assert!(matches!(lift_double_cover(four), Err(Error::BadInputFlow(_))));
        let skew = ProjectiveLineFlow::new(vec![0.0, 1.0], vec![0.0, 0.3]);
        assert!(matches!(lift_double_cover(skew), Err(Error::BadInputFlow(_))));
    }
}
