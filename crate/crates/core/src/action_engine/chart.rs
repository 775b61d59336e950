//! The equivariant charts F0: O → O¹ ⊂ S^{p+q−1} and their inverse F1.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{projective_act, ProductSpherePoint, SpherePoint};
use crate::circleflow::{Component, FlowFunctionPair, VectorField};
use crate::error::{Error, Result};
use crate::numkit::norm;
use crate::sopq::GroupElement;

/// Which open orbit: through the pole N (v_{p+1} > 0) or through −N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChartSide {
    Upper,
    Lower,
}

impl ChartSide {
    pub fn anchor(&self) -> f64 {
        match self {
            ChartSide::Upper => FRAC_PI_2,
            ChartSide::Lower => 3.0 * FRAC_PI_2,
        }
    }
}

/// H = f/‖v0‖ on the slice, with H(0) = 1/|g(anchor)|.
fn h_value(pair: &FlowFunctionPair, side: ChartSide, alpha: f64, phi: f64) -> Result<f64> {
    if alpha == 0.0 {
        return Ok(1.0 / pair.flow().value(side.anchor()).abs());
    }
    Ok(pair.f(phi)? / alpha)
}

/// F0(x) = (H v0 ⊕ w)/√(1 + f²).
pub fn chart_f0(x: &ProductSpherePoint, pair: &FlowFunctionPair) -> Result<(SpherePoint, ChartSide)> {
    let p = x.v().len() - 1;
    let v0 = &x.v()[..p];
    let alpha = norm(v0);
    let beta = x.v()[p];
    let side = if beta > 0.0 {
        ChartSide::Upper
    } else if beta < 0.0 {
        ChartSide::Lower
    } else {
        return Err(Error::OutsideDomain("point lies on a closed orbit".into()));
    };
    let phi = beta.atan2(alpha);
    let h = h_value(pair, side, alpha, phi)?;
    let f = h * alpha;
    let scale = 1.0 / (1.0 + f * f).sqrt();
    let y: Vec<f64> = v0.iter().map(|t| scale * h * t).chain(x.w().iter().map(|t| scale * t)).collect();
    Ok((SpherePoint::raw(y), side))
}

/// Inverse of F0 on O¹ = {‖x‖ < ‖y‖}.
pub fn chart_f1(y: &SpherePoint, side: ChartSide, pair: &FlowFunctionPair, p: usize) -> Result<ProductSpherePoint> {
    let c = y.coords();
    if c.len() <= p {
        return Err(Error::WrongSize { expected: format!("length > {p}"), got: format!("length {}", c.len()) });
    }
    let (xp, yq) = c.split_at(p);
    let (nx, ny) = (norm(xp), norm(yq));
    if ny == 0.0 || nx >= ny {
        return Err(Error::OutsideDomain(format!("‖x‖/‖y‖ = {} is not below 1", nx / ny)));
    }
    let s = nx / ny;
    let phi = pair.flow_on(Component::S, s.atanh(), side.anchor())?;
    let mut v: Vec<f64> = if nx == 0.0 { vec![0.0; p] } else { xp.iter().map(|t| phi.cos() * t / nx).collect() };
    v.push(phi.sin());
    let w: Vec<f64> = yq.iter().map(|t| t / ny).collect();
    Ok(ProductSpherePoint::raw(v, w))
}

/// F1(g · F0(x)).
pub fn act_via_chart(g: &GroupElement, x: &ProductSpherePoint, pair: &FlowFunctionPair) -> Result<ProductSpherePoint> {
    x.check_signature(g.sig())?;
    let (y, side) = chart_f0(x, pair)?;
    let moved = projective_act(g, &y)?;
    chart_f1(&moved, side, pair, g.sig().p())
}

/// Least-squares fit H(s) ≈ Σ c_k s^{2k}, k = 0..4, on [−r, r].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvenSeriesFit {
    pub coefficients: Vec<f64>,
    /// Largest |fit − H| on a check grid.
    pub residual: f64,
    /// |c_0 − 1/|g(anchor)||.
    pub origin_error: f64,
}

impl EvenSeriesFit {
    pub fn eval(&self, s: f64) -> f64 {
        let s2 = s * s;
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * s2 + c)
    }
}

/// H as an even function of s = ‖v0‖ through the slice angle, fitted by a degree-8 even polynomial.
pub fn even_series_fit(pair: &FlowFunctionPair, side: ChartSide, radius: f64) -> Result<EvenSeriesFit> {
    let h_at = |s: f64| -> Result<f64> {
        // s = cos φ on the anchor's arc
        let phi = match side {
            ChartSide::Upper => s.acos(),
            ChartSide::Lower => -s.acos(),
        };
        h_value(pair, side, s, phi)
    };
    let nodes = 33;
    let mut a = DMatrix::zeros(nodes, 5);
    let mut rhs = DVector::zeros(nodes);
    for i in 0..nodes {
        let s = radius * (PI * (i as f64 + 0.5) / (2.0 * nodes as f64)).cos();
        let s2 = s * s;
        for k in 0..5 {
            a[(i, k)] = s2.powi(k as i32);
        }
        rhs[i] = h_at(s)?;
    }
    let coeffs =
        a.svd(true, true).solve(&rhs, 1e-15).map_err(|e| Error::EvaluatorFailure(format!("series fit: {e}")))?;
    let fit = EvenSeriesFit { coefficients: coeffs.iter().copied().collect(), residual: 0.0, origin_error: 0.0 };
    let mut residual = 0.0f64;
    for i in 0..=80 {
        let s = -radius + 2.0 * radius * i as f64 / 80.0;
        residual = residual.max((fit.eval(s) - h_at(s)?).abs());
    }
    let origin_error = (fit.coefficients[0] - 1.0 / pair.flow().value(side.anchor()).abs()).abs();
    Ok(EvenSeriesFit { residual, origin_error, ..fit })
}
