//! Flow integration and transit-time quadrature for vector fields on S¹.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// A vector field g(φ)∂_φ on the circle with finitely many hyperbolic zeros.
pub trait VectorField {
    fn value(&self, phi: f64) -> f64;
    fn derivative(&self, phi: f64) -> f64;
    /// Zeros in [0, 2π), increasing.
    fn zeros(&self) -> Vec<f64>;
    /// One base point per arc; entry i lies between `zeros[i]` and the next zero.
    fn anchors(&self) -> Vec<f64>;
}

/// Local error target per RK4 step.
pub const STEP_TOL: f64 = 1e-13;
/// Below this speed a point is treated as stationary.
pub const REST_SPEED: f64 = 1e-14;
const MAX_STEPS: usize = 2_000_000;

pub fn wrap(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Signed shortest difference a − b on the circle, in (−π, π].
pub fn circle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

pub fn circle_dist(a: f64, b: f64) -> f64 {
    circle_diff(a, b).abs()
}

fn rk4_step<F: VectorField + ?Sized>(field: &F, y: f64, h: f64) -> f64 {
    let k1 = field.value(y);
    let k2 = field.value(y + 0.5 * h * k1);
    let k3 = field.value(y + 0.5 * h * k2);
    let k4 = field.value(y + h * k3);
    y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Φ_θ(φ) by adaptive RK4 with step doubling and local extrapolation.
pub fn flow_map<F: VectorField + ?Sized>(field: &F, theta: f64, phi: f64) -> Result<f64> {
    if !theta.is_finite() || !phi.is_finite() {
        return Err(Error::IntegrationFailure(format!("non-finite input θ={theta}, φ={phi}")));
    }
    if theta == 0.0 || field.value(phi).abs() < REST_SPEED {
        return Ok(phi);
    }
    let dir = theta.signum();
    let total = theta.abs();
    let mut t = 0.0;
    let mut y = phi;
    let mut h = total.min(0.05);
    for _ in 0..MAX_STEPS {
        if t >= total {
            return Ok(y);
        }
        if field.value(y).abs() < REST_SPEED {
            return Ok(y);
        }
        let step = h.min(total - t);
        let full = rk4_step(field, y, dir * step);
        let half = rk4_step(field, rk4_step(field, y, dir * step / 2.0), dir * step / 2.0);
        let err = (half - full).abs() / 15.0;
        if err <= STEP_TOL || step < 1e-10 {
            y = half + (half - full) / 15.0;
            t += step;
            let grow = if err == 0.0 { 4.0 } else { (0.9 * (STEP_TOL / err).powf(0.2)).clamp(0.2, 4.0) };
            h = step * grow;
        } else {
            h = step * (0.9 * (STEP_TOL / err).powf(0.2)).max(0.1);
        }
    }
    Err(Error::IntegrationFailure(format!("step budget exhausted at θ={theta}, φ={phi}")))
}

/// Where an angle sits relative to the zeros of a field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    Fixed(usize),
    /// Arc `index` between `lo` and `hi` (unwrapped, lo < phi < hi).
    Arc {
        index: usize,
        lo: f64,
        hi: f64,
        phi: f64,
    },
}

const FIXED_RADIUS: f64 = 1e-15;

pub fn locate(zeros: &[f64], phi: f64) -> Location {
    let w = wrap(phi);
    for (i, &z) in zeros.iter().enumerate() {
        if circle_dist(w, z) <= FIXED_RADIUS {
            return Location::Fixed(i);
        }
    }
    let m = zeros.len();
    for i in 0..m {
        let lo = zeros[i];
        let hi = if i + 1 < m { zeros[i + 1] } else { zeros[0] + TAU };
        for shift in [0.0, TAU] {
            let x = w + shift;
            if x > lo && x < hi {
                return Location::Arc { index: i, lo, hi, phi: x };
            }
        }
    }
    unreachable!("angle {phi} not located among zeros {zeros:?}")
}

/// Unwrap `phi` into the arc (lo, hi) of `index`, if it lies there.
pub fn unwrap_into_arc(zeros: &[f64], index: usize, phi: f64) -> Option<f64> {
    match locate(zeros, phi) {
        Location::Arc { index: i, phi, .. } if i == index => Some(phi),
        _ => None,
    }
}

/// θ with Φ_θ(from) = to, for points on one open arc.
pub fn transit_time<F: VectorField + ?Sized>(field: &F, from: f64, to: f64) -> Result<f64> {
    let zeros = field.zeros();
    let (i, a) = match locate(&zeros, from) {
        Location::Fixed(_) => return Err(Error::AtFixedPoint(from)),
        Location::Arc { index, phi, .. } => (index, phi),
    };
    let b = match locate(&zeros, to) {
        Location::Fixed(_) => return Err(Error::AtFixedPoint(to)),
        Location::Arc { index, phi, .. } if index == i => phi,
        Location::Arc { .. } => return Err(Error::DifferentArcs { from, to }),
    };
    Ok(integrate(|psi| 1.0 / field.value(psi), a, b))
}

/// Transit time with both endpoints already unwrapped inside one arc.
pub(crate) fn transit_unwrapped<F: VectorField + ?Sized>(field: &F, a: f64, b: f64) -> f64 {
    integrate(|psi| 1.0 / field.value(psi), a, b)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

const QUAD_REL_TOL: f64 = 1e-14;
const QUAD_MAX_INTERVALS: usize = 4000;

/// Globally adaptive Gauss–Kronrod (7/15) quadrature of ∫_a^b f.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let (v, e) = gauss_kronrod(&f, lo, hi);
    let mut intervals = vec![(lo, hi, v, e)];
    let mut total = v;
    let mut total_err = e;
    while total_err > QUAD_REL_TOL * total.abs().max(1e-3) && intervals.len() < QUAD_MAX_INTERVALS {
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bi, be), (i, iv)| if iv.3 > be { (i, iv.3) } else { (bi, be) });
        let (l, h, v0, e0) = intervals.swap_remove(worst);
        let mid = 0.5 * (l + h);
        if mid <= l || mid >= h {
            intervals.push((l, h, v0, 0.0));
            total_err -= e0;
            continue;
        }
        let (v1, e1) = gauss_kronrod(&f, l, mid);
        let (v2, e2) = gauss_kronrod(&f, mid, h);
        total += v1 + v2 - v0;
        total_err += e1 + e2 - e0;
        intervals.push((l, mid, v1, e1));
        intervals.push((mid, h, v2, e2));
    }
    // re-sum to shed accumulated update drift
    sign * intervals.iter().map(|iv| iv.2).sum::<f64>()
}
