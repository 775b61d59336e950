//! Parametric analytic flows on S¹ with two or four hyperbolic fixed
//! points, their companion functions f and f̃, a principal-value
//! invariant, conjugacies between flows and the RP¹ → S¹ lift.

mod conjugacy;
mod lift;
mod solver;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::Check;

pub use conjugacy::{conjugacy_map, ConjugacyFailure, ConjugacyMap, ConjugacyOutcome};
pub use lift::{lift_double_cover, LiftedFlow, ProjectiveLineFlow};
pub use solver::{
    circle_diff, circle_dist, flow_map, integrate, locate, transit_time, wrap, Location, VectorField, REST_SPEED,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FlowKind {
    /// Two fixed points, reversed by J1.
    BasicJ1,
    /// Four fixed points, reversed by J1 and J2.
    BasicJ1J2,
}

impl FlowKind {
    pub fn name(&self) -> &'static str {
        match self {
            FlowKind::BasicJ1 => "basicJ1",
            FlowKind::BasicJ1J2 => "basicJ1J2",
        }
    }
}

impl std::str::FromStr for FlowKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basicJ1" | "basic-j1" | "j1" => Ok(FlowKind::BasicJ1),
            "basicJ1J2" | "basic-j1j2" | "j1j2" => Ok(FlowKind::BasicJ1J2),
            other => Err(Error::BadParameters(format!("unknown flow kind {other}"))),
        }
    }
}

/// g(φ) = −(2/n) sinφ (1 + a sinφ)  or  g(φ) = (1/n) cos2φ (1 + a cos2φ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleFlow {
    kind: FlowKind,
    n: u32,
    a: f64,
}

pub fn make_flow(kind: FlowKind, n: u32, a: f64) -> Result<CircleFlow> {
    if n == 0 {
        return Err(Error::BadParameters("n must be a positive integer".into()));
    }
    if !(a.is_finite() && a.abs() < 1.0) {
        return Err(Error::BadParameters(format!("|a| must be < 1, got {a}")));
    }
    Ok(CircleFlow { kind, n, a })
}

impl CircleFlow {
    pub fn kind(&self) -> FlowKind {
        self.kind
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// g′ at each zero, in the order of [`VectorField::zeros`].
    pub fn jacobians(&self) -> Vec<f64> {
        self.zeros().iter().map(|&z| self.derivative(z)).collect()
    }

    pub fn flow_map(&self, theta: f64, phi: f64) -> Result<f64> {
        Ok(wrap(flow_map(self, theta, phi)?))
    }

    pub fn transit_time(&self, from: f64, to: f64) -> Result<f64> {
        transit_time(self, from, to)
    }

    /// Field-level invariants: zeros, Jacobians ±2/n and the reflection symmetries.
    pub fn field_checks(&self) -> Vec<Check> {
        let mut checks = Vec::new();
        let zero_residual = self.zeros().iter().map(|&z| self.value(z).abs()).fold(0.0, f64::max);
        checks.push(Check::at_most("field vanishes at fixed points", zero_residual, 1e-15));
        let want = 2.0 / self.n as f64;
        let jac_err = self.jacobians().iter().map(|j| (j.abs() - want).abs()).fold(0.0, f64::max);
        checks.push(Check::at_most("Jacobians are ±2/n", jac_err, 1e-14));
        let grid: Vec<f64> = (0..97).map(|k| TAU * k as f64 / 97.0).collect();
        let j1 = grid.iter().map(|&p| (self.value(PI - p) - self.value(p)).abs()).fold(0.0, f64::max);
        checks.push(Check::at_most("g(π−φ) = g(φ)", j1, 1e-14));
        if self.kind == FlowKind::BasicJ1J2 {
            let j2 = grid.iter().map(|&p| (self.value(-p) - self.value(p)).abs()).fold(0.0, f64::max);
            checks.push(Check::at_most("g(−φ) = g(φ)", j2, 1e-14));
        }
        let sign_changes = grid
            .iter()
            .zip(grid.iter().skip(1).chain(std::iter::once(&TAU)))
            .filter(|(&x, &y)| {
                let (gx, gy) = (self.value(x + 1e-7), self.value(y + 1e-7));
                gx.signum() != gy.signum()
            })
            .count();
        checks.push(Check::equals("number of fixed points", sign_changes as f64, self.zeros().len() as f64));
        checks
    }

    /// Principal value of ∮ dφ/g with symmetric excision around each zero,
    /// extrapolated to zero excision width.
    pub fn pv_global_invariant(&self) -> Result<f64> {
        pv_global_invariant(self)
    }
}

impl VectorField for CircleFlow {
    fn value(&self, phi: f64) -> f64 {
        let n = self.n as f64;
        match self.kind {
            FlowKind::BasicJ1 => {
                let s = phi.sin();
                -(2.0 / n) * s * (1.0 + self.a * s)
            }
            FlowKind::BasicJ1J2 => {
                let c = (2.0 * phi).cos();
                c * (1.0 + self.a * c) / n
            }
        }
    }

    fn derivative(&self, phi: f64) -> f64 {
        let n = self.n as f64;
        match self.kind {
            FlowKind::BasicJ1 => -(2.0 / n) * phi.cos() * (1.0 + 2.0 * self.a * phi.sin()),
            FlowKind::BasicJ1J2 => -(2.0 / n) * (2.0 * phi).sin() * (1.0 + 2.0 * self.a * (2.0 * phi).cos()),
        }
    }

    fn zeros(&self) -> Vec<f64> {
        match self.kind {
            FlowKind::BasicJ1 => vec![0.0, PI],
            FlowKind::BasicJ1J2 => vec![FRAC_PI_4, 3.0 * FRAC_PI_4, 5.0 * FRAC_PI_4, 7.0 * FRAC_PI_4],
        }
    }

    fn anchors(&self) -> Vec<f64> {
        match self.kind {
            FlowKind::BasicJ1 => vec![FRAC_PI_2, 3.0 * FRAC_PI_2],
            FlowKind::BasicJ1J2 => vec![FRAC_PI_2, PI, 3.0 * FRAC_PI_2, 0.0],
        }
    }
}

/// Below this distance from a fixed point the arc coordinate switches to
/// its power-law asymptotics.
const ASYMPTOTIC_RADIUS: f64 = 1e-9;

/// Signed arc coordinate: the transit time from the arc's anchor, or ±∞ at
/// a fixed point (sign from whether the fixed point attracts).
pub fn arc_time<F: VectorField + ?Sized>(field: &F, phi: f64) -> (usize, f64) {
    let zeros = field.zeros();
    match locate(&zeros, phi) {
        Location::Fixed(i) => {
            let inf = if field.derivative(zeros[i]) < 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
            (i, inf)
        }
        Location::Arc { index, lo, hi, phi } => {
            let anchor = solver::unwrap_into_arc(&zeros, index, field.anchors()[index]).expect("anchor inside its arc");
            (index, solver::transit_unwrapped(field, anchor, phi.clamp(lo + ASYMPTOTIC_RADIUS, hi - ASYMPTOTIC_RADIUS)))
        }
    }
}

/// tanh of the arc coordinate, continued to ±1 at fixed points through the
/// power law 1 − |f| ∝ dist^{2/|g′|}.
pub fn arc_tanh<F: VectorField + ?Sized>(field: &F, phi: f64) -> (usize, f64) {
    let zeros = field.zeros();
    match locate(&zeros, phi) {
        Location::Fixed(i) => {
            let s = if field.derivative(zeros[i]) < 0.0 { 1.0 } else { -1.0 };
            (i, s)
        }
        Location::Arc { index, lo, hi, phi } => {
            let anchor = solver::unwrap_into_arc(&zeros, index, field.anchors()[index]).expect("anchor inside its arc");
            let (dist, end) = if phi - lo < hi - phi { (phi - lo, lo) } else { (hi - phi, hi) };
            if dist >= ASYMPTOTIC_RADIUS {
                return (index, solver::transit_unwrapped(field, anchor, phi).tanh());
            }
            let r = if end == lo { lo + ASYMPTOTIC_RADIUS } else { hi - ASYMPTOTIC_RADIUS };
            let f0 = solver::transit_unwrapped(field, anchor, r).tanh();
            let k = 2.0 / field.derivative(end).abs();
            let c = (1.0 - f0.abs()) / ASYMPTOTIC_RADIUS.powf(k);
            (index, f0.signum() * (1.0 - c * dist.powf(k)))
        }
    }
}

pub fn pv_global_invariant<F: VectorField + ?Sized>(field: &F) -> Result<f64> {
    let zeros = field.zeros();
    let residue_sum: f64 = zeros.iter().map(|&z| 1.0 / field.derivative(z)).sum();
    let residue_scale: f64 = zeros.iter().map(|&z| 1.0 / field.derivative(z).abs()).sum();
    if residue_sum.abs() > 1e-12 * residue_scale {
        return Err(Error::NonCancellingResidues);
    }
    let excised = |eps: f64| -> f64 {
        let m = zeros.len();
        (0..m)
            .map(|i| {
                let lo = zeros[i];
                let hi = if i + 1 < m { zeros[i + 1] } else { zeros[0] + TAU };
                integrate(|psi| 1.0 / field.value(psi), lo + eps, hi - eps)
            })
            .sum()
    };
    let eps = [1e-2, 1e-3, 1e-4];
    let vals: Vec<f64> = eps.iter().map(|&e| excised(e)).collect();
    Ok(neville_at_zero(&eps, &vals))
}

/// Polynomial extrapolation of (x_i, y_i) to x = 0.
fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let m = xs.len();
    for level in 1..m {
        for i in 0..(m - level) {
            let (xi, xj) = (xs[i], xs[i + level]);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p[0]
}

/// Homogeneous pair [a:b] with unit norm, b > 0 (or b = 0 and a > 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectivePoint {
    a: f64,
    b: f64,
}

impl ProjectivePoint {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let r = a.hypot(b);
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::BadParameters(format!("[{a}:{b}] is not a projective point")));
        }
        let (mut a, mut b) = (a / r, b / r);
        if b < 0.0 || (b == 0.0 && a < 0.0) {
            a = -a;
            b = -b;
        }
        Ok(Self { a, b })
    }

    /// [cos ψ : sin ψ].
    pub fn from_angle(psi: f64) -> Self {
        Self::new(psi.cos(), psi.sin()).expect("unit circle point")
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Representative angle ψ ∈ [0, π).
    pub fn angle(&self) -> f64 {
        let psi = self.b.atan2(self.a);
        if psi >= PI {
            psi - PI
        } else {
            psi
        }
    }

    /// Angle between the two lines, in [0, π/2].
    pub fn distance(&self, other: &ProjectivePoint) -> f64 {
        let c = (self.a * other.a + self.b * other.b).abs().min(1.0);
        let s = (self.a * other.b - self.b * other.a).abs();
        s.atan2(c)
    }

    /// [a cosh θ + b sinh θ : a sinh θ + b cosh θ].
    pub fn transported(&self, theta: f64) -> ProjectivePoint {
        let (c, s) = (theta.cosh(), theta.sinh());
        Self::new(self.a * c + self.b * s, self.a * s + self.b * c).expect("hyperbolic rotation is invertible")
    }
}

/// Which circle of F = S ∪ j2⋆S a slice angle lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Component {
    S,
    J2S,
}

/// A flow together with its companion function (f for two fixed points,
/// f̃ for four).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowFunctionPair {
    flow: CircleFlow,
}

impl FlowFunctionPair {
    pub fn new(flow: CircleFlow) -> Self {
        Self { flow }
    }

    pub fn flow(&self) -> &CircleFlow {
        &self.flow
    }

    /// Φ_θ on F; on the mirrored circle the flow runs backwards.
    pub fn flow_on(&self, component: Component, theta: f64, phi: f64) -> Result<f64> {
        match component {
            Component::S => self.flow.flow_map(theta, phi),
            Component::J2S => self.flow.flow_map(-theta, phi),
        }
    }

    /// f on F: f(j2⋆z) = −f(z).
    pub fn f_on(&self, component: Component, phi: f64) -> Result<f64> {
        let f = f_of(&self.flow, phi)?;
        Ok(match component {
            Component::S => f,
            Component::J2S => -f,
        })
    }

    pub fn f(&self, phi: f64) -> Result<f64> {
        f_of(&self.flow, phi)
    }

    pub fn f_tilde(&self, phi: f64) -> Result<ProjectivePoint> {
        f_tilde_of(&self.flow, phi)
    }

    /// The slice angle on the anchor arc through `anchor` whose f-value is `f`, |f| < 1.
    pub fn angle_with_f(&self, f: f64, anchor: f64) -> Result<f64> {
        if f.abs() >= 1.0 {
            return Err(Error::BadParameters(format!("f = {f} is not inside (−1, 1)")));
        }
        self.flow.flow_map(f.atanh(), anchor)
    }

    /// Grid checks of the companion relations (reflections, transport law,
    /// zero set, the ODE g f′ = 1 − f²).
    pub fn validate(&self, grid: usize) -> Result<Vec<Check>> {
        let mut checks = self.flow.field_checks();
        let phis: Vec<f64> = (0..grid).map(|k| TAU * (k as f64 + 0.37) / grid as f64).collect();
        let thetas: Vec<f64> = (0..grid).map(|k| -2.0 + 4.0 * k as f64 / (grid - 1).max(1) as f64).collect();
        let mut reversal = 0.0f64;
        for &phi in &phis {
            for &theta in thetas.iter().step_by(3) {
                let lhs = self.flow.flow_map(theta, PI - phi)?;
                let rhs = PI - self.flow.flow_map(-theta, phi)?;
                reversal = reversal.max(circle_dist(lhs, rhs));
            }
        }
        checks.push(Check::at_most("j1 reverses the flow", reversal, 1e-8));
        match self.flow.kind {
            FlowKind::BasicJ1 => {
                let mut odd = 0.0f64;
                let mut mirror = 0.0f64;
                let mut transport = 0.0f64;
                let mut ode = 0.0f64;
                for &phi in &phis {
                    odd = odd.max((self.f(PI - phi)? + self.f(phi)?).abs());
                    mirror = mirror.max((self.f_on(Component::J2S, phi)? + self.f_on(Component::S, phi)?).abs());
                    let f = self.f(phi)?;
                    for &theta in &thetas {
                        let t = theta.tanh();
                        let moved = self.f(self.flow.flow_map(theta, phi)?)?;
                        transport = transport.max((moved - (f + t) / (1.0 + f * t)).abs());
                    }
                    let dist = self.flow.zeros().iter().map(|&z| circle_dist(phi, z)).fold(f64::INFINITY, f64::min);
                    if dist > 1e-3 {
                        let h = 1e-5;
                        let df = (self.f(phi + h)? - self.f(phi - h)?) / (2.0 * h);
                        ode = ode.max((self.flow.value(phi) * df - (1.0 - f * f)).abs());
                    }
                }
                checks.push(Check::at_most("f(j1 z) = −f(z)", odd, 1e-8));
                checks.push(Check::at_most("f(j2 z) = −f(z) on F", mirror, 0.0));
                checks.push(Check::at_most("transport law f(Φθ z)", transport, 1e-7));
                checks.push(Check::at_most("g f′ = 1 − f²", ode, 1e-6));
                let poles = self.f(FRAC_PI_2)?.abs().max(self.f(3.0 * FRAC_PI_2)?.abs());
                checks.push(Check::at_most("f vanishes at the poles", poles, 1e-15));
                let ends = (self.f(0.0)? - 1.0).abs().max((self.f(PI)? + 1.0).abs());
                checks.push(Check::at_most("f = ±1 at the fixed points", ends, 0.0));
            }
            FlowKind::BasicJ1J2 => {
                let mut reversal2 = 0.0f64;
                let mut transport = 0.0f64;
                let mut odd = 0.0f64;
                for &phi in &phis {
                    for &theta in thetas.iter().step_by(3) {
                        let lhs = self.flow.flow_map(theta, -phi)?;
                        let rhs = -self.flow.flow_map(-theta, phi)?;
                        reversal2 = reversal2.max(circle_dist(lhs, rhs));
                    }
                    let ft = self.f_tilde(phi)?;
                    let j1 = self.f_tilde(PI - phi)?;
                    let j2 = self.f_tilde(-phi)?;
                    let flipped = ProjectivePoint::new(-ft.a, ft.b)?;
                    odd = odd.max(j1.distance(&flipped)).max(j2.distance(&flipped));
                    for &theta in &thetas {
                        let moved = self.f_tilde(self.flow.flow_map(theta, phi)?)?;
                        transport = transport.max(moved.distance(&ft.transported(theta)));
                    }
                }
                checks.push(Check::at_most("j2 reverses the flow", reversal2, 1e-8));
                checks.push(Check::at_most("f̃(j z) = [−a:b]", odd, 1e-8));
                checks.push(Check::at_most("hyperbolic transport of f̃", transport, 1e-7));
                let axes = self.f_tilde(FRAC_PI_2)?.distance(&ProjectivePoint::new(0.0, 1.0)?)
                    + self.f_tilde(0.0)?.distance(&ProjectivePoint::new(1.0, 0.0)?);
                checks.push(Check::at_most("f̃ = [0:1] at π/2 and [1:0] at 0", axes, 1e-15));
            }
        }
        Ok(checks)
    }
}

/// Companion function of a two-fixed-point flow: f(Φ_θ(pole)) = tanh θ,
/// f = +1 at the attracting fixed point.
pub fn f_of(flow: &CircleFlow, phi: f64) -> Result<f64> {
    if flow.kind != FlowKind::BasicJ1 {
        return Err(Error::WrongKind { expected: "basicJ1" });
    }
    Ok(arc_tanh(flow, phi).1)
}

/// Projective companion of a four-fixed-point flow: [tanh θ : 1] on arcs
/// through ±π/2 and [1 : tanh θ] on arcs through 0 and π.
pub fn f_tilde_of(flow: &CircleFlow, phi: f64) -> Result<ProjectivePoint> {
    if flow.kind != FlowKind::BasicJ1J2 {
        return Err(Error::WrongKind { expected: "basicJ1J2" });
    }
    f_tilde_generic(flow, phi)
}

pub(crate) fn f_tilde_generic<F: VectorField + ?Sized>(field: &F, phi: f64) -> Result<ProjectivePoint> {
    let (index, t) = arc_tanh(field, phi);
    let zeros = field.zeros();
    if let Location::Fixed(i) = locate(&zeros, phi) {
        // [1:1] where attracting, [−1:1] where repelling
        return ProjectivePoint::new(if field.derivative(zeros[i]) < 0.0 { 1.0 } else { -1.0 }, 1.0);
    }
    let anchor = field.anchors()[index];
    let vertical = anchor.sin().abs() > 0.5;
    if vertical {
        ProjectivePoint::new(t, 1.0)
    } else {
        ProjectivePoint::new(1.0, t)
    }
}

/// The pair extended to F = S ∪ j2⋆S.
pub fn extend_to_f(pair: FlowFunctionPair) -> Result<FlowFunctionPair> {
    if pair.flow.kind != FlowKind::BasicJ1 {
        return Err(Error::WrongKind { expected: "basicJ1" });
    }
    Ok(pair)
}
