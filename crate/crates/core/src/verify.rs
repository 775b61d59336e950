//! Seeded verification suites. Sample i draws from its own generator seeded
//! with seed + i, so results do not depend on evaluation order.

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::Serialize;

use crate::action_engine::{
    act_product, act_sphere, act_via_chart, bundle_act, bundle_discrepancy, bundle_pi, chart_f0, chart_f1,
    conjugation_identity_check, null_datum, standard_k_act, BasicConstruction, BundleAction, BundlePoint,
    ProductSpherePoint, SpherePoint,
};
use crate::circleflow::{
    lift_double_cover, make_flow, CircleFlow, FlowFunctionPair, FlowKind, ProjectiveLineFlow, ProjectivePoint,
};
use crate::error::{Error, Result};
use crate::numkit::{DenseMatrix, Tolerances};
use crate::orbit_lab::{census, classify_orbit, extract_f_tilde, fixed_set_scan, orbit_dimension, OrbitType, Subgroup};
use crate::report::Check;
use crate::sampling::{coeffs_in_ball, random_group, random_rotation, random_unit, rng, uniform_coeffs, SampleRng};
use crate::sopq::{boost, embed_k, stabilizer_algebra, AlgebraElement, GroupElement, Signature};

/// Largest norm of the algebra coefficients of sampled group elements.
pub const SAMPLE_NORM: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Suite {
    ActionAxiom,
    KExtension,
    Eq10,
    Charts,
    Bundle,
    Uchida,
    OrbitCensus,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::ActionAxiom,
        Suite::KExtension,
        Suite::Eq10,
        Suite::Charts,
        Suite::Bundle,
        Suite::Uchida,
        Suite::OrbitCensus,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::ActionAxiom => "action-axiom",
            Suite::KExtension => "k-extension",
            Suite::Eq10 => "eq10",
            Suite::Charts => "charts",
            Suite::Bundle => "bundle",
            Suite::Uchida => "uchida",
            Suite::OrbitCensus => "orbit-census",
            Suite::All => "all",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::BadParameters(format!("unknown suite {s}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteConfig {
    #[serde(skip)]
    pub sig: Signature,
    pub n: u32,
    pub a: f64,
    pub seed: u64,
    pub samples: usize,
    #[serde(skip)]
    pub tol: Tolerances,
}

impl SuiteConfig {
    pub fn new(sig: Signature, n: u32, a: f64, seed: u64, samples: usize) -> Self {
        Self { sig, n, a, seed, samples, tol: Tolerances::default() }
    }

    fn sample_rng(&self, index: usize) -> SampleRng {
        rng(self.seed.wrapping_add(index as u64))
    }

    fn flow(&self, kind: FlowKind) -> Result<CircleFlow> {
        make_flow(kind, self.n, self.a)
    }
}

fn random_product_point(sig: Signature, r: &mut SampleRng) -> ProductSpherePoint {
    ProductSpherePoint::new(random_unit(r, sig.p() + 1), random_unit(r, sig.q())).expect("unit samples")
}

/// Distance, or +∞ when either side failed to evaluate.
fn gap<T>(lhs: Result<T>, rhs: Result<T>, dist: impl Fn(&T, &T) -> f64) -> f64 {
    match (lhs, rhs) {
        (Ok(a), Ok(b)) => dist(&a, &b),
        _ => f64::INFINITY,
    }
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| if v.is_nan() { f64::INFINITY } else { m.max(v) })
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<Check>> {
    match suite {
        Suite::ActionAxiom => action_axiom(cfg),
        Suite::KExtension => k_extension(cfg),
        Suite::Eq10 => eq10(cfg),
        Suite::Charts => charts(cfg),
        Suite::Bundle => bundle(cfg),
        Suite::Uchida => uchida(cfg),
        Suite::OrbitCensus => orbit_census(cfg),
        Suite::All => {
            let mut all = Vec::new();
            for s in Suite::EACH {
                all.extend(
                    run_suite(s, cfg)?.into_iter().map(|c| Check { name: format!("{}: {}", s.name(), c.name), ..c }),
                );
            }
            Ok(all)
        }
    }
}

pub fn action_axiom(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let pair = FlowFunctionPair::new(cfg.flow(FlowKind::BasicJ1)?);
    let (sig, tol) = (cfg.sig, &cfg.tol);
    let mut composed = Vec::new();
    let mut identity = Vec::new();
    for i in 0..cfg.samples {
        let mut r = cfg.sample_rng(i);
        let (g1, g2) = (random_group(sig, &mut r, SAMPLE_NORM), random_group(sig, &mut r, SAMPLE_NORM));
        let x = random_product_point(sig, &mut r);
        let seq = act_product(&g1, &x, &pair, tol).and_then(|y| act_product(&g2, &y, &pair, tol));
        composed.push(gap(seq, act_product(&g2.compose(&g1), &x, &pair, tol), ProductSpherePoint::distance));
        identity.push(gap(
            act_product(&GroupElement::identity(sig), &x, &pair, tol),
            Ok(x),
            ProductSpherePoint::distance,
        ));
    }
    Ok(vec![
        Check::at_most("g2 ⋆ (g1 ⋆ x) = (g2 g1) ⋆ x", worst(composed), 1e-6),
        Check::at_most("e ⋆ x = x", worst(identity), 1e-10),
    ])
}

pub fn k_extension(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let pair = FlowFunctionPair::new(cfg.flow(FlowKind::BasicJ1)?);
    let (sig, tol) = (cfg.sig, &cfg.tol);
    let mut residual = Vec::new();
    for i in 0..cfg.samples {
        let mut r = cfg.sample_rng(i);
        let (k1, k2) = (random_rotation(&mut r, sig.p()), random_rotation(&mut r, sig.q()));
        let k = embed_k(sig, &k1, &k2, tol)?;
        let x = random_product_point(sig, &mut r);
        residual.push(gap(
            act_product(&k, &x, &pair, tol),
            standard_k_act(sig, &k1, &k2, &x, tol),
            ProductSpherePoint::distance,
        ));
    }
    Ok(vec![Check::at_most("K ⋆ x = standard K action", worst(residual), 1e-10)])
}

/// θ ∈ [−2, 2] and f ∈ (−0.95, 0.95) grid of the boost conjugation identities.
pub fn eq10(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let pair = FlowFunctionPair::new(cfg.flow(FlowKind::BasicJ1)?);
    let grid = 21;
    let (mut proj, mut stab, mut dims) = (Vec::new(), Vec::new(), 0.0f64);
    for i in 0..grid {
        let theta = -2.0 + 4.0 * i as f64 / (grid - 1) as f64;
        for j in 0..grid {
            let f = -0.95 + 1.9 * (j + 1) as f64 / (grid + 1) as f64;
            match conjugation_identity_check(cfg.sig, theta, f, &pair, &cfg.tol) {
                Ok(r) => {
                    proj.push(r.projector);
                    stab.push(r.stabilizer);
                    dims = dims.max(r.dimension_change.abs() as f64);
                }
                Err(_) => proj.push(f64::INFINITY),
            }
        }
    }
    Ok(vec![
        Check::at_most("m(θ) P(z) m(θ) = λ P(Φθ z)", worst(proj), 1e-9),
        Check::at_most("m(θ) h_z m(−θ) annihilates f′e1 + ε1", worst(stab), 1e-9),
        Check::equals("stabilizer dimension change", dims, 0.0),
    ])
}

pub fn charts(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let pair = FlowFunctionPair::new(cfg.flow(FlowKind::BasicJ1)?);
    let (sig, tol) = (cfg.sig, &cfg.tol);
    let (mut round, mut route) = (Vec::new(), Vec::new());
    for i in 0..cfg.samples {
        let mut r = cfg.sample_rng(i);
        let x = random_product_point(sig, &mut r);
        let back = chart_f0(&x, &pair).and_then(|(y, side)| chart_f1(&y, side, &pair, sig.p()));
        round.push(gap(back, Ok(x.clone()), ProductSpherePoint::distance));
        let g = random_group(sig, &mut r, SAMPLE_NORM);
        route.push(gap(act_via_chart(&g, &x, &pair), act_product(&g, &x, &pair, tol), ProductSpherePoint::distance));
    }
    Ok(vec![
        Check::at_most("F1 ∘ F0 = id", worst(round), 1e-8),
        Check::at_most("chart route = product route", worst(route), 1e-6),
    ])
}

fn random_null_stabilizer(sig: Signature, r: &mut SampleRng, tol: &Tolerances) -> Result<GroupElement> {
    let h = stabilizer_algebra(sig, &null_datum(sig), tol)?;
    let c = coeffs_in_ball(r, h.dim(), 1.0);
    let x = h
        .elements
        .iter()
        .zip(&c)
        .fold(DenseMatrix::zeros(sig.n(), sig.n()), |acc, (e, &w)| acc.add(&e.matrix().scale(w)));
    AlgebraElement::new(sig, x, tol)?.try_exp()
}

pub fn bundle(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let flow = cfg.flow(FlowKind::BasicJ1)?;
    let (sig, tol) = (cfg.sig, &cfg.tol);
    let mut pi_boost = Vec::new();
    for k in 0..=24 {
        let theta = -3.0 + 0.25 * k as f64;
        pi_boost.push(gap(bundle_pi(&boost(sig, theta)?, tol), Ok(theta), |a, b| (a - b).abs()));
    }
    let mut pi_null = Vec::new();
    for i in 0..50 {
        let mut r = cfg.sample_rng(i);
        pi_null.push(bundle_pi(&random_null_stabilizer(sig, &mut r, tol)?, tol).map_or(f64::INFINITY, f64::abs));
    }
    let (mut axiom, mut identity) = (Vec::new(), Vec::new());
    for i in 0..cfg.samples {
        let mut r = cfg.sample_rng(i);
        let pt = BundlePoint::new(random_group(sig, &mut r, SAMPLE_NORM), TAU * uniform_coeffs(&mut r, 1)[0]);
        let (g1, g2) = (random_group(sig, &mut r, SAMPLE_NORM), random_group(sig, &mut r, SAMPLE_NORM));
        let seq = bundle_act(&g1, &pt, &flow, tol).and_then(|y| bundle_act(&g2, &y, &flow, tol));
        let comp = bundle_act(&g2.compose(&g1), &pt, &flow, tol);
        axiom.push(match (seq, comp) {
            (Ok(a), Ok(b)) => bundle_discrepancy(&a, &b, &flow, tol).unwrap_or(f64::INFINITY),
            _ => f64::INFINITY,
        });
        identity.push(match bundle_act(&GroupElement::identity(sig), &pt, &flow, tol) {
            Ok(a) => bundle_discrepancy(&a, &pt, &flow, tol).unwrap_or(f64::INFINITY),
            Err(_) => f64::INFINITY,
        });
    }
    let four = make_flow(FlowKind::BasicJ1J2, cfg.n, cfg.a)?;
    let lifted = lift_double_cover(ProjectiveLineFlow::projection_of(&four)?)?;
    Ok(vec![
        Check::at_most("π(m(θ)) = θ", worst(pi_boost), 1e-12),
        Check::at_most("π vanishes on the null-vector stabilizer", worst(pi_null), 1e-9),
        Check::at_most("bundle action axiom", worst(axiom), tol.ode),
        Check::at_most("bundle identity", worst(identity), tol.ode),
        Check::at_most("double-cover lift covering defect", lifted.covering_defect(32)?, 1e-8),
    ])
}

pub fn uchida(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let pair = FlowFunctionPair::new(cfg.flow(FlowKind::BasicJ1J2)?);
    let (sig, tol) = (cfg.sig, &cfg.tol);
    let (mut k_res, mut axiom) = (Vec::new(), Vec::new());
    for i in 0..cfg.samples {
        let mut r = cfg.sample_rng(i);
        let k = embed_k(sig, &random_rotation(&mut r, sig.p()), &random_rotation(&mut r, sig.q()), tol)?;
        let y = SpherePoint::new(random_unit(&mut r, sig.n()))?;
        k_res.push(gap(
            act_sphere(&k, &y, &pair, tol),
            Ok(SpherePoint::new(k.apply(y.coords()))?),
            SpherePoint::distance,
        ));
        let (g1, g2) = (random_group(sig, &mut r, SAMPLE_NORM), random_group(sig, &mut r, SAMPLE_NORM));
        let seq = act_sphere(&g1, &y, &pair, tol).and_then(|z| act_sphere(&g2, &z, &pair, tol));
        axiom.push(gap(seq, act_sphere(&g2.compose(&g1), &y, &pair, tol), SpherePoint::distance));
    }
    let mut transport = Vec::new();
    for k in 0..12 {
        let phi = TAU * (k as f64 + 0.3) / 12.0;
        let before = pair.f_tilde(phi)?;
        for m in 0..9 {
            let theta = -2.0 + 0.5 * m as f64;
            let image = act_sphere(&boost(sig, theta)?, &SpherePoint::slice(sig, phi), &pair, tol);
            transport.push(match image {
                Ok(y) => {
                    pair.f_tilde(y.coords()[sig.eps1()].atan2(y.coords()[0]))?.distance(&before.transported(theta))
                }
                Err(_) => f64::INFINITY,
            });
        }
    }
    Ok(vec![
        Check::at_most("K ⋆ y = k y", worst(k_res), 1e-10),
        Check::at_most("sphere action axiom", worst(axiom), 1e-5),
        Check::at_most("f̃(m(θ) ⋆ z) = m(θ) f̃(z)", worst(transport), 1e-5),
    ])
}

pub fn orbit_census(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let (sig, tol) = (cfg.sig, &cfg.tol);
    let pair = FlowFunctionPair::new(cfg.flow(FlowKind::BasicJ1)?);
    let action = BasicConstruction::new(sig, pair, *tol)?;
    let open = (sig.n() - 1) as f64;
    let so_dim = sig.algebra_dim() as f64;
    let generic = ProductSpherePoint::slice(sig, action.pair().angle_with_f(0.4, FRAC_PI_2)?);
    let z1 = ProductSpherePoint::slice(sig, 0.0);
    let dim = |x: &ProductSpherePoint| orbit_dimension(&action, x, tol).map_or(f64::NAN, |d| d.dimension as f64);
    let mut checks = vec![
        Check::equals("orbit dimension at f = 0.4", dim(&generic), open),
        Check::equals("orbit dimension at z1", dim(&z1), open - 1.0),
    ];
    let mut transported = Vec::new();
    for i in 0..cfg.samples.min(20) {
        let mut r = cfg.sample_rng(i);
        let theta = 2.0 * uniform_coeffs(&mut r, 1)[0];
        let z =
            ProductSpherePoint::slice(sig, action.pair().flow_on(crate::circleflow::Component::S, theta, FRAC_PI_2)?);
        let want = ProjectivePoint::new(theta.tanh(), 1.0)?;
        transported.push(extract_f_tilde(&action, &z, tol).map_or(f64::INFINITY, |fit| fit.f_tilde.distance(&want)));
    }
    checks.push(Check::at_most("extracted f̃ = [tanh θ : 1]", worst(transported), 1e-3));
    let slice = |phi| Ok(ProductSpherePoint::slice(sig, phi));
    let entries = census(&action, slice, tol)?;
    let want = [OrbitType::Open, OrbitType::Open, OrbitType::ClosedPnull, OrbitType::ClosedPnull];
    let types_ok = entries.iter().map(|e| e.report.orbit_type).eq(want);
    checks.push(Check::flag("census {Open, Open, ClosedPnull, ClosedPnull}", types_ok));
    let split = entries.iter().all(|e| (e.report.dimension + e.report.isotropy_dim) as f64 == so_dim);
    checks.push(Check::flag("dimension + isotropy = dim so(p,q)", split));
    let sop = fixed_set_scan(&action, slice, Subgroup::SOp, 64, tol)?;
    checks.push(Check::flag("SO(p) fixes exactly ±N", sop == [FRAC_PI_2, 3.0 * FRAC_PI_2]));
    checks.push(Check::flag("SO(q) fixes nothing", fixed_set_scan(&action, slice, Subgroup::SOq, 64, tol)?.is_empty()));
    let bundle = BundleAction::new(sig, cfg.flow(FlowKind::BasicJ1)?, *tol)?;
    let bundle_slice = |phi| bundle.point(GroupElement::identity(sig), phi);
    let b_sop = fixed_set_scan(&bundle, bundle_slice, Subgroup::SOp, 32, tol)?;
    let b_soq = fixed_set_scan(&bundle, bundle_slice, Subgroup::SOq, 32, tol)?;
    checks.push(Check::flag("bundle: SO(p) and SO(q) fix nothing", b_sop.is_empty() && b_soq.is_empty()));
    let report = classify_orbit(&bundle, &bundle.point(GroupElement::identity(sig), 1.0)?, tol)?;
    checks.push(Check::flag("bundle generic orbit is a nullcone", report.orbit_type == OrbitType::Nullcone));
    checks.push(Check::equals("bundle orbit dimension", report.dimension as f64, open));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(samples: usize) -> SuiteConfig {
        SuiteConfig::new(Signature::new(3, 3).unwrap(), 1, 0.3, 42, samples)
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn suites_pass_on_small_samples() {
        for s in Suite::EACH {
            for c in run_suite(s, &cfg(5)).unwrap() {
                assert!(c.pass, "{}: {c:?}", s.name());
            }
        }
    }

    #[test]
    fn same_seed_same_values() {
        let a = run_suite(Suite::ActionAxiom, &cfg(4)).unwrap();
        let b = run_suite(Suite::ActionAxiom, &cfg(4)).unwrap();
        assert_eq!(a, b);
    }
}
