//! Numerical orbit analysis of an action: generator fields, orbit dimension,
//! isotropy algebra, the projective companion value and orbit types.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::action_engine::{GroupAction, PointSpace};
use crate::circleflow::ProjectivePoint;
use crate::error::{Error, Result};
use crate::numkit::{containment_angle, null_space, rank_report, DenseMatrix, RankReport, Tolerances};
use crate::sampling::{random_rotation, rng};
use crate::sopq::{
    algebra_basis, algebra_element, embed_k_unchecked, involution, stabilizer_algebra, GroupElement, Signature,
};

pub const DEFAULT_STEP: f64 = 1e-4;
const MIN_GAP: f64 = 10.0;
const CONTAINMENT_TOL: f64 = 1e-3;

/// Central-difference tangent vectors V_i(x) for every element of
/// [`algebra_basis`], Richardson-extrapolated from steps h and h/2.
pub fn generator_fields<A: GroupAction>(action: &A, x: &A::Point, h: f64) -> Result<Vec<Vec<f64>>> {
    if !(1e-6..=1e-3).contains(&h) {
        return Err(Error::BadParameters(format!("step {h} outside [1e-6, 1e-3]")));
    }
    let sig = action.signature();
    let eval = |g: GroupElement| -> Result<Vec<f64>> {
        action.act(&g, x).map(|y| action.embed(&y)).map_err(|e| Error::EvaluatorFailure(e.to_string()))
    };
    let central = |basis: &crate::sopq::AlgebraElement, step: f64| -> Result<Vec<f64>> {
        let plus = eval(basis.scaled(step).try_exp()?)?;
        let minus = eval(basis.scaled(-step).try_exp()?)?;
        Ok(plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * step)).collect())
    };
    algebra_basis(sig)
        .iter()
        .map(|b| {
            let coarse = central(b, h)?;
            let fine = central(b, h / 2.0)?;
            Ok(fine.iter().zip(&coarse).map(|(f, c)| (4.0 * f - c) / 3.0).collect())
        })
        .collect()
}

/// Generator map as an (ambient × dim so(p,q)) matrix.
fn generator_matrix(fields: &[Vec<f64>]) -> DenseMatrix {
    let rows = fields.first().map_or(0, Vec::len);
    DenseMatrix::from_fn(rows, fields.len(), |i, j| fields[j][i])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitDimension {
    pub dimension: usize,
    /// Ratio of the last retained singular value to the first dropped one.
    pub gap: f64,
    pub singular_values: Vec<f64>,
}

fn checked_rank(m: &DenseMatrix, tol: &Tolerances) -> Result<RankReport> {
    let report = rank_report(m, tol.rank);
    if report.gap < MIN_GAP {
        return Err(Error::IllConditioned { gap: report.gap });
    }
    Ok(report)
}

/// Numerical rank of the generator map at x.
pub fn orbit_dimension<A: GroupAction>(action: &A, x: &A::Point, tol: &Tolerances) -> Result<OrbitDimension> {
    let m = generator_matrix(&generator_fields(action, x, DEFAULT_STEP)?);
    let r = checked_rank(&m, tol)?;
    Ok(OrbitDimension { dimension: r.rank, gap: r.gap, singular_values: r.singular_values })
}

/// Kernel of the generator map, in coefficients over [`algebra_basis`].
pub fn isotropy_algebra<A: GroupAction>(action: &A, x: &A::Point, tol: &Tolerances) -> Result<Vec<Vec<f64>>> {
    let m = generator_matrix(&generator_fields(action, x, DEFAULT_STEP)?);
    isotropy_from_matrix(&m, tol)
}

fn isotropy_from_matrix(m: &DenseMatrix, tol: &Tolerances) -> Result<Vec<Vec<f64>>> {
    checked_rank(m, tol)?;
    Ok(null_space(m, tol.rank))
}

fn datum_stabilizer(sig: Signature, psi: f64, tol: &Tolerances) -> Vec<Vec<f64>> {
    let mut v = vec![0.0; sig.n()];
    v[0] = psi.cos();
    v[sig.eps1()] = psi.sin();
    stabilizer_algebra(sig, &v, tol).expect("unit datum").coefficients
}

/// Golden-section minimum of `f` on [lo, hi].
fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    let t = 0.5 * (lo + hi);
    (t, f(t))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FTildeFit {
    pub f_tilde: ProjectivePoint,
    /// Largest principal angle of h_{[a:b]} against the isotropy algebra.
    pub residual: f64,
}

fn fit_f_tilde(sig: Signature, isotropy: &[Vec<f64>], tol: &Tolerances) -> Result<FTildeFit> {
    let cost = |psi: f64| containment_angle(&datum_stabilizer(sig, psi, tol), isotropy);
    let grid = 90;
    let step = PI / grid as f64;
    let mut coarse: Vec<(f64, f64)> = (0..grid).map(|i| (i as f64 * step, cost(i as f64 * step))).collect();
    coarse.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (psi, residual) = coarse
        .iter()
        .take(3)
        .map(|&(start, _)| golden_section(cost, start - step, start + step, 1e-10))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("three restarts");
    if residual > CONTAINMENT_TOL {
        return Err(Error::NoContainment { angle: residual });
    }
    Ok(FTildeFit { f_tilde: ProjectivePoint::from_angle(psi), residual })
}

/// The unique [a:b] with h_{a e1 + b ε1} contained in the isotropy algebra at z.
pub fn extract_f_tilde<A: GroupAction>(action: &A, z: &A::Point, tol: &Tolerances) -> Result<FTildeFit> {
    fit_f_tilde(action.signature(), &isotropy_algebra(action, z, tol)?, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OrbitType {
    Open,
    ClosedPnull,
    Nullcone,
    Unknown,
}

/// Stabilizer type of an orbit, by the vector or null line the isotropy fixes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StabilizerKind {
    /// Stabilizer of a vector with negative form value.
    StabSOp1q,
    /// Stabilizer of a vector with positive form value.
    StabSOpq1,
    /// Stabilizer of a null vector.
    GNull,
    /// Stabilizer of a null line.
    PNull,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitReport {
    pub dimension: usize,
    pub isotropy_dim: usize,
    pub f_tilde: Option<ProjectivePoint>,
    pub orbit_type: OrbitType,
    pub stabilizer: Option<StabilizerKind>,
    /// isotropy_dim − dim h_{f̃} when f̃ was found.
    pub excess_dim: Option<usize>,
    pub gap: f64,
}

/// Vectors of R^{p+q} annihilated by every element of the isotropy algebra.
fn common_kernel(sig: Signature, isotropy: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = sig.n();
    if isotropy.is_empty() {
        return (0..n).map(|i| crate::numkit::unit_vector(n, i)).collect();
    }
    let mut stacked = DenseMatrix::zeros(n * isotropy.len(), n);
    for (k, c) in isotropy.iter().enumerate() {
        stacked.set_block(k * n, 0, algebra_element(sig, c).matrix());
    }
    null_space(&stacked, 1e-5)
}

/// Whether the isotropy algebra preserves a null line: some null v with Xv ∈ R v for all X.
fn preserves_null_line(sig: Signature, isotropy: &[Vec<f64>]) -> bool {
    let n = sig.n();
    let elements: Vec<DenseMatrix> = isotropy.iter().map(|c| algebra_element(sig, c).matrix().clone()).collect();
    // candidates: vectors killed by the derived algebra
    let mut derived = DenseMatrix::zeros(n * elements.len() * elements.len(), n);
    let mut row = 0;
    for a in &elements {
        for b in &elements {
            let c = a.matmul(b).sub(&b.matmul(a));
            derived.set_block(row, 0, &c);
            row += n;
        }
    }
    null_space(&derived, 1e-5).iter().any(|v| {
        let null = sig.form(v, v).abs() <= 1e-6;
        let invariant = elements.iter().all(|x| {
            let xv = x.matvec(v);
            let along = crate::numkit::dot(&xv, v);
            crate::numkit::norm(&crate::numkit::axpy(-along, v, &xv)) <= 1e-6
        });
        null && invariant
    })
}

/// Orbit type at x from rank data and the vectors fixed by the isotropy algebra.
pub fn classify_orbit<A: GroupAction>(action: &A, x: &A::Point, tol: &Tolerances) -> Result<OrbitReport> {
    let sig = action.signature();
    let m = generator_matrix(&generator_fields(action, x, DEFAULT_STEP)?);
    let rank = checked_rank(&m, tol)?;
    let isotropy = null_space(&m, tol.rank);
    let dimension = rank.rank;
    let open_dim = sig.n() - 1;
    let fit = fit_f_tilde(sig, &isotropy, tol).ok();
    let excess_dim = fit.as_ref().map(|f| {
        let psi = f.f_tilde.angle();
        isotropy.len().saturating_sub(datum_stabilizer(sig, psi, tol).len())
    });
    let fixed = common_kernel(sig, &isotropy);
    let (orbit_type, stabilizer) = if dimension == open_dim && fixed.len() == 1 {
        let v = &fixed[0];
        let q = sig.form(v, v);
        if q.abs() <= 1e-6 {
            (OrbitType::Nullcone, Some(StabilizerKind::GNull))
        } else if q > 0.0 {
            (OrbitType::Open, Some(StabilizerKind::StabSOpq1))
        } else {
            (OrbitType::Open, Some(StabilizerKind::StabSOp1q))
        }
    } else if dimension + 1 == open_dim && fixed.is_empty() && preserves_null_line(sig, &isotropy) {
        (OrbitType::ClosedPnull, Some(StabilizerKind::PNull))
    } else {
        (OrbitType::Unknown, None)
    };
    Ok(OrbitReport {
        dimension,
        isotropy_dim: isotropy.len(),
        f_tilde: fit.map(|f| f.f_tilde),
        orbit_type,
        stabilizer,
        excess_dim,
        gap: rank.gap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Subgroup {
    SOp,
    SOq,
    /// SO(p−1) × SO(q−1), fixing e1 and ε1.
    H,
}

impl std::str::FromStr for Subgroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "SOp" | "sop" => Ok(Subgroup::SOp),
            "SOq" | "soq" => Ok(Subgroup::SOq),
            "H" | "h" => Ok(Subgroup::H),
            other => Err(Error::BadParameters(format!("unknown subgroup {other}"))),
        }
    }
}

fn block_rotation(sig: Signature, rot_p: &DenseMatrix, rot_q: &DenseMatrix) -> GroupElement {
    embed_k_unchecked(sig, rot_p, rot_q)
}

fn shifted(rot: &DenseMatrix, dim: usize) -> DenseMatrix {
    let mut m = DenseMatrix::identity(dim);
    m.set_block(1, 1, rot);
    m
}

/// Two random elements and an involution generating a dense subgroup of `subgroup`.
pub fn subgroup_generators(sig: Signature, subgroup: Subgroup, seed: u64) -> Vec<GroupElement> {
    let (p, q) = (sig.p(), sig.q());
    let mut r = rng(seed);
    let mut out = Vec::new();
    for _ in 0..2 {
        out.push(match subgroup {
            Subgroup::SOp => block_rotation(sig, &random_rotation(&mut r, p), &DenseMatrix::identity(q)),
            Subgroup::SOq => block_rotation(sig, &DenseMatrix::identity(p), &random_rotation(&mut r, q)),
            Subgroup::H => {
                let a = shifted(&random_rotation(&mut r, p - 1), p);
                let b = shifted(&random_rotation(&mut r, q - 1), q);
                block_rotation(sig, &a, &b)
            }
        });
    }
    out.push(match subgroup {
        Subgroup::SOp => involution(sig, 1),
        Subgroup::SOq => involution(sig, 2),
        Subgroup::H => {
            let mut d = vec![1.0; sig.n()];
            d[1] = -1.0;
            d[2] = -1.0;
            GroupElement::trusted(sig, DenseMatrix::diagonal(&d))
        }
    });
    out
}

/// Slice angles on a grid of `gridsize` points fixed by every generator of `subgroup`.
pub fn fixed_set_scan<A: GroupAction>(
    action: &A,
    slice: impl Fn(f64) -> Result<A::Point>,
    subgroup: Subgroup,
    gridsize: usize,
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    let gens = subgroup_generators(action.signature(), subgroup, 0x5eed);
    let mut fixed = Vec::new();
    for i in 0..gridsize {
        let phi = 2.0 * PI * i as f64 / gridsize as f64;
        let x = slice(phi)?;
        let mut ok = true;
        for g in &gens {
            match action.act(g, &x) {
                Ok(y) if action.distance(&x, &y) <= tol.action => {}
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            fixed.push(phi);
        }
    }
    Ok(fixed)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusEntry {
    pub label: &'static str,
    pub phi: f64,
    pub report: OrbitReport,
}

/// Orbit reports at the representatives N, −N, z1, z2 of the slice.
pub fn census<A: GroupAction>(
    action: &A,
    slice: impl Fn(f64) -> Result<A::Point>,
    tol: &Tolerances,
) -> Result<Vec<CensusEntry>> {
    if action.point_space() != PointSpace::ProductSphere {
        return Err(Error::WrongKind { expected: "product-sphere" });
    }
    [("pole", FRAC_PI_2), ("mirrored pole", 3.0 * FRAC_PI_2), ("z1", 0.0), ("z2", PI)]
        .into_iter()
        .map(|(label, phi)| Ok(CensusEntry { label, phi, report: classify_orbit(action, &slice(phi)?, tol)? }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action_engine::{BasicConstruction, BundleAction, ProductSpherePoint};
    use crate::circleflow::{make_flow, Component, FlowFunctionPair, FlowKind};
    use crate::numkit::norm;
    use crate::sopq::{algebra_coordinates, boost, AlgebraElement};

    fn basic() -> (Signature, BasicConstruction, Tolerances) {
        let sig = Signature::new(3, 3).unwrap();
        let tol = Tolerances::default();
        let pair = FlowFunctionPair::new(make_flow(FlowKind::BasicJ1, 1, 0.3).unwrap());
        (sig, BasicConstruction::new(sig, pair, tol).unwrap(), tol)
    }

    fn slice_with_f(action: &BasicConstruction, sig: Signature, f: f64) -> ProductSpherePoint {
        ProductSpherePoint::slice(sig, action.pair().angle_with_f(f, FRAC_PI_2).unwrap())
    }

    #[test]
    fn generator_fields_vanish_on_the_stabilizer() {
        let (sig, action, tol) = basic();
        let x = slice_with_f(&action, sig, 0.4);
        let mut v = vec![0.0; 6];
        v[0] = 0.4;
        v[3] = 1.0;
        let h = stabilizer_algebra(sig, &v, &tol).unwrap();
        let fields = generator_fields(&action, &x, 1e-4).unwrap();
        for c in &h.coefficients {
            let combo: Vec<f64> =
                (0..fields[0].len()).map(|i| fields.iter().zip(c).map(|(f, w)| w * f[i]).sum()).collect();
            assert!(norm(&combo) <= 1e-7, "{}", norm(&combo));
        }
    }

    #[test]
    fn rotation_field_matches_k_derivative() {
        let (_, action, _) = basic();
        let x = ProductSpherePoint::new(vec![0.6, 0.0, 0.0, 0.8], vec![1.0, 0.0, 0.0]).unwrap();
        let fields = generator_fields(&action, &x, 1e-4).unwrap();
        // basis[0] = E_21 − E_12 moves e1 toward e2
        let want = [0.0, 0.6, 0.0, 0.0, 0.0, 0.0, 0.0];
        let got = &fields[0];
        assert!(norm(&crate::numkit::sub(got, &want)) <= 1e-9, "{got:?}");
    }

    #[test]
    fn fields_scale_linearly() {
        let (sig, action, _) = basic();
        let x = slice_with_f(&action, sig, -0.2);
        let scaled = BasicScaled(&action);
        let a = generator_fields(&action, &x, 1e-4).unwrap();
        let b = generator_fields(&scaled, &x, 1e-4).unwrap();
        for (u, w) in a.iter().zip(&b) {
            let d: Vec<f64> = u.iter().zip(w).map(|(s, t)| 2.0 * s - t).collect();
            assert!(norm(&d) <= 1e-7 * (1.0 + norm(u)));
        }
    }

    /// The same action with every group element replaced by its square.
    struct BasicScaled<'a>(&'a BasicConstruction);

    impl GroupAction for BasicScaled<'_> {
        type Point = ProductSpherePoint;

        fn signature(&self) -> Signature {
            self.0.signature()
        }

        fn point_space(&self) -> PointSpace {
            self.0.point_space()
        }

        fn act(&self, g: &GroupElement, x: &ProductSpherePoint) -> Result<ProductSpherePoint> {
            self.0.act(&g.compose(g), x)
        }

        fn embed(&self, x: &ProductSpherePoint) -> Vec<f64> {
            self.0.embed(x)
        }
    }

    #[test]
    fn dimensions_on_the_slice() {
        let (sig, action, tol) = basic();
        let open = orbit_dimension(&action, &slice_with_f(&action, sig, 0.4), &tol).unwrap();
        assert_eq!(open.dimension, 5, "{open:?}");
        let closed = orbit_dimension(&action, &ProductSpherePoint::slice(sig, 0.0), &tol).unwrap();
        assert_eq!(closed.dimension, 4, "{closed:?}");
        let iso = isotropy_algebra(&action, &slice_with_f(&action, sig, 0.4), &tol).unwrap();
        assert_eq!(iso.len(), 10);
        let mut v = vec![0.0; 6];
        v[0] = 0.4;
        v[3] = 1.0;
        let h = stabilizer_algebra(sig, &v, &tol).unwrap();
        assert!(containment_angle(&h.coefficients, &iso) <= 1e-3);
        assert_eq!(isotropy_algebra(&action, &ProductSpherePoint::slice(sig, 0.0), &tol).unwrap().len(), 11);
        let pole_iso = isotropy_algebra(&action, &ProductSpherePoint::pole(sig), &tol).unwrap();
        assert_eq!(pole_iso.len(), 10);
        let so_p: Vec<Vec<f64>> = (0..3).map(|i| crate::numkit::unit_vector(15, i)).collect();
        assert!(containment_angle(&so_p, &pole_iso) <= 1e-6);
    }

    #[test]
    fn f_tilde_along_the_slice() {
        let (sig, action, tol) = basic();
        let pole = extract_f_tilde(&action, &ProductSpherePoint::pole(sig), &tol).unwrap();
        assert!(pole.f_tilde.distance(&ProjectivePoint::new(0.0, 1.0).unwrap()) <= 1e-3);
        for theta in [-1.5, -0.4, 0.7, 2.0] {
            let phi = action.pair().flow_on(Component::S, theta, FRAC_PI_2).unwrap();
            let fit = extract_f_tilde(&action, &ProductSpherePoint::slice(sig, phi), &tol).unwrap();
            let want = ProjectivePoint::new(f64::tanh(theta), 1.0).unwrap();
            assert!(fit.f_tilde.distance(&want) <= 1e-3, "{theta} {fit:?}");
            assert!(fit.f_tilde.distance(&pole.f_tilde.transported(theta)) <= 1e-3);
        }
        let z1 = extract_f_tilde(&action, &ProductSpherePoint::slice(sig, 0.0), &tol).unwrap();
        assert!(z1.f_tilde.distance(&ProjectivePoint::new(1.0, 1.0).unwrap()) <= 1e-3);
    }

    #[test]
    fn isotropy_is_conjugated_by_boosts() {
        let (sig, action, tol) = basic();
        let z = slice_with_f(&action, sig, 0.1);
        let iso = isotropy_algebra(&action, &z, &tol).unwrap();
        let theta = 0.6;
        let moved = action.act(&boost(sig, theta).unwrap(), &z).unwrap();
        let iso_moved = isotropy_algebra(&action, &moved, &tol).unwrap();
        let m = boost(sig, theta).unwrap();
        let conj: Vec<Vec<f64>> = iso
            .iter()
            .map(|c| {
                let x = algebra_element(sig, c).matrix().clone();
                let y = m.matrix().matmul(&x).matmul(m.inverse().matrix());
                algebra_coordinates(&AlgebraElement::new(sig, y, &tol).unwrap())
            })
            .collect();
        assert!(containment_angle(&conj, &iso_moved) <= 1e-3);
        assert!(containment_angle(&iso_moved, &conj) <= 1e-3);
    }

    #[test]
    fn census_and_classification() {
        let (sig, action, tol) = basic();
        let entries = census(&action, |phi| Ok(ProductSpherePoint::slice(sig, phi)), &tol).unwrap();
        let types: Vec<OrbitType> = entries.iter().map(|e| e.report.orbit_type).collect();
        assert_eq!(types, [OrbitType::Open, OrbitType::Open, OrbitType::ClosedPnull, OrbitType::ClosedPnull]);
        for e in &entries {
            assert_eq!(e.report.dimension + e.report.isotropy_dim, 15);
        }
        let r = classify_orbit(&action, &slice_with_f(&action, sig, 0.4), &tol).unwrap();
        assert_eq!((r.orbit_type, r.stabilizer), (OrbitType::Open, Some(StabilizerKind::StabSOpq1)));
        assert_eq!(r.excess_dim, Some(0));
    }

    #[test]
    fn fixed_sets() {
        let (sig, action, tol) = basic();
        let slice = |phi| Ok(ProductSpherePoint::slice(sig, phi));
        let sop = fixed_set_scan(&action, slice, Subgroup::SOp, 64, &tol).unwrap();
        assert_eq!(sop, vec![FRAC_PI_2, 3.0 * FRAC_PI_2]);
        assert!(fixed_set_scan(&action, slice, Subgroup::SOq, 64, &tol).unwrap().is_empty());
        assert_eq!(fixed_set_scan(&action, slice, Subgroup::H, 64, &tol).unwrap().len(), 64);
    }

    #[test]
    fn bundle_orbits() {
        let sig = Signature::new(3, 3).unwrap();
        let tol = Tolerances::default();
        let bundle = BundleAction::new(sig, make_flow(FlowKind::BasicJ1, 1, 0.3).unwrap(), tol).unwrap();
        let x = bundle.point(GroupElement::identity(sig), 1.0).unwrap();
        let r = classify_orbit(&bundle, &x, &tol).unwrap();
        assert_eq!((r.dimension, r.orbit_type), (5, OrbitType::Nullcone), "{r:?}");
        let slice = |phi| bundle.point(GroupElement::identity(sig), phi);
        assert!(fixed_set_scan(&bundle, slice, Subgroup::SOp, 32, &tol).unwrap().is_empty());
        assert!(fixed_set_scan(&bundle, slice, Subgroup::SOq, 32, &tol).unwrap().is_empty());
    }
}
