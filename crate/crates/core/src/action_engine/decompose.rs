//! g = k · m(θ) · u with k ∈ K, u in the identity component of the stabilizer of a e1 + b ε1.

use serde::Serialize;

use super::datum_vector;
use crate::error::{Error, Result};
use crate::numkit::{norm, rotation_sending, sub, unit_vector, DenseMatrix, Tolerances};
use crate::sopq::{boost, embed_k_unchecked, stabilizer_identity_component_test, GroupElement, Signature};

/// Distance to the double-root boundary below which the trace equation is
/// treated as degenerate.
pub const BOUNDARY_GAP: f64 = 1e-6;
const MARGIN: f64 = 10.0;

/// Roots of the trace equation T = cosh 2θ + s sinh 2θ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaRoots {
    /// Largest first.
    pub roots: Vec<f64>,
    /// T − T_min.
    pub gap: f64,
    /// Within [`BOUNDARY_GAP`] of the double root.
    pub boundary: bool,
}

/// Roots for the datum f e1 + ε1.
pub fn solve_theta(t: f64, f: f64) -> Result<ThetaRoots> {
    solve_theta_datum(t, f, 1.0)
}

/// Roots of (1+s)u² − 2Tu + (1−s) = 0, u = e^{2θ}, s = 2ab/(a²+b²).
pub fn solve_theta_datum(t: f64, a: f64, b: f64) -> Result<ThetaRoots> {
    let r2 = a * a + b * b;
    let plus = (a + b) * (a + b) / r2;
    let minus = (a - b) * (a - b) / r2;
    let t_min = (plus * minus).sqrt();
    let gap = t - t_min;
    if !t.is_finite() || gap < -1e-9 * t.abs().max(1.0) {
        return Err(Error::NoRealRoot { t, min: t_min });
    }
    let boundary = gap <= BOUNDARY_GAP && minus > 0.0 && plus > 0.0;
    let roots = if minus == 0.0 {
        vec![0.5 * (2.0 * t / plus).ln()]
    } else if plus == 0.0 {
        vec![0.5 * (minus / (2.0 * t)).ln()]
    } else {
        let disc = (t * t - plus * minus).max(0.0).sqrt();
        let u_big = (t + disc) / plus;
        let u_small = minus / (t + disc);
        if disc == 0.0 {
            vec![0.5 * u_big.ln()]
        } else {
            vec![0.5 * u_big.ln(), 0.5 * u_small.ln()]
        }
    };
    Ok(ThetaRoots { roots, gap: gap.max(0.0), boundary })
}

/// One (θ, σ, orientation) candidate of the solver.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch {
    pub theta: f64,
    pub sigma: f64,
    /// −1 when κ1 e1 is aligned against the p-part of the rank-one vector.
    pub orientation: f64,
    /// ‖u û − û‖.
    pub residual: f64,
    pub identity_component: bool,
    pub accepted: bool,
}

#[derive(Debug, Clone)]
pub struct DecompositionResult {
    pub k: GroupElement,
    pub theta: f64,
    pub u: GroupElement,
    pub branches: Vec<Branch>,
    /// T − T_min of the trace equation.
    pub gap: f64,
}

impl DecompositionResult {
    /// ‖k m(θ) u − g‖_F.
    pub fn reconstruction_residual(&self, g: &GroupElement) -> f64 {
        let m = boost(g.sig(), self.theta).expect("accepted θ is finite");
        self.k.compose(&m).compose(&self.u).matrix().sub(g.matrix()).frobenius_norm()
    }

    fn best_and_runner_up(&self) -> (f64, f64) {
        let mut r: Vec<f64> = self.branches.iter().map(|b| b.residual).collect();
        r.sort_by(f64::total_cmp);
        (r[0], r.get(1).copied().unwrap_or(f64::INFINITY))
    }

    /// Runner-up residual over best residual.
    pub fn margin(&self) -> f64 {
        let (best, second) = self.best_and_runner_up();
        second / best.max(f64::MIN_POSITIVE)
    }
}

struct Candidate {
    branch: Branch,
    k: GroupElement,
    u: GroupElement,
}

/// Unit vector of R^m that `e` should map to, or `None` when the block vanishes.
fn block_direction(block: &[f64], scale: f64) -> Option<Vec<f64>> {
    let n = norm(block);
    if n < 1e-12 {
        None
    } else {
        Some(block.iter().map(|x| scale * x / n).collect())
    }
}

fn rotation_to(dim: usize, target: Option<Vec<f64>>) -> Result<DenseMatrix> {
    match target {
        None => Ok(DenseMatrix::identity(dim)),
        Some(t) => rotation_sending(&unit_vector(dim, 0), &t),
    }
}

fn candidates(
    g: &GroupElement,
    a: f64,
    b: f64,
    orientations: &[f64],
    tol: &Tolerances,
) -> Result<(Vec<Candidate>, ThetaRoots)> {
    let sig: Signature = g.sig();
    let (p, q) = (sig.p(), sig.q());
    let u_hat = datum_vector(sig, a, b);
    let image = g.apply(&u_hat);
    let t = image.iter().map(|x| x * x).sum::<f64>();
    let roots = solve_theta_datum(t, a, b)?;
    // Q = g P gᵀ / T is the projector onto g û
    let r: Vec<f64> = image.iter().map(|x| x / t.sqrt()).collect();
    let mut out = Vec::new();
    for &theta in &roots.roots {
        let m_inv = boost(sig, -theta)?;
        for sigma in [1.0, -1.0] {
            for &orientation in orientations {
                let kappa1 = rotation_to(p, block_direction(&r[..p], sigma * orientation))?;
                let kappa2 = rotation_to(q, block_direction(&r[p..], sigma))?;
                let k = embed_k_unchecked(sig, &kappa1, &kappa2);
                let u = m_inv.compose(&k.inverse()).compose(g);
                let residual = norm(&sub(&u.apply(&u_hat), &u_hat));
                let identity_component =
                    residual <= tol.action && stabilizer_identity_component_test(&u, &u_hat, tol).unwrap_or(false);
                out.push(Candidate {
                    branch: Branch {
                        theta,
                        sigma,
                        orientation,
                        residual,
                        identity_component,
                        accepted: identity_component,
                    },
                    k,
                    u,
                });
            }
        }
    }
    Ok((out, roots))
}

fn finish(candidates: Vec<Candidate>, gap: f64) -> (DecompositionResult, usize) {
    let accepted = candidates.iter().filter(|c| c.branch.accepted).count();
    let branches: Vec<Branch> = candidates.iter().map(|c| c.branch.clone()).collect();
    let best = candidates
        .into_iter()
        .min_by(|x, y| {
            (!x.branch.accepted, x.branch.residual).partial_cmp(&(!y.branch.accepted, y.branch.residual)).unwrap()
        })
        .expect("at least one candidate");
    (DecompositionResult { k: best.k, theta: best.branch.theta, u: best.u, branches, gap }, accepted)
}

/// Factors g against the datum f e1 + ε1.
pub fn decompose(g: &GroupElement, f: f64, tol: &Tolerances) -> Result<DecompositionResult> {
    decompose_datum(g, f, 1.0, tol)
}

/// Factors g against a e1 + b ε1, aligning κ1 e1 and κ2 ε1 with the
/// same-signed halves of the rank-one vector. Exactly one branch must pass
/// with every other branch at least 10× worse.
pub fn decompose_datum(g: &GroupElement, a: f64, b: f64, tol: &Tolerances) -> Result<DecompositionResult> {
    let (cands, roots) = candidates(g, a, b, &[1.0], tol)?;
    if roots.boundary {
        return Err(Error::OutsideWPlus { gap: roots.gap });
    }
    let (result, accepted) = finish(cands, roots.gap);
    if accepted == 0 {
        return Err(Error::OutsideWPlus { gap: roots.gap });
    }
    let (best, runner_up) = result.best_and_runner_up();
    if accepted > 1 || runner_up < MARGIN * best {
        return Err(Error::NumericalAmbiguity { best, runner_up });
    }
    Ok(result)
}

/// Factors g against a e1 + b ε1 trying both relative orientations of κ1 and
/// κ2 and keeping the smallest accepted residual; usable at the double root.
pub(crate) fn decompose_best(g: &GroupElement, a: f64, b: f64, tol: &Tolerances) -> Result<DecompositionResult> {
    let (cands, roots) = candidates(g, a, b, &[1.0, -1.0], tol)?;
    let (result, accepted) = finish(cands, roots.gap);
    if accepted == 0 {
        let (best, runner_up) = result.best_and_runner_up();
        return Err(Error::NumericalAmbiguity { best, runner_up });
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_rotation, rng};
    use crate::sopq::{algebra_element, embed_k, stabilizer_algebra};

    fn sig33() -> Signature {
        Signature::new(3, 3).unwrap()
    }

    #[test]
    fn solve_theta_examples() {
        let r = solve_theta(1.0, 0.0).unwrap();
        assert!(r.boundary);
        assert!(r.roots.iter().all(|t| t.abs() < 1e-12));
        let r = solve_theta(2f64.cosh(), 0.0).unwrap();
        assert!(!r.boundary);
        assert!((r.roots[0] - 1.0).abs() < 1e-12 && (r.roots[1] + 1.0).abs() < 1e-12);
        let r = solve_theta(2f64.exp(), 1.0).unwrap();
        assert_eq!(r.roots.len(), 1);
        assert!((r.roots[0] - 1.0).abs() < 1e-15);
        let r = solve_theta(2f64.exp(), -1.0).unwrap();
        assert!((r.roots[0] + 1.0).abs() < 1e-15);
        assert!(matches!(solve_theta(0.5, 0.0), Err(Error::NoRealRoot { .. })));
        for (theta, f) in [(0.7, 0.3), (-1.2, 0.9), (2.0, -0.5)] {
            let t = super::super::lambda_scale(theta, f);
            let r = solve_theta(t, f).unwrap();
            assert!(r.roots.iter().any(|x| (x - theta).abs() < 1e-10), "{theta} {f} {r:?}");
        }
    }

    #[test]
    fn boost_factors_trivially() {
        let sig = sig33();
        let tol = Tolerances::default();
        let g = boost(sig, 0.7).unwrap();
        let d = decompose(&g, 0.0, &tol).unwrap();
        assert!((d.theta - 0.7).abs() < 1e-12);
        assert!(d.k.matrix().sub(&DenseMatrix::identity(6)).max_abs() < 1e-12);
        assert!(d.u.matrix().sub(&DenseMatrix::identity(6)).max_abs() < 1e-12);
        assert!(d.margin() >= 10.0);
    }

    #[test]
    fn k_elements_factor_with_zero_theta() {
        let sig = sig33();
        let tol = Tolerances::default();
        let mut r = rng(11);
        for _ in 0..20 {
            let k = embed_k(sig, &random_rotation(&mut r, 3), &random_rotation(&mut r, 3), &tol).unwrap();
            let d = decompose(&k, 0.4, &tol).unwrap();
            assert!(d.theta.abs() < 1e-12);
            // k is determined up to the stabilizer of the datum inside K
            assert!(d.u.off_k_residual() < 1e-9);
            let u_hat = datum_vector(sig, 0.4, 1.0);
            assert!(norm(&sub(&d.u.apply(&u_hat), &u_hat)) < 1e-9);
            assert!(d.k.compose(&d.u).matrix().sub(k.matrix()).max_abs() < 1e-9);
        }
    }

    #[test]
    fn stabilizer_elements_factor_into_u() {
        let sig = sig33();
        let tol = Tolerances::default();
        let f = 0.4;
        let h = stabilizer_algebra(sig, &datum_vector(sig, f, 1.0), &tol).unwrap();
        let mut r = rng(3);
        for _ in 0..20 {
            let c = crate::sampling::coeffs_in_ball(&mut r, h.dim(), 1.0);
            let x =
                h.elements.iter().zip(&c).fold(DenseMatrix::zeros(6, 6), |acc, (e, &w)| acc.add(&e.matrix().scale(w)));
            let coords = crate::sopq::algebra_coordinates(&crate::sopq::AlgebraElement::new(sig, x, &tol).unwrap());
            let g = algebra_element(sig, &coords).exp();
            let d = decompose(&g, f, &tol).unwrap();
            assert!(d.theta.abs() < 1e-9);
            assert!(d.reconstruction_residual(&g) <= 1e-8);
            assert!(d.u.matrix().sub(g.matrix()).max_abs() < 1e-8);
        }
    }

    #[test]
    fn near_boundary_is_rejected() {
        let sig = sig33();
        let tol = Tolerances::default();
        let g = boost(sig, 1e-5).unwrap();
        assert!(matches!(decompose(&g, 0.0, &tol), Err(Error::OutsideWPlus { .. })));
    }
}
