//! Seeded random sampling of group elements and points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numkit::{matrix_exp, norm, normalized, DenseMatrix};
use crate::sopq::{algebra_element, AlgebraElement, GroupElement, Signature};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_coeffs(rng: &mut SampleRng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Algebra coefficients uniform in [−1,1], rescaled into the ball of radius `max_norm`.
pub fn coeffs_in_ball(rng: &mut SampleRng, len: usize, max_norm: f64) -> Vec<f64> {
    let c = uniform_coeffs(rng, len);
    let radius = max_norm * rng.random::<f64>();
    let n = norm(&c).max(f64::MIN_POSITIVE);
    c.iter().map(|x| x * radius / n).collect()
}

pub fn random_algebra(sig: Signature, rng: &mut SampleRng, max_norm: f64) -> AlgebraElement {
    algebra_element(sig, &coeffs_in_ball(rng, sig.algebra_dim(), max_norm))
}

pub fn random_group(sig: Signature, rng: &mut SampleRng, max_norm: f64) -> GroupElement {
    random_algebra(sig, rng, max_norm).exp()
}

pub fn random_unit(rng: &mut SampleRng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let nv = norm(&v);
        if nv > 1e-3 && nv <= 1.0 {
            return normalized(&v);
        }
    }
}

/// Haar-ish random element of SO(n) via the exponential of a random skew matrix.
pub fn random_rotation(rng: &mut SampleRng, n: usize) -> DenseMatrix {
    let mut skew = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let x = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            skew[(i, j)] = -x;
            skew[(j, i)] = x;
        }
    }
    matrix_exp(&skew).expect("bounded skew matrix")
}
