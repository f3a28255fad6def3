//! Seeded samplers: Haar unitaries, unit vectors, operators and densities.
//!
//! Every sampler draws from a caller-supplied `ChaCha8Rng`, so results are a
//! pure function of the seed on every platform.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linops::{CMatrix, CVector, Operator, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for sub-task `index` of run `seed`.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) / 2f64.sqrt()
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| complex_gaussian(rng))
}

/// Haar-random unit vector in `C^n`.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    let v: CVector = DVector::from_fn(n, |_, _| complex_gaussian(rng));
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

/// Random operator with unit HS norm.
pub fn unit_operator<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Operator {
    let g = gaussian_matrix(rng, n);
    let norm = g.norm();
    Operator::from_matrix_unchecked(g / C64::new(norm, 0.0))
}

/// Random rank-one projector `ψψ†` with `ψ` Haar-distributed.
pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Operator {
    let v = unit_vector(rng, n);
    Operator::from_matrix_unchecked(&v * v.adjoint())
}

/// Random full-rank density `GG† / tr(GG†)`.
pub fn density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Operator {
    let g = gaussian_matrix(rng, n);
    let p = &g * g.adjoint();
    let t = p.trace();
    Operator::from_matrix_unchecked(p / t)
}

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases of
/// `R`'s diagonal pushed into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = gaussian_matrix(rng, n);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let mut col = u.column_mut(j);
        col *= phase;
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut r = rng(3);
        for n in 1..5 {
            let u = haar_unitary(&mut r, n);
            let e = &u * u.adjoint() - CMatrix::identity(n, n);
            assert!(e.norm() < 1e-12);
        }
    }

    #[test]
    fn samplers_are_deterministic() {
        let a = unit_operator(&mut rng(9), 3);
        let b = unit_operator(&mut rng(9), 3);
        assert_eq!(a, b);
        assert_ne!(sub_seed(1, 0), sub_seed(1, 1));
    }

    #[test]
    fn density_is_a_state() {
        let d = density(&mut rng(5), 4);
        assert!((d.trace().re - 1.0).abs() < 1e-12);
        assert!(d.min_hermitian_eigenvalue() > 0.0);
    }
}
