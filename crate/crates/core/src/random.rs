//! Seeded random matrices for instance generation and property checks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numeric::{diag_real, identity, CMatrix, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian<R: Rng>(rng: &mut R, r: usize, c: usize) -> CMatrix {
    CMatrix::from_fn(r, c, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) / std::f64::consts::SQRT_2
    })
}

/// Haar-like unitary from the QR factor of a complex Gaussian matrix.
pub fn unitary<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    if n == 0 {
        return identity(0);
    }
    let qr = gaussian(rng, n, n).qr();
    let (q, r) = qr.unpack();
    let mut q = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Orthonormal n x k frame.
pub fn frame<R: Rng>(rng: &mut R, n: usize, k: usize) -> CMatrix {
    unitary(rng, n).columns(0, k).into_owned()
}

/// Hermitian matrix `U diag(eigs) U*` with a random unitary `U`.
pub fn hermitian_with_spectrum<R: Rng>(rng: &mut R, eigs: &[f64]) -> CMatrix {
    let u = unitary(rng, eigs.len());
    &u * diag_real(eigs) * u.adjoint()
}

/// Selfadjoint contraction with eigenvalues uniform in (lo, hi).
pub fn sc_matrix<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> CMatrix {
    let eigs: Vec<f64> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
    hermitian_with_spectrum(rng, &eigs)
}

/// PSD matrix of the given rank with eigenvalues in (0.1, 2).
pub fn psd_of_rank<R: Rng>(rng: &mut R, n: usize, rank: usize) -> CMatrix {
    let eigs: Vec<f64> =
        (0..n).map(|i| if i < rank { rng.random_range(0.1..2.0) } else { 0.0 }).collect();
    hermitian_with_spectrum(rng, &eigs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{eigh, norm2};

    #[test]
    fn unitary_is_unitary() {
        let mut r = rng(3);
        let u = unitary(&mut r, 5);
        assert!((u.adjoint() * &u - identity(5)).norm() < 1e-12);
    }

    #[test]
    fn sc_matrix_is_contraction() {
        let mut r = rng(4);
        let b = sc_matrix(&mut r, 6, -1.0, 1.0);
        assert!(norm2(&b) <= 1.0);
        assert!((&b - b.adjoint()).norm() < 1e-12);
    }

    #[test]
    fn psd_rank_is_respected() {
        let mut r = rng(5);
        let p = psd_of_rank(&mut r, 5, 2);
        let (vals, _) = eigh(&p);
        assert_eq!(vals.iter().filter(|v| v.abs() > 1e-9).count(), 2);
    }

    #[test]
    fn same_seed_same_output() {
        let a = gaussian(&mut rng(9), 3, 3);
        let b = gaussian(&mut rng(9), 3, 3);
        assert_eq!(a, b);
    }
}
