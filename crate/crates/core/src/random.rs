//! Seeded sampling: Haar-random unitaries, random pure states and density
//! operators. Every sampler takes an explicit seed or RNG.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{determinant, qr};
use crate::tensor::{ComplexMatrix, DensityOperator, StateVector, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Deterministic per-task seeds drawn from a master seed.
pub fn derive_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut rng = rng_from_seed(seed);
    (0..count).map(|_| rng.random()).collect()
}

/// Standard complex Gaussian `(x + iy)/√2`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-distributed `d×d` unitary: QR of a Ginibre matrix with the phases of
/// `R`'s diagonal pushed into `Q`.
pub fn haar_unitary_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if d == 0 {
        return Err(Error::InvalidDimension(
            "Haar unitary of dimension 0".into(),
        ));
    }
    let g = ginibre(d, d, rng);
    let (q, r) = qr(&g);
    let phases: Vec<C64> = (0..d)
        .map(|i| {
            let x = r[(i, i)];
            if x.norm() == 0.0 {
                C64::new(1.0, 0.0)
            } else {
                x / x.norm()
            }
        })
        .collect();
    Ok(&q * &ComplexMatrix::diagonal(&phases))
}

pub fn haar_random_unitary(d: usize, seed: u64) -> Result<ComplexMatrix> {
    haar_unitary_with(d, &mut rng_from_seed(seed))
}

/// Rescales a unitary to determinant one, `u / det(u)^{1/d}` (principal root).
pub fn special_unitarize(u: &ComplexMatrix) -> ComplexMatrix {
    let d = u.rows() as f64;
    let det = determinant(u);
    let root = C64::from_polar(det.norm().powf(1.0 / d), det.arg() / d);
    u.scale(root.inv())
}

pub fn haar_special_unitary_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<ComplexMatrix> {
    Ok(special_unitarize(&haar_unitary_with(d, rng)?))
}

/// Unitarily invariant random pure state.
pub fn random_state<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<StateVector> {
    let n: usize = dims.iter().product();
    let amps = (0..n).map(|_| complex_gaussian(rng)).collect();
    StateVector::normalized(dims.to_vec(), amps)
}

/// Random full-rank density operator `G G† / tr(G G†)`.
pub fn random_density<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<DensityOperator> {
    let n: usize = dims.iter().product();
    let g = ginibre(n, n, rng);
    DensityOperator::from_unnormalized(dims.to_vec(), &(&g * &g.adjoint()))
}
