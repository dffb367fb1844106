//! Seeded random states for tests, sweeps and the CLI.
//!
//! Every draw is i.i.d. standard complex Gaussian followed by normalization.
//! Streams are split by index so results do not depend on thread scheduling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::symmetric::{expand, project_symmetric, SymStateCompressed};
use crate::tensor::{normalize, ProductFactors, StateVector};

/// Independent generator for sample `stream` under a master `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_vec<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| gaussian(rng)).collect()
}

pub fn random_state<R: Rng + ?Sized>(rng: &mut R, n_sites: usize, local_dim: usize) -> Result<StateVector> {
    let dim = crate::tensor::guarded_full_dim(n_sites, local_dim)?;
    normalize(&StateVector::new(n_sites, local_dim, gaussian_vec(rng, dim))?)
}

pub fn random_factors<R: Rng + ?Sized>(rng: &mut R, n_sites: usize, local_dim: usize) -> Result<ProductFactors> {
    ProductFactors::new((0..n_sites).map(|_| gaussian_vec(rng, local_dim)).collect())
}

/// Random normalized symmetric state, Gaussian in the orthonormal Dicke basis.
pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, n_sites: usize, local_dim: usize) -> Result<SymStateCompressed> {
    let dim = SymStateCompressed::zeros(n_sites, local_dim)?.dim();
    SymStateCompressed::from_orthonormal(n_sites, local_dim, gaussian_vec(rng, dim))?.normalize()
}

/// Random normalized state in the orthogonal complement of S.
pub fn random_perp<R: Rng + ?Sized>(rng: &mut R, n_sites: usize, local_dim: usize) -> Result<StateVector> {
    let psi = random_state(rng, n_sites, local_dim)?;
    let (sym, _) = project_symmetric(&psi)?;
    let sym_part = expand(&sym)?;
    let perp: Vec<Complex64> = psi.amps().iter().zip(sym_part.amps()).map(|(a, s)| a - s).collect();
    normalize(&StateVector::new(n_sites, local_dim, perp)?)
}
