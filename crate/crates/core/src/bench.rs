//! Full-space vs compressed timing of collective operators and coherent states.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::coherent::{coherent_coefficients, coherent_product, CoherentParams};
use crate::error::{Error, Result};
use crate::operators::{collective_apply, SiteOperator};
use crate::random::{gaussian_vec, random_symmetric, rng_for};
use crate::symmetric::{collective_apply_compressed, expand, symmetric_dim, SymStateCompressed};
use crate::tensor::{full_dim, StateVector, FULL_SPACE_LIMIT};

/// Compressed-mode limit on dim S.
pub const COMPRESSED_LIMIT: u128 = 1 << 20;

pub const OP_COLLECTIVE: &str = "collective_apply";
pub const OP_COHERENT: &str = "coherent_state";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchMode {
    Full,
    Compressed,
}

impl fmt::Display for BenchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchMode::Full => "full",
            BenchMode::Compressed => "compressed",
        })
    }
}

impl FromStr for BenchMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(BenchMode::Full),
            "compressed" => Ok(BenchMode::Compressed),
            other => Err(Error::InvalidParam(format!("unknown bench mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub mode: BenchMode,
    pub n_sites: usize,
    pub local_dim: usize,
    pub dim: u128,
    pub op: String,
    /// Total seconds over all repetitions.
    pub wall_time: f64,
    pub throughput: f64,
}

/// The seeded inputs shared by both modes.
pub struct BenchInputs {
    pub op: SiteOperator,
    pub sym: SymStateCompressed,
    pub params: CoherentParams,
}

impl BenchInputs {
    pub fn new(n_sites: usize, local_dim: usize, seed: u64) -> Result<Self> {
        let mut rng = rng_for(seed, 0);
        let op = SiteOperator::new(local_dim, gaussian_vec(&mut rng, local_dim * local_dim))?;
        let sym = random_symmetric(&mut rng, n_sites, local_dim)?;
        let params = CoherentParams::new(n_sites, local_dim, gaussian_vec(&mut rng, local_dim - 1))?;
        Ok(BenchInputs { op, sym, params })
    }
}

/// Checks the size guard for `mode` and returns the working dimension.
pub fn mode_dim(n_sites: usize, local_dim: usize, mode: BenchMode) -> Result<u128> {
    match mode {
        BenchMode::Full => match full_dim(n_sites, local_dim) {
            Some(d) if d <= FULL_SPACE_LIMIT => Ok(d as u128),
            _ => Err(Error::Size(format!("full mode needs K^N <= {FULL_SPACE_LIMIT}, got {local_dim}^{n_sites}"))),
        },
        BenchMode::Compressed => {
            let d = symmetric_dim(n_sites, local_dim);
            if d <= COMPRESSED_LIMIT {
                Ok(d)
            } else {
                Err(Error::Size(format!("compressed mode needs dim S <= {COMPRESSED_LIMIT}, got {d}")))
            }
        }
    }
}

fn time<T>(reps: usize, mut f: impl FnMut() -> Result<T>) -> Result<f64> {
    let start = Instant::now();
    for _ in 0..reps {
        std::hint::black_box(f()?);
    }
    Ok(start.elapsed().as_secs_f64())
}

pub fn run_bench(
    n_sites: usize,
    local_dim: usize,
    mode: BenchMode,
    reps: usize,
    seed: u64,
) -> Result<Vec<BenchReport>> {
    let dim = mode_dim(n_sites, local_dim, mode)?;
    let reps = reps.max(1);
    let inputs = BenchInputs::new(n_sites, local_dim, seed)?;
    let report = |op: &str, wall_time: f64| BenchReport {
        mode,
        n_sites,
        local_dim,
        dim,
        op: op.to_string(),
        wall_time,
        throughput: if wall_time > 0.0 { reps as f64 / wall_time } else { f64::INFINITY },
    };
    let (apply_time, coherent_time) = match mode {
        BenchMode::Full => {
            let psi = expand(&inputs.sym)?;
            (time(reps, || collective_apply(&inputs.op, &psi))?, time(reps, || coherent_product(&inputs.params))?)
        }
        BenchMode::Compressed => (
            time(reps, || collective_apply_compressed(&inputs.op, &inputs.sym))?,
            time(reps, || coherent_coefficients(&inputs.params))?,
        ),
    };
    Ok(vec![report(OP_COLLECTIVE, apply_time), report(OP_COHERENT, coherent_time)])
}

/// Largest Euclidean disagreement between the two pipelines on the shared
/// computations (collective application to a symmetric input, coherent state).
pub fn cross_mode_error(n_sites: usize, local_dim: usize, seed: u64) -> Result<f64> {
    mode_dim(n_sites, local_dim, BenchMode::Full)?;
    let inputs = BenchInputs::new(n_sites, local_dim, seed)?;
    let full_apply: StateVector = collective_apply(&inputs.op, &expand(&inputs.sym)?)?;
    let compressed_apply = expand(&collective_apply_compressed(&inputs.op, &inputs.sym)?)?;
    let full_coherent = coherent_product(&inputs.params)?;
    let compressed_coherent = expand(&coherent_coefficients(&inputs.params)?)?;
    Ok(full_apply.distance(&compressed_apply)?.max(full_coherent.distance(&compressed_coherent)?))
}
