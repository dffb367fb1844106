//! Randomized verification sweeps for both characterization results:
//! inside S the product states are exactly the coherent states, and no
//! product state lies in the orthogonal complement of S.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coherent::{coherent_coefficients, coherent_product, CoherentParams};
use crate::entanglement::{
    brute_force_is_product, classify_symmetric, is_product, symmetric_witness, SymVerdict, Verdict, WITNESS_TOL,
};
use crate::error::{Error, Result};
use crate::operators::DENSE_LIMIT;
use crate::random::{gaussian, gaussian_vec, random_factors, random_perp, random_symmetric, rng_for};
use crate::symmetric::{expand, project_symmetric};
use crate::tensor::full_dim;

/// Symmetric residual allowed for a coherent state.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// Relative error allowed on recovered tau.
pub const TAU_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub n_sites: usize,
    pub local_dim: usize,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub threads: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PassCount {
    pub passed: usize,
    pub total: usize,
}

impl PassCount {
    pub fn all_passed(&self) -> bool {
        self.passed == self.total
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub n_sites: usize,
    pub local_dim: usize,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub theorem1_pass: PassCount,
    pub theorem2_pass: PassCount,
    /// Largest parallelity or pattern defect among samples judged product.
    pub max_defect: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed: Option<f64>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.theorem1_pass.all_passed() && self.theorem2_pass.all_passed()
    }
}

/// Sub-checks on one random coherent state.
#[derive(Clone, Debug, Default)]
pub struct ForwardOutcome {
    pub symmetric: bool,
    pub product: bool,
    pub oracle_product: bool,
    pub tau_recovered: bool,
    pub defect: f64,
}

impl ForwardOutcome {
    pub fn passed(&self) -> bool {
        self.symmetric && self.product && self.oracle_product && self.tau_recovered
    }
}

/// Sub-checks on one random symmetric state.
#[derive(Clone, Debug, Default)]
pub struct ReverseOutcome {
    pub coherent: bool,
    pub oracle_product: bool,
    /// For coherent verdicts: the rebuilt tau-power pattern reproduces the input.
    pub pattern_ok: bool,
    pub defect: f64,
}

impl ReverseOutcome {
    pub fn passed(&self) -> bool {
        self.coherent == self.oracle_product && (!self.coherent || self.pattern_ok)
    }
}

/// Sub-checks on one random S-perp state and one random product state.
#[derive(Clone, Debug, Default)]
pub struct PerpOutcome {
    pub entangled: bool,
    pub oracle_entangled: bool,
    pub witness_found: bool,
}

impl PerpOutcome {
    pub fn passed(&self) -> bool {
        self.entangled && self.oracle_entangled && self.witness_found
    }
}

fn relative_error(got: &[Complex64], want: &[Complex64]) -> f64 {
    let diff: f64 = got.iter().zip(want).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    let scale: f64 = want.iter().map(|b| b.norm_sqr()).sum::<f64>().sqrt();
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// A random coherent state must lie in S, pass both product tests, and give
/// back its tau.
pub fn check_forward<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize, tol: f64) -> Result<ForwardOutcome> {
    let tau = gaussian_vec(rng, k - 1);
    let params = CoherentParams::new(n, k, tau.clone())?;
    let psi = coherent_product(&params)?;
    let (_, residual) = project_symmetric(&psi)?;
    let cls = is_product(&psi, tol)?;
    let oracle_product = brute_force_is_product(&psi, tol)?;

    let factor_tau = cls.factors.as_ref().map(|f| {
        let site = f.factor(0);
        site[1..].iter().map(|a| a / site[0]).collect::<Vec<_>>()
    });
    let sym_cls = classify_symmetric(&coherent_coefficients(&params)?, tol)?;
    let sym_tau = sym_cls.tau_in_chart(1);
    let tau_recovered =
        [factor_tau, sym_tau].iter().all(|t| t.as_ref().is_some_and(|t| relative_error(t, &tau) <= TAU_TOL));

    Ok(ForwardOutcome {
        symmetric: residual <= MEMBERSHIP_TOL,
        product: cls.verdict == Verdict::Product,
        oracle_product,
        tau_recovered,
        defect: cls.defect.max(sym_cls.defect),
    })
}

/// A random symmetric state; every fourth draw is instead a coherent state
/// under a random relabelling and phase so both verdicts are exercised.
pub fn check_reverse<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    k: usize,
    tol: f64,
    plant_coherent: bool,
) -> Result<ReverseOutcome> {
    let sym = if plant_coherent {
        let params = CoherentParams::new(n, k, gaussian_vec(rng, k - 1))?;
        let mut relabel: Vec<usize> = (1..=k).collect();
        relabel.shuffle(rng);
        let phase = gaussian(rng);
        coherent_coefficients(&params)?.relabeled(&relabel)?.scaled(phase / phase.norm())
    } else {
        random_symmetric(rng, n, k)?
    };
    let cls = classify_symmetric(&sym, tol)?;
    let psi = expand(&sym)?;
    let oracle_product = brute_force_is_product(&psi, tol)?;

    let pattern_ok = match &cls.verdict {
        SymVerdict::Coherent { .. } => {
            let site = cls.site_state().expect("coherent verdict has a site state");
            let factors = crate::tensor::ProductFactors::uniform(site, n)?;
            let rebuilt = crate::tensor::make_product_state(&factors)?;
            crate::tensor::fidelity(&psi, &rebuilt)? >= 1.0 - TAU_TOL && cls.defect <= TAU_TOL
        }
        SymVerdict::Entangled => false,
    };
    Ok(ReverseOutcome { coherent: cls.is_coherent(), oracle_product, pattern_ok, defect: cls.defect })
}

/// A random S-perp state must be entangled under both tests, and a random
/// product state must have a symmetric witness.
pub fn check_perp<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize, tol: f64) -> Result<PerpOutcome> {
    let perp = random_perp(rng, n, k)?;
    let cls = is_product(&perp, tol)?;
    let oracle = brute_force_is_product(&perp, tol)?;
    let factors = random_factors(rng, n, k)?;
    let witness_found = match symmetric_witness(&factors, WITNESS_TOL) {
        Ok(w) => w.overlap.norm() > WITNESS_TOL,
        Err(Error::WitnessFailure { .. }) => false,
        Err(e) => return Err(e),
    };
    Ok(PerpOutcome { entangled: cls.verdict == Verdict::Entangled, oracle_entangled: !oracle, witness_found })
}

struct SampleResult {
    theorem1: bool,
    theorem2: bool,
    defect: f64,
}

fn run_sample(cfg: &VerifyConfig, index: usize) -> SampleResult {
    let (n, k, tol) = (cfg.n_sites, cfg.local_dim, cfg.tol);
    let mut rng = rng_for(cfg.seed, 3 * index as u64);
    let forward = check_forward(&mut rng, n, k, tol);
    let mut rng = rng_for(cfg.seed, 3 * index as u64 + 1);
    let reverse = check_reverse(&mut rng, n, k, tol, index % 4 == 3);
    let mut rng = rng_for(cfg.seed, 3 * index as u64 + 2);
    let perp = check_perp(&mut rng, n, k, tol);

    let mut defect = 0.0f64;
    if let Ok(f) = &forward {
        if f.product {
            defect = defect.max(f.defect);
        }
    }
    if let Ok(r) = &reverse {
        if r.coherent {
            defect = defect.max(r.defect);
        }
    }
    SampleResult {
        theorem1: matches!(&forward, Ok(f) if f.passed()) && matches!(&reverse, Ok(r) if r.passed()),
        theorem2: matches!(&perp, Ok(p) if p.passed()),
        defect,
    }
}

/// Runs `samples` independent draws. Results depend only on the seed, never
/// on the thread count.
pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    if cfg.n_sites < 2 || cfg.local_dim < 2 {
        return Err(Error::InvalidParam("verify needs N >= 2 and K >= 2".into()));
    }
    match full_dim(cfg.n_sites, cfg.local_dim) {
        Some(d) if d <= DENSE_LIMIT => {}
        _ => {
            return Err(Error::Size(format!(
                "verify needs K^N <= {DENSE_LIMIT} for the SVD oracle, got {}^{}",
                cfg.local_dim, cfg.n_sites
            )))
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.max(1))
        .build()
        .map_err(|e| Error::InvalidParam(format!("thread pool: {e}")))?;
    let results: Vec<SampleResult> =
        pool.install(|| (0..cfg.samples).into_par_iter().map(|i| run_sample(cfg, i)).collect());

    let count = |f: fn(&SampleResult) -> bool| PassCount {
        passed: results.iter().filter(|r| f(r)).count(),
        total: results.len(),
    };
    Ok(VerifyReport {
        n_sites: cfg.n_sites,
        local_dim: cfg.local_dim,
        samples: cfg.samples,
        seed: cfg.seed,
        tolerance: cfg.tol,
        theorem1_pass: count(|r| r.theorem1),
        theorem2_pass: count(|r| r.theorem2),
        max_defect: results.iter().map(|r| r.defect).fold(0.0, f64::max),
        elapsed: None,
    })
}
