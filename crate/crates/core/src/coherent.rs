//! Generalized coherent states of N quKits.
//!
//! Three constructions are provided and must agree up to global phase:
//! the closed product form `N_tau (|1> + tau_2 |2> + ... + tau_K |K>)^{(x) N}`,
//! the occupation-coefficient formula `C_n = N_tau prod_k tau_k^{n_k}`, and the
//! displacement exponential `exp(sum_k eta_k E~_{k1} - eta_k^* E~_{1k}) |1...1>`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::entanglement::{is_product, Verdict, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::operators::{ladder, SiteOperator};
use crate::symmetric::{collective_matrix, expand, symmetric_dim, SymStateCompressed, SymmetricBasis};
use crate::tensor::{make_product_state, ProductFactors, StateVector};

/// Largest dim S for which the dense generator exponential is formed.
pub const EXPM_LIMIT: usize = 2048;

/// Reference amplitudes below this make the tau chart unusable.
pub const CHART_FLOOR: f64 = 1e-12;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn check_params(n_sites: usize, local_dim: usize, values: &[Complex64], what: &str) -> Result<()> {
    if n_sites == 0 || local_dim < 2 {
        return Err(Error::InvalidParam(format!("need N >= 1 and K >= 2, got N={n_sites}, K={local_dim}")));
    }
    if values.len() != local_dim - 1 {
        return Err(Error::InvalidParam(format!("{what} needs K-1 = {} entries, got {}", local_dim - 1, values.len())));
    }
    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::InvalidParam(format!("{what} entries must be finite")));
    }
    Ok(())
}

/// `tau_2, ..., tau_K` of the product form, anchored at label 1.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentParams {
    n_sites: usize,
    local_dim: usize,
    tau: Vec<Complex64>,
}

impl CoherentParams {
    pub fn new(n_sites: usize, local_dim: usize, tau: Vec<Complex64>) -> Result<Self> {
        check_params(n_sites, local_dim, &tau, "tau")?;
        let params = CoherentParams { n_sites, local_dim, tau };
        if params.normalization() <= 0.0 {
            return Err(Error::InvalidParam("tau too large: normalization underflows".into()));
        }
        Ok(params)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn tau(&self) -> &[Complex64] {
        &self.tau
    }

    /// `(1 + sum |tau_k|^2)^{-N/2}`.
    pub fn normalization(&self) -> f64 {
        let weight: f64 = 1.0 + self.tau.iter().map(|t| t.norm_sqr()).sum::<f64>();
        weight.powf(-(self.n_sites as f64) / 2.0)
    }

    /// The unit single-site vector `(1, tau_2, ..., tau_K) / sqrt(1 + sum |tau|^2)`.
    pub fn site_state(&self) -> Vec<Complex64> {
        let scale = 1.0 / (1.0 + self.tau.iter().map(|t| t.norm_sqr()).sum::<f64>()).sqrt();
        std::iter::once(ONE).chain(self.tau.iter().copied()).map(|a| a * scale).collect()
    }
}

/// Generator coefficients `eta_2, ..., eta_K` of the displacement operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DisplacementParams {
    n_sites: usize,
    local_dim: usize,
    eta: Vec<Complex64>,
}

impl DisplacementParams {
    pub fn new(n_sites: usize, local_dim: usize, eta: Vec<Complex64>) -> Result<Self> {
        check_params(n_sites, local_dim, &eta, "eta")?;
        Ok(DisplacementParams { n_sites, local_dim, eta })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn eta(&self) -> &[Complex64] {
        &self.eta
    }

    /// Single-site generator `sum_k eta_k E_{k1} - eta_k^* E_{1k}`; anti-Hermitian.
    pub fn site_generator(&self) -> SiteOperator {
        let k = self.local_dim;
        let mut gen = SiteOperator::zero(k).expect("K validated");
        for (label, &eta) in (2..=k).zip(&self.eta) {
            let raise = ladder(label, 1, k).expect("valid labels").scale(eta);
            let lower = ladder(1, label, k).expect("valid labels").scale(eta.conj());
            gen = &(&gen + &raise) - &lower;
        }
        gen
    }
}

/// `N_tau (x)_n (|1> + tau_2 |2> + ... + tau_K |K>)`, unit norm.
pub fn coherent_product(params: &CoherentParams) -> Result<StateVector> {
    let factors = ProductFactors::uniform(params.site_state(), params.n_sites)?;
    make_product_state(&factors)
}

/// Unnormalized-convention coefficients `C_n = N_tau prod_{k>=2} tau_k^{n_k}`.
///
/// No full-space guard: cost is O(dim S * K).
pub fn coherent_coefficients(params: &CoherentParams) -> Result<SymStateCompressed> {
    let basis = SymmetricBasis::new(params.n_sites, params.local_dim)?;
    let norm = Complex64::new(params.normalization(), 0.0);
    let coeffs = basis
        .occupations()
        .iter()
        .map(|occ| {
            occ.counts()[1..].iter().zip(&params.tau).fold(norm, |acc, (&count, tau)| acc * tau.powu(count as u32))
        })
        .collect();
    SymStateCompressed::new(params.n_sites, params.local_dim, coeffs)
}

/// Matrix of the collective generator on S in the orthonormal Dicke basis.
pub fn generator_matrix(params: &DisplacementParams) -> Result<DMatrix<Complex64>> {
    collective_matrix(&params.site_generator(), params.n_sites)
}

/// The displaced lowest-weight state, computed as a dense exponential of the
/// generator restricted to S (the generator leaves S invariant).
pub fn coherent_displace_compressed(params: &DisplacementParams) -> Result<SymStateCompressed> {
    let dim = symmetric_dim(params.n_sites, params.local_dim);
    if dim > EXPM_LIMIT as u128 {
        return Err(Error::Size(format!("dim S = {dim} exceeds the exponential limit {EXPM_LIMIT}")));
    }
    let unitary = generator_matrix(params)?.exp();
    // |1,...,1> is the first canonical basis vector.
    let column: Vec<Complex64> = unitary.column(0).iter().copied().collect();
    SymStateCompressed::from_orthonormal(params.n_sites, params.local_dim, column)
}

/// [`coherent_displace_compressed`] expanded into the full space.
pub fn coherent_displace(params: &DisplacementParams) -> Result<StateVector> {
    expand(&coherent_displace_compressed(params)?)
}

/// Reads tau off the displaced state numerically: the state is factorized and
/// `tau_k = a^k / a^1` for its single-site factor.
pub fn tau_from_displacement(params: &DisplacementParams) -> Result<CoherentParams> {
    let displaced = coherent_displace(params)?;
    let classification = is_product(&displaced, DEFAULT_TOL)?;
    let factors = match (classification.verdict, classification.factors) {
        (Verdict::Product, Some(f)) => f,
        _ => {
            return Err(Error::DegenerateInput(format!(
                "displaced state failed the product test (defect {:e})",
                classification.defect
            )))
        }
    };
    let site = factors.factor(0);
    if site[0].norm() < CHART_FLOOR {
        return Err(Error::ChartSingularity(format!("component 1 of the displaced factor is {:e}", site[0].norm())));
    }
    let tau = site[1..].iter().map(|a| a / site[0]).collect();
    CoherentParams::new(params.n_sites, params.local_dim, tau)
}
