//! Product-state detection.
//!
//! A state is a product state iff, for every site n, the K partial vectors
//! `u_n^k` of `psi = sum_k |k>_n (x) u_n^k` are pairwise parallel. Parallelity
//! is measured by the wedge norm `||u_j ^ u_k|| / (||u_j|| ||u_k||)`, the l2
//! norm of all 2x2 minors `u_j[a] u_k[b] - u_j[b] u_k[a]` relative to the
//! vector norms (the sine of the angle between them). It bounds every single
//! normalized minor from above and is evaluated in O(length) by projecting
//! one vector off the other.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::coherent::{CoherentParams, CHART_FLOOR};
use crate::error::{Error, Result};
use crate::operators::DENSE_LIMIT;
use crate::symmetric::{Occupation, SymStateCompressed, SymmetricBasis};
use crate::tensor::{fidelity, full_dim, make_product_state, site_decompose, ProductFactors, StateVector};

pub const DEFAULT_TOL: f64 = 1e-10;

/// Minimum `|overlap|` accepted as a symmetric witness.
pub const WITNESS_TOL: f64 = 1e-9;

/// Partial vectors with norm below this fraction of `||psi||` count as zero,
/// and zero vectors are parallel to everything.
const ZERO_FLOOR: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Product,
    Entangled,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub verdict: Verdict,
    /// Present iff the verdict is `Product`.
    pub factors: Option<ProductFactors>,
    /// Largest per-site parallelity defect.
    pub defect: f64,
    pub site_defects: Vec<f64>,
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParam(format!("tolerance must lie in (0, 1), got {tol}")))
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `sin` of the angle between `a` and `b`; the larger vector is the reference.
fn wedge_defect(a: &[Complex64], norm_a: f64, b: &[Complex64], norm_b: f64) -> f64 {
    let (reference, r_norm, other, o_norm) =
        if norm_a >= norm_b { (a, norm_a, b, norm_b) } else { (b, norm_b, a, norm_a) };
    let coeff = dot(reference, other) / (r_norm * r_norm);
    let residual: f64 = reference.iter().zip(other).map(|(r, o)| (o - coeff * r).norm_sqr()).sum::<f64>().sqrt();
    residual / o_norm
}

/// Parallelity test over every site, with factor reconstruction on success.
///
/// On a `Product` verdict the factors are read off the largest-norm partial
/// at each site, `a_n ∝ (<u_ref|u^1>, ..., <u_ref|u^K>)`, and the rebuilt
/// product must reach fidelity `1 - tol` with `psi`.
pub fn is_product(psi: &StateVector, tol: f64) -> Result<Classification> {
    check_tol(tol)?;
    let psi_norm = psi.norm();
    if psi_norm == 0.0 || !psi_norm.is_finite() {
        return Err(Error::DegenerateInput("cannot classify a zero state".into()));
    }
    let floor = ZERO_FLOOR * psi_norm;
    let mut site_defects = Vec::with_capacity(psi.n_sites());
    let mut factors = Vec::with_capacity(psi.n_sites());

    for site in 1..=psi.n_sites() {
        let split = site_decompose(psi, site)?;
        let norms = split.partial_norms();
        let mut defect = 0.0f64;
        for j in 0..norms.len() {
            for k in j + 1..norms.len() {
                if norms[j] > floor && norms[k] > floor {
                    let d = wedge_defect(&split.partials[j], norms[j], &split.partials[k], norms[k]);
                    defect = defect.max(d);
                }
            }
        }
        site_defects.push(defect);

        let (reference, ref_norm) =
            norms.iter().copied().enumerate().max_by(|a, b| a.1.total_cmp(&b.1)).expect("K >= 2");
        let anchor = &split.partials[reference];
        factors.push(split.partials.iter().map(|u| dot(anchor, u) / (ref_norm * ref_norm)).collect::<Vec<_>>());
    }

    let defect = site_defects.iter().copied().fold(0.0, f64::max);
    if defect > tol {
        return Ok(Classification { verdict: Verdict::Entangled, factors: None, defect, site_defects });
    }
    let factors = ProductFactors::new(factors)?;
    let rebuilt = make_product_state(&factors)?;
    if fidelity(psi, &rebuilt)? < 1.0 - tol {
        return Ok(Classification { verdict: Verdict::Entangled, factors: None, defect, site_defects });
    }
    Ok(Classification { verdict: Verdict::Product, factors: Some(factors), defect, site_defects })
}

/// Independent oracle: for every site the K x K^(N-1) reshaping of `psi` must
/// have `sigma_2 <= tol * sigma_1`.
pub fn brute_force_is_product(psi: &StateVector, tol: f64) -> Result<bool> {
    check_tol(tol)?;
    let n = psi.n_sites();
    let k = psi.local_dim();
    match full_dim(n, k) {
        Some(d) if d <= DENSE_LIMIT => {}
        _ => return Err(Error::Size(format!("SVD oracle needs K^N <= {DENSE_LIMIT}, got {k}^{n}"))),
    }
    if psi.norm() == 0.0 {
        return Err(Error::DegenerateInput("cannot classify a zero state".into()));
    }
    let rest = psi.dim() / k;
    for site in 0..n {
        // digit of `site` in the mixed-radix index has weight k^(n - 1 - site)
        let weight = k.pow((n - 1 - site) as u32);
        let reshaped = DMatrix::from_fn(k, rest, |row, col| {
            let low = col % weight;
            let high = col / weight;
            psi.amps()[high * weight * k + row * weight + low]
        });
        let mut sigma: Vec<f64> = reshaped.singular_values().iter().copied().collect();
        sigma.sort_by(|a, b| b.total_cmp(a));
        if sigma[1] > tol * sigma[0] {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq)]
pub enum SymVerdict {
    /// `params` are expressed in the chart where basis label `chart` plays
    /// the role of label 1 (labels 1 and `chart` exchanged).
    Coherent {
        params: CoherentParams,
        chart: usize,
    },
    Entangled,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymClassification {
    pub verdict: SymVerdict,
    /// `||psi - C_ref (x)(|ref> + sum tau_k |k>)|| / ||psi||` in the chosen chart.
    pub defect: f64,
}

impl SymClassification {
    pub fn is_coherent(&self) -> bool {
        matches!(self.verdict, SymVerdict::Coherent { .. })
    }

    /// The unit single-site state in the original labelling, if coherent.
    pub fn site_state(&self) -> Option<Vec<Complex64>> {
        let SymVerdict::Coherent { params, chart } = &self.verdict else {
            return None;
        };
        let mut in_chart = params.site_state();
        in_chart.swap(0, chart - 1);
        Some(in_chart)
    }

    /// tau with label `anchor` as the reference, `None` if that amplitude is
    /// below the chart floor or the state is entangled.
    pub fn tau_in_chart(&self, anchor: usize) -> Option<Vec<Complex64>> {
        let site = self.site_state()?;
        let reference = *site.get(anchor.checked_sub(1)?)?;
        if reference.norm() < CHART_FLOOR {
            return None;
        }
        Some(site.iter().enumerate().filter(|&(k, _)| k + 1 != anchor).map(|(_, a)| a / reference).collect())
    }
}

/// Symmetric-subspace classifier on the coefficient pattern.
///
/// The chart label m maximizes `|C_{N e_m}|`. After exchanging labels 1 and m,
/// `tau_k = C_{(N-1) e_1 + e_k} / C_{N e_1}` and the state is coherent iff
/// every coefficient follows `C_n = C_{N e_1} prod_k tau_k^{n_k}`, measured as
/// a relative residual in the orthonormal norm. Every `|tau_k| <= 1` in the
/// chosen chart when the state is coherent.
pub fn classify_symmetric(sym: &SymStateCompressed, tol: f64) -> Result<SymClassification> {
    check_tol(tol)?;
    let norm = sym.norm_sqr().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::DegenerateInput("cannot classify a zero state".into()));
    }
    let n = sym.n_sites();
    let k = sym.local_dim();
    let basis = sym.basis();

    let (chart, top) = (1..=k)
        .map(|m| {
            let occ = Occupation::extremal(n, k, m).expect("label in range");
            (m, sym.coeffs()[basis.index_of(&occ).expect("extremal occupation")].norm())
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("K >= 2");
    if top <= ZERO_FLOOR * norm {
        return Ok(SymClassification { verdict: SymVerdict::Entangled, defect: 1.0 });
    }

    let mut relabel: Vec<usize> = (1..=k).collect();
    relabel.swap(0, chart - 1);
    let charted = sym.relabeled(&relabel)?;
    let coeffs = charted.coeffs();
    let anchor = coeffs[0];

    let mut counts = vec![0usize; k];
    let tau: Vec<Complex64> = (2..=k)
        .map(|label| {
            counts.fill(0);
            counts[0] = n - 1;
            counts[label - 1] = 1;
            coeffs[basis.rank(&counts).expect("neighbour of the anchor")] / anchor
        })
        .collect();

    let residual_sqr: f64 = basis
        .occupations()
        .iter()
        .zip(coeffs)
        .map(|(occ, &c)| {
            let predicted =
                occ.counts()[1..].iter().zip(&tau).fold(anchor, |acc, (&count, t)| acc * t.powu(count as u32));
            (c - predicted).norm_sqr() * occ.multiplicity() as f64
        })
        .sum();
    let defect = residual_sqr.sqrt() / norm;

    if defect > tol {
        return Ok(SymClassification { verdict: SymVerdict::Entangled, defect });
    }
    let params = CoherentParams::new(n, k, tau)?;
    Ok(SymClassification { verdict: SymVerdict::Coherent { params, chart }, defect })
}

/// `P_S` of a product state computed without the full space:
/// `C_n = (sum over words with occupation n of prod_site a_site^{w_site}) / (N! / prod n_k!)`.
pub fn project_product(factors: &ProductFactors) -> Result<SymStateCompressed> {
    let sums = occupation_sums(factors);
    let basis = SymmetricBasis::new(factors.n_sites(), factors.local_dim())?;
    let coeffs = basis
        .occupations()
        .iter()
        .map(|occ| sums.get(occ.counts()).copied().unwrap_or(ZERO) / occ.multiplicity() as f64)
        .collect();
    SymStateCompressed::new(factors.n_sites(), factors.local_dim(), coeffs)
}

/// Expands `prod_site (sum_k a_site^k x_k)` as a polynomial keyed by occupation.
fn occupation_sums(factors: &ProductFactors) -> HashMap<Vec<usize>, Complex64> {
    let k = factors.local_dim();
    let mut poly: HashMap<Vec<usize>, Complex64> = HashMap::from([(vec![0; k], ONE)]);
    for factor in factors.factors() {
        let mut next: HashMap<Vec<usize>, Complex64> = HashMap::with_capacity(poly.len() * k);
        for (counts, value) in &poly {
            for (label, &a) in factor.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let mut grown = counts.clone();
                grown[label] += 1;
                *next.entry(grown).or_insert(ZERO) += value * a;
            }
        }
        poly = next;
    }
    poly
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub occupation: Occupation,
    /// `<dicke_normalized(occupation) | product state>`.
    pub overlap: Complex64,
}

/// Finds a Dicke state with nonzero overlap on a product state, proving the
/// product state does not lie in the orthogonal complement of S.
///
/// Occupations are scanned in canonical order: all of `n_1 = N` first, then
/// `n_1 = N - 1` by descending `n_2`, and so on.
pub fn symmetric_witness(factors: &ProductFactors, tol: f64) -> Result<Witness> {
    let sums = occupation_sums(factors);
    let basis = SymmetricBasis::new(factors.n_sites(), factors.local_dim())?;
    basis
        .occupations()
        .iter()
        .find_map(|occ| {
            let sum = sums.get(occ.counts()).copied()?;
            let overlap = sum / (occ.multiplicity() as f64).sqrt();
            (overlap.norm() > tol).then(|| Witness { occupation: occ.clone(), overlap })
        })
        .ok_or(Error::WitnessFailure { tolerance: tol })
}
