//! Dense states over the full K^N product basis.
//!
//! Basis words are written with labels `1..=K` at the API boundary and stored
//! as digits `0..K` internally. Site 1 is the most significant digit, so a
//! flat index reads left to right like the ket `|k1 k2 ... kN>`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest full-space dimension any expansion into K^N amplitudes may produce.
pub const FULL_SPACE_LIMIT: usize = 1 << 20;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// K^N, or `None` on overflow.
pub fn full_dim(n_sites: usize, local_dim: usize) -> Option<usize> {
    local_dim.checked_pow(u32::try_from(n_sites).ok()?)
}

/// Like [`full_dim`] but enforces [`FULL_SPACE_LIMIT`].
pub fn guarded_full_dim(n_sites: usize, local_dim: usize) -> Result<usize> {
    match full_dim(n_sites, local_dim) {
        Some(d) if d <= FULL_SPACE_LIMIT => Ok(d),
        _ => Err(Error::Size(format!("K^N = {local_dim}^{n_sites} exceeds the full-space limit {FULL_SPACE_LIMIT}"))),
    }
}

fn check_shape(n_sites: usize, local_dim: usize) -> Result<()> {
    if n_sites == 0 {
        return Err(Error::InvalidParam("n_sites must be at least 1".into()));
    }
    if local_dim < 2 {
        return Err(Error::InvalidParam("local_dim must be at least 2".into()));
    }
    Ok(())
}

/// Flat index of a basis word given with labels in `1..=K`.
pub fn basis_index(word: &[usize], local_dim: usize) -> Result<usize> {
    let mut index = 0usize;
    for (pos, &label) in word.iter().enumerate() {
        if label == 0 || label > local_dim {
            return Err(Error::Index(format!("label {label} at position {} outside 1..={local_dim}", pos + 1)));
        }
        index = index
            .checked_mul(local_dim)
            .and_then(|i| i.checked_add(label - 1))
            .ok_or_else(|| Error::Size("basis index overflows usize".into()))?;
    }
    Ok(index)
}

/// Inverse of [`basis_index`]: labels in `1..=K`, site 1 first.
pub fn decode_index(mut index: usize, n_sites: usize, local_dim: usize) -> Result<Vec<usize>> {
    match full_dim(n_sites, local_dim) {
        Some(d) if index < d => {}
        _ => return Err(Error::Index(format!("index {index} outside the {local_dim}^{n_sites} product basis"))),
    }
    let mut word = vec![0; n_sites];
    for slot in word.iter_mut().rev() {
        *slot = index % local_dim + 1;
        index /= local_dim;
    }
    Ok(word)
}

/// Pure state of N quKits as a dense amplitude vector in basis-index order.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_sites: usize,
    local_dim: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(n_sites: usize, local_dim: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_shape(n_sites, local_dim)?;
        let expected = full_dim(n_sites, local_dim)
            .ok_or_else(|| Error::Size(format!("{local_dim}^{n_sites} overflows usize")))?;
        if amps.len() != expected {
            return Err(Error::Shape(format!(
                "expected {expected} amplitudes for N={n_sites}, K={local_dim}, got {}",
                amps.len()
            )));
        }
        Ok(StateVector { n_sites, local_dim, amps })
    }

    /// The all-zero vector. Subject to [`FULL_SPACE_LIMIT`].
    pub fn zeros(n_sites: usize, local_dim: usize) -> Result<Self> {
        check_shape(n_sites, local_dim)?;
        let dim = guarded_full_dim(n_sites, local_dim)?;
        Ok(StateVector { n_sites, local_dim, amps: vec![ZERO; dim] })
    }

    /// A single product-basis word, labels in `1..=K`.
    pub fn basis(word: &[usize], local_dim: usize) -> Result<Self> {
        let mut state = Self::zeros(word.len(), local_dim)?;
        let index = basis_index(word, local_dim)?;
        state.amps[index] = ONE;
        Ok(state)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn amp(&self, word: &[usize]) -> Result<Complex64> {
        if word.len() != self.n_sites {
            return Err(Error::Index(format!("word of length {} for a {}-site state", word.len(), self.n_sites)));
        }
        Ok(self.amps[basis_index(word, self.local_dim)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scaled(&self, factor: Complex64) -> StateVector {
        StateVector {
            n_sites: self.n_sites,
            local_dim: self.local_dim,
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn same_shape(&self, other: &StateVector) -> bool {
        self.n_sites == other.n_sites && self.local_dim == other.local_dim
    }

    /// Euclidean norm of `self - other`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        ensure_same_shape(self, other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt())
    }

    pub fn normalize(&self) -> Result<StateVector> {
        normalize(self)
    }
}

fn ensure_same_shape(a: &StateVector, b: &StateVector) -> Result<()> {
    if a.same_shape(b) {
        Ok(())
    } else {
        Err(Error::Shape(format!("(N={}, K={}) vs (N={}, K={})", a.n_sites, a.local_dim, b.n_sites, b.local_dim)))
    }
}

/// `<a|b>`, conjugate-linear in `a`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    ensure_same_shape(a, b)?;
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// `|<a|b>|^2 / (<a|a><b|b>)`; invariant under global phase and scale.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    let overlap = inner_product(a, b)?;
    let denom = a.norm_sqr() * b.norm_sqr();
    if denom == 0.0 {
        return Err(Error::DegenerateInput("fidelity with a zero vector".into()));
    }
    Ok(overlap.norm_sqr() / denom)
}

pub fn normalize(psi: &StateVector) -> Result<StateVector> {
    let norm = psi.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::DegenerateInput(format!("cannot normalize a vector of norm {norm}")));
    }
    Ok(psi.scaled(Complex64::new(1.0 / norm, 0.0)))
}

/// One unit-norm K-vector per site; a certificate that a state is unentangled.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductFactors {
    local_dim: usize,
    factors: Vec<Vec<Complex64>>,
}

impl ProductFactors {
    /// Normalizes every factor. Zero factors are rejected.
    pub fn new(factors: Vec<Vec<Complex64>>) -> Result<Self> {
        let local_dim = factors
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidParam("at least one factor is required".into()))?;
        check_shape(factors.len(), local_dim)?;
        let mut normalized = Vec::with_capacity(factors.len());
        for (site, factor) in factors.into_iter().enumerate() {
            if factor.len() != local_dim {
                return Err(Error::Shape(format!(
                    "factor {} has length {}, expected {local_dim}",
                    site + 1,
                    factor.len()
                )));
            }
            let norm = factor.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 || !norm.is_finite() {
                return Err(Error::DegenerateInput(format!("factor {} is zero", site + 1)));
            }
            normalized.push(factor.into_iter().map(|a| a / norm).collect());
        }
        Ok(ProductFactors { local_dim, factors: normalized })
    }

    /// The same single-site state on every one of `n_sites` sites.
    pub fn uniform(site_state: Vec<Complex64>, n_sites: usize) -> Result<Self> {
        Self::new(vec![site_state; n_sites])
    }

    pub fn n_sites(&self) -> usize {
        self.factors.len()
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn factors(&self) -> &[Vec<Complex64>] {
        &self.factors
    }

    pub fn factor(&self, site: usize) -> &[Complex64] {
        &self.factors[site]
    }
}

/// `amps[index(k1..kN)] = prod_n a_n^{k_n}`.
pub fn make_product_state(factors: &ProductFactors) -> Result<StateVector> {
    let local_dim = factors.local_dim();
    guarded_full_dim(factors.n_sites(), local_dim)?;
    let mut amps = vec![ONE];
    for factor in factors.factors() {
        amps = amps.iter().flat_map(|&prefix| factor.iter().map(move |&a| prefix * a)).collect();
    }
    StateVector::new(factors.n_sites(), local_dim, amps)
}

/// The K partial vectors `u_n^k` of `psi = sum_k |k>_n (x) u_n^k` for one site.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteDecomposition {
    /// 1-based site label.
    pub site: usize,
    /// `partials[k - 1]` is `u_n^k`, a vector over the remaining N-1 sites in order.
    pub partials: Vec<Vec<Complex64>>,
}

impl SiteDecomposition {
    /// `sum_k |k>_n (x) u_n^k` back in the full space.
    pub fn reassemble(&self, n_sites: usize) -> Result<StateVector> {
        let local_dim = self.partials.len();
        let (outer, stride) = site_strides(n_sites, local_dim, self.site)?;
        let mut amps = vec![ZERO; outer * local_dim * stride];
        for (k, partial) in self.partials.iter().enumerate() {
            if partial.len() != outer * stride {
                return Err(Error::Shape(format!(
                    "partial {} has length {}, expected {}",
                    k + 1,
                    partial.len(),
                    outer * stride
                )));
            }
            for hi in 0..outer {
                let src = &partial[hi * stride..(hi + 1) * stride];
                let dst = hi * local_dim * stride + k * stride;
                amps[dst..dst + stride].copy_from_slice(src);
            }
        }
        StateVector::new(n_sites, local_dim, amps)
    }

    pub fn partial_norms(&self) -> Vec<f64> {
        self.partials.iter().map(|u| u.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()).collect()
    }
}

/// (number of index blocks above the site, stride of the site digit).
fn site_strides(n_sites: usize, local_dim: usize, site: usize) -> Result<(usize, usize)> {
    if site == 0 || site > n_sites {
        return Err(Error::Index(format!("site {site} outside 1..={n_sites}")));
    }
    let outer = full_dim(site - 1, local_dim).ok_or_else(|| Error::Size("site stride overflows".into()))?;
    let stride = full_dim(n_sites - site, local_dim).ok_or_else(|| Error::Size("site stride overflows".into()))?;
    Ok((outer, stride))
}

pub fn site_decompose(psi: &StateVector, site: usize) -> Result<SiteDecomposition> {
    let k_dim = psi.local_dim;
    let (outer, stride) = site_strides(psi.n_sites, k_dim, site)?;
    let partials = (0..k_dim)
        .map(|k| {
            (0..outer)
                .flat_map(|hi| {
                    let base = hi * k_dim * stride + k * stride;
                    psi.amps[base..base + stride].iter().copied()
                })
                .collect()
        })
        .collect();
    Ok(SiteDecomposition { site, partials })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_index_examples() {
        assert_eq!(basis_index(&[1, 1], 2).unwrap(), 0);
        assert_eq!(basis_index(&[2, 1], 2).unwrap(), 2);
        // (1-1)*4 + (2-1)*2 + (2-1)*1
        assert_eq!(basis_index(&[1, 2, 2], 2).unwrap(), 3);
    }

    #[test]
    fn basis_index_rejects_bad_labels() {
        assert!(matches!(basis_index(&[0, 1], 2), Err(Error::Index(_))));
        assert!(matches!(basis_index(&[1, 3], 2), Err(Error::Index(_))));
    }

    #[test]
    fn basis_index_bijection_exhaustive() {
        for k in 2..=3 {
            for n in 1..=4 {
                let dim = full_dim(n, k).unwrap();
                for index in 0..dim {
                    let word = decode_index(index, n, k).unwrap();
                    assert_eq!(basis_index(&word, k).unwrap(), index);
                }
            }
        }
    }

    #[test]
    fn state_rejects_wrong_length() {
        assert!(matches!(StateVector::new(2, 2, vec![ZERO; 3]), Err(Error::Shape(_))));
        assert!(StateVector::new(2, 1, vec![ZERO; 1]).is_err());
    }

    #[test]
    fn product_of_basis_vectors() {
        let f = ProductFactors::new(vec![vec![ONE, ZERO], vec![ZERO, ONE]]).unwrap();
        let psi = make_product_state(&f).unwrap();
        assert_eq!(psi.amps(), &[ZERO, ONE, ZERO, ZERO]);
    }

    #[test]
    fn product_of_plus_states() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let f = ProductFactors::new(vec![vec![c(h, 0.0), c(h, 0.0)]; 2]).unwrap();
        let psi = make_product_state(&f).unwrap();
        for a in psi.amps() {
            assert!((a - c(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn product_single_site_identity() {
        let f = ProductFactors::new(vec![vec![ZERO, ONE, ZERO]]).unwrap();
        assert_eq!(make_product_state(&f).unwrap().amps(), &[ZERO, ONE, ZERO]);
    }

    #[test]
    fn zero_factor_rejected() {
        let err = ProductFactors::new(vec![vec![ONE, ZERO], vec![ZERO, ZERO]]);
        assert!(matches!(err, Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn inner_product_examples() {
        let a = StateVector::basis(&[1, 1], 2).unwrap();
        let b = StateVector::basis(&[1, 2], 2).unwrap();
        assert_eq!(inner_product(&a, &b).unwrap(), ZERO);
        assert_eq!(inner_product(&a, &a).unwrap(), ONE);
        // |122> + |212> + |221>
        let mut amps = vec![ZERO; 27];
        for w in [[1, 2, 2], [2, 1, 2], [2, 2, 1]] {
            amps[basis_index(&w, 3).unwrap()] = ONE;
        }
        let u = StateVector::new(3, 3, amps).unwrap();
        assert_eq!(inner_product(&u, &u).unwrap(), c(3.0, 0.0));
        let other = StateVector::basis(&[1, 1], 3).unwrap();
        assert!(matches!(inner_product(&u, &other), Err(Error::Shape(_))));
    }

    #[test]
    fn inner_product_is_conjugate_linear_in_first() {
        let a = StateVector::new(1, 2, vec![c(0.0, 1.0), ZERO]).unwrap();
        let b = StateVector::new(1, 2, vec![ONE, ZERO]).unwrap();
        assert_eq!(inner_product(&a, &b).unwrap(), c(0.0, -1.0));
    }

    #[test]
    fn site_decompose_examples() {
        let psi = StateVector::basis(&[1, 2], 2).unwrap();
        let d = site_decompose(&psi, 1).unwrap();
        assert_eq!(d.partials, vec![vec![ZERO, ONE], vec![ZERO, ZERO]]);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::new(2, 2, vec![c(h, 0.0), ZERO, ZERO, c(h, 0.0)]).unwrap();
        let d = site_decompose(&bell, 1).unwrap();
        assert_eq!(d.partials, vec![vec![c(h, 0.0), ZERO], vec![ZERO, c(h, 0.0)]]);
        let d2 = site_decompose(&bell, 2).unwrap();
        assert_eq!(d2.partials, vec![vec![c(h, 0.0), ZERO], vec![ZERO, c(h, 0.0)]]);

        assert!(matches!(site_decompose(&bell, 0), Err(Error::Index(_))));
        assert!(matches!(site_decompose(&bell, 3), Err(Error::Index(_))));
    }

    #[test]
    fn site_decompose_middle_site_layout() {
        // |1 2 1> over K=2: the middle digit is site 2.
        let psi = StateVector::basis(&[1, 2, 1], 2).unwrap();
        let d = site_decompose(&psi, 2).unwrap();
        // remaining word (1,1) -> index 0
        assert_eq!(d.partials[1][0], ONE);
        assert!(d.partials[0].iter().all(|a| *a == ZERO));
        assert_eq!(d.reassemble(3).unwrap(), psi);
    }

    #[test]
    fn normalize_examples() {
        let v = StateVector::new(2, 2, vec![c(2.0, 0.0), ZERO, ZERO, ZERO]).unwrap();
        assert_eq!(normalize(&v).unwrap().amps(), &[ONE, ZERO, ZERO, ZERO]);

        let zero = StateVector::zeros(2, 2).unwrap();
        assert!(matches!(normalize(&zero), Err(Error::DegenerateInput(_))));

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let unit = StateVector::new(1, 2, vec![c(h, 0.0), c(0.0, h)]).unwrap();
        assert!(normalize(&unit).unwrap().distance(&unit).unwrap() < 1e-14);
    }

    #[test]
    fn size_guard() {
        assert!(matches!(StateVector::zeros(21, 2), Err(Error::Size(_))));
        assert!(matches!(StateVector::zeros(20, 3), Err(Error::Size(_))));
        assert!(StateVector::zeros(20, 2).is_ok());
    }
}
