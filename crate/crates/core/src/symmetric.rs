//! The permutation-symmetric subspace S of the N-quKit space.
//!
//! S is spanned by Dicke states labelled by occupations `(n_1, ..., n_K)` with
//! `sum n_k = N`. Two coefficient conventions appear throughout:
//!
//! * **unnormalized**: coefficients `C_n` multiply the 0/1 word sums
//!   `|N; n> = sum of all distinct permutations of 1^{n_1} 2^{n_2} ... K^{n_K}`,
//!   whose squared norm is the multinomial `N! / (n_1! ... n_K!)`.
//! * **orthonormal**: coefficients multiply the unit-norm Dicke states; they
//!   equal `C_n * sqrt(N! / prod n_k!)`.
//!
//! [`SymStateCompressed`] always stores the unnormalized convention.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::{collective_apply, ladder, SiteOperator};
use crate::tensor::{guarded_full_dim, StateVector};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Exact binomial coefficient; panics on u128 overflow.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc.checked_mul(u128::from(n - i)).expect("binomial overflow") / u128::from(i + 1);
    }
    acc
}

/// `N! / (n_1! ... n_K!)`, exact.
pub fn multinomial(counts: &[usize]) -> u128 {
    let mut total = 0u64;
    let mut acc = 1u128;
    for &c in counts {
        total += c as u64;
        acc = acc.checked_mul(binomial(total, c as u64)).expect("multinomial overflow");
    }
    acc
}

/// `binom(N + K - 1, N)`.
pub fn symmetric_dim(n_sites: usize, local_dim: usize) -> u128 {
    if local_dim == 0 {
        return 0;
    }
    binomial((n_sites + local_dim - 1) as u64, n_sites as u64)
}

/// Letter counts `(n_1, ..., n_K)` of a basis word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occupation(Vec<usize>);

impl Occupation {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.len() < 2 {
            return Err(Error::InvalidParam(format!("occupation needs K >= 2 entries, got {}", counts.len())));
        }
        Ok(Occupation(counts))
    }

    /// Counts the labels (in `1..=K`) of a word.
    pub fn from_word(word: &[usize], local_dim: usize) -> Result<Self> {
        let mut counts = vec![0; local_dim];
        for &label in word {
            if label == 0 || label > local_dim {
                return Err(Error::Index(format!("label {label} outside 1..={local_dim}")));
            }
            counts[label - 1] += 1;
        }
        Self::new(counts)
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn n_sites(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn local_dim(&self) -> usize {
        self.0.len()
    }

    /// Squared norm of the unnormalized Dicke state.
    pub fn multiplicity(&self) -> u128 {
        multinomial(&self.0)
    }

    /// The sorted word `1^{n_1} 2^{n_2} ... K^{n_K}` with labels in `1..=K`.
    pub fn sorted_word(&self) -> Vec<usize> {
        self.0.iter().enumerate().flat_map(|(k, &c)| std::iter::repeat_n(k + 1, c)).collect()
    }

    /// The occupation with labels `a` and `b` (1-based) exchanged.
    pub fn swap_labels(&self, a: usize, b: usize) -> Occupation {
        let mut counts = self.0.clone();
        counts.swap(a - 1, b - 1);
        Occupation(counts)
    }

    /// `N * e_label`.
    pub fn extremal(n_sites: usize, local_dim: usize, label: usize) -> Result<Self> {
        if label == 0 || label > local_dim {
            return Err(Error::Index(format!("label {label} outside 1..={local_dim}")));
        }
        let mut counts = vec![0; local_dim];
        counts[label - 1] = n_sites;
        Self::new(counts)
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for Occupation {
    type Err = Error;

    /// Comma-separated counts, e.g. `1,2,0`.
    fn from_str(s: &str) -> Result<Self> {
        let counts = s
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::InvalidParam(format!("bad occupation entry {part:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Occupation::new(counts)
    }
}

/// All occupations of N sites over K labels, lexicographically decreasing,
/// so the first entry is `(N, 0, ..., 0)`.
pub fn enumerate_occupations(n_sites: usize, local_dim: usize) -> Vec<Occupation> {
    fn fill(remaining: usize, pos: usize, current: &mut Vec<usize>, out: &mut Vec<Occupation>) {
        if pos + 1 == current.len() {
            current[pos] = remaining;
            out.push(Occupation(current.clone()));
            return;
        }
        for v in (0..=remaining).rev() {
            current[pos] = v;
            fill(remaining - v, pos + 1, current, out);
        }
    }
    let mut out = Vec::new();
    if local_dim == 0 {
        return out;
    }
    let mut current = vec![0; local_dim];
    fill(n_sites, 0, &mut current, &mut out);
    out
}

/// Canonical enumeration of the occupations for fixed (N, K) with O(K) ranking.
#[derive(Clone, Debug)]
pub struct SymmetricBasis {
    n_sites: usize,
    local_dim: usize,
    occupations: Vec<Occupation>,
    // compositions[s][q]: ways to write s as an ordered sum of q nonnegative parts
    compositions: Vec<Vec<usize>>,
}

impl SymmetricBasis {
    pub fn new(n_sites: usize, local_dim: usize) -> Result<Self> {
        if n_sites == 0 || local_dim < 2 {
            return Err(Error::InvalidParam(format!(
                "symmetric basis needs N >= 1 and K >= 2, got N={n_sites}, K={local_dim}"
            )));
        }
        let compositions = (0..=n_sites)
            .map(|s| {
                (0..=local_dim)
                    .map(|q| match q {
                        0 => usize::from(s == 0),
                        _ => binomial((s + q - 1) as u64, (q - 1) as u64) as usize,
                    })
                    .collect()
            })
            .collect();
        Ok(SymmetricBasis { n_sites, local_dim, occupations: enumerate_occupations(n_sites, local_dim), compositions })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn dim(&self) -> usize {
        self.occupations.len()
    }

    pub fn occupations(&self) -> &[Occupation] {
        &self.occupations
    }

    /// Position of an occupation (as raw counts) in canonical order.
    pub fn rank(&self, counts: &[usize]) -> Option<usize> {
        if counts.len() != self.local_dim || counts.iter().sum::<usize>() != self.n_sites {
            return None;
        }
        let mut rank = 0;
        let mut remaining = self.n_sites;
        for (pos, &c) in counts[..self.local_dim - 1].iter().enumerate() {
            let parts_after = self.local_dim - pos - 1;
            for v in c + 1..=remaining {
                rank += self.compositions[remaining - v][parts_after];
            }
            remaining -= c;
        }
        Some(rank)
    }

    pub fn index_of(&self, occ: &Occupation) -> Option<usize> {
        self.rank(occ.counts())
    }

    /// `sqrt(N! / prod n_k!)` per basis entry.
    pub fn sqrt_multiplicities(&self) -> Vec<f64> {
        self.occupations.iter().map(|o| (o.multiplicity() as f64).sqrt()).collect()
    }
}

/// Lexicographic enumeration of the distinct permutations of a multiset word.
///
/// Each distinct arrangement is produced exactly once, so no N! sum with
/// duplicates is ever formed.
#[derive(Clone, Debug)]
pub struct MultisetPermutations {
    word: Vec<usize>,
    done: bool,
}

impl MultisetPermutations {
    pub fn new(mut word: Vec<usize>) -> Self {
        word.sort_unstable();
        MultisetPermutations { word, done: false }
    }
}

impl Iterator for MultisetPermutations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let current = self.word.clone();
        let w = &mut self.word;
        match (1..w.len()).rev().find(|&i| w[i - 1] < w[i]) {
            Some(i) => {
                let pivot = i - 1;
                let succ = (i..w.len()).rev().find(|&j| w[j] > w[pivot]).expect("successor exists");
                w.swap(pivot, succ);
                w[i..].reverse();
            }
            None => self.done = true,
        }
        Some(current)
    }
}

/// Flat index of a 0-based digit word, site 1 most significant.
fn digits_index(digits: &[usize], local_dim: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * local_dim + d)
}

/// `|N; n>`: the sum of all distinct permutations of the sorted word, with
/// 0/1 amplitudes and squared norm `N! / prod n_k!`.
pub fn dicke_unnormalized(occ: &Occupation) -> Result<StateVector> {
    let k = occ.local_dim();
    let mut amps = StateVector::zeros(occ.n_sites(), k)?.into_amps();
    let digits: Vec<usize> = occ.sorted_word().into_iter().map(|l| l - 1).collect();
    for perm in MultisetPermutations::new(digits) {
        amps[digits_index(&perm, k)] = ONE;
    }
    StateVector::new(occ.n_sites(), k, amps)
}

/// The unit-norm Dicke state, `dicke_unnormalized * (prod n_k! / N!)^{1/2}`.
pub fn dicke_normalized(occ: &Occupation) -> Result<StateVector> {
    let scale = 1.0 / (occ.multiplicity() as f64).sqrt();
    Ok(dicke_unnormalized(occ)?.scaled(Complex64::new(scale, 0.0)))
}

/// Builds the unit-norm Dicke state by raising the lowest-weight state
/// `|1,...,1>` with collective operators `E~_{k,1}^{n_k}` for k = 2..K.
///
/// Each raising pass reaches every target word `n_k!` ways, so the prefactor
/// is `(n_2! ... n_K!)^{-1} (N! / prod n_k!)^{-1/2}`.
pub fn dicke_via_ladders(occ: &Occupation) -> Result<StateVector> {
    let n = occ.n_sites();
    let k = occ.local_dim();
    guarded_full_dim(n, k)?;
    let mut state = StateVector::basis(&vec![1; n], k)?;
    let mut raised_factorials = 1.0f64;
    for label in 2..=k {
        let count = occ.counts()[label - 1];
        if count == 0 {
            continue;
        }
        let raise = ladder(label, 1, k)?;
        for step in 1..=count {
            state = collective_apply(&raise, &state)?;
            raised_factorials *= step as f64;
        }
    }
    let scale = 1.0 / (raised_factorials * (occ.multiplicity() as f64).sqrt());
    Ok(state.scaled(Complex64::new(scale, 0.0)))
}

/// A symmetric state in the compressed `binom(N+K-1, N)`-dimensional form.
///
/// Coefficients are in the **unnormalized** convention: the represented state
/// is `sum_n C_n |N; n>` where `|N; n>` is a 0/1 word sum. Multiply by
/// `sqrt(N! / prod n_k!)` to obtain orthonormal-basis coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SymStateCompressed {
    n_sites: usize,
    local_dim: usize,
    coeffs: Vec<Complex64>,
}

impl SymStateCompressed {
    /// `coeffs` in canonical occupation order, unnormalized convention.
    pub fn new(n_sites: usize, local_dim: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if n_sites == 0 || local_dim < 2 {
            return Err(Error::InvalidParam(format!(
                "compressed state needs N >= 1 and K >= 2, got N={n_sites}, K={local_dim}"
            )));
        }
        let expected = symmetric_dim(n_sites, local_dim);
        if coeffs.len() as u128 != expected {
            return Err(Error::Shape(format!(
                "expected {expected} coefficients for N={n_sites}, K={local_dim}, got {}",
                coeffs.len()
            )));
        }
        Ok(SymStateCompressed { n_sites, local_dim, coeffs })
    }

    pub fn zeros(n_sites: usize, local_dim: usize) -> Result<Self> {
        let dim = usize::try_from(symmetric_dim(n_sites, local_dim))
            .map_err(|_| Error::Size("symmetric dimension overflows usize".into()))?;
        Self::new(n_sites, local_dim, vec![ZERO; dim])
    }

    /// From orthonormal-basis coefficients in canonical order.
    pub fn from_orthonormal(n_sites: usize, local_dim: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        let basis = SymmetricBasis::new(n_sites, local_dim)?;
        if coeffs.len() != basis.dim() {
            return Err(Error::Shape(format!("expected {} coefficients, got {}", basis.dim(), coeffs.len())));
        }
        let coeffs = coeffs.into_iter().zip(basis.sqrt_multiplicities()).map(|(c, s)| c / s).collect();
        Self::new(n_sites, local_dim, coeffs)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// Unnormalized-convention coefficients in canonical order.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn basis(&self) -> SymmetricBasis {
        SymmetricBasis::new(self.n_sites, self.local_dim).expect("shape validated at construction")
    }

    /// Coefficient of one occupation, zero if it does not belong to this (N, K).
    pub fn coeff(&self, occ: &Occupation) -> Complex64 {
        self.basis().index_of(occ).map_or(ZERO, |i| self.coeffs[i])
    }

    pub fn set_coeff(&mut self, occ: &Occupation, value: Complex64) -> Result<()> {
        let i = self
            .basis()
            .index_of(occ)
            .ok_or_else(|| Error::Index(format!("occupation {occ} not in N={}, K={}", self.n_sites, self.local_dim)))?;
        self.coeffs[i] = value;
        Ok(())
    }

    /// Orthonormal-basis coefficients.
    pub fn to_orthonormal(&self) -> Vec<Complex64> {
        self.coeffs.iter().zip(self.basis().sqrt_multiplicities()).map(|(c, s)| c * s).collect()
    }

    /// `sum |C_n|^2 N! / prod n_k!`.
    pub fn norm_sqr(&self) -> f64 {
        self.to_orthonormal().iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    pub fn normalize(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::DegenerateInput(format!("cannot normalize a compressed state of norm {norm}")));
        }
        Ok(self.scaled(Complex64::new(1.0 / norm, 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        SymStateCompressed {
            n_sites: self.n_sites,
            local_dim: self.local_dim,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Applies a permutation of basis labels: label `k` becomes `relabel[k-1]`.
    pub fn relabeled(&self, relabel: &[usize]) -> Result<Self> {
        let k = self.local_dim;
        let mut seen = vec![false; k];
        if relabel.len() != k
            || !relabel.iter().all(|&l| l >= 1 && l <= k && !std::mem::replace(&mut seen[l - 1], true))
        {
            return Err(Error::InvalidParam(format!("{relabel:?} is not a permutation of 1..={k}")));
        }
        let basis = self.basis();
        let mut out = vec![ZERO; self.coeffs.len()];
        for (occ, &c) in basis.occupations().iter().zip(&self.coeffs) {
            let mut counts = vec![0; k];
            for (from, &count) in occ.counts().iter().enumerate() {
                counts[relabel[from] - 1] = count;
            }
            out[basis.rank(&counts).expect("relabel preserves N")] = c;
        }
        Self::new(self.n_sites, k, out)
    }

    /// Inner product in S, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.n_sites != other.n_sites || self.local_dim != other.local_dim {
            return Err(Error::Shape("compressed states of different (N, K)".into()));
        }
        let basis = self.basis();
        Ok(basis
            .occupations()
            .iter()
            .zip(self.coeffs.iter().zip(&other.coeffs))
            .map(|(occ, (a, b))| a.conj() * b * occ.multiplicity() as f64)
            .sum())
    }
}

/// Occupation rank of every product-basis index, computed with an odometer.
fn word_ranks(basis: &SymmetricBasis, dim: usize) -> Vec<usize> {
    let n = basis.n_sites();
    let k = basis.local_dim();
    let mut digits = vec![0usize; n];
    let mut counts = vec![0usize; k];
    counts[0] = n;
    let mut ranks = Vec::with_capacity(dim);
    for _ in 0..dim {
        ranks.push(basis.rank(&counts).expect("counts sum to N"));
        for pos in (0..n).rev() {
            counts[digits[pos]] -= 1;
            digits[pos] += 1;
            if digits[pos] < k {
                counts[digits[pos]] += 1;
                break;
            }
            digits[pos] = 0;
            counts[0] += 1;
        }
    }
    ranks
}

/// Orthogonal projection onto S.
///
/// Returns the projected state (unnormalized convention) and
/// `||psi - P_S psi||`. The projector is the sum of Dicke dyads, evaluated by
/// bucketing amplitudes by occupation: `C_n = <N; n|psi> / (N! / prod n_k!)`.
pub fn project_symmetric(psi: &StateVector) -> Result<(SymStateCompressed, f64)> {
    let basis = SymmetricBasis::new(psi.n_sites(), psi.local_dim())?;
    let ranks = word_ranks(&basis, psi.dim());
    let mut sums = vec![ZERO; basis.dim()];
    for (&r, a) in ranks.iter().zip(psi.amps()) {
        sums[r] += a;
    }
    let coeffs: Vec<Complex64> =
        sums.iter().zip(basis.occupations()).map(|(s, occ)| s / occ.multiplicity() as f64).collect();
    let residual = ranks.iter().zip(psi.amps()).map(|(&r, a)| (a - coeffs[r]).norm_sqr()).sum::<f64>().sqrt();
    Ok((SymStateCompressed::new(psi.n_sites(), psi.local_dim(), coeffs)?, residual))
}

/// `sum_n C_n |N; n>` in the full space. Subject to the full-space guard.
pub fn expand(sym: &SymStateCompressed) -> Result<StateVector> {
    let dim = guarded_full_dim(sym.n_sites, sym.local_dim)?;
    let basis = sym.basis();
    let amps = word_ranks(&basis, dim).into_iter().map(|r| sym.coeffs[r]).collect();
    StateVector::new(sym.n_sites, sym.local_dim, amps)
}

/// Children `(k, n - e_k)` of an occupation for every label k with `n_k > 0`.
///
/// For every site, `|N; n> = sum_k |k>_site (x) |N-1; n - e_k>`; children with
/// a negative entry contribute zero and are omitted.
pub fn recursion_split(occ: &Occupation) -> Vec<(usize, Occupation)> {
    occ.counts()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(k, _)| {
            let mut counts = occ.counts().to_vec();
            counts[k] -= 1;
            (k + 1, Occupation(counts))
        })
        .collect()
}

fn check_operator(op: &SiteOperator, local_dim: usize) -> Result<()> {
    if op.local_dim() != local_dim {
        return Err(Error::Shape(format!("operator acts on K={}, state has K={local_dim}", op.local_dim())));
    }
    Ok(())
}

/// `X~` applied directly to compressed coefficients.
///
/// `E~_ab |N; n> = m_a |N; m>` with `m = n - e_b + e_a`, which also covers
/// `a = b` as the number operator. Cost O(dim S * K^2).
pub fn collective_apply_compressed(op: &SiteOperator, sym: &SymStateCompressed) -> Result<SymStateCompressed> {
    let k = sym.local_dim;
    check_operator(op, k)?;
    let basis = sym.basis();
    let mut out = vec![ZERO; basis.dim()];
    let mut target = vec![0usize; k];
    for (occ, &c) in basis.occupations().iter().zip(&sym.coeffs) {
        if c == ZERO {
            continue;
        }
        let counts = occ.counts();
        for b in (0..k).filter(|&b| counts[b] > 0) {
            for a in 0..k {
                let x = op.entry(a, b);
                if x == ZERO {
                    continue;
                }
                target.copy_from_slice(counts);
                target[b] -= 1;
                target[a] += 1;
                let r = basis.rank(&target).expect("shifted occupation stays in the basis");
                out[r] += x * c * target[a] as f64;
            }
        }
    }
    SymStateCompressed::new(sym.n_sites, k, out)
}

/// Matrix of `X~` restricted to S in the orthonormal Dicke basis.
///
/// Entry `[m, n]` for `m = n - e_b + e_a` is `x_ab sqrt(m_a n_b)` (`x_aa n_a`
/// on the diagonal). The square-root argument is an integer product that is
/// symmetric under `(m, n, a, b) -> (n, m, b, a)`, so `(X^dagger)~` is the
/// exact conjugate transpose of `X~`.
pub fn collective_matrix(op: &SiteOperator, n_sites: usize) -> Result<DMatrix<Complex64>> {
    let k = op.local_dim();
    let basis = SymmetricBasis::new(n_sites, k)?;
    let dim = basis.dim();
    let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
    let mut target = vec![0usize; k];
    for (col, occ) in basis.occupations().iter().enumerate() {
        let counts = occ.counts();
        for b in (0..k).filter(|&b| counts[b] > 0) {
            for a in 0..k {
                let x = op.entry(a, b);
                if x == ZERO {
                    continue;
                }
                target.copy_from_slice(counts);
                target[b] -= 1;
                target[a] += 1;
                let row = basis.rank(&target).expect("shifted occupation stays in the basis");
                let weight =
                    if a == b { counts[a] as f64 } else { ((target[a] as u64 * counts[b] as u64) as f64).sqrt() };
                matrix[(row, col)] += x * weight;
            }
        }
    }
    Ok(matrix)
}
