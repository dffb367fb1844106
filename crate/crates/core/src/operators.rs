//! Single-site operators and their collective sums `X~ = sum_n X^(n)`.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::{full_dim, StateVector};

/// Dense-matrix oracle limit on K^N.
pub const DENSE_LIMIT: usize = 4096;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A K x K complex matrix acting on one subsystem, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteOperator {
    local_dim: usize,
    matrix: Vec<Complex64>,
}

impl SiteOperator {
    pub fn new(local_dim: usize, matrix: Vec<Complex64>) -> Result<Self> {
        if local_dim < 2 {
            return Err(Error::InvalidParam("local_dim must be at least 2".into()));
        }
        if matrix.len() != local_dim * local_dim {
            return Err(Error::Shape(format!("{} entries for a {local_dim}x{local_dim} operator", matrix.len())));
        }
        Ok(SiteOperator { local_dim, matrix })
    }

    pub fn zero(local_dim: usize) -> Result<Self> {
        Self::new(local_dim, vec![ZERO; local_dim * local_dim])
    }

    pub fn identity(local_dim: usize) -> Result<Self> {
        let mut op = Self::zero(local_dim)?;
        for d in 0..local_dim {
            op.matrix[d * local_dim + d] = ONE;
        }
        Ok(op)
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    /// Row-major entries.
    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    /// Entry at 0-based `(row, col)`.
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row * self.local_dim + col]
    }

    pub fn adjoint(&self) -> SiteOperator {
        let k = self.local_dim;
        let mut matrix = vec![ZERO; k * k];
        for r in 0..k {
            for c in 0..k {
                matrix[c * k + r] = self.matrix[r * k + c].conj();
            }
        }
        SiteOperator { local_dim: k, matrix }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.local_dim).map(|d| self.entry(d, d)).sum()
    }

    pub fn scale(&self, factor: Complex64) -> SiteOperator {
        SiteOperator { local_dim: self.local_dim, matrix: self.matrix.iter().map(|a| a * factor).collect() }
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let k = self.local_dim;
        if v.len() != k {
            return Err(Error::Shape(format!("vector of length {} for a {k}x{k} operator", v.len())));
        }
        Ok((0..k).map(|r| (0..k).map(|c| self.matrix[r * k + c] * v[c]).sum()).collect())
    }

    pub fn to_dmatrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.local_dim, self.local_dim, &self.matrix)
    }

    fn zip_with(&self, rhs: &SiteOperator, f: impl Fn(Complex64, Complex64) -> Complex64) -> SiteOperator {
        assert_eq!(self.local_dim, rhs.local_dim, "operator dimension mismatch");
        SiteOperator {
            local_dim: self.local_dim,
            matrix: self.matrix.iter().zip(&rhs.matrix).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

impl Add for &SiteOperator {
    type Output = SiteOperator;
    fn add(self, rhs: &SiteOperator) -> SiteOperator {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &SiteOperator {
    type Output = SiteOperator;
    fn sub(self, rhs: &SiteOperator) -> SiteOperator {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &SiteOperator {
    type Output = SiteOperator;
    fn mul(self, rhs: &SiteOperator) -> SiteOperator {
        assert_eq!(self.local_dim, rhs.local_dim, "operator dimension mismatch");
        let k = self.local_dim;
        let mut matrix = vec![ZERO; k * k];
        for r in 0..k {
            for m in 0..k {
                let a = self.matrix[r * k + m];
                if a == ZERO {
                    continue;
                }
                for c in 0..k {
                    matrix[r * k + c] += a * rhs.matrix[m * k + c];
                }
            }
        }
        SiteOperator { local_dim: k, matrix }
    }
}

pub fn commutator(a: &SiteOperator, b: &SiteOperator) -> SiteOperator {
    &(a * b) - &(b * a)
}

fn check_pair(i: usize, j: usize, local_dim: usize) -> Result<()> {
    if i == 0 || j == 0 || i > local_dim || j > local_dim {
        return Err(Error::Index(format!("labels ({i}, {j}) outside 1..={local_dim}")));
    }
    if i == j {
        return Err(Error::Index(format!("ladder operators need i != j, got ({i}, {j})")));
    }
    Ok(())
}

/// `E_ij = |i><j|`, so `E_ij |k> = delta_kj |i>`. Labels in `1..=K`.
pub fn ladder(i: usize, j: usize, local_dim: usize) -> Result<SiteOperator> {
    check_pair(i, j, local_dim)?;
    let mut op = SiteOperator::zero(local_dim)?;
    op.matrix[(i - 1) * local_dim + (j - 1)] = ONE;
    Ok(op)
}

/// `H_ij = |i><i| - |j><j| = [E_ij, E_ij^dagger]`.
///
/// The eigenvalue law on Dicke states uses the family `H_{i1}`.
pub fn cartan(i: usize, j: usize, local_dim: usize) -> Result<SiteOperator> {
    check_pair(i, j, local_dim)?;
    let mut op = SiteOperator::zero(local_dim)?;
    op.matrix[(i - 1) * local_dim + (i - 1)] = ONE;
    op.matrix[(j - 1) * local_dim + (j - 1)] = -ONE;
    Ok(op)
}

/// `(sum_n X^(n)) psi`, streamed one site at a time in O(N K^2 K^(N-1)) without
/// building any full-space matrix.
pub fn collective_apply(op: &SiteOperator, psi: &StateVector) -> Result<StateVector> {
    let k = op.local_dim;
    if k != psi.local_dim() {
        return Err(Error::Shape(format!("operator acts on K={k}, state has K={}", psi.local_dim())));
    }
    let n_sites = psi.n_sites();
    let amps = psi.amps();
    let mut out = vec![ZERO; amps.len()];
    let nonzero: Vec<(usize, usize, Complex64)> = (0..k)
        .flat_map(|r| (0..k).map(move |c| (r, c)))
        .map(|(r, c)| (r, c, op.entry(r, c)))
        .filter(|&(_, _, x)| x != ZERO)
        .collect();

    let mut stride = 1usize;
    for _ in 0..n_sites {
        let block = stride * k;
        for base in (0..amps.len()).step_by(block) {
            for &(r, c, x) in &nonzero {
                let src = &amps[base + c * stride..base + (c + 1) * stride];
                let dst = &mut out[base + r * stride..base + (r + 1) * stride];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += x * s;
                }
            }
        }
        stride = block;
    }
    StateVector::new(n_sites, k, out)
}

/// Dense `sum_n 1 (x) ... (x) X (x) ... (x) 1`. Test and benchmark oracle only.
pub fn collective_dense(op: &SiteOperator, n_sites: usize) -> Result<DMatrix<Complex64>> {
    let k = op.local_dim;
    let dim = match full_dim(n_sites, k) {
        Some(d) if d <= DENSE_LIMIT => d,
        _ => {
            return Err(Error::Size(format!("dense collective operator needs K^N <= {DENSE_LIMIT}, got {k}^{n_sites}")))
        }
    };
    let x = op.to_dmatrix();
    let mut total = DMatrix::<Complex64>::zeros(dim, dim);
    for site in 0..n_sites {
        let mut term = DMatrix::<Complex64>::identity(1, 1);
        for other in 0..n_sites {
            let factor = if other == site { x.clone() } else { DMatrix::identity(k, k) };
            term = term.kronecker(&factor);
        }
        total += term;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::basis_index;

    #[test]
    fn ladder_action() {
        let e21 = ladder(2, 1, 2).unwrap();
        assert_eq!(e21.apply(&[ONE, ZERO]).unwrap(), vec![ZERO, ONE]);
        let e12 = ladder(1, 2, 2).unwrap();
        assert_eq!(e12.apply(&[ONE, ZERO]).unwrap(), vec![ZERO, ZERO]);
        let e31 = ladder(3, 1, 3).unwrap();
        let nonzero: Vec<_> =
            (0..3).flat_map(|r| (0..3).map(move |c| (r, c))).filter(|&(r, c)| e31.entry(r, c) != ZERO).collect();
        assert_eq!(nonzero, vec![(2, 0)]);
        assert_eq!(e31.entry(2, 0), ONE);
    }

    #[test]
    fn ladder_rejects_bad_labels() {
        assert!(matches!(ladder(1, 1, 3), Err(Error::Index(_))));
        assert!(matches!(ladder(4, 1, 3), Err(Error::Index(_))));
        assert!(matches!(cartan(2, 2, 3), Err(Error::Index(_))));
        assert!(matches!(cartan(0, 1, 3), Err(Error::Index(_))));
    }

    #[test]
    fn cartan_examples() {
        let h = cartan(2, 1, 2).unwrap();
        assert_eq!(h.matrix(), &[-ONE, ZERO, ZERO, ONE]);
        for k in 2..=4 {
            for i in 1..=k {
                for j in 1..=k {
                    if i != j {
                        assert_eq!(cartan(i, j, k).unwrap().trace(), ZERO);
                    }
                }
            }
        }
    }

    #[test]
    fn commutator_gives_cartan_3x3() {
        let e = ladder(2, 1, 3).unwrap();
        assert_eq!(commutator(&e, &e.adjoint()), cartan(2, 1, 3).unwrap());
    }

    fn word_state(words: &[&[usize]], k: usize) -> StateVector {
        let n = words[0].len();
        let mut amps = vec![ZERO; k.pow(n as u32)];
        for w in words {
            amps[basis_index(w, k).unwrap()] += ONE;
        }
        StateVector::new(n, k, amps).unwrap()
    }

    #[test]
    fn collective_raising_on_lowest_weight() {
        let psi = StateVector::basis(&[1, 1], 2).unwrap();
        let out = collective_apply(&ladder(2, 1, 2).unwrap(), &psi).unwrap();
        assert_eq!(out, word_state(&[&[2, 1], &[1, 2]], 2));
    }

    #[test]
    fn collective_lowering_annihilates_lowest_weight() {
        for k in 2..=4 {
            let psi = StateVector::basis(&[1; 4], k).unwrap();
            for i in 2..=k {
                let out = collective_apply(&ladder(1, i, k).unwrap(), &psi).unwrap();
                assert!(out.amps().iter().all(|a| *a == ZERO));
            }
        }
    }

    #[test]
    fn cartan_eigenvalue_on_balanced_dicke() {
        // |12> + |21> has n2 - n1 = 0
        let psi = word_state(&[&[1, 2], &[2, 1]], 2);
        let out = collective_apply(&cartan(2, 1, 2).unwrap(), &psi).unwrap();
        assert!(out.amps().iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn collective_apply_shape_mismatch() {
        let psi = StateVector::basis(&[1, 1], 3).unwrap();
        assert!(matches!(collective_apply(&ladder(2, 1, 2).unwrap(), &psi), Err(Error::Shape(_))));
    }

    #[test]
    fn dense_by_hand() {
        let m = collective_dense(&ladder(2, 1, 2).unwrap(), 2).unwrap();
        let i11 = basis_index(&[1, 1], 2).unwrap();
        let i21 = basis_index(&[2, 1], 2).unwrap();
        let i12 = basis_index(&[1, 2], 2).unwrap();
        let i22 = basis_index(&[2, 2], 2).unwrap();
        let ones = [(i21, i11), (i12, i11), (i22, i12), (i22, i21)];
        for r in 0..4 {
            for c in 0..4 {
                let expected = if ones.contains(&(r, c)) { ONE } else { ZERO };
                assert_eq!(m[(r, c)], expected, "entry ({r},{c})");
            }
        }
        let z = collective_dense(&SiteOperator::zero(3).unwrap(), 3).unwrap();
        assert!(z.iter().all(|a| *a == ZERO));
        assert!(matches!(collective_dense(&SiteOperator::zero(2).unwrap(), 13), Err(Error::Size(_))));
    }
}
