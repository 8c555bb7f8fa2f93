//! Compressed sparse row storage for Hermitian operators.
//!
//! Every Hamiltonian in the crate is held as a [`SparseHermitian`]. Entries are
//! in units of the energy quantum Δ. Construction goes through triplets, which
//! are summed, pruned below [`DROP_TOLERANCE`] and checked for Hermiticity.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Entries with modulus at or below this are not stored.
pub const DROP_TOLERANCE: f64 = 1e-14;

/// Relative mismatch allowed between `H[i][j]` and `conj(H[j][i])`.
const HERMITIAN_TOLERANCE: f64 = 1e-13;

/// Hermitian matrix in CSR layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHermitian {
    dim: usize,
    row_offsets: Vec<usize>,
    columns: Vec<u32>,
    values: Vec<C64>,
}

impl SparseHermitian {
    /// Builds from `(row, col, value)` triplets. Duplicates are summed.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, C64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("operator dimension must be positive"));
        }
        if dim > u32::MAX as usize {
            return Err(Error::DimensionCap {
                dim,
                cap: u32::MAX as usize,
            });
        }
        for &(r, c, v) in &triplets {
            if r >= dim {
                return Err(Error::OutOfRange { index: r, dim });
            }
            if c >= dim {
                return Err(Error::OutOfRange { index: c, dim });
            }
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite("operator assembly"));
            }
        }
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));

        let mut row_offsets = vec![0usize; dim + 1];
        let mut columns = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        let mut iter = triplets.into_iter().peekable();
        while let Some((r, c, mut v)) = iter.next() {
            while let Some(&(r2, c2, v2)) = iter.peek() {
                if r2 == r && c2 == c {
                    v += v2;
                    iter.next();
                } else {
                    break;
                }
            }
            if v.norm() > DROP_TOLERANCE {
                columns.push(c as u32);
                values.push(v);
                row_offsets[r + 1] += 1;
            }
        }
        for i in 0..dim {
            row_offsets[i + 1] += row_offsets[i];
        }
        let op = SparseHermitian {
            dim,
            row_offsets,
            columns,
            values,
        };
        op.check_hermitian()?;
        Ok(op)
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::from_triplets(dim, Vec::new())
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_real_diagonal(&vec![1.0; dim])
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let triplets = diag
            .iter()
            .enumerate()
            .map(|(i, &d)| (i, i, C64::new(d, 0.0)))
            .collect();
        Self::from_triplets(diag.len(), triplets)
    }

    /// Pauli X on a single qubit.
    pub fn pauli_x() -> Self {
        let one = C64::new(1.0, 0.0);
        Self::from_triplets(2, vec![(0, 1, one), (1, 0, one)]).expect("valid Pauli X")
    }

    /// Dense Hermitian matrix, e.g. from a hand-built reference.
    pub fn from_dense(m: &DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let mut triplets = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if v.norm() > DROP_TOLERANCE {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(m.nrows(), triplets)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Stored `(column, value)` pairs of one row.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_offsets[i]..self.row_offsets[i + 1];
        self.columns[span.clone()]
            .iter()
            .zip(&self.values[span])
            .map(|(&c, &v)| (c as usize, v))
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let span = self.row_offsets[i]..self.row_offsets[i + 1];
        match self.columns[span.clone()].binary_search(&(j as u32)) {
            Ok(k) => self.values[span.start + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        self.triplets().all(|(i, j, _)| i == j)
    }

    /// True when no stored entry has an imaginary part.
    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    /// Verifies that every stored entry has its conjugate partner.
    pub fn check_hermitian(&self) -> Result<()> {
        for (i, j, v) in self.triplets() {
            let w = self.get(j, i).conj();
            if (v - w).norm() > HERMITIAN_TOLERANCE * v.norm().max(1.0) {
                return Err(Error::NotHermitian { row: i, col: j });
            }
        }
        Ok(())
    }

    /// y = H x
    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for (i, yi) in y.iter_mut().enumerate() {
            let span = self.row_offsets[i]..self.row_offsets[i + 1];
            let mut acc = C64::new(0.0, 0.0);
            for (&c, &v) in self.columns[span.clone()].iter().zip(&self.values[span]) {
                acc += v * x[c as usize];
            }
            *yi = acc;
        }
    }

    /// y = Re(H) x for real x; equals H x when the matrix is real.
    pub fn real_matvec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for (i, yi) in y.iter_mut().enumerate() {
            let span = self.row_offsets[i]..self.row_offsets[i + 1];
            let mut acc = 0.0;
            for (&c, v) in self.columns[span.clone()].iter().zip(&self.values[span]) {
                acc += v.re * x[c as usize];
            }
            *yi = acc;
        }
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let triplets = self.triplets().map(|(i, j, v)| (i, j, v * factor)).collect();
        Self::from_triplets(self.dim, triplets)
    }

    /// self + other
    pub fn add(&self, other: &SparseHermitian) -> Result<Self> {
        self.check_same_dim(other)?;
        let triplets = self.triplets().chain(other.triplets()).collect();
        Self::from_triplets(self.dim, triplets)
    }

    /// Tensor product `self ⊗ other`; `self` indexes the major position.
    pub fn kron(&self, other: &SparseHermitian) -> Result<Self> {
        let dim = self
            .dim
            .checked_mul(other.dim)
            .ok_or_else(|| Error::invalid("tensor product dimension overflow"))?;
        let mut triplets = Vec::with_capacity(self.nnz() * other.nnz());
        for (i, j, a) in self.triplets() {
            for (k, l, b) in other.triplets() {
                triplets.push((i * other.dim + k, j * other.dim + l, a * b));
            }
        }
        Self::from_triplets(dim, triplets)
    }

    /// Frobenius norm of the commutator `[self, other]`.
    pub fn commutator_frobenius(&self, other: &SparseHermitian) -> Result<f64> {
        self.check_same_dim(other)?;
        let ab = self.product_rows(other);
        let ba = other.product_rows(self);
        let mut total = 0.0;
        for i in 0..self.dim {
            let mut row: HashMap<usize, C64> = ab[i].clone();
            for (&j, &v) in &ba[i] {
                *row.entry(j).or_insert(C64::new(0.0, 0.0)) -= v;
            }
            total += row.values().map(|v| v.norm_sqr()).sum::<f64>();
        }
        Ok(total.sqrt())
    }

    fn product_rows(&self, other: &SparseHermitian) -> Vec<HashMap<usize, C64>> {
        (0..self.dim)
            .map(|i| {
                let mut acc: HashMap<usize, C64> = HashMap::new();
                for (k, a) in self.row(i) {
                    for (j, b) in other.row(k) {
                        *acc.entry(j).or_insert(C64::new(0.0, 0.0)) += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::from_element(self.dim, self.dim, C64::new(0.0, 0.0));
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        m
    }

    /// Bounds on the spectrum from Gershgorin discs.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.dim {
            let mut center = 0.0;
            let mut radius = 0.0;
            for (j, v) in self.row(i) {
                if i == j {
                    center = v.re;
                } else {
                    radius += v.norm();
                }
            }
            lo = lo.min(center - radius);
            hi = hi.max(center + radius);
        }
        (lo, hi)
    }

    fn check_same_dim(&self, other: &SparseHermitian) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}
