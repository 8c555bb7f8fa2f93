//! State vectors, sparse Hermitian operators and time evolution.

mod chebyshev;
mod evolution;
mod snapshot;
mod sparse;
mod state;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

pub use chebyshev::{bessel_sequence, chebyshev_evolve};
pub use evolution::{
    krylov_evolve, EvolutionEngine, EvolutionMethod, Propagator, SpectralDecomposition,
    DEFAULT_EXACT_DIM_LIMIT,
};
pub use snapshot::{OperatorSnapshot, StateSnapshot};
pub use sparse::{SparseHermitian, DROP_TOLERANCE};
pub use state::{StateVector, NORM_TOLERANCE};

pub(crate) use state::{inner, norm};

use crate::error::{Error, Result};

/// Imaginary residue of ⟨ψ|H|ψ⟩ tolerated before the operator is declared broken.
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;

/// A Hermitian linear map known only through its action on vectors.
///
/// Krylov evolution needs nothing else; the dense fallback used by exact
/// diagonalization is built column by column unless overridden.
pub trait HermitianOp: Sync {
    fn dim(&self) -> usize;

    /// y = H x. Both slices have length `dim()`.
    fn apply_into(&self, x: &[C64], y: &mut [C64]);

    /// True when every matrix element is real.
    fn is_real(&self) -> bool {
        false
    }

    /// y = H x for a real operator and real x. The default goes through
    /// [`Self::apply_into`]; callers must check [`Self::is_real`] first.
    fn apply_real_into(&self, x: &[f64], y: &mut [f64]) {
        let xc: Vec<C64> = x.iter().map(|&a| C64::new(a, 0.0)).collect();
        let mut yc = vec![C64::new(0.0, 0.0); x.len()];
        self.apply_into(&xc, &mut yc);
        y.iter_mut().zip(&yc).for_each(|(yi, a)| *yi = a.re);
    }

    /// An interval containing the whole spectrum, when one is cheap to get.
    fn spectral_bounds(&self) -> Option<(f64, f64)> {
        None
    }

    fn to_dense(&self) -> DMatrix<C64> {
        let n = self.dim();
        let mut m = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        let mut e = vec![C64::new(0.0, 0.0); n];
        let mut col = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            e[j] = C64::new(1.0, 0.0);
            self.apply_into(&e, &mut col);
            for i in 0..n {
                m[(i, j)] = col[i];
            }
            e[j] = C64::new(0.0, 0.0);
        }
        m
    }
}

impl HermitianOp for SparseHermitian {
    fn dim(&self) -> usize {
        SparseHermitian::dim(self)
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        self.matvec_into(x, y)
    }

    fn is_real(&self) -> bool {
        SparseHermitian::is_real(self)
    }

    fn apply_real_into(&self, x: &[f64], y: &mut [f64]) {
        self.real_matvec_into(x, y)
    }

    fn spectral_bounds(&self) -> Option<(f64, f64)> {
        Some(self.gershgorin_bounds())
    }

    fn to_dense(&self) -> DMatrix<C64> {
        SparseHermitian::to_dense(self)
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Unnormalized product `op · ψ`.
pub fn apply<O: HermitianOp + ?Sized>(op: &O, psi: &StateVector) -> Result<Vec<C64>> {
    check_dim(op.dim(), psi.dim())?;
    let mut out = vec![C64::new(0.0, 0.0); psi.dim()];
    op.apply_into(psi.amplitudes(), &mut out);
    Ok(out)
}

/// ⟨ψ|op|ψ⟩, asserting that the imaginary residue is negligible.
pub fn expectation<O: HermitianOp + ?Sized>(op: &O, psi: &StateVector) -> Result<f64> {
    let h_psi = apply(op, psi)?;
    let value = inner(psi.amplitudes(), &h_psi);
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::NonFinite("expectation"));
    }
    if value.im.abs() > IMAGINARY_TOLERANCE * value.re.abs().max(1.0) {
        return Err(Error::ImaginaryExpectation { imag: value.im });
    }
    Ok(value.re)
}

/// exp(−iHt)ψ with `t` in units of 1/Δ.
pub fn evolve<O: HermitianOp + ?Sized>(
    h: &O,
    psi: &StateVector,
    t: f64,
    engine: &EvolutionEngine,
) -> Result<StateVector> {
    engine.evolve(h, psi, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Skewed;

    impl HermitianOp for Skewed {
        fn dim(&self) -> usize {
            2
        }
        fn apply_into(&self, x: &[C64], y: &mut [C64]) {
            // [[0, 1], [0, 0]], deliberately not Hermitian.
            y[0] = x[1];
            y[1] = C64::new(0.0, 0.0);
        }
    }

    #[test]
    fn apply_identity_and_pauli_x() {
        let id = SparseHermitian::identity(3).unwrap();
        let psi = StateVector::from_amplitudes(vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 2.0),
            C64::new(-1.0, 1.0),
        ])
        .unwrap();
        assert_eq!(apply(&id, &psi).unwrap(), psi.amplitudes());

        let zero = StateVector::basis(2, 0).unwrap();
        let flipped = apply(&SparseHermitian::pauli_x(), &zero).unwrap();
        assert_eq!(flipped, vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
    }

    #[test]
    fn apply_checks_dimensions() {
        let psi = StateVector::basis(3, 0).unwrap();
        assert!(matches!(
            apply(&SparseHermitian::pauli_x(), &psi),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn diagonal_action_and_expectation() {
        let energies = [0.0, 1.0, 3.0, 2.0];
        let hp = SparseHermitian::from_real_diagonal(&energies).unwrap();
        for (z, &e) in energies.iter().enumerate() {
            let psi = StateVector::basis(4, z).unwrap();
            let out = apply(&hp, &psi).unwrap();
            assert_eq!(out[z], C64::new(e, 0.0));
            assert_eq!(expectation(&hp, &psi).unwrap(), e);
        }
        let half = StateVector::from_amplitudes(vec![
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ])
        .unwrap();
        assert!((expectation(&hp, &half).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn expectation_flags_non_hermitian() {
        let psi = StateVector::from_amplitudes(vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
        assert!(matches!(
            expectation(&Skewed, &psi),
            Err(Error::ImaginaryExpectation { .. })
        ));
    }
}
