//! exp(−iHt)|ψ⟩ by dense diagonalization, a Lanczos Krylov projection, or a
//! Chebyshev series.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{chebyshev_evolve, inner, norm, HermitianOp, StateVector};
use crate::error::{Error, Result};

/// Largest dimension handled by dense diagonalization under [`EvolutionMethod::Auto`].
pub const DEFAULT_EXACT_DIM_LIMIT: usize = 2048;

/// Relative size of a Lanczos coefficient treated as an invariant subspace.
const BREAKDOWN_TOLERANCE: f64 = 1e-13;

/// Number of halvings allowed before a Krylov step is declared stuck.
const MAX_STEP_HALVINGS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvolutionMethod {
    /// Full eigendecomposition of the dense matrix.
    Exact,
    /// Lanczos projection with adaptive step subdivision.
    Krylov,
    /// Chebyshev series; needs spectral bounds, cost grows linearly with t.
    Chebyshev,
    /// Exact up to `exact_dim_limit`, Krylov above.
    Auto,
}

/// Numerical policy for time evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionEngine {
    pub method: EvolutionMethod,
    /// Target 2-norm error of the evolved state.
    pub tolerance: f64,
    pub max_subspace_dim: usize,
    pub exact_dim_limit: usize,
}

impl Default for EvolutionEngine {
    fn default() -> Self {
        EvolutionEngine {
            method: EvolutionMethod::Auto,
            tolerance: 1e-10,
            max_subspace_dim: 40,
            exact_dim_limit: DEFAULT_EXACT_DIM_LIMIT,
        }
    }
}

impl EvolutionEngine {
    pub fn exact() -> Self {
        EvolutionEngine {
            method: EvolutionMethod::Exact,
            ..Default::default()
        }
    }

    pub fn krylov(tolerance: f64, max_subspace_dim: usize) -> Self {
        EvolutionEngine {
            method: EvolutionMethod::Krylov,
            tolerance,
            max_subspace_dim,
            ..Default::default()
        }
    }

    pub fn chebyshev(tolerance: f64) -> Self {
        EvolutionEngine {
            method: EvolutionMethod::Chebyshev,
            tolerance,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::invalid("evolution tolerance must be positive"));
        }
        if self.max_subspace_dim < 2 {
            return Err(Error::invalid("Krylov subspace dimension must be at least 2"));
        }
        Ok(())
    }

    /// exp(−iHt)ψ, renormalized.
    pub fn evolve<O: HermitianOp + ?Sized>(
        &self,
        op: &O,
        psi: &StateVector,
        t: f64,
    ) -> Result<StateVector> {
        self.prepare(op)?.evolve(psi, t)
    }

    /// Binds the engine to an operator. Under the exact method this performs
    /// the diagonalization once so repeated evolutions are cheap.
    pub fn prepare<'a, O: HermitianOp + ?Sized>(&self, op: &'a O) -> Result<Propagator<'a, O>> {
        self.validate()?;
        let method = match self.method {
            EvolutionMethod::Auto if op.dim() <= self.exact_dim_limit => EvolutionMethod::Exact,
            EvolutionMethod::Auto => EvolutionMethod::Krylov,
            m => m,
        };
        match method {
            EvolutionMethod::Exact => Ok(Propagator::Spectral(SpectralDecomposition::new(op)?)),
            EvolutionMethod::Chebyshev => {
                if op.spectral_bounds().is_none() {
                    return Err(Error::invalid("Chebyshev evolution needs spectral bounds for the operator"));
                }
                Ok(Propagator::Chebyshev {
                    op,
                    tolerance: self.tolerance,
                })
            }
            _ => Ok(Propagator::Krylov {
                op,
                tolerance: self.tolerance,
                max_subspace_dim: self.max_subspace_dim,
            }),
        }
    }
}

/// An operator bound to an evolution method.
pub enum Propagator<'a, O: HermitianOp + ?Sized> {
    Spectral(SpectralDecomposition),
    Krylov {
        op: &'a O,
        tolerance: f64,
        max_subspace_dim: usize,
    },
    Chebyshev {
        op: &'a O,
        tolerance: f64,
    },
}

impl<O: HermitianOp + ?Sized> Propagator<'_, O> {
    pub fn dim(&self) -> usize {
        match self {
            Propagator::Spectral(s) => s.dim(),
            Propagator::Krylov { op, .. } | Propagator::Chebyshev { op, .. } => op.dim(),
        }
    }

    pub fn evolve(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: psi.dim(),
            });
        }
        StateVector::from_amplitudes(self.evolve_amplitudes(psi.amplitudes(), t)?)
    }

    /// Unnormalized exp(−iHt)v.
    pub fn evolve_amplitudes(&self, v: &[C64], t: f64) -> Result<Vec<C64>> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::invalid(format!("evolution time must be finite and non-negative, got {t}")));
        }
        match self {
            Propagator::Spectral(s) => s.evolve_amplitudes(v, t),
            Propagator::Krylov {
                op,
                tolerance,
                max_subspace_dim,
            } => krylov_evolve(*op, v, t, *tolerance, *max_subspace_dim),
            Propagator::Chebyshev { op, tolerance } => chebyshev_evolve(*op, v, t, *tolerance),
        }
    }
}

enum Eigenvectors {
    Real(DMatrix<f64>),
    Complex(DMatrix<C64>),
}

/// Eigenpairs of a Hermitian operator.
pub struct SpectralDecomposition {
    values: Vec<f64>,
    vectors: Eigenvectors,
}

impl SpectralDecomposition {
    pub fn new<O: HermitianOp + ?Sized>(op: &O) -> Result<Self> {
        let dense = op.to_dense();
        let finite = dense.iter().all(|v| v.re.is_finite() && v.im.is_finite());
        if !finite {
            return Err(Error::NonFinite("diagonalization input"));
        }
        if op.is_real() {
            let real = dense.map(|v| v.re);
            let eig = SymmetricEigen::new(real);
            Ok(SpectralDecomposition {
                values: eig.eigenvalues.iter().copied().collect(),
                vectors: Eigenvectors::Real(eig.eigenvectors),
            })
        } else {
            let eig = SymmetricEigen::new(dense);
            Ok(SpectralDecomposition {
                values: eig.eigenvalues.iter().copied().collect(),
                vectors: Eigenvectors::Complex(eig.eigenvectors),
            })
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Eigenvalues in the order returned by the solver (not sorted).
    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    pub fn evolve_amplitudes(&self, v: &[C64], t: f64) -> Result<Vec<C64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        let phases: Vec<C64> = self
            .values
            .iter()
            .map(|&e| C64::from_polar(1.0, -e * t))
            .collect();
        let out: Vec<C64> = match &self.vectors {
            Eigenvectors::Real(q) => {
                let re = DVector::from_iterator(v.len(), v.iter().map(|a| a.re));
                let im = DVector::from_iterator(v.len(), v.iter().map(|a| a.im));
                let cr = q.tr_mul(&re);
                let ci = q.tr_mul(&im);
                let mut rotated_re = DVector::zeros(v.len());
                let mut rotated_im = DVector::zeros(v.len());
                for k in 0..v.len() {
                    let c = C64::new(cr[k], ci[k]) * phases[k];
                    rotated_re[k] = c.re;
                    rotated_im[k] = c.im;
                }
                let yr = q * rotated_re;
                let yi = q * rotated_im;
                yr.iter().zip(yi.iter()).map(|(&r, &i)| C64::new(r, i)).collect()
            }
            Eigenvectors::Complex(q) => {
                let x = DVector::from_column_slice(v);
                let mut c = q.ad_mul(&x);
                for k in 0..v.len() {
                    c[k] *= phases[k];
                }
                (q * c).iter().copied().collect()
            }
        };
        if out.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("exact evolution"));
        }
        Ok(out)
    }
}

/// Lanczos basis and tridiagonal projection for one Krylov step.
struct LanczosBasis {
    vectors: Vec<Vec<C64>>,
    /// Eigenvalues of the tridiagonal projection.
    ritz_values: Vec<f64>,
    /// Eigenvectors of the projection, one per column.
    ritz_vectors: DMatrix<f64>,
    /// Coefficient coupling the basis to the next (unbuilt) vector; zero on breakdown.
    residual: f64,
}

impl LanczosBasis {
    fn build<O: HermitianOp + ?Sized>(op: &O, start: &[C64], max_dim: usize) -> Result<Self> {
        let n = start.len();
        let max_dim = max_dim.min(n).max(1);
        let beta0 = norm(start);
        let mut vectors: Vec<Vec<C64>> = Vec::with_capacity(max_dim);
        vectors.push(start.iter().map(|a| a / beta0).collect());
        let mut alphas: Vec<f64> = Vec::with_capacity(max_dim);
        let mut betas: Vec<f64> = Vec::with_capacity(max_dim);
        let mut w = vec![C64::new(0.0, 0.0); n];
        let mut residual = 0.0;

        for j in 0..max_dim {
            op.apply_into(&vectors[j], &mut w);
            let alpha = inner(&vectors[j], &w).re;
            if !alpha.is_finite() {
                return Err(Error::NonFinite("Lanczos iteration"));
            }
            alphas.push(alpha);
            // Full reorthogonalization against the whole basis.
            for v in &vectors {
                let overlap = inner(v, &w);
                w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= overlap * vi);
            }
            for v in &vectors {
                let overlap = inner(v, &w);
                w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= overlap * vi);
            }
            let beta = norm(&w);
            if !beta.is_finite() {
                return Err(Error::NonFinite("Lanczos iteration"));
            }
            let scale = alpha.abs() + betas.last().copied().unwrap_or(0.0) + beta;
            if beta <= BREAKDOWN_TOLERANCE * scale.max(f64::MIN_POSITIVE) {
                residual = 0.0;
                break;
            }
            residual = beta;
            if j + 1 == max_dim {
                break;
            }
            betas.push(beta);
            vectors.push(w.iter().map(|a| a / beta).collect());
        }

        let m = alphas.len();
        let mut t = DMatrix::<f64>::zeros(m, m);
        for k in 0..m {
            t[(k, k)] = alphas[k];
            if k + 1 < m {
                t[(k, k + 1)] = betas[k];
                t[(k + 1, k)] = betas[k];
            }
        }
        let eig = SymmetricEigen::new(t);
        vectors.truncate(m);
        Ok(LanczosBasis {
            vectors,
            ritz_values: eig.eigenvalues.iter().copied().collect(),
            ritz_vectors: eig.eigenvectors,
            residual,
        })
    }

    /// Coefficients of exp(−iτT)e₁ in the Lanczos basis.
    fn coefficients(&self, tau: f64) -> Vec<C64> {
        let m = self.ritz_values.len();
        let q = &self.ritz_vectors;
        let weights: Vec<C64> = (0..m)
            .map(|k| q[(0, k)] * C64::from_polar(1.0, -self.ritz_values[k] * tau))
            .collect();
        (0..m)
            .map(|i| (0..m).map(|k| q[(i, k)] * weights[k]).sum())
            .collect()
    }

    /// A-posteriori error estimate of the step, per unit start-vector norm.
    fn error_estimate(&self, coefficients: &[C64]) -> f64 {
        self.residual * coefficients.last().map_or(0.0, |c| c.norm())
    }
}

/// exp(−iHt)v by Lanczos projection.
///
/// The step is the largest fraction of the remaining time (halving from the
/// full remainder) whose error estimate stays within the per-unit-time budget
/// `tolerance / t`. The basis is rebuilt after each accepted step.
pub fn krylov_evolve<O: HermitianOp + ?Sized>(
    op: &O,
    v: &[C64],
    t: f64,
    tolerance: f64,
    max_subspace_dim: usize,
) -> Result<Vec<C64>> {
    if v.len() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            found: v.len(),
        });
    }
    let mut w = v.to_vec();
    let total_norm = norm(&w);
    if !total_norm.is_finite() {
        return Err(Error::NonFinite("Krylov start vector"));
    }
    if t == 0.0 || total_norm == 0.0 {
        return Ok(w);
    }
    let rate = tolerance / t;
    let mut remaining = t;

    while remaining > 0.0 {
        let beta = norm(&w);
        let basis = LanczosBasis::build(op, &w, max_subspace_dim)?;
        let mut tau = remaining;
        let mut accepted = None;
        for _ in 0..MAX_STEP_HALVINGS {
            let coeffs = basis.coefficients(tau);
            let estimate = basis.error_estimate(&coeffs) * beta / total_norm;
            if estimate <= rate * tau {
                accepted = Some((tau, coeffs));
                break;
            }
            tau *= 0.5;
        }
        let (tau, coeffs) = match accepted {
            Some(found) => found,
            None => {
                return Err(Error::KrylovNonConvergence {
                    subspace: basis.vectors.len(),
                    step: tau,
                    estimate: basis.error_estimate(&basis.coefficients(tau)),
                })
            }
        };
        let mut next = vec![C64::new(0.0, 0.0); w.len()];
        for (c, vec) in coeffs.iter().zip(&basis.vectors) {
            let c = c * beta;
            next.iter_mut().zip(vec).for_each(|(n, x)| *n += c * x);
        }
        if next.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("Krylov evolution"));
        }
        w = next;
        // Guard against a residual sliver from floating-point subtraction.
        remaining = if tau >= remaining { 0.0 } else { remaining - tau };
    }
    Ok(w)
}
