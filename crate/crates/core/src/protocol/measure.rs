//! Projective measurement of the whole cavity register and the reset that follows.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::BasisLayout;

/// Allowed deviation of the summed pattern probabilities from 1.
pub const PROBABILITY_TOLERANCE: f64 = 1e-8;

/// Probability of each cavity occupation pattern `b`.
pub fn cavity_probabilities(full: &[C64], layout: &BasisLayout) -> Result<Vec<f64>> {
    if full.len() != layout.dim() {
        return Err(Error::DimensionMismatch {
            expected: layout.dim(),
            found: full.len(),
        });
    }
    let cavity_dim = layout.cavity_dim();
    let mut probs = vec![0.0; cavity_dim];
    for (i, a) in full.iter().enumerate() {
        probs[i & (cavity_dim - 1)] += a.norm_sqr();
    }
    let total: f64 = probs.iter().sum();
    if !total.is_finite() || (total - 1.0).abs() > PROBABILITY_TOLERANCE {
        return Err(Error::ProbabilityNormalization { total });
    }
    Ok(probs)
}

/// Inverse-CDF sample of a pattern from a uniform draw `u ∈ [0, 1)`, with
/// patterns in increasing order and `probs` summing to 1.
///
/// Patterns with zero probability are never returned; a draw beyond the
/// accumulated total (rounding) selects the last nonzero pattern.
pub fn sample_pattern(probs: &[f64], u: f64) -> usize {
    let target = u;
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (b, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        last_nonzero = b;
        acc += p;
        if target < acc {
            return b;
        }
    }
    last_nonzero
}

/// Projects onto cavity pattern `b`, renormalizes, and moves the surviving
/// system amplitudes back to the empty-cavity sector.
///
/// Returns the normalized system-register state.
pub fn project_and_reset(full: &[C64], layout: &BasisLayout, pattern: usize) -> Result<Vec<C64>> {
    if pattern >= layout.cavity_dim() {
        return Err(Error::OutOfRange {
            index: pattern,
            dim: layout.cavity_dim(),
        });
    }
    let shift = layout.modes();
    let mut system: Vec<C64> = (0..layout.system_dim())
        .map(|z| full[z << shift | pattern])
        .collect();
    let norm = system.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    if !norm.is_finite() {
        return Err(Error::NonFinite("cavity projection"));
    }
    system.iter_mut().for_each(|a| *a /= norm);
    Ok(system)
}
