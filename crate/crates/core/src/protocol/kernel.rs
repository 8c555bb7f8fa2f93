//! Unitary part of a cooling cycle, specialised to start states whose cavities
//! are empty.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::BasisLayout;
use crate::qcore::{EvolutionEngine, HermitianOp, Propagator};

/// Evolution of `ψ ⊗ |0…0⟩` over one cycle.
pub trait CycleKernel: Sync {
    fn layout(&self) -> BasisLayout;

    /// Fixed evolution time of a cycle, in units of 1/Δ.
    fn duration(&self) -> f64;

    /// Full-space amplitudes of U(ψ ⊗ |0…0⟩) for a system-register state ψ.
    fn propagate(&self, system: &[C64]) -> Result<Vec<C64>>;

    /// True when [`Self::block`] is much cheaper than [`Self::propagate`],
    /// so measurement should evaluate cavity patterns one at a time.
    fn blockwise(&self) -> bool {
        false
    }

    /// System-register amplitudes of U(ψ ⊗ |0…0⟩) in the block where the
    /// cavities hold `pattern`.
    fn block(&self, system: &[C64], pattern: usize) -> Result<Vec<C64>> {
        let full = self.propagate(system)?;
        Ok(extract_block(&full, &self.layout(), pattern))
    }
}

pub(crate) fn extract_block(full: &[C64], layout: &BasisLayout, pattern: usize) -> Vec<C64> {
    let shift = layout.modes();
    (0..layout.system_dim())
        .map(|z| full[z << shift | pattern])
        .collect()
}

fn check_system(layout: &BasisLayout, system: &[C64]) -> Result<()> {
    if system.len() != layout.system_dim() {
        return Err(Error::DimensionMismatch {
            expected: layout.system_dim(),
            found: system.len(),
        });
    }
    Ok(())
}

fn check_duration(duration: f64) -> Result<()> {
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(Error::invalid(format!("cycle duration must be positive, got {duration}")));
    }
    Ok(())
}

/// Evolves each cycle afresh through an [`EvolutionEngine`].
pub struct DirectKernel<'a, O: HermitianOp + ?Sized> {
    propagator: Propagator<'a, O>,
    layout: BasisLayout,
    duration: f64,
}

impl<'a, O: HermitianOp + ?Sized> DirectKernel<'a, O> {
    pub fn new(op: &'a O, layout: BasisLayout, duration: f64, engine: &EvolutionEngine) -> Result<Self> {
        check_duration(duration)?;
        if op.dim() != layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                found: op.dim(),
            });
        }
        Ok(DirectKernel {
            propagator: engine.prepare(op)?,
            layout,
            duration,
        })
    }
}

impl<O: HermitianOp + ?Sized> CycleKernel for DirectKernel<'_, O> {
    fn layout(&self) -> BasisLayout {
        self.layout
    }

    fn duration(&self) -> f64 {
        self.duration
    }

    fn propagate(&self, system: &[C64]) -> Result<Vec<C64>> {
        check_system(&self.layout, system)?;
        let mut full = vec![C64::new(0.0, 0.0); self.layout.dim()];
        let shift = self.layout.modes();
        for (z, &a) in system.iter().enumerate() {
            full[z << shift] = a;
        }
        self.propagator.evolve_amplitudes(&full, self.duration)
    }
}

/// The columns of exp(−iHτ) that act on the zero-photon sector, computed once.
///
/// A cycle then costs dense products of size system_dim × system_dim, one
/// per cavity pattern actually examined, independent of the evolution time.
pub struct SectorPropagator {
    layout: BasisLayout,
    duration: f64,
    /// Block-major: entry (b, z, z') is ⟨z', b|U|z, 0⟩ at `(b · S + z) · S + z'`
    /// with S the system dimension.
    blocks: Vec<C64>,
}

/// Deviation of a propagated column's norm from 1 that aborts a build.
const COLUMN_NORM_TOLERANCE: f64 = 1e-8;

impl SectorPropagator {
    pub fn build<O: HermitianOp + ?Sized>(
        op: &O,
        layout: BasisLayout,
        duration: f64,
        engine: &EvolutionEngine,
    ) -> Result<Self> {
        check_duration(duration)?;
        if op.dim() != layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                found: op.dim(),
            });
        }
        let propagator = engine.prepare(op)?;
        let dim = layout.dim();
        let system_dim = layout.system_dim();
        let shift = layout.modes();
        let columns: Vec<Vec<C64>> = (0..system_dim)
            .into_par_iter()
            .map(|z| {
                let mut e = vec![C64::new(0.0, 0.0); dim];
                e[z << shift] = C64::new(1.0, 0.0);
                let column = propagator.evolve_amplitudes(&e, duration)?;
                let total: f64 = column.iter().map(|a| a.norm_sqr()).sum();
                if (total - 1.0).abs() > COLUMN_NORM_TOLERANCE {
                    return Err(Error::ProbabilityNormalization { total });
                }
                Ok(column)
            })
            .collect::<Result<_>>()?;
        let mut blocks = vec![C64::new(0.0, 0.0); dim * system_dim];
        for (z, column) in columns.into_iter().enumerate() {
            for (i, a) in column.into_iter().enumerate() {
                let (zp, b) = (i >> shift, i & (layout.cavity_dim() - 1));
                blocks[(b * system_dim + z) * system_dim + zp] = a;
            }
        }
        Ok(SectorPropagator {
            layout,
            duration,
            blocks,
        })
    }

    /// ⟨·, b|U|z, 0⟩ as a system-register vector.
    pub fn column(&self, pattern: usize, z: usize) -> &[C64] {
        let s = self.layout.system_dim();
        let start = (pattern * s + z) * s;
        &self.blocks[start..start + s]
    }
}

impl CycleKernel for SectorPropagator {
    fn layout(&self) -> BasisLayout {
        self.layout
    }

    fn duration(&self) -> f64 {
        self.duration
    }

    fn propagate(&self, system: &[C64]) -> Result<Vec<C64>> {
        let mut full = vec![C64::new(0.0, 0.0); self.layout.dim()];
        let shift = self.layout.modes();
        for b in 0..self.layout.cavity_dim() {
            for (zp, a) in self.block(system, b)?.into_iter().enumerate() {
                full[zp << shift | b] = a;
            }
        }
        Ok(full)
    }

    fn blockwise(&self) -> bool {
        true
    }

    fn block(&self, system: &[C64], pattern: usize) -> Result<Vec<C64>> {
        check_system(&self.layout, system)?;
        if pattern >= self.layout.cavity_dim() {
            return Err(Error::OutOfRange {
                index: pattern,
                dim: self.layout.cavity_dim(),
            });
        }
        let mut out = vec![C64::new(0.0, 0.0); self.layout.system_dim()];
        for (z, &a) in system.iter().enumerate() {
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            out.iter_mut()
                .zip(self.column(pattern, z))
                .for_each(|(o, &u)| *o += a * u);
        }
        Ok(out)
    }
}
