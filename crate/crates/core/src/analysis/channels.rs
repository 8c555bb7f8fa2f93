//! Resonant multi-hop ("lambda-type") channels out of a starting state.
//!
//! A path z₀ → z₁ → … → z_n along nonzero entries of H_T, with the last hop
//! accompanied by a photon in mode m, is reported when
//! `E(z₁) − E(z₀) = E(z_{n−1}) − E(z_n) + ω_m` holds within λ.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::CoolingModelSpec;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaChannel {
    pub start: usize,
    pub end: usize,
    /// 1-based cavity mode that absorbs the energy.
    pub mode: usize,
    /// Every state along the path, start and end included.
    pub path: Vec<usize>,
}

impl LambdaChannel {
    pub fn hops(&self) -> usize {
        self.path.len() - 1
    }
}

/// States with no strictly lower neighbour in the transition graph.
pub fn local_minima(spec: &CoolingModelSpec) -> Vec<usize> {
    let h = spec.transition.operator();
    (0..spec.problem.dim())
        .filter(|&z| {
            let e = spec.problem.energy(z);
            h.row(z).all(|(j, _)| j == z || spec.problem.energy(j) >= e)
        })
        .collect()
}

/// Enumerates channels of 2..=`max_hops` hops over simple paths from each
/// start. One channel is kept per (start, end, mode, hops), the first found.
pub fn lambda_transition_scan(
    spec: &CoolingModelSpec,
    starts: &[usize],
    max_hops: usize,
) -> Result<Vec<LambdaChannel>> {
    spec.validate()?;
    let dim = spec.problem.dim();
    if let Some(&z) = starts.iter().find(|&&z| z >= dim) {
        return Err(Error::OutOfRange { index: z, dim });
    }
    let mut found = Vec::new();
    if spec.cavities.modes() == 0 || max_hops < 2 {
        return Ok(found);
    }
    let mut seen = BTreeSet::new();
    for &z0 in starts {
        let mut path = vec![z0];
        extend(spec, max_hops, &mut path, &mut seen, &mut found);
    }
    Ok(found)
}

fn extend(
    spec: &CoolingModelSpec,
    max_hops: usize,
    path: &mut Vec<usize>,
    seen: &mut BTreeSet<(usize, usize, usize, usize)>,
    found: &mut Vec<LambdaChannel>,
) {
    let hops = path.len() - 1;
    if hops >= 2 {
        check_resonance(spec, path, seen, found);
    }
    if hops == max_hops {
        return;
    }
    let last = path[hops];
    let neighbours: Vec<usize> = spec
        .transition
        .operator()
        .row(last)
        .map(|(j, _)| j)
        .filter(|j| !path.contains(j))
        .collect();
    for j in neighbours {
        path.push(j);
        extend(spec, max_hops, path, seen, found);
        path.pop();
    }
}

fn check_resonance(
    spec: &CoolingModelSpec,
    path: &[usize],
    seen: &mut BTreeSet<(usize, usize, usize, usize)>,
    found: &mut Vec<LambdaChannel>,
) {
    let e = |z: usize| spec.problem.energy(z) as f64;
    let n = path.len() - 1;
    let (z0, z1, zm, zn) = (path[0], path[1], path[n - 1], path[n]);
    let rise = e(z1) - e(z0);
    for (m, &omega) in spec.cavities.omegas().iter().enumerate() {
        let fall = e(zm) - e(zn) + omega as f64;
        if (rise - fall).abs() <= spec.lambda && seen.insert((z0, zn, m, n)) {
            found.push(LambdaChannel {
                start: z0,
                end: zn,
                mode: m + 1,
                path: path.to_vec(),
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CavityBank, ProblemHamiltonian, TransitionTerm};

    fn chain_spec(energies: Vec<i64>, omegas: Vec<i64>) -> CoolingModelSpec {
        let len = energies.len();
        CoolingModelSpec::new(
            ProblemHamiltonian::new(energies).unwrap(),
            TransitionTerm::chain_adjacency(len).unwrap(),
            CavityBank::new(omegas).unwrap(),
            0.1,
            false,
        )
        .unwrap()
    }

    #[test]
    fn no_cavities_no_channels() {
        let spec = chain_spec(vec![0, 1, 0], vec![]);
        assert!(lambda_transition_scan(&spec, &[0, 1, 2], 4).unwrap().is_empty());
    }

    #[test]
    fn cavity_replaces_last_hop() {
        // Rise E(z₁) − E(z₀) = 1 matches E(z₁) − E(z₂) + ω₁ = 0 + 1.
        let spec = chain_spec(vec![2, 3, 3], vec![1]);
        let channels = lambda_transition_scan(&spec, &[0], 3).unwrap();
        assert_eq!(
            channels,
            vec![LambdaChannel {
                start: 0,
                end: 2,
                mode: 1,
                path: vec![0, 1, 2],
            }]
        );
    }

    #[test]
    fn local_minima_of_a_chain() {
        let spec = chain_spec(vec![1, 0, 2, 1, 3], vec![1]);
        assert_eq!(local_minima(&spec), vec![1, 3]);
    }
}
