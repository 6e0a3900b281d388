//! Allocation size of the IA-driven policy over random antenna distributions.

use rand::seq::index::sample;
use rayon::prelude::*;

use crate::allocation::superfeasible_heuristic_allocation;
use crate::csit::CsitAllocation;
use crate::error::{Error, Result};
use crate::eval::scenario::Execution;
use crate::ia::is_proper_network;
use crate::model::AntennaConfig;
use crate::rng::{rng_for, SimRng};

/// Redraws allowed per sample before giving up on an antenna total.
const MAX_REDRAWS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SizeExperiment {
    pub users: usize,
    pub antenna_totals: Vec<usize>,
    pub draws: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeRow {
    pub antennas: usize,
    pub mean_scalars: f64,
    pub stderr: f64,
    /// Mean size of the complete allocation over the same draws.
    pub mean_complete_scalars: f64,
    /// Improper draws that were redrawn.
    pub rejected: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllocationSizeTable {
    pub label: String,
    pub rows: Vec<SizeRow>,
}

/// Uniformly random composition of `total` into `parts` positive integers.
pub fn random_composition(total: usize, parts: usize, rng: &mut SimRng) -> Result<Vec<usize>> {
    if parts == 0 || total < parts {
        return Err(Error::InvalidConfig(format!("{total} antennas cannot cover {parts} nodes")));
    }
    let mut cuts = sample(rng, total - 1, parts - 1).into_vec();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts.into_iter().map(|c| c + 1).chain(std::iter::once(total)) {
        out.push(c - prev);
        prev = c;
    }
    Ok(out)
}

/// A proper single-stream network with `total` antennas spread over the
/// `2 * users` nodes; improper draws are redrawn. Returns the redraw count.
pub fn random_proper_config(users: usize, total: usize, rng: &mut SimRng) -> Result<(AntennaConfig, usize)> {
    for rejected in 0..MAX_REDRAWS {
        let parts = random_composition(total, 2 * users, rng)?;
        let config = AntennaConfig::new(parts[..users].to_vec(), parts[users..].to_vec(), vec![1; users])?;
        if is_proper_network(&config)? {
            return Ok((config, rejected));
        }
    }
    Err(Error::InvalidConfig(format!("no proper network found with {total} antennas")))
}

fn one_draw(e: &SizeExperiment, total: usize, draw: usize) -> Result<(f64, f64, usize)> {
    let mut rng = rng_for(e.seed, &[total as u64, draw as u64]);
    let (config, rejected) = random_proper_config(e.users, total, &mut rng)?;
    let alloc = superfeasible_heuristic_allocation(&config)?;
    let complete = CsitAllocation::complete(&config).size().scalars;
    Ok((alloc.scalars() as f64, complete as f64, rejected))
}

pub fn run_size_experiment(e: &SizeExperiment, exec: Execution) -> Result<AllocationSizeTable> {
    if e.draws == 0 || e.antenna_totals.is_empty() {
        return Err(Error::InvalidConfig("size experiment needs draws and antenna totals".into()));
    }
    let mut rows = Vec::new();
    for &total in &e.antenna_totals {
        let outcomes: Vec<Result<(f64, f64, usize)>> = match exec {
            Execution::Serial => (0..e.draws).map(|d| one_draw(e, total, d)).collect(),
            Execution::Parallel => (0..e.draws).into_par_iter().map(|d| one_draw(e, total, d)).collect(),
        };
        let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
        let n = outcomes.len() as f64;
        let mean = outcomes.iter().map(|o| o.0).sum::<f64>() / n;
        let var = if outcomes.len() > 1 {
            outcomes.iter().map(|o| (o.0 - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        rows.push(SizeRow {
            antennas: total,
            mean_scalars: mean,
            stderr: (var / n).sqrt(),
            mean_complete_scalars: outcomes.iter().map(|o| o.1).sum::<f64>() / n,
            rejected: outcomes.iter().map(|o| o.2).sum(),
        });
    }
    Ok(AllocationSizeTable { label: format!("K={} heuristic allocation", e.users), rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compositions_are_positive_and_sum_up() {
        let mut rng = rng_for(3, &[]);
        for _ in 0..200 {
            let c = random_composition(12, 6, &mut rng).unwrap();
            assert_eq!(c.len(), 6);
            assert_eq!(c.iter().sum::<usize>(), 12);
            assert!(c.iter().all(|&x| x >= 1));
        }
        assert!(random_composition(5, 6, &mut rng).is_err());
    }

    #[test]
    fn compositions_are_uniform() {
        // 5 into 3 positive parts: C(4, 2) = 6 equally likely outcomes.
        let mut rng = rng_for(4, &[]);
        let mut counts = std::collections::BTreeMap::new();
        let n = 12_000;
        for _ in 0..n {
            *counts.entry(random_composition(5, 3, &mut rng).unwrap()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 6);
        assert!(counts.values().all(|&c| (1800..2200).contains(&c)), "{counts:?}");
    }

    #[test]
    fn small_experiment_runs() {
        let e = SizeExperiment { users: 3, antenna_totals: vec![12], draws: 20, seed: 1 };
        let t = run_size_experiment(&e, Execution::Serial).unwrap();
        assert_eq!(t, run_size_experiment(&e, Execution::Parallel).unwrap());
        assert!(t.rows[0].mean_scalars <= t.rows[0].mean_complete_scalars);
    }
}
