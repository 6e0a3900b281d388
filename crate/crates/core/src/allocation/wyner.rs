//! Bit allocations for the single-antenna Wyner network.

use crate::csit::{CsitAllocation, Precision};
use crate::error::{Error, Result};
use crate::model::AntennaConfig;

fn check_domain(gamma: f64, p: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("SNR must exceed 1, got {p}")));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Domain(format!("interference level must lie in [0, 1], got {gamma}")));
    }
    Ok(())
}

/// Rounds up, forgiving floating-point noise just above an integer.
fn ceil_bits(v: f64) -> u32 {
    (v - 1e-9).ceil().max(0.0) as u32
}

/// Feedback bits TX `j` receives about row `i`: accuracy decays with the
/// distance `|i - j|` at a rate set by the interference level `gamma`.
pub fn distance_based_bits(i: usize, j: usize, gamma: f64, p: f64) -> Result<u32> {
    check_domain(gamma, p)?;
    let dist = i.abs_diff(j) as f64;
    let own = (1.0 + (gamma - 1.0) * dist).max(0.0);
    let cross = (gamma + (gamma - 1.0) * dist).max(0.0);
    Ok(ceil_bits((own + 2.0 * cross) * p.log2()))
}

fn bits_precision(b: u32) -> Precision {
    if b == 0 {
        Precision::None
    } else {
        Precision::Bits(b)
    }
}

fn wyner_config(users: usize) -> Result<AntennaConfig> {
    AntennaConfig::single_antenna(users)
}

pub fn distance_based_allocation(users: usize, gamma: f64, p: f64) -> Result<CsitAllocation> {
    check_domain(gamma, p)?;
    let config = wyner_config(users)?;
    let mut a = CsitAllocation::none(&config);
    for j in 0..users {
        for i in 0..users {
            a.set_row(j, i, bits_precision(distance_based_bits(i, j, gamma, p)?));
        }
    }
    Ok(a)
}

/// Every TX gets the distance-0 accuracy for every row.
pub fn conventional_allocation(users: usize, gamma: f64, p: f64) -> Result<CsitAllocation> {
    let b = distance_based_bits(0, 0, gamma, p)?;
    Ok(CsitAllocation::from_fn(&wyner_config(users)?, |_, _| bits_precision(b)))
}

/// `budget` split evenly over all `users^2` entries; the remainder is dropped.
pub fn uniform_allocation(budget: u64, users: usize) -> Result<CsitAllocation> {
    let per = budget / (users * users) as u64;
    let b = u32::try_from(per).map_err(|_| Error::Domain(format!("{per} bits per entry")))?;
    Ok(CsitAllocation::from_fn(&wyner_config(users)?, |_, _| bits_precision(b)))
}

/// Consecutive clusters of `cluster_size` users (the last one possibly
/// shorter). Cluster index of each user.
pub fn cluster_of(users: usize, cluster_size: usize) -> Vec<usize> {
    (0..users).map(|u| u / cluster_size).collect()
}

/// `budget` split evenly over the in-cluster entries; nothing across clusters.
pub fn clustered_allocation(budget: u64, users: usize, cluster_size: usize) -> Result<CsitAllocation> {
    if cluster_size == 0 {
        return Err(Error::Domain("cluster size must be positive".into()));
    }
    let cl = cluster_of(users, cluster_size);
    let inside = (0..users)
        .flat_map(|j| (0..users).map(move |i| (i, j)))
        .filter(|&(i, j)| cl[i] == cl[j])
        .count() as u64;
    let per = budget / inside;
    let b = u32::try_from(per).map_err(|_| Error::Domain(format!("{per} bits per entry")))?;
    Ok(CsitAllocation::from_fn(&wyner_config(users)?, |j, i| {
        if cl[i] == cl[j] {
            bits_precision(b)
        } else {
            Precision::None
        }
    }))
}
