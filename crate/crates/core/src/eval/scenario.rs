//! Monte-Carlo rate experiments over an SNR grid.

use rayon::prelude::*;

use crate::allocation::{
    clustered_allocation, conventional_allocation, distance_based_allocation, uniform_allocation,
};
use crate::csit::{build_distributed_csit, CsitAllocation, CsitSource, QuantizerKind, ScalingAllocation};
use crate::error::{Error, Result};
use crate::eval::metrics::{slope_vs_log2_snr, user_rates};
use crate::model::{gen_channel, AntennaConfig, Topology};
use crate::precoding::{apzf, zf_distributed, zf_global, EffectivePrecoder, PowerNormalization};
use crate::rng::derive_seed;

/// Noise power at every RX; the transmit power is then the SNR.
pub const NOISE_POWER: f64 = 1.0;

/// How CSIT is handed out to the TXs.
#[derive(Debug, Clone, PartialEq)]
pub enum Policy {
    /// Every TX knows the true channel.
    Perfect,
    /// Bits decaying with the TX-row distance (Wyner topology only).
    DistanceBased,
    /// Distance-0 accuracy everywhere (Wyner topology only).
    Conventional,
    /// Distance-based budget spread evenly over all entries.
    Uniform,
    /// Distance-based budget spread over consecutive clusters.
    Clustered { cluster_size: usize },
    /// Estimate error variance `P^(-alpha)` per row and TX.
    Scaling(ScalingAllocation),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PrecoderRule {
    /// Centralized ZF on the true channel.
    ZfGlobal,
    ZfDistributed,
    ActivePassive(PowerNormalization),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub label: String,
    pub config: AntennaConfig,
    pub topology: Topology,
    pub policy: Policy,
    pub precoder: PrecoderRule,
    pub quantizer: QuantizerKind,
    pub snr_db: Vec<f64>,
    pub draws: usize,
    pub seed: u64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.draws == 0 {
            return Err(Error::InvalidConfig("at least one draw is required".into()));
        }
        if self.snr_db.is_empty() || self.snr_db.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidConfig("SNR grid must be non-empty and strictly increasing".into()));
        }
        if self.snr_db.iter().any(|db| !(*db > 0.0) || !db.is_finite()) {
            return Err(Error::InvalidConfig("SNR points must be positive dB values".into()));
        }
        let wyner_policy = matches!(
            self.policy,
            Policy::DistanceBased | Policy::Conventional | Policy::Uniform | Policy::Clustered { .. }
        );
        if wyner_policy && !matches!(self.topology, Topology::Wyner1d { .. }) {
            return Err(Error::InvalidConfig("bit policies need the Wyner topology".into()));
        }
        if let Policy::Scaling(s) = &self.policy {
            if s.users() != self.config.users() {
                return Err(Error::InvalidConfig("scaling allocation size".into()));
            }
        }
        if let (PrecoderRule::ActivePassive(_), p) = (self.precoder, &self.policy) {
            if !matches!(p, Policy::Scaling(_)) {
                return Err(Error::InvalidConfig("active-passive ZF needs a scaling allocation".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub snr_db: f64,
    pub user_rate_mean: f64,
    pub sum_rate_mean: f64,
    /// Standard error of the sum-rate mean.
    pub stderr: f64,
    pub alloc_bits: u64,
    pub alloc_scalars: u64,
    pub flags: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub label: String,
    pub rows: Vec<ResultRow>,
}

/// Least-squares slope of the mean per-user rate against `log2 P` over the
/// grid points within `[lo_db, hi_db]`.
pub fn dof_slope(table: &ResultTable, lo_db: f64, hi_db: f64) -> Result<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) = table
        .rows
        .iter()
        .filter(|r| r.snr_db >= lo_db && r.snr_db <= hi_db)
        .map(|r| (r.snr_db, r.user_rate_mean))
        .unzip();
    slope_vs_log2_snr(&x, &y)
}

/// Same fit on the mean sum rate.
pub fn sum_rate_slope(table: &ResultTable, lo_db: f64, hi_db: f64) -> Result<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) = table
        .rows
        .iter()
        .filter(|r| r.snr_db >= lo_db && r.snr_db <= hi_db)
        .map(|r| (r.snr_db, r.sum_rate_mean))
        .unzip();
    slope_vs_log2_snr(&x, &y)
}

enum Csit {
    Perfect,
    Bits(CsitAllocation),
    Scaling(ScalingAllocation),
}

fn allocation_at(s: &Scenario, p: f64) -> Result<Csit> {
    let k = s.config.users();
    let gamma = match s.topology {
        Topology::Wyner1d { gamma } => gamma,
        Topology::IidRayleigh => 0.0,
    };
    let budget = || distance_based_allocation(k, gamma, p).map(|a| a.size().bits);
    Ok(match &s.policy {
        Policy::Perfect => Csit::Perfect,
        Policy::DistanceBased => Csit::Bits(distance_based_allocation(k, gamma, p)?),
        Policy::Conventional => Csit::Bits(conventional_allocation(k, gamma, p)?),
        Policy::Uniform => Csit::Bits(uniform_allocation(budget()?, k)?),
        Policy::Clustered { cluster_size } => Csit::Bits(clustered_allocation(budget()?, k, *cluster_size)?),
        Policy::Scaling(a) => Csit::Scaling(a.clone()),
    })
}

struct DrawOutcome {
    rates: Vec<f64>,
    fallback: bool,
    clamped: bool,
}

fn one_draw(s: &Scenario, csit: &Csit, p: f64, draw: usize) -> Result<DrawOutcome> {
    // Channel and feedback noise depend on the draw only, so every SNR point
    // sees the same fading realizations.
    let h = gen_channel(&s.config, s.topology, p, derive_seed(s.seed, &[draw as u64, 0]))?;
    let noise_seed = derive_seed(s.seed, &[draw as u64, 1]);
    let precoder: EffectivePrecoder = match (s.precoder, csit) {
        (PrecoderRule::ZfGlobal, _) => zf_global(&h, p)?,
        (_, Csit::Perfect) => zf_global(&h, p)?,
        (PrecoderRule::ZfDistributed, Csit::Bits(a)) => {
            zf_distributed(&build_distributed_csit(&h, CsitSource::Allocation(a), s.quantizer, noise_seed)?, p)?
        }
        (PrecoderRule::ZfDistributed, Csit::Scaling(a)) => {
            zf_distributed(&build_distributed_csit(&h, CsitSource::Scaling(a), s.quantizer, noise_seed)?, p)?
        }
        (PrecoderRule::ActivePassive(norm), Csit::Scaling(a)) => {
            let d = build_distributed_csit(&h, CsitSource::Scaling(a), s.quantizer, noise_seed)?;
            apzf(&d, a, p, norm)?
        }
        (PrecoderRule::ActivePassive(_), Csit::Bits(_)) => {
            return Err(Error::InvalidConfig("active-passive ZF needs a scaling allocation".into()))
        }
    };
    Ok(DrawOutcome {
        rates: user_rates(&h, precoder.matrix(), NOISE_POWER)?,
        fallback: precoder.any_fallback(),
        clamped: precoder.any_clamped(),
    })
}

/// Runs every grid point. Draws may run in parallel; the reduction always
/// walks them in index order so both modes give identical tables.
pub fn run_scenario(s: &Scenario, exec: Execution) -> Result<ResultTable> {
    s.validate()?;
    let k = s.config.users() as f64;
    let mut rows = Vec::with_capacity(s.snr_db.len());
    for &db in &s.snr_db {
        let p = 10f64.powf(db / 10.0);
        let csit = allocation_at(s, p)?;
        let outcomes: Vec<Result<DrawOutcome>> = match exec {
            Execution::Serial => (0..s.draws).map(|d| one_draw(s, &csit, p, d)).collect(),
            Execution::Parallel => (0..s.draws).into_par_iter().map(|d| one_draw(s, &csit, p, d)).collect(),
        };
        let (mut failed, mut fallback, mut clamped) = (0usize, 0usize, 0usize);
        let mut sums = Vec::with_capacity(s.draws);
        for o in outcomes {
            match o {
                Ok(o) => {
                    fallback += o.fallback as usize;
                    clamped += o.clamped as usize;
                    sums.push(o.rates.iter().sum::<f64>());
                }
                Err(Error::IllConditioned(_)) => failed += 1,
                Err(e) => return Err(e),
            }
        }
        if sums.is_empty() {
            return Err(Error::IllConditioned(f64::INFINITY));
        }
        let n = sums.len() as f64;
        let mean = sums.iter().sum::<f64>() / n;
        let var = if sums.len() > 1 {
            sums.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let size = match &csit {
            Csit::Bits(a) => a.size(),
            _ => Default::default(),
        };
        rows.push(ResultRow {
            snr_db: db,
            user_rate_mean: mean / k,
            sum_rate_mean: mean,
            stderr: (var / n).sqrt(),
            alloc_bits: size.bits,
            alloc_scalars: size.scalars,
            flags: format!("failed={failed};fallback={fallback};clamped={clamped}"),
        });
    }
    Ok(ResultTable { label: s.label.clone(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(draws: usize) -> Scenario {
        Scenario {
            label: "t".into(),
            config: AntennaConfig::single_antenna(2).unwrap(),
            topology: Topology::IidRayleigh,
            policy: Policy::Scaling(ScalingAllocation::uniform(2, 1.0).unwrap()),
            precoder: PrecoderRule::ZfDistributed,
            quantizer: QuantizerKind::Surrogate,
            snr_db: vec![10.0, 20.0],
            draws,
            seed: 4,
        }
    }

    #[test]
    fn validation() {
        let mut s = scenario(1);
        s.snr_db = vec![20.0, 10.0];
        assert!(s.validate().is_err());
        let mut s = scenario(0);
        assert!(s.validate().is_err());
        s.draws = 1;
        s.policy = Policy::DistanceBased;
        assert!(s.validate().is_err());
    }

    #[test]
    fn single_draw_is_reproducible() {
        let s = scenario(1);
        assert_eq!(run_scenario(&s, Execution::Serial).unwrap(), run_scenario(&s, Execution::Serial).unwrap());
    }

    #[test]
    fn serial_and_parallel_agree() {
        let s = scenario(64);
        assert_eq!(run_scenario(&s, Execution::Serial).unwrap(), run_scenario(&s, Execution::Parallel).unwrap());
    }

    #[test]
    fn standard_error_scales_with_draws() {
        let se = |n| run_scenario(&scenario(n), Execution::Parallel).unwrap().rows[1].stderr;
        let ratio = se(400) / se(1600);
        assert!((1.0..=4.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn dof_slope_window() {
        let t = ResultTable {
            label: "x".into(),
            rows: [10.0, 20.0, 30.0]
                .iter()
                .map(|&db| ResultRow {
                    snr_db: db,
                    user_rate_mean: db / 10.0 * 10f64.log2(),
                    sum_rate_mean: 0.0,
                    stderr: 0.0,
                    alloc_bits: 0,
                    alloc_scalars: 0,
                    flags: String::new(),
                })
                .collect(),
        };
        assert!((dof_slope(&t, 0.0, 100.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(dof_slope(&t, 25.0, 100.0).is_err());
    }
}
