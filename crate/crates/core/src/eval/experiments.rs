//! Ready-made scenario families.

use crate::csit::{QuantizerKind, ScalingAllocation};
use crate::error::Result;
use crate::eval::scenario::{run_scenario, Execution, Policy, PrecoderRule, ResultTable, Scenario};
use crate::model::{AntennaConfig, Topology};
use crate::precoding::PowerNormalization;

/// Shared settings of a rate experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSettings {
    pub snr_db: Vec<f64>,
    pub draws: usize,
    pub seed: u64,
    pub quantizer: QuantizerKind,
}

/// Wyner network under the distance-based policy and its budget-matched
/// competitors, plus the conventional and perfect-CSIT references. All
/// series share channel draws.
pub fn wyner_scenarios(users: usize, gamma: f64, cluster_size: usize, s: &RateSettings) -> Result<Vec<Scenario>> {
    let config = AntennaConfig::single_antenna(users)?;
    let topology = Topology::wyner(gamma)?;
    let make = |label: &str, policy: Policy, precoder: PrecoderRule| Scenario {
        label: label.into(),
        config: config.clone(),
        topology,
        policy,
        precoder,
        quantizer: s.quantizer,
        snr_db: s.snr_db.clone(),
        draws: s.draws,
        seed: s.seed,
    };
    Ok(vec![
        make("distance-based", Policy::DistanceBased, PrecoderRule::ZfDistributed),
        make("uniform", Policy::Uniform, PrecoderRule::ZfDistributed),
        make(&format!("clustered-{cluster_size}"), Policy::Clustered { cluster_size }, PrecoderRule::ZfDistributed),
        make("conventional", Policy::Conventional, PrecoderRule::ZfDistributed),
        make("perfect-csit", Policy::Perfect, PrecoderRule::ZfGlobal),
    ])
}

/// Two-user scaling experiment: perfect-CSIT ZF, conventional distributed ZF
/// and active-passive ZF on the same draws.
pub fn apzf_scenarios(alpha: &ScalingAllocation, norm: PowerNormalization, s: &RateSettings) -> Result<Vec<Scenario>> {
    let config = AntennaConfig::single_antenna(2)?;
    let make = |label: &str, policy: Policy, precoder: PrecoderRule| Scenario {
        label: label.into(),
        config: config.clone(),
        topology: Topology::IidRayleigh,
        policy,
        precoder,
        quantizer: s.quantizer,
        snr_db: s.snr_db.clone(),
        draws: s.draws,
        seed: s.seed,
    };
    Ok(vec![
        make("perfect-csit-zf", Policy::Perfect, PrecoderRule::ZfGlobal),
        make("distributed-zf", Policy::Scaling(alpha.clone()), PrecoderRule::ZfDistributed),
        make("active-passive-zf", Policy::Scaling(alpha.clone()), PrecoderRule::ActivePassive(norm)),
    ])
}

pub fn run_all(scenarios: &[Scenario], exec: Execution) -> Result<Vec<ResultTable>> {
    scenarios.iter().map(|s| run_scenario(s, exec)).collect()
}
