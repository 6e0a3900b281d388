//! Metrics, Monte-Carlo experiments and result rendering.

pub mod experiments;
pub mod metrics;
pub mod output;
pub mod scenario;
pub mod sizes;

pub use experiments::{apzf_scenarios, run_all, wyner_scenarios, RateSettings};
pub use metrics::{slope_vs_log2_snr, user_rates, user_rates_filtered};
pub use output::{
    bits_csv, bits_table, rate_csv, rate_csv_multi, rate_svg, size_csv, size_svg, write_output, Format,
};
pub use scenario::{
    dof_slope, run_scenario, sum_rate_slope, Execution, Policy, PrecoderRule, ResultRow, ResultTable,
    Scenario, NOISE_POWER,
};
pub use sizes::{run_size_experiment, AllocationSizeTable, SizeExperiment, SizeRow};
