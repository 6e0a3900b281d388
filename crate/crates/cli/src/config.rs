//! Scenario files: TOML key-value files whose sections group the settings of
//! each experiment. Every key is optional; missing keys take the defaults
//! listed in `--help`.

use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    #[serde(default)]
    pub network: NetworkSection,
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub wyner: WynerSection,
    #[serde(default)]
    pub apzf: ApzfSection,
    #[serde(default)]
    pub ia_alloc: IaAllocSection,
    #[serde(default)]
    pub eq3: Eq3Section,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub n_tx: Option<Vec<usize>>,
    pub n_rx: Option<Vec<usize>>,
    pub d: Option<Vec<usize>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub snr_db: Option<Vec<f64>>,
    pub draws: Option<usize>,
    pub quantizer: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WynerSection {
    pub users: Option<usize>,
    pub gamma: Option<f64>,
    pub cluster_size: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApzfSection {
    /// `alpha[row][tx]`.
    pub alpha: Option<Vec<Vec<f64>>>,
    pub floor: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IaAllocSection {
    pub users: Option<usize>,
    pub antenna_totals: Option<Vec<usize>>,
    pub draws: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Eq3Section {
    pub gamma: Option<Vec<f64>>,
    pub snr_db: Option<Vec<f64>>,
    pub max_distance: Option<usize>,
}

pub fn load(path: &std::path::Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}
