use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};


use csit_core::allocation::{superfeasible_heuristic_allocation, tightly_feasible_allocation};
use csit_core::csit::{CsitAllocation, QuantizerKind, ScalingAllocation};
use csit_core::eval::{
    apzf_scenarios, bits_csv, bits_table, rate_csv_multi, rate_svg, run_all, run_size_experiment, size_csv,
    size_svg, wyner_scenarios, write_output, Execution, Format, RateSettings, SizeExperiment,
};
use csit_core::ia::{ConstraintSystem, SubIc};
use csit_core::precoding::PowerNormalization;
use csit_core::{AntennaConfig, Error};

mod config;

use config::FileConfig;

/// Simulations of CSIT sharing among cooperating transmitters.
#[derive(Debug, Parser)]
#[command(name = "csit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file (TOML with sections such as [experiment], [wyner]).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed of every random draw [default: 1, or `seed` in the file].
    #[arg(long)]
    seed: Option<u64>,
    /// Output file [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or svg.
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Run Monte-Carlo draws on one thread (results are identical).
    #[arg(long)]
    serial: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Properness, tightness and CSIT allocation sizes of a network
    /// ([network] n_tx, n_rx, d; default: n_tx = n_rx = 2,2,2 and d = 1).
    Feasibility {
        #[command(flatten)]
        common: Common,
        /// TX antenna counts, comma separated.
        #[arg(long, value_delimiter = ',')]
        n_tx: Option<Vec<usize>>,
        /// RX antenna counts, comma separated.
        #[arg(long, value_delimiter = ',')]
        n_rx: Option<Vec<usize>>,
        /// Streams per user, comma separated [default: 1 each].
        #[arg(long, value_delimiter = ',')]
        d: Option<Vec<usize>>,
        /// Also print the allocation table of the heuristic.
        #[arg(long)]
        table: bool,
    },
    /// Mean IA-driven allocation size over random antenna distributions
    /// ([ia_alloc] users = 3, antenna_totals = 12..16, draws = 1000).
    IaAlloc {
        #[command(flatten)]
        common: Common,
    },
    /// Wyner network sum rates under distance-based, uniform, clustered,
    /// conventional and perfect CSIT ([wyner] users = 15, gamma = 0.5,
    /// cluster_size = 3; [experiment] snr_db = 10..60 step 10, draws = 200,
    /// quantizer = surrogate).
    WynerRate {
        #[command(flatten)]
        common: Common,
    },
    /// Two-user sum rates of perfect-CSIT ZF, distributed ZF and
    /// active-passive ZF ([apzf] alpha = [[1, 0.5], [0, 0.7]] indexed
    /// [row][tx], floor = 4; [experiment] snr_db = 10..60 step 10,
    /// draws = 500).
    ApzfRate {
        #[command(flatten)]
        common: Common,
    },
    /// Feedback bits per TX-row distance
    /// ([eq3] gamma = 0.5,1; snr_db = 20; max_distance = 3).
    Eq3Table {
        #[command(flatten)]
        common: Common,
        /// Interference levels, comma separated.
        #[arg(long, value_delimiter = ',')]
        gamma: Option<Vec<f64>>,
        /// SNR points in dB, comma separated.
        #[arg(long, value_delimiter = ',')]
        snr_db: Option<Vec<f64>>,
        /// Largest distance listed.
        #[arg(long)]
        max_distance: Option<usize>,
    },
}

enum Failure {
    Config(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::IllConditioned(_) | Error::Infeasible | Error::EmptyTable => Failure::Numerical(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn load(common: &Common) -> CliResult<FileConfig> {
    match &common.config {
        Some(p) => config::load(p).map_err(Failure::Config),
        None => Ok(FileConfig::default()),
    }
}

fn seed(common: &Common, file: &FileConfig) -> u64 {
    common.seed.or(file.seed).unwrap_or(1)
}

fn execution(common: &Common) -> Execution {
    if common.serial {
        Execution::Serial
    } else {
        Execution::Parallel
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    write_output(out, text).map_err(|e| Failure::Config(format!("cannot write output: {e}")))
}

fn rate_settings(common: &Common, file: &FileConfig, default_draws: usize) -> CliResult<RateSettings> {
    let quantizer = match file.experiment.quantizer.as_deref().unwrap_or("surrogate") {
        "surrogate" => QuantizerKind::Surrogate,
        "rvq" => QuantizerKind::Rvq,
        q => return Err(Failure::Config(format!("unknown quantizer `{q}`"))),
    };
    Ok(RateSettings {
        snr_db: file.experiment.snr_db.clone().unwrap_or_else(|| vec![10.0, 20.0, 30.0, 40.0, 50.0, 60.0]),
        draws: file.experiment.draws.unwrap_or(default_draws),
        seed: seed(common, file),
        quantizer,
    })
}

fn describe(s: &SubIc) -> String {
    let list = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    format!("tx {{{}}} rx {{{}}}", list(s.tx_set()), list(s.rx_set()))
}

fn feasibility(
    common: &Common,
    n_tx: Option<Vec<usize>>,
    n_rx: Option<Vec<usize>>,
    d: Option<Vec<usize>>,
    table: bool,
) -> CliResult<()> {
    if common.format != Format::Csv {
        return Err(Failure::Config("feasibility prints text only".into()));
    }
    let file = load(common)?;
    let n_tx = n_tx.or(file.network.n_tx).unwrap_or_else(|| vec![2, 2, 2]);
    let n_rx = n_rx.or(file.network.n_rx).unwrap_or_else(|| n_tx.clone());
    let d = d.or(file.network.d).unwrap_or_else(|| vec![1; n_tx.len()]);
    let config = AntennaConfig::new(n_tx, n_rx, d)?;
    let system = ConstraintSystem::new(&config);
    let full = SubIc::full(config.users());
    let proper = system.is_proper(&full)?;
    let mut out = String::new();
    out.push_str(&format!("users: {}\n", config.users()));
    out.push_str(&format!("variables: {}\n", system.variable_count(&full)));
    out.push_str(&format!("constraints: {}\n", system.constraint_count(&full)));
    out.push_str(&format!("proper: {proper}\n"));
    out.push_str(&format!("tightly_feasible: {}\n", system.is_tightly_feasible(&full)?));
    out.push_str(&format!("super_feasible: {}\n", system.is_super_feasible(&full)?));
    if config.stream_counts().iter().any(|&s| s > 1) {
        out.push_str("note: with several streams per user properness is only necessary\n");
    }
    out.push_str(&format!("complete_scalars: {}\n", CsitAllocation::complete(&config).size().scalars));
    if proper {
        let tight = tightly_feasible_allocation(&config)?;
        let heur = superfeasible_heuristic_allocation(&config)?;
        out.push_str(&format!("tight_scalars: {}\n", tight.scalars()));
        out.push_str(&format!("heuristic_scalars: {}\n", heur.scalars()));
        for (j, s) in heur.plan.subics.iter().enumerate() {
            let s = s.as_ref().map_or("none".to_string(), describe);
            out.push_str(&format!("tx {j} aligns over: {s}\n"));
        }
        if table {
            out.push_str(&heur.csit.to_table());
        }
    }
    emit(common.out.as_deref(), &out)
}

fn ia_alloc(common: &Common) -> CliResult<()> {
    let file = load(common)?;
    let e = SizeExperiment {
        users: file.ia_alloc.users.unwrap_or(3),
        antenna_totals: file.ia_alloc.antenna_totals.clone().unwrap_or_else(|| (12..=16).collect()),
        draws: file.ia_alloc.draws.unwrap_or(1000),
        seed: seed(common, &file),
    };
    let t = run_size_experiment(&e, execution(common))?;
    let text = match common.format {
        Format::Csv => size_csv(&t)?,
        Format::Svg => size_svg(&t)?,
    };
    emit(common.out.as_deref(), &text)
}

fn rate_output(common: &Common, tables: &[csit_core::eval::ResultTable]) -> CliResult<()> {
    let text = match common.format {
        Format::Csv => rate_csv_multi(tables)?,
        Format::Svg => rate_svg(tables)?,
    };
    emit(common.out.as_deref(), &text)
}

fn wyner_rate(common: &Common) -> CliResult<()> {
    let file = load(common)?;
    let s = rate_settings(common, &file, 200)?;
    let scenarios = wyner_scenarios(
        file.wyner.users.unwrap_or(15),
        file.wyner.gamma.unwrap_or(0.5),
        file.wyner.cluster_size.unwrap_or(3),
        &s,
    )?;
    rate_output(common, &run_all(&scenarios, execution(common))?)
}

fn apzf_rate(common: &Common) -> CliResult<()> {
    let file = load(common)?;
    let s = rate_settings(common, &file, 500)?;
    let alpha = file.apzf.alpha.clone().unwrap_or_else(|| vec![vec![1.0, 0.5], vec![0.0, 0.7]]);
    if alpha.len() != 2 || alpha.iter().any(|r| r.len() != 2) {
        return Err(Failure::Config("apzf.alpha must be a 2x2 array".into()));
    }
    let alpha = ScalingAllocation::new(2, alpha.concat())?;
    let norm = PowerNormalization { floor: file.apzf.floor.unwrap_or(PowerNormalization::apzf_default().floor) };
    let scenarios = apzf_scenarios(&alpha, norm, &s)?;
    rate_output(common, &run_all(&scenarios, execution(common))?)
}

fn eq3_table(
    common: &Common,
    gamma: Option<Vec<f64>>,
    snr_db: Option<Vec<f64>>,
    max_distance: Option<usize>,
) -> CliResult<()> {
    if common.format != Format::Csv {
        return Err(Failure::Config("the bit table is printed as csv only".into()));
    }
    let file = load(common)?;
    let rows = bits_table(
        &gamma.or(file.eq3.gamma).unwrap_or_else(|| vec![0.5, 1.0]),
        &snr_db.or(file.eq3.snr_db).unwrap_or_else(|| vec![20.0]),
        max_distance.or(file.eq3.max_distance).unwrap_or(3),
    )?;
    emit(common.out.as_deref(), &bits_csv(&rows)?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Feasibility { common, n_tx, n_rx, d, table } => feasibility(&common, n_tx, n_rx, d, table),
        Command::IaAlloc { common } => ia_alloc(&common),
        Command::WynerRate { common } => wyner_rate(&common),
        Command::ApzfRate { common } => apzf_rate(&common),
        Command::Eq3Table { common, gamma, snr_db, max_distance } => eq3_table(&common, gamma, snr_db, max_distance),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
    }
}
