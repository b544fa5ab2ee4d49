use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use dnsload::experiments::{
    fit_and_predict, run_gsa_experiment, run_simulation, run_validation, write_error_csv, ExperimentError, GsaScenario,
    MeasurementSource, Prediction, RunManifest, ScenarioConfig, SimulationScenario, CONFIG_VERSION,
};
use dnsload::gsa::write_gsa_csv;
use dnsload::model::heterogeneous_load;
use dnsload::sim::{write_population_csv, write_sim_result_csv};
use dnsload::{MeasurementPoint, TtlSeconds};

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;
const EXIT_INFEASIBLE: u8 = 4;

#[derive(Parser)]
#[command(name = "dnsload", version, about = "Authoritative DNS load under TTL changes")]
struct Cli {
    /// Size of the worker pool (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Report progress on stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one population at one TTL.
    Simulate(RunArgs),
    /// Fit the load model to measurements and predict the load at a new TTL.
    Predict {
        #[arg(long)]
        config: PathBuf,
        /// Directory for prediction.json; printed only when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an estimator against simulated ground truth over a TTL grid.
    Validate {
        #[command(flatten)]
        run: RunArgs,
        /// Compute the ground-truth load exactly instead of simulating it.
        #[arg(long)]
        analytic_truth: bool,
    },
    /// Sensitivity analysis of the single-measurement predictor.
    Gsa(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed in the config; the manifest records the one used.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct PredictConfig {
    version: u32,
    measurements: Vec<MeasurementSpec>,
    #[serde(default)]
    n_resolvers: Option<f64>,
    estimation_ttl: f64,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct MeasurementSpec {
    ttl: f64,
    rate: f64,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure { code: EXIT_CONFIG, message: message.into() }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Failure { code: EXIT_RUNTIME, message: message.into() }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Config(_) => Failure::config(e.to_string()),
            ExperimentError::Estimation(ref inner) => {
                Failure { code: EXIT_INFEASIBLE, message: format!("{}: {e}", inner.name()) }
            }
            _ => Failure::runtime(e.to_string()),
        }
    }
}

/// Anything wrong with a config file, including parameter validation, is a
/// config error.
fn as_config(e: ExperimentError) -> Failure {
    Failure::config(e.to_string())
}

fn read_config(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))
}

/// Files staged in memory and written only once the whole run succeeded.
struct Outputs {
    dir: PathBuf,
    files: Vec<(&'static str, Vec<u8>)>,
}

impl Outputs {
    fn new(dir: &Path) -> Self {
        Outputs { dir: dir.to_path_buf(), files: Vec::new() }
    }

    fn add(&mut self, name: &'static str, contents: Vec<u8>) {
        self.files.push((name, contents));
    }

    fn names(&self) -> Vec<String> {
        self.files.iter().map(|(n, _)| n.to_string()).collect()
    }

    /// Each file goes to a temporary sibling first and is renamed into place.
    fn commit(self) -> Result<(), Failure> {
        let io = |e: std::io::Error| Failure::runtime(format!("writing to {}: {e}", self.dir.display()));
        fs::create_dir_all(&self.dir).map_err(io)?;
        let mut staged = Vec::new();
        for (name, contents) in &self.files {
            let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(io)?;
            tmp.write_all(contents).map_err(io)?;
            tmp.as_file().sync_all().map_err(io)?;
            staged.push((tmp, self.dir.join(name)));
        }
        for (tmp, dest) in staged {
            tmp.persist(&dest).map_err(|e| io(e.error))?;
        }
        Ok(())
    }
}

fn csv_bytes<E: std::fmt::Display>(f: impl FnOnce(&mut Vec<u8>) -> Result<(), E>) -> Result<Vec<u8>, Failure> {
    let mut buf = Vec::new();
    f(&mut buf).map_err(|e| Failure::runtime(e.to_string()))?;
    Ok(buf)
}

fn finish(mut manifest: RunManifest, mut outputs: Outputs) -> Result<(), Failure> {
    outputs.add("manifest.json", Vec::new());
    manifest.outputs = outputs.names();
    outputs.files.last_mut().expect("manifest staged").1 = manifest.to_json().into_bytes();
    outputs.commit()
}

fn simulate(args: &RunArgs, verbose: bool) -> Result<(), Failure> {
    let mut scenario = SimulationScenario::from_json(&read_config(&args.config)?).map_err(as_config)?;
    if let Some(s) = args.seed {
        scenario.seed = s;
    }
    if verbose {
        eprintln!("simulating {} resolvers and {} full clients", scenario.n_resolvers, scenario.n_full_clients);
    }
    let run = run_simulation(&scenario)?;
    let tau = TtlSeconds::new(scenario.ttl).map_err(|e| Failure::config(e.to_string()))?;
    let expected = heterogeneous_load(&run.population.resolver_rates, run.population.full_client_total(), tau);

    let mut out = Outputs::new(&args.out);
    out.add("population.csv", csv_bytes(|b| write_population_csv(&run.population, b))?);
    out.add("sim_result.csv", csv_bytes(|b| write_sim_result_csv(&run.result, b))?);
    let mut manifest = RunManifest::new("simulate", &scenario, scenario.seed);
    manifest.summary.insert("aggregate_rate".into(), json!(run.result.aggregate_rate.value()));
    manifest.summary.insert("expected_rate".into(), json!(expected.value()));
    finish(manifest, out)
}

fn print_prediction(p: &Prediction) {
    println!("N~     = {}", p.estimate.n_tilde);
    println!("A~     = {}", p.estimate.a_tilde.value());
    println!("D~     = {}", p.estimate.d_tilde.value());
    println!("B({}) = {}", p.tau_star.value(), p.predicted.value());
}

fn predict(config: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let cfg: PredictConfig = serde_json::from_str(&read_config(config)?)
        .map_err(|e| Failure::config(format!("{}: {e}", config.display())))?;
    if cfg.version != CONFIG_VERSION {
        return Err(Failure::config(format!("unsupported config version {}", cfg.version)));
    }
    let points = cfg
        .measurements
        .iter()
        .map(|m| MeasurementPoint::new(m.ttl, m.rate))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::config(e.to_string()))?;
    let tau = TtlSeconds::new(cfg.estimation_ttl).map_err(|e| Failure::config(e.to_string()))?;
    let prediction = fit_and_predict(&points, cfg.n_resolvers, tau)?;
    print_prediction(&prediction);
    if let Some(dir) = out {
        let body = json!({ "config": cfg, "prediction": prediction });
        let mut text = serde_json::to_string_pretty(&body).expect("prediction serializes");
        text.push('\n');
        let mut outputs = Outputs::new(dir);
        outputs.add("prediction.json", text.into_bytes());
        outputs.commit()?;
    }
    Ok(())
}

fn validate(args: &RunArgs, analytic_truth: bool, verbose: bool) -> Result<(), Failure> {
    let mut cfg = ScenarioConfig::from_json(&read_config(&args.config)?).map_err(as_config)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if analytic_truth {
        cfg.truth = MeasurementSource::Analytic;
    }
    if verbose {
        let g = cfg.effective_grid();
        eprintln!("validating {:?} over {} grid points", cfg.method, g.first.len() * g.second.len());
    }
    let run = run_validation(&cfg)?;

    let mut out = Outputs::new(&args.out);
    out.add("validation.csv", csv_bytes(|b| write_error_csv(&run.rows, b))?);
    let mut manifest = RunManifest::new("validate", &cfg, cfg.seed);
    let ok = run.rows.iter().filter(|r| r.is_ok()).count();
    let worst = run
        .rows
        .iter()
        .filter_map(|r| r.relative_error)
        .map(f64::abs)
        .fold(None, |m: Option<f64>, e| Some(m.map_or(e, |m| m.max(e))));
    manifest.summary.insert("rows".into(), json!(run.rows.len()));
    manifest.summary.insert("rows_ok".into(), json!(ok));
    manifest.summary.insert("max_abs_relative_error".into(), json!(worst));
    if verbose {
        eprintln!("{ok} of {} rows estimated", run.rows.len());
    }
    finish(manifest, out)
}

fn gsa(args: &RunArgs, verbose: bool) -> Result<(), Failure> {
    let mut scenario = GsaScenario::from_json(&read_config(&args.config)?).map_err(as_config)?;
    if let Some(s) = args.seed {
        scenario.seed = s;
    }
    if verbose {
        eprintln!(
            "running {} on the predictor at tau0={} tau*={}",
            scenario.method.as_str(),
            scenario.tau0,
            scenario.tau_star
        );
    }
    let (result, model) = run_gsa_experiment(&scenario).map_err(|e| match e {
        // an infeasible box is a property of the run, not of the file syntax
        ExperimentError::Gsa(_) => Failure::runtime(e.to_string()),
        e => e.into(),
    })?;

    let mut out = Outputs::new(&args.out);
    out.add("gsa.csv", csv_bytes(|b| write_gsa_csv(&result.rows(), b))?);
    let mut manifest = RunManifest::new("gsa", &scenario, scenario.seed);
    manifest.summary.insert("input_space".into(), json!(model.space()));
    manifest.summary.insert("center".into(), json!(model.center()));
    finish(manifest, out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    }
    let res = match &cli.command {
        Command::Simulate(a) => simulate(a, cli.verbose),
        Command::Predict { config, out } => predict(config, out.as_deref()),
        Command::Validate { run, analytic_truth } => validate(run, *analytic_truth, cli.verbose),
        Command::Gsa(a) => gsa(a, cli.verbose),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
