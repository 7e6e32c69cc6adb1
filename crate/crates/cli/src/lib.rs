//! Command implementations behind the `dissim` binary. Each `cmd_*`
//! function computes its artifacts in memory; [`run`] writes them only once
//! the whole command has succeeded.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dissim_core::Limits;
use serde::Serialize;

mod gca;
mod output;
mod resources;
mod simulate;
mod verify;

pub use gca::cmd_gca;
pub use output::write_atomic;
pub use resources::cmd_resources;
pub use simulate::cmd_simulate;
pub use verify::{cmd_verify, verify_report, CheckResult, VerifyReport};

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Exit status for failed checks and runtime errors.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status for malformed input and usage errors.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dissim", version, about = "Dissipative Lindbladian simulation and Gibbs coherence amplitude estimation")]
pub struct RunConfig {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Where to write the main artifact; stdout when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest dense matrix side length.
    #[arg(long, global = true, default_value_t = 4096)]
    pub max_dense_dim: usize,
    /// Widest simulated state vector, in qubits.
    #[arg(long, global = true, default_value_t = 14)]
    pub max_statevector_qubits: usize,
    /// Largest enumerated Kraus set.
    #[arg(long, global = true, default_value_t = 1 << 16)]
    pub max_kraus: usize,
}

impl GlobalArgs {
    pub fn limits(&self) -> Limits {
        Limits {
            max_dense_dim: self.max_dense_dim,
            max_kraus: self.max_kraus,
            max_statevector_qubits: self.max_statevector_qubits,
        }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Evolve a state under a Lindbladian spec and check the truncation bound.
    Simulate(SimulateArgs),
    /// Estimate a Gibbs coherence amplitude from a problem file.
    Gca(GcaArgs),
    /// Cost tables for the Gibbs amplitude algorithm against QSVT.
    Resources(ResourcesArgs),
    /// Run the oracle-equivalence self-check.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialState {
    Zero,
    Plus,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PathChoice {
    Auto,
    Pauli,
    Dense,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub time: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value_t = InitialState::Zero)]
    pub initial: InitialState,
    /// Monte-Carlo trajectories to sample; zero disables sampling.
    #[arg(long, default_value_t = 0)]
    pub shots: u64,
    #[arg(long, value_enum, default_value_t = PathChoice::Auto)]
    pub path: PathChoice,
    /// JSONL file receiving one record per trajectory.
    #[arg(long)]
    pub trajectories: Option<PathBuf>,
    /// Include final states in the trajectory records.
    #[arg(long)]
    pub with_states: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodChoice {
    Exact,
    Shots,
    Mlae,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct GcaArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodChoice::Exact)]
    pub method: MethodChoice,
    /// Shots per expectation for the shot method.
    #[arg(long, default_value_t = 10_000)]
    pub shots: u64,
    /// Overrides the problem's ϵ.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Overrides the problem's δ.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Skip the dense oracle comparison.
    #[arg(long)]
    pub no_oracle: bool,
    /// Widest system compared against the dense oracle.
    #[arg(long, default_value_t = dissim_core::gca::ORACLE_MAX_QUBITS)]
    pub ceiling_qubits: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct ResourcesArgs {
    /// Single β; overrides the sweep range.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub beta_min: f64,
    #[arg(long, default_value_t = 1e4)]
    pub beta_max: f64,
    #[arg(long, default_value_t = 4)]
    pub per_decade: usize,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// Number of Hamiltonian terms.
    #[arg(long, default_value_t = 10)]
    pub m: usize,
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Hadamard count of the state-preparation circuits.
    #[arg(long, default_value_t = 0)]
    pub n_h: usize,
    /// Depth of the state-preparation circuits.
    #[arg(long, default_value_t = 0)]
    pub d: usize,
    /// Spectral norm of H; adds amplified QSVT rows.
    #[arg(long, requires = "alpha")]
    pub norm: Option<f64>,
    #[arg(long, requires = "norm")]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Scales the tolerance of the GCA oracle checks.
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    /// Negative control: perturb the tabulated η of one gate.
    #[arg(long, hide = true)]
    pub fault: Option<String>,
}

/// Everything a command produced, ready to be written.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Main artifact.
    pub report: String,
    /// Further files, written next to the main artifact.
    pub extra: Vec<(PathBuf, String)>,
    /// Lines for stdout regardless of where the report goes.
    pub summary: Vec<String>,
    pub success: bool,
}

/// An error caused by the invocation rather than the computation.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Runs a command without touching the filesystem beyond reading inputs.
pub fn execute(config: &RunConfig) -> anyhow::Result<Outcome> {
    config.global.limits().install();
    match &config.command {
        Command::Simulate(a) => cmd_simulate(a, &config.global),
        Command::Gca(a) => cmd_gca(a, &config.global),
        Command::Resources(a) => cmd_resources(a),
        Command::Verify(a) => cmd_verify(a, config.global.seed),
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
}

#[derive(Serialize)]
struct ErrorJson<'a> {
    error: ErrorBody<'a>,
}

/// Exit code and machine-readable diagnostic for an error.
pub fn classify(err: &anyhow::Error) -> (i32, String) {
    let (code, kind) = if err.downcast_ref::<UsageError>().is_some() {
        (EXIT_USAGE, "usage")
    } else if let Some(e) = err.downcast_ref::<dissim_core::Error>() {
        match e {
            dissim_core::Error::Parse(_) => (EXIT_USAGE, "parse"),
            dissim_core::Error::Ceiling { .. } | dissim_core::Error::EnumerationCap { .. } => (EXIT_FAILURE, "ceiling"),
            _ => (EXIT_FAILURE, "runtime"),
        }
    } else if err.downcast_ref::<std::io::Error>().is_some() {
        (EXIT_USAGE, "io")
    } else {
        (EXIT_FAILURE, "runtime")
    };
    let body = ErrorJson {
        error: ErrorBody {
            kind,
            message: format!("{err:#}"),
        },
    };
    (code, serde_json::to_string(&body).expect("plain strings serialise"))
}

/// Executes `config`, writes its artifacts and returns the exit code.
pub fn run(config: &RunConfig) -> i32 {
    let outcome = match execute(config) {
        Ok(o) => o,
        Err(e) => {
            let (code, json) = classify(&e);
            eprintln!("{json}");
            return code;
        }
    };
    if let Err(e) = emit(&outcome, config) {
        let (_, json) = classify(&e);
        eprintln!("{json}");
        return EXIT_FAILURE;
    }
    if outcome.success {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

fn emit(outcome: &Outcome, config: &RunConfig) -> anyhow::Result<()> {
    for (path, body) in &outcome.extra {
        write_atomic(path, body)?;
    }
    let is_verify = matches!(config.command, Command::Verify(_));
    match &config.global.output {
        Some(path) => write_atomic(path, &outcome.report)?,
        None if !is_verify => print!("{}", outcome.report),
        None => {}
    }
    for line in &outcome.summary {
        if is_verify {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
    Ok(())
}

pub(crate) fn read_input(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

pub(crate) fn to_json<T: Serialize>(v: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_error_kind() {
        let parse: anyhow::Error = dissim_core::Error::Parse("bad".into()).into();
        assert_eq!(classify(&parse).0, EXIT_USAGE);
        let ceiling: anyhow::Error = dissim_core::Error::Ceiling { dim: 8, max: 4 }.into();
        let (code, json) = classify(&ceiling);
        assert_eq!(code, EXIT_FAILURE);
        assert!(json.contains(r#""kind":"ceiling""#));
        assert_eq!(classify(&usage("no")).0, EXIT_USAGE);
        assert_eq!(classify(&anyhow::anyhow!("other")).0, EXIT_FAILURE);
    }

    #[test]
    fn parses_global_flags_after_subcommand() {
        let c = RunConfig::try_parse_from(["dissim", "verify", "--seed", "7"]).unwrap();
        assert_eq!(c.global.seed, 7);
        assert!(matches!(c.command, Command::Verify(_)));
        assert!(RunConfig::try_parse_from(["dissim", "resources", "--norm", "0.5"]).is_err());
    }
}
