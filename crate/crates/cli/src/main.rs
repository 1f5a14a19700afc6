//! Command-line front end for the boundlab entanglement toolkit:
//! state catalog and I/O, classification, witnesses and separability
//! windows, Monte Carlo surveys, slice scans, activation traces, Choi
//! duality, and Fisher information.

mod commands;
mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

use report::{exit_code_for, Format, Output};

#[derive(Parser)]
#[command(name = "boundlab", version, about = "Qudit entanglement analysis toolkit")]
struct Cli {
    /// Output format for the report.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,

    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for all randomized procedures (falls back to BOUNDLAB_SEED,
    /// then to a fixed default).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for parallel runs (default: all cores). Results
    /// are seed-deterministic regardless.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Attach wall-time to the report (off by default so equal requests
    /// produce byte-identical reports).
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a state as separable / bound / NPT entangled.
    Classify(ClassifyArgs),
    /// Witness construction, evaluation, windows, and mirrors.
    Witness {
        #[command(subcommand)]
        which: WitnessCommand,
    },
    /// Monte Carlo survey of Bell-diagonal entanglement classes.
    Survey(SurveyArgs),
    /// Classify a 2-D slice family on a grid.
    Scan(ScanArgs),
    /// Run the bound-entanglement activation protocol.
    Activate(ActivateArgs),
    /// Catalog access and state-file validation.
    State {
        #[command(subcommand)]
        which: StateCommand,
    },
    /// Choi operator / state of a named channel.
    Choi(ChoiArgs),
    /// Quantum Fisher information of a state and Hamiltonian.
    Qfi(QfiArgs),
}

#[derive(Args)]
pub struct ClassifyArgs {
    /// Catalog name or path to a state file (dense or simplex JSON).
    #[arg(long)]
    pub state: String,
    /// Catalog parameters as k=v,k=v.
    #[arg(long)]
    pub param: Option<String>,
    /// Also evaluate the correlation-tensor scan.
    #[arg(long)]
    pub scan: bool,
}

#[derive(Subcommand)]
pub enum WitnessCommand {
    /// MUB witness W(M_m, s), optionally partially transposed.
    Mub(MubArgs),
    /// SIC correlation statistic over the first `count` projectors.
    Sic(SicArgs),
    /// Separability window [L, U] of a MUB or SIC correlation observable.
    Window(WindowArgs),
    /// Mirrored witness mu*1 - W of a MUB witness.
    Mirror(MubArgs),
    /// The cataloged Bell-violation witness.
    Bell(BellArgs),
}

#[derive(Args)]
pub struct MubArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub s: usize,
    #[arg(long)]
    pub transposed: bool,
    /// Evaluate against a catalog name or state file.
    #[arg(long)]
    pub eval: Option<String>,
    #[arg(long)]
    pub param: Option<String>,
}

#[derive(Args)]
pub struct SicArgs {
    #[arg(long)]
    pub d: usize,
    /// Number of SIC projectors in the statistic (default d^2).
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub eval: Option<String>,
    #[arg(long)]
    pub param: Option<String>,
}

#[derive(Args)]
pub struct WindowArgs {
    /// Observable kind.
    #[arg(long, value_enum, default_value_t = WindowKind::Mub)]
    pub kind: WindowKind,
    #[arg(long)]
    pub d: usize,
    /// Number of MUBs.
    #[arg(long)]
    pub m: Option<usize>,
    /// Number of SIC projectors.
    #[arg(long)]
    pub count: Option<usize>,
    /// For d = 4 MUB windows: which inequivalent set to use.
    #[arg(long, value_enum, default_value_t = D4Variant::Complete)]
    pub variant: D4Variant,
    #[arg(long, default_value_t = 200)]
    pub restarts: usize,
    #[arg(long, default_value_t = 500)]
    pub iterations: usize,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum WindowKind {
    Mub,
    Sic,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum D4Variant {
    /// Subset of the complete five-basis family.
    Complete,
    /// The unextendible triple (only for m = 3).
    Unextendible,
}

#[derive(Args)]
pub struct BellArgs {
    /// Catalog name or state file to evaluate (defaults to rho_bound).
    #[arg(long)]
    pub eval: Option<String>,
    #[arg(long)]
    pub param: Option<String>,
}

#[derive(Args)]
pub struct SurveyArgs {
    #[arg(long)]
    pub d: usize,
    /// Sample count (default 100000, or 20000 for d >= 4).
    #[arg(long)]
    pub n: Option<usize>,
    /// "standard" or "seeded:<N>" for a random generalized Bell basis.
    #[arg(long, default_value = "standard")]
    pub basis: String,
    /// Comma list of detection criteria: realignment, quasi-pure,
    /// reduction, correlation-scan, esic.
    #[arg(long)]
    pub chain: Option<String>,
}

#[derive(Args)]
pub struct ScanArgs {
    /// Slice family: A, B1, B2, or B:<gamma>.
    #[arg(long)]
    pub family: String,
    #[arg(long, allow_hyphen_values = true)]
    pub x_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 41)]
    pub nx: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub y_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub y_max: f64,
    #[arg(long, default_value_t = 41)]
    pub ny: usize,
    #[arg(long, default_value = "standard")]
    pub basis: String,
}

#[derive(Args)]
pub struct ActivateArgs {
    #[arg(long)]
    pub f0: f64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 10)]
    pub rounds: usize,
    #[arg(long, value_enum, default_value_t = VariantArg::Standard)]
    pub variant: VariantArg,
    /// Re-simulate every round exactly and compare to the closed form.
    #[arg(long)]
    pub cross_check: bool,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum VariantArg {
    Standard,
    Tilde,
}

#[derive(Subcommand)]
pub enum StateCommand {
    /// Build a catalog state and emit it in the shared JSON format.
    Get(StateGetArgs),
    /// Validate a state file against the dense/simplex invariants.
    Validate(StateValidateArgs),
}

#[derive(Args)]
pub struct StateGetArgs {
    pub name: String,
    #[arg(long)]
    pub param: Option<String>,
}

#[derive(Args)]
pub struct StateValidateArgs {
    pub path: PathBuf,
}

#[derive(Args)]
pub struct ChoiArgs {
    /// Channel: identity, depolarizing, or transpose.
    #[arg(long)]
    pub channel: String,
    #[arg(long)]
    pub d: usize,
    /// Depolarizing strength.
    #[arg(long)]
    pub p: Option<f64>,
    /// Emit the normalized Choi state instead of the raw Choi operator.
    #[arg(long)]
    pub state_form: bool,
}

#[derive(Args)]
pub struct QfiArgs {
    #[arg(long)]
    pub state: String,
    #[arg(long)]
    pub param: Option<String>,
    /// Path to a Hermitian operator file.
    #[arg(long)]
    pub hamiltonian: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let seed = cli
        .seed
        .or_else(|| {
            std::env::var("BOUNDLAB_SEED")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(7);
    let format = match cli.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    let output = Output::new(format, cli.out.clone(), cli.timing);

    let result = match &cli.command {
        Command::Classify(args) => commands::classify(args, &output),
        Command::Witness { which } => commands::witness(which, seed, &output),
        Command::Survey(args) => commands::survey(args, seed, &output),
        Command::Scan(args) => commands::scan(args, &output),
        Command::Activate(args) => commands::activate(args, &output),
        Command::State { which } => commands::state(which, &output),
        Command::Choi(args) => commands::choi(args, &output),
        Command::Qfi(args) => commands::qfi(args, &output),
    };

    match result {
        Ok(()) => {}
        Err(err) => {
            let code = match err.downcast_ref::<boundlab_core::Error>() {
                Some(core_err) => exit_code_for(core_err),
                None => 2,
            };
            eprintln!(
                "{{\"error\":{}}}",
                serde_json::to_string(&err.to_string()).unwrap()
            );
            std::process::exit(code);
        }
    }
}
