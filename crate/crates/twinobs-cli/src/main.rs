//! `twinobs` — coherence-entropy and twin-observable analysis.
//!
//! Subcommands: `analyze` (entropy ledger and weak/strong classification of
//! an observable against a state), `pto verify` / `pto construct` (twin
//! observables of a composite state), `discord` (mutual-information
//! decomposition of a twin measurement), and `selftest` (the numerical
//! certification suite).

use std::error::Error;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use twinobs::entropy::{entropy_balance, EntropyLedger};
use twinobs::relation::{is_complete, weak_strong_decompose, Regime};
use twinobs::twins::{
    discord_decomposition, pure_state_twins, verify_pto, DiscordLedger, PtoReport,
};

use twinobs_cli::fixtures::StateFile;
use twinobs_cli::selftest::{run_selftest, SelftestConfig, TheoremReport};

#[derive(Parser)]
#[command(
    name = "twinobs",
    version,
    about = "Coherence entropy, observable-state relations, and twin observables"
)]
struct Cli {
    /// Numerical tolerance for verification thresholds.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Unit in which entropy and information quantities are displayed.
    /// Residuals and probabilities are never converted.
    #[arg(long, global = true, value_enum, default_value_t = LogBase::Nat)]
    log_base: LogBase,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LogBase {
    /// Natural logarithm (nats).
    Nat,
    /// Base-2 logarithm (bits).
    Bits,
}

impl LogBase {
    fn unit(self) -> &'static str {
        match self {
            LogBase::Nat => "nat",
            LogBase::Bits => "bit",
        }
    }

    fn scale(self, value: f64) -> f64 {
        match self {
            LogBase::Nat => value,
            LogBase::Bits => value / std::f64::consts::LN_2,
        }
    }

    fn scale_opt(self, value: Option<f64>) -> Option<f64> {
        value.map(|v| self.scale(v))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Entropy ledger, weak/strong classification, and completeness of an
    /// observable against a state.
    Analyze {
        /// State fixture (kind "density" or "pure").
        #[arg(long)]
        state: PathBuf,
        /// Observable fixture (kind "observable").
        #[arg(long)]
        observable: PathBuf,
    },
    /// Twin-observable verification and construction.
    #[command(subcommand)]
    Pto(PtoCommand),
    /// Mutual-information decomposition of a twin measurement: coherence
    /// entropy, quasi-classical part, and discord.
    Discord {
        /// Composite state fixture with two dims.
        #[arg(long)]
        state: PathBuf,
        /// Observable fixture for subsystem 1.
        #[arg(long)]
        a1: PathBuf,
        /// Observable fixture for subsystem 2.
        #[arg(long)]
        a2: PathBuf,
    },
    /// Run the numerical certification suite. Exits 0 exactly when every
    /// check passes.
    Selftest {
        /// Base seed (the TWINOBS_SEED environment variable overrides this).
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Number of independent trials.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Largest subsystem dimension drawn (at least 4).
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(4..=64))]
        max_dim: u64,
    },
}

#[derive(Subcommand)]
enum PtoCommand {
    /// Verify that two subsystem observables are twins in a composite state.
    Verify {
        /// Composite state fixture with two dims.
        #[arg(long)]
        state: PathBuf,
        /// Observable fixture for subsystem 1.
        #[arg(long)]
        a1: PathBuf,
        /// Observable fixture for subsystem 2.
        #[arg(long)]
        a2: PathBuf,
    },
    /// Construct the canonical twins of a pure composite state and verify
    /// them.
    Construct {
        /// Pure composite state fixture (kind "pure", two dims).
        #[arg(long)]
        state: PathBuf,
        /// Where to save the subsystem-1 twin; printed inline when omitted.
        #[arg(long)]
        out_a1: Option<PathBuf>,
        /// Where to save the subsystem-2 twin; printed inline when omitted.
        #[arg(long)]
        out_a2: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn Error>> {
    match &cli.command {
        Command::Analyze { state, observable } => {
            analyze(&cli, state, observable)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Pto(PtoCommand::Verify { state, a1, a2 }) => {
            pto_verify(&cli, state, a1, a2)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Pto(PtoCommand::Construct { state, out_a1, out_a2 }) => {
            pto_construct(&cli, state, out_a1.as_deref(), out_a2.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Discord { state, a1, a2 } => {
            discord(&cli, state, a1, a2)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest { seed, trials, max_dim } => {
            selftest(&cli, *seed, *trials, *max_dim as usize)
        }
    }
}

/// Resolve the self-test seed: the TWINOBS_SEED environment variable, when
/// set, overrides the command-line flag.
fn seed_with_env_override(flag: u64) -> Result<u64, Box<dyn Error>> {
    match std::env::var("TWINOBS_SEED") {
        Ok(raw) => raw
            .trim()
            .parse::<u64>()
            .map_err(|e| format!("TWINOBS_SEED must be an unsigned integer: {e}").into()),
        Err(std::env::VarError::NotPresent) => Ok(flag),
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct AnalyzeOutput {
    units: &'static str,
    observable_entropy: f64,
    coherence_entropy: f64,
    state_entropy: f64,
    measured_state_entropy: f64,
    mean_component_entropy: f64,
    information_gain: f64,
    balance_defect: f64,
    regime: Regime,
    weak_probability: f64,
    weak_branches: usize,
    strong_branches: usize,
    undetectable_branches: usize,
    complete: bool,
}

fn analyze(cli: &Cli, state: &Path, observable: &Path) -> Result<(), Box<dyn Error>> {
    let rho = StateFile::load(state)?.into_density()?;
    let a = StateFile::load(observable)?.into_observable()?;

    let ledger: EntropyLedger = entropy_balance(&a, &rho)?;
    let decomposition = weak_strong_decompose(&a, &rho, cli.tol)?;
    let complete = is_complete(&a, &rho);

    let base = cli.log_base;
    let output = AnalyzeOutput {
        units: base.unit(),
        observable_entropy: base.scale(ledger.observable_entropy),
        coherence_entropy: base.scale(ledger.coherence_entropy),
        state_entropy: base.scale(ledger.state_entropy),
        measured_state_entropy: base.scale(ledger.luders_entropy),
        mean_component_entropy: base.scale(ledger.avg_component_entropy),
        information_gain: base.scale(ledger.residual),
        balance_defect: ledger.balance_defect(),
        regime: decomposition.regime,
        weak_probability: decomposition.weak_probability,
        weak_branches: decomposition.weak.len(),
        strong_branches: decomposition.strong.len(),
        undetectable_branches: decomposition.undetectable.len(),
        complete,
    };

    match cli.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&output)?),
        Format::Text => {
            println!("units                    {}", output.units);
            println!("observable entropy       {:.9}", output.observable_entropy);
            println!("coherence entropy        {:.9}", output.coherence_entropy);
            println!("state entropy            {:.9}", output.state_entropy);
            println!("measured-state entropy   {:.9}", output.measured_state_entropy);
            println!("mean component entropy   {:.9}", output.mean_component_entropy);
            println!("information gain         {:.9}", output.information_gain);
            println!("balance defect           {:.3e}", output.balance_defect);
            println!("regime                   {}", regime_name(output.regime));
            println!("weak probability         {:.9}", output.weak_probability);
            println!(
                "branches                 {} weak / {} strong / {} undetectable",
                output.weak_branches, output.strong_branches, output.undetectable_branches
            );
            println!("complete                 {}", output.complete);
        }
    }
    Ok(())
}

fn regime_name(regime: Regime) -> &'static str {
    match regime {
        Regime::Strong => "strong",
        Regime::Weak => "weak",
        Regime::Intermediary => "intermediary",
    }
}

fn print_pto_report(report: &PtoReport) {
    println!("twins                    {}", if report.is_pto { "yes" } else { "no" });
    println!(
        "algebraic twins          {}",
        if report.is_algebraic_twin { "yes" } else { "no" }
    );
    println!(
        "derived compatibility    {:.3e} / {:.3e}",
        report.derived_compatibility.0, report.derived_compatibility.1
    );
    println!("algebraic twin residual  {:.3e}", report.algebraic_twin_residual);
    println!(
        "matched probability      {:.9} / {:.9}",
        report.total_probability_1, report.total_probability_2
    );
    if let Some(diagnostic) = &report.diagnostic {
        println!("diagnostic               {diagnostic}");
    }
    println!("pairs:");
    for pair in &report.pairs {
        println!(
            "  a1={:<12.6} a2={:<12.6} p={:.9}  algebraic={:.3e}  measurement={:.3e}",
            pair.eigenvalue_1,
            pair.eigenvalue_2,
            pair.probability,
            pair.algebraic_residual,
            pair.measurement_residual
        );
    }
}

fn pto_verify(cli: &Cli, state: &Path, a1: &Path, a2: &Path) -> Result<(), Box<dyn Error>> {
    let rho12 = StateFile::load(state)?.into_density()?;
    let a1 = StateFile::load(a1)?.into_observable()?;
    let a2 = StateFile::load(a2)?.into_observable()?;
    let report = verify_pto(&a1, &a2, &rho12, cli.tol)?;

    match cli.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        Format::Text => print_pto_report(&report),
    }
    Ok(())
}

#[derive(Serialize)]
struct ConstructOutput {
    report: PtoReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    a1_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    a2_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    a1: Option<StateFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    a2: Option<StateFile>,
}

fn pto_construct(
    cli: &Cli,
    state: &Path,
    out_a1: Option<&Path>,
    out_a2: Option<&Path>,
) -> Result<(), Box<dyn Error>> {
    let file = StateFile::load(state)?;
    let dims = file.dims.clone();
    if dims.len() != 2 {
        return Err(format!(
            "twin construction needs a composite state with two dims, found {:?}",
            dims
        )
        .into());
    }
    let (d1, d2) = (dims[0], dims[1]);
    let phi = file.into_vector()?;
    let (a1, a2) = pure_state_twins(&phi, (d1, d2))?;

    // Certify the construction before reporting it.
    let rho12 = twinobs::operator::DensityOperator::bipartite_from_pure(&phi, d1, d2)?;
    let report = verify_pto(&a1, &a2, &rho12, cli.tol)?;

    let file_a1 = StateFile::from_observable(&a1, &[d1]);
    let file_a2 = StateFile::from_observable(&a2, &[d2]);
    if let Some(path) = out_a1 {
        file_a1.save(path)?;
    }
    if let Some(path) = out_a2 {
        file_a2.save(path)?;
    }

    let output = ConstructOutput {
        report,
        a1_path: out_a1.map(|p| p.display().to_string()),
        a2_path: out_a2.map(|p| p.display().to_string()),
        a1: if out_a1.is_none() { Some(file_a1) } else { None },
        a2: if out_a2.is_none() { Some(file_a2) } else { None },
    };

    match cli.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&output)?),
        Format::Text => {
            print_pto_report(&output.report);
            match (&output.a1_path, &output.a2_path) {
                (Some(p1), Some(p2)) => {
                    println!("saved                    a1 -> {p1}");
                    println!("                         a2 -> {p2}");
                }
                _ => println!(
                    "note                     pass --out-a1/--out-a2 to save the twins as fixtures"
                ),
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct DiscordOutput {
    units: &'static str,
    pto: PtoReport,
    ledger: DiscordLedger,
}

fn discord(cli: &Cli, state: &Path, a1: &Path, a2: &Path) -> Result<(), Box<dyn Error>> {
    let rho12 = StateFile::load(state)?.into_density()?;
    if rho12.bipartite_dims().is_none() {
        return Err("discord analysis needs a composite state with two dims".into());
    }
    let a1 = StateFile::load(a1)?.into_observable()?;
    let a2 = StateFile::load(a2)?.into_observable()?;
    let analysis = discord_decomposition(&rho12, &a1, &a2, cli.tol)?;

    let base = cli.log_base;
    let mut ledger = analysis.ledger.clone();
    ledger.mutual_information = base.scale(ledger.mutual_information);
    ledger.coherence_entropy = base.scale(ledger.coherence_entropy);
    ledger.luders_information = base.scale(ledger.luders_information);
    ledger.observable_entropy = base.scale_opt(ledger.observable_entropy);
    ledger.residual_information = base.scale_opt(ledger.residual_information);
    ledger.quasi_classical_information = base.scale_opt(ledger.quasi_classical_information);
    ledger.discord = base.scale_opt(ledger.discord);

    let output = DiscordOutput { units: base.unit(), pto: analysis.pto, ledger };

    match cli.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&output)?),
        Format::Text => {
            print_pto_report(&output.pto);
            let ledger = &output.ledger;
            println!("units                    {}", output.units);
            println!("mutual information       {:.9}", ledger.mutual_information);
            println!("coherence entropy        {:.9}", ledger.coherence_entropy);
            println!("surviving information    {:.9}", ledger.luders_information);
            match ledger.observable_entropy {
                Some(h) => println!("observable entropy       {h:.9}"),
                None => println!("observable entropy       (withheld)"),
            }
            match ledger.residual_information {
                Some(r) => println!("residual information     {r:.9}"),
                None => println!("residual information     (withheld)"),
            }
            match ledger.quasi_classical_information {
                Some(q) => println!("quasi-classical part     {q:.9}"),
                None => println!("quasi-classical part     (withheld)"),
            }
            match ledger.discord {
                Some(d) => println!("discord                  {d:.9}"),
                None => println!("discord                  (withheld)"),
            }
            if let Some(asym) = ledger.side_asymmetry {
                println!("side asymmetry           {asym:.3e}");
            }
            if let Some(withheld) = &ledger.withheld {
                println!("withheld                 {}", serde_json::to_string(withheld)?);
            }
        }
    }
    Ok(())
}

fn selftest(
    cli: &Cli,
    seed_flag: u64,
    trials: usize,
    max_dim: usize,
) -> Result<ExitCode, Box<dyn Error>> {
    let seed = seed_with_env_override(seed_flag)?;
    let config = SelftestConfig { seed, trials, max_dim, tolerance: cli.tol };
    let report = run_selftest(&config);

    match cli.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        Format::Text => print_selftest_report(&report),
    }

    Ok(if report.all_pass() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn print_selftest_report(report: &TheoremReport) {
    println!(
        "seed {}, {} trials, max dim {}, tolerance {:.1e}",
        report.seed, report.trials, report.max_dim, report.tolerance
    );
    for record in &report.records {
        println!(
            "{} {:<34} {:>6} instances   max residual {:.3e}  (tol {:.1e})",
            if record.pass { "PASS" } else { "FAIL" },
            record.name,
            record.instances,
            record.max_residual,
            record.tolerance
        );
    }
    if !report.panics.is_empty() {
        println!("panics:");
        for p in &report.panics {
            println!("  {p}");
        }
    }
    let passed = report.records.iter().filter(|r| r.pass).count();
    println!(
        "result: {} ({}/{} checks, {:.2} s)",
        if report.all_pass() { "PASS" } else { "FAIL" },
        passed,
        report.records.len(),
        report.wall_time_secs
    );
}
