//! `mermin` — command-line front end for the Mermin device laboratory.
//!
//! Subcommands: `simulate` (quantum Monte Carlo), `classical` (instruction
//! set raffle), `analytic` (exact correlations, no sampling), `conserve`
//! (average-only conservation analysis of a trial log), `check` (the full
//! invariant suite), `rerun` (reproduce a run from its manifest).
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid flags or values,
//! 3 conservation test failure.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mermin_device::bell_states::{
    correlation_analytic, joint_distribution, BellKind, SymmetryPlane,
};
use mermin_device::checks;
use mermin_device::classical_lhv::{
    sample_raffle, ClassicalPolicy, CorrelationMode, InstructionSet, RaffleSpec, SetDistribution,
};
use mermin_device::conservation::{
    conservation_test, direct_correlation, partition_by_outcome, reconstruct_correlation, Party,
};
use mermin_device::io::{read_log, write_log, LogFormat, RunManifest, SummaryTable};
use mermin_device::quantum_sampler::{
    run_experiment, DeviceSetting, ExperimentSpec, SettingPolicy, SettingValue, TrialRecord,
};
use mermin_device::spin_algebra::Direction;

const EXIT_OK: u8 = 0;
const EXIT_IO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CONSERVATION: u8 = 3;

#[derive(Parser)]
#[command(name = "mermin", version, about = "Mermin device simulation and verification laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Seeded quantum Monte Carlo run for a Bell state.
    Simulate(SimulateArgs),
    /// Seeded instruction-set raffle run.
    Classical(ClassicalArgs),
    /// Exact correlations and joint distributions, no sampling.
    Analytic(AnalyticArgs),
    /// Partition a trial log and test average-only conservation.
    Conserve(ConserveArgs),
    /// Run the full invariant suite.
    Check(CheckArgs),
    /// Reproduce a run from its manifest.
    Rerun(RerunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StateArg {
    PsiMinus,
    PsiPlus,
    PhiMinus,
    PhiPlus,
}

impl StateArg {
    fn kind(&self) -> BellKind {
        match self {
            StateArg::PsiMinus => BellKind::PsiMinus,
            StateArg::PsiPlus => BellKind::PsiPlus,
            StateArg::PhiMinus => BellKind::PhiMinus,
            StateArg::PhiPlus => BellKind::PhiPlus,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            StateArg::PsiMinus => "psi-minus",
            StateArg::PsiPlus => "psi-plus",
            StateArg::PhiMinus => "phi-minus",
            StateArg::PhiPlus => "phi-plus",
        }
    }

    fn parse(name: &str) -> Option<Self> {
        match name {
            "psi-minus" => Some(StateArg::PsiMinus),
            "psi-plus" => Some(StateArg::PsiPlus),
            "phi-minus" => Some(StateArg::PhiMinus),
            "phi-plus" => Some(StateArg::PhiPlus),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    /// Three device settings, drawn uniformly per party per trial.
    Device,
    /// Fixed in-plane angles alpha and beta.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Jsonl,
    Csv,
}

impl FormatArg {
    fn format(&self) -> LogFormat {
        match self {
            FormatArg::Jsonl => LogFormat::Jsonl,
            FormatArg::Csv => LogFormat::Csv,
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Bell state to sample.
    #[arg(long, value_enum)]
    state: StateArg,
    #[arg(long, value_enum, default_value = "device")]
    policy: PolicyArg,
    /// Alice's fixed angle in degrees (fixed policy).
    #[arg(long)]
    alpha: Option<f64>,
    /// Bob's fixed angle in degrees (fixed policy).
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    trials: u64,
    /// 64-bit run seed; MERMIN_SEED provides the default.
    #[arg(long, env = "MERMIN_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "jsonl")]
    format: FormatArg,
    /// Trial log path; the manifest is written alongside as <out>.manifest.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ClassicalArgs {
    /// Instruction-set distribution: uniform, two-one, or point:SET (e.g. point:RRG).
    #[arg(long)]
    dist: String,
    #[arg(long, value_enum, default_value = "device")]
    policy: PolicyArg,
    /// Alice's fixed device setting 1..3 (fixed policy).
    #[arg(long)]
    alice: Option<u8>,
    /// Bob's fixed device setting 1..3 (fixed policy).
    #[arg(long)]
    bob: Option<u8>,
    /// Whether Bob carries the same set or the sign-flipped one.
    #[arg(long, default_value = "correlated")]
    mode: ModeArg,
    #[arg(long)]
    trials: u64,
    #[arg(long, env = "MERMIN_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "jsonl")]
    format: FormatArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Correlated,
    Anticorrelated,
}

impl ModeArg {
    fn mode(&self) -> CorrelationMode {
        match self {
            ModeArg::Correlated => CorrelationMode::Correlated,
            ModeArg::Anticorrelated => CorrelationMode::Anticorrelated,
        }
    }
}

#[derive(Args)]
struct AnalyticArgs {
    #[arg(long, value_enum)]
    state: StateArg,
    /// Measurement plane (defaults to the state's symmetry plane).
    #[arg(long, value_enum)]
    plane: Option<PlaneArg>,
    /// Alice's in-plane angle in degrees.
    #[arg(long, conflicts_with = "a_dir")]
    alpha: Option<f64>,
    /// Bob's in-plane angle in degrees.
    #[arg(long, conflicts_with = "b_dir")]
    beta: Option<f64>,
    /// Explicit unit direction for Alice, as x,y,z.
    #[arg(long = "a-dir")]
    a_dir: Option<String>,
    /// Explicit unit direction for Bob, as x,y,z.
    #[arg(long = "b-dir")]
    b_dir: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlaneArg {
    Xz,
    Yz,
    Xy,
}

impl PlaneArg {
    fn plane(&self) -> SymmetryPlane {
        match self {
            PlaneArg::Xz => SymmetryPlane::Xz,
            PlaneArg::Yz => SymmetryPlane::Yz,
            PlaneArg::Xy => SymmetryPlane::Xy,
        }
    }
}

#[derive(Args)]
struct ConserveArgs {
    /// Existing trial log (JSONL or CSV). When omitted, a fixed-policy
    /// quantum run is simulated inline from --state/--alpha/--beta.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// State whose conservation targets apply (default phi-plus).
    #[arg(long, value_enum, default_value = "phi-plus")]
    state: StateArg,
    /// Setting pair to select from a device-policy log, e.g. 1,2.
    #[arg(long)]
    pair: Option<String>,
    /// Relative angle in degrees; inferred from the log when omitted.
    #[arg(long)]
    theta: Option<f64>,
    /// Partition by alice or bob.
    #[arg(long, default_value = "alice")]
    reference: ReferenceArg,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, env = "MERMIN_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReferenceArg {
    Alice,
    Bob,
}

#[derive(Args)]
struct CheckArgs {
    /// Emit a machine-readable JSON report.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RerunArgs {
    #[arg(long)]
    manifest: PathBuf,
}

/// A CLI-level failure carrying its exit code.
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    fn io(message: impl Into<String>) -> Self {
        Self { code: EXIT_IO, message: message.into() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::io(e.to_string())
    }
}

impl From<mermin_device::io::IoError> for CliError {
    fn from(e: mermin_device::io::IoError) -> Self {
        CliError::io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Classical(args) => cmd_classical(&args),
        Command::Analytic(args) => cmd_analytic(&args),
        Command::Conserve(args) => cmd_conserve(&args),
        Command::Check(args) => cmd_check(&args),
        Command::Rerun(args) => cmd_rerun(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn write_outputs(
    records: &[TrialRecord],
    manifest: &RunManifest,
    out: &Path,
    format: LogFormat,
) -> Result<(), CliError> {
    let mut writer = BufWriter::new(File::create(out)?);
    write_log(&mut writer, records, format)?;
    writer.flush()?;
    let manifest_file = File::create(manifest_path(out))?;
    serde_json::to_writer_pretty(BufWriter::new(manifest_file), manifest)
        .map_err(|e| CliError::io(e.to_string()))?;
    Ok(())
}

fn print_summary(records: &[TrialRecord]) {
    let table = SummaryTable::from_records(records);
    print!("{}", table.render_text());
    if let Some((freq, n)) = table.case_b_same_outcome() {
        println!("case (b) same-outcome frequency: {freq:.5} over {n} trials");
    }
    if let Some((corr, _)) = table.case_b_correlation() {
        println!("case (b) mean correlation:       {corr:.5}");
    }
}

fn fixed_angles(alpha: Option<f64>, beta: Option<f64>) -> Result<(f64, f64), CliError> {
    match (alpha, beta) {
        (Some(a), Some(b)) => Ok((a.to_radians(), b.to_radians())),
        _ => Err(CliError::usage("--policy fixed requires --alpha and --beta (degrees)")),
    }
}

fn cmd_simulate(args: &SimulateArgs) -> Result<u8, CliError> {
    if args.trials == 0 {
        return Err(CliError::usage("--trials must be at least 1"));
    }
    let policy = match args.policy {
        PolicyArg::Device => SettingPolicy::Device,
        PolicyArg::Fixed => {
            let (alpha, beta) = fixed_angles(args.alpha, args.beta)?;
            SettingPolicy::Fixed { alpha, beta }
        }
    };
    let spec = ExperimentSpec {
        state: args.state.kind(),
        policy,
        trials: args.trials,
        seed: args.seed,
    };
    let records = run_experiment(&spec);
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").into(),
        created_utc: chrono::Utc::now().to_rfc3339(),
        model: "quantum".into(),
        state: Some(args.state.name().into()),
        dist: None,
        mode: None,
        policy: match args.policy {
            PolicyArg::Device => "device".into(),
            PolicyArg::Fixed => "fixed".into(),
        },
        alpha_deg: args.alpha.filter(|_| args.policy == PolicyArg::Fixed),
        beta_deg: args.beta.filter(|_| args.policy == PolicyArg::Fixed),
        alice_setting: None,
        bob_setting: None,
        trials: args.trials,
        seed: args.seed,
        format: args.format.format(),
        log_path: args.out.display().to_string(),
    };
    write_outputs(&records, &manifest, &args.out, args.format.format())?;
    print_summary(&records);
    Ok(EXIT_OK)
}

fn parse_dist(spec: &str) -> Result<(SetDistribution, String), CliError> {
    match spec {
        "uniform" => Ok((SetDistribution::uniform(), "uniform".into())),
        "two-one" => Ok((SetDistribution::two_one(), "two-one".into())),
        other => match other.strip_prefix("point:") {
            Some(label) => {
                let set = InstructionSet::parse(label)
                    .map_err(|e| CliError::usage(e.to_string()))?;
                Ok((SetDistribution::point(&set), format!("point:{}", set.label())))
            }
            None => Err(CliError::usage(format!(
                "unknown distribution {spec:?}; expected uniform, two-one, or point:SET"
            ))),
        },
    }
}

fn cmd_classical(args: &ClassicalArgs) -> Result<u8, CliError> {
    if args.trials == 0 {
        return Err(CliError::usage("--trials must be at least 1"));
    }
    let (dist, dist_name) = parse_dist(&args.dist)?;
    let policy = match args.policy {
        PolicyArg::Device => ClassicalPolicy::Device,
        PolicyArg::Fixed => {
            let setting = |n: Option<u8>, flag: &str| {
                n.and_then(DeviceSetting::from_number)
                    .ok_or_else(|| CliError::usage(format!("--policy fixed requires {flag} in 1..3")))
            };
            ClassicalPolicy::FixedPair(setting(args.alice, "--alice")?, setting(args.bob, "--bob")?)
        }
    };
    let spec = RaffleSpec {
        dist,
        mode: args.mode.mode(),
        policy,
        trials: args.trials,
        seed: args.seed,
    };
    let records = sample_raffle(&spec);
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").into(),
        created_utc: chrono::Utc::now().to_rfc3339(),
        model: "classical".into(),
        state: None,
        dist: Some(dist_name),
        mode: Some(
            match args.mode {
                ModeArg::Correlated => "correlated",
                ModeArg::Anticorrelated => "anticorrelated",
            }
            .into(),
        ),
        policy: match args.policy {
            PolicyArg::Device => "device".into(),
            PolicyArg::Fixed => "fixed".into(),
        },
        alpha_deg: None,
        beta_deg: None,
        alice_setting: args.alice.filter(|_| args.policy == PolicyArg::Fixed),
        bob_setting: args.bob.filter(|_| args.policy == PolicyArg::Fixed),
        trials: args.trials,
        seed: args.seed,
        format: args.format.format(),
        log_path: args.out.display().to_string(),
    };
    write_outputs(&records, &manifest, &args.out, args.format.format())?;
    print_summary(&records);
    Ok(EXIT_OK)
}

fn parse_direction(text: &str) -> Result<Direction, CliError> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::usage(format!("bad direction {text:?}: {e}")))?;
    if parts.len() != 3 {
        return Err(CliError::usage(format!("direction {text:?} must be x,y,z")));
    }
    Direction::new(parts[0], parts[1], parts[2]).map_err(|e| CliError::usage(e.to_string()))
}

fn cmd_analytic(args: &AnalyticArgs) -> Result<u8, CliError> {
    let kind = args.state.kind();
    let (a, b) = match (&args.a_dir, &args.b_dir) {
        (Some(a), Some(b)) => (parse_direction(a)?, parse_direction(b)?),
        (None, None) => {
            let plane = args
                .plane
                .map(|p| p.plane())
                .unwrap_or_else(|| kind.symmetry_plane());
            let alpha = args.alpha.unwrap_or(0.0).to_radians();
            let beta = args.beta.unwrap_or(0.0).to_radians();
            (plane.direction_at(alpha), plane.direction_at(beta))
        }
        _ => return Err(CliError::usage("give both --a-dir and --b-dir, or neither")),
    };
    let correlation = correlation_analytic(kind, &a, &b);
    let jd = joint_distribution(kind, &a, &b);
    let (ax, ay, az) = a.components();
    let (bx, by, bz) = b.components();
    println!("state:        {}", args.state.name());
    println!("a:            ({ax:.6}, {ay:.6}, {az:.6})");
    println!("b:            ({bx:.6}, {by:.6}, {bz:.6})");
    println!("correlation:  {correlation:.12}");
    println!(
        "p(uu,ud,du,dd): ({:.12}, {:.12}, {:.12}, {:.12})",
        jd.p_uu, jd.p_ud, jd.p_du, jd.p_dd
    );
    Ok(EXIT_OK)
}

fn parse_pair(text: &str) -> Result<(u8, u8), CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || CliError::usage(format!("bad --pair {text:?}; expected e.g. 1,2"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let a: u8 = parts[0].parse().map_err(|_| bad())?;
    let b: u8 = parts[1].parse().map_err(|_| bad())?;
    if !(1..=3).contains(&a) || !(1..=3).contains(&b) {
        return Err(bad());
    }
    Ok((a, b))
}

fn cmd_conserve(args: &ConserveArgs) -> Result<u8, CliError> {
    let kind = args.state.kind();
    let records: Vec<TrialRecord> = match &args.input {
        Some(path) => {
            let file = File::open(path)?;
            read_log(BufReader::new(file))?
        }
        None => {
            let trials = args
                .trials
                .ok_or_else(|| CliError::usage("without --in, give --trials, --alpha, --beta"))?;
            let (alpha, beta) = fixed_angles(args.alpha, args.beta)?;
            run_experiment(&ExperimentSpec {
                state: kind,
                policy: SettingPolicy::Fixed { alpha, beta },
                trials,
                seed: args.seed,
            })
        }
    };
    if records.is_empty() {
        return Err(CliError::usage("trial log is empty"));
    }

    // Reduce to a single fixed setting pair.
    let selected: Vec<TrialRecord> = match &args.pair {
        Some(pair) => {
            let (a, b) = parse_pair(pair)?;
            records
                .iter()
                .filter(|t| {
                    t.alice_setting == SettingValue::Device(a)
                        && t.bob_setting == SettingValue::Device(b)
                })
                .copied()
                .collect()
        }
        None => {
            let first = (records[0].alice_setting, records[0].bob_setting);
            let uniform = records
                .iter()
                .all(|t| (t.alice_setting, t.bob_setting) == first);
            if !uniform {
                return Err(CliError::usage(
                    "log mixes setting pairs; select one with --pair A,B",
                ));
            }
            records.clone()
        }
    };
    if selected.is_empty() {
        return Err(CliError::usage("no trials match the requested setting pair"));
    }

    let theta = match args.theta {
        Some(deg) => deg.to_radians(),
        None => {
            let t = &selected[0];
            (t.alice_setting.angle() - t.bob_setting.angle()).abs()
        }
    };

    let reference = match args.reference {
        ReferenceArg::Alice => Party::Alice,
        ReferenceArg::Bob => Party::Bob,
    };
    let report = partition_by_outcome(&selected, reference)
        .map_err(|e| CliError::usage(e.to_string()))?;
    let verdict = conservation_test(&selected, kind, theta, reference)
        .map_err(|e| CliError::usage(e.to_string()))?;
    let direct = direct_correlation(&selected).map_err(|e| CliError::usage(e.to_string()))?;
    let fmt_opt = |v: Option<f64>| v.map_or("undefined".to_string(), |x| format!("{x:.6}"));

    println!("trials:            {}", report.total());
    println!("reference party:   {:?}", report.reference_party);
    println!("theta:             {:.4} deg", theta.to_degrees());
    println!("n(+1) / n(-1):     {} / {}", report.n_plus, report.n_minus);
    println!("conditional mean | +1:  {} (se {})", fmt_opt(report.ba_plus), fmt_opt(report.se_plus));
    println!("conditional mean | -1:  {} (se {})", fmt_opt(report.ba_minus), fmt_opt(report.se_minus));
    println!("targets:           {:.6} / {:.6}", verdict.target_plus, verdict.target_minus);
    match reconstruct_correlation(&report) {
        Ok(rebuilt) => {
            println!("direct correlation:        {direct:.12}");
            println!("reconstructed correlation: {rebuilt:.12}");
            println!(
                "reconstruction identity:   {}",
                if (rebuilt - direct).abs() <= 1e-12 { "exact" } else { "VIOLATED" }
            );
        }
        Err(e) => println!("reconstruction: {e}"),
    }
    println!("conservation verdict:      {}", if verdict.pass { "pass" } else { "FAIL" });
    Ok(if verdict.pass { EXIT_OK } else { EXIT_CONSERVATION })
}

fn cmd_check(args: &CheckArgs) -> Result<u8, CliError> {
    let results = checks::run_all();
    let failed = results.iter().filter(|r| !r.passed).count();
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&results).map_err(|e| CliError::io(e.to_string()))?
        );
    } else {
        for result in &results {
            println!(
                "{} {} — {}",
                if result.passed { "PASS" } else { "FAIL" },
                result.name,
                result.detail
            );
        }
        println!("{} checks, {} failed", results.len(), failed);
    }
    Ok(if failed == 0 { EXIT_OK } else { EXIT_IO })
}

fn cmd_rerun(args: &RerunArgs) -> Result<u8, CliError> {
    let manifest: RunManifest = serde_json::from_reader(BufReader::new(File::open(&args.manifest)?))
        .map_err(|e| CliError::io(format!("bad manifest: {e}")))?;
    match manifest.model.as_str() {
        "quantum" => {
            let state = manifest
                .state
                .as_deref()
                .and_then(StateArg::parse)
                .ok_or_else(|| CliError::usage("manifest missing a valid state"))?;
            let args = SimulateArgs {
                state,
                policy: if manifest.policy == "fixed" { PolicyArg::Fixed } else { PolicyArg::Device },
                alpha: manifest.alpha_deg,
                beta: manifest.beta_deg,
                trials: manifest.trials,
                seed: manifest.seed,
                format: match manifest.format {
                    LogFormat::Jsonl => FormatArg::Jsonl,
                    LogFormat::Csv => FormatArg::Csv,
                },
                out: PathBuf::from(&manifest.log_path),
            };
            cmd_simulate(&args)
        }
        "classical" => {
            let args = ClassicalArgs {
                dist: manifest.dist.clone().ok_or_else(|| CliError::usage("manifest missing dist"))?,
                policy: if manifest.policy == "fixed" { PolicyArg::Fixed } else { PolicyArg::Device },
                alice: manifest.alice_setting,
                bob: manifest.bob_setting,
                mode: match manifest.mode.as_deref() {
                    Some("anticorrelated") => ModeArg::Anticorrelated,
                    _ => ModeArg::Correlated,
                },
                trials: manifest.trials,
                seed: manifest.seed,
                format: match manifest.format {
                    LogFormat::Jsonl => FormatArg::Jsonl,
                    LogFormat::Csv => FormatArg::Csv,
                },
                out: PathBuf::from(&manifest.log_path),
            };
            cmd_classical(&args)
        }
        other => Err(CliError::usage(format!("unknown model {other:?} in manifest"))),
    }
}
