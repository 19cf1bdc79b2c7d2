//! `facmech`: evaluate facility-location mechanisms, run the verification
//! suite, generate instances, and inspect optima from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 input
//! error.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use facmech::instances::{
    gen_thm51, gen_thm52, gen_thm61, gen_thm62, gen_tightness_32, load_instance, profile_to_json,
    random_profile, save_instance, RandomProfileSpec,
};
use facmech::mechanisms::{mechanism_by_name, Mechanism};
use facmech::model::expected_social_benefit;
use facmech::oracle;
use facmech::suite::{run_suite, SuiteConfig, SuiteReport};
use facmech::verify::{
    certificate_61, certificate_62, default_deviation_sets, instance_ratio,
    midpoint_property_check, ratio_search, reflection_form_check, sp_check, uniform_grid,
    CertificateReport, DeviationWitness, ReflectionForm,
};
use facmech::{AgentReport, AgentType, Interval, Lottery, Objective, Profile};

use output::{json_f64, sig12, Table};

/// Error carrying the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn input(message: impl Into<String>) -> Failure {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

fn usage(error: facmech::Error) -> Failure {
    Failure::usage(error.to_string())
}

fn input(error: facmech::Error) -> Failure {
    Failure::input(error.to_string())
}

type CmdResult = Result<u8, Failure>;

#[derive(Parser)]
#[command(
    name = "facmech",
    version,
    about = "Facility-location mechanisms on an interval: evaluation, verification, instance generation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a mechanism to an instance: lottery, benefit, optimum, ratio
    Eval(EvalArgs),
    /// Run the bundled verification suite
    Verify(VerifyArgs),
    /// Generate instance files from the built-in families
    Gen(GenArgs),
    /// Print the optimal facility location and value for an instance
    Oracle(OracleArgs),
    /// Search an instance for profitable misreports
    SpCheck(SpCheckArgs),
    /// Sample random instances for the worst benefit ratio
    RatioSearch(RatioSearchArgs),
    /// Reflection sweeps plus the midpoint property on a grid
    Characterize(CharacterizeArgs),
    /// Evaluate the lower-bound certificates against a mechanism
    Certify(CertifyArgs),
}

#[derive(Copy, Clone, PartialEq, ValueEnum)]
enum ObjectiveArg {
    Maxisum,
    Egalitarian,
}

impl ObjectiveArg {
    fn to_objective(self) -> Objective {
        match self {
            ObjectiveArg::Maxisum => Objective::Maxisum,
            ObjectiveArg::Egalitarian => Objective::Egalitarian,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ObjectiveArg::Maxisum => "maxisum",
            ObjectiveArg::Egalitarian => "egalitarian",
        }
    }
}

#[derive(Copy, Clone, PartialEq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

fn no_csv(format: Format) -> Result<(), Failure> {
    if format == Format::Csv {
        return Err(Failure::usage(
            "--format csv is only available for ratio-search",
        ));
    }
    Ok(())
}

/// Seed precedence: explicit flag, then FACMECH_SEED, then 42.
fn resolve_seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("FACMECH_SEED") {
        Ok(text) => text.trim().parse::<u64>().map_err(|e| {
            Failure::usage(format!("FACMECH_SEED {text:?} is not a valid seed: {e}"))
        }),
        Err(std::env::VarError::NotPresent) => Ok(42),
        Err(err) => Err(Failure::usage(format!("FACMECH_SEED unreadable: {err}"))),
    }
}

fn load_mechanism(name: &str) -> Result<Mechanism, Failure> {
    mechanism_by_name(name).map_err(usage)
}

fn load_profile(path: &Path) -> Result<Profile, Failure> {
    load_instance(path).map_err(input)
}

fn format_locations(locations: &[f64]) -> String {
    let parts: Vec<String> = locations.iter().map(|&x| sig12(x)).collect();
    format!("[{}]", parts.join(", "))
}

fn format_lottery(lottery: &Lottery) -> String {
    let parts: Vec<String> = lottery
        .support()
        .iter()
        .map(|&(y, p)| format!("y={} p={}", sig12(y), sig12(p)))
        .collect();
    parts.join("; ")
}

fn lottery_json(lottery: &Lottery) -> Value {
    Value::Array(
        lottery
            .support()
            .iter()
            .map(|&(y, p)| json!({"location": json_f64(y), "probability": json_f64(p)}))
            .collect(),
    )
}

fn describe_witness(witness: &DeviationWitness) -> String {
    format!(
        "agent {} (type {} at {}) gains {} by reporting type {} at {}",
        witness.agent_index,
        witness.true_report.agent_type().code(),
        format_locations(witness.true_report.locations()),
        sig12(witness.gain),
        witness.misreport.agent_type().code(),
        format_locations(witness.misreport.locations()),
    )
}

fn witness_json(witness: &DeviationWitness) -> Value {
    json!({
        "agent_index": witness.agent_index,
        "true_type": witness.true_report.agent_type().code(),
        "true_locations": witness.true_report.locations().iter().copied().map(json_f64).collect::<Vec<_>>(),
        "misreport_type": witness.misreport.agent_type().code(),
        "misreport_locations": witness.misreport.locations().iter().copied().map(json_f64).collect::<Vec<_>>(),
        "truthful_benefit": json_f64(witness.truthful_benefit),
        "deviating_benefit": json_f64(witness.deviating_benefit),
        "gain": json_f64(witness.gain),
    })
}

fn print_json(value: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serializes")
    );
}

// ---------------------------------------------------------------------------
// eval

#[derive(Args)]
struct EvalArgs {
    /// Registry name, e.g. det-hybrid or constant(0.5)
    #[arg(long)]
    mechanism: String,
    /// Instance JSON file
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Maxisum)]
    objective: ObjectiveArg,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

fn cmd_eval(args: EvalArgs) -> CmdResult {
    no_csv(args.format)?;
    let mechanism = load_mechanism(&args.mechanism)?;
    let profile = load_profile(&args.instance)?;
    let objective = args.objective.to_objective();
    let lottery = mechanism.apply(&profile).map_err(usage)?;
    let benefit = expected_social_benefit(&profile, &lottery, objective).map_err(usage)?;
    let opt = oracle::opt(&profile, objective).map_err(usage)?;
    let ratio = instance_ratio(&mechanism, &profile, objective).map_err(usage)?;

    match args.format {
        Format::Table => {
            let mut table = Table::new();
            table.row("mechanism", mechanism.name());
            table.row("instance", args.instance.display().to_string());
            table.row("objective", args.objective.name());
            table.row("n", profile.n().to_string());
            table.row("lottery", format_lottery(&lottery));
            table.row("mechanism_benefit", sig12(benefit));
            table.row("opt_location", sig12(opt.location));
            table.row("opt_value", sig12(opt.value));
            table.row("ratio", sig12(ratio));
            table.print();
        }
        Format::Json => print_json(&json!({
            "mechanism": mechanism.name(),
            "instance": args.instance.display().to_string(),
            "objective": args.objective.name(),
            "n": profile.n(),
            "lottery": lottery_json(&lottery),
            "mechanism_benefit": json_f64(benefit),
            "opt_location": json_f64(opt.location),
            "opt_value": json_f64(opt.value),
            "ratio": json_f64(ratio),
        })),
        Format::Csv => unreachable!("rejected above"),
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    seed: Option<u64>,
    /// Override every check's default sample count
    #[arg(long)]
    iterations: Option<u64>,
    /// Replace a shipped mechanism with its built-in sabotaged variant
    #[arg(long)]
    mutate: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

fn verify_json(report: &SuiteReport) -> Value {
    json!({
        "seed": report.seed,
        "passed": report.passed,
        "checks": report.checks.iter().map(|check| json!({
            "name": check.name,
            "passed": check.passed,
            "details": check.details,
        })).collect::<Vec<_>>(),
    })
}

fn cmd_verify(args: VerifyArgs) -> CmdResult {
    no_csv(args.format)?;
    let seed = resolve_seed(args.seed)?;
    let config = SuiteConfig {
        seed,
        iterations: args.iterations,
        mutate: args.mutate,
    };
    let report = run_suite(&config).map_err(usage)?;

    match args.format {
        Format::Table => {
            let mut table = Table::new();
            table.row("seed", seed.to_string());
            table.row(
                "iterations",
                config
                    .iterations
                    .map_or("default".to_string(), |i| i.to_string()),
            );
            table.row("mutate", config.mutate.as_deref().unwrap_or("none"));
            table.print();
            println!();
            for check in &report.checks {
                let status = if check.passed { "PASS" } else { "FAIL" };
                println!("{status}  {}", check.name);
            }
            println!();
            println!("suite  {}", if report.passed { "PASS" } else { "FAIL" });
            for check in report.checks.iter().filter(|check| !check.passed) {
                println!();
                println!("--- {}", check.name);
                for line in &check.details {
                    println!("{line}");
                }
            }
        }
        Format::Json => print_json(&verify_json(&report)),
        Format::Csv => unreachable!("rejected above"),
    }
    Ok(if report.passed { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// gen

#[derive(Copy, Clone, PartialEq, ValueEnum)]
enum FamilyArg {
    Thm51,
    Thm52,
    Thm61,
    Thm62,
    Tightness32,
    Random,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Output path; pair families insert _x/_y before the extension
    #[arg(short = 'o', long)]
    output: PathBuf,
    /// Number of agents (thm51, random)
    #[arg(long)]
    n: Option<usize>,
    /// Cluster offset (thm51) or relocation step (thm62)
    #[arg(long)]
    epsilon: Option<f64>,
    /// Low range point (thm51, thm52)
    #[arg(long)]
    alpha: Option<f64>,
    /// High range point (thm51, thm52)
    #[arg(long)]
    beta: Option<f64>,
    /// Half-width parameter (thm62)
    #[arg(long)]
    m: Option<f64>,
    /// Sampling seed (random)
    #[arg(long)]
    seed: Option<u64>,
    /// Probability of a near-preferring agent (random)
    #[arg(long)]
    type2_probability: Option<f64>,
    /// Maximum locations per agent (random)
    #[arg(long)]
    k_max: Option<usize>,
    /// Interval lower end (random)
    #[arg(long)]
    lo: Option<f64>,
    /// Interval upper end (random)
    #[arg(long)]
    hi: Option<f64>,
}

fn pair_paths(path: &Path) -> (PathBuf, PathBuf) {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("instance");
    let suffixed = |tag: &str| {
        let name = match path.extension().and_then(|e| e.to_str()) {
            Some(ext) => format!("{stem}_{tag}.{ext}"),
            None => format!("{stem}_{tag}"),
        };
        path.with_file_name(name)
    };
    (suffixed("x"), suffixed("y"))
}

fn forbid_flags(family: &str, unused: &[(&str, bool)]) -> Result<(), Failure> {
    for (flag, present) in unused {
        if *present {
            return Err(Failure::usage(format!(
                "--{flag} does not apply to family {family}"
            )));
        }
    }
    Ok(())
}

fn write_single(profile: &Profile, path: &Path) -> CmdResult {
    save_instance(profile, path).map_err(input)?;
    println!("wrote {}", path.display());
    Ok(0)
}

fn write_pair(pair: &(Profile, Profile), path: &Path) -> CmdResult {
    let (path_x, path_y) = pair_paths(path);
    save_instance(&pair.0, &path_x).map_err(input)?;
    println!("wrote {}", path_x.display());
    save_instance(&pair.1, &path_y).map_err(input)?;
    println!("wrote {}", path_y.display());
    Ok(0)
}

fn cmd_gen(args: GenArgs) -> CmdResult {
    let random_only = [
        ("seed", args.seed.is_some()),
        ("type2-probability", args.type2_probability.is_some()),
        ("k-max", args.k_max.is_some()),
        ("lo", args.lo.is_some()),
        ("hi", args.hi.is_some()),
    ];
    match args.family {
        FamilyArg::Thm51 => {
            forbid_flags("thm51", &[("m", args.m.is_some())])?;
            forbid_flags("thm51", &random_only)?;
            let pair = gen_thm51(
                args.n.unwrap_or(10),
                args.epsilon.unwrap_or(1e-3),
                args.alpha.unwrap_or(0.0),
                args.beta.unwrap_or(2.0),
            )
            .map_err(usage)?;
            write_pair(&pair, &args.output)
        }
        FamilyArg::Thm52 => {
            forbid_flags(
                "thm52",
                &[
                    ("n", args.n.is_some()),
                    ("epsilon", args.epsilon.is_some()),
                    ("m", args.m.is_some()),
                ],
            )?;
            forbid_flags("thm52", &random_only)?;
            let profile =
                gen_thm52(args.alpha.unwrap_or(0.0), args.beta.unwrap_or(2.0)).map_err(usage)?;
            write_single(&profile, &args.output)
        }
        FamilyArg::Thm61 => {
            forbid_flags(
                "thm61",
                &[
                    ("n", args.n.is_some()),
                    ("epsilon", args.epsilon.is_some()),
                    ("alpha", args.alpha.is_some()),
                    ("beta", args.beta.is_some()),
                    ("m", args.m.is_some()),
                ],
            )?;
            forbid_flags("thm61", &random_only)?;
            write_pair(&gen_thm61(), &args.output)
        }
        FamilyArg::Thm62 => {
            forbid_flags(
                "thm62",
                &[
                    ("n", args.n.is_some()),
                    ("alpha", args.alpha.is_some()),
                    ("beta", args.beta.is_some()),
                ],
            )?;
            forbid_flags("thm62", &random_only)?;
            let pair = gen_thm62(args.m.unwrap_or(10.0), args.epsilon.unwrap_or(0.1))
                .map_err(usage)?;
            write_pair(&pair, &args.output)
        }
        FamilyArg::Tightness32 => {
            forbid_flags(
                "tightness32",
                &[
                    ("n", args.n.is_some()),
                    ("epsilon", args.epsilon.is_some()),
                    ("alpha", args.alpha.is_some()),
                    ("beta", args.beta.is_some()),
                    ("m", args.m.is_some()),
                ],
            )?;
            forbid_flags("tightness32", &random_only)?;
            write_single(&gen_tightness_32(), &args.output)
        }
        FamilyArg::Random => {
            forbid_flags(
                "random",
                &[
                    ("epsilon", args.epsilon.is_some()),
                    ("alpha", args.alpha.is_some()),
                    ("beta", args.beta.is_some()),
                    ("m", args.m.is_some()),
                ],
            )?;
            let seed = resolve_seed(args.seed)?;
            let interval = Interval::new(args.lo.unwrap_or(0.0), args.hi.unwrap_or(2.0))
                .map_err(usage)?;
            let profile = random_profile(
                args.n.unwrap_or(5),
                args.type2_probability.unwrap_or(0.5),
                args.k_max.unwrap_or(1),
                interval,
                seed,
            )
            .map_err(usage)?;
            write_single(&profile, &args.output)
        }
    }
}

// ---------------------------------------------------------------------------
// oracle

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Maxisum)]
    objective: ObjectiveArg,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

fn cmd_oracle(args: OracleArgs) -> CmdResult {
    no_csv(args.format)?;
    let profile = load_profile(&args.instance)?;
    let opt = oracle::opt(&profile, args.objective.to_objective()).map_err(usage)?;
    match args.format {
        Format::Table => {
            let mut table = Table::new();
            table.row("instance", args.instance.display().to_string());
            table.row("objective", args.objective.name());
            table.row("opt_location", sig12(opt.location));
            table.row("opt_value", sig12(opt.value));
            table.print();
        }
        Format::Json => print_json(&json!({
            "instance": args.instance.display().to_string(),
            "objective": args.objective.name(),
            "opt_location": json_f64(opt.location),
            "opt_value": json_f64(opt.value),
        })),
        Format::Csv => unreachable!("rejected above"),
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// sp-check

#[derive(Args)]
struct SpCheckArgs {
    #[arg(long)]
    mechanism: String,
    #[arg(long)]
    instance: PathBuf,
    /// Minimum gain that counts as a profitable deviation
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

fn cmd_sp_check(args: SpCheckArgs) -> CmdResult {
    no_csv(args.format)?;
    let mechanism = load_mechanism(&args.mechanism)?;
    let profile = load_profile(&args.instance)?;
    let sets =
        default_deviation_sets(&profile, mechanism.domain_constraint()).map_err(usage)?;
    let witnesses = sp_check(&mechanism, &profile, &sets, args.tolerance).map_err(usage)?;

    match args.format {
        Format::Table => {
            let mut table = Table::new();
            table.row("mechanism", mechanism.name());
            table.row("instance", args.instance.display().to_string());
            table.row("tolerance", sig12(args.tolerance));
            table.row("witnesses", witnesses.len().to_string());
            table.print();
            for witness in &witnesses {
                println!("{}", describe_witness(witness));
            }
        }
        Format::Json => print_json(&json!({
            "mechanism": mechanism.name(),
            "instance": args.instance.display().to_string(),
            "tolerance": json_f64(args.tolerance),
            "witnesses": witnesses.iter().map(witness_json).collect::<Vec<_>>(),
        })),
        Format::Csv => unreachable!("rejected above"),
    }
    Ok(if witnesses.is_empty() { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// ratio-search

#[derive(Args)]
struct RatioSearchArgs {
    #[arg(long)]
    mechanism: String,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Maxisum)]
    objective: ObjectiveArg,
    #[arg(long, default_value_t = 100_000)]
    iterations: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// Agents per sampled profile drawn from 1..=n-max
    #[arg(long, default_value_t = 10)]
    n_max: usize,
    /// Probability of a near-preferring agent per draw
    #[arg(long, default_value_t = 0.5)]
    type2_probability: f64,
    /// Locations per agent drawn from 1..=k-max
    #[arg(long, default_value_t = 1)]
    k_max: usize,
    #[arg(long, default_value_t = 0.0)]
    lo: f64,
    #[arg(long, default_value_t = 2.0)]
    hi: f64,
    /// Instance file evaluated alongside the random pool (repeatable)
    #[arg(long)]
    pin: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

fn cmd_ratio_search(args: RatioSearchArgs) -> CmdResult {
    let mechanism = load_mechanism(&args.mechanism)?;
    let objective = args.objective.to_objective();
    let seed = resolve_seed(args.seed)?;
    let interval = Interval::new(args.lo, args.hi).map_err(usage)?;
    let sampler = RandomProfileSpec::new(args.n_max, args.type2_probability, args.k_max, interval)
        .map_err(usage)?;
    let pinned = args
        .pin
        .iter()
        .map(|path| load_profile(path))
        .collect::<Result<Vec<_>, _>>()?;
    let search = ratio_search(
        &mechanism,
        objective,
        &sampler,
        args.iterations,
        seed,
        &pinned,
    )
    .map_err(usage)?;

    match args.format {
        Format::Table => {
            let mut table = Table::new();
            table.row("mechanism", mechanism.name());
            table.row("objective", args.objective.name());
            table.row("iterations", args.iterations.to_string());
            table.row("seed", seed.to_string());
            table.row("pinned", pinned.len().to_string());
            table.row("evaluated", search.evaluated.to_string());
            table.row("worst_index", search.worst_index.to_string());
            table.row("worst_ratio", sig12(search.worst_ratio));
            table.print();
            println!("worst instance:");
            println!("{}", profile_to_json(&search.worst_instance));
        }
        Format::Json => {
            let instance: Value = serde_json::from_str(&profile_to_json(&search.worst_instance))
                .expect("instance JSON reparses");
            print_json(&json!({
                "mechanism": mechanism.name(),
                "objective": args.objective.name(),
                "iterations": args.iterations,
                "seed": seed,
                "pinned": pinned.len(),
                "evaluated": search.evaluated,
                "worst_index": search.worst_index,
                "worst_ratio": json_f64(search.worst_ratio),
                "worst_instance": instance,
            }))
        }
        Format::Csv => {
            println!("mechanism,objective,iterations,seed,pinned,evaluated,worst_index,worst_ratio");
            println!(
                "{},{},{},{},{},{},{},{}",
                mechanism.name(),
                args.objective.name(),
                args.iterations,
                seed,
                pinned.len(),
                search.evaluated,
                search.worst_index,
                sig12(search.worst_ratio),
            );
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// characterize

#[derive(Args)]
struct CharacterizeArgs {
    #[arg(long)]
    mechanism: String,
    /// Number of agents in the grid profiles
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Grid of candidate locations, comma separated
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,1.5,2")]
    grid: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    lo: f64,
    #[arg(long, default_value_t = 2.0)]
    hi: f64,
    /// Sweep step for the reflection scan
    #[arg(long, default_value_t = 0.01)]
    resolution: f64,
    /// Lift the midpoint check's profile-pair cap
    #[arg(long)]
    allow_large: bool,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

/// All assignments of grid values to the n-1 non-swept agents.
fn grid_partials(grid: &[f64], slots: usize) -> Vec<Vec<f64>> {
    let mut partials = vec![Vec::new()];
    for _ in 0..slots {
        let mut next = Vec::with_capacity(partials.len() * grid.len());
        for partial in &partials {
            for &value in grid {
                let mut extended = partial.clone();
                extended.push(value);
                next.push(extended);
            }
        }
        partials = next;
    }
    partials
}

fn form_summary(form: &ReflectionForm) -> String {
    match form {
        ReflectionForm::Constant { value } => format!("constant at {}", sig12(*value)),
        ReflectionForm::Step {
            alpha,
            beta,
            reflection_point,
        } => format!(
            "step {} -> {} at {}",
            sig12(*alpha),
            sig12(*beta),
            sig12(*reflection_point)
        ),
        ReflectionForm::Violation {
            alpha,
            beta,
            violating_pair,
            reason,
        } => format!(
            "violation: {reason} (outputs {} and {}, pair {}, {})",
            sig12(*alpha),
            sig12(*beta),
            sig12(violating_pair.0),
            sig12(violating_pair.1)
        ),
    }
}

fn form_json(form: &ReflectionForm) -> Value {
    match form {
        ReflectionForm::Constant { value } => json!({
            "form": "constant",
            "value": json_f64(*value),
        }),
        ReflectionForm::Step {
            alpha,
            beta,
            reflection_point,
        } => json!({
            "form": "step",
            "alpha": json_f64(*alpha),
            "beta": json_f64(*beta),
            "reflection_point": json_f64(*reflection_point),
        }),
        ReflectionForm::Violation {
            alpha,
            beta,
            violating_pair,
            reason,
        } => json!({
            "form": "violation",
            "alpha": json_f64(*alpha),
            "beta": json_f64(*beta),
            "violating_pair": [json_f64(violating_pair.0), json_f64(violating_pair.1)],
            "reason": reason,
        }),
    }
}

fn profile_locations(profile: &Profile) -> String {
    let parts: Vec<String> = profile
        .agents()
        .iter()
        .map(|agent| format_locations(agent.locations()))
        .collect();
    parts.join(" ")
}

fn cmd_characterize(args: CharacterizeArgs) -> CmdResult {
    no_csv(args.format)?;
    let mechanism = load_mechanism(&args.mechanism)?;
    let interval = Interval::new(args.lo, args.hi).map_err(usage)?;

    let midpoint =
        midpoint_property_check(&mechanism, &interval, args.n, &args.grid, args.allow_large)
            .map_err(usage)?;

    let sweep = uniform_grid(&interval, args.resolution).map_err(usage)?;
    let mut forms = Vec::new();
    let mut violations = 0u64;
    for partial in grid_partials(&args.grid, args.n.saturating_sub(1)) {
        let mut agents = vec![AgentReport::single(AgentType::Type1, interval.lo()).map_err(usage)?];
        for &location in &partial {
            agents.push(AgentReport::single(AgentType::Type1, location).map_err(usage)?);
        }
        let profile = Profile::new(interval, agents).map_err(usage)?;
        let form = reflection_form_check(&mechanism, &profile, 0, &sweep).map_err(usage)?;
        if matches!(form, ReflectionForm::Violation { .. }) {
            violations += 1;
        }
        let label = if partial.is_empty() {
            "none".to_string()
        } else {
            partial
                .iter()
                .map(|&x| sig12(x))
                .collect::<Vec<_>>()
                .join(", ")
        };
        forms.push((label, form));
    }

    let passed = midpoint.passed && violations == 0;
    match args.format {
        Format::Table => {
            let mut table = Table::new();
            table.row("mechanism", mechanism.name());
            table.row("n", args.n.to_string());
            table.row(
                "grid",
                args.grid
                    .iter()
                    .map(|&x| sig12(x))
                    .collect::<Vec<_>>()
                    .join(", "),
            );
            table.row(
                "midpoint_property",
                if midpoint.passed { "PASS" } else { "FAIL" },
            );
            table.row(
                "range_points",
                midpoint
                    .range_points
                    .iter()
                    .map(|&x| sig12(x))
                    .collect::<Vec<_>>()
                    .join(", "),
            );
            table.print();
            if let Some((x, y)) = &midpoint.violating_pair {
                println!(
                    "violating pair: x agents {} | y agents {}",
                    profile_locations(x),
                    profile_locations(y)
                );
            }
            println!();
            let mut sweeps = Table::new();
            for (label, form) in &forms {
                sweeps.row(format!("partners {label}"), form_summary(form));
            }
            sweeps.print();
            println!();
            println!("characterization  {}", if passed { "PASS" } else { "FAIL" });
        }
        Format::Json => {
            let violating_pair = midpoint.violating_pair.as_ref().map(|(x, y)| {
                json!({
                    "x": serde_json::from_str::<Value>(&profile_to_json(x)).expect("reparses"),
                    "y": serde_json::from_str::<Value>(&profile_to_json(y)).expect("reparses"),
                })
            });
            print_json(&json!({
                "mechanism": mechanism.name(),
                "n": args.n,
                "grid": args.grid.iter().copied().map(json_f64).collect::<Vec<_>>(),
                "midpoint_passed": midpoint.passed,
                "range_points": midpoint.range_points.iter().copied().map(json_f64).collect::<Vec<_>>(),
                "violating_pair": violating_pair,
                "sweeps": forms.iter().map(|(label, form)| json!({
                    "partners": label,
                    "result": form_json(form),
                })).collect::<Vec<_>>(),
                "passed": passed,
            }));
        }
        Format::Csv => unreachable!("rejected above"),
    }
    Ok(if passed { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// certify

#[derive(Copy, Clone, PartialEq, ValueEnum)]
enum CertKind {
    /// Two-profile deviation certificate
    #[value(name = "61")]
    Pair,
    /// Relocation certificate
    #[value(name = "62")]
    Relocation,
    /// Both certificates
    Both,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long)]
    mechanism: String,
    /// Approximation ratio the mechanism is claimed to achieve
    #[arg(long, default_value_t = 23.0 / 13.0)]
    claimed_c: f64,
    #[arg(long, value_enum, default_value_t = CertKind::Both)]
    certificate: CertKind,
    /// Half-width parameter of the relocation construction
    #[arg(long, default_value_t = 10.0)]
    m: f64,
    /// Relocation step of the construction
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

fn certificate_json(report: &CertificateReport) -> Value {
    let measurements: serde_json::Map<String, Value> = report
        .measurements
        .iter()
        .map(|&(name, value)| (name.to_string(), json_f64(value)))
        .collect();
    json!({
        "name": report.name,
        "mechanism": report.mechanism,
        "consistent": report.consistent,
        "measurements": measurements,
        "checks": report.checks.iter().map(|check| json!({
            "name": check.name,
            "passed": check.passed,
            "detail": check.detail,
        })).collect::<Vec<_>>(),
    })
}

fn print_certificate_table(report: &CertificateReport) {
    let mut table = Table::new();
    table.row("certificate", report.name);
    table.row("mechanism", report.mechanism.clone());
    table.row("consistent", if report.consistent { "yes" } else { "no" });
    table.print();
    let mut measurements = Table::new();
    for &(name, value) in &report.measurements {
        measurements.row(name, sig12(value));
    }
    measurements.print();
    for check in &report.checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!("{status}  {}  ({})", check.name, check.detail);
    }
}

fn cmd_certify(args: CertifyArgs) -> CmdResult {
    no_csv(args.format)?;
    let mechanism = load_mechanism(&args.mechanism)?;
    let mut reports = Vec::new();
    if matches!(args.certificate, CertKind::Pair | CertKind::Both) {
        reports.push(certificate_61(&mechanism, args.claimed_c).map_err(usage)?);
    }
    if matches!(args.certificate, CertKind::Relocation | CertKind::Both) {
        reports.push(
            certificate_62(&mechanism, args.m, args.epsilon, args.claimed_c).map_err(usage)?,
        );
    }
    let consistent = reports.iter().all(|report| report.consistent);

    match args.format {
        Format::Table => {
            for (i, report) in reports.iter().enumerate() {
                if i > 0 {
                    println!();
                }
                print_certificate_table(report);
            }
        }
        Format::Json => print_json(&json!({
            "certificates": reports.iter().map(certificate_json).collect::<Vec<_>>(),
            "consistent": consistent,
        })),
        Format::Csv => unreachable!("rejected above"),
    }
    Ok(if consistent { 0 } else { 1 })
}

// ---------------------------------------------------------------------------

fn run(command: Command) -> CmdResult {
    match command {
        Command::Eval(args) => cmd_eval(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::SpCheck(args) => cmd_sp_check(args),
        Command::RatioSearch(args) => cmd_ratio_search(args),
        Command::Characterize(args) => cmd_characterize(args),
        Command::Certify(args) => cmd_certify(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
