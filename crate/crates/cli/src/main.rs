//! Command-line harness: instance generation, form evaluation, testing
//! batteries, extremizer runs, corona certificates and batch studies.
//!
//! Exit codes: 0 on success, 1 when a requested threshold or certificate
//! fails, 2 on malformed input.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use triembed::{
    estimate_c1_with, generate_instance, run_study, seeded_functions, theorem_battery,
    trilinear_form, verify_corona_certificate, GridFunction, Instance, InstanceSpec, KernelSpec,
    MeasureSpec, StudyOptions,
};

#[derive(Parser)]
#[command(
    name = "triembed",
    about = "Trilinear embedding constants on finite dyadic trees",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Materialize an instance file from a spec or from generator flags.
    Generate(GenerateArgs),
    /// Evaluate the trilinear form at given or seeded functions.
    EvalForm(EvalArgs),
    /// Compute every testing constant and the checking constant c2.
    Battery(InstanceArgs),
    /// Estimate the least embedding constant c1 from below.
    EstimateC1(EstimateArgs),
    /// Replay the stopping-time bound as a numerical certificate.
    Certify(CertifyArgs),
    /// Run a batch study and aggregate the c1/c2 ratios.
    Study(StudyArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Spec file to materialize; omit to build one from the flags below.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    dimension: u32,
    #[arg(long, default_value_t = 3)]
    depth: u32,
    /// Comma-separated exponents, e.g. 2,2,2.
    #[arg(long, default_value = "2,2,2")]
    exponents: String,
    /// Kernel generator: "uniform" or "alpha:VALUE".
    #[arg(long, default_value = "uniform")]
    kernel: String,
    /// Measure generator for all three slots: "uniform" or "sparse:DENSITY".
    #[arg(long, default_value = "uniform")]
    measures: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct InstanceArgs {
    /// Instance (spec) file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    input: PathBuf,
    /// JSON file {"functions": [[..], [..], [..]]}; defaults to constants 1.
    #[arg(long)]
    functions: Option<PathBuf>,
    /// Draw random nonnegative functions from this seed instead.
    #[arg(long)]
    function_seed: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 16)]
    restarts: u32,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_sweeps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    functions: Option<PathBuf>,
    #[arg(long)]
    function_seed: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct StudyArgs {
    /// Study file {"specs": [...]}; omit to generate --count random specs.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 1)]
    dimension: u32,
    #[arg(long, default_value_t = 3)]
    depth: u32,
    #[arg(long, default_value = "2,2,2")]
    exponents: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 16)]
    restarts: u32,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    certify: bool,
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    ratio_min: Option<f64>,
    #[arg(long)]
    ratio_max: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    /// Unreadable or unparsable input, invalid spec values.
    Malformed(String),
    /// A requested check did not hold.
    Threshold(String),
}

impl CliError {
    fn code(&self) -> ExitCode {
        match self {
            CliError::Threshold(_) => ExitCode::from(1),
            CliError::Malformed(_) => ExitCode::from(2),
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Malformed(m) | CliError::Threshold(m) => m,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn malformed<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Malformed(e.to_string())
}

#[derive(Serialize, Deserialize)]
struct FunctionsFile {
    functions: [Vec<f64>; 3],
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    version: u32,
    kind: &'a str,
    instance: &'a InstanceSpec,
    results: T,
}

fn read_spec(path: &PathBuf) -> CliResult<InstanceSpec> {
    let text = fs::read_to_string(path).map_err(malformed)?;
    InstanceSpec::from_json(&text).map_err(malformed)
}

fn load_instance(path: &PathBuf) -> CliResult<(InstanceSpec, Instance)> {
    let spec = read_spec(path)?;
    let inst = generate_instance(&spec).map_err(malformed)?;
    Ok((spec, inst))
}

fn emit(output: &Option<PathBuf>, body: String) -> CliResult<()> {
    match output {
        Some(path) => fs::write(path, body).map_err(malformed),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn report_json<T: Serialize>(kind: &str, spec: &InstanceSpec, results: T) -> String {
    let report = Report {
        version: 1,
        kind,
        instance: spec,
        results,
    };
    let mut out = serde_json::to_string_pretty(&report).expect("report serializes");
    out.push('\n');
    out
}

fn parse_exponents(text: &str) -> CliResult<[f64; 3]> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(malformed)?;
    let arr: [f64; 3] = parts
        .try_into()
        .map_err(|_| CliError::Malformed("expected exactly three exponents".to_string()))?;
    Ok(arr)
}

fn parse_kernel(text: &str) -> CliResult<KernelSpec> {
    if text == "uniform" {
        return Ok(KernelSpec::Uniform { seed: None });
    }
    if let Some(alpha) = text.strip_prefix("alpha:") {
        return Ok(KernelSpec::Homogeneous {
            alpha: alpha.parse().map_err(malformed)?,
        });
    }
    Err(CliError::Malformed(format!(
        "unknown kernel generator '{text}' (expected 'uniform' or 'alpha:<value>')"
    )))
}

fn parse_measures(text: &str) -> CliResult<MeasureSpec> {
    if text == "uniform" {
        return Ok(MeasureSpec::Uniform { seed: None });
    }
    if let Some(d) = text.strip_prefix("sparse:") {
        return Ok(MeasureSpec::Sparse {
            density: d.parse().map_err(malformed)?,
            seed: None,
        });
    }
    Err(CliError::Malformed(format!(
        "unknown measure generator '{text}' (expected 'uniform' or 'sparse:<density>')"
    )))
}

fn functions_for(
    inst: &Instance,
    file: &Option<PathBuf>,
    seed: Option<u64>,
) -> CliResult<[GridFunction; 3]> {
    let tree = inst.tree();
    if let Some(path) = file {
        let text = fs::read_to_string(path).map_err(malformed)?;
        let parsed: FunctionsFile = serde_json::from_str(&text).map_err(malformed)?;
        let mut out = Vec::new();
        for values in parsed.functions {
            out.push(GridFunction::from_values(tree, values).map_err(malformed)?);
        }
        return Ok(out.try_into().expect("three functions"));
    }
    if let Some(seed) = seed {
        return Ok(seeded_functions(tree, seed));
    }
    Ok([(); 3].map(|_| GridFunction::constant(tree, 1.0)))
}

fn run_generate(args: GenerateArgs) -> CliResult<()> {
    let spec = match &args.input {
        Some(path) => read_spec(path)?,
        None => InstanceSpec {
            version: 1,
            n: args.dimension,
            depth: args.depth,
            p: parse_exponents(&args.exponents)?,
            kernel: parse_kernel(&args.kernel)?,
            measures: [
                parse_measures(&args.measures)?,
                parse_measures(&args.measures)?,
                parse_measures(&args.measures)?,
            ],
            seed: args.seed,
        },
    };
    let materialized = spec.materialize().map_err(malformed)?;
    emit(&args.output, materialized.to_json())
}

fn run_eval_form(args: EvalArgs) -> CliResult<()> {
    let (spec, inst) = load_instance(&args.input)?;
    let fs = functions_for(&inst, &args.functions, args.function_seed)?;
    let sigmas = inst.measures();
    let value = trilinear_form(
        inst.tree(),
        inst.kernel(),
        [&sigmas[0], &sigmas[1], &sigmas[2]],
        [&fs[0], &fs[1], &fs[2]],
    );
    if args.output.is_some() {
        println!("trilinear form = {value:.16e}");
    }
    emit(
        &args.output,
        report_json("eval-form", &spec, serde_json::json!({ "form": value })),
    )
}

fn run_battery(args: InstanceArgs) -> CliResult<()> {
    let (spec, inst) = load_instance(&args.input)?;
    let report = theorem_battery(&inst);
    if args.output.is_some() {
        match report.infeasible {
            true => println!("c2 = infeasible"),
            false => println!("c2 = {:.16e}", report.c2),
        }
    }
    emit(
        &args.output,
        report_json("battery", &spec, report.to_doc(inst.tree())),
    )
}

fn run_estimate(args: EstimateArgs) -> CliResult<()> {
    let (spec, inst) = load_instance(&args.input)?;
    let result = estimate_c1_with(&inst, args.restarts, args.seed, args.max_sweeps, args.tol)
        .map_err(malformed)?;
    if args.output.is_some() {
        println!("c1 estimate = {:.16e}", result.c1_estimate);
    }
    emit(
        &args.output,
        report_json("estimate-c1", &spec, result.to_doc()),
    )
}

fn run_certify(args: CertifyArgs) -> CliResult<()> {
    let (spec, inst) = load_instance(&args.input)?;
    let battery = theorem_battery(&inst);
    if battery.infeasible {
        return Err(CliError::Threshold(
            "certificate rejected: the instance has an infeasible testing constant".to_string(),
        ));
    }
    let fs = functions_for(&inst, &args.functions, args.function_seed)?;
    let cert = verify_corona_certificate(&inst, &fs, battery.c2)
        .map_err(|e| CliError::Threshold(e.to_string()))?;
    let pass = cert.pass;
    if args.output.is_some() {
        println!(
            "certificate: {} (form = {:.16e}, bound = {:.16e})",
            if pass { "pass" } else { "FAIL" },
            cert.form,
            cert.final_bound
        );
    }
    emit(&args.output, report_json("certify", &spec, &cert))?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Threshold(
            "certificate failed: some recorded step does not hold".to_string(),
        ))
    }
}

#[derive(Serialize, Deserialize)]
struct StudyFile {
    specs: Vec<InstanceSpec>,
}

fn run_study_cmd(args: StudyArgs) -> CliResult<()> {
    let specs = match &args.input {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(malformed)?;
            let parsed: StudyFile = serde_json::from_str(&text).map_err(malformed)?;
            parsed.specs
        }
        None => {
            let p = parse_exponents(&args.exponents)?;
            (0..args.count)
                .map(|i| {
                    InstanceSpec::random(
                        args.dimension,
                        args.depth,
                        p,
                        args.seed.wrapping_add(i as u64),
                    )
                })
                .collect()
        }
    };
    let options = StudyOptions {
        restarts: args.restarts,
        tol: args.tol,
        seed: args.seed,
        certify: args.certify,
        strict: args.strict,
        ratio_min: args.ratio_min,
        ratio_max: args.ratio_max,
        ..StudyOptions::default()
    };
    let report = run_study(&specs, &options);
    if args.output.is_some() {
        let agg = &report.aggregate;
        println!(
            "instances = {}, excluded zero = {}, failed = {}",
            agg.evaluated, agg.excluded_zero, agg.failed
        );
        if let (Some(lo), Some(med), Some(hi)) = (agg.ratio_min, agg.ratio_median, agg.ratio_max)
        {
            println!("ratio min = {lo:.16e}");
            println!("ratio median = {med:.16e}");
            println!("ratio max = {hi:.16e}");
        }
    }
    let body = {
        let mut out = serde_json::to_string_pretty(&report).expect("report serializes");
        out.push('\n');
        out
    };
    emit(&args.output, body)?;
    if report.thresholds_met {
        Ok(())
    } else {
        Err(CliError::Threshold("study thresholds not met".to_string()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(args) => run_generate(args),
        Command::EvalForm(args) => run_eval_form(args),
        Command::Battery(args) => run_battery(args),
        Command::EstimateC1(args) => run_estimate(args),
        Command::Certify(args) => run_certify(args),
        Command::Study(args) => run_study_cmd(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}
