//! Command-line front end and result persistence.
//!
//! Payload files (`summary.json`, `trials.jsonl`, `sweep.csv`, `kernels.csv`)
//! depend only on the flags and seed. Wall-clock data goes to `run_meta.json`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::attack::{couple_perturb, optimal_parity_evasion, CouplingPolicy};
use crate::detector::{self, DetectorConfig, TestVariant};
use crate::error::{Error, Result};
use crate::harness::{
    self, standard_normals, trial_rng, ExperimentSpec, ExperimentSummary, SweepGrid, SweepTable,
};
use crate::kernels::{self, KernelParams};

/// Largest admissible `|fp_residual|` in a kernel dump.
pub const KERNEL_RESIDUAL_LIMIT: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "gaussvol", version, about = "Gaussian volume under hypercube translations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate p, g, gamma, phi and the balance residual on a grid.
    Kernels(KernelArgs),
    /// One coupling attack on a fresh normal sample.
    Attack(DemoArgs),
    /// One detector decision on a clean and an evasively attacked sample.
    Detect(DemoArgs),
    /// Run a Monte Carlo experiment.
    Experiment(RunArgs),
    /// Run a parameter sweep across the detection threshold.
    Sweep(RunArgs),
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Comma-separated subset of csv, json, jsonl.
    #[arg(long, default_value = "csv,json")]
    format: String,
}

#[derive(Debug, Args)]
struct KernelArgs {
    #[arg(long)]
    a: f64,
    #[arg(long, default_value_t = -4.0, allow_hyphen_values = true)]
    xmin: f64,
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    xmax: f64,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct DemoArgs {
    #[arg(long, default_value_t = 2.0)]
    a: f64,
    #[arg(long, default_value_t = 2000)]
    n: usize,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    #[arg(long, default_value_t = 3.0)]
    lambda: f64,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    preset: Preset,
    /// JSON file with ExperimentSpec fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

/// Named parameter sets matching the acceptance criteria.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    CouplingValidation,
    Thm1Undetectable,
    Thm1Detectable,
    Thm2Undetectable,
    Thm2Detectable,
    PhaseT,
    PhaseC,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::CouplingValidation => "coupling-validation",
            Preset::Thm1Undetectable => "thm1-undetectable",
            Preset::Thm1Detectable => "thm1-detectable",
            Preset::Thm2Undetectable => "thm2-undetectable",
            Preset::Thm2Detectable => "thm2-detectable",
            Preset::PhaseT => "phase-t",
            Preset::PhaseC => "phase-c",
        }
    }

    /// Base spec with `master_seed = 0`; the caller supplies the seed.
    pub fn spec(self) -> ExperimentSpec {
        match self {
            Preset::CouplingValidation | Preset::Thm2Undetectable => {
                ExperimentSpec::fixed_a(2.0, 2000, 0.05, 3.0, 10_000, 0)
            }
            Preset::Thm1Undetectable => ExperimentSpec::cube_scaling(1.5, 10_000, 3.0, 10_000, 0),
            Preset::Thm1Detectable => ExperimentSpec::cube_scaling(4.0, 10_000, 3.0, 10_000, 0),
            Preset::Thm2Detectable => ExperimentSpec::fixed_a(2.0, 5000, 0.05, 3.0, 10_000, 0),
            Preset::PhaseT => ExperimentSpec::fixed_a(2.0, 2000, 0.1, 3.0, 10_000, 0),
            Preset::PhaseC => ExperimentSpec::cube_scaling(1.0, 2000, 3.0, 1000, 0),
        }
    }

    fn is_sweep(self) -> bool {
        matches!(self, Preset::PhaseT | Preset::PhaseC)
    }
}

/// Optional overrides with the same field names as [`ExperimentSpec`].
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecOverrides {
    pub regime: Option<harness::Regime>,
    pub a: Option<f64>,
    pub c: Option<f64>,
    pub n: Option<usize>,
    pub t: Option<f64>,
    pub epsilon: Option<f64>,
    pub lambda: Option<f64>,
    pub alpha: Option<f64>,
    pub trials: Option<usize>,
    pub master_seed: Option<u64>,
    pub record_trials: Option<bool>,
    pub ks_sample_cap: Option<usize>,
}

impl SpecOverrides {
    pub fn apply(&self, spec: &mut ExperimentSpec) {
        if let Some(v) = self.regime {
            spec.regime = v;
        }
        macro_rules! set_opt {
            ($($field:ident),*) => {$(
                if self.$field.is_some() {
                    spec.$field = self.$field;
                }
            )*};
        }
        set_opt!(a, c, t);
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    spec.$field = v;
                }
            )*};
        }
        set!(n, epsilon, lambda, alpha, trials, master_seed, record_trials, ks_sample_cap);
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Formats {
    csv: bool,
    json: bool,
    jsonl: bool,
}

fn parse_formats(list: &str) -> Result<Formats> {
    let mut formats = Formats::default();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item {
            "csv" => formats.csv = true,
            "json" => formats.json = true,
            "jsonl" => formats.jsonl = true,
            other => {
                return Err(Error::spec(
                    "format",
                    format!("unknown format `{other}` (expected csv, json or jsonl)"),
                ))
            }
        }
    }
    Ok(formats)
}

/// Fully resolved invocation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub preset: Option<Preset>,
    pub spec: Option<ExperimentSpec>,
    pub output_dir: PathBuf,
    pub formats: Vec<String>,
    pub master_seed: Option<u64>,
}

/// What a command produced, used for the exit code.
#[derive(Debug, Default)]
struct Outcome {
    failures: usize,
}

impl Outcome {
    fn report(&mut self, scope: &str, name: &str, pass: bool, detail: &str) {
        if !pass {
            self.failures += 1;
        }
        println!("{} {scope}/{name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }

    fn summary(&mut self, summary: &ExperimentSummary) {
        for w in &summary.warnings {
            println!("WARN {}: {w}", summary.experiment);
        }
        for check in &summary.checks {
            self.report(&summary.experiment, &check.name, check.pass, &check.detail);
        }
    }
}

fn ensure_finite(summary: &ExperimentSummary) -> Result<()> {
    for (name, value) in summary.numeric_fields() {
        if !value.is_finite() {
            return Err(Error::spec(name, format!("non-finite output value {value}")));
        }
    }
    Ok(())
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut file = fs::File::create(dir.join(name))?;
    file.write_all(contents.as_bytes())?;
    Ok(())
}

fn write_meta(dir: &Path, config: &RunConfig, started: SystemTime, elapsed: f64) -> Result<()> {
    let started_unix = started
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or_default();
    let meta = serde_json::json!({
        "command": config.command,
        "preset": config.preset.map(Preset::name),
        "seed": config.master_seed,
        "version": env!("CARGO_PKG_VERSION"),
        "started_unix": started_unix,
        "wall_time_seconds": elapsed,
        "config": config,
    });
    write_file(dir, "run_meta.json", &serde_json::to_string_pretty(&meta)?)
}

fn summary_outputs(dir: &Path, formats: Formats, summary: &ExperimentSummary) -> Result<()> {
    ensure_finite(summary)?;
    if formats.json {
        write_file(dir, "summary.json", &serde_json::to_string_pretty(summary)?)?;
    }
    if formats.jsonl {
        let mut lines = String::new();
        for record in &summary.trials {
            lines.push_str(&serde_json::to_string(record)?);
            lines.push('\n');
        }
        write_file(dir, "trials.jsonl", &lines)?;
    }
    Ok(())
}

/// Kernel table as CSV, plus the largest absolute balance residual.
pub fn kernel_table(params: &KernelParams, xmin: f64, xmax: f64, step: f64) -> Result<(String, f64)> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::spec("step", format!("must be positive, got {step}")));
    }
    if !(xmin.is_finite() && xmax.is_finite() && xmin <= xmax) {
        return Err(Error::spec("xmin", format!("need xmin <= xmax, got {xmin} > {xmax}")));
    }
    let limit = params.x_max() - params.a();
    for (field, v) in [("xmin", xmin), ("xmax", xmax)] {
        if v.abs() > limit {
            return Err(Error::spec(
                field,
                format!("|{v}| exceeds the residual domain 12 + 3a = {limit}"),
            ));
        }
    }
    let count = ((xmax - xmin) / step + 1e-9).floor() as usize + 1;
    let mut csv = String::from("x,p,g,gamma,phi,fp_residual\n");
    let mut worst = 0.0f64;
    for i in 0..count {
        let x = xmin + i as f64 * step;
        let residual = kernels::fp_residual(x, params)?;
        worst = worst.max(residual.abs());
        let _ = writeln!(
            csv,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            x,
            kernels::normal_pdf(x),
            kernels::eval_g(x, params)?.value,
            kernels::eval_gamma(x, params)?,
            kernels::eval_phi(x, params)?,
            residual
        );
    }
    Ok((csv, worst))
}

fn seed_or_err(seed: Option<u64>) -> Result<u64> {
    seed.ok_or_else(|| Error::spec("seed", "a seed is required for stochastic commands"))
}

fn run_kernels(args: &KernelArgs, out: &mut Outcome) -> Result<RunConfig> {
    let formats = parse_formats(&args.output.format)?;
    let params = KernelParams::new(args.a)
        .map_err(|e| Error::spec("a", e.to_string()))?;
    let (csv, worst) = kernel_table(&params, args.xmin, args.xmax, args.step)?;
    if formats.csv {
        write_file(&args.output.out, "kernels.csv", &csv)?;
    }
    out.report(
        "kernels",
        "fp_residual",
        worst <= KERNEL_RESIDUAL_LIMIT,
        &format!("max |fp residual| = {worst:.3e} (limit {KERNEL_RESIDUAL_LIMIT:e})"),
    );
    Ok(RunConfig {
        command: "kernels".into(),
        preset: None,
        spec: None,
        output_dir: args.output.out.clone(),
        formats: format_names(formats),
        master_seed: None,
    })
}

fn format_names(f: Formats) -> Vec<String> {
    [("csv", f.csv), ("json", f.json), ("jsonl", f.jsonl)]
        .iter()
        .filter(|(_, on)| *on)
        .map(|(n, _)| n.to_string())
        .collect()
}

fn run_attack_demo(args: &DemoArgs) -> Result<()> {
    let seed = seed_or_err(args.seed)?;
    let kernel = KernelParams::new(args.a).map_err(|e| Error::spec("a", e.to_string()))?;
    let g_a = kernels::eval_big_g(&kernel)?.value;
    let mut rng = trial_rng(seed, 0);
    let x = standard_normals(&mut rng, args.n);
    let mut policy = CouplingPolicy::new(kernel, &mut rng);
    let (theta, shifted) = couple_perturb(&x, &mut policy)?;
    let sr = theta.sparsity_ratio()?;
    println!("a = {}, n = {}, G(a) = {g_a:.6e}", args.a, args.n);
    println!("zero count S_n = {}, sparsity ratio = {sr:.6}", theta.zero_count());
    println!(
        "parity statistic: A(x) = {:.6}, A(x') = {:.6}",
        detector::parity_statistic(&x, args.a)?,
        detector::parity_statistic(&shifted, args.a)?
    );
    if let Some(t) = args.t {
        println!("theta in F_(a,{t}): {}", theta.in_sparse_set(t)?);
    }
    Ok(())
}

fn run_detect_demo(args: &DemoArgs) -> Result<()> {
    let seed = seed_or_err(args.seed)?;
    let config = DetectorConfig::new(args.a, args.lambda, TestVariant::Thresholded)
        .map_err(|e| Error::spec("a", e.to_string()))?;
    let t = args.t.unwrap_or(config.g_a() - args.epsilon);
    let mut rng = trial_rng(seed, 0);
    let x = standard_normals(&mut rng, args.n);
    let clean = detector::decide(&x, &config)?;
    let labels = detector::labels(&x, args.a);
    let theta = optimal_parity_evasion(&labels, args.a, t)?;
    let attacked: Vec<f64> = x.iter().zip(theta.entries()).map(|(x, d)| x + d).collect();
    let post = detector::decide(&attacked, &config)?;
    println!(
        "a = {}, n = {}, lambda = {}, G(a) = {:.6}, t = {t:.6}",
        args.a,
        args.n,
        args.lambda,
        config.g_a()
    );
    println!("clean:    A = {:.6}, accept H0 = {}", clean.statistic_a, clean.accept_h0);
    println!(
        "attacked: A = {:.6}, accept H0 = {} (sr = {:.6})",
        post.statistic_a,
        post.accept_h0,
        theta.sparsity_ratio()?
    );
    Ok(())
}

fn resolve_spec(args: &RunArgs) -> Result<ExperimentSpec> {
    let mut spec = args.preset.spec();
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::spec("config", format!("{}: {e}", path.display())))?;
        let overrides: SpecOverrides = serde_json::from_str(&text)
            .map_err(|e| Error::spec("config", e.to_string()))?;
        overrides.apply(&mut spec);
    }
    let flags = SpecOverrides {
        a: args.a,
        c: args.c,
        n: args.n,
        t: args.t,
        epsilon: args.epsilon,
        lambda: args.lambda,
        alpha: args.alpha,
        trials: args.trials,
        master_seed: args.seed,
        ..SpecOverrides::default()
    };
    flags.apply(&mut spec);
    if args.seed.is_none() && args.config.is_none() {
        seed_or_err(None)?;
    }
    spec.validate()?;
    Ok(spec)
}

/// Runs the experiment a preset names.
pub fn run_preset(preset: Preset, spec: &ExperimentSpec) -> Result<ExperimentSummary> {
    match preset {
        Preset::CouplingValidation => harness::run_coupling_validation(spec),
        Preset::Thm1Undetectable => harness::run_thm1_undetectable(spec),
        Preset::Thm1Detectable => harness::run_thm1_detectable(spec),
        Preset::Thm2Undetectable => harness::run_thm2_undetectable(spec),
        Preset::Thm2Detectable => harness::run_thm2_detectable(spec),
        Preset::PhaseT | Preset::PhaseC => Err(Error::spec(
            "preset",
            format!("`{}` is a sweep preset; use the sweep command", preset.name()),
        )),
    }
}

/// Runs the sweep a preset names over its default grid.
pub fn run_sweep_preset(preset: Preset, spec: &ExperimentSpec) -> Result<SweepTable> {
    let grid = match preset {
        Preset::PhaseT => {
            let a = spec.edge()?;
            let g_a = kernels::eval_big_g(&KernelParams::with_controls(a, 1e-12, 4096)?)?.value;
            SweepGrid::around_threshold(g_a)
        }
        Preset::PhaseC => SweepGrid::cube_constants(),
        other => {
            return Err(Error::spec(
                "preset",
                format!("`{}` is not a sweep preset (use phase-t or phase-c)", other.name()),
            ))
        }
    };
    harness::sweep_phase_transition(spec, &grid)
}

fn run_experiment(args: &RunArgs, out: &mut Outcome) -> Result<RunConfig> {
    let formats = parse_formats(&args.output.format)?;
    if args.preset.is_sweep() {
        return Err(Error::spec(
            "preset",
            format!("`{}` is a sweep preset; use the sweep command", args.preset.name()),
        ));
    }
    let mut spec = resolve_spec(args)?;
    spec.record_trials |= formats.jsonl;
    let summary = run_preset(args.preset, &spec)?;
    summary_outputs(&args.output.out, formats, &summary)?;
    out.summary(&summary);
    Ok(RunConfig {
        command: "experiment".into(),
        preset: Some(args.preset),
        master_seed: Some(spec.master_seed),
        spec: Some(spec),
        output_dir: args.output.out.clone(),
        formats: format_names(formats),
    })
}

fn run_sweep(args: &RunArgs, out: &mut Outcome) -> Result<RunConfig> {
    let formats = parse_formats(&args.output.format)?;
    let spec = resolve_spec(args)?;
    let table = run_sweep_preset(args.preset, &spec)?;
    for cell in &table.cells {
        ensure_finite(cell)?;
        for w in &cell.warnings {
            println!("WARN {}: {w}", cell.experiment);
        }
    }
    if formats.csv {
        write_file(&args.output.out, "sweep.csv", &table.to_csv())?;
    }
    if formats.json {
        write_file(&args.output.out, "summary.json", &serde_json::to_string_pretty(&table)?)?;
    }
    for row in &table.rows {
        println!(
            "{} = {:.4}: attacker success {:.4} [{:.4}, {:.4}], null acceptance {:.4}",
            row.parameter,
            row.value,
            row.attacker_success.estimate,
            row.attacker_success.ci_low,
            row.attacker_success.ci_high,
            row.null_acceptance.estimate
        );
    }
    if args.preset == Preset::PhaseT {
        out.report(
            "phase-t",
            "monotone_in_t",
            table.attacker_success_monotone(),
            "attacker success is non-decreasing in t",
        );
    }
    Ok(RunConfig {
        command: "sweep".into(),
        preset: Some(args.preset),
        master_seed: Some(spec.master_seed),
        spec: Some(spec),
        output_dir: args.output.out.clone(),
        formats: format_names(formats),
    })
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::InvalidSpec { .. } | Error::InvalidParameter { .. } | Error::EmptyFeasibleSet { .. } => 2,
        _ => 1,
    }
}

/// Entry point of the `gaussvol` binary. Returns the process exit code:
/// 0 when every run-level assertion passes, 1 on assertion or runtime
/// failure, 2 on invalid input.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let started = SystemTime::now();
    let clock = Instant::now();
    let mut outcome = Outcome::default();
    let result = match &cli.command {
        Command::Kernels(args) => run_kernels(args, &mut outcome).map(Some),
        Command::Attack(args) => run_attack_demo(args).map(|_| None),
        Command::Detect(args) => run_detect_demo(args).map(|_| None),
        Command::Experiment(args) => run_experiment(args, &mut outcome).map(Some),
        Command::Sweep(args) => run_sweep(args, &mut outcome).map(Some),
    };
    match result {
        Ok(config) => {
            if let Some(config) = config {
                if let Err(e) = write_meta(&config.output_dir, &config, started, clock.elapsed().as_secs_f64()) {
                    eprintln!("error: {e}");
                    return 1;
                }
            }
            if outcome.failures == 0 {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_parse() {
        let f = parse_formats("csv, jsonl").unwrap();
        assert!(f.csv && f.jsonl && !f.json);
        assert!(matches!(parse_formats("xml"), Err(Error::InvalidSpec { field, .. }) if field == "format"));
    }

    #[test]
    fn overrides_apply() {
        let mut spec = Preset::Thm2Detectable.spec();
        let o: SpecOverrides = serde_json::from_str(r#"{"n": 4000, "t": 0.2}"#).unwrap();
        o.apply(&mut spec);
        assert_eq!(spec.n, 4000);
        assert_eq!(spec.t, Some(0.2));
        assert!(serde_json::from_str::<SpecOverrides>(r#"{"m": 1}"#).is_err());
    }

    #[test]
    fn kernel_table_domain() {
        let p = KernelParams::new(1.2).unwrap();
        let (csv, worst) = kernel_table(&p, -1.0, 1.0, 0.5).unwrap();
        assert_eq!(csv.lines().count(), 6);
        assert!(worst < 1e-12);
        assert!(kernel_table(&p, -20.0, 1.0, 0.5).is_err());
        assert!(kernel_table(&p, -1.0, 1.0, 0.0).is_err());
    }
}
