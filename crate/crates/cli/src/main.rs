//! `sjf` — construct, verify, classify and simulate local martingales on
//! single-jump filtrations from a JSON run configuration.
//!
//! Exit codes: 0 success, 2 config parse error, 3 config validation error,
//! 4 an integral that must converge diverged, 5 module precondition failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sjf_core::compensator::{check_locally_integrable, compensate, survival_from_k};
use sjf_core::config::{parse_config, ConfigError, Mode, RunConfig};
use sjf_core::error::Error;
use sjf_core::measure::{CaseTag, Distribution};
use sjf_core::options::NumericOptions;
use sjf_core::preset::{bundle, Preset, PresetBundle};
use sjf_core::simulate::{simulate, SimulationReport};
use sjf_core::solver::{
    classify, sigma_status, solve_f_from_h, solve_h_from_f, verify_condition_m, ConditionMPair,
    NoiseSpec,
};

const AFTER_HELP: &str = "\
Numeric options and defaults (config \"options\" block, some overridable by flags):
  quad_abs_tol     1e-10   absolute quadrature tolerance
  quad_rel_tol     1e-8    relative quadrature tolerance
  max_subdivisions 2000    adaptive subdivision budget per integral
  tail_steps       40      truncation steps toward the open endpoint
  grid_size        64      quantile-spaced grid points (--grid)
  survival_floor   1e-12   grid points keep survival above this floor
  sign_tol         1e-7    zero band for the sign of lim F*Gbar
  condition_m_tol  1e-8    balance-equation residual tolerance (--tol)
  n_paths          100000  Monte Carlo sample size (--n-paths)";

#[derive(Parser)]
#[command(
    name = "sjf",
    version,
    about = "Local martingales on single-jump filtrations: solve, verify, classify, simulate",
    after_help = AFTER_HELP
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve for F given H and the jump-time law
    SolveF(RunArgs),
    /// Solve for H given (F0, z) and the jump-time law
    SolveH(RunArgs),
    /// Classify the global behaviour (types 1, 2a, 2b, 3, 4)
    Classify(RunArgs),
    /// Decide local-martingale vs strictly-sigma-martingale status
    Sigma(RunArgs),
    /// Compensator of the single-jump process defined by a mark
    Compensate(RunArgs),
    /// Survival function recovered from a positive conditional mean K
    Survival(RunArgs),
    /// Monte Carlo over the jump representation
    Simulate(RunArgs),
    /// Run a named preset end to end
    Example(ExampleArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV and verdict files
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Simulation seed (overrides the config)
    #[arg(long)]
    seed: Option<u64>,
    /// Number of Monte Carlo paths (overrides the config)
    #[arg(long)]
    n_paths: Option<usize>,
    /// Grid size for curve outputs and validation grids (overrides the config)
    #[arg(long)]
    grid: Option<usize>,
    /// Balance-equation residual tolerance (overrides the config)
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct ExampleArgs {
    /// Preset name: dellacherie, emery, usualcond, dubins-gilat, caseB-two-atoms
    name: Option<String>,
    /// Alternatively, a config with mode "example"
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n_paths: Option<usize>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

/// A failure carrying its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        let code = match e {
            ConfigError::Parse { .. } => 2,
            ConfigError::Validation { .. } => 3,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DivergentIntegral { .. } | Error::CaseBNonIntegrable { .. } => 4,
            _ => 5,
        };
        Failure::new(code, e.to_string())
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run() -> Result<(), Failure> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::SolveF(a) => dispatch(a, Mode::SolveF),
        Cmd::SolveH(a) => dispatch(a, Mode::SolveH),
        Cmd::Classify(a) => dispatch(a, Mode::Classify),
        Cmd::Sigma(a) => dispatch(a, Mode::Sigma),
        Cmd::Compensate(a) => dispatch(a, Mode::Compensate),
        Cmd::Survival(a) => dispatch(a, Mode::Survival),
        Cmd::Simulate(a) => dispatch(a, Mode::Simulate),
        Cmd::Example(a) => run_example(a),
    }
}

fn load_config(path: &Path, expect: Mode) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(2, format!("cannot read {}: {e}", path.display())))?;
    let cfg = parse_config(&text)?;
    if cfg.mode != expect {
        return Err(Failure::new(
            3,
            format!(
                "config mode \"{}\" does not match subcommand \"{}\"",
                cfg.mode.name(),
                expect.name()
            ),
        ));
    }
    Ok(cfg)
}

struct Run {
    cfg: RunConfig,
    opts: NumericOptions,
    seed: u64,
    n_paths: usize,
    out: PathBuf,
}

fn prepare(args: &RunArgs, mode: Mode) -> Result<Run, Failure> {
    let cfg = load_config(&args.config, mode)?;
    let mut opts = cfg.options.clone().unwrap_or_default();
    if let Some(g) = args.grid {
        opts.grid_size = g;
    }
    if let Some(t) = args.tol {
        opts.condition_m_tol = t;
    }
    if let Some(n) = args.n_paths {
        opts.n_paths = n;
    }
    let seed = args.seed.or(cfg.seed).unwrap_or(1);
    let n_paths = args.n_paths.or(cfg.n_paths).unwrap_or(opts.n_paths);
    Ok(Run {
        cfg,
        opts,
        seed,
        n_paths,
        out: args.out.clone(),
    })
}

fn dispatch(args: RunArgs, mode: Mode) -> Result<(), Failure> {
    let run = prepare(&args, mode)?;
    std::fs::create_dir_all(&run.out)
        .map_err(|e| Failure::new(5, format!("cannot create {}: {e}", run.out.display())))?;
    match mode {
        Mode::SolveF | Mode::SolveH => run_solve(&run, mode),
        Mode::Classify => run_classify(&run),
        Mode::Sigma => run_sigma(&run),
        Mode::Compensate => run_compensate(&run),
        Mode::Survival => run_survival(&run),
        Mode::Simulate => run_simulate(&run),
        Mode::Example => unreachable!("example has its own entry point"),
    }
}

fn header(run: &Run, mode: &str) -> String {
    let o = &run.opts;
    format!(
        "# sjf {} mode={mode} seed={} n_paths={} quad_abs_tol={:e} quad_rel_tol={:e} \
         grid={} survival_floor={:e} sign_tol={:e} condition_m_tol={:e}\n",
        env!("CARGO_PKG_VERSION"),
        run.seed,
        run.n_paths,
        o.quad_abs_tol,
        o.quad_rel_tol,
        o.grid_size,
        o.survival_floor,
        o.sign_tol,
        o.condition_m_tol
    )
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Failure> {
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .map_err(|e| Failure::new(5, format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn distribution(run: &Run) -> Result<Distribution, Failure> {
    Ok(run
        .cfg
        .distribution
        .as_ref()
        .expect("validated")
        .build()?)
}

fn noise(run: &Run) -> Result<NoiseSpec, Failure> {
    match &run.cfg.noise {
        Some(n) => Ok(n.build()?),
        None => Ok(NoiseSpec::Zero),
    }
}

/// Curve CSV for a validated pair: t, F, H, z on the validation grid.
fn pair_csv(run: &Run, cm: &ConditionMPair, mode: &str) -> String {
    let d = cm.distribution();
    let mut s = header(run, mode);
    s.push_str("t,F,H,z\n");
    for t in d.support_grid(run.opts.grid_size, run.opts.survival_floor) {
        let _ = writeln!(s, "{},{},{},{}", t, cm.pair.f(t), cm.h.eval(t), cm.pair.z().eval(t));
    }
    s
}

fn describe_residual(cm: &ConditionMPair, run: &Run) -> Result<String, Failure> {
    let report = verify_condition_m(cm, run.opts.grid_size, run.opts.condition_m_tol, &run.opts)?;
    let mut s = format!(
        "balance residual: max {:.3e} over {} grid points ({})\n",
        report.max_residual,
        report.grid_points,
        if report.passes() { "pass" } else { "FAIL" }
    );
    if let Some(e) = report.endpoint_residual {
        let _ = writeln!(s, "endpoint matching residual: {e:.3e}");
    }
    Ok(s)
}

fn run_solve(run: &Run, mode: Mode) -> Result<(), Failure> {
    let d = distribution(run)?;
    let cm = match mode {
        Mode::SolveF => {
            let h = run.cfg.h.as_ref().expect("validated").build()?;
            solve_f_from_h(h, d, run.cfg.f0, &run.opts)?
        }
        _ => {
            let pair_cfg = run.cfg.pair.as_ref().expect("validated");
            let pair = sjf_core::solver::DerivativePair::new(
                pair_cfg.f0,
                pair_cfg.z.build()?,
                d,
                &run.opts,
            )?;
            solve_h_from_f(pair, &run.opts)?
        }
    };

    let case = cm.case();
    let mut out = String::new();
    let _ = writeln!(out, "{case}");
    let _ = writeln!(out, "F(0) = {}", cm.pair.f0());
    if case.tag == CaseTag::B {
        let lim = cm.pair.f_limit(&run.opts)?.require_converged()?;
        let _ = writeln!(out, "lim F = {lim} matches H(t_G) = {}", cm.h.eval(case.t_g));
    }
    out.push_str(&describe_residual(&cm, run)?);
    print!("{out}");

    let name = format!("{}.csv", mode.name().replace('-', "_"));
    let path = write_file(&run.out, &name, &pair_csv(run, &cm, mode.name()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run_classify(run: &Run) -> Result<(), Failure> {
    let d = distribution(run)?;
    let cm = run.cfg.pair.as_ref().expect("validated").build(&d, &run.opts)?;
    let noise = noise(run)?;
    let class = classify(&cm, &noise, &run.opts)?;

    let mut out = String::new();
    let _ = writeln!(out, "{}", class.tag);
    let _ = writeln!(out, "{}", class.case);
    for note in &class.notes {
        let _ = writeln!(out, "  {note}");
    }
    if let Some(l) = class.lim_f_gbar {
        let _ = writeln!(out, "lim F*Gbar = {l}");
    }
    if let Some(h1) = class.h1_integral {
        let _ = writeln!(
            out,
            "variation integral = {} (converged: {})",
            h1.value, h1.converged
        );
    }
    print!("{out}");
    let path = write_file(
        &run.out,
        "classification.txt",
        &format!("{}{}", header(run, "classify"), out),
    )?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run_sigma(run: &Run) -> Result<(), Failure> {
    let d = distribution(run)?;
    let cm = run.cfg.pair.as_ref().expect("validated").build(&d, &run.opts)?;
    let noise = noise(run)?;
    let status = sigma_status(&cm, &noise, &run.opts)?;
    println!("{status}");
    let path = write_file(
        &run.out,
        "sigma.txt",
        &format!("{}{status}\n", header(run, "sigma")),
    )?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run_compensate(run: &Run) -> Result<(), Failure> {
    let d = distribution(run)?;
    let mark = run.cfg.mark.as_ref().expect("validated").build(&d, &run.opts)?;
    if !check_locally_integrable(&mark, &d, &run.opts)? {
        return Err(Error::NotLocallyIntegrable { at: d.t_g() }.into());
    }
    let res = compensate(&mark, &d, &run.opts)?;

    let case = res.case;
    println!("{case}");
    if case.tag == CaseTag::B {
        println!("endpoint increment K(t_G) = {}", res.case_b_jump);
    }

    let mut s = header(run, "compensate");
    s.push_str("t,F,A_increment\n");
    let grid = d.support_grid(run.opts.grid_size, run.opts.survival_floor);
    let mut prev = 0.0;
    for &t in &grid {
        let f = res.pair.f(t);
        let _ = writeln!(s, "{},{},{}", t, f, f - prev);
        prev = f;
    }
    let path = write_file(&run.out, "compensator.csv", &s)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run_survival(run: &Run) -> Result<(), Failure> {
    let k = run.cfg.k.as_ref().expect("validated").build()?;
    let times = run.cfg.times.as_ref().expect("validated");
    let mut s = header(run, "survival");
    s.push_str("t,survival\n");
    for &t in times {
        let p = survival_from_k(&k, t, &run.opts)?;
        println!("P(gamma > {t}) = {p}");
        let _ = writeln!(s, "{t},{p}");
    }
    let path = write_file(&run.out, "survival.csv", &s)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn simulate_csv(run: &Run, report: &SimulationReport, mode: &str) -> String {
    let mut s = header(run, mode);
    s.push_str("t,mean,se,n\n");
    for ((t, m), se) in report.grid.iter().zip(&report.mean).zip(&report.se) {
        let _ = writeln!(s, "{},{},{},{}", t, m, se, report.n_paths);
    }
    s
}

fn summarize_simulation(report: &SimulationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "n_paths = {}, seed = {}, target mean = {}",
        report.n_paths, report.seed, report.target_mean
    );
    for ((t, m), se) in report.grid.iter().zip(&report.mean).zip(&report.se) {
        let _ = writeln!(out, "  t = {t}: mean {m:.6} (se {se:.3e})");
    }
    let _ = writeln!(
        out,
        "E sup M = {:.6}, E sup|M| = {:.6}, E Var(M) = {:.6}",
        report.e_sup, report.e_sup_abs, report.e_variation
    );
    if let (Some(m), Some(se)) = (report.e_m_inf, report.se_m_inf) {
        let _ = writeln!(out, "E M_inf = {m:.6} (se {se:.3e})");
    }
    out
}

fn run_simulate(run: &Run) -> Result<(), Failure> {
    let d = distribution(run)?;
    let cm = run.cfg.pair.as_ref().expect("validated").build(&d, &run.opts)?;
    let noise = noise(run)?;
    let grid = match &run.cfg.grid {
        Some(g) => g.clone(),
        None => d.support_grid(8, run.opts.survival_floor),
    };
    let report = simulate(&cm, &noise, &grid, run.n_paths, run.seed, &run.opts)?;
    print!("{}", summarize_simulation(&report));
    let path = write_file(&run.out, "simulate.csv", &simulate_csv(run, &report, "simulate"))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run_example(args: ExampleArgs) -> Result<(), Failure> {
    let name = match (&args.name, &args.config) {
        (Some(n), _) => n.clone(),
        (None, Some(path)) => {
            let cfg = load_config(path, Mode::Example)?;
            cfg.name.expect("validated")
        }
        (None, None) => {
            return Err(Failure::new(
                3,
                format!(
                    "example needs a preset name or --config; available: {}",
                    Preset::ALL.iter().map(|p| p.name()).collect::<Vec<_>>().join(", ")
                ),
            ))
        }
    };
    let preset = Preset::from_name(&name).ok_or_else(|| {
        Failure::new(
            3,
            format!(
                "unknown preset \"{name}\"; available: {}",
                Preset::ALL.iter().map(|p| p.name()).collect::<Vec<_>>().join(", ")
            ),
        )
    })?;

    let run_args = RunArgs {
        config: PathBuf::new(),
        out: args.out,
        seed: args.seed,
        n_paths: args.n_paths,
        grid: args.grid,
        tol: args.tol,
    };
    let mut opts = NumericOptions::default();
    if let Some(g) = run_args.grid {
        opts.grid_size = g;
    }
    if let Some(t) = run_args.tol {
        opts.condition_m_tol = t;
    }
    let seed = run_args.seed.unwrap_or(1);
    let n_paths = run_args.n_paths.unwrap_or(opts.n_paths);
    let run = Run {
        cfg: parse_config(&format!(
            "{{\"mode\": \"example\", \"name\": \"{}\"}}",
            preset.name()
        ))?,
        opts,
        seed,
        n_paths,
        out: run_args.out,
    };
    std::fs::create_dir_all(&run.out)
        .map_err(|e| Failure::new(5, format!("cannot create {}: {e}", run.out.display())))?;

    let b = bundle(preset, &run.opts)?;
    let mut out = String::new();
    let _ = writeln!(out, "preset {}: {}", preset.name(), preset.description());
    let _ = writeln!(out, "{}", b.pair.case());
    let _ = writeln!(out, "F(0) = {}", b.pair.pair.f0());
    out.push_str(&describe_residual(&b.pair, &run)?);
    out.push_str(&example_verdicts(&run, &b)?);
    print!("{out}");

    let stem = preset.name().replace('-', "_");
    let path = write_file(
        &run.out,
        &format!("{stem}.txt"),
        &format!("{}{}", header(&run, "example"), out),
    )?;
    println!("wrote {}", path.display());
    Ok(())
}

fn example_verdicts(run: &Run, b: &PresetBundle) -> Result<String, Failure> {
    let mut out = String::new();

    let class = classify(&b.pair, &b.noise, &run.opts)?;
    let _ = writeln!(out, "classification: {}", class.tag);
    for note in &class.notes {
        let _ = writeln!(out, "  {note}");
    }
    let status = sigma_status(&b.pair, &b.noise, &run.opts)?;
    let _ = writeln!(out, "sigma status: {status}");

    if let Some(mark) = &b.mark {
        let integrable = check_locally_integrable(mark, &b.distribution, &run.opts)?;
        let _ = writeln!(out, "mark has locally integrable variation: {integrable}");
        if integrable {
            let res = compensate(mark, &b.distribution, &run.opts)?;
            let mut s = header(run, "compensate");
            s.push_str("t,F,A_increment\n");
            let mut prev = 0.0;
            for &t in &b.sim_grid {
                let f = res.pair.f(t);
                let _ = writeln!(s, "{},{},{}", t, f, f - prev);
                prev = f;
            }
            let stem = b.preset.name().replace('-', "_");
            let path = write_file(&run.out, &format!("{stem}_compensator.csv"), &s)?;
            let _ = writeln!(out, "wrote {}", path.display());
        }
    }

    // Simulation is skipped when the noise makes E|M_t| infinite.
    if b.noise.is_zero() {
        let report = simulate(&b.pair, &b.noise, &b.sim_grid, run.n_paths, run.seed, &run.opts)?;
        out.push_str(&summarize_simulation(&report));
        let stem = b.preset.name().replace('-', "_");
        let path = write_file(
            &run.out,
            &format!("{stem}_simulate.csv"),
            &simulate_csv(run, &report, "example"),
        )?;
        let _ = writeln!(out, "wrote {}", path.display());
    }
    Ok(out)
}
