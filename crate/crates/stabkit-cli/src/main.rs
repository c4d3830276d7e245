//! Command-line front end wiring the library together: solve the covering
//! relaxation, round it, compute exact optima, reproduce the analysis
//! constants, generate instances, and run the gap experiment.
//!
//! Exit codes: 0 on success, 1 when a certification check ran and failed,
//! 2 on usage errors or malformed input. With a fixed seed, identical
//! argv + input files produce byte-identical stdout.

use std::env::VarError;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use stabkit::analysis::recurrence::gamma_star_limit;
use stabkit::analysis::{
    cumulative_f, limitation_grid_min, mu_bar, mu_bar_max, recurrence_table, stationarity_factor,
    window5_certificate, window6_certificate, CertificateReport, CheckRow, MuBarMethod, MuParams,
};
use stabkit::exact::brute_force_opt;
use stabkit::harness::{gen_random, gen_three_halves_lb, run_gap_experiment, ExperimentConfig};
use stabkit::lp::{build_relaxation, solve, LpStatus, SolveMode};
use stabkit::model::{Instance, Kind};
use stabkit::rational::{format_decimal, format_f64_sig, format_rat, int, rat_to_f64, Rat};
use stabkit::rounding::{
    gaur_round, ks_round, segstab_round, unitsq_round, KsMode, RoundedSolution, SegMode,
    UnitSqMode,
};

#[derive(Parser)]
#[command(
    name = "stabkit",
    version,
    about = "Exact LP relaxation, threshold rounding, and certification for stabbing rectangles with lines"
)]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the covering relaxation of an instance.
    Solve {
        /// Instance JSON file.
        #[arg(short = 'i', long = "input", value_name = "FILE")]
        input: PathBuf,
        /// Use the exact rational simplex (default: float arithmetic).
        #[arg(long = "exact-arith")]
        exact_arith: bool,
    },
    /// Round the relaxation optimum with one of the threshold schemes.
    Round {
        /// Instance JSON file.
        #[arg(short = 'i', long = "input", value_name = "FILE")]
        input: PathBuf,
        /// Rounding scheme.
        #[arg(long, value_enum)]
        method: Method,
        /// Threshold selection: enumerate candidates or draw at random.
        #[arg(long, value_enum, default_value_t = Mode::Derand)]
        mode: Mode,
        /// Seed for the random mode.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compute the exact integral optimum by branch and bound.
    Exact {
        /// Instance JSON file.
        #[arg(short = 'i', long = "input", value_name = "FILE")]
        input: PathBuf,
        /// Enumeration cap on the number of candidate lines.
        #[arg(long, default_value_t = 24)]
        cap: usize,
    },
    /// Reproduce the analysis constants and certificates.
    Analyze {
        #[command(subcommand)]
        target: Analyze,
    },
    /// Generate a random instance file.
    Gen {
        /// Instance family.
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Number of rectangles (segments / unit squares).
        #[arg(long, default_value_t = 6)]
        rects: usize,
        /// Number of candidate lines (derived from the squares for unitsqrstab).
        #[arg(long, default_value_t = 7)]
        lines: usize,
        /// Generator seed.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Output file for the instance JSON.
        #[arg(short = 'o', long = "output", value_name = "FILE")]
        output: PathBuf,
    },
    /// Run the integrality-gap experiment described by a config file.
    Gap {
        /// Experiment config JSON file.
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
    },
    /// Check a named certificate end to end.
    Verify {
        #[arg(value_enum)]
        target: VerifyTarget,
    },
}

#[derive(Subcommand)]
enum Analyze {
    /// Tabulate the averaged rounding-cost curve and its maximum.
    #[command(name = "mu-bar")]
    MuBar,
    /// Scan the lower-bound density's threshold-pair landscape.
    Limitation {
        /// Grid resolution per axis (grid + 1 samples per axis).
        #[arg(long, default_value_t = 400)]
        grid: usize,
    },
    /// Exact window constants from the level recurrence.
    Recurrence {
        /// Window size (at least 4).
        #[arg(long)]
        k: usize,
    },
    /// Exact dual certificates for the window-5 and window-6 bounds.
    Claims,
    /// Certified properties of the averaged-cost curve.
    #[command(name = "lemma2")]
    Lemma2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Gaur,
    Ks,
    Segstab,
    Unitsq,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Random,
    Derand,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Rectstab,
    Horizsegstab,
    Segstab,
    Unitsqrstab,
}

impl KindArg {
    fn kind(self) -> Kind {
        match self {
            KindArg::Rectstab => Kind::RectStab,
            KindArg::Horizsegstab => Kind::HorizSegStab,
            KindArg::Segstab => Kind::SegStab,
            KindArg::Unitsqrstab => Kind::UnitSqrStab,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyTarget {
    #[value(name = "claim2")]
    Claim2,
    #[value(name = "claim3")]
    Claim3,
    #[value(name = "three-halves")]
    ThreeHalves,
}

/// A failed run: either a certification check that did not hold (exit 1)
/// or bad usage / malformed input (exit 2).
enum Failure {
    Check,
    Usage(String),
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Restore the default SIGPIPE disposition so `stabkit ... | head` exits
/// quietly instead of panicking on a closed pipe.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() -> ExitCode {
    reset_sigpipe();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Honor STABKIT_THREADS as a cap on the worker pool. The CLI itself stays
/// single-threaded; only library internals fan out.
fn configure_threads() -> Result<(), String> {
    match std::env::var("STABKIT_THREADS") {
        Err(VarError::NotPresent) => Ok(()),
        Err(VarError::NotUnicode(_)) => Err("STABKIT_THREADS is not valid unicode".into()),
        Ok(text) => {
            let n: usize = text
                .parse()
                .map_err(|_| format!("STABKIT_THREADS must be a positive integer, got {text:?}"))?;
            if n == 0 {
                return Err("STABKIT_THREADS must be at least 1".into());
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| e.to_string())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { input, exact_arith } => cmd_solve(&input, exact_arith, cli.json),
        Command::Round {
            input,
            method,
            mode,
            seed,
        } => cmd_round(&input, method, mode, seed, cli.json),
        Command::Exact { input, cap } => cmd_exact(&input, cap, cli.json),
        Command::Analyze { target } => match target {
            Analyze::MuBar => cmd_mu_bar(cli.json),
            Analyze::Limitation { grid } => cmd_limitation(grid, cli.json),
            Analyze::Recurrence { k } => cmd_recurrence(k, cli.json),
            Analyze::Claims => cmd_claims(cli.json),
            Analyze::Lemma2 => cmd_lemma2(cli.json),
        },
        Command::Gen {
            kind,
            rects,
            lines,
            seed,
            output,
        } => cmd_gen(kind.kind(), rects, lines, seed, &output, cli.json),
        Command::Gap { config } => cmd_gap(&config, cli.json),
        Command::Verify { target } => match target {
            VerifyTarget::Claim2 => cmd_certificate(window5_certificate(), cli.json),
            VerifyTarget::Claim3 => cmd_certificate(window6_certificate(), cli.json),
            VerifyTarget::ThreeHalves => cmd_three_halves(cli.json),
        },
    }
}

/// Rational rendered as `p/q` plus its 12-significant-digit decimal.
fn show(r: &Rat) -> String {
    format!("{} (= {})", format_rat(r), format_decimal(r, 12))
}

fn f12(x: f64) -> String {
    format_f64_sig(x, 12)
}

fn rat_json(r: &Rat) -> Value {
    json!({ "dec": format_decimal(r, 12), "rat": format_rat(r) })
}

fn print_json(doc: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(doc).expect("report serialization cannot fail")
    );
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    Instance::from_json_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Global line index rendered as `v#`/`h#` to match the relaxation's
/// variable names.
fn line_label(inst: &Instance, idx: usize) -> String {
    if idx < inst.vlines.len() {
        format!("v{idx}")
    } else {
        format!("h{}", idx - inst.vlines.len())
    }
}

fn labels(inst: &Instance, chosen: &[usize]) -> Vec<String> {
    chosen.iter().map(|&i| line_label(inst, i)).collect()
}

fn cmd_solve(path: &Path, exact_arith: bool, as_json: bool) -> Result<(), Failure> {
    let inst = load_instance(path)?;
    let lp = build_relaxation(&inst);
    let mode = if exact_arith {
        SolveMode::ExactRational
    } else {
        SolveMode::Float
    };
    let sol = solve(&lp, mode).map_err(|e| usage(format!("relaxation failed: {e}")))?;
    if as_json {
        let vars: Value = lp
            .names
            .iter()
            .zip(&sol.x)
            .map(|(name, value)| (name.clone(), rat_json(value)))
            .collect::<serde_json::Map<String, Value>>()
            .into();
        print_json(&json!({
            "arith": if exact_arith { "exact" } else { "float" },
            "objective": rat_json(&sol.objective),
            "status": sol.status.to_string(),
            "variables": vars,
        }));
    } else {
        println!("status: {}", sol.status);
        println!("objective: {}", show(&sol.objective));
        for (name, value) in lp.names.iter().zip(&sol.x) {
            println!("{name} = {}", show(value));
        }
    }
    if sol.status != LpStatus::Optimal {
        return Err(Failure::Check);
    }
    Ok(())
}

fn cmd_round(
    path: &Path,
    method: Method,
    mode: Mode,
    seed: u64,
    as_json: bool,
) -> Result<(), Failure> {
    let inst = load_instance(path)?;
    let lp = build_relaxation(&inst);
    let sol = solve(&lp, SolveMode::ExactRational)
        .map_err(|e| usage(format!("relaxation failed: {e}")))?;
    if sol.status != LpStatus::Optimal {
        return Err(usage(format!("relaxation is {}", sol.status)));
    }
    let rounded: RoundedSolution = match (method, mode) {
        (Method::Gaur, Mode::Random) => {
            return Err(usage(
                "half-split rounding is deterministic; drop `--mode random`",
            ))
        }
        (Method::Gaur, Mode::Derand) => gaur_round(&inst, &sol.x),
        (Method::Ks, Mode::Derand) => ks_round(&inst, &sol.x, KsMode::BestSuffix),
        (Method::Ks, Mode::Random) => ks_round(&inst, &sol.x, KsMode::Random { seed }),
        (Method::Segstab, Mode::Derand) => segstab_round(&inst, &sol.x, SegMode::Derandomized),
        (Method::Segstab, Mode::Random) => segstab_round(&inst, &sol.x, SegMode::Random { seed }),
        (Method::Unitsq, Mode::Derand) => unitsq_round(&inst, &sol.x, UnitSqMode::Derandomized),
        (Method::Unitsq, Mode::Random) => unitsq_round(&inst, &sol.x, UnitSqMode::Random { seed }),
    }
    .map_err(|e| usage(e.to_string()))?;
    let ratio = &rounded.weight / &sol.objective;
    let chosen = labels(&inst, &rounded.chosen);
    if as_json {
        print_json(&json!({
            "chosen": chosen,
            "objective": rat_json(&sol.objective),
            "ratio": rat_json(&ratio),
            "weight": rat_json(&rounded.weight),
        }));
    } else {
        println!("relaxation objective: {}", show(&sol.objective));
        println!("rounded weight: {}", show(&rounded.weight));
        println!("ratio: {}", show(&ratio));
        println!("chosen lines: {}", chosen.join(" "));
    }
    Ok(())
}

fn cmd_exact(path: &Path, cap: usize, as_json: bool) -> Result<(), Failure> {
    let inst = load_instance(path)?;
    let opt = brute_force_opt(&inst, cap).map_err(|e| usage(e.to_string()))?;
    let chosen = labels(&inst, &opt.chosen);
    if as_json {
        print_json(&json!({
            "chosen": chosen,
            "optimum": rat_json(&opt.weight),
        }));
    } else {
        println!("optimum: {}", show(&opt.weight));
        println!("chosen lines: {}", chosen.join(" "));
    }
    Ok(())
}

fn cmd_mu_bar(as_json: bool) -> Result<(), Failure> {
    let p = MuParams::standard();
    let (argmax, max) = mu_bar_max(&p, 1e-3);
    let plateau = mu_bar(&p.schedule.alpha, &p, MuBarMethod::ClosedForm);
    let at_beta = mu_bar(&p.schedule.beta, &p, MuBarMethod::ClosedForm);
    let at_cap = mu_bar(&p.gamma, &p, MuBarMethod::ClosedForm);
    if as_json {
        print_json(&json!({
            "argmax": f12(argmax),
            "at_conjugate_cap": f12(at_cap),
            "at_support_end": f12(at_beta),
            "max": f12(max),
            "plateau": f12(plateau),
        }));
    } else {
        println!("max: {} at z = {}", f12(max), f12(argmax));
        println!(
            "plateau (z <= {}): {}",
            format_rat(&p.schedule.alpha),
            f12(plateau)
        );
        println!(
            "at support end z = {}: {}",
            format_rat(&p.schedule.beta),
            f12(at_beta)
        );
        println!(
            "at conjugate cap z = {}: {}",
            format_rat(&p.gamma),
            f12(at_cap)
        );
    }
    Ok(())
}

fn cmd_limitation(grid: usize, as_json: bool) -> Result<(), Failure> {
    if !(10..=4000).contains(&grid) {
        return Err(usage("grid must be between 10 and 4000"));
    }
    let total = cumulative_f(&int(1));
    let (min, tx, ty) = limitation_grid_min(grid);
    if as_json {
        print_json(&json!({
            "density_integral": rat_json(&total),
            "grid": grid + 1,
            "min_gamma": f12(min),
            "at": [f12(tx), f12(ty)],
        }));
    } else {
        println!("density integral: {}", show(&total));
        println!("grid: {n} x {n} threshold pairs", n = grid + 1);
        println!("min gamma: {} at ({}, {})", f12(min), f12(tx), f12(ty));
    }
    Ok(())
}

fn cmd_recurrence(k: usize, as_json: bool) -> Result<(), Failure> {
    let table = recurrence_table(k).map_err(|e| usage(e.to_string()))?;
    let limit = gamma_star_limit().to_f64();
    if as_json {
        print_json(&json!({
            "alpha3": rat_json(&table.alpha3),
            "gamma_star": rat_json(&table.gamma_star),
            "k": k,
            "limit": f12(limit),
        }));
    } else {
        println!("gamma-star({k}) = {}", show(&table.gamma_star));
        println!("alpha3({k}) = {}", show(&table.alpha3));
        println!("limit as the window grows: (35 - sqrt(5))/20 = {}", f12(limit));
    }
    Ok(())
}

fn report_to_json(report: &CertificateReport) -> Value {
    serde_json::to_value(report).expect("report serialization cannot fail")
}

fn print_report(report: &CertificateReport) {
    println!("{}", report.title);
    for row in &report.rows {
        println!(
            "  [{}] {}: value {} vs bound {}",
            if row.pass { "ok" } else { "FAIL" },
            row.check,
            row.value,
            row.bound
        );
    }
    let good = report.rows.iter().filter(|r| r.pass).count();
    println!(
        "result: {} ({good}/{} checks)",
        if report.pass() { "PASS" } else { "FAIL" },
        report.rows.len()
    );
}

fn cmd_claims(as_json: bool) -> Result<(), Failure> {
    let reports = [window5_certificate(), window6_certificate()];
    let pass = reports.iter().all(CertificateReport::pass);
    if as_json {
        print_json(&json!({
            "pass": pass,
            "reports": reports.iter().map(report_to_json).collect::<Vec<_>>(),
        }));
    } else {
        for (i, report) in reports.iter().enumerate() {
            if i > 0 {
                println!();
            }
            print_report(report);
        }
    }
    if pass {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

/// Assemble the curve certificate: exact stationarity bracketing plus the
/// numeric bands the rounding guarantee rests on.
fn lemma2_report() -> CertificateReport {
    let p = MuParams::standard();
    let mut report = CertificateReport::new("averaged-cost curve certificate");

    let f_alpha = stationarity_factor(&p.schedule.alpha, &p);
    let f_beta = stationarity_factor(&p.schedule.beta, &p);
    report.rows.push(CheckRow {
        bound: "> 0".into(),
        check: "middle-branch derivative factor at the support start".into(),
        pass: f_alpha > Rat::from_integer(0.into()),
        value: format_decimal(&f_alpha, 12),
    });
    report.rows.push(CheckRow {
        bound: "< 0".into(),
        check: "middle-branch derivative factor at the support end".into(),
        pass: f_beta < Rat::from_integer(0.into()),
        value: format_decimal(&f_beta, 12),
    });

    let (argmax, max) = mu_bar_max(&p, 1e-3);
    report
        .rows
        .push(CheckRow::float_band("curve maximum", max, 1.9340, 1.9350));
    report.rows.push(CheckRow::float_le(
        "argmax distance from 0.414",
        (argmax - 0.414).abs(),
        2e-3,
    ));
    let plateau = mu_bar(&p.schedule.alpha, &p, MuBarMethod::ClosedForm);
    report.rows.push(CheckRow::float_band(
        "plateau value below the support",
        plateau,
        1.833,
        1.837,
    ));
    let at_beta = mu_bar(&p.schedule.beta, &p, MuBarMethod::ClosedForm);
    report.rows.push(CheckRow::float_band(
        "value at the support end",
        at_beta,
        1.925,
        1.929,
    ));
    let at_cap = mu_bar(&p.gamma, &p, MuBarMethod::ClosedForm);
    report.rows.push(CheckRow::float_le(
        "cap value distance from the reciprocal cap",
        (at_cap - 1.0 / rat_to_f64(&p.gamma)).abs(),
        1e-9,
    ));

    let worst = (0..=100i64)
        .map(|i| {
            let z = Rat::new(i.into(), 100.into());
            let c = mu_bar(&z, &p, MuBarMethod::ClosedForm);
            let q = mu_bar(&z, &p, MuBarMethod::Quadrature);
            (c - q).abs()
        })
        .fold(0.0, f64::max);
    report.rows.push(CheckRow::float_le(
        "closed form vs quadrature on a 101-point grid",
        worst,
        1e-8,
    ));
    report
}

fn cmd_lemma2(as_json: bool) -> Result<(), Failure> {
    let report = lemma2_report();
    if as_json {
        print_json(&json!({
            "pass": report.pass(),
            "report": report_to_json(&report),
        }));
    } else {
        print_report(&report);
    }
    if report.pass() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn cmd_certificate(report: CertificateReport, as_json: bool) -> Result<(), Failure> {
    if as_json {
        print_json(&json!({
            "pass": report.pass(),
            "report": report_to_json(&report),
        }));
    } else {
        print_report(&report);
    }
    if report.pass() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn cmd_three_halves(as_json: bool) -> Result<(), Failure> {
    let inst = gen_three_halves_lb();
    let lp = build_relaxation(&inst);
    let sol = solve(&lp, SolveMode::ExactRational)
        .map_err(|e| usage(format!("relaxation failed: {e}")))?;
    let opt = brute_force_opt(&inst, 24).map_err(|e| usage(e.to_string()))?;
    let rounded = unitsq_round(&inst, &sol.x, UnitSqMode::Derandomized)
        .map_err(|e| usage(e.to_string()))?;
    let ratio = &rounded.weight / &sol.objective;
    let pass = sol.status == LpStatus::Optimal
        && sol.objective == int(2)
        && opt.weight == int(3)
        && rounded.weight == int(3);
    if as_json {
        print_json(&json!({
            "lp": rat_json(&sol.objective),
            "opt": rat_json(&opt.weight),
            "pass": pass,
            "ratio": rat_json(&ratio),
            "rounded": rat_json(&rounded.weight),
        }));
    } else {
        println!(
            "LP={} OPT={}",
            format_rat(&sol.objective),
            format_rat(&opt.weight)
        );
        println!(
            "net rounding (derandomized): {} -> ratio {}",
            show(&rounded.weight),
            show(&ratio)
        );
        println!("result: {}", if pass { "PASS" } else { "FAIL" });
    }
    if pass {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn cmd_gen(
    kind: Kind,
    rects: usize,
    lines: usize,
    seed: u64,
    output: &Path,
    as_json: bool,
) -> Result<(), Failure> {
    if rects == 0 {
        return Err(usage("need at least one rectangle"));
    }
    if kind != Kind::UnitSqrStab {
        if !(1..=40).contains(&lines) {
            return Err(usage("line count must be in 1..=40"));
        }
        if kind == Kind::SegStab && lines < 2 {
            return Err(usage("mixed segments need lines of both orientations"));
        }
    }
    if rects > 40 {
        return Err(usage("rectangle count is capped at 40"));
    }
    let inst = gen_random(kind, rects, lines, seed);
    fs::write(output, inst.to_json_string())
        .map_err(|e| usage(format!("cannot write {}: {e}", output.display())))?;
    if as_json {
        print_json(&json!({
            "hlines": inst.hlines.len(),
            "kind": inst.kind.token(),
            "path": output.display().to_string(),
            "rects": inst.rects.len(),
            "vlines": inst.vlines.len(),
        }));
    } else {
        println!(
            "wrote {} instance: {} rects, {} vlines, {} hlines -> {}",
            inst.kind.token(),
            inst.rects.len(),
            inst.vlines.len(),
            inst.hlines.len(),
            output.display()
        );
    }
    Ok(())
}

fn cmd_gap(config_path: &Path, as_json: bool) -> Result<(), Failure> {
    let text = fs::read_to_string(config_path)
        .map_err(|e| usage(format!("cannot read {}: {e}", config_path.display())))?;
    let config: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| usage(format!("{}: {e}", config_path.display())))?;
    let report = run_gap_experiment(&config).map_err(|e| usage(e.to_string()))?;
    if as_json {
        let aggregate: Value = report
            .aggregate
            .iter()
            .map(|(name, stats)| {
                (
                    (*name).to_string(),
                    json!({
                        "max_ratio": rat_json(&stats.max_ratio),
                        "mean_ratio": rat_json(&stats.mean_ratio),
                        "rows": stats.rows,
                    }),
                )
            })
            .collect::<serde_json::Map<String, Value>>()
            .into();
        print_json(&json!({
            "aggregate": aggregate,
            "csv": config.csv_path,
            "json": config.json_path,
            "rows": report.rows.len(),
        }));
    } else {
        println!("rows: {}", report.rows.len());
        for (name, stats) in &report.aggregate {
            println!(
                "{name}: {} rows, max ratio {}, mean ratio {}",
                stats.rows,
                show(&stats.max_ratio),
                show(&stats.mean_ratio)
            );
        }
        if let Some(path) = &config.csv_path {
            println!("csv written: {path}");
        }
        if let Some(path) = &config.json_path {
            println!("json written: {path}");
        }
    }
    Ok(())
}
