//! Command-line front end.
//!
//! Each subcommand reads an optional TOML config, applies flag overrides,
//! validates, computes and writes its outputs atomically into `--out`.
//! Exit codes: 0 success, 1 configuration or input error, 2 non-convergence,
//! 3 failed identity checks.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::ansatz::{self, ModulationParams};
use crate::diagnostics::{self, IdentityReport, MultiplierReport};
use crate::error::Error;
use crate::grid::{ComplexField, Grid};
use crate::io;
use crate::kp::{self, KpOptions};
use crate::minimize::{
    self, CurveFamily, CurveResult, MinimizationProblem, ProblemKind, ProblemLabel, SolverOptions,
    WaveSolution,
};
use crate::physics::{self, Nonlinearity};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_CHECKS: i32 = 3;

/// Minimum modulus above which the Madelung checks are run on a wave.
const MADELUNG_MIN_MODULUS: f64 = 0.5;

// ---------------------------------------------------------------- config

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub nonlinearity: NonlinearitySection,
    pub grid: GridSection,
    pub problem: ProblemSection,
    pub solver: SolverSection,
    pub output: OutputSection,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NonlinearitySection {
    /// `gp`, `cubic_quintic` or `poly`.
    pub name: Option<String>,
    pub alpha5: Option<f64>,
    /// Coefficients of `F` as a polynomial in `s`, lowest degree first.
    pub coefficients: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
#[allow(non_snake_case)]
pub struct GridSection {
    pub L: Option<f64>,
    pub L1: Option<f64>,
    pub L2: Option<f64>,
    pub n: Option<usize>,
    pub n1: Option<usize>,
    pub n2: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProblemSection {
    /// `momentum`, `kinetic`, `sharp` or `bubble`.
    pub problem: Option<String>,
    pub q: Option<f64>,
    pub k: Option<f64>,
    pub qs: Option<Vec<f64>>,
    pub ks: Option<Vec<f64>>,
    pub gamma: Option<f64>,
    pub eps: Option<f64>,
    pub lambda: Option<f64>,
    pub sigma: Option<f64>,
    pub levels: Option<usize>,
    /// `ansatz` or `file:PATH`.
    pub seed: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub tol: Option<f64>,
    pub constraint_tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub initial_step: Option<f64>,
    pub backtrack: Option<f64>,
    pub growth: Option<f64>,
    pub armijo: Option<f64>,
    pub shift: Option<f64>,
    pub min_step: Option<f64>,
    pub warm_start: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, Error> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn nonlinearity(&self) -> Result<Nonlinearity, Error> {
        let s = &self.nonlinearity;
        match s.name.as_deref().unwrap_or("gp") {
            "gp" => Ok(Nonlinearity::GrossPitaevskii),
            "cubic_quintic" => {
                let a5 = s
                    .alpha5
                    .ok_or_else(|| Error::Config("alpha5 is required for cubic_quintic".into()))?;
                Nonlinearity::cubic_quintic(a5)
            }
            "poly" => {
                let c = s
                    .coefficients
                    .clone()
                    .ok_or_else(|| Error::Config("coefficients are required for poly".into()))?;
                Nonlinearity::polynomial(c)
            }
            other => Err(Error::Config(format!("unknown nonlinearity {other:?}"))),
        }
    }

    /// Grid with the given defaults for the half-length and point count.
    pub fn grid(&self, default_l: f64, default_n: usize) -> Result<Grid, Error> {
        let g = &self.grid;
        let l = g.L.unwrap_or(default_l);
        let n = g.n.unwrap_or(default_n);
        Grid::new(
            g.L1.unwrap_or(l),
            g.L2.unwrap_or(l),
            g.n1.unwrap_or(n),
            g.n2.unwrap_or(n),
        )
    }

    pub fn solver_options(&self) -> Result<SolverOptions, Error> {
        let s = &self.solver;
        let d = SolverOptions::default();
        let o = SolverOptions {
            tol: s.tol.unwrap_or(d.tol),
            constraint_tol: s.constraint_tol.unwrap_or(d.constraint_tol),
            max_iter: s.max_iter.unwrap_or(d.max_iter),
            initial_step: s.initial_step.unwrap_or(d.initial_step),
            backtrack: s.backtrack.unwrap_or(d.backtrack),
            growth: s.growth.unwrap_or(d.growth),
            armijo: s.armijo.unwrap_or(d.armijo),
            shift: s.shift.unwrap_or(d.shift),
            min_step: s.min_step.unwrap_or(d.min_step),
        };
        o.validate()?;
        Ok(o)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.output.dir.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    fn seed(&self, grid: &Grid) -> Result<Option<ComplexField>, Error> {
        match self.problem.seed.as_deref() {
            None | Some("ansatz") => Ok(None),
            Some(s) => match s.strip_prefix("file:") {
                Some(path) => {
                    let f = io::read_complex(path)?;
                    if f.grid() != grid {
                        return Err(Error::Config(format!("seed {path} does not match the grid")));
                    }
                    Ok(Some(f))
                }
                None => Err(Error::Config(format!("seed must be `ansatz` or `file:PATH`, got {s:?}"))),
            },
        }
    }
}

// ---------------------------------------------------------------- flags

#[derive(Parser, Debug)]
#[command(name = "nlstw", version, about = "Traveling waves of defocusing NLS equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve one constrained minimization problem.
    Solve(SolveArgs),
    /// Trace an energy-momentum or kinetic curve.
    Curve(CurveArgs),
    /// Compute a KP-I lump.
    Kp(KpArgs),
    /// Run the identity checks on a stored field.
    Diagnose(DiagnoseArgs),
    /// Build a comparison field and its expansion table.
    Ansatz(AnsatzArgs),
}

#[derive(Args, Debug, Default)]
pub struct CommonArgs {
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub nl: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha5: Option<f64>,
    #[arg(long = "L", allow_negative_numbers = true)]
    pub l: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProblemArg {
    Momentum,
    Kinetic,
    Sharp,
    Bubble,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub problem: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub q: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// `ansatz` or `file:PATH`.
    #[arg(long)]
    pub seed: Option<String>,
}

#[derive(Args, Debug)]
pub struct CurveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub problem: Option<String>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub qs: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub ks: Option<Vec<f64>>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long = "no-warm-start")]
    pub no_warm_start: bool,
}

#[derive(Args, Debug)]
pub struct KpArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
}

#[derive(Args, Debug)]
pub struct DiagnoseArgs {
    /// NLSTW1 file holding a complex field.
    pub field: PathBuf,
    /// Speed; extracted from the field when absent.
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AnsatzKind {
    Modulation,
    Transonic,
}

#[derive(Args, Debug)]
pub struct AnsatzArgs {
    pub kind: AnsatzKind,
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    /// Number of rungs of the halving `eps` ladder.
    #[arg(long)]
    pub levels: Option<usize>,
}

fn base_config(common: &CommonArgs) -> Result<RunConfig, Error> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(v) = &common.nl {
        cfg.nonlinearity.name = Some(v.clone());
    }
    if let Some(v) = common.alpha5 {
        cfg.nonlinearity.alpha5 = Some(v);
    }
    if let Some(v) = common.l {
        cfg.grid.L = Some(v);
        cfg.grid.L1 = None;
        cfg.grid.L2 = None;
    }
    if let Some(v) = common.n {
        cfg.grid.n = Some(v);
        cfg.grid.n1 = None;
        cfg.grid.n2 = None;
    }
    if let Some(v) = common.tol {
        cfg.solver.tol = Some(v);
    }
    if let Some(v) = common.max_iter {
        cfg.solver.max_iter = Some(v);
    }
    if let Some(v) = &common.out {
        cfg.output.dir = Some(v.clone());
    }
    Ok(cfg)
}

// ---------------------------------------------------------------- outcome

/// Error or result of a command, mapped onto the exit codes.
#[derive(Debug)]
enum Failure {
    Config(String),
    NotConverged(String),
    Checks(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotConverged { .. }
            | Error::PotentialBarrierStuck { .. }
            | Error::MultiplierNonnegative { .. }
            | Error::IterationDiverged(_) => Failure::NotConverged(e.to_string()),
            Error::InvalidParameter(m) | Error::Config(m) => Failure::Config(m),
            other => Failure::Config(other.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(&a),
        Command::Curve(a) => cmd_curve(&a),
        Command::Kp(a) => cmd_kp(&a),
        Command::Diagnose(a) => cmd_diagnose(&a),
        Command::Ansatz(a) => cmd_ansatz(&a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Config(m)) => {
            eprintln!("{m}");
            EXIT_CONFIG
        }
        Err(Failure::NotConverged(m)) => {
            eprintln!("not converged: {m}");
            EXIT_NOT_CONVERGED
        }
        Err(Failure::Checks(m)) => {
            eprintln!("checks failed: {m}");
            EXIT_CHECKS
        }
    }
}

// ---------------------------------------------------------------- reports

/// One line of `diag.jsonl` / `checks.jsonl`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckLine {
    #[serde(flatten)]
    pub report: IdentityReport,
    pub mandatory: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<MultiplierReport>,
}

impl CheckLine {
    fn mandatory(report: IdentityReport) -> Self {
        CheckLine {
            report,
            mandatory: true,
            detail: None,
        }
    }
}

/// Identity checks on a traveling wave of speed `c` (or a bubble).
pub fn wave_checks(psi: &ComplexField, nl: &Nonlinearity, c: f64, label: ProblemLabel) -> Vec<CheckLine> {
    let [scaling, planar] = diagnostics::pohozaev(psi, nl, c, 2);
    let mut out = vec![CheckLine::mandatory(planar)];
    if label == ProblemLabel::Bubble {
        let k = physics::kinetic(psi);
        out.push(CheckLine::mandatory(IdentityReport::bound(
            "bubble_constraint",
            physics::potential_integral(psi, nl).abs(),
            0.0,
            1e-6,
            k,
        )));
        return out;
    }
    out.insert(0, CheckLine::mandatory(scaling));
    out.push(CheckLine::mandatory(diagnostics::pc_identity(psi, nl, c)));
    if psi.min_modulus() > MADELUNG_MIN_MODULUS {
        if let Ok(m) = diagnostics::madelung_identities(psi, nl, c) {
            out.extend(m.into_iter().map(CheckLine::mandatory));
        }
        if let Ok(m) = diagnostics::multiplier_relation(psi, nl, c) {
            out.push(CheckLine {
                report: m.to_identity(),
                mandatory: true,
                detail: Some(m),
            });
        }
    }
    out
}

fn failed_names(lines: &[CheckLine]) -> Option<String> {
    let bad: Vec<&str> = lines
        .iter()
        .filter(|l| l.mandatory && !l.report.pass)
        .map(|l| l.report.name.as_str())
        .collect();
    if bad.is_empty() {
        None
    } else {
        Some(bad.join(", "))
    }
}

fn print_table(lines: &[CheckLine]) {
    println!("{:<22} {:>14} {:>14} {:>10}  result", "check", "lhs", "rhs", "rel");
    for l in lines {
        let r = &l.report;
        println!(
            "{:<22} {:>14.6e} {:>14.6e} {:>10.2e}  {}{}",
            r.name,
            r.lhs,
            r.rhs,
            r.rel,
            if r.pass { "PASS" } else { "FAIL" },
            if l.mandatory { "" } else { " (info)" }
        );
    }
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<(), Error> {
    std::fs::create_dir_all(dir)?;
    io::write_atomic(dir.join(name), text.as_bytes())
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), Error> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_text(dir, name, &s)
}

fn write_wave(dir: &Path, wave: &WaveSolution, lines: &[CheckLine]) -> Result<(), Error> {
    std::fs::create_dir_all(dir)?;
    io::write_complex(dir.join("wave.nlstw1"), &wave.psi)?;
    write_json(dir, "wave.json", &wave.sidecar())?;
    write_text(dir, "diag.jsonl", &diagnostics::to_json_lines(lines))
}

fn checks_outcome(lines: &[CheckLine]) -> CmdResult {
    match failed_names(lines) {
        Some(names) => Err(Failure::Checks(names)),
        None => Ok(()),
    }
}

// ---------------------------------------------------------------- solve

fn parse_problem(s: Option<&str>) -> Result<ProblemArg, Failure> {
    match s.unwrap_or("momentum") {
        "momentum" => Ok(ProblemArg::Momentum),
        "kinetic" => Ok(ProblemArg::Kinetic),
        "sharp" => Ok(ProblemArg::Sharp),
        "bubble" => Ok(ProblemArg::Bubble),
        other => Err(Failure::Config(format!("unknown problem {other:?}"))),
    }
}

fn require_positive(name: &str, v: Option<f64>) -> Result<f64, Failure> {
    match v {
        None => Err(Failure::Config(format!("{name} is required"))),
        Some(v) if v > 0.0 && v.is_finite() => Ok(v),
        Some(_) => Err(Failure::Config(format!("{name} must be positive"))),
    }
}

fn sign_check(nl: &Nonlinearity, problem: ProblemArg) -> CmdResult {
    if problem == ProblemArg::Momentum && nl.has_negative_potential() {
        return Err(Failure::Config("V changes sign; use problem=sharp".into()));
    }
    Ok(())
}

fn cmd_solve(args: &SolveArgs) -> CmdResult {
    let mut cfg = base_config(&args.common)?;
    if let Some(p) = &args.problem {
        cfg.problem.problem = Some(p.clone());
    }
    if args.q.is_some() {
        cfg.problem.q = args.q;
    }
    if args.k.is_some() {
        cfg.problem.k = args.k;
    }
    if let Some(s) = &args.seed {
        cfg.problem.seed = Some(s.clone());
    }
    let problem = parse_problem(cfg.problem.problem.as_deref())?;
    let nl = cfg.nonlinearity()?;
    let kind = match problem {
        ProblemArg::Momentum => ProblemKind::FixedMomentum {
            q: require_positive("q", cfg.problem.q)?,
        },
        ProblemArg::Sharp => ProblemKind::SharpLocal {
            q: require_positive("q", cfg.problem.q)?,
        },
        ProblemArg::Kinetic => ProblemKind::FixedKinetic {
            k: require_positive("k", cfg.problem.k)?,
            k_infinity: None,
        },
        ProblemArg::Bubble => ProblemKind::StationaryBubble,
    };
    sign_check(&nl, problem)?;
    let grid = cfg.grid(64.0, 256)?;
    let options = cfg.solver_options()?;
    let seed = cfg.seed(&grid)?;
    let dir = cfg.out_dir();
    let pb = MinimizationProblem {
        kind,
        grid,
        options,
        seed,
    };
    let (wave, converged) = match minimize::solve(&pb, &nl) {
        Ok(w) => (w, true),
        Err(Error::NotConverged { best, .. }) | Err(Error::MultiplierNonnegative { best, .. }) => (*best, false),
        Err(e) => return Err(e.into()),
    };
    let lines = wave_checks(&wave.psi, &nl, wave.speed, wave.problem);
    write_wave(&dir, &wave, &lines)?;
    print_table(&lines);
    println!(
        "c = {:.10}  E = {:.10}  Q = {:.10}  iterations = {}",
        wave.speed, wave.diagnostics.energy, wave.diagnostics.momentum, wave.diagnostics.iterations
    );
    if !converged {
        return Err(Failure::NotConverged(format!(
            "residual {:.3e} after {} iterations",
            wave.diagnostics.flow_residual, wave.diagnostics.iterations
        )));
    }
    checks_outcome(&lines)
}

// ---------------------------------------------------------------- curve

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveSummary {
    pub family: CurveFamily,
    pub abscissae: Vec<f64>,
    pub values: Vec<f64>,
    pub speeds: Vec<f64>,
    pub converged: Vec<bool>,
    /// `q0` or `k0` marker.
    pub threshold: Option<f64>,
    pub k_infinity: Option<f64>,
}

impl From<&CurveResult> for CurveSummary {
    fn from(c: &CurveResult) -> Self {
        CurveSummary {
            family: c.family,
            abscissae: c.abscissae.clone(),
            values: c.values.clone(),
            speeds: c.speeds.clone(),
            converged: c.converged.clone(),
            threshold: c.threshold,
            k_infinity: c.k_infinity,
        }
    }
}

/// `abscissa,value,speed,converged` with LF line endings.
pub fn curve_csv(c: &CurveResult) -> String {
    let mut s = String::from("abscissa,value,speed,converged\n");
    for i in 0..c.abscissae.len() {
        let _ = writeln!(s, "{},{},{},{}", c.abscissae[i], c.values[i], c.speeds[i], c.converged[i]);
    }
    s
}

fn cmd_curve(args: &CurveArgs) -> CmdResult {
    let mut cfg = base_config(&args.common)?;
    if let Some(p) = &args.problem {
        cfg.problem.problem = Some(p.clone());
    }
    if args.qs.is_some() {
        cfg.problem.qs = args.qs.clone();
    }
    if args.ks.is_some() {
        cfg.problem.ks = args.ks.clone();
    }
    if let Some(s) = &args.seed {
        cfg.problem.seed = Some(s.clone());
    }
    if args.no_warm_start {
        cfg.solver.warm_start = Some(false);
    }
    let problem = parse_problem(cfg.problem.problem.as_deref())?;
    let nl = cfg.nonlinearity()?;
    let (family, xs) = match problem {
        ProblemArg::Momentum => (CurveFamily::Momentum, cfg.problem.qs.clone()),
        ProblemArg::Sharp => (CurveFamily::Sharp, cfg.problem.qs.clone()),
        ProblemArg::Kinetic => (CurveFamily::Kinetic, cfg.problem.ks.clone()),
        ProblemArg::Bubble => return Err(Failure::Config("bubble has no curve".into())),
    };
    let name = if family == CurveFamily::Kinetic { "ks" } else { "qs" };
    let xs = xs.unwrap_or_default();
    if xs.is_empty() {
        return Err(Failure::Config(format!("{name} is empty")));
    }
    if xs.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        let single = if family == CurveFamily::Kinetic { "k" } else { "q" };
        return Err(Failure::Config(format!("{single} must be positive")));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Failure::Config(format!("{name} must be strictly increasing")));
    }
    sign_check(&nl, problem)?;
    let grid = cfg.grid(64.0, 256)?;
    let options = cfg.solver_options()?;
    let seed = cfg.seed(&grid)?;
    let dir = cfg.out_dir();
    let warm = cfg.solver.warm_start.unwrap_or(true);

    let mut k_infinity = None;
    if family == CurveFamily::Kinetic && nl.has_negative_potential() {
        let bubble = MinimizationProblem::new(ProblemKind::StationaryBubble, grid.clone())
            .with_options(options.clone());
        let (_, t) = minimize::minimize_bubble(&bubble, &nl).map_err(Failure::from)?;
        if let Some(&x) = xs.iter().find(|&&x| x >= 0.95 * t) {
            return Err(Failure::Config(format!(
                "k = {x} is not below 0.95 k_infinity = {}",
                0.95 * t
            )));
        }
        k_infinity = Some(t);
    }
    let kind = match family {
        CurveFamily::Kinetic => ProblemKind::FixedKinetic {
            k: xs[0],
            k_infinity,
        },
        CurveFamily::Sharp => ProblemKind::SharpLocal { q: xs[0] },
        CurveFamily::Momentum => ProblemKind::FixedMomentum { q: xs[0] },
    };
    let template = MinimizationProblem {
        kind,
        grid,
        options,
        seed,
    };
    let curve = minimize::trace_curve(family, &xs, &nl, &template, warm)?;
    let lines: Vec<CheckLine> = diagnostics::curve_checks(&curve, &nl)
        .into_iter()
        .map(CheckLine::mandatory)
        .collect();
    write_text(&dir, "curve.csv", &curve_csv(&curve))?;
    write_text(&dir, "checks.jsonl", &diagnostics::to_json_lines(&lines))?;
    write_json(&dir, "curve.json", &CurveSummary::from(&curve))?;
    print!("{}", curve_csv(&curve));
    print_table(&lines);
    if let Some(i) = curve.converged.iter().position(|c| !c) {
        return Err(Failure::NotConverged(format!(
            "point {} = {} did not converge",
            i, curve.abscissae[i]
        )));
    }
    checks_outcome(&lines)
}

// ---------------------------------------------------------------- kp

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LumpSummary {
    pub gamma: f64,
    #[serde(rename = "S")]
    pub action: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    /// Largest of `r1, r2, r3`.
    pub residual: f64,
    pub y_norm2: f64,
    pub integrals: kp::KpIntegrals,
    pub grid_integrals: kp::KpIntegrals,
    pub action_relations: [f64; 4],
    pub equation_residual: f64,
    pub iterations: usize,
}

/// Identity and action-ratio checks of a lump at tolerance `1e-4`.
pub fn lump_checks(lump: &kp::KpGroundState) -> Vec<CheckLine> {
    let tol = 1e-4;
    let mut out = Vec::new();
    for (i, r) in lump.residuals.iter().enumerate() {
        out.push(CheckLine::mandatory(IdentityReport::bound(
            format!("kp_identity_{}", i + 1),
            r.abs(),
            0.0,
            tol,
            1.0,
        )));
    }
    let rel = lump.integrals.action_relations(lump.gamma);
    let names = ["kp_action_y", "kp_action_l2", "kp_action_x", "kp_action_cubic"];
    for (n, r) in names.iter().zip(rel) {
        out.push(CheckLine::mandatory(IdentityReport::bound(*n, r.abs(), 0.0, tol, 1.0)));
    }
    out.push(CheckLine::mandatory(IdentityReport::bound(
        "kp_action_positive",
        -lump.action,
        0.0,
        0.0,
        0.0,
    )));
    out
}

fn cmd_kp(args: &KpArgs) -> CmdResult {
    let mut cfg = base_config(&args.common)?;
    if args.gamma.is_some() {
        cfg.problem.gamma = args.gamma;
    }
    let gamma = cfg.problem.gamma.unwrap_or(6.0);
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Failure::Config("gamma must be positive".into()));
    }
    let g = &cfg.grid;
    let l = g.L.unwrap_or(32.0);
    let n = g.n.unwrap_or(256);
    let grid = Grid::new(
        g.L1.unwrap_or(l),
        g.L2.unwrap_or(std::f64::consts::SQRT_2 * l),
        g.n1.unwrap_or(n),
        g.n2.unwrap_or(n),
    )?;
    let d = KpOptions::default();
    let opts = KpOptions {
        tol: cfg.solver.tol.unwrap_or(d.tol),
        max_iter: cfg.solver.max_iter.unwrap_or(d.max_iter),
        ..d
    };
    let dir = cfg.out_dir();
    let lump = kp::solve_kp_ground_state(gamma, &grid, &opts)?;
    let lines = lump_checks(&lump);
    std::fs::create_dir_all(&dir).map_err(Error::from)?;
    io::write_real(dir.join("lump.nlstw1"), &lump.w)?;
    write_json(
        &dir,
        "lump.json",
        &LumpSummary {
            gamma,
            action: lump.action,
            y_norm2: lump.y_norm2,
            integrals: lump.integrals,
            grid_integrals: lump.grid_integrals,
            r1: lump.residuals[0],
            r2: lump.residuals[1],
            r3: lump.residuals[2],
            residual: lump.max_residual(),
            action_relations: lump.integrals.action_relations(gamma),
            equation_residual: lump.equation_residual,
            iterations: lump.iterations,
        },
    )?;
    write_text(&dir, "diag.jsonl", &diagnostics::to_json_lines(&lines))?;
    print_table(&lines);
    println!("S = {:.10}  iterations = {}", lump.action, lump.iterations);
    checks_outcome(&lines)
}

// ---------------------------------------------------------------- diagnose

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldSummary {
    pub c: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    pub kinetic: f64,
    pub potential: f64,
    #[serde(rename = "EGL")]
    pub egl: f64,
    pub pohozaev_residual: f64,
    pub tw_residual: f64,
}

pub fn field_summary(psi: &ComplexField, nl: &Nonlinearity, c: f64) -> FieldSummary {
    let f = physics::Functionals::evaluate(psi, nl);
    let pc = f.energy() - c * f.momentum - 2.0 * f.kinetic_x2;
    FieldSummary {
        c,
        e: f.energy(),
        q: f.momentum,
        kinetic: f.kinetic(),
        potential: f.potential,
        egl: physics::gl_energy(psi),
        pohozaev_residual: pc.abs() / f.energy().abs().max(f64::MIN_POSITIVE),
        tw_residual: physics::relative_tw_residual(psi, nl, c),
    }
}

fn cmd_diagnose(args: &DiagnoseArgs) -> CmdResult {
    let cfg = base_config(&args.common)?;
    let nl = cfg.nonlinearity()?;
    let psi = io::read_complex(&args.field)?;
    let c = match args.c {
        Some(c) if c.is_finite() => c,
        Some(_) => return Err(Failure::Config("c must be finite".into())),
        None => physics::extract_speed(&psi, &nl)?,
    };
    let dir = cfg.out_dir();
    let lines = wave_checks(&psi, &nl, c, ProblemLabel::Momentum);
    write_text(&dir, "diag.jsonl", &diagnostics::to_json_lines(&lines))?;
    write_json(&dir, "diagnose.json", &field_summary(&psi, &nl, c))?;
    print_table(&lines);
    checks_outcome(&lines)
}

// ---------------------------------------------------------------- ansatz

pub fn expansion_csv(rows: &[ansatz::ExpansionRow]) -> String {
    let mut s = String::from("eps,energy,momentum,gl_energy,excess,predicted_excess,predicted_momentum\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.eps, r.energy, r.momentum, r.gl_energy, r.excess, r.predicted_excess, r.predicted_momentum
        );
    }
    s
}

/// Coefficient checks of a transonic ladder: `10%` on the fitted
/// coefficients and a remainder order of at least `4.5`.
pub fn expansion_checks(fit: &ansatz::ExpansionFit) -> Vec<CheckLine> {
    let tol = 0.1;
    vec![
        CheckLine::mandatory(IdentityReport::equality("cubic_coefficient", fit.cubic, fit.predicted_cubic, tol)),
        CheckLine::mandatory(IdentityReport::bound("remainder_order", 4.5, fit.remainder_order, 0.0, 0.0)),
        CheckLine::mandatory(IdentityReport::equality(
            "momentum_linear",
            fit.momentum_linear,
            fit.predicted_momentum_linear,
            tol,
        )),
        CheckLine::mandatory(IdentityReport::equality(
            "momentum_cubic",
            fit.momentum_cubic,
            fit.predicted_momentum_cubic,
            tol,
        )),
    ]
}

fn cmd_ansatz(args: &AnsatzArgs) -> CmdResult {
    let mut cfg = base_config(&args.common)?;
    for (slot, v) in [
        (&mut cfg.problem.eps, args.eps),
        (&mut cfg.problem.gamma, args.gamma),
        (&mut cfg.problem.lambda, args.lambda),
        (&mut cfg.problem.sigma, args.sigma),
    ] {
        if v.is_some() {
            *slot = v;
        }
    }
    if args.levels.is_some() {
        cfg.problem.levels = args.levels;
    }
    let nl = cfg.nonlinearity()?;
    let dir = cfg.out_dir();
    let eps = require_positive("eps", cfg.problem.eps.or(Some(0.1)))?;
    match args.kind {
        AnsatzKind::Modulation => {
            let grid = cfg.grid(64.0, 256)?;
            let lambda = cfg.problem.lambda.unwrap_or(grid.l1() / 4.0);
            let sigma = cfg.problem.sigma.unwrap_or((grid.l2() / 2.0).max(lambda));
            let p = ModulationParams::bump_on(&grid, eps, lambda, sigma)?;
            let psi = ansatz::modulation_ansatz(&p)?;
            let lines = ansatz::modulation_asymptotics(&p, &nl)?;
            let mut csv = String::from("name,computed,predicted,relative_error\n");
            for l in &lines {
                let _ = writeln!(csv, "{},{},{},{}", l.name, l.computed, l.predicted, l.relative_error());
            }
            std::fs::create_dir_all(&dir).map_err(Error::from)?;
            io::write_complex(dir.join("ansatz.nlstw1"), &psi)?;
            write_text(&dir, "expansion.csv", &csv)?;
            print!("{csv}");
            Ok(())
        }
        AnsatzKind::Transonic => {
            let gamma = cfg.problem.gamma.unwrap_or(6.0 - 2.0 * nl.f_second_at_one());
            if !(gamma > 0.0 && gamma.is_finite()) {
                return Err(Failure::Config("gamma must be positive".into()));
            }
            let levels = cfg.problem.levels.unwrap_or(3);
            if levels < 3 {
                return Err(Failure::Config("levels must be at least 3".into()));
            }
            let g = &cfg.grid;
            let l = g.L.unwrap_or(32.0);
            let n = g.n.unwrap_or(256);
            let grid = Grid::new(
                g.L1.unwrap_or(l),
                g.L2.unwrap_or(std::f64::consts::SQRT_2 * l),
                g.n1.unwrap_or(n),
                g.n2.unwrap_or(n),
            )?;
            let lump = kp::solve_kp_ground_state(gamma, &grid, &KpOptions::default())?;
            let ladder: Vec<f64> = (0..levels).map(|i| eps / f64::powi(2.0, i as i32)).collect();
            let rows = ansatz::transonic_expansion(&lump.w, gamma, lump.action, &nl, &ladder)?;
            let fit = ansatz::fit_expansion(&rows, &nl, lump.action, gamma)?;
            let u = ansatz::transonic_ansatz(
                &ansatz::TransonicParams {
                    w: lump.w.clone(),
                    gamma,
                    eps,
                },
                &nl,
            )?;
            let lines = expansion_checks(&fit);
            std::fs::create_dir_all(&dir).map_err(Error::from)?;
            io::write_complex(dir.join("ansatz.nlstw1"), &u)?;
            write_text(&dir, "expansion.csv", &expansion_csv(&rows))?;
            write_json(&dir, "expansion.json", &fit)?;
            write_text(&dir, "checks.jsonl", &diagnostics::to_json_lines(&lines))?;
            print!("{}", expansion_csv(&rows));
            print_table(&lines);
            checks_outcome(&lines)
        }
    }
}
