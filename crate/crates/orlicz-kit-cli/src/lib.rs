//! `orlicz-kit` subcommands. Each command writes CSV data and JSON metadata into the
//! output directory and prints a short summary; all files are written after the
//! computation finishes, so a failed run leaves no partial output.

pub mod config;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use orlicz_kit::criteria::{self, ConditionReport, CriteriaError};
use orlicz_kit::ext::fmt_f64;
use orlicz_kit::fields_norms::{ball_norm, global_norm, SampledField};
use orlicz_kit::io::{read_field, write_field, write_rows};
use orlicz_kit::operators::{frac_integral, frac_maximal, hl_maximal, OperatorError};
use orlicz_kit::verify_harness::{run_suite, HarnessError};
use orlicz_kit::weights_kernels::{KernelFunction, WeightFunction};
use orlicz_kit::young_calc::YoungFunction;
use serde::Serialize;

use config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_UNKNOWN: i32 = 4;
pub const EXIT_SUITE: i32 = 5;

/// Environment variable capping the worker threads.
pub const THREADS_VAR: &str = "ORLICZ_KIT_THREADS";

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Precondition(String),
    #[error("unknown identifier: {0}")]
    Unknown(String),
    #[error("{0} of {1} statements failed")]
    SuiteFailed(usize, usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Precondition(_) => EXIT_PRECONDITION,
            CliError::Unknown(_) => EXIT_UNKNOWN,
            CliError::SuiteFailed(..) => EXIT_SUITE,
        }
    }
}

impl From<OperatorError> for CliError {
    fn from(e: OperatorError) -> Self {
        match e {
            OperatorError::Field(f) => CliError::Input(f.to_string()),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

impl From<CriteriaError> for CliError {
    fn from(e: CriteriaError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::UnknownStatement(id) => CliError::Unknown(format!("statement '{id}'")),
            HarnessError::Config(m) => CliError::Input(m),
            HarnessError::Field(f) => CliError::Input(f.to_string()),
            HarnessError::Operator(o) => o.into(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "orlicz-kit", version, about = "Orlicz-Morrey norms, maximal and fractional operators, condition checks")]
pub struct Cli {
    /// TOML run configuration; defaults apply for absent sections.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `[run] out`; default `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OperatorKind {
    /// Hardy-Littlewood maximal operator `M`.
    M,
    /// Generalized fractional integral `I_ρ`.
    IRho,
    /// Generalized fractional maximal operator `M_ρ`.
    MRho,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Global and per-ball Orlicz-Morrey norms of a field (`[young.Phi]`, `[weight.phi]`).
    Norm {
        /// Field CSV.
        field: PathBuf,
        /// Weak norm instead of the Luxemburg norm.
        #[arg(long)]
        weak: bool,
    },
    /// Apply an operator to a field (`[kernel.rho]` for the fractional ones).
    Apply {
        field: PathBuf,
        #[arg(long, value_enum)]
        op: OperatorKind,
    },
    /// Evaluate a condition: Ir_A, Ir_A_prime, Mr_A or weight_integral.
    Check { condition: String },
    /// Run the verification suite, optionally restricted to one statement id or prefix.
    Verify {
        #[arg(long)]
        filter: Option<String>,
    },
}

/// Parses `ORLICZ_KIT_THREADS` and caps the pool.
pub fn configure_threads(value: Option<&str>) -> Result<(), CliError> {
    if let Some(v) = value {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Input(format!("{THREADS_VAR} must be a positive integer, got '{v}'")))?;
        orlicz_kit::par::configure_threads(n);
    }
    Ok(())
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = RunConfig::load(cli.config.as_deref())?;
    let out = cli.out.clone().or_else(|| cfg.run.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let outputs = match &cli.command {
        Command::Norm { field, weak } => cmd_norm(&cfg, &load_field(field)?, *weak)?,
        Command::Apply { field, op } => cmd_apply(&cfg, &load_field(field)?, *op)?,
        Command::Check { condition } => cmd_check(&cfg, condition)?,
        Command::Verify { filter } => cmd_verify(&cfg, filter.as_deref())?,
    };
    std::fs::create_dir_all(&out).map_err(|e| CliError::Input(format!("cannot create {}: {e}", out.display())))?;
    for (name, bytes) in &outputs.files {
        let path = out.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    write!(stdout, "{}", outputs.summary).map_err(|e| CliError::Input(e.to_string()))?;
    match outputs.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Files to write (name, bytes), the stdout summary, and a failure to report after writing.
pub struct Outputs {
    pub files: Vec<(String, Vec<u8>)>,
    pub summary: String,
    pub failure: Option<CliError>,
}

fn load_field(path: &Path) -> Result<SampledField, CliError> {
    let f = File::open(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    read_field(std::io::BufReader::new(f)).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn json<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("reports serialize");
    s.push(b'\n');
    s
}

fn csv_bytes<const N: usize>(header: [&str; N], rows: &[[String; N]]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_rows(header, rows, BufWriter::new(&mut buf)).expect("in-memory write");
    buf
}

fn default_phi() -> YoungFunction {
    YoungFunction::Power { p: 2.0 }
}

fn default_psi() -> YoungFunction {
    YoungFunction::Power { p: 4.0 }
}

fn default_weight() -> WeightFunction {
    WeightFunction::Power { lambda: -1.0 }
}

fn default_kernel() -> KernelFunction {
    KernelFunction::power(0.25)
}

#[derive(Serialize)]
struct NormMeta {
    phi: String,
    weight: String,
    weak: bool,
    #[serde(serialize_with = "orlicz_kit::ext::serialize_f64")]
    value: f64,
    argmax: Option<orlicz_kit::fields_norms::Ball>,
    balls: usize,
    skipped: usize,
    radii: Vec<f64>,
}

pub fn cmd_norm(cfg: &RunConfig, f: &SampledField, weak: bool) -> Result<Outputs, CliError> {
    let phi = cfg.young("Phi", default_phi())?;
    let w = cfg.weight("phi", default_weight())?;
    let family = cfg.norm_family(&f.grid)?;
    let g = global_norm(f, &phi, &w, &family, weak);
    let per_ball = orlicz_kit::par::map_range(family.len(), |k| {
        let b = family.ball(k);
        let c = b.center_coords(&f.grid);
        [fmt_f64(c[0]), fmt_f64(c[1]), fmt_f64(b.radius), fmt_f64(ball_norm(f, &phi, &w, &b, weak))]
    });
    let meta = NormMeta {
        phi: phi.label(),
        weight: w.label(),
        weak,
        value: g.value,
        argmax: g.argmax,
        balls: g.balls,
        skipped: g.skipped,
        radii: family.radii.clone(),
    };
    let kind = if weak { "weak" } else { "strong" };
    let summary = format!("global {kind} norm: {} over {} balls\n", fmt_f64(g.value), g.balls);
    Ok(Outputs {
        files: vec![
            ("norm.json".into(), json(&meta)),
            ("per_ball.csv".into(), csv_bytes(["center_x", "center_y", "radius", "norm"], &per_ball)),
        ],
        summary,
        failure: None,
    })
}

pub fn cmd_apply(cfg: &RunConfig, f: &SampledField, op: OperatorKind) -> Result<Outputs, CliError> {
    let res = match op {
        OperatorKind::M => hl_maximal(f, &cfg.operator_family(&f.grid)?)?,
        OperatorKind::IRho => frac_integral(f, &cfg.kernel("rho", default_kernel())?)?,
        OperatorKind::MRho => frac_maximal(f, &cfg.kernel("rho", default_kernel())?, &cfg.operator_family(&f.grid)?)?,
    };
    let mut field = Vec::new();
    write_field(&res.field, &mut field).map_err(|e| CliError::Input(e.to_string()))?;
    let summary = format!("{}: sup {} on {} points\n", res.meta.operator, fmt_f64(res.field.sup_abs()), res.field.values.len());
    Ok(Outputs {
        files: vec![("field.csv".into(), field), ("operator.json".into(), json(&res.meta))],
        summary,
        failure: None,
    })
}

pub const CONDITION_IDS: [&str; 4] = ["Ir_A", "Ir_A_prime", "Mr_A", "weight_integral"];

pub fn cmd_check(cfg: &RunConfig, condition: &str) -> Result<Outputs, CliError> {
    if !CONDITION_IDS.contains(&condition) {
        return Err(CliError::Unknown(format!("condition '{condition}' (known: {})", CONDITION_IDS.join(", "))));
    }
    let grid = cfg.r_grid();
    let w = cfg.weight("phi", default_weight())?;
    let report: ConditionReport = if condition == "weight_integral" {
        criteria::check_weight_integral(&w, cfg.grid.n as u32, &grid)
    } else {
        let phi = cfg.young("Phi", default_phi())?;
        let psi = cfg.young("Psi", default_psi())?;
        let rho = cfg.kernel("rho", default_kernel())?;
        match condition {
            "Ir_A" => criteria::eval_ir_a(&phi, &psi, &w, &rho, &grid)?,
            "Ir_A_prime" => criteria::eval_ir_a_prime(&phi, &psi, &w, &rho, &grid)?,
            _ => criteria::eval_mr_a(&phi, &psi, &w, &rho, &grid),
        }
    };
    let rows: Vec<[String; 2]> = report.r.iter().zip(report.ratios()).map(|(r, q)| [fmt_f64(*r), fmt_f64(q)]).collect();
    let summary = format!(
        "{}: {:?} (ratio sup {}, extended {}, stability {})\n",
        report.condition_id,
        report.verdict,
        fmt_f64(report.ratio_sup),
        fmt_f64(report.ratio_sup_extended),
        fmt_f64(report.stability)
    );
    Ok(Outputs {
        files: vec![
            ("condition.json".into(), json(&report)),
            ("condition.csv".into(), csv_bytes(["r", "lhs/rhs"], &rows)),
        ],
        summary,
        failure: None,
    })
}

pub fn cmd_verify(cfg: &RunConfig, filter: Option<&str>) -> Result<Outputs, CliError> {
    let report = run_suite(&cfg.harness()?, filter)?;
    let rows = report.summary_rows();
    let mut summary = String::new();
    for c in &report.cases {
        summary.push_str(&format!(
            "{:<24} {} C={} drift={}\n",
            c.statement_id,
            if c.pass { "PASS" } else { "FAIL" },
            fmt_f64(c.fitted_constant),
            fmt_f64(c.refinement_drift)
        ));
    }
    summary.push_str(&format!("{} passed, {} failed\n", report.passed, report.failed));
    let failure = (!report.pass).then(|| CliError::SuiteFailed(report.failed, report.cases.len()));
    Ok(Outputs {
        files: vec![
            ("suite.json".into(), json(&report)),
            (
                "summary.csv".into(),
                csv_bytes(["statement_id", "subcheck", "polarity", "fitted_constant", "refinement_drift", "pass"], &rows),
            ),
        ],
        summary,
        failure,
    })
}
