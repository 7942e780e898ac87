//! Front end shared by the `psi-hilfer` binary and its tests.
//!
//! [`run`] loads the problem file, executes one command and renders the
//! artifact as CSV or JSON. Writing the artifact and mapping failures to exit
//! statuses is left to the caller, see [`CliError::exit_code`].

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use psi_hilfer::analysis::{
    apriori_bound, contraction_certificate, dependence_bound, measure_mismatch, BoundEnvelope, QVariant,
};
use psi_hilfer::grid::{Grid, SolutionGrid};
use psi_hilfer::problem_file::ProblemSpec;
use psi_hilfer::{weighted_norm, Error, IvProblem, SolveOptions, SolveReport};
use serde::{Deserialize, Serialize};
use thiserror::Error as ThisError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_CONTAINMENT: i32 = 4;

/// Relative slack used when checking |z| against an envelope.
pub const CONTAINMENT_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Certify,
    Bound,
    Depend,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Certify => "certify",
            Command::Bound => "bound",
            Command::Depend => "depend",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub problem_path: PathBuf,
    pub perturbed_path: Option<PathBuf>,
    pub n: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// `None` writes to standard output.
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn new(command: Command, problem_path: impl Into<PathBuf>) -> Self {
        let defaults = SolveOptions::default();
        RunConfig {
            command,
            problem_path: problem_path.into(),
            perturbed_path: None,
            n: defaults.n,
            tol: defaults.tol,
            max_iter: defaults.max_iter,
            output: None,
            format: OutputFormat::Csv,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.n < 2 {
            return Err(CliError::Config(format!("--n must be at least 2, got {}", self.n)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Config(format!("--tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(CliError::Config("--max-iter must be at least 1".into()));
        }
        if self.command == Command::Depend && self.perturbed_path.is_none() {
            return Err(CliError::Config("depend requires --perturbed <path>".into()));
        }
        Ok(())
    }

    fn solve_options(&self, n: usize) -> SolveOptions {
        SolveOptions {
            n,
            tol: self.tol,
            max_iter: self.max_iter,
            compute_residual: false,
        }
    }
}

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Core(#[from] Error),
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::NotConverged { .. }) => EXIT_NOT_CONVERGED,
            _ => EXIT_CONFIG,
        }
    }
}

/// Rendered artifact plus the exit status it calls for. A containment
/// violation still produces the full table.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub artifact: String,
    pub exit_code: i32,
    /// One-line note for standard error, set when `exit_code` is nonzero.
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunHeader {
    pub command: String,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub psi: String,
    pub n: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRow {
    pub x: f64,
    pub psi_x: f64,
    pub r: f64,
    /// `None` where z is unbounded (the corner node when γ < 1).
    pub z: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutput {
    #[serde(flatten)]
    pub header: RunHeader,
    pub iterations: usize,
    pub final_delta: f64,
    pub certified: bool,
    pub q: Option<f64>,
    pub rows: Vec<SolveRow>,
}

impl SolveOutput {
    /// Rebuilds the solution on the grid recorded in the rows.
    pub fn to_solution(&self) -> Result<SolutionGrid, CliError> {
        if self.rows.len() < 2 {
            return Err(CliError::Config("solution needs at least two rows".into()));
        }
        let nodes: Vec<f64> = self.rows.iter().map(|r| r.x).collect();
        let psi_a = self.rows[0].psi_x;
        let h = (self.rows[self.rows.len() - 1].psi_x - psi_a) / (self.rows.len() - 1) as f64;
        let grid = Arc::new(Grid::from_parts(nodes, psi_a, h)?);
        let r = self.rows.iter().map(|row| row.r).collect();
        Ok(SolutionGrid::new(grid, self.header.gamma, r)?)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{} is not a solve artifact: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyOutput {
    #[serde(flatten)]
    pub header: RunHeader,
    pub p: f64,
    pub q: f64,
    pub q_variant_alt: f64,
    pub unique: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeRow {
    pub x: f64,
    /// |z| for `bound`, |z − v| for `depend`
    pub magnitude: f64,
    pub envelope: f64,
    pub contained: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeOutput {
    #[serde(flatten)]
    pub header: RunHeader,
    /// p₂ for `bound`, the measured mismatch ε for `depend`
    pub prefactor: f64,
    pub iterations: usize,
    pub violations: usize,
    pub worst_ratio: f64,
    /// Rows start at the first node where z is finite.
    pub rows: Vec<EnvelopeRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub n: usize,
    pub iterations: usize,
    pub final_delta: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutput {
    #[serde(flatten)]
    pub header: RunHeader,
    pub rows: Vec<VerifyRow>,
    /// residual at N over residual at 2N
    pub residual_ratio: f64,
}

fn load_problem(path: &Path) -> Result<IvProblem, CliError> {
    Ok(ProblemSpec::load(path)?.build()?)
}

fn header(config: &RunConfig, problem: &IvProblem) -> RunHeader {
    let order = problem.order();
    RunHeader {
        command: config.command.name().to_string(),
        alpha: order.alpha(),
        beta: order.beta(),
        gamma: order.gamma(),
        psi: problem.psi().label().to_string(),
        n: config.n,
        tol: config.tol,
    }
}

/// Executes `config` and renders its artifact. Nothing is written.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    config.validate()?;
    let problem = load_problem(&config.problem_path)?;
    match config.command {
        Command::Solve => run_solve(config, &problem),
        Command::Certify => run_certify(config, &problem),
        Command::Bound => run_bound(config, &problem),
        Command::Depend => {
            let path = config.perturbed_path.as_deref().expect("validated above");
            let perturbed = load_problem(path)?;
            run_depend(config, &problem, &perturbed)
        }
        Command::Verify => run_verify(config, &problem),
    }
}

/// Runs `config` and writes the artifact to its destination. Returns the
/// exit status.
pub fn execute(config: &RunConfig) -> i32 {
    let outcome = match run(config) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let written = match &config.output {
        Some(path) => fs::write(path, &outcome.artifact).map_err(|source| CliError::Output {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{}", outcome.artifact);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    if let Some(note) = &outcome.diagnostic {
        eprintln!("{note}");
    }
    outcome.exit_code
}

fn render<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("artifact types serialize");
    text.push('\n');
    text
}

/// Shortest round-trip scientific form; `inf` and `NaN` pass through.
fn num(v: f64) -> String {
    format!("{v:e}")
}

fn write_header(out: &mut String, h: &RunHeader) {
    let _ = writeln!(out, "# command: {}", h.command);
    let _ = writeln!(out, "# alpha: {}", num(h.alpha));
    let _ = writeln!(out, "# beta: {}", num(h.beta));
    let _ = writeln!(out, "# gamma: {}", num(h.gamma));
    let _ = writeln!(out, "# psi: {}", h.psi);
    let _ = writeln!(out, "# N: {}", h.n);
    let _ = writeln!(out, "# tol: {}", num(h.tol));
}

fn solved(config: &RunConfig, problem: &IvProblem, n: usize) -> Result<SolveReport, CliError> {
    Ok(psi_hilfer::solve(problem, &config.solve_options(n))?)
}

fn run_solve(config: &RunConfig, problem: &IvProblem) -> Result<Outcome, CliError> {
    let report = solved(config, problem, config.n)?;
    let q = match contraction_certificate(problem, QVariant::Primary) {
        Ok(c) => Some(c.q),
        Err(Error::CertificateUnavailable(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let solution = &report.solution;
    let grid = solution.grid();
    let rows = (0..grid.len())
        .map(|i| {
            let z = solution.raw_value(i);
            SolveRow {
                x: grid.nodes()[i],
                psi_x: grid.psi_values()[i],
                r: solution.regular_values()[i],
                z: z.is_finite().then_some(z),
            }
        })
        .collect();
    let output = SolveOutput {
        header: header(config, problem),
        iterations: report.iterations,
        final_delta: report.final_delta,
        certified: report.certified,
        q,
        rows,
    };
    let artifact = match config.format {
        OutputFormat::Json => render(&output),
        OutputFormat::Csv => {
            let mut out = String::new();
            write_header(&mut out, &output.header);
            let _ = writeln!(out, "# iterations: {}", output.iterations);
            let _ = writeln!(out, "# final_delta: {}", num(output.final_delta));
            let _ = writeln!(out, "# certified: {}", output.certified);
            let _ = writeln!(out, "# q: {}", output.q.map_or("none".to_string(), num));
            let _ = writeln!(out, "# weighted_norm: {}", num(weighted_norm(solution)?));
            out.push_str("x,psi_x,r,z\n");
            for (i, row) in output.rows.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    num(row.x),
                    num(row.psi_x),
                    num(row.r),
                    num(solution.raw_value(i))
                );
            }
            out
        }
    };
    Ok(Outcome {
        artifact,
        exit_code: EXIT_OK,
        diagnostic: None,
    })
}

fn run_certify(config: &RunConfig, problem: &IvProblem) -> Result<Outcome, CliError> {
    let cert = contraction_certificate(problem, QVariant::Primary)?;
    let output = CertifyOutput {
        header: header(config, problem),
        p: cert.p,
        q: cert.q,
        q_variant_alt: cert.q_variant_alt,
        unique: cert.unique,
    };
    let artifact = match config.format {
        OutputFormat::Json => render(&output),
        OutputFormat::Csv => {
            let mut out = String::new();
            write_header(&mut out, &output.header);
            out.push_str("p,q,q_variant_alt,unique\n");
            let _ = writeln!(
                out,
                "{},{},{},{}",
                num(output.p),
                num(output.q),
                num(output.q_variant_alt),
                output.unique
            );
            out
        }
    };
    Ok(Outcome {
        artifact,
        exit_code: EXIT_OK,
        diagnostic: None,
    })
}

fn envelope_outcome(
    config: &RunConfig,
    problem: &IvProblem,
    iterations: usize,
    envelope: &BoundEnvelope,
    magnitudes: &[f64],
    first: usize,
    columns: &str,
) -> Outcome {
    let check = envelope.check(magnitudes, first, CONTAINMENT_SLACK);
    let rows: Vec<EnvelopeRow> = (first..magnitudes.len())
        .map(|i| EnvelopeRow {
            x: envelope.nodes[i],
            magnitude: magnitudes[i],
            envelope: envelope.values[i],
            contained: envelope.contains(i, magnitudes[i], CONTAINMENT_SLACK),
        })
        .collect();
    let output = EnvelopeOutput {
        header: header(config, problem),
        prefactor: envelope.prefactor,
        iterations,
        violations: check.violations,
        worst_ratio: check.worst_ratio,
        rows,
    };
    let artifact = match config.format {
        OutputFormat::Json => render(&output),
        OutputFormat::Csv => {
            let mut out = String::new();
            write_header(&mut out, &output.header);
            let _ = writeln!(out, "# iterations: {}", output.iterations);
            let _ = writeln!(out, "# prefactor: {}", num(output.prefactor));
            let _ = writeln!(out, "# violations: {}", output.violations);
            let _ = writeln!(out, "# worst_ratio: {}", num(output.worst_ratio));
            let _ = writeln!(out, "{columns}");
            for row in &output.rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    num(row.x),
                    num(row.magnitude),
                    num(row.envelope),
                    row.contained
                );
            }
            out
        }
    };
    let (exit_code, diagnostic) = if check.contained {
        (EXIT_OK, None)
    } else {
        (
            EXIT_CONTAINMENT,
            Some(format!(
                "containment violated at {} node(s), worst ratio {} at x = {}",
                check.violations,
                num(check.worst_ratio),
                num(envelope.nodes[check.worst_node])
            )),
        )
    };
    Outcome {
        artifact,
        exit_code,
        diagnostic,
    }
}

fn run_bound(config: &RunConfig, problem: &IvProblem) -> Result<Outcome, CliError> {
    let report = solved(config, problem, config.n)?;
    let solution = &report.solution;
    let envelope = apriori_bound(problem, solution.grid())?;
    let magnitudes: Vec<f64> = solution.raw_values().iter().map(|z| z.abs()).collect();
    Ok(envelope_outcome(
        config,
        problem,
        report.iterations,
        &envelope,
        &magnitudes,
        solution.first_finite_node(),
        "x,abs_z,bound,contained",
    ))
}

fn run_depend(config: &RunConfig, problem: &IvProblem, perturbed: &IvProblem) -> Result<Outcome, CliError> {
    let z = solved(config, problem, config.n)?;
    let v = solved(config, perturbed, config.n)?;
    let eps = measure_mismatch(problem, perturbed, &v.solution)?;
    let envelope = dependence_bound(problem, perturbed, eps, z.solution.grid())?;
    let zs = z.solution.raw_values();
    let vs = v.solution.raw_values();
    let first = z.solution.first_finite_node().max(v.solution.first_finite_node());
    let magnitudes: Vec<f64> = zs.iter().zip(&vs).map(|(a, b)| (a - b).abs()).collect();
    Ok(envelope_outcome(
        config,
        problem,
        z.iterations.max(v.iterations),
        &envelope,
        &magnitudes,
        first,
        "x,abs_diff,envelope,contained",
    ))
}

fn run_verify(config: &RunConfig, problem: &IvProblem) -> Result<Outcome, CliError> {
    let mut rows = Vec::with_capacity(2);
    for n in [config.n, 2 * config.n] {
        let mut options = config.solve_options(n);
        options.compute_residual = true;
        let report = psi_hilfer::solve(problem, &options)?;
        rows.push(VerifyRow {
            n,
            iterations: report.iterations,
            final_delta: report.final_delta,
            residual: report.residual.expect("residual requested"),
        });
    }
    let output = VerifyOutput {
        header: header(config, problem),
        residual_ratio: rows[0].residual / rows[1].residual,
        rows,
    };
    let artifact = match config.format {
        OutputFormat::Json => render(&output),
        OutputFormat::Csv => {
            let mut out = String::new();
            write_header(&mut out, &output.header);
            let _ = writeln!(out, "# residual_ratio: {}", num(output.residual_ratio));
            out.push_str("n,iterations,final_delta,residual\n");
            for row in &output.rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    row.n,
                    row.iterations,
                    num(row.final_delta),
                    num(row.residual)
                );
            }
            out
        }
    };
    Ok(Outcome {
        artifact,
        exit_code: EXIT_OK,
        diagnostic: None,
    })
}
