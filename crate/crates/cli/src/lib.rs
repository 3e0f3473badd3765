//! Command-line front end: argument parsing, matrix files, reports and the
//! mapping from numerical failures to exit codes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod json;
pub mod matrix_file;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use quasiherm::dyson::{
    hermitize, isospectral_residual, quasi_hermiticity_residual, HermitizeOptions, Metric,
};
use quasiherm::linalg::{c64, fro, hermiticity_residual, Complex64, ComplexMatrix};
use quasiherm::models::{
    dimer_build, dimer_from_coupling, ep_scan, fermionic_build, DimerParams, FermionicParams,
};
use quasiherm::observables::{shared_metric, SharedMetricStatus};
use quasiherm::{Error, Tolerances};

use json::{format_real, Json};
use matrix_file::{format_matrix, matrix_json, read_matrix, ParseError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_COMPLEX_SPECTRUM: i32 = 3;
pub const EXIT_DEFECTIVE: i32 = 4;
pub const EXIT_NUMERICAL: i32 = 5;
pub const EXIT_MODEL: i32 = 6;
pub const EXIT_NO_SHARED_METRIC: i32 = 7;
pub const EXIT_INCONCLUSIVE: i32 = 8;

/// Upper bound on scan grid sizes.
const MAX_SCAN_POINTS: usize = 10_000_000;

#[derive(Debug, Parser)]
#[command(
    name = "quasiherm",
    version,
    about = "Dyson maps and metrics for quasi-Hermitian matrices"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Relative tolerance for residual checks
    #[arg(long, global = true)]
    pub tol_residual: Option<f64>,
    /// Relative tolerance on imaginary parts of eigenvalues
    #[arg(long, global = true)]
    pub tol_reality: Option<f64>,
    /// Relative floor for positive definiteness
    #[arg(long, global = true)]
    pub tol_positivity: Option<f64>,
    /// Seed for randomized searches
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a Dyson map, metric and Hermitian avatar for a matrix file
    Hermitize {
        input: PathBuf,
        /// Diagonal rescaling, comma separated `re` or `re:im` values
        #[arg(long, value_delimiter = ',', value_parser = parse_complex, allow_hyphen_values = true)]
        k_diag: Option<Vec<Complex64>>,
        /// Rotate onto the Hermitian square root of the metric
        #[arg(long)]
        hermitian_omega: bool,
        /// Write the report here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form models
    Model {
        #[command(subcommand)]
        model: ModelCommand,
    },
    /// Exceptional-point scan of the dimer over gamma, as CSV
    Scan {
        #[arg(long, allow_hyphen_values = true)]
        kappa: f64,
        #[arg(long, allow_hyphen_values = true)]
        gamma_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        gamma_max: f64,
        #[arg(long, allow_hyphen_values = true)]
        step: f64,
    },
    /// Search for a metric shared by two matrices
    Compat {
        path_h: PathBuf,
        path_a: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ModelCommand {
    /// H = κσ_x + iγσ_z, given either (omega, alpha) or (kappa, gamma)
    Dimer {
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        kappa: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<f64>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Two-mode fermionic Hamiltonian
    Fermion {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        omega: f64,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| format!("invalid number `{t}`"))
    };
    match s.split_once(':') {
        Some((re, im)) => Ok(c64(parse(re)?, parse(im)?)),
        None => Ok(c64(parse(s)?, 0.0)),
    }
}

/// Exit code for a typed numerical error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::ComplexSpectrum { .. } => EXIT_COMPLEX_SPECTRUM,
        Error::DefectiveMatrix { .. } => EXIT_DEFECTIVE,
        Error::EpRegion { .. } | Error::InvalidCoupling(_) | Error::SingularDysonMap { .. } => {
            EXIT_MODEL
        }
        Error::NotSquare { .. }
        | Error::DimensionMismatch { .. }
        | Error::NonFinite
        | Error::InvalidTolerance { .. }
        | Error::InvalidParameter(_) => EXIT_USAGE,
        Error::NotPositiveDefinite { .. }
        | Error::NotHermitian { .. }
        | Error::SingularInput
        | Error::NoConvergence(_)
        | Error::SingularScaling { .. }
        | Error::NotUnitary { .. }
        | Error::AvatarNotHermitian { .. }
        | Error::NotQuasiHermitian { .. }
        | Error::NotHermitianGenerator { .. } => EXIT_NUMERICAL,
    }
}

enum Failure {
    Usage(String),
    Parse(ParseError),
    Core(Error),
    Io(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Parse(_) => EXIT_USAGE,
            Failure::Core(e) => exit_code(e),
            Failure::Io(_) => EXIT_NUMERICAL,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Io(m) => m.clone(),
            Failure::Parse(e) => e.to_string(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Parse(e)
    }
}

/// Parses `args` (program name first) and runs the command. Normal output
/// goes to `out`, diagnostics to `err`; the return value is the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{rendered}");
                EXIT_OK
            };
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message());
            failure.code()
        }
    }
}

fn tolerances(g: &GlobalArgs) -> Result<Tolerances, Failure> {
    let mut tol = Tolerances::default();
    if let Some(v) = g.tol_residual {
        tol.residual_rel = v;
    }
    if let Some(v) = g.tol_reality {
        tol.reality_rel = v;
    }
    if let Some(v) = g.tol_positivity {
        tol.positivity_rel = v;
    }
    tol.validate()?;
    Ok(tol)
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let tol = tolerances(&cli.global)?;
    match &cli.command {
        Command::Hermitize {
            input,
            k_diag,
            hermitian_omega,
            out: path,
        } => cmd_hermitize(
            input,
            k_diag.clone(),
            *hermitian_omega,
            path.as_deref(),
            &tol,
            out,
        ),
        Command::Model { model } => cmd_model(model, &tol, out),
        Command::Scan {
            kappa,
            gamma_min,
            gamma_max,
            step,
        } => cmd_scan(*kappa, *gamma_min, *gamma_max, *step, &tol, out),
        Command::Compat {
            path_h,
            path_a,
            out: path,
        } => cmd_compat(path_h, path_a, path.as_deref(), cli.global.seed, &tol, out),
    }
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", p.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(format!("cannot write output: {e}"))),
    }
}

fn tolerances_json(tol: &Tolerances) -> Json {
    Json::object([
        ("residual_rel", Json::Real(tol.residual_rel)),
        ("reality_rel", Json::Real(tol.reality_rel)),
        ("positivity_rel", Json::Real(tol.positivity_rel)),
        ("defective_cond", Json::Real(tol.defective_cond)),
    ])
}

fn cmd_hermitize(
    input: &Path,
    k_diag: Option<Vec<Complex64>>,
    hermitian_omega: bool,
    path: Option<&Path>,
    tol: &Tolerances,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let h = read_matrix(input)?;
    let options = HermitizeOptions {
        k_diag,
        hermitian_omega,
    };
    let report = hermitize(&h, &options, tol)?;
    let doc = Json::object([
        ("energies", Json::reals(&report.energies)),
        ("family", Json::Str(report.family.as_str().to_string())),
        (
            "residuals",
            Json::object([
                ("quasi_hermiticity", Json::Real(report.residual_quasi_herm)),
                (
                    "avatar_hermiticity",
                    Json::Real(report.residual_avatar_herm),
                ),
                ("isospectral", Json::Real(report.residual_isospectral)),
            ]),
        ),
        ("metric", matrix_json(&report.metric)),
        ("avatar", matrix_json(&report.avatar)),
        ("passed", Json::Bool(report.passed)),
        ("tolerances", tolerances_json(tol)),
        ("metric_condition", Json::Real(report.metric_condition)),
        ("omega", matrix_json(&report.omega)),
    ]);
    emit(&doc.to_pretty(), path, out)?;
    Ok(if report.passed {
        EXIT_OK
    } else {
        EXIT_NUMERICAL
    })
}

/// Matrices and closed-form energies of one model instance.
struct ModelOutput {
    hamiltonian: ComplexMatrix,
    h: ComplexMatrix,
    omega: ComplexMatrix,
    omega_inv: ComplexMatrix,
    theta: ComplexMatrix,
    energies: Vec<f64>,
    parameters: Json,
}

fn build_model(model: &ModelCommand, tol: &Tolerances) -> Result<ModelOutput, Failure> {
    match model {
        ModelCommand::Dimer {
            omega,
            alpha,
            kappa,
            gamma,
            ..
        } => {
            let params = match (omega, alpha, kappa, gamma) {
                (Some(w), Some(a), None, None) => DimerParams::new(*w, *a)?,
                (None, None, Some(k), Some(g)) => dimer_from_coupling(*k, *g)?,
                _ => {
                    return Err(Failure::Usage(
                        "dimer needs either --omega and --alpha, or --kappa and --gamma".into(),
                    ))
                }
            };
            let m = dimer_build(&params, tol)?;
            Ok(ModelOutput {
                energies: vec![-params.omega, params.omega],
                parameters: Json::object([
                    ("omega", Json::Real(params.omega)),
                    ("alpha", Json::Real(params.alpha)),
                    ("kappa", Json::Real(params.kappa)),
                    ("gamma", Json::Real(params.gamma)),
                ]),
                hamiltonian: m.hamiltonian,
                h: m.h,
                omega: m.omega,
                omega_inv: m.omega_inv,
                theta: m.theta,
            })
        }
        ModelCommand::Fermion {
            alpha, beta, omega, ..
        } => {
            let p = FermionicParams::new(*alpha, *beta, *omega, tol)?;
            let m = fermionic_build(&p)?;
            let root = (1.0 + 4.0 * p.alpha * p.beta).sqrt();
            let mut energies = vec![
                (1.0 - root) / 2.0,
                p.omega,
                1.0 - p.omega,
                (1.0 + root) / 2.0,
            ];
            energies.sort_by(f64::total_cmp);
            Ok(ModelOutput {
                energies,
                parameters: Json::object([
                    ("alpha", Json::Real(p.alpha)),
                    ("beta", Json::Real(p.beta)),
                    ("omega", Json::Real(p.omega)),
                    ("sqrt_ab", Json::Real(p.sqrt_ab)),
                    ("det_d", Json::Real(p.det_d)),
                ]),
                hamiltonian: m.hamiltonian,
                h: m.h,
                omega: m.omega,
                omega_inv: m.omega_inv,
                theta: m.theta,
            })
        }
    }
}

fn rel(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

fn cmd_model(model: &ModelCommand, tol: &Tolerances, out: &mut dyn Write) -> Result<i32, Failure> {
    let out_dir = match model {
        ModelCommand::Dimer { out_dir, .. } | ModelCommand::Fermion { out_dir, .. } => out_dir,
    };
    let m = build_model(model, tol)?;
    let metric = Metric::new(m.theta.clone(), tol)?;
    let norm_h = fro(&m.hamiltonian);
    let dyson = rel(
        fro(&(&m.omega_inv * &m.h * &m.omega - &m.hamiltonian)),
        norm_h,
    );
    let metric_id = rel(
        fro(&(m.omega.adjoint() * &m.omega - &m.theta)),
        fro(&m.theta),
    );
    let quasi = quasi_hermiticity_residual(&m.hamiltonian, &metric);
    let avatar = rel(hermiticity_residual(&m.h), fro(&m.h));
    let iso = isospectral_residual(&m.energies, &m.h, norm_h);
    let passed = dyson <= tol.residual_rel
        && metric_id <= tol.residual_rel
        && quasi <= tol.residual_rel
        && avatar <= tol.residual_rel
        && iso <= tol.reality_rel;
    let doc = Json::object([
        ("energies", Json::reals(&m.energies)),
        ("family", Json::Str("external".into())),
        (
            "residuals",
            Json::object([
                ("quasi_hermiticity", Json::Real(quasi)),
                ("avatar_hermiticity", Json::Real(avatar)),
                ("isospectral", Json::Real(iso)),
                ("dyson_consistency", Json::Real(dyson)),
                ("metric_consistency", Json::Real(metric_id)),
            ]),
        ),
        ("metric", matrix_json(&m.theta)),
        ("avatar", matrix_json(&m.h)),
        ("passed", Json::Bool(passed)),
        ("tolerances", tolerances_json(tol)),
        ("parameters", m.parameters.clone()),
    ]);
    let report = doc.to_pretty();
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::Io(format!("cannot create {}: {e}", dir.display())))?;
        for (name, mat) in [
            ("H.json", &m.hamiltonian),
            ("h.json", &m.h),
            ("omega.json", &m.omega),
            ("omega_inv.json", &m.omega_inv),
            ("theta.json", &m.theta),
        ] {
            emit(&format_matrix(mat), Some(&dir.join(name)), out)?;
        }
        emit(&report, Some(&dir.join("report.json")), out)?;
    }
    emit(&report, None, out)?;
    Ok(if passed { EXIT_OK } else { EXIT_NUMERICAL })
}

fn csv_real(x: f64) -> String {
    if x.is_finite() {
        format_real(x)
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn cmd_scan(
    kappa: f64,
    gamma_min: f64,
    gamma_max: f64,
    step: f64,
    tol: &Tolerances,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Failure::Usage(format!(
            "--step must be positive, got {step}"
        )));
    }
    if !(gamma_min.is_finite() && gamma_max.is_finite() && gamma_min <= gamma_max) {
        return Err(Failure::Usage(format!(
            "gamma range [{gamma_min}, {gamma_max}] is empty"
        )));
    }
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Failure::Usage(format!(
            "--kappa must be positive, got {kappa}"
        )));
    }
    let intervals = ((gamma_max - gamma_min) / step + 1e-9).floor();
    if !(intervals < MAX_SCAN_POINTS as f64) {
        return Err(Failure::Usage(format!(
            "grid would exceed {MAX_SCAN_POINTS} points"
        )));
    }
    let grid: Vec<f64> = (0..=intervals as usize)
        .map(|k| gamma_min + k as f64 * step)
        .collect();
    let report = ep_scan(kappa, &grid, tol)?;
    let mut text = String::from("gamma,min_gap,eigvec_cond,is_ep\n");
    for (i, gamma) in grid.iter().enumerate() {
        text.push_str(&format!(
            "{},{},{},{}\n",
            csv_real(*gamma),
            csv_real(report.min_gap[i]),
            csv_real(report.eigvec_cond[i]),
            report.ep_flags[i]
        ));
    }
    emit(&text, None, out)?;
    Ok(EXIT_OK)
}

fn cmd_compat(
    path_h: &Path,
    path_a: &Path,
    path: Option<&Path>,
    seed: u64,
    tol: &Tolerances,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let h = read_matrix(path_h)?;
    let a = read_matrix(path_a)?;
    let result = shared_metric(&h, &a, tol, seed)?;
    let residuals = match result.residuals {
        Some((r1, r2)) => Json::object([("first", Json::Real(r1)), ("second", Json::Real(r2))]),
        None => Json::object(Vec::<(String, Json)>::new()),
    };
    let found = result.status == SharedMetricStatus::Found;
    let doc = Json::object([
        ("status", Json::Str(result.status.as_str().to_string())),
        (
            "solution_space_dim",
            Json::Int(result.solution_space_dim as i64),
        ),
        ("residuals", residuals),
        (
            "metric",
            result
                .theta
                .as_ref()
                .map_or(Json::Null, |t| matrix_json(t.theta())),
        ),
        ("passed", Json::Bool(found)),
        ("tolerances", tolerances_json(tol)),
        ("seed", Json::Int(seed as i64)),
    ]);
    emit(&doc.to_pretty(), path, out)?;
    Ok(match result.status {
        SharedMetricStatus::Found => EXIT_OK,
        SharedMetricStatus::NoSharedMetric => EXIT_NO_SHARED_METRIC,
        SharedMetricStatus::Inconclusive => EXIT_INCONCLUSIVE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_values_parse() {
        assert_eq!(parse_complex("2").unwrap(), c64(2.0, 0.0));
        assert_eq!(parse_complex("-1:0.5").unwrap(), c64(-1.0, 0.5));
        assert!(parse_complex("x").is_err());
        assert!(parse_complex("1:").is_err());
        assert!(parse_complex("inf").is_err());
    }

    #[test]
    fn exit_codes_cover_documented_errors() {
        assert_eq!(
            exit_code(&Error::ComplexSpectrum {
                max_imag: 1.0,
                threshold: 0.0
            }),
            3
        );
        assert_eq!(
            exit_code(&Error::DefectiveMatrix {
                condition: 1e9,
                threshold: 1e8
            }),
            4
        );
        assert_eq!(exit_code(&Error::SingularInput), 5);
        assert_eq!(
            exit_code(&Error::EpRegion {
                kappa: 1.0,
                gamma_abs: 1.0
            }),
            6
        );
        assert_eq!(exit_code(&Error::InvalidCoupling("x".into())), 6);
        assert_eq!(exit_code(&Error::SingularDysonMap { det: 0.0 }), 6);
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
