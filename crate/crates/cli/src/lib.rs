//! Command-line front end for `geninv-core`.
//!
//! Every command prints a JSON object on standard output. Exit codes:
//! 0 ok, 1 failed verification or internal error, 2 malformed input,
//! 3 violated precondition, 4 shape error, 5 unknown identifier.

pub mod matrix_file;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use geninv_core::classify::core_ep_equiv_report;
use geninv_core::drazin::group_inverse;
use geninv_core::factor::{hs_decompose, hs_derived, hs_residuals};
use geninv_core::orders::{leq, OrderKind};
use geninv_core::verify::{run_suite_on, EnsembleClass, EnsembleSpec, Suite};
use geninv_core::{CMatrix, GenInvError, InverseReport, Tolerance};
use serde_json::{json, Map, Value};

pub use matrix_file::{read_matrix, write_matrix, FormatError, MatrixFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_SHAPE: i32 = 4;
pub const EXIT_UNKNOWN: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "geninv", version, about = "Generalized matrix inverses, classes and orders")]
pub struct Cli {
    /// Absolute term of the equality tolerance.
    #[arg(long, global = true)]
    pub tol_abs: Option<f64>,
    /// Relative term of the equality tolerance.
    #[arg(long, global = true)]
    pub tol_rel: Option<f64>,
    /// Indent JSON output.
    #[arg(long, global = true)]
    pub pretty: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute one generalized inverse.
    Compute(ComputeArgs),
    /// Report rank, index and EP / core-EP / k-EP membership.
    Classify {
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Test A ≤ B under one or all of the binary relations.
    Order {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        relation: Relation,
    },
    /// Run a verification suite over random ensembles.
    Verify(VerifyArgs),
    /// Write the Hartwig-Spindelböck factors and derived blocks.
    Hs {
        #[arg(short, long)]
        input: PathBuf,
        /// Directory receiving one JSON file per factor.
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub which: Which,
    /// Output file; a `.residuals.json` sidecar is written next to it.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub suite: String,
    #[arg(long, default_value_t = 6)]
    pub size: usize,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, env = "GENINV_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated ensemble classes, e.g. `generic,fixed_rank(3)`.
    #[arg(long, default_value = "generic")]
    pub class: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Mp,
    Group,
    Drazin,
    Dmp,
    Mpd,
    Cmp,
    Mpdmp,
    CoreEp,
    Cce,
}

impl Which {
    pub fn name(self) -> &'static str {
        match self {
            Which::Mp => "mp",
            Which::Group => "group",
            Which::Drazin => "drazin",
            Which::Dmp => "dmp",
            Which::Mpd => "mpd",
            Which::Cmp => "cmp",
            Which::Mpdmp => "mpdmp",
            Which::CoreEp => "core-ep",
            Which::Cce => "cce",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Relation {
    Drazin,
    Dmp,
    Mpd,
    Cmp,
    All,
}

#[derive(Debug)]
pub enum CliError {
    Format(FormatError),
    Core(GenInvError),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Format(_) => EXIT_PARSE,
            CliError::Io(_) => EXIT_FAILED,
            CliError::Core(e) => match e {
                GenInvError::InvalidTolerance(_) | GenInvError::InvalidSpec(_) => EXIT_PARSE,
                GenInvError::IndexTooLarge { .. }
                | GenInvError::ZeroMatrix
                | GenInvError::PreconditionViolated(_) => EXIT_PRECONDITION,
                GenInvError::NotSquare { .. }
                | GenInvError::DimensionMismatch { .. }
                | GenInvError::InvalidShape(_) => EXIT_SHAPE,
                GenInvError::UnknownSuite(_) | GenInvError::UnknownSystem(_) => EXIT_UNKNOWN,
                GenInvError::SvdNoConvergence { .. }
                | GenInvError::ClosedFormMismatch { .. }
                | GenInvError::ResidualFailure { .. } => EXIT_FAILED,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Format(e) => write!(f, "{e}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Format(e)
    }
}

impl From<GenInvError> for CliError {
    fn from(e: GenInvError) -> Self {
        CliError::Core(e)
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("cannot write {}: {e}", path.display()))
}

/// What a successful command prints and the exit code it ends with.
#[derive(Debug)]
pub struct Output {
    pub value: Value,
    pub code: i32,
}

impl Output {
    fn ok(value: Value) -> Self {
        Self { value, code: EXIT_OK }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{}", render(&out.value, cli.pretty));
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn render(v: &Value, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(v)
    } else {
        serde_json::to_string(v)
    }
    .expect("JSON values always serialize")
}

pub fn tolerance(cli: &Cli) -> Result<Tolerance, CliError> {
    let d = Tolerance::default();
    Ok(Tolerance::new(
        cli.tol_abs.unwrap_or(d.eq_abs),
        cli.tol_rel.unwrap_or(d.eq_rel),
        d.rank_rel,
    )?)
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let tol = tolerance(cli)?;
    match &cli.command {
        Command::Compute(args) => cmd_compute(args, &tol),
        Command::Classify { input } => cmd_classify(input, &tol),
        Command::Order { a, b, relation } => cmd_order(a, b, *relation, &tol),
        Command::Verify(args) => cmd_verify(args, &tol),
        Command::Hs { input, output } => cmd_hs(input, output, &tol),
    }
}

/// Residuals of the equations that determine each inverse.
pub fn defining_residuals(which: Which, a: &CMatrix, x: &CMatrix, r: &InverseReport) -> Result<Map<String, Value>, CliError> {
    let k = r.index;
    let ak = a.pow(k)?;
    let d = |p: CMatrix, q: &CMatrix| (&p - q).frobenius_norm();
    let ax = a * x;
    let xa = x * a;
    let outer = d(&xa * x, x);
    let rows: Vec<(&str, f64)> = match which {
        Which::Mp => vec![
            ("axa_eq_a", d(&ax * a, a)),
            ("xax_eq_x", outer),
            ("ax_hermitian", d(ax.conj_transpose(), &ax)),
            ("xa_hermitian", d(xa.conj_transpose(), &xa)),
        ],
        Which::Group | Which::Drazin => vec![
            ("akplus1_x_eq_ak", d(&a.pow(k + 1)? * x, &ak)),
            ("xax_eq_x", outer),
            ("ax_eq_xa", d(ax.clone(), &xa)),
        ],
        Which::Dmp => vec![
            ("xax_eq_x", outer),
            ("xa_eq_ada", d(xa.clone(), &(&r.drazin * a))),
            ("ak_x_eq_ak_ap", d(&ak * x, &(&ak * &r.mp))),
        ],
        Which::Mpd => vec![
            ("xax_eq_x", outer),
            ("ax_eq_aad", d(ax.clone(), &(a * &r.drazin))),
            ("x_ak_eq_ap_ak", d(x * &ak, &(&r.mp * &ak))),
        ],
        Which::Cmp => vec![
            ("xax_eq_x", outer),
            ("ax_eq_ac_ap", d(ax.clone(), &(&r.core * &r.mp))),
            ("xa_eq_ap_ac", d(xa.clone(), &(&r.mp * &r.core))),
        ],
        Which::Mpdmp => vec![("x_eq_ap_ad_ap", d(x.clone(), &(&(&r.mp * &r.drazin) * &r.mp)))],
        Which::CoreEp => vec![
            ("x_akplus1_eq_ak", d(x * &a.pow(k + 1)?, &ak)),
            ("ax2_eq_x", d(&ax * x, x)),
            ("ax_hermitian", d(ax.conj_transpose(), &ax)),
        ],
        Which::Cce => vec![
            ("xax_eq_x", outer),
            ("x_eq_ap_a_cep_a_ap", d(x.clone(), &(&(&(&(&r.mp * a) * &r.core_ep) * a) * &r.mp))),
        ],
    };
    Ok(rows.into_iter().map(|(n, v)| (n.to_string(), json!(v))).collect())
}

fn sidecar_path(output: &Path) -> PathBuf {
    output.with_extension("residuals.json")
}

pub fn cmd_compute(args: &ComputeArgs, tol: &Tolerance) -> Result<Output, CliError> {
    let a = read_matrix(&args.input)?;
    let r = InverseReport::compute(&a, tol)?;
    let x = match args.which {
        Which::Group => group_inverse(&a, tol)?,
        w => r.get(w.name()).cloned().unwrap_or_else(|| r.drazin.clone()),
    };
    let residuals = defining_residuals(args.which, &a, &x, &r)?;
    let mut report = json!({
        "which": args.which.name(),
        "index": r.index,
        "rank": r.rank,
        "residuals": residuals,
    });
    match &args.output {
        Some(path) => {
            write_matrix(path, &x).map_err(|e| io_err(path, e))?;
            let side = sidecar_path(path);
            fs::write(&side, render(&report, true)).map_err(|e| io_err(&side, e))?;
            report["output"] = json!(path.display().to_string());
            report["sidecar"] = json!(side.display().to_string());
        }
        None => report["result"] = serde_json::to_value(MatrixFile::from_matrix(&x)).expect("serializable"),
    }
    Ok(Output::ok(report))
}

pub fn cmd_classify(input: &Path, tol: &Tolerance) -> Result<Output, CliError> {
    let a = read_matrix(input)?;
    let report = core_ep_equiv_report(&a, tol)?;
    Ok(Output::ok(serde_json::to_value(report).expect("serializable")))
}

pub fn cmd_order(a: &Path, b: &Path, relation: Relation, tol: &Tolerance) -> Result<Output, CliError> {
    let a = read_matrix(a)?;
    let b = read_matrix(b)?;
    let kinds = match relation {
        Relation::Drazin => vec![OrderKind::Drazin],
        Relation::Dmp => vec![OrderKind::Dmp],
        Relation::Mpd => vec![OrderKind::Mpd],
        Relation::Cmp => vec![OrderKind::Cmp],
        Relation::All => OrderKind::ALL.to_vec(),
    };
    let mut out = Map::new();
    for kind in kinds {
        let rep = leq(&a, &b, kind, tol)?;
        out.insert(kind.name().to_string(), serde_json::to_value(rep).expect("serializable"));
    }
    Ok(Output::ok(Value::Object(out)))
}

pub fn parse_classes(list: &str) -> Result<Vec<EnsembleClass>, CliError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<EnsembleClass>().map_err(CliError::from))
        .collect()
}

pub fn cmd_verify(args: &VerifyArgs, tol: &Tolerance) -> Result<Output, CliError> {
    Suite::parse(&args.suite)?;
    let classes = parse_classes(&args.class)?;
    if classes.is_empty() {
        return Err(GenInvError::InvalidSpec("no ensemble class given".into()).into());
    }
    let specs = classes
        .into_iter()
        .map(|c| EnsembleSpec::new(args.size, args.count, args.seed, c))
        .collect::<Result<Vec<_>, _>>()?;
    let report = run_suite_on(&args.suite, &specs, tol)?;
    let code = if report.passed() { EXIT_OK } else { EXIT_FAILED };
    Ok(Output {
        value: serde_json::to_value(report).expect("serializable"),
        code,
    })
}

pub fn cmd_hs(input: &Path, dir: &Path, tol: &Tolerance) -> Result<Output, CliError> {
    let a = read_matrix(input)?;
    let h = hs_decompose(&a, tol)?;
    let dv = hs_derived(&h, tol)?;
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let blocks = [
        ("U", &h.u),
        ("Sigma", &h.sigma_matrix()),
        ("Q", &h.q),
        ("P", &h.p),
        ("q_hat", &dv.q_hat),
        ("sigma_tilde", &dv.sigma_tilde),
        ("q_tilde", &dv.q_tilde),
        ("delta", &dv.delta),
        ("delta_hat", &dv.delta_hat),
        ("delta_tilde", &dv.delta_tilde),
    ];
    let mut files = Vec::new();
    for (name, m) in blocks {
        let path = dir.join(format!("{name}.json"));
        write_matrix(&path, m).map_err(|e| io_err(&path, e))?;
        files.push(path.display().to_string());
    }
    let res = hs_residuals(&a, &h);
    Ok(Output::ok(json!({
        "rank": h.r,
        "sigma": h.sigma,
        "files": files,
        "residuals": res,
    })))
}
