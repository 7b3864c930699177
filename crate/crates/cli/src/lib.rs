//! Command-line front end for `selfdual-core`.
//!
//! Every subcommand accepts one or more input files. Results are printed to
//! standard output in input order, or written to `<out-dir>/<stem>.<ext>` when
//! an output directory is given (flag `--out-dir` or `SELFDUAL_OUT_DIR`).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use selfdual_core::dnn::DnnError;
use selfdual_core::geometry::{self, GeometryError, PolyhedralCone};
use selfdual_core::io::{self, ParseError};
use selfdual_core::report::{self, AnalysisParams, AnalysisReport};
use selfdual_core::search::{self, SearchError, SearchParams, SearchStatus, SearchTranscript};
use selfdual_core::selfdual::{self, PsdSlackCertificate, SelfDualError};
use selfdual_core::{data, Matrix};

pub const OUT_DIR_ENV: &str = "SELFDUAL_OUT_DIR";

pub mod exit {
    pub const OK: u8 = 0;
    pub const PRECONDITION: u8 = 2;
    pub const NON_CONVERGENCE: u8 = 3;
    pub const PARSE: u8 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{0}")]
    Precondition(String),
    #[error("{0}")]
    NonConvergence(String),
    #[error("cannot serialize output: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Json(_) => exit::PARSE,
            CliError::Precondition(_) => exit::PRECONDITION,
            CliError::NonConvergence(_) => exit::NON_CONVERGENCE,
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl From<SelfDualError> for CliError {
    fn from(e: SelfDualError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl From<DnnError> for CliError {
    fn from(e: DnnError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::NonConvergence { .. } => CliError::NonConvergence(e.to_string()),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "selfdual", version, about = "Self-dual polyhedral cones, PSD slacks and DNN extreme rays")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Slack matrix of a cone (rows: generators of K, columns: generators of K*)
    Slack(BatchArgs),
    /// Euclidean dual of a cone
    Dual(BatchArgs),
    /// Analysis report of a symmetric matrix
    Analyze(BatchArgs),
    /// Decide self-duality of a cone through a PSD slack
    Verify(BatchArgs),
    /// Search for a self-dual realization of a slack support
    Search(BatchArgs),
    /// Write bundled example data
    Examples(ExamplesArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Numerical tolerance (PSD / nonnegativity margin)
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Cone dimension / target rank
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5000)]
    pub max_iter: usize,
    /// Total number of search attempts
    #[arg(long, default_value_t = 20)]
    pub retries: usize,
    #[arg(long, conflicts_with = "text")]
    pub json: bool,
    #[arg(long)]
    pub text: bool,
    /// Number of inputs processed in parallel
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Write results to this directory instead of standard output
    #[arg(short = 'o', long, env = OUT_DIR_ENV)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BatchArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct ExamplesArgs {
    /// Example name, or `all`; omit to list the names
    pub name: Option<String>,
    #[arg(short = 'o', long, env = OUT_DIR_ENV)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl Common {
    fn format(&self, default: Format) -> Format {
        if self.json {
            Format::Json
        } else if self.text {
            Format::Text
        } else {
            default
        }
    }

    pub fn search_params(&self) -> SearchParams {
        SearchParams {
            target_rank: self.rank.unwrap_or(3),
            max_iter: self.max_iter,
            seed: self.seed,
            retries: self.retries,
            ..SearchParams::default()
        }
    }
}

/// Result of one command on one input.
#[derive(Clone, Debug, PartialEq)]
pub struct Emitted {
    pub body: String,
    pub extension: &'static str,
    /// Additional files, always written to the output directory.
    pub files: Vec<(String, String)>,
    pub code: u8,
}

impl Emitted {
    fn ok(body: String, extension: &'static str) -> Self {
        Emitted { body, extension, files: Vec::new(), code: exit::OK }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn parse_err(path: &Path) -> impl FnOnce(ParseError) -> CliError + '_ {
    move |source| CliError::Parse { path: path.display().to_string(), source }
}

pub fn load_cone(path: &Path) -> Result<PolyhedralCone, CliError> {
    let (d, gens) = io::parse_cone(&read(path)?).map_err(parse_err(path))?;
    Ok(PolyhedralCone::new(d, gens)?)
}

pub fn load_matrix(path: &Path) -> Result<Matrix, CliError> {
    io::parse_matrix(&read(path)?).map_err(parse_err(path))
}

pub fn load_support(path: &Path) -> Result<Vec<Vec<bool>>, CliError> {
    io::parse_support(&read(path)?).map_err(parse_err(path))
}

fn checked_cone(k: &PolyhedralCone) -> Result<(), CliError> {
    let rank = selfdual_core::linalg::numeric_rank(&k.generator_matrix(), selfdual_core::tol::RANK);
    if rank < k.dim() {
        return Err(GeometryError::NotFullDimensional { rank, dim: k.dim() }.into());
    }
    if !geometry::is_pointed(k) {
        return Err(GeometryError::NotPointed.into());
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn labels(prefix: &str, l: &[usize]) -> String {
    let items: Vec<String> = l.iter().map(usize::to_string).collect();
    format!("# {prefix}: {}\n", items.join(" "))
}

#[derive(Serialize)]
struct SlackJson<'a> {
    cone_dim: usize,
    row_labels: &'a [usize],
    col_labels: &'a [usize],
    matrix: &'a Matrix,
}

pub fn cmd_slack(path: &Path, c: &Common) -> Result<Emitted, CliError> {
    let k = load_cone(path)?;
    checked_cone(&k)?;
    let s = geometry::slack_matrix(&k)?;
    match c.format(Format::Text) {
        Format::Json => Ok(Emitted::ok(
            to_json(&SlackJson { cone_dim: s.cone_dim, row_labels: &s.row_labels, col_labels: &s.col_labels, matrix: &s.matrix })?,
            "slack.json",
        )),
        Format::Text => {
            let mut out = format!("# slack matrix, cone dimension {}\n", s.cone_dim);
            out.push_str(&labels("rows (generators of K)", &s.row_labels));
            out.push_str(&labels("cols (generators of K*)", &s.col_labels));
            out.push_str(&io::write_matrix(&s.matrix));
            Ok(Emitted::ok(out, "slack"))
        }
    }
}

pub fn cmd_dual(path: &Path, c: &Common) -> Result<Emitted, CliError> {
    let k = load_cone(path)?;
    checked_cone(&k)?;
    let dual = geometry::dual_cone(&k)?;
    match c.format(Format::Text) {
        Format::Json => Ok(Emitted::ok(to_json(&dual)?, "dual.json")),
        Format::Text => Ok(Emitted::ok(io::write_cone(dual.dim(), dual.generators()), "dual.cone")),
    }
}

pub fn analyze_report(path: &Path, c: &Common) -> Result<AnalysisReport, CliError> {
    let a = load_matrix(path)?;
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(report::analyze(&a, &name, &AnalysisParams { tol: c.tol, rank: c.rank })?)
}

fn verdict_text(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "yes",
        Some(false) => "no",
        None => "undetermined",
    }
}

fn analysis_text(r: &AnalysisReport) -> String {
    let mut out = format!("input: {} ({}x{})\n", r.input.name, r.input.rows, r.input.cols);
    out.push_str(&format!("dnn: {}\n", verdict_text(r.dnn.value)));
    out.push_str(&format!("rank: {}\n", r.rank));
    out.push_str(&format!("psd margin: {:e}\n", r.psd_margin));
    out.push_str(&format!("entry margin: {:e}\n", r.entry_margin));
    match &r.extremality {
        Some(e) => out.push_str(&format!(
            "extreme: {} (intersection dim {})\n",
            verdict_text(r.extreme.value),
            e.intersection_dim
        )),
        None => out.push_str("extreme: undetermined (not dnn)\n"),
    }
    out.push_str(&format!("irreducible: {}\n", verdict_text(Some(r.irreducible))));
    out.push_str(&format!("simplicial: {}\n", verdict_text(Some(r.simplicial))));
    let s = &r.psd_slack;
    out.push_str(&format!("slack conditions (d = {}): {}\n", s.cone_dim, if s.slack_check.passed { "pass" } else { "fail" }));
    for reason in s.slack_check.reasons() {
        out.push_str(&format!("  {reason}\n"));
    }
    out.push_str(&format!("psd slack certified: {}\n", verdict_text(s.certified.value)));
    if let Some(w) = &s.withheld {
        out.push_str(&format!("  {w}\n"));
    }
    if let Some(v) = &s.verdicts {
        out.push_str(&format!("dnn extreme: {} [{}]\n", verdict_text(v.dnn_extreme.value), v.dnn_extreme.provenance));
        out.push_str(&format!("completely positive: {} [{}]\n", verdict_text(v.cp_member.value), v.cp_member.provenance));
        out.push_str(&format!("cpsd: {} [{}]\n", verdict_text(v.cpsd_member.value), v.cpsd_member.provenance));
    }
    if let Some(d5) = &r.dnn5 {
        let class = serde_json::to_value(d5.class).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        out.push_str(&format!("dnn5 class: {class}\n"));
    }
    out
}

pub fn cmd_analyze(path: &Path, c: &Common) -> Result<Emitted, CliError> {
    let r = analyze_report(path, c)?;
    match c.format(Format::Json) {
        Format::Json => Ok(Emitted::ok(to_json(&r)?, "analysis.json")),
        Format::Text => Ok(Emitted::ok(analysis_text(&r), "analysis.txt")),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct VerifyReport {
    pub version: String,
    pub input: String,
    pub dim: usize,
    pub rays: usize,
    pub self_dual: bool,
    pub certificate: Option<PsdSlackCertificate>,
}

pub fn verify_report(path: &Path) -> Result<VerifyReport, CliError> {
    let k = load_cone(path)?;
    checked_cone(&k)?;
    let v = selfdual::is_self_dual(&k)?;
    Ok(VerifyReport {
        version: selfdual_core::VERSION.to_string(),
        input: path.display().to_string(),
        dim: k.dim(),
        rays: k.len(),
        self_dual: v.self_dual,
        certificate: v.certificate,
    })
}

pub fn cmd_verify(path: &Path, c: &Common) -> Result<Emitted, CliError> {
    let r = verify_report(path)?;
    match c.format(Format::Json) {
        Format::Json => Ok(Emitted::ok(to_json(&r)?, "verify.json")),
        Format::Text => {
            let mut out = format!("self-dual: {}\n", r.self_dual);
            if let Some(cert) = &r.certificate {
                let perm: Vec<String> = cert.permutation.iter().map(usize::to_string).collect();
                let scale: Vec<String> = cert.scaling.iter().map(|&v| io::format_f64(v)).collect();
                out.push_str(&format!("permutation: {}\n", perm.join(" ")));
                out.push_str(&format!("scaling: {}\n", scale.join(" ")));
                out.push_str(&format!("min eigenvalue: {:e}\n", cert.min_eigenvalue));
            }
            Ok(Emitted::ok(out, "verify.txt"))
        }
    }
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "input".into())
}

pub fn search_transcript(path: &Path, c: &Common) -> Result<SearchTranscript, CliError> {
    let s = load_support(path)?;
    Ok(search::run_search(&s, &c.search_params())?)
}

pub fn cmd_search(path: &Path, c: &Common) -> Result<Emitted, CliError> {
    let t = search_transcript(path, c)?;
    let (code, files) = match (&t.status, &t.result) {
        (SearchStatus::Realized, Some(r)) => {
            let cone = &r.realization.cone;
            (exit::OK, vec![(format!("{}.realization.cone", stem(path)), io::write_cone(cone.dim(), cone.generators()))])
        }
        (SearchStatus::NotStronglyInvolutive, _) => (exit::PRECONDITION, Vec::new()),
        _ => (exit::NON_CONVERGENCE, Vec::new()),
    };
    let body = match c.format(Format::Json) {
        Format::Json => to_json(&t)?,
        Format::Text => {
            let status = match t.status {
                SearchStatus::Realized => "realized",
                SearchStatus::NotStronglyInvolutive => "not strongly involutive",
                SearchStatus::NoRealizationFound => "no realization found",
            };
            let mut out = format!("status: {status}\nattempts: {}\n", t.attempts.len());
            if let Some(r) = &t.result {
                out.push_str(&format!("successful attempt: {}\nrays: {}\n", r.attempt, r.realization.cone.len()));
                out.push_str(&io::write_cone(r.realization.cone.dim(), r.realization.cone.generators()));
            }
            out
        }
    };
    let extension = if c.format(Format::Json) == Format::Json { "transcript.json" } else { "transcript.txt" };
    Ok(Emitted { body, extension, files, code })
}

pub type CommandFn = fn(&Path, &Common) -> Result<Emitted, CliError>;

/// Runs `f` on every input with up to `jobs` worker threads; results keep input order.
pub fn run_batch(inputs: &[PathBuf], c: &Common, f: CommandFn) -> Vec<Result<Emitted, CliError>> {
    let jobs = c.jobs.clamp(1, inputs.len().max(1));
    if jobs == 1 {
        return inputs.iter().map(|p| f(p, c)).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut slots: Vec<Option<Result<Emitted, CliError>>> = (0..inputs.len()).map(|_| None).collect();
    let done = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= inputs.len() {
                    break;
                }
                let r = f(&inputs[i], c);
                done.lock().expect("worker panicked")[i] = Some(r);
            });
        }
    });
    slots.into_iter().map(|r| r.expect("every input processed")).collect()
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })
}

/// Prints or writes batch results, reporting errors on `err`. Returns the largest exit code.
pub fn emit(
    inputs: &[PathBuf],
    results: Vec<Result<Emitted, CliError>>,
    out_dir: Option<&Path>,
    out: &mut impl Write,
    err: &mut impl Write,
) -> u8 {
    let mut code = exit::OK;
    for (path, r) in inputs.iter().zip(results) {
        let written = r.and_then(|e| {
            let dir = out_dir.unwrap_or(Path::new("."));
            if out_dir.is_some() || !e.files.is_empty() {
                ensure_dir(dir)?;
            }
            match out_dir {
                Some(d) => write_file(&d.join(format!("{}.{}", stem(path), e.extension)), &e.body)?,
                None => out.write_all(e.body.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })?,
            }
            for (name, contents) in &e.files {
                write_file(&dir.join(name), contents)?;
            }
            Ok(e.code)
        });
        match written {
            Ok(c) => code = code.max(c),
            Err(e @ (CliError::Precondition(_) | CliError::NonConvergence(_))) => {
                let _ = writeln!(err, "selfdual: {}: {e}", path.display());
                code = code.max(e.exit_code());
            }
            Err(e) => {
                let _ = writeln!(err, "selfdual: {e}");
                code = code.max(e.exit_code());
            }
        }
    }
    if code == exit::PRECONDITION || code == exit::NON_CONVERGENCE {
        let _ = writeln!(err, "selfdual: finished with exit code {code}");
    }
    code
}

/// A named bundle of files.
pub struct Example {
    pub name: &'static str,
    pub description: &'static str,
    pub files: fn() -> Vec<(String, String)>,
}

fn cone_file(rays: Vec<Vec<f64>>) -> String {
    io::write_cone(rays[0].len(), &rays)
}

fn support_of(m: &Matrix) -> String {
    io::write_support(&geometry::support(m, 0.0))
}

pub fn examples() -> Vec<Example> {
    vec![
        Example {
            name: "pentagon",
            description: "cone over a regular pentagon, its PSD slack and support",
            files: || {
                vec![
                    ("pentagon.cone".into(), cone_file(data::pentagon_rays())),
                    ("pentagon.matrix".into(), io::write_matrix(&data::pentagon_slack())),
                    ("pentagon.support".into(), support_of(&data::pentagon_slack())),
                ]
            },
        },
        Example {
            name: "prism",
            description: "seven-ray self-dual cone over a roofed prism, its PSD slack and support",
            files: || {
                vec![
                    ("prism.cone".into(), cone_file(data::prism_rays())),
                    ("prism.matrix".into(), io::write_matrix(&data::prism_slack())),
                    ("prism.support".into(), support_of(&data::prism_slack())),
                ]
            },
        },
        Example {
            name: "hl96",
            description: "extreme DNN matrix that is not a slack matrix",
            files: || vec![("hl96.matrix".into(), io::write_matrix(&data::hl96()))],
        },
        Example {
            name: "congruence",
            description: "triple A, B, M with A = M B M^T",
            files: || {
                let (a, b, m) = data::congruence_triple();
                vec![
                    ("congruence_a.matrix".into(), io::write_matrix(&a)),
                    ("congruence_b.matrix".into(), io::write_matrix(&b)),
                    ("congruence_m.matrix".into(), io::write_matrix(&m)),
                ]
            },
        },
        Example {
            name: "ten-vertex",
            description: "rank-4 matrix on a 10-vertex support, its support and the extracted vertices",
            files: || {
                vec![
                    ("ten_vertex.matrix".into(), io::write_matrix(&data::ten_vertex_matrix())),
                    ("ten_vertex.support".into(), support_of(&data::ten_vertex_matrix())),
                    ("ten_vertex_polytope.matrix".into(), io::write_matrix(&data::ten_vertex_polytope_transposed())),
                ]
            },
        },
        Example {
            name: "four-cycle",
            description: "4-cycle slack support with no rank-3 self-dual realization",
            files: || vec![("four_cycle.support".into(), io::write_support(&data::cycle_support(4)))],
        },
        Example {
            name: "square",
            description: "cone over a square (not self-dual)",
            files: || vec![("square.cone".into(), cone_file(data::square_rays()))],
        },
        Example {
            name: "orthant",
            description: "nonnegative orthant in R^3",
            files: || {
                let rays = (0..3).map(|i| (0..3).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
                vec![("orthant.cone".into(), cone_file(rays))]
            },
        },
    ]
}

pub fn cmd_examples(args: &ExamplesArgs, out: &mut impl Write) -> Result<(), CliError> {
    let all = examples();
    let stdout_err = |source| CliError::Io { path: "<stdout>".into(), source };
    let Some(name) = &args.name else {
        for e in &all {
            writeln!(out, "{:<12} {}", e.name, e.description).map_err(stdout_err)?;
        }
        return Ok(());
    };
    let chosen: Vec<&Example> = if name == "all" { all.iter().collect() } else { all.iter().filter(|e| e.name == name).collect() };
    if chosen.is_empty() {
        let names: Vec<&str> = all.iter().map(|e| e.name).collect();
        return Err(CliError::Precondition(format!("unknown example '{name}' (known: {})", names.join(", "))));
    }
    let dir = args.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    ensure_dir(&dir)?;
    for e in chosen {
        for (file, contents) in (e.files)() {
            let path = dir.join(file);
            write_file(&path, &contents)?;
            writeln!(out, "{}", path.display()).map_err(stdout_err)?;
        }
    }
    Ok(())
}

/// Dispatches a parsed command line. Returns the process exit code.
pub fn run(cli: Cli, out: &mut impl Write, err: &mut impl Write) -> u8 {
    let (args, f): (&BatchArgs, CommandFn) = match &cli.command {
        Command::Slack(a) => (a, cmd_slack),
        Command::Dual(a) => (a, cmd_dual),
        Command::Analyze(a) => (a, cmd_analyze),
        Command::Verify(a) => (a, cmd_verify),
        Command::Search(a) => (a, cmd_search),
        Command::Examples(a) => {
            return match cmd_examples(a, out) {
                Ok(()) => exit::OK,
                Err(e) => {
                    let _ = writeln!(err, "selfdual: {e}");
                    e.exit_code()
                }
            };
        }
    };
    let results = run_batch(&args.inputs, &args.common, f);
    emit(&args.inputs, results, args.common.out_dir.as_deref(), out, err)
}
