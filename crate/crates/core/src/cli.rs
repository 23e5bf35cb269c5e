//! Command-line front end.
//!
//! Exit codes: 0 success, 2 validation failure, 3 numerical failure (a JSON
//! diagnostic goes to stderr), 64 usage or input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::ensembles::{sample_matrix, EnsembleKind, EnsembleSpec, SamplingMethod};
use crate::error::{Error, Result};
use crate::freeprob::subordination_density;
use crate::io::{csv_row, parse_grid, read_numeric_csv};
use crate::kernels::{
    gue_gap_probability, kernel_eval, tw2_fredholm, tw_pvalue, FredholmConfig, KernelKind, Tw1Variant, TwMethod, TwTable,
};
use crate::numerics::{HermitianMatrix, RngStream, SelfAdjoint};
use crate::rmstats::{clean_covariance, efficient_frontier, fit_mp, pca_test, DataMatrix};
use crate::spectral::{law_eval, CdfMode, LawDescriptor, Spectrum};
use crate::validate::{run_criterion, CRITERIA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "rmtkit", version, about = "Random matrix spectra, limit laws and Tracy–Widom statistics")]
struct Cli {
    /// Write the artifact here instead of stdout.
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
    /// Artifact format.
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
    /// Plain-text table (pca-test only).
    Table,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Sample spectra (or one matrix) from an ensemble.
    Sample(SampleArgs),
    /// Semicircle or Marčenko–Pastur pdf/cdf on a grid.
    Law(LawArgs),
    /// Density of semicircle ⊞ ((1−ε)δ₀ + εδ_Λ).
    Freeconv(FreeconvArgs),
    /// Sine or Airy kernel values.
    Kernel(KernelArgs),
    /// Tracy–Widom table or p-value.
    Tw(TwArgs),
    /// Probability of no eigenvalue above a: finite-n GUE or the Airy limit.
    Gap(GapArgs),
    /// Sequential TW test of a data matrix.
    PcaTest(PcaArgs),
    /// Replace the noise band of a covariance matrix by its mean.
    Denoise(DenoiseArgs),
    /// Markowitz efficient frontier.
    Frontier(FrontierArgs),
    /// Run the acceptance criteria.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum EnsembleArg {
    Goe,
    Gue,
    WishartReal,
    WishartComplex,
}

impl From<EnsembleArg> for EnsembleKind {
    fn from(e: EnsembleArg) -> Self {
        match e {
            EnsembleArg::Goe => EnsembleKind::Goe,
            EnsembleArg::Gue => EnsembleKind::Gue,
            EnsembleArg::WishartReal => EnsembleKind::WishartReal,
            EnsembleArg::WishartComplex => EnsembleKind::WishartComplex,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum MethodArg {
    Dense,
    Tridiagonal,
}

#[derive(Args, Debug, Serialize)]
struct SampleArgs {
    #[arg(long, value_enum)]
    ensemble: EnsembleArg,
    /// Matrix order (GOE/GUE) or number of observations (Wishart).
    #[arg(short = 'n', long = "n")]
    n: usize,
    /// Dimension (Wishart only).
    #[arg(short = 'p', long = "p")]
    p: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, value_enum, default_value = "dense")]
    method: MethodArg,
    /// Covariance spike strengths Λ (Wishart), repeatable.
    #[arg(long = "spike")]
    spikes: Vec<f64>,
    /// Additive spike Λ (GOE/GUE).
    #[arg(long)]
    additive_lambda: Option<f64>,
    #[arg(long, default_value_t = 1)]
    additive_rank: usize,
    /// Emit the sampled matrix instead of its spectrum (count must be 1).
    #[arg(long)]
    matrix: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum LawArg {
    Semicircle,
    Mp,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ModeArg {
    Pdf,
    Cdf,
}

#[derive(Args, Debug, Serialize)]
struct LawArgs {
    #[arg(long, value_enum)]
    law: LawArg,
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    grid: String,
    #[arg(long, value_enum, default_value = "pdf")]
    mode: ModeArg,
    /// Spectrum CSV (one row of eigenvalues); adds an empirical CDF column.
    #[arg(long)]
    empirical: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct FreeconvArgs {
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    grid: String,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum KernelArg {
    Sine,
    Airy,
}

#[derive(Args, Debug, Serialize)]
struct KernelArgs {
    #[arg(long, value_enum)]
    kind: KernelArg,
    #[arg(long)]
    x: String,
    /// Second-argument grid; defaults to the diagonal.
    #[arg(long)]
    y: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum TwMethodArg {
    Fredholm,
    Painleve,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum VariantArg {
    Bare,
    SqrtTw2,
}

#[derive(Args, Debug, Serialize)]
struct TwArgs {
    #[arg(long)]
    beta: u8,
    #[arg(long, default_value = "-12:8:0.05")]
    grid: String,
    #[arg(long, value_enum, default_value = "painleve")]
    method: TwMethodArg,
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Return 1 − TW_β(statistic) instead of the table.
    #[arg(long, allow_hyphen_values = true)]
    pvalue: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
struct GapArgs {
    /// Finite GUE order; omit for the Airy (TW₂) limit.
    #[arg(short = 'n', long = "n")]
    n: Option<usize>,
    #[arg(long)]
    grid: String,
    #[arg(long, default_value_t = 40)]
    nodes: usize,
}

#[derive(Args, Debug, Serialize)]
struct PcaArgs {
    /// Data CSV, observations in rows, optional header.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
}

#[derive(Args, Debug, Serialize)]
struct DenoiseArgs {
    /// Headerless symmetric covariance CSV.
    #[arg(long)]
    cov: PathBuf,
    /// Noise band as start:end indices of the descending spectrum.
    #[arg(long, conflicts_with = "observations")]
    band: Option<String>,
    /// Number of observations behind the covariance; the band comes from an MP fit.
    #[arg(long)]
    observations: Option<usize>,
    #[arg(long, default_value_t = 0)]
    exclude_top: usize,
}

#[derive(Args, Debug, Serialize)]
struct FrontierArgs {
    #[arg(long)]
    cov: PathBuf,
    /// Expected excess returns, one CSV row.
    #[arg(long)]
    returns: PathBuf,
    /// Excess-return grid start:stop:step.
    #[arg(long)]
    grid: String,
}

#[derive(Args, Debug, Serialize)]
struct ValidateArgs {
    /// Subset of criteria, e.g. `--criteria 1,4,5`.
    #[arg(long, value_delimiter = ',')]
    criteria: Vec<usize>,
}

/// Versioned wrapper around every JSON artifact. Wall time is kept outside
/// the payload so the payload is reproducible.
#[derive(Debug, Serialize)]
pub struct ReportEnvelope<T: Serialize> {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    pub config_hash: String,
    pub wall_time_seconds: f64,
    pub payload: T,
}

enum Artifact {
    Text(String),
    Json(serde_json::Value),
}

struct Outcome {
    artifact: Artifact,
    exit: i32,
}

impl Outcome {
    fn text(s: String) -> Self {
        Outcome { artifact: Artifact::Text(s), exit: EXIT_OK }
    }

    fn json(v: serde_json::Value) -> Self {
        Outcome { artifact: Artifact::Json(v), exit: EXIT_OK }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("RMT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        // a pool may already exist when run() is called twice in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Runs the CLI on `argv` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    configure_threads();
    let echo: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let start = Instant::now();
    let result = dispatch(&cli);
    match result {
        Ok(outcome) => {
            let text = match outcome.artifact {
                Artifact::Text(s) => s,
                Artifact::Json(payload) => {
                    let env = ReportEnvelope {
                        schema_version: SCHEMA_VERSION,
                        tool: "rmtkit",
                        version: env!("CARGO_PKG_VERSION"),
                        command: echo,
                        config_hash: config_hash(&cli.command),
                        wall_time_seconds: start.elapsed().as_secs_f64(),
                        payload,
                    };
                    match serde_json::to_string_pretty(&env) {
                        Ok(s) => s + "\n",
                        Err(e) => return fail(&Error::from(e)),
                    }
                }
            };
            if let Err(e) = emit(cli.output.as_ref(), &text) {
                return fail(&e);
            }
            outcome.exit
        }
        Err(e) => fail(&e),
    }
}

fn config_hash(cmd: &Command) -> String {
    let bytes = serde_json::to_vec(cmd).unwrap_or_default();
    format!("{:x}", Sha256::digest(bytes))
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn fail(e: &Error) -> i32 {
    match e {
        Error::Numerical { message, estimate } => {
            let diag = json!({ "error": "numerical", "message": message, "estimate": estimate });
            eprintln!("{diag}");
            EXIT_NUMERICAL
        }
        Error::Solver(message) => {
            eprintln!("{}", json!({ "error": "solver", "message": message }));
            EXIT_NUMERICAL
        }
        other => {
            eprintln!("rmtkit: {other}");
            EXIT_USAGE
        }
    }
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn wants_json(cli: &Cli, default_json: bool) -> bool {
    match cli.format {
        Some(Format::Json) => true,
        Some(_) => false,
        None => default_json,
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Sample(a) => sample(cli, a),
        Command::Law(a) => law(cli, a),
        Command::Freeconv(a) => freeconv(cli, a),
        Command::Kernel(a) => kernel(cli, a),
        Command::Tw(a) => tw(cli, a),
        Command::Gap(a) => gap(cli, a),
        Command::PcaTest(a) => pca(cli, a),
        Command::Denoise(a) => denoise(cli, a),
        Command::Frontier(a) => frontier(cli, a),
        Command::Validate(a) => validate(a),
    }
}

fn sample(cli: &Cli, a: &SampleArgs) -> Result<Outcome> {
    let kind: EnsembleKind = a.ensemble.into();
    let stream = RngStream::new(a.seed, 0);
    let mut spec = if kind.is_wishart() {
        let p = a.p.ok_or_else(|| Error::input("Wishart sampling needs -p"))?;
        EnsembleSpec::wishart(kind == EnsembleKind::WishartComplex, a.n, p, a.sigma2, stream).with_spikes(a.spikes.clone())
    } else {
        if a.p.is_some() || !a.spikes.is_empty() {
            return Err(Error::input("-p and --spike apply to Wishart ensembles only"));
        }
        EnsembleSpec::gaussian(kind, a.n, a.sigma2, stream)
    };
    if let Some(l) = a.additive_lambda {
        spec = spec.with_additive_spike(l, a.additive_rank);
    }
    if a.matrix {
        if a.count != 1 {
            return Err(Error::input("--matrix emits a single sample; use --count 1"));
        }
        let m = sample_matrix(&spec)?;
        return Ok(Outcome::text(matrix_csv(&m)));
    }
    let method = match a.method {
        MethodArg::Dense => SamplingMethod::Dense,
        MethodArg::Tridiagonal => SamplingMethod::Tridiagonal,
    };
    let batch = crate::ensembles::sample_batch(&spec, a.count, method)?;
    if wants_json(cli, false) {
        return Ok(Outcome::json(json!({ "spec": batch.spec, "method": method, "spectra": batch.spectra })));
    }
    let mut out = String::new();
    for s in &batch.spectra {
        out.push_str(&csv_row(s.values()));
        out.push('\n');
    }
    Ok(Outcome::text(out))
}

/// Row-major matrix CSV; complex entries take two columns `re,im`.
fn matrix_csv(m: &SelfAdjoint) -> String {
    let mut out = String::new();
    match m {
        SelfAdjoint::Real(a) => {
            for i in 0..a.order() {
                out.push_str(&csv_row(a.row(i)));
                out.push('\n');
            }
        }
        SelfAdjoint::Complex(a) => {
            for i in 0..a.order() {
                let parts: Vec<f64> = a.row(i).iter().flat_map(|z| [z.re, z.im]).collect();
                out.push_str(&csv_row(&parts));
                out.push('\n');
            }
        }
    }
    out
}

fn law(cli: &Cli, a: &LawArgs) -> Result<Outcome> {
    let law = match a.law {
        LawArg::Semicircle => LawDescriptor::semicircle(a.sigma2)?,
        LawArg::Mp => LawDescriptor::marchenko_pastur(a.sigma2, a.gamma.ok_or_else(|| Error::input("mp needs --gamma"))?)?,
    };
    let mode = match a.mode {
        ModeArg::Pdf => CdfMode::Pdf,
        ModeArg::Cdf => CdfMode::Cdf,
    };
    let grid = parse_grid(&a.grid)?;
    let empirical = match &a.empirical {
        Some(p) => {
            let (_, _, v) = read_numeric_csv(&read(p)?)?;
            Some(Spectrum::new(v)?.ascending())
        }
        None => None,
    };
    let values: Vec<f64> = grid.iter().map(|&x| law_eval(&law, x, mode)).collect();
    if wants_json(cli, false) {
        return Ok(Outcome::json(json!({ "law": law, "mode": a.mode, "x": grid, "value": values })));
    }
    let mut out = String::from(if empirical.is_some() { "x,empirical,law\n" } else { "x,value\n" });
    for (x, v) in grid.iter().zip(&values) {
        match &empirical {
            Some(e) => {
                let f = e.partition_point(|&t| t <= *x) as f64 / e.len() as f64;
                out.push_str(&csv_row(&[*x, f, law.cdf(*x)]));
            }
            None => out.push_str(&csv_row(&[*x, *v])),
        }
        out.push('\n');
    }
    Ok(Outcome::text(out))
}

fn freeconv(cli: &Cli, a: &FreeconvArgs) -> Result<Outcome> {
    let grid = parse_grid(&a.grid)?;
    let r = subordination_density(a.sigma2, a.eps, a.lambda, &grid)?;
    if wants_json(cli, false) {
        return Ok(Outcome::json(json!({
            "x": r.x, "density": r.density, "total_mass": r.total_mass,
            "components": r.components, "detected_atoms": r.detected_atoms,
        })));
    }
    let mut out = String::from("x,density\n");
    for (x, d) in r.x.iter().zip(&r.density) {
        out.push_str(&csv_row(&[*x, *d]));
        out.push('\n');
    }
    Ok(Outcome::text(out))
}

fn kernel(cli: &Cli, a: &KernelArgs) -> Result<Outcome> {
    let kind = match a.kind {
        KernelArg::Sine => KernelKind::Sine,
        KernelArg::Airy => KernelKind::Airy,
    };
    let xs = parse_grid(&a.x)?;
    let pairs: Vec<(f64, f64)> = match &a.y {
        Some(y) => {
            let ys = parse_grid(y)?;
            xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect()
        }
        None => xs.iter().map(|&x| (x, x)).collect(),
    };
    let values = pairs.iter().map(|&(x, y)| kernel_eval(kind, x, y)).collect::<Result<Vec<f64>>>()?;
    if wants_json(cli, false) {
        return Ok(Outcome::json(json!({ "kind": kind, "pairs": pairs, "value": values })));
    }
    let mut out = String::from("x,y,value\n");
    for ((x, y), v) in pairs.iter().zip(&values) {
        out.push_str(&csv_row(&[*x, *y, *v]));
        out.push('\n');
    }
    Ok(Outcome::text(out))
}

fn tw(cli: &Cli, a: &TwArgs) -> Result<Outcome> {
    let method = match a.method {
        TwMethodArg::Fredholm => TwMethod::Fredholm,
        TwMethodArg::Painleve => TwMethod::Painleve,
    };
    let variant = match a.variant {
        Some(VariantArg::Bare) => Tw1Variant::Bare,
        Some(VariantArg::SqrtTw2) => Tw1Variant::SqrtTw2,
        None => Tw1Variant::default(),
    };
    let grid = parse_grid(&a.grid)?;
    let step = if grid.len() > 1 { grid[1] - grid[0] } else { 1.0 };
    let stop = *grid.last().unwrap_or(&grid[0]);
    if grid.len() < 2 {
        return Err(Error::input("table grid needs at least two points"));
    }
    let table = TwTable::build(a.beta, method, variant, grid[0], stop, step)?;
    if let Some(stat) = a.pvalue {
        let p = tw_pvalue(&table, stat);
        return Ok(Outcome::json(json!({ "beta": a.beta, "statistic": stat, "p_value": p.value, "clamped": p.clamped })));
    }
    if wants_json(cli, false) {
        return Ok(Outcome::json(serde_json::to_value(&table)?));
    }
    Ok(Outcome::text(table.to_csv()?))
}

fn gap(cli: &Cli, a: &GapArgs) -> Result<Outcome> {
    let grid = parse_grid(&a.grid)?;
    let cfg = FredholmConfig { nodes: a.nodes, ..Default::default() };
    let values = grid
        .iter()
        .map(|&s| match a.n {
            Some(n) => gue_gap_probability(n, s, &cfg).map(|v| v.value),
            None => tw2_fredholm(s, &cfg),
        })
        .collect::<Result<Vec<f64>>>()?;
    if wants_json(cli, false) {
        return Ok(Outcome::json(json!({ "n": a.n, "a": grid, "probability": values })));
    }
    let mut out = String::from("a,probability\n");
    for (x, v) in grid.iter().zip(&values) {
        out.push_str(&csv_row(&[*x, *v]));
        out.push('\n');
    }
    Ok(Outcome::text(out))
}

fn pca(cli: &Cli, a: &PcaArgs) -> Result<Outcome> {
    let data = DataMatrix::from_csv(&read(&a.data)?)?;
    let report = pca_test(&data, a.alpha)?;
    if cli.format == Some(Format::Table) {
        return Ok(Outcome::text(report.render_table()));
    }
    Ok(Outcome::json(serde_json::to_value(&report)?))
}

fn read_square(path: &PathBuf) -> Result<HermitianMatrix<f64>> {
    let (r, c, v) = read_numeric_csv(&read(path)?)?;
    if r != c || r == 0 {
        return Err(Error::input(format!("{}: expected a square matrix, got {r}×{c}", path.display())));
    }
    let m = HermitianMatrix::from_dense(r, v)?;
    Ok(m)
}

fn denoise(cli: &Cli, a: &DenoiseArgs) -> Result<Outcome> {
    let m = read_square(&a.cov)?;
    let p = m.order();
    let band = match (&a.band, a.observations) {
        (Some(b), _) => {
            let (s, e) = b.split_once(':').ok_or_else(|| Error::Parse(format!("band `{b}` is not start:end")))?;
            let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| Error::Parse(format!("band `{b}`: {e}")));
            parse(s)?..parse(e)?
        }
        (None, Some(n)) => {
            let spectrum = Spectrum::new(crate::numerics::eigenvalues(&m)?)?;
            fit_mp(&spectrum, n as f64 / p as f64, a.exclude_top)?.noise_band
        }
        (None, None) => return Err(Error::input("denoise needs --band or --observations")),
    };
    let cleaned = clean_covariance(&m, band.clone())?;
    if wants_json(cli, false) {
        let rows: Vec<Vec<f64>> = (0..p).map(|i| cleaned.row(i).to_vec()).collect();
        return Ok(Outcome::json(json!({ "band": [band.start, band.end], "matrix": rows })));
    }
    Ok(Outcome::text(matrix_csv(&SelfAdjoint::Real(cleaned))))
}

fn frontier(cli: &Cli, a: &FrontierArgs) -> Result<Outcome> {
    let m = read_square(&a.cov)?;
    let (_, _, returns) = read_numeric_csv(&read(&a.returns)?)?;
    let grid = parse_grid(&a.grid)?;
    let f = efficient_frontier(&m, &returns, &grid)?;
    if wants_json(cli, false) {
        return Ok(Outcome::json(serde_json::to_value(&f)?));
    }
    let mut out = String::from("excess,risk");
    for i in 0..m.order() {
        out.push_str(&format!(",w{i}"));
    }
    out.push('\n');
    for r in &f {
        let mut row = vec![r.excess, r.risk];
        row.extend(&r.weights);
        out.push_str(&csv_row(&row));
        out.push('\n');
    }
    Ok(Outcome::text(out))
}

fn validate(a: &ValidateArgs) -> Result<Outcome> {
    let ids: Vec<usize> = if a.criteria.is_empty() { (1..=CRITERIA).collect() } else { a.criteria.clone() };
    if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > CRITERIA) {
        return Err(Error::input(format!("no criterion {bad}; valid ids are 1..={CRITERIA}")));
    }
    let mut results = Vec::new();
    for id in ids {
        let r = run_criterion(id);
        eprintln!("{}", r.line());
        results.push(r);
    }
    let all = results.iter().all(|r| r.passed);
    Ok(Outcome {
        artifact: Artifact::Json(json!({ "passed": all, "criteria": results })),
        exit: if all { EXIT_OK } else { EXIT_VALIDATION },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("rmtkit").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn config_hash_ignores_output_path() {
        let a = parse(&["tw", "--beta", "2", "-o", "/tmp/a.csv"]);
        let b = parse(&["tw", "--beta", "2", "-o", "/tmp/b.csv"]);
        let c = parse(&["tw", "--beta", "1"]);
        assert_eq!(config_hash(&a.command), config_hash(&b.command));
        assert_ne!(config_hash(&a.command), config_hash(&c.command));
    }

    #[test]
    fn usage_errors_map_to_64() {
        assert_eq!(run(["rmtkit", "sample"]), EXIT_USAGE);
        assert_eq!(run(["rmtkit", "tw", "--beta", "2", "--grid", "1:0:0.1"]), EXIT_USAGE);
        assert_eq!(run(["rmtkit", "denoise", "--cov", "/nonexistent"]), EXIT_USAGE);
    }

    #[test]
    fn numerical_errors_map_to_3() {
        assert_eq!(fail(&Error::numerical("x", 0.5)), EXIT_NUMERICAL);
        assert_eq!(fail(&Error::Solver("y".into())), EXIT_NUMERICAL);
        assert_eq!(fail(&Error::Parse("z".into())), EXIT_USAGE);
    }

    #[test]
    fn default_format_is_csv_except_reports() {
        let cli = parse(&["law", "--law", "semicircle", "--grid", "0:1:1"]);
        assert!(!wants_json(&cli, false));
        let cli = parse(&["--format", "json", "law", "--law", "semicircle", "--grid", "0:1:1"]);
        assert!(wants_json(&cli, false));
    }
}
