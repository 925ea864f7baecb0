//! Batch front end: reads operator descriptions, runs the classifiers, the
//! orbit engine and the law registry, and prints JSON reports.

pub mod svg;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use lindyn::composition::{
    classify_composition_entire, classify_composition_h2, classify_composition_hd, classify_composition_interval,
    classify_composition_punctured, classify_lfm, AffineSymbol, DiskSymbol, IntervalSymbol, PuncturedSymbol,
};
use lindyn::io::{parse_json, MatrixFile, VectorFile};
use lindyn::laws::{run_law_with, LawReport, LAWS};
use lindyn::matrix_dynamics::{classify_complex, classify_real, spectrum};
use lindyn::multiplication::{
    adjoint_mult_h2_recurrence, classify_mult_analytic, classify_mult_ck, classify_mult_l2, AnalyticMultiplier,
    AnalyticSpace, ContinuousSymbol, DiscreteMeasureSymbol,
};
use lindyn::orbit::{scan_returns_with, ScanOptions};
use lindyn::sequence::{build_rigidity_sequence, classify_diagonal, classify_shift, truncate, SequenceOperator, ShiftVariant, SpaceTag};
use lindyn::{Angles, Error, Lfm, Matrix, RecurrenceVerdict, Result, Tol, Weights};

pub const EXIT_OK: i32 = 0;
pub const EXIT_LAW_FAILURE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_UNDECIDABLE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "lindyn", version, about = "Recurrence and rigidity of linear operators")]
pub struct Cli {
    #[command(flatten)]
    pub tol: TolArgs,

    /// Exit with status 4 instead of reporting undecidable cases.
    #[arg(long, global = true)]
    pub strict: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct TolArgs {
    #[arg(long, global = true, env = "LINDYN_TOL_UNIMODULAR")]
    pub tol_unimodular: Option<f64>,
    #[arg(long, global = true, env = "LINDYN_TOL_RETURN")]
    pub tol_return: Option<f64>,
    #[arg(long, global = true, env = "LINDYN_TOL_RANK")]
    pub tol_rank: Option<f64>,
    #[arg(long, global = true, env = "LINDYN_MAX_DENOMINATOR")]
    pub max_denominator: Option<u64>,
}

impl TolArgs {
    pub fn resolve(&self) -> Result<Tol> {
        let d = Tol::default();
        let tol = Tol {
            unimodular_eps: self.tol_unimodular.unwrap_or(d.unimodular_eps),
            return_eps: self.tol_return.unwrap_or(d.return_eps),
            rank_eps: self.tol_rank.unwrap_or(d.rank_eps),
            max_denominator: self.max_denominator.unwrap_or(d.max_denominator),
        };
        tol.validate()?;
        Ok(tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LfmSpace {
    Hd,
    H2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SymbolSpace {
    /// H(𝔻), LFM or asserted general symbol
    Hd,
    /// H(ℂ), affine symbol
    Entire,
    /// H(ℂ*), `a z` or `a / z`
    Punctured,
    /// C([0,1])
    Interval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    #[value(name = "b_w")]
    Bw,
    #[value(name = "i_plus_b_w")]
    IPlusBw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a complex (or, with --real, real) matrix.
    ClassifyMatrix {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        real: bool,
    },
    /// Classify the composition operator of a linear fractional self-map of the disk.
    ClassifyLfm {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "h2")]
        space: LfmSpace,
    },
    /// Classify a composition operator given by its symbol.
    ClassifySymbol {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        space: SymbolSpace,
    },
    /// Classify a diagonal operator on c0, lp or l_inf.
    ClassifyDiagonal {
        #[arg(long)]
        input: PathBuf,
        /// c0, linf, l2 or lp:<p>
        #[arg(long)]
        space: String,
    },
    /// Classify a weighted backward shift B_w or I + B_w.
    ClassifyShift {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        space: String,
        #[arg(long, value_enum, default_value = "b_w")]
        variant: Variant,
    },
    /// Classify a multiplication operator.
    ClassifyMult {
        #[arg(long)]
        input: PathBuf,
        /// l2, ck, hardy:<p>, bergman:<p>, dirichlet, bloch or adjoint-h2
        #[arg(long)]
        space: String,
    },
    /// Build a certified rigidity sequence for a list of angles.
    RigiditySeq {
        #[arg(long)]
        angles: PathBuf,
        #[arg(long, default_value_t = 5)]
        count: usize,
        /// Directory for rigidity.csv
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan ‖T^n x - x‖ along an orbit.
    Orbit {
        #[arg(long)]
        operator: PathBuf,
        #[arg(long)]
        vector: PathBuf,
        #[arg(long, default_value_t = 1000)]
        horizon: u64,
        /// Return threshold; defaults to the return tolerance.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, value_enum, default_value = "json")]
        emit: Emit,
        /// Directory for orbit.csv / orbit.svg; without it the artifact goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized structural laws.
    Laws {
        #[command(subcommand)]
        action: LawsAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum LawsAction {
    /// List registered laws.
    List,
    /// Run one law, or all of them with `--id all`.
    Run {
        #[arg(long)]
        id: String,
        #[arg(long, default_value_t = 100)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// What a run produced: bytes for stdout, a summary line for stderr and the
/// exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

#[derive(Serialize)]
struct Provenance<'a> {
    input_sha256: String,
    tolerances: &'a Tol,
    version: &'static str,
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'static str,
    parameters: Value,
    result: Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    fragile: Vec<String>,
    provenance: Provenance<'a>,
}

struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    fn new() -> Self {
        Self { hasher: Sha256::new() }
    }

    fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = std::fs::read(path).map_err(|e| Error::IoFailure(format!("{}: {e}", path.display())))?;
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(&bytes);
        String::from_utf8(bytes).map_err(|_| Error::InvalidInput(format!("{} is not UTF-8", path.display())))
    }

    fn note(&mut self, text: &str) {
        self.hasher.update((text.len() as u64).to_le_bytes());
        self.hasher.update(text.as_bytes());
    }

    fn digest(self) -> String {
        hex::encode(self.hasher.finalize())
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ConvergenceFailure { .. }
        | Error::BudgetExhausted { .. }
        | Error::CertificationFailure(_)
        | Error::InconsistentVerdicts(_) => EXIT_NUMERICAL,
        Error::Undecidable(_) | Error::UnresolvedCriterion(_) => EXIT_UNDECIDABLE,
        _ => EXIT_INVALID,
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn verdict_value(v: &RecurrenceVerdict) -> (Value, Vec<String>) {
    (json!({ "verdict": v }), v.fragile.clone())
}

fn summary_of(v: &RecurrenceVerdict) -> String {
    let why = v
        .violated_condition()
        .map(|c| format!(": {c}"))
        .or_else(|| v.witness().map(|w| format!(" (witness {w:?})")))
        .unwrap_or_default();
    format!("{}{why}", v.level)
}

/// Either a finished result or an undecidable case that is reported as such
/// unless `--strict` is set.
enum Body {
    Done { result: Value, fragile: Vec<String>, summary: String },
    Artifact { bytes: String, summary: String },
}

fn undecidable_or<T>(r: Result<T>) -> Result<std::result::Result<T, String>> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(Error::Undecidable(s)) | Err(Error::UnresolvedCriterion(s)) => Ok(Err(s)),
        Err(e) => Err(e),
    }
}

fn verdict_body(r: Result<RecurrenceVerdict>) -> Result<Body> {
    Ok(match undecidable_or(r)? {
        Ok(v) => {
            let (result, fragile) = verdict_value(&v);
            Body::Done { result, fragile, summary: summary_of(&v) }
        }
        Err(reason) => undecided(reason),
    })
}

fn undecided(reason: String) -> Body {
    Body::Done { result: json!({ "undecidable": reason }), fragile: Vec::new(), summary: format!("undecidable: {reason}") }
}

fn load_operator(text: &str) -> Result<Matrix> {
    let v: Value = parse_json(text)?;
    if v.get("entries").is_some() {
        return serde_json::from_value::<MatrixFile>(v)
            .map_err(|e| Error::InvalidInput(format!("malformed matrix: {e}")))?
            .to_matrix();
    }
    let dim = v
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::InvalidInput("operator needs `entries` or a truncation `dim`".into()))?;
    let op: SequenceOperator<f64> =
        serde_json::from_value(v).map_err(|e| Error::InvalidInput(format!("malformed operator: {e}")))?;
    truncate(&op, dim as usize)
}

fn load_angles(text: &str) -> Result<Angles> {
    let v: Value = parse_json(text)?;
    if let Some(arr) = v.as_array() {
        let angles = arr
            .iter()
            .map(|x| x.as_f64().ok_or_else(|| Error::InvalidInput("angles must be numbers".into())))
            .collect::<Result<Vec<f64>>>()?;
        return Ok(Angles::FiniteList { angles, moduli: None });
    }
    serde_json::from_value(v).map_err(|e| Error::InvalidInput(format!("malformed angle sequence: {e}")))
}

fn write_artifact(dir: &Path, name: &str, bytes: &str) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::IoFailure(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, bytes).map_err(|e| Error::IoFailure(format!("{}: {e}", path.display())))
}

fn dispatch(cmd: &Command, tol: &Tol, inputs: &mut Inputs) -> Result<(Body, Value)> {
    let path_str = |p: &Path| p.display().to_string();
    match cmd {
        Command::ClassifyMatrix { input, real } => {
            let t = parse_json::<MatrixFile>(&inputs.read(input)?)?.to_matrix()?;
            let params = json!({ "input": path_str(input), "real": real });
            let v = if *real { classify_real(&t, tol)? } else { classify_complex(&t, tol)? };
            let s = spectrum(&t, tol)?;
            let mut fragile = v.fragile.clone();
            for f in &s.fragile {
                if !fragile.contains(f) {
                    fragile.push(f.clone());
                }
            }
            let summary = summary_of(&v);
            Ok((Body::Done { result: json!({ "verdict": v, "spectrum": s }), fragile, summary }, params))
        }
        Command::ClassifyLfm { input, space } => {
            let phi: Lfm = parse_json(&inputs.read(input)?)?;
            let params = json!({ "input": path_str(input), "space": format!("{space:?}").to_lowercase() });
            let taxon = classify_lfm(&phi, tol)?;
            let v = match space {
                LfmSpace::Hd => classify_composition_hd(&DiskSymbol::Lfm(phi), tol)?,
                LfmSpace::H2 => classify_composition_h2(&phi, tol)?,
            };
            let summary = format!("{} ({})", summary_of(&v), taxon.taxon.name());
            let fragile = v.fragile.clone();
            Ok((Body::Done { result: json!({ "taxon": taxon, "verdict": v }), fragile, summary }, params))
        }
        Command::ClassifySymbol { input, space } => {
            let text = inputs.read(input)?;
            let params = json!({ "input": path_str(input), "space": format!("{space:?}").to_lowercase() });
            let v = match space {
                SymbolSpace::Hd => classify_composition_hd(&parse_json::<DiskSymbol<f64>>(&text)?, tol),
                SymbolSpace::Entire => classify_composition_entire(&parse_json::<AffineSymbol<f64>>(&text)?, tol),
                SymbolSpace::Punctured => classify_composition_punctured(&parse_json::<PuncturedSymbol<f64>>(&text)?, tol),
                SymbolSpace::Interval => classify_composition_interval(&parse_json::<IntervalSymbol<f64>>(&text)?, tol),
            };
            Ok((verdict_body(v)?, params))
        }
        Command::ClassifyDiagonal { input, space } => {
            let seq = load_angles(&inputs.read(input)?)?;
            let sp = SpaceTag::<f64>::parse(space)?;
            let params = json!({ "input": path_str(input), "space": space });
            Ok((verdict_body(classify_diagonal(&seq, &sp, tol))?, params))
        }
        Command::ClassifyShift { input, space, variant } => {
            let w: Weights = parse_json(&inputs.read(input)?)?;
            let sp = SpaceTag::<f64>::parse(space)?;
            let var = match variant {
                Variant::Bw => ShiftVariant::Bw,
                Variant::IPlusBw => ShiftVariant::IPlusBw,
            };
            let params = json!({ "input": path_str(input), "space": space, "variant": var });
            Ok((verdict_body(classify_shift(&w, &sp, var, tol))?, params))
        }
        Command::ClassifyMult { input, space } => {
            let text = inputs.read(input)?;
            let params = json!({ "input": path_str(input), "space": space });
            let v = match space.trim().to_ascii_lowercase().as_str() {
                "l2" => classify_mult_l2(&parse_json::<DiscreteMeasureSymbol<f64>>(&text)?, tol),
                "ck" => classify_mult_ck(&parse_json::<ContinuousSymbol<f64>>(&text)?, tol),
                "adjoint-h2" => adjoint_mult_h2_recurrence(&parse_json::<AnalyticMultiplier<f64>>(&text)?, tol),
                other => {
                    let sp = AnalyticSpace::<f64>::parse(other)?;
                    classify_mult_analytic(&parse_json::<AnalyticMultiplier<f64>>(&text)?, &sp, tol)
                }
            };
            Ok((verdict_body(v)?, params))
        }
        Command::RigiditySeq { angles, count, out } => {
            let seq = load_angles(&inputs.read(angles)?)?;
            inputs.note(&count.to_string());
            let params = json!({ "angles": path_str(angles), "count": count });
            let r = match undecidable_or(build_rigidity_sequence(&seq, *count, tol))? {
                Ok(r) => r,
                Err(reason) => return Ok((undecided(reason), params)),
            };
            if let Some(dir) = out {
                write_artifact(dir, "rigidity.csv", &r.to_csv())?;
            }
            let summary = format!("rigidity sequence {:?}", r.terms);
            Ok((Body::Done { result: json!({ "sequence": r }), fragile: Vec::new(), summary }, params))
        }
        Command::Orbit { operator, vector, horizon, eps, emit, out } => {
            let t = load_operator(&inputs.read(operator)?)?;
            let x = parse_json::<VectorFile>(&inputs.read(vector)?)?.to_vector()?;
            let eps = eps.unwrap_or(tol.return_eps);
            inputs.note(&format!("{horizon} {eps:e}"));
            if x.len() != t.dim() {
                return Err(Error::InvalidInput(format!("vector has {} entries, operator dimension is {}", x.len(), t.dim())));
            }
            let emit_name = format!("{emit:?}").to_lowercase();
            let params = json!({
                "operator": path_str(operator), "vector": path_str(vector),
                "horizon": horizon, "eps": eps, "emit": emit_name,
            });
            let name = vector.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "x".into());
            let rec = scan_returns_with(&t, &x, &name, &ScanOptions::new(*horizon, eps))?;
            let summary = format!(
                "{} returns within {} steps{}",
                rec.eps_return_times.len(),
                rec.samples.len(),
                if rec.overflow { ", growth guard hit" } else { "" }
            );
            let artifact = match emit {
                Emit::Json => None,
                Emit::Csv => Some(("orbit.csv", rec.to_csv())),
                Emit::Svg => Some(("orbit.svg", svg::render_svg(&rec)?)),
            };
            match (artifact, out) {
                (Some((_, bytes)), None) => Ok((Body::Artifact { bytes, summary }, params)),
                (artifact, out) => {
                    if let (Some((file, bytes)), Some(dir)) = (&artifact, out) {
                        write_artifact(dir, file, bytes)?;
                    }
                    let result = json!({ "record": rec, "artifact": artifact.map(|a| a.0) });
                    Ok((Body::Done { result, fragile: Vec::new(), summary }, params))
                }
            }
        }
        Command::Laws { action } => match action {
            LawsAction::List => {
                let list: Vec<Value> = LAWS.iter().map(|(id, s)| json!({ "law_id": id, "statement": s })).collect();
                inputs.note("laws list");
                let summary = format!("{} laws", list.len());
                Ok((Body::Done { result: Value::Array(list), fragile: Vec::new(), summary }, json!({})))
            }
            LawsAction::Run { id, budget, seed } => {
                inputs.note(&format!("{id} {budget} {seed}"));
                let params = json!({ "id": id, "budget": budget, "seed": seed });
                let ids: Vec<&str> = if id == "all" { LAWS.iter().map(|l| l.0).collect() } else { vec![id.as_str()] };
                let reports: Vec<LawReport> = ids.iter().map(|i| run_law_with(i, *budget, *seed, tol)).collect::<Result<_>>()?;
                let failed: usize = reports.iter().map(|r| r.failures.len()).sum();
                let summary = format!("{} law(s), {failed} failure(s)", reports.len());
                Ok((Body::Done { result: to_value(&reports), fragile: Vec::new(), summary }, params))
            }
        },
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::ClassifyMatrix { .. } => "classify-matrix",
        Command::ClassifyLfm { .. } => "classify-lfm",
        Command::ClassifySymbol { .. } => "classify-symbol",
        Command::ClassifyDiagonal { .. } => "classify-diagonal",
        Command::ClassifyShift { .. } => "classify-shift",
        Command::ClassifyMult { .. } => "classify-mult",
        Command::RigiditySeq { .. } => "rigidity-seq",
        Command::Orbit { .. } => "orbit",
        Command::Laws { .. } => "laws",
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let fail = |e: Error| Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), code: exit_code(&e) };
    let tol = match cli.tol.resolve() {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    let mut inputs = Inputs::new();
    let (body, parameters) = match dispatch(&cli.command, &tol, &mut inputs) {
        Ok(b) => b,
        Err(e) => return fail(e),
    };
    match body {
        Body::Artifact { bytes, summary } => Outcome { stdout: bytes, stderr: format!("{summary}\n"), code: EXIT_OK },
        Body::Done { result, fragile, summary } => {
            if cli.strict && result.get("undecidable").is_some() {
                return Outcome { stdout: String::new(), stderr: format!("{summary}\n"), code: EXIT_UNDECIDABLE };
            }
            let law_failure = matches!(cli.command, Command::Laws { action: LawsAction::Run { .. } })
                && result.as_array().is_some_and(|a| a.iter().any(|r| r["failures"].as_array().is_some_and(|f| !f.is_empty())));
            let report = Report {
                command: command_name(&cli.command),
                parameters,
                result,
                fragile,
                provenance: Provenance { input_sha256: inputs.digest(), tolerances: &tol, version: env!("CARGO_PKG_VERSION") },
            };
            let mut stdout = serde_json::to_string_pretty(&report).expect("report serializes");
            stdout.push('\n');
            let code = if law_failure { EXIT_LAW_FAILURE } else { EXIT_OK };
            Outcome { stdout, stderr: format!("{summary}\n"), code }
        }
    }
}
