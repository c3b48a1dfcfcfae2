//! `linea`: recognize rows of similar buildings in polygon footprints.
//!
//! Exit codes: 0 success, 2 usage, 3 unreadable or malformed input,
//! 4 internal failure. Script files given via `--rules` report parse
//! problems as input errors; failures while running them are internal.

mod config;
mod geojson;
mod svg;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use linea_core::evaluation::scaled_spec;
use linea_core::geometry::FrCombine;
use linea_core::pipeline::RuleScripts;
use linea_core::proximity::{RngMetric, RngOptions};
use linea_core::relations::td_from_scale;
use linea_core::{
    bench_csv_row, benchmark, build_kg, dataset_stats, generate_synthetic, pr_from_counts,
    precision_recall_sets, recognize_linear_patterns, recognize_on_graph, AlignRule,
    CompiledRules, EvalError, GenSpec, MatchCriterion, Method, PipelineError, RecognizeMode,
    RecognizeOptions, Schema, BENCH_CSV_HEADER,
};

use config::Config;

#[derive(Parser)]
#[command(name = "linea", version, about = "Linear building-pattern recognition")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print dataset statistics as JSON
    Stats { input: PathBuf },
    /// Recognize linear patterns and write them as GeoJSON
    Recognize(RecognizeArgs),
    /// Time recognition against the traversal baseline, as CSV
    Bench(BenchArgs),
    /// Score detected patterns against ground truth, as JSON
    Eval(EvalArgs),
    /// Generate a synthetic scene and its ground truth
    Gen(GenArgs),
    /// Rule script utilities
    #[command(subcommand)]
    Rules(RulesCmd),
}

#[derive(Subcommand)]
enum RulesCmd {
    /// Parse-check script files
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct RecognizeArgs {
    input: PathBuf,
    /// Extra roads file; LineStrings in the main input count as roads too
    #[arg(long)]
    roads: Option<PathBuf>,
    /// Output GeoJSON path (default: stdout)
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Also write an SVG overlay of footprints and pattern lines
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Directory of rule scripts overriding the built-in ones
    #[arg(long)]
    rules: Option<PathBuf>,
    /// Note the planar-coordinate requirement on stderr and continue
    #[arg(long)]
    crs_note: bool,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct BenchArgs {
    /// GeoJSON scene to benchmark
    input: Option<PathBuf>,
    /// Generate the scene from a spec file instead
    #[arg(long, conflicts_with = "input")]
    gen: Option<PathBuf>,
    /// Comma-separated building counts; one generated engine row per size
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["input", "gen"])]
    sweep: Vec<usize>,
    /// Seed for generated scenes
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    runs: usize,
    /// Output CSV path (default: stdout)
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct EvalArgs {
    /// GeoJSON written by `recognize`
    detected: Option<PathBuf>,
    /// JSON array of building-id arrays
    truth: Option<PathBuf>,
    /// Score from raw counts instead of files: TP,FP,FN
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["detected", "truth"])]
    counts: Vec<usize>,
    /// Matching criterion: exact | jaccard
    #[arg(long)]
    criterion: Option<String>,
    /// Jaccard overlap floor (implies --criterion jaccard)
    #[arg(long)]
    tau: Option<f64>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct GenArgs {
    /// Generator spec JSON: rows, cols, spacing, jitter, rotation, decoys, seed
    spec: PathBuf,
    /// Scene GeoJSON output
    #[arg(short, long)]
    out: PathBuf,
    /// Ground-truth JSON output
    #[arg(long)]
    truth: PathBuf,
}

/// Command-line counterparts of the config fields. Flags beat the config
/// file, the config file beats the defaults.
#[derive(Args)]
struct Overrides {
    /// JSON config file (default: $LINEA_CONFIG if set)
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// precomputed | attributes
    #[arg(long, value_parser = keyword::<Schema>)]
    schema: Option<Schema>,
    /// direct | engine | engine_strict
    #[arg(long, value_parser = keyword::<RecognizeMode>)]
    mode: Option<RecognizeMode>,
    /// footprint | centroid
    #[arg(long, value_parser = keyword::<RngMetric>)]
    rng_metric: Option<RngMetric>,
    /// max | min
    #[arg(long, value_parser = keyword::<FrCombine>)]
    fr_combine: Option<FrCombine>,
    /// listing | outer_edges
    #[arg(long, value_parser = keyword::<AlignRule>)]
    align_rule: Option<AlignRule>,
    #[arg(long)]
    map_scale: Option<u32>,
    #[arg(long)]
    delta1: Option<f64>,
    #[arg(long)]
    delta2: Option<f64>,
    #[arg(long)]
    delta3: Option<f64>,
    #[arg(long)]
    eta1: Option<f64>,
    #[arg(long)]
    eta2: Option<f64>,
    #[arg(long)]
    eta3: Option<f64>,
    #[arg(long)]
    td: Option<f64>,
}

/// Parses an enum flag through its serialized spelling, so the accepted
/// words match the config file exactly.
fn keyword<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown value: {s}"))
}

impl Overrides {
    fn resolve(&self) -> Result<Config, Failure> {
        let path = self
            .config
            .clone()
            .or_else(|| std::env::var_os("LINEA_CONFIG").map(PathBuf::from));
        let mut cfg = match path {
            Some(p) => Config::load(&p).map_err(Failure::Format)?,
            None => Config::default(),
        };
        if let Some(s) = self.schema {
            cfg.schema = s;
        }
        if let Some(m) = self.mode {
            cfg.mode = m;
        }
        if let Some(m) = self.rng_metric {
            cfg.rng_metric = m;
        }
        if let Some(f) = self.fr_combine {
            cfg.fr_combine = f;
        }
        if let Some(a) = self.align_rule {
            cfg.align_rule = a;
        }
        if let Some(s) = self.map_scale {
            cfg.map_scale = s;
            cfg.thresholds.td = td_from_scale(s as f64);
        }
        let t = &mut cfg.thresholds;
        for (slot, flag) in [
            (&mut t.delta1, self.delta1),
            (&mut t.delta2, self.delta2),
            (&mut t.delta3, self.delta3),
            (&mut t.eta1, self.eta1),
            (&mut t.eta2, self.eta2),
            (&mut t.eta3, self.eta3),
            (&mut t.td, self.td),
        ] {
            if let Some(v) = flag {
                *slot = v;
            }
        }
        cfg.thresholds
            .validate()
            .map_err(|e| Failure::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

enum Failure {
    Usage(String),
    Format(String),
    Internal(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        let (code, msg) = match self {
            Failure::Usage(m) => (2, m),
            Failure::Format(m) => (3, m),
            Failure::Internal(m) => (4, m),
        };
        eprintln!("error: {msg}");
        ExitCode::from(code)
    }
}

fn pipeline_failure(e: PipelineError) -> Failure {
    match e {
        PipelineError::Proximity(_) => Failure::Format(e.to_string()),
        PipelineError::Relations(_) | PipelineError::InvalidOptions(_) => {
            Failure::Usage(e.to_string())
        }
        _ => Failure::Internal(e.to_string()),
    }
}

fn eval_failure(e: EvalError) -> Failure {
    match e {
        EvalError::InvalidSpec(_) => Failure::Format(e.to_string()),
        EvalError::Pipeline(p) => pipeline_failure(p),
    }
}

fn main() -> ExitCode {
    match run(&Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.cmd {
        Cmd::Stats { input } => cmd_stats(input),
        Cmd::Recognize(a) => cmd_recognize(a),
        Cmd::Bench(a) => cmd_bench(a),
        Cmd::Eval(a) => cmd_eval(a),
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Rules(RulesCmd::Check { files }) => cmd_rules_check(files),
    }
}

fn cmd_stats(input: &Path) -> Result<(), Failure> {
    let scene = geojson::read_scene(input).map_err(Failure::Format)?;
    let stats = dataset_stats(&scene.buildings).map_err(eval_failure)?;
    println!("{}", pretty(&stats));
    Ok(())
}

fn cmd_recognize(a: &RecognizeArgs) -> Result<(), Failure> {
    if a.crs_note {
        eprintln!(
            "note: coordinates are read as planar meters; geographic input \
             must be projected beforehand, no transform is applied"
        );
    }
    let cfg = a.overrides.resolve()?;
    let mut scene = geojson::read_scene(&a.input).map_err(Failure::Format)?;
    if let Some(roads_path) = &a.roads {
        let extra = geojson::read_scene(roads_path).map_err(Failure::Format)?;
        if !extra.buildings.is_empty() {
            return Err(Failure::Format(format!(
                "{}: the roads file holds buildings",
                roads_path.display()
            )));
        }
        scene.roads.extend(extra.roads);
    }

    let opts = RecognizeOptions {
        mode: cfg.mode,
        align_rule: cfg.align_rule,
        metric: cfg.rng_metric,
        fr_combine: cfg.fr_combine,
    };
    let rng = RngOptions {
        exact: false,
        metric: cfg.rng_metric,
        fr_combine: cfg.fr_combine,
    };
    let g = build_kg(cfg.schema, &scene.buildings, &scene.roads, &cfg.thresholds, &rng)
        .map_err(pipeline_failure)?;
    let patterns = match &a.rules {
        None => recognize_linear_patterns(&g, &scene.buildings, &cfg.thresholds, &opts)
            .map_err(pipeline_failure)?,
        Some(dir) => {
            if cfg.mode == RecognizeMode::Direct {
                return Err(Failure::Usage(
                    "a rules directory applies to engine modes only".to_string(),
                ));
            }
            let rules = load_rules_dir(dir)?;
            let mut scratch = g.clone();
            recognize_on_graph(&mut scratch, &scene.buildings, &cfg.thresholds, &opts, &rules)
                .map_err(pipeline_failure)?
        }
    };

    let body = format!("{:#}", geojson::patterns_to_geojson(&patterns, &scene.buildings));
    emit(a.out.as_deref(), &body)?;
    if let Some(svg_path) = &a.svg {
        std::fs::write(svg_path, svg::render(&scene.buildings, &patterns))
            .map_err(|e| Failure::Internal(format!("{}: {e}", svg_path.display())))?;
    }
    Ok(())
}

fn cmd_bench(a: &BenchArgs) -> Result<(), Failure> {
    if a.runs == 0 {
        return Err(Failure::Usage("runs must be at least 1".to_string()));
    }
    let cfg = a.overrides.resolve()?;
    let mut lines = vec![BENCH_CSV_HEADER.to_string()];

    if !a.sweep.is_empty() {
        for &n in &a.sweep {
            let spec = scaled_spec(n, a.seed).map_err(|e| Failure::Usage(e.to_string()))?;
            let (buildings, _) = generate_synthetic(&spec).map_err(eval_failure)?;
            let eng = benchmark(&buildings, &[], &cfg.thresholds, Method::Engine, cfg.schema, a.runs)
                .map_err(eval_failure)?;
            let bas =
                benchmark(&buildings, &[], &cfg.thresholds, Method::Baseline, cfg.schema, a.runs)
                    .map_err(eval_failure)?;
            lines.push(bench_csv_row(
                &format!("gen-{n}"),
                cfg.schema,
                Method::Engine,
                &eng,
                Some(bas.ave_t / eng.ave_t),
            ));
        }
    } else {
        let (name, buildings, roads) = match (&a.input, &a.gen) {
            (Some(path), None) => {
                let scene = geojson::read_scene(path).map_err(Failure::Format)?;
                (stem(path), scene.buildings, scene.roads)
            }
            (None, Some(spec_path)) => {
                let spec = read_gen_spec(spec_path)?;
                let (buildings, _) = generate_synthetic(&spec).map_err(eval_failure)?;
                (stem(spec_path), buildings, Vec::new())
            }
            _ => {
                return Err(Failure::Usage(
                    "give a scene file, --gen spec, or --sweep sizes".to_string(),
                ))
            }
        };
        let eng = benchmark(&buildings, &roads, &cfg.thresholds, Method::Engine, cfg.schema, a.runs)
            .map_err(eval_failure)?;
        let bas =
            benchmark(&buildings, &roads, &cfg.thresholds, Method::Baseline, cfg.schema, a.runs)
                .map_err(eval_failure)?;
        lines.push(bench_csv_row(
            &name,
            cfg.schema,
            Method::Engine,
            &eng,
            Some(bas.ave_t / eng.ave_t),
        ));
        lines.push(bench_csv_row(&name, cfg.schema, Method::Baseline, &bas, None));
    }
    emit(a.out.as_deref(), &lines.join("\n"))
}

fn cmd_eval(a: &EvalArgs) -> Result<(), Failure> {
    if !a.counts.is_empty() {
        let [tp, fp, fn_] = a.counts[..] else {
            return Err(Failure::Usage("--counts wants TP,FP,FN".to_string()));
        };
        println!("{}", pretty(&pr_from_counts(tp, fp, fn_)));
        return Ok(());
    }
    let (Some(detected_path), Some(truth_path)) = (&a.detected, &a.truth) else {
        return Err(Failure::Usage(
            "give detected and truth files, or --counts".to_string(),
        ));
    };
    let cfg = a.overrides.resolve()?;
    let criterion = match (a.criterion.as_deref(), a.tau) {
        (None, None) => cfg.match_criterion,
        (None | Some("jaccard"), Some(tau)) => MatchCriterion::Jaccard { tau },
        (Some("jaccard"), None) => MatchCriterion::Jaccard { tau: 0.8 },
        (Some("exact"), None) => MatchCriterion::Exact,
        (Some("exact"), Some(_)) => {
            return Err(Failure::Usage(
                "tau applies to the jaccard criterion".to_string(),
            ))
        }
        (Some(other), _) => {
            return Err(Failure::Usage(format!("unknown criterion: {other}")));
        }
    };
    let detected = geojson::read_detected(detected_path).map_err(Failure::Format)?;
    let truth = read_truth(truth_path)?;
    println!("{}", pretty(&precision_recall_sets(&detected, &truth, criterion)));
    Ok(())
}

fn cmd_gen(a: &GenArgs) -> Result<(), Failure> {
    let spec = read_gen_spec(&a.spec)?;
    let (buildings, truth) = generate_synthetic(&spec).map_err(eval_failure)?;
    emit(Some(&a.out), &format!("{:#}", geojson::scene_to_geojson(&buildings)))?;
    let rows: Vec<Vec<u64>> = truth.iter().map(|s| s.iter().copied().collect()).collect();
    emit(Some(&a.truth), &pretty(&rows))
}

fn cmd_rules_check(files: &[PathBuf]) -> Result<(), Failure> {
    for f in files {
        let text =
            std::fs::read_to_string(f).map_err(|e| Failure::Format(format!("{}: {e}", f.display())))?;
        linea_core::rule_engine::parse(&text)
            .map_err(|e| Failure::Format(format!("{}: {e}", f.display())))?;
        println!("ok {}", f.display());
    }
    Ok(())
}

fn load_rules_dir(dir: &Path) -> Result<CompiledRules, Failure> {
    let read = |name: &str| {
        let p = dir.join(name);
        std::fs::read_to_string(&p).map_err(|e| Failure::Format(format!("{}: {e}", p.display())))
    };
    let sources = RuleScripts {
        recognize_precomputed: read("recognize_precomputed.cypher")?,
        derive_relations: read("derive_relations.cypher")?,
        recognize_attributes: read("recognize_attributes.cypher")?,
        listing_strict: read("listing_strict.cypher")?,
        listing_attributes: read("listing_attributes.cypher")?,
    };
    CompiledRules::from_sources(&sources)
        .map_err(|e| Failure::Format(format!("{}: {e}", dir.display())))
}

fn read_gen_spec(path: &Path) -> Result<GenSpec, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::Format(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Format(format!("{}: {e}", path.display())))
}

fn read_truth(path: &Path) -> Result<Vec<BTreeSet<u64>>, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::Format(format!("{}: {e}", path.display())))?;
    let rows: Vec<Vec<u64>> = serde_json::from_str(&text)
        .map_err(|e| Failure::Format(format!("{}: {e}", path.display())))?;
    Ok(rows.into_iter().map(|r| r.into_iter().collect()).collect())
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report types serialize")
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn emit(path: Option<&Path>, body: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, format!("{body}\n"))
            .map_err(|e| Failure::Internal(format!("{}: {e}", p.display()))),
        None => {
            println!("{body}");
            Ok(())
        }
    }
}
