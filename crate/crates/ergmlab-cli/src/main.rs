//! `ergmlab`: exact ERGM partition functions, hardness constructions, and
//! brute-force oracles from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input,
//! 3 size-cap violation, 64 usage error.

mod manifest;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use ergmlab::dyadic::Dyadic;
use ergmlab::files::{model_from_json, model_to_json, MatchingMeta, ModelMeta};
use ergmlab::graph::{pair_count, Graph};
use ergmlab::model::ErgmModel;
use ergmlab::oracles;
use ergmlab::partition::{
    decode_trifree_digits, partition_exhaustive, partition_two_vertex, PartitionResult,
};
use ergmlab::reductions::{
    build_matching_ergm, build_trifree_ergm, classify_gap, clean_replacement_gamma,
    dichotomy_classify, feature_replace, gap_instance, recover_old_partition,
    separation_identity_holds, snub, snub_seeded,
};
use ergmlab::sampler::{run_chain_with, theorem4_check};

use manifest::{Envelope, Manifest};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_INVALID_INPUT: u8 = 2;
const EXIT_SIZE_CAP: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "ergmlab", version, about = "Exact ERGM partition toolkit")]
struct Cli {
    /// Worker threads for partition enumeration (fallback: ERGMLAB_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the exact partition function of a model file.
    Partition(PartitionArgs),
    /// Decode base-2^alpha digits of a trifree model's partition function.
    Decode(DecodeArgs),
    /// Build the trifree model for a graph.
    BuildTrifree(BuildTrifreeArgs),
    /// Build the matching-census model for a bipartite graph.
    BuildMatchingModel(BuildMatchingArgs),
    /// Construct snub(G) for a 3-regular bipartite graph.
    Snub(SnubArgs),
    /// Replace a labeled indicator feature by a larger pattern.
    ReplaceFeature(ReplaceArgs),
    /// Recover the old partition window from a replaced model's Z.
    RecoverPartition(RecoverArgs),
    /// Evaluate the inapproximability gap thresholds on a graph.
    GapCheck(GapArgs),
    /// Classify a feature pattern set as polynomial or #P-hard.
    Classify(ClassifyArgs),
    /// Brute-force oracles.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Run the Metropolis-Hastings sampler.
    Sample(SampleArgs),
    /// Check the matching / maximum-triangle-free correspondence on a graph.
    VerifyParsimony(VerifyParsimonyArgs),
    /// Run the full acceptance suite.
    VerifyAll(VerifyAllArgs),
}

#[derive(Args)]
struct PartitionArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_parser = ["exhaustive", "two-vertex"], default_value = "exhaustive")]
    engine: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    model: PathBuf,
    /// Partition function as `M*2^-s`; computed exhaustively when omitted.
    #[arg(long)]
    z: Option<String>,
    /// Digit base exponent; defaults to the model's trifree metadata.
    #[arg(long)]
    alpha: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BuildTrifreeArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    alpha: i64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BuildMatchingArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SnubArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Output path for the snub graph in text format.
    #[arg(long)]
    out: PathBuf,
    /// Output path for the role/gadget JSON.
    #[arg(long)]
    roles: PathBuf,
    /// Randomize the arbitrary construction choices.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ReplaceArgs {
    #[arg(long)]
    model: PathBuf,
    /// Index of the labeled indicator feature to replace.
    #[arg(long)]
    feature: usize,
    /// Replacement pattern graph file.
    #[arg(long)]
    pattern: PathBuf,
    /// Embedding `old:new,...` mapping replaced-pattern vertices into the
    /// replacement pattern.
    #[arg(long)]
    embedding: String,
    /// Enforcement weight; defaults to the smallest provably clean value.
    #[arg(long)]
    gamma: Option<i64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RecoverArgs {
    /// Model produced by replace-feature (its metadata carries gamma and s).
    #[arg(long)]
    model: PathBuf,
    /// Partition function of that model; computed exhaustively when omitted.
    #[arg(long)]
    z: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GapArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    flog: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Pattern graph files.
    #[arg(long, num_args = 1.., required = true)]
    patterns: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Census of triangle-free subgraphs by edge count.
    TrifreeCensus(GraphOnlyArgs),
    /// Maximum triangle-free subgraph size and count, by branch-and-bound.
    MaxTrifree(GraphOnlyArgs),
    /// Matching census by size.
    Matchings(GraphOnlyArgs),
}

#[derive(Args)]
struct GraphOnlyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    steps: u64,
    #[arg(long)]
    seed: u64,
    /// Require the exact TV diagnostic (errors when n is too large for it).
    #[arg(long)]
    tv: bool,
    /// Also report the fraction of visited states that are triangle-free
    /// subgraphs of the trifree source with at least K edges.
    #[arg(long)]
    check_k: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyParsimonyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyAllArgs {
    /// Only run criteria whose name contains this substring.
    #[arg(long)]
    filter: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    Input(String),
    Cap(String),
    VerifyFailed(String),
}

impl From<ergmlab::Error> for CliError {
    fn from(e: ergmlab::Error) -> CliError {
        if e.is_size_cap() {
            CliError::Cap(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(EXIT_USAGE)
                }
            }
        }
    };

    let threads = cli.threads.or_else(|| {
        std::env::var("ERGMLAB_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(t) = threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(EXIT_INVALID_INPUT);
        }
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }

    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID_INPUT)
        }
        Err(CliError::Cap(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_SIZE_CAP)
        }
        Err(CliError::VerifyFailed(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(EXIT_VERIFY_FAILED)
        }
    }
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Partition(a) => cmd_partition(a),
        Command::Decode(a) => cmd_decode(a),
        Command::BuildTrifree(a) => cmd_build_trifree(a),
        Command::BuildMatchingModel(a) => cmd_build_matching(a),
        Command::Snub(a) => cmd_snub(a),
        Command::ReplaceFeature(a) => cmd_replace(a),
        Command::RecoverPartition(a) => cmd_recover(a),
        Command::GapCheck(a) => cmd_gap(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Oracle(c) => cmd_oracle(c),
        Command::Sample(a) => cmd_sample(a),
        Command::VerifyParsimony(a) => cmd_verify_parsimony(a),
        Command::VerifyAll(a) => cmd_verify_all(a),
    }
}

// ---------------------------------------------------------------------------
// file plumbing

fn read_file(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path, m: &mut Manifest) -> CliResult<Graph> {
    let bytes = read_file(path)?;
    m.record_input(path, &bytes);
    let text = String::from_utf8(bytes)
        .map_err(|_| CliError::Input(format!("{}: not utf-8", path.display())))?;
    Ok(Graph::from_text(&text)?)
}

fn load_model(path: &Path, m: &mut Manifest) -> CliResult<(ErgmModel, Option<ModelMeta>)> {
    let bytes = read_file(path)?;
    m.record_input(path, &bytes);
    let text = String::from_utf8(bytes)
        .map_err(|_| CliError::Input(format!("{}: not utf-8", path.display())))?;
    Ok(model_from_json(&text)?)
}

/// Prints the envelope to stdout and mirrors it to `--out` when given.
fn emit<T: Serialize>(envelope: &Envelope<T>, out: Option<&Path>) -> CliResult<()> {
    let json = envelope.to_json();
    println!("{json}");
    if let Some(path) = out {
        write_file(path, &json)?;
    }
    Ok(())
}

/// Writes a model file with the manifest embedded alongside the model fields.
fn write_model_artifact(
    path: &Path,
    model: &ErgmModel,
    meta: Option<ModelMeta>,
    manifest: &Manifest,
) -> CliResult<()> {
    let mut value: serde_json::Value =
        serde_json::from_str(&model_to_json(model, meta)).expect("model json");
    value["manifest"] = serde_json::to_value(manifest).expect("manifest json");
    write_file(path, &serde_json::to_string_pretty(&value).expect("json"))
}

fn parse_dyadic(s: &str) -> CliResult<Dyadic> {
    Ok(s.parse::<Dyadic>()?)
}

// ---------------------------------------------------------------------------
// subcommands

#[derive(Serialize)]
struct PartitionOutput {
    engine: String,
    z: Dyadic,
    states_enumerated: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    trifree_digits: Option<ergmlab::DigitVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matching_digits: Option<ergmlab::DigitVector>,
}

fn cmd_partition(a: PartitionArgs) -> CliResult<()> {
    let mut manifest = Manifest::new(
        "partition",
        json!({"model": a.model.display().to_string(), "engine": a.engine}),
    );
    let (model, meta) = load_model(&a.model, &mut manifest)?;
    let result: PartitionResult = match a.engine.as_str() {
        "two-vertex" => partition_two_vertex(&model)?,
        _ => partition_exhaustive(&model)?,
    };
    let trifree_digits = match meta.as_ref().and_then(|m| m.trifree.as_ref()) {
        Some(p) => Some(decode_trifree_digits(&result.z, model.n(), p.alpha as u64)?),
        None => None,
    };
    let matching_digits = match meta.as_ref().and_then(|m| m.matching.as_ref()) {
        Some(p) => Some(ergmlab::dyadic::integer_part_digits(
            &result.z,
            p.base_exponent,
            p.max_size,
        )?),
        None => None,
    };
    emit(
        &Envelope {
            manifest,
            result: PartitionOutput {
                engine: a.engine,
                z: result.z,
                states_enumerated: result.states_enumerated,
                trifree_digits,
                matching_digits,
            },
        },
        a.out.as_deref(),
    )
}

#[derive(Serialize)]
struct DecodeOutput {
    alpha: u64,
    z: Dyadic,
    digits: ergmlab::DigitVector,
}

fn cmd_decode(a: DecodeArgs) -> CliResult<()> {
    let mut manifest = Manifest::new(
        "decode",
        json!({"model": a.model.display().to_string(), "alpha": a.alpha, "z": a.z}),
    );
    let (model, meta) = load_model(&a.model, &mut manifest)?;
    let alpha = match a.alpha.or_else(|| {
        meta.as_ref()
            .and_then(|m| m.trifree.as_ref())
            .map(|p| p.alpha as u64)
    }) {
        Some(alpha) => alpha,
        None => {
            return Err(CliError::Input(
                "no --alpha given and the model carries no trifree metadata".into(),
            ))
        }
    };
    let z = match &a.z {
        Some(s) => parse_dyadic(s)?,
        None => partition_exhaustive(&model)?.z,
    };
    let digits = decode_trifree_digits(&z, model.n(), alpha)?;
    emit(
        &Envelope {
            manifest,
            result: DecodeOutput { alpha, z, digits },
        },
        a.out.as_deref(),
    )
}

#[derive(Serialize)]
struct BuildOutput {
    out: String,
    n: usize,
    features: usize,
    #[serde(flatten)]
    extra: serde_json::Value,
}

fn cmd_build_trifree(a: BuildTrifreeArgs) -> CliResult<()> {
    let mut manifest = Manifest::new(
        "build-trifree",
        json!({"graph": a.graph.display().to_string(), "alpha": a.alpha}),
    );
    let g = load_graph(&a.graph, &mut manifest)?;
    let (model, params) = build_trifree_ergm(&g, a.alpha)?;
    let meta = ModelMeta {
        trifree: Some(params.clone()),
        ..Default::default()
    };
    write_model_artifact(&a.out, &model, Some(meta), &manifest)?;
    emit(
        &Envelope {
            manifest,
            result: BuildOutput {
                out: a.out.display().to_string(),
                n: model.n(),
                features: model.features().len(),
                extra: json!({"alpha": params.alpha, "beta": params.beta}),
            },
        },
        None,
    )
}

fn cmd_build_matching(a: BuildMatchingArgs) -> CliResult<()> {
    let mut manifest = Manifest::new(
        "build-matching-model",
        json!({"graph": a.graph.display().to_string()}),
    );
    let g = load_graph(&a.graph, &mut manifest)?;
    let model = build_matching_ergm(&g)?;
    let meta = ModelMeta {
        matching: Some(MatchingMeta {
            base_exponent: pair_count(g.n()) as u64,
            max_size: g.n() / 2,
        }),
        ..Default::default()
    };
    write_model_artifact(&a.out, &model, Some(meta.clone()), &manifest)?;
    emit(
        &Envelope {
            manifest,
            result: BuildOutput {
                out: a.out.display().to_string(),
                n: model.n(),
                features: model.features().len(),
                extra: serde_json::to_value(&meta.matching).expect("json"),
            },
        },
        None,
    )
}

#[derive(Serialize)]
struct SnubOutput {
    out: String,
    roles_out: String,
    vertices: usize,
    edges: usize,
    triangles: u64,
    role_census: (usize, usize, usize),
}

fn cmd_snub(a: SnubArgs) -> CliResult<()> {
    let mut manifest =
        Manifest::new("snub", json!({"graph": a.graph.display().to_string()})).with_seed(a.seed);
    let g = load_graph(&a.graph, &mut manifest)?;
    let sg = match a.seed {
        Some(seed) => snub_seeded(&g, seed)?,
        None => snub(&g)?,
    };
    write_file(&a.out, &sg.graph.to_text())?;
    let roles_doc = json!({
        "manifest": serde_json::to_value(&manifest).expect("json"),
        "roles": sg.roles,
        "gadgets": sg.gadgets,
    });
    write_file(
        &a.roles,
        &serde_json::to_string_pretty(&roles_doc).expect("json"),
    )?;
    emit(
        &Envelope {
            manifest,
            result: SnubOutput {
                out: a.out.display().to_string(),
                roles_out: a.roles.display().to_string(),
                vertices: sg.graph.n(),
                edges: sg.graph.edge_count(),
                triangles: sg.graph.triangle_count(),
                role_census: sg.role_census(),
            },
        },
        None,
    )
}

fn parse_embedding(s: &str) -> CliResult<Vec<(usize, usize)>> {
    s.split(',')
        .map(|pair| {
            let (a, b) = pair
                .split_once(':')
                .ok_or_else(|| CliError::Input(format!("bad embedding entry {pair:?}")))?;
            let a = a
                .trim()
                .parse()
                .map_err(|_| CliError::Input(format!("bad embedding entry {pair:?}")))?;
            let b = b
                .trim()
                .parse()
                .map_err(|_| CliError::Input(format!("bad embedding entry {pair:?}")))?;
            Ok((a, b))
        })
        .collect()
}

fn cmd_replace(a: ReplaceArgs) -> CliResult<()> {
    let mut manifest = Manifest::new(
        "replace-feature",
        json!({
            "model": a.model.display().to_string(),
            "feature": a.feature,
            "pattern": a.pattern.display().to_string(),
            "embedding": a.embedding,
            "gamma": a.gamma,
        }),
    );
    let (model, meta) = load_model(&a.model, &mut manifest)?;
    let pattern = load_graph(&a.pattern, &mut manifest)?;
    let pairs = parse_embedding(&a.embedding)?;
    let mut embedding = vec![usize::MAX; pairs.len()];
    for (from, to) in &pairs {
        if *from >= embedding.len() || embedding[*from] != usize::MAX {
            return Err(CliError::Input(format!(
                "embedding must map each of 0..{} exactly once",
                embedding.len()
            )));
        }
        embedding[*from] = *to;
    }
    let gamma = a
        .gamma
        .unwrap_or_else(|| clean_replacement_gamma(&model, &pattern));
    let (new_model, params) =
        feature_replace(&model, a.feature, &pattern, &embedding, Some(gamma))?;
    let new_meta = ModelMeta {
        replacement: Some(params.clone()),
        ..meta.unwrap_or_default()
    };
    write_model_artifact(&a.out, &new_model, Some(new_meta), &manifest)?;
    emit(
        &Envelope {
            manifest,
            result: BuildOutput {
                out: a.out.display().to_string(),
                n: new_model.n(),
                features: new_model.features().len(),
                extra: serde_json::to_value(&params).expect("json"),
            },
        },
        None,
    )
}

#[derive(Serialize)]
struct RecoverOutput {
    z_new: Dyadic,
    window_bit: u64,
    window: String,
    free_cross_edges: usize,
}

fn cmd_recover(a: RecoverArgs) -> CliResult<()> {
    let mut manifest = Manifest::new(
        "recover-partition",
        json!({"model": a.model.display().to_string(), "z": a.z}),
    );
    let (model, meta) = load_model(&a.model, &mut manifest)?;
    let params = meta
        .and_then(|m| m.replacement)
        .ok_or_else(|| CliError::Input("model carries no replacement metadata".into()))?;
    let z = match &a.z {
        Some(s) => parse_dyadic(s)?,
        None => partition_exhaustive(&model)?.z,
    };
    let window = recover_old_partition(&z, &params);
    emit(
        &Envelope {
            manifest,
            result: RecoverOutput {
                z_new: z,
                window_bit: params.window_bit(),
                window: window.to_string(),
                free_cross_edges: params.free_cross_edges(),
            },
        },
        a.out.as_deref(),
    )
}

#[derive(Serialize)]
struct GapOutput {
    verdict: String,
    alpha: i64,
    z: Dyadic,
    yes_threshold: Dyadic,
    no_threshold: Dyadic,
    identity_exact: bool,
}

fn cmd_gap(a: GapArgs) -> CliResult<()> {
    let mut manifest = Manifest::new(
        "gap-check",
        json!({"graph": a.graph.display().to_string(), "k": a.k, "flog": a.flog}),
    );
    let g = load_graph(&a.graph, &mut manifest)?;
    let (model, params) = gap_instance(&g, a.k, a.flog)?;
    let z = partition_exhaustive(&model)?.z;
    let verdict = classify_gap(&z, &params, g.n())?;
    emit(
        &Envelope {
            manifest,
            result: GapOutput {
                verdict: if verdict.is_yes { "YES" } else { "NO" }.into(),
                alpha: params.alpha,
                z,
                yes_threshold: verdict.yes_threshold,
                no_threshold: verdict.no_threshold,
                identity_exact: separation_identity_holds(&params, g.n()),
            },
        },
        a.out.as_deref(),
    )
}

#[derive(Serialize)]
struct ClassifyOutput {
    #[serde(flatten)]
    verdict: ergmlab::reductions::DichotomyVerdict,
    patterns: Vec<String>,
}

fn cmd_classify(a: ClassifyArgs) -> CliResult<()> {
    let mut manifest = Manifest::new(
        "classify",
        json!({"patterns": a.patterns.iter().map(|p| p.display().to_string()).collect::<Vec<_>>()}),
    );
    let mut patterns = Vec::new();
    for path in &a.patterns {
        patterns.push(load_graph(path, &mut manifest)?);
    }
    let verdict = dichotomy_classify(&patterns);
    emit(
        &Envelope {
            manifest,
            result: ClassifyOutput {
                verdict,
                patterns: a.patterns.iter().map(|p| p.display().to_string()).collect(),
            },
        },
        a.out.as_deref(),
    )
}

fn cmd_oracle(c: OracleCommand) -> CliResult<()> {
    match c {
        OracleCommand::TrifreeCensus(a) => {
            let mut manifest = Manifest::new(
                "oracle trifree-census",
                json!({"graph": a.graph.display().to_string()}),
            );
            let g = load_graph(&a.graph, &mut manifest)?;
            let census = oracles::trifree_census_exhaustive(&g)?;
            emit(
                &Envelope {
                    manifest,
                    result: json!({"counts": census.counts, "total": census.total()}),
                },
                a.out.as_deref(),
            )
        }
        OracleCommand::MaxTrifree(a) => {
            let mut manifest = Manifest::new(
                "oracle max-trifree",
                json!({"graph": a.graph.display().to_string()}),
            );
            let g = load_graph(&a.graph, &mut manifest)?;
            let (max_edges, count) = oracles::max_trifree_count(&g);
            emit(
                &Envelope {
                    manifest,
                    result: json!({"max_edges": max_edges, "count": count}),
                },
                a.out.as_deref(),
            )
        }
        OracleCommand::Matchings(a) => {
            let mut manifest = Manifest::new(
                "oracle matchings",
                json!({"graph": a.graph.display().to_string()}),
            );
            let g = load_graph(&a.graph, &mut manifest)?;
            let census = oracles::count_matchings(&g)?;
            emit(
                &Envelope {
                    manifest,
                    result: json!({"counts": census.counts, "perfect": census.perfect}),
                },
                a.out.as_deref(),
            )
        }
    }
}

#[derive(Serialize)]
struct SampleOutput {
    report: ergmlab::sampler::SampleReport,
    final_graph: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    check_k: Option<CheckKOutput>,
}

#[derive(Serialize)]
struct CheckKOutput {
    k: usize,
    ones: u64,
    fraction: f64,
}

fn cmd_sample(a: SampleArgs) -> CliResult<()> {
    let mut manifest = Manifest::new(
        "sample",
        json!({
            "model": a.model.display().to_string(),
            "steps": a.steps,
            "tv": a.tv,
            "check_k": a.check_k,
        }),
    )
    .with_seed(Some(a.seed));
    let (model, meta) = load_model(&a.model, &mut manifest)?;
    if a.tv && model.n() > ergmlab::sampler::TV_VERTEX_CAP {
        return Err(CliError::Cap(format!(
            "--tv needs n <= {}, model has n = {}",
            ergmlab::sampler::TV_VERTEX_CAP,
            model.n()
        )));
    }
    let check = match a.check_k {
        None => None,
        Some(k) => {
            let params = meta
                .as_ref()
                .and_then(|m| m.trifree.as_ref())
                .ok_or_else(|| {
                    CliError::Input("--check-k needs a model with trifree metadata".into())
                })?;
            Some((k, params.clone()))
        }
    };
    let mut ones = 0u64;
    let run = run_chain_with(&model, a.steps, a.seed, |g| {
        if let Some((k, params)) = &check {
            if theorem4_check(params, g, *k) {
                ones += 1;
            }
        }
    })?;
    let check_k = check.map(|(k, _)| CheckKOutput {
        k,
        ones,
        fraction: ones as f64 / a.steps as f64,
    });
    emit(
        &Envelope {
            manifest,
            result: SampleOutput {
                report: run.report,
                final_graph: run.final_graph.to_text(),
                check_k,
            },
        },
        a.out.as_deref(),
    )
}

#[derive(Serialize)]
struct ParsimonyOutput {
    matchings: u64,
    max_trifree_edges: usize,
    max_trifree_count: u64,
    expected_edges: usize,
    pass: bool,
}

fn cmd_verify_parsimony(a: VerifyParsimonyArgs) -> CliResult<()> {
    let mut manifest = Manifest::new(
        "verify-parsimony",
        json!({"graph": a.graph.display().to_string()}),
    );
    let g = load_graph(&a.graph, &mut manifest)?;
    let matchings = oracles::count_matchings(&g)?.perfect;
    let sg = snub(&g)?;
    let (max_edges, count) = oracles::max_trifree_count(&sg.graph);
    let expected_edges = 11 * g.n() / 2;
    let pass = matchings == count && max_edges == expected_edges;
    eprintln!(
        "matchings={matchings}, max-trifree-count={count}, {}",
        if pass { "PASS" } else { "FAIL" }
    );
    emit(
        &Envelope {
            manifest,
            result: ParsimonyOutput {
                matchings,
                max_trifree_edges: max_edges,
                max_trifree_count: count,
                expected_edges,
                pass,
            },
        },
        a.out.as_deref(),
    )?;
    if pass {
        Ok(())
    } else {
        Err(CliError::VerifyFailed(
            "parsimony correspondence failed".into(),
        ))
    }
}

#[derive(Serialize)]
struct VerifyAllOutput {
    criteria: Vec<CriterionJson>,
    passed: usize,
    failed: usize,
}

#[derive(Serialize)]
struct CriterionJson {
    id: usize,
    name: String,
    passed: bool,
    detail: String,
}

fn cmd_verify_all(a: VerifyAllArgs) -> CliResult<()> {
    let manifest = Manifest::new("verify-all", json!({"filter": a.filter}));
    let outcomes = ergmlab::acceptance::run_all(a.filter.as_deref());
    if outcomes.is_empty() {
        return Err(CliError::Input(format!(
            "no criterion matches filter {:?}",
            a.filter.unwrap_or_default()
        )));
    }
    let mut failed = 0;
    for o in &outcomes {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        eprintln!("[{tag}] criterion {:>2} {}: {}", o.id, o.name, o.detail);
        if !o.passed {
            failed += 1;
        }
    }
    let result = VerifyAllOutput {
        passed: outcomes.len() - failed,
        failed,
        criteria: outcomes
            .into_iter()
            .map(|o| CriterionJson {
                id: o.id,
                name: o.name.to_string(),
                passed: o.passed,
                detail: o.detail,
            })
            .collect(),
    };
    emit(&Envelope { manifest, result }, a.out.as_deref())?;
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::VerifyFailed(format!("{failed} criteria failed")))
    }
}
