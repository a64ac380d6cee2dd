//! Command-line front end. Flags win over `TYPEFORGE_*` environment
//! variables, which win over defaults.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use typeforge_core::{select_subtype_matrix, KnnIndex, Normalizer, Recommender, TsneConfig};

use crate::batch::{read_ids, recommend_batch, write_recommendations};
use crate::build::{build_model, count_types};
use crate::cluster::{cluster_all, ClusterOptions};
use crate::embeddings::load_embeddings;
use crate::error::{Error, Result};
use crate::experiment::{compare_methods, partition, run_all_folds, run_experiment, EvalReport, ExperimentConfig, Method};
use crate::io::create_writer;
use crate::model_io::{load_model, save_model};
use crate::ntriples::{build_ontology_index_with, AssertionSource, RDFS_SUBCLASS_OF, RDF_TYPE};
use crate::projection::save_projection;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "typeforge", version, about = "Type embeddings and type recommendation for knowledge-base entities")]
#[command(arg_required_else_help = true, propagate_version = true)]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, env = "TYPEFORGE_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Worker threads; 0 runs sequentially (the timing reference).
    #[arg(long, global = true, env = "TYPEFORGE_THREADS", default_value_t = 0)]
    pub threads: usize,

    /// Log filter, e.g. `info` or `typeforge=debug`.
    #[arg(long, global = true, env = "TYPEFORGE_LOG", default_value = "info")]
    pub log: String,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a type embedding model from entity vectors and type assertions.
    BuildTypes(BuildTypesArgs),
    /// Recommend types for a list of entities with a type model.
    Recommend(RecommendArgs),
    /// Recommend types with the weighted nearest-neighbour baseline.
    Knn(KnnArgs),
    /// Split an assertion file into type-stratified folds.
    Partition(PartitionArgs),
    /// Measure Recall@k with one fold held out.
    Eval(EvalArgs),
    /// Tabulate several evaluation reports side by side.
    Compare(CompareArgs),
    /// Write the type distribution of every embedded entity.
    Cluster(ClusterArgs),
    /// Project sub-type vectors of some root types to 2-D.
    Project(ProjectArgs),
    /// List the direct sub-types (or super-types) of a type.
    OntologySubtypes(OntologyArgs),
}

#[derive(Debug, Args)]
pub struct EmbeddingArgs {
    /// Entity vectors: `<count> <dim>` header, then `<iri> v1 … vd` per line.
    #[arg(long, env = "TYPEFORGE_EMBEDDINGS")]
    pub embeddings: PathBuf,

    /// Keep entity vectors as given instead of scaling them to unit length.
    #[arg(long)]
    pub no_normalize: bool,
}

#[derive(Debug, Args)]
pub struct BuildTypesArgs {
    #[command(flatten)]
    pub embeddings: EmbeddingArgs,

    /// N-Triples type assertions (plain, .gz or .bz2); repeat for several files.
    #[arg(long, env = "TYPEFORGE_ASSERTIONS", required = true, num_args = 1.., value_delimiter = ',')]
    pub assertions: Vec<PathBuf>,

    /// Predicate IRI that marks a type assertion.
    #[arg(long, env = "TYPEFORGE_PREDICATE", default_value = RDF_TYPE)]
    pub predicate: String,

    /// Model output path.
    #[arg(long)]
    pub out: PathBuf,

    /// Coverage and skip report (JSON lines); defaults to `<out>.report.jsonl`.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RecommendArgs {
    #[arg(long, env = "TYPEFORGE_MODEL")]
    pub model: PathBuf,

    #[command(flatten)]
    pub embeddings: EmbeddingArgs,

    /// Entity IRIs, one per line.
    #[arg(long)]
    pub ids: PathBuf,

    /// Types kept per entity.
    #[arg(long, default_value_t = 10)]
    pub k: usize,

    /// `softmax` or `shifted-sum`.
    #[arg(long, env = "TYPEFORGE_NORM", default_value = "softmax")]
    pub norm: Normalizer,

    /// Output JSON lines; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KnnArgs {
    #[command(flatten)]
    pub embeddings: EmbeddingArgs,

    /// Training assertions the neighbours' types come from.
    #[arg(long, env = "TYPEFORGE_ASSERTIONS", required = true, num_args = 1.., value_delimiter = ',')]
    pub assertions: Vec<PathBuf>,

    #[arg(long, env = "TYPEFORGE_PREDICATE", default_value = RDF_TYPE)]
    pub predicate: String,

    #[arg(long)]
    pub ids: PathBuf,

    /// Number of neighbours.
    #[arg(long, default_value_t = 10)]
    pub k: usize,

    /// Truncate each list to this many types.
    #[arg(long)]
    pub top: Option<usize>,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    #[arg(long, env = "TYPEFORGE_ASSERTIONS", required = true, num_args = 1.., value_delimiter = ',')]
    pub assertions: Vec<PathBuf>,

    #[arg(long, env = "TYPEFORGE_PREDICATE", default_value = RDF_TYPE)]
    pub predicate: String,

    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u16).range(2..))]
    pub folds: u16,

    /// Directory receiving `fold-<i>.nt`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub embeddings: EmbeddingArgs,

    /// Fold files in fold order.
    #[arg(long, required = true, num_args = 1.., value_delimiter = ',')]
    pub folds: Vec<PathBuf>,

    #[arg(long, env = "TYPEFORGE_PREDICATE", default_value = RDF_TYPE)]
    pub predicate: String,

    /// Held-out fold; every fold in turn when omitted.
    #[arg(long)]
    pub test_fold: Option<usize>,

    /// Test entities sampled from the held-out fold.
    #[arg(long, default_value_t = 5000)]
    pub sample: usize,

    /// `embedding` or `knn-<k>`.
    #[arg(long, default_value = "embedding")]
    pub method: String,

    #[arg(long, env = "TYPEFORGE_NORM", default_value = "softmax")]
    pub norm: Normalizer,

    #[arg(long, default_value_t = crate::experiment::DEFAULT_K_MAX as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub k_max: u64,

    /// Report output (JSON).
    #[arg(long)]
    pub out: PathBuf,

    /// Also write `k,recall` rows here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Evaluation reports; the first is the reference for the deltas.
    #[arg(required = true)]
    pub reports: Vec<PathBuf>,

    /// TSV output; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long, env = "TYPEFORGE_MODEL")]
    pub model: PathBuf,

    #[command(flatten)]
    pub embeddings: EmbeddingArgs,

    /// Output directory for `part-*.jsonl` shards.
    #[arg(long)]
    pub out: PathBuf,

    /// Types kept per entity; the full distribution when omitted.
    #[arg(long)]
    pub top_k: Option<usize>,

    #[arg(long)]
    pub gzip: bool,

    #[arg(long, env = "TYPEFORGE_NORM", default_value = "softmax")]
    pub norm: Normalizer,
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    #[arg(long, env = "TYPEFORGE_MODEL")]
    pub model: PathBuf,

    /// N-Triples file with sub-class statements.
    #[arg(long, env = "TYPEFORGE_ONTOLOGY")]
    pub ontology: PathBuf,

    #[arg(long, default_value = RDFS_SUBCLASS_OF)]
    pub subclass_predicate: String,

    /// Root type IRIs.
    #[arg(long, required = true, num_args = 1.., value_delimiter = ',')]
    pub roots: Vec<String>,

    #[arg(long, default_value_t = 30.0)]
    pub perplexity: f64,

    #[arg(long, default_value_t = 1000)]
    pub iterations: usize,

    #[arg(long, default_value_t = 200.0)]
    pub learning_rate: f64,

    /// TSV output.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct OntologyArgs {
    #[arg(long, env = "TYPEFORGE_ONTOLOGY")]
    pub ontology: PathBuf,

    #[arg(long, default_value = RDFS_SUBCLASS_OF)]
    pub subclass_predicate: String,

    /// Type IRI to look up.
    #[arg(long = "type")]
    pub type_iri: String,

    /// List direct super-types instead.
    #[arg(long)]
    pub supertypes: bool,
}

fn strip_brackets(s: &str) -> &str {
    let s = s.trim();
    s.strip_prefix('<').and_then(|r| r.strip_suffix('>')).unwrap_or(s)
}

fn init_logging(filter: &str) {
    let _ = env_logger::Builder::new()
        .parse_filters(filter)
        .format_timestamp_millis()
        .target(env_logger::Target::Stderr)
        .try_init();
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    init_logging(&cli.log);
    match dispatch(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            log::error!("{e}");
            EXIT_DATA
        }
    }
}

fn load_store(args: &EmbeddingArgs) -> Result<typeforge_core::EntityEmbeddingStore> {
    let (store, report) = load_embeddings(&args.embeddings, !args.no_normalize)?;
    log::info!(
        "loaded {} entity vectors (dim {}, {} duplicates, {} skipped lines)",
        report.loaded,
        report.dim,
        report.duplicates,
        report.skips.len()
    );
    Ok(store)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write + Send>> {
    match path {
        Some(p) => create_writer(p),
        None => Ok(Box::new(std::io::stdout())),
    }
}

fn write_out(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    let mut w = output(path)?;
    let err = |e| Error::io(path.unwrap_or(Path::new("<stdout>")), e);
    f(w.as_mut()).map_err(err)?;
    w.flush().map_err(err)
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    let s = serde_json::to_string_pretty(value).map_err(|e| Error::Data(e.to_string()))?;
    println!("{s}");
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::BuildTypes(a) => {
            let store = load_store(&a.embeddings)?;
            let source = AssertionSource::from_paths(a.assertions.clone()).with_predicate(a.predicate.clone());
            let out = if cli.threads > 1 {
                crate::build::build_model_sharded(&source, &store, cli.threads)?
            } else {
                build_model(&source, &store)?
            };
            save_model(&out.model, &a.out)?;
            let report = a.report.clone().unwrap_or_else(|| {
                let mut s = a.out.clone().into_os_string();
                s.push(".report.jsonl");
                PathBuf::from(s)
            });
            out.write_report(&report)?;
            log::info!(
                "{} types from {} entities; {} dropped; model written to {}",
                out.model.len(),
                out.coverage.entities,
                out.coverage.dropped_types,
                a.out.display()
            );
            print_json(&out.coverage)
        }
        Command::Recommend(a) => {
            let model = load_model(&a.model)?;
            let store = load_store(&a.embeddings)?;
            let ids = read_ids(&a.ids)?;
            let scorer = Recommender::new(&model, a.norm);
            let batch = recommend_batch(&scorer, &store, &ids, Some(a.k), cli.threads)?;
            report_missing(&batch.missing);
            write_out(a.out.as_deref(), |w| write_recommendations(&scorer, &batch, w))
        }
        Command::Knn(a) => {
            let store = load_store(&a.embeddings)?;
            let source = AssertionSource::from_paths(a.assertions.clone()).with_predicate(a.predicate.clone());
            let (census, _) = count_types(&source, &store)?;
            let index = KnnIndex::build(&store, &census, a.k)?;
            drop(census);
            let ids = read_ids(&a.ids)?;
            let batch = recommend_batch(&index, &store, &ids, a.top, cli.threads)?;
            report_missing(&batch.missing);
            write_out(a.out.as_deref(), |w| write_recommendations(&index, &batch, w))
        }
        Command::Partition(a) => {
            let source = AssertionSource::from_paths(a.assertions.clone()).with_predicate(a.predicate.clone());
            let out = partition(&source, a.folds as usize, cli.seed, &a.out)?;
            if out.sparse_types > 0 {
                log::warn!(
                    "{} types have fewer assertions than folds; some folds lack them",
                    out.sparse_types
                );
            }
            print_json(&serde_json::json!({
                "folds": out.fold_paths,
                "fold_sizes": out.fold_sizes,
                "fold_types": out.fold_types,
                "types": out.types,
                "sparse_types": out.sparse_types,
                "seed": cli.seed,
                "skipped_lines": out.stream.stats.skipped(),
            }))
        }
        Command::Eval(a) => {
            let method: Method = match a.method.parse()? {
                Method::Embedding(_) => Method::Embedding(a.norm),
                m => m,
            };
            let store = load_store(&a.embeddings)?;
            let mut config = ExperimentConfig::new(a.folds.clone(), a.test_fold.unwrap_or(0), a.sample, method, cli.seed);
            config.k_max = a.k_max as usize;
            config.predicate = a.predicate.clone();
            let report = match a.test_fold {
                Some(_) => run_experiment(&config, &store)?,
                None => run_all_folds(&config, &store)?,
            };
            report.save(&a.out)?;
            if let Some(csv) = &a.csv {
                write_out(Some(csv), |w| w.write_all(report.recall_csv().as_bytes()))?;
            }
            log::info!(
                "{}: Recall@1 {:.4}, {:.2} types per entity, {:.3} s scoring",
                report.method,
                report.recall_at_k.first().copied().unwrap_or(0.0),
                report.recs_per_entity,
                report.timing.scoring_seconds
            );
            Ok(())
        }
        Command::Compare(a) => {
            let reports = a.reports.iter().map(|p| EvalReport::load(p)).collect::<Result<Vec<_>>>()?;
            let table = compare_methods(&reports)?;
            write_out(a.out.as_deref(), |w| w.write_all(table.to_tsv().as_bytes()))
        }
        Command::Cluster(a) => {
            let model = load_model(&a.model)?;
            let store = load_store(&a.embeddings)?;
            let opts = ClusterOptions {
                top_k: a.top_k.unwrap_or(model.len()).max(1),
                gzip: a.gzip,
                threads: cli.threads,
                normalizer: a.norm,
            };
            let summary = cluster_all(&model, &store, &a.out, &opts)?;
            print_json(&summary)
        }
        Command::Project(a) => {
            let model = load_model(&a.model)?;
            let (index, _) = build_ontology_index_with(&a.ontology, &a.subclass_predicate)?;
            let roots: Vec<&str> = a.roots.iter().map(|r| strip_brackets(r)).collect();
            for r in &roots {
                if !index.contains(r) {
                    log::warn!("root {r} does not occur in the ontology");
                }
            }
            let config = TsneConfig {
                perplexity: a.perplexity,
                iterations: a.iterations,
                learning_rate: a.learning_rate,
                seed: cli.seed,
                ..TsneConfig::default()
            };
            let job = select_subtype_matrix(&model, &index, &roots, config)?;
            if job.multi_labeled() > 0 {
                log::info!("{} sub-types sit under more than one root", job.multi_labeled());
            }
            let out = job.run()?;
            save_projection(&job, &out, &a.out)?;
            log::info!(
                "projected {} types (perplexity {:.3}, final KL {:.5})",
                job.len(),
                out.perplexity,
                out.kl_history.last().copied().unwrap_or(f64::NAN)
            );
            Ok(())
        }
        Command::OntologySubtypes(a) => {
            let (index, _) = build_ontology_index_with(&a.ontology, &a.subclass_predicate)?;
            let t = strip_brackets(&a.type_iri);
            let found = if a.supertypes {
                index.direct_supertypes(t)
            } else {
                index.direct_subtypes(t)
            };
            write_out(None, |w| {
                for s in found {
                    writeln!(w, "{s}")?;
                }
                Ok(())
            })
        }
    }
}

fn report_missing(missing: &[String]) {
    if !missing.is_empty() {
        log::warn!(
            "{} ids have no embedding and were skipped (first: {})",
            missing.len(),
            missing[0]
        );
    }
}

