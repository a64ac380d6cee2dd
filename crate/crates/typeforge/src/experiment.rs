//! Fold partitioning, Recall@k experiments, and method comparison.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use hashmap::InternTable;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use typeforge_core::{
    EntityEmbeddingStore, KnnIndex, Normalizer, RecallAccumulator, Recommender, StratifiedPartitioner, Truth,
    TypeScorer,
};

use crate::build::count_types;
use crate::error::{Error, Result};
use crate::io::create_writer;
use crate::ntriples::{AssertionSource, StreamReport};

mod hashmap {
    use std::collections::HashMap;

    /// Interns strings to dense ids in first-seen order.
    #[derive(Default)]
    pub struct InternTable {
        ids: HashMap<String, u32>,
        pub names: Vec<String>,
    }

    impl InternTable {
        pub fn intern(&mut self, s: &str) -> u32 {
            if let Some(&id) = self.ids.get(s) {
                return id;
            }
            let id = self.names.len() as u32;
            self.ids.insert(s.to_string(), id);
            self.names.push(s.to_string());
            id
        }
    }
}

pub const DEFAULT_K_MAX: usize = 15;

/// Result of [`partition`].
#[derive(Debug, Clone)]
pub struct PartitionOutcome {
    pub spec: typeforge_core::PartitionSpec,
    pub fold_paths: Vec<PathBuf>,
    pub fold_sizes: Vec<usize>,
    /// Per fold, number of distinct types present.
    pub fold_types: Vec<usize>,
    pub types: usize,
    pub sparse_types: usize,
    pub stream: StreamReport,
}

pub fn fold_path(dir: &Path, fold: usize) -> PathBuf {
    dir.join(format!("fold-{fold}.nt"))
}

/// Splits the type assertions of `source` into `fold_count` N-Triples files
/// under `out_dir`, stratified by type. The assertion multiset is kept as is
/// (duplicates included).
pub fn partition(
    source: &AssertionSource,
    fold_count: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<PartitionOutcome> {
    let mut table = InternTable::default();
    let mut type_of: Vec<u32> = Vec::new();
    let stream = source.visit(|_, t| type_of.push(table.intern(t)))?;

    // reassign type ids in IRI order so the split does not depend on file order
    let mut order: Vec<u32> = (0..table.names.len() as u32).collect();
    order.sort_by(|&a, &b| table.names[a as usize].cmp(&table.names[b as usize]));
    let mut remap = vec![0u32; order.len()];
    for (new, &old) in order.iter().enumerate() {
        remap[old as usize] = new as u32;
    }
    for t in type_of.iter_mut() {
        *t = remap[*t as usize];
    }
    let mut counts = vec![0usize; order.len()];
    for &t in &type_of {
        counts[t as usize] += 1;
    }

    let mut partitioner = StratifiedPartitioner::new(&counts, fold_count, seed)?;
    let sparse_types = partitioner.sparse_types();
    let assignment: Vec<u16> = type_of.iter().map(|&t| partitioner.next_fold(t)).collect();
    drop(type_of);

    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let fold_paths: Vec<PathBuf> = (0..fold_count).map(|f| fold_path(out_dir, f)).collect();
    let mut writers = fold_paths.iter().map(|p| create_writer(p)).collect::<Result<Vec<_>>>()?;
    let predicate = source.predicate().to_string();
    let mut i = 0usize;
    let mut write_err: Option<Error> = None;
    let mut fold_type_sets: Vec<BTreeSet<String>> = vec![BTreeSet::new(); fold_count];
    source.visit(|s, t| {
        if write_err.is_some() {
            return;
        }
        let Some(&f) = assignment.get(i) else {
            write_err = Some(Error::Data("assertion file changed between passes".into()));
            return;
        };
        i += 1;
        let f = f as usize;
        if !fold_type_sets[f].contains(t) {
            fold_type_sets[f].insert(t.to_string());
        }
        if let Err(e) = writeln!(writers[f], "<{s}> <{predicate}> <{t}> .") {
            write_err = Some(Error::io(&fold_paths[f], e));
        }
    })?;
    if let Some(e) = write_err {
        return Err(e);
    }
    for (w, p) in writers.iter_mut().zip(&fold_paths) {
        w.flush().map_err(|e| Error::io(p, e))?;
    }
    drop(writers);

    let spec = typeforge_core::PartitionSpec {
        fold_count,
        seed,
        assignment,
    };
    let fold_sizes = spec.fold_sizes();
    Ok(PartitionOutcome {
        spec,
        fold_paths,
        fold_sizes,
        fold_types: fold_type_sets.iter().map(BTreeSet::len).collect(),
        types: counts.len(),
        sparse_types,
        stream,
    })
}

/// Which recommender an experiment evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Embedding(Normalizer),
    Knn(usize),
}

impl Method {
    pub fn name(&self) -> String {
        match self {
            Method::Embedding(_) => "embedding".to_string(),
            Method::Knn(k) => format!("knn-{k}"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "embedding" {
            return Ok(Method::Embedding(Normalizer::Softmax));
        }
        let k = s
            .strip_prefix("knn-")
            .or_else(|| s.strip_suffix("nn"))
            .and_then(|k| k.parse::<usize>().ok())
            .filter(|&k| k > 0);
        k.map(Method::Knn)
            .ok_or_else(|| Error::Data(format!("unknown method {s:?}; expected embedding or knn-<k>")))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    /// Model or index construction.
    pub build_seconds: f64,
    /// The scoring calls only.
    pub scoring_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub test_fold: usize,
    pub sample_requested: usize,
    pub candidates: usize,
    pub evaluated: u64,
    /// Test-fold entities without an embedding.
    pub unembedded: usize,
    pub recall_at_k: Vec<f64>,
    pub recs_per_entity: f64,
    pub training_entities: usize,
    pub types: usize,
    pub memory_estimate_bytes: u64,
    pub timing: Timing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: String,
    pub seed: u64,
    pub k_max: usize,
    /// Mean over folds of the mean Recall@k; index `k - 1`.
    pub recall_at_k: Vec<f64>,
    pub recs_per_entity: f64,
    pub memory_estimate_bytes: u64,
    pub timing: Timing,
    pub folds: Vec<FoldResult>,
}

impl EvalReport {
    pub fn from_folds(method: &Method, seed: u64, k_max: usize, folds: Vec<FoldResult>) -> Self {
        let n = folds.len().max(1) as f64;
        let mut recall = vec![0.0; k_max];
        for f in &folds {
            for (r, x) in recall.iter_mut().zip(&f.recall_at_k) {
                *r += x / n;
            }
        }
        Self {
            method: method.name(),
            seed,
            k_max,
            recall_at_k: recall,
            recs_per_entity: folds.iter().map(|f| f.recs_per_entity).sum::<f64>() / n,
            memory_estimate_bytes: folds.iter().map(|f| f.memory_estimate_bytes).max().unwrap_or(0),
            timing: Timing {
                build_seconds: folds.iter().map(|f| f.timing.build_seconds).sum(),
                scoring_seconds: folds.iter().map(|f| f.timing.scoring_seconds).sum(),
            },
            folds,
        }
    }

    /// Same report with every timing field zeroed, for reproducibility checks.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.timing = Timing::default();
        for f in r.folds.iter_mut() {
            f.timing = Timing::default();
        }
        r
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = create_writer(path)?;
        serde_json::to_writer_pretty(&mut w, self).map_err(|e| Error::io(path, e.into()))?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let r = crate::io::open_reader(path)?;
        serde_json::from_reader(r).map_err(|e| Error::format(path, format!("invalid report: {e}")))
    }

    /// `k,recall` rows for plotting.
    pub fn recall_csv(&self) -> String {
        let mut s = String::from("k,recall\n");
        for (i, r) in self.recall_at_k.iter().enumerate() {
            let _ = writeln!(s, "{},{r}", i + 1);
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub folds: Vec<PathBuf>,
    pub test_fold: usize,
    pub sample_size: usize,
    pub method: Method,
    pub seed: u64,
    pub k_max: usize,
    pub predicate: String,
}

impl ExperimentConfig {
    pub fn new(folds: Vec<PathBuf>, test_fold: usize, sample_size: usize, method: Method, seed: u64) -> Self {
        Self {
            folds,
            test_fold,
            sample_size,
            method,
            seed,
            k_max: DEFAULT_K_MAX,
            predicate: crate::ntriples::RDF_TYPE.to_string(),
        }
    }
}

/// Trains on every fold except `test_fold`, samples test entities from it,
/// and measures Recall@k against the types explicitly asserted in that fold.
pub fn run_experiment(config: &ExperimentConfig, store: &EntityEmbeddingStore) -> Result<EvalReport> {
    let fold = run_fold(config, store)?;
    Ok(EvalReport::from_folds(&config.method, config.seed, config.k_max, vec![fold]))
}

/// Runs every fold in turn as the test fold.
pub fn run_all_folds(config: &ExperimentConfig, store: &EntityEmbeddingStore) -> Result<EvalReport> {
    let mut folds = Vec::with_capacity(config.folds.len());
    for test_fold in 0..config.folds.len() {
        let c = ExperimentConfig {
            test_fold,
            ..config.clone()
        };
        folds.push(run_fold(&c, store)?);
    }
    Ok(EvalReport::from_folds(&config.method, config.seed, config.k_max, folds))
}

fn run_fold(config: &ExperimentConfig, store: &EntityEmbeddingStore) -> Result<FoldResult> {
    if config.folds.len() < 2 {
        return Err(Error::Data("at least two folds are required".into()));
    }
    if config.test_fold >= config.folds.len() {
        return Err(Error::Data(format!(
            "test fold {} out of range (0..{})",
            config.test_fold,
            config.folds.len()
        )));
    }
    if config.k_max == 0 {
        return Err(Error::Data("k_max must be at least 1".into()));
    }
    for p in &config.folds {
        if !p.is_file() {
            return Err(Error::io(p, std::io::Error::new(std::io::ErrorKind::NotFound, "fold file not found")));
        }
    }
    let train_paths: Vec<PathBuf> = config
        .folds
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != config.test_fold)
        .map(|(_, p)| p.clone())
        .collect();
    let train = AssertionSource::from_paths(train_paths).with_predicate(config.predicate.clone());
    let test = AssertionSource::new(config.folds[config.test_fold].clone()).with_predicate(config.predicate.clone());

    let mut truth_sets: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    test.visit(|s, t| {
        match truth_sets.get_mut(s) {
            Some(set) => {
                if !set.contains(t) {
                    set.insert(t.to_string());
                }
            }
            None => {
                truth_sets.insert(s.to_string(), BTreeSet::from([t.to_string()]));
            }
        }
    })?;
    let mut candidates: Vec<(&String, usize)> = truth_sets
        .keys()
        .filter_map(|s| store.row_of(s).map(|r| (s, r)))
        .collect();
    let unembedded = truth_sets.len() - candidates.len();
    let candidate_count = candidates.len();
    if config.sample_size > candidate_count {
        log::warn!(
            "sample size {} exceeds the {candidate_count} embedded test entities; using all",
            config.sample_size
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ (config.test_fold as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    candidates.shuffle(&mut rng);
    candidates.truncate(config.sample_size);
    candidates.sort_unstable();

    let started = Instant::now();
    let (census, _) = count_types(&train, store)?;
    let training_entities = census.entity_count();
    match config.method {
        Method::Embedding(normalizer) => {
            let mut acc = census.accumulator(store);
            train.visit(|s, t| {
                acc.observe(s, t);
            })?;
            let model = acc.finalize();
            let build_seconds = started.elapsed().as_secs_f64();
            let scorer = Recommender::new(&model, normalizer);
            let memory = model.vector_bytes() as u64;
            score_fold(config, store, &scorer, &candidates, &truth_sets, build_seconds, memory)
                .map(|f| FoldResult {
                    candidates: candidate_count,
                    unembedded,
                    training_entities,
                    ..f
                })
        }
        Method::Knn(k) => {
            let index = KnnIndex::build(store, &census, k)?;
            drop(census);
            let build_seconds = started.elapsed().as_secs_f64();
            let memory = index.memory_bytes() as u64;
            score_fold(config, store, &index, &candidates, &truth_sets, build_seconds, memory)
                .map(|f| FoldResult {
                    candidates: candidate_count,
                    unembedded,
                    training_entities,
                    ..f
                })
        }
    }
}

fn score_fold<S: TypeScorer>(
    config: &ExperimentConfig,
    store: &EntityEmbeddingStore,
    scorer: &S,
    sample: &[(&String, usize)],
    truth_sets: &BTreeMap<String, BTreeSet<String>>,
    build_seconds: f64,
    memory: u64,
) -> Result<FoldResult> {
    let mut acc = RecallAccumulator::new(config.k_max);
    let mut scoring = std::time::Duration::ZERO;
    for &(iri, row) in sample {
        let t0 = Instant::now();
        let list = scorer.score(store.row(row))?;
        scoring += t0.elapsed();
        let truth = Truth::resolve(truth_sets[iri].iter().map(String::as_str), |t| scorer.type_id(t));
        acc.add(&list, &truth);
    }
    Ok(FoldResult {
        test_fold: config.test_fold,
        sample_requested: config.sample_size,
        candidates: 0,
        evaluated: acc.evaluated(),
        unembedded: 0,
        recall_at_k: acc.mean_recall(),
        recs_per_entity: acc.recs_per_entity(),
        training_entities: 0,
        types: scorer.type_count(),
        memory_estimate_bytes: memory,
        timing: Timing {
            build_seconds,
            scoring_seconds: scoring.as_secs_f64(),
        },
    })
}

/// One row of a method comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub method: String,
    pub recs_per_entity: f64,
    pub scoring_seconds: f64,
    /// Slowest method's scoring time divided by this one's.
    pub speedup: f64,
    pub recall_at_k: Vec<f64>,
    /// Recall@k minus the first report's Recall@k.
    pub delta_recall_at_k: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub k_max: usize,
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("method\trecs_per_entity\tscoring_seconds\tspeedup");
        for k in 1..=self.k_max {
            let _ = write!(s, "\trecall@{k}");
        }
        for k in 1..=self.k_max {
            let _ = write!(s, "\tdelta_recall@{k}");
        }
        s.push('\n');
        for r in &self.rows {
            let _ = write!(s, "{}\t{}\t{}\t{}", r.method, r.recs_per_entity, r.scoring_seconds, r.speedup);
            for x in r.recall_at_k.iter().chain(&r.delta_recall_at_k) {
                let _ = write!(s, "\t{x}");
            }
            s.push('\n');
        }
        s
    }
}

/// Lines up recall curves, recommendation counts and timings. Curves are cut
/// to the shortest `k_max` present.
pub fn compare_methods(reports: &[EvalReport]) -> Result<Comparison> {
    let first = reports
        .first()
        .ok_or_else(|| Error::Data("no reports to compare".into()))?;
    let k_max = reports.iter().map(|r| r.k_max.min(r.recall_at_k.len())).min().unwrap_or(0);
    if reports.iter().any(|r| r.k_max != first.k_max) {
        log::warn!("reports differ in k_max; truncating to {k_max}");
    }
    let slowest = reports
        .iter()
        .map(|r| r.timing.scoring_seconds)
        .fold(0.0f64, f64::max);
    let rows = reports
        .iter()
        .map(|r| {
            let t = r.timing.scoring_seconds;
            let speedup = if t > 0.0 { slowest / t } else { 1.0 };
            let recall: Vec<f64> = r.recall_at_k[..k_max].to_vec();
            let delta = recall.iter().zip(&first.recall_at_k).map(|(a, b)| a - b).collect();
            ComparisonRow {
                method: r.method.clone(),
                recs_per_entity: r.recs_per_entity,
                scoring_seconds: t,
                speedup,
                recall_at_k: recall,
                delta_recall_at_k: delta,
            }
        })
        .collect();
    Ok(Comparison { k_max, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_parse() {
        assert_eq!("embedding".parse::<Method>().unwrap(), Method::Embedding(Normalizer::Softmax));
        assert_eq!("knn-10".parse::<Method>().unwrap(), Method::Knn(10));
        assert_eq!("5nn".parse::<Method>().unwrap(), Method::Knn(5));
        assert!("knn-0".parse::<Method>().is_err());
        assert!("svm".parse::<Method>().is_err());
    }

    fn report(method: &str, k_max: usize, recall: f64, secs: f64) -> EvalReport {
        EvalReport {
            method: method.into(),
            seed: 0,
            k_max,
            recall_at_k: vec![recall; k_max],
            recs_per_entity: 1.0,
            memory_estimate_bytes: 0,
            timing: Timing {
                build_seconds: 0.0,
                scoring_seconds: secs,
            },
            folds: vec![],
        }
    }

    #[test]
    fn identical_reports_have_zero_deltas() {
        let r = report("embedding", 3, 0.5, 2.0);
        let c = compare_methods(&[r.clone(), r]).unwrap();
        for row in &c.rows {
            assert!(row.delta_recall_at_k.iter().all(|&d| d == 0.0));
            assert_eq!(row.speedup, 1.0);
        }
    }

    #[test]
    fn speedup_relative_to_slowest() {
        let c = compare_methods(&[report("embedding", 3, 0.9, 0.5), report("knn-10", 3, 0.8, 10.0)]).unwrap();
        assert_eq!(c.rows[0].speedup, 20.0);
        assert_eq!(c.rows[1].speedup, 1.0);
        assert!((c.rows[1].delta_recall_at_k[0] + 0.1).abs() < 1e-12);
        let tsv = c.to_tsv();
        assert_eq!(tsv.lines().count(), 3);
        assert!(tsv.starts_with("method\trecs_per_entity\tscoring_seconds\tspeedup\trecall@1"));
    }

    #[test]
    fn mismatched_k_max_truncates() {
        let c = compare_methods(&[report("a", 5, 0.5, 1.0), report("b", 3, 0.5, 1.0)]).unwrap();
        assert_eq!(c.k_max, 3);
        assert!(c.rows.iter().all(|r| r.recall_at_k.len() == 3));
    }

    #[test]
    fn empty_input_is_fatal() {
        assert!(compare_methods(&[]).is_err());
    }
}
