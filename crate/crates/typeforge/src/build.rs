//! Building a type model from an assertion file: two physical passes.

use std::path::Path;

use serde::Serialize;
use typeforge_core::embedder::PassStats;
use typeforge_core::{EntityEmbeddingStore, TypeCensus, TypeCounter, TypeEmbeddingModel};

use crate::error::{Error, Result};
use crate::ntriples::{AssertionSource, StreamReport, StreamStats};
use crate::report::write_jsonl;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coverage {
    pub assertions: u64,
    pub distinct_pairs: u64,
    pub duplicate_assertions: u64,
    /// Assertions whose subject has no embedding; excluded from both passes.
    pub unembedded_assertions: u64,
    /// Pass-two assertions pass one never counted (the file changed).
    pub mismatched_assertions: u64,
    pub entities: usize,
    pub types: usize,
    pub dropped_types: usize,
}

#[derive(Debug, Clone)]
pub struct BuildOutput {
    pub model: TypeEmbeddingModel,
    pub census: TypeCensus,
    pub coverage: Coverage,
    pub stream: StreamReport,
}

impl BuildOutput {
    /// Coverage, dropped types and skipped lines as JSON lines.
    pub fn write_report(&self, path: &Path) -> Result<()> {
        #[derive(Serialize)]
        #[serde(tag = "kind", rename_all = "snake_case")]
        enum Line<'a> {
            Coverage(&'a Coverage),
            Stream(&'a StreamStats),
            Dropped { type_iri: &'a str },
            Skip(&'a crate::report::SkipRecord),
        }
        let lines = std::iter::once(Line::Coverage(&self.coverage))
            .chain(std::iter::once(Line::Stream(&self.stream.stats)))
            .chain(self.model.dropped().iter().map(|t| Line::Dropped { type_iri: t }))
            .chain(self.stream.skips.iter().map(Line::Skip));
        write_jsonl(path, lines)
    }
}

/// First pass only: distinct types per embedded entity.
pub fn count_types(source: &AssertionSource, store: &EntityEmbeddingStore) -> Result<(TypeCensus, StreamReport)> {
    let mut counter = TypeCounter::new(store);
    let report = source.visit(|s, t| {
        counter.observe(s, t);
    })?;
    Ok((counter.finish(), report))
}

fn coverage(census: &TypeCensus, pass2: PassStats, model: &TypeEmbeddingModel) -> Coverage {
    let pass1 = census.stats();
    Coverage {
        assertions: pass1.assertions,
        distinct_pairs: pass1.added,
        duplicate_assertions: pass1.duplicates,
        unembedded_assertions: pass1.unembedded,
        mismatched_assertions: pass2.mismatched,
        entities: census.entity_count(),
        types: model.len(),
        dropped_types: model.dropped().len(),
    }
}

fn finish(census: TypeCensus, model: TypeEmbeddingModel, pass2: PassStats, stream: StreamReport) -> BuildOutput {
    let coverage = coverage(&census, pass2, &model);
    if coverage.mismatched_assertions > 0 {
        log::warn!(
            "{} assertions in pass two were not seen in pass one",
            coverage.mismatched_assertions
        );
    }
    if coverage.unembedded_assertions > 0 {
        log::info!(
            "{} of {} assertions have no entity embedding",
            coverage.unembedded_assertions,
            coverage.assertions
        );
    }
    BuildOutput {
        model,
        census,
        coverage,
        stream,
    }
}

/// Derives the type model with two sequential passes over `source`.
pub fn build_model(source: &AssertionSource, store: &EntityEmbeddingStore) -> Result<BuildOutput> {
    let (census, stream) = count_types(source, store)?;
    let mut acc = census.accumulator(store);
    source.visit(|s, t| {
        acc.observe(s, t);
    })?;
    let pass2 = acc.stats();
    let model = acc.finalize();
    Ok(finish(census, model, pass2, stream))
}

/// Like [`build_model`], but pass two runs on `shards` threads, each
/// streaming the file and keeping only the types it owns (`type id %
/// shards`). Per-type sums are therefore computed exactly as in the
/// sequential pass.
pub fn build_model_sharded(
    source: &AssertionSource,
    store: &EntityEmbeddingStore,
    shards: usize,
) -> Result<BuildOutput> {
    if shards <= 1 {
        return build_model(source, store);
    }
    let (census, stream) = count_types(source, store)?;
    let results: Vec<Result<_>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..shards)
            .map(|shard| {
                let census = &census;
                scope.spawn(move || {
                    let mut acc = census.accumulator(store);
                    source.visit(|s, t| {
                        if census.type_id(t).is_some_and(|id| id.index() % shards == shard) {
                            acc.observe(s, t);
                        }
                    })?;
                    Ok(acc)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Data("shard thread panicked".into()))))
            .collect()
    });
    let mut merged: Option<typeforge_core::Accumulator<'_>> = None;
    for r in results {
        let acc = r?;
        match merged.as_mut() {
            None => merged = Some(acc),
            Some(m) => m.merge(acc),
        }
    }
    let acc = merged.unwrap_or_else(|| census.accumulator(store));
    let pass2 = acc.stats();
    let model = acc.finalize();
    Ok(finish(census, model, pass2, stream))
}
