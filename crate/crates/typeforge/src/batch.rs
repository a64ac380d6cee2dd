//! Batch recommendation over a list of entity ids, and its JSON-lines output.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use typeforge_core::{EntityEmbeddingStore, RecommendationList, TypeScorer};

use crate::error::{Error, Result};
use crate::io::{open_reader, read_line};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BatchOutput {
    /// One list per resolvable id, in input order.
    pub results: Vec<(String, RecommendationList)>,
    /// Ids with no embedding, in input order.
    pub missing: Vec<String>,
}

/// Reads one entity IRI per line. Blank lines and `#` comments are ignored;
/// surrounding angle brackets are stripped.
pub fn read_ids(path: &Path) -> Result<Vec<String>> {
    let mut reader = open_reader(path)?;
    let (mut raw, mut line) = (Vec::new(), String::new());
    let mut ids = Vec::new();
    while read_line(reader.as_mut(), &mut raw, &mut line).map_err(|e| Error::io(path, e))? {
        let s = line.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let s = s.strip_prefix('<').and_then(|r| r.strip_suffix('>')).unwrap_or(s);
        ids.push(s.to_string());
    }
    Ok(ids)
}

/// Scores every id found in `store`, truncating each list to `top_k` when
/// given. With `threads > 1` ids are split into contiguous chunks scored in
/// parallel; output order always follows input order.
pub fn recommend_batch<S>(
    scorer: &S,
    store: &EntityEmbeddingStore,
    ids: &[String],
    top_k: Option<usize>,
    threads: usize,
) -> Result<BatchOutput>
where
    S: TypeScorer + Sync,
{
    let score_chunk = |chunk: &[String]| -> Result<Vec<(String, Option<RecommendationList>)>> {
        chunk
            .iter()
            .map(|id| {
                let Some(v) = store.get_vector(id) else {
                    return Ok((id.clone(), None));
                };
                let mut list = scorer.score(v)?;
                if let Some(k) = top_k {
                    list = list.top_k(k);
                }
                Ok((id.clone(), Some(list)))
            })
            .collect()
    };

    let scored: Vec<(String, Option<RecommendationList>)> = if threads > 1 && ids.len() > 1 {
        let chunk = ids.len().div_ceil(threads);
        std::thread::scope(|scope| {
            let handles: Vec<_> = ids.chunks(chunk).map(|c| scope.spawn(move || score_chunk(c))).collect();
            let mut out = Vec::with_capacity(ids.len());
            for h in handles {
                out.extend(h.join().map_err(|_| Error::Data("scoring thread panicked".into()))??);
            }
            Ok::<_, Error>(out)
        })?
    } else {
        score_chunk(ids)?
    };

    let mut out = BatchOutput::default();
    for (id, list) in scored {
        match list {
            Some(l) => out.results.push((id, l)),
            None => out.missing.push(id),
        }
    }
    if !out.missing.is_empty() {
        log::warn!("{} ids have no embedding and were skipped", out.missing.len());
    }
    Ok(out)
}

#[derive(Serialize)]
struct RecommendationLine<'a> {
    id: &'a str,
    types: Vec<(&'a str, f64, f64)>,
}

/// `{"id": ..., "types": [[type, raw, probability], ...]}` per line.
pub fn write_recommendations<S: TypeScorer, W: Write>(
    scorer: &S,
    batch: &BatchOutput,
    mut w: W,
) -> std::io::Result<()> {
    for (id, list) in &batch.results {
        let line = RecommendationLine {
            id,
            types: list
                .entries
                .iter()
                .map(|e| (scorer.type_iri(e.type_id), e.raw, e.probability))
                .collect(),
        };
        serde_json::to_writer(&mut w, &line)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}
