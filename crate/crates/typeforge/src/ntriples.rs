//! Line-oriented N-Triples reading for type assertions and `subClassOf`.
//!
//! Each line is parsed on its own; there is no Turtle prefix handling. A line
//! that does not parse is skipped and reported, never fatal. IRIs are kept
//! verbatim (without angle brackets and without unescaping).

use std::path::{Path, PathBuf};

use serde::Serialize;
use typeforge_core::{OntologyIndex, TypeAssertion};

use crate::error::{Error, Result};
use crate::io::{open_reader, read_line};
use crate::report::SkipRecord;

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDFS_SUBCLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Term<'a> {
    Iri(&'a str),
    Blank(&'a str),
    /// Full literal token including quotes and any language tag or datatype.
    Literal(&'a str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triple<'a> {
    pub subject: Term<'a>,
    pub predicate: &'a str,
    pub object: Term<'a>,
}

fn parse_iri(s: &str) -> std::result::Result<(&str, &str), &'static str> {
    let rest = s.strip_prefix('<').ok_or("expected '<'")?;
    let end = rest.find('>').ok_or("unterminated IRI")?;
    let iri = &rest[..end];
    if iri.is_empty() {
        return Err("empty IRI");
    }
    if iri.contains(|c: char| c.is_whitespace() || c == '<' || c == '"') {
        return Err("invalid character in IRI");
    }
    Ok((iri, &rest[end + 1..]))
}

fn parse_blank(s: &str) -> std::result::Result<(&str, &str), &'static str> {
    let rest = s.strip_prefix("_:").ok_or("expected '_:'")?;
    let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
    if end == 0 {
        return Err("empty blank node label");
    }
    Ok((&rest[..end], &rest[end..]))
}

fn parse_literal(s: &str) -> std::result::Result<(&str, &str), &'static str> {
    let bytes = s.as_bytes();
    debug_assert_eq!(bytes.first(), Some(&b'"'));
    let mut i = 1;
    loop {
        match bytes.get(i) {
            None => return Err("unterminated literal"),
            Some(b'\\') => i += 2,
            Some(b'"') => break,
            Some(_) => i += 1,
        }
    }
    i += 1;
    match bytes.get(i) {
        Some(b'@') => {
            let tag_len = s[i + 1..]
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-'))
                .unwrap_or(s.len() - i - 1);
            if tag_len == 0 {
                return Err("empty language tag");
            }
            i += 1 + tag_len;
        }
        Some(b'^') => {
            let dt = s[i..].strip_prefix("^^").ok_or("expected '^^'")?;
            let (_, rest) = parse_iri(dt)?;
            i = s.len() - rest.len();
        }
        _ => {}
    }
    Ok((&s[..i], &s[i..]))
}

fn parse_term(s: &str) -> std::result::Result<(Term<'_>, &str), &'static str> {
    match s.as_bytes().first() {
        Some(b'<') => parse_iri(s).map(|(t, r)| (Term::Iri(t), r)),
        Some(b'_') => parse_blank(s).map(|(t, r)| (Term::Blank(t), r)),
        Some(b'"') => parse_literal(s).map(|(t, r)| (Term::Literal(t), r)),
        Some(_) => Err("unexpected token"),
        None => Err("unexpected end of line"),
    }
}

/// Parses one line. `Ok(None)` for blank and comment lines.
pub fn parse_line(line: &str) -> std::result::Result<Option<Triple<'_>>, &'static str> {
    let s = line.trim();
    if s.is_empty() || s.starts_with('#') {
        return Ok(None);
    }
    let (subject, rest) = parse_term(s)?;
    if matches!(subject, Term::Literal(_)) {
        return Err("literal in subject position");
    }
    let rest = rest.trim_start();
    let (predicate, rest) = parse_iri(rest).map_err(|_| "predicate must be an IRI")?;
    let (object, rest) = parse_term(rest.trim_start())?;
    let rest = rest.trim_start();
    let rest = rest.strip_prefix('.').ok_or("missing terminating '.'")?;
    let rest = rest.trim_start();
    if !(rest.is_empty() || rest.starts_with('#')) {
        return Err("trailing content after '.'");
    }
    Ok(Some(Triple {
        subject,
        predicate,
        object,
    }))
}

/// Whether `predicate` names `wanted`. The conventional prefixed forms
/// `rdf:type` and `rdfs:subClassOf` are accepted for their full IRIs.
pub fn predicate_matches(predicate: &str, wanted: &str) -> bool {
    predicate == wanted
        || (wanted == RDF_TYPE && predicate == "rdf:type")
        || (wanted == RDFS_SUBCLASS_OF && predicate == "rdfs:subClassOf")
}

/// Line tallies for one pass. Every line lands in exactly one bucket.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StreamStats {
    pub lines: u64,
    pub blank_or_comment: u64,
    pub yielded: u64,
    /// Well-formed triples with a different predicate.
    pub other_predicate: u64,
    /// Matching predicate, blank-node subject.
    pub blank_subject: u64,
    /// Matching predicate, object is a literal or blank node.
    pub non_iri_object: u64,
    pub malformed: u64,
}

impl StreamStats {
    pub fn skipped(&self) -> u64 {
        self.other_predicate + self.blank_subject + self.non_iri_object
    }

    fn add(&mut self, o: &StreamStats) {
        self.lines += o.lines;
        self.blank_or_comment += o.blank_or_comment;
        self.yielded += o.yielded;
        self.other_predicate += o.other_predicate;
        self.blank_subject += o.blank_subject;
        self.non_iri_object += o.non_iri_object;
        self.malformed += o.malformed;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StreamReport {
    pub stats: StreamStats,
    pub skips: Vec<SkipRecord>,
}

/// Visits every `(subject, object)` IRI pair linked by `predicate` in one file.
pub fn visit_file<F>(path: &Path, predicate: &str, mut f: F) -> Result<StreamReport>
where
    F: FnMut(&str, &str),
{
    let mut reader = open_reader(path)?;
    let mut report = StreamReport::default();
    let (mut raw, mut line) = (Vec::new(), String::new());
    let mut n = 0u64;
    while read_line(reader.as_mut(), &mut raw, &mut line).map_err(|e| Error::io(path, e))? {
        n += 1;
        let st = &mut report.stats;
        st.lines += 1;
        match parse_line(&line) {
            Ok(None) => st.blank_or_comment += 1,
            Ok(Some(t)) if !predicate_matches(t.predicate, predicate) => st.other_predicate += 1,
            Ok(Some(t)) => match (t.subject, t.object) {
                (Term::Iri(s), Term::Iri(o)) => {
                    st.yielded += 1;
                    f(s, o);
                }
                (Term::Blank(_), _) => st.blank_subject += 1,
                _ => st.non_iri_object += 1,
            },
            Err(reason) => {
                st.malformed += 1;
                report.skips.push(SkipRecord::new(path, n, reason));
            }
        }
    }
    Ok(report)
}

/// A replayable source of type assertions: one or more N-Triples files read
/// in order. Every call to [`stream`](Self::stream) or [`visit`](Self::visit)
/// re-opens the files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssertionSource {
    paths: Vec<PathBuf>,
    predicate: String,
}

impl AssertionSource {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self::from_paths(vec![path.into()])
    }

    pub fn from_paths(paths: Vec<PathBuf>) -> Self {
        Self {
            paths,
            predicate: RDF_TYPE.to_string(),
        }
    }

    pub fn with_predicate(mut self, predicate: impl Into<String>) -> Self {
        self.predicate = predicate.into();
        self
    }

    pub fn paths(&self) -> &[PathBuf] {
        &self.paths
    }

    pub fn predicate(&self) -> &str {
        &self.predicate
    }

    /// Calls `f(subject, type)` for every type assertion, without allocating
    /// per assertion.
    pub fn visit<F>(&self, mut f: F) -> Result<StreamReport>
    where
        F: FnMut(&str, &str),
    {
        let mut total = StreamReport::default();
        for p in &self.paths {
            let r = visit_file(p, &self.predicate, &mut f)?;
            total.stats.add(&r.stats);
            total.skips.extend(r.skips);
        }
        Ok(total)
    }

    /// Streams owned assertions. Malformed lines are skipped and show up in
    /// [`AssertionStream::report`].
    pub fn stream(&self) -> AssertionStream {
        AssertionStream {
            paths: self.paths.clone(),
            predicate: self.predicate.clone(),
            next_path: 0,
            current: None,
            raw: Vec::new(),
            line: String::new(),
            line_no: 0,
            report: StreamReport::default(),
            failed: false,
        }
    }
}

pub struct AssertionStream {
    paths: Vec<PathBuf>,
    predicate: String,
    next_path: usize,
    current: Option<(PathBuf, Box<dyn std::io::BufRead + Send>)>,
    raw: Vec<u8>,
    line: String,
    line_no: u64,
    report: StreamReport,
    failed: bool,
}

impl AssertionStream {
    pub fn report(&self) -> &StreamReport {
        &self.report
    }
}

impl Iterator for AssertionStream {
    type Item = Result<TypeAssertion>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            if self.current.is_none() {
                let path = self.paths.get(self.next_path)?.clone();
                self.next_path += 1;
                self.line_no = 0;
                match open_reader(&path) {
                    Ok(r) => self.current = Some((path, r)),
                    Err(e) => {
                        self.failed = true;
                        return Some(Err(e));
                    }
                }
            }
            let (path, reader) = self.current.as_mut()?;
            match read_line(reader.as_mut(), &mut self.raw, &mut self.line) {
                Err(e) => {
                    self.failed = true;
                    return Some(Err(Error::io(path, e)));
                }
                Ok(false) => {
                    self.current = None;
                    continue;
                }
                Ok(true) => {}
            }
            self.line_no += 1;
            let st = &mut self.report.stats;
            st.lines += 1;
            match parse_line(&self.line) {
                Ok(None) => st.blank_or_comment += 1,
                Ok(Some(t)) if !predicate_matches(t.predicate, &self.predicate) => {
                    st.other_predicate += 1
                }
                Ok(Some(t)) => match (t.subject, t.object) {
                    (Term::Iri(s), Term::Iri(o)) => {
                        st.yielded += 1;
                        return Some(Ok(TypeAssertion::new(s, o)));
                    }
                    (Term::Blank(_), _) => st.blank_subject += 1,
                    _ => st.non_iri_object += 1,
                },
                Err(reason) => {
                    st.malformed += 1;
                    let rec = SkipRecord::new(path, self.line_no, reason);
                    self.report.skips.push(rec);
                }
            }
        }
    }
}

/// Reads `sub rdfs:subClassOf sup` edges between IRIs; other lines are
/// ignored (and counted).
pub fn build_ontology_index(path: &Path) -> Result<(OntologyIndex, StreamReport)> {
    build_ontology_index_with(path, RDFS_SUBCLASS_OF)
}

pub fn build_ontology_index_with(path: &Path, predicate: &str) -> Result<(OntologyIndex, StreamReport)> {
    let mut index = OntologyIndex::new();
    let report = visit_file(path, predicate, |sub, sup| {
        index.add_subclass(sub, sup);
    })?;
    Ok((index, report))
}
