//! The embedded corpus of published implementations and its verifier.

use std::fmt;
use std::sync::OnceLock;

use super::text::{parse_with_domain, DEFAULT_DOMAIN};
use super::{verify, Counterexample, StrictImplementation};
use crate::chain::{enumerate_chains, is_supermodular_on_chain};
use crate::error::{Error, Result};
use crate::morphism::{compute_core, UnaryMap};
use crate::predicate::{Predicate, PredicateSet};

const CORPUS: &str = include_str!("../../data/corpus.txt");

/// A map of the target onto a two-element predicate claimed to be its core.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreAnnotation {
    pub map: UnaryMap,
    pub matrix: Predicate,
}

impl CoreAnnotation {
    /// The map must send satisfying tuples of `target` to satisfying tuples
    /// of `matrix`, `matrix` must embed back into `target`, and `matrix` must
    /// be a core that is supermodular on neither chain of `{0, 1}`.
    pub fn check(&self, target: &Predicate) -> Result<bool> {
        let m = &self.matrix;
        if m.domain() != 2 || m.arity() != target.arity() || self.map.domain() != target.domain() {
            return Ok(false);
        }
        if self.map.image().iter().any(|&v| v >= 2) {
            return Ok(false);
        }
        for i in 0..target.len() {
            if target.at(i) && !m.get(&self.map.apply_tuple(&target.tuple_of(i))) {
                return Ok(false);
            }
        }
        let d = target.domain();
        let embeds = (0..d).any(|a| {
            (0..d).filter(|&b| b != a).any(|b| {
                let iota = [a, b];
                (0..m.len()).all(|i| {
                    let t: Vec<usize> = m.tuple_of(i).iter().map(|&v| iota[v]).collect();
                    !m.at(i) || target.get(&t)
                })
            })
        });
        let set = PredicateSet::new(2, vec![m.clone()])?;
        let is_core = compute_core(&set)?.size() == 2;
        let mut nowhere = true;
        for chain in enumerate_chains(2, false)? {
            nowhere &= !is_supermodular_on_chain(m, &chain)?.holds;
        }
        Ok(embeds && is_core && nowhere)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusEntry {
    pub id: String,
    pub citation: String,
    pub implementation: StrictImplementation,
    pub core: Option<CoreAnnotation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntryReport {
    pub id: String,
    pub citation: String,
    pub valid: bool,
    pub counterexample: Option<Counterexample>,
    /// `None` when the entry carries no core annotation.
    pub core_ok: Option<bool>,
}

impl EntryReport {
    pub fn passed(&self) -> bool {
        self.valid && self.core_ok != Some(false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusReport {
    pub entries: Vec<EntryReport>,
}

impl CorpusReport {
    pub fn total(&self) -> usize {
        self.entries.len()
    }

    pub fn passed(&self) -> usize {
        self.entries.iter().filter(|e| e.passed()).count()
    }

    pub fn all_passed(&self) -> bool {
        self.passed() == self.total()
    }
}

impl fmt::Display for CorpusReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            let status = if e.passed() { "ok  " } else { "FAIL" };
            write!(f, "{status} {:<18} {}", e.id, e.citation)?;
            if let Some(c) = &e.counterexample {
                write!(f, " [primary {:?}: max {} expected {}]", c.primary, c.achieved, c.expected)?;
            }
            if e.core_ok == Some(false) {
                write!(f, " [core annotation rejected]")?;
            }
            writeln!(f)?;
        }
        write!(f, "{}/{} implementations verified", self.passed(), self.total())
    }
}

pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>> {
    let mut blocks: Vec<(usize, String, Vec<&str>)> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if let Some(id) = trimmed.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            blocks.push((n + 1, id.trim().to_string(), Vec::new()));
        } else if let Some((_, _, body)) = blocks.last_mut() {
            body.push(line);
        } else if !trimmed.is_empty() && !trimmed.starts_with('#') {
            return Err(Error::parse(n + 1, "text before the first `[id]`"));
        }
    }
    let mut out = Vec::new();
    for (start, id, body) in blocks {
        let mut citation = String::new();
        let mut core = None;
        let mut rest = Vec::new();
        for line in body {
            let t = line.trim();
            if let Some(c) = t.strip_prefix("cite:") {
                citation = c.trim().to_string();
            } else if let Some(c) = t.strip_prefix("core:") {
                core = Some(c.trim().to_string());
                rest.push("");
            } else {
                rest.push(line);
            }
        }
        let relocate = |e: Error| match e {
            Error::Parse { line, message } => Error::parse(start + line, format!("[{id}] {message}")),
            e => Error::parse(start, format!("[{id}] {e}")),
        };
        let implementation = parse_with_domain(&rest.join("\n"), DEFAULT_DOMAIN).map_err(relocate)?;
        let core = match core {
            Some(text) => {
                let (map, matrix) = text
                    .trim()
                    .rsplit_once(' ')
                    .ok_or_else(|| Error::parse(start, format!("[{id}] core needs a map and a matrix")))?;
                Some(CoreAnnotation { map: map.trim().parse()?, matrix: Predicate::parse(matrix, 2)? })
            }
            None => None,
        };
        out.push(CorpusEntry { id, citation, implementation, core });
    }
    Ok(out)
}

/// The embedded corpus, parsed once.
pub fn entries() -> &'static [CorpusEntry] {
    static ENTRIES: OnceLock<Vec<CorpusEntry>> = OnceLock::new();
    ENTRIES.get_or_init(|| parse_corpus(CORPUS).expect("embedded corpus is well-formed"))
}

pub fn find(id: &str) -> Option<&'static CorpusEntry> {
    entries().iter().find(|e| e.id == id)
}

pub fn verify_entry(entry: &CorpusEntry) -> EntryReport {
    let (valid, counterexample) = match verify(&entry.implementation) {
        Ok(v) => (v.valid, v.counterexample),
        Err(_) => (false, None),
    };
    let core_ok = entry.core.as_ref().map(|c| c.check(&entry.implementation.target).unwrap_or(false));
    EntryReport { id: entry.id.clone(), citation: entry.citation.clone(), valid, counterexample, core_ok }
}

pub fn verify_entries(entries: &[CorpusEntry]) -> CorpusReport {
    CorpusReport { entries: entries.iter().map(verify_entry).collect() }
}

pub fn verify_corpus() -> CorpusReport {
    verify_entries(entries())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_corpus_verifies() {
        let report = verify_corpus();
        for e in &report.entries {
            assert!(e.passed(), "{} failed: {:?}", e.id, e);
        }
        assert_eq!(report.total(), 69);
        assert_eq!(entries().iter().filter(|e| e.id.starts_with("case")).count(), 54);
    }

    #[test]
    fn annotations_are_checked() {
        let e = find("case5.1").unwrap();
        assert_eq!(verify_entry(e).core_ok, Some(true));
        let mut bad = e.clone();
        bad.core.as_mut().unwrap().matrix = Predicate::parse("10/01", 2).unwrap();
        assert_eq!(verify_entry(&bad).core_ok, Some(false));
        assert!(!verify_entry(&bad).passed());
    }

    #[test]
    fn parse_errors_carry_block() {
        let err = parse_corpus("[a]\ncite: x\ntarget: neq3\nalpha: 1\nprimary: x y\nterms: neq3(x,q)\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        assert!(parse_corpus("stray\n[a]\n").is_err());
    }
}
