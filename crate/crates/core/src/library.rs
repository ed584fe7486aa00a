//! Named predicates: disequalities, equalities, the directed-cut arc, the
//! supermodular list `h1..h13`, and every predicate used by the embedded
//! implementation corpus. Unary predicates `u{S}` exist for every domain.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::predicate::Predicate;

const LIBRARY: &str = include_str!("../data/library.txt");

#[derive(Clone, Debug)]
pub struct NamedPredicate {
    pub name: String,
    pub predicate: Predicate,
    pub citation: String,
}

fn table() -> &'static [NamedPredicate] {
    static TABLE: OnceLock<Vec<NamedPredicate>> = OnceLock::new();
    TABLE.get_or_init(|| parse_library(LIBRARY).expect("embedded library is well-formed"))
}

fn parse_library(text: &str) -> Result<Vec<NamedPredicate>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        let [name, domain, matrix, citation] = fields[..] else {
            return Err(Error::parse(n + 1, "expected `name | domain | matrix | description`"));
        };
        let domain: usize = domain.parse().map_err(|_| Error::parse(n + 1, "bad domain"))?;
        out.push(NamedPredicate {
            name: name.to_string(),
            predicate: Predicate::parse(matrix, domain)?,
            citation: citation.to_string(),
        });
    }
    Ok(out)
}

/// Every listed predicate (unaries excluded).
pub fn entries() -> &'static [NamedPredicate] {
    table()
}

/// Resolves a library name for the given domain. `u{0,2}` style names are
/// accepted for any domain.
pub fn lookup(name: &str, domain: usize) -> Result<Predicate> {
    if let Some(support) = parse_unary_name(name) {
        return Predicate::unary(domain, &support?);
    }
    match table().iter().find(|e| e.name == name) {
        Some(e) if e.predicate.domain() == domain => Ok(e.predicate.clone()),
        Some(e) => Err(Error::DomainMismatch(domain, e.predicate.domain())),
        None => Err(Error::UnknownPredicate(name.to_string())),
    }
}

pub fn citation(name: &str) -> Option<&'static str> {
    table().iter().find(|e| e.name == name).map(|e| e.citation.as_str())
}

/// The first library name whose table equals `p`, with unaries named `u{..}`.
pub fn name_of(p: &Predicate) -> Option<String> {
    if p.arity() == 1 && !p.is_trivial() {
        return Some(unary_name(&p.support().into_iter().collect::<Vec<_>>()));
    }
    table().iter().find(|e| &e.predicate == p).map(|e| e.name.clone())
}

pub fn unary_name(support: &[usize]) -> String {
    let parts: Vec<String> = support.iter().map(usize::to_string).collect();
    format!("u{{{}}}", parts.join(","))
}

fn parse_unary_name(name: &str) -> Option<Result<Vec<usize>>> {
    let inner = name.strip_prefix("u{")?.strip_suffix('}')?;
    Some(
        inner
            .split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|_| Error::UnknownPredicate(name.to_string())))
            .collect(),
    )
}

/// `U_D`: all non-trivial unary predicates, ordered by support bitmask.
pub fn all_unaries(domain: usize) -> Vec<Predicate> {
    (1u32..(1 << domain))
        .map(|mask| {
            let support: Vec<usize> = (0..domain).filter(|&v| mask >> v & 1 == 1).collect();
            Predicate::unary(domain, &support).expect("support in range")
        })
        .collect()
}

/// `C_D`: the singleton unary predicates.
pub fn singletons(domain: usize) -> Vec<Predicate> {
    (0..domain).map(|v| Predicate::unary(domain, &[v]).expect("value in range")).collect()
}

/// `neq_k` for any `k >= 2`.
pub fn neq(k: usize) -> Predicate {
    Predicate::from_fn(k, 2, |t| t[0] != t[1]).expect("k >= 1")
}

/// `h1..h13` in order.
pub fn supermodular_list() -> Vec<Predicate> {
    (1..=13).map(|i| lookup(&format!("h{i}"), 3).expect("h-list present")).collect()
}
