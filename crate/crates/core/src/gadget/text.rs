//! Text form of an implementation:
//!
//! ```text
//! domain: 3
//! let f = 011/001/000
//! target: neq3
//! alpha: 1
//! primary: x y
//! aux:
//! terms: f(x,y) + f(y,x)
//! ```
//!
//! `;` separates fields like a newline. Terms may be joined with `+` or
//! given one per line after `terms:`. Predicate names resolve against `let`
//! definitions, then the named library, then as inline matrices.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use super::{StrictImplementation, Term};
use crate::error::{Error, Result};
use crate::library;
use crate::predicate::Predicate;

pub const DEFAULT_DOMAIN: usize = 3;

/// Resolves a predicate name or inline matrix for the given domain.
pub fn resolve(name: &str, domain: usize, lets: &HashMap<String, Predicate>) -> Result<Predicate> {
    if let Some(p) = lets.get(name) {
        return Ok(p.clone());
    }
    match library::lookup(name, domain) {
        Err(Error::UnknownPredicate(_)) if looks_like_matrix(name) => Predicate::parse(name, domain),
        other => other,
    }
}

fn looks_like_matrix(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c == '0' || c == '1' || c == '/' || c.is_whitespace())
}

fn valid_variable(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '\'')
}

/// Splits into `(line number, field)` pairs, dropping comments and blanks.
pub(crate) fn fields(text: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for part in line.split(';') {
            let part = part.trim();
            if !part.is_empty() {
                out.push((n + 1, part.to_string()));
            }
        }
    }
    out
}

/// Parses with `default_domain` used when no `domain:` field is given.
pub fn parse_with_domain(text: &str, default_domain: usize) -> Result<StrictImplementation> {
    let mut domain = None;
    let mut lets: Vec<(usize, String, String)> = Vec::new();
    let mut target = None;
    let mut alpha = None;
    let mut primary = None;
    let mut aux = None;
    let mut term_text: Vec<(usize, String)> = Vec::new();
    let mut in_terms = false;

    for (line, field) in fields(text) {
        if let Some(rest) = field.strip_prefix("let ") {
            let (name, matrix) =
                rest.split_once('=').ok_or_else(|| Error::parse(line, "expected `let NAME = MATRIX`"))?;
            lets.push((line, name.trim().to_string(), matrix.trim().to_string()));
            in_terms = false;
            continue;
        }
        let keyed = field.split_once(':').filter(|(k, _)| {
            matches!(k.trim(), "domain" | "target" | "alpha" | "primary" | "aux" | "auxiliary" | "terms")
        });
        let Some((key, value)) = keyed else {
            if in_terms {
                term_text.push((line, field));
                continue;
            }
            return Err(Error::parse(line, format!("unexpected line {field:?}")));
        };
        let value = value.trim().to_string();
        in_terms = false;
        match key.trim() {
            "domain" => {
                let d: usize = value.parse().map_err(|_| Error::parse(line, "domain must be an integer"))?;
                domain = Some(d);
            }
            "target" => target = Some((line, value)),
            "alpha" => {
                let a: i64 = value.parse().map_err(|_| Error::parse(line, "alpha must be an integer"))?;
                if a < 1 {
                    return Err(Error::parse(line, "alpha must be at least 1"));
                }
                alpha = Some(u32::try_from(a).map_err(|_| Error::parse(line, "alpha too large"))?);
            }
            "primary" => primary = Some((line, value)),
            "aux" | "auxiliary" => aux = Some((line, value)),
            _ => {
                in_terms = true;
                if !value.is_empty() {
                    term_text.push((line, value));
                }
            }
        }
    }

    let d = domain.unwrap_or(default_domain);
    if d < 2 {
        return Err(Error::DomainTooSmall { min: 2, got: d });
    }
    let mut defs = HashMap::new();
    for (line, name, matrix) in lets {
        let p = resolve(&matrix, d, &defs).map_err(|e| Error::parse(line, e.to_string()))?;
        defs.insert(name, p);
    }
    let (tline, tname) = target.ok_or_else(|| Error::parse(0, "missing `target:`"))?;
    let target = resolve(&tname, d, &defs).map_err(|e| Error::parse(tline, e.to_string()))?;
    let alpha = alpha.ok_or_else(|| Error::parse(0, "missing `alpha:`"))?;
    let split_vars = |(line, s): (usize, String)| -> Result<Vec<String>> {
        s.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|v| !v.is_empty())
            .map(|v| {
                if valid_variable(v) {
                    Ok(v.to_string())
                } else {
                    Err(Error::parse(line, format!("bad variable name {v:?}")))
                }
            })
            .collect()
    };
    let primary = split_vars(primary.ok_or_else(|| Error::parse(0, "missing `primary:`"))?)?;
    let auxiliary = match aux {
        Some(a) => split_vars(a)?,
        None => Vec::new(),
    };
    let index: HashMap<&str, usize> =
        primary.iter().chain(&auxiliary).enumerate().map(|(i, v)| (v.as_str(), i)).collect();

    let mut terms = Vec::new();
    for (line, text) in term_text {
        for piece in text.split('+') {
            let piece = piece.trim();
            if piece.is_empty() {
                continue;
            }
            let open = piece.rfind('(').ok_or_else(|| Error::parse(line, format!("bad term {piece:?}")))?;
            let args =
                piece[open + 1..].strip_suffix(')').ok_or_else(|| Error::parse(line, format!("bad term {piece:?}")))?;
            let name = piece[..open].trim();
            let predicate = resolve(name, d, &defs).map_err(|e| match e {
                Error::UnknownPredicate(_) => e,
                e => Error::parse(line, e.to_string()),
            })?;
            let scope = args
                .split(',')
                .map(|v| {
                    let v = v.trim();
                    index.get(v).copied().ok_or_else(|| Error::DanglingVariable(v.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            terms.push(Term { name: name.to_string(), predicate, scope });
        }
    }
    let mut imp = StrictImplementation::new(target, alpha, primary, auxiliary, terms)?;
    imp.target_name = Some(tname);
    Ok(imp)
}

impl FromStr for StrictImplementation {
    type Err = Error;

    /// The domain defaults to three elements when no `domain:` field is given.
    fn from_str(s: &str) -> Result<Self> {
        parse_with_domain(s, DEFAULT_DOMAIN)
    }
}

fn resolves_to(name: &str, p: &Predicate) -> bool {
    resolve(name, p.domain(), &HashMap::new()).is_ok_and(|q| &q == p)
}

impl fmt::Display for StrictImplementation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "domain: {}", self.domain())?;
        let mut defined: Vec<&str> = Vec::new();
        for t in &self.terms {
            if !resolves_to(&t.name, &t.predicate) && !defined.contains(&t.name.as_str()) {
                writeln!(f, "let {} = {}", t.name, t.predicate)?;
                defined.push(&t.name);
            }
        }
        let target = match &self.target_name {
            Some(n) if resolves_to(n, &self.target) => n.clone(),
            _ => self.target.to_string(),
        };
        writeln!(f, "target: {target}")?;
        writeln!(f, "alpha: {}", self.alpha)?;
        writeln!(f, "primary: {}", self.primary.join(" "))?;
        if self.auxiliary.is_empty() {
            writeln!(f, "aux:")?;
        } else {
            writeln!(f, "aux: {}", self.auxiliary.join(" "))?;
        }
        let terms: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let vars: Vec<&str> = t.scope.iter().map(|&v| self.variable_name(v)).collect();
                format!("{}({})", t.name, vars.join(","))
            })
            .collect();
        write!(f, "terms: {}", terms.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::verify;

    #[test]
    fn parse_and_print() {
        let text = "domain: 3\nlet f = 011/001/000\ntarget: neq3\nalpha: 1\nprimary: x y\naux:\nterms: f(x,y) + f(y,x)";
        let imp: StrictImplementation = text.parse().unwrap();
        assert_eq!(imp.terms.len(), 2);
        assert!(verify(&imp).unwrap().valid);
        assert_eq!(imp.to_string(), text);
        let again: StrictImplementation = imp.to_string().parse().unwrap();
        assert_eq!(again, imp);
    }

    #[test]
    fn semicolons_and_term_lines() {
        let text = "target: 011/101/110 ; alpha: 1 ; primary: x y ; aux: ;\nterms:\n  case1.f1(x,y)\n  case1.f1(y,x)\n";
        let imp: StrictImplementation = text.parse().unwrap();
        assert_eq!(imp.terms.len(), 2);
        assert!(verify(&imp).unwrap().valid);
    }

    #[test]
    fn malformed_inputs() {
        let missing = "target: neq3\nalpha: 1\nprimary: x y\nterms: neq3(x,q)";
        assert_eq!(missing.parse::<StrictImplementation>(), Err(Error::DanglingVariable("q".into())));
        let unknown = "target: neq3\nalpha: 1\nprimary: x y\nterms: nothing(x,y)";
        assert!(matches!(unknown.parse::<StrictImplementation>(), Err(Error::UnknownPredicate(_))));
        let arity = "target: neq3\nalpha: 1\nprimary: x y\nterms: neq3(x)";
        assert!(matches!(arity.parse::<StrictImplementation>(), Err(Error::ArityMismatch { .. })));
        let zero = "target: neq3\nalpha: 0\nprimary: x y\nterms: neq3(x,y)";
        assert!(zero.parse::<StrictImplementation>().is_err());
        let junk = "target: neq3\nwhat is this";
        assert!(matches!(junk.parse::<StrictImplementation>(), Err(Error::Parse { .. })));
    }
}
