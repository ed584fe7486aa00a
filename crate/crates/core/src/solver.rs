//! Weighted Max CSP instances, an exhaustive exact solver and the
//! uniform-random baseline.
//!
//! Text format:
//!
//! ```text
//! domain 3 / vars 3
//! 1 neq3 (x0, x1)
//! 2 011/101/110 (x1, x2)
//! ```

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::gadget::display_name;
use crate::predicate::{Predicate, Tuples};

/// Default cap on `d^n` for [`solve_exact`].
pub const DEFAULT_BUDGET: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub predicate: Predicate,
    pub scope: Vec<usize>,
    pub weight: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub domain: usize,
    pub variables: usize,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment {
    pub values: Vec<usize>,
}

impl Assignment {
    pub fn new(values: Vec<usize>) -> Self {
        Assignment { values }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub optimum: u64,
    /// Lexicographically least optimal assignment.
    pub argmax: Assignment,
    pub evaluations: u64,
}

impl Instance {
    pub fn new(domain: usize, variables: usize) -> Result<Self> {
        if domain < 2 {
            return Err(Error::DomainTooSmall { min: 2, got: domain });
        }
        Ok(Instance { domain, variables, constraints: Vec::new() })
    }

    pub fn add(&mut self, predicate: Predicate, scope: Vec<usize>, weight: u64) -> Result<()> {
        let c = Constraint { predicate, scope, weight };
        self.check(&c)?;
        self.constraints.push(c);
        Ok(())
    }

    fn check(&self, c: &Constraint) -> Result<()> {
        if c.predicate.domain() != self.domain {
            return Err(Error::DomainMismatch(self.domain, c.predicate.domain()));
        }
        if c.scope.len() != c.predicate.arity() {
            return Err(Error::ArityMismatch { expected: c.predicate.arity(), got: c.scope.len() });
        }
        if let Some(&v) = c.scope.iter().find(|&&v| v >= self.variables) {
            return Err(Error::ValueOutOfRange { value: v, domain: self.variables });
        }
        if c.weight == 0 {
            return Err(Error::InvalidArgument("weights must be positive".into()));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.domain < 2 {
            return Err(Error::DomainTooSmall { min: 2, got: self.domain });
        }
        self.constraints.iter().try_for_each(|c| self.check(c))
    }

    pub fn total_weight(&self) -> u64 {
        self.constraints.iter().map(|c| c.weight).sum()
    }
}

fn value_of(inst: &Instance, values: &[usize], scratch: &mut Vec<usize>) -> u64 {
    let mut total = 0;
    for c in &inst.constraints {
        scratch.clear();
        scratch.extend(c.scope.iter().map(|&v| values[v]));
        if c.predicate.get(scratch) {
            total += c.weight;
        }
    }
    total
}

pub fn evaluate_assignment(inst: &Instance, a: &Assignment) -> Result<u64> {
    inst.validate()?;
    if a.values.len() != inst.variables {
        return Err(Error::ArityMismatch { expected: inst.variables, got: a.values.len() });
    }
    if let Some(&v) = a.values.iter().find(|&&v| v >= inst.domain) {
        return Err(Error::ValueOutOfRange { value: v, domain: inst.domain });
    }
    Ok(value_of(inst, &a.values, &mut Vec::new()))
}

pub fn solve_exact(inst: &Instance) -> Result<SolveResult> {
    solve_exact_with_budget(inst, DEFAULT_BUDGET)
}

/// Enumerates all `d^n` assignments in lexicographic order, refusing when
/// that count exceeds `budget`.
pub fn solve_exact_with_budget(inst: &Instance, budget: u128) -> Result<SolveResult> {
    inst.validate()?;
    let needed = (inst.domain as u128).checked_pow(inst.variables as u32).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut best: Option<(u64, Vec<usize>)> = None;
    let mut evaluations = 0;
    let mut scratch = Vec::new();
    let mut all = Tuples::new(inst.domain, inst.variables);
    while let Some(values) = all.next_tuple() {
        evaluations += 1;
        let v = value_of(inst, values, &mut scratch);
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, values.to_vec()));
        }
    }
    let (optimum, values) = best.expect("at least one assignment");
    Ok(SolveResult { optimum, argmax: Assignment::new(values), evaluations })
}

/// Exact expectation of the objective under a uniformly random assignment.
pub fn expected_random_value(inst: &Instance) -> Result<Ratio<u128>> {
    inst.validate()?;
    let d = inst.domain;
    let mut total = Ratio::from_integer(0u128);
    for c in &inst.constraints {
        let mut distinct = c.scope.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let mut hits = 0u128;
        let mut local = Tuples::new(d, distinct.len());
        let mut tuple = vec![0; c.scope.len()];
        while let Some(vals) = local.next_tuple() {
            for (slot, v) in tuple.iter_mut().zip(&c.scope) {
                *slot = vals[distinct.binary_search(v).unwrap()];
            }
            hits += c.predicate.get(&tuple) as u128;
        }
        let denom = (d as u128).pow(distinct.len() as u32);
        total += Ratio::new(c.weight as u128 * hits, denom);
    }
    Ok(total)
}

fn parse_variable(s: &str, line: usize) -> Result<usize> {
    let s = s.trim();
    let digits = s.strip_prefix('x').unwrap_or(s);
    digits.parse().map_err(|_| Error::parse(line, format!("bad variable {s:?}")))
}

impl FromStr for Instance {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut domain = None;
        let mut vars = None;
        let mut pending: Vec<(usize, u64, String, String)> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if content.starts_with("domain") || content.starts_with("vars") {
                for part in content.split('/') {
                    let mut words = part.split_whitespace();
                    let key = words.next().unwrap_or("");
                    let value: usize = words
                        .next()
                        .and_then(|w| w.parse().ok())
                        .ok_or_else(|| Error::parse(line, format!("bad header {part:?}")))?;
                    match key {
                        "domain" => domain = Some(value),
                        "vars" => vars = Some(value),
                        _ => return Err(Error::parse(line, format!("unknown header key {key:?}"))),
                    }
                }
                continue;
            }
            let open = content.find('(').ok_or_else(|| Error::parse(line, "expected `(` before the scope"))?;
            let args = content[open + 1..]
                .trim_end()
                .strip_suffix(')')
                .ok_or_else(|| Error::parse(line, "expected `)` after the scope"))?;
            let head = content[..open].trim();
            let (weight, name) = head
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::parse(line, "expected `<weight> <predicate> (vars)`"))?;
            let weight: u64 = weight.parse().map_err(|_| Error::parse(line, "bad weight"))?;
            pending.push((line, weight, name.trim().to_string(), args.to_string()));
        }
        let domain = domain.ok_or_else(|| Error::parse(0, "missing `domain` header"))?;
        let variables = vars.ok_or_else(|| Error::parse(0, "missing `vars` header"))?;
        let mut inst = Instance::new(domain, variables)?;
        let lets = HashMap::new();
        for (line, weight, name, args) in pending {
            let predicate = crate::gadget::resolve(&name, domain, &lets)?;
            let scope = args.split(',').map(|v| parse_variable(v, line)).collect::<Result<Vec<_>>>()?;
            inst.add(predicate, scope, weight).map_err(|e| Error::parse(line, e.to_string()))?;
        }
        Ok(inst)
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "domain {} / vars {}", self.domain, self.variables)?;
        for c in &self.constraints {
            let vars: Vec<String> = c.scope.iter().map(|v| format!("x{v}")).collect();
            write!(f, "\n{} {} ({})", c.weight, display_name(&c.predicate), vars.join(", "))?;
        }
        Ok(())
    }
}
