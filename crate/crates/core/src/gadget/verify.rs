//! Checking the implementation identity.
//!
//! For each primary assignment the maximum over auxiliary assignments is
//! computed by enumeration when `d^n <= 2^16`, and by exact max-sum variable
//! elimination otherwise.

use super::StrictImplementation;
use crate::error::{Error, Result};
use crate::predicate::Tuples;

const BRUTE_FORCE_LIMIT: u128 = 1 << 16;
const EXHAUSTIVE_LIMIT: u128 = 1 << 26;
const FACTOR_LIMIT: usize = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub primary: Vec<usize>,
    pub achieved: u32,
    pub expected: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub valid: bool,
    pub counterexample: Option<Counterexample>,
    /// `c` when the profile equals `target + c` everywhere; `c + 1` is then
    /// the only α for which the implementation is valid.
    pub shift: Option<u32>,
}

impl Verification {
    pub fn recovered_alpha(&self) -> Option<u32> {
        self.shift.map(|c| c + 1)
    }
}

pub fn verify(imp: &StrictImplementation) -> Result<Verification> {
    imp.validate()?;
    let n = imp.auxiliary.len() as u32;
    let work = (imp.domain() as u128).checked_pow(n).unwrap_or(u128::MAX);
    let profile = if work <= BRUTE_FORCE_LIMIT { brute_profile(imp) } else { eliminate_profile(imp)? };
    Ok(judge(imp, &profile))
}

/// Always enumerates auxiliary assignments; refuses beyond `2^26` of them.
pub fn verify_exhaustive(imp: &StrictImplementation) -> Result<Verification> {
    imp.validate()?;
    let n = imp.auxiliary.len() as u32;
    let work = (imp.domain() as u128).checked_pow(n).unwrap_or(u128::MAX);
    if work > EXHAUSTIVE_LIMIT {
        return Err(Error::BudgetExceeded { needed: work, budget: EXHAUSTIVE_LIMIT });
    }
    Ok(judge(imp, &brute_profile(imp)))
}

/// `max_z Σ terms` for every primary assignment, in tuple index order.
pub fn profile(imp: &StrictImplementation) -> Result<Vec<u32>> {
    imp.validate()?;
    let n = imp.auxiliary.len() as u32;
    let work = (imp.domain() as u128).checked_pow(n).unwrap_or(u128::MAX);
    if work <= BRUTE_FORCE_LIMIT {
        Ok(brute_profile(imp))
    } else {
        eliminate_profile(imp)
    }
}

fn judge(imp: &StrictImplementation, profile: &[u32]) -> Verification {
    let target = &imp.target;
    let alpha = imp.alpha;
    let mut counterexample = None;
    for (i, &achieved) in profile.iter().enumerate() {
        let expected = target.at(i) as u32 + alpha - 1;
        if achieved != expected {
            counterexample = Some(Counterexample { primary: target.tuple_of(i), achieved, expected });
            break;
        }
    }
    let base = profile[0] as i64 - target.at(0) as i64;
    let constant = profile.iter().enumerate().all(|(i, &p)| p as i64 - target.at(i) as i64 == base);
    Verification {
        valid: counterexample.is_none(),
        counterexample,
        shift: (constant && base >= 0).then_some(base as u32),
    }
}

fn brute_profile(imp: &StrictImplementation) -> Vec<u32> {
    let d = imp.domain();
    let k = imp.primary.len();
    let n = imp.auxiliary.len();
    let mut values = vec![0usize; k + n];
    let mut out = Vec::with_capacity(imp.target.len());
    let mut scratch = Vec::new();
    let mut primaries = Tuples::new(d, k);
    while let Some(p) = primaries.next_tuple() {
        values[..k].copy_from_slice(p);
        let mut best = 0;
        let mut aux = Tuples::new(d, n);
        while let Some(z) = aux.next_tuple() {
            values[k..].copy_from_slice(z);
            let mut sum = 0;
            for t in &imp.terms {
                scratch.clear();
                scratch.extend(t.scope.iter().map(|&v| values[v]));
                sum += t.predicate.value(&scratch);
            }
            best = best.max(sum);
        }
        out.push(best);
    }
    out
}

/// A table over a sorted list of auxiliary variables.
struct Factor {
    vars: Vec<usize>,
    table: Vec<u32>,
}

fn eliminate_profile(imp: &StrictImplementation) -> Result<Vec<u32>> {
    let d = imp.domain();
    let k = imp.primary.len();
    let mut out = Vec::with_capacity(imp.target.len());
    let mut primaries = Tuples::new(d, k);
    while let Some(p) = primaries.next_tuple() {
        out.push(max_with_primary(imp, p)?);
    }
    Ok(out)
}

fn max_with_primary(imp: &StrictImplementation, primary: &[usize]) -> Result<u32> {
    let d = imp.domain();
    let k = primary.len();
    let n = imp.auxiliary.len();
    let mut constant = 0u32;
    let mut factors: Vec<Factor> = Vec::new();
    for t in &imp.terms {
        let mut vars: Vec<usize> = t.scope.iter().filter(|&&v| v >= k).map(|&v| v - k).collect();
        vars.sort_unstable();
        vars.dedup();
        if vars.is_empty() {
            let tuple: Vec<usize> = t.scope.iter().map(|&v| primary[v]).collect();
            constant += t.predicate.value(&tuple);
            continue;
        }
        let mut table = Vec::with_capacity(d.pow(vars.len() as u32));
        let mut local = Tuples::new(d, vars.len());
        let mut tuple = vec![0; t.scope.len()];
        while let Some(vals) = local.next_tuple() {
            for (slot, &v) in tuple.iter_mut().zip(&t.scope) {
                *slot = if v < k { primary[v] } else { vals[vars.binary_search(&(v - k)).unwrap()] };
            }
            table.push(t.predicate.value(&tuple));
        }
        factors.push(Factor { vars, table });
    }

    let mut alive = vec![true; n];
    for _ in 0..n {
        // min-degree: eliminate the variable whose merged factor is smallest
        let mut best: Option<(usize, usize)> = None;
        for v in (0..n).filter(|&v| alive[v]) {
            let mut scope: Vec<usize> =
                factors.iter().filter(|f| f.vars.contains(&v)).flat_map(|f| f.vars.iter().copied()).collect();
            scope.sort_unstable();
            scope.dedup();
            if best.is_none_or(|(_, s)| scope.len() < s) {
                best = Some((v, scope.len()));
            }
        }
        let (v, _) = best.expect("a live variable remains");
        alive[v] = false;
        let (touching, rest): (Vec<Factor>, Vec<Factor>) = factors.into_iter().partition(|f| f.vars.contains(&v));
        factors = rest;
        if touching.is_empty() {
            continue;
        }
        factors.push(eliminate(v, &touching, d)?);
    }
    let tail: u32 = factors.iter().map(|f| f.table[0]).sum();
    Ok(constant + tail)
}

/// `max_v Σ touching` as a factor over the remaining variables.
fn eliminate(v: usize, touching: &[Factor], d: usize) -> Result<Factor> {
    let mut scope: Vec<usize> = touching.iter().flat_map(|f| f.vars.iter().copied()).collect();
    scope.sort_unstable();
    scope.dedup();
    let size = (d as u128).checked_pow(scope.len() as u32).unwrap_or(u128::MAX);
    if size > FACTOR_LIMIT as u128 {
        return Err(Error::BudgetExceeded { needed: size, budget: FACTOR_LIMIT as u128 });
    }
    let pos_v = scope.binary_search(&v).unwrap();
    let remaining: Vec<usize> = scope.iter().copied().filter(|&u| u != v).collect();
    let positions: Vec<Vec<usize>> =
        touching.iter().map(|f| f.vars.iter().map(|u| scope.binary_search(u).unwrap()).collect()).collect();
    let mut table = vec![0u32; d.pow(remaining.len() as u32)];
    let mut all = Tuples::new(d, scope.len());
    while let Some(vals) = all.next_tuple() {
        let mut sum = 0;
        for (f, pos) in touching.iter().zip(&positions) {
            let idx = pos.iter().fold(0, |acc, &p| acc * d + vals[p]);
            sum += f.table[idx];
        }
        let out_idx = vals.iter().enumerate().filter(|&(i, _)| i != pos_v).fold(0, |acc, (_, &x)| acc * d + x);
        table[out_idx] = table[out_idx].max(sum);
    }
    Ok(Factor { vars: remaining, table })
}
