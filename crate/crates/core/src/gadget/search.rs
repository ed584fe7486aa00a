//! Bounded exhaustive search for strict implementations.
//!
//! Candidates are multisets of atoms `(predicate, scope)` over the primary
//! variables followed by `n` auxiliaries. They are enumerated with fewer
//! auxiliaries first, then fewer terms, then as non-decreasing atom
//! sequences in lexicographic order, so the first hit is the canonical one.
//! Auxiliaries must first appear in increasing order and all must be used;
//! both restrictions keep the least member of every renaming orbit.

use super::{default_names, display_name, verify, StrictImplementation, Term};
use crate::error::{Error, Result};
use crate::predicate::{Predicate, PredicateSet, Tuples};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_aux: usize,
    pub max_terms: usize,
    /// Cap on the number of complete candidates examined.
    pub max_candidates: Option<u64>,
}

impl SearchBounds {
    pub fn new(max_aux: usize, max_terms: usize) -> Self {
        SearchBounds { max_aux, max_terms, max_candidates: None }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.max_candidates = Some(budget);
        self
    }
}

/// Largest auxiliary count accepted; `d^(k+n)` sums are kept per node.
const MAX_VARIABLES: u32 = 8;

pub fn search(set: &PredicateSet, target: &Predicate, bounds: &SearchBounds) -> Result<Option<StrictImplementation>> {
    let named: Vec<(String, Predicate)> = set.iter().map(|p| (display_name(p), p.clone())).collect();
    search_named(&named, target, bounds)
}

/// As [`search`] with caller-chosen term names.
pub fn search_named(
    set: &[(String, Predicate)],
    target: &Predicate,
    bounds: &SearchBounds,
) -> Result<Option<StrictImplementation>> {
    if target.is_trivial() {
        return Err(Error::Precondition("search target must be non-trivial".into()));
    }
    if let Some((_, p)) = set.iter().find(|(_, p)| p.domain() != target.domain()) {
        return Err(Error::DomainMismatch(target.domain(), p.domain()));
    }
    let k = target.arity();
    if (k + bounds.max_aux) as u32 > MAX_VARIABLES {
        return Err(Error::InvalidArgument(format!(
            "at most {MAX_VARIABLES} primary plus auxiliary variables are supported"
        )));
    }
    let mut budget = bounds.max_candidates;
    for n in 0..=bounds.max_aux {
        let space = Space::new(set, target, n);
        for t in 1..=bounds.max_terms {
            if t * space.max_arity < n {
                continue;
            }
            let mut state = State::new(&space, t);
            let found = state.run(&mut budget).map_err(|e| match (e, bounds.max_candidates) {
                (Error::BudgetExceeded { .. }, Some(b)) => {
                    Error::BudgetExceeded { needed: b as u128 + 1, budget: b as u128 }
                }
                (e, _) => e,
            })?;
            if let Some(atoms) = found {
                return Ok(Some(space.build(set, target, &atoms)?));
            }
        }
    }
    Ok(None)
}

struct Atom {
    pred: usize,
    scope: Vec<usize>,
    /// Predicate value under each full assignment of the `k + n` variables.
    values: Vec<u8>,
}

struct Space {
    k: usize,
    n: usize,
    d: usize,
    atoms: Vec<Atom>,
    max_arity: usize,
    target: Vec<u32>,
}

impl Space {
    fn new(set: &[(String, Predicate)], target: &Predicate, n: usize) -> Space {
        let d = target.domain();
        let k = target.arity();
        let v = k + n;
        let assignments: Vec<Vec<usize>> = {
            let mut all = Vec::new();
            let mut it = Tuples::new(d, v);
            while let Some(t) = it.next_tuple() {
                all.push(t.to_vec());
            }
            all
        };
        let mut atoms = Vec::new();
        for (pi, (_, p)) in set.iter().enumerate() {
            let mut scopes = Tuples::new(v, p.arity());
            while let Some(scope) = scopes.next_tuple() {
                let mut tuple = vec![0; scope.len()];
                let values = assignments
                    .iter()
                    .map(|a| {
                        for (slot, &x) in tuple.iter_mut().zip(scope) {
                            *slot = a[x];
                        }
                        p.get(&tuple) as u8
                    })
                    .collect();
                atoms.push(Atom { pred: pi, scope: scope.to_vec(), values });
            }
        }
        let max_arity = set.iter().map(|(_, p)| p.arity()).max().unwrap_or(0);
        let target = (0..target.len()).map(|i| target.at(i) as u32).collect();
        Space { k, n, d, atoms, max_arity, target }
    }

    fn build(&self, set: &[(String, Predicate)], target: &Predicate, chosen: &[usize]) -> Result<StrictImplementation> {
        let (primary, auxiliary) = default_names(self.k, self.n);
        let terms = chosen
            .iter()
            .map(|&a| {
                let atom = &self.atoms[a];
                let (name, p) = &set[atom.pred];
                Term { name: name.clone(), predicate: p.clone(), scope: atom.scope.clone() }
            })
            .collect();
        let mut imp = StrictImplementation::new(target.clone(), 1, primary, auxiliary, terms)?;
        let shift = verify(&imp)?.shift.expect("search only accepts constant shifts");
        imp.alpha = shift + 1;
        debug_assert!(verify(&imp)?.valid);
        Ok(imp)
    }
}

struct State<'a> {
    space: &'a Space,
    terms: usize,
    chosen: Vec<usize>,
    sums: Vec<Vec<u32>>,
    /// Number of auxiliaries seen so far, per depth.
    seen: Vec<usize>,
}

impl<'a> State<'a> {
    fn new(space: &'a Space, terms: usize) -> Self {
        let size = space.d.pow((space.k + space.n) as u32);
        State { space, terms, chosen: Vec::new(), sums: vec![vec![0; size]], seen: vec![0] }
    }

    fn run(&mut self, budget: &mut Option<u64>) -> Result<Option<Vec<usize>>> {
        if self.dfs(0, budget)? {
            Ok(Some(self.chosen.clone()))
        } else {
            Ok(None)
        }
    }

    fn dfs(&mut self, start: usize, budget: &mut Option<u64>) -> Result<bool> {
        let depth = self.chosen.len();
        if depth == self.terms {
            if let Some(b) = budget {
                if *b == 0 {
                    return Err(Error::BudgetExceeded { needed: 1, budget: 0 });
                }
                *b -= 1;
            }
            return Ok(self.seen[depth] == self.space.n && self.matches());
        }
        let remaining = self.terms - depth;
        for a in start..self.space.atoms.len() {
            let atom = &self.space.atoms[a];
            let Some(seen) = self.admit(atom, self.seen[depth]) else {
                continue;
            };
            if (remaining - 1) * self.space.max_arity < self.space.n - seen {
                continue;
            }
            let next: Vec<u32> = self.sums[depth].iter().zip(&atom.values).map(|(&s, &v)| s + v as u32).collect();
            self.sums.push(next);
            self.seen.push(seen);
            self.chosen.push(a);
            if self.dfs(a, budget)? {
                return Ok(true);
            }
            self.chosen.pop();
            self.seen.pop();
            self.sums.pop();
        }
        Ok(false)
    }

    /// New auxiliaries must appear in order `0, 1, ..`; returns the updated count.
    fn admit(&self, atom: &Atom, mut seen: usize) -> Option<usize> {
        for &v in &atom.scope {
            if v < self.space.k {
                continue;
            }
            let z = v - self.space.k;
            if z == seen {
                seen += 1;
            } else if z > seen {
                return None;
            }
        }
        Some(seen)
    }

    fn matches(&self) -> bool {
        let sums = self.sums.last().unwrap();
        let block = self.space.d.pow(self.space.n as u32);
        let mut shift: Option<i64> = None;
        for (i, chunk) in sums.chunks(block).enumerate() {
            let best = *chunk.iter().max().unwrap() as i64;
            let s = best - self.space.target[i] as i64;
            match shift {
                None if s < 0 => return false,
                None => shift = Some(s),
                Some(c) if c != s => return false,
                Some(_) => {}
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::lookup;

    fn set(names: &[&str], d: usize) -> PredicateSet {
        PredicateSet::new(d, names.iter().map(|n| lookup(n, d).unwrap()).collect()).unwrap()
    }

    #[test]
    fn finds_neq3_from_case1_f1() {
        let imp =
            search(&set(&["case1.f1"], 3), &lookup("neq3", 3).unwrap(), &SearchBounds::new(0, 2)).unwrap().unwrap();
        assert_eq!(imp.alpha, 1);
        assert_eq!(imp.terms.len(), 2);
        assert!(verify(&imp).unwrap().valid);
        let scopes: Vec<_> = imp.terms.iter().map(|t| t.scope.clone()).collect();
        assert_eq!(scopes, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn finds_neq2_from_dicut() {
        let imp =
            search(&set(&["f_dicut"], 2), &lookup("neq2", 2).unwrap(), &SearchBounds::new(0, 2)).unwrap().unwrap();
        assert!(verify(&imp).unwrap().valid);
        assert_eq!(imp.to_string().lines().last().unwrap(), "terms: f_dicut(x,y) + f_dicut(y,x)");
    }

    #[test]
    fn unaries_cannot_make_neq2() {
        let r = search(&set(&["u{0}"], 2), &lookup("neq2", 2).unwrap(), &SearchBounds::new(2, 4)).unwrap();
        assert!(r.is_none());
    }

    #[test]
    fn finds_gadgets_with_auxiliaries() {
        // max_z f_dicut(x,z) is u{0}(x)
        let imp =
            search(&set(&["f_dicut"], 2), &lookup("u{0}", 2).unwrap(), &SearchBounds::new(1, 1)).unwrap().unwrap();
        assert_eq!(imp.auxiliary.len(), 1);
        assert!(verify(&imp).unwrap().valid);
    }

    #[test]
    fn budget_is_enforced() {
        let r = search(&set(&["u{0}"], 2), &lookup("neq2", 2).unwrap(), &SearchBounds::new(2, 4).with_budget(10));
        assert!(matches!(r, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn deterministic() {
        let f = set(&["case1.f5", "u{0}", "u{1}", "u{2}"], 3);
        let target = lookup("case1.f4", 3).unwrap();
        let a = search(&f, &target, &SearchBounds::new(1, 3)).unwrap();
        let b = search(&f, &target, &SearchBounds::new(1, 3)).unwrap();
        assert_eq!(a, b);
    }
}
