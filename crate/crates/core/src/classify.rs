//! The PO / APX-complete decision for domains of size two and three, and
//! best-effort hardness certificates.
//!
//! A set is classified through its core: a one-element core is trivially
//! solvable, a core supermodular on some chain is in PO, and every other
//! core is APX-complete.

use std::collections::HashMap;
use std::fmt;

use crate::chain::{enumerate_chains, find_supermodular_chain, is_supermodular_on_chain, Chain};
use crate::error::{Error, Result};
use crate::gadget::corpus;
use crate::gadget::{
    default_names, derive_strip_all_one, derive_transpose, derive_unary_intersect, derive_unary_sum, search_named,
    verify, ImplementationChain, SearchBounds, Side, StrictImplementation, Term,
};
use crate::library::{self, neq, unary_name};
use crate::morphism::{compute_core, CoreResult, UnaryMap};
use crate::predicate::{Predicate, PredicateSet, Tuples};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Trivial,
    Po,
    ApxComplete,
}

impl Verdict {
    /// Trivial sets are tractable; machine-readable output folds them into PO.
    pub fn is_tractable(self) -> bool {
        matches!(self, Verdict::Trivial | Verdict::Po)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Trivial => "TRIVIAL",
            Verdict::Po => "PO",
            Verdict::ApxComplete => "APX-complete",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub verdict: Verdict,
    pub core: CoreResult,
    /// For PO: a chain on the core's (renamed) domain.
    pub chain: Option<Chain>,
    pub certificate: Option<HardnessCertificate>,
}

fn check_input(set: &PredicateSet) -> Result<()> {
    if set.is_empty() {
        return Err(Error::Precondition("predicate set is empty".into()));
    }
    if !(2..=3).contains(&set.domain()) {
        return Err(Error::Precondition(format!(
            "classification covers domains of size 2 and 3, got {}",
            set.domain()
        )));
    }
    if let Some(p) = set.iter().find(|p| p.is_trivial()) {
        return Err(Error::Precondition(format!("trivial predicate {p} in the set")));
    }
    Ok(())
}

pub fn classify(set: &PredicateSet) -> Result<Classification> {
    check_input(set)?;
    let core = compute_core(set)?;
    if core.size() == 1 {
        return Ok(Classification { verdict: Verdict::Trivial, core, chain: None, certificate: None });
    }
    let chain = find_supermodular_chain(&core.restricted)?;
    let verdict = if chain.is_some() { Verdict::Po } else { Verdict::ApxComplete };
    Ok(Classification { verdict, core, chain, certificate: None })
}

/// [`classify`] restricted to the two-element domain.
pub fn classify_boolean(set: &PredicateSet) -> Result<Classification> {
    if set.domain() != 2 {
        return Err(Error::DomainMismatch(2, set.domain()));
    }
    classify(set)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TerminalKind {
    Neq2,
    Neq3,
    /// The final predicate retracts onto a two-element core `matrix` that
    /// is supermodular on no chain.
    TwoElementCore {
        retraction: UnaryMap,
        matrix: Predicate,
    },
}

impl fmt::Display for TerminalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TerminalKind::Neq2 => f.write_str("neq2"),
            TerminalKind::Neq3 => f.write_str("neq3"),
            TerminalKind::TwoElementCore { retraction, matrix } => {
                write!(f, "two-element core {matrix} via {retraction}")
            }
        }
    }
}

/// A chain of strict implementations from the core of a set to a predicate
/// whose problem is known to be APX-complete. Predicates are over the core's
/// renamed domain; `base` names the core members that terms may use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HardnessCertificate {
    pub domain: usize,
    pub base: Vec<(String, Predicate)>,
    pub chain: ImplementationChain,
    pub terminal: TerminalKind,
}

impl HardnessCertificate {
    /// Re-checks every link, every term reference and the terminal.
    pub fn check(&self) -> Result<bool> {
        let mut known: HashMap<&str, &Predicate> = self.base.iter().map(|(n, p)| (n.as_str(), p)).collect();
        for link in &self.chain.links {
            let imp = &link.implementation;
            if imp.domain() != self.domain || !verify(imp)?.valid {
                return Ok(false);
            }
            for t in &imp.terms {
                if known.get(t.name.as_str()) != Some(&&t.predicate) {
                    return Ok(false);
                }
            }
            known.insert(&link.name, &imp.target);
        }
        let Some(last) = self.chain.final_target() else {
            return Ok(false);
        };
        terminal_holds(last, &self.terminal, self.domain)
    }
}

fn terminal_holds(p: &Predicate, kind: &TerminalKind, domain: usize) -> Result<bool> {
    match kind {
        TerminalKind::Neq2 => Ok(domain == 2 && *p == neq(2)),
        TerminalKind::Neq3 => Ok(domain == 3 && *p == neq(3)),
        TerminalKind::TwoElementCore { retraction, matrix } => {
            Ok(two_element_core(p)?.is_some_and(|(r, m)| &r == retraction && &m == matrix))
        }
    }
}

/// For a binary predicate whose core has two elements and is supermodular
/// on no chain, the retraction and the core matrix.
fn two_element_core(p: &Predicate) -> Result<Option<(UnaryMap, Predicate)>> {
    if p.arity() != 2 {
        return Ok(None);
    }
    let core = compute_core(&PredicateSet::new(p.domain(), vec![p.clone()])?)?;
    if core.size() != 2 {
        return Ok(None);
    }
    let m = core.restricted.members()[0].clone();
    for chain in enumerate_chains(2, true)? {
        if is_supermodular_on_chain(&m, &chain)?.holds {
            return Ok(None);
        }
    }
    Ok(Some((core.retraction, m)))
}

fn terminal_kind(p: &Predicate) -> Result<Option<TerminalKind>> {
    let d = p.domain();
    if d == 2 && *p == neq(2) {
        return Ok(Some(TerminalKind::Neq2));
    }
    if d == 3 && *p == neq(3) {
        return Ok(Some(TerminalKind::Neq3));
    }
    Ok(two_element_core(p)?.map(|(retraction, matrix)| TerminalKind::TwoElementCore { retraction, matrix }))
}

/// Searches for a certificate that the set is APX-complete.
///
/// Starting from the core, a pool of derived predicates of arity at most
/// two is saturated under: every corpus implementation up to renaming of
/// domain elements, transposition, all-one row/column stripping, unions and
/// intersections of unary supports, and minors (pinning arguments with
/// available singleton unaries, identifying arguments, maximizing arguments
/// out). The search stops at `neq` on the core's domain or at a binary
/// predicate with a non-supermodular two-element core; `neq` is preferred
/// when both appear in the same step. If saturation fails, a bounded search
/// for `neq` over the core members is tried.
pub fn hardness_certificate(set: &PredicateSet, bounds: &SearchBounds) -> Result<Option<HardnessCertificate>> {
    let c = classify(set)?;
    if c.verdict != Verdict::ApxComplete {
        return Err(Error::Precondition(format!("set is {}, not APX-complete", c.verdict)));
    }
    let mut pool = Pool::new(&c.core.restricted);
    if let Some(found) = pool.saturate()? {
        return Ok(Some(pool.certificate(found)?));
    }
    let d = pool.domain;
    let named: Vec<(String, Predicate)> =
        pool.items[..pool.base].iter().map(|i| (i.name.clone(), i.pred.clone())).collect();
    let hit = match search_named(&named, &neq(d), bounds) {
        Ok(hit) => hit,
        Err(Error::BudgetExceeded { .. }) | Err(Error::InvalidArgument(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(match hit {
        Some(imp) => {
            let terminal = terminal_kind(&imp.target)?.expect("neq is terminal");
            let mut chain = ImplementationChain::default();
            chain.push(format!("neq{d}"), imp);
            Some(HardnessCertificate { domain: d, base: named, chain, terminal })
        }
        None => None,
    })
}

struct Item {
    name: String,
    pred: Predicate,
    /// `None` for members of the core.
    origin: Option<StrictImplementation>,
}

struct Pool {
    domain: usize,
    base: usize,
    items: Vec<Item>,
    index: HashMap<Predicate, usize>,
    counter: usize,
    rules: Vec<StrictImplementation>,
}

impl Pool {
    fn new(core: &PredicateSet) -> Pool {
        let mut pool = Pool {
            domain: core.domain(),
            base: 0,
            items: Vec::new(),
            index: HashMap::new(),
            counter: 0,
            rules: Vec::new(),
        };
        for (i, p) in dedup_in_order(core).iter().enumerate() {
            let name = match library::name_of(p) {
                Some(n) if !pool.items.iter().any(|it| it.name == n) => n,
                _ => format!("F{}", i + 1),
            };
            pool.index.insert(p.clone(), pool.items.len());
            pool.items.push(Item { name, pred: p.clone(), origin: None });
        }
        pool.base = pool.items.len();
        pool.rules = renamed_corpus(pool.domain);
        pool
    }

    fn contains(&self, p: &Predicate) -> bool {
        self.index.contains_key(p)
    }

    fn name(&self, p: &Predicate) -> &str {
        &self.items[self.index[p]].name
    }

    fn useful(p: &Predicate) -> bool {
        !p.is_trivial() && p.count_ones() != p.len() && p.arity() <= 2
    }

    /// Adds a derived predicate; term names are rewritten to pool names.
    fn add(&mut self, mut imp: StrictImplementation) -> Result<bool> {
        if self.contains(&imp.target) || !Pool::useful(&imp.target) {
            return Ok(false);
        }
        for t in &mut imp.terms {
            t.name = self.name(&t.predicate).to_string();
        }
        debug_assert!(verify(&imp)?.valid);
        let name = match library::name_of(&imp.target) {
            Some(n) if !self.items.iter().any(|it| it.name == n) => n,
            _ => loop {
                self.counter += 1;
                let n = format!("p{}", self.counter);
                if !self.items.iter().any(|it| it.name == n) {
                    break n;
                }
            },
        };
        imp.target_name = Some(name.clone());
        self.index.insert(imp.target.clone(), self.items.len());
        self.items.push(Item { name, pred: imp.target.clone(), origin: Some(imp) });
        Ok(true)
    }

    /// Index of the preferred terminal currently in the pool.
    fn terminal(&self) -> Result<Option<usize>> {
        if let Some(&i) = self.index.get(&neq(self.domain)) {
            return Ok(Some(i));
        }
        for (i, item) in self.items.iter().enumerate() {
            if two_element_core(&item.pred)?.is_some() {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    fn saturate(&mut self) -> Result<Option<usize>> {
        if let Some(t) = self.terminal()? {
            return Ok(Some(t));
        }
        let mut checked = self.items.len();
        loop {
            let before = self.items.len();
            let steps: [fn(&mut Pool) -> Result<()>; 5] =
                [Pool::corpus_step, Pool::transpose_step, Pool::strip_step, Pool::unary_step, Pool::minor_step];
            for step in steps {
                step(self)?;
                if self.items.len() > checked {
                    if let Some(t) = self.terminal_from(checked)? {
                        return Ok(Some(t));
                    }
                    checked = self.items.len();
                }
            }
            if self.items.len() == before {
                return Ok(None);
            }
        }
    }

    fn terminal_from(&self, start: usize) -> Result<Option<usize>> {
        if let Some(&i) = self.index.get(&neq(self.domain)) {
            return Ok(Some(i));
        }
        for i in start..self.items.len() {
            if two_element_core(&self.items[i].pred)?.is_some() {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    fn corpus_step(&mut self) -> Result<()> {
        for r in 0..self.rules.len() {
            let imp = &self.rules[r];
            if self.contains(&imp.target) || !imp.terms.iter().all(|t| self.contains(&t.predicate)) {
                continue;
            }
            let imp = imp.clone();
            self.add(imp)?;
        }
        Ok(())
    }

    fn transpose_step(&mut self) -> Result<()> {
        for i in 0..self.items.len() {
            if self.items[i].pred.arity() == 2 {
                let imp = derive_transpose(&self.items[i].pred)?;
                self.add(imp)?;
            }
        }
        Ok(())
    }

    fn strip_step(&mut self) -> Result<()> {
        let d = self.domain;
        for i in 0..self.items.len() {
            let g = self.items[i].pred.clone();
            if g.arity() != 2 {
                continue;
            }
            for a in 0..d {
                let rest: Vec<usize> = (0..d).filter(|&v| v != a).collect();
                if !self.contains(&Predicate::unary(d, &rest)?) {
                    continue;
                }
                for side in [Side::Column, Side::Row] {
                    if let Ok(imp) = derive_strip_all_one(&g, side, a) {
                        self.add(imp)?;
                    }
                }
            }
        }
        Ok(())
    }

    fn unary_step(&mut self) -> Result<()> {
        let d = self.domain;
        let unaries: Vec<Vec<usize>> = self
            .items
            .iter()
            .filter(|it| it.pred.arity() == 1)
            .map(|it| it.pred.support().into_iter().collect())
            .collect();
        for s in &unaries {
            for t in &unaries {
                if let Ok(imp) = derive_unary_sum(d, s, t) {
                    self.add(imp)?;
                }
                if let Ok(imp) = derive_unary_intersect(d, s, t) {
                    self.add(imp)?;
                }
            }
        }
        Ok(())
    }

    fn minor_step(&mut self) -> Result<()> {
        let d = self.domain;
        let pins: Vec<usize> =
            (0..d).filter(|&c| self.contains(&Predicate::unary(d, &[c]).expect("in range"))).collect();
        for i in 0..self.items.len() {
            let f = self.items[i].pred.clone();
            if f.arity() > 4 {
                continue;
            }
            for slots in minor_slots(f.arity(), &pins) {
                if let Some(imp) = minor(&f, &slots)? {
                    self.add(imp)?;
                }
            }
        }
        Ok(())
    }

    /// Links for everything the terminal depends on, in pool order.
    fn certificate(&self, terminal: usize) -> Result<HardnessCertificate> {
        let mut needed = vec![false; self.items.len()];
        let mut stack = vec![terminal];
        while let Some(i) = stack.pop() {
            if needed[i] {
                continue;
            }
            needed[i] = true;
            if let Some(imp) = &self.items[i].origin {
                for t in &imp.terms {
                    stack.push(self.index[&t.predicate]);
                }
            }
        }
        let mut chain = ImplementationChain::default();
        for (i, item) in self.items.iter().enumerate() {
            if needed[i] {
                if let Some(imp) = &item.origin {
                    chain.push(item.name.clone(), imp.clone());
                }
            }
        }
        let base: Vec<(String, Predicate)> =
            self.items[..self.base].iter().map(|it| (it.name.clone(), it.pred.clone())).collect();
        if terminal < self.base {
            let item = &self.items[terminal];
            let (p, a) = default_names(item.pred.arity(), 0);
            let scope = (0..item.pred.arity()).collect();
            let mut imp = StrictImplementation::new(
                item.pred.clone(),
                1,
                p,
                a,
                vec![Term { name: item.name.clone(), predicate: item.pred.clone(), scope }],
            )?;
            imp.target_name = Some(format!("{}'", item.name));
            chain.push(format!("{}'", item.name), imp);
        }
        let terminal = terminal_kind(&self.items[terminal].pred)?.expect("terminal predicate");
        Ok(HardnessCertificate { domain: self.domain, base, chain, terminal })
    }
}

/// Members without duplicates, first occurrence kept.
fn dedup_in_order(set: &PredicateSet) -> Vec<Predicate> {
    let mut out: Vec<Predicate> = Vec::new();
    for p in set {
        if !out.contains(p) {
            out.push(p.clone());
        }
    }
    out
}

/// Corpus implementations on the given domain under every renaming of
/// domain elements, identity first, duplicates removed.
fn renamed_corpus(domain: usize) -> Vec<StrictImplementation> {
    let mut out: Vec<StrictImplementation> = Vec::new();
    let perms: Vec<Vec<usize>> = match enumerate_chains(domain, false) {
        Ok(chains) => chains.into_iter().map(|c| c.order().to_vec()).collect(),
        Err(_) => return out,
    };
    for entry in corpus::entries() {
        if entry.implementation.domain() != domain {
            continue;
        }
        for perm in &perms {
            let mut imp = entry.implementation.clone();
            imp.target = imp.target.rename(perm).expect("permutation");
            imp.target_name = None;
            for t in &mut imp.terms {
                t.predicate = t.predicate.rename(perm).expect("permutation");
            }
            if !out.iter().any(|o| o.target == imp.target && o.terms == imp.terms) {
                out.push(imp);
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Free(usize),
    Hidden,
    Pin(usize),
}

/// Slot assignments producing a unary or binary minor.
fn minor_slots(arity: usize, pins: &[usize]) -> Vec<Vec<Slot>> {
    let mut options = vec![Slot::Free(0), Slot::Free(1), Slot::Hidden];
    options.extend(pins.iter().map(|&c| Slot::Pin(c)));
    let mut out = Vec::new();
    let mut it = Tuples::new(options.len(), arity);
    while let Some(choice) = it.next_tuple() {
        let slots: Vec<Slot> = choice.iter().map(|&o| options[o]).collect();
        let uses0 = slots.contains(&Slot::Free(0));
        let uses1 = slots.contains(&Slot::Free(1));
        if !uses0
            || (uses1
                && slots.iter().position(|s| *s == Slot::Free(1)) < slots.iter().position(|s| *s == Slot::Free(0)))
        {
            continue;
        }
        out.push(slots);
    }
    out
}

fn minor(f: &Predicate, slots: &[Slot]) -> Result<Option<StrictImplementation>> {
    let d = f.domain();
    let k = if slots.contains(&Slot::Free(1)) { 2 } else { 1 };
    let aux: Vec<usize> = (0..slots.len()).filter(|&i| !matches!(slots[i], Slot::Free(_))).collect();
    if aux.is_empty() && k == f.arity() && slots.iter().enumerate().all(|(i, s)| *s == Slot::Free(i)) {
        return Ok(None);
    }
    let hidden: Vec<usize> = aux.iter().copied().filter(|&i| slots[i] == Slot::Hidden).collect();
    let target = Predicate::from_fn(d, k, |t| {
        let mut full: Vec<usize> = slots
            .iter()
            .map(|s| match *s {
                Slot::Free(j) => t[j],
                Slot::Pin(c) => c,
                Slot::Hidden => 0,
            })
            .collect();
        let mut hs = Tuples::new(d, hidden.len());
        while let Some(h) = hs.next_tuple() {
            for (&i, &v) in hidden.iter().zip(h) {
                full[i] = v;
            }
            if f.get(&full) {
                return true;
            }
        }
        false
    })?;
    if !Pool::useful(&target) {
        return Ok(None);
    }
    let scope: Vec<usize> = slots
        .iter()
        .enumerate()
        .map(|(i, s)| match s {
            Slot::Free(j) => *j,
            _ => k + aux.iter().position(|&a| a == i).unwrap(),
        })
        .collect();
    let mut terms = vec![Term { name: String::new(), predicate: f.clone(), scope }];
    let mut pins = 0;
    for (slot_index, &i) in aux.iter().enumerate() {
        if let Slot::Pin(c) = slots[i] {
            pins += 1;
            terms.push(Term {
                name: unary_name(&[c]),
                predicate: Predicate::unary(d, &[c])?,
                scope: vec![k + slot_index],
            });
        }
    }
    let (p, a) = default_names(k, aux.len());
    Ok(Some(StrictImplementation::new(target, pins + 1, p, a, terms)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::{all_unaries, lookup, supermodular_list};

    fn set(names: &[&str], d: usize) -> PredicateSet {
        PredicateSet::new(d, names.iter().map(|n| lookup(n, d).unwrap()).collect()).unwrap()
    }

    fn with_unaries(mut s: PredicateSet) -> PredicateSet {
        for u in all_unaries(s.domain()) {
            s.push(u).unwrap();
        }
        s
    }

    #[test]
    fn verdict_examples() {
        assert_eq!(classify(&set(&["neq3"], 3)).unwrap().verdict, Verdict::ApxComplete);
        let hs = with_unaries(PredicateSet::new(3, supermodular_list()).unwrap());
        let c = classify(&hs).unwrap();
        assert_eq!(c.verdict, Verdict::Po);
        assert_eq!(c.chain.unwrap().to_string(), "0<1<2");
        assert_eq!(classify(&set(&["h7"], 3)).unwrap().verdict, Verdict::Trivial);
        assert_eq!(classify(&with_unaries(set(&["eq3"], 3))).unwrap().verdict, Verdict::ApxComplete);
        assert_eq!(classify(&set(&["f_dicut"], 2)).unwrap().verdict, Verdict::ApxComplete);
    }

    #[test]
    fn boolean_examples() {
        assert_eq!(classify_boolean(&set(&["neq2"], 2)).unwrap().verdict, Verdict::ApxComplete);
        let imp = PredicateSet::new(2, vec![Predicate::parse("11/01", 2).unwrap()]).unwrap();
        assert_eq!(classify_boolean(&imp).unwrap().verdict, Verdict::Trivial);
        let dicut = set(&["f_dicut", "u{0}", "u{1}"], 2);
        assert_eq!(classify_boolean(&dicut).unwrap().verdict, Verdict::ApxComplete);
        assert!(classify_boolean(&set(&["neq3"], 3)).is_err());
    }

    #[test]
    fn rejected_inputs() {
        let trivial = PredicateSet::new(3, vec![Predicate::constant(3, 2, false).unwrap()]).unwrap();
        assert!(classify(&trivial).is_err());
        assert!(classify(&set(&["u{0}"], 4)).is_err());
        assert!(classify(&PredicateSet::new(3, vec![]).unwrap()).is_err());
    }

    #[test]
    fn certificate_for_case1_f1() {
        let cert = hardness_certificate(&set(&["case1.f1"], 3), &SearchBounds::new(0, 2)).unwrap().unwrap();
        assert!(cert.check().unwrap());
        assert_eq!(cert.chain.len(), 1);
        assert_eq!(cert.terminal, TerminalKind::Neq3);
    }

    #[test]
    fn certificate_for_case1_f5() {
        let cert = hardness_certificate(&set(&["case1.f5"], 3), &SearchBounds::new(0, 2)).unwrap().unwrap();
        assert!(cert.check().unwrap());
        assert_eq!(cert.terminal, TerminalKind::Neq3);
        let targets: Vec<String> = cert.chain.links.iter().map(|l| l.implementation.target.to_string()).collect();
        assert_eq!(targets, vec!["011/101/000", "011/101/110"]);
    }

    #[test]
    fn certificate_for_eq3_with_unaries() {
        let cert = hardness_certificate(&with_unaries(set(&["eq3"], 3)), &SearchBounds::new(0, 2)).unwrap().unwrap();
        assert!(cert.check().unwrap());
        let names: Vec<&str> = cert.chain.links.iter().map(|l| l.name.as_str()).collect();
        assert_eq!(names, vec!["eqchain.f1", "eqchain.f2", "eqchain.f3", "neq3"]);
    }

    #[test]
    fn certificate_refused_for_tractable_sets() {
        assert!(hardness_certificate(&set(&["h7"], 3), &SearchBounds::new(0, 2)).is_err());
    }

    #[test]
    fn certificate_for_boolean_sets() {
        let cert = hardness_certificate(&set(&["f_dicut"], 2), &SearchBounds::new(0, 2)).unwrap().unwrap();
        assert!(cert.check().unwrap());
        let cert = hardness_certificate(&set(&["neq2"], 2), &SearchBounds::new(0, 2)).unwrap().unwrap();
        assert_eq!(cert.terminal, TerminalKind::Neq2);
        assert!(cert.check().unwrap());
    }

    #[test]
    fn tampered_certificate_fails_check() {
        let mut cert = hardness_certificate(&set(&["case1.f1"], 3), &SearchBounds::new(0, 2)).unwrap().unwrap();
        cert.chain.links[0].implementation.alpha = 2;
        assert!(!cert.check().unwrap());
    }
}
