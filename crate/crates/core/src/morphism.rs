//! Unary endomorphisms of predicate sets, core testing and core computation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::predicate::{PredicateSet, Tuples};

/// Largest domain for which the `d^d` scan over unary maps is attempted.
pub const MAX_DOMAIN: usize = 6;

/// A map `pi: D -> D` stored as its image sequence.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnaryMap {
    image: Vec<usize>,
}

impl UnaryMap {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let d = image.len();
        if let Some(&v) = image.iter().find(|&&v| v >= d) {
            return Err(Error::ValueOutOfRange { value: v, domain: d });
        }
        Ok(UnaryMap { image })
    }

    pub fn identity(domain: usize) -> Self {
        UnaryMap { image: (0..domain).collect() }
    }

    pub fn constant(domain: usize, value: usize) -> Result<Self> {
        UnaryMap::new(vec![value; domain])
    }

    pub fn domain(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    #[inline]
    pub fn apply(&self, a: usize) -> usize {
        self.image[a]
    }

    pub fn apply_tuple(&self, tuple: &[usize]) -> Vec<usize> {
        tuple.iter().map(|&a| self.image[a]).collect()
    }

    /// `self` after `first`: `a -> self(first(a))`.
    pub fn after(&self, first: &UnaryMap) -> UnaryMap {
        UnaryMap { image: first.image.iter().map(|&a| self.image[a]).collect() }
    }

    /// Sorted, duplicate-free image set.
    pub fn image_set(&self) -> Vec<usize> {
        let mut s = self.image.clone();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn is_injective(&self) -> bool {
        self.image_set().len() == self.image.len()
    }

    pub fn is_idempotent(&self) -> bool {
        self.after(self) == *self
    }
}

impl fmt::Display for UnaryMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &mut dyn Iterator<Item = usize>| v.map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "[{}]->[{}]", join(&mut (0..self.image.len())), join(&mut self.image.iter().copied()))
    }
}

impl fmt::Debug for UnaryMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UnaryMap({self})")
    }
}

/// Accepts `[0,1,2]->[0,1,1]` or just the image list `0,1,1` / `[0,1,1]`.
impl FromStr for UnaryMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad unary map {s:?}"));
        let list = |t: &str| -> Result<Vec<usize>> {
            let t = t.trim().trim_start_matches('[').trim_end_matches(']');
            t.split(',').map(|x| x.trim().parse::<usize>().map_err(|_| bad())).collect()
        };
        let image = match s.split_once("->") {
            Some((dom, img)) => {
                let dom = list(dom)?;
                if dom != (0..dom.len()).collect::<Vec<_>>() {
                    return Err(bad());
                }
                let img = list(img)?;
                if img.len() != dom.len() {
                    return Err(bad());
                }
                img
            }
            None => list(s)?,
        };
        UnaryMap::new(image)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndomorphismReport {
    pub holds: bool,
    /// `(member index, tuple)` with `f(tuple) = 1` and `f(pi(tuple)) = 0`.
    pub witness: Option<(usize, Vec<usize>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreResult {
    /// Idempotent endomorphism onto `sub_domain`.
    pub retraction: UnaryMap,
    pub sub_domain: Vec<usize>,
    /// The set restricted to `sub_domain`, renamed to `0..|D'|` in numeric order.
    pub restricted: PredicateSet,
    pub renaming: BTreeMap<usize, usize>,
}

impl CoreResult {
    pub fn size(&self) -> usize {
        self.sub_domain.len()
    }
}

pub fn is_endomorphism(set: &PredicateSet, pi: &UnaryMap) -> Result<EndomorphismReport> {
    if pi.domain() != set.domain() {
        return Err(Error::DomainMismatch(set.domain(), pi.domain()));
    }
    Ok(check(set, pi))
}

fn check(set: &PredicateSet, pi: &UnaryMap) -> EndomorphismReport {
    let mut mapped = Vec::new();
    for (k, f) in set.iter().enumerate() {
        mapped.resize(f.arity(), 0);
        for i in 0..f.len() {
            if !f.at(i) {
                continue;
            }
            let t = f.tuple_of(i);
            for (m, &a) in mapped.iter_mut().zip(&t) {
                *m = pi.apply(a);
            }
            if !f.get(&mapped) {
                return EndomorphismReport { holds: false, witness: Some((k, t)) };
            }
        }
    }
    EndomorphismReport { holds: true, witness: None }
}

fn guard(set: &PredicateSet) -> Result<()> {
    if set.domain() > MAX_DOMAIN {
        return Err(Error::DomainTooLarge(set.domain()));
    }
    Ok(())
}

/// All endomorphisms in lexicographic order of the image sequence.
pub fn enumerate_endomorphisms(set: &PredicateSet) -> Result<Vec<UnaryMap>> {
    guard(set)?;
    let d = set.domain();
    let mut out = Vec::new();
    let mut maps = Tuples::new(d, d);
    while let Some(image) = maps.next_tuple() {
        let pi = UnaryMap { image: image.to_vec() };
        if check(set, &pi).holds {
            out.push(pi);
        }
    }
    Ok(out)
}

/// Whether every endomorphism is a permutation; otherwise the canonical
/// retraction used by [`compute_core`] is returned as the witness.
pub fn is_core(set: &PredicateSet) -> Result<(bool, Option<UnaryMap>)> {
    let core = compute_core(set)?;
    if core.size() == set.domain() {
        Ok((true, None))
    } else {
        Ok((false, Some(core.retraction)))
    }
}

/// Picks the lexicographically least image set of minimum size, then among
/// the retractions onto it the one moving elements the least (sum of
/// `|pi(a) - a|`), ties broken lexicographically.
pub fn compute_core(set: &PredicateSet) -> Result<CoreResult> {
    let endos = enumerate_endomorphisms(set)?;
    let best_image = endos
        .iter()
        .map(UnaryMap::image_set)
        .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
        .expect("identity is always an endomorphism");
    let displacement = |pi: &UnaryMap| -> usize { pi.image.iter().enumerate().map(|(a, &b)| a.abs_diff(b)).sum() };
    let retraction = endos
        .iter()
        .filter(|pi| pi.image_set() == best_image)
        .map(idempotent_power)
        .min_by(|a, b| displacement(a).cmp(&displacement(b)).then_with(|| a.cmp(b)))
        .expect("a minimum-image endomorphism exists");
    let renaming: BTreeMap<usize, usize> = best_image.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let members = set.iter().map(|f| f.restrict(&best_image)).collect::<Result<Vec<_>>>()?;
    Ok(CoreResult {
        retraction,
        restricted: PredicateSet::new(best_image.len(), members)?,
        sub_domain: best_image,
        renaming,
    })
}

/// An endomorphism whose image has minimum size permutes that image, so
/// some power of it is idempotent with the same image.
fn idempotent_power(pi: &UnaryMap) -> UnaryMap {
    let mut p = pi.clone();
    while !p.is_idempotent() {
        p = pi.after(&p);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::{all_unaries, lookup};
    use crate::predicate::Predicate;

    fn set(preds: Vec<Predicate>) -> PredicateSet {
        PredicateSet::from_members(preds).unwrap()
    }

    fn arc() -> Predicate {
        Predicate::parse("010/000/000", 3).unwrap()
    }

    fn map(s: &str) -> UnaryMap {
        s.parse().unwrap()
    }

    #[test]
    fn unary_map_text() {
        let pi = map("[0,1,2]->[0,1,1]");
        assert_eq!(pi.image(), &[0, 1, 1]);
        assert_eq!(pi.to_string(), "[0,1,2]->[0,1,1]");
        assert_eq!(map("0,0,1"), UnaryMap::new(vec![0, 0, 1]).unwrap());
        assert!("[0,1,2]->[0,3,1]".parse::<UnaryMap>().is_err());
        assert!("[0,2]->[0,1]".parse::<UnaryMap>().is_err());
    }

    #[test]
    fn endomorphism_examples() {
        let g = set(vec![arc()]);
        assert!(is_endomorphism(&g, &map("0,1,1")).unwrap().holds);
        assert!(is_endomorphism(&g, &UnaryMap::identity(3)).unwrap().holds);

        let neq = set(vec![lookup("neq3", 3).unwrap()]);
        let r = is_endomorphism(&neq, &map("0,0,2")).unwrap();
        assert!(!r.holds);
        let (k, t) = r.witness.unwrap();
        assert_eq!(k, 0);
        assert!(neq.members()[0].get(&t));
        assert!(!neq.members()[0].get(&map("0,0,2").apply_tuple(&t)));
        assert!(is_endomorphism(&neq, &UnaryMap::identity(2)).is_err());
    }

    #[test]
    fn enumerate_examples() {
        let neq = set(vec![lookup("neq3", 3).unwrap()]);
        let endos = enumerate_endomorphisms(&neq).unwrap();
        assert_eq!(endos.len(), 6);
        assert!(endos.iter().all(UnaryMap::is_injective));

        let h7 = set(vec![lookup("h7", 3).unwrap()]);
        assert!(enumerate_endomorphisms(&h7).unwrap().contains(&map("0,0,0")));

        let units = set(all_unaries(3));
        assert_eq!(enumerate_endomorphisms(&units).unwrap(), vec![UnaryMap::identity(3)]);

        let big = set(vec![lookup("u{0}", 7).unwrap()]);
        assert_eq!(enumerate_endomorphisms(&big), Err(Error::DomainTooLarge(7)));
    }

    #[test]
    fn core_examples() {
        let g = set(vec![arc()]);
        let (core, witness) = is_core(&g).unwrap();
        assert!(!core);
        assert_eq!(witness, Some(map("0,1,1")));
        let c = compute_core(&g).unwrap();
        assert_eq!(c.retraction.to_string(), "[0,1,2]->[0,1,1]");
        assert_eq!(c.sub_domain, vec![0, 1]);
        assert_eq!(c.restricted.members(), &[lookup("f_dicut", 2).unwrap()]);

        let neq = set(vec![lookup("neq3", 3).unwrap()]);
        assert_eq!(is_core(&neq).unwrap(), (true, None));
        let c = compute_core(&neq).unwrap();
        assert_eq!(c.retraction, UnaryMap::identity(3));
        assert_eq!(c.restricted, neq);

        let c = compute_core(&set(vec![lookup("h7", 3).unwrap()])).unwrap();
        assert_eq!(c.sub_domain, vec![0]);
        assert_eq!(c.retraction, map("0,0,0"));

        let (core, witness) = is_core(&set(vec![lookup("u{0,1}", 3).unwrap()])).unwrap();
        assert!(!core);
        assert_eq!(witness, Some(map("0,0,0")));
    }

    #[test]
    fn idempotent_power_of_cycle() {
        // 0 -> 1 -> 0 on the image, 2 -> 0
        let pi = map("1,0,0");
        let p = idempotent_power(&pi);
        assert!(p.is_idempotent());
        assert_eq!(p.image_set(), vec![0, 1]);
    }
}
