//! Truth-table predicates over the domain `{0, .., d-1}`.
//!
//! A tuple `(a_1, .., a_m)` is stored at index `sum a_i * d^(m-1-i)`, so the
//! first argument is the most significant digit. For binary predicates the
//! serialized rows are the rows of the usual 0/1 matrix `M[x][y] = f(x, y)`.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Predicate {
    domain: usize,
    arity: usize,
    table: Vec<bool>,
}

impl Predicate {
    /// Builds a predicate from a full table. Domains of size one are allowed
    /// here since restricting to a one-element core produces them.
    pub fn new(domain: usize, arity: usize, table: Vec<bool>) -> Result<Self> {
        if domain == 0 {
            return Err(Error::DomainTooSmall { min: 1, got: 0 });
        }
        if arity == 0 {
            return Err(Error::InvalidArgument("arity must be at least 1".into()));
        }
        let expected = table_len(domain, arity)?;
        if table.len() != expected {
            return Err(Error::BadTableLength { bits: table.len(), domain });
        }
        Ok(Predicate { domain, arity, table })
    }

    pub fn from_fn(domain: usize, arity: usize, mut f: impl FnMut(&[usize]) -> bool) -> Result<Self> {
        let len = table_len(domain, arity)?;
        let mut table = Vec::with_capacity(len);
        let mut tuples = Tuples::new(domain, arity);
        while let Some(t) = tuples.next_tuple() {
            table.push(f(t));
        }
        Predicate::new(domain, arity, table)
    }

    /// Parses a row-major 0/1 matrix. Rows may be separated by `/` or
    /// newlines and whitespace is ignored; the arity is inferred from the
    /// number of bits.
    pub fn parse(text: &str, domain: usize) -> Result<Self> {
        if domain < 2 {
            return Err(Error::DomainTooSmall { min: 2, got: domain });
        }
        let mut table = Vec::new();
        for c in text.chars() {
            match c {
                '0' => table.push(false),
                '1' => table.push(true),
                '/' => {}
                c if c.is_whitespace() => {}
                c => return Err(Error::IllegalCharacter(c)),
            }
        }
        let arity = infer_arity(table.len(), domain).ok_or(Error::BadTableLength { bits: table.len(), domain })?;
        Predicate::new(domain, arity, table)
    }

    /// `u_S`: the unary predicate that holds exactly on `support`.
    pub fn unary(domain: usize, support: &[usize]) -> Result<Self> {
        for &v in support {
            if v >= domain {
                return Err(Error::ValueOutOfRange { value: v, domain });
            }
        }
        Predicate::from_fn(domain, 1, |t| support.contains(&t[0]))
    }

    pub fn constant(domain: usize, arity: usize, value: bool) -> Result<Self> {
        Predicate::new(domain, arity, vec![value; table_len(domain, arity)?])
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn evaluate(&self, tuple: &[usize]) -> Result<bool> {
        if tuple.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: tuple.len() });
        }
        if let Some(&v) = tuple.iter().find(|&&v| v >= self.domain) {
            return Err(Error::ValueOutOfRange { value: v, domain: self.domain });
        }
        Ok(self.get(tuple))
    }

    /// Unchecked evaluation; panics on malformed tuples in debug builds only.
    #[inline]
    pub fn get(&self, tuple: &[usize]) -> bool {
        debug_assert_eq!(tuple.len(), self.arity);
        self.table[self.index_of(tuple)]
    }

    #[inline]
    pub fn at(&self, index: usize) -> bool {
        self.table[index]
    }

    #[inline]
    pub fn value(&self, tuple: &[usize]) -> u32 {
        self.get(tuple) as u32
    }

    #[inline]
    pub fn index_of(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &v| acc * self.domain + v)
    }

    pub fn tuple_of(&self, mut index: usize) -> Vec<usize> {
        let mut tuple = vec![0; self.arity];
        for slot in tuple.iter_mut().rev() {
            *slot = index % self.domain;
            index /= self.domain;
        }
        tuple
    }

    pub fn is_trivial(&self) -> bool {
        self.table.iter().all(|&b| !b)
    }

    pub fn count_ones(&self) -> usize {
        self.table.iter().filter(|&&b| b).count()
    }

    pub fn is_irreflexive(&self) -> bool {
        self.diagonal_support().is_empty()
    }

    /// `{ d | f(d, .., d) = 1 }`.
    pub fn diagonal_support(&self) -> BTreeSet<usize> {
        (0..self.domain).filter(|&d| self.get(&vec![d; self.arity])).collect()
    }

    /// Support of a unary predicate.
    pub fn support(&self) -> BTreeSet<usize> {
        (0..self.table.len()).filter(|&i| self.table[i]).collect()
    }

    pub fn transpose(&self) -> Result<Self> {
        if self.arity != 2 {
            return Err(Error::ArityMismatch { expected: 2, got: self.arity });
        }
        Predicate::from_fn(self.domain, 2, |t| self.get(&[t[1], t[0]]))
    }

    /// Image of the predicate under a renaming of domain elements:
    /// `g(perm[a_1], .., perm[a_m]) = f(a_1, .., a_m)`.
    pub fn rename(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.domain {
            return Err(Error::DomainMismatch(perm.len(), self.domain));
        }
        let mut inverse = vec![usize::MAX; self.domain];
        for (a, &b) in perm.iter().enumerate() {
            if b >= self.domain || inverse[b] != usize::MAX {
                return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
            }
            inverse[b] = a;
        }
        let mut pre = vec![0; self.arity];
        Predicate::from_fn(self.domain, self.arity, |t| {
            for (p, &v) in pre.iter_mut().zip(t) {
                *p = inverse[v];
            }
            self.get(&pre)
        })
    }

    /// `f|_{D'}` with the retained elements renamed `0..|D'|` in the given order.
    pub fn restrict(&self, retained: &[usize]) -> Result<Self> {
        if retained.is_empty() {
            return Err(Error::InvalidArgument("cannot restrict to an empty domain".into()));
        }
        if let Some(&v) = retained.iter().find(|&&v| v >= self.domain) {
            return Err(Error::ValueOutOfRange { value: v, domain: self.domain });
        }
        let mut full = vec![0; self.arity];
        Predicate::from_fn(retained.len(), self.arity, |t| {
            for (slot, &v) in full.iter_mut().zip(t) {
                *slot = retained[v];
            }
            self.get(&full)
        })
    }

    /// Rows of `d` bits joined by `/`.
    pub fn to_matrix_string(&self) -> String {
        let rows: Vec<String> = self
            .table
            .chunks(self.domain)
            .map(|row| row.iter().map(|&b| if b { '1' } else { '0' }).collect())
            .collect();
        rows.join("/")
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_matrix_string())
    }
}

impl fmt::Debug for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Predicate(d={}, m={}, {})", self.domain, self.arity, self.to_matrix_string())
    }
}

/// A finite set of predicates over a common domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateSet {
    domain: usize,
    members: Vec<Predicate>,
}

impl PredicateSet {
    pub fn new(domain: usize, members: Vec<Predicate>) -> Result<Self> {
        if let Some(p) = members.iter().find(|p| p.domain() != domain) {
            return Err(Error::DomainMismatch(domain, p.domain()));
        }
        Ok(PredicateSet { domain, members })
    }

    pub fn from_members(members: Vec<Predicate>) -> Result<Self> {
        let domain =
            members.first().map(|p| p.domain()).ok_or_else(|| Error::InvalidArgument("empty predicate set".into()))?;
        PredicateSet::new(domain, members)
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn members(&self) -> &[Predicate] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Predicate> {
        self.members.iter()
    }

    pub fn push(&mut self, p: Predicate) -> Result<()> {
        if p.domain() != self.domain {
            return Err(Error::DomainMismatch(self.domain, p.domain()));
        }
        self.members.push(p);
        Ok(())
    }

    pub fn contains(&self, p: &Predicate) -> bool {
        self.members.contains(p)
    }

    /// Sorted, duplicate-free copy.
    pub fn canonicalize(&self) -> PredicateSet {
        let mut members = self.members.clone();
        members.sort();
        members.dedup();
        PredicateSet { domain: self.domain, members }
    }
}

impl<'a> IntoIterator for &'a PredicateSet {
    type Item = &'a Predicate;
    type IntoIter = std::slice::Iter<'a, Predicate>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

pub(crate) fn table_len(domain: usize, arity: usize) -> Result<usize> {
    u32::try_from(arity)
        .ok()
        .and_then(|a| domain.checked_pow(a))
        .filter(|&n| n <= 1 << 24)
        .ok_or_else(|| Error::InvalidArgument(format!("table for d={domain}, m={arity} is too large")))
}

fn infer_arity(bits: usize, domain: usize) -> Option<usize> {
    let mut n = domain;
    let mut arity = 1;
    while n < bits {
        n = n.checked_mul(domain)?;
        arity += 1;
    }
    (n == bits).then_some(arity)
}

/// Odometer over `D^m` in index order (last coordinate fastest).
pub struct Tuples {
    domain: usize,
    current: Vec<usize>,
    started: bool,
    done: bool,
}

impl Tuples {
    pub fn new(domain: usize, arity: usize) -> Self {
        Tuples { domain, current: vec![0; arity], started: false, done: domain == 0 }
    }

    pub fn next_tuple(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.current);
        }
        for i in (0..self.current.len()).rev() {
            self.current[i] += 1;
            if self.current[i] < self.domain {
                return Some(&self.current);
            }
            self.current[i] = 0;
        }
        self.done = true;
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library;

    fn p(text: &str, d: usize) -> Predicate {
        Predicate::parse(text, d).unwrap()
    }

    #[test]
    fn parse_examples() {
        let neq3 = p("011/101/110", 3);
        assert_eq!(neq3.arity(), 2);
        assert_eq!(neq3, library::lookup("neq3", 3).unwrap());
        let eq2 = p("10/01", 2);
        assert!(eq2.get(&[0, 0]) && eq2.get(&[1, 1]) && !eq2.get(&[0, 1]));
        assert_eq!(p("100/011/011", 3), library::lookup("h7", 3).unwrap());
        assert_eq!(p("100\n011\n 011", 3), p("100/011/011", 3));
    }

    #[test]
    fn parse_errors() {
        assert_eq!(Predicate::parse("0110/1", 3), Err(Error::BadTableLength { bits: 5, domain: 3 }));
        assert_eq!(Predicate::parse("01a", 3), Err(Error::IllegalCharacter('a')));
        assert_eq!(Predicate::parse("01", 1), Err(Error::DomainTooSmall { min: 2, got: 1 }));
        assert!(Predicate::parse("", 2).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let neq3 = library::lookup("neq3", 3).unwrap();
        assert_eq!(neq3.evaluate(&[0, 1]), Ok(true));
        assert_eq!(neq3.evaluate(&[2, 2]), Ok(false));
        let h9 = p("100/100/001", 3);
        assert_eq!(h9.evaluate(&[1, 0]), Ok(true));
        assert_eq!(neq3.evaluate(&[0]), Err(Error::ArityMismatch { expected: 2, got: 1 }));
        assert_eq!(neq3.evaluate(&[0, 3]), Err(Error::ValueOutOfRange { value: 3, domain: 3 }));
    }

    #[test]
    fn triviality_and_diagonal() {
        assert!(p("000/000/000", 3).is_trivial());
        assert!(!library::lookup("neq3", 3).unwrap().is_trivial());
        assert!(!Predicate::unary(3, &[0]).unwrap().is_trivial());

        assert!(library::lookup("neq3", 3).unwrap().is_irreflexive());
        assert!(!library::lookup("eq3", 3).unwrap().is_irreflexive());
        assert!(p("011/001/000", 3).is_irreflexive());

        let all: BTreeSet<usize> = [0, 1, 2].into();
        assert_eq!(p("100/011/011", 3).diagonal_support(), all);
        assert!(library::lookup("neq3", 3).unwrap().diagonal_support().is_empty());
        assert_eq!(Predicate::unary(3, &[0, 1]).unwrap().diagonal_support(), BTreeSet::from([0, 1]));
    }

    #[test]
    fn index_bijection_d3() {
        for m in 1..=3 {
            let f = Predicate::constant(3, m, false).unwrap();
            let mut seen = vec![false; f.len()];
            let mut tuples = Tuples::new(3, m);
            let mut expected = 0;
            while let Some(t) = tuples.next_tuple() {
                let i = f.index_of(t);
                assert_eq!(i, expected);
                assert!(!seen[i]);
                seen[i] = true;
                assert_eq!(f.tuple_of(i), t);
                expected += 1;
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn rename_transpose_restrict() {
        let arc = p("010/000/000", 3);
        assert_eq!(arc.transpose().unwrap(), p("000/100/000", 3));
        // swap 0 and 2: the arc 0->1 becomes 2->1
        assert_eq!(arc.rename(&[2, 1, 0]).unwrap(), p("000/000/010", 3));
        assert_eq!(arc.restrict(&[0, 1]).unwrap(), library::lookup("f_dicut", 2).unwrap());
        assert!(arc.rename(&[0, 0, 1]).is_err());
    }

    #[test]
    fn canonicalize_removes_duplicates() {
        let neq3 = library::lookup("neq3", 3).unwrap();
        let eq3 = library::lookup("eq3", 3).unwrap();
        let set = PredicateSet::new(3, vec![neq3.clone(), eq3.clone(), neq3.clone()]).unwrap();
        assert_eq!(set.canonicalize().len(), 2);
        assert!(PredicateSet::new(2, vec![neq3]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn predicate() -> impl Strategy<Value = Predicate> {
            (2usize..=4, 1usize..=3).prop_flat_map(|(d, m)| {
                proptest::collection::vec(any::<bool>(), d.pow(m as u32))
                    .prop_map(move |t| Predicate::new(d, m, t).unwrap())
            })
        }

        proptest! {
            #[test]
            fn serialization_round_trips(f in predicate()) {
                let back = Predicate::parse(&f.to_string(), f.domain()).unwrap();
                prop_assert_eq!(back, f);
            }

            #[test]
            fn irreflexive_iff_empty_diagonal(f in predicate()) {
                prop_assert_eq!(f.is_irreflexive(), f.diagonal_support().is_empty());
            }
        }
    }
}
