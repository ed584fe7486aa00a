//! Chains (total orders on the domain) and supermodularity checking.
//!
//! On a chain, meet and join are min and max with respect to the order, and
//! `f` is supermodular when `f(a) + f(b) <= f(a meet b) + f(a join b)` for
//! all tuples `a`, `b`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::predicate::{Predicate, PredicateSet};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Chain {
    order: Vec<usize>,
    rank: Vec<usize>,
}

impl Chain {
    /// `order` lists the domain from least to greatest.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let d = order.len();
        if d == 0 {
            return Err(Error::DomainTooSmall { min: 1, got: 0 });
        }
        let mut rank = vec![usize::MAX; d];
        for (r, &v) in order.iter().enumerate() {
            if v >= d || rank[v] != usize::MAX {
                return Err(Error::InvalidArgument(format!("{order:?} is not a permutation")));
            }
            rank[v] = r;
        }
        Ok(Chain { order, rank })
    }

    /// The natural order `0 < 1 < .. < d-1`.
    pub fn natural(domain: usize) -> Self {
        Chain::new((0..domain).collect()).expect("identity permutation")
    }

    /// `C_i` on a three-element domain: `i` in the middle, smaller endpoint first.
    pub fn with_middle(middle: usize) -> Result<Self> {
        if middle > 2 {
            return Err(Error::ValueOutOfRange { value: middle, domain: 3 });
        }
        let mut ends = (0..3).filter(|&v| v != middle);
        let (lo, hi) = (ends.next().unwrap(), ends.next().unwrap());
        Chain::new(vec![lo, middle, hi])
    }

    pub fn domain(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn rank(&self, v: usize) -> usize {
        self.rank[v]
    }

    pub fn dual(&self) -> Chain {
        let mut order = self.order.clone();
        order.reverse();
        Chain::new(order).expect("reversal of a permutation")
    }

    /// Middle element of a chain on three elements.
    pub fn middle(&self) -> Option<usize> {
        (self.order.len() == 3).then(|| self.order[1])
    }

    #[inline]
    pub fn meet(&self, a: usize, b: usize) -> usize {
        if self.rank[a] <= self.rank[b] {
            a
        } else {
            b
        }
    }

    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        if self.rank[a] >= self.rank[b] {
            a
        } else {
            b
        }
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.order.iter().map(usize::to_string).collect();
        f.write_str(&parts.join("<"))
    }
}

impl fmt::Debug for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chain({self})")
    }
}

impl FromStr for Chain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let order = s
            .split('<')
            .map(|t| t.trim().parse::<usize>().map_err(|_| Error::InvalidArgument(format!("bad chain {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Chain::new(order)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupermodularityReport {
    pub holds: bool,
    /// A pair `(a, b)` with `f(a) + f(b) > f(a meet b) + f(a join b)`.
    pub witness: Option<(Vec<usize>, Vec<usize>)>,
}

impl SupermodularityReport {
    fn holds() -> Self {
        SupermodularityReport { holds: true, witness: None }
    }
}

/// All `d!` orders in lexicographic order of the order sequence. With
/// `dedup_duals`, only the lexicographically smaller member of each dual pair.
pub fn enumerate_chains(domain: usize, dedup_duals: bool) -> Result<Vec<Chain>> {
    if domain < 2 {
        return Err(Error::DomainTooSmall { min: 2, got: domain });
    }
    if domain > 8 {
        return Err(Error::DomainTooLarge(domain));
    }
    let mut out = Vec::new();
    let mut order: Vec<usize> = (0..domain).collect();
    loop {
        let mut reversed = order.clone();
        reversed.reverse();
        if !dedup_duals || order < reversed {
            out.push(Chain::new(order.clone())?);
        }
        if !next_permutation(&mut order) {
            break;
        }
    }
    Ok(out)
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Definitional check over all unordered pairs of tuples. Unary predicates
/// are supermodular on every chain and skip the scan.
pub fn is_supermodular_on_chain(f: &Predicate, chain: &Chain) -> Result<SupermodularityReport> {
    if f.domain() != chain.domain() {
        return Err(Error::DomainMismatch(f.domain(), chain.domain()));
    }
    if f.arity() == 1 {
        return Ok(SupermodularityReport::holds());
    }
    let n = f.len();
    let m = f.arity();
    let mut meet = vec![0; m];
    let mut join = vec![0; m];
    for ia in 0..n {
        let a = f.tuple_of(ia);
        for ib in ia + 1..n {
            let fa = f.at(ia) as u32;
            let fb = f.at(ib) as u32;
            if fa + fb == 0 {
                continue;
            }
            let b = f.tuple_of(ib);
            for k in 0..m {
                meet[k] = chain.meet(a[k], b[k]);
                join[k] = chain.join(a[k], b[k]);
            }
            if fa + fb > f.value(&meet) + f.value(&join) {
                let witness = if fb > fa { (b, a) } else { (a, b) };
                return Ok(SupermodularityReport { holds: false, witness: Some(witness) });
            }
        }
    }
    Ok(SupermodularityReport::holds())
}

/// Checks every binary predicate obtained by fixing all but two argument
/// positions to constants. Violations are lifted back to full tuples.
pub fn is_supermodular_via_binary_projections(f: &Predicate, chain: &Chain) -> Result<SupermodularityReport> {
    if f.domain() != chain.domain() {
        return Err(Error::DomainMismatch(f.domain(), chain.domain()));
    }
    let m = f.arity();
    if m < 2 {
        return Err(Error::Precondition(
            "binary projections need arity >= 2; unary predicates are always supermodular".into(),
        ));
    }
    let d = f.domain();
    let mut full = vec![0; m];
    for i in 0..m {
        for j in i + 1..m {
            let others: Vec<usize> = (0..m).filter(|&k| k != i && k != j).collect();
            let mut constants = crate::predicate::Tuples::new(d, others.len());
            while let Some(cs) = constants.next_tuple() {
                for (&k, &c) in others.iter().zip(cs) {
                    full[k] = c;
                }
                let projection = Predicate::from_fn(d, 2, |t| {
                    let mut tuple = full.clone();
                    tuple[i] = t[0];
                    tuple[j] = t[1];
                    f.get(&tuple)
                })?;
                let report = is_supermodular_on_chain(&projection, chain)?;
                if let Some((a, b)) = report.witness {
                    let lift = |t: &[usize]| {
                        let mut tuple = full.clone();
                        tuple[i] = t[0];
                        tuple[j] = t[1];
                        tuple
                    };
                    return Ok(SupermodularityReport { holds: false, witness: Some((lift(&a), lift(&b))) });
                }
            }
        }
    }
    Ok(SupermodularityReport::holds())
}

pub fn set_is_supermodular_on_chain(set: &PredicateSet, chain: &Chain) -> Result<bool> {
    for f in set {
        if !is_supermodular_on_chain(f, chain)?.holds {
            return Ok(false);
        }
    }
    Ok(true)
}

/// First chain, in deduplicated enumeration order, on which every member is
/// supermodular. A one-element domain has the single trivial chain.
pub fn find_supermodular_chain(set: &PredicateSet) -> Result<Option<Chain>> {
    if set.is_empty() {
        return Err(Error::Precondition("predicate set is empty".into()));
    }
    if set.domain() == 1 {
        return Ok(Some(Chain::natural(1)));
    }
    for chain in enumerate_chains(set.domain(), true)? {
        if set_is_supermodular_on_chain(set, &chain)? {
            return Ok(Some(chain));
        }
    }
    Ok(None)
}

/// `Some(i)` iff the binary predicate on three elements is supermodular on
/// `C_i` and on neither of the other two chain classes.
pub fn exclusive_chain_class(f: &Predicate) -> Result<Option<usize>> {
    if f.arity() != 2 {
        return Err(Error::ArityMismatch { expected: 2, got: f.arity() });
    }
    if f.domain() != 3 {
        return Err(Error::DomainMismatch(3, f.domain()));
    }
    let mut classes = Vec::new();
    for i in 0..3 {
        if is_supermodular_on_chain(f, &Chain::with_middle(i)?)?.holds {
            classes.push(i);
        }
    }
    Ok(match classes[..] {
        [i] => Some(i),
        _ => None,
    })
}
