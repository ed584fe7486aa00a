//! Constructive implementations: pinning, identification, projection,
//! all-one stripping, unary unions and intersections, diagonals, transpose.
//! Every returned implementation is checked with [`verify`] before it is
//! handed out.

use super::{default_names, display_name, verify, StrictImplementation, Term};
use crate::error::{Error, Result};
use crate::library::unary_name;
use crate::predicate::Predicate;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Row,
    Column,
}

fn checked(imp: StrictImplementation) -> Result<StrictImplementation> {
    let v = verify(&imp)?;
    if !v.valid {
        return Err(Error::UnverifiableLink(format!("derived implementation of {}", imp.target)));
    }
    Ok(imp)
}

fn term(p: &Predicate, scope: Vec<usize>) -> Term {
    Term { name: display_name(p), predicate: p.clone(), scope }
}

fn unary_term(domain: usize, support: &[usize], v: usize) -> Result<Term> {
    Ok(Term { name: unary_name(support), predicate: Predicate::unary(domain, support)?, scope: vec![v] })
}

fn position_check(f: &Predicate, i: usize) -> Result<()> {
    if i >= f.arity() {
        return Err(Error::ValueOutOfRange { value: i, domain: f.arity() });
    }
    Ok(())
}

/// Fixes `positions[i]` (0-based) to `constants[i]`: one auxiliary per pinned
/// position, forced by a singleton unary, α = pins + 1.
pub fn derive_pin(f: &Predicate, positions: &[usize], constants: &[usize]) -> Result<StrictImplementation> {
    let m = f.arity();
    let d = f.domain();
    if positions.is_empty() {
        return Err(Error::Precondition("nothing to pin".into()));
    }
    if positions.len() != constants.len() {
        return Err(Error::InvalidArgument("positions and constants differ in length".into()));
    }
    if positions.len() >= m {
        return Err(Error::Precondition("at least one position must stay free".into()));
    }
    for (k, &i) in positions.iter().enumerate() {
        position_check(f, i)?;
        if positions[..k].contains(&i) {
            return Err(Error::InvalidArgument(format!("position {i} pinned twice")));
        }
    }
    if let Some(&c) = constants.iter().find(|&&c| c >= d) {
        return Err(Error::ValueOutOfRange { value: c, domain: d });
    }
    let free: Vec<usize> = (0..m).filter(|i| !positions.contains(i)).collect();
    let pinned_value = |i: usize| positions.iter().position(|&p| p == i).map(|k| constants[k]);
    let target = Predicate::from_fn(d, free.len(), |t| {
        let full: Vec<usize> =
            (0..m).map(|i| pinned_value(i).unwrap_or_else(|| t[free.iter().position(|&p| p == i).unwrap()])).collect();
        f.get(&full)
    })?;
    let k = free.len();
    let scope: Vec<usize> = (0..m)
        .map(|i| match positions.iter().position(|&p| p == i) {
            Some(slot) => k + slot,
            None => free.iter().position(|&p| p == i).unwrap(),
        })
        .collect();
    let mut terms = vec![term(f, scope)];
    for (slot, &c) in constants.iter().enumerate() {
        terms.push(unary_term(d, &[c], k + slot)?);
    }
    let (p, a) = default_names(k, positions.len());
    checked(StrictImplementation::new(target, positions.len() as u32 + 1, p, a, terms)?)
}

/// `h'(..) = h(..)` with argument `j` replaced by argument `i`; α = 1.
pub fn derive_identify(f: &Predicate, i: usize, j: usize) -> Result<StrictImplementation> {
    if f.arity() < 2 {
        return Err(Error::Precondition("identification needs arity >= 2".into()));
    }
    position_check(f, i)?;
    position_check(f, j)?;
    if i == j {
        return Err(Error::InvalidArgument("cannot identify a position with itself".into()));
    }
    let m = f.arity();
    // surviving positions keep their order; j reads the variable of i
    let survivors: Vec<usize> = (0..m).filter(|&p| p != j).collect();
    let slot = |p: usize| survivors.iter().position(|&s| s == p).unwrap();
    let scope: Vec<usize> = (0..m).map(|p| if p == j { slot(i) } else { slot(p) }).collect();
    let target = Predicate::from_fn(f.domain(), m - 1, |t| {
        let full: Vec<usize> = scope.iter().map(|&v| t[v]).collect();
        f.get(&full)
    })?;
    let (p, a) = default_names(m - 1, 0);
    checked(StrictImplementation::new(target, 1, p, a, vec![term(f, scope)])?)
}

/// `h'(..) = max_y h(.., y, ..)` over argument `position`; α = 1.
pub fn derive_project(f: &Predicate, position: usize) -> Result<StrictImplementation> {
    if f.arity() < 2 {
        return Err(Error::Precondition("projection needs arity >= 2".into()));
    }
    position_check(f, position)?;
    let m = f.arity();
    let d = f.domain();
    let target = Predicate::from_fn(d, m - 1, |t| {
        (0..d).any(|y| {
            let mut full = t.to_vec();
            full.insert(position, y);
            f.get(&full)
        })
    })?;
    let scope: Vec<usize> = (0..m)
        .map(|p| match p.cmp(&position) {
            std::cmp::Ordering::Less => p,
            std::cmp::Ordering::Equal => m - 1,
            std::cmp::Ordering::Greater => p - 1,
        })
        .collect();
    let (p, a) = default_names(m - 1, 1);
    checked(StrictImplementation::new(target, 1, p, a, vec![term(f, scope)])?)
}

/// Zeroes an all-one column (or row) `a` of a binary predicate:
/// `g'(x,y) + 1 = g(x,y) + u_{D \ {a}}(y)`.
pub fn derive_strip_all_one(g: &Predicate, side: Side, a: usize) -> Result<StrictImplementation> {
    if g.arity() != 2 {
        return Err(Error::ArityMismatch { expected: 2, got: g.arity() });
    }
    let d = g.domain();
    if a >= d {
        return Err(Error::ValueOutOfRange { value: a, domain: d });
    }
    let on_line = |t: &[usize]| match side {
        Side::Column => t[1] == a,
        Side::Row => t[0] == a,
    };
    if !(0..d).all(|v| g.get(&if side == Side::Column { [v, a] } else { [a, v] })) {
        return Err(Error::Precondition(format!("{side:?} {a} of {g} is not all ones")));
    }
    let target = Predicate::from_fn(d, 2, |t| g.get(t) && !on_line(t))?;
    let rest: Vec<usize> = (0..d).filter(|&v| v != a).collect();
    let var = if side == Side::Column { 1 } else { 0 };
    let terms = vec![term(g, vec![0, 1]), unary_term(d, &rest, var)?];
    let (p, aux) = default_names(2, 0);
    checked(StrictImplementation::new(target, 2, p, aux, terms)?)
}

fn normalized(domain: usize, s: &[usize]) -> Result<Vec<usize>> {
    let mut v = s.to_vec();
    v.sort_unstable();
    v.dedup();
    if let Some(&x) = v.iter().find(|&&x| x >= domain) {
        return Err(Error::ValueOutOfRange { value: x, domain });
    }
    Ok(v)
}

/// `u_{S ∪ T}(x) = u_S(x) + u_T(x)` for disjoint non-empty `S`, `T`; α = 1.
pub fn derive_unary_sum(domain: usize, s: &[usize], t: &[usize]) -> Result<StrictImplementation> {
    let s = normalized(domain, s)?;
    let t = normalized(domain, t)?;
    if s.is_empty() || t.is_empty() {
        return Err(Error::Precondition("supports must be non-empty".into()));
    }
    if s.iter().any(|x| t.contains(x)) {
        return Err(Error::Precondition("supports overlap".into()));
    }
    let mut union = [s.clone(), t.clone()].concat();
    union.sort_unstable();
    let target = Predicate::unary(domain, &union)?;
    let terms = vec![unary_term(domain, &s, 0)?, unary_term(domain, &t, 0)?];
    let (p, a) = default_names(1, 0);
    checked(StrictImplementation::new(target, 1, p, a, terms)?)
}

/// `u_{S1 ∩ S2}(x) + 1 = u_{S1}(x) + u_{S2}(x)` for proper subsets with a
/// non-empty intersection whose union is the whole domain; α = 2.
pub fn derive_unary_intersect(domain: usize, s1: &[usize], s2: &[usize]) -> Result<StrictImplementation> {
    let s1 = normalized(domain, s1)?;
    let s2 = normalized(domain, s2)?;
    if s1.len() == domain || s2.len() == domain {
        return Err(Error::Precondition("supports must be proper subsets".into()));
    }
    let meet: Vec<usize> = s1.iter().copied().filter(|x| s2.contains(x)).collect();
    if meet.is_empty() {
        return Err(Error::Precondition("supports do not intersect".into()));
    }
    if (0..domain).any(|x| !s1.contains(&x) && !s2.contains(&x)) {
        return Err(Error::Precondition("supports must cover the domain".into()));
    }
    let target = Predicate::unary(domain, &meet)?;
    let terms = vec![unary_term(domain, &s1, 0)?, unary_term(domain, &s2, 0)?];
    let (p, a) = default_names(1, 0);
    checked(StrictImplementation::new(target, 2, p, a, terms)?)
}

/// `u_{r(f)}(x) = f(x, .., x)`; α = 1.
pub fn derive_diagonal(f: &Predicate) -> Result<StrictImplementation> {
    let target = Predicate::from_fn(f.domain(), 1, |t| f.get(&vec![t[0]; f.arity()]))?;
    let (p, a) = default_names(1, 0);
    checked(StrictImplementation::new(target, 1, p, a, vec![term(f, vec![0; f.arity()])])?)
}

/// `g^T(x,y) = g(y,x)`; α = 1.
pub fn derive_transpose(g: &Predicate) -> Result<StrictImplementation> {
    let target = g.transpose()?;
    let (p, a) = default_names(2, 0);
    checked(StrictImplementation::new(target, 1, p, a, vec![term(g, vec![1, 0])])?)
}
