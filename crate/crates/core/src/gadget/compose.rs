use std::collections::{BTreeSet, HashMap};

use super::{verify, ImplementationChain, StrictImplementation, Term};
use crate::error::{Error, Result};

/// Collapses a chain into one implementation of its final target.
///
/// Every term naming an earlier link is replaced by a copy of that link's
/// (recursively expanded) implementation, with its primary variables bound
/// to the term's scope and fresh auxiliary variables per occurrence. Each
/// substitution of a link with constant `α_j` adds `α_j - 1` to α.
pub fn compose(chain: &ImplementationChain) -> Result<StrictImplementation> {
    let Some(last) = chain.links.last() else {
        return Err(Error::InvalidArgument("empty implementation chain".into()));
    };
    let position: HashMap<&str, usize> = chain.links.iter().enumerate().map(|(i, l)| (l.name.as_str(), i)).collect();
    if position.len() != chain.links.len() {
        return Err(Error::InvalidArgument("duplicate link names".into()));
    }
    for (i, link) in chain.links.iter().enumerate() {
        for t in &link.implementation.terms {
            if let Some(&j) = position.get(t.name.as_str()) {
                if j >= i {
                    return Err(Error::CyclicDependency(format!("{} uses {}", link.name, t.name)));
                }
                if t.predicate != chain.links[j].implementation.target {
                    return Err(Error::InvalidArgument(format!(
                        "term {} in {} does not match the target of that link",
                        t.name, link.name
                    )));
                }
            }
        }
        if !verify(&link.implementation)?.valid {
            return Err(Error::UnverifiableLink(link.name.clone()));
        }
    }

    let mut expanded: Vec<StrictImplementation> = Vec::with_capacity(chain.links.len());
    for link in &chain.links {
        let imp = &link.implementation;
        let mut out = Expansion::new(imp);
        for t in &imp.terms {
            match position.get(t.name.as_str()) {
                Some(&j) => out.substitute(&expanded[j], &t.scope),
                None => out.terms.push(t.clone()),
            }
        }
        expanded.push(out.finish(&link.name));
    }
    let mut result = expanded.pop().expect("non-empty chain");
    result.target_name = Some(last.name.clone());
    Ok(result)
}

struct Expansion<'a> {
    base: &'a StrictImplementation,
    auxiliary: Vec<String>,
    used: BTreeSet<String>,
    terms: Vec<Term>,
    alpha: u32,
    counter: usize,
}

impl<'a> Expansion<'a> {
    fn new(base: &'a StrictImplementation) -> Self {
        Expansion {
            base,
            auxiliary: base.auxiliary.clone(),
            used: base.primary.iter().chain(&base.auxiliary).cloned().collect(),
            terms: Vec::new(),
            alpha: base.alpha,
            counter: 0,
        }
    }

    fn fresh(&mut self, stem: &str) -> usize {
        loop {
            self.counter += 1;
            let name = format!("{stem}.{}", self.counter);
            if self.used.insert(name.clone()) {
                self.auxiliary.push(name);
                return self.base.primary.len() + self.auxiliary.len() - 1;
            }
        }
    }

    fn substitute(&mut self, inner: &StrictImplementation, scope: &[usize]) {
        let k = inner.primary.len();
        let mut map: Vec<usize> = scope.to_vec();
        for name in &inner.auxiliary {
            let stem = name.split('.').next().unwrap_or(name).to_string();
            let v = self.fresh(&stem);
            map.push(v);
        }
        debug_assert_eq!(map.len(), k + inner.auxiliary.len());
        for t in &inner.terms {
            self.terms.push(Term {
                name: t.name.clone(),
                predicate: t.predicate.clone(),
                scope: t.scope.iter().map(|&v| map[v]).collect(),
            });
        }
        self.alpha += inner.alpha - 1;
    }

    /// Auxiliary indices were assigned against the final primary count, so
    /// the original terms' indices stay valid.
    fn finish(self, name: &str) -> StrictImplementation {
        StrictImplementation {
            target: self.base.target.clone(),
            target_name: Some(name.to_string()),
            alpha: self.alpha,
            primary: self.base.primary.clone(),
            auxiliary: self.auxiliary,
            terms: self.terms,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::derive_transpose;
    use crate::gadget::Link;
    use crate::library::lookup;

    fn link(name: &str, imp: StrictImplementation) -> Link {
        Link { name: name.into(), implementation: imp }
    }

    #[test]
    fn single_link_is_unchanged() {
        let imp = derive_transpose(&lookup("arc01", 3).unwrap()).unwrap();
        let out = compose(&ImplementationChain::new(vec![link("t", imp.clone())])).unwrap();
        assert_eq!(out.terms, imp.terms);
        assert_eq!(out.alpha, imp.alpha);
        assert_eq!(out.auxiliary, imp.auxiliary);
    }

    #[test]
    fn forward_reference_is_cyclic() {
        let mut a = derive_transpose(&lookup("arc01", 3).unwrap()).unwrap();
        a.terms[0].name = "b".into();
        let b = derive_transpose(&lookup("arc01", 3).unwrap()).unwrap();
        let chain = ImplementationChain::new(vec![link("a", a), link("b", b)]);
        assert!(matches!(compose(&chain), Err(Error::CyclicDependency(_))));
    }

    #[test]
    fn bad_link_is_rejected() {
        let mut a = derive_transpose(&lookup("arc01", 3).unwrap()).unwrap();
        a.alpha = 2;
        let chain = ImplementationChain::new(vec![link("a", a)]);
        assert_eq!(compose(&chain), Err(Error::UnverifiableLink("a".into())));
    }
}
