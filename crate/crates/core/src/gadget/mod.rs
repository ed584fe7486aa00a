//! Strict α-implementations ("gadgets").
//!
//! An implementation of `g` from a set of predicates is a sum of terms over
//! primary variables `y` and auxiliary variables `z` such that for every
//! assignment to `y`, `g(y) + (α - 1) = max_z Σ terms`.

mod compose;
pub mod corpus;
mod derive;
mod search;
mod text;
mod verify;

use crate::error::{Error, Result};
use crate::predicate::Predicate;

pub use compose::compose;
pub use derive::{
    derive_diagonal, derive_identify, derive_pin, derive_project, derive_strip_all_one, derive_transpose,
    derive_unary_intersect, derive_unary_sum, Side,
};
pub use search::{search, search_named, SearchBounds};
pub use text::{parse_with_domain, resolve};
pub use verify::{profile, verify, verify_exhaustive, Counterexample, Verification};

/// One summand `predicate(scope)`; scope entries index into the primary
/// variables followed by the auxiliary variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub name: String,
    pub predicate: Predicate,
    pub scope: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrictImplementation {
    pub target: Predicate,
    pub target_name: Option<String>,
    pub alpha: u32,
    pub primary: Vec<String>,
    pub auxiliary: Vec<String>,
    pub terms: Vec<Term>,
}

impl StrictImplementation {
    pub fn new(
        target: Predicate,
        alpha: u32,
        primary: Vec<String>,
        auxiliary: Vec<String>,
        terms: Vec<Term>,
    ) -> Result<Self> {
        let imp = StrictImplementation { target, target_name: None, alpha, primary, auxiliary, terms };
        imp.validate()?;
        Ok(imp)
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.target_name = Some(name.into());
        self
    }

    pub fn domain(&self) -> usize {
        self.target.domain()
    }

    pub fn variable_count(&self) -> usize {
        self.primary.len() + self.auxiliary.len()
    }

    pub fn variable_name(&self, v: usize) -> &str {
        if v < self.primary.len() {
            &self.primary[v]
        } else {
            &self.auxiliary[v - self.primary.len()]
        }
    }

    /// Checks the structural conditions; [`verify`] checks the identity.
    pub fn validate(&self) -> Result<()> {
        if self.alpha == 0 {
            return Err(Error::InvalidArgument("alpha must be at least 1".into()));
        }
        if self.terms.is_empty() {
            return Err(Error::InvalidArgument("an implementation needs at least one term".into()));
        }
        if self.primary.len() != self.target.arity() {
            return Err(Error::ArityMismatch { expected: self.target.arity(), got: self.primary.len() });
        }
        let mut names: Vec<&String> = self.primary.iter().chain(&self.auxiliary).collect();
        names.sort();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!("variable {} declared twice", w[0])));
        }
        let n = self.variable_count();
        for t in &self.terms {
            if t.predicate.domain() != self.domain() {
                return Err(Error::DomainMismatch(self.domain(), t.predicate.domain()));
            }
            if t.scope.len() != t.predicate.arity() {
                return Err(Error::ArityMismatch { expected: t.predicate.arity(), got: t.scope.len() });
            }
            if let Some(&v) = t.scope.iter().find(|&&v| v >= n) {
                return Err(Error::DanglingVariable(format!("#{v} in {}", t.name)));
            }
        }
        Ok(())
    }
}

/// A named step of an implementation chain; later steps refer to earlier
/// targets through term names equal to the link name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Link {
    pub name: String,
    pub implementation: StrictImplementation,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ImplementationChain {
    pub links: Vec<Link>,
}

impl ImplementationChain {
    pub fn new(links: Vec<Link>) -> Self {
        ImplementationChain { links }
    }

    pub fn push(&mut self, name: impl Into<String>, implementation: StrictImplementation) {
        self.links.push(Link { name: name.into(), implementation });
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn final_target(&self) -> Option<&Predicate> {
        self.links.last().map(|l| &l.implementation.target)
    }
}

/// Conventional variable names: `x, y` (or `x1..xk`) and `z, w` (or `z1..zn`).
pub(crate) fn default_names(primary: usize, auxiliary: usize) -> (Vec<String>, Vec<String>) {
    let p = match primary {
        1 => vec!["x".to_string()],
        2 => vec!["x".to_string(), "y".to_string()],
        k => (1..=k).map(|i| format!("x{i}")).collect(),
    };
    let a = match auxiliary {
        1 => vec!["z".to_string()],
        2 => vec!["z".to_string(), "w".to_string()],
        n => (1..=n).map(|i| format!("z{i}")).collect(),
    };
    (p, a)
}

/// Library name if one exists, else the matrix text.
pub(crate) fn display_name(p: &Predicate) -> String {
    crate::library::name_of(p).unwrap_or_else(|| p.to_string())
}
