//! Max CSP over small finite domains.
//!
//! Truth-table predicates, supermodularity on chains, endomorphisms and cores,
//! strict implementations (verification, composition, derivation and bounded
//! search), the PO / APX-complete classifier for domains of size two and
//! three, and an exact brute-force solver used as an oracle.

pub mod chain;
pub mod classify;
pub mod cli;
pub mod error;
pub mod gadget;
pub mod library;
pub mod morphism;
pub mod predicate;
pub mod solver;

pub use chain::{Chain, SupermodularityReport};
pub use classify::{Classification, HardnessCertificate, TerminalKind, Verdict};
pub use error::{Error, Result};
pub use gadget::{ImplementationChain, Link, SearchBounds, StrictImplementation, Term, Verification};
pub use morphism::{CoreResult, UnaryMap};
pub use predicate::{Predicate, PredicateSet};
pub use solver::{Assignment, Constraint, Instance, SolveResult};
