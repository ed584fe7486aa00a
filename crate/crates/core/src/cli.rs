//! Command-line front end. Every sub-command parses its inputs, calls the
//! library, and serializes the result with one of the `render_*` functions,
//! so tests can compare the two paths byte for byte.
//!
//! Predicate lists (for `classify`, `core`, `search-impl`) are read from a
//! file or an inline `--set` string. Items are separated by newlines or `;`
//! and may be library names, matrices, `NAME = MATRIX`, `U_D` (all
//! non-trivial unaries) or `C_D` (singleton unaries). A `domain: N` item or
//! `--domain` fixes the domain; otherwise it is taken from the first named
//! predicate or matrix, falling back to three.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::chain::{enumerate_chains, is_supermodular_on_chain, is_supermodular_via_binary_projections, Chain};
use crate::classify::{classify, hardness_certificate, Classification, HardnessCertificate, Verdict};
use crate::error::{Error, Result};
use crate::gadget::corpus::{parse_corpus, verify_corpus, verify_entries, CorpusReport};
use crate::gadget::{resolve, search_named, verify, SearchBounds, StrictImplementation, Verification};
use crate::library;
use crate::morphism::{compute_core, is_core, CoreResult};
use crate::predicate::{Predicate, PredicateSet};
use crate::solver::{expected_random_value, solve_exact_with_budget, Instance, SolveResult, DEFAULT_BUDGET};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Parser, Debug)]
#[command(name = "maxcsp3", version, about = "Max CSP analysis over small domains")]
struct Cli {
    /// Output style; `structured` prints one `key: value` per line.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct SetArgs {
    /// File holding a predicate list.
    #[arg(long, conflicts_with = "set")]
    predicates: Option<PathBuf>,
    /// Inline predicate list, items separated by `;`.
    #[arg(long)]
    set: Option<String>,
    #[arg(long)]
    domain: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide PO / APX-complete for a predicate set (exit 0 tractable, 3 APX-complete).
    Classify {
        #[command(flatten)]
        input: SetArgs,
        /// Also look for a hardness certificate.
        #[arg(long)]
        certificate: bool,
        /// Auxiliary bound for the fallback search.
        #[arg(long, default_value_t = 1)]
        max_aux: usize,
        /// Term bound for the fallback search.
        #[arg(long, default_value_t = 3)]
        max_terms: usize,
        /// Candidate cap for the fallback search.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Check supermodularity of one predicate on one or all chains.
    Supermodular {
        #[arg(long)]
        predicate: String,
        #[arg(long)]
        domain: Option<usize>,
        /// A chain such as `0<1<2`; all chains when omitted.
        #[arg(long)]
        chain: Option<String>,
        /// Keep one chain of each dual pair.
        #[arg(long)]
        dedup_duals: bool,
        /// Use the binary-projection checker.
        #[arg(long)]
        projections: bool,
    },
    /// Compute the core of a predicate set.
    Core {
        #[command(flatten)]
        input: SetArgs,
    },
    /// Verify an implementation file (exit 0 valid, 1 invalid).
    VerifyImpl {
        file: PathBuf,
        /// Domain used when the file has no `domain:` field.
        #[arg(long, default_value_t = 3)]
        domain: usize,
    },
    /// Bounded search for an implementation of a target (exit 0 found, 1 none).
    SearchImpl {
        #[command(flatten)]
        input: SetArgs,
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 1)]
        max_aux: usize,
        #[arg(long, default_value_t = 3)]
        max_terms: usize,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Solve an instance exactly by enumeration.
    Solve {
        file: PathBuf,
        /// Largest number of assignments to enumerate.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Verify the embedded corpus, or a corpus file (exit 0 all pass, 1 otherwise).
    CorpusVerify {
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

/// Runs the command line `argv` (including the program name) and returns the
/// exit code with the report. Code 2 always means unusable input.
pub fn run(argv: &[String]) -> (i32, String) {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string().trim_end().to_string();
            return if e.use_stderr() { (2, text) } else { (0, text) };
        }
    };
    match dispatch(cli) {
        Ok(out) => out,
        Err(e) => (2, format!("error: {e}")),
    }
}

fn dispatch(cli: Cli) -> Result<(i32, String)> {
    let fmt = cli.format;
    match cli.command {
        Command::Classify { input, certificate, max_aux, max_terms, budget } => {
            let (set, _) = load_set(&input)?;
            let c = classify(&set)?;
            let cert = if certificate && c.verdict == Verdict::ApxComplete {
                let mut bounds = SearchBounds::new(max_aux, max_terms);
                if let Some(b) = budget {
                    bounds = bounds.with_budget(b);
                }
                Some(hardness_certificate(&set, &bounds)?)
            } else {
                None
            };
            let code = if c.verdict.is_tractable() { 0 } else { 3 };
            Ok((code, render_classification(&c, cert.as_ref(), fmt)))
        }
        Command::Supermodular { predicate, domain, chain, dedup_duals, projections } => {
            let d = domain.or_else(|| natural_domain(&predicate)).unwrap_or(3);
            let p = resolve(&predicate, d, &Default::default())?;
            let chains = match chain {
                Some(c) => {
                    let c: Chain = c.parse()?;
                    if c.domain() != d {
                        return Err(Error::DomainMismatch(d, c.domain()));
                    }
                    vec![c]
                }
                None => enumerate_chains(d, dedup_duals)?,
            };
            let mut rows = Vec::new();
            for c in chains {
                let report = if projections {
                    is_supermodular_via_binary_projections(&p, &c)?
                } else {
                    is_supermodular_on_chain(&p, &c)?
                };
                rows.push((c, report.holds, report.witness));
            }
            Ok((0, render_supermodularity(&rows, fmt)))
        }
        Command::Core { input } => {
            let (set, _) = load_set(&input)?;
            let core = compute_core(&set)?;
            let already = is_core(&set)?.0;
            Ok((0, render_core(&core, already, fmt)))
        }
        Command::VerifyImpl { file, domain } => {
            let text = read(&file)?;
            let imp = crate::gadget::parse_with_domain(&text, domain)?;
            let v = verify(&imp)?;
            let code = if v.valid { 0 } else { 1 };
            Ok((code, render_verification(&imp, &v, fmt)))
        }
        Command::SearchImpl { input, target, max_aux, max_terms, budget } => {
            let (set, names) = load_set(&input)?;
            let target_name = target;
            let target = resolve(&target_name, set.domain(), &Default::default())?;
            let mut bounds = SearchBounds::new(max_aux, max_terms);
            if let Some(b) = budget {
                bounds = bounds.with_budget(b);
            }
            let named: Vec<(String, Predicate)> = names.into_iter().zip(set.iter().cloned()).collect();
            let found = search_named(&named, &target, &bounds)?.map(|imp| imp.named(target_name));
            let code = if found.is_some() { 0 } else { 1 };
            Ok((code, render_search(found.as_ref(), fmt)))
        }
        Command::Solve { file, budget } => {
            let inst: Instance = read(&file)?.parse()?;
            let result = solve_exact_with_budget(&inst, budget)?;
            Ok((0, render_solve(&inst, &result, fmt)?))
        }
        Command::CorpusVerify { file } => {
            let report = match file {
                Some(f) => verify_entries(&parse_corpus(&read(&f)?)?),
                None => verify_corpus(),
            };
            let code = if report.all_passed() { 0 } else { 1 };
            Ok((code, render_corpus(&report, fmt)))
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn load_set(args: &SetArgs) -> Result<(PredicateSet, Vec<String>)> {
    let text = match (&args.predicates, &args.set) {
        (Some(path), None) => read(path)?,
        (None, Some(inline)) => inline.clone(),
        _ => return Err(Error::InvalidArgument("give exactly one of --predicates and --set".into())),
    };
    parse_predicate_list(&text, args.domain)
}

/// The domain a token implies on its own: a library entry's domain or a
/// matrix's row length.
fn natural_domain(token: &str) -> Option<usize> {
    if let Some(e) = library::entries().iter().find(|e| e.name == token) {
        return Some(e.predicate.domain());
    }
    let first = token.split('/').next()?.trim();
    (!first.is_empty() && first.chars().all(|c| c == '0' || c == '1')).then_some(first.len())
}

/// Parses a predicate list into a set and a display name per member.
pub fn parse_predicate_list(text: &str, domain: Option<usize>) -> Result<(PredicateSet, Vec<String>)> {
    let mut items: Vec<(usize, String)> = Vec::new();
    let mut declared = None;
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for part in line.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            if let Some(v) = part.strip_prefix("domain:") {
                let d = v.trim().parse().map_err(|_| Error::parse(n + 1, "domain must be an integer"))?;
                declared = Some(d);
            } else {
                items.push((n + 1, part.to_string()));
            }
        }
    }
    if items.is_empty() {
        return Err(Error::InvalidArgument("empty predicate list".into()));
    }
    let d = domain.or(declared).unwrap_or_else(|| {
        items
            .iter()
            .find_map(|(_, item)| {
                let body = item.split_once('=').map_or(item.as_str(), |(_, m)| m.trim());
                natural_domain(body)
            })
            .unwrap_or(3)
    });
    let mut members = Vec::new();
    let mut names = Vec::new();
    let lets = Default::default();
    for (line, item) in items {
        let located = |e: Error| match e {
            e @ Error::Parse { .. } => e,
            e => Error::parse(line, e.to_string()),
        };
        match item.as_str() {
            "U_D" | "C_D" => {
                let unaries = if item == "U_D" { library::all_unaries(d) } else { library::singletons(d) };
                for u in unaries {
                    names.push(library::name_of(&u).expect("unaries are named"));
                    members.push(u);
                }
            }
            _ => {
                let (name, body) = match item.split_once('=') {
                    Some((n, m)) => (n.trim().to_string(), m.trim()),
                    None => (String::new(), item.as_str()),
                };
                let p = resolve(body, d, &lets).map_err(located)?;
                let name =
                    if name.is_empty() { library::name_of(&p).unwrap_or_else(|| body.to_string()) } else { name };
                names.push(name);
                members.push(p);
            }
        }
    }
    Ok((PredicateSet::new(d, members)?, names))
}

fn list(values: &[usize]) -> String {
    values.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn tuple(values: &[usize]) -> String {
    format!("({})", list(values))
}

/// The chain in original element names.
fn lift_chain(core: &CoreResult, chain: &Chain) -> String {
    let order: Vec<String> = chain.order().iter().map(|&i| core.sub_domain[i].to_string()).collect();
    order.join("<")
}

pub fn render_classification(
    c: &Classification,
    certificate: Option<&Option<HardnessCertificate>>,
    fmt: Format,
) -> String {
    let mut out = String::new();
    let chain = c.chain.as_ref().map(|ch| lift_chain(&c.core, ch));
    match fmt {
        Format::Text => {
            let _ = writeln!(out, "{}", c.verdict);
            let _ = writeln!(out, "core: {{{}}} via {}", list(&c.core.sub_domain), c.core.retraction);
            match (&chain, c.verdict) {
                (Some(ch), _) => {
                    let _ = writeln!(out, "chain: {ch}");
                }
                (None, Verdict::Trivial) => {
                    let _ = writeln!(out, "a constant assignment is optimal");
                }
                (None, _) => {
                    let _ = writeln!(out, "no chain admits the core");
                }
            }
            match certificate {
                Some(Some(cert)) => {
                    let n = cert.chain.len();
                    let _ = writeln!(
                        out,
                        "certificate: {n} link{}, terminal {}",
                        if n == 1 { "" } else { "s" },
                        cert.terminal
                    );
                    for (name, p) in &cert.base {
                        let _ = writeln!(out, "base {name} = {p}");
                    }
                    for link in &cert.chain.links {
                        let _ = writeln!(out, "[{}]", link.name);
                        let _ = writeln!(out, "{}", link.implementation);
                    }
                }
                Some(None) => {
                    let _ = writeln!(out, "certificate: none found within bounds");
                }
                None => {}
            }
        }
        Format::Structured => {
            let verdict = match c.verdict {
                Verdict::Trivial | Verdict::Po => "PO",
                Verdict::ApxComplete => "APX_COMPLETE",
            };
            let _ = writeln!(out, "verdict: {verdict}");
            let _ = writeln!(out, "po_trivial: {}", c.verdict == Verdict::Trivial);
            let _ = writeln!(out, "domain: {}", c.core.retraction.domain());
            let _ = writeln!(out, "core_size: {}", c.core.size());
            let _ = writeln!(out, "core_elements: {}", list(&c.core.sub_domain));
            let _ = writeln!(out, "retraction: {}", c.core.retraction);
            let _ = writeln!(out, "chain: {}", chain.as_deref().unwrap_or("none"));
            match certificate {
                Some(Some(cert)) => {
                    let _ = writeln!(out, "certificate: found");
                    let _ = writeln!(out, "certificate_links: {}", cert.chain.len());
                    let _ = writeln!(out, "certificate_terminal: {}", cert.terminal);
                    for (i, link) in cert.chain.links.iter().enumerate() {
                        let imp = &link.implementation;
                        let _ = writeln!(
                            out,
                            "link.{}: {} target={} alpha={} aux={} terms={}",
                            i + 1,
                            link.name,
                            imp.target,
                            imp.alpha,
                            imp.auxiliary.len(),
                            imp.terms.len()
                        );
                    }
                }
                Some(None) => {
                    let _ = writeln!(out, "certificate: none");
                }
                None => {
                    let _ = writeln!(out, "certificate: not_requested");
                }
            }
        }
    }
    out.trim_end().to_string()
}

pub type ChainRow = (Chain, bool, Option<(Vec<usize>, Vec<usize>)>);

pub fn render_supermodularity(rows: &[ChainRow], fmt: Format) -> String {
    let mut out = String::new();
    for (chain, holds, witness) in rows {
        match fmt {
            Format::Text => {
                if rows.len() == 1 && *holds {
                    let _ = writeln!(out, "supermodular");
                } else if *holds {
                    let _ = writeln!(out, "{chain}: supermodular");
                } else {
                    let _ = write!(out, "{chain}: not supermodular");
                    if let Some((a, b)) = witness {
                        let _ = write!(out, ", witness {} {}", tuple(a), tuple(b));
                    }
                    let _ = writeln!(out);
                }
            }
            Format::Structured => {
                let _ = writeln!(out, "supermodular[{chain}]: {holds}");
                if let Some((a, b)) = witness {
                    let _ = writeln!(out, "witness[{chain}]: {} {}", tuple(a), tuple(b));
                }
            }
        }
    }
    if fmt == Format::Structured {
        let any = rows.iter().any(|r| r.1);
        let _ = writeln!(out, "any_chain: {any}");
    }
    out.trim_end().to_string()
}

pub fn render_core(core: &CoreResult, already_core: bool, fmt: Format) -> String {
    let mut out = String::new();
    match fmt {
        Format::Text => {
            let _ = writeln!(out, "core size: {}", core.size());
            let _ = writeln!(out, "elements: {{{}}}", list(&core.sub_domain));
            let _ = writeln!(out, "retraction: {}", core.retraction);
            if already_core {
                let _ = writeln!(out, "the set is its own core");
            }
            for p in core.restricted.iter() {
                let _ = writeln!(out, "  {p}");
            }
        }
        Format::Structured => {
            let _ = writeln!(out, "core_size: {}", core.size());
            let _ = writeln!(out, "core_elements: {}", list(&core.sub_domain));
            let _ = writeln!(out, "retraction: {}", core.retraction);
            let _ = writeln!(out, "is_core: {already_core}");
            for (i, p) in core.restricted.iter().enumerate() {
                let _ = writeln!(out, "member.{}: {p}", i + 1);
            }
        }
    }
    out.trim_end().to_string()
}

pub fn render_verification(imp: &StrictImplementation, v: &Verification, fmt: Format) -> String {
    let mut out = String::new();
    let recovered = v.recovered_alpha().map_or("none".to_string(), |a| a.to_string());
    match fmt {
        Format::Text => {
            if v.valid {
                let _ = writeln!(out, "valid (alpha {})", imp.alpha);
            } else {
                let _ = write!(out, "invalid");
                if let Some(c) = &v.counterexample {
                    let _ =
                        write!(out, ": primary {} reaches {}, expected {}", tuple(&c.primary), c.achieved, c.expected);
                }
                let _ = writeln!(out);
                if let Some(a) = v.recovered_alpha() {
                    let _ = writeln!(out, "the profile fits alpha {a}");
                }
            }
        }
        Format::Structured => {
            let _ = writeln!(out, "valid: {}", v.valid);
            let _ = writeln!(out, "alpha: {}", imp.alpha);
            let _ = writeln!(out, "recovered_alpha: {recovered}");
            match &v.counterexample {
                Some(c) => {
                    let _ = writeln!(
                        out,
                        "counterexample: {} achieved={} expected={}",
                        tuple(&c.primary),
                        c.achieved,
                        c.expected
                    );
                }
                None => {
                    let _ = writeln!(out, "counterexample: none");
                }
            }
        }
    }
    out.trim_end().to_string()
}

pub fn render_search(found: Option<&StrictImplementation>, fmt: Format) -> String {
    match (found, fmt) {
        (Some(imp), Format::Text) => imp.to_string(),
        (None, Format::Text) => "no implementation within bounds".to_string(),
        (Some(imp), Format::Structured) => {
            let terms: Vec<String> = imp
                .terms
                .iter()
                .map(|t| {
                    let vars: Vec<&str> = t.scope.iter().map(|&v| imp.variable_name(v)).collect();
                    format!("{}({})", t.name, vars.join(","))
                })
                .collect();
            format!("found: true\nalpha: {}\naux: {}\nterms: {}", imp.alpha, imp.auxiliary.len(), terms.join(" + "))
        }
        (None, Format::Structured) => "found: false".to_string(),
    }
}

pub fn render_solve(inst: &Instance, r: &SolveResult, fmt: Format) -> Result<String> {
    let expected = expected_random_value(inst)?;
    let sep = match fmt {
        Format::Text => ["optimum", "argmax", "evaluations", "total weight", "random expectation"],
        Format::Structured => ["optimum", "argmax", "evaluations", "total_weight", "random_expectation"],
    };
    Ok(format!(
        "{}: {}\n{}: {}\n{}: {}\n{}: {}\n{}: {}",
        sep[0],
        r.optimum,
        sep[1],
        r.argmax,
        sep[2],
        r.evaluations,
        sep[3],
        inst.total_weight(),
        sep[4],
        expected
    ))
}

pub fn render_corpus(report: &CorpusReport, fmt: Format) -> String {
    match fmt {
        Format::Text => report.to_string(),
        Format::Structured => {
            let mut out = String::new();
            for e in &report.entries {
                let _ = writeln!(out, "entry.{}: {}", e.id, if e.passed() { "ok" } else { "fail" });
            }
            let _ = write!(out, "verified: {}\ntotal: {}", report.passed(), report.total());
            out
        }
    }
}
