use maxcsp3::classify::{classify, hardness_certificate};
use maxcsp3::gadget::corpus::{entries, verify_entry};
use maxcsp3::library::all_unaries;
use maxcsp3::{Predicate, PredicateSet, SearchBounds, TerminalKind, Verdict};

fn binary(d: usize, bits: u32) -> Predicate {
    let n = d * d;
    let table = (0..n).map(|i| bits >> (n - 1 - i) & 1 == 1).collect();
    Predicate::new(d, 2, table).unwrap()
}

/// Certificates for every APX-complete `{f}` and `{f} + U_D` with `f` binary;
/// returns (APX-complete sets, certified sets).
fn coverage(d: usize, with_unaries: bool) -> (usize, usize) {
    let bounds = SearchBounds::new(1, 3).with_budget(200_000);
    let (mut apx, mut certified) = (0, 0);
    for bits in 1..(1u32 << (d * d)) {
        let mut members = vec![binary(d, bits)];
        if with_unaries {
            members.extend(all_unaries(d));
        }
        let set = PredicateSet::new(d, members).unwrap();
        if classify(&set).unwrap().verdict != Verdict::ApxComplete {
            continue;
        }
        apx += 1;
        if let Some(cert) = hardness_certificate(&set, &bounds).unwrap() {
            assert!(cert.check().unwrap(), "certificate for {bits:b} does not check");
            certified += 1;
        }
    }
    (apx, certified)
}

#[test]
fn every_hard_binary_singleton_is_certified() {
    let (apx, certified) = coverage(3, false);
    assert_eq!((apx, certified), (63, 63));
    let (apx, certified) = coverage(2, false);
    assert_eq!((apx, certified), (3, 3));
}

#[test]
fn every_hard_binary_with_unaries_is_certified() {
    let (apx, certified) = coverage(3, true);
    assert_eq!((apx, certified), (375, 375));
    // over {0,1} the unaries make OR and NAND cores as well
    let (apx, certified) = coverage(2, true);
    assert_eq!((apx, certified), (5, 5));
}

#[test]
fn tampered_certificates_fail() {
    let set = PredicateSet::new(3, vec![Predicate::parse("001/100/000", 3).unwrap()]).unwrap();
    let cert = hardness_certificate(&set, &SearchBounds::new(1, 3)).unwrap().unwrap();
    assert!(cert.check().unwrap());

    let mut bad = cert.clone();
    let last = bad.chain.links.last_mut().unwrap();
    last.implementation.alpha += 1;
    assert!(!bad.check().unwrap());

    let mut bad = cert.clone();
    bad.base.clear();
    assert!(!bad.check().unwrap());

    let mut bad = cert;
    bad.terminal = TerminalKind::Neq2;
    assert!(!bad.check().unwrap());
}

/// Flipping a bit of a term predicate (at every occurrence) is caught unless
/// the flipped gadget is itself a valid implementation.
#[test]
fn term_table_mutations() {
    let (mut total, mut survived) = (0, 0);
    for entry in entries() {
        let mut names: Vec<&str> = entry.implementation.terms.iter().map(|t| t.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        for name in names {
            let p = entry.implementation.terms.iter().find(|t| t.name == name).unwrap().predicate.clone();
            for i in 0..p.len() {
                let mut table = p.table().to_vec();
                table[i] = !table[i];
                let flipped = Predicate::new(p.domain(), p.arity(), table).unwrap();
                let mut m = entry.clone();
                for t in m.implementation.terms.iter_mut().filter(|t| t.name == name) {
                    t.predicate = flipped.clone();
                }
                total += 1;
                let report = verify_entry(&m);
                if report.valid {
                    survived += 1;
                } else {
                    assert!(report.counterexample.is_some() || flipped.is_trivial());
                }
            }
        }
    }
    assert_eq!((total, survived), (862, 56));
}
