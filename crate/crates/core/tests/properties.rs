use proptest::prelude::*;

use maxcsp3::chain::{
    enumerate_chains, find_supermodular_chain, is_supermodular_on_chain, is_supermodular_via_binary_projections,
};
use maxcsp3::classify::{classify, classify_boolean};
use maxcsp3::gadget::corpus::find;
use maxcsp3::gadget::{compose, derive_strip_all_one, search, verify, verify_exhaustive, Side};
use maxcsp3::library::neq;
use maxcsp3::morphism::{compute_core, enumerate_endomorphisms, is_endomorphism};
use maxcsp3::solver::{evaluate_assignment, expected_random_value, solve_exact};
use maxcsp3::{Assignment, Chain, ImplementationChain, Instance, Predicate, PredicateSet, SearchBounds, Verdict};

fn predicate(d: usize, arity: usize) -> impl Strategy<Value = Predicate> {
    prop::collection::vec(any::<bool>(), d.pow(arity as u32))
        .prop_filter("non-trivial", |t| t.iter().any(|&b| b))
        .prop_map(move |t| Predicate::new(d, arity, t).unwrap())
}

fn chain(d: usize) -> impl Strategy<Value = Chain> {
    Just((0..d).collect::<Vec<_>>()).prop_shuffle().prop_map(|o| Chain::new(o).unwrap())
}

fn instance() -> impl Strategy<Value = Instance> {
    (2usize..=3, 1usize..=6).prop_flat_map(|(d, n)| {
        let constraint = (1usize..=3)
            .prop_flat_map(move |arity| (predicate(d, arity), prop::collection::vec(0..n, arity), 1u64..=4));
        prop::collection::vec(constraint, 1..=8).prop_map(move |cs| {
            let mut inst = Instance::new(d, n).unwrap();
            for (p, scope, w) in cs {
                inst.add(p, scope, w).unwrap();
            }
            inst
        })
    })
}

fn all_assignments(d: usize, n: usize) -> Vec<Assignment> {
    (0..d.pow(n as u32))
        .map(|mut i| {
            let mut v = vec![0; n];
            for slot in v.iter_mut().rev() {
                *slot = i % d;
                i /= d;
            }
            Assignment::new(v)
        })
        .collect()
}

fn argmax_set(inst: &Instance) -> Vec<Assignment> {
    let all = all_assignments(inst.domain, inst.variables);
    let values: Vec<u64> = all.iter().map(|a| evaluate_assignment(inst, a).unwrap()).collect();
    let best = *values.iter().max().unwrap();
    all.into_iter().zip(values).filter(|(_, v)| *v == best).map(|(a, _)| a).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solver_sandwich(inst in instance()) {
        let r = solve_exact(&inst).unwrap();
        let expected = expected_random_value(&inst).unwrap();
        prop_assert!(expected <= num_rational::Ratio::from_integer(r.optimum as u128));
        prop_assert!(r.optimum <= inst.total_weight());
        prop_assert_eq!(evaluate_assignment(&inst, &r.argmax).unwrap(), r.optimum);
    }

    #[test]
    fn solver_symmetry(inst in instance(), seed in any::<u64>()) {
        let n = inst.variables;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let mut shuffled = Instance::new(inst.domain, n).unwrap();
        for c in inst.constraints.iter().rev() {
            shuffled.add(c.predicate.clone(), c.scope.iter().map(|&v| perm[v]).collect(), c.weight).unwrap();
        }
        prop_assert_eq!(solve_exact(&inst).unwrap().optimum, solve_exact(&shuffled).unwrap().optimum);
    }

    #[test]
    fn solver_weight_linearity(inst in instance(), c in 1u64..=5) {
        let mut scaled = inst.clone();
        for con in &mut scaled.constraints {
            con.weight *= c;
        }
        prop_assert_eq!(solve_exact(&scaled).unwrap().optimum, c * solve_exact(&inst).unwrap().optimum);
        prop_assert_eq!(argmax_set(&scaled), argmax_set(&inst));
    }

    #[test]
    fn endomorphisms_never_lose_value(inst in instance(), pick in any::<prop::sample::Index>(), a in any::<prop::sample::Index>()) {
        let set = PredicateSet::new(inst.domain, inst.constraints.iter().map(|c| c.predicate.clone()).collect()).unwrap();
        let endos = enumerate_endomorphisms(&set).unwrap();
        prop_assert!(!endos.is_empty());
        let pi = &endos[pick.index(endos.len())];
        let all = all_assignments(inst.domain, inst.variables);
        let a = &all[a.index(all.len())];
        let moved = Assignment::new(a.values.iter().map(|&v| pi.apply(v)).collect());
        prop_assert!(evaluate_assignment(&inst, &moved).unwrap() >= evaluate_assignment(&inst, a).unwrap());
    }

    #[test]
    fn dual_chain_invariance(p in predicate(3, 3), c in chain(3)) {
        let a = is_supermodular_on_chain(&p, &c).unwrap().holds;
        prop_assert_eq!(a, is_supermodular_on_chain(&p, &c.dual()).unwrap().holds);
    }

    #[test]
    fn projection_checker_agrees(d in 2usize..=4, arity in 2usize..=3, seed in any::<u64>(), ci in any::<prop::sample::Index>()) {
        let len = d.pow(arity as u32);
        let mut s = seed;
        let table: Vec<bool> = (0..len)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (s >> 60) < 5
            })
            .collect();
        let p = Predicate::new(d, arity, table).unwrap();
        let chains = enumerate_chains(d, false).unwrap();
        let c = &chains[ci.index(chains.len())];
        prop_assert_eq!(
            is_supermodular_on_chain(&p, c).unwrap().holds,
            is_supermodular_via_binary_projections(&p, c).unwrap().holds
        );
    }

    #[test]
    fn witnesses_violate(p in predicate(3, 2), c in chain(3)) {
        let r = is_supermodular_on_chain(&p, &c).unwrap();
        if let Some((a, b)) = r.witness {
            let meet: Vec<usize> = a.iter().zip(&b).map(|(&x, &y)| c.meet(x, y)).collect();
            let join: Vec<usize> = a.iter().zip(&b).map(|(&x, &y)| c.join(x, y)).collect();
            prop_assert!(p.value(&a) + p.value(&b) > p.value(&meet) + p.value(&join));
        } else {
            prop_assert!(r.holds);
        }
    }

    #[test]
    fn all_one_row_keeps_supermodularity(p in predicate(3, 2), c in chain(3), row in 0usize..3) {
        // adding an all-one row never changes supermodularity
        let mut t = p.table().to_vec();
        for y in 0..3 {
            t[row * 3 + y] = true;
        }
        let q = Predicate::new(3, 2, t).unwrap();
        let mut base = p.table().to_vec();
        for y in 0..3 {
            base[row * 3 + y] = false;
        }
        if base.iter().any(|&b| b) {
            let r = Predicate::new(3, 2, base).unwrap();
            prop_assert_eq!(
                is_supermodular_on_chain(&q, &c).unwrap().holds,
                is_supermodular_on_chain(&r, &c).unwrap().holds
            );
        }
    }

    #[test]
    fn core_invariants(members in prop::collection::vec(predicate(3, 2), 1..=3)) {
        let set = PredicateSet::new(3, members).unwrap();
        let core = compute_core(&set).unwrap();
        prop_assert!(is_endomorphism(&set, &core.retraction).unwrap().holds);
        prop_assert!(core.retraction.is_idempotent());
        prop_assert_eq!(core.retraction.image_set(), core.sub_domain.clone());
        let inner = compute_core(&core.restricted).unwrap();
        prop_assert_eq!(inner.size(), core.size());
        for e in enumerate_endomorphisms(&core.restricted).unwrap() {
            prop_assert!(e.is_injective());
        }
    }

    #[test]
    fn classification_is_core_invariant(members in prop::collection::vec(predicate(3, 2), 1..=3)) {
        let set = PredicateSet::new(3, members).unwrap();
        let c = classify(&set).unwrap();
        let core = c.core.restricted.clone();
        if core.domain() >= 2 {
            let again = classify(&core).unwrap();
            prop_assert_eq!(again.verdict, c.verdict);
        } else {
            prop_assert_eq!(c.verdict, Verdict::Trivial);
        }
        // the decision agrees with a direct look at every chain
        if c.verdict != Verdict::Trivial {
            let direct = enumerate_chains(core.domain(), false)
                .unwrap()
                .iter()
                .any(|ch| core.iter().all(|p| is_supermodular_on_chain(p, ch).unwrap().holds));
            prop_assert_eq!(c.verdict == Verdict::Po, direct);
            prop_assert_eq!(find_supermodular_chain(&core).unwrap().is_some(), direct);
        }
    }

    #[test]
    fn search_results_verify(p in predicate(3, 2)) {
        let set = PredicateSet::new(3, vec![p]).unwrap();
        let bounds = SearchBounds::new(0, 2);
        let first = search(&set, &neq(3), &bounds).unwrap();
        if let Some(imp) = &first {
            prop_assert!(verify(imp).unwrap().valid);
            prop_assert!(verify_exhaustive(imp).unwrap().valid);
        }
        prop_assert_eq!(first, search(&set, &neq(3), &bounds).unwrap());
    }

    #[test]
    fn strip_results_verify(p in predicate(3, 2), a in 0usize..3, row in any::<bool>()) {
        let side = if row { Side::Row } else { Side::Column };
        if let Ok(imp) = derive_strip_all_one(&p, side, a) {
            let v = verify(&imp).unwrap();
            prop_assert!(v.valid);
            prop_assert_eq!(v.recovered_alpha(), Some(2));
        }
    }
}

/// All compositions of two corpus links where the second uses the first's
/// target as a term.
#[test]
fn two_link_compositions_verify() {
    let entries = maxcsp3::gadget::corpus::entries();
    let mut composed = 0;
    for first in entries {
        let name = "L1";
        for second in entries {
            if first.id == second.id || second.implementation.domain() != first.implementation.domain() {
                continue;
            }
            let target = &first.implementation.target;
            if !second.implementation.terms.iter().any(|t| &t.predicate == target) {
                continue;
            }
            let mut user = second.implementation.clone();
            for t in user.terms.iter_mut().filter(|t| &t.predicate == target) {
                t.name = name.into();
            }
            let mut chain = ImplementationChain::default();
            chain.push(name, first.implementation.clone());
            chain.push("L2", user.clone());
            let imp = compose(&chain).unwrap();
            let v = verify(&imp).unwrap();
            assert!(v.valid, "{} into {}", first.id, second.id);
            let uses = user.terms.iter().filter(|t| t.name == name).count() as u32;
            assert_eq!(imp.alpha, user.alpha + uses * (first.implementation.alpha - 1));
            composed += 1;
        }
    }
    assert!(composed >= 10, "only {composed} compositions");
}

#[test]
fn boolean_agreement_on_all_binary_predicates() {
    for bits in 1u32..16 {
        let table = (0..4).map(|i| bits >> (3 - i) & 1 == 1).collect();
        let p = Predicate::new(2, 2, table).unwrap();
        let set = PredicateSet::new(2, vec![p]).unwrap();
        assert_eq!(classify(&set).unwrap(), classify_boolean(&set).unwrap());
    }
    // the constant-false table is rejected by both
    let zero = PredicateSet::new(2, vec![Predicate::constant(2, 2, false).unwrap()]).unwrap();
    assert!(classify(&zero).is_err() && classify_boolean(&zero).is_err());
}

#[test]
fn boolean_verdicts_by_hand() {
    // over {0,1}: neq2 and the arc are hard; everything else is trivial or on a chain
    let hard: Vec<u32> = (1u32..16)
        .filter(|&bits| {
            let table = (0..4).map(|i| bits >> (3 - i) & 1 == 1).collect();
            let set = PredicateSet::new(2, vec![Predicate::new(2, 2, table).unwrap()]).unwrap();
            classify_boolean(&set).unwrap().verdict == Verdict::ApxComplete
        })
        .collect();
    // 0110 = neq2, 0100 = arc (0,1), 0010 = arc (1,0)
    assert_eq!(hard, [0b0010, 0b0100, 0b0110]);
    assert!(find("maxcut.dicut").is_some());
}
