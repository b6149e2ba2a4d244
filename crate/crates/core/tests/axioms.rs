use minsup::axioms::{
    canonical_witness, check_fms, check_mstest, check_null_db, check_wsym, completing_sets, generate_mstest,
    generate_sash, random_mstest, search_domination_witness, swap_equivalent, symmetric_closure,
    verify_domination_witness, DominationWitness, Flavor, Verdict, WitnessCheck,
};
use minsup::measure::Measure;
use minsup::query::ExplicitMonotoneQuery;
use minsup::testgen;
use minsup::{Fact, PartitionedDatabase, Query};
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet};

fn e(name: &str) -> Fact {
    Fact::new("E", &[name]).unwrap()
}

fn set(names: &[&str]) -> BTreeSet<Fact> {
    names.iter().map(|n| e(n)).collect()
}

fn measure(name: &str) -> Measure {
    Measure::from_name(name, None).unwrap()
}

/// Two supports through e0 sharing e1, two disjoint ones through e5.
fn sharing() -> (Query, PartitionedDatabase) {
    let q = ExplicitMonotoneQuery::new([
        set(&["e0", "e1", "e2"]),
        set(&["e0", "e1", "e3"]),
        set(&["e5", "e6", "e7"]),
        set(&["e5", "e8", "e9", "ex"]),
    ]);
    let names = ["e0", "e1", "e2", "e3", "e4", "e5", "e6", "e7", "e8", "e9", "ex"];
    let db = PartitionedDatabase::endogenous_only(names.iter().map(|n| e(n))).unwrap();
    (Query::Explicit(q), db)
}

#[test]
fn canonical_witness_on_random_mstest() {
    let mut rng = testgen::rng(31);
    for _ in 0..40 {
        let inst = random_mstest(&mut rng, 10);
        let w = canonical_witness(&inst);
        let check = verify_domination_witness(&w, &inst.query, &inst.db, &inst.alpha, &inst.beta).unwrap();
        assert_eq!(check, WitnessCheck::Valid, "{}", inst.id());
        let found = search_domination_witness(&inst.query, &inst.db, &inst.alpha, &inst.beta, Flavor::Full).unwrap();
        let found = found.expect("a witness exists");
        assert_eq!(
            verify_domination_witness(&found, &inst.query, &inst.db, &inst.alpha, &inst.beta),
            Ok(WitnessCheck::Valid)
        );
        if inst.k > inst.l {
            let back = search_domination_witness(&inst.query, &inst.db, &inst.beta, &inst.alpha, Flavor::A).unwrap();
            assert!(back.is_none(), "{}", inst.id());
        }
        for name in ["ms", "s", "sharp"] {
            let v = check_fms(&measure(name), &inst.query, &inst.db, &inst.alpha, &inst.beta, &w).unwrap();
            assert_eq!(v.verdict, Verdict::Pass, "{name} on {}", inst.id());
            assert_eq!(check_mstest(&measure(name), &inst).unwrap().verdict, Verdict::Pass);
        }
    }
}

#[test]
fn mstest_rejects_bad_shapes() {
    assert!(generate_mstest(0, 1, &[], &[2]).is_err());
    assert!(generate_mstest(1, 1, &[2, 2], &[2]).is_err());
    let tie = generate_mstest(1, 1, &[2], &[2]).unwrap();
    assert!(!tie.is_strict());
    assert_eq!(check_mstest(&measure("ms"), &tie).unwrap().verdict, Verdict::NotApplicable);
}

#[test]
fn sharing_witness_flavors() {
    let (q, db) = sharing();
    let (e0, e5) = (e("e0"), e("e5"));
    assert_eq!(completing_sets(&q, &db, &e0).unwrap().len(), 2);
    assert!(search_domination_witness(&q, &db, &e0, &e5, Flavor::A).unwrap().is_some());
    // e1 sits in both completing sets of e0, so one η cannot send it to e6 and e8
    assert!(search_domination_witness(&q, &db, &e0, &e5, Flavor::B).unwrap().is_none());
    let em = |pairs: &[(&str, &str)]| pairs.iter().map(|(a, b)| (e(a), e(b))).collect::<BTreeMap<_, _>>();
    let mut eta = em(&[("e1", "e6"), ("e2", "e7"), ("e3", "e9"), ("e4", "e4"), ("e6", "e1"), ("e7", "e2")]);
    eta.extend(em(&[("e8", "e3"), ("e9", "e8"), ("ex", "ex"), ("e5", "e0")]));
    let w = DominationWitness {
        flavor: Flavor::B,
        f: vec![(set(&["e6", "e7"]), set(&["e1", "e2"])), (set(&["e8", "e9", "ex"]), set(&["e1", "e3"]))],
        eta_s: vec![em(&[("e1", "e6"), ("e2", "e7")]), em(&[("e1", "e8"), ("e3", "e9")])],
        eta: Some(eta),
    };
    assert!(matches!(verify_domination_witness(&w, &q, &db, &e0, &e5), Ok(WitnessCheck::Invalid(_))));
    let mut a = w.clone();
    a.flavor = Flavor::A;
    a.eta = None;
    assert_eq!(verify_domination_witness(&a, &q, &db, &e0, &e5), Ok(WitnessCheck::Valid));
    let mut broken = a.clone();
    broken.f.pop();
    assert!(matches!(verify_domination_witness(&broken, &q, &db, &e0, &e5), Ok(WitnessCheck::Invalid(_))));
}

#[test]
fn sharing_scores_frozen() {
    let (q, db) = sharing();
    let ms = measure("ms").score_all(&q, &db).unwrap();
    assert_eq!(ms[&e("e0")], "2/3".parse().unwrap());
    assert_eq!(ms[&e("e5")], "7/12".parse().unwrap());
    let shapley = measure("drastic-shapley").score_all(&q, &db).unwrap();
    assert_eq!(shapley[&e("e0")], "473/2520".parse().unwrap());
    assert_eq!(shapley[&e("e0")], shapley[&e("e5")]);
    assert_eq!(shapley[&e("e4")], minsup::rational::int(0));
}

#[test]
fn null_db_on_sash() {
    for k in 1..=3 {
        let s = generate_sash(k).unwrap();
        let sa = check_null_db(&measure("sa-shapley"), &s.query, &s.db).unwrap();
        assert_eq!(sa.verdict, Verdict::Fail, "k={k}");
        assert!(sa.offenders.iter().any(|(f, _, relevant)| f == &s.gamma && !relevant));
        for name in ["ms", "s", "drastic-shapley", "drastic-banzhaf", "r-shapley"] {
            assert_eq!(check_null_db(&measure(name), &s.query, &s.db).unwrap().verdict, Verdict::Pass, "{name} k={k}");
        }
    }
}

#[test]
fn closure_makes_twins() {
    let mut rng = testgen::rng(41);
    let facts: Vec<Fact> = (0..6).map(|i| e(&format!("t{i}"))).collect();
    let db = PartitionedDatabase::endogenous_only(facts.clone()).unwrap();
    for _ in 0..40 {
        let gens = rng.gen_range(1..=4);
        let base = testgen::random_explicit(&mut rng, &facts, gens, 3);
        let q = Query::Explicit(symmetric_closure(&base, &facts[0], &facts[1]));
        assert!(swap_equivalent(&q, &db, &facts[0], &facts[1]).unwrap());
        for name in ["ms", "s", "sharp", "drastic-shapley", "drastic-banzhaf", "p-shapley", "mc-shapley"] {
            let v = check_wsym(&measure(name), &q, &db, &facts[0], &facts[1]).unwrap();
            assert_eq!(v.verdict, Verdict::Pass, "{name}");
        }
    }
}
