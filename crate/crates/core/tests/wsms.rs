use minsup::rational::{int, pow2_neg};
use minsup::shapley::{shapley_all, CoefficientSpec};
use minsup::supports::{enumerate_minimal_supports, fms_vector};
use minsup::testgen::{self, Shape};
use minsup::wsms::{
    decode_size_counts, score_all, wsms_direct, zeta_wealth, WeightFunction, WeightKind,
};
use minsup::{Fact, PartitionedDatabase, Query, Rational};
use num_traits::Zero;
use proptest::prelude::*;
use std::collections::BTreeMap;

fn random_instance(seed: u64, exo: f64) -> (Query, PartitionedDatabase) {
    let mut rng = testgen::rng(seed);
    let shape = Shape::default();
    let dom = testgen::domain(3);
    let q = if seed.is_multiple_of(3) {
        Query::Ucq(testgen::random_ucq(&mut rng, &shape, 2))
    } else {
        Query::Cq(testgen::random_cq(&mut rng, &shape))
    };
    (q, testgen::random_database(&mut rng, &shape, &dom, 8, exo))
}

/// Σ_{M ∋ α} w(|M|, |D|) from the support sets, 0 when Dx alone satisfies q.
fn oracle(q: &Query, db: &PartitionedDatabase, w: &WeightFunction) -> BTreeMap<Fact, Rational> {
    let supports = enumerate_minimal_supports(q, &db.all_facts()).unwrap();
    let n = db.size().2;
    let dx = supports.iter().any(|m| m.iter().all(|f| !db.is_endogenous(f)));
    db.endogenous()
        .iter()
        .map(|f| {
            let s = if dx {
                Rational::zero()
            } else {
                supports.iter().filter(|m| m.contains(f)).map(|m| w.weight(m.len(), n).unwrap()).sum()
            };
            (f.clone(), s)
        })
        .collect()
}

fn decreasing_table(n: usize) -> WeightFunction {
    let mut t = BTreeMap::new();
    for m in 1..=n {
        for k in 1..=m {
            t.insert((k, m), Rational::new(((m + 1 - k) * 3).into(), (m * 7).into()));
        }
    }
    WeightFunction::Custom(t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(80))]

    #[test]
    fn score_all_matches_per_fact(seed in 0u64..10_000) {
        let (q, db) = random_instance(seed, 0.2);
        let n = db.size().2;
        for w in [WeightFunction::InvW, WeightFunction::S, WeightFunction::Sharp, decreasing_table(n)] {
            let all = score_all(&q, &db, &w).unwrap();
            prop_assert_eq!(&all, &oracle(&q, &db, &w));
            for (f, s) in &all {
                prop_assert_eq!(s, &wsms_direct(&q, &db, f, &w).unwrap());
            }
        }
    }

    #[test]
    fn zeta_wealth_reproduces_wsms(seed in 0u64..10_000) {
        let (q, db) = random_instance(seed, 0.2);
        if db.endogenous().is_empty() {
            return Ok(());
        }
        for w in [WeightFunction::InvW, WeightFunction::S] {
            let want = score_all(&q, &db, &w).unwrap();
            for c in [CoefficientSpec::Shapley, CoefficientSpec::Banzhaf] {
                let spec = zeta_wealth(&q, &db, &w, &c).unwrap();
                prop_assert_eq!(&shapley_all(&spec, &c).unwrap(), &want);
            }
        }
    }

    #[test]
    fn size_counts_decode(seed in 0u64..10_000) {
        let (q, db) = random_instance(seed, 0.0);
        let n = db.size().2;
        if n == 0 {
            return Ok(());
        }
        let truth = fms_vector(&q, &db.all_facts()).unwrap();
        for (w, kind) in [(WeightFunction::S, WeightKind::S), (WeightFunction::Sharp, WeightKind::Sharp)] {
            let scores = score_all(&q, &db, &w).unwrap();
            prop_assert_eq!(&decode_size_counts(&scores, kind, n).unwrap(), &truth);
        }
    }
}

#[test]
fn s_weights_dominate_larger_supports() {
    // one support of size k outweighs every support of size k+1 together
    for n in 1..8 {
        for k in 1..n {
            let many = Rational::from_integer(minsup::rational::binomial(n, k + 1)) * pow2_neg((k + 1) * n);
            assert!(pow2_neg(k * n) > many, "n={n} k={k}");
        }
    }
}

#[test]
fn weight_table_from_json() {
    let w = WeightFunction::from_json(r#"{"1,1": "1", "1,2": 2, "2,2": "1/3"}"#).unwrap();
    assert_eq!(w.weight(2, 2).unwrap(), Rational::new(1.into(), 3.into()));
    assert_eq!(w.weight(1, 2).unwrap(), int(2));
    assert!(w.validate(2).is_ok());
    assert!(w.validate(3).is_err());
    assert!(WeightFunction::from_json("[1]").is_err());
    assert!(WeightFunction::from_json(r#"{"1;1": "1"}"#).is_err());
}

#[test]
fn exogenous_satisfaction_zeroes_scores() {
    let db = PartitionedDatabase::new(
        vec![Fact::parse("S(a)").unwrap(), Fact::parse("S(b)").unwrap()],
        vec![Fact::parse("S(c)").unwrap()],
    )
    .unwrap();
    let q = minsup::parse_query("q :- S(x).").unwrap();
    for w in [WeightFunction::InvW, WeightFunction::S, WeightFunction::Sharp] {
        assert!(score_all(&q, &db, &w).unwrap().values().all(|s| s.is_zero()));
    }
}
