use minsup::model::Schema;
use minsup::query::{Query, UnionQuery};
use minsup::sql::{build_rewriting, evaluate_rewriting_sql};
use minsup::supports::fms_vector;
use minsup::testgen::{domain, random_facts, random_ucq, rng, Shape};

#[test]
fn rewriting_matches_enumeration() {
    let mut r = rng(3);
    let shape = Shape {
        max_atoms: 3,
        variables: 3,
        ..Shape::default()
    };
    let schema = Schema::parse("R/2\nS/1").unwrap();
    let dom = domain(3);
    for _ in 0..150 {
        let u: UnionQuery = random_ucq(&mut r, &shape, 2);
        let d = random_facts(&mut r, &shape, &dom, 10);
        let want = fms_vector(&Query::Ucq(u.clone()), &d).unwrap();
        for k in 1..=4 {
            let rw = build_rewriting(&u, k).unwrap();
            assert_eq!(rw.evaluate(&d).unwrap(), want.get(k), "k={k} query {u} on {d:?}");
            assert_eq!(evaluate_rewriting_sql(&rw, &schema, &d).unwrap(), want.get(k));
        }
    }
}

#[test]
fn rewriting_with_input_inequalities() {
    use minsup::query::Term;
    use rand::Rng;
    let mut r = rng(5);
    let shape = Shape::default();
    let dom = domain(3);
    let mut checked = 0;
    while checked < 100 {
        let u = random_ucq(&mut r, &shape, 2);
        let ds: Option<Vec<_>> = u
            .disjuncts()
            .iter()
            .map(|d| {
                let mut terms: Vec<Term> = d.variables().into_iter().map(Term::Var).collect();
                terms.push(Term::constant("a").unwrap());
                let i = r.gen_range(0..terms.len());
                let j = r.gen_range(0..terms.len());
                if i == j || (!terms[i].is_var() && !terms[j].is_var()) {
                    return Some(d.clone());
                }
                d.with_inequalities([(terms[i].clone(), terms[j].clone())])
            })
            .collect();
        let Some(ds) = ds else { continue };
        let u = UnionQuery::new(ds).unwrap();
        let d = random_facts(&mut r, &shape, &dom, 9);
        let want = fms_vector(&Query::Ucq(u.clone()), &d).unwrap();
        for k in 1..=3 {
            assert_eq!(build_rewriting(&u, k).unwrap().evaluate(&d).unwrap(), want.get(k), "k={k} query {u} on {d:?}");
        }
        checked += 1;
    }
}
