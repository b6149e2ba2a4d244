//! Seeded random instances for cross-checks.

use crate::model::{Fact, PartitionedDatabase, RelationName};
use crate::query::{Atom, ConjunctiveQuery, ExplicitMonotoneQuery, Term, UnionQuery};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug)]
pub struct Shape {
    pub relations: Vec<(String, usize)>,
    pub max_atoms: usize,
    pub variables: usize,
    pub constants: Vec<String>,
    /// probability that a query position holds a constant
    pub constant_rate: f64,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            relations: vec![("R".into(), 2), ("S".into(), 1)],
            max_atoms: 3,
            variables: 3,
            constants: vec!["a".into(), "b".into(), "c".into()],
            constant_rate: 0.1,
        }
    }
}

fn relation(name: &str, arity: usize) -> RelationName {
    RelationName::new(name, arity).expect("generated names are identifiers")
}

pub fn random_cq(rng: &mut impl Rng, shape: &Shape) -> ConjunctiveQuery {
    let n = rng.gen_range(1..=shape.max_atoms);
    let atoms = (0..n)
        .map(|_| {
            let (name, arity) = shape.relations.choose(rng).unwrap();
            let args = (0..*arity)
                .map(|_| {
                    if !shape.constants.is_empty() && rng.gen_bool(shape.constant_rate) {
                        Term::constant(shape.constants.choose(rng).unwrap()).unwrap()
                    } else {
                        Term::var(&format!("x{}", rng.gen_range(0..shape.variables)))
                    }
                })
                .collect();
            Atom {
                relation: relation(name, *arity),
                args,
            }
        })
        .collect();
    ConjunctiveQuery::from_atoms(atoms).expect("consistent arities")
}

pub fn random_ucq(rng: &mut impl Rng, shape: &Shape, max_disjuncts: usize) -> UnionQuery {
    let n = rng.gen_range(1..=max_disjuncts);
    UnionQuery::new((0..n).map(|_| random_cq(rng, shape)).collect()).expect("nonempty")
}

/// Up to `max_facts` distinct facts over the shape's relations and the given domain.
pub fn random_facts(rng: &mut impl Rng, shape: &Shape, domain: &[String], max_facts: usize) -> Vec<Fact> {
    let mut set = BTreeSet::new();
    let target = rng.gen_range(0..=max_facts);
    for _ in 0..target * 3 {
        if set.len() == target {
            break;
        }
        let (name, arity) = shape.relations.choose(rng).unwrap();
        let args: Vec<&str> = (0..*arity).map(|_| domain.choose(rng).unwrap().as_str()).collect();
        set.insert(Fact::new(name, &args).unwrap());
    }
    set.into_iter().collect()
}

/// Splits facts into endogenous and exogenous at the given rate.
pub fn random_database(
    rng: &mut impl Rng,
    shape: &Shape,
    domain: &[String],
    max_facts: usize,
    exogenous_rate: f64,
) -> PartitionedDatabase {
    let facts = random_facts(rng, shape, domain, max_facts);
    let (mut endo, mut exo) = (Vec::new(), Vec::new());
    for f in facts {
        if rng.gen_bool(exogenous_rate) {
            exo.push(f);
        } else {
            endo.push(f);
        }
    }
    PartitionedDatabase::new(endo, exo).expect("disjoint parts")
}

/// Edges `R(u,v)` with u < v over nodes n0..n{k-1}, labels drawn from `labels`.
pub fn random_dag(rng: &mut impl Rng, nodes: usize, max_edges: usize, labels: &[&str]) -> Vec<Fact> {
    let mut set = BTreeSet::new();
    if nodes < 2 {
        return vec![];
    }
    for _ in 0..rng.gen_range(0..=max_edges) {
        let u = rng.gen_range(0..nodes - 1);
        let v = rng.gen_range(u + 1..nodes);
        let l = labels.choose(rng).unwrap();
        set.insert(Fact::new(l, &[&format!("n{u}"), &format!("n{v}")]).unwrap());
    }
    set.into_iter().collect()
}

/// Random generators drawn from `facts`.
pub fn random_explicit(rng: &mut impl Rng, facts: &[Fact], generators: usize, max_size: usize) -> ExplicitMonotoneQuery {
    let gens = (0..generators).map(|_| {
        let k = rng.gen_range(1..=max_size.min(facts.len()).max(1));
        facts.choose_multiple(rng, k).cloned().collect::<BTreeSet<_>>()
    });
    ExplicitMonotoneQuery::new(gens.filter(|g| !g.is_empty()).collect::<Vec<_>>())
}

pub fn domain(n: usize) -> Vec<String> {
    (0..n).map(|i| ["a", "b", "c", "d", "e", "f", "g", "h"].get(i).map_or(format!("d{i}"), |s| s.to_string())).collect()
}
