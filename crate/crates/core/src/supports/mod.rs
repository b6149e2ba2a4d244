//! Minimal supports: enumeration, per-size counts and relevance.

mod generators;

pub use generators::{generate_matching_instance, generate_vertex_cover_instance, BipartiteGraph, Graph};

use crate::error::{Error, Result};
use crate::guard;
use crate::model::{Fact, PartitionedDatabase};
use crate::query::{evaluate, has_homomorphism, FactIndex, Query};
use crate::rpq::CompiledRpq;
use std::collections::{BTreeSet, HashMap};

/// countFMS(k, D) for k = 0..=|D|.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FmsVector {
    pub counts: Vec<u64>,
}

impl FmsVector {
    pub fn zeros(db_size: usize) -> Self {
        FmsVector {
            counts: vec![0; db_size + 1],
        }
    }

    pub fn from_supports(db_size: usize, supports: &[Vec<usize>]) -> Self {
        let mut v = Self::zeros(db_size);
        for s in supports {
            v.counts[s.len()] += 1;
        }
        v
    }

    pub fn get(&self, k: usize) -> u64 {
        self.counts.get(k).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Anything that can produce the per-size minimal-support counts.
pub trait FmsCounter: Sync {
    fn fms(&self, q: &Query, facts: &[Fact]) -> Result<FmsVector>;
}

/// Counts by enumerating the minimal supports.
pub struct EnumerationCounter;

impl FmsCounter for EnumerationCounter {
    fn fms(&self, q: &Query, facts: &[Fact]) -> Result<FmsVector> {
        fms_vector(q, facts)
    }
}

fn sorted_universe(facts: &[Fact]) -> Vec<Fact> {
    let mut v = facts.to_vec();
    v.sort();
    v.dedup();
    v
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    let mut it = big.iter();
    small.iter().all(|x| it.any(|y| y == x))
}

/// Keeps the inclusion-minimal sets, in (size, lexicographic) order.
fn minimal_family(mut sets: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for s in &mut sets {
        s.sort_unstable();
        s.dedup();
    }
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    sets.dedup();
    let mut kept: Vec<Vec<usize>> = Vec::new();
    for s in sets {
        if !kept.iter().any(|k| is_subset(k, &s)) {
            kept.push(s);
        }
    }
    kept
}

/// Minimal supports as position lists into `universe` (assumed duplicate-free).
/// CQs and UCQs use homomorphism images; explicit queries filter their
/// generators; path queries go through the subset lattice.
pub fn minimal_support_ids(q: &Query, universe: &[Fact]) -> Result<Vec<Vec<usize>>> {
    match q {
        Query::Cq(_) | Query::Ucq(_) => {
            let index = FactIndex::new(universe);
            let mut images = Vec::new();
            for d in q.disjuncts().unwrap() {
                images.extend(crate::query::images_in_index(d, &index));
            }
            Ok(minimal_family(images))
        }
        Query::Explicit(e) => {
            let pos: HashMap<&Fact, usize> = universe.iter().enumerate().map(|(i, f)| (f, i)).collect();
            let gens = e
                .generators()
                .iter()
                .filter_map(|g| g.iter().map(|f| pos.get(f).copied()).collect::<Option<Vec<usize>>>())
                .collect();
            Ok(minimal_family(gens))
        }
        Query::Rpq(_) => minimal_supports_lattice(q, universe),
    }
}

/// Subset-lattice strategy with a deletion-based minimality check; works for
/// every query class.
pub fn minimal_supports_lattice(q: &Query, universe: &[Fact]) -> Result<Vec<Vec<usize>>> {
    let n = universe.len();
    guard::check("database size for the subset lattice", n, guard::BRUTE_FACTS)?;
    guard::check_mask("database size for the subset lattice", n.max(1) + 1)?;
    let compiled = match q {
        Query::Rpq(r) => Some(CompiledRpq::new(r)),
        _ => None,
    };
    let eval = |mask: u64| {
        let subset: Vec<Fact> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| universe[i].clone()).collect();
        match &compiled {
            Some(c) => c.evaluate(&subset),
            None => evaluate(q, &subset),
        }
    };
    let total = 1u64 << n;
    let mut sat = vec![false; total as usize];
    for mask in 0..total {
        // monotone: a satisfying subset propagates upwards
        let inherited = (0..n).any(|i| mask >> i & 1 == 1 && sat[(mask ^ (1 << i)) as usize]);
        sat[mask as usize] = inherited || eval(mask);
    }
    let mut out = Vec::new();
    for mask in 0..total {
        if sat[mask as usize] && (0..n).all(|i| mask >> i & 1 == 0 || !sat[(mask ^ (1 << i)) as usize]) {
            out.push((0..n).filter(|i| mask >> i & 1 == 1).collect());
        }
    }
    Ok(minimal_family(out))
}

pub fn enumerate_minimal_supports(q: &Query, facts: &[Fact]) -> Result<Vec<BTreeSet<Fact>>> {
    let universe = sorted_universe(facts);
    let ids = minimal_support_ids(q, &universe)?;
    Ok(ids
        .into_iter()
        .map(|s| s.into_iter().map(|i| universe[i].clone()).collect())
        .collect())
}

pub fn fms_vector(q: &Query, facts: &[Fact]) -> Result<FmsVector> {
    let universe = sorted_universe(facts);
    let ids = minimal_support_ids(q, &universe)?;
    Ok(FmsVector::from_supports(universe.len(), &ids))
}

pub fn count_fms(q: &Query, facts: &[Fact], k: usize) -> Result<u64> {
    Ok(fms_vector(q, facts)?.get(k))
}

pub fn count_ms(q: &Query, facts: &[Fact]) -> Result<u64> {
    Ok(fms_vector(q, facts)?.total())
}

pub fn is_relevant(q: &Query, db: &PartitionedDatabase, alpha: &Fact) -> Result<bool> {
    if !db.contains(alpha) {
        return Err(Error::Invalid(format!("fact {alpha} is not in the database")));
    }
    let universe = db.all_facts();
    let i = universe.binary_search(alpha).expect("present");
    Ok(minimal_support_ids(q, &universe)?.iter().any(|s| s.contains(&i)))
}

/// Whether the exogenous part alone satisfies the query.
pub fn exogenous_satisfies(q: &Query, db: &PartitionedDatabase) -> bool {
    let dx: Vec<Fact> = db.exogenous().iter().cloned().collect();
    match q {
        Query::Cq(c) => has_homomorphism(c, &dx),
        _ => evaluate(q, &dx),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::{parse_query, ExplicitMonotoneQuery};

    fn facts(spec: &[&str]) -> Vec<Fact> {
        spec.iter().map(|s| Fact::parse(s).unwrap()).collect()
    }

    #[test]
    fn triangle_path() {
        let q = parse_query("q :- R(x,y), R(y,z), R(z,w).").unwrap();
        let d = facts(&["R(a,b)", "R(b,c)", "R(c,a)"]);
        let ms = enumerate_minimal_supports(&q, &d).unwrap();
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].len(), 3);
        assert_eq!(count_fms(&q, &d, 3).unwrap(), 1);
        assert_eq!(count_fms(&q, &d, 7).unwrap(), 0);
    }

    #[test]
    fn explicit_non_minimal_generator_dropped() {
        let f = facts(&["F(f1)", "F(f2)"]);
        let q = Query::Explicit(ExplicitMonotoneQuery::new([
            [f[0].clone()].into_iter().collect(),
            f.iter().cloned().collect(),
        ]));
        let ms = enumerate_minimal_supports(&q, &f).unwrap();
        assert_eq!(ms, vec![[f[0].clone()].into_iter().collect::<BTreeSet<_>>()]);
        assert_eq!(minimal_supports_lattice(&q, &f).unwrap(), vec![vec![0]]);
    }

    #[test]
    fn lattice_agrees_on_a_ucq() {
        let q = parse_query("q :- R(x,y), R(y,x).\nq :- S(x), R(x,x).").unwrap();
        let d = facts(&["R(a,b)", "R(b,a)", "R(a,a)", "S(a)", "S(b)"]);
        let u = sorted_universe(&d);
        assert_eq!(minimal_support_ids(&q, &u).unwrap(), minimal_supports_lattice(&q, &u).unwrap());
    }

    #[test]
    fn relevance() {
        let q = parse_query("q :- R(x,y), R(y,z), R(z,w).").unwrap();
        let db = PartitionedDatabase::endogenous_only(facts(&["R(a,a)", "R(a,b)", "R(b,c)"])).unwrap();
        assert!(!is_relevant(&q, &db, &Fact::parse("R(b,c)").unwrap()).unwrap());
        assert!(is_relevant(&q, &db, &Fact::parse("R(a,a)").unwrap()).unwrap());
        let other = PartitionedDatabase::endogenous_only(facts(&["R(a,a)", "T(a)"])).unwrap();
        assert!(!is_relevant(&q, &other, &Fact::parse("T(a)").unwrap()).unwrap());
    }

    #[test]
    fn lattice_guard() {
        let many: Vec<Fact> = (0..23).map(|i| Fact::new("F", &[&format!("c{i}")]).unwrap()).collect();
        let q = parse_query("rpq a b : R").unwrap();
        assert!(minimal_supports_lattice(&q, &many).unwrap_err().is_guard());
    }
}
