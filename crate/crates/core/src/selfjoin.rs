//! countFMS for conjunctive queries of small self-join width.

use crate::error::{Error, Result};
use crate::guard;
use crate::model::Fact;
use crate::query::{
    apply_partition, core, count_automorphisms_materialized, count_homomorphisms, dedup_isomorphic,
    maps_to_materialized, unif_terms, ConjunctiveQuery, Query, Term,
};
use crate::supports::{FmsCounter, FmsVector};
use crate::util::for_each_partition;
use rayon::prelude::*;

/// An equivalence relation on the unifiable terms, with the derived queries.
#[derive(Clone, Debug)]
pub struct UnifPartition {
    pub classes: Vec<Vec<Term>>,
    /// core of q with the classes merged
    pub q_e: ConjunctiveQuery,
    /// `q_e` plus `s != t` between the surviving terms of distinct classes
    pub q_e_neq: ConjunctiveQuery,
    pub automorphisms: u64,
}

fn derive(q: &ConjunctiveQuery, unif: &[Term], rgs: &[usize]) -> Option<UnifPartition> {
    let k = rgs.iter().max().map_or(0, |m| m + 1);
    let mut classes: Vec<Vec<Term>> = vec![Vec::new(); k];
    for (t, &c) in unif.iter().zip(rgs) {
        classes[c].push(t.clone());
    }
    let merged = apply_partition(q, unif, rgs)?;
    let q_e = core(&merged);
    let present = q_e.terms();
    let reps: Vec<Term> = classes
        .iter()
        .map(|c| c.iter().find(|t| !t.is_var()).unwrap_or(&c[0]).clone())
        .filter(|r| present.contains(r))
        .collect();
    let mut ineqs = Vec::new();
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            ineqs.push((reps[i].clone(), reps[j].clone()));
        }
    }
    let q_e_neq = q_e.with_inequalities(ineqs)?;
    let automorphisms = count_automorphisms_materialized(&q_e_neq);
    Some(UnifPartition {
        classes,
        q_e,
        q_e_neq,
        automorphisms,
    })
}

/// The retained partitions, pairwise non-isomorphic.
pub fn build_punif(q: &ConjunctiveQuery) -> Result<Vec<UnifPartition>> {
    if !q.inequalities().is_empty() {
        return Err(Error::Unsupported("self-join counting takes queries without inequalities".into()));
    }
    let unif = unif_terms(q);
    guard::check("self-join width", unif.len(), guard::SELF_JOIN_WIDTH)?;
    let is_const: Vec<bool> = unif.iter().map(|t| !t.is_var()).collect();
    let mut all = Vec::new();
    let mut admit = |pos: usize, c: usize, rgs: &[usize]| {
        !is_const[pos] || !rgs.iter().enumerate().any(|(i, &k)| k == c && is_const[i])
    };
    for_each_partition(unif.len(), &mut admit, &mut |rgs| {
        if let Some(p) = derive(q, &unif, rgs) {
            all.push(p);
        }
    });
    let keep: Vec<bool> = all
        .par_iter()
        .map(|p| {
            all.iter().all(|o| !maps_to_materialized(&o.q_e_neq, &p.q_e_neq) || maps_to_materialized(&p.q_e_neq, &o.q_e_neq))
        })
        .collect();
    let kept: Vec<UnifPartition> = all.into_iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| p).collect();
    let reps = dedup_isomorphic(kept.iter().map(|p| p.q_e_neq.clone()).collect());
    let mut out = Vec::new();
    for r in reps {
        let p = kept.iter().find(|p| p.q_e_neq == r).expect("dedup keeps members");
        out.push(p.clone());
    }
    Ok(out)
}

fn fms_from_punif(punif: &[UnifPartition], facts: &[Fact]) -> Result<FmsVector> {
    let mut universe = facts.to_vec();
    universe.sort();
    universe.dedup();
    let mut v = FmsVector::zeros(universe.len());
    let counts: Vec<(usize, u64, u64)> = punif
        .par_iter()
        .filter(|p| p.q_e.len() <= universe.len())
        .map(|p| (p.q_e.len(), count_homomorphisms(&p.q_e_neq, &universe), p.automorphisms))
        .collect();
    for (k, ans, auto) in counts {
        if ans % auto != 0 {
            return Err(Error::Invalid(format!("{ans} answers do not split into orbits of size {auto}")));
        }
        v.counts[k] += ans / auto;
    }
    Ok(v)
}

pub fn fms_selfjoin(q: &ConjunctiveQuery, facts: &[Fact]) -> Result<FmsVector> {
    fms_from_punif(&build_punif(q)?, facts)
}

/// Σ over retained partitions with k atoms of countAns(q_E≠) / |Auto(q_E≠)|.
pub fn count_fms_selfjoin(q: &ConjunctiveQuery, facts: &[Fact], k: usize) -> Result<u64> {
    Ok(fms_selfjoin(q, facts)?.get(k))
}

/// countFMS through the partition construction; conjunctive queries only.
pub struct SelfJoinCounter;

impl FmsCounter for SelfJoinCounter {
    fn fms(&self, q: &Query, facts: &[Fact]) -> Result<FmsVector> {
        match q {
            Query::Cq(c) => fms_selfjoin(c, facts),
            _ => Err(Error::Unsupported("the self-join counter handles single conjunctive queries".into())),
        }
    }
}
