//! Structural analyses: unification, cores, automorphisms, quotients.

use super::hom::{canonical_database, count_homomorphisms, maps_to, Homomorphism};
use super::{Atom, ConjunctiveQuery, Term, Variable};
use crate::error::Result;
use crate::guard;
use crate::model::Fact;
use crate::util::{for_each_partition, next_permutation};
use std::collections::{BTreeMap, BTreeSet, HashMap};

pub fn is_self_join_free(q: &ConjunctiveQuery) -> bool {
    let mut seen = BTreeSet::new();
    q.atoms().iter().all(|a| seen.insert(&a.relation))
}

/// Most general unifier of two term lists; shared variables stay shared.
fn unify(a: &[Term], b: &[Term]) -> bool {
    let mut parent: HashMap<Term, Term> = HashMap::new();
    fn find(parent: &mut HashMap<Term, Term>, t: &Term) -> Term {
        let mut cur = t.clone();
        while let Some(p) = parent.get(&cur) {
            cur = p.clone();
        }
        cur
    }
    for (s, t) in a.iter().zip(b) {
        let (rs, rt) = (find(&mut parent, s), find(&mut parent, t));
        if rs == rt {
            continue;
        }
        match (&rs, &rt) {
            (Term::Const(_), Term::Const(_)) => return false,
            (Term::Const(_), _) => {
                parent.insert(rt, rs);
            }
            _ => {
                parent.insert(rs, rt);
            }
        }
    }
    true
}

/// Some substitution of variables by constants sends both atoms to the same fact.
pub fn unifiable(a: &Atom, b: &Atom) -> bool {
    a.relation == b.relation && unify(&a.args, &b.args)
}

/// Two independent homomorphisms can send the atoms to the same fact.
pub fn mergeable(a: &Atom, b: &Atom) -> bool {
    if a.relation != b.relation {
        return false;
    }
    let apart = b.map_terms(|t| match t {
        Term::Var(v) => Term::Var(Variable::new(&format!("{}'", v.name()))),
        c => c.clone(),
    });
    unify(&a.args, &apart.args)
}

/// Terms occurring in atoms that are mergeable with another atom, in
/// first-occurrence order.
pub fn unif_terms(q: &ConjunctiveQuery) -> Vec<Term> {
    let atoms = q.atoms();
    let mut marked = BTreeSet::new();
    for (i, a) in atoms.iter().enumerate() {
        if atoms.iter().enumerate().any(|(j, b)| i != j && mergeable(a, b)) {
            marked.extend(a.args.iter().cloned());
        }
    }
    q.terms().into_iter().filter(|t| marked.contains(t)).collect()
}

pub fn self_join_width(q: &ConjunctiveQuery) -> usize {
    unif_terms(q).len()
}

/// Greedy atom removal: drop an atom whenever q still maps into the rest.
pub fn core(q: &ConjunctiveQuery) -> ConjunctiveQuery {
    let mut cur = q.clone();
    'outer: loop {
        for i in 0..cur.len() {
            if cur.len() == 1 {
                break 'outer;
            }
            let cand = cur.remove_atom(i);
            let kept: BTreeSet<Variable> = cand.variables().into_iter().collect();
            let ineq_vars_kept = cand
                .inequalities()
                .iter()
                .flat_map(|(s, t)| [s, t])
                .filter_map(Term::as_var)
                .all(|v| kept.contains(v));
            if ineq_vars_kept && maps_to(&cur, &cand) {
                cur = cand;
                continue 'outer;
            }
        }
        break;
    }
    cur
}

pub fn is_core(q: &ConjunctiveQuery) -> bool {
    core(q).len() == q.len()
}

/// Homomorphisms from q to its own canonical database, inequalities read as
/// distinctness of the frozen terms.
pub fn count_automorphisms(q: &ConjunctiveQuery) -> u64 {
    count_homomorphisms(q, &canonical_database(q))
}

/// One query per equivalence relation on terms(q) that never merges two
/// distinct constants. Merges violating an inequality are skipped.
pub fn quotients(q: &ConjunctiveQuery) -> Result<Vec<ConjunctiveQuery>> {
    let terms = q.terms();
    guard::check("query terms for quotient enumeration", terms.len(), guard::QUOTIENT_TERMS)?;
    Ok(quotients_of_terms(q, &terms))
}

/// Quotients by equivalence relations on the given subset of terms.
pub(crate) fn quotients_of_terms(q: &ConjunctiveQuery, terms: &[Term]) -> Vec<ConjunctiveQuery> {
    let mut out = Vec::new();
    let is_const: Vec<bool> = terms.iter().map(|t| !t.is_var()).collect();
    let mut admit = |pos: usize, c: usize, rgs: &[usize]| {
        if !is_const[pos] {
            return true;
        }
        !rgs.iter().enumerate().any(|(i, &k)| k == c && is_const[i])
    };
    for_each_partition(terms.len(), &mut admit, &mut |rgs| {
        if let Some(qq) = apply_partition(q, terms, rgs) {
            out.push(qq);
        }
    });
    out
}

/// Substitutes each class by its constant, or by its first variable.
pub(crate) fn apply_partition(q: &ConjunctiveQuery, terms: &[Term], rgs: &[usize]) -> Option<ConjunctiveQuery> {
    let classes = rgs.iter().max().map_or(0, |m| m + 1);
    let mut rep: Vec<Option<Term>> = vec![None; classes];
    for (t, &c) in terms.iter().zip(rgs) {
        match (&rep[c], t) {
            (None, _) => rep[c] = Some(t.clone()),
            (Some(Term::Var(_)), Term::Const(_)) => rep[c] = Some(t.clone()),
            _ => {}
        }
    }
    let map: HashMap<&Term, &Term> = terms
        .iter()
        .zip(rgs)
        .map(|(t, &c)| (t, rep[c].as_ref().unwrap()))
        .collect();
    q.substitute(|t| map.get(t).map(|r| (*r).clone()).unwrap_or_else(|| t.clone()))
}

fn signature(q: &ConjunctiveQuery) -> (usize, usize, usize, Vec<(String, usize)>, Vec<usize>) {
    let mut rels: BTreeMap<String, usize> = BTreeMap::new();
    let mut degree: BTreeMap<&Variable, usize> = BTreeMap::new();
    for a in q.atoms() {
        *rels.entry(a.relation.name().to_string()).or_default() += 1;
        for v in a.variables() {
            *degree.entry(v).or_default() += 1;
        }
    }
    let mut deg: Vec<usize> = degree.into_values().collect();
    deg.sort();
    (q.len(), deg.len(), q.inequalities().len(), rels.into_iter().collect(), deg)
}

/// Bijective renaming of variables mapping atoms and inequalities onto each other.
pub fn is_isomorphic(a: &ConjunctiveQuery, b: &ConjunctiveQuery) -> bool {
    if signature(a) != signature(b) || a.constants() != b.constants() {
        return false;
    }
    let target_ineqs: BTreeSet<(Term, Term)> = b.inequalities().iter().cloned().collect();
    let mut fwd: HashMap<Variable, Variable> = HashMap::new();
    let mut rev: HashMap<Variable, Variable> = HashMap::new();
    iso_search(a, b, 0, &mut fwd, &mut rev, &target_ineqs)
}

fn iso_search(
    a: &ConjunctiveQuery,
    b: &ConjunctiveQuery,
    i: usize,
    fwd: &mut HashMap<Variable, Variable>,
    rev: &mut HashMap<Variable, Variable>,
    target_ineqs: &BTreeSet<(Term, Term)>,
) -> bool {
    if i == a.len() {
        let map = |t: &Term| match t {
            Term::Var(v) => Term::Var(fwd[v].clone()),
            c => c.clone(),
        };
        return a.inequalities().iter().all(|(s, t)| {
            let (s, t) = (map(s), map(t));
            let pair = if s <= t { (s, t) } else { (t, s) };
            target_ineqs.contains(&pair)
        });
    }
    let atom = &a.atoms()[i];
    for cand in b.atoms().iter().filter(|c| c.relation == atom.relation) {
        let mut added = Vec::new();
        let mut ok = true;
        for (s, t) in atom.args.iter().zip(&cand.args) {
            match (s, t) {
                (Term::Const(x), Term::Const(y)) if x == y => {}
                (Term::Var(x), Term::Var(y)) => match (fwd.get(x), rev.get(y)) {
                    (Some(fx), _) if fx != y => ok = false,
                    (_, Some(ry)) if ry != x => ok = false,
                    (Some(_), Some(_)) => {}
                    _ => {
                        fwd.insert(x.clone(), y.clone());
                        rev.insert(y.clone(), x.clone());
                        added.push((x.clone(), y.clone()));
                    }
                },
                _ => ok = false,
            }
            if !ok {
                break;
            }
        }
        if ok && iso_search(a, b, i + 1, fwd, rev, target_ineqs) {
            return true;
        }
        for (x, y) in added {
            fwd.remove(&x);
            rev.remove(&y);
        }
    }
    false
}

/// Keeps the first member of every isomorphism class, preserving order.
pub fn dedup_isomorphic(queries: Vec<ConjunctiveQuery>) -> Vec<ConjunctiveQuery> {
    let mut out: Vec<ConjunctiveQuery> = Vec::new();
    let mut buckets: HashMap<_, Vec<usize>> = HashMap::new();
    for q in queries {
        let sig = signature(&q);
        let bucket = buckets.entry(sig).or_default();
        if bucket.iter().any(|&i| is_isomorphic(&out[i], &q)) {
            continue;
        }
        bucket.push(out.len());
        out.push(q);
    }
    out
}

/// Lexicographically least renaming of the variables to `v0, v1, ...` over
/// all permutations.
pub fn canonical_form(q: &ConjunctiveQuery) -> Result<ConjunctiveQuery> {
    let vars = q.variables();
    guard::check("query variables for canonical form", vars.len(), guard::QUOTIENT_TERMS)?;
    let mut perm: Vec<usize> = (0..vars.len()).collect();
    let mut best: Option<ConjunctiveQuery> = None;
    loop {
        let map: HashMap<&Variable, Term> =
            vars.iter().zip(&perm).map(|(v, &p)| (v, Term::var(&format!("v{p}")))).collect();
        let renamed = q
            .substitute(|t| match t {
                Term::Var(v) => map[v].clone(),
                c => c.clone(),
            })
            .expect("renaming is injective");
        if best.as_ref().is_none_or(|b| renamed < *b) {
            best = Some(renamed);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(best.expect("at least one permutation"))
}

/// Whether countAns = countMS on every database: all quotients are cores
/// with a single automorphism and no two quotients are isomorphic.
pub fn hom_equals_minsup(q: &ConjunctiveQuery) -> Result<bool> {
    let qs = quotients(q)?;
    for x in &qs {
        if !is_core(x) || count_automorphisms(x) != 1 {
            return Ok(false);
        }
    }
    for i in 0..qs.len() {
        for j in i + 1..qs.len() {
            if is_isomorphic(&qs[i], &qs[j]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The facts {h(α) : α ∈ atoms(q)}.
pub fn induced_support(h: &Homomorphism, q: &ConjunctiveQuery) -> BTreeSet<Fact> {
    q.atoms().iter().map(|a| h.image(a)).collect()
}
