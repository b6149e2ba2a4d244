//! GYO ear removal and join-tree homomorphism counting.

use super::hom::FactIndex;
use super::{Atom, ConjunctiveQuery, Term, Variable};
use crate::model::{Constant, Fact};
use std::collections::{BTreeSet, HashMap};

/// Parent of each atom in a join forest, or `None` if q is cyclic.
/// Roots have parent `None` inside the returned vector.
pub fn join_forest(q: &ConjunctiveQuery) -> Option<Vec<Option<usize>>> {
    let atoms = q.atoms();
    let vars: Vec<BTreeSet<&Variable>> = atoms.iter().map(|a| a.variables().collect()).collect();
    let mut alive: Vec<bool> = vec![true; atoms.len()];
    let mut parent = vec![None; atoms.len()];
    let mut remaining = atoms.len();
    while remaining > 1 {
        let mut removed = false;
        for e in 0..atoms.len() {
            if !alive[e] {
                continue;
            }
            let shared: BTreeSet<&Variable> = vars[e]
                .iter()
                .filter(|v| (0..atoms.len()).any(|g| g != e && alive[g] && vars[g].contains(*v)))
                .copied()
                .collect();
            let witness = (0..atoms.len()).find(|&f| f != e && alive[f] && shared.is_subset(&vars[f]));
            if let Some(f) = witness {
                // atoms sharing nothing start a new tree
                parent[e] = if shared.is_empty() { None } else { Some(f) };
                alive[e] = false;
                remaining -= 1;
                removed = true;
                break;
            }
        }
        if !removed {
            return None;
        }
    }
    Some(parent)
}

pub fn is_acyclic(q: &ConjunctiveQuery) -> bool {
    join_forest(q).is_some()
}

/// Counts homomorphisms bottom-up over a join forest. `None` if q is cyclic
/// or has inequalities.
pub fn count_homomorphisms_acyclic(q: &ConjunctiveQuery, facts: &[Fact]) -> Option<u64> {
    if !q.inequalities().is_empty() {
        return None;
    }
    let parent = join_forest(q)?;
    let atoms = q.atoms();
    let index = FactIndex::new(facts);
    let n = atoms.len();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, p) in parent.iter().enumerate() {
        if let Some(p) = p {
            children[*p].push(e);
        }
    }

    // tuples matching each atom, as bindings var -> constant
    let bindings: Vec<Vec<Vec<(Variable, Constant)>>> = atoms
        .iter()
        .map(|a| atom_bindings(a, &index))
        .collect();

    fn weights(
        e: usize,
        atoms: &[Atom],
        children: &[Vec<usize>],
        bindings: &[Vec<Vec<(Variable, Constant)>>],
    ) -> Option<Vec<u64>> {
        let mut w = vec![1u64; bindings[e].len()];
        for &c in &children[e] {
            let cw = weights(c, atoms, children, bindings)?;
            let on: Vec<&Variable> = {
                let mine: BTreeSet<&Variable> = atoms[e].variables().collect();
                let mut s: Vec<&Variable> = atoms[c].variables().filter(|v| mine.contains(v)).collect();
                s.sort();
                s.dedup();
                s
            };
            let key = |b: &[(Variable, Constant)]| -> Vec<Constant> {
                on.iter()
                    .map(|v| b.iter().find(|(x, _)| x == *v).unwrap().1.clone())
                    .collect()
            };
            let mut sums: HashMap<Vec<Constant>, u64> = HashMap::new();
            for (b, x) in bindings[c].iter().zip(&cw) {
                let s = sums.entry(key(b)).or_insert(0);
                *s = s.checked_add(*x)?;
            }
            for (b, x) in bindings[e].iter().zip(w.iter_mut()) {
                *x = x.checked_mul(sums.get(&key(b)).copied().unwrap_or(0))?;
            }
        }
        Some(w)
    }

    let mut total = 1u64;
    for root in (0..n).filter(|&e| parent[e].is_none()) {
        let w = weights(root, atoms, &children, &bindings)?;
        let mut s = 0u64;
        for x in w {
            s = s.checked_add(x)?;
        }
        total = total.checked_mul(s)?;
    }
    Some(total)
}

fn atom_bindings(a: &Atom, index: &FactIndex) -> Vec<Vec<(Variable, Constant)>> {
    let mut out = Vec::new();
    for (_, args) in index.facts_of(&a.relation) {
        let mut b: Vec<(Variable, Constant)> = Vec::new();
        let mut ok = true;
        for (t, c) in a.args.iter().zip(args.iter()) {
            match t {
                Term::Const(k) => {
                    if k != c {
                        ok = false;
                        break;
                    }
                }
                Term::Var(v) => match b.iter().find(|(x, _)| x == v) {
                    Some((_, y)) if y != c => {
                        ok = false;
                        break;
                    }
                    Some(_) => {}
                    None => b.push((v.clone(), c.clone())),
                },
            }
        }
        if ok {
            out.push(b);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::{count_homomorphisms, parse_query, Query};

    fn cq(text: &str) -> ConjunctiveQuery {
        match parse_query(text).unwrap() {
            Query::Cq(q) => q,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn acyclicity() {
        assert!(is_acyclic(&cq("q :- R(x,y), S(y,z).")));
        assert!(!is_acyclic(&cq("q :- R(x,y), R(y,z), R(z,x).")));
        assert!(is_acyclic(&cq("q :- R(x,y).")));
        assert!(is_acyclic(&cq("q :- R(x,y), S(z).")));
        assert!(is_acyclic(&cq("q :- T(x,y,z), R(x,y), R(y,z), R(z,x).")));
    }

    #[test]
    fn join_tree_count_matches_backtracking() {
        let d: Vec<Fact> = ["R(a,b)", "R(b,c)", "R(c,a)", "R(a,a)", "S(b)", "S(c)"]
            .iter()
            .map(|s| Fact::parse(s).unwrap())
            .collect();
        for text in [
            "q :- R(x,y), R(y,z), R(z,w).",
            "q :- R(x,y), S(y), R(y,'a').",
            "q :- R(x,x), S(y).",
            "q :- S(x), S(y), S(z).",
        ] {
            let q = cq(text);
            assert_eq!(count_homomorphisms_acyclic(&q, &d), Some(count_homomorphisms(&q, &d)), "{text}");
        }
        assert_eq!(count_homomorphisms_acyclic(&cq("q :- R(x,y), R(y,z), R(z,x)."), &d), None);
    }
}
