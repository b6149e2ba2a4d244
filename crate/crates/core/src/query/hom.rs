//! Backtracking homomorphism search.

use super::{Atom, ConjunctiveQuery, Term, Variable};
use crate::model::{Constant, Fact, RelationName};
use std::collections::{BTreeMap, HashMap};

/// Facts grouped by relation, each with its position in the source slice.
pub struct FactIndex<'a> {
    by_rel: HashMap<&'a RelationName, Vec<(usize, &'a [Constant])>>,
}

impl<'a> FactIndex<'a> {
    pub fn new(facts: &'a [Fact]) -> Self {
        Self::from_indexed(facts.iter().enumerate())
    }

    pub fn from_indexed(facts: impl IntoIterator<Item = (usize, &'a Fact)>) -> Self {
        let mut by_rel: HashMap<&'a RelationName, Vec<(usize, &'a [Constant])>> = HashMap::new();
        for (i, f) in facts {
            by_rel.entry(&f.relation).or_default().push((i, &f.args));
        }
        for v in by_rel.values_mut() {
            v.sort_by(|a, b| a.1.cmp(b.1));
        }
        FactIndex { by_rel }
    }

    pub(crate) fn facts_of(&self, rel: &RelationName) -> &[(usize, &'a [Constant])] {
        self.facts(rel)
    }

    fn facts(&self, rel: &RelationName) -> &[(usize, &'a [Constant])] {
        self.by_rel.get(rel).map(Vec::as_slice).unwrap_or(&[])
    }
}

#[derive(Clone, Copy)]
enum Slot<'q> {
    Const(&'q Constant),
    Var(usize),
}

struct Step<'q> {
    relation: &'q RelationName,
    args: Vec<Slot<'q>>,
    checks: Vec<(Slot<'q>, Slot<'q>)>,
}

/// Receives the variable binding and the matched fact ids.
type Visitor<'v, 'a> = dyn FnMut(&[Option<&'a Constant>], &[usize]) -> bool + 'v;

/// A CQ compiled into a join order over variable slots.
struct Plan<'q> {
    vars: Vec<&'q Variable>,
    steps: Vec<Step<'q>>,
}

impl<'q> Plan<'q> {
    fn new(q: &'q ConjunctiveQuery) -> Self {
        let mut vars: Vec<&'q Variable> = Vec::new();
        let mut slot_of: HashMap<&'q Variable, usize> = HashMap::new();
        for v in q.atoms().iter().flat_map(Atom::variables) {
            if !slot_of.contains_key(v) {
                slot_of.insert(v, vars.len());
                vars.push(v);
            }
        }
        let slot = |t: &'q Term| match t {
            Term::Const(c) => Slot::Const(c),
            Term::Var(v) => Slot::Var(slot_of[v]),
        };

        // greedy order: prefer atoms whose positions are already fixed
        let mut bound = vec![false; vars.len()];
        let mut left: Vec<&'q Atom> = q.atoms().iter().collect();
        let mut order = Vec::new();
        while !left.is_empty() {
            let score = |a: &Atom| {
                a.args
                    .iter()
                    .filter(|t| match t {
                        Term::Const(_) => true,
                        Term::Var(v) => bound[slot_of[v]],
                    })
                    .count()
            };
            let mut best = 0;
            for i in 1..left.len() {
                if score(left[i]) > score(left[best]) {
                    best = i;
                }
            }
            let a = left.remove(best);
            for v in a.variables() {
                bound[slot_of[v]] = true;
            }
            order.push(a);
        }

        let mut bound_at = vec![usize::MAX; vars.len()];
        for (i, a) in order.iter().enumerate() {
            for v in a.variables() {
                let s = slot_of[v];
                if bound_at[s] == usize::MAX {
                    bound_at[s] = i;
                }
            }
        }
        let mut steps: Vec<Step<'q>> = order
            .iter()
            .map(|a| Step {
                relation: &a.relation,
                args: a.args.iter().map(slot).collect(),
                checks: Vec::new(),
            })
            .collect();
        for (s, t) in q.inequalities() {
            let at = |x: &Slot| match x {
                Slot::Const(_) => 0,
                Slot::Var(i) => bound_at[*i],
            };
            let (s, t) = (slot(s), slot(t));
            let step = at(&s).max(at(&t));
            steps[step].checks.push((s, t));
        }
        Plan { vars, steps }
    }

    /// Calls `visit(binding, image_ids)` per homomorphism; stops when it returns false.
    fn search<'a>(&self, index: &FactIndex<'a>, visit: &mut Visitor<'_, 'a>)
    where
        'q: 'a,
    {
        let mut binding: Vec<Option<&'a Constant>> = vec![None; self.vars.len()];
        let mut image = Vec::with_capacity(self.steps.len());
        self.go(0, index, &mut binding, &mut image, visit);
    }

    fn go<'a>(
        &self,
        depth: usize,
        index: &FactIndex<'a>,
        binding: &mut Vec<Option<&'a Constant>>,
        image: &mut Vec<usize>,
        visit: &mut Visitor<'_, 'a>,
    ) -> bool
    where
        'q: 'a,
    {
        if depth == self.steps.len() {
            return visit(binding, image);
        }
        let step = &self.steps[depth];
        let mut newly = Vec::with_capacity(step.args.len());
        'facts: for &(id, args) in index.facts(step.relation) {
            for &s in &newly {
                binding[s] = None;
            }
            newly.clear();
            for (slot, c) in step.args.iter().zip(args) {
                match *slot {
                    Slot::Const(k) => {
                        if k != c {
                            continue 'facts;
                        }
                    }
                    Slot::Var(v) => match binding[v] {
                        Some(b) if b != c => continue 'facts,
                        Some(_) => {}
                        None => {
                            binding[v] = Some(c);
                            newly.push(v);
                        }
                    },
                }
            }
            let value = |s: &Slot<'q>, binding: &[Option<&'a Constant>]| -> &'a Constant {
                match *s {
                    Slot::Const(c) => c,
                    Slot::Var(v) => binding[v].expect("bound by plan order"),
                }
            };
            for (s, t) in &step.checks {
                if value(s, binding) == value(t, binding) {
                    continue 'facts;
                }
            }
            image.push(id);
            let go_on = self.go(depth + 1, index, binding, image, visit);
            image.pop();
            if !go_on {
                for &s in &newly {
                    binding[s] = None;
                }
                return false;
            }
        }
        for &s in &newly {
            binding[s] = None;
        }
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Homomorphism {
    pub mapping: BTreeMap<Variable, Constant>,
}

impl Homomorphism {
    pub fn apply(&self, t: &Term) -> Constant {
        match t {
            Term::Const(c) => c.clone(),
            Term::Var(v) => self.mapping[v].clone(),
        }
    }

    pub fn image(&self, a: &Atom) -> Fact {
        Fact {
            relation: a.relation.clone(),
            args: a.args.iter().map(|t| self.apply(t)).collect(),
        }
    }
}

/// All homomorphisms q → facts, ordered by the values of the variables
/// taken in first-occurrence order.
pub fn enumerate_homomorphisms(q: &ConjunctiveQuery, facts: &[Fact]) -> Vec<Homomorphism> {
    let plan = Plan::new(q);
    let index = FactIndex::new(facts);
    let mut rows: Vec<Vec<Constant>> = Vec::new();
    plan.search(&index, &mut |b, _| {
        rows.push(b.iter().map(|c| c.unwrap().clone()).collect());
        true
    });
    rows.sort();
    rows.into_iter()
        .map(|row| Homomorphism {
            mapping: plan.vars.iter().map(|v| (*v).clone()).zip(row).collect(),
        })
        .collect()
}

pub fn count_homomorphisms(q: &ConjunctiveQuery, facts: &[Fact]) -> u64 {
    count_in_index(q, &FactIndex::new(facts))
}

pub(crate) fn count_in_index(q: &ConjunctiveQuery, index: &FactIndex) -> u64 {
    let mut n = 0u64;
    Plan::new(q).search(index, &mut |_, _| {
        n += 1;
        true
    });
    n
}

pub fn has_homomorphism(q: &ConjunctiveQuery, facts: &[Fact]) -> bool {
    exists_in_index(q, &FactIndex::new(facts))
}

pub(crate) fn exists_in_index(q: &ConjunctiveQuery, index: &FactIndex) -> bool {
    let mut found = false;
    Plan::new(q).search(index, &mut |_, _| {
        found = true;
        false
    });
    found
}

/// Induced supports (as sorted positions in `facts`), one entry per homomorphism.
pub fn homomorphism_images(q: &ConjunctiveQuery, facts: &[Fact]) -> Vec<Vec<usize>> {
    images_in_index(q, &FactIndex::new(facts))
}

pub(crate) fn images_in_index(q: &ConjunctiveQuery, index: &FactIndex) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    Plan::new(q).search(index, &mut |_, ids| {
        let mut v = ids.to_vec();
        v.sort_unstable();
        v.dedup();
        out.push(v);
        true
    });
    out
}

pub(crate) fn frozen(v: &Variable) -> Constant {
    Constant::raw(&format!("?{}", v.name()))
}

/// The canonical database: each variable becomes a fresh frozen constant.
pub fn canonical_database(q: &ConjunctiveQuery) -> Vec<Fact> {
    let mut out: Vec<Fact> = q
        .atoms()
        .iter()
        .map(|a| Fact {
            relation: a.relation.clone(),
            args: a
                .args
                .iter()
                .map(|t| match t {
                    Term::Const(c) => c.clone(),
                    Term::Var(v) => frozen(v),
                })
                .collect(),
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Query homomorphism `from → to`, identity on constants; inequalities of
/// `from` must land on distinct terms of `to`.
pub fn maps_to(from: &ConjunctiveQuery, to: &ConjunctiveQuery) -> bool {
    has_homomorphism(from, &canonical_database(to))
}

fn neq_relation() -> RelationName {
    RelationName::raw("≠", 2)
}

fn frozen_term(t: &Term) -> Constant {
    match t {
        Term::Const(c) => c.clone(),
        Term::Var(v) => frozen(v),
    }
}

/// `q` with each inequality turned into an atom over a reserved relation.
fn inequalities_as_atoms(q: &ConjunctiveQuery) -> ConjunctiveQuery {
    let mut atoms = q.atoms().to_vec();
    for (s, t) in q.inequalities() {
        atoms.push(Atom {
            relation: neq_relation(),
            args: vec![s.clone(), t.clone()],
        });
    }
    ConjunctiveQuery::normalized(atoms, Vec::new()).expect("no inequalities left")
}

/// Canonical database with the inequality relation stored symmetrically.
fn materialized_database(q: &ConjunctiveQuery) -> Vec<Fact> {
    let mut db = canonical_database(q);
    for (s, t) in q.inequalities() {
        let (a, b) = (frozen_term(s), frozen_term(t));
        db.push(Fact {
            relation: neq_relation(),
            args: vec![a.clone(), b.clone()],
        });
        db.push(Fact {
            relation: neq_relation(),
            args: vec![b, a],
        });
    }
    db.sort();
    db.dedup();
    db
}

/// Query homomorphism where every inequality of `from` must land on an
/// inequality of `to`.
pub fn maps_to_materialized(from: &ConjunctiveQuery, to: &ConjunctiveQuery) -> bool {
    has_homomorphism(&inequalities_as_atoms(from), &materialized_database(to))
}

/// Endomorphisms of `q` preserving its atoms and its inequality atoms.
pub fn count_automorphisms_materialized(q: &ConjunctiveQuery) -> u64 {
    count_homomorphisms(&inequalities_as_atoms(q), &materialized_database(q))
}
