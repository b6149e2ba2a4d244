//! Query syntax, homomorphisms and structural analyses.

mod acyclic;
mod analysis;
mod hom;
mod parse;

pub use acyclic::{count_homomorphisms_acyclic, is_acyclic, join_forest};
pub use analysis::{
    canonical_form, core, count_automorphisms, dedup_isomorphic, hom_equals_minsup, induced_support,
    is_core, is_isomorphic, is_self_join_free, mergeable, quotients, self_join_width, unif_terms, unifiable,
};
pub use hom::{
    canonical_database, count_homomorphisms, enumerate_homomorphisms, has_homomorphism, homomorphism_images,
    count_automorphisms_materialized, maps_to, maps_to_materialized, FactIndex, Homomorphism,
};
pub(crate) use analysis::{apply_partition, quotients_of_terms};
pub use parse::{parse_query, parse_regex};
pub(crate) use hom::images_in_index;

use crate::error::{Error, Result};
use crate::model::{Constant, Fact, RelationName, Schema};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable(Arc<str>);

impl Variable {
    pub fn new(name: &str) -> Self {
        Variable(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(Constant),
    Var(Variable),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(Variable::new(name))
    }

    pub fn constant(name: &str) -> Result<Self> {
        Ok(Term::Const(Constant::new(name)?))
    }

    pub fn as_var(&self) -> Option<&Variable> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "'{c}'"),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub relation: RelationName,
    pub args: Vec<Term>,
}

impl Atom {
    /// Builds an atom from names; names starting with `'` are constants.
    pub fn parse_terms(relation: &str, args: &[&str]) -> Result<Self> {
        let relation = RelationName::new(relation, args.len())?;
        let args = args
            .iter()
            .map(|a| match a.strip_prefix('\'') {
                Some(c) => Term::constant(c),
                None => Ok(Term::var(a)),
            })
            .collect::<Result<_>>()?;
        Ok(Atom { relation, args })
    }

    pub fn variables(&self) -> impl Iterator<Item = &Variable> {
        self.args.iter().filter_map(Term::as_var)
    }

    pub fn map_terms(&self, f: impl Fn(&Term) -> Term) -> Atom {
        Atom {
            relation: self.relation.clone(),
            args: self.args.iter().map(f).collect(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.relation)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn ordered(a: Term, b: Term) -> (Term, Term) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Boolean CQ with optional inequality atoms. Equality atoms never survive
/// construction; see [`ConjunctiveQuery::with_equalities`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConjunctiveQuery {
    atoms: Vec<Atom>,
    inequalities: Vec<(Term, Term)>,
}

impl ConjunctiveQuery {
    pub fn new(atoms: Vec<Atom>, inequalities: Vec<(Term, Term)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Invalid("query without relational atoms".into()));
        }
        let mut schema = Schema::new();
        for a in &atoms {
            schema.observe(&a.relation)?;
        }
        let q = Self::normalized(atoms, inequalities)
            .ok_or_else(|| Error::Invalid("inequality t != t can never hold".into()))?;
        let vars: BTreeSet<&Variable> = q.atoms.iter().flat_map(Atom::variables).collect();
        for (s, t) in &q.inequalities {
            for v in [s, t].into_iter().filter_map(Term::as_var) {
                if !vars.contains(v) {
                    return Err(Error::Invalid(format!("variable {v} occurs only in an inequality")));
                }
            }
            if !s.is_var() && !t.is_var() {
                unreachable!("constant pairs are dropped by normalization");
            }
        }
        Ok(q)
    }

    pub fn from_atoms(atoms: Vec<Atom>) -> Result<Self> {
        Self::new(atoms, Vec::new())
    }

    /// Sorts and deduplicates; `None` when some inequality reads `t != t`.
    pub(crate) fn normalized(mut atoms: Vec<Atom>, inequalities: Vec<(Term, Term)>) -> Option<Self> {
        atoms.sort();
        atoms.dedup();
        let mut ineqs = Vec::with_capacity(inequalities.len());
        for (s, t) in inequalities {
            if s == t {
                return None;
            }
            if !s.is_var() && !t.is_var() {
                continue;
            }
            ineqs.push(ordered(s, t));
        }
        ineqs.sort();
        ineqs.dedup();
        Some(ConjunctiveQuery {
            atoms,
            inequalities: ineqs,
        })
    }

    /// Eliminates `s = t` atoms by substitution.
    pub fn with_equalities(
        atoms: Vec<Atom>,
        inequalities: Vec<(Term, Term)>,
        equalities: &[(Term, Term)],
    ) -> Result<Self> {
        let subst = equality_substitution(equalities)?;
        let apply = |t: &Term| subst.get(t).cloned().unwrap_or_else(|| t.clone());
        let atoms = atoms.iter().map(|a| a.map_terms(apply)).collect();
        let ineqs = inequalities.iter().map(|(s, t)| (apply(s), apply(t))).collect();
        Self::new(atoms, ineqs)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn inequalities(&self) -> &[(Term, Term)] {
        &self.inequalities
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Variables in order of first occurrence.
    pub fn variables(&self) -> Vec<Variable> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for v in self.atoms.iter().flat_map(Atom::variables) {
            if seen.insert(v) {
                out.push(v.clone());
            }
        }
        out
    }

    /// Variables and constants in order of first occurrence.
    pub fn terms(&self) -> Vec<Term> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for t in self.atoms.iter().flat_map(|a| a.args.iter()) {
            if seen.insert(t) {
                out.push(t.clone());
            }
        }
        out
    }

    pub fn constants(&self) -> BTreeSet<Constant> {
        self.terms()
            .into_iter()
            .filter_map(|t| match t {
                Term::Const(c) => Some(c),
                Term::Var(_) => None,
            })
            .collect()
    }

    pub fn without_inequalities(&self) -> Self {
        ConjunctiveQuery {
            atoms: self.atoms.clone(),
            inequalities: Vec::new(),
        }
    }

    /// Adds inequalities; `None` when one of them reads `t != t`.
    pub fn with_inequalities(&self, extra: impl IntoIterator<Item = (Term, Term)>) -> Option<Self> {
        let mut ineqs = self.inequalities.clone();
        ineqs.extend(extra);
        Self::normalized(self.atoms.clone(), ineqs)
    }

    /// Applies a term substitution; `None` if an inequality collapses.
    pub fn substitute(&self, f: impl Fn(&Term) -> Term) -> Option<Self> {
        let atoms = self.atoms.iter().map(|a| a.map_terms(&f)).collect();
        let ineqs = self.inequalities.iter().map(|(s, t)| (f(s), f(t))).collect();
        Self::normalized(atoms, ineqs)
    }

    pub(crate) fn remove_atom(&self, i: usize) -> Self {
        let mut atoms = self.atoms.clone();
        atoms.remove(i);
        ConjunctiveQuery {
            atoms,
            inequalities: self.inequalities.clone(),
        }
    }

    pub fn schema(&self) -> Schema {
        let mut s = Schema::new();
        for a in &self.atoms {
            s.observe(&a.relation).expect("checked at construction");
        }
        s
    }
}

fn equality_substitution(equalities: &[(Term, Term)]) -> Result<BTreeMap<Term, Term>> {
    let mut parent: BTreeMap<Term, Term> = BTreeMap::new();
    fn find(parent: &mut BTreeMap<Term, Term>, t: &Term) -> Term {
        let mut cur = t.clone();
        while let Some(p) = parent.get(&cur) {
            if *p == cur {
                break;
            }
            cur = p.clone();
        }
        cur
    }
    for (s, t) in equalities {
        parent.entry(s.clone()).or_insert_with(|| s.clone());
        parent.entry(t.clone()).or_insert_with(|| t.clone());
        let (rs, rt) = (find(&mut parent, s), find(&mut parent, t));
        if rs == rt {
            continue;
        }
        // constants win as representatives
        match (&rs, &rt) {
            (Term::Const(a), Term::Const(b)) => {
                return Err(Error::Invalid(format!("equality equates distinct constants {a} and {b}")));
            }
            (Term::Const(_), _) => {
                parent.insert(rt, rs);
            }
            _ => {
                parent.insert(rs, rt);
            }
        }
    }
    let keys: Vec<Term> = parent.keys().cloned().collect();
    Ok(keys
        .into_iter()
        .map(|k| {
            let r = find(&mut parent, &k);
            (k, r)
        })
        .collect())
}

impl fmt::Display for ConjunctiveQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("q :- ")?;
        let mut first = true;
        for a in &self.atoms {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{a}")?;
        }
        for (s, t) in &self.inequalities {
            write!(f, ", {s} != {t}")?;
        }
        f.write_str(".")
    }
}

impl fmt::Debug for ConjunctiveQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnionQuery {
    disjuncts: Vec<ConjunctiveQuery>,
}

impl UnionQuery {
    pub fn new(disjuncts: Vec<ConjunctiveQuery>) -> Result<Self> {
        if disjuncts.is_empty() {
            return Err(Error::Invalid("union without disjuncts".into()));
        }
        let mut schema = Schema::new();
        for a in disjuncts.iter().flat_map(|d| d.atoms()) {
            schema.observe(&a.relation)?;
        }
        Ok(UnionQuery { disjuncts })
    }

    pub fn disjuncts(&self) -> &[ConjunctiveQuery] {
        &self.disjuncts
    }
}

impl fmt::Display for UnionQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.disjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Regex {
    Eps,
    Sym(Arc<str>),
    Concat(Box<Regex>, Box<Regex>),
    Union(Box<Regex>, Box<Regex>),
    Star(Box<Regex>),
}

impl Regex {
    pub fn sym(name: &str) -> Self {
        Regex::Sym(name.into())
    }

    pub fn concat(a: Regex, b: Regex) -> Self {
        Regex::Concat(Box::new(a), Box::new(b))
    }

    pub fn union(a: Regex, b: Regex) -> Self {
        Regex::Union(Box::new(a), Box::new(b))
    }

    pub fn star(a: Regex) -> Self {
        Regex::Star(Box::new(a))
    }

    pub fn plus(a: Regex) -> Self {
        Regex::concat(a.clone(), Regex::star(a))
    }

    pub fn optional(a: Regex) -> Self {
        Regex::union(a, Regex::Eps)
    }

    pub fn alphabet(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        fn walk(r: &Regex, out: &mut BTreeSet<Arc<str>>) {
            match r {
                Regex::Eps => {}
                Regex::Sym(s) => {
                    out.insert(s.clone());
                }
                Regex::Concat(a, b) | Regex::Union(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Regex::Star(a) => walk(a, out),
            }
        }
        walk(self, &mut out);
        out
    }
}

impl fmt::Display for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regex::Eps => f.write_str("eps"),
            Regex::Sym(s) => f.write_str(s),
            Regex::Concat(a, b) => write!(f, "({a}.{b})"),
            Regex::Union(a, b) => write!(f, "({a}|{b})"),
            Regex::Star(a) => write!(f, "({a})*"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularPathQuery {
    pub regex: Regex,
    pub source: Constant,
    pub target: Constant,
}

impl fmt::Display for RegularPathQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rpq {} {} : {}", self.source, self.target, self.regex)
    }
}

/// Monotone query given by its generators: S satisfies it iff S contains one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitMonotoneQuery {
    generators: Vec<BTreeSet<Fact>>,
}

impl ExplicitMonotoneQuery {
    pub fn new(generators: impl IntoIterator<Item = BTreeSet<Fact>>) -> Self {
        let mut generators: Vec<_> = generators.into_iter().collect();
        generators.sort();
        generators.dedup();
        ExplicitMonotoneQuery { generators }
    }

    pub fn generators(&self) -> &[BTreeSet<Fact>] {
        &self.generators
    }

    pub fn evaluate(&self, facts: &BTreeSet<Fact>) -> bool {
        self.generators.iter().any(|g| g.is_subset(facts))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Query {
    Cq(ConjunctiveQuery),
    Ucq(UnionQuery),
    Rpq(RegularPathQuery),
    Explicit(ExplicitMonotoneQuery),
}

impl Query {
    /// The CQ disjuncts, for the classes that have them.
    pub fn disjuncts(&self) -> Option<&[ConjunctiveQuery]> {
        match self {
            Query::Cq(q) => Some(std::slice::from_ref(q)),
            Query::Ucq(u) => Some(u.disjuncts()),
            _ => None,
        }
    }

    /// Relations mentioned by the query with their arities, when known.
    pub fn schema(&self) -> Result<Schema> {
        let mut s = Schema::new();
        match self {
            Query::Cq(_) | Query::Ucq(_) => {
                for a in self.disjuncts().unwrap().iter().flat_map(|d| d.atoms()) {
                    s.observe(&a.relation)?;
                }
            }
            Query::Rpq(r) => {
                for sym in r.regex.alphabet() {
                    s.observe(&RelationName::new(&sym, 2)?)?;
                }
            }
            Query::Explicit(e) => {
                for f in e.generators().iter().flatten() {
                    s.observe(&f.relation)?;
                }
            }
        }
        Ok(s)
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::Cq(q) => write!(f, "{q}"),
            Query::Ucq(u) => write!(f, "{u}"),
            Query::Rpq(r) => write!(f, "{r}"),
            Query::Explicit(e) => {
                let gens: Vec<Vec<String>> = e
                    .generators()
                    .iter()
                    .map(|g| g.iter().map(|f| f.to_string()).collect())
                    .collect();
                write!(f, "{}", serde_json::to_string(&gens).expect("strings serialize"))
            }
        }
    }
}

/// D ⊨ q.
pub fn evaluate(q: &Query, facts: &[Fact]) -> bool {
    match q {
        Query::Cq(c) => has_homomorphism(c, facts),
        Query::Ucq(u) => u.disjuncts().iter().any(|c| has_homomorphism(c, facts)),
        Query::Rpq(r) => crate::rpq::evaluate_rpq(r, facts),
        Query::Explicit(e) => e.evaluate(&facts.iter().cloned().collect()),
    }
}
