//! Compiling countFMS into a linear combination of `SELECT COUNT(*)` queries.

use crate::error::{Error, Result};
use crate::lex::Cursor;
use crate::model::{Fact, Schema};
use crate::query::{
    count_automorphisms, count_homomorphisms, dedup_isomorphic, maps_to, quotients_of_terms, ConjunctiveQuery, Query, Term,
    UnionQuery,
};
use crate::rational::{exact, Rational};
use crate::supports::{FmsCounter, FmsVector};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use crate::guard;
use std::collections::{BTreeSet, HashMap};
use std::fmt::Write;

#[derive(Clone, Debug)]
pub struct RewriteResult {
    pub k: usize,
    /// injective count queries with their coefficients 1/|Auto|
    pub queries: Vec<(ConjunctiveQuery, Rational)>,
}

impl RewriteResult {
    /// Σ countAns(q, D) · γ_q.
    pub fn evaluate(&self, facts: &[Fact]) -> Result<u64> {
        let total: Rational = self
            .queries
            .par_iter()
            .map(|(q, g)| Rational::from_integer(BigInt::from(count_homomorphisms(q, facts))) * g)
            .sum();
        if !total.is_integer() {
            return Err(Error::Invalid(format!("rewriting evaluated to the non-integer {total}")));
        }
        total.to_integer().to_u64().ok_or(Error::Overflow)
    }
}

fn canonical_order(qs: &mut [ConjunctiveQuery]) {
    qs.sort_by_cached_key(|q| (q.len(), q.to_string()));
}

fn union_constants(ucq: &UnionQuery) -> Vec<Term> {
    let mut out: BTreeSet<Term> = BTreeSet::new();
    for d in ucq.disjuncts() {
        out.extend(d.constants().into_iter().map(Term::Const));
        for (s, t) in d.inequalities() {
            out.extend([s, t].into_iter().filter(|x| !x.is_var()).cloned());
        }
    }
    out.into_iter().collect()
}

/// All homomorphic images of the disjuncts, one per isomorphism class.
/// Variables may also collapse onto any constant of the union.
pub fn enumerate_reducts(ucq: &UnionQuery) -> Result<Vec<ConjunctiveQuery>> {
    let constants = union_constants(ucq);
    let mut all = Vec::new();
    for d in ucq.disjuncts() {
        let mut terms: Vec<Term> = d.variables().into_iter().map(Term::Var).collect();
        terms.extend(constants.iter().cloned());
        guard::check("query terms for quotient enumeration", terms.len(), guard::QUOTIENT_TERMS)?;
        all.extend(quotients_of_terms(d, &terms));
    }
    canonical_order(&mut all);
    Ok(dedup_isomorphic(all))
}

/// Adds `x != y` for all distinct variables and `x != c` for every variable
/// and every constant of the union.
fn injective(q: &ConjunctiveQuery, constants: &[Term]) -> ConjunctiveQuery {
    let mut terms: Vec<Term> = q.variables().into_iter().map(Term::Var).collect();
    terms.extend(constants.iter().cloned());
    let mut ineqs = Vec::new();
    for (i, s) in terms.iter().enumerate() {
        for t in &terms[i + 1..] {
            if s.is_var() || t.is_var() {
                ineqs.push((s.clone(), t.clone()));
            }
        }
    }
    q.with_inequalities(ineqs).expect("distinct terms")
}

pub fn build_rewriting(ucq: &UnionQuery, k: usize) -> Result<RewriteResult> {
    let reducts = enumerate_reducts(ucq)?;
    let constants = union_constants(ucq);
    let smaller: Vec<&ConjunctiveQuery> = reducts.iter().filter(|r| r.len() < k).collect();
    let mut q: Vec<ConjunctiveQuery> = reducts
        .iter()
        .filter(|r| r.len() == k)
        .map(|r| injective(r, &constants))
        .filter(|r| !smaller.iter().any(|s| maps_to(s, r)))
        .collect();
    canonical_order(&mut q);
    q = dedup_isomorphic(q);
    // drop the canonically largest dominated query until none is left
    loop {
        let victim = (0..q.len())
            .rev()
            .find(|&i| (0..q.len()).any(|j| j != i && maps_to(&q[j], &q[i])));
        match victim {
            Some(i) => {
                q.remove(i);
            }
            None => break,
        }
    }
    let queries = q
        .into_iter()
        .map(|x| {
            let a = count_automorphisms(&x);
            (x, Rational::new(BigInt::from(1), BigInt::from(a)))
        })
        .collect();
    Ok(RewriteResult { k, queries })
}

fn sql_literal(c: &str) -> String {
    format!("'{}'", c.replace('\'', "''"))
}

fn select_for(q: &ConjunctiveQuery, schema: &Schema) -> Result<String> {
    let mut from = Vec::new();
    let mut conds = Vec::new();
    let mut first: HashMap<&Term, String> = HashMap::new();
    for (i, a) in q.atoms().iter().enumerate() {
        match schema.arity(a.relation.name()) {
            Some(ar) if ar == a.relation.arity() => {}
            _ => return Err(Error::MissingRelation(a.relation.to_string())),
        }
        from.push(format!("{} t{i}", a.relation.name()));
        for (j, t) in a.args.iter().enumerate() {
            let col = format!("t{i}.c{j}");
            match t {
                Term::Const(c) => conds.push(format!("{col} = {}", sql_literal(c.name()))),
                Term::Var(_) => match first.get(t) {
                    Some(prev) => conds.push(format!("{prev} = {col}")),
                    None => {
                        first.insert(t, col);
                    }
                },
            }
        }
    }
    let side = |t: &Term| match t {
        Term::Const(c) => sql_literal(c.name()),
        Term::Var(_) => first[t].clone(),
    };
    for (s, t) in q.inequalities() {
        conds.push(format!("{} <> {}", side(s), side(t)));
    }
    let mut out = format!("SELECT COUNT(*) FROM {}", from.join(", "));
    if !conds.is_empty() {
        out.push_str(" WHERE ");
        out.push_str(&conds.join(" AND "));
    }
    Ok(out)
}

pub fn emit_sql(rw: &RewriteResult, schema: &Schema) -> Result<String> {
    let mut out = String::new();
    writeln!(
        out,
        "-- countFMS for k = {}: {} independent count queries, safe to run in parallel",
        rw.k,
        rw.queries.len()
    )
    .unwrap();
    let mut terms = Vec::new();
    for (i, (q, g)) in rw.queries.iter().enumerate() {
        writeln!(out, "-- q{}: {q}", i + 1).unwrap();
        writeln!(out, "{};", select_for(q, schema)?).unwrap();
        terms.push(format!("{} * q{}", exact(g), i + 1));
    }
    let combo = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
    writeln!(out, "-- countFMS = {combo}").unwrap();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Operand {
    Column(usize, usize),
    Literal(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Condition {
    left: Operand,
    right: Operand,
    equal: bool,
}

/// A parsed `SELECT COUNT(*) FROM ... WHERE ...` statement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountStatement {
    tables: Vec<String>,
    conditions: Vec<Condition>,
}

fn sql_err(cur: &Cursor, msg: &str) -> Error {
    Error::syntax(cur.line(), msg)
}

fn keyword(cur: &mut Cursor, kw: &str) -> bool {
    cur.skip_ws();
    let rest = cur.rest();
    if rest.len() >= kw.len() && rest[..kw.len()].eq_ignore_ascii_case(kw) {
        let after = rest[kw.len()..].chars().next();
        if after.is_none_or(|c| !(c.is_ascii_alphanumeric() || c == '_')) {
            cur.eat(&rest[..kw.len()]);
            return true;
        }
    }
    false
}

fn operand(cur: &mut Cursor, aliases: &HashMap<String, usize>) -> Result<Operand> {
    if cur.peek() == Some('\'') {
        cur.eat("'");
        let mut s = String::new();
        loop {
            let rest = cur.rest();
            let end = rest.find('\'').ok_or_else(|| sql_err(cur, "unterminated literal"))?;
            s.push_str(&rest[..end]);
            let tail = &rest[end..];
            if tail.starts_with("''") {
                s.push('\'');
                cur.eat(&rest[..end + 2]);
            } else {
                cur.eat(&rest[..end + 1]);
                return Ok(Operand::Literal(s));
            }
        }
    }
    let alias = cur.ident().ok_or_else(|| sql_err(cur, "expected a column"))?.to_string();
    let t = *aliases.get(&alias).ok_or_else(|| sql_err(cur, "unknown table alias"))?;
    if !cur.eat(".") {
        return Err(sql_err(cur, "expected '.'"));
    }
    let col = cur.ident().ok_or_else(|| sql_err(cur, "expected a column name"))?;
    let idx = col
        .strip_prefix('c')
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| sql_err(cur, "columns are named c0, c1, ..."))?;
    Ok(Operand::Column(t, idx))
}

/// Parses one statement; a trailing `;` is allowed.
pub fn parse_count_statement(text: &str) -> Result<CountStatement> {
    let mut cur = Cursor::new(text);
    if !(keyword(&mut cur, "SELECT") && keyword(&mut cur, "COUNT") && cur.eat("(") && cur.eat("*") && cur.eat(")")) {
        return Err(sql_err(&cur, "expected SELECT COUNT(*)"));
    }
    if !keyword(&mut cur, "FROM") {
        return Err(sql_err(&cur, "expected FROM"));
    }
    let mut tables = Vec::new();
    let mut aliases = HashMap::new();
    loop {
        let t = cur.ident().ok_or_else(|| sql_err(&cur, "expected a table"))?.to_string();
        let a = cur.ident().ok_or_else(|| sql_err(&cur, "expected an alias"))?.to_string();
        if aliases.insert(a, tables.len()).is_some() {
            return Err(sql_err(&cur, "duplicate alias"));
        }
        tables.push(t);
        if !cur.eat(",") {
            break;
        }
    }
    let mut conditions = Vec::new();
    if keyword(&mut cur, "WHERE") {
        loop {
            let left = operand(&mut cur, &aliases)?;
            let equal = if cur.eat("<>") {
                false
            } else if cur.eat("=") {
                true
            } else {
                return Err(sql_err(&cur, "expected = or <>"));
            };
            let right = operand(&mut cur, &aliases)?;
            conditions.push(Condition { left, right, equal });
            if !keyword(&mut cur, "AND") {
                break;
            }
        }
    }
    cur.eat(";");
    if !cur.at_end() {
        return Err(sql_err(&cur, "trailing input"));
    }
    Ok(CountStatement { tables, conditions })
}

impl CountStatement {
    /// Row count of the cross product filtered by the conditions.
    pub fn evaluate(&self, facts: &[Fact]) -> u64 {
        let rows: Vec<Vec<&Fact>> = self
            .tables
            .iter()
            .map(|t| facts.iter().filter(|f| f.relation.name() == t).collect())
            .collect();
        let mut chosen: Vec<&Fact> = Vec::with_capacity(rows.len());
        self.count(&rows, &mut chosen)
    }

    fn value<'a>(&self, op: &'a Operand, chosen: &[&'a Fact]) -> Option<&'a str> {
        match op {
            Operand::Literal(s) => Some(s),
            Operand::Column(t, c) => chosen.get(*t).and_then(|f| f.args.get(*c)).map(|x| x.name()),
        }
    }

    fn ready(op: &Operand, depth: usize) -> bool {
        match op {
            Operand::Literal(_) => true,
            Operand::Column(t, _) => *t < depth,
        }
    }

    fn count<'a>(&'a self, rows: &[Vec<&'a Fact>], chosen: &mut Vec<&'a Fact>) -> u64 {
        let depth = chosen.len();
        if depth == rows.len() {
            return 1;
        }
        let mut n = 0;
        for &f in &rows[depth] {
            chosen.push(f);
            let ok = self.conditions.iter().all(|c| {
                let now = Self::ready(&c.left, depth + 1) && Self::ready(&c.right, depth + 1);
                let before = Self::ready(&c.left, depth) && Self::ready(&c.right, depth);
                if !now || before {
                    return true;
                }
                match (self.value(&c.left, chosen), self.value(&c.right, chosen)) {
                    (Some(a), Some(b)) => (a == b) == c.equal,
                    _ => false,
                }
            });
            if ok {
                n += self.count(rows, chosen);
            }
            chosen.pop();
        }
        n
    }
}

/// Splits emitted text into its statements, skipping comment lines.
pub fn parse_script(text: &str) -> Result<Vec<CountStatement>> {
    let body: String = text
        .lines()
        .filter(|l| !l.trim_start().starts_with("--"))
        .collect::<Vec<_>>()
        .join("\n");
    body.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(parse_count_statement)
        .collect()
}

/// countFMS through the rewriting, for every k up to the largest disjunct.
pub struct SqlRewriteCounter;

impl FmsCounter for SqlRewriteCounter {
    fn fms(&self, q: &Query, facts: &[Fact]) -> Result<FmsVector> {
        let ucq = match q {
            Query::Cq(c) => UnionQuery::new(vec![c.clone()])?,
            Query::Ucq(u) => u.clone(),
            _ => return Err(Error::Unsupported("the rewriting needs a CQ or UCQ".into())),
        };
        let mut universe = facts.to_vec();
        universe.sort();
        universe.dedup();
        let mut v = FmsVector::zeros(universe.len());
        let max_k = ucq.disjuncts().iter().map(|d| d.len()).max().unwrap_or(0);
        for k in 1..=max_k.min(universe.len()) {
            v.counts[k] = build_rewriting(&ucq, k)?.evaluate(&universe)?;
        }
        Ok(v)
    }
}

/// Runs every statement of an emitted script and combines with the coefficients.
pub fn evaluate_rewriting_sql(rw: &RewriteResult, schema: &Schema, facts: &[Fact]) -> Result<u64> {
    let stmts = parse_script(&emit_sql(rw, schema)?)?;
    let mut total = Rational::zero();
    for (s, (_, g)) in stmts.iter().zip(&rw.queries) {
        total += Rational::from_integer(BigInt::from(s.evaluate(facts))) * g;
    }
    if !total.is_integer() {
        return Err(Error::Invalid(format!("rewriting evaluated to the non-integer {total}")));
    }
    total.to_integer().to_u64().ok_or(Error::Overflow)
}
