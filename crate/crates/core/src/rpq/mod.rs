//! Regular path queries: compilation, acyclic path counting, scoring and
//! the tractability classifier.

mod automaton;

pub use automaton::{compile_regex, Dfa, Nfa};

use crate::error::{Error, Result};
use crate::model::{Constant, Fact, PartitionedDatabase};
use crate::query::RegularPathQuery;
use crate::rational::Rational;
use crate::wsms::WeightFunction;
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// A path query with its automaton compiled once.
pub struct CompiledRpq {
    pub dfa: Dfa,
    pub source: Constant,
    pub target: Constant,
}

impl CompiledRpq {
    pub fn new(q: &RegularPathQuery) -> Self {
        CompiledRpq {
            dfa: compile_regex(&q.regex),
            source: q.source.clone(),
            target: q.target.clone(),
        }
    }

    /// Reachability of (target, accepting) from (source, initial) in the
    /// product of the graph and the automaton. Non-binary facts are ignored.
    pub fn evaluate<'a>(&self, facts: impl IntoIterator<Item = &'a Fact>) -> bool {
        if self.source == self.target && self.dfa.accepts_empty() {
            return true;
        }
        let mut out: HashMap<&Constant, Vec<(&str, &Constant)>> = HashMap::new();
        for f in facts {
            if f.args.len() == 2 {
                out.entry(&f.args[0]).or_default().push((f.relation.name(), &f.args[1]));
            }
        }
        let start = (&self.source, self.dfa.initial());
        let mut seen: BTreeSet<(&Constant, usize)> = [start].into_iter().collect();
        let mut stack = vec![start];
        while let Some((node, q)) = stack.pop() {
            if node == &self.target && self.dfa.is_accepting(q) {
                return true;
            }
            for (label, next) in out.get(node).map(Vec::as_slice).unwrap_or(&[]) {
                if let Some(q2) = self.dfa.step(q, label) {
                    if seen.insert((next, q2)) {
                        stack.push((next, q2));
                    }
                }
            }
        }
        false
    }
}

pub fn evaluate_rpq(q: &RegularPathQuery, facts: &[Fact]) -> bool {
    CompiledRpq::new(q).evaluate(facts)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DagCheck {
    /// Nodes in topological order, ties broken lexicographically.
    Order(Vec<Constant>),
    /// A closed walk `v0 -> v1 -> ... -> v0`.
    Cycle(Vec<Constant>),
}

fn require_binary(facts: &[Fact]) -> Result<()> {
    match facts.iter().find(|f| f.args.len() != 2) {
        Some(f) => Err(Error::NonBinary(f.to_string())),
        None => Ok(()),
    }
}

pub fn check_dag(facts: &[Fact]) -> Result<DagCheck> {
    require_binary(facts)?;
    let mut nodes: BTreeSet<&Constant> = BTreeSet::new();
    let mut succ: BTreeMap<&Constant, Vec<&Constant>> = BTreeMap::new();
    let mut indeg: BTreeMap<&Constant, usize> = BTreeMap::new();
    for f in facts {
        let (u, v) = (&f.args[0], &f.args[1]);
        nodes.insert(u);
        nodes.insert(v);
        succ.entry(u).or_default().push(v);
        *indeg.entry(v).or_default() += 1;
    }
    let mut ready: BTreeSet<&Constant> = nodes.iter().copied().filter(|n| !indeg.contains_key(*n)).collect();
    let mut order = Vec::new();
    while let Some(n) = ready.pop_first() {
        order.push(n.clone());
        for &m in succ.get(n).map(Vec::as_slice).unwrap_or(&[]) {
            let d = indeg.get_mut(m).unwrap();
            *d -= 1;
            if *d == 0 {
                ready.insert(m);
            }
        }
    }
    if order.len() == nodes.len() {
        return Ok(DagCheck::Order(order));
    }
    // every leftover node has a leftover predecessor; walk backwards
    let left: BTreeSet<&Constant> = indeg.iter().filter(|(_, d)| **d > 0).map(|(n, _)| *n).collect();
    let mut pred: BTreeMap<&Constant, &Constant> = BTreeMap::new();
    for f in facts {
        let (u, v) = (&f.args[0], &f.args[1]);
        if left.contains(u) && left.contains(v) {
            pred.entry(v).or_insert(u);
        }
    }
    let mut walk = vec![*left.iter().next().unwrap()];
    let mut at: BTreeMap<&Constant, usize> = BTreeMap::new();
    loop {
        let cur = *walk.last().unwrap();
        if let Some(&i) = at.get(cur) {
            let cycle: Vec<Constant> = walk[i..].iter().rev().map(|c| (*c).clone()).collect();
            return Ok(DagCheck::Cycle(cycle));
        }
        at.insert(cur, walk.len() - 1);
        walk.push(pred[cur]);
    }
}

struct Dag<'a> {
    index: HashMap<&'a Constant, usize>,
    edges: Vec<(usize, usize, &'a str)>,
    n: usize,
}

impl<'a> Dag<'a> {
    fn new(facts: &'a [Fact]) -> Result<Self> {
        let order = match check_dag(facts)? {
            DagCheck::Order(o) => o,
            DagCheck::Cycle(c) => return Err(Error::Cyclic(c.iter().map(|c| c.to_string()).collect())),
        };
        let mut index = HashMap::new();
        for f in facts {
            for c in &f.args {
                let pos = order.iter().position(|o| o == c).unwrap();
                index.insert(c, pos);
            }
        }
        let edges = facts
            .iter()
            .map(|f| (index[&f.args[0]], index[&f.args[1]], f.relation.name()))
            .collect();
        Ok(Dag {
            index,
            edges,
            n: order.len(),
        })
    }

    /// sp[k][j * S + q] for paths from (src, p).
    fn forward(&self, dfa: &Dfa, src: usize, p: usize, max_len: usize) -> Result<Vec<Vec<u64>>> {
        let s = dfa.num_states();
        let mut table = vec![vec![0u64; self.n * s]];
        table[0][src * s + p] = 1;
        for k in 1..=max_len {
            let mut next = vec![0u64; self.n * s];
            let prev = &table[k - 1];
            let mut any = false;
            for &(u, v, label) in &self.edges {
                for q in 0..s {
                    let x = prev[u * s + q];
                    if x == 0 {
                        continue;
                    }
                    if let Some(q2) = dfa.step(q, label) {
                        let cell = &mut next[v * s + q2];
                        *cell = cell.checked_add(x).ok_or(Error::Overflow)?;
                        any = true;
                    }
                }
            }
            table.push(next);
            if !any {
                break;
            }
        }
        table.resize(max_len + 1, vec![0u64; self.n * s]);
        Ok(table)
    }

    /// Σ_{qf ∈ F} sp_k^{src,p→dst,qf} for every k.
    fn accepted_lengths(&self, dfa: &Dfa, src: usize, p: usize, dst: usize, max_len: usize) -> Result<Vec<u64>> {
        let s = dfa.num_states();
        let table = self.forward(dfa, src, p, max_len)?;
        table
            .iter()
            .map(|row| {
                (0..s)
                    .filter(|&q| dfa.is_accepting(q))
                    .try_fold(0u64, |acc, q| acc.checked_add(row[dst * s + q]).ok_or(Error::Overflow))
            })
            .collect()
    }
}

/// Accepted source→target path counts by length k = 0..=|facts|.
pub fn paths_by_length(facts: &[Fact], dfa: &Dfa, c: &Constant, d: &Constant) -> Result<Vec<u64>> {
    let dag = Dag::new(facts)?;
    let len = facts.len();
    let mut out = vec![0u64; len + 1];
    if c == d && dfa.accepts_empty() {
        out[0] = 1;
    }
    if let (Some(&ci), Some(&di)) = (dag.index.get(c), dag.index.get(d)) {
        let counts = dag.accepted_lengths(dfa, ci, dfa.initial(), di, len)?;
        out[1..].copy_from_slice(&counts[1..=len]);
    }
    Ok(out)
}

/// Per-length counts of accepted c→d paths that use the edge μ, split
/// around μ = R(s,t):
/// Σ_{k'+k''=k−1} Σ_q Σ_{qf∈F} sp_{k'}^{c,q0→s,q} · sp_{k''}^{t,δ(q,R)→d,qf}.
pub fn paths_through_by_length(
    facts: &[Fact],
    dfa: &Dfa,
    c: &Constant,
    d: &Constant,
    mu: &Fact,
) -> Result<Vec<u64>> {
    require_binary(std::slice::from_ref(mu))?;
    let dag = Dag::new(facts)?;
    let len = facts.len();
    let mut out = vec![0u64; len + 1];
    if !facts.contains(mu) {
        return Ok(out);
    }
    let (Some(&ci), Some(&di)) = (dag.index.get(c), dag.index.get(d)) else {
        return Ok(out);
    };
    let (ms, mt) = (dag.index[&mu.args[0]], dag.index[&mu.args[1]]);
    let s = dfa.num_states();
    let before = dag.forward(dfa, ci, dfa.initial(), len)?;
    let mut after: HashMap<usize, Vec<u64>> = HashMap::new();
    for q in 0..s {
        let Some(q2) = dfa.step(q, mu.relation.name()) else {
            continue;
        };
        if let Entry::Vacant(e) = after.entry(q2) {
            e.insert(dag.accepted_lengths(dfa, mt, q2, di, len)?);
        }
        let tail = &after[&q2];
        for k1 in 0..len {
            let head = before[k1][ms * s + q];
            if head == 0 {
                continue;
            }
            for k2 in 0..len - k1 {
                let x = head.checked_mul(tail[k2]).ok_or(Error::Overflow)?;
                let cell = &mut out[k1 + k2 + 1];
                *cell = cell.checked_add(x).ok_or(Error::Overflow)?;
            }
        }
    }
    Ok(out)
}

pub fn count_paths_through(
    facts: &[Fact],
    dfa: &Dfa,
    c: &Constant,
    d: &Constant,
    mu: &Fact,
    k: usize,
) -> Result<u64> {
    let by_len = paths_through_by_length(facts, dfa, c, d, mu)?;
    Ok(by_len.get(k).copied().unwrap_or(0))
}

/// WSMS of α on an acyclic graph database: every accepted path is a
/// minimal support, so the per-length counts through α give the score.
pub fn wsms_rpq(q: &RegularPathQuery, db: &PartitionedDatabase, alpha: &Fact, w: &WeightFunction) -> Result<Rational> {
    Ok(wsms_rpq_many(q, db, std::slice::from_ref(alpha), w)?.remove(0))
}

pub fn wsms_rpq_many(
    q: &RegularPathQuery,
    db: &PartitionedDatabase,
    alphas: &[Fact],
    w: &WeightFunction,
) -> Result<Vec<Rational>> {
    let facts = db.all_facts();
    require_binary(&facts)?;
    for a in alphas {
        if !db.is_endogenous(a) {
            return Err(Error::NotEndogenous(a.to_string()));
        }
    }
    let rpq = CompiledRpq::new(q);
    let n = facts.len();
    if let DagCheck::Cycle(c) = check_dag(&facts)? {
        return Err(Error::Cyclic(c.iter().map(|c| c.to_string()).collect()));
    }
    if rpq.evaluate(db.exogenous()) {
        return Ok(vec![Rational::zero(); alphas.len()]);
    }
    w.validate(n)?;
    alphas
        .iter()
        .map(|a| {
            let by_len = paths_through_by_length(&facts, &rpq.dfa, &rpq.source, &rpq.target, a)?;
            let mut total = Rational::zero();
            for (k, &cnt) in by_len.iter().enumerate().skip(1) {
                if cnt > 0 {
                    total += w.weight(k, n)? * Rational::from_integer(BigInt::from(cnt));
                }
            }
            Ok(total)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RpqClass {
    TractableFinite,
    TractableTrivial,
    Hard,
}

impl RpqClass {
    pub fn label(&self) -> &'static str {
        match self {
            RpqClass::TractableFinite => "tractable-finite",
            RpqClass::TractableTrivial => "tractable-trivial",
            RpqClass::Hard => "hard",
        }
    }
}

pub fn classify_rpq(q: &RegularPathQuery) -> RpqClass {
    let dfa = compile_regex(&q.regex);
    if dfa.is_finite() {
        RpqClass::TractableFinite
    } else if dfa.accepts_empty() && q.source == q.target {
        RpqClass::TractableTrivial
    } else {
        RpqClass::Hard
    }
}
