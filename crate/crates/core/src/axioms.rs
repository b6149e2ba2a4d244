//! Finite-instance checks of the responsibility axioms.

use crate::error::{Error, Result};
use crate::guard;
use crate::measure::Measure;
use crate::model::{Fact, PartitionedDatabase};
use crate::query::{ExplicitMonotoneQuery, Query};
use crate::rational::Rational;
use crate::supports::{enumerate_minimal_supports, exogenous_satisfies, is_relevant};
use num_traits::{Signed, Zero};
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// the premise of the axiom does not hold on this instance
    NotApplicable,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "n/a",
        }
    }
}

#[derive(Clone, Debug)]
pub struct MstestInstance {
    pub k: usize,
    pub l: usize,
    pub a_sets: Vec<BTreeSet<Fact>>,
    pub b_sets: Vec<BTreeSet<Fact>>,
    pub query: Query,
    pub db: PartitionedDatabase,
    pub alpha: Fact,
    pub beta: Fact,
}

impl MstestInstance {
    /// k > l, or some |A_i| < |B_i|.
    pub fn is_strict(&self) -> bool {
        self.k > self.l || self.a_sets.iter().zip(&self.b_sets).any(|(a, b)| a.len() < b.len())
    }

    pub fn id(&self) -> String {
        let sizes = |v: &[BTreeSet<Fact>]| v.iter().map(|s| s.len().to_string()).collect::<Vec<_>>().join(",");
        format!("mstest(k={},l={},A={},B={})", self.k, self.l, sizes(&self.a_sets), sizes(&self.b_sets))
    }
}

fn unary(name: &str) -> Fact {
    Fact::new("F", &[name]).expect("generated names are identifiers")
}

/// Supports A_1..A_k through α and B_1..B_l through β over unary facts
/// `F(alpha)`, `F(beta)`, `F(a{i}_{t})`, `F(b{j}_{t})`.
pub fn generate_mstest(k: usize, l: usize, a_sizes: &[usize], b_sizes: &[usize]) -> Result<MstestInstance> {
    if a_sizes.len() != k || b_sizes.len() != l {
        return Err(Error::Invalid("one size per set is needed".into()));
    }
    if l == 0 || k < l {
        return Err(Error::Invalid("need k >= l >= 1".into()));
    }
    if a_sizes.iter().chain(b_sizes).any(|&s| s == 0) {
        return Err(Error::Invalid("sets contain at least the distinguished fact".into()));
    }
    if (k > 1 && a_sizes.contains(&1)) || (l > 1 && b_sizes.contains(&1)) {
        return Err(Error::Invalid("a singleton set would swallow its siblings".into()));
    }
    if a_sizes.iter().zip(b_sizes).any(|(a, b)| a > b) {
        return Err(Error::Invalid("need |A_i| <= |B_i| for i <= l".into()));
    }
    let alpha = unary("alpha");
    let beta = unary("beta");
    let build = |sizes: &[usize], head: &Fact, prefix: &str| -> Vec<BTreeSet<Fact>> {
        sizes
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let mut set: BTreeSet<Fact> = (1..s).map(|t| unary(&format!("{prefix}{}_{t}", i + 1))).collect();
                set.insert(head.clone());
                set
            })
            .collect()
    };
    let a_sets = build(a_sizes, &alpha, "a");
    let b_sets = build(b_sizes, &beta, "b");
    let all: BTreeSet<Fact> = a_sets.iter().chain(&b_sets).flatten().cloned().collect();
    let query = Query::Explicit(ExplicitMonotoneQuery::new(a_sets.iter().chain(&b_sets).cloned()));
    Ok(MstestInstance {
        k,
        l,
        a_sets,
        b_sets,
        query,
        db: PartitionedDatabase::endogenous_only(all)?,
        alpha,
        beta,
    })
}

#[derive(Clone, Debug)]
pub struct PairOutcome {
    pub verdict: Verdict,
    pub alpha_score: Rational,
    pub beta_score: Rational,
}

/// φ(α) > φ(β) on strict instances.
pub fn check_mstest(measure: &Measure, inst: &MstestInstance) -> Result<PairOutcome> {
    let scores = measure.score_all(&inst.query, &inst.db)?;
    let (a, b) = (scores[&inst.alpha].clone(), scores[&inst.beta].clone());
    let verdict = if !inst.is_strict() {
        Verdict::NotApplicable
    } else if a > b {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(PairOutcome {
        verdict,
        alpha_score: a,
        beta_score: b,
    })
}

#[derive(Clone, Debug)]
pub struct NullOutcome {
    pub verdict: Verdict,
    /// facts whose score disagrees with their relevance: (fact, score, relevant)
    pub offenders: Vec<(Fact, Rational, bool)>,
}

/// Score 0 exactly on the irrelevant endogenous facts. Not applicable when
/// the exogenous facts alone satisfy q.
pub fn check_null_db(measure: &Measure, q: &Query, db: &PartitionedDatabase) -> Result<NullOutcome> {
    if exogenous_satisfies(q, db) {
        return Ok(NullOutcome {
            verdict: Verdict::NotApplicable,
            offenders: vec![],
        });
    }
    let scores = measure.score_all(q, db)?;
    let mut offenders = Vec::new();
    for (f, s) in scores {
        let relevant = is_relevant(q, db, &f)?;
        if relevant != s.is_positive() || s.is_negative() {
            offenders.push((f, s, relevant));
        }
    }
    Ok(NullOutcome {
        verdict: if offenders.is_empty() { Verdict::Pass } else { Verdict::Fail },
        offenders,
    })
}

fn support_masks(q: &Query, universe: &[Fact]) -> Result<Vec<u64>> {
    Ok(enumerate_minimal_supports(q, universe)?
        .iter()
        .map(|m| {
            m.iter()
                .map(|f| universe.binary_search(f).expect("support inside universe"))
                .fold(0u64, |acc, i| acc | 1 << i)
        })
        .collect())
}

/// Whether S ∪ {α} ⊨ q ⇔ S ∪ {β} ⊨ q for every S ⊆ D ∖ {α, β}.
pub fn swap_equivalent(q: &Query, db: &PartitionedDatabase, alpha: &Fact, beta: &Fact) -> Result<bool> {
    let universe = db.all_facts();
    guard::check("database size for the symmetry check", universe.len(), guard::WSYM_FACTS)?;
    let ia = universe.binary_search(alpha).map_err(|_| Error::Invalid(format!("{alpha} is not in the database")))?;
    let ib = universe.binary_search(beta).map_err(|_| Error::Invalid(format!("{beta} is not in the database")))?;
    let masks = support_masks(q, &universe)?;
    let sat = |t: u64| masks.iter().any(|&m| m & !t == 0);
    let others: u64 = ((1u64 << universe.len()) - 1) & !(1 << ia) & !(1 << ib);
    let mut s = others;
    loop {
        if sat(s | 1 << ia) != sat(s | 1 << ib) {
            return Ok(false);
        }
        if s == 0 {
            return Ok(true);
        }
        s = (s - 1) & others;
    }
}

/// Equal scores for swap-equivalent endogenous facts.
pub fn check_wsym(measure: &Measure, q: &Query, db: &PartitionedDatabase, alpha: &Fact, beta: &Fact) -> Result<PairOutcome> {
    for f in [alpha, beta] {
        if !db.is_endogenous(f) {
            return Err(Error::NotEndogenous(f.to_string()));
        }
    }
    let scores = measure.score_all(q, db)?;
    let (a, b) = (scores[alpha].clone(), scores[beta].clone());
    let verdict = if alpha == beta {
        Verdict::Pass
    } else if !swap_equivalent(q, db, alpha, beta)? {
        Verdict::NotApplicable
    } else if a == b {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(PairOutcome {
        verdict,
        alpha_score: a,
        beta_score: b,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Flavor {
    A,
    B,
    Full,
}

/// Witness of α over β.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominationWitness {
    pub flavor: Flavor,
    /// (S, f(S)): β's completing set and the α completing set it maps to
    pub f: Vec<(BTreeSet<Fact>, BTreeSet<Fact>)>,
    /// η_S : f(S) → S, aligned with `f`
    pub eta_s: Vec<BTreeMap<Fact, Fact>>,
    /// η : D ∖ {α} → D ∖ {β}, for flavors b and full
    pub eta: Option<BTreeMap<Fact, Fact>>,
}

impl DominationWitness {
    pub fn strict_eta_s(&self) -> bool {
        self.f.iter().zip(&self.eta_s).any(|((s, _), m)| m.len() < s.len())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessCheck {
    Valid,
    Invalid(&'static str),
}

pub fn completing_sets(q: &Query, db: &PartitionedDatabase, fact: &Fact) -> Result<Vec<BTreeSet<Fact>>> {
    let all = db.all_facts();
    Ok(enumerate_minimal_supports(q, &all)?
        .into_iter()
        .filter(|m| m.contains(fact))
        .map(|mut m| {
            m.remove(fact);
            m
        })
        .collect())
}

struct Context {
    universe: Vec<Fact>,
    supports: Vec<BTreeSet<Fact>>,
    cs_alpha: Vec<BTreeSet<Fact>>,
    cs_beta: Vec<BTreeSet<Fact>>,
}

impl Context {
    fn new(q: &Query, db: &PartitionedDatabase, alpha: &Fact, beta: &Fact) -> Result<Self> {
        let universe = db.all_facts();
        for f in [alpha, beta] {
            if !db.contains(f) {
                return Err(Error::Invalid(format!("{f} is not in the database")));
            }
        }
        Ok(Context {
            supports: enumerate_minimal_supports(q, &universe)?,
            cs_alpha: completing_sets(q, db, alpha)?,
            cs_beta: completing_sets(q, db, beta)?,
            universe,
        })
    }

    fn contains_support(&self, x: &BTreeSet<Fact>) -> bool {
        self.supports.iter().any(|m| m.is_subset(x))
    }

    /// η(M) holds a minimal support for every minimal support M avoiding α.
    fn preserves_supports(&self, alpha: &Fact, eta: &BTreeMap<Fact, Fact>) -> bool {
        self.supports
            .iter()
            .filter(|m| !m.contains(alpha))
            .all(|m| self.contains_support(&m.iter().map(|g| eta[g].clone()).collect()))
    }
}

pub fn verify_domination_witness(
    w: &DominationWitness,
    q: &Query,
    db: &PartitionedDatabase,
    alpha: &Fact,
    beta: &Fact,
) -> Result<WitnessCheck> {
    let ctx = Context::new(q, db, alpha, beta)?;
    use WitnessCheck::Invalid;
    if w.f.len() != w.eta_s.len() {
        return Ok(Invalid("one eta_S per completing set"));
    }
    let domain: BTreeSet<&BTreeSet<Fact>> = w.f.iter().map(|(s, _)| s).collect();
    let expected: BTreeSet<&BTreeSet<Fact>> = ctx.cs_beta.iter().collect();
    if domain != expected || domain.len() != w.f.len() {
        return Ok(Invalid("f is not defined exactly on the completing sets of beta"));
    }
    if w.f.iter().any(|(_, t)| !ctx.cs_alpha.contains(t)) {
        return Ok(Invalid("f leaves the completing sets of alpha"));
    }
    let image: BTreeSet<&BTreeSet<Fact>> = w.f.iter().map(|(_, t)| t).collect();
    if image.len() != w.f.len() {
        return Ok(Invalid("f is not injective"));
    }
    for ((s, t), m) in w.f.iter().zip(&w.eta_s) {
        let keys: BTreeSet<&Fact> = m.keys().collect();
        if keys != t.iter().collect() {
            return Ok(Invalid("eta_S is not defined exactly on f(S)"));
        }
        let vals: BTreeSet<&Fact> = m.values().collect();
        if vals.len() != m.len() || vals.iter().any(|v| !s.contains(*v)) {
            return Ok(Invalid("eta_S is not an injection into S"));
        }
    }
    if w.flavor == Flavor::A {
        return Ok(WitnessCheck::Valid);
    }
    let Some(eta) = &w.eta else {
        return Ok(Invalid("eta is missing"));
    };
    let from: BTreeSet<&Fact> = ctx.universe.iter().filter(|f| *f != alpha).collect();
    let to: BTreeSet<&Fact> = ctx.universe.iter().filter(|f| *f != beta).collect();
    let vals: BTreeSet<&Fact> = eta.values().collect();
    if eta.keys().collect::<BTreeSet<_>>() != from || vals != to || vals.len() != eta.len() {
        return Ok(Invalid("eta is not a bijection from D minus alpha onto D minus beta"));
    }
    if w.eta_s.iter().flatten().any(|(g, v)| eta.get(g) != Some(v)) {
        return Ok(Invalid("eta disagrees with some eta_S"));
    }
    if w.flavor == Flavor::Full && !ctx.preserves_supports(alpha, eta) {
        return Ok(Invalid("eta maps a set containing a minimal support to one without"));
    }
    Ok(WitnessCheck::Valid)
}

/// Injections of `from` into `into`, in lexicographic order of the images.
fn injections<T: Clone + Ord>(from: &[T], into: &[T], f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn go(n: usize, m: usize, cur: &mut Vec<usize>, used: &mut Vec<bool>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == n {
            return f(cur);
        }
        for j in 0..m {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                if go(n, m, cur, used, f) {
                    return true;
                }
                cur.pop();
                used[j] = false;
            }
        }
        false
    }
    if from.len() > into.len() {
        return false;
    }
    go(from.len(), into.len(), &mut Vec::new(), &mut vec![false; into.len()], f)
}

/// First witness found in lexicographic order, if any.
pub fn search_domination_witness(
    q: &Query,
    db: &PartitionedDatabase,
    alpha: &Fact,
    beta: &Fact,
    flavor: Flavor,
) -> Result<Option<DominationWitness>> {
    let ctx = Context::new(q, db, alpha, beta)?;
    guard::check("database size for witness search", ctx.universe.len(), guard::WITNESS_FACTS)?;
    guard::check("completing sets per fact", ctx.cs_alpha.len().max(ctx.cs_beta.len()), guard::COMPLETING_SETS)?;
    let mut found = None;
    injections(&ctx.cs_beta, &ctx.cs_alpha, &mut |fi| {
        let pairs: Vec<(BTreeSet<Fact>, BTreeSet<Fact>)> = fi
            .iter()
            .enumerate()
            .map(|(i, &j)| (ctx.cs_beta[i].clone(), ctx.cs_alpha[j].clone()))
            .collect();
        let mut etas: Vec<BTreeMap<Fact, Fact>> = Vec::new();
        found = eta_search(&ctx, alpha, beta, flavor, &pairs, &mut etas, &mut BTreeMap::new());
        found.is_some()
    });
    Ok(found)
}

fn eta_search(
    ctx: &Context,
    alpha: &Fact,
    beta: &Fact,
    flavor: Flavor,
    pairs: &[(BTreeSet<Fact>, BTreeSet<Fact>)],
    etas: &mut Vec<BTreeMap<Fact, Fact>>,
    partial: &mut BTreeMap<Fact, Fact>,
) -> Option<DominationWitness> {
    let i = etas.len();
    if i == pairs.len() {
        let eta = match flavor {
            Flavor::A => None,
            _ => Some(complete_eta(ctx, alpha, beta, flavor, partial)?),
        };
        return Some(DominationWitness {
            flavor,
            f: pairs.to_vec(),
            eta_s: etas.clone(),
            eta,
        });
    }
    let (s, t) = &pairs[i];
    let from: Vec<Fact> = t.iter().cloned().collect();
    let into: Vec<Fact> = s.iter().cloned().collect();
    let mut result = None;
    injections(&from, &into, &mut |img| {
        let m: BTreeMap<Fact, Fact> = from.iter().cloned().zip(img.iter().map(|&j| into[j].clone())).collect();
        let mut added = Vec::new();
        if flavor != Flavor::A {
            for (g, v) in &m {
                match partial.get(g) {
                    Some(p) if p != v => {
                        for a in &added {
                            partial.remove(a);
                        }
                        return false;
                    }
                    Some(_) => {}
                    None => {
                        if partial.values().any(|x| x == v) {
                            for a in &added {
                                partial.remove(a);
                            }
                            return false;
                        }
                        partial.insert(g.clone(), v.clone());
                        added.push(g.clone());
                    }
                }
            }
        }
        etas.push(m);
        result = eta_search(ctx, alpha, beta, flavor, pairs, etas, partial);
        etas.pop();
        for a in &added {
            partial.remove(a);
        }
        result.is_some()
    });
    result
}

/// Extends the agreed partial map to a bijection D∖{α} → D∖{β}; for the full
/// flavor the extension must also preserve supports.
fn complete_eta(
    ctx: &Context,
    alpha: &Fact,
    beta: &Fact,
    flavor: Flavor,
    partial: &BTreeMap<Fact, Fact>,
) -> Option<BTreeMap<Fact, Fact>> {
    let used: BTreeSet<&Fact> = partial.values().collect();
    let free_from: Vec<Fact> = ctx
        .universe
        .iter()
        .filter(|f| *f != alpha && !partial.contains_key(*f))
        .cloned()
        .collect();
    let free_to: Vec<Fact> = ctx
        .universe
        .iter()
        .filter(|f| *f != beta && !used.contains(f))
        .cloned()
        .collect();
    if flavor == Flavor::Full && guard::check("free elements of eta", free_from.len(), 8).is_err() {
        return None;
    }
    let mut result = None;
    injections(&free_from, &free_to, &mut |img| {
        let mut eta = partial.clone();
        for (g, &j) in free_from.iter().zip(img) {
            eta.insert(g.clone(), free_to[j].clone());
        }
        if flavor == Flavor::B || ctx.preserves_supports(alpha, &eta) {
            result = Some(eta);
            true
        } else {
            false
        }
    });
    result
}

/// The witness that swaps α with β and each A_i element with its partner in B_i.
pub fn canonical_witness(inst: &MstestInstance) -> DominationWitness {
    let mut f = Vec::new();
    let mut eta_s = Vec::new();
    let mut eta: BTreeMap<Fact, Fact> = BTreeMap::new();
    for (a, b) in inst.a_sets.iter().zip(&inst.b_sets) {
        let mut av: BTreeSet<Fact> = a.clone();
        av.remove(&inst.alpha);
        let mut bv: BTreeSet<Fact> = b.clone();
        bv.remove(&inst.beta);
        let m: BTreeMap<Fact, Fact> = av.iter().cloned().zip(bv.iter().cloned()).collect();
        for (g, v) in &m {
            eta.insert(g.clone(), v.clone());
            eta.insert(v.clone(), g.clone());
        }
        f.push((bv, av));
        eta_s.push(m);
    }
    eta.insert(inst.beta.clone(), inst.alpha.clone());
    for g in inst.db.all_facts() {
        if g != inst.alpha && !eta.contains_key(&g) {
            eta.insert(g.clone(), g);
        }
    }
    DominationWitness {
        flavor: Flavor::Full,
        f,
        eta_s,
        eta: Some(eta),
    }
}

/// For a full witness of α over β with a non-surjective η_S or f, the measure
/// must rank α strictly above β. Sound but incomplete: only the witness
/// supplied is inspected.
pub fn check_fms(
    measure: &Measure,
    q: &Query,
    db: &PartitionedDatabase,
    alpha: &Fact,
    beta: &Fact,
    witness: &DominationWitness,
) -> Result<PairOutcome> {
    let scores = measure.score_all(q, db)?;
    let zero = Rational::zero();
    let a = scores.get(alpha).unwrap_or(&zero).clone();
    let b = scores.get(beta).unwrap_or(&zero).clone();
    let cs_alpha = completing_sets(q, db, alpha)?.len();
    let strict = witness.strict_eta_s() || witness.f.len() < cs_alpha;
    let valid = witness.flavor == Flavor::Full
        && verify_domination_witness(witness, q, db, alpha, beta)? == WitnessCheck::Valid;
    let verdict = if !valid || !strict {
        Verdict::NotApplicable
    } else if a > b {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(PairOutcome {
        verdict,
        alpha_score: a,
        beta_score: b,
    })
}

/// The pathological instance for SA-Shapley: q = R(x0,x1),R(x1,x2),R(x2,x3)
/// over α_i = R(a_i,a_i), β_i = R(a_i,b) and the irrelevant γ = R(b,c).
#[derive(Clone, Debug)]
pub struct SashInstance {
    pub query: Query,
    pub db: PartitionedDatabase,
    pub alphas: Vec<Fact>,
    pub betas: Vec<Fact>,
    pub gamma: Fact,
}

pub fn generate_sash(k: usize) -> Result<SashInstance> {
    if k == 0 {
        return Err(Error::Invalid("sash needs k >= 1".into()));
    }
    let query = crate::query::parse_query("q :- R(x0,x1), R(x1,x2), R(x2,x3).")?;
    let r = |a: &str, b: &str| Fact::new("R", &[a, b]).expect("identifiers");
    let names: Vec<String> = (1..=k).map(|i| format!("a{i}")).collect();
    let alphas: Vec<Fact> = names.iter().map(|a| r(a, a)).collect();
    let betas: Vec<Fact> = names.iter().map(|a| r(a, "b")).collect();
    let gamma = r("b", "c");
    let db = PartitionedDatabase::endogenous_only(alphas.iter().chain(&betas).cloned().chain([gamma.clone()]))?;
    Ok(SashInstance {
        query,
        db,
        alphas,
        betas,
        gamma,
    })
}

/// Adds the image of every generator under the swap α ↔ β, making the two
/// facts swap-equivalent.
pub fn symmetric_closure(q: &ExplicitMonotoneQuery, alpha: &Fact, beta: &Fact) -> ExplicitMonotoneQuery {
    let swap = |f: &Fact| {
        if f == alpha {
            beta.clone()
        } else if f == beta {
            alpha.clone()
        } else {
            f.clone()
        }
    };
    let gens = q.generators().iter().flat_map(|g| [g.clone(), g.iter().map(swap).collect()]);
    ExplicitMonotoneQuery::new(gens.collect::<Vec<_>>())
}

/// A strict MStest instance with at most `max_facts` facts.
pub fn random_mstest(rng: &mut impl Rng, max_facts: usize) -> MstestInstance {
    loop {
        let k = rng.gen_range(1..=3);
        let l = rng.gen_range(1..=k);
        let lo_a = if k > 1 { 2 } else { 1 };
        let a: Vec<usize> = (0..k).map(|_| rng.gen_range(lo_a..=3)).collect();
        let b: Vec<usize> = (0..l)
            .map(|i| {
                let lo = if l > 1 { a[i].max(2) } else { a[i] };
                rng.gen_range(lo..=lo + 1)
            })
            .collect();
        let total = 2 + a.iter().chain(&b).map(|s| s - 1).sum::<usize>();
        if total > max_facts {
            continue;
        }
        if let Ok(inst) = generate_mstest(k, l, &a, &b) {
            if inst.is_strict() {
                return inst;
            }
        }
    }
}

/// One line of the axiom report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportRow {
    pub axiom: &'static str,
    pub instance: String,
    pub measure: String,
    /// pass, fail, n/a, or undefined when the measure rejects the instance
    pub verdict: &'static str,
    pub alpha_score: Option<Rational>,
    pub beta_score: Option<Rational>,
}

pub const REPORT_COLUMNS: [&str; 6] = ["axiom", "instance", "measure", "verdict", "alpha_score", "beta_score"];

fn row(axiom: &'static str, instance: &str, measure: &Measure, out: Result<PairOutcome>) -> Result<ReportRow> {
    let (verdict, a, b) = match out {
        Ok(o) => (o.verdict.label(), Some(o.alpha_score), Some(o.beta_score)),
        Err(e) if undefined(&e) => ("undefined", None, None),
        Err(e) => return Err(e),
    };
    Ok(ReportRow {
        axiom,
        instance: instance.to_string(),
        measure: measure.name(),
        verdict,
        alpha_score: a,
        beta_score: b,
    })
}

fn undefined(e: &Error) -> bool {
    matches!(
        e,
        Error::ExogenousPresent(_) | Error::ExogenousSatisfies(_) | Error::Unsupported(_)
    )
}

/// Runs every check over seeded instances. `instances` bounds the random
/// instances drawn per axiom.
pub fn run_report(measures: &[Measure], seed: u64, instances: usize) -> Result<Vec<ReportRow>> {
    let mut rng = crate::testgen::rng(seed);
    let mut rows = Vec::new();
    let mstests: Vec<MstestInstance> = (0..instances).map(|_| random_mstest(&mut rng, 10)).collect();
    for inst in &mstests {
        for m in measures {
            rows.push(row("mstest", &inst.id(), m, check_mstest(m, inst))?);
        }
    }
    for inst in &mstests {
        let w = search_domination_witness(&inst.query, &inst.db, &inst.alpha, &inst.beta, Flavor::Full)?;
        let Some(w) = w else { continue };
        for m in measures {
            let out = check_fms(m, &inst.query, &inst.db, &inst.alpha, &inst.beta, &w);
            rows.push(row("fms", &format!("{} (found witness only)", inst.id()), m, out)?);
        }
    }
    for k in 1..=3 {
        let s = generate_sash(k)?;
        for m in measures {
            let out = check_null_db(m, &s.query, &s.db).and_then(|o| {
                Ok(PairOutcome {
                    verdict: o.verdict,
                    alpha_score: m.score(&s.query, &s.db, &s.gamma)?,
                    beta_score: Rational::zero(),
                })
            });
            rows.push(row("null-db", &format!("sash(k={k}) gamma"), m, out)?);
        }
    }
    let shape = crate::testgen::Shape::default();
    let dom = crate::testgen::domain(3);
    for i in 0..instances {
        let q = Query::Cq(crate::testgen::random_cq(&mut rng, &shape));
        let db = crate::testgen::random_database(&mut rng, &shape, &dom, 8, 0.2);
        for m in measures {
            let out = check_null_db(m, &q, &db).map(|o| PairOutcome {
                verdict: o.verdict,
                alpha_score: Rational::from_integer(o.offenders.len().into()),
                beta_score: Rational::zero(),
            });
            rows.push(row("null-db", &format!("random-cq#{i} (alpha column: offenders)"), m, out)?);
        }
    }
    for i in 0..instances {
        let facts: Vec<Fact> = (0..rng.gen_range(3..=7)).map(|j| unary(&format!("t{j}"))).collect();
        let gens = rng.gen_range(1..=4);
        let base = crate::testgen::random_explicit(&mut rng, &facts, gens, 3);
        let (alpha, beta) = (facts[0].clone(), facts[1].clone());
        let q = Query::Explicit(symmetric_closure(&base, &alpha, &beta));
        let db = PartitionedDatabase::endogenous_only(facts)?;
        for m in measures {
            rows.push(row("wsym", &format!("twins#{i}"), m, check_wsym(m, &q, &db, &alpha, &beta))?);
        }
    }
    Ok(rows)
}

pub fn report_tsv(rows: &[ReportRow]) -> String {
    let cell = |r: &Option<Rational>| r.as_ref().map_or("-".to_string(), crate::rational::exact);
    let mut out = REPORT_COLUMNS.join("\t");
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            r.axiom,
            r.instance,
            r.measure,
            r.verdict,
            cell(&r.alpha_score),
            cell(&r.beta_score)
        ));
    }
    out
}
