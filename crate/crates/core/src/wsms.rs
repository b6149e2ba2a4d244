//! Weighted sums of minimal supports.

use crate::error::{Error, Result};
use crate::model::{Fact, PartitionedDatabase};
use crate::query::Query;
use crate::rational::{int, parse_rational, pow2_neg, Rational};
use crate::shapley::{CoefficientSpec, WealthSpec};
use crate::supports::{exogenous_satisfies, minimal_support_ids, FmsCounter, FmsVector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightFunction {
    /// 1/k
    InvW,
    /// 2^(-k n)
    S,
    /// 1 + 2^(-k n)
    Sharp,
    Custom(BTreeMap<(usize, usize), Rational>),
}

impl WeightFunction {
    pub fn weight(&self, k: usize, n: usize) -> Result<Rational> {
        if k == 0 {
            return Err(Error::MissingWeight { k, n });
        }
        Ok(match self {
            WeightFunction::InvW => Rational::new(BigInt::one(), BigInt::from(k)),
            WeightFunction::S => pow2_neg(k * n),
            WeightFunction::Sharp => int(1) + pow2_neg(k * n),
            WeightFunction::Custom(t) => t.get(&(k, n)).cloned().ok_or(Error::MissingWeight { k, n })?,
        })
    }

    /// Every weight needed for a database of size `n` must exist.
    pub fn validate(&self, n: usize) -> Result<()> {
        if let WeightFunction::Custom(t) = self {
            for m in 1..=n {
                for k in 1..=m {
                    match t.get(&(k, m)) {
                        None => return Err(Error::MissingWeight { k, n: m }),
                        Some(v) if !v.is_positive() => {
                            return Err(Error::Invalid(format!("weight w({k},{m}) is not positive")))
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok(())
    }

    /// Parses `{"k,n": "num/den", ...}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Malformed(format!("weight table: {e}")))?;
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Malformed("weight table must be a JSON object".into()))?;
        let mut t = BTreeMap::new();
        for (key, val) in obj {
            let (k, n) = key
                .split_once(',')
                .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                .ok_or_else(|| Error::Malformed(format!("bad weight key {key:?}")))?;
            let r = match val {
                serde_json::Value::String(s) => parse_rational(s)?,
                serde_json::Value::Number(x) => parse_rational(&x.to_string())?,
                _ => return Err(Error::Malformed(format!("bad weight value for {key:?}"))),
            };
            t.insert((k, n), r);
        }
        Ok(WeightFunction::Custom(t))
    }

    pub fn name(&self) -> &'static str {
        match self {
            WeightFunction::InvW => "ms",
            WeightFunction::S => "s",
            WeightFunction::Sharp => "sharp",
            WeightFunction::Custom(_) => "wsms-custom",
        }
    }
}

fn db_total(db: &PartitionedDatabase) -> usize {
    db.endogenous().len() + db.exogenous().len()
}

fn check_endogenous(db: &PartitionedDatabase, alpha: &Fact) -> Result<()> {
    if db.is_endogenous(alpha) {
        Ok(())
    } else {
        Err(Error::NotEndogenous(alpha.to_string()))
    }
}

/// Σ over minimal supports M ∋ α of w(|M|, |D|), or 0 when Dx ⊨ q.
pub fn wsms_direct(q: &Query, db: &PartitionedDatabase, alpha: &Fact, w: &WeightFunction) -> Result<Rational> {
    check_endogenous(db, alpha)?;
    let n = db_total(db);
    w.validate(n)?;
    if exogenous_satisfies(q, db) {
        return Ok(Rational::zero());
    }
    let universe = db.all_facts();
    let i = universe.binary_search(alpha).expect("endogenous fact is present");
    let mut total = Rational::zero();
    for m in minimal_support_ids(q, &universe)? {
        if m.contains(&i) {
            total += w.weight(m.len(), n)?;
        }
    }
    Ok(total)
}

/// Σ_k (countFMS(k, D) − countFMS(k, D \ {α})) · w(k, |D|).
pub fn wsms_via_countfms(
    q: &Query,
    db: &PartitionedDatabase,
    alpha: &Fact,
    w: &WeightFunction,
    counter: &dyn FmsCounter,
) -> Result<Rational> {
    check_endogenous(db, alpha)?;
    let n = db_total(db);
    w.validate(n)?;
    if exogenous_satisfies(q, db) {
        return Ok(Rational::zero());
    }
    let all = db.all_facts();
    let without: Vec<Fact> = all.iter().filter(|f| *f != alpha).cloned().collect();
    let full = counter.fms(q, &all)?;
    let rest = counter.fms(q, &without)?;
    combine(&full, &rest, w, n)
}

fn combine(full: &FmsVector, rest: &FmsVector, w: &WeightFunction, n: usize) -> Result<Rational> {
    let mut total = Rational::zero();
    for k in 1..full.counts.len() {
        let diff = full.get(k) as i128 - rest.get(k) as i128;
        if diff < 0 {
            return Err(Error::Invalid(format!("countFMS({k}) grew after removing a fact")));
        }
        if diff > 0 {
            total += w.weight(k, n)? * Rational::from_integer(BigInt::from(diff));
        }
    }
    Ok(total)
}

/// Scores of every endogenous fact from one pass over the minimal supports.
pub fn score_all(q: &Query, db: &PartitionedDatabase, w: &WeightFunction) -> Result<BTreeMap<Fact, Rational>> {
    let n = db_total(db);
    w.validate(n)?;
    let mut out: BTreeMap<Fact, Rational> = db.endogenous().iter().map(|f| (f.clone(), Rational::zero())).collect();
    if out.is_empty() || exogenous_satisfies(q, db) {
        return Ok(out);
    }
    let universe = db.all_facts();
    let supports = minimal_support_ids(q, &universe)?;
    let endo: Vec<bool> = universe.iter().map(|f| db.is_endogenous(f)).collect();
    let partial: Vec<Vec<(usize, Rational)>> = supports
        .par_iter()
        .map(|m| {
            let wt = w.weight(m.len(), n)?;
            Ok(m.iter().filter(|&&i| endo[i]).map(|&i| (i, wt.clone())).collect())
        })
        .collect::<Result<_>>()?;
    for (i, wt) in partial.into_iter().flatten() {
        *out.get_mut(&universe[i]).unwrap() += wt;
    }
    Ok(out)
}

/// Scores of every endogenous fact through a countFMS oracle, one removal per fact.
pub fn score_all_via_countfms(
    q: &Query,
    db: &PartitionedDatabase,
    w: &WeightFunction,
    counter: &dyn FmsCounter,
) -> Result<BTreeMap<Fact, Rational>> {
    let n = db_total(db);
    w.validate(n)?;
    if exogenous_satisfies(q, db) {
        return Ok(db.endogenous().iter().map(|f| (f.clone(), Rational::zero())).collect());
    }
    let all = db.all_facts();
    let full = counter.fms(q, &all)?;
    db.endogenous()
        .par_iter()
        .map(|alpha| {
            let without: Vec<Fact> = all.iter().filter(|f| *f != alpha).cloned().collect();
            let rest = counter.fms(q, &without)?;
            Ok((alpha.clone(), combine(&full, &rest, w, n)?))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightKind {
    Ms,
    S,
    Sharp,
}

/// Per-size counts read off S-weight scores (or the fractional part of
/// #-weight scores). Assumes every fact is endogenous.
pub fn decode_size_counts(scores: &BTreeMap<Fact, Rational>, kind: WeightKind, db_size: usize) -> Result<FmsVector> {
    let n = db_size;
    let scale = BigInt::one() << (n * n);
    let mask = (BigInt::one() << n) - BigInt::one();
    let mut weighted = vec![BigInt::zero(); n + 1];
    let mut floors = BigInt::zero();
    for (f, s) in scores {
        let frac = match kind {
            WeightKind::S => s.clone(),
            WeightKind::Sharp => {
                let fl = s.floor();
                floors += fl.to_integer();
                s - fl
            }
            WeightKind::Ms => return Err(Error::Unsupported("per-size decoding needs the s or sharp weight".into())),
        };
        let scaled = frac * Rational::from_integer(scale.clone());
        if !scaled.is_integer() || scaled.is_negative() || scaled.to_integer() >= scale {
            return Err(Error::Malformed(format!("score of {f} does not fit the bit fields")));
        }
        let bits = scaled.to_integer();
        for (k, w) in weighted.iter_mut().enumerate().skip(1) {
            *w += (&bits >> (n * (n - k))) & &mask;
        }
    }
    let mut out = FmsVector::zeros(n);
    let mut containment = BigInt::zero();
    for (k, wk) in weighted.iter().enumerate().skip(1) {
        let (c, r) = wk.div_rem(&BigInt::from(k));
        if !r.is_zero() {
            return Err(Error::Malformed(format!("size-{k} memberships are not a multiple of {k}")));
        }
        containment += wk;
        out.counts[k] = c.to_u64().ok_or(Error::Overflow)?;
    }
    if kind == WeightKind::Sharp && floors != containment {
        return Err(Error::Malformed("integer parts disagree with the bit fields".into()));
    }
    Ok(out)
}

/// countMS recovered from the scores of one reversible weight kind.
/// Assumes every fact is endogenous.
pub fn decode_reversible(scores: &BTreeMap<Fact, Rational>, kind: WeightKind, db_size: usize) -> Result<u64> {
    match kind {
        WeightKind::Ms => {
            let total: Rational = scores.values().sum();
            if !total.is_integer() || total.is_negative() {
                return Err(Error::Malformed(format!("score sum {total} is not a count")));
            }
            total.to_integer().to_u64().ok_or(Error::Overflow)
        }
        _ => Ok(decode_size_counts(scores, kind, db_size)?.total()),
    }
}

/// A wealth function whose Shapley-like score under `coeff` equals the
/// WSMS score under `w`.
pub fn zeta_wealth(q: &Query, db: &PartitionedDatabase, w: &WeightFunction, coeff: &CoefficientSpec) -> Result<WealthSpec> {
    let n = db_total(db);
    w.validate(n)?;
    let players: Vec<Fact> = db.endogenous().iter().cloned().collect();
    let m = players.len();
    crate::guard::check("endogenous facts for brute-force scoring", m, crate::guard::BRUTE_FACTS)?;
    for j in 0..m {
        coeff.validate(j, m)?;
    }
    let mut gammas: Vec<(u64, Rational)> = Vec::new();
    if !exogenous_satisfies(q, db) {
        let universe = db.all_facts();
        let pos: Vec<Option<usize>> = universe.iter().map(|f| players.binary_search(f).ok()).collect();
        for s in minimal_support_ids(q, &universe)? {
            let mn: u64 = s.iter().filter_map(|&i| pos[i]).fold(0, |acc, b| acc | 1 << b);
            let size_n = mn.count_ones() as usize;
            let mut denom = Rational::zero();
            for k in size_n - 1..m {
                let b = crate::rational::binomial(m - size_n, k + 1 - size_n);
                denom += Rational::from_integer(b) * coeff.coefficient(k, m)?;
            }
            gammas.push((mn, w.weight(s.len(), n)? / denom));
        }
    }
    let gammas = Arc::new(gammas);
    WealthSpec::explicit(
        players,
        Arc::new(move |s: u64| gammas.iter().filter(|(mn, _)| mn & !s == 0).map(|(_, g)| g).sum()),
    )
}
