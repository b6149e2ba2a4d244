//! Brute-force Shapley-like scores over the endogenous facts.

use crate::error::{Error, Result};
use crate::guard;
use crate::model::{Fact, PartitionedDatabase};
use crate::query::{FactIndex, Query};
use crate::rational::{factorial, Rational};
use crate::supports::minimal_support_ids;
use crate::util::next_permutation;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoefficientSpec {
    /// j!(m−j−1)!/m!
    Shapley,
    /// 1
    Banzhaf,
    Custom(BTreeMap<(usize, usize), Rational>),
}

impl CoefficientSpec {
    pub fn coefficient(&self, j: usize, m: usize) -> Result<Rational> {
        match self {
            CoefficientSpec::Shapley => {
                if j >= m {
                    return Err(Error::BadCoefficient { j, m });
                }
                Ok(Rational::new(factorial(j) * factorial(m - j - 1), factorial(m)))
            }
            CoefficientSpec::Banzhaf => Ok(Rational::one()),
            CoefficientSpec::Custom(t) => t.get(&(j, m)).cloned().ok_or(Error::BadCoefficient { j, m }),
        }
    }

    pub fn validate(&self, j: usize, m: usize) -> Result<()> {
        if self.coefficient(j, m)?.is_positive() {
            Ok(())
        } else {
            Err(Error::BadCoefficient { j, m })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WealthKind {
    Drastic,
    Ms,
    Sa,
    P,
    Mc,
    R,
}

impl WealthKind {
    pub fn name(&self) -> &'static str {
        match self {
            WealthKind::Drastic => "drastic",
            WealthKind::Ms => "ms",
            WealthKind::Sa => "sa",
            WealthKind::P => "p",
            WealthKind::Mc => "mc",
            WealthKind::R => "r",
        }
    }
}

pub type WealthFn = Arc<dyn Fn(u64) -> Rational + Send + Sync>;

#[derive(Clone)]
enum Backing {
    Query {
        kind: WealthKind,
        /// minimal supports restricted to Dn, with their full sizes
        supports: Vec<(u64, usize)>,
        /// homomorphism images restricted to Dn
        homs: Vec<u64>,
        /// singletons satisfying q
        singles: u64,
        dx_sat: bool,
    },
    Explicit(WealthFn),
}

/// A wealth function over subsets of the endogenous facts; bit i of a mask is
/// `players()[i]`.
#[derive(Clone)]
pub struct WealthSpec {
    players: Vec<Fact>,
    backing: Backing,
}

impl fmt::Debug for WealthSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.backing {
            Backing::Query { kind, .. } => kind.name(),
            Backing::Explicit(_) => "explicit",
        };
        f.debug_struct("WealthSpec")
            .field("kind", &kind)
            .field("players", &self.players)
            .finish()
    }
}

fn endo_mask(ids: &[usize], pos: &[Option<usize>]) -> u64 {
    ids.iter().filter_map(|&i| pos[i]).fold(0, |acc, b| acc | 1 << b)
}

impl WealthSpec {
    pub fn new(kind: WealthKind, q: &Query, db: &PartitionedDatabase) -> Result<Self> {
        let players: Vec<Fact> = db.endogenous().iter().cloned().collect();
        guard::check_mask("endogenous facts", players.len())?;
        let universe = db.all_facts();
        let pos: Vec<Option<usize>> = universe.iter().map(|f| players.binary_search(f).ok()).collect();
        let ids = minimal_support_ids(q, &universe)?;
        let supports: Vec<(u64, usize)> = ids.iter().map(|m| (endo_mask(m, &pos), m.len())).collect();
        let dx_sat = supports.iter().any(|&(m, _)| m == 0);
        match kind {
            WealthKind::P | WealthKind::Mc if !db.exogenous().is_empty() => {
                return Err(Error::ExogenousPresent(kind.name()))
            }
            WealthKind::R if dx_sat => return Err(Error::ExogenousSatisfies(kind.name())),
            _ => {}
        }
        let mut homs = Vec::new();
        if kind == WealthKind::Sa {
            let ds = q
                .disjuncts()
                .ok_or_else(|| Error::Unsupported("sa wealth needs a conjunctive query or a union of them".into()))?;
            let index = FactIndex::new(&universe);
            for d in ds {
                homs.extend(crate::query::images_in_index(d, &index).iter().map(|m| endo_mask(m, &pos)));
            }
        }
        let singles = supports
            .iter()
            .filter(|&&(m, size)| size == 1 && m != 0)
            .fold(0, |acc, &(m, _)| acc | m);
        let spec = WealthSpec {
            players,
            backing: Backing::Query {
                kind,
                supports,
                homs,
                singles,
                dx_sat,
            },
        };
        spec.check_empty()?;
        Ok(spec)
    }

    pub fn explicit(players: Vec<Fact>, f: WealthFn) -> Result<Self> {
        let mut sorted = players.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != players.len() {
            return Err(Error::Invalid("duplicate players".into()));
        }
        guard::check_mask("players", players.len())?;
        let spec = WealthSpec {
            players: sorted,
            backing: Backing::Explicit(f),
        };
        spec.check_empty()?;
        Ok(spec)
    }

    /// Explicit wealth from a table over player subsets; absent subsets are worth 0.
    pub fn from_table(players: Vec<Fact>, table: &[(BTreeSet<Fact>, Rational)]) -> Result<Self> {
        let mut sorted = players;
        sorted.sort();
        sorted.dedup();
        let mut values: BTreeMap<u64, Rational> = BTreeMap::new();
        for (set, v) in table {
            let mut mask = 0u64;
            for f in set {
                let i = sorted
                    .binary_search(f)
                    .map_err(|_| Error::Invalid(format!("{f} is not a player")))?;
                mask |= 1 << i;
            }
            if values.insert(mask, v.clone()).is_some() {
                return Err(Error::Invalid("a subset appears twice in the wealth table".into()));
            }
        }
        let values = Arc::new(values);
        Self::explicit(sorted, Arc::new(move |s| values.get(&s).cloned().unwrap_or_else(Rational::zero)))
    }

    fn check_empty(&self) -> Result<()> {
        let w0 = self.wealth_mask(0)?;
        if w0.is_zero() {
            Ok(())
        } else {
            Err(Error::Invalid(format!("wealth of the empty set is {w0}, not 0")))
        }
    }

    pub fn players(&self) -> &[Fact] {
        &self.players
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.backing {
            Backing::Query { kind, .. } => kind.name(),
            Backing::Explicit(_) => "explicit",
        }
    }

    pub fn mask_of(&self, s: &BTreeSet<Fact>) -> Result<u64> {
        let mut mask = 0u64;
        for f in s {
            let i = self
                .players
                .binary_search(f)
                .map_err(|_| Error::NotEndogenous(f.to_string()))?;
            mask |= 1 << i;
        }
        Ok(mask)
    }

    pub fn wealth(&self, s: &BTreeSet<Fact>) -> Result<Rational> {
        self.wealth_mask(self.mask_of(s)?)
    }

    pub fn wealth_mask(&self, s: u64) -> Result<Rational> {
        let (kind, supports, homs, singles, dx_sat) = match &self.backing {
            Backing::Explicit(f) => return Ok(f(s)),
            Backing::Query {
                kind,
                supports,
                homs,
                singles,
                dx_sat,
            } => (*kind, supports, homs, *singles, *dx_sat),
        };
        let sat = |t: u64| supports.iter().any(|&(m, _)| m & !t == 0);
        let int = |v: u64| Rational::from_integer(BigInt::from(v));
        Ok(match kind {
            WealthKind::Drastic => int((!dx_sat && sat(s)) as u64),
            WealthKind::Ms => {
                if dx_sat {
                    return Ok(Rational::zero());
                }
                supports
                    .iter()
                    .filter(|&&(m, _)| m & !s == 0)
                    .map(|&(m, size)| Rational::new(BigInt::from(m.count_ones()), BigInt::from(size)))
                    .sum()
            }
            WealthKind::Sa => {
                if dx_sat {
                    return Ok(Rational::zero());
                }
                int(homs.iter().filter(|&&m| m & !s == 0).count() as u64)
            }
            WealthKind::P => {
                let relevant = supports.iter().filter(|&&(m, _)| m & !s == 0).fold(0, |acc, &(m, _)| acc | m);
                int(relevant.count_ones() as u64)
            }
            WealthKind::Mc => {
                guard::check("subset size for mc wealth", s.count_ones() as usize, guard::MC_SUBSET)?;
                let mut maximal = 0u64;
                let mut t = s;
                loop {
                    if !sat(t) {
                        let mut rest = s & !t;
                        let mut is_max = true;
                        while rest != 0 {
                            let b = rest & rest.wrapping_neg();
                            if !sat(t | b) {
                                is_max = false;
                                break;
                            }
                            rest ^= b;
                        }
                        maximal += is_max as u64;
                    }
                    if t == 0 {
                        break;
                    }
                    t = (t - 1) & s;
                }
                int(maximal + (singles & s).count_ones() as u64) - int(1)
            }
            WealthKind::R => {
                let bits: Vec<u64> = (0..64).map(|i| 1u64 << i).filter(|b| b & s != 0).collect();
                for g in 0..=bits.len() {
                    if removal_of_size(&bits, g, 0, s, &sat) {
                        return Ok(int(g as u64));
                    }
                }
                unreachable!("removing everything falsifies q")
            }
        })
    }

    fn len(&self) -> usize {
        self.players.len()
    }

    fn index_of(&self, alpha: &Fact) -> Result<usize> {
        self.players
            .binary_search(alpha)
            .map_err(|_| Error::NotEndogenous(alpha.to_string()))
    }
}

/// Whether some Γ of size g drawn from `bits[from..]` leaves a non-satisfying remainder.
fn removal_of_size(bits: &[u64], g: usize, from: usize, rest: u64, sat: &dyn Fn(u64) -> bool) -> bool {
    if g == 0 {
        return !sat(rest);
    }
    (from..bits.len()).any(|i| bits.len() - i >= g && removal_of_size(bits, g - 1, i + 1, rest & !bits[i], sat))
}

struct Sums {
    /// inside[p][j]: Σ wealth(T) over |T| = j + 1 with p ∈ T
    inside: Vec<Vec<Rational>>,
    /// outside[p][j]: Σ wealth(T) over |T| = j with p ∉ T
    outside: Vec<Vec<Rational>>,
}

impl Sums {
    fn new(tracked: usize, m: usize) -> Self {
        Sums {
            inside: vec![vec![Rational::zero(); m]; tracked],
            outside: vec![vec![Rational::zero(); m]; tracked],
        }
    }

    fn merge(mut self, other: Sums) -> Sums {
        for (a, b) in self.inside.iter_mut().zip(other.inside) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        for (a, b) in self.outside.iter_mut().zip(other.outside) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self
    }
}

/// Scores of the players at `tracked`, evaluating each subset's wealth once.
fn scores_for(spec: &WealthSpec, coeff: &CoefficientSpec, tracked: &[usize]) -> Result<Vec<Rational>> {
    let m = spec.len();
    guard::check("endogenous facts for brute-force scoring", m, guard::BRUTE_FACTS)?;
    if m == 0 {
        return Ok(vec![]);
    }
    let coeffs: Vec<Rational> = (0..m).map(|j| coeff.coefficient(j, m)).collect::<Result<_>>()?;
    let total = 1u64 << m;
    let chunk = (total / 256).max(1);
    let sums = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut acc = Sums::new(tracked.len(), m);
            for t in c * chunk..((c + 1) * chunk).min(total) {
                let w = spec.wealth_mask(t)?;
                if w.is_zero() {
                    continue;
                }
                let size = t.count_ones() as usize;
                for (slot, &p) in tracked.iter().enumerate() {
                    if t >> p & 1 == 1 {
                        acc.inside[slot][size - 1] += &w;
                    } else {
                        acc.outside[slot][size] += &w;
                    }
                }
            }
            Ok(acc)
        })
        .try_reduce(|| Sums::new(tracked.len(), m), |a, b| Ok(a.merge(b)))?;
    Ok((0..tracked.len())
        .map(|slot| {
            (0..m)
                .map(|j| (&sums.inside[slot][j] - &sums.outside[slot][j]) * &coeffs[j])
                .sum()
        })
        .collect())
}

/// Σ_{S ⊆ Dn∖{α}} c(|S|, |Dn|) · (wealth(S ∪ {α}) − wealth(S)).
pub fn shapley_like(spec: &WealthSpec, coeff: &CoefficientSpec, alpha: &Fact) -> Result<Rational> {
    let i = spec.index_of(alpha)?;
    Ok(scores_for(spec, coeff, &[i])?.remove(0))
}

/// Scores of every player, in player order.
pub fn shapley_all(spec: &WealthSpec, coeff: &CoefficientSpec) -> Result<BTreeMap<Fact, Rational>> {
    let idx: Vec<usize> = (0..spec.len()).collect();
    let scores = scores_for(spec, coeff, &idx)?;
    Ok(spec.players.iter().cloned().zip(scores).collect())
}

/// Average marginal contribution of α over all orderings of the players.
pub fn shapley_permutation_form(spec: &WealthSpec, alpha: &Fact) -> Result<Rational> {
    let i = spec.index_of(alpha)?;
    let m = spec.len();
    guard::check("players for the permutation form", m, guard::PERMUTATION_PLAYERS)?;
    let values: Vec<Rational> = (0..1u64 << m).map(|s| spec.wealth_mask(s)).collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..m).collect();
    let mut total = Rational::zero();
    loop {
        let before = order.iter().take_while(|&&p| p != i).fold(0u64, |acc, &p| acc | 1 << p);
        total += &values[(before | 1 << i) as usize] - &values[before as usize];
        if !next_permutation(&mut order) {
            break;
        }
    }
    Ok(total / Rational::from_integer(factorial(m)))
}
