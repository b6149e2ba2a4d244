//! Named responsibility measures, dispatched by query class.

use crate::error::{Error, Result};
use crate::model::{Fact, PartitionedDatabase};
use crate::query::Query;
use crate::rational::Rational;
use crate::rpq::{check_dag, wsms_rpq_many, DagCheck};
use crate::shapley::{shapley_all, CoefficientSpec, WealthKind, WealthSpec};
use crate::wsms::{score_all, WeightFunction};
use num_traits::Zero;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Measure {
    Wsms(WeightFunction),
    Shapley { wealth: WealthKind, coeff: CoefficientSpec },
}

pub const MEASURE_NAMES: [&str; 10] = [
    "ms",
    "s",
    "sharp",
    "wsms-custom",
    "drastic-shapley",
    "drastic-banzhaf",
    "sa-shapley",
    "p-shapley",
    "mc-shapley",
    "r-shapley",
];

impl Measure {
    /// `weights` is required for `wsms-custom` and ignored otherwise.
    pub fn from_name(name: &str, weights: Option<WeightFunction>) -> Result<Self> {
        let shapley = |wealth| Measure::Shapley {
            wealth,
            coeff: CoefficientSpec::Shapley,
        };
        Ok(match name {
            "ms" => Measure::Wsms(WeightFunction::InvW),
            "s" => Measure::Wsms(WeightFunction::S),
            "sharp" => Measure::Wsms(WeightFunction::Sharp),
            "wsms-custom" => Measure::Wsms(
                weights.ok_or_else(|| Error::Invalid("wsms-custom needs a weight table".into()))?,
            ),
            "drastic-shapley" => shapley(WealthKind::Drastic),
            "drastic-banzhaf" => Measure::Shapley {
                wealth: WealthKind::Drastic,
                coeff: CoefficientSpec::Banzhaf,
            },
            "sa-shapley" => shapley(WealthKind::Sa),
            "p-shapley" => shapley(WealthKind::P),
            "mc-shapley" => shapley(WealthKind::Mc),
            "r-shapley" => shapley(WealthKind::R),
            other => return Err(Error::Invalid(format!("unknown measure {other:?}"))),
        })
    }

    pub fn name(&self) -> String {
        match self {
            Measure::Wsms(w) => w.name().to_string(),
            Measure::Shapley { wealth, coeff } => {
                let c = match coeff {
                    CoefficientSpec::Shapley => "shapley",
                    CoefficientSpec::Banzhaf => "banzhaf",
                    CoefficientSpec::Custom(_) => "custom",
                };
                format!("{}-{c}", wealth.name())
            }
        }
    }

    /// Scores of every endogenous fact.
    pub fn score_all(&self, q: &Query, db: &PartitionedDatabase) -> Result<BTreeMap<Fact, Rational>> {
        match self {
            Measure::Wsms(w) => {
                if let Query::Rpq(r) = q {
                    let all = db.all_facts();
                    let binary = all.iter().all(|f| f.relation.arity() == 2);
                    if binary && matches!(check_dag(&all)?, DagCheck::Order(_)) {
                        let facts: Vec<Fact> = db.endogenous().iter().cloned().collect();
                        let scores = wsms_rpq_many(r, db, &facts, w)?;
                        return Ok(facts.into_iter().zip(scores).collect());
                    }
                }
                score_all(q, db, w)
            }
            Measure::Shapley { wealth, coeff } => {
                if db.endogenous().is_empty() {
                    return Ok(BTreeMap::new());
                }
                let spec = WealthSpec::new(*wealth, q, db)?;
                shapley_all(&spec, coeff)
            }
        }
    }

    pub fn score(&self, q: &Query, db: &PartitionedDatabase, alpha: &Fact) -> Result<Rational> {
        if !db.is_endogenous(alpha) {
            return Err(Error::NotEndogenous(alpha.to_string()));
        }
        Ok(self
            .score_all(q, db)?
            .remove(alpha)
            .unwrap_or_else(Rational::zero))
    }
}
