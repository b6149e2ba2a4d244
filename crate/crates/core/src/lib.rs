//! Responsibility scores for the facts of a partitioned database with respect
//! to a Boolean monotone query, based on its minimal supports.

pub mod error;
pub mod guard;
mod lex;
pub mod model;
pub mod query;
pub mod rational;
pub mod rpq;
mod util;

pub use error::{Error, Result};
pub use model::{parse_database, Constant, Fact, PartitionedDatabase, RelationName, Schema};
pub use query::{parse_query, ConjunctiveQuery, Query};
pub use rational::Rational;
pub mod supports;
pub mod selfjoin;
pub mod shapley;
pub mod sql;
pub mod wsms;
pub mod testgen;
pub mod measure;
pub mod axioms;
