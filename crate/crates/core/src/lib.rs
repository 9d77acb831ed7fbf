//! Bounded model checking of 1-safe Petri nets through ground logic
//! programs under the stable model semantics.

pub mod asp;
pub mod check;
pub mod condition;
pub mod encode;
pub mod ltl;
pub mod net;
mod syntax;

pub use check::{run_check, CheckError, CheckRequest, Query, Report, Verdict};
pub use condition::{parse_condition, Condition, ConditionError};
pub use syntax::SyntaxError;
