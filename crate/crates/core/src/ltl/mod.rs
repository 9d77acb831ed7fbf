//! Linear temporal logic without next-time, evaluated over finite words and
//! lasso-shaped infinite words.

mod formula;
mod word;

pub use formula::{parse_formula, Formula};
pub use word::{eval_cautious, stuttering_equivalent, Letter, Word, WordError};
