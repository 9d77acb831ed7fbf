//! Ground normal logic programs with choice, integrity and conflict rules
//! under the stable model semantics.

mod atom;
mod program;
mod solver;

pub use atom::GroundAtom;
pub use program::{parse_program, AtomId, Body, GroundProgram, ProgramError, Rule, StableModel};
pub use solver::{enumerate, solve, SolveError, SolveStats, Solver, SolverOptions};
