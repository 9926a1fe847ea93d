//! Step checking and mistake diagnosis for elementary proof exercises.
//!
//! Given a proof step — a handful of premises and a claimed conclusion —
//! this crate first tries to verify the step against a catalog of sound
//! inference rules and an exact/high-precision arithmetic checker. When
//! verification fails it does not stop at "wrong": a second battery of
//! deliberately *unsound* rules (classic logical fallacies, broken
//! fraction and exponent manipulations, false distributivity and
//! monotonicity schemas, and operator-confusion analogies) is matched
//! against the step to name the specific mistake the author most likely
//! made, with the instantiated rule, its position inside the statement and
//! a student-facing explanation.
//!
//! The crate is organized bottom-up:
//!
//! - [`syntax`]: terms, formulas, parsing, printing, positions.
//! - [`eval`]: exact rational and high-precision evaluation, randomized
//!   equality testing for terms with variables.
//! - [`semantics`]: truth tables and small finite models, used to certify
//!   that diagnostic rules are genuinely unsound.
//! - [`sound_atp`]: the verifier for correct steps.
//! - [`anti_atp`]: the logical-fallacy catalog and matcher.
//! - [`antiterms`]: broken term-manipulation rules, type-confusion rule
//!   generators and operator-replacement analogies.
//! - [`pipeline`]: the end-to-end `diagnose_step` entry point, exercise
//!   configuration and feedback rendering.
//! - [`corpus`]: generation of labeled mistake corpora for evaluation.

pub mod anti_atp;
pub mod antiterms;
pub mod corpus;
pub mod eval;
pub mod pattern;
pub mod pipeline;
pub mod semantics;
pub mod sound_atp;
pub mod syntax;
