//! Execution of test suites with coverage instrumentation.

pub mod interp;
pub mod suite;
pub mod trace;
pub mod value;

pub use interp::{
    display, evaluate, match_pattern, pattern_matches, Execution, RunOptions, RuntimeError, RuntimeErrorKind,
    DEFAULT_FUEL,
};
pub use suite::{load_suite, run_suite, SuiteError, SuiteResult, TestCase, TestOutcome};
pub use trace::{show_conds, EvaluationVector, ExitPoint, Trace, TraceError, TriState, VectorRef};
pub use value::Value;

#[cfg(test)]
mod tests;
