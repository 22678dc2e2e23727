//! Pattern-aware structural coverage for RPS, a small Rust subset.
//!
//! The pipeline is: [`syntax`] parses source, [`types`] checks it and
//! provides exact value spaces, [`refutability`] classifies sub-patterns,
//! [`decisions`] extracts decisions and conditions, [`runtime`] runs test
//! suites while recording evaluation vectors and [`coverage`] judges the
//! resulting trace.

pub mod syntax;
pub mod refutability;
pub mod types;
pub mod decisions;
pub mod runtime;
pub mod coverage;

use sha2::{Digest, Sha256};
use thiserror::Error;

use decisions::DecisionSet;
use refutability::SliceRule;
use syntax::{ParseError, Program};
use types::{TypeError, TypedProgram};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("type error at {0}")]
    Type(#[from] TypeError),
}

/// A checked program with `?` desugared and its decisions extracted.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub source: String,
    pub typed: TypedProgram,
    pub decisions: DecisionSet,
    /// Identifies the program revision that traces were recorded against.
    pub program_hash: String,
}

/// Runs the front half of the pipeline on one source file.
pub fn analyze(file: &str, source: &str, rule: SliceRule) -> Result<Analysis, AnalysisError> {
    let program = syntax::parse_program(file, source)?;
    let program_hash = program_hash(&program);
    let typed = decisions::desugar_question_mark(types::check_program(program)?);
    let ds = decisions::extract_decisions(&typed, rule);
    let decisions = decisions::apply_const_exemption(ds, &typed);
    Ok(Analysis {
        source: source.to_string(),
        typed,
        decisions,
        program_hash,
    })
}

/// SHA-256 of the pretty-printed program, so formatting changes alone do
/// not invalidate traces.
pub fn program_hash(p: &Program) -> String {
    hex::encode(Sha256::digest(syntax::pretty::program(p).as_bytes()))
}
