//! Test suites: a TOML manifest of entry calls with literal arguments, and
//! the runner that executes them and merges their traces.

use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use super::interp::{evaluate, display, RunOptions, RuntimeError};
use super::trace::Trace;
use super::value::Value;
use crate::decisions::DecisionSet;
use crate::syntax::{parse_program, pretty};
use crate::types::{check_program, TypeEnv, TypedProgram};

#[derive(Clone, Debug, PartialEq)]
pub struct TestCase {
    pub name: String,
    pub entry: String,
    pub args: Vec<Value>,
    pub expected: Option<Value>,
    /// Expected `print` output.
    pub output: Option<String>,
}

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("invalid suite manifest: {0}")]
    Manifest(String),
    #[error("test `{test}`: {message}")]
    Test { test: String, message: String },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    /// Entry function for tests that do not name one.
    entry: Option<String>,
    #[serde(default, rename = "test")]
    tests: Vec<ManifestTest>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestTest {
    name: Option<String>,
    entry: Option<String>,
    #[serde(default)]
    args: Vec<String>,
    expect: Option<String>,
    output: Option<String>,
}

/// Parses a manifest and evaluates its literal arguments against the
/// program's types. `source` is the program text `tp` was checked from.
pub fn load_suite(manifest: &str, source: &str, tp: &TypedProgram) -> Result<Vec<TestCase>, SuiteError> {
    let m: Manifest = toml::from_str(manifest).map_err(|e| SuiteError::Manifest(e.to_string()))?;
    let fns: std::collections::HashMap<_, _> = tp.program.functions().map(|f| (f.name.name.clone(), f)).collect();

    // Each argument becomes a nullary function returning the parameter
    // type; running it yields the value.
    let mut extra = String::new();
    let mut plan = Vec::new();
    for (i, t) in m.tests.iter().enumerate() {
        let name = t.name.clone().unwrap_or_else(|| format!("test{i}"));
        let fail = |message: String| SuiteError::Test {
            test: name.clone(),
            message,
        };
        let entry = t
            .entry
            .clone()
            .or_else(|| m.entry.clone())
            .ok_or_else(|| fail("no entry function".into()))?;
        let f = fns.get(&entry).ok_or_else(|| fail(format!("no function `{entry}`")))?;
        if f.params.len() != t.args.len() {
            return Err(fail(format!("`{entry}` takes {} arguments, {} given", f.params.len(), t.args.len())));
        }
        for (j, (p, a)) in f.params.iter().zip(&t.args).enumerate() {
            extra.push_str(&format!("fn __arg_{i}_{j}() -> {} {{ {a} }}\n", pretty::type_expr(&p.ty)));
        }
        if let Some(x) = &t.expect {
            let ret = f.ret.as_ref().map_or_else(|| "()".to_string(), pretty::type_expr);
            extra.push_str(&format!("fn __expect_{i}() -> {ret} {{ {x} }}\n"));
        }
        plan.push((name, entry));
    }
    if plan.is_empty() {
        return Ok(Vec::new());
    }
    let aug_src = format!("{source}\n{extra}");
    let program = parse_program(&tp.program.file, &aug_src).map_err(|e| SuiteError::Manifest(format!("argument syntax: {e}")))?;
    let aug = check_program(program).map_err(|e| SuiteError::Manifest(format!("argument type: {}", e.message)))?;
    let none = DecisionSet::default();
    let value_of = |f: String, test: &str| -> Result<Value, SuiteError> {
        let ex = evaluate(&aug, &none, "", &f, Vec::new(), 0, RunOptions::default());
        let v = ex.result.map_err(|e| SuiteError::Test {
            test: test.to_string(),
            message: e.to_string(),
        })?;
        remap(&v, &aug.env, &tp.env).ok_or_else(|| SuiteError::Test {
            test: test.to_string(),
            message: "argument type not used by the program".into(),
        })
    };
    let mut out = Vec::new();
    for (i, ((name, entry), t)) in plan.into_iter().zip(&m.tests).enumerate() {
        let args = (0..t.args.len())
            .map(|j| value_of(format!("__arg_{i}_{j}"), &name))
            .collect::<Result<_, _>>()?;
        let expected = match t.expect {
            Some(_) => Some(value_of(format!("__expect_{i}"), &name)?),
            None => None,
        };
        out.push(TestCase {
            name,
            entry,
            args,
            expected,
            output: t.output.clone(),
        });
    }
    Ok(out)
}

/// Moves a value between two environments of the same program, matching
/// enum and struct types by name.
fn remap(v: &Value, from: &TypeEnv, to: &TypeEnv) -> Option<Value> {
    let all = |xs: &[Value]| xs.iter().map(|x| remap(x, from, to)).collect::<Option<Vec<_>>>();
    Some(match v {
        Value::Enum { ty, variant, fields } => Value::Enum {
            ty: to.enum_by_name(&from.enum_info(*ty).name)?,
            variant: *variant,
            fields: all(fields)?,
        },
        Value::Struct { ty, fields } => Value::Struct {
            ty: to.struct_by_name(&from.struct_info(*ty).name)?,
            fields: all(fields)?,
        },
        Value::Tuple(xs) => Value::Tuple(all(xs)?),
        Value::Seq(xs) => Value::Seq(all(xs)?),
        other => other.clone(),
    })
}

#[derive(Clone, Debug)]
pub struct TestOutcome {
    pub name: String,
    pub result: Result<Value, RuntimeError>,
    pub output: String,
    /// No runtime error and every stated expectation met.
    pub passed: bool,
    pub message: Option<String>,
}

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub outcomes: Vec<TestOutcome>,
    pub trace: Trace,
}

/// Runs every test and merges the traces. Failing tests are reported but
/// their coverage still counts.
pub fn run_suite(
    tp: &TypedProgram,
    ds: &DecisionSet,
    program_hash: &str,
    tests: &[TestCase],
    opts: RunOptions,
    parallel: bool,
) -> SuiteResult {
    let run = |(i, t): (usize, &TestCase)| {
        let ex = evaluate(tp, ds, program_hash, &t.entry, t.args.clone(), i as u32, opts);
        let message = match &ex.result {
            Err(e) => Some(format!("runtime error: {e}")),
            Ok(v) if t.expected.as_ref().is_some_and(|x| x != v) => Some(format!(
                "expected {}, got {}",
                t.expected.as_ref().map(|x| x.show(&tp.env)).unwrap_or_default(),
                v.show(&tp.env)
            )),
            Ok(_) if t.output.as_ref().is_some_and(|o| *o != ex.output) => Some(format!(
                "expected output {:?}, got {:?}",
                t.output.as_deref().unwrap_or_default(),
                ex.output
            )),
            Ok(_) => None,
        };
        let outcome = TestOutcome {
            name: t.name.clone(),
            passed: message.is_none(),
            message,
            result: ex.result,
            output: ex.output,
        };
        (outcome, ex.trace)
    };
    let empty = || Trace::new(program_hash);
    let merge = |a: Trace, b: Trace| a.merge(b).expect("traces of one program");
    let (outcomes, trace) = if parallel {
        let results: Vec<_> = tests.par_iter().enumerate().map(run).collect();
        let (outcomes, traces): (Vec<_>, Vec<_>) = results.into_iter().unzip();
        let trace = traces.into_par_iter().reduce(empty, merge);
        (outcomes, trace)
    } else {
        let (outcomes, traces): (Vec<_>, Vec<_>) = tests.iter().enumerate().map(run).unzip();
        (outcomes, traces.into_iter().fold(empty(), merge))
    };
    SuiteResult { outcomes, trace }
}

/// Renders a test result for reports.
pub fn show_result(o: &TestOutcome, env: &TypeEnv) -> String {
    match &o.result {
        Ok(v) => display(v, env),
        Err(e) => format!("error: {e}"),
    }
}
