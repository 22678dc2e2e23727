//! `patcov`: analyze RPS programs and measure structural coverage of their
//! test suites.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use patcov_core::coverage::{coverage_report, render_text, CoverageOptions, Criterion};
use patcov_core::refutability::{classify, dump, SliceRule};
use patcov_core::runtime::{display, load_suite, run_suite, RunOptions};
use patcov_core::{analyze, Analysis, AnalysisError};

#[derive(Parser)]
#[command(name = "patcov", version, about = "Pattern-aware MC/DC for RPS programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the decisions and conditions of a program.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Extra dumps: `decisions` (JSON) or `pattern-trees`.
        #[arg(long, value_enum, value_delimiter = ',')]
        emit: Vec<Emit>,
    },
    /// Run a suite and judge its coverage.
    Cover {
        #[command(flatten)]
        common: Common,
        /// TOML suite manifest.
        #[arg(long)]
        suite: PathBuf,
        #[arg(long, default_value_t = Criterion::Mcdc)]
        criterion: Criterion,
        /// Count contextually pruned arms and context-fixed conditions.
        #[arg(long)]
        strict_arms: bool,
        /// Also write the merged trace as JSON lines.
        #[arg(long)]
        trace_out: Option<PathBuf>,
        /// Run tests one after another instead of in parallel.
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Args)]
struct Common {
    /// The `.rps` program.
    file: PathBuf,
    #[arg(long, default_value = "verbatim")]
    slice_rule: SliceRule,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Decisions,
    PatternTrees,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Writes to stdout, ignoring errors so a closed pipe does not panic.
macro_rules! out {
    ($($t:tt)*) => {{
        let _ = write!(std::io::stdout().lock(), $($t)*);
    }};
}

macro_rules! outln {
    ($($t:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

/// An error that ends the run with exit code 2.
struct Failure(String);

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.command {
        Command::Analyze { common, emit } => cmd_analyze(&common, &emit),
        Command::Cover {
            common,
            suite,
            criterion,
            strict_arms,
            trace_out,
            sequential,
        } => cmd_cover(&common, &suite, criterion, CoverageOptions { strict_arms }, trace_out.as_deref(), !sequential),
    };
    match r {
        Ok(code) => code,
        Err(Failure(msg)) => {
            eprint!("{msg}");
            if !msg.ends_with('\n') {
                eprintln!();
            }
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("cannot read {}: {e}", path.display())))
}

fn load(common: &Common) -> Result<Analysis, Failure> {
    let file = common.file.display().to_string();
    let src = read(&common.file)?;
    analyze(&file, &src, common.slice_rule).map_err(|e| Failure(describe_error(&file, &src, &e, common.format)))
}

fn describe_error(file: &str, src: &str, e: &AnalysisError, format: Format) -> String {
    let (stage, span, message, witness) = match e {
        AnalysisError::Parse(p) => ("parse", p.span, &p.message, None),
        AnalysisError::Type(t) => ("type", t.span, &t.message, t.witness.as_ref()),
    };
    if format == Format::Json {
        let j = serde_json::json!({
            "error": { "stage": stage, "file": file, "span": span, "message": message, "witness": witness }
        });
        outln!("{}", serde_json::to_string_pretty(&j).expect("json"));
    }
    let mut out = format!("{file}:{span}: {stage} error: {message}\n");
    if let Some(line) = (span.start.line as usize).checked_sub(1).and_then(|i| src.lines().nth(i)) {
        let _ = writeln!(out, "{:>5} | {}", span.start.line, line.trim_end());
    }
    if let Some(w) = witness {
        let _ = writeln!(out, "witness: {w}");
    }
    out
}

fn cmd_analyze(common: &Common, emit: &[Emit]) -> Result<ExitCode, Failure> {
    let a = load(common)?;
    let ds = &a.decisions;
    if emit.contains(&Emit::Decisions) || (emit.is_empty() && common.format == Format::Json) {
        outln!("{}", serde_json::to_string_pretty(&ds.to_json()).expect("json"));
    }
    if emit.contains(&Emit::PatternTrees) {
        let mut pats: Vec<_> = a.typed.patterns.values().collect();
        pats.sort_by_key(|p| (p.span.start, p.id));
        for p in pats {
            let ann = classify(p, &a.typed.env, common.slice_rule);
            outln!("pattern at {}:{}", common.file.display(), p.span);
            out!("{}", dump(&ann, &a.typed.env));
        }
    }
    if emit.is_empty() && common.format == Format::Text {
        let conditions: usize = ds.decisions.iter().map(|d| d.conditions.len()).sum();
        for d in &ds.decisions {
            let pruned = if d.pruned { " (pruned)" } else { "" };
            outln!(
                "#{} {:?}{pruned} in `{}` at {}: {}",
                d.id,
                d.origin,
                d.function,
                d.span,
                d.structure.render()
            );
            for c in &d.conditions {
                let exempt = if c.const_exempt { " (const, exempt)" } else { "" };
                outln!("    c{} `{}` at {}{exempt}", c.index, c.kind.describe(), c.span);
            }
        }
        outln!("{} decisions, {conditions} conditions", ds.decisions.len());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_cover(
    common: &Common,
    suite: &Path,
    criterion: Criterion,
    opts: CoverageOptions,
    trace_out: Option<&Path>,
    parallel: bool,
) -> Result<ExitCode, Failure> {
    let a = load(common)?;
    let manifest = read(suite)?;
    let tests = load_suite(&manifest, &a.source, &a.typed).map_err(|e| Failure(format!("{}: {e}", suite.display())))?;
    let run = run_suite(&a.typed, &a.decisions, &a.program_hash, &tests, RunOptions::from_env(), parallel);
    if let Some(path) = trace_out {
        std::fs::write(path, run.trace.to_jsonl())
            .map_err(|e| Failure(format!("cannot write {}: {e}", path.display())))?;
    }
    let report = coverage_report(&a, &run.trace, criterion, opts).map_err(|e| Failure(e.to_string()))?;
    match common.format {
        Format::Json => {
            let mut j = report.to_json();
            j["tests"] = run
                .outcomes
                .iter()
                .map(|o| {
                    serde_json::json!({
                        "name": o.name,
                        "passed": o.passed,
                        "result": o.result.as_ref().map(|v| display(v, &a.typed.env)).ok(),
                        "message": o.message,
                    })
                })
                .collect();
            outln!("{}", serde_json::to_string_pretty(&j).expect("json"));
        }
        Format::Text => {
            let passed = run.outcomes.iter().filter(|o| o.passed).count();
            outln!("tests: {passed}/{} passed", run.outcomes.len());
            for o in run.outcomes.iter().filter(|o| !o.passed) {
                outln!("  FAILED {}: {}", o.name, o.message.as_deref().unwrap_or(""));
            }
            outln!();
            out!("{}", render_text(&report, &a.source));
        }
    }
    Ok(if report.satisfied { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
