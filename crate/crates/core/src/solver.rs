//! External SMT solver driven over its SMT-LIB 2 text interface.
//!
//! Each query runs in its own process: the rendered script goes to stdin,
//! the first status token is read from stdout. A wall-clock deadline kills
//! the process and reports the query as unknown.

use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::smt::SmtScript;

/// Environment variable naming the solver executable.
pub const SOLVER_ENV: &str = "DSVERIFY_SOLVER";

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

const POLL_INTERVAL: Duration = Duration::from_millis(2);

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("failed to start `{program}`: {source}")]
    Spawn {
        program: String,
        #[source]
        source: std::io::Error,
    },
    #[error("no model available: solver answered {0}")]
    NoModel(Outcome),
    #[error("solver failed the conformance probe: {0}")]
    Probe(String),
    #[error("invalid solver configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub program: PathBuf,
    pub args: Vec<String>,
    pub timeout: Duration,
    /// Request a model after every satisfiable check.
    pub produce_models: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig::for_program(std::env::var_os(SOLVER_ENV).map(PathBuf::from).unwrap_or_else(|| "z3".into()))
    }
}

impl SolverConfig {
    /// Configuration for `program` with the arguments needed to make it read
    /// a script from stdin, for the solvers we know about.
    pub fn for_program(program: impl Into<PathBuf>) -> Self {
        let program = program.into();
        let args = default_args(&program);
        SolverConfig {
            program,
            args,
            timeout: DEFAULT_TIMEOUT,
            produce_models: false,
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn with_models(mut self, on: bool) -> Self {
        self.produce_models = on;
        self
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if self.timeout.is_zero() {
            return Err(SolverError::Config("timeout must be positive".into()));
        }
        Ok(())
    }
}

fn default_args(program: &Path) -> Vec<String> {
    let stem = program.file_stem().and_then(|s| s.to_str()).unwrap_or("");
    let args: &[&str] = match stem {
        "z3" => &["-in", "-smt2"],
        "cvc5" | "cvc4" => &["--lang=smt2"],
        _ => &[],
    };
    args.iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UnknownReason {
    /// The solver answered `unknown`.
    Solver,
    /// The deadline passed and the process was killed.
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// Satisfiable: the dataset holds the property.
    Holds,
    /// Unsatisfiable: the dataset violates the property.
    Violated,
    Unknown(UnknownReason),
    Error(String),
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Holds => "holds",
            Outcome::Violated => "violated",
            Outcome::Unknown(_) => "unknown",
            Outcome::Error(_) => "error",
        }
    }

    pub fn is_definitive(&self) -> bool {
        matches!(self, Outcome::Holds | Outcome::Violated)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Unknown(UnknownReason::Timeout) => f.write_str("unknown (timeout)"),
            Outcome::Error(msg) => write!(f, "error: {msg}"),
            other => f.write_str(other.label()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub elapsed: Duration,
    /// Raw model block; only present for `Holds` when models were requested.
    pub model: Option<String>,
}

struct RawRun {
    stdout: String,
    stderr: String,
    success: bool,
    timed_out: bool,
    elapsed: Duration,
}

fn spawn_and_wait(text: String, cfg: &SolverConfig) -> Result<RawRun, SolverError> {
    let start = Instant::now();
    let mut child = Command::new(&cfg.program)
        .args(&cfg.args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|source| SolverError::Spawn {
            program: cfg.program.display().to_string(),
            source,
        })?;

    let mut stdin = child.stdin.take().expect("piped stdin");
    let writer = thread::spawn(move || {
        // The solver may exit before reading everything; a broken pipe then
        // surfaces through its output instead.
        let _ = stdin.write_all(text.as_bytes());
    });
    let mut stdout = child.stdout.take().expect("piped stdout");
    let out_reader = thread::spawn(move || {
        let mut buf = String::new();
        let _ = stdout.read_to_string(&mut buf);
        buf
    });
    let mut stderr = child.stderr.take().expect("piped stderr");
    let err_reader = thread::spawn(move || {
        let mut buf = String::new();
        let _ = stderr.read_to_string(&mut buf);
        buf
    });

    let deadline = start + cfg.timeout;
    let mut timed_out = false;
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break Some(status),
            Ok(None) if Instant::now() >= deadline => {
                let _ = child.kill();
                timed_out = true;
                break child.wait().ok();
            }
            Ok(None) => thread::sleep(POLL_INTERVAL),
            Err(_) => {
                let _ = child.kill();
                break child.wait().ok();
            }
        }
    };
    let elapsed = start.elapsed();

    let _ = writer.join();
    let stdout = out_reader.join().unwrap_or_default();
    let stderr = err_reader.join().unwrap_or_default();
    Ok(RawRun {
        stdout,
        stderr,
        success: status.is_some_and(|s| s.success()),
        timed_out,
        elapsed,
    })
}

fn error_message(line: &str) -> String {
    line.trim()
        .strip_prefix("(error")
        .and_then(|r| r.strip_suffix(')'))
        .map(|r| r.trim().trim_matches('"').to_string())
        .unwrap_or_else(|| line.trim().to_string())
}

/// Turns raw solver output into a verdict.
fn interpret(run: RawRun, want_model: bool) -> Verdict {
    let mut outcome = None;
    let mut model_lines = Vec::new();
    let mut errors = Vec::new();

    for line in run.stdout.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with("(error") {
            errors.push((outcome.is_some(), error_message(trimmed)));
            continue;
        }
        match outcome {
            None => {
                outcome = Some(match trimmed {
                    "sat" => Outcome::Holds,
                    "unsat" => Outcome::Violated,
                    "unknown" => Outcome::Unknown(UnknownReason::Solver),
                    "timeout" => Outcome::Unknown(UnknownReason::Timeout),
                    other => Outcome::Error(format!("unexpected solver output `{other}`")),
                });
            }
            Some(_) => model_lines.push(line),
        }
    }

    let mut outcome = match outcome {
        _ if run.timed_out => Outcome::Unknown(UnknownReason::Timeout),
        Some(o) => o,
        None => {
            let detail = errors
                .first()
                .map(|(_, m)| m.clone())
                .or_else(|| Some(run.stderr.trim().to_string()).filter(|s| !s.is_empty()))
                .unwrap_or_else(|| if run.success { "no status from solver".into() } else { "solver exited abnormally".into() });
            Outcome::Error(detail)
        }
    };

    // Errors before the status mean the script was rejected, and an error
    // after `sat` means the model could not be produced. An error after
    // other answers comes from `get-model` and is expected.
    if let Some((_, msg)) = errors
        .iter()
        .find(|(after, _)| !after || (want_model && outcome == Outcome::Holds))
    {
        if outcome.is_definitive() || matches!(outcome, Outcome::Unknown(UnknownReason::Solver)) {
            outcome = Outcome::Error(msg.clone());
        }
    }

    let model = (want_model && outcome == Outcome::Holds).then(|| model_lines.join("\n").trim().to_string());
    Verdict {
        outcome,
        elapsed: run.elapsed,
        model,
    }
}

fn run_text(text: String, cfg: &SolverConfig, want_model: bool) -> Verdict {
    if let Err(e) = cfg.validate() {
        return Verdict {
            outcome: Outcome::Error(e.to_string()),
            elapsed: Duration::ZERO,
            model: None,
        };
    }
    match spawn_and_wait(text, cfg) {
        Ok(run) => interpret(run, want_model),
        Err(e) => Verdict {
            outcome: Outcome::Error(e.to_string()),
            elapsed: Duration::ZERO,
            model: None,
        },
    }
}

/// Checks `script` for satisfiability. The script's own epilogue is replaced
/// by `(check-sat)` and, if `cfg.produce_models`, `(get-model)`.
pub fn check_sat(script: &SmtScript, cfg: &SolverConfig) -> Verdict {
    let mut script = script.clone();
    script.epilogue.check_sat = true;
    script.epilogue.get_model = cfg.produce_models;
    run_text(script.render(), cfg, cfg.produce_models)
}

/// The solver's model for a satisfiable script, verbatim.
pub fn get_model(script: &SmtScript, cfg: &SolverConfig) -> Result<String, SolverError> {
    let verdict = check_sat(script, &cfg.clone().with_models(true));
    match verdict.outcome {
        Outcome::Holds => Ok(verdict.model.unwrap_or_default()),
        other => Err(SolverError::NoModel(other)),
    }
}

/// Runs raw SMT-LIB text. Used for probing and for scripts built outside
/// [`SmtScript`].
pub fn check_text(text: &str, cfg: &SolverConfig) -> Verdict {
    run_text(text.to_string(), cfg, false)
}

/// Confirms the configured solver answers a trivial satisfiable script.
pub fn probe(cfg: &SolverConfig) -> Result<(), SolverError> {
    let verdict = check_text("(set-logic ALL)\n(declare-const x Int)\n(assert (= x 1))\n(check-sat)\n", cfg);
    match verdict.outcome {
        Outcome::Holds => Ok(()),
        other => Err(SolverError::Probe(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(stdout: &str) -> RawRun {
        RawRun {
            stdout: stdout.to_string(),
            stderr: String::new(),
            success: true,
            timed_out: false,
            elapsed: Duration::ZERO,
        }
    }

    #[test]
    fn status_tokens() {
        assert_eq!(interpret(raw("sat\n"), false).outcome, Outcome::Holds);
        assert_eq!(interpret(raw("unsat\n"), false).outcome, Outcome::Violated);
        assert_eq!(interpret(raw("unknown\n"), false).outcome, Outcome::Unknown(UnknownReason::Solver));
        assert!(matches!(interpret(raw("banana\n"), false).outcome, Outcome::Error(_)));
        assert!(matches!(interpret(raw(""), false).outcome, Outcome::Error(_)));
    }

    #[test]
    fn errors_before_status_win() {
        let v = interpret(raw("(error \"line 3: unknown constant x\")\nsat\n"), false);
        assert_eq!(v.outcome, Outcome::Error("line 3: unknown constant x".into()));
    }

    #[test]
    fn model_errors_after_unsat_are_ignored() {
        let v = interpret(raw("unsat\n(error \"model is not available\")\n"), true);
        assert_eq!(v.outcome, Outcome::Violated);
        assert_eq!(v.model, None);
    }

    #[test]
    fn model_captured_after_sat() {
        let v = interpret(raw("sat\n(\n  (define-fun m () Int\n    10)\n)\n"), true);
        assert_eq!(v.outcome, Outcome::Holds);
        assert!(v.model.unwrap().contains("define-fun m () Int"));
        assert_eq!(interpret(raw("sat\n"), false).model, None);
    }

    #[test]
    fn timeout_overrides_output() {
        let mut r = raw("");
        r.timed_out = true;
        assert_eq!(interpret(r, false).outcome, Outcome::Unknown(UnknownReason::Timeout));
    }

    #[test]
    fn default_args_by_solver() {
        assert_eq!(default_args(Path::new("/usr/bin/z3")), vec!["-in", "-smt2"]);
        assert!(default_args(Path::new("mysolver")).is_empty());
    }

    #[test]
    fn missing_executable_is_an_error_verdict() {
        let cfg = SolverConfig::for_program("/nonexistent/solver");
        assert!(matches!(check_text("(check-sat)", &cfg).outcome, Outcome::Error(_)));
        assert!(probe(&cfg).is_err());
    }

    #[test]
    fn zero_timeout_rejected() {
        let cfg = SolverConfig::for_program("z3").with_timeout(Duration::ZERO);
        assert!(cfg.validate().is_err());
    }
}
