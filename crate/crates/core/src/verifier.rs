//! Per-property verification of a dataset, specification consistency, and
//! incremental (growing-prefix) runs.

use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use thiserror::Error;

use crate::dataset::{distinct_labels, Dataset};
use crate::encoder::{encode_dataset, environment};
use crate::property::{Property, Shape, Specification};
use crate::report::{ConsistencyMatrix, Report, ReportEntry};
use crate::smt::SmtScript;
use crate::solver::{check_sat, Outcome, SolverConfig, Verdict};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("incremental step must be at least 1")]
    ZeroStep,
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Upper bound on solver processes running at once.
    pub parallelism: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            parallelism: thread::available_parallelism().map(NonZeroUsize::get).unwrap_or(1),
        }
    }
}

/// Runs `f` over `jobs` on at most `parallelism` threads, keeping input order.
fn run_ordered<J: Sync, T: Send>(jobs: &[J], parallelism: usize, f: impl Fn(&J) -> T + Sync) -> Vec<T> {
    let workers = parallelism.clamp(1, jobs.len().max(1));
    if workers == 1 {
        return jobs.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<T>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(job) = jobs.get(i) else { break };
                let out = f(job);
                results.lock().expect("no poisoned workers")[i] = Some(out);
            });
        }
    });
    results
        .into_inner()
        .expect("no poisoned workers")
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect()
}

fn error_verdict(msg: String) -> Verdict {
    Verdict {
        outcome: Outcome::Error(msg),
        elapsed: Duration::ZERO,
        model: None,
    }
}

/// `base` conjoined with one or more properties, then checked.
fn check_with(base: &SmtScript, props: &[&Property], shape: &Shape, cfg: &SolverConfig) -> Verdict {
    let mut script = base.clone();
    for p in props {
        let applied = p
            .compile(shape)
            .map_err(|e| e.to_string())
            .and_then(|frag| frag.apply_to(&mut script).map_err(|e| e.to_string()));
        if let Err(msg) = applied {
            return error_verdict(format!("{}: {msg}", p.name));
        }
    }
    if let Err(e) = script.validate() {
        return error_verdict(e.to_string());
    }
    check_sat(&script, cfg)
}

pub fn verify(ds: &Dataset, spec: &Specification, cfg: &SolverConfig) -> Report {
    verify_with(ds, spec, cfg, VerifyOptions::default())
}

/// Encodes `ds` once and checks it against each property independently.
/// Failures are recorded per property; the run never stops early.
pub fn verify_with(ds: &Dataset, spec: &Specification, cfg: &SolverConfig, opts: VerifyOptions) -> Report {
    let base = encode_dataset(ds, &distinct_labels(ds));
    let shape = Shape::of(ds);
    let verdicts = run_ordered(spec.properties(), opts.parallelism, |p| check_with(&base, &[p], &shape, cfg));
    Report {
        dataset: "dataset".into(),
        entries: spec
            .properties()
            .iter()
            .zip(verdicts)
            .map(|(p, verdict)| ReportEntry {
                property: p.name.clone(),
                verdict,
            })
            .collect(),
    }
}

/// Prefix lengths `step, 2*step, ...`, ending with `m` itself.
pub fn prefix_sizes(m: usize, step: usize) -> Vec<usize> {
    let mut sizes: Vec<usize> = (1..).map(|k| k * step).take_while(|&s| s < m).collect();
    sizes.push(m);
    sizes
}

/// Verifies growing prefixes of `ds`, one report per prefix size.
pub fn incremental_verify(
    ds: &Dataset,
    spec: &Specification,
    cfg: &SolverConfig,
    step: usize,
    opts: VerifyOptions,
) -> Result<Vec<(usize, Report)>, VerifyError> {
    if step == 0 {
        return Err(VerifyError::ZeroStep);
    }
    let prefixes: Vec<(usize, SmtScript, Shape)> = prefix_sizes(ds.m(), step)
        .into_iter()
        .map(|size| {
            let sub = ds.prefix(size);
            (size, encode_dataset(&sub, &distinct_labels(&sub)), Shape::of(&sub))
        })
        .collect();
    let jobs: Vec<(usize, usize)> = (0..prefixes.len())
        .flat_map(|i| (0..spec.len()).map(move |k| (i, k)))
        .collect();
    let verdicts = run_ordered(&jobs, opts.parallelism, |&(i, k)| {
        let (_, base, shape) = &prefixes[i];
        check_with(base, &[&spec.properties()[k]], shape, cfg)
    });

    let mut verdicts = verdicts.into_iter();
    Ok(prefixes
        .iter()
        .map(|(size, _, _)| {
            let entries = spec
                .properties()
                .iter()
                .map(|p| ReportEntry {
                    property: p.name.clone(),
                    verdict: verdicts.next().expect("one verdict per job"),
                })
                .collect();
            (
                *size,
                Report {
                    dataset: format!("prefix {size}"),
                    entries,
                },
            )
        })
        .collect())
}

#[derive(Debug, Clone, Copy)]
pub struct ConsistencyOptions {
    pub parallelism: usize,
    /// Also check the conjunction of every property.
    pub full: bool,
}

impl Default for ConsistencyOptions {
    fn default() -> Self {
        ConsistencyOptions {
            parallelism: VerifyOptions::default().parallelism,
            full: false,
        }
    }
}

/// Checks every pair of properties (and each alone) for joint
/// satisfiability, with the dataset symbols declared but unconstrained.
/// `n` is the feature count used to compile built-ins.
pub fn check_consistency(spec: &Specification, n: usize, cfg: &SolverConfig, opts: ConsistencyOptions) -> ConsistencyMatrix {
    let base = environment();
    let shape = Shape { n, m: None };
    let props = spec.properties();
    let k = props.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|x| (x..k).map(move |y| (x, y))).collect();
    let upper = run_ordered(&pairs, opts.parallelism, |&(x, y)| {
        let selected: Vec<&Property> = if x == y { vec![&props[x]] } else { vec![&props[x], &props[y]] };
        check_with(&base, &selected, &shape, cfg).outcome
    });
    let full = opts
        .full
        .then(|| check_with(&base, &props.iter().collect::<Vec<_>>(), &shape, cfg).outcome);
    ConsistencyMatrix::from_upper(props.iter().map(|p| p.name.clone()).collect(), upper, full)
}
