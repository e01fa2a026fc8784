#![allow(dead_code)]

use std::path::PathBuf;

use dsverify::property::OracleVerdict;
use dsverify::solver::probe;
use dsverify::{load_csv, CsvOptions, Dataset, DecimalReal, Outcome, SolverConfig};
use rand::Rng;

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel)
}

pub fn sample() -> Dataset {
    let file = std::fs::File::open(fixture("sample10.csv")).unwrap();
    load_csv(file, CsvOptions::default()).unwrap()
}

/// The default solver, or `None` (with a note on stderr) when it is not installed.
pub fn solver() -> Option<SolverConfig> {
    let cfg = SolverConfig::default();
    match probe(&cfg) {
        Ok(()) => Some(cfg),
        Err(e) => {
            eprintln!("skipping: solver unavailable ({e})");
            None
        }
    }
}

pub fn expected(v: OracleVerdict) -> Outcome {
    match v {
        OracleVerdict::Holds => Outcome::Holds,
        OracleVerdict::Violated => Outcome::Violated,
    }
}

/// `k / 4` as a decimal.
pub fn quarter(k: i64) -> DecimalReal {
    hundredths(k * 25)
}

/// `k / 100` as a decimal.
pub fn hundredths(k: i64) -> DecimalReal {
    let sign = if k < 0 { "-" } else { "" };
    let k = k.unsigned_abs();
    format!("{sign}{}.{:02}", k / 100, k % 100).parse().unwrap()
}

/// A random `m x n` dataset with entries on a quarter grid inside
/// `[-spread/4, spread/4]` and outputs drawn from `0..labels`.
pub fn grid_dataset(rng: &mut impl Rng, m: usize, n: usize, spread: i64, labels: i64) -> Dataset {
    let rows = (0..m)
        .map(|_| (0..n).map(|_| quarter(rng.gen_range(-spread..=spread))).collect())
        .collect();
    let outputs = (0..m).map(|_| DecimalReal::from_int(rng.gen_range(0..labels))).collect();
    Dataset::new(rows, outputs).unwrap()
}

/// A random dataset with arbitrary six-digit decimals, negative ones included.
pub fn decimal_dataset(rng: &mut impl Rng, m: usize, n: usize) -> Dataset {
    let value = |rng: &mut dyn rand::RngCore| -> DecimalReal {
        let v: i64 = rng.gen_range(-5_000_000..=5_000_000);
        let sign = if v < 0 { "-" } else { "" };
        format!("{sign}{}.{:06}", v.unsigned_abs() / 1_000_000, v.unsigned_abs() % 1_000_000)
            .parse()
            .unwrap()
    };
    let rows = (0..m).map(|_| (0..n).map(|_| value(rng)).collect()).collect();
    let outputs = (0..m).map(|_| value(rng)).collect();
    Dataset::new(rows, outputs).unwrap()
}
