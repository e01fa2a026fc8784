//! Synthetic benchmark datasets.
//!
//! [`generate`] starts from a fixed ten-row, two-feature sample (three
//! classes, values inside `[-1, 1]`) and appends seeded pseudo-random rows:
//! features uniform on `[-0.9, 0.9]` with six decimal digits, outputs drawn
//! from `{1, 0, -1}`. The same `(rows, seed)` always yields the same dataset.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{load_csv, CsvOptions, Dataset};
use crate::decimal::DecimalReal;

/// The ten-row seed sample, as CSV.
pub const SEED_SAMPLE: &str = "\
0.051267,0.69956,1
-0.092742,0.68494,0
-0.21371,0.69225,-1
-0.375,0.50219,-1
-0.51325,0.46564,-1
-0.52477,0.2098,-1
-0.39804,0.034357,-1
-0.30588,-0.19225,-1
0.016705,-0.40424,-1
0.13191,-0.51389,-1
";

pub fn seed_sample() -> Dataset {
    load_csv(SEED_SAMPLE.as_bytes(), CsvOptions::default()).expect("seed sample is well formed")
}

fn micro(v: i64) -> DecimalReal {
    let sign = if v < 0 { "-" } else { "" };
    let v = v.unsigned_abs();
    format!("{sign}{}.{:06}", v / 1_000_000, v % 1_000_000)
        .parse()
        .expect("formatted decimal")
}

/// A `rows`-row, two-feature dataset (see module docs). `rows` below ten
/// truncates the seed sample.
pub fn generate(rows: usize, seed: u64) -> Dataset {
    let base = seed_sample();
    if rows <= base.m() {
        return base.prefix(rows.max(1));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = base.rows().to_vec();
    let mut outputs = base.outputs().to_vec();
    for _ in base.m()..rows {
        features.push((0..2).map(|_| micro(rng.gen_range(-900_000..=900_000))).collect());
        outputs.push(DecimalReal::from_int(rng.gen_range(-1..=1)));
    }
    Dataset::new(features, outputs).expect("generated rows are rectangular")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_bounded() {
        let a = generate(118, 7);
        assert_eq!(a, generate(118, 7));
        assert_ne!(a, generate(118, 8));
        assert_eq!((a.m(), a.n()), (118, 2));
        assert_eq!(a.prefix(10), seed_sample());
        let lo: DecimalReal = "-1".parse().unwrap();
        let hi: DecimalReal = "1".parse().unwrap();
        assert!(a.rows().iter().flatten().all(|v| *v >= lo && *v <= hi));
    }

    #[test]
    fn micro_formatting() {
        assert_eq!(micro(-900_000).to_string(), "-0.9");
        assert_eq!(micro(1).to_string(), "0.000001");
        assert_eq!(micro(0).to_string(), "0");
    }
}
