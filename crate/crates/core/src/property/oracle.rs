//! Native evaluators for the built-in properties, used to cross-check
//! solver verdicts. Each works directly on the in-memory dataset.

use serde::Serialize;

use crate::dataset::{distinct_labels, Dataset};
use crate::decimal::DecimalReal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OracleVerdict {
    Holds,
    Violated,
}

impl From<bool> for OracleVerdict {
    fn from(holds: bool) -> Self {
        if holds {
            OracleVerdict::Holds
        } else {
            OracleVerdict::Violated
        }
    }
}

pub fn min_cardinality(ds: &Dataset, threshold: u64) -> OracleVerdict {
    (ds.m() as u64 >= threshold).into()
}

pub fn minmax_normalized(ds: &Dataset, lo: &DecimalReal, hi: &DecimalReal) -> OracleVerdict {
    ds.rows()
        .iter()
        .flatten()
        .all(|v| v >= lo && v <= hi)
        .into()
}

/// No label may occur fewer than `m / (beta * l)` times, with
/// `beta = beta_num / beta_den`, compared as `beta_num * l * count >= beta_den * m`.
pub fn balanced(ds: &Dataset, beta_num: u128, beta_den: u128) -> OracleVerdict {
    let labels = distinct_labels(ds);
    let l = labels.len() as u128;
    let m = ds.m() as u128;
    labels
        .labels()
        .iter()
        .all(|label| {
            let count = ds.outputs().iter().filter(|o| *o == label).count() as u128;
            beta_num * l * count >= beta_den * m
        })
        .into()
}

/// No two rows with equal features and different outputs.
pub fn no_contradictions(ds: &Dataset) -> OracleVerdict {
    let rows = ds.rows();
    let outs = ds.outputs();
    for i in 0..rows.len() {
        for k in i + 1..rows.len() {
            if rows[i] == rows[k] && outs[i] != outs[k] {
                return OracleVerdict::Violated;
            }
        }
    }
    OracleVerdict::Holds
}

/// Largest squared distance from a point of the grid over `[lo, hi]^n`
/// (spacing `step`, both ends included) to its nearest dataset row.
pub fn coverage_gap_squared(ds: &Dataset, lo: f64, hi: f64, step: f64) -> f64 {
    assert!(step > 0.0 && lo <= hi, "invalid grid");
    let n = ds.n();
    let rows: Vec<Vec<f64>> = ds
        .rows()
        .iter()
        .map(|r| r.iter().map(DecimalReal::to_f64).collect())
        .collect();
    let ticks = ((hi - lo) / step).round() as usize;
    let coord = |k: usize| if k == ticks { hi } else { lo + k as f64 * step };

    let mut index = vec![0usize; n];
    let mut point = vec![lo; n];
    let mut worst = 0.0f64;
    loop {
        for (p, &k) in point.iter_mut().zip(&index) {
            *p = coord(k);
        }
        let nearest = rows
            .iter()
            .map(|r| r.iter().zip(&point).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(nearest);

        // Odometer increment over the grid.
        let mut d = 0;
        loop {
            if d == n {
                return worst;
            }
            index[d] += 1;
            if index[d] <= ticks {
                break;
            }
            index[d] = 0;
            d += 1;
        }
    }
}

/// Grid verdict for the coverage property: holds when no grid point is
/// farther than `delta` from every row.
pub fn coverage_grid(ds: &Dataset, delta: f64, lo: f64, hi: f64, step: f64) -> OracleVerdict {
    (coverage_gap_squared(ds, lo, hi, step) <= delta * delta).into()
}
