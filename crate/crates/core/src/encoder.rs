//! Dataset to formula translation.
//!
//! The dataset becomes a conjunction over six symbols: integer sizes `m`,
//! `n`, `l`, the feature matrix `D : Int -> Int -> Real`, the output vector
//! `O : Int -> Real` and the distinct-label vector `L : Int -> Real`. Cells
//! outside `[0,m) x [0,n)` are left unconstrained, so properties have to bound
//! their own quantifiers.

use crate::dataset::{Dataset, LabelSet};
use crate::decimal::DecimalReal;
use crate::smt::{SmtScript, Sort, Term};

pub const ROWS: &str = "m";
pub const FEATURES: &str = "n";
pub const LABEL_COUNT: &str = "l";
pub const MATRIX: &str = "D";
pub const OUTPUTS: &str = "O";
pub const LABELS: &str = "L";

/// The symbols every property may reference.
pub const ENVIRONMENT: [&str; 6] = [ROWS, FEATURES, LABEL_COUNT, MATRIX, OUTPUTS, LABELS];

/// SMT-LIB numeral for an exact decimal.
pub fn serialize_real(v: &DecimalReal) -> String {
    v.to_smtlib()
}

/// A script that declares the dataset symbols and asserts nothing about them.
pub fn environment() -> SmtScript {
    let mut script = SmtScript::new();
    let real_array = Sort::array(Sort::Int, Sort::Real);
    let decls = [
        (ROWS, Sort::Int),
        (FEATURES, Sort::Int),
        (LABEL_COUNT, Sort::Int),
        (MATRIX, Sort::array(Sort::Int, real_array.clone())),
        (OUTPUTS, real_array.clone()),
        (LABELS, real_array),
    ];
    for (name, sort) in decls {
        script.declare(name, sort).expect("fresh script");
    }
    script
}

/// Encodes `ds` with its label set `ls` (which must be `distinct_labels(ds)`).
///
/// Assertions come out in scan order: `m`, `n`, then per row its cells, its
/// output and, on the first occurrence of that output, the next label slot,
/// and finally `l`.
pub fn encode_dataset(ds: &Dataset, ls: &LabelSet) -> SmtScript {
    let mut script = environment();
    let count = |v: usize| Term::Int(v as i128);

    script.assert(Term::eq(Term::sym(ROWS), count(ds.m())));
    script.assert(Term::eq(Term::sym(FEATURES), count(ds.n())));

    let mut added = 0usize;
    for (i, (row, output)) in ds.rows().iter().zip(ds.outputs()).enumerate() {
        for (j, v) in row.iter().enumerate() {
            script.assert(Term::eq(
                Term::select2(Term::sym(MATRIX), count(i), count(j)),
                Term::real(v.clone()),
            ));
        }
        script.assert(Term::eq(
            Term::select(Term::sym(OUTPUTS), count(i)),
            Term::real(output.clone()),
        ));
        let first_seen = !ls.labels()[..added].contains(output);
        if first_seen {
            debug_assert_eq!(ls.labels().get(added), Some(output), "label set out of order");
            script.assert(Term::eq(
                Term::select(Term::sym(LABELS), count(added)),
                Term::real(output.clone()),
            ));
            added += 1;
        }
    }
    debug_assert_eq!(added, ls.len());

    script.assert(Term::eq(Term::sym(LABEL_COUNT), count(added)));
    script
}
