//! Built-in dataset properties.

use crate::dataset::Dataset;
use crate::decimal::DecimalReal;
use crate::encoder::{FEATURES, LABELS, LABEL_COUNT, MATRIX, OUTPUTS, ROWS};
use crate::smt::{FunctionDef, Sort, Term};

use super::oracle::{self, OracleVerdict};
use super::{Fragment, PropertyError, Shape};

/// Name of the recursive label-counting function used by the balance property.
pub const COUNT_FN: &str = "count_label";

/// Expanded coverage is refused above this many features unless overridden.
pub const DEFAULT_EXPANSION_LIMIT: usize = 8;

/// Grid spacing of the expanded-coverage oracle unless overridden.
pub const DEFAULT_GRID_STEP: f64 = 0.01;

/// Above this many row pairs, no-contradictions stays quantified.
pub const MAX_UNROLLED_PAIRS: usize = 50_000;

#[derive(Debug, Clone, PartialEq)]
pub enum Builtin {
    /// `m >= threshold`.
    MinCardinality { threshold: u64 },
    /// Every feature value lies in `[lo, hi]`.
    MinMaxNormalized { lo: DecimalReal, hi: DecimalReal },
    /// No point of `[lo, hi]^n` is farther than `delta` from every row, with
    /// the point quantified as an array.
    CoverageArray {
        delta: DecimalReal,
        lo: DecimalReal,
        hi: DecimalReal,
    },
    /// Same as `CoverageArray` but over `n` scalar reals.
    CoverageExpanded {
        delta: DecimalReal,
        lo: DecimalReal,
        hi: DecimalReal,
        n: usize,
        grid_step: f64,
    },
    /// No label has fewer than `m / (beta * l)` examples.
    Balanced { beta_num: u128, beta_den: u128 },
    /// No two rows with equal features and different outputs.
    NoContradictions,
}

fn sym(s: &str) -> Term {
    Term::sym(s)
}

fn idx(v: usize) -> Term {
    Term::Int(v as i128)
}

fn square(t: Term) -> Term {
    Term::mul(vec![t.clone(), t])
}

/// Exact `v * v`.
fn squared(v: &DecimalReal) -> DecimalReal {
    match v.to_scaled() {
        Some((num, scale)) if num.checked_mul(num).is_some() => {
            let sq = (num * num).to_string();
            let scale = 2 * scale as usize;
            let padded = format!("{sq:0>width$}", width = scale + 1);
            let (int, frac) = padded.split_at(padded.len() - scale);
            format!("{int}.{frac}").parse().expect("digits parse")
        }
        // Too many digits for exact squaring here; fall back to float.
        _ => format!("{}", v.to_f64() * v.to_f64()).parse().expect("finite square"),
    }
}

impl Builtin {
    pub fn compile(&self, shape: &Shape) -> Result<Fragment, PropertyError> {
        let mut frag = Fragment::default();
        match self {
            Builtin::MinCardinality { threshold } => {
                frag.assertions.push(Term::ge(sym(ROWS), Term::Int(*threshold as i128)));
            }

            Builtin::MinMaxNormalized { lo, hi } => {
                let outside = |cell: Term| {
                    Term::or(vec![
                        Term::lt(cell.clone(), Term::real(lo.clone())),
                        Term::gt(cell, Term::real(hi.clone())),
                    ])
                };
                let assertion = match shape.m {
                    // Row count known: one disjunct per cell instead of a
                    // quantifier the solver has to instantiate cell by cell.
                    Some(m) => Term::not(Term::or(
                        (0..m)
                            .flat_map(|i| (0..shape.n).map(move |j| (i, j)))
                            .map(|(i, j)| outside(Term::select2(sym(MATRIX), idx(i), idx(j))))
                            .collect(),
                    )),
                    None => Term::not(Term::exists(
                        vec![("i", Sort::Int), ("j", Sort::Int)],
                        Term::and(vec![
                            Term::ge(sym("i"), idx(0)),
                            Term::lt(sym("i"), sym(ROWS)),
                            Term::ge(sym("j"), idx(0)),
                            Term::lt(sym("j"), sym(FEATURES)),
                            outside(Term::select2(sym(MATRIX), sym("i"), sym("j"))),
                        ]),
                    )),
                };
                frag.assertions.push(assertion);
            }

            Builtin::CoverageArray { delta, lo, hi } => {
                let p = |k: Term| Term::select(sym("p"), k);
                let bounded = Term::forall(
                    vec![("k", Sort::Int)],
                    Term::implies(
                        Term::in_range(sym("k"), idx(0), sym(FEATURES)),
                        Term::and(vec![
                            Term::le(Term::real(lo.clone()), p(sym("k"))),
                            Term::le(p(sym("k")), Term::real(hi.clone())),
                        ]),
                    ),
                );
                let dist = Term::add(
                    (0..shape.n)
                        .map(|j| square(Term::sub(p(idx(j)), Term::select2(sym(MATRIX), sym("i"), idx(j)))))
                        .collect(),
                );
                let far = Term::forall(
                    vec![("i", Sort::Int)],
                    Term::implies(
                        Term::in_range(sym("i"), idx(0), sym(ROWS)),
                        Term::gt(dist, Term::real(squared(delta))),
                    ),
                );
                frag.assertions.push(Term::not(Term::exists(
                    vec![("p", Sort::array(Sort::Int, Sort::Real))],
                    Term::and(vec![bounded, far]),
                )));
            }

            Builtin::CoverageExpanded { delta, lo, hi, n, .. } => {
                if shape.n != *n {
                    return Err(PropertyError::Shape(format!(
                        "expanded coverage was built for {n} features, dataset has {}",
                        shape.n
                    )));
                }
                let names: Vec<String> = (0..*n).map(|j| format!("p{j}")).collect();
                let mut conj: Vec<Term> = Vec::new();
                for name in &names {
                    conj.push(Term::le(Term::real(lo.clone()), sym(name)));
                    conj.push(Term::le(sym(name), Term::real(hi.clone())));
                }
                let bound = Term::real(squared(delta));
                let dist_to = |row: Term| {
                    Term::add(
                        names
                            .iter()
                            .enumerate()
                            .map(|(j, name)| square(Term::sub(sym(name), Term::select2(sym(MATRIX), row.clone(), idx(j)))))
                            .collect(),
                    )
                };
                match shape.m {
                    // Row count known: unroll the rows too, leaving a single
                    // block of existentials over reals.
                    Some(m) => conj.extend((0..m).map(|i| Term::gt(dist_to(idx(i)), bound.clone()))),
                    None => conj.push(Term::forall(
                        vec![("i", Sort::Int)],
                        Term::implies(Term::in_range(sym("i"), idx(0), sym(ROWS)), Term::gt(dist_to(sym("i")), bound)),
                    )),
                }
                let vars = names.iter().map(|s| (s.as_str(), Sort::Real)).collect();
                frag.assertions.push(Term::not(Term::exists(vars, Term::and(conj))));
            }

            Builtin::Balanced { beta_num, beta_den } => {
                frag.definitions.push(count_function());
                let count = Term::call(COUNT_FN, vec![sym(OUTPUTS), Term::select(sym(LABELS), sym("i")), sym(ROWS)]);
                frag.assertions.push(Term::not(Term::exists(
                    vec![("i", Sort::Int)],
                    Term::and(vec![
                        Term::ge(sym("i"), idx(0)),
                        Term::lt(sym("i"), sym(LABEL_COUNT)),
                        Term::lt(
                            Term::mul(vec![Term::Int(*beta_num as i128), sym(LABEL_COUNT), count]),
                            Term::mul(vec![Term::Int(*beta_den as i128), sym(ROWS)]),
                        ),
                    ]),
                )));
            }

            Builtin::NoContradictions => {
                let clash = |i: Term, k: Term| {
                    let mut conj: Vec<Term> = (0..shape.n)
                        .map(|j| Term::eq(Term::select2(sym(MATRIX), i.clone(), idx(j)), Term::select2(sym(MATRIX), k.clone(), idx(j))))
                        .collect();
                    conj.push(Term::not(Term::eq(Term::select(sym(OUTPUTS), i), Term::select(sym(OUTPUTS), k))));
                    conj
                };
                let assertion = match shape.m {
                    Some(m) if m * m.saturating_sub(1) / 2 <= MAX_UNROLLED_PAIRS => Term::not(Term::or(
                        (0..m)
                            .flat_map(|i| (i + 1..m).map(move |k| (i, k)))
                            .map(|(i, k)| Term::and(clash(idx(i), idx(k))))
                            .collect(),
                    )),
                    _ => {
                        let mut conj = vec![
                            Term::ge(sym("i"), idx(0)),
                            Term::lt(sym("i"), sym(ROWS)),
                            Term::ge(sym("k"), idx(0)),
                            Term::lt(sym("k"), sym(ROWS)),
                            Term::not(Term::eq(sym("i"), sym("k"))),
                        ];
                        conj.extend(clash(sym("i"), sym("k")));
                        Term::not(Term::exists(vec![("i", Sort::Int), ("k", Sort::Int)], Term::and(conj)))
                    }
                };
                frag.assertions.push(assertion);
            }
        }
        Ok(frag)
    }

    /// Native verdict, when this property has an oracle.
    pub fn oracle(&self, ds: &Dataset) -> Option<OracleVerdict> {
        Some(match self {
            Builtin::MinCardinality { threshold } => oracle::min_cardinality(ds, *threshold),
            Builtin::MinMaxNormalized { lo, hi } => oracle::minmax_normalized(ds, lo, hi),
            Builtin::CoverageArray { .. } => return None,
            Builtin::CoverageExpanded {
                delta,
                lo,
                hi,
                grid_step,
                ..
            } => oracle::coverage_grid(ds, delta.to_f64(), lo.to_f64(), hi.to_f64(), *grid_step),
            Builtin::Balanced { beta_num, beta_den } => oracle::balanced(ds, *beta_num, *beta_den),
            Builtin::NoContradictions => oracle::no_contradictions(ds),
        })
    }
}

/// `count_label(A, v, s)`: occurrences of `v` in `A[0..s)`.
fn count_function() -> FunctionDef {
    let (a, v, s) = (sym("A"), sym("v"), sym("s"));
    let prev = Term::sub(s.clone(), idx(1));
    FunctionDef {
        name: COUNT_FN.to_string(),
        params: vec![
            ("A".into(), Sort::array(Sort::Int, Sort::Real)),
            ("v".into(), Sort::Real),
            ("s".into(), Sort::Int),
        ],
        returns: Sort::Int,
        body: Term::ite(
            Term::le(s.clone(), idx(0)),
            idx(0),
            Term::add(vec![
                Term::call(COUNT_FN, vec![a.clone(), v.clone(), prev.clone()]),
                Term::ite(Term::eq(Term::select(a, prev), v), idx(1), idx(0)),
            ]),
        ),
        recursive: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> DecimalReal {
        s.parse().unwrap()
    }

    #[test]
    fn exact_squares() {
        assert_eq!(squared(&d("1")), d("1"));
        assert_eq!(squared(&d("0.1")), d("0.01"));
        assert_eq!(squared(&d("-1.5")), d("2.25"));
        assert_eq!(squared(&d("12.34")), d("152.2756"));
    }

    #[test]
    fn minmax_text() {
        let frag = Builtin::MinMaxNormalized { lo: d("-1"), hi: d("1") }
            .compile(&Shape { n: 2, m: None })
            .unwrap();
        assert_eq!(
            frag.assertions[0].to_string(),
            "(not (exists ((i Int) (j Int)) (and (>= i 0) (< i m) (>= j 0) (< j n) \
             (or (< (select (select D i) j) (- 1.0)) (> (select (select D i) j) 1.0)))))"
        );
    }

    #[test]
    fn count_function_text() {
        assert_eq!(
            count_function().to_string(),
            "(define-fun-rec count_label ((A (Array Int Real)) (v Real) (s Int)) Int \
             (ite (<= s 0) 0 (+ (count_label A v (- s 1)) (ite (= (select A (- s 1)) v) 1 0))))"
        );
    }

    #[test]
    fn expanded_unrolls_rows_when_known() {
        let b = Builtin::CoverageExpanded {
            delta: d("1"),
            lo: d("-1"),
            hi: d("1"),
            n: 2,
            grid_step: DEFAULT_GRID_STEP,
        };
        let known = b.compile(&Shape { n: 2, m: Some(3) }).unwrap().assertions[0].to_string();
        assert!(!known.contains("forall"));
        assert_eq!(known.matches("(> (+").count(), 3);
        let open = b.compile(&Shape { n: 2, m: None }).unwrap().assertions[0].to_string();
        assert!(open.contains("(forall ((i Int))"));
        assert!(b.compile(&Shape { n: 3, m: None }).is_err());
    }

    #[test]
    fn no_contradiction_expands_columns() {
        let text = Builtin::NoContradictions.compile(&Shape { n: 3, m: None }).unwrap().assertions[0].to_string();
        assert_eq!(text.matches("(= (select (select D i)").count(), 3);
    }

    #[test]
    fn known_rows_unroll_cells_and_pairs() {
        let mm = Builtin::MinMaxNormalized { lo: d("0"), hi: d("1") }
            .compile(&Shape { n: 2, m: Some(3) })
            .unwrap()
            .assertions[0]
            .to_string();
        assert!(!mm.contains("exists"));
        assert_eq!(mm.matches("(< (select (select D").count(), 6);
        assert!(mm.contains("(> (select (select D 2) 1) 1.0)"));

        let nc = Builtin::NoContradictions.compile(&Shape { n: 2, m: Some(4) }).unwrap().assertions[0].to_string();
        assert!(!nc.contains("exists"));
        assert_eq!(nc.matches("(not (= (select O").count(), 6);
        assert!(nc.contains("(= (select (select D 2) 1) (select (select D 3) 1))"));

        let single = Builtin::NoContradictions.compile(&Shape { n: 2, m: Some(1) }).unwrap().assertions[0].to_string();
        assert_eq!(single, "(not false)");
    }
}
