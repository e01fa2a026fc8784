mod common;

use dsverify::encoder::{encode_dataset, environment};
use dsverify::property::ParamMap;
use dsverify::sexpr::{parse_all, Sexpr};
use dsverify::smt::Term;
use dsverify::solver::{check_text, UnknownReason};
use dsverify::{check_sat, distinct_labels, get_model, verify, Outcome, Property, Specification};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{decimal_dataset, sample, solver};

#[test]
fn assertion_count_matches_shape() {
    let ds = sample();
    let script = encode_dataset(&ds, &distinct_labels(&ds));
    // m*n cells, m outputs, 3 labels, and the three sizes
    assert_eq!(script.assertions().len(), 10 * 2 + 10 + 3 + 3);
    assert_eq!(script.declarations().len(), environment().declarations().len());
}

#[test]
fn encoding_is_byte_identical() {
    let a = encode_dataset(&sample(), &distinct_labels(&sample())).render();
    let b = encode_dataset(&sample(), &distinct_labels(&sample())).render();
    assert_eq!(a, b);
    assert!(a.contains("(assert (= (select (select D 1) 0) (- 0.092742)))"), "{a}");
    assert!(a.contains("(assert (= l 3))"));
}

#[test]
fn encodings_are_satisfiable() {
    let Some(cfg) = solver() else { return };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let (m, n) = (rng.gen_range(1..=12), rng.gen_range(1..=4));
        let ds = decimal_dataset(&mut rng, m, n);
        let verdict = check_sat(&encode_dataset(&ds, &distinct_labels(&ds)), &cfg);
        assert_eq!(verdict.outcome, Outcome::Holds, "{}", ds.to_csv());
    }
}

#[test]
fn negative_literal_is_the_negated_positive() {
    let Some(cfg) = solver() else { return };
    let same = "(set-logic ALL)(assert (= (- 0.092742) (- 0.0 0.092742)))(check-sat)";
    assert_eq!(check_text(same, &cfg).outcome, Outcome::Holds);
    let differ = "(set-logic ALL)(assert (not (= (- 0.092742) (- 0.0 0.092742))))(check-sat)";
    assert_eq!(check_text(differ, &cfg).outcome, Outcome::Violated);
}

#[test]
fn false_property_is_violated_and_true_holds() {
    let Some(cfg) = solver() else { return };
    let none = ParamMap::new();
    let spec = Specification::new(vec![
        Property::from_text("false", "(assert false)", &none).unwrap(),
        Property::from_text("true", "(assert true)", &none).unwrap(),
    ])
    .unwrap();
    let report = verify(&sample(), &spec, &cfg);
    assert_eq!(report.entries[0].verdict.outcome, Outcome::Violated);
    assert_eq!(report.entries[1].verdict.outcome, Outcome::Holds);
}

#[test]
fn model_reproduces_the_dataset() {
    let Some(cfg) = solver() else { return };
    let ds = sample();
    let script = encode_dataset(&ds, &distinct_labels(&ds));
    let model = get_model(&script, &cfg).unwrap();

    let parsed = parse_all(&model).unwrap();
    let items: Vec<&Sexpr> = match parsed.as_slice() {
        [Sexpr::List(items)] => items.iter().collect(),
        other => other.iter().collect(),
    };
    let definitions: Vec<String> = items
        .iter()
        .filter(|e| matches!(e.as_list(), Some([Sexpr::Atom(head), ..]) if head == "define-fun"))
        .map(|e| e.to_string())
        .collect();
    assert!(definitions.iter().any(|d| d.starts_with("(define-fun m () Int 10)")), "{model}");

    // Under the model's interpretation, some encoded equality failing is unsatisfiable.
    let every_cell = Term::and(script.assertions().to_vec());
    let text = format!(
        "(set-logic ALL)\n{}\n(assert {})\n(check-sat)\n",
        definitions.join("\n"),
        Term::not(every_cell)
    );
    assert_eq!(check_text(&text, &cfg).outcome, Outcome::Violated, "{text}");
}

#[test]
fn timeout_is_reported_as_unknown() {
    let Some(cfg) = solver() else { return };
    let cfg = cfg.with_timeout(std::time::Duration::from_millis(300));
    // A nonlinear integer problem z3 cannot settle quickly.
    let hard = "(set-logic ALL)(declare-const x Int)(declare-const y Int)(declare-const z Int)\
                (assert (> x 1))(assert (> y 1))(assert (> z 1))\
                (assert (= (+ (* x x x) (* y y y)) (* z z z)))(check-sat)";
    let verdict = check_text(hard, &cfg);
    assert!(
        matches!(verdict.outcome, Outcome::Unknown(UnknownReason::Timeout | UnknownReason::Solver)),
        "{:?}",
        verdict.outcome
    );
}
