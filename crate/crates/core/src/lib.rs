//! Formal verification of structured machine-learning datasets.
//!
//! A dataset (feature matrix plus output vector) is encoded as a first-order
//! formula over integer sizes and real-valued arrays. Each property is
//! conjoined with that encoding and handed to an external SMT solver; a
//! satisfiable conjunction means the dataset holds the property.

pub mod cli;
pub mod dataset;
pub mod decimal;
pub mod encoder;
pub mod property;
pub mod report;
pub mod sexpr;
pub mod smt;
pub mod solver;
pub mod synthetic;
pub mod verifier;

pub use dataset::{distinct_labels, load_csv, CsvOptions, Dataset, LabelSet};
pub use decimal::DecimalReal;
pub use encoder::encode_dataset;
pub use property::{Property, Specification};
pub use solver::{check_sat, get_model, Outcome, SolverConfig, Verdict};
pub use verifier::{check_consistency, incremental_verify, verify};
