//! Dataset properties: built-ins with native oracles, and user-written
//! SMT-LIB property files.

pub mod builtin;
pub mod file;
pub mod oracle;
pub mod params;

use std::collections::HashSet;
use std::path::Path;

use thiserror::Error;

use crate::dataset::Dataset;
use crate::decimal::DecimalReal;
use crate::sexpr::SexprError;
use crate::smt::{Declaration, FunctionDef, ScriptError, SmtScript, Term};

pub use builtin::{Builtin, DEFAULT_EXPANSION_LIMIT, DEFAULT_GRID_STEP};
pub use file::{load_property_file, parse_property, FileProperty};
pub use oracle::OracleVerdict;
pub use params::{parse_assignment, parse_params, ParamMap, ParamValue};

#[derive(Debug, Error)]
pub enum PropertyError {
    #[error("syntax error: {0}")]
    Syntax(#[from] SexprError),
    #[error("{path}: {source}")]
    InFile {
        path: String,
        #[source]
        source: Box<PropertyError>,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported command `{0}`: property files may only contain assert, define-fun and define-fun-rec")]
    UnsupportedCommand(String),
    #[error("malformed property: {0}")]
    Malformed(String),
    #[error("unknown symbol `{symbol}`; known symbols: {}", candidates.join(", "))]
    UnknownSymbol { symbol: String, candidates: Vec<String> },
    #[error("missing parameter `{0}`")]
    MissingParam(String),
    #[error("parameter `{name}`: {reason}")]
    InvalidParam { name: String, reason: String },
    #[error("{0}")]
    Precondition(String),
    #[error("expanded coverage over {n} features exceeds the limit of {limit}")]
    ExpansionLimit { n: usize, limit: usize },
    #[error("{0}")]
    Shape(String),
    #[error("unknown built-in property `{0}`")]
    UnknownBuiltin(String),
    #[error("specification is empty")]
    EmptySpecification,
    #[error("duplicate property name `{0}`")]
    DuplicateName(String),
    #[error(transparent)]
    Script(#[from] ScriptError),
}

impl PropertyError {
    fn in_file(self, path: &Path) -> PropertyError {
        PropertyError::InFile {
            path: path.display().to_string(),
            source: Box::new(self),
        }
    }
}

/// Dataset dimensions a property is compiled against. `m` is absent when
/// checking a specification without a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub n: usize,
    pub m: Option<usize>,
}

impl Shape {
    pub fn of(ds: &Dataset) -> Shape {
        Shape {
            n: ds.n(),
            m: Some(ds.m()),
        }
    }
}

/// Declarations, definitions and assertions a property adds to a script.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Fragment {
    pub declarations: Vec<Declaration>,
    pub definitions: Vec<FunctionDef>,
    pub assertions: Vec<Term>,
}

impl Fragment {
    /// Appends this fragment to `script`. A declaration identical to one
    /// already present is shared rather than repeated.
    pub fn apply_to(&self, script: &mut SmtScript) -> Result<(), ScriptError> {
        for d in &self.declarations {
            match script.declarations().iter().find(|e| e.name == d.name) {
                Some(existing) if existing == d => {}
                Some(_) => return Err(ScriptError::Duplicate(d.name.clone())),
                None => script.declare(d.name.clone(), d.sort.clone())?,
            }
        }
        for def in &self.definitions {
            script.define(def.clone())?;
        }
        for a in &self.assertions {
            script.assert(a.clone());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PropertyKind {
    Builtin(Builtin),
    File(FileProperty),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Property {
    pub name: String,
    pub kind: PropertyKind,
}

impl Property {
    pub fn compile(&self, shape: &Shape) -> Result<Fragment, PropertyError> {
        match &self.kind {
            PropertyKind::Builtin(b) => b.compile(shape),
            PropertyKind::File(f) => Ok(f.compile()),
        }
    }

    pub fn has_oracle(&self) -> bool {
        matches!(&self.kind, PropertyKind::Builtin(b) if !matches!(b, Builtin::CoverageArray { .. }))
    }

    pub fn oracle(&self, ds: &Dataset) -> Option<OracleVerdict> {
        match &self.kind {
            PropertyKind::Builtin(b) => b.oracle(ds),
            PropertyKind::File(_) => None,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    fn builtin(name: &str, b: Builtin) -> Property {
        Property {
            name: name.to_string(),
            kind: PropertyKind::Builtin(b),
        }
    }

    /// Wraps an SMT-LIB property file; the name is the file stem.
    pub fn from_file(path: &Path, params: &ParamMap) -> Result<Property, PropertyError> {
        let prop = load_property_file(path, params)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        Ok(Property {
            name,
            kind: PropertyKind::File(prop),
        })
    }

    pub fn from_text(name: &str, text: &str, params: &ParamMap) -> Result<Property, PropertyError> {
        Ok(Property {
            name: name.to_string(),
            kind: PropertyKind::File(parse_property(text, params)?),
        })
    }
}

pub fn builtin_min_cardinality(threshold: u64) -> Property {
    Property::builtin("min-cardinality", Builtin::MinCardinality { threshold })
}

pub fn builtin_minmax_normalized(lo: DecimalReal, hi: DecimalReal) -> Result<Property, PropertyError> {
    if lo >= hi {
        return Err(PropertyError::Precondition(format!("min ({lo}) must be below max ({hi})")));
    }
    Ok(Property::builtin("minmax-normalized", Builtin::MinMaxNormalized { lo, hi }))
}

fn check_coverage(delta: &DecimalReal, lo: &DecimalReal, hi: &DecimalReal) -> Result<(), PropertyError> {
    if delta.is_negative() || delta.is_zero() {
        return Err(PropertyError::Precondition(format!("delta ({delta}) must be positive")));
    }
    if lo >= hi {
        return Err(PropertyError::Precondition(format!("min ({lo}) must be below max ({hi})")));
    }
    Ok(())
}

pub fn builtin_coverage_array(delta: DecimalReal, lo: DecimalReal, hi: DecimalReal) -> Result<Property, PropertyError> {
    check_coverage(&delta, &lo, &hi)?;
    Ok(Property::builtin("coverage-array", Builtin::CoverageArray { delta, lo, hi }))
}

/// Coverage over `n` scalar reals. Refuses `n > limit`; the oracle samples a
/// grid with spacing `grid_step`.
pub fn builtin_coverage_expanded(
    delta: DecimalReal,
    lo: DecimalReal,
    hi: DecimalReal,
    n: usize,
    limit: usize,
    grid_step: f64,
) -> Result<Property, PropertyError> {
    check_coverage(&delta, &lo, &hi)?;
    if n > limit {
        return Err(PropertyError::ExpansionLimit { n, limit });
    }
    if grid_step.is_nan() || grid_step <= 0.0 {
        return Err(PropertyError::Precondition("grid step must be positive".into()));
    }
    Ok(Property::builtin(
        "coverage-expanded",
        Builtin::CoverageExpanded {
            delta,
            lo,
            hi,
            n,
            grid_step,
        },
    ))
}

/// `beta` must be at least 1.
pub fn builtin_balanced(beta: &ParamValue) -> Result<Property, PropertyError> {
    let invalid = |reason: &str| PropertyError::InvalidParam {
        name: "beta".into(),
        reason: reason.into(),
    };
    let (num, den) = beta.to_rational().ok_or_else(|| invalid("too many digits"))?;
    if num < den as i128 {
        return Err(invalid("must be at least 1"));
    }
    Ok(Property::builtin(
        "balanced",
        Builtin::Balanced {
            beta_num: num as u128,
            beta_den: den,
        },
    ))
}

pub fn builtin_no_contradictions() -> Property {
    Property::builtin("no-contradictions", Builtin::NoContradictions)
}

/// Names accepted by [`builtin_by_name`].
pub const BUILTIN_NAMES: &[&str] = &[
    "min-cardinality",
    "minmax-normalized",
    "coverage-array",
    "coverage-expanded",
    "balanced",
    "no-contradictions",
];

/// Options for built-ins that are not dataset parameters.
#[derive(Debug, Clone, Copy)]
pub struct BuiltinOptions {
    pub expansion_limit: usize,
    pub grid_step: f64,
}

impl Default for BuiltinOptions {
    fn default() -> Self {
        BuiltinOptions {
            expansion_limit: DEFAULT_EXPANSION_LIMIT,
            grid_step: DEFAULT_GRID_STEP,
        }
    }
}

/// Builds a built-in by name, reading its parameters from `params`:
/// `T` for min-cardinality, `min`/`max` for the bounds, `delta` for coverage
/// and `beta` for balance. `n` is the dataset's feature count.
pub fn builtin_by_name(name: &str, params: &ParamMap, n: usize, opts: BuiltinOptions) -> Result<Property, PropertyError> {
    let get = |key: &str| params.get(key).ok_or_else(|| PropertyError::MissingParam(key.to_string()));
    let decimal = |key: &str| {
        get(key)?.to_decimal().ok_or_else(|| PropertyError::InvalidParam {
            name: key.to_string(),
            reason: "expected a decimal value".into(),
        })
    };
    match name {
        "min-cardinality" => {
            let t = get("T")?
                .to_integer()
                .and_then(|v| u64::try_from(v).ok())
                .ok_or_else(|| PropertyError::InvalidParam {
                    name: "T".into(),
                    reason: "expected a non-negative integer".into(),
                })?;
            Ok(builtin_min_cardinality(t))
        }
        "minmax-normalized" => builtin_minmax_normalized(decimal("min")?, decimal("max")?),
        "coverage-array" => builtin_coverage_array(decimal("delta")?, decimal("min")?, decimal("max")?),
        "coverage-expanded" => builtin_coverage_expanded(
            decimal("delta")?,
            decimal("min")?,
            decimal("max")?,
            n,
            opts.expansion_limit,
            opts.grid_step,
        ),
        "balanced" => builtin_balanced(get("beta")?),
        "no-contradictions" => Ok(builtin_no_contradictions()),
        other => Err(PropertyError::UnknownBuiltin(other.to_string())),
    }
}

/// Extension of property files.
pub const PROPERTY_EXTENSION: &str = "smt2";

/// Loads every `.smt2` file in `dir`, in lexicographic filename order.
pub fn load_directory(dir: &Path, params: &ParamMap) -> Result<Vec<Property>, PropertyError> {
    let io = |source| PropertyError::Io {
        path: dir.display().to_string(),
        source,
    };
    let mut paths = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == PROPERTY_EXTENSION) {
            paths.push(path);
        }
    }
    paths.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    paths.iter().map(|p| Property::from_file(p, params)).collect()
}

/// A non-empty list of uniquely named properties.
#[derive(Debug, Clone, PartialEq)]
pub struct Specification {
    properties: Vec<Property>,
}

impl Specification {
    pub fn new(properties: Vec<Property>) -> Result<Self, PropertyError> {
        if properties.is_empty() {
            return Err(PropertyError::EmptySpecification);
        }
        let mut seen = HashSet::new();
        for p in &properties {
            if !seen.insert(p.name.as_str()) {
                return Err(PropertyError::DuplicateName(p.name.clone()));
            }
        }
        Ok(Specification { properties })
    }

    pub fn properties(&self) -> &[Property] {
        &self.properties
    }

    pub fn len(&self) -> usize {
        self.properties.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}
