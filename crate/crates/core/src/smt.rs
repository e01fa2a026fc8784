//! SMT-LIB 2 terms and scripts.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::decimal::DecimalReal;
use crate::sexpr::{self, Sexpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error("symbol `{0}` declared twice")]
    Duplicate(String),
    #[error("symbol `{0}` used but not declared")]
    Undeclared(String),
    #[error("unsupported sort `{0}`")]
    Sort(String),
    #[error("malformed definition: {0}")]
    Definition(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Sort {
    Bool,
    Int,
    Real,
    Array(Box<Sort>, Box<Sort>),
}

impl Sort {
    pub fn array(index: Sort, value: Sort) -> Sort {
        Sort::Array(Box::new(index), Box::new(value))
    }

    pub fn from_sexpr(e: &Sexpr) -> Result<Sort, ScriptError> {
        match e {
            Sexpr::Atom(a) => match a.as_str() {
                "Bool" => Ok(Sort::Bool),
                "Int" => Ok(Sort::Int),
                "Real" => Ok(Sort::Real),
                _ => Err(ScriptError::Sort(a.clone())),
            },
            Sexpr::List(items) => match items.as_slice() {
                [Sexpr::Atom(h), index, value] if h == "Array" => {
                    Ok(Sort::array(Sort::from_sexpr(index)?, Sort::from_sexpr(value)?))
                }
                _ => Err(ScriptError::Sort(e.to_string())),
            },
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Bool => f.write_str("Bool"),
            Sort::Int => f.write_str("Int"),
            Sort::Real => f.write_str("Real"),
            Sort::Array(i, v) => write!(f, "(Array {i} {v})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    Exists,
    Forall,
}

/// A term or formula.
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Sym(String),
    Int(i128),
    Real(DecimalReal),
    App(&'static str, Vec<Term>),
    /// Application of a user-defined function.
    Call(String, Vec<Term>),
    Quant(Quantifier, Vec<(String, Sort)>, Box<Term>),
    /// Verbatim expression taken from a property file.
    Raw(Sexpr),
}

#[allow(clippy::should_implement_trait)]
impl Term {
    pub fn sym(name: impl Into<String>) -> Term {
        Term::Sym(name.into())
    }

    pub fn int(v: impl Into<i128>) -> Term {
        Term::Int(v.into())
    }

    pub fn real(v: DecimalReal) -> Term {
        Term::Real(v)
    }

    pub fn tru() -> Term {
        Term::sym("true")
    }

    pub fn select(array: Term, index: Term) -> Term {
        Term::App("select", vec![array, index])
    }

    /// `a[i][j]` for a nested array.
    pub fn select2(array: Term, i: Term, j: Term) -> Term {
        Term::select(Term::select(array, i), j)
    }

    pub fn eq(a: Term, b: Term) -> Term {
        Term::App("=", vec![a, b])
    }

    pub fn lt(a: Term, b: Term) -> Term {
        Term::App("<", vec![a, b])
    }

    pub fn le(a: Term, b: Term) -> Term {
        Term::App("<=", vec![a, b])
    }

    pub fn gt(a: Term, b: Term) -> Term {
        Term::App(">", vec![a, b])
    }

    pub fn ge(a: Term, b: Term) -> Term {
        Term::App(">=", vec![a, b])
    }

    pub fn add(terms: Vec<Term>) -> Term {
        Term::nary("+", terms, Term::int(0))
    }

    pub fn sub(a: Term, b: Term) -> Term {
        Term::App("-", vec![a, b])
    }

    pub fn mul(terms: Vec<Term>) -> Term {
        Term::nary("*", terms, Term::int(1))
    }

    pub fn not(a: Term) -> Term {
        Term::App("not", vec![a])
    }

    pub fn and(terms: Vec<Term>) -> Term {
        Term::nary("and", terms, Term::tru())
    }

    pub fn or(terms: Vec<Term>) -> Term {
        Term::nary("or", terms, Term::sym("false"))
    }

    pub fn implies(a: Term, b: Term) -> Term {
        Term::App("=>", vec![a, b])
    }

    pub fn ite(c: Term, a: Term, b: Term) -> Term {
        Term::App("ite", vec![c, a, b])
    }

    pub fn call(name: impl Into<String>, args: Vec<Term>) -> Term {
        Term::Call(name.into(), args)
    }

    pub fn exists(vars: Vec<(&str, Sort)>, body: Term) -> Term {
        Term::quant(Quantifier::Exists, vars, body)
    }

    pub fn forall(vars: Vec<(&str, Sort)>, body: Term) -> Term {
        Term::quant(Quantifier::Forall, vars, body)
    }

    fn quant(q: Quantifier, vars: Vec<(&str, Sort)>, body: Term) -> Term {
        let vars = vars.into_iter().map(|(n, s)| (n.to_string(), s)).collect();
        Term::Quant(q, vars, Box::new(body))
    }

    /// `lo <= x < hi` over integers.
    pub fn in_range(x: Term, lo: Term, hi: Term) -> Term {
        Term::and(vec![Term::ge(x.clone(), lo), Term::lt(x, hi)])
    }

    fn nary(op: &'static str, mut terms: Vec<Term>, unit: Term) -> Term {
        match terms.len() {
            0 => unit,
            1 => terms.pop().unwrap(),
            _ => Term::App(op, terms),
        }
    }

    pub fn to_sexpr(&self) -> Sexpr {
        match self {
            Term::Sym(s) => Sexpr::atom(s.clone()),
            Term::Int(v) if *v < 0 => Sexpr::List(vec![Sexpr::atom("-"), Sexpr::atom(v.unsigned_abs().to_string())]),
            Term::Int(v) => Sexpr::atom(v.to_string()),
            // Re-parsed so free-symbol analysis sees the same structure the solver does.
            Term::Real(v) => sexpr::parse_all(&v.to_smtlib()).expect("numeral parses").remove(0),
            Term::App(op, args) => {
                let mut items = vec![Sexpr::atom(*op)];
                items.extend(args.iter().map(Term::to_sexpr));
                Sexpr::List(items)
            }
            Term::Call(f, args) => {
                let mut items = vec![Sexpr::atom(f.clone())];
                items.extend(args.iter().map(Term::to_sexpr));
                Sexpr::List(items)
            }
            Term::Quant(q, vars, body) => {
                let binder = match q {
                    Quantifier::Exists => "exists",
                    Quantifier::Forall => "forall",
                };
                let vars = vars
                    .iter()
                    .map(|(n, s)| Sexpr::List(vec![Sexpr::atom(n.clone()), Sexpr::atom(s.to_string())]))
                    .collect();
                Sexpr::List(vec![Sexpr::atom(binder), Sexpr::List(vars), body.to_sexpr()])
            }
            Term::Raw(e) => e.clone(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Sym(s) => f.write_str(s),
            Term::Int(v) if *v < 0 => write!(f, "(- {})", v.unsigned_abs()),
            Term::Int(v) => write!(f, "{v}"),
            Term::Real(v) => f.write_str(&v.to_smtlib()),
            Term::App(op, args) => write_app(f, op, args),
            Term::Call(name, args) => write_app(f, name, args),
            Term::Quant(q, vars, body) => {
                let binder = match q {
                    Quantifier::Exists => "exists",
                    Quantifier::Forall => "forall",
                };
                write!(f, "({binder} (")?;
                for (i, (n, s)) in vars.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "({n} {s})")?;
                }
                write!(f, ") {body})")
            }
            Term::Raw(e) => write!(f, "{e}"),
        }
    }
}

fn write_app(f: &mut fmt::Formatter<'_>, op: &str, args: &[Term]) -> fmt::Result {
    write!(f, "({op}")?;
    for a in args {
        write!(f, " {a}")?;
    }
    f.write_str(")")
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Declaration {
    pub name: String,
    pub sort: Sort,
}

/// `define-fun` or `define-fun-rec`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDef {
    pub name: String,
    pub params: Vec<(String, Sort)>,
    pub returns: Sort,
    pub body: Term,
    pub recursive: bool,
}

impl FunctionDef {
    /// Reads a `(define-fun ...)` or `(define-fun-rec ...)` command.
    pub fn from_sexpr(e: &Sexpr) -> Result<FunctionDef, ScriptError> {
        let bad = || ScriptError::Definition(e.to_string());
        let items = e.as_list().ok_or_else(bad)?;
        let recursive = match items.first().and_then(Sexpr::as_atom) {
            Some("define-fun") => false,
            Some("define-fun-rec") => true,
            _ => return Err(bad()),
        };
        let [_, name, params, returns, body] = items else {
            return Err(bad());
        };
        let name = name.as_atom().ok_or_else(bad)?.to_string();
        let params = params
            .as_list()
            .ok_or_else(bad)?
            .iter()
            .map(|p| match p.as_list() {
                Some([Sexpr::Atom(n), s]) => Ok((n.clone(), Sort::from_sexpr(s)?)),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FunctionDef {
            name,
            params,
            returns: Sort::from_sexpr(returns)?,
            body: Term::Raw(body.clone()),
            recursive,
        })
    }
}

impl fmt::Display for FunctionDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cmd = if self.recursive { "define-fun-rec" } else { "define-fun" };
        write!(f, "({cmd} {} (", self.name)?;
        for (i, (n, s)) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "({n} {s})")?;
        }
        write!(f, ") {} {})", self.returns, self.body)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Epilogue {
    pub check_sat: bool,
    pub get_model: bool,
}

/// An SMT-LIB 2 script: logic, declarations, definitions, assertions and the
/// trailing check commands, rendered in that order one command per line.
#[derive(Debug, Clone, PartialEq)]
pub struct SmtScript {
    pub logic: String,
    declarations: Vec<Declaration>,
    definitions: Vec<FunctionDef>,
    assertions: Vec<Term>,
    pub epilogue: Epilogue,
}

impl Default for SmtScript {
    fn default() -> Self {
        SmtScript::new()
    }
}

impl SmtScript {
    /// Quantifiers, arrays, mixed arithmetic and recursive definitions all
    /// need to be available, so the most permissive logic is requested.
    pub const DEFAULT_LOGIC: &'static str = "ALL";

    pub fn new() -> Self {
        SmtScript {
            logic: Self::DEFAULT_LOGIC.to_string(),
            declarations: Vec::new(),
            definitions: Vec::new(),
            assertions: Vec::new(),
            epilogue: Epilogue {
                check_sat: true,
                get_model: false,
            },
        }
    }

    pub fn declarations(&self) -> &[Declaration] {
        &self.declarations
    }

    pub fn definitions(&self) -> &[FunctionDef] {
        &self.definitions
    }

    pub fn assertions(&self) -> &[Term] {
        &self.assertions
    }

    fn is_bound(&self, name: &str) -> bool {
        self.declarations.iter().any(|d| d.name == name) || self.definitions.iter().any(|d| d.name == name)
    }

    pub fn declare(&mut self, name: impl Into<String>, sort: Sort) -> Result<(), ScriptError> {
        let name = name.into();
        if self.is_bound(&name) {
            return Err(ScriptError::Duplicate(name));
        }
        self.declarations.push(Declaration { name, sort });
        Ok(())
    }

    /// Adds a definition. Re-adding an identical definition is a no-op.
    pub fn define(&mut self, def: FunctionDef) -> Result<(), ScriptError> {
        if let Some(existing) = self.definitions.iter().find(|d| d.name == def.name) {
            return if existing.to_string() == def.to_string() {
                Ok(())
            } else {
                Err(ScriptError::Duplicate(def.name))
            };
        }
        if self.declarations.iter().any(|d| d.name == def.name) {
            return Err(ScriptError::Duplicate(def.name));
        }
        self.definitions.push(def);
        Ok(())
    }

    pub fn assert(&mut self, t: Term) {
        self.assertions.push(t);
    }

    /// Checks that every symbol is declared exactly once and every free
    /// symbol of an assertion or definition body is declared or defined.
    pub fn validate(&self) -> Result<(), ScriptError> {
        let mut seen = HashSet::new();
        let names = self
            .declarations
            .iter()
            .map(|d| &d.name)
            .chain(self.definitions.iter().map(|d| &d.name));
        for name in names {
            if !seen.insert(name.as_str()) {
                return Err(ScriptError::Duplicate(name.clone()));
            }
        }
        for def in &self.definitions {
            let mut free = sexpr::free_symbols(&def.body.to_sexpr());
            for (p, _) in &def.params {
                free.remove(p);
            }
            self.check_known(free)?;
        }
        for a in &self.assertions {
            self.check_known(sexpr::free_symbols(&a.to_sexpr()))?;
        }
        Ok(())
    }

    fn check_known(&self, free: BTreeSet<String>) -> Result<(), ScriptError> {
        match free.into_iter().find(|s| !self.is_bound(s)) {
            Some(s) => Err(ScriptError::Undeclared(s)),
            None => Ok(()),
        }
    }

    /// Deterministic text, one command per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("(set-logic {})\n", self.logic));
        for d in &self.declarations {
            out.push_str(&format!("(declare-const {} {})\n", d.name, d.sort));
        }
        for def in &self.definitions {
            out.push_str(&format!("{def}\n"));
        }
        for a in &self.assertions {
            out.push_str(&format!("(assert {a})\n"));
        }
        if self.epilogue.check_sat {
            out.push_str("(check-sat)\n");
        }
        if self.epilogue.get_model {
            out.push_str("(get-model)\n");
        }
        out
    }
}

impl fmt::Display for SmtScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
