//! Properties written directly in SMT-LIB, one per file.
//!
//! A property file holds `assert` commands and, optionally, helper
//! `define-fun` / `define-fun-rec` definitions. It may reference the dataset
//! symbols and any supplied parameter; parameters are declared as constants
//! and fixed to their values ahead of the property text.

use std::collections::BTreeSet;
use std::path::Path;

use crate::encoder::{ENVIRONMENT, LABELS, MATRIX, OUTPUTS};
use crate::sexpr::{self, Sexpr};
use crate::smt::{Declaration, FunctionDef, Sort, Term};

use super::params::{ParamMap, ParamValue};
use super::{Fragment, PropertyError};

#[derive(Debug, Clone, PartialEq)]
pub struct FileProperty {
    pub definitions: Vec<FunctionDef>,
    pub assertions: Vec<Sexpr>,
    /// Parameters the text references, with the sort they are declared at.
    pub params: Vec<(String, Sort, ParamValue)>,
}

impl FileProperty {
    pub fn compile(&self) -> Fragment {
        let mut frag = Fragment::default();
        for (name, sort, value) in &self.params {
            frag.declarations.push(Declaration {
                name: name.clone(),
                sort: sort.clone(),
            });
            let v = match sort {
                Sort::Int => value.int_term().expect("int-sorted params are integral"),
                _ => value.real_term(),
            };
            frag.assertions.push(Term::eq(Term::sym(name.clone()), v));
        }
        frag.definitions = self.definitions.clone();
        frag.assertions.extend(self.assertions.iter().cloned().map(Term::Raw));
        frag
    }
}

pub fn load_property_file(path: &Path, params: &ParamMap) -> Result<FileProperty, PropertyError> {
    let text = std::fs::read_to_string(path).map_err(|source| PropertyError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_property(&text, params).map_err(|e| e.in_file(path))
}

/// Parses property text against the dataset symbols plus `params`.
pub fn parse_property(text: &str, params: &ParamMap) -> Result<FileProperty, PropertyError> {
    let commands = sexpr::parse_all(text)?;
    let mut definitions = Vec::new();
    let mut assertions = Vec::new();

    for cmd in &commands {
        match cmd.head() {
            Some("assert") => match cmd.as_list() {
                Some([_, body]) => assertions.push(body.clone()),
                _ => return Err(PropertyError::Malformed(cmd.to_string())),
            },
            Some("define-fun") | Some("define-fun-rec") => {
                let def = FunctionDef::from_sexpr(cmd).map_err(|e| PropertyError::Malformed(e.to_string()))?;
                definitions.push(def);
            }
            Some(other) => return Err(PropertyError::UnsupportedCommand(other.to_string())),
            None => return Err(PropertyError::Malformed(cmd.to_string())),
        }
    }
    if assertions.is_empty() {
        return Err(PropertyError::Malformed("no assertions".into()));
    }

    let defined: BTreeSet<&str> = definitions.iter().map(|d| d.name.as_str()).collect();
    let known = |s: &str| ENVIRONMENT.contains(&s) || params.contains_key(s) || defined.contains(s);

    let mut used = BTreeSet::new();
    let mut check = |free: BTreeSet<String>| -> Result<(), PropertyError> {
        for s in free {
            if !known(&s) {
                let mut candidates: Vec<String> = ENVIRONMENT.iter().map(|s| s.to_string()).collect();
                candidates.extend(params.keys().cloned());
                candidates.extend(defined.iter().map(|s| s.to_string()));
                return Err(PropertyError::UnknownSymbol { symbol: s, candidates });
            }
            if params.contains_key(&s) && !ENVIRONMENT.contains(&s.as_str()) && !defined.contains(s.as_str()) {
                used.insert(s);
            }
        }
        Ok(())
    };
    for def in &definitions {
        let mut free = sexpr::free_symbols(&def.body.to_sexpr());
        for (p, _) in &def.params {
            free.remove(p);
        }
        check(free)?;
    }
    for a in &assertions {
        check(sexpr::free_symbols(a))?;
    }

    let bodies: Vec<Sexpr> = definitions
        .iter()
        .map(|d| d.body.to_sexpr())
        .chain(assertions.iter().cloned())
        .collect();
    let real_params: Vec<String> = definitions
        .iter()
        .flat_map(|d| d.params.iter())
        .filter(|(_, s)| *s == Sort::Real)
        .map(|(n, _)| n.clone())
        .collect();
    let params = used
        .into_iter()
        .map(|name| {
            let value = params[&name].clone();
            let sort = if value.is_integral() && !used_as_real(&name, &bodies, &real_params) {
                Sort::Int
            } else {
                Sort::Real
            };
            (name, sort, value)
        })
        .collect();

    Ok(FileProperty {
        definitions,
        assertions,
        params,
    })
}

const ARITH: &[&str] = &["=", "distinct", "<", "<=", ">", ">=", "+", "-", "*", "/"];

/// Whether `param` appears as a direct operand next to a real-valued operand.
fn used_as_real(param: &str, bodies: &[Sexpr], real_vars: &[String]) -> bool {
    let mut reals: Vec<String> = real_vars.to_vec();
    bodies.iter().any(|b| scan(param, b, &mut reals))
}

fn scan(param: &str, e: &Sexpr, reals: &mut Vec<String>) -> bool {
    let Some(items) = e.as_list() else {
        return false;
    };
    match e.head() {
        Some("exists") | Some("forall") if items.len() == 3 => {
            let depth = reals.len();
            for v in items[1].as_list().unwrap_or(&[]) {
                if let Some([Sexpr::Atom(n), Sexpr::Atom(s)]) = v.as_list() {
                    if s == "Real" {
                        reals.push(n.clone());
                    }
                }
            }
            let hit = scan(param, &items[2], reals);
            reals.truncate(depth);
            return hit;
        }
        Some(op) if ARITH.contains(&op) => {
            let args = &items[1..];
            if args.iter().any(|a| a.as_atom() == Some(param)) && args.iter().any(|a| is_real(a, reals)) {
                return true;
            }
        }
        _ => {}
    }
    items.iter().any(|i| scan(param, i, reals))
}

fn is_real(e: &Sexpr, reals: &[String]) -> bool {
    match e {
        Sexpr::Atom(a) => (a.contains('.') && a.starts_with(|c: char| c.is_ascii_digit())) || reals.contains(a),
        Sexpr::List(items) => match e.head() {
            Some("select") => match items.get(1) {
                Some(Sexpr::Atom(arr)) => arr == OUTPUTS || arr == LABELS,
                Some(inner) => inner.head() == Some("select") && inner.as_list().and_then(|l| l.get(1)).and_then(Sexpr::as_atom) == Some(MATRIX),
                None => false,
            },
            Some("/") | Some("to_real") => true,
            Some("+") | Some("-") | Some("*") => items[1..].iter().any(|a| is_real(a, reals)),
            Some("ite") => items[2..].iter().any(|a| is_real(a, reals)),
            _ => false,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::property::params::parse_params;

    const NORMALIZED: &str = "(assert\n (not\n  (exists ((i Int) (j Int))\n   (and\n    (>= i 0)\n    (< i m)\n    (>= j 0)\n    (< j n)\n    (or\n     (< (select (select D i) j) min )\n     (> (select (select D i) j) max )\n    )\n   )\n  )\n )\n)\n";

    #[test]
    fn bound_params_are_real() {
        let params = parse_params("min=-1\nmax=1\nunused=4").unwrap();
        let prop = parse_property(NORMALIZED, &params).unwrap();
        let sorts: Vec<_> = prop.params.iter().map(|(n, s, _)| (n.as_str(), s.clone())).collect();
        assert_eq!(sorts, vec![("max", Sort::Real), ("min", Sort::Real)]);
        let frag = prop.compile();
        assert_eq!(frag.assertions[0].to_string(), "(= max 1.0)");
        assert_eq!(frag.assertions[1].to_string(), "(= min (- 1.0))");
    }

    #[test]
    fn integer_params_stay_int() {
        let params = parse_params("T=100").unwrap();
        let prop = parse_property("(assert (>= m T))", &params).unwrap();
        assert_eq!(prop.params[0].1, Sort::Int);
        assert_eq!(prop.compile().assertions[0].to_string(), "(= T 100)");
    }

    #[test]
    fn unknown_symbol_lists_candidates() {
        let params = parse_params("min=0").unwrap();
        match parse_property("(assert (> (select O 0) lower))", &params) {
            Err(PropertyError::UnknownSymbol { symbol, candidates }) => {
                assert_eq!(symbol, "lower");
                assert!(candidates.contains(&"min".to_string()));
                assert!(candidates.contains(&"D".to_string()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_unbalanced_and_commands() {
        let empty = ParamMap::new();
        assert!(matches!(
            parse_property("(assert (> m 1)", &empty),
            Err(PropertyError::Syntax(crate::sexpr::SexprError::Unclosed { line: 1, column: 1 }))
        ));
        assert!(matches!(
            parse_property("(declare-const x Int)\n(assert true)", &empty),
            Err(PropertyError::UnsupportedCommand(_))
        ));
        assert!(matches!(parse_property("(check-sat)", &empty), Err(PropertyError::UnsupportedCommand(_))));
        assert!(parse_property("; nothing", &empty).is_err());
    }

    #[test]
    fn definitions_are_known_symbols() {
        let text = "(define-fun big ((x Real)) Bool (> x 10.0))\n(assert (not (big (select O 0))))";
        let prop = parse_property(text, &ParamMap::new()).unwrap();
        assert_eq!(prop.definitions.len(), 1);
        assert_eq!(prop.compile().definitions[0].name, "big");
    }

    #[test]
    fn real_bound_variables_make_params_real() {
        let params = parse_params("c=2").unwrap();
        let prop = parse_property("(assert (exists ((x Real)) (< x c)))", &params).unwrap();
        assert_eq!(prop.params[0].1, Sort::Real);
    }
}
