//! Minimal SMT-LIB s-expression reader.
//!
//! Enough of the concrete syntax to split property files into commands,
//! report unbalanced input with a position, and find free symbols.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SexprError {
    #[error("line {line}, column {column}: unexpected `)`")]
    UnexpectedClose { line: usize, column: usize },
    #[error("line {line}, column {column}: unclosed `(`")]
    Unclosed { line: usize, column: usize },
    #[error("line {line}, column {column}: unterminated {what}")]
    Unterminated {
        what: &'static str,
        line: usize,
        column: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Sexpr {
    Atom(String),
    List(Vec<Sexpr>),
}

impl Sexpr {
    pub fn atom(s: impl Into<String>) -> Self {
        Sexpr::Atom(s.into())
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexpr::Atom(a) => Some(a),
            Sexpr::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexpr]> {
        match self {
            Sexpr::List(items) => Some(items),
            Sexpr::Atom(_) => None,
        }
    }

    /// Head symbol of a list, e.g. `assert` for `(assert ...)`.
    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_atom()
    }
}

impl fmt::Display for Sexpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexpr::Atom(a) => f.write_str(a),
            Sexpr::List(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }
}

/// Parses every top-level expression in `text`.
pub fn parse_all(text: &str) -> Result<Vec<Sexpr>, SexprError> {
    let mut cur = Cursor {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
    };
    // Stack of open lists with the position of their `(`.
    let mut stack: Vec<(Vec<Sexpr>, usize, usize)> = Vec::new();
    let mut top = Vec::new();

    let push = |stack: &mut Vec<(Vec<Sexpr>, usize, usize)>, top: &mut Vec<Sexpr>, e: Sexpr| match stack.last_mut() {
        Some((items, _, _)) => items.push(e),
        None => top.push(e),
    };

    while let Some(c) = cur.peek() {
        let (line, column) = (cur.line, cur.column);
        match c {
            c if c.is_whitespace() => {
                cur.bump();
            }
            ';' => {
                while let Some(c) = cur.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            '(' => {
                cur.bump();
                stack.push((Vec::new(), line, column));
            }
            ')' => {
                cur.bump();
                let (items, _, _) = stack
                    .pop()
                    .ok_or(SexprError::UnexpectedClose { line, column })?;
                push(&mut stack, &mut top, Sexpr::List(items));
            }
            '|' | '"' => {
                cur.bump();
                let mut tok = String::from(c);
                loop {
                    match cur.bump() {
                        None => {
                            return Err(SexprError::Unterminated {
                                what: if c == '|' { "quoted symbol" } else { "string" },
                                line,
                                column,
                            })
                        }
                        Some(d) => {
                            tok.push(d);
                            if d == c {
                                // `""` is an escaped quote inside strings.
                                if c == '"' && cur.peek() == Some('"') {
                                    tok.push('"');
                                    cur.bump();
                                    continue;
                                }
                                break;
                            }
                        }
                    }
                }
                push(&mut stack, &mut top, Sexpr::Atom(tok));
            }
            _ => {
                let mut tok = String::new();
                while let Some(d) = cur.peek() {
                    if d.is_whitespace() || matches!(d, '(' | ')' | ';' | '"' | '|') {
                        break;
                    }
                    tok.push(d);
                    cur.bump();
                }
                push(&mut stack, &mut top, Sexpr::Atom(tok));
            }
        }
    }

    if let Some((_, line, column)) = stack.pop() {
        return Err(SexprError::Unclosed { line, column });
    }
    Ok(top)
}

/// Operators and constants from the Core, Ints, Reals and ArraysEx theories.
pub const THEORY_SYMBOLS: &[&str] = &[
    "true", "false", "not", "and", "or", "xor", "=>", "=", "distinct", "ite",
    "+", "-", "*", "/", "div", "mod", "abs", "<", "<=", ">", ">=",
    "to_real", "to_int", "is_int", "select", "store",
];

const BINDERS: &[&str] = &["exists", "forall"];

fn is_literal(atom: &str) -> bool {
    let first = atom.chars().next().unwrap_or(' ');
    first.is_ascii_digit() || first == '"' || first == '#' || first == ':'
}

/// Symbols occurring free in `expr`, excluding theory operators and literals.
pub fn free_symbols(expr: &Sexpr) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_free(expr, &mut Vec::new(), &mut out);
    out
}

fn collect_free(expr: &Sexpr, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match expr {
        Sexpr::Atom(a) => {
            if !is_literal(a) && !THEORY_SYMBOLS.contains(&a.as_str()) && !bound.iter().any(|b| b == a) {
                out.insert(a.clone());
            }
        }
        Sexpr::List(items) => {
            let head = items.first().and_then(Sexpr::as_atom);
            match (head, items.len()) {
                (Some(q), 3) if BINDERS.contains(&q) => {
                    let vars = binder_names(&items[1]);
                    let depth = bound.len();
                    bound.extend(vars);
                    collect_free(&items[2], bound, out);
                    bound.truncate(depth);
                }
                (Some("let"), 3) => {
                    let mut names = Vec::new();
                    for binding in items[1].as_list().unwrap_or(&[]) {
                        if let Some([name, value]) = binding.as_list() {
                            collect_free(value, bound, out);
                            if let Some(n) = name.as_atom() {
                                names.push(n.to_string());
                            }
                        }
                    }
                    let depth = bound.len();
                    bound.extend(names);
                    collect_free(&items[2], bound, out);
                    bound.truncate(depth);
                }
                (Some("!"), _) => {
                    if let Some(body) = items.get(1) {
                        collect_free(body, bound, out);
                    }
                }
                (Some("_"), _) => {}
                _ => {
                    for item in items {
                        collect_free(item, bound, out);
                    }
                }
            }
        }
    }
}

/// Variable names of a sorted-variable list `((x Int) (y Real))`.
pub fn binder_names(vars: &Sexpr) -> Vec<String> {
    vars.as_list()
        .unwrap_or(&[])
        .iter()
        .filter_map(|v| v.as_list()?.first()?.as_atom().map(str::to_string))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints_on_one_line() {
        let exprs = parse_all("(assert\n (not ; comment\n  (> m 1)))\n(check-sat)").unwrap();
        assert_eq!(exprs.len(), 2);
        assert_eq!(exprs[0].to_string(), "(assert (not (> m 1)))");
        assert_eq!(exprs[1].head(), Some("check-sat"));
    }

    #[test]
    fn reports_positions() {
        assert_eq!(
            parse_all("(assert\n  (> m 1)").unwrap_err(),
            SexprError::Unclosed { line: 1, column: 1 }
        );
        assert_eq!(
            parse_all("(a))").unwrap_err(),
            SexprError::UnexpectedClose { line: 1, column: 4 }
        );
        assert!(matches!(parse_all("(a |x"), Err(SexprError::Unterminated { .. })));
    }

    #[test]
    fn quoted_atoms_keep_spaces() {
        let exprs = parse_all("(echo \"a \"\"b\"\" c\") |x y|").unwrap();
        assert_eq!(exprs[0].to_string(), "(echo \"a \"\"b\"\" c\")");
        assert_eq!(exprs[1], Sexpr::atom("|x y|"));
    }

    #[test]
    fn free_symbols_respect_binders() {
        let e = &parse_all("(exists ((i Int) (j Int)) (and (< i n) (< (select (select D i) j) min) (let ((z 2.0)) (> z q))))").unwrap()[0];
        let free: Vec<_> = free_symbols(e).into_iter().collect();
        assert_eq!(free, vec!["D", "min", "n", "q"]);
    }
}
