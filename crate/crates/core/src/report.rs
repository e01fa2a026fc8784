//! Verification reports and their text, CSV and JSON renderings.

use std::fmt::Write as _;

use serde::Serialize;

use crate::solver::{Outcome, UnknownReason, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Overall {
    Holds,
    Violated,
    /// Some check was unknown and none was violated or failed.
    Inconclusive,
    Error,
}

impl Overall {
    /// Classifies a set of outcomes. A violation is definitive and outranks
    /// everything; errors outrank unknowns.
    pub fn of<'a>(outcomes: impl IntoIterator<Item = &'a Outcome>) -> Overall {
        let (mut violated, mut error, mut unknown) = (false, false, false);
        for o in outcomes {
            match o {
                Outcome::Holds => {}
                Outcome::Violated => violated = true,
                Outcome::Error(_) => error = true,
                Outcome::Unknown(_) => unknown = true,
            }
        }
        if violated {
            Overall::Violated
        } else if error {
            Overall::Error
        } else if unknown {
            Overall::Inconclusive
        } else {
            Overall::Holds
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Overall::Holds => 0,
            Overall::Violated => 1,
            Overall::Inconclusive => 2,
            Overall::Error => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Overall::Holds => "holds",
            Overall::Violated => "violated",
            Overall::Inconclusive => "inconclusive",
            Overall::Error => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportEntry {
    pub property: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub dataset: String,
    pub entries: Vec<ReportEntry>,
}

#[derive(Serialize)]
struct EntryView<'a> {
    property: &'a str,
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    unknown_reason: Option<UnknownReason>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
    seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<&'a str>,
}

impl<'a> From<&'a ReportEntry> for EntryView<'a> {
    fn from(e: &'a ReportEntry) -> Self {
        EntryView {
            property: &e.property,
            verdict: e.verdict.outcome.label(),
            unknown_reason: match e.verdict.outcome {
                Outcome::Unknown(r) => Some(r),
                _ => None,
            },
            error: match &e.verdict.outcome {
                Outcome::Error(msg) => Some(msg),
                _ => None,
            },
            seconds: e.verdict.elapsed.as_secs_f64(),
            model: e.verdict.model.as_deref(),
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Report {
    pub fn overall(&self) -> Overall {
        Overall::of(self.entries.iter().map(|e| &e.verdict.outcome))
    }

    pub fn exit_code(&self) -> i32 {
        self.overall().exit_code()
    }

    pub fn entry(&self, property: &str) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| e.property == property)
    }

    pub fn to_text(&self) -> String {
        let width = self.entries.iter().map(|e| e.property.len()).max().unwrap_or(0);
        let mut out = format!("dataset: {}\n", self.dataset);
        for e in &self.entries {
            let _ = writeln!(
                out,
                "  {:<width$}  {:<18} {:>9.3}s",
                e.property,
                e.verdict.outcome.to_string(),
                e.verdict.elapsed.as_secs_f64()
            );
            if let Some(model) = &e.verdict.model {
                for line in model.lines() {
                    let _ = writeln!(out, "      {line}");
                }
            }
        }
        let _ = writeln!(out, "overall: {}", self.overall().label());
        out
    }

    /// `property,verdict,seconds` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("property,verdict,seconds\n");
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{},{},{:.6}",
                csv_field(&e.property),
                e.verdict.outcome.label(),
                e.verdict.elapsed.as_secs_f64()
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct View<'a> {
            dataset: &'a str,
            overall: Overall,
            properties: Vec<EntryView<'a>>,
        }
        let view = View {
            dataset: &self.dataset,
            overall: self.overall(),
            properties: self.entries.iter().map(EntryView::from).collect(),
        };
        serde_json::to_string_pretty(&view).expect("report serializes")
    }
}

/// `m,property,verdict,seconds` rows for an incremental run.
pub fn series_to_csv(series: &[(usize, Report)]) -> String {
    let mut out = String::from("m,property,verdict,seconds\n");
    for (m, report) in series {
        for e in &report.entries {
            let _ = writeln!(
                out,
                "{m},{},{},{:.6}",
                csv_field(&e.property),
                e.verdict.outcome.label(),
                e.verdict.elapsed.as_secs_f64()
            );
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Admissibility {
    Admissible,
    /// Some pair of properties cannot hold together.
    Inadmissible,
    Inconclusive,
}

impl Admissibility {
    pub fn exit_code(self) -> i32 {
        match self {
            Admissibility::Admissible => 0,
            Admissibility::Inadmissible => 1,
            Admissibility::Inconclusive => 2,
        }
    }
}

/// Pairwise joint satisfiability of a specification's properties, checked
/// without any dataset. Symmetric; the diagonal is each property alone.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyMatrix {
    pub names: Vec<String>,
    cells: Vec<Vec<Outcome>>,
    /// Satisfiability of the conjunction of all properties, when requested.
    pub full: Option<Outcome>,
}

impl ConsistencyMatrix {
    /// Builds the matrix from the upper triangle, row-major, diagonal included.
    #[allow(clippy::needless_range_loop)]
    pub fn from_upper(names: Vec<String>, upper: Vec<Outcome>, full: Option<Outcome>) -> Self {
        let k = names.len();
        assert_eq!(upper.len(), k * (k + 1) / 2, "upper triangle size");
        let mut cells = vec![vec![Outcome::Holds; k]; k];
        let mut it = upper.into_iter();
        for x in 0..k {
            for y in x..k {
                let o = it.next().expect("sized above");
                cells[y][x] = o.clone();
                cells[x][y] = o;
            }
        }
        ConsistencyMatrix { names, cells, full }
    }

    pub fn get(&self, x: usize, y: usize) -> &Outcome {
        &self.cells[x][y]
    }

    /// Index pairs `(x, y)`, `x <= y`, whose conjunction is unsatisfiable.
    pub fn conflicts(&self) -> Vec<(usize, usize)> {
        let k = self.names.len();
        (0..k)
            .flat_map(|x| (x..k).map(move |y| (x, y)))
            .filter(|&(x, y)| self.cells[x][y] == Outcome::Violated)
            .collect()
    }

    pub fn admissibility(&self) -> Admissibility {
        let mut all = self.cells.iter().flatten().collect::<Vec<_>>();
        all.extend(self.full.iter());
        if all.iter().any(|o| **o == Outcome::Violated) {
            Admissibility::Inadmissible
        } else if all.iter().all(|o| **o == Outcome::Holds) {
            Admissibility::Admissible
        } else {
            Admissibility::Inconclusive
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let k = self.names.len();
        for x in 0..k {
            for y in x..k {
                let o = &self.cells[x][y];
                let mark = match o {
                    Outcome::Holds => "consistent",
                    Outcome::Violated => "CONFLICT",
                    Outcome::Unknown(_) => "inconclusive",
                    Outcome::Error(_) => "error",
                };
                let pair = if x == y {
                    self.names[x].clone()
                } else {
                    format!("{} & {}", self.names[x], self.names[y])
                };
                let _ = write!(out, "{pair}: {mark}");
                if let Outcome::Error(msg) = o {
                    let _ = write!(out, " ({msg})");
                }
                out.push('\n');
            }
        }
        if let Some(full) = &self.full {
            let _ = writeln!(out, "all properties: {full}");
        }
        let verdict = match self.admissibility() {
            Admissibility::Admissible => "admissible",
            Admissibility::Inadmissible => "inadmissible",
            Admissibility::Inconclusive => "inconclusive",
        };
        let _ = writeln!(out, "specification: {verdict}");
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Pair<'a> {
            first: &'a str,
            second: &'a str,
            verdict: &'static str,
        }
        #[derive(Serialize)]
        struct View<'a> {
            admissibility: Admissibility,
            pairs: Vec<Pair<'a>>,
            #[serde(skip_serializing_if = "Option::is_none")]
            all: Option<&'static str>,
        }
        let k = self.names.len();
        let pairs = (0..k)
            .flat_map(|x| (x..k).map(move |y| (x, y)))
            .map(|(x, y)| Pair {
                first: &self.names[x],
                second: &self.names[y],
                verdict: self.cells[x][y].label(),
            })
            .collect();
        let view = View {
            admissibility: self.admissibility(),
            pairs,
            all: self.full.as_ref().map(Outcome::label),
        };
        serde_json::to_string_pretty(&view).expect("matrix serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Duration;

    fn entry(name: &str, outcome: Outcome) -> ReportEntry {
        ReportEntry {
            property: name.into(),
            verdict: Verdict {
                outcome,
                elapsed: Duration::from_millis(15),
                model: None,
            },
        }
    }

    #[test]
    fn overall_classification() {
        use Outcome::*;
        let unknown = Unknown(UnknownReason::Timeout);
        assert_eq!(Overall::of(&[Holds, Holds]), Overall::Holds);
        assert_eq!(Overall::of(&[Holds, unknown.clone()]), Overall::Inconclusive);
        assert_eq!(Overall::of(&[Violated, unknown.clone(), Error("x".into())]), Overall::Violated);
        assert_eq!(Overall::of(&[Error("x".into()), unknown]), Overall::Error);
        assert_eq!(Overall::Inconclusive.exit_code(), 2);
    }

    #[test]
    fn renderings() {
        let r = Report {
            dataset: "toy.csv".into(),
            entries: vec![entry("a,b", Outcome::Holds), entry("c", Outcome::Violated)],
        };
        assert_eq!(r.to_csv(), "property,verdict,seconds\n\"a,b\",holds,0.015000\nc,violated,0.015000\n");
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["overall"], "violated");
        assert_eq!(json["properties"][1]["verdict"], "violated");
        assert!(r.to_text().contains("overall: violated"));
        assert_eq!(series_to_csv(&[(5, r)]).lines().nth(2), Some("5,c,violated,0.015000"));
    }

    #[test]
    fn matrix_symmetry() {
        use Outcome::*;
        let m = ConsistencyMatrix::from_upper(vec!["a".into(), "b".into()], vec![Holds, Violated, Holds], None);
        assert_eq!(m.get(1, 0), &Violated);
        assert_eq!(m.conflicts(), vec![(0, 1)]);
        assert_eq!(m.admissibility(), Admissibility::Inadmissible);
        assert!(m.to_text().contains("a & b: CONFLICT"));
    }
}
