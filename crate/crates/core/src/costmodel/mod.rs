//! Closed-form overhead formulas and their comparison with measured counts.
//!
//! The formulas are data (`formulas.toml`), one entry per table cell, with
//! coefficients given as small polynomials over the symbols `n`, `m`, `x`,
//! `l` and `req`. Known differences between a table cell and what the
//! protocols actually perform are recorded next to them as annotations.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pairing::{OpCategory, OpCounter};

mod poly;

pub use poly::Poly;

const FORMULAS: &str = include_str!("formulas.toml");

/// Symbols a formula may reference.
pub const SYMBOLS: [&str; 5] = ["n", "m", "x", "l", "req"];

pub const CONVENTION: &str = "T_M: product in G1 or GT; T_D: GT quotient or scalar inversion; \
T_S: scalar subtraction; a k-term pairing product is k T_P; scalar add/mul are free";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CostError {
    #[error("unknown table `{0}`")]
    UnknownTable(String),
    #[error("no formula for task `{task}` in table {table}")]
    UnknownTask { table: Table, task: String },
    #[error("formula needs parameter `{0}`")]
    MissingParam(String),
    #[error("formula evaluates to a negative count")]
    Negative,
    #[error("bad formula `{0}`")]
    BadPoly(String),
}

pub type Result<T> = std::result::Result<T, CostError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Table {
    II,
    III,
    IV,
    V,
}

impl Table {
    pub const ALL: [Table; 4] = [Table::II, Table::III, Table::IV, Table::V];

    pub fn title(self) -> &'static str {
        match self {
            Table::II => "secure data aggregation",
            Table::III => "secure data sharing",
            Table::IV => "fine-grained access control",
            Table::V => "secure computation",
        }
    }
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Table::II => "II",
            Table::III => "III",
            Table::IV => "IV",
            Table::V => "V",
        })
    }
}

impl FromStr for Table {
    type Err = CostError;

    fn from_str(s: &str) -> Result<Table> {
        Table::ALL
            .into_iter()
            .find(|t| t.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| CostError::UnknownTable(s.to_string()))
    }
}

/// Concrete values for the formula symbols.
pub type Params = BTreeMap<String, u64>;

pub fn params(pairs: &[(&str, u64)]) -> Params {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostFormula {
    pub table: Table,
    pub task: String,
    pub entity: String,
    pub counts: BTreeMap<OpCategory, Poly>,
    pub bytes: Option<Poly>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evaluated {
    pub counts: OpCounter,
    pub bytes: Option<u64>,
}

fn eval_counts(counts: &BTreeMap<OpCategory, Poly>, p: &Params) -> Result<OpCounter> {
    let mut out = OpCounter::default();
    for (cat, poly) in counts {
        let v = poly.eval(p)?;
        out = out.with(*cat, u64::try_from(v).map_err(|_| CostError::Negative)?);
    }
    Ok(out)
}

impl CostFormula {
    pub fn evaluate(&self, p: &Params) -> Result<Evaluated> {
        let bytes = match &self.bytes {
            Some(poly) => {
                Some(u64::try_from(poly.eval(p)?).map_err(|_| CostError::Negative)?)
            }
            None => None,
        };
        Ok(Evaluated {
            counts: eval_counts(&self.counts, p)?,
            bytes,
        })
    }

    /// Symbolic form, e.g. `n T_H + (n+1) T_P`.
    pub fn render_counts(&self) -> String {
        render(&self.counts)
    }
}

fn render(counts: &BTreeMap<OpCategory, Poly>) -> String {
    if counts.is_empty() {
        return "-".into();
    }
    let parts: Vec<String> = counts
        .iter()
        .map(|(cat, poly)| match poly.to_string().as_str() {
            "1" => cat.symbol().to_string(),
            s if s.contains(['+', '-']) => format!("({s}){}", cat.symbol()),
            s => format!("{s}{}", cat.symbol()),
        })
        .collect();
    parts.join(" + ")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnnotationKind {
    /// The tabulated cell is replaced by `corrected` before diffing.
    Erratum,
    /// The listed categories may differ.
    Deviation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Annotation {
    pub id: String,
    pub table: Table,
    pub task: String,
    pub kind: AnnotationKind,
    pub corrected: Option<BTreeMap<OpCategory, Poly>>,
    /// Category symbols such as `T_P`, or `bytes`.
    pub categories: Vec<String>,
    pub note: String,
}

#[derive(Deserialize)]
struct RawData {
    formula: Vec<RawFormula>,
    annotation: Vec<RawAnnotation>,
}

#[derive(Deserialize)]
struct RawFormula {
    table: String,
    task: String,
    entity: String,
    #[serde(default)]
    counts: BTreeMap<String, String>,
    bytes: Option<String>,
}

#[derive(Deserialize)]
struct RawAnnotation {
    id: String,
    task: String,
    kind: AnnotationKind,
    corrected: Option<BTreeMap<String, String>>,
    #[serde(default)]
    categories: Vec<String>,
    note: String,
}

fn category(short: &str) -> Result<OpCategory> {
    OpCategory::from_symbol(&format!("T_{short}"))
        .ok_or_else(|| CostError::BadPoly(format!("category {short}")))
}

fn parse_counts(raw: &BTreeMap<String, String>) -> Result<BTreeMap<OpCategory, Poly>> {
    raw.iter()
        .map(|(k, v)| Ok((category(k)?, v.parse()?)))
        .collect()
}

pub struct Registry {
    formulas: Vec<CostFormula>,
    annotations: Vec<Annotation>,
}

impl Registry {
    fn load() -> Result<Registry> {
        let raw: RawData =
            toml::from_str(FORMULAS).map_err(|e| CostError::BadPoly(e.to_string()))?;
        let formulas = raw
            .formula
            .into_iter()
            .map(|f| {
                Ok(CostFormula {
                    table: f.table.parse()?,
                    task: f.task,
                    entity: f.entity,
                    counts: parse_counts(&f.counts)?,
                    bytes: f.bytes.map(|b| b.parse()).transpose()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let annotations = raw
            .annotation
            .into_iter()
            .map(|a| {
                let (table, task) = a
                    .task
                    .split_once('/')
                    .ok_or_else(|| CostError::BadPoly(a.task.clone()))?;
                let categories = a
                    .categories
                    .iter()
                    .map(|c| match c.as_str() {
                        "bytes" => Ok(c.clone()),
                        s => Ok(category(s)?.symbol().to_string()),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Annotation {
                    id: a.id,
                    table: table.parse()?,
                    task: task.to_string(),
                    kind: a.kind,
                    corrected: a.corrected.as_ref().map(parse_counts).transpose()?,
                    categories,
                    note: a.note,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Registry {
            formulas,
            annotations,
        })
    }

    pub fn formulas(&self) -> &[CostFormula] {
        &self.formulas
    }

    pub fn annotations(&self) -> &[Annotation] {
        &self.annotations
    }

    pub fn formula(&self, table: Table, task: &str) -> Result<&CostFormula> {
        self.formulas
            .iter()
            .find(|f| f.table == table && f.task == task)
            .ok_or_else(|| CostError::UnknownTask {
                table,
                task: task.to_string(),
            })
    }

    pub fn annotations_for(&self, table: Table, task: &str) -> Vec<&Annotation> {
        self.annotations
            .iter()
            .filter(|a| a.table == table && a.task == task)
            .collect()
    }
}

/// The built-in formula and annotation data.
pub fn registry() -> &'static Registry {
    static REG: OnceLock<Registry> = OnceLock::new();
    REG.get_or_init(|| Registry::load().expect("built-in formula data parses"))
}

/// Evaluates one table cell.
///
/// ```
/// use fogsec::costmodel::{eval_formula, params, Table};
/// let e = eval_formula(Table::II, "verify-aggregate", &params(&[("n", 7)])).unwrap();
/// assert_eq!((e.counts.hashes, e.counts.pairings), (7, 8));
/// ```
pub fn eval_formula(table: Table, task: &str, p: &Params) -> Result<Evaluated> {
    registry().formula(table, task)?.evaluate(p)
}

/// One measured task, tagged with the parameters it ran at.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measurement {
    pub table: Table,
    pub task: String,
    pub params: Params,
    pub counts: OpCounter,
    pub bytes: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    /// No difference at all.
    Exact,
    /// Differences only in annotated categories.
    Annotated,
    /// A difference no annotation explains.
    Unexplained,
}

impl RowStatus {
    pub fn label(self) -> &'static str {
        match self {
            RowStatus::Exact => "exact",
            RowStatus::Annotated => "annotated",
            RowStatus::Unexplained => "unexplained",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub table: Table,
    pub task: String,
    pub entity: String,
    pub params: Params,
    pub formula: String,
    /// The formula as tabulated.
    pub reference: Evaluated,
    /// After errata corrections.
    pub expected: Evaluated,
    pub measured: Evaluated,
    /// Measured minus expected, nonzero categories only.
    pub delta: BTreeMap<String, i64>,
    pub annotations: Vec<String>,
    pub status: RowStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub convention: String,
    pub rows: Vec<ComparisonRow>,
    pub notes: BTreeMap<String, String>,
}

impl ComparisonReport {
    pub fn unexplained(&self) -> Vec<&ComparisonRow> {
        self.rows
            .iter()
            .filter(|r| r.status == RowStatus::Unexplained)
            .collect()
    }

    pub fn row(&self, table: Table, task: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.table == table && r.task == task)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per row; counts use the compact operation notation.
    pub fn to_csv(&self) -> String {
        let opt = |b: Option<u64>| b.map(|v| v.to_string()).unwrap_or_default();
        let mut out = String::from(
            "table,task,entity,reference_ops,reference_bytes,expected_ops,expected_bytes,measured_ops,measured_bytes,delta,status\n",
        );
        for r in &self.rows {
            let delta: Vec<String> = r.delta.iter().map(|(k, v)| format!("{k}{v:+}")).collect();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.table,
                r.task,
                r.entity,
                r.reference.counts,
                opt(r.reference.bytes),
                r.expected.counts,
                opt(r.expected.bytes),
                r.measured.counts,
                opt(r.measured.bytes),
                delta.join(" "),
                r.status.label(),
            );
        }
        out
    }

    /// Aligned text, one block per table.
    pub fn to_text(&self) -> String {
        let mut out = format!("counting convention: {}\n", self.convention);
        for table in Table::ALL {
            let rows: Vec<&ComparisonRow> =
                self.rows.iter().filter(|r| r.table == table).collect();
            if rows.is_empty() {
                continue;
            }
            let _ = writeln!(out, "\nTable {table}: {}", table.title());
            let head = ["entity", "task", "formula", "reference", "measured", "delta", "notes"];
            let body: Vec<[String; 7]> = rows
                .iter()
                .map(|r| {
                    let delta = if r.delta.is_empty() {
                        "0".to_string()
                    } else {
                        r.delta
                            .iter()
                            .map(|(k, v)| format!("{k}{v:+}"))
                            .collect::<Vec<_>>()
                            .join(" ")
                    };
                    [
                        r.entity.clone(),
                        r.task.clone(),
                        r.formula.clone(),
                        show(&r.reference),
                        show(&r.measured),
                        delta,
                        r.annotations.join(","),
                    ]
                })
                .collect();
            let mut widths = head.map(str::len);
            for row in &body {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.chars().count());
                }
            }
            let line = |cells: &[String]| {
                cells
                    .iter()
                    .zip(widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect::<Vec<_>>()
                    .join(" | ")
                    .trim_end()
                    .to_string()
            };
            let _ = writeln!(out, "{}", line(&head.map(String::from)));
            let _ = writeln!(
                out,
                "{}",
                widths.map(|w| "-".repeat(w)).join("-+-")
            );
            for row in &body {
                let _ = writeln!(out, "{}", line(row));
            }
        }
        if !self.notes.is_empty() {
            out.push_str("\nnotes:\n");
            for (id, note) in &self.notes {
                let _ = writeln!(out, "  {id}: {note}");
            }
        }
        out
    }
}

fn show(e: &Evaluated) -> String {
    let ops = if e.counts.total() == 0 && e.bytes.is_some() {
        String::new()
    } else {
        e.counts.to_string()
    };
    match e.bytes {
        Some(b) if ops.is_empty() => format!("{b} B"),
        Some(b) => format!("{ops}; {b} B"),
        None => ops,
    }
}

fn delta(expected: &Evaluated, measured: &Evaluated) -> BTreeMap<String, i64> {
    let mut out = BTreeMap::new();
    for cat in OpCategory::ALL {
        let d = measured.counts.get(cat) as i64 - expected.counts.get(cat) as i64;
        if d != 0 {
            out.insert(cat.symbol().to_string(), d);
        }
    }
    if let (Some(m), Some(e)) = (measured.bytes, expected.bytes) {
        if m != e {
            out.insert("bytes".into(), m as i64 - e as i64);
        }
    }
    out
}

/// Diffs measurements against the formulas, applying errata and attaching
/// annotations.
pub fn compare(measured: &[Measurement]) -> Result<ComparisonReport> {
    let reg = registry();
    let mut rows = Vec::with_capacity(measured.len());
    let mut notes = BTreeMap::new();
    for m in measured {
        let formula = reg.formula(m.table, &m.task)?;
        let reference = formula.evaluate(&m.params)?;
        let annotations = reg.annotations_for(m.table, &m.task);
        let mut expected = reference;
        for a in &annotations {
            if let Some(c) = &a.corrected {
                expected.counts = eval_counts(c, &m.params)?;
            }
        }
        let measured_eval = Evaluated {
            counts: m.counts,
            bytes: m.bytes,
        };
        let delta = delta(&expected, &measured_eval);
        let allowed: Vec<&str> = annotations
            .iter()
            .flat_map(|a| a.categories.iter().map(String::as_str))
            .collect();
        let status = if delta.is_empty() {
            RowStatus::Exact
        } else if delta.keys().all(|k| allowed.contains(&k.as_str())) {
            RowStatus::Annotated
        } else {
            RowStatus::Unexplained
        };
        for a in &annotations {
            notes.insert(a.id.clone(), a.note.clone());
        }
        rows.push(ComparisonRow {
            table: m.table,
            task: m.task.clone(),
            entity: formula.entity.clone(),
            params: m.params.clone(),
            formula: match &formula.bytes {
                Some(b) => format!("{b} bytes"),
                None => formula.render_counts(),
            },
            reference,
            expected,
            measured: measured_eval,
            delta,
            annotations: annotations.iter().map(|a| a.id.clone()).collect(),
            status,
        });
    }
    Ok(ComparisonReport {
        convention: CONVENTION.to_string(),
        rows,
        notes,
    })
}
