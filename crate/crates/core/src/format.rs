//! File formats.
//!
//! Tables, values and matrices are JSON documents; run logs are JSON lines
//! with a metadata header. JSON keeps full `f64` precision. CSV exports use
//! 12 significant digits.

use std::collections::{BTreeMap, HashSet};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{CharTable, OrderedCharTable, UnitSet, Worth};
use crate::solution::{InteractionMatrix, ValueVector};
use crate::teacher::{RunLog, RunMeta, RunRecord};

/// Significant digits in CSV output.
pub const CSV_DIGITS: usize = 12;

fn format_err(e: impl std::fmt::Display) -> Error {
    Error::Format(e.to_string())
}

/// A document with a provenance map stored next to its fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stamped<T> {
    #[serde(default)]
    pub provenance: BTreeMap<String, String>,
    #[serde(flatten)]
    pub body: T,
}

impl<T: Serialize + DeserializeOwned> Stamped<T> {
    pub fn new(body: T, provenance: BTreeMap<String, String>) -> Self {
        Stamped { provenance, body }
    }

    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(format_err)
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(format_err)?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    units: Vec<String>,
    ordered: bool,
    eval_target: String,
    entries: Vec<EntryFile>,
    #[serde(default)]
    meta: BTreeMap<String, String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EntryFile {
    coalition: Vec<String>,
    #[serde(flatten)]
    worth: Worth,
}

/// A table read from disk, either kind.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyTable {
    Unordered(CharTable),
    Ordered(OrderedCharTable),
}

impl AnyTable {
    pub fn units(&self) -> &UnitSet {
        match self {
            AnyTable::Unordered(t) => t.units(),
            AnyTable::Ordered(t) => t.units(),
        }
    }

    pub fn eval_target(&self) -> &str {
        match self {
            AnyTable::Unordered(t) => t.eval_target(),
            AnyTable::Ordered(t) => t.eval_target(),
        }
    }

    pub fn meta(&self) -> &BTreeMap<String, String> {
        match self {
            AnyTable::Unordered(t) => t.meta(),
            AnyTable::Ordered(t) => t.meta(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        match self {
            AnyTable::Unordered(t) => table_to_json(t),
            AnyTable::Ordered(t) => ordered_table_to_json(t),
        }
    }
}

pub fn table_to_json(table: &CharTable) -> Result<String> {
    let units = table.units();
    to_json(&TableFile {
        units: units.names().to_vec(),
        ordered: false,
        eval_target: table.eval_target().to_string(),
        entries: table
            .iter()
            .map(|(c, w)| EntryFile {
                coalition: units.names_of(c),
                worth: *w,
            })
            .collect(),
        meta: table.meta().clone(),
    })
}

pub fn ordered_table_to_json(table: &OrderedCharTable) -> Result<String> {
    let units = table.units();
    to_json(&TableFile {
        units: units.names().to_vec(),
        ordered: true,
        eval_target: table.eval_target().to_string(),
        entries: table
            .iter()
            .into_iter()
            .map(|(oc, w)| EntryFile {
                coalition: units.names_of_seq(&oc.indices()),
                worth: w,
            })
            .collect(),
        meta: table.meta().clone(),
    })
}

/// Parses a table document. Duplicate entries are rejected; missing ones
/// are left for the consumer to detect.
pub fn table_from_json(text: &str) -> Result<AnyTable> {
    let file: TableFile = serde_json::from_str(text).map_err(format_err)?;
    let units = UnitSet::new(file.units)?;
    let mut seen = HashSet::new();
    let mut duplicate = |names: &[String]| {
        if seen.insert(names.to_vec()) {
            Ok(())
        } else {
            Err(Error::Format(format!(
                "duplicate entry for [{}]",
                names.join(",")
            )))
        }
    };
    if file.ordered {
        let mut table = OrderedCharTable::new(units, file.eval_target)?;
        for e in &file.entries {
            duplicate(&e.coalition)?;
            let oc = table.units().ordered_of(&e.coalition)?;
            table.set(&oc, e.worth)?;
        }
        *table.meta_mut() = file.meta;
        Ok(AnyTable::Ordered(table))
    } else {
        let mut table = CharTable::new(units, file.eval_target);
        for e in &file.entries {
            let c = table.units().coalition_of(&e.coalition)?;
            let mut key = e.coalition.clone();
            key.sort();
            duplicate(&key)?;
            table.set(c, e.worth)?;
        }
        *table.meta_mut() = file.meta;
        Ok(AnyTable::Unordered(table))
    }
}

/// Formats `x` with [`CSV_DIGITS`] significant digits, in plain notation
/// for moderate magnitudes and scientific notation otherwise.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 {
            "0".to_string()
        } else {
            x.to_string()
        };
    }
    let sci = format!("{:.*e}", CSV_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..CSV_DIGITS as i32).contains(&exp) {
        let decimals = (CSV_DIGITS as i32 - 1 - exp) as usize;
        let plain = format!("{x:.decimals$}");
        trim_zeros(&plain).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn values_csv(values: &ValueVector) -> String {
    let mut out = String::from("unit,value\n");
    for (name, v) in values.units.names().iter().zip(&values.values) {
        out.push_str(&format!("{name},{}\n", fmt_sig(*v)));
    }
    out
}

pub fn matrix_csv(matrix: &InteractionMatrix) -> String {
    let names = matrix.units.names();
    let mut out = format!("unit,{}\n", names.join(","));
    for (name, row) in names.iter().zip(&matrix.values) {
        let cells: Vec<String> = row.iter().map(|v| fmt_sig(*v)).collect();
        out.push_str(&format!("{name},{}\n", cells.join(",")));
    }
    out
}

/// One row per coalition; members joined with `+`.
pub fn table_csv(table: &AnyTable) -> String {
    let mut out = String::from("coalition,value,std,count\n");
    let mut row = |names: Vec<String>, w: &Worth| {
        out.push_str(&format!(
            "{},{},{},{}\n",
            names.join("+"),
            fmt_sig(w.value),
            w.std.map(fmt_sig).unwrap_or_default(),
            w.count.map(|c| c.to_string()).unwrap_or_default()
        ));
    };
    match table {
        AnyTable::Unordered(t) => t.iter().for_each(|(c, w)| row(t.units().names_of(c), w)),
        AnyTable::Ordered(t) => t
            .iter()
            .iter()
            .for_each(|(oc, w)| row(t.units().names_of_seq(&oc.indices()), w)),
    }
    out
}

/// Parses a CSV with a header row into `(header, rows)`. No quoting; lines
/// starting with `#` are comments.
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Format("empty CSV".into()))?
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let cells: Vec<String> = l.split(',').map(str::to_string).collect();
            if cells.len() == header.len() {
                Ok(cells)
            } else {
                Err(Error::Format(format!(
                    "row `{l}` has {} cells, expected {}",
                    cells.len(),
                    header.len()
                )))
            }
        })
        .collect::<Result<_>>()?;
    Ok((header, rows))
}

#[derive(Serialize, Deserialize)]
struct RunHeader {
    meta: RunMeta,
}

/// Metadata header line, then one record per line.
pub fn runlog_to_jsonl(log: &RunLog) -> Result<String> {
    let mut out = serde_json::to_string(&RunHeader {
        meta: log.meta.clone(),
    })
    .map_err(format_err)?;
    out.push('\n');
    for r in &log.records {
        out.push_str(&serde_json::to_string(r).map_err(format_err)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn runlog_from_jsonl(text: &str) -> Result<RunLog> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: RunHeader = serde_json::from_str(
        lines
            .next()
            .ok_or_else(|| Error::Format("empty run log".into()))?,
    )
    .map_err(format_err)?;
    let records = lines
        .map(|l| serde_json::from_str::<RunRecord>(l).map_err(format_err))
        .collect::<Result<Vec<_>>>()?;
    for (i, r) in records.iter().enumerate() {
        if r.k != i + 1 {
            return Err(Error::Format(format!("record {} has index {}", i + 1, r.k)));
        }
    }
    Ok(RunLog {
        meta: header.meta,
        records,
    })
}
