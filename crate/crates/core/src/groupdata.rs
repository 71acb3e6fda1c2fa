//! Character tables of the Monster and the Baby monster, graded signed
//! decompositions into irreducibles, and their supertraces.
//!
//! Character files are plain UTF-8 text:
//!
//! ```text
//! # comments are ignored
//! classes: 1A 2A 2B …
//! orders: 1 2 2 …
//! irrep 1 1 : 1 1 1 …
//! irrep 2 4371 : 4371 …
//! ```
//!
//! Only the irreducibles that the decompositions use are shipped, and every
//! value must be an exact integer.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroupDataError {
    #[error("line {line}: {reason}")]
    ParseError { line: usize, reason: String },
    #[error("line {line}: character value {token:?} is not an exact integer")]
    NonIntegerValue { line: usize, token: String },
    #[error("no 1A column in the class list")]
    MissingIdentityClass,
    #[error("unknown conjugacy class {0:?}")]
    UnknownClass(String),
    #[error("unknown irreducible representation {0}")]
    UnknownIrrep(usize),
    #[error("unknown group {0:?} (expected M or B)")]
    UnknownGroup(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("fixture file: {0}")]
    Fixture(#[from] csv::Error),
}

/// The two sporadic groups whose moonshine is modelled here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Group {
    #[serde(rename = "M")]
    Monster,
    #[serde(rename = "B")]
    BabyMonster,
}

impl Group {
    pub fn code(self) -> &'static str {
        match self {
            Group::Monster => "M",
            Group::BabyMonster => "B",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Group::Monster => "Monster",
            Group::BabyMonster => "Baby monster",
        }
    }

    /// Letter used for irreducibles in decompositions: `V` or `U`.
    pub fn irrep_letter(self) -> char {
        match self {
            Group::Monster => 'V',
            Group::BabyMonster => 'U',
        }
    }

    pub fn character_file(self) -> &'static str {
        match self {
            Group::Monster => "characters_monster.txt",
            Group::BabyMonster => "characters_babymonster.txt",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Group {
    type Err = GroupDataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "M" | "MONSTER" => Ok(Group::Monster),
            "B" | "BABYMONSTER" | "BABY" => Ok(Group::BabyMonster),
            _ => Err(GroupDataError::UnknownGroup(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjugacyClass {
    pub label: String,
    pub order: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Irrep {
    /// 1 is the trivial representation.
    pub index: usize,
    pub dim: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterTable {
    pub group: Group,
    pub classes: Vec<ConjugacyClass>,
    pub irreps: Vec<Irrep>,
    /// `values[i][j] = χ_{i+1}(classes[j])`.
    pub values: Vec<Vec<i64>>,
    class_index: HashMap<String, usize>,
}

/// Uppercases letter suffixes and strips whitespace: `" 2b"` → `"2B"`.
pub fn normalize_label(label: &str) -> String {
    label
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| c.to_ascii_uppercase())
        .collect()
}

fn label_order(label: &str) -> Option<u64> {
    let digits: String = label.chars().take_while(|c| c.is_ascii_digit()).collect();
    let suffix = &label[digits.len()..];
    if digits.is_empty() || suffix.is_empty() || !suffix.chars().all(|c| c.is_ascii_uppercase()) {
        return None;
    }
    digits.parse().ok()
}

impl CharacterTable {
    /// Parses the text format described in the module documentation.
    pub fn parse(text: &str, group: Group) -> Result<Self, GroupDataError> {
        let perr = |line: usize, reason: String| GroupDataError::ParseError { line, reason };
        let mut labels: Option<(usize, Vec<String>)> = None;
        let mut orders: Option<(usize, Vec<u64>)> = None;
        let mut rows: Vec<(usize, usize, i64, Vec<i64>)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            if let Some(rest) = content.strip_prefix("classes:") {
                if labels.is_some() {
                    return Err(perr(line, "second classes: line".into()));
                }
                labels = Some((line, rest.split_whitespace().map(normalize_label).collect()));
            } else if let Some(rest) = content.strip_prefix("orders:") {
                if orders.is_some() {
                    return Err(perr(line, "second orders: line".into()));
                }
                let parsed = rest
                    .split_whitespace()
                    .map(|t| {
                        t.parse::<u64>()
                            .ok()
                            .filter(|&o| o > 0)
                            .ok_or_else(|| perr(line, format!("bad element order {t:?}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                orders = Some((line, parsed));
            } else if let Some(rest) = content.strip_prefix("irrep") {
                let (head, vals) = rest
                    .split_once(':')
                    .ok_or_else(|| perr(line, "irrep line without ':'".into()))?;
                let head: Vec<&str> = head.split_whitespace().collect();
                if head.len() != 2 {
                    return Err(perr(line, "expected 'irrep <index> <dim> :'".into()));
                }
                let index: usize = head[0]
                    .parse()
                    .map_err(|_| perr(line, format!("bad irrep index {:?}", head[0])))?;
                let dim: i64 = head[1]
                    .parse()
                    .map_err(|_| perr(line, format!("bad dimension {:?}", head[1])))?;
                let values = vals
                    .split_whitespace()
                    .map(|t| {
                        t.parse::<i64>().map_err(|_| GroupDataError::NonIntegerValue {
                            line,
                            token: t.to_string(),
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                rows.push((line, index, dim, values));
            } else {
                return Err(perr(line, format!("unrecognised line {content:?}")));
            }
        }
        let (label_line, labels) = labels.ok_or_else(|| perr(0, "missing classes: line".into()))?;
        let (order_line, orders) = orders.ok_or_else(|| perr(0, "missing orders: line".into()))?;
        if orders.len() != labels.len() {
            return Err(perr(
                order_line,
                format!("{} orders for {} classes", orders.len(), labels.len()),
            ));
        }
        let mut class_index = HashMap::new();
        let mut classes = Vec::with_capacity(labels.len());
        for (j, (label, order)) in labels.into_iter().zip(orders).enumerate() {
            match label_order(&label) {
                Some(o) if o == order => {}
                _ => {
                    return Err(perr(
                        label_line,
                        format!("class {label:?} does not match element order {order}"),
                    ))
                }
            }
            if class_index.insert(label.clone(), j).is_some() {
                return Err(perr(label_line, format!("duplicate class {label:?}")));
            }
            classes.push(ConjugacyClass { label, order });
        }
        let identity = *class_index
            .get("1A")
            .ok_or(GroupDataError::MissingIdentityClass)?;
        let mut irreps = Vec::with_capacity(rows.len());
        let mut values = Vec::with_capacity(rows.len());
        for (k, (line, index, dim, vals)) in rows.into_iter().enumerate() {
            if index != k + 1 {
                return Err(perr(line, format!("irrep {index} out of sequence")));
            }
            if vals.len() != classes.len() {
                return Err(perr(
                    line,
                    format!("{} values for {} classes", vals.len(), classes.len()),
                ));
            }
            if vals[identity] != dim || dim <= 0 {
                return Err(perr(line, format!("χ_{index}(1A) = {} ≠ dimension {dim}", vals[identity])));
            }
            if index == 1 && dim != 1 {
                return Err(perr(line, "irrep 1 must be trivial".into()));
            }
            if irreps.last().is_some_and(|p: &Irrep| p.dim > dim) {
                return Err(perr(line, "dimensions must be non-decreasing".into()));
            }
            if let Some(v) = vals.iter().find(|v| v.abs() > dim) {
                return Err(perr(line, format!("|χ| = {} exceeds the dimension {dim}", v.abs())));
            }
            irreps.push(Irrep { index, dim });
            values.push(vals);
        }
        Ok(Self {
            group,
            classes,
            irreps,
            values,
            class_index,
        })
    }

    pub fn load(path: &Path, group: Group) -> Result<Self, GroupDataError> {
        let text = fs::read_to_string(path).map_err(|source| GroupDataError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, group)
    }

    /// The shipped table for `group` from `data_dir`.
    pub fn load_group(data_dir: &Path, group: Group) -> Result<Self, GroupDataError> {
        Self::load(&data_dir.join(group.character_file()), group)
    }

    /// Renders the table back into the file format.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let labels: Vec<&str> = self.classes.iter().map(|c| c.label.as_str()).collect();
        let orders: Vec<String> = self.classes.iter().map(|c| c.order.to_string()).collect();
        out.push_str(&format!("classes: {}\n", labels.join(" ")));
        out.push_str(&format!("orders: {}\n", orders.join(" ")));
        for (irrep, row) in self.irreps.iter().zip(&self.values) {
            let vals: Vec<String> = row.iter().map(i64::to_string).collect();
            out.push_str(&format!("irrep {} {} : {}\n", irrep.index, irrep.dim, vals.join(" ")));
        }
        out
    }

    pub fn class(&self, label: &str) -> Result<&ConjugacyClass, GroupDataError> {
        let label = normalize_label(label);
        self.class_index
            .get(&label)
            .map(|&j| &self.classes[j])
            .ok_or(GroupDataError::UnknownClass(label))
    }

    pub fn dims(&self) -> Vec<i64> {
        self.irreps.iter().map(|r| r.dim).collect()
    }

    /// `χ_index(class)`.
    pub fn value(&self, index: usize, label: &str) -> Result<i64, GroupDataError> {
        let label = normalize_label(label);
        let j = *self
            .class_index
            .get(&label)
            .ok_or(GroupDataError::UnknownClass(label))?;
        let row = index
            .checked_sub(1)
            .and_then(|i| self.values.get(i))
            .ok_or(GroupDataError::UnknownIrrep(index))?;
        Ok(row[j])
    }
}

/// Even or odd part of a ℤ₂-graded module; odd parts count with sign −1 in
/// supertraces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> i64 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DecompEntry {
    pub index: usize,
    pub mult: u32,
    pub parity: Parity,
}

impl DecompEntry {
    pub fn signed_mult(&self) -> i64 {
        self.parity.sign() * self.mult as i64
    }
}

/// One graded piece as a signed sum of irreducibles, e.g. `U6+ U4- U3- 2U1-`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Decomposition {
    pub entries: Vec<DecompEntry>,
}

impl Decomposition {
    /// Builds from `(index, signed multiplicity)` pairs, dropping zeros.
    /// Entries are kept in descending index order.
    pub fn from_signed(pairs: &[(usize, i64)]) -> Self {
        let mut entries: Vec<DecompEntry> = pairs
            .iter()
            .filter(|(_, m)| *m != 0)
            .map(|&(index, m)| DecompEntry {
                index,
                mult: m.unsigned_abs() as u32,
                parity: if m > 0 { Parity::Even } else { Parity::Odd },
            })
            .collect();
        entries.sort_by(|a, b| b.index.cmp(&a.index).then(a.parity.cmp(&b.parity)));
        Self { entries }
    }

    pub fn total_mult(&self) -> u32 {
        self.entries.iter().map(|e| e.mult).sum()
    }

    pub fn max_index(&self) -> usize {
        self.entries.iter().map(|e| e.index).max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Renders with the group's irrep letter, e.g. `U6+ U4- 2U1-`.
    pub fn render(&self, letter: char) -> String {
        if self.entries.is_empty() {
            return "0".into();
        }
        self.entries
            .iter()
            .map(|e| {
                let mult = if e.mult == 1 { String::new() } else { e.mult.to_string() };
                let sign = if e.parity == Parity::Even { '+' } else { '-' };
                format!("{mult}{letter}{}{sign}", e.index)
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl FromStr for Decomposition {
    type Err = GroupDataError;

    /// Parses `[mult]<letter><index><+|->` tokens; `0` is the empty sum.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |t: &str| GroupDataError::ParseError {
            line: 0,
            reason: format!("bad decomposition token {t:?}"),
        };
        let mut entries = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "0" {
                continue;
            }
            let (body, parity) = match tok.chars().last() {
                Some('+') => (&tok[..tok.len() - 1], Parity::Even),
                Some('-') => (&tok[..tok.len() - 1], Parity::Odd),
                _ => return Err(bad(tok)),
            };
            let pos = body.find(|c: char| c.is_ascii_alphabetic()).ok_or_else(|| bad(tok))?;
            let mult: u32 = if pos == 0 { 1 } else { body[..pos].parse().map_err(|_| bad(tok))? };
            let index: usize = body[pos + 1..].parse().map_err(|_| bad(tok))?;
            if mult == 0 || index == 0 {
                return Err(bad(tok));
            }
            if entries
                .iter()
                .any(|e: &DecompEntry| e.index == index && e.parity == parity)
            {
                return Err(bad(tok));
            }
            entries.push(DecompEntry { index, mult, parity });
        }
        Ok(Self { entries })
    }
}

/// `Σ sign(parity)·mult·χ_index(class)`.
pub fn supertrace(
    table: &CharacterTable,
    dec: &Decomposition,
    class_label: &str,
) -> Result<i128, GroupDataError> {
    table.class(class_label)?;
    dec.entries.iter().try_fold(0i128, |acc, e| {
        Ok(acc + e.signed_mult() as i128 * table.value(e.index, class_label)? as i128)
    })
}

/// `Σ coeff·dim(U_index) + constant`, e.g. the Baby monster relation
/// `dim U6 − dim U5 − dim U3 + dim U2 − dim U1 = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LinearRelation {
    pub terms: Vec<(i64, usize)>,
    pub constant: i128,
}

/// Whether the signed dimension sum vanishes.
pub fn check_linear_relation(
    table: &CharacterTable,
    relation: &LinearRelation,
) -> Result<bool, GroupDataError> {
    let mut acc = relation.constant;
    for &(coeff, index) in &relation.terms {
        acc += coeff as i128 * table.value(index, "1A")? as i128;
    }
    Ok(acc == 0)
}

/// One row of the coefficient-table fixtures: `group,class,n,coefficient`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureRow {
    pub group: Group,
    pub class: String,
    pub n: i64,
    pub coefficient: i128,
}

pub fn parse_fixtures(text: &str) -> Result<Vec<FixtureRow>, GroupDataError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader
        .deserialize()
        .map(|r| {
            r.map(|mut row: FixtureRow| {
                row.class = normalize_label(&row.class);
                row
            })
            .map_err(GroupDataError::from)
        })
        .collect()
}

pub fn load_fixtures(path: &Path) -> Result<Vec<FixtureRow>, GroupDataError> {
    let text = fs::read_to_string(path).map_err(|source| GroupDataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_fixtures(&text)
}

/// Fixture rows of one group, grouped by class then grade.
pub fn fixtures_by_class(
    rows: &[FixtureRow],
    group: Group,
) -> BTreeMap<String, BTreeMap<i64, i128>> {
    let mut out: BTreeMap<String, BTreeMap<i64, i128>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.group == group) {
        out.entry(r.class.clone()).or_default().insert(r.n, r.coefficient);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "# toy\nclasses: 1A 2A 3A\norders: 1 2 3\nirrep 1 1 : 1 1 1\nirrep 2 2 : 2 0 -1\n";

    #[test]
    fn parses_and_round_trips() {
        let t = CharacterTable::parse(SMALL, Group::BabyMonster).unwrap();
        assert_eq!(t.value(2, "3a").unwrap(), -1);
        let again = CharacterTable::parse(&t.serialize(), Group::BabyMonster).unwrap();
        assert_eq!(t, again);
    }

    #[test]
    fn rejects_bad_tables() {
        let frac = SMALL.replace("2 0 -1", "2 0 3.5");
        assert!(matches!(
            CharacterTable::parse(&frac, Group::Monster),
            Err(GroupDataError::NonIntegerValue { line: 5, .. })
        ));
        let no_id = "classes: 2A 3A\norders: 2 3\nirrep 1 1 : 1 1\n";
        assert!(matches!(
            CharacterTable::parse(no_id, Group::Monster),
            Err(GroupDataError::MissingIdentityClass)
        ));
        let dup = SMALL.replace("1A 2A 3A", "1A 2A 2A").replace("1 2 3", "1 2 2");
        assert!(matches!(
            CharacterTable::parse(&dup, Group::Monster),
            Err(GroupDataError::ParseError { .. })
        ));
        let order = SMALL.replace("orders: 1 2 3", "orders: 1 2 4");
        assert!(CharacterTable::parse(&order, Group::Monster).is_err());
    }

    #[test]
    fn decomposition_text_round_trip() {
        let d: Decomposition = "U6+ U4- U3- 2U1-".parse().unwrap();
        assert_eq!(d.total_mult(), 5);
        assert_eq!(d.render('U'), "U6+ U4- U3- 2U1-");
        assert!("U6".parse::<Decomposition>().is_err());
        assert!("U1+ U1+".parse::<Decomposition>().is_err());
        assert_eq!("0".parse::<Decomposition>().unwrap(), Decomposition::default());
    }

    #[test]
    fn supertrace_small() {
        let t = CharacterTable::parse(SMALL, Group::BabyMonster).unwrap();
        let d: Decomposition = "U2- 3U1+".parse().unwrap();
        assert_eq!(supertrace(&t, &d, "1A").unwrap(), 1);
        assert_eq!(supertrace(&t, &d, "3A").unwrap(), 4);
        assert!(matches!(
            supertrace(&t, &d, "9Z"),
            Err(GroupDataError::UnknownClass(_))
        ));
        let bad: Decomposition = "U7-".parse().unwrap();
        assert!(matches!(
            supertrace(&t, &bad, "1A"),
            Err(GroupDataError::UnknownIrrep(7))
        ));
    }
}
