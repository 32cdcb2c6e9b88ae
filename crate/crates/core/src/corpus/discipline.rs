//! Scientific disciplines and the bundled reference table.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::Error;

const DISCIPLINES_TSV: &str = include_str!("../../data/disciplines.tsv");
const AREAS_TSV: &str = include_str!("../../data/areas.tsv");

/// Architecture disciplines in otherwise-bibliometric areas that use the
/// non-bibliometric indicator triple.
const NON_BIBLIOMETRIC_EXCEPTIONS: [&str; 5] = ["08/C1", "08/D1", "08/E1", "08/E2", "08/F1"];

/// A discipline code of the form `AA/MC`: two-digit area (01-14),
/// macro-sector letter and a single digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DisciplineCode {
    area: u8,
    macro_sector: u8,
    digit: u8,
}

impl DisciplineCode {
    pub fn area_id(&self) -> u8 {
        self.area
    }

    pub fn macro_sector(&self) -> char {
        self.macro_sector as char
    }

    /// The bibliometric rule: areas 01-09 except five architecture
    /// disciplines, plus the whole psychology macro-sector 11/E.
    pub fn is_bibliometric(&self) -> bool {
        if (1..=9).contains(&self.area) {
            let code = self.to_string();
            !NON_BIBLIOMETRIC_EXCEPTIONS.contains(&code.as_str())
        } else {
            self.area == 11 && self.macro_sector == b'E'
        }
    }
}

impl FromStr for DisciplineCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let b = s.as_bytes();
        let invalid = || Error::InvalidDisciplineCode(s.to_string());
        if b.len() != 5 || b[2] != b'/' {
            return Err(invalid());
        }
        if !b[0].is_ascii_digit() || !b[1].is_ascii_digit() {
            return Err(invalid());
        }
        let area = (b[0] - b'0') * 10 + (b[1] - b'0');
        if !(1..=14).contains(&area) || !b[3].is_ascii_uppercase() || !b[4].is_ascii_digit() {
            return Err(invalid());
        }
        Ok(DisciplineCode {
            area,
            macro_sector: b[3],
            digit: b[4] - b'0',
        })
    }
}

impl fmt::Display for DisciplineCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:02}/{}{}",
            self.area, self.macro_sector as char, self.digit
        )
    }
}

impl Serialize for DisciplineCode {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DisciplineCode {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discipline {
    pub code: DisciplineCode,
    pub area_id: u8,
    pub bibliometric: bool,
    pub name: String,
}

impl Discipline {
    pub fn new(code: DisciplineCode, name: impl Into<String>) -> Self {
        Discipline {
            code,
            area_id: code.area_id(),
            bibliometric: code.is_bibliometric(),
            name: name.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Area {
    pub id: u8,
    pub code: String,
    pub name: String,
}

/// The discipline reference table. Lookups are by code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisciplineTable {
    by_code: BTreeMap<DisciplineCode, Discipline>,
}

impl DisciplineTable {
    /// The bundled table of 184 disciplines across 14 areas.
    pub fn bundled() -> &'static DisciplineTable {
        static TABLE: OnceLock<DisciplineTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            let by_code = tsv_rows(DISCIPLINES_TSV)
                .map(|cols| {
                    let code: DisciplineCode = cols[0].parse().expect("bundled code");
                    (code, Discipline::new(code, cols[1]))
                })
                .collect();
            DisciplineTable { by_code }
        })
    }

    pub fn from_disciplines(items: impl IntoIterator<Item = Discipline>) -> Self {
        DisciplineTable {
            by_code: items.into_iter().map(|d| (d.code, d)).collect(),
        }
    }

    pub fn get(&self, code: &DisciplineCode) -> Option<&Discipline> {
        self.by_code.get(code)
    }

    /// Parses and resolves a code string against the table.
    pub fn lookup(&self, code: &str) -> Option<&Discipline> {
        code.parse().ok().and_then(|c| self.by_code.get(&c))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Discipline> {
        self.by_code.values()
    }

    pub fn len(&self) -> usize {
        self.by_code.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_code.is_empty()
    }
}

pub fn areas() -> &'static [Area] {
    static AREAS: OnceLock<Vec<Area>> = OnceLock::new();
    AREAS.get_or_init(|| {
        tsv_rows(AREAS_TSV)
            .map(|cols| Area {
                id: cols[0].parse().expect("bundled area id"),
                code: cols[1].to_string(),
                name: cols[2].to_string(),
            })
            .collect()
    })
}

pub fn area(id: u8) -> Option<&'static Area> {
    areas().iter().find(|a| a.id == id)
}

fn tsv_rows(text: &str) -> impl Iterator<Item = Vec<&str>> {
    text.lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split('\t').collect())
}
