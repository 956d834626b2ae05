//! Containers for measured JND samples.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::qp::Qp;

/// Display resolution of a sequence set. Ordered from largest to smallest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Resolution {
    #[cfg_attr(feature = "serde", serde(rename = "1080p"))]
    P1080,
    #[cfg_attr(feature = "serde", serde(rename = "720p"))]
    P720,
    #[cfg_attr(feature = "serde", serde(rename = "540p"))]
    P540,
    #[cfg_attr(feature = "serde", serde(rename = "360p"))]
    P360,
}

impl Resolution {
    pub const ALL: [Resolution; 4] = [Resolution::P1080, Resolution::P720, Resolution::P540, Resolution::P360];

    pub fn as_str(self) -> &'static str {
        match self {
            Resolution::P1080 => "1080p",
            Resolution::P720 => "720p",
            Resolution::P540 => "540p",
            Resolution::P360 => "360p",
        }
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Resolution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Resolution::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or(Error::param("resolution", "expected one of 1080p, 720p, 540p, 360p"))
    }
}

/// A sequence set: one source clip at one resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SequenceId {
    pub content: u32,
    pub resolution: Resolution,
}

impl SequenceId {
    pub fn new(content: u32, resolution: Resolution) -> Self {
        SequenceId { content, resolution }
    }
}

impl fmt::Display for SequenceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.content, self.resolution)
    }
}

/// One entry of a sample matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "kind", content = "qp"))]
pub enum Cell {
    #[default]
    Missing,
    Observed(Qp),
    /// The JND lies beyond the tested range; the QP is the end of that range.
    Censored(Qp),
}

impl Cell {
    pub fn observed(self) -> Option<Qp> {
        match self {
            Cell::Observed(qp) => Some(qp),
            _ => None,
        }
    }

    pub fn is_present(self) -> bool {
        !matches!(self, Cell::Missing)
    }
}

/// Samples of one JND level, indexed by subject (rows) and sequence (columns).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SampleMatrix {
    subjects: Vec<u32>,
    sequences: Vec<SequenceId>,
    cells: Vec<Cell>,
}

impl SampleMatrix {
    /// An all-missing matrix. Subject and sequence ids are sorted and deduplicated.
    pub fn new(mut subjects: Vec<u32>, mut sequences: Vec<SequenceId>) -> Self {
        subjects.sort_unstable();
        subjects.dedup();
        sequences.sort_unstable();
        sequences.dedup();
        let cells = alloc::vec![Cell::Missing; subjects.len() * sequences.len()];
        SampleMatrix {
            subjects,
            sequences,
            cells,
        }
    }

    pub fn subjects(&self) -> &[u32] {
        &self.subjects
    }

    pub fn sequences(&self) -> &[SequenceId] {
        &self.sequences
    }

    pub fn subject_count(&self) -> usize {
        self.subjects.len()
    }

    pub fn sequence_count(&self) -> usize {
        self.sequences.len()
    }

    pub fn subject_index(&self, subject: u32) -> Option<usize> {
        self.subjects.binary_search(&subject).ok()
    }

    pub fn sequence_index(&self, sequence: SequenceId) -> Option<usize> {
        self.sequences.binary_search(&sequence).ok()
    }

    pub fn get(&self, row: usize, col: usize) -> Cell {
        self.cells[row * self.sequences.len() + col]
    }

    pub fn set(&mut self, row: usize, col: usize, cell: Cell) {
        let n = self.sequences.len();
        self.cells[row * n + col] = cell;
    }

    pub fn row(&self, row: usize) -> &[Cell] {
        let n = self.sequences.len();
        &self.cells[row * n..(row + 1) * n]
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = Cell> + '_ {
        (0..self.subjects.len()).map(move |row| self.get(row, col))
    }

    /// Observed QPs of one sequence, with their row indices.
    pub fn observed_in_column(&self, col: usize) -> Vec<(usize, Qp)> {
        self.column(col)
            .enumerate()
            .filter_map(|(row, cell)| cell.observed().map(|qp| (row, qp)))
            .collect()
    }

    pub fn censored_in_column(&self, col: usize) -> usize {
        self.column(col).filter(|c| matches!(c, Cell::Censored(_))).count()
    }

    pub fn present_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_present()).count()
    }
}

/// A single sample together with its coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Record {
    pub sequence: SequenceId,
    pub subject: u32,
    pub jnd_index: u8,
    pub cell: Cell,
}

/// Samples of every JND level of a study.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Dataset {
    pub levels: BTreeMap<u8, SampleMatrix>,
}

impl Dataset {
    /// Builds a dataset from records. Duplicate coordinates are rejected.
    pub fn from_records<I>(records: I) -> Result<Self>
    where
        I: IntoIterator<Item = Record>,
    {
        let records: Vec<Record> = records.into_iter().filter(|r| r.cell.is_present()).collect();
        let mut axes: BTreeMap<u8, (Vec<u32>, Vec<SequenceId>)> = BTreeMap::new();
        for r in &records {
            let entry = axes.entry(r.jnd_index).or_default();
            entry.0.push(r.subject);
            entry.1.push(r.sequence);
        }
        let mut levels: BTreeMap<u8, SampleMatrix> = axes
            .into_iter()
            .map(|(level, (subjects, sequences))| (level, SampleMatrix::new(subjects, sequences)))
            .collect();
        for r in records {
            let m = levels.get_mut(&r.jnd_index).expect("level registered above");
            let row = m.subject_index(r.subject).expect("subject registered above");
            let col = m.sequence_index(r.sequence).expect("sequence registered above");
            if m.get(row, col).is_present() {
                return Err(Error::DuplicateRecord {
                    sequence: r.sequence,
                    subject: r.subject,
                    jnd_index: r.jnd_index,
                });
            }
            m.set(row, col, r.cell);
        }
        Ok(Dataset { levels })
    }

    /// All present samples in canonical order: content, resolution, subject, JND level.
    pub fn records(&self) -> Vec<Record> {
        let mut out: Vec<Record> = self
            .levels
            .iter()
            .flat_map(|(&jnd_index, m)| {
                (0..m.subject_count()).flat_map(move |row| {
                    (0..m.sequence_count()).filter_map(move |col| {
                        let cell = m.get(row, col);
                        cell.is_present().then(|| Record {
                            sequence: m.sequences()[col],
                            subject: m.subjects()[row],
                            jnd_index,
                            cell,
                        })
                    })
                })
            })
            .collect();
        out.sort_unstable_by_key(|r| (r.sequence, r.subject, r.jnd_index));
        out
    }
}
