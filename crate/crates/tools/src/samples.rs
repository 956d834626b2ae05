//! The canonical sample CSV:
//!
//! ```text
//! content_id,resolution,subject_id,jnd_index,qp,censored
//! 1,1080p,3,1,27,0
//! ```
//!
//! UTF-8, LF line endings, `censored` in `{0, 1}`, rows sorted by content,
//! resolution, subject and JND index.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use jnd_core::{Cell, Dataset, Qp, Record, Resolution, SequenceId};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HEADER: [&str; 6] = ["content_id", "resolution", "subject_id", "jnd_index", "qp", "censored"];

/// One measured JND sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DatasetRow {
    pub content_id: u32,
    pub resolution: Resolution,
    pub subject_id: u32,
    pub jnd_index: u8,
    pub qp: Qp,
    pub censored: bool,
}

impl DatasetRow {
    pub fn sequence(&self) -> SequenceId {
        SequenceId::new(self.content_id, self.resolution)
    }

    fn key(&self) -> (u32, Resolution, u32, u8) {
        (self.content_id, self.resolution, self.subject_id, self.jnd_index)
    }

    pub fn to_record(self) -> Record {
        Record {
            sequence: self.sequence(),
            subject: self.subject_id,
            jnd_index: self.jnd_index,
            cell: if self.censored {
                Cell::Censored(self.qp)
            } else {
                Cell::Observed(self.qp)
            },
        }
    }

    /// `None` for a missing cell.
    pub fn from_record(record: &Record) -> Option<Self> {
        let (qp, censored) = match record.cell {
            Cell::Observed(qp) => (qp, false),
            Cell::Censored(qp) => (qp, true),
            Cell::Missing => return None,
        };
        Some(DatasetRow {
            content_id: record.sequence.content,
            resolution: record.sequence.resolution,
            subject_id: record.subject,
            jnd_index: record.jnd_index,
            qp,
            censored,
        })
    }
}

pub fn sort_canonical(rows: &mut [DatasetRow]) {
    rows.sort_by_key(DatasetRow::key);
}

fn field<T: std::str::FromStr>(record: &csv::StringRecord, idx: usize, line: u64) -> Result<T> {
    let raw = record.get(idx).unwrap_or("");
    raw.parse().map_err(|_| Error::Schema {
        line,
        message: format!("{}: cannot parse {raw:?}", HEADER[idx]),
    })
}

/// Parses a sample CSV. Errors carry 1-based line numbers.
pub fn read_rows<R: Read>(reader: R) -> Result<Vec<DatasetRow>> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = csv.records();
    let schema = |line, message: String| Error::Schema { line, message };
    match records.next() {
        Some(Ok(h)) if h.iter().eq(HEADER) => {}
        Some(Ok(h)) => {
            return Err(schema(
                1,
                format!(
                    "expected header {:?}, found {:?}",
                    HEADER.join(","),
                    h.iter().collect::<Vec<_>>().join(",")
                ),
            ));
        }
        Some(Err(e)) => return Err(schema(1, e.to_string())),
        None => return Err(schema(1, "missing header".into())),
    }
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for record in records {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, csv::Position::line);
            schema(line, e.to_string())
        })?;
        let line = record.position().map_or(0, csv::Position::line);
        if record.len() != HEADER.len() {
            return Err(schema(
                line,
                format!("expected {} fields, found {}", HEADER.len(), record.len()),
            ));
        }
        let qp: i64 = field(&record, 4, line)?;
        let qp = Qp::new(qp).map_err(|_| schema(line, format!("qp {qp} outside [0, 51]")))?;
        let jnd_index: u8 = field(&record, 3, line)?;
        if jnd_index == 0 {
            return Err(schema(line, "jnd_index must be at least 1".into()));
        }
        let censored = match record.get(5) {
            Some("0") => false,
            Some("1") => true,
            other => {
                return Err(schema(
                    line,
                    format!("censored must be 0 or 1, found {:?}", other.unwrap_or("")),
                ))
            }
        };
        let row = DatasetRow {
            content_id: field(&record, 0, line)?,
            resolution: field(&record, 1, line)?,
            subject_id: field(&record, 2, line)?,
            jnd_index,
            qp,
            censored,
        };
        if !seen.insert(row.key()) {
            return Err(schema(
                line,
                format!(
                    "duplicate sample for content {}, {}, subject {}, JND {}",
                    row.content_id, row.resolution, row.subject_id, row.jnd_index
                ),
            ));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Writes `rows` in canonical order.
pub fn write_rows<W: Write>(writer: W, rows: &[DatasetRow]) -> Result<()> {
    let mut sorted = rows.to_vec();
    sort_canonical(&mut sorted);
    let mut csv = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    let to_io = |e: csv::Error| Error::io("<csv>", e.into());
    csv.write_record(HEADER).map_err(to_io)?;
    for r in &sorted {
        csv.write_record([
            r.content_id.to_string(),
            r.resolution.as_str().to_string(),
            r.subject_id.to_string(),
            r.jnd_index.to_string(),
            r.qp.get().to_string(),
            u8::from(r.censored).to_string(),
        ])
        .map_err(to_io)?;
    }
    csv.flush().map_err(|e| Error::io("<csv>", e))
}

pub fn rows_to_dataset(rows: &[DatasetRow]) -> Result<Dataset> {
    Ok(Dataset::from_records(rows.iter().map(|r| r.to_record()))?)
}

pub fn dataset_rows(dataset: &Dataset) -> Vec<DatasetRow> {
    dataset.records().iter().filter_map(DatasetRow::from_record).collect()
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    rows_to_dataset(&read_rows(std::io::BufReader::new(file))?)
}

pub fn write_dataset(path: &Path, dataset: &Dataset) -> Result<()> {
    write_rows_to(path, &dataset_rows(dataset))
}

pub fn write_rows_to(path: &Path, rows: &[DatasetRow]) -> Result<()> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows)?;
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "content_id,resolution,subject_id,jnd_index,qp,censored\n\
                          1,1080p,1,1,27,0\n\
                          1,1080p,2,1,51,1\n\
                          1,720p,1,1,30,0\n\
                          2,1080p,1,1,25,0\n";

    #[test]
    fn round_trip_is_byte_identical() {
        let rows = read_rows(SAMPLE.as_bytes()).unwrap();
        let mut out = Vec::new();
        write_rows(&mut out, &rows).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), SAMPLE);
    }

    #[test]
    fn output_is_sorted_whatever_the_input_order() {
        let mut lines: Vec<&str> = SAMPLE.lines().collect();
        lines[1..].reverse();
        let shuffled = lines.join("\n") + "\n";
        let mut out = Vec::new();
        write_rows(&mut out, &read_rows(shuffled.as_bytes()).unwrap()).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), SAMPLE);
    }

    #[test]
    fn out_of_range_qp_names_the_line() {
        let bad = SAMPLE.replace("2,1080p,1,1,25,0", "2,1080p,1,1,55,0");
        match read_rows(bad.as_bytes()) {
            Err(Error::Schema { line, message }) => {
                assert_eq!(line, 5);
                assert!(message.contains("55"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicates_are_rejected() {
        let bad = format!("{SAMPLE}1,720p,1,1,31,0\n");
        assert!(matches!(read_rows(bad.as_bytes()), Err(Error::Schema { line: 6, .. })));
    }

    #[test]
    fn schema_violations() {
        for (bad, line) in [
            ("content_id,resolution,subject,jnd_index,qp,censored\n", 1),
            (
                "content_id,resolution,subject_id,jnd_index,qp,censored\n1,4k,1,1,27,0\n",
                2,
            ),
            (
                "content_id,resolution,subject_id,jnd_index,qp,censored\n1,1080p,1,1,27,2\n",
                2,
            ),
            (
                "content_id,resolution,subject_id,jnd_index,qp,censored\n1,1080p,1,0,27,0\n",
                2,
            ),
            (
                "content_id,resolution,subject_id,jnd_index,qp,censored\n1,1080p,1,1,27\n",
                2,
            ),
        ] {
            match read_rows(bad.as_bytes()) {
                Err(Error::Schema { line: l, .. }) => assert_eq!(l, line, "{bad}"),
                other => panic!("{bad}: {other:?}"),
            }
        }
    }

    #[test]
    fn dataset_conversion_keeps_censoring() {
        let rows = read_rows(SAMPLE.as_bytes()).unwrap();
        let ds = rows_to_dataset(&rows).unwrap();
        let mut back = dataset_rows(&ds);
        sort_canonical(&mut back);
        let mut expected = rows.clone();
        sort_canonical(&mut expected);
        assert_eq!(back, expected);
    }
}
