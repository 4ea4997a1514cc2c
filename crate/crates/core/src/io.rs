//! Matrix files: JSON `{"n": 3, "entries": [[...], ...]}` or headerless CSV.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{Matrix, Semiring};
use crate::error::{Error, Result};

/// On-disk matrix, rows in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub n: usize,
    pub entries: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_matrix(a: &Matrix) -> Self {
        MatrixFile {
            n: a.dim(),
            entries: a.rows(),
        }
    }

    pub fn to_matrix(&self, sr: Semiring) -> Result<Matrix> {
        if self.entries.len() != self.n {
            return Err(Error::Parse(format!(
                "\"n\" is {} but {} rows were given",
                self.n,
                self.entries.len()
            )));
        }
        validate_rows(&self.entries)?;
        Matrix::from_rows(&self.entries, sr).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain numbers serialize")
    }
}

fn validate_rows(rows: &[Vec<f64>]) -> Result<()> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::Parse("matrix has no rows".into()));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Parse(format!(
                "row {} has {} entries, expected {n}",
                i + 1,
                row.len()
            )));
        }
        if let Some(x) = row.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::Parse(format!("row {}: entry {x} is not a finite nonnegative number", i + 1)));
        }
    }
    Ok(())
}

fn parse_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("csv: {e}")))?;
        let row = record
            .iter()
            .map(|field| {
                field
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("row {}: cannot read {field:?} as a number", i + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Parses a matrix from JSON (first non-blank character `{`) or CSV text.
pub fn parse_matrix(text: &str, sr: Semiring) -> Result<Matrix> {
    if text.trim_start().starts_with('{') {
        let file: MatrixFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("json: {e}")))?;
        file.to_matrix(sr)
    } else {
        let rows = parse_csv(text)?;
        validate_rows(&rows)?;
        Matrix::from_rows(&rows, sr).map_err(|e| Error::Parse(e.to_string()))
    }
}

pub fn read_matrix(path: impl AsRef<Path>, sr: Semiring) -> Result<Matrix> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_matrix(&text, sr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_and_csv_agree() {
        let json = r#"{"n": 2, "entries": [[0.5, 1], [0, 2.25]]}"#;
        let csv = "0.5, 1\n0,2.25\n";
        let a = parse_matrix(json, Semiring::MaxTimes).unwrap();
        assert_eq!(a, parse_matrix(csv, Semiring::MaxTimes).unwrap());
        assert_eq!(a.rows(), vec![vec![0.5, 1.0], vec![0.0, 2.25]]);
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            r#"{"n": 3, "entries": [[1, 0], [0, 1]]}"#,
            r#"{"n": 2, "entries": [[1, -1], [0, 1]]}"#,
            r#"{"n": 2, "entries": [[1, 0, 0], [0, 1]]}"#,
            r#"{"n": 1, "entries": [[1]], "extra": 0}"#,
            "1, 2\n3\n",
            "1, x\n3, 4\n",
            "1, inf\n3, 4\n",
            "",
        ] {
            assert!(matches!(parse_matrix(text, Semiring::PlusTimes), Err(Error::Parse(_))), "{text}");
        }
    }

    #[test]
    fn file_round_trip() {
        let a = Matrix::from_rows(&[vec![0.1, 0.0], vec![3.0, 1e-7]], Semiring::PlusTimes).unwrap();
        let text = MatrixFile::from_matrix(&a).to_json();
        assert_eq!(parse_matrix(&text, Semiring::PlusTimes).unwrap(), a);
    }
}
