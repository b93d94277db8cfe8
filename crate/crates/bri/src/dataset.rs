//! Headerless numeric CSV: one sample per line, label in the last column.

use std::io::Read;
use std::path::Path;

use bri_core::Block;

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("dataset is empty")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Feature matrix and labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Block,
    pub labels: Vec<f64>,
}

impl Dataset {
    pub fn shape(&self) -> (usize, usize) {
        self.features.shape()
    }
}

pub fn load(path: &Path) -> Result<Dataset, DatasetError> {
    read(std::fs::File::open(path)?)
}

pub fn read<R: Read>(input: R) -> Result<Dataset, DatasetError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut data = Vec::new();
    let mut labels = Vec::new();
    let mut width: Option<usize> = None;
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| DatasetError::Malformed {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() < 2 {
            return Err(DatasetError::Malformed {
                line,
                message: "need at least one feature and a label".into(),
            });
        }
        match width {
            None => width = Some(rec.len()),
            Some(w) if w != rec.len() => {
                return Err(DatasetError::Malformed {
                    line,
                    message: format!("expected {w} fields, found {}", rec.len()),
                })
            }
            _ => {}
        }
        for (col, field) in rec.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| DatasetError::Malformed {
                line,
                message: format!("column {}: '{field}' is not a number", col + 1),
            })?;
            if !v.is_finite() {
                return Err(DatasetError::Malformed {
                    line,
                    message: format!("column {}: non-finite value", col + 1),
                });
            }
            if col + 1 == rec.len() {
                labels.push(v);
            } else {
                data.push(v);
            }
        }
        rows += 1;
    }
    let width = width.ok_or(DatasetError::Empty)?;
    let features = Block::from_vec(rows, width - 1, data).expect("row widths checked");
    Ok(Dataset { features, labels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_features_and_labels() {
        let ds = read("1,2,3\n4, 5 ,6\n".as_bytes()).unwrap();
        assert_eq!(ds.shape(), (2, 2));
        assert_eq!(ds.features.as_slice(), &[1.0, 2.0, 4.0, 5.0]);
        assert_eq!(ds.labels, vec![3.0, 6.0]);
    }

    #[test]
    fn reports_line_numbers() {
        let err = read("1,2,3\n4,x,6\n".as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), "line 2: column 2: 'x' is not a number");
        let err = read("1,2,3\n4,5\n".as_bytes()).unwrap_err();
        assert!(err.to_string().starts_with("line 2: expected 3 fields"), "{err}");
        assert!(matches!(read("".as_bytes()), Err(DatasetError::Empty)));
    }
}
