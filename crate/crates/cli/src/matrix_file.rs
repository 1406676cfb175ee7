//! JSON matrix format: `{"rows": m, "cols": n, "data": [[[re, im], ...], ...]}`.

use std::fmt;
use std::fs;
use std::path::Path;

use geninv_core::{CMatrix, C64};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormatError(pub String);

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for FormatError {}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let data = (0..m.rows())
            .map(|i| {
                (0..m.cols())
                    .map(|j| {
                        let z = m.get(i, j);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data,
        }
    }

    pub fn validate(&self) -> Result<(), FormatError> {
        if self.data.len() != self.rows {
            return Err(FormatError(format!(
                "declared {} rows but data has {}",
                self.rows,
                self.data.len()
            )));
        }
        for (i, row) in self.data.iter().enumerate() {
            if row.len() != self.cols {
                return Err(FormatError(format!(
                    "row {i} has {} entries, expected {}",
                    row.len(),
                    self.cols
                )));
            }
            if let Some(j) = row.iter().position(|z| !(z[0].is_finite() && z[1].is_finite())) {
                return Err(FormatError(format!("entry ({i}, {j}) is not finite")));
            }
        }
        Ok(())
    }

    pub fn to_matrix(&self) -> Result<CMatrix, FormatError> {
        self.validate()?;
        let data = self
            .data
            .iter()
            .flat_map(|row| row.iter().map(|z| C64::new(z[0], z[1])))
            .collect();
        CMatrix::new(self.rows, self.cols, data).map_err(|e| FormatError(e.to_string()))
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let f: Self = serde_json::from_str(text).map_err(|e| FormatError(format!("malformed matrix file: {e}")))?;
        f.validate()?;
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix files always serialize")
    }
}

/// Reads a nonempty matrix from a JSON file.
pub fn read_matrix(path: &Path) -> Result<CMatrix, FormatError> {
    let text = fs::read_to_string(path).map_err(|e| FormatError(format!("cannot read {}: {e}", path.display())))?;
    let m = MatrixFile::parse(&text)?.to_matrix()?;
    if m.rows() == 0 || m.cols() == 0 {
        return Err(FormatError(format!("{} holds an empty matrix", path.display())));
    }
    Ok(m)
}

pub fn write_matrix(path: &Path, m: &CMatrix) -> std::io::Result<()> {
    fs::write(path, MatrixFile::from_matrix(m).to_json())
}
