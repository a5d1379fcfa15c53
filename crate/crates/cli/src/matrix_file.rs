//! Transducer matrix files: TOML with a schema version, optional metadata
//! and a row-major 4×4 matrix in `(q1, p1, q2, p2)` order.
//!
//! ```toml
//! schema = 1
//! label = "beam splitter"
//! units = "dimensionless"
//! matrix = [
//!   [0.7071067811865476, 0.0, 0.7071067811865476, 0.0],
//!   [0.0, 0.7071067811865476, 0.0, 0.7071067811865476],
//!   [-0.7071067811865476, 0.0, 0.7071067811865476, 0.0],
//!   [0.0, -0.7071067811865476, 0.0, 0.7071067811865476],
//! ]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use transduction::classification::ClassifyOptions;
use transduction::TwoModeTransform;

use crate::error::{CliError, CliResult};
use crate::output::write_atomic;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransducerFile {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<String>,
    pub matrix: Vec<Vec<f64>>,
}

impl TransducerFile {
    pub fn from_transform(t: &TwoModeTransform, label: Option<String>) -> Self {
        TransducerFile {
            schema: SCHEMA,
            label,
            units: None,
            matrix: t.to_rows().iter().map(|r| r.to_vec()).collect(),
        }
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let file: TransducerFile = toml::from_str(text).map_err(|e| CliError::validation(e.to_string()))?;
        if file.schema != SCHEMA {
            return Err(CliError::validation(format!(
                "unsupported schema {}; expected {SCHEMA}",
                file.schema
            )));
        }
        if file.matrix.len() != 4 || file.matrix.iter().any(|r| r.len() != 4) {
            return Err(CliError::validation("matrix must have 4 rows of 4 entries"));
        }
        if file.matrix.iter().flatten().any(|v| !v.is_finite()) {
            return Err(CliError::validation("matrix entries must be finite"));
        }
        Ok(file)
    }

    /// The transform, checked to preserve the canonical commutators.
    pub fn transform(&self) -> CliResult<TwoModeTransform> {
        let mut rows = [[0.0; 4]; 4];
        for (dst, src) in rows.iter_mut().zip(&self.matrix) {
            dst.copy_from_slice(src);
        }
        let t = TwoModeTransform::from_rows(rows);
        let scale = t.max_abs().max(1.0);
        let residual = t.symplectic_residual();
        if residual > ClassifyOptions::default().symplectic_tol * scale * scale {
            return Err(CliError::validation(format!(
                "matrix is not symplectic: max commutator residual {residual:.6e}"
            )));
        }
        Ok(t)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("matrix file serializes")
    }
}

pub fn load(path: &Path) -> CliResult<(TransducerFile, TwoModeTransform)> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let file = TransducerFile::parse(&text).map_err(|e| CliError::validation(format!("{}: {}", path.display(), e)))?;
    let t = file
        .transform()
        .map_err(|e| CliError::validation(format!("{}: {}", path.display(), e)))?;
    Ok((file, t))
}

pub fn save(path: &Path, t: &TwoModeTransform, label: &str) -> CliResult<()> {
    write_atomic(path, TransducerFile::from_transform(t, Some(label.to_string())).to_toml().as_bytes())
}
