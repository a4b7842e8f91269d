//! Machine-readable diagnostics, one JSON object per line, kept out of the
//! data files. Each stage owns its rows: re-running a stage replaces them,
//! so repeated runs stay byte-identical.

use crate::errors::CliResult;
use crate::io::{read_ndjson, write_atomic};
use crate::rows::DiagnosticRow;
use std::path::Path;

pub struct DiagSink {
    stage: String,
    rows: Vec<DiagnosticRow>,
}

impl DiagSink {
    pub fn new(stage: &str) -> DiagSink {
        DiagSink {
            stage: stage.to_string(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, kind: &str, detail: impl Into<String>) {
        self.rows.push(DiagnosticRow {
            stage: self.stage.clone(),
            kind: kind.to_string(),
            detail: detail.into(),
        });
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn flush(self, out_dir: &Path) -> CliResult<usize> {
        let path = out_dir.join("diagnostics.ndjson");
        let mut kept: Vec<DiagnosticRow> = if path.exists() {
            read_ndjson(&path)?
                .into_iter()
                .filter(|r: &DiagnosticRow| r.stage != self.stage)
                .collect()
        } else {
            Vec::new()
        };
        let count = self.rows.len();
        kept.extend(self.rows);
        let mut bytes = Vec::new();
        for row in &kept {
            bytes.extend_from_slice(serde_json::to_string(row).expect("row").as_bytes());
            bytes.push(b'\n');
        }
        write_atomic(&path, &bytes)?;
        Ok(count)
    }
}
