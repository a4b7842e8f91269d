//! Small IO helpers: NDJSON readers/writers, atomic writes, hashing.

use crate::errors::{io_error, CliResult};
use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

pub fn ensure_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|e| io_error(&format!("mkdir {}", path.display()), e))
}

/// Write a file via a temp sibling so partially-written outputs never
/// survive a crash.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(|e| io_error(&format!("write {}", tmp.display()), e))?;
    fs::rename(&tmp, path).map_err(|e| io_error(&format!("rename to {}", path.display()), e))
}

pub fn write_json_pretty<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable");
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub struct NdjsonWriter {
    inner: BufWriter<fs::File>,
    path: std::path::PathBuf,
    pub rows: usize,
}

impl NdjsonWriter {
    pub fn create(path: &Path) -> CliResult<NdjsonWriter> {
        let file = fs::File::create(path)
            .map_err(|e| io_error(&format!("create {}", path.display()), e))?;
        Ok(NdjsonWriter {
            inner: BufWriter::new(file),
            path: path.to_path_buf(),
            rows: 0,
        })
    }

    pub fn write<T: Serialize>(&mut self, row: &T) -> CliResult<()> {
        let line = serde_json::to_string(row).expect("serializable row");
        self.inner
            .write_all(line.as_bytes())
            .and_then(|()| self.inner.write_all(b"\n"))
            .map_err(|e| io_error(&format!("write {}", self.path.display()), e))?;
        self.rows += 1;
        Ok(())
    }

    pub fn finish(mut self) -> CliResult<usize> {
        self.inner
            .flush()
            .map_err(|e| io_error(&format!("flush {}", self.path.display()), e))?;
        Ok(self.rows)
    }
}

pub fn read_ndjson<T: DeserializeOwned>(path: &Path) -> CliResult<Vec<T>> {
    let file =
        fs::File::open(path).map_err(|e| io_error(&format!("open {}", path.display()), e))?;
    let reader = BufReader::new(file);
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| io_error(&format!("read {}", path.display()), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let row = serde_json::from_str(&line).map_err(|e| {
            io_error(
                &format!("{}:{}", path.display(), idx + 1),
                std::io::Error::new(std::io::ErrorKind::InvalidData, e),
            )
        })?;
        out.push(row);
    }
    Ok(out)
}

pub fn read_to_string_opt(path: &Path) -> Option<String> {
    fs::read_to_string(path).ok()
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    let bytes =
        fs::read(path).map_err(|e| io_error(&format!("hash {}", path.display()), e))?;
    Ok(sha256_bytes(&bytes))
}

pub fn sha256_bytes(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
