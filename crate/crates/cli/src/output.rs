//! Atomic file emission: every artifact is written to a temp file in the
//! target directory and renamed into place.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(format!("{}: {e}", dir.display())))
}

/// Writes bytes atomically (temp file + rename).
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    ensure_dir(dir)?;
    let tmp: PathBuf = dir.join(format!(
        ".{}.tmp",
        path.file_name().map(|s| s.to_string_lossy()).unwrap_or_default()
    ));
    std::fs::write(&tmp, bytes).map_err(|e| CliError::io(format!("{}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    Ok(())
}

/// Serializes a report as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::io(format!("json: {e}")))?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

/// Writes a versioned CSV: `# schema=1`, a header row, then the records.
pub fn write_csv(path: &Path, header: &str, rows: &[Vec<f64>]) -> Result<(), CliError> {
    let mut s = String::from("# schema=1\n");
    s.push_str(header);
    s.push('\n');
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                s.push(',');
            }
            s.push_str(&format!("{v}"));
            first = false;
        }
        s.push('\n');
    }
    write_atomic(path, s.as_bytes())
}
