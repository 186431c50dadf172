//! Deterministic, atomic output.

use std::io::Write;
use std::path::Path;

use crate::CliError;

/// Pretty JSON with a trailing newline.
pub fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Writes `contents` to `dir/name` through a temporary file and a rename, so
/// readers never see a partial file.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::Io(e.to_string()))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?;
    tmp.as_file().sync_all().map_err(|e| CliError::Io(e.to_string()))?;
    let target = dir.join(name);
    tmp.persist(&target)
        .map_err(|e| CliError::Io(format!("cannot write {}: {}", target.display(), e.error)))?;
    Ok(())
}

/// Routes one artifact to `dir/name`, or to stdout when no directory is set.
pub fn emit(dir: Option<&Path>, name: &str, contents: &str) -> Result<(), CliError> {
    match dir {
        Some(d) => write_atomic(d, name, contents),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}
