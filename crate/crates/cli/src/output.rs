//! Atomic file output and small CSV helpers.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{compute, usage, CliResult};

/// Writes `contents` to a temporary sibling and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let name = path
        .file_name()
        .ok_or_else(|| usage(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    result.map_err(|e| {
        let _ = fs::remove_file(&tmp);
        compute(format!("writing {}: {e}", path.display()))
    })
}

pub fn ensure_dir(dir: &Path) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| usage(format!("creating {}: {e}", dir.display())))?;
    Ok(dir.to_path_buf())
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| usage(format!("reading {}: {e}", path.display())))
}

/// Empty for `None`, shortest round-trip form otherwise.
pub fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn csv_line(fields: &[String]) -> String {
    let mut s = fields.join(",");
    s.push('\n');
    s
}

/// Identifiers end up unquoted in CSV files and file names.
pub fn check_identifier(id: &str) -> CliResult<()> {
    if id.is_empty() || !id.chars().all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c)) {
        return Err(usage(format!(
            "experiment_id `{id}` may only use letters, digits, `_`, `-` and `.`"
        )));
    }
    Ok(())
}
