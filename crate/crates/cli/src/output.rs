//! Number formatting, CSV assembly and atomic file output.

use std::io::Write;
use std::path::Path;

use crate::error::{CliError, CliResult};

/// Twelve significant digits in exponent form; `inf`, `-inf` and `nan`
/// for non-finite values.
pub fn number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.11e}")
    }
}

/// Shortest decimal form of `x` rounded to twelve significant digits.
pub fn short(x: f64) -> String {
    if !x.is_finite() {
        return number(x);
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    format!("{}", rounded + 0.0)
}

/// CSV text with LF line endings.
pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Write to a temporary file beside `path` and rename it into place, so an
/// error never leaves a partial file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
