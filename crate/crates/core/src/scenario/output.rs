use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{ScanResult, ScanRows};
use crate::error::{Error, Result};

fn num(x: f64) -> String {
    // 17 significant digits: enough to round-trip any f64.
    format!("{x:.16e}")
}

/// CSV text of a scan: header line, one row per grid point, LF endings.
pub fn csv_body(result: &ScanResult) -> String {
    let mut out = String::new();
    match &result.rows {
        ScanRows::Bell(rows) => {
            let x_name = result.metadata.spec.sweep_variable.column_name();
            let _ = writeln!(out, "{x_name},e1,e2,e3,e4,b,abs_b");
            for r in rows {
                let b = &r.bell;
                let cols = [r.x, b.e1, b.e2, b.e3, b.e4, b.b, b.abs_b].map(num);
                let _ = writeln!(out, "{}", cols.join(","));
            }
        }
        ScanRows::Density(rows) => {
            out.push_str("theta,density\n");
            for r in rows {
                let _ = writeln!(out, "{},{}", num(r.theta), num(r.density));
            }
        }
    }
    out
}

/// `<out>.json`, next to the CSV.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".json");
    PathBuf::from(name)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes the CSV to `out` and the metadata sidecar to `<out>.json`.
pub fn write_outputs(result: &ScanResult, out: &Path) -> Result<()> {
    write_file(out, &csv_body(result))?;
    let json = serde_json::to_string_pretty(&result.metadata)
        .map_err(|e| Error::Config(format!("cannot serialize metadata: {e}")))?;
    write_file(&sidecar_path(out), &(json + "\n"))
}
