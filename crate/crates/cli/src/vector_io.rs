//! Vectors as CSV text: one decimal value per line, `#` comments allowed.

use std::io::Write;
use std::path::Path;

use crate::error::{usage, CliResult};

pub fn parse_vector(text: &str, origin: &str) -> CliResult<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let v: f64 = t
            .parse()
            .map_err(|_| usage(format!("{origin}:{}: not a number: '{t}'", i + 1)))?;
        if !v.is_finite() {
            return Err(usage(format!("{origin}:{}: value is not finite", i + 1)));
        }
        out.push(v);
    }
    Ok(out)
}

pub fn read_vector(path: &Path) -> CliResult<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    parse_vector(&text, &path.display().to_string())
}

pub fn write_vector(out: &mut dyn Write, v: &[f64]) -> std::io::Result<()> {
    for x in v {
        writeln!(out, "{x}")?;
    }
    Ok(())
}
