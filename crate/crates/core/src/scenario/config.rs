use std::path::Path;

use super::SweepSpec;
use crate::error::{Error, Result};

/// Parses a TOML sweep spec. Unknown keys are rejected.
pub fn parse_spec(text: &str) -> Result<SweepSpec> {
    let spec: SweepSpec = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    spec.validate()?;
    Ok(spec)
}

pub fn load_spec(path: &Path) -> Result<SweepSpec> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_spec(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn spec_to_toml(spec: &SweepSpec) -> Result<String> {
    toml::to_string(spec).map_err(|e| Error::Config(format!("cannot serialize spec: {e}")))
}

fn parse_value(raw: &str) -> toml::Value {
    // Anything TOML can read as a bare value (numbers, booleans, arrays,
    // inline tables); otherwise a plain string.
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.to_string())),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

/// Applies a `dotted.key=value` override and re-validates.
pub fn apply_override(spec: &SweepSpec, assignment: &str) -> Result<SweepSpec> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Usage(format!("override '{assignment}' is not of the form key=value")))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(Error::Usage(format!("override key '{key}' is malformed")));
    }
    let mut root = toml::Value::try_from(spec).map_err(|e| Error::Config(e.to_string()))?;
    let parts: Vec<&str> = key.split('.').collect();
    let mut node = &mut root;
    for part in &parts[..parts.len() - 1] {
        let table = node
            .as_table_mut()
            .ok_or_else(|| Error::Usage(format!("override '{key}': '{part}' is not inside a table")))?;
        node = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    }
    let last = parts[parts.len() - 1];
    node.as_table_mut()
        .ok_or_else(|| Error::Usage(format!("override '{key}' does not address a table entry")))?
        .insert(last.to_string(), parse_value(raw.trim()));
    let updated: SweepSpec = root
        .try_into()
        .map_err(|e: toml::de::Error| Error::Usage(format!("override '{assignment}': {e}")))?;
    updated.validate()?;
    Ok(updated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{list_scenarios, preset};

    #[test]
    fn presets_round_trip_losslessly() {
        for info in list_scenarios() {
            let spec = preset(info.id).unwrap();
            let text = spec_to_toml(&spec).unwrap();
            assert_eq!(parse_spec(&text).unwrap(), spec, "{}", info.id);
        }
    }

    #[test]
    fn unknown_key_is_config_error() {
        let mut text = spec_to_toml(&preset("fig1").unwrap()).unwrap();
        text = format!("bogus = 1\n{text}");
        assert!(matches!(parse_spec(&text), Err(Error::Config(_))));
    }

    #[test]
    fn override_numeric_field() {
        let s = apply_override(&preset("fig5").unwrap(), "bell.w0_a=2.5").unwrap();
        assert_eq!(s.bell.unwrap().w0_a, 2.5);
    }

    #[test]
    fn override_nested_tagged_enum() {
        let s = apply_override(&preset("fig1").unwrap(), "quadrature.nodes=32").unwrap();
        assert_eq!(s.quadrature, crate::quadrature::QuadratureSpec::GaussHermite { nodes: 32 });
    }

    #[test]
    fn override_string_and_array() {
        let s = apply_override(&preset("fig5").unwrap(), "noise.noisy_sides=[\"a\", \"b\"]").unwrap();
        assert_eq!(s.noise.unwrap().noisy_sides.len(), 2);
        let s = apply_override(&preset("fig1").unwrap(), "scenario=custom").unwrap();
        assert_eq!(s.scenario, "custom");
    }

    #[test]
    fn bad_overrides_rejected() {
        let base = preset("fig1").unwrap();
        assert!(matches!(apply_override(&base, "no_equals"), Err(Error::Usage(_))));
        assert!(matches!(apply_override(&base, "bell.unknown=1"), Err(Error::Usage(_))));
        assert!(apply_override(&base, "grid.points=1").is_err());
    }

    #[test]
    fn missing_file_is_io_error() {
        let r = load_spec(Path::new("/nonexistent/spec.toml"));
        assert!(matches!(r, Err(Error::Io { .. })));
    }
}
