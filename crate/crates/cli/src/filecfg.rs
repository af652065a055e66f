//! Flat key=value config files mirroring the CLI flags one-to-one.
//!
//! Keys use the long flag names (`n`, `colors`, `stat`, `beta`, `length`,
//! `sweep`, `from`, `to`, `steps`, `spacing`, `out`, `tol-scale`,
//! `oracle-nmax`). Blank lines and `#` comments are ignored. Explicit CLI
//! flags always win over file values.

use std::collections::HashMap;
use std::path::Path;

pub fn load(path: &Path) -> Result<HashMap<String, String>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
    let mut map = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!(
                "{}:{}: expected key=value, got `{line}`",
                path.display(),
                idx + 1
            ));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Fill `slot` from the config map when the CLI left it empty.
pub fn fill<T>(
    slot: &mut Option<T>,
    map: &HashMap<String, String>,
    key: &str,
    parse: impl FnOnce(&str) -> Result<T, String>,
) -> Result<(), String> {
    if slot.is_none() {
        if let Some(raw) = map.get(key) {
            *slot = Some(parse(raw).map_err(|e| format!("config key `{key}`: {e}"))?);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn parses_and_fills() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "# comment\nbeta = 1.5\nn=4\n\ncolors=with").unwrap();
        let map = load(file.path()).unwrap();
        assert_eq!(map.len(), 3);
        let mut beta: Option<f64> = None;
        fill(&mut beta, &map, "beta", |s| {
            s.parse().map_err(|e| format!("{e}"))
        })
        .unwrap();
        assert_eq!(beta, Some(1.5));
        let mut n: Option<u32> = Some(2);
        fill(&mut n, &map, "n", |s| s.parse().map_err(|e| format!("{e}"))).unwrap();
        assert_eq!(n, Some(2), "explicit value must win");
    }

    #[test]
    fn rejects_malformed_lines() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "beta 1.5").unwrap();
        assert!(load(file.path()).is_err());
    }
}
