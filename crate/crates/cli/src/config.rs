//! Flat `key = value` configuration files.
//!
//! Each key names a long flag of the selected command. Values from the file
//! are placed before the user's own arguments, so flags given on the command
//! line win.

use std::path::Path;

/// Subcommand names, used to locate the command in the raw arguments.
pub const COMMANDS: [&str; 8] =
    ["a", "stokes", "singularities", "separatrix", "l3", "manifolds", "distance", "verify"];

// Global flags that take a value.
const VALUE_FLAGS: [&str; 3] = ["--config", "--format", "--out"];

/// Parses a configuration file body. Blank lines and lines starting with
/// `#` are ignored.
pub fn parse(body: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (n, raw) in body.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key = value", n + 1))?;
        let k = k.trim();
        if k.is_empty() || k == "config" {
            return Err(format!("line {}: invalid key '{k}'", n + 1));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Finds the value of `--config` in raw arguments.
pub fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

/// Rewrites `args` as `prog command <file flags> <remaining user args>`.
/// Arguments without a recognised command are returned unchanged.
pub fn merge(args: &[String], entries: &[(String, String)]) -> Vec<String> {
    let mut pos = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].as_str();
        if VALUE_FLAGS.contains(&a) {
            i += 2;
            continue;
        }
        if COMMANDS.contains(&a) {
            pos = Some(i);
            break;
        }
        i += 1;
    }
    let Some(pos) = pos else {
        return args.to_vec();
    };
    let mut out = vec![args[0].clone(), args[pos].clone()];
    out.extend(entries.iter().map(|(k, v)| format!("--{k}={v}")));
    out.extend(args[1..pos].iter().cloned());
    out.extend(args[pos + 1..].iter().cloned());
    out
}

pub fn load(path: &Path) -> Result<Vec<(String, String)>, String> {
    let body = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse(&body)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &[&str]) -> Vec<String> {
        s.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn parses_flat_files() {
        let e = parse("# comment\n tol = 1e-6\n\nformat=json\n").unwrap();
        assert_eq!(e, vec![("tol".into(), "1e-6".into()), ("format".into(), "json".into())]);
        assert!(parse("novalue\n").is_err());
    }

    #[test]
    fn file_values_precede_flags() {
        let args = v(&["l3lab", "--format", "csv", "a", "--tol", "1e-8"]);
        let merged = merge(&args, &[("tol".into(), "1e-6".into())]);
        assert_eq!(merged, v(&["l3lab", "a", "--tol=1e-6", "--format", "csv", "--tol", "1e-8"]));
        assert_eq!(config_path(&v(&["l3lab", "--config=x.cfg", "a"])), Some("x.cfg".into()));
    }
}
