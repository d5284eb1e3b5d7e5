//! `key = value` config files whose keys mirror the long flags.

use std::ffi::OsString;

use anyhow::{bail, Context, Result};

/// Parses config text into `(flag, value)` pairs. `#` starts a comment,
/// `[section]` headers are ignored, values may be quoted, and underscores in
/// keys stand for dashes.
pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() || (line.starts_with('[') && line.ends_with(']')) {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else { bail!("config line {}: expected key = value", i + 1) };
        let key = key.trim().replace('_', "-");
        if key.is_empty() || key == "config" {
            bail!("config line {}: bad key", i + 1);
        }
        let value = value.trim();
        let value = value.strip_prefix('"').and_then(|v| v.strip_suffix('"')).unwrap_or(value);
        out.push((key, value.to_string()));
    }
    Ok(out)
}

fn flag_given(args: &[OsString], key: &str) -> bool {
    let long = format!("--{key}");
    args.iter().filter_map(|a| a.to_str()).take_while(|&a| a != "--").any(|a| a == long || a.starts_with(&format!("{long}=")))
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let Some(s) = a.to_str() else { continue };
        if s == "--" {
            break;
        }
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

/// Appends flags from `--config FILE` that are not already on the command
/// line, so flags win on conflict. `true`/`false` values toggle switches.
pub fn merge(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else { return Ok(args) };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading config {}", path.to_string_lossy()))?;
    let mut out = args.clone();
    for (key, value) in parse(&text)? {
        if flag_given(&args, &key) {
            continue;
        }
        match value.as_str() {
            "true" => out.push(format!("--{key}").into()),
            "false" => {}
            _ => out.push(format!("--{key}={value}").into()),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(Into::into).collect()
    }

    #[test]
    fn parses_comments_sections_and_quotes() {
        let kv = parse("# run\n[decode]\nshots = 100\nwindow=3 # rounds\nout_file = \"a b.csv\"\n").unwrap();
        assert_eq!(kv, vec![("shots".into(), "100".into()), ("window".into(), "3".into()), ("out-file".into(), "a b.csv".into())]);
        assert!(parse("novalue").is_err());
    }

    #[test]
    fn flags_win_over_config() {
        let dir = std::env::temp_dir().join(format!("amc-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.conf");
        std::fs::write(&path, "seed = 5\nshots = 10\nall_h = true\nverbose_dump = false\n").unwrap();
        let args = os(&["amc", "sample", "--config", path.to_str().unwrap(), "--seed=7"]);
        let merged = merge(args).unwrap();
        let tail: Vec<_> = merged[5..].iter().map(|s| s.to_str().unwrap().to_string()).collect();
        assert_eq!(tail, vec!["--shots=10", "--all-h"]);
        std::fs::remove_dir_all(dir).unwrap();
    }
}
