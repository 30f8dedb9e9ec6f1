//! `key = value` run manifests.
//!
//! Keys are long flag names without the leading dashes, plus `command` for
//! the subcommand. Blank lines and `#` comments are ignored. A manifest is
//! merged into the argument list before parsing, and only for flags the
//! command line does not already set.

use std::collections::BTreeMap;
use std::ffi::OsString;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Option<String>,
    pub entries: BTreeMap<String, String>,
}

fn valid_key(k: &str) -> bool {
    !k.is_empty() && k.chars().all(|c| c.is_ascii_alphanumeric() || c == '-')
}

fn valid_value(v: &str) -> bool {
    !v.is_empty() && v.trim() == v && !v.contains(['\n', '\r', '#'])
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        Self {
            command: Some(command.to_string()),
            entries: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        let value = value.to_string();
        assert!(
            valid_key(key) && valid_value(&value),
            "unrepresentable entry {key}={value}"
        );
        self.entries.insert(key.to_string(), value);
        self
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", lineno + 1))?;
            let (key, value) = (key.trim(), value.trim());
            if !valid_key(key) || !valid_value(value) {
                return Err(format!("line {}: malformed entry '{line}'", lineno + 1));
            }
            if key == "command" {
                cfg.command = Some(value.to_string());
            } else if cfg.entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(format!("line {}: duplicate key '{key}'", lineno + 1));
            }
        }
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(c) = &self.command {
            out.push_str(&format!("command = {c}\n"));
        }
        for (k, v) in &self.entries {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }
}

fn flag_present(args: &[OsString], key: &str) -> bool {
    let long = format!("--{key}");
    let prefix = format!("--{key}=");
    args.iter()
        .any(|a| a.to_str().is_some_and(|s| s == long || s.starts_with(&prefix)))
}

/// Index of the subcommand in `args`. Every `--flag` without `=` is taken to
/// consume the next token, apart from help and version.
fn subcommand_index(args: &[OsString]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let s = args[i].to_str().unwrap_or("");
        if matches!(s, "--help" | "--version" | "-h" | "-V") || s.contains('=') && s.starts_with('-') {
            i += 1;
        } else if s.starts_with('-') {
            i += 2;
        } else {
            return Some(i);
        }
    }
    None
}

/// Splices manifest entries into `args` wherever the flag is absent.
pub fn merge_args(args: Vec<OsString>, cfg: &RunConfig) -> Result<Vec<OsString>, String> {
    let mut args = args;
    let sub = match (subcommand_index(&args), &cfg.command) {
        (Some(i), Some(c)) if args[i].to_str() != Some(c.as_str()) => {
            return Err(format!(
                "config is for '{c}' but the command line runs '{}'",
                args[i].to_string_lossy()
            ));
        }
        (Some(i), _) => i,
        (None, Some(c)) => {
            // flags given without a subcommand belong to it
            args.insert(1, OsString::from(c));
            1
        }
        (None, None) => return Ok(args),
    };
    let mut extra = Vec::new();
    for (k, v) in &cfg.entries {
        if !flag_present(&args, k) {
            extra.push(OsString::from(format!("--{k}")));
            extra.push(OsString::from(v));
        }
    }
    args.splice(sub + 1..sub + 1, extra);
    Ok(args)
}

/// The `--config PATH` value, if any.
pub fn config_path(args: &[OsString]) -> Option<String> {
    args.iter().enumerate().find_map(|(i, a)| {
        let s = a.to_str()?;
        if s == "--config" {
            args.get(i + 1).and_then(|v| v.to_str()).map(str::to_string)
        } else {
            s.strip_prefix("--config=").map(str::to_string)
        }
    })
}
