//! `key = value` config files, expanded into flags.
//!
//! Blank lines and lines starting with `#` are ignored. Keys are flag names
//! without the dashes (`lambda = 0.6`, `q-max = 80`); `true` and `false`
//! switch boolean flags. The optional `command` key names the subcommand
//! when the command line does not.

use std::path::Path;

use crate::CliError;

const COMMANDS: [&str; 4] = ["spectrum", "wavefunction", "verify", "transform-demo"];

/// Parses the file into `(key, value)` pairs in file order.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("config line {}: expected key = value", i + 1)))?;
        let k = k.trim().trim_start_matches('-').replace('_', "-");
        if k.is_empty() {
            return Err(CliError::usage(format!("config line {}: empty key", i + 1)));
        }
        out.push((k, v.trim().to_string()));
    }
    Ok(out)
}

fn config_path(args: &[String]) -> Option<&str> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().map(String::as_str);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p);
        }
    }
    None
}

/// Splices the entries of the `--config` file, if any, into `args` right
/// after the subcommand, so later command-line flags override them.
pub fn expand(args: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(path))
        .map_err(|e| CliError::usage(format!("cannot read config {path}: {e}")))?;
    let entries = parse(&text)?;

    let mut command = None;
    let mut flags = Vec::new();
    for (k, v) in entries {
        match (k.as_str(), v.as_str()) {
            ("command", _) => command = Some(v),
            ("config", _) => return Err(CliError::usage("config files cannot nest")),
            (_, "false") => {}
            (_, "true") => flags.push(format!("--{k}")),
            _ => flags.push(format!("--{k}={v}")),
        }
    }

    let mut out = args;
    let pos = match out.iter().position(|a| COMMANDS.contains(&a.as_str())) {
        Some(p) => p + 1,
        None => {
            let c = command.ok_or_else(|| CliError::usage("no subcommand on the command line or in the config"))?;
            out.insert(1, c);
            2
        }
    };
    out.splice(pos..pos, flags);
    Ok(out)
}
