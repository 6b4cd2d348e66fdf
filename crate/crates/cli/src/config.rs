//! Config files: one `key = value` per line, `#` starts a comment. Keys are
//! the long flag names of the global options and of the chosen subcommand;
//! `command` names the subcommand when none is given on the command line.
//! Boolean flags take `true` or `false`.

use std::ffi::OsString;
use std::fs;

use clap::{ArgAction, CommandFactory};

use crate::args::Cli;

pub fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

fn given(argv: &[OsString], key: &str) -> bool {
    let flag = format!("--{key}");
    let prefix = format!("--{key}=");
    argv.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.starts_with(&prefix)
    })
}

/// Parses the config text into `(line, key, value)` entries.
pub fn parse(text: &str) -> Result<Vec<(usize, String, String)>, String> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key = value, got {line:?}", idx + 1))?;
        let key = k.trim().trim_start_matches("--").to_string();
        if out.iter().any(|(_, seen, _)| *seen == key) {
            return Err(format!("config line {}: duplicate key `{key}`", idx + 1));
        }
        out.push((idx + 1, key, v.trim().to_string()));
    }
    Ok(out)
}

/// Returns `argv` with every config entry not already given as a flag
/// appended as one.
pub fn merge(argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {}: {e}", path.to_string_lossy()))?;
    let entries = parse(&text)?;

    let root = Cli::command();
    let names: Vec<String> = root.get_subcommands().map(|c| c.get_name().to_string()).collect();
    let mut argv = argv;
    let mut sub = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).find(|a| names.contains(a));
    if sub.is_none() {
        if let Some((line, _, name)) = entries.iter().find(|(_, k, _)| k == "command") {
            if !names.contains(name) {
                return Err(format!("config line {line}: unknown command `{name}`"));
            }
            argv.insert(1.min(argv.len()), name.into());
            sub = Some(name.clone());
        }
    }
    let sub = sub.and_then(|name| root.find_subcommand(&name).cloned());

    let mut extra = Vec::new();
    for (line, key, value) in entries {
        if key == "command" || key == "config" {
            continue;
        }
        let arg = root
            .get_arguments()
            .chain(sub.iter().flat_map(|s| s.get_arguments()))
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| format!("config line {line}: unknown key `{key}`"))?;
        if given(&argv, &key) {
            continue;
        }
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            match value.as_str() {
                "true" => extra.push(format!("--{key}").into()),
                "false" => {}
                _ => return Err(format!("config line {line}: `{key}` takes true or false, got {value:?}")),
            }
        } else {
            extra.push(format!("--{key}={value}").into());
        }
    }
    argv.extend(extra);
    Ok(argv)
}
