//! `--config FILE` support: a `key = value` file whose entries become flags
//! placed before the user's own, so anything on the command line wins.

use std::ffi::OsString;
use std::fs;

use anyhow::{bail, Context, Result};
use clap::{ArgAction, Command, CommandFactory};

use crate::Cli;

/// Pulls `--config` out of `raw` and splices the file's flags in right after
/// the subcommand name. Keys that no subcommand knows are rejected; keys that
/// belong only to other subcommands are skipped, so one file can serve several.
pub fn expand(raw: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut args = Vec::with_capacity(raw.len());
    let mut path = None;
    let mut it = raw.into_iter();
    while let Some(a) = it.next() {
        match a.to_str() {
            Some("--config") => path = Some(it.next().context("--config needs a file path")?),
            Some(s) if s.starts_with("--config=") => {
                path = Some(OsString::from(&s["--config=".len()..]))
            }
            _ => args.push(a),
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path)
        .with_context(|| format!("reading config {}", path.to_string_lossy()))?;
    let entries = parse(&text)?;

    let mut cmd = Cli::command();
    cmd.build();
    let Some(pos) = args
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|p| p + 1)
    else {
        return Ok(args);
    };
    let name = args[pos].to_string_lossy().into_owned();
    let Some(sub) = cmd.find_subcommand(&name) else {
        return Ok(args);
    };

    let mut injected = Vec::new();
    for (key, value) in entries {
        if !knows(sub, &key) {
            if cmd.get_subcommands().any(|s| knows(s, &key)) {
                continue;
            }
            bail!("config key `{key}` is not a known flag");
        }
        let flag = OsString::from(format!("--{key}"));
        match value.as_str() {
            "true" if is_switch(sub, &key) => injected.push(flag),
            "false" if is_switch(sub, &key) => {}
            _ => {
                injected.push(flag);
                injected.push(OsString::from(value));
            }
        }
    }
    args.splice(pos + 1..pos + 1, injected);
    Ok(args)
}

fn knows(cmd: &Command, key: &str) -> bool {
    cmd.get_arguments().any(|a| a.get_long() == Some(key))
}

fn is_switch(cmd: &Command, key: &str) -> bool {
    cmd.get_arguments()
        .find(|a| a.get_long() == Some(key))
        .is_some_and(|a| matches!(a.get_action(), ArgAction::SetTrue | ArgAction::SetFalse))
}

fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected `key = value`", n + 1);
        };
        let key = k.trim().trim_start_matches("--").to_string();
        if key.is_empty() || key == "config" {
            bail!("config line {}: bad key `{}`", n + 1, k.trim());
        }
        let v = v.trim();
        let v = v
            .strip_prefix('"')
            .and_then(|s| s.strip_suffix('"'))
            .unwrap_or(v);
        out.push((key, v.to_string()));
    }
    Ok(out)
}
