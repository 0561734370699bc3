//! `--config` files.
//!
//! Top-level keys set global flags; a table named after a subcommand sets
//! that subcommand's flags:
//!
//! ```toml
//! seed = 7
//! [solve]
//! sweeps = 5000
//! no_postprocess = true
//! ```
//!
//! The file's flags are spliced in front of the command-line ones, so the
//! command line wins.

use std::ffi::OsString;

use anyhow::{bail, Context, Result};

const SUBCOMMANDS: [&str; 8] = ["generate", "check", "translate", "solve", "tune", "adjust", "oracle", "bench"];
const GLOBAL_VALUE_FLAGS: [&str; 4] = ["--seed", "--threads", "--output", "--config"];

fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter();
    let mut found = None;
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            found = it.next().cloned();
        } else if let Some(v) = s.strip_prefix("--config=") {
            found = Some(v.into());
        }
    }
    found
}

fn subcommand_position(argv: &[OsString]) -> Option<usize> {
    let mut k = 1;
    while k < argv.len() {
        let s = argv[k].to_string_lossy();
        if SUBCOMMANDS.contains(&s.as_ref()) {
            return Some(k);
        }
        k += if GLOBAL_VALUE_FLAGS.contains(&s.as_ref()) { 2 } else { 1 };
    }
    None
}

fn flags(table: &toml::Table, skip_tables: bool) -> Result<Vec<OsString>> {
    let mut out = Vec::new();
    for (key, value) in table {
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            toml::Value::Table(_) if skip_tables => continue,
            toml::Value::Table(_) => bail!("nested table {key:?} in config"),
            toml::Value::Boolean(true) => out.push(flag.into()),
            toml::Value::Boolean(false) => {}
            toml::Value::String(s) => out.extend([flag.into(), s.into()]),
            toml::Value::Array(items) => {
                let joined: Vec<String> = items.iter().map(scalar).collect::<Result<_>>()?;
                out.extend([flag.into(), joined.join(",").into()]);
            }
            other => out.extend([flag.into(), scalar(other)?.into()]),
        }
    }
    Ok(out)
}

fn scalar(v: &toml::Value) -> Result<String> {
    Ok(match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        toml::Value::Boolean(b) => b.to_string(),
        other => bail!("unsupported config value {other}"),
    })
}

/// `argv` with the config file's flags spliced in.
pub fn merge(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&argv) else { return Ok(argv) };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.to_string_lossy()))?;
    let table: toml::Table = text.parse().with_context(|| format!("parsing {}", path.to_string_lossy()))?;
    for key in table.keys() {
        if table[key].is_table() && !SUBCOMMANDS.contains(&key.as_str()) {
            bail!("unknown config section [{key}]");
        }
    }
    let mut out = vec![argv[0].clone()];
    out.extend(flags(&table, true)?);
    match subcommand_position(&argv) {
        Some(k) => {
            out.extend(argv[1..=k].iter().cloned());
            let name = argv[k].to_string_lossy().into_owned();
            if let Some(toml::Value::Table(sub)) = table.get(&name) {
                out.extend(flags(sub, false)?);
            }
            out.extend(argv[k + 1..].iter().cloned());
        }
        None => out.extend(argv[1..].iter().cloned()),
    }
    Ok(out)
}
