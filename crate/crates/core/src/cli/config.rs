//! `key=value` configuration files.
//!
//! Keys are long flag names without the leading dashes (`alpha=100`,
//! `user-eps=0.6`). Blank lines and `#` comments are ignored. Values from the
//! file are spliced into the argument list ahead of the user's own flags, so
//! flags given on the command line win.

use std::ffi::OsString;
use std::path::Path;

use anyhow::{bail, Context};
use clap::CommandFactory;

use super::Cli;

pub fn parse(text: &str, origin: &Path) -> anyhow::Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("{}:{}: expected key=value", origin.display(), n + 1);
        };
        pairs.push((key.trim().to_owned(), value.trim().to_owned()));
    }
    Ok(pairs)
}

/// Finds `--config FILE` in `args` and splices the file's settings in right
/// after the subcommand name. Keys the subcommand does not accept are
/// rejected.
pub fn expand(args: Vec<OsString>) -> anyhow::Result<Vec<OsString>> {
    let strings: Vec<String> = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let config_path = strings.iter().enumerate().find_map(|(i, a)| {
        if a == "--config" {
            strings.get(i + 1).cloned()
        } else {
            a.strip_prefix("--config=").map(str::to_owned)
        }
    });
    let Some(config_path) = config_path else {
        return Ok(args);
    };
    let path = Path::new(&config_path);
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let pairs = parse(&text, path)?;

    let cli = Cli::command();
    let Some((sub_pos, sub)) = strings
        .iter()
        .enumerate()
        .skip(1)
        .find_map(|(i, a)| cli.find_subcommand(a).map(|s| (i, s)))
    else {
        return Ok(args);
    };

    let mut injected = Vec::new();
    for (key, value) in pairs {
        let Some(arg) = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()))
        else {
            bail!("config key `{key}` is not an option of `{}`", sub.get_name());
        };
        if arg.get_action().takes_values() {
            injected.push(OsString::from(format!("--{key}={value}")));
        } else {
            match value.as_str() {
                "true" => injected.push(OsString::from(format!("--{key}"))),
                "false" => {}
                other => bail!("config key `{key}` expects true or false, got `{other}`"),
            }
        }
    }

    let mut out = args;
    let tail = out.split_off(sub_pos + 1);
    out.extend(injected);
    out.extend(tail);
    Ok(out)
}
