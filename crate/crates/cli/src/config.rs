//! Plain-text `key = value` run manifests.
//!
//! A manifest is expanded into ordinary long flags placed directly after the
//! subcommand, ahead of the flags typed on the command line. Because every
//! command accepts repeated flags with the last occurrence winning, explicit
//! flags override the manifest.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use crate::CliError;

pub const SUBCOMMANDS: [&str; 8] = [
    "solve",
    "phasespace",
    "marginals",
    "entropy",
    "crj",
    "critical",
    "qes-exact",
    "reproduce",
];

/// Parses manifest text into `(flag, value)` pairs. Keys may use `_` or `-`;
/// `true`/`false` values toggle switches; `#` starts a comment.
pub fn parse_manifest(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut entries = Vec::new();
    for (number, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Invalid(format!("config line {}: expected key = value, got {raw:?}", number + 1))
        })?;
        let key = key.trim().to_ascii_lowercase().replace('_', "-");
        if key.is_empty() {
            return Err(CliError::Invalid(format!("config line {}: empty key", number + 1)));
        }
        entries.push((key, value.trim().to_string()));
    }
    Ok(entries)
}

fn manifest_tokens(entries: &[(String, String)]) -> (Option<String>, Vec<OsString>) {
    let mut command = None;
    let mut tokens = Vec::new();
    for (key, value) in entries {
        match (key.as_str(), value.as_str()) {
            ("command", v) => command = Some(v.to_string()),
            (_, "false") => {}
            (k, "true") => tokens.push(format!("--{k}").into()),
            (k, v) => {
                tokens.push(format!("--{k}").into());
                tokens.push(v.into());
            }
        }
    }
    (command, tokens)
}

/// Removes `--config PATH` from `args` and splices the manifest's flags in
/// after the subcommand.
pub fn expand_args(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut out = Vec::with_capacity(args.len());
    let mut manifest = None;
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            let path = iter
                .next()
                .ok_or_else(|| CliError::Invalid("--config needs a file path".into()))?;
            manifest = Some(path);
        } else if let Some(path) = s.strip_prefix("--config=") {
            manifest = Some(path.into());
        } else {
            out.push(arg);
        }
    }
    let Some(path) = manifest else {
        return Ok(out);
    };
    let text = read_manifest(Path::new(&path))?;
    let (command, tokens) = manifest_tokens(&parse_manifest(&text)?);
    let position = out
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()));
    let insert_at = match (position, command) {
        (Some(i), _) => i + 1,
        (None, Some(cmd)) => {
            let at = out.len().min(1);
            out.insert(at, cmd.into());
            at + 1
        }
        (None, None) => {
            return Err(CliError::Invalid(
                "no subcommand given on the command line or in the config file".into(),
            ))
        }
    };
    out.splice(insert_at..insert_at, tokens);
    Ok(out)
}

fn read_manifest(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("cannot read config file {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn manifest_lines() {
        let e = parse_manifest("# sweep\nlambda = 4\nx_max=6 # wide\n\nstrict = true\n").unwrap();
        assert_eq!(
            e,
            vec![
                ("lambda".to_string(), "4".to_string()),
                ("x-max".to_string(), "6".to_string()),
                ("strict".to_string(), "true".to_string()),
            ]
        );
        assert!(parse_manifest("lambda 4").is_err());
        assert!(parse_manifest("= 4").is_err());
    }

    #[test]
    fn flags_follow_the_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(&path, "lambda = 1\ndegree = 10\nstrict = false\n").unwrap();
        let args = os(&["qes", "solve", "--config", path.to_str().unwrap(), "--degree", "12"]);
        let got = expand_args(args).unwrap();
        assert_eq!(got, os(&["qes", "solve", "--lambda", "1", "--degree", "10", "--degree", "12"]));
    }

    #[test]
    fn command_from_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(&path, "command = critical\nn = 1\n").unwrap();
        let arg = format!("--config={}", path.display());
        let got = expand_args(os(&["qes", &arg])).unwrap();
        assert_eq!(got, os(&["qes", "critical", "--n", "1"]));
    }

    #[test]
    fn missing_manifest_is_invalid() {
        let err = expand_args(os(&["qes", "solve", "--config", "/nonexistent/x.conf"])).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
