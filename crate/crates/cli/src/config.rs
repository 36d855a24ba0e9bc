//! Experiment files: sections of `key = value` lines whose keys are the long
//! flag names.
//!
//! ```text
//! # shared by every subcommand
//! [common]
//! out-dir = results
//!
//! [weyl-planar]
//! q = sin(t)
//! lambda = 0.37,5.0
//!
//! [element.1]
//! radius = 8
//! eta = sin(t)
//! ```
//!
//! `[common]` and the section named after the subcommand become flags placed
//! before the command-line ones, so flags given on the command line win.
//! `[element.N]` sections become `--element` values for the Weyl commands.
//! Keys set to `true` become bare switches and `false` drops them.

use std::fs;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
struct Section {
    name: String,
    entries: Vec<(String, String)>,
}

fn parse(text: &str, origin: &str) -> Result<Vec<Section>, CliError> {
    let mut sections = vec![Section { name: "common".into(), entries: Vec::new() }];
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        let bad = |msg: &str| CliError::config("config", format!("{origin}:{}: {msg}", i + 1));
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| bad("unterminated section header"))?.trim();
            if name.is_empty() {
                return Err(bad("empty section name"));
            }
            sections.push(Section { name: name.into(), entries: Vec::new() });
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| bad("expected `key = value`"))?;
        let k = k.trim();
        if k.is_empty() || k.starts_with('-') || k.contains(char::is_whitespace) {
            return Err(bad("malformed key"));
        }
        sections.last_mut().expect("starts with the common section").entries.push((k.into(), v.trim().into()));
    }
    Ok(sections)
}

fn element_index(name: &str) -> Option<&str> {
    name.strip_prefix("element.").filter(|n| !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()))
}

/// Flags contributed by the file for `subcommand`.
fn tokens(sections: &[Section], subcommand: &str, known: &[&str]) -> Result<Vec<String>, CliError> {
    let mut out = Vec::new();
    let weyl = subcommand.starts_with("weyl-");
    for s in sections {
        if let Some(n) = element_index(&s.name) {
            if weyl {
                let mut value = format!("n={n}");
                for (k, v) in &s.entries {
                    value += &format!(";{k}={v}");
                }
                out.push("--element".into());
                out.push(value);
            }
            continue;
        }
        if s.name != "common" && !known.contains(&s.name.as_str()) {
            return Err(CliError::config("config", format!("unknown section [{}]", s.name)));
        }
        if s.name != "common" && s.name != subcommand {
            continue;
        }
        for (k, v) in &s.entries {
            match v.as_str() {
                "true" => out.push(format!("--{k}")),
                "false" => {}
                _ => {
                    out.push(format!("--{k}"));
                    out.push(v.clone());
                }
            }
        }
    }
    Ok(out)
}

/// Splices the flags of a `--config FILE` into `argv` right after the
/// subcommand. The `--config` flag itself is left in place.
pub fn expand(argv: Vec<String>, known: &[&str]) -> Result<Vec<String>, CliError> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate().skip(1) {
        if a == "--config" {
            path = Some(argv.get(i + 1).cloned().ok_or_else(|| CliError::config("config", "missing file name"))?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let Some(sub) = argv.iter().skip(1).position(|a| known.contains(&a.as_str())).map(|p| p + 1) else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).map_err(|e| CliError::config("config", format!("cannot read {path}: {e}")))?;
    let extra = tokens(&parse(&text, &path)?, &argv[sub], known)?;
    let mut out = argv[..=sub].to_vec();
    out.extend(extra);
    out.extend_from_slice(&argv[sub + 1..]);
    Ok(out)
}
