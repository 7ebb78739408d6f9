//! Flat `key = value` config files, merged into argv before parsing.
//!
//! Keys are long flag names (`x`, `D`, `f-model`; `_` reads as `-`). A key
//! already given on the command line is dropped, so flags override the file.
//! Keys that the chosen subcommand does not take are skipped; keys that no
//! subcommand takes are an error. Boolean flags take `true` or `false`.

use std::collections::HashSet;
use std::ffi::OsString;

use clap::{Arg, ArgAction, Command, CommandFactory};

use crate::args::Cli;

pub fn parse_file(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key = value", i + 1))?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        let value = v.trim().trim_matches('"').to_string();
        if key.is_empty() {
            return Err(format!("config line {}: empty key", i + 1));
        }
        out.push((key, value));
    }
    Ok(out)
}

/// The `--config` path in argv, if any.
pub fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
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

fn takes_value(cmd: &Command, long: &str) -> bool {
    cmd.get_arguments()
        .find(|a| a.get_long() == Some(long))
        .is_some_and(|a| matches!(a.get_action(), ArgAction::Set | ArgAction::Append))
}

/// The chain of subcommands named in argv, outermost first.
fn subcommand_path(root: &Command, argv: &[OsString]) -> Vec<Command> {
    let mut path = vec![root.clone()];
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        let cur = path.last().unwrap().clone();
        if let Some(long) = s.strip_prefix("--") {
            if !long.contains('=') && takes_value(&cur, long) {
                it.next();
            }
            continue;
        }
        if s.starts_with('-') {
            continue;
        }
        match cur.find_subcommand(s.as_ref()) {
            Some(sub) => path.push(sub.clone()),
            None => break,
        }
    }
    path
}

fn arg_names(a: &Arg) -> impl Iterator<Item = String> {
    a.get_long().map(str::to_string).into_iter().chain(a.get_short().map(String::from))
}

fn flag_names(cmd: &Command) -> HashSet<String> {
    cmd.get_arguments().flat_map(arg_names).collect()
}

fn all_flag_names(cmd: &Command, out: &mut HashSet<String>) {
    out.extend(flag_names(cmd));
    for sub in cmd.get_subcommands() {
        all_flag_names(sub, out);
    }
}

fn given_on_command_line(argv: &[OsString], arg: &Arg) -> bool {
    argv.iter().any(|a| {
        let s = a.to_string_lossy();
        if let Some(rest) = s.strip_prefix("--") {
            arg.get_long().is_some_and(|l| rest == l || rest.starts_with(&format!("{l}=")))
        } else if let Some(rest) = s.strip_prefix('-') {
            arg.get_short().is_some_and(|c| rest.starts_with(c))
        } else {
            false
        }
    })
}

/// argv with the config entries appended.
pub fn merge(argv: Vec<OsString>, entries: &[(String, String)]) -> Result<Vec<OsString>, String> {
    let mut root = Cli::command();
    root.build();
    let path = subcommand_path(&root, &argv);
    let leaf = path.last().unwrap();
    let mut applicable = flag_names(leaf);
    for cmd in &path {
        for a in cmd.get_arguments().filter(|a| a.is_global_set()) {
            applicable.extend(arg_names(a));
        }
    }
    let mut known = HashSet::new();
    all_flag_names(&root, &mut known);

    let mut out = argv.clone();
    for (key, value) in entries {
        if key == "config" {
            continue;
        }
        if !known.contains(key) {
            return Err(format!("config: unknown key {key:?}"));
        }
        if !applicable.contains(key) {
            continue;
        }
        let arg = leaf
            .get_arguments()
            .chain(root.get_arguments())
            .find(|a| arg_names(a).any(|n| &n == key))
            .expect("applicable key has an argument");
        if given_on_command_line(&argv, arg) {
            continue;
        }
        let flag = match arg.get_long() {
            Some(l) => format!("--{l}"),
            None => format!("-{}", arg.get_short().expect("flag has a name")),
        };
        match arg.get_action() {
            ArgAction::SetTrue => match value.as_str() {
                "true" | "1" | "yes" => out.push(flag.into()),
                "false" | "0" | "no" => {}
                _ => return Err(format!("config: {key} expects true or false, got {value:?}")),
            },
            _ => {
                out.push(flag.into());
                out.push(value.into());
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parses_pairs_and_comments() {
        let e = parse_file("# census\nx = 1e6\nno_timing=true\n\nc = \"7/5\"\n").unwrap();
        assert_eq!(
            e,
            vec![
                ("x".to_string(), "1e6".to_string()),
                ("no-timing".to_string(), "true".to_string()),
                ("c".to_string(), "7/5".to_string())
            ]
        );
        assert!(parse_file("x 10").is_err());
    }

    #[test]
    fn command_line_wins() {
        let argv = args(&["psc-lab", "census", "--x", "100", "-c", "3/2", "-R", "2"]);
        let e = vec![
            ("x".to_string(), "5000".to_string()),
            ("R".to_string(), "9".to_string()),
            ("seed".to_string(), "7".to_string()),
        ];
        let merged = merge(argv, &e).unwrap();
        let tail: Vec<_> = merged.iter().skip(8).map(|s| s.to_string_lossy().to_string()).collect();
        assert_eq!(tail, vec!["--seed", "7"]);
        let merged = merge(args(&["psc-lab", "census", "--x", "100"]), &[("c".into(), "3/2".into())]).unwrap();
        assert_eq!(merged.last().unwrap(), "3/2");
    }

    #[test]
    fn foreign_keys_skipped_unknown_rejected() {
        let argv = args(&["psc-lab", "--jobs", "2", "expsum", "prime", "--x", "10", "-c", "3/2", "--h", "1", "-d", "1"]);
        let merged = merge(argv.clone(), &[("D".into(), "5".into())]).unwrap();
        assert_eq!(merged, argv);
        assert!(merge(argv, &[("bogus".into(), "1".into())]).is_err());
    }

    #[test]
    fn finds_config_path() {
        assert_eq!(config_path(&args(&["p", "--config", "a.cfg", "floor"])), Some("a.cfg".into()));
        assert_eq!(config_path(&args(&["p", "floor", "--config=b"])), Some("b".into()));
        assert_eq!(config_path(&args(&["p", "floor"])), None);
    }
}
