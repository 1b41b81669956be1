//! Line-oriented text format for derivation scripts.
//!
//! ```text
//! start <presentation-file>
//! expect <presentation-file>
//! subst rel <id> <lhs|rhs> at <pos> use <id> <lr|rl>
//! subst base at <pos> use <id> <lr|rl>
//! addgen <name> = <word>
//! rmgen <name>
//! rename <old>=<new> [...]
//! ```
//!
//! `#` starts a comment; presentation paths are resolved relative to the
//! script file's directory.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::presentation::{Direction, Presentation, PresentationError};

use super::{DerivationScript, Side, Step};

#[derive(Error, Debug)]
pub enum ScriptError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing `{0}` line")]
    MissingSection(&'static str),
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("in {path}: {source}")]
    Presentation { path: PathBuf, source: PresentationError },
}

fn load_presentation(dir: &Path, name: &str) -> Result<Presentation, ScriptError> {
    let path = dir.join(name);
    let text = std::fs::read_to_string(&path)
        .map_err(|source| ScriptError::Io { path: path.clone(), source })?;
    Presentation::parse(&text).map_err(|source| ScriptError::Presentation { path, source })
}

/// Parses a script from text, resolving presentation paths against `dir`.
pub fn parse_script(text: &str, dir: &Path) -> Result<DerivationScript, ScriptError> {
    let mut start = None;
    let mut expect = None;
    let mut steps = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let bad = |msg: &str| ScriptError::Syntax { line: line_no, msg: msg.to_string() };
        let parse_usize = |tok: &str, what: &str| -> Result<usize, ScriptError> {
            tok.parse().map_err(|_| bad(&format!("bad {what} `{tok}`")))
        };
        let parse_dir = |tok: &str| -> Result<Direction, ScriptError> {
            match tok {
                "lr" => Ok(Direction::LhsToRhs),
                "rl" => Ok(Direction::RhsToLhs),
                _ => Err(bad("direction must be `lr` or `rl`")),
            }
        };
        match tokens[0] {
            "start" => {
                let [_, file] = tokens[..] else { return Err(bad("usage: start <file>")) };
                start = Some(load_presentation(dir, file)?);
            }
            "expect" => {
                let [_, file] = tokens[..] else { return Err(bad("usage: expect <file>")) };
                expect = Some(load_presentation(dir, file)?);
            }
            "subst" => match tokens.get(1) {
                Some(&"rel") => {
                    let [_, _, target, side, at, pos, use_kw, using, direction] = tokens[..]
                    else {
                        return Err(bad(
                            "usage: subst rel <id> <lhs|rhs> at <pos> use <id> <lr|rl>",
                        ));
                    };
                    if at != "at" || use_kw != "use" {
                        return Err(bad("expected `at` and `use` keywords"));
                    }
                    let side = match side {
                        "lhs" => Side::Lhs,
                        "rhs" => Side::Rhs,
                        _ => return Err(bad("side must be `lhs` or `rhs`")),
                    };
                    steps.push(Step::SubstInRelation {
                        target: parse_usize(target, "relation id")?,
                        side,
                        position: parse_usize(pos, "position")?,
                        using: parse_usize(using, "relation id")?,
                        direction: parse_dir(direction)?,
                    });
                }
                Some(&"base") => {
                    let [_, _, at, pos, use_kw, using, direction] = tokens[..] else {
                        return Err(bad("usage: subst base at <pos> use <id> <lr|rl>"));
                    };
                    if at != "at" || use_kw != "use" {
                        return Err(bad("expected `at` and `use` keywords"));
                    }
                    steps.push(Step::SubstInBase {
                        position: parse_usize(pos, "position")?,
                        using: parse_usize(using, "relation id")?,
                        direction: parse_dir(direction)?,
                    });
                }
                _ => return Err(bad("expected `subst rel` or `subst base`")),
            },
            "addgen" => {
                if tokens.len() < 4 || tokens[2] != "=" {
                    return Err(bad("usage: addgen <name> = <word>"));
                }
                steps.push(Step::AddGenerator {
                    name: tokens[1].to_string(),
                    definition: tokens[3..].iter().map(|t| t.to_string()).collect(),
                });
            }
            "rmgen" => {
                let [_, name] = tokens[..] else { return Err(bad("usage: rmgen <name>")) };
                steps.push(Step::RemoveGenerator { name: name.to_string() });
            }
            "rename" => {
                if tokens.len() < 2 {
                    return Err(bad("usage: rename <old>=<new> [...]"));
                }
                let mut pairs = Vec::new();
                for tok in &tokens[1..] {
                    let (old, new) =
                        tok.split_once('=').ok_or_else(|| bad("expected <old>=<new>"))?;
                    if old.is_empty() || new.is_empty() {
                        return Err(bad("empty name in rename pair"));
                    }
                    pairs.push((old.to_string(), new.to_string()));
                }
                steps.push(Step::Rename { pairs });
            }
            other => return Err(bad(&format!("unknown directive `{other}`"))),
        }
    }

    Ok(DerivationScript {
        start: start.ok_or(ScriptError::MissingSection("start"))?,
        steps,
        expect: expect.ok_or(ScriptError::MissingSection("expect"))?,
    })
}

/// Reads and parses a script file; referenced presentations are resolved
/// relative to its directory.
pub fn parse_script_file(path: &Path) -> Result<DerivationScript, ScriptError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ScriptError::Io { path: path.to_path_buf(), source })?;
    let dir = path.parent().unwrap_or(Path::new("."));
    parse_script(&text, dir)
}
