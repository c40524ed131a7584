//! Parsing of `--code` and `--graph` specifications.

use std::fs;
use std::path::{Path, PathBuf};

use codesw::code::{self, Graph, ParityCheckCode};
use codesw::gf2::BitMatrix;
use codesw::stabilizer::{self, StabilizerModel};

use crate::CliError;

/// Which half of a CSS code a classical spec refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sector {
    X,
    Z,
}

/// A parsed `--code` value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CodeSpec {
    /// `ising-graph:<graph>`
    IsingGraph(GraphSpec),
    /// `toric2d:<L>[:x|z]`
    Toric2d(usize, Sector),
    /// `toric4d:<L>[:x|z]`
    Toric4d(usize, Sector),
    /// `bell` — the two-qubit `{XX, ZZ}` model (quantum only).
    Bell,
    /// `from-file:<path>`
    File(PathBuf),
}

/// A parsed `--graph` value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphSpec {
    Cycle(usize),
    Path(usize),
    Complete(usize),
    Theta(usize),
    Torus(usize, usize),
    /// Dual 4D lattice indexed like the 4D toric Z checks.
    DualTorus4(usize),
    File(PathBuf),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn number(tok: Option<&str>, what: &str) -> Result<usize, CliError> {
    let tok = tok.ok_or_else(|| usage(format!("missing {what}")))?;
    tok.parse().map_err(|_| usage(format!("{what} must be a non-negative integer, got {tok:?}")))
}

impl std::str::FromStr for GraphSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let mut parts = s.split(':');
        let family = parts.next().unwrap_or_default();
        let spec = match family {
            "cycle" => GraphSpec::Cycle(number(parts.next(), "cycle length")?),
            "path" => GraphSpec::Path(number(parts.next(), "path length")?),
            "complete" => GraphSpec::Complete(number(parts.next(), "vertex count")?),
            "theta" => GraphSpec::Theta(number(parts.next(), "edge multiplicity")?),
            "torus" => {
                let dim = number(parts.next(), "torus dimension")?;
                GraphSpec::Torus(dim, number(parts.next(), "torus side")?)
            }
            "dual-torus4" => GraphSpec::DualTorus4(number(parts.next(), "torus side")?),
            "file" => return Ok(GraphSpec::File(PathBuf::from(&s["file:".len()..]))),
            _ if Path::new(s).is_file() => return Ok(GraphSpec::File(PathBuf::from(s))),
            other => {
                return Err(usage(format!(
                    "unknown graph family {other:?} (cycle:m, path:m, complete:m, theta:k, torus:d:L, dual-torus4:L, file:<path>)"
                )))
            }
        };
        if parts.next().is_some() {
            return Err(usage(format!("trailing fields in graph spec {s:?}")));
        }
        Ok(spec)
    }
}

impl GraphSpec {
    pub fn build(&self) -> Result<Graph, CliError> {
        Ok(match self {
            GraphSpec::Cycle(m) => Graph::cycle(*m)?,
            GraphSpec::Path(m) => Graph::path(*m)?,
            GraphSpec::Complete(m) => Graph::complete(*m)?,
            GraphSpec::Theta(k) => Graph::theta(*k)?,
            GraphSpec::Torus(d, l) => Graph::torus(*d, *l)?,
            GraphSpec::DualTorus4(l) => Graph::dual_torus4(*l)?,
            GraphSpec::File(path) => read(path)?.parse()?,
        })
    }

    /// Short name used in output file names.
    pub fn slug(&self) -> String {
        match self {
            GraphSpec::Cycle(m) => format!("cycle{m}"),
            GraphSpec::Path(m) => format!("path{m}"),
            GraphSpec::Complete(m) => format!("complete{m}"),
            GraphSpec::Theta(k) => format!("theta{k}"),
            GraphSpec::Torus(d, l) => format!("torus{d}d-L{l}"),
            GraphSpec::DualTorus4(l) => format!("dual-torus4d-L{l}"),
            GraphSpec::File(p) => p.file_stem().map_or("graph".into(), |s| s.to_string_lossy().into_owned()),
        }
    }
}

fn sector(tok: Option<&str>) -> Result<Sector, CliError> {
    match tok {
        None | Some("x") | Some("X") => Ok(Sector::X),
        Some("z") | Some("Z") => Ok(Sector::Z),
        Some(other) => Err(usage(format!("sector must be x or z, got {other:?}"))),
    }
}

impl std::str::FromStr for CodeSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let (family, rest) = s.split_once(':').unwrap_or((s, ""));
        match family {
            "ising-graph" | "ising" => Ok(CodeSpec::IsingGraph(rest.parse()?)),
            "toric2d" | "toric4d" => {
                let mut parts = rest.split(':');
                let l = number(parts.next().filter(|t| !t.is_empty()), "lattice size L")?;
                let sec = sector(parts.next())?;
                if parts.next().is_some() {
                    return Err(usage(format!("trailing fields in code spec {s:?}")));
                }
                Ok(if family == "toric2d" {
                    CodeSpec::Toric2d(l, sec)
                } else {
                    CodeSpec::Toric4d(l, sec)
                })
            }
            "bell" if rest.is_empty() => Ok(CodeSpec::Bell),
            "from-file" | "file" if !rest.is_empty() => Ok(CodeSpec::File(PathBuf::from(rest))),
            _ => Err(usage(format!(
                "unknown code family {family:?} (ising-graph:<graph>, toric2d:L[:x|z], toric4d:L[:x|z], bell, from-file:<path>)"
            ))),
        }
    }
}

pub(crate) fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

/// Matrix text (`rows cols` + 0/1 strings) or check list (`c n` + index lists).
pub fn parse_classical(text: &str, path: &Path) -> Result<ParityCheckCode, CliError> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or_default();
    let as_matrix = match ext {
        "checks" => false,
        "mat" => true,
        _ => looks_like_matrix(text),
    };
    Ok(if as_matrix {
        ParityCheckCode::new(text.parse::<BitMatrix>()?)?
    } else {
        ParityCheckCode::from_check_list(text)?
    })
}

fn looks_like_matrix(text: &str) -> bool {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let cols = lines
        .next()
        .and_then(|h| h.split_whitespace().nth(1))
        .and_then(|t| t.parse::<usize>().ok());
    let Some(cols) = cols else { return false };
    let mut rows = lines.peekable();
    rows.peek().is_some()
        && rows.all(|l| l.len() == cols && !l.contains(char::is_whitespace) && l.chars().all(|c| c == '0' || c == '1'))
}

impl CodeSpec {
    /// The classical parity-check code (a CSS sector for toric codes).
    pub fn classical(&self) -> Result<ParityCheckCode, CliError> {
        let pick = |pair: code::CssPair, sec: Sector| match sec {
            Sector::X => pair.hx,
            Sector::Z => pair.hz,
        };
        match self {
            CodeSpec::IsingGraph(g) => Ok(ParityCheckCode::ising(&g.build()?)?),
            CodeSpec::Toric2d(l, s) => Ok(pick(code::toric2d(*l)?, *s)),
            CodeSpec::Toric4d(l, s) => Ok(pick(code::toric4d(*l)?, *s)),
            CodeSpec::Bell => Ok(stabilizer::bell_pair().classical_code().clone()),
            CodeSpec::File(path) => parse_classical(&read(path)?, path),
        }
    }

    /// The stabilizer model (full CSS code for toric families).
    pub fn quantum(&self) -> Result<StabilizerModel, CliError> {
        match self {
            CodeSpec::Bell => Ok(stabilizer::bell_pair()),
            CodeSpec::Toric2d(l, _) => {
                let p = code::toric2d(*l)?;
                Ok(StabilizerModel::css(p.hx.h(), p.hz.h())?)
            }
            CodeSpec::Toric4d(l, _) => {
                let p = code::toric4d(*l)?;
                Ok(StabilizerModel::css(p.hx.h(), p.hz.h())?)
            }
            CodeSpec::File(path) => Ok(read(path)?.parse()?),
            CodeSpec::IsingGraph(_) => Err(usage("ising-graph codes have no stabilizer model; use a stabilizer file")),
        }
    }

    /// Short name used in output file names.
    pub fn slug(&self) -> String {
        let sec = |s: &Sector| if *s == Sector::X { "x" } else { "z" };
        match self {
            CodeSpec::IsingGraph(g) => format!("ising-{}", g.slug()),
            CodeSpec::Toric2d(l, s) => format!("toric2d-L{l}-{}", sec(s)),
            CodeSpec::Toric4d(l, s) => format!("toric4d-L{l}-{}", sec(s)),
            CodeSpec::Bell => "bell".into(),
            CodeSpec::File(p) => p.file_stem().map_or("code".into(), |s| s.to_string_lossy().into_owned()),
        }
    }
}
