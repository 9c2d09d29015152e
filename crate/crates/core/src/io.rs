//! Reading and writing vertex lists.
//!
//! Text form:
//!
//! ```text
//! dim 2
//! vertices 3
//! 0 0
//! 1 0
//! 0 1
//! ```
//!
//! The JSON form is `{"dim": 2, "vertices": [[0,0],[1,0],[0,1]]}`.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::LatticeVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            _ => Err(Error::InvalidArgument(format!("unknown format `{s}`, expected text or json"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonPolytope {
    dim: usize,
    vertices: Vec<Vec<i64>>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn header(lines: &mut impl Iterator<Item = (usize, String)>, key: &str) -> Result<usize> {
    let (n, line) = lines.next().ok_or_else(|| parse_err(0, format!("missing `{key}` header")))?;
    let mut it = line.split_whitespace();
    match (it.next(), it.next(), it.next()) {
        (Some(k), Some(v), None) if k == key => {
            v.parse().map_err(|_| parse_err(n, format!("`{v}` is not a nonnegative integer")))
        }
        _ => Err(parse_err(n, format!("expected `{key} <n>`"))),
    }
}

/// Parses the text form. Blank lines and lines starting with `#` are skipped.
pub fn parse_text(src: &str) -> Result<Vec<LatticeVector>> {
    let mut lines = src
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim().to_string()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let dim = header(&mut lines, "dim")?;
    let n = header(&mut lines, "vertices")?;
    let mut out = Vec::with_capacity(n);
    for (line, text) in lines.by_ref() {
        if out.len() == n {
            return Err(parse_err(line, format!("more than {n} vertex rows")));
        }
        let row = text
            .split_whitespace()
            .map(|t| t.parse::<i64>().map_err(|_| parse_err(line, format!("`{t}` is not an integer"))))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != dim {
            return Err(parse_err(line, format!("expected {dim} coordinates, found {}", row.len())));
        }
        out.push(LatticeVector::new(row));
    }
    if out.len() != n {
        return Err(parse_err(src.lines().count(), format!("expected {n} vertex rows, found {}", out.len())));
    }
    Ok(out)
}

/// Parses the JSON form, checking every row against `dim`.
pub fn parse_json(src: &str) -> Result<Vec<LatticeVector>> {
    let p: JsonPolytope = serde_json::from_str(src).map_err(|e| parse_err(e.line(), e.to_string()))?;
    p.vertices
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            if v.len() == p.dim {
                Ok(LatticeVector::new(v))
            } else {
                Err(Error::InvalidArgument(format!("vertex {i} has {} coordinates, expected {}", v.len(), p.dim)))
            }
        })
        .collect()
}

pub fn parse(src: &str, format: Format) -> Result<Vec<LatticeVector>> {
    match format {
        Format::Text => parse_text(src),
        Format::Json => parse_json(src),
    }
}

fn dim_of(vertices: &[LatticeVector]) -> usize {
    vertices.first().map_or(0, |v| v.dim())
}

/// Canonical text form, one trailing newline.
pub fn to_text(vertices: &[LatticeVector]) -> String {
    let mut s = format!("dim {}\nvertices {}\n", dim_of(vertices), vertices.len());
    for v in vertices {
        let row: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        writeln!(s, "{}", row.join(" ")).unwrap();
    }
    s
}

/// Canonical JSON form, one trailing newline.
pub fn to_json(vertices: &[LatticeVector]) -> String {
    let p = JsonPolytope { dim: dim_of(vertices), vertices: vertices.iter().map(|v| v.to_vec()).collect() };
    serde_json::to_string(&p).expect("plain data") + "\n"
}

pub fn write(vertices: &[LatticeVector], format: Format) -> String {
    match format {
        Format::Text => to_text(vertices),
        Format::Json => to_json(vertices),
    }
}

/// Reads a vertex file; the format is taken from `format` or else from the
/// extension (`.json` means JSON, anything else text).
pub fn read_file(path: &Path, format: Option<Format>) -> Result<Vec<LatticeVector>> {
    let src = std::fs::read_to_string(path)?;
    let format = format.unwrap_or(match path.extension().and_then(|e| e.to_str()) {
        Some("json") => Format::Json,
        _ => Format::Text,
    });
    parse(&src, format)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SQUARE: &str = "dim 2\nvertices 4\n0 0\n1 0\n0 1\n1 1\n";

    #[test]
    fn parses_text() {
        let v = parse_text(SQUARE).unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(v[3].as_ref(), &[1, 1]);
        assert_eq!(to_text(&v), SQUARE);
    }

    #[test]
    fn comments_and_blank_lines() {
        let v = parse_text("# square\ndim 2\n\nvertices 1\n  3 -4  \n").unwrap();
        assert_eq!(v[0].as_ref(), &[3, -4]);
    }

    #[test]
    fn short_row_names_its_line() {
        let e = parse_text("dim 3\nvertices 2\n0 0 0\n1 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }), "{e}");
    }

    #[test]
    fn bad_token_and_header() {
        assert!(matches!(parse_text("dim 2\nvertices 1\n0 x\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_text("dimension 2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_text("dim 2\nvertices 2\n0 0\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_text("dim 1\nvertices 1\n0\n1\n"), Err(Error::Parse { line: 4, .. })));
    }

    #[test]
    fn json_mirror() {
        let v = parse_text(SQUARE).unwrap();
        let j = to_json(&v);
        assert_eq!(j, "{\"dim\":2,\"vertices\":[[0,0],[1,0],[0,1],[1,1]]}\n");
        assert_eq!(parse_json(&j).unwrap(), v);
        assert!(parse_json("{\"dim\":2,\"vertices\":[[0]]}").is_err());
    }

    proptest! {
        #[test]
        fn text_and_json_round_trip(d in 1usize..5, rows in prop::collection::vec(prop::collection::vec(-1000i64..1000, 4), 1..8)) {
            let v: Vec<LatticeVector> = rows.into_iter().map(|r| LatticeVector::new(r[..d].to_vec())).collect();
            let text = to_text(&v);
            prop_assert_eq!(to_text(&parse_text(&text).unwrap()), text.clone());
            let json = to_json(&v);
            prop_assert_eq!(to_json(&parse_json(&json).unwrap()), json);
            prop_assert_eq!(to_json(&parse_text(&text).unwrap()), to_json(&v));
        }
    }
}
