//! Plain-text edge lists.
//!
//! ```text
//! # optional comment lines
//! n 4 directed 0
//! 0 1 1
//! 1 2 2.5
//! ```
//!
//! Each edge line is `u v w` with 0-based indices. The header is optional;
//! without it the vertex count is one more than the largest index seen.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::Graph;

struct Header {
    n: usize,
    directed: bool,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(tokens: &[&str], line: usize) -> Result<Header> {
    if tokens.len() != 4 || tokens[2] != "directed" {
        return Err(parse_err(line, "header must read `n <count> directed <0|1>`"));
    }
    let n = tokens[1]
        .parse()
        .map_err(|_| parse_err(line, format!("invalid vertex count `{}`", tokens[1])))?;
    let directed = match tokens[3] {
        "0" => false,
        "1" => true,
        other => return Err(parse_err(line, format!("directed flag must be 0 or 1, got `{other}`"))),
    };
    Ok(Header { n, directed })
}

/// Parses an edge list. A header, when present, overrides `directed`.
pub fn parse_edge_list(text: &str, directed: bool) -> Result<Graph> {
    let mut header: Option<Header> = None;
    let mut edges = Vec::new();
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens[0] == "n" {
            if header.is_some() || !edges.is_empty() {
                return Err(parse_err(line, "header must come before every edge and appear once"));
            }
            header = Some(parse_header(&tokens, line)?);
            continue;
        }
        if tokens.len() != 3 {
            return Err(parse_err(
                line,
                format!("expected `u v w`, found {} fields", tokens.len()),
            ));
        }
        let index = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| parse_err(line, format!("invalid vertex index `{s}`")))
        };
        let u = index(tokens[0])?;
        let v = index(tokens[1])?;
        let w: f64 = tokens[2]
            .parse()
            .map_err(|_| parse_err(line, format!("invalid weight `{}`", tokens[2])))?;
        edges.push((u, v, w));
        lines.push(line);
    }
    let (n, directed) = match header {
        Some(h) => (h.n, h.directed),
        None => (edges.iter().map(|&(u, v, _)| u.max(v) + 1).max().unwrap_or(0), directed),
    };
    // validate edge by edge so errors carry a line number
    for (&(u, v, w), &line) in edges.iter().zip(&lines) {
        Graph::new(n.max(1), &[(u, v, w)], directed).map_err(|e| parse_err(line, e.to_string()))?;
    }
    Graph::new(n, &edges, directed)
}

/// Writes a graph with a header line and shortest round-trip weights.
/// Undirected edges are listed once with `u <= v`.
pub fn serialize_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "n {} directed {}", g.n(), u8::from(g.is_directed())).unwrap();
    for (u, v, w) in g.edges() {
        writeln!(out, "{u} {v} {w:?}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::path;

    #[test]
    fn parse_examples() {
        assert_eq!(parse_edge_list("0 1 1\n1 2 1", false).unwrap(), path(3));
        let g = parse_edge_list("# comment\n0 1 2.5", false).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.weight(1, 0), 2.5);
        assert_eq!(
            parse_edge_list("0 x 1", false).unwrap_err(),
            Error::Parse {
                line: 1,
                message: "invalid vertex index `x`".into()
            }
        );
    }

    #[test]
    fn header_controls_size_and_direction() {
        let g = parse_edge_list("n 5 directed 1\n0 1 1 # trailing\n", false).unwrap();
        assert_eq!(g.n(), 5);
        assert!(g.is_directed());
        assert_eq!(g.weight(1, 0), 0.0);
        assert!(matches!(
            parse_edge_list("n 2 directed 0\n0 2 1", false),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_edge_list("0 1 1\nn 2 directed 0", false),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_edge_list("0 1 -3", false),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_edge_list("0 1", false),
            Err(Error::Parse { line: 1, .. })
        ));
        assert_eq!(parse_edge_list("# nothing\n", false).unwrap_err(), Error::EmptyGraph);
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let text = "0 1 0.1\n1 2 0.30000000000000004\n2 2 1e-300\n0 3 12345.678901234567\n";
        let g = parse_edge_list(text, false).unwrap();
        let again = parse_edge_list(&serialize_edge_list(&g), true).unwrap();
        assert_eq!(again, g);
    }
}
