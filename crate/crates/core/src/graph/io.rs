//! Adjacency-list text format.
//!
//! ```text
//! graph vertices=3 root=0 dim=1
//! 0: 1
//! 1: 0 2
//! 2: 1
//! coord 0: 0
//! coord 1: 1
//! coord 2: 2
//! ```
//!
//! `dim=0` means no coordinate table. Output ordering is deterministic, so
//! the text of a graph can be hashed.

use std::fmt::Write as _;

use super::Graph;
use crate::error::{Error, Result};

pub fn write_graph(g: &Graph) -> String {
    let mut s = String::new();
    let dim = g.dimension().unwrap_or(0);
    let _ = writeln!(s, "graph vertices={} root={} dim={}", g.num_vertices(), g.root(), dim);
    for v in 0..g.num_vertices() {
        let _ = write!(s, "{v}:");
        for w in g.neighbors(v) {
            let _ = write!(s, " {w}");
        }
        s.push('\n');
    }
    if let Some(coords) = g.coords() {
        for (v, c) in coords.iter().enumerate() {
            let _ = write!(s, "coord {v}:");
            for x in c {
                let _ = write!(s, " {x}");
            }
            s.push('\n');
        }
    }
    s
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn header_field(token: Option<&str>, key: &str, line: usize) -> Result<usize> {
    let token = token.ok_or_else(|| parse_err(line, format!("missing `{key}=`")))?;
    let value = token
        .strip_prefix(key)
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| parse_err(line, format!("expected `{key}=`, found `{token}`")))?;
    value
        .parse()
        .map_err(|_| parse_err(line, format!("bad value for {key}: `{value}`")))
}

pub fn read_graph(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty graph file"))?;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("graph") {
        return Err(parse_err(hl, "header must start with `graph`"));
    }
    let n = header_field(tokens.next(), "vertices", hl)?;
    let root = header_field(tokens.next(), "root", hl)?;
    let dim = header_field(tokens.next(), "dim", hl)?;

    let mut neighbors: Vec<Option<Vec<usize>>> = vec![None; n];
    let mut coords: Vec<Option<Vec<i64>>> = vec![None; n];
    for (ln, line) in lines {
        let (is_coord, body) = match line.strip_prefix("coord ") {
            Some(rest) => (true, rest),
            None => (false, line),
        };
        let (id, rest) = body
            .split_once(':')
            .ok_or_else(|| parse_err(ln, "expected `id: ...`"))?;
        let id: usize = id
            .trim()
            .parse()
            .map_err(|_| parse_err(ln, format!("bad vertex id `{id}`")))?;
        if id >= n {
            return Err(parse_err(ln, format!("vertex {id} out of range")));
        }
        if is_coord {
            let c = rest
                .split_whitespace()
                .map(|t| t.parse::<i64>().map_err(|_| parse_err(ln, format!("bad coordinate `{t}`"))))
                .collect::<Result<Vec<_>>>()?;
            if c.len() != dim {
                return Err(parse_err(ln, format!("expected {dim} coordinates")));
            }
            if coords[id].replace(c).is_some() {
                return Err(parse_err(ln, format!("duplicate coordinates for {id}")));
            }
        } else {
            let nb = rest
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| parse_err(ln, format!("bad neighbor `{t}`"))))
                .collect::<Result<Vec<_>>>()?;
            if neighbors[id].replace(nb).is_some() {
                return Err(parse_err(ln, format!("duplicate adjacency line for {id}")));
            }
        }
    }

    let mut edges = Vec::new();
    for (v, nb) in neighbors.iter().enumerate() {
        let nb = nb.as_ref().ok_or_else(|| parse_err(0, format!("no adjacency line for {v}")))?;
        for &w in nb {
            if w >= n {
                return Err(Error::InvalidGraph(format!("neighbor {w} of {v} out of range")));
            }
            let back = neighbors[w].as_ref().is_some_and(|l| l.contains(&v));
            if !back {
                return Err(Error::InvalidGraph(format!("adjacency not symmetric at ({v}, {w})")));
            }
            if v < w {
                edges.push((v, w));
            } else if v == w {
                return Err(Error::InvalidGraph(format!("self-loop at {v}")));
            }
        }
    }
    let g = Graph::from_edges(n, root, &edges)?;
    if dim == 0 {
        return Ok(g);
    }
    let coords = coords
        .into_iter()
        .enumerate()
        .map(|(v, c)| c.ok_or_else(|| parse_err(0, format!("no coordinates for {v}"))))
        .collect::<Result<Vec<_>>>()?;
    g.with_coordinates(coords)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_structure() {
        for g in [
            Graph::ball(2, 3).unwrap(),
            Graph::complete(4).unwrap(),
            Graph::regular_tree(3, 2).unwrap(),
        ] {
            let text = write_graph(&g);
            let h = read_graph(&text).unwrap();
            assert_eq!(g, h);
            assert_eq!(write_graph(&h), text);
        }
    }

    #[test]
    fn asymmetric_adjacency_is_rejected() {
        let text = "graph vertices=2 root=0 dim=0\n0: 1\n1:\n";
        assert!(matches!(read_graph(text), Err(Error::InvalidGraph(_))));
        let text = "graph vertices=2 root=0\n0: 1\n1: 0\n";
        assert!(matches!(read_graph(text), Err(Error::Parse { line: 1, .. })));
    }
}
