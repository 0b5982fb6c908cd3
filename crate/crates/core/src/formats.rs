//! Plain-text instance formats.
//!
//! Graph: first line `n m`, then `m` lines `u v` with 0-based ids.
//! Tree: one line `n; p(1) p(2) ... p(n-1)` — the parent of each non-root
//! vertex, root implicit at 0.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::tree::RootedTree;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty graph file"))?;
    let mut it = header.split_whitespace();
    let n: usize = it
        .next()
        .ok_or_else(|| parse_err(header_line, "missing vertex count"))?
        .parse()
        .map_err(|_| parse_err(header_line, "vertex count is not a number"))?;
    let m: usize = it
        .next()
        .ok_or_else(|| parse_err(header_line, "missing edge count"))?
        .parse()
        .map_err(|_| parse_err(header_line, "edge count is not a number"))?;
    if it.next().is_some() {
        return Err(parse_err(header_line, "trailing tokens after 'n m'"));
    }
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, text) = lines
            .next()
            .ok_or_else(|| parse_err(header_line, format!("expected {m} edge lines")))?;
        let mut it = text.split_whitespace();
        let u: usize = it
            .next()
            .ok_or_else(|| parse_err(ln, "missing endpoint"))?
            .parse()
            .map_err(|_| parse_err(ln, "endpoint is not a number"))?;
        let v: usize = it
            .next()
            .ok_or_else(|| parse_err(ln, "missing second endpoint"))?
            .parse()
            .map_err(|_| parse_err(ln, "endpoint is not a number"))?;
        if it.next().is_some() {
            return Err(parse_err(ln, "trailing tokens after edge"));
        }
        if u >= n || v >= n {
            return Err(parse_err(
                ln,
                format!("edge ({u},{v}) out of range for n={n}"),
            ));
        }
        if u == v {
            return Err(parse_err(ln, format!("self-loop at {u}")));
        }
        edges.push((u, v));
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "unexpected content after edge list"));
    }
    Graph::from_edges(n, &edges)
}

/// Canonical serialization: sorted edges, one per line.
pub fn format_graph(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.vertex_count(), g.edge_count());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn parse_tree(text: &str) -> Result<RootedTree> {
    let line = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .ok_or_else(|| parse_err(1, "empty tree file"))?;
    let (count_part, parents_part) = line
        .split_once(';')
        .ok_or_else(|| parse_err(1, "expected 'n; parents...' with a semicolon"))?;
    let n: usize = count_part
        .trim()
        .parse()
        .map_err(|_| parse_err(1, "vertex count is not a number"))?;
    if n == 0 {
        return Err(parse_err(1, "tree must have at least one vertex"));
    }
    let mut parents: Vec<Option<usize>> = vec![None];
    for tok in parents_part.split_whitespace() {
        let p: usize = tok
            .parse()
            .map_err(|_| parse_err(1, format!("parent {tok:?} is not a number")))?;
        parents.push(Some(p));
    }
    if parents.len() != n {
        return Err(parse_err(
            1,
            format!(
                "expected {} parent entries, got {}",
                n - 1,
                parents.len() - 1
            ),
        ));
    }
    RootedTree::from_parents(parents)
}

pub fn format_tree(t: &RootedTree) -> String {
    let mut out = format!("{};", t.vertex_count());
    for v in 1..t.vertex_count() {
        out.push_str(&format!(
            " {}",
            t.parent(v).expect("non-root vertex has a parent")
        ));
    }
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_roundtrip() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3), (0, 3)]).unwrap();
        let text = format_graph(&g);
        assert_eq!(text, "4 3\n0 1\n0 3\n2 3\n");
        let h = parse_graph(&text).unwrap();
        assert_eq!(h.edges(), g.edges());
    }

    #[test]
    fn graph_parse_errors_carry_line_numbers() {
        let err = parse_graph("3 2\n0 1\n0 3\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_graph("").is_err());
        assert!(parse_graph("2 1\n0 0\n").is_err());
        assert!(parse_graph("2 0\n0 1\n").is_err());
    }

    #[test]
    fn tree_roundtrip() {
        // star with 3 edges rooted at 0
        let t = parse_tree("4; 0 0 0").unwrap();
        assert_eq!(t.vertex_count(), 4);
        assert_eq!(t.leaf_count(), 3);
        assert_eq!(format_tree(&t), "4; 0 0 0\n");
        // single vertex
        let one = parse_tree("1;").unwrap();
        assert_eq!(one.vertex_count(), 1);
        assert_eq!(format_tree(&one), "1;\n");
    }

    #[test]
    fn tree_parse_rejects_bad_shapes() {
        assert!(parse_tree("3; 0").is_err());
        assert!(parse_tree("3; 0 0 0").is_err());
        assert!(parse_tree("2; 2").is_err());
        assert!(parse_tree("no semicolon").is_err());
    }
}
