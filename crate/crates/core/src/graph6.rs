//! graph6 encoding of simple undirected graphs, for interop with canonical
//! enumeration tools. Supports the short (n ≤ 62) and long (n ≤ 258047)
//! headers.

use crate::error::{Error, Result};
use crate::graph::Graph;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Decodes one graph6 string. `line` is used only for error reporting.
pub fn decode_graph6(s: &str, line: usize) -> Result<Graph> {
    let bytes = s.trim().as_bytes();
    if bytes.is_empty() {
        return Err(parse_err(line, "empty graph6 string"));
    }
    let (n, idx) = if bytes[0] == 126 {
        if bytes.len() >= 2 && bytes[1] == 126 {
            return Err(parse_err(line, "graph6 with n > 258047 not supported"));
        }
        if bytes.len() < 4 {
            return Err(parse_err(line, "truncated long-form size"));
        }
        let mut n = 0usize;
        for &b in &bytes[1..4] {
            if !(63..=126).contains(&b) {
                return Err(parse_err(line, "size byte out of range"));
            }
            n = (n << 6) | (b as usize - 63);
        }
        (n, 4usize)
    } else {
        if !(63..=126).contains(&bytes[0]) {
            return Err(parse_err(line, "size byte out of range"));
        }
        (bytes[0] as usize - 63, 1usize)
    };
    let pair_count = n * n.saturating_sub(1) / 2;
    let needed = pair_count.div_ceil(6);
    if bytes.len() - idx != needed {
        return Err(parse_err(
            line,
            format!(
                "expected {needed} data bytes for n={n}, got {}",
                bytes.len() - idx
            ),
        ));
    }
    let mut edges = Vec::new();
    let mut bit_pos = 0usize;
    // column order: (0,1), (0,2), (1,2), (0,3), ...
    'outer: for j in 1..n {
        for i in 0..j {
            let byte = bytes[idx + bit_pos / 6];
            if !(63..=126).contains(&byte) {
                return Err(parse_err(line, "data byte out of range"));
            }
            let chunk = byte - 63;
            let bit = (chunk >> (5 - (bit_pos % 6))) & 1;
            if bit == 1 {
                edges.push((i, j));
            }
            bit_pos += 1;
            if bit_pos == pair_count {
                break 'outer;
            }
        }
    }
    Graph::from_edges(n, &edges)
}

pub fn encode_graph6(g: &Graph) -> Result<String> {
    let n = g.vertex_count();
    let mut out = Vec::new();
    if n <= 62 {
        out.push(n as u8 + 63);
    } else if n <= 258047 {
        out.push(126);
        out.push(((n >> 12) & 63) as u8 + 63);
        out.push(((n >> 6) & 63) as u8 + 63);
        out.push((n & 63) as u8 + 63);
    } else {
        return Err(Error::InvalidInstance(format!(
            "graph6 encoding for n={n} not supported"
        )));
    }
    let pair_count = n * n.saturating_sub(1) / 2;
    let mut chunk = 0u8;
    let mut filled = 0u8;
    let mut emitted = 0usize;
    for j in 1..n {
        for i in 0..j {
            chunk = (chunk << 1) | u8::from(g.has_edge(i, j));
            filled += 1;
            if filled == 6 {
                out.push(chunk + 63);
                chunk = 0;
                filled = 0;
            }
            emitted += 1;
        }
    }
    debug_assert_eq!(emitted, pair_count);
    if filled > 0 {
        out.push((chunk << (6 - filled)) + 63);
    }
    Ok(String::from_utf8(out).expect("graph6 bytes are ascii"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_small_strings() {
        // 'D' = 5 vertices; K_5 is "D~{"
        let k5 = decode_graph6("D~{", 1).unwrap();
        assert_eq!(k5.vertex_count(), 5);
        assert_eq!(k5.edge_count(), 10);
        assert_eq!(encode_graph6(&Graph::complete(5)).unwrap(), "D~{");
        // empty graph on 5 vertices: "D??"
        let e5 = decode_graph6("D??", 1).unwrap();
        assert_eq!(e5.edge_count(), 0);
    }

    #[test]
    fn roundtrip_various() {
        for (n, edges) in [
            (1, vec![]),
            (4, vec![(0, 1), (1, 2), (2, 3)]),
            (7, vec![(0, 6), (2, 5), (1, 3), (3, 4)]),
            (63, vec![(0, 62), (10, 20)]),
        ] {
            let g = Graph::from_edges(n, &edges).unwrap();
            let s = encode_graph6(&g).unwrap();
            let h = decode_graph6(&s, 1).unwrap();
            assert_eq!(h.vertex_count(), g.vertex_count());
            assert_eq!(h.edges(), g.edges());
        }
    }

    #[test]
    fn malformed_strings_report_line() {
        let err = decode_graph6("D?", 17).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 17),
            other => panic!("unexpected {other:?}"),
        }
        assert!(decode_graph6("", 1).is_err());
        assert!(decode_graph6(" \t", 3).is_err());
    }
}
