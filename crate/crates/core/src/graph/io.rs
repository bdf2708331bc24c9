//! Edge-list text format.
//!
//! Header line `n <count>`, then one line per edge `i j w` with 1-based node
//! indices and a decimal weight. Weights are written in shortest round-trip
//! form, so writing and re-reading reproduces the graph exactly.

use std::io::{BufRead, Write};

use super::{GraphError, WeightedGraph};

pub fn write_edge_list<W: Write>(g: &WeightedGraph, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "n {}", g.node_count())?;
    for e in g.edges() {
        writeln!(out, "{} {} {}", e.a + 1, e.b + 1, e.w)?;
    }
    Ok(())
}

pub fn read_edge_list<R: BufRead>(input: R) -> Result<WeightedGraph, GraphError> {
    let mut lines = input.lines().enumerate();
    let (mut line_no, header) = loop {
        match lines.next() {
            Some((i, line)) => {
                let line = line?;
                let t = line.trim();
                if t.is_empty() || t.starts_with('#') {
                    continue;
                }
                break (i + 1, line);
            }
            None => {
                return Err(GraphError::Parse { line: 0, reason: "missing header".into() })
            }
        }
    };
    let mut parts = header.split_whitespace();
    let n = match (parts.next(), parts.next(), parts.next()) {
        (Some("n"), Some(count), None) => count.parse::<usize>().map_err(|e| {
            GraphError::Parse { line: line_no, reason: format!("bad node count: {e}") }
        })?,
        _ => {
            return Err(GraphError::Parse {
                line: line_no,
                reason: "header must be `n <count>`".into(),
            })
        }
    };

    let mut g = WeightedGraph::new(n);
    for (i, line) in lines {
        line_no = i + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(GraphError::Parse {
                line: line_no,
                reason: format!("expected `i j w`, got {} fields", fields.len()),
            });
        }
        let parse_idx = |s: &str| -> Result<usize, GraphError> {
            let v: usize = s.parse().map_err(|e| GraphError::Parse {
                line: line_no,
                reason: format!("bad node index `{s}`: {e}"),
            })?;
            if v == 0 {
                return Err(GraphError::Parse {
                    line: line_no,
                    reason: "node indices are 1-based".into(),
                });
            }
            Ok(v - 1)
        };
        let a = parse_idx(fields[0])?;
        let b = parse_idx(fields[1])?;
        let w: f64 = fields[2].parse().map_err(|e| GraphError::Parse {
            line: line_no,
            reason: format!("bad weight `{}`: {e}", fields[2]),
        })?;
        g.add_edge(a, b, w)?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{assign_weights, generate, GraphModel, GraphModelSpec};

    #[test]
    fn round_trip_preserves_the_graph_exactly() {
        let g = generate(&GraphModelSpec {
            model: GraphModel::ErdosRenyi { n: 12, p: 0.4 },
            seed: 5,
        })
        .unwrap();
        let g = assign_weights(&g, 0.0, 10.0, 5).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let back = read_edge_list(buf.as_slice()).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn format_is_one_based_with_header() {
        let g = WeightedGraph::with_edges(3, [(0, 2, 1.5)]).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "n 3\n1 3 1.5\n");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "n 3\n1 2 1.0\n0 2 1.0\n";
        match read_edge_list(bad.as_bytes()) {
            Err(GraphError::Parse { line: 3, .. }) => {}
            other => panic!("expected parse error on line 3, got {other:?}"),
        }
        assert!(read_edge_list("nodes 3\n".as_bytes()).is_err());
        assert!(read_edge_list("".as_bytes()).is_err());
    }
}
