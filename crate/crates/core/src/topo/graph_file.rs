//! `PANAV-GRAPH v1`:
//!
//! ```text
//! PANAV-GRAPH v1
//! NODE <name> <category> <col> <row>
//! EDGE <name_a> <name_b> <clearance_m> <length_m>
//! ```

use std::io::{self, BufRead, Write};

use super::{TopoEdge, TopoGraph, TopoNode};
use crate::error::{Error, Result};
use crate::grid::Cell;

const HEADER: &str = "PANAV-GRAPH v1";

pub fn write_graph<W: Write>(graph: &TopoGraph, mut out: W) -> io::Result<()> {
    writeln!(out, "{HEADER}")?;
    for n in graph.nodes() {
        writeln!(
            out,
            "NODE {} {} {} {}",
            n.room_name, n.category, n.center_cell.col, n.center_cell.row
        )?;
    }
    for e in graph.edges() {
        writeln!(
            out,
            "EDGE {} {} {} {}",
            graph.nodes()[e.a].room_name,
            graph.nodes()[e.b].room_name,
            e.clearance,
            e.length
        )?;
    }
    out.flush()
}

pub fn read_graph<R: BufRead>(reader: R) -> Result<TopoGraph> {
    let bad = |line: usize, m: &str| Error::MalformedFile(format!("graph line {line}: {m}"));
    let mut nodes: Vec<TopoNode> = Vec::new();
    let mut edges = Vec::new();
    let mut saw_header = false;
    for (idx, line) in reader.lines().enumerate() {
        let n = idx + 1;
        let line = line.map_err(|e| bad(n, &e.to_string()))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if !saw_header {
            if line.trim_end() != HEADER {
                return Err(bad(n, "missing `PANAV-GRAPH v1` header"));
            }
            saw_header = true;
            continue;
        }
        match fields.as_slice() {
            ["NODE", name, category, col, row] => nodes.push(TopoNode {
                room_name: name.to_string(),
                category: category.parse().map_err(|_| bad(n, "category"))?,
                center_cell: Cell::new(
                    col.parse().map_err(|_| bad(n, "col"))?,
                    row.parse().map_err(|_| bad(n, "row"))?,
                ),
            }),
            ["EDGE", a, b, clearance, length] => {
                let find = |name: &str| {
                    nodes
                        .iter()
                        .position(|x| x.room_name == name)
                        .ok_or_else(|| bad(n, &format!("edge names unknown node `{name}`")))
                };
                edges.push(TopoEdge {
                    a: find(a)?,
                    b: find(b)?,
                    clearance: clearance.parse().map_err(|_| bad(n, "clearance"))?,
                    length: length.parse().map_err(|_| bad(n, "length"))?,
                });
            }
            _ => return Err(bad(n, "expected NODE or EDGE record")),
        }
    }
    if !saw_header {
        return Err(bad(1, "empty graph file"));
    }
    TopoGraph::new(nodes, edges).map_err(|e| Error::MalformedFile(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::RoomCategory;

    #[test]
    fn round_trip() {
        let node = |n: &str, c, r| TopoNode {
            room_name: n.into(),
            category: RoomCategory::from_room_name(n),
            center_cell: Cell::new(c, r),
        };
        let g = TopoGraph::new(
            vec![node("hallway_1", 4, 5), node("office_1", 0, 9), node("WC_2", 12, 1)],
            vec![
                TopoEdge { a: 0, b: 1, clearance: 0.05, length: 4.123 },
                TopoEdge { a: 0, b: 2, clearance: 0.0, length: 1.0 / 3.0 },
            ],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_graph(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("PANAV-GRAPH v1\nNODE hallway_1 hallway 4 5\n"));
        assert_eq!(read_graph(buf.as_slice()).unwrap(), g);
    }

    #[test]
    fn rejects_office_office_edge() {
        let text = "PANAV-GRAPH v1\nNODE office_1 office 0 0\nNODE office_2 office 1 1\nEDGE office_1 office_2 0 1\n";
        assert!(read_graph(text.as_bytes()).is_err());
        assert!(read_graph("NODE a b 0 0\n".as_bytes()).is_err());
    }
}
