//! `PANAV-PATHS v1`: one `PATH` line per route, optionally followed by a
//! `CELLS` line of `col,row` pairs.
//!
//! ```text
//! PANAV-PATHS v1
//! PATH <id> <cell_count> <cell_length> <world_length_m> <room> <room> ...
//! CELLS 3,4 4,5 5,5
//! ```

use std::io::{self, BufRead, Write};

use super::MetricPath;
use crate::error::{Error, Result};
use crate::grid::Cell;

const HEADER: &str = "PANAV-PATHS v1";

#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub path_id: usize,
    pub nodes: Vec<String>,
    pub cell_count: usize,
    pub cell_length: f64,
    pub world_length: f64,
    pub cells: Option<Vec<Cell>>,
}

impl From<&MetricPath> for PathRecord {
    fn from(p: &MetricPath) -> Self {
        PathRecord {
            path_id: p.path_id,
            nodes: p.nodes.clone(),
            cell_count: p.cells.len(),
            cell_length: p.cell_length,
            world_length: p.world_length,
            cells: Some(p.cells.clone()),
        }
    }
}

pub fn write_paths<W: Write>(paths: &[MetricPath], with_cells: bool, mut out: W) -> io::Result<()> {
    writeln!(out, "{HEADER}")?;
    for p in paths {
        write!(
            out,
            "PATH {} {} {} {}",
            p.path_id,
            p.cells.len(),
            p.cell_length,
            p.world_length
        )?;
        for n in &p.nodes {
            write!(out, " {n}")?;
        }
        writeln!(out)?;
        if with_cells {
            write!(out, "CELLS")?;
            for c in &p.cells {
                write!(out, " {},{}", c.col, c.row)?;
            }
            writeln!(out)?;
        }
    }
    out.flush()
}

pub fn read_paths<R: BufRead>(reader: R) -> Result<Vec<PathRecord>> {
    let bad = |line: usize, m: &str| Error::MalformedFile(format!("paths line {line}: {m}"));
    let mut out: Vec<PathRecord> = Vec::new();
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
                return Err(bad(n, "missing `PANAV-PATHS v1` header"));
            }
            saw_header = true;
            continue;
        }
        match fields[0] {
            "PATH" if fields.len() >= 6 => out.push(PathRecord {
                path_id: fields[1].parse().map_err(|_| bad(n, "id"))?,
                cell_count: fields[2].parse().map_err(|_| bad(n, "cell count"))?,
                cell_length: fields[3].parse().map_err(|_| bad(n, "cell length"))?,
                world_length: fields[4].parse().map_err(|_| bad(n, "world length"))?,
                nodes: fields[5..].iter().map(|s| s.to_string()).collect(),
                cells: None,
            }),
            "CELLS" => {
                let rec = out
                    .last_mut()
                    .filter(|r| r.cells.is_none())
                    .ok_or_else(|| bad(n, "CELLS without a preceding PATH"))?;
                let cells = fields[1..]
                    .iter()
                    .map(|pair| {
                        let (c, r) = pair.split_once(',')?;
                        Some(Cell::new(c.parse().ok()?, r.parse().ok()?))
                    })
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| bad(n, "cell pairs must be `col,row`"))?;
                if cells.len() != rec.cell_count {
                    return Err(bad(n, "cell count disagrees with PATH record"));
                }
                rec.cells = Some(cells);
            }
            _ => return Err(bad(n, "expected PATH or CELLS record")),
        }
    }
    if !saw_header {
        return Err(bad(1, "empty paths file"));
    }
    Ok(out)
}
