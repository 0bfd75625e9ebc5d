use std::io::{Read, Write};

use super::GridFunction;
use crate::error::{argument, Result};

/// Writes `node,value` rows under a header.
pub fn write_grid_csv<W: Write>(g: &GridFunction, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["node", "value"])?;
    for (t, v) in g.nodes().zip(g.samples()) {
        w.write_record([t.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the two-column CSV written by [`write_grid_csv`]. Nodes must be
/// uniformly spaced.
pub fn read_grid_csv<R: Read>(reader: R) -> Result<GridFunction> {
    let mut r = csv::Reader::from_reader(reader);
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    for record in r.deserialize() {
        let (t, v): (f64, f64) = record?;
        nodes.push(t);
        values.push(v);
    }
    if nodes.len() < 3 {
        return Err(argument("grid CSV needs at least 3 rows"));
    }
    let lo = nodes[0];
    let hi = nodes[nodes.len() - 1];
    let h = (hi - lo) / (nodes.len() - 1) as f64;
    for (i, &t) in nodes.iter().enumerate() {
        if (t - (lo + i as f64 * h)).abs() > 1e-9 * (1.0 + h.abs()) {
            return Err(argument(format!("row {i}: node {t} breaks uniform spacing")));
        }
    }
    GridFunction::new(lo, hi, values)
}
