//! Plain-text file formats: `fraclab-field v1` for sampled fields and a
//! one-atom-per-line format for discrete measures.
//!
//! Field files must round-trip bit-exactly; values are written with Rust's
//! shortest-round-trip float formatting and parsed back with `f64::from_str`.

use crate::capacity::DiscreteMeasure;
use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField};
use std::fmt::Write as _;
use std::path::Path;

const FIELD_MAGIC: &str = "# fraclab-field v1";

pub fn field_to_string(field: &ScalarField) -> String {
    let g = field.grid;
    let mut out = String::with_capacity(field.values.len() * 20 + 64);
    let _ = writeln!(
        out,
        "{FIELD_MAGIC} n={} N={} L={} periodic={}",
        g.n,
        g.npts,
        g.half_extent,
        if g.periodic { 1 } else { 0 }
    );
    for v in &field.values {
        let _ = writeln!(out, "{v}");
    }
    out
}

pub fn field_from_str(text: &str) -> Result<ScalarField> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty field file".into()))?;
    if !header.starts_with(FIELD_MAGIC) {
        return Err(Error::Format(format!(
            "bad field header, expected `{FIELD_MAGIC} ...`"
        )));
    }
    let mut n = None;
    let mut npts = None;
    let mut half_extent = None;
    let mut periodic = None;
    for tok in header[FIELD_MAGIC.len()..].split_whitespace() {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("malformed header token `{tok}`")))?;
        match key {
            "n" => {
                n = Some(
                    value
                        .parse::<usize>()
                        .map_err(|e| Error::Format(e.to_string()))?,
                )
            }
            "N" => {
                npts = Some(
                    value
                        .parse::<usize>()
                        .map_err(|e| Error::Format(e.to_string()))?,
                )
            }
            "L" => {
                half_extent = Some(
                    value
                        .parse::<f64>()
                        .map_err(|e| Error::Format(e.to_string()))?,
                )
            }
            "periodic" => periodic = Some(value == "1"),
            _ => return Err(Error::Format(format!("unknown header key `{key}`"))),
        }
    }
    let grid = Grid::new(
        n.ok_or_else(|| Error::Format("header missing n".into()))?,
        npts.ok_or_else(|| Error::Format("header missing N".into()))?,
        half_extent.ok_or_else(|| Error::Format("header missing L".into()))?,
        periodic.ok_or_else(|| Error::Format("header missing periodic".into()))?,
    )?;
    let mut values = Vec::with_capacity(grid.len());
    for line in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        values.push(
            line.parse::<f64>()
                .map_err(|e| Error::Format(format!("bad value `{line}`: {e}")))?,
        );
    }
    ScalarField::new(grid, values)
}

pub fn write_field(path: &Path, field: &ScalarField) -> Result<()> {
    std::fs::write(path, field_to_string(field))?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<ScalarField> {
    let text = std::fs::read_to_string(path)?;
    field_from_str(&text)
}

/// Measure files: one `x1 ... xn weight` line per atom, `#` comments allowed.
pub fn measure_from_str(text: &str, n: usize) -> Result<DiscreteMeasure> {
    let mut atoms = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| Error::Format(e.to_string())))
            .collect::<Result<_>>()?;
        if fields.len() != n + 1 {
            return Err(Error::Format(format!(
                "atom line `{line}` has {} entries, expected {}",
                fields.len(),
                n + 1
            )));
        }
        let mut point = [0.0; crate::grid::MAX_DIM];
        point[..n].copy_from_slice(&fields[..n]);
        atoms.push((point, fields[n]));
    }
    DiscreteMeasure::new(n, atoms, None)
}

pub fn measure_to_string(measure: &DiscreteMeasure) -> String {
    let mut out = String::new();
    for (point, weight) in &measure.atoms {
        for c in &point[..measure.n] {
            let _ = write!(out, "{c} ");
        }
        let _ = writeln!(out, "{weight}");
    }
    out
}

pub fn read_measure(path: &Path, n: usize) -> Result<DiscreteMeasure> {
    let text = std::fs::read_to_string(path)?;
    measure_from_str(&text, n)
}

const CELLS_MAGIC: &str = "# fraclab-cells v1";

/// Cell-set files: a field-style header followed by one finest-level flat
/// cell index per line.
pub fn cells_to_string(set: &crate::capacity::DyadicSet) -> String {
    let g = set.grid;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{CELLS_MAGIC} n={} N={} L={} periodic={}",
        g.n,
        g.npts,
        g.half_extent,
        if g.periodic { 1 } else { 0 }
    );
    for c in &set.cells {
        let _ = writeln!(out, "{c}");
    }
    out
}

pub fn cells_from_str(text: &str) -> Result<crate::capacity::DyadicSet> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty cell-set file".into()))?;
    if !header.starts_with(CELLS_MAGIC) {
        return Err(Error::Format(format!(
            "bad cell-set header, expected `{CELLS_MAGIC} ...`"
        )));
    }
    let mut n = None;
    let mut npts = None;
    let mut half_extent = None;
    let mut periodic = true;
    for tok in header[CELLS_MAGIC.len()..].split_whitespace() {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("malformed header token `{tok}`")))?;
        match key {
            "n" => {
                n = Some(
                    value
                        .parse::<usize>()
                        .map_err(|e| Error::Format(e.to_string()))?,
                )
            }
            "N" => {
                npts = Some(
                    value
                        .parse::<usize>()
                        .map_err(|e| Error::Format(e.to_string()))?,
                )
            }
            "L" => {
                half_extent = Some(
                    value
                        .parse::<f64>()
                        .map_err(|e| Error::Format(e.to_string()))?,
                )
            }
            "periodic" => periodic = value == "1",
            _ => return Err(Error::Format(format!("unknown header key `{key}`"))),
        }
    }
    let grid = Grid::new(
        n.ok_or_else(|| Error::Format("header missing n".into()))?,
        npts.ok_or_else(|| Error::Format("header missing N".into()))?,
        half_extent.ok_or_else(|| Error::Format("header missing L".into()))?,
        periodic,
    )?;
    let mut cells = Vec::new();
    for line in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        cells.push(
            line.parse::<usize>()
                .map_err(|e| Error::Format(format!("bad cell index `{line}`: {e}")))?,
        );
    }
    crate::capacity::DyadicSet::from_cells(grid, cells)
}

pub fn read_cells(path: &Path) -> Result<crate::capacity::DyadicSet> {
    let text = std::fs::read_to_string(path)?;
    cells_from_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TestFamily;

    #[test]
    fn field_round_trip_is_bit_exact() {
        let g = Grid::new(2, 16, 8.0, true).unwrap();
        let f = crate::grid::sample(&TestFamily::gaussian(1.0), g).unwrap();
        let text = field_to_string(&f);
        let back = field_from_str(&text).unwrap();
        assert_eq!(f.grid, back.grid);
        assert!(f
            .values
            .iter()
            .zip(&back.values)
            .all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn rejects_malformed_headers() {
        assert!(field_from_str("").is_err());
        assert!(field_from_str("# wrong v1 n=1 N=8 L=4 periodic=1\n").is_err());
        assert!(field_from_str("# fraclab-field v1 n=1 N=8 L=4 periodic=1 extra=2\n").is_err());
        assert!(field_from_str("# fraclab-field v1 n=1 N=8 periodic=1\n").is_err());
    }

    #[test]
    fn cells_round_trip() {
        let g = Grid::new(2, 16, 4.0, true).unwrap();
        let set = crate::capacity::DyadicSet::from_cells(g, [3usize, 17, 200]).unwrap();
        let text = cells_to_string(&set);
        let back = cells_from_str(&text).unwrap();
        assert_eq!(set.grid, back.grid);
        assert_eq!(set.cells, back.cells);
        assert!(cells_from_str("# wrong header\n1\n").is_err());
        assert!(cells_from_str("# fraclab-cells v1 n=1 N=8 L=4 periodic=1\n99\n").is_err());
    }

    #[test]
    fn measure_round_trip() {
        let m = DiscreteMeasure::new(
            2,
            vec![([0.5, -0.25, 0.0], 1.0), ([0.0, 0.125, 0.0], 0.5)],
            None,
        )
        .unwrap();
        let text = measure_to_string(&m);
        let back = measure_from_str(&text, 2).unwrap();
        assert_eq!(m.atoms, back.atoms);
    }
}
