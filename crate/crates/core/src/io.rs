//! Point-set CSV files.
//!
//! A file starts with optional `#` comment lines, then a mandatory header
//! row, then one row per point. Columns named `xi_*` hold the latent
//! manifold points and must match the number of remaining columns.
//! Floats are written in Rust's shortest round-trip form, so reading back a
//! written file reproduces every coordinate bit for bit.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::PointSet;

/// Points read from a CSV file, with latent points when present.
#[derive(Clone, Debug)]
pub struct PointTable {
    pub points: PointSet,
    pub latent: Option<PointSet>,
}

pub fn write_points<W: Write>(
    mut w: W,
    points: &PointSet,
    latent: Option<&PointSet>,
    comments: &[String],
) -> Result<()> {
    if let Some(xi) = latent {
        if xi.len() != points.len() || xi.dim() != points.dim() {
            return Err(Error::invalid("latent points do not match observations"));
        }
    }
    for c in comments {
        for line in c.lines() {
            writeln!(w, "# {line}")?;
        }
    }
    let dim = points.dim();
    let mut header: Vec<String> = (1..=dim).map(|i| format!("y_{i}")).collect();
    if latent.is_some() {
        header.extend((1..=dim).map(|i| format!("xi_{i}")));
    }
    writeln!(w, "{}", header.join(","))?;
    let mut row = String::new();
    for i in 0..points.len() {
        row.clear();
        let coords = points.point(i).iter().chain(latent.map(|x| x.point(i)).unwrap_or(&[]));
        for (j, c) in coords.enumerate() {
            if j > 0 {
                row.push(',');
            }
            row.push_str(&c.to_string());
        }
        writeln!(w, "{row}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_points_file(
    path: &Path,
    points: &PointSet,
    latent: Option<&PointSet>,
    comments: &[String],
) -> Result<()> {
    write_points(BufWriter::new(File::create(path)?), points, latent, comments)
}

pub fn read_points<R: BufRead>(r: R) -> Result<PointTable> {
    let mut header: Option<(usize, usize)> = None;
    let mut points = Vec::new();
    let mut latent = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = t.split(',').map(str::trim).collect();
        let Some((dim, xi_cols)) = header else {
            let xi_cols = fields.iter().filter(|f| f.starts_with("xi_")).count();
            let dim = fields.len() - xi_cols;
            if dim == 0 || fields.iter().any(|f| f.is_empty()) {
                return Err(Error::Parse { line: line_no, msg: "malformed header".into() });
            }
            if xi_cols != 0 && xi_cols != dim {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("{xi_cols} latent columns for {dim} coordinates"),
                });
            }
            header = Some((dim, xi_cols));
            continue;
        };
        if fields.len() != dim + xi_cols {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected {} fields, found {}", dim + xi_cols, fields.len()),
            });
        }
        for (j, f) in fields.iter().enumerate() {
            let v: f64 = f.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("invalid number `{f}` in column {}", j + 1),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse { line: line_no, msg: format!("non-finite value `{f}`") });
            }
            if j < dim {
                points.push(v);
            } else {
                latent.push(v);
            }
        }
    }
    let Some((dim, xi_cols)) = header else {
        return Err(Error::Parse { line: 0, msg: "missing header row".into() });
    };
    Ok(PointTable {
        points: PointSet::from_flat(dim, points)?,
        latent: if xi_cols > 0 { Some(PointSet::from_flat(dim, latent)?) } else { None },
    })
}

pub fn read_points_file(path: &Path) -> Result<PointTable> {
    read_points(BufReader::new(File::open(path)?))
}
