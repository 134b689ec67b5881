//! File emission. All real numbers are written with 17 significant digits,
//! which round-trips `f64` exactly, and nothing in any writer depends on
//! wall time or worker count, so reruns are byte-identical.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use kss::packet::{CoeffTable, SliceGrid, SlicePlane};
use serde::Serialize;

pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn plane_tag(plane: SlicePlane) -> &'static str {
    match plane {
        SlicePlane::XY => "xy",
        SlicePlane::XZ => "xz",
    }
}

fn writer(path: &Path) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json<T: Serialize>(path: &Path, doc: &T) -> io::Result<()> {
    let mut w = writer(path)?;
    serde_json::to_writer_pretty(&mut w, doc)?;
    writeln!(w)?;
    w.flush()
}

#[derive(Serialize)]
struct ExpandDoc {
    window: ExpandWindow,
    captured: f64,
    excluded: usize,
    entries: Vec<ExpandEntry>,
}

#[derive(Serialize)]
struct ExpandWindow {
    n: (u32, u32),
    l: (u32, u32),
    m: (i32, i32),
}

#[derive(Serialize)]
struct ExpandEntry {
    n: u32,
    l: u32,
    m: i32,
    re: f64,
    im: f64,
    energy: f64,
}

fn expand_doc(table: &CoeffTable) -> ExpandDoc {
    let w = table.window();
    ExpandDoc {
        window: ExpandWindow { n: w.n_range(), l: w.l_range(), m: w.m_range() },
        captured: table.captured_norm(),
        excluded: table.excluded(),
        entries: table
            .entries()
            .iter()
            .map(|e| ExpandEntry {
                n: e.n,
                l: e.l,
                m: e.m,
                re: e.amp.re,
                im: e.amp.im,
                energy: table.energy(e.n, e.l).expect("stored entries carry a level"),
            })
            .collect(),
    }
}

pub fn write_expand_csv(path: &Path, table: &CoeffTable) -> io::Result<()> {
    let doc = expand_doc(table);
    let mut w = writer(path)?;
    writeln!(
        w,
        "# window n={}..{} l={}..{} m={}..{} captured={} excluded={}",
        doc.window.n.0,
        doc.window.n.1,
        doc.window.l.0,
        doc.window.l.1,
        doc.window.m.0,
        doc.window.m.1,
        fmt17(doc.captured),
        doc.excluded
    )?;
    writeln!(w, "n,l,m,re,im,energy")?;
    for e in &doc.entries {
        writeln!(w, "{},{},{},{},{},{}", e.n, e.l, e.m, fmt17(e.re), fmt17(e.im), fmt17(e.energy))?;
    }
    w.flush()
}

pub fn write_expand_json(path: &Path, table: &CoeffTable) -> io::Result<()> {
    write_json(path, &expand_doc(table))
}

/// One sampled instant of the evolved packet: mean radius plus the two
/// conserved diagnostics.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EvolveRow {
    pub t: f64,
    pub r_mean: f64,
    pub norm: f64,
    pub energy: f64,
}

pub fn write_evolve_csv(path: &Path, rows: &[EvolveRow]) -> io::Result<()> {
    let mut w = writer(path)?;
    writeln!(w, "# samples={}", rows.len())?;
    writeln!(w, "t,r_mean,norm,energy")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", fmt17(r.t), fmt17(r.r_mean), fmt17(r.norm), fmt17(r.energy))?;
    }
    w.flush()
}

pub fn write_evolve_json(path: &Path, rows: &[EvolveRow]) -> io::Result<()> {
    write_json(path, &rows)
}

#[derive(Serialize)]
struct SliceDoc {
    plane: SlicePlane,
    t: f64,
    x: SliceAxis,
    y: SliceAxis,
    /// Rows of the map, the second coordinate varying slowest.
    values: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct SliceAxis {
    min: f64,
    max: f64,
    count: usize,
}

pub fn write_slice_csv(path: &Path, grid: &SliceGrid) -> io::Result<()> {
    let mut w = writer(path)?;
    writeln!(
        w,
        "# plane={:?} t={} x_min={} x_max={} y_min={} y_max={} nx={} ny={}",
        grid.plane,
        fmt17(grid.time),
        fmt17(grid.x_axis.min),
        fmt17(grid.x_axis.max),
        fmt17(grid.y_axis.min),
        fmt17(grid.y_axis.max),
        grid.x_axis.count,
        grid.y_axis.count
    )?;
    writeln!(w, "x,y,value")?;
    for iy in 0..grid.y_axis.count {
        for ix in 0..grid.x_axis.count {
            let (x, y) = grid.coord(ix, iy);
            writeln!(w, "{},{},{}", fmt17(x), fmt17(y), fmt17(grid.value(ix, iy)))?;
        }
    }
    w.flush()
}

pub fn write_slice_json(path: &Path, grid: &SliceGrid) -> io::Result<()> {
    let nx = grid.x_axis.count;
    let values = grid.values().chunks(nx).map(<[f64]>::to_vec).collect();
    write_json(
        path,
        &SliceDoc {
            plane: grid.plane,
            t: grid.time,
            x: SliceAxis { min: grid.x_axis.min, max: grid.x_axis.max, count: nx },
            y: SliceAxis { min: grid.y_axis.min, max: grid.y_axis.max, count: grid.y_axis.count },
            values,
        },
    )
}
