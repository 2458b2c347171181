//! ESRI ASCII grid: six header lines (`ncols`, `nrows`, `xllcorner`,
//! `yllcorner`, `cellsize`, `NODATA_value`) then rows top first.

use super::grid::{GridSpec, RasterGrid, NODATA};
use crate::error::{Error, Result};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

const KEYS: [&str; 6] = [
    "ncols",
    "nrows",
    "xllcorner",
    "yllcorner",
    "cellsize",
    "NODATA_value",
];

pub fn write_asc(grid: &RasterGrid, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let spec = grid.spec();
    let write = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(w, "ncols {}", spec.ncols)?;
        writeln!(w, "nrows {}", spec.nrows)?;
        writeln!(w, "xllcorner {}", spec.origin_x)?;
        writeln!(w, "yllcorner {}", spec.origin_y)?;
        writeln!(w, "cellsize {}", spec.cell)?;
        writeln!(w, "NODATA_value {}", NODATA)?;
        for row in (0..spec.nrows).rev() {
            let mut first = true;
            for col in 0..spec.ncols {
                if !first {
                    w.write_all(b" ")?;
                }
                first = false;
                write!(w, "{}", grid.raw(row, col))?;
            }
            writeln!(w)?;
        }
        w.flush()
    };
    write(&mut w).map_err(|e| Error::io(path, e))
}

pub fn read_asc(path: impl AsRef<Path>) -> Result<RasterGrid> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    let header_err = |key: &str, message: String| Error::Header {
        path: path.to_path_buf(),
        key: key.to_string(),
        message,
    };

    let mut header = [0.0f64; 6];
    for (slot, key) in header.iter_mut().zip(KEYS) {
        let (_, line) = lines
            .next()
            .ok_or_else(|| header_err(key, "missing header line".into()))?;
        let mut parts = line.split_whitespace();
        let found = parts.next().unwrap_or("");
        if !found.eq_ignore_ascii_case(key) {
            return Err(header_err(key, format!("expected key '{key}', found '{found}'")));
        }
        let value = parts
            .next()
            .ok_or_else(|| header_err(key, "missing value".into()))?;
        *slot = value
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| header_err(key, format!("bad value '{value}'")))?;
        if parts.next().is_some() {
            return Err(header_err(key, "trailing text after value".into()));
        }
    }
    let count = |key: &str, v: f64| -> Result<usize> {
        if v >= 1.0 && v.fract() == 0.0 {
            Ok(v as usize)
        } else {
            Err(header_err(key, format!("must be a positive integer, got {v}")))
        }
    };
    let spec = GridSpec {
        ncols: count("ncols", header[0])?,
        nrows: count("nrows", header[1])?,
        origin_x: header[2],
        origin_y: header[3],
        cell: header[4],
    };
    if !(spec.cell > 0.0) {
        return Err(header_err("cellsize", format!("must be > 0, got {}", spec.cell)));
    }
    let file_nodata = header[5];

    let mut values = vec![NODATA; spec.len()];
    let mut row_from_top = 0;
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if row_from_top >= spec.nrows {
            return Err(Error::parse(path, "line", i + 1, "more rows than nrows"));
        }
        let row = spec.nrows - 1 - row_from_top;
        let mut n = 0;
        for tok in line.split_whitespace() {
            if n >= spec.ncols {
                return Err(Error::parse(path, "line", i + 1, "more values than ncols"));
            }
            let v: f64 = tok
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::parse(path, "line", i + 1, format!("bad value '{tok}'")))?;
            values[row * spec.ncols + n] = if v == file_nodata { NODATA } else { v };
            n += 1;
        }
        if n != spec.ncols {
            return Err(Error::parse(
                path,
                "line",
                i + 1,
                format!("expected {} values, found {n}", spec.ncols),
            ));
        }
        row_from_top += 1;
    }
    if row_from_top != spec.nrows {
        return Err(Error::parse(
            path,
            "line",
            text.lines().count(),
            format!("expected {} rows, found {row_from_top}", spec.nrows),
        ));
    }
    RasterGrid::new(spec, values)
}
