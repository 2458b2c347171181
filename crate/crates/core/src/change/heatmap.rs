//! Binary PPM (P6) heatmaps with a plain-text legend sidecar.

use super::ramp::{ColorRamp, NODATA_COLOR};
use super::ChangeMap;
use crate::error::{Error, Result};
use crate::raster::NODATA;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PpmImage {
    pub width: usize,
    pub height: usize,
    /// Row-major, top row first.
    pub pixels: Vec<[u8; 3]>,
}

impl PpmImage {
    pub fn pixel(&self, row: usize, col: usize) -> [u8; 3] {
        self.pixels[row * self.width + col]
    }
}

/// `map.ppm` → `map.ppm.legend.txt`.
pub fn legend_path(image: &Path) -> PathBuf {
    let mut s = image.as_os_str().to_owned();
    s.push(".legend.txt");
    PathBuf::from(s)
}

/// Writes the change map as a P6 image, one pixel per cell, north up.
/// Values are scaled by `range` and clamped; nodata cells are black.
pub fn export_heatmap(
    map: &ChangeMap,
    path: impl AsRef<Path>,
    ramp: &dyn ColorRamp,
    range: f64,
) -> Result<()> {
    let path = path.as_ref();
    if !(range > 0.0) || !range.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "heatmap range must be a positive finite number, got {range}"
        )));
    }
    let g = &map.grid;
    let (w, h) = (g.ncols(), g.nrows());
    let mut buf = format!("P6\n{w} {h}\n255\n").into_bytes();
    buf.reserve(w * h * 3);
    for row in (0..h).rev() {
        for col in 0..w {
            let v = g.raw(row, col);
            let rgb = if v == NODATA {
                NODATA_COLOR
            } else {
                ramp.color((v / range).clamp(-1.0, 1.0))
            };
            buf.extend_from_slice(&rgb);
        }
    }
    fs::write(path, buf).map_err(|e| Error::io(path, e))?;

    let legend = legend_path(path);
    let mut f = fs::File::create(&legend).map_err(|e| Error::io(&legend, e))?;
    let text = format!(
        "range_m = {range}\nramp = {}\nformula = {}\nnodata_color = {} {} {}\nepoch_a = {}\nepoch_b = {}\n",
        ramp.name(),
        ramp.formula(),
        NODATA_COLOR[0],
        NODATA_COLOR[1],
        NODATA_COLOR[2],
        map.epoch_a_id,
        map.epoch_b_id,
    );
    f.write_all(text.as_bytes()).map_err(|e| Error::io(&legend, e))
}

fn header_token<'a>(data: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    loop {
        while *pos < data.len() && data[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < data.len() && data[*pos] == b'#' {
            while *pos < data.len() && data[*pos] != b'\n' {
                *pos += 1;
            }
        } else {
            break;
        }
    }
    let start = *pos;
    while *pos < data.len() && !data[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    (start < *pos).then(|| &data[start..*pos])
}

/// Reads an 8-bit P6 image.
pub fn read_ppm(path: impl AsRef<Path>) -> Result<PpmImage> {
    let path = path.as_ref();
    let data = fs::read(path).map_err(|e| Error::io(path, e))?;
    let herr = |key: &str, msg: &str| Error::Header {
        path: path.to_path_buf(),
        key: key.to_string(),
        message: msg.to_string(),
    };
    let mut pos = 0;
    if header_token(&data, &mut pos) != Some(b"P6") {
        return Err(herr("magic", "expected P6"));
    }
    let mut num = |key: &str| -> Result<usize> {
        header_token(&data, &mut pos)
            .and_then(|t| std::str::from_utf8(t).ok())
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| herr(key, "expected a non-negative integer"))
    };
    let width = num("width")?;
    let height = num("height")?;
    let maxval = num("maxval")?;
    if maxval != 255 {
        return Err(herr("maxval", "only 8-bit images are supported"));
    }
    pos += 1;
    let body = data.get(pos..).unwrap_or(&[]);
    if body.len() != width * height * 3 {
        return Err(Error::parse(
            path,
            "pixel",
            body.len() / 3,
            format!("expected {} bytes of pixel data, found {}", width * height * 3, body.len()),
        ));
    }
    let pixels = body.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
    Ok(PpmImage {
        width,
        height,
        pixels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::change::BlueWhiteRed;
    use crate::raster::{GridSpec, RasterGrid};

    #[test]
    fn north_up_layout_and_legend() {
        let spec = GridSpec {
            origin_x: 0.0,
            origin_y: 0.0,
            cell: 1.0,
            ncols: 2,
            nrows: 2,
        };
        // row 0 is south
        let grid = RasterGrid::new(spec, vec![-0.02, 0.0, 0.05, NODATA]).unwrap();
        let map = ChangeMap {
            grid,
            epoch_a_id: "a".into(),
            epoch_b_id: "b".into(),
        };
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.ppm");
        export_heatmap(&map, &p, &BlueWhiteRed, 0.02).unwrap();
        let img = read_ppm(&p).unwrap();
        assert_eq!((img.width, img.height), (2, 2));
        assert_eq!(img.pixel(0, 0), [255, 0, 0]);
        assert_eq!(img.pixel(0, 1), [0, 0, 0]);
        assert_eq!(img.pixel(1, 0), [0, 0, 255]);
        assert_eq!(img.pixel(1, 1), [255, 255, 255]);
        let legend = fs::read_to_string(dir.path().join("m.ppm.legend.txt")).unwrap();
        assert!(legend.contains("range_m = 0.02"));
        assert!(legend.contains("ramp = blue-white-red"));
        assert!(legend.contains("nodata_color = 0 0 0"));
    }

    #[test]
    fn rejects_bad_range_and_bad_files() {
        let spec = GridSpec {
            origin_x: 0.0,
            origin_y: 0.0,
            cell: 1.0,
            ncols: 1,
            nrows: 1,
        };
        let map = ChangeMap {
            grid: RasterGrid::new(spec, vec![0.0]).unwrap(),
            epoch_a_id: "a".into(),
            epoch_b_id: "b".into(),
        };
        let dir = tempfile::tempdir().unwrap();
        assert!(export_heatmap(&map, dir.path().join("x.ppm"), &BlueWhiteRed, 0.0).is_err());
        let bad = dir.path().join("bad.ppm");
        fs::write(&bad, b"P3\n1 1\n255\n0 0 0\n").unwrap();
        assert!(read_ppm(&bad).is_err());
        fs::write(&bad, b"P6\n2 1\n255\n\x00\x00\x00").unwrap();
        assert!(read_ppm(&bad).is_err());
    }
}
