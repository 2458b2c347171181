//! Cloud file formats.
//!
//! `xyz_ascii`: one point per line, `x y z [intensity] [r g b]` (3, 4, 6
//! or 7 columns, constant per file), `#` comments.
//!
//! `sspc_binary`: little-endian, 56-byte header (`SSPC`, u16 version,
//! u16 field mask, u64 count, 32-byte frame tag, i64 epoch or -1) then
//! per point 3×f64, optional f32 intensity, optional 3×u8 rgb, optional
//! u8 class.

use super::{Classification, Frame, Point3, PointCloud};
use crate::error::{Error, Result};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

const MAGIC: &[u8; 4] = b"SSPC";
const VERSION: u16 = 1;
const TAG_LEN: usize = 32;
const HEADER_LEN: usize = 4 + 2 + 2 + 8 + TAG_LEN + 8;

const HAS_INTENSITY: u16 = 1 << 0;
const HAS_RGB: u16 = 1 << 1;
const HAS_CLASS: u16 = 1 << 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloudFormat {
    XyzAscii,
    SspcBinary,
}

impl CloudFormat {
    /// `.sspc` is binary, anything else is treated as xyz text.
    pub fn from_path(path: &Path) -> CloudFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("sspc") => CloudFormat::SspcBinary,
            _ => CloudFormat::XyzAscii,
        }
    }
}

impl FromStr for CloudFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<CloudFormat> {
        match s {
            "xyz_ascii" | "xyz" => Ok(CloudFormat::XyzAscii),
            "sspc_binary" | "sspc" => Ok(CloudFormat::SspcBinary),
            _ => Err(Error::InvalidArgument(format!(
                "unknown cloud format '{s}' (expected xyz_ascii or sspc_binary)"
            ))),
        }
    }
}

pub fn read_cloud(path: impl AsRef<Path>, format: CloudFormat) -> Result<PointCloud> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut cloud = match format {
        CloudFormat::XyzAscii => read_xyz(path, BufReader::new(file))?,
        CloudFormat::SspcBinary => read_sspc(path, BufReader::new(file))?,
    };
    cloud.source = path.display().to_string();
    Ok(cloud)
}

pub fn write_cloud(cloud: &PointCloud, path: impl AsRef<Path>, format: CloudFormat) -> Result<()> {
    let path = path.as_ref();
    let mask = field_mask(cloud)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    match format {
        CloudFormat::XyzAscii => write_xyz(cloud, mask, &mut w),
        CloudFormat::SspcBinary => write_sspc(cloud, mask, &mut w),
    }
    .and_then(|_| w.flush())
    .map_err(|e| Error::io(path, e))
}

/// Optional attributes must be present on every point or on none.
fn field_mask(cloud: &PointCloud) -> Result<u16> {
    let n = cloud.len();
    let with_intensity = cloud.points.iter().filter(|p| p.intensity.is_some()).count();
    let with_rgb = cloud.points.iter().filter(|p| p.color.is_some()).count();
    if (with_intensity != 0 && with_intensity != n) || (with_rgb != 0 && with_rgb != n) {
        return Err(Error::InvalidArgument(
            "cloud mixes points with and without intensity/colour".into(),
        ));
    }
    let mut mask = 0;
    if n > 0 && with_intensity == n {
        mask |= HAS_INTENSITY;
    }
    if n > 0 && with_rgb == n {
        mask |= HAS_RGB;
    }
    if cloud
        .points
        .iter()
        .any(|p| p.class != Classification::Unassigned)
    {
        mask |= HAS_CLASS;
    }
    Ok(mask)
}

fn read_xyz(path: &Path, reader: impl BufRead) -> Result<PointCloud> {
    let mut points = Vec::new();
    let mut columns: Option<usize> = None;
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !matches!(fields.len(), 3 | 4 | 6 | 7) {
            return Err(Error::parse(
                path,
                "line",
                lineno,
                format!("expected 3, 4, 6 or 7 columns, found {}", fields.len()),
            ));
        }
        match columns {
            None => columns = Some(fields.len()),
            Some(c) if c != fields.len() => {
                return Err(Error::parse(
                    path,
                    "line",
                    lineno,
                    format!("column count changed from {c} to {}", fields.len()),
                ))
            }
            _ => {}
        }
        let real = |s: &str, what: &str| -> Result<f64> {
            let v: f64 = s
                .parse()
                .map_err(|_| Error::parse(path, "line", lineno, format!("bad {what} '{s}'")))?;
            if !v.is_finite() {
                return Err(Error::parse(path, "line", lineno, format!("non-finite {what}")));
            }
            Ok(v)
        };
        let byte = |s: &str| -> Result<u8> {
            s.parse()
                .map_err(|_| Error::parse(path, "line", lineno, format!("bad colour value '{s}'")))
        };
        let mut p = Point3::new(
            real(fields[0], "x")?,
            real(fields[1], "y")?,
            real(fields[2], "z")?,
        );
        let rgb_at = match fields.len() {
            4 | 7 => {
                let v = real(fields[3], "intensity")?;
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::parse(
                        path,
                        "line",
                        lineno,
                        format!("intensity {v} outside [0, 1]"),
                    ));
                }
                p.intensity = Some(v as f32);
                4
            }
            _ => 3,
        };
        if fields.len() >= 6 {
            p.color = Some([
                byte(fields[rgb_at])?,
                byte(fields[rgb_at + 1])?,
                byte(fields[rgb_at + 2])?,
            ]);
        }
        points.push(p);
    }
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("scan")
        .to_string();
    Ok(PointCloud {
        points,
        frame: Frame::Local(stem),
        epoch: None,
        source: String::new(),
    })
}

fn write_xyz(cloud: &PointCloud, mask: u16, w: &mut impl Write) -> std::io::Result<()> {
    for p in &cloud.points {
        write!(w, "{} {} {}", p.x, p.y, p.z)?;
        if mask & HAS_INTENSITY != 0 {
            write!(w, " {}", p.intensity.unwrap_or(0.0))?;
        }
        if mask & HAS_RGB != 0 {
            let [r, g, b] = p.color.unwrap_or_default();
            write!(w, " {r} {g} {b}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

fn write_sspc(cloud: &PointCloud, mask: u16, w: &mut impl Write) -> std::io::Result<()> {
    let tag = cloud.frame.tag();
    if tag.len() > TAG_LEN {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            format!("frame tag '{tag}' longer than {TAG_LEN} bytes"),
        ));
    }
    let mut tag_bytes = [0u8; TAG_LEN];
    tag_bytes[..tag.len()].copy_from_slice(tag.as_bytes());

    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&mask.to_le_bytes())?;
    w.write_all(&(cloud.len() as u64).to_le_bytes())?;
    w.write_all(&tag_bytes)?;
    w.write_all(&cloud.epoch.unwrap_or(-1).to_le_bytes())?;
    for p in &cloud.points {
        w.write_all(&p.x.to_le_bytes())?;
        w.write_all(&p.y.to_le_bytes())?;
        w.write_all(&p.z.to_le_bytes())?;
        if mask & HAS_INTENSITY != 0 {
            w.write_all(&p.intensity.unwrap_or(0.0).to_le_bytes())?;
        }
        if mask & HAS_RGB != 0 {
            w.write_all(&p.color.unwrap_or_default())?;
        }
        if mask & HAS_CLASS != 0 {
            w.write_all(&[p.class.code()])?;
        }
    }
    Ok(())
}

fn read_sspc(path: &Path, mut r: impl Read) -> Result<PointCloud> {
    let mut data = Vec::new();
    r.read_to_end(&mut data).map_err(|e| Error::io(path, e))?;
    if data.is_empty() {
        return Ok(PointCloud::default());
    }
    let header_err = |key: &str, message: &str| Error::Header {
        path: path.to_path_buf(),
        key: key.to_string(),
        message: message.to_string(),
    };
    if data.len() < HEADER_LEN {
        return Err(header_err("header", "file shorter than the 56-byte header"));
    }
    if &data[0..4] != MAGIC {
        return Err(header_err("magic", "expected 'SSPC'"));
    }
    let version = u16::from_le_bytes([data[4], data[5]]);
    if version != VERSION {
        return Err(header_err("version", &format!("unsupported version {version}")));
    }
    let mask = u16::from_le_bytes([data[6], data[7]]);
    if mask & !(HAS_INTENSITY | HAS_RGB | HAS_CLASS) != 0 {
        return Err(header_err("field_mask", &format!("unknown bits in {mask:#06x}")));
    }
    let count = u64::from_le_bytes(data[8..16].try_into().unwrap()) as usize;
    let tag_raw = &data[16..16 + TAG_LEN];
    let tag_end = tag_raw.iter().position(|&b| b == 0).unwrap_or(TAG_LEN);
    let tag = std::str::from_utf8(&tag_raw[..tag_end])
        .map_err(|_| header_err("frame", "frame tag is not UTF-8"))?;
    let frame = if tag.is_empty() {
        Frame::default()
    } else {
        Frame::from_tag(tag).ok_or_else(|| header_err("frame", &format!("bad frame tag '{tag}'")))?
    };
    let epoch = i64::from_le_bytes(data[48..56].try_into().unwrap());

    let record_len = 24
        + if mask & HAS_INTENSITY != 0 { 4 } else { 0 }
        + if mask & HAS_RGB != 0 { 3 } else { 0 }
        + if mask & HAS_CLASS != 0 { 1 } else { 0 };
    let body = &data[HEADER_LEN..];
    if body.len() != count.saturating_mul(record_len) {
        let complete = body.len() / record_len;
        return Err(Error::parse(
            path,
            "record",
            complete.min(count),
            format!(
                "body holds {} bytes, header declares {count} records of {record_len} bytes",
                body.len()
            ),
        ));
    }

    let mut points = Vec::with_capacity(count);
    for (i, rec) in body.chunks_exact(record_len).enumerate() {
        let f = |o: usize| f64::from_le_bytes(rec[o..o + 8].try_into().unwrap());
        let mut p = Point3::new(f(0), f(8), f(16));
        if !p.is_finite() {
            return Err(Error::parse(path, "record", i, "non-finite coordinate"));
        }
        let mut o = 24;
        if mask & HAS_INTENSITY != 0 {
            p.intensity = Some(f32::from_le_bytes(rec[o..o + 4].try_into().unwrap()));
            o += 4;
        }
        if mask & HAS_RGB != 0 {
            p.color = Some([rec[o], rec[o + 1], rec[o + 2]]);
            o += 3;
        }
        if mask & HAS_CLASS != 0 {
            p.class = Classification::from_code(rec[o]).ok_or_else(|| {
                Error::parse(path, "record", i, format!("unknown class code {}", rec[o]))
            })?;
        }
        points.push(p);
    }
    Ok(PointCloud {
        points,
        frame,
        epoch: (epoch != -1).then_some(epoch),
        source: String::new(),
    })
}
