//! 2.5D Delaunay TIN of a road surface, z queries and OBJ export.

mod delaunay;

use crate::cloud::{Point3, PointCloud};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use delaunay::{orient, triangulate};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// Points closer than this in xy are merged, keeping the lowest z.
pub const XY_DUPLICATE_TOLERANCE: f64 = 1e-9;

/// Triangulated surface over the xy projection of its vertices.
///
/// Triangles are counter-clockwise, list their smallest vertex index
/// first and are sorted, so output is independent of construction order.
#[derive(Debug, Clone)]
pub struct TriangulatedSurface {
    vertices: Vec<Point3>,
    triangles: Vec<[usize; 3]>,
    index: BucketIndex,
}

#[derive(Debug, Clone)]
struct BucketIndex {
    lo: [f64; 2],
    hi: [f64; 2],
    size: [f64; 2],
    dims: [usize; 2],
    offsets: Vec<usize>,
    items: Vec<usize>,
}

impl BucketIndex {
    fn cell(&self, x: f64, y: f64) -> [usize; 2] {
        let c = |k: usize, v: f64| {
            (((v - self.lo[k]) / self.size[k]).floor().max(0.0) as usize).min(self.dims[k] - 1)
        };
        [c(0, x), c(1, y)]
    }

    fn build(vertices: &[Point3], triangles: &[[usize; 3]]) -> BucketIndex {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in vertices {
            lo = [lo[0].min(p.x), lo[1].min(p.y)];
            hi = [hi[0].max(p.x), hi[1].max(p.y)];
        }
        let side = ((triangles.len() as f64 / 2.0).sqrt().ceil() as usize).max(1);
        let dims = [side, side];
        let size = [
            ((hi[0] - lo[0]) / side as f64).max(f64::MIN_POSITIVE),
            ((hi[1] - lo[1]) / side as f64).max(f64::MIN_POSITIVE),
        ];
        let mut idx = BucketIndex {
            lo,
            hi,
            size,
            dims,
            offsets: vec![0; side * side + 1],
            items: Vec::new(),
        };
        let ranges: Vec<([usize; 2], [usize; 2])> = triangles
            .iter()
            .map(|t| {
                let xs = t.map(|i| vertices[i].x);
                let ys = t.map(|i| vertices[i].y);
                let min = |v: [f64; 3]| v[0].min(v[1]).min(v[2]);
                let max = |v: [f64; 3]| v[0].max(v[1]).max(v[2]);
                (idx.cell(min(xs), min(ys)), idx.cell(max(xs), max(ys)))
            })
            .collect();
        for (a, b) in &ranges {
            for r in a[1]..=b[1] {
                for c in a[0]..=b[0] {
                    idx.offsets[r * side + c + 1] += 1;
                }
            }
        }
        for i in 0..side * side {
            idx.offsets[i + 1] += idx.offsets[i];
        }
        let mut fill = idx.offsets.clone();
        idx.items = vec![0; idx.offsets[side * side]];
        for (t, (a, b)) in ranges.iter().enumerate() {
            for r in a[1]..=b[1] {
                for c in a[0]..=b[0] {
                    let k = r * side + c;
                    idx.items[fill[k]] = t;
                    fill[k] += 1;
                }
            }
        }
        idx
    }

    fn candidates(&self, x: f64, y: f64) -> &[usize] {
        if !(x >= self.lo[0] && x <= self.hi[0] && y >= self.lo[1] && y <= self.hi[1]) {
            return &[];
        }
        let [c, r] = self.cell(x, y);
        let k = r * self.dims[0] + c;
        &self.items[self.offsets[k]..self.offsets[k + 1]]
    }
}

fn xy(p: &Point3) -> [f64; 2] {
    [p.x, p.y]
}

/// Merges xy-duplicates (transitively, within the tolerance) keeping the
/// lowest-z point of each group; groups keep first-occurrence order.
fn merge_xy_duplicates(points: &[Point3], tol: f64) -> Vec<Point3> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut by_x: Vec<usize> = (0..n).collect();
    by_x.sort_by(|&a, &b| points[a].x.total_cmp(&points[b].x).then(a.cmp(&b)));
    for (k, &i) in by_x.iter().enumerate() {
        for &j in &by_x[k + 1..] {
            if points[j].x - points[i].x > tol {
                break;
            }
            let (dx, dy) = (points[j].x - points[i].x, points[j].y - points[i].y);
            if dx * dx + dy * dy <= tol * tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut best: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match best[r] {
            Some(b) if points[b].z <= points[i].z => {}
            _ => best[r] = Some(i),
        }
    }
    (0..n)
        .filter(|&i| parent[i] == i)
        .map(|r| points[best[r].unwrap()].clone())
        .collect()
}

/// Delaunay triangulation of the cloud's xy projection, carrying z.
///
/// Vertices are the input points after merging xy-duplicates. On
/// cocircular configurations the diagonal incident to the lowest vertex
/// index is chosen (a unit square 0,1,2,3 gets diagonal 0–2).
pub fn delaunay(cloud: &PointCloud) -> Result<TriangulatedSurface> {
    if let Some(i) = cloud.points.iter().position(|p| !p.is_finite()) {
        return Err(Error::InvalidArgument(format!("point {i} has non-finite coordinates")));
    }
    let vertices = merge_xy_duplicates(&cloud.points, XY_DUPLICATE_TOLERANCE);
    let pts: Vec<[f64; 2]> = vertices.iter().map(xy).collect();
    let triangles = triangulate(&pts).ok_or_else(|| {
        Error::Degenerate(format!(
            "input: {} usable points, need ≥ 3 with non-collinear xy",
            vertices.len()
        ))
    })?;
    let index = BucketIndex::build(&vertices, &triangles);
    Ok(TriangulatedSurface {
        vertices,
        triangles,
        index,
    })
}

impl TriangulatedSurface {
    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Summed xy area of all triangles.
    pub fn area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|i| xy(&self.vertices[i]));
                0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
            })
            .collect::<CompensatedSum>()
            .value()
    }

    fn edge_z(&self, u: usize, w: usize, x: f64, y: f64) -> f64 {
        let (u, w) = (u.min(w), u.max(w));
        let (a, b) = (&self.vertices[u], &self.vertices[w]);
        let (ex, ey) = (b.x - a.x, b.y - a.y);
        let t = ((x - a.x) * ex + (y - a.y) * ey) / (ex * ex + ey * ey);
        a.z + t * (b.z - a.z)
    }

    /// Linear z at `(x, y)`, or `None` outside the hull.
    ///
    /// Vertices return their own z; points on an edge interpolate along
    /// that edge only, so both adjacent triangles agree.
    pub fn interpolate_z(&self, x: f64, y: f64) -> Option<f64> {
        let q = [x, y];
        for &t in self.index.candidates(x, y) {
            let v = self.triangles[t];
            let p = v.map(|i| xy(&self.vertices[i]));
            let o = [orient(p[1], p[2], q), orient(p[2], p[0], q), orient(p[0], p[1], q)];
            if o.iter().any(|&s| s < 0.0) {
                continue;
            }
            let zeros: Vec<usize> = (0..3).filter(|&k| o[k] == 0.0).collect();
            return Some(match zeros.as_slice() {
                [] => {
                    let [a, b, c] = v.map(|i| &self.vertices[i]);
                    let (bx, by, cx, cy) = (b.x - a.x, b.y - a.y, c.x - a.x, c.y - a.y);
                    let (qx, qy) = (x - a.x, y - a.y);
                    let d = bx * cy - cx * by;
                    let lb = (qx * cy - cx * qy) / d;
                    let lc = (bx * qy - qx * by) / d;
                    a.z + lb * (b.z - a.z) + lc * (c.z - a.z)
                }
                [k] => self.edge_z(v[(k + 1) % 3], v[(k + 2) % 3], x, y),
                _ => {
                    let k = (0..3).find(|k| !zeros.contains(k)).unwrap();
                    self.vertices[v[k]].z
                }
            });
        }
        None
    }
}

/// Writes `v x y z` lines then 1-based `f i j k` lines.
pub fn export_obj(tin: &TriangulatedSurface, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut s = String::with_capacity(40 * (tin.vertices.len() + tin.triangles.len()));
    for p in &tin.vertices {
        let _ = writeln!(s, "v {:.9} {:.9} {:.9}", p.x, p.y, p.z);
    }
    for t in &tin.triangles {
        let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    fs::write(path, s).map_err(|e| Error::io(path, e))
}

/// Vertices and 0-based triangular faces read from an OBJ file.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
}

/// Reads `v` and triangular `f` records; other records are skipped.
pub fn read_obj(path: impl AsRef<Path>) -> Result<ObjMesh> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut mesh = ObjMesh {
        vertices: Vec::new(),
        faces: Vec::new(),
    };
    for (ln, line) in text.lines().enumerate() {
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("v") => {
                let v: Vec<f64> = tok
                    .take(3)
                    .map(|t| t.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::parse(path, "line", ln + 1, e.to_string()))?;
                if v.len() != 3 {
                    return Err(Error::parse(path, "line", ln + 1, "vertex needs 3 coordinates"));
                }
                mesh.vertices.push([v[0], v[1], v[2]]);
            }
            Some("f") => {
                let f: Vec<usize> = tok
                    .map(|t| t.split('/').next().unwrap_or("").parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::parse(path, "line", ln + 1, e.to_string()))?;
                if f.len() != 3 || f.iter().any(|&i| i == 0 || i > mesh.vertices.len()) {
                    return Err(Error::parse(
                        path,
                        "line",
                        ln + 1,
                        "face needs 3 valid 1-based vertex indices",
                    ));
                }
                mesh.faces.push([f[0] - 1, f[1] - 1, f[2] - 1]);
            }
            _ => {}
        }
    }
    Ok(mesh)
}
