//! Incremental Bowyer–Watson insertion with ghost triangles.
//!
//! Predicates are exact. When a point is cocircular with a triangle the
//! conflict test falls back to a symbolic perturbation in which lower
//! vertex indices are lifted further below the paraboloid; the effect on
//! any cocircular quadrilateral is that its diagonal is the one incident
//! to the lowest vertex index.

use robust::{incircle, orient2d, Coord};

pub(crate) const GHOST: usize = usize::MAX;
const NONE: usize = usize::MAX;

fn coord(p: [f64; 2]) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

pub(crate) fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    orient2d(coord(a), coord(b), coord(c))
}

fn hilbert_index(order: u32, mut x: u32, mut y: u32) -> u64 {
    let n = 1u32 << order;
    let mut d = 0u64;
    let mut s = n / 2;
    while s > 0 {
        let rx = u32::from(x & s > 0);
        let ry = u32::from(y & s > 0);
        d += u64::from(s) * u64::from(s) * u64::from((3 * rx) ^ ry);
        if ry == 0 {
            if rx == 1 {
                x = n - 1 - x;
                y = n - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        s /= 2;
    }
    d
}

/// Insertion order along a Hilbert curve, ties by index.
fn hilbert_order(pts: &[[f64; 2]]) -> Vec<usize> {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in pts {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
    let scale = 65535.0 / span;
    let mut keyed: Vec<(u64, usize)> = pts
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let qx = ((p[0] - lo[0]) * scale).clamp(0.0, 65535.0) as u32;
            let qy = ((p[1] - lo[1]) * scale).clamp(0.0, 65535.0) as u32;
            (hilbert_index(16, qx, qy), i)
        })
        .collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, i)| i).collect()
}

struct Mesh<'a> {
    pts: &'a [[f64; 2]],
    verts: Vec<[usize; 3]>,
    nbrs: Vec<[usize; 3]>,
    alive: Vec<bool>,
    mark: Vec<u64>,
    stamp: u64,
    free: Vec<usize>,
    last: usize,
}

impl<'a> Mesh<'a> {
    fn edge(&self, t: usize, i: usize) -> (usize, usize) {
        let v = self.verts[t];
        (v[(i + 1) % 3], v[(i + 2) % 3])
    }

    fn ghost_slot(&self, t: usize) -> Option<usize> {
        self.verts[t].iter().position(|&v| v == GHOST)
    }

    fn conflict(&self, t: usize, p: usize) -> bool {
        let v = self.verts[t];
        let pp = self.pts[p];
        if let Some(k) = self.ghost_slot(t) {
            let (a, b) = (self.pts[v[(k + 1) % 3]], self.pts[v[(k + 2) % 3]]);
            let o = orient(a, b, pp);
            if o != 0.0 {
                return o > 0.0;
            }
            // collinear: conflict only strictly inside the hull edge
            let axis = usize::from(a[0] == b[0]);
            let (lo, hi) = if a[axis] < b[axis] { (a[axis], b[axis]) } else { (b[axis], a[axis]) };
            return lo < pp[axis] && pp[axis] < hi;
        }
        let [a, b, c] = v;
        let s = incircle(
            coord(self.pts[a]),
            coord(self.pts[b]),
            coord(self.pts[c]),
            coord(pp),
        );
        if s != 0.0 {
            return s > 0.0;
        }
        let k = (0..3).min_by_key(|&k| v[k]).unwrap();
        if p < v[k] {
            return true;
        }
        let (u, w) = (v[(k + 1) % 3], v[(k + 2) % 3]);
        orient(self.pts[u], self.pts[w], pp) < 0.0
    }

    fn alloc(&mut self, v: [usize; 3]) -> usize {
        if let Some(t) = self.free.pop() {
            self.verts[t] = v;
            self.nbrs[t] = [NONE; 3];
            self.alive[t] = true;
            t
        } else {
            self.verts.push(v);
            self.nbrs.push([NONE; 3]);
            self.alive.push(true);
            self.mark.push(0);
            self.verts.len() - 1
        }
    }

    /// Links unset neighbour slots among `tris` by matching directed edges.
    fn link(&mut self, tris: &[usize]) {
        let mut edges: Vec<(usize, usize, usize, usize)> = Vec::with_capacity(tris.len() * 2);
        for &t in tris {
            for i in 0..3 {
                if self.nbrs[t][i] == NONE {
                    let (u, w) = self.edge(t, i);
                    edges.push((u, w, t, i));
                }
            }
        }
        edges.sort_unstable();
        for &(u, w, t, i) in &edges {
            let j = edges
                .binary_search_by(|e| (e.0, e.1).cmp(&(w, u)))
                .expect("unmatched cavity edge");
            self.nbrs[t][i] = edges[j].2;
        }
    }

    fn new(pts: &'a [[f64; 2]], a: usize, b: usize, c: usize) -> Mesh<'a> {
        let mut m = Mesh {
            pts,
            verts: Vec::new(),
            nbrs: Vec::new(),
            alive: Vec::new(),
            mark: Vec::new(),
            stamp: 0,
            free: Vec::new(),
            last: 0,
        };
        let t0 = m.alloc([a, b, c]);
        let mut all = vec![t0];
        for i in 0..3 {
            let (u, w) = m.edge(t0, i);
            let g = m.alloc([w, u, GHOST]);
            m.nbrs[t0][i] = g;
            m.nbrs[g][2] = t0;
            all.push(g);
        }
        m.link(&all);
        m
    }

    fn locate(&self, p: usize) -> usize {
        let pp = self.pts[p];
        let mut t = self.last;
        if let Some(k) = self.ghost_slot(t) {
            t = self.nbrs[t][k];
        }
        let limit = 4 * self.verts.len() + 16;
        for step in 0..limit {
            if self.ghost_slot(t).is_some() {
                return t;
            }
            let mut next = None;
            for k in 0..3 {
                let i = (k + step) % 3;
                let (u, w) = self.edge(t, i);
                if orient(self.pts[u], self.pts[w], pp) < 0.0 {
                    next = Some(self.nbrs[t][i]);
                    break;
                }
            }
            match next {
                Some(n) => t = n,
                None => return t,
            }
        }
        t
    }

    fn insert(&mut self, p: usize) {
        let mut start = self.locate(p);
        if !self.conflict(start, p) {
            start = (0..self.verts.len())
                .find(|&t| self.alive[t] && self.conflict(t, p))
                .expect("no triangle conflicts with an inserted point");
        }
        self.stamp += 2;
        let (inside, outside) = (self.stamp, self.stamp + 1);
        self.mark[start] = inside;
        let mut stack = vec![start];
        let mut cavity = Vec::new();
        let mut boundary: Vec<(usize, usize, usize)> = Vec::new();
        while let Some(t) = stack.pop() {
            cavity.push(t);
            for i in 0..3 {
                let n = self.nbrs[t][i];
                if self.mark[n] == inside {
                    continue;
                }
                let (u, w) = self.edge(t, i);
                if self.mark[n] != outside && self.conflict(n, p) {
                    self.mark[n] = inside;
                    stack.push(n);
                } else {
                    self.mark[n] = outside;
                    boundary.push((u, w, n));
                }
            }
        }
        for &t in &cavity {
            self.alive[t] = false;
        }
        // reuse in reverse so slot assignment is deterministic
        self.free.extend(cavity.iter().rev());
        let mut created = Vec::with_capacity(boundary.len());
        for &(u, w, outer) in &boundary {
            let t = self.alloc([u, w, p]);
            debug_assert!(
                u == GHOST || w == GHOST || orient(self.pts[u], self.pts[w], self.pts[p]) > 0.0
            );
            self.nbrs[t][2] = outer;
            let j = (0..3)
                .find(|&j| self.edge(outer, j) == (w, u))
                .expect("outer triangle lost its edge");
            self.nbrs[outer][j] = t;
            created.push(t);
        }
        self.link(&created);
        self.last = created[0];
    }

    fn triangles(&self) -> Vec<[usize; 3]> {
        let mut out: Vec<[usize; 3]> = (0..self.verts.len())
            .filter(|&t| self.alive[t] && self.ghost_slot(t).is_none())
            .map(|t| {
                let v = self.verts[t];
                let k = (0..3).min_by_key(|&k| v[k]).unwrap();
                [v[k], v[(k + 1) % 3], v[(k + 2) % 3]]
            })
            .collect();
        out.sort_unstable();
        out
    }
}

/// Delaunay triangles (CCW, smallest index first, sorted) of distinct
/// points, or `None` when all points are collinear or fewer than three.
pub(crate) fn triangulate(pts: &[[f64; 2]]) -> Option<Vec<[usize; 3]>> {
    if pts.len() < 3 {
        return None;
    }
    let order = hilbert_order(pts);
    let (a, b) = (order[0], order[1]);
    let (ci, c) = order
        .iter()
        .enumerate()
        .skip(2)
        .find(|(_, &c)| orient(pts[a], pts[b], pts[c]) != 0.0)
        .map(|(i, &c)| (i, c))?;
    let mut mesh = if orient(pts[a], pts[b], pts[c]) > 0.0 {
        Mesh::new(pts, a, b, c)
    } else {
        Mesh::new(pts, b, a, c)
    };
    for (i, &p) in order.iter().enumerate().skip(2) {
        if i != ci {
            mesh.insert(p);
        }
    }
    Some(mesh.triangles())
}
