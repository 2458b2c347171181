use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use survscan::tin::{delaunay, export_obj, read_obj, TriangulatedSurface};
use survscan::PointCloud;

fn orient_exact(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    robust::orient2d(
        robust::Coord { x: a[0], y: a[1] },
        robust::Coord { x: b[0], y: b[1] },
        robust::Coord { x: c[0], y: c[1] },
    )
}

fn xy(t: &TriangulatedSurface, i: usize) -> [f64; 2] {
    let p = &t.vertices()[i];
    [p.x, p.y]
}

/// Circumcircle test in translated coordinates with a relative tolerance.
fn strictly_inside(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let (ax, ay) = (a[0] - d[0], a[1] - d[1]);
    let (bx, by) = (b[0] - d[0], b[1] - d[1]);
    let (cx, cy) = (c[0] - d[0], c[1] - d[1]);
    let (a2, b2, c2) = (ax * ax + ay * ay, bx * bx + by * by, cx * cx + cy * cy);
    let det = ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
    let scale = a2.max(b2).max(c2);
    det > 1e-9 * scale * scale
}

/// Andrew's monotone chain, keeping collinear boundary points.
fn hull_size(mut pts: Vec<[f64; 2]>) -> usize {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && orient_exact(lower[lower.len() - 2], lower[lower.len() - 1], p) < 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && orient_exact(upper[upper.len() - 2], upper[upper.len() - 1], p) < 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    let mut all = lower;
    all.extend(upper);
    all.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    all.dedup();
    all.len()
}

fn hull_area(mut pts: Vec<[f64; 2]>) -> f64 {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut h: Vec<[f64; 2]> = Vec::new();
    for pass in 0..2 {
        let start = h.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while h.len() >= start + 2 && orient_exact(h[h.len() - 2], h[h.len() - 1], p) <= 0.0 {
                h.pop();
            }
            h.push(p);
        }
        h.pop();
    }
    let n = h.len();
    (0..n)
        .map(|i| {
            let (a, b) = (h[i], h[(i + 1) % n]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
        / 2.0
}

fn check_delaunay(t: &TriangulatedSurface) {
    let n = t.vertices().len();
    for tri in t.triangles() {
        let [a, b, c] = tri.map(|i| xy(t, i));
        assert!(orient_exact(a, b, c) > 0.0, "triangle {tri:?} not CCW");
        for v in 0..n {
            if tri.contains(&v) {
                continue;
            }
            assert!(!strictly_inside(a, b, c, xy(t, v)), "vertex {v} inside circumcircle of {tri:?}");
        }
    }
    let pts: Vec<[f64; 2]> = (0..n).map(|i| xy(t, i)).collect();
    let h = hull_size(pts);
    assert_eq!(t.triangles().len(), 2 * n - h - 2, "Euler relation");
}

fn random_cloud(rng: &mut ChaCha8Rng, n: usize, offset: f64) -> PointCloud {
    PointCloud::from_xyz((0..n).map(|_| {
        (
            offset + rng.gen_range(0.0..10.0),
            offset + rng.gen_range(0.0..10.0),
            rng.gen_range(0.0..1.0),
        )
    }))
}

#[test]
fn random_instances_are_delaunay() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let n = rng.gen_range(3..=500);
        let t = delaunay(&random_cloud(&mut rng, n, 0.0)).unwrap();
        check_delaunay(&t);
    }
}

#[test]
fn two_hundred_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    let t = delaunay(&random_cloud(&mut rng, 200, 0.0)).unwrap();
    assert_eq!(t.vertices().len(), 200);
    check_delaunay(&t);
}

#[test]
fn lattice_with_cocircular_quads() {
    for offset in [0.0, 4.5e6] {
        let pts = (0..20).flat_map(|i| (0..15).map(move |j| (offset + i as f64 * 0.01, offset + j as f64 * 0.01, 0.0)));
        let t = delaunay(&PointCloud::from_xyz(pts)).unwrap();
        assert_eq!(t.triangles().len(), 2 * 19 * 14);
        check_delaunay(&t);
    }
}

#[test]
fn points_on_a_circle() {
    let pts: Vec<_> = (0..24)
        .map(|k| {
            let a = k as f64 * std::f64::consts::TAU / 24.0;
            (a.cos(), a.sin(), 0.0)
        })
        .chain(std::iter::once((0.0, 0.0, 0.0)))
        .collect();
    let t = delaunay(&PointCloud::from_xyz(pts)).unwrap();
    check_delaunay(&t);
}

#[test]
fn collinear_runs_on_the_hull() {
    let mut pts: Vec<_> = (0..10).map(|i| (i as f64, 0.0, 0.0)).collect();
    pts.extend((0..10).map(|i| (i as f64, 5.0, 0.0)));
    pts.push((4.3, 2.2, 0.0));
    let t = delaunay(&PointCloud::from_xyz(pts)).unwrap();
    check_delaunay(&t);
}

#[test]
fn area_matches_hull_area() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let c = random_cloud(&mut rng, 300, 0.0);
        let t = delaunay(&c).unwrap();
        let pts: Vec<_> = c.points.iter().map(|p| [p.x, p.y]).collect();
        let h = hull_area(pts);
        assert!((t.area() - h).abs() <= 1e-9 * h);
    }
}

#[test]
fn plane_is_reproduced() {
    let plane = |x: f64, y: f64| 2.0 * x + 3.0 * y + 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let c = PointCloud::from_xyz((0..400).map(|_| {
        let (x, y) = (rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0));
        (x, y, plane(x, y))
    }));
    let t = delaunay(&c).unwrap();
    let mut hits = 0;
    for _ in 0..2000 {
        let (x, y) = (rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0));
        if let Some(z) = t.interpolate_z(x, y) {
            hits += 1;
            assert!((z - plane(x, y)).abs() < 1e-9);
        }
    }
    assert!(hits > 1500);
    for p in t.vertices() {
        assert_eq!(t.interpolate_z(p.x, p.y), Some(p.z));
    }
}

#[test]
fn edges_are_continuous() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let c = random_cloud(&mut rng, 150, 0.0);
    let t = delaunay(&c).unwrap();
    let mut uses = std::collections::HashMap::new();
    for tri in t.triangles() {
        for k in 0..3 {
            let (u, w) = (tri[k], tri[(k + 1) % 3]);
            *uses.entry((u.min(w), u.max(w))).or_insert(0) += 1;
        }
    }
    for tri in t.triangles() {
        for k in 0..3 {
            let (u, w) = (tri[k], tri[(k + 1) % 3]);
            let (a, b) = (&t.vertices()[u], &t.vertices()[w]);
            let (mx, my) = ((a.x + b.x) / 2.0, (a.y + b.y) / 2.0);
            let Some(z) = t.interpolate_z(mx, my) else {
                // a rounded midpoint may fall just outside a hull edge
                assert_eq!(uses[&(u.min(w), u.max(w))], 1);
                continue;
            };
            assert!((z - (a.z + b.z) / 2.0).abs() < 1e-12);
            // nudged to either side lands in the two adjacent triangles
            let (nx, ny) = (-(b.y - a.y) * 1e-13, (b.x - a.x) * 1e-13);
            for s in [-1.0, 1.0] {
                if let Some(zs) = t.interpolate_z(mx + s * nx, my + s * ny) {
                    assert!((zs - z).abs() < 1e-9);
                }
            }
        }
    }
}

#[test]
fn outside_hull_is_absent() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let t = delaunay(&random_cloud(&mut rng, 50, 0.0)).unwrap();
    assert_eq!(t.interpolate_z(-1.0, 5.0), None);
    assert_eq!(t.interpolate_z(5.0, 11.0), None);
}

#[test]
fn construction_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let c = random_cloud(&mut rng, 300, 1e5);
    let a = delaunay(&c).unwrap();
    let b = delaunay(&c).unwrap();
    assert_eq!(a.triangles(), b.triangles());
}

#[test]
fn obj_round_trip_preserves_indices() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let t = delaunay(&random_cloud(&mut rng, 80, 1e6)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("m.obj");
    export_obj(&t, &p).unwrap();
    let m = read_obj(&p).unwrap();
    assert_eq!(m.faces, t.triangles());
    for (v, p) in m.vertices.iter().zip(t.vertices()) {
        assert!((v[0] - p.x).abs() < 1e-9 && (v[1] - p.y).abs() < 1e-9);
    }
}
