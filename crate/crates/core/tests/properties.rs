use nalgebra::{Unit, UnitQuaternion, Vector3};
use proptest::prelude::*;
use survscan::change::{summarize, vertical_distance};
use survscan::cloud::{read_cloud, write_cloud, CloudFormat, KdTree};
use survscan::preprocess::{
    classify_ground, crop, deduplicate, estimate_rigid, remove_outliers, CorrespondencePair, Region,
};
use survscan::raster::{fill_holes, rasterize_dsm, read_asc, volume_area, write_asc, BaseHeight, Mean, NODATA};
use survscan::{Classification, Point3, PointCloud, RigidTransform};

fn coord() -> impl Strategy<Value = f64> {
    -50.0..50.0f64
}

fn points(max: usize) -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((coord(), coord(), coord()), 1..max)
}

fn rigid() -> impl Strategy<Value = RigidTransform> {
    (
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64),
        -3.1..3.1f64,
        (coord(), coord(), coord()),
    )
        .prop_filter("axis", |(a, _, _)| a.0.abs() + a.1.abs() + a.2.abs() > 0.1)
        .prop_map(|(a, ang, t)| {
            let q = UnitQuaternion::from_axis_angle(&Unit::new_normalize(Vector3::new(a.0, a.1, a.2)), ang);
            RigidTransform::new(*q.to_rotation_matrix().matrix(), Vector3::new(t.0, t.1, t.2)).unwrap()
        })
}

fn brute_knn(pts: &[Vector3<f64>], q: &Vector3<f64>, k: usize) -> Vec<(usize, f64)> {
    let mut d: Vec<(f64, usize)> = pts.iter().enumerate().map(|(i, p)| ((p - q).norm_squared(), i)).collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    d.into_iter().take(k).map(|(d2, i)| (i, d2.sqrt())).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_inverse_round_trips(t in rigid(), p in (coord(), coord(), coord())) {
        let v = Vector3::new(p.0, p.1, p.2);
        let back = t.inverse().apply(&t.apply(&v));
        prop_assert!((back - v).norm() < 1e-9);
        prop_assert!(t.compose(&t.inverse()).max_abs_diff(&RigidTransform::identity()) < 1e-9);
    }

    #[test]
    fn knn_matches_brute_force(pts in points(300), q in (coord(), coord(), coord()), k in 1usize..12) {
        let v: Vec<Vector3<f64>> = pts.iter().map(|p| Vector3::new(p.0, p.1, p.2)).collect();
        let tree = KdTree::from_positions(&v);
        let q = Vector3::new(q.0, q.1, q.2);
        let got: Vec<(usize, f64)> = tree.knn(&q, k).iter().map(|n| (n.index, n.distance)).collect();
        prop_assert_eq!(got, brute_knn(&v, &q, k));
    }

    #[test]
    fn knn_handles_lattice_ties(k in 1usize..30) {
        let v: Vec<Vector3<f64>> = (0..8).flat_map(|i| (0..8).map(move |j| Vector3::new(i as f64, j as f64, 0.0))).collect();
        let tree = KdTree::from_positions(&v);
        let q = Vector3::new(3.5, 3.5, 0.0);
        let got: Vec<(usize, f64)> = tree.knn(&q, k).iter().map(|n| (n.index, n.distance)).collect();
        prop_assert_eq!(got, brute_knn(&v, &q, k));
    }

    #[test]
    fn radius_query_matches_brute_force(pts in points(300), q in (coord(), coord(), coord()), r in 0.0..40.0f64) {
        let v: Vec<Vector3<f64>> = pts.iter().map(|p| Vector3::new(p.0, p.1, p.2)).collect();
        let tree = KdTree::from_positions(&v);
        let q = Vector3::new(q.0, q.1, q.2);
        let got: Vec<usize> = tree.radius_query(&q, r).iter().map(|n| n.index).collect();
        let want: Vec<usize> = brute_knn(&v, &q, v.len()).into_iter().filter(|(_, d)| *d <= r).map(|(i, _)| i).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn rigid_estimate_is_exact_and_order_free(t in rigid(), src in prop::collection::vec((coord(), coord(), coord()), 4..25)) {
        let pairs: Vec<CorrespondencePair> = src.iter().enumerate().map(|(i, p)| {
            let s = Vector3::new(p.0, p.1, p.2);
            CorrespondencePair::new(format!("P{i}"), s, t.apply(&s))
        }).collect();
        let Ok(fwd) = estimate_rigid(&pairs) else { return Ok(()); };
        prop_assert!(fwd.transform.max_abs_diff(&t) < 1e-9);
        let mut rev = pairs.clone();
        rev.reverse();
        let back = estimate_rigid(&rev).unwrap();
        prop_assert!(back.transform.max_abs_diff(&fwd.transform) < 1e-12);
    }

    #[test]
    fn ground_set_grows_with_height(pts in points(300), h1 in 0.0..5.0f64, dh in 0.0..5.0f64, cell in 0.5..20.0f64) {
        let c = PointCloud::from_xyz(pts);
        let a = classify_ground(&c, cell, h1).unwrap();
        let b = classify_ground(&c, cell, h1 + dh).unwrap();
        for (p, q) in a.points.iter().zip(&b.points) {
            if p.class == Classification::Ground {
                prop_assert_eq!(q.class, Classification::Ground);
            }
        }
    }

    #[test]
    fn dedup_matches_pairwise_oracle(pts in prop::collection::vec((0.0..0.05f64, 0.0..0.05f64, 0.0..0.05f64), 1..300), tol in 0.002..0.02f64) {
        let c = PointCloud::from_xyz(pts);
        let (kept, removed) = deduplicate(&c, tol).unwrap();
        let key = |p: &Point3| [(p.x / tol).floor(), (p.y / tol).floor(), (p.z / tol).floor()];
        let want: Vec<Point3> = (0..c.len())
            .filter(|&i| (0..i).all(|j| key(&c.points[j]) != key(&c.points[i])))
            .map(|i| c.points[i])
            .collect();
        prop_assert_eq!(removed, c.len() - want.len());
        prop_assert_eq!(kept.points, want);
    }

    #[test]
    fn outliers_match_pairwise_oracle(pts in prop::collection::vec((coord(), coord(), coord()), 10..200), k in 1usize..8, alpha in 0.5..3.0f64) {
        let c = PointCloud::from_xyz(pts);
        let split = remove_outliers(&c, k, alpha).unwrap();
        let n = c.len();
        let d: Vec<f64> = (0..n).map(|i| {
            let mut ds: Vec<(f64, usize)> = (0..n).filter(|&j| j != i).map(|j| (c.points[i].distance(&c.points[j]), j)).collect();
            ds.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            ds[..k].iter().map(|x| x.0).sum::<f64>() / k as f64
        }).collect();
        let mean = d.iter().sum::<f64>() / n as f64;
        let std = (d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
        let thr = mean + alpha * std;
        prop_assert!((split.threshold - thr).abs() < 1e-9 * (1.0 + thr));
        for (i, di) in d.iter().enumerate() {
            if (di - thr).abs() > 1e-9 * (1.0 + thr) {
                prop_assert_eq!(split.removed_indices.contains(&i), *di > thr);
            }
        }
    }

    #[test]
    fn volume_scales_with_height(pts in prop::collection::vec((0.0..10.0f64, 0.0..10.0f64, 0.1..5.0f64), 20..300), s in 0.5..4.0f64) {
        let c = PointCloud::from_xyz(pts.clone());
        let scaled = PointCloud::from_xyz(pts.iter().map(|p| (p.0, p.1, p.2 * s)));
        let g = rasterize_dsm(&c, 1.0, &Mean).unwrap();
        let gs = rasterize_dsm(&scaled, 1.0, &Mean).unwrap();
        let v = volume_area(&g, BaseHeight::Explicit(0.0)).unwrap();
        let vs = volume_area(&gs, BaseHeight::Explicit(0.0)).unwrap();
        prop_assert!((vs.volume - s * v.volume).abs() < 1e-9 * vs.volume);
        let raised = volume_area(&g.map_valid(|z| z + 1.0), BaseHeight::Explicit(0.0)).unwrap();
        prop_assert!(raised.volume > v.volume);
        prop_assert!((raised.volume - v.volume - v.area).abs() < 1e-9 * raised.volume);
    }

    #[test]
    fn fill_is_idempotent(pts in prop::collection::vec((0.0..10.0f64, 0.0..10.0f64, 0.0..5.0f64), 3..80), ring in 1usize..4) {
        let g = rasterize_dsm(&PointCloud::from_xyz(pts), 0.5, &Mean).unwrap();
        let (once, _) = fill_holes(&g, ring).unwrap();
        let (twice, n) = fill_holes(&once, ring).unwrap();
        prop_assert_eq!(n, 0);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn asc_round_trips(pts in prop::collection::vec((0.0..10.0f64, 0.0..10.0f64, -5.0..5.0f64), 1..100)) {
        let g = rasterize_dsm(&PointCloud::from_xyz(pts), 0.7, &Mean).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.asc");
        write_asc(&g, &p).unwrap();
        let back = read_asc(&p).unwrap();
        prop_assert_eq!(back.values(), g.values());
        prop_assert_eq!(back.spec(), g.spec());
    }

    #[test]
    fn change_is_antisymmetric_and_translation_invariant(
        za in prop::collection::vec(-1.0..1.0f64, 100),
        zb in prop::collection::vec(-1.0..1.0f64, 100),
        t in (-1e4..1e4f64, -1e4..1e4f64, -100.0..100.0f64),
    ) {
        let grid = |z: &[f64], off: (f64, f64, f64)| PointCloud::from_xyz(
            (0..100).map(|i| (off.0 + (i % 10) as f64 * 0.1 + 0.05, off.1 + (i / 10) as f64 * 0.1 + 0.05, off.2 + z[i])));
        let a = grid(&za, (0.0, 0.0, 0.0));
        let b = grid(&zb, (0.0, 0.0, 0.0));
        let ab = vertical_distance(&a, &b, 0.23).unwrap();
        let ba = vertical_distance(&b, &a, 0.23).unwrap();
        for (x, y) in ab.grid.values().iter().zip(ba.grid.values()) {
            if *x == NODATA { prop_assert_eq!(*y, NODATA); } else { prop_assert_eq!(*x, -*y); }
        }
        // samples sit off cell boundaries so rounding cannot move them
        let moved = vertical_distance(&grid(&za, t), &grid(&zb, t), 0.23).unwrap();
        prop_assert_eq!(moved.grid.values().len(), ab.grid.values().len());
        for (x, y) in ab.grid.values().iter().zip(moved.grid.values()) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn raising_epoch_b_shifts_every_cell(
        za in prop::collection::vec(-1.0..1.0f64, 64),
        c in -10.0..10.0f64,
    ) {
        let a = PointCloud::from_xyz((0..64).map(|i| ((i % 8) as f64 * 0.1 + 0.01, (i / 8) as f64 * 0.1 + 0.01, za[i])));
        let mut b = a.clone();
        for p in &mut b.points { p.z += c; }
        let m = vertical_distance(&a, &b, 0.17).unwrap();
        for v in m.grid.values() {
            prop_assert!(*v == NODATA || (v - c).abs() < 1e-9);
        }
    }

    #[test]
    fn summary_matches_brute_force(vals in prop::collection::vec(-0.05..0.05f64, 1..200), tol in 0.0..0.03f64) {
        let a = PointCloud::from_xyz((0..vals.len()).map(|i| (i as f64 + 0.5, 0.5, 0.0)));
        let b = PointCloud::from_xyz(vals.iter().enumerate().map(|(i, v)| (i as f64 + 0.5, 0.5, *v)));
        let m = vertical_distance(&a, &b, 1.0).unwrap();
        let s = summarize(&m, tol, &[-0.01, 0.0, 0.01]).unwrap();
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let rms = (vals.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
        prop_assert!((s.mean_m - mean).abs() < 1e-12);
        prop_assert!((s.rms_m - rms).abs() < 1e-12);
        prop_assert_eq!(s.max_abs_m, vals.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        let within = vals.iter().filter(|v| v.abs() <= tol).count() as f64 / n;
        prop_assert_eq!(s.fraction_within, within);
        prop_assert_eq!(s.bands.iter().map(|b| b.count).sum::<usize>(), vals.len());
        prop_assert_eq!(s.bands[0].count, vals.iter().filter(|&&v| v < -0.01).count());
        prop_assert_eq!(s.bands[2].count, vals.iter().filter(|&&v| (0.0..0.01).contains(&v)).count());
    }

    #[test]
    fn binary_cloud_round_trips(
        pts in prop::collection::vec((coord(), coord(), coord(), 0.0..1.0f32, any::<[u8; 3]>(), 0usize..5), 0..100),
        epoch in prop::option::of(0i64..2_000_000_000),
    ) {
        let classes = [Classification::Unassigned, Classification::NonGround, Classification::Ground, Classification::Target, Classification::Noise];
        let mut c = PointCloud::new(pts.iter().map(|p| Point3 {
            x: p.0, y: p.1, z: p.2, intensity: Some(p.3), color: Some(p.4), class: classes[p.5],
        }).collect());
        c.epoch = epoch;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.sspc");
        write_cloud(&c, &path, CloudFormat::SspcBinary).unwrap();
        let back = read_cloud(&path, CloudFormat::SspcBinary).unwrap();
        prop_assert_eq!(&back.points, &c.points);
        prop_assert_eq!(back.epoch, c.epoch);
        prop_assert_eq!(back.frame, c.frame);
    }

    #[test]
    fn ascii_cloud_round_trips(pts in points(100)) {
        let c = PointCloud::from_xyz(pts);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.xyz");
        write_cloud(&c, &path, CloudFormat::XyzAscii).unwrap();
        let back = read_cloud(&path, CloudFormat::XyzAscii).unwrap();
        prop_assert_eq!(back.points, c.points);
    }

    #[test]
    fn rectangle_polygon_equals_box(pts in points(200), x0 in -40.0..0.0f64, y0 in -40.0..0.0f64, w in 1.0..40.0f64, h in 1.0..40.0f64) {
        let c = PointCloud::from_xyz(pts);
        let poly = Region::Polygon(vec![[x0, y0], [x0 + w, y0], [x0 + w, y0 + h], [x0, y0 + h]]);
        let bx = Region::Box { min: Vector3::new(x0, y0, f64::NEG_INFINITY), max: Vector3::new(x0 + w, y0 + h, f64::INFINITY) };
        prop_assert_eq!(crop(&c, &poly).unwrap().points, crop(&c, &bx).unwrap().points);
    }
}
