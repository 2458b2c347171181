use crate::cloud::{Point3, PointCloud};
use crate::error::{Error, Result};
use nalgebra::Vector3;
use robust::{orient2d, Coord};

/// A cropping region. Boundaries are inclusive.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    /// Axis-aligned box given by its min and max corners.
    Box { min: Vector3<f64>, max: Vector3<f64> },
    /// Simple polygon in xy, vertices in either winding; z unbounded.
    Polygon(Vec<[f64; 2]>),
}

fn coord(p: [f64; 2]) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

impl Region {
    pub fn validate(&self) -> Result<()> {
        match self {
            Region::Box { min, max } => {
                if min.iter().zip(max.iter()).any(|(a, b)| !(a <= b)) {
                    return Err(Error::InvalidArgument(
                        "crop box min corner exceeds max corner".into(),
                    ));
                }
                Ok(())
            }
            Region::Polygon(v) => validate_polygon(v),
        }
    }

    pub fn contains(&self, p: &Point3) -> bool {
        match self {
            Region::Box { min, max } => {
                p.x >= min.x
                    && p.x <= max.x
                    && p.y >= min.y
                    && p.y <= max.y
                    && p.z >= min.z
                    && p.z <= max.z
            }
            Region::Polygon(v) => polygon_contains(v, [p.x, p.y]),
        }
    }
}

fn validate_polygon(v: &[[f64; 2]]) -> Result<()> {
    if v.len() < 3 {
        return Err(Error::Degenerate(format!(
            "crop polygon needs ≥ 3 vertices, got {}",
            v.len()
        )));
    }
    if v.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument("crop polygon has non-finite vertices".into()));
    }
    let n = v.len();
    let twice_area: f64 = (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum();
    if twice_area == 0.0 {
        return Err(Error::Degenerate("crop polygon has zero area".into()));
    }
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                return Err(Error::Degenerate(format!(
                    "crop polygon edges {i} and {j} intersect (polygon not simple)"
                )));
            }
        }
    }
    Ok(())
}

fn on_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> bool {
    orient2d(coord(a), coord(b), coord(p)) == 0.0
        && p[0] >= a[0].min(b[0])
        && p[0] <= a[0].max(b[0])
        && p[1] >= a[1].min(b[1])
        && p[1] <= a[1].max(b[1])
}

fn segments_intersect(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let o1 = orient2d(coord(a), coord(b), coord(c));
    let o2 = orient2d(coord(a), coord(b), coord(d));
    let o3 = orient2d(coord(c), coord(d), coord(a));
    let o4 = orient2d(coord(c), coord(d), coord(b));
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) || on_segment(c, d, b)
}

/// Inside-or-on-boundary test: exact boundary check, then even-odd rule.
fn polygon_contains(v: &[[f64; 2]], p: [f64; 2]) -> bool {
    let n = v.len();
    let mut inside = false;
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        if on_segment(a, b, p) {
            return true;
        }
        // half-open in y so shared vertices are counted once
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let (lo, hi) = if a[1] < b[1] { (a, b) } else { (b, a) };
            // p is left of the upward edge lo→hi ⇔ the rightward ray crosses it
            if orient2d(coord(lo), coord(hi), coord(p)) > 0.0 {
                inside = !inside;
            }
        }
    }
    inside
}

/// Points inside or on the boundary of `region`, in input order.
pub fn crop(cloud: &PointCloud, region: &Region) -> Result<PointCloud> {
    region.validate()?;
    Ok(cloud.with_points(
        cloud
            .points
            .iter()
            .filter(|p| region.contains(p))
            .copied()
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Region {
        Region::Polygon(vec![[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]])
    }

    #[test]
    fn enclosing_box_is_identity() {
        let c = PointCloud::from_xyz((0..20).map(|i| (i as f64, -(i as f64), 0.5 * i as f64)));
        let r = Region::Box {
            min: Vector3::new(-100.0, -100.0, -100.0),
            max: Vector3::new(100.0, 100.0, 100.0),
        };
        assert_eq!(crop(&c, &r).unwrap(), c);
    }

    #[test]
    fn disjoint_box_is_empty() {
        let c = PointCloud::from_xyz((0..20).map(|i| (i as f64, 0.0, 0.0)));
        let r = Region::Box {
            min: Vector3::new(100.0, 100.0, 100.0),
            max: Vector3::new(101.0, 101.0, 101.0),
        };
        assert!(crop(&c, &r).unwrap().is_empty());
    }

    #[test]
    fn polygon_boundary_counts_as_inside() {
        let r = square();
        for (x, y) in [(0.0, 0.0), (1.0, 0.0), (2.0, 1.0), (2.0, 2.0), (0.0, 1.3)] {
            assert!(r.contains(&Point3::new(x, y, 0.0)), "({x}, {y})");
        }
        for (x, y) in [(-1e-12, 1.0), (2.0 + 1e-12, 1.0), (1.0, 3.0)] {
            assert!(!r.contains(&Point3::new(x, y, 0.0)), "({x}, {y})");
        }
    }

    #[test]
    fn concave_polygon() {
        // U shape opening upward
        let r = Region::Polygon(vec![
            [0.0, 0.0],
            [3.0, 0.0],
            [3.0, 3.0],
            [2.0, 3.0],
            [2.0, 1.0],
            [1.0, 1.0],
            [1.0, 3.0],
            [0.0, 3.0],
        ]);
        r.validate().unwrap();
        assert!(r.contains(&Point3::new(0.5, 2.0, 0.0)));
        assert!(r.contains(&Point3::new(2.5, 2.0, 0.0)));
        assert!(!r.contains(&Point3::new(1.5, 2.0, 0.0)));
        assert!(r.contains(&Point3::new(1.5, 0.5, 0.0)));
    }

    #[test]
    fn degenerate_polygons_are_rejected() {
        let flat = Region::Polygon(vec![[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]);
        assert!(matches!(flat.validate(), Err(Error::Degenerate(_))));
        let two = Region::Polygon(vec![[0.0, 0.0], [1.0, 1.0]]);
        assert!(two.validate().is_err());
        let bowtie = Region::Polygon(vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]);
        assert!(bowtie.validate().is_err());
    }
}
