use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen, Vector3};

/// Result of a sphere fit; `fit_rms` is the RMS of radial residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereFit {
    pub center: Vector3<f64>,
    pub radius: f64,
    pub fit_rms: f64,
}

const PLANAR_RATIO: f64 = 1e-12;

fn degenerate(msg: impl std::fmt::Display) -> Error {
    Error::Degenerate(format!("sphere configuration: {msg}"))
}

fn centroid(points: &[Vector3<f64>]) -> Vector3<f64> {
    points.iter().sum::<Vector3<f64>>() / points.len() as f64
}

/// Eigen-decomposition of the scatter matrix, eigenvalues ascending.
fn scatter(points: &[Vector3<f64>], c: &Vector3<f64>) -> (Vector3<f64>, Matrix3<f64>) {
    let m: Matrix3<f64> = points.iter().map(|p| (p - c) * (p - c).transpose()).sum();
    let e = SymmetricEigen::new(m);
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = Vector3::new(e.eigenvalues[idx[0]], e.eigenvalues[idx[1]], e.eigenvalues[idx[2]]);
    let vecs = Matrix3::from_columns(&[
        e.eigenvectors.column(idx[0]).into_owned(),
        e.eigenvectors.column(idx[1]).into_owned(),
        e.eigenvectors.column(idx[2]).into_owned(),
    ]);
    (vals, vecs)
}

/// Linear least squares for |p|² = 2 c·p + d in centroid-relative
/// coordinates.
fn algebraic(points: &[Vector3<f64>], origin: &Vector3<f64>) -> Option<(Vector3<f64>, f64)> {
    let n = points.len();
    let mut a = DMatrix::zeros(n, 4);
    let mut b = DVector::zeros(n);
    for (i, p) in points.iter().enumerate() {
        let q = p - origin;
        a[(i, 0)] = 2.0 * q.x;
        a[(i, 1)] = 2.0 * q.y;
        a[(i, 2)] = 2.0 * q.z;
        a[(i, 3)] = 1.0;
        b[i] = q.norm_squared();
    }
    let x = a.svd(true, true).solve(&b, 1e-14).ok()?;
    let c = Vector3::new(x[0], x[1], x[2]);
    let r2 = x[3] + c.norm_squared();
    (r2 > 0.0 && x.iter().all(|v| v.is_finite())).then(|| (c + origin, r2.sqrt()))
}

/// Start for a fixed radius when the points lie in a plane: fit the
/// circle in that plane and lift the centre along the normal, on the
/// side facing away from the scanner origin.
fn planar_start(points: &[Vector3<f64>], radius: f64) -> Result<Vector3<f64>> {
    let c = centroid(points);
    let (vals, vecs) = scatter(points, &c);
    if !(vals[1] > PLANAR_RATIO * vals[2]) {
        return Err(degenerate("points are collinear"));
    }
    let (u, v, mut n) = (
        vecs.column(2).into_owned(),
        vecs.column(1).into_owned(),
        vecs.column(0).into_owned(),
    );
    if n.dot(&c) < 0.0 {
        n = -n;
    }
    let m = points.len();
    let mut a = DMatrix::zeros(m, 3);
    let mut b = DVector::zeros(m);
    for (i, p) in points.iter().enumerate() {
        let q = p - c;
        let (x, y) = (q.dot(&u), q.dot(&v));
        a[(i, 0)] = 2.0 * x;
        a[(i, 1)] = 2.0 * y;
        a[(i, 2)] = 1.0;
        b[i] = x * x + y * y;
    }
    let s = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|_| degenerate("circle fit failed"))?;
    let rho2 = s[2] + s[0] * s[0] + s[1] * s[1];
    let h = (radius * radius - rho2).max(0.0).sqrt();
    Ok(c + u * s[0] + v * s[1] + n * h)
}

fn cost(points: &[Vector3<f64>], c: &Vector3<f64>, r: f64) -> f64 {
    points
        .iter()
        .map(|p| {
            let e = (p - c).norm() - r;
            e * e
        })
        .sum()
}

/// Levenberg–Marquardt on Σ(‖pᵢ − c‖ − r)².
fn refine(points: &[Vector3<f64>], mut c: Vector3<f64>, mut r: f64, fixed: bool) -> (Vector3<f64>, f64) {
    let m = if fixed { 3 } else { 4 };
    let mut lambda = 1e-3;
    let mut f = cost(points, &c, r);
    for _ in 0..200 {
        let mut jtj = DMatrix::<f64>::zeros(m, m);
        let mut jtr = DVector::<f64>::zeros(m);
        for p in points {
            let d = p - c;
            let dist = d.norm();
            let res = dist - r;
            let g = if dist > 0.0 { -d / dist } else { Vector3::zeros() };
            let row: Vec<f64> = if fixed {
                vec![g.x, g.y, g.z]
            } else {
                vec![g.x, g.y, g.z, -1.0]
            };
            for i in 0..m {
                jtr[i] += row[i] * res;
                for j in 0..m {
                    jtj[(i, j)] += row[i] * row[j];
                }
            }
        }
        let mut accepted = false;
        let mut small = false;
        while lambda < 1e12 {
            let mut a = jtj.clone();
            for i in 0..m {
                a[(i, i)] += lambda * jtj[(i, i)].max(1e-12);
            }
            let Some(delta) = a.lu().solve(&(-&jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let nc = c + Vector3::new(delta[0], delta[1], delta[2]);
            let nr = if fixed { r } else { r + delta[3] };
            let nf = cost(points, &nc, nr);
            small = delta.norm() <= 1e-15 * (1.0 + c.norm() + r.abs());
            if nf <= f {
                accepted = nf < f;
                c = nc;
                r = nr;
                f = nf;
                lambda = (lambda / 10.0).max(1e-12);
                break;
            }
            lambda *= 10.0;
        }
        if !accepted || small {
            break;
        }
    }
    (c, r)
}

/// Least-squares sphere through `points`.
///
/// Needs ≥ 4 non-coplanar points for a free radius, or ≥ 3 points that
/// are not collinear when `known_radius` is given.
pub fn fit_sphere(points: &[Vector3<f64>], known_radius: Option<f64>) -> Result<SphereFit> {
    if let Some(r) = known_radius {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument(format!("sphere radius must be > 0, got {r}")));
        }
    }
    if points.iter().any(|p| !p.iter().all(|v| v.is_finite())) {
        return Err(Error::InvalidArgument("sphere points must be finite".into()));
    }
    let need = if known_radius.is_some() { 3 } else { 4 };
    if points.len() < need {
        return Err(degenerate(format!("{} points, need ≥ {need}", points.len())));
    }
    let c = centroid(points);
    let (vals, _) = scatter(points, &c);
    let planar = !(vals[0] > PLANAR_RATIO * vals[2]);
    let (c0, r0) = match (known_radius, planar) {
        (None, true) => return Err(degenerate("points are coplanar")),
        (None, false) => algebraic(points, &c).ok_or_else(|| degenerate("algebraic fit failed"))?,
        (Some(r), true) => (planar_start(points, r)?, r),
        (Some(r), false) => match algebraic(points, &c) {
            Some((c0, _)) => (c0, r),
            None => (planar_start(points, r)?, r),
        },
    };
    let (center, radius) = refine(points, c0, r0, known_radius.is_some());
    let fit_rms = (cost(points, &center, radius) / points.len() as f64).sqrt();
    Ok(SphereFit {
        center,
        radius,
        fit_rms,
    })
}
