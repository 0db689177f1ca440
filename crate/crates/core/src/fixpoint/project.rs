use super::map::{Domain, RandomBall};
use crate::error::{Error, Result};
use crate::l0::L0Vector;
use crate::linalg;
use crate::scalar::{Scalar, FLOAT_EQ_TOL};
use crate::simplex::{coords_at, L0Simplex};

/// Nearest point of `conv(points)` to `target`: returns convex weights and
/// the squared distance. Every face is tried; on each affinely independent
/// face the affine projection is kept if its weights are nonnegative.
/// Exact in rational mode; cost `2^n` small solves.
pub fn min_norm_point<S: Scalar>(points: &[&[S]], target: &[S]) -> (Vec<S>, S) {
    let n = points.len();
    assert!(n > 0 && n < usize::BITS as usize, "1..63 points");
    let mut best: Option<(Vec<S>, S)> = None;
    for mask in 1usize..(1 << n) {
        let face: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let Some(w) = face_projection(points, &face, target) else {
            continue;
        };
        let mut full = vec![S::zero(); n];
        for (i, wi) in face.iter().zip(w) {
            full[*i] = wi;
        }
        let p = linalg::combine(&full, points);
        let d = linalg::dist_sq(&p, target);
        if best.as_ref().is_none_or(|(_, bd)| d < *bd) {
            best = Some((full, d));
        }
    }
    best.expect("singleton faces are always feasible")
}

/// Weights of the projection of `target` onto the affine hull of the face,
/// or `None` if the face is degenerate or the projection leaves it.
fn face_projection<S: Scalar>(points: &[&[S]], face: &[usize], target: &[S]) -> Option<Vec<S>> {
    let base = points[face[0]];
    if face.len() == 1 {
        return Some(vec![S::one()]);
    }
    let diffs: Vec<Vec<S>> = face[1..].iter().map(|&i| linalg::sub(points[i], base)).collect();
    let gram: Vec<Vec<S>> = diffs
        .iter()
        .map(|u| diffs.iter().map(|v| linalg::dot(u, v)).collect())
        .collect();
    let rhs: Vec<S> = diffs.iter().map(|u| linalg::dot(u, &linalg::sub(target, base))).collect();
    let s = linalg::solve(&gram, &rhs)?;
    let first = s.iter().fold(S::one(), |acc, v| acc - v.clone());
    let mut w = Vec::with_capacity(face.len());
    w.push(first);
    w.extend(s);
    if w.iter().all(|v| v.nonneg(FLOAT_EQ_TOL)) {
        Some(w)
    } else {
        None
    }
}

/// Per-atom Euclidean projection onto a simplex. Points already inside are
/// returned unchanged.
pub fn project_simplex<S: Scalar>(simplex: &L0Simplex<S>, x: &L0Vector<S>) -> Result<L0Vector<S>> {
    x.space().ensure_same(simplex.space())?;
    Ok(L0Vector::from_rows_fn(simplex.space(), simplex.dim(), |a| {
        project_simplex_row(&simplex.rows_at(a), x.row(a))
    }))
}

pub fn project_simplex_row<S: Scalar>(rows: &[&[S]], x: &[S]) -> Vec<S> {
    if coords_at(rows, x, 0).is_ok() {
        return x.to_vec();
    }
    let (w, _) = min_norm_point(rows, x);
    linalg::combine(&w, rows)
}

/// Radial projection onto a ball. Float arithmetic only.
pub fn project_ball<S: Scalar>(ball: &RandomBall<S>, x: &L0Vector<S>) -> Result<L0Vector<S>> {
    x.space().ensure_same(ball.space())?;
    if S::EXACT {
        return Err(Error::Unsupported("ball projection needs float arithmetic".into()));
    }
    Ok(L0Vector::from_rows_fn(ball.space(), ball.dim(), |a| {
        project_ball_row(ball.center().row(a), ball.radius().get(a), x.row(a))
    }))
}

pub fn project_ball_row<S: Scalar>(center: &[S], radius: &S, x: &[S]) -> Vec<S> {
    let d2 = linalg::dist_sq(x, center);
    let r2 = radius.clone() * radius.clone();
    if d2 <= r2 {
        return x.to_vec();
    }
    if !S::EXACT {
        // points within rounding of the sphere count as inside
        let mag = center.iter().fold(radius.to_f64(), |m, c| m.max(c.to_f64().abs()));
        if d2.to_f64().sqrt() - radius.to_f64() <= 16.0 * f64::EPSILON * mag {
            return x.to_vec();
        }
    }
    let scale = S::from_float(radius.to_f64() / d2.to_f64().sqrt()).unwrap_or_else(S::zero);
    x.iter()
        .zip(center)
        .map(|(v, c)| c.clone() + (v.clone() - c.clone()) * scale.clone())
        .collect()
}

pub fn project_convex<S: Scalar>(domain: &Domain<S>, x: &L0Vector<S>) -> Result<L0Vector<S>> {
    match domain {
        Domain::Simplex(s) => project_simplex(s, x),
        Domain::Ball(b) => project_ball(b, x),
    }
}
