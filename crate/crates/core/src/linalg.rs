//! Small dense elimination routines shared by both backends.

use crate::scalar::Scalar;

/// In-place reduction of `a` to reduced row echelon form over its first
/// `ncols` columns, with partial pivoting. Extra columns are carried along.
/// Returns the pivot column of each leading row.
pub fn row_reduce<S: Scalar>(a: &mut [Vec<S>], ncols: usize, scale: f64) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == a.len() {
            break;
        }
        let best = (r..a.len())
            .max_by(|&i, &j| {
                a[i][c]
                    .abs()
                    .partial_cmp(&a[j][c].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(j.cmp(&i))
            })
            .expect("nonempty range");
        if a[best][c].is_negligible(scale) {
            continue;
        }
        a.swap(r, best);
        let p = a[r][c].clone();
        for v in a[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        for i in 0..a.len() {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let factor = a[i][c].clone();
            for j in 0..a[i].len() {
                let delta = factor.clone() * a[r][j].clone();
                a[i][j] = a[i][j].clone() - delta;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Largest absolute entry, used to scale float pivot tests.
pub fn magnitude<S: Scalar>(a: &[Vec<S>]) -> f64 {
    a.iter()
        .flat_map(|row| row.iter())
        .map(|v| v.to_f64().abs())
        .fold(0.0, f64::max)
}

/// Solves the square system `a x = b`. Returns `None` when singular.
pub fn solve<S: Scalar>(a: &[Vec<S>], b: &[S]) -> Option<Vec<S>> {
    let n = a.len();
    let mut m: Vec<Vec<S>> = a
        .iter()
        .zip(b)
        .map(|(row, v)| {
            let mut row = row.clone();
            row.push(v.clone());
            row
        })
        .collect();
    let scale = magnitude(a);
    let pivots = row_reduce(&mut m, n, scale);
    if pivots.len() < n {
        return None;
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

pub fn determinant<S: Scalar>(a: &[Vec<S>]) -> S {
    let n = a.len();
    let mut m = a.to_vec();
    let scale = magnitude(a);
    let mut det = S::one();
    for c in 0..n {
        let best = (c..n)
            .max_by(|&i, &j| {
                m[i][c]
                    .abs()
                    .partial_cmp(&m[j][c].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(j.cmp(&i))
            })
            .expect("nonempty range");
        if m[best][c].is_negligible(scale) {
            return S::zero();
        }
        if best != c {
            m.swap(best, c);
            det = -det;
        }
        let p = m[c][c].clone();
        det = det * p.clone();
        for i in c + 1..n {
            let factor = m[i][c].clone() / p.clone();
            if factor.is_zero() {
                continue;
            }
            for j in c..n {
                let delta = factor.clone() * m[c][j].clone();
                m[i][j] = m[i][j].clone() - delta;
            }
        }
    }
    det
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn dist_sq<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| {
        let d = x.clone() - y.clone();
        acc + d.clone() * d
    })
}

/// `sum_i w_i p_i`.
pub fn combine<S: Scalar>(weights: &[S], points: &[&[S]]) -> Vec<S> {
    let d = points[0].len();
    let mut out = vec![S::zero(); d];
    for (w, p) in weights.iter().zip(points) {
        if w.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(p.iter()) {
            *o = o.clone() + w.clone() * x.clone();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn solves_exactly() {
        let a = vec![vec![q(2, 1), q(1, 1)], vec![q(1, 1), q(3, 1)]];
        let x = solve(&a, &[q(3, 1), q(5, 1)]).unwrap();
        assert_eq!(x, vec![q(4, 5), q(7, 5)]);
        assert_eq!(determinant(&a), q(5, 1));
    }

    #[test]
    fn singular_systems_are_detected() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(solve(&a, &[1.0, 2.0]).is_none());
        assert_eq!(determinant(&a), 0.0);
    }

    #[test]
    fn determinant_tracks_row_swaps() {
        let a = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert_eq!(determinant(&a), -1.0);
    }
}
