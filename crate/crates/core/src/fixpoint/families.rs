//! Closed-form map families accepted by problem files.

use nalgebra::DMatrix;

use super::map::{Domain, RandomBall, SigmaStableMap, DOMAIN_SLACK};
use crate::error::{Error, Result};
use crate::l0::{L0Scalar, L0Vector};
use crate::linalg;
use crate::scalar::Scalar;
use crate::simplex::{coords_at, solve_affine};

fn check_point_in<S: Scalar>(domain: &Domain<S>, x: &L0Vector<S>, what: &str) -> Result<()> {
    x.space().ensure_same(domain.space())?;
    if x.dim() != domain.dim() {
        return Err(Error::InvalidMap(format!(
            "{what} has dimension {}, domain has {}",
            x.dim(),
            domain.dim()
        )));
    }
    for a in 0..x.space().atom_count() {
        if !domain.contains_at(a, x.row(a)) {
            return Err(Error::InvalidMap(format!("{what} lies outside the domain at atom {a}")));
        }
    }
    Ok(())
}

/// `f ≡ c`.
pub fn constant<S: Scalar>(domain: Domain<S>, value: L0Vector<S>) -> Result<SigmaStableMap<S>> {
    check_point_in(&domain, &value, "constant value")?;
    let k = value.space().atom_count();
    Ok(SigmaStableMap::new(domain, move |a, _| value.row(a).to_vec())
        .with_lipschitz(vec![0.0; k])
        .with_family("constant"))
}

/// `f(x) = (1 − t) x + t c` with `t ∈ [0, 1]` and `c` in the domain.
pub fn contraction_to_point<S: Scalar>(
    domain: Domain<S>,
    t: L0Scalar<S>,
    target: L0Vector<S>,
) -> Result<SigmaStableMap<S>> {
    check_point_in(&domain, &target, "target")?;
    t.space().ensure_same(domain.space())?;
    if let Some(a) = t.values().iter().position(|v| v.lt_zero() || *v > S::one()) {
        return Err(Error::InvalidMap(format!(
            "t at atom {a} is {}, expected 0 <= t <= 1",
            t.get(a).repr()
        )));
    }
    let lip = t.values().iter().map(|v| 1.0 - v.to_f64()).collect();
    Ok(SigmaStableMap::new(domain, move |a, x| {
        let ta = t.get(a).clone();
        let s = S::one() - ta.clone();
        x.iter()
            .zip(target.row(a))
            .map(|(xi, ci)| s.clone() * xi.clone() + ta.clone() * ci.clone())
            .collect()
    })
    .with_lipschitz(lip)
    .with_family("contraction-to-point"))
}

fn operator_norm(m: &[Vec<f64>]) -> f64 {
    let d = m.len();
    let a = DMatrix::from_fn(d, d, |i, j| m[i][j]);
    a.singular_values().iter().copied().fold(0.0, f64::max)
}

/// `f(x) = A x + b` per atom. Simplex domains are checked on vertex images,
/// ball domains through `‖A‖ r + ‖A c + b − c‖ <= r`.
pub fn affine<S: Scalar>(domain: Domain<S>, matrices: Vec<Vec<Vec<S>>>, offset: L0Vector<S>) -> Result<SigmaStableMap<S>> {
    let k = domain.space().atom_count();
    let d = domain.dim();
    offset.space().ensure_same(domain.space())?;
    if matrices.len() != k || offset.dim() != d {
        return Err(Error::InvalidMap(format!(
            "affine map needs {k} matrices of size {d}x{d} and an offset of dimension {d}"
        )));
    }
    for (a, m) in matrices.iter().enumerate() {
        if m.len() != d || m.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidMap(format!("matrix at atom {a} is not {d}x{d}")));
        }
    }
    let apply = |a: usize, x: &[S]| -> Vec<S> {
        matrices[a]
            .iter()
            .zip(offset.row(a))
            .map(|(row, b)| linalg::dot(row, x) + b.clone())
            .collect()
    };
    let mut lip = Vec::with_capacity(k);
    for a in 0..k {
        let m64: Vec<Vec<f64>> = matrices[a].iter().map(|r| r.iter().map(|v| v.to_f64()).collect()).collect();
        let norm = operator_norm(&m64);
        lip.push(norm);
        match &domain {
            Domain::Simplex(s) => {
                for (j, v) in s.rows_at(a).into_iter().enumerate() {
                    let img = apply(a, v);
                    let ok = solve_affine(&s.rows_at(a), &img)
                        .map(|lam| lam.iter().all(|l| l.nonneg(DOMAIN_SLACK)))
                        .unwrap_or(false);
                    if !ok {
                        return Err(Error::InvalidMap(format!(
                            "affine map sends vertex {} outside the simplex at atom {a}",
                            j + 1
                        )));
                    }
                }
            }
            Domain::Ball(b) => {
                if S::EXACT {
                    return Err(Error::Unsupported("ball domains need float arithmetic".into()));
                }
                let c = b.center().row(a);
                let r = b.radius().get(a).to_f64();
                let shift = linalg::sub(&apply(a, c), c);
                let drift = linalg::dot(&shift, &shift).to_f64().sqrt();
                if norm * r + drift > r * (1.0 + DOMAIN_SLACK) {
                    return Err(Error::InvalidMap(format!(
                        "affine map does not send the ball into itself at atom {a}: ‖A‖r + ‖Ac + b − c‖ = {} > r = {r}",
                        norm * r + drift
                    )));
                }
            }
        }
    }
    Ok(SigmaStableMap::new(domain, move |a, x| {
        matrices[a]
            .iter()
            .zip(offset.row(a))
            .map(|(row, b)| linalg::dot(row, x) + b.clone())
            .collect()
    })
    .with_lipschitz(lip)
    .with_family("affine"))
}

/// Rotation by `angle` about the center of a planar ball.
pub fn rotation(ball: RandomBall<f64>, angle: L0Scalar<f64>) -> Result<SigmaStableMap<f64>> {
    if ball.dim() != 2 {
        return Err(Error::InvalidMap(format!("rotation needs d = 2, got d = {}", ball.dim())));
    }
    angle.space().ensure_same(ball.space())?;
    let k = ball.space().atom_count();
    let center = ball.center().clone();
    Ok(SigmaStableMap::new(Domain::Ball(ball), move |a, x| {
        let c = center.row(a);
        let (s, co) = angle.get(a).sin_cos();
        let (u, v) = (x[0] - c[0], x[1] - c[1]);
        vec![c[0] + co * u - s * v, c[1] + s * u + co * v]
    })
    .with_lipschitz(vec![1.0; k])
    .with_family("rotation"))
}

/// `f(Σ λ_i x_i) = Σ λ_σ(i) x_i` with a per-atom permutation `σ` of `0..n`.
pub fn coordinate_permutation<S: Scalar>(domain: Domain<S>, perms: Vec<Vec<usize>>) -> Result<SigmaStableMap<S>> {
    let Domain::Simplex(simplex) = &domain else {
        return Err(Error::InvalidMap("coordinate-permutation needs a simplex domain".into()));
    };
    let n = simplex.n();
    let k = simplex.space().atom_count();
    if perms.len() != k {
        return Err(Error::InvalidMap(format!("{} permutations for {k} atoms", perms.len())));
    }
    for (a, p) in perms.iter().enumerate() {
        let mut seen = vec![false; n];
        for &i in p {
            if i >= n || seen[i] {
                return Err(Error::InvalidMap(format!("entry at atom {a} is not a permutation of 0..{n}")));
            }
            seen[i] = true;
        }
        if p.len() != n {
            return Err(Error::InvalidMap(format!("entry at atom {a} is not a permutation of 0..{n}")));
        }
    }
    let simplex = simplex.clone();
    Ok(SigmaStableMap::new(domain, move |a, x| {
        let rows = simplex.rows_at(a);
        match coords_at(&rows, x, a) {
            Ok(lam) => {
                let mu: Vec<S> = perms[a].iter().map(|&i| lam[i].clone()).collect();
                linalg::combine(&mu, &rows)
            }
            // outside points are rejected by the domain check
            Err(_) => x.to_vec(),
        }
    })
    .with_family("coordinate-permutation"))
}
