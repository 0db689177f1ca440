use rayon::prelude::*;

use super::map::SigmaStableMap;
use crate::error::{Error, Result};
use crate::l0::L0Label;
use crate::scalar::{Scalar, FLOAT_EQ_TOL};
use crate::simplex::{coords_at, L0Simplex};
use crate::sperner::L0Labeling;
use crate::subdivision::Subdivision;

/// Smallest 1-based `i` with `λ_i > 0` and `λ_i >= μ_i`.
pub fn label_rule<S: Scalar>(lambda: &[S], mu: &[S]) -> Option<usize> {
    lambda
        .iter()
        .zip(mu)
        .position(|(l, m)| l.gt_zero() && l >= m)
        .map(|i| i + 1)
}

/// `label_rule`, falling back in float mode to the argmax of `λ_i − μ_i`
/// over `λ_i > 1e-12` when rounding leaves no index.
pub fn label_with_fallback<S: Scalar>(lambda: &[S], mu: &[S]) -> Option<usize> {
    if let Some(i) = label_rule(lambda, mu) {
        return Some(i);
    }
    if S::EXACT {
        return None;
    }
    let mut best: Option<(usize, f64)> = None;
    for (i, (l, m)) in lambda.iter().zip(mu).enumerate() {
        let l = l.to_f64();
        if l <= FLOAT_EQ_TOL {
            continue;
        }
        let gap = l - m.to_f64();
        if best.is_none_or(|(_, g)| gap > g) {
            best = Some((i + 1, gap));
        }
    }
    best.map(|(i, _)| i)
}

/// Coordinates of `y` and `f(y)` relative to `simplex` at one atom.
pub fn lambda_mu<S: Scalar>(
    simplex: &L0Simplex<S>,
    f: &SigmaStableMap<S>,
    atom: usize,
    y: &[S],
) -> Result<(Vec<S>, Vec<S>)> {
    let rows = simplex.rows_at(atom);
    let lambda = coords_at(&rows, y, atom)?;
    let fy = f.eval_atom(atom, y)?;
    let mu = coords_at(&rows, &fy, atom).map_err(|e| match e {
        Error::OutsideSimplex { atom, detail } => Error::MapLeavesDomain { atom, detail },
        other => other,
    })?;
    Ok((lambda, mu))
}

/// Labels every registry vertex of `sub` from the coordinates of `y` and
/// `f(y)` in the original simplex.
pub fn label_from_map<S: Scalar>(
    simplex: &L0Simplex<S>,
    f: &SigmaStableMap<S>,
    sub: &Subdivision<S>,
) -> Result<L0Labeling> {
    let space = simplex.space();
    space.ensure_same(sub.parent().space())?;
    let k = space.atom_count();
    let tuples = (0..k)
        .into_par_iter()
        .map(|a| {
            sub.registry()
                .iter()
                .enumerate()
                .map(|(id, v)| {
                    let (lambda, mu) = lambda_mu(simplex, f, a, v.point().row(a))?;
                    label_with_fallback(&lambda, &mu).ok_or(Error::NoQualifyingLabel { vertex: id, atom: a })
                })
                .collect::<Result<Vec<usize>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let labels = (0..sub.registry().len())
        .map(|id| L0Label::new(space, simplex.n(), tuples.iter().map(|t| t[id]).collect()))
        .collect::<Result<Vec<_>>>()?;
    L0Labeling::new(sub, labels)
}
