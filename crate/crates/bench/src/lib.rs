//! Shared fixtures for the benchmarks.

use randfix_core::fixpoint::families;
use randfix_core::{Domain, L0Scalar, L0Simplex, L0Vector, ProbabilitySpace, Rational, Scalar, SigmaStableMap};

/// Uniform space with `k` atoms.
pub fn space(k: usize) -> ProbabilitySpace {
    ProbabilitySpace::uniform(k).expect("k > 0")
}

/// Standard simplex in `R^n`, the same at every atom.
pub fn standard<S: Scalar>(k: usize, n: usize) -> L0Simplex<S> {
    L0Simplex::standard(&space(k), n)
}

/// Contraction by `1/2` towards an interior point that differs per atom.
pub fn contraction<S: Scalar>(k: usize, n: usize) -> SigmaStableMap<S> {
    let s = standard::<S>(k, n);
    let sp = s.space().clone();
    let target = L0Vector::from_rows_fn(&sp, n, |a| {
        let lead = S::from_ratio(1 + (a % 3) as i64, 2 * n as i64);
        let rest = (S::from_int(1) - lead.clone()) / S::from_int(n as i64 - 1);
        (0..n).map(|i| if i == 0 { lead.clone() } else { rest.clone() }).collect()
    });
    let t = L0Scalar::from_fn(&sp, |_| S::from_ratio(1, 2));
    families::contraction_to_point(Domain::Simplex(s), t, target).expect("target is inside")
}

pub fn rational_point(space: &ProbabilitySpace, n: usize) -> L0Vector<Rational> {
    L0Vector::from_rows_fn(space, n, |a| (0..n).map(|i| Rational::from_ratio((i + a) as i64, 3)).collect())
}
