#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use randfix_core::{
    check_l0_affine_independence, BarycentricCoords, L0Label, L0Labeling, L0Scalar, L0Simplex, L0Vector,
    ProbabilitySpace, Rational, Scalar, Subdivision, Weights,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(p: i64, d: i64) -> Rational {
    Rational::from_ratio(p, d)
}

/// Positive integer weights normalized to sum to one.
pub fn random_space(rng: &mut ChaCha8Rng, k: usize) -> ProbabilitySpace {
    let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=9)).collect();
    let total: i64 = raw.iter().sum();
    ProbabilitySpace::new(Weights::Exact(raw.iter().map(|&w| q(w, total)).collect())).unwrap()
}

/// Integer vertices in `[-8, 8]^dim`, redrawn until affinely independent
/// at every atom.
pub fn random_simplex<S: Scalar>(rng: &mut ChaCha8Rng, space: &ProbabilitySpace, n: usize, dim: usize) -> L0Simplex<S> {
    loop {
        let vertices: Vec<L0Vector<S>> = (0..n)
            .map(|_| {
                L0Vector::from_rows_fn(space, dim, |_| (0..dim).map(|_| S::from_int(rng.gen_range(-8..=8))).collect())
            })
            .collect();
        if check_l0_affine_independence(&vertices).unwrap().is_independent() {
            return L0Simplex::new(vertices).unwrap();
        }
    }
}

/// Random rational barycentric coordinates with denominator `den`.
pub fn random_lambdas(rng: &mut ChaCha8Rng, n: usize, den: i64) -> Vec<Rational> {
    let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=den)).collect();
    let total: i64 = raw.iter().sum::<i64>().max(1);
    if raw.iter().all(|&r| r == 0) {
        let mut v = vec![q(0, 1); n];
        v[0] = q(1, 1);
        return v;
    }
    raw.iter().map(|&r| q(r, total)).collect()
}

pub fn random_coords<S: Scalar>(rng: &mut ChaCha8Rng, space: &ProbabilitySpace, n: usize) -> BarycentricCoords<S> {
    let rows: Vec<Vec<S>> = (0..space.atom_count())
        .map(|_| random_lambdas(rng, n, 20).iter().map(S::from_rational).collect())
        .collect();
    BarycentricCoords::from_rows(space, &rows).unwrap()
}

pub fn random_point<S: Scalar>(rng: &mut ChaCha8Rng, simplex: &L0Simplex<S>) -> L0Vector<S> {
    let c = random_coords(rng, simplex.space(), simplex.n());
    simplex.point(&c)
}

/// Per atom, an independent uniformly drawn proper labeling.
pub fn random_proper_labeling<S: Scalar>(rng: &mut ChaCha8Rng, sub: &Subdivision<S>) -> L0Labeling {
    let space = sub.parent().space().clone();
    let n = sub.n();
    let labels = (0..sub.registry().len())
        .map(|id| {
            let chi = sub.chi(id);
            let per_atom = (0..space.atom_count()).map(|_| chi[rng.gen_range(0..chi.len())]).collect();
            L0Label::new(&space, n, per_atom).unwrap()
        })
        .collect();
    L0Labeling::new(sub, labels).unwrap()
}

/// Like `random_proper_labeling`, but atoms draw from a small pool of
/// classical labelings so that some atoms share a tuple.
pub fn pooled_proper_labeling<S: Scalar>(rng: &mut ChaCha8Rng, sub: &Subdivision<S>, pool: usize) -> L0Labeling {
    let k = sub.parent().space().atom_count();
    let classical: Vec<Vec<usize>> = (0..pool)
        .map(|_| (0..sub.registry().len()).map(|id| {
            let chi = sub.chi(id);
            chi[rng.gen_range(0..chi.len())]
        }).collect())
        .collect();
    let tuples: Vec<Vec<usize>> = (0..k).map(|_| classical[rng.gen_range(0..pool)].clone()).collect();
    L0Labeling::from_atom_tuples(sub, &tuples).unwrap()
}

pub fn random_scalar_in(rng: &mut ChaCha8Rng, space: &ProbabilitySpace, lo: i64, hi: i64, den: i64) -> L0Scalar<Rational> {
    L0Scalar::from_fn(space, |_| q(rng.gen_range(lo..=hi), den))
}
