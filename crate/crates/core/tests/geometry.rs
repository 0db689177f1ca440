mod common;

use common::*;
use proptest::prelude::*;
use randfix_core::{
    barycentric_coordinates, barycentric_subdivision, check_l0_affine_independence, iterated_barycentric_subdivision,
    l0_diameter_squared, l0_extreme_points, midpoint_subdivision_2simplex, Error, Independence, L0Simplex,
    L0Vector, ProbabilitySpace, Rational, Scalar,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn barycentric_round_trip(seed in any::<u64>(), k in 1usize..4, n in 2usize..5) {
        let mut rng = rng(seed);
        let space = random_space(&mut rng, k);
        let s = random_simplex::<Rational>(&mut rng, &space, n, n - 1);
        let c = random_coords::<Rational>(&mut rng, &space, n);
        let x = s.point(&c);
        prop_assert_eq!(barycentric_coordinates(&s, &x).unwrap(), c);
        prop_assert!(s.contains(&x));
    }

    #[test]
    fn float_round_trip(seed in any::<u64>(), n in 2usize..5) {
        let mut rng = rng(seed);
        let space = ProbabilitySpace::uniform(2).unwrap();
        let s = random_simplex::<f64>(&mut rng, &space, n, n);
        let c = random_coords::<f64>(&mut rng, &space, n);
        let back = barycentric_coordinates(&s, &s.point(&c)).unwrap();
        for a in 0..2 {
            for (u, v) in back.at(a).iter().zip(c.at(a)) {
                prop_assert!((u - v).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn subdivision_diameter_shrinks(seed in any::<u64>(), n in 2usize..5, depth in 1usize..3) {
        let mut rng = rng(seed);
        let space = random_space(&mut rng, 2);
        let s = random_simplex::<Rational>(&mut rng, &space, n, n - 1);
        let sub = iterated_barycentric_subdivision(&s, depth).unwrap();
        let r = q(n as i64 - 1, n as i64);
        let mut bound = q(1, 1);
        for _ in 0..depth {
            bound = bound * r.clone() * r.clone();
        }
        let lhs = sub.diameter_squared();
        let rhs = l0_diameter_squared(&s);
        for a in 0..2 {
            prop_assert!(*lhs.get(a) <= bound.clone() * rhs.get(a).clone());
        }
    }
}

#[test]
fn cell_and_registry_counts() {
    let one = ProbabilitySpace::uniform(1).unwrap();
    let d2 = barycentric_subdivision(&L0Simplex::<Rational>::standard(&one, 3));
    assert_eq!((d2.cells().len(), d2.registry().len()), (6, 7));
    let d3 = barycentric_subdivision(&L0Simplex::<Rational>::standard(&one, 4));
    assert_eq!((d3.cells().len(), d3.registry().len()), (24, 15));
    let d1 = iterated_barycentric_subdivision(&L0Simplex::<Rational>::standard(&one, 2), 3).unwrap();
    assert_eq!((d1.cells().len(), d1.registry().len()), (8, 9));
    assert!(iterated_barycentric_subdivision(&L0Simplex::<Rational>::standard(&one, 2), 0).is_err());
}

#[test]
fn interval_halving_is_exact() {
    let one = ProbabilitySpace::uniform(1).unwrap();
    let s = L0Simplex::<Rational>::standard(&one, 2);
    let sub = iterated_barycentric_subdivision(&s, 3).unwrap();
    // (1/2)^3 on the diameter, (1/64) on its square
    assert_eq!(*sub.diameter_squared().get(0), l0_diameter_squared(&s).get(0).clone() * q(1, 64));
}

#[test]
fn subdivision_structure_on_random_simplexes() {
    let mut rng = rng(11);
    for n in 2..=4usize {
        let space = random_space(&mut rng, 2);
        let s = random_simplex::<Rational>(&mut rng, &space, n, n - 1);
        let sub = barycentric_subdivision(&s);
        assert!(sub.volumes_add_up());
        sub.check_face_intersections().unwrap();
        for c in 0..sub.cells().len() {
            assert!(check_l0_affine_independence(sub.cell_simplex(c).vertices()).unwrap().is_independent());
        }
    }
    let space = random_space(&mut rng, 2);
    let sub = midpoint_subdivision_2simplex(&random_simplex::<Rational>(&mut rng, &space, 3, 2)).unwrap();
    assert_eq!(sub.cells().len(), 4);
    assert!(sub.volumes_add_up());
    sub.check_face_intersections().unwrap();
}

#[test]
fn sampled_points_are_located() {
    let mut rng = rng(12);
    let space = random_space(&mut rng, 3);
    let s = random_simplex::<Rational>(&mut rng, &space, 3, 2);
    let sub = iterated_barycentric_subdivision(&s, 2).unwrap();
    for _ in 0..1000 {
        let x = random_point(&mut rng, &s);
        let cells = sub.locate(&x).unwrap();
        for (a, &c) in cells.iter().enumerate() {
            let cell = sub.cell_simplex(c);
            let single = cell.restrict(a, &ProbabilitySpace::uniform(1).unwrap());
            assert!(single.contains(&x.restrict(a, single.space())));
        }
    }
}

#[test]
fn dependent_vertices_are_reported() {
    let space = ProbabilitySpace::uniform(2).unwrap();
    let v = |rows: Vec<Vec<i64>>| {
        L0Vector::new(&space, rows.into_iter().map(|r| r.into_iter().map(Rational::from_int).collect()).collect())
            .unwrap()
    };
    let verts = vec![
        v(vec![vec![0, 0], vec![0, 0]]),
        v(vec![vec![1, 0], vec![1, 0]]),
        v(vec![vec![0, 1], vec![2, 0]]),
    ];
    match check_l0_affine_independence(&verts).unwrap() {
        Independence::Dependent { atom, .. } => assert_eq!(atom, 1),
        Independence::Independent => panic!("atom 1 is collinear"),
    }
    assert!(matches!(L0Simplex::new(verts), Err(Error::AffinelyDependent { atom: 1 })));
}

#[test]
fn outside_points_name_the_atom() {
    let space = ProbabilitySpace::uniform(2).unwrap();
    let s = L0Simplex::<Rational>::standard(&space, 3);
    let x = L0Vector::new(
        &space,
        vec![
            vec![q(1, 3), q(1, 3), q(1, 3)],
            vec![q(3, 2), q(-1, 2), q(0, 1)],
        ],
    )
    .unwrap();
    assert!(matches!(barycentric_coordinates(&s, &x), Err(Error::OutsideSimplex { atom: 1, .. })));
}

#[test]
fn extreme_points_of_a_random_simplex() {
    let mut rng = rng(13);
    let space = random_space(&mut rng, 2);
    let s = random_simplex::<Rational>(&mut rng, &space, 3, 2);
    let ext = l0_extreme_points(&s);
    assert_eq!(ext.assignments().count(), 9);
    let mixed = ext.point(&[0, 2]);
    assert_eq!(ext.member(&mixed), Some(vec![0, 2]));
    let inside = random_point(&mut rng, &s);
    let c = barycentric_coordinates(&s, &inside).unwrap();
    let zero = Rational::from_int(0);
    let vertex_like = (0..2).all(|a| c.at(a).iter().filter(|l| **l != zero).count() == 1);
    assert_eq!(ext.member(&inside).is_some(), vertex_like);
}
