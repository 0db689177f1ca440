mod common;

use common::*;
use proptest::prelude::*;
use randfix_core::fixpoint::families;
use randfix_core::fixpoint::project::{project_ball_row, project_simplex_row};
use randfix_core::{
    borsuk_retraction, l0_diameter, project_convex, solve_on_convex, solve_on_simplex, CellSelection, Domain,
    Error, L0Scalar, L0Simplex, L0Vector, ProbabilitySpace, RandomBall, Rational, SigmaStableMap, SolverOptions,
};

fn opts(epsilon: f64) -> SolverOptions {
    SolverOptions {
        epsilon,
        ..Default::default()
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[test]
fn constant_map_lands_on_its_value() {
    let mut rng = rng(31);
    let space = random_space(&mut rng, 3);
    let s = random_simplex::<f64>(&mut rng, &space, 3, 2);
    let c = random_point(&mut rng, &s);
    let f = families::constant(Domain::Simplex(s.clone()), c.clone()).unwrap();
    let trace = solve_on_simplex(&s, &f, &opts(1e-5)).unwrap();
    assert!(trace.converged);
    trace.check_invariants(1e-9).unwrap();
    for a in 0..3 {
        assert!(dist(trace.x_star.row(a), c.row(a)) <= 1e-5);
    }
}

#[test]
fn rational_contraction_is_exactly_localized() {
    let mut rng = rng(32);
    let space = random_space(&mut rng, 2);
    let s = random_simplex::<Rational>(&mut rng, &space, 3, 2);
    let c = random_point(&mut rng, &s);
    let t = L0Scalar::constant(&space, q(1, 2));
    let f = families::contraction_to_point(Domain::Simplex(s.clone()), t, c.clone()).unwrap();
    let trace = solve_on_simplex(&s, &f, &opts(1e-3)).unwrap();
    assert!(trace.converged);
    trace.check_invariants(0.0).unwrap();
    // every kept simplex contains the fixed point
    for step in &trace.steps {
        assert!(step.simplex.contains(&c));
    }
}

#[test]
fn residual_is_bounded_by_lipschitz_and_diameter() {
    let mut rng = rng(33);
    for _ in 0..5 {
        let space = random_space(&mut rng, 3);
        let s = random_simplex::<f64>(&mut rng, &space, 3, 2);
        let c = random_point(&mut rng, &s);
        let t = L0Scalar::from_fn(&space, |a| 0.2 + 0.2 * a as f64);
        let f = families::contraction_to_point(Domain::Simplex(s.clone()), t, c).unwrap();
        let trace = solve_on_simplex(&s, &f, &opts(1e-4)).unwrap();
        let diam = l0_diameter(trace.final_simplex());
        let lip = f.lipschitz().unwrap();
        for a in 0..3 {
            assert!(*trace.residual.get(a) <= (1.0 + lip[a]) * diam.get(a) + 1e-9);
        }
    }
}

#[test]
fn max_iter_gives_a_partial_trace() {
    let space = ProbabilitySpace::uniform(1).unwrap();
    let s = L0Simplex::<f64>::standard(&space, 3);
    let c = L0Vector::constant(&space, vec![0.2, 0.3, 0.5]);
    let f = families::constant(Domain::Simplex(s.clone()), c).unwrap();
    let trace = solve_on_simplex(&s, &f, &SolverOptions { epsilon: 1e-6, max_iter: 1, ..Default::default() }).unwrap();
    assert!(!trace.converged);
    assert_eq!(trace.steps.len(), 2);
    assert_eq!(trace.iterations, vec![1]);
}

#[test]
fn permutation_map_finds_the_barycenter() {
    let space = ProbabilitySpace::uniform(2).unwrap();
    let s = L0Simplex::<Rational>::standard(&space, 3);
    let f = families::coordinate_permutation(Domain::Simplex(s.clone()), vec![vec![1, 2, 0], vec![1, 0, 2]]).unwrap();
    let trace = solve_on_simplex(&s, &f, &opts(1e-3)).unwrap();
    assert!(trace.converged);
    let third = q(1, 3);
    // atom 0 has the unique fixed point (1/3, 1/3, 1/3)
    let bary = vec![third.clone(), third.clone(), third];
    assert!(trace.steps.iter().all(|st| {
        let single = st.simplex.restrict(0, &ProbabilitySpace::uniform(1).unwrap());
        single.contains(&L0Vector::constant(single.space(), bary.clone()))
    }));
    // atom 1 fixes every point with λ_1 = λ_2
    let x = trace.x_star.row(1);
    assert!((x[0].clone() - x[1].clone()) * (x[0].clone() - x[1].clone()) <= q(1, 1_000_000));
}

#[test]
fn sperner_rule_runs_its_first_round() {
    let space = ProbabilitySpace::uniform(2).unwrap();
    let s = L0Simplex::<Rational>::standard(&space, 3);
    let c = L0Vector::new(&space, vec![vec![q(1, 5), q(3, 10), q(1, 2)], vec![q(2, 3), q(1, 6), q(1, 6)]]).unwrap();
    let f = families::contraction_to_point(Domain::Simplex(s.clone()), L0Scalar::constant(&space, q(1, 2)), c).unwrap();
    let one_round = SolverOptions {
        epsilon: 1e-3,
        max_iter: 1,
        selection: CellSelection::Sperner,
    };
    let trace = solve_on_simplex(&s, &f, &one_round).unwrap();
    trace.check_invariants(0.0).unwrap();
    // later rounds label with respect to S, which need not be proper on S^m
    let full = SolverOptions { max_iter: 50, ..one_round };
    match solve_on_simplex(&s, &f, &full) {
        Ok(t) => t.check_invariants(0.0).unwrap(),
        Err(Error::ImproperLabeling { .. }) => {}
        Err(e) => panic!("unexpected error {e}"),
    }
}

#[test]
fn map_leaving_the_domain_is_rejected() {
    let space = ProbabilitySpace::uniform(2).unwrap();
    let s = L0Simplex::<f64>::standard(&space, 3);
    let f = SigmaStableMap::new(Domain::Simplex(s.clone()), |a, x| {
        if a == 1 {
            vec![2.0, -1.0, 0.0]
        } else {
            x.to_vec()
        }
    });
    match solve_on_simplex(&s, &f, &opts(1e-3)) {
        Err(Error::MapLeavesDomain { atom: 1, .. }) => {}
        other => panic!("expected the atom-1 escape, got {other:?}"),
    }
    let bad = families::affine(
        Domain::Simplex(s.clone()),
        vec![vec![vec![2.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]; 2],
        L0Vector::zeros(&space, 3),
    );
    assert!(matches!(bad, Err(Error::InvalidMap(_))));
}

#[test]
fn mixed_ball_problem_splices() {
    let space = ProbabilitySpace::uniform(2).unwrap();
    let center = L0Vector::new(&space, vec![vec![1.0, 1.0], vec![-2.0, 0.5]]).unwrap();
    let ball = RandomBall::new(center.clone(), L0Scalar::new(&space, vec![0.5, 2.0]).unwrap()).unwrap();
    let c = L0Vector::new(&space, vec![vec![1.2, 0.9], vec![-1.5, 0.0]]).unwrap();
    let rot = families::rotation(ball.clone(), L0Scalar::constant(&space, 1.0)).unwrap();
    let constant = families::constant(Domain::Ball(ball.clone()), c.clone()).unwrap();
    // atom 0 constant, atom 1 rotation
    let (r, k) = (rot.clone(), constant.clone());
    let mixed = SigmaStableMap::new_fallible(Domain::Ball(ball.clone()), move |a, x| {
        if a == 0 {
            k.eval_atom(a, x)
        } else {
            r.eval_atom(a, x)
        }
    });
    let o = opts(1e-5);
    let trace = solve_on_convex(&ball, &mixed, &o).unwrap();
    trace.check_invariants(1e-9).unwrap();
    assert!(dist(trace.x_star.row(0), c.row(0)) <= 1e-4);
    assert!(dist(trace.x_star.row(1), center.row(1)) <= 1e-4);
    let one = ProbabilitySpace::uniform(1).unwrap();
    for (a, f) in [(0, &constant), (1, &rot)] {
        let single = solve_on_convex(&ball.restrict(a, &one), &f.restrict(a, &one), &o).unwrap();
        assert_eq!(single.x_star.row(0), trace.x_star.row(a));
        assert_eq!(single.iterations[0], trace.iterations[a]);
    }
}

#[test]
fn projection_examples() {
    let space = ProbabilitySpace::uniform(1).unwrap();
    let ball = RandomBall::unit(&space, 2);
    let x = L0Vector::constant(&space, vec![2.0, 0.0]);
    assert_eq!(project_convex(&Domain::Ball(ball), &x).unwrap().row(0), &[1.0, 0.0]);
    // grid search over the segment as oracle
    let seg: [&[f64]; 2] = [&[0.0, 0.0], &[1.0, 0.0]];
    let p = project_simplex_row(&seg, &[2.0, 1.0]);
    let best = (0..=1000)
        .map(|i| i as f64 / 1000.0)
        .min_by(|s, t| dist(&[*s, 0.0], &[2.0, 1.0]).total_cmp(&dist(&[*t, 0.0], &[2.0, 1.0])))
        .unwrap();
    assert!(dist(&p, &[best, 0.0]) <= 1e-3);
    assert_eq!(p, vec![1.0, 0.0]);
    let exact = L0Simplex::<Rational>::standard(&space, 3);
    assert!(matches!(
        project_convex(&Domain::Ball(RandomBall::new(
            L0Vector::zeros(&space, 3),
            L0Scalar::constant(&space, q(1, 1))
        ).unwrap()), &exact.barycenter()),
        Err(Error::Unsupported(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn projections_are_nonexpansive(seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = rng(seed);
        let d = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=d + 1);
        let s = random_simplex::<f64>(&mut rng, &ProbabilitySpace::uniform(1).unwrap(), n.max(2).min(d + 1), d);
        let rows = s.rows_at(0);
        let center: Vec<f64> = (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let r: f64 = rng.gen_range(0.5..3.0);
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let y: Vec<f64> = (0..d).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let (px, py) = (project_simplex_row(&rows, &x), project_simplex_row(&rows, &y));
        prop_assert!(dist(&px, &py) <= dist(&x, &y) + 1e-9);
        prop_assert_eq!(project_simplex_row(&rows, &px), px.clone());
        let (bx, by) = (project_ball_row(&center, &r, &x), project_ball_row(&center, &r, &y));
        prop_assert!(dist(&bx, &by) <= dist(&x, &y) + 1e-9);
        prop_assert_eq!(project_ball_row(&center, &r, &bx), bx.clone());
    }
}

#[test]
fn borsuk_examples() {
    let space = ProbabilitySpace::uniform(1).unwrap();
    let line = RandomBall::unit(&space, 1);
    let f = families::constant(Domain::Ball(line), L0Vector::constant(&space, vec![1.0])).unwrap();
    let h = borsuk_retraction(&f, &L0Vector::constant(&space, vec![0.0])).unwrap();
    assert_eq!(h.row(0), &[-1.0]);

    let plane = RandomBall::unit(&space, 2);
    let c = vec![0.25, -0.5];
    let f = families::constant(Domain::Ball(plane), L0Vector::constant(&space, c.clone())).unwrap();
    let on_sphere = L0Vector::constant(&space, vec![0.6, 0.8]);
    assert_eq!(borsuk_retraction(&f, &on_sphere).unwrap(), on_sphere);
    // along a path into the fixed point the output stays on the sphere
    // until the ray degenerates
    let start = [-0.5, 0.5];
    let mut saw_error = false;
    for e in 0..20 {
        let s = 10f64.powi(-e);
        let x: Vec<f64> = c.iter().zip(start).map(|(ci, si)| ci + s * (si - ci)).collect();
        match borsuk_retraction(&f, &L0Vector::constant(&space, x)) {
            Ok(h) => {
                assert!(!saw_error);
                assert!((dist(h.row(0), &[0.0, 0.0]) - 1.0).abs() <= 1e-9);
            }
            Err(Error::DegenerateRetraction { atom: 0 }) => saw_error = true,
            Err(e) => panic!("unexpected error {e}"),
        }
    }
    assert!(saw_error);
    assert!(matches!(
        borsuk_retraction(&f, &L0Vector::constant(&space, vec![1.0, 1.0])),
        Err(Error::OutsideDomain { atom: 0, .. })
    ));
}
