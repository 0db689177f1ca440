use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use randfix_bench::{contraction, rational_point, standard};
use randfix_core::fixpoint::project::{project_ball_row, project_simplex, project_simplex_row};
use randfix_core::{
    iterated_barycentric_subdivision, random_sperner_search, Domain, solve_on_simplex, CellSelection, L0Labeling, Rational,
    SolverOptions,
};

fn subdivision(c: &mut Criterion) {
    let mut g = c.benchmark_group("subdivision");
    for (n, depth) in [(3, 1), (3, 3), (4, 2)] {
        let s = standard::<Rational>(4, n);
        g.bench_with_input(BenchmarkId::new(format!("n{n}"), depth), &depth, |b, &d| {
            b.iter(|| iterated_barycentric_subdivision(black_box(&s), d).unwrap())
        });
    }
    g.finish();
}

fn sperner_search(c: &mut Criterion) {
    let mut g = c.benchmark_group("sperner_search");
    for k in [1, 8, 64] {
        let sub = iterated_barycentric_subdivision(&standard::<Rational>(k, 3), 2).unwrap();
        // atom a labels with the smallest or largest carrier index, alternating
        let tuples: Vec<Vec<usize>> = (0..k)
            .map(|a| {
                (0..sub.registry().len())
                    .map(|id| {
                        let chi = sub.chi(id);
                        if a % 2 == 0 { chi[0] } else { chi[chi.len() - 1] }
                    })
                    .collect()
            })
            .collect();
        let phi = L0Labeling::from_atom_tuples(&sub, &tuples).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, _| {
            b.iter(|| random_sperner_search(black_box(&sub), black_box(&phi)).unwrap())
        });
    }
    g.finish();
}

fn solver(c: &mut Criterion) {
    let mut g = c.benchmark_group("solver");
    g.sample_size(10);
    let opts = SolverOptions { epsilon: 1e-4, max_iter: 100, selection: CellSelection::PlZero };
    for k in [1, 16] {
        let map = contraction::<f64>(k, 3);
        let Domain::Simplex(s) = map.domain().clone() else { unreachable!() };
        g.bench_with_input(BenchmarkId::new("float", k), &k, |b, _| {
            b.iter(|| solve_on_simplex(black_box(&s), &map, &opts).unwrap())
        });
    }
    let exact = SolverOptions { epsilon: 1e-2, ..opts };
    let map = contraction::<Rational>(2, 3);
    let Domain::Simplex(s) = map.domain().clone() else { unreachable!() };
    g.bench_function("rational/2", |b| b.iter(|| solve_on_simplex(black_box(&s), &map, &exact).unwrap()));
    g.finish();
}

fn projection(c: &mut Criterion) {
    let mut g = c.benchmark_group("projection");
    let rows: Vec<Vec<f64>> = (0..4).map(|j| (0..4).map(|i| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
    let x = [0.9, -0.3, 0.7, 0.2];
    g.bench_function("simplex_row/float", |b| b.iter(|| project_simplex_row(black_box(&refs), black_box(&x))));
    let center = [0.0; 4];
    g.bench_function("ball_row/float", |b| b.iter(|| project_ball_row(black_box(&center), &1.0, black_box(&x))));
    let s = standard::<Rational>(8, 3);
    let p = rational_point(s.space(), 3);
    g.bench_function("simplex/rational/8", |b| {
        b.iter(|| project_simplex(black_box(&s), black_box(&p)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, subdivision, sperner_search, solver, projection);
criterion_main!(benches);
