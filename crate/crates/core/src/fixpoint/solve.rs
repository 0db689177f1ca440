//! Nested barycentric descent towards a fixed point.
//!
//! Each round subdivides the current simplex `S^m` barycentrically and keeps
//! one cell per atom as `S^{m+1}`, so `S^{m+1} ⊆ S^m` and the diameter shrinks
//! by `(n−1)/n`. Coordinates are always taken in the original simplex `S`.
//!
//! Two rules pick the cell:
//!
//! * `PlZero` takes the first cell whose vertex displacements
//!   `δ(v) = μ(v) − λ(v)` have `0` in their convex hull, or failing that the
//!   cell whose hull comes closest to `0`. For affine maps `δ` is affine, so
//!   the chosen cell always contains a fixed point.
//! * `Sperner` labels the subdivision with `label_from_map` and takes the
//!   cell returned by `random_sperner_search`. The labels are proper with
//!   respect to `S` but in general not with respect to `S^m`, so from the
//!   second round on this rule can fail with `ImproperLabeling`.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::label::label_with_fallback;
use super::map::{Domain, RandomBall, SigmaStableMap};
use super::project::{min_norm_point, project_ball_row};
use crate::error::{Error, Result};
use crate::l0::{L0Label, L0Scalar, L0Vector};
use crate::linalg;
use crate::measure::PartitionOfUnity;
use crate::scalar::{Rational, Scalar};
use crate::simplex::{coords_at, concatenate_simplexes, l0_diameter_squared, L0Simplex};
use crate::sperner::{random_sperner_search, L0Labeling};
use crate::subdivision::{barycentric_subdivision, Subdivision};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellSelection {
    PlZero,
    Sperner,
}

impl std::str::FromStr for CellSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pl-zero" => Ok(CellSelection::PlZero),
            "sperner" => Ok(CellSelection::Sperner),
            other => Err(Error::Parse(format!(
                "unknown selection rule {other:?}, expected \"pl-zero\" or \"sperner\""
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub epsilon: f64,
    pub max_iter: usize,
    pub selection: CellSelection,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            epsilon: 1e-6,
            max_iter: 200,
            selection: CellSelection::PlZero,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep<S> {
    pub simplex: L0Simplex<S>,
    pub diameter_squared: L0Scalar<S>,
    /// Cell of this simplex's subdivision kept at each atom, `None` once
    /// the atom has stopped.
    pub chosen_cells: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveTrace<S> {
    pub steps: Vec<TraceStep<S>>,
    pub x_star: L0Vector<S>,
    pub residual: L0Scalar<f64>,
    /// Subdivision rounds applied at each atom.
    pub iterations: Vec<usize>,
    pub converged: bool,
}

impl<S: Scalar> SolveTrace<S> {
    pub fn final_simplex(&self) -> &L0Simplex<S> {
        &self.steps.last().expect("a trace has at least one step").simplex
    }

    /// Checks `S^{m+1} ⊆ S^m` and `diam(S^m) <= ((n−1)/n)^m diam(S)` at every
    /// atom along that atom's own rounds. In float mode a vertex may lie up to
    /// `slack` away from its predecessor and diameters may exceed by `slack`.
    pub fn check_invariants(&self, slack: f64) -> std::result::Result<(), String> {
        let first = &self.steps[0];
        let n = first.simplex.n();
        let ratio = Rational::from_ratio(n as i64 - 1, n as i64);
        let ratio_sq = ratio.clone() * ratio;
        for (atom, &iters) in self.iterations.iter().enumerate() {
            let d0 = first.diameter_squared.get(atom).clone();
            let mut bound = S::from_rational(&Rational::one());
            let mut prev_diam = d0.clone();
            for m in 0..=iters.min(self.steps.len() - 1) {
                let step = &self.steps[m];
                let dm = step.diameter_squared.get(atom).clone();
                let limit = bound.clone() * d0.clone();
                let within = |lhs: &S, rhs: &S| {
                    *lhs <= *rhs || (!S::EXACT && lhs.to_f64().sqrt() <= rhs.to_f64().sqrt() + slack)
                };
                if !within(&dm, &limit) {
                    return Err(format!("atom {atom}, step {m}: diameter exceeds the geometric bound"));
                }
                if !within(&dm, &prev_diam) {
                    return Err(format!("atom {atom}, step {m}: diameter increased"));
                }
                if m > 0 {
                    let outer = self.steps[m - 1].simplex.rows_at(atom);
                    for v in step.simplex.rows_at(atom) {
                        // float cells get flat, so coordinates are ill-conditioned;
                        // measure the distance to the predecessor instead
                        let inside = if S::EXACT {
                            coords_at(&outer, v, atom).is_ok()
                        } else {
                            min_norm_point(&outer, v).1.to_f64().sqrt() <= slack
                        };
                        if !inside {
                            return Err(format!("atom {atom}, step {m}: simplex leaves its predecessor"));
                        }
                    }
                }
                prev_diam = dm;
                bound = bound * S::from_rational(&ratio_sq);
            }
        }
        Ok(())
    }
}

/// What one atom keeps from a round.
struct Pick {
    cell: usize,
    ids: Vec<usize>,
}

/// Root coordinates of every registry vertex at one atom.
fn registry_alphas<S: Scalar>(sub: &Subdivision<S>, alpha: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = alpha.len();
    sub.registry()
        .iter()
        .map(|v| {
            let mut out = vec![Rational::zero(); alpha[0].len()];
            for j in 0..n {
                let w = &v.weights()[j];
                if w.is_zero() {
                    continue;
                }
                for (o, a) in out.iter_mut().zip(&alpha[j]) {
                    *o += w.clone() * a.clone();
                }
            }
            out
        })
        .collect()
}

/// `λ` (exact root coordinates as `S`) and `μ` for every registry vertex.
fn evaluate_registry<S: Scalar>(
    root: &L0Simplex<S>,
    f: &SigmaStableMap<S>,
    sub: &Subdivision<S>,
    atom: usize,
    alphas: &[Vec<Rational>],
) -> Result<Vec<(Vec<S>, Vec<S>)>> {
    let rows = root.rows_at(atom);
    sub.registry()
        .iter()
        .zip(alphas)
        .map(|(v, alpha)| {
            let y = v.point().row(atom);
            let fy = f.eval_atom(atom, y)?;
            let mu = coords_at(&rows, &fy, atom).map_err(|e| match e {
                Error::OutsideSimplex { atom, detail } => Error::MapLeavesDomain { atom, detail },
                other => other,
            })?;
            Ok((alpha.iter().map(S::from_rational).collect(), mu))
        })
        .collect()
}

fn pick_pl_zero<S: Scalar>(sub: &Subdivision<S>, lm: &[(Vec<S>, Vec<S>)]) -> Pick {
    let deltas: Vec<Vec<S>> = lm.iter().map(|(l, m)| linalg::sub(m, l)).collect();
    let zero = vec![S::zero(); deltas[0].len()];
    let mut best: Option<(usize, S)> = None;
    for (c, cell) in sub.cells().iter().enumerate() {
        let pts: Vec<&[S]> = cell.iter().map(|&id| deltas[id].as_slice()).collect();
        let (_, d) = min_norm_point(&pts, &zero);
        let better = best.as_ref().is_none_or(|(_, bd)| d < *bd);
        if better {
            let done = d.is_zero();
            best = Some((c, d));
            if done {
                break;
            }
        }
    }
    let cell = best.expect("a subdivision has cells").0;
    Pick {
        cell,
        ids: sub.cells()[cell].clone(),
    }
}

/// Solves on `simplex`, which must be the domain of `f`.
pub fn solve_on_simplex<S: Scalar>(
    simplex: &L0Simplex<S>,
    f: &SigmaStableMap<S>,
    opts: &SolverOptions,
) -> Result<SolveTrace<S>> {
    match f.domain() {
        Domain::Simplex(d) if d == simplex => {}
        _ => return Err(Error::InvalidMap("the map's domain must be the simplex being solved on".into())),
    }
    if !(opts.epsilon.is_finite() && opts.epsilon > 0.0) {
        return Err(Error::InvalidMap(format!("epsilon must be positive, got {}", opts.epsilon)));
    }
    let space = simplex.space().clone();
    let k = space.atom_count();
    let n = simplex.n();
    let eps = S::from_float(opts.epsilon).expect("finite epsilon");
    let eps_sq = eps.clone() * eps;

    let identity: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    let mut alpha: Vec<Vec<Vec<Rational>>> = vec![identity; k];
    let mut current = simplex.clone();
    let mut iterations = vec![0usize; k];
    let mut steps = Vec::new();

    loop {
        let diameter_squared = l0_diameter_squared(&current);
        let mut active: Vec<bool> = diameter_squared.values().iter().map(|d| *d > eps_sq).collect();
        if opts.selection == CellSelection::Sperner && active.iter().any(|&a| a) {
            active = vec![true; k];
        }
        let round = steps.len();
        if round == opts.max_iter || active.iter().all(|a| !a) {
            steps.push(TraceStep {
                simplex: current.clone(),
                diameter_squared,
                chosen_cells: vec![None; k],
            });
            break;
        }
        let sub = barycentric_subdivision(&current);
        let evaluated = (0..k)
            .into_par_iter()
            .map(|a| {
                if !active[a] {
                    return Ok(None);
                }
                let alphas = registry_alphas(&sub, &alpha[a]);
                let lm = evaluate_registry(simplex, f, &sub, a, &alphas)?;
                Ok(Some((alphas, lm)))
            })
            .collect::<Result<Vec<_>>>()?;

        let picks: Vec<Option<Pick>> = match opts.selection {
            CellSelection::PlZero => evaluated
                .par_iter()
                .map(|e| e.as_ref().map(|(_, lm)| pick_pl_zero(&sub, lm)))
                .collect(),
            CellSelection::Sperner => {
                let labels = (0..sub.registry().len())
                    .map(|id| {
                        let per_atom = evaluated
                            .iter()
                            .enumerate()
                            .map(|(a, e)| {
                                let (lambda, mu) = &e.as_ref().expect("all atoms active").1[id];
                                label_with_fallback(lambda, mu)
                                    .ok_or(Error::NoQualifyingLabel { vertex: id, atom: a })
                            })
                            .collect::<Result<Vec<_>>>()?;
                        L0Label::new(&space, n, per_atom)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let phi = L0Labeling::new(&sub, labels)?;
                let found = random_sperner_search(&sub, &phi)?;
                let idx = found.partition().part_index();
                idx.iter()
                    .map(|&m| {
                        Some(Pick {
                            cell: found.cells[m],
                            ids: found.vertex_ids[m].clone(),
                        })
                    })
                    .collect()
            }
        };

        // splice the kept cells along the partition they induce
        let keys: Vec<Option<Vec<usize>>> = picks.iter().map(|p| p.as_ref().map(|p| p.ids.clone())).collect();
        let partition = PartitionOfUnity::group_by(&space, |a| keys[a].clone());
        let pieces: Vec<L0Simplex<S>> = partition
            .parts()
            .iter()
            .map(|part| match &keys[part.first().expect("nonempty part")] {
                Some(ids) => sub.simplex_of(ids),
                None => current.clone(),
            })
            .collect();
        let next = concatenate_simplexes(&pieces, &partition)?;

        for (a, e) in evaluated.into_iter().enumerate() {
            if let (Some((alphas, _)), Some(p)) = (e, &picks[a]) {
                alpha[a] = p.ids.iter().map(|&id| alphas[id].clone()).collect();
                iterations[a] += 1;
            }
        }
        steps.push(TraceStep {
            simplex: current,
            diameter_squared,
            chosen_cells: picks.iter().map(|p| p.as_ref().map(|p| p.cell)).collect(),
        });
        current = next;
    }

    let last = steps.last().expect("at least one step");
    let converged = last.diameter_squared.values().iter().all(|d| *d <= eps_sq);
    let x_star = last.simplex.barycenter();
    let residual = residual(f, &x_star)?;
    Ok(SolveTrace {
        steps,
        x_star,
        residual,
        iterations,
        converged,
    })
}

/// `‖f(x) − x‖` per atom.
pub fn residual<S: Scalar>(f: &SigmaStableMap<S>, x: &L0Vector<S>) -> Result<L0Scalar<f64>> {
    let fx = f.apply(x)?;
    Ok(crate::l0::l0_norm(&fx.sub(x)?))
}

/// Regular simplex with centroid at the ball center and inradius equal to
/// the radius, at every atom.
pub fn circumscribing_simplex(ball: &RandomBall<f64>) -> L0Simplex<f64> {
    let d = ball.dim();
    let n = d + 1;
    // orthonormal basis of the sum-zero hyperplane in R^n
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    for k in 0..d {
        let mut u = vec![0.0; n];
        u[k] = 1.0;
        u[k + 1] = -1.0;
        for b in &basis {
            let p = linalg::dot(&u, b);
            for (ui, bi) in u.iter_mut().zip(b) {
                *ui -= p * bi;
            }
        }
        let norm = linalg::dot(&u, &u).sqrt();
        basis.push(u.into_iter().map(|v| v / norm).collect());
    }
    let unit: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = vec![-1.0 / n as f64; n];
            e[i] += 1.0;
            basis.iter().map(|b| linalg::dot(&e, b)).collect()
        })
        .collect();
    let circumradius = (d as f64 / n as f64).sqrt();
    let inradius = circumradius / d as f64;
    let space = ball.space();
    let vertices = unit
        .iter()
        .map(|v| {
            L0Vector::from_rows_fn(space, d, |a| {
                let s = ball.radius().get(a) / inradius;
                ball.center().row(a).iter().zip(v).map(|(c, x)| c + s * x).collect()
            })
        })
        .collect();
    L0Simplex::new(vertices).expect("a regular simplex is affinely independent")
}

/// Solves `f` on a ball through `f ∘ P_G` on a circumscribing simplex.
/// The returned point is projected back onto the ball.
pub fn solve_on_convex(
    ball: &RandomBall<f64>,
    f: &SigmaStableMap<f64>,
    opts: &SolverOptions,
) -> Result<SolveTrace<f64>> {
    match f.domain() {
        Domain::Ball(b) if b == ball => {}
        _ => return Err(Error::InvalidMap("the map's domain must be the ball being solved on".into())),
    }
    let simplex = circumscribing_simplex(ball);
    let g = ball.clone();
    let lifted = f.precompose(Domain::Simplex(simplex.clone()), move |a, x| {
        project_ball_row(g.center().row(a), g.radius().get(a), x)
    });
    let mut trace = solve_on_simplex(&simplex, &lifted, opts)?;
    let x = L0Vector::from_rows_fn(ball.space(), ball.dim(), |a| {
        project_ball_row(ball.center().row(a), ball.radius().get(a), trace.x_star.row(a))
    });
    trace.residual = residual(f, &x)?;
    trace.x_star = x;
    Ok(trace)
}
