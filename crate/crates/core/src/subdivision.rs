//! Barycentric and midpoint subdivisions of L0-simplexes.
//!
//! Registry vertices keep their exact barycentric weights relative to the
//! parent. The weights are the same at every atom, so combinatorial checks
//! run once in weight space and carry over to every counterpart simplex.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::l0::{L0Scalar, L0Vector};
use crate::linalg;
use crate::scalar::{Rational, Scalar, FLOAT_EQ_TOL};
use crate::simplex::{coords_at, diameter_squared_of, L0Simplex};

#[derive(Debug, Clone, PartialEq)]
pub struct RegistryVertex<S> {
    weights: Vec<Rational>,
    point: L0Vector<S>,
}

impl<S: Scalar> RegistryVertex<S> {
    /// Exact barycentric coordinates relative to the parent simplex.
    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn point(&self) -> &L0Vector<S> {
        &self.point
    }

    /// `χ(y) = {i : α_i > 0}`, 1-based.
    pub fn chi(&self) -> Vec<usize> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| w.is_positive())
            .map(|(i, _)| i + 1)
            .collect()
    }
}

/// Cells are lists of registry ids in cell-vertex order.
#[derive(Debug, Clone, PartialEq)]
pub struct Subdivision<S> {
    parent: L0Simplex<S>,
    registry: Vec<RegistryVertex<S>>,
    cells: Vec<Vec<usize>>,
}

struct Builder<'a, S> {
    parent: &'a L0Simplex<S>,
    registry: Vec<RegistryVertex<S>>,
    index: HashMap<Vec<Rational>, usize>,
}

impl<'a, S: Scalar> Builder<'a, S> {
    fn new(parent: &'a L0Simplex<S>) -> Self {
        Builder {
            parent,
            registry: Vec::new(),
            index: HashMap::new(),
        }
    }

    fn intern(&mut self, weights: Vec<Rational>) -> usize {
        if let Some(&id) = self.index.get(&weights) {
            return id;
        }
        let w: Vec<S> = weights.iter().map(S::from_rational).collect();
        let parent = self.parent;
        let point = L0Vector::from_rows_fn(parent.space(), parent.dim(), |a| {
            linalg::combine(&w, &parent.rows_at(a))
        });
        let id = self.registry.len();
        self.index.insert(weights.clone(), id);
        self.registry.push(RegistryVertex { weights, point });
        id
    }

    fn finish(self, cells: Vec<Vec<usize>>) -> Subdivision<S> {
        Subdivision {
            parent: self.parent.clone(),
            registry: self.registry,
            cells,
        }
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// Nonempty subsets of `0..n`, by size and then lexicographically.
pub fn subsets_by_size(n: usize) -> Vec<Vec<usize>> {
    fn combos(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            combos(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for k in 1..=n {
        combos(n, k, 0, &mut Vec::new(), &mut out);
    }
    out
}

fn average(rows: &[&[Rational]]) -> Vec<Rational> {
    let k = Rational::from_int(rows.len() as i64);
    (0..rows[0].len())
        .map(|i| rows.iter().map(|r| r[i].clone()).sum::<Rational>() / k.clone())
        .collect()
}

fn unit_weights(n: usize, i: usize) -> Vec<Rational> {
    (0..n)
        .map(|j| if i == j { Rational::one() } else { Rational::zero() })
        .collect()
}

/// The `n!` cells `y_k = mean(x_π(1..k))`, permutations in lexicographic order.
pub fn barycentric_subdivision<S: Scalar>(parent: &L0Simplex<S>) -> Subdivision<S> {
    let n = parent.n();
    let mut b = Builder::new(parent);
    let mut subset_id = HashMap::new();
    for subset in subsets_by_size(n) {
        let k = Rational::from_ratio(1, subset.len() as i64);
        let w = (0..n)
            .map(|i| if subset.contains(&i) { k.clone() } else { Rational::zero() })
            .collect();
        subset_id.insert(subset.clone(), b.intern(w));
    }
    let cells = permutations(n)
        .into_iter()
        .map(|p| {
            (1..=n)
                .map(|k| {
                    let mut s = p[..k].to_vec();
                    s.sort_unstable();
                    subset_id[&s]
                })
                .collect()
        })
        .collect();
    b.finish(cells)
}

/// Barycentric subdivision applied `depth` times. Children of each cell come
/// in permutation order; the registry is deduplicated by weights.
pub fn iterated_barycentric_subdivision<S: Scalar>(parent: &L0Simplex<S>, depth: usize) -> Result<Subdivision<S>> {
    if depth == 0 {
        return Err(Error::Shape("depth must be at least 1".into()));
    }
    let n = parent.n();
    let mut b = Builder::new(parent);
    let mut cells: Vec<Vec<usize>> = vec![(0..n).map(|i| b.intern(unit_weights(n, i))).collect()];
    let perms = permutations(n);
    for _ in 0..depth {
        let mut next = Vec::with_capacity(cells.len() * perms.len());
        for cell in &cells {
            let ws: Vec<Vec<Rational>> = cell.iter().map(|&id| b.registry[id].weights.clone()).collect();
            for p in &perms {
                let child = (1..=n)
                    .map(|k| {
                        let rows: Vec<&[Rational]> = p[..k].iter().map(|&i| ws[i].as_slice()).collect();
                        b.intern(average(&rows))
                    })
                    .collect();
                next.push(child);
            }
        }
        cells = next;
    }
    Ok(b.finish(cells))
}

/// The four-cell midpoint subdivision of a 2-simplex. Registry order:
/// `x1, x2, x3, y12, y13, y23`.
pub fn midpoint_subdivision_2simplex<S: Scalar>(parent: &L0Simplex<S>) -> Result<Subdivision<S>> {
    if parent.n() != 3 {
        return Err(Error::Shape(format!(
            "midpoint subdivision needs n = 3, got {}",
            parent.n()
        )));
    }
    let mut b = Builder::new(parent);
    for i in 0..3 {
        b.intern(unit_weights(3, i));
    }
    let half = Rational::from_ratio(1, 2);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let mut w = vec![Rational::zero(); 3];
        w[i] = half.clone();
        w[j] = half.clone();
        b.intern(w);
    }
    Ok(b.finish(vec![vec![0, 3, 4], vec![1, 3, 5], vec![2, 4, 5], vec![3, 4, 5]]))
}

impl<S: Scalar> Subdivision<S> {
    pub fn parent(&self) -> &L0Simplex<S> {
        &self.parent
    }

    pub fn n(&self) -> usize {
        self.parent.n()
    }

    pub fn registry(&self) -> &[RegistryVertex<S>] {
        &self.registry
    }

    pub fn vertex(&self, id: usize) -> &RegistryVertex<S> {
        &self.registry[id]
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn chi(&self, id: usize) -> Vec<usize> {
        self.registry[id].chi()
    }

    pub fn cell_simplex(&self, cell: usize) -> L0Simplex<S> {
        L0Simplex::new_unchecked(
            self.cells[cell]
                .iter()
                .map(|&id| self.registry[id].point.clone())
                .collect(),
        )
    }

    /// The simplex with vertices `ids`, which must span a cell.
    pub fn simplex_of(&self, ids: &[usize]) -> L0Simplex<S> {
        L0Simplex::new_unchecked(ids.iter().map(|&id| self.registry[id].point.clone()).collect())
    }

    fn cell_diameter_squared_at(&self, cell: usize, atom: usize) -> S {
        let rows: Vec<&[S]> = self.cells[cell].iter().map(|&id| self.registry[id].point.row(atom)).collect();
        diameter_squared_of(&rows)
    }

    /// Per-atom maximum over cells of the squared cell diameter.
    pub fn diameter_squared(&self) -> L0Scalar<S> {
        L0Scalar::from_fn(self.parent.space(), |a| {
            (0..self.cells.len())
                .map(|c| self.cell_diameter_squared_at(c, a))
                .fold(S::zero(), S::max_of)
        })
    }

    /// Per atom, the first cell containing `x`.
    pub fn locate(&self, x: &L0Vector<S>) -> Result<Vec<usize>> {
        x.space().ensure_same(self.parent.space())?;
        let n = self.n();
        let cell_weights: Vec<Vec<Vec<S>>> = self
            .cells
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&id| self.registry[id].weights.iter().map(S::from_rational).collect())
                    .collect()
            })
            .collect();
        (0..self.parent.space().atom_count())
            .map(|a| {
                let alpha = coords_at(&self.parent.rows_at(a), x.row(a), a)?;
                cell_weights
                    .iter()
                    .position(|ws| {
                        let rows: Vec<&[S]> = ws.iter().map(Vec::as_slice).collect();
                        coords_at(&rows, &alpha, a).is_ok()
                    })
                    .ok_or_else(|| Error::OutsideSimplex {
                        atom: a,
                        detail: format!("no cell of the {n}-vertex subdivision contains the point"),
                    })
            })
            .collect()
    }

    /// Sum of cell volumes in weight space equals the parent volume.
    pub fn volumes_add_up(&self) -> bool {
        let n = self.n();
        if n == 1 {
            return self.cells.len() == 1;
        }
        let reduced = |id: usize| -> Vec<Rational> { self.registry[id].weights[..n - 1].to_vec() };
        let total: Rational = self
            .cells
            .iter()
            .map(|c| {
                let base = reduced(c[0]);
                let m: Vec<Vec<Rational>> = c[1..].iter().map(|&id| linalg::sub(&reduced(id), &base)).collect();
                linalg::determinant(&m).abs()
            })
            .sum();
        total.is_one()
    }

    /// Every pair of cells meets in the hull of its shared vertices.
    /// The check enumerates the vertices of each pairwise intersection
    /// exactly; intended for `n <= 4`.
    pub fn check_face_intersections(&self) -> std::result::Result<(), String> {
        let n = self.n();
        let forms: Vec<Vec<Vec<Rational>>> = self.cells.iter().map(|c| self.coordinate_forms(c)).collect();
        for p in 0..self.cells.len() {
            for q in p + 1..self.cells.len() {
                let shared: Vec<usize> = self.cells[p]
                    .iter()
                    .copied()
                    .filter(|id| self.cells[q].contains(id))
                    .collect();
                let mut constraints = forms[p].clone();
                constraints.extend(forms[q].iter().cloned());
                for v in intersection_vertices(&constraints, n) {
                    if !shared.iter().any(|&id| self.registry[id].weights == v) {
                        return Err(format!(
                            "cells {p} and {q} meet at {v:?}, which is not a shared vertex"
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Rows of the inverse vertex matrix: the linear forms giving
    /// barycentric coordinates of a weight vector relative to the cell.
    fn coordinate_forms(&self, cell: &[usize]) -> Vec<Vec<Rational>> {
        let n = self.n();
        let cols: Vec<&Vec<Rational>> = cell.iter().map(|&id| &self.registry[id].weights).collect();
        let mut m: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                let mut row: Vec<Rational> = cols.iter().map(|c| c[i].clone()).collect();
                row.extend(unit_weights(n, i));
                row
            })
            .collect();
        let pivots = linalg::row_reduce(&mut m, n, 0.0);
        assert_eq!(pivots.len(), n, "cell vertices are affinely independent");
        m.into_iter().map(|r| r[n..].to_vec()).collect()
    }

    /// Per-atom diameter ratio certificate: `diam(cells)^2 <= r^2 diam(parent)^2`.
    pub fn diameter_bound_holds(&self, ratio: &Rational, slack: f64) -> bool {
        let parent = crate::simplex::l0_diameter_squared(&self.parent);
        let ratio_sq = S::from_rational(&(ratio.clone() * ratio.clone()));
        let cells = self.diameter_squared();
        (0..self.parent.space().atom_count()).all(|a| {
            let bound = ratio_sq.clone() * parent.get(a).clone();
            let lhs = cells.get(a);
            *lhs <= bound || (!S::EXACT && lhs.to_f64() <= bound.to_f64() + slack)
        })
    }
}

/// Vertices of `{w : sum w = 1, f·w >= 0 for every form f}`.
fn intersection_vertices(forms: &[Vec<Rational>], n: usize) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = Vec::new();
    let m = forms.len();
    let mut pick: Vec<usize> = (0..n.saturating_sub(1)).collect();
    loop {
        let mut a: Vec<Vec<Rational>> = pick.iter().map(|&i| forms[i].clone()).collect();
        a.push(vec![Rational::one(); n]);
        let mut b = vec![Rational::zero(); n - 1];
        b.push(Rational::one());
        if let Some(w) = linalg::solve(&a, &b) {
            if forms.iter().all(|f| !linalg::dot(f, &w).is_negative()) && !out.contains(&w) {
                out.push(w);
            }
        }
        // next combination of n-1 out of m
        let k = pick.len();
        let Some(i) = (0..k).rev().find(|&i| pick[i] < m - k + i) else {
            return out;
        };
        pick[i] += 1;
        for j in i + 1..k {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

/// Sources of a finite vertex registry.
pub trait VertexFamily<S> {
    fn vertex_points(&self) -> Vec<&L0Vector<S>>;
}

impl<S: Scalar> VertexFamily<S> for L0Simplex<S> {
    fn vertex_points(&self) -> Vec<&L0Vector<S>> {
        self.vertices().iter().collect()
    }
}

impl<S: Scalar> VertexFamily<S> for Subdivision<S> {
    fn vertex_points(&self) -> Vec<&L0Vector<S>> {
        self.registry.iter().map(|v| &v.point).collect()
    }
}

/// The σ-stable hull of a finite registry, kept lazy: an element is an
/// assignment atom -> registry id.
pub struct ExtremePoints<'a, S> {
    points: Vec<&'a L0Vector<S>>,
}

pub fn l0_extreme_points<S: Scalar, T: VertexFamily<S>>(source: &T) -> ExtremePoints<'_, S> {
    ExtremePoints {
        points: source.vertex_points(),
    }
}

impl<'a, S: Scalar> ExtremePoints<'a, S> {
    pub fn registry(&self) -> &[&'a L0Vector<S>] {
        &self.points
    }

    /// Assignment realizing `x`, taking the first matching id per atom.
    pub fn member(&self, x: &L0Vector<S>) -> Option<Vec<usize>> {
        let k = self.points.first()?.space().atom_count();
        (0..k)
            .map(|a| {
                self.points.iter().position(|p| {
                    p.row(a).iter().zip(x.row(a)).all(|(u, v)| u.approx_eq(v, FLOAT_EQ_TOL))
                })
            })
            .collect()
    }

    pub fn point(&self, assignment: &[usize]) -> L0Vector<S> {
        let first = self.points[0];
        L0Vector::from_rows_fn(first.space(), first.dim(), |a| self.points[assignment[a]].row(a).to_vec())
    }

    /// Every assignment, atom 0 varying fastest.
    pub fn assignments(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let k = self.points.first().map(|p| p.space().atom_count()).unwrap_or(0);
        let r = self.points.len();
        let total = if r == 0 { 0 } else { r.checked_pow(k as u32).unwrap_or(usize::MAX) };
        (0..total).map(move |mut code| {
            (0..k)
                .map(|_| {
                    let d = code % r;
                    code /= r;
                    d
                })
                .collect()
        })
    }
}
