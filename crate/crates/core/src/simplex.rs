//! Classical simplexes, L0-simplexes and barycentric coordinates.

use crate::error::{Error, Result};
use crate::l0::{splice_index, Concatenate, L0Scalar, L0Vector};
use crate::linalg;
use crate::measure::{PartitionOfUnity, ProbabilitySpace};
use crate::scalar::{Scalar, FLOAT_EQ_TOL};

/// Relative tolerance for float points that should lie in an affine hull.
pub const AFFINE_HULL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Independence<S> {
    Independent,
    /// Coefficients `c` with `sum c_i = 0` and `sum c_i x_i(atom) = 0`,
    /// scaled so the first nonzero entry is 1.
    Dependent { atom: usize, certificate: Vec<S> },
}

impl<S> Independence<S> {
    pub fn is_independent(&self) -> bool {
        matches!(self, Independence::Independent)
    }
}

/// Affine dependence of one atom's vertices.
pub fn affine_dependence<S: Scalar>(rows: &[&[S]]) -> Option<Vec<S>> {
    let n = rows.len();
    if n <= 1 {
        return None;
    }
    let diffs: Vec<Vec<S>> = rows[1..].iter().map(|r| linalg::sub(r, rows[0])).collect();
    let c = S::linear_dependence(&diffs)?;
    let mut cert = Vec::with_capacity(n);
    cert.push(-c.iter().fold(S::zero(), |acc, v| acc + v.clone()));
    cert.extend(c);
    let lead = cert
        .iter()
        .find(|v| !v.is_negligible(1.0))
        .cloned()
        .unwrap_or_else(S::one);
    Some(cert.into_iter().map(|v| v / lead.clone()).collect())
}

pub fn check_l0_affine_independence<S: Scalar>(vertices: &[L0Vector<S>]) -> Result<Independence<S>> {
    check_shapes(vertices)?;
    let space = vertices[0].space();
    for atom in 0..space.atom_count() {
        let rows: Vec<&[S]> = vertices.iter().map(|v| v.row(atom)).collect();
        if let Some(certificate) = affine_dependence(&rows) {
            return Ok(Independence::Dependent { atom, certificate });
        }
    }
    Ok(Independence::Independent)
}

fn check_shapes<S: Scalar>(vertices: &[L0Vector<S>]) -> Result<()> {
    let first = vertices
        .first()
        .ok_or_else(|| Error::Shape("a simplex needs at least one vertex".into()))?;
    for v in vertices {
        v.space().ensure_same(first.space())?;
        if v.dim() != first.dim() {
            return Err(Error::Shape(format!(
                "vertex dimension {} vs {}",
                v.dim(),
                first.dim()
            )));
        }
    }
    Ok(())
}

/// Raw solution of `sum λ_i v_i = x, sum λ_i = 1`, or `None` when `x` is off
/// the affine hull. Signs are not checked.
pub fn solve_affine<S: Scalar>(rows: &[&[S]], x: &[S]) -> Option<Vec<S>> {
    let n = rows.len();
    let d = x.len();
    let mut m: Vec<Vec<S>> = (0..d)
        .map(|i| {
            let mut r: Vec<S> = rows.iter().map(|v| v[i].clone()).collect();
            r.push(x[i].clone());
            r
        })
        .collect();
    let mut ones = vec![S::one(); n];
    ones.push(S::one());
    m.push(ones);
    let scale = linalg::magnitude(&m);
    let pivots = linalg::row_reduce(&mut m, n, scale);
    if pivots.len() < n {
        return None;
    }
    let off_hull = |v: &S| {
        if S::EXACT {
            !v.is_zero()
        } else {
            v.to_f64().abs() > AFFINE_HULL_TOL * scale.max(1.0)
        }
    };
    if m[n..].iter().any(|r| off_hull(&r[n])) {
        return None;
    }
    Some(m[..n].iter().map(|r| r[n].clone()).collect())
}

/// Barycentric coordinates of `x` at one atom. Float coordinates within
/// 1e-12 below zero are clamped.
pub fn coords_at<S: Scalar>(rows: &[&[S]], x: &[S], atom: usize) -> Result<Vec<S>> {
    let mut lam = solve_affine(rows, x).ok_or_else(|| Error::OutsideSimplex {
        atom,
        detail: "point is off the affine hull".into(),
    })?;
    for (i, l) in lam.iter_mut().enumerate() {
        if l.lt_zero() {
            if !l.nonneg(FLOAT_EQ_TOL) {
                return Err(Error::OutsideSimplex {
                    atom,
                    detail: format!("λ_{} = {} < 0", i + 1, l.repr()),
                });
            }
            *l = S::zero();
        }
    }
    Ok(lam)
}

pub fn diameter_squared_of<S: Scalar>(rows: &[&[S]]) -> S {
    let mut best = S::zero();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            best = S::max_of(best, linalg::dist_sq(rows[i], rows[j]));
        }
    }
    best
}

/// A simplex in `R^d` with affinely independent vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalSimplex<S> {
    vertices: Vec<Vec<S>>,
}

impl<S: Scalar> ClassicalSimplex<S> {
    pub fn new(vertices: Vec<Vec<S>>) -> Result<Self> {
        let d = vertices
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::Shape("a simplex needs at least one vertex".into()))?;
        if vertices.iter().any(|v| v.len() != d) {
            return Err(Error::Shape("vertices differ in dimension".into()));
        }
        let rows: Vec<&[S]> = vertices.iter().map(Vec::as_slice).collect();
        if affine_dependence(&rows).is_some() {
            return Err(Error::AffinelyDependent { atom: 0 });
        }
        Ok(ClassicalSimplex { vertices })
    }

    /// The standard simplex `e_1..e_n` in `R^n`.
    pub fn standard(n: usize) -> Self {
        ClassicalSimplex {
            vertices: (0..n)
                .map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect())
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[Vec<S>] {
        &self.vertices
    }

    fn rows(&self) -> Vec<&[S]> {
        self.vertices.iter().map(Vec::as_slice).collect()
    }

    pub fn barycentric(&self, x: &[S]) -> Result<Vec<S>> {
        coords_at(&self.rows(), x, 0)
    }

    pub fn point(&self, lambdas: &[S]) -> Vec<S> {
        linalg::combine(lambdas, &self.rows())
    }

    pub fn diameter_squared(&self) -> S {
        diameter_squared_of(&self.rows())
    }
}

/// `Conv_L0({x_1..x_n})` with per-atom affinely independent vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct L0Simplex<S> {
    vertices: Vec<L0Vector<S>>,
}

impl<S: Scalar> L0Simplex<S> {
    pub fn new(vertices: Vec<L0Vector<S>>) -> Result<Self> {
        match check_l0_affine_independence(&vertices)? {
            Independence::Independent => Ok(L0Simplex { vertices }),
            Independence::Dependent { atom, .. } => Err(Error::AffinelyDependent { atom }),
        }
    }

    /// Caller guarantees shapes and per-atom independence.
    pub(crate) fn new_unchecked(vertices: Vec<L0Vector<S>>) -> Self {
        debug_assert!(check_shapes(&vertices).is_ok());
        L0Simplex { vertices }
    }

    /// The same classical simplex at every atom.
    pub fn constant(space: &ProbabilitySpace, simplex: &ClassicalSimplex<S>) -> Self {
        L0Simplex {
            vertices: simplex
                .vertices
                .iter()
                .map(|v| L0Vector::constant(space, v.clone()))
                .collect(),
        }
    }

    pub fn standard(space: &ProbabilitySpace, n: usize) -> Self {
        Self::constant(space, &ClassicalSimplex::standard(n))
    }

    pub fn space(&self) -> &ProbabilitySpace {
        self.vertices[0].space()
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    pub fn vertices(&self) -> &[L0Vector<S>] {
        &self.vertices
    }

    pub fn vertex(&self, j: usize) -> &L0Vector<S> {
        &self.vertices[j]
    }

    pub fn rows_at(&self, atom: usize) -> Vec<&[S]> {
        self.vertices.iter().map(|v| v.row(atom)).collect()
    }

    /// The classical simplex at one atom.
    pub fn counterpart(&self, atom: usize) -> ClassicalSimplex<S> {
        ClassicalSimplex {
            vertices: self.rows_at(atom).into_iter().map(<[S]>::to_vec).collect(),
        }
    }

    pub fn point(&self, coords: &BarycentricCoords<S>) -> L0Vector<S> {
        L0Vector::from_rows_fn(self.space(), self.dim(), |a| {
            linalg::combine(&coords.at(a), &self.rows_at(a))
        })
    }

    pub fn barycenter(&self) -> L0Vector<S> {
        let n = S::from_int(self.n() as i64);
        L0Vector::from_rows_fn(self.space(), self.dim(), |a| {
            let rows = self.rows_at(a);
            (0..self.dim())
                .map(|i| rows.iter().fold(S::zero(), |acc, r| acc + r[i].clone()) / n.clone())
                .collect()
        })
    }

    pub fn contains(&self, x: &L0Vector<S>) -> bool {
        barycentric_coordinates(self, x).is_ok()
    }

    /// The counterpart at `atom` as a simplex over a one-atom space.
    pub fn restrict(&self, atom: usize, target: &ProbabilitySpace) -> Self {
        L0Simplex {
            vertices: self.vertices.iter().map(|v| v.restrict(atom, target)).collect(),
        }
    }

    pub fn to_f64(&self) -> L0Simplex<f64> {
        L0Simplex {
            vertices: self.vertices.iter().map(L0Vector::to_f64).collect(),
        }
    }
}

/// Coordinates `λ_1..λ_n`, each an L0 scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct BarycentricCoords<S> {
    lambdas: Vec<L0Scalar<S>>,
}

impl<S: Scalar> BarycentricCoords<S> {
    pub fn new(lambdas: Vec<L0Scalar<S>>) -> Result<Self> {
        let first = lambdas
            .first()
            .ok_or_else(|| Error::Shape("no coordinates".into()))?;
        let space = first.space().clone();
        for atom in 0..space.atom_count() {
            let mut sum = S::zero();
            for (i, l) in lambdas.iter().enumerate() {
                l.space().ensure_same(&space)?;
                if !l.get(atom).nonneg(FLOAT_EQ_TOL) {
                    return Err(Error::OutsideSimplex {
                        atom,
                        detail: format!("λ_{} = {} < 0", i + 1, l.get(atom).repr()),
                    });
                }
                sum = sum + l.get(atom).clone();
            }
            if !sum.approx_eq(&S::one(), FLOAT_EQ_TOL) {
                return Err(Error::Shape(format!(
                    "coordinates at atom {atom} sum to {}",
                    sum.repr()
                )));
            }
        }
        Ok(BarycentricCoords { lambdas })
    }

    /// Builds coordinates from per-atom rows.
    pub fn from_rows(space: &ProbabilitySpace, rows: &[Vec<S>]) -> Result<Self> {
        let n = rows.first().map(Vec::len).unwrap_or(0);
        Self::new(
            (0..n)
                .map(|i| L0Scalar::from_fn(space, |a| rows[a][i].clone()))
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[L0Scalar<S>] {
        &self.lambdas
    }

    pub fn at(&self, atom: usize) -> Vec<S> {
        self.lambdas.iter().map(|l| l.get(atom).clone()).collect()
    }
}

pub fn barycentric_coordinates<S: Scalar>(
    simplex: &L0Simplex<S>,
    x: &L0Vector<S>,
) -> Result<BarycentricCoords<S>> {
    x.space().ensure_same(simplex.space())?;
    if x.dim() != simplex.dim() {
        return Err(Error::Shape(format!(
            "point dimension {} vs simplex dimension {}",
            x.dim(),
            simplex.dim()
        )));
    }
    let space = simplex.space().clone();
    let rows = (0..space.atom_count())
        .map(|a| coords_at(&simplex.rows_at(a), x.row(a), a))
        .collect::<Result<Vec<_>>>()?;
    Ok(BarycentricCoords {
        lambdas: (0..simplex.n())
            .map(|i| L0Scalar::from_fn(&space, |a| rows[a][i].clone()))
            .collect(),
    })
}

/// Per-atom squared diameter, the largest squared vertex distance.
pub fn l0_diameter_squared<S: Scalar>(simplex: &L0Simplex<S>) -> L0Scalar<S> {
    L0Scalar::from_fn(simplex.space(), |a| diameter_squared_of(&simplex.rows_at(a)))
}

pub fn l0_diameter<S: Scalar>(simplex: &L0Simplex<S>) -> L0Scalar<f64> {
    l0_diameter_squared(simplex).map(|v| v.to_f64().sqrt())
}

/// Vertex `j` of the result is the concatenation of the `j`-th vertices.
pub fn concatenate_simplexes<S: Scalar>(
    cells: &[L0Simplex<S>],
    partition: &PartitionOfUnity,
) -> Result<L0Simplex<S>> {
    L0Simplex::concatenate(cells, partition)
}

impl<S: Scalar> Concatenate for L0Simplex<S> {
    fn space(&self) -> &ProbabilitySpace {
        L0Simplex::space(self)
    }

    fn concatenate(items: &[Self], partition: &PartitionOfUnity) -> Result<Self> {
        splice_index(items, partition)?;
        let n = items[0].n();
        if items.iter().any(|c| c.n() != n) {
            return Err(Error::Shape("cells have different vertex counts".into()));
        }
        let vertices = (0..n)
            .map(|j| {
                let column: Vec<L0Vector<S>> = items.iter().map(|c| c.vertices[j].clone()).collect();
                L0Vector::concatenate(&column, partition)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(L0Simplex::new_unchecked(vertices))
    }
}

impl<S: Scalar> Concatenate for BarycentricCoords<S> {
    fn space(&self) -> &ProbabilitySpace {
        self.lambdas[0].space()
    }

    fn concatenate(items: &[Self], partition: &PartitionOfUnity) -> Result<Self> {
        splice_index(items, partition)?;
        let n = items[0].n();
        if items.iter().any(|c| c.n() != n) {
            return Err(Error::Shape("coordinate counts differ".into()));
        }
        let lambdas = (0..n)
            .map(|i| {
                let column: Vec<L0Scalar<S>> = items.iter().map(|c| c.lambdas[i].clone()).collect();
                L0Scalar::concatenate(&column, partition)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BarycentricCoords { lambdas })
    }
}
