//! Per-atom scalars, vectors and labels, and concatenation along partitions.

use crate::error::{Error, Result};
use crate::linalg;
use crate::measure::{Event, PartitionOfUnity, ProbabilitySpace};
use crate::scalar::{Scalar, FLOAT_EQ_TOL};

/// Objects that can be spliced along a partition of unity: the result agrees
/// with `items[m]` on every atom of part `m`.
pub trait Concatenate: Sized {
    fn space(&self) -> &ProbabilitySpace;

    fn concatenate(items: &[Self], partition: &PartitionOfUnity) -> Result<Self>;
}

/// Checks the preconditions shared by every `Concatenate` impl and returns
/// the part index of each atom.
pub(crate) fn splice_index<T: Concatenate>(
    items: &[T],
    partition: &PartitionOfUnity,
) -> Result<Vec<usize>> {
    if items.len() != partition.len() {
        return Err(Error::Shape(format!(
            "{} items for a partition with {} parts",
            items.len(),
            partition.len()
        )));
    }
    for it in items {
        it.space().ensure_same(partition.space())?;
    }
    Ok(partition.part_index())
}

pub fn concatenate<T: Concatenate>(items: &[T], partition: &PartitionOfUnity) -> Result<T> {
    T::concatenate(items, partition)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Lt,
    Le,
    Eq,
    Gt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct L0Scalar<S> {
    space: ProbabilitySpace,
    values: Vec<S>,
}

impl<S: Scalar> L0Scalar<S> {
    pub fn new(space: &ProbabilitySpace, values: Vec<S>) -> Result<Self> {
        if values.len() != space.atom_count() {
            return Err(Error::Shape(format!(
                "{} values for {} atoms",
                values.len(),
                space.atom_count()
            )));
        }
        Ok(L0Scalar {
            space: space.clone(),
            values,
        })
    }

    pub fn constant(space: &ProbabilitySpace, v: S) -> Self {
        L0Scalar {
            space: space.clone(),
            values: vec![v; space.atom_count()],
        }
    }

    pub fn from_fn(space: &ProbabilitySpace, f: impl FnMut(usize) -> S) -> Self {
        L0Scalar {
            space: space.clone(),
            values: (0..space.atom_count()).map(f).collect(),
        }
    }

    pub fn space(&self) -> &ProbabilitySpace {
        &self.space
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn get(&self, atom: usize) -> &S {
        &self.values[atom]
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> L0Scalar<T> {
        L0Scalar {
            space: self.space.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Result<Self> {
        self.space.ensure_same(&other.space)?;
        Ok(L0Scalar {
            space: self.space.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.clone() - b.clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.clone() * b.clone())
    }

    pub fn abs(&self) -> Self {
        self.map(|v| v.abs())
    }

    /// Pointwise maximum, the lattice join.
    pub fn max(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| S::max_of(a.clone(), b.clone()))
    }

    /// Pointwise minimum, the lattice meet.
    pub fn min(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| if b < a { b.clone() } else { a.clone() })
    }

    pub fn to_f64(&self) -> L0Scalar<f64> {
        self.map(|v| v.to_f64())
    }

    /// The value at `atom`, moved onto a one-atom space.
    pub fn restrict(&self, atom: usize, target: &ProbabilitySpace) -> Self {
        L0Scalar::constant(target, self.values[atom].clone())
    }
}

/// The event where `ξ rel η` holds. Float `eq` uses `|ξ − η| <= 1e-12`.
pub fn compare_event<S: Scalar>(xi: &L0Scalar<S>, eta: &L0Scalar<S>, rel: Relation) -> Result<Event> {
    compare_event_with_tol(xi, eta, rel, FLOAT_EQ_TOL)
}

pub fn compare_event_with_tol<S: Scalar>(
    xi: &L0Scalar<S>,
    eta: &L0Scalar<S>,
    rel: Relation,
    tol: f64,
) -> Result<Event> {
    xi.space.ensure_same(&eta.space)?;
    Ok(Event::from_fn(&xi.space, |a| {
        let (x, y) = (&xi.values[a], &eta.values[a]);
        match rel {
            Relation::Lt => x < y,
            Relation::Gt => x > y,
            Relation::Eq => x.approx_eq(y, tol),
            Relation::Le => x < y || x.approx_eq(y, tol),
        }
    }))
}

/// A point of `L0(F, R^d)`: one row of length `d` per atom.
#[derive(Debug, Clone, PartialEq)]
pub struct L0Vector<S> {
    space: ProbabilitySpace,
    dim: usize,
    data: Vec<S>,
}

impl<S: Scalar> L0Vector<S> {
    pub fn new(space: &ProbabilitySpace, rows: Vec<Vec<S>>) -> Result<Self> {
        let k = space.atom_count();
        if rows.len() != k {
            return Err(Error::Shape(format!("{} rows for {k} atoms", rows.len())));
        }
        let dim = rows[0].len();
        if dim == 0 {
            return Err(Error::Shape("dimension must be positive".into()));
        }
        if let Some(a) = rows.iter().position(|r| r.len() != dim) {
            return Err(Error::Shape(format!(
                "row {a} has length {}, expected {dim}",
                rows[a].len()
            )));
        }
        Ok(L0Vector {
            space: space.clone(),
            dim,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_rows_fn(space: &ProbabilitySpace, dim: usize, mut f: impl FnMut(usize) -> Vec<S>) -> Self {
        let mut data = Vec::with_capacity(dim * space.atom_count());
        for a in 0..space.atom_count() {
            let row = f(a);
            assert_eq!(row.len(), dim, "row {a} has the wrong length");
            data.extend(row);
        }
        L0Vector {
            space: space.clone(),
            dim,
            data,
        }
    }

    /// The same point at every atom.
    pub fn constant(space: &ProbabilitySpace, point: Vec<S>) -> Self {
        let dim = point.len();
        Self::from_rows_fn(space, dim, |_| point.clone())
    }

    pub fn zeros(space: &ProbabilitySpace, dim: usize) -> Self {
        Self::constant(space, vec![S::zero(); dim])
    }

    pub fn space(&self) -> &ProbabilitySpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, atom: usize) -> &[S] {
        &self.data[atom * self.dim..(atom + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[S]> {
        self.data.chunks(self.dim)
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    pub fn map_rows<T: Scalar>(&self, dim: usize, mut f: impl FnMut(usize, &[S]) -> Vec<T>) -> L0Vector<T> {
        L0Vector::from_rows_fn(&self.space, dim, |a| f(a, self.row(a)))
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        self.space.ensure_same(&other.space)?;
        if self.dim != other.dim {
            return Err(Error::Shape(format!(
                "dimension {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.map_rows(self.dim, |a, r| {
            r.iter().zip(other.row(a)).map(|(x, y)| x.clone() + y.clone()).collect()
        }))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.map_rows(self.dim, |a, r| linalg::sub(r, other.row(a))))
    }

    pub fn scale(&self, xi: &L0Scalar<S>) -> Result<Self> {
        self.space.ensure_same(&xi.space)?;
        Ok(self.map_rows(self.dim, |a, r| {
            r.iter().map(|x| x.clone() * xi.values[a].clone()).collect()
        }))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.space == other.space
            && self.dim == other.dim
            && self.data.iter().zip(&other.data).all(|(x, y)| x.approx_eq(y, tol))
    }

    pub fn to_f64(&self) -> L0Vector<f64> {
        self.map_rows(self.dim, |_, r| r.iter().map(|v| v.to_f64()).collect())
    }

    /// The row at `atom`, moved onto a one-atom space.
    pub fn restrict(&self, atom: usize, target: &ProbabilitySpace) -> Self {
        L0Vector::constant(target, self.row(atom).to_vec())
    }
}

/// Per-atom squared Euclidean norm, exact in rational mode.
pub fn l0_norm_squared<S: Scalar>(x: &L0Vector<S>) -> L0Scalar<S> {
    L0Scalar::from_fn(&x.space, |a| linalg::dot(x.row(a), x.row(a)))
}

/// Per-atom Euclidean norm, evaluated in floating point.
pub fn l0_norm<S: Scalar>(x: &L0Vector<S>) -> L0Scalar<f64> {
    l0_norm_squared(x).map(|v| v.to_f64().sqrt())
}

pub fn l0_inner<S: Scalar>(x: &L0Vector<S>, y: &L0Vector<S>) -> Result<L0Scalar<S>> {
    x.same_shape(y)?;
    Ok(L0Scalar::from_fn(&x.space, |a| linalg::dot(x.row(a), y.row(a))))
}

/// An element of `L0(F, {1..n})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct L0Label {
    space: ProbabilitySpace,
    n: usize,
    labels: Vec<usize>,
}

impl L0Label {
    pub fn new(space: &ProbabilitySpace, n: usize, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != space.atom_count() {
            return Err(Error::Shape(format!(
                "{} labels for {} atoms",
                labels.len(),
                space.atom_count()
            )));
        }
        if let Some(&l) = labels.iter().find(|&&l| l == 0 || l > n) {
            return Err(Error::LabelOutOfRange { label: l, n });
        }
        Ok(L0Label {
            space: space.clone(),
            n,
            labels,
        })
    }

    pub fn constant(space: &ProbabilitySpace, n: usize, label: usize) -> Result<Self> {
        Self::new(space, n, vec![label; space.atom_count()])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, atom: usize) -> usize {
        self.labels[atom]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// The event `(ξ = i)`.
    pub fn event_eq(&self, i: usize) -> Event {
        Event::from_fn(&self.space, |a| self.labels[a] == i)
    }

    /// `N_ξ = {i : (ξ = i) > 0}` in increasing order.
    pub fn support(&self) -> Vec<usize> {
        (1..=self.n).filter(|&i| self.labels.contains(&i)).collect()
    }

    pub fn is_constant(&self, label: usize) -> bool {
        self.labels.iter().all(|&l| l == label)
    }
}

impl<S: Scalar> Concatenate for L0Scalar<S> {
    fn space(&self) -> &ProbabilitySpace {
        &self.space
    }

    fn concatenate(items: &[Self], partition: &PartitionOfUnity) -> Result<Self> {
        let idx = splice_index(items, partition)?;
        Ok(L0Scalar::from_fn(partition.space(), |a| {
            items[idx[a]].values[a].clone()
        }))
    }
}

impl<S: Scalar> Concatenate for L0Vector<S> {
    fn space(&self) -> &ProbabilitySpace {
        &self.space
    }

    fn concatenate(items: &[Self], partition: &PartitionOfUnity) -> Result<Self> {
        let idx = splice_index(items, partition)?;
        let dim = items[0].dim;
        if let Some(it) = items.iter().find(|it| it.dim != dim) {
            return Err(Error::Shape(format!("dimension {} vs {dim}", it.dim)));
        }
        Ok(L0Vector::from_rows_fn(partition.space(), dim, |a| {
            items[idx[a]].row(a).to_vec()
        }))
    }
}

impl Concatenate for L0Label {
    fn space(&self) -> &ProbabilitySpace {
        &self.space
    }

    fn concatenate(items: &[Self], partition: &PartitionOfUnity) -> Result<Self> {
        let idx = splice_index(items, partition)?;
        let n = items[0].n;
        if items.iter().any(|it| it.n != n) {
            return Err(Error::Shape("labels range over different n".into()));
        }
        L0Label::new(
            partition.space(),
            n,
            (0..idx.len()).map(|a| items[idx[a]].labels[a]).collect(),
        )
    }
}

/// Atom-dependent strictly increasing index selections: `index_rows[k][ω]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomSubsequence {
    space: ProbabilitySpace,
    index_rows: Vec<Vec<usize>>,
}

impl RandomSubsequence {
    pub fn new(space: &ProbabilitySpace, index_rows: Vec<Vec<usize>>) -> Result<Self> {
        let k = space.atom_count();
        if let Some(r) = index_rows.iter().position(|r| r.len() != k) {
            return Err(Error::Shape(format!("index row {r} does not have {k} entries")));
        }
        for w in index_rows.windows(2) {
            if let Some(a) = (0..k).find(|&a| w[1][a] <= w[0][a]) {
                return Err(Error::Shape(format!(
                    "indices at atom {a} are not strictly increasing"
                )));
            }
        }
        Ok(RandomSubsequence {
            space: space.clone(),
            index_rows,
        })
    }

    pub fn index_rows(&self) -> &[Vec<usize>] {
        &self.index_rows
    }

    pub fn len(&self) -> usize {
        self.index_rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index_rows.is_empty()
    }

    /// Indices chosen at one atom.
    pub fn indices_at(&self, atom: usize) -> Vec<usize> {
        self.index_rows.iter().map(|r| r[atom]).collect()
    }

    /// `x_{n_k}(ω) = seq[n_k(ω)](ω)`.
    pub fn diagonal<S: Scalar>(&self, seq: &[L0Vector<S>]) -> Vec<L0Vector<S>> {
        self.index_rows
            .iter()
            .map(|r| {
                L0Vector::from_rows_fn(&self.space, seq[0].dim, |a| seq[r[a]].row(a).to_vec())
            })
            .collect()
    }
}

/// Per-atom coordinate bisection on a finite prefix.
///
/// Each step splits the widest coordinate of the current bounding box at its
/// midpoint and keeps the half holding more points (the lower half on ties).
/// It stops once the box diameter is at most `tol` or one point is left.
/// Indices are 0-based positions in `seq`; rows are cut to the shortest
/// selection over atoms. The limit is the midpoint of the final box.
pub fn random_subsequence_bw<S: Scalar>(
    seq: &[L0Vector<S>],
    tol: &S,
) -> Result<(RandomSubsequence, L0Vector<S>)> {
    let first = seq.first().ok_or(Error::EmptySequence)?;
    let space = first.space.clone();
    let dim = first.dim;
    for x in seq {
        x.same_shape(first)?;
    }
    let tol_sq = tol.clone() * tol.clone();
    let mut selections = Vec::with_capacity(space.atom_count());
    let mut limit_rows = Vec::with_capacity(space.atom_count());
    for atom in 0..space.atom_count() {
        let (sel, mid) = bisect_atom(seq, atom, dim, &tol_sq);
        selections.push(sel);
        limit_rows.push(mid);
    }
    let len = selections.iter().map(Vec::len).min().unwrap_or(0);
    let rows = (0..len)
        .map(|k| selections.iter().map(|s| s[k]).collect())
        .collect();
    Ok((
        RandomSubsequence::new(&space, rows)?,
        L0Vector::new(&space, limit_rows)?,
    ))
}

fn bounding_box<S: Scalar>(seq: &[L0Vector<S>], atom: usize, dim: usize, cand: &[usize]) -> (Vec<S>, Vec<S>) {
    let mut lo = seq[cand[0]].row(atom).to_vec();
    let mut hi = lo.clone();
    for &c in &cand[1..] {
        for (j, v) in seq[c].row(atom).iter().enumerate().take(dim) {
            if *v < lo[j] {
                lo[j] = v.clone();
            }
            if *v > hi[j] {
                hi[j] = v.clone();
            }
        }
    }
    (lo, hi)
}

fn bisect_atom<S: Scalar>(seq: &[L0Vector<S>], atom: usize, dim: usize, tol_sq: &S) -> (Vec<usize>, Vec<S>) {
    let two = S::from_int(2);
    let mut cand: Vec<usize> = (0..seq.len()).collect();
    loop {
        let (lo, hi) = bounding_box(seq, atom, dim, &cand);
        let widths: Vec<S> = hi.iter().zip(&lo).map(|(h, l)| h.clone() - l.clone()).collect();
        let diam_sq = linalg::dot(&widths, &widths);
        let midpoint = || -> Vec<S> {
            lo.iter().zip(&hi).map(|(l, h)| (l.clone() + h.clone()) / two.clone()).collect()
        };
        if cand.len() == 1 || diam_sq <= *tol_sq {
            return (cand, midpoint());
        }
        let mut j = 0;
        for i in 1..dim {
            if widths[i] > widths[j] {
                j = i;
            }
        }
        let cut = (lo[j].clone() + hi[j].clone()) / two.clone();
        let (lower, upper): (Vec<usize>, Vec<usize>) =
            cand.iter().partition(|&&c| seq[c].row(atom)[j] <= cut);
        let next = if lower.len() >= upper.len() { lower } else { upper };
        if next.len() == cand.len() {
            // float midpoint collapsed onto an endpoint; nothing left to split
            return (cand, midpoint());
        }
        cand = next;
    }
}
