//! Finite atomic probability spaces, events as bitsets, partitions of unity.

use std::fmt;
use std::sync::Arc;

use bitvec::prelude::*;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar, FLOAT_EQ_TOL};

#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    Exact(Vec<Rational>),
    Float(Vec<f64>),
}

impl Weights {
    pub fn len(&self) -> usize {
        match self {
            Weights::Exact(w) => w.len(),
            Weights::Float(w) => w.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug)]
struct SpaceInner {
    weights: Weights,
}

/// K weighted atoms. Cloning shares the space; equality is identity.
#[derive(Clone)]
pub struct ProbabilitySpace {
    inner: Arc<SpaceInner>,
}

impl PartialEq for ProbabilitySpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }
}

impl Eq for ProbabilitySpace {}

impl fmt::Debug for ProbabilitySpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProbabilitySpace")
            .field("weights", &self.inner.weights)
            .finish()
    }
}

impl ProbabilitySpace {
    pub fn new(weights: Weights) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("at least one atom is required".into()));
        }
        match &weights {
            Weights::Exact(w) => {
                if let Some(i) = w.iter().position(|p| !p.is_positive()) {
                    return Err(Error::InvalidWeights(format!(
                        "weight of atom {i} is {}, expected > 0",
                        w[i].repr()
                    )));
                }
                let total: Rational = w.iter().cloned().sum();
                if !total.is_one() {
                    return Err(Error::InvalidWeights(format!(
                        "weights sum to {}, expected 1",
                        total.repr()
                    )));
                }
            }
            Weights::Float(w) => {
                if let Some(i) = w.iter().position(|p| !(p.is_finite() && *p > 0.0)) {
                    return Err(Error::InvalidWeights(format!(
                        "weight of atom {i} is {}, expected > 0",
                        w[i]
                    )));
                }
                let total: f64 = w.iter().sum();
                if (total - 1.0).abs() > FLOAT_EQ_TOL {
                    return Err(Error::InvalidWeights(format!(
                        "weights sum to {total}, expected 1"
                    )));
                }
            }
        }
        Ok(ProbabilitySpace {
            inner: Arc::new(SpaceInner { weights }),
        })
    }

    /// K atoms of weight 1/K each.
    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidWeights("at least one atom is required".into()));
        }
        Self::new(Weights::Exact(vec![
            Rational::from_ratio(1, k as i64);
            k
        ]))
    }

    pub fn atom_count(&self) -> usize {
        self.inner.weights.len()
    }

    pub fn weights(&self) -> &Weights {
        &self.inner.weights
    }

    pub fn weight(&self, atom: usize) -> Rational {
        match &self.inner.weights {
            Weights::Exact(w) => w[atom].clone(),
            Weights::Float(w) => Rational::from_float(w[atom]).unwrap_or_else(Rational::zero),
        }
    }

    pub fn weight_f64(&self, atom: usize) -> f64 {
        match &self.inner.weights {
            Weights::Exact(w) => w[atom].to_f64(),
            Weights::Float(w) => w[atom],
        }
    }

    pub fn full(&self) -> Event {
        Event::from_fn(self, |_| true)
    }

    pub fn empty(&self) -> Event {
        Event::from_fn(self, |_| false)
    }

    pub fn atom(&self, atom: usize) -> Event {
        Event::from_fn(self, |i| i == atom)
    }

    pub fn ensure_same(&self, other: &ProbabilitySpace) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }
}

/// A set of atoms, i.e. an element of the measure algebra.
#[derive(Clone, PartialEq, Eq)]
pub struct Event {
    space: ProbabilitySpace,
    bits: BitVec,
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.atoms()).finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventOp {
    Meet,
    Join,
    Complement,
    Difference,
}

impl Event {
    pub fn from_fn(space: &ProbabilitySpace, f: impl Fn(usize) -> bool) -> Self {
        let bits = (0..space.atom_count()).map(f).collect();
        Event {
            space: space.clone(),
            bits,
        }
    }

    pub fn from_atoms(space: &ProbabilitySpace, atoms: &[usize]) -> Result<Self> {
        let k = space.atom_count();
        if let Some(a) = atoms.iter().find(|&&a| a >= k) {
            return Err(Error::Shape(format!("atom {a} out of range for K = {k}")));
        }
        Ok(Event::from_fn(space, |i| atoms.contains(&i)))
    }

    pub fn space(&self) -> &ProbabilitySpace {
        &self.space
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.bits[atom]
    }

    pub fn is_empty(&self) -> bool {
        self.bits.not_any()
    }

    pub fn is_full(&self) -> bool {
        self.bits.all()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn atoms(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter_ones()
    }

    pub fn first(&self) -> Option<usize> {
        self.bits.first_one()
    }

    fn zip(&self, other: &Event, f: impl Fn(bool, bool) -> bool) -> Result<Event> {
        self.space.ensure_same(&other.space)?;
        let bits = self
            .bits
            .iter()
            .by_vals()
            .zip(other.bits.iter().by_vals())
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(Event {
            space: self.space.clone(),
            bits,
        })
    }

    pub fn meet(&self, other: &Event) -> Result<Event> {
        self.zip(other, |a, b| a && b)
    }

    pub fn join(&self, other: &Event) -> Result<Event> {
        self.zip(other, |a, b| a || b)
    }

    pub fn difference(&self, other: &Event) -> Result<Event> {
        self.zip(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> Event {
        Event {
            space: self.space.clone(),
            bits: !self.bits.clone(),
        }
    }

    /// `self <= other` in the measure algebra.
    pub fn is_subset(&self, other: &Event) -> Result<bool> {
        Ok(self.difference(other)?.is_empty())
    }

    pub fn probability(&self) -> Rational {
        self.atoms().map(|a| self.space.weight(a)).sum()
    }

    pub fn probability_f64(&self) -> f64 {
        self.atoms().map(|a| self.space.weight_f64(a)).sum()
    }
}

/// `complement` ignores `b`.
pub fn event_algebra(a: &Event, b: &Event, op: EventOp) -> Result<Event> {
    a.space.ensure_same(&b.space)?;
    match op {
        EventOp::Meet => a.meet(b),
        EventOp::Join => a.join(b),
        EventOp::Complement => Ok(a.complement()),
        EventOp::Difference => a.difference(b),
    }
}

/// Nonempty, pairwise disjoint events covering every atom.
#[derive(Clone, PartialEq, Eq)]
pub struct PartitionOfUnity {
    space: ProbabilitySpace,
    parts: Vec<Event>,
}

impl fmt::Debug for PartitionOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.parts).finish()
    }
}

impl PartitionOfUnity {
    /// Empty parts are dropped.
    pub fn new(space: &ProbabilitySpace, parts: Vec<Event>) -> Result<Self> {
        let mut covered = space.empty();
        let mut kept = Vec::with_capacity(parts.len());
        for (i, p) in parts.into_iter().enumerate() {
            space.ensure_same(p.space())?;
            if p.is_empty() {
                continue;
            }
            if !covered.meet(&p)?.is_empty() {
                return Err(Error::InvalidPartition(format!(
                    "part {i} overlaps an earlier part"
                )));
            }
            covered = covered.join(&p)?;
            kept.push(p);
        }
        if !covered.is_full() {
            let missing = covered.complement().first().unwrap_or(0);
            return Err(Error::InvalidPartition(format!(
                "atom {missing} is not covered"
            )));
        }
        Ok(PartitionOfUnity {
            space: space.clone(),
            parts: kept,
        })
    }

    pub fn trivial(space: &ProbabilitySpace) -> Self {
        PartitionOfUnity {
            space: space.clone(),
            parts: vec![space.full()],
        }
    }

    pub fn singletons(space: &ProbabilitySpace) -> Self {
        PartitionOfUnity {
            space: space.clone(),
            parts: (0..space.atom_count()).map(|a| space.atom(a)).collect(),
        }
    }

    /// Groups atoms by key; parts are ordered by their first atom.
    pub fn group_by<K: PartialEq>(space: &ProbabilitySpace, key: impl Fn(usize) -> K) -> Self {
        let mut keys: Vec<K> = Vec::new();
        let mut members: Vec<Vec<usize>> = Vec::new();
        for atom in 0..space.atom_count() {
            let k = key(atom);
            match keys.iter().position(|x| *x == k) {
                Some(i) => members[i].push(atom),
                None => {
                    keys.push(k);
                    members.push(vec![atom]);
                }
            }
        }
        PartitionOfUnity {
            space: space.clone(),
            parts: members
                .iter()
                .map(|m| Event::from_fn(space, |a| m.contains(&a)))
                .collect(),
        }
    }

    pub fn space(&self) -> &ProbabilitySpace {
        &self.space
    }

    pub fn parts(&self) -> &[Event] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Index of the part holding `atom`.
    pub fn part_of(&self, atom: usize) -> usize {
        self.parts
            .iter()
            .position(|p| p.contains(atom))
            .expect("partition covers every atom")
    }

    /// Lookup table atom -> part index.
    pub fn part_index(&self) -> Vec<usize> {
        let mut idx = vec![0; self.space.atom_count()];
        for (m, p) in self.parts.iter().enumerate() {
            for a in p.atoms() {
                idx[a] = m;
            }
        }
        idx
    }

    /// Nonzero meets `a_i ∧ b_j` in lexicographic `(i, j)` order.
    pub fn refine(&self, other: &PartitionOfUnity) -> Result<PartitionOfUnity> {
        self.space.ensure_same(&other.space)?;
        let mut parts = Vec::new();
        for a in &self.parts {
            for b in &other.parts {
                let m = a.meet(b)?;
                if !m.is_empty() {
                    parts.push(m);
                }
            }
        }
        Ok(PartitionOfUnity {
            space: self.space.clone(),
            parts,
        })
    }

    /// Every part of `self` lies inside some part of `other`.
    pub fn is_finer_than(&self, other: &PartitionOfUnity) -> Result<bool> {
        self.space.ensure_same(&other.space)?;
        for p in &self.parts {
            let mut found = false;
            for q in &other.parts {
                if p.is_subset(q)? {
                    found = true;
                    break;
                }
            }
            if !found {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(k: usize) -> ProbabilitySpace {
        ProbabilitySpace::uniform(k).unwrap()
    }

    #[test]
    fn weights_are_validated() {
        let bad = ProbabilitySpace::new(Weights::Exact(vec![
            Rational::from_ratio(1, 2),
            Rational::from_ratio(1, 3),
        ]));
        assert!(matches!(bad, Err(Error::InvalidWeights(m)) if m.contains("sum")));
        assert!(ProbabilitySpace::new(Weights::Float(vec![0.5, 0.5 + 1e-13])).is_ok());
        assert!(ProbabilitySpace::new(Weights::Float(vec![1.0, 0.0])).is_err());
        assert!(ProbabilitySpace::new(Weights::Float(vec![])).is_err());
    }

    #[test]
    fn bitwise_meet() {
        let s = space(3);
        let a = Event::from_atoms(&s, &[0, 1]).unwrap();
        let b = Event::from_atoms(&s, &[1, 2]).unwrap();
        assert_eq!(event_algebra(&a, &b, EventOp::Meet).unwrap(), s.atom(1));
        assert_eq!(s.full().meet(&a).unwrap(), a);
        assert!(a.join(&a.complement()).unwrap().is_full());
        assert_eq!(
            event_algebra(&a, &b, EventOp::Difference).unwrap(),
            s.atom(0)
        );
    }

    #[test]
    fn cross_space_is_rejected() {
        let a = space(2).full();
        let b = space(2).full();
        assert_eq!(a.meet(&b), Err(Error::SpaceMismatch));
    }

    #[test]
    fn probability_sums_weights() {
        let s = ProbabilitySpace::new(Weights::Exact(vec![
            Rational::from_ratio(1, 3),
            Rational::from_ratio(2, 3),
        ]))
        .unwrap();
        assert_eq!(s.atom(1).probability(), Rational::from_ratio(2, 3));
        assert!(s.empty().probability().is_zero());
        assert!(s.full().probability().is_one());
    }

    #[test]
    fn refine_reaches_atoms() {
        let s = space(4);
        let ev = |a: &[usize]| Event::from_atoms(&s, a).unwrap();
        let p = PartitionOfUnity::new(&s, vec![ev(&[0, 1]), ev(&[2, 3])]).unwrap();
        let q = PartitionOfUnity::new(&s, vec![ev(&[0, 2]), ev(&[1, 3])]).unwrap();
        assert_eq!(p.refine(&q).unwrap(), PartitionOfUnity::singletons(&s));
        assert_eq!(p.refine(&PartitionOfUnity::trivial(&s)).unwrap(), p);
        assert_eq!(p.refine(&p).unwrap(), p);
    }

    #[test]
    fn partition_rejects_overlap_and_gaps() {
        let s = space(3);
        let ev = |a: &[usize]| Event::from_atoms(&s, a).unwrap();
        assert!(PartitionOfUnity::new(&s, vec![ev(&[0, 1]), ev(&[1, 2])]).is_err());
        assert!(PartitionOfUnity::new(&s, vec![ev(&[0, 1])]).is_err());
        let p = PartitionOfUnity::new(&s, vec![ev(&[]), ev(&[0, 1, 2])]).unwrap();
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn group_by_orders_parts_by_first_atom() {
        let s = space(3);
        let p = PartitionOfUnity::group_by(&s, |a| a % 2);
        assert_eq!(p.parts()[0], Event::from_atoms(&s, &[0, 2]).unwrap());
        assert_eq!(p.part_index(), vec![0, 1, 0]);
    }
}
