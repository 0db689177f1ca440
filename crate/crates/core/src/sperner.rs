//! Classical and L0 Sperner labelings.

use num_traits::Signed;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::l0::L0Label;
use crate::measure::{PartitionOfUnity, ProbabilitySpace};
use crate::scalar::Scalar;
use crate::simplex::{concatenate_simplexes, L0Simplex};
use crate::subdivision::Subdivision;

/// `χ(y) = {i : α_i > 0}` for a registry vertex, 1-based.
pub fn chi_support<S: Scalar>(sub: &Subdivision<S>, id: usize) -> Vec<usize> {
    sub.chi(id)
}

/// A classical labeling of the registry with `ψ(y) ∈ χ(y)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProperLabeling {
    labels: Vec<usize>,
}

impl ProperLabeling {
    pub fn new<S: Scalar>(sub: &Subdivision<S>, labels: Vec<usize>) -> Result<Self> {
        check_classical(sub, &labels, 0)?;
        Ok(ProperLabeling { labels })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn get(&self, id: usize) -> usize {
        self.labels[id]
    }
}

fn check_classical<S: Scalar>(sub: &Subdivision<S>, labels: &[usize], atom: usize) -> Result<()> {
    if labels.len() != sub.registry().len() {
        return Err(Error::Shape(format!(
            "{} labels for {} registry vertices",
            labels.len(),
            sub.registry().len()
        )));
    }
    for (vertex, &label) in labels.iter().enumerate() {
        if label == 0 || label > sub.n() {
            return Err(Error::LabelOutOfRange { label, n: sub.n() });
        }
        if !sub.vertex(vertex).weights()[label - 1].is_positive() {
            return Err(Error::ImproperLabeling { vertex, label, atom });
        }
    }
    Ok(())
}

/// Cell labels equal `{1..n}` as a set.
pub fn is_completely_labeled(cell: &[usize], labels: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    for &id in cell {
        seen[labels[id] - 1] = true;
    }
    cell.len() == n && seen.into_iter().all(|s| s)
}

/// Completely labeled cells in canonical order. Their number is odd.
pub fn enumerate_completely_labeled<S: Scalar>(sub: &Subdivision<S>, psi: &ProperLabeling) -> Result<Vec<usize>> {
    check_classical(sub, &psi.labels, 0)?;
    let found: Vec<usize> = (0..sub.cells().len())
        .filter(|&c| is_completely_labeled(&sub.cells()[c], &psi.labels, sub.n()))
        .collect();
    assert!(found.len() % 2 == 1, "Sperner parity violated: {} cells", found.len());
    Ok(found)
}

/// Every proper labeling, the product of the `χ` sets in registry order
/// (last vertex varying fastest).
pub fn proper_labelings<S: Scalar>(sub: &Subdivision<S>) -> impl Iterator<Item = ProperLabeling> {
    let choices: Vec<Vec<usize>> = (0..sub.registry().len()).map(|id| sub.chi(id)).collect();
    let total: usize = choices.iter().map(Vec::len).product();
    (0..total).map(move |mut code| {
        let mut labels = vec![0; choices.len()];
        for (id, c) in choices.iter().enumerate().rev() {
            labels[id] = c[code % c.len()];
            code /= c.len();
        }
        ProperLabeling { labels }
    })
}

/// An L0 label per registry vertex. On a hull element (an assignment
/// atom -> id) the value is the per-atom label of the assigned vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct L0Labeling {
    space: ProbabilitySpace,
    n: usize,
    labels: Vec<L0Label>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Properness {
    Proper,
    Violation { vertex: usize, label: usize, atom: usize },
}

impl L0Labeling {
    pub fn new<S: Scalar>(sub: &Subdivision<S>, labels: Vec<L0Label>) -> Result<Self> {
        if labels.len() != sub.registry().len() {
            return Err(Error::Shape(format!(
                "{} labels for {} registry vertices",
                labels.len(),
                sub.registry().len()
            )));
        }
        let space = sub.parent().space().clone();
        for l in &labels {
            if l.n() != sub.n() {
                return Err(Error::Shape(format!("labels range over 1..={}, expected {}", l.n(), sub.n())));
            }
            space.ensure_same(l.event_eq(1).space())?;
        }
        Ok(L0Labeling {
            space,
            n: sub.n(),
            labels,
        })
    }

    /// From per-atom classical label tuples: `tuples[atom][id]`.
    pub fn from_atom_tuples<S: Scalar>(sub: &Subdivision<S>, tuples: &[Vec<usize>]) -> Result<Self> {
        let space = sub.parent().space();
        if tuples.len() != space.atom_count() {
            return Err(Error::Shape(format!(
                "{} label tuples for {} atoms",
                tuples.len(),
                space.atom_count()
            )));
        }
        let r = sub.registry().len();
        if let Some(a) = tuples.iter().position(|t| t.len() != r) {
            return Err(Error::Shape(format!("tuple for atom {a} does not have {r} labels")));
        }
        let labels = (0..r)
            .map(|id| L0Label::new(space, sub.n(), tuples.iter().map(|t| t[id]).collect()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(sub, labels)
    }

    /// The same classical labeling at every atom.
    pub fn constant<S: Scalar>(sub: &Subdivision<S>, psi: &ProperLabeling) -> Result<Self> {
        let k = sub.parent().space().atom_count();
        Self::from_atom_tuples(sub, &vec![psi.labels.clone(); k])
    }

    pub fn space(&self) -> &ProbabilitySpace {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, id: usize) -> &L0Label {
        &self.labels[id]
    }

    pub fn labels(&self) -> &[L0Label] {
        &self.labels
    }

    /// The classical label tuple at one atom.
    pub fn tuple_at(&self, atom: usize) -> Vec<usize> {
        self.labels.iter().map(|l| l.get(atom)).collect()
    }

    /// Value at a hull element given by an assignment atom -> registry id.
    pub fn value_at(&self, assignment: &[usize]) -> Result<L0Label> {
        L0Label::new(
            &self.space,
            self.n,
            assignment.iter().enumerate().map(|(a, &id)| self.labels[id].get(a)).collect(),
        )
    }
}

/// `(φ(y) = i) ∧ (λ_i = 0)` must be empty for every vertex and label.
pub fn is_proper_l0<S: Scalar>(sub: &Subdivision<S>, phi: &L0Labeling) -> Properness {
    for (vertex, l) in phi.labels.iter().enumerate() {
        let weights = sub.vertex(vertex).weights();
        for atom in 0..phi.space.atom_count() {
            let label = l.get(atom);
            if !weights[label - 1].is_positive() {
                return Properness::Violation { vertex, label, atom };
            }
        }
    }
    Properness::Proper
}

fn require_proper<S: Scalar>(sub: &Subdivision<S>, phi: &L0Labeling) -> Result<()> {
    match is_proper_l0(sub, phi) {
        Properness::Proper => Ok(()),
        Properness::Violation { vertex, label, atom } => Err(Error::ImproperLabeling { vertex, label, atom }),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub partition: PartitionOfUnity,
    pub labelings: Vec<ProperLabeling>,
}

impl Decomposition {
    /// `φ(y) = Σ_m I_{a_m} ψ_m(y)`.
    pub fn reconstruct<S: Scalar>(&self, sub: &Subdivision<S>) -> Result<L0Labeling> {
        let idx = self.partition.part_index();
        let tuples: Vec<Vec<usize>> = idx.iter().map(|&m| self.labelings[m].labels.clone()).collect();
        L0Labeling::from_atom_tuples(sub, &tuples)
    }
}

/// Groups atoms by their full label tuple; parts are ordered by first atom.
pub fn decompose_labeling<S: Scalar>(sub: &Subdivision<S>, phi: &L0Labeling) -> Result<Decomposition> {
    require_proper(sub, phi)?;
    let tuples: Vec<Vec<usize>> = (0..phi.space.atom_count()).map(|a| phi.tuple_at(a)).collect();
    let partition = PartitionOfUnity::group_by(&phi.space, |a| tuples[a].clone());
    let labelings = partition
        .parts()
        .iter()
        .map(|p| {
            let a = p.first().expect("parts are nonempty");
            ProperLabeling::new(sub, tuples[a].clone())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Decomposition { partition, labelings })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletelyLabeled<S> {
    pub decomposition: Decomposition,
    /// Chosen cell index per part.
    pub cells: Vec<usize>,
    /// Per part, `permutation[j]` is the position in the cell of the vertex
    /// labeled `j + 1`.
    pub permutations: Vec<Vec<usize>>,
    /// Per part, the registry ids of `v_1..v_n`.
    pub vertex_ids: Vec<Vec<usize>>,
    pub simplex: L0Simplex<S>,
}

impl<S: Scalar> CompletelyLabeled<S> {
    pub fn partition(&self) -> &PartitionOfUnity {
        &self.decomposition.partition
    }

    /// Registry id of `v_j` (0-based `j`) at every atom.
    pub fn vertex_assignment(&self, j: usize) -> Vec<usize> {
        self.partition()
            .part_index()
            .into_iter()
            .map(|m| self.vertex_ids[m][j])
            .collect()
    }
}

/// Reorders a completely labeled cell so that vertex `j` carries label `j + 1`.
pub fn label_order(cell: &[usize], labels: &[usize]) -> Vec<usize> {
    let mut perm = vec![usize::MAX; cell.len()];
    for (pos, &id) in cell.iter().enumerate() {
        perm[labels[id] - 1] = pos;
    }
    perm
}

/// Decomposes `φ`, takes the first completely labeled cell of each part,
/// reorders it by label and splices the parts together.
pub fn random_sperner_search<S: Scalar>(sub: &Subdivision<S>, phi: &L0Labeling) -> Result<CompletelyLabeled<S>> {
    let decomposition = decompose_labeling(sub, phi)?;
    let picks = decomposition
        .labelings
        .par_iter()
        .map(|psi| {
            let cell = enumerate_completely_labeled(sub, psi)?[0];
            let perm = label_order(&sub.cells()[cell], &psi.labels);
            let ids: Vec<usize> = perm.iter().map(|&p| sub.cells()[cell][p]).collect();
            Ok((cell, perm, ids))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cells = Vec::new();
    let mut permutations = Vec::new();
    let mut vertex_ids = Vec::new();
    for (c, p, ids) in picks {
        cells.push(c);
        permutations.push(p);
        vertex_ids.push(ids);
    }
    let parts: Vec<L0Simplex<S>> = vertex_ids.iter().map(|ids| sub.simplex_of(ids)).collect();
    let simplex = concatenate_simplexes(&parts, &decomposition.partition)?;
    let result = CompletelyLabeled {
        decomposition,
        cells,
        permutations,
        vertex_ids,
        simplex,
    };
    for j in 0..sub.n() {
        let label = phi.value_at(&result.vertex_assignment(j))?;
        assert!(label.is_constant(j + 1), "vertex {} is not labeled {}", j + 1, j + 1);
    }
    Ok(result)
}
