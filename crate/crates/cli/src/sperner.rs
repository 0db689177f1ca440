use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use randfix_core::sperner::is_completely_labeled;
use randfix_core::{
    decompose_labeling, is_proper_l0, iterated_barycentric_subdivision, midpoint_subdivision_2simplex,
    proper_labelings, random_sperner_search, L0Labeling, L0Simplex, ProbabilitySpace, Properness, Rational,
    Scalar, Subdivision,
};
use serde::{Deserialize, Serialize};

use crate::problem::{check_schema, read_json, SCHEMA};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SubdivisionKind {
    Barycentric,
    Midpoint,
}

/// Built-in per-atom labeling rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Rule {
    /// Smallest index of the carrier face.
    Min,
    /// Largest index of the carrier face.
    Max,
    /// Uniform over the carrier face, drawn from `--seed`.
    Random,
}

#[derive(Debug, Clone)]
pub struct SpernerFlags {
    pub n: usize,
    pub atoms: usize,
    pub subdivision: SubdivisionKind,
    pub depth: usize,
    pub labeling: Option<PathBuf>,
    pub rules: Vec<Rule>,
    pub seed: u64,
    pub enumerate_all: bool,
    pub export_labeling: Option<PathBuf>,
}

/// `{vertex_id: [label per atom]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelingFile {
    pub schema: u32,
    pub n: usize,
    pub atoms: usize,
    pub labels: BTreeMap<usize, Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartReport {
    pub atoms: Vec<usize>,
    /// Classical labeling, indexed by registry id.
    pub labels: Vec<usize>,
    pub completely_labeled: Vec<usize>,
    pub chosen_cell: usize,
    /// `permutation[j]` is the position in the chosen cell of the vertex labeled `j + 1`.
    pub permutation: Vec<usize>,
    pub vertex_ids: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpernerReport {
    pub schema: u32,
    pub n: usize,
    pub atoms: usize,
    pub cells: usize,
    pub registry: usize,
    pub parts: Vec<PartReport>,
    /// `simplex[atom][vertex][coordinate]`, exact.
    pub simplex: Vec<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnumerationReport {
    pub schema: u32,
    pub n: usize,
    pub labelings: usize,
    /// How many labelings have each completely labeled count.
    pub counts: BTreeMap<usize, usize>,
    pub all_odd: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Output {
    Search(SpernerReport),
    Enumeration(EnumerationReport),
}

fn build_subdivision(flags: &SpernerFlags, space: &ProbabilitySpace) -> Result<Subdivision<Rational>> {
    if flags.n < 2 {
        bail!("--n must be at least 2");
    }
    let parent = L0Simplex::<Rational>::standard(space, flags.n);
    match flags.subdivision {
        SubdivisionKind::Barycentric => {
            iterated_barycentric_subdivision(&parent, flags.depth).context("--depth must be at least 1")
        }
        SubdivisionKind::Midpoint => {
            if flags.depth != 1 {
                bail!("the midpoint subdivision has depth 1 only");
            }
            midpoint_subdivision_2simplex(&parent).context("--subdivision midpoint")
        }
    }
}

pub fn run_sperner(flags: &SpernerFlags) -> Result<(Output, String)> {
    if flags.enumerate_all {
        return enumerate_all(flags);
    }
    let (space, sub, phi) = match &flags.labeling {
        Some(path) => {
            let file: LabelingFile = read_json(path)?;
            check_schema(file.schema)?;
            let flags = SpernerFlags {
                n: file.n,
                atoms: file.atoms,
                ..flags.clone()
            };
            let space = ProbabilitySpace::uniform(file.atoms).context("atoms")?;
            let sub = build_subdivision(&flags, &space)?;
            let phi = labeling_from_file(&sub, &file)?;
            (space, sub, phi)
        }
        None => {
            let space = ProbabilitySpace::uniform(flags.atoms).context("--atoms")?;
            let sub = build_subdivision(flags, &space)?;
            let phi = labeling_from_rules(&sub, flags)?;
            (space, sub, phi)
        }
    };
    if let Some(path) = &flags.export_labeling {
        crate::solve::write_json(path, &labeling_file(&sub, &phi))?;
    }
    if let Properness::Violation { vertex, label, atom } = is_proper_l0(&sub, &phi) {
        bail!("improper labeling: vertex {vertex} has label {label} at atom {atom}, outside its carrier face");
    }
    let dec = decompose_labeling(&sub, &phi)?;
    let found = random_sperner_search(&sub, &phi)?;
    let parts: Vec<PartReport> = dec
        .partition
        .parts()
        .iter()
        .enumerate()
        .map(|(m, part)| {
            let psi = dec.labelings[m].labels().to_vec();
            let completely_labeled = (0..sub.cells().len())
                .filter(|&c| is_completely_labeled(&sub.cells()[c], &psi, sub.n()))
                .collect();
            PartReport {
                atoms: part.atoms().collect(),
                labels: psi,
                completely_labeled,
                chosen_cell: found.cells[m],
                permutation: found.permutations[m].clone(),
                vertex_ids: found.vertex_ids[m].clone(),
            }
        })
        .collect();
    let simplex = (0..space.atom_count())
        .map(|a| found.simplex.rows_at(a).iter().map(|v| v.iter().map(Scalar::repr).collect()).collect())
        .collect();
    let report = SpernerReport {
        schema: SCHEMA,
        n: sub.n(),
        atoms: space.atom_count(),
        cells: sub.cells().len(),
        registry: sub.registry().len(),
        parts,
        simplex,
    };
    let summary = summarize(&report);
    Ok((Output::Search(report), summary))
}

fn labeling_from_file(sub: &Subdivision<Rational>, file: &LabelingFile) -> Result<L0Labeling> {
    let r = sub.registry().len();
    if file.labels.len() != r || file.labels.keys().any(|&id| id >= r) {
        bail!("labels: expected one entry for each registry vertex 0..{}", r - 1);
    }
    let tuples: Vec<Vec<usize>> = (0..file.atoms)
        .map(|a| {
            file.labels
                .iter()
                .map(|(id, per_atom)| {
                    per_atom.get(a).copied().with_context(|| format!("labels.{id}: expected {} entries", file.atoms))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    L0Labeling::from_atom_tuples(sub, &tuples).context("labels")
}

fn labeling_from_rules(sub: &Subdivision<Rational>, flags: &SpernerFlags) -> Result<L0Labeling> {
    let k = flags.atoms;
    let rules = match flags.rules.len() {
        0 => vec![Rule::Min; k],
        1 => vec![flags.rules[0]; k],
        len if len == k => flags.rules.clone(),
        len => bail!("--rule: expected 1 or {k} rules, got {len}"),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(flags.seed);
    let tuples: Vec<Vec<usize>> = rules
        .iter()
        .map(|rule| {
            (0..sub.registry().len())
                .map(|id| {
                    let chi = sub.chi(id);
                    match rule {
                        Rule::Min => chi[0],
                        Rule::Max => chi[chi.len() - 1],
                        Rule::Random => chi[rng.gen_range(0..chi.len())],
                    }
                })
                .collect()
        })
        .collect();
    L0Labeling::from_atom_tuples(sub, &tuples).context("--rule")
}

fn labeling_file(sub: &Subdivision<Rational>, phi: &L0Labeling) -> LabelingFile {
    LabelingFile {
        schema: SCHEMA,
        n: sub.n(),
        atoms: phi.space().atom_count(),
        labels: (0..sub.registry().len()).map(|id| (id, phi.get(id).labels().to_vec())).collect(),
    }
}

fn enumerate_all(flags: &SpernerFlags) -> Result<(Output, String)> {
    if flags.n > 3 {
        bail!("--enumerate-all supports n <= 3, got {}", flags.n);
    }
    let space = ProbabilitySpace::uniform(1).expect("one atom");
    let sub = build_subdivision(flags, &space)?;
    let mut counts = BTreeMap::new();
    let mut total = 0;
    for psi in proper_labelings(&sub) {
        let c = sub
            .cells()
            .iter()
            .filter(|cell| is_completely_labeled(cell, psi.labels(), sub.n()))
            .count();
        *counts.entry(c).or_insert(0) += 1;
        total += 1;
    }
    let all_odd = counts.keys().all(|c| c % 2 == 1);
    let summary = format!(
        "{total} labelings, {}\ncompletely labeled counts: {}\n",
        if all_odd { "all odd" } else { "NOT all odd" },
        counts
            .iter()
            .map(|(c, m)| format!("{c} cell(s) x {m}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    if !all_odd {
        bail!("{summary}");
    }
    let report = EnumerationReport {
        schema: SCHEMA,
        n: sub.n(),
        labelings: total,
        counts,
        all_odd,
    };
    Ok((Output::Enumeration(report), summary))
}

fn summarize(r: &SpernerReport) -> String {
    let mut out = format!(
        "{} cells, {} registry vertices, K = {} atoms\ndecomposition: M = {} part(s)\n",
        r.cells,
        r.registry,
        r.atoms,
        r.parts.len()
    );
    for (m, p) in r.parts.iter().enumerate() {
        out.push_str(&format!(
            "  part {}: atoms {:?}, labels {:?}\n    completely labeled cells {:?} (odd: {}), chosen cell {}, v_1..v_n = registry {:?}\n",
            m + 1,
            p.atoms,
            p.labels,
            p.completely_labeled,
            p.completely_labeled.len() % 2 == 1,
            p.chosen_cell,
            p.vertex_ids
        ));
    }
    for (a, verts) in r.simplex.iter().enumerate() {
        let shown: Vec<String> = verts.iter().map(|v| format!("({})", v.join(", "))).collect();
        out.push_str(&format!("  atom {a}: {}\n", shown.join(" ")));
    }
    out
}
