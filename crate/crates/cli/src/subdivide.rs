use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use randfix_core::{
    iterated_barycentric_subdivision, l0_diameter_squared, BarycentricCoords, L0Simplex, ProbabilitySpace, Rational,
    Scalar,
};
use serde::{Deserialize, Serialize};

use crate::problem::{check_schema, read_json, simplex_from_rows, Num, SpaceSpec, SCHEMA};

#[derive(Debug, Clone)]
pub struct SubdivideFlags {
    pub n: Option<usize>,
    pub simplex: Option<PathBuf>,
    pub depth: usize,
    pub verify: bool,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplexFile {
    pub schema: u32,
    pub space: SpaceSpec,
    /// `vertices[atom][j]`.
    pub vertices: Vec<Vec<Vec<Num>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelReport {
    pub level: usize,
    pub cells: usize,
    pub registry: usize,
    /// `diam(level) / diam(S)` per atom, as a float.
    pub ratio: Vec<String>,
    /// The same ratio squared, exact.
    pub ratio_squared: Vec<String>,
    /// `((n−1)/n)^level`.
    pub bound: String,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegistryEntry {
    pub id: usize,
    pub weights: Vec<String>,
    pub chi: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Verification {
    pub volumes_add_up: bool,
    pub face_intersections: Result<(), String>,
    pub samples: usize,
    pub located: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubdivisionTrace {
    pub schema: u32,
    pub n: usize,
    pub atoms: usize,
    pub depth: usize,
    pub levels: Vec<LevelReport>,
    pub registry: Vec<RegistryEntry>,
    pub cells: Vec<Vec<usize>>,
    pub verification: Option<Verification>,
}

fn parent(flags: &SubdivideFlags) -> Result<L0Simplex<Rational>> {
    match (&flags.simplex, flags.n) {
        (Some(path), None) => {
            let file: SimplexFile = read_json(path)?;
            check_schema(file.schema)?;
            let space = file.space.build()?;
            simplex_from_rows(&space, &file.vertices, "vertices")
        }
        (None, Some(n)) => {
            if n < 2 {
                bail!("--n must be at least 2");
            }
            Ok(L0Simplex::standard(&ProbabilitySpace::uniform(1).expect("one atom"), n))
        }
        (None, None) => bail!("give either --n or --simplex"),
        (Some(_), Some(_)) => bail!("--n and --simplex are exclusive"),
    }
}

pub fn run_subdivide(flags: &SubdivideFlags) -> Result<(SubdivisionTrace, String)> {
    if flags.depth == 0 {
        bail!("--depth must be at least 1");
    }
    let s = parent(flags)?;
    let n = s.n();
    let k = s.space().atom_count();
    let d0 = l0_diameter_squared(&s);
    let step = Rational::from_ratio(n as i64 - 1, n as i64);
    let mut bound = Rational::from_int(1);
    let mut levels = Vec::new();
    let mut last = None;
    for level in 1..=flags.depth {
        let sub = iterated_barycentric_subdivision(&s, level).context("subdivision")?;
        bound *= step.clone();
        let dl = sub.diameter_squared();
        let ratio_sq: Vec<Rational> = (0..k).map(|a| dl.get(a).clone() / d0.get(a).clone()).collect();
        let certified = ratio_sq.iter().all(|r| *r <= bound.clone() * bound.clone());
        levels.push(LevelReport {
            level,
            cells: sub.cells().len(),
            registry: sub.registry().len(),
            ratio: ratio_sq.iter().map(|r| r.to_f64().sqrt().repr()).collect(),
            ratio_squared: ratio_sq.iter().map(Scalar::repr).collect(),
            bound: bound.repr(),
            certified,
        });
        last = Some(sub);
    }
    let sub = last.expect("depth >= 1");
    let verification = flags.verify.then(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(flags.seed);
        let mut located = 0;
        for _ in 0..flags.samples {
            let rows: Vec<Vec<Rational>> = (0..k)
                .map(|_| {
                    let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=1000)).collect();
                    let total = raw.iter().sum::<i64>().max(1);
                    raw.iter().map(|&r| Rational::from_ratio(r, total)).collect()
                })
                .collect();
            let coords = match BarycentricCoords::from_rows(s.space(), &rows) {
                Ok(c) => c,
                Err(_) => continue, // all-zero draw
            };
            if sub.locate(&s.point(&coords)).is_ok() {
                located += 1;
            }
        }
        Verification {
            volumes_add_up: sub.volumes_add_up(),
            face_intersections: sub.check_face_intersections(),
            samples: flags.samples,
            located,
            seed: flags.seed,
        }
    });
    let trace = SubdivisionTrace {
        schema: SCHEMA,
        n,
        atoms: k,
        depth: flags.depth,
        levels,
        registry: sub
            .registry()
            .iter()
            .enumerate()
            .map(|(id, v)| RegistryEntry {
                id,
                weights: v.weights().iter().map(Scalar::repr).collect(),
                chi: v.chi(),
            })
            .collect(),
        cells: sub.cells().to_vec(),
        verification,
    };
    let summary = summarize(&trace);
    Ok((trace, summary))
}

fn summarize(t: &SubdivisionTrace) -> String {
    let mut out = format!("barycentric subdivision of a {}-vertex simplex, K = {} atoms\n", t.n, t.atoms);
    for l in &t.levels {
        out.push_str(&format!(
            "  level {}: {} cells, {} registry vertices, diameter ratio [{}] <= {} ({})\n",
            l.level,
            l.cells,
            l.registry,
            l.ratio.join(", "),
            l.bound,
            if l.certified { "certified" } else { "NOT certified" }
        ));
    }
    if let Some(v) = &t.verification {
        out.push_str(&format!(
            "  verify: volumes {}, face intersections {}, located {}/{} samples\n",
            if v.volumes_add_up { "add up" } else { "DO NOT add up" },
            match &v.face_intersections {
                Ok(()) => "ok".to_string(),
                Err(e) => format!("FAILED ({e})"),
            },
            v.located,
            v.samples
        ));
    }
    out
}

impl SubdivisionTrace {
    pub fn is_sound(&self) -> bool {
        self.levels.iter().all(|l| l.certified)
            && self.verification.as_ref().is_none_or(|v| {
                v.volumes_add_up && v.face_intersections.is_ok() && v.located == v.samples
            })
    }
}
