//! Problem files: probability space, domain, map family and solver settings.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use randfix_core::fixpoint::families;
use randfix_core::{
    Arithmetic, CellSelection, Domain, L0Scalar, L0Simplex, L0Vector, ProbabilitySpace, RandomBall, Rational,
    Scalar, SigmaStableMap, Weights,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;

/// A number in a problem file: a JSON number, or a string holding
/// `"p/q"`, an integer or a decimal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Number(serde_json::Number),
    Text(String),
}

impl Num {
    fn text(&self) -> String {
        match self {
            Num::Number(n) => n.to_string(),
            Num::Text(s) => s.clone(),
        }
    }

    pub fn parse<S: Scalar>(&self, field: &str) -> Result<S> {
        S::parse_repr(&self.text()).map_err(|e| anyhow!("{field}: {e}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub weights: Vec<Num>,
}

impl SpaceSpec {
    /// Weights are always read exactly, so decimal weights sum exactly.
    pub fn build(&self) -> Result<ProbabilitySpace> {
        let w = self
            .weights
            .iter()
            .enumerate()
            .map(|(i, n)| n.parse::<Rational>(&format!("space.weights[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        ProbabilitySpace::new(Weights::Exact(w)).context("space.weights")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainSpec {
    /// `vertices[atom][j]` is vertex `j + 1` at that atom.
    Simplex { vertices: Vec<Vec<Vec<Num>>> },
    Ball { center: Vec<Vec<Num>>, radius: Vec<Num> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MapSpec {
    Constant { value: Vec<Vec<Num>> },
    ContractionToPoint { t: Vec<Num>, target: Vec<Vec<Num>> },
    Affine { matrix: Vec<Vec<Vec<Num>>>, offset: Vec<Vec<Num>> },
    Rotation { angle: Vec<Num> },
    /// 1-based: coordinate `i` of the image is coordinate `permutation[i]`.
    CoordinatePermutation { permutation: Vec<Vec<usize>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_arithmetic")]
    pub arithmetic: Arithmetic,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_selection")]
    pub selection: CellSelection,
}

fn default_epsilon() -> f64 {
    1e-6
}

fn default_max_iter() -> usize {
    200
}

fn default_arithmetic() -> Arithmetic {
    Arithmetic::Float
}

fn default_selection() -> CellSelection {
    CellSelection::PlZero
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec {
            epsilon: default_epsilon(),
            max_iter: default_max_iter(),
            arithmetic: default_arithmetic(),
            seed: 0,
            selection: default_selection(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub schema: u32,
    pub space: SpaceSpec,
    pub domain: DomainSpec,
    pub map: MapSpec,
    #[serde(default)]
    pub solver: SolverSpec,
}

/// Reads JSON with the failing field path and position in the message.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_json(&text).with_context(|| format!("in {}", path.display()))
}

pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        anyhow!("field `{path}`: {inner}")
    })
}

pub fn check_schema(schema: u32) -> Result<()> {
    if schema != SCHEMA {
        bail!("schema: unsupported version {schema}, expected {SCHEMA}");
    }
    Ok(())
}

fn per_atom<T>(items: &[T], k: usize, field: &str) -> Result<()> {
    if items.len() != k {
        bail!("{field}: expected one entry per atom ({k}), got {}", items.len());
    }
    Ok(())
}

fn vector<S: Scalar>(space: &ProbabilitySpace, rows: &[Vec<Num>], field: &str) -> Result<L0Vector<S>> {
    per_atom(rows, space.atom_count(), field)?;
    let rows = rows
        .iter()
        .enumerate()
        .map(|(a, r)| {
            r.iter()
                .enumerate()
                .map(|(i, v)| v.parse(&format!("{field}[{a}][{i}]")))
                .collect::<Result<Vec<S>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    L0Vector::new(space, rows).with_context(|| field.to_string())
}

fn scalar<S: Scalar>(space: &ProbabilitySpace, values: &[Num], field: &str) -> Result<L0Scalar<S>> {
    per_atom(values, space.atom_count(), field)?;
    let v = values
        .iter()
        .enumerate()
        .map(|(a, v)| v.parse(&format!("{field}[{a}]")))
        .collect::<Result<Vec<S>>>()?;
    L0Scalar::new(space, v).with_context(|| field.to_string())
}

/// Vertices given per atom, regrouped per vertex.
pub fn simplex_from_rows<S: Scalar>(space: &ProbabilitySpace, vertices: &[Vec<Vec<Num>>], field: &str) -> Result<L0Simplex<S>> {
    per_atom(vertices, space.atom_count(), field)?;
    let n = vertices[0].len();
    if let Some(a) = vertices.iter().position(|v| v.len() != n) {
        bail!("{field}[{a}]: expected {n} vertices like atom 0");
    }
    let per_vertex = (0..n)
        .map(|j| {
            let rows: Vec<Vec<Num>> = vertices.iter().map(|v| v[j].clone()).collect();
            vector(space, &rows, &format!("{field}[*][{j}]"))
        })
        .collect::<Result<Vec<_>>>()?;
    L0Simplex::new(per_vertex).with_context(|| field.to_string())
}

pub struct Problem<S> {
    pub space: ProbabilitySpace,
    pub domain: Domain<S>,
    pub map: SigmaStableMap<S>,
}

impl ProblemSpec {
    pub fn build<S: Scalar>(&self) -> Result<Problem<S>> {
        check_schema(self.schema)?;
        let space = self.space.build()?;
        let domain = match &self.domain {
            DomainSpec::Simplex { vertices } => Domain::Simplex(simplex_from_rows(&space, vertices, "domain.vertices")?),
            DomainSpec::Ball { center, radius } => {
                if S::EXACT {
                    bail!("domain: ball domains need float arithmetic (use --arith float)");
                }
                let center = vector(&space, center, "domain.center")?;
                let radius = scalar(&space, radius, "domain.radius")?;
                Domain::Ball(RandomBall::new(center, radius).context("domain.radius")?)
            }
        };
        let map = self.build_map(&space, domain.clone())?;
        Ok(Problem { space, domain, map })
    }

    fn build_map<S: Scalar>(&self, space: &ProbabilitySpace, domain: Domain<S>) -> Result<SigmaStableMap<S>> {
        let k = space.atom_count();
        let map = match &self.map {
            MapSpec::Constant { value } => families::constant(domain, vector(space, value, "map.value")?),
            MapSpec::ContractionToPoint { t, target } => families::contraction_to_point(
                domain,
                scalar(space, t, "map.t")?,
                vector(space, target, "map.target")?,
            ),
            MapSpec::Affine { matrix, offset } => {
                per_atom(matrix, k, "map.matrix")?;
                let m = matrix
                    .iter()
                    .enumerate()
                    .map(|(a, rows)| {
                        rows.iter()
                            .enumerate()
                            .map(|(i, r)| {
                                r.iter()
                                    .enumerate()
                                    .map(|(j, v)| v.parse(&format!("map.matrix[{a}][{i}][{j}]")))
                                    .collect::<Result<Vec<S>>>()
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                families::affine(domain, m, vector(space, offset, "map.offset")?)
            }
            MapSpec::Rotation { angle } => {
                let Domain::Ball(ball) = domain else {
                    bail!("map: rotation needs a ball domain");
                };
                let ball = to_float_ball(&ball)?;
                let angle = scalar::<f64>(space, angle, "map.angle")?;
                let rot = families::rotation(ball, angle).context("map (rotation)")?;
                return Ok(cast_float_map(rot));
            }
            MapSpec::CoordinatePermutation { permutation } => {
                per_atom(permutation, k, "map.permutation")?;
                let zero_based = permutation
                    .iter()
                    .enumerate()
                    .map(|(a, p)| {
                        p.iter()
                            .map(|&i| {
                                i.checked_sub(1)
                                    .ok_or_else(|| anyhow!("map.permutation[{a}]: entries are 1-based"))
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                families::coordinate_permutation(domain, zero_based)
            }
        };
        map.with_context(|| format!("map ({})", self.family()))
    }

    pub fn family(&self) -> &'static str {
        match self.map {
            MapSpec::Constant { .. } => "constant",
            MapSpec::ContractionToPoint { .. } => "contraction-to-point",
            MapSpec::Affine { .. } => "affine",
            MapSpec::Rotation { .. } => "rotation",
            MapSpec::CoordinatePermutation { .. } => "coordinate-permutation",
        }
    }
}

// Ball problems only ever build with `S = f64`; these two helpers let the
// generic builder hand the float-only rotation family through.
fn to_float_ball<S: Scalar>(ball: &RandomBall<S>) -> Result<RandomBall<f64>> {
    RandomBall::new(ball.center().to_f64(), ball.radius().to_f64()).context("domain")
}

fn cast_float_map<S: Scalar>(map: SigmaStableMap<f64>) -> SigmaStableMap<S> {
    let Domain::Ball(ball) = map.domain().clone() else {
        unreachable!("rotation lives on a ball");
    };
    let space = ball.space().clone();
    let center = L0Vector::from_rows_fn(&space, ball.dim(), |a| {
        ball.center().row(a).iter().map(|v| S::from_float(*v).expect("finite")).collect()
    });
    let radius = L0Scalar::from_fn(&space, |a| S::from_float(*ball.radius().get(a)).expect("finite"));
    let domain = Domain::Ball(RandomBall::new(center, radius).expect("radius stays positive"));
    let lip = map.lipschitz().map(<[f64]>::to_vec);
    let family = map.family().to_string();
    let out = SigmaStableMap::new_fallible(domain, move |a, x: &[S]| {
        let xf: Vec<f64> = x.iter().map(Scalar::to_f64).collect();
        Ok(map
            .eval_atom(a, &xf)?
            .into_iter()
            .map(|v| S::from_float(v).expect("finite"))
            .collect())
    })
    .with_family(&family);
    match lip {
        Some(l) => out.with_lipschitz(l),
        None => out,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_parse_exactly_from_json_and_strings() {
        let spec: SpaceSpec = parse_json(r#"{"weights": [0.1, "0.2", "7/10"]}"#).unwrap();
        let space = spec.build().unwrap();
        assert_eq!(space.atom_count(), 3);
        let w: Rational = Num::Text("7/10".into()).parse("w").unwrap();
        assert_eq!(w, Rational::from_ratio(7, 10));
    }

    #[test]
    fn error_names_the_failing_field() {
        let err = parse_json::<ProblemSpec>(
            r#"{"schema": 1, "space": {"weights": [1]}, "domain": {"type": "ball", "center": [[0]], "radius": "x"},
                "map": {"family": "constant", "value": [[0]]}}"#,
        )
        .unwrap_err();
        assert!(format!("{err:#}").contains("domain"), "{err:#}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_json::<SolverSpec>(r#"{"epsilon": 1e-3, "tolerance": 1}"#).unwrap_err();
        assert!(format!("{err:#}").contains("tolerance"));
    }

    #[test]
    fn ball_needs_float() {
        let spec: ProblemSpec = parse_json(
            r#"{"schema": 1, "space": {"weights": [1]}, "domain": {"type": "ball", "center": [[0, 0]], "radius": [1]},
                "map": {"family": "rotation", "angle": [1]}}"#,
        )
        .unwrap();
        assert!(spec.build::<f64>().is_ok());
        assert!(spec.build::<Rational>().is_err());
    }

    #[test]
    fn permutation_is_one_based() {
        let spec: ProblemSpec = parse_json(
            r#"{"schema": 1, "space": {"weights": [1]},
                "domain": {"type": "simplex", "vertices": [[[1, 0], [0, 1]]]},
                "map": {"family": "coordinate-permutation", "permutation": [[0, 1]]}}"#,
        )
        .unwrap();
        let err = spec.build::<f64>().err().unwrap();
        assert!(format!("{err:#}").contains("1-based"));
    }

    #[test]
    fn schema_version_is_checked() {
        assert!(check_schema(SCHEMA).is_ok());
        assert!(check_schema(SCHEMA + 1).is_err());
    }
}
