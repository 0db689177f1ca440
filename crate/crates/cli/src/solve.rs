use std::path::PathBuf;

use anyhow::{Context, Result};
use randfix_core::{
    l0_diameter, solve_on_convex, solve_on_simplex, Arithmetic, CellSelection, Domain, Rational, Scalar,
    SolveTrace, SolverOptions,
};
use serde::{Deserialize, Serialize};

use crate::problem::{read_json, ProblemSpec, SCHEMA};

#[derive(Debug, Clone, Default)]
pub struct SolveFlags {
    pub problem: PathBuf,
    pub epsilon: Option<f64>,
    pub max_iter: Option<usize>,
    pub arith: Option<Arithmetic>,
    pub selection: Option<CellSelection>,
    pub seed: Option<u64>,
    pub trace: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Converged,
    MaxIter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomReport {
    pub atom: usize,
    pub x_star: Vec<String>,
    pub residual: String,
    pub iterations: usize,
    pub diameter: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema: u32,
    pub status: Status,
    pub family: String,
    pub arithmetic: Arithmetic,
    pub selection: CellSelection,
    pub epsilon: String,
    pub max_iter: usize,
    pub seed: u64,
    pub atoms: Vec<AtomReport>,
    pub trace: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepRecord {
    pub step: usize,
    /// `simplex[atom][vertex][coordinate]`.
    pub simplex: Vec<Vec<Vec<String>>>,
    pub diameter_squared: Vec<String>,
    pub chosen_cells: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceFile {
    pub schema: u32,
    pub arithmetic: Arithmetic,
    pub steps: Vec<StepRecord>,
    pub x_star: Vec<Vec<String>>,
    pub residual: Vec<String>,
    pub iterations: Vec<usize>,
    pub converged: bool,
}

fn trace_file<S: Scalar>(trace: &SolveTrace<S>) -> TraceFile {
    let k = trace.iterations.len();
    TraceFile {
        schema: SCHEMA,
        arithmetic: S::ARITHMETIC,
        steps: trace
            .steps
            .iter()
            .enumerate()
            .map(|(m, st)| StepRecord {
                step: m,
                simplex: (0..k)
                    .map(|a| st.simplex.rows_at(a).iter().map(|v| v.iter().map(Scalar::repr).collect()).collect())
                    .collect(),
                diameter_squared: st.diameter_squared.values().iter().map(Scalar::repr).collect(),
                chosen_cells: st.chosen_cells.clone(),
            })
            .collect(),
        x_star: trace.x_star.rows().map(|r| r.iter().map(Scalar::repr).collect()).collect(),
        residual: trace.residual.values().iter().map(Scalar::repr).collect(),
        iterations: trace.iterations.clone(),
        converged: trace.converged,
    }
}

pub struct Outcome {
    pub report: Report,
    pub summary: String,
}

pub fn run_solve(flags: &SolveFlags) -> Result<Outcome> {
    let spec: ProblemSpec = read_json(&flags.problem)?;
    let mut solver = spec.solver.clone();
    if let Some(e) = flags.epsilon {
        solver.epsilon = e;
    }
    if let Some(m) = flags.max_iter {
        solver.max_iter = m;
    }
    if let Some(a) = flags.arith {
        solver.arithmetic = a;
    }
    if let Some(s) = flags.selection {
        solver.selection = s;
    }
    if let Some(s) = flags.seed {
        solver.seed = s;
    }
    let opts = SolverOptions {
        epsilon: solver.epsilon,
        max_iter: solver.max_iter,
        selection: solver.selection,
    };
    let (atoms, trace) = match solver.arithmetic {
        Arithmetic::Float => solve_with::<f64>(&spec, &opts)?,
        Arithmetic::Rational => solve_with::<Rational>(&spec, &opts)?,
    };
    let converged = trace.converged;
    let trace_path = match &flags.trace {
        Some(p) => {
            write_json(p, &trace)?;
            Some(p.display().to_string())
        }
        None => None,
    };
    let report = Report {
        schema: SCHEMA,
        status: if converged { Status::Converged } else { Status::MaxIter },
        family: spec.family().to_string(),
        arithmetic: solver.arithmetic,
        selection: solver.selection,
        epsilon: solver.epsilon.repr(),
        max_iter: solver.max_iter,
        seed: solver.seed,
        atoms,
        trace: trace_path,
    };
    let summary = summarize(&report);
    Ok(Outcome { report, summary })
}

fn solve_with<S: Scalar>(spec: &ProblemSpec, opts: &SolverOptions) -> Result<(Vec<AtomReport>, TraceFile)> {
    let problem = spec.build::<S>()?;
    match &problem.domain {
        Domain::Simplex(s) => {
            let trace = solve_on_simplex(s, &problem.map, opts).context("solver")?;
            Ok((atom_reports(&trace), trace_file(&trace)))
        }
        Domain::Ball(_) => {
            // `build` only accepts balls in float arithmetic
            let problem = spec.build::<f64>()?;
            let Domain::Ball(ball) = &problem.domain else { unreachable!() };
            let trace = solve_on_convex(ball, &problem.map, opts).context("solver")?;
            Ok((atom_reports(&trace), trace_file(&trace)))
        }
    }
}

fn atom_reports<S: Scalar>(trace: &SolveTrace<S>) -> Vec<AtomReport> {
    let diam = l0_diameter(trace.final_simplex());
    (0..trace.iterations.len())
        .map(|a| AtomReport {
            atom: a,
            x_star: trace.x_star.row(a).iter().map(Scalar::repr).collect(),
            residual: trace.residual.get(a).repr(),
            iterations: trace.iterations[a],
            diameter: diam.get(a).repr(),
        })
        .collect()
}

fn summarize(r: &Report) -> String {
    let mut out = format!(
        "{} ({}, {}, epsilon {}): {}\n",
        r.family,
        r.arithmetic,
        serde_json::to_value(r.selection).expect("enum").as_str().unwrap_or_default(),
        r.epsilon,
        match r.status {
            Status::Converged => "converged",
            Status::MaxIter => "stopped at max_iter",
        }
    );
    for a in &r.atoms {
        out.push_str(&format!(
            "  atom {}: x* = [{}], residual {}, {} rounds\n",
            a.atom,
            a.x_star.join(", "),
            a.residual,
            a.iterations
        ));
    }
    out
}

pub fn write_json<T: Serialize>(path: &std::path::Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}
