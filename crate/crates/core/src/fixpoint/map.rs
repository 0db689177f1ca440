use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::l0::{L0Scalar, L0Vector};
use crate::linalg;
use crate::measure::ProbabilitySpace;
use crate::scalar::Scalar;
use crate::simplex::{solve_affine, L0Simplex};

/// Float outputs this far outside the domain are projected back.
pub const DOMAIN_SLACK: f64 = 1e-9;

/// `{x : ‖x − center‖ <= radius}` per atom.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomBall<S> {
    center: L0Vector<S>,
    radius: L0Scalar<S>,
}

impl<S: Scalar> RandomBall<S> {
    pub fn new(center: L0Vector<S>, radius: L0Scalar<S>) -> Result<Self> {
        center.space().ensure_same(radius.space())?;
        if let Some(a) = radius.values().iter().position(|r| !r.gt_zero()) {
            return Err(Error::InvalidMap(format!(
                "radius at atom {a} is {}, expected > 0",
                radius.get(a).repr()
            )));
        }
        Ok(RandomBall { center, radius })
    }

    pub fn unit(space: &ProbabilitySpace, dim: usize) -> Self {
        RandomBall {
            center: L0Vector::zeros(space, dim),
            radius: L0Scalar::constant(space, S::one()),
        }
    }

    pub fn center(&self) -> &L0Vector<S> {
        &self.center
    }

    pub fn radius(&self) -> &L0Scalar<S> {
        &self.radius
    }

    pub fn space(&self) -> &ProbabilitySpace {
        self.center.space()
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn contains_at(&self, atom: usize, x: &[S]) -> bool {
        let r = self.radius.get(atom).clone();
        linalg::dist_sq(x, self.center.row(atom)) <= r.clone() * r
    }

    pub fn restrict(&self, atom: usize, target: &ProbabilitySpace) -> Self {
        RandomBall {
            center: self.center.restrict(atom, target),
            radius: self.radius.restrict(atom, target),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Domain<S> {
    Simplex(L0Simplex<S>),
    Ball(RandomBall<S>),
}

impl<S: Scalar> Domain<S> {
    pub fn space(&self) -> &ProbabilitySpace {
        match self {
            Domain::Simplex(s) => s.space(),
            Domain::Ball(b) => b.space(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Simplex(s) => s.dim(),
            Domain::Ball(b) => b.dim(),
        }
    }

    pub fn contains_at(&self, atom: usize, x: &[S]) -> bool {
        match self {
            Domain::Simplex(s) => {
                crate::simplex::coords_at(&s.rows_at(atom), x, atom).is_ok()
            }
            Domain::Ball(b) => b.contains_at(atom, x),
        }
    }

    pub fn restrict(&self, atom: usize, target: &ProbabilitySpace) -> Self {
        match self {
            Domain::Simplex(s) => Domain::Simplex(s.restrict(atom, target)),
            Domain::Ball(b) => Domain::Ball(b.restrict(atom, target)),
        }
    }

    /// Accepts `y` if it lies in the domain at `atom`. Float points within
    /// `DOMAIN_SLACK` are projected back; anything else is an error.
    pub fn admit(&self, atom: usize, y: Vec<S>) -> Result<Vec<S>> {
        let leaves = |detail: String| Error::MapLeavesDomain { atom, detail };
        match self {
            Domain::Simplex(s) => {
                let rows = s.rows_at(atom);
                let lam = solve_affine(&rows, &y).ok_or_else(|| leaves("image is off the affine hull".into()))?;
                if lam.iter().all(|l| !l.lt_zero()) {
                    return Ok(y);
                }
                if let Some((i, l)) = lam.iter().enumerate().find(|(_, l)| !l.nonneg(DOMAIN_SLACK)) {
                    return Err(leaves(format!("image has λ_{} = {}", i + 1, l.repr())));
                }
                let clamped: Vec<S> = lam.iter().map(|l| S::max_of(l.clone(), S::zero())).collect();
                let total = clamped.iter().fold(S::zero(), |acc, l| acc + l.clone());
                let w: Vec<S> = clamped.into_iter().map(|l| l / total.clone()).collect();
                Ok(linalg::combine(&w, &rows))
            }
            Domain::Ball(b) => {
                if b.contains_at(atom, &y) {
                    return Ok(y);
                }
                let c = b.center.row(atom);
                let r = b.radius.get(atom).to_f64();
                let dist = linalg::dist_sq(&y, c).to_f64().sqrt();
                if S::EXACT || dist > r * (1.0 + DOMAIN_SLACK) {
                    return Err(leaves(format!("image is at distance {dist} from the center, radius {r}")));
                }
                let scale = S::from_float(r / dist).unwrap_or_else(S::one);
                Ok(y.iter()
                    .zip(c)
                    .map(|(v, ci)| ci.clone() + (v.clone() - ci.clone()) * scale.clone())
                    .collect())
            }
        }
    }
}

pub type AtomEval<S> = Arc<dyn Fn(usize, &[S]) -> Result<Vec<S>> + Send + Sync>;

/// A self-map of a domain given atom by atom; `f(x)(ω) = eval(ω, x(ω))`,
/// so concatenation commutes with `f` by construction.
#[derive(Clone)]
pub struct SigmaStableMap<S> {
    domain: Domain<S>,
    eval: AtomEval<S>,
    lipschitz: Option<Vec<f64>>,
    family: String,
}

impl<S: Scalar> fmt::Debug for SigmaStableMap<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SigmaStableMap")
            .field("family", &self.family)
            .field("domain", &self.domain)
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

impl<S: Scalar> SigmaStableMap<S> {
    pub fn new(domain: Domain<S>, eval: impl Fn(usize, &[S]) -> Vec<S> + Send + Sync + 'static) -> Self {
        Self::new_fallible(domain, move |a, x| Ok(eval(a, x)))
    }

    pub fn new_fallible(
        domain: Domain<S>,
        eval: impl Fn(usize, &[S]) -> Result<Vec<S>> + Send + Sync + 'static,
    ) -> Self {
        SigmaStableMap {
            domain,
            eval: Arc::new(eval),
            lipschitz: None,
            family: "custom".into(),
        }
    }

    pub fn with_lipschitz(mut self, constants: Vec<f64>) -> Self {
        self.lipschitz = Some(constants);
        self
    }

    pub fn with_family(mut self, name: &str) -> Self {
        self.family = name.into();
        self
    }

    pub fn domain(&self) -> &Domain<S> {
        &self.domain
    }

    pub fn space(&self) -> &ProbabilitySpace {
        self.domain.space()
    }

    pub fn lipschitz(&self) -> Option<&[f64]> {
        self.lipschitz.as_deref()
    }

    pub fn family(&self) -> &str {
        &self.family
    }

    /// Evaluates at one atom and checks that the image stays in the domain.
    pub fn eval_atom(&self, atom: usize, x: &[S]) -> Result<Vec<S>> {
        let y = (self.eval)(atom, x)?;
        if y.len() != self.domain.dim() {
            return Err(Error::Shape(format!(
                "map returned {} coordinates at atom {atom}, expected {}",
                y.len(),
                self.domain.dim()
            )));
        }
        self.domain.admit(atom, y)
    }

    pub fn apply(&self, x: &L0Vector<S>) -> Result<L0Vector<S>> {
        x.space().ensure_same(self.space())?;
        let rows = (0..self.space().atom_count())
            .map(|a| self.eval_atom(a, x.row(a)))
            .collect::<Result<Vec<_>>>()?;
        L0Vector::new(self.space(), rows)
    }

    /// The map at `atom`, as a map over a one-atom space.
    pub fn restrict(&self, atom: usize, target: &ProbabilitySpace) -> Self {
        let eval = self.eval.clone();
        SigmaStableMap {
            domain: self.domain.restrict(atom, target),
            eval: Arc::new(move |_, x| eval(atom, x)),
            lipschitz: self.lipschitz.as_ref().map(|l| vec![l[atom]]),
            family: self.family.clone(),
        }
    }

    /// `x ↦ self(pre(atom, x))` viewed as a map on `domain`.
    pub fn precompose(
        &self,
        domain: Domain<S>,
        pre: impl Fn(usize, &[S]) -> Vec<S> + Send + Sync + 'static,
    ) -> Self {
        let outer = self.clone();
        SigmaStableMap {
            domain,
            eval: Arc::new(move |a, x| outer.eval_atom(a, &pre(a, x))),
            lipschitz: self.lipschitz.clone(),
            family: self.family.clone(),
        }
    }
}
