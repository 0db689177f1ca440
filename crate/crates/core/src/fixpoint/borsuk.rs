use super::map::{Domain, SigmaStableMap};
use crate::error::{Error, Result};
use crate::l0::L0Vector;
use crate::linalg;

/// Below this `‖f(x) − x‖` the retraction ray is treated as undefined.
pub const DEGENERATE_TOL: f64 = 1e-12;

/// `h(x) = x + λ(x)(f(x) − x)` where `λ(x)` is the smaller root of
/// `‖f(x) − x‖² λ² + 2⟨x, f(x) − x⟩ λ + ‖x‖² − 1 = 0`, i.e. the point where
/// the ray from `f(x)` through `x` leaves the unit ball.
pub fn borsuk_retraction(f: &SigmaStableMap<f64>, x: &L0Vector<f64>) -> Result<L0Vector<f64>> {
    let Domain::Ball(ball) = f.domain() else {
        return Err(Error::InvalidMap("the retraction needs a map on the unit ball".into()));
    };
    let k = ball.space().atom_count();
    for a in 0..k {
        if ball.radius().get(a) != &1.0 || ball.center().row(a).iter().any(|c| *c != 0.0) {
            return Err(Error::InvalidMap(format!("the ball at atom {a} is not the unit ball")));
        }
    }
    x.space().ensure_same(ball.space())?;
    let rows = (0..k)
        .map(|a| retract_atom(f, a, x.row(a)))
        .collect::<Result<Vec<_>>>()?;
    L0Vector::new(x.space(), rows)
}

fn retract_atom(f: &SigmaStableMap<f64>, atom: usize, x: &[f64]) -> Result<Vec<f64>> {
    let xx = linalg::dot(x, x);
    if xx > 1.0 + DEGENERATE_TOL {
        return Err(Error::OutsideDomain {
            atom,
            detail: format!("‖x‖ = {} > 1", xx.sqrt()),
        });
    }
    let fx = f.eval_atom(atom, x)?;
    let u = linalg::sub(&fx, x);
    let a = linalg::dot(&u, &u);
    if a.sqrt() <= DEGENERATE_TOL {
        return Err(Error::DegenerateRetraction { atom });
    }
    let c = xx - 1.0;
    if c.abs() <= DEGENERATE_TOL {
        return Ok(x.to_vec());
    }
    let b = 2.0 * linalg::dot(x, &u);
    let disc = (b * b - 4.0 * a * c).max(0.0);
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let q = if b == 0.0 { -0.5 * disc.sqrt() } else { q };
    let lambda = (q / a).min(c / q);
    Ok(x.iter().zip(&u).map(|(xi, ui)| xi + lambda * ui).collect())
}
