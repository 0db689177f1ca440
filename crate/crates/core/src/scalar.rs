//! Numeric backends. `f64` compares with a tolerance, [`Rational`] is exact.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Default equality tolerance for the float backend.
pub const FLOAT_EQ_TOL: f64 = 1e-12;

/// Singular values below this fraction of the largest one count as zero.
pub const SVD_RANK_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    Float,
    Rational,
}

impl FromStr for Arithmetic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "float" | "f64" => Ok(Arithmetic::Float),
            "rational" | "exact" => Ok(Arithmetic::Rational),
            other => Err(Error::Parse(format!(
                "unknown arithmetic {other:?}, expected \"float\" or \"rational\""
            ))),
        }
    }
}

impl Display for Arithmetic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Arithmetic::Float => "float",
            Arithmetic::Rational => "rational",
        })
    }
}

pub trait Scalar:
    Num + Signed + Clone + PartialOrd + Debug + Display + Send + Sync + 'static
{
    const EXACT: bool;
    const ARITHMETIC: Arithmetic;

    fn from_int(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    fn from_rational(q: &Rational) -> Self;

    /// Rationals take the exact binary value of `v`.
    fn from_float(v: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    /// Equality up to `tol` for floats, exact equality otherwise.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;

    /// `self >= 0` with `tol` slack for floats.
    fn nonneg(&self, tol: f64) -> bool;

    /// Pivot test used by elimination. `scale` is the magnitude of the matrix.
    fn is_negligible(&self, scale: f64) -> bool;

    fn parse_repr(s: &str) -> Result<Self>;

    /// `"p/q"` for rationals, 17 significant digits for floats.
    fn repr(&self) -> String;

    /// Nonzero `c` with `sum_j c_j columns[j] = 0`, or `None` if the
    /// columns are linearly independent.
    fn linear_dependence(columns: &[Vec<Self>]) -> Option<Vec<Self>>;

    /// Strictly positive. `Signed::is_positive` accepts `+0.0` for floats.
    fn gt_zero(&self) -> bool {
        *self > Self::zero()
    }

    fn lt_zero(&self) -> bool {
        *self < Self::zero()
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const ARITHMETIC: Arithmetic = Arithmetic::Float;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn from_rational(q: &Rational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }

    fn from_float(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }

    fn nonneg(&self, tol: f64) -> bool {
        *self >= -tol
    }

    fn is_negligible(&self, scale: f64) -> bool {
        self.abs() <= FLOAT_EQ_TOL * scale
    }

    fn parse_repr(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains('/') {
            return Ok(ToPrimitive::to_f64(&Rational::parse_repr(s)?).unwrap_or(f64::NAN));
        }
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::Parse(format!("not a finite number: {s:?}")))
    }

    fn repr(&self) -> String {
        format!("{:.16e}", self)
    }

    fn linear_dependence(columns: &[Vec<Self>]) -> Option<Vec<Self>> {
        let m = columns.len();
        if m == 0 {
            return None;
        }
        let d = columns[0].len();
        let rows = d.max(m);
        let a = DMatrix::from_fn(rows, m, |i, j| if i < d { columns[j][i] } else { 0.0 });
        let svd = a.svd(false, true);
        let v_t = svd.v_t.expect("requested right singular vectors");
        let (mut imin, mut smin, mut smax) = (0, f64::INFINITY, 0.0f64);
        for (i, s) in svd.singular_values.iter().enumerate() {
            if *s < smin {
                smin = *s;
                imin = i;
            }
            smax = smax.max(*s);
        }
        if smin > SVD_RANK_TOL * smax {
            return None;
        }
        Some(v_t.row(imin).iter().copied().collect())
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const ARITHMETIC: Arithmetic = Arithmetic::Rational;

    fn from_int(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn from_float(v: f64) -> Option<Self> {
        <Rational as FromPrimitive>::from_f64(v)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn nonneg(&self, _tol: f64) -> bool {
        !self.is_negative()
    }

    fn is_negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }

    fn parse_repr(s: &str) -> Result<Self> {
        parse_rational(s)
    }

    fn repr(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn linear_dependence(columns: &[Vec<Self>]) -> Option<Vec<Self>> {
        let m = columns.len();
        if m == 0 {
            return None;
        }
        let d = columns[0].len();
        let mut a: Vec<Vec<Rational>> = (0..d)
            .map(|i| (0..m).map(|j| columns[j][i].clone()).collect())
            .collect();
        let pivots = crate::linalg::row_reduce(&mut a, m, 0.0);
        let free = (0..m).find(|j| !pivots.contains(j))?;
        let mut c = vec![Rational::zero(); m];
        c[free] = Rational::one();
        for (r, &p) in pivots.iter().enumerate() {
            c[p] = -a[r][free].clone();
        }
        Some(c)
    }
}

/// Accepts `"p/q"`, integers and decimals such as `"-0.125"` or `"1e-3"`,
/// all read exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}0").parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i32 - 1;
    let ten = BigInt::from(10);
    let mut q = Rational::from_integer(digits);
    if scale >= 0 {
        q *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        q /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -q } else { q })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rational("0.1").unwrap(), Rational::from_ratio(1, 10));
        assert_eq!(parse_rational("-2.5e-1").unwrap(), Rational::from_ratio(-1, 4));
        assert_eq!(parse_rational("3/6").unwrap(), Rational::from_ratio(1, 2));
        assert_eq!(parse_rational("12").unwrap(), Rational::from_int(12));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn repr_round_trips() {
        let q = Rational::from_ratio(-7, 3);
        assert_eq!(q.repr(), "-7/3");
        assert_eq!(Rational::parse_repr(&q.repr()).unwrap(), q);
        let x = 0.1f64 + 0.2;
        assert_eq!(f64::parse_repr(&x.repr()).unwrap(), x);
        assert_eq!(f64::parse_repr("1/4").unwrap(), 0.25);
    }

    #[test]
    fn float_dependence_uses_singular_values() {
        assert!(f64::linear_dependence(&[vec![1.0, 0.0], vec![0.0, 1.0]]).is_none());
        let c = f64::linear_dependence(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!((c[0] * 1.0 + c[1] * 2.0).abs() < 1e-12);
        assert!(f64::linear_dependence(&[vec![1.0], vec![3.0]]).is_some());
    }

    #[test]
    fn rational_dependence_is_exact() {
        let r = |n| Rational::from_int(n);
        let c = Rational::linear_dependence(&[vec![r(1), r(2)], vec![r(2), r(4)]]).unwrap();
        assert_eq!(c, vec![r(-2), r(1)]);
        assert!(Rational::linear_dependence(&[vec![r(1), r(0)], vec![r(1), r(1)]]).is_none());
    }
}
