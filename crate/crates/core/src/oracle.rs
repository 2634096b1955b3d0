//! Independent checks for the solvers: rational-root enumeration, exact
//! square roots, and the quadratic reduction of the well problems.
//!
//! Nothing here calls into the table or factorization searches, so an
//! agreement between a solver and this module is two separate derivations
//! reaching the same value.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::sexagesimal::ExactNumber;
use crate::solvers::{SideConstraint, WellProblem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("leading coefficient must be nonzero")]
    ZeroLeadingCoefficient,
    #[error("square root of negative value {0}")]
    Negative(String),
    #[error("area plus volume {area_plus_volume} does not exceed volume {volume}")]
    NonPositiveProduct {
        volume: ExactNumber,
        area_plus_volume: ExactNumber,
    },
}

/// `c3·x³ + c2·x² + c1·x + c0 = 0`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicCoefficients {
    pub c3: ExactNumber,
    pub c2: ExactNumber,
    pub c1: ExactNumber,
    pub c0: ExactNumber,
}

impl CubicCoefficients {
    pub fn new(c3: ExactNumber, c2: ExactNumber, c1: ExactNumber, c0: ExactNumber) -> Self {
        CubicCoefficients { c3, c2, c1, c0 }
    }

    pub fn eval(&self, x: &ExactNumber) -> ExactNumber {
        ((&self.c3 * x + &self.c2) * x + &self.c1) * x + &self.c0
    }
}

impl fmt::Display for CubicCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = [
            (&self.c3, "x³"),
            (&self.c2, "x²"),
            (&self.c1, "x"),
            (&self.c0, ""),
        ];
        let mut first = true;
        for (c, var) in terms {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.abs();
            if mag == ExactNumber::one() && !var.is_empty() {
                f.write_str(var)?;
            } else {
                write!(f, "{mag}{var}")?;
            }
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        f.write_str(" = 0")
    }
}

/// Every rational root, by the rational root theorem.
pub fn rational_roots_cubic(c: &CubicCoefficients) -> Result<BTreeSet<ExactNumber>, OracleError> {
    if c.c3.is_zero() {
        return Err(OracleError::ZeroLeadingCoefficient);
    }
    let coeffs = [&c.c3, &c.c2, &c.c1, &c.c0];
    let lcm = coeffs
        .iter()
        .fold(BigInt::one(), |acc, k| acc.lcm(k.denom()));
    let integral: Vec<BigInt> = coeffs
        .iter()
        .map(|k| (k.numer() * &lcm) / k.denom())
        .collect();
    Ok(rational_roots(&integral))
}

/// Rational roots of an integer polynomial, highest degree first.
pub fn rational_roots(coeffs: &[BigInt]) -> BTreeSet<ExactNumber> {
    let mut roots = BTreeSet::new();
    let mut poly: Vec<BigInt> = coeffs.iter().skip_while(|c| c.is_zero()).cloned().collect();
    if poly.len() < 2 {
        return roots;
    }
    if poly.last().is_some_and(|c| c.is_zero()) {
        roots.insert(ExactNumber::zero());
        while poly.last().is_some_and(|c| c.is_zero()) {
            poly.pop();
        }
        if poly.len() < 2 {
            return roots;
        }
    }
    let lead = poly[0].magnitude().clone();
    let constant = poly.last().expect("degree ≥ 1").magnitude().clone();
    let numerators = divisors(&constant);
    let denominators = divisors(&lead);
    for p in &numerators {
        for q in &denominators {
            if !p.gcd(q).is_one() {
                continue;
            }
            for sign in [1, -1] {
                let p_signed = BigInt::from(p.clone()) * sign;
                let q_signed = BigInt::from(q.clone());
                if is_root(&poly, &p_signed, &q_signed) {
                    roots.insert(ExactNumber::new(p_signed, q_signed).expect("q ≥ 1"));
                }
            }
        }
    }
    roots
}

/// `Σ aᵢ pⁱ q^(deg−i) == 0`, all in integers.
fn is_root(poly: &[BigInt], p: &BigInt, q: &BigInt) -> bool {
    let degree = poly.len() - 1;
    let mut total = BigInt::zero();
    for (i, a) in poly.iter().enumerate() {
        let power = degree - i;
        total += a * num_traits::pow(p.clone(), power) * num_traits::pow(q.clone(), i);
    }
    total.is_zero()
}

fn divisors(n: &BigUint) -> Vec<BigUint> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigUint::one();
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            let pair = n / &d;
            if pair != d {
                large.push(pair);
            }
            small.push(d.clone());
        }
        d += 1u32;
    }
    small.extend(large.into_iter().rev());
    small
}

/// `r ≥ 0` with `r² = v`, if `v` is the square of a rational.
pub fn exact_sqrt(v: &ExactNumber) -> Result<Option<ExactNumber>, OracleError> {
    if v.is_negative() {
        return Err(OracleError::Negative(v.to_string()));
    }
    let root = |n: &BigUint| {
        let r = n.sqrt();
        (&r * &r == *n).then_some(r)
    };
    let (Some(numer), Some(denom)) = (root(v.numer().magnitude()), root(v.denom().magnitude()))
    else {
        return Ok(None);
    };
    Ok(Some(
        ExactNumber::new(BigInt::from(numer), BigInt::from(denom)).expect("nonzero root"),
    ))
}

/// One `(x, y, z)` reading of a well problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WellAnswer {
    pub x: ExactNumber,
    pub y: ExactNumber,
    pub z: ExactNumber,
    /// Whether `x·y·z` reproduces the stated volume.
    pub volume_consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuadraticOutcome {
    /// All positive readings, larger `x` first.
    Rational(Vec<WellAnswer>),
    /// The discriminant is not the square of a rational.
    Irrational { discriminant: ExactNumber },
    /// Negative discriminant: no real lengths at all.
    NoRealSolution { discriminant: ExactNumber },
}

impl QuadraticOutcome {
    /// The reading that also satisfies `x·y·z = V`.
    pub fn consistent_answer(&self) -> Option<&WellAnswer> {
        match self {
            QuadraticOutcome::Rational(answers) => answers.iter().find(|a| a.volume_consistent),
            _ => None,
        }
    }
}

/// Solves `xy = W − V` together with the side constraint as a quadratic,
/// then `z = conversion · x`.
pub fn quadratic_reduction(problem: &WellProblem) -> Result<QuadraticOutcome, OracleError> {
    let product = &problem.area_plus_volume - &problem.volume;
    if !product.is_positive() {
        return Err(OracleError::NonPositiveProduct {
            volume: problem.volume.clone(),
            area_plus_volume: problem.area_plus_volume.clone(),
        });
    }
    let four = ExactNumber::integer(4);
    let half = ExactNumber::frac(1, 2);
    let (discriminant, side) = match &problem.constraint {
        // x² − d·x − xy = 0
        SideConstraint::Difference(d) => (d * d + &four * &product, d),
        // t² − s·t + xy = 0
        SideConstraint::Sum(s) => (s * s - &four * &product, s),
    };
    if discriminant.is_negative() {
        return Ok(QuadraticOutcome::NoRealSolution { discriminant });
    }
    let Some(root) = exact_sqrt(&discriminant)? else {
        return Ok(QuadraticOutcome::Irrational { discriminant });
    };

    let pairs: Vec<(ExactNumber, ExactNumber)> = match &problem.constraint {
        SideConstraint::Difference(d) => {
            let x = (side + &root) * &half;
            let y = &x - d;
            vec![(x, y)]
        }
        SideConstraint::Sum(s) => {
            let big = (side + &root) * &half;
            let small = s - &big;
            if big == small {
                vec![(big, small)]
            } else {
                vec![(big.clone(), small.clone()), (small, big)]
            }
        }
    };
    let conversion = &problem.metrology.vertical;
    let answers = pairs
        .into_iter()
        .filter(|(x, y)| x.is_positive() && y.is_positive())
        .map(|(x, y)| {
            let z = conversion * &x;
            let volume_consistent = &x * &y * &z == problem.volume;
            WellAnswer {
                x,
                y,
                z,
                volume_consistent,
            }
        })
        .collect();
    Ok(QuadraticOutcome::Rational(answers))
}
