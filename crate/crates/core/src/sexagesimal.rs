//! Exact rational numbers with base-60 notation.
//!
//! Values are stored as absolute rationals in lowest terms. The textual form
//! follows the assyriological convention: base-60 digits written in decimal,
//! separated by `,`, with `;` as the radix point (`0;7,30` is 1/8, `4,12` is
//! 252). Negative numbers carry a leading `-`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberError {
    #[error("invalid number {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error("{0} has no finite sexagesimal expansion")]
    NotFiniteExpansion(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation is undefined for zero")]
    ZeroInput,
}

/// An exact rational value.
///
/// Always normalized: the denominator is positive and coprime to the
/// numerator, and zero is `0/1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactNumber(BigRational);

/// How a literal without a `;` is positioned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Placement {
    /// `7,30` is read as the integer 450.
    #[default]
    Integer,
    /// `7,30` is read as `0;7,30`.
    Fraction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ExactNumber {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, NumberError> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(NumberError::DivisionByZero);
        }
        Ok(ExactNumber(BigRational::new(numer.into(), denom)))
    }

    /// Panics when `denom` is zero. Meant for constants.
    pub fn frac(numer: i64, denom: i64) -> Self {
        Self::new(numer, denom).expect("nonzero denominator")
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        ExactNumber(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        ExactNumber(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactNumber(BigRational::one())
    }

    pub fn from_rational(r: BigRational) -> Self {
        ExactNumber(r)
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// The value as an integer, if it is one.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.numer().clone())
    }

    /// The value as a `u64`, if it is a non-negative integer in range.
    pub fn to_u64(&self) -> Option<u64> {
        self.to_integer().and_then(|n| n.to_u64())
    }

    pub fn abs(&self) -> Self {
        ExactNumber(self.0.abs())
    }

    pub fn pow(&self, exp: i32) -> Self {
        ExactNumber(num_traits::Pow::pow(&self.0, exp))
    }

    pub fn checked_div(&self, rhs: &ExactNumber) -> Result<Self, NumberError> {
        if rhs.is_zero() {
            return Err(NumberError::DivisionByZero);
        }
        Ok(ExactNumber(&self.0 / &rhs.0))
    }

    pub fn reciprocal(&self) -> Result<Self, NumberError> {
        reciprocal(self)
    }

    pub fn is_regular(&self) -> Result<bool, NumberError> {
        is_regular(self)
    }

    /// True when the denominator has no prime factor other than 2, 3 and 5.
    pub fn has_finite_expansion(&self) -> bool {
        is_five_smooth(self.denom().magnitude())
    }

    /// Canonical sexagesimal text.
    pub fn to_sexagesimal(&self) -> Result<String, NumberError> {
        render_number(self)
    }

    /// `p/q` form, or just `p` for integers.
    pub fn to_fraction_string(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

/// Sexagesimal when the expansion is finite, `p/q` otherwise.
impl fmt::Display for ExactNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match render_number(self) {
            Ok(text) => f.write_str(&text),
            Err(_) => f.write_str(&self.to_fraction_string()),
        }
    }
}

impl fmt::Debug for ExactNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactNumber({})", self.to_fraction_string())
    }
}

impl FromStr for ExactNumber {
    type Err = NumberError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_literal(s)
    }
}

impl From<i64> for ExactNumber {
    fn from(n: i64) -> Self {
        ExactNumber::integer(n)
    }
}

impl From<u64> for ExactNumber {
    fn from(n: u64) -> Self {
        ExactNumber::integer(n)
    }
}

impl From<BigInt> for ExactNumber {
    fn from(n: BigInt) -> Self {
        ExactNumber::integer(n)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&ExactNumber> for &ExactNumber {
            type Output = ExactNumber;
            fn $method(self, rhs: &ExactNumber) -> ExactNumber {
                ExactNumber($trait::$method(&self.0, &rhs.0))
            }
        }

        impl $trait<ExactNumber> for ExactNumber {
            type Output = ExactNumber;
            fn $method(self, rhs: ExactNumber) -> ExactNumber {
                ExactNumber($trait::$method(self.0, rhs.0))
            }
        }

        impl $trait<&ExactNumber> for ExactNumber {
            type Output = ExactNumber;
            fn $method(self, rhs: &ExactNumber) -> ExactNumber {
                ExactNumber($trait::$method(self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for ExactNumber {
    type Output = ExactNumber;
    fn neg(self) -> ExactNumber {
        ExactNumber(-self.0)
    }
}

impl Neg for &ExactNumber {
    type Output = ExactNumber;
    fn neg(self) -> ExactNumber {
        ExactNumber(-&self.0)
    }
}

/// Exact field arithmetic. Only division can fail.
pub fn arithmetic(
    a: &ExactNumber,
    b: &ExactNumber,
    op: ArithOp,
) -> Result<ExactNumber, NumberError> {
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a.checked_div(b)?,
    })
}

pub fn reciprocal(x: &ExactNumber) -> Result<ExactNumber, NumberError> {
    if x.is_zero() {
        return Err(NumberError::ZeroInput);
    }
    Ok(ExactNumber(x.0.recip()))
}

/// True iff numerator and denominator are both 5-smooth.
pub fn is_regular(x: &ExactNumber) -> Result<bool, NumberError> {
    if x.is_zero() {
        return Err(NumberError::ZeroInput);
    }
    Ok(is_five_smooth(x.numer().magnitude()) && is_five_smooth(x.denom().magnitude()))
}

pub(crate) fn is_five_smooth(n: &BigUint) -> bool {
    if n.is_zero() {
        return false;
    }
    let mut n = n.clone();
    for p in [2u32, 3, 5] {
        let p = BigUint::from(p);
        loop {
            let (q, r) = n.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            n = q;
        }
    }
    n.is_one()
}

/// Positional form of a number with a finite base-60 expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SexForm {
    pub negative: bool,
    /// Most significant first; `[0]` for values below one.
    pub integer: Vec<u8>,
    /// Empty for integers; never ends in a zero digit.
    pub fraction: Vec<u8>,
}

impl SexForm {
    pub fn from_number(x: &ExactNumber) -> Result<SexForm, NumberError> {
        if !x.has_finite_expansion() {
            return Err(NumberError::NotFiniteExpansion(x.to_fraction_string()));
        }
        let sixty = BigInt::from(60);
        let magnitude = x.0.abs();
        let mut int_part = magnitude.to_integer();
        let mut rest = magnitude.fract();

        let mut integer = Vec::new();
        while !int_part.is_zero() {
            let (q, r) = int_part.div_rem(&sixty);
            integer.push(r.to_u8().expect("digit below 60"));
            int_part = q;
        }
        if integer.is_empty() {
            integer.push(0);
        }
        integer.reverse();

        // Terminates because the denominator divides a power of 60.
        let mut fraction = Vec::new();
        while !rest.is_zero() {
            rest *= BigRational::from_integer(sixty.clone());
            let digit = rest.to_integer();
            fraction.push(digit.to_u8().expect("digit below 60"));
            rest = rest.fract();
        }

        Ok(SexForm {
            negative: x.is_negative(),
            integer,
            fraction,
        })
    }

    pub fn to_number(&self) -> ExactNumber {
        let sixty = BigInt::from(60);
        let mut numer = BigInt::zero();
        for &d in self.integer.iter().chain(self.fraction.iter()) {
            numer = numer * &sixty + BigInt::from(d);
        }
        let denom = num_traits::pow(sixty, self.fraction.len());
        let value = BigRational::new(numer, denom);
        ExactNumber(if self.negative { -value } else { value })
    }
}

impl fmt::Display for SexForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            f.write_str("-")?;
        }
        f.write_str(&join_digits(&self.integer))?;
        if !self.fraction.is_empty() {
            write!(f, ";{}", join_digits(&self.fraction))?;
        }
        Ok(())
    }
}

fn join_digits(digits: &[u8]) -> String {
    digits
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Renders `x` in canonical sexagesimal notation.
pub fn render_number(x: &ExactNumber) -> Result<String, NumberError> {
    SexForm::from_number(x).map(|form| form.to_string())
}

/// Parses a sexagesimal literal; digits without `;` form an integer.
pub fn parse_number(text: &str) -> Result<ExactNumber, NumberError> {
    parse_number_with(text, Placement::Integer)
}

pub fn parse_number_with(text: &str, placement: Placement) -> Result<ExactNumber, NumberError> {
    let err = |reason: &str| NumberError::Parse {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let trimmed = text.trim();
    let (negative, body) = match trimmed.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, trimmed),
    };
    if body.is_empty() {
        return Err(err("empty literal"));
    }

    let mut halves = body.splitn(2, ';');
    let int_text = halves.next().unwrap_or_default();
    let frac_text = halves.next();
    if frac_text.is_some_and(|f| f.contains(';')) {
        return Err(err("more than one ';'"));
    }

    let int_digits = parse_digits(int_text).map_err(|reason| err(&reason))?;
    let form = match frac_text {
        Some(frac) => SexForm {
            negative,
            integer: int_digits,
            fraction: parse_digits(frac).map_err(|reason| err(&reason))?,
        },
        None => match placement {
            Placement::Integer => SexForm {
                negative,
                integer: int_digits,
                fraction: Vec::new(),
            },
            Placement::Fraction => SexForm {
                negative,
                integer: vec![0],
                fraction: int_digits,
            },
        },
    };
    Ok(form.to_number())
}

fn parse_digits(group: &str) -> Result<Vec<u8>, String> {
    group
        .split(',')
        .map(|digit| {
            if digit.is_empty() {
                return Err("empty digit group".to_string());
            }
            if !digit.bytes().all(|b| b.is_ascii_digit()) {
                return Err(format!("malformed digit {digit:?}"));
            }
            match digit.parse::<u32>() {
                Ok(d) if d < 60 => Ok(d as u8),
                _ => Err(format!("digit {digit} is not below 60")),
            }
        })
        .collect()
}

/// Sexagesimal literal or a decimal fraction `p/q`.
pub fn parse_literal(text: &str) -> Result<ExactNumber, NumberError> {
    let trimmed = text.trim();
    let Some((numer, denom)) = trimmed.split_once('/') else {
        return parse_number(trimmed);
    };
    let err = |reason: &str| NumberError::Parse {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let numer: BigInt = numer
        .trim()
        .parse()
        .map_err(|_| err("malformed fraction numerator"))?;
    let denom_text = denom.trim();
    if denom_text.starts_with(['-', '+']) {
        return Err(err("fraction denominator must be unsigned"));
    }
    let denom: BigInt = denom_text
        .parse()
        .map_err(|_| err("malformed fraction denominator"))?;
    if denom.sign() == Sign::NoSign {
        return Err(err("zero denominator"));
    }
    ExactNumber::new(numer, denom)
}

impl ExactNumber {
    /// Three-way comparison against an integer.
    pub fn cmp_int(&self, n: i64) -> Ordering {
        self.0.cmp(&BigRational::from_integer(BigInt::from(n)))
    }
}
