//! Cube and cube-plus-square tables, exact cube roots, and the bounded
//! search for `n³ + k·n`.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::sexagesimal::ExactNumber;

/// Largest `n` any table may be built up to.
pub const TABLE_CAP: u64 = 1_000_000;

/// Range of the tablets' own tables, `n = 1, 2, …, 60`.
pub const TABLET_RANGE: SearchBounds = SearchBounds {
    lower: 1,
    upper: 60,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("invalid range {lower}..{upper}")]
    InvalidRange { lower: u64, upper: u64 },
    #[error("range upper bound {0} exceeds the table cap {TABLE_CAP}")]
    RangeTooLarge(u64),
    #[error("{0} is not the cube of a rational number")]
    NotPerfectCube(String),
    #[error("no n{within} with {what} = {target}")]
    NotFound {
        what: String,
        target: String,
        within: String,
    },
    #[error("{0} must be positive")]
    NonPositive(String),
}

/// Inclusive range of candidate `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    pub lower: u64,
    pub upper: u64,
}

impl SearchBounds {
    pub fn new(lower: u64, upper: u64) -> Result<Self, TableError> {
        if lower == 0 || lower > upper {
            return Err(TableError::InvalidRange { lower, upper });
        }
        Ok(SearchBounds { lower, upper })
    }

    pub fn contains(&self, n: u64) -> bool {
        (self.lower..=self.upper).contains(&n)
    }
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            lower: 1,
            upper: 7200,
        }
    }
}

impl fmt::Display for SearchBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lower, self.upper)
    }
}

impl std::str::FromStr for SearchBounds {
    type Err = TableError;

    /// Parses `LO..HI`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = TableError::InvalidRange { lower: 0, upper: 0 };
        let (lo, hi) = s.split_once("..").ok_or(bad.clone())?;
        let lo = lo.trim().parse().map_err(|_| bad.clone())?;
        let hi = hi.trim().parse().map_err(|_| bad)?;
        SearchBounds::new(lo, hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    /// `n³`
    Cube,
    /// `n³ + n²`
    CubePlusSquare,
}

impl TableKind {
    pub fn eval(self, n: u64) -> BigInt {
        let n = BigInt::from(n);
        let square = &n * &n;
        let cube = &square * &n;
        match self {
            TableKind::Cube => cube,
            TableKind::CubePlusSquare => cube + square,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TableKind::Cube => "cube",
            TableKind::CubePlusSquare => "cube-plus-square",
        }
    }

    fn formula(self) -> &'static str {
        match self {
            TableKind::Cube => "n³",
            TableKind::CubePlusSquare => "n³ + n²",
        }
    }
}

impl std::str::FromStr for TableKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cube" => Ok(TableKind::Cube),
            "cube-plus-square" => Ok(TableKind::CubePlusSquare),
            other => Err(format!("unknown table kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    pub n: u64,
    pub value: BigInt,
}

pub fn build_table(kind: TableKind, range: SearchBounds) -> Result<Vec<TableEntry>, TableError> {
    let range = SearchBounds::new(range.lower, range.upper)?;
    if range.upper > TABLE_CAP {
        return Err(TableError::RangeTooLarge(range.upper));
    }
    Ok((range.lower..=range.upper)
        .map(|n| TableEntry {
            n,
            value: kind.eval(n),
        })
        .collect())
}

fn tablet_table(kind: TableKind) -> &'static [TableEntry] {
    static CUBES: OnceLock<Vec<TableEntry>> = OnceLock::new();
    static CUBES_PLUS_SQUARES: OnceLock<Vec<TableEntry>> = OnceLock::new();
    let cell = match kind {
        TableKind::Cube => &CUBES,
        TableKind::CubePlusSquare => &CUBES_PLUS_SQUARES,
    };
    cell.get_or_init(|| build_table(kind, TABLET_RANGE).expect("static range"))
}

/// Largest `r` with `r³ ≤ n`, by binary search over integers.
pub fn integer_cube_root(n: &BigUint) -> BigUint {
    if n.is_zero() {
        return BigUint::zero();
    }
    let mut lo = BigUint::one();
    // 2^(⌊bits/3⌋+1) cubed exceeds n.
    let mut hi = BigUint::one() << (n.bits() / 3 + 1);
    while &lo + 1u32 < hi {
        let mid = (&lo + &hi) >> 1;
        if &mid * &mid * &mid <= *n {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn exact_integer_cube_root(n: &BigUint) -> Option<BigUint> {
    let r = integer_cube_root(n);
    (&r * &r * &r == *n).then_some(r)
}

/// `x` with `x³ = v`, when numerator and denominator are perfect cubes.
pub fn cube_root_exact(v: &ExactNumber) -> Result<ExactNumber, TableError> {
    if !v.is_positive() {
        return Err(TableError::NonPositive(v.to_string()));
    }
    let not_cube = || TableError::NotPerfectCube(v.to_string());
    let numer = exact_integer_cube_root(v.numer().magnitude()).ok_or_else(not_cube)?;
    let denom = exact_integer_cube_root(v.denom().magnitude()).ok_or_else(not_cube)?;
    Ok(ExactNumber::new(BigInt::from(numer), BigInt::from(denom)).expect("nonzero cube root"))
}

/// The cube root found the tablet way: scale `v` by `60³` until it is an
/// integer (`0;7,30` becomes `7,30,0`), read `n` off the cube table, and
/// shift the result back by the same number of places.
pub fn cube_root_by_table(v: &ExactNumber) -> Result<ExactNumber, TableError> {
    if !v.is_positive() {
        return Err(TableError::NonPositive(v.to_string()));
    }
    if !v.has_finite_expansion() {
        return Err(TableError::NotPerfectCube(v.to_string()));
    }
    let sixty = ExactNumber::integer(60);
    let place = ExactNumber::integer(216_000);
    let mut scaled = v.clone();
    let mut shift = ExactNumber::one();
    while !scaled.is_integer() {
        scaled = &scaled * &place;
        shift = &shift * &sixty;
    }
    let target = scaled.to_integer().expect("integer after scaling");
    let n = inverse_lookup(TableKind::Cube, &target)
        .map_err(|_| TableError::NotPerfectCube(v.to_string()))?;
    Ok(ExactNumber::integer(n)
        .checked_div(&shift)
        .expect("nonzero shift"))
}

/// `n` with `kind(n) = value`. Values past the tablet range are inverted
/// through the integer cube root instead of extending the table.
pub fn inverse_lookup(kind: TableKind, value: &BigInt) -> Result<u64, TableError> {
    let not_found = || TableError::NotFound {
        what: kind.formula().to_string(),
        target: value.to_string(),
        within: String::new(),
    };
    if !value.is_positive() {
        return Err(not_found());
    }
    let table = tablet_table(kind);
    let last = table.last().expect("non-empty table");
    if *value <= last.value {
        return table
            .binary_search_by(|entry| entry.value.cmp(value))
            .map(|i| table[i].n)
            .map_err(|_| not_found());
    }
    // n³ ≤ n³ + n² < (n + 1)³, so the integer cube root is the only candidate.
    let n = integer_cube_root(value.magnitude())
        .to_u64()
        .ok_or_else(not_found)?;
    if n > 0 && kind.eval(n) == *value {
        Ok(n)
    } else {
        Err(not_found())
    }
}

/// The unique `n` in `bounds` with `n³ + k·n = target`.
///
/// `n³ + k·n` is strictly increasing for positive `k`, so a binary search
/// over the bounds settles it.
pub fn search_n3_plus_kn(k: u64, target: &BigInt, bounds: SearchBounds) -> Result<u64, TableError> {
    let bounds = SearchBounds::new(bounds.lower, bounds.upper)?;
    let f = |n: u64| {
        let n = BigInt::from(n);
        &n * &n * &n + BigInt::from(k) * n
    };
    let (mut lo, mut hi) = (bounds.lower, bounds.upper);
    while lo <= hi {
        let mid = lo + (hi - lo) / 2;
        match f(mid).cmp(target) {
            std::cmp::Ordering::Equal => return Ok(mid),
            std::cmp::Ordering::Less => lo = mid + 1,
            std::cmp::Ordering::Greater => {
                if mid == 0 {
                    break;
                }
                hi = mid - 1;
            }
        }
    }
    Err(TableError::NotFound {
        what: format!("n³ + {k}n"),
        target: target.to_string(),
        within: format!(" in {bounds}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexagesimal::parse_number;
    use proptest::prelude::*;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn table_entries() {
        let cubes = build_table(TableKind::Cube, TABLET_RANGE).unwrap();
        assert_eq!(cubes.len(), 60);
        assert_eq!(cubes[0].value, big(1));
        assert_eq!(cubes[29].n, 30);
        assert_eq!(cubes[29].value, big(27000));
        assert_eq!(
            ExactNumber::from(cubes[29].value.clone()).to_string(),
            "7,30,0"
        );

        let cps = build_table(TableKind::CubePlusSquare, SearchBounds::new(6, 6).unwrap()).unwrap();
        assert_eq!(
            cps,
            vec![TableEntry {
                n: 6,
                value: big(252)
            }]
        );
    }

    #[test]
    fn table_range_errors() {
        assert_eq!(
            SearchBounds::new(5, 4),
            Err(TableError::InvalidRange { lower: 5, upper: 4 })
        );
        assert!(SearchBounds::new(0, 4).is_err());
        let too_big = SearchBounds {
            lower: 1,
            upper: TABLE_CAP + 1,
        };
        assert_eq!(
            build_table(TableKind::Cube, too_big),
            Err(TableError::RangeTooLarge(TABLE_CAP + 1))
        );
        let inverted = SearchBounds { lower: 3, upper: 2 };
        assert!(build_table(TableKind::Cube, inverted).is_err());
    }

    #[test]
    fn bounds_parse() {
        assert_eq!("1..60".parse::<SearchBounds>().unwrap(), TABLET_RANGE);
        assert!("60..1".parse::<SearchBounds>().is_err());
        assert!("1-60".parse::<SearchBounds>().is_err());
    }

    #[test]
    fn cube_roots() {
        let root = cube_root_exact(&parse_number("0;7,30").unwrap()).unwrap();
        assert_eq!(root.to_string(), "0;30");
        assert_eq!(
            cube_root_exact(&ExactNumber::integer(27)).unwrap(),
            ExactNumber::integer(3)
        );
        assert!(matches!(
            cube_root_exact(&ExactNumber::integer(2)),
            Err(TableError::NotPerfectCube(_))
        ));
        assert!(matches!(
            cube_root_exact(&ExactNumber::zero()),
            Err(TableError::NonPositive(_))
        ));
    }

    #[test]
    fn table_cube_root_matches_exact_root() {
        let v = parse_number("0;7,30").unwrap();
        assert_eq!(cube_root_by_table(&v).unwrap(), ExactNumber::frac(1, 2));
        assert_eq!(
            cube_root_by_table(&ExactNumber::integer(27000)).unwrap(),
            ExactNumber::integer(30)
        );
        assert!(cube_root_by_table(&ExactNumber::integer(2)).is_err());
        assert!(cube_root_by_table(&ExactNumber::frac(1, 7)).is_err());
    }

    #[test]
    fn lookups() {
        assert_eq!(inverse_lookup(TableKind::CubePlusSquare, &big(252)), Ok(6));
        assert_eq!(inverse_lookup(TableKind::CubePlusSquare, &big(2)), Ok(1));
        assert!(matches!(
            inverse_lookup(TableKind::CubePlusSquare, &big(253)),
            Err(TableError::NotFound { .. })
        ));
        // Past the 1..60 table.
        assert_eq!(
            inverse_lookup(TableKind::Cube, &TableKind::Cube.eval(12345)),
            Ok(12345)
        );
        assert_eq!(
            inverse_lookup(
                TableKind::CubePlusSquare,
                &TableKind::CubePlusSquare.eval(999)
            ),
            Ok(999)
        );
        assert!(inverse_lookup(TableKind::Cube, &(TableKind::Cube.eval(999) + 1)).is_err());
        assert!(inverse_lookup(TableKind::Cube, &big(0)).is_err());
    }

    #[test]
    fn n3_plus_kn_search() {
        let bounds = SearchBounds::default();
        assert_eq!(search_n3_plus_kn(3, &big(36036), bounds), Ok(33));
        assert_eq!(search_n3_plus_kn(3, &big(4), bounds), Ok(1));
        assert!(matches!(
            search_n3_plus_kn(3, &big(5), bounds),
            Err(TableError::NotFound { .. })
        ));
        // 33 lies outside 1..30.
        assert!(search_n3_plus_kn(3, &big(36036), SearchBounds::new(1, 30).unwrap()).is_err());
    }

    #[test]
    fn table_inverse_identity() {
        for kind in [TableKind::Cube, TableKind::CubePlusSquare] {
            for entry in build_table(kind, TABLET_RANGE).unwrap() {
                assert_eq!(inverse_lookup(kind, &entry.value), Ok(entry.n));
            }
        }
    }

    #[test]
    fn cube_root_agrees_with_num_bigint() {
        for n in (0u64..5000).chain([u64::MAX, 1 << 63, 999_999_999_999]) {
            let n = BigUint::from(n);
            assert_eq!(integer_cube_root(&n), n.cbrt(), "cube root of {n}");
        }
    }

    proptest! {
        #[test]
        fn cube_root_of_cube(num in 1i64..100_000, den in 1i64..100_000) {
            let x = ExactNumber::frac(num, den);
            prop_assert_eq!(cube_root_exact(&x.pow(3)).unwrap(), x);
        }

        #[test]
        fn binary_search_agrees_with_scan(k in 1u64..50, target in 1i64..200_000) {
            let bounds = SearchBounds::new(1, 100).unwrap();
            let scan = (1..=100u64).find(|&n| {
                let n = n as i64;
                n * n * n + k as i64 * n == target
            });
            prop_assert_eq!(search_n3_plus_kn(k, &big(target), bounds).ok(), scan);
        }
    }
}
