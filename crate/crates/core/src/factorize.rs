//! Factorization searches: `n²(n + q) = N`, and `X²Y = M` under a fixed
//! sum `X + Y = σ` with `X` and `Y` multiples of `1/g`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Signed;
use thiserror::Error;

use crate::sexagesimal::ExactNumber;
use crate::tables::{SearchBounds, TableError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorError {
    #[error("no n in {bounds} with n²(n {q:+}) = {target}")]
    NotFound {
        target: BigInt,
        q: i64,
        bounds: SearchBounds,
    },
    #[error("no pair X + Y = {sigma} in steps of 1/{g} with X²Y·{g}³ = {target}")]
    PairNotFound {
        target: BigInt,
        g: u64,
        sigma: ExactNumber,
    },
    #[error("several pairs satisfy X ≥ Y: {}", list_pairs(.0))]
    MultipleSolutions(Vec<PairResult>),
    #[error("only solution has X < Y: {0}")]
    ConventionViolation(PairResult),
    #[error("malformed query: {0}")]
    MalformedQuery(String),
    #[error(transparent)]
    Bounds(#[from] TableError),
}

fn list_pairs(pairs: &[PairResult]) -> String {
    pairs
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// A root pair `(X, Y)`; by convention `X ≥ Y > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairResult {
    pub x: ExactNumber,
    pub y: ExactNumber,
}

impl fmt::Display for PairResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(X, Y) = ({}, {})", self.x, self.y)
    }
}

fn n2_times_n_plus_q(n: u64, q: i64) -> BigInt {
    let n = BigInt::from(n);
    &n * &n * (&n + q)
}

/// The unique `n` in `bounds` with `n²(n + q) = target`.
///
/// Only the branch where `n + q > 0` and the map is strictly increasing
/// (`n > -2q/3`) is searched.
pub fn factor_n2_times_n_plus_q(
    target: &BigInt,
    q: i64,
    bounds: SearchBounds,
) -> Result<u64, FactorError> {
    let bounds = SearchBounds::new(bounds.lower, bounds.upper)?;
    let not_found = || FactorError::NotFound {
        target: target.clone(),
        q,
        bounds,
    };
    if !target.is_positive() {
        return Err(not_found());
    }
    // Smallest n with n > -q and n > -2q/3.
    let monotone_from = if q < 0 { (-q + 1) as u64 } else { 1 };
    let (mut lo, mut hi) = (bounds.lower.max(monotone_from), bounds.upper);
    while lo <= hi {
        let mid = lo + (hi - lo) / 2;
        match n2_times_n_plus_q(mid, q).cmp(target) {
            std::cmp::Ordering::Equal => return Ok(mid),
            std::cmp::Ordering::Less => lo = mid + 1,
            std::cmp::Ordering::Greater => hi = mid - 1,
        }
    }
    Err(not_found())
}

/// All `p` in `1..σg` with `p²(σg − p) = target`, as pairs
/// `(X, Y) = (p/g, σ − p/g)`.
pub fn pair_candidates(
    target: &BigInt,
    g: u64,
    sigma: &ExactNumber,
) -> Result<Vec<PairResult>, FactorError> {
    if g == 0 {
        return Err(FactorError::MalformedQuery(
            "granularity must be at least 1".into(),
        ));
    }
    if !sigma.is_positive() {
        return Err(FactorError::MalformedQuery(format!(
            "sum {sigma} must be positive"
        )));
    }
    let total = (sigma * &ExactNumber::from(g))
        .to_u64()
        .ok_or_else(|| FactorError::MalformedQuery(format!("{sigma}·{g} is not an integer")))?;
    let g_num = ExactNumber::from(g);
    Ok((1..total)
        .filter(|&p| {
            let p_big = BigInt::from(p);
            &p_big * &p_big * BigInt::from(total - p) == *target
        })
        .map(|p| {
            let x = ExactNumber::from(p).checked_div(&g_num).expect("g ≥ 1");
            let y = sigma - &x;
            PairResult { x, y }
        })
        .collect())
}

/// Exhaustive scan for `X + Y = σ`, `X²Y·g³ = target`, reporting the
/// solution with `X ≥ Y`.
pub fn factor_pair_sum_constrained(
    target: &BigInt,
    g: u64,
    sigma: &ExactNumber,
) -> Result<PairResult, FactorError> {
    if !target.is_positive() {
        return Err(FactorError::MalformedQuery(format!(
            "target {target} must be positive"
        )));
    }
    let all = pair_candidates(target, g, sigma)?;
    let (mut conforming, violating): (Vec<_>, Vec<_>) = all.into_iter().partition(|p| p.x >= p.y);
    match conforming.len() {
        1 => Ok(conforming.remove(0)),
        0 => match violating.into_iter().next() {
            Some(raw) => Err(FactorError::ConventionViolation(raw)),
            None => Err(FactorError::PairNotFound {
                target: target.clone(),
                g,
                sigma: sigma.clone(),
            }),
        },
        _ => Err(FactorError::MultipleSolutions(conforming)),
    }
}

/// Prime factorization by trial division.
pub fn prime_factorize(n: u64) -> BTreeMap<u64, u32> {
    let mut factors = BTreeMap::new();
    let mut rest = n;
    let mut p = 2u64;
    while p.saturating_mul(p) <= rest {
        while rest.is_multiple_of(p) {
            *factors.entry(p).or_insert(0) += 1;
            rest /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        *factors.entry(rest).or_insert(0) += 1;
    }
    factors
}

/// `2⁷ · 3⁵` style rendering.
pub fn format_factorization(factors: &BTreeMap<u64, u32>) -> String {
    if factors.is_empty() {
        return "1".to_string();
    }
    factors
        .iter()
        .map(|(p, e)| {
            if *e == 1 {
                p.to_string()
            } else {
                format!("{p}^{e}")
            }
        })
        .collect::<Vec<_>>()
        .join(" · ")
}

/// `X²Y` scaled to an integer target at granularity `g`, if it is one.
pub fn scaled_target(m: &ExactNumber, g: u64) -> Option<BigInt> {
    let scale = ExactNumber::from(g).pow(3);
    (m * &scale).to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn n2_times_n_plus_q_cases() {
        let bounds = SearchBounds::default();
        assert_eq!(factor_n2_times_n_plus_q(&big(252), 1, bounds), Ok(6));
        assert_eq!(factor_n2_times_n_plus_q(&big(784), 9, bounds), Ok(7));
        assert_eq!(factor_n2_times_n_plus_q(&big(18), -1, bounds), Ok(3));
        assert_eq!(factor_n2_times_n_plus_q(&big(2), 1, bounds), Ok(1));
        assert!(matches!(
            factor_n2_times_n_plus_q(&big(253), 1, bounds),
            Err(FactorError::NotFound { .. })
        ));
        assert!(factor_n2_times_n_plus_q(&big(0), 1, bounds).is_err());
    }

    #[test]
    fn negative_offset_stays_on_monotone_branch() {
        // n²(n − 5) is zero at n = 5 and negative below, so 36 = 6²·1 is
        // the only admissible reading.
        assert_eq!(
            factor_n2_times_n_plus_q(&big(36), -5, SearchBounds::default()),
            Ok(6)
        );
        assert_eq!(
            factor_n2_times_n_plus_q(&big(4), -1, SearchBounds::default()),
            Ok(2)
        );
    }

    #[test]
    fn no6_pair() {
        let pair = factor_pair_sum_constrained(&big(31104), 60, &ExactNumber::one()).unwrap();
        assert_eq!(pair.x, ExactNumber::frac(3, 5));
        assert_eq!(pair.y, ExactNumber::frac(2, 5));
        assert_eq!(pair.x.to_string(), "0;36");
        assert_eq!(pair.y.to_string(), "0;24");
        assert_eq!(
            pair_candidates(&big(31104), 60, &ExactNumber::one())
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn pair_convention_and_absence() {
        // 1²·59 = 59 gives only X = 0;1 < Y = 0;59.
        assert_eq!(
            factor_pair_sum_constrained(&big(59), 60, &ExactNumber::one()),
            Err(FactorError::ConventionViolation(PairResult {
                x: ExactNumber::frac(1, 60),
                y: ExactNumber::frac(59, 60),
            }))
        );
        // p²(60 − p) peaks at p = 40 with 32000.
        assert!(matches!(
            factor_pair_sum_constrained(&big(216000), 60, &ExactNumber::one()),
            Err(FactorError::PairNotFound { .. })
        ));
        assert!(matches!(
            factor_pair_sum_constrained(&big(10), 60, &ExactNumber::frac(1, 7)),
            Err(FactorError::MalformedQuery(_))
        ));
    }

    #[test]
    fn pair_multiple_solutions() {
        // 10²·9 = 15²·4 = 900 with both p above 19/2.
        let result = factor_pair_sum_constrained(&big(900), 19, &ExactNumber::one());
        let expected = vec![
            PairResult {
                x: ExactNumber::frac(10, 19),
                y: ExactNumber::frac(9, 19),
            },
            PairResult {
                x: ExactNumber::frac(15, 19),
                y: ExactNumber::frac(4, 19),
            },
        ];
        assert_eq!(result, Err(FactorError::MultipleSolutions(expected)));
        // p²(3 − p) takes 4 at p = 2 and nowhere else.
        let single = factor_pair_sum_constrained(&big(4), 3, &ExactNumber::one()).unwrap();
        assert_eq!(single.x, ExactNumber::frac(2, 3));
    }

    #[test]
    fn factorizations() {
        assert_eq!(prime_factorize(31104), BTreeMap::from([(2, 7), (3, 5)]));
        assert_eq!(
            prime_factorize(36288),
            BTreeMap::from([(2, 6), (3, 4), (7, 1)])
        );
        assert!(prime_factorize(1).is_empty());
        assert_eq!(format_factorization(&prime_factorize(31104)), "2^7 · 3^5");
        assert_eq!(format_factorization(&prime_factorize(1)), "1");
    }

    proptest! {
        #[test]
        fn factor_result_satisfies_equation(n in 1u64..500, q in -20i64..40) {
            prop_assume!(n as i64 + q > 0 && 3 * n as i64 > -2 * q);
            let target = n2_times_n_plus_q(n, q);
            prop_assert_eq!(factor_n2_times_n_plus_q(&target, q, SearchBounds::default()), Ok(n));
        }

        #[test]
        fn not_found_means_no_solution(target in 1i64..20_000, q in 0i64..10) {
            let bounds = SearchBounds::new(1, 40).unwrap();
            let scan = (1..=40u64).find(|&n| n2_times_n_plus_q(n, q) == big(target));
            prop_assert_eq!(factor_n2_times_n_plus_q(&big(target), q, bounds).ok(), scan);
        }

        #[test]
        fn factorization_reconstructs(n in 1u64..10_000_000) {
            let factors = prime_factorize(n);
            let product: u64 = factors.iter().map(|(p, e)| p.pow(*e)).product();
            prop_assert_eq!(product, n);
            for p in factors.keys() {
                prop_assert!((2..*p).take_while(|d| d * d <= *p).all(|d| p % d != 0));
            }
        }

        #[test]
        fn pair_results_satisfy_constraints(p in 1u64..60) {
            let target = big((p * p * (60 - p)) as i64);
            for pair in pair_candidates(&target, 60, &ExactNumber::one()).unwrap() {
                prop_assert_eq!(&pair.x + &pair.y, ExactNumber::one());
                let scaled = &pair.x * &pair.x * &pair.y * ExactNumber::integer(216_000);
                prop_assert_eq!(scaled, ExactNumber::from(target.clone()));
            }
        }
    }
}
