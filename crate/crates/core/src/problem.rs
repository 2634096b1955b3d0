//! Problem files, dispatch to the solvers, and oracle cross-checks.
//!
//! A problem file is line-oriented `key = value`, with `#` comments:
//!
//! ```text
//! type = well_sum
//! volume = 1
//! area_plus_volume = 1;10
//! length_plus_width = 0;50
//! ```
//!
//! Values are sexagesimal (`1;10`) or fraction (`35301/50`) literals.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::oracle::{self, CubicCoefficients, QuadraticOutcome};
use crate::sexagesimal::{parse_literal, ExactNumber};
use crate::solvers::{
    self, Metrology, SideConstraint, Solution, SolveError, WangProblem, WellProblem, DEFAULT_Q_MAX,
};
use crate::tables::SearchBounds;

const KNOWN_KEYS: [&str; 10] = [
    "type",
    "volume",
    "area_plus_volume",
    "length_diff_width",
    "length_plus_width",
    "c",
    "rhs",
    "P",
    "S",
    "conversion",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ProblemError {
    /// 1-based; 0 when the error concerns the file as a whole.
    pub line: usize,
    pub message: String,
}

fn file_error(message: impl Into<String>) -> ProblemError {
    ProblemError {
        line: 0,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Problem {
    /// `vertical · x³ = volume`
    PureCubic {
        volume: ExactNumber,
        metrology: Metrology,
    },
    /// `c·x³ + x = rhs`
    Depressed {
        c: ExactNumber,
        rhs: ExactNumber,
        bounds: SearchBounds,
    },
    /// `xy + xyz = rhs` with `y = c·x`, `z = vertical·x`, i.e.
    /// `(c·vertical)x³ + c·x² = rhs`.
    No5 {
        c: ExactNumber,
        rhs: ExactNumber,
        metrology: Metrology,
    },
    Well(WellProblem),
    Wang(WangProblem),
}

impl Problem {
    pub fn type_name(&self) -> &'static str {
        match self {
            Problem::PureCubic { .. } => "pure_cubic",
            Problem::Depressed { .. } => "depressed",
            Problem::No5 { .. } => "no5",
            Problem::Well(WellProblem {
                constraint: SideConstraint::Difference(_),
                ..
            }) => "well_diff",
            Problem::Well(_) => "well_sum",
            Problem::Wang(_) => "wang",
        }
    }

    /// Replaces the vertical conversion constant where the problem has one.
    pub fn with_conversion(mut self, vertical: ExactNumber) -> Result<Self, SolveError> {
        let replacement = Metrology::with_vertical(vertical)?;
        match &mut self {
            Problem::PureCubic { metrology, .. } | Problem::No5 { metrology, .. } => {
                *metrology = replacement
            }
            Problem::Well(w) => w.metrology = replacement,
            Problem::Depressed { .. } | Problem::Wang(_) => {
                return Err(SolveError::InvalidInput(format!(
                    "{} problems have no conversion constant",
                    self.type_name()
                )))
            }
        }
        Ok(self)
    }

    pub fn with_bounds(mut self, new_bounds: SearchBounds) -> Self {
        if let Problem::Depressed { bounds, .. } = &mut self {
            *bounds = new_bounds;
        }
        self
    }

    /// Unit of a named answer, if it has one.
    pub fn unit_of(&self, name: &str) -> Option<&'static str> {
        match (self, name) {
            (Problem::Wang(_), _) => None,
            (Problem::Depressed { .. }, "x") => Some(solvers::LENGTH_UNIT),
            (Problem::Depressed { .. }, "volume") => Some(solvers::VOLUME_UNIT),
            (Problem::Depressed { .. }, _) => None,
            (_, "x" | "y") => Some(solvers::LENGTH_UNIT),
            (_, "z") => Some(solvers::DEPTH_UNIT),
            _ => None,
        }
    }

    /// The single-variable cubic in `x` left after eliminating `y` and `z`.
    pub fn eliminated_cubic(&self) -> CubicCoefficients {
        let zero = ExactNumber::zero;
        match self {
            Problem::PureCubic { volume, metrology } => {
                CubicCoefficients::new(metrology.vertical.clone(), zero(), zero(), -volume)
            }
            Problem::Depressed { c, rhs, .. } => {
                CubicCoefficients::new(c.clone(), zero(), ExactNumber::one(), -rhs)
            }
            Problem::No5 { c, rhs, metrology } => {
                CubicCoefficients::new(c * &metrology.vertical, c.clone(), zero(), -rhs)
            }
            // vertical·x²·y = V with y = x ∓ side·horizontal
            Problem::Well(w) => {
                let v = &w.metrology.vertical;
                match &w.constraint {
                    SideConstraint::Difference(d) => {
                        let a = d * &w.metrology.horizontal;
                        CubicCoefficients::new(v.clone(), -(v * &a), zero(), -&w.volume)
                    }
                    SideConstraint::Sum(s) => {
                        let a = s * &w.metrology.horizontal;
                        CubicCoefficients::new(v.clone(), -(v * &a), zero(), w.volume.clone())
                    }
                }
            }
            Problem::Wang(p) => {
                let two = ExactNumber::integer(2);
                let a = p.difference.checked_div(&two).expect("nonzero");
                let b = (&p.product * &p.product)
                    .checked_div(&(&two * &p.difference))
                    .unwrap_or_else(|_| ExactNumber::zero());
                CubicCoefficients::new(ExactNumber::one(), a, zero(), -b)
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Problem::PureCubic { volume, metrology } => {
                format!("{}x³ = {volume}", metrology.vertical)
            }
            Problem::Depressed { c, rhs, .. } => format!("{c}x³ + x = {rhs}"),
            Problem::No5 { c, rhs, metrology } => {
                format!("xy + xyz = {rhs}, y = {c}x, z = {}x", metrology.vertical)
            }
            Problem::Well(w) => {
                let side = match &w.constraint {
                    SideConstraint::Difference(d) => format!("x - y = {d}"),
                    SideConstraint::Sum(s) => format!("x + y = {s}"),
                };
                format!(
                    "z = {}x, xyz = {}, xy + xyz = {}, {side}",
                    w.metrology.vertical, w.volume, w.area_plus_volume
                )
            }
            Problem::Wang(p) => format!(
                "x² + y² = z², xy = {}, z - x = {}",
                p.product.to_fraction_string(),
                p.difference.to_fraction_string()
            ),
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

pub fn parse_problem(text: &str) -> Result<Problem, ProblemError> {
    let mut entries = Entries::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or_default().trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ProblemError {
                line,
                message: format!("expected `key = value`, found {content:?}"),
            });
        };
        let key = key.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(ProblemError {
                line,
                message: format!("unknown key {key:?}"),
            });
        }
        if entries.contains_key(key) {
            return Err(ProblemError {
                line,
                message: format!("duplicate key {key:?}"),
            });
        }
        entries.insert(key.to_string(), (line, value.trim().to_string()));
    }

    let (_, kind) = entries
        .remove("type")
        .ok_or_else(|| file_error("missing key \"type\""))?;
    let (required, optional): (&[&str], &[&str]) = match kind.as_str() {
        "pure_cubic" => (&["volume"], &["conversion"]),
        "depressed" => (&["c", "rhs"], &[]),
        "no5" => (&["c", "rhs"], &["conversion"]),
        "well_diff" => (
            &["volume", "area_plus_volume", "length_diff_width"],
            &["conversion"],
        ),
        "well_sum" => (
            &["volume", "area_plus_volume", "length_plus_width"],
            &["conversion"],
        ),
        "wang" => (&["P", "S"], &[]),
        other => return Err(file_error(format!("unknown problem type {other:?}"))),
    };
    for (key, (line, _)) in &entries {
        if !required.contains(&key.as_str()) && !optional.contains(&key.as_str()) {
            return Err(ProblemError {
                line: *line,
                message: format!("key {key:?} does not apply to {kind} problems"),
            });
        }
    }

    let e = &mut entries;
    let metrology = |conversion: Option<ExactNumber>| -> Result<Metrology, ProblemError> {
        match conversion {
            None => Ok(Metrology::default()),
            Some(v) => Metrology::with_vertical(v).map_err(|err| file_error(err.to_string())),
        }
    };
    let problem = match kind.as_str() {
        "pure_cubic" => Problem::PureCubic {
            volume: require(e, "volume")?,
            metrology: metrology(take(e, "conversion")?)?,
        },
        "depressed" => Problem::Depressed {
            c: require(e, "c")?,
            rhs: require(e, "rhs")?,
            bounds: SearchBounds::default(),
        },
        "no5" => Problem::No5 {
            c: require(e, "c")?,
            rhs: require(e, "rhs")?,
            metrology: metrology(take(e, "conversion")?)?,
        },
        "well_diff" | "well_sum" => {
            let volume = require(e, "volume")?;
            let area_plus_volume = require(e, "area_plus_volume")?;
            let constraint = if kind == "well_diff" {
                SideConstraint::Difference(require(e, "length_diff_width")?)
            } else {
                SideConstraint::Sum(require(e, "length_plus_width")?)
            };
            Problem::Well(WellProblem {
                volume,
                area_plus_volume,
                constraint,
                metrology: metrology(take(e, "conversion")?)?,
            })
        }
        "wang" => Problem::Wang(WangProblem {
            product: require(e, "P")?,
            difference: require(e, "S")?,
        }),
        _ => unreachable!("type checked above"),
    };
    Ok(problem)
}

type Entries = BTreeMap<String, (usize, String)>;

fn take(entries: &mut Entries, key: &str) -> Result<Option<ExactNumber>, ProblemError> {
    match entries.remove(key) {
        None => Ok(None),
        Some((line, value)) => parse_literal(&value).map(Some).map_err(|e| ProblemError {
            line,
            message: e.to_string(),
        }),
    }
}

fn require(entries: &mut Entries, key: &str) -> Result<ExactNumber, ProblemError> {
    take(entries, key)?.ok_or_else(|| file_error(format!("missing key {key:?}")))
}

pub fn solve(problem: &Problem) -> Result<Solution, SolveError> {
    match problem {
        Problem::PureCubic { volume, metrology } => solvers::solve_pure_cubic(volume, metrology),
        Problem::Depressed { c, rhs, bounds } => solvers::solve_depressed_cubic(c, rhs, *bounds),
        Problem::No5 { c, rhs, metrology } => {
            solvers::solve_no5_style(&(c * &metrology.vertical), c, rhs, metrology)
        }
        Problem::Well(w) => match w.constraint {
            SideConstraint::Difference(_) => solvers::solve_well_difference(w),
            SideConstraint::Sum(_) => solvers::solve_well_sum(w),
        },
        Problem::Wang(p) => solvers::solve_wang_system_with(p, DEFAULT_Q_MAX),
    }
}

/// Checks every defining equation of `problem` against the solution's
/// values with exact equality.
pub fn substitutes_back(problem: &Problem, solution: &Solution) -> bool {
    let get = |name: &str| solution.value(name).cloned();
    match problem {
        Problem::PureCubic { volume, metrology } => match (get("x"), get("z")) {
            (Some(x), Some(z)) => {
                &metrology.vertical * &x.pow(3) == *volume && z == &metrology.vertical * &x
            }
            _ => false,
        },
        Problem::Depressed { c, rhs, .. } => match get("x") {
            Some(x) => c * &x.pow(3) + x == *rhs,
            None => false,
        },
        Problem::No5 { c, rhs, metrology } => match (get("x"), get("y"), get("z")) {
            (Some(x), Some(y), Some(z)) => {
                y == c * &x && z == &metrology.vertical * &x && &x * &y + &x * &y * &z == *rhs
            }
            _ => false,
        },
        Problem::Well(w) => match (get("x"), get("y"), get("z")) {
            (Some(x), Some(y), Some(z)) => {
                let side_ok = match &w.constraint {
                    SideConstraint::Difference(d) => &x - &y == d * &w.metrology.horizontal,
                    SideConstraint::Sum(s) => &x + &y == s * &w.metrology.horizontal,
                };
                side_ok
                    && z == &w.metrology.vertical * &x
                    && &x * &y * &z == w.volume
                    && &x * &y + &x * &y * &z == w.area_plus_volume
            }
            _ => false,
        },
        Problem::Wang(p) => match (get("x"), get("y"), get("z")) {
            (Some(x), Some(y), Some(z)) => {
                solvers::pythagoras_holds(&x, &y, &z)
                    && &x * &y == p.product
                    && &z - &x == p.difference
            }
            _ => false,
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub solution: Result<Solution, SolveError>,
    pub cubic: CubicCoefficients,
    pub oracle_roots: BTreeSet<ExactNumber>,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn agrees(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn format_set(set: &BTreeSet<ExactNumber>) -> String {
    let items: Vec<String> = set.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

/// Solves `problem`, then checks the answer (or the failure) against the
/// rational-root oracle, substitution, and for wells the quadratic
/// reduction.
pub fn verify(problem: &Problem) -> VerifyReport {
    let solution = solve(problem);
    let cubic = problem.eliminated_cubic();
    let oracle_roots = oracle::rational_roots_cubic(&cubic).unwrap_or_default();
    let positive: BTreeSet<ExactNumber> = oracle_roots
        .iter()
        .filter(|r| r.is_positive())
        .cloned()
        .collect();
    let mut checks = Vec::new();

    match &solution {
        Ok(sol) => {
            let x = sol.value("x").cloned().unwrap_or_else(ExactNumber::zero);
            checks.push(Check {
                name: "oracle",
                passed: oracle_roots.contains(&x),
                detail: format!(
                    "rational roots of {cubic}: {}; solver x = {x}",
                    format_set(&oracle_roots)
                ),
            });
            checks.push(Check {
                name: "substitution",
                passed: substitutes_back(problem, sol),
                detail: "answers satisfy every defining equation exactly".to_string(),
            });
        }
        Err(e) => {
            let passed = e.claims_no_solution() && positive.is_empty();
            checks.push(Check {
                name: "oracle",
                passed,
                detail: format!(
                    "solver: {} ({e}); positive rational roots of {cubic}: {}",
                    e.kind(),
                    format_set(&positive)
                ),
            });
        }
    }

    if let Problem::Well(w) = problem {
        let check = match (oracle::quadratic_reduction(w), &solution) {
            (Ok(outcome), Ok(sol)) => {
                let triple = (sol.value("x"), sol.value("y"), sol.value("z"));
                let passed = outcome
                    .consistent_answer()
                    .is_some_and(|a| triple == (Some(&a.x), Some(&a.y), Some(&a.z)));
                Check {
                    name: "quadratic",
                    passed,
                    detail: describe_outcome(&outcome),
                }
            }
            (Ok(outcome), Err(_)) => Check {
                name: "quadratic",
                passed: outcome.consistent_answer().is_none(),
                detail: describe_outcome(&outcome),
            },
            (Err(e), _) => Check {
                name: "quadratic",
                passed: solution.is_err(),
                detail: e.to_string(),
            },
        };
        checks.push(check);
    }

    VerifyReport {
        solution,
        cubic,
        oracle_roots,
        checks,
    }
}

fn describe_outcome(outcome: &QuadraticOutcome) -> String {
    match outcome {
        QuadraticOutcome::Rational(answers) => {
            let parts: Vec<String> = answers
                .iter()
                .map(|a| {
                    format!(
                        "(x, y, z) = ({}, {}, {}){}",
                        a.x,
                        a.y,
                        a.z,
                        if a.volume_consistent {
                            ""
                        } else {
                            " fails xyz = V"
                        }
                    )
                })
                .collect();
            format!("quadratic reduction: {}", parts.join("; "))
        }
        QuadraticOutcome::Irrational { discriminant } => {
            format!("quadratic reduction: discriminant {discriminant} is not a rational square")
        }
        QuadraticOutcome::NoRealSolution { discriminant } => {
            format!("quadratic reduction: discriminant {discriminant} is negative")
        }
    }
}
