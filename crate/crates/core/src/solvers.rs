//! Tablet-level solvers.
//!
//! Each solver follows the order of operations of its tablet and records
//! every intermediate number as a [`TraceStep`], so a
//! run on the tablet's own data can be compared digit for digit with the
//! text. Step labels are the tablet line numbers the values appear on.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::factorize::{
    factor_n2_times_n_plus_q, factor_pair_sum_constrained, format_factorization, prime_factorize,
    scaled_target, FactorError,
};
use crate::sexagesimal::{reciprocal, ExactNumber, NumberError};
use crate::tables::{
    cube_root_by_table, cube_root_exact, inverse_lookup, search_n3_plus_kn, SearchBounds,
    TableError, TableKind,
};

pub const LENGTH_UNIT: &str = "nindan";
pub const DEPTH_UNIT: &str = "kùš";
pub const VOLUME_UNIT: &str = "sar";

/// Granularity of the pair search for sum-constrained wells: sixtieths.
pub const SUM_GRANULARITY: u64 = 60;

/// Default cap on the Wang scaling search.
pub const DEFAULT_Q_MAX: u64 = 1000;

/// Largest `|Δ|` tried when diagnosing an unsolvable right-hand side.
pub const REPAIR_RADIUS: i64 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error(transparent)]
    Number(#[from] NumberError),
    #[error("no integer m ≤ {cap} makes m²/{c} and m³/{c} integers")]
    NoScaling { c: ExactNumber, cap: u64 },
    #[error("scaled right-hand side {0} is not a positive integer")]
    NonIntegerTarget(String),
    #[error("{equation} has no rational solution{}", format_repairs(.repairs))]
    NoRationalSolution {
        equation: String,
        repairs: Vec<Repair>,
    },
    #[error("x³ coefficient {c3} is not {c2} times the conversion {conversion}")]
    StructureMismatch {
        c3: ExactNumber,
        c2: ExactNumber,
        conversion: ExactNumber,
    },
    #[error("{0}")]
    NotFound(String),
    #[error("no q ≤ {q_max} makes b/c³ an integer for c = {a}/q")]
    NoScaleFound { a: ExactNumber, q_max: u64 },
    #[error("inconsistent data: {0}")]
    InconsistentData(String),
    #[error("x² + y² ≠ z² for x = {x}, y = {y}, z = {z}")]
    PythagorasCheckFailed {
        x: ExactNumber,
        y: ExactNumber,
        z: ExactNumber,
    },
}

impl SolveError {
    /// Short category name used in command-line diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            SolveError::InvalidInput(_) => "InvalidInput",
            SolveError::Table(TableError::NotPerfectCube(_)) => "NotPerfectCube",
            SolveError::Table(TableError::NotFound { .. }) => "NotFound",
            SolveError::Table(_) => "InvalidBounds",
            SolveError::Factor(FactorError::MultipleSolutions(_)) => "MultipleSolutions",
            SolveError::Factor(FactorError::ConventionViolation(_)) => "ConventionViolation",
            SolveError::Factor(FactorError::MalformedQuery(_)) => "MalformedQuery",
            SolveError::Factor(_) => "NotFound",
            SolveError::Number(_) => "NumberError",
            SolveError::NoScaling { .. } => "NoScaling",
            SolveError::NonIntegerTarget(_) => "NonIntegerTarget",
            SolveError::NoRationalSolution { .. } => "NoRationalSolution",
            SolveError::StructureMismatch { .. } => "StructureMismatch",
            SolveError::NotFound(_) => "NotFound",
            SolveError::NoScaleFound { .. } => "NoScaleFound",
            SolveError::InconsistentData(_) => "InconsistentData",
            SolveError::PythagorasCheckFailed { .. } => "PythagorasCheckFailed",
        }
    }

    /// Whether the failure is a claim that no rational answer exists.
    pub fn claims_no_solution(&self) -> bool {
        matches!(
            self.kind(),
            "NotFound" | "NoRationalSolution" | "NotPerfectCube" | "NoScaleFound"
        )
    }
}

fn format_repairs(repairs: &[Repair]) -> String {
    repairs.iter().map(|r| format!("; repair: {r}")).collect()
}

/// A nearby right-hand side that would have been solvable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Repair {
    pub delta: i64,
    pub rhs: ExactNumber,
    pub x: ExactNumber,
}

impl fmt::Display for Repair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:+} → {} solves with x = {}",
            self.delta, self.rhs, self.x
        )
    }
}

/// Conversion constants: horizontal lengths stay in nindan (1), depths are
/// counted in kùš (12 per nindan).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metrology {
    pub horizontal: ExactNumber,
    pub vertical: ExactNumber,
}

impl Default for Metrology {
    fn default() -> Self {
        Metrology {
            horizontal: ExactNumber::one(),
            vertical: ExactNumber::integer(12),
        }
    }
}

impl Metrology {
    pub fn with_vertical(vertical: ExactNumber) -> Result<Self, SolveError> {
        if !vertical.is_positive() {
            return Err(SolveError::InvalidInput(format!(
                "conversion {vertical} must be positive"
            )));
        }
        Ok(Metrology {
            vertical,
            ..Metrology::default()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SideConstraint {
    /// `x − y = d`
    Difference(ExactNumber),
    /// `x + y = s`
    Sum(ExactNumber),
}

/// A well (`túl-sag`) with depth tied to the length: `z = 12x`, `xyz = V`,
/// `xy + xyz = W`, plus one side constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WellProblem {
    pub volume: ExactNumber,
    pub area_plus_volume: ExactNumber,
    pub constraint: SideConstraint,
    pub metrology: Metrology,
}

impl WellProblem {
    fn validate(&self) -> Result<(), SolveError> {
        let side = match &self.constraint {
            SideConstraint::Difference(d) | SideConstraint::Sum(d) => d,
        };
        for (name, v) in [
            ("volume", &self.volume),
            ("area plus volume", &self.area_plus_volume),
            ("side constraint", side),
            ("conversion", &self.metrology.vertical),
            ("horizontal conversion", &self.metrology.horizontal),
        ] {
            if !v.is_positive() {
                return Err(SolveError::InvalidInput(format!(
                    "{name} {v} must be positive"
                )));
            }
        }
        Ok(())
    }
}

/// `x² + y² = z²`, `xy = P`, `z − x = S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WangProblem {
    pub product: ExactNumber,
    pub difference: ExactNumber,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// An intermediate product, reciprocal or scaling.
    Step,
    /// A root read off a table, a search, or a factorization.
    Root,
    /// A final answer.
    Answer,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub label: String,
    pub kind: StepKind,
    pub value: ExactNumber,
    /// The step in the tablet's own phrasing.
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    /// Named results in a fixed order.
    pub values: Vec<(String, ExactNumber)>,
    pub trace: Vec<TraceStep>,
    /// Closing sentence in the tablet's manner.
    pub conclusion: String,
}

impl Solution {
    pub fn value(&self, name: &str) -> Option<&ExactNumber> {
        self.values.iter().find(|(k, _)| k == name).map(|(_, v)| v)
    }

    pub fn step(&self, label: &str) -> Option<&TraceStep> {
        self.trace.iter().find(|s| s.label == label)
    }

    pub fn values_of(&self, kind: StepKind) -> Vec<ExactNumber> {
        self.trace
            .iter()
            .filter(|s| s.kind == kind)
            .map(|s| s.value.clone())
            .collect()
    }
}

#[derive(Default)]
struct TraceBuilder {
    steps: Vec<TraceStep>,
}

impl TraceBuilder {
    fn push(&mut self, label: &str, kind: StepKind, value: &ExactNumber, description: String) {
        debug_assert!(
            self.steps.iter().all(|s| s.label != label),
            "duplicate label {label}"
        );
        self.steps.push(TraceStep {
            label: label.to_string(),
            kind,
            value: value.clone(),
            description,
        });
    }
}

fn require_positive(name: &str, v: &ExactNumber) -> Result<(), SolveError> {
    if v.is_positive() {
        Ok(())
    } else {
        Err(SolveError::InvalidInput(format!(
            "{name} {v} must be positive"
        )))
    }
}

/// `vertical · x³ = V`, solved through the reciprocal of the conversion
/// constant and a cube root.
pub fn solve_pure_cubic(volume: &ExactNumber, m: &Metrology) -> Result<Solution, SolveError> {
    require_positive("volume", volume)?;
    require_positive("conversion", &m.vertical)?;
    let mut t = TraceBuilder::default();

    let igi = reciprocal(&m.vertical)?;
    t.push(
        "obv7",
        StepKind::Step,
        &igi,
        format!("make the reciprocal of {}, and you see {igi}", m.vertical),
    );
    let cube = &igi * volume;
    t.push(
        "rev1",
        StepKind::Step,
        &cube,
        format!("multiply {igi} by {volume}, and you see {cube}"),
    );

    let x = cube_root_exact(&cube)?;
    // The table route only applies to numbers with a finite expansion.
    if cube.has_finite_expansion() {
        let by_table = cube_root_by_table(&cube)?;
        if by_table != x {
            return Err(SolveError::InconsistentData(format!(
                "cube table gives {by_table}, exact cube root gives {x}"
            )));
        }
    }
    t.push(
        "rev2",
        StepKind::Root,
        &x,
        format!("what is the cube root of {cube}? {x} is the cube root"),
    );
    let length = &x * &m.horizontal;
    let depth = &x * &m.vertical;
    t.push(
        "rev4",
        StepKind::Answer,
        &depth,
        format!("multiply {x} by {}, and you see {depth}", m.vertical),
    );

    Ok(Solution {
        values: vec![("x".into(), length.clone()), ("z".into(), depth.clone())],
        trace: t.steps,
        conclusion: format!("{length} is the side of your square. {depth} is your depth."),
    })
}

/// Smallest `m` with `m²/c` and `m³/c` both integers, scanning up to
/// `max(1, ⌊60c⌋)`.
pub fn depressed_scaling(c: &ExactNumber) -> Result<u64, SolveError> {
    let cap = (c * &ExactNumber::integer(60))
        .as_rational()
        .floor()
        .to_integer()
        .to_u64()
        .unwrap_or(0)
        .max(1);
    (1..=cap)
        .find(|&m| {
            let m = ExactNumber::from(m);
            let square = (&m * &m).checked_div(c);
            let cube = (&m * &m * &m).checked_div(c);
            matches!((square, cube), (Ok(s), Ok(k)) if s.is_integer() && k.is_integer())
        })
        .ok_or(SolveError::NoScaling { c: c.clone(), cap })
}

fn depressed_equation(c: &ExactNumber, b: &ExactNumber) -> String {
    let lead = if *c == ExactNumber::one() {
        String::new()
    } else {
        c.to_string()
    };
    format!("{lead}x³ + x = {b}")
}

/// Core of the depressed-cubic solve without the repair diagnostic.
fn solve_depressed_core(
    c: &ExactNumber,
    b: &ExactNumber,
    bounds: SearchBounds,
) -> Result<Solution, SolveError> {
    require_positive("c", c)?;
    require_positive("right-hand side", b)?;
    let m = depressed_scaling(c)?;
    let m_num = ExactNumber::from(m);
    let multiplier = (&m_num * &m_num * &m_num).checked_div(c)?;
    let k = (&m_num * &m_num).checked_div(c)?;
    let k_int = k.to_u64().expect("k checked integral");

    let mut t = TraceBuilder::default();
    t.push(
        "scale",
        StepKind::Step,
        &multiplier,
        format!("multiply both sides by {multiplier}, so that ({m}x)³ + {k}·({m}x) remains"),
    );
    let target = b * &multiplier;
    t.push(
        "target",
        StepKind::Step,
        &target,
        format!("{b} times {multiplier} is {target}"),
    );
    let target_int = match target.to_integer() {
        Some(n) if n > BigInt::zero() => n,
        _ => return Err(SolveError::NonIntegerTarget(target.to_string())),
    };
    let u = match search_n3_plus_kn(k_int, &target_int, bounds) {
        Ok(u) => ExactNumber::from(u),
        Err(TableError::NotFound { .. }) => {
            return Err(SolveError::NoRationalSolution {
                equation: depressed_equation(c, b),
                repairs: Vec::new(),
            })
        }
        Err(e) => return Err(e.into()),
    };
    t.push(
        "search",
        StepKind::Root,
        &u,
        format!("computing n³ + {k}n for n = 1, 2, 3, …, {u} gives {target}"),
    );
    let x = u.checked_div(&m_num)?;
    t.push(
        "answer",
        StepKind::Answer,
        &x,
        format!("{m}x = {u}, so x = {x}"),
    );
    let volume = c * &x.pow(3);
    Ok(Solution {
        values: vec![
            ("x".into(), x.clone()),
            ("volume".into(), volume.clone()),
            ("m".into(), m_num),
            ("multiplier".into(), multiplier),
            ("target".into(), target),
            ("u".into(), u),
        ],
        trace: t.steps,
        conclusion: format!("{x} is the length. {volume} is the volume."),
    })
}

/// Nearby right-hand sides `b + Δ`, `0 < |Δ| ≤ REPAIR_RADIUS`, that are
/// solvable, smallest `|Δ|` first and `+Δ` before `−Δ`.
pub fn depressed_repairs(c: &ExactNumber, b: &ExactNumber, bounds: SearchBounds) -> Vec<Repair> {
    (1..=REPAIR_RADIUS)
        .flat_map(|d| [d, -d])
        .filter_map(|delta| {
            let rhs = b + &ExactNumber::integer(delta);
            if !rhs.is_positive() {
                return None;
            }
            let sol = solve_depressed_core(c, &rhs, bounds).ok()?;
            Some(Repair {
                delta,
                x: sol.value("x").expect("x present").clone(),
                rhs,
            })
        })
        .collect()
}

/// `c·x³ + x = b`: scale by `m³/c` to `u³ + k·u = (m³/c)·b` with `u = m·x`
/// and search `u` successively.
pub fn solve_depressed_cubic(
    c: &ExactNumber,
    b: &ExactNumber,
    bounds: SearchBounds,
) -> Result<Solution, SolveError> {
    match solve_depressed_core(c, b, bounds) {
        Err(SolveError::NoRationalSolution { equation, .. }) => {
            Err(SolveError::NoRationalSolution {
                equation,
                repairs: depressed_repairs(c, b, bounds),
            })
        }
        other => other,
    }
}

/// `c3·x³ + c2·x² = rhs` with `c3 = c2 · vertical`. Scaling by
/// `vertical²/c2` gives `z³ + z² = target` in `z = vertical · x`, which is
/// solved as `z²(z + 1) = target`.
///
/// With `y = c2·x` and `z = vertical·x` this is `xy + xyz = rhs`.
pub fn solve_no5_style(
    c3: &ExactNumber,
    c2: &ExactNumber,
    rhs: &ExactNumber,
    m: &Metrology,
) -> Result<Solution, SolveError> {
    require_positive("c2", c2)?;
    require_positive("right-hand side", rhs)?;
    if *c3 != c2 * &m.vertical {
        return Err(SolveError::StructureMismatch {
            c3: c3.clone(),
            c2: c2.clone(),
            conversion: m.vertical.clone(),
        });
    }
    let mut t = TraceBuilder::default();
    let multiplier = (&m.vertical * &m.vertical).checked_div(c2)?;
    t.push(
        "multiplier",
        StepKind::Step,
        &multiplier,
        format!("multiply both sides by {}²/{c2} = {multiplier}", m.vertical),
    );
    let target = rhs * &multiplier;
    t.push(
        "target",
        StepKind::Step,
        &target,
        format!("{rhs} times {multiplier} is {target}, so z³ + z² = {target}"),
    );
    let target_int = match target.to_integer() {
        Some(n) if n > BigInt::zero() => n,
        _ => return Err(SolveError::NonIntegerTarget(target.to_string())),
    };
    let z = factor_n2_times_n_plus_q(&target_int, 1, SearchBounds::default())?;
    match inverse_lookup(TableKind::CubePlusSquare, &target_int) {
        Ok(n) if n == z => {}
        other => {
            return Err(SolveError::InconsistentData(format!(
                "factorization gives z = {z}, the n³ + n² table gives {other:?}"
            )))
        }
    }
    let z_num = ExactNumber::from(z);
    t.push(
        "factor",
        StepKind::Root,
        &z_num,
        format!("{target} = {z}²·{} = {z}²({z} + 1), so z = {z}", z + 1),
    );
    let x = z_num.checked_div(&m.vertical)?;
    t.push(
        "answer",
        StepKind::Answer,
        &x,
        format!("{z} divided by {} is {x}", m.vertical),
    );
    let y = c2 * &x;
    Ok(Solution {
        values: vec![
            ("x".into(), x.clone()),
            ("y".into(), y.clone()),
            ("z".into(), z_num.clone()),
            ("multiplier".into(), multiplier),
            ("target".into(), target),
        ],
        trace: t.steps,
        conclusion: format!("{x} is the length, {y} the width, {z_num} the depth."),
    })
}

/// Shared front half of the two well procedures: normalize by the side
/// `a`, form `1/(a² · vertical·a)` and the two scaled right-hand sides.
struct WellNormalization {
    side: ExactNumber,
    vertical_side: ExactNumber,
    /// `X²Y`
    cube_target: ExactNumber,
    /// `XY · (z + 1)/(vertical·a)`
    third_target: ExactNumber,
}

fn normalize_well(
    p: &WellProblem,
    side_given: &ExactNumber,
    labels: [&str; 7],
    t: &mut TraceBuilder,
) -> Result<WellNormalization, SolveError> {
    let m = &p.metrology;
    let side = side_given * &m.horizontal;
    t.push(
        labels[0],
        StepKind::Step,
        &side,
        format!(
            "multiply {side_given} by {}, and you see {side}",
            m.horizontal
        ),
    );
    let vertical_side = side_given * &m.vertical;
    t.push(
        labels[1],
        StepKind::Step,
        &vertical_side,
        format!(
            "multiply {side_given} by {}, and you see {vertical_side}",
            m.vertical
        ),
    );
    let square = &side * &side;
    t.push(
        labels[2],
        StepKind::Step,
        &square,
        format!("square {side}, and you see {square}"),
    );
    let scaled = &square * &vertical_side;
    t.push(
        labels[3],
        StepKind::Step,
        &scaled,
        format!("multiply {square} by {vertical_side}, and you see {scaled}"),
    );
    let recip = reciprocal(&scaled)?;
    t.push(
        labels[4],
        StepKind::Step,
        &recip,
        format!("make the reciprocal of {scaled}, and you see {recip}"),
    );
    // The tablets have a volume of 1 and skip this multiplication.
    let cube_target = &recip * &p.volume;
    if p.volume != ExactNumber::one() {
        t.push(
            labels[5],
            StepKind::Step,
            &cube_target,
            format!(
                "multiply {recip} by the volume {}, and you see {cube_target}",
                p.volume
            ),
        );
    }
    let third_target = &recip * &p.area_plus_volume;
    t.push(
        labels[6],
        StepKind::Step,
        &third_target,
        format!(
            "multiply {recip} by {}, and you see {third_target}",
            p.area_plus_volume
        ),
    );
    Ok(WellNormalization {
        side,
        vertical_side,
        cube_target,
        third_target,
    })
}

/// Given normalized roots `X`, `Y`, derives the third root
/// `T = (z + 1)/(vertical·a)` and checks that `z = vertical·a·X` agrees.
fn recover_well(
    n: &WellNormalization,
    big_x: &ExactNumber,
    big_y: &ExactNumber,
    labels: [&str; 6],
    t: &mut TraceBuilder,
) -> Result<Solution, SolveError> {
    let xy = big_x * big_y;
    let third = n.third_target.checked_div(&xy)?;
    t.push(
        labels[0],
        StepKind::Root,
        big_x,
        format!("{big_x} is the first root"),
    );
    t.push(
        labels[1],
        StepKind::Root,
        big_y,
        format!("{big_y} is the second root"),
    );
    t.push(
        labels[2],
        StepKind::Root,
        &third,
        format!("{third} is the third root"),
    );

    let z = &n.vertical_side * big_x;
    let z_from_third = &n.vertical_side * &third - ExactNumber::one();
    if z != z_from_third {
        return Err(SolveError::InconsistentData(format!(
            "depth {z} from z = {}·{big_x} disagrees with {z_from_third} from the third root {third}",
            n.vertical_side
        )));
    }

    let x = big_x * &n.side;
    let y = big_y * &n.side;
    t.push(
        labels[3],
        StepKind::Answer,
        &x,
        format!("multiply {} by {big_x}, and {x} is the length", n.side),
    );
    t.push(
        labels[4],
        StepKind::Answer,
        &y,
        format!("multiply {} by {big_y}, and {y} is the width", n.side),
    );
    t.push(
        labels[5],
        StepKind::Answer,
        &z,
        format!(
            "multiply {big_x} by {}, and {z} is the depth",
            n.vertical_side
        ),
    );
    Ok(Solution {
        values: vec![
            ("x".into(), x.clone()),
            ("y".into(), y.clone()),
            ("z".into(), z.clone()),
            ("X".into(), big_x.clone()),
            ("Y".into(), big_y.clone()),
            ("T".into(), third),
        ],
        trace: std::mem::take(&mut t.steps),
        conclusion: format!("{x} is the length, {y} is the width, {z} is the depth."),
    })
}

/// Well with `x − y = d`: normalize to `X − Y = 1`, `X²Y = N`, and factor
/// `N = X²(X − 1)`.
pub fn solve_well_difference(p: &WellProblem) -> Result<Solution, SolveError> {
    p.validate()?;
    let SideConstraint::Difference(d) = &p.constraint else {
        return Err(SolveError::InvalidInput(
            "expected a length-minus-width constraint".into(),
        ));
    };
    let mut t = TraceBuilder::default();
    let n = normalize_well(
        p,
        d,
        ["16a", "16b", "17a", "17b", "17c", "17d", "18a"],
        &mut t,
    )?;

    let target = match n.cube_target.to_integer() {
        Some(v) if v > BigInt::zero() => v,
        _ => {
            return Err(SolveError::NotFound(format!(
                "X²(X − 1) = {} has no integer solution",
                n.cube_target
            )))
        }
    };
    let big_x = ExactNumber::from(factor_n2_times_n_plus_q(
        &target,
        -1,
        SearchBounds::default(),
    )?);
    let big_y = &big_x - &ExactNumber::one();
    recover_well(
        &n,
        &big_x,
        &big_y,
        ["18b", "18c", "18d", "18e", "19a", "19b"],
        &mut t,
    )
}

/// Well with `x + y = s`: normalize to `X + Y = 1`, `X²Y = M`, and scan the
/// sixtieths for `M·60³ = p²(60 − p)`.
pub fn solve_well_sum(p: &WellProblem) -> Result<Solution, SolveError> {
    p.validate()?;
    let SideConstraint::Sum(s) = &p.constraint else {
        return Err(SolveError::InvalidInput(
            "expected a length-plus-width constraint".into(),
        ));
    };
    let mut t = TraceBuilder::default();
    let n = normalize_well(
        p,
        s,
        ["10a", "10b", "11a", "11b", "11c", "11d", "12a"],
        &mut t,
    )?;

    let Some(target) = scaled_target(&n.cube_target, SUM_GRANULARITY) else {
        return Err(SolveError::NotFound(format!(
            "X²Y = {} is not a whole number of 60⁻³",
            n.cube_target
        )));
    };
    let pair = factor_pair_sum_constrained(&target, SUM_GRANULARITY, &ExactNumber::one())?;
    if let (Some(m), Some(w)) = (
        target.to_u64(),
        scaled_target(&n.third_target, SUM_GRANULARITY).and_then(|v| v.to_u64()),
    ) {
        let last = t.steps.last_mut().expect("normalization steps");
        last.description.push_str(&format!(
            " ({m} = {}; {w} = {})",
            format_factorization(&prime_factorize(m)),
            format_factorization(&prime_factorize(w))
        ));
    }
    recover_well(
        &n,
        &pair.x,
        &pair.y,
        ["12b", "12c", "12d", "13a", "13b", "13c"],
        &mut t,
    )
}

/// Result of the scaling search for `x³ + a·x² = b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicScaling {
    pub q: u64,
    pub scale: ExactNumber,
    /// `b / scale³`
    pub target: BigInt,
    pub n: u64,
    pub x: ExactNumber,
}

/// `x³ + a·x² = b` via `x = c·n` with `c = a/q`, which turns the equation
/// into `n²(n + q) = b/c³`.
///
/// Scales are tried for `q = 1, 2, …, q_max`; the first one whose target is
/// an integer and factors is returned.
pub fn solve_x3_ax2(
    a: &ExactNumber,
    b: &ExactNumber,
    q_max: u64,
) -> Result<CubicScaling, SolveError> {
    require_positive("a", a)?;
    require_positive("b", b)?;
    let mut integral_scale_seen = false;
    for q in 1..=q_max {
        let scale = a.checked_div(&ExactNumber::from(q))?;
        let reduced = b.checked_div(&scale.pow(3))?;
        let Some(target) = reduced.to_integer() else {
            continue;
        };
        integral_scale_seen = true;
        let q_signed = i64::try_from(q).expect("q_max fits i64");
        if let Ok(n) = factor_n2_times_n_plus_q(&target, q_signed, SearchBounds::default()) {
            let x = &scale * &ExactNumber::from(n);
            return Ok(CubicScaling {
                q,
                scale,
                target,
                n,
                x,
            });
        }
    }
    if integral_scale_seen {
        Err(SolveError::NotFound(format!(
            "no scale c = {a}/q, q ≤ {q_max}, turns x³ + {a}x² = {b} into a factorable n²(n + q)"
        )))
    } else {
        Err(SolveError::NoScaleFound {
            a: a.clone(),
            q_max,
        })
    }
}

pub fn pythagoras_holds(x: &ExactNumber, y: &ExactNumber, z: &ExactNumber) -> bool {
    x * x + y * y == z * z
}

/// Eliminates `y` and `z` to `x³ + (S/2)x² = P²/2S`, solves that by
/// scaling, then recovers `y = P/x` and `z = x + S`.
pub fn solve_wang_system(p: &WangProblem) -> Result<Solution, SolveError> {
    solve_wang_system_with(p, DEFAULT_Q_MAX)
}

pub fn solve_wang_system_with(p: &WangProblem, q_max: u64) -> Result<Solution, SolveError> {
    require_positive("P", &p.product)?;
    require_positive("S", &p.difference)?;
    let mut t = TraceBuilder::default();
    let two = ExactNumber::integer(2);
    let a = p.difference.checked_div(&two)?;
    t.push(
        "a",
        StepKind::Step,
        &a,
        format!("S/2 = {}", a.to_fraction_string()),
    );
    let b = (&p.product * &p.product).checked_div(&(&two * &p.difference))?;
    t.push(
        "b",
        StepKind::Step,
        &b,
        format!("P²/2S = {}", b.to_fraction_string()),
    );

    let s = solve_x3_ax2(&a, &b, q_max)?;
    let q = ExactNumber::from(s.q);
    t.push(
        "q",
        StepKind::Step,
        &q,
        format!(
            "x = {}·n turns the equation into n³ + {}n²",
            s.scale.to_fraction_string(),
            s.q
        ),
    );
    t.push(
        "scale",
        StepKind::Step,
        &s.scale,
        format!("c = {}", s.scale.to_fraction_string()),
    );
    let target = ExactNumber::from(s.target.clone());
    t.push(
        "target",
        StepKind::Step,
        &target,
        format!("n²(n + {}) = {}", s.q, s.target),
    );
    let n = ExactNumber::from(s.n);
    t.push(
        "n",
        StepKind::Root,
        &n,
        format!("{} = {}²({} + {}), so n = {}", s.target, s.n, s.n, s.q, s.n),
    );

    let x = s.x;
    let y = p.product.checked_div(&x)?;
    let z = &x + &p.difference;
    if !pythagoras_holds(&x, &y, &z) {
        return Err(SolveError::PythagorasCheckFailed { x, y, z });
    }
    for (label, v) in [("x", &x), ("y", &y), ("z", &z)] {
        t.push(
            label,
            StepKind::Answer,
            v,
            format!("{label} = {}", mixed_fraction(v)),
        );
    }
    Ok(Solution {
        values: vec![
            ("x".into(), x.clone()),
            ("y".into(), y.clone()),
            ("z".into(), z.clone()),
            ("q".into(), q),
            ("c".into(), s.scale),
            ("n".into(), n),
        ],
        trace: t.steps,
        conclusion: format!(
            "x = {}, y = {}, z = {}.",
            mixed_fraction(&x),
            mixed_fraction(&y),
            mixed_fraction(&z)
        ),
    })
}

/// `14 + 7/20` style rendering for positive values.
pub fn mixed_fraction(v: &ExactNumber) -> String {
    let whole = v.as_rational().trunc();
    let rest = ExactNumber::from_rational(v.as_rational() - &whole);
    let whole = whole.to_integer();
    match (whole.is_zero(), rest.is_zero()) {
        (_, true) => whole.to_string(),
        (true, false) => rest.to_fraction_string(),
        (false, false) => format!("{whole} + {}", rest.to_fraction_string()),
    }
}
