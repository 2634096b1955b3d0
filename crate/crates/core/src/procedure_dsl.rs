//! A straight-line script language for tablet procedures.
//!
//! One statement per line:
//!
//! ```text
//! [label:] register = opcode operand* [=> literal]
//! ```
//!
//! Operands are registers (`[a-z][a-z0-9_]*`) or number literals in
//! sexagesimal (`1;30`, `10,0,36`) or fraction (`7/20`) form. `#` starts a
//! comment. A statement without a label is named `s1`, `s2`, … by its
//! position among the statements.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use thiserror::Error;

use crate::sexagesimal::{parse_literal, ExactNumber, NumberError};
use crate::tables::{
    cube_root_exact, inverse_lookup, search_n3_plus_kn, SearchBounds, TableError, TableKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Opcode {
    /// Inscribe a value.
    Put,
    /// Reciprocal.
    Igi,
    Mul,
    Add,
    /// First operand minus second.
    Sub,
    Square,
    CubeRoot,
    /// Inverse of the `n³ + n²` table.
    Basi2,
    /// `searchn3kn k t`: the `n` with `n³ + k·n = t`.
    SearchN3Kn,
    /// Display a value under a new name.
    Show,
}

impl Opcode {
    pub const ALL: [Opcode; 10] = [
        Opcode::Put,
        Opcode::Igi,
        Opcode::Mul,
        Opcode::Add,
        Opcode::Sub,
        Opcode::Square,
        Opcode::CubeRoot,
        Opcode::Basi2,
        Opcode::SearchN3Kn,
        Opcode::Show,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Opcode::Put => "put",
            Opcode::Igi => "igi",
            Opcode::Mul => "mul",
            Opcode::Add => "add",
            Opcode::Sub => "sub",
            Opcode::Square => "square",
            Opcode::CubeRoot => "cuberoot",
            Opcode::Basi2 => "basi2",
            Opcode::SearchN3Kn => "searchn3kn",
            Opcode::Show => "show",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Opcode::Mul | Opcode::Add | Opcode::Sub | Opcode::SearchN3Kn => 2,
            _ => 1,
        }
    }

    /// Applies the opcode to already evaluated operands. Also returns a
    /// warning when the tablets would not have taken this step.
    pub fn apply(self, args: &[ExactNumber]) -> Result<(ExactNumber, Option<String>), DomainError> {
        self.apply_within(args, SearchBounds::default())
    }

    /// As [`Opcode::apply`], with `searchn3kn` limited to `bounds`.
    pub fn apply_within(
        self,
        args: &[ExactNumber],
        bounds: SearchBounds,
    ) -> Result<(ExactNumber, Option<String>), DomainError> {
        assert_eq!(args.len(), self.arity(), "arity checked at parse time");
        let value = match self {
            Opcode::Put | Opcode::Show => args[0].clone(),
            Opcode::Igi => {
                let value = args[0].reciprocal()?;
                let warning = (!args[0].is_regular()?)
                    .then(|| format!("igi of the non-regular number {}", args[0]));
                return Ok((value, warning));
            }
            Opcode::Mul => &args[0] * &args[1],
            Opcode::Add => &args[0] + &args[1],
            Opcode::Sub => &args[0] - &args[1],
            Opcode::Square => &args[0] * &args[0],
            Opcode::CubeRoot => cube_root_exact(&args[0])?,
            Opcode::Basi2 => ExactNumber::from(inverse_lookup(
                TableKind::CubePlusSquare,
                &whole(&args[0])?,
            )?),
            Opcode::SearchN3Kn => {
                let k = args[0]
                    .to_u64()
                    .ok_or_else(|| DomainError::NotNatural(args[0].clone()))?;
                ExactNumber::from(search_n3_plus_kn(k, &whole(&args[1])?, bounds)?)
            }
        };
        Ok((value, None))
    }
}

fn whole(v: &ExactNumber) -> Result<BigInt, DomainError> {
    v.to_integer()
        .ok_or_else(|| DomainError::NotNatural(v.clone()))
}

impl fmt::Display for Opcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Opcode {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Opcode::ALL.into_iter().find(|op| op.name() == s).ok_or(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operand {
    Register(String),
    Literal(ExactNumber),
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Register(r) => f.write_str(r),
            Operand::Literal(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub label: Option<String>,
    pub target: String,
    pub opcode: Opcode,
    pub operands: Vec<Operand>,
    pub expectation: Option<ExactNumber>,
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(label) = &self.label {
            write!(f, "{label}: ")?;
        }
        write!(f, "{} = {}", self.target, self.opcode)?;
        for op in &self.operands {
            write!(f, " {op}")?;
        }
        if let Some(e) = &self.expectation {
            write!(f, " => {e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Script {
    pub name: String,
    pub statements: Vec<Statement>,
}

impl Script {
    /// The label a statement is reported under.
    pub fn label(&self, index: usize) -> String {
        self.statements[index]
            .label
            .clone()
            .unwrap_or_else(|| format!("s{}", index + 1))
    }
}

/// One statement per line; parsing the output gives back the same
/// statements.
impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown opcode {0:?}")]
    UnknownOpcode(String),
    #[error("{opcode} takes {expected} operand(s), found {found}")]
    Arity {
        opcode: Opcode,
        expected: usize,
        found: usize,
    },
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("register {0:?} is used before it is assigned")]
    UndefinedRegister(String),
    #[error("bad literal: {0}")]
    Literal(NumberError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ParseErrorKind::Syntax(_) | ParseErrorKind::Literal(_) => "SyntaxError",
            ParseErrorKind::UnknownOpcode(_) => "UnknownOpcode",
            ParseErrorKind::Arity { .. } => "ArityMismatch",
            ParseErrorKind::DuplicateLabel(_) => "DuplicateLabel",
            ParseErrorKind::UndefinedRegister(_) => "UndefinedRegister",
        }
    }
}

fn is_register(word: &str) -> bool {
    let mut chars = word.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

fn is_label(word: &str) -> bool {
    !word.is_empty()
        && word
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_'))
}

/// Whitespace-separated words with their 1-based character columns.
fn words(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(byte, w)| (line[..byte].chars().count() + 1, w))
        .collect()
}

pub fn parse_script(text: &str) -> Result<Script, ParseError> {
    let mut statements = Vec::new();
    let mut labels = HashSet::new();
    let mut defined = HashSet::new();
    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let code = raw.split('#').next().unwrap_or("");
        let toks = words(code);
        if toks.is_empty() {
            continue;
        }
        let err = |column: usize, kind: ParseErrorKind| ParseError {
            line: line_no,
            column,
            kind,
        };
        let syntax =
            |column: usize, msg: &str| err(column, ParseErrorKind::Syntax(msg.to_string()));

        let mut rest = &toks[..];
        let mut label = None;
        if let Some(name) = rest[0].1.strip_suffix(':') {
            if !is_label(name) {
                return Err(syntax(
                    rest[0].0,
                    "a label is letters, digits, '.', '-' or '_'",
                ));
            }
            if !labels.insert(name.to_string()) {
                return Err(err(
                    rest[0].0,
                    ParseErrorKind::DuplicateLabel(name.to_string()),
                ));
            }
            label = Some(name.to_string());
            rest = &rest[1..];
        }

        let Some(&(col, target)) = rest.first() else {
            return Err(syntax(
                code.chars().count() + 1,
                "expected a statement after the label",
            ));
        };
        if !is_register(target) {
            return Err(syntax(col, "expected a register name"));
        }
        match rest.get(1) {
            Some((_, "=")) => {}
            Some(&(c, _)) => return Err(syntax(c, "expected '='")),
            None => return Err(syntax(code.chars().count() + 1, "expected '='")),
        }
        let Some(&(op_col, op_word)) = rest.get(2) else {
            return Err(syntax(code.chars().count() + 1, "expected an opcode"));
        };
        let opcode: Opcode = op_word
            .parse()
            .map_err(|_| err(op_col, ParseErrorKind::UnknownOpcode(op_word.to_string())))?;

        let mut body = &rest[3..];
        let mut expectation = None;
        if let Some(pos) = body.iter().position(|(_, w)| *w == "=>") {
            let tail = &body[pos + 1..];
            let &[(c, lit)] = tail else {
                let c = tail.get(1).map_or(body[pos].0, |t| t.0);
                return Err(syntax(c, "expected exactly one literal after '=>'"));
            };
            expectation = Some(parse_literal(lit).map_err(|e| err(c, ParseErrorKind::Literal(e)))?);
            body = &body[..pos];
        }

        if body.len() != opcode.arity() {
            return Err(err(
                op_col,
                ParseErrorKind::Arity {
                    opcode,
                    expected: opcode.arity(),
                    found: body.len(),
                },
            ));
        }
        let mut operands = Vec::with_capacity(body.len());
        for &(c, word) in body {
            if is_register(word) {
                if !defined.contains(word) {
                    return Err(err(c, ParseErrorKind::UndefinedRegister(word.to_string())));
                }
                operands.push(Operand::Register(word.to_string()));
            } else {
                let v = parse_literal(word).map_err(|e| err(c, ParseErrorKind::Literal(e)))?;
                operands.push(Operand::Literal(v));
            }
        }
        defined.insert(target.to_string());
        statements.push(Statement {
            label,
            target: target.to_string(),
            opcode,
            operands,
            expectation,
        });
    }
    // Explicit labels must not collide with the generated ones either.
    let script = Script {
        name: String::new(),
        statements,
    };
    let mut seen = HashSet::new();
    for i in 0..script.statements.len() {
        let label = script.label(i);
        if !seen.insert(label.clone()) {
            return Err(ParseError {
                line: 0,
                column: 0,
                kind: ParseErrorKind::DuplicateLabel(label),
            });
        }
    }
    Ok(script)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error(transparent)]
    Number(#[from] NumberError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("{0} is not a natural number")]
    NotNatural(ExactNumber),
}

impl DomainError {
    pub fn kind(&self) -> &'static str {
        match self {
            DomainError::Number(NumberError::DivisionByZero) => "DivisionByZero",
            DomainError::Number(NumberError::ZeroInput) => "ZeroInput",
            DomainError::Number(_) => "NumberError",
            DomainError::Table(TableError::NotPerfectCube(_)) => "NotPerfectCube",
            DomainError::Table(TableError::NotFound { .. }) => "NotFound",
            DomainError::Table(_) => "TableError",
            DomainError::NotNatural(_) => "NotNatural",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("step {label}: expected {expected}, but the value is {actual}")]
    ExpectationMismatch {
        label: String,
        expected: ExactNumber,
        actual: ExactNumber,
    },
    #[error("step {label}: register {register:?} is not defined")]
    UndefinedRegister { label: String, register: String },
    #[error("step {label}: {opcode} takes {} operand(s), found {found}", .opcode.arity())]
    Arity {
        label: String,
        opcode: Opcode,
        found: usize,
    },
    #[error("step {label}: {source}")]
    Domain { label: String, source: DomainError },
}

impl ExecError {
    pub fn kind(&self) -> &'static str {
        match self {
            ExecError::ExpectationMismatch { .. } => "ExpectationMismatch",
            ExecError::UndefinedRegister { .. } => "UndefinedRegister",
            ExecError::Arity { .. } => "ArityMismatch",
            ExecError::Domain { source, .. } => source.kind(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub label: String,
    pub register: String,
    pub opcode: Opcode,
    pub operands: Vec<ExactNumber>,
    pub value: ExactNumber,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
    pub registers: BTreeMap<String, ExactNumber>,
    /// Steps a scribe would not have taken, such as igi of a non-regular
    /// number.
    pub warnings: Vec<String>,
    /// Number of expectations that were checked and held.
    pub checked: usize,
}

pub fn execute(script: &Script) -> Result<Trace, ExecError> {
    let mut trace = Trace::default();
    for (i, st) in script.statements.iter().enumerate() {
        let label = script.label(i);
        let operands =
            st.operands
                .iter()
                .map(|op| match op {
                    Operand::Literal(v) => Ok(v.clone()),
                    Operand::Register(r) => trace.registers.get(r).cloned().ok_or_else(|| {
                        ExecError::UndefinedRegister {
                            label: label.clone(),
                            register: r.clone(),
                        }
                    }),
                })
                .collect::<Result<Vec<_>, _>>()?;
        if operands.len() != st.opcode.arity() {
            return Err(ExecError::Arity {
                label,
                opcode: st.opcode,
                found: operands.len(),
            });
        }
        let (value, warning) = st
            .opcode
            .apply(&operands)
            .map_err(|source| ExecError::Domain {
                label: label.clone(),
                source,
            })?;
        if let Some(w) = warning {
            trace.warnings.push(format!("{label}: {w}"));
        }
        if let Some(expected) = &st.expectation {
            if *expected != value {
                return Err(ExecError::ExpectationMismatch {
                    label,
                    expected: expected.clone(),
                    actual: value,
                });
            }
            trace.checked += 1;
        }
        trace.registers.insert(st.target.clone(), value.clone());
        trace.steps.push(TraceStep {
            label,
            register: st.target.clone(),
            opcode: st.opcode,
            operands,
            value,
        });
    }
    Ok(trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceStyle {
    /// `label: register = value`
    Plain,
    /// The step in the tablet's own phrasing.
    Tablet,
}

/// A step in the tablet's phrasing, e.g. "multiply 0;5 by 1;30, and you
/// see 0;7,30".
pub fn tablet_phrase(step: &TraceStep) -> String {
    let v = &step.value;
    let a = step.operands.first();
    let b = step.operands.get(1);
    match (step.opcode, a, b) {
        (Opcode::Put, Some(a), _) => format!("inscribe {a}"),
        (Opcode::Show, Some(a), _) => format!("{a} is your {}", step.register),
        (Opcode::Igi, Some(a), _) => format!("make the reciprocal of {a}, and you see {v}"),
        (Opcode::Mul, Some(a), Some(b)) => format!("multiply {a} by {b}, and you see {v}"),
        (Opcode::Add, Some(a), Some(b)) => format!("add {a} and {b}, and you see {v}"),
        (Opcode::Sub, Some(a), Some(b)) => format!("take {b} from {a}, and you see {v}"),
        (Opcode::Square, Some(a), _) => format!("square {a}, and you see {v}"),
        (Opcode::CubeRoot, Some(a), _) => {
            format!("what is the cube root of {a}? {v} is the cube root")
        }
        (Opcode::Basi2, Some(a), _) => format!("{a} is {v}³ + {v}², so {v} is the root"),
        (Opcode::SearchN3Kn, Some(k), Some(t)) => {
            format!("computing n³ + {k}n for n = 1, 2, 3, …, {v} gives {t}")
        }
        _ => format!("{} is {v}", step.register),
    }
}

pub fn render_step(step: &TraceStep, style: TraceStyle) -> String {
    match style {
        TraceStyle::Plain => format!("{}: {} = {}", step.label, step.register, step.value),
        TraceStyle::Tablet => tablet_phrase(step),
    }
}

/// One line per step, each ending in a newline.
pub fn render_trace(trace: &Trace, style: TraceStyle) -> String {
    trace
        .steps
        .iter()
        .map(|s| render_step(s, style) + "\n")
        .collect()
}

/// A bundled script together with the final registers it must produce.
pub struct BundledScript {
    pub name: &'static str,
    pub text: &'static str,
}

impl BundledScript {
    pub fn script(&self) -> Script {
        let mut s = parse_script(self.text).expect("bundled scripts parse");
        s.name = self.name.to_string();
        s
    }
}

pub const BUNDLED: &[BundledScript] = &[
    BundledScript {
        name: "im54478",
        text: include_str!("../procedures/im54478.proc"),
    },
    BundledScript {
        name: "ybc4669_b2",
        text: include_str!("../procedures/ybc4669_b2.proc"),
    },
    BundledScript {
        name: "bm85200_5",
        text: include_str!("../procedures/bm85200_5.proc"),
    },
    BundledScript {
        name: "bm85200_6",
        text: include_str!("../procedures/bm85200_6.proc"),
    },
    BundledScript {
        name: "bm85200_7",
        text: include_str!("../procedures/bm85200_7.proc"),
    },
];

pub const MANIFEST: &str = include_str!("../procedures/MANIFEST");

/// Expected final registers per script, read from the manifest lines
/// `script register value`.
pub fn manifest() -> BTreeMap<String, BTreeMap<String, ExactNumber>> {
    let mut out: BTreeMap<String, BTreeMap<String, ExactNumber>> = BTreeMap::new();
    for line in MANIFEST.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let &[script, register, value] = parts.as_slice() else {
            panic!("malformed manifest line {line:?}");
        };
        let value = parse_literal(value).expect("manifest literal parses");
        out.entry(script.to_string())
            .or_default()
            .insert(register.to_string(), value);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexagesimal::arithmetic;
    use crate::sexagesimal::ArithOp;
    use crate::tables::integer_cube_root;
    use num_bigint::BigUint;
    use proptest::prelude::*;

    fn run(text: &str) -> Result<Trace, ExecError> {
        execute(&parse_script(text).unwrap())
    }

    #[test]
    fn single_igi_statement() {
        let s = parse_script("r1 = igi 12 => 0;5").unwrap();
        assert_eq!(s.statements.len(), 1);
        let st = &s.statements[0];
        assert_eq!(st.opcode, Opcode::Igi);
        assert_eq!(
            st.operands,
            vec![Operand::Literal(ExactNumber::integer(12))]
        );
        assert_eq!(st.expectation, Some(ExactNumber::frac(1, 12)));
        assert_eq!(st.label, None);
    }

    #[test]
    fn empty_and_comment_only_scripts() {
        assert!(parse_script("").unwrap().statements.is_empty());
        assert!(parse_script("# nothing\n   \n")
            .unwrap()
            .statements
            .is_empty());
        assert_eq!(
            render_trace(&execute(&Script::default()).unwrap(), TraceStyle::Plain),
            ""
        );
    }

    #[test]
    fn parse_errors_carry_positions() {
        let e = parse_script("r1 = frobnicate 3").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownOpcode("frobnicate".into()));
        assert_eq!((e.line, e.column), (1, 6));
        assert_eq!(e.kind_name(), "UnknownOpcode");

        let e = parse_script("a = put 1\nb = mul a").unwrap_err();
        assert!(matches!(
            e.kind,
            ParseErrorKind::Arity {
                expected: 2,
                found: 1,
                ..
            }
        ));
        assert_eq!((e.line, e.column), (2, 5));

        let e = parse_script("x: a = put 1\nx: b = put 2").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateLabel("x".into()));
        assert_eq!(e.line, 2);

        let e = parse_script("s2: a = put 1\nb = put 2").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateLabel("s2".into()));

        let e = parse_script("a = mul b 2").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UndefinedRegister("b".into()));
        assert_eq!(e.column, 9);

        for bad in [
            "A = put 1",
            "a put 1",
            "a =",
            "a = put 1 =>",
            "a = put 1 => 2 3",
            "a = put 1;x",
            "lbl:",
        ] {
            assert!(parse_script(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn comments_and_labels() {
        let s = parse_script("obv.7: r = igi 12 => 0;5  # make the reciprocal\nx = mul r 1;30")
            .unwrap();
        assert_eq!(s.statements[0].label.as_deref(), Some("obv.7"));
        assert_eq!(s.label(0), "obv.7");
        assert_eq!(s.label(1), "s2");
    }

    #[test]
    fn expectation_mismatch_reports_step() {
        let err = run("r1 = igi 12 => 0;6").unwrap_err();
        assert_eq!(
            err,
            ExecError::ExpectationMismatch {
                label: "s1".into(),
                expected: ExactNumber::frac(1, 10),
                actual: ExactNumber::frac(1, 12),
            }
        );
        assert_eq!(err.kind(), "ExpectationMismatch");
        assert_eq!(
            err.to_string(),
            "step s1: expected 0;6, but the value is 0;5"
        );
    }

    #[test]
    fn domain_errors_propagate() {
        let err = run("a = cuberoot 2").unwrap_err();
        assert_eq!(err.kind(), "NotPerfectCube");
        assert_eq!(run("a = igi 0").unwrap_err().kind(), "ZeroInput");
        assert_eq!(run("a = basi2 4,13").unwrap_err().kind(), "NotFound");
        assert_eq!(run("a = basi2 0;30").unwrap_err().kind(), "NotNatural");
    }

    #[test]
    fn execute_reports_missing_register_in_built_scripts() {
        let script = Script {
            name: "built".into(),
            statements: vec![Statement {
                label: None,
                target: "a".into(),
                opcode: Opcode::Put,
                operands: vec![Operand::Register("b".into())],
                expectation: None,
            }],
        };
        assert_eq!(execute(&script).unwrap_err().kind(), "UndefinedRegister");
    }

    #[test]
    fn non_regular_igi_warns() {
        let t = run("a = igi 7").unwrap();
        assert_eq!(t.registers["a"], ExactNumber::frac(1, 7));
        assert_eq!(
            t.warnings,
            vec!["s1: igi of the non-regular number 7".to_string()]
        );
        assert!(run("a = igi 12").unwrap().warnings.is_empty());
    }

    #[test]
    fn renders_styles() {
        let t = run("r1 = igi 12\nc = mul r1 1;30").unwrap();
        assert_eq!(
            render_trace(&t, TraceStyle::Plain),
            "s1: r1 = 0;5\ns2: c = 0;7,30\n"
        );
        assert_eq!(
            render_step(&t.steps[1], TraceStyle::Tablet),
            "multiply 0;5 by 1;30, and you see 0;7,30"
        );
        assert_eq!(render_step(&t.steps[0], TraceStyle::Plain), "s1: r1 = 0;5");
        let one = Trace {
            steps: vec![t.steps[1].clone()],
            ..Trace::default()
        };
        assert_eq!(
            render_trace(&one, TraceStyle::Tablet),
            "multiply 0;5 by 1;30, and you see 0;7,30\n"
        );
    }

    #[test]
    fn search_and_basi2() {
        let t = run("u = searchn3kn 3 10,0,36 => 33\nz = basi2 4,12 => 6").unwrap();
        assert_eq!(t.checked, 2);
        assert_eq!(
            tablet_phrase(&t.steps[0]),
            "computing n³ + 3n for n = 1, 2, 3, …, 33 gives 10,0,36"
        );
    }

    #[test]
    fn bundled_scripts_match_manifest() {
        let manifest = manifest();
        assert_eq!(manifest.len(), BUNDLED.len());
        for b in BUNDLED {
            let trace = execute(&b.script()).unwrap_or_else(|e| panic!("{}: {e}", b.name));
            assert!(
                trace.warnings.is_empty(),
                "{}: {:?}",
                b.name,
                trace.warnings
            );
            for (reg, v) in &manifest[b.name] {
                assert_eq!(trace.registers.get(reg), Some(v), "{} {reg}", b.name);
            }
            assert_eq!(execute(&b.script()).unwrap(), trace);
        }
    }

    #[test]
    fn im54478_script() {
        let t = execute(&BUNDLED[0].script()).unwrap();
        assert_eq!(t.steps.len(), 6);
        assert_eq!(t.checked, 6);
        assert_eq!(t.registers["x"], ExactNumber::frac(1, 2));
        assert_eq!(t.registers["depth"], ExactNumber::integer(6));
    }

    #[test]
    fn bm85200_6_script_values() {
        let t = execute(&BUNDLED[3].script()).unwrap();
        let values: Vec<String> = t.steps.iter().map(|s| s.value.to_string()).collect();
        assert_eq!(
            values,
            [
                "0;50",
                "10",
                "0;41,40",
                "6;56,40",
                "0;8,38,24",
                "0;10,4,48",
                "0;36",
                "0;24",
                "0;42",
                "0;30",
                "0;20",
                "6"
            ]
        );
    }

    fn literal() -> impl Strategy<Value = ExactNumber> {
        (
            -5000i64..5000,
            prop::sample::select(vec![1i64, 2, 3, 4, 5, 6, 12, 60, 7, 11]),
        )
            .prop_map(|(p, q)| ExactNumber::frac(p, q))
    }

    fn statement(defined: Vec<String>) -> impl Strategy<Value = Statement> {
        let operand = {
            let regs = defined.clone();
            prop_oneof![
                literal().prop_map(Operand::Literal),
                prop::sample::select(if regs.is_empty() {
                    vec!["zz".to_string()]
                } else {
                    regs
                })
                .prop_map(Operand::Register),
            ]
            .prop_filter("register must be defined", move |op| match op {
                Operand::Register(r) => defined.contains(r),
                Operand::Literal(_) => true,
            })
        };
        (
            prop::sample::select(Opcode::ALL.to_vec()),
            prop::collection::vec(operand, 2),
            "[a-z][a-z0-9_]{0,5}",
            prop::option::of(literal()),
            prop::option::of("[A-Za-z0-9][A-Za-z0-9._-]{0,5}"),
        )
            .prop_map(|(opcode, ops, target, expectation, label)| Statement {
                label,
                target,
                opcode,
                operands: ops[..opcode.arity()].to_vec(),
                expectation,
            })
    }

    fn script() -> impl Strategy<Value = Script> {
        (1usize..8).prop_flat_map(|len| {
            let mut strat: BoxedStrategy<Vec<Statement>> = Just(Vec::new()).boxed();
            for _ in 0..len {
                strat = strat
                    .prop_flat_map(|prev: Vec<Statement>| {
                        let defined = prev.iter().map(|s| s.target.clone()).collect();
                        (Just(prev), statement(defined)).prop_map(|(mut prev, s)| {
                            prev.push(s);
                            prev
                        })
                    })
                    .boxed();
            }
            strat.prop_map(|statements| Script {
                name: String::new(),
                statements,
            })
        })
    }

    proptest! {
        #[test]
        fn parse_render_roundtrip(s in script()) {
            let labels: Vec<String> = (0..s.statements.len()).map(|i| s.label(i)).collect();
            let unique: HashSet<&String> = labels.iter().collect();
            prop_assume!(unique.len() == labels.len());
            let text = s.to_string();
            let parsed = parse_script(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
            prop_assert_eq!(parsed, s);
        }

        #[test]
        fn opcodes_agree_with_core(a in literal(), b in literal(), n in 1u64..200, k in 0u64..50) {
            let (sum, _) = Opcode::Add.apply(&[a.clone(), b.clone()]).unwrap();
            prop_assert_eq!(sum, arithmetic(&a, &b, ArithOp::Add).unwrap());
            let (diff, _) = Opcode::Sub.apply(&[a.clone(), b.clone()]).unwrap();
            prop_assert_eq!(diff, arithmetic(&a, &b, ArithOp::Sub).unwrap());
            let (prod, _) = Opcode::Mul.apply(&[a.clone(), b.clone()]).unwrap();
            prop_assert_eq!(prod, arithmetic(&a, &b, ArithOp::Mul).unwrap());
            let (sq, _) = Opcode::Square.apply(std::slice::from_ref(&a)).unwrap();
            prop_assert_eq!(sq, a.pow(2));
            prop_assert_eq!(Opcode::Put.apply(std::slice::from_ref(&a)).unwrap().0, a.clone());
            prop_assert_eq!(Opcode::Show.apply(std::slice::from_ref(&a)).unwrap().0, a.clone());
            match Opcode::Igi.apply(std::slice::from_ref(&a)) {
                Ok((r, warning)) => {
                    prop_assert_eq!(&r * &a, ExactNumber::one());
                    prop_assert_eq!(warning.is_none(), a.is_regular().unwrap());
                }
                Err(_) => prop_assert!(a.is_zero()),
            }
            let cube = ExactNumber::from(n).pow(3);
            let big = BigUint::from(n).pow(3);
            prop_assert_eq!(integer_cube_root(&big), BigUint::from(n));
            prop_assert_eq!(Opcode::CubeRoot.apply(std::slice::from_ref(&cube)).unwrap().0, ExactNumber::from(n));
            let cube_plus_square = &cube + &ExactNumber::from(n).pow(2);
            prop_assert_eq!(Opcode::Basi2.apply(&[cube_plus_square]).unwrap().0, ExactNumber::from(n));
            let target = &cube + &ExactNumber::from(k * n);
            prop_assert_eq!(
                Opcode::SearchN3Kn.apply(&[ExactNumber::from(k), target]).unwrap().0,
                ExactNumber::from(n)
            );
        }
    }
}
