//! The `babcubic` command line: argument parsing and dispatch, with all
//! output collected so the whole command can be run in process.

use std::fmt::Write as _;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::problem::{self, parse_problem, Problem};
use crate::procedure_dsl::{
    self, execute, parse_script, render_trace, Opcode, Script, Trace, TraceStyle,
};
use crate::published;
use crate::sexagesimal::{parse_literal, ExactNumber};
use crate::solvers::{Solution, SolveError, StepKind};
use crate::tables::{build_table, SearchBounds, TableKind, TABLET_RANGE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Style {
    Plain,
    Tablet,
    Machine,
}

#[derive(Debug, Parser)]
#[command(
    name = "babcubic",
    version,
    about = "Exact sexagesimal arithmetic and Old Babylonian cubic-equation procedures"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOptions,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOptions {
    /// Output style.
    #[arg(long, value_enum, default_value_t = Style::Plain, global = true)]
    pub style: Style,
    /// Print rational forms alongside sexagesimal ones.
    #[arg(long, global = true)]
    pub fractions: bool,
    /// Search range for the n³ + kn search and for tables, as LO..HI.
    #[arg(long, value_name = "LO..HI", global = true)]
    pub bounds: Option<SearchBounds>,
    /// Vertical conversion constant (12 by default).
    #[arg(long, value_name = "N", global = true, value_parser = parse_literal)]
    pub conversion: Option<ExactNumber>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a number or a single operation, e.g. `igi 12` or `mul 0;5 1;30`.
    Calc {
        #[arg(required = true, num_args = 1..)]
        expression: Vec<String>,
    },
    /// Print a table of n³ or n³ + n².
    Tables {
        #[arg(long, default_value = "cube")]
        kind: TableKind,
    },
    /// Solve a problem file, or a bundled instance by name.
    Solve { problem: String },
    /// Execute a procedure script, or a bundled script by name.
    Replay { script: String },
    /// Solve a problem and cross-check the answer against the rational-root
    /// oracle.
    Verify { problem: String },
}

/// Exit status and the text written to each stream.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }
}

/// Failure report: a kind such as `NoRationalSolution`, a message, and
/// extra machine-readable fields.
struct Failure {
    code: i32,
    kind: String,
    message: String,
    fields: Vec<(String, String)>,
    stdout: String,
}

impl Failure {
    fn usage(kind: &str, message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            kind: kind.to_string(),
            message: message.into(),
            fields: Vec::new(),
            stdout: String::new(),
        }
    }

    fn domain(kind: &str, message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_DOMAIN,
            ..Failure::usage(kind, message)
        }
    }

    fn into_outcome(self, style: Style) -> Outcome {
        let stderr = match style {
            Style::Machine => {
                let mut out = format!("error\t{}\nmessage\t{}\n", self.kind, self.message);
                for (k, v) in &self.fields {
                    let _ = writeln!(out, "{k}\t{v}");
                }
                out
            }
            Style::Plain | Style::Tablet => format!("error[{}]: {}\n", self.kind, self.message),
        };
        Outcome {
            code: self.code,
            stdout: self.stdout,
            stderr,
        }
    }
}

fn solve_failure(e: &SolveError) -> Failure {
    let mut f = Failure::domain(e.kind(), e.to_string());
    if let SolveError::NoRationalSolution { repairs, .. } = e {
        f.fields = repairs
            .iter()
            .map(|r| ("repair".to_string(), r.to_string()))
            .collect();
    }
    f
}

/// Runs the command line `argv` (including the program name).
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome::ok(text)
            };
        }
    };
    let style = cli.global.style;
    let result = match &cli.command {
        Command::Calc { expression } => calc(&cli.global, expression),
        Command::Tables { kind } => tables(&cli.global, *kind),
        Command::Solve { problem } => solve(&cli.global, problem),
        Command::Replay { script } => replay(&cli.global, script),
        Command::Verify { problem } => verify(&cli.global, problem),
    };
    match result {
        Ok(stdout) => Outcome::ok(stdout),
        Err(f) => f.into_outcome(style),
    }
}

/// `0;30`, or `0;30 (1/2)` with `--fractions`.
fn show(v: &ExactNumber, fractions: bool) -> String {
    if fractions && !v.is_integer() {
        format!("{v} ({})", v.to_fraction_string())
    } else {
        v.to_string()
    }
}

/// The two machine columns: sexagesimal (or `p/q` when there is no finite
/// expansion) and fraction.
fn machine(v: &ExactNumber) -> String {
    format!("{v}\t{}", v.to_fraction_string())
}

fn calc(opts: &GlobalOptions, expression: &[String]) -> Result<String, Failure> {
    let words: Vec<&str> = expression
        .iter()
        .flat_map(|e| e.split_whitespace())
        .collect();
    let (opcode, operand_words) = match words.split_first() {
        Some((first, rest)) => match first.parse::<Opcode>() {
            Ok(op) => (op, rest),
            Err(()) if rest.is_empty() => (Opcode::Put, &words[..]),
            Err(()) => {
                return Err(Failure::usage(
                    "UnknownOpcode",
                    format!("unknown opcode {first:?}"),
                ))
            }
        },
        None => return Err(Failure::usage("SyntaxError", "empty expression")),
    };
    if operand_words.len() != opcode.arity() {
        return Err(Failure::usage(
            "ArityMismatch",
            format!(
                "{opcode} takes {} operand(s), found {}",
                opcode.arity(),
                operand_words.len()
            ),
        ));
    }
    let operands = operand_words
        .iter()
        .map(|w| parse_literal(w).map_err(|e| Failure::usage("SyntaxError", e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let bounds = opts.bounds.unwrap_or_default();
    let (value, warning) = opcode
        .apply_within(&operands, bounds)
        .map_err(|e| Failure::domain(e.kind(), e.to_string()))?;

    let mut out = String::new();
    match opts.style {
        Style::Plain => {
            let _ = writeln!(out, "{}", show(&value, opts.fractions));
        }
        Style::Tablet => {
            let step = procedure_dsl::TraceStep {
                label: "s1".into(),
                register: "result".into(),
                opcode,
                operands,
                value: value.clone(),
            };
            let _ = writeln!(out, "{}", procedure_dsl::tablet_phrase(&step));
        }
        Style::Machine => {
            let _ = writeln!(out, "value\t{}", machine(&value));
        }
    }
    if let Some(w) = warning {
        let _ = match opts.style {
            Style::Machine => writeln!(out, "warning\t{w}"),
            _ => writeln!(out, "warning: {w}"),
        };
    }
    Ok(out)
}

fn tables(opts: &GlobalOptions, kind: TableKind) -> Result<String, Failure> {
    let range = opts.bounds.unwrap_or(TABLET_RANGE);
    let table =
        build_table(kind, range).map_err(|e| Failure::usage("InvalidBounds", e.to_string()))?;
    let mut out = String::new();
    for entry in table {
        let value = ExactNumber::from(entry.value);
        let _ = match opts.style {
            Style::Tablet => writeln!(out, "{value} -e {} ba-si", entry.n),
            Style::Plain | Style::Machine => {
                writeln!(out, "{}\t{}\t{value}", entry.n, value.numer())
            }
        };
    }
    Ok(out)
}

fn read_input(
    arg: &str,
    bundled: impl Fn(&str) -> Option<&'static str>,
) -> Result<String, Failure> {
    match std::fs::read_to_string(arg) {
        Ok(text) => Ok(text),
        Err(e) => {
            let stem = Path::new(arg)
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or(arg);
            if !Path::new(arg).exists() {
                if let Some(text) = bundled(stem) {
                    return Ok(text.to_string());
                }
            }
            Err(Failure::usage("Io", format!("cannot read {arg}: {e}")))
        }
    }
}

fn load_problem(opts: &GlobalOptions, arg: &str) -> Result<Problem, Failure> {
    let text = read_input(arg, |name| published::by_id(name).map(|i| i.problem_text))?;
    let mut problem =
        parse_problem(&text).map_err(|e| Failure::usage("ProblemSyntax", format!("{arg}: {e}")))?;
    if let Some(c) = &opts.conversion {
        problem = problem
            .with_conversion(c.clone())
            .map_err(|e| Failure::usage("InvalidInput", e.to_string()))?;
    }
    if let Some(b) = opts.bounds {
        problem = problem.with_bounds(b);
    }
    Ok(problem)
}

fn kind_name(kind: StepKind) -> &'static str {
    match kind {
        StepKind::Step => "step",
        StepKind::Root => "root",
        StepKind::Answer => "answer",
    }
}

fn render_solution(opts: &GlobalOptions, problem: &Problem, sol: &Solution) -> String {
    let notes: Vec<String> = published::find(problem)
        .map(|inst| {
            published::discrepancies(inst, sol)
                .iter()
                .map(|d| d.to_string())
                .collect()
        })
        .unwrap_or_default();
    let mut out = String::new();
    match opts.style {
        Style::Plain => {
            let _ = writeln!(out, "problem: {problem}");
            for step in &sol.trace {
                let tag = match step.kind {
                    StepKind::Step => String::new(),
                    k => format!(" ({})", kind_name(k)),
                };
                let _ = writeln!(
                    out,
                    "  {}: {}{tag}",
                    step.label,
                    show(&step.value, opts.fractions)
                );
            }
            for (name, v) in &sol.values {
                let unit = problem
                    .unit_of(name)
                    .map(|u| format!(" {u}"))
                    .unwrap_or_default();
                let _ = writeln!(out, "{name} = {}{unit}", show(v, opts.fractions));
            }
            for note in &notes {
                let _ = writeln!(out, "note: {note}");
            }
        }
        Style::Tablet => {
            for step in &sol.trace {
                let _ = writeln!(out, "{}", step.description);
            }
            for note in &notes {
                let _ = writeln!(out, "note: {note}");
            }
            let _ = writeln!(out, "{}", sol.conclusion);
        }
        Style::Machine => {
            let _ = writeln!(out, "type\t{}", problem.type_name());
            for step in &sol.trace {
                let _ = writeln!(
                    out,
                    "{}.{}\t{}",
                    kind_name(step.kind),
                    step.label,
                    machine(&step.value)
                );
            }
            for (name, v) in &sol.values {
                let _ = writeln!(out, "value.{name}\t{}", machine(v));
            }
            for (i, note) in notes.iter().enumerate() {
                let _ = writeln!(out, "note.{}\t{note}", i + 1);
            }
            let _ = writeln!(out, "conclusion\t{}", sol.conclusion);
        }
    }
    out
}

fn solve(opts: &GlobalOptions, arg: &str) -> Result<String, Failure> {
    let problem = load_problem(opts, arg)?;
    let sol = problem::solve(&problem).map_err(|e| solve_failure(&e))?;
    Ok(render_solution(opts, &problem, &sol))
}

fn verify(opts: &GlobalOptions, arg: &str) -> Result<String, Failure> {
    let problem = load_problem(opts, arg)?;
    let report = problem::verify(&problem);
    let mut out = String::new();
    let roots: Vec<String> = report.oracle_roots.iter().map(|r| r.to_string()).collect();
    let verdict = |passed: bool| if passed { "pass" } else { "FAIL" };
    match opts.style {
        Style::Machine => {
            let _ = writeln!(out, "type\t{}", problem.type_name());
            let _ = writeln!(out, "cubic\t{}", report.cubic);
            let _ = writeln!(out, "oracle_roots\t{}", roots.join(" "));
            match &report.solution {
                Ok(sol) => {
                    for (name, v) in &sol.values {
                        let _ = writeln!(out, "value.{name}\t{}", machine(v));
                    }
                }
                Err(e) => {
                    let _ = writeln!(out, "solver_error\t{}", e.kind());
                }
            }
            for c in &report.checks {
                let _ = writeln!(out, "check.{}\t{}\t{}", c.name, verdict(c.passed), c.detail);
            }
            let _ = writeln!(out, "agrees\t{}", report.agrees());
        }
        Style::Plain | Style::Tablet => {
            let _ = writeln!(out, "problem: {problem}");
            let _ = writeln!(out, "eliminated cubic: {}", report.cubic);
            let _ = writeln!(out, "rational roots: {{{}}}", roots.join(", "));
            match &report.solution {
                Ok(sol) => {
                    for (name, v) in &sol.values {
                        let _ = writeln!(out, "{name} = {}", show(v, opts.fractions));
                    }
                }
                Err(e) => {
                    let _ = writeln!(out, "solver: error[{}]: {e}", e.kind());
                }
            }
            for c in &report.checks {
                let _ = writeln!(out, "{} {}: {}", verdict(c.passed), c.name, c.detail);
            }
            let _ = writeln!(
                out,
                "{}",
                if report.agrees() {
                    "agreement"
                } else {
                    "DISAGREEMENT"
                }
            );
        }
    }
    if report.agrees() {
        Ok(out)
    } else {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect();
        Err(Failure {
            stdout: out,
            ..Failure::domain(
                "Disagreement",
                format!("failed checks: {}", failed.join(", ")),
            )
        })
    }
}

fn load_script(arg: &str) -> Result<Script, Failure> {
    let text = read_input(arg, |name| {
        procedure_dsl::BUNDLED
            .iter()
            .find(|b| b.name == name)
            .map(|b| b.text)
    })?;
    let mut script =
        parse_script(&text).map_err(|e| Failure::usage(e.kind_name(), format!("{arg}: {e}")))?;
    script.name = Path::new(arg)
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or(arg)
        .to_string();
    Ok(script)
}

fn render_replay(opts: &GlobalOptions, trace: &Trace) -> String {
    match opts.style {
        Style::Plain if opts.fractions => {
            let mut out = String::new();
            for s in &trace.steps {
                let _ = writeln!(
                    out,
                    "{}: {} = {}",
                    s.label,
                    s.register,
                    show(&s.value, true)
                );
            }
            out
        }
        Style::Plain => render_trace(trace, TraceStyle::Plain),
        Style::Tablet => render_trace(trace, TraceStyle::Tablet),
        Style::Machine => {
            let mut out = String::new();
            for s in &trace.steps {
                let _ = writeln!(
                    out,
                    "step.{}\t{}\t{}",
                    s.label,
                    s.register,
                    machine(&s.value)
                );
            }
            for (r, v) in &trace.registers {
                let _ = writeln!(out, "register.{r}\t{}", machine(v));
            }
            let _ = writeln!(out, "checked\t{}", trace.checked);
            out
        }
    }
}

fn replay(opts: &GlobalOptions, arg: &str) -> Result<String, Failure> {
    let script = load_script(arg)?;
    let trace = execute(&script).map_err(|e| {
        let mut f = Failure::domain(e.kind(), e.to_string());
        if let procedure_dsl::ExecError::ExpectationMismatch {
            label,
            expected,
            actual,
        } = &e
        {
            f.fields = vec![
                ("step".into(), label.clone()),
                ("expected".into(), machine(expected)),
                ("actual".into(), machine(actual)),
            ];
        }
        f
    })?;
    let mut out = render_replay(opts, &trace);
    for w in &trace.warnings {
        let _ = match opts.style {
            Style::Machine => writeln!(out, "warning\t{w}"),
            _ => writeln!(out, "warning: {w}"),
        };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        run(std::iter::once("babcubic").chain(args.iter().copied()))
    }

    #[test]
    fn calc_examples() {
        assert_eq!(run_args(&["calc", "igi 12"]), Outcome::ok("0;5\n".into()));
        assert_eq!(run_args(&["calc", "igi", "12"]).stdout, "0;5\n");
        assert_eq!(run_args(&["calc", "mul 0;5 1;30"]).stdout, "0;7,30\n");
        assert_eq!(run_args(&["calc", "1,0;30"]).stdout, "1,0;30\n");
        assert_eq!(
            run_args(&["calc", "--fractions", "igi 12"]).stdout,
            "0;5 (1/12)\n"
        );
        assert_eq!(
            run_args(&["calc", "--style", "machine", "igi 12"]).stdout,
            "value\t0;5\t1/12\n"
        );
        assert_eq!(
            run_args(&["calc", "--style", "tablet", "mul 0;5 1;30"]).stdout,
            "multiply 0;5 by 1;30, and you see 0;7,30\n"
        );
        assert_eq!(run_args(&["calc", "searchn3kn 3 10,0,36"]).stdout, "33\n");
        assert_eq!(run_args(&["calc", "basi2 4,12"]).stdout, "6\n");
        assert_eq!(run_args(&["calc", "sub 1 2"]).stdout, "-1\n");
    }

    #[test]
    fn calc_errors() {
        let o = run_args(&["calc", "cuberoot 2"]);
        assert_eq!(o.code, EXIT_DOMAIN);
        assert_eq!(
            o.stderr,
            "error[NotPerfectCube]: 2 is not the cube of a rational number\n"
        );
        assert_eq!(run_args(&["calc", "frob 1"]).code, EXIT_USAGE);
        assert_eq!(run_args(&["calc", "mul 1"]).code, EXIT_USAGE);
        assert_eq!(run_args(&["calc", "1;60"]).code, EXIT_USAGE);
        assert_eq!(
            run_args(&["calc", "--bounds", "1..10", "searchn3kn 3 10,0,36"]).code,
            EXIT_DOMAIN
        );
        let o = run_args(&["calc", "igi 7"]);
        assert_eq!(o.stdout, "1/7\nwarning: igi of the non-regular number 7\n");
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_args(&[]).code, EXIT_USAGE);
        assert_eq!(run_args(&["frobnicate"]).code, EXIT_USAGE);
        assert_eq!(run_args(&["calc", "1", "--style", "loud"]).code, EXIT_USAGE);
        assert_eq!(run_args(&["tables", "--bounds", "5..1"]).code, EXIT_USAGE);
        assert_eq!(
            run_args(&["solve", "/nonexistent/x.problem"]).code,
            EXIT_USAGE
        );
        assert_eq!(
            run_args(&["solve", "ybc4669_b2", "--conversion", "6"]).code,
            EXIT_USAGE
        );
        let help = run_args(&["--help"]);
        assert_eq!(help.code, EXIT_OK);
        assert!(help.stdout.contains("replay"));
    }

    #[test]
    fn tables_output() {
        let o = run_args(&["tables"]);
        let lines: Vec<&str> = o.stdout.lines().collect();
        assert_eq!(lines.len(), 60);
        assert_eq!(lines[29], "30\t27000\t7,30,0");
        let o = run_args(&["tables", "--kind", "cube-plus-square", "--bounds", "6..7"]);
        assert_eq!(o.stdout, "6\t252\t4,12\n7\t392\t6,32\n");
        let o = run_args(&["tables", "--style", "tablet", "--bounds", "30..30"]);
        assert_eq!(o.stdout, "7,30,0 -e 30 ba-si\n");
    }

    #[test]
    fn solve_bundled_by_name() {
        let o = run_args(&["solve", "im54478", "--style", "tablet"]);
        assert_eq!(o.code, EXIT_OK);
        assert!(o
            .stdout
            .ends_with("0;30 is the side of your square. 6 is your depth.\n"));
        let o = run_args(&["solve", "im54478"]);
        assert!(
            o.stdout.contains("x = 0;30 nindan\nz = 6 kùš\n"),
            "{}",
            o.stdout
        );
        let o = run_args(&["solve", "im54478", "--style", "machine"]);
        assert!(o.stdout.contains("root.rev2\t0;30\t1/2\n"), "{}", o.stdout);
        assert!(o.stdout.contains("value.z\t6\t6\n"));
    }

    #[test]
    fn conversion_override() {
        // 6x³ = 1;30 leaves x³ = 0;15, which is not a cube.
        assert_eq!(
            run_args(&["solve", "im54478", "--conversion", "6"]).code,
            EXIT_DOMAIN
        );
        // 0;11,15 is 3/16, and 1;30 divided by it is 8.
        let o = run_args(&[
            "solve",
            "im54478",
            "--conversion",
            "0;11,15",
            "--style",
            "machine",
        ]);
        assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
        assert!(o.stdout.contains("value.x\t2\t2\n"));
    }

    #[test]
    fn wang_reports_discrepancy() {
        let o = run_args(&["solve", "wang"]);
        assert_eq!(o.code, EXIT_OK);
        assert!(o.stdout.contains(
            "note: recorded z = 50 + 1/4 (50;15) is inconsistent with the derived 51 + 1/4 (51;15)"
        ));
    }

    #[test]
    fn replay_and_mismatch() {
        let o = run_args(&["replay", "im54478"]);
        assert_eq!(o.code, EXIT_OK);
        assert!(
            o.stdout
                .starts_with("obv.7-8: r = 0;5\nrev.1: c = 0;7,30\n"),
            "{}",
            o.stdout
        );
        let dir = std::env::temp_dir().join(format!("babcubic-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let bad = dir.join("bad.proc");
        std::fs::write(&bad, "r1 = igi 12 => 0;6\n").unwrap();
        let o = run_args(&["replay", bad.to_str().unwrap()]);
        assert_eq!(o.code, EXIT_DOMAIN);
        assert_eq!(
            o.stderr,
            "error[ExpectationMismatch]: step s1: expected 0;6, but the value is 0;5\n"
        );
        let o = run_args(&["replay", "--style", "machine", bad.to_str().unwrap()]);
        assert_eq!(
            o.stderr,
            "error\tExpectationMismatch\nmessage\tstep s1: expected 0;6, but the value is 0;5\n\
             step\ts1\nexpected\t0;6\t1/10\nactual\t0;5\t1/12\n"
        );
        std::fs::write(&bad, "r1 = frobnicate 3\n").unwrap();
        let o = run_args(&["replay", bad.to_str().unwrap()]);
        assert_eq!(o.code, EXIT_USAGE);
        assert!(o.stderr.starts_with("error[UnknownOpcode]:"));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn verify_exit_codes() {
        let o = run_args(&["verify", "bm85200_6"]);
        assert_eq!(o.code, EXIT_OK, "{}", o.stdout);
        assert!(o.stdout.ends_with("agreement\n"));
        let o = run_args(&["verify", "ybc4669_b2_tablet", "--style", "machine"]);
        assert_eq!(o.code, EXIT_OK);
        assert!(o.stdout.contains("solver_error\tNoRationalSolution\n"));
        assert!(o.stdout.contains("oracle_roots\t\n"));
    }
}
