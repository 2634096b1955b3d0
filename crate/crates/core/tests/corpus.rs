//! The bundled scripts and problem files describe the same procedures, so
//! their final values must agree with each other and with the solvers.

use babylon_cubic::problem::{solve, verify};
use babylon_cubic::procedure_dsl::{execute, BUNDLED};
use babylon_cubic::published::{self, INSTANCES};
use babylon_cubic::ExactNumber;

fn script_registers(name: &str) -> std::collections::BTreeMap<String, ExactNumber> {
    let script = BUNDLED.iter().find(|b| b.name == name).unwrap().script();
    execute(&script).unwrap().registers
}

#[test]
fn scripts_agree_with_solvers() {
    let pairs: [(&str, &[(&str, &str)]); 5] = [
        ("im54478", &[("x", "x"), ("depth", "z")]),
        (
            "ybc4669_b2",
            &[
                ("x", "x"),
                ("volume", "volume"),
                ("target", "target"),
                ("u", "u"),
            ],
        ),
        (
            "bm85200_5",
            &[("x", "x"), ("y", "y"), ("z", "z"), ("target", "target")],
        ),
        (
            "bm85200_6",
            &[
                ("length", "x"),
                ("width", "y"),
                ("depth", "z"),
                ("rx", "X"),
                ("ry", "Y"),
                ("rt", "T"),
            ],
        ),
        (
            "bm85200_7",
            &[
                ("length", "x"),
                ("width", "y"),
                ("depth", "z"),
                ("rx", "X"),
                ("ry", "Y"),
                ("rt", "T"),
            ],
        ),
    ];
    for (name, mapping) in pairs {
        let registers = script_registers(name);
        let solution = solve(&published::by_id(name).unwrap().problem()).unwrap();
        for (register, value) in mapping {
            assert_eq!(
                registers.get(*register),
                solution.value(value),
                "{name}: {register} vs {value}"
            );
        }
    }
}

#[test]
fn script_traces_match_solver_traces() {
    // The well scripts inscribe the same intermediate values, in order, as
    // the solvers compute them.
    for name in ["bm85200_6", "bm85200_7"] {
        let script = BUNDLED.iter().find(|b| b.name == name).unwrap().script();
        let trace = execute(&script).unwrap();
        let solution = solve(&published::by_id(name).unwrap().problem()).unwrap();
        let from_script: Vec<(&str, &ExactNumber)> = trace
            .steps
            .iter()
            .map(|s| (s.label.as_str(), &s.value))
            .collect();
        let from_solver: Vec<(&str, &ExactNumber)> = solution
            .trace
            .iter()
            .map(|s| (s.label.as_str(), &s.value))
            .collect();
        assert_eq!(from_script, from_solver, "{name}");
    }
}

#[test]
fn every_instance_verifies() {
    for inst in INSTANCES {
        let report = verify(&inst.problem());
        assert!(report.agrees(), "{}: {:?}", inst.id, report.checks);
    }
}
