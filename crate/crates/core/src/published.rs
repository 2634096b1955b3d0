//! The historical instances bundled with the crate, and the answers
//! recorded for them, so a derived solution can be compared with the
//! printed one.

use std::fmt;

use crate::problem::{parse_problem, Problem};
use crate::sexagesimal::{parse_literal, ExactNumber};
use crate::solvers::{mixed_fraction, Solution};

pub struct Instance {
    pub id: &'static str,
    pub source: &'static str,
    pub problem_text: &'static str,
    /// Recorded answers as `(name, literal)`.
    pub published: &'static [(&'static str, &'static str)],
}

impl Instance {
    pub fn problem(&self) -> Problem {
        parse_problem(self.problem_text).expect("bundled problem files parse")
    }
}

pub const INSTANCES: &[Instance] = &[
    Instance {
        id: "im54478",
        source: "IM 54478",
        problem_text: include_str!("../problems/im54478.problem"),
        published: &[("x", "0;30"), ("z", "6")],
    },
    Instance {
        id: "ybc4669_b2",
        source: "YBC 4669 B2",
        problem_text: include_str!("../problems/ybc4669_b2.problem"),
        published: &[("x", "5;30")],
    },
    Instance {
        id: "ybc4669_b2_tablet",
        source: "YBC 4669 B2 (as written)",
        problem_text: include_str!("../problems/ybc4669_b2_tablet.problem"),
        published: &[],
    },
    Instance {
        id: "bm85200_5",
        source: "BM 85200 no. 5",
        problem_text: include_str!("../problems/bm85200_5.problem"),
        published: &[("x", "0;30"), ("z", "6")],
    },
    Instance {
        id: "bm85200_6",
        source: "BM 85200 no. 6",
        problem_text: include_str!("../problems/bm85200_6.problem"),
        published: &[("x", "0;30"), ("y", "0;20"), ("z", "6")],
    },
    Instance {
        id: "bm85200_7",
        source: "BM 85200 no. 7",
        problem_text: include_str!("../problems/bm85200_7.problem"),
        published: &[("x", "0;30"), ("y", "0;20"), ("z", "6")],
    },
    Instance {
        id: "wang",
        source: "Wang Xiaotong, Jigu Suanjing",
        problem_text: include_str!("../problems/wang.problem"),
        // z is recorded as 50 + 1/4.
        published: &[("x", "287/20"), ("y", "246/5"), ("z", "201/4")],
    },
];

pub fn find(problem: &Problem) -> Option<&'static Instance> {
    INSTANCES.iter().find(|i| i.problem() == *problem)
}

pub fn by_id(id: &str) -> Option<&'static Instance> {
    INSTANCES.iter().find(|i| i.id == id)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discrepancy {
    pub name: String,
    pub published: ExactNumber,
    pub derived: Option<ExactNumber>,
}

impl fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "recorded {} = {} ({}) is inconsistent with ",
            self.name,
            mixed_fraction(&self.published),
            self.published
        )?;
        match &self.derived {
            Some(d) => write!(f, "the derived {} ({d})", mixed_fraction(d)),
            None => f.write_str("the solution, which has no such value"),
        }
    }
}

/// Recorded values that disagree with `solution`.
pub fn discrepancies(instance: &Instance, solution: &Solution) -> Vec<Discrepancy> {
    instance
        .published
        .iter()
        .filter_map(|(name, literal)| {
            let published = parse_literal(literal).expect("bundled literal parses");
            let derived = solution.value(name).cloned();
            (derived.as_ref() != Some(&published)).then(|| Discrepancy {
                name: name.to_string(),
                published,
                derived,
            })
        })
        .collect()
}
