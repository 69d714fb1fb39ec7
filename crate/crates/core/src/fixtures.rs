//! Bundled example diagrams.
//!
//! * `university`: professors, students and courses; target `Professor.Tenure`,
//!   important `Takes.Grade`.
//! * `imdb`: people and movies; target is the reflexive `WorkedUnder`.
//! * `uwcse`: department staff, courses and publications; target is the
//!   reflexive `AdvisedBy`.

use crate::er::{parse_ir, ERDiagram};

pub const UNIVERSITY_IR: &str = include_str!("../fixtures/university.erd.json");
pub const IMDB_IR: &str = include_str!("../fixtures/imdb.erd.json");
pub const UWCSE_IR: &str = include_str!("../fixtures/uwcse.erd.json");

/// `(name, IR text)` for every bundled fixture.
pub const ALL: [(&str, &str); 3] = [
    ("university", UNIVERSITY_IR),
    ("imdb", IMDB_IR),
    ("uwcse", UWCSE_IR),
];

pub fn university() -> ERDiagram {
    parse_ir(UNIVERSITY_IR).expect("bundled fixture is valid")
}

pub fn imdb() -> ERDiagram {
    parse_ir(IMDB_IR).expect("bundled fixture is valid")
}

pub fn uwcse() -> ERDiagram {
    parse_ir(UWCSE_IR).expect("bundled fixture is valid")
}
