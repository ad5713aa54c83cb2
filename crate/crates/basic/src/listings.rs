//! The three time-adjustment routines, checked in verbatim.

use crate::ast::{Program, Stmt};
use crate::compile;

pub const CHANGE_HOUR: &str = include_str!("../listings/change_hour.bas");
pub const CHANGE_MINUTE: &str = include_str!("../listings/change_minute.bas");
pub const CHANGE_SECOND: &str = include_str!("../listings/change_second.bas");

pub const ALL: [(&str, &str); 3] = [
    ("change_hour", CHANGE_HOUR),
    ("change_minute", CHANGE_MINUTE),
    ("change_second", CHANGE_SECOND),
];

/// The three routines run back to back inside an endless scan loop, the
/// way a firmware main loop would call them.
pub fn adjustment_loop() -> Program {
    let mut body = Vec::new();
    for (name, source) in ALL {
        let program = compile(source).unwrap_or_else(|e| panic!("{name} listing: {e}"));
        body.extend(program.body);
    }
    Program {
        body: vec![Stmt::DoLoop(body)],
    }
}
