//! BASIC dialect for the clock firmware: the `Do`/`Loop`, `Incr`/`Decr`,
//! `If`/`End If` subset used by the adjustment routines, plus `Lcd`,
//! `Locate`, `Deflcdchar`, `Cls` and `Waitms` bound to a simulated board.
//!
//! ```
//! use clock_basic::{compile, run, Env};
//!
//! let program = compile("Incr Hh\nIf Hh = 24 Then\n  Hh = 0\nEnd If\n").unwrap();
//! let mut env = Env::new();
//! env.set("hh", 23);
//! run(&program, &mut env, 100).unwrap();
//! assert_eq!(env.get("hh"), 0);
//! ```

pub mod ast;
pub mod error;
pub mod interp;
pub mod lex;
pub mod listings;
pub mod machine;
pub mod parse;
pub mod token;

pub use ast::{Expr, Program, Stmt};
pub use error::{BasicError, LexError, ParseError, ParseErrorKind, RuntimeError};
pub use interp::{run, Env, Outcome, RunReport, Vars};
pub use lex::tokenize;
pub use machine::{LcdMachine, LcdOp, Machine, NullMachine, ScanControl, ScriptedPins};
pub use parse::parse;
pub use token::{Pin, Token, TokenKind};

/// Tokenizes and parses in one step.
pub fn compile(source: &str) -> Result<Program, BasicError> {
    Ok(parse(&tokenize(source)?)?)
}
