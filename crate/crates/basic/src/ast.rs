//! Syntax tree and its canonical pretty-printer.

use std::fmt;

use crate::token::Pin;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Gt,
}

impl CmpOp {
    fn as_str(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "<>",
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(i16),
    Var(String),
    Pin(Pin),
    Neg(Box<Expr>),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LcdArg {
    Text(String),
    Chr(Expr),
    Number(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stmt {
    Assign(String, Expr),
    Incr(String),
    Decr(String),
    If {
        cond: Expr,
        then_block: Vec<Stmt>,
        else_block: Option<Vec<Stmt>>,
    },
    DoLoop(Vec<Stmt>),
    ExitLoop,
    LcdPrint(Vec<LcdArg>),
    LcdLocate(Expr, Expr),
    DefChar(Expr, Box<[Expr; 8]>),
    Cls,
    Waitms(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Program {
    pub body: Vec<Stmt>,
}

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Cmp(..) => 0,
            Expr::Arith(..) => 1,
            Expr::Neg(_) => 2,
            Expr::Int(n) if *n < 0 => 2,
            _ => 3,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.fmt_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Var(name) => f.write_str(name),
            Expr::Pin(pin) => write!(f, "{pin}"),
            Expr::Neg(inner) => {
                f.write_str("-")?;
                // `-5` would read back as the literal -5, so keep the
                // negation visible.
                if let Expr::Int(n) = **inner {
                    return write!(f, "({n})");
                }
                inner.fmt_at(f, 3)
            }
            Expr::Arith(op, lhs, rhs) => {
                lhs.fmt_at(f, 1)?;
                f.write_str(match op {
                    ArithOp::Add => " + ",
                    ArithOp::Sub => " - ",
                })?;
                rhs.fmt_at(f, 2)
            }
            Expr::Cmp(op, lhs, rhs) => {
                lhs.fmt_at(f, 1)?;
                write!(f, " {} ", op.as_str())?;
                rhs.fmt_at(f, 1)
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

fn write_block(f: &mut fmt::Formatter<'_>, body: &[Stmt], depth: usize) -> fmt::Result {
    for stmt in body {
        write_stmt(f, stmt, depth)?;
    }
    Ok(())
}

fn write_stmt(f: &mut fmt::Formatter<'_>, stmt: &Stmt, depth: usize) -> fmt::Result {
    let pad = "  ".repeat(depth);
    match stmt {
        Stmt::Assign(name, expr) => writeln!(f, "{pad}{name} = {expr}"),
        Stmt::Incr(name) => writeln!(f, "{pad}Incr {name}"),
        Stmt::Decr(name) => writeln!(f, "{pad}Decr {name}"),
        Stmt::If {
            cond,
            then_block,
            else_block,
        } => {
            writeln!(f, "{pad}If {cond} Then")?;
            write_block(f, then_block, depth + 1)?;
            if let Some(else_block) = else_block {
                writeln!(f, "{pad}Else")?;
                write_block(f, else_block, depth + 1)?;
            }
            writeln!(f, "{pad}End If")
        }
        Stmt::DoLoop(body) => {
            writeln!(f, "{pad}Do")?;
            write_block(f, body, depth + 1)?;
            writeln!(f, "{pad}Loop")
        }
        Stmt::ExitLoop => writeln!(f, "{pad}Exit Loop"),
        Stmt::LcdPrint(args) => {
            write!(f, "{pad}Lcd ")?;
            for (i, arg) in args.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ; ")?;
                }
                match arg {
                    LcdArg::Text(s) => write!(f, "\"{s}\"")?,
                    LcdArg::Chr(e) => write!(f, "Chr({e})")?,
                    LcdArg::Number(e) => write!(f, "{e}")?,
                }
            }
            writeln!(f)
        }
        Stmt::LcdLocate(row, col) => writeln!(f, "{pad}Locate {row} , {col}"),
        Stmt::DefChar(slot, rows) => {
            write!(f, "{pad}Deflcdchar {slot}")?;
            for r in rows.iter() {
                write!(f, " , {r}")?;
            }
            writeln!(f)
        }
        Stmt::Cls => writeln!(f, "{pad}Cls"),
        Stmt::Waitms(e) => writeln!(f, "{pad}Waitms {e}"),
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_block(f, &self.body, 0)
    }
}
