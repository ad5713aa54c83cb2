//! Tree-walking interpreter.
//!
//! Every `Do` loop iteration begins with a scan yield: the scan counter
//! advances and the bound [`Machine`] gets a chance to update pin levels or
//! stop the run. One loop iteration therefore samples the buttons exactly
//! once, which is what gives level-polling firmware one action per press.

use std::collections::BTreeMap;

use crate::ast::{ArithOp, CmpOp, Expr, LcdArg, Program, Stmt};
use crate::error::RuntimeError;
use crate::machine::{LcdOp, Machine, NullMachine, ScanControl};
use crate::token::Pin;

pub type Vars = BTreeMap<String, i16>;

/// Variables, scan counter and the machine the program is bound to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Env<M = NullMachine> {
    vars: Vars,
    scan_counter: u64,
    machine: M,
}

impl Default for Env<NullMachine> {
    fn default() -> Self {
        Env::new()
    }
}

impl Env<NullMachine> {
    pub fn new() -> Self {
        Env {
            vars: Vars::new(),
            scan_counter: 0,
            machine: NullMachine::default(),
        }
    }
}

impl<M: Machine> Env<M> {
    pub fn with_machine(machine: M) -> Self {
        Env {
            vars: Vars::new(),
            scan_counter: 0,
            machine,
        }
    }

    /// Rebinds pins, LCD and waits to `machine`, keeping variables and the
    /// scan counter.
    pub fn bind_machine<N: Machine>(self, machine: N) -> Env<N> {
        Env {
            vars: self.vars,
            scan_counter: self.scan_counter,
            machine,
        }
    }

    /// Unset variables read as 0.
    pub fn get(&self, name: &str) -> i16 {
        self.vars.get(&name.to_ascii_lowercase()).copied().unwrap_or(0)
    }

    pub fn set(&mut self, name: &str, value: i16) {
        self.vars.insert(name.to_ascii_lowercase(), value);
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn scan_counter(&self) -> u64 {
        self.scan_counter
    }

    pub fn machine(&self) -> &M {
        &self.machine
    }

    pub fn machine_mut(&mut self) -> &mut M {
        &mut self.machine
    }

    pub fn into_machine(self) -> M {
        self.machine
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// The program ran off its end.
    Completed,
    /// The machine stopped the run at a scan yield.
    Halted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunReport {
    pub outcome: Outcome,
    /// Statements and loop iterations consumed.
    pub steps: u64,
}

/// Executes `program` against `env`, consuming one unit of fuel per
/// statement and per loop iteration.
pub fn run<M: Machine>(program: &Program, env: &mut Env<M>, fuel: u64) -> Result<RunReport, RuntimeError> {
    let mut interp = Interp { env, fuel, steps: 0 };
    let outcome = match interp.block(&program.body)? {
        Flow::Halt => Outcome::Halted,
        Flow::Normal | Flow::Exit => Outcome::Completed,
    };
    Ok(RunReport {
        outcome,
        steps: interp.steps,
    })
}

enum Flow {
    Normal,
    Exit,
    Halt,
}

struct Interp<'e, M> {
    env: &'e mut Env<M>,
    fuel: u64,
    steps: u64,
}

impl<M: Machine> Interp<'_, M> {
    fn burn(&mut self) -> Result<(), RuntimeError> {
        if self.steps == self.fuel {
            return Err(RuntimeError::FuelExhausted(self.fuel));
        }
        self.steps += 1;
        Ok(())
    }

    fn scan(&mut self) -> Result<Flow, RuntimeError> {
        self.burn()?;
        self.env.scan_counter += 1;
        Ok(match self.env.machine.on_scan(self.env.scan_counter, &self.env.vars) {
            ScanControl::Continue => Flow::Normal,
            ScanControl::Halt => Flow::Halt,
        })
    }

    fn block(&mut self, body: &[Stmt]) -> Result<Flow, RuntimeError> {
        for stmt in body {
            match self.stmt(stmt)? {
                Flow::Normal => {}
                other => return Ok(other),
            }
        }
        Ok(Flow::Normal)
    }

    fn stmt(&mut self, stmt: &Stmt) -> Result<Flow, RuntimeError> {
        self.burn()?;
        match stmt {
            Stmt::Assign(name, e) => {
                let v = self.eval(e)?;
                self.env.vars.insert(name.clone(), v);
            }
            Stmt::Incr(name) => self.bump(name, 1),
            Stmt::Decr(name) => self.bump(name, -1),
            Stmt::If {
                cond,
                then_block,
                else_block,
            } => {
                if self.eval(cond)? != 0 {
                    return self.block(then_block);
                } else if let Some(else_block) = else_block {
                    return self.block(else_block);
                }
            }
            Stmt::DoLoop(body) => loop {
                if let Flow::Halt = self.scan()? {
                    return Ok(Flow::Halt);
                }
                match self.block(body)? {
                    Flow::Normal => {}
                    Flow::Exit => return Ok(Flow::Normal),
                    Flow::Halt => return Ok(Flow::Halt),
                }
            },
            Stmt::ExitLoop => return Ok(Flow::Exit),
            Stmt::LcdPrint(args) => {
                let mut bytes = Vec::new();
                for arg in args {
                    match arg {
                        LcdArg::Text(s) => bytes.extend(s.bytes()),
                        LcdArg::Chr(e) => bytes.push(self.eval(e)? as u8),
                        LcdArg::Number(e) => bytes.extend(self.eval(e)?.to_string().bytes()),
                    }
                }
                self.env.machine.lcd(LcdOp::Print(bytes));
            }
            Stmt::LcdLocate(row, col) => {
                let op = LcdOp::Locate(self.eval(row)?, self.eval(col)?);
                self.env.machine.lcd(op);
            }
            Stmt::DefChar(slot, rows) => {
                let slot = self.eval(slot)?;
                let mut bytes = [0u8; 8];
                for (b, e) in bytes.iter_mut().zip(rows.iter()) {
                    *b = self.eval(e)? as u8;
                }
                self.env.machine.lcd(LcdOp::DefChar(slot as u8, bytes));
            }
            Stmt::Cls => self.env.machine.lcd(LcdOp::Cls),
            Stmt::Waitms(e) => {
                let ms = u64::try_from(self.eval(e)?).unwrap_or(0);
                for _ in 0..self.env.machine.wait_ms(ms) {
                    if let Flow::Halt = self.scan()? {
                        return Ok(Flow::Halt);
                    }
                }
            }
        }
        Ok(Flow::Normal)
    }

    fn bump(&mut self, name: &str, delta: i16) {
        let slot = self.env.vars.entry(name.to_string()).or_insert(0);
        *slot = slot.wrapping_add(delta);
    }

    fn pin(&mut self, pin: Pin) -> Result<i16, RuntimeError> {
        self.env
            .machine
            .read_pin(pin, self.env.scan_counter)
            .map(i16::from)
            .ok_or(RuntimeError::UndefinedPinPort(pin.port))
    }

    fn eval(&mut self, e: &Expr) -> Result<i16, RuntimeError> {
        Ok(match e {
            Expr::Int(n) => *n,
            Expr::Var(name) => self.env.vars.get(name).copied().unwrap_or(0),
            Expr::Pin(pin) => self.pin(*pin)?,
            Expr::Neg(inner) => self.eval(inner)?.wrapping_neg(),
            Expr::Arith(op, lhs, rhs) => {
                let (a, b) = (self.eval(lhs)?, self.eval(rhs)?);
                match op {
                    ArithOp::Add => a.wrapping_add(b),
                    ArithOp::Sub => a.wrapping_sub(b),
                }
            }
            Expr::Cmp(op, lhs, rhs) => {
                let (a, b) = (self.eval(lhs)?, self.eval(rhs)?);
                i16::from(match op {
                    CmpOp::Eq => a == b,
                    CmpOp::Ne => a != b,
                    CmpOp::Lt => a < b,
                    CmpOp::Gt => a > b,
                })
            }
        })
    }
}
