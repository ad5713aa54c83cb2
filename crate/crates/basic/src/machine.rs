//! The hardware a program runs against: port pins, the LCD and time.

use clock_core::lcd::{cmd, LcdState, LcdWrite, LINE_BASE};

use crate::interp::Vars;
use crate::token::Pin;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanControl {
    Continue,
    Halt,
}

/// LCD statement as issued by the program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LcdOp {
    Print(Vec<u8>),
    /// 1-based row and column.
    Locate(i16, i16),
    DefChar(u8, [u8; 8]),
    Cls,
}

impl LcdOp {
    /// Controller writes that carry out the statement.
    pub fn to_writes(&self) -> Vec<LcdWrite> {
        match self {
            LcdOp::Print(bytes) => bytes.iter().map(|&b| LcdWrite::data(b)).collect(),
            LcdOp::Locate(row, col) => {
                let row = usize::from(*row > 1);
                let col = (*col).clamp(1, 40) as u8 - 1;
                vec![LcdWrite::command(cmd::SET_DDRAM_ADDR | (LINE_BASE[row] + col))]
            }
            LcdOp::DefChar(slot, rows) => {
                let mut writes = vec![LcdWrite::command(cmd::SET_CGRAM_ADDR | (slot & 0x07) << 3)];
                writes.extend(rows.iter().map(|&r| LcdWrite::data(r)));
                writes.push(LcdWrite::command(cmd::SET_DDRAM_ADDR));
                writes
            }
            LcdOp::Cls => vec![LcdWrite::command(cmd::CLEAR)],
        }
    }
}

/// Hooks the interpreter calls out to. Defaults: every port reads high,
/// LCD and wait statements do nothing, scans never halt.
pub trait Machine {
    /// Level of `pin` during scan `scan`, or `None` if its port is not bound.
    fn read_pin(&mut self, _pin: Pin, _scan: u64) -> Option<bool> {
        Some(true)
    }

    fn lcd(&mut self, _op: LcdOp) {}

    /// Number of scan yields a `Waitms` of `ms` takes.
    fn wait_ms(&mut self, _ms: u64) -> u64 {
        0
    }

    /// Called at the start of every loop iteration with the new scan number.
    fn on_scan(&mut self, _scan: u64, _vars: &Vars) -> ScanControl {
        ScanControl::Continue
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MachineLog {
    Lcd(LcdOp),
    Wait(u64),
}

/// Default machine: settable port latches (all high), with LCD and wait
/// statements recorded rather than performed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NullMachine {
    ports: [u8; 4],
    log: Vec<MachineLog>,
}

impl Default for NullMachine {
    fn default() -> Self {
        NullMachine {
            ports: [0xFF; 4],
            log: Vec::new(),
        }
    }
}

impl NullMachine {
    pub fn set_pin(&mut self, pin: Pin, high: bool) {
        let mask = 1 << pin.bit;
        let port = &mut self.ports[usize::from(pin.port)];
        if high {
            *port |= mask;
        } else {
            *port &= !mask;
        }
    }

    pub fn log(&self) -> &[MachineLog] {
        &self.log
    }
}

impl Machine for NullMachine {
    fn read_pin(&mut self, pin: Pin, _scan: u64) -> Option<bool> {
        Some(self.ports[usize::from(pin.port)] >> pin.bit & 1 == 1)
    }

    fn lcd(&mut self, op: LcdOp) {
        self.log.push(MachineLog::Lcd(op));
    }

    fn wait_ms(&mut self, ms: u64) -> u64 {
        self.log.push(MachineLog::Wait(ms));
        0
    }
}

/// Port 3 driven from a per-scan table of levels. Only port 3 is bound.
/// The run halts at the first scan past the end of the table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptedPins {
    levels: Vec<u8>,
}

impl ScriptedPins {
    pub fn port3(levels: Vec<u8>) -> Self {
        ScriptedPins { levels }
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

impl Machine for ScriptedPins {
    fn read_pin(&mut self, pin: Pin, scan: u64) -> Option<bool> {
        if pin.port != 3 {
            return None;
        }
        let level = usize::try_from(scan)
            .ok()
            .and_then(|s| self.levels.get(s))
            .copied()
            .unwrap_or(0xFF);
        Some(level >> pin.bit & 1 == 1)
    }

    fn on_scan(&mut self, scan: u64, _vars: &Vars) -> ScanControl {
        if scan >= self.levels.len() as u64 {
            ScanControl::Halt
        } else {
            ScanControl::Continue
        }
    }
}

/// Routes LCD statements to a simulated controller over the 4-bit bus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LcdMachine {
    lcd: LcdState,
    writes: Vec<LcdWrite>,
}

impl Default for LcdMachine {
    fn default() -> Self {
        let mut lcd = LcdState::reset();
        clock_core::lcd::init_4bit(&mut lcd).expect("init on a fresh controller");
        LcdMachine {
            lcd,
            writes: Vec::new(),
        }
    }
}

impl LcdMachine {
    pub fn lcd(&self) -> &LcdState {
        &self.lcd
    }

    /// Every byte sent since the init sequence.
    pub fn writes(&self) -> &[LcdWrite] {
        &self.writes
    }
}

impl Machine for LcdMachine {
    fn lcd(&mut self, op: LcdOp) {
        for w in op.to_writes() {
            self.lcd
                .bus_write_byte(w)
                .expect("whole-byte transfers never leave a nibble pending");
            self.writes.push(w);
        }
    }
}
