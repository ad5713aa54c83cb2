//! Firmware engines. Both report (time, mode) observations stamped with
//! virtual time; the simulation turns them into frames.
//!
//! Timing contract for `advance_to(t)`: everything that happens strictly
//! before button events at `t` has run. For the native state machine that
//! includes second ticks at `t`; for BASIC firmware it is every scan that
//! starts before `t`, so the scan at `t` samples buttons changed at `t`.
//! `settle(t)` then runs whatever remains at `t` itself.

use std::sync::mpsc::{self, Receiver, Sender};
use std::thread::{self, JoinHandle};

use clock_basic::{run, Env, Machine, Outcome, Pin, Program, RuntimeError, ScanControl, Vars};
use clock_core::{AdjustMode, Button, ButtonEvent, ClockError, ClockFsm, Edge, TimeOfDay};

use crate::error::{FirmwareError, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Observation {
    pub at_ms: u64,
    pub time: TimeOfDay,
    pub mode: AdjustMode,
}

pub trait Engine: Send {
    fn advance_to(&mut self, t: u64, out: &mut Vec<Observation>) -> Result<(), SimError>;
    fn settle(&mut self, t: u64, out: &mut Vec<Observation>) -> Result<(), SimError>;
    fn button(&mut self, ev: ButtonEvent, out: &mut Vec<Observation>) -> Result<(), SimError>;
    fn state(&self) -> (TimeOfDay, AdjustMode);
}

/// The clock state machine from clock-core, stepped tick by tick.
#[derive(Debug, Clone)]
pub struct NativeEngine {
    fsm: ClockFsm,
    now: u64,
}

impl NativeEngine {
    pub fn new(start: TimeOfDay, freeze_while_adjusting: bool) -> Self {
        NativeEngine {
            fsm: ClockFsm::new(start).keep_ticking(!freeze_while_adjusting),
            now: 0,
        }
    }

    fn observe(&self, at_ms: u64) -> Observation {
        Observation {
            at_ms,
            time: self.fsm.time(),
            mode: self.fsm.mode(),
        }
    }
}

impl Engine for NativeEngine {
    fn advance_to(&mut self, t: u64, out: &mut Vec<Observation>) -> Result<(), SimError> {
        if t <= self.now {
            return Ok(());
        }
        while let Some(dt) = self.fsm.ms_until_tick() {
            if self.now + dt > t {
                break;
            }
            self.fsm.advance(dt);
            self.now += dt;
            out.push(self.observe(self.now));
        }
        self.fsm.advance(t - self.now);
        self.now = t;
        Ok(())
    }

    fn settle(&mut self, _t: u64, _out: &mut Vec<Observation>) -> Result<(), SimError> {
        Ok(())
    }

    fn button(&mut self, ev: ButtonEvent, out: &mut Vec<Observation>) -> Result<(), SimError> {
        let before = self.state();
        self.fsm.on_button(ev)?;
        if self.state() != before {
            out.push(self.observe(ev.at_ms));
        }
        Ok(())
    }

    fn state(&self) -> (TimeOfDay, AdjustMode) {
        (self.fsm.time(), self.fsm.mode())
    }
}

enum Command {
    /// Port 3 latch as the pins read it (active low).
    Levels(u8),
    /// Run up to and including this scan, then pause.
    RunThrough(u64),
    Stop,
}

type RawState = [i16; 4];

enum Reply {
    State { scan: u64, raw: RawState },
    Paused { next_scan: u64 },
    Finished(Result<(), RuntimeError>),
}

fn raw_state(vars: &Vars) -> RawState {
    let get = |name: &str| vars.get(name).copied().unwrap_or(0);
    [get("hh"), get("mm"), get("ss"), get("mode")]
}

/// The board as the interpreter thread sees it. Port 3 carries the buttons
/// and port 1 the LCD bus (reads high); the AT89C4051 has no ports 0 or 2.
struct HarnessMachine {
    commands: Receiver<Command>,
    replies: Sender<Reply>,
    levels: u8,
    limit: Option<u64>,
    last: RawState,
    scan_ms: u64,
}

impl HarnessMachine {
    fn report(&mut self, scan: u64, vars: &Vars) {
        let raw = raw_state(vars);
        if raw != self.last {
            self.last = raw;
            let _ = self.replies.send(Reply::State { scan, raw });
        }
    }

    /// Blocks until scan `scan` may run. False means stop.
    fn wait_for(&mut self, scan: u64, announce: bool) -> bool {
        if self.limit.is_some_and(|l| scan <= l) {
            return true;
        }
        if announce && self.replies.send(Reply::Paused { next_scan: scan }).is_err() {
            return false;
        }
        loop {
            match self.commands.recv() {
                Ok(Command::Levels(levels)) => self.levels = levels,
                Ok(Command::RunThrough(n)) => {
                    self.limit = Some(n);
                    if scan <= n {
                        return true;
                    }
                    // Nothing to run; acknowledge so the caller does not wait.
                    if self.replies.send(Reply::Paused { next_scan: scan }).is_err() {
                        return false;
                    }
                }
                Ok(Command::Stop) | Err(_) => return false,
            }
        }
    }
}

impl Machine for HarnessMachine {
    fn read_pin(&mut self, pin: Pin, _scan: u64) -> Option<bool> {
        match pin.port {
            3 => Some(self.levels >> pin.bit & 1 == 1),
            1 => Some(true),
            _ => None,
        }
    }

    fn wait_ms(&mut self, ms: u64) -> u64 {
        ms.div_ceil(self.scan_ms)
    }

    fn on_scan(&mut self, scan: u64, vars: &Vars) -> ScanControl {
        self.report(scan - 1, vars);
        if self.wait_for(scan, true) {
            ScanControl::Continue
        } else {
            ScanControl::Halt
        }
    }
}

/// Interpreted BASIC firmware. The interpreter runs on its own thread and
/// is stepped scan by scan over a channel; scan `i` happens at virtual time
/// `i * scan_ms`. The firmware reports through the variables Hh, Mm, Ss
/// and Mode (0 run, 1 hour, 2 minute, 3 second).
pub struct BasicEngine {
    commands: Sender<Command>,
    replies: Receiver<Reply>,
    thread: Option<JoinHandle<()>>,
    scan_ms: u64,
    next_scan: u64,
    levels: u8,
    held: [bool; 3],
    last_event_ms: u64,
    state: (TimeOfDay, AdjustMode),
    finished: bool,
}

impl BasicEngine {
    pub fn new(program: Program, start: TimeOfDay, scan_ms: u64) -> Self {
        let (command_tx, command_rx) = mpsc::channel();
        let (reply_tx, reply_rx) = mpsc::channel();
        let preset: [(&str, i16); 5] = [
            ("hh", i16::from(start.hh())),
            ("mm", i16::from(start.mm())),
            ("ss", i16::from(start.ss())),
            ("mode", 0),
            ("scanms", i16::try_from(scan_ms).unwrap_or(i16::MAX)),
        ];
        let thread = thread::Builder::new()
            .name("basic-firmware".into())
            .spawn(move || {
                let mut env = Env::with_machine(HarnessMachine {
                    commands: command_rx,
                    replies: reply_tx,
                    levels: 0xFF,
                    limit: None,
                    last: [0; 4],
                    scan_ms,
                });
                for (name, value) in preset {
                    env.set(name, value);
                }
                env.machine_mut().last = raw_state(env.vars());
                if !env.machine_mut().wait_for(0, false) {
                    return;
                }
                let result = run(&program, &mut env, u64::MAX);
                let scan = env.scan_counter();
                let vars = env.vars().clone();
                let machine = env.machine_mut();
                let finished = match result {
                    Ok(report) if report.outcome == Outcome::Halted => return,
                    Ok(_) => {
                        machine.report(scan, &vars);
                        Ok(())
                    }
                    Err(e) => Err(e),
                };
                let _ = machine.replies.send(Reply::Finished(finished));
            })
            .expect("spawn interpreter thread");
        BasicEngine {
            commands: command_tx,
            replies: reply_rx,
            thread: Some(thread),
            scan_ms,
            next_scan: 0,
            levels: 0xFF,
            held: [false; 3],
            last_event_ms: 0,
            state: (start, AdjustMode::Run),
            finished: false,
        }
    }

    /// True once the program has run off its end.
    pub fn finished(&self) -> bool {
        self.finished
    }

    fn decode(raw: RawState) -> Result<(TimeOfDay, AdjustMode), FirmwareError> {
        let [hh, mm, ss, mode] = raw;
        let field = |v: i16| u8::try_from(v).ok();
        let time = match (field(hh), field(mm), field(ss)) {
            (Some(h), Some(m), Some(s)) => TimeOfDay::new(h, m, s),
            _ => None,
        }
        .ok_or(FirmwareError::BadTime { hh, mm, ss })?;
        let mode = AdjustMode::from_index(mode).ok_or(FirmwareError::BadMode(mode))?;
        Ok((time, mode))
    }

    fn run_through(&mut self, last_scan: u64, out: &mut Vec<Observation>) -> Result<(), SimError> {
        if self.finished || last_scan < self.next_scan {
            return Ok(());
        }
        self.commands
            .send(Command::RunThrough(last_scan))
            .map_err(|_| FirmwareError::Disconnected)?;
        loop {
            match self.replies.recv().map_err(|_| FirmwareError::Disconnected)? {
                Reply::State { scan, raw } => {
                    self.state = Self::decode(raw)?;
                    out.push(Observation {
                        at_ms: scan * self.scan_ms,
                        time: self.state.0,
                        mode: self.state.1,
                    });
                }
                Reply::Paused { next_scan } => {
                    self.next_scan = next_scan;
                    return Ok(());
                }
                Reply::Finished(result) => {
                    self.finished = true;
                    return result.map_err(|e| FirmwareError::Basic(e.into()).into());
                }
            }
        }
    }
}

impl Engine for BasicEngine {
    fn advance_to(&mut self, t: u64, out: &mut Vec<Observation>) -> Result<(), SimError> {
        if t == 0 {
            return Ok(());
        }
        self.run_through((t - 1) / self.scan_ms, out)
    }

    fn settle(&mut self, t: u64, out: &mut Vec<Observation>) -> Result<(), SimError> {
        self.run_through(t / self.scan_ms, out)
    }

    fn button(&mut self, ev: ButtonEvent, _out: &mut Vec<Observation>) -> Result<(), SimError> {
        if ev.at_ms < self.last_event_ms {
            return Err(ClockError::OutOfOrder {
                last: self.last_event_ms,
                got: ev.at_ms,
            }
            .into());
        }
        let held = &mut self.held[ev.button.index()];
        if *held != (ev.edge == Edge::Release) {
            return Err(ClockError::ProtocolViolation {
                button: ev.button,
                edge: ev.edge,
            }
            .into());
        }
        *held = !*held;
        self.last_event_ms = ev.at_ms;
        let mask = 1 << ev.button.port3_bit();
        match ev.edge {
            Edge::Press => self.levels &= !mask,
            Edge::Release => self.levels |= mask,
        }
        if !self.finished {
            self.commands
                .send(Command::Levels(self.levels))
                .map_err(|_| FirmwareError::Disconnected)?;
        }
        Ok(())
    }

    fn state(&self) -> (TimeOfDay, AdjustMode) {
        self.state
    }
}

impl BasicEngine {
    pub fn is_held(&self, button: Button) -> bool {
        self.held[button.index()]
    }
}

impl Drop for BasicEngine {
    fn drop(&mut self) {
        let _ = self.commands.send(Command::Stop);
        if let Some(thread) = self.thread.take() {
            let _ = thread.join();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clock_basic::compile;

    fn engine(src: &str) -> BasicEngine {
        BasicEngine::new(compile(src).unwrap(), TimeOfDay::MIDNIGHT, 100)
    }

    #[test]
    fn scans_are_stamped_with_virtual_time() {
        let mut e = engine("Do\n  Incr Ss\nLoop");
        let mut out = Vec::new();
        e.advance_to(350, &mut out).unwrap();
        let stamps: Vec<u64> = out.iter().map(|o| o.at_ms).collect();
        assert_eq!(stamps, [100, 200, 300]);
        assert_eq!(e.state().0, TimeOfDay::new(0, 0, 3).unwrap());
        e.settle(400, &mut out).unwrap();
        assert_eq!(out.last().unwrap().at_ms, 400);
    }

    #[test]
    fn buttons_reach_the_next_scan() {
        let mut e = engine("Do\n  If P3.1 = 0 Then\n    Incr Mm\n  End If\nLoop");
        let mut out = Vec::new();
        e.advance_to(200, &mut out).unwrap();
        e.button(ButtonEvent::press(Button::Inc, 200), &mut out).unwrap();
        e.advance_to(250, &mut out).unwrap();
        e.button(ButtonEvent::release(Button::Inc, 250), &mut out).unwrap();
        e.settle(1000, &mut out).unwrap();
        assert_eq!(e.state().0, TimeOfDay::new(0, 1, 0).unwrap());
        assert_eq!(out[0].at_ms, 200);
        assert!(e.button(ButtonEvent::release(Button::Inc, 1000), &mut out).is_err());
    }

    #[test]
    fn program_end_and_errors() {
        let mut e = engine("Hh = 5");
        let mut out = Vec::new();
        e.settle(0, &mut out).unwrap();
        assert!(e.finished());
        assert_eq!(e.state().0.hh(), 5);
        e.settle(10_000, &mut out).unwrap();

        let mut bad = engine("Do\n  Hh = 24\nLoop");
        assert!(matches!(
            bad.settle(100, &mut out),
            Err(SimError::Firmware(FirmwareError::BadTime { hh: 24, .. }))
        ));
        let mut pin = engine("If P2.5 = 0 Then\nEnd If");
        assert!(matches!(
            pin.settle(0, &mut out),
            Err(SimError::Firmware(FirmwareError::Basic(_)))
        ));
    }

    #[test]
    fn waitms_takes_scans() {
        let mut e = engine("Do\n  Waitms 250\n  Incr Ss\nLoop");
        let mut out = Vec::new();
        e.settle(1000, &mut out).unwrap();
        // Each iteration: one loop scan plus three wait scans.
        assert_eq!(e.state().0.ss(), 2);
    }

    #[test]
    fn native_ticks_on_the_second() {
        let mut e = NativeEngine::new(TimeOfDay::MIDNIGHT, true);
        let mut out = Vec::new();
        e.advance_to(2500, &mut out).unwrap();
        assert_eq!(out.iter().map(|o| o.at_ms).collect::<Vec<_>>(), [1000, 2000]);
        e.button(ButtonEvent::press(Button::Set, 2500), &mut out).unwrap();
        e.advance_to(9000, &mut out).unwrap();
        assert_eq!(out.len(), 3);
        assert_eq!(out[2].mode, AdjustMode::SetHour);
    }
}
