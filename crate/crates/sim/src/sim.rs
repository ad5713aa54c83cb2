use std::thread;
use std::time::{Duration, Instant};

use clock_core::glyphs::GlyphSet;
use clock_core::{AdjustMode, Button, ButtonEvent, Edge, TimeOfDay};

use crate::config::{FirmwareImage, SimConfig};
use crate::display::Display;
use crate::engine::{BasicEngine, Engine, NativeEngine, Observation};
use crate::error::{FirmwareError, SimError};
use crate::frame::Frame;
use crate::script::{ButtonScript, ScriptError};

/// One clock: a firmware engine, the LCD it drives, and the frame log.
///
/// Frames are stamped with virtual time and emitted only when the picture
/// or the mode changes. Changes within the same millisecond collapse into
/// one frame showing the final state.
pub struct Simulation {
    engine: Box<dyn Engine>,
    display: Display,
    scan_ms: u64,
    now: u64,
    committed: Frame,
    staged: Option<Frame>,
    emitted: Vec<Frame>,
    observations: Vec<Observation>,
}

impl Simulation {
    pub fn new(config: &SimConfig) -> Result<Self, SimError> {
        config.validate()?;
        let glyphs = config.load_glyphs()?;
        let firmware = config.load_firmware()?;
        Self::with_parts(config, glyphs, firmware)
    }

    /// Builds a simulation from already loaded glyphs and firmware; only the
    /// numeric fields of `config` are used.
    pub fn with_parts(config: &SimConfig, glyphs: GlyphSet, firmware: FirmwareImage) -> Result<Self, SimError> {
        config.validate()?;
        let engine: Box<dyn Engine> = match firmware {
            FirmwareImage::Native => Box::new(NativeEngine::new(config.start_time, config.freeze_while_adjusting)),
            FirmwareImage::Basic(program) => Box::new(BasicEngine::new(program, config.start_time, config.scan_ms)),
        };
        let mut display = Display::new(glyphs, config.layout);
        display.show(config.start_time).map_err(FirmwareError::from)?;
        let first = Frame::capture(0, config.start_time, AdjustMode::Run, &display);
        Ok(Simulation {
            engine,
            display,
            scan_ms: config.scan_ms,
            now: 0,
            committed: first.clone(),
            staged: None,
            emitted: vec![first],
            observations: Vec::new(),
        })
    }

    pub fn now_ms(&self) -> u64 {
        self.now
    }

    pub fn scan_ms(&self) -> u64 {
        self.scan_ms
    }

    pub fn state(&self) -> (TimeOfDay, AdjustMode) {
        self.engine.state()
    }

    pub fn display(&self) -> &Display {
        &self.display
    }

    /// Moves virtual time to `t`. Button events at `t` applied afterwards
    /// are still seen by the firmware at `t`.
    pub fn advance_to(&mut self, t: u64) -> Result<(), SimError> {
        if t < self.now {
            return Ok(());
        }
        self.engine.advance_to(t, &mut self.observations)?;
        self.now = t;
        self.absorb()
    }

    /// Runs whatever the firmware still has to do at the current time.
    pub fn settle(&mut self) -> Result<(), SimError> {
        self.engine.settle(self.now, &mut self.observations)?;
        self.absorb()
    }

    pub fn button(&mut self, button: Button, edge: Edge) -> Result<(), SimError> {
        let ev = ButtonEvent {
            button,
            edge,
            at_ms: self.now,
        };
        self.engine.button(ev, &mut self.observations)?;
        self.absorb()
    }

    fn absorb(&mut self) -> Result<(), SimError> {
        for i in 0..self.observations.len() {
            let obs = self.observations[i];
            self.display.show(obs.time).map_err(FirmwareError::from)?;
            let frame = Frame::capture(obs.at_ms, obs.time, obs.mode, &self.display);
            if let Some(staged) = self.staged.take() {
                if staged.virtual_ms < frame.virtual_ms {
                    self.commit(staged);
                }
            }
            self.staged = Some(frame);
        }
        self.observations.clear();
        Ok(())
    }

    fn commit(&mut self, frame: Frame) {
        if !frame.same_display(&self.committed) {
            self.emitted.push(frame.clone());
            self.committed = frame;
        }
    }

    /// Frames emitted since the last call, oldest first.
    pub fn take_frames(&mut self) -> Vec<Frame> {
        if let Some(staged) = self.staged.take() {
            self.commit(staged);
        }
        std::mem::take(&mut self.emitted)
    }

    /// What the display shows right now, stamped with the current time.
    pub fn current_frame(&self) -> Frame {
        self.staged
            .as_ref()
            .unwrap_or(&self.committed)
            .with_time_stamp(self.now)
    }
}

/// Result of a headless run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub final_frame: Frame,
    /// Frames on change, the first being the initial display at 0 ms.
    pub frames: Vec<Frame>,
    pub duration_ms: u64,
}

impl RunOutput {
    /// One frame per virtual millisecond from 0 to the end of the run.
    pub fn frames_every_ms(&self) -> impl Iterator<Item = Frame> + '_ {
        let mut next = 0;
        (0..=self.duration_ms).map(move |ms| {
            while next + 1 < self.frames.len() && self.frames[next + 1].virtual_ms <= ms {
                next += 1;
            }
            self.frames[next].with_time_stamp(ms)
        })
    }
}

/// Keeps virtual time from running ahead of `speed` times wall time.
struct Pacer {
    speed: f64,
    started: Instant,
}

impl Pacer {
    fn wait_until(&self, virtual_ms: u64) {
        if self.speed <= 0.0 {
            return;
        }
        let due = self.started + Duration::from_secs_f64(virtual_ms as f64 / 1000.0 / self.speed);
        let now = Instant::now();
        if due > now {
            thread::sleep(due - now);
        }
    }
}

fn advance_paced(sim: &mut Simulation, t: u64, pacer: &Pacer) -> Result<(), SimError> {
    if pacer.speed > 0.0 {
        let step = sim.scan_ms();
        let mut at = sim.now_ms();
        while at + step < t {
            at += step;
            pacer.wait_until(at);
            sim.advance_to(at)?;
        }
        pacer.wait_until(t);
    }
    sim.advance_to(t)
}

/// Runs `config`'s firmware for `duration_ms` of virtual time, injecting
/// `script`. Identical inputs give identical frame logs.
pub fn run_headless(config: &SimConfig, script: &ButtonScript, duration_ms: u64) -> Result<RunOutput, SimError> {
    let sim = Simulation::new(config)?;
    drive(sim, config.speed, script, duration_ms)
}

/// As [`run_headless`], for a simulation built by the caller.
pub fn drive(mut sim: Simulation, speed: f64, script: &ButtonScript, duration_ms: u64) -> Result<RunOutput, SimError> {
    if let Some(at_ms) = script.last_ms().filter(|&t| t > duration_ms) {
        return Err(ScriptError::BeyondDuration { at_ms, duration_ms }.into());
    }
    let pacer = Pacer {
        speed,
        started: Instant::now(),
    };
    for ev in script.events() {
        advance_paced(&mut sim, ev.at_ms, &pacer)?;
        sim.button(ev.button, ev.edge)?;
    }
    advance_paced(&mut sim, duration_ms, &pacer)?;
    sim.settle()?;
    Ok(RunOutput {
        final_frame: sim.current_frame(),
        frames: sim.take_frames(),
        duration_ms,
    })
}
