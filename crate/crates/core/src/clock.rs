//! Native clock firmware: once-a-second counting and the SET / INCREMENT /
//! DECREMENT adjustment cycle.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MS_PER_SECOND: u64 = 1000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClockError {
    #[error("event at {got} ms precedes previous event at {last} ms")]
    OutOfOrder { last: u64, got: u64 },
    #[error("{button} {edge} breaks press/release alternation")]
    ProtocolViolation { button: Button, edge: Edge },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid time of day: {0}")]
pub struct ParseTimeError(String);

/// Hours, minutes and seconds of a 24-hour clock.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TimeOfDay {
    hh: u8,
    mm: u8,
    ss: u8,
}

impl TimeOfDay {
    pub const MIDNIGHT: TimeOfDay = TimeOfDay { hh: 0, mm: 0, ss: 0 };

    pub fn new(hh: u8, mm: u8, ss: u8) -> Option<Self> {
        (hh < 24 && mm < 60 && ss < 60).then_some(TimeOfDay { hh, mm, ss })
    }

    pub fn hh(self) -> u8 {
        self.hh
    }

    pub fn mm(self) -> u8 {
        self.mm
    }

    pub fn ss(self) -> u8 {
        self.ss
    }

    /// One second later, with seconds carrying into minutes and minutes into
    /// hours; hour 24 wraps to 0.
    pub fn tick_second(self) -> Self {
        let mut t = self;
        t.ss += 1;
        if t.ss > 59 {
            t.ss = 0;
            t.mm += 1;
            if t.mm > 59 {
                t.mm = 0;
                t.hh += 1;
                if t.hh > 23 {
                    t.hh = 0;
                }
            }
        }
        t
    }

    /// The six displayed digits, most significant first: H1 H0 M1 M0 S1 S0.
    pub fn digits(self) -> [u8; 6] {
        [
            self.hh / 10,
            self.hh % 10,
            self.mm / 10,
            self.mm % 10,
            self.ss / 10,
            self.ss % 10,
        ]
    }

    fn with_field(self, field: Field, value: u8) -> Self {
        let mut t = self;
        match field {
            Field::Hour => t.hh = value,
            Field::Minute => t.mm = value,
            Field::Second => t.ss = value,
        }
        t
    }

    fn field(self, field: Field) -> u8 {
        match field {
            Field::Hour => self.hh,
            Field::Minute => self.mm,
            Field::Second => self.ss,
        }
    }
}

impl fmt::Display for TimeOfDay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}:{:02}:{:02}", self.hh, self.mm, self.ss)
    }
}

impl FromStr for TimeOfDay {
    type Err = ParseTimeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseTimeError(s.to_string());
        let mut parts = s.split(':');
        let mut next = || -> Result<u8, ParseTimeError> {
            let part = parts.next().ok_or_else(err)?;
            if part.len() != 2 || !part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            part.parse().map_err(|_| err())
        };
        let (hh, mm, ss) = (next()?, next()?, next()?);
        if parts.next().is_some() {
            return Err(err());
        }
        TimeOfDay::new(hh, mm, ss).ok_or_else(err)
    }
}

impl Serialize for TimeOfDay {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TimeOfDay {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Steps a time field by one in signed arithmetic, then applies the
/// firmware's boundary fix-ups: `modulus` becomes 0 and -1 becomes
/// `modulus - 1`.
pub fn adjust_field(value: i16, delta: i16, modulus: i16) -> i16 {
    let mut v = value + delta;
    if v == modulus {
        v = 0;
    }
    if v == -1 {
        v = modulus - 1;
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Field {
    Hour,
    Minute,
    Second,
}

impl Field {
    fn modulus(self) -> i16 {
        match self {
            Field::Hour => 24,
            Field::Minute | Field::Second => 60,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdjustMode {
    #[default]
    Run,
    SetHour,
    SetMin,
    SetSec,
}

impl AdjustMode {
    pub fn next(self) -> Self {
        match self {
            AdjustMode::Run => AdjustMode::SetHour,
            AdjustMode::SetHour => AdjustMode::SetMin,
            AdjustMode::SetMin => AdjustMode::SetSec,
            AdjustMode::SetSec => AdjustMode::Run,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AdjustMode::Run => "run",
            AdjustMode::SetHour => "set_hour",
            AdjustMode::SetMin => "set_min",
            AdjustMode::SetSec => "set_sec",
        }
    }

    /// Index used by firmware that reports its mode as a number.
    pub fn from_index(index: i16) -> Option<Self> {
        match index {
            0 => Some(AdjustMode::Run),
            1 => Some(AdjustMode::SetHour),
            2 => Some(AdjustMode::SetMin),
            3 => Some(AdjustMode::SetSec),
            _ => None,
        }
    }

    fn field(self) -> Option<Field> {
        match self {
            AdjustMode::Run => None,
            AdjustMode::SetHour => Some(Field::Hour),
            AdjustMode::SetMin => Some(Field::Minute),
            AdjustMode::SetSec => Some(Field::Second),
        }
    }
}

impl fmt::Display for AdjustMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The three push buttons, wired active-low to P3.2, P3.1 and P3.0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Button {
    Set,
    Inc,
    Dec,
}

impl Button {
    pub const ALL: [Button; 3] = [Button::Set, Button::Inc, Button::Dec];

    /// Bit of port 3 the button pulls low.
    pub fn port3_bit(self) -> u8 {
        match self {
            Button::Set => 2,
            Button::Inc => 1,
            Button::Dec => 0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Button::Set => 0,
            Button::Inc => 1,
            Button::Dec => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Button::Set => "set",
            Button::Inc => "inc",
            Button::Dec => "dec",
        }
    }
}

impl fmt::Display for Button {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Button {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "set" => Ok(Button::Set),
            "inc" => Ok(Button::Inc),
            "dec" => Ok(Button::Dec),
            other => Err(format!("unknown button '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Edge {
    Press,
    Release,
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Edge::Press => "press",
            Edge::Release => "release",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ButtonEvent {
    pub button: Button,
    pub edge: Edge,
    pub at_ms: u64,
}

impl ButtonEvent {
    pub fn press(button: Button, at_ms: u64) -> Self {
        ButtonEvent {
            button,
            edge: Edge::Press,
            at_ms,
        }
    }

    pub fn release(button: Button, at_ms: u64) -> Self {
        ButtonEvent {
            button,
            edge: Edge::Release,
            at_ms,
        }
    }
}

/// Counting and adjustment state of the clock.
///
/// While an adjustment mode is active the seconds counter is frozen unless
/// the FSM was built with [`ClockFsm::keep_ticking`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClockFsm {
    time: TimeOfDay,
    mode: AdjustMode,
    ms_accumulator: u64,
    freeze_while_adjusting: bool,
    held: [bool; 3],
    last_event_ms: u64,
}

impl Default for ClockFsm {
    fn default() -> Self {
        Self::new(TimeOfDay::MIDNIGHT)
    }
}

impl ClockFsm {
    pub fn new(time: TimeOfDay) -> Self {
        ClockFsm {
            time,
            mode: AdjustMode::Run,
            ms_accumulator: 0,
            freeze_while_adjusting: true,
            held: [false; 3],
            last_event_ms: 0,
        }
    }

    pub fn keep_ticking(mut self, keep: bool) -> Self {
        self.freeze_while_adjusting = !keep;
        self
    }

    pub fn time(&self) -> TimeOfDay {
        self.time
    }

    pub fn mode(&self) -> AdjustMode {
        self.mode
    }

    pub fn ms_accumulator(&self) -> u64 {
        self.ms_accumulator
    }

    pub fn is_held(&self, button: Button) -> bool {
        self.held[button.index()]
    }

    fn ticking(&self) -> bool {
        self.mode == AdjustMode::Run || !self.freeze_while_adjusting
    }

    /// Milliseconds until the next whole second, or `None` while frozen.
    pub fn ms_until_tick(&self) -> Option<u64> {
        self.ticking()
            .then(|| MS_PER_SECOND - self.ms_accumulator)
    }

    /// Moves virtual time forward, returning how many seconds ticked.
    pub fn advance(&mut self, dt_ms: u64) -> u64 {
        if !self.ticking() {
            return 0;
        }
        let total = self.ms_accumulator + dt_ms;
        let seconds = total / MS_PER_SECOND;
        self.ms_accumulator = total % MS_PER_SECOND;
        // A day has 86 400 ticks; anything beyond that only matters modulo a day.
        for _ in 0..seconds % 86_400 {
            self.time = self.time.tick_second();
        }
        seconds
    }

    pub fn on_button(&mut self, ev: ButtonEvent) -> Result<(), ClockError> {
        if ev.at_ms < self.last_event_ms {
            return Err(ClockError::OutOfOrder {
                last: self.last_event_ms,
                got: ev.at_ms,
            });
        }
        let held = &mut self.held[ev.button.index()];
        match (ev.edge, *held) {
            (Edge::Press, false) => *held = true,
            (Edge::Release, true) => *held = false,
            _ => {
                return Err(ClockError::ProtocolViolation {
                    button: ev.button,
                    edge: ev.edge,
                })
            }
        }
        self.last_event_ms = ev.at_ms;
        if ev.edge == Edge::Release {
            return Ok(());
        }

        match (ev.button, self.mode.field()) {
            (Button::Set, _) => self.mode = self.mode.next(),
            (Button::Inc, Some(field)) => self.step_field(field, 1),
            (Button::Dec, Some(field)) => self.step_field(field, -1),
            (_, None) => {}
        }
        Ok(())
    }

    fn step_field(&mut self, field: Field, delta: i16) {
        let value = adjust_field(i16::from(self.time.field(field)), delta, field.modulus());
        let value = u8::try_from(value).expect("adjust_field stays in range");
        self.time = self.time.with_field(field, value);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(hh: u8, mm: u8, ss: u8) -> TimeOfDay {
        TimeOfDay::new(hh, mm, ss).unwrap()
    }

    fn press_release(fsm: &mut ClockFsm, button: Button, at: u64) {
        fsm.on_button(ButtonEvent::press(button, at)).unwrap();
        fsm.on_button(ButtonEvent::release(button, at + 1)).unwrap();
    }

    #[test]
    fn tick_cascades() {
        assert_eq!(t(0, 0, 0).tick_second(), t(0, 0, 1));
        assert_eq!(t(0, 59, 59).tick_second(), t(1, 0, 0));
        assert_eq!(t(23, 59, 59).tick_second(), t(0, 0, 0));
        assert_eq!(t(12, 34, 59).tick_second(), t(12, 35, 0));
    }

    #[test]
    fn adjust_field_fixups() {
        assert_eq!(adjust_field(23, 1, 24), 0);
        assert_eq!(adjust_field(0, -1, 24), 23);
        assert_eq!(adjust_field(0, -1, 60), 59);
        assert_eq!(adjust_field(59, 1, 60), 0);
        assert_eq!(adjust_field(30, 1, 60), 31);
        assert_eq!(adjust_field(30, -1, 60), 29);
    }

    #[test]
    fn time_parse_and_display() {
        assert_eq!("23:59:58".parse::<TimeOfDay>().unwrap(), t(23, 59, 58));
        assert_eq!(t(1, 2, 3).to_string(), "01:02:03");
        for bad in ["24:00:00", "1:00:00", "00:60:00", "00:00", "00:00:00:00", "aa:bb:cc"] {
            assert!(bad.parse::<TimeOfDay>().is_err(), "{bad}");
        }
    }

    #[test]
    fn set_enters_hour_mode() {
        let mut fsm = ClockFsm::default();
        fsm.on_button(ButtonEvent::press(Button::Set, 0)).unwrap();
        assert_eq!(fsm.mode(), AdjustMode::SetHour);
        assert_eq!(fsm.time(), TimeOfDay::MIDNIGHT);
    }

    #[test]
    fn inc_in_set_sec_wraps() {
        let mut fsm = ClockFsm::new(t(0, 0, 59));
        for i in 0..3 {
            press_release(&mut fsm, Button::Set, i * 10);
        }
        assert_eq!(fsm.mode(), AdjustMode::SetSec);
        press_release(&mut fsm, Button::Inc, 100);
        assert_eq!(fsm.time(), t(0, 0, 0));
    }

    #[test]
    fn release_is_noop() {
        let mut fsm = ClockFsm::default();
        fsm.on_button(ButtonEvent::press(Button::Set, 0)).unwrap();
        fsm.on_button(ButtonEvent::press(Button::Dec, 5)).unwrap();
        let before = fsm.time();
        fsm.on_button(ButtonEvent::release(Button::Dec, 6)).unwrap();
        assert_eq!(fsm.time(), before);
        assert_eq!(fsm.mode(), AdjustMode::SetHour);
    }

    #[test]
    fn inc_dec_ignored_in_run() {
        let mut fsm = ClockFsm::new(t(5, 5, 5));
        press_release(&mut fsm, Button::Inc, 0);
        press_release(&mut fsm, Button::Dec, 10);
        assert_eq!(fsm.time(), t(5, 5, 5));
        assert_eq!(fsm.mode(), AdjustMode::Run);
    }

    #[test]
    fn four_sets_cycle_back() {
        let mut fsm = ClockFsm::new(t(7, 8, 9));
        for i in 0..4 {
            press_release(&mut fsm, Button::Set, i * 10);
        }
        assert_eq!(fsm.mode(), AdjustMode::Run);
        assert_eq!(fsm.time(), t(7, 8, 9));
    }

    #[test]
    fn out_of_order_rejected() {
        let mut fsm = ClockFsm::default();
        fsm.on_button(ButtonEvent::press(Button::Set, 100)).unwrap();
        let err = fsm
            .on_button(ButtonEvent::release(Button::Set, 50))
            .unwrap_err();
        assert_eq!(err, ClockError::OutOfOrder { last: 100, got: 50 });
    }

    #[test]
    fn alternation_enforced() {
        let mut fsm = ClockFsm::default();
        assert!(matches!(
            fsm.on_button(ButtonEvent::release(Button::Inc, 0)),
            Err(ClockError::ProtocolViolation { .. })
        ));
        fsm.on_button(ButtonEvent::press(Button::Inc, 0)).unwrap();
        assert!(matches!(
            fsm.on_button(ButtonEvent::press(Button::Inc, 1)),
            Err(ClockError::ProtocolViolation { .. })
        ));
    }

    #[test]
    fn advance_counts_whole_seconds() {
        let mut fsm = ClockFsm::default();
        assert_eq!(fsm.advance(2500), 2);
        assert_eq!(fsm.time(), t(0, 0, 2));
        assert_eq!(fsm.ms_accumulator(), 500);
        assert_eq!(fsm.advance(500), 1);
        assert_eq!(fsm.ms_accumulator(), 0);
    }

    #[test]
    fn advance_frozen_while_adjusting() {
        let mut fsm = ClockFsm::new(t(1, 2, 3));
        fsm.advance(300);
        press_release(&mut fsm, Button::Set, 300);
        press_release(&mut fsm, Button::Set, 400);
        assert_eq!(fsm.mode(), AdjustMode::SetMin);
        assert_eq!(fsm.advance(10_000), 0);
        assert_eq!(fsm.time(), t(1, 2, 3));
        assert_eq!(fsm.ms_accumulator(), 300);
        assert_eq!(fsm.ms_until_tick(), None);
    }

    #[test]
    fn keep_ticking_flag() {
        let mut fsm = ClockFsm::default().keep_ticking(true);
        fsm.on_button(ButtonEvent::press(Button::Set, 0)).unwrap();
        assert_eq!(fsm.advance(3000), 3);
        assert_eq!(fsm.time(), t(0, 0, 3));
    }

    #[test]
    fn mode_names() {
        let names: Vec<_> = [
            AdjustMode::Run,
            AdjustMode::SetHour,
            AdjustMode::SetMin,
            AdjustMode::SetSec,
        ]
        .iter()
        .map(|m| m.to_string())
        .collect();
        assert_eq!(names, ["run", "set_hour", "set_min", "set_sec"]);
    }
}
