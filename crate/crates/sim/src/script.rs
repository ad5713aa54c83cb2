//! Button scripts: `<at_ms> <set|inc|dec> <down|up>` per line, `#` comments.

use std::fmt;
use std::str::FromStr;

use clock_core::{Button, ButtonEvent, Edge};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: time {at_ms} is earlier than the previous entry at {previous}")]
    OutOfOrder { line: usize, at_ms: u64, previous: u64 },
    #[error("line {line}: {button} {edge} does not alternate with the previous {button} entry")]
    Alternation { line: usize, button: Button, edge: Edge },
    #[error("entry at {at_ms} ms is past the run duration of {duration_ms} ms")]
    BeyondDuration { at_ms: u64, duration_ms: u64 },
}

/// A validated, time-ordered list of button edges. Each button alternates
/// down/up starting with down; a script may end with a button still held.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ButtonScript {
    events: Vec<ButtonEvent>,
}

impl ButtonScript {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_events(events: Vec<ButtonEvent>) -> Result<Self, ScriptError> {
        let mut held = [false; 3];
        let mut previous = 0;
        for (i, ev) in events.iter().enumerate() {
            let line = i + 1;
            if ev.at_ms < previous {
                return Err(ScriptError::OutOfOrder { line, at_ms: ev.at_ms, previous });
            }
            previous = ev.at_ms;
            let h = &mut held[ev.button.index()];
            if *h != (ev.edge == Edge::Release) {
                return Err(ScriptError::Alternation { line, button: ev.button, edge: ev.edge });
            }
            *h = !*h;
        }
        Ok(ButtonScript { events })
    }

    pub fn parse(text: &str) -> Result<Self, ScriptError> {
        let mut events = Vec::new();
        let mut lines = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let syntax = |message: String| ScriptError::Syntax { line, message };
            let fields: Vec<&str> = content.split_whitespace().collect();
            let [at, button, action] = fields.as_slice() else {
                return Err(syntax(format!("expected '<at_ms> <button> <down|up>', found '{content}'")));
            };
            let at_ms = at
                .parse::<u64>()
                .map_err(|_| syntax(format!("bad time '{at}'")))?;
            let button = Button::from_str(button).map_err(|e| syntax(e.to_string()))?;
            let edge = match *action {
                "down" => Edge::Press,
                "up" => Edge::Release,
                other => return Err(syntax(format!("bad action '{other}' (expected down or up)"))),
            };
            events.push(ButtonEvent { button, edge, at_ms });
            lines.push(line);
        }
        // Report validation errors against source line numbers.
        Self::from_events(events).map_err(|e| match e {
            ScriptError::OutOfOrder { line, at_ms, previous } => ScriptError::OutOfOrder {
                line: lines[line - 1],
                at_ms,
                previous,
            },
            ScriptError::Alternation { line, button, edge } => ScriptError::Alternation {
                line: lines[line - 1],
                button,
                edge,
            },
            other => other,
        })
    }

    pub fn events(&self) -> &[ButtonEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn last_ms(&self) -> Option<u64> {
        self.events.last().map(|e| e.at_ms)
    }
}

impl fmt::Display for ButtonScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ev in &self.events {
            let action = match ev.edge {
                Edge::Press => "down",
                Edge::Release => "up",
            };
            writeln!(f, "{} {} {}", ev.at_ms, ev.button, action)?;
        }
        Ok(())
    }
}
