//! Virtual-time simulator for the Bangla digit clock.
//!
//! A [`Simulation`] pairs a firmware engine (the native state machine or
//! interpreted BASIC) with a display driver that keeps the LCD's CGRAM and
//! DDRAM up to date, and logs a [`Frame`] whenever the picture changes.
//! [`run_headless`] drives one from a button script; [`service`] exposes
//! one over HTTP and WebSocket.

pub mod config;
pub mod display;
pub mod engine;
pub mod error;
pub mod frame;
pub mod script;
pub mod service;
pub mod sim;

pub use config::{Firmware, FirmwareImage, SimConfig, SHIPPED_FIRMWARE};
pub use display::{ten_digit_screen, Display};
pub use error::{FirmwareError, SimError};
pub use frame::Frame;
pub use script::{ButtonScript, ScriptError};
pub use sim::{drive, run_headless, RunOutput, Simulation};
