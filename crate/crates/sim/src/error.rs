use clock_basic::BasicError;
use clock_core::glyphs::{GlyphAssetError, ResidencyError};
use clock_core::ClockError;
use thiserror::Error;

use crate::script::ScriptError;

#[derive(Debug, Error)]
pub enum FirmwareError {
    #[error(transparent)]
    Basic(#[from] BasicError),
    #[error("firmware left the time at {hh}:{mm}:{ss}, which is not a time of day")]
    BadTime { hh: i16, mm: i16, ss: i16 },
    #[error("firmware set Mode to {0}; expected 0 to 3")]
    BadMode(i16),
    #[error("display: {0}")]
    Display(#[from] ResidencyError),
    #[error("interpreter thread stopped unexpectedly")]
    Disconnected,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("config: {0}")]
    Config(String),
    #[error("glyph asset {path}: {source}")]
    GlyphAsset { path: String, source: GlyphAssetError },
    #[error("script: {0}")]
    Script(#[from] ScriptError),
    #[error("firmware: {0}")]
    Firmware(#[from] FirmwareError),
    #[error(transparent)]
    Button(#[from] ClockError),
    #[error("port {0} is already in use")]
    PortInUse(u16),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl SimError {
    /// Process exit status for the CLI.
    pub fn exit_code(&self) -> u8 {
        match self {
            SimError::Firmware(_) => 3,
            SimError::Io(_) => 1,
            _ => 2,
        }
    }
}
