use std::fs;
use std::path::PathBuf;

use clock_basic::{compile, Program};
use clock_core::glyphs::{parse_glyph_asset, GlyphSet, Layout, ParseOptions};
use clock_core::TimeOfDay;
use serde::{Deserialize, Serialize};

use crate::error::{FirmwareError, SimError};

/// The BASIC clock firmware shipped with the simulator.
pub const SHIPPED_FIRMWARE: &str = include_str!("../firmware/clock.bas");

/// BASIC firmware counts time in whole scans and ticks at most once per
/// scan, so a scan may not be longer than a second.
pub const MAX_BASIC_SCAN_MS: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Firmware {
    Native,
    /// The built-in `clock.bas`.
    ShippedBasic,
    BasicFile(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub firmware: Firmware,
    /// `None` selects the built-in glyph asset.
    pub glyph_asset: Option<PathBuf>,
    pub layout: Layout,
    /// Virtual milliseconds per wall millisecond; 0 runs unpaced.
    pub speed: f64,
    pub freeze_while_adjusting: bool,
    pub scan_ms: u64,
    pub start_time: TimeOfDay,
    /// Emit a frame for every virtual millisecond, changed or not.
    pub every_frame: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            firmware: Firmware::Native,
            glyph_asset: None,
            layout: Layout::Hms,
            speed: 0.0,
            freeze_while_adjusting: true,
            scan_ms: 100,
            start_time: TimeOfDay::MIDNIGHT,
            every_frame: false,
        }
    }
}

/// Firmware ready to run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FirmwareImage {
    Native,
    Basic(Program),
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.speed.is_finite() && self.speed >= 0.0) {
            return Err(SimError::Config(format!("speed must be a finite number >= 0, got {}", self.speed)));
        }
        if self.scan_ms == 0 {
            return Err(SimError::Config("scan_ms must be at least 1".into()));
        }
        if self.firmware != Firmware::Native {
            if self.scan_ms > MAX_BASIC_SCAN_MS {
                return Err(SimError::Config(format!(
                    "BASIC firmware needs scan_ms <= {MAX_BASIC_SCAN_MS}, got {}",
                    self.scan_ms
                )));
            }
            if !self.freeze_while_adjusting {
                return Err(SimError::Config(
                    "BASIC firmware always freezes while adjusting; keep-ticking needs native firmware".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn load_glyphs(&self) -> Result<GlyphSet, SimError> {
        let Some(path) = &self.glyph_asset else {
            return Ok(GlyphSet::shipped());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| SimError::Config(format!("cannot read glyph asset {}: {e}", path.display())))?;
        parse_glyph_asset(&text, ParseOptions::default()).map_err(|source| SimError::GlyphAsset {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load_firmware(&self) -> Result<FirmwareImage, SimError> {
        let source = match &self.firmware {
            Firmware::Native => return Ok(FirmwareImage::Native),
            Firmware::ShippedBasic => SHIPPED_FIRMWARE.to_string(),
            Firmware::BasicFile(path) => fs::read_to_string(path)
                .map_err(|e| SimError::Config(format!("cannot read firmware {}: {e}", path.display())))?,
        };
        let program = compile(&source).map_err(FirmwareError::from)?;
        Ok(FirmwareImage::Basic(program))
    }
}
