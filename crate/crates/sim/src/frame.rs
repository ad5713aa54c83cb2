use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;
use clock_core::lcd::{self, CGRAM_SIZE, COLS, ROWS};
use clock_core::{AdjustMode, Screen, TimeOfDay};
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::display::Display;

/// What the LCD shows at one instant of virtual time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub virtual_ms: u64,
    pub time: TimeOfDay,
    pub mode: AdjustMode,
    pub cells: [[u8; COLS]; ROWS],
    /// CGRAM the cells were rendered through.
    pub cgram: [u8; CGRAM_SIZE],
    pub pixels: Screen,
}

impl Frame {
    pub fn capture(virtual_ms: u64, time: TimeOfDay, mode: AdjustMode, display: &Display) -> Self {
        let lcd = display.lcd();
        Frame {
            virtual_ms,
            time,
            mode,
            cells: lcd.visible_codes(),
            cgram: *lcd.cgram(),
            pixels: lcd.render_screen(),
        }
    }

    /// Same picture and mode, regardless of timestamp.
    pub fn same_display(&self, other: &Frame) -> bool {
        self.mode == other.mode && self.cells == other.cells && self.pixels == other.pixels
    }

    /// Re-renders the cells through the frame's CGRAM.
    pub fn rerender(&self) -> Screen {
        let mut screen = Screen::blank();
        for (r, row) in self.cells.iter().enumerate() {
            for (c, &code) in row.iter().enumerate() {
                screen.cells[r][c] = lcd::glyph_for_code(code, &self.cgram);
            }
        }
        screen
    }

    pub fn ascii(&self) -> String {
        self.pixels.to_ascii()
    }

    pub fn pixels_base64(&self) -> String {
        STANDARD.encode(self.pixels.packed_bits())
    }

    /// Header line `T=<ms> <hh:mm:ss> mode=<mode>` followed by the ASCII art.
    pub fn snapshot(&self) -> String {
        format!("T={} {} mode={}\n{}", self.virtual_ms, self.time, self.mode, self.ascii())
    }

    pub fn with_time_stamp(&self, virtual_ms: u64) -> Frame {
        Frame {
            virtual_ms,
            ..self.clone()
        }
    }
}

impl Serialize for Frame {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Frame", 6)?;
        s.serialize_field("virtual_ms", &self.virtual_ms)?;
        s.serialize_field("time", &self.time)?;
        s.serialize_field("mode", &self.mode)?;
        s.serialize_field("cells", &self.cells)?;
        s.serialize_field("pixels", &self.pixels_base64())?;
        s.serialize_field("ascii", &self.ascii())?;
        s.end()
    }
}
