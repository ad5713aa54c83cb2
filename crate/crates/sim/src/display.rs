//! Drives the simulated LCD the way the clock firmware would: 4-bit init,
//! CGRAM reprogrammed only when residency changes, eight clock cells at
//! the start of the first row.

use clock_core::glyphs::{compose_display, program_cgram, required_digits, GlyphSet, Layout, ResidencyError, SlotMap};
use clock_core::lcd::{self, cmd, LcdState, LcdWrite, PixelCell, Screen};
use clock_core::TimeOfDay;

/// DDRAM address of the first clock cell.
pub const CLOCK_ADDR: u8 = 0x00;

#[derive(Debug, Clone)]
pub struct Display {
    lcd: LcdState,
    slots: SlotMap,
    glyphs: GlyphSet,
    layout: Layout,
    cgram_loads: u64,
}

impl Display {
    pub fn new(glyphs: GlyphSet, layout: Layout) -> Self {
        let mut lcd = LcdState::reset();
        lcd::init_4bit(&mut lcd).expect("init on a fresh controller");
        Display {
            lcd,
            slots: SlotMap::new(),
            glyphs,
            layout,
            cgram_loads: 0,
        }
    }

    pub fn lcd(&self) -> &LcdState {
        &self.lcd
    }

    pub fn slots(&self) -> &SlotMap {
        &self.slots
    }

    pub fn glyphs(&self) -> &GlyphSet {
        &self.glyphs
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    /// Number of CGRAM slot programs issued so far.
    pub fn cgram_loads(&self) -> u64 {
        self.cgram_loads
    }

    fn send(&mut self, write: LcdWrite) {
        self.lcd
            .bus_write_byte(write)
            .expect("whole-byte transfers never leave a nibble pending");
    }

    pub fn show(&mut self, time: TimeOfDay) -> Result<(), ResidencyError> {
        let loads = self.slots.ensure_resident(&required_digits(time))?;
        self.cgram_loads += loads.len() as u64;
        for w in program_cgram(&loads, &self.glyphs) {
            self.send(w);
        }
        let codes = compose_display(time, &self.slots, self.layout)?;
        let base = usize::from(CLOCK_ADDR);
        if self.lcd.ddram()[base..base + codes.len()] != codes {
            self.send(LcdWrite::command(cmd::SET_DDRAM_ADDR | CLOCK_ADDR));
            for code in codes {
                self.send(LcdWrite::data(code));
            }
        }
        Ok(())
    }
}

/// The ten digit glyphs side by side on the first row, as an LCD designer
/// preview would show them. Ten glyphs do not fit in eight CGRAM slots, so
/// this is drawn straight from the glyph set rather than through a controller.
pub fn ten_digit_screen(glyphs: &GlyphSet) -> Screen {
    let mut screen = Screen::blank();
    for digit in clock_core::glyphs::Digit::ALL {
        screen.cells[0][usize::from(digit.value())] = PixelCell::from_rows(glyphs.get(digit).rows());
    }
    screen
}
