//! Write-only model of a 16x2 HD44780-style character LCD.
//!
//! The controller is driven either with whole bytes ([`LcdState::command`],
//! [`LcdState::write_data`]) or through the 4-bit bus ([`LcdState::bus_write`])
//! that the clock board wires to P1.7..P1.4. R/W is grounded on the board,
//! so there is no read path and no busy flag; every operation completes
//! instantly.

mod font;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const ROWS: usize = 2;
pub const COLS: usize = 16;
pub const DDRAM_SIZE: usize = 80;
pub const CGRAM_SIZE: usize = 64;
pub const CELL_ROWS: usize = 8;
pub const CELL_COLS: usize = 5;
pub const BLANK: u8 = 0x20;

/// Start address of each display line in DDRAM.
pub const LINE_BASE: [u8; ROWS] = [0x00, 0x40];
const LINE_LEN: u8 = 0x28;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum LcdError {
    #[error("byte transfer attempted while a 4-bit nibble is pending")]
    MidTransfer,
    #[error("RS changed between the two nibbles of one byte")]
    RsMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AddressTarget {
    Ddram,
    Cgram,
}

/// Register select line: instruction register or data register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegisterSelect {
    Command,
    Data,
}

impl RegisterSelect {
    pub fn from_bit(rs: bool) -> Self {
        if rs {
            RegisterSelect::Data
        } else {
            RegisterSelect::Command
        }
    }

    pub fn bit(self) -> bool {
        self == RegisterSelect::Data
    }
}

/// One byte-level transfer to the controller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LcdWrite {
    pub rs: RegisterSelect,
    pub byte: u8,
}

impl LcdWrite {
    pub const fn command(byte: u8) -> Self {
        LcdWrite {
            rs: RegisterSelect::Command,
            byte,
        }
    }

    pub const fn data(byte: u8) -> Self {
        LcdWrite {
            rs: RegisterSelect::Data,
            byte,
        }
    }

    /// High nibble first, as clocked onto D7..D4.
    pub fn nibbles(self) -> [u8; 2] {
        [self.byte >> 4, self.byte & 0x0F]
    }
}

pub mod cmd {
    pub const CLEAR: u8 = 0x01;
    pub const HOME: u8 = 0x02;
    pub const ENTRY_MODE: u8 = 0x04;
    pub const DISPLAY_CONTROL: u8 = 0x08;
    pub const SHIFT: u8 = 0x10;
    pub const FUNCTION_SET: u8 = 0x20;
    pub const SET_CGRAM_ADDR: u8 = 0x40;
    pub const SET_DDRAM_ADDR: u8 = 0x80;
}

/// Controller state: display memory, character generator RAM and mode flags.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LcdState {
    ddram: [u8; DDRAM_SIZE],
    cgram: [u8; CGRAM_SIZE],
    addr_counter: u8,
    target: AddressTarget,
    display_on: bool,
    cursor_on: bool,
    blink_on: bool,
    entry_increment: bool,
    entry_shift: bool,
    two_line_mode: bool,
    tall_font: bool,
    four_bit_mode: bool,
    nibble_latch: Option<(RegisterSelect, u8)>,
    unsupported_commands: u32,
}

impl Default for LcdState {
    fn default() -> Self {
        Self::reset()
    }
}

impl LcdState {
    /// Power-on state: display off, blank DDRAM, zeroed CGRAM, 8-bit bus.
    pub fn reset() -> Self {
        LcdState {
            ddram: [BLANK; DDRAM_SIZE],
            cgram: [0; CGRAM_SIZE],
            addr_counter: 0,
            target: AddressTarget::Ddram,
            display_on: false,
            cursor_on: false,
            blink_on: false,
            entry_increment: true,
            entry_shift: false,
            two_line_mode: false,
            tall_font: false,
            four_bit_mode: false,
            nibble_latch: None,
            unsupported_commands: 0,
        }
    }

    pub fn ddram(&self) -> &[u8; DDRAM_SIZE] {
        &self.ddram
    }

    pub fn cgram(&self) -> &[u8; CGRAM_SIZE] {
        &self.cgram
    }

    pub fn addr_counter(&self) -> u8 {
        self.addr_counter
    }

    pub fn target(&self) -> AddressTarget {
        self.target
    }

    pub fn display_on(&self) -> bool {
        self.display_on
    }

    pub fn cursor_on(&self) -> bool {
        self.cursor_on
    }

    pub fn blink_on(&self) -> bool {
        self.blink_on
    }

    pub fn entry_increment(&self) -> bool {
        self.entry_increment
    }

    pub fn two_line_mode(&self) -> bool {
        self.two_line_mode
    }

    pub fn four_bit_mode(&self) -> bool {
        self.four_bit_mode
    }

    pub fn nibble_pending(&self) -> bool {
        self.nibble_latch.is_some()
    }

    /// Number of commands accepted as no-ops (display/cursor shift, 0x00).
    pub fn unsupported_commands(&self) -> u32 {
        self.unsupported_commands
    }

    /// Character code stored at a visible cell.
    pub fn code_at(&self, row: usize, col: usize) -> u8 {
        assert!(row < ROWS && col < COLS, "cell ({row},{col}) off screen");
        self.ddram[ddram_index(LINE_BASE[row] + col as u8).expect("visible cell")]
    }

    /// The 2x16 visible character codes.
    pub fn visible_codes(&self) -> [[u8; COLS]; ROWS] {
        let mut codes = [[BLANK; COLS]; ROWS];
        for (row, line) in codes.iter_mut().enumerate() {
            for (col, code) in line.iter_mut().enumerate() {
                *code = self.code_at(row, col);
            }
        }
        codes
    }

    pub fn command(&mut self, byte: u8) -> Result<(), LcdError> {
        if self.nibble_latch.is_some() {
            return Err(LcdError::MidTransfer);
        }
        self.exec_command(byte);
        Ok(())
    }

    pub fn write_data(&mut self, byte: u8) -> Result<(), LcdError> {
        if self.nibble_latch.is_some() {
            return Err(LcdError::MidTransfer);
        }
        self.exec_data(byte);
        Ok(())
    }

    pub fn apply(&mut self, write: LcdWrite) -> Result<(), LcdError> {
        match write.rs {
            RegisterSelect::Command => self.command(write.byte),
            RegisterSelect::Data => self.write_data(write.byte),
        }
    }

    /// One enable pulse on the D7..D4 lines.
    ///
    /// In 4-bit mode the first pulse latches the high nibble and the second
    /// completes the byte. In 8-bit mode (before the init sequence switches
    /// the bus) each pulse is a whole byte with D3..D0 reading low, which is
    /// what makes the standard `3, 3, 3, 2` wake-up sequence work.
    pub fn bus_write(&mut self, rs: RegisterSelect, nibble: u8) -> Result<(), LcdError> {
        let nibble = nibble & 0x0F;
        if !self.four_bit_mode {
            self.dispatch(rs, nibble << 4);
            return Ok(());
        }
        match self.nibble_latch {
            None => {
                self.nibble_latch = Some((rs, nibble));
                Ok(())
            }
            Some((latched_rs, _)) if latched_rs != rs => Err(LcdError::RsMismatch),
            Some((_, high)) => {
                self.nibble_latch = None;
                self.dispatch(rs, high << 4 | nibble);
                Ok(())
            }
        }
    }

    /// Sends a whole byte as two bus pulses. Requires 4-bit mode.
    pub fn bus_write_byte(&mut self, write: LcdWrite) -> Result<(), LcdError> {
        debug_assert!(self.four_bit_mode, "byte split on an 8-bit bus");
        let [high, low] = write.nibbles();
        self.bus_write(write.rs, high)?;
        self.bus_write(write.rs, low)
    }

    fn dispatch(&mut self, rs: RegisterSelect, byte: u8) {
        match rs {
            RegisterSelect::Command => self.exec_command(byte),
            RegisterSelect::Data => self.exec_data(byte),
        }
    }

    fn exec_command(&mut self, byte: u8) {
        if byte & cmd::SET_DDRAM_ADDR != 0 {
            self.target = AddressTarget::Ddram;
            self.addr_counter = normalize_ddram_addr(byte & 0x7F);
        } else if byte & cmd::SET_CGRAM_ADDR != 0 {
            self.target = AddressTarget::Cgram;
            self.addr_counter = byte & 0x3F;
        } else if byte & cmd::FUNCTION_SET != 0 {
            self.four_bit_mode = byte & 0x10 == 0;
            self.two_line_mode = byte & 0x08 != 0;
            self.tall_font = byte & 0x04 != 0;
        } else if byte & cmd::SHIFT != 0 {
            self.unsupported_commands += 1;
        } else if byte & cmd::DISPLAY_CONTROL != 0 {
            self.display_on = byte & 0x04 != 0;
            self.cursor_on = byte & 0x02 != 0;
            self.blink_on = byte & 0x01 != 0;
        } else if byte & cmd::ENTRY_MODE != 0 {
            self.entry_increment = byte & 0x02 != 0;
            self.entry_shift = byte & 0x01 != 0;
        } else if byte & cmd::HOME != 0 {
            self.target = AddressTarget::Ddram;
            self.addr_counter = 0;
        } else if byte == cmd::CLEAR {
            self.ddram = [BLANK; DDRAM_SIZE];
            self.target = AddressTarget::Ddram;
            self.addr_counter = 0;
        } else {
            self.unsupported_commands += 1;
        }
    }

    fn exec_data(&mut self, byte: u8) {
        let addr = self.addr_counter;
        match self.target {
            AddressTarget::Ddram => {
                let index = ddram_index(addr).expect("address counter kept in range");
                self.ddram[index] = byte;
                self.addr_counter = if self.entry_increment {
                    next_ddram_addr(addr)
                } else {
                    prev_ddram_addr(addr)
                };
            }
            AddressTarget::Cgram => {
                self.cgram[usize::from(addr)] = byte & 0x1F;
                self.addr_counter = if self.entry_increment {
                    (addr + 1) & 0x3F
                } else {
                    addr.wrapping_sub(1) & 0x3F
                };
            }
        }
    }

    /// Pixel pattern shown at a visible cell.
    pub fn render_cell(&self, row: usize, col: usize) -> PixelCell {
        if !self.display_on {
            return PixelCell::BLANK;
        }
        glyph_for_code(self.code_at(row, col), &self.cgram)
    }

    pub fn render_screen(&self) -> Screen {
        let mut screen = Screen::blank();
        for row in 0..ROWS {
            for col in 0..COLS {
                screen.cells[row][col] = self.render_cell(row, col);
            }
        }
        screen
    }
}

/// Resolves a character code to pixels: CGRAM for 0x00..0x07, the built-in
/// font for printable ASCII, blank for everything else.
pub fn glyph_for_code(code: u8, cgram: &[u8; CGRAM_SIZE]) -> PixelCell {
    match code {
        0x00..=0x07 => {
            let base = usize::from(code & 0x07) * CELL_ROWS;
            let mut rows = [0u8; CELL_ROWS];
            rows.copy_from_slice(&cgram[base..base + CELL_ROWS]);
            PixelCell::from_rows(rows)
        }
        _ => font::rows(code).map_or(PixelCell::BLANK, PixelCell::from_rows),
    }
}

/// DDRAM byte index for a controller address, if the address exists.
pub fn ddram_index(addr: u8) -> Option<usize> {
    match addr {
        0x00..=0x27 => Some(usize::from(addr)),
        0x40..=0x67 => Some(usize::from(addr - 0x40) + usize::from(LINE_LEN)),
        _ => None,
    }
}

fn normalize_ddram_addr(addr: u8) -> u8 {
    match addr {
        0x00..=0x27 | 0x40..=0x67 => addr,
        0x28..=0x3F => 0x40,
        _ => 0x00,
    }
}

fn next_ddram_addr(addr: u8) -> u8 {
    match addr {
        0x27 => 0x40,
        0x67 => 0x00,
        _ => addr + 1,
    }
}

fn prev_ddram_addr(addr: u8) -> u8 {
    match addr {
        0x00 => 0x67,
        0x40 => 0x27,
        _ => addr - 1,
    }
}

/// 8 rows x 5 columns of pixels; bit 4 of each row byte is the leftmost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PixelCell {
    rows: [u8; CELL_ROWS],
}

impl PixelCell {
    pub const BLANK: PixelCell = PixelCell {
        rows: [0; CELL_ROWS],
    };

    pub fn from_rows(rows: [u8; CELL_ROWS]) -> Self {
        PixelCell {
            rows: rows.map(|r| r & 0x1F),
        }
    }

    pub fn rows(&self) -> [u8; CELL_ROWS] {
        self.rows
    }

    pub fn pixel(&self, row: usize, col: usize) -> bool {
        assert!(row < CELL_ROWS && col < CELL_COLS);
        self.rows[row] & (0x10 >> col) != 0
    }

    pub fn lit_count(&self) -> u32 {
        self.rows.iter().map(|r| r.count_ones()).sum()
    }
}

/// A rendered 2x16 grid of cells.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Screen {
    pub cells: [[PixelCell; COLS]; ROWS],
}

impl Screen {
    pub fn blank() -> Self {
        Screen {
            cells: [[PixelCell::BLANK; COLS]; ROWS],
        }
    }

    pub const PIXEL_WIDTH: usize = COLS * CELL_COLS;
    pub const PIXEL_HEIGHT: usize = ROWS * CELL_ROWS;

    /// Pixel at screen coordinates with no inter-cell gaps.
    pub fn pixel(&self, y: usize, x: usize) -> bool {
        self.cells[y / CELL_ROWS][x / CELL_COLS].pixel(y % CELL_ROWS, x % CELL_COLS)
    }

    /// Row-major bitmask of the 16x80 pixel grid, most significant bit first.
    pub fn packed_bits(&self) -> Vec<u8> {
        let mut out = vec![0u8; Self::PIXEL_WIDTH * Self::PIXEL_HEIGHT / 8];
        for y in 0..Self::PIXEL_HEIGHT {
            for x in 0..Self::PIXEL_WIDTH {
                if self.pixel(y, x) {
                    let bit = y * Self::PIXEL_WIDTH + x;
                    out[bit / 8] |= 0x80 >> (bit % 8);
                }
            }
        }
        out
    }

    /// ASCII art: '#' on, '.' off, one space between cells, an empty line
    /// between the two LCD rows, LF line endings.
    pub fn to_ascii(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Screen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (r, line) in self.cells.iter().enumerate() {
            if r > 0 {
                f.write_str("\n")?;
            }
            for pixel_row in 0..CELL_ROWS {
                for (c, cell) in line.iter().enumerate() {
                    if c > 0 {
                        f.write_str(" ")?;
                    }
                    for pixel_col in 0..CELL_COLS {
                        let ch = if cell.pixel(pixel_row, pixel_col) { '#' } else { '.' };
                        write!(f, "{ch}")?;
                    }
                }
                f.write_str("\n")?;
            }
        }
        Ok(())
    }
}

/// The 4-bit wake-up and configuration sequence: three 8-bit function sets,
/// a switch to 4 bits, then 2-line mode, display on, increment, clear.
pub fn init_4bit(lcd: &mut LcdState) -> Result<(), LcdError> {
    for nibble in [0x3, 0x3, 0x3, 0x2] {
        lcd.bus_write(RegisterSelect::Command, nibble)?;
    }
    for byte in [0x28, 0x0C, 0x06, cmd::CLEAR] {
        lcd.bus_write_byte(LcdWrite::command(byte))?;
    }
    Ok(())
}
