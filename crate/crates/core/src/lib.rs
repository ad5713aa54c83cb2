//! Hardware and firmware model of a 16x2 character-LCD clock that shows its
//! time with custom Bangla numeral glyphs.
//!
//! - [`lcd`]: byte- and nibble-level HD44780-style controller with pixel rendering
//! - [`glyphs`]: digit glyph asset, CGRAM slot residency and display composition
//! - [`clock`]: time counting and the button adjustment state machine

pub mod clock;
pub mod glyphs;
pub mod lcd;

pub use clock::{AdjustMode, Button, ButtonEvent, ClockError, ClockFsm, Edge, TimeOfDay};
pub use lcd::{LcdError, LcdState, LcdWrite, PixelCell, RegisterSelect, Screen};
