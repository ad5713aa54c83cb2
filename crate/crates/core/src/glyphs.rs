//! Bangla digit glyphs and their residency in the eight CGRAM slots.
//!
//! A clock face needs at most six distinct digits at once, but there are ten
//! digit glyphs and only eight slots, so glyphs are loaded on demand and
//! evicted least-recently-used.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clock::TimeOfDay;
use crate::lcd::{cmd, LcdWrite, CELL_COLS, CELL_ROWS};

/// The checked-in glyph asset for ০১২৩৪৫৬৭৮৯.
pub const SHIPPED_ASSET: &str = include_str!("../assets/bangla_digits.txt");

pub const SLOT_COUNT: usize = 8;
pub const COLON: u8 = b':';

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GlyphAssetError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: glyph rows must be exactly {CELL_COLS} pixels, glyphs exactly {CELL_ROWS} rows")]
    BadDimensions { line: usize },
    #[error("digit {0} has no glyph")]
    MissingDigit(u8),
    #[error("digit {0} is defined more than once")]
    DuplicateDigit(u8),
    #[error("digit {0} draws on the cursor row")]
    NonBlankCursorRow(u8),
    #[error("digit {0} glyph is blank")]
    BlankGlyph(u8),
    #[error("digits {0} and {1} have identical glyphs")]
    IdenticalGlyphs(u8, u8),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResidencyError {
    #[error("{0} distinct digits requested but only {SLOT_COUNT} CGRAM slots exist")]
    TooManyDigits(usize),
    #[error("digit {0} is not resident in CGRAM")]
    NotResident(Digit),
}

/// A decimal digit value, 0 through 9.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Digit(u8);

impl Digit {
    pub const ALL: [Digit; 10] = [
        Digit(0),
        Digit(1),
        Digit(2),
        Digit(3),
        Digit(4),
        Digit(5),
        Digit(6),
        Digit(7),
        Digit(8),
        Digit(9),
    ];

    pub fn new(value: u8) -> Option<Self> {
        (value < 10).then_some(Digit(value))
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

impl fmt::Display for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Eight 5-bit rows; bit 4 is the leftmost pixel, row 7 is the cursor line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Glyph {
    rows: [u8; CELL_ROWS],
}

impl Glyph {
    pub fn new(rows: [u8; CELL_ROWS]) -> Self {
        Glyph {
            rows: rows.map(|r| r & 0x1F),
        }
    }

    pub fn rows(&self) -> [u8; CELL_ROWS] {
        self.rows
    }

    pub fn is_blank(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Accept digit glyphs with no lit pixels.
    pub allow_blank: bool,
}

/// One glyph per digit, indexed by digit value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GlyphSet {
    glyphs: [Glyph; 10],
}

impl GlyphSet {
    pub fn shipped() -> Self {
        parse_glyph_asset(SHIPPED_ASSET, ParseOptions::default())
            .expect("shipped glyph asset is valid")
    }

    pub fn get(&self, digit: Digit) -> &Glyph {
        &self.glyphs[usize::from(digit.0)]
    }

    /// Serializes to the asset text format.
    pub fn to_asset(&self) -> String {
        let mut out = String::new();
        for (digit, glyph) in self.glyphs.iter().enumerate() {
            if digit > 0 {
                out.push('\n');
            }
            out.push_str(&format!("digit {digit}\n"));
            for row in glyph.rows {
                for col in 0..CELL_COLS {
                    out.push(if row & (0x10 >> col) != 0 { '#' } else { '.' });
                }
                out.push('\n');
            }
        }
        out
    }
}

/// Parses the glyph asset: ten `digit N` blocks of eight 5-character
/// `#`/`.` rows, blank lines between blocks ignored.
pub fn parse_glyph_asset(text: &str, options: ParseOptions) -> Result<GlyphSet, GlyphAssetError> {
    let mut found: [Option<Glyph>; 10] = [None; 10];
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).peekable();

    while let Some((line_no, line)) = lines.next() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let digit = parse_header(line).ok_or_else(|| GlyphAssetError::Syntax {
            line: line_no,
            message: format!("expected 'digit N' header, found '{line}'"),
        })?;

        let mut rows = [0u8; CELL_ROWS];
        for (r, row) in rows.iter_mut().enumerate() {
            let Some((row_line_no, row_line)) = lines.next() else {
                return Err(GlyphAssetError::BadDimensions { line: line_no + r + 1 });
            };
            *row = parse_row(row_line.trim_end_matches('\r'), row_line_no)?;
        }
        // A ninth pixel row means the block is too tall.
        if let Some((extra_no, extra)) = lines.peek() {
            if !extra.trim().is_empty() && parse_header(extra).is_none() {
                return Err(GlyphAssetError::BadDimensions { line: *extra_no });
            }
        }

        let glyph = Glyph::new(rows);
        if rows[CELL_ROWS - 1] != 0 {
            return Err(GlyphAssetError::NonBlankCursorRow(digit));
        }
        if glyph.is_blank() && !options.allow_blank {
            return Err(GlyphAssetError::BlankGlyph(digit));
        }
        let slot = &mut found[usize::from(digit)];
        if slot.is_some() {
            return Err(GlyphAssetError::DuplicateDigit(digit));
        }
        *slot = Some(glyph);
    }

    let mut glyphs = [Glyph::new([0; CELL_ROWS]); 10];
    for (digit, glyph) in found.iter().enumerate() {
        glyphs[digit] = glyph.ok_or(GlyphAssetError::MissingDigit(digit as u8))?;
    }
    for a in 0..10 {
        for b in a + 1..10 {
            if glyphs[a] == glyphs[b] {
                return Err(GlyphAssetError::IdenticalGlyphs(a as u8, b as u8));
            }
        }
    }
    Ok(GlyphSet { glyphs })
}

fn parse_header(line: &str) -> Option<u8> {
    let mut words = line.split_whitespace();
    if words.next()? != "digit" {
        return None;
    }
    let n = words.next()?;
    if words.next().is_some() || n.len() != 1 {
        return None;
    }
    n.parse().ok()
}

fn parse_row(line: &str, line_no: usize) -> Result<u8, GlyphAssetError> {
    if line.chars().count() != CELL_COLS {
        return Err(GlyphAssetError::BadDimensions { line: line_no });
    }
    let mut value = 0u8;
    for ch in line.chars() {
        value <<= 1;
        match ch {
            '#' => value |= 1,
            '.' => {}
            other => {
                return Err(GlyphAssetError::Syntax {
                    line: line_no,
                    message: format!("unexpected pixel character '{other}'"),
                })
            }
        }
    }
    Ok(value)
}

/// Distinct digits shown for a time.
pub fn required_digits(time: TimeOfDay) -> BTreeSet<Digit> {
    time.digits().iter().map(|&d| Digit(d)).collect()
}

/// A CGRAM slot that must be (re)programmed with a digit's glyph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SlotLoad {
    pub slot: u8,
    pub digit: Digit,
}

/// Which digit lives in which CGRAM slot, plus per-slot recency.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SlotMap {
    slots: [Option<Digit>; SLOT_COUNT],
    last_used: [u64; SLOT_COUNT],
    generation: u64,
}

impl SlotMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn slot_of(&self, digit: Digit) -> Option<u8> {
        self.slots
            .iter()
            .position(|&d| d == Some(digit))
            .map(|s| s as u8)
    }

    pub fn digit_in(&self, slot: u8) -> Option<Digit> {
        self.slots.get(usize::from(slot)).copied().flatten()
    }

    pub fn resident(&self) -> impl Iterator<Item = (u8, Digit)> + '_ {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(s, d)| d.map(|d| (s as u8, d)))
    }

    /// Slot the next load would take: a free slot if any, otherwise the
    /// least recently used slot outside `keep`, lowest index on ties.
    fn victim(&self, keep: &BTreeSet<Digit>) -> usize {
        if let Some(free) = self.slots.iter().position(Option::is_none) {
            return free;
        }
        (0..SLOT_COUNT)
            .filter(|&s| !keep.contains(&self.slots[s].expect("no free slots")))
            .min_by_key(|&s| (self.last_used[s], s))
            .expect("at most eight digits kept")
    }

    /// Makes every digit in `digits` resident. Digits already loaded keep
    /// their slot; the returned loads are exactly the newly assigned slots.
    pub fn ensure_resident(&mut self, digits: &BTreeSet<Digit>) -> Result<Vec<SlotLoad>, ResidencyError> {
        if digits.len() > SLOT_COUNT {
            return Err(ResidencyError::TooManyDigits(digits.len()));
        }
        self.generation += 1;
        let mut loads = Vec::new();
        for &digit in digits {
            let slot = match self.slot_of(digit) {
                Some(slot) => usize::from(slot),
                None => {
                    let slot = self.victim(digits);
                    self.slots[slot] = Some(digit);
                    loads.push(SlotLoad {
                        slot: slot as u8,
                        digit,
                    });
                    slot
                }
            };
            self.last_used[slot] = self.generation;
        }
        Ok(loads)
    }
}

/// LCD writes that program each load's glyph into CGRAM and then return
/// the address counter to DDRAM.
pub fn program_cgram(loads: &[SlotLoad], glyphs: &GlyphSet) -> Vec<LcdWrite> {
    if loads.is_empty() {
        return Vec::new();
    }
    let mut writes = Vec::with_capacity(loads.len() * (CELL_ROWS + 1) + 1);
    for load in loads {
        writes.push(LcdWrite::command(cmd::SET_CGRAM_ADDR | load.slot << 3));
        writes.extend(glyphs.get(load.digit).rows.iter().map(|&r| LcdWrite::data(r)));
    }
    writes.push(LcdWrite::command(cmd::SET_DDRAM_ADDR));
    writes
}

/// Order of the three fields across the eight clock cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    /// HH:MM:SS, hour leftmost.
    #[default]
    Hms,
    /// SS:MM:HH, second leftmost.
    Smh,
}

impl std::str::FromStr for Layout {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hms" => Ok(Layout::Hms),
            "smh" => Ok(Layout::Smh),
            other => Err(format!("unknown layout '{other}' (expected hms or smh)")),
        }
    }
}

/// Character codes for the eight clock cells.
pub fn compose_display(time: TimeOfDay, slots: &SlotMap, layout: Layout) -> Result<[u8; 8], ResidencyError> {
    let code = |d: u8| {
        let digit = Digit(d);
        slots.slot_of(digit).ok_or(ResidencyError::NotResident(digit))
    };
    let [h1, h0, m1, m0, s1, s0] = time.digits();
    let (a, b) = match layout {
        Layout::Hms => ((h1, h0), (s1, s0)),
        Layout::Smh => ((s1, s0), (h1, h0)),
    };
    Ok([
        code(a.0)?,
        code(a.1)?,
        COLON,
        code(m1)?,
        code(m0)?,
        COLON,
        code(b.0)?,
        code(b.1)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(values: &[u8]) -> BTreeSet<Digit> {
        values.iter().map(|&v| Digit::new(v).unwrap()).collect()
    }

    fn t(s: &str) -> TimeOfDay {
        s.parse().unwrap()
    }

    fn block(digit: u8, rows: &[&str]) -> String {
        let mut s = format!("digit {digit}\n");
        for r in rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }

    /// Digit 0 from `digit0_rows`; digits 1..9 each light one pixel in
    /// rows 2..3, which digit 0 test patterns never use unless intended.
    fn asset_with(digit0_rows: &[&str]) -> String {
        let mut text = block(0, digit0_rows);
        for d in 1..10u8 {
            let lit = format!("{:05b}", 1u8 << (d % 5))
                .replace('0', ".")
                .replace('1', "#");
            let mut rows = vec!["....."; 8];
            rows[usize::from(d / 5) + 2] = &lit;
            text.push('\n');
            text.push_str(&block(d, &rows));
        }
        text
    }

    #[test]
    fn shipped_asset_parses() {
        let set = GlyphSet::shipped();
        for d in Digit::ALL {
            let g = set.get(d);
            assert!(!g.is_blank());
            assert_eq!(g.rows()[7], 0);
        }
    }

    #[test]
    fn shipped_asset_round_trips() {
        assert_eq!(GlyphSet::shipped().to_asset(), SHIPPED_ASSET);
    }

    #[test]
    fn row_encoding() {
        let text = asset_with(&["#.#.#", ".....", ".....", ".....", ".....", ".....", ".....", "....."]);
        let set = parse_glyph_asset(&text, ParseOptions::default()).unwrap();
        assert_eq!(set.get(Digit(0)).rows()[0], 0x15);
    }

    #[test]
    fn blank_glyph_needs_flag() {
        let text = asset_with(&["....."; 8]);
        assert_eq!(
            parse_glyph_asset(&text, ParseOptions::default()),
            Err(GlyphAssetError::BlankGlyph(0))
        );
        let set = parse_glyph_asset(&text, ParseOptions { allow_blank: true }).unwrap();
        assert!(set.get(Digit(0)).is_blank());
    }

    #[test]
    fn cursor_row_must_be_blank() {
        let mut rows = vec!["....."; 7];
        rows.push("..#..");
        let text = asset_with(&rows);
        assert_eq!(
            parse_glyph_asset(&text, ParseOptions::default()),
            Err(GlyphAssetError::NonBlankCursorRow(0))
        );
    }

    #[test]
    fn wrong_width_rejected() {
        let text = asset_with(&["####", ".....", ".....", ".....", ".....", ".....", ".....", "....."]);
        assert_eq!(
            parse_glyph_asset(&text, ParseOptions::default()),
            Err(GlyphAssetError::BadDimensions { line: 2 })
        );
    }

    #[test]
    fn too_few_or_many_rows_rejected() {
        let short = asset_with(&["#....", ".....", "....."]);
        assert!(matches!(
            parse_glyph_asset(&short, ParseOptions::default()),
            Err(GlyphAssetError::BadDimensions { .. } | GlyphAssetError::Syntax { .. })
        ));
        let tall = asset_with(&["#....", ".....", ".....", ".....", ".....", ".....", ".....", ".....", "....."]);
        assert_eq!(
            parse_glyph_asset(&tall, ParseOptions::default()),
            Err(GlyphAssetError::BadDimensions { line: 10 })
        );
    }

    #[test]
    fn missing_and_duplicate_digits() {
        let full = asset_with(&["#....", ".....", ".....", ".....", ".....", ".....", ".....", "....."]);
        let without_nine: String = full.split("\ndigit 9").next().unwrap().to_string();
        assert_eq!(
            parse_glyph_asset(&without_nine, ParseOptions::default()),
            Err(GlyphAssetError::MissingDigit(9))
        );
        let dup = full.replace("digit 9", "digit 8");
        assert_eq!(
            parse_glyph_asset(&dup, ParseOptions::default()),
            Err(GlyphAssetError::DuplicateDigit(8))
        );
    }

    #[test]
    fn identical_glyphs_rejected() {
        let text = asset_with(&[".....", ".....", "...#.", ".....", ".....", ".....", ".....", "....."]);
        assert_eq!(
            parse_glyph_asset(&text, ParseOptions::default()),
            Err(GlyphAssetError::IdenticalGlyphs(0, 1))
        );
    }

    #[test]
    fn bad_pixel_and_header() {
        let text = asset_with(&["#..x.", ".....", ".....", ".....", ".....", ".....", ".....", "....."]);
        assert!(matches!(
            parse_glyph_asset(&text, ParseOptions::default()),
            Err(GlyphAssetError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_glyph_asset("glyph 0\n", ParseOptions::default()),
            Err(GlyphAssetError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn required_digit_sets() {
        assert_eq!(required_digits(t("11:11:11")), set(&[1]));
        assert_eq!(required_digits(t("01:23:45")), set(&[0, 1, 2, 3, 4, 5]));
        assert_eq!(required_digits(t("23:59:58")), set(&[2, 3, 5, 8, 9]));
    }

    #[test]
    fn first_load() {
        let mut map = SlotMap::new();
        let loads = map.ensure_resident(&set(&[1])).unwrap();
        assert_eq!(loads, vec![SlotLoad { slot: 0, digit: Digit(1) }]);
    }

    #[test]
    fn resident_request_is_identity() {
        let mut map = SlotMap::new();
        map.ensure_resident(&set(&[0, 1, 2])).unwrap();
        let before = map.clone();
        assert!(map.ensure_resident(&set(&[1, 2])).unwrap().is_empty());
        assert_eq!(
            map.resident().collect::<Vec<_>>(),
            before.resident().collect::<Vec<_>>()
        );
    }

    #[test]
    fn too_many_digits() {
        let mut map = SlotMap::new();
        let before = map.clone();
        assert_eq!(
            map.ensure_resident(&set(&[0, 1, 2, 3, 4, 5, 6, 7, 8])),
            Err(ResidencyError::TooManyDigits(9))
        );
        assert_eq!(map, before);
    }

    #[test]
    fn program_cgram_counts() {
        let glyphs = GlyphSet::shipped();
        assert!(program_cgram(&[], &glyphs).is_empty());
        let writes = program_cgram(&[SlotLoad { slot: 3, digit: Digit(7) }], &glyphs);
        assert_eq!(writes.len(), 10);
        assert_eq!(writes[0], LcdWrite::command(0x40 | 24));
        assert_eq!(writes[9], LcdWrite::command(0x80));
        let data: Vec<u8> = writes[1..9].iter().map(|w| w.byte).collect();
        assert_eq!(data, glyphs.get(Digit(7)).rows());
    }

    #[test]
    fn compose_all_zeros() {
        let mut map = SlotMap::new();
        map.slots[3] = Some(Digit(0));
        let codes = compose_display(TimeOfDay::MIDNIGHT, &map, Layout::Hms).unwrap();
        assert_eq!(codes, [3, 3, b':', 3, 3, b':', 3, 3]);
    }

    #[test]
    fn compose_layouts() {
        let mut map = SlotMap::new();
        map.ensure_resident(&set(&[0, 1, 2, 3, 4, 5])).unwrap();
        let time = t("01:23:45");
        let hms = compose_display(time, &map, Layout::Hms).unwrap();
        let smh = compose_display(time, &map, Layout::Smh).unwrap();
        let slot = |d| map.slot_of(Digit(d)).unwrap();
        assert_eq!(hms, [slot(0), slot(1), b':', slot(2), slot(3), b':', slot(4), slot(5)]);
        assert_eq!(smh, [slot(4), slot(5), b':', slot(2), slot(3), b':', slot(0), slot(1)]);
    }

    #[test]
    fn compose_not_resident() {
        let mut map = SlotMap::new();
        map.ensure_resident(&set(&[0])).unwrap();
        assert_eq!(
            compose_display(t("00:00:07"), &map, Layout::Hms),
            Err(ResidencyError::NotResident(Digit(7)))
        );
    }
}
