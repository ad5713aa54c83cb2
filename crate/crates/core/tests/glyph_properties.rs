use std::collections::{BTreeMap, BTreeSet};

use clock_core::glyphs::{
    compose_display, parse_glyph_asset, program_cgram, required_digits, Digit, GlyphSet, Layout,
    ParseOptions, SlotLoad, SlotMap, SLOT_COUNT,
};
use clock_core::lcd::{self, LcdState};
use clock_core::TimeOfDay;
use proptest::prelude::*;

fn digits(values: &[u8]) -> BTreeSet<Digit> {
    values.iter().map(|&v| Digit::new(v).unwrap()).collect()
}

/// Brute-force allocator: enumerate every way of placing the missing
/// digits into slots and keep the placements that (a) leave already
/// resident requested digits where they are and (b) only evict digits not
/// requested, preferring free slots and then the least recently used.
fn brute_force_loads(
    resident: &BTreeMap<u8, Digit>,
    recency: &BTreeMap<u8, u64>,
    request: &BTreeSet<Digit>,
) -> Vec<Vec<SlotLoad>> {
    let missing: Vec<Digit> = request
        .iter()
        .filter(|d| !resident.values().any(|r| r == *d))
        .copied()
        .collect();
    let mut best: Vec<(Vec<u64>, Vec<SlotLoad>)> = Vec::new();
    let slots: Vec<u8> = (0..SLOT_COUNT as u8).collect();

    fn place(
        missing: &[Digit],
        slots: &[u8],
        used: &mut Vec<u8>,
        out: &mut Vec<Vec<u8>>,
    ) {
        if used.len() == missing.len() {
            out.push(used.clone());
            return;
        }
        for &s in slots {
            if !used.contains(&s) {
                used.push(s);
                place(missing, slots, used, out);
                used.pop();
            }
        }
    }
    let mut assignments = Vec::new();
    place(&missing, &slots, &mut Vec::new(), &mut assignments);

    for assignment in assignments {
        let stable = assignment
            .iter()
            .all(|s| resident.get(s).is_none_or(|d| !request.contains(d)));
        if !stable {
            continue;
        }
        // Cost of each chosen slot: free slots cost 0, occupied slots cost
        // 1 + their last use, so sorting prefers free then least recent.
        let mut cost: Vec<u64> = assignment
            .iter()
            .map(|s| resident.get(s).map_or(0, |_| 1 + recency[s]))
            .collect();
        cost.sort_unstable();
        let loads: Vec<SlotLoad> = assignment
            .iter()
            .zip(&missing)
            .map(|(&slot, &digit)| SlotLoad { slot, digit })
            .collect();
        best.push((cost, loads));
    }
    let min = best.iter().map(|(c, _)| c.clone()).min().unwrap_or_default();
    best.into_iter()
        .filter(|(c, _)| *c == min)
        .map(|(_, l)| l)
        .collect()
}

#[test]
fn full_map_request_two_new_digits_evicts_two_lru() {
    let mut map = SlotMap::new();
    // Load 0..7 one at a time so digit d was last used at generation d + 1.
    for d in 0..8u8 {
        map.ensure_resident(&digits(&[d])).unwrap();
    }
    let resident: BTreeMap<u8, Digit> = map.resident().collect();
    let recency: BTreeMap<u8, u64> = (0..8u8).map(|s| (s, u64::from(s) + 1)).collect();
    let request = digits(&[8, 9]);

    let allowed = brute_force_loads(&resident, &recency, &request);
    let loads = map.ensure_resident(&request).unwrap();
    assert_eq!(loads.len(), 2);
    let slots: BTreeSet<u8> = loads.iter().map(|l| l.slot).collect();
    assert_eq!(slots, BTreeSet::from([0, 1]), "digits 0 and 1 are least recent");
    assert!(
        allowed.iter().any(|a| {
            let mut a = a.clone();
            a.sort_by_key(|l| l.slot);
            let mut b = loads.clone();
            b.sort_by_key(|l| l.slot);
            a.iter().map(|l| l.slot).eq(b.iter().map(|l| l.slot))
        }),
        "allocator choice not among brute-force optima"
    );
}

fn time_strategy() -> impl Strategy<Value = TimeOfDay> {
    (0u8..24, 0u8..60, 0u8..60).prop_map(|(h, m, s)| TimeOfDay::new(h, m, s).unwrap())
}

fn request_strategy() -> impl Strategy<Value = BTreeSet<Digit>> {
    prop::collection::btree_set(0u8..10, 1..=6)
        .prop_map(|s| s.into_iter().map(|d| Digit::new(d).unwrap()).collect())
}

proptest! {
    #[test]
    fn allocator_matches_brute_force(requests in prop::collection::vec(request_strategy(), 1..12)) {
        let mut map = SlotMap::new();
        let mut recency: BTreeMap<u8, u64> = BTreeMap::new();
        for (gen, request) in requests.iter().enumerate() {
            let resident: BTreeMap<u8, Digit> = map.resident().collect();
            let allowed = brute_force_loads(&resident, &recency, request);
            let loads = map.ensure_resident(request).unwrap();
            let mut got: Vec<u8> = loads.iter().map(|l| l.slot).collect();
            got.sort_unstable();
            let matched = allowed.iter().any(|a| {
                let mut s: Vec<u8> = a.iter().map(|l| l.slot).collect();
                s.sort_unstable();
                s == got
            });
            prop_assert!(matched, "slots {:?} not among brute-force optima", got);
            for d in request {
                recency.insert(map.slot_of(*d).unwrap(), gen as u64 + 1);
            }
        }
    }

    #[test]
    fn slots_stable_while_requested(times in prop::collection::vec(time_strategy(), 2..40)) {
        let mut map = SlotMap::new();
        let mut previous: BTreeMap<Digit, u8> = BTreeMap::new();
        for time in times {
            let request = required_digits(time);
            prop_assert!(request.len() <= 6);
            map.ensure_resident(&request).unwrap();
            let resident: Vec<(u8, Digit)> = map.resident().collect();
            prop_assert!(resident.len() <= SLOT_COUNT);
            let current: BTreeMap<Digit, u8> = request.iter().map(|d| (*d, map.slot_of(*d).unwrap())).collect();
            for (d, slot) in &current {
                if let Some(old) = previous.get(d) {
                    prop_assert_eq!(old, slot);
                }
            }
            prop_assert!(compose_display(time, &map, Layout::Hms).is_ok());
            prop_assert!(compose_display(time, &map, Layout::Smh).is_ok());
            previous = current;
        }
    }

    #[test]
    fn asset_round_trip(bits in prop::collection::vec(prop::array::uniform7(0u8..32), 10)) {
        let mut text = String::new();
        for (d, rows) in bits.iter().enumerate() {
            if d > 0 {
                text.push('\n');
            }
            text.push_str(&format!("digit {d}\n"));
            for r in rows.iter().chain(std::iter::once(&0)) {
                for c in 0..5 {
                    text.push(if r & (0x10 >> c) != 0 { '#' } else { '.' });
                }
                text.push('\n');
            }
        }
        match parse_glyph_asset(&text, ParseOptions { allow_blank: true }) {
            Ok(set) => prop_assert_eq!(set.to_asset(), text),
            Err(e) => prop_assert!(matches!(e, clock_core::glyphs::GlyphAssetError::IdenticalGlyphs(..))),
        }
    }
}

#[test]
fn programmed_slot_renders_glyph() {
    let glyphs = GlyphSet::shipped();
    for digit in Digit::ALL {
        let slot = digit.value() % 8;
        let mut lcd = LcdState::reset();
        lcd::init_4bit(&mut lcd).unwrap();
        for w in program_cgram(&[SlotLoad { slot, digit }], &glyphs) {
            lcd.bus_write_byte(w).unwrap();
        }
        lcd.write_data(slot).unwrap();
        assert_eq!(lcd.render_cell(0, 0).rows(), glyphs.get(digit).rows());
    }
}
