//! Deterministic random inputs.

use rand::Rng;

/// Blocks that exercise every rule class across scripts.
const BLOCKS: &[(u32, u32)] = &[
    (0x20, 0x7e),       // ASCII printable
    (0x09, 0x0d),       // ASCII whitespace controls
    (0x00, 0x1f),       // C0 controls
    (0xa0, 0xff),       // Latin-1 supplement
    (0x100, 0x24f),     // Latin extended
    (0x300, 0x36f),     // combining marks
    (0x370, 0x3ff),     // Greek
    (0x400, 0x4ff),     // Cyrillic
    (0x660, 0x669),     // Arabic-Indic digits
    (0x900, 0x97f),     // Devanagari
    (0x2000, 0x206f),   // general punctuation and spaces
    (0x2150, 0x218f),   // number forms
    (0x3000, 0x303f),   // CJK symbols, ideographic space
    (0x4e00, 0x4fff),   // CJK ideographs
    (0xff00, 0xffef),   // fullwidth forms
    (0x1d400, 0x1d7ff), // mathematical alphanumerics
    (0x1f300, 0x1faff), // emoji
];

pub fn random_char<R: Rng>(rng: &mut R) -> char {
    loop {
        let cp = if rng.random_bool(0.2) {
            rng.random_range(0..=0x10ffffu32)
        } else {
            let (lo, hi) = BLOCKS[rng.random_range(0..BLOCKS.len())];
            rng.random_range(lo..=hi)
        };
        if let Some(c) = char::from_u32(cp) {
            return c;
        }
    }
}

pub fn random_unicode<R: Rng>(rng: &mut R, max_len: usize) -> String {
    let len = rng.random_range(0..=max_len);
    (0..len).map(|_| random_char(rng)).collect()
}

const ASCII_SPECIALS: &[u8] = b"!@#$%^&*()-_=+[]{};:,.<>/?~";

/// An answer with at least one ASCII letter in each case, so that flipping
/// its case always changes it, and a punctuation mark that cannot occur in
/// hex or base64 output.
pub fn random_answer<R: Rng>(rng: &mut R) -> String {
    let mut s = String::new();
    s.push(rng.random_range(b'A'..=b'Z') as char);
    s.push(rng.random_range(b'a'..=b'z') as char);
    let len = rng.random_range(6..=18);
    for _ in 0..len {
        let c = match rng.random_range(0..10) {
            0..=3 => rng.random_range(b'a'..=b'z') as char,
            4..=5 => rng.random_range(b'A'..=b'Z') as char,
            6..=7 => rng.random_range(b'0'..=b'9') as char,
            8 => ASCII_SPECIALS[rng.random_range(0..ASCII_SPECIALS.len())] as char,
            _ => random_char(rng),
        };
        if !c.is_whitespace() && !c.is_control() {
            s.push(c);
        }
    }
    s.push(ASCII_SPECIALS[rng.random_range(0..ASCII_SPECIALS.len())] as char);
    s
}

pub fn flip_case(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_uppercase() {
                c.to_ascii_lowercase()
            } else if c.is_ascii_lowercase() {
                c.to_ascii_uppercase()
            } else {
                c
            }
        })
        .collect()
}
