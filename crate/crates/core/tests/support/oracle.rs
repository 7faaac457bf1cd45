//! Reference rule evaluator built on regex Unicode property classes rather
//! than the general-category lookup the library uses.

use std::sync::OnceLock;

use regex::Regex;

struct Patterns {
    capital: Regex,
    digit: Regex,
    special: Regex,
    letter: Regex,
    length: Regex,
}

fn patterns() -> &'static Patterns {
    static P: OnceLock<Patterns> = OnceLock::new();
    P.get_or_init(|| Patterns {
        capital: Regex::new(r"\p{Lu}").unwrap(),
        digit: Regex::new(r"\p{Nd}").unwrap(),
        special: Regex::new(r"[^\p{L}\p{Nd}\s]").unwrap(),
        letter: Regex::new(r"\p{L}").unwrap(),
        length: Regex::new(r"(?s)^.{8}").unwrap(),
    })
}

/// `[capital, digit, special, letter, long_enough]`
pub fn oracle_rules(s: &str) -> [bool; 5] {
    let p = patterns();
    [
        p.capital.is_match(s),
        p.digit.is_match(s),
        p.special.is_match(s),
        p.letter.is_match(s),
        p.length.is_match(s),
    ]
}

pub fn oracle_score(s: &str) -> u8 {
    oracle_rules(s).iter().filter(|&&b| b).count() as u8
}

/// Band name for a score: 0–2 weak, 3–4 medium, 5 strong.
pub fn oracle_band(score: u8) -> &'static str {
    ["weak", "weak", "weak", "medium", "medium", "strong"][usize::from(score)]
}
