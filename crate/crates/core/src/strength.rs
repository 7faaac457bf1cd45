//! The five-rule answer meter.
//!
//! An answer is checked for a capital letter, a digit, a special character,
//! a letter and a minimum length. The number of satisfied rules is the
//! score, and the score maps onto a three-state meter (weak / medium /
//! strong) rendered as red / orange / green.
//!
//! Character classes follow Unicode general categories so that answers in
//! any script are scored the same way:
//!
//! * capital: `Lu`
//! * digit: `Nd`
//! * letter: any `L*` category
//! * special: anything that is neither a letter, a decimal digit nor
//!   whitespace
//!
//! Length is counted in Unicode scalar values. Whitespace counts toward the
//! length but never as a special character.

use serde::{Deserialize, Serialize};
use unicode_general_category::{get_general_category, GeneralCategory};

use crate::error::ContractViolation;

/// Minimum answer length, in Unicode scalar values.
pub const MIN_LENGTH: usize = 8;

/// Highest possible score: one point per rule.
pub const MAX_SCORE: u8 = 5;

/// Which of the five rules an answer satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct RuleVector {
    pub has_capital: bool,
    pub has_digit: bool,
    pub has_special: bool,
    pub has_letter: bool,
    pub long_enough: bool,
}

impl RuleVector {
    /// Number of satisfied rules.
    pub fn count(&self) -> u8 {
        self.as_array().iter().filter(|&&b| b).count() as u8
    }

    /// Rules in display order: capital, digit, special, letter, length.
    pub fn as_array(&self) -> [bool; 5] {
        [
            self.has_capital,
            self.has_digit,
            self.has_special,
            self.has_letter,
            self.long_enough,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Weak,
    Medium,
    Strong,
}

impl Band {
    pub fn color(self) -> Color {
        match self {
            Band::Weak => Color::Red,
            Band::Medium => Color::Orange,
            Band::Strong => Color::Green,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Band::Weak => "weak",
            Band::Medium => "medium",
            Band::Strong => "strong",
        }
    }
}

impl std::fmt::Display for Band {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Orange,
    Green,
}

impl Color {
    pub fn as_str(self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Orange => "orange",
            Color::Green => "green",
        }
    }
}

impl std::fmt::Display for Color {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The meter's payload for one answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StrengthReport {
    pub rules: RuleVector,
    pub score: u8,
    pub band: Band,
    pub color: Color,
}

/// General-category class of a single character, as far as the rules care.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum CharClass {
    Capital,
    OtherLetter,
    Digit,
    Whitespace,
    Special,
}

pub(crate) fn classify_char(c: char) -> CharClass {
    use GeneralCategory::*;
    match get_general_category(c) {
        UppercaseLetter => CharClass::Capital,
        LowercaseLetter | TitlecaseLetter | ModifierLetter | OtherLetter => CharClass::OtherLetter,
        DecimalNumber => CharClass::Digit,
        _ if c.is_whitespace() => CharClass::Whitespace,
        _ => CharClass::Special,
    }
}

pub fn check_rules(answer: &str) -> RuleVector {
    let mut rules = RuleVector::default();
    let mut len = 0usize;
    for c in answer.chars() {
        len += 1;
        match classify_char(c) {
            CharClass::Capital => {
                rules.has_capital = true;
                rules.has_letter = true;
            }
            CharClass::OtherLetter => rules.has_letter = true,
            CharClass::Digit => rules.has_digit = true,
            CharClass::Whitespace => {}
            CharClass::Special => rules.has_special = true,
        }
    }
    rules.long_enough = len >= MIN_LENGTH;
    rules
}

/// Maps a score to its meter state: 0–2 weak, 3–4 medium, 5 strong.
pub fn classify_band(score: u8) -> Result<(Band, Color), ContractViolation> {
    let band = match score {
        0..=2 => Band::Weak,
        3 | 4 => Band::Medium,
        5 => Band::Strong,
        _ => {
            return Err(ContractViolation::new(format!(
                "score {score} outside 0..={MAX_SCORE}"
            )))
        }
    };
    Ok((band, band.color()))
}

pub fn evaluate(answer: &str) -> StrengthReport {
    let rules = check_rules(answer);
    let score = rules.count();
    let (band, color) = classify_band(score).expect("popcount of five flags is at most 5");
    StrengthReport {
        rules,
        score,
        band,
        color,
    }
}
