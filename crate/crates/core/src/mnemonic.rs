//! Mnemonic answer suggestions.
//!
//! When a user keeps a weak answer they are shown an example of a stronger
//! one, composed the way people build memorable passphrases: abbreviate a
//! topic, add an event token, a year, a separator, a place and a closing
//! symbol. The example comes with a sentence explaining how it was built,
//! e.g. `CrickICC15@Aus.` ← "My favorite sport is cricket, my favorite
//! cricket team is Australia and they won the ICC world cup in 2015".
//!
//! Templates are loaded from a small sectioned text format:
//!
//! ```text
//! # comments start with '#'
//! [template]
//! category = sport
//! slots = topic event year separator place terminal
//! explanation = My favorite sport is {topic}, ... in {year}
//!
//! [topic]
//! cricket = Crick
//!
//! [separator]
//! @
//! ```
//!
//! Word slots (`topic`, `event`, `year`, `place`) hold `expanded = token`
//! pairs; symbol slots (`separator`, `terminal`) hold one symbol per line.
//! The first filler of every pool is what seed 0 produces.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::guessability::WordlistSet;
use crate::strength::{classify_char, evaluate, CharClass, MAX_SCORE, MIN_LENGTH};

/// Category used when no template matches the requested one.
pub const GENERIC_CATEGORY: &str = "generic";

/// Draws tried before giving up on finding an uncommon suggestion.
pub const MAX_DRAWS: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SlotKind {
    /// Abbreviated topic, leading capital: `Crick`.
    Topic,
    /// Upper-case event token: `ICC`.
    Event,
    /// Two to four digits: `15`.
    Year,
    /// A single special character between tokens: `@`.
    Separator,
    /// Abbreviated place, leading capital: `Aus`.
    Place,
    /// A single closing special character: `.`.
    Terminal,
}

impl SlotKind {
    pub const ALL: [SlotKind; 6] = [
        SlotKind::Topic,
        SlotKind::Event,
        SlotKind::Year,
        SlotKind::Separator,
        SlotKind::Place,
        SlotKind::Terminal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SlotKind::Topic => "topic",
            SlotKind::Event => "event",
            SlotKind::Year => "year",
            SlotKind::Separator => "separator",
            SlotKind::Place => "place",
            SlotKind::Terminal => "terminal",
        }
    }

    /// Symbol slots have no spoken form and are not mentioned in explanations.
    pub fn is_symbol(self) -> bool {
        matches!(self, SlotKind::Separator | SlotKind::Terminal)
    }

    fn placeholder(self) -> String {
        format!("{{{}}}", self.name())
    }

    fn check_token(self, token: &str) -> std::result::Result<(), String> {
        let chars: Vec<char> = token.chars().collect();
        let is_letter = |c: char| matches!(classify_char(c), CharClass::Capital | CharClass::OtherLetter);
        let ok = match self {
            SlotKind::Topic | SlotKind::Place => {
                !chars.is_empty()
                    && classify_char(chars[0]) == CharClass::Capital
                    && chars.iter().all(|&c| is_letter(c))
            }
            SlotKind::Event => {
                !chars.is_empty() && chars.iter().all(|&c| classify_char(c) == CharClass::Capital)
            }
            SlotKind::Year => (2..=4).contains(&chars.len()) && chars.iter().all(char::is_ascii_digit),
            SlotKind::Separator | SlotKind::Terminal => {
                chars.len() == 1 && classify_char(chars[0]) == CharClass::Special
            }
        };
        if ok {
            Ok(())
        } else {
            Err(format!("{token:?} is not a valid {} token", self.name()))
        }
    }
}

impl fmt::Display for SlotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SlotKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        SlotKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown slot {s:?}"))
    }
}

/// One pool entry: the token placed in the answer and the phrase it stands
/// for in the explanation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filler {
    pub token: String,
    pub expanded: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotSpec {
    pub kind: SlotKind,
    pub pool: Vec<Filler>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MnemonicTemplate {
    category: String,
    slots: Vec<SlotSpec>,
    explanation_pattern: String,
}

impl MnemonicTemplate {
    /// Builds a template and checks that every possible instantiation
    /// satisfies all five meter rules.
    pub fn new(category: &str, slots: Vec<SlotSpec>, explanation_pattern: &str) -> Result<Self> {
        let template = MnemonicTemplate {
            category: category.trim().to_owned(),
            slots,
            explanation_pattern: explanation_pattern.to_owned(),
        };
        template.validate().map_err(Error::Config)?;
        Ok(template)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        let cat = &self.category;
        if cat.is_empty() {
            return Err("template without category".into());
        }
        if self.slots.is_empty() {
            return Err(format!("template {cat:?} has no slots"));
        }
        for (i, slot) in self.slots.iter().enumerate() {
            if self.slots[..i].iter().any(|s| s.kind == slot.kind) {
                return Err(format!("template {cat:?} repeats slot {}", slot.kind));
            }
            if slot.pool.is_empty() {
                return Err(format!("template {cat:?} has an empty {} pool", slot.kind));
            }
            for filler in &slot.pool {
                slot.kind.check_token(&filler.token).map_err(|e| format!("template {cat:?}: {e}"))?;
            }
            let placeholder = slot.kind.placeholder();
            if !slot.kind.is_symbol() && !self.explanation_pattern.contains(&placeholder) {
                return Err(format!("template {cat:?} explanation lacks {placeholder}"));
            }
        }

        // Each existence rule must be guaranteed by some slot whose every
        // filler satisfies it; the shortest fillers must still reach the
        // minimum length.
        type Rule = fn(&crate::strength::RuleVector) -> bool;
        let guaranteed = |pred: Rule| {
            self.slots
                .iter()
                .any(|s| s.pool.iter().all(|f| pred(&crate::strength::check_rules(&f.token))))
        };
        let checks: [(&str, Rule); 4] = [
            ("capital letter", |r| r.has_capital),
            ("digit", |r| r.has_digit),
            ("special character", |r| r.has_special),
            ("letter", |r| r.has_letter),
        ];
        for (what, pred) in checks {
            if !guaranteed(pred) {
                return Err(format!("template {cat:?} does not guarantee a {what}"));
            }
        }
        let min_len: usize = self
            .slots
            .iter()
            .map(|s| s.pool.iter().map(|f| f.token.chars().count()).min().unwrap_or(0))
            .sum();
        if min_len < MIN_LENGTH {
            return Err(format!(
                "template {cat:?} can produce answers of {min_len} characters"
            ));
        }
        Ok(())
    }

    pub fn category(&self) -> &str {
        &self.category
    }

    pub fn slots(&self) -> &[SlotSpec] {
        &self.slots
    }

    pub fn explanation_pattern(&self) -> &str {
        &self.explanation_pattern
    }

    /// Assembles the answer and explanation for one filler per slot.
    fn instantiate(&self, picks: &[usize]) -> (String, String) {
        let mut answer = String::new();
        let mut explanation = self.explanation_pattern.clone();
        for (slot, &idx) in self.slots.iter().zip(picks) {
            let filler = &slot.pool[idx];
            answer.push_str(&filler.token);
            if !slot.kind.is_symbol() {
                explanation = explanation.replace(&slot.kind.placeholder(), &filler.expanded);
            }
        }
        (answer, explanation)
    }

    pub fn parse(text: &str, source: &Path) -> Result<Self> {
        parse_template(text, source)
    }

    /// Writes the template back in the file format `parse` reads.
    pub fn to_text(&self) -> String {
        let mut out = String::from("[template]\n");
        out.push_str(&format!("category = {}\n", self.category));
        let order: Vec<&str> = self.slots.iter().map(|s| s.kind.name()).collect();
        out.push_str(&format!("slots = {}\n", order.join(" ")));
        out.push_str(&format!("explanation = {}\n", self.explanation_pattern));
        for slot in &self.slots {
            out.push_str(&format!("\n[{}]\n", slot.kind));
            for f in &slot.pool {
                if slot.kind.is_symbol() {
                    out.push_str(&format!("{}\n", f.token));
                } else {
                    out.push_str(&format!("{} = {}\n", f.expanded, f.token));
                }
            }
        }
        out
    }
}

fn parse_template(text: &str, source: &Path) -> Result<MnemonicTemplate> {
    let err = |line: usize, message: String| Error::Parse {
        path: source.to_path_buf(),
        line,
        message,
    };

    let mut section: Option<String> = None;
    let mut header: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut pools: BTreeMap<SlotKind, Vec<Filler>> = BTreeMap::new();

    for (idx, raw) in text.split('\n').enumerate() {
        let lineno = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let line = if idx == 0 { line.strip_prefix('\u{feff}').unwrap_or(line) } else { line };
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let trimmed = line.trim();
        if let Some(name) = trimmed.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim().to_owned();
            if name != "template" {
                let kind = name.parse::<SlotKind>().map_err(|e| err(lineno, e))?;
                if pools.contains_key(&kind) {
                    return Err(err(lineno, format!("duplicate section [{name}]")));
                }
                pools.insert(kind, Vec::new());
            }
            section = Some(name);
            continue;
        }
        match section.as_deref() {
            None => return Err(err(lineno, "entry outside of a section".into())),
            Some("template") => {
                let (key, value) = trimmed
                    .split_once('=')
                    .ok_or_else(|| err(lineno, "expected key = value".into()))?;
                header.insert(key.trim().to_owned(), (lineno, value.trim().to_owned()));
            }
            Some(name) => {
                let kind: SlotKind = name.parse().map_err(|e| err(lineno, e))?;
                let filler = if kind.is_symbol() {
                    Filler {
                        token: trimmed.to_owned(),
                        expanded: trimmed.to_owned(),
                    }
                } else {
                    let (expanded, token) = trimmed
                        .rsplit_once('=')
                        .ok_or_else(|| err(lineno, "expected `expanded = token`".into()))?;
                    Filler {
                        token: token.trim().to_owned(),
                        expanded: expanded.trim().to_owned(),
                    }
                };
                kind.check_token(&filler.token).map_err(|e| err(lineno, e))?;
                pools.get_mut(&kind).expect("section registered").push(filler);
            }
        }
    }

    let field = |key: &str| {
        header
            .get(key)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| err(0, format!("[template] lacks `{key}`")))
    };
    let category = field("category")?;
    let explanation = field("explanation")?;
    let order_line = header.get("slots").map(|(l, _)| *l).unwrap_or(0);
    let mut slots = Vec::new();
    for name in field("slots")?.split_whitespace() {
        let kind: SlotKind = name.parse().map_err(|e| err(order_line, e))?;
        let pool = pools
            .remove(&kind)
            .ok_or_else(|| err(order_line, format!("slot {name} has no [{name}] section")))?;
        slots.push(SlotSpec { kind, pool });
    }
    if let Some(kind) = pools.keys().next() {
        return Err(err(0, format!("section [{kind}] is not listed in `slots`")));
    }
    MnemonicTemplate::new(&category, slots, &explanation)
}

pub fn load_template(path: impl AsRef<Path>) -> Result<MnemonicTemplate> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let text = String::from_utf8(bytes).map_err(|e| {
        let good = &e.as_bytes()[..e.utf8_error().valid_up_to()];
        Error::Decode {
            path: path.to_path_buf(),
            line: good.iter().filter(|&&b| b == b'\n').count() + 1,
        }
    })?;
    parse_template(&text, path)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TemplateSet {
    by_category: BTreeMap<String, MnemonicTemplate>,
}

impl TemplateSet {
    pub fn new(templates: impl IntoIterator<Item = MnemonicTemplate>) -> Self {
        let mut set = TemplateSet::default();
        for t in templates {
            set.insert(t);
        }
        set
    }

    /// Adds a template, replacing any existing one for the same category.
    pub fn insert(&mut self, template: MnemonicTemplate) {
        self.by_category.insert(template.category.clone(), template);
    }

    pub fn get(&self, category: &str) -> Option<&MnemonicTemplate> {
        self.by_category.get(category)
    }

    /// The category's own template, else the generic one.
    pub fn resolve(&self, category: &str) -> Result<&MnemonicTemplate> {
        self.get(category)
            .or_else(|| self.get(GENERIC_CATEGORY))
            .ok_or_else(|| Error::Config(format!("no template for category {category:?} and no generic fallback")))
    }

    pub fn categories(&self) -> impl Iterator<Item = &str> {
        self.by_category.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &MnemonicTemplate> {
        self.by_category.values()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Suggestion {
    pub answer: String,
    pub explanation: String,
    pub category: String,
    pub seed: u64,
}

// Fractional parts of the golden ratio and of the square roots of the first
// primes, as 64-bit fixed point. One irrational stride per slot position.
const STRIDES: [u64; 6] = [
    0x9e37_79b9_7f4a_7c15,
    0x6a09_e667_f3bc_c908,
    0xbb67_ae85_84ca_a73b,
    0x3c6e_f372_fe94_f82b,
    0xa54f_f53a_5f1d_36f1,
    0x510e_527f_ade6_82d1,
];

/// Pool index for one slot of one draw: `floor(frac(n * stride) * len)`.
/// Draw 0 picks the first filler of every pool.
fn pick(draw: u64, slot: usize, len: usize) -> usize {
    let frac = draw.wrapping_mul(STRIDES[slot % STRIDES.len()]);
    ((u128::from(frac) * len as u128) >> 64) as usize
}

/// Produces a rubric-compliant, uncommon example answer for `category`.
///
/// The output is a pure function of the inputs.
pub fn suggest(category: &str, seed: u64, templates: &TemplateSet, lists: &WordlistSet) -> Result<Suggestion> {
    let template = templates.resolve(category)?;
    for attempt in 0..u64::from(MAX_DRAWS) {
        let draw = seed.wrapping_mul(u64::from(MAX_DRAWS)).wrapping_add(attempt);
        let picks: Vec<usize> = template
            .slots
            .iter()
            .enumerate()
            .map(|(i, s)| pick(draw, i, s.pool.len()))
            .collect();
        let (answer, explanation) = template.instantiate(&picks);
        if evaluate(&answer).score == MAX_SCORE && lists.is_common(&answer).is_none() {
            return Ok(Suggestion {
                answer,
                explanation,
                category: template.category.clone(),
                seed,
            });
        }
    }
    Err(Error::GenerationExhausted {
        category: category.to_owned(),
        attempts: MAX_DRAWS,
    })
}
