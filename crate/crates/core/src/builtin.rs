//! Data shipped with the crate: the default question catalog, fixture
//! wordlists and mnemonic templates.

use std::path::Path;

use crate::catalog::{Question, QuestionCatalog};
use crate::guessability::{Wordlist, WordlistSet};
use crate::mnemonic::{MnemonicTemplate, TemplateSet};

const WORDLISTS: [(&str, &str); 3] = [
    ("color", include_str!("../data/wordlists/color.txt")),
    ("name", include_str!("../data/wordlists/name.txt")),
    ("sport", include_str!("../data/wordlists/sport.txt")),
];

const TEMPLATES: [(&str, &str); 4] = [
    ("color.txt", include_str!("../data/templates/color.txt")),
    ("generic.txt", include_str!("../data/templates/generic.txt")),
    ("name.txt", include_str!("../data/templates/name.txt")),
    ("sport.txt", include_str!("../data/templates/sport.txt")),
];

const QUESTIONS: [(&str, &str, &str); 8] = [
    ("q-sport", "What is your favorite sport?", "sport"),
    ("q-color", "What is your favorite color?", "color"),
    ("q-pet", "What was the name of your first pet?", "name"),
    ("q-teacher", "What was the name of your favorite teacher?", "name"),
    ("q-friend", "What is the first name of your childhood best friend?", "name"),
    ("q-city", "In what city were you born?", "place"),
    ("q-street", "What was the name of the street you grew up on?", "place"),
    ("q-food", "What is your favorite food?", "food"),
];

pub fn wordlists() -> WordlistSet {
    WordlistSet::new(
        WORDLISTS
            .iter()
            .map(|(cat, text)| Wordlist::parse(cat, text, &format!("builtin:{cat}"))),
    )
}

pub fn templates() -> TemplateSet {
    TemplateSet::new(TEMPLATES.iter().map(|(name, text)| {
        MnemonicTemplate::parse(text, Path::new(name)).expect("shipped template is valid")
    }))
}

pub fn catalog() -> QuestionCatalog {
    QuestionCatalog::new(
        QUESTIONS
            .iter()
            .map(|(id, text, cat)| Question::new(id, text, cat))
            .collect(),
    )
    .expect("shipped catalog is valid")
}
