use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::guessability::normalize_answer;
use crate::mnemonic::TemplateSet;

/// Smallest catalog that still gives the dropdown a real choice for three
/// distinct slots.
pub const MIN_CATALOG_SIZE: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Question {
    pub id: String,
    pub text: String,
    pub category: String,
}

impl Question {
    pub fn new(id: &str, text: &str, category: &str) -> Self {
        Question {
            id: id.to_owned(),
            text: text.to_owned(),
            category: category.to_owned(),
        }
    }
}

/// Predefined questions offered in the dropdown for the first three slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuestionCatalog {
    questions: Vec<Question>,
    #[serde(skip)]
    normalized_texts: HashSet<String>,
}

impl QuestionCatalog {
    pub fn new(questions: Vec<Question>) -> Result<Self> {
        Self::with_min_size(questions, MIN_CATALOG_SIZE)
    }

    /// Like [`QuestionCatalog::new`] with a custom size floor; used to build
    /// reduced catalogs for model checking.
    pub fn with_min_size(questions: Vec<Question>, min: usize) -> Result<Self> {
        if questions.len() < min {
            return Err(Error::Config(format!(
                "catalog has {} questions, need at least {min}",
                questions.len()
            )));
        }
        let mut ids = HashSet::new();
        let mut normalized_texts = HashSet::new();
        for q in &questions {
            if q.id.trim().is_empty() {
                return Err(Error::Config("catalog question with empty id".into()));
            }
            let norm = normalize_answer(&q.text);
            if norm.is_empty() {
                return Err(Error::Config(format!("question {:?} has empty text", q.id)));
            }
            if !ids.insert(q.id.clone()) {
                return Err(Error::Config(format!("duplicate question id {:?}", q.id)));
            }
            if !normalized_texts.insert(norm) {
                return Err(Error::Config(format!("duplicate question text {:?}", q.text)));
            }
        }
        Ok(QuestionCatalog {
            questions,
            normalized_texts,
        })
    }

    pub fn questions(&self) -> &[Question] {
        &self.questions
    }

    pub fn get(&self, id: &str) -> Option<&Question> {
        self.questions.iter().find(|q| q.id == id)
    }

    /// True when `text` matches a catalog question after normalization.
    pub fn contains_text(&self, text: &str) -> bool {
        self.normalized_texts.contains(&normalize_answer(text))
    }

    /// Fails unless every category resolves to a suggestion template.
    pub fn check_templates(&self, templates: &TemplateSet) -> Result<()> {
        for q in &self.questions {
            templates.resolve(&q.category)?;
        }
        Ok(())
    }
}
