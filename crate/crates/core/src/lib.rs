//! Secret question meter.
//!
//! Scores security-question answers against a five-rule rubric, flags
//! answers that appear in common-answer lists, suggests mnemonic-style
//! replacements for weak answers, and runs the five-question setup and
//! recovery flow.
//!
//! ```
//! use sqmeter_core::{evaluate, Band};
//!
//! let report = evaluate("CrickICC15@Aus.");
//! assert_eq!(report.score, 5);
//! assert_eq!(report.band, Band::Strong);
//! ```

pub mod builtin;
pub mod catalog;
pub mod error;
pub mod guessability;
pub mod mnemonic;
pub mod profile;
pub mod score;
pub mod session;
pub mod strength;

pub use catalog::{Question, QuestionCatalog};
pub use error::{ContractViolation, Error, ErrorKind, Result};
pub use guessability::{is_common, load_wordlist, match_normal, normalize_answer, Wordlist, WordlistSet};
pub use mnemonic::{load_template, suggest, MnemonicTemplate, Suggestion, TemplateSet};
pub use profile::{verify_recovery, HashParams, ProfileEntry, RecoveryOutcome, StoredProfile};
pub use score::{score_answer, ScorePayload};
pub use session::{
    AnswerState, Engine, QuestionKind, Session, SessionId, SessionState, SessionView, SubmitOutcome, SubmitStatus,
};
pub use strength::{check_rules, classify_band, evaluate, Band, Color, RuleVector, StrengthReport};
