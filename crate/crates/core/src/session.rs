//! The five-question setup flow.
//!
//! Slots 1–3 take questions from the catalog dropdown, slots 4–5 take
//! questions the user writes. Each answer is scored when submitted; a weak
//! answer (or one found in a common-answer list) is held pending until the
//! user either replaces it or explicitly keeps it, and in the meantime a
//! mnemonic suggestion is offered. Once all five slots are accepted the
//! session is finalized into a [`StoredProfile`] holding only salted
//! digests.
//!
//! A session must be mutated by one caller at a time; the engine itself is
//! immutable and can be shared freely.

use std::fmt;

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use zeroize::Zeroizing;

use crate::catalog::QuestionCatalog;
use crate::error::{ContractViolation, Error, Result};
use crate::guessability::{match_normal, normalize_answer, WordlistSet};
use crate::mnemonic::{suggest, Suggestion, TemplateSet, GENERIC_CATEGORY};
use crate::profile::{fresh_salts, random_token, HashParams, ProfileEntry, StoredProfile};
use crate::strength::{evaluate, Band, StrengthReport};

pub const SLOT_COUNT: usize = 5;
pub const PREDEFINED_SLOTS: std::ops::RangeInclusive<u8> = 1..=3;
pub const CUSTOM_SLOTS: std::ops::RangeInclusive<u8> = 4..=5;

/// Idle time after which an open session is abandoned.
pub const DEFAULT_SESSION_TTL: Duration = Duration::minutes(30);

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SessionId(String);

impl SessionId {
    fn fresh() -> Self {
        SessionId(random_token(16))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SessionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<String> for SessionId {
    fn from(s: String) -> Self {
        SessionId(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuestionKind {
    Predefined,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SlotQuestion {
    /// Catalog id; `None` for user-written questions.
    pub id: Option<String>,
    pub text: String,
    pub category: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerState {
    Empty,
    PendingWeakConfirmation,
    Accepted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionState {
    Open,
    Finalized,
    Abandoned,
}

#[derive(Clone)]
pub struct Slot {
    kind: QuestionKind,
    question: Option<SlotQuestion>,
    answer_state: AnswerState,
    answer_plain: Option<Zeroizing<String>>,
    band_at_save: Option<Band>,
    weak_override: bool,
    attempts: u32,
}

impl Slot {
    fn new(kind: QuestionKind) -> Self {
        Slot {
            kind,
            question: None,
            answer_state: AnswerState::Empty,
            answer_plain: None,
            band_at_save: None,
            weak_override: false,
            attempts: 0,
        }
    }

    fn clear_answer(&mut self) {
        self.answer_state = AnswerState::Empty;
        self.answer_plain = None;
        self.band_at_save = None;
        self.weak_override = false;
    }

    pub fn kind(&self) -> QuestionKind {
        self.kind
    }

    pub fn question(&self) -> Option<&SlotQuestion> {
        self.question.as_ref()
    }

    pub fn answer_state(&self) -> AnswerState {
        self.answer_state
    }

    pub fn band_at_save(&self) -> Option<Band> {
        self.band_at_save
    }

    pub fn weak_override(&self) -> bool {
        self.weak_override
    }

    pub fn has_plaintext(&self) -> bool {
        self.answer_plain.is_some()
    }
}

impl fmt::Debug for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Slot")
            .field("kind", &self.kind)
            .field("question", &self.question)
            .field("answer_state", &self.answer_state)
            .field("answer_plain", &self.answer_plain.as_ref().map(|_| "<redacted>"))
            .field("band_at_save", &self.band_at_save)
            .field("weak_override", &self.weak_override)
            .field("attempts", &self.attempts)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub struct Session {
    id: SessionId,
    slots: [Slot; SLOT_COUNT],
    state: SessionState,
    created_at: DateTime<Utc>,
    last_activity: DateTime<Utc>,
}

impl Session {
    pub fn id(&self) -> &SessionId {
        &self.id
    }

    pub fn state(&self) -> SessionState {
        self.state
    }

    pub fn slots(&self) -> &[Slot; SLOT_COUNT] {
        &self.slots
    }

    /// `n` is 1-based.
    pub fn slot(&self, n: u8) -> Option<&Slot> {
        (1..=SLOT_COUNT as u8)
            .contains(&n)
            .then(|| &self.slots[usize::from(n - 1)])
    }

    pub fn created_at(&self) -> DateTime<Utc> {
        self.created_at
    }

    pub fn last_activity(&self) -> DateTime<Utc> {
        self.last_activity
    }

    /// Moves an open session idle for longer than `ttl` to `Abandoned` and
    /// wipes any answers it holds. Returns true if it expired.
    pub fn expire_if_idle(&mut self, now: DateTime<Utc>, ttl: Duration) -> bool {
        if self.state == SessionState::Open && now - self.last_activity > ttl {
            self.state = SessionState::Abandoned;
            self.erase_plaintext();
            true
        } else {
            false
        }
    }

    fn erase_plaintext(&mut self) {
        for slot in &mut self.slots {
            slot.answer_plain = None;
        }
    }

    fn require_open(&self) -> Result<()> {
        match self.state {
            SessionState::Open => Ok(()),
            SessionState::Finalized => Err(Error::State("session is already finalized".into())),
            SessionState::Abandoned => Err(Error::State("session was abandoned".into())),
        }
    }

    fn slot_mut(&mut self, n: u8, allowed: std::ops::RangeInclusive<u8>) -> Result<&mut Slot> {
        if !allowed.contains(&n) {
            return Err(ContractViolation::new(format!(
                "slot {n} outside {}..={}",
                allowed.start(),
                allowed.end()
            ))
            .into());
        }
        Ok(&mut self.slots[usize::from(n - 1)])
    }

    /// Seed for the n-th suggestion shown on a slot.
    fn suggestion_seed(&self, slot: u8, attempt: u32) -> u64 {
        let mut h = Sha256::new();
        h.update(self.id.as_str().as_bytes());
        h.update([slot]);
        h.update(attempt.to_le_bytes());
        let bytes: [u8; 8] = h.finalize()[..8].try_into().expect("8 bytes");
        u64::from_le_bytes(bytes)
    }

    pub fn view(&self) -> SessionView {
        SessionView {
            session_id: self.id.clone(),
            state: self.state,
            slots: self
                .slots
                .iter()
                .enumerate()
                .map(|(i, s)| SlotView {
                    slot: i as u8 + 1,
                    kind: s.kind,
                    question: s.question.clone(),
                    answer_state: s.answer_state,
                    band_at_save: s.band_at_save,
                    weak_override: s.weak_override,
                })
                .collect(),
        }
    }
}

/// Answer-free snapshot of a session for display and API responses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionView {
    pub session_id: SessionId,
    pub state: SessionState,
    pub slots: Vec<SlotView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SlotView {
    pub slot: u8,
    pub kind: QuestionKind,
    pub question: Option<SlotQuestion>,
    pub answer_state: AnswerState,
    pub band_at_save: Option<Band>,
    pub weak_override: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubmitStatus {
    Accepted,
    WeakNeedsConfirmation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmitOutcome {
    pub status: SubmitStatus,
    pub report: StrengthReport,
    /// Band after the common-answer downgrade.
    pub effective_band: Band,
    pub common_hit: Option<String>,
    pub suggestion: Option<Suggestion>,
}

/// Everything a session needs besides its own state.
#[derive(Debug, Clone)]
pub struct Engine {
    catalog: QuestionCatalog,
    wordlists: WordlistSet,
    templates: TemplateSet,
    hash_params: HashParams,
    session_ttl: Duration,
}

impl Engine {
    pub fn new(catalog: QuestionCatalog, wordlists: WordlistSet, templates: TemplateSet) -> Result<Self> {
        catalog.check_templates(&templates)?;
        templates.resolve(GENERIC_CATEGORY)?;
        Ok(Engine {
            catalog,
            wordlists,
            templates,
            hash_params: HashParams::default(),
            session_ttl: DEFAULT_SESSION_TTL,
        })
    }

    /// Shipped catalog, fixture wordlists and templates.
    pub fn builtin() -> Self {
        Engine::new(
            crate::builtin::catalog(),
            crate::builtin::wordlists(),
            crate::builtin::templates(),
        )
        .expect("builtin data is consistent")
    }

    pub fn with_hash_params(mut self, params: HashParams) -> Self {
        self.hash_params = params;
        self
    }

    pub fn with_session_ttl(mut self, ttl: Duration) -> Self {
        self.session_ttl = ttl;
        self
    }

    pub fn catalog(&self) -> &QuestionCatalog {
        &self.catalog
    }

    pub fn wordlists(&self) -> &WordlistSet {
        &self.wordlists
    }

    pub fn templates(&self) -> &TemplateSet {
        &self.templates
    }

    pub fn hash_params(&self) -> HashParams {
        self.hash_params
    }

    pub fn session_ttl(&self) -> Duration {
        self.session_ttl
    }

    pub fn create_session(&self) -> Session {
        let now = Utc::now();
        Session {
            id: SessionId::fresh(),
            slots: [
                Slot::new(QuestionKind::Predefined),
                Slot::new(QuestionKind::Predefined),
                Slot::new(QuestionKind::Predefined),
                Slot::new(QuestionKind::Custom),
                Slot::new(QuestionKind::Custom),
            ],
            state: SessionState::Open,
            created_at: now,
            last_activity: now,
        }
    }

    /// Expires the session if idle, then requires it to be open.
    fn begin(&self, session: &mut Session) -> Result<()> {
        let now = Utc::now();
        session.expire_if_idle(now, self.session_ttl);
        session.require_open()?;
        session.last_activity = now;
        Ok(())
    }

    pub fn select_predefined(&self, session: &mut Session, slot: u8, question_id: &str) -> Result<()> {
        self.begin(session)?;
        session.slot_mut(slot, PREDEFINED_SLOTS)?;
        let q = self
            .catalog
            .get(question_id)
            .ok_or_else(|| Error::NotFound(format!("question {question_id:?}")))?;
        let taken = session.slots.iter().enumerate().any(|(i, s)| {
            i + 1 != usize::from(slot) && s.question.as_ref().and_then(|q| q.id.as_deref()) == Some(question_id)
        });
        if taken {
            return Err(Error::Conflict(format!("question {question_id:?} is already used by another slot")));
        }
        let target = session.slot_mut(slot, PREDEFINED_SLOTS)?;
        target.question = Some(SlotQuestion {
            id: Some(q.id.clone()),
            text: q.text.clone(),
            category: q.category.clone(),
        });
        target.clear_answer();
        Ok(())
    }

    pub fn set_custom_question(&self, session: &mut Session, slot: u8, text: &str) -> Result<()> {
        self.begin(session)?;
        session.slot_mut(slot, CUSTOM_SLOTS)?;
        let norm = normalize_answer(text);
        if norm.is_empty() {
            return Err(Error::validation_field("text", "question text is empty"));
        }
        if self.catalog.contains_text(text) {
            return Err(Error::Conflict("question duplicates a predefined question".into()));
        }
        let other = if slot == *CUSTOM_SLOTS.start() { *CUSTOM_SLOTS.end() } else { *CUSTOM_SLOTS.start() };
        let clash = session.slots[usize::from(other - 1)]
            .question
            .as_ref()
            .is_some_and(|q| normalize_answer(&q.text) == norm);
        if clash {
            return Err(Error::Conflict(format!("question duplicates slot {other}")));
        }
        let target = session.slot_mut(slot, CUSTOM_SLOTS)?;
        target.question = Some(SlotQuestion {
            id: None,
            text: text.trim().to_owned(),
            category: GENERIC_CATEGORY.to_owned(),
        });
        target.clear_answer();
        Ok(())
    }

    pub fn submit_answer(&self, session: &mut Session, slot: u8, answer: &str) -> Result<SubmitOutcome> {
        self.begin(session)?;
        session.slot_mut(slot, 1..=SLOT_COUNT as u8)?;
        let normal = Zeroizing::new(match_normal(answer));
        if normal.is_empty() {
            return Err(Error::validation_field("answer", "answer is empty"));
        }
        let category = session.slots[usize::from(slot - 1)]
            .question
            .as_ref()
            .map(|q| q.category.clone())
            .ok_or_else(|| Error::State(format!("slot {slot} has no question yet")))?;

        let report = evaluate(&normal);
        let common_hit = self.wordlists.is_common(&normal).map(str::to_owned);
        let effective_band = if common_hit.is_some() { Band::Weak } else { report.band };

        if effective_band != Band::Weak {
            let target = session.slot_mut(slot, 1..=SLOT_COUNT as u8)?;
            target.answer_state = AnswerState::Accepted;
            target.answer_plain = Some(normal);
            target.band_at_save = Some(effective_band);
            target.weak_override = false;
            return Ok(SubmitOutcome {
                status: SubmitStatus::Accepted,
                report,
                effective_band,
                common_hit,
                suggestion: None,
            });
        }

        let attempt = session.slots[usize::from(slot - 1)].attempts;
        let seed = session.suggestion_seed(slot, attempt);
        let suggestion = suggest(&category, seed, &self.templates, &self.wordlists)?;
        let target = session.slot_mut(slot, 1..=SLOT_COUNT as u8)?;
        target.attempts = attempt.wrapping_add(1);
        target.answer_state = AnswerState::PendingWeakConfirmation;
        target.answer_plain = Some(normal);
        target.band_at_save = Some(Band::Weak);
        target.weak_override = false;
        Ok(SubmitOutcome {
            status: SubmitStatus::WeakNeedsConfirmation,
            report,
            effective_band,
            common_hit,
            suggestion: Some(suggestion),
        })
    }

    /// Keeps a pending weak answer. The confirmed text must equal the
    /// pending one after trimming and NFC; anything else forces a new submit.
    pub fn confirm_weak(&self, session: &mut Session, slot: u8, answer: &str) -> Result<()> {
        self.begin(session)?;
        let target = session.slot_mut(slot, 1..=SLOT_COUNT as u8)?;
        if target.answer_state != AnswerState::PendingWeakConfirmation {
            return Err(Error::State(format!("slot {slot} has no answer awaiting confirmation")));
        }
        let normal = Zeroizing::new(match_normal(answer));
        if target.answer_plain.as_deref() != Some(&normal) {
            return Err(Error::Conflict("answer differs from the pending one; submit it again".into()));
        }
        target.answer_state = AnswerState::Accepted;
        target.band_at_save = Some(Band::Weak);
        target.weak_override = true;
        Ok(())
    }

    /// Hashes the five accepted answers into a profile and closes the
    /// session. Plaintext answers are wiped from the session.
    pub fn finalize(&self, session: &mut Session, threshold: u8) -> Result<StoredProfile> {
        self.begin(session)?;
        if !(1..=SLOT_COUNT as u8).contains(&threshold) {
            return Err(Error::validation_field(
                "threshold",
                format!("recovery threshold {threshold} outside 1..={SLOT_COUNT}"),
            ));
        }
        let missing: Vec<u8> = session
            .slots
            .iter()
            .enumerate()
            .filter(|(_, s)| s.answer_state != AnswerState::Accepted)
            .map(|(i, _)| i as u8 + 1)
            .collect();
        if !missing.is_empty() {
            return Err(Error::Incomplete { slots: missing });
        }

        let salts = fresh_salts(SLOT_COUNT);
        let mut entries = Vec::with_capacity(SLOT_COUNT);
        for (slot, salt) in session.slots.iter().zip(&salts) {
            let answer = slot.answer_plain.as_ref().expect("accepted slot holds its answer");
            let question = slot.question.as_ref().expect("accepted slot has a question");
            let digest = self.hash_params.digest(answer, salt)?;
            entries.push(ProfileEntry {
                question: question.text.clone(),
                salt: salt.to_vec(),
                digest: digest.to_vec(),
                band_at_save: slot.band_at_save.expect("accepted slot has a band"),
                weak_override: slot.weak_override,
            });
        }

        session.erase_plaintext();
        session.state = SessionState::Finalized;
        Ok(StoredProfile {
            profile_id: random_token(16),
            entries,
            recovery_threshold: threshold,
            kdf: self.hash_params,
            created_at: Utc::now(),
        })
    }
}
