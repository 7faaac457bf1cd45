//! Exhaustive exploration of the setup state machine over a reduced
//! catalog. States are compared through the answer-free session view,
//! which is complete for the small answer alphabet used here: a strong
//! answer is always accepted as Strong and the weak one always pends.

use std::collections::{HashSet, VecDeque};

use sqmeter_core::catalog::{Question, QuestionCatalog};
use sqmeter_core::session::SlotView;
use sqmeter_core::{
    builtin, AnswerState, Engine, HashParams, QuestionKind, Session, SessionState, WordlistSet,
};

pub const STRONG: &str = "CrickICC15@Aus.";
pub const WEAK: &str = "cricket";
const CUSTOM_A: &str = "What was my first coach's nickname?";
const CUSTOM_B: &str = "Which street did my grandparents live on?";

#[derive(Debug, Clone, Copy)]
pub enum Action {
    Select(u8, &'static str),
    Custom(u8, &'static str),
    Submit(u8, &'static str),
    Confirm(u8, &'static str),
    Finalize,
}

const QUESTION_IDS: [&str; 4] = ["m-q1", "m-q2", "m-q3", "m-q4"];
const QUESTION_TEXTS: [&str; 4] = [
    "What is your favorite sport?",
    "What is your favorite color?",
    "What was the name of your first pet?",
    "In what city were you born?",
];

/// Engine whose catalog holds only the first `n` model questions.
pub fn reduced_engine(n: usize) -> Engine {
    let questions = (0..n)
        .map(|i| Question::new(QUESTION_IDS[i], QUESTION_TEXTS[i], "generic"))
        .collect();
    let catalog = QuestionCatalog::with_min_size(questions, n).unwrap();
    Engine::new(catalog, WordlistSet::new(builtin::wordlists().lists().iter().cloned()), builtin::templates())
        .unwrap()
        .with_hash_params(HashParams::minimal())
}

pub fn actions(n_questions: usize) -> Vec<Action> {
    let mut out = Vec::new();
    let mut ids: Vec<&'static str> = QUESTION_IDS[..n_questions].to_vec();
    ids.push("m-missing");
    for slot in 1..=4u8 {
        for id in &ids {
            out.push(Action::Select(slot, id));
        }
    }
    for slot in 3..=5u8 {
        for text in [CUSTOM_A, CUSTOM_B, "what is your favorite sport?", "   "] {
            out.push(Action::Custom(slot, text));
        }
    }
    for slot in 1..=5u8 {
        for a in [STRONG, WEAK, ""] {
            out.push(Action::Submit(slot, a));
        }
        for a in [WEAK, STRONG] {
            out.push(Action::Confirm(slot, a));
        }
    }
    out.push(Action::Finalize);
    out
}

fn apply(engine: &Engine, s: &mut Session, a: Action) -> bool {
    match a {
        Action::Select(slot, id) => engine.select_predefined(s, slot, id).is_ok(),
        Action::Custom(slot, t) => engine.set_custom_question(s, slot, t).is_ok(),
        Action::Submit(slot, t) => engine.submit_answer(s, slot, t).is_ok(),
        Action::Confirm(slot, t) => engine.confirm_weak(s, slot, t).is_ok(),
        Action::Finalize => engine.finalize(s, 3).map(|p| p.entries.len() == 5).unwrap_or(false),
    }
}

fn fold(s: &str) -> String {
    s.trim().to_lowercase()
}

/// Structural invariants checked on every reachable state.
fn check(view_slots: &[SlotView], state: SessionState, n_questions: usize) -> Vec<String> {
    let mut bad = Vec::new();
    let catalog_texts: HashSet<String> = QUESTION_TEXTS[..n_questions].iter().map(|t| fold(t)).collect();
    let mut ids = HashSet::new();
    let mut customs = HashSet::new();
    for v in view_slots {
        let expected = if v.slot <= 3 { QuestionKind::Predefined } else { QuestionKind::Custom };
        if v.kind != expected {
            bad.push(format!("slot {} has kind {:?}", v.slot, v.kind));
        }
        if v.answer_state != AnswerState::Empty && v.question.is_none() {
            bad.push(format!("slot {} has an answer but no question", v.slot));
        }
        if let Some(q) = &v.question {
            match (v.kind, &q.id) {
                (QuestionKind::Predefined, Some(id)) => {
                    if !QUESTION_IDS[..n_questions].contains(&id.as_str()) || !ids.insert(id.clone()) {
                        bad.push(format!("slot {} holds invalid or repeated id {id}", v.slot));
                    }
                }
                (QuestionKind::Custom, None) => {
                    let t = fold(&q.text);
                    if t.is_empty() || catalog_texts.contains(&t) || !customs.insert(t) {
                        bad.push(format!("slot {} holds invalid custom text", v.slot));
                    }
                }
                _ => bad.push(format!("slot {} question kind mismatch", v.slot)),
            }
        }
        if v.answer_state == AnswerState::Accepted && v.weak_override != (v.band_at_save == Some(sqmeter_core::Band::Weak)) {
            bad.push(format!("slot {} weak_override bookkeeping", v.slot));
        }
    }
    if state == SessionState::Finalized {
        let all_accepted = view_slots.iter().all(|v| v.answer_state == AnswerState::Accepted);
        if !(all_accepted && ids.len() == 3 && customs.len() == 2) {
            bad.push("finalized without 3 predefined + 2 custom questions and 5 accepted answers".into());
        }
    }
    bad
}

#[derive(Debug, Default)]
pub struct ModelReport {
    pub states: usize,
    pub transitions: usize,
    pub finalized_states: usize,
    pub deepest: usize,
    pub violations: Vec<String>,
}

/// Breadth-first search over every state reachable within `depth` actions.
/// Covering each reachable state once is equivalent to replaying every
/// action sequence, since transitions are deterministic and the checked
/// properties depend only on the state.
pub fn explore(n_questions: usize, depth: usize) -> ModelReport {
    let engine = reduced_engine(n_questions);
    let actions = actions(n_questions);
    let root = engine.create_session();
    let key = |s: &Session| (s.state(), s.view().slots);

    let mut report = ModelReport::default();
    let mut seen: HashSet<(SessionState, Vec<SlotView>)> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(key(&root));
    queue.push_back((root, 0usize));
    while let Some((session, d)) = queue.pop_front() {
        report.states += 1;
        report.deepest = report.deepest.max(d);
        let view = session.view();
        for v in check(&view.slots, session.state(), n_questions) {
            report.violations.push(format!("depth {d}: {v}"));
        }
        if session.state() == SessionState::Finalized {
            report.finalized_states += 1;
        }
        if d == depth {
            continue;
        }
        for &a in &actions {
            let mut next = session.clone();
            let before = session.state();
            let ok = apply(&engine, &mut next, a);
            report.transitions += 1;
            if next.state() == SessionState::Finalized && before != SessionState::Finalized && !matches!(a, Action::Finalize) {
                report.violations.push(format!("{a:?} finalized the session"));
            }
            if !ok && next.state() != before {
                report.violations.push(format!("failed {a:?} changed session state"));
            }
            if seen.insert(key(&next)) {
                queue.push_back((next, d + 1));
            }
        }
    }
    report
}
