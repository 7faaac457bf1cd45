use serde::{Deserialize, Serialize};

use crate::guessability::WordlistSet;
use crate::strength::{evaluate, Band, Color, RuleVector};

/// What the meter shows for one draft answer: the rubric result plus the
/// common-answer category, if any. Shared by the HTTP `/score` route and
/// `sqmeter score --json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScorePayload {
    pub rules: RuleVector,
    pub score: u8,
    pub band: Band,
    pub color: Color,
    pub common: Option<String>,
}

pub fn score_answer(answer: &str, lists: &WordlistSet) -> ScorePayload {
    let report = evaluate(answer);
    ScorePayload {
        rules: report.rules,
        score: report.score,
        band: report.band,
        color: report.color,
        common: lists.is_common(answer).map(str::to_owned),
    }
}
