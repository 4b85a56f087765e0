use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Phase, SessionState, StimulusClass, TrainingError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassScore {
    pub n: usize,
    pub correct: usize,
    pub pct: f64,
}

/// Scores of a completed session. Percentages are kept at full precision;
/// [`SessionReport::display_pct`] rounds for presentation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionReport {
    pub total: usize,
    pub correct: usize,
    pub overall_pct: f64,
    pub overall_display: String,
    pub per_class: BTreeMap<StimulusClass, ClassScore>,
    pub median_latency_ms: f64,
}

impl SessionReport {
    pub fn display_pct(&self) -> String {
        format_pct(self.overall_pct)
    }
}

/// Rounds half away from zero: 76.92 → "77%", 12.5 → "13%".
pub fn format_pct(pct: f64) -> String {
    format!("{}%", pct.round() as i64)
}

fn pct(correct: usize, n: usize) -> f64 {
    100.0 * correct as f64 / n as f64
}

fn median(values: &mut [u64]) -> f64 {
    values.sort_unstable();
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid] as f64
    } else {
        (values[mid - 1] as f64 + values[mid] as f64) / 2.0
    }
}

pub fn score_session(state: &SessionState) -> Result<SessionReport, TrainingError> {
    if state.phase != Phase::Completed {
        return Err(TrainingError::NotCompleted);
    }
    if state.responses.is_empty() {
        return Err(TrainingError::EmptySession);
    }
    let mut per_class: BTreeMap<StimulusClass, ClassScore> = BTreeMap::new();
    for record in &state.responses {
        let class = state
            .stimuli
            .iter()
            .find(|s| s.id() == record.stimulus_id)
            .map(|s| s.class())
            .ok_or(TrainingError::EmptySession)?;
        let entry = per_class.entry(class).or_insert(ClassScore {
            n: 0,
            correct: 0,
            pct: 0.0,
        });
        entry.n += 1;
        entry.correct += usize::from(record.correct);
    }
    for score in per_class.values_mut() {
        score.pct = pct(score.correct, score.n);
    }
    let total = state.responses.len();
    let correct = state.responses.iter().filter(|r| r.correct).count();
    let overall_pct = pct(correct, total);
    let mut latencies: Vec<u64> = state.responses.iter().map(|r| r.latency).collect();
    Ok(SessionReport {
        total,
        correct,
        overall_pct,
        overall_display: format_pct(overall_pct),
        per_class,
        median_latency_ms: median(&mut latencies),
    })
}
