use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{expected_key, Key, Stimulus, TrainingError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Intro,
    Presenting,
    AwaitingResponse,
    Feedback,
    Completed,
}

/// Input to [`SessionState::advance`]. Latency is measured by the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SessionEvent {
    Begin,
    SkipIntro,
    PresentationDone,
    KeyPress {
        key: Key,
        /// milliseconds
        latency: u64,
    },
    Replay,
    FeedbackDone,
}

impl SessionEvent {
    pub fn name(&self) -> &'static str {
        match self {
            SessionEvent::Begin => "Begin",
            SessionEvent::SkipIntro => "SkipIntro",
            SessionEvent::PresentationDone => "PresentationDone",
            SessionEvent::KeyPress { .. } => "KeyPress",
            SessionEvent::Replay => "Replay",
            SessionEvent::FeedbackDone => "FeedbackDone",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseRecord {
    pub stimulus_id: u32,
    pub key: Key,
    pub correct: bool,
    /// milliseconds
    pub latency: u64,
}

impl ResponseRecord {
    /// Text shown right after the answer.
    pub fn feedback_text(&self) -> &'static str {
        if self.correct {
            "Correct"
        } else {
            "Incorrect"
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SessionOptions {
    pub allow_skip_intro: bool,
    pub allow_replay: bool,
}

impl Default for SessionOptions {
    fn default() -> Self {
        SessionOptions {
            allow_skip_intro: true,
            allow_replay: true,
        }
    }
}

/// Immutable snapshot of a training session. Transitions produce a new value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionState {
    pub stimuli: Arc<[Stimulus]>,
    pub cursor: usize,
    pub phase: Phase,
    pub responses: Vec<ResponseRecord>,
    pub allow_skip_intro: bool,
    pub allow_replay: bool,
}

impl SessionState {
    pub fn new(stimuli: Vec<Stimulus>, options: SessionOptions) -> Result<Self, TrainingError> {
        if stimuli.is_empty() {
            return Err(TrainingError::EmptySession);
        }
        Ok(SessionState {
            stimuli: stimuli.into(),
            cursor: 0,
            phase: Phase::Intro,
            responses: Vec::new(),
            allow_skip_intro: options.allow_skip_intro,
            allow_replay: options.allow_replay,
        })
    }

    /// Stimulus being presented or answered; `None` before the first
    /// presentation and after completion.
    pub fn current(&self) -> Option<&Stimulus> {
        match self.phase {
            Phase::Intro | Phase::Completed => None,
            _ => self.stimuli.get(self.cursor),
        }
    }

    pub fn last_response(&self) -> Option<&ResponseRecord> {
        self.responses.last()
    }

    /// The transition function of the session machine:
    ///
    /// ```text
    /// Intro            --Begin | SkipIntro-->  Presenting
    /// Presenting       --PresentationDone-->   AwaitingResponse
    /// AwaitingResponse --Replay-->             Presenting (same stimulus)
    /// AwaitingResponse --KeyPress-->           Feedback (response recorded)
    /// Feedback         --FeedbackDone-->       Presenting (next) | Completed
    /// ```
    pub fn advance(&self, event: SessionEvent) -> Result<SessionState, TrainingError> {
        let illegal = || TrainingError::IllegalEvent {
            phase: self.phase,
            event: event.name(),
        };
        let mut next = self.clone();
        match (self.phase, event) {
            (Phase::Intro, SessionEvent::Begin) => next.phase = Phase::Presenting,
            (Phase::Intro, SessionEvent::SkipIntro) => {
                if !self.allow_skip_intro {
                    return Err(TrainingError::SkipDisabled);
                }
                next.phase = Phase::Presenting;
            }
            (Phase::Presenting, SessionEvent::PresentationDone) => next.phase = Phase::AwaitingResponse,
            (Phase::AwaitingResponse, SessionEvent::Replay) => {
                if !self.allow_replay {
                    return Err(TrainingError::ReplayDisabled);
                }
                next.phase = Phase::Presenting;
            }
            (Phase::AwaitingResponse, SessionEvent::KeyPress { key, latency }) => {
                let stimulus = &self.stimuli[self.cursor];
                next.responses.push(ResponseRecord {
                    stimulus_id: stimulus.id(),
                    key,
                    correct: key == expected_key(stimulus.class()),
                    latency,
                });
                next.phase = Phase::Feedback;
            }
            (Phase::Feedback, SessionEvent::FeedbackDone) => {
                if self.cursor + 1 < self.stimuli.len() {
                    next.cursor += 1;
                    next.phase = Phase::Presenting;
                } else {
                    next.phase = Phase::Completed;
                }
            }
            _ => return Err(illegal()),
        }
        Ok(next)
    }
}
