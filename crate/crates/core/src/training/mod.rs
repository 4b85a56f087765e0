//! Perception-training sessions: stimulus blocks of four signal classes,
//! a pure present → respond → feedback state machine, and session scoring.

mod participant;
mod report;
mod session;
mod stimulus;

pub use participant::synthetic_participant;
pub use report::{score_session, ClassScore, SessionReport};
pub use session::{Phase, ResponseRecord, SessionEvent, SessionOptions, SessionState};
pub use stimulus::{generate_block, Block, Modality, Stimulus, SIGNAL_POINTS};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::synth::ConfigError;

/// Shape of a training signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StimulusClass {
    Increasing,
    Decreasing,
    Sine,
    Square,
}

impl StimulusClass {
    pub const ALL: [StimulusClass; 4] = [
        StimulusClass::Increasing,
        StimulusClass::Decreasing,
        StimulusClass::Sine,
        StimulusClass::Square,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StimulusClass::Increasing => "Increasing",
            StimulusClass::Decreasing => "Decreasing",
            StimulusClass::Sine => "Sine",
            StimulusClass::Square => "Square",
        }
    }
}

/// Arrow key used to answer a stimulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Key {
    Up,
    Down,
    Left,
    Right,
}

impl Key {
    pub const ALL: [Key; 4] = [Key::Up, Key::Down, Key::Left, Key::Right];
}

/// Up → Increasing, Down → Decreasing, Left → Sine, Right → Square.
pub fn expected_key(class: StimulusClass) -> Key {
    match class {
        StimulusClass::Increasing => Key::Up,
        StimulusClass::Decreasing => Key::Down,
        StimulusClass::Sine => Key::Left,
        StimulusClass::Square => Key::Right,
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrainingError {
    #[error("event {event} is not allowed during phase {phase:?}")]
    IllegalEvent { phase: Phase, event: &'static str },
    #[error("skipping the introduction is disabled for this session")]
    SkipDisabled,
    #[error("replay is disabled for this session")]
    ReplayDisabled,
    #[error("session is not completed yet")]
    NotCompleted,
    #[error("session has no stimuli")]
    EmptySession,
    #[error("block must be 1, 2 or 3, got {0}")]
    BadBlock(u32),
    #[error("per-class count must be at least 1")]
    BadCount,
    #[error("invalid sound configuration: {0}")]
    Config(#[from] ConfigError),
}

impl TrainingError {
    pub fn kind(&self) -> &'static str {
        match self {
            TrainingError::IllegalEvent { .. } => "IllegalEvent",
            TrainingError::SkipDisabled => "SkipDisabled",
            TrainingError::ReplayDisabled => "ReplayDisabled",
            TrainingError::NotCompleted => "NotCompleted",
            TrainingError::EmptySession => "EmptySession",
            TrainingError::BadBlock(_) => "BadBlock",
            TrainingError::BadCount => "BadCount",
            TrainingError::Config(_) => "InvalidConfig",
        }
    }
}
