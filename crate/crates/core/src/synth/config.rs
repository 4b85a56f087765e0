use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Waveform {
    #[default]
    Sine,
    Square,
}

/// Law mapping a normalized value onto `[f_min, f_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mapping {
    #[default]
    Linear,
    Logarithmic,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("f_min must be at least 20 Hz and below f_max (got {f_min}..{f_max})")]
    FrequencyOrder { f_min: f64, f_max: f64 },
    #[error("f_max {f_max} Hz exceeds 0.45 x sample rate ({limit} Hz)")]
    AboveNyquistMargin { f_max: f64, limit: f64 },
    #[error("sample_rate must be positive")]
    SampleRate,
    #[error("note_duration {note_duration} s must be finite and at least twice envelope_ramp ({envelope_ramp} s)")]
    NoteDuration { note_duration: f64, envelope_ramp: f64 },
    #[error("envelope_ramp {0} s must be finite and non-negative")]
    EnvelopeRamp(f64),
    #[error("amplitude {0} must be in (0, 1]")]
    Amplitude(f64),
}

impl ConfigError {
    /// Name of the offending configuration field.
    pub fn field(&self) -> &'static str {
        match self {
            ConfigError::FrequencyOrder { .. } => "f_min",
            ConfigError::AboveNyquistMargin { .. } => "f_max",
            ConfigError::SampleRate => "sample_rate",
            ConfigError::NoteDuration { .. } => "note_duration",
            ConfigError::EnvelopeRamp(_) => "envelope_ramp",
            ConfigError::Amplitude(_) => "amplitude",
        }
    }
}

/// Synthesis settings. Missing JSON fields take the defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SonifyConfig {
    pub waveform: Waveform,
    pub mapping: Mapping,
    /// Hz
    pub f_min: f64,
    /// Hz
    pub f_max: f64,
    /// seconds per data point
    pub note_duration: f64,
    pub sample_rate: u32,
    pub amplitude: f64,
    /// attack and release length in seconds
    pub envelope_ramp: f64,
}

impl Default for SonifyConfig {
    fn default() -> Self {
        SonifyConfig {
            waveform: Waveform::Sine,
            mapping: Mapping::Linear,
            f_min: 220.0,
            f_max: 880.0,
            note_duration: 0.1,
            sample_rate: 44_100,
            amplitude: 0.8,
            envelope_ramp: 0.005,
        }
    }
}

impl SonifyConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.sample_rate == 0 {
            return Err(ConfigError::SampleRate);
        }
        if !(self.f_min >= 20.0 && self.f_min < self.f_max && self.f_max.is_finite()) {
            return Err(ConfigError::FrequencyOrder {
                f_min: self.f_min,
                f_max: self.f_max,
            });
        }
        let limit = 0.45 * f64::from(self.sample_rate);
        if self.f_max > limit {
            return Err(ConfigError::AboveNyquistMargin {
                f_max: self.f_max,
                limit,
            });
        }
        if !(self.envelope_ramp.is_finite() && self.envelope_ramp >= 0.0) {
            return Err(ConfigError::EnvelopeRamp(self.envelope_ramp));
        }
        if !(self.note_duration.is_finite() && self.note_duration >= 2.0 * self.envelope_ramp) {
            return Err(ConfigError::NoteDuration {
                note_duration: self.note_duration,
                envelope_ramp: self.envelope_ramp,
            });
        }
        if !(self.amplitude > 0.0 && self.amplitude <= 1.0) {
            return Err(ConfigError::Amplitude(self.amplitude));
        }
        Ok(())
    }

    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }
}
