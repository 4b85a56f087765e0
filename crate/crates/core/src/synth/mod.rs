//! Sound rendering: pitch mapping, enveloped notes, event pings, and the
//! WAV/SVG encoders for the audio and visual channels.

mod config;
mod events;
mod plot;
mod wav;

pub use config::{ConfigError, Mapping, SonifyConfig, Waveform};
pub use events::{Event, EventList};
pub use plot::render_plot;
pub use wav::{write_wav, WAV_HEADER_LEN};

use std::f64::consts::TAU;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::Series;

/// Length of one discrete-event ping.
pub const PING_DURATION: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("invalid sound configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("value {0} is outside [0, 1]")]
    OutOfRange(f64),
    #[error("frequency {0} Hz is not in [0, Nyquist)")]
    BadFrequency(f64),
    #[error("duration {0} s is negative or not finite")]
    BadDuration(f64),
    #[error("value {value} at index {index} is outside [0, 1]; normalize first")]
    NotNormalized { index: usize, value: f64 },
    #[error("timeline {0} s must be positive and finite")]
    BadTimeline(f64),
    #[error("segment {start}..{end} is shorter than two samples")]
    TooShort { start: usize, end: usize },
    #[error("segment {start}..{end} lies outside a buffer of {len} samples")]
    SegmentOutOfBounds { start: usize, end: usize, len: usize },
    #[error("plot must be at least 64x64 pixels, got {width}x{height}")]
    BadDimensions { width: u32, height: u32 },
}

impl SynthError {
    pub fn kind(&self) -> &'static str {
        match self {
            SynthError::Config(_) => "InvalidConfig",
            SynthError::OutOfRange(_) => "OutOfRange",
            SynthError::BadFrequency(_) => "BadFrequency",
            SynthError::BadDuration(_) => "BadDuration",
            SynthError::NotNormalized { .. } => "NotNormalized",
            SynthError::BadTimeline(_) => "BadTimeline",
            SynthError::TooShort { .. } => "TooShort",
            SynthError::SegmentOutOfBounds { .. } => "SegmentOutOfBounds",
            SynthError::BadDimensions { .. } => "BadDimensions",
        }
    }
}

/// Mono PCM samples in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AudioBuffer {
    pub sample_rate: u32,
    pub samples: Vec<f64>,
}

impl AudioBuffer {
    pub fn silence(sample_rate: u32, len: usize) -> Self {
        AudioBuffer {
            sample_rate,
            samples: vec![0.0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }
}

/// Number of samples spanning `duration` seconds.
pub fn sample_count(duration: f64, sample_rate: u32) -> usize {
    (duration * f64::from(sample_rate)).round() as usize
}

/// Maps a normalized value to a frequency between `f_min` and `f_max`.
/// Both laws hit `f_min` exactly at 0 and `f_max` exactly at 1.
pub fn map_value_to_freq(v: f64, config: &SonifyConfig) -> Result<f64, SynthError> {
    if !(0.0..=1.0).contains(&v) {
        return Err(SynthError::OutOfRange(v));
    }
    let (lo, hi) = (config.f_min, config.f_max);
    let f = match config.mapping {
        Mapping::Linear => (1.0 - v) * lo + v * hi,
        Mapping::Logarithmic => {
            if v == 1.0 {
                hi
            } else {
                (lo * (hi / lo).powf(v)).min(hi)
            }
        }
    };
    Ok(f)
}

/// Renders one tone starting at phase 0 with linear attack/release ramps of
/// `envelope_ramp` seconds (at most half the note each).
pub fn render_note(freq: f64, config: &SonifyConfig, duration: f64) -> Result<AudioBuffer, SynthError> {
    let sr = f64::from(config.sample_rate);
    if !(freq.is_finite() && freq >= 0.0 && freq < sr / 2.0) {
        return Err(SynthError::BadFrequency(freq));
    }
    if !(duration.is_finite() && duration >= 0.0) {
        return Err(SynthError::BadDuration(duration));
    }
    let n = sample_count(duration, config.sample_rate);
    let total = n as f64 / sr;
    let ramp = config.envelope_ramp.min(total / 2.0);
    let samples = (0..n)
        .map(|i| {
            let t = i as f64 / sr;
            let env = if ramp > 0.0 {
                (t / ramp).min((total - t) / ramp).min(1.0)
            } else {
                1.0
            };
            let phase = (TAU * freq * t).sin();
            let wave = match config.waveform {
                Waveform::Sine => phase,
                Waveform::Square => {
                    if phase > 0.0 {
                        1.0
                    } else if phase < 0.0 {
                        -1.0
                    } else {
                        0.0
                    }
                }
            };
            config.amplitude * env * wave
        })
        .collect();
    Ok(AudioBuffer {
        sample_rate: config.sample_rate,
        samples,
    })
}

/// One note per point in ascending x order; NaN points become silent notes.
pub fn sonify_series(series: &Series, config: &SonifyConfig) -> Result<AudioBuffer, SynthError> {
    config.validate()?;
    if let Some((index, &value)) = series
        .y()
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_nan() && !(0.0..=1.0).contains(*v))
    {
        return Err(SynthError::NotNormalized { index, value });
    }
    let mut order: Vec<usize> = (0..series.len()).collect();
    order.sort_by(|&a, &b| series.x()[a].total_cmp(&series.x()[b]));

    let per_note = sample_count(config.note_duration, config.sample_rate);
    let mut samples = Vec::with_capacity(per_note * series.len());
    for i in order {
        let v = series.y()[i];
        if v.is_nan() {
            samples.resize(samples.len() + per_note, 0.0);
        } else {
            let freq = map_value_to_freq(v, config)?;
            samples.extend(render_note(freq, config, config.note_duration)?.samples);
        }
    }
    Ok(AudioBuffer {
        sample_rate: config.sample_rate,
        samples,
    })
}

/// Places a 50 ms sine ping per event on a silent timeline of `timeline` seconds.
///
/// Event times are rescaled affinely from `[t_first, t_last]` onto
/// `[0, timeline - 50 ms]` so the last ping ends inside the buffer (onto
/// `[0, timeline]` when the timeline is shorter than a ping). A lone event, or
/// events sharing one time, start at 0. Pitch follows `weight / max_weight`;
/// overlapping pings add and the sum is clipped to `[-1, 1]`.
pub fn sonify_events(events: &EventList, timeline: f64, config: &SonifyConfig) -> Result<AudioBuffer, SynthError> {
    config.validate()?;
    if !(timeline.is_finite() && timeline > 0.0) {
        return Err(SynthError::BadTimeline(timeline));
    }
    let total = sample_count(timeline, config.sample_rate);
    let mut out = AudioBuffer::silence(config.sample_rate, total);
    let (Some(first), Some(last)) = (events.events().first(), events.events().last()) else {
        return Ok(out);
    };

    let ping_config = SonifyConfig {
        waveform: Waveform::Sine,
        ..*config
    };
    let span = last.time - first.time;
    let usable = if timeline > PING_DURATION {
        timeline - PING_DURATION
    } else {
        timeline
    };
    let max_weight = events.max_weight();
    for event in events.events() {
        let at = if span > 0.0 {
            (event.time - first.time) / span * usable
        } else {
            0.0
        };
        let v = if max_weight > 0.0 {
            (event.weight / max_weight).min(1.0)
        } else {
            0.0
        };
        let freq = map_value_to_freq(v, &ping_config)?;
        let ping = render_note(freq, &ping_config, PING_DURATION)?;
        let start = sample_count(at, config.sample_rate).min(total);
        for (dst, src) in out.samples[start..].iter_mut().zip(&ping.samples) {
            *dst += src;
        }
    }
    for s in &mut out.samples {
        *s = s.clamp(-1.0, 1.0);
    }
    Ok(out)
}

/// Frequency estimate from positive-going zero crossings per second over `segment`.
///
/// A crossing is counted at sample `i` when `s[i-1] <= 0 < s[i]`.
pub fn estimate_freq(buffer: &AudioBuffer, segment: Range<usize>) -> Result<f64, SynthError> {
    let Range { start, end } = segment;
    if end > buffer.len() || start > end {
        return Err(SynthError::SegmentOutOfBounds {
            start,
            end,
            len: buffer.len(),
        });
    }
    if end - start < 2 {
        return Err(SynthError::TooShort { start, end });
    }
    let crossings = buffer.samples[start..end]
        .windows(2)
        .filter(|w| w[0] <= 0.0 && w[1] > 0.0)
        .count();
    let seconds = (end - start) as f64 / f64::from(buffer.sample_rate);
    Ok(crossings as f64 / seconds)
}
