use std::f64::consts::TAU;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{StimulusClass, TrainingError};
use crate::ingest::Series;
use crate::synth::{sonify_series, AudioBuffer, SonifyConfig};
use crate::transform::normalize;

/// Points per training signal.
pub const SIGNAL_POINTS: usize = 64;

/// Difficulty level of a stimulus block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Block {
    /// Clean signals, 3 periods for the periodic classes.
    Simple,
    /// Additive uniform noise of amplitude 0.1.
    Noisy,
    /// Noise 0.25 and 2–5 periods.
    Hard,
}

impl Block {
    pub fn from_number(n: u32) -> Result<Self, TrainingError> {
        match n {
            1 => Ok(Block::Simple),
            2 => Ok(Block::Noisy),
            3 => Ok(Block::Hard),
            other => Err(TrainingError::BadBlock(other)),
        }
    }

    pub fn number(self) -> u32 {
        match self {
            Block::Simple => 1,
            Block::Noisy => 2,
            Block::Hard => 3,
        }
    }

    fn noise(self) -> f64 {
        match self {
            Block::Simple => 0.0,
            Block::Noisy => 0.1,
            Block::Hard => 0.25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    AudioOnly,
    #[default]
    AudioVisual,
}

/// A training item: the signal, its sonification, and how it is presented.
///
/// The audio is not serialized; it is re-rendered from the series and config,
/// which reproduces it bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "StimulusRecord", try_from = "StimulusRecord")]
pub struct Stimulus {
    id: u32,
    class: StimulusClass,
    series: Series,
    audio: AudioBuffer,
    modality: Modality,
    config: SonifyConfig,
}

#[derive(Serialize, Deserialize)]
struct StimulusRecord {
    id: u32,
    class: StimulusClass,
    series: Series,
    modality: Modality,
    config: SonifyConfig,
}

impl From<Stimulus> for StimulusRecord {
    fn from(s: Stimulus) -> Self {
        StimulusRecord {
            id: s.id,
            class: s.class,
            series: s.series,
            modality: s.modality,
            config: s.config,
        }
    }
}

impl TryFrom<StimulusRecord> for Stimulus {
    type Error = String;

    fn try_from(r: StimulusRecord) -> Result<Self, Self::Error> {
        let audio = sonify_series(&r.series, &r.config).map_err(|e| e.to_string())?;
        Ok(Stimulus {
            id: r.id,
            class: r.class,
            series: r.series,
            audio,
            modality: r.modality,
            config: r.config,
        })
    }
}

impl Stimulus {
    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn class(&self) -> StimulusClass {
        self.class
    }

    pub fn series(&self) -> &Series {
        &self.series
    }

    pub fn audio(&self) -> &AudioBuffer {
        &self.audio
    }

    pub fn modality(&self) -> Modality {
        self.modality
    }

    pub fn config(&self) -> &SonifyConfig {
        &self.config
    }

    pub fn set_modality(&mut self, modality: Modality) {
        self.modality = modality;
    }
}

fn clean_signal(class: StimulusClass, periods: u32) -> Vec<f64> {
    let n = SIGNAL_POINTS;
    (0..n)
        .map(|i| {
            let ramp = i as f64 / (n - 1) as f64;
            let cycles = f64::from(periods) * i as f64 / n as f64;
            match class {
                StimulusClass::Increasing => ramp,
                StimulusClass::Decreasing => 1.0 - ramp,
                StimulusClass::Sine => 0.5 + 0.5 * (TAU * cycles).sin(),
                StimulusClass::Square => {
                    if cycles.fract() < 0.5 {
                        1.0
                    } else {
                        0.0
                    }
                }
            }
        })
        .collect()
}

/// Generates `per_class_count` stimuli of each class for `block` (1, 2 or 3),
/// shuffled by `seed`. Equal arguments give identical stimuli.
pub fn generate_block(
    block: u32,
    per_class_count: usize,
    seed: u64,
    config: &SonifyConfig,
) -> Result<Vec<Stimulus>, TrainingError> {
    let block = Block::from_number(block)?;
    if per_class_count == 0 {
        return Err(TrainingError::BadCount);
    }
    config.validate()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut drafts = Vec::with_capacity(per_class_count * 4);
    for class in StimulusClass::ALL {
        for _ in 0..per_class_count {
            let periods = match block {
                Block::Hard => rng.gen_range(2..=5),
                _ => 3,
            };
            let amp = block.noise();
            let y: Vec<f64> = clean_signal(class, periods)
                .into_iter()
                .map(|v| if amp > 0.0 { v + rng.gen_range(-amp..=amp) } else { v })
                .collect();
            drafts.push((class, y));
        }
    }
    drafts.shuffle(&mut rng);

    drafts
        .into_iter()
        .enumerate()
        .map(|(id, (class, y))| {
            let raw = Series::from_values(y, class.name()).expect("fixed-length finite signal");
            let series = normalize(&raw).expect("signal has finite values");
            let audio = sonify_series(&series, config).expect("normalized series, validated config");
            Ok(Stimulus {
                id: id as u32,
                class,
                series,
                audio,
                modality: Modality::AudioVisual,
                config: *config,
            })
        })
        .collect()
}
