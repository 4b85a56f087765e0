use super::{Key, Stimulus};
use crate::synth::{estimate_freq, sample_count};

/// Coefficient of determination above which the pitch track counts as a trend.
const TREND_R2: f64 = 0.5;
/// Kurtosis (m4 / m2²) separating a two-level track (1.0) from a sinusoid (1.5).
const TWO_LEVEL_KURTOSIS: f64 = 1.3;

/// Pitch per note, measured from the audio with the zero-crossing estimator.
pub(crate) fn pitch_track(stimulus: &Stimulus) -> Vec<f64> {
    let audio = stimulus.audio();
    let per_note = sample_count(stimulus.config().note_duration, audio.sample_rate).max(2);
    (0..audio.len() / per_note)
        .filter_map(|k| estimate_freq(audio, k * per_note..(k + 1) * per_note).ok())
        .collect()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Least-squares slope and R² of `track` against its index.
fn linear_fit(track: &[f64]) -> (f64, f64) {
    let mx = (track.len() as f64 - 1.0) / 2.0;
    let my = mean(track);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (i, &y) in track.iter().enumerate() {
        let dx = i as f64 - mx;
        let dy = y - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return (0.0, 0.0);
    }
    (sxy / sxx, sxy * sxy / (sxx * syy))
}

fn kurtosis(track: &[f64]) -> f64 {
    let m = mean(track);
    let m2 = track.iter().map(|v| (v - m).powi(2)).sum::<f64>() / track.len() as f64;
    let m4 = track.iter().map(|v| (v - m).powi(4)).sum::<f64>() / track.len() as f64;
    if m2 == 0.0 {
        return f64::INFINITY;
    }
    m4 / (m2 * m2)
}

/// Machine listener that answers a stimulus from its audio alone.
///
/// The pitch of each note is estimated by zero crossings. A track dominated by
/// a linear trend is answered Up or Down by the sign of its slope. Otherwise the
/// track oscillates: a two-level track (kurtosis near 1) is a square signal
/// (Right), anything smoother a sine (Left).
pub fn synthetic_participant(stimulus: &Stimulus) -> Key {
    let track = pitch_track(stimulus);
    if track.len() < 2 {
        return Key::Left;
    }
    let (slope, r2) = linear_fit(&track);
    if r2 >= TREND_R2 {
        if slope > 0.0 {
            Key::Up
        } else {
            Key::Down
        }
    } else if kurtosis(&track) < TWO_LEVEL_KURTOSIS {
        Key::Right
    } else {
        Key::Left
    }
}
