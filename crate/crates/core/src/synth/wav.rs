use super::AudioBuffer;

pub const WAV_HEADER_LEN: usize = 44;

fn quantize(sample: f64) -> i16 {
    (sample * 32767.0).round().clamp(-32768.0, 32767.0) as i16
}

/// Encodes a buffer as a canonical 44-byte-header RIFF/WAVE file:
/// PCM, mono, 16-bit signed little-endian, `q(s) = round(s * 32767)`.
pub fn write_wav(buffer: &AudioBuffer) -> Vec<u8> {
    let data_len = (buffer.samples.len() * 2) as u32;
    let mut out = Vec::with_capacity(WAV_HEADER_LEN + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&buffer.sample_rate.to_le_bytes());
    out.extend_from_slice(&(buffer.sample_rate * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for &s in &buffer.samples {
        out.extend_from_slice(&quantize(s).to_le_bytes());
    }
    out
}
