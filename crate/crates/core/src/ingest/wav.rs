//! Minimal RIFF/WAVE reader for PCM16 and IEEE float32 files.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

const FORMAT_PCM: u16 = 0x0001;
const FORMAT_IEEE_FLOAT: u16 = 0x0003;
const FORMAT_ALAW: u16 = 0x0006;
const FORMAT_MULAW: u16 = 0x0007;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

/// Decoded interleaved audio.
#[derive(Debug, Clone, PartialEq)]
pub struct WavData {
    /// Interleaved samples scaled to [-1, 1].
    pub samples: Vec<f32>,
    pub sample_rate: u32,
    pub channels: u16,
}

impl WavData {
    pub fn frames(&self) -> usize {
        self.samples.len() / self.channels as usize
    }

    /// Splits the interleaved buffer into one vector per channel.
    pub fn deinterleave(&self) -> Vec<Vec<f32>> {
        let n = self.channels as usize;
        let mut out = vec![Vec::with_capacity(self.frames()); n];
        for frame in self.samples.chunks_exact(n) {
            for (ch, &s) in out.iter_mut().zip(frame) {
                ch.push(s);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
struct FmtChunk {
    format: u16,
    channels: u16,
    sample_rate: u32,
    block_align: u16,
    bits_per_sample: u16,
}

pub fn decode_wav(path: impl AsRef<Path>) -> Result<WavData> {
    let bytes = fs::read(path)?;
    decode_wav_bytes(&bytes)
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

pub fn decode_wav_bytes(bytes: &[u8]) -> Result<WavData> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(Error::Format("missing RIFF/WAVE header".into()));
    }

    let mut fmt: Option<FmtChunk> = None;
    let mut data: Option<&[u8]> = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32_at(bytes, pos + 4) as usize;
        let body_start = pos + 8;
        let body_end = body_start
            .checked_add(size)
            .filter(|&end| end <= bytes.len())
            .ok_or_else(|| {
                Error::Format(format!(
                    "chunk {:?} declares {size} bytes but only {} remain",
                    String::from_utf8_lossy(id),
                    bytes.len() - body_start
                ))
            })?;
        let body = &bytes[body_start..body_end];
        match id {
            b"fmt " => fmt = Some(parse_fmt(body)?),
            b"data" => data = Some(body),
            _ => {}
        }
        // Chunks are word aligned.
        pos = body_end + (size & 1);
    }

    let fmt = fmt.ok_or_else(|| Error::Format("no fmt chunk".into()))?;
    let data = data.ok_or_else(|| Error::Format("no data chunk".into()))?;

    if fmt.channels == 0 {
        return Err(Error::Format("zero channels".into()));
    }
    if fmt.sample_rate == 0 {
        return Err(Error::Format("zero sample rate".into()));
    }
    let bytes_per_sample = (fmt.bits_per_sample / 8) as usize;
    if fmt.block_align as usize != bytes_per_sample * fmt.channels as usize {
        return Err(Error::Format(format!(
            "block align {} inconsistent with {} channels of {} bits",
            fmt.block_align, fmt.channels, fmt.bits_per_sample
        )));
    }
    if data.len() % fmt.block_align as usize != 0 {
        return Err(Error::Format("data chunk ends mid-frame".into()));
    }

    let samples = match (fmt.format, fmt.bits_per_sample) {
        (FORMAT_PCM, 16) => data
            .chunks_exact(2)
            .map(|c| i16::from_le_bytes([c[0], c[1]]) as f32 / 32768.0)
            .collect(),
        (FORMAT_IEEE_FLOAT, 32) => data
            .chunks_exact(4)
            .map(|c| {
                let v = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
                if v.is_finite() {
                    Ok(v.clamp(-1.0, 1.0))
                } else {
                    Err(Error::Format("non-finite float sample".into()))
                }
            })
            .collect::<Result<Vec<f32>>>()?,
        (FORMAT_PCM, bits) => {
            return Err(Error::UnsupportedCodec(format!("{bits}-bit integer PCM")))
        }
        (FORMAT_IEEE_FLOAT, bits) => {
            return Err(Error::UnsupportedCodec(format!("{bits}-bit float")))
        }
        (FORMAT_MULAW, _) => return Err(Error::UnsupportedCodec("mu-law".into())),
        (FORMAT_ALAW, _) => return Err(Error::UnsupportedCodec("A-law".into())),
        (other, _) => {
            return Err(Error::UnsupportedCodec(format!(
                "format tag 0x{other:04x}"
            )))
        }
    };

    Ok(WavData {
        samples,
        sample_rate: fmt.sample_rate,
        channels: fmt.channels,
    })
}

fn parse_fmt(body: &[u8]) -> Result<FmtChunk> {
    if body.len() < 16 {
        return Err(Error::Format(format!("fmt chunk too short ({} bytes)", body.len())));
    }
    let mut format = u16_at(body, 0);
    if format == FORMAT_EXTENSIBLE {
        // cbSize(2) validBits(2) channelMask(4) then the subformat GUID whose
        // first two bytes carry the real format tag.
        if body.len() < 40 {
            return Err(Error::Format("truncated WAVE_FORMAT_EXTENSIBLE header".into()));
        }
        format = u16_at(body, 24);
    }
    Ok(FmtChunk {
        format,
        channels: u16_at(body, 2),
        sample_rate: u32_at(body, 4),
        block_align: u16_at(body, 12),
        bits_per_sample: u16_at(body, 14),
    })
}

/// Encodes mono or interleaved samples as a 16-bit PCM WAV file.
///
/// Samples are clamped to [-1, 1] and scaled by 32767.
pub fn encode_wav_pcm16(samples: &[f32], sample_rate: u32, channels: u16) -> Vec<u8> {
    let data_len = samples.len() * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&FORMAT_PCM.to_le_bytes());
    out.extend_from_slice(&channels.to_le_bytes());
    out.extend_from_slice(&sample_rate.to_le_bytes());
    out.extend_from_slice(&(sample_rate * channels as u32 * 2).to_le_bytes());
    out.extend_from_slice(&(channels * 2).to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &s in samples {
        let v = (s.clamp(-1.0, 1.0) * 32767.0).round() as i16;
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}
