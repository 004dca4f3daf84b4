//! Camera stream model: raw frame sizes, frame schedule and an abstract codec.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VideoProfile {
    pub width: u32,
    pub height: u32,
    pub fps: f64,
    pub bits_per_pixel: u32,
}

impl VideoProfile {
    pub const DEFAULT_BITS_PER_PIXEL: u32 = 24;

    /// 3840x2160 at 24 bit/pixel.
    pub fn uhd(fps: f64) -> Self {
        Self { width: 3840, height: 2160, fps, bits_per_pixel: Self::DEFAULT_BITS_PER_PIXEL }
    }

    /// 1920x1080 at 24 bit/pixel.
    pub fn full_hd(fps: f64) -> Self {
        Self { width: 1920, height: 1080, fps, bits_per_pixel: Self::DEFAULT_BITS_PER_PIXEL }
    }

    pub fn validate(&self) -> Result<()> {
        if self.width < 1 {
            return Err(Error::invalid("VideoProfile.width", "must be >= 1"));
        }
        if self.height < 1 {
            return Err(Error::invalid("VideoProfile.height", "must be >= 1"));
        }
        if !(self.fps >= 0.0 && self.fps.is_finite()) {
            return Err(Error::invalid("VideoProfile.fps", format!("must be >= 0, got {}", self.fps)));
        }
        if self.bits_per_pixel < 1 {
            return Err(Error::invalid("VideoProfile.bits_per_pixel", "must be >= 1"));
        }
        Ok(())
    }

    fn raw_frame_bits(&self) -> f64 {
        // Exact in f64 for any realistic sensor (< 2^53 bits).
        (u64::from(self.width) * u64::from(self.height) * u64::from(self.bits_per_pixel)) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodecMode {
    Uncompressed,
    Compressed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodecModel {
    pub mode: CodecMode,
    pub compression_ratio: f64,
    pub encode_latency_s: f64,
    pub decode_latency_s: f64,
    pub encode_power_w: f64,
    pub decode_power_w: f64,
}

impl CodecModel {
    pub fn uncompressed() -> Self {
        Self {
            mode: CodecMode::Uncompressed,
            compression_ratio: 1.0,
            encode_latency_s: 0.0,
            decode_latency_s: 0.0,
            encode_power_w: 0.0,
            decode_power_w: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("CodecModel.encode_latency_s", self.encode_latency_s),
            ("CodecModel.decode_latency_s", self.decode_latency_s),
            ("CodecModel.encode_power_w", self.encode_power_w),
            ("CodecModel.decode_power_w", self.decode_power_w),
        ];
        for (name, v) in fields {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be >= 0, got {v}")));
            }
        }
        if !(self.compression_ratio >= 1.0 && self.compression_ratio.is_finite()) {
            return Err(Error::invalid(
                "CodecModel.compression_ratio",
                format!("must be >= 1, got {}", self.compression_ratio),
            ));
        }
        if self.mode == CodecMode::Uncompressed {
            if self.compression_ratio != 1.0 {
                return Err(Error::invalid("CodecModel.compression_ratio", "must be 1 when uncompressed"));
            }
            if let Some((name, _)) = fields.iter().find(|(_, v)| *v != 0.0) {
                return Err(Error::invalid(name, "must be 0 when uncompressed"));
            }
        }
        Ok(())
    }
}

/// width x height x fps x bits_per_pixel.
pub fn raw_bitrate_bps(profile: &VideoProfile) -> f64 {
    profile.raw_frame_bits() * profile.fps
}

pub fn frame_size_bits(profile: &VideoProfile, codec: &CodecModel) -> f64 {
    match codec.mode {
        CodecMode::Uncompressed => profile.raw_frame_bits(),
        CodecMode::Compressed => profile.raw_frame_bits() / codec.compression_ratio,
    }
}

/// Generation instants `k / fps` in the half-open window `[0, duration_s)`.
pub fn frame_times_s(profile: &VideoProfile, duration_s: f64) -> Vec<f64> {
    if !(profile.fps > 0.0) || !(duration_s > 0.0) {
        return Vec::new();
    }
    (0u64..).map(|k| k as f64 / profile.fps).take_while(|&t| t < duration_s).collect()
}
