//! Statistical face-detection model.
//!
//! Detection probability depends only on how many pixels a face spans. The
//! curve is piecewise linear in log2(pixel width) through calibration anchors,
//! extended linearly past the outermost anchors and clamped to [0, 1].

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::video::VideoProfile;

/// Faces at 2K are detected 45.5 times out of 136; the same faces at 4K,
/// spanning twice the pixels, 86.2 times out of 136.
pub const RATE_2K: f64 = 45.5 / 136.0;
pub const RATE_4K: f64 = 86.2 / 136.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchor {
    pub face_px: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionCalibration {
    anchors: Vec<Anchor>,
    /// Faces narrower than this are never detected.
    pub min_face_px: f64,
    /// Multiplies effective pixel width; <= 1 models quality loss.
    pub quality_factor: f64,
}

impl DetectionCalibration {
    pub const DEFAULT_MIN_FACE_PX: f64 = 8.0;
    pub const DEFAULT_2K_ANCHOR_PX: f64 = 12.0;

    pub fn new(anchors: Vec<Anchor>, min_face_px: f64, quality_factor: f64) -> Result<Self> {
        if anchors.len() < 2 {
            return Err(Error::invalid("DetectionCalibration.anchors", "at least two anchors required"));
        }
        for a in &anchors {
            if !(a.face_px > 0.0 && a.face_px.is_finite()) {
                return Err(Error::invalid("DetectionCalibration.anchors", "pixel widths must be > 0"));
            }
            if !(0.0..=1.0).contains(&a.rate) {
                return Err(Error::invalid("DetectionCalibration.anchors", "rates must lie in [0, 1]"));
            }
        }
        for w in anchors.windows(2) {
            if !(w[1].face_px > w[0].face_px) {
                return Err(Error::invalid("DetectionCalibration.anchors", "pixel widths must be strictly increasing"));
            }
            if w[1].rate < w[0].rate {
                return Err(Error::invalid("DetectionCalibration.anchors", "rates must be nondecreasing"));
            }
        }
        if !(min_face_px >= 0.0 && min_face_px.is_finite()) {
            return Err(Error::invalid("DetectionCalibration.min_face_px", "must be >= 0"));
        }
        if !(quality_factor > 0.0 && quality_factor <= 1.0) {
            return Err(Error::invalid("DetectionCalibration.quality_factor", "must lie in (0, 1]"));
        }
        Ok(Self { anchors, min_face_px, quality_factor })
    }

    /// Two anchors: the 2K rate at `anchor_2k_px` and the 4K rate at twice that.
    pub fn two_resolution(anchor_2k_px: f64) -> Result<Self> {
        Self::new(
            vec![
                Anchor { face_px: anchor_2k_px, rate: RATE_2K },
                Anchor { face_px: 2.0 * anchor_2k_px, rate: RATE_4K },
            ],
            Self::DEFAULT_MIN_FACE_PX,
            1.0,
        )
    }

    pub fn anchors(&self) -> &[Anchor] {
        &self.anchors
    }
}

impl Default for DetectionCalibration {
    fn default() -> Self {
        Self::two_resolution(Self::DEFAULT_2K_ANCHOR_PX).expect("default calibration is valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Face {
    pub physical_width_m: f64,
    pub distance_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Camera {
    pub profile: VideoProfile,
    pub horizontal_fov_deg: f64,
}

impl Camera {
    pub fn validate(&self) -> Result<()> {
        self.profile.validate()?;
        if !(self.horizontal_fov_deg > 0.0 && self.horizontal_fov_deg < 180.0) {
            return Err(Error::invalid(
                "FaceScene.camera.horizontal_fov_deg",
                format!("must lie in (0, 180), got {}", self.horizontal_fov_deg),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaceScene {
    pub faces: Vec<Face>,
    pub camera: Camera,
}

impl FaceScene {
    pub fn validate(&self) -> Result<()> {
        self.camera.validate()?;
        for f in &self.faces {
            if !(f.physical_width_m > 0.0) || !(f.distance_m > 0.0) {
                return Err(Error::invalid("FaceScene.faces", "face widths and distances must be > 0"));
            }
        }
        Ok(())
    }

    pub fn with_camera(&self, camera: Camera) -> Self {
        Self { faces: self.faces.clone(), camera }
    }
}

/// Pinhole projection of a face onto the sensor's horizontal axis (pixels).
pub fn face_pixel_width(camera: &Camera, face_width_m: f64, distance_m: f64) -> Result<f64> {
    if !(face_width_m > 0.0) || !(distance_m > 0.0) {
        return Err(Error::Domain("face width and distance must be > 0".into()));
    }
    if !(camera.horizontal_fov_deg > 0.0 && camera.horizontal_fov_deg < 180.0) {
        return Err(Error::Domain(format!("field of view {} deg out of range", camera.horizontal_fov_deg)));
    }
    let half = (camera.horizontal_fov_deg / 2.0).to_radians().tan();
    Ok(f64::from(camera.profile.width) * face_width_m / (2.0 * distance_m * half))
}

pub fn detection_prob(cal: &DetectionCalibration, face_px: f64) -> f64 {
    let px = face_px * cal.quality_factor;
    if !(px > 0.0) || px < cal.min_face_px {
        return 0.0;
    }
    let x = px.log2();
    let a = &cal.anchors;
    // Segment [i, i + 1] containing x; the outer segments are extended.
    let i = a.partition_point(|p| p.face_px.log2() <= x).clamp(1, a.len() - 1) - 1;
    let (x0, x1) = (a[i].face_px.log2(), a[i + 1].face_px.log2());
    let y = a[i].rate + (a[i + 1].rate - a[i].rate) * (x - x0) / (x1 - x0);
    y.clamp(0.0, 1.0)
}

/// Sum of per-face detection probabilities.
pub fn expected_detections(cal: &DetectionCalibration, scene: &FaceScene) -> Result<f64> {
    scene.faces.iter().try_fold(0.0, |acc, f| {
        let px = face_pixel_width(&scene.camera, f.physical_width_m, f.distance_m)?;
        Ok(acc + detection_prob(cal, px))
    })
}

/// Per-face detection probabilities of a scene.
pub fn face_probabilities(cal: &DetectionCalibration, scene: &FaceScene) -> Result<Vec<f64>> {
    scene
        .faces
        .iter()
        .map(|f| Ok(detection_prob(cal, face_pixel_width(&scene.camera, f.physical_width_m, f.distance_m)?)))
        .collect()
}

/// Draws one independent Bernoulli trial per face per frame.
pub struct DetectionSampler {
    rng: ChaCha8Rng,
    probs: Vec<f64>,
}

impl DetectionSampler {
    pub fn new(cal: &DetectionCalibration, scene: &FaceScene, seed: u64) -> Result<Self> {
        Ok(Self { rng: ChaCha8Rng::seed_from_u64(seed), probs: face_probabilities(cal, scene)? })
    }

    /// Realized detections for one frame.
    pub fn sample_frame(&mut self) -> u64 {
        let rng = &mut self.rng;
        self.probs.iter().filter(|&&p| rng.gen::<f64>() < p).count() as u64
    }
}

/// Monte Carlo count for a single frame of the scene.
pub fn sample_detections(cal: &DetectionCalibration, scene: &FaceScene, seed: u64) -> Result<u64> {
    Ok(DetectionSampler::new(cal, scene, seed)?.sample_frame())
}
