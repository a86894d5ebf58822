//! The full detection chain: blur, quantize, scan, optional hysteresis,
//! classify.

use crate::pbp::TruncationThreshold;
use crate::preprocess::{GrayImage, PreprocessConfig, QuantizedImage};
use crate::scanner::{classify_map, hysteresis_filter, scan, DegreeMap, EdgeMask, ScanConfig};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DetectConfig {
    pub preprocess: PreprocessConfig,
    pub scan: ScanConfig,
}

impl DetectConfig {
    pub fn validate(&self) -> Result<()> {
        self.preprocess.validate()?;
        self.scan.validate()
    }

    /// Threshold applied to the (possibly hysteresis-filtered) degree map.
    /// With hysteresis on, every surviving cell above `low` counts as an edge.
    pub fn effective_threshold(&self) -> TruncationThreshold {
        match self.scan.hysteresis {
            Some(h) => TruncationThreshold::new(h.low),
            None => self.scan.threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub quantized: QuantizedImage,
    /// Set when quantile quantization fell back to uniform bins.
    pub quantize_fell_back: bool,
    /// Degrees after hysteresis, when enabled.
    pub degree_map: DegreeMap,
    pub mask: EdgeMask,
}

pub fn detect(img: &GrayImage, cfg: &DetectConfig) -> Result<Detection> {
    cfg.validate()?;
    let quantized = cfg.preprocess.apply(img)?;
    let mut degree_map = scan(&quantized.image, &cfg.scan)?;
    if let Some(h) = cfg.scan.hysteresis {
        degree_map = hysteresis_filter(&degree_map, h.low, h.high);
    }
    let mask = classify_map(&degree_map, cfg.effective_threshold());
    Ok(Detection {
        quantized: quantized.image,
        quantize_fell_back: quantized.fell_back,
        degree_map,
        mask,
    })
}
