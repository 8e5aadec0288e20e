//! Scenario configuration: a versioned JSON document holding a shaping
//! scheme and, optionally, an optimizer specification.

use anyhow::{bail, Context};
use photonshape_core::metrics::ShapingScheme;
use photonshape_core::optimize::{Objective, ParameterSpec};
use serde::Deserialize;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema: u32,
    pub scheme: ShapingScheme,
    #[serde(default)]
    pub optimize: Option<OptimizeSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSpec {
    pub params: Vec<ParameterSpec>,
    pub objective: Objective,
    pub budget: usize,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn from_str(text: &str) -> anyhow::Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text)
            .map_err(|e| anyhow::anyhow!("line {}, column {}: {e}", e.line(), e.column()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        Self::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    /// Structural validation beyond JSON shape; runs before any computation.
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.schema != SCHEMA_VERSION {
            bail!("field `schema`: expected {SCHEMA_VERSION}, got {}", self.schema);
        }
        if !(self.scheme.s_t >= 0.0 && self.scheme.s_t <= 1.0) {
            bail!("field `scheme.s_t`: must lie in [0, 1], got {}", self.scheme.s_t);
        }
        for (i, p) in self.scheme.inputs.iter().enumerate() {
            if !(p.shape.gamma > 0.0 && p.shape.gamma.is_finite()) {
                bail!("field `scheme.inputs[{i}].shape.gamma`: must be positive and finite");
            }
            if !(p.shape.center.is_finite() && p.shape.detuning.is_finite()) {
                bail!("field `scheme.inputs[{i}].shape`: center/detuning must be finite");
            }
        }
        if !(self.scheme.target.gamma > 0.0 && self.scheme.target.gamma.is_finite()) {
            bail!("field `scheme.target.gamma`: must be positive and finite");
        }
        let dim = if self.scheme.splitter_mode.is_some() { 5 } else { 4 };
        for (i, e) in self.scheme.detections.iter().enumerate() {
            if e.mode >= dim {
                bail!("field `scheme.detections[{i}].mode`: {} out of range 0..{dim}", e.mode);
            }
            if !e.time.is_finite() {
                bail!("field `scheme.detections[{i}].time`: must be finite");
            }
        }
        if self.scheme.remaining_mode >= dim {
            bail!("field `scheme.remaining_mode`: {} out of range 0..{dim}", self.scheme.remaining_mode);
        }
        self.scheme
            .validate()
            .map_err(|e| anyhow::anyhow!("field `scheme`: {e}"))?;
        if let Some(opt) = &self.optimize {
            if opt.params.is_empty() {
                bail!("field `optimize.params`: must not be empty");
            }
            for (i, p) in opt.params.iter().enumerate() {
                if !(p.lo < p.hi) || !(p.init >= p.lo && p.init <= p.hi) {
                    bail!("field `optimize.params[{i}]`: need lo < hi and lo <= init <= hi");
                }
                if p.log_scale && p.lo <= 0.0 {
                    bail!("field `optimize.params[{i}]`: log-scale bounds must be positive");
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scenarios_parse_and_validate() {
        for (name, text) in crate::scenarios::ALL {
            let cfg = ScenarioConfig::from_str(text)
                .unwrap_or_else(|e| panic!("{name}: {e:#}"));
            assert_eq!(cfg.schema, SCHEMA_VERSION);
        }
    }

    #[test]
    fn rejects_bad_schema_version() {
        let text = crate::scenarios::FIG2.replace("\"schema\": 1", "\"schema\": 9");
        assert!(ScenarioConfig::from_str(&text).is_err());
    }

    #[test]
    fn rejects_out_of_range_mode() {
        let text = crate::scenarios::FIG2.replace("\"remaining_mode\": 0", "\"remaining_mode\": 7");
        assert!(ScenarioConfig::from_str(&text).is_err());
    }

    #[test]
    fn rejects_malformed_json() {
        assert!(ScenarioConfig::from_str("{ not json").is_err());
    }
}
