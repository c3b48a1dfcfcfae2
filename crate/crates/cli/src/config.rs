//! Run configuration. Every knob has the published default, so an absent
//! config file means the standard parameter set; unknown keys are
//! rejected rather than ignored.

use std::path::Path;

use linea_core::geometry::FrCombine;
use linea_core::proximity::RngMetric;
use linea_core::relations::{td_from_scale, DEFAULT_MAP_SCALE};
use linea_core::{AlignRule, MatchCriterion, RecognizeMode, Schema, Thresholds};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub thresholds: Thresholds,
    /// Denominator of the map scale. Sets the spacing clamp `td` unless
    /// the thresholds block pins `td` itself.
    pub map_scale: u32,
    pub rng_metric: RngMetric,
    pub fr_combine: FrCombine,
    pub align_rule: AlignRule,
    pub match_criterion: MatchCriterion,
    pub schema: Schema,
    pub mode: RecognizeMode,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            thresholds: Thresholds::default(),
            map_scale: DEFAULT_MAP_SCALE as u32,
            rng_metric: RngMetric::Footprint,
            fr_combine: FrCombine::Max,
            align_rule: AlignRule::Listing,
            match_criterion: MatchCriterion::Exact,
            schema: Schema::Precomputed,
            mode: RecognizeMode::Engine,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("{}: {e}", path.display()))?;
        let raw: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| format!("{}: {e}", path.display()))?;
        let mut cfg: Config = serde_json::from_value(raw.clone())
            .map_err(|e| format!("{}: {e}", path.display()))?;
        // the clamp follows the scale only while td itself is unspecified
        if raw.pointer("/thresholds/td").is_none() {
            cfg.thresholds.td = td_from_scale(cfg.map_scale as f64);
        }
        Ok(cfg)
    }
}
