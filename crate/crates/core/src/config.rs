//! Experiment configuration: a single TOML tree with documented defaults,
//! named angle presets, and strict key checking so a typo fails loudly
//! instead of silently running the default.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{Direction, FlowKind, FlowSystem, GOLDEN, SILVER};

/// An angle parameter: either a decimal or a named preset, so irrational
/// constants have one canonical spelling in configs and reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AngleValue {
    Named(String),
    Number(f64),
}

impl AngleValue {
    pub fn resolve(&self) -> Result<f64> {
        match self {
            AngleValue::Number(x) => Ok(*x),
            AngleValue::Named(name) => match name.as_str() {
                "golden" => Ok(GOLDEN),
                "silver" => Ok(SILVER),
                other => Err(Error::BadParameter {
                    key: "angle".into(),
                    message: format!("unknown preset '{other}', expected golden or silver"),
                }),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowName {
    Rotation,
    Identity,
    Stack,
    Annulus,
    TorusCircle,
    ShiftPair,
    FullShift,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FlowConfig {
    pub kind: FlowName,
    #[serde(default = "default_alpha")]
    pub alpha: AngleValue,
    #[serde(default = "default_mu")]
    pub mu: AngleValue,
    #[serde(default = "default_depth")]
    pub depth: u32,
    #[serde(default = "default_block")]
    pub block: Vec<u8>,
    #[serde(default = "default_window")]
    pub window: u32,
}

fn default_alpha() -> AngleValue {
    AngleValue::Named("golden".into())
}

fn default_mu() -> AngleValue {
    AngleValue::Named("silver".into())
}

fn default_depth() -> u32 {
    6
}

fn default_block() -> Vec<u8> {
    vec![1]
}

fn default_window() -> u32 {
    16
}

impl Default for FlowConfig {
    fn default() -> FlowConfig {
        FlowConfig {
            kind: FlowName::Rotation,
            alpha: default_alpha(),
            mu: default_mu(),
            depth: default_depth(),
            block: default_block(),
            window: default_window(),
        }
    }
}

impl FlowConfig {
    pub fn build(&self) -> Result<FlowSystem> {
        let kind = match self.kind {
            FlowName::Rotation => FlowKind::Rotation {
                alpha: self.alpha.resolve()?,
            },
            FlowName::Identity => FlowKind::Identity,
            FlowName::Stack => FlowKind::Stack { depth: self.depth },
            FlowName::Annulus => FlowKind::Annulus {
                alpha: self.alpha.resolve()?,
            },
            FlowName::TorusCircle => FlowKind::TorusCircle {
                mu: self.mu.resolve()?,
                alpha: self.alpha.resolve()?,
            },
            FlowName::ShiftPair => FlowKind::ShiftPair {
                block: self.block.clone(),
                window: self.window,
            },
            FlowName::FullShift => FlowKind::FullShift {
                window: self.window,
            },
        };
        FlowSystem::new(kind)
    }
}

/// Clustering parameters for the sampled envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct NetConfig {
    #[serde(default = "default_net_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_horizon")]
    pub horizon: i64,
    #[serde(default = "default_direction")]
    pub direction: Direction,
    #[serde(default = "default_resolution")]
    pub resolution: u32,
}

fn default_net_epsilon() -> f64 {
    0.05
}

fn default_horizon() -> i64 {
    10_000
}

fn default_direction() -> Direction {
    Direction::Both
}

fn default_resolution() -> u32 {
    16
}

impl Default for NetConfig {
    fn default() -> NetConfig {
        NetConfig {
            epsilon: default_net_epsilon(),
            horizon: default_horizon(),
            direction: default_direction(),
            resolution: default_resolution(),
        }
    }
}

/// Shared detector resources.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct DetectConfig {
    #[serde(default = "default_ladder")]
    pub epsilon_ladder: Vec<f64>,
    #[serde(default = "default_delta_grid")]
    pub delta_grid: Vec<f64>,
    #[serde(default = "default_probe_radii")]
    pub probe_radii: Vec<f64>,
    #[serde(default = "default_horizon")]
    pub horizon: i64,
    #[serde(default = "default_resolution")]
    pub resolution: u32,
    #[serde(default = "default_gap_bound")]
    pub gap_bound: i64,
    #[serde(default = "default_max_run")]
    pub max_run_length: i64,
}

fn default_ladder() -> Vec<f64> {
    vec![0.25, 0.1, 0.05, 0.01]
}

fn default_delta_grid() -> Vec<f64> {
    vec![0.1, 0.01, 1e-3, 1e-4]
}

fn default_probe_radii() -> Vec<f64> {
    vec![0.1, 0.01, 1e-3]
}

fn default_gap_bound() -> i64 {
    128
}

fn default_max_run() -> i64 {
    5
}

impl Default for DetectConfig {
    fn default() -> DetectConfig {
        DetectConfig {
            epsilon_ladder: default_ladder(),
            delta_grid: default_delta_grid(),
            probe_radii: default_probe_radii(),
            horizon: default_horizon(),
            resolution: default_resolution(),
            gap_bound: default_gap_bound(),
            max_run_length: default_max_run(),
        }
    }
}

/// Which checks to run and the depth of the stacked-circles instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ChecksConfig {
    /// Empty means every registered check.
    #[serde(default)]
    pub select: Vec<String>,
    #[serde(default = "default_depth")]
    pub stack_depth: u32,
    /// Budget for the slow simultaneous-recurrence scans.
    #[serde(default = "default_deep_horizon")]
    pub deep_horizon: i64,
}

fn default_deep_horizon() -> i64 {
    200_000
}

impl Default for ChecksConfig {
    fn default() -> ChecksConfig {
        ChecksConfig {
            select: Vec::new(),
            stack_depth: default_depth(),
            deep_horizon: default_deep_horizon(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    #[serde(default = "default_schema")]
    pub schema: u32,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub flow: FlowConfig,
    #[serde(default)]
    pub net: NetConfig,
    #[serde(default)]
    pub detect: DetectConfig,
    #[serde(default)]
    pub checks: ChecksConfig,
}

fn default_schema() -> u32 {
    1
}

fn default_workers() -> usize {
    1
}

impl Default for ExperimentConfig {
    fn default() -> ExperimentConfig {
        ExperimentConfig {
            schema: default_schema(),
            workers: default_workers(),
            flow: FlowConfig::default(),
            net: NetConfig::default(),
            detect: DetectConfig::default(),
            checks: ChecksConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schema != 1 {
            return Err(bad("schema", "only schema 1 is understood"));
        }
        if self.workers == 0 || self.workers > 256 {
            return Err(bad("workers", "must be between 1 and 256"));
        }
        require_positive("net.epsilon", self.net.epsilon)?;
        require_horizon("net.horizon", self.net.horizon)?;
        require_resolution("net.resolution", self.net.resolution)?;
        require_ladder("detect.epsilon-ladder", &self.detect.epsilon_ladder)?;
        require_ladder("detect.delta-grid", &self.detect.delta_grid)?;
        require_ladder("detect.probe-radii", &self.detect.probe_radii)?;
        require_horizon("detect.horizon", self.detect.horizon)?;
        require_resolution("detect.resolution", self.detect.resolution)?;
        if self.detect.gap_bound < 1 {
            return Err(bad("detect.gap-bound", "must be at least 1"));
        }
        if self.detect.max_run_length < 1 {
            return Err(bad("detect.max-run-length", "must be at least 1"));
        }
        if !(1..=40).contains(&self.flow.depth) {
            return Err(bad("flow.depth", "must be between 1 and 40"));
        }
        if !(1..=40).contains(&self.checks.stack_depth) {
            return Err(bad("checks.stack-depth", "must be between 1 and 40"));
        }
        require_horizon("checks.deep-horizon", self.checks.deep_horizon)?;
        if self.flow.block.is_empty() || self.flow.block.iter().any(|&b| b > 1) {
            return Err(bad("flow.block", "must be a nonempty list of 0/1"));
        }
        if !(4..=60).contains(&self.flow.window) {
            return Err(bad("flow.window", "must be between 4 and 60"));
        }
        self.flow
            .alpha
            .resolve()
            .map_err(|_| bad("flow.alpha", "must be a decimal in (0,1) or golden/silver"))?;
        self.flow
            .mu
            .resolve()
            .map_err(|_| bad("flow.mu", "must be a decimal in (0,1) or golden/silver"))?;
        Ok(())
    }
}

fn bad(key: &str, message: &str) -> Error {
    Error::BadParameter {
        key: key.into(),
        message: message.into(),
    }
}

fn require_positive(key: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(bad(key, "must be a positive finite number"));
    }
    Ok(())
}

fn require_horizon(key: &str, v: i64) -> Result<()> {
    if !(1..=10_000_000).contains(&v) {
        return Err(bad(key, "must be between 1 and 10^7"));
    }
    Ok(())
}

fn require_resolution(key: &str, v: u32) -> Result<()> {
    if !(2..=512).contains(&v) {
        return Err(bad(key, "must be between 2 and 512"));
    }
    Ok(())
}

fn require_ladder(key: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(bad(key, "must list at least one value"));
    }
    for &v in values {
        require_positive(key, v)?;
    }
    Ok(())
}

/// Parse and validate a TOML config; errors carry the offending key or the
/// parser's line context.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn to_toml(cfg: &ExperimentConfig) -> Result<String> {
    toml::to_string_pretty(cfg).map_err(|e| Error::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_config_fills_every_default() {
        let cfg = parse_config("[flow]\nkind = \"annulus\"\n").unwrap();
        assert_eq!(cfg.flow.kind, FlowName::Annulus);
        assert_eq!(cfg.flow.alpha, AngleValue::Named("golden".into()));
        assert_eq!(cfg.net.epsilon, 0.05);
        assert_eq!(cfg.detect.horizon, 10_000);
        assert_eq!(cfg.detect.epsilon_ladder, vec![0.25, 0.1, 0.05, 0.01]);
        assert_eq!(cfg.workers, 1);
        let flow = cfg.flow.build().unwrap();
        assert_eq!(flow.describe(), format!("annulus(alpha={GOLDEN:.6})"));
    }

    #[test]
    fn unknown_keys_and_bad_ranges_are_rejected() {
        let err = parse_config("[flow]\nkind = \"rotation\"\nspeed = 3\n").unwrap_err();
        assert!(err.to_string().contains("speed"), "{err}");

        let err = parse_config("[flow]\nkind = \"rotation\"\n[net]\nepsilon = -0.1\n").unwrap_err();
        assert!(err.to_string().contains("net.epsilon"), "{err}");

        let err = parse_config("[flow]\nkind = \"rotation\"\nalpha = \"bronze\"\n").unwrap_err();
        assert!(err.to_string().contains("flow.alpha"), "{err}");
    }

    #[test]
    fn presets_resolve_to_the_named_constants() {
        assert_eq!(
            AngleValue::Named("golden".into()).resolve().unwrap(),
            GOLDEN
        );
        assert_eq!(
            AngleValue::Named("silver".into()).resolve().unwrap(),
            SILVER
        );
        assert_eq!(AngleValue::Number(0.25).resolve().unwrap(), 0.25);
    }

    fn angle_strategy() -> impl Strategy<Value = AngleValue> {
        prop_oneof![
            Just(AngleValue::Named("golden".into())),
            Just(AngleValue::Named("silver".into())),
            (0.01f64..0.99).prop_map(AngleValue::Number),
        ]
    }

    fn config_strategy() -> impl Strategy<Value = ExperimentConfig> {
        (
            angle_strategy(),
            angle_strategy(),
            1u32..12,
            4u32..40,
            0.001f64..0.5,
            1i64..100_000,
            2u32..64,
            1usize..16,
            prop_oneof![
                Just(FlowName::Rotation),
                Just(FlowName::Stack),
                Just(FlowName::Annulus),
                Just(FlowName::TorusCircle),
                Just(FlowName::ShiftPair),
                Just(FlowName::FullShift),
            ],
        )
            .prop_map(
                |(alpha, mu, depth, window, eps, horizon, res, workers, kind)| {
                    let mut cfg = ExperimentConfig::default();
                    cfg.flow.kind = kind;
                    cfg.flow.alpha = alpha;
                    cfg.flow.mu = mu;
                    cfg.flow.depth = depth;
                    cfg.flow.window = window;
                    cfg.net.epsilon = eps;
                    cfg.net.horizon = horizon;
                    cfg.net.resolution = res;
                    cfg.detect.horizon = horizon;
                    cfg.workers = workers;
                    cfg
                },
            )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn round_trip_preserves_every_field(cfg in config_strategy()) {
            prop_assert!(cfg.validate().is_ok());
            let text = to_toml(&cfg).unwrap();
            let back = parse_config(&text).unwrap();
            prop_assert_eq!(back, cfg);
        }
    }
}
