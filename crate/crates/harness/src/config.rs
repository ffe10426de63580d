//! TOML run configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::HarnessError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub flow: FlowSection,
    #[serde(default)]
    pub gg: GgSection,
    #[serde(default)]
    pub budgets: Budgets,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub seed: u64,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection { seed: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowSection {
    /// Integration steps per unit time.
    pub steps_per_unit: usize,
}

impl Default for FlowSection {
    fn default() -> Self {
        FlowSection { steps_per_unit: 100 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GgSection {
    /// Number of points.
    pub n: usize,
    /// Samples along each straight path from the base configuration.
    pub path_steps: usize,
    /// Radius of the circle carrying the base configuration.
    pub base_radius: f64,
    /// Exact word norms up to this length; defaults by strand count.
    pub max_bfs_depth: Option<usize>,
    pub qm: QmSpec,
}

impl Default for GgSection {
    fn default() -> Self {
        GgSection { n: 2, path_steps: 4, base_radius: 0.3, max_bfs_depth: None, qm: QmSpec::Named("lk".into()) }
    }
}

/// `"lk"`, `"total-lk"`, `"exponent-sum"` or integer pair coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QmSpec {
    Named(String),
    Coefficients(Vec<i64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Budgets {
    /// Configurations per averaged braid invariant.
    pub samples: usize,
    /// Area samples per length estimate.
    pub lp_samples: usize,
    pub derivative_samples: usize,
    pub metric_samples: usize,
    /// Largest iterate in the linear-growth scan.
    pub k_max: usize,
    pub bootstrap: usize,
    /// Random loops for the word-norm versus length fit.
    pub loops: usize,
    pub zk_vectors: usize,
    pub zk_samples: usize,
    /// Samples whose path lengths are measured individually.
    pub length_checks: usize,
    /// Ceiling for adaptive sample doubling.
    pub max_samples: usize,
    /// Target standard error relative to the estimate.
    pub relative_se: f64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            samples: 20_000,
            lp_samples: 20_000,
            derivative_samples: 1_000,
            metric_samples: 100_000,
            k_max: 10,
            bootstrap: 200,
            loops: 3000,
            zk_vectors: 50,
            zk_samples: 32,
            length_checks: 64,
            max_samples: 400_000,
            relative_se: 0.01,
        }
    }
}

impl Config {
    pub fn from_toml_str(s: &str) -> Result<Self, HarnessError> {
        let cfg: Config = toml::from_str(s).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn with_overrides(mut self, seed: Option<u64>, samples: Option<usize>) -> Result<Self, HarnessError> {
        if let Some(s) = seed {
            self.run.seed = s;
        }
        if let Some(n) = samples {
            self.budgets.samples = n;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn max_bfs_depth(&self) -> usize {
        self.gg.max_bfs_depth.unwrap_or_else(|| braidflow::braid::default_max_depth(self.gg.n))
    }

    fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        let b = &self.budgets;
        if self.flow.steps_per_unit == 0 {
            return bad("flow.steps_per_unit must be positive");
        }
        if self.gg.n < 2 {
            return bad("gg.n must be at least 2");
        }
        if self.gg.path_steps == 0 {
            return bad("gg.path_steps must be positive");
        }
        if !(self.gg.base_radius > 0.0 && self.gg.base_radius < 1.0) {
            return bad("gg.base_radius must lie in (0, 1)");
        }
        if b.samples == 0 || b.lp_samples == 0 || b.derivative_samples == 0 || b.metric_samples == 0 {
            return bad("sample budgets must be positive");
        }
        if b.k_max < 3 {
            return bad("budgets.k_max must be at least 3");
        }
        if b.loops < 4 || b.zk_vectors == 0 || b.zk_samples == 0 {
            return bad("budgets.loops must be at least 4 and zk budgets positive");
        }
        if !(b.relative_se > 0.0) {
            return bad("budgets.relative_se must be positive");
        }
        if b.max_samples < b.samples {
            return bad("budgets.max_samples must be at least budgets.samples");
        }
        crate::campaigns::quasimorphism_for(&self.gg.qm, self.gg.n)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_missing_sections() {
        let c = Config::from_toml_str("[scenario]\nname = \"twist\"\n").unwrap();
        assert_eq!(c.run.seed, 1);
        assert_eq!(c.gg.n, 2);
        assert_eq!(c.max_bfs_depth(), 0);
        assert_eq!(c.budgets, Budgets::default());
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(Config::from_toml_str("[scenario]\nname = \"twist\"\nextra = 1\n").is_err());
        assert!(Config::from_toml_str("[scenario]\nname = \"twist\"\n[gg]\nn = 1\n").is_err());
        assert!(Config::from_toml_str("[scenario]\nname = \"twist\"\n[gg]\nqm = \"nope\"\n").is_err());
        assert!(Config::from_toml_str("[scenario]\nname = \"twist\"\n[gg]\nn = 3\nqm = [1, 2]\n").is_err());
        let c = Config::from_toml_str("[scenario]\nname = \"twist\"\n[gg]\nn = 3\nqm = [1, -2, 1]\n").unwrap();
        assert_eq!(c.gg.qm, QmSpec::Coefficients(vec![1, -2, 1]));
    }

    #[test]
    fn overrides() {
        let c = Config::from_toml_str("[scenario]\nname = \"twist\"\n").unwrap();
        let c = c.with_overrides(Some(9), Some(50)).unwrap();
        assert_eq!((c.run.seed, c.budgets.samples), (9, 50));
    }
}
