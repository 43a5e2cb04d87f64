//! Run configuration, loadable from JSON and overridable from flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ExtReal, Interval, Weight};
use crate::spaces::sobolev::SobolevSpec;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub suite: Option<String>,
    /// Endpoints of the Sobolev interval `I`.
    pub interval: [f64; 2],
    /// Anchor `c` of `H_{c,ρ}(I)`.
    pub c: f64,
    /// Weight name: `const` or `affine` (`1 + t`).
    pub rho: String,
    /// Band limit of `PW(a)`.
    pub a: f64,
    pub dims: usize,
    /// Frequency truncation radius; suites pick their own when absent.
    pub radius: Option<f64>,
    pub panels: usize,
    pub nodes_per_panel: usize,
    pub basis_points: Option<Vec<f64>>,
    pub probes: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            suite: None,
            interval: [0.0, 1.0],
            c: 0.0,
            rho: "const".into(),
            a: 1.0,
            dims: 1,
            radius: None,
            panels: 16,
            nodes_per_panel: 16,
            basis_points: None,
            probes: 50,
            seed: DEFAULT_SEED,
            output: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidParameter(format!("bad config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [("a", self.a), ("radius", self.radius.unwrap_or(1.0))];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if self.panels == 0 || self.nodes_per_panel == 0 {
            return Err(Error::InvalidParameter("panels and nodes_per_panel must be positive".into()));
        }
        if !(1..=3).contains(&self.dims) {
            return Err(Error::InvalidParameter(format!("dims must be 1, 2 or 3, got {}", self.dims)));
        }
        let [lo, hi] = self.interval;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParameter(format!("interval ({lo}, {hi}) must be finite and nonempty")));
        }
        self.weight()?;
        Ok(())
    }

    pub fn weight(&self) -> Result<Weight> {
        Weight::from_name(&self.rho)
    }

    pub fn sobolev_spec(&self) -> Result<SobolevSpec> {
        let [lo, hi] = self.interval;
        SobolevSpec::new(Interval::finite(lo, hi), ExtReal::new(self.c)?, self.weight()?)
    }
}
