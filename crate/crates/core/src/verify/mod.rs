//! Seeded corpora and inequality suites with ratio statistics and verdicts.

pub mod instances;
pub mod report;
mod suites;
pub mod sweep;

pub use instances::{generate, InstanceKind, InstanceSpec};
pub use report::{summary_csv, CapKind, InstanceRecord, SuiteReport};
pub use suites::{describe, run_suite, suite_ids};
pub use sweep::{estimate_constant, SweepRow, SweepTable};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::choquet::Backend;
use crate::error::Result;
use crate::geometry::GridFunction;

/// Suite parameters as supplied; unset fields take per-suite defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub n: Option<usize>,
    #[serde(rename = "L")]
    pub level: Option<u32>,
    pub delta: Option<f64>,
    pub delta2: Option<f64>,
    pub kappa: Option<f64>,
    pub alpha: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub backend: Option<Backend>,
    pub families: Option<Vec<String>>,
    pub coarse_level: Option<u32>,
    pub stride: Option<u32>,
    pub floor: Option<f64>,
}

/// Fully resolved suite parameters, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub n: usize,
    #[serde(rename = "L")]
    pub level: u32,
    pub delta: f64,
    pub delta2: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    pub samples: usize,
    pub seed: u64,
    pub backend: Backend,
    pub families: Vec<InstanceKind>,
    pub coarse_level: Option<u32>,
    pub stride: u32,
    pub floor: Option<f64>,
}

impl SuiteConfig {
    pub(crate) fn resolve(&self, d: &Resolved) -> Result<Resolved> {
        let families = match &self.families {
            Some(names) => names.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>()?,
            None => d.families.clone(),
        };
        Ok(Resolved {
            n: self.n.unwrap_or(d.n),
            level: self.level.unwrap_or(d.level),
            delta: self.delta.unwrap_or(d.delta),
            delta2: self.delta2.unwrap_or(d.delta2),
            kappa: self.kappa.unwrap_or(d.kappa),
            alpha: self.alpha.unwrap_or(d.alpha),
            p: self.p.unwrap_or(d.p),
            q: self.q.unwrap_or(d.q),
            samples: self.samples.unwrap_or(d.samples),
            seed: self.seed.unwrap_or(d.seed),
            backend: self.backend.unwrap_or(d.backend),
            families,
            coarse_level: self.coarse_level.or(d.coarse_level),
            stride: self.stride.unwrap_or(d.stride),
            floor: self.floor.or(d.floor),
        })
    }
}

impl Resolved {
    /// Instance specs for indices `0..count`; per-instance seeds are drawn
    /// from one stream seeded by `seed`.
    pub fn corpus_specs(&self, count: usize) -> Vec<InstanceSpec> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..count)
            .map(|i| {
                let kind = self.families[i % self.families.len()];
                let mut spec = InstanceSpec::new(kind, self.n, self.level, rng.next_u64());
                spec.coarse_level = self.coarse_level;
                spec
            })
            .collect()
    }

    pub fn corpus(&self, count: usize) -> Result<Vec<GridFunction>> {
        self.corpus_specs(count).iter().map(generate).collect()
    }
}
