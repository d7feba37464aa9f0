//! JSON game configuration.
//!
//! ```json
//! {
//!   "graph": "maps/grid10.txt",
//!   "pursuers": 2,
//!   "capture_radius": 1,
//!   "capture_threshold": 1
//! }
//! ```
//!
//! `graph` is a path (relative to the config file) or an inline generator:
//! `{"kind": "grid", "width": 10, "height": 10}` or
//! `{"kind": "scale-free", "n": 500, "attach": 2, "seed": 7}`. Exits listed in
//! the config replace those of the graph file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{PegSpec, Priority};
use crate::graph::{gen_grid, gen_scale_free, parse_graph_file, GraphFile};
use crate::grouping::Grouping;
use crate::sim::SamplerConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphSource {
    Path(PathBuf),
    Generated(GraphGen),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphGen {
    Grid { width: usize, height: usize },
    ScaleFree { n: usize, attach: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PegConfig {
    pub graph: GraphSource,
    pub pursuers: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capture_radius: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capture_threshold: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exits: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discount: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priority: Option<Priority>,
    /// Pursuer teams (zero-based indices) for grouped policies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grouping: Option<Grouping>,
    /// Starting distance bound for no-exit episodes (exclusive).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_distance: Option<u32>,
    /// Draw fresh exits each multi-exit episode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resample_exits: Option<bool>,
}

/// A config resolved into a spec.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: PegConfig,
    pub spec: PegSpec,
    pub sampler: SamplerConfig,
}

impl PegConfig {
    pub fn from_json(text: &str) -> Result<PegConfig> {
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })
    }

    /// Builds the spec; relative graph paths are resolved against `base`.
    pub fn resolve(self, base: &Path) -> Result<Loaded> {
        let file = match &self.graph {
            GraphSource::Path(p) => {
                let path = if p.is_absolute() { p.clone() } else { base.join(p) };
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::Argument(format!("cannot read graph {}: {e}", path.display())))?;
                parse_graph_file(&text)?
            }
            GraphSource::Generated(GraphGen::Grid { width, height }) => {
                GraphFile { graph: gen_grid(*width, *height)?, exits: Vec::new() }
            }
            GraphSource::Generated(GraphGen::ScaleFree { n, attach, seed }) => {
                GraphFile { graph: gen_scale_free(*n, *attach, *seed)?, exits: Vec::new() }
            }
        };
        let exits = self.exits.clone().unwrap_or(file.exits);
        let mut b = PegSpec::builder(file.graph, self.pursuers).exits(exits);
        if let Some(r) = self.capture_radius {
            b = b.capture_radius(r);
        }
        if let Some(k) = self.capture_threshold {
            b = b.capture_threshold(k);
        }
        if let Some(t) = self.horizon {
            b = b.horizon(t);
        }
        if let Some(g) = self.discount {
            b = b.discount(g);
        }
        if let Some(p) = self.priority {
            b = b.priority(p);
        }
        let spec = b.build()?;
        let mut sampler = SamplerConfig::default();
        if let Some(d) = self.min_distance {
            sampler.min_distance = d;
        }
        if let Some(r) = self.resample_exits {
            sampler.resample_exits = r;
        }
        Ok(Loaded { config: self, spec, sampler })
    }
}

pub fn load_config(path: &Path) -> Result<Loaded> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Argument(format!("cannot read config {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    PegConfig::from_json(&text)?.resolve(base)
}
