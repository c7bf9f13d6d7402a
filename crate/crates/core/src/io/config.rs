//! JSON run configuration.
//!
//! ```json
//! {
//!   "n_modes": 2, "g_theta": 32, "g_k": 32,
//!   "envelopes": [{"kind": "gaussian", "center": [1.2, 0.4], "widths": [0.5, 0.2]},
//!                 {"kind": "constant"}],
//!   "target": {"mode": "constant", "bits": "10"},
//!   "zetas": [{"kind": "cosine", "frequency": 0.5}, {"kind": "constant", "value": 1.0}],
//!   "iterations": "auto",
//!   "use_dilation": false,
//!   "seed": 0
//! }
//! ```
//!
//! Errors carry a JSON pointer to the offending field.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::ModularGrid;
use crate::operators::{IntervalSet, LogicalString, TargetSpec, ZetaSpec};
use crate::search::{Iterations, SearchConfig};
use crate::zak::EnvelopeSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n_modes: usize,
    pub g_theta: usize,
    pub g_k: usize,
    pub envelopes: Vec<EnvelopeSpec>,
    pub target: TargetConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub zetas: Vec<ZetaSpec>,
    #[serde(default)]
    pub iterations: IterationsSetting,
    #[serde(default)]
    pub use_dilation: bool,
    /// Reserved; the pipeline is deterministic.
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum TargetConfig {
    Constant {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bits: Option<LogicalString>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        strings: Option<Vec<LogicalString>>,
    },
    Intervals {
        intervals: Vec<Vec<[f64; 2]>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AutoWord {
    #[serde(rename = "auto")]
    Auto,
}

/// `"auto"` or a non-negative integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IterationsSetting {
    Count(usize),
    Keyword(AutoWord),
}

impl Default for IterationsSetting {
    fn default() -> Self {
        IterationsSetting::Keyword(AutoWord::Auto)
    }
}

impl IterationsSetting {
    pub fn auto() -> Self {
        Self::default()
    }
}

impl From<IterationsSetting> for Iterations {
    fn from(s: IterationsSetting) -> Self {
        match s {
            IterationsSetting::Count(r) => Iterations::Fixed(r),
            IterationsSetting::Keyword(_) => Iterations::Auto,
        }
    }
}

fn invalid(pointer: impl Into<String>, message: impl ToString) -> Error {
    Error::ConfigInvalid {
        pointer: pointer.into(),
        message: message.to_string(),
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let mut pointer = String::new();
        for seg in e.path().iter() {
            match seg {
                serde_path_to_error::Segment::Seq { index } => pointer.push_str(&format!("/{index}")),
                serde_path_to_error::Segment::Map { key } => {
                    pointer.push('/');
                    pointer.push_str(&key.replace('~', "~0").replace('/', "~1"));
                }
                _ => {}
            }
        }
        invalid(pointer, e.inner())
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

impl RunConfig {
    pub fn grid(&self) -> Result<ModularGrid> {
        ModularGrid::new(self.n_modes, self.g_theta, self.g_k).map_err(|e| match e {
            Error::ZeroSize(field) => invalid(format!("/{field}"), "must be at least 1"),
            other => invalid("/n_modes", other),
        })
    }

    pub fn target_spec(&self) -> Result<TargetSpec> {
        let spec = match &self.target {
            TargetConfig::Constant {
                bits: Some(b),
                strings: None,
            } => TargetSpec::single(b.clone()),
            TargetConfig::Constant {
                bits: None,
                strings: Some(s),
            } => TargetSpec::Constant(s.clone()),
            TargetConfig::Constant { .. } => {
                return Err(invalid("/target", "give exactly one of `bits` or `strings`"))
            }
            TargetConfig::Intervals { intervals } => TargetSpec::Intervals(
                intervals
                    .iter()
                    .enumerate()
                    .map(|(i, v)| IntervalSet::new(v.clone()).map_err(|e| invalid(format!("/target/intervals/{i}"), e)))
                    .collect::<Result<_>>()?,
            ),
        };
        spec.validate(self.n_modes).map_err(|e| invalid("/target", e))?;
        Ok(spec)
    }

    /// Validates every field and builds the search configuration.
    pub fn to_search_config(&self) -> Result<SearchConfig> {
        let grid = self.grid()?;
        let mode_grid = grid.mode_grid();
        if self.envelopes.len() != self.n_modes {
            return Err(invalid(
                "/envelopes",
                format!("expected {} envelopes, found {}", self.n_modes, self.envelopes.len()),
            ));
        }
        for (i, e) in self.envelopes.iter().enumerate() {
            e.values(&mode_grid).map_err(|err| invalid(format!("/envelopes/{i}"), err))?;
        }
        let target = self.target_spec()?;
        if !self.zetas.is_empty() && self.zetas.len() != self.n_modes {
            return Err(invalid(
                "/zetas",
                format!("expected {} weight functions, found {}", self.n_modes, self.zetas.len()),
            ));
        }
        for (i, z) in self.zetas.iter().enumerate() {
            z.table(&mode_grid).map_err(|err| invalid(format!("/zetas/{i}"), err))?;
        }
        if let IterationsSetting::Keyword(_) = self.iterations {
            crate::search::iteration_count(self.n_modes, target.m_targets()).map_err(|e| invalid("/target", e))?;
        }
        Ok(SearchConfig::new(grid, self.envelopes.clone(), target)
            .with_zetas(self.zetas.clone())
            .with_iterations(self.iterations.into())
            .with_dilation(self.use_dilation))
    }
}
