//! Versioned JSON run configuration.
//!
//! Levels are 1-based in the file (`"from": 2` is level 2) and Liouville basis
//! states are written as labels such as `"11"` or `"23"`.

use std::path::{Path, PathBuf};

use heod::encoding::{EncodingMatrix, Pathway, Scheme};
use heod::liouville::{index_map, Channel, ControlField, FieldComponent, LevelSystem, LiouvilleIndexMap};
use heod::models::{benchmark_three_level, two_level_toy, Benchmark};
use heod::propagation::TimeGrid;
use heod::transforms::{Picture, PictureSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA: &str = "heod-config/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: String,
    pub model: ModelBlock,
    pub field: FieldBlock,
    pub encoding: EncodingBlock,
    pub run: RunBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub dim: usize,
    pub energies: Vec<f64>,
    pub dipole: Vec<Vec<f64>>,
    #[serde(default)]
    pub channels: Vec<ChannelEntry>,
    pub eta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelEntry {
    pub from: usize,
    pub to: usize,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldBlock {
    pub total_time: f64,
    pub sigma: f64,
    #[serde(default)]
    pub components: Vec<FieldComponent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncodingBlock {
    pub scheme: Scheme,
    pub samples: usize,
    pub matrix: Vec<Vec<u32>>,
}

fn default_threshold() -> f64 {
    1e-3
}

fn default_record_every() -> usize {
    16
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunBlock {
    pub picture: Picture,
    #[serde(default)]
    pub rwa: bool,
    #[serde(default)]
    pub carry_phases: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub max_order: usize,
    pub source: String,
    pub target: String,
    /// Relative significance threshold on `|c(f)| / max |c|`.
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// Pathways to report; every enumerated walk when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pathways: Option<Vec<String>>,
    /// Trajectory sampling stride for `simulate`.
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

/// Validated configuration in core types.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub system: LevelSystem,
    pub field: ControlField,
    pub map: LiouvilleIndexMap,
    pub gamma: EncodingMatrix,
    pub scheme: Scheme,
    pub picture: PictureSpec,
    pub grid: TimeGrid,
    pub max_order: usize,
    pub source: usize,
    pub target: usize,
    pub threshold: f64,
    pub pathways: Option<Vec<Pathway>>,
    pub record_every: usize,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => invalid(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
        if cfg.schema != SCHEMA {
            return Err(invalid(format!(
                "schema must be {SCHEMA:?}, found {:?}",
                cfg.schema
            )));
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let m = &self.model;
        let d = m.dim;
        if m.dipole.len() != d || m.dipole.iter().any(|r| r.len() != d) {
            return Err(invalid(format!("model.dipole must be a {d}x{d} matrix")));
        }
        let mut channels = Vec::with_capacity(m.channels.len());
        for (n, c) in m.channels.iter().enumerate() {
            if c.from == 0 || c.to == 0 || c.from > d || c.to > d {
                return Err(invalid(format!(
                    "model.channels[{n}]: levels are numbered 1..={d}"
                )));
            }
            channels.push(Channel { from: c.from - 1, to: c.to - 1, rate: c.rate });
        }
        let system = LevelSystem {
            dim: d,
            energies: m.energies.clone(),
            dipole: m.dipole.concat(),
            channels,
            eta: m.eta,
        };
        system.validate().map_err(|e| invalid(format!("model: {e}")))?;

        let field = ControlField {
            total_time: self.field.total_time,
            envelope_width: self.field.sigma,
            components: self.field.components.clone(),
        };
        field.validate().map_err(|e| invalid(format!("field: {e}")))?;

        let map = index_map(d).map_err(|e| invalid(e.to_string()))?;
        let e = &self.encoding;
        let gamma = EncodingMatrix::from_rows(&e.matrix, e.samples)
            .map_err(|err| invalid(format!("encoding: {err}")))?;
        if gamma.dim() != d * d {
            return Err(invalid(format!(
                "encoding.matrix must be {0}x{0} for a {d}-level model",
                d * d
            )));
        }
        e.scheme.check(&gamma, &map).map_err(|err| invalid(format!("encoding: {err}")))?;

        let r = &self.run;
        let picture = PictureSpec { picture: r.picture, rwa: r.rwa, carry_phases: r.carry_phases };
        if r.picture == Picture::Transformed && !r.rwa && !field.is_zero() {
            return Err(invalid("run.rwa must be true for the transformed picture with a field"));
        }
        if r.picture == Picture::Original && r.rwa {
            return Err(invalid("run.rwa applies to the interaction and transformed pictures"));
        }
        let steps = match (r.steps, r.dt) {
            (Some(_), Some(_)) => return Err(invalid("give run.steps or run.dt, not both")),
            (Some(n), None) => n,
            (None, Some(dt)) if dt > 0.0 => (field.total_time / dt).ceil() as usize,
            (None, Some(_)) => return Err(invalid("run.dt must be positive")),
            (None, None) => 32768,
        };
        let grid = TimeGrid::new(field.total_time, steps).map_err(|e| invalid(format!("run: {e}")))?;
        let label = |what: &str, l: &str| {
            map.parse_label(l).map_err(|e| invalid(format!("run.{what}: {e}")))
        };
        let source = label("source", &r.source)?;
        let target = label("target", &r.target)?;
        if !(r.threshold >= 0.0) {
            return Err(invalid("run.threshold must be non-negative"));
        }
        if r.max_order == 0 || r.max_order > heod::encoding::MAX_PATHWAY_ORDER {
            return Err(invalid(format!(
                "run.max_order must be in 1..={}",
                heod::encoding::MAX_PATHWAY_ORDER
            )));
        }
        if r.record_every == 0 {
            return Err(invalid("run.record_every must be positive"));
        }
        let pathways = match &r.pathways {
            None => None,
            Some(list) => Some(
                list.iter()
                    .map(|l| {
                        let p = Pathway::parse(l, &map)
                            .map_err(|e| invalid(format!("run.pathways {l:?}: {e}")))?;
                        if p.source() != source || p.target() != target {
                            return Err(invalid(format!(
                                "run.pathways {l:?} does not run from source to target"
                            )));
                        }
                        Ok(p)
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        };

        Ok(Resolved {
            system,
            field,
            map,
            gamma,
            scheme: e.scheme,
            picture,
            grid,
            max_order: r.max_order,
            source,
            target,
            threshold: r.threshold,
            pathways,
            record_every: r.record_every,
        })
    }
}

pub const PRESETS: [&str; 4] = [
    "three-level-off-diagonal",
    "three-level-diagonal",
    "three-level-transformed",
    "two-level-toy",
];

fn from_benchmark(
    b: &Benchmark,
    gamma: &EncodingMatrix,
    scheme: Scheme,
    picture: Picture,
) -> RunConfig {
    let map = index_map(b.system.dim).unwrap();
    let d = b.system.dim;
    let transformed = picture == Picture::Transformed;
    RunConfig {
        schema: SCHEMA.into(),
        model: ModelBlock {
            dim: d,
            energies: b.system.energies.clone(),
            dipole: b.system.dipole.chunks(d).map(|r| r.to_vec()).collect(),
            channels: b
                .system
                .channels
                .iter()
                .map(|c| ChannelEntry { from: c.from + 1, to: c.to + 1, rate: c.rate })
                .collect(),
            eta: b.system.eta,
            note: Some(b.eta_provenance.clone()),
        },
        field: FieldBlock {
            total_time: b.field.total_time,
            sigma: b.field.envelope_width,
            components: b.field.components.clone(),
        },
        encoding: EncodingBlock { scheme, samples: gamma.samples(), matrix: gamma.rows() },
        run: RunBlock {
            picture,
            rwa: transformed,
            carry_phases: false,
            steps: Some(b.steps),
            dt: None,
            max_order: b.max_order,
            source: map.label(b.source),
            target: map.label(b.target),
            threshold: default_threshold(),
            pathways: if b.pathways.is_empty() {
                None
            } else {
                Some(b.pathways.iter().map(|s| s.to_string()).collect())
            },
            record_every: default_record_every(),
            out: None,
        },
    }
}

pub fn preset(name: &str) -> Result<RunConfig, CliError> {
    let b = benchmark_three_level();
    Ok(match name {
        "three-level-off-diagonal" => {
            from_benchmark(&b, &b.off_diagonal, Scheme::OffDiagonal, Picture::Original)
        }
        "three-level-diagonal" => {
            from_benchmark(&b, &b.diagonal_inclusive, Scheme::DiagonalInclusive, Picture::Original)
        }
        "three-level-transformed" => {
            from_benchmark(&b, &b.transformed, Scheme::Custom, Picture::Transformed)
        }
        "two-level-toy" => {
            let t = two_level_toy(0.002, 0.01);
            from_benchmark(&t, &t.off_diagonal, Scheme::Custom, Picture::Original)
        }
        other => {
            return Err(invalid(format!(
                "unknown preset {other:?}; available: {}",
                PRESETS.join(", ")
            )))
        }
    })
}
