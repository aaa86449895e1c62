//! TOML run configuration and the shipped presets.
//!
//! ```toml
//! name = "desk"
//! mode = "binary"            # or "nonbinary"
//!
//! [field]
//! s = 3
//! primitive_poly = "0xb"     # full mask including x^s; optional
//!
//! [code]
//! n = 7
//! roots = [1, 2, 4]          # or: designed_distance = 3
//!
//! [channel]
//! ebn0_db = [0.0, 1.0, 2.0]
//! seed = 1
//!
//! [decoder]
//! iterations = [10, 50]
//! scale = 0.625
//! # saturation = 20.0
//!
//! [sim]
//! max_frames = 100000
//! target_errors = 100
//! baseline = false
//! verify = false
//! # threads = 4
//!
//! [output]
//! dir = "results"
//! ```

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cyclic::{bch_roots, BaseCodeSpec, Mode};
use crate::error::{Error, Result};
use crate::galois::{default_primitive_poly, GaloisField};
use crate::sim::SimConfig;
use crate::txrx::FfOfdm;

/// Shipped presets as (name, TOML source).
pub const PRESETS: &[(&str, &str)] = &[
    ("desk", include_str!("../../../presets/desk.toml")),
    ("ex1", include_str!("../../../presets/ex1.toml")),
    ("ex2", include_str!("../../../presets/ex2.toml")),
    ("ex3", include_str!("../../../presets/ex3.toml")),
    ("ex4", include_str!("../../../presets/ex4.toml")),
    ("ex5", include_str!("../../../presets/ex5.toml")),
];

pub fn preset(name: &str) -> Option<Config> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, src)| Config::from_toml_str(src).expect("shipped preset parses"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub mode: Mode,
    pub field: FieldSection,
    pub code: CodeSection,
    #[serde(default)]
    pub channel: ChannelSection,
    #[serde(default)]
    pub decoder: DecoderSection,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    pub s: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primitive_poly: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSection {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub designed_distance: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelSection {
    pub ebn0_db: Vec<f64>,
    pub seed: u64,
}

impl Default for ChannelSection {
    fn default() -> Self {
        Self {
            ebn0_db: vec![0.0],
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecoderSection {
    pub iterations: Vec<usize>,
    pub scale: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub saturation: Option<f64>,
}

impl Default for DecoderSection {
    fn default() -> Self {
        Self {
            iterations: vec![10],
            scale: 0.625,
            saturation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimSection {
    pub max_frames: u64,
    pub target_errors: u64,
    pub baseline: bool,
    pub verify: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            max_frames: 10_000,
            target_errors: 100,
            baseline: false,
            verify: false,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: "results".into(),
        }
    }
}

/// Accepts `0x`-prefixed hex or plain decimal.
pub fn parse_poly(text: &str) -> Result<u32> {
    let t = text.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u32::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|_| Error::config("field.primitive_poly", format!("cannot parse {text:?}")))
}

impl Config {
    pub fn from_toml_str(src: &str) -> Result<Self> {
        toml::from_str(src).map_err(|e| {
            let msg = e.message().to_string();
            let field = msg
                .split('`')
                .nth(1)
                .filter(|_| msg.contains("field"))
                .unwrap_or("toml")
                .to_string();
            Error::Config {
                field,
                message: msg,
            }
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn primitive_poly(&self) -> Result<u32> {
        match &self.field.primitive_poly {
            Some(text) => parse_poly(text),
            None => default_primitive_poly(self.field.s).ok_or_else(|| {
                Error::config(
                    "field.primitive_poly",
                    format!("no default polynomial for s = {}", self.field.s),
                )
            }),
        }
    }

    /// Root exponents, expanding `designed_distance` when given.
    pub fn roots(&self) -> Result<Vec<usize>> {
        let n = self.code.n;
        match (&self.code.roots, self.code.designed_distance) {
            (Some(r), None) => Ok(r.clone()),
            (None, Some(d)) => {
                if d < 2 || d > n {
                    return Err(Error::config("code.designed_distance", format!("must lie in 2..={n}")));
                }
                Ok(match self.mode {
                    Mode::Binary => bch_roots(d, n),
                    Mode::Nonbinary => (1..d).collect(),
                })
            }
            _ => Err(Error::config(
                "code",
                "exactly one of `roots` and `designed_distance` is required",
            )),
        }
    }

    pub fn field(&self) -> Result<Arc<GaloisField>> {
        let poly = self.primitive_poly()?;
        GaloisField::new(self.field.s, poly)
            .map(Arc::new)
            .map_err(|e| Error::config("field", e.to_string()))
    }

    pub fn spec(&self) -> Result<BaseCodeSpec> {
        let field = self.field()?;
        let subgroup = field
            .element_of_order(self.code.n)
            .map_err(|e| Error::config("code.n", e.to_string()))?;
        BaseCodeSpec::new(field, subgroup, self.roots()?, self.mode)
            .map_err(|e| Error::config("code.roots", e.to_string()))
    }

    /// Like [`Config::spec`] but accepts repeated roots, so that deliberately
    /// defective matrices can be built and inspected.
    pub fn spec_unchecked(&self) -> Result<BaseCodeSpec> {
        let field = self.field()?;
        let subgroup = field
            .element_of_order(self.code.n)
            .map_err(|e| Error::config("code.n", e.to_string()))?;
        Ok(BaseCodeSpec::new_unchecked(field, subgroup, self.roots()?, self.mode))
    }

    pub fn system(&self) -> Result<FfOfdm> {
        Ok(FfOfdm::new(self.spec()?)?.with_verification(self.sim.verify))
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            ebn0_db: self.channel.ebn0_db.clone(),
            iterations: self.decoder.iterations.clone(),
            scale: self.decoder.scale,
            saturation: self.decoder.saturation,
            max_frames: self.sim.max_frames,
            target_errors: self.sim.target_errors,
            seed: self.channel.seed,
            baseline: self.sim.baseline,
            verify: self.sim.verify,
        }
    }

    /// Full validation, including construction of the base code.
    pub fn validate(&self) -> Result<()> {
        if self.sim.threads == Some(0) {
            return Err(Error::config("sim.threads", "must be positive"));
        }
        self.spec()?;
        self.sim_config().validate()
    }
}
