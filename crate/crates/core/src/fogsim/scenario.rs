//! Declarative scenario files.
//!
//! A scenario is TOML with a header, one `[[entity]]` table per node, a
//! scripted `[[step]]` list and `[[assert]]` end-state checks:
//!
//! ```toml
//! name = "secure-data-aggregation"
//! protocol = "aggregation"
//! seed = 7
//!
//! [[entity]]
//! id = "press-1"
//! layer = "perception"
//!
//! [[entity]]
//! id = "fog-1"
//! layer = "fog"
//!
//! [[step]]
//! at = 10
//! entity = "press-1"
//! action = "send-frame"
//! to = "fog-1"
//! n = 7
//! msg_size = 100
//!
//! [[assert]]
//! kind = "link-bytes"
//! src = "press-1"
//! dst = "fog-1"
//! equals = 796
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SimError;
use crate::pairing::Backend;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Perception,
    Fog,
    Cloud,
    Application,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Proxy,
    Pkg,
    Ta,
    Authority,
    Sender,
    Receiver,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    Aggregation,
    Sharing,
    AccessControl,
    Computation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntitySpec {
    pub id: String,
    pub layer: Layer,
    #[serde(default)]
    pub roles: Vec<Role>,
    /// Attributes an authority controls, or attributes a device holds keys for.
    #[serde(default)]
    pub attributes: Vec<String>,
    /// Fog nodes only: emit an opaque summary to the cloud every this many ticks.
    #[serde(default)]
    pub summary_period: Option<u64>,
}

impl EntitySpec {
    pub fn has(&self, role: Role) -> bool {
        self.roles.contains(&role)
    }
}

/// One scripted stimulus. Protocol-specific arguments sit next to the
/// common fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepSpec {
    pub at: u64,
    pub entity: String,
    pub action: String,
    #[serde(flatten)]
    pub args: toml::Table,
}

impl StepSpec {
    fn bad(&self, key: &str, want: &str) -> SimError {
        SimError::Scenario(format!(
            "step `{}` at t={} on {}: argument `{key}` must be {want}",
            self.action, self.at, self.entity
        ))
    }

    pub fn opt_str(&self, key: &str) -> Result<Option<&str>, SimError> {
        match self.args.get(key) {
            None => Ok(None),
            Some(v) => v.as_str().map(Some).ok_or_else(|| self.bad(key, "a string")),
        }
    }

    pub fn str(&self, key: &str) -> Result<&str, SimError> {
        self.opt_str(key)?.ok_or_else(|| self.bad(key, "present"))
    }

    pub fn opt_u64(&self, key: &str) -> Result<Option<u64>, SimError> {
        match self.args.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_integer()
                .and_then(|i| u64::try_from(i).ok())
                .map(Some)
                .ok_or_else(|| self.bad(key, "a non-negative integer")),
        }
    }

    pub fn u64(&self, key: &str) -> Result<u64, SimError> {
        self.opt_u64(key)?.ok_or_else(|| self.bad(key, "present"))
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64, SimError> {
        Ok(self.opt_u64(key)?.unwrap_or(default))
    }

    pub fn strs(&self, key: &str) -> Result<Vec<&str>, SimError> {
        match self.args.get(key) {
            None => Ok(Vec::new()),
            Some(toml::Value::Array(items)) => items
                .iter()
                .map(|v| v.as_str().ok_or_else(|| self.bad(key, "a list of strings")))
                .collect(),
            Some(_) => Err(self.bad(key, "a list of strings")),
        }
    }
}

/// End-state checks evaluated after the run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AssertSpec {
    /// Accounted bytes on one directed link, optionally for one payload type.
    LinkBytes {
        src: String,
        dst: String,
        #[serde(default)]
        payload: Option<String>,
        equals: u64,
    },
    /// Accounted bytes an entity transmitted.
    SentBytes {
        entity: String,
        #[serde(default)]
        payload: Option<String>,
        equals: u64,
    },
    MessageCount {
        #[serde(default)]
        src: Option<String>,
        #[serde(default)]
        dst: Option<String>,
        #[serde(default)]
        payload: Option<String>,
        equals: u64,
    },
    /// Every occurrence of the step at the entity costs exactly `ops`.
    StepOps {
        entity: String,
        step: String,
        ops: String,
    },
    /// The listed step ids occur in this order.
    StepOrder { steps: Vec<String> },
    /// A named end-to-end check recorded by the protocol driver came out true.
    Outcome { entity: String, name: String },
    NoPlaintextInCloud,
}

fn default_backend() -> Backend {
    Backend::Curve
}

fn default_summary_bytes() -> usize {
    64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub protocol: Protocol,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_backend")]
    pub backend: Backend,
    /// Per-link delivery delay in ticks.
    #[serde(default)]
    pub latency: u64,
    #[serde(default = "default_summary_bytes")]
    pub summary_bytes: usize,
    /// Last tick for periodic events; defaults to the last scripted step.
    #[serde(default)]
    pub horizon: Option<u64>,
    #[serde(rename = "entity", default)]
    pub entities: Vec<EntitySpec>,
    #[serde(rename = "step", default)]
    pub steps: Vec<StepSpec>,
    #[serde(rename = "assert", default)]
    pub asserts: Vec<AssertSpec>,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.')
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Scenario, SimError> {
        let sc: Scenario = toml::from_str(text).map_err(|e| SimError::Scenario(e.to_string()))?;
        sc.check_ids()?;
        Ok(sc)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    fn check_ids(&self) -> Result<(), SimError> {
        let mut seen = BTreeMap::new();
        for e in &self.entities {
            if !valid_id(&e.id) {
                return Err(SimError::Scenario(format!("invalid entity id `{}`", e.id)));
            }
            if seen.insert(e.id.as_str(), ()).is_some() {
                return Err(SimError::Scenario(format!("duplicate entity id `{}`", e.id)));
            }
        }
        for s in &self.steps {
            if !seen.contains_key(s.entity.as_str()) {
                return Err(SimError::Topology(format!(
                    "step `{}` names unknown entity `{}`",
                    s.action, s.entity
                )));
            }
        }
        Ok(())
    }

    pub fn entity(&self, id: &str) -> Option<&EntitySpec> {
        self.entities.iter().find(|e| e.id == id)
    }

    /// Bundled scenarios by name.
    pub fn builtin(name: &str) -> Option<Scenario> {
        BUILTIN_SCENARIOS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| Scenario::from_toml(text).expect("bundled scenario parses"))
    }
}

pub const BUILTIN_SCENARIOS: [(&str, &str); 4] = [
    (
        "secure-data-aggregation",
        include_str!("../../scenarios/secure-data-aggregation.toml"),
    ),
    (
        "secure-data-sharing",
        include_str!("../../scenarios/secure-data-sharing.toml"),
    ),
    (
        "fine-grained-access-control",
        include_str!("../../scenarios/fine-grained-access-control.toml"),
    ),
    (
        "secure-computation",
        include_str!("../../scenarios/secure-computation.toml"),
    ),
];
