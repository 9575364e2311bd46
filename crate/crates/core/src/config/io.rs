use serde::{Deserialize, Serialize};

use super::{layout_forest, Circle, ConfigError, Configuration, CycleSpec, ForestNode, NestingForest, Sign};
use crate::ratpoly::{format_short, parse_rational};

/// JSON record of one cycle; rationals travel as strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleRecord {
    pub center: [String; 2],
    pub radius: String,
    pub period: f64,
    pub multiplicity: u32,
    pub stability: Sign,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestRecord {
    pub forest: Vec<ForestNode>,
}

/// Either explicit circles or an abstract nesting forest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConfigFile {
    Cycles { cycles: Vec<CycleRecord> },
    Forest { forest: Vec<ForestNode> },
}

impl ConfigFile {
    pub fn from_json(s: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(s).map_err(|e| ConfigError::Malformed(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Explicit circles; forests are laid out first.
    pub fn into_configuration(self) -> Result<Configuration, ConfigError> {
        match self {
            ConfigFile::Cycles { cycles } => {
                let cycles = cycles.iter().map(CycleRecord::to_spec).collect::<Result<Vec<_>, _>>()?;
                Ok(Configuration::new(cycles))
            }
            ConfigFile::Forest { forest } => Ok(layout_forest(&NestingForest { roots: forest })),
        }
    }

    pub fn from_configuration(c: &Configuration) -> Self {
        ConfigFile::Cycles { cycles: c.cycles.iter().map(CycleRecord::from_spec).collect() }
    }
}

impl CycleRecord {
    pub fn to_spec(&self) -> Result<CycleSpec, ConfigError> {
        let p = |s: &str| parse_rational(s).map_err(|e| ConfigError::Malformed(e.to_string()));
        Ok(CycleSpec {
            circle: Circle::new(p(&self.center[0])?, p(&self.center[1])?, p(&self.radius)?),
            period: self.period,
            multiplicity: self.multiplicity,
            interior_stability: self.stability,
        })
    }

    pub fn from_spec(c: &CycleSpec) -> Self {
        CycleRecord {
            center: [format_short(&c.circle.center.0), format_short(&c.circle.center.1)],
            radius: format_short(&c.circle.radius),
            period: c.period,
            multiplicity: c.multiplicity,
            stability: c.interior_stability,
        }
    }
}
