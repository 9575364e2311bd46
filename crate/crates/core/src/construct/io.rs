use serde::{Deserialize, Serialize};

use super::{darboux_data, Mode, VectorField};
use crate::config::{AugmentMode, AugmentationCounts, AugmentedConfiguration, Circle, ConfigError, ConfigFile, ExtraCircle};
use crate::ratpoly::{format_fraction, parse_rational, Poly, Rational};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtraCircleRecord {
    pub center: [String; 2],
    pub radius: String,
    pub owner: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentationRecord {
    pub mode: Option<AugmentMode>,
    pub epsilon: Option<String>,
    pub extra_circles: Vec<ExtraCircleRecord>,
    pub singular_points: Vec<[String; 2]>,
    pub counts: AugmentationCounts,
}

/// On-disk form of a [`VectorField`]. Rationals are `"num/den"` strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldFile {
    #[serde(rename = "P")]
    pub p: Poly,
    #[serde(rename = "Q")]
    pub q: Poly,
    #[serde(rename = "V")]
    pub v: Poly,
    pub tau: Vec<String>,
    pub mode: Mode,
    pub degree_bound: u32,
    #[serde(default)]
    pub darboux: serde_json::Value,
    pub configuration: ConfigFile,
    pub augmentation: AugmentationRecord,
    pub remark_optimization: bool,
}

fn parse(s: &str) -> Result<Rational, ConfigError> {
    parse_rational(s).map_err(|e| ConfigError::Malformed(e.to_string()))
}

fn pair(p: &(Rational, Rational)) -> [String; 2] {
    [format_fraction(&p.0), format_fraction(&p.1)]
}

impl FieldFile {
    pub fn from_field(v: &VectorField) -> Self {
        let aug = &v.config;
        FieldFile {
            p: v.p.clone(),
            q: v.q.clone(),
            v: v.v.clone(),
            tau: v.tau.iter().map(format_fraction).collect(),
            mode: v.mode,
            degree_bound: v.degree_bound,
            darboux: darboux_data(v).map(|d| d.to_json()).unwrap_or(serde_json::Value::Null),
            configuration: ConfigFile::from_configuration(&aug.base),
            augmentation: AugmentationRecord {
                mode: aug.mode,
                epsilon: aug.epsilon.as_ref().map(format_fraction),
                extra_circles: aug
                    .extra_circles
                    .iter()
                    .map(|e| ExtraCircleRecord {
                        center: pair(&e.circle.center),
                        radius: format_fraction(&e.circle.radius),
                        owner: e.owner,
                    })
                    .collect(),
                singular_points: aug.singular_points.iter().map(pair).collect(),
                counts: aug.counts,
            },
            remark_optimization: v.remark_optimization,
        }
    }

    pub fn into_field(self) -> Result<VectorField, ConfigError> {
        let base = self.configuration.into_configuration()?;
        let a = &self.augmentation;
        let extra_circles = a
            .extra_circles
            .iter()
            .map(|e| Ok(ExtraCircle { circle: Circle::new(parse(&e.center[0])?, parse(&e.center[1])?, parse(&e.radius)?), owner: e.owner }))
            .collect::<Result<Vec<_>, ConfigError>>()?;
        let singular_points = a
            .singular_points
            .iter()
            .map(|p| Ok((parse(&p[0])?, parse(&p[1])?)))
            .collect::<Result<Vec<_>, ConfigError>>()?;
        let config = AugmentedConfiguration {
            base,
            extra_circles,
            epsilon: a.epsilon.as_deref().map(parse).transpose()?,
            singular_points,
            counts: a.counts,
            mode: a.mode,
        };
        let tau = self.tau.iter().map(|s| parse(s)).collect::<Result<Vec<_>, _>>()?;
        if tau.len() != config.circles().len() {
            return Err(ConfigError::Malformed(format!("{} tau values for {} circles", tau.len(), config.circles().len())));
        }
        Ok(VectorField {
            p: self.p,
            q: self.q,
            v: self.v,
            tau,
            mode: self.mode,
            degree_bound: self.degree_bound,
            config,
            remark_optimization: self.remark_optimization,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(s).map_err(|e| ConfigError::Malformed(e.to_string()))
    }
}
