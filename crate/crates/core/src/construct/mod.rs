//! Exact construction of polynomial vector fields realizing circle
//! configurations, with their inverse integrating factors and first integrals.
//!
//! Every builder returns a [`VectorField`] carrying `P`, `Q`, `V`, the time
//! rescalings `τ_k` and the configuration (with any helper circles) it was
//! built from.

mod bundle;
mod darboux;
mod io;
mod tau;

pub use bundle::{hole_factors, xm_polys, xt_polys, xtm_polys, AuxiliaryBundle, FieldPolys};
pub use darboux::{darboux_data, DarbouxData, ExpTerm, LogFactor};
pub use io::{AugmentationRecord, ExtraCircleRecord, FieldFile};
pub use tau::{compute_tau, CycleFactors, Scaling, TAU_RTOL};

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::analysis::AnalysisError;
use crate::config::{
    augment_for_stability, validate_configuration, AugmentMode, AugmentedConfiguration, ConfigError, Configuration, NestingIndex,
};
use crate::ratpoly::{int, Poly, Rational};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConstructError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("tau for cycle {0} must be positive")]
    NonpositiveTau(usize),
    #[error("expected {expected} tau values, got {got}")]
    TauCount { expected: usize, got: usize },
    #[error("cycle {0} has invalid period {1}")]
    InvalidPeriod(usize, f64),
    #[error("scaling factor vanishes on cycle {0}")]
    ScalingVanishesOnCycle(usize),
    #[error("could not rationalize tau for cycle {0}")]
    Rationalize(usize),
    #[error("quadrature failed: {0}")]
    Quadrature(#[from] AnalysisError),
    #[error("hole factor needs at least one point")]
    NoPoints,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Baseline field, every `τ_k = 1`, every cycle hyperbolic.
    LR,
    /// Prescribed periods.
    T,
    /// Prescribed multiplicities.
    M,
    /// Periods and multiplicities.
    Tm,
    /// Periods and hyperbolic stabilities via helper circles and holes.
    Ts,
    /// Periods, multiplicities and interior stabilities.
    Full,
}

impl Mode {
    pub const ALL: [Mode; 6] = [Mode::LR, Mode::T, Mode::M, Mode::Tm, Mode::Ts, Mode::Full];

    pub fn name(self) -> &'static str {
        match self {
            Mode::LR => "lr",
            Mode::T => "t",
            Mode::M => "m",
            Mode::Tm => "tm",
            Mode::Ts => "ts",
            Mode::Full => "full",
        }
    }

    pub fn prescribes_period(self) -> bool {
        matches!(self, Mode::T | Mode::Tm | Mode::Ts | Mode::Full)
    }

    pub fn uses_multiplicity(self) -> bool {
        matches!(self, Mode::M | Mode::Tm | Mode::Full)
    }

    pub fn has_holes(self) -> bool {
        matches!(self, Mode::Ts | Mode::Full)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Mode::ALL.into_iter().find(|m| m.name() == s.to_ascii_lowercase()).ok_or_else(|| format!("unknown mode {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildOptions {
    /// Drop helper circles from the sums in `H_T`, `F_T`, `G_T`; they stay
    /// in `A_m` and become circles of zeros.
    pub remark_optimization: bool,
}

/// A constructed field `X = P ∂x + Q ∂y` with inverse integrating factor `V`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub p: Poly,
    pub q: Poly,
    pub v: Poly,
    /// One entry per circle of `config` (base, then helpers).
    pub tau: Vec<Rational>,
    pub mode: Mode,
    pub degree_bound: u32,
    pub config: AugmentedConfiguration,
    pub remark_optimization: bool,
}

impl VectorField {
    pub fn degree(&self) -> u32 {
        self.p.degree().unwrap_or(0).max(self.q.degree().unwrap_or(0))
    }

    /// Multiplicities the construction used: all 1 unless the mode carries them.
    pub fn multiplicities(&self) -> Vec<u32> {
        if self.mode.uses_multiplicity() {
            self.config.multiplicities()
        } else {
            vec![1; self.config.circles().len()]
        }
    }

    pub fn index(&self) -> Result<NestingIndex, ConfigError> {
        self.config.index()
    }

    /// Which circles enter the sums of `H_T`, `F_T`, `G_T`.
    pub fn included(&self) -> Vec<bool> {
        let n = self.config.n();
        (0..self.config.circles().len()).map(|k| k < n || !self.remark_optimization).collect()
    }

    pub fn polys(&self) -> FieldPolys {
        FieldPolys { p: self.p.clone(), q: self.q.clone(), v: self.v.clone() }
    }
}

fn check_tau(tau: &[Rational], n: usize) -> Result<(), ConstructError> {
    if tau.len() != n {
        return Err(ConstructError::TauCount { expected: n, got: tau.len() });
    }
    match tau.iter().position(|t| !t.is_positive()) {
        Some(k) => Err(ConstructError::NonpositiveTau(k)),
        None => Ok(()),
    }
}

fn field(polys: FieldPolys, tau: Vec<Rational>, mode: Mode, degree_bound: u32, config: AugmentedConfiguration, remark: bool) -> VectorField {
    VectorField { p: polys.p, q: polys.q, v: polys.v, tau, mode, degree_bound, config, remark_optimization: remark }
}

/// Prescribed-period field, all multiplicities treated as 1.
pub fn build_xt(c: &Configuration, idx: &NestingIndex, tau: &[Rational]) -> Result<VectorField, ConstructError> {
    check_tau(tau, c.len())?;
    let ones = vec![1; c.len()];
    let aux = AuxiliaryBundle::new(&c.circles(), &ones, idx);
    let polys = xt_polys(&aux, tau, &vec![true; c.len()]);
    let bound = 2 * (c.len() as u32 + idx.primary_count);
    Ok(field(polys, tau.to_vec(), Mode::T, bound, AugmentedConfiguration::plain(c.clone()), false))
}

/// Prescribed-multiplicity field.
pub fn build_xm(c: &Configuration, idx: &NestingIndex) -> Result<VectorField, ConstructError> {
    let aux = AuxiliaryBundle::new(&c.circles(), &c.multiplicities(), idx);
    let bound = 2 * (idx.primary_count + c.total_multiplicity());
    Ok(field(xm_polys(&aux), vec![int(1); c.len()], Mode::M, bound, AugmentedConfiguration::plain(c.clone()), false))
}

/// Prescribed periods and multiplicities.
pub fn build_xtm(c: &Configuration, idx: &NestingIndex, tau: &[Rational]) -> Result<VectorField, ConstructError> {
    check_tau(tau, c.len())?;
    let aux = AuxiliaryBundle::new(&c.circles(), &c.multiplicities(), idx);
    let polys = xtm_polys(&aux, tau, &vec![true; c.len()]);
    let bound = 2 * (idx.primary_count + c.total_multiplicity());
    Ok(field(polys, tau.to_vec(), Mode::Tm, bound, AugmentedConfiguration::plain(c.clone()), false))
}

/// Multiplies `P`, `Q` and `V` by `L = Π l_j`.
pub fn apply_hole_factor(v: &VectorField, points: &[(Rational, Rational)]) -> Result<VectorField, ConstructError> {
    if points.is_empty() {
        return Err(ConstructError::NoPoints);
    }
    let (_, l) = hole_factors(points);
    Ok(VectorField {
        p: &v.p * &l,
        q: &v.q * &l,
        v: &v.v * &l,
        degree_bound: v.degree_bound + 2 * points.len() as u32,
        ..v.clone()
    })
}

/// Builds the field of the requested mode, augmenting the configuration
/// with helper circles where the mode calls for it.
pub fn build_field(c: &Configuration, mode: Mode, opts: BuildOptions) -> Result<VectorField, ConstructError> {
    let idx = validate_configuration(c)?;
    let aug = match mode {
        Mode::Ts => augment_for_stability(c, &idx, AugmentMode::Hyperbolic)?,
        Mode::Full => augment_for_stability(c, &idx, AugmentMode::General)?,
        _ => AugmentedConfiguration::plain(c.clone()),
    };
    let n = c.len();
    let total = aug.circles().len();
    let mults = if mode.uses_multiplicity() { aug.multiplicities() } else { vec![1; total] };
    let mut tau = vec![Rational::one(); total];
    if mode.prescribes_period() {
        for (k, cy) in c.cycles.iter().enumerate() {
            tau[k] = compute_tau(&aug, &mults, k, mode, cy.period)?;
        }
    }
    let aug_idx = aug.index()?;
    let aux = AuxiliaryBundle::new(&aug.circles(), &mults, &aug_idx);
    let include: Vec<bool> = (0..total).map(|k| k < n || !opts.remark_optimization).collect();
    let polys = if mode.uses_multiplicity() { xtm_polys(&aux, &tau, &include) } else { xt_polys(&aux, &tau, &include) };
    let r = aug_idx.primary_count;
    let bound = match mode {
        Mode::LR | Mode::T => 2 * (n as u32 + r),
        Mode::M | Mode::Tm => 2 * (r + c.total_multiplicity()),
        Mode::Ts => 2 * (2 * n as u32 + r),
        Mode::Full => 2 * ((total - n) as u32 + r + c.total_multiplicity()),
    };
    let built = field(polys, tau, mode, bound, aug.clone(), opts.remark_optimization);
    if aug.singular_points.is_empty() {
        Ok(built)
    } else {
        apply_hole_factor(&built, &aug.singular_points)
    }
}

/// The full pipeline: augment, compute `τ`, build `X_Tm`, punch holes.
pub fn build_realizing_field(c: &Configuration) -> Result<(VectorField, AugmentedConfiguration), ConstructError> {
    let v = build_field(c, Mode::Full, BuildOptions::default())?;
    let aug = v.config.clone();
    Ok((v, aug))
}
