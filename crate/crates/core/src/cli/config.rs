//! Scenario files. Every section has defaults; unknown keys are rejected.

use num_complex::Complex64;
use serde::Deserialize;

use super::CliError;
use crate::chain::MismatchDistribution;
use crate::linalg::LocalVector;
use crate::product::{AngleFamily, ProductState, TailSpec};
use crate::spinchain::{spin_state, SpinPattern};

/// An amplitude: a real number or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Amp {
    Real(f64),
    Complex([f64; 2]),
}

impl Amp {
    fn value(self) -> Complex64 {
        match self {
            Amp::Real(x) => Complex64::new(x, 0.0),
            Amp::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

pub fn vector(amps: &[Amp], field: &str) -> Result<LocalVector, CliError> {
    let v = LocalVector::new(amps.iter().map(|a| a.value()).collect()).map_err(|e| CliError::field(field, e))?;
    v.check_normalized().map_err(|e| CliError::field(field, e))?;
    Ok(v)
}

fn up() -> Vec<Amp> {
    vec![Amp::Real(1.0), Amp::Real(0.0)]
}

fn one() -> u64 {
    1
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyConfig {
    Constant {
        theta: f64,
    },
    /// A constant angle given by its cosine.
    ConstantCos {
        cos_theta: f64,
    },
    PowerLaw {
        c: f64,
        p: f64,
        #[serde(default = "one")]
        start: u64,
    },
    Geometric {
        c: f64,
        r: f64,
    },
    OverlapPowerLaw {
        c: f64,
        p: f64,
        #[serde(default = "one")]
        start: u64,
    },
}

impl FamilyConfig {
    pub fn family(self, field: &str) -> Result<AngleFamily, CliError> {
        let f = match self {
            FamilyConfig::Constant { theta } => AngleFamily::Constant { theta },
            FamilyConfig::ConstantCos { cos_theta } if (-1.0..=1.0).contains(&cos_theta) => {
                AngleFamily::Constant { theta: cos_theta.acos() }
            }
            FamilyConfig::ConstantCos { cos_theta } => {
                return Err(CliError::Config(format!("{field}.cos_theta: {cos_theta} is not in [-1, 1]")))
            }
            FamilyConfig::PowerLaw { c, p, start } => AngleFamily::PowerLaw { c, p, start },
            FamilyConfig::Geometric { c, r } => AngleFamily::Geometric { c, r },
            FamilyConfig::OverlapPowerLaw { c, p, start } => AngleFamily::OverlapPowerLaw { c, p, start },
        };
        f.validate().map_err(|e| CliError::field(field, e))?;
        Ok(f)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TailConfig {
    Constant {
        vector: Vec<Amp>,
    },
    Rotated {
        #[serde(default = "up")]
        base: Vec<Amp>,
        family: FamilyConfig,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateConfig {
    /// A blocked spin chain with flipped sites.
    Spin {
        pattern: SpinPattern,
        #[serde(default)]
        flips: Vec<usize>,
    },
    /// The same vector in every factor.
    Uniform { vector: Vec<Amp> },
    Product {
        #[serde(default)]
        prefix: Vec<Vec<Amp>>,
        tail: TailConfig,
    },
}

impl StateConfig {
    pub fn state(&self, field: &str) -> Result<ProductState, CliError> {
        match self {
            StateConfig::Spin { pattern, flips } => Ok(spin_state(*pattern, flips)),
            StateConfig::Uniform { vector: v } => {
                ProductState::uniform(vector(v, &format!("{field}.vector"))?).map_err(|e| CliError::field(field, e))
            }
            StateConfig::Product { prefix, tail } => {
                let prefix = prefix
                    .iter()
                    .enumerate()
                    .map(|(i, v)| vector(v, &format!("{field}.prefix[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                let tail = match tail {
                    TailConfig::Constant { vector: v } => {
                        TailSpec::constant(vector(v, &format!("{field}.tail.vector"))?)
                    }
                    TailConfig::Rotated { base, family } => TailSpec::rotated(
                        vector(base, &format!("{field}.tail.base"))?,
                        family.family(&format!("{field}.tail.family"))?,
                    ),
                };
                ProductState::new(prefix, tail).map_err(|e| CliError::field(field, e))
            }
        }
    }

    pub fn spin(pattern: SpinPattern) -> Self {
        StateConfig::Spin { pattern, flips: Vec::new() }
    }

    fn rotated(family: FamilyConfig) -> Self {
        StateConfig::Product { prefix: Vec::new(), tail: TailConfig::Rotated { base: up(), family } }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OverlapConfig {
    pub psi: StateConfig,
    pub phi: StateConfig,
    /// Length of the truncated-product curve.
    pub depth: usize,
}

impl Default for OverlapConfig {
    /// The telescoping pair `1 − ⟨ψ_i|φ_i⟩ = 1/i²`, `i ≥ 2`.
    fn default() -> Self {
        Self {
            psi: StateConfig::rotated(FamilyConfig::Constant { theta: 0.0 }),
            phi: StateConfig::rotated(FamilyConfig::OverlapPowerLaw { c: 1.0, p: 2.0, start: 2 }),
            depth: 1000,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SectorsConfig {
    pub states: Vec<StateConfig>,
}

impl Default for SectorsConfig {
    fn default() -> Self {
        Self { states: [SpinPattern::Up, SpinPattern::Down, SpinPattern::Mixed].map(StateConfig::spin).to_vec() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainMode {
    /// Decay curve of two noiseless chains.
    Decay,
    /// Decay statistics under random per-friend rotations.
    Stochastic,
    /// The branch expansion of one chain.
    Branches,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainSection {
    pub mode: ChainMode,
    pub object: Vec<Amp>,
    pub steps: usize,
    pub mismatch: FamilyConfig,
    /// The chain `mismatch` is compared with.
    pub reference: FamilyConfig,
    pub distribution: MismatchDistribution,
    pub trials: usize,
    pub seed: Option<u64>,
    pub branch_cap: usize,
    pub prune_threshold: f64,
}

impl Default for ChainSection {
    fn default() -> Self {
        Self {
            mode: ChainMode::Decay,
            object: up(),
            steps: 100,
            mismatch: FamilyConfig::ConstantCos { cos_theta: 0.99 },
            reference: FamilyConfig::Constant { theta: 0.0 },
            distribution: MismatchDistribution::Gaussian { sigma: 0.1 },
            trials: 1000,
            seed: None,
            branch_cap: 1024,
            prune_threshold: 0.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinEntry {
    pub pattern: SpinPattern,
    #[serde(default)]
    pub flips: Vec<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpinchainConfig {
    /// States added after `psi_up`, `psi_down` and `psi_mixed`.
    pub extra: Vec<SpinEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub index: usize,
    pub replacement: Vec<Amp>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectConfig {
    pub state: StateConfig,
    /// `E` projects onto this vector.
    pub projector: Vec<Amp>,
    pub probes: Vec<ProbeConfig>,
    /// Traces of `E^{⊗k}` are reported for `k = 1..=trace_factors`.
    pub trace_factors: usize,
}

impl Default for ProjectConfig {
    fn default() -> Self {
        let probe = |replacement: [f64; 2]| ProbeConfig { index: 5, replacement: replacement.map(Amp::Real).to_vec() };
        Self {
            state: StateConfig::Uniform { vector: up() },
            projector: up(),
            probes: vec![probe([0.0, 1.0]), probe([0.8, 0.6]), probe([1.0, 0.0])],
            trace_factors: 3,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sqrt2Config {
    pub depth: usize,
}

impl Default for Sqrt2Config {
    fn default() -> Self {
        Self { depth: 10 }
    }
}

/// A scenario file: one optional section per subcommand.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: Option<String>,
    pub overlap: OverlapConfig,
    pub sectors: SectorsConfig,
    pub chain: ChainSection,
    pub spinchain: SpinchainConfig,
    pub project: ProjectConfig,
    pub sqrt2: Sqrt2Config,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }
}
