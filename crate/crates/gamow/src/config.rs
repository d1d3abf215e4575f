//! TOML run configuration. Key names are documented in `docs/SCHEMA.md`.

use std::collections::BTreeMap;
use std::path::Path;

use gamow_core::criterion::EnergyGrid;
use gamow_core::{PhysicalScale, Potential, SearchRegion};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "one")]
    pub kappa: f64,
    pub breakpoints: Vec<f64>,
    pub heights: Vec<f64>,
    #[serde(default)]
    pub smatrix: SMatrixConfig,
    #[serde(default)]
    pub resonances: ResonanceConfig,
    #[serde(default)]
    pub eigenfunction: EigenfunctionConfig,
    #[serde(default)]
    pub criterion: CriterionConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub transform: TransformConfig,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SMatrixConfig {
    pub k_min: f64,
    pub k_max: f64,
    pub points: usize,
}

impl Default for SMatrixConfig {
    fn default() -> Self {
        Self {
            k_min: 0.05,
            k_max: 10.0,
            points: 200,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResonanceConfig {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub max_states: usize,
    pub cell_size: f64,
}

impl Default for ResonanceConfig {
    fn default() -> Self {
        Self {
            re_min: 0.0,
            re_max: 6.0,
            im_min: -2.0,
            im_max: 0.0,
            max_states: 64,
            cell_size: 0.25,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EigenfunctionConfig {
    /// `standing_wave`, `in`, `out` or `gamow`.
    pub family: String,
    pub energy: f64,
    /// 1-based pole index for `gamow`.
    pub pole: usize,
    pub growing: bool,
    pub r_max: f64,
    pub points: usize,
}

impl Default for EigenfunctionConfig {
    fn default() -> Self {
        Self {
            family: "standing_wave".into(),
            energy: 9.0,
            pole: 1,
            growing: false,
            r_max: 10.0,
            points: 101,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CriterionConfig {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
    pub skip_real_axis: bool,
    /// Subset of `rho`, `rho_plus`, `jost_plus`, `jost_minus`,
    /// `standing_wave`, `in`, `out`.
    pub targets: Vec<String>,
}

impl Default for CriterionConfig {
    fn default() -> Self {
        let g = EnergyGrid::default();
        Self {
            re_min: g.re_min,
            re_max: g.re_max,
            im_min: g.im_min,
            im_max: g.im_max,
            n_re: g.n_re,
            n_im: g.n_im,
            skip_real_axis: g.skip_real_axis,
            targets: ["rho", "rho_plus", "jost_plus", "standing_wave", "in", "out"]
                .map(String::from)
                .to_vec(),
        }
    }
}

impl CriterionConfig {
    pub fn grid(&self) -> EnergyGrid {
        EnergyGrid {
            re_min: self.re_min,
            re_max: self.re_max,
            im_min: self.im_min,
            im_max: self.im_max,
            n_re: self.n_re,
            n_im: self.n_im,
            skip_real_axis: self.skip_real_axis,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    /// Gaussian test function in energy.
    pub center: f64,
    pub width: f64,
    /// Radial cutoff; defaults to 30 times the outer radius.
    pub r_max: Option<f64>,
    pub n_energy: usize,
    pub n_radius: usize,
    /// Gaussian bump for the Parseval check.
    pub bump_center: f64,
    pub bump_width: f64,
    pub bump_r_max: f64,
    pub bump_points: usize,
    pub k_max: f64,
    pub k_points: usize,
    /// Unitarity / proportionality sample count.
    pub samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            center: 16.0,
            width: 1.5,
            r_max: None,
            n_energy: 801,
            n_radius: 2401,
            bump_center: 10.0,
            bump_width: 1.0,
            bump_r_max: 20.0,
            bump_points: 4001,
            k_max: 9.0,
            k_points: 4001,
            samples: 1000,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransformConfig {
    pub family: String,
    /// Gaussian bump `exp(−(r − center)²/(2 width²))`.
    pub center: f64,
    pub width: f64,
    pub r_max: f64,
    pub r_points: usize,
    pub e_min: f64,
    pub e_max: f64,
    pub e_points: usize,
}

impl Default for TransformConfig {
    fn default() -> Self {
        Self {
            family: "standing_wave".into(),
            center: 10.0,
            width: 1.0,
            r_max: 20.0,
            r_points: 2001,
            e_min: 0.05,
            e_max: 40.0,
            e_points: 400,
        }
    }
}

/// A parsed config together with its validated physics and provenance.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: RunConfig,
    pub potential: Potential,
    pub scale: PhysicalScale,
    /// Leading 16 hex digits of the SHA-256 of the config file bytes.
    pub hash: String,
}

impl Loaded {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_str(&text)
    }

    pub fn from_str(text: &str) -> Result<Self, CliError> {
        let config: RunConfig = toml::from_str(text)?;
        let scale = PhysicalScale::new(config.kappa).map_err(CliError::from)?;
        let potential = Potential::new(config.breakpoints.clone(), config.heights.clone())?;
        let digest = Sha256::digest(text.as_bytes());
        Ok(Self {
            config,
            potential,
            scale,
            hash: hex::encode(&digest[..8]),
        })
    }

    pub fn region(&self) -> Result<(SearchRegion, bool), CliError> {
        let r = &self.config.resonances;
        // A region reaching into the upper half-plane is clipped to the real axis.
        let clipped = r.im_max > 0.0;
        let region = SearchRegion::new(r.re_min, r.re_max, r.im_min, r.im_max.min(0.0))?;
        Ok((region, clipped))
    }
}

/// Tolerances used by `verify`, overridable with `--tolerance KEY=VALUE`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Self(
            [
                ("unitarity", 1e-10),
                ("proportionality", 1e-12),
                ("residue", 1e-6),
                ("partner", 1e-8),
                ("mirrored_zero", 1e-10),
                ("tail", 1e-10),
                ("smeared_delta", 1e-3),
                ("parseval", 1e-3),
            ]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
        )
    }
}

impl Tolerances {
    pub fn with_overrides(overrides: &[String]) -> Result<Self, CliError> {
        let mut t = Self::default();
        for o in overrides {
            let (key, value) = o
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("tolerance override `{o}` is not KEY=VALUE")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("tolerance `{key}` is not a number")))?;
            if !(value > 0.0) || !value.is_finite() {
                return Err(CliError::Config(format!("tolerance `{key}` must be positive")));
            }
            match t.0.get_mut(key.trim()) {
                Some(slot) => *slot = value,
                None => return Err(CliError::Config(format!("unknown tolerance `{key}`"))),
            }
        }
        Ok(t)
    }

    pub fn get(&self, key: &str) -> f64 {
        self.0[key]
    }

    /// `key=value` pairs joined by commas, for the header line.
    pub fn summary(&self) -> String {
        self.0.iter().map(|(k, v)| format!("{k}={v:e}")).collect::<Vec<_>>().join(",")
    }
}
