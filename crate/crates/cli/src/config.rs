//! Run configuration: one JSON document describing an experiment.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use refract_core::designer::Strategy;
use refract_core::linalg::SolverOptions;
use refract_core::solvers::EffectiveMode;
use refract_core::{
    DensityProfile, Domain, FieldExpr, Grid, IncidentWave, RefractionProfile, Vec3,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Cells per axis, either one count for all three axes or one per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Cubic(usize),
    Axes([usize; 3]),
}

impl GridSpec {
    pub fn cells(self) -> [usize; 3] {
        match self {
            GridSpec::Cubic(n) => [n; 3],
            GridSpec::Axes(c) => c,
        }
    }

    /// The same grid with twice as many cells per axis.
    pub fn refined(self) -> GridSpec {
        let c = self.cells();
        GridSpec::Axes([2 * c[0], 2 * c[1], 2 * c[2]])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveConfig {
    pub k: f64,
    /// Propagation direction; normalized on use.
    #[serde(default = "default_direction")]
    pub direction: Vec3,
}

fn default_direction() -> Vec3 {
    Vec3::new(0.0, 0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Largest system solved by dense LU; bigger ones use GMRES.
    pub direct_limit: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let o = SolverOptions::default();
        SolverConfig {
            tolerance: o.tolerance,
            max_iterations: o.max_iterations,
            direct_limit: o.direct_limit,
        }
    }
}

impl From<SolverConfig> for SolverOptions {
    fn from(c: SolverConfig) -> Self {
        SolverOptions {
            tolerance: c.tolerance,
            max_iterations: c.max_iterations,
            direct_limit: c.direct_limit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeConfig {
    #[default]
    SingleKernel,
    DirectGreens,
}

impl From<ModeConfig> for EffectiveMode {
    fn from(m: ModeConfig) -> Self {
        match m {
            ModeConfig::SingleKernel => EffectiveMode::SingleKernel,
            ModeConfig::DirectGreens => EffectiveMode::DirectGreens,
        }
    }
}

/// Settings for the Green's-function probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreensProbeConfig {
    pub source: Vec3,
    /// Largest of the three distances used for the near-diagonal limit.
    #[serde(default = "default_probe_distance")]
    pub distance: f64,
    #[serde(default = "default_probe_direction")]
    pub direction: Vec3,
    /// Grids on which the weighted norm is compared; defaults to the main grid.
    #[serde(default)]
    pub grids: Vec<GridSpec>,
    /// Target points paired with the source; defaults to a 5×5×5 lattice in
    /// the domain.
    #[serde(default)]
    pub targets: Vec<Vec3>,
}

fn default_probe_distance() -> f64 {
    0.04
}

fn default_probe_direction() -> Vec3 {
    Vec3::new(1.0, 1.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: Domain,
    pub grid: GridSpec,
    pub wave: WaveConfig,
    /// Background `n₀²`; free space when omitted.
    #[serde(default)]
    pub background: Option<FieldExpr>,
    /// Target `n²` for the designer.
    #[serde(default)]
    pub target: Option<FieldExpr>,
    #[serde(default)]
    pub strategy: Option<Strategy>,
    /// Density `N` given directly instead of designed.
    #[serde(default)]
    pub density: Option<FieldExpr>,
    /// Ball coefficient `ν²` given directly instead of designed.
    #[serde(default)]
    pub nu_sq: Option<FieldExpr>,
    /// Ball radii for the convergence sweep, strictly decreasing.
    #[serde(default)]
    pub radii: Vec<f64>,
    /// Points where discrete and effective fields are compared.
    #[serde(default)]
    pub probes: Vec<Vec3>,
    #[serde(default)]
    pub seed: u64,
    /// Where files go. Not echoed into output headers, so identical runs
    /// written to different places stay byte-identical.
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub mode: ModeConfig,
    /// Also solve on the grid refined twice per axis and report the residual
    /// ratio.
    #[serde(default)]
    pub refine_residual: bool,
    /// Write every generated ball configuration as CSV.
    #[serde(default)]
    pub write_balls: bool,
    #[serde(default)]
    pub greens: Option<GreensProbeConfig>,
}

/// The density/coefficient pair an experiment runs with.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub density: DensityProfile,
    pub nu_sq: RefractionProfile,
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            config_error(format!(
                "field `{path}` (line {}, column {}): {inner}",
                inner.line(),
                inner.column()
            ))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.grid_for(self.grid)?;
        self.incident()?;
        if self.radii.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(config_error("field `radii`: must be strictly decreasing"));
        }
        if self.radii.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
            return Err(config_error("field `radii`: must be positive"));
        }
        if self.probes.iter().any(|p| !p.is_finite()) {
            return Err(config_error("field `probes`: must be finite"));
        }
        let s = self.solver;
        if !(s.tolerance > 0.0) || s.max_iterations == 0 {
            return Err(config_error(
                "field `solver`: tolerance and max_iterations must be positive",
            ));
        }
        if self.density.is_some() != self.nu_sq.is_some() {
            return Err(config_error(
                "fields `density` and `nu_sq` must be given together",
            ));
        }
        if self.target.is_some() != self.strategy.is_some() {
            return Err(config_error(
                "fields `target` and `strategy` must be given together",
            ));
        }
        Ok(())
    }

    pub fn grid_for(&self, spec: GridSpec) -> Result<Grid, CliError> {
        Grid::new(self.domain, spec.cells()).map_err(|e| config_error(format!("field `grid`: {e}")))
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        self.grid_for(self.grid)
    }

    pub fn incident(&self) -> Result<IncidentWave, CliError> {
        IncidentWave::towards(self.wave.k, self.wave.direction)
            .map_err(|e| config_error(format!("field `wave`: {e}")))
    }

    pub fn background(&self) -> RefractionProfile {
        match &self.background {
            Some(e) => RefractionProfile::new(self.domain, e.clone()),
            None => RefractionProfile::vacuum(self.domain),
        }
    }

    pub fn target(&self) -> Result<RefractionProfile, CliError> {
        self.target
            .as_ref()
            .map(|e| RefractionProfile::new(self.domain, e.clone()))
            .ok_or_else(|| config_error("field `target` is required"))
    }

    pub fn strategy(&self) -> Result<Strategy, CliError> {
        self.strategy
            .ok_or_else(|| config_error("field `strategy` is required"))
    }

    pub fn options(&self) -> SolverOptions {
        self.solver.into()
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    /// `N` and `ν²` given directly, if present.
    pub fn direct_embedding(&self) -> Option<Embedding> {
        match (&self.density, &self.nu_sq) {
            (Some(n), Some(nu)) => Some(Embedding {
                density: DensityProfile::new(self.domain, n.clone()),
                nu_sq: RefractionProfile::new(self.domain, nu.clone()),
            }),
            _ => None,
        }
    }

    pub fn greens(&self) -> Result<&GreensProbeConfig, CliError> {
        self.greens
            .as_ref()
            .ok_or_else(|| config_error("field `greens` is required"))
    }
}

/// `[re, im]` pair for JSON output.
pub fn complex_pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "domain": {"lo": [0, 0, 0], "hi": [1, 1, 1]},
        "grid": 6,
        "wave": {"k": 1.0}
    }"#;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = RunConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.grid.cells(), [6, 6, 6]);
        assert_eq!(c.solver, SolverConfig::default());
        assert_eq!(
            c.background().value(Vec3::new(0.5, 0.5, 0.5)),
            Complex64::new(1.0, 0.0)
        );
    }

    #[test]
    fn errors_name_the_field() {
        let bad = MINIMAL.replace("\"k\": 1.0", "\"k\": \"one\"");
        let err = RunConfig::from_json(&bad).unwrap_err().to_string();
        assert!(err.contains("wave.k"), "{err}");
        assert!(err.contains("line 4"), "{err}");
    }

    #[test]
    fn radii_must_decrease() {
        let bad = MINIMAL.replace("\"grid\": 6", "\"grid\": 6, \"radii\": [0.05, 0.05]");
        assert!(RunConfig::from_json(&bad).is_err());
    }

    #[test]
    fn domain_is_validated() {
        let bad = MINIMAL.replace("\"hi\": [1, 1, 1]", "\"hi\": [1, 0, 1]");
        assert!(matches!(
            RunConfig::from_json(&bad),
            Err(CliError::Config(_))
        ));
    }
}
