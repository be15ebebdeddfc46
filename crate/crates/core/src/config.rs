//! JSON run configuration shared by the command-line tool and the test suites.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::discretization::{SpaceGrid, TimeGrid};
use crate::error::{Error, Result};
use crate::functional::Problem;
use crate::kernels::{
    regular_set, CoefficientField, Geometry, KernelDef, KernelTerm, LinearKernelField, MaterialSpec, Part, Profile,
    Variant, DEFAULT_ZERO_TOL,
};
use crate::reconstruction::Lattice;
use crate::scalar::Real;
use crate::solver::SolverConfig;
use crate::verification::{ReportOptions, SuiteTolerances};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearTermConfig {
    #[serde(default)]
    pub part: Part,
    pub profile: Profile,
    pub kernel: KernelDef,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientTermConfig {
    #[serde(default)]
    pub part: Part,
    pub profile: Profile,
}

fn default_variant() -> Variant {
    Variant::Retarded
}

/// Material description as written in config files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    pub geometry: Geometry,
    /// Travel speed relative to the vacuum light speed.
    pub c: f64,
    /// Time period `T`.
    pub period: f64,
    #[serde(default = "default_variant")]
    pub variant: Variant,
    /// Terms of the linear susceptibility; empty means vacuum.
    #[serde(default)]
    pub linear: Vec<LinearTermConfig>,
    /// Spatial period of the periodic background, when the material is split.
    #[serde(default)]
    pub split_period: Option<f64>,
    pub h: Vec<CoefficientTermConfig>,
    pub nu: KernelDef,
    /// Decay exponents with `|k|^{-β} ≲ ℱ_k[𝒩] ≲ |k|^{-α}`.
    pub alpha: f64,
    pub beta: f64,
}

impl MaterialConfig {
    /// Builds the material with kernel coefficients up to `kernel_modes`.
    pub fn build<T: Real>(&self, kernel_modes: usize) -> Result<MaterialSpec<T>> {
        let terms = self
            .linear
            .iter()
            .map(|t| {
                Ok(KernelTerm {
                    profile: t.profile.clone(),
                    kernel: t.kernel.build(self.period, kernel_modes)?,
                    part: t.part,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        MaterialSpec {
            geometry: self.geometry,
            c: T::lit(self.c),
            period: T::lit(self.period),
            linear: LinearKernelField {
                terms,
                split_period: self.split_period,
            },
            h: CoefficientField {
                terms: self.h.iter().map(|t| (t.part, t.profile.clone())).collect(),
            },
            nu: self.nu.build(self.period, kernel_modes)?,
            variant: self.variant,
            alpha: self.alpha,
            beta: self.beta,
        }
        .validated()
    }
}

/// Either an inline material or `{"file": "path"}` (relative to the config file).
#[derive(Clone, Debug, PartialEq)]
pub enum MaterialSource {
    Inline(Box<MaterialConfig>),
    File(PathBuf),
}

impl Serialize for MaterialSource {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MaterialSource::Inline(m) => m.serialize(s),
            MaterialSource::File(p) => serde_json::json!({ "file": p }).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for MaterialSource {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = serde_json::Value::deserialize(d)?;
        match v.as_object() {
            Some(obj) if obj.contains_key("file") => {
                if obj.len() != 1 {
                    return Err(D::Error::custom("a material file reference takes only the \"file\" key"));
                }
                let path = obj["file"].as_str().ok_or_else(|| D::Error::custom("\"file\" must be a string"))?;
                Ok(MaterialSource::File(path.into()))
            }
            _ => serde_json::from_value(v)
                .map(|m| MaterialSource::Inline(Box::new(m)))
                .map_err(D::Error::custom),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Number of cells `N`.
    pub cells: usize,
    /// Half-width `L` (slab) or outer radius `R` (cylinder).
    pub extent: f64,
}

/// Where the exported fields are sampled.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeConfig {
    /// Transverse points per axis.
    pub points: usize,
    /// Transverse window as a fraction of the domain extent.
    pub window: f64,
    pub z_samples: usize,
    pub t_samples: usize,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            points: 41,
            window: 0.25,
            z_samples: 4,
            t_samples: 8,
        }
    }
}

impl LatticeConfig {
    pub fn lattice(&self, geometry: Geometry, extent: f64, c: f64, period: f64) -> Lattice {
        Lattice::periodic(
            geometry,
            self.window * extent,
            self.points,
            self.z_samples,
            self.t_samples,
            c,
            period,
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub lattice: LatticeConfig,
}

/// A complete run: material, discretization, solver and outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub material: MaterialSource,
    pub grid: GridConfig,
    /// Temporal cutoff `K`.
    pub k_max: usize,
    /// Time samples `M`; defaults to `4K + 1`.
    #[serde(default)]
    pub time_samples: Option<usize>,
    /// Highest singular mode solved for when reconstructing `w`; defaults to `3K`.
    #[serde(default)]
    pub k_sing: Option<usize>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub report: ReportOptions,
    #[serde(default)]
    pub tolerances: SuiteTolerances,
    /// Subharmonic indices `n` to solve in addition to the base problem.
    #[serde(default)]
    pub subharmonics: Vec<usize>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.check()?;
        Ok(cfg)
    }

    /// Reads a config file and inlines a referenced material file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_json(&text)?;
        if let MaterialSource::File(rel) = &cfg.material {
            let full = match path.parent() {
                Some(dir) if rel.is_relative() => dir.join(rel),
                _ => rel.clone(),
            };
            if !full.exists() {
                return Err(Error::InvalidConfig(format!("material file {} does not exist", full.display())));
            }
            let m: MaterialConfig = serde_json::from_str(&std::fs::read_to_string(&full)?)?;
            cfg.material = MaterialSource::Inline(Box::new(m));
        }
        Ok(cfg)
    }

    pub fn check(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::InvalidConfig(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        if self.k_max == 0 {
            return Err(Error::InvalidConfig("k_max must be positive".into()));
        }
        if self.time_samples() < 4 * self.k_max + 1 {
            return Err(Error::InvalidConfig(format!(
                "time_samples = {} is below 4K + 1 = {}",
                self.time_samples(),
                4 * self.k_max + 1
            )));
        }
        if self.subharmonics.contains(&0) {
            return Err(Error::InvalidConfig("subharmonic index 0 is meaningless".into()));
        }
        self.solver.validate()
    }

    pub fn time_samples(&self) -> usize {
        self.time_samples.unwrap_or(4 * self.k_max + 1)
    }

    pub fn k_sing(&self) -> usize {
        self.k_sing.unwrap_or(3 * self.k_max)
    }

    /// Number of kernel coefficients materialized: enough for the cube of a degree-`K`
    /// field and for every singular mode that may be reconstructed.
    pub fn kernel_modes(&self) -> usize {
        (3 * self.k_max).max(self.k_sing())
    }

    pub fn material_config(&self) -> Result<&MaterialConfig> {
        match &self.material {
            MaterialSource::Inline(m) => Ok(m),
            MaterialSource::File(p) => Err(Error::InvalidConfig(format!(
                "material file {} was not loaded; use RunConfig::load",
                p.display()
            ))),
        }
    }

    /// Replaces the geometry of the material (and thereby of the grid).
    pub fn override_geometry(&mut self, geometry: Geometry) -> Result<()> {
        match &mut self.material {
            MaterialSource::Inline(m) => {
                m.geometry = geometry;
                Ok(())
            }
            MaterialSource::File(_) => Err(Error::InvalidConfig("load the material before overriding".into())),
        }
    }

    pub fn material<T: Real>(&self) -> Result<MaterialSpec<T>> {
        self.material_config()?.build(self.kernel_modes())
    }

    pub fn grid<T: Real>(&self) -> Result<SpaceGrid<T>> {
        let m = self.material_config()?;
        SpaceGrid::new(m.geometry, self.grid.cells, T::lit(self.grid.extent))
    }

    pub fn problem<T: Real>(&self) -> Result<Problem<T>> {
        let spec = self.material::<T>()?;
        let grid = Arc::new(self.grid::<T>()?);
        Problem::with_cutoff(spec, grid, self.k_max, TimeGrid::new(self.time_samples())?)
    }

    /// Regular modes implied by the material without building a grid.
    pub fn regular_modes(&self) -> Result<Vec<usize>> {
        let spec = self.material::<f64>()?;
        Ok(regular_set(&spec.nu, self.k_max, DEFAULT_ZERO_TOL, spec.geometry)?.regular().to_vec())
    }

    pub fn lattice(&self) -> Result<Lattice> {
        let m = self.material_config()?;
        Ok(self.output.lattice.lattice(m.geometry, self.grid.extent, m.c, m.period))
    }
}
