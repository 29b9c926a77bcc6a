//! Run configuration, read from a TOML file.
//!
//! Relative field paths are resolved against the directory of the config file.

use serde::Deserialize;
use std::path::{Path, PathBuf};
use susy_sigma::analysis::{dyadic_radii, DiscGrid};
use susy_sigma::fields::{ConformalMetric, GravitinoField, MapField, VectorSpinorField};
use susy_sigma::geometry::{Ellipsoid, Grid, TargetManifold};
use susy_sigma::io::FieldTable;
use susy_sigma::sampling::{self, SeededRng};
use susy_sigma::solver::SolverConfig;
use susy_sigma::{Error, Result};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub grid: GridSpec,
    #[serde(default)]
    pub target: TargetSpec,
    #[serde(default)]
    pub metric: MetricSpec,
    #[serde(default)]
    pub phi: PhiSpec,
    #[serde(default)]
    pub psi: PsiSpec,
    #[serde(default)]
    pub gravitino: GravitinoSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub morrey: MorreySpec,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n1: usize,
    pub n2: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TargetSpec {
    /// Round sphere `S^dim` of the given radius in `ℝ^{dim+1}`.
    Sphere {
        dim: usize,
        #[serde(default = "one")]
        radius: f64,
    },
    Ellipsoid { axes: Vec<f64> },
}

impl Default for TargetSpec {
    fn default() -> Self {
        TargetSpec::Sphere { dim: 2, radius: 1.0 }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MetricSpec {
    #[default]
    Zero,
    Constant { value: f64 },
    Random { amplitude: f64 },
    File { path: PathBuf },
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PhiSpec {
    /// A constant map; the default point is the first ambient basis vector scaled onto the target.
    Constant { point: Option<Vec<f64>> },
    #[default]
    Equator,
    PerturbedEquator { amplitude: f64 },
    Random { amplitude: f64 },
    File { path: PathBuf },
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PsiSpec {
    #[default]
    Zero,
    Random { amplitude: f64 },
    File { path: PathBuf },
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GravitinoSpec {
    #[default]
    Zero,
    Random { amplitude: f64 },
    File { path: PathBuf },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSpec {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub initial_step: f64,
    pub shrink: f64,
    pub grow: f64,
    pub mode: susy_sigma::solver::FlowMode,
}

impl Default for SolverSpec {
    fn default() -> Self {
        let d = SolverConfig::default();
        SolverSpec {
            max_iterations: d.max_iterations,
            tolerance: d.tolerance,
            initial_step: d.initial_step,
            shrink: d.shrink,
            grow: d.grow,
            mode: d.mode,
        }
    }
}

/// Scalar field on the unit disc fed to the Morrey diagnostics.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DiscField {
    Constant { value: f64 },
    /// `|x - center|^exponent`, set to zero at the centre when the exponent is negative.
    Power { exponent: f64 },
    /// `exp(-|x - center|² / width²)`.
    Gaussian { width: f64 },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MorreySpec {
    /// Even number of cells across the diameter.
    pub resolution: usize,
    pub p: f64,
    pub lambda: f64,
    pub center: [f64; 2],
    pub r_max: f64,
    pub radii_count: usize,
    pub field: DiscField,
}

impl Default for MorreySpec {
    fn default() -> Self {
        MorreySpec {
            resolution: 64,
            p: 2.0,
            lambda: 1.0,
            center: [0.0, 0.0],
            r_max: 1.0,
            radii_count: 6,
            field: DiscField::Gaussian { width: 0.3 },
        }
    }
}

fn one() -> f64 {
    1.0
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = RunConfig::parse(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<RunConfig> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    fn table(&self, p: &Path, grid: &Grid) -> Result<FieldTable> {
        let t = FieldTable::load(&self.resolve(p))?;
        if (t.n1, t.n2) != (grid.n1(), grid.n2()) {
            return Err(Error::DimensionMismatch(format!(
                "field file is {}x{}, grid is {}x{}",
                t.n1,
                t.n2,
                grid.n1(),
                grid.n2()
            )));
        }
        Ok(t)
    }

    pub fn solver_config(&self) -> SolverConfig {
        let s = &self.solver;
        SolverConfig {
            max_iterations: s.max_iterations,
            tolerance: s.tolerance,
            initial_step: s.initial_step,
            shrink: s.shrink,
            grow: s.grow,
            mode: s.mode,
            seed: self.seed,
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid.n1, self.grid.n2)
    }

    pub fn target(&self) -> Result<TargetManifold> {
        match &self.target {
            TargetSpec::Sphere { dim, radius } => TargetManifold::sphere(dim + 1, *radius),
            TargetSpec::Ellipsoid { axes } => {
                TargetManifold::embedded(std::sync::Arc::new(Ellipsoid::new(axes.clone())?))
            }
        }
    }

    /// Builds all fields; random ones draw from one stream seeded by `seed`
    /// in the order `u`, `φ`, `ψ`, `χ`.
    pub fn fields(&self, grid: &Grid, m: &TargetManifold) -> Result<Fields> {
        let mut rng = sampling::rng(self.seed);
        let u = self.metric_field(grid, &mut rng)?;
        let phi = self.phi_field(grid, m, &mut rng)?;
        if phi.k() != m.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "map has {} components, target lives in R^{}",
                phi.k(),
                m.ambient_dim()
            )));
        }
        phi.validate(grid, m)?;
        let psi = match &self.psi {
            PsiSpec::Zero => VectorSpinorField::zeros(grid, phi.k()),
            PsiSpec::Random { amplitude } => {
                sampling::random_tangent_spinors(grid, &phi, m, &mut rng, *amplitude)
            }
            PsiSpec::File { path } => self.table(path, grid)?.to_spinors()?,
        };
        if psi.k() != phi.k() || psi.sites() != grid.len() {
            return Err(Error::DimensionMismatch("spinor field does not match the map".into()));
        }
        let chi = match &self.gravitino {
            GravitinoSpec::Zero => GravitinoField::zeros(grid),
            GravitinoSpec::Random { amplitude } => sampling::random_gravitino(grid, &mut rng, *amplitude),
            GravitinoSpec::File { path } => self.table(path, grid)?.to_gravitino()?,
        };
        Ok(Fields { u, phi, psi, chi })
    }

    fn metric_field(&self, grid: &Grid, rng: &mut SeededRng) -> Result<ConformalMetric> {
        match &self.metric {
            MetricSpec::Zero => Ok(ConformalMetric::flat(grid)),
            MetricSpec::Constant { value } => ConformalMetric::new(vec![*value; grid.len()]),
            MetricSpec::Random { amplitude } => {
                ConformalMetric::new(sampling::smooth_scalar(grid, rng, 2, *amplitude))
            }
            MetricSpec::File { path } => self.table(path, grid)?.to_conformal(),
        }
    }

    fn phi_field(&self, grid: &Grid, m: &TargetManifold, rng: &mut SeededRng) -> Result<MapField> {
        let k = m.ambient_dim();
        match &self.phi {
            PhiSpec::Constant { point } => {
                let p = point.clone().unwrap_or_else(|| {
                    let mut e = vec![0.0; k];
                    e[0] = 1.0;
                    e
                });
                if p.len() != k {
                    return Err(Error::DimensionMismatch(format!("constant point needs {k} components")));
                }
                Ok(MapField::constant(grid, &m.project(&p)))
            }
            PhiSpec::Equator | PhiSpec::PerturbedEquator { .. } => {
                if k != 3 || !m.is_analytic() {
                    return Err(Error::InvalidParameter("equator maps need a round two-sphere target".into()));
                }
                let base = match &self.phi {
                    PhiSpec::PerturbedEquator { amplitude } => sampling::perturbed_equator(grid, rng, *amplitude),
                    _ => sampling::equator_map(grid),
                };
                let data = base.data().iter().map(|v| v * radius_of(m)).collect();
                MapField::new(3, data)
            }
            PhiSpec::Random { amplitude } => Ok(sampling::random_map(grid, m, rng, *amplitude)),
            PhiSpec::File { path } => self.table(path, grid)?.to_map(),
        }
    }

    pub fn disc(&self) -> Result<(DiscGrid, Vec<f64>, Vec<f64>)> {
        let s = &self.morrey;
        let disc = DiscGrid::new(s.resolution)?;
        let [cx, cy] = s.center;
        let field = match s.field {
            DiscField::Constant { value } => disc.sample(|_, _| value),
            DiscField::Power { exponent } => disc.sample(|x, y| {
                let r = ((x - cx).powi(2) + (y - cy).powi(2)).sqrt();
                if r == 0.0 && exponent < 0.0 {
                    0.0
                } else {
                    r.powf(exponent)
                }
            }),
            DiscField::Gaussian { width } => {
                disc.sample(|x, y| (-((x - cx).powi(2) + (y - cy).powi(2)) / (width * width)).exp())
            }
        };
        Ok((disc, field, dyadic_radii(s.r_max, s.radii_count)))
    }
}

fn radius_of(m: &TargetManifold) -> f64 {
    let mut e = vec![0.0; m.ambient_dim()];
    e[0] = 1.0;
    m.project(&e)[0]
}

pub struct Fields {
    pub u: ConformalMetric,
    pub phi: MapField,
    pub psi: VectorSpinorField,
    pub chi: GravitinoField,
}
