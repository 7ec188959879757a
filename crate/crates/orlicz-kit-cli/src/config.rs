//! Run configuration: TOML with one section per object.
//!
//! ```toml
//! [young.Phi]
//! family = "power"
//! p = 2
//!
//! [weight.phi]
//! family = "power"
//! lambda = -1
//!
//! [kernel.rho]
//! family = "log_kernel"
//! alpha = 0.5
//!
//! [grid]
//! n = 1
//! L = 4.0
//! h = 0.02
//!
//! [run]
//! seed = 7
//! ```
//!
//! Tabulated objects name a two-column CSV (`family = "tabulated"`, `file = "phi.csv"`),
//! resolved against the config file's directory. `inf` is a valid float literal.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use orlicz_kit::fields_norms::{BallFamily, Grid};
use orlicz_kit::grids::LogGrid;
use orlicz_kit::io::read_table;
use orlicz_kit::verify_harness::{norm_family, HarnessConfig};
use orlicz_kit::weights_kernels::{KernelFamily, KernelFunction, LogTable, WeightFunction};
use orlicz_kit::young_calc::YoungFunction;
use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum YoungSpec {
    Power { p: f64 },
    PowerOverP { p: f64 },
    CappedLinear,
    ShiftedSquare,
    ExpPower { p: f64 },
    Tabulated { file: PathBuf },
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Power { lambda: f64 },
    PowerWithLog { lambda: f64, mu: f64 },
    Constant { c: f64 },
    ReciprocalPowerN { n: u32 },
    Tabulated { file: PathBuf },
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelFamilySpec {
    Power { alpha: f64 },
    LogKernel { alpha: f64 },
    BesselType { alpha: f64 },
    Constant { c: f64 },
    Tabulated { file: PathBuf },
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
pub struct KernelSpec {
    #[serde(flatten)]
    pub family: KernelFamilySpec,
    pub k1: Option<f64>,
    pub k2: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "one")]
    pub n: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
    pub h: f64,
}

fn one() -> usize {
    1
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { n: 1, half_width: 4.0, h: 0.02 }
    }
}

/// Centres every `stride` grid points, radii `r0·κʲ` for `j ≤ J` (or up to `2L`).
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BallSpec {
    pub r0: f64,
    pub kappa: f64,
    #[serde(rename = "J")]
    pub j_max: Option<usize>,
    #[serde(default = "one")]
    pub stride: usize,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RGridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for RGridSpec {
    fn default() -> Self {
        let g = LogGrid::default_r();
        RGridSpec { min: g.min, max: g.max, points: g.points }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_drift")]
    pub drift: f64,
}

fn default_drift() -> f64 {
    HarnessConfig::default().drift_tol
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { drift: default_drift() }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub out: Option<PathBuf>,
}

fn default_seed() -> u64 {
    HarnessConfig::default().seed
}

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec { seed: default_seed(), out: None }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SuiteSpec {
    #[serde(default = "default_corpus")]
    pub corpus_size: usize,
    #[serde(default = "default_negative_levels")]
    pub negative_levels: usize,
}

fn default_corpus() -> usize {
    HarnessConfig::default().corpus_size
}

fn default_negative_levels() -> usize {
    HarnessConfig::default().negative_levels
}

impl Default for SuiteSpec {
    fn default() -> Self {
        SuiteSpec { corpus_size: default_corpus(), negative_levels: default_negative_levels() }
    }
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub young: BTreeMap<String, YoungSpec>,
    #[serde(default)]
    pub weight: BTreeMap<String, WeightSpec>,
    #[serde(default)]
    pub kernel: BTreeMap<String, KernelSpec>,
    #[serde(default)]
    pub grid: GridSpec,
    pub balls: Option<BallSpec>,
    #[serde(default)]
    pub rgrid: RGridSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub run: RunSpec,
    #[serde(default)]
    pub suite: SuiteSpec,
    /// Directory that relative table paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, CliError> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Input(format!("config: {e}")))?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(RunConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Input(format!("cannot read {}: {e}", p.display())))?;
                RunConfig::parse(&text, p.parent().unwrap_or(Path::new(".")))
            }
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        let g = &self.grid;
        if !(g.n == 1 || g.n == 2) {
            return Err(CliError::Input(format!("grid.n must be 1 or 2, got {}", g.n)));
        }
        if !(g.h > 0.0 && g.h <= g.half_width / 100.0) {
            return Err(CliError::Input(format!("need 0 < h <= L/100, got h = {}, L = {}", g.h, g.half_width)));
        }
        Grid::new(g.n, g.half_width, g.h).map_err(|e| CliError::Input(format!("grid: {e}")))?;
        if !(self.tolerances.drift > 0.0) {
            return Err(CliError::Input("tolerances.drift must be positive".into()));
        }
        let r = &self.rgrid;
        if !(r.min > 0.0 && r.max > r.min && r.max.is_finite() && r.points >= 2) {
            return Err(CliError::Input("rgrid needs 0 < min < max < inf and points >= 2".into()));
        }
        if let Some(b) = &self.balls {
            if !(b.r0 > 0.0 && b.kappa > 1.0 && b.kappa.is_finite()) {
                return Err(CliError::Input("balls needs r0 > 0 and kappa > 1".into()));
            }
        }
        Ok(())
    }

    fn table(&self, file: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
        let path = self.base_dir.join(file);
        let f = std::fs::File::open(&path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        read_table(f).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    /// `[young.<name>]`, or `default` when the section is absent.
    pub fn young(&self, name: &str, default: YoungFunction) -> Result<YoungFunction, CliError> {
        let bad = |e: orlicz_kit::young_calc::YoungError| CliError::Input(format!("young.{name}: {e}"));
        Ok(match self.young.get(name) {
            None => default,
            Some(YoungSpec::Power { p }) => YoungFunction::power(*p).map_err(bad)?,
            Some(YoungSpec::PowerOverP { p }) => YoungFunction::power_over_p(*p).map_err(bad)?,
            Some(YoungSpec::CappedLinear) => YoungFunction::CappedLinear,
            Some(YoungSpec::ShiftedSquare) => YoungFunction::ShiftedSquare,
            Some(YoungSpec::ExpPower { p }) => YoungFunction::exp_power(*p).map_err(bad)?,
            Some(YoungSpec::Tabulated { file }) => {
                let (t, v) = self.table(file)?;
                YoungFunction::tabulated(t, v).map_err(bad)?
            }
        })
    }

    pub fn weight(&self, name: &str, default: WeightFunction) -> Result<WeightFunction, CliError> {
        let bad = |e: orlicz_kit::weights_kernels::RadialError| CliError::Input(format!("weight.{name}: {e}"));
        Ok(match self.weight.get(name) {
            None => default,
            Some(WeightSpec::Power { lambda }) => WeightFunction::Power { lambda: *lambda },
            Some(WeightSpec::PowerWithLog { lambda, mu }) => WeightFunction::PowerWithLog { lambda: *lambda, mu: *mu },
            Some(WeightSpec::Constant { c }) => WeightFunction::constant(*c).map_err(bad)?,
            Some(WeightSpec::ReciprocalPowerN { n }) => WeightFunction::ReciprocalPowerN { n: *n },
            Some(WeightSpec::Tabulated { file }) => {
                let (r, v) = self.table(file)?;
                WeightFunction::Tabulated { table: LogTable::from_samples(&r, &v).map_err(bad)? }
            }
        })
    }

    pub fn kernel(&self, name: &str, default: KernelFunction) -> Result<KernelFunction, CliError> {
        let bad = |e: orlicz_kit::weights_kernels::RadialError| CliError::Input(format!("kernel.{name}: {e}"));
        let Some(spec) = self.kernel.get(name) else { return Ok(default) };
        let family = match &spec.family {
            KernelFamilySpec::Power { alpha } => KernelFamily::Power { alpha: *alpha },
            KernelFamilySpec::LogKernel { alpha } => KernelFamily::LogKernel { alpha: *alpha },
            KernelFamilySpec::BesselType { alpha } => KernelFamily::BesselType { alpha: *alpha },
            KernelFamilySpec::Constant { c } => KernelFamily::Constant { c: *c },
            KernelFamilySpec::Tabulated { file } => {
                let (r, v) = self.table(file)?;
                KernelFamily::Tabulated { table: LogTable::from_samples(&r, &v).map_err(bad)? }
            }
        };
        let base = KernelFunction::new(family);
        match (spec.k1, spec.k2) {
            (None, None) => Ok(base),
            (k1, k2) => {
                KernelFunction::with_window(base.family, k1.unwrap_or(base.k1), k2.unwrap_or(base.k2)).map_err(bad)
            }
        }
    }

    pub fn r_grid(&self) -> LogGrid {
        LogGrid::new(self.rgrid.min, self.rgrid.max, self.rgrid.points)
    }

    /// `[balls]` on `grid`, or `fallback` when the section is absent.
    pub fn family(&self, grid: &Grid, fallback: impl FnOnce(&Grid) -> BallFamily) -> Result<BallFamily, CliError> {
        let Some(b) = &self.balls else { return Ok(fallback(grid)) };
        let bad = |e: orlicz_kit::fields_norms::FieldError| CliError::Input(format!("balls: {e}"));
        let j_max = match b.j_max {
            Some(j) => j,
            None => ((2.0 * grid.half_width * (1.0 + 1e-12) / b.r0).ln() / b.kappa.ln()).floor().max(0.0) as usize,
        };
        let radii = BallFamily::geometric_radii(b.r0, b.kappa, j_max).map_err(bad)?;
        BallFamily::new(grid, BallFamily::lattice_centers(grid, b.stride), radii).map_err(bad)
    }

    pub fn norm_family(&self, grid: &Grid) -> Result<BallFamily, CliError> {
        self.family(grid, |g| norm_family(g, &[]))
    }

    pub fn operator_family(&self, grid: &Grid) -> Result<BallFamily, CliError> {
        self.family(grid, BallFamily::half_octave)
    }

    pub fn harness(&self) -> Result<HarnessConfig, CliError> {
        if self.grid.n != 1 {
            return Err(CliError::Input("verify runs on 1D grids (grid.n = 1)".into()));
        }
        let cfg = HarnessConfig {
            seed: self.run.seed,
            corpus_size: self.suite.corpus_size,
            half_width: self.grid.half_width,
            h: self.grid.h,
            drift_tol: self.tolerances.drift,
            negative_levels: self.suite.negative_levels,
        };
        cfg.validate().map_err(|e| CliError::Input(e.to_string()))?;
        Ok(cfg)
    }
}
