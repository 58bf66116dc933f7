//! Experiment configuration: a sectioned `key = value` plain-text format.
//!
//! A config has up to four sections; every key is optional unless noted.
//!
//! ```text
//! [model]
//! kind = symmetric            # symmetric | asymmetric-ou | partial-symmetry
//! # kind = symmetric:
//! control = ou                # ou | on-off (default ou)
//! alpha = 1.0                 # linear gain (required for ou)
//! c = 1.0                     # approach speed (required for on-off)
//! m = 1.0                     # hold radius (on-off only, default 0)
//! sigma = 1.0                 # perturbation strength (required)
//! # kind = asymmetric-ou or partial-symmetry: values are scalars
//! # (applied to all three axes) or comma-separated triples
//! alpha = 1                   # per-axis control gains (required)
//! sigma = 1.3, 1, 0.7         # per-axis perturbations (required)
//! beta = 1                    # positioning-error decay rates (default 1)
//! s = 1                       # positioning-error strengths (default 1)
//! beta_sweep = 1, 3, 10       # one model per value, replaces beta
//!
//! [sim]                       # defaults derive from the model timescale tau
//! dt = 0.001                  # Euler step (default: model-dependent)
//! burn_in = 10.0              # settling time (default 10 tau)
//! sample_interval = 2.0       # time between samples (default 2 tau)
//! n_samples = 100000          # ensemble size (default 100000)
//! seed = 1                    # root RNG seed (default 1)
//!
//! [analysis]
//! grid_min = 0                # distance grid (defaults 0 .. 6, 121 points)
//! grid_max = 6
//! grid_points = 121
//! snr_ratios = 0.01, 0.1, 1   # explicit sweep, or else a log sweep from
//! snr_min = 0.001             # snr_min to snr_max (defaults 1e-3 .. 10,
//! snr_max = 10                # 25 points)
//! snr_points = 25
//! gammas = 2, 3, 4            # path-loss exponents (default 2, 3, 4)
//! tol = 1e-10                 # series truncation tolerance (default 1e-10)
//!
//! [output]
//! dir = out                   # output directory (default out)
//! prefix = hoversim           # file name prefix (default hoversim)
//! ```
//!
//! Lines starting with `#` or `;` are comments. Partial symmetry requires
//! the first two axes to share all four parameters.

use std::path::{Path, PathBuf};

use hoversim_core::models::lambda_from_axis;
use hoversim_core::steady_state::DistributionError;
use hoversim_core::{
    AsymmetricModel, AxisParams, ControlLaw, Lambdas, ModelError, RadialDistribution, SdeModel,
    SimConfig, SymmetricModel,
};
use thiserror::Error;

/// Failure modes of config parsing and validation.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config is empty")]
    Empty,
    #[error("line {line}: expected `key = value` or `[section]`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown section `{name}` (expected model, sim, analysis, or output)")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}: key `{key}` appears before any section header")]
    OrphanKey { line: usize, key: String },
    #[error("line {line}: unknown key `{key}` in [{section}]")]
    UnknownKey {
        line: usize,
        section: &'static str,
        key: String,
    },
    #[error("line {line}: duplicate key `{key}` in [{section}]")]
    DuplicateKey {
        line: usize,
        section: &'static str,
        key: String,
    },
    #[error("line {line}: `{key}` must be {expected}, got `{value}`")]
    BadValue {
        line: usize,
        key: String,
        expected: &'static str,
        value: String,
    },
    #[error("[{section}] is missing required key `{key}`")]
    MissingKey {
        section: &'static str,
        key: &'static str,
    },
    #[error("`{field}` {requirement}")]
    Invalid { field: String, requirement: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
}

/// One concrete model the experiment runs on.
#[derive(Clone, Debug)]
pub enum ModelSpec {
    /// Isotropic control on the true distance.
    Symmetric { control: ControlLaw, sigma: f64 },
    /// Independent per-axis linear control on error-corrupted positions.
    AsymmetricOu { axes: [AxisParams; 3] },
    /// Asymmetric linear control with the first two axes identical.
    PartialSymmetry { axes: [AxisParams; 3] },
}

impl ModelSpec {
    /// The dynamics this spec describes, ready for the sampler.
    pub fn sde_model(&self) -> Result<SdeModel, ModelError> {
        match self {
            Self::Symmetric { control, sigma } => Ok(SdeModel::Symmetric(SymmetricModel::new(
                control.clone(),
                *sigma,
            )?)),
            Self::AsymmetricOu { axes } | Self::PartialSymmetry { axes } => {
                Ok(SdeModel::AsymmetricOu(AsymmetricModel::new(*axes)))
            }
        }
    }

    /// Stationary distance law, using the sharpest representation the
    /// model admits: exact closed forms for linear and on-off control,
    /// the two-branch closed form under partial symmetry, and the
    /// mixture series otherwise.
    pub fn distribution(&self, tol: f64) -> Result<RadialDistribution, DistributionError> {
        match self {
            Self::Symmetric { control, sigma } => match control {
                ControlLaw::Ou { alpha } => RadialDistribution::closed_form_ou(*alpha, *sigma),
                ControlLaw::OnOff { c, m } => RadialDistribution::closed_form_oc(*c, *m, *sigma),
                other => {
                    let model = SymmetricModel::new(other.clone(), *sigma)?;
                    RadialDistribution::general(model)
                }
            },
            Self::AsymmetricOu { axes } => {
                let lambdas = AsymmetricModel::new(*axes).lambdas();
                RadialDistribution::quadratic_form_series(&lambdas, tol).map(|(dist, _)| dist)
            }
            Self::PartialSymmetry { axes } => {
                let l = AsymmetricModel::new(*axes).lambdas().as_array();
                RadialDistribution::partial_symmetry(l[0], l[2])
            }
        }
    }

    /// Stationary per-axis variances when the model is Gaussian, which
    /// admits exact distance sampling without touching the dynamics.
    pub fn lambdas(&self) -> Option<Lambdas> {
        match self {
            Self::Symmetric { control, sigma } => match control {
                ControlLaw::Ou { alpha } => {
                    Lambdas::isotropic(sigma * sigma / (2.0 * alpha)).ok()
                }
                _ => None,
            },
            Self::AsymmetricOu { axes } | Self::PartialSymmetry { axes } => {
                Some(AsymmetricModel::new(*axes).lambdas())
            }
        }
    }

    /// One-line human-readable parameter summary.
    pub fn describe(&self) -> String {
        match self {
            Self::Symmetric { control, sigma } => match control {
                ControlLaw::Ou { alpha } => format!("symmetric ou alpha={alpha} sigma={sigma}"),
                ControlLaw::OnOff { c, m } => {
                    format!("symmetric on-off c={c} m={m} sigma={sigma}")
                }
                _ => format!("symmetric custom sigma={sigma}"),
            },
            Self::AsymmetricOu { axes } => format!("asymmetric-ou {}", describe_axes(axes)),
            Self::PartialSymmetry { axes } => {
                format!("partial-symmetry {}", describe_axes(axes))
            }
        }
    }
}

fn describe_axes(axes: &[AxisParams; 3]) -> String {
    format!(
        "alpha=({},{},{}) sigma=({},{},{}) beta=({},{},{}) s=({},{},{})",
        axes[0].alpha,
        axes[1].alpha,
        axes[2].alpha,
        axes[0].sigma,
        axes[1].sigma,
        axes[2].sigma,
        axes[0].beta,
        axes[1].beta,
        axes[2].beta,
        axes[0].s,
        axes[1].s,
        axes[2].s,
    )
}

/// A model plus the tag used in file names and report rows.
#[derive(Clone, Debug)]
pub struct LabeledModel {
    pub label: String,
    pub spec: ModelSpec,
}

/// Optional `[sim]` overrides; anything unset falls back to the
/// model-derived defaults.
#[derive(Clone, Copy, Debug, Default)]
pub struct SimSettings {
    pub dt: Option<f64>,
    pub burn_in: Option<f64>,
    pub sample_interval: Option<f64>,
    pub n_samples: Option<usize>,
    pub seed: Option<u64>,
}

pub const DEFAULT_N_SAMPLES: usize = 100_000;
pub const DEFAULT_SEED: u64 = 1;

impl SimSettings {
    /// Concrete plan for `model`, with command-line overrides applied on
    /// top of the file values and file values on top of the defaults.
    pub fn resolve(
        &self,
        model: &SdeModel,
        seed_override: Option<u64>,
        samples_override: Option<usize>,
    ) -> SimConfig {
        let n = samples_override
            .or(self.n_samples)
            .unwrap_or(DEFAULT_N_SAMPLES);
        let seed = seed_override.or(self.seed).unwrap_or(DEFAULT_SEED);
        let mut cfg = SimConfig::defaults_for(model, n, seed);
        if let Some(dt) = self.dt {
            cfg.dt = dt;
        }
        if let Some(burn_in) = self.burn_in {
            cfg.burn_in = burn_in;
        }
        if let Some(interval) = self.sample_interval {
            cfg.sample_interval = interval;
        }
        cfg
    }
}

/// Resolved `[analysis]` section: evaluation grids and tolerances.
#[derive(Clone, Debug)]
pub struct AnalysisSettings {
    /// Distance grid, strictly increasing, at least two points.
    pub grid: Vec<f64>,
    /// SNR-threshold sweep, strictly increasing, positive.
    pub snr_ratios: Vec<f64>,
    /// Whether the config spelled the sweep out; commands with their own
    /// preferred default sweep honor an explicit one.
    pub snr_explicit: bool,
    /// Path-loss exponents, each at least 2.
    pub gammas: Vec<f64>,
    /// Truncation tolerance handed to series evaluations.
    pub tol: f64,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        Self {
            grid: linspace(0.0, 6.0, 121),
            snr_ratios: logspace(1e-3, 10.0, 25),
            snr_explicit: false,
            gammas: vec![2.0, 3.0, 4.0],
            tol: 1e-10,
        }
    }
}

/// Resolved `[output]` section.
#[derive(Clone, Debug)]
pub struct OutputSettings {
    pub dir: PathBuf,
    pub prefix: String,
}

impl Default for OutputSettings {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            prefix: "hoversim".to_string(),
        }
    }
}

/// Fully validated experiment description.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    /// One entry normally; several when the model section sweeps a
    /// parameter.
    pub models: Vec<LabeledModel>,
    pub sim: SimSettings,
    pub analysis: AnalysisSettings,
    pub output: OutputSettings,
}

impl ExperimentConfig {
    /// The first configured model; every config has at least one.
    pub fn primary(&self) -> &LabeledModel {
        &self.models[0]
    }
}

/// Evenly spaced grid including both endpoints.
pub fn linspace(min: f64, max: f64, points: usize) -> Vec<f64> {
    let span = max - min;
    (0..points)
        .map(|i| min + span * i as f64 / (points - 1) as f64)
        .collect()
}

/// Logarithmically spaced grid including both endpoints.
pub fn logspace(min: f64, max: f64, points: usize) -> Vec<f64> {
    let (a, b) = (min.ln(), max.ln());
    (0..points)
        .map(|i| f64::exp(a + (b - a) * i as f64 / (points - 1) as f64))
        .collect()
}

/// The config used when no file is given: the linear symmetric
/// controller with unit gain and unit perturbation.
pub fn default_config() -> ExperimentConfig {
    ExperimentConfig {
        models: vec![LabeledModel {
            label: "ou".to_string(),
            spec: ModelSpec::Symmetric {
                control: ControlLaw::Ou { alpha: 1.0 },
                sigma: 1.0,
            },
        }],
        sim: SimSettings::default(),
        analysis: AnalysisSettings::default(),
        output: OutputSettings::default(),
    }
}

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    parse_config(&std::fs::read_to_string(path)?)
}

/// Parses and validates config text. Defaults are filled for anything
/// unspecified; see the module docs for the schema.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut model = Section::new("model");
    let mut sim = Section::new("sim");
    let mut analysis = Section::new("analysis");
    let mut output = Section::new("output");

    let mut current: Option<usize> = None;
    let mut any_content = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with(';') {
            continue;
        }
        any_content = true;
        if let Some(name) = trimmed.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::Syntax {
                    line,
                    text: trimmed.to_string(),
                })?
                .trim();
            current = Some(match name {
                "model" => 0,
                "sim" => 1,
                "analysis" => 2,
                "output" => 3,
                _ => {
                    return Err(ConfigError::UnknownSection {
                        line,
                        name: name.to_string(),
                    })
                }
            });
            continue;
        }
        let (key, value) = trimmed.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            text: trimmed.to_string(),
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                text: trimmed.to_string(),
            });
        }
        let section = match current {
            Some(0) => &mut model,
            Some(1) => &mut sim,
            Some(2) => &mut analysis,
            Some(3) => &mut output,
            None => return Err(ConfigError::OrphanKey { line, key }),
            _ => unreachable!(),
        };
        section.insert(key, value, line)?;
    }
    if !any_content {
        return Err(ConfigError::Empty);
    }

    let models = build_models(&mut model)?;
    let sim = build_sim(&mut sim)?;
    let analysis = build_analysis(&mut analysis)?;
    let output = build_output(&mut output)?;
    Ok(ExperimentConfig {
        models,
        sim,
        analysis,
        output,
    })
}

/// Raw key/value pairs of one section with their line numbers.
struct Section {
    name: &'static str,
    entries: Vec<(String, String, usize)>,
}

impl Section {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            entries: Vec::new(),
        }
    }

    fn insert(&mut self, key: String, value: String, line: usize) -> Result<(), ConfigError> {
        if self.entries.iter().any(|(k, _, _)| *k == key) {
            return Err(ConfigError::DuplicateKey {
                line,
                section: self.name,
                key,
            });
        }
        self.entries.push((key, value, line));
        Ok(())
    }

    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        let pos = self.entries.iter().position(|(k, _, _)| k == key)?;
        let (_, value, line) = self.entries.remove(pos);
        Some((value, line))
    }

    fn take_f64(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((value, line)) => parse_f64(key, &value, line).map(Some),
        }
    }

    fn take_usize(&mut self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((value, line)) => {
                value
                    .parse::<usize>()
                    .map(Some)
                    .map_err(|_| ConfigError::BadValue {
                        line,
                        key: key.to_string(),
                        expected: "a non-negative integer",
                        value,
                    })
            }
        }
    }

    fn take_u64(&mut self, key: &str) -> Result<Option<u64>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((value, line)) => {
                value
                    .parse::<u64>()
                    .map(Some)
                    .map_err(|_| ConfigError::BadValue {
                        line,
                        key: key.to_string(),
                        expected: "a non-negative integer",
                        value,
                    })
            }
        }
    }

    /// Scalar broadcast to all axes, or an explicit triple.
    fn take_triple(&mut self, key: &str) -> Result<Option<[f64; 3]>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((value, line)) => {
                let parts: Vec<f64> = value
                    .split(',')
                    .map(|p| parse_f64(key, p.trim(), line))
                    .collect::<Result<_, _>>()?;
                match parts.as_slice() {
                    [v] => Ok(Some([*v, *v, *v])),
                    [a, b, c] => Ok(Some([*a, *b, *c])),
                    _ => Err(ConfigError::BadValue {
                        line,
                        key: key.to_string(),
                        expected: "one value or a comma-separated triple",
                        value,
                    }),
                }
            }
        }
    }

    fn take_list(&mut self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((value, line)) => value
                .split(',')
                .map(|p| parse_f64(key, p.trim(), line))
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
        }
    }

    /// Errors on the first key nothing claimed; catches typos and keys
    /// that do not apply to the chosen model kind.
    fn finish(self) -> Result<(), ConfigError> {
        if let Some((key, _, line)) = self.entries.into_iter().next() {
            return Err(ConfigError::UnknownKey {
                line,
                section: self.name,
                key,
            });
        }
        Ok(())
    }
}

fn parse_f64(key: &str, value: &str, line: usize) -> Result<f64, ConfigError> {
    let parsed = value.parse::<f64>().map_err(|_| ConfigError::BadValue {
        line,
        key: key.to_string(),
        expected: "a number",
        value: value.to_string(),
    })?;
    if parsed.is_finite() {
        Ok(parsed)
    } else {
        Err(ConfigError::BadValue {
            line,
            key: key.to_string(),
            expected: "a finite number",
            value: value.to_string(),
        })
    }
}

fn build_models(section: &mut Section) -> Result<Vec<LabeledModel>, ConfigError> {
    let kind = match section.take("kind") {
        Some((value, _)) => value,
        None => "symmetric".to_string(),
    };
    let models = match kind.as_str() {
        "symmetric" => {
            let sigma = section
                .take_f64("sigma")?
                .ok_or(ConfigError::MissingKey {
                    section: "model",
                    key: "sigma",
                })?;
            let control_kind = match section.take("control") {
                Some((value, line)) => (value, line),
                None => ("ou".to_string(), 0),
            };
            let (control, label) = match control_kind.0.as_str() {
                "ou" => {
                    let alpha =
                        section
                            .take_f64("alpha")?
                            .ok_or(ConfigError::MissingKey {
                                section: "model",
                                key: "alpha",
                            })?;
                    (ControlLaw::ou(alpha)?, "ou")
                }
                "on-off" => {
                    let c = section.take_f64("c")?.ok_or(ConfigError::MissingKey {
                        section: "model",
                        key: "c",
                    })?;
                    let m = section.take_f64("m")?.unwrap_or(0.0);
                    (ControlLaw::on_off(c, m)?, "oc")
                }
                other => {
                    return Err(ConfigError::BadValue {
                        line: control_kind.1,
                        key: "control".to_string(),
                        expected: "`ou` or `on-off`",
                        value: other.to_string(),
                    })
                }
            };
            // constructing the model value validates sigma
            SymmetricModel::new(control.clone(), sigma)?;
            vec![LabeledModel {
                label: label.to_string(),
                spec: ModelSpec::Symmetric { control, sigma },
            }]
        }
        "asymmetric-ou" | "partial-symmetry" => {
            let alpha = section
                .take_triple("alpha")?
                .ok_or(ConfigError::MissingKey {
                    section: "model",
                    key: "alpha",
                })?;
            let sigma = section
                .take_triple("sigma")?
                .ok_or(ConfigError::MissingKey {
                    section: "model",
                    key: "sigma",
                })?;
            let s = section.take_triple("s")?.unwrap_or([1.0; 3]);
            let beta = section.take_triple("beta")?;
            let sweep = section.take_list("beta_sweep")?;
            let partial = kind == "partial-symmetry";

            let mut beta_values: Vec<(Option<String>, [f64; 3])> = Vec::new();
            match (beta, sweep) {
                (Some(_), Some(_)) => {
                    return Err(ConfigError::Invalid {
                        field: "beta_sweep".to_string(),
                        requirement: "cannot be combined with `beta`".to_string(),
                    })
                }
                (Some(b), None) => beta_values.push((None, b)),
                (None, Some(values)) => {
                    if values.is_empty() {
                        return Err(ConfigError::Invalid {
                            field: "beta_sweep".to_string(),
                            requirement: "must list at least one value".to_string(),
                        });
                    }
                    for v in values {
                        beta_values.push((Some(format!("beta-{v}")), [v, v, v]));
                    }
                }
                (None, None) => beta_values.push((None, [1.0; 3])),
            }

            let base_label = if partial { "partial" } else { "asym" };
            let mut models = Vec::new();
            for (tag, beta) in beta_values {
                let mut axes = [AxisParams::new(1.0, 1.0, 1.0, 1.0)?; 3];
                for i in 0..3 {
                    axes[i] = AxisParams::new(alpha[i], sigma[i], beta[i], s[i])?;
                }
                if partial {
                    for (field, a, b) in [
                        ("alpha", alpha[0], alpha[1]),
                        ("sigma", sigma[0], sigma[1]),
                        ("beta", beta[0], beta[1]),
                        ("s", s[0], s[1]),
                    ] {
                        if a != b {
                            return Err(ConfigError::Invalid {
                                field: field.to_string(),
                                requirement: format!(
                                    "must match on the first two axes for partial symmetry, \
                                     got {a} and {b}"
                                ),
                            });
                        }
                    }
                }
                let label = match &tag {
                    Some(tag) => format!("{base_label}-{tag}"),
                    None => base_label.to_string(),
                };
                let spec = if partial {
                    ModelSpec::PartialSymmetry { axes }
                } else {
                    ModelSpec::AsymmetricOu { axes }
                };
                models.push(LabeledModel { label, spec });
            }
            models
        }
        other => {
            return Err(ConfigError::Invalid {
                field: "kind".to_string(),
                requirement: format!(
                    "must be symmetric, asymmetric-ou, or partial-symmetry, got `{other}`"
                ),
            })
        }
    };
    std::mem::replace(section, Section::new("model")).finish()?;
    Ok(models)
}

fn build_sim(section: &mut Section) -> Result<SimSettings, ConfigError> {
    let settings = SimSettings {
        dt: section.take_f64("dt")?,
        burn_in: section.take_f64("burn_in")?,
        sample_interval: section.take_f64("sample_interval")?,
        n_samples: section.take_usize("n_samples")?,
        seed: section.take_u64("seed")?,
    };
    for (field, value) in [
        ("dt", settings.dt),
        ("burn_in", settings.burn_in),
        ("sample_interval", settings.sample_interval),
    ] {
        if let Some(v) = value {
            if v <= 0.0 {
                return Err(ConfigError::Invalid {
                    field: field.to_string(),
                    requirement: format!("must be positive, got {v}"),
                });
            }
        }
    }
    if settings.n_samples == Some(0) {
        return Err(ConfigError::Invalid {
            field: "n_samples".to_string(),
            requirement: "must be at least 1".to_string(),
        });
    }
    std::mem::replace(section, Section::new("sim")).finish()?;
    Ok(settings)
}

fn build_analysis(section: &mut Section) -> Result<AnalysisSettings, ConfigError> {
    let defaults = AnalysisSettings::default();
    let grid_min = section.take_f64("grid_min")?.unwrap_or(0.0);
    let grid_max = section.take_f64("grid_max")?.unwrap_or(6.0);
    let grid_points = section.take_usize("grid_points")?.unwrap_or(121);
    if grid_min < 0.0 {
        return Err(ConfigError::Invalid {
            field: "grid_min".to_string(),
            requirement: format!("must be non-negative, got {grid_min}"),
        });
    }
    if grid_points < 2 {
        return Err(ConfigError::Invalid {
            field: "grid_points".to_string(),
            requirement: format!("must be at least 2, got {grid_points}"),
        });
    }
    if !(grid_max > grid_min) {
        return Err(ConfigError::Invalid {
            field: "grid_max".to_string(),
            requirement: format!("must exceed grid_min, got {grid_max} <= {grid_min}"),
        });
    }

    let explicit = section.take_list("snr_ratios")?;
    let snr_min = section.take_f64("snr_min")?;
    let snr_max = section.take_f64("snr_max")?;
    let snr_points = section.take_usize("snr_points")?;
    let snr_explicit = explicit.is_some()
        || snr_min.is_some()
        || snr_max.is_some()
        || snr_points.is_some();
    let snr_ratios = match explicit {
        Some(list) => {
            if explicit_conflicts(&[snr_min.is_some(), snr_max.is_some(), snr_points.is_some()]) {
                return Err(ConfigError::Invalid {
                    field: "snr_ratios".to_string(),
                    requirement: "cannot be combined with snr_min/snr_max/snr_points".to_string(),
                });
            }
            if list.len() < 2 {
                return Err(ConfigError::Invalid {
                    field: "snr_ratios".to_string(),
                    requirement: "must list at least two values".to_string(),
                });
            }
            for w in list.windows(2) {
                if !(w[1] > w[0]) {
                    return Err(ConfigError::Invalid {
                        field: "snr_ratios".to_string(),
                        requirement: format!(
                            "must be strictly increasing, got {} then {}",
                            w[0], w[1]
                        ),
                    });
                }
            }
            if list[0] <= 0.0 {
                return Err(ConfigError::Invalid {
                    field: "snr_ratios".to_string(),
                    requirement: format!("must be positive, got {}", list[0]),
                });
            }
            list
        }
        None => {
            let min = snr_min.unwrap_or(1e-3);
            let max = snr_max.unwrap_or(10.0);
            let points = snr_points.unwrap_or(25);
            if min <= 0.0 {
                return Err(ConfigError::Invalid {
                    field: "snr_min".to_string(),
                    requirement: format!("must be positive, got {min}"),
                });
            }
            if !(max > min) {
                return Err(ConfigError::Invalid {
                    field: "snr_max".to_string(),
                    requirement: format!("must exceed snr_min, got {max} <= {min}"),
                });
            }
            if points < 2 {
                return Err(ConfigError::Invalid {
                    field: "snr_points".to_string(),
                    requirement: format!("must be at least 2, got {points}"),
                });
            }
            logspace(min, max, points)
        }
    };

    let gammas = section.take_list("gammas")?.unwrap_or(defaults.gammas);
    for &g in &gammas {
        if g < 2.0 {
            return Err(ConfigError::Invalid {
                field: "gammas".to_string(),
                requirement: format!("every exponent must be at least 2, got {g}"),
            });
        }
    }
    let tol = section.take_f64("tol")?.unwrap_or(defaults.tol);
    if !(tol > 0.0 && tol < 1.0) {
        return Err(ConfigError::Invalid {
            field: "tol".to_string(),
            requirement: format!("must lie in (0, 1), got {tol}"),
        });
    }

    std::mem::replace(section, Section::new("analysis")).finish()?;
    Ok(AnalysisSettings {
        grid: linspace(grid_min, grid_max, grid_points),
        snr_ratios,
        snr_explicit,
        gammas,
        tol,
    })
}

fn explicit_conflicts(flags: &[bool]) -> bool {
    flags.iter().any(|&f| f)
}

fn build_output(section: &mut Section) -> Result<OutputSettings, ConfigError> {
    let defaults = OutputSettings::default();
    let dir = section
        .take("dir")
        .map(|(v, _)| PathBuf::from(v))
        .unwrap_or(defaults.dir);
    let prefix = section
        .take("prefix")
        .map(|(v, _)| v)
        .unwrap_or(defaults.prefix);
    std::mem::replace(section, Section::new("output")).finish()?;
    Ok(OutputSettings { dir, prefix })
}

/// Per-axis variance triple of a Gaussian model's stationary law.
pub fn axis_lambdas(axes: &[AxisParams; 3]) -> [f64; 3] {
    [
        lambda_from_axis(&axes[0]),
        lambda_from_axis(&axes[1]),
        lambda_from_axis(&axes[2]),
    ]
}
