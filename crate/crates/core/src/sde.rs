//! Euler time-stepping of the hover dynamics and steady-state ensemble
//! sampling.
//!
//! The samplers exist to validate the analytic distance laws, so they
//! are built for reproducibility first: a counter-based generator gives
//! every trajectory its own independent stream derived from one seed,
//! which makes ensembles byte-identical across runs and thread counts.

use std::io;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use thiserror::Error;

use crate::models::{AsymmetricModel, AxisParams, ControlLaw, ModelError, SymmetricModel};

/// Simulation configuration and runtime failures.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid {name} = {value}: {requirement}")]
    InvalidConfig {
        name: &'static str,
        value: f64,
        requirement: String,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(
        "trajectory {trajectory} left the representable range near t = {t}; the time step is too \
         large for this model"
    )]
    Diverged { trajectory: usize, t: f64 },
    #[error("ensemble holds no samples")]
    EmptyEnsemble,
}

/// Full state of one device: position relative to the hover point and
/// the three positioning-error components seen by the controller.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct State3D {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
}

impl State3D {
    pub const ORIGIN: State3D = State3D {
        x: 0.0,
        y: 0.0,
        z: 0.0,
        e1: 0.0,
        e2: 0.0,
        e3: 0.0,
    };

    /// True distance to the hover point.
    pub fn radial_distance(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Position as the controller sees it: truth plus measurement error.
    pub fn measured(&self) -> [f64; 3] {
        [self.x + self.e1, self.y + self.e2, self.z + self.e3]
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite()
            && self.y.is_finite()
            && self.z.is_finite()
            && self.e1.is_finite()
            && self.e2.is_finite()
            && self.e3.is_finite()
    }
}

/// Any of the hover dynamics the samplers can integrate.
#[derive(Clone, Debug)]
pub enum SdeModel {
    /// Isotropic control on the true distance, no measurement error.
    Symmetric(SymmetricModel),
    /// Independent linear controllers per axis, each fed an
    /// error-corrupted position.
    AsymmetricOu(AsymmetricModel),
    /// Per-axis control laws acting on the error-corrupted radial
    /// direction. Only `beta` and `s` of each axis entry matter here;
    /// position dynamics come from `controls` and `sigmas`.
    General {
        controls: Box<[ControlLaw; 3]>,
        sigmas: [f64; 3],
        axes: [AxisParams; 3],
    },
}

impl SdeModel {
    pub fn general(
        controls: [ControlLaw; 3],
        sigmas: [f64; 3],
        axes: [AxisParams; 3],
    ) -> Result<Self, ModelError> {
        for &sigma in &sigmas {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(ModelError::InvalidParameter {
                    name: "sigma",
                    value: sigma,
                    requirement: "must be positive and finite",
                });
            }
        }
        Ok(Self::General {
            controls: Box::new(controls),
            sigmas,
            axes,
        })
    }

    /// Slowest forgetting timescale; burn-in is validated against it.
    pub fn relaxation_time(&self) -> f64 {
        match self {
            Self::Symmetric(m) => m.relaxation_time(),
            Self::AsymmetricOu(m) => m.relaxation_time(),
            Self::General {
                controls,
                sigmas,
                axes,
            } => {
                let mut tau: f64 = 0.0;
                for i in 0..3 {
                    let axis_tau = match SymmetricModel::new(controls[i].clone(), sigmas[i]) {
                        Ok(m) => m.relaxation_time(),
                        Err(_) => f64::INFINITY,
                    };
                    tau = tau.max(axis_tau).max(1.0 / axes[i].beta);
                }
                tau
            }
        }
    }

    /// Conservative default Euler step: a thousandth of the fastest
    /// timescale, further capped by the dead-zone crossing time for
    /// bang-bang control so the switch is well resolved.
    pub fn default_dt(&self) -> f64 {
        match self {
            Self::Symmetric(m) => {
                let base = 1e-3 * m.relaxation_time();
                match m.control() {
                    ControlLaw::OnOff { c, m: dead } if *dead > 0.0 => {
                        base.min(0.01 * dead / c)
                    }
                    _ => base,
                }
            }
            Self::AsymmetricOu(m) => {
                let fastest = m
                    .axes()
                    .iter()
                    .map(|a| (1.0 / a.alpha).min(1.0 / a.beta))
                    .fold(f64::INFINITY, f64::min);
                1e-3 * fastest
            }
            Self::General {
                controls,
                sigmas,
                axes,
            } => {
                let mut fastest = f64::INFINITY;
                for i in 0..3 {
                    if let Ok(m) = SymmetricModel::new(controls[i].clone(), sigmas[i]) {
                        fastest = fastest.min(m.relaxation_time());
                    }
                    fastest = fastest.min(1.0 / axes[i].beta);
                }
                1e-3 * fastest
            }
        }
    }

    fn advance(&self, state: &State3D, dt: f64, rng: &mut ChaCha8Rng) -> State3D {
        match self {
            Self::Symmetric(m) => {
                let noise = [
                    StandardNormal.sample(rng),
                    StandardNormal.sample(rng),
                    StandardNormal.sample(rng),
                ];
                step_symmetric(m, state, dt, noise)
            }
            Self::AsymmetricOu(m) => {
                let mut noise = [0.0; 6];
                for n in &mut noise {
                    *n = StandardNormal.sample(rng);
                }
                step_asymmetric_ou(m, state, dt, noise)
            }
            Self::General {
                controls,
                sigmas,
                axes,
            } => {
                let mut noise = [0.0; 6];
                for n in &mut noise {
                    *n = StandardNormal.sample(rng);
                }
                step_asymmetric_general(controls, *sigmas, axes, state, dt, noise)
            }
        }
    }
}

/// Time-stepping and sampling plan for one ensemble.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    /// Euler step.
    pub dt: f64,
    /// Settling time discarded before the first sample. Must cover at
    /// least ten relaxation times of the model being sampled.
    pub burn_in: f64,
    /// Time between retained samples.
    pub sample_interval: f64,
    /// Total number of retained samples across all trajectories.
    pub n_samples: usize,
    /// Root seed; trajectories use independent streams derived from it.
    pub seed: u64,
}

impl SimConfig {
    /// Defaults derived from the model timescales: a conservative step,
    /// ten relaxation times of burn-in, and samples two relaxation
    /// times apart, which keeps neighboring samples only weakly
    /// correlated.
    pub fn defaults_for(model: &SdeModel, n_samples: usize, seed: u64) -> Self {
        let tau = model.relaxation_time();
        Self {
            dt: model.default_dt(),
            burn_in: 10.0 * tau,
            sample_interval: 2.0 * tau,
            n_samples,
            seed,
        }
    }
}

// Drift factor v(r)/r with the removable singularity at the origin
// handled per law: linear control cancels exactly, everything else is
// cut off below a radius where the direction is meaningless anyway.
const RADIAL_EPS: f64 = 1e-12;

fn drift_rate(control: &ControlLaw, r: f64) -> f64 {
    match control {
        ControlLaw::Ou { alpha } => *alpha,
        _ => {
            if r < RADIAL_EPS {
                0.0
            } else {
                control.velocity(r) / r
            }
        }
    }
}

/// One Euler step of the symmetric model. Error components pass through
/// untouched; the three noises drive x, y, z in that order.
pub fn step_symmetric(
    model: &SymmetricModel,
    state: &State3D,
    dt: f64,
    noise: [f64; 3],
) -> State3D {
    let r = state.radial_distance();
    let rate = drift_rate(model.control(), r);
    let g = model.sigma() * dt.sqrt();
    State3D {
        x: state.x - rate * state.x * dt + g * noise[0],
        y: state.y - rate * state.y * dt + g * noise[1],
        z: state.z - rate * state.z * dt + g * noise[2],
        ..*state
    }
}

/// One Euler step of a positioning-error component: mean reversion to
/// zero at rate `beta` driven by intensity `s`.
pub fn step_error_process(axis: &AxisParams, error: f64, dt: f64, noise: f64) -> f64 {
    error - axis.beta * error * dt + axis.s * dt.sqrt() * noise
}

/// One Euler step of the anisotropic linear model: each axis controller
/// acts on its error-corrupted coordinate. Noise layout: positions
/// x, y, z first, then the three error components.
pub fn step_asymmetric_ou(
    model: &AsymmetricModel,
    state: &State3D,
    dt: f64,
    noise: [f64; 6],
) -> State3D {
    let axes = model.axes();
    let measured = state.measured();
    let sqrt_dt = dt.sqrt();
    let pos = [state.x, state.y, state.z];
    let mut new_pos = [0.0; 3];
    for i in 0..3 {
        new_pos[i] = pos[i] - axes[i].alpha * measured[i] * dt + axes[i].sigma * sqrt_dt * noise[i];
    }
    State3D {
        x: new_pos[0],
        y: new_pos[1],
        z: new_pos[2],
        e1: step_error_process(&axes[0], state.e1, dt, noise[3]),
        e2: step_error_process(&axes[1], state.e2, dt, noise[4]),
        e3: step_error_process(&axes[2], state.e3, dt, noise[5]),
    }
}

/// One Euler step of the general anisotropic model: per-axis control
/// laws evaluated at the error-corrupted distance, pushing along the
/// error-corrupted direction. With identical linear controls and
/// error-free axes this reproduces [`step_symmetric`] bit for bit on
/// the shared noise components. Noise layout as in
/// [`step_asymmetric_ou`].
pub fn step_asymmetric_general(
    controls: &[ControlLaw; 3],
    sigmas: [f64; 3],
    axes: &[AxisParams; 3],
    state: &State3D,
    dt: f64,
    noise: [f64; 6],
) -> State3D {
    let measured = state.measured();
    let r_hat = (measured[0] * measured[0] + measured[1] * measured[1]
        + measured[2] * measured[2])
        .sqrt();
    let sqrt_dt = dt.sqrt();
    let pos = [state.x, state.y, state.z];
    let mut new_pos = [0.0; 3];
    for i in 0..3 {
        let rate = drift_rate(&controls[i], r_hat);
        new_pos[i] = pos[i] - rate * measured[i] * dt + sigmas[i] * sqrt_dt * noise[i];
    }
    State3D {
        x: new_pos[0],
        y: new_pos[1],
        z: new_pos[2],
        e1: step_error_process(&axes[0], state.e1, dt, noise[3]),
        e2: step_error_process(&axes[1], state.e2, dt, noise[4]),
        e3: step_error_process(&axes[2], state.e3, dt, noise[5]),
    }
}

/// Steady-state samples with their sampling times.
#[derive(Clone, Debug)]
pub struct Ensemble {
    samples: Vec<State3D>,
    times: Vec<f64>,
    config: SimConfig,
}

impl Ensemble {
    pub fn samples(&self) -> &[State3D] {
        &self.samples
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn values(&self, quantity: SampleQuantity) -> Vec<f64> {
        self.samples.iter().map(|s| quantity.extract(s)).collect()
    }
}

/// Which scalar to read off each ensemble member.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleQuantity {
    /// True distance to the hover point.
    Radial,
    X,
    Y,
    Z,
}

impl SampleQuantity {
    pub fn extract(&self, state: &State3D) -> f64 {
        match self {
            Self::Radial => state.radial_distance(),
            Self::X => state.x,
            Self::Y => state.y,
            Self::Z => state.z,
        }
    }
}

/// Empirical CDF of `quantity` over `samples`, evaluated at each grid
/// point.
pub fn empirical_cdf(
    samples: &[State3D],
    quantity: SampleQuantity,
    grid: &[f64],
) -> Result<Vec<f64>, SimError> {
    if samples.is_empty() {
        return Err(SimError::EmptyEnsemble);
    }
    let mut values: Vec<f64> = samples.iter().map(|s| quantity.extract(s)).collect();
    values.sort_unstable_by(|a, b| a.total_cmp(b));
    let n = values.len() as f64;
    Ok(grid
        .iter()
        .map(|&g| values.partition_point(|&v| v <= g) as f64 / n)
        .collect())
}

fn validate_config(model: &SdeModel, config: &SimConfig) -> Result<(), SimError> {
    if !(config.dt > 0.0 && config.dt.is_finite()) {
        return Err(SimError::InvalidConfig {
            name: "dt",
            value: config.dt,
            requirement: "must be positive and finite".to_string(),
        });
    }
    if !(config.sample_interval > 0.0 && config.sample_interval.is_finite()) {
        return Err(SimError::InvalidConfig {
            name: "sample_interval",
            value: config.sample_interval,
            requirement: "must be positive and finite".to_string(),
        });
    }
    if config.n_samples == 0 {
        return Err(SimError::InvalidConfig {
            name: "n_samples",
            value: 0.0,
            requirement: "must be at least 1".to_string(),
        });
    }
    let tau = model.relaxation_time();
    if !tau.is_finite() {
        return Err(SimError::InvalidConfig {
            name: "burn_in",
            value: config.burn_in,
            requirement: "model has no finite relaxation time, so no steady state to sample"
                .to_string(),
        });
    }
    // the tiny slack forgives burn_in = 10 * tau computed in a different
    // floating-point order
    if !(config.burn_in >= 10.0 * tau * (1.0 - 1e-12)) || !config.burn_in.is_finite() {
        return Err(SimError::InvalidConfig {
            name: "burn_in",
            value: config.burn_in,
            requirement: format!(
                "must cover at least ten relaxation times ({:e})",
                10.0 * tau
            ),
        });
    }
    Ok(())
}

const MAX_TRAJECTORIES: usize = 64;

/// Draws `config.n_samples` steady-state samples by integrating up to
/// 64 independent trajectories past burn-in and thinning each at the
/// sample interval. Trajectory count, stream assignment, and sample
/// order are fixed functions of the config, so results do not depend on
/// how the work is scheduled.
pub fn sample_steady_state(model: &SdeModel, config: &SimConfig) -> Result<Ensemble, SimError> {
    validate_config(model, config)?;
    let burn_steps = (config.burn_in / config.dt).ceil() as u64;
    let steps_per_sample = ((config.sample_interval / config.dt).round() as u64).max(1);
    let n_traj = config.n_samples.min(MAX_TRAJECTORIES);
    let base = config.n_samples / n_traj;
    let extra = config.n_samples % n_traj;

    let runs: Result<Vec<(Vec<State3D>, Vec<f64>)>, SimError> = (0..n_traj)
        .into_par_iter()
        .map(|j| {
            let count = base + usize::from(j < extra);
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(j as u64);
            let mut state = State3D::ORIGIN;
            for _ in 0..burn_steps {
                state = model.advance(&state, config.dt, &mut rng);
            }
            let mut samples = Vec::with_capacity(count);
            let mut times = Vec::with_capacity(count);
            for k in 0..count {
                for _ in 0..steps_per_sample {
                    state = model.advance(&state, config.dt, &mut rng);
                }
                let t = (burn_steps + (k as u64 + 1) * steps_per_sample) as f64 * config.dt;
                if !state.is_finite() {
                    return Err(SimError::Diverged { trajectory: j, t });
                }
                samples.push(state);
                times.push(t);
            }
            Ok((samples, times))
        })
        .collect();

    let runs = runs?;
    let mut samples = Vec::with_capacity(config.n_samples);
    let mut times = Vec::with_capacity(config.n_samples);
    for (s, t) in runs {
        samples.extend(s);
        times.extend(t);
    }
    Ok(Ensemble {
        samples,
        times,
        config: *config,
    })
}

/// Writes an ensemble as CSV with header `t,x,y,z,e1,e2,e3`. Floats are
/// printed in shortest round-trip form, so equal ensembles produce
/// byte-identical files.
pub fn write_ensemble_csv<W: io::Write>(ensemble: &Ensemble, out: &mut W) -> io::Result<()> {
    writeln!(out, "t,x,y,z,e1,e2,e3")?;
    for (t, s) in ensemble.times().iter().zip(ensemble.samples()) {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            t, s.x, s.y, s.z, s.e1, s.e2, s.e3
        )?;
    }
    Ok(())
}
