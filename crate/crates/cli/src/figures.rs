//! Curve-data reproduction for the four headline plots: stationary
//! distance CDFs with simulated overlays (figures 3 to 5) and
//! connectivity sweeps with Monte Carlo overlays (figure 6).
//!
//! Each figure carries hard-coded default parameters; the `[sim]`,
//! `[analysis]`, and `[output]` config sections plus the seed and
//! sample-count flags tune how the curves are evaluated.

use std::io;
use std::path::PathBuf;

use hoversim_core::connectivity::{
    pconn_partial_gamma2, pconn_partial_general, ConnectivityError, ConnectivitySpec,
};
use hoversim_core::models::lambda_from_axis;
use hoversim_core::sde::{empirical_cdf, sample_steady_state, SimError};
use hoversim_core::steady_state::DistributionError;
use hoversim_core::{AxisParams, ControlLaw, ModelError, SampleQuantity};
use thiserror::Error;

use crate::config::{logspace, ExperimentConfig, ModelSpec, DEFAULT_SEED};
use crate::mc::{connected_fraction, powered_radii, sample_fading, sample_radii_gaussian};
use crate::output::{csv_path, Csv};

/// Failure modes of figure generation.
#[derive(Debug, Error)]
pub enum FigureError {
    #[error("unknown figure id {0}; expected 3, 4, 5, or 6")]
    UnknownId(u8),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Connectivity(#[from] ConnectivityError),
    #[error("cannot write output: {0}")]
    Io(#[from] io::Error),
}

/// Default Monte Carlo size of the figure-6 empirical column.
pub const FIG6_DEFAULT_SAMPLES: usize = 1_000_000;

/// Figure-6 connectivity sweep used when the config does not spell out
/// its own: below this threshold range the three path-loss curves keep
/// their textbook ordering; beyond it they cross.
pub fn fig6_default_sweep() -> Vec<f64> {
    logspace(1e-3, 0.5, 31)
}

/// Writes the curve CSVs for one figure and returns their paths.
///
/// Figures 3 to 5 emit one `r,cdf_analytic,cdf_empirical` file per
/// curve; figure 6 emits one `snr_ratio,pconn_analytic,pconn_empirical`
/// file per path-loss exponent. Identical config, seed, and sample
/// count reproduce identical bytes.
pub fn run_figure(
    id: u8,
    cfg: &ExperimentConfig,
    seed: Option<u64>,
    samples: Option<usize>,
) -> Result<Vec<PathBuf>, FigureError> {
    match id {
        3 => cdf_figure("fig3", fig3_curves()?, cfg, seed, samples),
        4 => cdf_figure("fig4", fig4_curves()?, cfg, seed, samples),
        5 => cdf_figure("fig5", fig5_curves()?, cfg, seed, samples),
        6 => pconn_figure(cfg, seed, samples),
        other => Err(FigureError::UnknownId(other)),
    }
}

/// Unit-perturbation linear controller next to two on-off controllers
/// that differ only in hold radius.
fn fig3_curves() -> Result<Vec<(String, ModelSpec)>, ModelError> {
    let curves = vec![
        (
            "ou-alpha-1".to_string(),
            ModelSpec::Symmetric {
                control: ControlLaw::ou(1.0)?,
                sigma: 1.0,
            },
        ),
        (
            "oc-c1-m1".to_string(),
            ModelSpec::Symmetric {
                control: ControlLaw::on_off(1.0, 1.0)?,
                sigma: 1.0,
            },
        ),
        (
            "oc-c1-m0.5".to_string(),
            ModelSpec::Symmetric {
                control: ControlLaw::on_off(1.0, 0.5)?,
                sigma: 1.0,
            },
        ),
    ];
    Ok(curves)
}

fn asym_axes(sigma: [f64; 3], beta: f64) -> Result<[AxisParams; 3], ModelError> {
    Ok([
        AxisParams::new(1.0, sigma[0], beta, 1.0)?,
        AxisParams::new(1.0, sigma[1], beta, 1.0)?,
        AxisParams::new(1.0, sigma[2], beta, 1.0)?,
    ])
}

/// Unequal perturbations on all three axes, with the positioning-error
/// decay rate swept; faster error decay tightens the hover.
fn fig4_curves() -> Result<Vec<(String, ModelSpec)>, ModelError> {
    [1.0, 3.0, 10.0]
        .iter()
        .map(|&beta| {
            Ok((
                format!("beta-{beta}"),
                ModelSpec::AsymmetricOu {
                    axes: asym_axes([1.3, 1.0, 0.7], beta)?,
                },
            ))
        })
        .collect()
}

/// Matched horizontal axes with a weaker vertical perturbation, over
/// two vertical strengths and two error decay rates.
fn fig5_curves() -> Result<Vec<(String, ModelSpec)>, ModelError> {
    let mut curves = Vec::new();
    for &sigma3 in &[0.5, 0.1] {
        for &beta in &[1.0, 10.0] {
            curves.push((
                format!("sigma3-{sigma3}-beta-{beta}"),
                ModelSpec::PartialSymmetry {
                    axes: asym_axes([1.0, 1.0, sigma3], beta)?,
                },
            ));
        }
    }
    Ok(curves)
}

/// Strongly flattened hover cloud feeding the connectivity sweep.
fn fig6_axes() -> Result<[AxisParams; 3], ModelError> {
    asym_axes([1.0, 1.0, 0.01], 10.0)
}

fn cdf_figure(
    fig: &str,
    curves: Vec<(String, ModelSpec)>,
    cfg: &ExperimentConfig,
    seed: Option<u64>,
    samples: Option<usize>,
) -> Result<Vec<PathBuf>, FigureError> {
    let grid = &cfg.analysis.grid;
    let base_seed = seed.or(cfg.sim.seed).unwrap_or(DEFAULT_SEED);
    let mut paths = Vec::new();
    for (i, (name, spec)) in curves.iter().enumerate() {
        let dist = spec.distribution(cfg.analysis.tol)?;
        let model = spec.sde_model()?;
        // each curve gets its own seed so overlays are independent
        let sim = cfg
            .sim
            .resolve(&model, Some(base_seed.wrapping_add(i as u64)), samples);
        let ensemble = sample_steady_state(&model, &sim)?;
        let empirical = empirical_cdf(ensemble.samples(), SampleQuantity::Radial, grid)?;
        let mut csv = Csv::new("r,cdf_analytic,cdf_empirical");
        for (j, &r) in grid.iter().enumerate() {
            csv.row(&[r, dist.cdf(r)?, empirical[j]]);
        }
        let path = csv_path(&cfg.output.dir, &cfg.output.prefix, &format!("{fig}_{name}"))?;
        csv.write_to(&path)?;
        paths.push(path);
    }
    Ok(paths)
}

fn pconn_figure(
    cfg: &ExperimentConfig,
    seed: Option<u64>,
    samples: Option<usize>,
) -> Result<Vec<PathBuf>, FigureError> {
    let axes = fig6_axes()?;
    let spec = ModelSpec::PartialSymmetry { axes };
    let lambdas = spec.lambdas().expect("partial symmetry is Gaussian");
    let (lambda_xy, lambda_z) = (lambda_from_axis(&axes[0]), lambda_from_axis(&axes[2]));

    let sweep = if cfg.analysis.snr_explicit {
        cfg.analysis.snr_ratios.clone()
    } else {
        fig6_default_sweep()
    };
    let base_seed = seed.or(cfg.sim.seed).unwrap_or(DEFAULT_SEED);
    let n = samples.unwrap_or(FIG6_DEFAULT_SAMPLES);
    let radii = sample_radii_gaussian(&lambdas, n, base_seed);
    let fading = sample_fading(n, base_seed.wrapping_add(1));

    let mut paths = Vec::new();
    for &gamma in &cfg.analysis.gammas {
        let powered = powered_radii(&radii, gamma);
        let mut csv = Csv::new("snr_ratio,pconn_analytic,pconn_empirical");
        for &snr in &sweep {
            let link = ConnectivitySpec::new(gamma, snr)?;
            let analytic = if gamma == 2.0 {
                pconn_partial_gamma2(lambda_xy, lambda_z, &link)?
            } else {
                pconn_partial_general(lambda_xy, lambda_z, &link)?
            };
            let empirical = connected_fraction(&powered, &fading, snr);
            csv.row(&[snr, analytic, empirical]);
        }
        let path = csv_path(
            &cfg.output.dir,
            &cfg.output.prefix,
            &format!("fig6_gamma-{gamma}"),
        )?;
        csv.write_to(&path)?;
        paths.push(path);
    }
    Ok(paths)
}
