//! Stationary distance-to-target distributions.
//!
//! Every hover model here admits a steady-state law for the distance R
//! between the device and its hover point. This module provides that law
//! through several routes with very different cost/generality
//! trade-offs, all cross-checked against each other in the test suite:
//!
//! * quadrature on the Gibbs-type radial density for any symmetric
//!   control law,
//! * closed forms for the linear and bang-bang controllers,
//! * a chi-square mixture series for three unequal axis variances,
//! * error-function closed forms when two variances coincide.

use thiserror::Error;

use crate::models::{Lambdas, ModelError, SymmetricModel};
use crate::quad::{self, QuadError};
use crate::special::{
    erf, erfi_scaled, ln_gamma, reg_lower_gamma, SpecialFnError,
};

/// Failure modes of steady-state distribution construction and
/// evaluation.
#[derive(Debug, Error)]
pub enum DistributionError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Special(#[from] SpecialFnError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("steady-state density is not normalizable: {reason}")]
    NotNormalizable { reason: String },
    #[error(
        "chi-square mixture still had unresolved mass {tail:e} after {terms} terms (tolerance {tol:e})"
    )]
    SeriesTruncated { terms: usize, tail: f64, tol: f64 },
    #[error("series tolerance must lie in (0, 0.1), got {tol}")]
    InvalidTolerance { tol: f64 },
    #[error("density evaluation produced a non-finite value at r = {r}")]
    NonFiniteDensity { r: f64 },
}

/// Convergence report of a chi-square mixture construction.
#[derive(Clone, Copy, Debug)]
pub struct SeriesDiagnostics {
    /// Number of mixture terms retained.
    pub terms_used: usize,
    /// Absolute mixture mass still unaccounted for at truncation; an
    /// upper bound on the CDF truncation error.
    pub tail_bound: f64,
    /// Scale parameter the mixture was expanded around.
    pub eta_used: f64,
}

/// Two equal axis variances count as "equal" within this relative band;
/// inside it the distance law is treated as exactly isotropic in the
/// dominant plane, which keeps both error-function branches away from
/// their 0/0 limits.
pub const EQUAL_VARIANCE_BAND: f64 = 1e-6;

const MAX_MIXTURE_TERMS: usize = 10_000;

pub(crate) struct ChiSquareMixture {
    pub eta: f64,
    pub coeffs: Vec<f64>,
    pub tail: f64,
}

/// Expands the law of `sqrt(sum lambda_i Z_i^2)` (independent standard
/// normal `Z_i`) into a mixture of central chi-square distributions of
/// odd degree with common scale `eta`. The scale is the harmonic-mean
/// choice when that converges comfortably, otherwise the smallest
/// variance, which makes every mixture weight non-negative.
pub(crate) fn mixture_coefficients(
    lambdas: &Lambdas,
    tol: f64,
) -> Result<ChiSquareMixture, DistributionError> {
    if !(tol > 0.0 && tol < 0.1) {
        return Err(DistributionError::InvalidTolerance { tol });
    }
    let l = lambdas.as_array();
    let lmin = lambdas.min();
    let harmonic = 3.0 / l.iter().map(|v| 1.0 / v).sum::<f64>();
    let eta = if harmonic <= 1.9 * lmin { harmonic } else { lmin };
    let ratios = l.map(|v| 1.0 - eta / v);
    let e0 = (eta.powi(3) / (l[0] * l[1] * l[2])).sqrt();
    let mut coeffs = vec![e0];
    let mut partial = e0;
    if (1.0 - partial).abs() <= tol {
        // all variances equal: the mixture is a single chi-square term
        return Ok(ChiSquareMixture {
            eta,
            coeffs,
            tail: (1.0 - partial).abs(),
        });
    }
    // power sums h[s-1] = sum_j ratios_j^s, extended as needed
    let mut pows = ratios;
    let mut h: Vec<f64> = Vec::new();
    loop {
        let s = coeffs.len();
        if s >= MAX_MIXTURE_TERMS {
            return Err(DistributionError::SeriesTruncated {
                terms: s,
                tail: (1.0 - partial).abs(),
                tol,
            });
        }
        h.push(pows[0] + pows[1] + pows[2]);
        for (p, r) in pows.iter_mut().zip(ratios) {
            *p *= r;
        }
        let mut acc = 0.0;
        for j in 1..=s {
            acc += h[j - 1] * coeffs[s - j];
        }
        let e_s = acc / (2.0 * s as f64);
        coeffs.push(e_s);
        partial += e_s;
        let tail = (1.0 - partial).abs();
        // the harmonic-mean scale forces the second weight to zero, so
        // ask for two consecutive negligible weights before trusting
        // the residual mass as a tail bound
        if tail <= tol && s >= 2 {
            let recent_small = coeffs[s].abs() <= tol && coeffs[s - 1].abs() <= tol;
            if recent_small {
                return Ok(ChiSquareMixture { eta, coeffs, tail });
            }
        }
    }
}

/// A positive quantity `value * 2^shift` whose true magnitude may start
/// far below the subnormal floor and climb back up as a recurrence
/// multiplies it. While `shift < 0` the mantissa is held near `[1, 2)`;
/// once the true magnitude re-enters the representable range the scale
/// collapses into a plain f64 and `shift` stays at zero.
struct ScaledRecurrence {
    value: f64,
    shift: i64,
}

impl ScaledRecurrence {
    fn from_ln(ln_value: f64) -> Self {
        if ln_value > -600.0 {
            Self {
                value: f64::exp(ln_value),
                shift: 0,
            }
        } else {
            // saturating cast: an astronomically negative start keeps
            // the quantity treated as zero for the whole recurrence
            let shift = (ln_value / core::f64::consts::LN_2).floor();
            Self {
                value: f64::exp(ln_value - shift * core::f64::consts::LN_2),
                shift: shift as i64,
            }
        }
    }

    #[inline]
    fn advance(&mut self, factor: f64) {
        self.value *= factor;
        if self.shift < 0 && self.value >= 2.0 {
            let bits = self.value.log2().floor() as i64;
            self.value *= f64::exp2(-(bits as f64));
            self.shift += bits;
            if self.shift >= -900 {
                self.value *= f64::exp2(self.shift as f64);
                self.shift = 0;
            }
        }
    }

    #[inline]
    fn materialized(&self) -> Option<f64> {
        if self.shift == 0 {
            Some(self.value)
        } else {
            None
        }
    }
}

/// CDF of a chi-square mixture at distance `r`: the chi-square terms of
/// degree 3, 5, 7, ... are generated by downward recurrence from a
/// single incomplete-gamma evaluation. The recurrence steps
/// `delta_j = P(3/2 + j, x) - P(5/2 + j, x)` are carried with an
/// explicit binary exponent: for large `x` the early deltas underflow,
/// yet the ones near `j = x` are exactly what pulls the late terms (and
/// with them the upper tail) back down from 1.
fn mixture_cdf(eta: f64, coeffs: &[f64], r: f64) -> Result<f64, DistributionError> {
    if r <= 0.0 {
        return Ok(0.0);
    }
    let x = r * r / (2.0 * eta);
    if x > 1e300 {
        return Ok(1.0);
    }
    let mut p = reg_lower_gamma(1.5, x)?;
    let mut delta = ScaledRecurrence::from_ln(1.5 * x.ln() - x - ln_gamma(2.5));
    let mut sum = 0.0;
    for (j, &e) in coeffs.iter().enumerate() {
        sum += e * p;
        if let Some(d) = delta.materialized() {
            p = (p - d).max(0.0);
        }
        delta.advance(x / (2.5 + j as f64));
    }
    Ok(sum.clamp(0.0, 1.0))
}

/// Density of a chi-square mixture at distance `r`.
fn mixture_pdf(eta: f64, coeffs: &[f64], r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let x = r * r / (2.0 * eta);
    if x > 1e300 {
        return 0.0;
    }
    // term_j = (r/eta) x^{1/2 + j} e^{-x} / Gamma(3/2 + j), the
    // r-derivative of the regularized gamma term of the same order
    let ln_t0 = (r / eta).ln() + 0.5 * x.ln() - x - ln_gamma(1.5);
    let mut term = ScaledRecurrence::from_ln(ln_t0);
    let mut sum = 0.0;
    for (j, &e) in coeffs.iter().enumerate() {
        if let Some(t) = term.materialized() {
            sum += e * t;
        }
        term.advance(x / (1.5 + j as f64));
    }
    sum.max(0.0)
}

#[derive(Clone, Copy, PartialEq)]
enum PartialBranch {
    PlaneHeavy,
    AxisHeavy,
    Equal,
}

fn partial_branch(lambda_xy: f64, lambda_z: f64) -> PartialBranch {
    if lambda_xy > lambda_z * (1.0 + EQUAL_VARIANCE_BAND) {
        PartialBranch::PlaneHeavy
    } else if lambda_z > lambda_xy * (1.0 + EQUAL_VARIANCE_BAND) {
        PartialBranch::AxisHeavy
    } else {
        PartialBranch::Equal
    }
}

fn maxwell_cdf(lambda: f64, r: f64) -> Result<f64, DistributionError> {
    if r <= 0.0 {
        return Ok(0.0);
    }
    Ok(reg_lower_gamma(1.5, r * r / (2.0 * lambda))?)
}

fn maxwell_pdf(lambda: f64, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    (2.0 / core::f64::consts::PI).sqrt() * r * r / lambda.powf(1.5)
        * f64::exp(-r * r / (2.0 * lambda))
}

/// Distance CDF when two axis variances are `lambda_xy` and the third is
/// `lambda_z`. Closed form in error functions when the plane dominates,
/// in the damped imaginary error function when the axis dominates, and
/// the isotropic chi-square law inside the equal-variance band (matched
/// at the mean variance so the branch seams line up to second order).
pub fn partial_symmetry_cdf(lambda_xy: f64, lambda_z: f64, r: f64) -> f64 {
    assert!(
        lambda_xy > 0.0 && lambda_xy.is_finite() && lambda_z > 0.0 && lambda_z.is_finite(),
        "variances must be positive and finite, got lambda_xy = {lambda_xy}, lambda_z = {lambda_z}"
    );
    if r <= 0.0 {
        return 0.0;
    }
    match partial_branch(lambda_xy, lambda_z) {
        PartialBranch::PlaneHeavy => {
            let d = lambda_xy - lambda_z;
            let t1 = erf(r / (2.0 * lambda_z).sqrt());
            let t2 = (lambda_xy / d).sqrt()
                * f64::exp(-r * r / (2.0 * lambda_xy))
                * erf(r * (d / (2.0 * lambda_xy * lambda_z)).sqrt());
            (t1 - t2).clamp(0.0, 1.0)
        }
        PartialBranch::AxisHeavy => {
            let d = lambda_z - lambda_xy;
            let a = r * r / (2.0 * lambda_xy);
            let b = r * r * d / (2.0 * lambda_xy * lambda_z);
            let scaled = erfi_scaled(a, b)
                .expect("damping dominates by construction: b/a = 1 - lambda_xy/lambda_z < 1");
            let t1 = erf(r / (2.0 * lambda_z).sqrt());
            (t1 - (lambda_xy / d).sqrt() * scaled).clamp(0.0, 1.0)
        }
        PartialBranch::Equal => {
            let lambda = (2.0 * lambda_xy + lambda_z) / 3.0;
            maxwell_cdf(lambda, r).expect("chi-square CDF arguments are in range")
        }
    }
}

fn partial_symmetry_pdf(lambda_xy: f64, lambda_z: f64, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    match partial_branch(lambda_xy, lambda_z) {
        PartialBranch::PlaneHeavy => {
            let d = lambda_xy - lambda_z;
            r / (lambda_xy * d).sqrt()
                * f64::exp(-r * r / (2.0 * lambda_xy))
                * erf(r * (d / (2.0 * lambda_xy * lambda_z)).sqrt())
        }
        PartialBranch::AxisHeavy => {
            let d = lambda_z - lambda_xy;
            let a = r * r / (2.0 * lambda_xy);
            let b = r * r * d / (2.0 * lambda_xy * lambda_z);
            let scaled = erfi_scaled(a, b)
                .expect("damping dominates by construction: b/a = 1 - lambda_xy/lambda_z < 1");
            r / (lambda_xy * d).sqrt() * scaled
        }
        PartialBranch::Equal => maxwell_pdf((2.0 * lambda_xy + lambda_z) / 3.0, r),
    }
}

/// Stationary law of the distance R, in whichever representation was
/// requested at construction. All representations expose the same
/// `pdf`/`cdf` interface so validation code can compare routes blindly.
#[derive(Clone, Debug)]
pub struct RadialDistribution {
    repr: Repr,
}

#[derive(Clone, Debug)]
enum Repr {
    General {
        model: SymmetricModel,
        k: f64,
        r_hi: f64,
    },
    Ou {
        alpha: f64,
        sigma: f64,
    },
    Oc {
        c: f64,
        m: f64,
        sigma: f64,
        k: f64,
    },
    Series {
        eta: f64,
        coeffs: Vec<f64>,
        lambda_max: f64,
    },
    Partial {
        lambda_xy: f64,
        lambda_z: f64,
    },
    Chi2 {
        lambda: f64,
    },
}

pub(crate) fn oc_normalization(c: f64, m: f64, sigma: f64) -> f64 {
    let s2 = sigma * sigma;
    let a = s2 * s2 + 2.0 * m * c * s2 + 2.0 * m * m * c * c;
    12.0 * c.powi(3) / (3.0 * s2 * a + 4.0 * m.powi(3) * c.powi(3))
}

fn unnormalized_radial(model: &SymmetricModel, r: f64) -> f64 {
    let two_over_s2 = 2.0 / (model.sigma() * model.sigma());
    r * r * f64::exp(-two_over_s2 * model.control().potential(r))
}

/// Integrates the unnormalized density over `[a, b]`, splitting at the
/// control law's slope breaks so each quadrature panel sees a smooth
/// integrand.
fn integrate_density(model: &SymmetricModel, a: f64, b: f64) -> Result<f64, DistributionError> {
    let f = |r: f64| unnormalized_radial(model, r);
    let mut total = 0.0;
    let mut lo = a;
    for kink in model.control().kink_radii() {
        if kink > lo && kink < b {
            total += quad::integrate(&f, lo, kink, 1e-300, 1e-13)?.value;
            lo = kink;
        }
    }
    total += quad::integrate(&f, lo, b, 1e-300, 1e-13)?.value;
    Ok(total)
}

fn general_normalization(model: &SymmetricModel) -> Result<(f64, f64), DistributionError> {
    let two_over_s2 = 2.0 / (model.sigma() * model.sigma());
    // start the tail hunt where the Gibbs exponent is order one
    let mut r_s = 1.0;
    let mut grew = 0;
    while two_over_s2 * model.control().potential(r_s) < 2.0 {
        r_s *= 2.0;
        grew += 1;
        if grew > 500 {
            return Err(DistributionError::NotNormalizable {
                reason: "the control potential never reaches the wind energy scale".to_string(),
            });
        }
    }
    let mut total = integrate_density(model, 0.0, r_s)?;
    let r_hi = loop {
        let seg = integrate_density(model, r_s, 2.0 * r_s)?;
        total += seg;
        if seg.abs() < 1e-14 * total.abs() {
            break 2.0 * r_s;
        }
        r_s *= 2.0;
        if r_s > 1e12 {
            return Err(DistributionError::NotNormalizable {
                reason: format!("density mass keeps growing past r = {r_s:e}"),
            });
        }
    };
    if !(total > 0.0) || !total.is_finite() {
        return Err(DistributionError::NotNormalizable {
            reason: format!("normalization integral evaluated to {total}"),
        });
    }
    Ok((1.0 / total, r_hi))
}

impl RadialDistribution {
    /// Quadrature-backed law for an arbitrary symmetric model. Fails if
    /// the control law does not confine the device.
    pub fn general(model: SymmetricModel) -> Result<Self, DistributionError> {
        let (k, r_hi) = general_normalization(&model)?;
        Ok(Self {
            repr: Repr::General { model, k, r_hi },
        })
    }

    /// Closed form for the linear controller `v(r) = alpha r`.
    pub fn closed_form_ou(alpha: f64, sigma: f64) -> Result<Self, DistributionError> {
        SymmetricModel::new(crate::models::ControlLaw::ou(alpha)?, sigma)?;
        Ok(Self {
            repr: Repr::Ou { alpha, sigma },
        })
    }

    /// Closed form for the bang-bang controller with speed `c` and dead
    /// zone `m`.
    pub fn closed_form_oc(c: f64, m: f64, sigma: f64) -> Result<Self, DistributionError> {
        SymmetricModel::new(crate::models::ControlLaw::on_off(c, m)?, sigma)?;
        Ok(Self {
            repr: Repr::Oc {
                c,
                m,
                sigma,
                k: oc_normalization(c, m, sigma),
            },
        })
    }

    /// Chi-square mixture for three unequal axis variances, together
    /// with its convergence report.
    pub fn quadratic_form_series(
        lambdas: &Lambdas,
        tol: f64,
    ) -> Result<(Self, SeriesDiagnostics), DistributionError> {
        let mixture = mixture_coefficients(lambdas, tol)?;
        let diag = SeriesDiagnostics {
            terms_used: mixture.coeffs.len(),
            tail_bound: mixture.tail,
            eta_used: mixture.eta,
        };
        Ok((
            Self {
                repr: Repr::Series {
                    eta: mixture.eta,
                    coeffs: mixture.coeffs,
                    lambda_max: lambdas.max(),
                },
            },
            diag,
        ))
    }

    /// Error-function closed form for two equal plane variances and a
    /// distinct vertical variance.
    pub fn partial_symmetry(lambda_xy: f64, lambda_z: f64) -> Result<Self, DistributionError> {
        Lambdas::new(lambda_xy, lambda_xy, lambda_z)?;
        Ok(Self {
            repr: Repr::Partial {
                lambda_xy,
                lambda_z,
            },
        })
    }

    /// Isotropic law: distance is `sqrt(lambda)` times a chi(3) variable.
    pub fn chi2_scaled(lambda: f64) -> Result<Self, DistributionError> {
        Lambdas::isotropic(lambda)?;
        Ok(Self {
            repr: Repr::Chi2 { lambda },
        })
    }

    /// Density of the distance law at `r`. Zero for `r <= 0`.
    pub fn pdf(&self, r: f64) -> Result<f64, DistributionError> {
        if r <= 0.0 {
            return Ok(0.0);
        }
        let value = match &self.repr {
            Repr::General { model, k, .. } => k * unnormalized_radial(model, r),
            Repr::Ou { alpha, sigma } => {
                let a = alpha / (sigma * sigma);
                4.0 / core::f64::consts::PI.sqrt() * a.powf(1.5) * r * r * f64::exp(-a * r * r)
            }
            Repr::Oc { c, m, sigma, k } => {
                let decay = if r > *m {
                    f64::exp(-2.0 * c * (r - m) / (sigma * sigma))
                } else {
                    1.0
                };
                k * r * r * decay
            }
            Repr::Series { eta, coeffs, .. } => mixture_pdf(*eta, coeffs, r),
            Repr::Partial {
                lambda_xy,
                lambda_z,
            } => partial_symmetry_pdf(*lambda_xy, *lambda_z, r),
            Repr::Chi2 { lambda } => maxwell_pdf(*lambda, r),
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(DistributionError::NonFiniteDensity { r })
        }
    }

    /// CDF of the distance law at `r`. Zero for `r <= 0`.
    pub fn cdf(&self, r: f64) -> Result<f64, DistributionError> {
        if r <= 0.0 {
            return Ok(0.0);
        }
        match &self.repr {
            Repr::General { model, k, r_hi } => {
                if r >= *r_hi {
                    return Ok(1.0);
                }
                let mass = integrate_density(model, 0.0, r)?;
                Ok((k * mass).clamp(0.0, 1.0))
            }
            Repr::Ou { alpha, sigma } => Ok(cdf_ou(*alpha, *sigma, r)),
            Repr::Oc { c, m, sigma, .. } => Ok(cdf_oc(*c, *m, *sigma, r)),
            Repr::Series { eta, coeffs, .. } => mixture_cdf(*eta, coeffs, r),
            Repr::Partial {
                lambda_xy,
                lambda_z,
            } => Ok(partial_symmetry_cdf(*lambda_xy, *lambda_z, r)),
            Repr::Chi2 { lambda } => maxwell_cdf(*lambda, r),
        }
    }

    /// A radius by which essentially all probability mass has been
    /// covered; a convenient upper end for plotting grids and root
    /// brackets.
    pub fn upper_radius(&self) -> f64 {
        match &self.repr {
            Repr::General { r_hi, .. } => *r_hi,
            Repr::Ou { alpha, sigma } => {
                let lambda = sigma * sigma / (2.0 * alpha);
                9.0 * lambda.sqrt()
            }
            Repr::Oc { c, m, sigma, .. } => m + 22.0 * sigma * sigma / c,
            Repr::Series {
                eta, lambda_max, ..
            } => 9.0 * lambda_max.max(*eta).sqrt(),
            Repr::Partial {
                lambda_xy,
                lambda_z,
            } => 9.0 * lambda_xy.max(*lambda_z).sqrt(),
            Repr::Chi2 { lambda } => 9.0 * lambda.sqrt(),
        }
    }
}

/// Density of the distance law for an arbitrary symmetric model,
/// normalized by quadrature on each call. Build a
/// [`RadialDistribution::general`] once instead when evaluating on a
/// grid.
pub fn radial_pdf_general(model: &SymmetricModel, r: f64) -> Result<f64, DistributionError> {
    RadialDistribution::general(model.clone())?.pdf(r)
}

/// CDF companion of [`radial_pdf_general`], with the same cost caveat.
pub fn radial_cdf_general(model: &SymmetricModel, r: f64) -> Result<f64, DistributionError> {
    RadialDistribution::general(model.clone())?.cdf(r)
}

/// Distance CDF of the linear controller: a scaled chi(3) law.
pub fn cdf_ou(alpha: f64, sigma: f64, r: f64) -> f64 {
    assert!(
        alpha > 0.0 && alpha.is_finite() && sigma > 0.0 && sigma.is_finite(),
        "parameters must be positive and finite, got alpha = {alpha}, sigma = {sigma}"
    );
    if r <= 0.0 {
        return 0.0;
    }
    let y = alpha.sqrt() * r / sigma;
    (erf(y) - core::f64::consts::FRAC_2_SQRT_PI * y * f64::exp(-y * y)).clamp(0.0, 1.0)
}

/// Distance CDF of the bang-bang controller: cubic growth inside the
/// dead zone, exponential-times-quadratic tail outside it.
pub fn cdf_oc(c: f64, m: f64, sigma: f64, r: f64) -> f64 {
    assert!(
        c > 0.0 && c.is_finite() && m >= 0.0 && m.is_finite() && sigma > 0.0 && sigma.is_finite(),
        "parameters out of range: c = {c}, m = {m}, sigma = {sigma}"
    );
    if r <= 0.0 {
        return 0.0;
    }
    let k = oc_normalization(c, m, sigma);
    if r <= m {
        return (k * r.powi(3) / 3.0).clamp(0.0, 1.0);
    }
    let s2 = sigma * sigma;
    let poly = |u: f64| s2 * s2 + 2.0 * u * c * s2 + 2.0 * u * u * c * c;
    let tail = s2 / (4.0 * c.powi(3))
        * (poly(m) - poly(r) * f64::exp(-2.0 * c * (r - m) / s2));
    (k * (m.powi(3) / 3.0 + tail)).clamp(0.0, 1.0)
}

/// Distance CDF for three unequal axis variances via the chi-square
/// mixture, returning the truncation diagnostics next to the value.
pub fn quadratic_form_cdf(
    lambdas: &Lambdas,
    r: f64,
    tol: f64,
) -> Result<(f64, SeriesDiagnostics), DistributionError> {
    let mixture = mixture_coefficients(lambdas, tol)?;
    let diag = SeriesDiagnostics {
        terms_used: mixture.coeffs.len(),
        tail_bound: mixture.tail,
        eta_used: mixture.eta,
    };
    Ok((mixture_cdf(mixture.eta, &mixture.coeffs, r)?, diag))
}
