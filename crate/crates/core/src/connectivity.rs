//! Link connectivity under Rayleigh fading.
//!
//! A link at distance R succeeds when the faded SNR clears a threshold;
//! with unit-exponential fading power that makes the connection
//! probability an exponential average of the distance CDF,
//!
//!   P_conn = int_0^inf F_R(B x^(1/gamma)) e^(-x) dx,
//!
//! where `gamma` is the path-loss exponent and the length scale `B`
//! collects the threshold-to-reference SNR ratio. The module offers the
//! numeric route for any distance law plus closed forms and series for
//! the laws that admit them.

use std::cell::RefCell;

use thiserror::Error;

use crate::models::{ControlLaw, Lambdas, ModelError, SymmetricModel};
use crate::quad;
use crate::special::{erf, erfcx, ln_pcf_scaled, SpecialFnError};
use crate::steady_state::{
    mixture_coefficients, oc_normalization, DistributionError, RadialDistribution,
};

/// Failure modes of connectivity evaluations.
#[derive(Debug, Error)]
pub enum ConnectivityError {
    #[error("path-loss exponent must be finite and at least 2, got {gamma}")]
    InvalidGamma { gamma: f64 },
    #[error("SNR ratio must be positive and finite, got {snr_ratio}")]
    InvalidSnr { snr_ratio: f64 },
    #[error("this closed form requires gamma = {expected}, got {got}")]
    WrongGamma { expected: f64, got: f64 },
    #[error("series term {index} lost all precision")]
    NonFiniteTerm { index: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Special(#[from] SpecialFnError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Quadrature(#[from] quad::QuadError),
}

/// Path-loss exponent and SNR threshold of a fading link, with the
/// derived length scale cached.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConnectivitySpec {
    gamma: f64,
    snr_ratio: f64,
    b: f64,
}

impl ConnectivitySpec {
    /// `snr_ratio` is the detection threshold divided by the SNR a unit
    /// distance would give; the connection range shrinks as it grows.
    pub fn new(gamma: f64, snr_ratio: f64) -> Result<Self, ConnectivityError> {
        if !gamma.is_finite() || gamma < 2.0 {
            return Err(ConnectivityError::InvalidGamma { gamma });
        }
        if !snr_ratio.is_finite() || snr_ratio <= 0.0 {
            return Err(ConnectivityError::InvalidSnr { snr_ratio });
        }
        Ok(Self {
            gamma,
            snr_ratio,
            b: snr_ratio.powf(-1.0 / gamma),
        })
    }

    /// Builds the spec from the length scale directly.
    pub fn from_length_scale(gamma: f64, b: f64) -> Result<Self, ConnectivityError> {
        if !gamma.is_finite() || gamma < 2.0 {
            return Err(ConnectivityError::InvalidGamma { gamma });
        }
        if !b.is_finite() || b <= 0.0 {
            return Err(ConnectivityError::InvalidSnr { snr_ratio: b });
        }
        Ok(Self {
            gamma,
            snr_ratio: b.powf(-gamma),
            b,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn snr_ratio(&self) -> f64 {
        self.snr_ratio
    }

    /// Length scale `B = snr_ratio^(-1/gamma)`: the distance at which
    /// the unfaded link sits exactly at threshold.
    pub fn b(&self) -> f64 {
        self.b
    }

    fn require_gamma(&self, expected: f64) -> Result<(), ConnectivityError> {
        if self.gamma == expected {
            Ok(())
        } else {
            Err(ConnectivityError::WrongGamma {
                expected,
                got: self.gamma,
            })
        }
    }
}

// e^-37 is below f64 relative resolution of a result of order one, so
// the untruncated remainder of the exponential average is invisible.
const EXP_CUTOFF: f64 = 37.0;

/// Connection probability by direct quadrature of the exponential
/// average of the distance CDF. Works for every distance law; the
/// closed forms below are cross-checked against this route.
pub fn pconn_numeric(
    dist: &RadialDistribution,
    spec: &ConnectivitySpec,
) -> Result<f64, ConnectivityError> {
    let inv_gamma = 1.0 / spec.gamma();
    let b = spec.b();
    let inner_error: RefCell<Option<DistributionError>> = RefCell::new(None);
    let integrand = |x: f64| match dist.cdf(b * x.powf(inv_gamma)) {
        Ok(v) => v * f64::exp(-x),
        Err(e) => {
            inner_error.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let result = quad::integrate(integrand, 0.0, EXP_CUTOFF, 1e-14, 1e-12);
    if let Some(e) = inner_error.into_inner() {
        return Err(e.into());
    }
    Ok(result?.value.clamp(0.0, 1.0))
}

/// Closed-form connection probability for the bang-bang controller at
/// inverse-square path loss. Exact; the only caveat is a benign loss of
/// a few trailing digits at very large `B` from one subtraction.
pub fn pconn_oc_gamma2(
    c: f64,
    m: f64,
    sigma: f64,
    spec: &ConnectivitySpec,
) -> Result<f64, ConnectivityError> {
    spec.require_gamma(2.0)?;
    SymmetricModel::new(ControlLaw::on_off(c, m)?, sigma)?;
    let b = spec.b();
    let k = oc_normalization(c, m, sigma);
    let a = m / b;
    let p = 2.0 * c * b / (sigma * sigma);
    let beta = a + 0.5 * p;
    let quarter_sqrt_pi = 0.25 * core::f64::consts::PI.sqrt();
    // integrating the density against the Gaussian kernel: an erf part
    // from inside the dead zone, an erfcx part from the tail
    let bracket = quarter_sqrt_pi * erf(a)
        + f64::exp(-a * a) * (quarter_sqrt_pi * (1.0 + 0.5 * p * p) * erfcx(beta) - 0.25 * p);
    Ok((k * b.powi(3) * bracket).clamp(0.0, 1.0))
}

/// Connection probability at inverse-square path loss for three axis
/// variances, summed over the chi-square mixture of the distance law.
/// Each mixture term contributes a closed geometric-style factor.
pub fn pconn_series_gamma2(
    lambdas: &Lambdas,
    spec: &ConnectivitySpec,
    tol: f64,
) -> Result<f64, ConnectivityError> {
    spec.require_gamma(2.0)?;
    let mixture = mixture_coefficients(lambdas, tol)?;
    let b2 = spec.b() * spec.b();
    let u = 1.0 / (1.0 + 2.0 * mixture.eta / b2);
    let mut weight = u.powf(1.5);
    let mut sum = 0.0;
    for &e in &mixture.coeffs {
        sum += e * weight;
        weight *= u;
    }
    Ok(sum.clamp(0.0, 1.0))
}

/// Connection probability at inverse-fourth path loss for three axis
/// variances. Each chi-square mixture term reduces to a parabolic
/// cylinder function; the Gaussian prefactors are kept fused with the
/// function value so nothing overflows at any SNR.
pub fn pconn_series_gamma4(
    lambdas: &Lambdas,
    spec: &ConnectivitySpec,
    tol: f64,
) -> Result<f64, ConnectivityError> {
    spec.require_gamma(4.0)?;
    let mixture = mixture_coefficients(lambdas, tol)?;
    let b2 = spec.b() * spec.b();
    let z = b2 / (2.0 * core::f64::consts::SQRT_2 * mixture.eta);
    let ln_z = z.ln();
    let mut sum = 0.0;
    for (j, &e) in mixture.coeffs.iter().enumerate() {
        let order = -(j as f64 + 1.5);
        let term = f64::exp((j as f64 + 1.5) * ln_z + ln_pcf_scaled(order, z)?);
        if !term.is_finite() {
            return Err(ConnectivityError::NonFiniteTerm { index: j });
        }
        sum += e * term;
    }
    Ok(sum.clamp(0.0, 1.0))
}

/// Connection probability at inverse-square path loss when two axis
/// variances coincide: the exponential average factors exactly into
/// one full and one square-root geometric factor, for either ordering
/// of the variances.
pub fn pconn_partial_gamma2(
    lambda_xy: f64,
    lambda_z: f64,
    spec: &ConnectivitySpec,
) -> Result<f64, ConnectivityError> {
    spec.require_gamma(2.0)?;
    Lambdas::new(lambda_xy, lambda_xy, lambda_z)?;
    let b2 = spec.b() * spec.b();
    let plane = 1.0 / (1.0 + 2.0 * lambda_xy / b2);
    let axis = 1.0 / (1.0 + 2.0 * lambda_z / b2);
    Ok((plane * axis.sqrt()).clamp(0.0, 1.0))
}

/// Connection probability for two equal plane variances at an arbitrary
/// path-loss exponent, by quadrature over the closed-form distance law.
pub fn pconn_partial_general(
    lambda_xy: f64,
    lambda_z: f64,
    spec: &ConnectivitySpec,
) -> Result<f64, ConnectivityError> {
    let dist = RadialDistribution::partial_symmetry(lambda_xy, lambda_z)?;
    pconn_numeric(&dist, spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec2(snr: f64) -> ConnectivitySpec {
        ConnectivitySpec::new(2.0, snr).unwrap()
    }

    #[test]
    fn spec_validation_and_length_scale() {
        assert!(ConnectivitySpec::new(1.9, 1.0).is_err());
        assert!(ConnectivitySpec::new(f64::NAN, 1.0).is_err());
        assert!(ConnectivitySpec::new(2.0, 0.0).is_err());
        assert!(ConnectivitySpec::new(2.0, -3.0).is_err());
        assert!(ConnectivitySpec::new(2.0, f64::INFINITY).is_err());
        let s = spec2(4.0);
        assert!((s.b() - 0.5).abs() < 1e-16);
        let t = ConnectivitySpec::new(4.0, 16.0).unwrap();
        assert!((t.b() - 0.5).abs() < 1e-16);
        let u = ConnectivitySpec::from_length_scale(2.0, 0.5).unwrap();
        assert!((u.snr_ratio() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn gamma2_series_equals_exact_product() {
        // the exponential average of a Gaussian quadratic form has an
        // exact product form; the mixture series must reproduce it
        let lambdas = Lambdas::new(1.095, 0.75, 0.495).unwrap();
        for &snr in &[0.01, 0.2, 1.0, 5.0, 100.0] {
            let spec = spec2(snr);
            let b2 = spec.b() * spec.b();
            let product = lambdas
                .as_array()
                .iter()
                .map(|l| 1.0 / (1.0 + 2.0 * l / b2).sqrt())
                .product::<f64>();
            let series = pconn_series_gamma2(&lambdas, &spec, 1e-11).unwrap();
            assert!(
                (series - product).abs() < 1e-11,
                "snr = {snr}: {series} vs {product}"
            );
        }
    }

    #[test]
    fn gamma2_series_reference_value() {
        let lambdas = Lambdas::new(1.095, 0.75, 0.495).unwrap();
        let v = pconn_series_gamma2(&lambdas, &spec2(1.0), 1e-12).unwrap();
        assert!((v - 0.25101987901998183).abs() < 1e-13, "got {v}");
        // isotropic case collapses to a single factor
        let iso = Lambdas::isotropic(0.5).unwrap();
        let w = pconn_series_gamma2(&iso, &spec2(1.0), 1e-12).unwrap();
        assert!((w - 0.125f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn gamma4_series_reference_values() {
        let spec = ConnectivitySpec::new(4.0, 1.0).unwrap();
        let iso = Lambdas::isotropic(0.75).unwrap();
        let v = pconn_series_gamma4(&iso, &spec, 1e-12).unwrap();
        assert!((v - 0.23964416101628777).abs() < 1e-10, "got {v}");
        let half = Lambdas::isotropic(0.5).unwrap();
        let w = pconn_series_gamma4(&half, &spec, 1e-12).unwrap();
        assert!((w - 0.36125859096030485).abs() < 1e-10, "got {w}");
        let aniso = Lambdas::new(1.095, 0.75, 0.495).unwrap();
        let u = pconn_series_gamma4(&aniso, &spec, 1e-12).unwrap();
        assert!((u - 0.23884397627558474).abs() < 1e-10, "got {u}");
        // near and far SNR extremes stay in [0, 1] and ordered
        let far = pconn_series_gamma4(&iso, &ConnectivitySpec::new(4.0, 256.0).unwrap(), 1e-10)
            .unwrap();
        let near = pconn_series_gamma4(
            &iso,
            &ConnectivitySpec::new(4.0, 1.0 / 256.0).unwrap(),
            1e-10,
        )
        .unwrap();
        assert!((far - 0.005702737321037484).abs() < 1e-10);
        assert!((near - 0.9691119046276708).abs() < 1e-10);
    }

    #[test]
    fn oc_closed_form_reference_values() {
        // the closed form loses digits to one subtraction as the range
        // scale outgrows the dead zone, hence the widening tolerances
        for &(snr, expected, tol) in &[
            (4.0, 0.034660114157777082, 1e-14),
            (1.0, 0.19854965112893749, 1e-14),
            (0.25, 0.53849798672655935, 1e-13),
            (0.04, 0.88007547298184352, 1e-12),
            (0.0025, 0.99147573621339047, 1e-10),
        ] {
            let v = pconn_oc_gamma2(1.0, 1.0, 1.0, &spec2(snr)).unwrap();
            assert!(
                (v - expected).abs() < tol,
                "snr = {snr}: {v} vs {expected}"
            );
        }
        // degenerate dead zone
        let v = pconn_oc_gamma2(1.0, 0.0, 1.0, &spec2(1.0)).unwrap();
        assert!((v - 0.27361646842393633).abs() < 1e-14);
        // the law only depends on (m/B, cB/sigma^2) and so survives a
        // joint rescaling of space and time
        let a = pconn_oc_gamma2(1.0, 1.0, 1.0, &spec2(1.0)).unwrap();
        let b = pconn_oc_gamma2(0.5, 2.0, 1.0, &spec2(0.25)).unwrap();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn partial_gamma2_reference_value() {
        let v = pconn_partial_gamma2(0.5045454545454545, 0.004595454545454545, &spec2(1.0))
            .unwrap();
        assert!((v - 0.49546587343053089).abs() < 1e-15, "got {v}");
        // equal variances match the isotropic product
        let iso = pconn_partial_gamma2(0.5, 0.5, &spec2(1.0)).unwrap();
        assert!((iso - 0.125f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn closed_forms_insist_on_their_exponent() {
        let four = ConnectivitySpec::new(4.0, 1.0).unwrap();
        let two = spec2(1.0);
        let l = Lambdas::isotropic(0.5).unwrap();
        assert!(matches!(
            pconn_oc_gamma2(1.0, 1.0, 1.0, &four),
            Err(ConnectivityError::WrongGamma { .. })
        ));
        assert!(pconn_series_gamma2(&l, &four, 1e-10).is_err());
        assert!(pconn_series_gamma4(&l, &two, 1e-10).is_err());
        assert!(pconn_partial_gamma2(0.5, 0.4, &four).is_err());
    }

    #[test]
    fn connectivity_decreases_with_snr_ratio() {
        let lambdas = Lambdas::new(0.8, 0.6, 0.3).unwrap();
        let mut prev = 1.0;
        for &snr in &[0.01, 0.1, 1.0, 10.0, 100.0] {
            let v = pconn_series_gamma2(&lambdas, &spec2(snr), 1e-10).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn numeric_route_matches_closed_forms() {
        let spec = spec2(1.0);
        let oc_dist = RadialDistribution::closed_form_oc(1.0, 1.0, 1.0).unwrap();
        let numeric = pconn_numeric(&oc_dist, &spec).unwrap();
        let closed = pconn_oc_gamma2(1.0, 1.0, 1.0, &spec).unwrap();
        assert!((numeric - closed).abs() < 1e-10, "{numeric} vs {closed}");

        let partial = pconn_partial_general(0.5, 0.125, &spec).unwrap();
        let closed = pconn_partial_gamma2(0.5, 0.125, &spec).unwrap();
        assert!((partial - closed).abs() < 1e-10, "{partial} vs {closed}");
    }
}
