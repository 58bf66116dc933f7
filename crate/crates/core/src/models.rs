//! Mobility model parameter types: radial control laws for the
//! spherically symmetric hover model, per-axis parameters for the
//! anisotropic model with position-error feedback, and the stationary
//! per-axis variances both in closed form and via the 2x2 steady-state
//! covariance equation.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::quad;

/// Parameter and construction failures for mobility models.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid {name} = {value}: {requirement}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error("piecewise-linear control needs knots starting at r = 0 with strictly increasing radii")]
    BadKnots,
    #[error("control velocity must be non-negative, but v({r}) = {v}")]
    NegativeVelocity { r: f64, v: f64 },
    #[error("steady-state covariance system is singular (alpha = {alpha}, beta = {beta})")]
    SingularSystem { alpha: f64, beta: f64 },
}

fn require_positive(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter {
            name,
            value,
            requirement: "must be positive and finite",
        })
    }
}

fn require_non_negative(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter {
            name,
            value,
            requirement: "must be non-negative and finite",
        })
    }
}

/// Piecewise-linear speed profile with precomputed potential values at
/// the knots. Beyond the last knot the speed is held constant.
#[derive(Clone, Debug)]
pub struct PiecewiseLaw {
    knots: Vec<(f64, f64)>,
    cumulative: Vec<f64>,
}

impl PiecewiseLaw {
    fn new(knots: Vec<(f64, f64)>) -> Result<Self, ModelError> {
        if knots.is_empty() || knots[0].0 != 0.0 {
            return Err(ModelError::BadKnots);
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(ModelError::BadKnots);
            }
        }
        for &(r, v) in &knots {
            if !v.is_finite() || !r.is_finite() {
                return Err(ModelError::BadKnots);
            }
            if v < 0.0 {
                return Err(ModelError::NegativeVelocity { r, v });
            }
        }
        // the integral of a linear segment is its trapezoid, exactly
        let mut cumulative = vec![0.0; knots.len()];
        for i in 1..knots.len() {
            let (r0, v0) = knots[i - 1];
            let (r1, v1) = knots[i];
            cumulative[i] = cumulative[i - 1] + 0.5 * (v0 + v1) * (r1 - r0);
        }
        Ok(Self { knots, cumulative })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    fn velocity(&self, r: f64) -> f64 {
        let last = self.knots.len() - 1;
        if r >= self.knots[last].0 {
            return self.knots[last].1;
        }
        let i = self.knots.partition_point(|&(kr, _)| kr <= r) - 1;
        let (r0, v0) = self.knots[i];
        let (r1, v1) = self.knots[i + 1];
        v0 + (v1 - v0) * (r - r0) / (r1 - r0)
    }

    fn potential(&self, r: f64) -> f64 {
        let last = self.knots.len() - 1;
        if r >= self.knots[last].0 {
            return self.cumulative[last] + self.knots[last].1 * (r - self.knots[last].0);
        }
        let i = self.knots.partition_point(|&(kr, _)| kr <= r) - 1;
        let (r0, _) = self.knots[i];
        self.cumulative[i] + 0.5 * (self.velocity(r0) + self.velocity(r)) * (r - r0)
    }
}

/// User-supplied speed profile, evaluated as given up to `r_max` and
/// held at `v(r_max)` beyond it.
#[derive(Clone)]
pub struct CustomLaw {
    v: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    r_max: f64,
}

impl fmt::Debug for CustomLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomLaw")
            .field("r_max", &self.r_max)
            .finish_non_exhaustive()
    }
}

/// Radial speed command `v(r)` of the symmetric hover controller. The
/// drift of every position component is `-v(r) x_i / r`.
#[derive(Clone, Debug)]
pub enum ControlLaw {
    /// Linear restoring speed `v(r) = alpha r`.
    Ou { alpha: f64 },
    /// Bang-bang controller: full speed `c` outside the dead zone of
    /// radius `m`, off inside it.
    OnOff { c: f64, m: f64 },
    /// Piecewise-linear interpolation through explicit knots.
    PiecewiseLinear(PiecewiseLaw),
    /// Arbitrary non-negative profile.
    Custom(CustomLaw),
}

impl ControlLaw {
    pub fn ou(alpha: f64) -> Result<Self, ModelError> {
        require_positive("alpha", alpha)?;
        Ok(Self::Ou { alpha })
    }

    pub fn on_off(c: f64, m: f64) -> Result<Self, ModelError> {
        require_positive("c", c)?;
        require_non_negative("m", m)?;
        Ok(Self::OnOff { c, m })
    }

    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self, ModelError> {
        Ok(Self::PiecewiseLinear(PiecewiseLaw::new(knots)?))
    }

    /// The profile is spot-checked for non-negativity on a grid over
    /// `[0, r_max]`; a profile that dips negative only between grid
    /// points will produce NaN potentials at evaluation time instead.
    pub fn custom(
        v: impl Fn(f64) -> f64 + Send + Sync + 'static,
        r_max: f64,
    ) -> Result<Self, ModelError> {
        require_positive("r_max", r_max)?;
        for i in 0..=1024 {
            let r = r_max * i as f64 / 1024.0;
            let value = v(r);
            if !value.is_finite() {
                return Err(ModelError::InvalidParameter {
                    name: "v(r)",
                    value,
                    requirement: "custom profile must be finite on [0, r_max]",
                });
            }
            if value < 0.0 {
                return Err(ModelError::NegativeVelocity { r, v: value });
            }
        }
        Ok(Self::Custom(CustomLaw {
            v: Arc::new(v),
            r_max,
        }))
    }

    /// Commanded speed at distance `r >= 0`.
    pub fn velocity(&self, r: f64) -> f64 {
        debug_assert!(r >= 0.0);
        match self {
            Self::Ou { alpha } => alpha * r,
            Self::OnOff { c, m } => {
                if r > *m {
                    *c
                } else {
                    0.0
                }
            }
            Self::PiecewiseLinear(law) => law.velocity(r),
            Self::Custom(law) => {
                if r <= law.r_max {
                    (law.v)(r)
                } else {
                    (law.v)(law.r_max)
                }
            }
        }
    }

    /// Accumulated potential `V(r) = int_0^r v(u) du`. Closed form for
    /// the analytic laws, quadrature for custom profiles.
    pub fn potential(&self, r: f64) -> f64 {
        debug_assert!(r >= 0.0);
        match self {
            Self::Ou { alpha } => 0.5 * alpha * r * r,
            Self::OnOff { c, m } => c * (r - m).max(0.0),
            Self::PiecewiseLinear(law) => law.potential(r),
            Self::Custom(law) => {
                let body_end = r.min(law.r_max);
                let body = quad::integrate(|u| (law.v)(u), 0.0, body_end, 1e-14, 1e-12)
                    .map(|q| q.value)
                    .unwrap_or(f64::NAN);
                let tail = if r > law.r_max {
                    (law.v)(law.r_max) * (r - law.r_max)
                } else {
                    0.0
                };
                body + tail
            }
        }
    }

    /// Radii where the commanded speed changes slope. Quadrature over
    /// the stationary density must split at these: a kink sitting near
    /// a panel center can cancel out of a Gauss-Kronrod error estimate
    /// and silently corrupt the integral.
    pub fn kink_radii(&self) -> Vec<f64> {
        match self {
            Self::Ou { .. } => Vec::new(),
            Self::OnOff { m, .. } => {
                if *m > 0.0 {
                    vec![*m]
                } else {
                    Vec::new()
                }
            }
            Self::PiecewiseLinear(law) => {
                law.knots.iter().map(|&(r, _)| r).filter(|&r| r > 0.0).collect()
            }
            Self::Custom(law) => vec![law.r_max],
        }
    }

    /// Asymptotic restoring speed, used to bound relaxation times.
    /// Returns the speed at the largest radius the law distinguishes.
    fn tail_velocity(&self) -> f64 {
        match self {
            Self::Ou { .. } => f64::INFINITY,
            Self::OnOff { c, .. } => *c,
            Self::PiecewiseLinear(law) => law.knots[law.knots.len() - 1].1,
            Self::Custom(law) => (law.v)(law.r_max),
        }
    }

    fn reference_radius(&self) -> f64 {
        match self {
            Self::Ou { .. } => 0.0,
            Self::OnOff { m, .. } => *m,
            Self::PiecewiseLinear(law) => law.knots[law.knots.len() - 1].0,
            Self::Custom(law) => law.r_max,
        }
    }
}

/// Spherically symmetric hover model: radial control law plus isotropic
/// wind intensity.
#[derive(Clone, Debug)]
pub struct SymmetricModel {
    control: ControlLaw,
    sigma: f64,
}

impl SymmetricModel {
    pub fn new(control: ControlLaw, sigma: f64) -> Result<Self, ModelError> {
        require_positive("sigma", sigma)?;
        Ok(Self { control, sigma })
    }

    pub fn control(&self) -> &ControlLaw {
        &self.control
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Coarse upper estimate of the time to forget the initial
    /// condition: travel time to the confinement region plus the
    /// diffusion time across it. Infinite if the control never pushes
    /// back (no stationary law exists then).
    pub fn relaxation_time(&self) -> f64 {
        match &self.control {
            ControlLaw::Ou { alpha } => 1.0 / alpha,
            _ => {
                let v = self.control.tail_velocity();
                if v <= 0.0 {
                    return f64::INFINITY;
                }
                let r = self.control.reference_radius();
                r / v + self.sigma * self.sigma / (v * v)
            }
        }
    }
}

/// Per-axis parameters of the anisotropic model: restoring rate
/// `alpha`, wind intensity `sigma`, and the positioning-error process
/// rate `beta` and intensity `s` feeding the controller input.
#[derive(Clone, Copy, Debug)]
pub struct AxisParams {
    pub alpha: f64,
    pub sigma: f64,
    pub beta: f64,
    pub s: f64,
}

impl AxisParams {
    pub fn new(alpha: f64, sigma: f64, beta: f64, s: f64) -> Result<Self, ModelError> {
        require_positive("alpha", alpha)?;
        require_positive("sigma", sigma)?;
        require_positive("beta", beta)?;
        require_non_negative("s", s)?;
        Ok(Self {
            alpha,
            sigma,
            beta,
            s,
        })
    }

    /// Slowest timescale of the coupled position/error pair.
    pub fn relaxation_time(&self) -> f64 {
        (1.0 / self.alpha).max(1.0 / self.beta)
    }
}

/// Anisotropic hover model: three independent axes, each a linear
/// controller acting on an error-corrupted position measurement.
#[derive(Clone, Copy, Debug)]
pub struct AsymmetricModel {
    axes: [AxisParams; 3],
}

impl AsymmetricModel {
    pub fn new(axes: [AxisParams; 3]) -> Self {
        Self { axes }
    }

    pub fn axes(&self) -> &[AxisParams; 3] {
        &self.axes
    }

    pub fn lambdas(&self) -> Lambdas {
        let l = self.axes.map(|a| lambda_from_axis(&a));
        Lambdas::new(l[0], l[1], l[2]).expect("axis variances are positive by construction")
    }

    pub fn relaxation_time(&self) -> f64 {
        self.axes
            .iter()
            .map(AxisParams::relaxation_time)
            .fold(0.0, f64::max)
    }
}

/// Stationary per-axis position variances of the anisotropic model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lambdas {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
}

impl Lambdas {
    pub fn new(lambda1: f64, lambda2: f64, lambda3: f64) -> Result<Self, ModelError> {
        for (name, v) in [
            ("lambda1", lambda1),
            ("lambda2", lambda2),
            ("lambda3", lambda3),
        ] {
            require_positive(name, v)?;
        }
        Ok(Self {
            lambda1,
            lambda2,
            lambda3,
        })
    }

    pub fn isotropic(lambda: f64) -> Result<Self, ModelError> {
        Self::new(lambda, lambda, lambda)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.lambda1, self.lambda2, self.lambda3]
    }

    pub fn min(&self) -> f64 {
        self.lambda1.min(self.lambda2).min(self.lambda3)
    }

    pub fn max(&self) -> f64 {
        self.lambda1.max(self.lambda2).max(self.lambda3)
    }
}

/// Stationary position variance of one axis in closed form: the direct
/// wind contribution plus the error-process contribution filtered
/// through the controller.
pub fn lambda_from_axis(axis: &AxisParams) -> f64 {
    let AxisParams {
        alpha,
        sigma,
        beta,
        s,
    } = *axis;
    sigma * sigma / (2.0 * alpha) + alpha / (alpha + beta) * s * s / (2.0 * beta)
}

/// Stationary covariance of the coupled (position, error) pair of one
/// axis: `s11 = Var X`, `s12 = Cov(X, eps)`, `s22 = Var eps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Covariance2 {
    pub s11: f64,
    pub s12: f64,
    pub s22: f64,
}

/// Solves the stationary covariance equation `A S + S A^T = B B^T` for
/// the linear pair `d(X, eps) = -A (X, eps) dt + B dW` with
/// `A = [[alpha, alpha], [0, beta]]`, `B = diag(sigma, s)`, by direct
/// elimination on the three independent entries.
pub fn lyapunov_solve(axis: &AxisParams) -> Result<Covariance2, ModelError> {
    let AxisParams {
        alpha,
        sigma,
        beta,
        s,
    } = *axis;
    // unknowns (s11, s12, s22); equations from the (1,1), (1,2), (2,2)
    // entries of A S + S A^T = diag(sigma^2, s^2)
    let mut m = [
        [2.0 * alpha, 2.0 * alpha, 0.0, sigma * sigma],
        [0.0, alpha + beta, alpha, 0.0],
        [0.0, 0.0, 2.0 * beta, s * s],
    ];
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        if m[pivot][col].abs() < 1e-300 {
            return Err(ModelError::SingularSystem { alpha, beta });
        }
        m.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let s22 = m[2][3] / m[2][2];
    let s12 = (m[1][3] - m[1][2] * s22) / m[1][1];
    let s11 = (m[0][3] - m[0][1] * s12 - m[0][2] * s22) / m[0][0];
    Ok(Covariance2 { s11, s12, s22 })
}

/// Max-norm residual of the stationary covariance equation; a direct
/// check that a claimed covariance actually solves it.
pub fn lyapunov_residual(axis: &AxisParams, cov: &Covariance2) -> f64 {
    let AxisParams {
        alpha,
        sigma,
        beta,
        s,
    } = *axis;
    let r11 = 2.0 * alpha * (cov.s11 + cov.s12) - sigma * sigma;
    let r12 = (alpha + beta) * cov.s12 + alpha * cov.s22;
    let r22 = 2.0 * beta * cov.s22 - s * s;
    r11.abs().max(r12.abs()).max(r22.abs())
}
