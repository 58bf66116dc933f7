//! Dawson integral F(x) = exp(-x^2) * int_0^x exp(t^2) dt.
//!
//! Both regimes use series with positive terms only, so there is no
//! cancellation anywhere: a scaled Maclaurin series below the crossover
//! and the 1/(2x) asymptotic series above it. The crossover at 6.25 is
//! where the asymptotic tail is already below 1e-16 relative.

use super::SpecialFnError;

const CROSSOVER: f64 = 6.25;

fn dawson_series(x: f64) -> f64 {
    // F(x) = exp(-x^2) * sum_n x^(2n+1) / (n! (2n+1)), all terms positive
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for n in 1..400 {
        let n = n as f64;
        term *= x2 * (2.0 * n - 1.0) / (n * (2.0 * n + 1.0));
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    f64::exp(-x2) * sum
}

fn dawson_asymptotic(x: f64) -> f64 {
    // F(x) ~ (1/2x) sum_k (2k-1)!! / (2x^2)^k; truncated before the terms
    // turn around, which for x > 6.25 happens far below 1e-16
    let inv = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        let next = term * (2.0 * k as f64 - 1.0) * inv;
        if next >= term || next < 1e-17 {
            if next < term {
                sum += next;
            }
            break;
        }
        term = next;
        sum += term;
    }
    sum / (2.0 * x)
}

/// Dawson integral. Odd in `x`; peaks near x = 0.924 and decays like
/// `1/(2x)` for large arguments.
pub fn dawson(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let value = if ax < 1e-8 {
        ax
    } else if ax <= CROSSOVER {
        dawson_series(ax)
    } else {
        dawson_asymptotic(ax)
    };
    if x < 0.0 {
        -value
    } else {
        value
    }
}

/// Exponentially damped imaginary error function `exp(-a) * erfi(sqrt(b))`
/// for `0 <= b <= a`.
///
/// The constraint `b <= a` guarantees the result is bounded by roughly 1,
/// which is exactly the combination that appears in oblate distance laws:
/// there the exponential damping always dominates the erfi growth.
pub fn erfi_scaled(a: f64, b: f64) -> Result<f64, SpecialFnError> {
    if !a.is_finite() || !b.is_finite() || a < 0.0 || b < 0.0 {
        return Err(SpecialFnError::Domain {
            function: "erfi_scaled",
            message: format!("arguments must be finite and non-negative, got a = {a}, b = {b}"),
        });
    }
    if b > a {
        return Err(SpecialFnError::Domain {
            function: "erfi_scaled",
            message: format!("damping must dominate: require b <= a, got a = {a}, b = {b}"),
        });
    }
    // erfi(y) = (2/sqrt(pi)) exp(y^2) F(y), so exp(-a) erfi(sqrt(b)) =
    // (2/sqrt(pi)) exp(b - a) F(sqrt(b)) with b - a <= 0
    let y = b.sqrt();
    Ok(core::f64::consts::FRAC_2_SQRT_PI * f64::exp(b - a) * dawson(y))
}
