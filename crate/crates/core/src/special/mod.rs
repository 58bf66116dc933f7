//! Scalar special functions needed by the distance laws: the error
//! function family, the Dawson integral, regularized incomplete gamma,
//! and parabolic cylinder functions of negative order.
//!
//! Everything here is self-contained f64 code with fixed, documented
//! accuracy targets; no arbitrary-precision fallbacks. Functions whose
//! domain is open-ended take plain arguments and panic on programmer
//! error (NaN where a probability is expected); functions with genuine
//! rejection regions return `Result`.

mod dawson;
mod erf;
mod gamma;
mod pcf;

pub use dawson::{dawson, erfi_scaled};
pub use erf::{erf, erfc, erfcx};
pub use gamma::{chi2_cdf, ln_gamma, reg_lower_gamma};
pub use pcf::{ln_pcf_scaled, ln_pcf_scaled_with, parabolic_cylinder_d};

use thiserror::Error;

/// Failure modes of the special-function kernels.
#[derive(Debug, Error)]
pub enum SpecialFnError {
    /// Argument outside the supported domain.
    #[error("{function}: {message}")]
    Domain {
        function: &'static str,
        message: String,
    },
    /// An iterative scheme hit its iteration cap before reaching the
    /// requested accuracy.
    #[error("{function} did not converge: {detail}")]
    DidNotConverge {
        function: &'static str,
        detail: String,
    },
    /// An underlying quadrature failed.
    #[error(transparent)]
    Quadrature(#[from] crate::quad::QuadError),
}

/// Tolerance settings for special functions that integrate internally.
#[derive(Clone, Copy, Debug)]
pub struct SpecialFnConfig {
    rel_tol: f64,
    max_quadrature_nodes: usize,
}

impl SpecialFnConfig {
    /// Requires `0 < rel_tol < 1e-3` and a node budget of at least one
    /// 15-point panel.
    pub fn new(rel_tol: f64, max_quadrature_nodes: usize) -> Result<Self, SpecialFnError> {
        if !(rel_tol > 0.0 && rel_tol < 1e-3) {
            return Err(SpecialFnError::Domain {
                function: "SpecialFnConfig",
                message: format!("rel_tol must lie in (0, 1e-3), got {rel_tol}"),
            });
        }
        if max_quadrature_nodes < 15 {
            return Err(SpecialFnError::Domain {
                function: "SpecialFnConfig",
                message: format!("need at least 15 quadrature nodes, got {max_quadrature_nodes}"),
            });
        }
        Ok(Self {
            rel_tol,
            max_quadrature_nodes,
        })
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn max_quadrature_nodes(&self) -> usize {
        self.max_quadrature_nodes
    }
}

impl Default for SpecialFnConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_quadrature_nodes: 30720,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(SpecialFnConfig::new(1e-10, 1500).is_ok());
        assert!(SpecialFnConfig::new(0.0, 1500).is_err());
        assert!(SpecialFnConfig::new(1e-2, 1500).is_err());
        assert!(SpecialFnConfig::new(-1e-12, 1500).is_err());
        assert!(SpecialFnConfig::new(1e-10, 10).is_err());
        let d = SpecialFnConfig::default();
        assert_eq!(d.rel_tol(), 1e-12);
        assert!(d.max_quadrature_nodes() >= 15);
    }
}
