//! External trajectory ingestion: reads a CSV of recorded positions,
//! re-expresses them relative to a target point, and exposes the
//! per-axis and distance samples for empirical-CDF comparison against
//! the analytic laws.

use std::io;
use std::path::Path;

use hoversim_core::sde::{empirical_cdf, SimError};
use hoversim_core::stats::pearson_correlation;
use hoversim_core::{SampleQuantity, State3D};
use thiserror::Error;

/// Failure modes of trajectory parsing.
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read trajectory: {0}")]
    Io(#[from] io::Error),
    #[error("trajectory has a header but no data rows")]
    Empty,
    #[error("trajectory file is blank")]
    NoHeader,
    #[error("header must name an `{0}` column")]
    MissingColumn(&'static str),
    #[error("row {row}: expected at least {expected} fields, got {got}")]
    ShortRow {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("row {row}: column `{column}` is not a finite number: `{value}`")]
    BadField {
        row: usize,
        column: &'static str,
        value: String,
    },
}

/// Position samples relative to the target, in the same shape the
/// simulator produces (error channels zeroed).
#[derive(Clone, Debug)]
pub struct TrajectorySamples {
    states: Vec<State3D>,
}

impl TrajectorySamples {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[State3D] {
        &self.states
    }

    pub fn values(&self, quantity: SampleQuantity) -> Vec<f64> {
        self.states.iter().map(|s| quantity.extract(s)).collect()
    }

    /// Horizontal distances from the target.
    pub fn planar(&self) -> Vec<f64> {
        self.states
            .iter()
            .map(|s| f64::hypot(s.x, s.y))
            .collect()
    }

    /// Correlation between horizontal distance and vertical offset; near
    /// zero when the horizontal and vertical deviations are independent.
    pub fn planar_vertical_correlation(&self) -> f64 {
        pearson_correlation(&self.planar(), &self.values(SampleQuantity::Z))
    }

    pub fn empirical_cdf(
        &self,
        quantity: SampleQuantity,
        grid: &[f64],
    ) -> Result<Vec<f64>, SimError> {
        empirical_cdf(&self.states, quantity, grid)
    }

    /// Smallest and largest value over all axes and the distance, for
    /// sizing an evaluation grid.
    pub fn value_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for s in &self.states {
            for v in [s.x, s.y, s.z, s.radial_distance()] {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }
}

/// Reads a trajectory CSV from disk. See [`parse_trajectory`].
pub fn load_trajectory(path: &Path, target: [f64; 3]) -> Result<TrajectorySamples, IngestError> {
    parse_trajectory(&std::fs::read_to_string(path)?, target)
}

/// Parses trajectory text: a header row naming `x`, `y`, and `z`
/// columns (any order, extra columns ignored, case-insensitive), then
/// one position per row. Positions are shifted by `-target` so all
/// derived statistics are relative to the intended hover point. Errors
/// cite 1-based file rows.
pub fn parse_trajectory(text: &str, target: [f64; 3]) -> Result<TrajectorySamples, IngestError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or(IngestError::NoHeader)?;
    let names: Vec<String> = header
        .split(',')
        .map(|h| h.trim().to_ascii_lowercase())
        .collect();
    let find = |name: &'static str| {
        names
            .iter()
            .position(|h| h == name)
            .ok_or(IngestError::MissingColumn(name))
    };
    let ix = find("x")?;
    let iy = find("y")?;
    let iz = find("z")?;
    let needed = ix.max(iy).max(iz) + 1;

    let mut states = Vec::new();
    for (idx, line) in lines {
        let row = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < needed {
            return Err(IngestError::ShortRow {
                row,
                expected: needed,
                got: fields.len(),
            });
        }
        let get = |i: usize, column: &'static str| -> Result<f64, IngestError> {
            let raw = fields[i].trim();
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(IngestError::BadField {
                    row,
                    column,
                    value: raw.to_string(),
                }),
            }
        };
        states.push(State3D {
            x: get(ix, "x")? - target[0],
            y: get(iy, "y")? - target[1],
            z: get(iz, "z")? - target[2],
            ..State3D::ORIGIN
        });
    }
    if states.is_empty() {
        return Err(IngestError::Empty);
    }
    Ok(TrajectorySamples { states })
}

#[cfg(test)]
mod tests {
    use super::*;
    use hoversim_core::special::erf;
    use hoversim_core::stats::ks_statistic;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian_csv(n: usize, lambda: f64, offset: [f64; 3], seed: u64) -> String {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sd = lambda.sqrt();
        let mut text = String::from("t,x,y,z,extra\n");
        for i in 0..n {
            let draw = |rng: &mut ChaCha8Rng| -> f64 {
                let w: f64 = StandardNormal.sample(rng);
                sd * w
            };
            let (x, y, z) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
            text.push_str(&format!(
                "{},{},{},{},9\n",
                i,
                x + offset[0],
                y + offset[1],
                z + offset[2]
            ));
        }
        text
    }

    #[test]
    fn synthetic_gaussian_axes_match_the_normal_law() {
        let lambda = 0.4;
        let text = gaussian_csv(10_000, lambda, [0.0; 3], 17);
        let samples = parse_trajectory(&text, [0.0; 3]).unwrap();
        assert_eq!(samples.len(), 10_000);
        let sd = lambda.sqrt();
        let phi = |v: f64| 0.5 * (1.0 + erf(v / (sd * core::f64::consts::SQRT_2)));
        for q in [SampleQuantity::X, SampleQuantity::Y, SampleQuantity::Z] {
            let mut axis = samples.values(q);
            let ks = ks_statistic(&mut axis, phi);
            assert!(ks < 0.02, "{q:?}: ks = {ks}");
        }
        let rho = samples.planar_vertical_correlation();
        assert!(rho.abs() < 0.05, "correlation = {rho}");
    }

    #[test]
    fn target_offset_is_removed_exactly() {
        let centered = gaussian_csv(500, 0.25, [0.0; 3], 23);
        let shifted = gaussian_csv(500, 0.25, [1.0, 1.0, 1.0], 23);
        let a = parse_trajectory(&centered, [0.0; 3]).unwrap();
        let b = parse_trajectory(&shifted, [1.0, 1.0, 1.0]).unwrap();
        for (sa, sb) in a.states().iter().zip(b.states()) {
            assert!((sa.x - sb.x).abs() < 1e-12);
            assert!((sa.y - sb.y).abs() < 1e-12);
            assert!((sa.z - sb.z).abs() < 1e-12);
            assert!((sa.radial_distance() - sb.radial_distance()).abs() < 1e-12);
        }
    }

    #[test]
    fn header_and_row_errors_are_specific() {
        assert!(matches!(
            parse_trajectory("", [0.0; 3]),
            Err(IngestError::NoHeader)
        ));
        assert!(matches!(
            parse_trajectory("x,y,z\n", [0.0; 3]),
            Err(IngestError::Empty)
        ));
        assert!(matches!(
            parse_trajectory("x,y\n1,2\n", [0.0; 3]),
            Err(IngestError::MissingColumn("z"))
        ));
        let err = parse_trajectory("x,y,z\n1,2,3\n1,oops,3\n", [0.0; 3]).unwrap_err();
        match err {
            IngestError::BadField { row, column, value } => {
                assert_eq!(row, 3);
                assert_eq!(column, "y");
                assert_eq!(value, "oops");
            }
            other => panic!("unexpected error {other}"),
        }
        let err = parse_trajectory("x,y,z\n1,2\n", [0.0; 3]).unwrap_err();
        assert!(matches!(err, IngestError::ShortRow { row: 2, .. }), "{err}");
    }

    #[test]
    fn columns_are_located_case_insensitively_in_any_order() {
        let samples = parse_trajectory("Time, Z, Y, X\n0, 3, 2, 1\n", [0.0; 3]).unwrap();
        let s = &samples.states()[0];
        assert_eq!((s.x, s.y, s.z), (1.0, 2.0, 3.0));
        let (lo, hi) = samples.value_range();
        assert_eq!(lo, 1.0);
        assert!((hi - 14.0f64.sqrt()).abs() < 1e-12);
    }
}
