//! Monte Carlo draws backing the empirical columns of figures and
//! reports: stationary distances, fading gains, and the connected
//! fraction of joint samples.

use hoversim_core::steady_state::DistributionError;
use hoversim_core::{Lambdas, RadialDistribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Exact stationary distances of a Gaussian model: the squared distance
/// is a variance-weighted sum of three squared standard normals, so one
/// draw costs three normals and a square root.
pub fn sample_radii_gaussian(lambdas: &Lambdas, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let [l1, l2, l3] = lambdas.as_array();
    (0..n)
        .map(|_| {
            let w1: f64 = StandardNormal.sample(&mut rng);
            let w2: f64 = StandardNormal.sample(&mut rng);
            let w3: f64 = StandardNormal.sample(&mut rng);
            (l1 * w1 * w1 + l2 * w2 * w2 + l3 * w3 * w3).sqrt()
        })
        .collect()
}

/// Distances drawn through the inverse CDF by bisection. Exact for any
/// law at the cost of ~60 CDF evaluations per draw, so reserve it for
/// laws without a Gaussian representation.
pub fn sample_radii_inverse_cdf(
    dist: &RadialDistribution,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>, DistributionError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let upper = dist.upper_radius();
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let (mut lo, mut hi) = (0.0_f64, upper);
            // 60 halvings put the bracket far below any statistical
            // resolution a Monte Carlo column can see
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if dist.cdf(mid)? <= u {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(0.5 * (lo + hi))
        })
        .collect()
}

/// Unit-mean exponential fading gains.
pub fn sample_fading(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            -f64::ln_1p(-u)
        })
        .collect()
}

/// Distances raised to the path-loss exponent, precomputed so a sweep
/// over thresholds reuses them.
pub fn powered_radii(radii: &[f64], gamma: f64) -> Vec<f64> {
    radii.iter().map(|&r| r.powf(gamma)).collect()
}

/// Fraction of joint samples whose faded SNR clears the threshold:
/// connected when `fading > snr_ratio * r^gamma`.
pub fn connected_fraction(powered: &[f64], fading: &[f64], snr_ratio: f64) -> f64 {
    debug_assert_eq!(powered.len(), fading.len());
    let hits = powered
        .iter()
        .zip(fading)
        .filter(|&(&rg, &h)| h > snr_ratio * rg)
        .count();
    hits as f64 / powered.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use hoversim_core::connectivity::{pconn_partial_gamma2, ConnectivitySpec};
    use hoversim_core::stats::ks_statistic;
    use hoversim_core::steady_state::cdf_ou;

    #[test]
    fn gaussian_draws_follow_the_mixture_law() {
        let lambdas = Lambdas::new(1.095, 0.75, 0.495).unwrap();
        let (dist, _) = RadialDistribution::quadratic_form_series(&lambdas, 1e-10).unwrap();
        let mut radii = sample_radii_gaussian(&lambdas, 20_000, 7);
        let ks = ks_statistic(&mut radii, |r| dist.cdf(r).unwrap());
        assert!(ks < 0.015, "ks = {ks}");
    }

    #[test]
    fn bisection_draws_follow_the_target_law() {
        let dist = RadialDistribution::closed_form_ou(1.0, 1.0).unwrap();
        let mut radii = sample_radii_inverse_cdf(&dist, 20_000, 9).unwrap();
        let ks = ks_statistic(&mut radii, |r| cdf_ou(1.0, 1.0, r));
        assert!(ks < 0.015, "ks = {ks}");
    }

    #[test]
    fn connected_fraction_matches_the_closed_form() {
        let (lxy, lz) = (0.5, 0.125);
        let lambdas = Lambdas::new(lxy, lxy, lz).unwrap();
        let n = 200_000;
        let radii = sample_radii_gaussian(&lambdas, n, 11);
        let fading = sample_fading(n, 12);
        let powered = powered_radii(&radii, 2.0);
        for &snr in &[0.1, 1.0, 4.0] {
            let spec = ConnectivitySpec::new(2.0, snr).unwrap();
            let exact = pconn_partial_gamma2(lxy, lz, &spec).unwrap();
            let got = connected_fraction(&powered, &fading, snr);
            let se = (exact * (1.0 - exact) / n as f64).sqrt();
            assert!(
                (got - exact).abs() < 4.0 * se,
                "snr = {snr}: {got} vs {exact} (se {se:.2e})"
            );
        }
    }

    #[test]
    fn draws_are_deterministic_in_the_seed() {
        let lambdas = Lambdas::isotropic(0.5).unwrap();
        assert_eq!(
            sample_radii_gaussian(&lambdas, 100, 3),
            sample_radii_gaussian(&lambdas, 100, 3)
        );
        assert_ne!(
            sample_radii_gaussian(&lambdas, 100, 3),
            sample_radii_gaussian(&lambdas, 100, 4)
        );
        assert_eq!(sample_fading(50, 5), sample_fading(50, 5));
        assert!(sample_fading(50, 5).iter().all(|&h| h >= 0.0));
    }
}
