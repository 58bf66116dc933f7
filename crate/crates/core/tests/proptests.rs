//! Randomized invariants: shape and consistency properties that must
//! hold across whole parameter ranges, not just at frozen points.

use hoversim_core::connectivity::{pconn_series_gamma2, ConnectivitySpec};
use hoversim_core::models::{
    lambda_from_axis, lyapunov_residual, lyapunov_solve, AxisParams, ControlLaw, Lambdas,
};
use hoversim_core::sde::{empirical_cdf, SampleQuantity, State3D};
use hoversim_core::special::{chi2_cdf, dawson, erf, erfc, reg_lower_gamma};
use hoversim_core::steady_state::{
    cdf_ou, partial_symmetry_cdf, quadratic_form_cdf, RadialDistribution,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn erf_is_odd_bounded_and_monotone(x in -6.0f64..6.0, dx in 0.0f64..1.0) {
        prop_assert!((erf(-x) + erf(x)).abs() <= 1e-15);
        prop_assert!((-1.0..=1.0).contains(&erf(x)));
        // past |x| ~ 5.9 the complement drops under half an ulp of 1
        // and erf correctly rounds to exactly +/-1
        if x.abs() <= 5.5 {
            prop_assert!(erf(x).abs() < 1.0);
        }
        prop_assert!(erf(x + dx) >= erf(x));
    }

    #[test]
    fn erf_and_erfc_complement_each_other(x in -6.0f64..6.0) {
        prop_assert!((erf(x) + erfc(x) - 1.0).abs() <= 1e-14);
        prop_assert!(erfc(x) >= 0.0);
        prop_assert!(1.0 - erf(x) >= 0.0);
    }

    #[test]
    fn incomplete_gamma_grows_with_its_argument(
        s in 0.5f64..20.0,
        x in 0.0f64..50.0,
        dx in 0.0f64..5.0,
    ) {
        let lo = reg_lower_gamma(s, x).unwrap();
        let hi = reg_lower_gamma(s, x + dx).unwrap();
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!(hi >= lo - 1e-13);
    }

    #[test]
    fn dawson_satisfies_its_differential_equation(x in -6.0f64..6.0) {
        // F' = 1 - 2xF, checked with a central difference
        let h = 1e-5;
        let fd = (dawson(x + h) - dawson(x - h)) / (2.0 * h);
        let rhs = 1.0 - 2.0 * x * dawson(x);
        prop_assert!((fd - rhs).abs() <= 1e-6 * (1.0 + rhs.abs()));
    }

    #[test]
    fn potential_starts_at_zero_and_never_decreases(
        kind in 0usize..4,
        a in 0.1f64..5.0,
        b in 0.0f64..3.0,
        r1 in 0.0f64..8.0,
        r2 in 0.0f64..8.0,
    ) {
        let law = match kind {
            0 => ControlLaw::ou(a).unwrap(),
            1 => ControlLaw::on_off(a, b).unwrap(),
            2 => ControlLaw::piecewise_linear(vec![
                (0.0, 0.0),
                (1.0, a),
                (1.0 + b.max(0.1), a * 0.5),
                (4.0, a + b),
            ])
            .unwrap(),
            _ => ControlLaw::custom(move |r| a * r / (1.0 + b * r), 10.0).unwrap(),
        };
        prop_assert_eq!(law.potential(0.0), 0.0);
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let (p_lo, p_hi) = (law.potential(lo), law.potential(hi));
        prop_assert!(p_lo.is_finite() && p_hi.is_finite());
        // the custom variant integrates numerically; give it quadrature
        // headroom
        prop_assert!(p_hi >= p_lo - 1e-10 * (1.0 + p_hi.abs()));
    }

    #[test]
    fn axis_variance_agrees_with_the_covariance_solve(
        alpha in 0.05f64..20.0,
        sigma in 0.05f64..5.0,
        beta in 0.05f64..20.0,
        s in 0.0f64..5.0,
    ) {
        let axis = AxisParams::new(alpha, sigma, beta, s).unwrap();
        let lambda = lambda_from_axis(&axis);
        let cov = lyapunov_solve(&axis).unwrap();
        let scale = lambda.abs().max(1.0);
        prop_assert!((lambda - cov.s11).abs() <= 1e-12 * scale);
        prop_assert!((cov.s22 - s * s / (2.0 * beta)).abs() <= 1e-12 * (1.0 + cov.s22.abs()));
        prop_assert!(lyapunov_residual(&axis, &cov) <= 1e-12 * scale.max(sigma * sigma));
        // the error feed can only widen the hover cloud, and by at most
        // its own stationary variance
        let floor = sigma * sigma / (2.0 * alpha);
        let ceil = floor + s * s / (2.0 * beta);
        prop_assert!(lambda >= floor - 1e-14 * scale);
        prop_assert!(lambda <= ceil + 1e-14 * scale);
    }

    #[test]
    fn series_collapses_onto_the_two_variance_closed_form(
        plane in 0.1f64..2.0,
        axis_ratio in 0.05f64..5.0,
    ) {
        let vertical = plane * axis_ratio;
        let lambdas = Lambdas::new(plane, plane, vertical).unwrap();
        let spread = plane.max(vertical).sqrt();
        for frac in [0.4, 0.9, 1.6] {
            let r = frac * 2.0 * spread;
            let (series, diag) = quadratic_form_cdf(&lambdas, r, 1e-9).unwrap();
            prop_assert!(diag.tail_bound <= 1e-9);
            let closed = partial_symmetry_cdf(plane, vertical, r);
            prop_assert!(
                (series - closed).abs() <= 1e-7,
                "r = {}: {} vs {}",
                r,
                series,
                closed
            );
        }
    }

    #[test]
    fn linear_law_is_a_three_dof_chi_square(
        alpha in 0.05f64..10.0,
        sigma in 0.05f64..4.0,
        r in 0.0f64..10.0,
    ) {
        let direct = cdf_ou(alpha, sigma, r);
        let via_chi2 = chi2_cdf(3, 2.0 * alpha * r * r / (sigma * sigma)).unwrap();
        prop_assert!((direct - via_chi2).abs() <= 1e-12);
    }

    #[test]
    fn vertical_heavy_exponents_stay_dominated(
        lambda_xy in 0.01f64..2.0,
        excess in 1.001f64..100.0,
        r in 0.01f64..6.0,
    ) {
        // the two exponents fed to the scaled-erfi evaluation: their
        // difference collapses to -r^2/(2 lambda_z), so the growing
        // exponential can never win
        let lambda_z = lambda_xy * excess;
        let d = lambda_z - lambda_xy;
        let a = r * r / (2.0 * lambda_xy);
        let b = r * r * d / (2.0 * lambda_xy * lambda_z);
        prop_assert!(b <= a);
        let fused = b - a;
        let direct = -r * r / (2.0 * lambda_z);
        prop_assert!((fused - direct).abs() <= 1e-12 * a.max(1.0));
        // and the branch value it feeds is a probability
        let f = partial_symmetry_cdf(lambda_xy, lambda_z, r);
        prop_assert!((0.0..=1.0).contains(&f));
    }

    #[test]
    fn drift_field_cross_partials_are_symmetric(
        c1 in 0.2f64..3.0,
        c2 in 0.0f64..2.0,
        px in -3.0f64..3.0,
        py in -3.0f64..3.0,
        pz in -3.0f64..3.0,
    ) {
        // a restoring drift must be a potential gradient; its Jacobian
        // is then symmetric
        let p = [px, py, pz];
        let r0 = (px * px + py * py + pz * pz).sqrt();
        prop_assume!(r0 > 0.3);
        let law = ControlLaw::custom(move |r| c1 * r + c2 * r * r / (1.0 + r), 50.0).unwrap();
        let sigma2 = 1.5f64;
        let field = |q: [f64; 3], i: usize| {
            let r = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]).sqrt();
            -2.0 * law.velocity(r) * q[i] / (sigma2 * r)
        };
        let h = 1e-4;
        for i in 0..3 {
            for j in (i + 1)..3 {
                let mut up = p;
                let mut dn = p;
                up[j] += h;
                dn[j] -= h;
                let dij = (field(up, i) - field(dn, i)) / (2.0 * h);
                let mut up2 = p;
                let mut dn2 = p;
                up2[i] += h;
                dn2[i] -= h;
                let dji = (field(up2, j) - field(dn2, j)) / (2.0 * h);
                prop_assert!(
                    (dij - dji).abs() <= 1e-5 * (1.0 + dij.abs()),
                    "axes ({}, {}): {} vs {}",
                    i,
                    j,
                    dij,
                    dji
                );
            }
        }
    }

    #[test]
    fn connection_length_scale_roundtrips(
        gamma_ix in 0usize..3,
        b in 0.05f64..50.0,
    ) {
        let gamma = [2.0, 3.0, 4.0][gamma_ix];
        let spec = ConnectivitySpec::from_length_scale(gamma, b).unwrap();
        prop_assert!((spec.b() - b).abs() <= 1e-12 * b);
        prop_assert!((spec.snr_ratio() - b.powf(-gamma)).abs() <= 1e-12 * spec.snr_ratio());
    }

    #[test]
    fn connection_probability_is_monotone_in_the_threshold(
        l1 in 0.05f64..2.0,
        l2 in 0.05f64..2.0,
        l3 in 0.05f64..2.0,
        snr in 0.01f64..100.0,
        factor in 1.05f64..4.0,
    ) {
        let lambdas = Lambdas::new(l1, l2, l3).unwrap();
        let p_lo = pconn_series_gamma2(&lambdas, &ConnectivitySpec::new(2.0, snr).unwrap(), 1e-9)
            .unwrap();
        let p_hi = pconn_series_gamma2(
            &lambdas,
            &ConnectivitySpec::new(2.0, snr * factor).unwrap(),
            1e-9,
        )
        .unwrap();
        prop_assert!((0.0..=1.0).contains(&p_lo));
        prop_assert!(p_hi <= p_lo + 1e-12);
    }

    #[test]
    fn empirical_cdf_is_a_distribution_function(
        values in prop::collection::vec(-1e3f64..1e3, 1..200),
        grid_seed in prop::collection::vec(-1.2e3f64..1.2e3, 2..40),
    ) {
        let samples: Vec<State3D> = values
            .iter()
            .map(|&v| State3D { x: v, ..State3D::ORIGIN })
            .collect();
        let mut grid = grid_seed;
        grid.sort_by(f64::total_cmp);
        let cdf = empirical_cdf(&samples, SampleQuantity::X, &grid).unwrap();
        let mut last = 0.0;
        for &v in &cdf {
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert!(v >= last);
            last = v;
        }
        prop_assert!(cdf[cdf.len() - 1] <= 1.0);
    }

    #[test]
    fn mixture_series_reports_honest_convergence(
        l1 in 0.05f64..2.0,
        l2 in 0.05f64..2.0,
        l3 in 0.05f64..2.0,
    ) {
        let lambdas = Lambdas::new(l1, l2, l3).unwrap();
        let (dist, diag) = RadialDistribution::quadratic_form_series(&lambdas, 1e-8).unwrap();
        prop_assert!(diag.tail_bound <= 1e-8);
        prop_assert!(diag.terms_used <= 10_000);
        prop_assert!(diag.eta_used > 0.0 && diag.eta_used <= lambdas.min() * 1.9 + 1e-15);
        let spread = lambdas.max().sqrt();
        let mut prev = 0.0;
        for i in 0..=20 {
            let r = 4.0 * spread * i as f64 / 20.0;
            let f = dist.cdf(r).unwrap();
            prop_assert!((0.0..=1.0).contains(&f));
            prop_assert!(f >= prev - 1e-11);
            prev = f;
        }
    }
}

#[test]
fn axis_variance_bounds_are_tight_at_extreme_rate_ratios() {
    // beta/alpha = 1e6: the error process is too fast to matter and the
    // variance sits on its no-error floor; 1e-6: the error rides along
    // fully and the variance reaches the ceiling
    let (sigma, s) = (1.2, 0.8);
    let fast = AxisParams::new(1.0, sigma, 1e6, s).unwrap();
    let floor = sigma * sigma / 2.0;
    let gap_fast = s * s / (2.0 * 1e6);
    assert!((lambda_from_axis(&fast) - floor) <= gap_fast);
    assert!((lambda_from_axis(&fast) - floor) >= 0.0);

    let slow = AxisParams::new(1.0, sigma, 1e-6, s).unwrap();
    let ceil = floor + s * s / (2.0 * 1e-6);
    let deficit = ceil - lambda_from_axis(&slow);
    assert!(deficit >= 0.0);
    // the miss is the ceiling gap scaled by alpha/(alpha+beta) ~ 1e-6
    assert!(deficit <= 2e-6 * (s * s / (2.0 * 1e-6)));
}
