//! Timings for the numeric kernels on the hot paths: special functions
//! called per CDF evaluation, distance-law evaluation and construction,
//! connectivity probabilities, and the Euler sampler.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use hoversim_core::connectivity::{
    pconn_numeric, pconn_partial_gamma2, pconn_series_gamma2, pconn_series_gamma4,
};
use hoversim_core::sde::sample_steady_state;
use hoversim_core::special;
use hoversim_core::{
    AsymmetricModel, AxisParams, ConnectivitySpec, ControlLaw, Lambdas, RadialDistribution,
    SdeModel, SimConfig, SymmetricModel,
};

const FIG6_XY: f64 = 0.504545454545;
const FIG6_Z: f64 = 0.009545454545;

fn bench_special(c: &mut Criterion) {
    let mut g = c.benchmark_group("special");
    g.bench_function("erf", |b| b.iter(|| special::erf(black_box(0.7))));
    g.bench_function("erfcx", |b| b.iter(|| special::erfcx(black_box(2.3))));
    g.bench_function("dawson", |b| b.iter(|| special::dawson(black_box(1.4))));
    g.bench_function("reg_lower_gamma", |b| {
        b.iter(|| special::reg_lower_gamma(black_box(2.5), black_box(1.8)).unwrap())
    });
    g.bench_function("ln_pcf_scaled", |b| {
        b.iter(|| special::ln_pcf_scaled(black_box(-2.5), black_box(1.2)).unwrap())
    });
    g.finish();
}

fn bench_distance_laws(c: &mut Criterion) {
    let lambdas = Lambdas::new(1.095, 0.75, 0.495).unwrap();
    let (mixture, _) = RadialDistribution::quadratic_form_series(&lambdas, 1e-10).unwrap();
    let partial = RadialDistribution::partial_symmetry(FIG6_XY, FIG6_Z).unwrap();
    let oc = SymmetricModel::new(ControlLaw::on_off(1.0, 1.0).unwrap(), 1.0).unwrap();
    let general = RadialDistribution::general(oc).unwrap();

    let mut g = c.benchmark_group("distance-law");
    g.bench_function("mixture-build", |b| {
        b.iter(|| RadialDistribution::quadratic_form_series(black_box(&lambdas), 1e-10).unwrap())
    });
    g.bench_function("mixture-cdf", |b| b.iter(|| mixture.cdf(black_box(1.5)).unwrap()));
    g.bench_function("two-variance-cdf", |b| {
        b.iter(|| partial.cdf(black_box(1.5)).unwrap())
    });
    g.bench_function("general-quadrature-cdf", |b| {
        b.iter(|| general.cdf(black_box(1.5)).unwrap())
    });
    g.finish();
}

fn bench_connectivity(c: &mut Criterion) {
    let lambdas = Lambdas::new(1.095, 0.75, 0.495).unwrap();
    let spec2 = ConnectivitySpec::new(2.0, 1.0).unwrap();
    let spec3 = ConnectivitySpec::new(3.0, 1.0).unwrap();
    let spec4 = ConnectivitySpec::new(4.0, 1.0).unwrap();
    let partial = RadialDistribution::partial_symmetry(FIG6_XY, FIG6_Z).unwrap();

    let mut g = c.benchmark_group("connectivity");
    g.bench_function("series-g2", |b| {
        b.iter(|| pconn_series_gamma2(black_box(&lambdas), &spec2, 1e-10).unwrap())
    });
    g.bench_function("series-g4", |b| {
        b.iter(|| pconn_series_gamma4(black_box(&lambdas), &spec4, 1e-10).unwrap())
    });
    g.bench_function("two-variance-g2", |b| {
        b.iter(|| pconn_partial_gamma2(black_box(FIG6_XY), FIG6_Z, &spec2).unwrap())
    });
    g.bench_function("quadrature-g3", |b| {
        b.iter(|| pconn_numeric(black_box(&partial), &spec3).unwrap())
    });
    g.finish();
}

fn bench_sampler(c: &mut Criterion) {
    let symmetric = SdeModel::Symmetric(
        SymmetricModel::new(ControlLaw::ou(1.0).unwrap(), 1.0).unwrap(),
    );
    let axes = [1.3, 1.0, 0.7].map(|s| AxisParams::new(1.0, s, 1.0, 1.0).unwrap());
    let asymmetric = SdeModel::AsymmetricOu(AsymmetricModel::new(axes));

    let mut g = c.benchmark_group("sampler");
    // each iteration integrates roughly a million Euler steps
    g.sample_size(10);
    g.bench_function("symmetric-500-samples", |b| {
        let config = SimConfig {
            dt: 1e-3,
            burn_in: 10.0,
            sample_interval: 2.0,
            n_samples: 500,
            seed: 1,
        };
        b.iter(|| sample_steady_state(black_box(&symmetric), &config).unwrap())
    });
    g.bench_function("asymmetric-500-samples", |b| {
        let config = SimConfig {
            dt: 1e-3,
            burn_in: 10.0,
            sample_interval: 2.0,
            n_samples: 500,
            seed: 1,
        };
        b.iter(|| sample_steady_state(black_box(&asymmetric), &config).unwrap())
    });
    g.finish();
}

criterion_group!(
    kernels,
    bench_special,
    bench_distance_laws,
    bench_connectivity,
    bench_sampler
);
criterion_main!(kernels);
