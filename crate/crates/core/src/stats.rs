//! Small statistics helpers shared by the validation paths.

/// One-sample Kolmogorov-Smirnov statistic of `samples` against a
/// reference CDF: the largest gap between the empirical step function
/// and `cdf`, checked on both sides of every step.
///
/// Sorts the slice in place. Panics on an empty slice or non-finite
/// samples; those indicate an upstream simulation failure.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    assert!(!samples.is_empty(), "KS statistic needs at least one sample");
    samples.sort_unstable_by(|a, b| a.total_cmp(b));
    assert!(
        samples[samples.len() - 1].is_finite() && samples[0].is_finite(),
        "KS statistic got non-finite samples"
    );
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        let below = (i as f64) / n;
        let above = (i as f64 + 1.0) / n;
        d = d.max((f - below).abs()).max((above - f).abs());
    }
    d
}

/// Pearson correlation coefficient of two equal-length series. Returns
/// 0 when either series is constant (no linear association is
/// measurable then).
pub fn pearson_correlation(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "series must have equal length");
    assert!(x.len() >= 2, "correlation needs at least two points");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}
