//! Error function family via the classic SunPro rational approximations
//! (the FreeBSD libm method): piecewise rational fits on [0, 0.84375],
//! [0.84375, 1.25], and two asymptotic ranges in s = 1/x^2.

const ERX: f64 = 8.45062911510467529297e-01;

// erf on [0, 0.84375]
const EFX: f64 = 1.28379167095512586316e-01;
const EFX8: f64 = 1.02703333676410069053e+00;
const PP0: f64 = 1.28379167095512558561e-01;
const PP1: f64 = -3.25042107247001499370e-01;
const PP2: f64 = -2.84817495755985104766e-02;
const PP3: f64 = -5.77027029648944159157e-03;
const PP4: f64 = -2.37630166566501626084e-05;
const QQ1: f64 = 3.97917223959155352819e-01;
const QQ2: f64 = 6.50222499887672944485e-02;
const QQ3: f64 = 5.08130628187576562776e-03;
const QQ4: f64 = 1.32494738004321644526e-04;
const QQ5: f64 = -3.96022827877536812320e-06;

// erf on [0.84375, 1.25], expanded around 1
const PA0: f64 = -2.36211856075265944077e-03;
const PA1: f64 = 4.14856118683748331666e-01;
const PA2: f64 = -3.72207876035701323847e-01;
const PA3: f64 = 3.18346619901161753674e-01;
const PA4: f64 = -1.10894694282396677476e-01;
const PA5: f64 = 3.54783043256182359371e-02;
const PA6: f64 = -2.16637559486879084300e-03;
const QA1: f64 = 1.06420880400844228286e-01;
const QA2: f64 = 5.40397917702171048937e-01;
const QA3: f64 = 7.18286544141962662868e-02;
const QA4: f64 = 1.26171219808761642112e-01;
const QA5: f64 = 1.36370839120290507362e-02;
const QA6: f64 = 1.19844998467991074170e-02;

// erfc correction term on [1.25, 1/0.35], in s = 1/x^2
const RA0: f64 = -9.86494403484714822705e-03;
const RA1: f64 = -6.93858572707181764372e-01;
const RA2: f64 = -1.05586262253232909814e+01;
const RA3: f64 = -6.23753324503260060396e+01;
const RA4: f64 = -1.62396669462573470355e+02;
const RA5: f64 = -1.84605092906711035994e+02;
const RA6: f64 = -8.12874355063065934246e+01;
const RA7: f64 = -9.81432934416914548592e+00;
const SA1: f64 = 1.96512716674392571292e+01;
const SA2: f64 = 1.37657754143519042600e+02;
const SA3: f64 = 4.34565877475229228821e+02;
const SA4: f64 = 6.45387271733267880336e+02;
const SA5: f64 = 4.29008140027567833386e+02;
const SA6: f64 = 1.08635005541779435134e+02;
const SA7: f64 = 6.57024977031928170135e+00;
const SA8: f64 = -6.04244152148580987438e-02;

// erfc correction term on [1/0.35, 28]
const RB0: f64 = -9.86494292470009928597e-03;
const RB1: f64 = -7.99283237680523006574e-01;
const RB2: f64 = -1.77579549177547519889e+01;
const RB3: f64 = -1.60636384855821916062e+02;
const RB4: f64 = -6.37566443368389627722e+02;
const RB5: f64 = -1.02509513161107724954e+03;
const RB6: f64 = -4.83519191608651397019e+02;
const SB1: f64 = 3.03380607434824582924e+01;
const SB2: f64 = 3.25792512996573918826e+02;
const SB3: f64 = 1.53672958608443695994e+03;
const SB4: f64 = 3.19985821950859553908e+03;
const SB5: f64 = 2.55305040643316442583e+03;
const SB6: f64 = 4.74528541206955367215e+02;
const SB7: f64 = -2.24409524465858183362e+01;

const VERY_TINY: f64 = 2.848094538889218e-306;
const TINY: f64 = 1.3877787807814457e-17; // 2^-56
const SMALL: f64 = 3.725290298461914e-9; // 2^-28

fn erf_series(z: f64) -> f64 {
    let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
    let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
    r / s
}

fn erf_mid(s: f64) -> f64 {
    let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
    let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
    p / q
}

// log(erfc(x) * x) + x^2 + 0.5625 as a rational function of s = 1/x^2
fn erfc_log_correction(x: f64) -> f64 {
    let s = 1.0 / (x * x);
    if x < 1.0 / 0.35 {
        let r = RA0 + s * (RA1 + s * (RA2 + s * (RA3 + s * (RA4 + s * (RA5 + s * (RA6 + s * RA7))))));
        let q = 1.0 + s * (SA1 + s * (SA2 + s * (SA3 + s * (SA4 + s * (SA5 + s * (SA6 + s * (SA7 + s * SA8)))))));
        r / q
    } else {
        let r = RB0 + s * (RB1 + s * (RB2 + s * (RB3 + s * (RB4 + s * (RB5 + s * RB6)))));
        let q = 1.0 + s * (SB1 + s * (SB2 + s * (SB3 + s * (SB4 + s * (SB5 + s * (SB6 + s * SB7))))));
        r / q
    }
}

// exp(-x^2 - 0.5625 + correction), split so the x^2 part is computed
// against a truncated-mantissa copy of x to keep the exponent exact.
fn erfc_scaled_tail(x: f64) -> f64 {
    let z = f64::from_bits(x.to_bits() & 0xffff_ffff_0000_0000);
    let corr = erfc_log_correction(x);
    f64::exp(-z * z - 0.5625) * f64::exp((z - x) * (z + x) + corr) / x
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return -1.0;
    }
    let sign = x < 0.0;
    let x = x.abs();
    let result = if x < 0.84375 {
        if x < SMALL {
            if x < VERY_TINY {
                0.125 * (8.0 * x + EFX8 * x)
            } else {
                x + EFX * x
            }
        } else {
            x + x * erf_series(x * x)
        }
    } else if x < 1.25 {
        ERX + erf_mid(x - 1.0)
    } else if x >= 6.0 {
        1.0
    } else {
        1.0 - erfc_scaled_tail(x)
    };
    if sign {
        -result
    } else {
        result
    }
}

/// Complementary error function, accurate in the far tail where
/// `1 - erf(x)` would lose all precision.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    if x == f64::NEG_INFINITY {
        return 2.0;
    }
    let sign = x < 0.0;
    let x = x.abs();
    if x < 0.84375 {
        let temp = if x < TINY {
            x
        } else {
            let y = erf_series(x * x);
            if x < 0.25 {
                x + x * y
            } else {
                0.5 + (x * y + (x - 0.5))
            }
        };
        return if sign { 1.0 + temp } else { 1.0 - temp };
    }
    if x < 1.25 {
        let corr = erf_mid(x - 1.0);
        return if sign { 1.0 + ERX + corr } else { 1.0 - ERX - corr };
    }
    if x < 28.0 {
        if sign && x > 6.0 {
            return 2.0;
        }
        let r = erfc_scaled_tail(x);
        return if sign { 2.0 - r } else { r };
    }
    if sign {
        2.0
    } else {
        0.0
    }
}

/// Scaled complementary error function `exp(x^2) * erfc(x)`.
///
/// Stays representable for large positive `x` (decays like `1/(x sqrt(pi))`)
/// where `erfc` itself underflows.
pub fn erfcx(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        // erfc(x) = 2 - erfc(-x); overflows to infinity below x ~ -26.6
        return 2.0 * f64::exp(x * x) - erfcx(-x);
    }
    if x < 1.25 {
        return f64::exp(x * x) * erfc(x);
    }
    // the exp(-x^2) factors of erfc cancel exactly against the scaling
    f64::exp(erfc_log_correction(x) - 0.5625) / x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erf_reference_values() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(0.5) - 0.5204998778130465).abs() < 1e-15);
        assert!((erf(1.0) - 0.8427007929497149).abs() < 1e-15);
        assert!((erf(2.0) - 0.9953222650189527).abs() < 1e-15);
        assert!((erf(6.0) - 1.0).abs() < 1e-15);
        assert_eq!(erf(f64::INFINITY), 1.0);
        assert_eq!(erf(f64::NEG_INFINITY), -1.0);
        assert!(erf(f64::NAN).is_nan());
    }

    #[test]
    fn erf_is_odd() {
        for &x in &[1e-3, 0.3, 0.9, 1.1, 2.0, 4.5] {
            assert_eq!(erf(-x), -erf(x));
        }
    }

    #[test]
    fn erfc_reference_values() {
        assert_eq!(erfc(0.0), 1.0);
        assert!((erfc(2.0) - 4.677734981047266e-3).abs() < 1e-17);
        assert!((erfc(6.0) - 2.1519736712498913e-17).abs() < 1e-31);
        assert!((erfc(-1.0) - (2.0 - erfc(1.0))).abs() < 1e-15);
        assert_eq!(erfc(30.0), 0.0);
        assert_eq!(erfc(-30.0), 2.0);
    }

    #[test]
    fn complement_consistency() {
        for i in 0..600 {
            let x = -3.0 + i as f64 * 0.01;
            let sum = erf(x) + erfc(x);
            assert!((sum - 1.0).abs() < 2e-15, "x = {x}, erf + erfc = {sum}");
        }
    }

    #[test]
    fn erfcx_reference_values() {
        assert!((erfcx(0.0) - 1.0).abs() < 1e-15);
        assert!((erfcx(1.25) - 0.3678229164523611).abs() < 1e-15);
        assert!((erfcx(10.0) - 0.05614099274382259).abs() < 1e-16);
        // large-argument asymptote 1/(x sqrt(pi))
        let x = 5e7;
        let asym = 1.0 / (x * core::f64::consts::PI.sqrt());
        assert!((erfcx(x) / asym - 1.0).abs() < 1e-9);
    }

    #[test]
    fn erfcx_matches_product_in_moderate_range() {
        for i in 1..60 {
            let x = i as f64 * 0.1;
            let direct = f64::exp(x * x) * erfc(x);
            assert!(
                (erfcx(x) - direct).abs() <= 4e-15 * direct.abs().max(1.0),
                "x = {x}: {} vs {}",
                erfcx(x),
                direct
            );
        }
    }
}
