//! Complex dilogarithm and the Bloch-Wigner function.
//!
//! `li2` is the principal branch of the dilogarithm with its cut on `[1, ∞)`.
//! Points on the cut are evaluated as limits from above, so `li2(x)` for a
//! real `x > 1` has imaginary part `+π log x`.
//!
//! Evaluation strategy:
//!
//! * `|z| <= 1/2`: the defining power series `Σ z^k / k²`.
//! * `|z| <= 1`, `Re z <= 1/2`: the Bernoulli series in `u = -log(1 - z)`,
//!   `Li₂(z) = Σ B_n u^{n+1} / (n+1)!`, which converges for `|u| < 2π` and
//!   covers the neighbourhood of `e^{±iπ/3}` that no anharmonic image of `z`
//!   can move into the disk of radius 1/2.
//! * `|z| <= 1`, `Re z > 1/2`: reflection `Li₂(z) = π²/6 - log z log(1-z) - Li₂(1-z)`.
//! * `|z| > 1`: inversion `Li₂(z) = -π²/6 - ½ log²(-z) - Li₂(1/z)`.
//!
//! `bw_unit_circle` evaluates `D(e^{iθ})` through the Clausen expansion
//! around `θ = 0`, independently of `li2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

/// Absolute accuracy promised by [`bloch_wigner`].
pub const BW_ABS_TOL: f64 = 1e-12;

const PI2_6: f64 = PI * PI / 6.0;

/// `B_{2k} / (2k+1)!` for `k = 1..=20`.
const LI2_BERNOULLI: [f64; 20] = [
    2.777_777_777_777_777_8e-2,
    -2.777_777_777_777_777_8e-4,
    4.724_111_866_969_009_826_2e-6,
    -9.185_773_074_661_963_550_9e-8,
    1.897_886_998_897_099_907_2e-9,
    -4.064_761_645_144_225_526_8e-11,
    8.921_691_020_456_452_555_2e-13,
    -1.993_929_586_072_107_568_7e-14,
    4.518_980_029_619_918_191_7e-16,
    -1.035_651_761_218_124_701_4e-17,
    2.395_218_621_026_186_745_7e-19,
    -5.581_785_874_325_009_336_3e-21,
    1.309_150_755_418_321_285_8e-22,
    -3.087_419_802_426_740_293_2e-24,
    7.315_975_652_702_203_420_4e-26,
    -1.740_845_657_234_000_741e-27,
    4.157_635_644_613_899_719_6e-29,
    -9.962_148_488_284_622_103_2e-31,
    2.394_034_424_896_165_300_5e-32,
    -5.768_347_355_367_390_084_3e-34,
];

/// `|B_{2k}| / (2k (2k+1)!)` for `k = 1..=30`.
const CLAUSEN_BERNOULLI: [f64; 30] = [
    1.388_888_888_888_888_888_9e-2,
    6.944_444_444_444_444_444_4e-5,
    7.873_519_778_281_683_043_6e-7,
    1.148_221_634_332_745_443_9e-8,
    1.897_886_998_897_099_907_2e-10,
    3.387_301_370_953_521_272_3e-12,
    6.372_636_443_183_180_396_6e-14,
    1.246_205_991_295_067_230_5e-15,
    2.510_544_460_899_954_550_9e-17,
    5.178_258_806_090_623_507_2e-19,
    1.088_735_736_830_084_884_4e-20,
    2.325_744_114_302_087_223_5e-22,
    5.035_195_213_147_389_560_8e-24,
    1.102_649_929_438_121_533_3e-25,
    2.438_658_550_900_734_473_5e-27,
    5.440_142_678_856_252_315_6e-29,
    1.222_834_013_121_735_211_7e-30,
    2.767_263_468_967_950_584_2e-32,
    6.300_090_591_832_013_948_7e-34,
    1.442_086_838_841_847_521_1e-35,
    3.317_093_999_159_542_804_4e-37,
    7.663_913_557_920_657_887_4e-39,
    1.777_871_473_383_065_787_3e-40,
    4.139_605_898_234_137_344_9e-42,
    9.671_557_036_081_101_792_6e-44,
    2.266_718_701_676_612_370_5e-45,
    5.327_956_311_328_253_972_2e-47,
    1.255_724_838_956_433_574_1e-48,
    2.967_000_542_247_094_188_1e-50,
    7.026_787_317_600_742_486_1e-52,
];

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SpecFunError {
    #[error("non-finite argument {re} + {im}i")]
    NonFinite { re: f64, im: f64 },
}

/// Value of `D(z)` with a rounding-level error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BWResult {
    pub value: f64,
    pub abs_error_bound: f64,
}

fn check_finite(z: Complex64) -> Result<(), SpecFunError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(SpecFunError::NonFinite { re: z.re, im: z.im })
    }
}

/// Principal-branch dilogarithm.
pub fn li2(z: Complex64) -> Result<Complex64, SpecFunError> {
    check_finite(z)?;
    Ok(li2_finite(z))
}

fn li2_finite(z: Complex64) -> Complex64 {
    // A signed zero on the real axis would select the lower side of the cut.
    let z = if z.im == 0.0 { Complex64::new(z.re, 0.0) } else { z };
    if z.re == 0.0 && z.im == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if z.re == 1.0 && z.im == 0.0 {
        return Complex64::new(PI2_6, 0.0);
    }
    if z.norm_sqr() <= 1.0 {
        li2_unit_disk(z)
    } else {
        let l = (-z).ln();
        -PI2_6 - 0.5 * l * l - li2_unit_disk(z.inv())
    }
}

fn li2_unit_disk(z: Complex64) -> Complex64 {
    if z.norm_sqr() <= 0.25 {
        li2_power_series(z)
    } else if z.re <= 0.5 {
        li2_bernoulli_series(z)
    } else {
        let w = Complex64::new(1.0, 0.0) - z;
        if w.re == 0.0 && w.im == 0.0 {
            return Complex64::new(PI2_6, 0.0);
        }
        let tail = if w.norm_sqr() <= 0.25 {
            li2_power_series(w)
        } else {
            li2_bernoulli_series(w)
        };
        PI2_6 - z.ln() * log1p_complex(-z) - tail
    }
}

fn li2_power_series(z: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut pow = z;
    for k in 1..200u32 {
        let kf = f64::from(k);
        let term = pow / (kf * kf);
        sum += term;
        if term.norm() <= 1e-18 * sum.norm() {
            break;
        }
        pow *= z;
    }
    sum
}

fn li2_bernoulli_series(z: Complex64) -> Complex64 {
    let u = -log1p_complex(-z);
    let u2 = u * u;
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in LI2_BERNOULLI.iter().rev() {
        acc = acc * u2 + c;
    }
    u + u * u2 * acc - 0.25 * u2
}

/// `log(1 + w)` without cancellation for small `|w|`.
fn log1p_complex(w: Complex64) -> Complex64 {
    if w.norm_sqr() > 0.25 {
        return (Complex64::new(1.0, 0.0) + w).ln();
    }
    let re = 0.5 * (2.0 * w.re + w.norm_sqr()).ln_1p();
    let im = w.im.atan2(1.0 + w.re);
    Complex64::new(re, im)
}

/// Bloch-Wigner function `D(z) = Im Li₂(z) + arg(1 - z) log|z|`.
///
/// `D` is continuous on the Riemann sphere; the removable points `0` and `1`
/// return exactly `0`.
pub fn bloch_wigner(z: Complex64) -> Result<BWResult, SpecFunError> {
    check_finite(z)?;
    if (z.re == 0.0 || z.re == 1.0) && z.im == 0.0 {
        return Ok(BWResult {
            value: 0.0,
            abs_error_bound: 0.0,
        });
    }
    // D(1/z) = -D(z); stay inside the closed unit disk to avoid cancelling
    // two large terms.
    let (w, sign) = if z.norm_sqr() > 1.0 {
        (z.inv(), -1.0)
    } else {
        (z, 1.0)
    };
    let im_li2 = li2_finite(w).im;
    let one_minus = Complex64::new(1.0, 0.0) - w;
    let correction = one_minus.arg() * w.norm().ln();
    let value = sign * (im_li2 + correction);
    let scale = 1.0 + im_li2.abs() + correction.abs();
    Ok(BWResult {
        value,
        abs_error_bound: 16.0 * f64::EPSILON * scale,
    })
}

/// `D(e^{iθ}) = Σ sin(nθ)/n²`, the Clausen function `Cl₂(θ)`.
pub fn bw_unit_circle(theta: f64) -> Result<f64, SpecFunError> {
    if !theta.is_finite() {
        return Err(SpecFunError::NonFinite { re: theta, im: 0.0 });
    }
    let two_pi = 2.0 * PI;
    let mut r = theta - two_pi * (theta / two_pi).round();
    if r > PI {
        r -= two_pi;
    } else if r <= -PI {
        r += two_pi;
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let a = r.abs();
    let a2 = a * a;
    let mut acc = 0.0;
    for &c in CLAUSEN_BERNOULLI.iter().rev() {
        acc = acc * a2 + c;
    }
    let value = a - a * a.ln() + a * a2 * acc;
    Ok(value.copysign(r))
}

/// `D(e^{2πi/m})`, the per-order contribution in the Liouville and volume formulas.
///
/// Exactly zero for `m ≤ 2`, where `e^{2πi/m}` is real.
pub fn bw_root_of_unity(m: u32) -> f64 {
    if m <= 2 {
        return 0.0;
    }
    bw_unit_circle(2.0 * PI / f64::from(m)).unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CATALAN: f64 = 0.915_965_594_177_219;
    const D_CUBE_ROOT: f64 = 0.676_627_737_606_435_8;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Σ 1/n² with an Euler-Maclaurin tail.
    fn zeta2_oracle() -> f64 {
        let n = 100_000u64;
        let mut s = 0.0;
        for k in (1..=n).rev() {
            let k = k as f64;
            s += 1.0 / (k * k);
        }
        let nf = n as f64;
        s + 1.0 / nf - 1.0 / (2.0 * nf * nf) + 1.0 / (6.0 * nf * nf * nf)
    }

    /// Σ z^k/k² summed to machine precision; only valid well inside the disk.
    fn direct_series(z: Complex64) -> Complex64 {
        let mut s = c(0.0, 0.0);
        let mut p = z;
        for k in 1..20_000u32 {
            let kf = f64::from(k);
            s += p / (kf * kf);
            p *= z;
            if p.norm() < 1e-300 {
                break;
            }
        }
        s
    }

    /// Σ sin(nθ)/n² with θ = 2π/3, grouped in blocks of three, plus tail.
    fn cube_root_sine_oracle() -> f64 {
        let half_sqrt3 = 3f64.sqrt() / 2.0;
        let mut s = 0.0;
        for k in (0..2_000_000u64).rev() {
            let a = 3.0 * k as f64 + 1.0;
            let b = a + 1.0;
            s += 1.0 / (a * a) - 1.0 / (b * b);
        }
        half_sqrt3 * s
    }

    fn catalan_oracle() -> f64 {
        let mut s = 0.0;
        for k in (0..2_000_000u64).rev() {
            let a = 4.0 * k as f64 + 1.0;
            let b = a + 2.0;
            s += 1.0 / (a * a) - 1.0 / (b * b);
        }
        s
    }

    #[test]
    fn li2_reference_points() {
        assert_eq!(li2(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        let z2 = zeta2_oracle();
        assert!((li2(c(1.0, 0.0)).unwrap().re - z2).abs() < 1e-14);
        assert!((z2 - 1.644_934_066_848_226_4).abs() < 1e-14);

        // alternating series: Li₂(-1) = -η(2) = -ζ(2)/2
        let mut eta = 0.0;
        for k in (1..=200_000u64).rev() {
            let kf = k as f64;
            eta += if k % 2 == 1 { 1.0 } else { -1.0 } / (kf * kf);
        }
        // averaging consecutive partial sums halves the alternating tail
        eta += 0.5 / (200_001.0f64 * 200_001.0);
        let v = li2(c(-1.0, 0.0)).unwrap();
        assert!((v.re + eta).abs() < 1e-11);
        assert!((v.re + 0.822_467_033_424_113_2).abs() < 1e-15);

        let half = li2(c(0.5, 0.0)).unwrap();
        assert!((half.re - direct_series(c(0.5, 0.0)).re).abs() < 1e-15);
        assert!((half.re - 0.582_240_526_465_012_5).abs() < 1e-15);
    }

    #[test]
    fn li2_matches_direct_series_inside_disk() {
        let pts = [
            c(0.3, 0.4),
            c(-0.7, 0.2),
            c(0.6, -0.6),
            c(0.5, 0.8),
            c(-0.1, -0.9),
            c(0.8, 0.1),
            c(0.49, 0.86),
        ];
        for z in pts {
            let got = li2(z).unwrap();
            let want = direct_series(z);
            assert!(
                (got - want).norm() <= 1e-13 * want.norm(),
                "z={z} got={got} want={want}"
            );
        }
    }

    #[test]
    fn li2_quadrature_free_reference_value() {
        // mpmath polylog(2, 0.3+0.4j)
        let v = li2(c(0.3, 0.4)).unwrap();
        assert!((v - c(0.266_596_866_742_740_4, 0.461_362_891_819_108_97)).norm() < 1e-15);
    }

    #[test]
    fn li2_cut_is_continuous_from_above() {
        for x in [1.5, 3.0, 10.0, 1e6] {
            let on = li2(c(x, 0.0)).unwrap();
            let above = li2(c(x, 1e-13)).unwrap();
            let negzero = li2(c(x, -0.0)).unwrap();
            assert!((on - above).norm() < 1e-9, "x={x}");
            assert_eq!(on, negzero);
            assert!((on.im - PI * x.ln()).abs() < 1e-12 * (1.0 + x.ln()));
        }
    }

    #[test]
    fn li2_functional_equations() {
        let pts = [c(2.0, 3.0), c(-4.0, 0.5), c(0.5, 0.5), c(1.2, -0.3), c(0.5, 0.866)];
        for z in pts {
            let one = c(1.0, 0.0);
            let refl = li2(z).unwrap() + li2(one - z).unwrap();
            let want = PI2_6 - z.ln() * (one - z).ln();
            assert!((refl - want).norm() < 1e-13, "reflection z={z}");

            let l = (-z).ln();
            let inv = li2(z).unwrap() + li2(z.inv()).unwrap();
            assert!((inv + PI2_6 + 0.5 * l * l).norm() < 1e-13, "inversion z={z}");
        }
    }

    #[test]
    fn li2_rejects_non_finite() {
        assert!(li2(c(f64::NAN, 0.0)).is_err());
        assert!(li2(c(0.0, f64::INFINITY)).is_err());
        assert!(bloch_wigner(c(f64::NAN, 1.0)).is_err());
        assert!(bw_unit_circle(f64::INFINITY).is_err());
    }

    #[test]
    fn bloch_wigner_reference_values() {
        assert_eq!(bloch_wigner(c(-1.0, 0.0)).unwrap().value, 0.0);
        assert_eq!(bloch_wigner(c(0.5, 0.0)).unwrap().value, 0.0);
        assert_eq!(bloch_wigner(c(0.0, 0.0)).unwrap().value, 0.0);
        assert_eq!(bloch_wigner(c(1.0, 0.0)).unwrap().value, 0.0);

        let cat = catalan_oracle();
        assert!((cat - CATALAN).abs() < 1e-12);
        let di = bloch_wigner(c(0.0, 1.0)).unwrap();
        assert!((di.value - cat).abs() < 1e-12);
        assert!(di.abs_error_bound <= BW_ABS_TOL);

        let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        let oracle = cube_root_sine_oracle();
        assert!((oracle - D_CUBE_ROOT).abs() < 1e-12);
        assert!((bloch_wigner(w).unwrap().value - oracle).abs() < 1e-12);
    }

    #[test]
    fn unit_circle_reference_values() {
        assert!(bw_unit_circle(PI).unwrap().abs() < 1e-15);
        assert_eq!(bw_unit_circle(0.0).unwrap(), 0.0);
        assert!((bw_unit_circle(PI / 2.0).unwrap() - CATALAN).abs() < 1e-15);
        assert!((bw_root_of_unity(3) - D_CUBE_ROOT).abs() < 1e-15);
        assert!(bw_root_of_unity(2).abs() < 1e-15);
    }

    #[test]
    fn unit_circle_partial_sums_within_tail_bound() {
        for theta in [0.1, 1.0, 2.0, 3.0, -2.5, 5.0] {
            let d = bw_unit_circle(theta).unwrap();
            let mut partial = 0.0;
            for n in 1..=2000u32 {
                let nf = f64::from(n);
                partial += (nf * theta).sin() / (nf * nf);
                if n >= 10 {
                    assert!((d - partial).abs() <= 1.0 / nf, "theta={theta} n={n}");
                }
            }
        }
    }

    #[test]
    fn unit_circle_agrees_with_bloch_wigner() {
        for k in 0..200 {
            let theta = -7.0 + 0.07 * f64::from(k);
            let a = bw_unit_circle(theta).unwrap();
            let b = bloch_wigner(Complex64::from_polar(1.0, theta)).unwrap().value;
            assert!((a - b).abs() < 1e-12, "theta={theta} {a} {b}");
        }
    }
}
