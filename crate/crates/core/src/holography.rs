//! Forms on upper half-space and the renormalized-volume identity.
//!
//! `w₂ = −i/(4t²) dz∧dz̄` is a primitive of the hyperbolic volume form and
//! `(w₁)_{γ⁻¹}` is the transgression with `dw₁ = δw₂`. The conical-axis
//! integral of `w₁` produces the Bloch-Wigner term in the volume; the
//! truncation scans check numerically that the cusp and cone boundary
//! pieces vanish at the advertised rates.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;
use thiserror::Error;

use crate::liouville::{bw_sum, classical_action, euler_characteristic, ratio_to_f64, LiouvilleError, SurfaceSignature};
use crate::moebius::{
    elliptic_from_pair, geodesic_point, jacobian, parabolic_conjugator, EllipticPair, H3Point, MoebiusError, MoebiusMap,
    SpherePoint,
};
use crate::quad::{
    decay_exponent, fit_finite_part, integrate_1d, integrate_1d_breaks, integrate_surface, Correction, FinitePartResult,
    FitError, QuadError, Rect,
};
use crate::specfun::{bw_root_of_unity, li2};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HolographyError {
    #[error("truncation too coarse: delta0 = {delta0}, delta1 = {delta1} (need < 1/4)")]
    EpsTooLarge { delta0: f64, delta1: f64 },
    #[error("order m = {0} not supported here (integration by parts needs m >= 3)")]
    OrderTooSmall(u32),
    #[error("ladder must lie in (0, {max}] and be non-empty")]
    BadLadder { max: f64 },
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Liouville(#[from] LiouvilleError),
}

/// `(w₁)_{γ⁻¹}` at a point: `dz` and `dz̄` coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct W1Sample {
    pub dz_coeff: Complex64,
    pub dzbar_coeff: Complex64,
    pub at: H3Point,
}

impl W1Sample {
    /// Pairing with a tangent vector whose horizontal part is `dz`.
    pub fn contract(&self, dz: Complex64) -> Complex64 {
        self.dz_coeff * dz + self.dzbar_coeff * dz.conj()
    }
}

/// `log(|ct|² J_γ(Z))`, the scalar factor of `w₁`; `None` when `c = 0`.
pub fn w1_scalar(g: &MoebiusMap, p: H3Point) -> Option<f64> {
    if g.c() == ZERO {
        None
    } else {
        Some(((g.c() * p.t).norm_sqr() * jacobian(g, p)).ln())
    }
}

/// `(w₁)_{γ⁻¹} = −(i/8) log(|ct|² J_γ) (γ''/γ' dz − conj(γ''/γ') dz̄)`.
pub fn w1_sample(g: &MoebiusMap, p: H3Point) -> W1Sample {
    let zero = W1Sample {
        dz_coeff: ZERO,
        dzbar_coeff: ZERO,
        at: p,
    };
    let Some(l) = w1_scalar(g, p) else {
        return zero;
    };
    let den = g.c() * p.z + g.d();
    if den == ZERO {
        return zero;
    }
    let r = -2.0 * g.c() / den;
    let k = -I * (l / 8.0);
    W1Sample {
        dz_coeff: k * r,
        dzbar_coeff: -k * r.conj(),
        at: p,
    }
}

/// Principal-value integral of `(w₁)_τ` along the axis of `τ`, from `w₂` to `w₁`.
///
/// The pulled-back integrand has integrable logarithmic singularities at both
/// ends; for `m = 2` it also has a removable point at the apex, which is a
/// break point of the quadrature.
pub fn geodesic_w1_integral(p: &EllipticPair, tol: f64) -> Result<f64, HolographyError> {
    let (tau, _) = elliptic_from_pair(p)?;
    let g = tau.inverse();
    let arc = p.arc();
    let dz = p.w1 - p.w2;
    let r = integrate_1d_breaks(
        |s: f64| match geodesic_point(&arc, s) {
            Ok(pt) => w1_sample(&g, pt).contract(dz),
            Err(_) => ZERO,
        },
        &[0.0, 0.5, 1.0],
        tol,
    )?;
    Ok(r.value.re)
}

/// The axis integral after the change of variables of the pulled-back form,
/// `∫₀¹ −sin β cos β log(4 sin²β (s − s²)) / (cos²β + (2s−1)² sin²β) ds`.
pub fn geodesic_w1_reduced(m: u32, tol: f64) -> Result<f64, HolographyError> {
    if m < 3 {
        return if m == 2 { Ok(0.0) } else { Err(HolographyError::OrderTooSmall(m)) };
    }
    let beta = PI / f64::from(m);
    let (sn, cs) = beta.sin_cos();
    let r = integrate_1d(
        |s: f64| {
            let q = 2.0 * s - 1.0;
            -sn * cs * (4.0 * sn * sn * s * (1.0 - s)).ln() / (cs * cs + q * q * sn * sn)
        },
        0.0,
        1.0,
        tol,
    )?;
    Ok(r.value)
}

/// `Λ(s) = log(((e − ē)s + ē)/((ē − e)s + e))`, `e = e^{iβ}`; purely imaginary.
fn lambda_log(beta: f64, s: f64) -> Complex64 {
    let (sn, cs) = beta.sin_cos();
    I * (2.0 * ((2.0 * s - 1.0) * sn).atan2(cs))
}

/// `∫_{s0}^{s1} f` with `s = e^u` on `[s0, ½]` and `1 − s = e^u` on `[½, s1]`,
/// The integrand receives `(s, 1 − s)`, each computed without cancellation.
fn integrate_log_ends<F: Fn(f64, f64) -> Complex64>(f: F, s0: f64, s1: f64, tol: f64) -> Result<Complex64, QuadError> {
    let h = 0.5f64.ln();
    let left = integrate_1d(
        |u: f64| {
            let s = u.exp();
            f(s, 1.0 - s) * s
        },
        s0.ln(),
        h,
        0.5 * tol,
    )?;
    let right = integrate_1d(
        |u: f64| {
            let r = u.exp();
            f(1.0 - r, r) * r
        },
        (1.0 - s1).ln(),
        h,
        0.5 * tol,
    )?;
    Ok(left.value + right.value)
}

/// Pieces of the truncated axis integral `∫_{δ₀}^{1−δ₁} (w₁)_τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicParts {
    pub delta0: f64,
    pub delta1: f64,
    /// Boundary term `(i/4)[log(|ct|²J) Λ]`.
    pub i: Complex64,
    /// `(i/4) ∫ 2iβ (1/s + 1/(1−s)) ds`.
    pub iii: Complex64,
    /// `(IV) + (V)`, the two dilogarithm integrals.
    pub iv_v: Complex64,
}

impl GeodesicParts {
    /// `(I) + (III)`; the `log ε` divergences cancel here.
    pub fn divergent_pair(&self) -> Complex64 {
        self.i + self.iii
    }

    pub fn total(&self) -> Complex64 {
        self.i + self.iii + self.iv_v
    }
}

/// Truncation parameters `δ₀ = ε² e^{−φ(w₂)}|w₁−w₂|⁻²`, `δ₁ = ε² e^{−φ(w₁)}|w₁−w₂|⁻²`.
pub fn truncation_deltas(p: &EllipticPair, phi1: f64, phi2: f64, eps: f64) -> (f64, f64) {
    let d2 = (p.w1 - p.w2).norm_sqr();
    (eps * eps * (-phi2).exp() / d2, eps * eps * (-phi1).exp() / d2)
}

/// Parts (I), (III), (IV)+(V) of the axis integral truncated at level `ε`.
///
/// (I) is evaluated from the H³ action at the truncation points; the others
/// by quadrature. Requires `m ≥ 3`: for `m = 2` the factor `Λ` jumps at the
/// apex and the integration by parts behind the split does not apply.
pub fn geodesic_w1_parts(
    p: &EllipticPair,
    phi1: f64,
    phi2: f64,
    eps: f64,
    tol: f64,
) -> Result<GeodesicParts, HolographyError> {
    if p.m < 3 {
        return Err(HolographyError::OrderTooSmall(p.m));
    }
    let (delta0, delta1) = truncation_deltas(p, phi1, phi2, eps);
    if !(delta0 < 0.25 && delta1 < 0.25) {
        return Err(HolographyError::EpsTooLarge { delta0, delta1 });
    }
    let beta = p.beta();
    let (tau, _) = elliptic_from_pair(p)?;
    let g = tau.inverse();
    let arc = p.arc();
    let (s0, s1) = (delta0, 1.0 - delta1);

    let boundary = |s: f64| -> Result<Complex64, HolographyError> {
        let pt = geodesic_point(&arc, s)?;
        let l = w1_scalar(&g, pt).unwrap_or(0.0);
        Ok(I * 0.25 * l * lambda_log(beta, s))
    };
    let i = boundary(s1)? - boundary(s0)?;

    let iii = integrate_log_ends(|s, sc| I * 0.25 * (I * 2.0 * beta) * (1.0 / s + 1.0 / sc), s0, s1, tol)?;

    let e2 = Complex64::from_polar(1.0, 2.0 * beta) - 1.0;
    let e2b = e2.conj();
    // difference of principal logs; the log of the quotient would wrap for β > π/4
    let ell = |x: f64| (1.0 + e2 * x).ln() - (1.0 + e2b * x).ln();
    let iv_v = integrate_log_ends(|s, sc| -I * 0.25 * (ell(s) / s + ell(sc) / sc), s0, s1, tol)?;

    Ok(GeodesicParts {
        delta0,
        delta1,
        i,
        iii,
        iv_v,
    })
}

/// Closed-form limit of (IV)+(V): `(i/2)(Li₂(1 − e^{2iβ}) − Li₂(1 − e^{−2iβ}))`.
pub fn iv_v_limit(beta: f64) -> Complex64 {
    let w = Complex64::from_polar(1.0, 2.0 * beta);
    let one = Complex64::new(1.0, 0.0);
    let a = li2(one - w).unwrap_or(ZERO);
    let b = li2(one - w.conj()).unwrap_or(ZERO);
    I * 0.5 * (a - b)
}

/// Least-squares fit of `Re((I) + (III))` against `log ε` on `ladder`.
pub fn divergence_fit(
    p: &EllipticPair,
    phi1: f64,
    phi2: f64,
    ladder: &[f64],
    tol: f64,
) -> Result<FinitePartResult, HolographyError> {
    let mut samples = Vec::with_capacity(ladder.len());
    for &eps in ladder {
        let parts = geodesic_w1_parts(p, phi1, phi2, eps, tol)?;
        samples.push((eps, parts.divergent_pair().re));
    }
    let corrections = [Correction::Power(2), Correction::PowerLog(2), Correction::Power(4)];
    Ok(fit_finite_part(&samples, &corrections, 1e-8)?)
}

/// 2-form `A dz∧dz̄ + B dz∧dt + C dz̄∧dt` at a point of ℍ³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoFormSample {
    pub dz_dzbar: Complex64,
    pub dz_dt: Complex64,
    pub dzbar_dt: Complex64,
}

impl TwoFormSample {
    /// Value on the pair of tangent vectors `(dz_u, dt_u)`, `(dz_v, dt_v)`.
    pub fn evaluate(&self, u: (Complex64, f64), v: (Complex64, f64)) -> Complex64 {
        let (zu, tu) = u;
        let (zv, tv) = v;
        self.dz_dzbar * (zu * zv.conj() - zv * zu.conj())
            + self.dz_dt * (zu * tv - zv * tu)
            + self.dzbar_dt * (zu.conj() * tv - zv.conj() * tu)
    }
}

impl std::ops::Add for TwoFormSample {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            dz_dzbar: self.dz_dzbar + o.dz_dzbar,
            dz_dt: self.dz_dt + o.dz_dt,
            dzbar_dt: self.dzbar_dt + o.dzbar_dt,
        }
    }
}

/// `w₂ = −i/(4t²) dz∧dz̄`.
pub fn w2(p: H3Point) -> TwoFormSample {
    TwoFormSample {
        dz_dzbar: -I / (4.0 * p.t * p.t),
        dz_dt: ZERO,
        dzbar_dt: ZERO,
    }
}

/// `(δw₂)_{γ⁻¹} = γ*w₂ − w₂
///   = (i/2) J_γ (|c|² dz∧dz̄ − c conj(cz+d)/t dz∧dt + c̄ (cz+d)/t dz̄∧dt)`.
pub fn delta_w2(g: &MoebiusMap, p: H3Point) -> TwoFormSample {
    let c = g.c();
    let w = c * p.z + g.d();
    let k = I * 0.5 * jacobian(g, p);
    TwoFormSample {
        dz_dzbar: k * c.norm_sqr(),
        dz_dt: -k * c * w.conj() / p.t,
        dzbar_dt: k * c.conj() * w / p.t,
    }
}

/// One signed contribution to a truncation scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanPiece {
    pub label: &'static str,
    pub value: Complex64,
}

/// Scan result at one truncation level.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayPoint {
    pub eps: f64,
    pub pieces: Vec<ScanPiece>,
    /// `Σ |piece|`, the quantity bounded by the envelope.
    pub magnitude: f64,
    pub envelope: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub name: &'static str,
    pub points: Vec<DecayPoint>,
    /// Least-squares slope of `log magnitude` against `log ε`.
    pub decay_exponent: Option<f64>,
    pub max_ratio: f64,
    /// Magnitudes strictly decrease as `ε` decreases along the ladder.
    pub monotone: bool,
}

/// Relative accuracy of scan quadratures, measured against the envelope.
const SCAN_REL_TOL: f64 = 1e-7;

fn check_ladder(ladder: &[f64], max: f64) -> Result<(), HolographyError> {
    if ladder.is_empty() || ladder.iter().any(|&e| !(e > 0.0 && e <= max)) {
        Err(HolographyError::BadLadder { max })
    } else {
        Ok(())
    }
}

fn assemble(name: &'static str, mut points: Vec<DecayPoint>) -> DecayReport {
    points.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    let samples: Vec<(f64, f64)> = points.iter().map(|p| (p.eps, p.magnitude)).collect();
    let max_ratio = points.iter().map(|p| p.ratio).fold(0.0, f64::max);
    let monotone = points.windows(2).all(|w| w[1].magnitude < w[0].magnitude);
    DecayReport {
        name,
        decay_exponent: decay_exponent(&samples),
        points,
        max_ratio,
        monotone,
    }
}

fn point(eps: f64, pieces: Vec<ScanPiece>, envelope: f64) -> DecayPoint {
    let magnitude = pieces.iter().map(|p| p.value.norm()).sum::<f64>();
    DecayPoint {
        eps,
        pieces,
        magnitude,
        envelope,
        ratio: magnitude / envelope,
    }
}

/// `ε^{3/2} + ε^{1/2}|log ε|`.
pub fn cusp_w2_envelope(eps: f64) -> f64 {
    eps.powf(1.5) + eps.sqrt() * eps.ln().abs()
}

/// `(δw₂)_{σ⁻¹} + w₂` for the standard cusp conjugator `σ` (`v = 0`, `q = 1`),
/// integrated over the top `T̂_ε = {0 ≤ x ≤ 1, |y| ≤ ε^{-1/2}, t = 1/ε}` and
/// the walls `Ť_ε = {0 ≤ x ≤ 1, y = ±ε^{-1/2}, √ε ≤ t ≤ 1/ε}`.
pub fn cusp_w2_at(eps: f64) -> Result<DecayPoint, HolographyError> {
    let sigma = parabolic_conjugator(SpherePoint::Finite(ZERO), Complex64::new(1.0, 0.0))?;
    let envelope = cusp_w2_envelope(eps);
    let tol = SCAN_REL_TOL * envelope;
    let density = |p: H3Point| delta_w2(&sigma, p) + w2(p);
    let ymax = eps.powf(-0.5);
    let t_top = 1.0 / eps;

    let top = integrate_surface(
        |x: f64, y: f64| {
            let p = H3Point { z: Complex64::new(x, y), t: t_top };
            density(p).evaluate((Complex64::new(1.0, 0.0), 0.0), (I, 0.0))
        },
        Rect {
            u0: 0.0,
            u1: 1.0,
            v0: -ymax,
            v1: ymax,
        },
        tol,
    )?
    .value;

    // Walls in (x, u = log t); ∂/∂u moves t by t.
    let wall = |y: f64| {
        integrate_surface(
            move |x: f64, u: f64| {
                let t = u.exp();
                let p = H3Point { z: Complex64::new(x, y), t };
                density(p).evaluate((Complex64::new(1.0, 0.0), 0.0), (ZERO, t))
            },
            Rect {
                u0: 0.0,
                u1: 1.0,
                v0: 0.5 * eps.ln(),
                v1: -eps.ln(),
            },
            tol,
        )
    };
    let plus = wall(ymax)?.value;
    let minus = wall(-ymax)?.value;
    Ok(point(
        eps,
        vec![
            ScanPiece { label: "top", value: top },
            ScanPiece { label: "wall+", value: plus },
            ScanPiece { label: "wall-", value: minus },
        ],
        envelope,
    ))
}

/// Cusp truncation scan for `w₂` across `ladder ⊂ (0, 1/16]`.
pub fn cusp_w2_scan(ladder: &[f64]) -> Result<DecayReport, HolographyError> {
    check_ladder(ladder, 1.0 / 16.0)?;
    let points = ladder.iter().map(|&e| cusp_w2_at(e)).collect::<Result<Vec<_>, _>>()?;
    Ok(assemble("cusp_w2", points))
}

/// `ε|log ε| + ε²|log ε|`.
pub fn elliptic_w2_envelope(eps: f64) -> f64 {
    (eps + eps * eps) * eps.ln().abs()
}

/// `(δw₂)_{ρ⁻¹} + w₂` over the cone `T^e_{0,ε} = {t = |z|/ε, 0 ≤ arg z ≤ 2π/m,
/// aε ≤ t ≤ b/ε}` with `a = b = |w₁ − w₂|`.
///
/// Reported pieces: the `dz∧dz̄` part and the `dt` part.
pub fn elliptic_w2_at(pair: &EllipticPair, eps: f64) -> Result<DecayPoint, HolographyError> {
    let (_, rho) = elliptic_from_pair(pair)?;
    let ab = (pair.w1 - pair.w2).norm();
    let envelope = elliptic_w2_envelope(eps);
    let tol = SCAN_REL_TOL * envelope;
    let domain = Rect {
        u0: 0.0,
        u1: 2.0 * PI / f64::from(pair.m),
        v0: (ab * eps).ln(),
        v1: (ab / eps).ln(),
    };
    // (θ, u = log t): z = ε t e^{iθ}, ∂_θ z = iz, ∂_u z = z, ∂_u t = t.
    let piece = |horizontal: bool| {
        integrate_surface(
            move |theta: f64, u: f64| {
                let t = u.exp();
                let z = Complex64::from_polar(eps * t, theta);
                let p = H3Point { z, t };
                let mut f = delta_w2(&rho, p) + w2(p);
                if horizontal {
                    f.dz_dt = ZERO;
                    f.dzbar_dt = ZERO;
                } else {
                    f.dz_dzbar = ZERO;
                }
                f.evaluate((I * z, 0.0), (z, t))
            },
            domain,
            tol,
        )
    };
    let a = piece(true)?.value;
    let b = piece(false)?.value;
    Ok(point(
        eps,
        vec![
            ScanPiece { label: "dz^dzbar", value: a },
            ScanPiece { label: "dt", value: b },
        ],
        envelope,
    ))
}

/// Cone truncation scan for `w₂` across `ladder ⊂ (0, 1/16]`.
pub fn elliptic_w2_scan(ladder: &[f64], pair: &EllipticPair) -> Result<DecayReport, HolographyError> {
    check_ladder(ladder, 1.0 / 16.0)?;
    let points = ladder.iter().map(|&e| elliptic_w2_at(pair, e)).collect::<Result<Vec<_>, _>>()?;
    Ok(assemble("elliptic_w2", points))
}

/// `Φ(z, t) = log t² − log(|z+1|² + t²) − log(|z|² + t²)`.
pub fn cusp_phi(z: Complex64, t: f64) -> f64 {
    (t * t).ln() - ((z + 1.0).norm_sqr() + t * t).ln() - (z.norm_sqr() + t * t).ln()
}

/// `R = (|z|²+t²)⁻² (z+1)⁻¹ (−z̄|z|² dz + z t² dz̄ + 2t|z|² dt)` on a tangent vector.
fn cusp_r(z: Complex64, t: f64, dz: Complex64, dt: f64) -> Complex64 {
    let n2 = z.norm_sqr();
    let pre = 1.0 / ((n2 + t * t).powi(2)) / (z + 1.0);
    pre * (-z.conj() * n2 * dz + z * t * t * dz.conj() + 2.0 * t * n2 * dt)
}

/// `(i/4) Φ (d log|z+1|² − d log|z|² − R − R̄)` on a tangent vector.
pub fn cusp_w1_form(z: Complex64, t: f64, dz: Complex64, dt: f64) -> Complex64 {
    let dlog = 2.0 * ((z + 1.0).conj() * dz).re / (z + 1.0).norm_sqr() - 2.0 * (z.conj() * dz).re / z.norm_sqr();
    let r = cusp_r(z, t, dz, dt);
    I * 0.25 * cusp_phi(z, t) * (dlog - 2.0 * r.re)
}

/// `ε|log ε|`.
pub fn cusp_w1_envelope(eps: f64) -> f64 {
    eps * eps.ln().abs()
}

/// The cusp `w₁` integrand along `ĝ_ε = {z = 1+iy, |y| ≤ ε^{-1/2}, t = 1/ε}`
/// and the two walls `ǧ_ε = {z = 1 ± iε^{-1/2}, √ε ≤ t ≤ 1/ε}`, each wall
/// traversed upward in `t`.
pub fn cusp_w1_at(eps: f64) -> Result<DecayPoint, HolographyError> {
    let envelope = cusp_w1_envelope(eps);
    let tol = SCAN_REL_TOL * envelope;
    let ymax = eps.powf(-0.5);
    let t_top = 1.0 / eps;
    let top = integrate_1d_breaks(
        |y: f64| cusp_w1_form(Complex64::new(1.0, y), t_top, I, 0.0),
        &[-ymax, 0.0, ymax],
        tol,
    )?
    .value;
    // u = log t, dt = t du
    let wall = |y: f64| {
        integrate_1d(
            move |u: f64| {
                let t = u.exp();
                cusp_w1_form(Complex64::new(1.0, y), t, ZERO, t)
            },
            0.5 * eps.ln(),
            -eps.ln(),
            tol,
        )
    };
    let plus = wall(ymax)?.value;
    let minus = wall(-ymax)?.value;
    Ok(point(
        eps,
        vec![
            ScanPiece { label: "top", value: top },
            ScanPiece { label: "wall+", value: plus },
            ScanPiece { label: "wall-", value: minus },
        ],
        envelope,
    ))
}

/// Cusp truncation scan for `w₁` across `ladder ⊂ (0, 1/16]`.
pub fn cusp_w1_scan(ladder: &[f64]) -> Result<DecayReport, HolographyError> {
    check_ladder(ladder, 1.0 / 16.0)?;
    let points = ladder.iter().map(|&e| cusp_w1_at(e)).collect::<Result<Vec<_>, _>>()?;
    Ok(assemble("cusp_w1", points))
}

/// `max |Φ| / |log ε|` over `n` samples of `ĝ_ε`.
pub fn cusp_w1_phi_ratio(eps: f64, n: usize) -> f64 {
    let ymax = eps.powf(-0.5);
    (0..=n)
        .map(|k| {
            let y = -ymax + 2.0 * ymax * k as f64 / n as f64;
            cusp_phi(Complex64::new(1.0, y), 1.0 / eps).abs()
        })
        .fold(0.0, f64::max)
        / eps.ln().abs()
}

/// `∫ log((1+ε²(y²+4))/(1+ε²(y²+1))) (d log(y²+4) − d log(y²+1))` over `|y| ≤ ε^{-1/2}`.
pub fn cusp_w1_odd_remainder(eps: f64, tol: f64) -> Result<f64, HolographyError> {
    let ymax = eps.powf(-0.5);
    let e2 = eps * eps;
    let r = integrate_1d_breaks(
        |y: f64| {
            let y2 = y * y;
            ((1.0 + e2 * (y2 + 4.0)) / (1.0 + e2 * (y2 + 1.0))).ln() * (2.0 * y / (y2 + 4.0) - 2.0 * y / (y2 + 1.0))
        },
        &[-ymax, 0.0, ymax],
        tol,
    )?;
    Ok(r.value)
}

/// Terms of the Einstein-Hilbert identity.
#[derive(Debug, Clone, PartialEq)]
pub struct HolographyReport {
    pub s: f64,
    pub area: f64,
    pub chi: Ratio<i64>,
    pub bw_sum: f64,
    /// `E = S − area − 8πχ log 2 − 4 Σ D(e^{2πi/m_j})`.
    pub e: f64,
    /// `−E/4`.
    pub ren_volume: f64,
}

/// Assembles `E` and the renormalized volume from the action `s` and the area.
pub fn holography_report(sig: &SurfaceSignature, s: f64, area: f64) -> HolographyReport {
    let chi = euler_characteristic(sig);
    let bw = bw_sum(sig);
    let e = s - area - 8.0 * PI * ratio_to_f64(chi) * 2f64.ln() - 4.0 * bw;
    HolographyReport {
        s,
        area,
        chi,
        bw_sum: bw,
        e,
        ren_volume: -e / 4.0,
    }
}

/// Hyperbolic area of the two quotient surfaces, `4πχ`.
pub fn fuchsian_area(sig: &SurfaceSignature) -> f64 {
    4.0 * PI * ratio_to_f64(euler_characteristic(sig))
}

/// Report for the Fuchsian group with the hyperbolic metric.
pub fn fuchsian_report(sig: &SurfaceSignature) -> Result<HolographyReport, HolographyError> {
    let s = classical_action(sig)?;
    Ok(holography_report(sig, s, fuchsian_area(sig)))
}

/// `4πχ(1 − 2 log 2)`.
pub fn fuchsian_e(sig: &SurfaceSignature) -> f64 {
    4.0 * PI * ratio_to_f64(euler_characteristic(sig)) * (1.0 - 2.0 * 2f64.ln())
}

/// `πχ(2 log 2 − 1)`.
pub fn fuchsian_ren_volume(sig: &SurfaceSignature) -> f64 {
    PI * ratio_to_f64(euler_characteristic(sig)) * (2.0 * 2f64.ln() - 1.0)
}

/// `D(e^{2πi/m})`, the expected axis integral.
pub fn axis_closed_form(m: u32) -> f64 {
    bw_root_of_unity(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::act_h3_tangent;
    use crate::quad::Ladder;
    use crate::specfun::bloch_wigner;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn w1_vanishes_for_affine_maps() {
        let g = MoebiusMap::from_real(2.0, 3.0, 0.0, 0.5).unwrap();
        let s = w1_sample(&g, H3Point::new(c(0.3, 0.2), 1.5).unwrap());
        assert_eq!(s.dz_coeff, ZERO);
        assert_eq!(s.dzbar_coeff, ZERO);
    }

    #[test]
    fn w1_scalar_on_axis() {
        for m in [3u32, 5, 9] {
            let pair = EllipticPair::new(m, c(1.0, 2.0), c(-1.0, -1.0)).unwrap();
            let (tau, _) = elliptic_from_pair(&pair).unwrap();
            let g = tau.inverse();
            let beta = pair.beta();
            for s in [1e-4, 0.2, 0.5, 0.93] {
                let p = geodesic_point(&pair.arc(), s).unwrap();
                let want = (4.0 * beta.sin().powi(2) * (s - s * s)).ln();
                assert!((w1_scalar(&g, p).unwrap() - want).abs() < 1e-10);
                // direct formula with an unnormalized representative gives the same scalar
                let (cr, dr) = pair.tau_inverse_lower_row();
                let raw = ((cr * p.t).norm_sqr() * crate::moebius::matrix_jacobian(cr, dr, p)).ln();
                assert!((raw - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn axis_integral_examples() {
        let pair = EllipticPair::new(2, c(0.0, 1.0), c(0.0, -1.0)).unwrap();
        assert!(geodesic_w1_integral(&pair, 1e-10).unwrap().abs() < 1e-8);
        let pair = EllipticPair::new(3, c(1.0, 2.0), c(-1.0, -1.0)).unwrap();
        let v = geodesic_w1_integral(&pair, 1e-10).unwrap();
        assert!((v - 0.676_627_737_6).abs() < 1e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let want = axis_closed_form(5);
        for _ in 0..3 {
            let w1 = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let w2 = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let pair = EllipticPair::new(5, w1, w2).unwrap();
            assert!((geodesic_w1_integral(&pair, 1e-10).unwrap() - want).abs() < 1e-6);
        }
        for m in 3..=12 {
            assert!((geodesic_w1_reduced(m, 1e-12).unwrap() - axis_closed_form(m)).abs() < 1e-10);
        }
    }

    #[test]
    fn parts_reproduce_closed_forms() {
        let pair = EllipticPair::new(3, c(0.5, 1.0), c(-0.2, -0.7)).unwrap();
        let parts = geodesic_w1_parts(&pair, 0.3, -0.4, 2f64.powi(-16), 1e-12).unwrap();
        assert!((parts.iv_v - iv_v_limit(pair.beta())).norm() < 1e-8);

        let pair = EllipticPair::new(4, c(0.0, 1.0), c(0.0, -1.0)).unwrap();
        let parts = geodesic_w1_parts(&pair, 0.0, 0.0, 2f64.powi(-10), 1e-12).unwrap();
        assert!((parts.total().re - axis_closed_form(4)).abs() < 1e-5);
        assert!(parts.total().im.abs() < 1e-10);
        assert!(geodesic_w1_parts(&EllipticPair::new(2, ZERO, c(1.0, 0.0)).unwrap(), 0.0, 0.0, 1e-3, 1e-10).is_err());
        assert!(geodesic_w1_parts(&pair, 0.0, 0.0, 1.0, 1e-10).is_err());
    }

    #[test]
    fn divergences_cancel() {
        let pair = EllipticPair::new(5, c(0.3, 0.9), c(1.4, -0.6)).unwrap();
        let fit = divergence_fit(&pair, 0.7, -1.1, &Ladder::new(1.0, 6, 14).values(), 1e-13).unwrap();
        assert!(fit.log_coefficient.abs() < 1e-8, "A = {}", fit.log_coefficient);
        let beta = pair.beta();
        assert!((fit.finite_part + beta * (4.0 * beta.sin().powi(2)).ln()).abs() < 1e-8);
    }

    #[test]
    fn elliptic_con_intermediate_form() {
        for m in 2..=12u32 {
            let beta = PI / f64::from(m);
            let w = Complex64::from_polar(1.0, 2.0 * beta);
            let form = beta * (4.0 * beta.sin().powi(2)).ln() - iv_v_limit(beta);
            assert!(form.im.abs() < 1e-10);
            let d1 = bloch_wigner(1.0 - w).unwrap().value;
            assert!((form.re - d1).abs() < 1e-10);
            assert!((d1 + bw_root_of_unity(m)).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_w2_matches_pullback() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let g = loop {
                let mut e = || c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                if let Ok(g) = MoebiusMap::new(e(), e(), e(), e()) {
                    break g;
                }
            };
            let p = H3Point::new(c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), rng.gen_range(0.3..2.0)).unwrap();
            let u = (c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), rng.gen_range(-1.0..1.0));
            let v = (c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), rng.gen_range(-1.0..1.0));
            let gp = crate::moebius::act_h3(&g, p);
            let gu = act_h3_tangent(&g, p, u.0, u.1);
            let gv = act_h3_tangent(&g, p, v.0, v.1);
            let pulled = w2(gp).evaluate(gu, gv) - w2(p).evaluate(u, v);
            let closed = delta_w2(&g, p).evaluate(u, v);
            assert!((pulled - closed).norm() < 1e-9 * (1.0 + closed.norm()));
        }
        let affine = MoebiusMap::from_real(1.0, 2.0, 0.0, 1.0).unwrap();
        let d = delta_w2(&affine, H3Point::new(c(0.1, 0.2), 0.7).unwrap());
        assert_eq!((d.dz_dzbar, d.dz_dt, d.dzbar_dt), (ZERO, ZERO, ZERO));
    }

    #[test]
    fn scans_decay() {
        let ladder = Ladder::new(1.0, 4, 8).values();
        let r = cusp_w2_scan(&ladder).unwrap();
        assert!(r.monotone && r.max_ratio <= 10.0, "{r:?}");
        let r = cusp_w1_scan(&ladder).unwrap();
        assert!(r.monotone && r.max_ratio <= 10.0, "{r:?}");
        let pair = EllipticPair::new(6, c(0.0, 1.0), c(0.0, -1.0)).unwrap();
        let r = elliptic_w2_scan(&ladder, &pair).unwrap();
        assert!(r.monotone && r.max_ratio <= 10.0, "{r:?}");
        assert!(cusp_w2_scan(&[0.5]).is_err());
    }

    #[test]
    fn cone_magnitude_decreases_with_order() {
        let eps = 2f64.powi(-8);
        let mags: Vec<f64> = [4u32, 6, 8, 12]
            .iter()
            .map(|&m| {
                let pair = EllipticPair::new(m, c(0.0, 1.0), c(0.0, -1.0)).unwrap();
                elliptic_w2_at(&pair, eps).unwrap().magnitude
            })
            .collect();
        assert!(mags.windows(2).all(|w| w[1] < w[0]), "{mags:?}");
    }

    #[test]
    fn cusp_w1_side_facts() {
        for k in 4..=10 {
            let eps = 2f64.powi(-k);
            assert!(cusp_w1_odd_remainder(eps, 1e-12).unwrap().abs() < 1e-10);
            assert!(cusp_w1_phi_ratio(eps, 400) < 4.0);
            // Φ on the top slice
            let y = 0.37 / eps.sqrt();
            let e2 = eps * eps;
            let want = 2.0 * eps.ln() - ((1.0 + e2 * (y * y + 4.0)) * (1.0 + e2 * (y * y + 1.0))).ln();
            assert!((cusp_phi(c(1.0, y), 1.0 / eps) - want).abs() < 1e-10);
        }
    }

    #[test]
    fn fuchsian_holography() {
        for (g, n, o) in [(2u32, 0u32, vec![]), (0, 3, vec![]), (0, 2, vec![2, 2]), (1, 1, vec![3, 7])] {
            let sig = SurfaceSignature::new(g, n, o).unwrap();
            let r = fuchsian_report(&sig).unwrap();
            assert!((r.e - fuchsian_e(&sig)).abs() < 1e-12);
            assert!((r.ren_volume - fuchsian_ren_volume(&sig)).abs() < 1e-12);
        }
        let sig = SurfaceSignature::new(2, 0, vec![]).unwrap();
        let r = holography_report(&sig, 16.0 * PI, 8.0 * PI);
        assert!((r.e - 8.0 * PI * (1.0 - 2.0 * 2f64.ln())).abs() < 1e-12);
    }
}
