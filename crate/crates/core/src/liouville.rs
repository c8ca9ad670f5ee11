//! Liouville-action ingredients on the Riemann sphere: orbifold Euler
//! characteristic, the forms ω, θ̌, ǔ, the elliptic line integral and the
//! classical action.
//!
//! Forms are indexed by the matrix `γ` whose inverse labels them: for example
//! [`theta_form`]`(γ, …)` evaluates `θ̌_{γ⁻¹}`. Composition `γ₂∘γ₁` is the
//! matrix product `γ₂·γ₁`, and pullbacks act by
//! `γ*(A dz + B dz̄) = A(γz) γ' dz + B(γz) conj(γ') dz̄`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Ratio;
use thiserror::Error;

use crate::moebius::{elliptic_from_pair, log_derivative_ratio, EllipticPair, MoebiusError, MoebiusMap};
use crate::quad::{integrate_1d, integrate_1d_breaks, QuadError};
use crate::specfun::{bw_root_of_unity, li2};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LiouvilleError {
    #[error("ramification order {0} is below 2")]
    InvalidOrder(u32),
    #[error("signature is not hyperbolic: chi = {0}")]
    NotHyperbolic(Ratio<i64>),
    #[error("point {0} lies outside the domain of the metric density")]
    OutsideDomain(Complex64),
    #[error("point {0} is a pole of gamma''/gamma'")]
    Pole(Complex64),
    #[error("composite map has c = 0, the c-ratio form is undefined")]
    DegenerateComposite,
    #[error("beta = {0} outside (0, pi/2)")]
    BetaOutOfRange(f64),
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Orbifold type `(g, n; m₁, …, m_r)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceSignature {
    pub g: u32,
    pub n: u32,
    orders: Vec<u32>,
}

impl SurfaceSignature {
    /// Validates orders `m_j ≥ 2` and hyperbolicity `χ > 0`; orders are sorted.
    pub fn new(g: u32, n: u32, mut orders: Vec<u32>) -> Result<Self, LiouvilleError> {
        if let Some(&m) = orders.iter().find(|&&m| m < 2) {
            return Err(LiouvilleError::InvalidOrder(m));
        }
        orders.sort_unstable();
        let sig = Self { g, n, orders };
        let chi = euler_characteristic(&sig);
        if chi <= Ratio::from_integer(0) {
            return Err(LiouvilleError::NotHyperbolic(chi));
        }
        Ok(sig)
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }
}

impl fmt::Display for SurfaceSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}; {:?})", self.g, self.n, self.orders)
    }
}

/// `χ = 2g − 2 + n + Σ (1 − 1/m_j)`, exactly.
pub fn euler_characteristic(sig: &SurfaceSignature) -> Ratio<i64> {
    let base = Ratio::from_integer(2 * i64::from(sig.g) - 2 + i64::from(sig.n));
    sig.orders
        .iter()
        .fold(base, |acc, &m| acc + Ratio::new(i64::from(m) - 1, i64::from(m)))
}

pub fn ratio_to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Where a metric density is defined.
#[derive(Clone)]
pub enum Region {
    UpperHalfPlane,
    LowerHalfPlane,
    /// `ℂ ∖ ℝ`, both half-planes.
    OffRealAxis,
    Custom(Arc<dyn Fn(Complex64) -> bool + Send + Sync>),
}

impl Region {
    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            Region::UpperHalfPlane => z.im > 0.0,
            Region::LowerHalfPlane => z.im < 0.0,
            Region::OffRealAxis => z.im != 0.0,
            Region::Custom(f) => f(z),
        }
    }
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::UpperHalfPlane => f.write_str("UpperHalfPlane"),
            Region::LowerHalfPlane => f.write_str("LowerHalfPlane"),
            Region::OffRealAxis => f.write_str("OffRealAxis"),
            Region::Custom(_) => f.write_str("Custom"),
        }
    }
}

type RealField = Arc<dyn Fn(Complex64) -> f64 + Send + Sync>;
type ComplexField = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// Conformal metric `e^{φ}|dz|²` given by `φ` and `φ_z = ∂φ/∂z`.
#[derive(Clone)]
pub struct MetricDensity {
    phi: RealField,
    phi_z: ComplexField,
    pub region: Region,
}

impl fmt::Debug for MetricDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricDensity").field("region", &self.region).finish_non_exhaustive()
    }
}

impl MetricDensity {
    pub fn new<P, Q>(phi: P, phi_z: Q, region: Region) -> Self
    where
        P: Fn(Complex64) -> f64 + Send + Sync + 'static,
        Q: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            phi: Arc::new(phi),
            phi_z: Arc::new(phi_z),
            region,
        }
    }

    /// Hyperbolic metric `|dz|²/(Im z)²`: `φ = −log (Im z)²`, `φ_z = i/Im z`.
    pub fn fuchsian() -> Self {
        Self::new(|z| -(z.im * z.im).ln(), |z| I / z.im, Region::OffRealAxis)
    }

    fn check(&self, z: Complex64) -> Result<(), LiouvilleError> {
        if self.region.contains(z) {
            Ok(())
        } else {
            Err(LiouvilleError::OutsideDomain(z))
        }
    }

    pub fn phi(&self, z: Complex64) -> Result<f64, LiouvilleError> {
        self.check(z)?;
        Ok((self.phi)(z))
    }

    pub fn phi_z(&self, z: Complex64) -> Result<Complex64, LiouvilleError> {
        self.check(z)?;
        Ok((self.phi_z)(z))
    }

    /// Returns the density with `φ` replaced by `φ + c`.
    pub fn shifted(&self, c: f64) -> Self {
        let phi = self.phi.clone();
        Self {
            phi: Arc::new(move |z| phi(z) + c),
            phi_z: self.phi_z.clone(),
            region: self.region.clone(),
        }
    }
}

/// `|φ_z|² + e^{φ}`, the coefficient of `ω[φ]` against `dz∧dz̄`.
pub fn omega_density(m: &MetricDensity, z: Complex64) -> Result<f64, LiouvilleError> {
    Ok(m.phi_z(z)?.norm_sqr() + m.phi(z)?.exp())
}

/// Value of a 1-form `A dz + B dz̄` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneFormSample {
    pub dz_coeff: Complex64,
    pub dzbar_coeff: Complex64,
    pub at: Complex64,
}

impl OneFormSample {
    pub fn zero(at: Complex64) -> Self {
        Self {
            dz_coeff: ZERO,
            dzbar_coeff: ZERO,
            at,
        }
    }

    /// `f · (r dz − r̄ dz̄)`.
    fn antisymmetric(f: f64, r: Complex64, at: Complex64) -> Self {
        Self {
            dz_coeff: r * f,
            dzbar_coeff: -r.conj() * f,
            at,
        }
    }

    /// Pairing with the tangent vector `dz` (and `dz̄ = conj(dz)`).
    pub fn contract(&self, dz: Complex64) -> Complex64 {
        self.dz_coeff * dz + self.dzbar_coeff * dz.conj()
    }

    pub fn norm(&self) -> f64 {
        self.dz_coeff.norm() + self.dzbar_coeff.norm()
    }

    /// `γ*` of a sample taken at `γ(z)`, returned at `z`.
    pub fn pull_back(self, g: &MoebiusMap, z: Complex64) -> Result<Self, LiouvilleError> {
        let d = g.derivative(z)?;
        Ok(Self {
            dz_coeff: self.dz_coeff * d,
            dzbar_coeff: self.dzbar_coeff * d.conj(),
            at: z,
        })
    }
}

impl Add for OneFormSample {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            dz_coeff: self.dz_coeff + o.dz_coeff,
            dzbar_coeff: self.dzbar_coeff + o.dzbar_coeff,
            at: self.at,
        }
    }
}

impl Sub for OneFormSample {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for OneFormSample {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            dz_coeff: -self.dz_coeff,
            dzbar_coeff: -self.dzbar_coeff,
            at: self.at,
        }
    }
}

impl Mul<f64> for OneFormSample {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self {
            dz_coeff: self.dz_coeff * k,
            dzbar_coeff: self.dzbar_coeff * k,
            at: self.at,
        }
    }
}

fn ratio(g: &MoebiusMap, z: Complex64) -> Result<Complex64, LiouvilleError> {
    log_derivative_ratio(g, z).map_err(|_| LiouvilleError::Pole(z))
}

/// `log|r|² (r dz − r̄ dz̄)`, zero when `r = 0`.
fn log_weighted(r: Complex64, at: Complex64) -> OneFormSample {
    if r == ZERO {
        OneFormSample::zero(at)
    } else {
        OneFormSample::antisymmetric(r.norm_sqr().ln(), r, at)
    }
}

/// `θ̌_{γ⁻¹}[φ] = (φ − log|γ''/γ'|²)(γ''/γ' dz − conj(γ''/γ') dz̄)`.
pub fn theta_form(g: &MoebiusMap, m: &MetricDensity, z: Complex64) -> Result<OneFormSample, LiouvilleError> {
    let phi = m.phi(z)?;
    if g.c() == ZERO {
        return Ok(OneFormSample::zero(z));
    }
    let r = ratio(g, z)?;
    Ok(OneFormSample::antisymmetric(phi - r.norm_sqr().ln(), r, z))
}

/// `θ̌_{γ⁻¹}[φ]` with the scalar written as `φ − ½ log|γ'|² − 2 log 2 − log|c|²`.
pub fn theta_form_c_ratio(g: &MoebiusMap, m: &MetricDensity, z: Complex64) -> Result<OneFormSample, LiouvilleError> {
    let phi = m.phi(z)?;
    if g.c() == ZERO {
        return Ok(OneFormSample::zero(z));
    }
    let r = ratio(g, z)?;
    let gp = g.derivative(z)?;
    let scalar = phi - 0.5 * gp.norm_sqr().ln() - 2.0 * 2f64.ln() - g.c().norm_sqr().ln();
    Ok(OneFormSample::antisymmetric(scalar, r, z))
}

/// `ǔ_{γ₁⁻¹,γ₂⁻¹}` in log-derivative form,
/// `−F(γ₁*R₂) + F(R_{γ₂γ₁}) − F(R₁)` with `F(r) = log|r|² (r dz − r̄ dz̄)`
/// and `R = γ''/γ'`.
///
/// Equals `γ₁*θ̌(γ₂) − θ̌(γ₂γ₁) + θ̌(γ₁)` for any density satisfying
/// `φ∘γ₁ = φ − log|γ₁'|²`, and is independent of `φ`.
pub fn u_form(g1: &MoebiusMap, g2: &MoebiusMap, z: Complex64) -> Result<OneFormSample, LiouvilleError> {
    let g21 = g2.compose(g1);
    let w = g1.apply(z).finite().ok_or(LiouvilleError::Pole(z))?;
    let a2 = ratio(g2, w)? * g1.derivative(z)?;
    let r21 = ratio(&g21, z)?;
    let r1 = ratio(g1, z)?;
    Ok(log_weighted(r21, z) - log_weighted(a2, z) - log_weighted(r1, z))
}

/// `ǔ_{γ₁⁻¹,γ₂⁻¹}` written with `γ'` and ratios of the `c` entries.
pub fn u_form_c_ratio(g1: &MoebiusMap, g2: &MoebiusMap, z: Complex64) -> Result<OneFormSample, LiouvilleError> {
    let g21 = g2.compose(g1);
    let w = g1.apply(z).finite().ok_or(LiouvilleError::Pole(z))?;
    let g1p = g1.derivative(z)?;
    let a2 = ratio(g2, w)? * g1p;
    let r1 = ratio(g1, z)?;
    let mut out = OneFormSample::zero(z);
    if a2 == ZERO && r1 == ZERO {
        return Ok(out);
    }
    let c21 = g21.c().norm_sqr();
    if c21 == 0.0 {
        return Err(LiouvilleError::DegenerateComposite);
    }
    if a2 != ZERO {
        let s = 0.5 * g1p.norm_sqr().ln() + (g2.c().norm_sqr() / c21).ln();
        out = out - OneFormSample::antisymmetric(s, a2, z);
    }
    if r1 != ZERO {
        let g2p = g2.derivative(w)?;
        let s = 0.5 * g2p.norm_sqr().ln() + (c21 / g1.c().norm_sqr()).ln();
        out = out + OneFormSample::antisymmetric(s, r1, z);
    }
    Ok(out)
}

/// Elliptic order `m` and its fixed point `z_j` in the upper half-plane.
fn elliptic_segment(m: u32, zj: Complex64) -> Result<(MoebiusMap, Complex64, Complex64), LiouvilleError> {
    let pair = EllipticPair::new(m, zj, zj.conj())?;
    let (tau, _) = elliptic_from_pair(&pair)?;
    let mid = Complex64::new(zj.re, 0.0);
    let half = Complex64::new(0.0, zj.im);
    Ok((tau.inverse(), mid, half))
}

/// `∫ θ̌_τ[φ]` along the straight segment from `z̄_j` to `z_j`, where `τ` is
/// the order-`m` elliptic element fixing `z_j` and `z̄_j`.
///
/// Closed form: `−8i D(e^{2πi/m})` for the hyperbolic density.
pub fn elliptic_term_integral(
    m: u32,
    zj: Complex64,
    density: &MetricDensity,
    tol: f64,
) -> Result<Complex64, LiouvilleError> {
    if zj.im == 0.0 {
        return Err(LiouvilleError::OutsideDomain(zj));
    }
    let (g, mid, half) = elliptic_segment(m, zj)?;
    let failure = std::cell::Cell::new(None);
    let integrand = |s: f64| {
        let z = mid + half * s;
        match theta_form(&g, density, z) {
            Ok(form) => form.contract(half),
            Err(e) => {
                failure.set(Some(e));
                ZERO
            }
        }
    };
    let r = integrate_1d_breaks(integrand, &[-1.0, 0.0, 1.0], tol);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(r?.value)
}

/// `d/ds log((cos β + is sin β)/(cos β − is sin β))`.
fn dlog_rotation(beta: f64, s: f64) -> Complex64 {
    let (sn, cs) = beta.sin_cos();
    I * (2.0 * sn * cs / (cs * cs + s * s * sn * sn))
}

/// Even reduction of the line integral,
/// `4 ∫₀¹ log(4 s² sin²β / |cos β + is sin β|²) d log((cos β + is sin β)/(cos β − is sin β))`.
pub fn elliptic_term_reduced(beta: f64, tol: f64) -> Result<Complex64, LiouvilleError> {
    check_beta(beta)?;
    let (sn, cs) = beta.sin_cos();
    let r = integrate_1d(
        |s: f64| {
            let arg = 4.0 * s * s * sn * sn / (cs * cs + s * s * sn * sn);
            dlog_rotation(beta, s) * (4.0 * arg.ln())
        },
        0.0,
        1.0,
        tol,
    )?;
    Ok(r.value)
}

fn check_beta(beta: f64) -> Result<(), LiouvilleError> {
    if beta > 0.0 && beta < PI / 2.0 {
        Ok(())
    } else {
        Err(LiouvilleError::BetaOutOfRange(beta))
    }
}

/// The three pieces of the reduced elliptic integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticParts {
    /// `8 ∫₀¹ log s dΛ`
    pub i: Complex64,
    /// `4 log(4 sin²β) ∫₀¹ dΛ`
    pub ii: Complex64,
    /// `−4 ∫₀¹ log|cos β + is sin β|² dΛ`
    pub iii: Complex64,
}

impl EllipticParts {
    pub fn total(&self) -> Complex64 {
        self.i + self.ii + self.iii
    }
}

/// Parts (I), (II), (III) by quadrature, `0 < β < π/2`.
pub fn elliptic_term_parts(beta: f64, tol: f64) -> Result<EllipticParts, LiouvilleError> {
    check_beta(beta)?;
    let (sn, cs) = beta.sin_cos();
    let i = integrate_1d(|s: f64| dlog_rotation(beta, s) * (8.0 * s.ln()), 0.0, 1.0, tol)?.value;
    let ii = integrate_1d(
        |s: f64| dlog_rotation(beta, s) * (4.0 * (4.0 * sn * sn).ln()),
        0.0,
        1.0,
        tol,
    )?
    .value;
    let iii = integrate_1d(
        |s: f64| dlog_rotation(beta, s) * (-4.0 * (cs * cs + s * s * sn * sn).ln()),
        0.0,
        1.0,
        tol,
    )?
    .value;
    Ok(EllipticParts { i, ii, iii })
}

/// Closed forms of the parts:
/// `(I) = 8Li₂(−i tan β) − 8Li₂(i tan β)`, `(II) = 8iβ log(4 sin²β)`,
/// `(III) = −4 · log_modulus_closed(cos β, sin β)`.
pub fn elliptic_term_parts_closed(beta: f64) -> Result<EllipticParts, LiouvilleError> {
    check_beta(beta)?;
    let (sn, cs) = beta.sin_cos();
    let t = I * beta.tan();
    let li = |z: Complex64| li2(z).unwrap_or(ZERO);
    Ok(EllipticParts {
        i: 8.0 * (li(-t) - li(t)),
        ii: I * (8.0 * beta * (4.0 * sn * sn).ln()),
        iii: -4.0 * log_modulus_closed(cs, sn),
    })
}

/// `∫₀¹ log|x + isy|² d log((x + isy)/(x − isy))` by quadrature.
pub fn log_modulus_integral(x: f64, y: f64, tol: f64) -> Result<Complex64, LiouvilleError> {
    let r = integrate_1d(
        |s: f64| {
            let dlog = I * (2.0 * x * y / (x * x + s * s * y * y));
            dlog * (x * x + s * s * y * y).ln()
        },
        0.0,
        1.0,
        tol,
    )?;
    Ok(r.value)
}

/// `log(2x) log((x+iy)/(x−iy)) − Li₂((x+iy)/2x) + Li₂((x−iy)/2x)`, for `x > 0`, `x² + y² = 1`.
pub fn log_modulus_closed(x: f64, y: f64) -> Complex64 {
    let u = Complex64::new(x, y);
    let v = u.conj();
    let li = |z: Complex64| li2(z).unwrap_or(ZERO);
    (2.0 * x).ln() * (u / v).ln() - li(u / (2.0 * x)) + li(v / (2.0 * x))
}

/// Classical Liouville action `S = 8πχ + 4 Σ_j D(e^{2πi/m_j})`.
pub fn classical_action(sig: &SurfaceSignature) -> Result<f64, LiouvilleError> {
    let chi = euler_characteristic(sig);
    if chi <= Ratio::from_integer(0) {
        return Err(LiouvilleError::NotHyperbolic(chi));
    }
    Ok(8.0 * PI * ratio_to_f64(chi) + 4.0 * bw_sum(sig))
}

/// `Σ_j D(e^{2πi/m_j})`.
pub fn bw_sum(sig: &SurfaceSignature) -> f64 {
    sig.orders.iter().map(|&m| bw_root_of_unity(m)).sum()
}
