//! PSL(2,ℂ) acting on the Riemann sphere and on upper half-space ℍ³.
//!
//! Matrices are stored with determinant 1. The sign ambiguity of PSL is
//! handled by [`MoebiusMap::projectively_eq`].

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tolerance on `tr²` used by [`classify`].
pub const CLASSIFY_TOL: f64 = 1e-10;
/// Inputs whose `tr²` lies within this distance of a class boundary are flagged.
pub const CLASSIFY_BOUNDARY_WINDOW: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum MoebiusError {
    #[error("matrix has zero determinant")]
    Degenerate,
    #[error("height t = {0} is not positive")]
    NonPositiveHeight(f64),
    #[error("fixed points coincide")]
    DegeneratePair,
    #[error("order m = {0} is below 2")]
    InvalidOrder(u32),
    #[error("parameter q vanishes")]
    ZeroParameter,
    #[error("geodesic parameter s = {0} outside (0, 1)")]
    OutOfRange(f64),
    #[error("point is a pole of the map")]
    Pole,
}

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        SpherePoint::Finite(z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl MoebiusMap {
    /// Builds the map from any invertible matrix, rescaling to determinant 1.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self, MoebiusError> {
        let det = a * d - b * c;
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        if !(det.norm() > 1e-300) || det.norm() <= 1e-14 * scale * scale || !det.norm().is_finite() {
            return Err(MoebiusError::Degenerate);
        }
        let k = det.sqrt().inv();
        Ok(Self {
            a: a * k,
            b: b * k,
            c: c * k,
            d: d * k,
        })
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Result<Self, MoebiusError> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Self {
            a: ONE,
            b: ZERO,
            c: ZERO,
            d: ONE,
        }
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }
    pub fn b(&self) -> Complex64 {
        self.b
    }
    pub fn c(&self) -> Complex64 {
        self.c
    }
    pub fn d(&self) -> Complex64 {
        self.d
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    /// `self ∘ other`, i.e. the matrix product `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::identity(), |acc, _| acc.compose(self))
    }

    /// Equality in PSL(2,ℂ): entries agree up to a common sign.
    pub fn projectively_eq(&self, other: &Self, tol: f64) -> bool {
        let close = |s: f64| {
            self.entries()
                .iter()
                .zip(other.entries().iter())
                .all(|(x, y)| (x - s * y).norm() <= tol)
        };
        close(1.0) || close(-1.0)
    }

    /// `(az + b)/(cz + d)` for finite `z`.
    pub fn apply(&self, z: Complex64) -> SpherePoint {
        act_sphere(self, SpherePoint::Finite(z))
    }

    /// `γ'(z) = (cz + d)⁻²`.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64, MoebiusError> {
        let den = self.c * z + self.d;
        if den == ZERO {
            return Err(MoebiusError::Pole);
        }
        Ok((den * den).inv())
    }
}

/// Fractional-linear action on the Riemann sphere.
pub fn act_sphere(g: &MoebiusMap, z: SpherePoint) -> SpherePoint {
    match z {
        SpherePoint::Infinity => {
            if g.c == ZERO {
                SpherePoint::Infinity
            } else {
                SpherePoint::Finite(g.a / g.c)
            }
        }
        SpherePoint::Finite(z) => {
            let den = g.c * z + g.d;
            if den == ZERO {
                SpherePoint::Infinity
            } else {
                SpherePoint::Finite((g.a * z + g.b) / den)
            }
        }
    }
}

/// Point `(z, t)` of upper half-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H3Point {
    pub z: Complex64,
    pub t: f64,
}

impl H3Point {
    pub fn new(z: Complex64, t: f64) -> Result<Self, MoebiusError> {
        if t > 0.0 && t.is_finite() {
            Ok(Self { z, t })
        } else {
            Err(MoebiusError::NonPositiveHeight(t))
        }
    }
}

/// `J = 1/(|cz + d|² + |ct|²)` for a matrix with lower row `(c, d)`.
///
/// The value depends on the scaling of the matrix; [`jacobian`] uses the
/// determinant-one representative.
pub fn matrix_jacobian(c: Complex64, d: Complex64, p: H3Point) -> f64 {
    1.0 / ((c * p.z + d).norm_sqr() + (c * p.t).norm_sqr())
}

/// `J_γ(Z)`, so that `t(γZ) = t J_γ(Z)`.
pub fn jacobian(g: &MoebiusMap, p: H3Point) -> f64 {
    matrix_jacobian(g.c, g.d, p)
}

/// Action on ℍ³ by the Poincaré extension.
pub fn act_h3(g: &MoebiusMap, p: H3Point) -> H3Point {
    let j = jacobian(g, p);
    let num = (g.a * p.z + g.b) * (g.c * p.z + g.d).conj() + g.a * g.c.conj() * (p.t * p.t);
    H3Point {
        z: num * j,
        t: p.t * j,
    }
}

/// Image of the tangent vector `(dz, dt)` at `p` under the differential of the action.
pub fn act_h3_tangent(g: &MoebiusMap, p: H3Point, dz: Complex64, dt: f64) -> (Complex64, f64) {
    let w = g.c * p.z + g.d;
    let t2 = p.t * p.t;
    let n = (g.a * p.z + g.b) * w.conj() + g.a * g.c.conj() * t2;
    let den = w.norm_sqr() + g.c.norm_sqr() * t2;
    let dden = 2.0 * (w.conj() * g.c * dz).re + 2.0 * g.c.norm_sqr() * p.t * dt;
    let dn = g.a * dz * w.conj() + (g.a * p.z + g.b) * (g.c * dz).conj() + 2.0 * g.a * g.c.conj() * p.t * dt;
    let dz_out = dn / den - n * dden / (den * den);
    let dt_out = dt / den - p.t * dden / (den * den);
    (dz_out, dt_out)
}

/// Hyperbolic distance in ℍ³, `cosh d = 1 + (|z₁−z₂|² + (t₁−t₂)²)/(2t₁t₂)`.
pub fn hyperbolic_distance(p: H3Point, q: H3Point) -> f64 {
    let num = (p.z - q.z).norm_sqr() + (p.t - q.t).powi(2);
    2.0 * (num / (4.0 * p.t * q.t)).sqrt().asinh()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapClass {
    Identity,
    Parabolic,
    Elliptic,
    Hyperbolic,
    Loxodromic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub class: MapClass,
    pub trace_sq: Complex64,
    /// `tr²` lies within [`CLASSIFY_BOUNDARY_WINDOW`] of a class boundary but
    /// outside the classification tolerance.
    pub near_boundary: bool,
}

/// Trace classification on `tr²`.
pub fn classify(g: &MoebiusMap) -> Classification {
    let tr = g.trace();
    let t2 = tr * tr;
    let tol = CLASSIFY_TOL;
    let class = if (t2 - 4.0).norm() <= tol {
        let scalar = g.b.norm() <= tol && g.c.norm() <= tol && (g.a - g.d).norm() <= tol;
        if scalar {
            MapClass::Identity
        } else {
            MapClass::Parabolic
        }
    } else if t2.im.abs() <= tol && t2.re >= -tol && t2.re < 4.0 {
        MapClass::Elliptic
    } else if t2.im.abs() <= tol && t2.re > 4.0 {
        MapClass::Hyperbolic
    } else {
        MapClass::Loxodromic
    };
    let in_window = |d: f64| d > tol && d <= CLASSIFY_BOUNDARY_WINDOW;
    let near_boundary = in_window((t2 - 4.0).norm())
        || in_window(t2.im.abs())
        || (t2.im.abs() <= tol && in_window(t2.re.abs()));
    Classification {
        class,
        trace_sq: t2,
        near_boundary,
    }
}

/// `e^{iπ/m}`, exact for the orders where the components are representable.
pub fn half_turn_root(m: u32) -> Complex64 {
    match m {
        1 => Complex64::new(-1.0, 0.0),
        2 => Complex64::new(0.0, 1.0),
        3 => Complex64::new(0.5, 0.75f64.sqrt()),
        6 => Complex64::new(0.75f64.sqrt(), 0.5),
        _ => Complex64::from_polar(1.0, PI / f64::from(m)),
    }
}

/// `λ_m = diag(e^{iπ/m}, e^{-iπ/m})`, rotation by `2π/m` about the t-axis.
pub fn rotation(m: u32) -> MoebiusMap {
    let e = half_turn_root(m);
    MoebiusMap {
        a: e,
        b: ZERO,
        c: ZERO,
        d: e.conj(),
    }
}

/// Elliptic element of order `m` with fixed points `w1`, `w2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticPair {
    pub m: u32,
    pub w1: Complex64,
    pub w2: Complex64,
}

impl EllipticPair {
    pub fn new(m: u32, w1: Complex64, w2: Complex64) -> Result<Self, MoebiusError> {
        if m < 2 {
            return Err(MoebiusError::InvalidOrder(m));
        }
        if (w1 - w2).norm() <= 1e-14 * (1.0 + w1.norm().max(w2.norm())) {
            return Err(MoebiusError::DegeneratePair);
        }
        Ok(Self { m, w1, w2 })
    }

    /// `β = π/m`.
    pub fn beta(&self) -> f64 {
        PI / f64::from(self.m)
    }

    pub fn arc(&self) -> GeodesicArc {
        GeodesicArc {
            w1: self.w1,
            w2: self.w2,
        }
    }

    /// Lower row `(c, d)` of the representative
    /// `τ⁻¹ ∝ [[w₁e − w₂ē, −w₁w₂(e−ē)], [e−ē, −w₂e + w₁ē]]`, `e = e^{iπ/m}`,
    /// whose determinant is `(w₁−w₂)²`.
    pub fn tau_inverse_lower_row(&self) -> (Complex64, Complex64) {
        let e = half_turn_root(self.m);
        let eb = e.conj();
        (e - eb, -self.w2 * e + self.w1 * eb)
    }

    /// `J_{τ⁻¹}` of the determinant-`(w₁−w₂)²` representative at the point
    /// of the axis with parameter `s`. Constant in `s` and equal to `|w₁−w₂|⁻²`.
    pub fn axis_jacobian(&self, s: f64) -> Result<f64, MoebiusError> {
        let p = geodesic_point(&self.arc(), s)?;
        let (c, d) = self.tau_inverse_lower_row();
        Ok(matrix_jacobian(c, d, p))
    }
}

/// Returns `(τ, ρ)` with `τ = ρ λ_m ρ⁻¹` and `ρ(0) = w₁`, `ρ(∞) = w₂`.
pub fn elliptic_from_pair(p: &EllipticPair) -> Result<(MoebiusMap, MoebiusMap), MoebiusError> {
    let p = EllipticPair::new(p.m, p.w1, p.w2)?;
    let varpi = (p.w1 - p.w2).sqrt().inv();
    let rho = MoebiusMap {
        a: -varpi * p.w2,
        b: varpi * p.w1,
        c: -varpi,
        d: varpi,
    };
    let tau = rho.compose(&rotation(p.m)).compose(&rho.inverse());
    Ok((tau, rho))
}

/// Parabolic generator `κ` fixing `v` with translation parameter `q`.
pub fn parabolic_generator(v: SpherePoint, q: Complex64) -> Result<MoebiusMap, MoebiusError> {
    if q == ZERO {
        return Err(MoebiusError::ZeroParameter);
    }
    Ok(match v {
        SpherePoint::Infinity => MoebiusMap {
            a: ONE,
            b: q,
            c: ZERO,
            d: ONE,
        },
        SpherePoint::Finite(v) => MoebiusMap {
            a: ONE + q * v,
            b: -q * v * v,
            c: q,
            d: ONE - q * v,
        },
    })
}

/// Conjugator `σ` with `σ⁻¹κσ = [[1, 1], [0, 1]]` for `v = ∞` and
/// `[[1, −1], [0, 1]]` for finite `v`.
pub fn parabolic_conjugator(v: SpherePoint, q: Complex64) -> Result<MoebiusMap, MoebiusError> {
    if q == ZERO {
        return Err(MoebiusError::ZeroParameter);
    }
    let r = q.sqrt();
    Ok(match v {
        SpherePoint::Infinity => MoebiusMap {
            a: r,
            b: ZERO,
            c: ZERO,
            d: r.inv(),
        },
        SpherePoint::Finite(v) => MoebiusMap {
            a: r * v,
            b: -r.inv(),
            c: r,
            d: ZERO,
        },
    })
}

/// Horoball tangent to the sphere at `tangency`.
///
/// `size` is the Euclidean radius for a finite tangency and the height of the
/// bounding horosphere for tangency at ∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Horoball {
    pub tangency: SpherePoint,
    pub size: f64,
}

impl Horoball {
    /// Signed offset of `p` from the bounding horosphere; zero on it, negative inside.
    pub fn boundary_residual(&self, p: H3Point) -> f64 {
        match self.tangency {
            SpherePoint::Infinity => self.size - p.t,
            SpherePoint::Finite(v) => {
                let r = self.size;
                ((p.z - v).norm_sqr() + (p.t - r).powi(2)).sqrt() - r
            }
        }
    }
}

/// Image of `ℋ_s = {t ≥ s}` under `σ`.
pub fn horoball_image(sigma: &MoebiusMap, s: f64) -> Result<Horoball, MoebiusError> {
    if !(s > 0.0) {
        return Err(MoebiusError::NonPositiveHeight(s));
    }
    if sigma.c == ZERO {
        Ok(Horoball {
            tangency: SpherePoint::Infinity,
            size: s * sigma.a.norm_sqr(),
        })
    } else {
        Ok(Horoball {
            tangency: SpherePoint::Finite(sigma.a / sigma.c),
            size: 1.0 / (2.0 * sigma.c.norm_sqr() * s),
        })
    }
}

/// Oriented geodesic from `w2` to `w1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicArc {
    pub w1: Complex64,
    pub w2: Complex64,
}

/// `z(s) = s(w₁−w₂) + w₂`, `t(s) = |w₁−w₂|√(s − s²)`.
pub fn geodesic_point(arc: &GeodesicArc, s: f64) -> Result<H3Point, MoebiusError> {
    if !(s > 0.0 && s < 1.0) {
        return Err(MoebiusError::OutOfRange(s));
    }
    let dw = arc.w1 - arc.w2;
    Ok(H3Point {
        z: dw * s + arc.w2,
        t: dw.norm() * (s * (1.0 - s)).sqrt(),
    })
}

/// `γ''(z)/γ'(z) = −2c/(cz + d)`.
pub fn log_derivative_ratio(g: &MoebiusMap, z: Complex64) -> Result<Complex64, MoebiusError> {
    let den = g.c * z + g.d;
    if den == ZERO {
        return Err(MoebiusError::Pole);
    }
    Ok(-2.0 * g.c / den)
}
