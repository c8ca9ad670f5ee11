//! Takhtajan-Zograf potential of an elliptic fixed-point pair and the
//! renormalized length of the corresponding axis.

use num_complex::Complex64;
use thiserror::Error;

use crate::moebius::{act_h3, elliptic_from_pair, hyperbolic_distance, EllipticPair, H3Point, MoebiusError, MoebiusMap};
use crate::quad::{fit_finite_part, FinitePartResult, FitError, DEFAULT_CORRECTIONS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TzError {
    #[error("truncation points out of order at eps = {eps}: t1 = {t1}, t2 = {t2}")]
    LadderTooCoarse { eps: f64, t1: f64, t2: f64 },
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
    #[error(transparent)]
    Fit(#[from] FitError),
}

/// Fixed points of an elliptic element with the metric density at each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TZInput {
    pub pair: EllipticPair,
    /// `φ(w₁)`
    pub phi1: f64,
    /// `φ(w₂)`
    pub phi2: f64,
}

impl TZInput {
    pub fn new(pair: EllipticPair, phi1: f64, phi2: f64) -> Self {
        Self { pair, phi1, phi2 }
    }

    /// `w₁ = x + iy`, `w₂ = x − iy` with `φ(w) = −log (Im w)²` at both.
    pub fn fuchsian(m: u32, x: f64, y: f64) -> Result<Self, MoebiusError> {
        let pair = EllipticPair::new(m, Complex64::new(x, y), Complex64::new(x, -y))?;
        let phi = -(y * y).ln();
        Ok(Self::new(pair, phi, phi))
    }

    /// Same data with the roles of `w₁` and `w₂` exchanged.
    pub fn swapped(&self) -> Result<Self, MoebiusError> {
        Ok(Self::new(EllipticPair::new(self.pair.m, self.pair.w2, self.pair.w1)?, self.phi2, self.phi1))
    }

    /// Transport by `γ`: points `γw`, densities `φ(w) − log|γ'(w)|²`.
    pub fn transported(&self, g: &MoebiusMap) -> Result<Self, MoebiusError> {
        let image = |w: Complex64| -> Result<Complex64, MoebiusError> { g.apply(w).finite().ok_or(MoebiusError::Pole) };
        let w1 = image(self.pair.w1)?;
        let w2 = image(self.pair.w2)?;
        let phi1 = self.phi1 - g.derivative(self.pair.w1)?.norm_sqr().ln();
        let phi2 = self.phi2 - g.derivative(self.pair.w2)?.norm_sqr().ln();
        Ok(Self::new(EllipticPair::new(self.pair.m, w1, w2)?, phi1, phi2))
    }
}

/// `s = φ(w₁) + φ(w₂) + 2 log|w₁ − w₂|²`.
pub fn tz_potential(input: &TZInput) -> f64 {
    input.phi1 + input.phi2 + 2.0 * (input.pair.w1 - input.pair.w2).norm_sqr().ln()
}

/// Hyperbolic length of the axis of `τ` between the heights
/// `t₁ = ε e^{−φ(w₁)/2}|w₁−w₂|⁻¹` and `t₂ = ε⁻¹ e^{φ(w₂)/2}|w₁−w₂|` of the
/// standard model, measured after transport by `ρ`.
pub fn truncated_length(input: &TZInput, eps: f64) -> Result<f64, TzError> {
    let (_, rho) = elliptic_from_pair(&input.pair)?;
    let d = (input.pair.w1 - input.pair.w2).norm();
    let t1 = eps * (-0.5 * input.phi1).exp() / d;
    let t2 = (0.5 * input.phi2).exp() * d / eps;
    if !(t1 > 0.0 && t1 < t2 && t2.is_finite()) {
        return Err(TzError::LadderTooCoarse { eps, t1, t2 });
    }
    let zero = Complex64::new(0.0, 0.0);
    let p = act_h3(&rho, H3Point::new(zero, t1)?);
    let q = act_h3(&rho, H3Point::new(zero, t2)?);
    Ok(hyperbolic_distance(p, q))
}

/// Finite part of the truncated axis length over `ladder`.
///
/// Expected: `finite_part = s/2`, `log_coefficient = −2`.
pub fn renormalized_length(input: &TZInput, ladder: &[f64]) -> Result<FinitePartResult, TzError> {
    let mut samples = Vec::with_capacity(ladder.len());
    for &eps in ladder {
        samples.push((eps, truncated_length(input, eps)?));
    }
    Ok(fit_finite_part(&samples, &DEFAULT_CORRECTIONS, 1e-8)?)
}
