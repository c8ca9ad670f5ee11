//! Quadrature: tanh-sinh integration on finite intervals, tensor-product
//! surface integrals, and finite-part extraction from a geometric ladder.
//!
//! The tanh-sinh map clusters nodes doubly exponentially at both endpoints,
//! so integrable logarithmic and algebraic endpoint singularities need no
//! special treatment. Nodes are computed in complement form, so the distance
//! to the nearest endpoint is exact even when it is far below the spacing of
//! floating-point numbers near that endpoint.

use std::cell::Cell;
use std::f64::consts::FRAC_PI_2;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// Upper limit of the transformed variable.
const T_MAX: f64 = 4.0;
/// Finest level of the step-halving sequence, step `2^-MAX_LEVEL`.
const MAX_LEVEL: u32 = 10;
/// Level used inside each cell of the bisection fallback.
const CELL_LEVEL: u32 = 7;
const MAX_DEPTH: u32 = 18;
const EVAL_BUDGET: usize = 4_000_000;

/// Integrand values the quadrature can accumulate.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
    fn to_complex(self) -> Complex64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn to_complex(self) -> Complex64 {
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("quadrature did not reach tolerance: best {best}, error estimate {abs_error:e} after {evaluations} evaluations")]
    NotConverged {
        best: Complex64,
        abs_error: f64,
        evaluations: usize,
    },
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("invalid tolerance {0}")]
    InvalidTolerance(f64),
    #[error("integrand is not finite at x = {0}")]
    NonFinite(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("ladder needs at least {needed} distinct points, got {got}")]
    DegenerateLadder { needed: usize, got: usize },
    #[error("fit residual {residual:e} exceeds threshold {threshold:e}")]
    ModelMismatch { residual: f64, threshold: f64 },
    #[error("least-squares solve failed")]
    Singular,
}

struct Pass<T> {
    value: T,
    abs_error: f64,
    evaluations: usize,
    converged: bool,
}

/// `∫_a^b f` by tanh-sinh levels up to `max_level`, stopping once successive
/// levels agree to `tol`.
/// Relative accuracy below which successive levels differ by roundoff only.
const ROUNDOFF_FLOOR: f64 = 4e-15;

fn tanh_sinh<T, F>(f: &F, a: f64, b: f64, tol: f64, max_level: u32) -> Result<Pass<T>, QuadError>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let evaluations = Cell::new(0usize);

    let eval = |x: f64| -> Result<T, QuadError> {
        evaluations.set(evaluations.get() + 1);
        let y = f(x);
        if y.magnitude().is_finite() {
            Ok(y)
        } else {
            Err(QuadError::NonFinite(x))
        }
    };

    // Weighted contribution of the symmetric node pair at t > 0.
    let pair = |t: f64| -> Result<T, QuadError> {
        let u = FRAC_PI_2 * t.sinh();
        let q = (-2.0 * u).exp();
        let dist = h * 2.0 * q / (1.0 + q);
        let w = FRAC_PI_2 * t.cosh() * 4.0 * q / ((1.0 + q) * (1.0 + q));
        let mut acc = T::zero();
        let xl = a + dist;
        if xl > a && xl < b {
            acc = acc + eval(xl)? * w;
        }
        let xr = b - dist;
        if xr < b && xr > a {
            acc = acc + eval(xr)? * w;
        }
        Ok(acc)
    };

    let n0 = T_MAX as usize;
    let mut sum = eval(c)? * FRAC_PI_2;
    for j in 1..=n0 {
        sum = sum + pair(j as f64)?;
    }
    let mut estimate = sum * h;
    let mut abs_error = f64::INFINITY;
    let mut step = 1.0;
    let mut converged = false;
    for level in 1..=max_level {
        step *= 0.5;
        let n = (T_MAX / step) as usize;
        let mut fresh = T::zero();
        for j in (1..=n).step_by(2) {
            fresh = fresh + pair(j as f64 * step)?;
        }
        sum = sum + fresh;
        let next = sum * (h * step);
        abs_error = (next - estimate).magnitude();
        estimate = next;
        if level >= 3 && abs_error <= tol.max(ROUNDOFF_FLOOR * estimate.magnitude()) {
            converged = true;
            break;
        }
    }
    Ok(Pass {
        value: estimate,
        abs_error,
        evaluations: evaluations.get(),
        converged,
    })
}

fn check_args(a: f64, b: f64, tol: f64) -> Result<(), QuadError> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(QuadError::InvalidInterval { a, b });
    }
    if !(tol > 0.0) {
        return Err(QuadError::InvalidTolerance(tol));
    }
    Ok(())
}

/// `∫_a^b f(x) dx` to absolute tolerance `tol`.
///
/// Integrable singularities at `a` and `b` are allowed. If the global
/// tanh-sinh sequence does not settle, the interval is bisected adaptively
/// with the tolerance split between the halves.
pub fn integrate_1d<T, F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult<T>, QuadError>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    check_args(a, b, tol)?;
    let first = tanh_sinh(&f, a, b, tol, MAX_LEVEL)?;
    if first.converged {
        return Ok(QuadResult {
            value: first.value,
            abs_error: first.abs_error,
            evaluations: first.evaluations,
        });
    }
    let mut evaluations = first.evaluations;
    let (value, abs_error, ok) = bisect(&f, a, b, tol, 0, &mut evaluations)?;
    if ok {
        Ok(QuadResult {
            value,
            abs_error,
            evaluations,
        })
    } else {
        Err(QuadError::NotConverged {
            best: value.to_complex(),
            abs_error,
            evaluations,
        })
    }
}

fn bisect<T, F>(f: &F, a: f64, b: f64, tol: f64, depth: u32, evaluations: &mut usize) -> Result<(T, f64, bool), QuadError>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let pass = tanh_sinh(f, a, b, tol, CELL_LEVEL)?;
    *evaluations += pass.evaluations;
    let m = 0.5 * (a + b);
    if pass.converged || depth >= MAX_DEPTH || *evaluations >= EVAL_BUDGET || !(a < m && m < b) {
        return Ok((pass.value, pass.abs_error, pass.converged));
    }
    let (l, el, okl) = bisect(f, a, m, 0.5 * tol, depth + 1, evaluations)?;
    let (r, er, okr) = bisect(f, m, b, 0.5 * tol, depth + 1, evaluations)?;
    Ok((l + r, el + er, okl && okr))
}

/// `∫ f` over consecutive intervals of `breaks`, each to `tol / pieces`.
///
/// Interior break points are treated as endpoints, so integrable
/// singularities may sit on any of them.
pub fn integrate_1d_breaks<T, F>(f: F, breaks: &[f64], tol: f64) -> Result<QuadResult<T>, QuadError>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if breaks.len() < 2 {
        return Err(QuadError::InvalidInterval {
            a: breaks.first().copied().unwrap_or(f64::NAN),
            b: f64::NAN,
        });
    }
    let pieces = (breaks.len() - 1) as f64;
    let mut total = QuadResult {
        value: T::zero(),
        abs_error: 0.0,
        evaluations: 0,
    };
    for w in breaks.windows(2) {
        let r = integrate_1d(&f, w[0], w[1], tol / pieces)?;
        total.value = total.value + r.value;
        total.abs_error += r.abs_error;
        total.evaluations += r.evaluations;
    }
    Ok(total)
}

/// Axis-aligned rectangle `[u0, u1] × [v0, v1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Rect {
    pub fn area(&self) -> f64 {
        (self.u1 - self.u0) * (self.v1 - self.v0)
    }
}

/// `∬ f(u, v) du dv` over `domain` as an iterated integral.
pub fn integrate_surface<T, F>(f: F, domain: Rect, tol: f64) -> Result<QuadResult<T>, QuadError>
where
    T: QuadValue,
    F: Fn(f64, f64) -> T,
{
    check_args(domain.u0, domain.u1, tol)?;
    check_args(domain.v0, domain.v1, tol)?;
    let inner_tol = 0.5 * tol / (domain.u1 - domain.u0);
    let failure: Cell<Option<QuadError>> = Cell::new(None);
    let inner_evals = Cell::new(0usize);
    let inner_err = Cell::new(0.0f64);
    let outer = integrate_1d(
        |u| match integrate_1d(|v| f(u, v), domain.v0, domain.v1, inner_tol) {
            Ok(r) => {
                inner_evals.set(inner_evals.get() + r.evaluations);
                inner_err.set(inner_err.get().max(r.abs_error));
                r.value
            }
            Err(e) => {
                let first = failure.take().unwrap_or(e);
                failure.set(Some(first));
                T::zero()
            }
        },
        domain.u0,
        domain.u1,
        0.5 * tol,
    );
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let outer = outer?;
    Ok(QuadResult {
        value: outer.value,
        abs_error: outer.abs_error + inner_err.get() * (domain.u1 - domain.u0),
        evaluations: outer.evaluations + inner_evals.get(),
    })
}

/// Geometric ladder `ε_k = eps0 · 2^{-k}`, `k_min ≤ k ≤ k_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ladder {
    pub eps0: f64,
    pub k_min: u32,
    pub k_max: u32,
}

impl Ladder {
    pub fn new(eps0: f64, k_min: u32, k_max: u32) -> Self {
        Self { eps0, k_min, k_max }
    }

    pub fn values(&self) -> Vec<f64> {
        (self.k_min..=self.k_max)
            .map(|k| self.eps0 * 0.5f64.powi(k as i32))
            .collect()
    }
}

/// Correction term added to the `A log ε + B` model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Correction {
    /// `ε^p`
    Power(i32),
    /// `ε^p log ε`
    PowerLog(i32),
}

impl Correction {
    fn eval(self, eps: f64) -> f64 {
        match self {
            Correction::Power(p) => eps.powi(p),
            Correction::PowerLog(p) => eps.powi(p) * eps.ln(),
        }
    }
}

/// Default correction basis `{ε, ε²}`.
pub const DEFAULT_CORRECTIONS: [Correction; 2] = [Correction::Power(1), Correction::Power(2)];

#[derive(Debug, Clone, PartialEq)]
pub struct FinitePartResult {
    /// Constant term `B`.
    pub finite_part: f64,
    /// Coefficient `A` of `log ε`.
    pub log_coefficient: f64,
    /// Root-mean-square residual of the fit.
    pub fit_residual: f64,
    /// Fitted coefficients of the correction terms, in the order given.
    pub corrections: Vec<f64>,
}

/// Least-squares fit of `I(ε) = A log ε + B + Σ c_i φ_i(ε)` to `samples`.
pub fn fit_finite_part(
    samples: &[(f64, f64)],
    corrections: &[Correction],
    max_residual: f64,
) -> Result<FinitePartResult, FitError> {
    let cols = 2 + corrections.len();
    let rows = samples.len();
    if rows < cols {
        return Err(FitError::DegenerateLadder { needed: cols, got: rows });
    }
    let mut design = DMatrix::<f64>::zeros(rows, cols);
    let mut rhs = DVector::<f64>::zeros(rows);
    for (i, &(eps, value)) in samples.iter().enumerate() {
        design[(i, 0)] = eps.ln();
        design[(i, 1)] = 1.0;
        for (j, corr) in corrections.iter().enumerate() {
            design[(i, 2 + j)] = corr.eval(eps);
        }
        rhs[i] = value;
    }
    // Columns differ by many orders of magnitude; equilibrate before solving.
    let scales: Vec<f64> = (0..cols)
        .map(|j| {
            let n = design.column(j).norm();
            if n > 0.0 {
                n
            } else {
                1.0
            }
        })
        .collect();
    let mut scaled = design.clone();
    for (j, s) in scales.iter().enumerate() {
        scaled.column_mut(j).scale_mut(1.0 / s);
    }
    let svd = scaled.svd(true, true);
    let coef = svd.solve(&rhs, 1e-14).map_err(|_| FitError::Singular)?;
    let coef = DVector::from_iterator(cols, coef.iter().zip(scales.iter()).map(|(c, s)| c / s));
    let resid = &design * &coef - &rhs;
    let fit_residual = resid.norm() / (rows as f64).sqrt();
    if !(fit_residual <= max_residual) {
        return Err(FitError::ModelMismatch {
            residual: fit_residual,
            threshold: max_residual,
        });
    }
    Ok(FinitePartResult {
        finite_part: coef[1],
        log_coefficient: coef[0],
        fit_residual,
        corrections: coef.iter().skip(2).copied().collect(),
    })
}

/// Samples `i` on `ladder` and fits the finite part.
pub fn finite_part<F>(
    i: F,
    ladder: &[f64],
    corrections: &[Correction],
    max_residual: f64,
) -> Result<FinitePartResult, FitError>
where
    F: Fn(f64) -> f64,
{
    let samples: Vec<(f64, f64)> = ladder.iter().map(|&e| (e, i(e))).collect();
    fit_finite_part(&samples, corrections, max_residual)
}

/// Least-squares slope of `log |I|` against `log ε`.
pub fn decay_exponent(samples: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(e, v)| *e > 0.0 && v.abs() > 0.0)
        .map(|(e, v)| (e.ln(), v.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx > 0.0 {
        Some(sxy / sxx)
    } else {
        None
    }
}
