//! Minimum-contrast spectral estimation on the real line.
//!
//! Two estimators act on the periodogram of an evenly sampled series. The
//! Whittle functional matches the full density through
//! (4π)⁻¹ ∫ (log f(λ;θ) + I(λ)/f(λ;θ)) w(λ) dλ; the Ibragimov functional
//! normalizes the density to the spectral shape ψ = f/σ²(θ) with
//! σ²(θ) = ∫ f w dλ (so ∫ ψ w dλ = 1) and matches only the shape through
//! −∫ I w log ψ dλ, recovering the scale separately as σ̂² = ∫ I w dλ.
//!
//! Conventions. All frequency functionals are integrals over the whole real
//! line of even integrands; a data grid carries the positive Fourier
//! frequencies 2πk/(n·h) and every grid functional is 2·Σ_{k>0}(...)·Δλ.
//! Line integrals for asymptotic covariances are truncated at a configurable
//! Λ and the discarded-tail gauge is reported, never silently dropped.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::numeric::linalg::{invert, mat_mul};
use crate::numeric::quad::GaussLegendre;

#[derive(Debug, Clone, PartialEq)]
pub enum EstimationError {
    /// A constructor or call argument violates its stated range.
    InvalidParameter(String),
    /// The model density is zero, negative, or non-finite where it is needed.
    NonPositiveDensity(f64),
    /// A normal-equations or sandwich matrix could not be inverted.
    Singular(String),
}

impl core::fmt::Display for EstimationError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EstimationError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            EstimationError::NonPositiveDensity(lam) => {
                write!(f, "model density not positive at frequency {lam}")
            }
            EstimationError::Singular(msg) => write!(f, "singular matrix: {msg}"),
        }
    }
}

/// Positive frequencies λ_1 < λ_2 < ... with the uniform spacing Δλ used to
/// turn sums into line integrals. Even integrands are integrated as
/// 2·Σ_k g(λ_k)·Δλ.
#[derive(Debug, Clone)]
pub struct SpectralGrid {
    pub lams: Vec<f64>,
    pub dlam: f64,
}

impl SpectralGrid {
    /// Positive Fourier frequencies 2πk/(n·step), k = 1..n/2, matching the
    /// layout of `processes::periodogram_fft`.
    pub fn fourier(n: usize, step: f64) -> Result<Self, EstimationError> {
        if n < 4 {
            return Err(EstimationError::InvalidParameter(
                "grid needs n >= 4".to_string(),
            ));
        }
        if !(step > 0.0) || !step.is_finite() {
            return Err(EstimationError::InvalidParameter(
                "step must be positive and finite".to_string(),
            ));
        }
        let dlam = 2.0 * PI / (n as f64 * step);
        let lams = (1..=n / 2).map(|k| k as f64 * dlam).collect();
        Ok(SpectralGrid { lams, dlam })
    }

    /// Arbitrary positive ascending frequencies with a given spacing.
    pub fn new(lams: Vec<f64>, dlam: f64) -> Result<Self, EstimationError> {
        if lams.is_empty() || !(dlam > 0.0) {
            return Err(EstimationError::InvalidParameter(
                "grid needs frequencies and a positive spacing".to_string(),
            ));
        }
        for pair in lams.windows(2) {
            if !(pair[0] < pair[1]) {
                return Err(EstimationError::InvalidParameter(
                    "grid frequencies must be strictly ascending".to_string(),
                ));
            }
        }
        if !(lams[0] > 0.0) || !lams[lams.len() - 1].is_finite() {
            return Err(EstimationError::InvalidParameter(
                "grid frequencies must be positive and finite".to_string(),
            ));
        }
        Ok(SpectralGrid { lams, dlam })
    }

    /// Nyquist bound π/step implied by the largest grid frequency.
    pub fn max_frequency(&self) -> f64 {
        self.lams[self.lams.len() - 1]
    }
}

/// Even nonnegative frequency weight w(λ) entering every contrast and
/// covariance integral.
pub struct WeightFunction {
    eval: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub label: String,
}

impl WeightFunction {
    pub fn new(label: &str, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        WeightFunction {
            eval: Box::new(eval),
            label: label.to_string(),
        }
    }

    /// w(λ) = λ^{2b}/(1+λ²)^a. For shape estimation the exponents must keep
    /// the weighted moments finite: b > 1 and a > b + 2 in the theory this
    /// module verifies through `check_conditions`.
    pub fn rational(b: f64, a: f64) -> Result<Self, EstimationError> {
        if !b.is_finite() || !a.is_finite() || b < 0.0 || a <= b {
            return Err(EstimationError::InvalidParameter(
                "rational weight needs finite 0 <= b < a".to_string(),
            ));
        }
        Ok(WeightFunction {
            eval: Box::new(move |lam: f64| {
                let l2 = lam * lam;
                libm::pow(l2, b) * libm::pow(1.0 + l2, -a)
            }),
            label: format!("rational(b={b}, a={a})"),
        })
    }

    /// w(λ) = 1/(1+λ²), the weight used for plain consistency statements.
    pub fn consistency() -> Self {
        WeightFunction {
            eval: Box::new(|lam: f64| 1.0 / (1.0 + lam * lam)),
            label: "consistency".to_string(),
        }
    }

    pub fn eval(&self, lam: f64) -> f64 {
        (self.eval)(lam)
    }
}

/// Parametric spectral density family f(λ; θ) on a box Θ = ∏[lᵢ, uᵢ],
/// with optional analytic first and second derivatives of log f in θ.
/// Missing derivatives fall back to central finite differences.
pub struct SpectralModelFamily {
    pub dim: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub label: String,
    density: Box<dyn Fn(&[f64], f64) -> f64 + Send + Sync>,
    grad_log: Option<Box<dyn Fn(&[f64], f64) -> Vec<f64> + Send + Sync>>,
    hess_log: Option<Box<dyn Fn(&[f64], f64) -> Vec<Vec<f64>> + Send + Sync>>,
}

impl SpectralModelFamily {
    pub fn new(
        label: &str,
        lower: Vec<f64>,
        upper: Vec<f64>,
        density: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, EstimationError> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(EstimationError::InvalidParameter(
                "parameter box needs matching nonempty bounds".to_string(),
            ));
        }
        for (lo, hi) in lower.iter().zip(upper.iter()) {
            if !lo.is_finite() || !hi.is_finite() || !(lo < hi) {
                return Err(EstimationError::InvalidParameter(
                    "each box side needs finite lower < upper".to_string(),
                ));
            }
        }
        Ok(SpectralModelFamily {
            dim: lower.len(),
            lower,
            upper,
            label: label.to_string(),
            density: Box::new(density),
            grad_log: None,
            hess_log: None,
        })
    }

    pub fn with_grad_log(
        mut self,
        grad: impl Fn(&[f64], f64) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.grad_log = Some(Box::new(grad));
        self
    }

    pub fn with_hess_log(
        mut self,
        hess: impl Fn(&[f64], f64) -> Vec<Vec<f64>> + Send + Sync + 'static,
    ) -> Self {
        self.hess_log = Some(Box::new(hess));
        self
    }

    /// Fractional Riesz-Bessel density c·|λ|^{-2α}(1+λ²)^{-γ} with the
    /// parameter vector ordered θ = (γ, α, c): Bessel decay exponent, Riesz
    /// pole exponent, scale. Derivatives of log f are analytic.
    pub fn frbm(lower: [f64; 3], upper: [f64; 3]) -> Result<Self, EstimationError> {
        if !(lower[0] > 0.0) || !(lower[1] >= 0.0) || !(upper[1] < 0.5) || !(lower[2] > 0.0) {
            return Err(EstimationError::InvalidParameter(
                "need gamma > 0, 0 <= alpha < 1/2, c > 0 across the box".to_string(),
            ));
        }
        let fam = SpectralModelFamily::new("frbm", lower.to_vec(), upper.to_vec(), frbm_density)?;
        Ok(fam
            .with_grad_log(|th: &[f64], lam: f64| {
                let l2 = lam * lam;
                vec![-libm::log1p(l2), -libm::log(l2), 1.0 / th[2]]
            })
            .with_hess_log(|th: &[f64], _lam: f64| {
                let mut h = vec![vec![0.0; 3]; 3];
                h[2][2] = -1.0 / (th[2] * th[2]);
                h
            }))
    }

    /// The Riesz-Bessel shape family with the scale pinned to 1 and
    /// θ = (γ, α). Shape contrasts are invariant under the scale, so this is
    /// the parametrization the Ibragimov-type estimator works on; log f is
    /// linear in θ, making its Hessian identically zero.
    pub fn frbm_shape(lower: [f64; 2], upper: [f64; 2]) -> Result<Self, EstimationError> {
        if !(lower[0] > 0.0) || !(lower[1] >= 0.0) || !(upper[1] < 0.5) {
            return Err(EstimationError::InvalidParameter(
                "need gamma > 0 and 0 <= alpha < 1/2 across the box".to_string(),
            ));
        }
        let fam = SpectralModelFamily::new(
            "frbm-shape",
            lower.to_vec(),
            upper.to_vec(),
            |th: &[f64], lam: f64| frbm_density(&[th[0], th[1], 1.0], lam),
        )?;
        Ok(fam
            .with_grad_log(|_th: &[f64], lam: f64| {
                let l2 = lam * lam;
                vec![-libm::log1p(l2), -libm::log(l2)]
            })
            .with_hess_log(|_th: &[f64], _lam: f64| vec![vec![0.0; 2]; 2]))
    }

    /// Density value, validated positive and finite.
    pub fn eval(&self, theta: &[f64], lam: f64) -> Result<f64, EstimationError> {
        let f = (self.density)(theta, lam);
        if !(f > 0.0) || !f.is_finite() {
            return Err(EstimationError::NonPositiveDensity(lam));
        }
        Ok(f)
    }

    /// ∇_θ log f(λ; θ), analytic when provided, otherwise central
    /// differences with relative step 1e-5.
    pub fn grad_log(&self, theta: &[f64], lam: f64) -> Result<Vec<f64>, EstimationError> {
        if let Some(g) = &self.grad_log {
            return Ok(g(theta, lam));
        }
        let mut out = vec![0.0; self.dim];
        let mut probe = theta.to_vec();
        for i in 0..self.dim {
            let h = 1e-5 * libm::fmax(1.0, libm::fabs(theta[i]));
            probe[i] = theta[i] + h;
            let up = libm::log(self.eval(&probe, lam)?);
            probe[i] = theta[i] - h;
            let dn = libm::log(self.eval(&probe, lam)?);
            probe[i] = theta[i];
            out[i] = (up - dn) / (2.0 * h);
        }
        Ok(out)
    }

    /// Hessian of log f in θ, analytic when provided, otherwise central
    /// differences of `grad_log` with relative step 1e-4.
    pub fn hess_log(&self, theta: &[f64], lam: f64) -> Result<Vec<Vec<f64>>, EstimationError> {
        if let Some(h) = &self.hess_log {
            return Ok(h(theta, lam));
        }
        let mut out = vec![vec![0.0; self.dim]; self.dim];
        let mut probe = theta.to_vec();
        for j in 0..self.dim {
            let h = 1e-4 * libm::fmax(1.0, libm::fabs(theta[j]));
            probe[j] = theta[j] + h;
            let up = self.grad_log(&probe, lam)?;
            probe[j] = theta[j] - h;
            let dn = self.grad_log(&probe, lam)?;
            probe[j] = theta[j];
            for i in 0..self.dim {
                out[i][j] = (up[i] - dn[i]) / (2.0 * h);
            }
        }
        // symmetrize: mixed finite differences need not commute exactly
        for i in 0..self.dim {
            for j in 0..i {
                let m = 0.5 * (out[i][j] + out[j][i]);
                out[i][j] = m;
                out[j][i] = m;
            }
        }
        Ok(out)
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        theta.len() == self.dim
            && theta
                .iter()
                .zip(self.lower.iter().zip(self.upper.iter()))
                .all(|(t, (lo, hi))| *t >= *lo && *t <= *hi && t.is_finite())
    }

    /// Componentwise clamp into the box.
    pub fn project(&self, theta: &[f64]) -> Vec<f64> {
        theta
            .iter()
            .zip(self.lower.iter().zip(self.upper.iter()))
            .map(|(t, (lo, hi))| libm::fmin(libm::fmax(*t, *lo), *hi))
            .collect()
    }
}

fn frbm_density(th: &[f64], lam: f64) -> f64 {
    let l2 = lam * lam;
    th[2] * libm::pow(l2, -th[1]) * libm::pow(1.0 + l2, -th[0])
}

/// ∫_{-Λ}^{Λ} g(λ) dλ for an even integrand with at worst a logarithmic or
/// integrable-power singularity at the origin. The head (0, 1] is computed
/// in the substitution λ = e^u on u ∈ [-200, 0] (smooth, exponentially
/// damped — deep enough that even a |λ|^{-0.9} pole keeps its missed head
/// mass below e^{-20}), the body [1, Λ] on geometrically growing
/// Gauss-Legendre panels.
pub fn line_integral_even(g: impl Fn(f64) -> f64, lmax: f64) -> f64 {
    assert!(lmax.is_finite() && lmax > 0.0, "need finite lmax > 0");
    let gl = GaussLegendre::new(32);
    let mut acc = 0.0;
    let head_top = libm::fmin(1.0, lmax);
    // head: ∫_0^{head_top} g = ∫_{-∞}^{ln head_top} g(e^u) e^u du
    let log_top = libm::log(head_top);
    let mut hi = log_top;
    for _ in 0..40 {
        let lo = hi - 5.0;
        acc += gl.integrate(lo, hi, |u| {
            let lam = libm::exp(u);
            g(lam) * lam
        });
        hi = lo;
    }
    // body: geometric panels [1,2],[2,4],...,[.,Λ]
    let mut lo = head_top;
    while lo < lmax {
        let hi = libm::fmin(lo * 2.0, lmax);
        acc += gl.integrate(lo, 0.5 * (lo + hi), &g) + gl.integrate(0.5 * (lo + hi), hi, &g);
        lo = hi;
    }
    2.0 * acc
}

/// Crude gauge for the mass discarded beyond Λ: the integral over
/// [Λ, 2Λ] ∪ [-2Λ, -Λ], in absolute value.
pub fn line_tail_gauge(g: impl Fn(f64) -> f64, lmax: f64) -> f64 {
    let gl = GaussLegendre::new(32);
    2.0 * libm::fabs(gl.integrate(lmax, 2.0 * lmax, &g))
}

fn grid_weights(
    grid: &SpectralGrid,
    weight: &WeightFunction,
) -> Result<Vec<f64>, EstimationError> {
    let w: Vec<f64> = grid.lams.iter().map(|&l| weight.eval(l)).collect();
    if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(EstimationError::InvalidParameter(
            "weight must be finite and nonnegative on the grid".to_string(),
        ));
    }
    Ok(w)
}

fn check_intensity(grid: &SpectralGrid, intensity: &[f64]) -> Result<(), EstimationError> {
    if intensity.len() != grid.lams.len() {
        return Err(EstimationError::InvalidParameter(format!(
            "intensity length {} != grid length {}",
            intensity.len(),
            grid.lams.len()
        )));
    }
    if intensity.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(EstimationError::InvalidParameter(
            "intensity must be finite and nonnegative".to_string(),
        ));
    }
    Ok(())
}

/// Whittle functional (4π)⁻¹ ∫ (log f + I/f) w dλ, discretized as
/// (2π)⁻¹ Σ_{k>0} (log f(λ_k;θ) + I_k/f(λ_k;θ)) w(λ_k) Δλ.
pub fn whittle_objective(
    grid: &SpectralGrid,
    intensity: &[f64],
    family: &SpectralModelFamily,
    weight: &WeightFunction,
    theta: &[f64],
) -> Result<f64, EstimationError> {
    check_intensity(grid, intensity)?;
    let w = grid_weights(grid, weight)?;
    let mut acc = 0.0;
    for ((&lam, &ik), &wk) in grid.lams.iter().zip(intensity.iter()).zip(w.iter()) {
        let f = family.eval(theta, lam)?;
        acc += (libm::log(f) + ik / f) * wk;
    }
    Ok(acc * grid.dlam / (2.0 * PI))
}

/// Population contrast (4π)⁻¹ ∫ (f₀/f − 1 − log(f₀/f)) w dλ ≥ 0, zero iff
/// f(·;θ) = f(·;θ₀) wherever w > 0.
pub fn whittle_contrast(
    family: &SpectralModelFamily,
    weight: &WeightFunction,
    theta0: &[f64],
    theta: &[f64],
    lmax: f64,
) -> Result<f64, EstimationError> {
    probe_density(family, theta0)?;
    probe_density(family, theta)?;
    let val = line_integral_even(
        |lam| {
            let f0 = frbm_safe(family, theta0, lam);
            let f = frbm_safe(family, theta, lam);
            let ratio = f0 / f;
            (ratio - 1.0 - libm::log(ratio)) * weight.eval(lam)
        },
        lmax,
    );
    Ok(val / (4.0 * PI))
}

// density eval inside quadrature closures: validity was probed beforehand,
// a non-finite value propagates as NaN and is caught by the caller's tests
fn frbm_safe(family: &SpectralModelFamily, theta: &[f64], lam: f64) -> f64 {
    (family.density)(theta, lam)
}

fn probe_density(family: &SpectralModelFamily, theta: &[f64]) -> Result<(), EstimationError> {
    if theta.len() != family.dim {
        return Err(EstimationError::InvalidParameter(format!(
            "theta length {} != family dim {}",
            theta.len(),
            family.dim
        )));
    }
    for &lam in &[1e-6, 0.5, 1.0, 7.3, 113.0] {
        family.eval(theta, lam)?;
    }
    Ok(())
}

/// Scale functional σ²(θ) = ∫ f(λ;θ) w(λ) dλ over the truncated line.
pub fn sigma2_model(
    family: &SpectralModelFamily,
    weight: &WeightFunction,
    theta: &[f64],
    lmax: f64,
) -> Result<f64, EstimationError> {
    probe_density(family, theta)?;
    let s = line_integral_even(|lam| frbm_safe(family, theta, lam) * weight.eval(lam), lmax);
    if !(s > 0.0) || !s.is_finite() {
        return Err(EstimationError::NonPositiveDensity(0.0));
    }
    Ok(s)
}

/// Plug-in scale estimate σ̂² = 2 Σ_{k>0} I_k w(λ_k) Δλ.
pub fn sigma2_estimate(
    grid: &SpectralGrid,
    intensity: &[f64],
    weight: &WeightFunction,
) -> Result<f64, EstimationError> {
    check_intensity(grid, intensity)?;
    let w = grid_weights(grid, weight)?;
    Ok(2.0
        * grid.dlam
        * intensity
            .iter()
            .zip(w.iter())
            .map(|(i, wk)| i * wk)
            .sum::<f64>())
}

/// Shape-matching functional −∫ I w log ψ dλ with ψ = f/σ²(θ) normalized on
/// the same grid, discretized as −2 Σ_{k>0} I_k w_k log ψ(λ_k) Δλ. The grid
/// normalization makes ∫ ψ w dλ = 1 exact by construction; agreement of the
/// grid σ² with the continuum one is a property of the weight, quantified
/// separately by `psi_normalization_defect`.
pub fn ibragimov_objective(
    grid: &SpectralGrid,
    intensity: &[f64],
    family: &SpectralModelFamily,
    weight: &WeightFunction,
    theta: &[f64],
) -> Result<f64, EstimationError> {
    check_intensity(grid, intensity)?;
    let w = grid_weights(grid, weight)?;
    let mut fvals = Vec::with_capacity(grid.lams.len());
    for &lam in &grid.lams {
        fvals.push(family.eval(theta, lam)?);
    }
    let sigma2: f64 = 2.0
        * grid.dlam
        * fvals
            .iter()
            .zip(w.iter())
            .map(|(f, wk)| f * wk)
            .sum::<f64>();
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(EstimationError::NonPositiveDensity(0.0));
    }
    let log_s = libm::log(sigma2);
    let mut acc = 0.0;
    for ((f, &ik), &wk) in fvals.iter().zip(intensity.iter()).zip(w.iter()) {
        acc += ik * wk * (libm::log(*f) - log_s);
    }
    Ok(-2.0 * grid.dlam * acc)
}

/// Population shape contrast ∫ f₀ w log(ψ₀/ψ) dλ ≥ 0 with both shapes
/// normalized against the same truncated-line measure; zero iff the shapes
/// agree wherever w > 0.
pub fn ibragimov_contrast(
    family: &SpectralModelFamily,
    weight: &WeightFunction,
    theta0: &[f64],
    theta: &[f64],
    lmax: f64,
) -> Result<f64, EstimationError> {
    let s0 = sigma2_model(family, weight, theta0, lmax)?;
    let s1 = sigma2_model(family, weight, theta, lmax)?;
    let shift = libm::log(s1) - libm::log(s0);
    let val = line_integral_even(
        |lam| {
            let f0 = frbm_safe(family, theta0, lam);
            let f = frbm_safe(family, theta, lam);
            f0 * weight.eval(lam) * (libm::log(f0) - libm::log(f) + shift)
        },
        lmax,
    );
    Ok(val)
}

/// |2 Σ_k ψ(λ_k) w(λ_k) Δλ − 1| with ψ normalized by the continuum
/// σ²(θ) = ∫ f w dλ: the grid-versus-line normalization mismatch. Small
/// only when the weight suppresses the spectral pole (rational weights with
/// b > 1), which is exactly why shape estimation demands such weights.
pub fn psi_normalization_defect(
    grid: &SpectralGrid,
    family: &SpectralModelFamily,
    weight: &WeightFunction,
    theta: &[f64],
    lmax: f64,
) -> Result<f64, EstimationError> {
    let sigma2 = sigma2_model(family, weight, theta, lmax)?;
    let w = grid_weights(grid, weight)?;
    let mut acc = 0.0;
    for (&lam, &wk) in grid.lams.iter().zip(w.iter()) {
        acc += family.eval(theta, lam)? * wk;
    }
    Ok(libm::fabs(2.0 * grid.dlam * acc / sigma2 - 1.0))
}

// ---------------------------------------------------------------------------
// asymptotic covariance sandwiches

/// Sandwich pieces for the Whittle estimator:
/// W₁ = (4π)⁻¹∫ w ∇log f ∇log fᵀ dλ, W₂ the same with w², and
/// V = (4π)⁻²(d₄/d₂²)(∫ w ∇log f dλ)(∫ w ∇log f dλ)ᵀ, combined as
/// Σ = W₁⁻¹(W₂+V)W₁⁻¹. The V constant is pinned by the exact variance of
/// weighted quadratic forms: the score is √T·∫(I−f)φᵢ dλ with
/// φᵢ = −(4π)⁻¹wgᵢ/f, whose covariance limit 4π∫f²φφᵀ + κ(∫fφ)(∫fφ)ᵀ is
/// machine-checked against finite-size cumulants in the process-level
/// tests; the Gaussian block reproduces W₂ exactly and the unweighted
/// torus case collapses to the classical efficiency bound 4π·W₁⁻¹.
#[derive(Debug, Clone)]
pub struct WhittleCovariance {
    pub w1: Vec<Vec<f64>>,
    pub w2: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub sigma: Option<Vec<Vec<f64>>>,
    /// Truncation radius of every line integral above.
    pub lmax: f64,
    /// Largest [Λ, 2Λ] tail gauge across the assembled integrands.
    pub tail: f64,
}

pub fn whittle_asymptotic_cov(
    family: &SpectralModelFamily,
    weight: &WeightFunction,
    theta: &[f64],
    d4_over_d2sq: f64,
    lmax: f64,
) -> Result<WhittleCovariance, EstimationError> {
    probe_density(family, theta)?;
    let d = family.dim;
    let grad = |lam: f64| family.grad_log(theta, lam).expect("gradient probe");
    // probe the gradient path once so closure expects cannot fire later
    family.grad_log(theta, 1.0)?;
    let mut w1 = vec![vec![0.0; d]; d];
    let mut w2 = vec![vec![0.0; d]; d];
    let mut tail = 0.0f64;
    for i in 0..d {
        for j in 0..=i {
            let gij = |lam: f64| {
                let g = grad(lam);
                g[i] * g[j]
            };
            let a = line_integral_even(|lam| weight.eval(lam) * gij(lam), lmax) / (4.0 * PI);
            let b = {
                let wv = |lam: f64| {
                    let w = weight.eval(lam);
                    w * w * gij(lam)
                };
                let t = line_tail_gauge(&wv, lmax);
                tail = libm::fmax(tail, t);
                line_integral_even(wv, lmax) / (4.0 * PI)
            };
            tail = libm::fmax(
                tail,
                line_tail_gauge(|lam| weight.eval(lam) * gij(lam), lmax),
            );
            w1[i][j] = a;
            w1[j][i] = a;
            w2[i][j] = b;
            w2[j][i] = b;
        }
    }
    let mut jvec = vec![0.0; d];
    for (i, slot) in jvec.iter_mut().enumerate() {
        *slot = line_integral_even(|lam| weight.eval(lam) * grad(lam)[i], lmax);
    }
    let mut v = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..d {
            v[i][j] = d4_over_d2sq * jvec[i] * jvec[j] / (16.0 * PI * PI);
        }
    }
    let sigma = sandwich(&w1, &add(&w2, &v));
    Ok(WhittleCovariance {
        w1,
        w2,
        v,
        sigma,
        lmax,
        tail,
    })
}

/// Sandwich pieces for the shape estimator, each computed along two
/// independent routes: `s`/`a` assemble log-density derivatives
/// analytically (s_ij = ∫ f w ∂²ᵢⱼ log ψ dλ,
/// a_ij = 4π∫ f²w² ∂ᵢlog ψ ∂ⱼlog ψ dλ + 2π(d₄/d₂²)·σ⁴·∏∫ w ∂ψ dλ), while
/// `s_fd`/`a_fd` differentiate the normalized shape ψ(λ;θ) = f/σ²(θ) by
/// central differences in θ (s_ij = σ²∫ w (∂²ᵢⱼψ − ∂ᵢψ∂ⱼψ/ψ) dλ,
/// a_ij = 4πσ⁴∫ w² ∂ᵢψ∂ⱼψ dλ + same d₄ term). Agreement of the routes is a
/// correctness check, not an averaging device. Note the normalization
/// ∫ ψ w dλ ≡ 1 forces ∫ w ∂ᵢψ dλ = 0, so the fourth-cumulant term
/// vanishes identically and Σ = S⁻¹AS⁻¹ does not depend on the innovation
/// family; `normalization_gradient` reports the numerically realized value.
#[derive(Debug, Clone)]
pub struct IbragimovCovariance {
    pub s: Vec<Vec<f64>>,
    pub s_fd: Vec<Vec<f64>>,
    pub a: Vec<Vec<f64>>,
    pub a_fd: Vec<Vec<f64>>,
    pub sigma: Option<Vec<Vec<f64>>>,
    pub sigma2: f64,
    pub normalization_gradient: Vec<f64>,
    pub lmax: f64,
}

pub fn ibragimov_asymptotic_cov(
    family: &SpectralModelFamily,
    weight: &WeightFunction,
    theta: &[f64],
    d4_over_d2sq: f64,
    lmax: f64,
) -> Result<IbragimovCovariance, EstimationError> {
    probe_density(family, theta)?;
    family.grad_log(theta, 1.0)?;
    family.hess_log(theta, 1.0)?;
    let d = family.dim;
    let f = |lam: f64| frbm_safe(family, theta, lam);
    let w = |lam: f64| weight.eval(lam);
    let grad = |lam: f64| family.grad_log(theta, lam).expect("gradient probe");
    let hess = |lam: f64| family.hess_log(theta, lam).expect("hessian probe");

    let sigma2 = line_integral_even(|lam| f(lam) * w(lam), lmax);
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(EstimationError::NonPositiveDensity(0.0));
    }
    // μ_i = ∂_i log σ², M_ij = (1/σ²)∫ w f (g_i g_j + H_ij)
    let mut mu = vec![0.0; d];
    for (i, slot) in mu.iter_mut().enumerate() {
        *slot = line_integral_even(|lam| w(lam) * f(lam) * grad(lam)[i], lmax) / sigma2;
    }
    let mut s = vec![vec![0.0; d]; d];
    let mut a = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..=i {
            let m_ij = line_integral_even(
                |lam| {
                    let g = grad(lam);
                    w(lam) * f(lam) * (g[i] * g[j] + hess(lam)[i][j])
                },
                lmax,
            ) / sigma2;
            let hlog_sigma = m_ij - mu[i] * mu[j];
            // s_ij = ∫ f w H_ij dλ − σ²·∂²_ij log σ²
            let fh = line_integral_even(|lam| f(lam) * w(lam) * hess(lam)[i][j], lmax);
            let sij = fh - sigma2 * hlog_sigma;
            s[i][j] = sij;
            s[j][i] = sij;
            let aij = 4.0
                * PI
                * line_integral_even(
                    |lam| {
                        let g = grad(lam);
                        let fv = f(lam);
                        let wv = w(lam);
                        fv * fv * wv * wv * (g[i] - mu[i]) * (g[j] - mu[j])
                    },
                    lmax,
                );
            a[i][j] = aij;
            a[j][i] = aij;
        }
    }
    // analytic-route fourth-cumulant factors σ²∫ w ∂_i ψ dλ = σ²(μ_i − μ_i)
    // are exactly zero; the fd route below realizes them numerically
    let sigma = sandwich(&s, &a);

    // finite-difference route through the normalized shape itself
    let mut hstep = vec![0.0; d];
    for (i, slot) in hstep.iter_mut().enumerate() {
        *slot = 1e-4 * libm::fmax(1.0, libm::fabs(theta[i]));
    }
    let sigma2_at = |th: &[f64]| -> f64 {
        line_integral_even(|lam| frbm_safe(family, th, lam) * w(lam), lmax)
    };
    let shift = |di: i32, i: usize, dj: i32, j: usize| -> Vec<f64> {
        let mut th = theta.to_vec();
        th[i] += di as f64 * hstep[i];
        th[j] += dj as f64 * hstep[j];
        th
    };
    let psi = |th: &[f64], s2: f64, lam: f64| frbm_safe(family, th, lam) / s2;
    let s2_base = sigma2_at(theta);
    let mut s_fd = vec![vec![0.0; d]; d];
    let mut a_fd = vec![vec![0.0; d]; d];
    let mut norm_grad = vec![0.0; d];
    // first derivatives ∂_i ψ and the reported normalization gradients
    let mut plus = Vec::with_capacity(d);
    let mut minus = Vec::with_capacity(d);
    for i in 0..d {
        let tp = shift(1, i, 0, i);
        let tm = shift(-1, i, 0, i);
        let sp = sigma2_at(&tp);
        let sm = sigma2_at(&tm);
        plus.push((tp, sp));
        minus.push((tm, sm));
    }
    let dpsi = |i: usize, lam: f64| -> f64 {
        (psi(&plus[i].0, plus[i].1, lam) - psi(&minus[i].0, minus[i].1, lam)) / (2.0 * hstep[i])
    };
    for (i, slot) in norm_grad.iter_mut().enumerate() {
        *slot = line_integral_even(|lam| w(lam) * dpsi(i, lam), lmax);
    }
    for i in 0..d {
        for j in 0..=i {
            let d2psi: Box<dyn Fn(f64) -> f64 + '_> = if i == j {
                let (tp, sp) = plus[i].clone();
                let (tm, sm) = minus[i].clone();
                let h2 = hstep[i] * hstep[i];
                Box::new(move |lam: f64| {
                    (psi(&tp, sp, lam) - 2.0 * psi(theta, s2_base, lam) + psi(&tm, sm, lam)) / h2
                })
            } else {
                let tpp = shift(1, i, 1, j);
                let tpm = shift(1, i, -1, j);
                let tmp = shift(-1, i, 1, j);
                let tmm = shift(-1, i, -1, j);
                let (spp, spm, smp, smm) = (
                    sigma2_at(&tpp),
                    sigma2_at(&tpm),
                    sigma2_at(&tmp),
                    sigma2_at(&tmm),
                );
                let h4 = 4.0 * hstep[i] * hstep[j];
                Box::new(move |lam: f64| {
                    (psi(&tpp, spp, lam) - psi(&tpm, spm, lam) - psi(&tmp, smp, lam)
                        + psi(&tmm, smm, lam))
                        / h4
                })
            };
            let sij = s2_base
                * line_integral_even(
                    |lam| {
                        w(lam)
                            * (d2psi(lam)
                                - dpsi(i, lam) * dpsi(j, lam) / psi(theta, s2_base, lam))
                    },
                    lmax,
                );
            s_fd[i][j] = sij;
            s_fd[j][i] = sij;
            let s4 = s2_base * s2_base;
            let aij = 4.0
                * PI
                * s4
                * line_integral_even(
                    |lam| {
                        let wv = w(lam);
                        wv * wv * dpsi(i, lam) * dpsi(j, lam)
                    },
                    lmax,
                )
                + 2.0 * PI * d4_over_d2sq * s4 * norm_grad[i] * norm_grad[j];
            a_fd[i][j] = aij;
            a_fd[j][i] = aij;
        }
    }

    Ok(IbragimovCovariance {
        s,
        s_fd,
        a,
        a_fd,
        sigma,
        sigma2,
        normalization_gradient: norm_grad,
        lmax,
    })
}

fn add(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    a.iter()
        .zip(b.iter())
        .map(|(ra, rb)| ra.iter().zip(rb.iter()).map(|(x, y)| x + y).collect())
        .collect()
}

/// M⁻¹ K M⁻¹, or None when M is numerically singular.
fn sandwich(m: &[Vec<f64>], k: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let minv = invert(m)?;
    Some(mat_mul(&mat_mul(&minv, k), &minv))
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let scale = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, x| libm::fmax(acc, libm::fabs(*x)))
        .max(1e-300);
    for _ in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off = libm::fmax(off, libm::fabs(m[i][j]));
                }
            }
        }
        if off < 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if libm::fabs(m[p][q]) < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (m[q][q] - m[p][p]) / m[p][q];
                let t = libm::copysign(1.0, theta)
                    / (libm::fabs(theta) + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    eig
}

// ---------------------------------------------------------------------------
// optimization

#[derive(Debug, Clone)]
pub struct FitConfig {
    pub max_iter: usize,
    /// Relative simplex diameter declaring convergence.
    pub tol: f64,
    /// Number of low-discrepancy starting points.
    pub starts: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            max_iter: 4000,
            tol: 1e-6,
            starts: 5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub theta: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
    pub evaluations: usize,
    /// Best objective value reached from each start, for basin diagnostics.
    pub start_values: Vec<f64>,
}

/// Box-constrained Nelder-Mead with deterministic low-discrepancy restarts.
/// Every candidate vertex is clamped into the box. Convergence means the
/// relative simplex diameter fell below `tol`; a result that never met it is
/// returned with `converged == false`, never as an error.
pub fn minimize(
    f: &dyn Fn(&[f64]) -> f64,
    lower: &[f64],
    upper: &[f64],
    cfg: &FitConfig,
) -> FitOutcome {
    assert!(
        !lower.is_empty() && lower.len() == upper.len(),
        "box bounds must match"
    );
    let dim = lower.len();
    let starts = cfg.starts.max(1);
    let mut best: Option<FitOutcome> = None;
    let mut start_values = Vec::with_capacity(starts);
    let alphas = kronecker_alphas(dim);
    for k in 0..starts {
        let mut x0 = vec![0.0; dim];
        for i in 0..dim {
            // R_d Kronecker sequence, pulled 8% inside the box edges
            let u = libm::fmod(0.5 + (k as f64 + 1.0) * alphas[i], 1.0);
            x0[i] = lower[i] + (0.08 + 0.84 * u) * (upper[i] - lower[i]);
        }
        let run = nelder_mead(f, &x0, lower, upper, cfg);
        start_values.push(run.1);
        let replace = match &best {
            None => true,
            Some(b) => {
                (run.3 && !b.converged) || (run.3 == b.converged && run.1 < b.value)
            }
        };
        if replace {
            best = Some(FitOutcome {
                theta: run.0,
                value: run.1,
                converged: run.3,
                iterations: run.2,
                evaluations: run.4,
                start_values: Vec::new(),
            });
        }
    }
    let mut out = best.expect("at least one start");
    out.start_values = start_values;
    out
}

/// Smallest-solution weights of the R_d sequence: α_i = φ⁻⁽ⁱ⁺¹⁾ where φ is
/// the positive root of x^{d+1} = x + 1.
fn kronecker_alphas(dim: usize) -> Vec<f64> {
    let p = dim as f64 + 1.0;
    let mut phi = 1.5f64;
    for _ in 0..64 {
        let f = libm::pow(phi, p) - phi - 1.0;
        let df = p * libm::pow(phi, p - 1.0) - 1.0;
        let step = f / df;
        phi -= step;
        if libm::fabs(step) < 1e-15 {
            break;
        }
    }
    (0..dim)
        .map(|i| libm::pow(phi, -(i as f64 + 1.0)))
        .collect()
}

fn clamp_into(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((xi, lo), hi) in x.iter_mut().zip(lower.iter()).zip(upper.iter()) {
        *xi = libm::fmin(libm::fmax(*xi, *lo), *hi);
    }
}

#[allow(clippy::type_complexity)]
fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    lower: &[f64],
    upper: &[f64],
    cfg: &FitConfig,
) -> (Vec<f64>, f64, usize, bool, usize) {
    let dim = start.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64]| {
        evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    // initial simplex: bump each coordinate by 8% of its box side
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let v0 = start.to_vec();
    let f0 = eval(&v0);
    simplex.push((v0, f0));
    for i in 0..dim {
        let mut v = start.to_vec();
        let bump = 0.08 * (upper[i] - lower[i]);
        v[i] = if v[i] + bump <= upper[i] {
            v[i] + bump
        } else {
            v[i] - bump
        };
        clamp_into(&mut v, lower, upper);
        let fv = eval(&v);
        simplex.push((v, fv));
    }
    let mut iterations = 0usize;
    let mut converged = false;
    while iterations < cfg.max_iter {
        iterations += 1;
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("no NaN objective"));
        // relative diameter against the incumbent best vertex
        let mut diam = 0.0f64;
        for v in simplex.iter().skip(1) {
            for i in 0..dim {
                diam = libm::fmax(
                    diam,
                    libm::fabs(v.0[i] - simplex[0].0[i]) / (1.0 + libm::fabs(simplex[0].0[i])),
                );
            }
        }
        if diam < cfg.tol {
            converged = true;
            break;
        }
        let mut centroid = vec![0.0; dim];
        for v in simplex.iter().take(dim) {
            for i in 0..dim {
                centroid[i] += v.0[i] / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let mut reflect = vec![0.0; dim];
        for i in 0..dim {
            reflect[i] = centroid[i] + (centroid[i] - worst.0[i]);
        }
        clamp_into(&mut reflect, lower, upper);
        let fr = eval(&reflect);
        if fr < simplex[0].1 {
            let mut expand = vec![0.0; dim];
            for i in 0..dim {
                expand[i] = centroid[i] + 2.0 * (centroid[i] - worst.0[i]);
            }
            clamp_into(&mut expand, lower, upper);
            let fe = eval(&expand);
            simplex[dim] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflect, fr);
        } else {
            let outside = fr < worst.1;
            let mut contract = vec![0.0; dim];
            for i in 0..dim {
                contract[i] = if outside {
                    centroid[i] + 0.5 * (reflect[i] - centroid[i])
                } else {
                    centroid[i] + 0.5 * (worst.0[i] - centroid[i])
                };
            }
            clamp_into(&mut contract, lower, upper);
            let fc = eval(&contract);
            if fc < if outside { fr } else { worst.1 } {
                simplex[dim] = (contract, fc);
            } else {
                // shrink toward the best vertex
                let best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    for i in 0..dim {
                        v.0[i] = best[i] + 0.5 * (v.0[i] - best[i]);
                    }
                    v.1 = eval(&v.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("no NaN objective"));
    (
        simplex[0].0.clone(),
        simplex[0].1,
        iterations,
        converged,
        evals,
    )
}

/// Minimize the Whittle functional over the family box.
pub fn whittle_fit(
    grid: &SpectralGrid,
    intensity: &[f64],
    family: &SpectralModelFamily,
    weight: &WeightFunction,
    cfg: &FitConfig,
) -> Result<FitOutcome, EstimationError> {
    check_intensity(grid, intensity)?;
    grid_weights(grid, weight)?;
    let obj = |th: &[f64]| {
        whittle_objective(grid, intensity, family, weight, th).unwrap_or(f64::INFINITY)
    };
    Ok(minimize(&obj, &family.lower, &family.upper, cfg))
}

/// Minimize the shape functional over the family box. For scale-carrying
/// families the scale coordinate is flat in the objective; fit the matching
/// shape family instead and recover the scale from `sigma2_estimate`.
pub fn ibragimov_fit(
    grid: &SpectralGrid,
    intensity: &[f64],
    family: &SpectralModelFamily,
    weight: &WeightFunction,
    cfg: &FitConfig,
) -> Result<FitOutcome, EstimationError> {
    check_intensity(grid, intensity)?;
    grid_weights(grid, weight)?;
    let obj = |th: &[f64]| {
        ibragimov_objective(grid, intensity, family, weight, th).unwrap_or(f64::INFINITY)
    };
    Ok(minimize(&obj, &family.lower, &family.upper, cfg))
}

// ---------------------------------------------------------------------------
// regularity condition checks

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionStatus {
    Pass,
    Fail,
    /// The numeric evidence neither confirms nor refutes the condition.
    Inconclusive,
}

impl core::fmt::Display for ConditionStatus {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ConditionStatus::Pass => write!(f, "pass"),
            ConditionStatus::Fail => write!(f, "fail"),
            ConditionStatus::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConditionEntry {
    pub name: String,
    pub status: ConditionStatus,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub entries: Vec<ConditionEntry>,
}

impl ConditionReport {
    pub fn has_failure(&self) -> bool {
        self.entries
            .iter()
            .any(|e| e.status == ConditionStatus::Fail)
    }

    pub fn entry(&self, name: &str) -> Option<&ConditionEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

/// Ladder for the deterministic bias-decay check: the expected periodogram
/// of a length-T sample is computed exactly from the band-limited model
/// covariance, and the √T-scaled weighted spectral bias must shrink as T
/// grows.
#[derive(Debug, Clone)]
pub struct BiasLadder {
    pub theta0: Vec<f64>,
    pub sizes: Vec<usize>,
    pub step: f64,
    /// Refinement factor of the covariance quadrature grid, as in the
    /// spectral synthesis sampler.
    pub oversample: usize,
}

#[derive(Debug, Clone)]
pub struct ConditionOptions {
    /// Parameter points the pointwise checks sweep over.
    pub theta_sample: Vec<Vec<f64>>,
    /// (b, a) of a rational weight λ^{2b}(1+λ²)^{-a}; checked against the
    /// shape-estimation constraints b > 1, a > b + 2, a > A + 2 with A the
    /// length of the first (decay-exponent) box side.
    pub frbm_weight: Option<(f64, f64)>,
    /// Conjugate pair (p, q) declared for the Hölder split of the weighted
    /// contrast; needs 1/p + 1/q <= 1/2 plus finite weighted power integrals.
    pub declared_pq: Option<(f64, f64)>,
    pub bias_ladder: Option<BiasLadder>,
    pub lmax: f64,
}

/// Runs every verifiable regularity check and reports one entry each.
/// Statuses are evidence grades: `Pass`/`Fail` only where the numeric
/// evidence is decisive, `Inconclusive` otherwise.
pub fn check_conditions(
    family: &SpectralModelFamily,
    weight: &WeightFunction,
    opts: &ConditionOptions,
) -> Result<ConditionReport, EstimationError> {
    let mut entries = Vec::new();
    let probe: Vec<f64> = (0..120)
        .map(|k| 0.02 + 8.0 * (k as f64 + 0.5) / 120.0)
        .collect();

    // weight positivity and evenness on the probe grid
    {
        let bad = probe
            .iter()
            .find(|&&l| !(weight.eval(l) >= 0.0) || !weight.eval(l).is_finite());
        let uneven = probe
            .iter()
            .map(|&l| libm::fabs(weight.eval(l) - weight.eval(-l)))
            .fold(0.0f64, libm::fmax);
        entries.push(ConditionEntry {
            name: "weight-positivity".to_string(),
            status: if bad.is_none() && uneven < 1e-12 {
                ConditionStatus::Pass
            } else {
                ConditionStatus::Fail
            },
            detail: format!("max |w(λ)-w(-λ)| = {uneven:.2e} over 120 probe points"),
        });
    }

    // identifiability: distinct parameters must give distinct densities
    {
        let sample = &opts.theta_sample;
        let mut status = ConditionStatus::Inconclusive;
        let mut detail = "need at least two parameter points".to_string();
        if sample.len() >= 2 {
            let mut min_sep = f64::INFINITY;
            let mut worst_pair = (0usize, 0usize);
            for i in 0..sample.len() {
                for j in (i + 1)..sample.len() {
                    let th_gap = sample[i]
                        .iter()
                        .zip(sample[j].iter())
                        .map(|(x, y)| libm::fabs(x - y))
                        .fold(0.0f64, libm::fmax);
                    if th_gap < 1e-12 {
                        continue;
                    }
                    let mut gap = 0.0f64;
                    let mut scale = 0.0f64;
                    for &lam in &probe {
                        let fi = family.eval(&sample[i], lam)?;
                        let fj = family.eval(&sample[j], lam)?;
                        gap = libm::fmax(gap, libm::fabs(fi - fj));
                        scale = libm::fmax(scale, libm::fmax(fi, fj));
                    }
                    let rel = gap / scale.max(1e-300);
                    if rel < min_sep {
                        min_sep = rel;
                        worst_pair = (i, j);
                    }
                }
            }
            if min_sep.is_finite() {
                status = if min_sep > 1e-8 {
                    ConditionStatus::Pass
                } else {
                    ConditionStatus::Fail
                };
                detail = format!(
                    "smallest relative sup-distance {min_sep:.2e} between sample points {} and {}",
                    worst_pair.0, worst_pair.1
                );
            }
        }
        entries.push(ConditionEntry {
            name: "identifiability".to_string(),
            status,
            detail,
        });
    }

    // shape-estimation weight exponent constraints
    if let Some((b, a)) = opts.frbm_weight {
        let big_a = family.upper[0] - family.lower[0];
        let c1 = b > 1.0;
        let c2 = a > b + 2.0;
        let c3 = a > big_a + 2.0;
        entries.push(ConditionEntry {
            name: "weight-exponents".to_string(),
            status: if c1 && c2 && c3 {
                ConditionStatus::Pass
            } else {
                ConditionStatus::Fail
            },
            detail: format!(
                "b > 1: {c1}; a > b + 2: {c2}; a > A + 2 with A = {big_a}: {c3}"
            ),
        });
    }

    // Hölder pair and stabilization of its weighted power integrals
    if let Some((p, q)) = opts.declared_pq {
        let holder_ok = p > 0.0 && q > 0.0 && 1.0 / p + 1.0 / q <= 0.5 + 1e-12;
        let mut status = if holder_ok {
            ConditionStatus::Pass
        } else {
            ConditionStatus::Fail
        };
        let mut details = format!("1/p + 1/q = {:.4}", 1.0 / p + 1.0 / q);
        if holder_ok {
            for th in &opts.theta_sample {
                probe_density(family, th)?;
                let fp = |lmax: f64| {
                    line_integral_even(
                        |lam| libm::pow(frbm_safe(family, th, lam) * weight.eval(lam), p),
                        lmax,
                    )
                };
                let wq =
                    |lmax: f64| line_integral_even(|lam| libm::pow(weight.eval(lam), q), lmax);
                let (f1, f2) = (fp(opts.lmax), fp(2.0 * opts.lmax));
                let (w1, w2) = (wq(opts.lmax), wq(2.0 * opts.lmax));
                let rel_f = libm::fabs(f2 - f1) / f2.max(1e-300);
                let rel_w = libm::fabs(w2 - w1) / w2.max(1e-300);
                if !f2.is_finite() || !w2.is_finite() {
                    status = ConditionStatus::Fail;
                } else if (rel_f > 1e-3 || rel_w > 1e-3) && status == ConditionStatus::Pass {
                    status = ConditionStatus::Inconclusive;
                }
                details = format!(
                    "{details}; (fw)^p rel-change {rel_f:.1e}, w^q rel-change {rel_w:.1e}"
                );
            }
        }
        entries.push(ConditionEntry {
            name: "integrability-pair".to_string(),
            status,
            detail: details,
        });
    }

    // empirical √T-bias decay along a simulated size ladder
    if let Some(ladder) = &opts.bias_ladder {
        entries.push(bias_decay_entry(family, weight, ladder)?);
    }

    Ok(ConditionReport { entries })
}

fn bias_decay_entry(
    family: &SpectralModelFamily,
    weight: &WeightFunction,
    ladder: &BiasLadder,
) -> Result<ConditionEntry, EstimationError> {
    if ladder.sizes.len() < 2 || ladder.oversample == 0 || !(ladder.step > 0.0) {
        return Err(EstimationError::InvalidParameter(
            "bias ladder needs >= 2 sizes, a positive step, and oversample >= 1".to_string(),
        ));
    }
    probe_density(family, &ladder.theta0)?;
    family.grad_log(&ladder.theta0, 1.0)?;
    let theta0 = &ladder.theta0;
    let h = ladder.step;
    let mut gauges = Vec::with_capacity(ladder.sizes.len());
    for &n in &ladder.sizes {
        // band-limited model covariance on the half-offset midpoint grid,
        // the same object the spectral synthesis sampler realizes exactly
        let g_len = (n * ladder.oversample).next_power_of_two();
        let dl = 2.0 * PI / (g_len as f64 * h);
        let mut r = vec![0.0; n];
        for (m, slot) in r.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in 0..g_len / 2 {
                let lam = (k as f64 + 0.5) * dl;
                acc += frbm_safe(family, theta0, lam) * libm::cos(lam * m as f64 * h);
            }
            *slot = 2.0 * acc * dl;
        }
        // exact expected periodogram: Fejer-windowed cosine series of r
        let dlam = 2.0 * PI / (n as f64 * h);
        let span = n as f64 * h;
        let mut accs = vec![0.0; family.dim];
        for k in 1..=n / 2 {
            let lam = k as f64 * dlam;
            let mut expected = r[0];
            for (m, rm) in r.iter().enumerate().skip(1) {
                expected += 2.0 * (1.0 - m as f64 / n as f64) * rm * libm::cos(lam * m as f64 * h);
            }
            expected *= h / (2.0 * PI);
            let f0 = family.eval(theta0, lam)?;
            let grad = family.grad_log(theta0, lam)?;
            let defect = (expected - f0) * weight.eval(lam);
            for (acc, g) in accs.iter_mut().zip(grad.iter()) {
                *acc += defect * g;
            }
        }
        let worst = accs
            .iter()
            .map(|acc| libm::fabs(libm::sqrt(span) * 2.0 * acc * dlam))
            .fold(0.0f64, libm::fmax);
        gauges.push(worst);
    }
    let first = gauges[0];
    let last = gauges[gauges.len() - 1];
    let status = if last < first {
        ConditionStatus::Pass
    } else if last < 1.5 * first {
        ConditionStatus::Inconclusive
    } else {
        ConditionStatus::Fail
    };
    let detail = format!(
        "sqrt(T)-weighted spectral bias gauges along sizes {:?}: {:?}",
        ladder.sizes,
        gauges
            .iter()
            .map(|g| libm::round(*g * 1e6) / 1e6)
            .collect::<Vec<f64>>()
    );
    Ok(ConditionEntry {
        name: "bias-decay".to_string(),
        status,
        detail,
    })
}
