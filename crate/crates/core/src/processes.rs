//! Moving-average process simulation, higher-order spectral densities,
//! periodograms, Wick-centered quadratic forms, Appell sums, and seeded
//! Monte Carlo CLT experiments with exactly computed variance targets.
//!
//! Conventions, fixed once for every operation here: the spectral density is
//! f(λ) = d₂·a(λ)a(−λ), the autocovariance is r(τ) = ∫ e^{iτλ} f(λ) dλ
//! (Lebesgue), and a model on a grid of step h stores moving-average weights
//! w_j with per-step innovation cumulants h·d_k, so that
//! r(mh) = d₂·h·Σ_j w_j w_{j+m} and the transfer function is
//! a(λ) = h·(2π)^{−1/2}·Σ_j w_j e^{−ijhλ}. With h = 1 and w = (1) this is
//! unit-variance white noise with f ≡ d₂/(2π).

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::Distribution;

use crate::numeric::fft;
use crate::wick::appell_univariate;
use crate::Complex64;

pub use crate::special::{matern_covariance, rb_time_kernel};

#[derive(Debug, Clone, PartialEq)]
pub enum ProcessError {
    /// A constructor argument violates its stated range.
    InvalidParameter(String),
    /// The requested kernel cannot meet the truncation mass tolerance.
    Truncation,
    /// Spectral density evaluated at a signaled pole.
    SpectralPole,
    /// The operation has no defined target or sampler for this configuration.
    Unsupported(String),
}

impl core::fmt::Display for ProcessError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ProcessError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            ProcessError::Truncation => write!(f, "kernel truncation mass exceeds tolerance"),
            ProcessError::SpectralPole => write!(f, "spectral density pole at the origin"),
            ProcessError::Unsupported(msg) => write!(f, "unsupported configuration: {msg}"),
        }
    }
}

/// Relative L₂ mass the discarded moving-average tail may carry.
pub const TRUNCATION_TOL: f64 = 1e-6;

/// Innovation distribution of the i.i.d. driving noise, identified by its
/// cumulant sequence d_k. All families are centered.
#[derive(Debug, Clone, PartialEq)]
pub enum InnovationFamily {
    Gaussian { variance: f64 },
    /// Gamma(shape, rate) recentered to mean zero: d_k = shape·(k−1)!/rate^k.
    CenteredGamma { shape: f64, rate: f64 },
    /// ±scale with probability 1/2 each; supported only on unit-step grids
    /// because its cumulants cannot be scaled consistently with time.
    TwoPoint { scale: f64 },
}

impl InnovationFamily {
    /// k-th cumulant d_k of one innovation (k ≥ 1; d₁ = 0 by centering).
    pub fn cumulant(&self, k: usize) -> f64 {
        assert!(k >= 1);
        match self {
            InnovationFamily::Gaussian { variance } => {
                if k == 2 {
                    *variance
                } else {
                    0.0
                }
            }
            InnovationFamily::CenteredGamma { shape, rate } => {
                if k == 1 {
                    0.0
                } else {
                    let mut fact = 1.0f64;
                    for j in 2..k {
                        fact *= j as f64;
                    }
                    shape * fact / libm::pow(*rate, k as f64)
                }
            }
            InnovationFamily::TwoPoint { scale } => {
                // log E e^{tξ} = log cosh(t·scale); coefficients up to order 8.
                const EVEN: [f64; 4] = [1.0, -2.0, 16.0, -272.0];
                if k % 2 == 1 {
                    0.0
                } else {
                    assert!(k <= 8, "two-point cumulants tabulated through order 8");
                    EVEN[k / 2 - 1] * libm::pow(*scale, k as f64)
                }
            }
        }
    }

    fn validate(&self, step: f64) -> Result<(), ProcessError> {
        let ok = match self {
            InnovationFamily::Gaussian { variance } => *variance > 0.0 && variance.is_finite(),
            InnovationFamily::CenteredGamma { shape, rate } => {
                *shape > 0.0 && *rate > 0.0 && shape.is_finite() && rate.is_finite()
            }
            InnovationFamily::TwoPoint { scale } => {
                if step != 1.0 {
                    return Err(ProcessError::Unsupported(String::from(
                        "two-point innovations require a unit-step grid",
                    )));
                }
                *scale > 0.0 && scale.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(ProcessError::InvalidParameter(String::from(
                "innovation parameters must be positive and finite",
            )))
        }
    }
}

/// Draws one replica's worth of per-step innovations, each with cumulants
/// h·d_k. Samples are drawn in ascending time order from a dedicated stream.
struct InnovationSampler<'a> {
    family: &'a InnovationFamily,
    step: f64,
    gamma: Option<rand_distr::Gamma<f64>>,
}

impl<'a> InnovationSampler<'a> {
    fn new(family: &'a InnovationFamily, step: f64) -> Self {
        let gamma = match family {
            InnovationFamily::CenteredGamma { shape, rate } => {
                Some(rand_distr::Gamma::new(shape * step, 1.0 / rate).expect("validated"))
            }
            _ => None,
        };
        InnovationSampler { family, step, gamma }
    }

    fn sample(&self, rng: &mut ChaCha12Rng) -> f64 {
        match self.family {
            InnovationFamily::Gaussian { variance } => {
                let z: f64 = rand_distr::StandardNormal.sample(rng);
                z * libm::sqrt(variance * self.step)
            }
            InnovationFamily::CenteredGamma { shape, rate } => {
                let g = self.gamma.as_ref().expect("constructed").sample(rng);
                g - shape * self.step / rate
            }
            InnovationFamily::TwoPoint { scale } => {
                let z: f64 = rand_distr::StandardNormal.sample(rng);
                if z >= 0.0 {
                    *scale
                } else {
                    -*scale
                }
            }
        }
    }
}

/// Moving-average model X_t = Σ_j w_j ζ_{t−j} on a grid of step h, with ζ the
/// per-step innovations. Weights are stored from lag `offset` upward.
pub struct LinearProcessModel {
    weights: Vec<f64>,
    offset: i64,
    pub innovation: InnovationFamily,
    pub step: f64,
}

impl LinearProcessModel {
    pub fn from_coefficients(
        weights: Vec<f64>,
        offset: i64,
        innovation: InnovationFamily,
        step: f64,
    ) -> Result<Self, ProcessError> {
        if weights.is_empty() || weights.iter().any(|w| !w.is_finite()) {
            return Err(ProcessError::InvalidParameter(String::from(
                "weights must be nonempty and finite",
            )));
        }
        if !(step > 0.0) || !step.is_finite() {
            return Err(ProcessError::InvalidParameter(String::from("step must be positive")));
        }
        innovation.validate(step)?;
        if weights.iter().map(|w| w * w).sum::<f64>() == 0.0 {
            return Err(ProcessError::InvalidParameter(String::from("weights are all zero")));
        }
        Ok(LinearProcessModel { weights, offset, innovation, step })
    }

    /// X_t = ξ_t: f ≡ d₂/(2π) on the unit-step grid.
    pub fn white_noise(innovation: InnovationFamily) -> Result<Self, ProcessError> {
        LinearProcessModel::from_coefficients(vec![1.0], 0, innovation, 1.0)
    }

    /// Geometric weights (1, φ, φ², …). The cut sits at relative tail mass
    /// TRUNCATION_TOL², well inside the truncation contract, because the
    /// covariance error at lag m amplifies the tail by φ^{−2m}.
    pub fn geometric(phi: f64, innovation: InnovationFamily) -> Result<Self, ProcessError> {
        if !(libm::fabs(phi) < 1.0) {
            return Err(ProcessError::InvalidParameter(String::from("|phi| must be < 1")));
        }
        // tail mass φ^{2L}/(1−φ²) relative to total 1/(1−φ²) is φ^{2L}
        let len = if phi == 0.0 {
            1
        } else {
            libm::ceil(libm::log(TRUNCATION_TOL * TRUNCATION_TOL) / (2.0 * libm::log(libm::fabs(phi))))
                as usize
                + 1
        };
        let mut w = Vec::with_capacity(len);
        let mut cur = 1.0;
        for _ in 0..len {
            w.push(cur);
            cur *= phi;
        }
        LinearProcessModel::from_coefficients(w, 0, innovation, 1.0)
    }

    /// Causal model driven by the Riesz-Bessel time kernel: weights
    /// w_j = √(c/d₂)·(2π)^{−1/2}·k(jh) at positive grid lags, so the spectral
    /// density is c·|λ|^{−2α}(1+λ²)^{−γ} up to grid truncation. Long-memory
    /// tails (α > 0) cannot meet the truncation tolerance and are rejected;
    /// use spectral synthesis for those.
    pub fn riesz_bessel(
        theta: &ThetaFRBM,
        innovation: InnovationFamily,
        step: f64,
        max_len: usize,
    ) -> Result<Self, ProcessError> {
        innovation.validate(step)?;
        let d2 = innovation.cumulant(2);
        let amp = libm::sqrt(theta.c / d2) / libm::sqrt(2.0 * PI);
        let mut w = Vec::with_capacity(max_len);
        for j in 0..max_len {
            let t = (j as f64 + 0.5) * step;
            let k = rb_time_kernel(t, theta.alpha, theta.gamma_exp).map_err(|e| {
                ProcessError::InvalidParameter(format!("time kernel at t={t}: {e}"))
            })?;
            w.push(amp * k);
        }
        let total: f64 = w.iter().map(|x| x * x).sum();
        let mut kept = w.len();
        let mut tail = 0.0;
        while kept > 1 {
            let add = w[kept - 1] * w[kept - 1];
            if tail + add > TRUNCATION_TOL * total {
                break;
            }
            tail += add;
            kept -= 1;
        }
        // decay guard: the computed range must already contain the mass
        let edge = w[w.len() - 1] * w[w.len() - 1] * w.len() as f64;
        if edge > 0.5 * TRUNCATION_TOL * total {
            return Err(ProcessError::Truncation);
        }
        w.truncate(kept);
        LinearProcessModel::from_coefficients(w, 0, innovation, step)
    }

    pub fn weights(&self) -> (&[f64], i64) {
        (&self.weights, self.offset)
    }

    pub fn d2(&self) -> f64 {
        self.innovation.cumulant(2)
    }

    /// r(m·h) = d₂·h·Σ_j w_j w_{j+|m|}; exactly zero beyond the kernel span.
    pub fn autocovariance(&self, lag: i64) -> f64 {
        let m = lag.unsigned_abs() as usize;
        if m >= self.weights.len() {
            return 0.0;
        }
        let d2h = self.d2() * self.step;
        let mut acc = 0.0;
        for j in 0..self.weights.len() - m {
            acc += self.weights[j] * self.weights[j + m];
        }
        d2h * acc
    }

    /// Marginal cumulant χ_k(X_t) = h·d_k·Σ_j w_j^k.
    pub fn marginal_cumulant(&self, k: usize) -> f64 {
        let dk = self.innovation.cumulant(k);
        let s: f64 = self.weights.iter().map(|w| libm::pow(*w, k as f64)).sum();
        self.step * dk * s
    }

    /// Transfer function a(λ) = h·(2π)^{−1/2}·Σ_j w_j e^{−ijhλ}, so that
    /// d₂·a(λ)a(−λ) matches the autocovariance convention above.
    pub fn transfer(&self, lam: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &w) in self.weights.iter().enumerate() {
            let j = self.offset + i as i64;
            let ang = -(j as f64) * self.step * lam;
            acc += w * Complex64::new(libm::cos(ang), libm::sin(ang));
        }
        acc * self.step / libm::sqrt(2.0 * PI)
    }

    /// f(λ) = d₂·a(λ)a(−λ), real and nonnegative for real weights.
    pub fn spectral_density(&self, lam: f64) -> f64 {
        let a = self.transfer(lam);
        self.d2() * (a * a.conj()).re
    }
}

/// One simulated path together with the grid step and the seeds that fix it.
pub struct SampleSeries {
    pub values: Vec<f64>,
    pub step: f64,
    pub seed: u64,
    pub replica: u64,
}

/// Moving-average synthesis of `n` points of the model. Replicas index
/// independent ChaCha streams of the same master seed, so any subset of
/// replicas can be reproduced in isolation.
pub fn simulate_linear(
    model: &LinearProcessModel,
    n: usize,
    seed: u64,
    replica: u64,
) -> Result<SampleSeries, ProcessError> {
    if n == 0 {
        return Err(ProcessError::InvalidParameter(String::from("series length must be ≥ 1")));
    }
    let l = model.weights.len();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    let sampler = InnovationSampler::new(&model.innovation, model.step);
    // innovations e[p] = ζ at time p − (offset + l − 1), ascending
    let mut noise = Vec::with_capacity(n + l - 1);
    for _ in 0..n + l - 1 {
        noise.push(sampler.sample(&mut rng));
    }
    let mut values = Vec::with_capacity(n);
    for t in 0..n {
        let mut acc = 0.0;
        let base = t + l - 1;
        for (i, &w) in model.weights.iter().enumerate() {
            acc += w * noise[base - i];
        }
        values.push(acc);
    }
    Ok(SampleSeries { values, step: model.step, seed, replica })
}

/// Gaussian synthesis from a spectral density: the path has covariance
/// 2·Σ_k f(λ_k)cos(λ_k·mh)·Δλ over the half-offset grid λ_k = (k+½)Δλ,
/// Δλ = 2π/(Gh), a midpoint approximation of ∫e^{imhλ}f dλ that never
/// evaluates f at the origin. G is the oversampled FFT length; larger
/// oversampling pushes the periodic wrap-around further out.
pub fn simulate_spectral_gaussian(
    f: &dyn Fn(f64) -> f64,
    n: usize,
    step: f64,
    oversample: usize,
    seed: u64,
    replica: u64,
) -> Result<SampleSeries, ProcessError> {
    if n == 0 || oversample == 0 || !(step > 0.0) {
        return Err(ProcessError::InvalidParameter(String::from(
            "need n ≥ 1, oversample ≥ 1, step > 0",
        )));
    }
    let g = (n * oversample).next_power_of_two().max(8);
    let dlam = 2.0 * PI / (g as f64 * step);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    let mut spec = vec![Complex64::new(0.0, 0.0); g];
    for (k, s) in spec.iter_mut().take(g / 2).enumerate() {
        let lam = (k as f64 + 0.5) * dlam;
        let fv = f(lam);
        if !(fv >= 0.0) || !fv.is_finite() {
            return Err(ProcessError::InvalidParameter(String::from(
                "spectral density must be finite and nonnegative on the grid",
            )));
        }
        let c = libm::sqrt(2.0 * fv * dlam);
        let a: f64 = rand_distr::StandardNormal.sample(&mut rng);
        let b: f64 = rand_distr::StandardNormal.sample(&mut rng);
        *s = Complex64::new(c * a, -c * b);
    }
    // P_j = Σ_k s_k e^{+2πijk/G} = conj(FFT(conj s))_j
    for z in spec.iter_mut() {
        *z = z.conj();
    }
    fft::fft_in_place(&mut spec);
    let half = Complex64::new(0.0, PI / g as f64);
    let values: Vec<f64> = (0..n)
        .map(|j| (spec[j].conj() * (half * j as f64).exp()).re)
        .collect();
    Ok(SampleSeries { values, step, seed, replica })
}

/// Higher-order spectral density of the model:
/// f_k(λ₁,…,λ_{k−1}) = d_k·(2π)^{1−k/2}·a(−Σλ_i)·∏a(λ_i). The constant makes
/// the k-th cumulant spectral representation exact in the fixed conventions
/// (∫f_k dλ₁…dλ_{k−1} = χ_k(X_0)); at k = 2 it is 1, giving d₂·a(λ)a(−λ).
pub fn spectral_density_k(
    model: &LinearProcessModel,
    k: usize,
    lams: &[f64],
) -> Result<Complex64, ProcessError> {
    if k < 2 || lams.len() != k - 1 {
        return Err(ProcessError::InvalidParameter(format!(
            "order {k} needs {} frequencies, got {}",
            k.max(2) - 1,
            lams.len()
        )));
    }
    let dk = model.innovation.cumulant(k);
    let norm = libm::pow(2.0 * PI, 1.0 - k as f64 / 2.0);
    let mut prod = Complex64::new(dk * norm, 0.0);
    let mut total = 0.0;
    for &lam in lams {
        prod *= model.transfer(lam);
        total += lam;
    }
    Ok(prod * model.transfer(-total))
}

/// Periodogram I(λ) = (2π·nh)^{−1}·|h·Σ_t X_t e^{−ithλ}|² at the given
/// frequencies. For white noise on the unit grid, E I ≡ d₂/(2π) = f.
pub fn periodogram(series: &SampleSeries, lams: &[f64]) -> Vec<f64> {
    let n = series.values.len();
    let h = series.step;
    let norm = h / (2.0 * PI * n as f64);
    lams.iter()
        .map(|&lam| {
            let (mut re, mut im) = (0.0f64, 0.0f64);
            let w = h * lam;
            for (t, &x) in series.values.iter().enumerate() {
                let ang = -(t as f64) * w;
                re += x * libm::cos(ang);
                im += x * libm::sin(ang);
            }
            norm * (re * re + im * im)
        })
        .collect()
}

/// Periodogram on the positive Fourier grid λ_k = 2πk/(nh), k = 1..n/2,
/// computed by one FFT. Requires a power-of-two length.
pub fn periodogram_fft(series: &SampleSeries) -> Result<(Vec<f64>, Vec<f64>), ProcessError> {
    let n = series.values.len();
    if !fft::is_pow2(n) {
        return Err(ProcessError::Unsupported(String::from(
            "FFT periodogram needs a power-of-two length",
        )));
    }
    let h = series.step;
    let mut data: Vec<Complex64> =
        series.values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft::fft_in_place(&mut data);
    let norm = h / (2.0 * PI * n as f64);
    let mut lams = Vec::with_capacity(n / 2);
    let mut vals = Vec::with_capacity(n / 2);
    for k in 1..=n / 2 {
        lams.push(2.0 * PI * k as f64 / (n as f64 * h));
        vals.push(norm * data[k].norm_sqr());
    }
    Ok((lams, vals))
}

/// Symmetric lag kernel b̂(±m) = coeffs[m]; the associated symbol is
/// b(λ) = coeffs[0] + Σ_{m≥1} 2·coeffs[m]·cos(mλ), matching the cosine-band
/// spectral symbols, so b̂ holds the normalized Fourier coefficients of b.
#[derive(Debug, Clone, PartialEq)]
pub struct LagKernel {
    pub coeffs: Vec<f64>,
}

impl LagKernel {
    pub fn new(coeffs: Vec<f64>) -> Result<Self, ProcessError> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(ProcessError::InvalidParameter(String::from(
                "lag kernel needs finite coefficients",
            )));
        }
        Ok(LagKernel { coeffs })
    }

    /// Builds from explicit (lag, value) pairs, rejecting asymmetric input.
    pub fn from_pairs(pairs: &[(i64, f64)]) -> Result<Self, ProcessError> {
        let max = pairs.iter().map(|&(m, _)| m.abs()).max().unwrap_or(0) as usize;
        let mut signed = vec![None; 2 * max + 1];
        for &(m, v) in pairs {
            let idx = (m + max as i64) as usize;
            if signed[idx].replace(v).is_some() {
                return Err(ProcessError::InvalidParameter(String::from("duplicate lag")));
            }
        }
        let mut coeffs = vec![0.0; max + 1];
        for m in 0..=max {
            let plus = signed[max + m].unwrap_or(0.0);
            let minus = signed[max - m].unwrap_or(0.0);
            if plus != minus {
                return Err(ProcessError::InvalidParameter(String::from(
                    "lag kernel must be symmetric",
                )));
            }
            coeffs[m] = plus;
        }
        LagKernel::new(coeffs)
    }

    pub fn value(&self, lag: i64) -> f64 {
        let m = lag.unsigned_abs() as usize;
        if m < self.coeffs.len() {
            self.coeffs[m]
        } else {
            0.0
        }
    }

    pub fn max_lag(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn symbol(&self, lam: f64) -> f64 {
        let mut acc = self.coeffs[0];
        for (m, &c) in self.coeffs.iter().enumerate().skip(1) {
            acc += 2.0 * c * libm::cos(m as f64 * lam);
        }
        acc
    }
}

/// Wick-centered quadratic form
/// Q = h²·Σ_{t,s} b̂(t−s)·(X_t X_s − r((t−s)h)), accumulated by lag.
pub fn quadratic_form(series: &SampleSeries, kernel: &LagKernel, model: &LinearProcessModel) -> f64 {
    let n = series.values.len();
    let x = &series.values;
    let h2 = series.step * series.step;
    let mut acc = 0.0;
    for (m, &c) in kernel.coeffs.iter().enumerate() {
        if c == 0.0 || m >= n {
            continue;
        }
        let r = model.autocovariance(m as i64);
        let mut s = 0.0;
        for t in 0..n - m {
            s += x[t] * x[t + m];
        }
        s -= (n - m) as f64 * r;
        acc += if m == 0 { c * s } else { 2.0 * c * s };
    }
    h2 * acc
}

/// S = h·Σ_t P_l(X_t) with P_l the Appell polynomial of the model's marginal
/// cumulant sequence (Hermite-type for Gaussian innovations).
pub fn appell_sum(series: &SampleSeries, l: u32, model: &LinearProcessModel) -> Result<f64, ProcessError> {
    let dense = appell_dense_coeffs(l, model)?;
    let mut acc = 0.0;
    for &x in &series.values {
        let mut p = 0.0;
        for &c in dense.iter().rev() {
            p = p * x + c;
        }
        acc += p;
    }
    Ok(series.step * acc)
}

/// Dense coefficient vector (index = power) of the model-bound Appell
/// polynomial P_l.
fn appell_dense_coeffs(l: u32, model: &LinearProcessModel) -> Result<Vec<f64>, ProcessError> {
    if l == 0 || l > 6 {
        return Err(ProcessError::InvalidParameter(String::from("appell order must be 1..=6")));
    }
    let mut chis = Vec::with_capacity(l as usize + 1);
    chis.push(BigRational::from_float(0.0).expect("zero"));
    for k in 1..=l as usize {
        let c = if k == 1 { 0.0 } else { model.marginal_cumulant(k) };
        chis.push(BigRational::from_float(c).ok_or_else(|| {
            ProcessError::InvalidParameter(String::from("non-finite marginal cumulant"))
        })?);
    }
    let poly = appell_univariate(l as u8, &chis)
        .map_err(|_| ProcessError::InvalidParameter(String::from("appell construction failed")))?;
    let mut dense = vec![0.0f64; l as usize + 1];
    for (alpha, c) in &poly.coeffs {
        dense[alpha[0] as usize] = c.to_f64().unwrap_or(f64::NAN);
    }
    Ok(dense)
}

/// Fractional Riesz-Bessel parameters: long-memory exponent α ∈ [0, 1/2),
/// smoothness exponent γ ≥ 1/2 with α+γ > 1/2, and scale c > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaFRBM {
    pub alpha: f64,
    pub gamma_exp: f64,
    pub c: f64,
}

impl ThetaFRBM {
    pub fn new(alpha: f64, gamma_exp: f64, c: f64) -> Result<Self, ProcessError> {
        let theta = ThetaFRBM { alpha, gamma_exp, c };
        if !(0.0..0.5).contains(&alpha) || !(gamma_exp >= 0.5) || !(c > 0.0) {
            return Err(ProcessError::InvalidParameter(String::from(
                "need α ∈ [0, 1/2), γ ≥ 1/2, c > 0",
            )));
        }
        if !frbm_integrable(alpha, gamma_exp, 1) {
            return Err(ProcessError::InvalidParameter(String::from(
                "spectral density not integrable: need α+γ > 1/2",
            )));
        }
        Ok(theta)
    }
}

/// Integrability of |λ|^{−2α}(1+|λ|²)^{−γ} over ℝ^d: the pole needs 2α < d
/// and the tail needs 2(α+γ) > d.
pub fn frbm_integrable(alpha: f64, gamma_exp: f64, d: usize) -> bool {
    2.0 * alpha < d as f64 && 2.0 * (alpha + gamma_exp) > d as f64
}

/// f(λ) = c / (‖λ‖^{2α}(1+‖λ‖²)^γ) as a radial function of |λ|.
pub fn frbm_spectral(lam: f64, theta: &ThetaFRBM, _d: usize) -> Result<f64, ProcessError> {
    let r = libm::fabs(lam);
    if r == 0.0 {
        return if theta.alpha > 0.0 {
            Err(ProcessError::SpectralPole)
        } else {
            Ok(theta.c)
        };
    }
    let pole = libm::pow(r, -2.0 * theta.alpha);
    let bessel = libm::pow(1.0 + r * r, -theta.gamma_exp);
    Ok(theta.c * pole * bessel)
}

/// Functional whose replica distribution the CLT experiment measures.
#[derive(Debug, Clone, PartialEq)]
pub enum CltFunctional {
    AppellSum { l: u32 },
    Quadratic { kernel: LagKernel },
}

/// Replica statistics of T^{−1/2}·functional against the limit variance.
pub struct CltReport {
    pub replicas: usize,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    /// Kolmogorov distance of the replica sample to N(0, target_variance).
    pub kolmogorov: f64,
    pub target_variance: f64,
    pub variance_ratio: f64,
    pub ratio_std_error: f64,
    pub values: Vec<f64>,
}

/// Limit variance of T^{−1/2}Q_T as exact lag-domain sums:
/// 2·Σ_m (b̂⋆r)(m)² + (d₄/d₂²)·(Σ_m b̂(m)r(m))². Equals
/// 2(2π)∫b²f²dλ + (d₄/d₂²)(∫bf dλ)² by Parseval in the fixed conventions.
pub fn quadratic_form_target(kernel: &LagKernel, model: &LinearProcessModel) -> f64 {
    let l = model.weights.len() as i64;
    let m = kernel.max_lag() as i64;
    let rv = |lag: i64| model.autocovariance(lag);
    // g(u) = Σ_k b̂(k) r(u−k), supported on |u| ≤ m + l − 1
    let mut sum_g2 = 0.0;
    for u in -(m + l - 1)..=(m + l - 1) {
        let mut g = 0.0;
        for k in -m..=m {
            g += kernel.value(k) * rv(u - k);
        }
        sum_g2 += g * g;
    }
    let mut br = 0.0;
    for k in -m..=m {
        br += kernel.value(k) * rv(k);
    }
    let d2 = model.d2();
    let d4 = model.innovation.cumulant(4);
    2.0 * sum_g2 + d4 / (d2 * d2) * br * br
}

/// Limit variance of T^{−1/2}S_T^{(l)} for Gaussian models:
/// l!·Σ_m r(m)^l = l!·(2π)^l·f^{(⊛l)}(0); exact because r has finite support.
pub fn appell_sum_target(l: u32, model: &LinearProcessModel) -> Result<f64, ProcessError> {
    if l >= 2 && !matches!(model.innovation, InnovationFamily::Gaussian { .. }) {
        return Err(ProcessError::Unsupported(String::from(
            "sum-functional targets are implemented for Gaussian innovations (any family for l=1)",
        )));
    }
    let span = model.weights.len() as i64;
    let mut acc = 0.0;
    for m in -(span - 1)..=(span - 1) {
        acc += libm::pow(model.autocovariance(m), l as f64);
    }
    let mut fact = 1.0;
    for j in 2..=l as u64 {
        fact *= j as f64;
    }
    Ok(fact * acc)
}

/// Runs `replicas` independent paths of length `n`, evaluates the functional,
/// normalizes by T^{−1/2} = (nh)^{−1/2}, and reports moments, a Kolmogorov
/// distance to the limiting Gaussian, and the variance ratio to the exact
/// target with its Monte Carlo standard error. Replica r uses RNG stream r,
/// so results are independent of evaluation order.
pub fn mc_clt_experiment(
    model: &LinearProcessModel,
    functional: &CltFunctional,
    n: usize,
    replicas: usize,
    seed: u64,
) -> Result<CltReport, ProcessError> {
    if replicas < 2 {
        return Err(ProcessError::InvalidParameter(String::from("need at least 2 replicas")));
    }
    if model.step != 1.0 {
        return Err(ProcessError::Unsupported(String::from(
            "CLT targets are derived on the unit-step grid",
        )));
    }
    let target = match functional {
        CltFunctional::Quadratic { kernel } => quadratic_form_target(kernel, model),
        CltFunctional::AppellSum { l } => appell_sum_target(*l, model)?,
    };
    let dense = match functional {
        CltFunctional::AppellSum { l } => Some(appell_dense_coeffs(*l, model)?),
        CltFunctional::Quadratic { .. } => None,
    };
    let scale = 1.0 / libm::sqrt(n as f64 * model.step);
    let mut values = Vec::with_capacity(replicas);
    for rep in 0..replicas {
        let series = simulate_linear(model, n, seed, rep as u64)?;
        let v = match functional {
            CltFunctional::Quadratic { kernel } => quadratic_form(&series, kernel, model),
            CltFunctional::AppellSum { .. } => {
                let dense = dense.as_ref().expect("precomputed");
                let mut acc = 0.0;
                for &x in &series.values {
                    let mut p = 0.0;
                    for &c in dense.iter().rev() {
                        p = p * x + c;
                    }
                    acc += p;
                }
                series.step * acc
            }
        };
        values.push(scale * v);
    }
    Ok(summarize(values, target))
}

fn summarize(values: Vec<f64>, target: f64) -> CltReport {
    let r = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / r;
    let m2 = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean))) / r;
    let m3 = compensated_sum(values.iter().map(|v| {
        let d = v - mean;
        d * d * d
    })) / r;
    let m4 = compensated_sum(values.iter().map(|v| {
        let d = v - mean;
        d * d * d * d
    })) / r;
    let variance = m2 * r / (r - 1.0);
    let (skewness, excess_kurtosis) = if m2 > 0.0 {
        (m3 / libm::pow(m2, 1.5), m4 / (m2 * m2) - 3.0)
    } else {
        (0.0, 0.0)
    };
    let (variance_ratio, ratio_std_error) = if target > 0.0 {
        let var_of_var = (m4 - m2 * m2).max(0.0) / r;
        (variance / target, libm::sqrt(var_of_var) / target)
    } else if variance == 0.0 {
        (1.0, 0.0)
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    let kolmogorov = if target > 0.0 {
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let sd = libm::sqrt(target);
        let mut d = 0.0f64;
        for (i, &x) in sorted.iter().enumerate() {
            let phi = 0.5 * (1.0 + libm::erf(x / (sd * libm::sqrt(2.0))));
            d = d.max(libm::fabs((i + 1) as f64 / r - phi));
            d = d.max(libm::fabs(i as f64 / r - phi));
        }
        d
    } else {
        0.0
    };
    CltReport {
        replicas: values.len(),
        mean,
        variance,
        skewness,
        excess_kurtosis,
        kolmogorov,
        target_variance: target,
        variance_ratio,
        ratio_std_error,
        values,
    }
}

/// Neumaier-compensated summation; the aggregation is order-deterministic.
fn compensated_sum(it: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in it {
        let t = sum + x;
        if libm::fabs(sum) >= libm::fabs(x) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
