//! Dirichlet kernels on the torus and the line, the multivariate Fejér
//! kernel built from them, L_p norms with analytic majorant bounds, and the
//! kernel-property convergence check.
//!
//! Conventions fixed here and relied on everywhere else:
//! - discrete window = the symmetric integer window {-T/2, ..., T/2} with
//!   N = T+1 points, T even; the torus carries normalized Lebesgue measure
//!   dλ/2π per coordinate;
//! - continuous window = [-T/2, T/2] with Lebesgue measure on the line;
//! - norms of the discrete kernel use the T-point object
//!   |sin(Tλ/2)/sin(λ/2)| so that the p=2 norm squared is exactly T.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::numeric::quad::GaussLegendre;
use crate::SpectralDomain;

/// Reduce to [-pi, pi); the discrete kernels are 2π-periodic per coordinate.
fn reduce_torus(lam: f64) -> f64 {
    let mut x = libm::fmod(lam, 2.0 * PI);
    if x >= PI {
        x -= 2.0 * PI;
    } else if x < -PI {
        x += 2.0 * PI;
    }
    x
}

// Series switch for the removable singularity; below this the closed forms
// lose nothing yet, but the quadratic truncation is already at 1e-12 relative.
const SERIES_CUT: f64 = 1e-6;

/// Symmetric discrete Dirichlet kernel Σ_{t=-T/2}^{T/2} e^{itλ}
/// = sin((T+1)λ/2)/sin(λ/2), one coordinate. Requires T even so the window
/// is a symmetric set of T+1 integers; value T+1 at λ ≡ 0.
pub(crate) fn dirichlet_1(t: u64, lam: f64) -> f64 {
    assert!(t % 2 == 0, "discrete window needs even T, got {t}");
    let x = reduce_torus(lam);
    let tf = t as f64;
    if libm::fabs(x) < SERIES_CUT {
        (tf + 1.0) * (1.0 - x * x * tf * (tf + 2.0) / 24.0)
    } else {
        libm::sin((tf + 1.0) * x / 2.0) / libm::sin(x / 2.0)
    }
}

/// Continuous Dirichlet kernel ∫_{-T/2}^{T/2} e^{itλ} dt = sin(Tλ/2)/(λ/2),
/// one coordinate; value T at λ = 0. T is any positive real.
pub(crate) fn dirichlet_line_1(t: f64, lam: f64) -> f64 {
    assert!(t > 0.0);
    if libm::fabs(lam) < SERIES_CUT {
        t * (1.0 - (t * lam) * (t * lam) / 24.0)
    } else {
        libm::sin(t * lam / 2.0) / (lam / 2.0)
    }
}

/// d-dimensional Dirichlet kernel as the coordinate product, discrete case.
pub fn dirichlet(t: u64, lam: &[f64]) -> f64 {
    lam.iter().map(|&x| dirichlet_1(t, x)).product()
}

/// d-dimensional Dirichlet kernel as the coordinate product, continuous case.
pub fn dirichlet_line(t: f64, lam: &[f64]) -> f64 {
    lam.iter().map(|&x| dirichlet_line_1(t, x)).product()
}

fn dirichlet_domain(t: f64, lam: &[f64], domain: SpectralDomain) -> f64 {
    match domain {
        SpectralDomain::Torus => dirichlet(t as u64, lam),
        SpectralDomain::Line => dirichlet_line(t, lam),
    }
}

/// Multivariate Fejér kernel on n-1 spectral points u_e (each of dimension d):
///
///   Φ*_T(u) = norm(T)⁻¹ · Δ_T(-Σ u_e) · ∏_e Δ_T(u_e)
///
/// normalized to unit mass at every T: norm = (T+1)^d on the torus (against
/// normalized measure per variable) and (2π)^{(n-1)d} T^d on the line. With
/// that choice ∫ Φ*_T ∏μ(du_e) = 1 exactly for every n — the delta identity
/// collapses the product to a single sum/integral over the time window.
pub fn fejer_multi(t: f64, u: &[Vec<f64>], domain: SpectralDomain) -> f64 {
    assert!(!u.is_empty(), "need n >= 2, i.e. at least one spectral point");
    let d = u[0].len();
    assert!(u.iter().all(|p| p.len() == d), "mixed point dimensions");
    if domain == SpectralDomain::Torus {
        assert!(
            t >= 0.0 && t == libm::floor(t) && (t as u64) % 2 == 0,
            "torus window needs an even integer T"
        );
    }
    let mut neg_sum = vec![0.0; d];
    let mut prod = 1.0;
    for point in u {
        for (acc, &x) in neg_sum.iter_mut().zip(point.iter()) {
            *acc -= x;
        }
        prod *= dirichlet_domain(t, point, domain);
    }
    prod *= dirichlet_domain(t, &neg_sum, domain);
    let norm = match domain {
        SpectralDomain::Torus => libm::pow(t + 1.0, d as f64),
        SpectralDomain::Line => {
            libm::pow(2.0 * PI, (u.len() * d) as f64) * libm::pow(t, d as f64)
        }
    };
    prod / norm
}

/// How a p-norm is produced: numeric quadrature of the kernel, or the
/// closed-form majorant estimate const · T^{d(1-1/p)}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormMethod {
    Quadrature,
    Bound,
}

/// T-point norm object |sin(Tλ/2)/sin(λ/2)|; same T scaling as the symmetric
/// kernel but with exactly T terms, so ∫|·|² dλ/2π = T for every T ≥ 1.
fn norm_kernel_torus(t: u64, lam: f64) -> f64 {
    let x = reduce_torus(lam);
    let tf = t as f64;
    if libm::fabs(x) < SERIES_CUT {
        tf * (1.0 - x * x * (tf * tf - 1.0) / 24.0)
    } else {
        libm::fabs(libm::sin(tf * x / 2.0) / libm::sin(x / 2.0))
    }
}

/// ∫ |D_T|^p dλ/2π over the torus by per-arch Gauss-Legendre between the
/// kernel zeros, where |·|^p is smooth. Arches run over [0, 2π) so the
/// boundaries 2πk/T are zeros of sin(Tλ/2) for every T, even or odd.
fn torus_norm_power(t: u64, p: f64) -> f64 {
    let gl = GaussLegendre::new(16);
    let width = 2.0 * PI / t as f64;
    let mut acc = 0.0;
    let mut comp = 0.0; // Kahan compensation across up to 2^14 arches
    for k in 0..t {
        let lo = k as f64 * width;
        let piece = gl.integrate(lo, lo + width, |x| libm::pow(norm_kernel_torus(t, x), p));
        let y = piece - comp;
        let s = acc + y;
        comp = (s - acc) - y;
        acc = s;
    }
    acc / (2.0 * PI)
}

/// Mean of |sin|^p over a period: Γ((p+1)/2)/(√π Γ(p/2+1)).
fn sin_power_mean(p: f64) -> f64 {
    libm::tgamma((p + 1.0) / 2.0) / (libm::sqrt(PI) * libm::tgamma(p / 2.0 + 1.0))
}

const LINE_ARCHES: u64 = 1 << 16;

/// ∫_ℝ |Δ_T|^p dλ by per-arch quadrature out to Λ = 2π·arches/T plus the
/// mean-value tail 2 c_p 2^p Λ^{1-p}/(p-1); the neglected fluctuation around
/// the mean is O(T⁻¹Λ^{-p}), far below the 1e-8 relative target.
fn line_norm_power(t: f64, p: f64) -> f64 {
    let gl = GaussLegendre::new(8);
    let width = 2.0 * PI / t;
    let mut acc = 0.0;
    let mut comp = 0.0;
    for k in 0..LINE_ARCHES {
        let lo = k as f64 * width;
        let piece = gl.integrate(lo, lo + width, |x| {
            libm::pow(libm::fabs(dirichlet_line_1(t, x)), p)
        });
        let y = piece - comp;
        let s = acc + y;
        comp = (s - acc) - y;
        acc = s;
    }
    let lambda = LINE_ARCHES as f64 * width;
    let tail = sin_power_mean(p) * libm::pow(2.0, p) * libm::pow(lambda, 1.0 - p) / (p - 1.0);
    2.0 * (acc + tail)
}

/// L_p norm of the Dirichlet kernel in dimension d. The quadrature method
/// integrates the kernel itself; the bound method evaluates the closed form
/// that follows from |D_T(λ)| ≤ 2πT/(1+T|λ|) on the torus and
/// |Δ_T(λ)| ≤ 3T/(1+T|λ|) on the line, so quadrature ≤ bound always.
/// p = 1 lives in [`dirichlet_l1_asymptotic`]; here p > 1.
pub fn kernel_norm(t: f64, p: f64, d: usize, domain: SpectralDomain, method: NormMethod) -> f64 {
    assert!(p > 1.0, "p-norms here need p > 1; see dirichlet_l1_asymptotic");
    assert!(d >= 1);
    assert!(t >= 1.0);
    match (domain, method) {
        (SpectralDomain::Torus, NormMethod::Quadrature) => {
            assert!(t == libm::floor(t), "torus norms need integer T");
            let power = torus_norm_power(t as u64, p);
            libm::pow(power, d as f64 / p)
        }
        (SpectralDomain::Line, NormMethod::Quadrature) => {
            let power = line_norm_power(t, p);
            libm::pow(power, d as f64 / p)
        }
        (SpectralDomain::Torus, NormMethod::Bound) => {
            let one_d = 2.0 * PI * libm::pow(t, 1.0 - 1.0 / p) / libm::pow(PI * (p - 1.0), 1.0 / p);
            libm::pow(one_d, d as f64)
        }
        (SpectralDomain::Line, NormMethod::Bound) => {
            let one_d =
                3.0 * libm::pow(t, 1.0 - 1.0 / p) * libm::pow(2.0 / (p - 1.0), 1.0 / p);
            libm::pow(one_d, d as f64)
        }
    }
}

/// L₁ norm of the T-point kernel against normalized measure, and its ratio
/// to the first-order asymptotic (4/π²) log T.
#[derive(Clone, Copy, Debug)]
pub struct L1Report {
    pub norm: f64,
    pub ratio: f64,
}

/// The p = 1 norm grows like (4/π²) log T plus a bounded constant, so the
/// ratio approaches 1 from above but only logarithmically slowly.
pub fn dirichlet_l1_asymptotic(t: u64) -> L1Report {
    assert!(t >= 1);
    let norm = torus_norm_power(t, 1.0);
    let ratio = if t >= 2 {
        norm / (4.0 / (PI * PI) * libm::log(t as f64))
    } else {
        f64::NAN
    };
    L1Report { norm, ratio }
}

/// One line of a kernel-property convergence report: ∫ C·Φ*_T ∏μ(du) and its
/// distance from C(0). `tail_bound` is the neglected mass outside the
/// truncation window (zero on the torus).
#[derive(Clone, Copy, Debug)]
pub struct KernelPropertyRow {
    pub t: f64,
    pub value: f64,
    pub deviation: f64,
    pub tail_bound: f64,
}

/// Half-offset uniform torus grid: symmetric under negation and exact for
/// trigonometric polynomials of per-coordinate degree < m.
fn torus_grid_value(m: usize, vars: usize, f: &mut impl FnMut(&[f64]) -> f64) -> f64 {
    let step = 2.0 * PI / m as f64;
    let total = (m as u128).pow(vars as u32);
    assert!(total <= 1 << 26, "torus grid too large");
    let mut point = vec![0.0; vars];
    let mut acc = 0.0;
    let mut comp = 0.0;
    for idx in 0..total as u64 {
        let mut rem = idx as usize;
        for slot in point.iter_mut() {
            *slot = -PI + step * (rem % m) as f64 + 0.5 * step;
            rem /= m;
        }
        let y = f(&point) - comp;
        let s = acc + y;
        comp = (s - acc) - y;
        acc = s;
    }
    acc / total as f64
}

const PROPERTY_ARCHES: u64 = 1 << 18;

/// Convergence of ∫ C·Φ*_T toward C(0,…,0) along a T ladder. C takes the
/// flattened (n-1)·d coordinate vector. Torus: exact uniform-grid means with
/// m ≈ 2T+65 points per axis (the integrand has per-coordinate degree ≤ T, so
/// trig-polynomial C is integrated exactly and smooth C superalgebraically).
/// Line: supported for n = 2, per-arch quadrature with a reported tail bound
/// 4·sup-scale/(πTΛ).
pub fn verify_kernel_property(
    c: &dyn Fn(&[f64]) -> f64,
    t_list: &[f64],
    n: usize,
    d: usize,
    domain: SpectralDomain,
) -> Vec<KernelPropertyRow> {
    assert!(n >= 2 && d >= 1);
    let vars = (n - 1) * d;
    let c0 = c(&vec![0.0; vars]);
    let mut rows = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let (value, tail_bound) = match domain {
            SpectralDomain::Torus => {
                let ti = t as u64;
                assert!(t == libm::floor(t) && ti % 2 == 0, "even integer T");
                let m = 2 * ti as usize + 65;
                let mut f = |flat: &[f64]| {
                    let pts: Vec<Vec<f64>> =
                        flat.chunks(d).map(|chunk| chunk.to_vec()).collect();
                    c(flat) * fejer_multi(t, &pts, SpectralDomain::Torus)
                };
                // grid mean per variable already carries the normalized measure
                (torus_grid_value(m, vars, &mut f), 0.0)
            }
            SpectralDomain::Line => {
                assert!(n == 2 && d == 1, "line kernel property quadrature is n=2, d=1");
                let gl = GaussLegendre::new(8);
                let width = 2.0 * PI / t;
                let mut acc = 0.0;
                let mut comp = 0.0;
                for k in 0..PROPERTY_ARCHES {
                    let lo = k as f64 * width;
                    let piece = gl.integrate(lo, lo + width, |x| {
                        let phi = fejer_multi(t, &[vec![x]], SpectralDomain::Line);
                        c(&[x]) * phi + c(&[-x]) * phi
                    });
                    let y = piece - comp;
                    let s = acc + y;
                    comp = (s - acc) - y;
                    acc = s;
                }
                let lambda = PROPERTY_ARCHES as f64 * width;
                // |Φ*_T(u)| ≤ 2/(πTu²) outside the window, C bounded by its
                // observed scale near the origin
                let scale = libm::fabs(c0).max(1.0);
                (acc, 4.0 * scale / (PI * t * lambda))
            }
        };
        rows.push(KernelPropertyRow {
            t,
            value,
            deviation: libm::fabs(value - c0),
            tail_bound,
        });
    }
    rows
}
