//! Worked values and closed-form identities for the kernel layer.

use core::f64::consts::PI;

use fejer_core::kernels::{
    dirichlet, dirichlet_l1_asymptotic, dirichlet_line, fejer_multi, kernel_norm,
    verify_kernel_property, NormMethod,
};
use fejer_core::numeric::quad::{torus_mean, torus_mean_nd};
use fejer_core::SpectralDomain;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn discrete_kernel_matches_trigonometric_sum() {
    for t in [2u64, 4, 8, 30] {
        let half = (t / 2) as i64;
        for k in 0..40 {
            let lam = -9.7 + 0.5 * k as f64;
            let direct: f64 = (-half..=half).map(|j| (j as f64 * lam).cos()).sum();
            assert!(
                (dirichlet(t, &[lam]) - direct).abs() < 1e-8 * (t as f64 + 1.0),
                "T={t} lam={lam}"
            );
        }
        assert_eq!(dirichlet(t, &[0.0]), t as f64 + 1.0);
        // periodicity carries the peak to every multiple of 2π
        assert!((dirichlet(t, &[2.0 * PI]) - (t as f64 + 1.0)).abs() < 1e-9);
        assert!((dirichlet(t, &[0.0, 0.0]) - (t as f64 + 1.0).powi(2)).abs() < 1e-9);
    }
}

#[test]
fn continuous_kernel_values() {
    assert_eq!(dirichlet_line(6.5, &[0.0]), 6.5);
    assert_eq!(dirichlet_line(64.0, &[0.0, 0.0]), 64.0 * 64.0);
    for t in [1.0f64, 6.5, 64.0] {
        for k in 1..30 {
            let lam = 0.07 * k as f64;
            let direct = 2.0 * (t * lam / 2.0).sin() / lam;
            assert!((dirichlet_line(t, &[lam]) - direct).abs() < 1e-10 * t);
        }
    }
}

#[test]
fn fejer_peak_zero_and_unit_mass() {
    // peaks: T+1 on the torus, T/(2π) on the line
    assert!((fejer_multi(8.0, &[vec![0.0]], SpectralDomain::Torus) - 9.0).abs() < 1e-12);
    let t = 64.0;
    assert!(
        (fejer_multi(t, &[vec![0.0]], SpectralDomain::Line) - t / (2.0 * PI)).abs() < 1e-10
    );
    // a zero of one Dirichlet factor kills the product
    let z = 2.0 * PI / 9.0;
    assert!(fejer_multi(8.0, &[vec![z]], SpectralDomain::Torus).abs() < 1e-12);

    // unit mass at every T: n=2 and n=3, normalized torus measure
    for t in [4u64, 8, 32] {
        let m = 4 * t as usize + 8;
        let mass2 = torus_mean(m, |u| fejer_multi(t as f64, &[vec![u]], SpectralDomain::Torus));
        assert!((mass2 - 1.0).abs() < 1e-11, "T={t} mass2={mass2}");
        let mass3 = torus_mean_nd(2, m, |p| {
            fejer_multi(t as f64, &[vec![p[0]], vec![p[1]]], SpectralDomain::Torus)
        });
        assert!((mass3 - 1.0).abs() < 1e-10, "T={t} mass3={mass3}");
    }
}

#[test]
fn fejer_symmetric_in_its_arguments() {
    let t = 16.0;
    let (a, b, c) = (0.3, -1.1, 2.4);
    for domain in [SpectralDomain::Torus, SpectralDomain::Line] {
        let v1 = fejer_multi(t, &[vec![a], vec![b], vec![c]], domain);
        let v2 = fejer_multi(t, &[vec![c], vec![a], vec![b]], domain);
        assert!((v1 - v2).abs() <= 1e-12 * v1.abs().max(1.0));
    }
}

#[test]
fn discrete_norms_hit_the_exact_lag_identities() {
    // Σ-representation gives ∫|D_T|² dμ = T and ∫|D_T|⁴ dμ = (2T³+T)/3 exactly.
    for t in [5u64, 64, 257, 1024] {
        let tf = t as f64;
        let two = kernel_norm(tf, 2.0, 1, SpectralDomain::Torus, NormMethod::Quadrature);
        assert!(rel(two * two, tf) < 1e-10, "T={t} p=2: {}", two * two);
        let four = kernel_norm(tf, 4.0, 1, SpectralDomain::Torus, NormMethod::Quadrature);
        let exact = (2.0 * tf.powi(3) + tf) / 3.0;
        assert!(rel(four.powi(4), exact) < 1e-10, "T={t} p=4: {}", four.powi(4));
        // gap to the scaling-limit constant (2/π)∫₀^∞ sinc⁴ = 2/3 is 1/(2T²)
        let gap = rel(four.powi(4), 2.0 * tf.powi(3) / 3.0);
        assert!(rel(gap, 1.0 / (2.0 * tf * tf)) < 1e-4, "T={t} gap={gap}");
        // d = 2 norms are the d = 1 norms squared (product structure)
        let two_2d = kernel_norm(tf, 2.0, 2, SpectralDomain::Torus, NormMethod::Quadrature);
        assert!(rel(two_2d, two * two) < 1e-12);
    }
}

#[test]
fn line_norms_match_plancherel_and_scaling() {
    // ∫|Δ_T|^p dλ = 4 T^{p-1} ∫₀^∞ |sinc|^p exactly, by pure scaling; the
    // constant is closed-form for even p (sign cancellation irrelevant)
    let sinc_int = [0.0, 0.0, PI / 2.0, f64::NAN, PI / 3.0];
    for t in [1.0f64, 16.0, 64.0] {
        for p in [2usize, 4] {
            let norm = kernel_norm(t, p as f64, 1, SpectralDomain::Line, NormMethod::Quadrature);
            let exact = 4.0 * t.powi(p as i32 - 1) * sinc_int[p];
            assert!(
                rel(norm.powi(p as i32), exact) < 1e-8,
                "T={t} p={p}: {} vs {exact}",
                norm.powi(p as i32)
            );
        }
        // p = 2 is the Plancherel identity for the window indicator
        let two = kernel_norm(t, 2.0, 1, SpectralDomain::Line, NormMethod::Quadrature);
        assert!(rel(two * two, 2.0 * PI * t) < 1e-8);
    }
    // odd p: the scaling law itself, with the constant measured at T = 1
    let c3 = kernel_norm(1.0, 3.0, 1, SpectralDomain::Line, NormMethod::Quadrature).powi(3);
    for t in [16.0f64, 64.0] {
        let norm = kernel_norm(t, 3.0, 1, SpectralDomain::Line, NormMethod::Quadrature);
        assert!(rel(norm.powi(3), c3 * t * t) < 1e-8, "T={t} p=3 scaling");
    }
}

#[test]
fn quadrature_never_exceeds_the_closed_form_bound() {
    for &p in &[1.5f64, 2.0, 3.0, 4.0] {
        for &t in &[4.0f64, 64.0, 1024.0] {
            for domain in [SpectralDomain::Torus, SpectralDomain::Line] {
                for d in [1usize, 2] {
                    let q = kernel_norm(t, p, d, domain, NormMethod::Quadrature);
                    let b = kernel_norm(t, p, d, domain, NormMethod::Bound);
                    assert!(q <= b * (1.0 + 1e-9), "p={p} T={t} {domain:?} d={d}: {q} > {b}");
                }
            }
        }
    }
}

#[test]
fn l1_norm_growth() {
    let base = dirichlet_l1_asymptotic(1);
    assert!((base.norm - 1.0).abs() < 1e-12);
    assert!(base.ratio.is_nan());

    let r10 = dirichlet_l1_asymptotic(1 << 10);
    let r14 = dirichlet_l1_asymptotic(1 << 14);
    // ratio decreases toward 1 from above, but only like 1/log T
    assert!(r10.ratio > r14.ratio && r14.ratio > 1.0);
    assert!(r14.ratio > 1.2 && r14.ratio < 1.3, "ratio {}", r14.ratio);
    // the norm itself grows logarithmically
    let slope = (r14.norm - r10.norm) / ((16384.0f64).ln() - (1024.0f64).ln());
    assert!((slope - 4.0 / (PI * PI)).abs() < 0.01, "slope {slope}");
}

#[test]
fn kernel_property_on_the_torus() {
    // C ≡ 1 integrates to exactly 1 — the normalization of the kernel
    let ones = verify_kernel_property(&|_| 1.0, &[8.0, 32.0], 3, 1, SpectralDomain::Torus);
    for row in &ones {
        assert!(row.deviation < 1e-12, "T={} dev={}", row.t, row.deviation);
    }
    // C = cos picks out the lag-1 weight: value T/(T+1), deviation 1/(T+1)
    let ts = [8.0, 32.0, 128.0];
    let cos_rows = verify_kernel_property(&|u| u[0].cos(), &ts, 2, 1, SpectralDomain::Torus);
    for row in &cos_rows {
        let expect = row.t / (row.t + 1.0);
        assert!((row.value - expect).abs() < 1e-12, "T={} value={}", row.t, row.value);
    }
    for pair in cos_rows.windows(2) {
        assert!(pair[1].deviation < pair[0].deviation);
    }
    // odd integrand on the symmetric grid
    let odd = verify_kernel_property(&|u| u[0], &[8.0, 32.0], 2, 1, SpectralDomain::Torus);
    for row in &odd {
        assert!(row.value.abs() < 1e-13);
    }
}

#[test]
fn kernel_property_on_the_line() {
    // mass 1 up to the reported tail
    let ones = verify_kernel_property(&|_| 1.0, &[8.0, 32.0], 2, 1, SpectralDomain::Line);
    for row in &ones {
        assert!(
            (row.value - 1.0).abs() <= row.tail_bound + 1e-9,
            "T={} value={} tail={}",
            row.t,
            row.value,
            row.tail_bound
        );
    }
    // the kernel's transform is the triangle: ∫cos(u)Φ*_T = 1 - 1/T exactly
    let ts = [8.0, 16.0, 32.0];
    let cos_rows = verify_kernel_property(&|u| u[0].cos(), &ts, 2, 1, SpectralDomain::Line);
    for row in &cos_rows {
        let expect = 1.0 - 1.0 / row.t;
        assert!(
            (row.value - expect).abs() <= row.tail_bound + 1e-8,
            "T={} value={} expect={expect}",
            row.t,
            row.value
        );
    }
    for pair in cos_rows.windows(2) {
        assert!(pair[1].deviation < pair[0].deviation);
    }
}
