use proptest::prelude::*;

use fejer_core::fejer::{
    fourier_coefficients, hermite_sum_variance, toeplitz_matrix, trace_product, SpectralSymbol,
};
use fejer_core::SpectralDomain;

fn band_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 1..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pair_trace_lag_path_agrees_with_dense(
        a in band_strategy(),
        b in band_strategy(),
        k in 2usize..=32,
    ) {
        let t = (2 * k) as f64;
        let fa = SpectralSymbol::cosine_band(&a);
        let fb = SpectralSymbol::cosine_band(&b);
        let fast = trace_product(&[&fa, &fb], t, SpectralDomain::Torus, 0).unwrap();
        let ta = toeplitz_matrix(&fa, t, SpectralDomain::Torus, 0).unwrap();
        let tb = toeplitz_matrix(&fb, t, SpectralDomain::Torus, 0).unwrap();
        let mut dense = 0.0;
        for i in 0..ta.n {
            for j in 0..ta.n {
                dense += (ta.entry(i, j) * tb.entry(j, i)).re;
            }
        }
        prop_assert!((fast - dense).abs() < 1e-9 * dense.abs().max(1.0));
    }

    #[test]
    fn banded_coefficients_are_recovered_exactly(a in band_strategy()) {
        let f = SpectralSymbol::cosine_band(&a);
        let table = fourier_coefficients(&f, a.len(), 64);
        for (k, &coef) in a.iter().enumerate() {
            let expect = if k == 0 { coef } else { coef };
            prop_assert!((table.get(k as i64).re - expect).abs() < 1e-12);
            prop_assert!((table.get(-(k as i64)).re - expect).abs() < 1e-12);
            prop_assert!(table.get(k as i64).im.abs() < 1e-12);
        }
    }

    #[test]
    fn convolution_powers_match_the_coefficient_power_sum(
        a in band_strategy(),
        l in 2u32..=4,
    ) {
        let f = SpectralSymbol::cosine_band(&a);
        let hv = hermite_sum_variance(&f, l, 256);
        let mut expect = libm::pow(a[0], l as f64);
        for &c in &a[1..] {
            expect += 2.0 * libm::pow(c, l as f64);
        }
        prop_assert!((hv.value - expect).abs() < 1e-10 * expect.abs().max(1.0));
    }
}
