use fejer_core::wick::{
    cumulants_to_moments, diagram_cumulant_exact, moments_to_cumulants, wick_coefficients,
    CumulantMode, DiagramTable,
};
use fejer_core::BigRat;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn rat(n: i64, d: i64) -> BigRat {
    BigRat::new(n.into(), d.into())
}

fn lattice(n: usize) -> impl Strategy<Value = Vec<BigRat>> {
    proptest::collection::vec((-6i64..=6, 1i64..=4), (1 << n) - 1).prop_map(move |vals| {
        let mut lat = Vec::with_capacity(1 << n);
        lat.push(BigRat::one());
        lat.extend(vals.into_iter().map(|(p, q)| rat(p, q)));
        lat
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn conversions_invert_each_other(n in 2usize..=4, mut moments in lattice(4)) {
        moments.truncate(1 << n);
        let chi = moments_to_cumulants(&moments).unwrap();
        prop_assert_eq!(cumulants_to_moments(&chi).unwrap(), moments);
    }

    #[test]
    fn wick_products_are_centered(n in 1usize..=4, mut chi in lattice(4)) {
        chi.truncate(1 << n);
        chi[0] = BigRat::zero();
        let moments = cumulants_to_moments(&chi).unwrap();
        let coeffs = wick_coefficients(&chi).unwrap();
        let mean: BigRat = coeffs.iter().zip(&moments).map(|(c, m)| c * m).sum();
        prop_assert!(mean.is_zero());
    }

    #[test]
    fn connected_diagrams_match_the_lattice_cumulant(
        cov_raw in proptest::collection::vec((-5i64..=5, 1i64..=3), 36),
        shape in 0usize..3,
    ) {
        let row_sizes: &[usize] = match shape {
            0 => &[2, 2],
            1 => &[2, 1, 2],
            _ => &[1, 1, 1, 1],
        };
        let table = DiagramTable::new(row_sizes).unwrap();
        let n = table.total();
        let cov = move |i: usize, j: usize| {
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            let (p, q) = cov_raw[a * 6 + b];
            rat(p, q)
        };

        // jointly Gaussian slots: only pair cumulants survive
        let mut chi = vec![BigRat::zero(); 1 << n];
        for (w, slot) in chi.iter_mut().enumerate() {
            if w.count_ones() == 2 {
                let i = w.trailing_zeros() as usize;
                let j = (63 - (w as u64).leading_zeros()) as usize;
                *slot = cov(i, j);
            }
        }
        let moments = cumulants_to_moments(&chi).unwrap();

        let k = table.rows();
        let mut z_moments = vec![BigRat::one(); 1 << k];
        for t in 1..1usize << k {
            let mut mask = 0usize;
            let mut lo = 0usize;
            for (r, &size) in row_sizes.iter().enumerate() {
                if t >> r & 1 == 1 {
                    mask |= ((1usize << size) - 1) << lo;
                }
                lo += size;
            }
            z_moments[t] = moments[mask].clone();
        }
        let z_chi = moments_to_cumulants(&z_moments).unwrap();

        let oracle = move |block: &[usize]| -> BigRat {
            match block {
                [i, j] => cov(*i, *j),
                _ => BigRat::zero(),
            }
        };
        let joint = diagram_cumulant_exact(&table, &oracle, CumulantMode::Cumulant).unwrap();
        prop_assert_eq!(joint, z_chi[(1 << k) - 1].clone());
    }
}
