//! Shared numeric infrastructure: power-of-two FFT, quadrature rules, exact
//! integer/rational linear algebra, and a small dense float solver.

use alloc::vec;
use alloc::vec::Vec;

use crate::{BigRat, Complex64};

pub mod fft {
    use super::*;
    use core::f64::consts::PI;

    pub fn is_pow2(n: usize) -> bool {
        n != 0 && n & (n - 1) == 0
    }

    fn transform(a: &mut [Complex64], inverse: bool) {
        let n = a.len();
        assert!(is_pow2(n), "fft length must be a power of two, got {n}");
        // bit-reversal permutation
        let mut j = 0usize;
        for i in 1..n {
            let mut bit = n >> 1;
            while j & bit != 0 {
                j ^= bit;
                bit >>= 1;
            }
            j |= bit;
            if i < j {
                a.swap(i, j);
            }
        }
        let sign = if inverse { 1.0 } else { -1.0 };
        let mut len = 2usize;
        while len <= n {
            let ang = sign * 2.0 * PI / len as f64;
            let wlen = Complex64::new(libm::cos(ang), libm::sin(ang));
            for chunk in a.chunks_mut(len) {
                let mut w = Complex64::new(1.0, 0.0);
                let (lo, hi) = chunk.split_at_mut(len / 2);
                for i in 0..len / 2 {
                    let u = lo[i];
                    let v = hi[i] * w;
                    lo[i] = u + v;
                    hi[i] = u - v;
                    w *= wlen;
                }
            }
            len <<= 1;
        }
    }

    /// In-place forward DFT, no normalization: X_k = sum_j x_j e^{-2pi i jk/n}.
    pub fn fft_in_place(a: &mut [Complex64]) {
        transform(a, false);
    }

    /// In-place inverse DFT including the 1/n factor.
    pub fn ifft_in_place(a: &mut [Complex64]) {
        transform(a, true);
        let n = a.len() as f64;
        for z in a.iter_mut() {
            *z /= n;
        }
    }

    /// Circular convolution of two equal-length power-of-two sequences.
    pub fn circular_convolution(x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), y.len());
        let mut fx = x.to_vec();
        let mut fy = y.to_vec();
        fft_in_place(&mut fx);
        fft_in_place(&mut fy);
        for (a, b) in fx.iter_mut().zip(fy.iter()) {
            *a *= *b;
        }
        ifft_in_place(&mut fx);
        fx
    }
}

pub mod quad {
    use super::*;
    use core::f64::consts::PI;

    /// Gauss-Legendre rule on [-1, 1], nodes found by Newton iteration.
    pub struct GaussLegendre {
        pub nodes: Vec<f64>,
        pub weights: Vec<f64>,
    }

    impl GaussLegendre {
        pub fn new(n: usize) -> Self {
            assert!(n >= 2);
            let mut nodes = vec![0.0; n];
            let mut weights = vec![0.0; n];
            let m = n.div_ceil(2);
            for i in 0..m {
                // Chebyshev-like initial guess
                let mut x = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
                let mut dp = 0.0;
                for _ in 0..100 {
                    // evaluate P_n and P_n' by the three-term recurrence
                    let (mut p0, mut p1) = (1.0f64, x);
                    for k in 2..=n {
                        let kf = k as f64;
                        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                        p0 = p1;
                        p1 = p2;
                    }
                    dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                    let dx = p1 / dp;
                    x -= dx;
                    if libm::fabs(dx) < 1e-15 {
                        break;
                    }
                }
                nodes[i] = -x;
                nodes[n - 1 - i] = x;
                let w = 2.0 / ((1.0 - x * x) * dp * dp);
                weights[i] = w;
                weights[n - 1 - i] = w;
            }
            GaussLegendre { nodes, weights }
        }

        pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            let mut acc = 0.0;
            for (x, w) in self.nodes.iter().zip(self.weights.iter()) {
                acc += w * f(mid + half * x);
            }
            acc * half
        }
    }

    /// Mean of f over the uniform grid -pi + 2pi j/m, j = 0..m-1. For the
    /// normalized torus measure this is exact on trigonometric polynomials of
    /// degree < m.
    pub fn torus_mean(m: usize, f: impl Fn(f64) -> f64) -> f64 {
        let step = 2.0 * PI / m as f64;
        let mut acc = 0.0;
        for j in 0..m {
            acc += f(-PI + step * j as f64);
        }
        acc / m as f64
    }

    /// Mean of f over the d-dimensional uniform torus grid (m points per axis).
    pub fn torus_mean_nd(d: usize, m: usize, f: impl Fn(&[f64]) -> f64) -> f64 {
        let step = 2.0 * PI / m as f64;
        let total = m.pow(d as u32);
        let mut point = vec![0.0; d];
        let mut acc = 0.0;
        for idx in 0..total {
            let mut rem = idx;
            for item in point.iter_mut() {
                *item = -PI + step * (rem % m) as f64;
                rem /= m;
            }
            acc += f(&point);
        }
        acc / total as f64
    }

    fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }

    fn adaptive_step(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fb: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(a, fa, m, fm, flm);
        let right = simpson(m, fm, b, fb, frm);
        let delta = left + right - whole;
        if depth == 0 || libm::fabs(delta) <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            adaptive_step(f, a, m, fa, fm, flm, left, 0.5 * tol, depth - 1)
                + adaptive_step(f, m, b, fm, fb, frm, right, 0.5 * tol, depth - 1)
        }
    }

    /// Adaptive Simpson quadrature with absolute tolerance `tol`.
    pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        let (fa, fb) = (f(a), f(b));
        let m = 0.5 * (a + b);
        let fm = f(m);
        let whole = simpson(a, fa, b, fb, fm);
        adaptive_step(&f, a, b, fa, fb, fm, whole, tol, 40)
    }

    /// Integral over the whole line of an even integrand that decays at
    /// infinity. Panels [0,1],[1,2],[2,4],... are added until the latest
    /// panel contributes below `tol_rel` of the running total twice in a row.
    pub fn integrate_even_line(f: impl Fn(f64) -> f64, tol_rel: f64) -> f64 {
        let gl = GaussLegendre::new(32);
        let mut total = gl.integrate(0.0, 1.0, &f);
        let mut lo = 1.0f64;
        let mut small_panels = 0u32;
        for _ in 0..64 {
            let hi = lo * 2.0;
            // split each dyadic panel in two for safety on humped integrands
            let p = gl.integrate(lo, 0.5 * (lo + hi), &f) + gl.integrate(0.5 * (lo + hi), hi, &f);
            total += p;
            if libm::fabs(p) <= tol_rel * libm::fabs(total).max(1e-300) {
                small_panels += 1;
                if small_panels >= 2 {
                    break;
                }
            } else {
                small_panels = 0;
            }
            lo = hi;
        }
        2.0 * total
    }
}

/// Exact linear algebra over integers and rationals.
pub mod exact {
    use super::*;
    use num_traits::{One, Signed, Zero};

    /// Rank of an integer matrix via fraction-free Bareiss elimination.
    pub fn rank_i64(rows: &[Vec<i64>]) -> usize {
        let r = rows.len();
        if r == 0 {
            return 0;
        }
        let c = rows[0].len();
        let mut a: Vec<Vec<i128>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| x as i128).collect())
            .collect();
        let mut rank = 0usize;
        let mut prev = 1i128;
        for col in 0..c {
            // find pivot
            let Some(p) = (rank..r).find(|&i| a[i][col] != 0) else {
                continue;
            };
            a.swap(rank, p);
            for i in 0..r {
                if i == rank {
                    continue;
                }
                for j in 0..c {
                    if j == col {
                        continue;
                    }
                    a[i][j] = (a[rank][col] * a[i][j] - a[i][col] * a[rank][j]) / prev;
                }
                a[i][col] = 0;
            }
            prev = a[rank][col];
            rank += 1;
            if rank == r {
                break;
            }
        }
        rank
    }

    /// Determinant of a square integer matrix (Bareiss, exact in i128).
    pub fn det_i64(rows: &[Vec<i64>]) -> i128 {
        let n = rows.len();
        if n == 0 {
            return 1;
        }
        assert!(rows.iter().all(|r| r.len() == n));
        let mut a: Vec<Vec<i128>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| x as i128).collect())
            .collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| a[i][k] != 0) else {
                return 0;
            };
            if p != k {
                a.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) / prev;
                }
                a[i][k] = 0;
            }
            prev = a[k][k];
        }
        sign * a[n - 1][n - 1]
    }

    /// Reduced row echelon form over rationals; returns (rref, pivot columns).
    pub fn rref_big(mut a: Vec<Vec<BigRat>>) -> (Vec<Vec<BigRat>>, Vec<usize>) {
        let rows = a.len();
        let cols = if rows == 0 { 0 } else { a[0].len() };
        let mut pivots = Vec::new();
        let mut rank = 0usize;
        for col in 0..cols {
            let Some(p) = (rank..rows).find(|&i| !a[i][col].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            let inv = a[rank][col].clone();
            for j in col..cols {
                a[rank][j] = &a[rank][j] / &inv;
            }
            for i in 0..rows {
                if i != rank && !a[i][col].is_zero() {
                    let factor = a[i][col].clone();
                    for j in col..cols {
                        let sub = &factor * &a[rank][j];
                        a[i][j] = &a[i][j] - &sub;
                    }
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == rows {
                break;
            }
        }
        (a, pivots)
    }

    /// Inverse of a square rational matrix, or None when singular.
    pub fn invert_big(a: &[Vec<BigRat>]) -> Option<Vec<Vec<BigRat>>> {
        let n = a.len();
        let mut aug: Vec<Vec<BigRat>> = a
            .iter()
            .enumerate()
            .map(|(i, row)| {
                assert_eq!(row.len(), n);
                let mut r = row.clone();
                for j in 0..n {
                    r.push(if i == j { BigRat::one() } else { BigRat::zero() });
                }
                r
            })
            .collect();
        let (rref, pivots) = {
            let taken = core::mem::take(&mut aug);
            rref_big(taken)
        };
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        Some(rref.into_iter().map(|row| row[n..].to_vec()).collect())
    }

    /// Exact feasibility of target in conv(points) via phase-1 simplex with
    /// Bland's rule. `points` are the candidate vertices, all of dimension d.
    pub fn in_convex_hull(points: &[Vec<BigRat>], target: &[BigRat]) -> bool {
        let d = target.len();
        let n = points.len();
        if n == 0 {
            return false;
        }
        // constraints: sum_i mu_i p_i = target, sum_i mu_i = 1, mu >= 0
        let m = d + 1;
        // tableau rows: m x (n + m + 1); artificial variables get an identity
        let mut tab: Vec<Vec<BigRat>> = Vec::with_capacity(m);
        for row in 0..m {
            let mut r = Vec::with_capacity(n + m + 1);
            for point in points.iter() {
                assert_eq!(point.len(), d);
                r.push(if row < d {
                    point[row].clone()
                } else {
                    BigRat::one()
                });
            }
            for j in 0..m {
                r.push(if j == row { BigRat::one() } else { BigRat::zero() });
            }
            r.push(if row < d {
                target[row].clone()
            } else {
                BigRat::one()
            });
            // rhs must be nonnegative for the artificial basis
            if r[n + m].is_negative() {
                for v in r.iter_mut() {
                    *v = -v.clone();
                }
            }
            tab.push(r);
        }
        let mut basis: Vec<usize> = (n..n + m).collect();
        // cost row for minimizing the sum of artificials, expressed in terms
        // of non-basic columns: c_j = -sum of rows (artificials start basic)
        let mut cost: Vec<BigRat> = vec![BigRat::zero(); n + m + 1];
        for j in 0..n + m + 1 {
            let mut s = BigRat::zero();
            for row in tab.iter() {
                s += &row[j];
            }
            cost[j] = -s;
        }
        for j in n..n + m {
            cost[j] = BigRat::zero(); // artificial columns are basic
        }
        loop {
            // Bland: first column with negative reduced cost (skip artificials;
            // they can only re-enter with cost 0)
            let Some(enter) = (0..n).find(|&j| cost[j].is_negative()) else {
                break;
            };
            // ratio test, Bland tie-break by lowest basis index
            let mut leave: Option<usize> = None;
            let mut best: Option<BigRat> = None;
            for (i, row) in tab.iter().enumerate() {
                if row[enter].is_positive() {
                    let ratio = &row[n + m] / &row[enter];
                    let better = match &best {
                        None => true,
                        Some(b) => {
                            ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()])
                        }
                    };
                    if better {
                        best = Some(ratio);
                        leave = Some(i);
                    }
                }
            }
            let Some(li) = leave else {
                // unbounded phase-1 cannot happen (costs bounded below by 0)
                return false;
            };
            // pivot on (li, enter)
            let piv = tab[li][enter].clone();
            for v in tab[li].iter_mut() {
                *v = &*v / &piv;
            }
            for i in 0..m {
                if i != li && !tab[i][enter].is_zero() {
                    let f = tab[i][enter].clone();
                    for j in 0..n + m + 1 {
                        let sub = &f * &tab[li][j];
                        tab[i][j] = &tab[i][j] - &sub;
                    }
                }
            }
            if !cost[enter].is_zero() {
                let f = cost[enter].clone();
                for j in 0..n + m + 1 {
                    let sub = &f * &tab[li][j];
                    cost[j] = &cost[j] - &sub;
                }
            }
            basis[li] = enter;
        }
        // feasible iff the phase-1 objective reached zero: all artificial
        // variables are out of the solution (objective value = -cost[rhs])
        cost[n + m].is_zero()
    }

    /// Smith-style diagonalization of an integer matrix: returns (u, d, w)
    /// with u*a*w = d, u and w unimodular, d diagonal (no divisibility chain).
    pub fn diagonalize_i64(a: &[Vec<i64>]) -> (Vec<Vec<i128>>, Vec<Vec<i128>>, Vec<Vec<i128>>) {
        let rows = a.len();
        let cols = if rows == 0 { 0 } else { a[0].len() };
        let mut d: Vec<Vec<i128>> = a
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        let mut u: Vec<Vec<i128>> = (0..rows)
            .map(|i| (0..rows).map(|j| i128::from(i == j)).collect())
            .collect();
        let mut w: Vec<Vec<i128>> = (0..cols)
            .map(|i| (0..cols).map(|j| i128::from(i == j)).collect())
            .collect();
        let t_max = rows.min(cols);
        for t in 0..t_max {
            loop {
                // locate the minimum-magnitude nonzero entry in the trailing block
                let mut pivot: Option<(usize, usize)> = None;
                for i in t..rows {
                    for j in t..cols {
                        if d[i][j] != 0
                            && pivot.is_none_or(|(pi, pj)| d[i][j].abs() < d[pi][pj].abs())
                        {
                            pivot = Some((i, j));
                        }
                    }
                }
                let Some((pi, pj)) = pivot else {
                    return (u, d, w);
                };
                if pi != t {
                    d.swap(t, pi);
                    u.swap(t, pi);
                }
                if pj != t {
                    for row in d.iter_mut() {
                        row.swap(t, pj);
                    }
                    for row in w.iter_mut() {
                        row.swap(t, pj);
                    }
                }
                let mut clean = true;
                for i in t + 1..rows {
                    let q = d[i][t].div_euclid(d[t][t]);
                    if q != 0 {
                        for j in 0..cols {
                            d[i][j] -= q * d[t][j];
                        }
                        for j in 0..rows {
                            u[i][j] -= q * u[t][j];
                        }
                    }
                    if d[i][t] != 0 {
                        clean = false;
                    }
                }
                for j in t + 1..cols {
                    let q = d[t][j].div_euclid(d[t][t]);
                    if q != 0 {
                        for i in 0..rows {
                            d[i][j] -= q * d[i][t];
                        }
                        for i in 0..cols {
                            w[i][j] -= q * w[i][t];
                        }
                    }
                    if d[t][j] != 0 {
                        clean = false;
                    }
                }
                if clean {
                    break;
                }
            }
        }
        (u, d, w)
    }

    /// Integer solutions of x * m = b (x a row vector). Returns a particular
    /// solution and a basis of the integer solution lattice of x * m = 0, or
    /// None when no integer solution exists.
    pub fn solve_row_system(m: &[Vec<i64>], b: &[i64]) -> Option<(Vec<i128>, Vec<Vec<i128>>)> {
        let v = m.len();
        let e = if v == 0 { 0 } else { m[0].len() };
        assert_eq!(b.len(), e);
        // transpose: (m^T) x^T = b^T, with m^T of shape e x v
        let at: Vec<Vec<i64>> = (0..e).map(|j| (0..v).map(|i| m[i][j]).collect()).collect();
        let (u, d, w) = diagonalize_i64(&at);
        // u * at * w = d  =>  at * (w y) = u^{-1} d y; solve d y = u b
        let ub: Vec<i128> = (0..e)
            .map(|i| (0..e).map(|j| u[i][j] * b[j] as i128).sum())
            .collect();
        let mut y = vec![0i128; v];
        let rank = (0..v.min(e)).take_while(|&t| d[t][t] != 0).count();
        for t in 0..v.min(e) {
            if d[t][t] != 0 {
                if ub[t] % d[t][t] != 0 {
                    return None;
                }
                y[t] = ub[t] / d[t][t];
            }
        }
        for t in v.min(e)..e {
            if ub[t] != 0 {
                return None;
            }
        }
        for (t, &ubt) in ub.iter().enumerate().take(v.min(e)) {
            if d[t][t] == 0 && ubt != 0 {
                return None;
            }
        }
        let particular: Vec<i128> = (0..v)
            .map(|i| (0..v).map(|j| w[i][j] * y[j]).sum())
            .collect();
        let kernel: Vec<Vec<i128>> = (rank..v)
            .map(|j| (0..v).map(|i| w[i][j]).collect())
            .collect();
        Some((particular, kernel))
    }
}

/// Small dense float linear algebra (dimensions <= ~8).
pub mod linalg {
    use super::*;

    /// Solves a (n x n) * x = b by partial-pivot Gaussian elimination.
    pub fn solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
        let n = a.len();
        let mut m: Vec<Vec<f64>> = a
            .iter()
            .zip(b.iter())
            .map(|(row, &rhs)| {
                assert_eq!(row.len(), n);
                let mut r = row.clone();
                r.push(rhs);
                r
            })
            .collect();
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| libm::fabs(m[i][k]).total_cmp(&libm::fabs(m[j][k])))?;
            if libm::fabs(m[p][k]) < 1e-300 {
                return None;
            }
            m.swap(k, p);
            for i in k + 1..n {
                let f = m[i][k] / m[k][k];
                for j in k..=n {
                    m[i][j] -= f * m[k][j];
                }
            }
        }
        let mut x = vec![0.0; n];
        for k in (0..n).rev() {
            let mut s = m[k][n];
            for j in k + 1..n {
                s -= m[k][j] * x[j];
            }
            x[k] = s / m[k][k];
        }
        Some(x)
    }

    /// Matrix inverse through column-wise solves.
    pub fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
        let n = a.len();
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            cols.push(solve(a, &e)?);
        }
        let mut out = vec![vec![0.0; n]; n];
        for (j, col) in cols.iter().enumerate() {
            for i in 0..n {
                out[i][j] = col[i];
            }
        }
        Some(out)
    }

    pub fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let (n, k) = (a.len(), b.len());
        let m = if k == 0 { 0 } else { b[0].len() };
        let mut out = vec![vec![0.0; m]; n];
        for i in 0..n {
            for (l, brow) in b.iter().enumerate() {
                let f = a[i][l];
                if f != 0.0 {
                    for j in 0..m {
                        out[i][j] += f * brow[j];
                    }
                }
            }
        }
        out
    }
}
