//! Oracle helpers shared by the integration suites: independent numeric
//! routes (quadrature, exact rationals, direct binomial CDFs) that never
//! touch the closed-form algebra under test.
#![allow(dead_code)]

/// Adaptive Simpson with Richardson correction. Plenty for the smooth,
/// exponentially decaying integrands used here.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, m: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
    }
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        m: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let left = simpson(f, a, lm, m);
        let right = simpson(f, m, rm, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, lm, m, left, 0.5 * tol, depth - 1) + rec(f, m, rm, b, right, 0.5 * tol, depth - 1)
    }
    let m = 0.5 * (a + b);
    rec(f, a, m, b, simpson(f, a, m, b), tol, 48)
}

/// Adaptive Simpson over `panels` uniform subintervals. Blind adaptivity
/// from three probe points can miss a hump that sits between them (the
/// ordered-gain densities vanish at both endpoints of their support);
/// paneling at the density's natural unit scale removes that failure mode.
pub fn paneled_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, panels: u32) -> f64 {
    let width = (b - a) / panels as f64;
    let per_panel_tol = tol / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + i as f64 * width;
            adaptive_simpson(f, lo, lo + width, per_panel_tol)
        })
        .sum()
}

/// Double integral of `f(x, y)` over 0 <= x <= X, max(x, y_lo(x)) <= y <= Y
/// by nested paneled Simpson.
pub fn double_integral<F, G>(f: &F, y_lo: &G, x_hi: f64, y_hi: f64, tol: f64) -> f64
where
    F: Fn(f64, f64) -> f64,
    G: Fn(f64) -> f64,
{
    paneled_simpson(
        &|x: f64| {
            let lo = y_lo(x).max(x);
            if lo >= y_hi {
                0.0
            } else {
                paneled_simpson(&|y: f64| f(x, y), lo, y_hi, tol * 0.1, 64)
            }
        },
        0.0,
        x_hi,
        tol,
        64,
    )
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

fn binom_u128(n: u32, k: u32) -> u128 {
    let mut r: u128 = 1;
    for i in 0..k as u128 {
        r = r * (n as u128 - i) / (i + 1);
    }
    r
}

/// The combinatorial identity's left side in exact rational arithmetic:
/// (M! / ((m-1)!(M-m)!)) * sum_l (-1)^l C(m-1, l) / (M-m+l+1),
/// returned as a reduced fraction. Equality with 1/1 is the oracle.
pub fn identity_lhs_exact(population: u32, weak: u32) -> (i128, i128) {
    let (mm, m) = (population, weak);
    // M!/((m-1)!(M-m)!) = C(M, m) * m
    let pref = binom_u128(mm, m) as i128 * m as i128;
    let (mut num, mut den): (i128, i128) = (0, 1);
    for l in 0..m {
        let sign = if l % 2 == 0 { 1 } else { -1 };
        let c = binom_u128(m - 1, l) as i128 * sign;
        let d = (mm - m + l + 1) as i128;
        num = num * d + c * den;
        den *= d;
        let g = gcd(num, den);
        num /= g;
        den /= g;
    }
    num *= pref;
    let g = gcd(num, den);
    (num / g, den / g)
}

/// CDF of the k-th smallest of `population` unit-mean exponentials, by the
/// direct binomial counting argument (at least k of them below t).
pub fn order_statistic_cdf(t: f64, population: u32, k: u32) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let p = 1.0 - (-t).exp();
    let q = (-t).exp();
    let mut sum = 0.0;
    for j in k..=population {
        sum +=
            binom_u128(population, j) as f64 * p.powi(j as i32) * q.powi((population - j) as i32);
    }
    sum
}

/// Two-sided Kolmogorov-Smirnov distance of a sorted sample against a CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(sorted: &[f64], cdf: &F) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}
