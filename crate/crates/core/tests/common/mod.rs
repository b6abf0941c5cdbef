//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the library's closed forms: CDFs come from
//! composite Simpson quadrature and eigenvalues from a direct quadratic solve.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

use qwalk::{CoinMatrix, C64};

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2) && n > 0);
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `∫_{−r}^{v} (1 − c u) g(u) f_K(u; r) du`. The substitution `u = r sin φ`
/// removes the edge singularities, leaving a smooth integrand in `φ`.
pub fn konno_integral(v: f64, r: f64, g: impl Fn(f64) -> f64, c: f64, panels: usize) -> f64 {
    if v <= -r {
        return 0.0;
    }
    let top = if v >= r { FRAC_PI_2 } else { (v / r).asin() };
    let s = (1.0 - r * r).sqrt();
    simpson(
        |phi| {
            let u = r * phi.sin();
            (1.0 - c * u) * g(u) * s / (PI * (1.0 - u * u))
        },
        -FRAC_PI_2,
        top,
        panels,
    )
}

/// CDF of `(1 − c v) f_K(v; r)` by quadrature.
pub fn limit_cdf(v: f64, r: f64, c: f64) -> f64 {
    konno_integral(v, r, |_| 1.0, c, 2000)
}

/// Eigenvalues of a 2×2 matrix from its characteristic polynomial.
pub fn eigenvalues_2x2(m: [[C64; 2]; 2]) -> [C64; 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (tr * tr * 0.25 - det).sqrt();
    [tr * 0.5 + disc, tr * 0.5 - disc]
}

/// `diag(e^{ik}, e^{−ik}) C`, written out entrywise.
pub fn symbol_entries(k: f64, coin: &CoinMatrix) -> [[C64; 2]; 2] {
    let (p, q) = (C64::from_polar(1.0, k), C64::from_polar(1.0, -k));
    [[p * coin.a(), p * coin.b()], [q * coin.c(), q * coin.d()]]
}

/// `−d arg λ/dk` for the eigenvalue branch through `lambda` at `k`, by a
/// fourth-order central difference with step `h`.
pub fn fd_velocity(coin: &CoinMatrix, k: f64, lambda: C64, h: f64) -> f64 {
    let phase_at = |dk: f64| {
        let ev = eigenvalues_2x2(symbol_entries(k + dk, coin));
        let nearest = if (ev[0] - lambda).norm() <= (ev[1] - lambda).norm() {
            ev[0]
        } else {
            ev[1]
        };
        (nearest / lambda).arg()
    };
    let d = (-phase_at(2.0 * h) + 8.0 * phase_at(h) - 8.0 * phase_at(-h) + phase_at(-2.0 * h))
        / (12.0 * h);
    -d
}

/// Empirical CDF of `X/t` at `v`, straight from a position law.
pub fn empirical_cdf(law: &qwalk::PositionDistribution, v: f64) -> f64 {
    let t = law.time() as f64;
    law.iter()
        .filter(|&(x, _)| x as f64 / t <= v)
        .map(|(_, p)| p)
        .sum()
}

/// KS distance on the atoms `x/t` of the law and 2001 grid points of
/// `[−1, 1]`.
pub fn ks_against(law: &qwalk::PositionDistribution, cdf: impl Fn(f64) -> f64) -> f64 {
    let t = law.time() as f64;
    // sort once and sweep
    let mut atoms: Vec<(f64, f64)> = law.iter().map(|(x, p)| (x as f64 / t, p)).collect();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut probes: Vec<f64> = atoms.iter().map(|a| a.0).collect();
    probes.extend((0..2001).map(|i| -1.0 + 2.0 * i as f64 / 2000.0));
    probes.sort_by(f64::total_cmp);
    let mut acc = 0.0;
    let mut j = 0;
    let mut worst: f64 = 0.0;
    for v in probes {
        while j < atoms.len() && atoms[j].0 <= v {
            acc += atoms[j].1;
            j += 1;
        }
        worst = worst.max((acc - cdf(v)).abs());
    }
    worst
}
