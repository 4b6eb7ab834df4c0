//! Test-side oracles, deliberately independent of the library's own
//! evaluation paths: a Stirling-series log-Gamma, a fixed-refinement
//! Simpson rule, and small statistical helpers.

#![allow(dead_code)]

/// ln Gamma(x) by recurrence up to x >= 20 and the Stirling series with
/// Bernoulli corrections; independent of the crate's Lanczos evaluation.
pub fn stirling_ln_gamma(mut x: f64) -> f64 {
    assert!(x > 0.0);
    let mut shift = 0.0;
    while x < 20.0 {
        shift -= x.ln();
        x += 1.0;
    }
    let w = 1.0 / (x * x);
    let series = (1.0 / 12.0
        + w * (-1.0 / 360.0 + w * (1.0 / 1260.0 + w * (-1.0 / 1680.0 + w / 1188.0))))
        / x;
    shift + 0.5 * ((2.0 * std::f64::consts::PI).ln() - x.ln()) + x * (x.ln() - 1.0) + series
}

pub fn stirling_gamma(x: f64) -> f64 {
    stirling_ln_gamma(x).exp()
}

/// Composite Simpson rule with 2n panels; the caller picks n high enough
/// and verifies stability by doubling.
pub fn simpson_fixed<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let n = 2 * panels;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let x = a + h * i as f64;
        acc += f(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// Simpson with one refinement check: doubles panels until two estimates
/// agree to `tol`, capped at 2^18 panels.
pub fn simpson_auto<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let mut panels = 64;
    let mut prev = simpson_fixed(f, a, b, panels);
    while panels < (1 << 18) {
        panels *= 2;
        let next = simpson_fixed(f, a, b, panels);
        if (next - prev).abs() <= tol {
            return next;
        }
        prev = next;
    }
    prev
}
