//! Catalog of Bernstein functions f (Laplace exponents of subordinators)
//! with exact derivatives of all orders and the Levy-moment weights built
//! from them.
//!
//! The catalog is closed: the composition and hitting formulas need exact
//! high-order derivatives, which rules out user-supplied functions.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::specfun::falling_factorial;

/// A catalogued Bernstein function: f(0) = 0, f increasing and concave.
///
/// Text encoding (CLI/config): `linear`, `stable:a`, `tempered:a,t`, `gamma:b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BernsteinFunction {
    /// f(x) = x (unit drift; the plain Poisson case).
    Linear,
    /// f(x) = x^alpha, alpha in (0, 1].
    Stable { alpha: f64 },
    /// f(x) = (x + theta)^alpha - theta^alpha, alpha in (0, 1], theta >= 0.
    TemperedStable { alpha: f64, theta: f64 },
    /// f(x) = b ln(1 + x/b), b > 0.
    Gamma { b: f64 },
}

use BernsteinFunction::*;

impl BernsteinFunction {
    pub fn stable(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(domain("bernstein", format!("stable alpha must be in (0,1], got {alpha}")));
        }
        Ok(Stable { alpha })
    }

    pub fn tempered_stable(alpha: f64, theta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(domain(
                "bernstein",
                format!("tempered alpha must be in (0,1], got {alpha}"),
            ));
        }
        if theta < 0.0 {
            return Err(domain("bernstein", format!("theta must be >= 0, got {theta}")));
        }
        Ok(TemperedStable { alpha, theta })
    }

    pub fn gamma(b: f64) -> Result<Self> {
        if b <= 0.0 {
            return Err(domain("bernstein", format!("gamma b must be > 0, got {b}")));
        }
        Ok(Gamma { b })
    }

    /// f(x) for x >= 0; f(0) = 0 exactly.
    pub fn value(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Err(domain("bernstein::value", format!("x must be >= 0, got {x}")));
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        Ok(match *self {
            Linear => x,
            Stable { alpha } => x.powf(alpha),
            TemperedStable { alpha, theta } => (x + theta).powf(alpha) - theta.powf(alpha),
            Gamma { b } => b * (x / b).ln_1p(),
        })
    }

    /// n-th derivative f^(n)(x), n >= 1. Errors where the derivative
    /// diverges (stable family at x = 0).
    pub fn deriv(&self, n: u32, x: f64) -> Result<f64> {
        if n == 0 {
            return self.value(x);
        }
        if x < 0.0 {
            return Err(domain("bernstein::deriv", format!("x must be >= 0, got {x}")));
        }
        match *self {
            Linear => Ok(if n == 1 { 1.0 } else { 0.0 }),
            Stable { alpha } => {
                if x == 0.0 && alpha < 1.0 {
                    return Err(domain(
                        "bernstein::deriv",
                        "stable derivative diverges at x = 0".to_string(),
                    ));
                }
                if alpha == 1.0 {
                    return Ok(if n == 1 { 1.0 } else { 0.0 });
                }
                Ok(falling_factorial(alpha, n) * x.powf(alpha - n as f64))
            }
            TemperedStable { alpha, theta } => {
                if x + theta == 0.0 {
                    return Err(domain(
                        "bernstein::deriv",
                        "tempered-stable derivative diverges at x + theta = 0".to_string(),
                    ));
                }
                if alpha == 1.0 {
                    return Ok(if n == 1 { 1.0 } else { 0.0 });
                }
                Ok(falling_factorial(alpha, n) * (x + theta).powf(alpha - n as f64))
            }
            Gamma { b } => {
                // f'(x) = b/(b+x); f^(n) = (-1)^(n-1) (n-1)! b / (b+x)^n
                let mut v = b / (b + x).powi(n as i32);
                for j in 1..n {
                    v *= j as f64;
                }
                Ok(if n.is_multiple_of(2) { -v } else { v })
            }
        }
    }

    /// First derivative at 0+, infinite for the strictly stable family.
    /// This is the first Levy moment, the per-unit-time mean jump input.
    pub fn deriv1_at_zero(&self) -> Option<f64> {
        match *self {
            Linear => Some(1.0),
            Stable { alpha } => {
                if alpha == 1.0 {
                    Some(1.0)
                } else {
                    None
                }
            }
            TemperedStable { alpha, theta } => {
                if alpha == 1.0 {
                    Some(1.0)
                } else if theta > 0.0 {
                    Some(alpha * theta.powf(alpha - 1.0))
                } else {
                    None
                }
            }
            Gamma { .. } => Some(1.0),
        }
    }

    /// Second derivative at 0+ where finite (None when divergent).
    pub fn deriv2_at_zero(&self) -> Option<f64> {
        match *self {
            Linear => Some(0.0),
            Stable { alpha } => {
                if alpha == 1.0 {
                    Some(0.0)
                } else {
                    None
                }
            }
            TemperedStable { alpha, theta } => {
                if alpha == 1.0 {
                    Some(0.0)
                } else if theta > 0.0 {
                    Some(alpha * (alpha - 1.0) * theta.powf(alpha - 2.0))
                } else {
                    None
                }
            }
            Gamma { b } => Some(-1.0 / b),
        }
    }

    /// Exponential Levy-moment weights e_m = t lambda^m mu_m / (m-1)!, m = 1..=k,
    /// where mu_m = integral of s^m e^{-lambda s} over the Levy measure
    /// = (-1)^{m+1} f^(m)(lambda). All weights are nonnegative; they drive the
    /// positive Bell recursion for the jump distribution and the pmf.
    pub(crate) fn levy_weights(&self, lambda: f64, t: f64, k: usize) -> Vec<f64> {
        let mut e = vec![0.0; k + 1]; // e[0] unused
        if k == 0 {
            return e;
        }
        match *self {
            Linear => {
                e[1] = t * lambda;
            }
            Stable { alpha } => {
                if alpha == 1.0 {
                    e[1] = t * lambda;
                } else {
                    // e_1 = t alpha lambda^alpha; e_{m+1} = e_m (m - alpha)/m
                    let mut cur = t * alpha * lambda.powf(alpha);
                    for (m, slot) in e.iter_mut().enumerate().skip(1) {
                        *slot = cur;
                        cur *= (m as f64 - alpha) / m as f64;
                    }
                }
            }
            TemperedStable { alpha, theta } => {
                if alpha == 1.0 {
                    e[1] = t * lambda;
                } else {
                    let ratio = lambda / (lambda + theta);
                    let mut cur = t * alpha * lambda * (lambda + theta).powf(alpha - 1.0);
                    for (m, slot) in e.iter_mut().enumerate().skip(1) {
                        *slot = cur;
                        cur *= ratio * (m as f64 - alpha) / m as f64;
                    }
                }
            }
            Gamma { b } => {
                let ratio = lambda / (b + lambda);
                let mut cur = t * b * ratio;
                for slot in e.iter_mut().skip(1) {
                    *slot = cur;
                    cur *= ratio;
                }
            }
        }
        e
    }

    /// Derivatives g_k = d^k/du^k exp(-t f(lambda u)) at u = 1 for
    /// k = 0..=k_max, by the complete Bell-polynomial recursion over the
    /// analytic derivatives of f. Signs alternate: (-1)^k g_k >= 0.
    pub fn exp_comp_derivs(&self, lambda: f64, t: f64, k_max: usize) -> Result<Vec<f64>> {
        if lambda <= 0.0 || t <= 0.0 {
            return Err(domain(
                "exp_comp_derivs",
                format!("lambda and t must be > 0, got ({lambda}, {t})"),
            ));
        }
        let c = self.scaled_pmf_coeffs(lambda, t, k_max);
        let g0 = (-t * self.value(lambda)?).exp();
        let mut out = Vec::with_capacity(k_max + 1);
        let mut factorial = 1.0;
        for (k, ck) in c.iter().enumerate() {
            if k > 0 {
                factorial *= k as f64;
            }
            let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
            let g = sign * factorial * ck * g0;
            if !g.is_finite() {
                return Err(Error::Overflow {
                    op: "exp_comp_derivs",
                });
            }
            out.push(g);
        }
        Ok(out)
    }

    /// Scaled coefficients c_k = (-1)^k g_k / (k! g_0) >= 0, i.e. the pmf of
    /// the associated count process divided by its k = 0 mass. The recursion
    /// c_{k+1} = (1/(k+1)) sum_{m=1}^{k+1} e_m c_{k+1-m} has all-positive
    /// terms, so it is stable for any k.
    pub(crate) fn scaled_pmf_coeffs(&self, lambda: f64, t: f64, k_max: usize) -> Vec<f64> {
        let e = self.levy_weights(lambda, t, k_max);
        let mut c = vec![0.0; k_max + 1];
        c[0] = 1.0;
        for k in 1..=k_max {
            let mut acc = 0.0;
            for m in 1..=k {
                acc += e[m] * c[k - m];
            }
            c[k] = acc / k as f64;
        }
        c
    }

    /// Derivatives h_j = d^j/du^j [1/f(lambda u)] at u = 1 for j = 0..=k_max,
    /// by the Leibniz recursion on f(lambda u) h(u) = 1.
    pub fn reciprocal_derivs(&self, lambda: f64, k_max: usize) -> Result<Vec<f64>> {
        let f_l = self.value(lambda)?;
        if f_l <= 0.0 {
            return Err(Error::Singular {
                op: "reciprocal_derivs",
                msg: format!("f({lambda}) = {f_l}"),
            });
        }
        // F_j = d^j/du^j f(lambda u)|_{u=1} = lambda^j f^(j)(lambda)
        let mut big_f = vec![0.0; k_max + 1];
        big_f[0] = f_l;
        for (j, slot) in big_f.iter_mut().enumerate().skip(1) {
            *slot = lambda.powi(j as i32) * self.deriv(j as u32, lambda)?;
        }
        let mut h = vec![0.0; k_max + 1];
        h[0] = 1.0 / f_l;
        for n in 1..=k_max {
            let mut acc = 0.0;
            let mut binom = 1.0; // C(n, j)
            for j in 1..=n {
                binom *= (n - j + 1) as f64 / j as f64;
                acc += binom * big_f[j] * h[n - j];
            }
            h[n] = -acc / f_l;
        }
        Ok(h)
    }
}

impl fmt::Display for BernsteinFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Linear => write!(f, "linear"),
            Stable { alpha } => write!(f, "stable:{alpha}"),
            TemperedStable { alpha, theta } => write!(f, "tempered:{alpha},{theta}"),
            Gamma { b } => write!(f, "gamma:{b}"),
        }
    }
}

impl FromStr for BernsteinFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "linear" {
            return Ok(Linear);
        }
        let (tag, args) = s.split_once(':').ok_or_else(|| Error::Parse {
            msg: format!("expected `linear`, `stable:a`, `tempered:a,t` or `gamma:b`, got `{s}`"),
        })?;
        let nums: Vec<f64> = args
            .split(',')
            .map(|p| {
                p.trim().parse::<f64>().map_err(|_| Error::Parse {
                    msg: format!("bad number `{p}` in `{s}`"),
                })
            })
            .collect::<Result<_>>()?;
        match (tag, nums.as_slice()) {
            ("stable", [a]) => Self::stable(*a),
            ("tempered", [a, t]) => Self::tempered_stable(*a, *t),
            ("gamma", [b]) => Self::gamma(*b),
            _ => Err(Error::Parse {
                msg: format!("unknown Bernstein encoding `{s}`"),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_match_closed_forms() {
        assert_eq!(BernsteinFunction::stable(0.5).unwrap().value(4.0).unwrap(), 2.0);
        assert_eq!(
            BernsteinFunction::tempered_stable(0.5, 1.0).unwrap().value(0.0).unwrap(),
            0.0
        );
        let g = BernsteinFunction::gamma(2.0).unwrap();
        assert!((g.value(2.0).unwrap() - 2.0 * 2.0f64.ln()).abs() < 1e-14);
        assert_eq!(Linear.value(3.5).unwrap(), 3.5);
    }

    #[test]
    fn value_rejects_negative() {
        assert!(Linear.value(-1.0).is_err());
    }

    #[test]
    fn derivs_linear_and_stable() {
        assert_eq!(Linear.deriv(1, 2.0).unwrap(), 1.0);
        assert_eq!(Linear.deriv(2, 2.0).unwrap(), 0.0);
        let s = BernsteinFunction::stable(0.5).unwrap();
        assert!((s.deriv(1, 1.0).unwrap() - 0.5).abs() < 1e-15);
        // alpha (alpha-1) x^(alpha-2) at x = 1
        assert!((s.deriv(2, 1.0).unwrap() + 0.25).abs() < 1e-15);
        assert!(s.deriv(1, 0.0).is_err());
    }

    #[test]
    fn tempered_deriv_at_zero() {
        let ts = BernsteinFunction::tempered_stable(0.5, 1.0).unwrap();
        assert!((ts.deriv(1, 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(ts.deriv1_at_zero(), Some(0.5));
    }

    #[test]
    fn derivs_match_finite_differences() {
        let cases = [
            BernsteinFunction::stable(0.7).unwrap(),
            BernsteinFunction::tempered_stable(0.5, 1.0).unwrap(),
            BernsteinFunction::gamma(2.0).unwrap(),
        ];
        let h = 1e-5;
        for f in cases {
            for x in [0.8, 1.5] {
                let d1 = f.deriv(1, x).unwrap();
                let fd1 = (f.value(x + h).unwrap() - f.value(x - h).unwrap()) / (2.0 * h);
                assert!((d1 - fd1).abs() < 1e-8 * d1.abs().max(1.0), "{f} d1 at {x}");
                let d2 = f.deriv(2, x).unwrap();
                let fd2 = (f.value(x + h).unwrap() - 2.0 * f.value(x).unwrap()
                    + f.value(x - h).unwrap())
                    / (h * h);
                assert!((d2 - fd2).abs() < 1e-4 * d2.abs().max(1.0), "{f} d2 at {x}");
            }
        }
    }

    #[test]
    fn exp_comp_derivs_linear_is_exponential() {
        // e^{-u} derivatives at u = 1: (-1)^k e^{-1}
        let g = Linear.exp_comp_derivs(1.0, 1.0, 6).unwrap();
        for (k, gk) in g.iter().enumerate() {
            let want = if k % 2 == 0 { 1.0 } else { -1.0 } * (-1.0f64).exp();
            assert!((gk - want).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn exp_comp_derivs_stable_one_matches_linear() {
        let a = BernsteinFunction::stable(1.0).unwrap().exp_comp_derivs(1.3, 0.7, 8).unwrap();
        let b = Linear.exp_comp_derivs(1.3, 0.7, 8).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn exp_comp_derivs_stable_half_first_order() {
        // d/du e^{-sqrt(u)} at u=1 is -e^{-1}/2
        let g = BernsteinFunction::stable(0.5).unwrap().exp_comp_derivs(1.0, 1.0, 1).unwrap();
        assert!((g[1] + 0.5 * (-1.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn exp_comp_derivs_alternate_in_sign() {
        for f in [
            BernsteinFunction::stable(0.6).unwrap(),
            BernsteinFunction::gamma(1.0).unwrap(),
            BernsteinFunction::tempered_stable(0.4, 0.5).unwrap(),
        ] {
            let g = f.exp_comp_derivs(1.0, 1.0, 12).unwrap();
            for (k, gk) in g.iter().enumerate() {
                let signed = if k % 2 == 0 { *gk } else { -*gk };
                assert!(signed >= 0.0, "{f} k={k}: {gk}");
            }
        }
    }

    #[test]
    fn exp_comp_derivs_match_finite_differences() {
        let h = 1e-5;
        for f in [
            BernsteinFunction::stable(0.6).unwrap(),
            BernsteinFunction::gamma(2.0).unwrap(),
        ] {
            let lambda = 1.2;
            let t = 0.9;
            let g = f.exp_comp_derivs(lambda, t, 4).unwrap();
            let e = |u: f64| (-t * f.value(lambda * u).unwrap()).exp();
            let fd1 = (e(1.0 + h) - e(1.0 - h)) / (2.0 * h);
            assert!((g[1] - fd1).abs() < 1e-4 * fd1.abs().max(1e-3), "{f} g1");
            let fd2 = (e(1.0 + h) - 2.0 * e(1.0) + e(1.0 - h)) / (h * h);
            assert!((g[2] - fd2).abs() < 1e-4 * fd2.abs().max(1e-2), "{f} g2");
        }
    }

    #[test]
    fn reciprocal_derivs_closed_forms() {
        // linear, lambda = 2: h(u) = 1/(2u), h0 = 0.5
        let h = Linear.reciprocal_derivs(2.0, 3).unwrap();
        assert!((h[0] - 0.5).abs() < 1e-15);
        // stable: h(u) = lambda^-alpha u^-alpha, h1 = -alpha/lambda^alpha at lambda=1
        for alpha in [0.3, 0.5, 0.8] {
            let f = BernsteinFunction::stable(alpha).unwrap();
            let h = f.reciprocal_derivs(1.0, 4).unwrap();
            assert!((h[1] + alpha).abs() < 1e-13, "alpha={alpha}");
            // d^2/du^2 u^-alpha = alpha(alpha+1) u^-alpha-2
            assert!((h[2] - alpha * (alpha + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn reciprocal_derivs_satisfy_leibniz_product() {
        // sum_j C(n,j) F_j h_{n-j} = 0 for n >= 1
        for f in [
            BernsteinFunction::stable(0.7).unwrap(),
            BernsteinFunction::gamma(1.0).unwrap(),
            BernsteinFunction::tempered_stable(0.5, 1.0).unwrap(),
        ] {
            let lambda = 1.4;
            let h = f.reciprocal_derivs(lambda, 6).unwrap();
            for n in 1..=6usize {
                let mut acc = 0.0;
                let mut binom = 1.0;
                for j in 0..=n {
                    if j > 0 {
                        binom *= (n - j + 1) as f64 / j as f64;
                    }
                    let fj = if j == 0 {
                        f.value(lambda).unwrap()
                    } else {
                        lambda.powi(j as i32) * f.deriv(j as u32, lambda).unwrap()
                    };
                    acc += binom * fj * h[n - j];
                }
                assert!(acc.abs() < 1e-10, "{f} n={n}: residual {acc}");
            }
        }
    }

    #[test]
    fn reciprocal_derivs_match_finite_differences() {
        let hstep = 1e-5;
        for f in [
            BernsteinFunction::stable(0.6).unwrap(),
            BernsteinFunction::gamma(1.0).unwrap(),
        ] {
            let lambda = 1.0;
            let h = f.reciprocal_derivs(lambda, 4).unwrap();
            let r = |u: f64| 1.0 / f.value(lambda * u).unwrap();
            let fd1 = (r(1.0 + hstep) - r(1.0 - hstep)) / (2.0 * hstep);
            assert!((h[1] - fd1).abs() < 1e-4 * fd1.abs().max(1e-3));
        }
    }

    #[test]
    fn high_order_derivs_match_wide_stencils() {
        // k = 3, 4 need wider steps: f64 kills 1e-5 stencils at h^3, h^4,
        // while truncation wants them small; split the difference per order
        let h3s = 2e-3;
        let h4s = 3e-3;
        for f in [
            BernsteinFunction::stable(0.6).unwrap(),
            BernsteinFunction::tempered_stable(0.5, 1.0).unwrap(),
            BernsteinFunction::gamma(1.0).unwrap(),
        ] {
            let lambda = 1.1;
            let t = 0.9;
            let g = |u: f64| (-t * f.value(lambda * u).unwrap()).exp();
            let rcp = |u: f64| 1.0 / f.value(lambda * u).unwrap();
            let d3 = |q: &dyn Fn(f64) -> f64| {
                let h = h3s;
                (q(1.0 + 2.0 * h) - 2.0 * q(1.0 + h) + 2.0 * q(1.0 - h) - q(1.0 - 2.0 * h))
                    / (2.0 * h * h * h)
            };
            let d4 = |q: &dyn Fn(f64) -> f64| {
                let h = h4s;
                (q(1.0 + 2.0 * h) - 4.0 * q(1.0 + h) + 6.0 * q(1.0) - 4.0 * q(1.0 - h)
                    + q(1.0 - 2.0 * h))
                    / (h * h * h * h)
            };
            let gs = f.exp_comp_derivs(lambda, t, 4).unwrap();
            assert!((gs[3] - d3(&g)).abs() < 1e-4 * gs[3].abs() + 1e-5, "{f} g3");
            assert!((gs[4] - d4(&g)).abs() < 1e-4 * gs[4].abs() + 1e-4, "{f} g4");
            let hs = f.reciprocal_derivs(lambda, 4).unwrap();
            assert!((hs[3] - d3(&rcp)).abs() < 1e-4 * hs[3].abs() + 1e-5, "{f} h3");
            assert!((hs[4] - d4(&rcp)).abs() < 1e-4 * hs[4].abs() + 1e-4, "{f} h4");
        }
    }

    #[test]
    fn concavity_ratio_below_one() {
        // lambda f'(lambda)/f(lambda) < 1 for strictly concave members, = 1 for linear
        for lambda in [0.5, 1.0, 2.0] {
            for f in [
                BernsteinFunction::stable(0.5).unwrap(),
                BernsteinFunction::tempered_stable(0.5, 1.0).unwrap(),
                BernsteinFunction::gamma(1.0).unwrap(),
            ] {
                let r = lambda * f.deriv(1, lambda).unwrap() / f.value(lambda).unwrap();
                assert!(r > 0.0 && r < 1.0, "{f} at {lambda}: ratio {r}");
            }
            let r = lambda * Linear.deriv(1, lambda).unwrap() / Linear.value(lambda).unwrap();
            assert!((r - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn text_round_trip() {
        for s in ["linear", "stable:0.5", "tempered:0.5,1", "gamma:2"] {
            let f: BernsteinFunction = s.parse().unwrap();
            let back: BernsteinFunction = f.to_string().parse().unwrap();
            assert_eq!(f, back);
        }
        assert!("stable:1.5".parse::<BernsteinFunction>().is_err());
        assert!("weird:1".parse::<BernsteinFunction>().is_err());
        assert!("gamma:0".parse::<BernsteinFunction>().is_err());
    }
}
