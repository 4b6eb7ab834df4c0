//! Quadrature building blocks: Gauss-Jacobi rules for endpoint-weighted
//! integrals, adaptive Simpson for smooth integrands on finite intervals,
//! and the logarithmic grid used by the Laplace-transform comparisons.

use crate::error::{domain, Error, Result};
use crate::specfun::ln_gamma;

/// Gauss-Jacobi rule: nodes and weights for
/// integral over [-1,1] of (1-x)^alpha (1+x)^beta f(x) dx.
///
/// Nodes are computed by Newton iteration on the Jacobi three-term
/// recurrence; they come out ordered decreasing in x.
#[derive(Debug, Clone)]
pub struct GaussJacobi {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
}

const NEWTON_EPS: f64 = 3e-15;
const NEWTON_MAXIT: usize = 30;

impl GaussJacobi {
    // the numeric literals in the initial guesses are the classical
    // tuning constants of this recipe, not approximations of anything
    #[allow(clippy::approx_constant, clippy::excessive_precision)]
    pub fn new(n: usize, alpha: f64, beta: f64) -> Result<Self> {
        if n < 2 {
            return Err(domain("gauss_jacobi", format!("need n >= 2, got {n}")));
        }
        if alpha <= -1.0 || beta <= -1.0 {
            return Err(domain(
                "gauss_jacobi",
                format!("exponents must exceed -1, got ({alpha}, {beta})"),
            ));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        let alfbet = alpha + beta;
        let mut z = 0.0;
        for i in 1..=n {
            // initial guesses follow the classical recipe; interior roots
            // are extrapolated from the previous three
            if i == 1 {
                let an = alpha / nf;
                let bn = beta / nf;
                let r1 = (1.0 + alpha) * (2.78 / (4.0 + nf * nf) + 0.768 * an / nf);
                let r2 = 1.0 + 1.48 * an + 0.96 * bn + 0.452 * an * an + 0.83 * an * bn;
                z = 1.0 - r1 / r2;
            } else if i == 2 {
                let r1 = (4.1 + alpha) / ((1.0 + alpha) * (1.0 + 0.156 * alpha));
                let r2 = 1.0 + 0.06 * (nf - 8.0) * (1.0 + 0.12 * alpha) / nf;
                let r3 = 1.0 + 0.012 * beta * (1.0 + 0.25 * alpha.abs()) / nf;
                z -= (1.0 - z) * r1 * r2 * r3;
            } else if i == 3 {
                let r1 = (1.67 + 0.28 * alpha) / (1.0 + 0.37 * alpha);
                let r2 = 1.0 + 0.22 * (nf - 8.0) / nf;
                let r3 = 1.0 + 8.0 * beta / ((6.28 + beta) * nf * nf);
                z -= (nodes[0] - z) * r1 * r2 * r3;
            } else if i == n - 1 {
                let r1 = (1.0 + 0.235 * beta) / (0.766 + 0.119 * beta);
                let r2 = 1.0 / (1.0 + 0.639 * (nf - 4.0) / (1.0 + 0.71 * (nf - 4.0)));
                let r3 = 1.0 / (1.0 + 20.0 * alpha / ((7.5 + alpha) * nf * nf));
                z += (z - nodes[i - 3]) * r1 * r2 * r3;
            } else if i == n {
                let r1 = (1.0 + 0.37 * beta) / (1.67 + 0.28 * beta);
                let r2 = 1.0 / (1.0 + 0.22 * (nf - 8.0) / nf);
                let r3 = 1.0 / (1.0 + 8.0 * alpha / ((6.28 + alpha) * nf * nf));
                z += (z - nodes[i - 3]) * r1 * r2 * r3;
            } else {
                z = 3.0 * nodes[i - 2] - 3.0 * nodes[i - 3] + nodes[i - 4];
            }

            let mut converged = false;
            let mut polish = 0u8;
            let mut p2 = 0.0;
            let mut pp = 0.0;
            let mut temp = 0.0;
            for _ in 0..NEWTON_MAXIT {
                temp = 2.0 + alfbet;
                let mut p1 = (alpha - beta + temp * z) / 2.0;
                p2 = 1.0;
                for j in 2..=n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    temp = 2.0 * jf + alfbet;
                    let a = 2.0 * jf * (jf + alfbet) * (temp - 2.0);
                    let b = (temp - 1.0)
                        * (alpha * alpha - beta * beta + temp * (temp - 2.0) * z);
                    let c = 2.0 * (jf - 1.0 + alpha) * (jf - 1.0 + beta) * temp;
                    p1 = (b * p2 - c * p3) / a;
                }
                pp = (nf * (alpha - beta - temp * z) * p1
                    + 2.0 * (nf + alpha) * (nf + beta) * p2)
                    / (temp * (1.0 - z * z));
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= NEWTON_EPS {
                    // one extra pass so pp and p2 are evaluated at the
                    // converged node before the weight formula uses them
                    polish += 1;
                    if polish == 2 {
                        converged = true;
                        break;
                    }
                }
            }
            if !converged {
                return Err(Error::QuadratureNonConvergence {
                    op: "gauss_jacobi_nodes",
                    diff: f64::NAN,
                });
            }
            nodes[i - 1] = z;
            weights[i - 1] = (ln_gamma(alpha + nf) + ln_gamma(beta + nf)
                - ln_gamma(nf + 1.0)
                - ln_gamma(nf + alfbet + 1.0))
                .exp()
                * temp
                * 2.0f64.powf(alfbet)
                / (pp * p2);
        }
        Ok(Self {
            nodes,
            weights,
            alpha,
            beta,
        })
    }

    /// integral over [0,1] of (1-w)^alpha w^beta g(w) dw via the affine
    /// map w = (1+x)/2.
    pub fn integrate_unit<F: FnMut(f64) -> f64>(&self, mut g: F) -> f64 {
        let scale = 2.0f64.powf(-(self.alpha + self.beta + 1.0));
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * g(0.5 * (1.0 + x));
        }
        acc * scale
    }
}

/// Adaptive Simpson integration of `f` on [a, b] to absolute tolerance
/// `tol`. `f` must be finite on the open interval.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(domain("adaptive_simpson", format!("bad interval [{a}, {b}]")));
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let mut budget = 2_000_000usize;
    let v = simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48, &mut budget)?;
    Ok(v)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
    budget: &mut usize,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    if *budget < 2 {
        return Err(Error::QuadratureNonConvergence {
            op: "adaptive_simpson",
            diff: tol,
        });
    }
    *budget -= 2;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let diff = left + right - whole;
    if !diff.is_finite() {
        return Err(Error::QuadratureNonConvergence {
            op: "adaptive_simpson",
            diff,
        });
    }
    // the absolute floor keeps algebraic endpoint singularities from
    // demanding ever-deeper subdivision once the leaf defect is negligible
    if diff.abs() <= 15.0 * tol
        || diff.abs() < 1e-13
        || (b - a) < 1e-14 * (b.abs() + a.abs() + 1.0)
    {
        return Ok(left + right + diff / 15.0);
    }
    if depth == 0 {
        // deep subdivision near an integrable endpoint singularity: the
        // leaf tolerance shrank below what f64 can resolve, but the
        // remaining defect is negligible in absolute terms
        if diff.abs() < 1e-12 {
            return Ok(left + right + diff / 15.0);
        }
        return Err(Error::QuadratureNonConvergence {
            op: "adaptive_simpson",
            diff,
        });
    }
    let l = simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1, budget)?;
    let r = simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1, budget)?;
    Ok(l + r)
}

/// Strictly increasing logarithmic grid with `n` points from `min` to `max`.
pub fn log_grid(min: f64, max: f64, n: usize) -> Vec<f64> {
    assert!(min > 0.0 && max > min && n >= 2);
    let lmin = min.ln();
    let step = (max.ln() - lmin) / (n - 1) as f64;
    (0..n).map(|i| (lmin + step * i as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma;

    fn beta_fn(a: f64, b: f64) -> f64 {
        gamma(a) * gamma(b) / gamma(a + b)
    }

    #[test]
    fn jacobi_rule_reproduces_beta_moments() {
        // integral over [0,1] of (1-w)^alpha w^beta w^k dw = B(beta+k+1, alpha+1)
        for &(alpha, beta) in &[(-0.5, 0.0), (0.3, -0.3), (0.0, 0.0), (0.7, 1.2), (-0.6, 2.0)] {
            let rule = GaussJacobi::new(64, alpha, beta).unwrap();
            for k in [0usize, 1, 2, 5, 17, 40] {
                let got = rule.integrate_unit(|w| w.powi(k as i32));
                let want = beta_fn(beta + k as f64 + 1.0, alpha + 1.0);
                assert!(
                    (got - want).abs() < 1e-11 * want.abs().max(1.0),
                    "alpha={alpha} beta={beta} k={k}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn jacobi_rule_high_degree_stable() {
        for n in [128usize, 512, 2048] {
            let rule = GaussJacobi::new(n, -0.4, 0.56).unwrap();
            let got = rule.integrate_unit(|w| (2.0 * w).cos());
            let reference = GaussJacobi::new(96, -0.4, 0.56)
                .unwrap()
                .integrate_unit(|w| (2.0 * w).cos());
            assert!(
                (got - reference).abs() < 1e-11,
                "n={n}: {got} vs {reference}"
            );
            assert!(rule.weights.iter().all(|w| w.is_finite() && *w > 0.0));
        }
    }

    #[test]
    fn simpson_elementary_integrals() {
        let v = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - (1.0f64.exp() - 1.0)).abs() < 1e-10);
        let v = adaptive_simpson(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn log_grid_monotone() {
        let g = log_grid(0.1, 100.0, 50);
        assert_eq!(g.len(), 50);
        assert!((g[0] - 0.1).abs() < 1e-12);
        assert!((g[49] - 100.0).abs() < 1e-10);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
