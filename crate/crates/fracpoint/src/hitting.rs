//! First-passage (hitting) probabilities and hitting-time densities.
//!
//! A level k is hit when the running count equals k exactly at some jump;
//! multi-unit jumps can overshoot, which is why the probabilities sit
//! strictly below one for every fractional index.

use crate::bernstein::BernsteinFunction;
use crate::error::{domain, Error, Result};
use crate::mc::mc_fold;
use crate::processes::pmf_bernstein;
use crate::samplers::sample_sibuya;
use crate::specfun::ln_gamma;
use crate::stats::poisson_cdf;

/// How a hitting probability was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HittingMethod {
    Exact,
    Asymptotic,
    MonteCarlo,
}

/// A hitting probability with its provenance; `stderr` and
/// `truncation_bound` are populated exactly for Monte Carlo results.
#[derive(Debug, Clone, Copy)]
pub struct HittingResult {
    pub value: f64,
    pub method: HittingMethod,
    pub stderr: Option<f64>,
    pub truncation_bound: Option<f64>,
}

impl HittingResult {
    fn exact(value: f64) -> Self {
        Self {
            value,
            method: HittingMethod::Exact,
            stderr: None,
            truncation_bound: None,
        }
    }
}

fn check_alpha_k(alpha: f64, k: u64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain("hitting", format!("alpha must be in (0,1], got {alpha}")));
    }
    if k == 0 {
        return Err(domain("hitting", "level k must be >= 1"));
    }
    Ok(())
}

/// P{T_k < infinity} for the space-fractional process:
/// Gamma(k + alpha) / (Gamma(alpha) k!), in log space so k ~ 10^6 is fine.
pub fn hitting_prob_exact(alpha: f64, k: u64) -> Result<f64> {
    check_alpha_k(alpha, k)?;
    if alpha == 1.0 {
        return Ok(1.0);
    }
    let kf = k as f64;
    Ok((ln_gamma(kf + alpha) - ln_gamma(alpha) - ln_gamma(kf + 1.0)).exp())
}

/// The probabilities for k = 1..=k_max via the ratio recursion
/// p_k = ((alpha + k - 1)/k) p_{k-1}, p_0 = 1.
pub fn hitting_probs_by_recursion(alpha: f64, k_max: u64) -> Result<Vec<f64>> {
    check_alpha_k(alpha, k_max.max(1))?;
    let mut out = Vec::with_capacity(k_max as usize);
    let mut p = 1.0;
    for k in 1..=k_max {
        p *= (alpha + k as f64 - 1.0) / k as f64;
        out.push(p);
    }
    Ok(out)
}

/// Leading-order large-k behaviour of the hitting probability,
/// 1 / (Gamma(alpha) k^{1-alpha}): the ratio exact/asymptotic tends to 1.
pub fn hitting_prob_asymptotic(alpha: f64, k: u64) -> Result<f64> {
    check_alpha_k(alpha, k)?;
    if alpha == 1.0 {
        return Ok(1.0);
    }
    let kf = k as f64;
    Ok((-ln_gamma(alpha) + (alpha - 1.0) * kf.ln()).exp())
}

/// P{T_k < infinity} for a catalogued Bernstein function, by the last-jump
/// decomposition: sum_{j<k} over "sit at j, then jump exactly k - j".
/// Every term of the rearranged sum is nonnegative.
pub fn hitting_prob_bernstein(f: &BernsteinFunction, lambda: f64, k: u64) -> Result<f64> {
    if k == 0 {
        return Err(domain("hitting_prob_bernstein", "level k must be >= 1"));
    }
    if lambda <= 0.0 {
        return Err(domain("hitting_prob_bernstein", format!("lambda must be > 0, got {lambda}")));
    }
    let h = f.reciprocal_derivs(lambda, (k - 1) as usize)?;
    let mut total = 0.0;
    let mut j_fact = 1.0;
    for j in 0..k {
        if j > 0 {
            j_fact *= j as f64;
        }
        let m = (k - j) as u32; // jump size
        let mut lam_over_fact = 1.0;
        for i in 1..=m {
            lam_over_fact *= lambda / i as f64;
        }
        // (-1)^{m+1} f^{(m)}(lambda) is the Levy moment, >= 0
        let moment = if m % 2 == 1 { 1.0 } else { -1.0 } * f.deriv(m, lambda)?;
        // (-1)^j h_j >= 0 for the reciprocal of a Bernstein function
        let sitting = if j % 2 == 0 { 1.0 } else { -1.0 } * h[j as usize];
        total += (sitting / j_fact) * lam_over_fact * moment;
    }
    if !(0.0..=1.0 + 1e-9).contains(&total) {
        return Err(Error::Accuracy {
            op: "hitting_prob_bernstein",
            estimate: (total - total.clamp(0.0, 1.0)).abs(),
            bound: 1e-9,
        });
    }
    Ok(total.min(1.0))
}

/// Hitting-time density of level k at time s: the count sits at j at time s
/// and a jump of size k - j arrives in [s, s + ds).
pub fn hitting_time_density(f: &BernsteinFunction, lambda: f64, k: u64, s: f64) -> Result<f64> {
    if k == 0 {
        return Err(domain("hitting_time_density", "level k must be >= 1"));
    }
    if s <= 0.0 {
        return Err(domain("hitting_time_density", format!("s must be > 0, got {s}")));
    }
    let mut total = 0.0;
    for j in 0..k {
        let m = (k - j) as u32;
        let mut lam_over_fact = 1.0;
        for i in 1..=m {
            lam_over_fact *= lambda / i as f64;
        }
        let moment = if m % 2 == 1 { 1.0 } else { -1.0 } * f.deriv(m, lambda)?;
        total += pmf_bernstein(f, lambda, s, j)? * lam_over_fact * moment;
    }
    Ok(total)
}

/// Smallest horizon whose truncation bound (probability that fewer than k
/// jump events arrive in time) is below `bound`.
pub fn choose_horizon(alpha: f64, lambda: f64, k: u64, bound: f64) -> Result<f64> {
    check_alpha_k(alpha, k)?;
    if !(bound > 0.0 && bound < 1.0) {
        return Err(domain("choose_horizon", format!("bound must be in (0,1), got {bound}")));
    }
    let rate = lambda.powf(alpha);
    let mut hi = 1.0;
    while poisson_cdf(k - 1, rate * hi)? >= bound {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(domain("choose_horizon", "horizon search diverged"));
        }
    }
    let mut lo = hi / 2.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if poisson_cdf(k - 1, rate * mid)? < bound {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Truncation bound reported with Monte Carlo hitting estimates: a true hit
/// of level k needs at most k events, so missing one requires fewer than k
/// events by the horizon.
pub fn truncation_bound(alpha: f64, lambda: f64, k: u64, horizon: f64) -> Result<f64> {
    check_alpha_k(alpha, k)?;
    poisson_cdf(k - 1, lambda.powf(alpha) * horizon)
}

/// Monte Carlo hitting probabilities for every level 1..=k_max from a
/// single batch of simulated jump chains. "Hit" means the running sum of
/// Sibuya jumps equals the level exactly at some event before the horizon;
/// overshooting counts as a miss.
pub fn hitting_prob_mc_levels(
    alpha: f64,
    lambda: f64,
    k_max: u64,
    horizon: f64,
    n_paths: u64,
    seed: u64,
    stream_base: u64,
) -> Result<Vec<HittingResult>> {
    check_alpha_k(alpha, k_max)?;
    if k_max > 63 {
        return Err(domain("hitting_prob_mc", "k_max above 63 is not supported"));
    }
    if horizon <= 0.0 || n_paths < 2 {
        return Err(domain("hitting_prob_mc", "need horizon > 0 and n_paths >= 2"));
    }
    let rate = lambda.powf(alpha);
    let hit_counts = mc_fold(
        n_paths,
        seed,
        stream_base,
        vec![0u64; k_max as usize + 1],
        |acc, rng| {
            let mut mask = 0u64;
            let mut level = 0u64;
            let mut time = 0.0;
            loop {
                time += rng.exponential(rate);
                if time > horizon {
                    break;
                }
                level = level.saturating_add(sample_sibuya(alpha, rng)?);
                if level > k_max {
                    break;
                }
                mask |= 1 << level;
                if level == k_max {
                    break;
                }
            }
            for k in 1..=k_max {
                if mask & (1 << k) != 0 {
                    acc[k as usize] += 1;
                }
            }
            Ok(())
        },
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        },
    )?;
    let n = n_paths as f64;
    let mut out = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max {
        let p = hit_counts[k as usize] as f64 / n;
        out.push(HittingResult {
            value: p,
            method: HittingMethod::MonteCarlo,
            stderr: Some((p * (1.0 - p) / n).sqrt()),
            truncation_bound: Some(truncation_bound(alpha, lambda, k, horizon)?),
        });
    }
    Ok(out)
}

/// Monte Carlo estimate of P{T_k < horizon-limited infinity} for one level.
pub fn hitting_prob_mc(
    alpha: f64,
    lambda: f64,
    k: u64,
    horizon: f64,
    n_paths: u64,
    seed: u64,
    stream_base: u64,
) -> Result<HittingResult> {
    let levels = hitting_prob_mc_levels(alpha, lambda, k, horizon, n_paths, seed, stream_base)?;
    Ok(levels[k as usize - 1])
}

/// Exact result wrapped with provenance, for table assembly.
pub fn hitting_exact_result(alpha: f64, k: u64) -> Result<HittingResult> {
    Ok(HittingResult::exact(hitting_prob_exact(alpha, k)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_half_is_central_binomial() {
        // C(2k,k)/4^k
        assert!((hitting_prob_exact(0.5, 1).unwrap() - 0.5).abs() < 1e-15);
        assert!((hitting_prob_exact(0.5, 2).unwrap() - 0.375).abs() < 1e-15);
        let mut binom = 1.0f64; // C(2k,k)/4^k by recursion
        for k in 1..=20u64 {
            binom *= (2.0 * k as f64 - 1.0) / (2.0 * k as f64);
            let got = hitting_prob_exact(0.5, k).unwrap();
            assert!((got - binom).abs() < 1e-14, "k={k}: {got} vs {binom}");
        }
    }

    #[test]
    fn exact_at_alpha_one_is_certain() {
        for k in [1u64, 5, 100] {
            assert_eq!(hitting_prob_exact(1.0, k).unwrap(), 1.0);
        }
    }

    #[test]
    fn recursion_matches_closed_form() {
        for alpha in [0.3, 0.5, 0.8] {
            let rec = hitting_probs_by_recursion(alpha, 100).unwrap();
            for (i, p) in rec.iter().enumerate() {
                let direct = hitting_prob_exact(alpha, i as u64 + 1).unwrap();
                if i < 20 {
                    assert!((p - direct).abs() < 1e-14, "alpha={alpha} k={}", i + 1);
                } else {
                    // the log-Gamma route carries |ln Gamma| * eps relative
                    // error, so deep k agreement is relative
                    assert!((p - direct).abs() < 1e-12 * direct, "alpha={alpha} k={}", i + 1);
                }
            }
        }
    }

    #[test]
    fn strictly_decreasing_in_k_and_below_one() {
        for alpha in [0.3, 0.5, 0.8] {
            let mut prev = 1.0;
            for k in 1..=30u64 {
                let p = hitting_prob_exact(alpha, k).unwrap();
                assert!(p < prev, "alpha={alpha} k={k}");
                assert!(p < 1.0 && p > 0.0);
                prev = p;
            }
        }
    }

    #[test]
    fn increasing_in_alpha() {
        for k in [1u64, 3, 10] {
            let mut prev = 0.0;
            for i in 1..10 {
                let alpha = i as f64 / 10.0;
                let p = hitting_prob_exact(alpha, k).unwrap();
                assert!(p > prev, "k={k} alpha={alpha}");
                prev = p;
            }
            // derivative sign via the digamma gap
            for alpha in [0.2, 0.5, 0.8] {
                let gap = crate::specfun::digamma(k as f64 + alpha).unwrap()
                    - crate::specfun::digamma(alpha).unwrap();
                assert!(gap > 0.0);
            }
        }
    }

    #[test]
    fn asymptotic_ratio_tends_to_one() {
        for alpha in [0.3, 0.5, 0.8] {
            let k = 10_000u64;
            let ratio =
                hitting_prob_exact(alpha, k).unwrap() / hitting_prob_asymptotic(alpha, k).unwrap();
            assert!((ratio - 1.0).abs() < 0.02, "alpha={alpha}: ratio {ratio}");
        }
    }

    #[test]
    fn bernstein_level_one_is_log_derivative() {
        // lambda f'(lambda) / f(lambda)
        let g = BernsteinFunction::gamma(1.0).unwrap();
        let p = hitting_prob_bernstein(&g, 1.0, 1).unwrap();
        assert!((p - 0.5 / 2.0f64.ln()).abs() < 1e-13, "{p}");
        for f in [
            BernsteinFunction::stable(0.5).unwrap(),
            BernsteinFunction::tempered_stable(0.5, 1.0).unwrap(),
        ] {
            let lambda = 1.3;
            let direct = lambda * f.deriv(1, lambda).unwrap() / f.value(lambda).unwrap();
            let p = hitting_prob_bernstein(&f, lambda, 1).unwrap();
            assert!((p - direct).abs() < 1e-12, "{f}");
            assert!(p < 1.0);
        }
    }

    #[test]
    fn bernstein_stable_matches_exact_formula() {
        for alpha in [0.3, 0.5, 0.8] {
            let f = BernsteinFunction::stable(alpha).unwrap();
            for k in 1..=8u64 {
                let general = hitting_prob_bernstein(&f, 1.0, k).unwrap();
                let exact = hitting_prob_exact(alpha, k).unwrap();
                assert!(
                    (general - exact).abs() < 1e-9,
                    "alpha={alpha} k={k}: {general} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn bernstein_linear_always_hits() {
        for k in 1..=10u64 {
            let p = hitting_prob_bernstein(&BernsteinFunction::Linear, 0.7, k).unwrap();
            assert!((p - 1.0).abs() < 1e-12, "k={k}: {p}");
        }
    }

    #[test]
    fn density_anchors() {
        // stable, k = 1: alpha lambda^alpha exp(-lambda^alpha s)
        let f = BernsteinFunction::stable(0.5).unwrap();
        let d = hitting_time_density(&f, 1.0, 1, 1.0).unwrap();
        assert!((d - 0.5 * (-1.0f64).exp()).abs() < 1e-13);
        // linear, k = 1: exponential density
        let d = hitting_time_density(&BernsteinFunction::Linear, 2.0, 1, 0.3).unwrap();
        assert!((d - 2.0 * (-0.6f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn horizon_controls_truncation() {
        let h = choose_horizon(0.5, 1.0, 8, 1e-3).unwrap();
        assert!(truncation_bound(0.5, 1.0, 8, h).unwrap() < 1e-3);
        assert!(truncation_bound(0.5, 1.0, 8, h * 0.5).unwrap() > truncation_bound(0.5, 1.0, 8, h).unwrap());
    }

    #[test]
    fn mc_smoke_poisson_always_hits() {
        let r = hitting_prob_mc(1.0, 1.0, 3, 30.0, 20_000, 42, 0).unwrap();
        assert!(r.value > 0.995, "value {}", r.value);
        assert_eq!(r.method, HittingMethod::MonteCarlo);
        assert!(r.stderr.is_some() && r.truncation_bound.is_some());
    }

    #[test]
    fn mc_smoke_half() {
        let h = choose_horizon(0.5, 1.0, 1, 1e-4).unwrap();
        let r = hitting_prob_mc(0.5, 1.0, 1, h, 40_000, 42, 0).unwrap();
        let tol = 4.0 * r.stderr.unwrap() + r.truncation_bound.unwrap();
        assert!((r.value - 0.5).abs() < tol, "value {} tol {}", r.value, tol);
    }
}
