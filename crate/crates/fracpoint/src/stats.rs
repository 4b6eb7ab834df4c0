//! Goodness-of-fit statistics used by the sampler validation suites and the
//! CLI: chi-square against an exact pmf, two-sample chi-square, one- and
//! two-sample Kolmogorov-Smirnov, and the Poisson cdf that backs the
//! hitting-horizon truncation bound.

use crate::error::{domain, Result};
use crate::specfun::{reg_gamma_lower, reg_gamma_upper};

/// Result of a chi-square test.
#[derive(Debug, Clone, Copy)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Chi-square goodness of fit of observed bucket counts against expected
/// probabilities. Buckets with expected count below `min_expected` are
/// pooled from the right into the last kept bucket. `probs` must cover all
/// buckets of `observed` (the caller's last bucket usually holds the tail
/// mass).
pub fn chi_square_gof(observed: &[u64], probs: &[f64], min_expected: f64) -> Result<ChiSquare> {
    if observed.len() != probs.len() || observed.len() < 2 {
        return Err(domain(
            "chi_square_gof",
            format!("need matching lengths >= 2, got {} vs {}", observed.len(), probs.len()),
        ));
    }
    let n: u64 = observed.iter().sum();
    let nf = n as f64;
    // pool right-tail buckets until each kept bucket expects enough mass
    let mut buckets: Vec<(f64, f64)> = Vec::with_capacity(observed.len());
    let mut pool_obs = 0.0;
    let mut pool_exp = 0.0;
    for (o, p) in observed.iter().zip(probs).rev() {
        pool_obs += *o as f64;
        pool_exp += p * nf;
        if pool_exp >= min_expected {
            buckets.push((pool_obs, pool_exp));
            pool_obs = 0.0;
            pool_exp = 0.0;
        }
    }
    if pool_exp > 0.0 || pool_obs > 0.0 {
        match buckets.last_mut() {
            Some(last) => {
                last.0 += pool_obs;
                last.1 += pool_exp;
            }
            None => buckets.push((pool_obs, pool_exp)),
        }
    }
    if buckets.len() < 2 {
        return Err(domain("chi_square_gof", "fewer than two buckets after pooling"));
    }
    let mut stat = 0.0;
    for (o, e) in &buckets {
        stat += (o - e) * (o - e) / e;
    }
    let dof = buckets.len() - 1;
    Ok(ChiSquare {
        statistic: stat,
        dof,
        p_value: chi_square_sf(stat, dof)?,
    })
}

/// Two-sample chi-square for two bucket-count vectors of equal layout.
pub fn chi_square_two_sample(a: &[u64], b: &[u64], min_expected: f64) -> Result<ChiSquare> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(domain(
            "chi_square_two_sample",
            format!("need matching lengths >= 2, got {} vs {}", a.len(), b.len()),
        ));
    }
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    let ka = ((nb as f64) / (na as f64)).sqrt();
    let kb = 1.0 / ka;
    // pool from the right so both samples have enough mass per bucket
    let mut buckets: Vec<(f64, f64)> = Vec::new();
    let mut pa = 0.0;
    let mut pb = 0.0;
    for (x, y) in a.iter().zip(b).rev() {
        pa += *x as f64;
        pb += *y as f64;
        if pa + pb >= 2.0 * min_expected {
            buckets.push((pa, pb));
            pa = 0.0;
            pb = 0.0;
        }
    }
    if (pa > 0.0 || pb > 0.0) && !buckets.is_empty() {
        let last = buckets.last_mut().expect("nonempty");
        last.0 += pa;
        last.1 += pb;
    }
    if buckets.len() < 2 {
        return Err(domain("chi_square_two_sample", "fewer than two buckets after pooling"));
    }
    let mut stat = 0.0;
    for (x, y) in &buckets {
        if x + y == 0.0 {
            continue;
        }
        let d = ka * x - kb * y;
        stat += d * d / (x + y);
    }
    let dof = buckets.len() - 1;
    Ok(ChiSquare {
        statistic: stat,
        dof,
        p_value: chi_square_sf(stat, dof)?,
    })
}

/// Survival function of the chi-square distribution with `dof` degrees of
/// freedom: P{X > x} = Q(dof/2, x/2).
pub fn chi_square_sf(x: f64, dof: usize) -> Result<f64> {
    reg_gamma_upper(dof as f64 / 2.0, x / 2.0)
}

/// Kolmogorov-Smirnov statistic of a sample against a cdf.
/// `sorted` must be ascending.
pub fn ks_statistic<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let c = cdf(x);
        let hi = (i as f64 + 1.0) / n - c;
        let lo = c - i as f64 / n;
        d = d.max(hi).max(lo);
    }
    d
}

/// Two-sample Kolmogorov-Smirnov statistic; both inputs ascending.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len(), b.len());
    let mut i = 0;
    let mut j = 0;
    let mut d = 0.0f64;
    while i < na && j < nb {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    d
}

/// Critical value of the two-sample KS statistic at significance `alpha`:
/// c(alpha) sqrt((na+nb)/(na nb)) with c = sqrt(-ln(alpha/2)/2).
pub fn ks_two_sample_critical(alpha: f64, na: usize, nb: usize) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * (((na + nb) as f64) / ((na * nb) as f64)).sqrt()
}

/// P{Poisson(mean) <= k} = Q(k+1, mean).
pub fn poisson_cdf(k: u64, mean: f64) -> Result<f64> {
    if mean < 0.0 {
        return Err(domain("poisson_cdf", format!("mean must be >= 0, got {mean}")));
    }
    if mean == 0.0 {
        return Ok(1.0);
    }
    reg_gamma_upper(k as f64 + 1.0, mean)
}

/// P{Poisson(mean) >= k}.
pub fn poisson_sf_at_least(k: u64, mean: f64) -> Result<f64> {
    if k == 0 {
        return Ok(1.0);
    }
    if mean <= 0.0 {
        return Ok(0.0);
    }
    reg_gamma_lower(k as f64, mean)
}
