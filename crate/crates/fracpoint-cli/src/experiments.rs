//! The experiment registry: every subcommand builds one artifact.

use fracpoint::bernstein::BernsteinFunction;
use fracpoint::hitting::{
    choose_horizon, hitting_prob_asymptotic, hitting_prob_exact, hitting_prob_mc_levels,
};
use fracpoint::mc::{mc_collect, mc_histogram, STREAM_SPACING};
use fracpoint::processes::{
    moments_multi_timechanged, pgf, pmf_ggbm_time, PmfTable, ProcessSpec, TablePolicy,
};
use fracpoint::renewal::{
    lt_ggbm_process, lt_ggbm_renewal, lt_process_spacetime, lt_renewal_spacetime, LtMethod,
};
use fracpoint::samplers::{sample_ggbm_clock, sample_iterated, sample_process};
use fracpoint::specfun::{m_wright, mittag_leffler};
use fracpoint::stats::{chi_square_gof, ks_statistic};
use fracpoint::Error;

use crate::artifact::{Artifact, Cell};
use crate::CliError;

/// Names of the registered experiments, in display order.
pub const REGISTRY: [&str; 8] = [
    "hitting", "pmf", "sample", "iterate", "multi", "ggbm", "renewal", "fracop-check",
];

pub struct HittingParams {
    pub alphas: Vec<f64>,
    pub lambda: f64,
    pub k_max: u64,
    pub n_samples: u64,
    pub seed: u64,
    pub trunc_bound: f64,
}

pub fn hitting(p: &HittingParams) -> Result<Artifact, CliError> {
    let mut art = Artifact::new("hitting");
    art.meta("lambda", p.lambda);
    art.meta("k_max", p.k_max);
    art.meta("n_samples", p.n_samples);
    art.meta("seed", p.seed);
    art.meta("trunc_bound_target", p.trunc_bound);
    art.columns(&["alpha", "k", "exact", "asymptotic", "mc_estimate", "mc_stderr"]);
    for (ai, &alpha) in p.alphas.iter().enumerate() {
        let horizon = choose_horizon(alpha, p.lambda, p.k_max, p.trunc_bound)?;
        art.meta(&format!("horizon_alpha_{alpha}"), horizon);
        let mc = hitting_prob_mc_levels(
            alpha,
            p.lambda,
            p.k_max,
            horizon,
            p.n_samples,
            p.seed,
            ai as u64 * STREAM_SPACING,
        )?;
        for (i, r) in mc.iter().enumerate() {
            let k = i as u64 + 1;
            art.row(vec![
                alpha.into(),
                k.into(),
                hitting_prob_exact(alpha, k)?.into(),
                hitting_prob_asymptotic(alpha, k)?.into(),
                r.value.into(),
                r.stderr.unwrap_or(f64::NAN).into(),
            ]);
        }
    }
    Ok(art)
}

pub struct PmfParams {
    pub spec: ProcessSpec,
    pub t: f64,
    pub k_max: usize,
    pub tail_tol: f64,
}

pub fn pmf(p: &PmfParams) -> Result<Artifact, CliError> {
    let policy = TablePolicy {
        tail_tol: p.tail_tol,
        max_k: p.k_max,
    };
    let table = PmfTable::build(&p.spec, p.t, &policy)?;
    let mut art = Artifact::new("pmf");
    art.meta("process", p.spec.family_label());
    art.meta("lambda", p.spec.lambda());
    art.meta("t", p.t);
    art.meta("k_max", table.k_max());
    art.columns(&["k", "probability"]);
    for (k, prob) in table.probabilities.iter().enumerate() {
        art.row(vec![(k as u64).into(), (*prob).into()]);
    }
    art.row(vec!["tail".into(), table.tail_bound.into()]);
    Ok(art)
}

pub struct SampleParams {
    pub spec: ProcessSpec,
    pub t: f64,
    pub n_samples: u64,
    pub k_max: usize,
    pub seed: u64,
}

pub fn sample(p: &SampleParams) -> Result<Artifact, CliError> {
    let hist = mc_histogram(p.n_samples, p.seed, 0, p.k_max, |rng| {
        sample_process(&p.spec, p.t, rng)
    })?;
    let mut art = Artifact::new("sample");
    art.meta("process", p.spec.family_label());
    art.meta("lambda", p.spec.lambda());
    art.meta("t", p.t);
    art.meta("n_samples", p.n_samples);
    art.meta("seed", p.seed);
    let policy = TablePolicy {
        tail_tol: 1e-8,
        max_k: p.k_max.max(512),
    };
    let expected = match PmfTable::build(&p.spec, p.t, &policy) {
        Ok(table) => {
            let mut probs: Vec<f64> = table.probabilities[..=p.k_max].to_vec();
            let assigned: f64 = probs.iter().sum();
            probs.push((1.0 - assigned).max(0.0));
            let gof = chi_square_gof(hist.buckets(), &probs, 5.0)?;
            art.meta("chi_square", gof.statistic);
            art.meta("chi_square_dof", gof.dof);
            art.meta("chi_square_p_value", gof.p_value);
            Some(probs)
        }
        Err(Error::Unsupported { msg }) => {
            art.meta("exact_pmf", format!("unavailable: {msg}"));
            None
        }
        Err(other) => return Err(other.into()),
    };
    let (mean, var) = hist.mean_and_variance();
    art.meta("empirical_mean_below_cap", mean);
    art.meta("empirical_variance_below_cap", var);
    match &expected {
        Some(probs) => {
            art.columns(&["k", "count", "frequency", "expected_probability"]);
            for (k, prob) in probs.iter().enumerate().take(p.k_max + 1) {
                art.row(vec![
                    (k as u64).into(),
                    hist.count(k).into(),
                    hist.frequency(k).into(),
                    (*prob).into(),
                ]);
            }
            art.row(vec![
                "overflow".into(),
                hist.overflow().into(),
                (hist.overflow() as f64 / hist.n() as f64).into(),
                probs[p.k_max + 1].into(),
            ]);
        }
        None => {
            art.columns(&["k", "count", "frequency"]);
            for k in 0..=p.k_max {
                art.row(vec![
                    (k as u64).into(),
                    hist.count(k).into(),
                    hist.frequency(k).into(),
                ]);
            }
            art.row(vec![
                "overflow".into(),
                hist.overflow().into(),
                (hist.overflow() as f64 / hist.n() as f64).into(),
            ]);
        }
    }
    Ok(art)
}

pub struct IterateParams {
    pub alpha: f64,
    pub gammas: Vec<f64>,
    pub lambda: f64,
    pub t: f64,
    pub n_samples: u64,
    pub k_max: usize,
    pub seed: u64,
}

pub fn iterate(p: &IterateParams) -> Result<Artifact, CliError> {
    let effective = p.alpha * p.gammas.iter().product::<f64>();
    let mut art = Artifact::new("iterate");
    art.meta("alpha", p.alpha);
    art.meta(
        "gammas",
        p.gammas
            .iter()
            .map(|g| g.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    art.meta("effective_index", effective);
    art.meta("lambda", p.lambda);
    art.meta("t", p.t);
    art.meta("n_samples", p.n_samples);
    art.meta("seed", p.seed);
    let hist = mc_histogram(p.n_samples, p.seed, 0, p.k_max, |rng| {
        sample_iterated(p.alpha, &p.gammas, p.lambda, p.t, rng)
    })?;
    let mut expected: Option<Vec<f64>> = None;
    if effective > 1e-3 {
        let spec = ProcessSpec::space_fractional(effective, p.lambda)?;
        let table = PmfTable::build(
            &spec,
            p.t,
            &TablePolicy {
                tail_tol: 1e-8,
                max_k: p.k_max.max(512),
            },
        )?;
        let mut probs: Vec<f64> = table.probabilities[..=p.k_max].to_vec();
        let assigned: f64 = probs.iter().sum();
        probs.push((1.0 - assigned).max(0.0));
        let gof = chi_square_gof(hist.buckets(), &probs, 5.0)?;
        art.meta("chi_square", gof.statistic);
        art.meta("chi_square_dof", gof.dof);
        art.meta("chi_square_p_value", gof.p_value);
        expected = Some(probs);
    } else {
        // near-degenerate composition: the law concentrates on {0, infinity}
        art.meta("degenerate_p0_expected", (-p.t).exp());
        art.meta("degenerate_p0_empirical", hist.frequency(0));
    }
    match &expected {
        Some(probs) => {
            art.columns(&["k", "count", "frequency", "expected_probability"]);
            for (k, prob) in probs.iter().enumerate().take(p.k_max + 1) {
                art.row(vec![
                    (k as u64).into(),
                    hist.count(k).into(),
                    hist.frequency(k).into(),
                    (*prob).into(),
                ]);
            }
            art.row(vec![
                "overflow".into(),
                hist.overflow().into(),
                (hist.overflow() as f64 / hist.n() as f64).into(),
                probs[p.k_max + 1].into(),
            ]);
        }
        None => {
            art.columns(&["k", "count", "frequency"]);
            for k in 0..=p.k_max {
                art.row(vec![
                    (k as u64).into(),
                    hist.count(k).into(),
                    hist.frequency(k).into(),
                ]);
            }
            art.row(vec![
                "overflow".into(),
                hist.overflow().into(),
                (hist.overflow() as f64 / hist.n() as f64).into(),
            ]);
        }
    }
    Ok(art)
}

pub struct MultiParams {
    pub fs: Vec<BernsteinFunction>,
    pub lambda: f64,
    pub outer_nu: Option<f64>,
    pub t: f64,
    pub n_samples: u64,
    pub seed: u64,
}

pub fn multi(p: &MultiParams) -> Result<Artifact, CliError> {
    let spec = ProcessSpec::multi(p.fs.clone(), p.lambda, p.outer_nu)?;
    let draws = mc_collect(p.n_samples, p.seed, 0, |rng| {
        Ok(sample_process(&spec, p.t, rng)?.min(u64::MAX >> 12) as f64)
    })?;
    let n = draws.len() as f64;
    let mean = draws.iter().sum::<f64>() / n;
    let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let stderr = (var / n).sqrt();
    let mut art = Artifact::new("multi");
    art.meta("fs", spec.family_label());
    art.meta("lambda", p.lambda);
    match p.outer_nu {
        Some(nu) => art.meta("outer_nu", nu),
        None => art.meta("outer_nu", "none"),
    }
    art.meta("t", p.t);
    art.meta("n_samples", p.n_samples);
    art.meta("seed", p.seed);
    art.columns(&["quantity", "value"]);
    art.row(vec!["mc_mean".into(), mean.into()]);
    art.row(vec!["mc_mean_stderr".into(), stderr.into()]);
    art.row(vec!["mc_variance".into(), var.into()]);
    // the mean formula needs finite first Levy moments; the variance display
    // is a diagnostic only (it can go negative, a Monte Carlo comparison is
    // the point of reporting both)
    match moments_multi_timechanged(&p.fs, p.lambda, p.outer_nu.unwrap_or(1.0), p.t) {
        Ok(m) => {
            art.row(vec!["formula_mean".into(), m.mean.into()]);
            art.row(vec!["variance_diagnostic".into(), m.variance_diagnostic.into()]);
        }
        Err(Error::InfiniteMoment { msg }) => {
            art.row(vec!["formula_mean".into(), Cell::S(format!("infinite ({msg})"))]);
        }
        Err(other) => return Err(other.into()),
    }
    Ok(art)
}

pub struct GgbmParams {
    pub h: f64,
    pub nu: f64,
    pub lambda: f64,
    pub t: f64,
    pub n_samples: u64,
    pub seed: u64,
}

pub fn ggbm(p: &GgbmParams) -> Result<Artifact, CliError> {
    let spec = ProcessSpec::ggbm(p.h, p.nu, p.lambda)?;
    let mut art = Artifact::new("ggbm");
    art.meta("hurst", p.h);
    art.meta("nu", p.nu);
    art.meta("lambda", p.lambda);
    art.meta("t", p.t);
    art.meta("n_samples", p.n_samples);
    art.meta("seed", p.seed);
    art.columns(&["quantity", "value"]);

    // zero-state probability, sampled vs exact
    let hist = mc_histogram(p.n_samples, p.seed, 0, 1, |rng| {
        fracpoint::samplers::sample_ggbm_time(p.h, p.nu, p.lambda, p.t, rng)
    })?;
    let p0_mc = hist.frequency(0);
    let p0_exact = pmf_ggbm_time(p.h, p.nu, p.lambda, p.t, 0)?;
    art.row(vec!["p0_empirical".into(), p0_mc.into()]);
    art.row(vec!["p0_exact".into(), p0_exact.into()]);

    // pgf comparison at u = 0.5
    let u = 0.5f64;
    let est = fracpoint::mc::mc_mean(p.n_samples, p.seed, STREAM_SPACING, |rng| {
        let c = fracpoint::samplers::sample_ggbm_time(p.h, p.nu, p.lambda, p.t, rng)?;
        Ok(u.powi(c.min(1 << 20) as i32))
    })?;
    art.row(vec!["pgf_mc_u0.5".into(), est.mean.into()]);
    art.row(vec!["pgf_mc_stderr".into(), est.stderr.into()]);
    art.row(vec!["pgf_exact_u0.5".into(), pgf(&spec, u, p.t)?.into()]);

    // Kolmogorov-Smirnov distance of the clock against the folded
    // M-Wright law (nu = 2 has a deterministic clock; skipped there)
    if p.nu < 2.0 {
        let mut clock = mc_collect(p.n_samples.min(200_000), p.seed, 2 * STREAM_SPACING, |rng| {
            sample_ggbm_clock(p.h, p.nu, p.t, rng)
        })?;
        clock.sort_by(|a, b| a.total_cmp(b));
        let d = ks_statistic(&clock, clock_cdf(p.h, p.nu, p.t, *clock.last().unwrap())?);
        art.row(vec!["clock_ks_distance".into(), d.into()]);
    }
    Ok(art)
}

/// Interpolated cdf of the grey-Brownian clock (scaled M-Wright density).
fn clock_cdf(h: f64, nu: f64, t: f64, x_last: f64) -> Result<impl Fn(f64) -> f64, CliError> {
    let scale = t.powf(h * nu);
    let mu = nu / 2.0;
    let x_max = x_last + 1.0;
    let n = 4000usize;
    let dx = x_max / n as f64;
    let mut cdf = vec![0.0f64; n + 1];
    let mut prev = m_wright(mu, 0.0)?.value / scale;
    for i in 1..=n {
        let x = dx * i as f64;
        let pdf = m_wright(mu, x / scale)?.value.max(0.0) / scale;
        cdf[i] = cdf[i - 1] + 0.5 * dx * (prev + pdf);
        prev = pdf;
    }
    Ok(move |x: f64| -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let pos = (x / dx).min(n as f64);
        let i = pos.floor() as usize;
        if i >= n {
            return cdf[n].min(1.0);
        }
        let frac = pos - i as f64;
        (cdf[i] * (1.0 - frac) + cdf[i + 1] * frac).min(1.0)
    })
}

pub enum RenewalFamily {
    SpaceTime { alpha: f64, nu: f64 },
    Ggbm { h: f64, nu: f64 },
}

pub struct RenewalParams {
    pub family: RenewalFamily,
    pub lambda: f64,
    pub k: u64,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_points: usize,
}

pub fn renewal(p: &RenewalParams) -> Result<Artifact, CliError> {
    let grid = fracpoint::quad::log_grid(p.grid_min, p.grid_max, p.grid_points);
    let mut art = Artifact::new("renewal");
    match &p.family {
        RenewalFamily::SpaceTime { alpha, nu } => {
            art.meta("family", format!("spacetime:{alpha},{nu}"));
        }
        RenewalFamily::Ggbm { h, nu } => {
            art.meta("family", format!("ggbm:{h},{nu}"));
        }
    }
    art.meta("k", p.k);
    art.meta("lambda", p.lambda);
    art.meta(
        "gamma_grid",
        format!("{}..{} x{}", p.grid_min, p.grid_max, p.grid_points),
    );
    art.columns(&["gamma", "lt_process", "lt_renewal", "gap", "ratio"]);
    let mut sup_gap = 0.0f64;
    let mut quadrature_points = 0usize;
    for &g in &grid {
        let (process, renewal_v, quad) = match &p.family {
            RenewalFamily::SpaceTime { alpha, nu } => (
                lt_process_spacetime(g, p.k, *alpha, *nu, p.lambda)?,
                lt_renewal_spacetime(g, p.k, *alpha, *nu, p.lambda)?,
                false,
            ),
            RenewalFamily::Ggbm { h, nu } => {
                let pr = lt_ggbm_process(g, p.k, *h, *nu, p.lambda)?;
                let re = lt_ggbm_renewal(g, p.k, *h, *nu, p.lambda)?;
                (
                    pr.value,
                    re.value,
                    pr.method == LtMethod::Quadrature || re.method == LtMethod::Quadrature,
                )
            }
        };
        if quad {
            quadrature_points += 1;
        }
        let gap = (process - renewal_v).abs();
        sup_gap = sup_gap.max(gap);
        art.row(vec![
            g.into(),
            process.into(),
            renewal_v.into(),
            gap.into(),
            (process / renewal_v).into(),
        ]);
    }
    art.meta("sup_gap", sup_gap);
    art.meta("quadrature_fallback_points", quadrature_points);
    Ok(art)
}

pub struct FracopParams {
    pub h: f64,
    pub nu: f64,
    pub lambda: f64,
    pub t_points: Vec<f64>,
    pub us: Vec<f64>,
}

pub fn fracop_check(p: &FracopParams) -> Result<Artifact, CliError> {
    use fracpoint::fracops::{caputo_mcbride, ek_integral, OperatorSpec};
    use fracpoint::specfun::{gamma, rgamma};

    let mut art = Artifact::new("fracop-check");
    art.meta("hurst", p.h);
    art.meta("nu", p.nu);
    art.meta("lambda", p.lambda);

    // monomial rule sanity: the weighted integral of u^{m q} has a closed
    // Gamma-ratio form
    let mut monomial_max = 0.0f64;
    for (m, eta, a, q, t) in [
        (2.0 * p.h, 0.0, 1.0 - p.nu / 2.0, 1.0, 1.0),
        (1.0, 0.0, 0.5, 1.0, 1.0),
        (1.4, 0.3, 0.7, 2.0, 1.3),
    ] {
        let f = move |u: f64| u.powf(m * q);
        let got = ek_integral(m, eta, a, &f, t)?;
        let want = gamma(eta + q + 1.0) / gamma(eta + a + q + 1.0) * t.powf(m * q);
        monomial_max = monomial_max.max((got - want).abs() / want.abs().max(1.0));
    }
    art.meta("monomial_rule_max_rel_error", monomial_max);

    art.columns(&["u", "c", "t", "applied", "expected", "rel_error"]);
    let spec = OperatorSpec::new(p.h, p.nu / 2.0)?;
    let lambda_prime = (2.0 * p.h).powf(p.nu / 2.0) * p.lambda;
    let hn = p.h * p.nu;
    let mu = p.nu / 2.0;
    let mut max_rel = 0.0f64;
    for &u in &p.us {
        let c = lambda_prime * (1.0 - u);
        let c_tilde = p.lambda * (1.0 - u);
        let g = move |s: f64| {
            if s <= 0.0 {
                1.0
            } else {
                mittag_leffler(mu, 1.0, -c_tilde * s.powf(hn))
                    .map(|r| r.value)
                    .unwrap_or(f64::NAN)
            }
        };
        let g_prime = move |s: f64| {
            let mut acc = 0.0;
            let mut pw = 1.0;
            for n in 1..300 {
                pw *= -c_tilde;
                let expo = hn * n as f64;
                let term = pw * expo * s.powf(expo - 1.0) * rgamma(mu * n as f64 + 1.0);
                acc += term;
                if term.abs() < 1e-18 * acc.abs().max(1e-300) && n > 4 {
                    break;
                }
            }
            acc
        };
        for &t in &p.t_points {
            let applied = caputo_mcbride(&spec, &g, &g_prime, &[1.0], t)?;
            let expected = -c * g(t);
            let rel = (applied - expected).abs() / expected.abs().max(1e-300);
            max_rel = max_rel.max(rel);
            art.row(vec![
                u.into(),
                c.into(),
                t.into(),
                applied.into(),
                expected.into(),
                rel.into(),
            ]);
        }
    }
    art.meta("eigenrelation_max_rel_error", max_rel);
    Ok(art)
}
