//! Exact marginal distributions, probability generating functions and
//! moments for the six counting-process families.
//!
//! Two evaluation routes coexist on purpose. The alternating series taken
//! straight from the transform formulas are kept for small k and for
//! cross-representation checks; truncated probability tables are built from
//! positive recursions (Panjer for compound-Poisson families, count-mixture
//! plus jump convolution for inverse-stable clocks) which stay stable out to
//! the 10^4-entry cap.

use crate::bernstein::BernsteinFunction;
use crate::error::{domain, Error, Result};
use crate::specfun::{self, ln_gamma, mittag_leffler, rgamma, series_round_off, EvalResult};

/// Accuracy bound for pmf/pgf series; exceeding it is an error the CLI
/// escalates to exit status 3.
pub const PMF_ACCURACY_BOUND: f64 = 1e-8;

/// One of the six process families, with its rate.
#[derive(Debug, Clone, PartialEq)]
pub enum ProcessSpec {
    /// Poisson at a stable subordinator: compound Poisson with Sibuya jumps.
    SpaceFractional { alpha: f64, lambda: f64 },
    /// Poisson at an inverse stable clock: renewal with Mittag-Leffler
    /// intertimes.
    TimeFractional { nu: f64, lambda: f64 },
    /// Poisson at a stable subordinator run at an inverse stable clock.
    SpaceTime { alpha: f64, nu: f64, lambda: f64 },
    /// Poisson at the subordinator of a catalogued Bernstein function.
    BernsteinPoisson { f: BernsteinFunction, lambda: f64 },
    /// Poisson at a superposition of independent subordinators, optionally
    /// run at an inverse stable clock of order `outer_nu`.
    MultiSubordinated {
        fs: Vec<BernsteinFunction>,
        lambda: f64,
        outer_nu: Option<f64>,
    },
    /// Poisson at the modulus of a generalized grey Brownian motion.
    GgbmTime { h: f64, nu: f64, lambda: f64 },
}

impl ProcessSpec {
    pub fn space_fractional(alpha: f64, lambda: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_lambda(lambda)?;
        Ok(Self::SpaceFractional { alpha, lambda })
    }

    pub fn time_fractional(nu: f64, lambda: f64) -> Result<Self> {
        check_nu_unit(nu)?;
        check_lambda(lambda)?;
        Ok(Self::TimeFractional { nu, lambda })
    }

    pub fn space_time(alpha: f64, nu: f64, lambda: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_nu_unit(nu)?;
        check_lambda(lambda)?;
        Ok(Self::SpaceTime { alpha, nu, lambda })
    }

    pub fn bernstein(f: BernsteinFunction, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self::BernsteinPoisson { f, lambda })
    }

    pub fn multi(fs: Vec<BernsteinFunction>, lambda: f64, outer_nu: Option<f64>) -> Result<Self> {
        if fs.is_empty() {
            return Err(domain("process_spec", "need at least one Bernstein function"));
        }
        if let Some(nu) = outer_nu {
            check_nu_unit(nu)?;
        }
        check_lambda(lambda)?;
        Ok(Self::MultiSubordinated {
            fs,
            lambda,
            outer_nu,
        })
    }

    pub fn ggbm(h: f64, nu: f64, lambda: f64) -> Result<Self> {
        if !(h > 0.0 && h < 1.0) {
            return Err(domain("process_spec", format!("H must be in (0,1), got {h}")));
        }
        if !(nu > 0.0 && nu <= 2.0) {
            return Err(domain(
                "process_spec",
                format!("ggbm nu must be in (0,2], got {nu}"),
            ));
        }
        check_lambda(lambda)?;
        Ok(Self::GgbmTime { h, nu, lambda })
    }

    pub fn lambda(&self) -> f64 {
        match self {
            Self::SpaceFractional { lambda, .. }
            | Self::TimeFractional { lambda, .. }
            | Self::SpaceTime { lambda, .. }
            | Self::BernsteinPoisson { lambda, .. }
            | Self::MultiSubordinated { lambda, .. }
            | Self::GgbmTime { lambda, .. } => *lambda,
        }
    }

    /// Family label without the rate, e.g. `spacetime:0.5,0.6`.
    pub fn family_label(&self) -> String {
        match self {
            Self::SpaceFractional { alpha, .. } => format!("space:{alpha}"),
            Self::TimeFractional { nu, .. } => format!("timefrac:{nu}"),
            Self::SpaceTime { alpha, nu, .. } => format!("spacetime:{alpha},{nu}"),
            Self::BernsteinPoisson { f, .. } => f.to_string(),
            Self::MultiSubordinated { fs, outer_nu, .. } => {
                let parts: Vec<String> = fs.iter().map(|f| f.to_string()).collect();
                match outer_nu {
                    Some(nu) => format!("multi:{}@{nu}", parts.join("+")),
                    None => format!("multi:{}", parts.join("+")),
                }
            }
            Self::GgbmTime { h, nu, .. } => format!("ggbm:{h},{nu}"),
        }
    }

    /// Parse a family encoding (`space:a`, `timefrac:nu`, `spacetime:a,nu`,
    /// `ggbm:H,nu`, `multi:f1+f2[@nu]`, or a bare Bernstein encoding which
    /// means the Bernstein-subordinated family).
    pub fn parse(family: &str, lambda: f64) -> Result<Self> {
        let s = family.trim();
        if let Some(rest) = s.strip_prefix("space:") {
            let alpha = parse_f64(rest, s)?;
            return Self::space_fractional(alpha, lambda);
        }
        if let Some(rest) = s.strip_prefix("timefrac:") {
            let nu = parse_f64(rest, s)?;
            return Self::time_fractional(nu, lambda);
        }
        if let Some(rest) = s.strip_prefix("spacetime:") {
            let (a, n) = parse_pair(rest, s)?;
            return Self::space_time(a, n, lambda);
        }
        if let Some(rest) = s.strip_prefix("ggbm:") {
            let (h, n) = parse_pair(rest, s)?;
            return Self::ggbm(h, n, lambda);
        }
        if let Some(rest) = s.strip_prefix("multi:") {
            let (list, outer) = match rest.split_once('@') {
                Some((l, o)) => (l, Some(parse_f64(o, s)?)),
                None => (rest, None),
            };
            let fs: Vec<BernsteinFunction> = list
                .split('+')
                .map(|p| p.parse::<BernsteinFunction>())
                .collect::<Result<_>>()?;
            return Self::multi(fs, lambda, outer);
        }
        let f: BernsteinFunction = s.parse()?;
        Self::bernstein(f, lambda)
    }
}

fn parse_f64(s: &str, ctx: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Parse {
        msg: format!("bad number `{s}` in `{ctx}`"),
    })
}

fn parse_pair(s: &str, ctx: &str) -> Result<(f64, f64)> {
    let (a, b) = s.split_once(',').ok_or_else(|| Error::Parse {
        msg: format!("expected two comma-separated numbers in `{ctx}`"),
    })?;
    Ok((parse_f64(a, ctx)?, parse_f64(b, ctx)?))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(domain("process_spec", format!("alpha must be in (0,1], got {alpha}")))
    }
}

fn check_nu_unit(nu: f64) -> Result<()> {
    if nu > 0.0 && nu <= 1.0 {
        Ok(())
    } else {
        Err(domain("process_spec", format!("nu must be in (0,1], got {nu}")))
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 {
        Ok(())
    } else {
        Err(domain("process_spec", format!("lambda must be > 0, got {lambda}")))
    }
}

fn check_kt(lambda: f64, t: f64) -> Result<()> {
    check_lambda(lambda)?;
    if t > 0.0 {
        Ok(())
    } else {
        Err(domain("processes", format!("t must be > 0, got {t}")))
    }
}

/// Sibuya jump probability q_k = alpha Gamma(k - alpha) / (Gamma(1-alpha) k!)
/// for k >= 1; the normalized jump law of the space-fractional process.
pub fn sibuya_jump_pmf(alpha: f64, k: u64) -> Result<f64> {
    check_alpha(alpha)?;
    if k == 0 {
        return Err(domain("sibuya_jump_pmf", "jumps have size >= 1"));
    }
    if alpha == 1.0 {
        return Ok(if k == 1 { 1.0 } else { 0.0 });
    }
    // q_1 = alpha; q_{k+1} = q_k (k - alpha)/(k + 1); closed form via tail
    Ok(sibuya_tail(alpha, k - 1)? * alpha / k as f64)
}

/// Sibuya tail P{J > k} = prod_{j<=k} (1 - alpha/j)
/// = Gamma(k+1-alpha) / (Gamma(1-alpha) Gamma(k+1)).
pub fn sibuya_tail(alpha: f64, k: u64) -> Result<f64> {
    check_alpha(alpha)?;
    if k == 0 {
        return Ok(1.0);
    }
    if alpha == 1.0 {
        return Ok(0.0);
    }
    let kf = k as f64;
    Ok((ln_gamma(kf + 1.0 - alpha) - ln_gamma(1.0 - alpha) - ln_gamma(kf + 1.0)).exp())
}

/// pmf of the space-fractional process by its transform series
/// ((-1)^k / k!) sum_r (-lambda^alpha t)^r / r! * Gamma(alpha r + 1) / Gamma(alpha r + 1 - k).
///
/// Alternating with Gamma-ratio growth: reliable for k up to several tens
/// (the error estimate knows when it is not). Tables use [`PmfTable::build`].
pub fn pmf_space_fractional(alpha: f64, lambda: f64, t: f64, k: u64) -> Result<f64> {
    check_alpha(alpha)?;
    check_kt(lambda, t)?;
    let c = lambda.powf(alpha) * t;
    let kf = k as f64;
    let mut sum = 0.0;
    let mut sum_abs = 0.0;
    let mut pow = 1.0; // (-c)^r / r!
    let mut r = 0usize;
    let mut tiny_streak = 0u32;
    loop {
        let a = alpha * r as f64 + 1.0;
        let term = pow * specfun::gamma(a) * rgamma(a - kf);
        if term.is_finite() {
            sum += term;
            sum_abs += term.abs();
        } else {
            return Err(Error::Overflow {
                op: "pmf_space_fractional",
            });
        }
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) {
            tiny_streak += 1;
        } else {
            tiny_streak = 0;
        }
        if r > (k as usize + 2) && tiny_streak >= 2 {
            break;
        }
        r += 1;
        if r > 5000 {
            return Err(Error::Accuracy {
                op: "pmf_space_fractional",
                estimate: f64::INFINITY,
                bound: PMF_ACCURACY_BOUND,
            });
        }
        pow *= -c / r as f64;
    }
    let scale = (-ln_gamma(kf + 1.0)).exp();
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let value = sign * scale * sum;
    let est = series_round_off(sum_abs, r) * scale;
    if est > PMF_ACCURACY_BOUND {
        return Err(Error::Accuracy {
            op: "pmf_space_fractional",
            estimate: est,
            bound: PMF_ACCURACY_BOUND,
        });
    }
    Ok(value)
}

/// pmf of the space-time fractional process by its double-index series
/// ((-1)^k / k!) sum_m (-lambda^alpha t^nu)^m / Gamma(nu m + 1)
///   * Gamma(alpha m + 1) / Gamma(alpha m + 1 - k).
pub fn pmf_space_time(alpha: f64, nu: f64, lambda: f64, t: f64, k: u64) -> Result<f64> {
    pmf_space_time_eval(alpha, nu, lambda, t, k)?.require("pmf_space_time", PMF_ACCURACY_BOUND)
}

/// Like [`pmf_space_time`] but returns the value with its error estimate
/// instead of enforcing the accuracy bound; integrands weight distant-t
/// evaluations by e^{-gamma t}, which makes a loose far-tail estimate
/// harmless there.
pub fn pmf_space_time_eval(alpha: f64, nu: f64, lambda: f64, t: f64, k: u64) -> Result<EvalResult> {
    check_alpha(alpha)?;
    check_nu_unit(nu)?;
    check_kt(lambda, t)?;
    let c = lambda.powf(alpha) * t.powf(nu);
    let kf = k as f64;
    let mut sum = 0.0;
    let mut sum_abs = 0.0;
    let mut pow = 1.0; // (-c)^m
    let mut m = 0usize;
    let mut tiny_streak = 0u32;
    loop {
        let a = alpha * m as f64 + 1.0;
        let term = pow * rgamma(nu * m as f64 + 1.0) * specfun::gamma(a) * rgamma(a - kf);
        if term.is_finite() {
            sum += term;
            sum_abs += term.abs();
        } else {
            return Err(Error::Overflow { op: "pmf_space_time" });
        }
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) {
            tiny_streak += 1;
        } else {
            tiny_streak = 0;
        }
        if m > (k as usize + 2) && tiny_streak >= 2 {
            break;
        }
        m += 1;
        if m > 5000 {
            return Ok(EvalResult {
                value: f64::NAN,
                terms_used: m,
                error_estimate: f64::INFINITY,
            });
        }
        pow *= -c;
    }
    let scale = (-ln_gamma(kf + 1.0)).exp();
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(EvalResult {
        value: sign * scale * sum,
        terms_used: m,
        error_estimate: series_round_off(sum_abs, m) * scale,
    })
}

/// pmf of the Bernstein-subordinated process,
/// ((-1)^k/k!) d^k/du^k e^{-t f(lambda u)}|_{u=1}, evaluated through the
/// all-positive form of the Bell recursion.
pub fn pmf_bernstein(f: &BernsteinFunction, lambda: f64, t: f64, k: u64) -> Result<f64> {
    check_kt(lambda, t)?;
    let c = f.scaled_pmf_coeffs(lambda, t, k as usize);
    let p0 = (-t * f.value(lambda)?).exp();
    let v = p0 * c[k as usize];
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow { op: "pmf_bernstein" })
    }
}

/// Exact pmf for the superposition of one or two independent subordinators:
/// the pgf factorizes, so the law is the convolution of the marginals
/// (equivalently the binomial sum over paired derivatives of the two
/// exponentials). More than two is not available in closed form.
pub fn pmf_multi(fs: &[BernsteinFunction], lambda: f64, t: f64, k: u64) -> Result<f64> {
    check_kt(lambda, t)?;
    match fs {
        [] => Err(domain("pmf_multi", "need at least one Bernstein function")),
        [f] => pmf_bernstein(f, lambda, t, k),
        [f1, f2] => {
            let c1 = f1.scaled_pmf_coeffs(lambda, t, k as usize);
            let c2 = f2.scaled_pmf_coeffs(lambda, t, k as usize);
            let p0 = (-t * (f1.value(lambda)? + f2.value(lambda)?)).exp();
            let mut acc = 0.0;
            for j in 0..=k as usize {
                acc += c1[j] * c2[k as usize - j];
            }
            Ok(p0 * acc)
        }
        _ => Err(Error::Unsupported {
            msg: format!(
                "exact pmf needs n <= 2 superposed subordinators, got {} (pgf and sampling remain available)",
                fs.len()
            ),
        }),
    }
}

/// pmf of the count law whose pgf is E_{mu,1}(-x (1-u)): the time-fractional
/// family (x = lambda t^nu), the grey-Brownian-clock family
/// (mu = nu/2, x = lambda t^{H nu}) and the count weights of the space-time
/// mixture all reduce to this.
pub fn ml_count_pmf(mu: f64, x: f64, k: u64) -> Result<EvalResult> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(domain("ml_count_pmf", format!("mu must be in (0,1], got {mu}")));
    }
    if x < 0.0 {
        return Err(domain("ml_count_pmf", format!("x must be >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(EvalResult {
            value: if k == 0 { 1.0 } else { 0.0 },
            terms_used: 1,
            error_estimate: 0.0,
        });
    }
    if mu == 1.0 {
        let kf = k as f64;
        let v = (kf * x.ln() - x - ln_gamma(kf + 1.0)).exp();
        return Ok(EvalResult {
            value: v,
            terms_used: 1,
            error_estimate: 4.0 * f64::EPSILON * v,
        });
    }
    let series = ml_count_series(mu, x, k);
    let best = if x > 2.0 {
        let asym = ml_count_asymptotic(mu, x, k);
        if asym.error_estimate < series.error_estimate {
            asym
        } else {
            series
        }
    } else {
        series
    };
    if !best.value.is_finite() {
        return Err(Error::Accuracy {
            op: "ml_count_pmf",
            estimate: f64::INFINITY,
            bound: f64::MAX,
        });
    }
    Ok(best)
}

/// Series x^k/k! sum_m ((m+k)!/m!) (-x)^m / Gamma(mu(m+k)+1), evaluated in
/// log space and rescaled by the largest term.
fn ml_count_series(mu: f64, x: f64, k: u64) -> EvalResult {
    let kf = k as f64;
    let lnx = x.ln();
    let base = kf * lnx - ln_gamma(kf + 1.0);
    let mut ln_terms: Vec<f64> = Vec::with_capacity(64);
    let mut ln_max = f64::NEG_INFINITY;
    let mut m = 0usize;
    let mut low_streak = 0u32;
    loop {
        let mf = m as f64;
        let lt = base + ln_gamma(mf + kf + 1.0) - ln_gamma(mf + 1.0) + mf * lnx
            - ln_gamma(mu * (mf + kf) + 1.0);
        ln_terms.push(lt);
        if lt > ln_max {
            ln_max = lt;
        }
        // the terms eventually decay super-geometrically; near-pole dips
        // are not decay, so ask for two consecutive deep terms
        if lt < ln_max - 45.0 {
            low_streak += 1;
        } else {
            low_streak = 0;
        }
        if m > 4 && low_streak >= 2 {
            break;
        }
        m += 1;
        if m > 20_000 {
            return EvalResult {
                value: f64::NAN,
                terms_used: m,
                error_estimate: f64::INFINITY,
            };
        }
    }
    let mut sum = 0.0;
    let mut sum_abs = 0.0;
    for (i, lt) in ln_terms.iter().enumerate() {
        let mag = (lt - ln_max).exp();
        let term = if i % 2 == 0 { mag } else { -mag };
        sum += term;
        sum_abs += mag;
    }
    let scale = ln_max.exp();
    EvalResult {
        value: sum * scale,
        terms_used: ln_terms.len(),
        error_estimate: series_round_off(sum_abs * scale, ln_terms.len()),
    }
}

/// Large-x expansion sum_{j>=1} (-1)^{j+1} (j)_k x^{-j} / (k! Gamma(1 - mu j)),
/// truncated at the smallest term.
fn ml_count_asymptotic(mu: f64, x: f64, k: u64) -> EvalResult {
    let kf = k as f64;
    let lnx = x.ln();
    let lnkfact = ln_gamma(kf + 1.0);
    let mut sum = 0.0;
    let mut sum_abs = 0.0;
    let mut prev_nonzero = f64::INFINITY;
    for j in 1..300usize {
        let jf = j as f64;
        let rg = rgamma(1.0 - mu * jf);
        let mag_ln = ln_gamma(jf + kf) - ln_gamma(jf) - lnkfact - jf * lnx;
        let term = if j % 2 == 1 { 1.0 } else { -1.0 } * rg * mag_ln.exp();
        let mag = term.abs();
        if mag >= prev_nonzero && mag > 1e-6 * prev_nonzero.min(1e300) && prev_nonzero < f64::INFINITY && mag > 0.0 {
            return EvalResult {
                value: sum,
                terms_used: j,
                error_estimate: 5.0 * mag + series_round_off(sum_abs, j),
            };
        }
        sum += term;
        sum_abs += mag;
        if mag > 1e-6 * prev_nonzero.min(1.0) && mag > 0.0 {
            if mag < prev_nonzero {
                prev_nonzero = mag;
            }
            if mag < 1e-18 * sum.abs().max(f64::MIN_POSITIVE) && j > 2 {
                return EvalResult {
                    value: sum,
                    terms_used: j,
                    error_estimate: 5.0 * mag + series_round_off(sum_abs, j),
                };
            }
        }
    }
    EvalResult {
        value: sum,
        terms_used: 300,
        error_estimate: prev_nonzero.min(1.0) + series_round_off(sum_abs, 300),
    }
}

/// pmf of the Poisson process at a grey-Brownian clock. All parameters are
/// physical; the internal rescaling lambda' = lambda (2H)^{nu/2} that makes
/// the governing equation tidy never surfaces here.
pub fn pmf_ggbm_time(h: f64, nu: f64, lambda: f64, t: f64, k: u64) -> Result<f64> {
    // constructor performs the domain checks (H in (0,1), nu in (0,2])
    let _ = ProcessSpec::ggbm(h, nu, lambda)?;
    if t <= 0.0 {
        return Err(domain("pmf_ggbm_time", format!("t must be > 0, got {t}")));
    }
    ml_count_pmf(nu / 2.0, lambda * t.powf(h * nu), k)?.require("pmf_ggbm_time", PMF_ACCURACY_BOUND)
}

/// Probability generating function E u^{N(t)} for |u| <= 1.
pub fn pgf(spec: &ProcessSpec, u: f64, t: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&u) {
        return Err(domain("pgf", format!("u must be in [-1,1], got {u}")));
    }
    if t <= 0.0 {
        return Err(domain("pgf", format!("t must be > 0, got {t}")));
    }
    let one_minus_u = 1.0 - u;
    match spec {
        ProcessSpec::SpaceFractional { alpha, lambda } => {
            Ok((-t * (lambda * one_minus_u).powf(*alpha)).exp())
        }
        ProcessSpec::TimeFractional { nu, lambda } => {
            mittag_leffler(*nu, 1.0, -lambda * one_minus_u * t.powf(*nu))?
                .require("pgf", PMF_ACCURACY_BOUND)
        }
        ProcessSpec::SpaceTime { alpha, nu, lambda } => {
            mittag_leffler(*nu, 1.0, -(lambda * one_minus_u).powf(*alpha) * t.powf(*nu))?
                .require("pgf", PMF_ACCURACY_BOUND)
        }
        ProcessSpec::BernsteinPoisson { f, lambda } => {
            Ok((-t * f.value(lambda * one_minus_u)?).exp())
        }
        ProcessSpec::MultiSubordinated {
            fs,
            lambda,
            outer_nu,
        } => {
            let mut s = 0.0;
            for f in fs {
                s += f.value(lambda * one_minus_u)?;
            }
            match outer_nu {
                None => Ok((-t * s).exp()),
                Some(nu) => {
                    mittag_leffler(*nu, 1.0, -t.powf(*nu) * s)?.require("pgf", PMF_ACCURACY_BOUND)
                }
            }
        }
        ProcessSpec::GgbmTime { h, nu, lambda } => {
            mittag_leffler(nu / 2.0, 1.0, -lambda * one_minus_u * t.powf(h * nu))?
                .require("pgf", PMF_ACCURACY_BOUND)
        }
    }
}

/// Mean and the verbatim variance display for the superposition run at an
/// inverse stable clock.
#[derive(Debug, Clone, Copy)]
pub struct MomentReport {
    /// lambda t^nu / Gamma(nu + 1) * sum_j f_j'(0).
    pub mean: f64,
    /// lambda t [lambda sum_j f_j''(0) + sum_j f_j'(0)], reported as-is for
    /// comparison against Monte Carlo, never asserted: f''(0) <= 0 can make
    /// it negative, which a variance cannot be.
    pub variance_diagnostic: f64,
}

/// Moments of N(sum_j H^{f_j}(L^nu(t))); requires every f_j'(0) finite,
/// which excludes strictly stable members (their mean is infinite).
pub fn moments_multi_timechanged(
    fs: &[BernsteinFunction],
    lambda: f64,
    nu: f64,
    t: f64,
) -> Result<MomentReport> {
    check_nu_unit(nu)?;
    check_kt(lambda, t)?;
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    for f in fs {
        d1 += f.deriv1_at_zero().ok_or_else(|| Error::InfiniteMoment {
            msg: format!("{f} has f'(0) = +inf, the mean diverges"),
        })?;
        d2 += f.deriv2_at_zero().ok_or_else(|| Error::InfiniteMoment {
            msg: format!("{f} has divergent f''(0)"),
        })?;
    }
    let mean = lambda * t.powf(nu) * rgamma(nu + 1.0) * d1;
    let variance_diagnostic = lambda * t * (lambda * d2 + d1);
    Ok(MomentReport {
        mean,
        variance_diagnostic,
    })
}

/// Truncated pmf with the unassigned mass.
#[derive(Debug, Clone)]
pub struct PmfTable {
    /// probabilities[k] = P{N(t) = k}, k = 0..=k_max.
    pub probabilities: Vec<f64>,
    /// 1 - sum of the entries (clamped at 0): mass beyond k_max.
    pub tail_bound: f64,
    pub t: f64,
}

/// Growth policy for [`PmfTable::build`].
#[derive(Debug, Clone, Copy)]
pub struct TablePolicy {
    /// Stop growing once the unassigned mass drops below this.
    pub tail_tol: f64,
    /// Hard entry cap; heavy-tailed families land here.
    pub max_k: usize,
}

impl Default for TablePolicy {
    fn default() -> Self {
        Self {
            tail_tol: 1e-8,
            max_k: 10_000,
        }
    }
}

impl PmfTable {
    /// Build the table adaptively: double k_max until the unassigned mass is
    /// below `policy.tail_tol` or the cap is reached. The tail bound comes
    /// from normalization, not from term estimates.
    pub fn build(spec: &ProcessSpec, t: f64, policy: &TablePolicy) -> Result<Self> {
        if t <= 0.0 {
            return Err(domain("pmf_table", format!("t must be > 0, got {t}")));
        }
        let mut k_max = 64.min(policy.max_k);
        loop {
            let probabilities = pmf_prefix(spec, t, k_max)?;
            let total: f64 = probabilities.iter().sum();
            let tail_bound = (1.0 - total).max(0.0);
            if tail_bound < policy.tail_tol || k_max >= policy.max_k {
                return Ok(Self {
                    probabilities,
                    tail_bound,
                    t,
                });
            }
            k_max = (k_max * 2).min(policy.max_k);
        }
    }

    pub fn k_max(&self) -> usize {
        self.probabilities.len() - 1
    }

    /// CSV serialization: `k,probability` rows and a `tail,<bound>` footer.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,probability\n");
        for (k, p) in self.probabilities.iter().enumerate() {
            out.push_str(&format!("{k},{p}\n"));
        }
        out.push_str(&format!("tail,{}\n", self.tail_bound));
        out
    }
}

/// pmf values for k = 0..=k_max through the numerically appropriate route.
fn pmf_prefix(spec: &ProcessSpec, t: f64, k_max: usize) -> Result<Vec<f64>> {
    match spec {
        ProcessSpec::SpaceFractional { alpha, lambda } => {
            let f = BernsteinFunction::stable(*alpha)?;
            bernstein_prefix(std::slice::from_ref(&f), *lambda, t, k_max)
        }
        ProcessSpec::BernsteinPoisson { f, lambda } => {
            bernstein_prefix(std::slice::from_ref(f), *lambda, t, k_max)
        }
        ProcessSpec::MultiSubordinated {
            fs,
            lambda,
            outer_nu: None,
        } => {
            if fs.len() > 2 {
                return Err(Error::Unsupported {
                    msg: format!("exact pmf table needs n <= 2 subordinators, got {}", fs.len()),
                });
            }
            bernstein_prefix(fs, *lambda, t, k_max)
        }
        ProcessSpec::TimeFractional { nu, lambda } => {
            ml_count_prefix(*nu, lambda * t.powf(*nu), k_max)
        }
        ProcessSpec::GgbmTime { h, nu, lambda } => {
            ml_count_prefix(nu / 2.0, lambda * t.powf(h * nu), k_max)
        }
        ProcessSpec::SpaceTime { alpha, nu, lambda } => {
            if *alpha == 1.0 {
                return ml_count_prefix(*nu, lambda * t.powf(*nu), k_max);
            }
            let weights = count_weights(*nu, lambda.powf(*alpha) * t.powf(*nu))?;
            let jumps = sibuya_prefix(*alpha, k_max)?;
            Ok(mixture_by_convolution(&weights, &jumps, k_max))
        }
        ProcessSpec::MultiSubordinated {
            fs,
            lambda,
            outer_nu: Some(nu),
        } => {
            if fs.len() > 2 {
                return Err(Error::Unsupported {
                    msg: format!("exact pmf table needs n <= 2 subordinators, got {}", fs.len()),
                });
            }
            let mut f_sum = 0.0;
            for f in fs {
                f_sum += f.value(*lambda)?;
            }
            let weights = count_weights(*nu, f_sum * t.powf(*nu))?;
            let jumps = multi_jump_pmf(fs, *lambda, f_sum, k_max);
            Ok(mixture_by_convolution(&weights, &jumps, k_max))
        }
    }
}

/// Compound-Poisson route: positive Bell/Panjer recursion on the summed
/// Levy weights of the superposed subordinators.
fn bernstein_prefix(
    fs: &[BernsteinFunction],
    lambda: f64,
    t: f64,
    k_max: usize,
) -> Result<Vec<f64>> {
    let mut e_sum = vec![0.0; k_max + 1];
    let mut f_sum = 0.0;
    for f in fs {
        let e = f.levy_weights(lambda, t, k_max);
        for (acc, v) in e_sum.iter_mut().zip(e) {
            *acc += v;
        }
        f_sum += f.value(lambda)?;
    }
    let p0 = (-t * f_sum).exp();
    let mut p = vec![0.0; k_max + 1];
    p[0] = p0;
    for k in 1..=k_max {
        let mut acc = 0.0;
        for m in 1..=k {
            acc += e_sum[m] * p[k - m];
        }
        p[k] = acc / k as f64;
    }
    Ok(p)
}

/// Unit-jump count families: one `ml_count_pmf` call per entry, stopping
/// early once the mass is resolved to machine level.
fn ml_count_prefix(mu: f64, x: f64, k_max: usize) -> Result<Vec<f64>> {
    let mut p = Vec::with_capacity(k_max + 1);
    let mut total = 0.0;
    for k in 0..=k_max {
        let v = ml_count_pmf(mu, x, k as u64)?
            .require("pmf_table", PMF_ACCURACY_BOUND)?
            .max(0.0);
        p.push(v);
        total += v;
        if 1.0 - total < 1e-15 && k > 4 {
            p.resize(k_max + 1, 0.0);
            break;
        }
    }
    Ok(p)
}

/// Weights P{count = m} for the inverse-stable-clock mixture, truncated
/// where the remaining mass is below 1e-14.
fn count_weights(nu: f64, x: f64) -> Result<Vec<f64>> {
    let mut w = Vec::with_capacity(64);
    let mut total = 0.0;
    for m in 0..100_000u64 {
        let v = ml_count_pmf(nu, x, m)?
            .require("pmf_table", PMF_ACCURACY_BOUND)?
            .max(0.0);
        w.push(v);
        total += v;
        if 1.0 - total < 1e-14 && m > 4 {
            break;
        }
    }
    Ok(w)
}

/// Sibuya pmf vector q[0..=k_max] (q[0] = 0).
fn sibuya_prefix(alpha: f64, k_max: usize) -> Result<Vec<f64>> {
    let mut q = vec![0.0; k_max + 1];
    if k_max == 0 {
        return Ok(q);
    }
    q[1] = alpha;
    for k in 1..k_max {
        q[k + 1] = q[k] * (k as f64 - alpha) / (k as f64 + 1.0);
    }
    Ok(q)
}

/// Normalized jump law of the superposition: q_m proportional to
/// sum_j lambda^m |f_j^(m)(lambda)| / m!.
fn multi_jump_pmf(fs: &[BernsteinFunction], lambda: f64, f_sum: f64, k_max: usize) -> Vec<f64> {
    let mut q = vec![0.0; k_max + 1];
    for f in fs {
        let e = f.levy_weights(lambda, 1.0, k_max);
        for m in 1..=k_max {
            q[m] += e[m] / (m as f64 * f_sum);
        }
    }
    q
}

/// p = sum_m w_m q^{*m} by a Horner scheme over convolution:
/// r_M = w_M delta; r_m = w_m delta + q * r_{m+1}; p = r_0.
fn mixture_by_convolution(weights: &[f64], jumps: &[f64], k_max: usize) -> Vec<f64> {
    let mut r = vec![0.0; k_max + 1];
    if let Some(&w_last) = weights.last() {
        r[0] = w_last;
    }
    for m in (0..weights.len().saturating_sub(1)).rev() {
        let mut next = vec![0.0; k_max + 1];
        for k in 1..=k_max {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += jumps[j] * r[k - j];
            }
            next[k] = acc;
        }
        next[0] = weights[m];
        r = next;
    }
    r
}
