//! Explicit rates of asymptotic regularity and their empirical certification.
//!
//! A rate `φ` for a residual sequence `(r_n)` promises `r_n ≤ 1/(k+1)` for all
//! `n ≥ φ(k)`. Every composition below is integer arithmetic on [`RateFn`]s,
//! saturating at `u64::MAX`.

use std::fmt;

use crate::error::{Error, Result};
use crate::mappings::{chi_t_from_gamma, constant_family_chi_t, FamilyKind};
use crate::sequences::{psi0_fn, ParamSchedule, RateFn};

/// Where a bundle's rates come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateSource {
    GeneralComposition,
    HarmonicClosedForm,
    LinearSchedule,
    HalpernTranslated,
}

impl RateSource {
    pub fn name(self) -> &'static str {
        match self {
            RateSource::GeneralComposition => "general_composition",
            RateSource::HarmonicClosedForm => "harmonic_closed_form",
            RateSource::LinearSchedule => "linear_schedule",
            RateSource::HalpernTranslated => "halpern_translated",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RateBundle {
    /// Combined Cauchy modulus `χ` (absent for the linear schedule).
    pub chi: Option<RateFn>,
    /// The `ψ₀` used when composing `sigma`, if any.
    pub psi0: Option<RateFn>,
    /// Rate of asymptotic regularity: `d(x_n, x_{n+1}) → 0`.
    pub sigma: RateFn,
    /// Rate of `(T_n)`-asymptotic regularity: `d(x_n, T_n x_n) → 0`.
    pub sigma_t: Option<RateFn>,
    pub source: RateSource,
}

/// `χ(k) = max{χ_T(2(k+1) - 1), χ_λ(8M(k+1) - 1), χ_β(8M(k+1) - 1)}`.
pub fn chi_combined(chi_t: &RateFn, chi_lambda: &RateFn, chi_beta: &RateFn, m: u64) -> RateFn {
    let (chi_t, chi_lambda, chi_beta) = (chi_t.clone(), chi_lambda.clone(), chi_beta.clone());
    let eight_m = 8u64.saturating_mul(m);
    RateFn::new(move |k| {
        let wide = eight_m.saturating_mul(k + 1) - 1;
        chi_t
            .eval(2 * (k + 1) - 1)
            .max(chi_lambda.eval(wide))
            .max(chi_beta.eval(wide))
    })
}

/// `Σ(k) = max{σ_β(6M(k+1)ψ₀(k) - 1), χ(3k+2) + 1} + 1`.
pub fn sigma_ar(sigma_beta: &RateFn, chi: &RateFn, psi0: &RateFn, m: u64) -> RateFn {
    let (sigma_beta, chi, psi0) = (sigma_beta.clone(), chi.clone(), psi0.clone());
    RateFn::new(move |k| {
        let arg = 6u64
            .saturating_mul(m)
            .saturating_mul(k + 1)
            .saturating_mul(psi0.eval(k).max(1))
            - 1;
        sigma_beta
            .eval(arg)
            .max(chi.eval(3 * k + 2).saturating_add(1))
            .saturating_add(1)
    })
}

/// Turns a rate of asymptotic regularity `φ` into a rate of
/// `(T_n)`-asymptotic regularity:
/// `k ↦ max{N_Λ, φ(2Λ(k+1) - 1), σ(4MΛ(k+1) - 1)}`.
pub fn translate_ar_to_tn_ar(
    phi: &RateFn,
    m: u64,
    lambda_cap: u64,
    n_lambda: u64,
    sigma: &RateFn,
) -> RateFn {
    let (phi, sigma) = (phi.clone(), sigma.clone());
    RateFn::new(move |k| {
        let two_l = 2u64.saturating_mul(lambda_cap).saturating_mul(k + 1) - 1;
        let four_ml = 4u64
            .saturating_mul(m)
            .saturating_mul(lambda_cap)
            .saturating_mul(k + 1)
            - 1;
        n_lambda.max(phi.eval(two_l)).max(sigma.eval(four_ml))
    })
}

/// Rate for the modified Halpern iteration given a rate `Σ` for the
/// Tikhonov–Mann iteration (or vice versa):
/// `Σ'(k) = max{α(3k+2), Σ(3k+2)}` with `α(k) = σ(2M(k+1) - 1)`, where `σ` is
/// the rate of `β_n → 1`.
pub fn halpern_translate(sigma_ar: &RateFn, sigma_beta_to_one: &RateFn, m: u64) -> RateFn {
    let (big_sigma, sigma) = (sigma_ar.clone(), sigma_beta_to_one.clone());
    RateFn::new(move |k| {
        let j = 3 * k + 2;
        let alpha = sigma.eval(2u64.saturating_mul(m).saturating_mul(j + 1) - 1);
        alpha.max(big_sigma.eval(j))
    })
}

/// The Cauchy modulus `χ_T` appropriate for a family of the given kind.
pub fn chi_t_for_family(
    kind: FamilyKind,
    declared: Option<RateFn>,
    schedule: &ParamSchedule,
    m: u64,
) -> Result<RateFn> {
    if let Some(chi_t) = declared {
        return Ok(chi_t);
    }
    match kind {
        FamilyKind::Constant => Ok(constant_family_chi_t()),
        FamilyKind::Jp2WithGamma | FamilyKind::Resolvent => {
            let bound = schedule.moduli.gamma_bound()?;
            let chi_gamma = schedule.moduli.chi_gamma()?;
            Ok(chi_t_from_gamma(m, bound.cap, bound.from, chi_gamma))
        }
        FamilyKind::Custom => Err(Error::MissingModulus(
            "chi_T (Cauchy modulus for the family gaps)",
        )),
    }
}

/// Composes `χ`, `ψ₀`, `Σ` and, when `σ` and the `λ` lower bound are declared, `Σ_T` from the
/// schedule's moduli. `ψ₀` follows the schedule's [`crate::sequences::Psi0Choice`];
/// a computed `ψ₀` is evaluated eagerly for `k ≤ k_max`.
pub fn general_bundle(
    schedule: &ParamSchedule,
    chi_t: &RateFn,
    m: u64,
    k_max: u64,
) -> Result<RateBundle> {
    let moduli = &schedule.moduli;
    let chi = chi_combined(chi_t, moduli.chi_lambda()?, moduli.chi_beta()?, m);
    let psi0 = psi0_fn(schedule, &chi, k_max)?;
    let sigma = sigma_ar(moduli.sigma_beta()?, &chi, &psi0, m);
    let sigma_t = match (moduli.sigma(), moduli.lambda_bound()) {
        (Ok(s), Ok(bound)) => Some(translate_ar_to_tn_ar(&sigma, m, bound.cap, bound.from, s)),
        _ => None,
    };
    Ok(RateBundle {
        chi: Some(chi),
        psi0: Some(psi0),
        sigma,
        sigma_t,
        source: RateSource::GeneralComposition,
    })
}

/// Closed-form rates for `β_n = 1 - 1/(n+1)`, constant `λ`,
/// `γ_n = 1 + 1/(n+1)`:
/// `Σ(k) = 144M²(k+1)² - 6M(k+1)` and
/// `Σ_T(k) = 576M²Λ²(k+1)² - 12MΛ(k+1)` with `Λ = ⌈1/λ⌉`.
pub fn harmonic_closed_form(m: u64, lambda_cap: u64) -> RateBundle {
    let sigma = RateFn::new(move |k| {
        let mk = m.saturating_mul(k + 1);
        144u64.saturating_mul(mk).saturating_mul(mk) - 6 * mk
    });
    let sigma_t = RateFn::new(move |k| {
        let mlk = m.saturating_mul(lambda_cap).saturating_mul(k + 1);
        576u64.saturating_mul(mlk).saturating_mul(mlk) - 12 * mlk
    });
    let chi = RateFn::new(move |k| 8u64.saturating_mul(m).saturating_mul(k + 1) - 1);
    let psi0 = RateFn::new(move |k| 24u64.saturating_mul(m).saturating_mul(k + 1) - 1);
    RateBundle {
        chi: Some(chi),
        psi0: Some(psi0),
        sigma,
        sigma_t: Some(sigma_t),
        source: RateSource::HarmonicClosedForm,
    }
}

/// Pointwise bounds for `β_n = 1 - 2/(n+2)`, constant `λ`,
/// `γ_n = (n+3)/(n+2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearBounds {
    pub m: u64,
    pub lambda: f64,
}

impl LinearBounds {
    /// `d(x_n, x_{n+1}) ≤ 6M/(n+2)`
    pub fn step(&self, n: u64) -> f64 {
        6.0 * self.m as f64 / (n as f64 + 2.0)
    }

    /// `d(x_n, T_n x_n) ≤ 10M/(λ(n+2))`
    pub fn residual_t(&self, n: u64) -> f64 {
        10.0 * self.m as f64 / (self.lambda * (n as f64 + 2.0))
    }

    /// `d(x_n, T_m x_n) ≤ 20M/(λ(n+2))` for every `m`.
    pub fn cross_index(&self, n: u64) -> f64 {
        20.0 * self.m as f64 / (self.lambda * (n as f64 + 2.0))
    }
}

#[derive(Debug, Clone)]
pub struct LinearRates {
    pub bundle: RateBundle,
    /// Rate for `d(x_n, T_m x_n) → 0`, uniform in `m`.
    pub cross_index: RateFn,
    pub bounds: LinearBounds,
}

/// Linear rates `k ↦ 6M(k+1) - 2`, `k ↦ 10MΛ(k+1) - 2` and
/// `k ↦ 20MΛ(k+1) - 2` with `Λ = ⌈1/λ⌉`.
pub fn linear_rates(m: u64, lambda: f64) -> Result<LinearRates> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Domain(format!(
            "constant lambda = {lambda} must lie in (0, 1)"
        )));
    }
    let cap = crate::sequences::ceil_recip(lambda);
    let lin = move |c: u64| RateFn::new(move |k| c.saturating_mul(m).saturating_mul(k + 1) - 2);
    Ok(LinearRates {
        bundle: RateBundle {
            chi: None,
            psi0: None,
            sigma: lin(6),
            sigma_t: Some(lin(10 * cap)),
            source: RateSource::LinearSchedule,
        },
        cross_index: lin(20 * cap),
        bounds: LinearBounds { m, lambda },
    })
}

// ---------------------------------------------------------------------------
// Linear rate recursion
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct LinearRecursionReport {
    pub horizon: u64,
    pub initial_ok: bool,
    /// First `n` with `s_{n+1} > (1 - a_{n+1}) s_n + (a_n - a_{n+1}) L`.
    pub hypothesis_failure: Option<u64>,
    pub hypothesis_max_violation: f64,
    /// First `n` with `s_n > 2L/(n+2)`.
    pub conclusion_failure: Option<u64>,
    pub conclusion_max_violation: f64,
}

impl LinearRecursionReport {
    pub fn hypothesis_holds(&self) -> bool {
        self.initial_ok && self.hypothesis_failure.is_none()
    }

    pub fn conclusion_holds(&self) -> bool {
        self.conclusion_failure.is_none()
    }
}

/// Checks the recursion `s_{n+1} ≤ (1 - a_{n+1}) s_n + (a_n - a_{n+1}) L` with
/// `a_n = 2/(n+2)` for `n < horizon` (plus `s_0 ≤ L`) and, separately, the
/// bound `s_n ≤ 2L/(n+2)` for `n ≤ horizon`. The horizon is clipped to the
/// available data.
pub fn linear_recursion_check(s: &[f64], l: f64, horizon: u64, tol: f64) -> LinearRecursionReport {
    let a = |n: u64| 2.0 / (n as f64 + 2.0);
    let horizon = horizon.min(s.len().saturating_sub(1) as u64);
    let mut report = LinearRecursionReport {
        horizon,
        initial_ok: s.first().is_none_or(|&s0| s0 <= l + tol),
        hypothesis_failure: None,
        hypothesis_max_violation: f64::NEG_INFINITY,
        conclusion_failure: None,
        conclusion_max_violation: f64::NEG_INFINITY,
    };
    for n in 0..=horizon {
        let i = n as usize;
        if i >= s.len() {
            break;
        }
        let v = s[i] - 2.0 * l / (n as f64 + 2.0);
        report.conclusion_max_violation = report.conclusion_max_violation.max(v);
        if report.conclusion_failure.is_none() && !(v <= tol) {
            report.conclusion_failure = Some(n);
        }
        if n < horizon {
            let rhs = (1.0 - a(n + 1)) * s[i] + (a(n) - a(n + 1)) * l;
            let v = s[i + 1] - rhs;
            report.hypothesis_max_violation = report.hypothesis_max_violation.max(v);
            if report.hypothesis_failure.is_none() && !(v <= tol) {
                report.hypothesis_failure = Some(n);
            }
        }
    }
    report
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertStatus {
    Pass,
    Fail,
    /// The rate points beyond the observed horizon.
    Inconclusive,
}

impl CertStatus {
    pub fn name(self) -> &'static str {
        match self {
            CertStatus::Pass => "pass",
            CertStatus::Fail => "fail",
            CertStatus::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for CertStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertRow {
    pub k: u64,
    pub rate_k: u64,
    /// `max_{rate(k) ≤ n ≤ horizon} r_n - 1/(k+1)`; `None` when inconclusive.
    pub worst_excess: Option<f64>,
    /// Least `N` such that `r_n ≤ 1/(k+1) + tol` on all of `[N, horizon]`;
    /// `None` if even the last observed residual is too large.
    pub minimal_empirical_index: Option<u64>,
    pub status: CertStatus,
}

#[derive(Debug, Clone)]
pub struct CertificationReport {
    pub target: String,
    pub horizon: u64,
    pub tol: f64,
    pub rows: Vec<CertRow>,
}

impl CertificationReport {
    /// No row failed (inconclusive rows are not failures).
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.status != CertStatus::Fail)
    }

    pub fn all_conclusive(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.status != CertStatus::Inconclusive)
    }

    pub fn count(&self, status: CertStatus) -> usize {
        self.rows.iter().filter(|r| r.status == status).count()
    }
}

impl fmt::Display for CertificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "certification of {} (horizon {}, tol {:e}): {} pass, {} fail, {} inconclusive",
            self.target,
            self.horizon,
            self.tol,
            self.count(CertStatus::Pass),
            self.count(CertStatus::Fail),
            self.count(CertStatus::Inconclusive)
        )?;
        for r in &self.rows {
            let excess = r
                .worst_excess
                .map_or("-".to_string(), |e| format!("{e:.3e}"));
            let minimal = r
                .minimal_empirical_index
                .map_or("-".to_string(), |m| m.to_string());
            writeln!(
                f,
                "  k={:<3} rate={:<12} worst_excess={:<11} empirical_min={:<10} {}",
                r.k, r.rate_k, excess, minimal, r.status
            )?;
        }
        Ok(())
    }
}

/// Checks `residuals[n] ≤ 1/(k+1) + tol` for all `n ∈ [rate(k), horizon]`,
/// for each `k ≤ k_max`. The horizon is clipped to the last available index.
pub fn certify_rate(
    target: impl Into<String>,
    residuals: &[f64],
    rate: &RateFn,
    k_max: u64,
    horizon: u64,
    tol: f64,
) -> CertificationReport {
    let end = horizon.min(residuals.len() as u64).min(u64::MAX - 1);
    // Indices 0..end are observed (end exclusive).
    let window = &residuals[..end as usize];
    let mut suffix_max = vec![f64::NEG_INFINITY; window.len() + 1];
    for n in (0..window.len()).rev() {
        let r = if window[n].is_nan() {
            f64::INFINITY
        } else {
            window[n]
        };
        suffix_max[n] = suffix_max[n + 1].max(r);
    }
    let rows = (0..=k_max)
        .map(|k| {
            let bound = 1.0 / (k + 1) as f64;
            let rate_k = rate.eval(k);
            let first_ok = suffix_max[..window.len()].partition_point(|&v| v > bound + tol) as u64;
            let minimal_empirical_index = (first_ok < window.len() as u64).then_some(first_ok);
            if rate_k >= window.len() as u64 {
                return CertRow {
                    k,
                    rate_k,
                    worst_excess: None,
                    minimal_empirical_index,
                    status: CertStatus::Inconclusive,
                };
            }
            let worst = suffix_max[rate_k as usize] - bound;
            CertRow {
                k,
                rate_k,
                worst_excess: Some(worst),
                minimal_empirical_index,
                status: if worst <= tol {
                    CertStatus::Pass
                } else {
                    CertStatus::Fail
                },
            }
        })
        .collect();
    CertificationReport {
        target: target.into(),
        horizon: window.len() as u64,
        tol,
        rows,
    }
}
