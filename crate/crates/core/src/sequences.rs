//! Scalar parameter schedules `(β_n)`, `(λ_n)`, `(γ_n)` together with the
//! quantitative moduli the rate formulas consume, and brute-force oracles that
//! validate declared moduli over a finite horizon.
//!
//! | statement | modulus |
//! |-----------|---------|
//! | `∏ β_{n+1} → 0` | rate `σ_β` |
//! | `Σ |β_{n+1} - β_n| < ∞` | Cauchy modulus `χ_β` |
//! | `Σ |λ_{n+1} - λ_n| < ∞` | Cauchy modulus `χ_λ` |
//! | `β_n → 1` | rate `σ` |
//! | `λ_n ≥ 1/Λ` for `n ≥ N_Λ` | `(Λ, N_Λ)` |
//! | `Σ |γ_{n+1} - γ_n| < ∞` | Cauchy modulus `χ_γ` |
//! | `γ_n ≥ 1/Γ` for `n ≥ N_Γ` | `(Γ, N_Γ)` |

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A total function `ℕ → ℕ` used as a rate of convergence or Cauchy modulus.
///
/// Compositions saturate at `u64::MAX` rather than wrapping.
#[derive(Clone)]
pub struct RateFn(Arc<dyn Fn(u64) -> u64 + Send + Sync>);

impl RateFn {
    pub fn new(f: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn eval(&self, k: u64) -> u64 {
        (self.0)(k)
    }

    pub fn zero() -> Self {
        Self::constant(0)
    }

    pub fn constant(c: u64) -> Self {
        Self::new(move |_| c)
    }

    pub fn identity() -> Self {
        Self::new(|k| k)
    }

    /// `k ↦ a·k + b`.
    pub fn affine(a: u64, b: u64) -> Self {
        Self::new(move |k| a.saturating_mul(k).saturating_add(b))
    }

    /// Tabulates `self` for `k ≤ k_max`.
    pub fn table(&self, k_max: u64) -> Vec<u64> {
        (0..=k_max).map(|k| self.eval(k)).collect()
    }
}

impl fmt::Debug for RateFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "RateFn[{}, {}, {}, ..]",
            self.eval(0),
            self.eval(1),
            self.eval(2)
        )
    }
}

/// A rate of divergence `θ` for a series of nonnegative reals:
/// `Σ_{n ≤ θ(k)} b_n ≥ k`. No rate composition in this crate consumes one; the
/// product condition `∏ β_{n+1} → 0` is used instead.
pub type DivergenceRate = RateFn;

/// `(cap, from)` such that the sequence is `≥ 1/cap` for all `n ≥ from`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LowerBound {
    pub cap: u64,
    pub from: u64,
}

/// How `ψ₀` (a positive integer with `1/ψ₀(k) ≤ ∏_{n ≤ χ(3k+2)} β_{n+1}`) is
/// obtained when composing the general asymptotic-regularity rate.
#[derive(Debug, Clone)]
pub enum Psi0Choice {
    /// The least valid value, computed from the schedule.
    Minimal,
    /// `ψ₀(k) = χ(3k + 2)`, the choice made for the harmonic schedule's closed
    /// form.
    ChiShift,
    Declared(RateFn),
}

/// Declared quantitative moduli of a schedule. `None` means "not declared".
#[derive(Debug, Clone)]
pub struct Moduli {
    pub sigma_beta: Option<RateFn>,
    pub chi_beta: Option<RateFn>,
    pub chi_lambda: Option<RateFn>,
    pub sigma: Option<RateFn>,
    pub lambda_bound: Option<LowerBound>,
    pub chi_gamma: Option<RateFn>,
    pub gamma_bound: Option<LowerBound>,
    pub psi0: Psi0Choice,
}

impl Default for Moduli {
    fn default() -> Self {
        Self {
            sigma_beta: None,
            chi_beta: None,
            chi_lambda: None,
            sigma: None,
            lambda_bound: None,
            chi_gamma: None,
            gamma_bound: None,
            psi0: Psi0Choice::Minimal,
        }
    }
}

impl Moduli {
    pub fn sigma_beta(&self) -> Result<&RateFn> {
        self.sigma_beta.as_ref().ok_or(Error::MissingModulus(
            "sigma_beta (rate for the product of beta)",
        ))
    }
    pub fn chi_beta(&self) -> Result<&RateFn> {
        self.chi_beta.as_ref().ok_or(Error::MissingModulus(
            "chi_beta (Cauchy modulus for the variation of beta)",
        ))
    }
    pub fn chi_lambda(&self) -> Result<&RateFn> {
        self.chi_lambda.as_ref().ok_or(Error::MissingModulus(
            "chi_lambda (Cauchy modulus for the variation of lambda)",
        ))
    }
    pub fn sigma(&self) -> Result<&RateFn> {
        self.sigma
            .as_ref()
            .ok_or(Error::MissingModulus("sigma (rate for beta -> 1)"))
    }
    pub fn lambda_bound(&self) -> Result<LowerBound> {
        self.lambda_bound.ok_or(Error::MissingModulus(
            "lambda lower bound (Lambda, N_Lambda)",
        ))
    }
    pub fn chi_gamma(&self) -> Result<&RateFn> {
        self.chi_gamma.as_ref().ok_or(Error::MissingModulus(
            "chi_gamma (Cauchy modulus for the variation of gamma)",
        ))
    }
    pub fn gamma_bound(&self) -> Result<LowerBound> {
        self.gamma_bound
            .ok_or(Error::MissingModulus("gamma lower bound (Gamma, N_Gamma)"))
    }
}

type SeqFn = Arc<dyn Fn(u64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleKind {
    /// `β_n = 1 - 1/(n+1)`, `λ_n = λ`, `γ_n = 1 + 1/(n+1)`.
    Harmonic { lambda: f64 },
    /// `β_n = 1 - 2/(n+2)`, `λ_n = λ`, `γ_n = (n+3)/(n+2)`.
    Linear { lambda: f64 },
    /// Finite tables supplied by the caller.
    Table,
}

#[derive(Clone)]
pub struct ParamSchedule {
    kind: ScheduleKind,
    beta: SeqFn,
    lambda: SeqFn,
    gamma: Option<SeqFn>,
    /// Number of tabulated entries for [`ScheduleKind::Table`].
    table_len: Option<usize>,
    pub moduli: Moduli,
}

impl fmt::Debug for ParamSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParamSchedule")
            .field("kind", &self.kind)
            .field("table_len", &self.table_len)
            .field("moduli", &self.moduli)
            .finish_non_exhaustive()
    }
}

fn check_open_unit(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "constant lambda = {lambda} must lie in (0, 1)"
        )))
    }
}

/// `⌈1/λ⌉` as a positive integer.
pub fn ceil_recip(lambda: f64) -> u64 {
    (1.0 / lambda).ceil() as u64
}

/// Least `r` with `r² ≥ v`.
fn ceil_sqrt(v: u64) -> u64 {
    let mut r = (v as f64).sqrt() as u64;
    while r.saturating_mul(r) < v {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= v {
        r -= 1;
    }
    r
}

impl ParamSchedule {
    /// `β_n = 1 - 1/(n+1)`, `λ_n = λ`, `γ_n = 1 + 1/(n+1)` with the moduli
    /// `σ_β(k) = χ_β(k) = σ(k) = χ_γ(k) = k`, `χ_λ ≡ 0`, `Λ = ⌈1/λ⌉`,
    /// `N_Λ = 0`, `Γ = 1`, `N_Γ = 0` and `ψ₀(k) = χ(3k+2)`.
    ///
    /// `∏_{i≤n} β_{i+1} = 1/(n+2)`, `Σ_{i≤n} |β_{i+1}-β_i| = 1 - 1/(n+2)` and the
    /// same for `γ`, which is where the moduli come from.
    pub fn harmonic(lambda: f64) -> Result<Self> {
        check_open_unit(lambda)?;
        Ok(Self {
            kind: ScheduleKind::Harmonic { lambda },
            beta: Arc::new(|n| n as f64 / (n as f64 + 1.0)),
            lambda: Arc::new(move |_| lambda),
            gamma: Some(Arc::new(|n| (n as f64 + 2.0) / (n as f64 + 1.0))),
            table_len: None,
            moduli: Moduli {
                sigma_beta: Some(RateFn::identity()),
                chi_beta: Some(RateFn::identity()),
                chi_lambda: Some(RateFn::zero()),
                sigma: Some(RateFn::identity()),
                lambda_bound: Some(LowerBound {
                    cap: ceil_recip(lambda),
                    from: 0,
                }),
                chi_gamma: Some(RateFn::identity()),
                gamma_bound: Some(LowerBound { cap: 1, from: 0 }),
                psi0: Psi0Choice::ChiShift,
            },
        })
    }

    /// `β_n = 1 - 2/(n+2)`, `λ_n = λ`, `γ_n = (n+3)/(n+2)`.
    ///
    /// Moduli:
    /// * product: `∏_{i≤N} β_{i+1} = 2/((N+2)(N+3))`, which is `≤ 1/(k+1)` once
    ///   `N + 2 ≥ √(2(k+1))`; `σ_β(k) = ⌈√(2(k+1))⌉ - 2` (floored at 0).
    /// * variation of `β`: the tail `Σ_{i>n} |β_{i+1}-β_i| = 2/(n+3)`; `χ_β(k) = 2k`.
    /// * `β_n → 1`: `1 - β_n = 2/(n+2)`; `σ(k) = 2k`.
    /// * variation of `γ`: the tail `Σ_{i>n} |γ_{i+1}-γ_i| = 1/(n+3)`; `χ_γ(k) = k`.
    /// * `χ_λ ≡ 0`, lower bounds `(⌈1/λ⌉, 0)` for `λ` and `(1, 0)` for `γ`.
    pub fn linear(lambda: f64) -> Result<Self> {
        check_open_unit(lambda)?;
        Ok(Self {
            kind: ScheduleKind::Linear { lambda },
            beta: Arc::new(|n| n as f64 / (n as f64 + 2.0)),
            lambda: Arc::new(move |_| lambda),
            gamma: Some(Arc::new(|n| (n as f64 + 3.0) / (n as f64 + 2.0))),
            table_len: None,
            moduli: Moduli {
                sigma_beta: Some(RateFn::new(|k| ceil_sqrt(2 * (k + 1)).saturating_sub(2))),
                chi_beta: Some(RateFn::affine(2, 0)),
                chi_lambda: Some(RateFn::zero()),
                sigma: Some(RateFn::affine(2, 0)),
                lambda_bound: Some(LowerBound {
                    cap: ceil_recip(lambda),
                    from: 0,
                }),
                chi_gamma: Some(RateFn::identity()),
                gamma_bound: Some(LowerBound { cap: 1, from: 0 }),
                psi0: Psi0Choice::Minimal,
            },
        })
    }

    /// A finite-horizon schedule from explicit tables. Iterations may use at
    /// most `beta.len()` indices; no moduli are declared until set through
    /// [`ParamSchedule::with_moduli`].
    pub fn from_tables(beta: Vec<f64>, lambda: Vec<f64>, gamma: Option<Vec<f64>>) -> Result<Self> {
        if beta.is_empty() {
            return Err(Error::Domain("schedule tables must be nonempty".into()));
        }
        if lambda.len() != beta.len() || gamma.as_ref().is_some_and(|g| g.len() != beta.len()) {
            return Err(Error::Domain(
                "schedule tables must have equal lengths".into(),
            ));
        }
        for (name, table) in [("beta", &beta), ("lambda", &lambda)] {
            if let Some((i, v)) = table
                .iter()
                .enumerate()
                .find(|(_, v)| !(0.0..=1.0).contains(*v))
            {
                return Err(Error::Domain(format!(
                    "{name}[{i}] = {v} is outside [0, 1]"
                )));
            }
        }
        if let Some((i, v)) = gamma
            .iter()
            .flatten()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::Domain(format!(
                "gamma[{i}] = {v} must be a positive real"
            )));
        }
        let len = beta.len();
        let lookup = |table: Vec<f64>| -> SeqFn {
            Arc::new(move |n| table[(n as usize).min(table.len() - 1)])
        };
        Ok(Self {
            kind: ScheduleKind::Table,
            beta: lookup(beta),
            lambda: lookup(lambda),
            gamma: gamma.map(lookup),
            table_len: Some(len),
            moduli: Moduli::default(),
        })
    }

    pub fn with_moduli(mut self, moduli: Moduli) -> Self {
        self.moduli = moduli;
        self
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn beta(&self, n: u64) -> f64 {
        (self.beta)(n)
    }

    pub fn lambda(&self, n: u64) -> f64 {
        (self.lambda)(n)
    }

    pub fn gamma(&self, n: u64) -> Option<f64> {
        self.gamma.as_ref().map(|g| g(n))
    }

    pub fn has_gamma(&self) -> bool {
        self.gamma.is_some()
    }

    /// The γ sequence as a shareable closure, for families built on it.
    pub fn gamma_fn(&self) -> Option<Arc<dyn Fn(u64) -> f64 + Send + Sync>> {
        self.gamma.clone()
    }

    /// Errors if indices up to `last` are not covered by a tabulated schedule.
    pub fn check_covers(&self, last: u64) -> Result<()> {
        match self.table_len {
            Some(len) if last >= len as u64 => Err(Error::ScheduleExhausted { index: last, len }),
            _ => Ok(()),
        }
    }
}

// ---------------------------------------------------------------------------
// Products and ψ₀
// ---------------------------------------------------------------------------

/// Running product of factors in `[0, 1]`, rescaled by powers of two so long
/// products do not underflow.
#[derive(Debug, Clone)]
struct ProductAccumulator {
    /// The product is `mantissa · 2^(-shift)`; rescaling by powers of two is exact.
    mantissa: f64,
    shift: i64,
}

const RESCALE_BITS: i32 = 512;

impl ProductAccumulator {
    fn new() -> Self {
        Self {
            mantissa: 1.0,
            shift: 0,
        }
    }

    fn push(&mut self, factor: f64) {
        self.mantissa *= factor;
        if self.mantissa > 0.0 && self.mantissa < 2f64.powi(-RESCALE_BITS) {
            self.mantissa *= 2f64.powi(RESCALE_BITS);
            self.shift += RESCALE_BITS as i64;
        }
    }

    fn ln(&self) -> f64 {
        self.mantissa.ln() - self.shift as f64 * std::f64::consts::LN_2
    }

    /// Whether the product is `≤ 1/(k+1)`, counting rounding-level ties as `≤`.
    fn at_most_recip(&self, k: u64) -> bool {
        let target = -((k + 1) as f64).ln();
        self.ln() <= target + 1e-12
    }

    /// Least integer `P` with `1/P ≤ product`, treating values within relative
    /// `1e-9` of an integer as that integer.
    fn recip_ceiling(&self) -> u64 {
        let r = (-self.ln()).exp();
        let nearest = r.round();
        let p = if (r - nearest).abs() <= 1e-9 * r {
            nearest
        } else {
            r.ceil()
        };
        if p >= u64::MAX as f64 {
            u64::MAX
        } else {
            (p as u64).max(1)
        }
    }
}

/// `∏_{n=0}^{upper} β_{n+1}` for the given schedule, or `None` if it vanishes.
pub fn beta_product_ln(schedule: &ParamSchedule, upper: u64) -> Option<f64> {
    let mut acc = ProductAccumulator::new();
    for n in 0..=upper {
        let b = schedule.beta(n + 1);
        if b <= 0.0 {
            return None;
        }
        acc.push(b);
    }
    Some(acc.ln())
}

/// Least positive integer `ψ₀(k)` with `1/ψ₀(k) ≤ ∏_{n=0}^{χ(3k+2)} β_{n+1}`.
pub fn psi0(schedule: &ParamSchedule, chi: &RateFn, k: u64) -> Result<u64> {
    let upper = chi.eval(3 * k + 2);
    let mut acc = ProductAccumulator::new();
    for n in 0..=upper {
        let b = schedule.beta(n + 1);
        if b <= 0.0 {
            return Err(Error::Psi0Undefined { upper });
        }
        acc.push(b);
    }
    Ok(acc.recip_ceiling())
}

/// The `ψ₀` function selected by the schedule's [`Psi0Choice`]. For
/// [`Psi0Choice::Minimal`], every `k ≤ k_max` is evaluated eagerly so that an
/// undefined `ψ₀` surfaces here; beyond `k_max` an undefined value saturates to
/// `u64::MAX`.
pub fn psi0_fn(schedule: &ParamSchedule, chi: &RateFn, k_max: u64) -> Result<RateFn> {
    match &schedule.moduli.psi0 {
        Psi0Choice::Declared(f) => Ok(f.clone()),
        Psi0Choice::ChiShift => {
            let chi = chi.clone();
            Ok(RateFn::new(move |k| chi.eval(3 * k + 2).max(1)))
        }
        Psi0Choice::Minimal => {
            let table = (0..=k_max)
                .map(|k| psi0(schedule, chi, k))
                .collect::<Result<Vec<_>>>()?;
            let schedule = schedule.clone();
            let chi = chi.clone();
            Ok(RateFn::new(move |k| match table.get(k as usize) {
                Some(&v) => v,
                None => psi0(&schedule, &chi, k).unwrap_or(u64::MAX),
            }))
        }
    }
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// Outcome of a brute-force modulus search for one `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleEntry {
    /// Least valid index within the horizon.
    Found(u64),
    /// The horizon does not leave enough room to decide.
    Inconclusive,
}

/// Least Cauchy moduli of the partial sums `a_n = Σ_{i≤n} b_i` for `k ≤ k_max`,
/// i.e. the least `n` with `a_{n+j} - a_n ≤ 1/(k+1)` for every `n + j ≤ horizon`.
///
/// Terms must be nonnegative, so the supremum over `j` is the tail
/// `Σ_{i=n+1}^{horizon} b_i`. An index in the upper half of the window is
/// reported as inconclusive: too little of the tail has been observed.
pub fn oracle_cauchy_modulus(
    terms: impl Fn(u64) -> f64,
    k_max: u64,
    horizon: u64,
) -> Vec<OracleEntry> {
    let h = horizon as usize;
    // tail[n] = Σ_{i=n+1}^{h} b_i, summed from the small end.
    let mut tail = vec![0.0f64; h + 1];
    for n in (0..h).rev() {
        tail[n] = tail[n + 1] + terms(n as u64 + 1).max(0.0);
    }
    (0..=k_max)
        .map(|k| {
            let bound = 1.0 / (k + 1) as f64;
            let n = tail.partition_point(|&t| t > bound * (1.0 + 1e-12)) as u64;
            if n > horizon / 2 {
                OracleEntry::Inconclusive
            } else {
                OracleEntry::Found(n)
            }
        })
        .collect()
}

/// Least `N` with `∏_{n=0}^{N} β_{n+1} ≤ 1/(k+1)` for `k ≤ k_max` (the product is
/// nonincreasing, so it stays below from then on). Inconclusive when the
/// product has not reached the threshold by `N = horizon`.
pub fn oracle_product_rate(
    beta: impl Fn(u64) -> f64,
    k_max: u64,
    horizon: u64,
) -> Vec<OracleEntry> {
    let mut out = vec![OracleEntry::Inconclusive; k_max as usize + 1];
    let mut acc = ProductAccumulator::new();
    let mut k = 0u64;
    for big_n in 0..=horizon {
        let b = beta(big_n + 1);
        if b <= 0.0 {
            // The product is zero from here on.
            for entry in &mut out[k as usize..] {
                *entry = OracleEntry::Found(big_n);
            }
            return out;
        }
        acc.push(b);
        while k <= k_max && acc.at_most_recip(k) {
            out[k as usize] = OracleEntry::Found(big_n);
            k += 1;
        }
        if k > k_max {
            break;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModulusStatus {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModulusCheck {
    pub k: u64,
    pub declared: u64,
    pub minimal: OracleEntry,
    pub status: ModulusStatus,
}

/// A declared modulus is valid at `k` iff it is at least the oracle's least
/// valid index.
pub fn validate_modulus(declared: &RateFn, oracle: &[OracleEntry]) -> Vec<ModulusCheck> {
    oracle
        .iter()
        .enumerate()
        .map(|(k, &minimal)| {
            let k = k as u64;
            let d = declared.eval(k);
            let status = match minimal {
                OracleEntry::Found(m) if d >= m => ModulusStatus::Pass,
                OracleEntry::Found(_) => ModulusStatus::Fail,
                OracleEntry::Inconclusive => ModulusStatus::Inconclusive,
            };
            ModulusCheck {
                k,
                declared: d,
                minimal,
                status,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_values() {
        let s = ParamSchedule::harmonic(0.5).unwrap();
        assert_eq!(s.beta(0), 0.0);
        assert_eq!(s.beta(1), 0.5);
        assert!((s.beta(2) - 2.0 / 3.0).abs() < 1e-16);
        assert_eq!(s.gamma(0), Some(2.0));
        assert_eq!(s.moduli.lambda_bound, Some(LowerBound { cap: 2, from: 0 }));
        assert_eq!(
            ParamSchedule::harmonic(1.0 / 3.0)
                .unwrap()
                .moduli
                .lambda_bound
                .unwrap()
                .cap,
            3
        );
    }

    #[test]
    fn linear_values() {
        let s = ParamSchedule::linear(0.5).unwrap();
        assert_eq!(s.beta(0), 0.0);
        assert!((s.beta(1) - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(s.beta(2), 0.5);
        for n in [0u64, 1, 7, 1000] {
            let nf = n as f64;
            let dg = (s.gamma(n + 1).unwrap() - s.gamma(n).unwrap()).abs();
            assert!((dg - 1.0 / ((nf + 2.0) * (nf + 3.0))).abs() < 1e-15);
            let db = s.beta(n + 1) - s.beta(n);
            assert!((db - 2.0 / ((nf + 2.0) * (nf + 3.0))).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_lambda_must_be_interior() {
        for bad in [0.0, 1.0, -0.5, 2.0, f64::NAN] {
            assert!(ParamSchedule::harmonic(bad).is_err());
            assert!(ParamSchedule::linear(bad).is_err());
        }
    }

    #[test]
    fn table_schedules() {
        let s = ParamSchedule::from_tables(vec![0.0, 0.5, 0.75], vec![0.5; 3], None).unwrap();
        assert_eq!(s.beta(2), 0.75);
        assert!(s.check_covers(2).is_ok());
        assert!(matches!(
            s.check_covers(3),
            Err(Error::ScheduleExhausted { index: 3, len: 3 })
        ));
        assert!(s.moduli.sigma_beta().is_err());
        assert!(ParamSchedule::from_tables(vec![1.5], vec![0.5], None).is_err());
        assert!(ParamSchedule::from_tables(vec![0.5], vec![0.5, 0.5], None).is_err());
        assert!(ParamSchedule::from_tables(vec![0.5], vec![0.5], Some(vec![0.0])).is_err());
    }

    #[test]
    fn ceil_sqrt_is_exact() {
        for v in 0..2000u64 {
            let r = ceil_sqrt(v);
            assert!(r * r >= v);
            assert!(r == 0 || (r - 1) * (r - 1) < v);
        }
    }

    #[test]
    fn psi0_constant_schedules() {
        let ones = ParamSchedule::from_tables(vec![1.0; 50], vec![0.5; 50], None).unwrap();
        assert_eq!(psi0(&ones, &RateFn::constant(10), 3).unwrap(), 1);

        let halves = ParamSchedule::from_tables(vec![0.5; 50], vec![0.5; 50], None).unwrap();
        assert_eq!(psi0(&halves, &RateFn::constant(2), 9).unwrap(), 8);

        let zeros = ParamSchedule::from_tables(vec![0.0; 50], vec![0.5; 50], None).unwrap();
        assert!(matches!(
            psi0(&zeros, &RateFn::constant(2), 0),
            Err(Error::Psi0Undefined { upper: 2 })
        ));
    }

    #[test]
    fn psi0_harmonic_is_reciprocal_of_shifted_index() {
        // ∏_{n≤N} β_{n+1} = 1/(N+2) for the harmonic schedule.
        let s = ParamSchedule::harmonic(0.5).unwrap();
        for m in 1..=3u64 {
            let chi = RateFn::new(move |k| 8 * m * (k + 1) - 1);
            for k in 0..10 {
                assert_eq!(psi0(&s, &chi, k).unwrap(), 24 * m * (k + 1) + 1);
            }
        }
    }

    #[test]
    fn product_accumulator_survives_underflow() {
        let mut acc = ProductAccumulator::new();
        for _ in 0..20_000 {
            acc.push(0.5);
        }
        assert!((acc.ln() - 20_000.0 * 0.5f64.ln()).abs() < 1e-6);
        assert!(acc.at_most_recip(1_000_000));
    }

    #[test]
    fn oracle_cauchy_simple_series() {
        let zero = oracle_cauchy_modulus(|_| 0.0, 5, 100);
        assert!(zero.iter().all(|e| *e == OracleEntry::Found(0)));

        let geometric = oracle_cauchy_modulus(|i| 0.5f64.powi(i as i32 + 1), 0, 100);
        assert_eq!(geometric[0], OracleEntry::Found(0));

        let stuck = oracle_cauchy_modulus(|_| 1.0, 2, 100);
        assert!(stuck.iter().all(|e| *e == OracleEntry::Inconclusive));
    }

    #[test]
    fn oracle_product_simple() {
        let zero = oracle_product_rate(|_| 0.0, 4, 10);
        assert!(zero.iter().all(|e| *e == OracleEntry::Found(0)));
        let ones = oracle_product_rate(|_| 1.0, 1, 10);
        assert_eq!(ones[0], OracleEntry::Found(0));
        assert_eq!(ones[1], OracleEntry::Inconclusive);
    }

    #[test]
    fn validate_statuses() {
        let oracle = [
            OracleEntry::Found(3),
            OracleEntry::Found(5),
            OracleEntry::Inconclusive,
        ];
        let checks = validate_modulus(&RateFn::constant(4), &oracle);
        let statuses: Vec<_> = checks.iter().map(|c| c.status).collect();
        assert_eq!(
            statuses,
            [
                ModulusStatus::Pass,
                ModulusStatus::Fail,
                ModulusStatus::Inconclusive
            ]
        );
    }
}
