//! Tikhonov forward-backward splitting with variable step size on `ℝⁿ`:
//!
//! ```text
//! u_n     = (1 - β_n) u + β_n x_n
//! x_{n+1} = (1 - λ_n) u_n + λ_n J_{γ_n A}(u_n - γ_n B u_n)
//! ```
//!
//! for a maximally monotone `A` with closed-form resolvent and a
//! `β`-cocoercive `B`, i.e. the family iteration with
//! `T_n = J_{γ_n A}(Id - γ_n B)`.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::Euclidean;
use crate::iterate::{run_tikhonov_mann, IterationTrace, ProblemInstance, RunOptions};
use crate::mappings::{
    chi_t_from_gamma, soft_threshold, BoxProjection, FamilyKind, GammaFn, MappingFamily,
    PsdOperator,
};
use crate::rates::{general_bundle, RateBundle};
use crate::sequences::ParamSchedule;

/// A maximally monotone operator `A` given through its resolvent.
pub trait MonotoneOp: Send + Sync {
    /// `J_{γA}(x) = (Id + γA)^{-1}(x)`.
    fn prox(&self, gamma: f64, x: &[f64]) -> Result<Vec<f64>>;
    fn name(&self) -> &str;
}

/// A single-valued `β`-cocoercive operator:
/// `⟨x - y, Bx - By⟩ ≥ β‖Bx - By‖²`.
pub trait CocoerciveOp: Send + Sync {
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>>;
    /// Cocoercivity constant; `f64::INFINITY` for the zero operator.
    fn beta(&self) -> f64;
    fn name(&self) -> &str;
}

/// `A = 0`; its resolvent is the identity.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroMonotone;

impl MonotoneOp for ZeroMonotone {
    fn prox(&self, _gamma: f64, x: &[f64]) -> Result<Vec<f64>> {
        Ok(x.to_vec())
    }
    fn name(&self) -> &str {
        "zero"
    }
}

/// `A = ρ ∂‖·‖₁`.
#[derive(Debug, Clone, Copy)]
pub struct L1Norm {
    rho: f64,
}

impl L1Norm {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho.is_finite() && rho >= 0.0) {
            return Err(Error::Domain(format!(
                "l1 weight {rho} must be nonnegative"
            )));
        }
        Ok(Self { rho })
    }
}

impl MonotoneOp for L1Norm {
    fn prox(&self, gamma: f64, x: &[f64]) -> Result<Vec<f64>> {
        Ok(x.iter()
            .map(|&v| soft_threshold(v, gamma * self.rho))
            .collect())
    }
    fn name(&self) -> &str {
        "l1"
    }
}

/// Normal cone of a box; every resolvent is the projection onto the box.
#[derive(Debug, Clone)]
pub struct BoxNormalCone(pub BoxProjection);

impl MonotoneOp for BoxNormalCone {
    fn prox(&self, _gamma: f64, x: &[f64]) -> Result<Vec<f64>> {
        self.0.project(x)
    }
    fn name(&self) -> &str {
        "box"
    }
}

impl MonotoneOp for PsdOperator {
    fn prox(&self, gamma: f64, x: &[f64]) -> Result<Vec<f64>> {
        self.resolve(gamma, x)
    }
    fn name(&self) -> &str {
        "linear_psd"
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroCocoercive;

impl CocoerciveOp for ZeroCocoercive {
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![0.0; x.len()])
    }
    fn beta(&self) -> f64 {
        f64::INFINITY
    }
    fn name(&self) -> &str {
        "zero"
    }
}

/// `B = ∇(½‖Dx - b‖²) = D(Dx - b)` for diagonal `D`. It is `1/L`-cocoercive
/// with `L = max dᵢ²`.
#[derive(Debug, Clone)]
pub struct DiagonalQuadratic {
    diag: Vec<f64>,
    b: Vec<f64>,
}

impl DiagonalQuadratic {
    pub fn new(diag: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if diag.len() != b.len() {
            return Err(Error::Shape {
                expected: diag.len(),
                found: b.len(),
            });
        }
        if diag.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::Domain(
                "quadratic coefficients must be finite".into(),
            ));
        }
        Ok(Self { diag, b })
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offset(&self) -> &[f64] {
        &self.b
    }
}

impl CocoerciveOp for DiagonalQuadratic {
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.diag.len() {
            return Err(Error::Shape {
                expected: self.diag.len(),
                found: x.len(),
            });
        }
        Ok(x.iter()
            .zip(self.diag.iter().zip(&self.b))
            .map(|(xi, (d, b))| d * (d * xi - b))
            .collect())
    }
    fn beta(&self) -> f64 {
        let lipschitz = self.diag.iter().map(|d| d * d).fold(0.0, f64::max);
        if lipschitz == 0.0 {
            f64::INFINITY
        } else {
            1.0 / lipschitz
        }
    }
    fn name(&self) -> &str {
        "quadratic"
    }
}

fn check_step(gamma: f64, beta: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 2.0 * beta {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "step size {gamma} must lie in (0, 2β) = (0, {})",
            2.0 * beta
        )))
    }
}

/// `J_{γA}(x - γBx)`, defined for `0 < γ < 2β`.
pub fn forward_backward_map(
    a: &dyn MonotoneOp,
    b: &dyn CocoerciveOp,
    gamma: f64,
    x: &[f64],
) -> Result<Vec<f64>> {
    check_step(gamma, b.beta())?;
    let bx = b.eval(x)?;
    let forward: Vec<f64> = x.iter().zip(&bx).map(|(xi, bi)| xi - gamma * bi).collect();
    a.prox(gamma, &forward)
}

/// The family `T_n = J_{γ_n A}(Id - γ_n B)`.
#[derive(Clone)]
pub struct ForwardBackwardFamily {
    a: Arc<dyn MonotoneOp>,
    b: Arc<dyn CocoerciveOp>,
    gamma: GammaFn,
}

impl ForwardBackwardFamily {
    pub fn new(a: Arc<dyn MonotoneOp>, b: Arc<dyn CocoerciveOp>, gamma: GammaFn) -> Self {
        Self { a, b, gamma }
    }
}

impl MappingFamily<Vec<f64>> for ForwardBackwardFamily {
    fn eval(&self, n: u64, x: &Vec<f64>) -> Result<Vec<f64>> {
        forward_backward_map(&*self.a, &*self.b, (self.gamma)(n), x)
    }
    fn kind(&self) -> FamilyKind {
        FamilyKind::Jp2WithGamma
    }
    fn name(&self) -> &str {
        "forward_backward"
    }
}

/// Builds the forward-backward problem instance after checking the step sizes
/// `γ_n ∈ (0, 2β)` and relaxations `λ_n ∈ (0, 1]` for `n ≤ horizon`.
pub fn tfb_instance(
    a: Arc<dyn MonotoneOp>,
    b: Arc<dyn CocoerciveOp>,
    schedule: ParamSchedule,
    u: Vec<f64>,
    x0: Vec<f64>,
    z: Vec<f64>,
    horizon: u64,
) -> Result<ProblemInstance<Euclidean>> {
    let gamma = schedule
        .gamma_fn()
        .ok_or_else(|| Error::Domain("forward-backward needs a step-size sequence gamma".into()))?;
    let beta = b.beta();
    for n in 0..=horizon {
        check_step(gamma(n), beta)?;
        let lam = schedule.lambda(n);
        if !(lam > 0.0 && lam <= 1.0) {
            return Err(Error::Domain(format!(
                "lambda_{n} = {lam} must lie in (0, 1]"
            )));
        }
    }
    let space = Euclidean::new(z.len());
    let family = Arc::new(ForwardBackwardFamily::new(a, b, gamma));
    ProblemInstance::new(space, family, schedule, u, x0, z)
}

/// Runs the Tikhonov forward-backward iteration; `z` is a registered zero of
/// `A + B`, used as the common fixed point for `M`.
pub fn run_tfb(
    a: Arc<dyn MonotoneOp>,
    b: Arc<dyn CocoerciveOp>,
    schedule: ParamSchedule,
    u: Vec<f64>,
    x0: Vec<f64>,
    z: Vec<f64>,
    horizon: u64,
) -> Result<(ProblemInstance<Euclidean>, IterationTrace<Vec<f64>>)> {
    let instance = tfb_instance(a, b, schedule, u, x0, z, horizon)?;
    let trace = run_tikhonov_mann(&instance, horizon, RunOptions::default())?;
    Ok((instance, trace))
}

/// Rates for the forward-backward iteration: `χ_T` from the step-size moduli
/// `χ_γ`, `(Γ, N_Γ)`, then `Σ` (and `Σ_T` when `σ` and the `λ` lower bound are
/// declared).
pub fn tfb_rates(schedule: &ParamSchedule, m: u64, k_max: u64) -> Result<RateBundle> {
    let moduli = &schedule.moduli;
    moduli.sigma_beta()?;
    moduli.chi_beta()?;
    moduli.chi_lambda()?;
    let bound = moduli.gamma_bound()?;
    let chi_t = chi_t_from_gamma(m, bound.cap, bound.from, moduli.chi_gamma()?);
    general_bundle(schedule, &chi_t, m, k_max)
}

/// Minimiser of `½‖Dx - b‖² + ρ‖x‖₁` for diagonal `D` with nonzero entries,
/// i.e. a zero of `ρ∂‖·‖₁ + D(D· - b)`.
pub fn diagonal_lasso_solution(diag: &[f64], b: &[f64], rho: f64) -> Result<Vec<f64>> {
    if diag.contains(&0.0) {
        return Err(Error::Domain("diagonal entries must be nonzero".into()));
    }
    Ok(diag
        .iter()
        .zip(b)
        .map(|(d, bi)| soft_threshold(d * bi, rho) / (d * d))
        .collect())
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn diff(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

fn sample_box<R: Rng + ?Sized>(dim: usize, radius: f64, rng: &mut R) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-radius..=radius)).collect()
}

/// `max (‖Jx - Jy‖² - ⟨x - y, Jx - Jy⟩)` over sampled pairs in `[-radius, radius]^dim`.
pub fn firm_nonexpansiveness_defect<R: Rng + ?Sized>(
    a: &dyn MonotoneOp,
    gamma: f64,
    dim: usize,
    radius: f64,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let x = sample_box(dim, radius, rng);
        let y = sample_box(dim, radius, rng);
        let dj = diff(&a.prox(gamma, &x)?, &a.prox(gamma, &y)?);
        worst = worst.max(dot(&dj, &dj) - dot(&diff(&x, &y), &dj));
    }
    Ok(worst)
}

/// `max (β‖Bx - By‖² - ⟨x - y, Bx - By⟩)` over sampled pairs.
pub fn cocoercivity_defect<R: Rng + ?Sized>(
    b: &dyn CocoerciveOp,
    dim: usize,
    radius: f64,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    let beta = b.beta();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let x = sample_box(dim, radius, rng);
        let y = sample_box(dim, radius, rng);
        let db = diff(&b.eval(&x)?, &b.eval(&y)?);
        let norm2 = dot(&db, &db);
        let lhs = if norm2 == 0.0 { 0.0 } else { beta * norm2 };
        worst = worst.max(lhs - dot(&diff(&x, &y), &db));
    }
    Ok(worst)
}
