//! Indexed families `(T_n)` of nonexpansive self-maps.
//!
//! Besides evaluation, a family carries a [`FamilyKind`] certificate that tells
//! the rate layer how to obtain the Cauchy modulus `χ_T` of
//! `Σ d(T_{n+1} u_n, T_n u_n)`:
//!
//! * constant families: `χ_T ≡ 0`;
//! * families satisfying `d(T_m x, T_n x) ≤ |γ_m - γ_n| / γ_n · d(T_n x, x)`
//!   (resolvents `J_{γ_n A}` among them): `χ_T` from [`chi_t_from_gamma`];
//! * custom families: a declared `χ_T`, validated a posteriori along a trace.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{StarPoint, WSpace};
use crate::sequences::RateFn;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// `T_n = T` for all `n`.
    Constant,
    /// Satisfies the γ-coherence inequality for the schedule's `(γ_n)`.
    Jp2WithGamma,
    /// `T_n = J_{γ_n A}` for a maximally monotone `A`; also γ-coherent.
    Resolvent,
    Custom,
}

impl FamilyKind {
    /// Whether the kind certifies the γ-coherence inequality.
    pub fn is_gamma_coherent(self) -> bool {
        matches!(self, FamilyKind::Jp2WithGamma | FamilyKind::Resolvent)
    }
}

pub type GammaFn = Arc<dyn Fn(u64) -> f64 + Send + Sync>;

pub trait MappingFamily<P>: Send + Sync {
    /// `T_n(x)`.
    fn eval(&self, n: u64, x: &P) -> Result<P>;

    fn kind(&self) -> FamilyKind;

    fn name(&self) -> &str;

    /// A declared Cauchy modulus for `Σ d(T_{n+1} u_n, T_n u_n)`, if any.
    fn declared_chi_t(&self) -> Option<RateFn> {
        None
    }
}

impl<P> fmt::Debug for dyn MappingFamily<P> + '_ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MappingFamily({}, {:?})", self.name(), self.kind())
    }
}

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl<P: Clone> MappingFamily<P> for Identity {
    fn eval(&self, _n: u64, x: &P) -> Result<P> {
        Ok(x.clone())
    }
    fn kind(&self) -> FamilyKind {
        FamilyKind::Constant
    }
    fn name(&self) -> &str {
        "identity"
    }
}

/// Metric projection onto the box `[lo, hi]` (componentwise clamp).
#[derive(Debug, Clone)]
pub struct BoxProjection {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxProjection {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::Shape {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if let Some(i) = (0..lo.len()).find(|&i| !(lo[i] <= hi[i])) {
            return Err(Error::Domain(format!(
                "box bound {i}: lo {} > hi {}",
                lo[i], hi[i]
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.lo.len() {
            return Err(Error::Shape {
                expected: self.lo.len(),
                found: x.len(),
            });
        }
        Ok(x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(v, (l, h))| v.clamp(*l, *h))
            .collect())
    }
}

impl MappingFamily<Vec<f64>> for BoxProjection {
    fn eval(&self, _n: u64, x: &Vec<f64>) -> Result<Vec<f64>> {
        self.project(x)
    }
    fn kind(&self) -> FamilyKind {
        FamilyKind::Constant
    }
    fn name(&self) -> &str {
        "box_projection"
    }
}

/// Radial contraction `(ray i, t) ↦ (ray i, c·t)` of a star tree toward its
/// origin.
#[derive(Debug, Clone, Copy)]
pub struct TreeContraction {
    c: f64,
}

impl TreeContraction {
    pub fn new(c: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::Domain(format!(
                "contraction factor {c} must lie in [0, 1]"
            )));
        }
        Ok(Self { c })
    }
}

impl MappingFamily<StarPoint> for TreeContraction {
    fn eval(&self, _n: u64, x: &StarPoint) -> Result<StarPoint> {
        StarPoint::new(x.ray(), self.c * x.t())
    }
    fn kind(&self) -> FamilyKind {
        FamilyKind::Constant
    }
    fn name(&self) -> &str {
        "tree_contraction"
    }
}

/// `sign(x) · max(|x| - threshold, 0)`.
pub fn soft_threshold(x: f64, threshold: f64) -> f64 {
    if x > threshold {
        x - threshold
    } else if x < -threshold {
        x + threshold
    } else {
        0.0
    }
}

/// `T_n = J_{γ_n A}` for `A = ρ ∂‖·‖₁`, i.e. componentwise soft thresholding at
/// `γ_n ρ`.
#[derive(Clone)]
pub struct ResolventL1 {
    rho: f64,
    gamma: GammaFn,
}

impl ResolventL1 {
    pub fn new(rho: f64, gamma: GammaFn) -> Result<Self> {
        if !(rho.is_finite() && rho >= 0.0) {
            return Err(Error::Domain(format!(
                "l1 weight {rho} must be nonnegative"
            )));
        }
        Ok(Self { rho, gamma })
    }
}

impl MappingFamily<Vec<f64>> for ResolventL1 {
    fn eval(&self, n: u64, x: &Vec<f64>) -> Result<Vec<f64>> {
        let thr = (self.gamma)(n) * self.rho;
        Ok(x.iter().map(|&v| soft_threshold(v, thr)).collect())
    }
    fn kind(&self) -> FamilyKind {
        FamilyKind::Resolvent
    }
    fn name(&self) -> &str {
        "resolvent_l1"
    }
}

/// A symmetric positive semidefinite matrix `Q`, viewed as the linear monotone
/// operator `x ↦ Qx`.
#[derive(Debug, Clone)]
pub struct PsdOperator {
    q: DMatrix<f64>,
}

impl PsdOperator {
    pub fn new(q: DMatrix<f64>) -> Result<Self> {
        if !q.is_square() {
            return Err(Error::Shape {
                expected: q.nrows(),
                found: q.ncols(),
            });
        }
        let scale = q.amax().max(1.0);
        if (&q - q.transpose()).amax() > 1e-12 * scale {
            return Err(Error::Domain("Q must be symmetric".into()));
        }
        let min_eig = SymmetricEigen::new(q.clone()).eigenvalues.min();
        if min_eig < -1e-12 * scale {
            return Err(Error::Domain(format!(
                "Q must be positive semidefinite (eigenvalue {min_eig})"
            )));
        }
        Ok(Self { q })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::Shape {
                expected: n,
                found: r.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        Ok((&self.q * DVector::from_column_slice(x))
            .iter()
            .copied()
            .collect())
    }

    /// `(I + γQ)^{-1} x`.
    pub fn resolve(&self, gamma: f64, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        let n = self.dim();
        let system = DMatrix::identity(n, n) + &self.q * gamma;
        let chol = system
            .cholesky()
            .ok_or_else(|| Error::Domain("I + γQ is not positive definite".into()))?;
        Ok(chol
            .solve(&DVector::from_column_slice(x))
            .iter()
            .copied()
            .collect())
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Shape {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }
}

/// `T_n = J_{γ_n Q} = (I + γ_n Q)^{-1}` for a symmetric positive semidefinite
/// matrix `Q`.
#[derive(Clone)]
pub struct ResolventQuadratic {
    op: PsdOperator,
    gamma: GammaFn,
}

impl ResolventQuadratic {
    pub fn new(op: PsdOperator, gamma: GammaFn) -> Self {
        Self { op, gamma }
    }

    pub fn from_rows(rows: &[Vec<f64>], gamma: GammaFn) -> Result<Self> {
        Ok(Self::new(PsdOperator::from_rows(rows)?, gamma))
    }
}

impl MappingFamily<Vec<f64>> for ResolventQuadratic {
    fn eval(&self, n: u64, x: &Vec<f64>) -> Result<Vec<f64>> {
        self.op.resolve((self.gamma)(n), x)
    }
    fn kind(&self) -> FamilyKind {
        FamilyKind::Resolvent
    }
    fn name(&self) -> &str {
        "resolvent_quadratic"
    }
}

type EvalFn<P> = Arc<dyn Fn(u64, &P) -> Result<P> + Send + Sync>;

/// A family given by a closure.
pub struct FnFamily<P> {
    name: String,
    kind: FamilyKind,
    eval: EvalFn<P>,
    chi_t: Option<RateFn>,
}

impl<P> FnFamily<P> {
    pub fn new(
        name: impl Into<String>,
        kind: FamilyKind,
        eval: impl Fn(u64, &P) -> Result<P> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            kind,
            eval: Arc::new(eval),
            chi_t: None,
        }
    }

    pub fn with_chi_t(mut self, chi_t: RateFn) -> Self {
        self.chi_t = Some(chi_t);
        self
    }
}

impl<P> MappingFamily<P> for FnFamily<P> {
    fn eval(&self, n: u64, x: &P) -> Result<P> {
        (self.eval)(n, x)
    }
    fn kind(&self) -> FamilyKind {
        self.kind
    }
    fn name(&self) -> &str {
        &self.name
    }
    fn declared_chi_t(&self) -> Option<RateFn> {
        self.chi_t.clone()
    }
}

// ---------------------------------------------------------------------------
// Cauchy moduli for Σ d(T_{n+1}u_n, T_n u_n)
// ---------------------------------------------------------------------------

/// `χ_T(k) = max{N_Γ, χ_γ(2MΓ(k+1) - 1)}`.
pub fn chi_t_from_gamma(m: u64, gamma_cap: u64, n_gamma: u64, chi_gamma: &RateFn) -> RateFn {
    let chi_gamma = chi_gamma.clone();
    let scale = 2u64.saturating_mul(m).saturating_mul(gamma_cap);
    RateFn::new(move |k| n_gamma.max(chi_gamma.eval(scale.saturating_mul(k + 1) - 1)))
}

/// Constant families have `d(T_{n+1} u_n, T_n u_n) = 0`, so `χ_T ≡ 0`.
pub fn constant_family_chi_t() -> RateFn {
    RateFn::zero()
}

// ---------------------------------------------------------------------------
// Empirical checks
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct NonexpansiveReport {
    pub samples: usize,
    pub tol: f64,
    /// `max d(T_n x, T_n y) - d(x, y)` over the samples (may be negative).
    pub max_excess: f64,
    pub worst_index: u64,
}

impl NonexpansiveReport {
    pub fn passed(&self) -> bool {
        self.max_excess <= self.tol
    }
}

/// Samples `(n, x, y)` with `n ≤ n_max` and records the worst expansion.
pub fn check_nonexpansive<S, R>(
    family: &dyn MappingFamily<S::Point>,
    space: &S,
    samples: usize,
    n_max: u64,
    tol: f64,
    rng: &mut R,
) -> Result<NonexpansiveReport>
where
    S: WSpace,
    R: Rng + ?Sized,
{
    let mut report = NonexpansiveReport {
        samples,
        tol,
        max_excess: f64::NEG_INFINITY,
        worst_index: 0,
    };
    for _ in 0..samples {
        let n = rng.gen_range(0..=n_max);
        let x = space.sample_point(rng);
        let y = space.sample_point(rng);
        let excess =
            space.dist(&family.eval(n, &x)?, &family.eval(n, &y)?)? - space.dist(&x, &y)?;
        if excess > report.max_excess || excess.is_nan() {
            report.max_excess = if excess.is_nan() {
                f64::INFINITY
            } else {
                excess
            };
            report.worst_index = n;
        }
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct Jp2Report {
    pub checks: usize,
    pub tol: f64,
    /// `max d(T_m x, T_n x) - |γ_m - γ_n|/γ_n · d(T_n x, x)`.
    pub max_violation: f64,
    pub worst_pair: (u64, u64),
}

impl Jp2Report {
    pub fn passed(&self) -> bool {
        self.max_violation <= self.tol
    }
}

/// Checks `d(T_m x, T_n x) ≤ |γ_m - γ_n| / γ_n · d(T_n x, x)` on `samples`
/// random points, each with `index_pairs` random pairs `(m, n)` drawn from
/// `0..=n_max` and tested in both orders.
#[allow(clippy::too_many_arguments)]
pub fn check_jp2_consequence<S, R>(
    family: &dyn MappingFamily<S::Point>,
    gamma: &dyn Fn(u64) -> f64,
    space: &S,
    samples: usize,
    index_pairs: usize,
    n_max: u64,
    tol: f64,
    rng: &mut R,
) -> Result<Jp2Report>
where
    S: WSpace,
    R: Rng + ?Sized,
{
    let mut report = Jp2Report {
        checks: 0,
        tol,
        max_violation: f64::NEG_INFINITY,
        worst_pair: (0, 0),
    };
    for _ in 0..samples {
        let x = space.sample_point(rng);
        for _ in 0..index_pairs {
            let a = rng.gen_range(0..=n_max);
            let b = rng.gen_range(0..=n_max);
            let ta = family.eval(a, &x)?;
            let tb = family.eval(b, &x)?;
            let gap = space.dist(&ta, &tb)?;
            for (m, n, tn) in [(a, b, &tb), (b, a, &ta)] {
                let (gm, gn) = (gamma(m), gamma(n));
                let rhs = (gm - gn).abs() / gn * space.dist(tn, &x)?;
                let v = gap - rhs;
                report.checks += 1;
                if v > report.max_violation || v.is_nan() {
                    report.max_violation = if v.is_nan() { f64::INFINITY } else { v };
                    report.worst_pair = (m, n);
                }
            }
        }
    }
    Ok(report)
}

/// `max_{n ≤ n_max} d(T_n p, p)`.
pub fn fixed_point_defect<S: WSpace>(
    family: &dyn MappingFamily<S::Point>,
    space: &S,
    p: &S::Point,
    n_max: u64,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for n in 0..=n_max {
        worst = worst.max(space.dist(&family.eval(n, p)?, p)?);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Euclidean, StarTree};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn harmonic_gamma() -> GammaFn {
        Arc::new(|n| 1.0 + 1.0 / (n as f64 + 1.0))
    }

    /// Solves `y + γ ∂|y| ∋ x` on ℝ by trying each branch of the subdifferential.
    fn l1_resolvent_by_cases(x: f64, gamma: f64) -> f64 {
        // y > 0: y + γ = x;  y < 0: y - γ = x;  y = 0: |x| ≤ γ.
        if x - gamma > 0.0 {
            x - gamma
        } else if x + gamma < 0.0 {
            x + gamma
        } else {
            assert!(x.abs() <= gamma);
            0.0
        }
    }

    #[test]
    fn basic_evaluations() {
        let id: &dyn MappingFamily<Vec<f64>> = &Identity;
        assert_eq!(id.eval(17, &vec![1.0, -2.0]).unwrap(), vec![1.0, -2.0]);

        let tc = TreeContraction::new(0.5).unwrap();
        assert_eq!(
            tc.eval(0, &StarPoint::new(1, 4.0).unwrap()).unwrap(),
            StarPoint::new(1, 2.0).unwrap()
        );
        assert!(TreeContraction::new(1.5).is_err());

        let r = ResolventL1::new(1.0, harmonic_gamma()).unwrap();
        assert_eq!(
            r.eval(0, &vec![2.0]).unwrap(),
            vec![l1_resolvent_by_cases(2.0, 2.0)]
        );
        assert_eq!(r.eval(0, &vec![2.0]).unwrap(), vec![0.0]);
        for &x in &[-3.5, -1.0, 0.2, 1.9, 7.25] {
            for n in 0..5 {
                let g = 1.0 + 1.0 / (n as f64 + 1.0);
                assert_eq!(r.eval(n, &vec![x]).unwrap()[0], l1_resolvent_by_cases(x, g));
            }
        }
    }

    #[test]
    fn quadratic_resolvent_solves_linear_system() {
        let q = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let r = ResolventQuadratic::from_rows(&q, harmonic_gamma()).unwrap();
        let x = vec![3.0, -1.0];
        let y = r.eval(1, &x).unwrap();
        // (I + γQ) y = x with γ_1 = 1.5
        let g = 1.5;
        let back = [
            y[0] + g * (2.0 * y[0] + y[1]),
            y[1] + g * (y[0] + 2.0 * y[1]),
        ];
        assert!((back[0] - x[0]).abs() < 1e-12 && (back[1] - x[1]).abs() < 1e-12);

        assert!(
            ResolventQuadratic::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]], harmonic_gamma())
                .is_err()
        );
        assert!(ResolventQuadratic::from_rows(&[vec![-1.0]], harmonic_gamma()).is_err());
    }

    #[test]
    fn resolvents_fix_zeros_of_the_operator() {
        let l1 = ResolventL1::new(1.0, harmonic_gamma()).unwrap();
        let q = ResolventQuadratic::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]], harmonic_gamma())
            .unwrap();
        let space = Euclidean::new(2);
        assert_eq!(
            fixed_point_defect(&l1, &space, &vec![0.0, 0.0], 100).unwrap(),
            0.0
        );
        // ker Q = span(e₂)
        assert!(fixed_point_defect(&q, &space, &vec![0.0, 3.0], 100).unwrap() < 1e-12);
    }

    #[test]
    fn nonexpansive_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let plane = Euclidean::new(2).with_box(-3.0, 3.0).unwrap();
        let id = check_nonexpansive(&Identity, &plane, 200, 10, 1e-12, &mut rng).unwrap();
        assert_eq!(id.max_excess, 0.0);
        assert!(id.passed());

        let bp = BoxProjection::new(vec![-1.0, 0.0], vec![1.0, 2.0]).unwrap();
        assert!(check_nonexpansive(&bp, &plane, 500, 0, 1e-12, &mut rng)
            .unwrap()
            .passed());

        let line = Euclidean::new(1).with_box(-3.0, 3.0).unwrap();
        let double = FnFamily::new("double", FamilyKind::Custom, |_, x: &Vec<f64>| {
            Ok(vec![2.0 * x[0]])
        });
        let r = check_nonexpansive(&double, &line, 200, 0, 1e-12, &mut rng).unwrap();
        assert!(!r.passed());
        assert!(r.max_excess > 1.0);

        let tree = StarTree::new(3, 4.0).unwrap();
        let tc = TreeContraction::new(0.3).unwrap();
        assert!(check_nonexpansive(&tc, &tree, 500, 0, 1e-12, &mut rng)
            .unwrap()
            .passed());
    }

    #[test]
    fn jp2_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = harmonic_gamma();
        let plane = Euclidean::new(2).with_box(-4.0, 4.0).unwrap();

        let bp = BoxProjection::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert!(
            check_jp2_consequence(&bp, &*g, &plane, 100, 5, 50, 1e-12, &mut rng)
                .unwrap()
                .passed()
        );

        let l1 = ResolventL1::new(1.0, g.clone()).unwrap();
        let r = check_jp2_consequence(&l1, &*g, &plane, 300, 5, 50, 1e-12, &mut rng).unwrap();
        assert!(r.passed(), "{r:?}");

        let q =
            ResolventQuadratic::from_rows(&[vec![3.0, 1.0], vec![1.0, 0.5]], g.clone()).unwrap();
        let r = check_jp2_consequence(&q, &*g, &plane, 300, 5, 50, 1e-12, &mut rng).unwrap();
        assert!(r.passed(), "{r:?}");

        let rotation = FnFamily::new("rotation", FamilyKind::Custom, |n, x: &Vec<f64>| {
            let a = 1.0 / (n as f64 + 1.0);
            Ok(vec![
                a.cos() * x[0] - a.sin() * x[1],
                a.sin() * x[0] + a.cos() * x[1],
            ])
        });
        let r = check_jp2_consequence(&rotation, &*g, &plane, 100, 5, 50, 1e-12, &mut rng).unwrap();
        assert!(!r.passed());
        assert!(r.max_violation > 0.0);
    }

    #[test]
    fn chi_t_compositions() {
        let chi_t = chi_t_from_gamma(1, 1, 0, &RateFn::identity());
        assert_eq!(chi_t.eval(0), 1);
        assert_eq!(chi_t.eval(4), 2 * 5 - 1);
        assert_eq!(chi_t_from_gamma(3, 1, 0, &RateFn::identity()).eval(0), 5);
        assert_eq!(
            chi_t_from_gamma(3, 1, 100, &RateFn::identity()).eval(0),
            100
        );
        assert_eq!(constant_family_chi_t().table(10), vec![0; 11]);
    }
}
