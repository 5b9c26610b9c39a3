//! The Tikhonov–Mann family iteration
//!
//! ```text
//! u_n     = (1 - β_n) u + β_n x_n
//! x_{n+1} = (1 - λ_n) u_n + λ_n T_n u_n
//! ```
//!
//! the modified Halpern iteration
//!
//! ```text
//! v_n     = (1 - λ_n) y_n + λ_n T_n y_n
//! y_{n+1} = (1 - β_{n+1}) u + β_{n+1} v_n
//! ```
//!
//! and checks of the per-step inequalities every orbit must satisfy.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::WSpace;
use crate::mappings::MappingFamily;
use crate::sequences::ParamSchedule;

/// Largest horizon for which points are kept in memory.
pub const MAX_STORED_POINTS: u64 = 1_000_000;

/// Absolute tolerance used by the inequality checks unless overridden.
pub const DEFAULT_CHECK_TOL: f64 = 1e-9;

/// Relative slack added on top of the absolute tolerance, scaled by `M`.
pub const RELATIVE_SLACK: f64 = 1e-12;

pub struct ProblemInstance<S: WSpace> {
    pub space: S,
    pub family: Arc<dyn MappingFamily<S::Point>>,
    pub schedule: ParamSchedule,
    /// Anchor point `u`.
    pub anchor: S::Point,
    /// Starting point `x₀`.
    pub start: S::Point,
    /// Registered common fixed point `p`.
    pub fixed_point: S::Point,
    m: u64,
}

impl<S: WSpace> fmt::Debug for ProblemInstance<S>
where
    S: fmt::Debug,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemInstance")
            .field("space", &self.space)
            .field("family", &self.family)
            .field("anchor", &self.anchor)
            .field("start", &self.start)
            .field("fixed_point", &self.fixed_point)
            .field("m", &self.m)
            .finish()
    }
}

impl<S: WSpace> ProblemInstance<S> {
    /// Builds an instance with `M = ⌈max{d(x₀, p), d(u, p)}⌉`, raised to 1 when
    /// both distances vanish.
    ///
    /// `p` is not checked to be a common fixed point here; see
    /// [`crate::mappings::fixed_point_defect`].
    pub fn new(
        space: S,
        family: Arc<dyn MappingFamily<S::Point>>,
        schedule: ParamSchedule,
        anchor: S::Point,
        start: S::Point,
        fixed_point: S::Point,
    ) -> Result<Self> {
        for point in [&anchor, &start, &fixed_point] {
            space.validate(point)?;
        }
        let radius = space
            .dist(&start, &fixed_point)?
            .max(space.dist(&anchor, &fixed_point)?);
        let m = (radius.ceil() as u64).max(1);
        Ok(Self {
            space,
            family,
            schedule,
            anchor,
            start,
            fixed_point,
            m,
        })
    }

    /// Replaces `M` by a larger integer bound.
    pub fn with_m(mut self, m: u64) -> Result<Self> {
        let radius = self
            .space
            .dist(&self.start, &self.fixed_point)?
            .max(self.space.dist(&self.anchor, &self.fixed_point)?);
        if m == 0 || (m as f64) < radius {
            return Err(Error::Domain(format!(
                "M = {m} does not bound max(d(x0,p), d(u,p)) = {radius}"
            )));
        }
        self.m = m;
        Ok(self)
    }

    pub fn m(&self) -> u64 {
        self.m
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Keep `x_n` and `u_n`. Limited to horizons up to [`MAX_STORED_POINTS`].
    pub store_points: bool,
}

/// Recorded orbit of a Tikhonov–Mann run over `horizon` steps.
///
/// Sequences indexed by `n ∈ [0, horizon)` have `horizon` entries, sequences
/// over `x_0 ..= x_horizon` have `horizon + 1`.
#[derive(Debug, Clone)]
pub struct IterationTrace<P> {
    pub horizon: u64,
    pub x: Option<Vec<P>>,
    pub u_seq: Option<Vec<P>>,
    /// `d(x_n, x_{n+1})`
    pub residual_step: Vec<f64>,
    /// `d(x_n, T_n x_n)`
    pub residual_t: Vec<f64>,
    /// `d(T_{n+1} u_n, T_n u_n)`
    pub tfam_gap: Vec<f64>,
    /// `d(x_n, p)`, `horizon + 1` entries.
    pub dist_x_p: Vec<f64>,
    /// `d(x_n, u)`, `horizon + 1` entries.
    pub dist_x_u: Vec<f64>,
    /// `d(u_n, p)`
    pub dist_u_p: Vec<f64>,
    /// `d(u_n, T_n u_n)`
    pub dist_u_tu: Vec<f64>,
    /// `d(u_{n+1}, u_n)`, `horizon - 1` entries.
    pub u_step: Vec<f64>,
}

fn check_store(store: bool, horizon: u64) -> Result<()> {
    if store && horizon > MAX_STORED_POINTS {
        return Err(Error::Domain(format!(
            "storing points is limited to horizons up to {MAX_STORED_POINTS}, got {horizon}"
        )));
    }
    Ok(())
}

pub fn run_tikhonov_mann<S: WSpace>(
    instance: &ProblemInstance<S>,
    horizon: u64,
    options: RunOptions,
) -> Result<IterationTrace<S::Point>> {
    if horizon == 0 {
        return Err(Error::Domain("horizon must be at least 1".into()));
    }
    check_store(options.store_points, horizon)?;
    let sched = &instance.schedule;
    sched.check_covers(horizon - 1)?;
    let space = &instance.space;
    let family = &*instance.family;
    let (u, p) = (&instance.anchor, &instance.fixed_point);

    let h = horizon as usize;
    let mut trace = IterationTrace {
        horizon,
        x: options.store_points.then(|| Vec::with_capacity(h + 1)),
        u_seq: options.store_points.then(|| Vec::with_capacity(h)),
        residual_step: Vec::with_capacity(h),
        residual_t: Vec::with_capacity(h),
        tfam_gap: Vec::with_capacity(h),
        dist_x_p: Vec::with_capacity(h + 1),
        dist_x_u: Vec::with_capacity(h + 1),
        dist_u_p: Vec::with_capacity(h),
        dist_u_tu: Vec::with_capacity(h),
        u_step: Vec::with_capacity(h.saturating_sub(1)),
    };

    let mut x = instance.start.clone();
    let mut prev_u: Option<S::Point> = None;
    for n in 0..horizon {
        let u_n = space.combine(u, &x, sched.beta(n))?;
        let t_u = family.eval(n, &u_n)?;
        let x_next = space.combine(&u_n, &t_u, sched.lambda(n))?;
        let t_x = family.eval(n, &x)?;
        let t_next_u = family.eval(n + 1, &u_n)?;

        trace.residual_step.push(space.dist(&x, &x_next)?);
        trace.residual_t.push(space.dist(&x, &t_x)?);
        trace.tfam_gap.push(space.dist(&t_next_u, &t_u)?);
        trace.dist_x_p.push(space.dist(&x, p)?);
        trace.dist_x_u.push(space.dist(&x, u)?);
        trace.dist_u_p.push(space.dist(&u_n, p)?);
        trace.dist_u_tu.push(space.dist(&u_n, &t_u)?);
        if let Some(prev) = &prev_u {
            trace.u_step.push(space.dist(&u_n, prev)?);
        }

        if let Some(xs) = trace.x.as_mut() {
            xs.push(x);
        }
        if let Some(us) = trace.u_seq.as_mut() {
            us.push(u_n.clone());
        }
        prev_u = Some(u_n);
        x = x_next;
    }
    trace.dist_x_p.push(space.dist(&x, p)?);
    trace.dist_x_u.push(space.dist(&x, u)?);
    if let Some(xs) = trace.x.as_mut() {
        xs.push(x);
    }
    Ok(trace)
}

/// Orbit of the modified Halpern iteration started at
/// `y₀ = (1 - β₀) u + β₀ x₀`.
#[derive(Debug, Clone)]
pub struct HalpernTrace<P> {
    /// `y_0 ..= y_horizon`
    pub y: Vec<P>,
    /// `v_0 .. v_{horizon-1}`
    pub v: Vec<P>,
    /// `d(y_n, y_{n+1})`
    pub residual_step: Vec<f64>,
    /// `d(y_n, T_n y_n)`
    pub residual_t: Vec<f64>,
}

pub fn run_modified_halpern<S: WSpace>(
    instance: &ProblemInstance<S>,
    horizon: u64,
) -> Result<HalpernTrace<S::Point>> {
    if horizon == 0 {
        return Err(Error::Domain("horizon must be at least 1".into()));
    }
    check_store(true, horizon)?;
    let sched = &instance.schedule;
    sched.check_covers(horizon)?;
    let space = &instance.space;
    let family = &*instance.family;
    let u = &instance.anchor;

    let h = horizon as usize;
    let mut y = Vec::with_capacity(h + 1);
    let mut v = Vec::with_capacity(h);
    let mut residual_step = Vec::with_capacity(h);
    let mut residual_t = Vec::with_capacity(h);
    y.push(space.combine(u, &instance.start, sched.beta(0))?);
    for n in 0..horizon {
        let y_n = &y[n as usize];
        let t_y = family.eval(n, y_n)?;
        let v_n = space.combine(y_n, &t_y, sched.lambda(n))?;
        let y_next = space.combine(u, &v_n, sched.beta(n + 1))?;
        residual_step.push(space.dist(y_n, &y_next)?);
        residual_t.push(space.dist(y_n, &t_y)?);
        v.push(v_n);
        y.push(y_next);
    }
    Ok(HalpernTrace {
        y,
        v,
        residual_step,
        residual_t,
    })
}

/// Streaming comparison of the two iterations: `max d(u_n, y_n)` and
/// `max d(x_{n+1}, v_n)` over `n < horizon`, plus the Halpern residuals
/// `d(y_n, y_{n+1})`.
#[derive(Debug, Clone)]
pub struct HalpernComparison {
    pub max_u_gap: f64,
    pub max_x_gap: f64,
    pub halpern_residual_step: Vec<f64>,
}

pub fn compare_with_halpern<S: WSpace>(
    instance: &ProblemInstance<S>,
    horizon: u64,
) -> Result<HalpernComparison> {
    if horizon == 0 {
        return Err(Error::Domain("horizon must be at least 1".into()));
    }
    let sched = &instance.schedule;
    sched.check_covers(horizon)?;
    let space = &instance.space;
    let family = &*instance.family;
    let u = &instance.anchor;

    let mut out = HalpernComparison {
        max_u_gap: 0.0,
        max_x_gap: 0.0,
        halpern_residual_step: Vec::with_capacity(horizon as usize),
    };
    let mut x = instance.start.clone();
    let mut y = space.combine(u, &x, sched.beta(0))?;
    for n in 0..horizon {
        let u_n = space.combine(u, &x, sched.beta(n))?;
        let x_next = space.combine(&u_n, &family.eval(n, &u_n)?, sched.lambda(n))?;
        let v_n = space.combine(&y, &family.eval(n, &y)?, sched.lambda(n))?;
        let y_next = space.combine(u, &v_n, sched.beta(n + 1))?;

        out.max_u_gap = out.max_u_gap.max(space.dist(&u_n, &y)?);
        out.max_x_gap = out.max_x_gap.max(space.dist(&x_next, &v_n)?);
        out.halpern_residual_step.push(space.dist(&y, &y_next)?);
        x = x_next;
        y = y_next;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Inequality checks
// ---------------------------------------------------------------------------

/// Worst violation `lhs - rhs` of one inequality family along a trace.
#[derive(Debug, Clone)]
pub struct InequalityCheck {
    pub name: &'static str,
    pub checked: usize,
    pub max_violation: f64,
    /// First index whose violation exceeds the allowed slack.
    pub first_failure: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct InequalityReport {
    /// Allowed slack: absolute tolerance plus [`RELATIVE_SLACK`]` · M`.
    pub slack: f64,
    pub checks: Vec<InequalityCheck>,
}

impl InequalityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.first_failure.is_none())
    }

    pub fn check(&self, name: &str) -> Option<&InequalityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for InequalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = match c.first_failure {
                None => "ok".to_string(),
                Some(n) => format!("FAIL (first at n = {n})"),
            };
            writeln!(
                f,
                "  {:<28} {:>8} checks  max violation {:.3e}  {status}",
                c.name, c.checked, c.max_violation
            )?;
        }
        Ok(())
    }
}

struct Scan {
    check: InequalityCheck,
    slack: f64,
}

impl Scan {
    fn new(name: &'static str, slack: f64) -> Self {
        Self {
            check: InequalityCheck {
                name,
                checked: 0,
                max_violation: f64::NEG_INFINITY,
                first_failure: None,
            },
            slack,
        }
    }

    fn push(&mut self, n: u64, lhs: f64, rhs: f64) {
        let v = lhs - rhs;
        self.check.checked += 1;
        if v > self.check.max_violation || v.is_nan() {
            self.check.max_violation = if v.is_nan() { f64::INFINITY } else { v };
        }
        if self.check.first_failure.is_none() && !(v <= self.slack) {
            self.check.first_failure = Some(n);
        }
    }

    fn finish(mut self) -> InequalityCheck {
        if self.check.checked == 0 {
            self.check.max_violation = 0.0;
        }
        self.check
    }
}

fn slack_for(tol: f64, m: u64) -> f64 {
    tol + RELATIVE_SLACK * m as f64
}

/// Basic bounds along the orbit: `d(x_n, p) ≤ M`, `d(x_n, u) ≤ 2M`,
/// `d(u_n, p) ≤ M` and `d(u_n, T_n u_n) ≤ 2M`.
pub fn check_basic_bounds<S: WSpace>(
    instance: &ProblemInstance<S>,
    trace: &IterationTrace<S::Point>,
    tol: f64,
) -> InequalityReport {
    let m = instance.m() as f64;
    let slack = slack_for(tol, instance.m());
    let mut scans = [
        Scan::new("x_p_le_M", slack),
        Scan::new("x_u_le_2M", slack),
        Scan::new("u_p_le_M", slack),
        Scan::new("u_Tu_le_2M", slack),
    ];
    for (n, (&xp, &xu)) in trace.dist_x_p.iter().zip(&trace.dist_x_u).enumerate() {
        scans[0].push(n as u64, xp, m);
        scans[1].push(n as u64, xu, 2.0 * m);
    }
    for (n, (&up, &utu)) in trace.dist_u_p.iter().zip(&trace.dist_u_tu).enumerate() {
        scans[2].push(n as u64, up, m);
        scans[3].push(n as u64, utu, 2.0 * m);
    }
    InequalityReport {
        slack,
        checks: scans.into_iter().map(Scan::finish).collect(),
    }
}

/// The recursive inequalities along the orbit:
///
/// * `d(u_{n+1}, u_n) ≤ β_{n+1} d(x_{n+1}, x_n) + 2M|β_{n+1} - β_n|`
/// * `d(x_{n+2}, x_{n+1}) ≤ β_{n+1} d(x_{n+1}, x_n) + d(T_{n+1}u_n, T_n u_n)
///   + 2M(|λ_{n+1} - λ_n| + |β_{n+1} - β_n|)`
/// * `λ_n d(x_n, T_n x_n) ≤ d(x_n, x_{n+1}) + 2M(1 - β_n)`
pub fn check_recursive_inequalities<S: WSpace>(
    instance: &ProblemInstance<S>,
    trace: &IterationTrace<S::Point>,
    tol: f64,
) -> InequalityReport {
    let sched = &instance.schedule;
    let m = instance.m() as f64;
    let slack = slack_for(tol, instance.m());
    let mut a = Scan::new("u_step_recursion", slack);
    let mut b = Scan::new("x_step_recursion", slack);
    let mut c = Scan::new("lambda_residual_T", slack);

    for (n, &u_step) in trace.u_step.iter().enumerate() {
        let n64 = n as u64;
        let (beta_n, beta_next) = (sched.beta(n64), sched.beta(n64 + 1));
        let (lam_n, lam_next) = (sched.lambda(n64), sched.lambda(n64 + 1));
        let dbeta = (beta_next - beta_n).abs();
        a.push(
            n64,
            u_step,
            beta_next * trace.residual_step[n] + 2.0 * m * dbeta,
        );
        b.push(
            n64,
            trace.residual_step[n + 1],
            beta_next * trace.residual_step[n]
                + trace.tfam_gap[n]
                + 2.0 * m * ((lam_next - lam_n).abs() + dbeta),
        );
    }
    for (n, (&rt, &rs)) in trace
        .residual_t
        .iter()
        .zip(&trace.residual_step)
        .enumerate()
    {
        let n64 = n as u64;
        c.push(
            n64,
            sched.lambda(n64) * rt,
            rs + 2.0 * m * (1.0 - sched.beta(n64)),
        );
    }
    InequalityReport {
        slack,
        checks: vec![a.finish(), b.finish(), c.finish()],
    }
}

/// `d(x, T_m x)` for a stored iterate.
pub fn cross_index_residual<S: WSpace>(
    instance: &ProblemInstance<S>,
    x: &S::Point,
    m: u64,
) -> Result<f64> {
    instance.space.dist(x, &instance.family.eval(m, x)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Euclidean, StarPoint, StarTree};
    use crate::mappings::{
        BoxProjection, FamilyKind, FnFamily, Identity, ResolventL1, TreeContraction,
    };

    fn line_identity(x0: f64, u: f64, p: f64) -> ProblemInstance<Euclidean> {
        ProblemInstance::new(
            Euclidean::new(1),
            Arc::new(Identity),
            ParamSchedule::harmonic(0.5).unwrap(),
            vec![u],
            vec![x0],
            vec![p],
        )
        .unwrap()
    }

    #[test]
    fn m_is_integer_ceiling_at_least_one() {
        assert_eq!(line_identity(0.0, 0.0, 0.0).m(), 1);
        assert_eq!(line_identity(3.0, 0.0, 0.0).m(), 3);
        assert_eq!(line_identity(2.5, -0.5, 0.0).m(), 3);
        assert!(line_identity(3.0, 0.0, 0.0).with_m(2).is_err());
        assert_eq!(line_identity(3.0, 0.0, 0.0).with_m(7).unwrap().m(), 7);
    }

    #[test]
    fn identity_stationary_orbit() {
        let inst = line_identity(1.5, 1.5, 1.5);
        let trace = run_tikhonov_mann(&inst, 50, RunOptions { store_points: true }).unwrap();
        assert!(trace.residual_step.iter().all(|&r| r == 0.0));
        assert!(trace.x.as_ref().unwrap().iter().all(|x| x == &vec![1.5]));
        assert_eq!(trace.x.as_ref().unwrap().len(), 51);
        assert_eq!(trace.u_seq.as_ref().unwrap().len(), 50);
        assert_eq!(trace.residual_step.len(), 50);
        assert_eq!(trace.dist_x_p.len(), 51);
        assert_eq!(trace.u_step.len(), 49);
    }

    #[test]
    fn beta_zero_resets_to_anchor() {
        let inst = line_identity(1.0, 0.0, 0.0);
        let trace = run_tikhonov_mann(&inst, 3, RunOptions { store_points: true }).unwrap();
        assert_eq!(trace.u_seq.as_ref().unwrap()[0], vec![0.0]);
        assert_eq!(trace.x.as_ref().unwrap()[1], vec![0.0]);
    }

    #[test]
    fn horizon_and_storage_guards() {
        let inst = line_identity(1.0, 0.0, 0.0);
        assert!(run_tikhonov_mann(&inst, 0, RunOptions::default()).is_err());
        assert!(run_tikhonov_mann(
            &inst,
            MAX_STORED_POINTS + 1,
            RunOptions { store_points: true }
        )
        .is_err());

        let table = ParamSchedule::from_tables(vec![0.5; 4], vec![0.5; 4], None).unwrap();
        let inst = ProblemInstance::new(
            Euclidean::new(1),
            Arc::new(Identity),
            table,
            vec![0.0],
            vec![1.0],
            vec![0.0],
        )
        .unwrap();
        assert!(run_tikhonov_mann(&inst, 4, RunOptions::default()).is_ok());
        assert!(matches!(
            run_tikhonov_mann(&inst, 5, RunOptions::default()),
            Err(Error::ScheduleExhausted { .. })
        ));
    }

    #[test]
    fn basic_bounds_on_line() {
        let inst = line_identity(3.0, 0.0, 0.0);
        let trace = run_tikhonov_mann(&inst, 1000, RunOptions::default()).unwrap();
        assert!(trace.dist_x_p.iter().all(|&d| d <= 3.0));
        let report = check_basic_bounds(&inst, &trace, DEFAULT_CHECK_TOL);
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn non_fixed_anchor_point_breaks_basic_bounds() {
        // T_n x = x + 10 has no fixed point; registering p = 0 makes
        // d(u_n, T_n u_n) = 10 > 2M = 2.
        let shift = FnFamily::new("shift", FamilyKind::Custom, |_, x: &Vec<f64>| {
            Ok(vec![x[0] + 10.0])
        });
        let inst = ProblemInstance::new(
            Euclidean::new(1),
            Arc::new(shift),
            ParamSchedule::harmonic(0.5).unwrap(),
            vec![0.0],
            vec![1.0],
            vec![0.0],
        )
        .unwrap();
        let trace = run_tikhonov_mann(&inst, 20, RunOptions::default()).unwrap();
        let report = check_basic_bounds(&inst, &trace, DEFAULT_CHECK_TOL);
        assert!(!report.passed());
        assert_eq!(report.check("u_Tu_le_2M").unwrap().first_failure, Some(0));
    }

    #[test]
    fn recursive_inequalities_on_box_projection() {
        let bp = BoxProjection::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let inst = ProblemInstance::new(
            Euclidean::new(2),
            Arc::new(bp),
            ParamSchedule::harmonic(0.5).unwrap(),
            vec![2.0, 2.0],
            vec![-3.0, 1.0],
            vec![0.0, 0.0],
        )
        .unwrap();
        let trace = run_tikhonov_mann(&inst, 5_000, RunOptions::default()).unwrap();
        assert!(check_basic_bounds(&inst, &trace, DEFAULT_CHECK_TOL).passed());
        let report = check_recursive_inequalities(&inst, &trace, DEFAULT_CHECK_TOL);
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn halpern_matches_on_star_tree() {
        let tree = StarTree::new(3, 5.0).unwrap();
        let inst = ProblemInstance::new(
            tree,
            Arc::new(TreeContraction::new(0.5).unwrap()),
            ParamSchedule::harmonic(0.5).unwrap(),
            StarPoint::new(1, 2.0).unwrap(),
            StarPoint::new(2, 3.0).unwrap(),
            StarPoint::origin(),
        )
        .unwrap();
        let cmp = compare_with_halpern(&inst, 2_000).unwrap();
        assert!(cmp.max_u_gap <= 1e-9 && cmp.max_x_gap <= 1e-9, "{cmp:?}");

        let tm = run_tikhonov_mann(&inst, 200, RunOptions { store_points: true }).unwrap();
        let h = run_modified_halpern(&inst, 200).unwrap();
        let (xs, us) = (tm.x.unwrap(), tm.u_seq.unwrap());
        for n in 0..200 {
            assert!(inst.space.dist(&us[n], &h.y[n]).unwrap() <= 1e-9);
            assert!(inst.space.dist(&xs[n + 1], &h.v[n]).unwrap() <= 1e-9);
        }
        assert_eq!(h.residual_step, cmp.halpern_residual_step[..200]);
    }

    #[test]
    fn identity_halpern_is_stationary() {
        let inst = line_identity(0.7, 0.7, 0.0);
        let h = run_modified_halpern(&inst, 30).unwrap();
        assert!(h.y.iter().all(|y| y == &vec![0.7]));
    }

    #[test]
    fn resolvent_family_cross_index() {
        let gamma = ParamSchedule::linear(0.5).unwrap().gamma_fn().unwrap();
        let inst = ProblemInstance::new(
            Euclidean::new(1),
            Arc::new(ResolventL1::new(1.0, gamma).unwrap()),
            ParamSchedule::linear(0.5).unwrap(),
            vec![2.0],
            vec![-3.0],
            vec![0.0],
        )
        .unwrap();
        let trace = run_tikhonov_mann(&inst, 100, RunOptions { store_points: true }).unwrap();
        let xs = trace.x.as_ref().unwrap();
        assert_eq!(
            cross_index_residual(&inst, &xs[10], 10).unwrap(),
            trace.residual_t[10]
        );
    }
}
