//! Assembling an instance from a config, running it and writing artifacts.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tikmann::geometry::{check_w_axioms, SquaredWeightEuclidean};
use tikmann::iterate::{
    check_basic_bounds, check_recursive_inequalities, compare_with_halpern, run_tikhonov_mann,
};
use tikmann::mappings::{
    check_jp2_consequence, check_nonexpansive, fixed_point_defect, BoxProjection, Identity,
    PsdOperator, ResolventL1, ResolventQuadratic, TreeContraction,
};
use tikmann::rates::{
    certify_rate, chi_t_for_family, general_bundle, halpern_translate, linear_rates, CertStatus,
};
use tikmann::report::{write_certifications, write_rate_table, write_trace, Coordinates};
use tikmann::sequences::{Psi0Choice, ScheduleKind};
use tikmann::splitting::{
    tfb_instance, BoxNormalCone, CocoerciveOp, DiagonalQuadratic, ForwardBackwardFamily, L1Norm,
    MonotoneOp, ZeroCocoercive, ZeroMonotone,
};
use tikmann::{
    CertificationReport, Euclidean, MappingFamily, ParamSchedule, ProblemInstance, RateFn,
    RunOptions, StarPoint, StarTree, WSpace,
};

use crate::config::{
    CocoerciveSpec, ConfigError, ExperimentConfig, FamilySpec, MonotoneSpec, PointSpec, Psi0Spec,
    ScheduleSpec, SpaceSpec,
};

/// Largest index used by the sampled family checks.
const CHECK_INDEX_MAX: u64 = 1000;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid experiment: {0}")]
    Core(#[from] tikmann::Error),
    #[error("cannot write artifacts: {0}")]
    Io(#[from] std::io::Error),
}

impl ExperimentError {
    pub fn exit_code(&self) -> u8 {
        EXIT_CONFIG
    }
}

/// Pass/fail of one named property check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub m: u64,
    pub horizon: u64,
    pub checks: Vec<CheckOutcome>,
    pub certifications: Vec<CertificationReport>,
    /// Set when the schedule lacks the moduli needed for the rates.
    pub rates_note: Option<String>,
}

impl ExperimentOutcome {
    pub fn checks_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn count(&self, status: CertStatus) -> usize {
        self.certifications.iter().map(|r| r.count(status)).sum()
    }

    pub fn exit_code(&self) -> u8 {
        if self.checks_passed() && self.count(CertStatus::Fail) == 0 {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }
}

fn invalid(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::Config(ConfigError::Invalid(msg.into()))
}

pub fn build_schedule(spec: &ScheduleSpec) -> Result<ParamSchedule, ExperimentError> {
    let with_psi0 = |mut s: ParamSchedule, psi0: Psi0Spec| {
        match psi0 {
            Psi0Spec::Default => {}
            Psi0Spec::ChiShift => s.moduli.psi0 = Psi0Choice::ChiShift,
            Psi0Spec::Minimal => s.moduli.psi0 = Psi0Choice::Minimal,
        }
        s
    };
    Ok(match spec {
        ScheduleSpec::Harmonic { lambda, psi0 } => {
            with_psi0(ParamSchedule::harmonic(*lambda)?, *psi0)
        }
        ScheduleSpec::Linear { lambda, psi0 } => with_psi0(ParamSchedule::linear(*lambda)?, *psi0),
        ScheduleSpec::Table {
            beta,
            lambda,
            gamma,
        } => ParamSchedule::from_tables(beta.clone(), lambda.clone(), gamma.clone())?,
    })
}

fn vec_point(p: &PointSpec, what: &str) -> Result<Vec<f64>, ExperimentError> {
    match p {
        PointSpec::Coords(v) => Ok(v.clone()),
        PointSpec::Star { .. } => Err(invalid(format!("{what}: expected a coordinate array"))),
    }
}

fn star_point(p: &PointSpec, what: &str) -> Result<StarPoint, ExperimentError> {
    match p {
        PointSpec::Star { ray, t } => Ok(StarPoint::new(*ray, *t)?),
        PointSpec::Coords(_) => Err(invalid(format!("{what}: expected {{\"ray\", \"t\"}}"))),
    }
}

fn need_gamma(
    schedule: &ParamSchedule,
    family: &str,
) -> Result<tikmann::mappings::GammaFn, ExperimentError> {
    schedule
        .gamma_fn()
        .ok_or_else(|| invalid(format!("family {family} needs a schedule with gamma")))
}

fn monotone(spec: &MonotoneSpec) -> Result<Arc<dyn MonotoneOp>, ExperimentError> {
    Ok(match spec {
        MonotoneSpec::Zero => Arc::new(ZeroMonotone),
        MonotoneSpec::L1 { rho } => Arc::new(L1Norm::new(*rho)?),
        MonotoneSpec::Box { lo, hi } => {
            Arc::new(BoxNormalCone(BoxProjection::new(lo.clone(), hi.clone())?))
        }
        MonotoneSpec::LinearPsd { q } => Arc::new(PsdOperator::from_rows(q)?),
    })
}

fn cocoercive(spec: &CocoerciveSpec) -> Result<Arc<dyn CocoerciveOp>, ExperimentError> {
    Ok(match spec {
        CocoerciveSpec::Zero => Arc::new(ZeroCocoercive),
        CocoerciveSpec::Quadratic { diag, b } => {
            Arc::new(DiagonalQuadratic::new(diag.clone(), b.clone())?)
        }
    })
}

fn vec_family(
    spec: &FamilySpec,
    schedule: &ParamSchedule,
) -> Result<Arc<dyn MappingFamily<Vec<f64>>>, ExperimentError> {
    Ok(match spec {
        FamilySpec::Identity => Arc::new(Identity),
        FamilySpec::BoxProjection { lo, hi } => {
            Arc::new(BoxProjection::new(lo.clone(), hi.clone())?)
        }
        FamilySpec::ResolventL1 { rho } => {
            Arc::new(ResolventL1::new(*rho, need_gamma(schedule, spec.name())?)?)
        }
        FamilySpec::ResolventQuadratic { q } => Arc::new(ResolventQuadratic::from_rows(
            q,
            need_gamma(schedule, spec.name())?,
        )?),
        FamilySpec::ForwardBackward { a, b } => Arc::new(ForwardBackwardFamily::new(
            monotone(a)?,
            cocoercive(b)?,
            need_gamma(schedule, spec.name())?,
        )),
        FamilySpec::TreeContraction { .. } => {
            return Err(invalid("tree_contraction needs a star_tree space"))
        }
    })
}

fn star_family(spec: &FamilySpec) -> Result<Arc<dyn MappingFamily<StarPoint>>, ExperimentError> {
    Ok(match spec {
        FamilySpec::Identity => Arc::new(Identity),
        FamilySpec::TreeContraction { c } => Arc::new(TreeContraction::new(*c)?),
        other => {
            return Err(invalid(format!(
                "{} is not available on a star_tree space",
                other.name()
            )))
        }
    })
}

fn finish_instance<S: WSpace>(
    config: &ExperimentConfig,
    instance: ProblemInstance<S>,
) -> Result<ProblemInstance<S>, ExperimentError> {
    Ok(match config.m_override {
        Some(m) => instance.with_m(m)?,
        None => instance,
    })
}

/// Builds the instance described by `config` and runs it, writing artifacts
/// into `config.output_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome, ExperimentError> {
    config.validate()?;
    let schedule = build_schedule(&config.schedule)?;
    let (u, x0, p) = (&config.u, &config.x0, &config.p);
    match &config.space {
        SpaceSpec::Euclidean { dim, lo, hi } => {
            let space = Euclidean::new(*dim).with_box(*lo, *hi)?;
            let (u, x0, p) = (vec_point(u, "u")?, vec_point(x0, "x0")?, vec_point(p, "p")?);
            let instance = match &config.family {
                FamilySpec::ForwardBackward { a, b } => {
                    let inst = tfb_instance(
                        monotone(a)?,
                        cocoercive(b)?,
                        schedule,
                        u,
                        x0,
                        p,
                        config.horizon,
                    )?;
                    ProblemInstance::new(
                        space,
                        inst.family,
                        inst.schedule,
                        inst.anchor,
                        inst.start,
                        inst.fixed_point,
                    )?
                }
                spec => {
                    ProblemInstance::new(space, vec_family(spec, &schedule)?, schedule, u, x0, p)?
                }
            };
            execute(config, finish_instance(config, instance)?)
        }
        SpaceSpec::BrokenSquareLine { dim } => {
            let space = SquaredWeightEuclidean::new(Euclidean::new(*dim));
            let family = vec_family(&config.family, &schedule)?;
            let instance = ProblemInstance::new(
                space,
                family,
                schedule,
                vec_point(u, "u")?,
                vec_point(x0, "x0")?,
                vec_point(p, "p")?,
            )?;
            execute(config, finish_instance(config, instance)?)
        }
        SpaceSpec::StarTree { rays, radius } => {
            let space = StarTree::new(*rays, *radius)?;
            let family = star_family(&config.family)?;
            let instance = ProblemInstance::new(
                space,
                family,
                schedule,
                star_point(u, "u")?,
                star_point(x0, "x0")?,
                star_point(p, "p")?,
            )?;
            execute(config, finish_instance(config, instance)?)
        }
    }
}

/// Named rate columns of rates.csv; `None` leaves a column empty.
pub struct RateColumns {
    pub columns: Vec<(&'static str, Option<RateFn>)>,
    pub note: Option<String>,
}

impl RateColumns {
    pub fn get(&self, name: &str) -> Option<&RateFn> {
        self.columns
            .iter()
            .find(|(n, _)| *n == name)
            .and_then(|(_, r)| r.as_ref())
    }
}

pub const RATE_COLUMNS: [&str; 9] = [
    "chi_t",
    "chi",
    "psi0",
    "sigma",
    "sigma_t",
    "sigma_halpern",
    "linear_sigma",
    "linear_sigma_t",
    "linear_cross_index",
];

/// All rates for an instance, computed by the library's rate compositions.
pub fn rate_columns<P>(
    family: &dyn MappingFamily<P>,
    schedule: &ParamSchedule,
    m: u64,
    k_max: u64,
) -> RateColumns {
    let mut columns: Vec<(&'static str, Option<RateFn>)> =
        RATE_COLUMNS.iter().map(|&n| (n, None)).collect();
    let mut set = |name: &str, rate: RateFn| {
        if let Some(slot) = columns.iter_mut().find(|(n, _)| *n == name) {
            slot.1 = Some(rate);
        }
    };
    let mut note = None;
    match chi_t_for_family(family.kind(), family.declared_chi_t(), schedule, m)
        .and_then(|chi_t| general_bundle(schedule, &chi_t, m, k_max).map(|b| (chi_t, b)))
    {
        Ok((chi_t, bundle)) => {
            set("chi_t", chi_t);
            if let Some(chi) = bundle.chi {
                set("chi", chi);
            }
            if let Some(psi0) = bundle.psi0 {
                set("psi0", psi0);
            }
            if let Ok(sigma_conv) = schedule.moduli.sigma() {
                set(
                    "sigma_halpern",
                    halpern_translate(&bundle.sigma, sigma_conv, m),
                );
            }
            set("sigma", bundle.sigma);
            if let Some(st) = bundle.sigma_t {
                set("sigma_t", st);
            }
        }
        Err(e) => note = Some(format!("general rates unavailable: {e}")),
    }
    if let ScheduleKind::Linear { lambda } = schedule.kind() {
        if let Ok(lin) = linear_rates(m, lambda) {
            set("linear_sigma", lin.bundle.sigma);
            if let Some(st) = lin.bundle.sigma_t {
                set("linear_sigma_t", st);
            }
            set("linear_cross_index", lin.cross_index);
        }
    }
    RateColumns { columns, note }
}

fn check(name: &str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome {
        name: name.into(),
        passed,
        detail,
    }
}

fn execute<S>(
    config: &ExperimentConfig,
    instance: ProblemInstance<S>,
) -> Result<ExperimentOutcome, ExperimentError>
where
    S: WSpace,
    S::Point: Coordinates,
{
    let tol = config.tolerance;
    let horizon = config.horizon;
    let samples = config.check_samples;
    let m = instance.m();
    let family = &*instance.family;
    let space = &instance.space;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut checks = Vec::new();
    let mut text = String::new();

    let axioms = check_w_axioms(space, samples, tol, &mut rng)?;
    checks.push(check(
        "space_axioms",
        axioms.passed(),
        format!("{} failing", axioms.failures().count()),
    ));
    write!(text, "{axioms}").unwrap();

    let n_max = CHECK_INDEX_MAX.min(horizon);
    let nonexp = check_nonexpansive(family, space, samples, n_max, tol, &mut rng)?;
    checks.push(check(
        "nonexpansive",
        nonexp.passed(),
        format!("max excess {:e}", nonexp.max_excess),
    ));
    if family.kind().is_gamma_coherent() {
        if let Some(gamma) = instance.schedule.gamma_fn() {
            let jp2 = check_jp2_consequence(
                family,
                &*gamma,
                space,
                samples.div_ceil(10),
                10,
                n_max,
                tol,
                &mut rng,
            )?;
            checks.push(check(
                "family_coherence",
                jp2.passed(),
                format!("max violation {:e}", jp2.max_violation),
            ));
        }
    }
    let defect = fixed_point_defect(family, space, &instance.fixed_point, n_max)?;
    checks.push(check(
        "fixed_point",
        defect <= tol,
        format!("max d(T_n p, p) = {defect:e}"),
    ));

    let trace = run_tikhonov_mann(
        &instance,
        horizon,
        RunOptions {
            store_points: config.trace_points,
        },
    )?;
    let basic = check_basic_bounds(&instance, &trace, tol);
    let recursive = check_recursive_inequalities(&instance, &trace, tol);
    checks.push(check("basic_bounds", basic.passed(), String::new()));
    checks.push(check(
        "recursive_inequalities",
        recursive.passed(),
        String::new(),
    ));
    write!(
        text,
        "basic bounds\n{basic}recursive inequalities\n{recursive}"
    )
    .unwrap();

    let halpern_horizon = if instance.schedule.check_covers(horizon).is_ok() {
        horizon
    } else {
        horizon - 1
    };
    let halpern = if halpern_horizon > 0 {
        Some(compare_with_halpern(&instance, halpern_horizon)?)
    } else {
        None
    };
    if let Some(h) = &halpern {
        let gap = h.max_u_gap.max(h.max_x_gap);
        checks.push(check(
            "halpern_equivalence",
            gap <= tol,
            format!("max gap {gap:e}"),
        ));
    }

    let rates = rate_columns(family, &instance.schedule, m, config.k_max);
    let k_max = config.k_max;
    let mut certifications = Vec::new();
    let targets: [(&str, &str, Option<&[f64]>); 5] = [
        ("sigma", "residual_step", Some(&trace.residual_step)),
        ("sigma_t", "residual_T", Some(&trace.residual_t)),
        (
            "sigma_halpern",
            "halpern_residual_step",
            halpern.as_ref().map(|h| h.halpern_residual_step.as_slice()),
        ),
        ("linear_sigma", "residual_step", Some(&trace.residual_step)),
        ("linear_sigma_t", "residual_T", Some(&trace.residual_t)),
    ];
    for (rate_name, residual_name, residuals) in targets {
        if let (Some(rate), Some(res)) = (rates.get(rate_name), residuals) {
            let target = format!("{rate_name}:{residual_name}");
            certifications.push(certify_rate(
                target,
                res,
                rate,
                k_max,
                res.len() as u64,
                tol,
            ));
        }
    }

    let dir = &config.output_dir;
    fs::create_dir_all(dir)?;
    write_trace(&trace, BufWriter::new(File::create(dir.join("trace.csv"))?))?;
    let cols: Vec<(&str, Option<&RateFn>)> = rates
        .columns
        .iter()
        .map(|(n, r)| (*n, r.as_ref()))
        .collect();
    write_rate_table(
        &cols,
        k_max,
        BufWriter::new(File::create(dir.join("rates.csv"))?),
    )?;
    write_certifications(
        &certifications,
        BufWriter::new(File::create(dir.join("certification.csv"))?),
    )?;

    let outcome = ExperimentOutcome {
        m,
        horizon,
        checks,
        certifications,
        rates_note: rates.note,
    };
    write_report(config, &instance, &outcome, &text, &dir.join("report.txt"))?;
    Ok(outcome)
}

fn write_report<S: WSpace>(
    config: &ExperimentConfig,
    instance: &ProblemInstance<S>,
    outcome: &ExperimentOutcome,
    details: &str,
    path: &Path,
) -> Result<(), ExperimentError> {
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "space: {:?}", config.space).unwrap();
    writeln!(
        w,
        "family: {} ({:?})",
        instance.family.name(),
        instance.family.kind()
    )
    .unwrap();
    writeln!(w, "schedule: {:?}", config.schedule).unwrap();
    writeln!(
        w,
        "M = {}, horizon = {}, k_max = {}, tolerance = {:e}, seed = {}",
        outcome.m, outcome.horizon, config.k_max, config.tolerance, config.seed
    )
    .unwrap();
    writeln!(w).unwrap();
    writeln!(w, "checks").unwrap();
    for c in &outcome.checks {
        let status = if c.passed { "ok" } else { "FAIL" };
        writeln!(w, "  {:<24} {status:<5} {}", c.name, c.detail).unwrap();
    }
    writeln!(w).unwrap();
    w.push_str(details);
    writeln!(w).unwrap();
    if let Some(note) = &outcome.rates_note {
        writeln!(w, "{note}").unwrap();
    }
    for r in &outcome.certifications {
        write!(w, "{r}").unwrap();
    }
    writeln!(
        w,
        "\nverdict: {} ({} pass, {} fail, {} inconclusive)",
        if outcome.exit_code() == EXIT_PASS {
            "pass"
        } else {
            "FAIL"
        },
        outcome.count(CertStatus::Pass),
        outcome.count(CertStatus::Fail),
        outcome.count(CertStatus::Inconclusive)
    )
    .unwrap();
    fs::write(path, out)?;
    Ok(())
}
