//! W-hyperbolic spaces: a metric `d` together with a convex-combination map
//! `W(x, y, λ)`, written `(1 - λ)x + λy`.
//!
//! Two concrete instances ship with the crate:
//!
//! * [`Euclidean`]: `ℝⁿ` with the norm distance and affine combinations;
//! * [`StarTree`]: a star-shaped R-tree, i.e. finitely many copies of
//!   `[0, ∞)` glued at their origin, with the path metric and geodesic
//!   combinations.
//!
//! [`SquaredWeightEuclidean`] is a deliberately broken fixture (it interpolates
//! with weight `λ²`) used to exercise the failure path of [`check_w_axioms`].

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

pub const DEFAULT_AXIOM_TOL: f64 = 1e-9;

/// A metric space equipped with a convex-combination map.
pub trait WSpace {
    type Point: Clone + fmt::Debug + PartialEq;

    /// Checks that `x` is a well-formed point of this space.
    fn validate(&self, x: &Self::Point) -> Result<()>;

    fn dist(&self, x: &Self::Point, y: &Self::Point) -> Result<f64>;

    /// `W(x, y, λ)`, the point `(1 - λ)x + λy`.
    fn combine(&self, x: &Self::Point, y: &Self::Point, lambda: f64) -> Result<Self::Point>;

    /// Draws a point uniformly from the configured bounded sampling region.
    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Point;
}

pub(crate) fn check_unit_interval(name: &str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {value} is outside [0, 1]")))
    }
}

// ---------------------------------------------------------------------------
// Euclidean space
// ---------------------------------------------------------------------------

/// `ℝⁿ` with the Euclidean norm. Points are plain coordinate vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Euclidean {
    dim: usize,
    lo: f64,
    hi: f64,
}

impl Euclidean {
    /// `ℝ^dim`, sampling uniformly from the box `[-1, 1]^dim`.
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            lo: -1.0,
            hi: 1.0,
        }
    }

    /// Sets the sampling box to `[lo, hi]^dim`.
    pub fn with_box(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Domain(format!("invalid sampling box [{lo}, {hi}]")));
        }
        self.lo = lo;
        self.hi = hi;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_shape(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Shape {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }
}

pub fn euclidean_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn euclidean_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

impl WSpace for Euclidean {
    type Point = Vec<f64>;

    fn validate(&self, x: &Vec<f64>) -> Result<()> {
        self.check_shape(x)?;
        if x.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidPoint(format!(
                "non-finite coordinate in {x:?}"
            )))
        }
    }

    fn dist(&self, x: &Vec<f64>, y: &Vec<f64>) -> Result<f64> {
        self.check_shape(x)?;
        self.check_shape(y)?;
        Ok(euclidean_dist(x, y))
    }

    fn combine(&self, x: &Vec<f64>, y: &Vec<f64>, lambda: f64) -> Result<Vec<f64>> {
        check_unit_interval("lambda", lambda)?;
        self.check_shape(x)?;
        self.check_shape(y)?;
        Ok(x.iter()
            .zip(y)
            .map(|(a, b)| (1.0 - lambda) * a + lambda * b)
            .collect())
    }

    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.dim)
            .map(|_| rng.gen_range(self.lo..=self.hi))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Star-shaped R-tree
// ---------------------------------------------------------------------------

/// A point of a star tree: distance `t` from the gluing point along ray `ray`.
///
/// The gluing point is a single point of the space, so it is stored in the
/// canonical form `(ray 0, t = 0)` whatever ray it was constructed on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarPoint {
    ray: usize,
    t: f64,
}

impl StarPoint {
    pub fn new(ray: usize, t: f64) -> Result<Self> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidPoint(format!(
                "radial coordinate {t} must be finite and >= 0"
            )));
        }
        Ok(Self::canonical(ray, t))
    }

    pub const fn origin() -> Self {
        Self { ray: 0, t: 0.0 }
    }

    fn canonical(ray: usize, t: f64) -> Self {
        if t == 0.0 {
            Self::origin()
        } else {
            Self { ray, t }
        }
    }

    pub fn ray(&self) -> usize {
        self.ray
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn is_origin(&self) -> bool {
        self.t == 0.0
    }
}

/// Star tree with `rays` branches; points are sampled with `t ∈ [0, radius]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StarTree {
    rays: usize,
    radius: f64,
}

impl StarTree {
    pub fn new(rays: usize, radius: f64) -> Result<Self> {
        if rays == 0 {
            return Err(Error::Domain("a star tree needs at least one ray".into()));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Domain(format!(
                "sampling radius {radius} must be positive"
            )));
        }
        Ok(Self { rays, radius })
    }

    pub fn rays(&self) -> usize {
        self.rays
    }
}

impl WSpace for StarTree {
    type Point = StarPoint;

    fn validate(&self, x: &StarPoint) -> Result<()> {
        if x.ray >= self.rays {
            return Err(Error::InvalidPoint(format!(
                "ray index {} out of range for a tree with {} rays",
                x.ray, self.rays
            )));
        }
        if !(x.t.is_finite() && x.t >= 0.0) {
            return Err(Error::InvalidPoint(format!(
                "radial coordinate {} must be finite and >= 0",
                x.t
            )));
        }
        Ok(())
    }

    fn dist(&self, x: &StarPoint, y: &StarPoint) -> Result<f64> {
        self.validate(x)?;
        self.validate(y)?;
        Ok(if x.ray == y.ray {
            (x.t - y.t).abs()
        } else {
            x.t + y.t
        })
    }

    fn combine(&self, x: &StarPoint, y: &StarPoint, lambda: f64) -> Result<StarPoint> {
        check_unit_interval("lambda", lambda)?;
        self.validate(x)?;
        self.validate(y)?;
        if x.ray == y.ray {
            return Ok(StarPoint::canonical(
                x.ray,
                (1.0 - lambda) * x.t + lambda * y.t,
            ));
        }
        // The geodesic runs from x down to the origin and then up ray y.
        let walked = lambda * (x.t + y.t);
        Ok(if walked <= x.t {
            StarPoint::canonical(x.ray, x.t - walked)
        } else {
            StarPoint::canonical(y.ray, walked - x.t)
        })
    }

    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> StarPoint {
        let ray = rng.gen_range(0..self.rays);
        let t = rng.gen_range(0.0..=self.radius);
        StarPoint::canonical(ray, t)
    }
}

// ---------------------------------------------------------------------------
// Broken fixture
// ---------------------------------------------------------------------------

/// `ℝⁿ` whose combination uses weight `λ²` instead of `λ`. Not a W-space:
/// `d(W(x,y,λ), W(x,y,θ)) = |λ² - θ²| d(x, y)` breaks (W2).
#[derive(Debug, Clone, PartialEq)]
pub struct SquaredWeightEuclidean {
    inner: Euclidean,
}

impl SquaredWeightEuclidean {
    pub fn new(inner: Euclidean) -> Self {
        Self { inner }
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }
}

impl WSpace for SquaredWeightEuclidean {
    type Point = Vec<f64>;

    fn validate(&self, x: &Vec<f64>) -> Result<()> {
        self.inner.validate(x)
    }

    fn dist(&self, x: &Vec<f64>, y: &Vec<f64>) -> Result<f64> {
        self.inner.dist(x, y)
    }

    fn combine(&self, x: &Vec<f64>, y: &Vec<f64>, lambda: f64) -> Result<Vec<f64>> {
        check_unit_interval("lambda", lambda)?;
        self.inner.combine(x, y, lambda * lambda)
    }

    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.inner.sample_point(rng)
    }
}

// ---------------------------------------------------------------------------
// Axiom checks
// ---------------------------------------------------------------------------

/// The properties checked by [`check_w_axioms`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axiom {
    MetricIdentity,
    MetricSymmetry,
    Triangle,
    W1,
    W2,
    W3,
    W4,
    /// `d(x, W(x,y,λ)) = λ d(x,y)` and `d(y, W(x,y,λ)) = (1-λ) d(x,y)`.
    EndpointDistances,
    /// `d(W(x,z,λ), W(y,w,θ)) ≤ (1-λ)d(x,y) + λd(z,w) + |λ-θ|d(y,w)`.
    GeneralCombination,
    /// `d(W(x,z,λ), W(x,w,θ)) ≤ λd(z,w) + |λ-θ|d(x,w)`.
    CommonLeftEndpoint,
}

impl Axiom {
    pub const ALL: [Axiom; 10] = [
        Axiom::MetricIdentity,
        Axiom::MetricSymmetry,
        Axiom::Triangle,
        Axiom::W1,
        Axiom::W2,
        Axiom::W3,
        Axiom::W4,
        Axiom::EndpointDistances,
        Axiom::GeneralCombination,
        Axiom::CommonLeftEndpoint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::MetricIdentity => "metric_identity",
            Axiom::MetricSymmetry => "metric_symmetry",
            Axiom::Triangle => "triangle",
            Axiom::W1 => "W1",
            Axiom::W2 => "W2",
            Axiom::W3 => "W3",
            Axiom::W4 => "W4",
            Axiom::EndpointDistances => "endpoint_distances",
            Axiom::GeneralCombination => "general_combination",
            Axiom::CommonLeftEndpoint => "common_left_endpoint",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One sampled tuple for the axiom checks.
#[derive(Debug, Clone)]
pub struct AxiomSample<P> {
    pub x: P,
    pub y: P,
    pub z: P,
    pub w: P,
    pub lambda: f64,
    pub theta: f64,
}

/// Violation of every [`Axiom`] on one sample, in [`Axiom::ALL`] order.
///
/// Equalities report `|lhs - rhs|`, inequalities report `max(0, lhs - rhs)`.
pub fn sample_violations<S: WSpace>(space: &S, s: &AxiomSample<S::Point>) -> Result<[f64; 10]> {
    let d = |a: &S::Point, b: &S::Point| space.dist(a, b);
    let excess = |lhs: f64, rhs: f64| (lhs - rhs).max(0.0);
    let (x, y, z, w, lambda, theta) = (&s.x, &s.y, &s.z, &s.w, s.lambda, s.theta);

    let dxy = d(x, y)?;
    let dzx = d(z, x)?;
    let dzy = d(z, y)?;
    let dyw = d(y, w)?;
    let dzw = d(z, w)?;
    let dxw = d(x, w)?;

    let identity = d(x, x)?;
    let symmetry = (dxy - d(y, x)?).abs();
    let triangle = excess(d(x, z)?, dxy + dzy);

    let xy_l = space.combine(x, y, lambda)?;
    let xy_t = space.combine(x, y, theta)?;
    let w1 = excess(d(z, &xy_l)?, (1.0 - lambda) * dzx + lambda * dzy);
    let w2 = (d(&xy_l, &xy_t)? - (lambda - theta).abs() * dxy).abs();
    let w3 = d(&xy_l, &space.combine(y, x, 1.0 - lambda)?)?;
    let xz_l = space.combine(x, z, lambda)?;
    let yw_l = space.combine(y, w, lambda)?;
    let w4 = excess(d(&xz_l, &yw_l)?, (1.0 - lambda) * dxy + lambda * dzw);

    let endpoints = (d(x, &xy_l)? - lambda * dxy)
        .abs()
        .max((d(y, &xy_l)? - (1.0 - lambda) * dxy).abs());
    let yw_t = space.combine(y, w, theta)?;
    let general = excess(
        d(&xz_l, &yw_t)?,
        (1.0 - lambda) * dxy + lambda * dzw + (lambda - theta).abs() * dyw,
    );
    let xw_t = space.combine(x, w, theta)?;
    let common_left = excess(
        d(&xz_l, &xw_t)?,
        lambda * dzw + (lambda - theta).abs() * dxw,
    );

    Ok([
        identity,
        symmetry,
        triangle,
        w1,
        w2,
        w3,
        w4,
        endpoints,
        general,
        common_left,
    ])
}

#[derive(Debug, Clone)]
pub struct AxiomEntry {
    pub axiom: Axiom,
    pub max_violation: f64,
    /// Index of the sample attaining `max_violation`.
    pub worst_sample: usize,
}

#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub samples: usize,
    pub tol: f64,
    pub entries: Vec<AxiomEntry>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomEntry> {
        self.entries
            .iter()
            .filter(|e| !(e.max_violation <= self.tol))
    }

    pub fn max_violation(&self, axiom: Axiom) -> f64 {
        self.entries
            .iter()
            .find(|e| e.axiom == axiom)
            .map_or(0.0, |e| e.max_violation)
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "axiom check: {} samples, tol {:e}",
            self.samples, self.tol
        )?;
        for e in &self.entries {
            let status = if e.max_violation <= self.tol {
                "ok"
            } else {
                "FAIL"
            };
            writeln!(
                f,
                "  {:<22} max violation {:.3e}  {status}",
                e.axiom.name(),
                e.max_violation
            )?;
        }
        Ok(())
    }
}

/// Samples `samples` random tuples `(x, y, z, w, λ, θ)` and records the worst
/// violation of every axiom.
pub fn check_w_axioms<S: WSpace, R: Rng + ?Sized>(
    space: &S,
    samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<AxiomReport> {
    if samples == 0 {
        return Err(Error::Domain(
            "axiom check needs at least one sample".into(),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance {tol} must be positive")));
    }
    let mut entries: Vec<AxiomEntry> = Axiom::ALL
        .iter()
        .map(|&axiom| AxiomEntry {
            axiom,
            max_violation: 0.0,
            worst_sample: 0,
        })
        .collect();
    for i in 0..samples {
        let sample = AxiomSample {
            x: space.sample_point(rng),
            y: space.sample_point(rng),
            z: space.sample_point(rng),
            w: space.sample_point(rng),
            lambda: rng.gen_range(0.0..=1.0),
            theta: rng.gen_range(0.0..=1.0),
        };
        let violations = sample_violations(space, &sample)?;
        for (entry, v) in entries.iter_mut().zip(violations) {
            // NaN counts as the worst possible violation.
            if v > entry.max_violation || v.is_nan() {
                entry.max_violation = if v.is_nan() { f64::INFINITY } else { v };
                entry.worst_sample = i;
            }
        }
    }
    Ok(AxiomReport {
        samples,
        tol,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sp(ray: usize, t: f64) -> StarPoint {
        StarPoint::new(ray, t).unwrap()
    }

    #[test]
    fn euclidean_combine_and_dist() {
        let line = Euclidean::new(1);
        let m = line.combine(&vec![0.0], &vec![2.0], 0.25).unwrap();
        assert_eq!(m, vec![0.5]);
        assert_eq!(line.dist(&vec![0.0], &m).unwrap(), 0.25 * 2.0);

        let plane = Euclidean::new(2);
        assert_eq!(plane.dist(&vec![0.0, 0.0], &vec![3.0, 4.0]).unwrap(), 5.0);
    }

    #[test]
    fn euclidean_errors() {
        let plane = Euclidean::new(2);
        assert!(matches!(
            plane.dist(&vec![0.0], &vec![1.0, 2.0]),
            Err(Error::Shape {
                expected: 2,
                found: 1
            })
        ));
        assert!(matches!(
            plane.combine(&vec![0.0; 2], &vec![1.0; 2], 1.5),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            plane.combine(&vec![0.0; 2], &vec![1.0; 2], -0.1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            plane.combine(&vec![0.0; 2], &vec![1.0; 2], f64::NAN),
            Err(Error::Domain(_))
        ));
        assert!(plane.validate(&vec![f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn star_origin_is_canonical() {
        assert_eq!(sp(4, 0.0), StarPoint::origin());
        assert_eq!(sp(4, 0.0).ray(), 0);
        assert!(StarPoint::new(1, -1.0).is_err());
        assert!(StarPoint::new(1, f64::INFINITY).is_err());
    }

    #[test]
    fn star_dist() {
        let tree = StarTree::new(3, 5.0).unwrap();
        assert_eq!(tree.dist(&sp(1, 2.0), &sp(2, 1.0)).unwrap(), 3.0);
        assert_eq!(tree.dist(&sp(1, 2.0), &sp(1, 0.5)).unwrap(), 1.5);
        assert_eq!(tree.dist(&StarPoint::origin(), &sp(2, 1.0)).unwrap(), 1.0);
        assert!(tree.dist(&sp(3, 1.0), &sp(1, 1.0)).is_err());
    }

    #[test]
    fn star_combine_through_origin() {
        let tree = StarTree::new(3, 5.0).unwrap();
        let mid = tree.combine(&sp(1, 1.0), &sp(2, 1.0), 0.5).unwrap();
        assert_eq!(mid, StarPoint::origin());

        // Walk 1.5 units from (ray 1, 2) along the 3-unit geodesic to (ray 2, 1).
        let p = tree.combine(&sp(1, 2.0), &sp(2, 1.0), 0.5).unwrap();
        assert_eq!(p, sp(1, 0.5));
        let q = tree.combine(&sp(1, 2.0), &sp(2, 1.0), 0.9).unwrap();
        assert_eq!(q.ray(), 2);
        assert!((q.t() - (0.9 * 3.0 - 2.0)).abs() < 1e-15);
    }

    #[test]
    fn star_combine_same_ray_and_from_origin() {
        let tree = StarTree::new(3, 5.0).unwrap();
        assert_eq!(
            tree.combine(&sp(2, 1.0), &sp(2, 3.0), 0.5).unwrap(),
            sp(2, 2.0)
        );
        assert_eq!(
            tree.combine(&StarPoint::origin(), &sp(2, 4.0), 0.25)
                .unwrap(),
            sp(2, 1.0)
        );
        assert_eq!(
            tree.combine(&sp(2, 4.0), &StarPoint::origin(), 1.0)
                .unwrap(),
            StarPoint::origin()
        );
    }

    #[test]
    fn axioms_hold_on_shipped_spaces() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let space = Euclidean::new(3).with_box(-4.0, 4.0).unwrap();
        let report = check_w_axioms(&space, 2_000, DEFAULT_AXIOM_TOL, &mut rng).unwrap();
        assert!(report.passed(), "{report}");

        let tree = StarTree::new(4, 3.0).unwrap();
        let report = check_w_axioms(&tree, 2_000, DEFAULT_AXIOM_TOL, &mut rng).unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn squared_weight_breaks_w2_by_the_analytic_amount() {
        let space = SquaredWeightEuclidean::new(Euclidean::new(1));
        let sample = AxiomSample {
            x: vec![0.0],
            y: vec![2.0],
            z: vec![1.0],
            w: vec![-1.0],
            lambda: 0.5,
            theta: 0.0,
        };
        let v = sample_violations(&space, &sample).unwrap();
        let w2 = v[Axiom::ALL.iter().position(|a| *a == Axiom::W2).unwrap()];
        // |λ² - λ| d(x, y) = 0.25 * 2
        assert!((w2 - 0.5).abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let report = check_w_axioms(&space, 500, DEFAULT_AXIOM_TOL, &mut rng).unwrap();
        assert!(!report.passed());
        assert!(report.max_violation(Axiom::W2) > 0.1);
    }

    #[test]
    fn axiom_check_rejects_bad_arguments() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(check_w_axioms(&Euclidean::new(1), 0, 1e-9, &mut rng).is_err());
        assert!(check_w_axioms(&Euclidean::new(1), 5, 0.0, &mut rng).is_err());
    }
}
