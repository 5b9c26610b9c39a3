use std::sync::Arc;

use proptest::prelude::*;
use tikmann::geometry::{sample_violations, Axiom, AxiomSample};
use tikmann::iterate::compare_with_halpern;
use tikmann::mappings::{soft_threshold, BoxProjection, TreeContraction};
use tikmann::rates::{
    certify_rate, general_bundle, harmonic_closed_form, linear_rates, CertStatus,
};
use tikmann::sequences::{beta_product_ln, psi0};
use tikmann::{Euclidean, ParamSchedule, ProblemInstance, RateFn, StarPoint, StarTree, WSpace};

const TOL: f64 = 1e-9;

fn vec3() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0f64..50.0, 3)
}

fn star_point(rays: usize) -> impl Strategy<Value = StarPoint> {
    (0..rays, prop_oneof![Just(0.0), 0.0f64..20.0]).prop_map(|(r, t)| StarPoint::new(r, t).unwrap())
}

fn assert_axioms<S: WSpace>(space: &S, sample: AxiomSample<S::Point>) -> Result<(), TestCaseError> {
    let v = sample_violations(space, &sample).unwrap();
    for (axiom, viol) in Axiom::ALL.iter().zip(v) {
        prop_assert!(viol <= TOL, "{axiom} violated by {viol:e} on {sample:?}");
    }
    Ok(())
}

proptest! {
    #[test]
    fn euclidean_satisfies_axioms(x in vec3(), y in vec3(), z in vec3(), w in vec3(),
                                  lambda in 0.0f64..=1.0, theta in 0.0f64..=1.0) {
        // Distances up to ~170 so the absolute tolerance scales accordingly.
        let space = Euclidean::new(3);
        let v = sample_violations(&space, &AxiomSample { x, y, z, w, lambda, theta }).unwrap();
        prop_assert!(v.iter().all(|&e| e <= 1e-11 * 200.0), "{v:?}");
    }

    #[test]
    fn star_tree_satisfies_axioms(x in star_point(4), y in star_point(4), z in star_point(4), w in star_point(4),
                                  lambda in 0.0f64..=1.0, theta in 0.0f64..=1.0) {
        let space = StarTree::new(4, 20.0).unwrap();
        assert_axioms(&space, AxiomSample { x, y, z, w, lambda, theta })?;
    }

    #[test]
    fn star_combination_stays_on_geodesic(x in star_point(3), y in star_point(3), lambda in 0.0f64..=1.0) {
        let space = StarTree::new(3, 20.0).unwrap();
        let c = space.combine(&x, &y, lambda).unwrap();
        let dxy = space.dist(&x, &y).unwrap();
        prop_assert!((space.dist(&x, &c).unwrap() + space.dist(&c, &y).unwrap() - dxy).abs() <= TOL);
        if c.t() == 0.0 {
            prop_assert_eq!(c.ray(), 0);
        }
    }

    #[test]
    fn soft_threshold_solves_the_inclusion(x in -10.0f64..10.0, thr in 0.0f64..5.0) {
        // y = J(x) iff x - y ∈ thr·∂|y|.
        let y = soft_threshold(x, thr);
        let r = x - y;
        if y != 0.0 {
            prop_assert!((r - thr * y.signum()).abs() <= 1e-12);
        } else {
            prop_assert!(r.abs() <= thr + 1e-12);
        }
    }

    #[test]
    fn minimal_psi0_is_least(lambda in 0.05f64..0.95, k in 0u64..40, chi_a in 1u64..30) {
        let schedule = ParamSchedule::linear(lambda).unwrap();
        let chi = RateFn::affine(chi_a, 3);
        let p = psi0(&schedule, &chi, k).unwrap();
        let ln_prod = beta_product_ln(&schedule, chi.eval(3 * k + 2)).unwrap();
        prop_assert!(-(p as f64).ln() <= ln_prod + 1e-9);
        if p > 1 {
            prop_assert!(-((p - 1) as f64).ln() > ln_prod - 1e-9);
        }
    }

    #[test]
    fn certification_is_monotone_in_the_rate(
        residuals in prop::collection::vec(0.0f64..2.0, 1..200),
        a in 0u64..20, b in 0u64..20, bump in 0u64..10,
    ) {
        let rate = RateFn::affine(a, b);
        let larger = RateFn::affine(a, b + bump);
        let h = residuals.len() as u64;
        let base = certify_rate("r", &residuals, &rate, 8, h, TOL);
        let dom = certify_rate("r", &residuals, &larger, 8, h, TOL);
        for (r0, r1) in base.rows.iter().zip(&dom.rows) {
            if r0.status == CertStatus::Pass && r1.status != CertStatus::Inconclusive {
                prop_assert_eq!(r1.status, CertStatus::Pass);
            }
            prop_assert_eq!(r0.minimal_empirical_index, r1.minimal_empirical_index);
        }
    }

    #[test]
    fn composed_rates_match_closed_form(m in 1u64..=5, cap in 2u64..=5, k in 0u64..=50) {
        let schedule = ParamSchedule::harmonic(1.0 / cap as f64).unwrap();
        let chi_t = tikmann::mappings::constant_family_chi_t();
        let bundle = general_bundle(&schedule, &chi_t, m, 50).unwrap();
        let closed = harmonic_closed_form(m, cap);
        prop_assert_eq!(bundle.sigma.eval(k), closed.sigma.eval(k));
        prop_assert_eq!(bundle.sigma_t.unwrap().eval(k), closed.sigma_t.unwrap().eval(k));
    }

    #[test]
    fn linear_rates_imply_pointwise_bounds(m in 1u64..=20, lambda in 0.05f64..0.95, k in 0u64..1000) {
        let lr = linear_rates(m, lambda).unwrap();
        let bound = 1.0 / (k + 1) as f64;
        prop_assert!(lr.bounds.step(lr.bundle.sigma.eval(k)) <= bound + 1e-15);
        prop_assert!(lr.bounds.residual_t(lr.bundle.sigma_t.as_ref().unwrap().eval(k)) <= bound + 1e-15);
        prop_assert!(lr.bounds.cross_index(lr.cross_index.eval(k)) <= bound + 1e-15);
    }

    #[test]
    fn halpern_orbit_matches_on_the_line(u in -3.0f64..3.0, x0 in -3.0f64..3.0, lambda in 0.05f64..0.95) {
        let instance = ProblemInstance::new(
            Euclidean::new(1),
            Arc::new(BoxProjection::new(vec![-1.0], vec![1.0]).unwrap()),
            ParamSchedule::harmonic(lambda).unwrap(),
            vec![u],
            vec![x0],
            vec![0.0],
        ).unwrap();
        let cmp = compare_with_halpern(&instance, 300).unwrap();
        prop_assert!(cmp.max_u_gap <= TOL && cmp.max_x_gap <= TOL);
    }

    #[test]
    fn halpern_orbit_matches_on_the_tree(ray_u in 0usize..3, tu in 0.0f64..5.0, ray_x in 0usize..3, tx in 0.0f64..5.0) {
        let instance = ProblemInstance::new(
            StarTree::new(3, 5.0).unwrap(),
            Arc::new(TreeContraction::new(0.5).unwrap()),
            ParamSchedule::linear(0.5).unwrap(),
            StarPoint::new(ray_u, tu).unwrap(),
            StarPoint::new(ray_x, tx).unwrap(),
            StarPoint::origin(),
        ).unwrap();
        let cmp = compare_with_halpern(&instance, 300).unwrap();
        prop_assert!(cmp.max_u_gap <= TOL && cmp.max_x_gap <= TOL);
    }
}
