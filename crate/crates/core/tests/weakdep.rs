use proptest::prelude::*;

use spinlab::models::{ColoringParams, ErgmParams, HardCoreParams, VwErgmParams};
use spinlab::weakdep::{certify_analytic, certify_exact, exact_interdependence, tensorization_check};
use spinlab::{Graph, Model};

fn check_consistency(model: &Model) -> Result<(), TestCaseError> {
    let cond = model.condition();
    let e = model.system().enumerate().unwrap();
    let analytic = certify_analytic(model);
    prop_assert_eq!(analytic.is_ok(), cond.holds, "{}", cond.inequality);
    if let Ok(cert) = analytic {
        let (exact, j) = certify_exact(&e).unwrap();
        let aj = model.analytic_interdependence().to_matrix().unwrap();
        prop_assert!(j.dominated_by(&aj, 1e-12), "{} J not dominated", model.kind());
        prop_assert!(e.beta_tilde().unwrap() >= model.analytic_alpha1() - 1e-12);
        prop_assert!(exact.rho0 <= cert.rho0 + 1e-9);
        prop_assert!(j.norm_2to2().unwrap() <= j.norm_1to1() + 1e-12);
        let t = tensorization_check(&e, &exact, 20, 1).unwrap();
        prop_assert_eq!(t.violations, 0);
    }
    Ok(())
}

#[test]
fn hard_core_threshold_is_sharp_in_the_condition() {
    let g = Graph::from_spec("path:3").unwrap();
    let below = Model::HardCore(HardCoreParams::new(g.clone(), 0.99).unwrap());
    let at = Model::HardCore(HardCoreParams::new(g, 1.0).unwrap());
    assert!(below.condition().holds);
    assert!(!at.condition().holds);
    assert!(certify_analytic(&at).is_err());
}

#[test]
fn coloring_needs_more_than_twice_the_degree() {
    let g = Graph::from_spec("cycle:5").unwrap();
    assert!(certify_analytic(&Model::Coloring(ColoringParams::new(g.clone(), 4).unwrap())).is_err());
    let cert = certify_analytic(&Model::Coloring(ColoringParams::new(g, 5).unwrap())).unwrap();
    assert!(cert.alpha2 > 0.0 && cert.alpha2 <= 1.0);
}

#[test]
fn exact_j_is_zero_without_interaction() {
    let model = Model::Ergm(ErgmParams::erdos_renyi(4, 0.3).unwrap());
    let j = exact_interdependence(&model.system().enumerate().unwrap()).unwrap();
    assert!(j.norm_1to1() < 1e-12);
}

#[test]
fn vw_entries_agree_with_enumeration() {
    for (b1, b2, p) in [(0.2, -0.1, 0.4), (-0.5, 0.3, 0.6)] {
        let params = VwErgmParams::new(5, b1, b2, p).unwrap();
        let j = exact_interdependence(&params.system().enumerate().unwrap()).unwrap();
        let entry = params.exact_interdependence_entry();
        for i in 0..5 {
            for k in 0..5 {
                let expected = if i == k { 0.0 } else { entry };
                assert!((j.get(i, k) - expected).abs() < 1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hard_core_certificates(lambda in 0.01f64..1.5, graph in prop::sample::select(vec!["path:4", "cycle:5", "star:3", "grid:2x3"])) {
        let model = Model::HardCore(HardCoreParams::new(Graph::from_spec(graph).unwrap(), lambda).unwrap());
        check_consistency(&model)?;
    }

    #[test]
    fn coloring_certificates(k in 2usize..8, graph in prop::sample::select(vec!["path:3", "complete:2", "star:2"])) {
        let model = Model::Coloring(ColoringParams::new(Graph::from_spec(graph).unwrap(), k).unwrap());
        check_consistency(&model)?;
    }

    #[test]
    fn ergm_certificates(b1 in -1.0f64..1.0, b2 in -0.5f64..0.5) {
        let patterns = vec![Graph::from_spec("edge").unwrap(), Graph::from_spec("triangle").unwrap()];
        let model = Model::Ergm(ErgmParams::new(4, vec![b1, b2], patterns).unwrap());
        check_consistency(&model)?;
    }

    #[test]
    fn vw_certificates(b1 in -1.0f64..1.0, b2 in -1.0f64..1.0, p in 0.1f64..0.9, n in 3usize..7) {
        let model = Model::VwErgm(VwErgmParams::new(n, b1, b2, p).unwrap());
        check_consistency(&model)?;
    }
}
