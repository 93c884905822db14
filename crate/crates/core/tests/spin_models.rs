use proptest::prelude::*;

use spinlab::models::ergm::{config_to_graph, graph_to_config, ErgmState};
use spinlab::models::homs::{count_injective_homs, kn_count};
use spinlab::models::{ColoringParams, ErgmParams, HardCoreParams};
use spinlab::{Configuration, Graph, Model, SpinSystem};

#[test]
fn graph_specs_parse() {
    assert_eq!(Graph::from_spec("complete:5").unwrap().num_edges(), 10);
    assert_eq!(Graph::from_spec("grid:2x3").unwrap().num_edges(), 7);
    assert_eq!(Graph::from_spec("star:4").unwrap().max_degree(), 4);
    assert_eq!(Graph::from_spec("triangle").unwrap().num_edges(), 3);
    assert!(Graph::from_spec("cycle:2").is_err());
    assert!(Graph::from_spec("moebius:3").is_err());
}

#[test]
fn hard_constraints_have_no_mass() {
    let params = HardCoreParams::new(Graph::from_spec("cycle:5").unwrap(), 1.3).unwrap();
    let e = params.system().enumerate().unwrap();
    assert_eq!(e.len(), 11);
    assert!((e.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    for k in 0..e.len() {
        assert!(params.is_admissible(e.config(k).as_slice()));
    }
    let coloring = ColoringParams::new(Graph::from_spec("path:3").unwrap(), 3).unwrap();
    let e = coloring.system().enumerate().unwrap();
    assert_eq!(e.len(), 12);
    assert!((e.minimal_probability() - 1.0 / 12.0).abs() < 1e-15);
}

#[test]
fn ergm_subgraph_counts_match_injective_homs() {
    let tri = Graph::from_spec("triangle").unwrap();
    let k4 = Graph::complete(4);
    assert_eq!(count_injective_homs(&tri, &k4), 24);
    assert!((kn_count(&tri, 6) - 120.0).abs() < 1e-12);
}

#[test]
fn models_report_shapes() {
    let m = Model::Ergm(ErgmParams::erdos_renyi(6, 0.2).unwrap());
    assert_eq!(m.num_sites(), 15);
    assert_eq!(m.num_spins(), 2);
    assert!(m.condition().holds);
}

proptest! {
    #[test]
    fn configuration_codes_round_trip(spins in 2usize..5, values in prop::collection::vec(0u8..4, 1..9)) {
        let values: Vec<u8> = values.into_iter().map(|v| v % spins as u8).collect();
        let x = Configuration::new(values.clone());
        let code = x.code(spins);
        prop_assert_eq!(Configuration::from_code(code, values.len(), spins), x);
    }

    #[test]
    fn ergm_derivative_matches_brute_force(code in 0usize..1 << 10, b1 in -1.0f64..1.0, b2 in -1.0f64..1.0, e in 0usize..10) {
        let patterns = vec![Graph::from_spec("edge").unwrap(), Graph::from_spec("triangle").unwrap(), Graph::from_spec("path:3").unwrap()];
        let params = ErgmParams::new(5, vec![b1, b2, 0.1], patterns).unwrap();
        let x: Vec<u8> = (0..10).map(|k| (code >> k & 1) as u8).collect();
        let fast = params.discrete_derivative(&x, e);
        let slow = params.discrete_derivative_bruteforce(&x, e);
        prop_assert!((fast - slow).abs() < 1e-9);
    }

    #[test]
    fn ergm_state_tracks_counts(edits in prop::collection::vec((0usize..6, 0usize..6, any::<bool>()), 0..40)) {
        let mut s = ErgmState::empty(6);
        for (u, v, on) in edits {
            if u != v {
                s.set(u, v, on);
            }
        }
        let x = s.to_config();
        let fresh = ErgmState::from_config(6, &x);
        prop_assert_eq!(fresh.triangle_count(), s.triangle_count());
        prop_assert_eq!(fresh.cherry_count(), s.cherry_count());
        prop_assert_eq!(graph_to_config(&config_to_graph(6, &x)), x);
    }

    #[test]
    fn uniform_system_is_flat(sites in 1usize..5, spins in 2usize..4) {
        let e = SpinSystem::uniform(sites, spins).enumerate().unwrap();
        let expected = (spins as f64).powi(sites as i32).recip();
        prop_assert!(e.probabilities().iter().all(|p| (p - expected).abs() < 1e-14));
        prop_assert!((e.beta_tilde().unwrap() - 1.0 / spins as f64).abs() < 1e-14);
    }
}
