use proptest::prelude::*;

use spinlab::hoeffding::{
    clt_samples, exact_coefficients, exact_term, lsi_constant_er, pattern_analyze, subgraph_count, HoeffdingExpansion,
    SubgraphPattern,
};
use spinlab::models::homs::binomial;
use spinlab::{Graph, Spin};

fn pattern(spec: &str) -> SubgraphPattern {
    pattern_analyze(&Graph::from_spec(spec).unwrap()).unwrap()
}

fn all_graphs(n: usize, p: f64) -> Vec<(Vec<Spin>, f64)> {
    let m = n * (n - 1) / 2;
    (0..1usize << m)
        .map(|code| {
            let x: Vec<Spin> = (0..m).map(|k| (code >> k & 1) as Spin).collect();
            let ones = code.count_ones() as i32;
            (x, p.powi(ones) * (1.0 - p).powi(m as i32 - ones))
        })
        .collect()
}

const PATTERNS: [&str; 5] = ["edge", "path:3", "triangle", "cycle:4", "star:3"];

#[test]
fn terms_are_complete_and_orthogonal() {
    let n = 4;
    for p in [0.3, 0.5] {
        let graphs = all_graphs(n, p);
        for spec in PATTERNS {
            let g = pattern(spec);
            let ex = HoeffdingExpansion::new(&g, n, p).unwrap();
            let terms: Vec<Vec<f64>> = graphs
                .iter()
                .map(|(x, _)| (1..=g.edges).map(|k| ex.term(k, None, x)).collect())
                .collect();
            for ((x, _), t) in graphs.iter().zip(&terms) {
                let total = ex.mean() + t.iter().sum::<f64>();
                assert!((total - subgraph_count(&g, n, x)).abs() < 1e-9, "{spec}");
            }
            for j in 0..g.edges {
                let mean: f64 = graphs.iter().zip(&terms).map(|((_, q), t)| q * t[j]).sum();
                assert!(mean.abs() < 1e-12, "{spec}: E T_{} = {mean}", j + 1);
                for k in 0..j {
                    let cross: f64 = graphs.iter().zip(&terms).map(|((_, q), t)| q * t[j] * t[k]).sum();
                    assert!(cross.abs() < 1e-10, "{spec}: <T_{}, T_{}> = {cross}", j + 1, k + 1);
                }
            }
        }
    }
}

#[test]
fn terms_match_exact_projection() {
    let n = 5;
    let p = 0.4;
    for spec in PATTERNS {
        let g = pattern(spec);
        let ex = HoeffdingExpansion::new(&g, n, p).unwrap();
        let coefs = exact_coefficients(&g, n, p).unwrap();
        for (x, _) in all_graphs(n, p).iter().step_by(13) {
            for k in 1..=g.edges {
                let a = ex.term(k, None, x);
                let b = exact_term(&coefs, k, p, x);
                assert!((a - b).abs() < 1e-9, "{spec} k {k}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn first_order_term_is_linear_in_edge_count() {
    let n = 5;
    let p = 0.35;
    for spec in PATTERNS {
        let g = pattern(spec);
        let ex = HoeffdingExpansion::new(&g, n, p).unwrap();
        let coef = g.first_order_coefficient(n, p);
        for (x, _) in all_graphs(n, p).iter().step_by(17) {
            let m: f64 = x.iter().map(|&v| v as f64).sum();
            let expected = coef * (m - binomial(n, 2) * p);
            assert!((ex.term(1, None, x) - expected).abs() < 1e-9, "{spec}");
        }
    }
}

#[test]
fn term_variance_matches_tensor_norm() {
    let n = 6;
    let p = 0.3;
    let graphs = all_graphs(n, p);
    for spec in ["path:3", "triangle"] {
        let g = pattern(spec);
        let ex = HoeffdingExpansion::new(&g, n, p).unwrap();
        for (k, alpha) in ex.orders() {
            let var: f64 = graphs
                .iter()
                .map(|(x, q)| q * ex.term(k, Some(alpha), x).powi(2))
                .sum();
            let fact: f64 = (1..=k).map(|j| j as f64).product();
            let predicted = p.powi(2 * (g.edges - k) as i32)
                * fact
                * ex.tensor_norm(k, alpha).powi(2)
                * (p * (1.0 - p)).powi(k as i32);
            assert!((var - predicted).abs() < 1e-9 * predicted.max(1.0), "{spec} ({k},{alpha}): {var} vs {predicted}");
        }
    }
}

#[test]
fn pattern_constants() {
    let k3 = pattern("triangle");
    assert_eq!(k3.aut_count, 6);
    assert_eq!(k3.alpha, vec![2, 3, 3]);
    let c4 = pattern("cycle:4");
    assert_eq!(c4.aut_count, 8);
    assert_eq!(c4.alpha, vec![2, 3, 4, 4]);
    assert!(pattern_analyze(&Graph::from_spec("complete:9").unwrap()).is_err());
}

#[test]
fn lsi_constant_is_continuous_at_half() {
    let mid = lsi_constant_er(0.5).unwrap();
    assert!((mid - 2.0).abs() < 1e-12);
    assert!((lsi_constant_er(0.5 + 1e-7).unwrap() - mid).abs() < 1e-6);
    assert!(lsi_constant_er(0.0).is_err());
}

#[test]
fn clt_samples_are_reproducible() {
    let g = pattern("triangle");
    let a = clt_samples(&g, 20, 0.5, 300, 4);
    let b = clt_samples(&g, 20, 0.5, 300, 4);
    assert_eq!(a, b);
    let mean = a.iter().map(|v| v.0).sum::<f64>() / a.len() as f64;
    assert!(mean.abs() < 0.25);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn count_equals_mean_plus_terms(code in 0usize..1 << 10, p in 0.05f64..0.95) {
        let n = 5;
        let x: Vec<Spin> = (0..10).map(|k| (code >> k & 1) as Spin).collect();
        for spec in ["path:3", "triangle"] {
            let g = pattern(spec);
            let ex = HoeffdingExpansion::new(&g, n, p).unwrap();
            let total = ex.mean() + (1..=g.edges).map(|k| ex.term(k, None, &x)).sum::<f64>();
            prop_assert!((total - subgraph_count(&g, n, &x)).abs() < 1e-9);
        }
    }
}
