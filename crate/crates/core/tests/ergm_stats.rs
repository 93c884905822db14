use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spinlab::ergm_stats::{
    er_corrected_variance, er_t3_variance, estimate_moments, exact_moments, figure1_analysis, iid_samples,
    run_chains, sample_er, triangle_count, CampaignSettings, GraphStats, TriangleDecomposition, TriangleMoments,
};
use spinlab::hoeffding::{pattern_analyze, HoeffdingExpansion};
use spinlab::models::ErgmParams;
use spinlab::{Graph, Spin};

fn edge_triangle(n: usize, b1: f64, b2: f64) -> ErgmParams {
    let patterns = vec![Graph::from_spec("edge").unwrap(), Graph::from_spec("triangle").unwrap()];
    ErgmParams::new(n, vec![b1, b2], patterns).unwrap()
}

fn graph_of(code: usize, m: usize) -> Vec<Spin> {
    (0..m).map(|k| (code >> k & 1) as Spin).collect()
}

#[test]
fn decomposition_is_exact_under_ergm() {
    for (b1, b2) in [(-0.1, 0.05), (0.3, -0.2), (0.0, 0.4)] {
        let n = 5;
        let params = edge_triangle(n, b1, b2);
        let e = params.system().enumerate().unwrap();
        let m = exact_moments(&params).unwrap();
        let dec = TriangleDecomposition::new(n, m);
        let tri = e.tabulate(|x| triangle_count(n, x.as_slice()) as f64);
        let mean = e.expectation(&tri);
        assert!((mean - dec.expected_triangles()).abs() < 1e-12);
        for k in 0..e.len() {
            let x = e.config(k);
            let s = GraphStats::of_config(n, x.as_slice());
            let c = dec.components(&s);
            let rhs = c.f3 + m.mu1 * c.f2 + (n as f64 - 2.0) * m.mu2 * c.f1;
            assert!((tri[k] - mean - rhs).abs() < 1e-9);
            assert!((dec.centered(&s) - (tri[k] - mean)).abs() < 1e-9);
            assert!((dec.corrected(&s) - (c.f3 + m.mu1 * c.f2)).abs() < 1e-9);
        }
    }
}

#[test]
fn components_are_centered_under_ergm() {
    let n = 5;
    let params = edge_triangle(n, -0.1, 0.05);
    let e = params.system().enumerate().unwrap();
    let dec = TriangleDecomposition::new(n, exact_moments(&params).unwrap());
    let comps: Vec<_> = (0..e.len())
        .map(|k| dec.components(&GraphStats::of_config(n, e.config(k).as_slice())))
        .collect();
    let f1 = e.expectation(&comps.iter().map(|c| c.f1).collect::<Vec<_>>());
    let f2 = e.expectation(&comps.iter().map(|c| c.f2).collect::<Vec<_>>());
    let f3 = e.expectation(&comps.iter().map(|c| c.f3).collect::<Vec<_>>());
    assert!(f1.abs() < 1e-12 && f2.abs() < 1e-12 && f3.abs() < 1e-12, "{f1} {f2} {f3}");
}

#[test]
fn er_variances_match_enumeration() {
    for n in [4, 5, 6] {
        let m = n * (n - 1) / 2;
        for p in [0.2f64, 0.5, 0.8] {
            let nf = n as f64;
            let (mut st, mut st2, mut sc, mut sc2) = (0.0, 0.0, 0.0, 0.0);
            for code in 0..1usize << m {
                let x = graph_of(code, m);
                let ones = code.count_ones() as i32;
                let q = p.powi(ones) * (1.0 - p).powi(m as i32 - ones);
                let t = triangle_count(n, &x) as f64;
                let c = t - (nf - 2.0) * p * p * (ones as f64 - m as f64 * p);
                st += q * t;
                st2 += q * t * t;
                sc += q * c;
                sc2 += q * c * c;
            }
            assert!((st2 - st * st - er_t3_variance(n, p)).abs() < 1e-9, "n {n} p {p}");
            assert!((sc2 - sc * sc - er_corrected_variance(n, p)).abs() < 1e-9, "n {n} p {p}");
        }
    }
}

#[test]
fn er_components_are_hoeffding_terms() {
    let n = 5;
    let p = 0.6;
    let ex = HoeffdingExpansion::new(&pattern_analyze(&Graph::from_spec("triangle").unwrap()).unwrap(), n, p).unwrap();
    let dec = TriangleDecomposition::new(n, TriangleMoments::erdos_renyi(p));
    for code in 0..1usize << 10 {
        let x = graph_of(code, 10);
        let c = dec.components(&GraphStats::of_config(n, &x));
        assert!((ex.term(1, None, &x) - (n as f64 - 2.0) * p * p * c.f1).abs() < 1e-9);
        assert!((ex.term(2, None, &x) - p * c.f2).abs() < 1e-9);
        assert!((ex.term(3, None, &x) - c.f3).abs() < 1e-9);
    }
}

#[test]
fn chain_moments_approach_exact_values() {
    let params = edge_triangle(5, -0.1, 0.05);
    let exact = exact_moments(&params).unwrap();
    let settings = CampaignSettings {
        chains: 2,
        burn_in: 1000,
        steps: 400_000,
        thin: 10,
        seed: 3,
    };
    let chains = run_chains(&params, &settings).unwrap();
    assert_eq!(chains, run_chains(&params, &settings).unwrap());
    let est = estimate_moments(5, &chains, 1).unwrap();
    assert!((est.moments.mu1 - exact.mu1).abs() < 0.01, "{est:?} vs {exact:?}");
    assert!((est.moments.mu2 - exact.mu2).abs() < 0.01);
    assert!((est.moments.mu_delta - exact.mu_delta).abs() < 0.01);
    assert!(est.mu1_ci.0 <= est.moments.mu1 && est.moments.mu1 <= est.mu1_ci.1);
}

#[test]
fn figure1_analysis_on_small_graph() {
    let params = edge_triangle(12, -0.1, 0.05);
    let settings = CampaignSettings {
        chains: 2,
        burn_in: 10_000,
        steps: 200_000,
        thin: 20,
        seed: 5,
    };
    let chains = run_chains(&params, &settings).unwrap();
    let out = figure1_analysis(12, &chains, 20, 5).unwrap();
    assert_eq!(out.summary.samples, 20_000);
    assert!(out.summary.variance_ratio > 1.0);
    assert!(out.summary.tail_centered.report.holds());
    assert!(out.summary.tail_corrected.report.holds());
    assert_eq!(out.hist_centered.counts.iter().sum::<u64>() as usize, out.centered.len());
}

#[test]
fn iid_sampling_matches_er_moments() {
    let n = 30;
    let p = 0.25;
    let stats = iid_samples(4000, 2, |rng| GraphStats::of_state(&sample_er(n, p, rng)));
    let mean_t: f64 = stats.iter().map(|s| s.triangles as f64).sum::<f64>() / stats.len() as f64;
    let expected = 4060.0 * p.powi(3);
    let se = (er_t3_variance(n, p) / stats.len() as f64).sqrt();
    assert!((mean_t - expected).abs() < 5.0 * se, "{mean_t} vs {expected}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fast_components_match_brute_force(seed in any::<u64>(), mu1 in 0.05f64..0.95, r in 0.5f64..1.5) {
        let n = 7;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<Spin> = sample_er(n, mu1, &mut rng).to_config();
        let mu2 = (mu1 * mu1 * r).min(mu1);
        let dec = TriangleDecomposition::new(n, TriangleMoments { mu1, mu2, mu_delta: mu2 * mu1 });
        let fast = dec.components(&GraphStats::of_config(n, &x));
        let slow = dec.components_bruteforce(&x);
        prop_assert!((fast.f1 - slow.f1).abs() < 1e-9);
        prop_assert!((fast.f2 - slow.f2).abs() < 1e-9);
        prop_assert!((fast.f3 - slow.f3).abs() < 1e-9);
    }
}
