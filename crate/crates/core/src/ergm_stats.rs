//! Triangle statistics of the ERGM: the decomposition
//! `T3 - E T3 = f3 + μ1 f2 + (n-2) μ2 f1`, the corrected statistic, tail
//! fits and Wasserstein diagnostics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::concentration::{tail_check_with, TailReport};
use crate::error::{Error, Result};
use crate::glauber::{ErgmDynamics, GlauberEngine};
use crate::models::ergm::{edge_list, ErgmState};
use crate::models::homs::binomial;
use crate::models::ErgmParams;
use crate::spin::Spin;
use crate::stats::{self, Histogram};

/// Largest `n` for exact moments by enumeration (`2^15` graphs).
pub const EXACT_MOMENT_MAX_N: usize = 6;

/// Triangle count from scratch.
pub fn triangle_count(n: usize, x: &[Spin]) -> u64 {
    let edges = edge_list(n);
    let mut adj = vec![false; n * n];
    for (idx, &(u, v)) in edges.iter().enumerate() {
        if x[idx] != 0 {
            adj[u * n + v] = true;
            adj[v * n + u] = true;
        }
    }
    let mut t = 0;
    for a in 0..n {
        for b in a + 1..n {
            if !adj[a * n + b] {
                continue;
            }
            for c in b + 1..n {
                if adj[a * n + c] && adj[b * n + c] {
                    t += 1;
                }
            }
        }
    }
    t
}

/// Edge, two-path and triangle counts of one graph.
#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub struct GraphStats {
    pub edges: u64,
    pub cherries: u64,
    pub triangles: u64,
}

impl GraphStats {
    pub fn of_state(s: &ErgmState) -> Self {
        GraphStats {
            edges: s.edge_count(),
            cherries: s.cherry_count(),
            triangles: s.triangle_count(),
        }
    }

    pub fn of_config(n: usize, x: &[Spin]) -> Self {
        GraphStats::of_state(&ErgmState::from_config(n, x))
    }
}

/// `μ1 = E x_e`, `μ2 = E x_e x_f` (adjacent), `μΔ = E x_e x_f x_g` (triangle).
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct TriangleMoments {
    pub mu1: f64,
    pub mu2: f64,
    pub mu_delta: f64,
}

impl TriangleMoments {
    pub fn erdos_renyi(p: f64) -> Self {
        TriangleMoments {
            mu1: p,
            mu2: p * p,
            mu_delta: p * p * p,
        }
    }

    /// Symmetric averages `E m / C(n,2)`, `E cherries / (n C(n-1,2))`, `E T3 / C(n,3)`.
    pub fn from_means(n: usize, edges: f64, cherries: f64, triangles: f64) -> Self {
        TriangleMoments {
            mu1: edges / binomial(n, 2),
            mu2: cherries / (n as f64 * binomial(n - 1, 2)),
            mu_delta: triangles / binomial(n, 3),
        }
    }
}

/// Exact moments by enumerating all graphs on `n ≤ 6` vertices.
pub fn exact_moments(params: &ErgmParams) -> Result<TriangleMoments> {
    let n = params.n;
    if n > EXACT_MOMENT_MAX_N {
        return Err(Error::CapExceeded {
            states: 2f64.powf(binomial(n, 2)),
            cap: 1 << 15,
        });
    }
    let e = params.system().enumerate()?;
    let mut acc = [0.0; 3];
    for k in 0..e.len() {
        let s = GraphStats::of_config(n, e.config(k).as_slice());
        let p = e.probability(k);
        acc[0] += p * s.edges as f64;
        acc[1] += p * s.cherries as f64;
        acc[2] += p * s.triangles as f64;
    }
    Ok(TriangleMoments::from_means(n, acc[0], acc[1], acc[2]))
}

/// Moments estimated from chain output with a split-chain convergence check.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct MomentEstimate {
    pub moments: TriangleMoments,
    pub mu1_ci: (f64, f64),
    pub mu2_ci: (f64, f64),
    pub mu_delta_ci: (f64, f64),
    /// Largest standardized gap between first- and second-half means of
    /// edge, two-path and triangle counts.
    pub split_z: f64,
    /// `false` when `split_z > 3` (the samples look unconverged).
    pub converged: bool,
}

fn pooled(chains: &[Vec<GraphStats>], pick: fn(&GraphStats) -> f64) -> Vec<f64> {
    chains.iter().flat_map(|c| c.iter().map(pick)).collect()
}

pub fn estimate_moments(n: usize, chains: &[Vec<GraphStats>], seed: u64) -> Result<MomentEstimate> {
    if chains.iter().all(|c| c.len() < 4) {
        return Err(Error::InvalidParams("too few samples for moment estimation".into()));
    }
    let pickers: [fn(&GraphStats) -> f64; 3] = [
        |s| s.edges as f64,
        |s| s.cherries as f64,
        |s| s.triangles as f64,
    ];
    let scales = [
        binomial(n, 2),
        n as f64 * binomial(n - 1, 2),
        binomial(n, 3),
    ];
    let mut means = [0.0; 3];
    let mut cis = [(0.0, 0.0); 3];
    let mut split_z: f64 = 0.0;
    for (k, pick) in pickers.iter().enumerate() {
        let xs = pooled(chains, *pick);
        means[k] = stats::mean(&xs) / scales[k];
        // batch means thin the series so the bootstrap sees near-independent values
        let batch = (xs.len() / 200).max(1);
        let bm: Vec<f64> = xs.chunks_exact(batch).map(stats::mean).collect();
        let (lo, hi) = stats::bootstrap_ci(&bm, stats::mean, 200, 0.95, seed.wrapping_add(k as u64));
        cis[k] = (lo / scales[k], hi / scales[k]);
        let first: Vec<f64> = chains.iter().flat_map(|c| c[..c.len() / 2].iter().map(*pick)).collect();
        let second: Vec<f64> = chains.iter().flat_map(|c| c[c.len() / 2..].iter().map(*pick)).collect();
        let se = |v: &[f64]| {
            let b = (v.len() / 50).max(1);
            let m: Vec<f64> = v.chunks_exact(b).map(stats::mean).collect();
            stats::variance(&m) / m.len() as f64
        };
        let gap = (stats::mean(&first) - stats::mean(&second)).abs();
        let sd = (se(&first) + se(&second)).sqrt();
        if sd > 0.0 {
            split_z = split_z.max(gap / sd);
        } else if gap > 0.0 {
            split_z = f64::INFINITY;
        }
    }
    Ok(MomentEstimate {
        moments: TriangleMoments {
            mu1: means[0],
            mu2: means[1],
            mu_delta: means[2],
        },
        mu1_ci: cis[0],
        mu2_ci: cis[1],
        mu_delta_ci: cis[2],
        split_z,
        converged: split_z <= 3.0,
    })
}

/// The three pieces of the centered triangle count for given moments.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct TriangleDecomposition {
    pub n: usize,
    pub mu1: f64,
    pub mu2: f64,
    pub mu_delta: f64,
    /// `μ̃2 = μ2 - μ1²`.
    pub tilde_mu2: f64,
    /// `μ̃Δ = μΔ - 3 μ1 μ2 + 2 μ1³`.
    pub tilde_mu_delta: f64,
}

/// `(f1, f2, f3)` at one configuration.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct Components {
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
}

impl TriangleDecomposition {
    pub fn new(n: usize, m: TriangleMoments) -> Self {
        let (mu1, mu2, mu_delta) = (m.mu1, m.mu2, m.mu_delta);
        TriangleDecomposition {
            n,
            mu1,
            mu2,
            mu_delta,
            tilde_mu2: mu2 - mu1 * mu1,
            tilde_mu_delta: mu_delta - 3.0 * mu1 * mu2 + 2.0 * mu1.powi(3),
        }
    }

    pub fn edges(&self) -> f64 {
        binomial(self.n, 2)
    }

    /// Unordered pairs of adjacent edges.
    pub fn adjacent_pairs(&self) -> f64 {
        self.n as f64 * binomial(self.n - 1, 2)
    }

    pub fn triangles(&self) -> f64 {
        binomial(self.n, 3)
    }

    pub fn expected_triangles(&self) -> f64 {
        self.triangles() * self.mu_delta
    }

    /// Components from the edge, two-path and triangle counts.
    pub fn components(&self, s: &GraphStats) -> Components {
        let nm2 = self.n as f64 - 2.0;
        let m = s.edges as f64;
        let ch = s.cherries as f64;
        let t = s.triangles as f64;
        let mu = self.mu1;
        let f1 = m - self.edges() * mu;
        // Σ_{adjacent pairs} x̃_e x̃_f
        let pair_sum = ch - mu * 2.0 * nm2 * m + mu * mu * self.adjacent_pairs();
        let f2 = pair_sum - self.adjacent_pairs() * self.tilde_mu2;
        // Σ_{triangles} x̃_e x̃_f x̃_g
        let cube_sum = t - mu * ch + mu * mu * nm2 * m - mu.powi(3) * self.triangles();
        let f3 = cube_sum - self.triangles() * self.tilde_mu_delta - self.tilde_mu2 * nm2 * f1;
        Components { f1, f2, f3 }
    }

    /// Components by explicit sums over edges, adjacent pairs and triangles.
    pub fn components_bruteforce(&self, x: &[Spin]) -> Components {
        let n = self.n;
        let mut id = vec![usize::MAX; n * n];
        for (k, (u, v)) in edge_list(n).into_iter().enumerate() {
            id[u * n + v] = k;
            id[v * n + u] = k;
        }
        let xt = |a: usize, b: usize| x[id[a * n + b]] as f64 - self.mu1;
        let f1: f64 = x.iter().map(|&s| s as f64 - self.mu1).sum();
        let mut f2 = 0.0;
        for c in 0..n {
            for a in 0..n {
                for b in a + 1..n {
                    if a != c && b != c {
                        f2 += xt(c, a) * xt(c, b) - self.tilde_mu2;
                    }
                }
            }
        }
        let mut f3 = 0.0;
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let (e, f, g) = (xt(a, b), xt(a, c), xt(b, c));
                    f3 += e * f * g - self.tilde_mu_delta - (e + f + g) * self.tilde_mu2;
                }
            }
        }
        Components { f1, f2, f3 }
    }

    /// `T3 - E T3`.
    pub fn centered(&self, s: &GraphStats) -> f64 {
        s.triangles as f64 - self.expected_triangles()
    }

    /// `T3 - E T3 - (n-2) μ2 f1`.
    pub fn corrected(&self, s: &GraphStats) -> f64 {
        let f1 = s.edges as f64 - self.edges() * self.mu1;
        self.centered(s) - (self.n as f64 - 2.0) * self.mu2 * f1
    }

    /// `‖A_1‖_2, ‖A_2‖_2, ‖A_3‖_2` for the coefficient tensors of
    /// `(n-2) μ2 f1`, `μ1 f2` and `f3` written as symmetric `f_{d,A}`.
    pub fn tensor_norms(&self) -> [f64; 3] {
        [
            (self.n as f64 - 2.0) * self.mu2 * self.edges().sqrt(),
            self.mu1 * (self.adjacent_pairs() / 2.0).sqrt(),
            (self.triangles() / 6.0).sqrt(),
        ]
    }
}

/// `Var T3` in `G(n, p)`.
pub fn er_t3_variance(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    binomial(n, 3) * p.powi(3) * (1.0 - p.powi(3))
        + 0.5 * nf * (nf - 1.0) * (nf - 2.0) * (nf - 3.0) * p.powi(5) * (1.0 - p)
}

/// The leading term `C(n,3) p³ (1 - p³)` of the corrected variance.
pub fn er_corrected_variance_leading(n: usize, p: f64) -> f64 {
    binomial(n, 3) * p.powi(3) * (1.0 - p.powi(3))
}

/// `Var(T3 - (n-2) p² f1)` in `G(n, p)`.
pub fn er_corrected_variance(n: usize, p: f64) -> f64 {
    er_corrected_variance_leading(n, p) - binomial(n, 2) * (n as f64 - 2.0) * p.powi(5) * (1.0 - p)
}

/// Draws an Erdős–Rényi graph.
pub fn sample_er<R: Rng>(n: usize, p: f64, rng: &mut R) -> ErgmState {
    let mut s = ErgmState::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                s.set(u, v, true);
            }
        }
    }
    s
}

/// Runs `count` i.i.d. draws in fixed-size blocks, one RNG stream per block,
/// so the output does not depend on the thread count.
pub fn iid_samples<T: Send, F>(count: usize, seed: u64, draw: F) -> Vec<T>
where
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    const BLOCK: usize = 256;
    let blocks = count.div_ceil(BLOCK);
    (0..blocks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let len = BLOCK.min(count - b * BLOCK);
            (0..len).map(|_| draw(&mut rng)).collect::<Vec<_>>()
        })
        .collect()
}

/// Chain-campaign settings for ERGM sampling.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CampaignSettings {
    pub chains: usize,
    /// Steps discarded before recording.
    pub burn_in: u64,
    /// Steps after burn-in.
    pub steps: u64,
    /// Record every `thin` steps.
    pub thin: u64,
    pub seed: u64,
}

/// Runs independent Glauber chains from the empty graph (chain `k` uses
/// stream `k`) and records graph statistics.
pub fn run_chains(params: &ErgmParams, settings: &CampaignSettings) -> Result<Vec<Vec<GraphStats>>> {
    if settings.chains == 0 || settings.thin == 0 {
        return Err(Error::InvalidParams("chains and thin must be positive".into()));
    }
    let sites = params.num_sites();
    Ok((0..settings.chains)
        .into_par_iter()
        .map(|k| {
            let dynamics = ErgmDynamics::new(params.clone(), &vec![0; sites]);
            let mut engine = GlauberEngine::new(dynamics, settings.seed, k as u64);
            engine.run(settings.burn_in);
            let records = settings.steps / settings.thin;
            let mut out = Vec::with_capacity(records as usize);
            for _ in 0..records {
                engine.run(settings.thin);
                out.push(GraphStats::of_state(engine.dynamics().state()));
            }
            out
        })
        .collect())
}

/// Tail comparison with the smallest constant making the bound shape hold.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct TailFit {
    pub fitted_c: f64,
    pub report: TailReport,
}

/// Smallest `C` with `sf(t) ≤ 2 exp(-η(t)/C)` at every level.
pub fn fit_constant<E: Fn(f64) -> f64>(abs_values: &[f64], levels: &[f64], eta: E) -> f64 {
    let sf = stats::survival(abs_values, levels);
    levels
        .iter()
        .zip(&sf)
        .filter(|(_, &s)| s > 0.0)
        .map(|(&t, &s)| eta(t) / (2.0 / s).ln())
        .fold(0.0, f64::max)
}

fn tail_fit<E: Fn(f64) -> f64>(abs_values: &[f64], levels: &[f64], eta: E) -> TailFit {
    let c = fit_constant(abs_values, levels, &eta);
    let report = tail_check_with(abs_values, levels, c, |t| 2.0 * (-eta(t) / c).exp());
    TailFit { fitted_c: c, report }
}

/// `min((t/n^{3/2})^{2/3}, t/(μ1 n^{3/2}), (t/(μ2 n²))²)`.
pub fn eta_centered(n: usize, m: &TriangleMoments, t: f64) -> f64 {
    eta_corrected(n, m, t).min((t / (m.mu2 * (n as f64).powi(2))).powi(2))
}

/// `min((t/n^{3/2})^{2/3}, t/(μ1 n^{3/2}))`.
pub fn eta_corrected(n: usize, m: &TriangleMoments, t: f64) -> f64 {
    let n32 = (n as f64).powf(1.5);
    (t / n32).powf(2.0 / 3.0).min(t / (m.mu1 * n32))
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Figure1Summary {
    pub n: usize,
    pub samples: usize,
    pub effective_samples: f64,
    pub moments: MomentEstimate,
    pub var_centered: f64,
    pub var_corrected: f64,
    pub variance_ratio: f64,
    pub std_ratio: f64,
    pub tail_centered: TailFit,
    pub tail_corrected: TailFit,
}

#[derive(Clone, Debug)]
pub struct Figure1Output {
    pub summary: Figure1Summary,
    pub centered: Vec<f64>,
    pub corrected: Vec<f64>,
    pub hist_centered: Histogram,
    pub hist_corrected: Histogram,
}

/// Centered and corrected triangle statistics from chain output, with
/// histograms and fitted tail curves.
pub fn figure1_analysis(n: usize, chains: &[Vec<GraphStats>], bins: usize, seed: u64) -> Result<Figure1Output> {
    let moments = estimate_moments(n, chains, seed)?;
    let dec = TriangleDecomposition::new(n, moments.moments);
    let all: Vec<GraphStats> = chains.iter().flatten().copied().collect();
    let centered: Vec<f64> = all.iter().map(|s| dec.centered(s)).collect();
    let corrected: Vec<f64> = all.iter().map(|s| dec.corrected(s)).collect();
    // ESS: per chain batch means with √len batches, summed, worst statistic
    let ess_of = |f: &dyn Fn(&GraphStats) -> f64| -> f64 {
        chains
            .iter()
            .map(|c| {
                let xs: Vec<f64> = c.iter().map(f).collect();
                stats::batch_means_ess(&xs, (xs.len() as f64).sqrt() as usize)
            })
            .sum()
    };
    let effective_samples = ess_of(&|s| dec.centered(s)).min(ess_of(&|s| dec.corrected(s)));
    let var_centered = stats::variance(&centered);
    let var_corrected = stats::variance(&corrected);
    let abs_c: Vec<f64> = centered.iter().map(|v| v.abs()).collect();
    let abs_r: Vec<f64> = corrected.iter().map(|v| v.abs()).collect();
    let levels_c = crate::concentration::tail_levels(&abs_c, 200);
    let levels_r = crate::concentration::tail_levels(&abs_r, 200);
    let m = moments.moments;
    let tail_centered = tail_fit(&abs_c, &levels_c, |t| eta_centered(n, &m, t));
    let tail_corrected = tail_fit(&abs_r, &levels_r, |t| eta_corrected(n, &m, t));
    Ok(Figure1Output {
        hist_centered: Histogram::new(&centered, bins),
        hist_corrected: Histogram::new(&corrected, bins),
        summary: Figure1Summary {
            n,
            samples: all.len(),
            effective_samples,
            moments,
            var_centered,
            var_corrected,
            variance_ratio: var_centered / var_corrected,
            std_ratio: (var_centered / var_corrected).sqrt(),
            tail_centered,
            tail_corrected,
        },
        centered,
        corrected,
    })
}

/// `d_W(T̃3, L̃)` in `G(n, p)` from coupled draws.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct WassersteinPoint {
    pub n: usize,
    pub p: f64,
    pub samples: usize,
    pub distance: f64,
}

/// Normalized triangle and edge counts `(T̃3, L̃)` of one graph in `G(n,p)`.
pub fn er_normalized_pair(n: usize, p: f64, s: &GraphStats) -> (f64, f64) {
    let root = binomial(n, 2).sqrt();
    let t = (s.triangles as f64 - binomial(n, 3) * p.powi(3)) / ((n as f64 - 2.0) * p * p * root);
    let l = (s.edges as f64 - binomial(n, 2) * p) / root;
    (t, l)
}

pub fn er_wasserstein(n: usize, p: f64, samples: usize, seed: u64) -> WassersteinPoint {
    let pairs = iid_samples(samples, seed, |rng| {
        let s = GraphStats::of_state(&sample_er(n, p, rng));
        er_normalized_pair(n, p, &s)
    });
    let (t, l): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    WassersteinPoint {
        n,
        p,
        samples,
        distance: stats::wasserstein_two_sample(&t, &l),
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let mx = stats::mean(&lx);
    let my = stats::mean(&ly);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    cov / var
}
