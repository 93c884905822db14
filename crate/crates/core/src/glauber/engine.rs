//! Heat-bath Glauber samplers: pick a uniform site, resample it from its
//! conditional law. Model-specific dynamics keep local state so each step
//! costs `O(local)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::models::ergm::{edge_list, local_derivative, sigmoid, ErgmState};
use crate::models::{ColoringParams, ErgmParams, HardCoreParams, Model, PatternKind, VwErgmParams};
use crate::spin::{normalize_log_weights, Spin, SpinSystem};

/// Single-site state access for a spin system under Glauber dynamics.
pub trait LocalDynamics: Send {
    fn num_sites(&self) -> usize;
    fn num_spins(&self) -> usize;
    fn spin(&self, site: usize) -> Spin;
    fn assign(&mut self, site: usize, spin: Spin);
    /// Writes `μ(· | x̄_site)` into `buf` (length `num_spins`).
    fn conditional_into(&self, site: usize, buf: &mut [f64]);
    fn configuration(&self) -> Vec<Spin> {
        (0..self.num_sites()).map(|i| self.spin(i)).collect()
    }

    /// Heat-bath update at `site` driven by a uniform variate `u`.
    fn update(&mut self, site: usize, u: f64, buf: &mut [f64]) {
        self.conditional_into(site, buf);
        let mut acc = 0.0;
        let mut chosen = buf.len() - 1;
        for (s, &p) in buf.iter().enumerate() {
            acc += p;
            if u < acc {
                chosen = s;
                break;
            }
        }
        // never land on a zero-probability spin through round-off
        while buf[chosen] == 0.0 && chosen > 0 {
            chosen -= 1;
        }
        self.assign(site, chosen as Spin);
    }
}

/// Generic dynamics driven by the system's log-weight; `O(|X|·cost(H))` per step.
pub struct SystemDynamics {
    system: SpinSystem,
    x: Vec<Spin>,
}

impl SystemDynamics {
    pub fn new(system: SpinSystem, start: Vec<Spin>) -> Result<Self> {
        if start.len() != system.num_sites() || system.log_weight(&start) == f64::NEG_INFINITY {
            return Err(Error::InvalidParams("start configuration is not in the support".into()));
        }
        Ok(SystemDynamics { system, x: start })
    }
}

impl LocalDynamics for SystemDynamics {
    fn num_sites(&self) -> usize {
        self.system.num_sites()
    }
    fn num_spins(&self) -> usize {
        self.system.num_spins()
    }
    fn spin(&self, site: usize) -> Spin {
        self.x[site]
    }
    fn assign(&mut self, site: usize, spin: Spin) {
        self.x[site] = spin;
    }
    fn conditional_into(&self, site: usize, buf: &mut [f64]) {
        let mut y = self.x.clone();
        let logs: Vec<f64> = (0..buf.len())
            .map(|s| {
                y[site] = s as Spin;
                self.system.log_weight(&y)
            })
            .collect();
        let p = normalize_log_weights(&logs).expect("current state is supported");
        buf.copy_from_slice(&p);
    }
    fn configuration(&self) -> Vec<Spin> {
        self.x.clone()
    }
}

/// ERGM dynamics on a bitset adjacency with incremental pattern counts.
#[derive(Clone)]
pub struct ErgmDynamics {
    params: ErgmParams,
    kinds: Vec<PatternKind>,
    state: ErgmState,
    edges: Vec<(usize, usize)>,
}

impl ErgmDynamics {
    pub fn new(params: ErgmParams, start: &[Spin]) -> Self {
        let state = ErgmState::from_config(params.n, start);
        ErgmDynamics {
            kinds: params.kinds(),
            edges: edge_list(params.n),
            params,
            state,
        }
    }

    pub fn state(&self) -> &ErgmState {
        &self.state
    }

    #[inline]
    pub fn edge_probability(&self, site: usize) -> f64 {
        let (u, v) = self.edges[site];
        sigmoid(local_derivative(&self.params, &self.kinds, &self.state, u, v))
    }
}

impl LocalDynamics for ErgmDynamics {
    fn num_sites(&self) -> usize {
        self.edges.len()
    }
    fn num_spins(&self) -> usize {
        2
    }
    fn spin(&self, site: usize) -> Spin {
        let (u, v) = self.edges[site];
        self.state.has_edge(u, v) as Spin
    }
    fn assign(&mut self, site: usize, spin: Spin) {
        let (u, v) = self.edges[site];
        self.state.set(u, v, spin != 0);
    }
    fn conditional_into(&self, site: usize, buf: &mut [f64]) {
        let p = self.edge_probability(site);
        buf[0] = 1.0 - p;
        buf[1] = p;
    }
    #[inline]
    fn update(&mut self, site: usize, u: f64, _buf: &mut [f64]) {
        let p = self.edge_probability(site);
        let (a, b) = self.edges[site];
        self.state.set(a, b, u < p);
    }
    fn configuration(&self) -> Vec<Spin> {
        self.state.to_config()
    }
}

/// Vertex-weighted ERGM dynamics tracking the number of occupied sites.
#[derive(Clone)]
pub struct VwErgmDynamics {
    params: VwErgmParams,
    x: Vec<Spin>,
    ones: usize,
}

impl VwErgmDynamics {
    pub fn new(params: VwErgmParams, start: &[Spin]) -> Self {
        VwErgmDynamics {
            ones: start.iter().filter(|&&s| s != 0).count(),
            x: start.to_vec(),
            params,
        }
    }

    pub fn occupied(&self) -> usize {
        self.ones
    }
}

impl LocalDynamics for VwErgmDynamics {
    fn num_sites(&self) -> usize {
        self.x.len()
    }
    fn num_spins(&self) -> usize {
        2
    }
    fn spin(&self, site: usize) -> Spin {
        self.x[site]
    }
    fn assign(&mut self, site: usize, spin: Spin) {
        let spin = (spin != 0) as Spin;
        self.ones = self.ones + spin as usize - self.x[site] as usize;
        self.x[site] = spin;
    }
    fn conditional_into(&self, site: usize, buf: &mut [f64]) {
        let others = self.ones - self.x[site] as usize;
        let p = sigmoid(self.params.local_field(others));
        buf[0] = 1.0 - p;
        buf[1] = p;
    }
    fn configuration(&self) -> Vec<Spin> {
        self.x.clone()
    }
}

/// Hard-core dynamics: a site can be occupied only if all neighbours are empty.
#[derive(Clone)]
pub struct HardCoreDynamics {
    graph: Graph,
    p_occupied: f64,
    x: Vec<Spin>,
}

impl HardCoreDynamics {
    pub fn new(params: &HardCoreParams, start: &[Spin]) -> Result<Self> {
        if !params.is_admissible(start) {
            return Err(Error::InvalidParams("start is not an independent set".into()));
        }
        Ok(HardCoreDynamics {
            graph: params.graph.clone(),
            p_occupied: params.lambda / (1.0 + params.lambda),
            x: start.to_vec(),
        })
    }
}

impl LocalDynamics for HardCoreDynamics {
    fn num_sites(&self) -> usize {
        self.x.len()
    }
    fn num_spins(&self) -> usize {
        2
    }
    fn spin(&self, site: usize) -> Spin {
        self.x[site]
    }
    fn assign(&mut self, site: usize, spin: Spin) {
        self.x[site] = spin;
    }
    fn conditional_into(&self, site: usize, buf: &mut [f64]) {
        let free = self.graph.neighbors(site).iter().all(|&w| self.x[w] == 0);
        let p = if free { self.p_occupied } else { 0.0 };
        buf[0] = 1.0 - p;
        buf[1] = p;
    }
    fn configuration(&self) -> Vec<Spin> {
        self.x.clone()
    }
}

/// Uniform proper colorings: resample a vertex uniformly among colors unused
/// by its neighbours.
#[derive(Clone)]
pub struct ColoringDynamics {
    graph: Graph,
    k: usize,
    x: Vec<Spin>,
}

impl ColoringDynamics {
    pub fn new(params: &ColoringParams, start: &[Spin]) -> Result<Self> {
        if !params.is_proper(start) {
            return Err(Error::InvalidParams("start is not a proper coloring".into()));
        }
        Ok(ColoringDynamics {
            graph: params.graph.clone(),
            k: params.k,
            x: start.to_vec(),
        })
    }
}

impl LocalDynamics for ColoringDynamics {
    fn num_sites(&self) -> usize {
        self.x.len()
    }
    fn num_spins(&self) -> usize {
        self.k
    }
    fn spin(&self, site: usize) -> Spin {
        self.x[site]
    }
    fn assign(&mut self, site: usize, spin: Spin) {
        self.x[site] = spin;
    }
    fn conditional_into(&self, site: usize, buf: &mut [f64]) {
        buf.iter_mut().for_each(|b| *b = 1.0);
        for &w in self.graph.neighbors(site) {
            buf[self.x[w] as usize] = 0.0;
        }
        let free: f64 = buf.iter().sum();
        buf.iter_mut().for_each(|b| *b /= free);
    }
    fn configuration(&self) -> Vec<Spin> {
        self.x.clone()
    }
}

/// Dynamics for any of the four models.
#[derive(Clone)]
pub enum ModelDynamics {
    Ergm(ErgmDynamics),
    VwErgm(VwErgmDynamics),
    Coloring(ColoringDynamics),
    HardCore(HardCoreDynamics),
}

impl ModelDynamics {
    pub fn new(model: &Model) -> Result<Self> {
        let start = model.initial_configuration()?;
        Ok(match model {
            Model::Ergm(p) => ModelDynamics::Ergm(ErgmDynamics::new(p.clone(), &start)),
            Model::VwErgm(p) => ModelDynamics::VwErgm(VwErgmDynamics::new(p.clone(), &start)),
            Model::Coloring(p) => ModelDynamics::Coloring(ColoringDynamics::new(p, &start)?),
            Model::HardCore(p) => ModelDynamics::HardCore(HardCoreDynamics::new(p, &start)?),
        })
    }

    fn inner(&self) -> &dyn LocalDynamics {
        match self {
            ModelDynamics::Ergm(d) => d,
            ModelDynamics::VwErgm(d) => d,
            ModelDynamics::Coloring(d) => d,
            ModelDynamics::HardCore(d) => d,
        }
    }

    fn inner_mut(&mut self) -> &mut dyn LocalDynamics {
        match self {
            ModelDynamics::Ergm(d) => d,
            ModelDynamics::VwErgm(d) => d,
            ModelDynamics::Coloring(d) => d,
            ModelDynamics::HardCore(d) => d,
        }
    }
}

impl LocalDynamics for ModelDynamics {
    fn num_sites(&self) -> usize {
        self.inner().num_sites()
    }
    fn num_spins(&self) -> usize {
        self.inner().num_spins()
    }
    fn spin(&self, site: usize) -> Spin {
        self.inner().spin(site)
    }
    fn assign(&mut self, site: usize, spin: Spin) {
        self.inner_mut().assign(site, spin)
    }
    fn conditional_into(&self, site: usize, buf: &mut [f64]) {
        self.inner().conditional_into(site, buf)
    }
    fn update(&mut self, site: usize, u: f64, buf: &mut [f64]) {
        match self {
            ModelDynamics::Ergm(d) => d.update(site, u, buf),
            ModelDynamics::VwErgm(d) => d.update(site, u, buf),
            ModelDynamics::Coloring(d) => d.update(site, u, buf),
            ModelDynamics::HardCore(d) => d.update(site, u, buf),
        }
    }
    fn configuration(&self) -> Vec<Spin> {
        self.inner().configuration()
    }
}

/// A seeded Glauber chain. Identical `(seed, stream)`, dynamics and step
/// count give bit-identical trajectories.
pub struct GlauberEngine<D: LocalDynamics> {
    dynamics: D,
    rng: ChaCha8Rng,
    steps: u64,
    seed: u64,
    stream: u64,
    buf: Vec<f64>,
}

impl<D: LocalDynamics> GlauberEngine<D> {
    pub fn new(dynamics: D, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let buf = vec![0.0; dynamics.num_spins()];
        GlauberEngine {
            dynamics,
            rng,
            steps: 0,
            seed,
            stream,
            buf,
        }
    }

    pub fn seed(&self) -> (u64, u64) {
        (self.seed, self.stream)
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn dynamics(&self) -> &D {
        &self.dynamics
    }

    pub fn dynamics_mut(&mut self) -> &mut D {
        &mut self.dynamics
    }

    pub fn current(&self) -> Vec<Spin> {
        self.dynamics.configuration()
    }

    /// One uniform-site heat-bath update; returns the updated site.
    #[inline]
    pub fn step(&mut self) -> usize {
        let m = self.dynamics.num_sites();
        let site = self.rng.random_range(0..m);
        let u: f64 = self.rng.random();
        self.dynamics.update(site, u, &mut self.buf);
        self.steps += 1;
        site
    }

    pub fn run(&mut self, steps: u64) {
        for _ in 0..steps {
            self.step();
        }
    }

    /// `|I|` steps.
    pub fn sweep(&mut self) {
        self.run(self.dynamics.num_sites() as u64);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hard_core_stays_admissible() {
        let params = HardCoreParams::new(Graph::grid(6, 6), 1.5).unwrap();
        let dynamics = HardCoreDynamics::new(&params, &[0; 36]).unwrap();
        let mut engine = GlauberEngine::new(dynamics, 11, 0);
        for _ in 0..100_000 {
            engine.step();
            if engine.steps().is_multiple_of(997) {
                assert!(params.is_admissible(&engine.current()));
            }
        }
        assert!(params.is_admissible(&engine.current()));
    }

    #[test]
    fn coloring_stays_proper() {
        let params = ColoringParams::new(Graph::cycle(9).unwrap(), 5).unwrap();
        let start = params.greedy_coloring().unwrap();
        let mut engine = GlauberEngine::new(ColoringDynamics::new(&params, &start).unwrap(), 5, 1);
        for _ in 0..20_000 {
            engine.step();
            assert!(params.is_proper(&engine.current()));
        }
    }

    #[test]
    fn trajectories_are_reproducible() {
        let params = ErgmParams::edge_triangle(12, -0.1, 0.05);
        let run = |seed, stream| {
            let d = ErgmDynamics::new(params.clone(), &[0; 66]);
            let mut e = GlauberEngine::new(d, seed, stream);
            e.run(5_000);
            e.current()
        };
        assert_eq!(run(3, 0), run(3, 0));
        assert_ne!(run(3, 0), run(3, 1));
    }

    #[test]
    fn specialized_dynamics_match_generic_conditionals() {
        let models = vec![
            Model::Ergm(ErgmParams::edge_triangle(5, -0.3, 0.8)),
            Model::VwErgm(VwErgmParams::new(6, 0.9, -0.5, 0.3).unwrap()),
            Model::HardCore(HardCoreParams::new(Graph::path(5), 0.7).unwrap()),
            Model::Coloring(ColoringParams::new(Graph::cycle(5).unwrap(), 5).unwrap()),
        ];
        for model in models {
            let mut fast = GlauberEngine::new(ModelDynamics::new(&model).unwrap(), 9, 0);
            let system = model.system();
            let q = model.num_spins();
            let mut a = vec![0.0; q];
            let mut b = vec![0.0; q];
            for _ in 0..300 {
                fast.step();
                let generic = SystemDynamics::new(system.clone(), fast.current()).unwrap();
                for site in 0..model.num_sites() {
                    fast.dynamics().conditional_into(site, &mut a);
                    generic.conditional_into(site, &mut b);
                    for s in 0..q {
                        assert!((a[s] - b[s]).abs() < 1e-12, "{}", model.kind());
                    }
                }
            }
        }
    }
}
