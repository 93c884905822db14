//! Counting injective homomorphisms (ordered vertex maps) of a pattern graph
//! into a host graph, optionally pinned to use given host edges.

use crate::graph::Graph;

/// Falling factorial `(n)_k = n (n-1) ... (n-k+1)`, as a float.
pub fn falling(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).map(|i| (n - i) as f64).product()
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    falling(n, k) / falling(k, k)
}

/// Dense adjacency table used by the backtracking counters.
struct Host {
    n: usize,
    adj: Vec<bool>,
}

impl Host {
    fn new(g: &Graph) -> Self {
        let n = g.num_vertices();
        let mut adj = vec![false; n * n];
        for &(u, v) in g.edges() {
            adj[u * n + v] = true;
            adj[v * n + u] = true;
        }
        Host { n, adj }
    }

    #[inline]
    fn edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v]
    }
}

/// Pattern vertices in an order where every vertex after the first has an
/// earlier neighbour (when the pattern is connected), with the list of
/// earlier neighbours for each.
fn search_order(pattern: &Graph, pinned: &[Option<usize>]) -> Vec<(usize, Vec<usize>)> {
    let k = pattern.num_vertices();
    let mut placed = vec![false; k];
    let mut order = Vec::with_capacity(k);
    for v in 0..k {
        if pinned[v].is_some() {
            placed[v] = true;
        }
    }
    while placed.iter().any(|&p| !p) {
        // prefer the unplaced vertex with most placed neighbours
        let next = (0..k)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                (
                    pattern.neighbors(v).iter().filter(|&&w| placed[w]).count(),
                    pattern.degree(v),
                    usize::MAX - v,
                )
            })
            .expect("an unplaced vertex exists");
        let back: Vec<usize> = pattern
            .neighbors(next)
            .iter()
            .copied()
            .filter(|&w| placed[w])
            .collect();
        placed[next] = true;
        order.push((next, back));
    }
    order
}

fn count_with_pins(pattern: &Graph, host: &Host, pins: &[(usize, usize)]) -> u64 {
    let k = pattern.num_vertices();
    if k > host.n {
        return 0;
    }
    let mut image: Vec<Option<usize>> = vec![None; k];
    let mut used = vec![false; host.n];
    for &(pv, hv) in pins {
        match image[pv] {
            Some(h) if h != hv => return 0,
            Some(_) => {}
            None => {
                if used[hv] {
                    return 0;
                }
                image[pv] = Some(hv);
                used[hv] = true;
            }
        }
    }
    // pinned vertices must already respect edges among themselves
    for &(a, b) in pattern.edges() {
        if let (Some(x), Some(y)) = (image[a], image[b]) {
            if !host.edge(x, y) {
                return 0;
            }
        }
    }
    let order = search_order(pattern, &image);
    let mut assign: Vec<usize> = image.iter().map(|o| o.unwrap_or(usize::MAX)).collect();
    extend(&order, 0, host, &mut assign, &mut used)
}

fn extend(
    order: &[(usize, Vec<usize>)],
    depth: usize,
    host: &Host,
    assign: &mut [usize],
    used: &mut [bool],
) -> u64 {
    if depth == order.len() {
        return 1;
    }
    let (v, back) = &order[depth];
    let mut total = 0;
    let candidates: Box<dyn Iterator<Item = usize>> = match back.first() {
        Some(&w) => {
            let anchor = assign[w];
            Box::new((0..host.n).filter(move |&h| host.edge(anchor, h)))
        }
        None => Box::new(0..host.n),
    };
    for h in candidates {
        if used[h] || !back.iter().all(|&w| host.edge(assign[w], h)) {
            continue;
        }
        used[h] = true;
        assign[*v] = h;
        total += extend(order, depth + 1, host, assign, used);
        used[h] = false;
    }
    assign[*v] = usize::MAX;
    total
}

/// `N_G(x)`: injective vertex maps of `pattern` into `host` preserving edges.
pub fn count_injective_homs(pattern: &Graph, host: &Graph) -> u64 {
    count_with_pins(pattern, &Host::new(host), &[])
}

/// `N_G(x, e)`: injective homomorphisms whose edge image contains `e`.
pub fn count_homs_using_edge(pattern: &Graph, host: &Graph, e: (usize, usize)) -> u64 {
    if !host.has_edge(e.0, e.1) {
        return 0;
    }
    let h = Host::new(host);
    let mut total = 0;
    // each embedding using e has a unique preimage edge and orientation
    for &(a, b) in pattern.edges() {
        total += count_with_pins(pattern, &h, &[(a, e.0), (b, e.1)]);
        total += count_with_pins(pattern, &h, &[(a, e.1), (b, e.0)]);
    }
    total
}

/// `N_G(x, e, f)`: injective homomorphisms whose edge image contains both
/// `e` and `f` (distinct edges).
pub fn count_homs_using_edges(
    pattern: &Graph,
    host: &Graph,
    e: (usize, usize),
    f: (usize, usize),
) -> u64 {
    if !host.has_edge(e.0, e.1) || !host.has_edge(f.0, f.1) || norm(e) == norm(f) {
        return 0;
    }
    let h = Host::new(host);
    let pe = pattern.edges();
    let mut total = 0;
    for (i, &(a, b)) in pe.iter().enumerate() {
        for (j, &(c, d)) in pe.iter().enumerate() {
            if i == j {
                continue;
            }
            for (x, y) in [(a, b), (b, a)] {
                for (z, w) in [(c, d), (d, c)] {
                    total += count_with_pins(
                        pattern,
                        &h,
                        &[(x, e.0), (y, e.1), (z, f.0), (w, f.1)],
                    );
                }
            }
        }
    }
    total
}

fn norm(e: (usize, usize)) -> (usize, usize) {
    if e.0 < e.1 {
        e
    } else {
        (e.1, e.0)
    }
}

/// Ordered pairs of distinct pattern edges, split into (sharing a vertex, disjoint).
pub fn ordered_edge_pairs(pattern: &Graph) -> (usize, usize) {
    let pe = pattern.edges();
    let mut adjacent = 0;
    let mut disjoint = 0;
    for (i, &(a, b)) in pe.iter().enumerate() {
        for (j, &(c, d)) in pe.iter().enumerate() {
            if i == j {
                continue;
            }
            if a == c || a == d || b == c || b == d {
                adjacent += 1;
            } else {
                disjoint += 1;
            }
        }
    }
    (adjacent, disjoint)
}

/// `N_G(K_n) = (n)_{|V|}`.
pub fn kn_count(pattern: &Graph, n: usize) -> f64 {
    falling(n, pattern.num_vertices())
}

/// `N_G(K_n, e) = 2|E| (n-2)_{|V|-2}`.
pub fn kn_count_using_edge(pattern: &Graph, n: usize) -> f64 {
    let v = pattern.num_vertices();
    if n < v {
        return 0.0;
    }
    2.0 * pattern.num_edges() as f64 * falling(n - 2, v - 2)
}

/// `N_G(K_n, e, f)` for adjacent and for disjoint host edges `e, f`.
pub fn kn_count_using_edges(pattern: &Graph, n: usize) -> (f64, f64) {
    let v = pattern.num_vertices();
    let (adj, dis) = ordered_edge_pairs(pattern);
    let adjacent = if n >= 3 && v >= 3 {
        adj as f64 * falling(n - 3, v - 3)
    } else {
        0.0
    };
    let disjoint = if n >= 4 && v >= 4 {
        4.0 * dis as f64 * falling(n - 4, v - 4)
    } else {
        0.0
    };
    (adjacent, disjoint)
}
