//! Shared brute-force oracles and random instance generators for the
//! integration suites. Everything here is independent of the production
//! solver paths: the transport oracle enumerates polytope vertices directly.

use adapted_ot::path_measure::DiscretePathMeasure;
use adapted_ot::rng::CounterRng;

/// Exact minimum of the transport LP by enumerating all basic feasible
/// solutions: every spanning tree of the bipartite support graph induces a
/// unique flow; feasible ones are the polytope's vertices and one of them is
/// optimal. Practical for m + n <= 9.
pub fn transport_bruteforce(a: &[f64], b: &[f64], cost: &[Vec<f64>]) -> f64 {
    let m = a.len();
    let n = b.len();
    assert!(m >= 1 && n >= 1 && m * n <= 36, "oracle is for tiny instances");
    let cells: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .collect();
    let want = m + n - 1;
    let mut best = f64::INFINITY;
    let mut chosen = vec![0usize; want];

    // Enumerate all size-(m+n-1) subsets of cells.
    fn visit(
        cells: &[(usize, usize)],
        start: usize,
        chosen: &mut Vec<usize>,
        pos: usize,
        ctx: &mut dyn FnMut(&[usize]),
    ) {
        if pos == chosen.len() {
            ctx(chosen);
            return;
        }
        let remaining = chosen.len() - pos;
        for k in start..=cells.len() - remaining {
            chosen[pos] = k;
            visit(cells, k + 1, chosen, pos + 1, ctx);
        }
    }

    let mut evaluate = |subset: &[usize]| {
        // Tree check: m + n - 1 edges over m + n nodes must be connected.
        let nodes = m + n;
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nodes];
        for &k in subset {
            let (i, j) = cells[k];
            adj[i].push((m + j, k));
            adj[m + j].push((i, k));
        }
        let mut seen = vec![false; nodes];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(w, _) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        if count != nodes {
            return;
        }
        // Leaf elimination determines the unique flow on the tree.
        let mut supply: Vec<f64> = a.iter().copied().chain(b.iter().map(|x| -x)).collect();
        let mut degree: Vec<usize> = adj.iter().map(|l| l.len()).collect();
        let mut removed = vec![false; subset.len()];
        let mut flow = vec![0.0f64; subset.len()];
        let mut queue: Vec<usize> = (0..nodes).filter(|&v| degree[v] == 1).collect();
        while let Some(v) = queue.pop() {
            if degree[v] != 1 {
                continue;
            }
            let &(w, edge_pos) = adj[v]
                .iter()
                .find(|&&(_, k)| !removed[subset.iter().position(|&s| s == k).unwrap()])
                .expect("leaf has one live edge");
            let local = subset.iter().position(|&s| s == edge_pos).unwrap();
            // Mass on the edge is the leaf's residual, signed by side.
            let f = if v < m { supply[v] } else { -supply[v] };
            flow[local] = f;
            removed[local] = true;
            supply[w] += supply[v];
            supply[v] = 0.0;
            degree[v] -= 1;
            degree[w] -= 1;
            if degree[w] == 1 {
                queue.push(w);
            }
        }
        if flow.iter().any(|&f| f < -1e-12) {
            return;
        }
        let total: f64 = subset
            .iter()
            .zip(&flow)
            .map(|(&k, &f)| {
                let (i, j) = cells[k];
                f * cost[i][j]
            })
            .sum();
        if total < best {
            best = total;
        }
    };
    visit(&cells, 0, &mut chosen, 0, &mut evaluate);
    best
}

/// Distinct values on a small lattice, avoiding near-duplicate atoms.
fn distinct_values(rng: &CounterRng, base: u64, count: usize, span: f64) -> Vec<f64> {
    let mut values = Vec::with_capacity(count);
    let mut ctr = 0u64;
    while values.len() < count {
        let v = ((rng.u64_at(base + ctr) % 41) as f64 / 40.0 - 0.5) * 2.0 * span;
        ctr += 1;
        if !values.contains(&v) {
            values.push(v);
        }
    }
    values
}

fn random_weights(rng: &CounterRng, base: u64, count: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..count)
        .map(|i| 0.05 + rng.uniform_at(base + i as u64))
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Random two-step scalar path measure with at most `max_atoms` distinct
/// values per time step.
pub fn random_two_step_measure(seed: u64, max_atoms: usize) -> DiscretePathMeasure {
    let rng = CounterRng::new(seed, 0xbeef);
    let k1 = 1 + (rng.u64_at(0) % max_atoms as u64) as usize;
    let firsts = distinct_values(&rng, 100, k1, 2.0);
    let marginal = random_weights(&rng, 200, k1);
    let mut support = Vec::new();
    let mut weights = Vec::new();
    for (i, (&x1, &w1)) in firsts.iter().zip(&marginal).enumerate() {
        let base = 1_000 * (i as u64 + 1);
        let k2 = 1 + (rng.u64_at(base) % max_atoms as u64) as usize;
        let seconds = distinct_values(&rng, base + 100, k2, 2.0);
        let conditional = random_weights(&rng, base + 200, k2);
        for (&x2, &w2) in seconds.iter().zip(&conditional) {
            support.push(vec![x1, x2]);
            weights.push(w1 * w2);
        }
    }
    DiscretePathMeasure::new(support, weights, 2, 1).expect("constructed distinct support")
}

/// Random path measure with the given horizon and dimension; atoms drawn on
/// a lattice and merged, weights uniform over the drawn paths.
pub fn random_path_measure(
    seed: u64,
    horizon: usize,
    dim: usize,
    n_paths: usize,
    span: f64,
) -> DiscretePathMeasure {
    let rng = CounterRng::new(seed, 0xcafe);
    let mut paths = Vec::with_capacity(n_paths);
    for p in 0..n_paths {
        let path: Vec<f64> = (0..horizon * dim)
            .map(|c| {
                let u = rng.u64_at((p * horizon * dim + c) as u64);
                ((u % 33) as f64 / 32.0 - 0.5) * 2.0 * span
            })
            .collect();
        paths.push(path);
    }
    let w = 1.0 / n_paths as f64;
    DiscretePathMeasure::from_weighted_paths(paths, vec![w; n_paths], horizon, dim)
        .expect("valid random measure")
}
