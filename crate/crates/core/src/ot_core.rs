//! Exact optimal transport and total-variation solvers for finitely supported
//! measures.
//!
//! The flow solver works on the bipartite transport graph with successive
//! shortest paths over integer-scaled costs, so results are exact up to the
//! cost quantization of one part in 2^32 and no simplex-style cycling can
//! occur.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::numfmt::fmt_sig;
use crate::rng::CounterRng;

/// Internal cost scale; see module docs.
const COST_SCALE: f64 = 4_294_967_296.0; // 2^32

/// Supplies below this threshold are treated as exhausted.
const SUPPLY_EPS: f64 = 1e-13;

/// A finitely supported probability measure on R^k.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

fn point_key(p: &[f64]) -> Vec<u64> {
    p.iter().map(|x| x.to_bits()).collect()
}

impl DiscreteMeasure {
    /// Builds a measure from distinct atoms. Weights must be strictly
    /// positive and sum to 1 within 1e-12.
    pub fn new(points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::InvalidInput(
                "measure needs matching, non-empty points and weights".into(),
            ));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::InvalidInput("zero-dimensional atoms".into()));
        }
        let mut seen = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::ShapeMismatch(format!(
                    "atom {i} has dimension {} instead of {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!("atom {i} is not finite")));
            }
            if seen.insert(point_key(p), i).is_some() {
                return Err(Error::InvalidInput(format!("atom {i} occurs twice")));
            }
        }
        let mut total = 0.0;
        for (i, w) in weights.iter().enumerate() {
            if !w.is_finite() || *w <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "weight {i} must be strictly positive, got {w}"
                )));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "weights sum to {} instead of 1",
                fmt_sig(total, 17)
            )));
        }
        Ok(DiscreteMeasure { points, weights })
    }

    /// Builds a measure from possibly repeated atoms, merging duplicates by
    /// summing their weights (bitwise equality of coordinates).
    pub fn from_weighted_points(points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        let mut order: Vec<Vec<f64>> = Vec::new();
        let mut acc: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut merged: Vec<f64> = Vec::new();
        for (p, w) in points.into_iter().zip(weights) {
            match acc.entry(point_key(&p)) {
                std::collections::hash_map::Entry::Occupied(e) => merged[*e.get()] += w,
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(order.len());
                    order.push(p);
                    merged.push(w);
                }
            }
        }
        DiscreteMeasure::new(order, merged)
    }

    /// A point mass at `point`.
    pub fn dirac(point: Vec<f64>) -> Result<Self> {
        DiscreteMeasure::new(vec![point], vec![1.0])
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    /// Writes the measure in the path CSV schema flattened to one step:
    /// `path_id,t,x_1,...,x_k,weight` with `t = 1` on every row.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        let mut cols = vec!["path_id".to_string(), "t".to_string()];
        for i in 1..=self.dim() {
            cols.push(format!("x_{i}"));
        }
        cols.push("weight".to_string());
        writeln!(w, "{}", cols.join(","))?;
        for (n, (p, &weight)) in self.points.iter().zip(&self.weights).enumerate() {
            let coords: Vec<String> = p.iter().map(|&x| fmt_sig(x, 17)).collect();
            writeln!(w, "{},1,{},{}", n, coords.join(","), fmt_sig(weight, 17))?;
        }
        Ok(())
    }

    /// Reads a measure from the single-step path CSV schema; duplicates
    /// merge, weights normalize to total mass one.
    pub fn read_csv<R: std::io::BufRead>(r: R) -> Result<DiscreteMeasure> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty measure file".into()))??;
        let cols: Vec<&str> = header.trim().split(',').collect();
        if cols.len() < 4
            || cols[0] != "path_id"
            || cols[1] != "t"
            || *cols.last().unwrap() != "weight"
        {
            return Err(Error::Parse(
                "expected header path_id,t,x_1,...,weight".into(),
            ));
        }
        let dim = cols.len() - 3;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != cols.len() {
                return Err(Error::Parse(format!(
                    "row {}: expected {} fields",
                    lineno + 2,
                    cols.len()
                )));
            }
            if fields[1].trim() != "1" {
                return Err(Error::Parse(format!(
                    "row {}: flat measures have a single step (t = 1)",
                    lineno + 2
                )));
            }
            let mut p = Vec::with_capacity(dim);
            for f in &fields[2..2 + dim] {
                p.push(f.trim().parse::<f64>().map_err(|_| {
                    Error::Parse(format!("row {}: bad coordinate '{f}'", lineno + 2))
                })?);
            }
            let w = fields[2 + dim].trim().parse::<f64>().map_err(|_| {
                Error::Parse(format!("row {}: bad weight", lineno + 2))
            })?;
            points.push(p);
            weights.push(w);
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::Parse("weights must have positive total".into()));
        }
        for w in &mut weights {
            *w /= total;
        }
        DiscreteMeasure::from_weighted_points(points, weights)
    }
}

/// A sparse transport plan between two discrete measures.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    /// (source index, target index, mass) triplets with positive mass.
    pub entries: Vec<(usize, usize, f64)>,
    pub n_sources: usize,
    pub n_targets: usize,
}

impl TransportPlan {
    pub fn row_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n_sources];
        for &(i, _, m) in &self.entries {
            sums[i] += m;
        }
        sums
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n_targets];
        for &(_, j, m) in &self.entries {
            sums[j] += m;
        }
        sums
    }

    /// Transport cost of the plan under an arbitrary cost function.
    pub fn cost_under(&self, cost: impl Fn(usize, usize) -> f64) -> f64 {
        self.entries.iter().map(|&(i, j, m)| m * cost(i, j)).sum()
    }
}

pub fn euclidean(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Exact minimum-cost transport between weight vectors `a` and `b` under a
/// dense nonnegative cost matrix (`cost[i][j]` moves mass from `i` to `j`).
///
/// Returns the optimal cost evaluated with the unscaled costs together with
/// the optimal plan. `a` and `b` must have equal totals up to 1e-10.
pub fn ot_with_cost(a: &[f64], b: &[f64], cost: &[Vec<f64>]) -> Result<(f64, TransportPlan)> {
    let m = a.len();
    let n = b.len();
    if m == 0 || n == 0 || cost.len() != m || cost.iter().any(|row| row.len() != n) {
        return Err(Error::ShapeMismatch(
            "cost matrix must be (sources x targets)".into(),
        ));
    }
    let total_a: f64 = a.iter().sum();
    let total_b: f64 = b.iter().sum();
    if (total_a - total_b).abs() > 1e-10 {
        return Err(Error::InvalidInput(format!(
            "mass mismatch: {} vs {}",
            fmt_sig(total_a, 17),
            fmt_sig(total_b, 17)
        )));
    }

    let mut c_int = vec![vec![0i128; n]; m];
    for i in 0..m {
        for j in 0..n {
            let c = cost[i][j];
            if !c.is_finite() || c < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "cost[{i}][{j}] must be finite and nonnegative, got {c}"
                )));
            }
            c_int[i][j] = (c * COST_SCALE).round() as i128;
        }
    }

    // Rescale demands so that totals agree exactly enough for the sweep.
    let scale = total_a / total_b;
    let mut rem_a = a.to_vec();
    let mut rem_b: Vec<f64> = b.iter().map(|w| w * scale).collect();
    let mut flow = vec![vec![0.0f64; n]; m];

    let nodes = m + n;
    let mut potential = vec![0i128; nodes];
    let max_rounds = 4 * (m + n) + 64;
    let mut rounds = 0usize;

    while rem_a.iter().any(|&r| r > SUPPLY_EPS) {
        rounds += 1;
        if rounds > max_rounds {
            return Err(Error::InvalidInput(
                "transport solver failed to converge".into(),
            ));
        }
        // Multi-source Dijkstra over the residual graph with reduced costs.
        const UNREACHED: i128 = i128::MAX;
        let mut dist = vec![UNREACHED; nodes];
        let mut parent = vec![usize::MAX; nodes];
        let mut settled = vec![false; nodes];
        let mut heap: BinaryHeap<Reverse<(i128, usize)>> = BinaryHeap::new();
        for (i, &r) in rem_a.iter().enumerate() {
            if r > SUPPLY_EPS {
                dist[i] = 0;
                heap.push(Reverse((0, i)));
            }
        }
        let mut target = usize::MAX;
        let mut dist_t = 0i128;
        while let Some(Reverse((d, v))) = heap.pop() {
            if settled[v] || d > dist[v] {
                continue;
            }
            settled[v] = true;
            if v >= m && rem_b[v - m] > SUPPLY_EPS {
                target = v;
                dist_t = d;
                break;
            }
            if v < m {
                let i = v;
                for j in 0..n {
                    let w = c_int[i][j] + potential[i] - potential[m + j];
                    debug_assert!(w >= 0);
                    let nd = d + w;
                    if nd < dist[m + j] {
                        dist[m + j] = nd;
                        parent[m + j] = i;
                        heap.push(Reverse((nd, m + j)));
                    }
                }
            } else {
                let j = v - m;
                for i in 0..m {
                    if flow[i][j] > 0.0 {
                        let w = -c_int[i][j] + potential[m + j] - potential[i];
                        debug_assert!(w >= 0);
                        let nd = d + w;
                        if nd < dist[i] {
                            dist[i] = nd;
                            parent[i] = m + j;
                            heap.push(Reverse((nd, i)));
                        }
                    }
                }
            }
        }
        if target == usize::MAX {
            // No reachable demand: remaining supply is numerical residue.
            break;
        }
        for v in 0..nodes {
            let dv = if dist[v] == UNREACHED { dist_t } else { dist[v].min(dist_t) };
            potential[v] += dv;
        }
        // Walk back to the originating source, collecting the bottleneck.
        let mut path = Vec::new();
        let mut v = target;
        while parent[v] != usize::MAX {
            path.push((parent[v], v));
            v = parent[v];
        }
        let source = v;
        let mut delta = rem_a[source].min(rem_b[target - m]);
        for &(u, w) in &path {
            if u >= m {
                // Backward edge (sink u -> source w) limited by current flow.
                delta = delta.min(flow[w][u - m]);
            }
        }
        for &(u, w) in &path {
            if u < m {
                flow[u][w - m] += delta;
            } else {
                flow[w][u - m] -= delta;
            }
        }
        rem_a[source] -= delta;
        rem_b[target - m] -= delta;
        if rem_a[source] < SUPPLY_EPS {
            rem_a[source] = 0.0;
        }
        if rem_b[target - m] < SUPPLY_EPS {
            rem_b[target - m] = 0.0;
        }
    }

    let mut entries = Vec::new();
    let mut total_cost = 0.0;
    for i in 0..m {
        for j in 0..n {
            if flow[i][j] > 0.0 {
                entries.push((i, j, flow[i][j]));
                total_cost += flow[i][j] * cost[i][j];
            }
        }
    }
    Ok((
        total_cost,
        TransportPlan {
            entries,
            n_sources: m,
            n_targets: n,
        },
    ))
}

/// Exact Wasserstein-1 distance between measures on R^k with Euclidean ground
/// cost, solved as a minimum-cost flow on the bipartite support graph.
pub fn wasserstein1(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<(f64, TransportPlan)> {
    if mu.dim() != nu.dim() {
        return Err(Error::ShapeMismatch(format!(
            "dimension {} vs {}",
            mu.dim(),
            nu.dim()
        )));
    }
    let cost: Vec<Vec<f64>> = mu
        .points()
        .iter()
        .map(|p| nu.points().iter().map(|q| euclidean(p, q)).collect())
        .collect();
    ot_with_cost(mu.weights(), nu.weights(), &cost)
}

/// Exact Wasserstein-1 distance between measures on the real line via the
/// monotone (quantile) coupling of sorted atoms.
pub fn wasserstein1_1d(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<(f64, TransportPlan)> {
    if mu.dim() != 1 || nu.dim() != 1 {
        return Err(Error::ShapeMismatch(
            "quantile solver needs one-dimensional atoms".into(),
        ));
    }
    let mut a: Vec<usize> = (0..mu.len()).collect();
    let mut b: Vec<usize> = (0..nu.len()).collect();
    a.sort_by(|&i, &j| mu.points()[i][0].total_cmp(&mu.points()[j][0]));
    b.sort_by(|&i, &j| nu.points()[i][0].total_cmp(&nu.points()[j][0]));

    let mut entries = Vec::new();
    let mut cost = 0.0;
    let (mut ia, mut ib) = (0usize, 0usize);
    let mut wa = mu.weights()[a[0]];
    let mut wb = nu.weights()[b[0]];
    loop {
        let delta = wa.min(wb);
        if delta > 0.0 {
            cost += delta * (mu.points()[a[ia]][0] - nu.points()[b[ib]][0]).abs();
            entries.push((a[ia], b[ib], delta));
        }
        wa -= delta;
        wb -= delta;
        if wa <= SUPPLY_EPS {
            ia += 1;
            if ia == a.len() {
                break;
            }
            wa = mu.weights()[a[ia]];
        }
        if wb <= SUPPLY_EPS {
            ib += 1;
            if ib == b.len() {
                break;
            }
            wb = nu.weights()[b[ib]];
        }
    }
    Ok((
        cost,
        TransportPlan {
            entries,
            n_sources: mu.len(),
            n_targets: nu.len(),
        },
    ))
}

/// Accumulates signed weight differences over the union support, in a fixed
/// lexicographic point order so sums do not depend on hashing.
fn signed_differences(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Vec<(Vec<f64>, f64)> {
    let mut acc: HashMap<Vec<u64>, (Vec<f64>, f64)> = HashMap::new();
    for (p, w) in mu.points().iter().zip(mu.weights()) {
        acc.entry(point_key(p))
            .or_insert_with(|| (p.clone(), 0.0))
            .1 += w;
    }
    for (p, w) in nu.points().iter().zip(nu.weights()) {
        acc.entry(point_key(p))
            .or_insert_with(|| (p.clone(), 0.0))
            .1 -= w;
    }
    let mut out: Vec<(Vec<f64>, f64)> = acc.into_values().collect();
    out.sort_by(|a, b| {
        for (x, y) in a.0.iter().zip(&b.0) {
            let ord = x.total_cmp(y);
            if ord != std::cmp::Ordering::Equal {
                return ord;
            }
        }
        std::cmp::Ordering::Equal
    });
    out
}

/// Total variation distance: half the L1 distance of the weight vectors over
/// the union support, so that two Bernoulli laws with success probabilities
/// p and q are at distance |p - q|.
pub fn total_variation(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    0.5 * signed_differences(mu, nu)
        .iter()
        .map(|(_, d)| d.abs())
        .sum::<f64>()
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Weighted total variation: sum of (|x| + 1/2) |mu(x) - nu(x)| over the
/// union support.
pub fn tv1_weighted(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    signed_differences(mu, nu)
        .iter()
        .map(|(p, d)| (norm(p) + 0.5) * d.abs())
        .sum::<f64>()
}

/// Result of a smoothed weighted-TV evaluation together with the reported
/// numerical uncertainty (quadrature refinement delta plus truncated tail, or
/// the Monte-Carlo standard error).
#[derive(Debug, Clone, Copy)]
pub struct SmoothedTv {
    pub value: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, Copy)]
pub enum SmoothedTvMethod {
    /// Deterministic tensor-product quadrature; supported for dimension <= 3.
    Quadrature,
    /// Importance sampling from the equal mixture of the two smoothed
    /// measures. `samples == 0` selects the default of 100_000.
    MonteCarlo { samples: usize, seed: u64 },
}

fn gaussian_mixture_density(measure: &DiscreteMeasure, sigma: f64, x: &[f64]) -> f64 {
    let k = x.len() as f64;
    let norm_const = (2.0 * std::f64::consts::PI * sigma * sigma).powf(-k / 2.0);
    let inv = 1.0 / (2.0 * sigma * sigma);
    measure
        .points()
        .iter()
        .zip(measure.weights())
        .map(|(p, w)| {
            let d2: f64 = p.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            w * (-d2 * inv).exp()
        })
        .sum::<f64>()
        * norm_const
}

/// Gauss-Legendre nodes and weights on [-1, 1].
const GL8: [(f64, f64); 8] = [
    (-0.9602898564975362, 0.10122853629037626),
    (-0.7966664774136267, 0.22238103445337448),
    (-0.525532409916329, 0.31370664587788727),
    (-0.18343464249564978, 0.362_683_783_378_362),
    (0.18343464249564978, 0.362_683_783_378_362),
    (0.525532409916329, 0.31370664587788727),
    (0.7966664774136267, 0.22238103445337448),
    (0.9602898564975362, 0.10122853629037626),
];

const GL4: [(f64, f64); 4] = [
    (-0.8611363115940526, 0.34785484513745385),
    (-0.33998104358485626, 0.6521451548625461),
    (0.33998104358485626, 0.6521451548625461),
    (0.8611363115940526, 0.34785484513745385),
];

struct Axis {
    lo: f64,
    hi: f64,
}

fn quadrature_pass(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    sigma: f64,
    axes: &[Axis],
    panels_per_axis: &[usize],
    rule: &[(f64, f64)],
) -> f64 {
    let k = axes.len();
    // Per-axis flattened node/weight lists.
    let mut nodes: Vec<Vec<(f64, f64)>> = Vec::with_capacity(k);
    for (axis, &panels) in axes.iter().zip(panels_per_axis) {
        let h = (axis.hi - axis.lo) / panels as f64;
        let mut list = Vec::with_capacity(panels * rule.len());
        for p in 0..panels {
            let a = axis.lo + p as f64 * h;
            let mid = a + 0.5 * h;
            for &(t, w) in rule {
                list.push((mid + 0.5 * h * t, 0.5 * h * w));
            }
        }
        nodes.push(list);
    }
    // Tensor product traversal with an odometer over axis indices.
    let mut idx = vec![0usize; k];
    let mut x = vec![0.0f64; k];
    let mut total = 0.0;
    'outer: loop {
        let mut weight = 1.0;
        for a in 0..k {
            let (xi, wi) = nodes[a][idx[a]];
            x[a] = xi;
            weight *= wi;
        }
        let qm = gaussian_mixture_density(mu, sigma, &x);
        let qn = gaussian_mixture_density(nu, sigma, &x);
        total += weight * (norm(&x) + 0.5) * (qm - qn).abs();
        for a in (0..k).rev() {
            idx[a] += 1;
            if idx[a] < nodes[a].len() {
                continue 'outer;
            }
            idx[a] = 0;
            if a == 0 {
                break 'outer;
            }
        }
    }
    total
}

/// Smoothed weighted total variation: both measures are convolved with an
/// isotropic Gaussian of standard deviation `sigma` and their densities are
/// compared in weighted L1.
pub fn tv1_smoothed(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    sigma: f64,
    method: SmoothedTvMethod,
) -> Result<SmoothedTv> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::Precondition(format!(
            "smoothing width must be positive, got {sigma}"
        )));
    }
    if mu.dim() != nu.dim() {
        return Err(Error::ShapeMismatch(format!(
            "dimension {} vs {}",
            mu.dim(),
            nu.dim()
        )));
    }
    let k = mu.dim();
    match method {
        SmoothedTvMethod::Quadrature => {
            if k > 3 {
                return Err(Error::InvalidInput(format!(
                    "quadrature supports dimension <= 3, got {k}; use Monte-Carlo"
                )));
            }
            // Integration box: support bounding box plus eight standard
            // deviations on each side.
            let margin = 8.0 * sigma;
            let mut axes = Vec::with_capacity(k);
            for a in 0..k {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for p in mu.points().iter().chain(nu.points()) {
                    lo = lo.min(p[a]);
                    hi = hi.max(p[a]);
                }
                axes.push(Axis {
                    lo: lo - margin,
                    hi: hi + margin,
                });
            }
            let (target_width, rule, cap): (f64, &[(f64, f64)], usize) = match k {
                1 => (sigma / 2.0, &GL8, 4096),
                2 => (sigma / 2.0, &GL8, 512),
                _ => (sigma, &GL4, 96),
            };
            let panels: Vec<usize> = axes
                .iter()
                .map(|ax| {
                    let want = ((ax.hi - ax.lo) / target_width).ceil() as usize;
                    want.clamp(4, cap)
                })
                .collect();
            let coarse = quadrature_pass(mu, nu, sigma, &axes, &panels, rule);
            let fine_panels: Vec<usize> = panels.iter().map(|&p| 2 * p).collect();
            let fine = quadrature_pass(mu, nu, sigma, &axes, &fine_panels, rule);
            // Mass of a standard normal coordinate beyond eight sigmas.
            let tail_prob = 2.0 * (k as f64) * 6.221e-16;
            let max_norm = mu
                .points()
                .iter()
                .chain(nu.points())
                .map(|p| norm(p))
                .fold(0.0f64, f64::max);
            let tail = (max_norm + 0.5 + 9.0 * sigma * (k as f64).sqrt()) * tail_prob;
            Ok(SmoothedTv {
                value: fine,
                std_error: (fine - coarse).abs() + tail,
            })
        }
        SmoothedTvMethod::MonteCarlo { samples, seed } => {
            let n = if samples == 0 { 100_000 } else { samples };
            let rng = CounterRng::new(seed, 0x7131);
            let gauss = CounterRng::new(seed, 0x7132);
            let pairs_per_sample = k.div_ceil(2);
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            let mut x = vec![0.0f64; k];
            for c in 0..n as u64 {
                let pick_nu = rng.bernoulli_at(2 * c, 0.5);
                let (measure, other) = if pick_nu { (nu, mu) } else { (mu, nu) };
                let atom = rng.categorical_at(2 * c + 1, measure.weights());
                let base = &measure.points()[atom];
                for i in 0..pairs_per_sample {
                    let (z1, z2) = gauss.normal_pair_at(c * pairs_per_sample as u64 + i as u64);
                    x[2 * i] = base[2 * i] + sigma * z1;
                    if 2 * i + 1 < k {
                        x[2 * i + 1] = base[2 * i + 1] + sigma * z2;
                    }
                }
                let q_here = gaussian_mixture_density(measure, sigma, &x);
                let q_other = gaussian_mixture_density(other, sigma, &x);
                let p = 0.5 * (q_here + q_other);
                let g = if p > 0.0 {
                    (norm(&x) + 0.5) * (q_here - q_other).abs() / p
                } else {
                    0.0
                };
                sum += g;
                sumsq += g * g;
            }
            let nf = n as f64;
            let mean = sum / nf;
            let var = (sumsq / nf - mean * mean).max(0.0);
            Ok(SmoothedTv {
                value: mean,
                std_error: (var / nf).sqrt(),
            })
        }
    }
}
