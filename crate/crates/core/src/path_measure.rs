//! Sampled paths, grid quantization and discrete path measures.
//!
//! A path sample holds N observed paths of T steps in R^d. Quantizing each
//! step to the center of a half-open grid cube of edge `grid_resolution(N)`
//! and taking the empirical measure of the quantized paths yields the adapted
//! empirical measure, whose prefix tree carries non-degenerate conditional
//! laws.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::numfmt::fmt_sig;
use crate::ot_core::DiscreteMeasure;

/// N observed paths, each of `horizon` steps in R^`dim`.
#[derive(Debug, Clone)]
pub struct PathSample {
    /// Row n is the flattened path (x_1, ..., x_T), each x_t of length `dim`.
    paths: Vec<Vec<f64>>,
    horizon: usize,
    dim: usize,
}

impl PathSample {
    pub fn new(paths: Vec<Vec<f64>>, horizon: usize, dim: usize) -> Result<Self> {
        if horizon < 2 {
            return Err(Error::InvalidInput(format!(
                "horizon must be at least 2, got {horizon}"
            )));
        }
        if dim < 1 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if paths.is_empty() {
            return Err(Error::InvalidInput("need at least one path".into()));
        }
        for (n, p) in paths.iter().enumerate() {
            if p.len() != horizon * dim {
                return Err(Error::ShapeMismatch(format!(
                    "path {n} has {} coordinates, expected {}",
                    p.len(),
                    horizon * dim
                )));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "path {n} contains a non-finite coordinate"
                )));
            }
        }
        Ok(PathSample {
            paths,
            horizon,
            dim,
        })
    }

    pub fn n_paths(&self) -> usize {
        self.paths.len()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn path(&self, n: usize) -> &[f64] {
        &self.paths[n]
    }

    pub fn paths(&self) -> &[Vec<f64>] {
        &self.paths
    }

    /// The d-dimensional state of path `n` at step `t` (zero-based).
    pub fn point(&self, n: usize, t: usize) -> &[f64] {
        &self.paths[n][t * self.dim..(t + 1) * self.dim]
    }

    /// Applies a pointwise map to every step of every path.
    pub fn map_points(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<PathSample> {
        let mut out = Vec::with_capacity(self.paths.len());
        for p in &self.paths {
            let mut row = Vec::with_capacity(p.len());
            for t in 0..self.horizon {
                let mapped = f(&p[t * self.dim..(t + 1) * self.dim]);
                row.extend_from_slice(&mapped);
            }
            out.push(row);
        }
        PathSample::new(out, self.horizon, self.dim)
    }

    /// Writes the sample as CSV with header `path_id,t,x_1,...,x_d`, one row
    /// per (path, step), sorted by (path_id, t). Steps are one-based.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write_header(&mut w, self.dim, false)?;
        for (n, _) in self.paths.iter().enumerate() {
            for t in 0..self.horizon {
                let coords: Vec<String> = self
                    .point(n, t)
                    .iter()
                    .map(|&x| fmt_sig(x, 17))
                    .collect();
                writeln!(w, "{},{},{}", n, t + 1, coords.join(","))?;
            }
        }
        Ok(())
    }

    pub fn write_csv_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<PathSample> {
        let (paths, _, horizon, dim) = read_path_rows(r)?;
        PathSample::new(paths, horizon, dim)
    }

    pub fn read_csv_file(path: impl AsRef<Path>) -> Result<PathSample> {
        let f = std::fs::File::open(path)?;
        PathSample::read_csv(std::io::BufReader::new(f))
    }
}

fn write_header<W: Write>(w: &mut W, dim: usize, weighted: bool) -> Result<()> {
    let mut cols = vec!["path_id".to_string(), "t".to_string()];
    for i in 1..=dim {
        cols.push(format!("x_{i}"));
    }
    if weighted {
        cols.push("weight".to_string());
    }
    writeln!(w, "{}", cols.join(","))?;
    Ok(())
}

/// Rows of a path file: the paths, their weights when a weight column is
/// present, the horizon and the dimension.
type PathRows = (Vec<Vec<f64>>, Option<Vec<f64>>, usize, usize);

/// Parses `path_id,t,x_1,...,x_d[,weight]` rows sorted by (path_id, t).
fn read_path_rows<R: BufRead>(r: R) -> Result<PathRows> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty file".into()))??;
    let cols: Vec<&str> = header.trim().split(',').collect();
    if cols.len() < 3 || cols[0] != "path_id" || cols[1] != "t" {
        return Err(Error::Parse(format!(
            "expected header path_id,t,x_1,...  got '{header}'"
        )));
    }
    let weighted = *cols.last().unwrap() == "weight";
    let dim = cols.len() - 2 - usize::from(weighted);
    if dim == 0 {
        return Err(Error::Parse("header has no coordinate columns".into()));
    }
    for (i, c) in cols[2..2 + dim].iter().enumerate() {
        if *c != format!("x_{}", i + 1) {
            return Err(Error::Parse(format!(
                "expected column x_{}, got '{c}'",
                i + 1
            )));
        }
    }

    let mut paths: Vec<Vec<f64>> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut current_id: Option<u64> = None;
    let mut expected_t = 1u64;
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(Error::Parse(format!(
                "row {} has {} fields, expected {}",
                lineno + 2,
                fields.len(),
                cols.len()
            )));
        }
        let parse = |s: &str, what: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("row {}: bad {what} '{s}'", lineno + 2)))
        };
        let id = fields[0]
            .trim()
            .parse::<u64>()
            .map_err(|_| Error::Parse(format!("row {}: bad path_id", lineno + 2)))?;
        let t = fields[1]
            .trim()
            .parse::<u64>()
            .map_err(|_| Error::Parse(format!("row {}: bad t", lineno + 2)))?;
        if current_id != Some(id) {
            if let Some(prev) = current_id {
                if id < prev {
                    return Err(Error::Parse("rows must be sorted by path_id".into()));
                }
            }
            current_id = Some(id);
            expected_t = 1;
            paths.push(Vec::new());
            if weighted {
                weights.push(parse(fields[2 + dim], "weight")?);
            }
        }
        if t != expected_t {
            return Err(Error::Parse(format!(
                "row {}: expected t={expected_t} for path {id}, got {t}",
                lineno + 2
            )));
        }
        expected_t += 1;
        let row = paths.last_mut().unwrap();
        for (i, field) in fields[2..2 + dim].iter().enumerate() {
            row.push(parse(field, &format!("x_{}", i + 1))?);
        }
        if weighted {
            let w = parse(fields[2 + dim], "weight")?;
            if (w - *weights.last().unwrap()).abs() > 1e-12 {
                return Err(Error::Parse(format!(
                    "row {}: weight differs within path {id}",
                    lineno + 2
                )));
            }
        }
    }
    if paths.is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }
    let coords = paths[0].len();
    if !coords.is_multiple_of(dim) {
        return Err(Error::Parse("incomplete path rows".into()));
    }
    let horizon = coords / dim;
    Ok((
        paths,
        if weighted { Some(weights) } else { None },
        horizon,
        dim,
    ))
}

/// Uniform grid of half-open cubes `[k*delta, (k+1)*delta)` (componentwise,
/// shifted by `anchor`), each mapped to its center.
#[derive(Debug, Clone)]
pub struct GridQuantizer {
    delta: f64,
    anchor: Vec<f64>,
}

impl GridQuantizer {
    /// Grid anchored at the origin.
    pub fn new(delta: f64) -> Result<Self> {
        GridQuantizer::with_anchor(delta, Vec::new())
    }

    /// Grid with an explicit anchor; an empty anchor means the origin in any
    /// dimension.
    pub fn with_anchor(delta: f64, anchor: Vec<f64>) -> Result<Self> {
        if !delta.is_finite() || delta <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "edge length must be positive and finite, got {delta}"
            )));
        }
        if anchor.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidInput("anchor must be finite".into()));
        }
        Ok(GridQuantizer { delta, anchor })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    fn anchor_at(&self, i: usize) -> f64 {
        self.anchor.get(i).copied().unwrap_or(0.0)
    }

    /// Center of the half-open cube containing `x` (componentwise).
    pub fn quantize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(i, &v)| {
                let a = self.anchor_at(i);
                let k = ((v - a) / self.delta).floor();
                a + (k + 0.5) * self.delta
            })
            .collect()
    }

    /// Applies the quantizer to every step of every path of a sample.
    pub fn quantize_sample(&self, sample: &PathSample) -> Result<PathSample> {
        sample.map_points(|p| self.quantize(p))
    }
}

/// Grid edge length `N^{-r}` with `r = 1/(T+1)` in dimension one and
/// `r = 1/(dT)` in dimension two and higher.
pub fn grid_resolution(n_samples: usize, dim: usize, horizon: usize) -> Result<f64> {
    if n_samples < 1 {
        return Err(Error::Precondition("need at least one sample".into()));
    }
    if dim < 1 {
        return Err(Error::Precondition("dimension must be at least 1".into()));
    }
    if horizon < 2 {
        return Err(Error::Precondition(format!(
            "horizon must be at least 2, got {horizon}"
        )));
    }
    let r = if dim == 1 {
        1.0 / (horizon as f64 + 1.0)
    } else {
        1.0 / (dim as f64 * horizon as f64)
    };
    Ok((n_samples as f64).powf(-r))
}

/// Node of a prefix tree. The root (depth 0) holds the empty prefix; a node
/// at depth t represents a distinct prefix x_{1:t} of the support.
#[derive(Debug, Clone)]
pub struct PrefixNode {
    pub depth: usize,
    /// The step value x_t by which this node extends its parent; empty at the
    /// root.
    pub point: Vec<f64>,
    pub mass: f64,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Index into the support for leaves (depth == horizon).
    pub path_index: Option<usize>,
}

/// Child step values, their conditional probabilities and node identifiers.
pub type ChildLaw<'a> = (Vec<&'a [f64]>, Vec<f64>, Vec<usize>);

/// Prefix-tree disintegration of a discrete path measure.
#[derive(Debug, Clone)]
pub struct PrefixTree {
    nodes: Vec<PrefixNode>,
    by_depth: Vec<Vec<usize>>,
}

impl PrefixTree {
    fn build(support: &[Vec<f64>], weights: &[f64], horizon: usize, dim: usize) -> PrefixTree {
        let mut nodes = vec![PrefixNode {
            depth: 0,
            point: Vec::new(),
            mass: 0.0,
            parent: None,
            children: Vec::new(),
            path_index: None,
        }];
        let mut by_depth: Vec<Vec<usize>> = vec![vec![0]];
        for _ in 0..horizon {
            by_depth.push(Vec::new());
        }
        for (idx, (path, &w)) in support.iter().zip(weights).enumerate() {
            nodes[0].mass += w;
            let mut node = 0usize;
            for t in 0..horizon {
                let step = &path[t * dim..(t + 1) * dim];
                let found = nodes[node].children.iter().copied().find(|&c| {
                    nodes[c].point.len() == step.len()
                        && nodes[c]
                            .point
                            .iter()
                            .zip(step)
                            .all(|(a, b)| a.to_bits() == b.to_bits())
                });
                let child = match found {
                    Some(c) => c,
                    None => {
                        let c = nodes.len();
                        nodes.push(PrefixNode {
                            depth: t + 1,
                            point: step.to_vec(),
                            mass: 0.0,
                            parent: Some(node),
                            children: Vec::new(),
                            path_index: None,
                        });
                        nodes[node].children.push(c);
                        by_depth[t + 1].push(c);
                        c
                    }
                };
                nodes[child].mass += w;
                if t + 1 == horizon {
                    nodes[child].path_index = Some(idx);
                }
                node = child;
            }
        }
        PrefixTree { nodes, by_depth }
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn node(&self, id: usize) -> &PrefixNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Identifiers of all distinct prefixes of length `depth`.
    pub fn nodes_at_depth(&self, depth: usize) -> &[usize] {
        &self.by_depth[depth]
    }

    /// Conditional law of the next step at `node`: child step values and
    /// their conditional probabilities, paired with the child identifiers.
    pub fn child_law(&self, node: usize) -> ChildLaw<'_> {
        let n = &self.nodes[node];
        let mut points = Vec::with_capacity(n.children.len());
        let mut probs = Vec::with_capacity(n.children.len());
        for &c in &n.children {
            points.push(self.nodes[c].point.as_slice());
            probs.push(self.nodes[c].mass / n.mass);
        }
        (points, probs, n.children.clone())
    }

    /// The full prefix x_{1:t} carried by a node.
    pub fn prefix(&self, node: usize) -> Vec<f64> {
        let mut rev: Vec<&[f64]> = Vec::new();
        let mut cur = Some(node);
        while let Some(id) = cur {
            if id == 0 {
                break;
            }
            rev.push(&self.nodes[id].point);
            cur = self.nodes[id].parent;
        }
        rev.reverse();
        rev.concat()
    }

    /// Descends along a prefix given as concatenated step values; `None` when
    /// the prefix carries no mass.
    pub fn descend(&self, prefix: &[f64], dim: usize) -> Option<usize> {
        if !prefix.len().is_multiple_of(dim) {
            return None;
        }
        let mut node = 0usize;
        for step in prefix.chunks(dim) {
            let found = self.nodes[node].children.iter().copied().find(|&c| {
                self.nodes[c]
                    .point
                    .iter()
                    .zip(step)
                    .all(|(a, b)| a.to_bits() == b.to_bits())
                    && self.nodes[c].point.len() == step.len()
            });
            node = found?;
        }
        Some(node)
    }
}

/// A finitely supported probability measure on the path space (R^d)^T with a
/// prefix-tree disintegration.
#[derive(Debug, Clone)]
pub struct DiscretePathMeasure {
    support: Vec<Vec<f64>>,
    weights: Vec<f64>,
    horizon: usize,
    dim: usize,
    tree: PrefixTree,
}

impl DiscretePathMeasure {
    /// Builds a measure from distinct support paths; weights must be strictly
    /// positive and sum to 1 within 1e-12.
    pub fn new(
        support: Vec<Vec<f64>>,
        weights: Vec<f64>,
        horizon: usize,
        dim: usize,
    ) -> Result<Self> {
        if support.is_empty() || support.len() != weights.len() {
            return Err(Error::InvalidInput(
                "support and weights must be non-empty and of equal length".into(),
            ));
        }
        if horizon < 2 || dim < 1 {
            return Err(Error::InvalidInput(
                "need horizon >= 2 and dimension >= 1".into(),
            ));
        }
        let mut seen = HashMap::new();
        for (i, p) in support.iter().enumerate() {
            if p.len() != horizon * dim {
                return Err(Error::ShapeMismatch(format!(
                    "support path {i} has {} coordinates, expected {}",
                    p.len(),
                    horizon * dim
                )));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "support path {i} is not finite"
                )));
            }
            let key: Vec<u64> = p.iter().map(|x| x.to_bits()).collect();
            if seen.insert(key, i).is_some() {
                return Err(Error::InvalidInput(format!(
                    "support path {i} occurs twice"
                )));
            }
        }
        let mut total = 0.0;
        for (i, w) in weights.iter().enumerate() {
            if !w.is_finite() || *w <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "weight {i} must be strictly positive"
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
        let tree = PrefixTree::build(&support, &weights, horizon, dim);
        Ok(DiscretePathMeasure {
            support,
            weights,
            horizon,
            dim,
            tree,
        })
    }

    /// Builds a measure from possibly repeated paths, merging duplicates by
    /// summing weights.
    pub fn from_weighted_paths(
        paths: Vec<Vec<f64>>,
        weights: Vec<f64>,
        horizon: usize,
        dim: usize,
    ) -> Result<Self> {
        let mut order: Vec<Vec<f64>> = Vec::new();
        let mut merged: Vec<f64> = Vec::new();
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        for (p, w) in paths.into_iter().zip(weights) {
            let key: Vec<u64> = p.iter().map(|x| x.to_bits()).collect();
            match index.entry(key) {
                std::collections::hash_map::Entry::Occupied(e) => merged[*e.get()] += w,
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(order.len());
                    order.push(p);
                    merged.push(w);
                }
            }
        }
        DiscretePathMeasure::new(order, merged, horizon, dim)
    }

    pub fn support(&self) -> &[Vec<f64>] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn prefix_tree(&self) -> &PrefixTree {
        &self.tree
    }

    /// Conditional one-step law of x_{t+1} given the prefix x_{1:t}.
    ///
    /// The prefix is passed as `t` concatenated step values; it must carry
    /// positive mass.
    pub fn disintegrate(&self, prefix: &[f64]) -> Result<DiscreteMeasure> {
        if !prefix.len().is_multiple_of(self.dim) || prefix.len() >= self.horizon * self.dim {
            return Err(Error::InvalidInput(format!(
                "prefix length {} is not a multiple of the dimension below the horizon",
                prefix.len()
            )));
        }
        let node = self
            .tree
            .descend(prefix, self.dim)
            .ok_or(Error::UnsupportedPrefix)?;
        let (points, probs, _) = self.tree.child_law(node);
        DiscreteMeasure::from_weighted_points(
            points.into_iter().map(|p| p.to_vec()).collect(),
            probs,
        )
    }

    /// Marginal law of the first step.
    pub fn first_step_marginal(&self) -> DiscreteMeasure {
        let (points, probs, _) = self.tree.child_law(self.tree.root());
        DiscreteMeasure::from_weighted_points(
            points.into_iter().map(|p| p.to_vec()).collect(),
            probs,
        )
        .expect("root child law is a probability measure")
    }

    /// Flattens the path measure to a discrete measure on R^{dT}.
    pub fn as_flat_measure(&self) -> DiscreteMeasure {
        DiscreteMeasure::new(self.support.clone(), self.weights.clone())
            .expect("support is distinct and weights sum to one")
    }

    /// Applies a pointwise map to each step of each support path, merging any
    /// collided paths.
    pub fn map_points(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<DiscretePathMeasure> {
        let mapped: Vec<Vec<f64>> = self
            .support
            .iter()
            .map(|p| {
                let mut row = Vec::with_capacity(p.len());
                for t in 0..self.horizon {
                    row.extend(f(&p[t * self.dim..(t + 1) * self.dim]));
                }
                row
            })
            .collect();
        DiscretePathMeasure::from_weighted_paths(mapped, self.weights.clone(), self.horizon, self.dim)
    }

    /// Writes the measure as CSV `path_id,t,x_1,...,x_d,weight` with the
    /// weight repeated on every row of a path.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write_header(&mut w, self.dim, true)?;
        for (n, (path, &weight)) in self.support.iter().zip(&self.weights).enumerate() {
            for t in 0..self.horizon {
                let coords: Vec<String> = path[t * self.dim..(t + 1) * self.dim]
                    .iter()
                    .map(|&x| fmt_sig(x, 17))
                    .collect();
                writeln!(
                    w,
                    "{},{},{},{}",
                    n,
                    t + 1,
                    coords.join(","),
                    fmt_sig(weight, 17)
                )?;
            }
        }
        Ok(())
    }

    pub fn write_csv_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    /// Reads a measure from `path_id,t,x_1,...,x_d[,weight]` rows. Without a
    /// weight column every path gets weight 1/N; duplicate paths merge.
    pub fn read_csv<R: BufRead>(r: R) -> Result<DiscretePathMeasure> {
        let (paths, weights, horizon, dim) = read_path_rows(r)?;
        if horizon < 2 {
            return Err(Error::Parse(format!(
                "measure file has horizon {horizon}, need at least 2"
            )));
        }
        let n = paths.len();
        let weights = match weights {
            Some(w) => {
                let total: f64 = w.iter().sum();
                if total <= 0.0 {
                    return Err(Error::Parse("weights must have positive total".into()));
                }
                w.iter().map(|x| x / total).collect()
            }
            None => vec![1.0 / n as f64; n],
        };
        DiscretePathMeasure::from_weighted_paths(paths, weights, horizon, dim)
    }

    pub fn read_csv_file(path: impl AsRef<Path>) -> Result<DiscretePathMeasure> {
        let f = std::fs::File::open(path)?;
        DiscretePathMeasure::read_csv(std::io::BufReader::new(f))
    }
}

/// Empirical measure of a sample: one atom per distinct observed path with
/// weight multiplicity/N.
pub fn empirical_measure(sample: &PathSample) -> DiscretePathMeasure {
    let n = sample.n_paths() as f64;
    DiscretePathMeasure::from_weighted_paths(
        sample.paths().to_vec(),
        vec![1.0 / n; sample.n_paths()],
        sample.horizon(),
        sample.dim(),
    )
    .expect("a valid sample yields a valid empirical measure")
}

/// Adapted empirical measure: the empirical measure of the sample quantized
/// to the grid with edge `grid_resolution(N, d, T)`.
pub fn adapted_empirical_measure(sample: &PathSample) -> DiscretePathMeasure {
    let delta = grid_resolution(sample.n_paths(), sample.dim(), sample.horizon())
        .expect("sample dimensions are validated on construction");
    let quantizer = GridQuantizer::new(delta).expect("positive edge length");
    let quantized = quantizer
        .quantize_sample(sample)
        .expect("quantization preserves shape");
    empirical_measure(&quantized)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn sample_1d(paths: &[[f64; 2]]) -> PathSample {
        PathSample::new(paths.iter().map(|p| p.to_vec()).collect(), 2, 1).unwrap()
    }

    #[test]
    fn grid_resolution_closed_form() {
        assert_abs_diff_eq!(grid_resolution(1, 1, 2).unwrap(), 1.0);
        assert_abs_diff_eq!(
            grid_resolution(1000, 1, 2).unwrap(),
            0.1,
            epsilon = 1e-15
        );
        // 64^(-1/6) = 0.5 exactly.
        assert_abs_diff_eq!(grid_resolution(64, 2, 3).unwrap(), 0.5, epsilon = 1e-15);
        assert!(grid_resolution(10, 1, 1).is_err());
        assert!(grid_resolution(10, 0, 2).is_err());
        assert!(grid_resolution(0, 1, 2).is_err());
    }

    #[test]
    fn grid_resolution_decreasing_and_matches_formula() {
        // Ten (N, d, T) triples checked against an independent log-space
        // evaluation.
        let cases = [
            (2usize, 1usize, 2usize),
            (5, 1, 3),
            (10, 2, 2),
            (17, 3, 4),
            (100, 1, 5),
            (250, 2, 3),
            (999, 4, 2),
            (1024, 1, 2),
            (4096, 2, 6),
            (100_000, 3, 3),
        ];
        for (n, d, t) in cases {
            let r = if d == 1 {
                1.0 / (t as f64 + 1.0)
            } else {
                1.0 / (d as f64 * t as f64)
            };
            let expect = (-r * (n as f64).ln()).exp();
            let got = grid_resolution(n, d, t).unwrap();
            assert_abs_diff_eq!(got, expect, epsilon = 1e-12);
            let next = grid_resolution(n + 1, d, t).unwrap();
            assert!(next < got);
        }
    }

    #[test]
    fn quantize_examples() {
        let q1 = GridQuantizer::new(1.0).unwrap();
        assert_abs_diff_eq!(q1.quantize(&[0.3])[0], 0.5);
        assert_abs_diff_eq!(q1.quantize(&[0.5])[0], 0.5);
        let qhalf = GridQuantizer::new(0.5).unwrap();
        assert_abs_diff_eq!(qhalf.quantize(&[-0.2])[0], -0.25);
    }

    proptest! {
        #[test]
        fn quantize_is_idempotent_and_close(x in -1e6f64..1e6, delta in 1e-3f64..1e3) {
            let q = GridQuantizer::new(delta).unwrap();
            let c = q.quantize(&[x]);
            let cc = q.quantize(&c);
            prop_assert_eq!(c[0].to_bits(), cc[0].to_bits());
            prop_assert!((x - c[0]).abs() <= delta / 2.0 + 1e-9 * delta);
        }

        #[test]
        fn adapted_empirical_equals_empirical_of_quantized(
            raw in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..20)
        ) {
            let paths: Vec<[f64; 2]> = raw.iter().map(|&(a, b)| [a, b]).collect();
            let sample = sample_1d(&paths);
            let adapted = adapted_empirical_measure(&sample);
            let delta = grid_resolution(sample.n_paths(), 1, 2).unwrap();
            let q = GridQuantizer::new(delta).unwrap();
            let manual = empirical_measure(&q.quantize_sample(&sample).unwrap());
            prop_assert_eq!(adapted.len(), manual.len());
            for (p, w) in adapted.support().iter().zip(adapted.weights()) {
                let key: Vec<u64> = p.iter().map(|x| x.to_bits()).collect();
                let idx = manual.support().iter().position(|q| {
                    q.iter().map(|x| x.to_bits()).collect::<Vec<_>>() == key
                });
                prop_assert!(idx.is_some());
                prop_assert!((manual.weights()[idx.unwrap()] - w).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn empirical_measure_merges_duplicates() {
        let m = empirical_measure(&sample_1d(&[[0.5, 1.5], [0.5, 1.5]]));
        assert_eq!(m.len(), 1);
        assert_abs_diff_eq!(m.weights()[0], 1.0);

        let m = empirical_measure(&sample_1d(&[[0.0, 0.0], [1.0, 1.0]]));
        assert_eq!(m.len(), 2);
        assert_abs_diff_eq!(m.weights()[0], 0.5);

        let m = empirical_measure(&sample_1d(&[[0.0, 0.0], [1.0, 1.0], [0.0, 0.0]]));
        let w0 = m.weights()[m
            .support()
            .iter()
            .position(|p| p == &vec![0.0, 0.0])
            .unwrap()];
        assert_abs_diff_eq!(w0, 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn adapted_empirical_single_path_is_quantized_dirac() {
        let sample = sample_1d(&[[0.31, 0.87]]);
        let m = adapted_empirical_measure(&sample);
        assert_eq!(m.len(), 1);
        // N = 1 gives edge length 1, so both steps land on cube centers.
        assert_abs_diff_eq!(m.support()[0][0], 0.5);
        assert_abs_diff_eq!(m.support()[0][1], 0.5);
    }

    #[test]
    fn adapted_empirical_merges_close_paths() {
        // Four paths whose first steps lie in one cube and whose second steps
        // lie in another: with N = 4 and T = 2 the edge is 4^(-1/3) ~ 0.63,
        // so the values {0.1, 0.2} and {0.8, 0.9} merge into single cubes and
        // the measure collapses onto one path.
        let sample = sample_1d(&[[0.1, 0.9], [0.1, 0.8], [0.2, 0.9], [0.2, 0.8]]);
        let m = adapted_empirical_measure(&sample);
        assert_eq!(m.len(), 1);
        assert_abs_diff_eq!(m.weights()[0], 1.0);
    }

    #[test]
    fn adapted_empirical_fixed_on_grid_centers() {
        // Paths already sitting on cube centers are fixed points of the
        // quantizer, so the adapted empirical equals the plain empirical.
        let n = 3usize;
        let delta = grid_resolution(n, 1, 2).unwrap();
        let c = |k: f64| (k + 0.5) * delta;
        let sample = sample_1d(&[[c(0.0), c(1.0)], [c(2.0), c(0.0)], [c(-1.0), c(3.0)]]);
        let adapted = adapted_empirical_measure(&sample);
        let plain = empirical_measure(&sample);
        assert_eq!(adapted.len(), plain.len());
        for (p, q) in adapted.support().iter().zip(plain.support()) {
            assert_eq!(p, q);
        }
    }

    #[test]
    fn prefix_tree_recomposes_weights() {
        let m = DiscretePathMeasure::new(
            vec![
                vec![0.0, 0.0, 0.0],
                vec![0.0, 0.0, 1.0],
                vec![0.0, 1.0, 0.0],
                vec![1.0, 1.0, 1.0],
            ],
            vec![0.1, 0.2, 0.3, 0.4],
            3,
            1,
        )
        .unwrap();
        let tree = m.prefix_tree();
        for (idx, (path, &w)) in m.support().iter().zip(m.weights()).enumerate() {
            // Multiply the conditional probabilities along the path.
            let mut node = tree.root();
            let mut prob = 1.0;
            for t in 0..m.horizon() {
                let step = &path[t..t + 1];
                let (points, probs, kids) = tree.child_law(node);
                let pos = points
                    .iter()
                    .position(|p| p[0].to_bits() == step[0].to_bits())
                    .unwrap();
                prob *= probs[pos];
                node = kids[pos];
            }
            assert_eq!(tree.node(node).path_index, Some(idx));
            assert_abs_diff_eq!(prob, w, epsilon = 1e-12);
        }
        // Child masses add up to the node mass everywhere.
        for depth in 0..m.horizon() {
            for &id in tree.nodes_at_depth(depth) {
                let node = tree.node(id);
                let child_mass: f64 = node.children.iter().map(|&c| tree.node(c).mass).sum();
                assert_abs_diff_eq!(child_mass, node.mass, epsilon = 1e-12);
                let (_, probs, _) = tree.child_law(id);
                assert_abs_diff_eq!(probs.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn disintegrate_constant_kernel() {
        let m = DiscretePathMeasure::new(
            vec![vec![0.0, 0.0], vec![1.0, 0.0]],
            vec![0.5, 0.5],
            2,
            1,
        )
        .unwrap();
        for prefix in [[0.0], [1.0]] {
            let law = m.disintegrate(&prefix).unwrap();
            assert_eq!(law.len(), 1);
            assert_abs_diff_eq!(law.points()[0][0], 0.0);
        }
    }

    #[test]
    fn disintegrate_unsupported_prefix_errors() {
        let m = DiscretePathMeasure::new(vec![vec![0.0, 1.0]], vec![1.0], 2, 1).unwrap();
        assert!(matches!(
            m.disintegrate(&[7.0]),
            Err(Error::UnsupportedPrefix)
        ));
    }

    #[test]
    fn disintegrate_unique_continuation_is_dirac() {
        let sample = sample_1d(&[[0.0, 3.0], [1.0, 4.0]]);
        let m = empirical_measure(&sample);
        let law = m.disintegrate(&[1.0]).unwrap();
        assert_eq!(law.len(), 1);
        assert_abs_diff_eq!(law.points()[0][0], 4.0);
    }

    #[test]
    fn csv_round_trip_sample_and_measure() {
        let sample = sample_1d(&[[0.125, -3.5], [7.0, 0.25]]);
        let mut buf = Vec::new();
        sample.write_csv(&mut buf).unwrap();
        let back = PathSample::read_csv(&buf[..]).unwrap();
        assert_eq!(back.paths(), sample.paths());

        let m = DiscretePathMeasure::new(
            vec![vec![0.0, 1.0], vec![2.0, 3.0]],
            vec![0.25, 0.75],
            2,
            1,
        )
        .unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let back = DiscretePathMeasure::read_csv(&buf[..]).unwrap();
        assert_eq!(back.support(), m.support());
        for (a, b) in back.weights().iter().zip(m.weights()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn csv_rejects_malformed_input() {
        assert!(PathSample::read_csv("nonsense\n".as_bytes()).is_err());
        assert!(PathSample::read_csv("path_id,t,x_1\n".as_bytes()).is_err());
        assert!(
            PathSample::read_csv("path_id,t,x_1\n0,2,1.0\n".as_bytes()).is_err(),
            "first step of a path must have t = 1"
        );
    }
}
