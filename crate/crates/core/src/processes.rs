//! Simulators and exact laws for the example processes: the trinomial memory
//! chain, the seasonal chain and general finite-state Markov chains.
//!
//! All simulators are pure functions of `(params, seed)` driven by the
//! counter-based generator, so replications can run in any order.

use crate::error::{Error, Result};
use crate::mixing::{FiniteSequenceLaw, MixWeight};
use crate::path_measure::{DiscretePathMeasure, PathSample};
use crate::rng::CounterRng;

/// Memory chain on {-1, 0, 1}: each step keeps the previous value with
/// probability `rho` and otherwise redraws uniformly. Consecutive observed
/// pairs are `lag` steps apart.
#[derive(Debug, Clone, Copy)]
pub struct MemoryChainParams {
    pub rho: f64,
    pub lag: usize,
}

impl MemoryChainParams {
    /// `rho` may be zero (independent observations) but must stay below 1.
    pub fn new(rho: f64, lag: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::InvalidInput(format!(
                "memory parameter must lie in [0, 1), got {rho}"
            )));
        }
        if lag < 1 {
            return Err(Error::InvalidInput("lag must be at least 1".into()));
        }
        Ok(MemoryChainParams { rho, lag })
    }
}

/// Extracts overlapping windows from a scalar series of d-dimensional points:
/// slice n consists of the `horizon` consecutive points starting at position
/// `stride * n` (positions are one-based over the series).
pub fn slice_series(
    series: &[f64],
    dim: usize,
    horizon: usize,
    stride: usize,
) -> Result<PathSample> {
    if dim < 1 || stride < 1 {
        return Err(Error::InvalidInput(
            "dimension and stride must be at least 1".into(),
        ));
    }
    if !series.len().is_multiple_of(dim) {
        return Err(Error::ShapeMismatch(format!(
            "series length {} is not a multiple of the dimension {dim}",
            series.len()
        )));
    }
    let n_points = series.len() / dim;
    if n_points < horizon {
        return Err(Error::Precondition(format!(
            "series has {n_points} points, need at least {horizon}"
        )));
    }
    let n_slices = (n_points - horizon) / stride + 1;
    let mut paths = Vec::with_capacity(n_slices);
    for n in 0..n_slices {
        let start = stride * n * dim;
        paths.push(series[start..start + horizon * dim].to_vec());
    }
    PathSample::new(paths, horizon, dim)
}

/// Simulates the memory chain and returns `n_slices` pairs (T = 2, d = 1)
/// taken at stride `lag`, starting at the second generated value so that the
/// first observed pair has the stationary marginal.
pub fn simulate_memory_chain(
    params: &MemoryChainParams,
    n_slices: usize,
    seed: u64,
) -> Result<PathSample> {
    if n_slices < 1 {
        return Err(Error::Precondition("need at least one slice".into()));
    }
    let eps = CounterRng::new(seed, 1);
    let flags = CounterRng::new(seed, 2);
    // Values X_0 .. X_{lag (n-1) + 2}; slices use X_1 onwards.
    let steps = params.lag * (n_slices - 1) + 2;
    let mut series = Vec::with_capacity(steps + 1);
    let mut x = eps.trinomial_at(0);
    series.push(x);
    for n in 0..steps {
        let keep = flags.bernoulli_at(n as u64, params.rho);
        x = if keep { x } else { eps.trinomial_at(n as u64) };
        series.push(x);
    }
    slice_series(&series[1..], 1, 2, params.lag)
}

/// Exact stationary law of a memory-chain pair: the first coordinate is
/// uniform on {-1, 0, 1} and the second keeps it with probability `rho`,
/// otherwise redraws uniformly. Nine atoms on {-1, 0, 1}^2.
pub fn exact_law_memory_chain(rho: f64) -> Result<DiscretePathMeasure> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidInput(format!(
            "memory parameter must lie in [0, 1), got {rho}"
        )));
    }
    let values = [-1.0, 0.0, 1.0];
    let mut support = Vec::with_capacity(9);
    let mut weights = Vec::with_capacity(9);
    for &x1 in &values {
        for &x2 in &values {
            let keep = if x1 == x2 { rho } else { 0.0 };
            support.push(vec![x1, x2]);
            weights.push((keep + (1.0 - rho) / 3.0) / 3.0);
        }
    }
    DiscretePathMeasure::new(support, weights, 2, 1)
}

/// Seasonal chain on {-1, 0, 1}: each step keeps the previous value with
/// probability `rho`, replays the innovation from `tau` steps earlier with
/// probability `theta`, and otherwise draws a fresh innovation.
#[derive(Debug, Clone, Copy)]
pub struct SeasonalParams {
    pub rho: f64,
    pub theta: f64,
    pub tau: usize,
}

impl SeasonalParams {
    pub fn new(rho: f64, theta: f64, tau: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&rho) || !(0.0..1.0).contains(&theta) || rho + theta >= 1.0 {
            return Err(Error::InvalidInput(format!(
                "need rho, theta in [0, 1) with rho + theta < 1, got {rho}, {theta}"
            )));
        }
        if tau < 1 {
            return Err(Error::InvalidInput("seasonal lag must be at least 1".into()));
        }
        Ok(SeasonalParams { rho, theta, tau })
    }
}

/// Simulates the seasonal chain and returns `n_slices` pairs (T = 2, d = 1)
/// taken at stride `tau`. Innovations at negative indices come from a
/// pre-generated buffer of length `tau`.
pub fn simulate_seasonal(
    params: &SeasonalParams,
    n_slices: usize,
    seed: u64,
) -> Result<PathSample> {
    if n_slices < 1 {
        return Err(Error::Precondition("need at least one slice".into()));
    }
    let eps = CounterRng::new(seed, 1);
    let flags = CounterRng::new(seed, 2);
    let steps = params.tau * (n_slices - 1) + 2;
    // Innovation at index n lives at counter n + tau, so indices -tau..-1 are
    // the pre-samples 0..tau-1.
    let innovation = |n: i64| eps.trinomial_at((n + params.tau as i64) as u64);
    let mut series = Vec::with_capacity(steps + 1);
    let mut x = 0.0;
    series.push(x);
    for n in 0..steps as i64 {
        let u = flags.uniform_at(n as u64);
        x = if u < params.rho {
            x
        } else if u < params.rho + params.theta {
            innovation(n - params.tau as i64)
        } else {
            innovation(n)
        };
        series.push(x);
    }
    slice_series(&series[1..], 1, 2, params.tau)
}

/// A finite-state Markov chain with a row-stochastic transition matrix.
#[derive(Debug, Clone)]
pub struct FiniteMarkovChain {
    pub states: Vec<f64>,
    pub transition: Vec<Vec<f64>>,
    pub initial: Vec<f64>,
}

impl FiniteMarkovChain {
    pub fn new(states: Vec<f64>, transition: Vec<Vec<f64>>, initial: Vec<f64>) -> Result<Self> {
        let k = states.len();
        if k == 0 || transition.len() != k || initial.len() != k {
            return Err(Error::ShapeMismatch(
                "states, transition matrix and initial law must have matching sizes".into(),
            ));
        }
        for (i, row) in transition.iter().enumerate() {
            if row.len() != k {
                return Err(Error::ShapeMismatch(format!("row {i} has wrong length")));
            }
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::InvalidInput(format!(
                    "row {i} has entries outside [0, 1]"
                )));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "row {i} sums to {s} instead of 1"
                )));
            }
        }
        let s: f64 = initial.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "initial law sums to {s} instead of 1"
            )));
        }
        Ok(FiniteMarkovChain {
            states,
            transition,
            initial,
        })
    }

    fn n_states(&self) -> usize {
        self.states.len()
    }

    /// True when every state reaches every other state through positive
    /// transition probabilities.
    pub fn is_irreducible(&self) -> bool {
        let k = self.n_states();
        let reach = |forward: bool| -> usize {
            let mut seen = vec![false; k];
            let mut stack = vec![0usize];
            seen[0] = true;
            let mut count = 1;
            while let Some(i) = stack.pop() {
                for j in 0..k {
                    let p = if forward {
                        self.transition[i][j]
                    } else {
                        self.transition[j][i]
                    };
                    if p > 0.0 && !seen[j] {
                        seen[j] = true;
                        count += 1;
                        stack.push(j);
                    }
                }
            }
            count
        };
        reach(true) == k && reach(false) == k
    }

    /// Joint law of the first `len` steps as a dense finite-sequence law.
    pub fn sequence_law<W: MixWeight>(
        &self,
        len: usize,
        lift: impl Fn(f64) -> W,
    ) -> Result<FiniteSequenceLaw<W>> {
        let k = self.n_states();
        let mut prob = vec![W::zero(); k.pow(len as u32)];
        let mut digits = vec![0usize; len];
        for (idx, slot) in prob.iter_mut().enumerate() {
            let mut rest = idx;
            for d in (0..len).rev() {
                digits[d] = rest % k;
                rest /= k;
            }
            let mut p = lift(self.initial[digits[0]]);
            for d in 1..len {
                p = p * lift(self.transition[digits[d - 1]][digits[d]]);
            }
            *slot = p;
        }
        FiniteSequenceLaw::new(self.states.clone(), len, prob)
    }

    /// Simulates `len` steps starting from the initial law.
    pub fn simulate(&self, len: usize, seed: u64) -> Vec<f64> {
        let rng = CounterRng::new(seed, 1);
        let mut out = Vec::with_capacity(len);
        let mut state = rng.categorical_at(0, &self.initial);
        out.push(self.states[state]);
        for n in 1..len {
            state = rng.categorical_at(n as u64, &self.transition[state]);
            out.push(self.states[state]);
        }
        out
    }
}

/// Stationary distribution of an irreducible chain, computed by damped power
/// iteration (the lazy kernel (K + I)/2 shares the fixed point and converges
/// for periodic chains too).
pub fn stationary_distribution(chain: &FiniteMarkovChain) -> Result<Vec<f64>> {
    if !chain.is_irreducible() {
        return Err(Error::ReducibleChain);
    }
    let k = chain.states.len();
    let mut pi = vec![1.0 / k as f64; k];
    for _ in 0..200_000 {
        let mut next = vec![0.0; k];
        for i in 0..k {
            for j in 0..k {
                next[j] += pi[i] * chain.transition[i][j];
            }
        }
        for j in 0..k {
            next[j] = 0.5 * (next[j] + pi[j]);
        }
        let diff: f64 = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        pi = next;
        if diff < 1e-15 {
            break;
        }
    }
    // Verify the fixed-point residual before handing the result out.
    let mut residual = 0.0;
    for j in 0..k {
        let pj: f64 = (0..k).map(|i| pi[i] * chain.transition[i][j]).sum();
        residual += (pj - pi[j]).abs();
    }
    if residual > 1e-12 {
        return Err(Error::InvalidInput(format!(
            "power iteration did not converge (residual {residual})"
        )));
    }
    Ok(pi)
}
