//! Exact mixing coefficients of finite-alphabet joint laws.
//!
//! `eta(s)` takes the supremum over product events of the total variation
//! between the conditional law of the coordinate `s` steps ahead given the
//! event and given the event's one-shorter prefix; `eta_bar(s)` compares the
//! joint tails instead; `eta_hat(n, n+s)` conditions pointwise on two
//! histories that agree except at time n. Everything is computed by direct
//! enumeration, either in f64 or in exact arbitrary-precision rationals.

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational weight type for counterexample-grade computations.
pub type Rational = Ratio<BigInt>;

/// Builds a rational from a numerator/denominator pair.
pub fn ratio(num: i64, den: i64) -> Rational {
    Ratio::new(BigInt::from(num), BigInt::from(den))
}

/// Numeric weight for joint laws: f64 for everyday work, [`Rational`] when
/// the answer must be exact.
pub trait MixWeight: Clone + PartialOrd + Signed + std::fmt::Debug + 'static {
    /// Allowed deviation of the total mass from one.
    fn sum_tolerance() -> Self;
    fn as_f64(&self) -> f64;
}

impl MixWeight for f64 {
    fn sum_tolerance() -> f64 {
        1e-14
    }
    fn as_f64(&self) -> f64 {
        *self
    }
}

impl MixWeight for Rational {
    fn sum_tolerance() -> Rational {
        Rational::zero()
    }
    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

fn half<W: MixWeight>() -> W {
    W::one() / (W::one() + W::one())
}

/// Total variation between two distributions given as weight vectors over a
/// common index set.
fn tv<W: MixWeight>(p: &[W], q: &[W]) -> W {
    let mut sum = W::zero();
    for (a, b) in p.iter().zip(q) {
        sum = sum + (a.clone() - b.clone()).abs();
    }
    half::<W>() * sum
}

/// Dense joint law of a length-N sequence over a finite alphabet.
///
/// Probabilities are stored in row-major order with the first coordinate as
/// the most significant digit.
#[derive(Debug, Clone)]
pub struct FiniteSequenceLaw<W> {
    alphabet: Vec<f64>,
    len: usize,
    prob: Vec<W>,
}

/// Dense-state-space guard: alphabet^len must stay at or below this.
const MAX_STATES: usize = 10_000_000;
/// Budget for event enumeration, counting visited joint states.
const MAX_ENUMERATION_WORK: f64 = 2e9;

impl<W: MixWeight> FiniteSequenceLaw<W> {
    pub fn new(alphabet: Vec<f64>, len: usize, prob: Vec<W>) -> Result<Self> {
        let a = alphabet.len();
        if a == 0 || len == 0 {
            return Err(Error::InvalidInput(
                "alphabet and sequence length must be non-empty".into(),
            ));
        }
        let states = a
            .checked_pow(len as u32)
            .filter(|&s| s <= MAX_STATES)
            .ok_or_else(|| {
                Error::StateSpaceTooLarge(format!("{a}^{len} exceeds {MAX_STATES} states"))
            })?;
        if prob.len() != states {
            return Err(Error::ShapeMismatch(format!(
                "expected {states} probabilities, got {}",
                prob.len()
            )));
        }
        let mut total = W::zero();
        for (i, p) in prob.iter().enumerate() {
            if p < &W::zero() {
                return Err(Error::InvalidInput(format!("probability {i} is negative")));
            }
            total = total + p.clone();
        }
        if (total - W::one()).abs() > W::sum_tolerance() {
            return Err(Error::InvalidInput(
                "probabilities do not sum to one".into(),
            ));
        }
        Ok(FiniteSequenceLaw { alphabet, len, prob })
    }

    pub fn alphabet(&self) -> &[f64] {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn probabilities(&self) -> &[W] {
        &self.prob
    }

    fn a(&self) -> usize {
        self.alphabet.len()
    }

    fn decode(&self, mut idx: usize, digits: &mut [usize]) {
        for d in (0..self.len).rev() {
            digits[d] = idx % self.a();
            idx /= self.a();
        }
    }

    /// Probability of one full sequence given as alphabet indices.
    pub fn prob_of(&self, digits: &[usize]) -> W {
        assert_eq!(digits.len(), self.len);
        let mut idx = 0usize;
        for &d in digits {
            idx = idx * self.a() + d;
        }
        self.prob[idx].clone()
    }

    fn check_lag(&self, s: usize) -> Result<()> {
        if s == 0 || s >= self.len {
            return Err(Error::Precondition(format!(
                "lag must satisfy 1 <= s < {}, got {s}",
                self.len
            )));
        }
        Ok(())
    }

    fn check_event_budget(&self, s: usize) -> Result<()> {
        let per_event = self.prob.len() as f64;
        let event_count: f64 = (1..=(self.len - s))
            .map(|n| ((1u64 << self.a()) as f64 - 1.0).powi(n as i32))
            .sum();
        if event_count * per_event > MAX_ENUMERATION_WORK {
            return Err(Error::StateSpaceTooLarge(format!(
                "event enumeration needs ~{:.1e} state visits",
                event_count * per_event
            )));
        }
        Ok(())
    }

    /// Conditional law of coordinate `target` (zero-based) given the product
    /// event described by one bitmask per leading coordinate. `None` when the
    /// event has zero probability.
    fn conditional_single(&self, masks: &[u32], target: usize) -> Option<Vec<W>> {
        let mut acc = vec![W::zero(); self.a()];
        let mut total = W::zero();
        let mut digits = vec![0usize; self.len];
        for (idx, p) in self.prob.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            self.decode(idx, &mut digits);
            if masks
                .iter()
                .enumerate()
                .all(|(i, m)| (m >> digits[i]) & 1 == 1)
            {
                acc[digits[target]] = acc[digits[target]].clone() + p.clone();
                total = total + p.clone();
            }
        }
        if total.is_zero() {
            return None;
        }
        Some(acc.into_iter().map(|v| v / total.clone()).collect())
    }

    /// Conditional joint law of coordinates `from..N` (zero-based) given a
    /// product event on the leading coordinates, as a dense vector over
    /// alphabet^(N - from).
    fn conditional_tail(&self, masks: &[u32], from: usize) -> Option<Vec<W>> {
        let tail_len = self.len - from;
        let states = self.a().pow(tail_len as u32);
        let mut acc = vec![W::zero(); states];
        let mut total = W::zero();
        let mut digits = vec![0usize; self.len];
        for (idx, p) in self.prob.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            self.decode(idx, &mut digits);
            if masks
                .iter()
                .enumerate()
                .all(|(i, m)| (m >> digits[i]) & 1 == 1)
            {
                let mut t = 0usize;
                for d in from..self.len {
                    t = t * self.a() + digits[d];
                }
                acc[t] = acc[t].clone() + p.clone();
                total = total + p.clone();
            }
        }
        if total.is_zero() {
            return None;
        }
        Some(acc.into_iter().map(|v| v / total.clone()).collect())
    }

    /// Single-coordinate marginal at zero-based position `pos`.
    pub fn marginal(&self, pos: usize) -> Vec<W> {
        self.conditional_single(&[], pos)
            .expect("total mass is one")
    }

    /// Pushforward under a symbol map given as `old index -> new index` into
    /// a new alphabet of the given values.
    pub fn map_symbols(&self, map: &[usize], new_alphabet: Vec<f64>) -> Result<FiniteSequenceLaw<W>> {
        if map.len() != self.a() {
            return Err(Error::ShapeMismatch(
                "symbol map must cover the alphabet".into(),
            ));
        }
        let b = new_alphabet.len();
        if map.iter().any(|&m| m >= b) {
            return Err(Error::InvalidInput("symbol map leaves the alphabet".into()));
        }
        let states = b
            .checked_pow(self.len as u32)
            .filter(|&s| s <= MAX_STATES)
            .ok_or_else(|| Error::StateSpaceTooLarge("mapped law too large".into()))?;
        let mut prob = vec![W::zero(); states];
        let mut digits = vec![0usize; self.len];
        for (idx, p) in self.prob.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            self.decode(idx, &mut digits);
            let mut t = 0usize;
            for &d in digits.iter() {
                t = t * b + map[d];
            }
            prob[t] = prob[t].clone() + p.clone();
        }
        FiniteSequenceLaw::new(new_alphabet, self.len, prob)
    }
}

/// Visits every product event of the given length: one nonempty subset mask
/// per coordinate.
fn for_each_event(len: usize, full: u32, mut visit: impl FnMut(&[u32])) {
    let mut masks = vec![1u32; len];
    if len == 0 {
        visit(&masks);
        return;
    }
    loop {
        visit(&masks);
        let mut pos = len;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if masks[pos] < full {
                masks[pos] += 1;
                for m in &mut masks[pos + 1..] {
                    *m = 1;
                }
                break;
            }
        }
    }
}

/// Total variation between the conditional law of the coordinate `s` steps
/// past an `n`-coordinate product event and the law conditioned on the
/// event's first n-1 coordinates. This is the quantity whose supremum over
/// events is `eta(s)`; exposing it lets callers evaluate specific events.
pub fn eta_event_value<W: MixWeight>(
    law: &FiniteSequenceLaw<W>,
    event: &[u32],
    s: usize,
) -> Result<W> {
    law.check_lag(s)?;
    let n = event.len();
    if n == 0 || n + s > law.len() {
        return Err(Error::Precondition(format!(
            "event length must satisfy 1 <= n <= {}, got {n}",
            law.len() - s
        )));
    }
    let full = (1u32 << law.a()) - 1;
    if event.iter().any(|&m| m == 0 || m > full) {
        return Err(Error::InvalidInput(
            "event masks must be nonempty subsets of the alphabet".into(),
        ));
    }
    let target = n + s - 1;
    let with = law
        .conditional_single(event, target)
        .ok_or_else(|| Error::Precondition("event has zero probability".into()))?;
    let without = law
        .conditional_single(&event[..n - 1], target)
        .expect("prefix of a positive event is positive");
    Ok(tv(&with, &without))
}

/// Exact eta-mixing coefficient at lag `s`: supremum over positions and
/// positive-probability product events.
pub fn eta_exact<W: MixWeight>(law: &FiniteSequenceLaw<W>, s: usize) -> Result<W> {
    law.check_lag(s)?;
    law.check_event_budget(s)?;
    let full = (1u32 << law.a()) - 1;
    let mut best = W::zero();
    for n in 1..=(law.len() - s) {
        let target = n + s - 1;
        for_each_event(n - 1, full, |prefix| {
            let base = match law.conditional_single(prefix, target) {
                Some(b) => b,
                None => return,
            };
            let mut masks = prefix.to_vec();
            masks.push(0);
            for last in 1..=full {
                *masks.last_mut().unwrap() = last;
                if let Some(cond) = law.conditional_single(&masks, target) {
                    let t = tv(&cond, &base);
                    if t > best {
                        best = t;
                    }
                }
            }
        });
    }
    Ok(best)
}

/// Exact tail coefficient at lag `s`: as [`eta_exact`] but comparing the
/// joint laws of the whole remaining tail.
pub fn eta_bar_exact<W: MixWeight>(law: &FiniteSequenceLaw<W>, s: usize) -> Result<W> {
    law.check_lag(s)?;
    law.check_event_budget(s)?;
    let full = (1u32 << law.a()) - 1;
    let mut best = W::zero();
    for n in 1..=(law.len() - s) {
        let from = n + s - 1;
        for_each_event(n - 1, full, |prefix| {
            let base = match law.conditional_tail(prefix, from) {
                Some(b) => b,
                None => return,
            };
            let mut masks = prefix.to_vec();
            masks.push(0);
            for last in 1..=full {
                *masks.last_mut().unwrap() = last;
                if let Some(cond) = law.conditional_tail(&masks, from) {
                    let t = tv(&cond, &base);
                    if t > best {
                        best = t;
                    }
                }
            }
        });
    }
    Ok(best)
}

/// Pointwise-conditioned coefficient of histories of length `n` at lag `s`:
/// supremum over pairs of positive-probability histories agreeing up to
/// position n-1 and differing at n, comparing the joint tails. Zero when no
/// admissible pair exists.
pub fn eta_hat_kr<W: MixWeight>(law: &FiniteSequenceLaw<W>, n: usize, s: usize) -> Result<W> {
    law.check_lag(s)?;
    if n == 0 || n + s > law.len() {
        return Err(Error::Precondition(format!(
            "history length must satisfy 1 <= n <= {}, got {n}",
            law.len() - s
        )));
    }
    let a = law.a();
    let from = n + s - 1;
    let mut best = W::zero();
    let mut digits = vec![0usize; n];
    let histories = a.pow(n as u32);
    for h in 0..histories {
        let mut rest = h;
        for d in (0..n).rev() {
            digits[d] = rest % a;
            rest /= a;
        }
        let masks: Vec<u32> = digits.iter().map(|&d| 1u32 << d).collect();
        let tail_a = match law.conditional_tail(&masks, from) {
            Some(t) => t,
            None => continue,
        };
        for alt in digits[n - 1] + 1..a {
            let mut alt_masks = masks.clone();
            alt_masks[n - 1] = 1u32 << alt;
            if let Some(tail_b) = law.conditional_tail(&alt_masks, from) {
                let t = tv(&tail_a, &tail_b);
                if t > best {
                    best = t;
                }
            }
        }
    }
    Ok(best)
}

/// Supremum of [`eta_hat_kr`] over admissible history lengths.
pub fn eta_hat_sup<W: MixWeight>(law: &FiniteSequenceLaw<W>, s: usize) -> Result<W> {
    law.check_lag(s)?;
    let mut best = W::zero();
    for n in 1..=(law.len() - s) {
        let v = eta_hat_kr(law, n, s)?;
        if v > best {
            best = v;
        }
    }
    Ok(best)
}

/// Exact phi-mixing coefficient at lag `s`: supremum over positions, Borel
/// history events and target sets of `|P(B | A) - P(B)|`.
///
/// Since the conditional probability of a fixed target set is a convex
/// combination over single histories, the supremum over arbitrary history
/// sets is attained at a single history, which keeps the enumeration linear
/// in the number of histories.
pub fn phi_exact<W: MixWeight>(law: &FiniteSequenceLaw<W>, s: usize) -> Result<W> {
    law.check_lag(s)?;
    let a = law.a();
    let full = (1u32 << a) - 1;
    let mut best = W::zero();
    for n in 1..=(law.len() - s) {
        let target = n + s - 1;
        let unconditional = law
            .conditional_single(&[], target)
            .expect("total mass is one");
        let mut digits = vec![0usize; n];
        for h in 0..a.pow(n as u32) {
            let mut rest = h;
            for d in (0..n).rev() {
                digits[d] = rest % a;
                rest /= a;
            }
            let masks: Vec<u32> = digits.iter().map(|&d| 1u32 << d).collect();
            let cond = match law.conditional_single(&masks, target) {
                Some(c) => c,
                None => continue,
            };
            for b in 1..=full {
                let mut diff = W::zero();
                for z in 0..a {
                    if (b >> z) & 1 == 1 {
                        diff = diff + cond[z].clone() - unconditional[z].clone();
                    }
                }
                let diff = diff.abs();
                if diff > best {
                    best = diff;
                }
            }
        }
    }
    Ok(best)
}

/// Mixing profile of a law: per-lag coefficients and the aggregate sums that
/// enter the bound formulas.
#[derive(Debug, Clone)]
pub struct MixingProfile {
    /// eta(s) for s = 1..N-1.
    pub eta: Vec<f64>,
    /// eta_bar(s) for s = 1..N-1.
    pub eta_bar: Vec<f64>,
    /// 1 + 2 sum_s eta(s).
    pub eta_sum: f64,
    /// 1 + sum_s eta_bar(s).
    pub eta_bar_sum: f64,
}

/// Computes the full profile of a law by exact enumeration.
pub fn mixing_profile(law: &FiniteSequenceLaw<f64>) -> Result<MixingProfile> {
    let mut eta = Vec::with_capacity(law.len() - 1);
    let mut eta_bar = Vec::with_capacity(law.len() - 1);
    for s in 1..law.len() {
        eta.push(eta_exact(law, s)?);
        eta_bar.push(eta_bar_exact(law, s)?);
    }
    for (e, b) in eta.iter().zip(&eta_bar) {
        debug_assert!(e <= &(b + 1e-12), "tail coefficient dominates: {e} vs {b}");
    }
    let eta_sum = 1.0 + 2.0 * eta.iter().sum::<f64>();
    let eta_bar_sum = 1.0 + eta_bar.iter().sum::<f64>();
    Ok(MixingProfile {
        eta,
        eta_bar,
        eta_sum,
        eta_bar_sum,
    })
}

/// Closed-form bound on eta(s) for memory-chain pairs observed `lag` steps
/// apart: min(1, 2 rho^(lag s - 1)).
pub fn eta_bound_memory_chain(rho: f64, lag: usize, s: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::Precondition(format!(
            "memory parameter must lie in [0, 1), got {rho}"
        )));
    }
    if lag < 1 || s < 1 {
        return Err(Error::Precondition("lag and s must be at least 1".into()));
    }
    Ok((2.0 * rho.powi((lag * s) as i32 - 1)).min(1.0))
}

/// Closed-form bound on eta(s) for uniformly ergodic chains with geometric
/// contraction: min(1, c rho^s).
pub fn eta_bound_uniformly_ergodic(c: f64, rho: f64, s: usize) -> Result<f64> {
    if c < 0.0 || !(0.0..1.0).contains(&rho) {
        return Err(Error::Precondition(format!(
            "need c >= 0 and rho in [0, 1), got {c}, {rho}"
        )));
    }
    Ok((c * rho.powi(s as i32)).min(1.0))
}

/// Bound on the phi-mixing coefficient from an eta profile:
/// `phi(s) <= sum_{k=s}^{N-1} eta(k)`, clamped to [0, 1].
///
/// `eta[k-1]` holds eta(k) for k = 1..N-1.
pub fn phi_bound_from_eta(eta: &[f64], s: usize, n: usize) -> Result<f64> {
    if s == 0 || s >= n {
        return Err(Error::Precondition(format!(
            "need 1 <= s < {n}, got {s}"
        )));
    }
    if eta.len() + 1 < n {
        return Err(Error::ShapeMismatch(format!(
            "profile has {} lags, need {}",
            eta.len(),
            n - 1
        )));
    }
    let sum: f64 = eta[s - 1..n - 1].iter().sum();
    Ok(sum.clamp(0.0, 1.0))
}

/// Outcome of one exact inequality check.
#[derive(Debug, Clone, Copy)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

fn check_alphabet_function(law: &FiniteSequenceLaw<f64>, f: &[f64]) -> Result<()> {
    if f.len() != law.a() {
        return Err(Error::ShapeMismatch(
            "function must be defined on the alphabet".into(),
        ));
    }
    if f.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidInput(
            "function must be nonnegative and finite".into(),
        ));
    }
    Ok(())
}

/// Exact check of the covariance bound
/// `Cov(f(Z_i), f(Z_j)) <= eta(i - j) * max f * E f(Z_j)` for j < i.
/// Positions are one-based.
pub fn covariance_bound_check(
    law: &FiniteSequenceLaw<f64>,
    f: &[f64],
    i: usize,
    j: usize,
) -> Result<BoundCheck> {
    check_alphabet_function(law, f)?;
    if !(1 <= j && j < i && i <= law.len()) {
        return Err(Error::Precondition(format!(
            "need 1 <= j < i <= {}, got j={j}, i={i}",
            law.len()
        )));
    }
    let mut e_i = 0.0;
    let mut e_j = 0.0;
    let mut e_ij = 0.0;
    let mut digits = vec![0usize; law.len()];
    for (idx, p) in law.prob.iter().enumerate() {
        if *p == 0.0 {
            continue;
        }
        law.decode(idx, &mut digits);
        let fi = f[digits[i - 1]];
        let fj = f[digits[j - 1]];
        e_i += p * fi;
        e_j += p * fj;
        e_ij += p * fi * fj;
    }
    let lhs = e_ij - e_i * e_j;
    let max_f = f.iter().cloned().fold(0.0f64, f64::max);
    let rhs = eta_exact(law, i - j)? * max_f * e_j;
    Ok(BoundCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-12,
    })
}

/// Exact check of the variance bound for the empirical mean of a bounded
/// nonnegative function over an identically distributed sequence:
/// `Var[(1/N) sum f(Z_n)] <= (1/N) max f * E f(Z_1) * (1 + 2 sum eta)`.
pub fn variance_bound_check(law: &FiniteSequenceLaw<f64>, f: &[f64]) -> Result<BoundCheck> {
    check_alphabet_function(law, f)?;
    let first = law.marginal(0);
    for pos in 1..law.len() {
        let m = law.marginal(pos);
        for (a, b) in m.iter().zip(&first) {
            if (a - b).abs() > 1e-12 {
                return Err(Error::Precondition(
                    "law does not have identical marginals".into(),
                ));
            }
        }
    }
    let n = law.len() as f64;
    let mut mean_of_mean = 0.0;
    let mut second_moment = 0.0;
    let mut digits = vec![0usize; law.len()];
    for (idx, p) in law.prob.iter().enumerate() {
        if *p == 0.0 {
            continue;
        }
        law.decode(idx, &mut digits);
        let avg: f64 = digits.iter().map(|&d| f[d]).sum::<f64>() / n;
        mean_of_mean += p * avg;
        second_moment += p * avg * avg;
    }
    let lhs = second_moment - mean_of_mean * mean_of_mean;
    let e_f: f64 = first.iter().zip(f).map(|(p, v)| p * v).sum();
    let max_f = f.iter().cloned().fold(0.0f64, f64::max);
    let mut eta_total = 0.0;
    for s in 1..law.len() {
        eta_total += eta_exact(law, s)?;
    }
    let rhs = max_f * e_f * (1.0 + 2.0 * eta_total) / n;
    Ok(BoundCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-12,
    })
}

/// Product law with the given single-coordinate marginal, i.e. independent
/// coordinates.
pub fn product_law<W: MixWeight>(
    alphabet: Vec<f64>,
    len: usize,
    marginal: &[W],
) -> Result<FiniteSequenceLaw<W>> {
    if marginal.len() != alphabet.len() {
        return Err(Error::ShapeMismatch(
            "marginal must match the alphabet".into(),
        ));
    }
    let a = alphabet.len();
    let states = a
        .checked_pow(len as u32)
        .filter(|&s| s <= MAX_STATES)
        .ok_or_else(|| Error::StateSpaceTooLarge("product law too large".into()))?;
    let mut prob = vec![W::one(); states];
    let mut digits = vec![0usize; len];
    for (idx, slot) in prob.iter_mut().enumerate() {
        let mut rest = idx;
        for d in (0..len).rev() {
            digits[d] = rest % a;
            rest /= a;
        }
        let mut p = W::one();
        for &d in &digits {
            p = p * marginal[d].clone();
        }
        *slot = p;
    }
    FiniteSequenceLaw::new(alphabet, len, prob)
}

/// Three-step binary law separating the event-conditioned from the
/// pointwise-conditioned coefficient: the first coordinate is Bernoulli(q),
/// zero forces the second coordinate to zero with the third Bernoulli(1-q),
/// one draws the second Bernoulli(q) and the third Bernoulli(q) or
/// Bernoulli(1/2) depending on the second. At q = 1/10 the event-conditioned
/// eta(1) reaches 756/1000 while the pointwise supremum is only 9/20.
pub fn separation_example_law<W: MixWeight>(q: W) -> Result<FiniteSequenceLaw<W>> {
    let one = W::one;
    let h = half::<W>;
    let mut prob = vec![W::zero(); 8];
    let idx = |z1: usize, z2: usize, z3: usize| (z1 << 2) | (z2 << 1) | z3;
    // Z1 = 0: Z2 = 0, Z3 ~ Bernoulli(1 - q).
    prob[idx(0, 0, 0)] = (one() - q.clone()) * q.clone();
    prob[idx(0, 0, 1)] = (one() - q.clone()) * (one() - q.clone());
    // Z1 = 1, Z2 = 0 (prob 1 - q): Z3 ~ Bernoulli(1/2).
    prob[idx(1, 0, 0)] = q.clone() * (one() - q.clone()) * h();
    prob[idx(1, 0, 1)] = q.clone() * (one() - q.clone()) * h();
    // Z1 = 1, Z2 = 1 (prob q): Z3 ~ Bernoulli(q).
    prob[idx(1, 1, 0)] = q.clone() * q.clone() * (one() - q.clone());
    prob[idx(1, 1, 1)] = q.clone() * q.clone() * q.clone();
    FiniteSequenceLaw::new(vec![0.0, 1.0], 3, prob)
}

/// Reads a law from CSV rows `z_1,...,z_N,prob`. The alphabet is the sorted
/// set of distinct symbol values; missing sequences get probability zero.
pub fn read_law_csv<R: std::io::BufRead>(r: R) -> Result<FiniteSequenceLaw<f64>> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty law file".into()))??;
    let cols: Vec<&str> = header.trim().split(',').collect();
    if cols.len() < 2 || *cols.last().unwrap() != "prob" {
        return Err(Error::Parse(
            "expected header z_1,...,z_N,prob".into(),
        ));
    }
    let n = cols.len() - 1;
    for (i, c) in cols[..n].iter().enumerate() {
        if *c != format!("z_{}", i + 1) {
            return Err(Error::Parse(format!("expected column z_{}, got '{c}'", i + 1)));
        }
    }
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != n + 1 {
            return Err(Error::Parse(format!(
                "row {}: expected {} fields",
                lineno + 2,
                n + 1
            )));
        }
        let mut seq = Vec::with_capacity(n);
        for f in &fields[..n] {
            seq.push(
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("row {}: bad symbol '{f}'", lineno + 2)))?,
            );
        }
        let p = fields[n]
            .trim()
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("row {}: bad probability", lineno + 2)))?;
        rows.push((seq, p));
    }
    if rows.is_empty() {
        return Err(Error::Parse("law file has no rows".into()));
    }
    let mut alphabet: Vec<f64> = rows
        .iter()
        .flat_map(|(seq, _)| seq.iter().copied())
        .collect();
    alphabet.sort_by(f64::total_cmp);
    alphabet.dedup_by(|a, b| a.to_bits() == b.to_bits());
    let a = alphabet.len();
    let states = a
        .checked_pow(n as u32)
        .filter(|&s| s <= MAX_STATES)
        .ok_or_else(|| Error::StateSpaceTooLarge("law file too large".into()))?;
    let mut prob = vec![0.0f64; states];
    for (seq, p) in rows {
        let mut idx = 0usize;
        for v in &seq {
            let d = alphabet
                .iter()
                .position(|x| x.to_bits() == v.to_bits())
                .expect("alphabet contains all symbols");
            idx = idx * a + d;
        }
        prob[idx] += p;
    }
    FiniteSequenceLaw::new(alphabet, n, prob)
}

/// Writes a law as CSV rows `z_1,...,z_N,prob`, skipping zero rows.
pub fn write_law_csv<Wr: std::io::Write>(
    law: &FiniteSequenceLaw<f64>,
    mut w: Wr,
) -> Result<()> {
    let n = law.len();
    let mut cols: Vec<String> = (1..=n).map(|i| format!("z_{i}")).collect();
    cols.push("prob".into());
    writeln!(w, "{}", cols.join(","))?;
    let mut digits = vec![0usize; n];
    for (idx, p) in law.prob.iter().enumerate() {
        if *p == 0.0 {
            continue;
        }
        law.decode(idx, &mut digits);
        let vals: Vec<String> = digits
            .iter()
            .map(|&d| crate::numfmt::fmt_sig(law.alphabet[d], 17))
            .collect();
        writeln!(w, "{},{}", vals.join(","), crate::numfmt::fmt_sig(*p, 17))?;
    }
    Ok(())
}
