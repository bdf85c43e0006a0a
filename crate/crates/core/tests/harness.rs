//! Slower end-to-end validations of the experiment harness and the
//! simulators against closed-form bounds.

use adapted_ot::bounds::bdd_bound;
use adapted_ot::experiments::{run_consistency_experiment, ExperimentConfig};
use adapted_ot::ot_core::{wasserstein1_1d, DiscreteMeasure};
use adapted_ot::processes::{simulate_seasonal, SeasonalParams};
use adapted_ot::rng::CounterRng;

#[test]
fn consistency_trend_halves_along_the_grid() {
    let cfg = ExperimentConfig::parse(
        "\
[process]
kind = memory_chain
rho = 0.7
lags = 5

[grid]
n_list = 125,500,2000
replications = 40
noise_per_atom = 3
seed = 0
run_consistency = true
",
    )
    .unwrap();
    let table = run_consistency_experiment(&cfg).unwrap();
    assert!(table.trend_ok, "rows: {:?}", table.rows);
    for w in table.rows.windows(2) {
        assert!(
            w[1].mean_plain < w[0].mean_plain,
            "means not strictly decreasing: {:?}",
            table.rows
        );
    }
    // The smoothed estimator column is reported alongside; no assertion on
    // its gap, only sanity.
    for r in &table.rows {
        assert!(r.mean_smoothed.is_finite() && r.mean_smoothed >= 0.0);
    }
}

#[test]
fn wasserstein_distance_concentrates_like_bounded_differences() {
    // phi(z) = W1(mu, empirical(z)) changes by at most diam/N when one
    // sample moves, so its deviations obey the bounded-differences bound;
    // checked empirically for i.i.d. draws with three-sigma slack.
    let atoms = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mu = DiscreteMeasure::new(
        atoms.iter().map(|&x| vec![x]).collect(),
        vec![0.2; 5],
    )
    .unwrap();
    let n = 100usize;
    let m = 400usize;
    let rng = CounterRng::new(99, 0);
    let mut phis = Vec::with_capacity(m);
    for rep in 0..m {
        let mut counts = [0usize; 5];
        for i in 0..n {
            counts[rng.categorical_at((rep * n + i) as u64, &[0.2; 5])] += 1;
        }
        let pts: Vec<Vec<f64>> = atoms
            .iter()
            .zip(&counts)
            .filter(|(_, &c)| c > 0)
            .map(|(&x, _)| vec![x])
            .collect();
        let ws: Vec<f64> = counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| c as f64 / n as f64)
            .collect();
        let empirical = DiscreteMeasure::new(pts, ws).unwrap();
        let (w1, _) = wasserstein1_1d(&mu, &empirical).unwrap();
        phis.push(w1);
    }
    let mean = phis.iter().sum::<f64>() / m as f64;
    let devs: Vec<f64> = phis.iter().map(|v| (v - mean).abs()).collect();
    let max_dev = devs.iter().cloned().fold(0.0f64, f64::max);
    let lipschitz = 1.0 / n as f64; // diameter of the support is 1
    for k in 1..=8 {
        let eps = max_dev * k as f64 / 8.0;
        let tail = devs.iter().filter(|&&d| d > eps).count() as f64 / m as f64;
        let sigma = (tail * (1.0 - tail) / m as f64).sqrt();
        let bound = bdd_bound(n, lipschitz, eps, 1.0).unwrap();
        assert!(
            tail - 3.0 * sigma <= bound,
            "eps {eps}: tail {tail} above bound {bound}"
        );
    }
}

#[test]
fn constant_statistic_never_deviates() {
    // Degenerate sanity case of the bounded-differences check: a constant
    // statistic has zero deviations, below any bound.
    let phis = vec![0.75; 100];
    let mean = phis.iter().sum::<f64>() / phis.len() as f64;
    assert!(phis.iter().all(|v| (v - mean).abs() == 0.0));
}

#[test]
fn seasonal_dependence_stays_below_closed_form_bound() {
    // Estimated single-history dependence of observed pairs at gap s is
    // bounded by 2 (rho + theta)^(tau s - 1) up to Monte-Carlo slack; the
    // estimate conditions on one pair, which only lowers the supremum.
    let params = SeasonalParams::new(0.3, 0.2, 1).unwrap();
    let n = 200_000usize;
    let sample = simulate_seasonal(&params, n, 4).unwrap();
    let code = |v: f64| (v as i64 + 1) as usize;
    let pair_code = |k: usize| 3 * code(sample.path(k)[0]) + code(sample.path(k)[1]);
    for s in [3usize, 4] {
        let bound = 2.0 * (0.5f64).powi(s as i32 - 1);
        // Joint counts of (pair at k, pair at k + s).
        let mut joint = [[0usize; 9]; 9];
        let mut marginal = [0usize; 9];
        let total = n - s;
        for k in 0..total {
            joint[pair_code(k)][pair_code(k + s)] += 1;
            marginal[pair_code(k + s)] += 1;
        }
        let mut worst: f64 = 0.0;
        for row in &joint {
            let count_a: usize = row.iter().sum();
            // Conditioning sets that are too small only add noise.
            if count_a < 1_000 {
                continue;
            }
            let tv: f64 = 0.5
                * row
                    .iter()
                    .zip(&marginal)
                    .map(|(&j, &m)| (j as f64 / count_a as f64 - m as f64 / total as f64).abs())
                    .sum::<f64>();
            worst = worst.max(tv);
        }
        // Generous slack for the nine estimated cells per conditional.
        let slack = 3.0 * (9.0f64 / 1_000.0).sqrt();
        assert!(
            worst <= bound + slack,
            "s = {s}: estimated dependence {worst} above {bound} + {slack}"
        );
    }
}
