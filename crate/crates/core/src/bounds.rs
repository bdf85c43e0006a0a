//! Closed-form rate and concentration bound formulas.
//!
//! The constants entering these bounds are existential; experiment code
//! calibrates them on the smallest sample sizes and then tests the shape on
//! the rest. All probability bounds clamp to [0, 1].

use crate::error::{Error, Result};
use crate::path_measure::grid_resolution;

/// Parameters shared by the bound evaluators. `p = None` stands for the
/// uniform (compact) rate.
#[derive(Debug, Clone, Copy)]
pub struct RateSpec {
    pub d: usize,
    pub t: usize,
    pub p: Option<f64>,
    /// 1 + 2 sum_s eta(s).
    pub eta_sum: f64,
    /// 1 + sum_s eta_bar(s).
    pub eta_bar_sum: f64,
    /// Calibrated multiplicative constant for moment bounds.
    pub c_cal: f64,
    /// Calibrated exponent constant for concentration bounds.
    pub c_exp: f64,
}

impl RateSpec {
    pub fn new(
        d: usize,
        t: usize,
        p: Option<f64>,
        eta_sum: f64,
        eta_bar_sum: f64,
        c_cal: f64,
        c_exp: f64,
    ) -> Result<Self> {
        if d < 1 || t < 2 {
            return Err(Error::Precondition(
                "need dimension >= 1 and horizon >= 2".into(),
            ));
        }
        if let Some(p) = p {
            if p < 1.0 {
                return Err(Error::Precondition(format!("need p >= 1, got {p}")));
            }
        }
        if eta_sum < 1.0 || eta_bar_sum < 1.0 {
            return Err(Error::Precondition(
                "mixing sums are at least one by definition".into(),
            ));
        }
        Ok(RateSpec {
            d,
            t,
            p,
            eta_sum,
            eta_bar_sum,
            c_cal,
            c_exp,
        })
    }
}

/// Uniform rate for compactly supported laws:
/// `N^{-1/(T+1)}` (d = 1), `N^{-1/(2T)} log(N+1)` (d = 2), `N^{-1/(dT)}`
/// (d >= 3).
pub fn rate_inf(n: usize, d: usize, t: usize) -> Result<f64> {
    if n < 1 || d < 1 || t < 2 {
        return Err(Error::Precondition(
            "need n >= 1, d >= 1, t >= 2".into(),
        ));
    }
    let nf = n as f64;
    Ok(match d {
        1 => nf.powf(-1.0 / (t as f64 + 1.0)),
        2 => nf.powf(-1.0 / (2.0 * t as f64)) * (nf + 1.0).ln(),
        _ => nf.powf(-1.0 / (d as f64 * t as f64)),
    })
}

/// Moment-based rate: `N^{-(p-1)/(pT)}` plus the grid term
/// `N^{-1/((d+1)T)}` for d <= 2 and `N^{-1/(dT)}` for d >= 3.
pub fn rate_p(n: usize, d: usize, t: usize, p: f64) -> Result<f64> {
    if n < 1 || d < 1 || t < 2 {
        return Err(Error::Precondition(
            "need n >= 1, d >= 1, t >= 2".into(),
        ));
    }
    if p < 1.0 {
        return Err(Error::Precondition(format!("need p >= 1, got {p}")));
    }
    let nf = n as f64;
    let tf = t as f64;
    let moment = nf.powf(-(p - 1.0) / (p * tf));
    let grid = if d <= 2 {
        nf.powf(-1.0 / ((d as f64 + 1.0) * tf))
    } else {
        nf.powf(-1.0 / (d as f64 * tf))
    };
    Ok(moment + grid)
}

/// Expected-distance bound for compact laws: `C sqrt(eta_sum) rate_inf(N)`.
pub fn moment_bound_compact(n: usize, spec: &RateSpec) -> Result<f64> {
    Ok(spec.c_cal * spec.eta_sum.sqrt() * rate_inf(n, spec.d, spec.t)?)
}

/// Deviation probability bound for compact laws:
/// `min(1, 2 exp(-c N eps^2 / (diam^2 (1 + sum eta_bar)^2)))`.
///
/// The horizon only enters through the calibrated constant `c`; it is
/// validated here because the bound is meaningless for degenerate horizons.
pub fn concentration_bound_compact(
    n: usize,
    eps: f64,
    diam: f64,
    t: usize,
    eta_bar_sum: f64,
    c: f64,
) -> Result<f64> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::Precondition(format!(
            "deviation must be positive, got {eps}"
        )));
    }
    if n < 1 || t < 2 || diam <= 0.0 || c <= 0.0 || eta_bar_sum < 1.0 {
        return Err(Error::Precondition(
            "need n >= 1, t >= 2, diam > 0, c > 0, eta_bar_sum >= 1".into(),
        ));
    }
    let exponent = c * n as f64 * eps * eps / (diam * diam * eta_bar_sum * eta_bar_sum);
    Ok((2.0 * (-exponent).exp()).min(1.0))
}

/// Two-term deviation bound for laws with exponential moments, valid for
/// deviations at least as large as the grid edge:
/// `2 exp(-c / (1 + sum eta_bar)^2 N^{a/(a+2)} eps^{2a/(a+2)})
///  + E N exp(-c N^{a/(a+2)} eps^{2a/(a+2)})`, clamped to [0, 1].
#[allow(clippy::too_many_arguments)]
pub fn concentration_bound_general(
    n: usize,
    eps: f64,
    alpha: f64,
    eta_bar_sum: f64,
    e_mu: f64,
    c: f64,
    d: usize,
    t: usize,
) -> Result<f64> {
    if n < 1 || alpha <= 0.0 || c <= 0.0 || e_mu < 1.0 || eta_bar_sum < 1.0 {
        return Err(Error::Precondition(
            "need n >= 1, alpha > 0, c > 0, e_mu >= 1, eta_bar_sum >= 1".into(),
        ));
    }
    let delta_n = grid_resolution(n, d, t)?;
    if eps < delta_n {
        return Err(Error::Precondition(format!(
            "deviation {eps} is below the grid edge {delta_n}"
        )));
    }
    let scale = (n as f64).powf(alpha / (alpha + 2.0)) * eps.powf(2.0 * alpha / (alpha + 2.0));
    let first = 2.0 * (-c * scale / (eta_bar_sum * eta_bar_sum)).exp();
    let second = e_mu * n as f64 * (-c * scale).exp();
    Ok((first + second).clamp(0.0, 1.0))
}

/// Bounded-differences deviation bound for a function that changes by at most
/// `l` when one coordinate changes:
/// `min(1, 2 exp(-eps^2 / (2 N l^2 (1 + sum eta_bar)^2)))`.
pub fn bdd_bound(n: usize, l: f64, eps: f64, eta_bar_sum: f64) -> Result<f64> {
    if n < 1 || !l.is_finite() || l <= 0.0 || eta_bar_sum < 1.0 {
        return Err(Error::Precondition(
            "need n >= 1, l > 0, eta_bar_sum >= 1".into(),
        ));
    }
    if eps < 0.0 {
        return Err(Error::Precondition("deviation must be nonnegative".into()));
    }
    let exponent = eps * eps / (2.0 * n as f64 * l * l * eta_bar_sum * eta_bar_sum);
    Ok((2.0 * (-exponent).exp()).min(1.0))
}
