//! Linear and non-linear strong data-processing bounds for the hockey-stick
//! divergence under (eps, delta)-LDP channels, their composition envelope,
//! and the max-divergence corollaries built on the vanishing criterion.
//!
//! Every function is a closed-form scalar formula. Outputs are never
//! clamped to `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::distribution::Distribution;
use crate::divergence::e_gamma;
use crate::error::{Error, Result};
use crate::ldp::PrivacyBudget;

/// A privacy budget and the order `gamma_prime >= 1` of the hockey-stick
/// divergence being contracted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdpiParams {
    budget: PrivacyBudget,
    gamma_prime: f64,
}

impl SdpiParams {
    pub fn new(budget: PrivacyBudget, gamma_prime: f64) -> Result<Self> {
        if !gamma_prime.is_finite() || gamma_prime < 1.0 {
            return Err(Error::param(
                "gamma_prime",
                gamma_prime,
                "must be finite and >= 1",
            ));
        }
        Ok(SdpiParams {
            budget,
            gamma_prime,
        })
    }

    pub fn budget(&self) -> PrivacyBudget {
        self.budget
    }

    pub fn gamma_prime(&self) -> f64 {
        self.gamma_prime
    }

    /// Slope `(e^eps + 2 delta - 1) / (e^eps + 1)` of the non-linear branch.
    pub fn slope(&self) -> f64 {
        let g = self.budget.gamma();
        (g + 2.0 * self.budget.delta() - 1.0) / (g + 1.0)
    }

    /// Offset `(gamma' - 1)(1 - delta) / (e^eps + 1)` of the non-linear branch.
    pub fn offset(&self) -> f64 {
        (self.gamma_prime - 1.0) * (1.0 - self.budget.delta()) / (self.budget.gamma() + 1.0)
    }

    /// `t* = (gamma' - 1) / (e^eps - 1)`, where the two branches of the
    /// non-linear bound cross. Infinite for `eps = 0`.
    pub fn crossover(&self) -> f64 {
        (self.gamma_prime - 1.0) / self.budget.epsilon().exp_m1()
    }
}

fn check_unit(name: &'static str, t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::param(name, t, "must lie in [0, 1]"));
    }
    Ok(())
}

/// Upper bound on the hockey-stick contraction coefficient of order
/// `gamma'`: `max((e^eps - gamma' + delta (gamma' + 1)) / (e^eps + 1), delta)`.
pub fn linear_sdpi_coeff(params: &SdpiParams) -> f64 {
    let g = params.budget.gamma();
    let d = params.budget.delta();
    let gp = params.gamma_prime;
    ((g - gp + d * (gp + 1.0)) / (g + 1.0)).max(d)
}

/// Largest output `E_gamma'` given input `E_gamma' = t`:
/// `max(((e^eps + 2 delta - 1) t - (gamma' - 1)(1 - delta)) / (e^eps + 1), delta t)`.
pub fn nonlinear_sdpi_bound(params: &SdpiParams, t: f64) -> Result<f64> {
    check_unit("t", t)?;
    let g = params.budget.gamma();
    let d = params.budget.delta();
    let gp = params.gamma_prime;
    let upper = ((g + 2.0 * d - 1.0) * t - (gp - 1.0) * (1.0 - d)) / (g + 1.0);
    Ok(upper.max(d * t))
}

/// Envelope of the `F_gamma'` curve of any (eps, delta)-LDP channel. Same
/// formula as [`nonlinear_sdpi_bound`].
pub fn f_gamma_upper(params: &SdpiParams, t: f64) -> Result<f64> {
    nonlinear_sdpi_bound(params, t)
}

/// Exact output `E_gamma'` of the extremal binary symmetric channel on a
/// Bernoulli input pair at input divergence `t`:
/// `max(t (e^eps - 1 + 2 delta) / (e^eps + 1) + (1 - delta)(1 - gamma') / (e^eps + 1), 0)`.
pub fn achievability_value(params: &SdpiParams, t: f64) -> Result<f64> {
    check_unit("t", t)?;
    let g = params.budget.gamma();
    let d = params.budget.delta();
    let gp = params.gamma_prime;
    Ok((t * (g - 1.0 + 2.0 * d) / (g + 1.0) + (1.0 - d) * (1.0 - gp) / (g + 1.0)).max(0.0))
}

/// Parameters of the `n`-fold composition envelope `G_n`. Requires
/// `1 < gamma' < e^eps` and `0 < delta < 1` strictly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositionParams {
    sdpi: SdpiParams,
    n: u32,
    a: f64,
    b: f64,
    t_star: f64,
}

impl CompositionParams {
    pub fn new(budget: PrivacyBudget, gamma_prime: f64, n: u32) -> Result<Self> {
        let sdpi = SdpiParams::new(budget, gamma_prime)?;
        if gamma_prime <= 1.0 || gamma_prime >= budget.gamma() {
            return Err(Error::param(
                "gamma_prime",
                gamma_prime,
                "composition needs 1 < gamma' < e^eps",
            ));
        }
        let d = budget.delta();
        if d <= 0.0 || d >= 1.0 {
            return Err(Error::param("delta", d, "composition needs 0 < delta < 1"));
        }
        if n == 0 {
            return Err(Error::param("n", 0.0, "need at least one mechanism"));
        }
        Ok(CompositionParams {
            sdpi,
            n,
            a: sdpi.slope(),
            b: sdpi.offset(),
            t_star: sdpi.crossover(),
        })
    }

    pub fn with_n(&self, n: u32) -> Result<Self> {
        CompositionParams::new(self.sdpi.budget, self.sdpi.gamma_prime, n)
    }

    pub fn sdpi(&self) -> SdpiParams {
        self.sdpi
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn t_star(&self) -> f64 {
        self.t_star
    }

    /// `Phi_k(t) = a^k (t + b / (1 - a)) - b / (1 - a)`, the `k`-fold iterate
    /// of `t -> a t - b`.
    pub fn phi(&self, k: u32, t: f64) -> f64 {
        let fixed = self.b / (1.0 - self.a);
        self.a.powi(k as i32) * (t + fixed) - fixed
    }

    /// Number of linear steps taken before the iterate drops to `t*`
    /// (zero when `t <= t*`).
    pub fn k_star(&self, t: f64) -> u32 {
        let (a, b) = (self.a, self.b);
        let ratio = (self.t_star * (1.0 - a) + b) / (t * (1.0 - a) + b);
        let k = (ratio.ln() / a.ln()).ceil();
        if k.is_nan() || k <= 0.0 {
            0
        } else {
            k as u32
        }
    }
}

/// Upper bound `G_n(t)` on the `F_gamma'` curve of a composition of `n`
/// (eps, delta)-LDP channels from an alphabet to itself.
pub fn composition_bound(params: &CompositionParams, t: f64) -> Result<f64> {
    check_unit("t", t)?;
    let n = params.n;
    let k = params.k_star(t);
    if n <= k {
        Ok(params.phi(n, t))
    } else {
        let d = params.sdpi.budget.delta();
        Ok(d.powi((n - k) as i32) * params.phi(k, t))
    }
}

/// Chord value of `gamma -> E_gamma` between `(g1, e_g1)` and `(g2, e_g2)`
/// at `g`; by convexity an upper bound on `E_g`.
pub fn hs_interpolation(e_g1: f64, e_g2: f64, g1: f64, g: f64, g2: f64) -> Result<f64> {
    check_unit("e_g1", e_g1)?;
    check_unit("e_g2", e_g2)?;
    if !(1.0 <= g1 && g1 <= g && g <= g2 && g2.is_finite()) {
        return Err(Error::param("g", g, "need 1 <= g1 <= g <= g2"));
    }
    if g1 == g2 {
        return Ok(e_g1);
    }
    Ok(((g2 - g) * e_g1 + (g - g1) * e_g2) / (g2 - g1))
}

/// Whether `E_lo(p || q) <= (hi - lo) min_x q(x)`, which forces
/// `E_hi(p || q) = 0`.
pub fn e_gamma_vanishes(
    p: &Distribution,
    q: &Distribution,
    gamma_lo: f64,
    gamma_hi: f64,
) -> Result<bool> {
    if gamma_lo.is_nan() || gamma_lo < 1.0 {
        return Err(Error::param("gamma_lo", gamma_lo, "must be >= 1"));
    }
    if gamma_hi.is_nan() || gamma_hi < gamma_lo {
        return Err(Error::param("gamma_hi", gamma_hi, "must be >= gamma_lo"));
    }
    let min_q = q.min_mass();
    if min_q <= 0.0 {
        return Err(Error::param("min_q", min_q, "q must have full support"));
    }
    Ok(e_gamma(p, q, gamma_lo)? <= (gamma_hi - gamma_lo) * min_q)
}

fn check_min_q(min_q: f64) -> Result<()> {
    if !(min_q > 0.0 && min_q <= 1.0) {
        return Err(Error::param("min_q", min_q, "must lie in (0, 1]"));
    }
    Ok(())
}

/// Upper bound `ln(gamma + E_gamma / min q)` on the max-divergence.
pub fn dmax_from_egamma(e_g: f64, gamma: f64, min_q: f64) -> Result<f64> {
    check_min_q(min_q)?;
    check_unit("e_g", e_g)?;
    if gamma.is_nan() || gamma < 1.0 {
        return Err(Error::param("gamma", gamma, "must be >= 1"));
    }
    Ok((gamma + e_g / min_q).ln())
}

/// Upper bound `ln(exp(D_max^delta) + delta / min q)` on the max-divergence.
pub fn dmax_from_smooth(d_smooth: f64, delta: f64, min_q: f64) -> Result<f64> {
    check_min_q(min_q)?;
    crate::divergence::check_delta(delta)?;
    Ok((d_smooth.exp() + delta / min_q).ln())
}
