//! Contraction bounds for f-divergences and KL under (eps, delta)-LDP, and
//! the comparison KL bound that carries a truncation parameter `m`.
//!
//! All quantities are in nats. `tau` is the total variation distance of the
//! inputs, passed in rather than recomputed.

use serde::{Deserialize, Serialize};

use crate::curve::BoundCurve;
use crate::distribution::{pushforward, Channel, Distribution};
use crate::error::{Error, Result};
use crate::generator::FDivGenerator;
use crate::ldp::PrivacyBudget;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdivBoundInputs {
    budget: PrivacyBudget,
    tau: f64,
    lam: f64,
    m: f64,
}

impl FdivBoundInputs {
    /// `lam` is the smallest output mass `inf_y A(P)(y)`; `m` defaults to it.
    pub fn new(budget: PrivacyBudget, tau: f64, lam: f64) -> Result<Self> {
        FdivBoundInputs::with_m(budget, tau, lam, lam)
    }

    pub fn with_m(budget: PrivacyBudget, tau: f64, lam: f64, m: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::param("tau", tau, "must lie in [0, 1]"));
        }
        if !(lam > 0.0 && lam <= 1.0) {
            return Err(Error::param("lambda", lam, "must lie in (0, 1]"));
        }
        if !(m > 0.0 && m <= 1.0) {
            return Err(Error::param("m", m, "must lie in (0, 1]"));
        }
        Ok(FdivBoundInputs {
            budget,
            tau,
            lam,
            m,
        })
    }

    pub fn budget(&self) -> PrivacyBudget {
        self.budget
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn lam(&self) -> f64 {
        self.lam
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    fn positive_epsilon(&self) -> Result<f64> {
        let e = self.budget.epsilon();
        if e <= 0.0 {
            return Err(Error::param("epsilon", e, "bound requires epsilon > 0"));
        }
        Ok(e)
    }
}

/// Smallest output mass `min_y A(P)(y)` of one input.
///
/// Not a valid `lambda` on its own once `delta > 0`: the bounds also need
/// the second output distribution bounded away from zero, see
/// [`lambda_for_pair`].
pub fn lambda_for_input(channel: &Channel, p: &Distribution) -> Result<f64> {
    Ok(pushforward(channel, p)?.min_mass())
}

/// `min_y min(A(P)(y), A(Q)(y))`, the input-dependent `lambda` under which
/// both integration limits of the bound are controlled.
pub fn lambda_for_pair(channel: &Channel, p: &Distribution, q: &Distribution) -> Result<f64> {
    Ok(lambda_for_input(channel, p)?.min(lambda_for_input(channel, q)?))
}

/// `min_{x,y} A(y | x)`, valid for every pair of inputs at once.
pub fn lambda_for_channel(channel: &Channel) -> f64 {
    channel.min_entry()
}

/// How the harness picks `lambda` for a pair of inputs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaChoice {
    /// [`lambda_for_input`] of the first input.
    Input,
    /// [`lambda_for_pair`].
    #[default]
    Pair,
    /// [`lambda_for_channel`].
    Channel,
}

impl LambdaChoice {
    pub fn resolve(self, channel: &Channel, p: &Distribution, q: &Distribution) -> Result<f64> {
        match self {
            LambdaChoice::Input => lambda_for_input(channel, p),
            LambdaChoice::Pair => lambda_for_pair(channel, p, q),
            LambdaChoice::Channel => Ok(lambda_for_channel(channel)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LambdaChoice::Input => "input",
            LambdaChoice::Pair => "pair",
            LambdaChoice::Channel => "channel",
        }
    }
}

/// Upper bound on `D_f(A(P) || A(Q))` for a generator `f`.
pub fn f_div_contraction_bound(f: &FDivGenerator, inputs: &FdivBoundInputs) -> Result<f64> {
    let e = inputs.positive_epsilon()?;
    let d = inputs.budget.delta();
    let (tau, lam) = (inputs.tau, inputs.lam);
    let g = e.exp();
    let f_up = f.eval(g);
    let f_down = f.eval((-e).exp());
    let top = g + d / lam;

    let tv_term = (f_up + g * f_down) / (g - 1.0) * (g - 1.0 + 2.0 * d) / (g + 1.0) * tau;
    let delta_term = (f_up + f_down) / (g - 1.0) * d;
    let tail = lam * (f.eval(top) - f_up + top * f.eval(1.0 / top) - top * f_down);
    Ok(tv_term - delta_term + tail)
}

/// Upper bound on `KL(A(P) || A(Q))` in nats.
pub fn kl_contraction_bound(inputs: &FdivBoundInputs) -> Result<f64> {
    let e = inputs.positive_epsilon()?;
    let d = inputs.budget.delta();
    let (tau, lam) = (inputs.tau, inputs.lam);
    let g = e.exp();
    let ratio = d / lam;
    let top = g + ratio;

    let tv_term = e * (g - 1.0 + 2.0 * d) / (g + 1.0) * tau;
    let delta_term = e * (g - (-e).exp()) / (g - 1.0) * d;
    let tail = lam * ((top - 1.0) * top.ln() + (1.0 - g + ratio * (-e).exp()) * e);
    Ok(tv_term - delta_term + tail)
}

fn comparison_parts(inputs: &FdivBoundInputs) -> Result<(f64, f64, f64, f64)> {
    let d = inputs.budget.delta();
    if d >= 1.0 {
        return Err(Error::param(
            "delta",
            d,
            "comparison bound requires delta < 1",
        ));
    }
    let e = inputs.budget.epsilon();
    Ok((e, d, e.exp(), (1.0 / (1.0 - d)).ln()))
}

/// The comparison KL bound, written with the `tanh` expanded so that its
/// `tau` prefactor lines up with [`kl_contraction_bound`].
pub fn dasgupta_kl_bound(inputs: &FdivBoundInputs) -> Result<f64> {
    let (e, d, g, log_inv) = comparison_parts(inputs)?;
    let tau_coeff = e * (g - 1.0 + 2.0 * d) / (g + 1.0) + d * ((g + d - 1.0) / g + log_inv);
    let constant = d * (g / (1.0 - d) - (1.0 - d) / g + 4.0 * (e + log_inv + 1.0 / inputs.m));
    let value = tau_coeff * inputs.tau + constant;
    debug_assert!(
        (value - dasgupta_kl_bound_tanh_form(inputs)?).abs() <= 1e-12 * value.abs().max(1.0)
    );
    Ok(value)
}

/// The comparison KL bound in its original `tanh` form.
pub fn dasgupta_kl_bound_tanh_form(inputs: &FdivBoundInputs) -> Result<f64> {
    let (e, d, g, log_inv) = comparison_parts(inputs)?;
    let tau_coeff = e * (0.5 * e).tanh() + d * (2.0 * e / (g + 1.0) + (g + d - 1.0) / g + log_inv);
    let constant = d
        * (g / (1.0 - d) + 2.0 * (g / (1.0 - d)).ln() - (1.0 - d) / g
            + 2.0 * (e + log_inv + 2.0 / inputs.m));
    Ok(tau_coeff * inputs.tau + constant)
}

/// Which parameter a comparison sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    /// Sweep `lambda`, keeping `m = lambda`.
    Lambda,
    /// Sweep `epsilon`, keeping `lambda` and `m` fixed.
    Epsilon,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Lambda => "lambda",
            SweepAxis::Epsilon => "epsilon",
        }
    }
}

/// Evaluates [`kl_contraction_bound`] and [`dasgupta_kl_bound`] along
/// `grid`, returning the two series as `(ours, comparison)`.
pub fn bound_comparison_grid(
    axis: SweepAxis,
    fixed: &FdivBoundInputs,
    grid: &[f64],
) -> Result<(BoundCurve, BoundCurve)> {
    if grid.is_empty() {
        return Err(Error::Empty);
    }
    let mut ours = Vec::with_capacity(grid.len());
    let mut theirs = Vec::with_capacity(grid.len());
    for &x in grid {
        let inputs = match axis {
            SweepAxis::Lambda => FdivBoundInputs::with_m(fixed.budget, fixed.tau, x, x)?,
            SweepAxis::Epsilon => FdivBoundInputs::with_m(
                PrivacyBudget::new(x, fixed.budget.delta())?,
                fixed.tau,
                fixed.lam,
                fixed.m,
            )?,
        };
        ours.push((x, kl_contraction_bound(&inputs)?));
        theirs.push((x, dasgupta_kl_bound(&inputs)?));
    }

    let mut params = vec![("delta", fixed.budget.delta()), ("tau", fixed.tau)];
    match axis {
        SweepAxis::Lambda => params.push(("epsilon", fixed.budget.epsilon())),
        SweepAxis::Epsilon => {
            params.push(("lambda", fixed.lam));
            params.push(("m", fixed.m));
        }
    }
    Ok((
        BoundCurve::new("ours", &params, ours)?,
        BoundCurve::new("dasgupta", &params, theirs)?,
    ))
}

/// `tau` shared by both default sweeps.
pub const SWEEP_TAU: f64 = 0.25;
/// Points per default sweep.
pub const SWEEP_POINTS: usize = 50;
pub const LAMBDA_SWEEP_EPSILONS: [f64; 3] = [1.0, 2.0, 3.0];
pub const LAMBDA_SWEEP_DELTA: f64 = 0.01;
pub const LAMBDA_SWEEP_RANGE: (f64, f64) = (0.01, 0.5);
pub const EPSILON_SWEEP_DELTAS: [f64; 3] = [0.1, 0.2, 0.3];
pub const EPSILON_SWEEP_LAMBDA: f64 = 0.1;
pub const EPSILON_SWEEP_RANGE: (f64, f64) = (0.1, 4.0);

/// One family of the default sweep along `axis`: the family parameter
/// (`epsilon` for the lambda axis, `delta` for the epsilon axis) with its
/// `(ours, comparison)` curves.
pub type SweepFamily = (f64, BoundCurve, BoundCurve);

/// The default comparison sweeps: three `epsilon` values over a `lambda = m`
/// grid, or three `delta` values over an `epsilon` grid with `lambda = m` fixed.
pub fn default_sweep(axis: SweepAxis, points: usize) -> Result<Vec<SweepFamily>> {
    let ((lo, hi), series): ((f64, f64), &[f64]) = match axis {
        SweepAxis::Lambda => (LAMBDA_SWEEP_RANGE, &LAMBDA_SWEEP_EPSILONS),
        SweepAxis::Epsilon => (EPSILON_SWEEP_RANGE, &EPSILON_SWEEP_DELTAS),
    };
    let grid = crate::curve::linspace(lo, hi, points);
    series
        .iter()
        .map(|&s| {
            let fixed = match axis {
                SweepAxis::Lambda => {
                    FdivBoundInputs::new(PrivacyBudget::new(s, LAMBDA_SWEEP_DELTA)?, SWEEP_TAU, lo)?
                }
                SweepAxis::Epsilon => FdivBoundInputs::new(
                    PrivacyBudget::new(lo, s)?,
                    SWEEP_TAU,
                    EPSILON_SWEEP_LAMBDA,
                )?,
            };
            let (ours, theirs) = bound_comparison_grid(axis, &fixed, &grid)?;
            Ok((s, ours, theirs))
        })
        .collect()
}
