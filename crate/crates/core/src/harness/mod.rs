//! Randomized verification of every bound and claimed equality against
//! exact computation on sampled channels and distributions.
//!
//! Each suite runs `trials` independent trials. Trial `i` draws from its own
//! stream derived from `(seed, i)`, so a report depends only on the suite,
//! its parameters and the seed, never on how trials were scheduled.

mod report;
mod sampling;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::{pushforward, Channel, Distribution};
use crate::divergence::{
    d_max, d_max_smooth, e_gamma, f_divergence, f_divergence_integral, kl, total_variation,
};
use crate::error::{Error, Result};
use crate::fdiv_bounds::{
    f_div_contraction_bound, kl_contraction_bound, FdivBoundInputs, LambdaChoice,
};
use crate::generator::FDivGenerator;
use crate::ldp::{make_bsc, sample_ldp_channel_with, tightest_delta, PrivacyBudget};
use crate::parallel::{map_indexed, Execution};
use crate::sdpi::{
    achievability_value, composition_bound, dmax_from_egamma, dmax_from_smooth, e_gamma_vanishes,
    linear_sdpi_coeff, nonlinear_sdpi_bound, CompositionParams, SdpiParams,
};

pub use report::VerificationReport;
pub use sampling::{
    empirical_contraction, sample_distribution_pair, trial_rng, FULL_SUPPORT_FLOOR,
};

use report::Tally;
use sampling::pair_with;

/// Slack allowed on inequality checks.
pub const INEQUALITY_TOL: f64 = 1e-9;
/// Allowed gap between the extremal channel's output and the closed form.
pub const ACHIEVABILITY_TOL: f64 = 1e-10;
/// Allowed gap between quadrature and the direct f-divergence sum.
pub const INTEGRAL_TOL: f64 = 1e-6;
/// Allowed gap between the closed-form envelope and the iterated recursion.
pub const COMPOSITION_ORACLE_TOL: f64 = 1e-12;

/// Budgets cycled through when a suite is not pinned to a single budget.
pub fn default_ensemble() -> Vec<PrivacyBudget> {
    let mut out = Vec::with_capacity(9);
    for eps in [0.5, 6f64.ln(), 2.0] {
        for delta in [0.0, 0.01, 0.1] {
            out.push(PrivacyBudget::new(eps, delta).expect("static budget"));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Exact contraction <= non-linear <= linear * t <= t on sampled LDP channels.
    DpiAndSdpi,
    /// The extremal binary symmetric channel meets the non-linear bound.
    Achievability,
    /// The vanishing criterion forces `E_gamma = 0`.
    Vanishing,
    /// Max-divergence corollaries dominate the exact max-divergence.
    DmaxCorollaries,
    /// Integral representation agrees with the direct f-divergence sum.
    IntegralRep,
    /// KL and chi-squared contraction bounds are sound.
    FdivBounds,
    /// Composition envelope is sound and matches its recursion.
    Composition,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::DpiAndSdpi,
        Suite::Achievability,
        Suite::Vanishing,
        Suite::DmaxCorollaries,
        Suite::IntegralRep,
        Suite::FdivBounds,
        Suite::Composition,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::DpiAndSdpi => "dpi_and_sdpi",
            Suite::Achievability => "achievability",
            Suite::Vanishing => "vanishing",
            Suite::DmaxCorollaries => "dmax_corollaries",
            Suite::IntegralRep => "integral_rep",
            Suite::FdivBounds => "fdiv_bounds",
            Suite::Composition => "composition",
        }
    }

    /// Tolerance of the suite's headline check.
    pub fn tolerance(&self) -> f64 {
        match self {
            Suite::Achievability => ACHIEVABILITY_TOL,
            Suite::Vanishing => 0.0,
            Suite::IntegralRep => INTEGRAL_TOL,
            _ => INEQUALITY_TOL,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

/// Knobs shared by all suites. Unset fields fall back to per-suite defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteParams {
    /// Pin every trial to one budget instead of cycling the ensemble.
    pub budget: Option<PrivacyBudget>,
    pub gamma_prime: Option<f64>,
    /// Largest alphabet size drawn, in `[2, 8]`.
    pub max_size: usize,
    /// Distribution pairs examined per sampled channel.
    pub pairs_per_trial: usize,
    /// Number of composed channels in the composition suite.
    pub depth: u32,
    /// How the f-divergence suite sets `lambda`.
    pub lambda: LambdaChoice,
    /// Also check the chi-squared bound in the f-divergence suite.
    pub chi_squared: bool,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            budget: None,
            gamma_prime: None,
            max_size: 6,
            pairs_per_trial: 10,
            depth: 3,
            lambda: LambdaChoice::default(),
            chi_squared: true,
        }
    }
}

impl SuiteParams {
    fn validate(&self) -> Result<()> {
        if !(2..=8).contains(&self.max_size) {
            return Err(Error::param(
                "max_size",
                self.max_size as f64,
                "must lie in [2, 8]",
            ));
        }
        if self.pairs_per_trial == 0 {
            return Err(Error::param("pairs_per_trial", 0.0, "must be positive"));
        }
        if let Some(gp) = self.gamma_prime {
            if !gp.is_finite() || gp < 1.0 {
                return Err(Error::param("gamma_prime", gp, "must be finite and >= 1"));
            }
        }
        Ok(())
    }

    fn budget_or(&self, fallback: PrivacyBudget) -> PrivacyBudget {
        self.budget.unwrap_or(fallback)
    }

    fn reference_budget(&self) -> PrivacyBudget {
        self.budget_or(PrivacyBudget::new(6f64.ln(), 0.01).expect("static budget"))
    }

    fn echo(&self, suite: Suite) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        let (budget, gamma_prime) = match suite {
            Suite::Achievability | Suite::Composition => (
                Some(self.reference_budget()),
                Some(self.gamma_prime.unwrap_or(2.5)),
            ),
            Suite::DpiAndSdpi | Suite::FdivBounds => (self.budget, self.gamma_prime),
            _ => (None, None),
        };
        if let Some(b) = budget {
            m.insert("epsilon".into(), b.epsilon());
            m.insert("delta".into(), b.delta());
        }
        if let Some(gp) = gamma_prime {
            m.insert("gamma_prime".into(), gp);
        }
        m.insert("max_size".into(), self.max_size as f64);
        if matches!(
            suite,
            Suite::DpiAndSdpi | Suite::FdivBounds | Suite::Composition
        ) {
            m.insert("pairs_per_trial".into(), self.pairs_per_trial as f64);
        }
        if suite == Suite::Composition {
            m.insert("depth".into(), self.depth as f64);
        }
        if suite == Suite::FdivBounds {
            m.insert(
                "chi_squared".into(),
                if self.chi_squared { 1.0 } else { 0.0 },
            );
        }
        m
    }
}

/// Runs `suite` with the default execution strategy.
pub fn run_suite(
    suite: Suite,
    params: &SuiteParams,
    trials: u64,
    seed: u64,
) -> Result<VerificationReport> {
    run_suite_with(suite, params, trials, seed, Execution::default())
}

pub fn run_suite_with(
    suite: Suite,
    params: &SuiteParams,
    trials: u64,
    seed: u64,
    execution: Execution,
) -> Result<VerificationReport> {
    if trials == 0 {
        return Err(Error::param("trials", 0.0, "need at least one trial"));
    }
    params.validate()?;
    let ctx = Context::new(suite, params)?;
    let tally = map_indexed(execution, trials, |i| {
        let mut rng = trial_rng(seed, i);
        let mut tally = Tally::default();
        ctx.trial(i, &mut rng, &mut tally).map(|_| tally)
    })
    .into_iter()
    .try_fold(Tally::default(), |acc, t| t.map(|t| acc.merge(t)))?;

    Ok(VerificationReport {
        suite: suite.name().to_owned(),
        trials,
        checks: tally.checks,
        violations: tally.violations,
        max_violation: tally.min_slack.min(0.0),
        worst_slack: (tally.checks > 0).then_some(tally.min_slack),
        tolerance: suite.tolerance(),
        seed,
        params: params.echo(suite),
        lambda: (suite == Suite::FdivBounds).then_some(params.lambda),
    })
}

/// Suite configuration resolved once before the trials run.
struct Context<'a> {
    suite: Suite,
    params: &'a SuiteParams,
    ensemble: Vec<PrivacyBudget>,
    composition: Option<CompositionParams>,
}

impl<'a> Context<'a> {
    fn new(suite: Suite, params: &'a SuiteParams) -> Result<Self> {
        let ensemble = match params.budget {
            Some(b) => vec![b],
            None => default_ensemble(),
        };
        let composition = match suite {
            Suite::Composition => Some(CompositionParams::new(
                params.reference_budget(),
                params.gamma_prime.unwrap_or(2.5),
                params.depth,
            )?),
            _ => None,
        };
        if suite == Suite::FdivBounds && ensemble.iter().any(|b| b.epsilon() <= 0.0) {
            return Err(Error::param(
                "epsilon",
                0.0,
                "f-divergence bounds require epsilon > 0",
            ));
        }
        if suite == Suite::Achievability {
            let b = params.reference_budget();
            let gp = params.gamma_prime.unwrap_or(2.5);
            if achievability_threshold(b, gp) > 1.0 {
                return Err(Error::param(
                    "gamma_prime",
                    gp,
                    "achievability regime is empty for these parameters",
                ));
            }
        }
        Ok(Context {
            suite,
            params,
            ensemble,
            composition,
        })
    }

    fn size<R: Rng>(&self, rng: &mut R) -> usize {
        rng.random_range(2..=self.params.max_size)
    }

    fn gamma_prime<R: Rng>(&self, budget: PrivacyBudget, rng: &mut R) -> f64 {
        self.params
            .gamma_prime
            .unwrap_or_else(|| 1.0 + rng.random::<f64>() * budget.gamma())
    }

    fn trial<R: Rng>(&self, index: u64, rng: &mut R, tally: &mut Tally) -> Result<()> {
        match self.suite {
            Suite::DpiAndSdpi => self.dpi_and_sdpi(index, rng, tally),
            Suite::Achievability => self.achievability(index, rng, tally),
            Suite::Vanishing => vanishing(self.size(rng), rng, tally),
            Suite::DmaxCorollaries => dmax_corollaries(self.size(rng), rng, tally),
            Suite::IntegralRep => integral_rep(self.size(rng), rng, tally),
            Suite::FdivBounds => self.fdiv_bounds(index, rng, tally),
            Suite::Composition => self.composition(rng, tally),
        }
    }

    fn budget_for(&self, index: u64) -> PrivacyBudget {
        self.ensemble[(index % self.ensemble.len() as u64) as usize]
    }

    /// Input pairs for one channel: the first is a pair of distinct point
    /// masses, the vertex where the contraction coefficient is attained.
    fn pairs<R: Rng>(&self, n: usize, rng: &mut R) -> Result<Vec<(Distribution, Distribution)>> {
        let mut out = Vec::with_capacity(self.params.pairs_per_trial);
        let x = rng.random_range(0..n);
        let x2 = (x + rng.random_range(1..n)) % n;
        out.push((
            Distribution::point_mass(n, x)?,
            Distribution::point_mass(n, x2)?,
        ));
        while out.len() < self.params.pairs_per_trial {
            out.push(pair_with(n, false, rng)?);
        }
        Ok(out)
    }

    fn dpi_and_sdpi<R: Rng>(&self, index: u64, rng: &mut R, tally: &mut Tally) -> Result<()> {
        let budget = self.budget_for(index);
        let (n, m) = (self.size(rng), self.size(rng));
        let channel = sample_ldp_channel_with(budget, n, m, rng)?;
        tally.at_most(
            tightest_delta(&channel, budget.epsilon())?,
            budget.delta(),
            1e-12,
        );
        let sdpi = SdpiParams::new(budget, self.gamma_prime(budget, rng))?;
        let linear = linear_sdpi_coeff(&sdpi);
        for (p, q) in self.pairs(n, rng)? {
            let (t, exact) = empirical_contraction(&channel, &p, &q, sdpi.gamma_prime())?;
            let nonlinear = nonlinear_sdpi_bound(&sdpi, t)?;
            tally.at_most(exact, nonlinear, INEQUALITY_TOL);
            tally.at_most(exact, linear * t, INEQUALITY_TOL);
            tally.at_most(nonlinear, linear * t, INEQUALITY_TOL);
            tally.at_most(linear * t, t, INEQUALITY_TOL);
            tally.at_most(achievability_value(&sdpi, t)?, nonlinear, INEQUALITY_TOL);
        }
        Ok(())
    }

    fn achievability<R: Rng>(&self, index: u64, rng: &mut R, tally: &mut Tally) -> Result<()> {
        let budget = self.params.reference_budget();
        let sdpi = SdpiParams::new(budget, self.params.gamma_prime.unwrap_or(2.5))?;
        let bsc = make_bsc(budget);
        let (p, q) = if index == 0 {
            (
                Distribution::point_mass(2, 0)?,
                Distribution::point_mass(2, 1)?,
            )
        } else {
            let lo = achievability_threshold(budget, sdpi.gamma_prime());
            bernoulli_pair_at(
                lo + (1.0 - lo) * rng.random::<f64>(),
                sdpi.gamma_prime(),
                rng,
            )?
        };
        let (t, exact) = empirical_contraction(&bsc, &p, &q, sdpi.gamma_prime())?;
        tally.close(exact, achievability_value(&sdpi, t)?, ACHIEVABILITY_TOL);
        Ok(())
    }

    fn fdiv_bounds<R: Rng>(&self, index: u64, rng: &mut R, tally: &mut Tally) -> Result<()> {
        let budget = self.budget_for(index);
        let (n, m) = (self.size(rng), self.size(rng));
        let channel = sample_ldp_channel_with(budget, n, m, rng)?;
        let kl_gen = FDivGenerator::kl();
        let chi2 = FDivGenerator::chi_squared();
        for (p, q) in self.pairs(n, rng)? {
            let (out_p, out_q) = (pushforward(&channel, &p)?, pushforward(&channel, &q)?);
            let lam = self.params.lambda.resolve(&channel, &p, &q)?;
            if lam <= 0.0 {
                continue;
            }
            let inputs = FdivBoundInputs::new(budget, total_variation(&p, &q)?, lam)?;
            tally.at_most(
                kl(&out_p, &out_q)?,
                kl_contraction_bound(&inputs)?,
                INEQUALITY_TOL,
            );
            if self.params.chi_squared {
                tally.at_most(
                    f_divergence(&out_p, &out_q, &chi2)?,
                    f_div_contraction_bound(&chi2, &inputs)?,
                    INEQUALITY_TOL,
                );
            }
            tally.close(
                f_div_contraction_bound(&kl_gen, &inputs)?,
                kl_contraction_bound(&inputs)?,
                INEQUALITY_TOL,
            );
        }
        Ok(())
    }

    fn composition<R: Rng>(&self, rng: &mut R, tally: &mut Tally) -> Result<()> {
        let params = self
            .composition
            .expect("resolved for the composition suite");
        let budget = params.sdpi().budget();
        let n = self.size(rng);
        let mut chain = Channel::identity(n)?;
        for _ in 0..params.n() {
            chain = chain.then(&sample_ldp_channel_with(budget, n, n, rng)?)?;
        }
        for (p, q) in self.pairs(n, rng)? {
            let (t, exact) = empirical_contraction(&chain, &p, &q, params.sdpi().gamma_prime())?;
            tally.at_most(exact, composition_bound(&params, t)?, INEQUALITY_TOL);
        }
        let t = rng.random::<f64>();
        for k in 1..=params.n() {
            let closed = composition_bound(&params.with_n(k)?, t)?;
            tally.close(
                closed,
                iterate_envelope(&params, k, t),
                COMPOSITION_ORACLE_TOL,
            );
        }
        Ok(())
    }
}

/// `(gamma' - 1) / (e^eps + 1)`, the input level above which the extremal
/// channel is known to meet the non-linear bound.
pub fn achievability_threshold(budget: PrivacyBudget, gamma_prime: f64) -> f64 {
    (gamma_prime - 1.0) / (budget.gamma() + 1.0)
}

/// A Bernoulli pair with `E_gamma'(p || q) = t`, `t` in `(0, 1]`, in random
/// orientation.
fn bernoulli_pair_at<R: Rng>(
    t: f64,
    gamma_prime: f64,
    rng: &mut R,
) -> Result<(Distribution, Distribution)> {
    let heavy = t + (1.0 - t) * rng.random::<f64>();
    let light = (heavy - t) / gamma_prime;
    let (mut p, mut q) = (vec![heavy, 1.0 - heavy], vec![light, 1.0 - light]);
    if rng.random_bool(0.5) {
        p.reverse();
        q.reverse();
    }
    Ok((Distribution::new(p)?, Distribution::new(q)?))
}

/// Rounding allowed when `E_gamma` is probed exactly at the vanishing order.
const BOUNDARY_TOL: f64 = 1e-15;

/// Applies `x -> max(a x - b, delta x)` `k` times, with the coefficients
/// recomputed from the budget rather than taken from [`CompositionParams`].
pub fn iterate_envelope(params: &CompositionParams, k: u32, t: f64) -> f64 {
    let budget = params.sdpi().budget();
    let (e, d, gp) = (
        budget.epsilon(),
        budget.delta(),
        params.sdpi().gamma_prime(),
    );
    let g = e.exp();
    let slope = (g + 2.0 * d - 1.0) / (g + 1.0);
    let offset = (gp - 1.0) * (1.0 - d) / (g + 1.0);
    let switch = (gp - 1.0) / (g - 1.0);
    let mut x = t;
    for _ in 0..k {
        x = if x > switch {
            slope * x - offset
        } else {
            d * x
        };
    }
    x
}

fn vanishing<R: Rng>(n: usize, rng: &mut R, tally: &mut Tally) -> Result<()> {
    let (p, q) = pair_with(n, true, rng)?;
    let lo = 1.0 + 2.0 * rng.random::<f64>();
    let e_lo = e_gamma(&p, &q, lo)?;
    let reach = e_lo / q.min_mass();
    // The boundary order and one order strictly past it.
    // At the boundary itself the zero is only reached up to rounding.
    let past = lo + reach * (1.0 + rng.random::<f64>());
    for (hi, tol) in [(lo + reach, BOUNDARY_TOL), (past, 0.0)] {
        if e_gamma_vanishes(&p, &q, lo, hi)? {
            tally.record(-e_gamma(&p, &q, hi)?, tol);
        }
    }
    Ok(())
}

fn dmax_corollaries<R: Rng>(n: usize, rng: &mut R, tally: &mut Tally) -> Result<()> {
    let (p, q) = pair_with(n, true, rng)?;
    let exact = d_max(&p, &q)?;
    let min_q = q.min_mass();
    let gamma = 1.0 + 3.0 * rng.random::<f64>();
    let delta = rng.random::<f64>();
    let from_e = dmax_from_egamma(e_gamma(&p, &q, gamma)?, gamma, min_q)?;
    tally.at_most(exact, from_e, INEQUALITY_TOL);
    let from_smooth = dmax_from_smooth(d_max_smooth(&p, &q, delta)?, delta, min_q)?;
    tally.at_most(exact, from_smooth, INEQUALITY_TOL);
    Ok(())
}

fn integral_rep<R: Rng>(n: usize, rng: &mut R, tally: &mut Tally) -> Result<()> {
    let (p, q) = pair_with(n, true, rng)?;
    for f in [FDivGenerator::kl(), FDivGenerator::chi_squared()] {
        tally.close(
            f_divergence_integral(&p, &q, &f)?,
            f_divergence(&p, &q, &f)?,
            INTEGRAL_TOL,
        );
    }
    Ok(())
}
