//! (epsilon, delta)-local differential privacy of finite channels.
//!
//! A channel is (eps, delta)-LDP exactly when its hockey-stick contraction
//! coefficient at order `e^eps` is at most `delta`; equivalently when every
//! ordered pair of rows has smooth max-divergence at most `eps` at slack
//! `delta`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::distribution::Channel;
use crate::divergence::{check_delta, contraction_coefficient_hs, max_pairwise_smooth};
use crate::error::{Error, Result};

/// Slack allowed when comparing a contraction coefficient with `delta`.
pub const LDP_TOL: f64 = 1e-12;

const SAMPLER_RETRIES: usize = 64;

/// Privacy parameters; `epsilon` is in nats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrivacyBudget {
    epsilon: f64,
    delta: f64,
}

impl PrivacyBudget {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        check_delta(delta)?;
        Ok(PrivacyBudget { epsilon, delta })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `e^epsilon`, the hockey-stick order that certifies the budget.
    pub fn gamma(&self) -> f64 {
        self.epsilon.exp()
    }
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::param("epsilon", epsilon, "must be finite and >= 0"));
    }
    Ok(())
}

pub fn is_ldp(channel: &Channel, budget: PrivacyBudget) -> bool {
    tightest_delta(channel, budget.epsilon()).is_ok_and(|d| d <= budget.delta() + LDP_TOL)
}

/// Least `delta` for which `channel` is (epsilon, delta)-LDP.
pub fn tightest_delta(channel: &Channel, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    contraction_coefficient_hs(channel, epsilon.exp())
}

/// Least `epsilon` for which `channel` is (epsilon, delta)-LDP; infinite when
/// two rows are too far apart in support for `delta` to cover.
pub fn tightest_epsilon(channel: &Channel, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok(max_pairwise_smooth(channel, delta).max(0.0))
}

/// Binary symmetric channel with flip probability `(1 - delta) / (e^eps + 1)`;
/// its tightest delta at `eps` is exactly `delta`.
pub fn make_bsc(budget: PrivacyBudget) -> Channel {
    let flip = (1.0 - budget.delta()) / (budget.gamma() + 1.0);
    Channel::binary_symmetric(flip).expect("flip probability lies in [0, 1/2]")
}

/// `k`-ary randomized response: report the true symbol with probability
/// `e^eps / (e^eps + k - 1)` and each other symbol with `1 / (e^eps + k - 1)`.
pub fn make_randomized_response(epsilon: f64, k: usize) -> Result<Channel> {
    check_epsilon(epsilon)?;
    if k < 2 {
        return Err(Error::param("k", k as f64, "need at least two symbols"));
    }
    let g = epsilon.exp();
    let norm = g + (k - 1) as f64;
    let keep = g / norm;
    let other = 1.0 / norm;
    Channel::new(
        (0..k)
            .map(|i| (0..k).map(|j| if i == j { keep } else { other }).collect())
            .collect(),
    )
}

/// Draws a random channel that satisfies `budget`, deterministically in `seed`.
///
/// The core is an (eps, 0)-LDP channel obtained by exponentially tilting a
/// random base row, then each row is mixed with weight `delta` into the
/// matching row of an independent random channel. The draw is checked with
/// [`is_ldp`] and redrawn on failure.
pub fn sample_ldp_channel(
    budget: PrivacyBudget,
    in_size: usize,
    out_size: usize,
    seed: u64,
) -> Result<Channel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_ldp_channel_with(budget, in_size, out_size, &mut rng)
}

pub(crate) fn sample_ldp_channel_with<R: Rng>(
    budget: PrivacyBudget,
    in_size: usize,
    out_size: usize,
    rng: &mut R,
) -> Result<Channel> {
    for (name, n) in [("in_size", in_size), ("out_size", out_size)] {
        if !(2..=8).contains(&n) {
            return Err(Error::param(name, n as f64, "must lie in [2, 8]"));
        }
    }
    for _ in 0..SAMPLER_RETRIES {
        let core = tilted_core(budget.epsilon(), in_size, out_size, rng);
        let rows = mix_toward_random(core, budget.delta(), rng);
        if let Ok(channel) = Channel::new(rows) {
            if is_ldp(&channel, budget) {
                return Ok(channel);
            }
        }
    }
    Err(Error::RetriesExhausted(SAMPLER_RETRIES))
}

fn simplex_point<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

fn normalize(mut row: Vec<f64>) -> Vec<f64> {
    let total: f64 = row.iter().sum();
    row.iter_mut().for_each(|v| *v /= total);
    row
}

fn tilted_core<R: Rng>(
    epsilon: f64,
    in_size: usize,
    out_size: usize,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    if rng.random_bool(0.5) {
        // Rows are permutations of one tilted vector whose entries span
        // exactly [1, e^eps], so every pairwise ratio stays within e^eps and
        // randomized response is reachable.
        let mut exponents: Vec<f64> = (0..out_size).map(|_| rng.random::<f64>()).collect();
        exponents[0] = 0.0;
        exponents[1] = 1.0;
        let base = normalize(exponents.iter().map(|u| (epsilon * u).exp()).collect());
        (0..in_size)
            .map(|_| {
                let mut row = base.clone();
                row.shuffle(rng);
                row
            })
            .collect()
    } else {
        // Independent tilts of a shared base row by at most e^(eps/2); the
        // normalizers then differ by at most e^(eps/2) as well.
        let base = simplex_point(out_size, rng);
        (0..in_size)
            .map(|_| {
                normalize(
                    base.iter()
                        .map(|w| w * (0.5 * epsilon * rng.random::<f64>()).exp())
                        .collect(),
                )
            })
            .collect()
    }
}

fn mix_toward_random<R: Rng>(core: Vec<Vec<f64>>, delta: f64, rng: &mut R) -> Vec<Vec<f64>> {
    if delta == 0.0 {
        return core;
    }
    let out_size = core[0].len();
    let deterministic = rng.random_bool(0.5);
    core.into_iter()
        .map(|row| {
            let other = if deterministic {
                let mut v = vec![0.0; out_size];
                v[rng.random_range(0..out_size)] = 1.0;
                v
            } else {
                simplex_point(out_size, rng)
            };
            row.iter()
                .zip(&other)
                .map(|(c, o)| (1.0 - delta) * c + delta * o)
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bsc(flip: f64) -> Channel {
        Channel::binary_symmetric(flip).unwrap()
    }

    #[test]
    fn budget_validation() {
        assert!(PrivacyBudget::new(-0.1, 0.0).is_err());
        assert!(PrivacyBudget::new(f64::INFINITY, 0.0).is_err());
        assert!(PrivacyBudget::new(1.0, 1.1).is_err());
        assert!(PrivacyBudget::new(1.0, -0.1).is_err());
        assert!(PrivacyBudget::new(0.0, 1.0).is_ok());
    }

    #[test]
    fn is_ldp_examples() {
        let b = |e: f64, d: f64| PrivacyBudget::new(e, d).unwrap();
        assert!(is_ldp(&bsc(0.2), b(4f64.ln(), 0.0)));
        assert!(!is_ldp(&bsc(0.2), b(3f64.ln(), 0.1)));
        let flat = Channel::new(vec![vec![0.3, 0.7]; 3]).unwrap();
        assert!(is_ldp(&flat, b(0.0, 0.0)));
    }

    #[test]
    fn tightest_delta_examples() {
        assert!((tightest_delta(&bsc(0.2), 0.0).unwrap() - 0.6).abs() < 1e-15);
        assert!(tightest_delta(&bsc(0.2), 4f64.ln()).unwrap() < 1e-15);
        let id = Channel::identity(2).unwrap();
        for e in [0.0, 1.0, 30.0] {
            assert_eq!(tightest_delta(&id, e).unwrap(), 1.0);
        }
        assert!(tightest_delta(&id, -1.0).is_err());
    }

    #[test]
    fn tightest_epsilon_examples() {
        assert!((tightest_epsilon(&bsc(0.2), 0.0).unwrap() - 4f64.ln()).abs() < 1e-15);
        let id = Channel::identity(2).unwrap();
        assert_eq!(tightest_epsilon(&id, 1.0).unwrap(), 0.0);
        assert_eq!(tightest_epsilon(&id, 0.0).unwrap(), f64::INFINITY);
        assert!(tightest_epsilon(&bsc(0.2), 0.6).unwrap() < 1e-15);
    }

    #[test]
    fn bsc_examples() {
        let b = PrivacyBudget::new(6f64.ln(), 0.01).unwrap();
        let c = make_bsc(b);
        assert!((c.row(0)[1] - 0.99 / 7.0).abs() < 1e-15);
        assert!((tightest_delta(&c, 6f64.ln()).unwrap() - 0.01).abs() < 1e-12);
        let c0 = make_bsc(PrivacyBudget::new(0.0, 0.0).unwrap());
        assert_eq!(c0.row(0), &[0.5, 0.5]);
        assert_eq!(c0.row(1), &[0.5, 0.5]);
    }

    #[test]
    fn randomized_response_examples() {
        for e in [0.0, 0.7, 3.0] {
            let rr = make_randomized_response(e, 2).unwrap();
            let bsc = make_bsc(PrivacyBudget::new(e, 0.0).unwrap());
            for (a, b) in rr.rows().iter().flatten().zip(bsc.rows().iter().flatten()) {
                assert!((a - b).abs() < 1e-15);
            }
        }
        let flat = make_randomized_response(0.0, 5).unwrap();
        assert!(flat.rows().iter().flatten().all(|&v| v == 0.2));
        let rr = make_randomized_response(4f64.ln(), 2).unwrap();
        assert!((tightest_epsilon(&rr, 0.0).unwrap() - 4f64.ln()).abs() < 1e-12);
        assert!(make_randomized_response(1.0, 1).is_err());
    }

    #[test]
    fn sampler_examples() {
        let zero = PrivacyBudget::new(0.0, 0.0).unwrap();
        for seed in 0..20 {
            let c = sample_ldp_channel(zero, 3, 4, seed).unwrap();
            assert!(c.rows().iter().all(|r| r == c.row(0)));
        }
        let b = PrivacyBudget::new(6f64.ln(), 0.01).unwrap();
        assert_eq!(
            sample_ldp_channel(b, 4, 5, 11).unwrap(),
            sample_ldp_channel(b, 4, 5, 11).unwrap()
        );
        assert!(sample_ldp_channel(b, 1, 5, 0).is_err());
        assert!(sample_ldp_channel(b, 2, 9, 0).is_err());
    }

    #[test]
    fn sampler_draws_are_private() {
        let b = PrivacyBudget::new(6f64.ln(), 0.01).unwrap();
        for seed in 0..1000u64 {
            let n = 2 + (seed % 5) as usize;
            let m = 2 + ((seed / 5) % 5) as usize;
            let c = sample_ldp_channel(b, n, m, seed).unwrap();
            assert!(is_ldp(&c, b), "seed {seed}");
        }
    }
}
