use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::distribution::{pushforward, Channel, Distribution};
use crate::divergence::e_gamma;
use crate::error::{Error, Result};

/// Entries below this are rejected when a full-support pair is requested.
pub const FULL_SUPPORT_FLOOR: f64 = 1e-3;

/// Random stream for one trial. Depends only on `(seed, trial)`, so trial
/// results do not depend on scheduling.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub(crate) fn simplex_with<R: Rng>(n: usize, full_support: bool, rng: &mut R) -> Distribution {
    loop {
        let w: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let d = Distribution::from_weights(&w).expect("exponential weights are positive");
        if !full_support || d.min_mass() >= FULL_SUPPORT_FLOOR {
            return d;
        }
    }
}

pub(crate) fn pair_with<R: Rng>(
    alphabet_size: usize,
    full_support: bool,
    rng: &mut R,
) -> Result<(Distribution, Distribution)> {
    if !(2..=8).contains(&alphabet_size) {
        return Err(Error::param(
            "alphabet_size",
            alphabet_size as f64,
            "must lie in [2, 8]",
        ));
    }
    let p = simplex_with(alphabet_size, full_support, rng);
    let q = simplex_with(alphabet_size, full_support, rng);
    Ok((p, q))
}

/// Two independent uniform draws from the simplex on `alphabet_size` points.
pub fn sample_distribution_pair(
    alphabet_size: usize,
    seed: u64,
    full_support: bool,
) -> Result<(Distribution, Distribution)> {
    pair_with(
        alphabet_size,
        full_support,
        &mut ChaCha8Rng::seed_from_u64(seed),
    )
}

/// Input and output hockey-stick divergences of a pair sent through `channel`.
pub fn empirical_contraction(
    channel: &Channel,
    p: &Distribution,
    q: &Distribution,
    gamma: f64,
) -> Result<(f64, f64)> {
    let t_in = e_gamma(p, q, gamma)?;
    let t_out = e_gamma(&pushforward(channel, p)?, &pushforward(channel, q)?, gamma)?;
    Ok((t_in, t_out))
}
