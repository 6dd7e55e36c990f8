//! Exact divergences between distributions on a finite alphabet.
//!
//! All logarithms are natural. The hockey-stick divergence is the
//! positive-part sum `E_g(P || Q) = sum_x max(0, P(x) - g Q(x))`, which for
//! `g = 1` is the total variation distance.

use crate::distribution::{Channel, Distribution};
use crate::error::{Error, Result};
use crate::generator::FDivGenerator;
use crate::quadrature;

/// Absolute tolerance of every quadrature segment in
/// [`f_divergence_integral`].
pub const QUADRATURE_TOL: f64 = 1e-9;

/// Hockey-stick divergence `E_gamma(p || q)`.
///
/// `gamma` may lie in `(0, 1)`; the smooth max-divergence search ranges over
/// all positive orders. Public bound APIs require `gamma >= 1` themselves.
pub fn e_gamma(p: &Distribution, q: &Distribution, gamma: f64) -> Result<f64> {
    p.ensure_same_alphabet(q)?;
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(Error::param("gamma", gamma, "must be positive"));
    }
    Ok(e_gamma_slices(p.probs(), q.probs(), gamma))
}

pub(crate) fn e_gamma_slices(p: &[f64], q: &[f64], gamma: f64) -> f64 {
    p.iter()
        .zip(q)
        .map(|(&px, &qx)| {
            if qx == 0.0 {
                px
            } else {
                (px - gamma * qx).max(0.0)
            }
        })
        .sum()
}

/// Total variation distance, `E_1(p || q)`.
pub fn total_variation(p: &Distribution, q: &Distribution) -> Result<f64> {
    e_gamma(p, q, 1.0)
}

/// Max-divergence `max_{p(x) > 0} ln(p(x) / q(x))`; infinite when `q` misses
/// part of the support of `p`.
pub fn d_max(p: &Distribution, q: &Distribution) -> Result<f64> {
    p.ensure_same_alphabet(q)?;
    Ok(d_max_slices(p.probs(), q.probs()))
}

fn d_max_slices(p: &[f64], q: &[f64]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for (&px, &qx) in p.iter().zip(q) {
        if px == 0.0 {
            continue;
        }
        if qx == 0.0 {
            return f64::INFINITY;
        }
        best = best.max((px / qx).ln());
    }
    best
}

/// Smooth max-divergence via its hockey-stick dual,
/// `ln inf { l >= 0 : E_l(p || q) <= delta }`.
///
/// `l -> E_l` is piecewise linear and non-increasing with breakpoints at the
/// likelihood ratios `p(x) / q(x)`, so the infimum is found exactly by
/// walking the breakpoints from the largest down. The result is negative
/// when the infimum is below one and `-inf` when it is zero (`delta >= 1`).
pub fn d_max_smooth(p: &Distribution, q: &Distribution, delta: f64) -> Result<f64> {
    p.ensure_same_alphabet(q)?;
    check_delta(delta)?;
    Ok(d_max_smooth_slices(p.probs(), q.probs(), delta))
}

pub(crate) fn d_max_smooth_slices(p: &[f64], q: &[f64], delta: f64) -> f64 {
    smallest_order_below(p, q, delta).map_or(f64::INFINITY, f64::ln)
}

/// Smallest `l >= 0` with `E_l(p || q) <= delta`, or `None` when no finite
/// order achieves it.
fn smallest_order_below(p: &[f64], q: &[f64], delta: f64) -> Option<f64> {
    // Mass of p where q vanishes is never cancelled by any finite order.
    let mut stranded = 0.0;
    let mut ratios: Vec<(f64, f64, f64)> = Vec::with_capacity(p.len());
    for (&px, &qx) in p.iter().zip(q) {
        if px == 0.0 {
            continue;
        }
        if qx == 0.0 {
            stranded += px;
        } else {
            ratios.push((px / qx, px, qx));
        }
    }
    if stranded > delta {
        return None;
    }
    ratios.sort_by(|a, b| b.0.total_cmp(&a.0));

    // On [next, current] the active points are exactly the first k ratios and
    // E_l = stranded + p_active - l * q_active.
    let mut p_active = 0.0;
    let mut q_active = 0.0;
    let mut current = ratios.first().map_or(0.0, |r| r.0);
    for (k, &(ratio, px, qx)) in ratios.iter().enumerate() {
        debug_assert!(ratio <= current);
        p_active += px;
        q_active += qx;
        let next = ratios.get(k + 1).map_or(0.0, |r| r.0);
        let value_at_next = stranded + p_active - next * q_active;
        if value_at_next > delta {
            let solved = (stranded + p_active - delta) / q_active;
            return Some(solved.clamp(next, ratio));
        }
        current = next;
    }
    Some(current)
}

/// Kullback-Leibler divergence in nats.
pub fn kl(p: &Distribution, q: &Distribution) -> Result<f64> {
    p.ensure_same_alphabet(q)?;
    let mut total = 0.0;
    for (&px, &qx) in p.probs().iter().zip(q.probs()) {
        if px == 0.0 {
            continue;
        }
        if qx == 0.0 {
            return Ok(f64::INFINITY);
        }
        total += px * (px / qx).ln();
    }
    Ok(total)
}

/// `sum_x q(x) f(p(x) / q(x))` with the generator's zero conventions.
pub fn f_divergence(p: &Distribution, q: &Distribution, f: &FDivGenerator) -> Result<f64> {
    p.ensure_same_alphabet(q)?;
    p.probs()
        .iter()
        .zip(q.probs())
        .enumerate()
        .try_fold(0.0, |acc, (i, (&px, &qx))| Ok(acc + f.term(i, px, qx)?))
}

/// The f-divergence through its hockey-stick integral representation
/// `int_1^inf f''(g) E_g(p || q) + g^-3 f''(1/g) E_g(q || p) dg`.
///
/// Requires `p` and `q` to share their support. The integrand vanishes past
/// `exp(max(D_max(p || q), D_max(q || p)))` and is smooth between
/// consecutive likelihood ratios, so each such segment is integrated
/// separately.
pub fn f_divergence_integral(p: &Distribution, q: &Distribution, f: &FDivGenerator) -> Result<f64> {
    p.ensure_same_alphabet(q)?;
    for (i, (&px, &qx)) in p.probs().iter().zip(q.probs()).enumerate() {
        if (px > 0.0) != (qx > 0.0) {
            return Err(Error::SupportMismatch(i));
        }
    }
    let (ps, qs) = (p.probs(), q.probs());

    let mut breaks = vec![1.0];
    for (&px, &qx) in ps.iter().zip(qs) {
        if px > 0.0 {
            let r = px / qx;
            breaks.push(if r >= 1.0 { r } else { 1.0 / r });
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let integrand = |g: f64| {
        let forward = e_gamma_slices(ps, qs, g);
        let backward = e_gamma_slices(qs, ps, g);
        let mut v = 0.0;
        if forward > 0.0 {
            v += f.eval_second_derivative(g) * forward;
        }
        if backward > 0.0 {
            v += f.eval_second_derivative(1.0 / g) * backward / (g * g * g);
        }
        v
    };

    Ok(breaks
        .windows(2)
        .map(|w| quadrature::integrate(integrand, w[0], w[1], QUADRATURE_TOL))
        .sum())
}

/// Hockey-stick contraction coefficient of a channel: the largest
/// `E_gamma` between two of its rows, over ordered pairs.
pub fn contraction_coefficient_hs(channel: &Channel, gamma: f64) -> Result<f64> {
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(Error::param("gamma", gamma, "must be positive"));
    }
    let rows = channel.rows();
    let mut best = 0.0f64;
    for (x, a) in rows.iter().enumerate() {
        for (x2, b) in rows.iter().enumerate() {
            if x != x2 {
                best = best.max(e_gamma_slices(a, b, gamma));
            }
        }
    }
    Ok(best)
}

/// Largest smooth max-divergence between two rows of `channel`.
pub(crate) fn max_pairwise_smooth(channel: &Channel, delta: f64) -> f64 {
    let rows = channel.rows();
    let mut best = f64::NEG_INFINITY;
    for (x, a) in rows.iter().enumerate() {
        for (x2, b) in rows.iter().enumerate() {
            if x != x2 {
                best = best.max(d_max_smooth_slices(a, b, delta));
            }
        }
    }
    best
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::param("delta", delta, "must lie in [0, 1]"));
    }
    Ok(())
}
