//! Probability vectors and row-stochastic channels on finite alphabets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the total mass of a probability vector.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// A probability vector on the alphabet `{0, .., n-1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Validates and wraps `probs`. Entries must be finite and non-negative
    /// and sum to one within [`NORMALIZATION_TOL`].
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_probability_vector(&probs)?;
        Ok(Distribution { probs })
    }

    /// Rescales a non-negative weight vector to unit mass.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Empty);
        }
        for (index, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidProbability { index, value: w });
            }
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::NotNormalized(total));
        }
        Distribution::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        Ok(Distribution {
            probs: vec![1.0 / n as f64; n],
        })
    }

    /// Point mass on `index`.
    pub fn point_mass(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::LengthMismatch(n, index + 1));
        }
        let mut probs = vec![0.0; n];
        probs[index] = 1.0;
        Ok(Distribution { probs })
    }

    /// Two-point distribution `(p, 1 - p)`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        Distribution::new(vec![p, 1.0 - p])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    /// Smallest entry; positive iff the distribution has full support.
    pub fn min_mass(&self) -> f64 {
        self.probs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn has_full_support(&self) -> bool {
        self.min_mass() > 0.0
    }

    pub(crate) fn ensure_same_alphabet(&self, other: &Distribution) -> Result<()> {
        if self.alphabet_size() != other.alphabet_size() {
            return Err(Error::LengthMismatch(
                self.alphabet_size(),
                other.alphabet_size(),
            ));
        }
        Ok(())
    }
}

impl<'de> Deserialize<'de> for Distribution {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        #[derive(Deserialize)]
        struct Raw {
            probs: Vec<f64>,
        }
        let raw = Raw::deserialize(deserializer)?;
        Distribution::new(raw.probs).map_err(serde::de::Error::custom)
    }
}

fn check_probability_vector(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::Empty);
    }
    for (index, &value) in probs.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidProbability { index, value });
        }
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized(total));
    }
    Ok(())
}

/// A row-stochastic matrix: row `x` is the output distribution of input `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Channel {
    rows: Vec<Vec<f64>>,
    out_size: usize,
}

impl Channel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let out_size = rows.first().map(Vec::len).ok_or(Error::Empty)?;
        for (row, r) in rows.iter().enumerate() {
            if r.len() != out_size {
                return Err(Error::RaggedChannel {
                    row,
                    expected: out_size,
                    found: r.len(),
                });
            }
            check_probability_vector(r).map_err(|e| Error::InvalidRow {
                row,
                source: Box::new(e),
            })?;
        }
        Ok(Channel { rows, out_size })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Channel::new(
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        )
    }

    /// Binary symmetric channel with crossover probability `flip`.
    pub fn binary_symmetric(flip: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&flip) {
            return Err(Error::param("flip", flip, "must lie in [0, 1]"));
        }
        Channel::new(vec![vec![1.0 - flip, flip], vec![flip, 1.0 - flip]])
    }

    /// Every input maps to the same output distribution.
    pub fn constant(in_size: usize, row: &Distribution) -> Result<Self> {
        if in_size == 0 {
            return Err(Error::Empty);
        }
        Channel::new(vec![row.probs().to_vec(); in_size])
    }

    pub fn in_size(&self) -> usize {
        self.rows.len()
    }

    pub fn out_size(&self) -> usize {
        self.out_size
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.rows[x]
    }

    /// Output distribution of input `x`.
    pub fn row_distribution(&self, x: usize) -> Distribution {
        Distribution {
            probs: self.rows[x].clone(),
        }
    }

    /// Smallest matrix entry, i.e. the input-independent choice of the
    /// output-mass floor.
    pub fn min_entry(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Runs `self` first and then `next`.
    pub fn then(&self, next: &Channel) -> Result<Channel> {
        if self.out_size != next.in_size() {
            return Err(Error::LengthMismatch(self.out_size, next.in_size()));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut out = vec![0.0; next.out_size];
                for (y, &w) in r.iter().enumerate() {
                    for (z, &v) in next.rows[y].iter().enumerate() {
                        out[z] += w * v;
                    }
                }
                out
            })
            .collect();
        Ok(Channel {
            rows,
            out_size: next.out_size,
        })
    }
}

impl<'de> Deserialize<'de> for Channel {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let rows = Vec::<Vec<f64>>::deserialize(deserializer)?;
        Channel::new(rows).map_err(serde::de::Error::custom)
    }
}

/// Output distribution of `channel` on input `p` (row vector times matrix).
pub fn pushforward(channel: &Channel, p: &Distribution) -> Result<Distribution> {
    if channel.in_size() != p.alphabet_size() {
        return Err(Error::LengthMismatch(channel.in_size(), p.alphabet_size()));
    }
    let mut out = vec![0.0; channel.out_size()];
    for (row, &px) in channel.rows.iter().zip(p.probs()) {
        if px == 0.0 {
            continue;
        }
        for (o, &w) in out.iter_mut().zip(row) {
            *o += px * w;
        }
    }
    Ok(Distribution { probs: out })
}
