use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sampled series `(x, y)` with the parameters that produced it.
///
/// Abscissae are strictly increasing and ordinates finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve {
    label: String,
    params: BTreeMap<String, f64>,
    points: Vec<(f64, f64)>,
}

impl BoundCurve {
    pub fn new(label: &str, params: &[(&str, f64)], points: Vec<(f64, f64)>) -> Result<Self> {
        for (i, w) in points.windows(2).enumerate() {
            // Written negated so that NaN abscissae are rejected too.
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(w[1].0 > w[0].0) {
                return Err(Error::CurveNotIncreasing(i + 1));
            }
        }
        if let Some(i) = points
            .iter()
            .position(|p| !p.1.is_finite() || !p.0.is_finite())
        {
            return Err(Error::CurveNotFinite(i));
        }
        Ok(BoundCurve {
            label: label.to_owned(),
            params: params.iter().map(|(k, v)| ((*k).to_owned(), *v)).collect(),
            points,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn ys(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }
}

/// `n` evenly spaced points on `[lo, hi]`, endpoints included exactly.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * (i as f64 / (n - 1) as f64)
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enforces_invariants() {
        assert!(BoundCurve::new("c", &[], vec![(0.0, 1.0), (1.0, 2.0)]).is_ok());
        assert_eq!(
            BoundCurve::new("c", &[], vec![(0.0, 1.0), (0.0, 2.0)]),
            Err(Error::CurveNotIncreasing(1))
        );
        assert_eq!(
            BoundCurve::new("c", &[], vec![(0.0, 1.0), (1.0, f64::INFINITY)]),
            Err(Error::CurveNotFinite(1))
        );
    }

    #[test]
    fn linspace_endpoints() {
        let g = linspace(0.0, 1.0, 11);
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[3], 0.3);
        assert_eq!(g[10], 1.0);
        assert_eq!(linspace(0.2, 0.9, 1), vec![0.2]);
    }
}
