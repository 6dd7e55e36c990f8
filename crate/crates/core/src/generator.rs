//! Convex generators `f` of f-divergences.

use crate::error::{Error, Result};

/// A convex function `f` with `f(1) = 0` together with its second derivative.
///
/// `f` is evaluated on `[0, inf)`; at zero it must return the right limit
/// `f(0+)`, which is the value used for `q(x) * f(0)` when `p(x) = 0`.
/// `slope_at_infinity` is `lim f(x) / x`, the convention for
/// `0 * f(p / 0) = p * slope_at_infinity`; `None` means the divergence is
/// undefined when `q` misses a point that `p` charges.
#[derive(Debug, Clone, Copy)]
pub struct FDivGenerator {
    name: &'static str,
    f: fn(f64) -> f64,
    f2: fn(f64) -> f64,
    slope_at_infinity: Option<f64>,
}

impl FDivGenerator {
    pub fn new(
        name: &'static str,
        f: fn(f64) -> f64,
        f2: fn(f64) -> f64,
        slope_at_infinity: Option<f64>,
    ) -> Self {
        FDivGenerator {
            name,
            f,
            f2,
            slope_at_infinity,
        }
    }

    /// `f(x) = x ln x`, giving the KL divergence in nats.
    pub fn kl() -> Self {
        FDivGenerator::new(
            "kl",
            |x| if x == 0.0 { 0.0 } else { x * x.ln() },
            |x| 1.0 / x,
            Some(f64::INFINITY),
        )
    }

    /// `f(x) = (x - 1)^2`.
    pub fn chi_squared() -> Self {
        FDivGenerator::new(
            "chi2",
            |x| (x - 1.0) * (x - 1.0),
            |_| 2.0,
            Some(f64::INFINITY),
        )
    }

    /// `f(x) = |x - 1| / 2`. Not twice differentiable at 1, so it is not
    /// usable with the integral representation.
    pub fn total_variation() -> Self {
        FDivGenerator::new("tv", |x| 0.5 * (x - 1.0).abs(), |_| 0.0, Some(0.5))
    }

    /// `f(x) = (sqrt(x) - 1)^2`, the squared Hellinger distance (no 1/2 factor).
    pub fn squared_hellinger() -> Self {
        FDivGenerator::new(
            "hellinger2",
            |x| {
                let r = x.sqrt() - 1.0;
                r * r
            },
            |x| 0.5 * x.powf(-1.5),
            Some(1.0),
        )
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn eval_second_derivative(&self, x: f64) -> f64 {
        (self.f2)(x)
    }

    pub fn slope_at_infinity(&self) -> Option<f64> {
        self.slope_at_infinity
    }

    /// Contribution of one alphabet point with masses `p`, `q`.
    pub(crate) fn term(&self, index: usize, p: f64, q: f64) -> Result<f64> {
        if q > 0.0 {
            return Ok(q * self.eval(p / q));
        }
        if p == 0.0 {
            return Ok(0.0);
        }
        match self.slope_at_infinity {
            Some(s) if s.is_infinite() => Ok(s),
            Some(s) => Ok(p * s),
            None => Err(Error::UndefinedAtZero {
                generator: self.name,
                index,
            }),
        }
    }

    /// Checks `f(1) = 0` exactly and midpoint-chord convexity on a
    /// log-spaced grid over `[1e-3, 1e3]`.
    pub fn validate(&self) -> Result<()> {
        let at_one = self.eval(1.0);
        if at_one != 0.0 {
            return Err(Error::param("f(1)", at_one, "generator must vanish at 1"));
        }
        let grid: Vec<f64> = (0..=60)
            .map(|i| 10f64.powf(-3.0 + 0.1 * i as f64))
            .collect();
        for w in grid.windows(3) {
            let (x1, x2, x3) = (w[0], w[1], w[2]);
            let chord = self.eval(x1) + (self.eval(x3) - self.eval(x1)) * (x2 - x1) / (x3 - x1);
            if self.eval(x2) > chord + 1e-9 {
                return Err(Error::param("f", x2, "generator is not convex"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_generators_are_valid() {
        for g in [
            FDivGenerator::kl(),
            FDivGenerator::chi_squared(),
            FDivGenerator::total_variation(),
            FDivGenerator::squared_hellinger(),
        ] {
            g.validate().unwrap_or_else(|e| panic!("{}: {e}", g.name()));
        }
    }

    #[test]
    fn rejects_nonconvex_and_offset_generators() {
        let concave = FDivGenerator::new("concave", |x| -(x - 1.0) * (x - 1.0), |_| -2.0, None);
        assert!(concave.validate().is_err());
        let shifted = FDivGenerator::new("shifted", |x| x * x, |_| 2.0, None);
        assert!(shifted.validate().is_err());
    }

    #[test]
    fn second_derivatives_match_finite_differences() {
        for g in [
            FDivGenerator::kl(),
            FDivGenerator::chi_squared(),
            FDivGenerator::squared_hellinger(),
        ] {
            for &x in &[0.3, 1.7, 4.0] {
                let h = 1e-4;
                let fd = (g.eval(x + h) - 2.0 * g.eval(x) + g.eval(x - h)) / (h * h);
                assert!(
                    (fd - g.eval_second_derivative(x)).abs() < 1e-5,
                    "{} at {x}",
                    g.name()
                );
            }
        }
    }
}
