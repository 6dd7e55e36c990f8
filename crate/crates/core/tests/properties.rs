use approx::assert_relative_eq;
use proptest::prelude::*;

use ldp_contraction::divergence::{
    contraction_coefficient_hs, d_max, d_max_smooth, e_gamma, kl, total_variation,
};
use ldp_contraction::ldp::{is_ldp, make_bsc, sample_ldp_channel, tightest_delta};
use ldp_contraction::sdpi::{composition_bound, linear_sdpi_coeff, nonlinear_sdpi_bound};
use ldp_contraction::{pushforward, CompositionParams, Distribution, PrivacyBudget, SdpiParams};

fn distribution(n: usize) -> impl Strategy<Value = Distribution> {
    prop::collection::vec(0.01f64..1.0, n).prop_map(|w| Distribution::from_weights(&w).unwrap())
}

fn pair() -> impl Strategy<Value = (Distribution, Distribution)> {
    (2usize..=6).prop_flat_map(|n| (distribution(n), distribution(n)))
}

fn budget() -> impl Strategy<Value = PrivacyBudget> {
    (0.05f64..3.0, 0.0f64..0.3).prop_map(|(e, d)| PrivacyBudget::new(e, d).unwrap())
}

proptest! {
    #[test]
    fn e_gamma_is_convex_and_nonincreasing((p, q) in pair(), a in 1.0f64..5.0, w in 0.0f64..1.0) {
        let b = a + 1.0;
        let mid = w * a + (1.0 - w) * b;
        let (ea, eb, em) = (e_gamma(&p, &q, a)?, e_gamma(&p, &q, b)?, e_gamma(&p, &q, mid)?);
        prop_assert!(eb <= ea + 1e-15);
        prop_assert!(em <= w * ea + (1.0 - w) * eb + 1e-12);
    }

    #[test]
    fn e_gamma_at_one_is_total_variation((p, q) in pair()) {
        assert_relative_eq!(e_gamma(&p, &q, 1.0)?, total_variation(&p, &q)?, epsilon = 1e-15);
    }

    #[test]
    fn e_gamma_duality((p, q) in pair(), g in 1.0f64..6.0) {
        // E_{1/g}(q || p) = (E_g(p || q) + g - 1) / g
        let lhs = e_gamma(&q, &p, 1.0 / g)?;
        let rhs = (e_gamma(&p, &q, g)? + g - 1.0) / g;
        assert_relative_eq!(lhs, rhs, epsilon = 1e-12);
    }

    #[test]
    fn smooth_dmax_is_below_dmax((p, q) in pair(), delta in 0.0f64..1.0) {
        prop_assert!(d_max_smooth(&p, &q, delta)? <= d_max(&p, &q)? + 1e-12);
        assert_relative_eq!(d_max_smooth(&p, &q, 0.0)?, d_max(&p, &q)?, epsilon = 1e-12);
    }

    #[test]
    fn smooth_dmax_matches_e_gamma((p, q) in pair(), delta in 0.001f64..0.5) {
        let s = d_max_smooth(&p, &q, delta)?;
        if s.is_finite() && s > 0.0 {
            prop_assert!(e_gamma(&p, &q, s.exp())? <= delta + 1e-12);
            prop_assert!(e_gamma(&p, &q, (s - 1e-6).exp())? > delta - 1e-12);
        }
    }

    #[test]
    fn channels_do_not_increase_divergence(b in budget(), seed in any::<u64>(), (p, q) in (2usize..=5).prop_flat_map(|n| (distribution(n), distribution(n))), m in 2usize..=5, g in 1.0f64..4.0) {
        let n = p.alphabet_size();
        let c = sample_ldp_channel(b, n, m, seed)?;
        let (ap, aq) = (pushforward(&c, &p)?, pushforward(&c, &q)?);
        prop_assert!(e_gamma(&ap, &aq, g)? <= e_gamma(&p, &q, g)? + 1e-12);
        prop_assert!(kl(&ap, &aq)? <= kl(&p, &q)? + 1e-12);
    }

    #[test]
    fn ldp_is_monotone_in_delta(b in budget(), seed in any::<u64>()) {
        let c = sample_ldp_channel(b, 3, 4, seed)?;
        let d = tightest_delta(&c, b.epsilon())?;
        prop_assert!(d <= b.delta() + 1e-12);
        prop_assert!(is_ldp(&c, PrivacyBudget::new(b.epsilon(), d)?));
        prop_assert!(is_ldp(&c, PrivacyBudget::new(b.epsilon() + 0.5, b.delta())?));
    }

    #[test]
    fn bsc_is_tight(b in budget()) {
        let c = make_bsc(b);
        assert_relative_eq!(tightest_delta(&c, b.epsilon())?, b.delta(), epsilon = 1e-12);
    }

    #[test]
    fn nonlinear_bound_is_below_linear(b in budget(), gp in 1.0f64..4.0, t in 0.0f64..1.0) {
        let s = SdpiParams::new(b, gp)?;
        let nl = nonlinear_sdpi_bound(&s, t)?;
        prop_assert!(nl >= 0.0);
        prop_assert!(nl <= linear_sdpi_coeff(&s) * t + 1e-12);
    }

    #[test]
    fn composition_is_monotone(
        e in 0.5f64..3.0,
        d in 0.001f64..0.3,
        frac in 0.05f64..0.95,
        t1 in 0.0f64..1.0,
        t2 in 0.0f64..1.0,
        n in 1u32..20,
    ) {
        let b = PrivacyBudget::new(e, d)?;
        let gp = 1.0 + frac * (e.exp() - 1.0);
        let c = CompositionParams::new(b, gp, n)?;
        let next = c.with_n(n + 1)?;
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        prop_assert!(composition_bound(&next, hi)? <= composition_bound(&c, hi)? + 1e-15);
        prop_assert!(composition_bound(&c, lo)? <= composition_bound(&c, hi)? + 1e-15);
    }
}

#[test]
fn contraction_coefficient_dominates_random_pairs() {
    use rand::{Rng, SeedableRng};
    let b = PrivacyBudget::new(1.0, 0.05).unwrap();
    let c = sample_ldp_channel(b, 4, 3, 99).unwrap();
    let eta = contraction_coefficient_hs(&c, 2.0).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let mut best = 0.0f64;
    for _ in 0..10_000 {
        let w = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
            (0..4).map(|_| rng.random::<f64>().powi(4)).collect()
        };
        let p = Distribution::from_weights(&w(&mut rng)).unwrap();
        let q = Distribution::from_weights(&w(&mut rng)).unwrap();
        let before = e_gamma(&p, &q, 2.0).unwrap();
        if before > 1e-3 {
            let after = e_gamma(
                &pushforward(&c, &p).unwrap(),
                &pushforward(&c, &q).unwrap(),
                2.0,
            )
            .unwrap();
            best = best.max(after / before);
        }
    }
    assert!(best <= eta + 1e-12);

    // The supremum is attained at a pair of point masses.
    let mut vertex = 0.0f64;
    for x in 0..4 {
        for y in 0..4 {
            let (p, q) = (
                Distribution::point_mass(4, x).unwrap(),
                Distribution::point_mass(4, y).unwrap(),
            );
            let after = e_gamma(
                &pushforward(&c, &p).unwrap(),
                &pushforward(&c, &q).unwrap(),
                2.0,
            )
            .unwrap();
            vertex = vertex.max(after);
        }
    }
    assert_eq!(vertex, eta);
}
