//! Property suite: oracle identities, witness soundness against the exact
//! oracle, equality witnesses, and the polynomial factorization round trip.

use proptest::prelude::*;

use unibound::poly::poly_mul;
use unibound::*;

/// Exact binomial coefficient as f64 (fine for r <= 8).
fn binom(r: u32, k: u32) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c = c * (r - i) as f64 / (i + 1) as f64;
    }
    c
}

fn pmf_strategy() -> impl Strategy<Value = DiscretePmf> {
    let n = 2usize..=10;
    n.prop_flat_map(|n| {
        (
            -10.0f64..0.0,
            proptest::collection::vec(0.01f64..2.0, n - 1),
            proptest::collection::vec(0.001f64..1.0, n),
        )
    })
    .prop_map(|(start, gaps, weights)| {
        let mut points = vec![start];
        for g in gaps {
            points.push(points.last().unwrap() + g);
        }
        let total: f64 = weights.iter().sum();
        let probs = weights.iter().map(|w| w / total).collect();
        DiscretePmf::new(points, probs).expect("constructed pmf is valid")
    })
}

fn abs_central_moment(pmf: &DiscretePmf, r: u32) -> f64 {
    let mu = pmf.raw_moment(1);
    pmf.points()
        .iter()
        .zip(pmf.probs())
        .map(|(&x, &p)| p * (x - mu).abs().powi(r as i32))
        .sum()
}

proptest! {
    /// central(d, 2) = raw(d, 2) − raw(d, 1)² within 1e-12 relative.
    #[test]
    fn oracle_consistency_variance(pmf in pmf_strategy()) {
        let lhs = pmf.central_moment(2);
        let rhs = pmf.raw_moment(2) - pmf.raw_moment(1).powi(2);
        let scale = lhs.abs().max(rhs.abs()).max(pmf.raw_moment(2).abs());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale.max(1e-12));
    }

    /// central(d, r) = Σ_k C(r,k)(−μ)^{r−k} raw(d, k) within 1e-9 relative
    /// (relative to the binomial-term magnitude, which is the conditioning of
    /// the identity).
    #[test]
    fn binomial_identity(pmf in pmf_strategy(), r in 1u32..=8) {
        let mu = pmf.raw_moment(1);
        let mut sum = 0.0;
        let mut term_scale = 0.0f64;
        for k in 0..=r {
            let term = binom(r, k) * (-mu).powi((r - k) as i32) * pmf.raw_moment(k);
            sum += term;
            term_scale = term_scale.max(term.abs());
        }
        let lhs = pmf.central_moment(r);
        let scale = lhs.abs().max(term_scale).max(1e-9);
        prop_assert!((lhs - sum).abs() <= 1e-9 * scale, "lhs={lhs} sum={sum} scale={scale}");
    }

    /// Raw moments of a shifted distribution expand by the binomial theorem;
    /// central moments are shift-invariant.
    #[test]
    fn shift_covariance(pmf in pmf_strategy(), c in -50.0f64..50.0, r in 1u32..=8) {
        let shifted = pmf.shifted(c).expect("shift keeps the support ordered");

        let mut expected = 0.0;
        let mut term_scale = 0.0f64;
        for k in 0..=r {
            let term = binom(r, k) * c.powi((r - k) as i32) * pmf.raw_moment(k);
            expected += term;
            term_scale = term_scale.max(term.abs());
        }
        let raw_shifted = shifted.raw_moment(r);
        let scale = raw_shifted.abs().max(term_scale).max(1e-9);
        prop_assert!((raw_shifted - expected).abs() <= 1e-9 * scale);

        let (a, b) = (pmf.central_moment(r), shifted.central_moment(r));
        let central_scale = abs_central_moment(&pmf, r).max(1e-9);
        prop_assert!((a - b).abs() <= 1e-9 * central_scale, "a={a} b={b} scale={central_scale}");
    }

    /// Generated distributions always classify as unimodal or monotone.
    #[test]
    fn generators_never_produce_not_unimodal(seed in any::<u64>(), n in 2usize..=12, lattice in any::<bool>()) {
        let pmf = gen_discrete_unimodal(seed, n, lattice);
        prop_assert!(Distribution::from(pmf).shape().is_unimodal_family());
    }

    /// Witness soundness, non-increasing densities: the raw-moment bounds
    /// hold for every order in regime.
    #[test]
    fn witness_soundness_non_increasing(
        seed in any::<u64>(),
        pieces in 1usize..=32,
        a in -5.0f64..5.0,
        width in 0.5f64..8.0,
    ) {
        let d = gen_density_monotone(seed, pieces, a, a + width, Monotonicity::NonIncreasing);
        let dist = Distribution::from(d);
        prop_assert_eq!(dist.shape(), ShapeClass::NonIncreasing);
        let mean = dist.mean();
        let tol = Tolerance::default();

        let var_bound = variance_lb_monotone(a, a + width, mean, Monotonicity::NonIncreasing)
            .expect("mean of a non-increasing density is in range");
        prop_assert!(tol.lower_holds(dist.variance(), var_bound.value));

        for r in 2u32..=6 {
            if r % 2 == 1 && a < 0.0 {
                continue;
            }
            let bound = raw_moment_lb_monotone(a, mean, r).expect("regime checked").value;
            prop_assert!(
                tol.lower_holds(dist.raw_moment(r), bound),
                "r={} raw={} bound={}", r, dist.raw_moment(r), bound
            );
        }
    }

    /// Witness soundness, unimodal densities: variance, even-central, and
    /// raw bounds hold at every admissible plateau mode; Jacobson caps the
    /// variance.
    #[test]
    fn witness_soundness_unimodal(
        seed in any::<u64>(),
        pieces in 1usize..=32,
        a in -5.0f64..5.0,
        width in 0.5f64..8.0,
    ) {
        let b = a + width;
        let d = gen_density_unimodal(seed, pieces, a, b);
        let dist = Distribution::from(d);
        let (m_lo, m_hi) = dist.mode_plateau().expect("generated density is unimodal");
        let mean = dist.mean();
        let var = dist.variance();
        let tol = Tolerance::default();

        for m in [m_lo, m_hi] {
            prop_assert!(tol.lower_holds(var, variance_lb_unimodal(mean, m).value));
            for r in 1u32..=3 {
                let bound = central_even_lb_unimodal(mean, m, r).value;
                prop_assert!(tol.lower_holds(dist.central_moment(2 * r), bound));
            }
            for r in 2u32..=6 {
                // Odd orders need the support, the mode, and the reflected
                // witness point all nonnegative.
                if r % 2 == 1 && (a < 0.0 || m < 0.0 || 2.0 * mean - m < 0.0) {
                    continue;
                }
                let bound = raw_moment_lb_unimodal(m, mean, r).expect("regime checked").value;
                prop_assert!(
                    tol.lower_holds(dist.raw_moment(r), bound),
                    "r={} m={} raw={} bound={}", r, m, dist.raw_moment(r), bound
                );
            }
        }

        let upper = variance_ub_jacobson(a, b).unwrap().value;
        prop_assert!(tol.upper_holds(var, upper), "var={var} upper={upper}");
    }

    /// Discrete soundness: the window bound holds for r = 1..3 and the
    /// lattice bound holds at the plateau member maximizing it.
    #[test]
    fn discrete_soundness(seed in any::<u64>(), n in 2usize..=12, lattice in any::<bool>()) {
        let pmf = gen_discrete_unimodal(seed, n, lattice);
        let dist = Distribution::from(pmf.clone());
        let mean = dist.mean();
        let tol = Tolerance::default();

        let (x_lo, x_hi) = pmf.window_around(mean).expect("n >= 2");
        for r in 1u32..=3 {
            let bound = discrete_central_lb(x_lo, x_hi, mean, r).expect("window straddles mean");
            prop_assert!(tol.lower_holds(dist.central_moment(2 * r), bound.value));
        }

        if pmf.is_unit_lattice() {
            let (m_lo, m_hi) = dist.mode_plateau().expect("generated pmf is unimodal");
            let m = best_plateau_mode(m_lo, m_hi, mean);
            prop_assert!(tol.lower_holds(dist.variance(), lattice_variance_lb(mean, m).value));
        }
    }

    /// The uniform density on [M, 2μ−M] attains the unimodal bounds with
    /// equality (relative margin <= 1e-12).
    #[test]
    fn equality_witness(mode in -10.0f64..10.0, delta in 0.1f64..10.0, flip in any::<bool>()) {
        let mean = if flip { mode + delta } else { mode - delta };
        let w = tightness_witness(mode, mean).unwrap();
        let dist = Distribution::from(w);
        let mu = dist.mean();

        let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(y.abs());
        prop_assert!(close(dist.variance(), variance_lb_unimodal(mu, mode).value));
        for r in 2u32..=5 {
            if r % 2 == 1 && (mode < 0.0 || 2.0 * mu - mode < 0.0) {
                continue;
            }
            let bound = raw_moment_lb_unimodal(mode, mu, r).unwrap().value;
            prop_assert!(close(dist.raw_moment(r), bound));
        }
        for r in 1u32..=3 {
            let bound = central_even_lb_unimodal(mu, mode, r).value;
            prop_assert!(close(dist.central_moment(2 * r), bound));
        }
    }

    /// The bisection-solved witness reproduces the closed-form raw bound.
    #[test]
    fn constraint_consistency(a in 0.0f64..3.0, gap in 0.05f64..4.0, r in 2u32..=6) {
        let mean = a + gap;
        let beta = 2.0 * mean - a;
        let alpha = solve_witness_constraint(a, beta, r).unwrap();
        let via_witness = two_point_raw_lb(alpha, beta, mean, r).unwrap();
        let closed = raw_moment_lb_monotone(a, mean, r).unwrap().value;
        prop_assert!(
            (via_witness - closed).abs() <= 1e-10 * via_witness.abs().max(closed.abs()).max(1.0),
            "witness route {via_witness} vs closed form {closed}"
        );
    }

    /// The shape-aware witness strictly dominates the tangent bound at the
    /// mean: (μ − a)²/3 of slack over μ_2' >= μ².
    #[test]
    fn monotone_bound_dominance(a in -5.0f64..5.0, gap in 1e-3f64..5.0) {
        let mean = a + gap;
        let w = witness_monotone(a, mean);
        prop_assert!(a <= w.alpha && w.alpha <= w.beta);
        let shaped = two_point_raw_lb(w.alpha, w.beta, mean, 2).unwrap();
        let classical = tangent_raw_lb(mean, mean, 2);
        prop_assert!(shaped > classical);
        let gain = shaped - classical;
        let expected = gap * gap / 3.0;
        prop_assert!((gain - expected).abs() <= 1e-9 * expected.max(1.0));
    }

    /// Full-precision JSON serialization round-trips any valid distribution
    /// to an identical value.
    #[test]
    fn json_round_trip(seed in any::<u64>(), n in 2usize..=12, lattice in any::<bool>(), pieces in 1usize..=16) {
        let pmf = gen_discrete_unimodal(seed, n, lattice);
        let dist = Distribution::from(pmf);
        let text = unibound::report::to_json_string(&dist);
        prop_assert_eq!(&parse_distribution(&text).unwrap(), &dist);

        let density = gen_density_unimodal(seed, pieces, -3.0, 4.0);
        let dist = Distribution::from(density);
        let text = unibound::report::to_json_string(&dist);
        prop_assert_eq!(&parse_distribution(&text).unwrap(), &dist);
    }

    /// Lemma factorization round trip: (x − α)(x − β)·g reproduces f.
    #[test]
    fn factorization_round_trip(alpha in 0.0f64..10.0, spread in 1e-3f64..10.0, r in 2u32..=8) {
        let beta = alpha + spread;
        let p = build_moment_polynomial(alpha, beta, r).unwrap();
        let quad = poly_mul(&[-alpha, 1.0], &[-beta, 1.0]);
        let recomposed = poly_mul(&quad, &p.coeffs_g);
        let scale = p.coeffs_f.iter().fold(1.0f64, |m, c| m.max(c.abs()));
        prop_assert_eq!(recomposed.len(), p.coeffs_f.len());
        for (got, want) in recomposed.iter().zip(&p.coeffs_f) {
            prop_assert!((got - want).abs() <= 1e-9 * scale);
        }
    }
}
