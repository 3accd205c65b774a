//! Cross-route consistency on the unit disk with k = -1, l = 1.

use dynbc::datum::{project_datum, NamedDatum};
use dynbc::geometry::{DomainSpec, Point};
use dynbc::montecarlo::{estimate_solution, estimate_w, MCConfig};
use dynbc::spectral::{evaluate_solution, BoundaryParams};
use dynbc::symbols::{BernsteinSymbol, TimeModel};
use proptest::prelude::*;

fn cos1(a: f64) -> NamedDatum<f64> {
    NamedDatum::Fourier { constant: 0.0, cos: vec![(1, a)], sin: vec![] }
}

fn setup(lambda: f64) -> (DomainSpec<f64>, BoundaryParams<f64>) {
    (DomainSpec::disk(1.0).unwrap(), BoundaryParams::new(-1.0, 1.0, lambda).unwrap())
}

fn half() -> TimeModel<f64> {
    TimeModel::caputo(0.5).unwrap()
}

#[test]
fn unsubordinated_estimator_matches_exponential_decay() {
    let x = Point::planar(0.5, 0.0);
    let cfg = MCConfig::new(200_000, 7, 2, half()).unwrap();
    for (lambda, want) in [(0.0, 0.5 * (-2.0f64).exp()), (0.5, (-0.5f64).exp() * 0.5 * (-2.0f64).exp())] {
        let (dom, bp) = setup(lambda);
        let e = estimate_w(&dom, &bp, &cos1(1.0), 1.0, &x, &cfg).unwrap();
        assert!((e.mean - want).abs() < 4.0 * e.stderr, "lambda={lambda}: {} +/- {} vs {want}", e.mean, e.stderr);
    }
}

#[test]
fn stable_symbol_and_caputo_model_agree_on_the_spectral_route() {
    let (dom, bp) = setup(0.3);
    let datum = NamedDatum::Fourier { constant: 0.2, cos: vec![(1, 1.0), (2, -0.5)], sin: vec![(3, 0.25)] };
    let field = project_datum(&dom, &datum, 8).unwrap();
    let sym = TimeModel::Symbol(BernsteinSymbol::stable(0.5).unwrap());
    for &t in &[0.25, 1.0, 3.0] {
        for x in [Point::planar(0.0, 0.0), Point::planar(0.3, -0.4), Point::planar(0.0, 1.0)] {
            let a = evaluate_solution(&field, &bp, &half(), t, &x).unwrap();
            let b = evaluate_solution(&field, &bp, &sym, t, &x).unwrap();
            assert!((a - b).abs() < 1e-8, "t={t}: {a} vs {b}");
        }
    }
}

#[test]
fn estimator_matches_spectral_at_opposite_points() {
    let (dom, bp) = setup(0.0);
    let cfg = MCConfig::new(50_000, 11, 1, half()).unwrap();
    let field = project_datum(&dom, &cos1(1.0), 4).unwrap();
    for x in [Point::planar(0.5, 0.0), Point::planar(-0.5, 0.0)] {
        let e = estimate_solution(&dom, &bp, &cos1(1.0), 1.0, &x, &cfg).unwrap();
        let u = evaluate_solution(&field, &bp, &half(), 1.0, &x).unwrap();
        assert!((e.mean - u).abs() < 4.0 * e.stderr, "x={x:?}: {} vs {u}", e.mean);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn estimator_is_linear_in_the_datum(seed in 0u64..1000, c in -3.0f64..3.0, shards in 1usize..6) {
        let (dom, bp) = setup(0.2);
        let x = Point::planar(0.1, 0.6);
        let cfg = MCConfig::new(3000, seed, shards, half()).unwrap();
        let base = estimate_solution(&dom, &bp, &cos1(1.0), 0.7, &x, &cfg).unwrap();
        let scaled = estimate_solution(&dom, &bp, &cos1(c), 0.7, &x, &cfg).unwrap();
        prop_assert!((scaled.mean - c * base.mean).abs() <= 1e-12 * (1.0 + base.mean.abs()));
    }

    #[test]
    fn shard_count_never_changes_the_estimate(seed in 0u64..1000, n in 1u64..5000, shards in 1usize..9) {
        let (dom, bp) = setup(0.0);
        let x = Point::planar(-0.2, 0.3);
        let one = MCConfig::new(n, seed, 1, half()).unwrap();
        let many = one.with_shards(shards).unwrap();
        let a = estimate_solution(&dom, &bp, &cos1(1.0), 0.5, &x, &one).unwrap();
        let b = estimate_solution(&dom, &bp, &cos1(1.0), 0.5, &x, &many).unwrap();
        prop_assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        prop_assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }

    #[test]
    fn spectral_solution_obeys_the_maximum_principle(
        a0 in -1.0f64..1.0, a1 in -1.0f64..1.0, b2 in -1.0f64..1.0,
        t in 0.0f64..5.0, r in 0.0f64..1.0, phi in 0.0f64..6.28,
    ) {
        let (dom, bp) = setup(0.0);
        let datum = NamedDatum::Fourier { constant: a0, cos: vec![(1, a1)], sin: vec![(2, b2)] };
        let field = project_datum(&dom, &datum, 4).unwrap();
        let x = Point::planar(r * phi.cos(), r * phi.sin());
        let u = evaluate_solution(&field, &bp, &half(), t, &x).unwrap();
        prop_assert!(u.abs() <= a0.abs() + a1.abs() + b2.abs() + 1e-12);
    }
}
