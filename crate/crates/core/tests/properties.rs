//! Property tests for the algebraic invariants.

use std::sync::OnceLock;

use collar::catalog;
use collar::condition::{estimate_inf_rho, random_pair, rho, SearchOptions, SparseElement, Verdict};
use collar::curvature::{check_lemma_bound, random_element, PhiMap};
use collar::linalg::{random_skew, wedge_norm, MatrixElement, DEFAULT_TOL};
use collar::optimize::{restart_rng, Execution};
use collar::triple::{decompose, Decomposition};
use proptest::prelude::*;

fn g2_dec() -> &'static Decomposition {
    static D: OnceLock<Decomposition> = OnceLock::new();
    D.get_or_init(|| decompose(&catalog::build("g2-so0-7-in-so8", Some(0)).unwrap(), DEFAULT_TOL).unwrap())
}

fn sp_dec() -> &'static Decomposition {
    static D: OnceLock<Decomposition> = OnceLock::new();
    D.get_or_init(|| decompose(&catalog::build("sp-series", Some(1)).unwrap(), DEFAULT_TOL).unwrap())
}

fn skew(n: usize, seed: u64) -> MatrixElement {
    random_skew(n, &mut restart_rng(seed, 0))
}

fn rho_inf(v: &Verdict) -> f64 {
    match v {
        Verdict::NumericalEstimate(e) => e.rho_inf,
        other => panic!("unexpected {}", other.kind()),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sparse_round_trip(n in 2usize..9, seed in any::<u64>()) {
        let x = skew(n, seed);
        let back = SparseElement::from_element(&x).to_element().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn bracket_is_skew_and_satisfies_jacobi(n in 2usize..8, seed in any::<u64>()) {
        let (x, y, z) = (skew(n, seed), skew(n, seed ^ 1), skew(n, seed ^ 2));
        let anti = x.bracket(&y) + y.bracket(&x);
        prop_assert!(anti.norm() < 1e-12);
        let jac = x.bracket(&y.bracket(&z)) + y.bracket(&z.bracket(&x)) + z.bracket(&x.bracket(&y));
        prop_assert!(jac.norm() < 1e-10 * (1.0 + x.norm() * y.norm() * z.norm()));
        prop_assert!(x.bracket(&y).skew_defect() < 1e-14);
    }

    #[test]
    fn inner_product_is_invariant(n in 2usize..8, seed in any::<u64>()) {
        let (x, y, z) = (skew(n, seed), skew(n, seed ^ 1), skew(n, seed ^ 2));
        let lhs = x.bracket(&y).q(&z);
        let rhs = x.q(&y.bracket(&z));
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn wedge_is_bounded_by_norms(n in 2usize..8, seed in any::<u64>()) {
        let (x, y) = (skew(n, seed), skew(n, seed ^ 3));
        let w = wedge_norm(&x, &y).unwrap();
        prop_assert!(w >= 0.0);
        prop_assert!(w <= x.norm() * y.norm() * (1.0 + 1e-12));
        prop_assert!((w - wedge_norm(&y, &x).unwrap()).abs() < 1e-12 * (1.0 + w));
    }

    #[test]
    fn rho_is_homogeneous(seed in any::<u64>(), a in 0.1f64..10.0, b in -10.0f64..-0.1) {
        let d = g2_dec();
        let (x, y) = random_pair(d, &mut restart_rng(seed, 0));
        let r0 = rho(d, &x, &y, false).unwrap();
        let r1 = rho(d, &x.scaled(a), &y.scaled(b), false).unwrap();
        prop_assert!((r0 - r1).abs() <= 1e-10 * r0.max(1.0));
    }

    #[test]
    fn rho_ignores_shears(seed in any::<u64>(), t in -5.0f64..5.0) {
        let d = g2_dec();
        let (x, y) = random_pair(d, &mut restart_rng(seed, 1));
        let mut xs = x.clone();
        xs.axpy(t, &y);
        let r0 = rho(d, &x, &y, false).unwrap();
        let r1 = rho(d, &xs, &y, false).unwrap();
        prop_assert!((r0 - r1).abs() <= 1e-9 * r0.max(1.0));
    }

    #[test]
    fn lemma_bound_holds(seed in any::<u64>(), h in -0.99f64..0.99) {
        let d = sp_dec();
        let phi = PhiMap::new(d, h).unwrap();
        let mut rng = restart_rng(seed, 2);
        let (x, y) = (random_element(&phi, &mut rng), random_element(&phi, &mut rng));
        let c = check_lemma_bound(&phi, &x, &y).unwrap();
        prop_assert!(c.holds, "{:?}", c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn more_restarts_never_raise_the_estimate(seed in 0u64..1000, r in 1usize..5, extra in 1usize..5) {
        let d = sp_dec();
        let base = SearchOptions { restarts: r, iters: 100, seed, exec: Execution::Sequential };
        let more = SearchOptions { restarts: r + extra, ..base };
        let a = rho_inf(&estimate_inf_rho(d, &base).unwrap().0);
        let b = rho_inf(&estimate_inf_rho(d, &more).unwrap().0);
        prop_assert!(b <= a, "{} > {}", b, a);
    }

    #[test]
    fn execution_mode_does_not_change_results(seed in 0u64..1000) {
        let d = sp_dec();
        let seq = SearchOptions { restarts: 6, iters: 100, seed, exec: Execution::Sequential };
        let par = SearchOptions { exec: Execution::Parallel, ..seq };
        prop_assert_eq!(estimate_inf_rho(d, &seq).unwrap(), estimate_inf_rho(d, &par).unwrap());
    }
}
