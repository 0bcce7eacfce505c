use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hybridsim::xorlb::{
    budget_bound, entropy, grid_max_success, kkt_residual_at, kkt_residuals, kl, monte_carlo_rule, mutual_information,
    pinsker_check, success_prob, table1_rows, table1_scan, tv, DecisionRuleParams, Distribution, Posteriors,
};

fn random_posteriors(rng: &mut ChaCha8Rng) -> Posteriors {
    Posteriors::new(rng.gen_range(0.5..=1.0), rng.gen_range(0.5..=1.0)).unwrap()
}

fn random_params(rng: &mut ChaCha8Rng) -> DecisionRuleParams {
    DecisionRuleParams::new(rng.gen(), rng.gen(), rng.gen(), rng.gen()).unwrap()
}

#[test]
fn stationary_rows_have_zero_residual() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let rows = table1_rows();
    assert_eq!(rows.len(), 24);
    for _ in 0..100 {
        let post = random_posteriors(&mut rng);
        let mut feasible = 0;
        for row in &rows {
            if let Ok(report) = kkt_residuals(row, &post) {
                assert!(report.residual <= 1e-9, "row {} at {post:?}: {}", row.id, report.residual);
                feasible += 1;
            }
        }
        assert!(feasible >= 8, "{feasible} feasible rows at {post:?}");
    }
}

#[test]
fn listed_values_are_success_probabilities() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..100 {
        let post = random_posteriors(&mut rng);
        let scan = table1_scan(&post);
        for r in scan.rows.iter().filter(|r| r.feasible) {
            assert_eq!(r.claimed_is_success(), Some(true), "row {} at {post:?}", r.id);
        }
        assert!(scan.chain_holds(), "{:?}", scan.chain);
        assert!(scan.bound_holds(1e-9));
        // the optimum sits at a vertex of the cube, where one player decides alone
        assert!((scan.max_value - post.r_a.max(post.r_b)).abs() < 1e-12);
    }
}

#[test]
fn residual_detects_non_stationary_points() {
    let post = Posteriors::new(0.8, 0.6).unwrap();
    let d = DecisionRuleParams::new(0.5, 0.5, 0.5, 0.5).unwrap();
    assert!(kkt_residual_at(d, &post) > 1e-3);
}

#[test]
fn grid_search_agrees_with_the_row_maximum() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..5 {
        let post = random_posteriors(&mut rng);
        let grid = grid_max_success(&post, 0.01);
        let scan = table1_scan(&post);
        assert!((grid.value - scan.max_value).abs() < 1e-9, "{} vs {}", grid.value, scan.max_value);
        assert!((success_prob(&grid.argmax, &post) - grid.value).abs() < 1e-12);
    }
}

/// No rule beats the best stationary row anywhere in the cube.
#[test]
fn random_rules_stay_below_the_row_maximum() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..20 {
        let post = random_posteriors(&mut rng);
        let best = table1_scan(&post).max_value;
        for _ in 0..2000 {
            assert!(success_prob(&random_params(&mut rng), &post) <= best + 1e-12);
        }
    }
}

#[test]
fn simulation_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for k in 0..20 {
        let (d, post) = (random_params(&mut rng), random_posteriors(&mut rng));
        let est = monte_carlo_rule(&d, &post, 200_000, k);
        assert!(est.within(success_prob(&d, &post), 4.0), "{est:?} vs {}", success_prob(&d, &post));
    }
}

#[test]
fn budget_bound_is_monotone() {
    for n in [1u64, 10, 100, 1000, 10_000] {
        let mut last = u64::MAX;
        for e in 0..=30 {
            let b = budget_bound(n, e as f64 / 100.0).unwrap();
            assert!(b <= last);
            last = b;
        }
        assert!(budget_bound(n * 10, 0.1).unwrap() >= budget_bound(n, 0.1).unwrap());
    }
}

fn distribution(weights: Vec<f64>) -> Distribution {
    Distribution::from_weights(&weights).unwrap()
}

fn weights(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, len)
}

fn short_weights() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, 1..6)
}

proptest! {
    #[test]
    fn pinsker_and_divergence_basics((a, b) in (2usize..7).prop_flat_map(|k| (weights(k), weights(k)))) {
        let (mu, nu) = (distribution(a), distribution(b));
        prop_assert!(pinsker_check(&mu, &nu).unwrap());
        prop_assert!(kl(&mu, &nu).unwrap() >= 0.0);
        prop_assert!(kl(&mu, &mu).unwrap().abs() < 1e-10);
        let t = tv(&mu, &nu).unwrap();
        prop_assert!((0.0..=1.0).contains(&t));
        prop_assert!((t - tv(&nu, &mu).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn entropy_of_products_adds(a in short_weights(), b in short_weights()) {
        let (p, q) = (distribution(a), distribution(b));
        let product: Vec<f64> = p.probs().iter().flat_map(|x| q.probs().iter().map(move |y| x * y)).collect();
        let joint = distribution(product);
        prop_assert!((entropy(&joint) - entropy(&p) - entropy(&q)).abs() < 1e-10);
        prop_assert!(entropy(&p) <= (p.len() as f64).log2() + 1e-12);
        let table: Vec<Vec<f64>> = p.probs().iter().map(|x| q.probs().iter().map(|y| x * y).collect()).collect();
        prop_assert!(mutual_information(&table).unwrap().abs() < 1e-10);
    }

    #[test]
    fn mutual_information_is_an_entropy_gap(rows in 1usize..5, cols in 1usize..5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let flat = distribution((0..rows * cols).map(|_| rng.gen_range(0.0..1.0)).collect());
        let table: Vec<Vec<f64>> = flat.probs().chunks(cols).map(<[f64]>::to_vec).collect();
        let px = distribution(table.iter().map(|r| r.iter().sum()).collect());
        let py = distribution((0..cols).map(|c| table.iter().map(|r| r[c]).sum()).collect());
        let mi = mutual_information(&table).unwrap();
        prop_assert!(mi >= 0.0);
        prop_assert!((mi - (entropy(&px) + entropy(&py) - entropy(&flat))).abs() < 1e-10);
    }
}

#[test]
fn tv_triangle_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    for _ in 0..2000 {
        let k = rng.gen_range(2..8);
        let mut draw = || distribution((0..k).map(|_| rng.gen_range(0.0..1.0)).collect());
        let (a, b, c) = (draw(), draw(), draw());
        assert!(tv(&a, &c).unwrap() <= tv(&a, &b).unwrap() + tv(&b, &c).unwrap() + 1e-10);
    }
}
