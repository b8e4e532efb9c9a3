//! Worked examples checked through the public API, one module at a time.

use cliptree_core::bounds::{
    d1_check, g2_check, g_function, lower_bound_value, u_kernel, upper_bound_value, BoundConstants,
};
use cliptree_core::polyrec::{const_coeffs, eval_at, p0_p1, p_coeffs, p_star};
use cliptree_core::restrict::{enumerate_constancy, mc_estimate_depth_ge, star_fraction, McConfig};
use cliptree_core::spectral::{bias_closed, fourier_general_closed, fourier_t1_closed, jacobsthal, FourierClosed};
use cliptree_core::tribes::{build_xor_tribe, num_vars, verify_tribe};
use cliptree_core::{
    parse_rational, Constancy, DecisionTree, Rational, RationalPoly, Restriction, RestrictionLaw, TruthTable,
};
use rand::SeedableRng;

fn q(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

fn poly(coeffs: &[&str]) -> RationalPoly {
    RationalPoly::new(coeffs.iter().map(|c| q(c)).collect())
}

fn tree(text: &str) -> DecisionTree {
    text.parse().unwrap()
}

#[test]
fn truth_table_basics() {
    let or2 = TruthTable::or(2).unwrap();
    assert!(!or2.evaluate(&[false, false]).unwrap());
    assert!(or2.evaluate(&[true, false]).unwrap());
    assert_eq!(or2.bias(), q("1/4"));
    assert_eq!(TruthTable::parity(3).unwrap().constancy(), Constancy::NonConstant);
    assert_eq!(TruthTable::parity(3).unwrap().bias(), q("0"));
    assert_eq!(TruthTable::constant(0, true).unwrap().constancy(), Constancy::Const1);
    for i in 0..4 {
        assert_eq!(TruthTable::parity(4).unwrap().influence(i).unwrap(), q("1"));
    }
}

#[test]
fn minimal_depth() {
    assert_eq!(TruthTable::constant(5, false).unwrap().dt_depth().unwrap(), 0);
    for d in 1..=6 {
        assert_eq!(TruthTable::or(d).unwrap().dt_depth().unwrap(), d);
    }
    assert_eq!(TruthTable::parity(4).unwrap().dt_depth().unwrap(), 4);
    assert!(TruthTable::parity(20).unwrap().dt_depth_with_cap(14).is_err());
}

#[test]
fn fourier_of_small_functions() {
    let zero = TruthTable::constant(2, false).unwrap().fourier_transform();
    assert_eq!(zero.coefficient(0), q("1"));
    assert!((1..4).all(|s| zero.coefficient(s) == q("0")));
    assert_eq!(
        TruthTable::dictator(1, 0).unwrap().fourier_transform().coefficient(1),
        q("1")
    );
    let xi = build_xor_tribe(1, 3).unwrap().tree.to_truth_table_natural().unwrap();
    assert_eq!(xi.fourier_transform().coefficient(0b001), q("3/4"));
}

#[test]
fn tree_validation_and_clipping() {
    assert!(tree("L1").validate().is_ok());
    assert!(tree("(x0 L0 L1)").validate().is_ok());
    let repeated = "(x0 (x0 L0 L1) L1)".parse::<DecisionTree>().unwrap_err();
    assert!(repeated.to_string().contains("x0"));
    assert_eq!(tree("L0").clip_report().t_clip, 0);
    assert_eq!(build_xor_tribe(2, 3).unwrap().tree.clip_report().t_clip, 2);
    let balanced = tree("(x0 (x1 (x3 L0 L1) (x4 L1 L0)) (x2 (x5 L0 L1) (x6 L1 L0)))");
    assert_eq!(balanced.clip_report().t_clip, 3);
}

#[test]
fn xi_1_2_by_hand() {
    let xi = build_xor_tribe(1, 2).unwrap().tree;
    let table = xi.to_truth_table_natural().unwrap();
    let ones: Vec<usize> = (0..4).filter(|&x| table.value(x)).collect();
    // Index bit i is x_i, so (x0, x1) = (1, 0) is index 1.
    assert_eq!(ones, vec![1]);

    let one_star: Restriction = "1*".parse().unwrap();
    let zero_star: Restriction = "0*".parse().unwrap();
    assert_eq!(xi.apply_restriction(&one_star).unwrap().to_string(), "(x1 L1 L0)");
    assert_eq!(xi.restricted_dt_depth(&one_star, 14).unwrap(), 1);
    assert_eq!(xi.restricted_dt_depth(&zero_star, 14).unwrap(), 0);
    assert_eq!(xi.restricted_dt_depth(&"10".parse().unwrap(), 14).unwrap(), 0);
}

#[test]
fn restriction_edge_cases() {
    let xi = build_xor_tribe(2, 2).unwrap().tree;
    let n = xi.var_universe();
    let all_star = Restriction::all_star(n);
    assert_eq!(xi.apply_restriction(&all_star).unwrap().to_string(), xi.to_string());
    let fixed = Restriction::from_index(n, 0b01_0101);
    let leaf = xi.apply_restriction(&fixed).unwrap();
    assert_eq!(leaf.var_count(), 0);
    assert!(!leaf.has_split_path());
    assert!(tree("(x0 L0 L1)").has_split_path());
    assert!(!tree("L1").has_split_path());
}

#[test]
fn restriction_law() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    assert_eq!(
        star_fraction(&RestrictionLaw::new(q("0")).unwrap(), 1000, &mut rng),
        0.0
    );
    assert_eq!(
        star_fraction(&RestrictionLaw::new(q("1")).unwrap(), 1000, &mut rng),
        1.0
    );
    let third = star_fraction(&RestrictionLaw::new(q("1/3")).unwrap(), 100_000, &mut rng);
    let sigma = (1.0f64 / 3.0 * 2.0 / 3.0 / 100_000.0).sqrt();
    assert!((third - 1.0 / 3.0).abs() <= 5.0 * sigma);
    assert!(RestrictionLaw::new(q("3/2")).is_err());
}

#[test]
fn monte_carlo_trivial_cases() {
    let xi = build_xor_tribe(1, 4).unwrap().tree;
    let config = McConfig::new(2000, 1);
    let any_p = RestrictionLaw::new(q("1/3")).unwrap();
    assert_eq!(mc_estimate_depth_ge(&xi, &any_p, 0, &config).unwrap().phat, q("1"));
    let no_stars = RestrictionLaw::new(q("0")).unwrap();
    assert_eq!(mc_estimate_depth_ge(&xi, &no_stars, 1, &config).unwrap().successes, 0);
}

#[test]
fn tribe_shapes() {
    assert_eq!(build_xor_tribe(3, 0).unwrap().tree.var_count(), 0);
    let xi = build_xor_tribe(2, 3).unwrap();
    assert_eq!(xi.level_counts(), vec![2, 4, 8]);
    assert_eq!(num_vars(2, 3), 14u32.into());
    assert_eq!(num_vars(1, 9), 9u32.into());
    assert_eq!(num_vars(5, 0), 0u32.into());
    assert!(verify_tribe(&xi).is_ok());
    let path = build_xor_tribe(1, 5).unwrap().tree;
    assert_eq!(path.depth(), 5);
}

#[test]
fn recurrence_base_cases() {
    let half = poly(&["1/2", "-1/2"]);
    assert_eq!(p0_p1(1, 1).unwrap(), (half.clone(), half));
    // q + q² + pq with q = (1 − p)/2.
    let (p0, _) = p0_p1(1, 2).unwrap();
    assert_eq!(p0, poly(&["3/4", "-1/2", "-1/4"]));
    assert_eq!(p_star(1, 1).unwrap(), poly(&["0", "1"]));
    let oracle = enumerate_constancy(&build_xor_tribe(1, 2).unwrap().tree, 14).unwrap();
    assert_eq!(p_star(1, 2).unwrap(), oracle.pstar);
}

#[test]
fn coefficient_examples() {
    assert_eq!(const_coeffs(1, 1).unwrap(), (q("1/2"), q("1/2")));
    assert_eq!(const_coeffs(1, 2).unwrap().0, q("3/4"));
    assert_eq!(p_coeffs(1, 1).unwrap(), (q("-1/2"), q("-1/2")));
    assert_eq!(p_coeffs(1, 2).unwrap().0, q("-1/2"));
    assert_eq!(g_function(1, 1).unwrap(), q("-1"));
    assert!(g_function(1, 8).unwrap() <= q("-1/3"));
    assert!(g_function(2, 16).unwrap() <= q("-2/3"));
}

#[test]
fn polynomial_operators() {
    let f = poly(&["1", "2", "3"]);
    assert_eq!(f.coeff(1), q("2"));
    assert_eq!(f.tail(1), poly(&["2", "3"]));
    assert_eq!(RationalPoly::constant(q("-5/3")).gmax(0, &q("1"), 10), q("5/3"));
    assert_eq!(RationalPoly::p().gmax(1, &q("1"), 10), q("1"));
}

#[test]
fn spectral_examples() {
    assert_eq!(jacobsthal(0), 0.into());
    assert_eq!(jacobsthal(1), 1.into());
    assert_eq!(jacobsthal(3), 3.into());
    assert_eq!(fourier_t1_closed(3, 0b001).unwrap(), q("3/4"));
    assert_eq!(fourier_t1_closed(3, 0b011).unwrap(), q("1/4"));
    assert_eq!(fourier_t1_closed(3, 0b100).unwrap(), q("1/4"));
    assert!(fourier_t1_closed(4, 1).is_err());
    // In Ξ₂(2), x3 hangs below the root's 1-edge and x4 below x1's 1-edge.
    let xi = build_xor_tribe(2, 2).unwrap();
    assert_eq!(
        fourier_general_closed(&xi, (1 << 3) | (1 << 4)).unwrap(),
        FourierClosed::Zero
    );
    assert!((cliptree_core::to_f64(&bias_closed(1, 60).unwrap()) - 1.0 / 6.0).abs() < 1e-12);
    let xi23 = build_xor_tribe(2, 3).unwrap().tree.to_truth_table_natural().unwrap();
    assert_eq!(bias_closed(2, 3).unwrap(), xi23.bias());
    assert_eq!(bias_closed(3, 1).unwrap(), q("3/8"));
}

#[test]
fn bound_values() {
    assert_eq!(upper_bound_value(&q("1/7"), 2, 0).unwrap(), q("1"));
    assert_eq!(upper_bound_value(&q("1/64"), 2, 3).unwrap(), q("1/64"));
    assert_eq!(upper_bound_value(&q("0"), 2, 3).unwrap(), q("0"));
    let k = BoundConstants::default();
    assert!(u_kernel(&q("0"), 1, &q("4")).unwrap() <= q("1"));
    assert!(u_kernel(&q("1"), 1, &q("4")).is_err());
    let lb = lower_bound_value(&q("1/840"), 1, 1, 8, &k).unwrap();
    assert_eq!(lb.value, q("2/35280"));
    assert!(lb.in_domain);
    assert!(lower_bound_value(&k.p_max(1), 1, 1, 8, &k).unwrap().in_domain);
    assert_eq!(lower_bound_value(&q("1/2"), 3, 0, 0, &k).unwrap().value, q("1"));
}

#[test]
fn bound_checks() {
    let k = BoundConstants::default();
    assert!(g2_check(2, 8, &k).unwrap().passed);
    assert!(g2_check(1, 1, &k).unwrap().passed);
    assert!(d1_check(1, 8, &q("1/840"), &k).unwrap().sandwiched());
    assert!(d1_check(2, 16, &q("1/1680"), &k).unwrap().sandwiched());
    let zero = d1_check(1, 8, &q("0"), &k).unwrap();
    assert!(zero.sandwiched());
    assert_eq!(eval_at(1, 8, &q("0")).unwrap().pstar.to_rational(), q("0"));
}
