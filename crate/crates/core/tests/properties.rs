mod common;

use lactoep_core::asymptotics::circle_quadrature;
use lactoep_core::linalg::determinant_small;
use lactoep_core::{
    asymptotic_ratio, build_symbol_from_log_coeffs, exact_ratio, factorize, line_correction_matrix,
    log_determinant, split_edge_anchored, validate_and_normalize, verify_jump, CoefficientTable,
    ComplexMatrix, Lacuna, LacunarySpec, QuadratureConfig, Symbol,
};
use num_complex::Complex64;
use proptest::collection::vec;
use proptest::prelude::*;

use common::{exponential, reflected, tridiagonal};

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| Complex64::new(a, b))
}

fn matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    vec(complex(), n * n).prop_map(move |d| ComplexMatrix::new(n, n, d).unwrap())
}

/// Symbol with a few random log-coefficients decaying like `rho^|n|`.
fn random_symbol() -> impl Strategy<Value = Symbol> {
    let coefficient = (0.5..1.0f64, -3.2..3.2f64).prop_map(|(r, t)| Complex64::from_polar(r, t));
    (vec(coefficient, 8), 0.15..0.4f64).prop_map(|(cs, rho)| {
        let pairs = cs.iter().enumerate().map(|(i, v)| {
            let order = i as i64 / 2 + 1;
            let n = if i % 2 == 0 { order } else { -order };
            (n, v * rho.powi(order as i32))
        });
        build_symbol_from_log_coeffs(&CoefficientTable::from_pairs(pairs), 1e-15).unwrap()
    })
}

/// Distinct lacunae with positions in `positions` and replacements taken
/// from the matching edge.
fn edge_lacunae(
    n: i64,
    count: usize,
    lower: bool,
) -> impl Strategy<Value = Vec<Lacuna>> {
    let positions = if lower { 1..=3i64 } else { n - 2..=n };
    (
        proptest::sample::subsequence(positions.collect::<Vec<_>>(), count),
        proptest::sample::subsequence((1..=4i64).collect::<Vec<_>>(), count),
    )
        .prop_map(move |(pos, off)| {
            pos.into_iter()
                .zip(off)
                .map(|(h, o)| Lacuna::new(h, if lower { 1 - o } else { n + o }))
                .collect()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn determinant_is_multiplicative(a in matrix(4), b in matrix(4)) {
        let ab = &a * &b;
        let lhs = log_determinant(&ab).unwrap().value();
        let rhs = log_determinant(&a).unwrap().value() * log_determinant(&b).unwrap().value();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0));
    }

    #[test]
    fn row_swap_flips_sign(a in matrix(5), i in 0usize..5, j in 0usize..5) {
        prop_assume!(i != j);
        let mut b = a.clone();
        b.swap_rows(i, j);
        let da = determinant_small(&a).unwrap();
        let db = determinant_small(&b).unwrap();
        prop_assert!((da + db).norm() <= 1e-12 * da.norm().max(1.0));
    }

    #[test]
    fn jump_holds_for_random_symbols(sym in random_symbol()) {
        prop_assert!(verify_jump(&factorize(&sym), &sym, 256) <= 1e-12);
    }

    #[test]
    fn input_order_does_not_matter(
        lines in edge_lacunae(20, 2, true),
        rows in edge_lacunae(20, 2, false),
    ) {
        let a = validate_and_normalize(&lines, &rows, 20).unwrap();
        let rl: Vec<_> = lines.iter().rev().copied().collect();
        let rr: Vec<_> = rows.iter().rev().copied().collect();
        prop_assert_eq!(&a, &validate_and_normalize(&rl, &rr, 20).unwrap());
        let split = split_edge_anchored(&a).unwrap();
        prop_assert_eq!(split.recombine(20).unwrap(), a);
    }

    #[test]
    fn transpose_swaps_lines_and_rows(
        sym in random_symbol(),
        lines in edge_lacunae(16, 1, true),
        rows in edge_lacunae(16, 2, false),
    ) {
        let spec = validate_and_normalize(&lines, &rows, 16).unwrap();
        let swapped = validate_and_normalize(&rows, &lines, 16).unwrap();
        let a = exact_ratio(&sym, &spec).unwrap().value;
        let b = exact_ratio(&reflected(&sym), &swapped).unwrap().value;
        prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0), "{} vs {}", a, b);
    }

    #[test]
    fn taylor_coefficients_by_quadrature(a in -2.0..2.0f64, m in 0i32..6) {
        let cfg = QuadratureConfig::default();
        let v = circle_quadrature(|z| (z * a).exp() * z.powi(-m - 1), 1.0, &cfg).unwrap();
        let expected = a.powi(m) / (1..=m).map(f64::from).product::<f64>();
        prop_assert!((v - expected).norm() < 1e-13);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn relabelling_lines_preserves_det_m(
        lines in edge_lacunae(24, 3, true),
        perm in Just(vec![2usize, 0, 1]).prop_shuffle(),
    ) {
        let fact = factorize(&exponential());
        let spec = validate_and_normalize(&lines, &[], 24).unwrap();
        let m = line_correction_matrix(&fact, &spec, &QuadratureConfig::default()).unwrap();
        let permuted = ComplexMatrix::from_fn(3, 3, |i, j| m.matrix[(perm[i], perm[j])]).unwrap();
        let a = m.determinant().unwrap();
        let b = log_determinant(&permuted).unwrap().value();
        prop_assert!((a - b).norm() <= 1e-13 * a.norm().max(1.0));
    }

    #[test]
    fn edge_anchored_specs_match_the_oracle(
        sym in random_symbol(),
        lines_lo in edge_lacunae(32, 1, true),
        lines_hi in edge_lacunae(32, 1, false),
        rows_lo in edge_lacunae(32, 1, true),
    ) {
        let lines: Vec<_> = lines_lo.into_iter().chain(lines_hi).collect();
        let spec = validate_and_normalize(&lines, &rows_lo, 32).unwrap();
        let fact = factorize(&sym);
        let cfg = QuadratureConfig::default();
        let exact = exact_ratio(&sym, &spec).unwrap().value;
        for method in ["split", "general"] {
            let asym = asymptotic_ratio(&fact, &spec, &cfg, method).unwrap().value;
            prop_assert!((exact - asym).norm() <= 1e-8 * exact.norm().max(1.0),
                "{}: {} vs {}", method, exact, asym);
        }
    }

    #[test]
    fn radius_choice_is_immaterial(scale in 0.9..1.1f64) {
        let fact = factorize(&tridiagonal());
        let base = QuadratureConfig::default();
        let radii = base.radii(fact.annulus()).unwrap();
        let moved = QuadratureConfig {
            eta_z: Some(radii.eta_z * scale),
            eta_s: Some(radii.eta_s * scale),
            ..base
        };
        let spec = validate_and_normalize(&[Lacuna::new(1, 0), Lacuna::new(2, -1), Lacuna::new(32, 34)], &[], 32).unwrap();
        let a = line_correction_matrix(&fact, &spec, &base).unwrap().matrix;
        let b = line_correction_matrix(&fact, &spec, &moved).unwrap().matrix;
        prop_assert!(a.max_abs_diff(&b) < 1e-12);
    }
}

#[test]
fn empty_spec_ratio_is_exactly_one() {
    let sym = exponential();
    let r = exact_ratio(&sym, &LacunarySpec::empty(7)).unwrap();
    assert_eq!(r.value, Complex64::new(1.0, 0.0));
}
