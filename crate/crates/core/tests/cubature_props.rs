mod common;

use common::{expect_monomial, mi, pi_monomial, random_grid_design, random_ortho};
use cubalg_core::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn h2() -> Vec<RecurrenceSystem> {
    vec![RecurrenceSystem::hermite(); 2]
}

/// The designs whose bases are listed in closed form, plus a product grid.
fn named_designs() -> Vec<Design> {
    let s3 = 3f64.sqrt();
    let pts = |v: &[(f64, f64)]| v.iter().map(|&(x, y)| vec![x, y]).collect::<Vec<_>>();
    vec![
        Design::new(h2(), pts(&[(-6.0, -1.0), (-5.0, 0.0), (-2.0, 1.0), (3.0, 2.0), (10.0, 3.0)])).unwrap(),
        Design::new(h2(), pts(&[(-1.0, 0.0), (-1.0, -2.0), (1.0, -1.0 + s3), (1.0, -1.0 - s3), (2.0, 1.0)])).unwrap(),
        Design::new(h2(), pts(&[(0.0, 0.0), (-s3, -s3), (-s3, s3), (s3, -s3), (s3, s3)])).unwrap(),
        product_design(&[3, 2], &h2()).unwrap(),
    ]
}

fn coeff_scale(p: &OrthoPoly) -> f64 {
    p.to_mono().unwrap().terms().values().map(|c| c.abs()).sum::<f64>().max(1.0)
}

fn exactness_on(design: &Design, trials: usize, rng: &mut ChaCha8Rng) {
    let order = TermOrder::deglex(design.dim());
    let cub = CubatureFormula::build(design.clone(), &order, Tolerance::default()).unwrap();
    assert!(cub.degree >= 0);
    assert!((cub.weights.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    for _ in 0..trials {
        let p = random_ortho(rng, design.systems(), cub.degree as usize, 6);
        let exact = exact_expectation(&p);
        let value = cub.value(|z| p.eval(z).unwrap());
        assert!((exact - value).abs() < 1e-7 * coeff_scale(&p), "degree {}: {exact} vs {value}", cub.degree);
    }
}

#[test]
fn listed_designs_are_exact_up_to_their_degree() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let degrees: Vec<i64> = named_designs()
        .iter()
        .map(|d| cubature_degree(&bm_ortho(d, &TermOrder::deglex(2), Tolerance::default()).unwrap()).unwrap())
        .collect();
    assert_eq!(&degrees[..2], &[1, 2]);
    for d in named_designs() {
        exactness_on(&d, 100, &mut rng);
    }
}

/// The error of `π_γ g`, with `γ` the lowest-degree support exponent of
/// the element attaining the minimum, is `c_γ(g) ‖π_γ‖²`; its degree is one
/// more than the certified degree.
#[test]
fn degree_is_sharp() {
    for design in named_designs() {
        let order = TermOrder::deglex(2);
        let basis = bm_ortho(&design, &order, Tolerance::default()).unwrap();
        let sc = cubature_degree(&basis).unwrap();
        let w = weights(&design, &order).unwrap();
        let g = basis.polys().into_iter().find(|g| s_orthogonality(g).unwrap() == sc).unwrap();
        let scale = g.terms().values().fold(0.0f64, |m, c| m.max(c.abs()));
        let gamma = g
            .terms()
            .iter()
            .filter(|(_, c)| c.abs() > 1e-8 * scale)
            .map(|(e, _)| e.clone())
            .min_by_key(|e| e.total_degree())
            .unwrap();
        let probe = OrthoPoly::from_terms(h2(), [(gamma, 1.0)]).unwrap().mul(&g).unwrap();
        assert_eq!(probe.total_degree().unwrap() as i64, sc + 1);
        let err = exact_expectation(&probe) - cubature_value(|z| probe.eval(z).unwrap(), &design, &w).unwrap();
        assert!(err.abs() > 1e-3, "error {err}");
    }
}

#[test]
fn gaussian_designs_have_degree_2n_minus_1() {
    for name in ["hermite", "legendre"] {
        let sys = RecurrenceSystem::by_name(name).unwrap();
        for n in 1..=10 {
            let design = product_design(&[n], std::slice::from_ref(&sys)).unwrap();
            let basis = bm_ortho(&design, &TermOrder::deglex(1), Tolerance::default()).unwrap();
            assert_eq!(cubature_degree(&basis).unwrap(), 2 * n as i64 - 1, "{name} n={n}");
        }
    }
}

#[test]
fn listed_orthogonality_degrees() {
    let g1 = OrthoPoly::from_terms(h2(), [(mi(&[0, 2]), 1.0), (mi(&[1, 0]), -1.0), (mi(&[0, 1]), 2.0), (mi(&[0, 0]), -4.0)]).unwrap();
    assert_eq!(s_orthogonality(&g1).unwrap(), 1);
    let g2 = OrthoPoly::from_terms(h2(), [(mi(&[2, 1]), 1.0), (mi(&[2, 0]), -1.0)]).unwrap();
    assert_eq!(s_orthogonality(&g2).unwrap(), 4);
    let pi3 = OrthoPoly::from_terms(vec![RecurrenceSystem::legendre()], [(mi(&[3]), 1.0)]).unwrap();
    assert_eq!(s_orthogonality(&pi3).unwrap(), 5);
    let basis = bm_ortho(&named_designs()[0], &TermOrder::new(OrderKind::Lex, 2), Tolerance::default()).unwrap();
    assert!(matches!(cubature_degree(&basis), Err(Error::NotDegreeCompatible(_))));
}

fn random_instance(seed: u64) -> (OrthoGBasis, Vec<OrthoPoly>, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=8);
    let design = Design::new(h2(), random_grid_design(&mut rng, 2, n)).unwrap();
    let basis = bm_ortho(&design, &TermOrder::deglex(2), Tolerance::default()).unwrap();
    let q = (0..basis.len()).map(|_| random_ortho(&mut rng, &h2(), 4, 5)).collect();
    (basis, q, rng)
}

fn mean_of_combination(basis: &OrthoGBasis, q: &[OrthoPoly]) -> (f64, f64) {
    let mut combo = OrthoPoly::zero(h2());
    for (qg, g) in q.iter().zip(basis.polys()) {
        combo = combo.add(&qg.mul(&g).unwrap()).unwrap();
    }
    let scale = combo.terms().values().fold(1.0f64, |m, c| m.max(c.abs()));
    (exact_expectation(&combo), scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn zero_mean_condition_matches_expectation(seed in any::<u64>(), force_zero in any::<bool>()) {
        let (basis, mut q, _) = random_instance(seed);
        if force_zero {
            // Solve for the leading coefficient of the first multiplier.
            let lead = basis.elements[0].leading.clone();
            let c = zero_mean_check(&basis, &q).unwrap();
            let norm: f64 = lead.exps().iter().map(|&k| norm_sq(&RecurrenceSystem::hermite(), k).unwrap()).product();
            q[0] = q[0].add(&OrthoPoly::from_terms(h2(), [(lead, -c / norm)]).unwrap()).unwrap();
        }
        let check = zero_mean_check(&basis, &q).unwrap();
        let (mean, scale) = mean_of_combination(&basis, &q);
        prop_assert!((check - mean).abs() <= 1e-7 * scale, "{} vs {}", check, mean);
        if force_zero {
            prop_assert!(check.abs() <= 1e-7 * scale && mean.abs() <= 1e-7 * scale);
        }
    }

    #[test]
    fn high_terms_do_not_change_the_mean(seed in any::<u64>()) {
        let (basis, q, mut rng) = random_instance(seed);
        let (before, scale) = mean_of_combination(&basis, &q);
        let mut lifted = q.clone();
        for (i, g) in basis.elements.iter().enumerate() {
            let extra = random_ortho(&mut rng, &h2(), 6, 6);
            let kept = extra.terms().iter().filter(|(e, _)| {
                **e != g.leading && !(basis.standard.contains(e) && basis.order.cmp(e, &g.leading).is_lt())
            });
            let extra = OrthoPoly::from_terms(h2(), kept.map(|(e, c)| (e.clone(), *c))).unwrap();
            lifted[i] = lifted[i].add(&extra).unwrap();
        }
        let (after, scale2) = mean_of_combination(&basis, &lifted);
        prop_assert!((before - after).abs() <= 1e-7 * scale.max(scale2), "{} vs {}", before, after);
    }

    #[test]
    fn orthogonality_degree_bounds(seed in any::<u64>()) {
        let (basis, _, _) = random_instance(seed);
        for g in basis.polys() {
            let deg = g.total_degree().unwrap() as i64;
            let s = s_orthogonality(&g).unwrap();
            prop_assert!(deg - 1 <= s && s < 2 * deg);
        }
    }

    #[test]
    fn random_designs_are_exact_to_their_degree(seed in any::<u64>(), d in 1usize..=2, n in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let design = Design::new(vec![RecurrenceSystem::hermite(); d], random_grid_design(&mut rng, d, n)).unwrap();
        exactness_on(&design, 10, &mut rng);
    }

    #[test]
    fn fraction_error_closes_the_gap(seed in any::<u64>(), n in 2usize..=7, coeffs in prop::collection::vec(-2.0f64..2.0, 1..=12)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = RecurrenceSystem::hermite();
        let parent = nodes(&sys, n).unwrap();
        let subset: Vec<f64> = parent.iter().copied().filter(|_| rng.random_bool(0.6)).collect();
        prop_assume!(!subset.is_empty());
        let fr = Fraction::new(sys.clone(), n, &subset).unwrap();
        let w = fraction_weights(&fr).unwrap();
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let p = UniPoly::monomial(coeffs.clone());
        let rule: f64 = fr.subset().iter().zip(&w).map(|(&z, wz)| p.eval(&sys, z).unwrap() * wz).sum();
        let err = fraction_error(&fr, &p).unwrap();
        let want = expect_monomial("hermite", &coeffs);
        let scale: f64 = coeffs.iter().enumerate().map(|(k, c)| (c * common::moment("hermite", k)).abs()).sum::<f64>().max(1.0);
        prop_assert!((rule + err - want).abs() <= 1e-7 * scale, "{} + {} vs {}", rule, err, want);
    }

    #[test]
    fn grid_error_terms_add_up(seed in any::<u64>(), n1 in 1usize..=4, n2 in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_ortho(&mut rng, &h2(), 9, 6).to_mono().unwrap();
        let r = product_grid_expectation(&f, &[n1, n2], &h2()).unwrap();
        let scale = f.terms().values().map(|c| c.abs()).sum::<f64>().max(1.0) * 1e3;
        prop_assert!((r.exact - exact_expectation_mono(&f)).abs() <= 1e-9 * scale);
        prop_assert!((r.exact - r.value - r.error).abs() <= 1e-9 * scale);
        prop_assert!((r.error_terms.iter().sum::<f64>() - r.error).abs() <= 1e-7 * scale);
    }
}

fn exact_expectation_mono(f: &MonoPoly) -> f64 {
    cubalg_core::cubature::exact_expectation_mono(f, &h2()).unwrap()
}

#[test]
fn listed_fractions() {
    let h = RecurrenceSystem::hermite();
    let s3 = 3f64.sqrt();
    let full = Fraction::new(h.clone(), 3, &[-s3, 0.0, s3]).unwrap();
    let w = fraction_weights(&full).unwrap();
    for (a, b) in w.iter().zip([1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0]) {
        assert!((a - b).abs() < 1e-12);
    }
    let pair = Fraction::new(h.clone(), 3, &[s3, -s3]).unwrap();
    let w = fraction_weights(&pair).unwrap();
    assert!(w.iter().all(|x| (x - 0.5).abs() < 1e-12));
    let err = fraction_error(&pair, &UniPoly::monomial(vec![0.0, 0.0, 1.0])).unwrap();
    assert!((err + 2.0).abs() < 1e-12);
    let single = Fraction::new(h.clone(), 4, &[nodes(&h, 4).unwrap()[1]]).unwrap();
    let w = fraction_weights(&single).unwrap();
    assert!(w.len() == 1 && (w[0] - 1.0).abs() < 1e-12);
    assert!(Fraction::new(h, 3, &[1.0]).is_err());
}

#[test]
fn listed_grid_expectations() {
    let x6 = MonoPoly::from_terms(2, [(mi(&[6, 0]), 1.0)]).unwrap();
    let r = product_grid_expectation(&x6, &[3, 1], &h2()).unwrap();
    assert!((r.error - 6.0).abs() < 1e-9);
    assert!((r.error_terms[0] - 6.0).abs() < 1e-9 && r.error_terms[1].abs() < 1e-12);
    let x2y2 = MonoPoly::from_terms(2, [(mi(&[2, 2]), 1.0)]).unwrap();
    let r = product_grid_expectation(&x2y2, &[3, 3], &h2()).unwrap();
    assert!((r.value - 1.0).abs() < 1e-12 && r.error.abs() < 1e-12);
    let one = MonoPoly::constant(2, 1.0);
    let r = product_grid_expectation(&one, &[2, 3], &h2()).unwrap();
    assert!((r.value - 1.0).abs() < 1e-12 && r.error.abs() < 1e-12);
    assert_eq!(pi_monomial(&RecurrenceSystem::hermite(), 2), vec![-1.0, 0.0, 1.0]);
    // Degree 2n_i − 1 in every coordinate is still integrated exactly.
    let edge = MonoPoly::from_terms(2, [(mi(&[5, 3]), 1.0), (mi(&[4, 2]), 1.0)]).unwrap();
    let r = product_grid_expectation(&edge, &[3, 2], &h2()).unwrap();
    assert!((r.value - 3.0).abs() < 1e-12 && r.error.abs() < 1e-12);
}
