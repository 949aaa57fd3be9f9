mod common;

use common::{mi, random_grid_design};
use cubalg_core::ideal::condition_number;
use cubalg_core::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn systems_for(d: usize, seed: u64) -> Vec<RecurrenceSystem> {
    let names = ["hermite", "legendre", "chebyshev"];
    (0..d).map(|i| RecurrenceSystem::by_name(names[(seed as usize + i) % 3]).unwrap()).collect()
}

fn order_for(kind: u8, d: usize) -> TermOrder {
    let kind = [OrderKind::DegLex, OrderKind::DegRevLex, OrderKind::Lex][kind as usize % 3];
    TermOrder::new(kind, d)
}

fn check_basis(design: &Design, basis: &OrthoGBasis) -> std::result::Result<(), TestCaseError> {
    let l = &basis.standard;
    prop_assert_eq!(l.len(), design.len());
    prop_assert!(l.is_down_set());
    for g in &basis.elements {
        // Every proper divisor of a leading exponent is standard.
        prop_assert!(!l.contains(&g.leading));
        for i in 0..g.leading.dim() {
            if g.leading.exps()[i] > 0 {
                let mut e = g.leading.clone();
                e.0[i] -= 1;
                prop_assert!(l.contains(&e));
            }
        }
        prop_assert!(g.tail.keys().all(|b| l.contains(b) && basis.order.cmp(b, &g.leading).is_lt()));
    }
    for (i, g) in basis.polys().iter().enumerate() {
        let lead = &basis.elements[i].leading;
        for z in design.points() {
            let scale = g.terms().keys().map(|a| {
                a.exps().iter().zip(z).zip(design.systems()).map(|((&k, &x), s)| eval_pi(s, k, x).unwrap().abs()).product::<f64>()
            }).fold(1.0, f64::max);
            let r = g.eval(z).unwrap();
            prop_assert!(r.abs() < 1e-7 * scale, "element {} at {:?}: {}", lead, z, r);
        }
    }
    let cond = condition_number(design, l).unwrap();
    prop_assert!(cond.is_finite());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn random_designs_give_consistent_bases(seed in any::<u64>(), d in 1usize..=3, n in 1usize..=12, kind in 0u8..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Vec<f64>> = random_grid_design(&mut rng, d, n)
            .into_iter()
            .map(|p| p.into_iter().map(|x| x + 0.1).collect())
            .collect();
        let design = Design::new(systems_for(d, seed), pts).unwrap();
        let order = order_for(kind, d);
        let basis = bm_ortho_numeric(&design, &order, Tolerance::default()).unwrap();
        check_basis(&design, &basis)?;

        let vals: Vec<f64> = design.points().iter().map(|z| z.iter().map(|x| (x * 0.7).sin()).sum()).collect();
        let f = interpolate(&design, &vals, &basis.standard).unwrap();
        prop_assert!(f.terms().keys().all(|e| basis.standard.contains(e)));
        for (z, v) in design.points().iter().zip(&vals) {
            prop_assert!((f.eval(z).unwrap() - v).abs() < 1e-9 * v.abs().max(1.0));
        }
        let w = weights(&design, &order).unwrap();
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn exact_and_numeric_paths_agree(seed in any::<u64>(), d in 1usize..=3, n in 1usize..=10, kind in 0u8..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Vec<f64>> = random_grid_design(&mut rng, d, n)
            .into_iter()
            .map(|p| p.into_iter().map(|x| (2.0 * x).round()).collect())
            .collect();
        let design = Design::new(vec![RecurrenceSystem::hermite(); d], pts).unwrap();
        let order = order_for(kind, d);
        let exact = bm_ortho_exact(&design, &order).unwrap();
        prop_assert!(exact.exact);
        check_basis(&design, &exact)?;
        let numeric = bm_ortho_numeric(&design, &order, Tolerance::default()).unwrap();
        prop_assert_eq!(exact.leading_exps(), numeric.leading_exps());
        for (a, b) in exact.elements.iter().zip(&numeric.elements) {
            for (e, c) in &a.tail {
                let other = b.tail.get(e).copied().unwrap_or(0.0);
                prop_assert!((c - other).abs() <= 1e-7 * c.abs().max(1.0), "{}: {} vs {}", e, c, other);
            }
        }
    }

    #[test]
    fn indicators_are_lagrange(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let design = Design::new(systems_for(2, seed), random_grid_design(&mut rng, 2, n)).unwrap();
        let basis = bm_ortho(&design, &TermOrder::deglex(2), Tolerance::default()).unwrap();
        let ind = indicator_polynomials(&design, &basis.standard).unwrap();
        for (i, p) in ind.iter().enumerate() {
            for (j, z) in design.points().iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((p.eval(z).unwrap() - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn design_and_basis_json_round_trip(seed in any::<u64>(), d in 1usize..=3, n in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let design = Design::new(systems_for(d, seed), random_grid_design(&mut rng, d, n)).unwrap();
        let again = Design::from_json(&design.to_json_value().to_string()).unwrap();
        prop_assert_eq!(&again, &design);
        let basis = bm_ortho(&design, &TermOrder::deglex(d), Tolerance::default()).unwrap();
        let parsed = OrthoGBasis::from_json(&basis.to_json_value().to_string()).unwrap();
        prop_assert_eq!(parsed, basis);
    }
}

#[test]
fn single_point() {
    let design = Design::new(vec![RecurrenceSystem::hermite()], vec![vec![2.5]]).unwrap();
    let basis = bm_ortho(&design, &TermOrder::deglex(1), Tolerance::default()).unwrap();
    assert_eq!(basis.standard.exps(), &[mi(&[0])]);
    assert_eq!(basis.len(), 1);
    assert_eq!(basis.elements[0].leading, mi(&[1]));
    assert!((basis.elements[0].tail[&mi(&[0])] - 2.5).abs() < 1e-15);
    assert_eq!(weights(&design, &TermOrder::deglex(1)).unwrap(), vec![1.0]);
}

#[test]
fn product_grid_weights_factor() {
    let h = RecurrenceSystem::hermite();
    let design = product_design(&[3, 3], &[h.clone(), h.clone()]).unwrap();
    assert_eq!(design.len(), 9);
    let rule = gauss_rule(&h, 3).unwrap();
    let w = weights(&design, &TermOrder::deglex(2)).unwrap();
    for (z, wz) in design.points().iter().zip(&w) {
        let i = rule.nodes.iter().position(|&x| x == z[0]).unwrap();
        let j = rule.nodes.iter().position(|&x| x == z[1]).unwrap();
        assert!((wz - rule.weights[i] * rule.weights[j]).abs() < 1e-12);
    }
    let single = product_design(&[1, 1], &[h.clone(), h]).unwrap();
    assert_eq!(single.points(), &[vec![0.0, 0.0]]);
}

#[test]
fn duplicate_points_are_rejected() {
    let h = vec![RecurrenceSystem::hermite(); 2];
    assert!(Design::new(h.clone(), vec![vec![1.0, 2.0], vec![1.0, 2.0 + 1e-12]]).is_err());
    assert!(Design::new(h, vec![]).is_err());
}
