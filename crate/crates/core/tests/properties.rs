use gvs_core::lebesgue::{holder_check, DiscreteMeasure, LpSpace};
use gvs_core::quadrature::{GaussianRule, LogTimeGrid};
use gvs_core::semigroups::{ou_apply, ph_apply};
use gvs_core::smoothness::{self, SmoothnessContext, SmoothnessParams, SpaceKind};
use gvs_core::{ExponentFunction, HermiteExpansion};
use proptest::prelude::*;

fn gauss() -> DiscreteMeasure {
    DiscreteMeasure::gaussian(&GaussianRule::new(1, 32).unwrap())
}

fn exponent() -> impl Strategy<Value = ExponentFunction> {
    prop_oneof![
        (1.0f64..6.0).prop_map(|p| ExponentFunction::constant(p).unwrap()),
        (1.0f64..4.0, 0.0f64..3.0)
            .prop_map(|(p, c)| ExponentFunction::gaussian_family(p, c).unwrap()),
    ]
}

fn expansion() -> impl Strategy<Value = HermiteExpansion> {
    (0u32..7, any::<u64>()).prop_map(|(cap, seed)| HermiteExpansion::random(1, cap, seed).unwrap())
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn modular_decreases_in_lambda(f in expansion(), p in exponent(), l1 in 0.1f64..5.0, dl in 0.01f64..5.0) {
        let m = gauss();
        let space = LpSpace::new(m.clone(), &p).unwrap();
        let v = m.sample(|x| f.eval_unchecked(x));
        let a: Vec<f64> = v.iter().map(|x| x / l1).collect();
        let b: Vec<f64> = v.iter().map(|x| x / (l1 + dl)).collect();
        prop_assert!(space.modular(&a).unwrap() >= space.modular(&b).unwrap());
    }

    #[test]
    fn norm_is_homogeneous(f in expansion(), p in exponent(), c in -10.0f64..10.0) {
        let m = gauss();
        let space = LpSpace::new(m.clone(), &p).unwrap();
        let v = m.sample(|x| f.eval_unchecked(x));
        let cv: Vec<f64> = v.iter().map(|x| c * x).collect();
        let n = space.norm(&v).unwrap().value;
        prop_assert!(close(space.norm(&cv).unwrap().value, c.abs() * n, 1e-9));
    }

    #[test]
    fn norm_is_subadditive(f in expansion(), g in expansion(), p in exponent()) {
        let m = gauss();
        let space = LpSpace::new(m.clone(), &p).unwrap();
        let a = m.sample(|x| f.eval_unchecked(x));
        let b = m.sample(|x| g.eval_unchecked(x));
        let s: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let lhs = space.norm(&s).unwrap().value;
        let rhs = space.norm(&a).unwrap().value + space.norm(&b).unwrap().value;
        prop_assert!(lhs <= rhs * (1.0 + 1e-9) + 1e-14);
    }

    #[test]
    fn semigroup_laws(f in expansion(), s in 0.0f64..3.0, t in 0.0f64..3.0) {
        let a = ou_apply(&ou_apply(&f, s).unwrap(), t).unwrap();
        let b = ou_apply(&f, s + t).unwrap();
        for (nu, c) in b.terms() {
            prop_assert!(close(a.coeff(nu), c, 1e-12));
        }
        let a = ph_apply(&ph_apply(&f, s).unwrap(), t).unwrap();
        let b = ph_apply(&f, s + t).unwrap();
        for (nu, c) in b.terms() {
            prop_assert!(close(a.coeff(nu), c, 1e-12));
        }
    }

    #[test]
    fn holder_with_constant_two(f in expansion(), g in expansion(), q in 1.1f64..4.0, extra in 0.0f64..2.0, amp in 0.0f64..2.0) {
        let m = gauss();
        let qe = ExponentFunction::gaussian_family(q, amp).unwrap();
        let r = ExponentFunction::constant(q / (q - 1.0) + extra).unwrap();
        let fv = m.sample(|x| f.eval_unchecked(x));
        let gv = m.sample(|x| g.eval_unchecked(x));
        prop_assert!(holder_check(&m, &fv, &gv, &qe, &r).unwrap().pass);
    }

    #[test]
    fn power_identity(f in expansion(), s in 1.0f64..3.0, p in exponent()) {
        let m = gauss();
        let v = m.sample(|x| f.eval_unchecked(x));
        let (a, b) = smoothness::power_norm_identity_check(&v, s, &p, &m).unwrap();
        prop_assert!(close(a, b, 1e-8));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn smoothness_norms_are_subadditive(f in expansion(), g in expansion(), alpha in 0.1f64..1.9) {
        let ctx = SmoothnessContext::default();
        let grid = LogTimeGrid::new(1e-6, 1e4, 200).unwrap();
        let sp = SmoothnessParams::new(
            alpha,
            None,
            ExponentFunction::gaussian_family(2.0, 1.0).unwrap(),
            ExponentFunction::time_family(1.5, 3.0).unwrap(),
        )
        .unwrap();
        let both = [SpaceKind::Besov, SpaceKind::Triebel];
        let sum = f.add(&g).unwrap();
        let a = smoothness::seminorms_fixed(&f, &sp, &ctx, &grid, &both).unwrap();
        let b = smoothness::seminorms_fixed(&g, &sp, &ctx, &grid, &both).unwrap();
        let s = smoothness::seminorms_fixed(&sum, &sp, &ctx, &grid, &both).unwrap();
        for i in 0..2 {
            prop_assert!(s[i] <= (a[i] + b[i]) * (1.0 + 1e-9) + 1e-14);
        }
    }
}
