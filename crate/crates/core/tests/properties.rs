mod common;

use common::*;
use proptest::prelude::*;
use psmono::mobius::{grav_generator, mobius_apply, GravGenerator};
use psmono::poly::{CliffordPolynomial, PolyKind};
use psmono::slice::{compose, decompose, SliceContext, SliceUnit};
use psmono::{Multivector, Paravector};

fn int_mv(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-5i32..=5).prop_map(f64::from), 1usize << n)
}

fn real_mv(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, 1usize << n)
}

/// (p, q) with p + q <= 5.
fn context() -> impl Strategy<Value = SliceContext> {
    (0usize..=3, 1usize..=3).prop_map(|(p, q)| SliceContext::new(p, q).unwrap())
}

fn unit(c: SliceContext) -> impl Strategy<Value = SliceUnit> {
    prop::collection::vec(-1.0f64..1.0, c.q())
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-4)
        .prop_map(move |v| SliceUnit::normalized(c, &v).unwrap())
}

proptest! {
    #[test]
    fn product_matches_reference_and_associates(
        (n, a, b, c) in (1usize..=5).prop_flat_map(|n| (Just(n), int_mv(n), int_mv(n), int_mv(n)))
    ) {
        let (ma, mb, mc) = (to_mv(n, a.clone()), to_mv(n, b.clone()), to_mv(n, c));
        prop_assert_eq!(of_mv(&(&ma * &mb)), cmul(&a, &b));
        prop_assert_eq!(&(&ma * &mb) * &mc, &ma * &(&mb * &mc));
    }

    #[test]
    fn reversion_and_conjugation_reverse_products(
        (n, a, b) in (1usize..=5).prop_flat_map(|n| (Just(n), int_mv(n), int_mv(n)))
    ) {
        let (ma, mb) = (to_mv(n, a), to_mv(n, b));
        let ab = &ma * &mb;
        prop_assert_eq!(ab.reverse(), &mb.reverse() * &ma.reverse());
        prop_assert_eq!(ab.conjugate(), &mb.conjugate() * &ma.conjugate());
        prop_assert_eq!(ma.reverse().reverse(), ma.clone());
    }

    #[test]
    fn text_and_json_roundtrip((n, a) in (1usize..=12).prop_flat_map(|n| (Just(n), real_mv(n.min(6))))) {
        // low blades only when n > 6, so the vector stays small
        let mut coeffs = vec![0.0; 1 << n];
        coeffs[..a.len()].copy_from_slice(&a);
        let m = Multivector::from_coeffs(n, coeffs).unwrap();
        prop_assert_eq!(Multivector::parse(n, &m.to_string()).unwrap(), m.clone());
        prop_assert_eq!(Multivector::from_json(n, &m.to_json()).unwrap(), m);
    }

    #[test]
    fn paravector_inverse(x in prop::collection::vec(-3.0f64..3.0, 4)) {
        prop_assume!(x.iter().map(|v| v * v).sum::<f64>() > 1e-3);
        let inv = Paravector::new(x.clone()).unwrap().inverse().unwrap();
        let prod = cmul(&para(3, &x), &para(3, inv.coords()));
        prop_assert!(cdist(&prod, &scalar(3, 1.0)) <= 1e-12);
    }

    #[test]
    fn compose_decompose_roundtrip(
        (c, xp, r, w) in context().prop_flat_map(|c| (
            Just(c),
            prop::collection::vec(-5.0f64..5.0, c.p() + 1),
            1e-3f64..5.0,
            unit(c),
        ))
    ) {
        let x = compose(c, &xp, r, &w).unwrap();
        let d = decompose(c, &x).unwrap();
        prop_assert_eq!(&d.xp, &xp);
        prop_assert!((d.r - r).abs() <= 1e-12 * r);
        let w2 = d.omega.unwrap();
        for (a, b) in w2.comps().iter().zip(w.comps()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        let back = compose(c, &d.xp, d.r, &w2).unwrap();
        for (a, b) in back.coords().iter().zip(x.coords()) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn partials_are_linear(
        exps in prop::collection::vec(prop::collection::vec(0u32..4, 4), 1..6),
        cf in prop::collection::vec(-3i32..=3, 6),
        s in -4i32..=4,
        var in 0usize..4,
    ) {
        let c = SliceContext::new(2, 1).unwrap();
        let mut f = CliffordPolynomial::zero(c, PolyKind::Full);
        let mut g = CliffordPolynomial::zero(c, PolyKind::Full);
        for (i, e) in exps.iter().enumerate() {
            f.add_term(e.clone(), &Multivector::basis(3, 1 + i % 3).scale(f64::from(cf[i])));
            g.add_term(e.iter().rev().cloned().collect(), &Multivector::scalar(3, f64::from(cf[5 - i])));
        }
        let s = f64::from(s);
        let lhs = (&f.scale(s) + &g).partial(var);
        let rhs = &f.partial(var).scale(s) + &g.partial(var);
        prop_assert!(lhs.max_diff(&rhs) == 0.0);
        prop_assert!(pdiff(&from_lib(&f.partial(var)), &pderiv(&from_lib(&f), var)) == 0.0);
    }

    #[test]
    fn generator_actions_match_closed_forms(
        x in prop::collection::vec(-2.0f64..2.0, 4),
        b in prop::collection::vec(-1.0f64..1.0, 2),
        w in prop::collection::vec(-1.0f64..1.0, 2),
        lam in 0.5f64..2.0,
    ) {
        let c = SliceContext::new(1, 2).unwrap();
        let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assume!(nx > 1e-2);
        prop_assume!(w.iter().map(|v| v * v).sum::<f64>() > 1e-3);
        let xp = c.point(&x).unwrap();
        let close = |got: &Paravector, want: &[f64]| {
            got.coords().iter().zip(want).all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + b.abs()))
        };

        let t = grav_generator(c, GravGenerator::Translation(b.clone())).unwrap();
        let want: Vec<f64> = x.iter().enumerate().map(|(i, v)| v + b.get(i).copied().unwrap_or(0.0)).collect();
        prop_assert!(close(&mobius_apply(&t, &xp).unwrap(), &want));

        let a = SliceUnit::normalized(c, &w).unwrap();
        let rot = grav_generator(c, GravGenerator::ModifiedRotation(a.clone())).unwrap();
        prop_assert!(close(&mobius_apply(&rot, &xp).unwrap(), &sandwich(3, &unit_coeffs(3, 1, &a), &x)));

        let inv = grav_generator(c, GravGenerator::Inversion).unwrap();
        let want: Vec<f64> = inverse_para(&x).iter().map(|v| -v).collect();
        prop_assert!(close(&mobius_apply(&inv, &xp).unwrap(), &want));

        let dil = grav_generator(c, GravGenerator::Dilation(lam)).unwrap();
        let want: Vec<f64> = x.iter().map(|v| v * lam * lam).collect();
        prop_assert!(close(&mobius_apply(&dil, &xp).unwrap(), &want));
    }
}
