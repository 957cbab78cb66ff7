use bdl_core::harness::depth_two_family;
use bdl_core::{CylinderFunction, FreeGroup, Limits, ReducedWord, Scalar};
use proptest::prelude::*;

fn ball(g: FreeGroup, r: usize) -> Vec<ReducedWord> {
    g.ball(r, &Limits::default()).unwrap()
}

#[test]
fn depth_d_indicators_sum_to_one() {
    for n in [2, 3] {
        let g = FreeGroup::new(n).unwrap();
        for d in 0..=3 {
            let sum = g
                .sphere(d)
                .iter()
                .fold(CylinderFunction::zero(g), |acc, u| acc.add(&CylinderFunction::indicator(g, u)));
            assert_eq!(sum, CylinderFunction::one(g), "n = {n}, d = {d}");
        }
    }
}

/// `f̃(x) = f̃(y)` once `|x| ≥ depth(f) + k` and `d(x, y) ≤ k`.
#[test]
fn extension_oscillation_vanishes_far_out() {
    let g = FreeGroup::new(2).unwrap();
    let b6 = ball(g, 6);
    let family = depth_two_family(g, 11, 4);
    for k in 0..=2 {
        let moves = ball(g, k);
        for f in &family {
            for x in b6.iter().filter(|x| x.len() >= f.depth() + k) {
                let fx = f.extend(x);
                for delta in &moves {
                    assert_eq!(f.extend(&x.mul(delta)), fx, "f = {f}, x = {x}, step {delta}");
                }
            }
        }
    }
}

#[test]
fn translation_is_a_star_automorphism() {
    let g = FreeGroup::new(2).unwrap();
    let family = depth_two_family(g, 3, 2);
    for gamma in ball(g, 2) {
        for f in &family {
            let tf = f.translate(&gamma);
            assert_eq!(f.star().translate(&gamma), tf.star());
            for h in &family {
                assert_eq!(f.mul(h).translate(&gamma), tf.mul(&h.translate(&gamma)));
                assert_eq!(f.add(h).translate(&gamma), tf.add(&h.translate(&gamma)));
            }
        }
    }
}

fn table(g: FreeGroup) -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(-1i64..=1, g.sphere(2).len())
}

proptest! {
    /// Equal as functions exactly when the canonical forms coincide.
    #[test]
    fn canonical_forms_are_unique(a in table(FreeGroup::new(2).unwrap()), b in table(FreeGroup::new(2).unwrap())) {
        let g = FreeGroup::new(2).unwrap();
        let cells = g.sphere(2);
        let build = |vals: &[i64]| {
            CylinderFunction::from_fn(g, 2, |u| Scalar::from(vals[cells.iter().position(|c| c == u).unwrap()]))
        };
        let (f, h) = (build(&a), build(&b));
        prop_assert_eq!(f == h, a == b);
        // Refining and re-reading the table gives back the same canonical form.
        let refined = f.refine(3, &Limits::default()).unwrap().canonicalize();
        prop_assert_eq!(&refined, &f);
        prop_assert!(f.depth() <= 2);
        let json = f.to_json();
        prop_assert_eq!(CylinderFunction::from_json(g, &json).unwrap(), f);
    }
}
