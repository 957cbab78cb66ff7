use bdl_core::free_group::{ray_geodesic, reduce, Letter};
use bdl_core::{FreeGroup, Limits, ReducedWord};
use proptest::prelude::*;

fn ball(g: FreeGroup, r: usize) -> Vec<ReducedWord> {
    g.ball(r, &Limits::default()).unwrap()
}

#[test]
fn reduction_is_idempotent_and_multiplication_associative_on_b3() {
    let g = FreeGroup::new(2).unwrap();
    let b = ball(g, 3);
    for x in &b {
        assert_eq!(&reduce(x.letters().iter().copied()), x);
        for y in &b {
            let xy = x.mul(y);
            for z in &b {
                assert_eq!(xy.mul(z), x.mul(&y.mul(z)));
            }
        }
    }
}

#[test]
fn metric_is_left_invariant_on_b3() {
    let g = FreeGroup::new(2).unwrap();
    let b = ball(g, 3);
    for x in &b {
        for y in &b {
            let d = x.distance(y);
            for gamma in &b {
                assert_eq!(gamma.mul(x).distance(&gamma.mul(y)), d);
            }
        }
    }
}

#[test]
fn right_translation_moves_points_at_most_gamma() {
    let g = FreeGroup::new(2).unwrap();
    let b4 = ball(g, 4);
    for x in &b4 {
        for gamma in &b4 {
            assert!(x.distance(&x.mul(&gamma.inverse())) <= gamma.len());
        }
    }
}

#[test]
fn every_vertex_but_the_origin_has_one_parent() {
    for n in [2, 3] {
        let g = FreeGroup::new(n).unwrap();
        for x in ball(g, 4) {
            let neighbours: Vec<ReducedWord> = g.letters().map(|l| x.mul(&ReducedWord::letter(l))).collect();
            let closer = neighbours.iter().filter(|y| y.len() + 1 == x.len()).count();
            assert_eq!(closer, usize::from(!x.is_identity()), "{x}");
            assert_eq!(neighbours.len(), 2 * n);
        }
    }
}

/// Away from the depth-`d` diagonal neighbourhood, the geodesic from `y` to `a` meets `B_d`.
#[test]
fn separated_geodesics_meet_the_ball() {
    let g = FreeGroup::new(2).unwrap();
    let points = g.periodic_points(2, 2);
    for d in 0..=3 {
        for y in ball(g, 6) {
            for a in &points {
                if y.len() >= d && y.prefix(d) == a.prefix(d) {
                    continue;
                }
                let path = ray_geodesic(&y, a, 2);
                let closest = path.iter().map(ReducedWord::len).min().unwrap();
                assert!(closest <= d, "y = {y}, a = {a}, d = {d}");
            }
        }
    }
}

fn letters(n: usize) -> impl Strategy<Value = Vec<Letter>> {
    proptest::collection::vec((0..n, any::<bool>()).prop_map(|(g, i)| Letter::new(g, i)), 0..12)
}

proptest! {
    #[test]
    fn group_laws_in_rank_three(x in letters(3), y in letters(3), z in letters(3)) {
        let (x, y, z) = (reduce(x), reduce(y), reduce(z));
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert!(x.mul(&x.inverse()).is_identity());
        prop_assert_eq!(x.mul(&y).inverse(), y.inverse().mul(&x.inverse()));
        prop_assert_eq!(x.to_string().parse::<ReducedWord>().unwrap(), x);
    }
}
