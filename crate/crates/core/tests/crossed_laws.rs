use bdl_core::crossed::{element_chi, element_v, element_w, Crossed, CrossedElement, PairElement, System, TensorElement};
use bdl_core::{chi, BiCylinderFunction, CylinderFunction, FreeGroup, Limits, ReducedWord, Scalar};

fn group() -> FreeGroup {
    FreeGroup::new(2).unwrap()
}

fn b1(g: FreeGroup) -> Vec<ReducedWord> {
    g.ball(1, &Limits::default()).unwrap()
}

/// `1` and the depth-one indicators.
fn shallow(g: FreeGroup) -> Vec<CylinderFunction> {
    let mut out = vec![CylinderFunction::one(g)];
    out.extend(g.sphere(1).iter().map(|u| chi(g, u).unwrap()));
    out
}

fn boundary_monomials(g: FreeGroup) -> Vec<CrossedElement> {
    let mut out = Vec::new();
    for (i, f) in shallow(g).into_iter().enumerate() {
        for k in b1(g) {
            // Non-real coefficients exercise conjugation in `star`.
            let c = if i % 2 == 0 { Scalar::i() } else { Scalar::from(2) };
            out.push(CrossedElement::monomial(g, k, f.scale(&c)));
        }
    }
    out
}

fn pair_monomials(g: FreeGroup) -> Vec<PairElement> {
    let letters: Vec<_> = g.sphere(1);
    let mut out = Vec::new();
    for u in &letters {
        for v in letters.iter().filter(|v| v != &u) {
            let f = BiCylinderFunction::tensor(&chi(g, u).unwrap(), &chi(g, v).unwrap());
            for k in b1(g) {
                out.push(PairElement::pair_monomial(k, f.clone()).unwrap());
            }
        }
    }
    out
}

fn tensor_monomials(g: FreeGroup) -> Vec<TensorElement> {
    let fs = shallow(g);
    let ks = b1(g);
    let mut out = Vec::new();
    for (i, f) in fs.iter().enumerate() {
        for (j, h) in fs.iter().enumerate() {
            let gamma = &ks[(i + j) % ks.len()];
            let delta = &ks[(2 * i + j) % ks.len()];
            out.push(TensorElement::simple((f, gamma), (h, delta)));
        }
    }
    out
}

fn star_algebra_axioms<S: System>(xs: &[Crossed<S>], triples: usize) {
    for x in xs {
        assert_eq!(x.star().star(), *x);
        for y in xs {
            let xy = x.mul(y);
            assert_eq!(xy.star(), y.star().mul(&x.star()), "x = {x}, y = {y}");
            assert_eq!(x.add(y).star(), x.star().add(&y.star()));
            assert!(xy.check_invariants().is_ok());
        }
    }
    let head = &xs[..triples.min(xs.len())];
    for x in head {
        for y in head {
            let xy = x.mul(y);
            for z in head {
                assert_eq!(xy.mul(z), x.mul(&y.mul(z)), "x = {x}, y = {y}, z = {z}");
                assert_eq!(x.mul(&y.add(z)), xy.add(&x.mul(z)));
            }
        }
    }
}

#[test]
fn boundary_crossed_product_is_a_star_algebra() {
    let g = group();
    let xs = boundary_monomials(g);
    star_algebra_axioms(&xs, xs.len());
    let one = CrossedElement::one(g);
    for x in &xs {
        assert_eq!(one.mul(x), *x);
        assert_eq!(x.mul(&one), *x);
    }
}

#[test]
fn pair_crossed_product_is_a_star_algebra() {
    star_algebra_axioms(&pair_monomials(group()), 24);
}

#[test]
fn tensor_product_is_a_star_algebra() {
    let g = group();
    let xs = tensor_monomials(g);
    star_algebra_axioms(&xs, 15);
    for x in &xs {
        assert_eq!(x.flip_sigma().flip_sigma(), *x);
        assert_eq!(x.flip_sigma().star(), x.star().flip_sigma());
    }
}

#[test]
fn bar_sigma_commutes_with_star() {
    let g = group();
    for xi in [element_v(g), element_chi(g), element_w(g)] {
        assert_eq!(xi.star().bar_sigma(), xi.bar_sigma().star(), "{xi}");
        assert_eq!(xi.bar_sigma().bar_sigma(), xi);
    }
    for xi in pair_monomials(g) {
        assert_eq!(xi.star().bar_sigma(), xi.bar_sigma().star());
    }
}

#[test]
fn inclusion_is_a_star_homomorphism_intertwining_the_flips() {
    let g = group();
    let mut xs = pair_monomials(g);
    xs.extend([element_v(g), element_chi(g), element_w(g)]);
    for x in &xs {
        let ix = x.include_i();
        assert_eq!(x.star().include_i(), ix.star());
        assert_eq!(x.bar_sigma().include_i(), ix.flip_sigma());
        for y in &xs {
            assert_eq!(x.mul(y).include_i(), ix.mul(&y.include_i()), "x = {x}, y = {y}");
        }
    }
}
