//! The Cayley-tree Fredholm module: the vertex-to-edge operator `b`, the boundary-parameterized
//! unitaries `U_a`, the field `W_a = U_a b`, and its fiberwise action on boundary functions.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::boundary::{chi, CylinderFunction};
use crate::error::{Error, Result};
use crate::free_group::{reduce, BoundaryPoint, FreeGroup, ReducedWord};
use crate::limits::Limits;
use crate::operator::{exact_index, Basis, IndexReport, Label, Spread, SupportCertificate, TruncatedOperator};
use crate::scalar::Scalar;

/// A geometric edge `{x′, x}`, keyed by the endpoint `x` farther from `e`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Edge {
    far: ReducedWord,
}

impl Edge {
    /// The edge joining two adjacent vertices.
    pub fn between(x: &ReducedWord, y: &ReducedWord) -> Result<Edge> {
        if x.distance(y) != 1 {
            return Err(Error::domain(format!("{x} and {y} are not adjacent")));
        }
        let far = if x.len() > y.len() { x } else { y };
        Ok(Edge { far: far.clone() })
    }

    pub fn far(&self) -> &ReducedWord {
        &self.far
    }

    pub fn near(&self) -> ReducedWord {
        self.far.parent().expect("edges have a nonidentity far endpoint")
    }

    /// `γ·{x′, x} = {γx′, γx}`.
    pub fn translate(&self, gamma: &ReducedWord) -> Edge {
        Edge::between(&gamma.mul(&self.near()), &gamma.mul(&self.far)).expect("translation is an isometry")
    }

    pub fn label(&self) -> Label {
        Label::Edge(self.far.clone())
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.near(), self.far)
    }
}

/// `s(x)`, the edge from `x` to its parent.
pub fn edge_s(x: &ReducedWord) -> Result<Edge> {
    if x.is_identity() {
        return Err(Error::domain("origin has no parent edge"));
    }
    Ok(Edge { far: x.clone() })
}

/// A boundary point known through a finite prefix of its stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RayContext {
    prefix: ReducedWord,
}

impl RayContext {
    pub fn from_point(a: &BoundaryPoint, depth: usize) -> Self {
        RayContext { prefix: a.prefix(depth) }
    }

    pub fn from_prefix(prefix: ReducedWord) -> Self {
        RayContext { prefix }
    }

    pub fn depth(&self) -> usize {
        self.prefix.len()
    }

    pub fn prefix(&self) -> &ReducedWord {
        &self.prefix
    }

    fn require(&self, depth: usize) -> Result<()> {
        if self.depth() < depth {
            return Err(Error::domain(format!(
                "ray known to depth {} but depth {depth} is needed",
                self.depth()
            )));
        }
        Ok(())
    }

    /// `x ∈ [e, a)`; requires `|x| ≤ depth`.
    fn on_ray(&self, x: &ReducedWord) -> bool {
        debug_assert!(x.len() <= self.depth());
        x.is_initial(&self.prefix)
    }

    /// Busemann function `β_a(x) = lim d(x, r(t)) − t`, i.e. `|x| − 2 (x · a)`.
    fn busemann(&self, x: &ReducedWord) -> i64 {
        x.len() as i64 - 2 * x.common_prefix_len(&self.prefix) as i64
    }

    /// The ray `γ·a`, known to a possibly shorter depth.
    pub fn act(&self, gamma: &ReducedWord) -> Result<RayContext> {
        if gamma.len() >= self.depth() {
            return Err(Error::domain("ray too short to translate"));
        }
        let moved = gamma.mul(&self.prefix);
        let keep = self.depth() - gamma.len();
        Ok(RayContext {
            prefix: moved.prefix(keep.min(moved.len())),
        })
    }
}

fn limits() -> Limits {
    Limits::from_env()
}

/// `b e_x = e_{s(x)}` for `x ≠ e`, `b e_e = 0`.
pub fn op_b(group: FreeGroup, radius: usize) -> Result<TruncatedOperator> {
    let v = Basis::vertices(group, radius, &limits())?;
    let e = Basis::edges(group, radius, &limits())?;
    Ok(TruncatedOperator::from_exact_columns(v, e, Spread::symmetric(0, None), |x| {
        match edge_s(x.word()) {
            Ok(s) => vec![(s.label(), Scalar::one())],
            Err(_) => vec![],
        }
    }))
}

/// `γ b γ⁻¹ − b`, with `γ` acting on vertices and edges by left translation.
pub fn equivariance_defect_operator(group: FreeGroup, gamma: &ReducedWord, radius: usize) -> Result<TruncatedOperator> {
    if gamma.len() + 1 > radius {
        return Err(Error::Resource {
            what: "truncation radius for the equivariance defect",
            requested: gamma.len() + 1,
            limit: radius,
        });
    }
    let v = Basis::vertices(group, radius, &limits())?;
    let e = Basis::edges(group, radius, &limits())?;
    let inv = gamma.inverse();
    Ok(TruncatedOperator::from_exact_columns(v, e, Spread::symmetric(gamma.len(), None), |x| {
        let mut col = Vec::new();
        if let Ok(s) = edge_s(&inv.mul(x.word())) {
            col.push((s.translate(gamma).label(), Scalar::one()));
        }
        if let Ok(s) = edge_s(x.word()) {
            col.push((s.label(), Scalar::from(-1)));
        }
        col
    }))
}

/// Rank and location of `γ b γ⁻¹ − b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DefectCertificate {
    pub gamma: ReducedWord,
    pub support: SupportCertificate,
    /// Largest distance from a vertex or edge endpoint in the support to the geodesic `[e, γ]`.
    pub distance_to_geodesic: usize,
    pub pass: bool,
}

fn distance_to_segment(x: &ReducedWord, gamma: &ReducedWord) -> usize {
    // The nearest point of [e, γ] is the longest common prefix.
    x.len() - x.common_prefix_len(gamma)
}

pub fn equivariance_defect(group: FreeGroup, gamma: &ReducedWord, radius: usize) -> Result<DefectCertificate> {
    let t = equivariance_defect_operator(group, gamma, radius)?;
    let support = t.support_certificate(format!("{gamma} b {gamma}^-1 - b"));
    let distance_to_geodesic = t
        .certified_entries()
        .iter()
        .flat_map(|(y, x, _)| {
            let edge_near = y.word().parent().unwrap_or_else(ReducedWord::identity);
            [
                distance_to_segment(x.word(), gamma),
                distance_to_segment(y.word(), gamma),
                distance_to_segment(&edge_near, gamma),
            ]
        })
        .max()
        .unwrap_or(0);
    let pass = support.rank <= gamma.len() && distance_to_geodesic == 0;
    Ok(DefectCertificate {
        gamma: gamma.clone(),
        support,
        distance_to_geodesic,
        pass,
    })
}

/// `U_a e_s = e_x` with `x` the endpoint of `s` farther from `a`, decided by the Busemann
/// function of `a`.
pub fn op_u(group: FreeGroup, a: &RayContext, radius: usize) -> Result<TruncatedOperator> {
    a.require(radius + 1)?;
    let v = Basis::vertices(group, radius, &limits())?;
    let e = Basis::edges(group, radius, &limits())?;
    let spread = Spread {
        growth: 0,
        shrink: 1,
        propagation: None,
    };
    Ok(TruncatedOperator::from_exact_columns(e, v, spread, |s| {
        let far = s.word();
        let near = far.parent().expect("edge");
        let x = if a.busemann(far) > a.busemann(&near) { far.clone() } else { near };
        vec![(Label::Vertex(x), Scalar::one())]
    }))
}

/// Closed form of `W_a`: `e_e ↦ 0`, `e_x ↦ e_{x′}` on the ray `[e, a)`, `e_x ↦ e_x` elsewhere.
pub fn op_w(group: FreeGroup, a: &RayContext, radius: usize) -> Result<TruncatedOperator> {
    a.require(radius + 1)?;
    let v = Basis::vertices(group, radius, &limits())?;
    let spread = Spread {
        growth: 0,
        shrink: 1,
        propagation: Some(1),
    };
    Ok(TruncatedOperator::from_exact_columns(v.clone(), v, spread, |x| {
        w_column(a, x.word())
    }))
}

fn w_column(a: &RayContext, x: &ReducedWord) -> Vec<(Label, Scalar)> {
    match x.parent() {
        None => vec![],
        Some(p) if a.on_ray(x) => vec![(Label::Vertex(p), Scalar::one())],
        Some(_) => vec![(Label::Vertex(x.clone()), Scalar::one())],
    }
}

/// `W_a = U_a b`.
pub fn op_w_composed(group: FreeGroup, a: &RayContext, radius: usize) -> Result<TruncatedOperator> {
    op_u(group, a, radius)?.compose(&op_b(group, radius)?)
}

/// Comparison of the two constructions of `W_a`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WAgreement {
    pub ray: ReducedWord,
    pub radius: usize,
    pub first_difference: Option<String>,
}

pub fn compare_w(group: FreeGroup, a: &RayContext, radius: usize) -> Result<WAgreement> {
    let closed = op_w(group, a, radius)?;
    let composed = op_w_composed(group, a, radius)?;
    Ok(WAgreement {
        ray: a.prefix().clone(),
        radius,
        first_difference: closed.first_interior_difference(&composed)?.map(|l| l.to_string()),
    })
}

/// Index at radius `R` computed on `B_{R−1}`, checked against the same computation at `R + 1`.
pub fn stable_index(build: impl Fn(usize) -> Result<TruncatedOperator>, radius: usize) -> Result<IndexReport> {
    if radius == 0 {
        return Err(Error::domain("index needs radius at least 1"));
    }
    let here = exact_index(&build(radius)?, radius - 1)?;
    let next = exact_index(&build(radius + 1)?, radius)?;
    if here.index != next.index {
        return Err(Error::Invariant(format!(
            "index changed from {} to {} between radius {radius} and {}",
            here.index,
            next.index,
            radius + 1
        )));
    }
    Ok(here)
}

pub fn index_b(group: FreeGroup, radius: usize) -> Result<IndexReport> {
    stable_index(|r| op_b(group, r), radius)
}

pub fn index_w(group: FreeGroup, a: &BoundaryPoint, radius: usize) -> Result<IndexReport> {
    stable_index(|r| op_w(group, &RayContext::from_point(a, r + 1), r), radius)
}

/// `γ W_{γ⁻¹a} γ⁻¹ − W_a` on vertices.
pub fn w_equivariance_defect(
    group: FreeGroup,
    a: &RayContext,
    gamma: &ReducedWord,
    radius: usize,
) -> Result<SupportCertificate> {
    a.require(radius + 2 * gamma.len() + 1)?;
    let moved = a.act(&gamma.inverse())?;
    let v = Basis::vertices(group, radius, &limits())?;
    let inv = gamma.inverse();
    let spread = Spread {
        growth: gamma.len(),
        shrink: gamma.len() + 1,
        propagation: None,
    };
    let t = TruncatedOperator::from_exact_columns(v.clone(), v, spread, |x| {
        let mut col: Vec<(Label, Scalar)> = w_column(&moved, &inv.mul(x.word()))
            .into_iter()
            .map(|(y, s)| (Label::Vertex(gamma.mul(y.word())), s))
            .collect();
        col.extend(w_column(a, x.word()).into_iter().map(|(y, s)| (y, -s)));
        col
    });
    let mut cert = t.support_certificate(format!("{gamma} W {gamma}^-1 - W"));
    // Support lies within |γ| of the geodesic [e, γ].
    cert.pass = t.certified_entries().iter().all(|(y, x, _)| {
        distance_to_segment(x.word(), gamma) <= gamma.len()
            && distance_to_segment(y.word(), gamma) <= gamma.len()
    });
    Ok(cert)
}

/// Local constancy of `a ↦ W_a e_x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalConstancy {
    pub x: ReducedWord,
    /// Number of depth-`|x|` cylinders swept.
    pub cylinders: usize,
    /// Rays sampled per cylinder.
    pub rays_per_cylinder: usize,
    /// First cylinder on which two rays gave different columns.
    pub violation: Option<ReducedWord>,
}

impl LocalConstancy {
    pub fn pass(&self) -> bool {
        self.violation.is_none()
    }
}

/// Sweeps all cylinders of depth `|x|`; in each, compares the column `U_a b e_x` over every ray
/// continuing the cylinder for `extra` more letters.
pub fn w_local_constancy(group: FreeGroup, x: &ReducedWord, extra: usize) -> Result<LocalConstancy> {
    let radius = x.len().max(1);
    let cylinders = group.sphere(x.len());
    let mut rays_per_cylinder = 0;
    for u in &cylinders {
        let rays: Vec<ReducedWord> = continuations(group, u, extra + radius + 1 - u.len());
        rays_per_cylinder = rays.len();
        let mut columns = rays.iter().map(|p| -> Result<Vec<(Label, Scalar)>> {
            let a = RayContext::from_prefix(p.clone());
            Ok(op_w_composed(group, &a, radius)?.apply_label(&Label::Vertex(x.clone())))
        });
        let first = columns.next().expect("at least one ray")?;
        for c in columns {
            if c? != first {
                return Ok(LocalConstancy {
                    x: x.clone(),
                    cylinders: cylinders.len(),
                    rays_per_cylinder,
                    violation: Some(u.clone()),
                });
            }
        }
    }
    Ok(LocalConstancy {
        x: x.clone(),
        cylinders: cylinders.len(),
        rays_per_cylinder,
        violation: None,
    })
}

fn continuations(group: FreeGroup, u: &ReducedWord, extra: usize) -> Vec<ReducedWord> {
    let mut layer = vec![u.clone()];
    for _ in 0..extra {
        layer = layer
            .iter()
            .flat_map(|w| group.continuations(w.last()).map(move |l| w.extended(l)))
            .collect();
    }
    layer
}

/// A finitely supported family `g ↦ ξ_g` of boundary functions, i.e. an element of
/// `C(∂F_n) ⊗ ℓ²F_n`.
pub type FunctionFamily = BTreeMap<ReducedWord, CylinderFunction>;

/// `(Wξ)(a) = W_a(ξ(a))`: for `g ≠ e`, `ξ_g` contributes `χ_g ξ_g` at `g′` and `(1 − χ_g) ξ_g` at
/// `g`; the fiber `g = e` is killed.
pub fn wbar_column(group: FreeGroup, xi: &FunctionFamily) -> FunctionFamily {
    let mut out = FunctionFamily::new();
    let mut put = |g: ReducedWord, f: CylinderFunction| {
        if f.is_zero() {
            return;
        }
        let sum = match out.remove(&g) {
            Some(prev) => prev.add(&f),
            None => f,
        };
        if !sum.is_zero() {
            out.insert(g, sum);
        }
    };
    for (g, f) in xi {
        let Some(parent) = g.parent() else { continue };
        let c = chi(group, g).expect("g is not the identity");
        put(parent, c.mul(f));
        put(g.clone(), CylinderFunction::one(group).sub(&c).mul(f));
    }
    out
}

/// `W_a` applied to a family by evaluating every fiber at the point `a`. Used as an oracle for
/// [`wbar_column`].
pub fn w_at_point(a: &BoundaryPoint, xi: &FunctionFamily) -> BTreeMap<ReducedWord, Scalar> {
    let mut out: BTreeMap<ReducedWord, Scalar> = BTreeMap::new();
    let depth = xi.keys().map(ReducedWord::len).max().unwrap_or(0) + 1;
    let ray = RayContext::from_point(a, depth);
    for (g, f) in xi {
        for (y, s) in w_column(&ray, g) {
            let e = out.entry(y.word().clone()).or_insert_with(Scalar::zero);
            *e += &(&s * &f.eval(a));
        }
    }
    out.retain(|_, s| !s.is_zero());
    out
}

/// Reduces a letter sequence, for building rays from text in tests and tools.
pub fn ray_from_letters(s: &str) -> Result<RayContext> {
    let letters = crate::free_group::parse_letters(s)?;
    Ok(RayContext::from_prefix(reduce(letters)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::{point, word};

    fn g2() -> FreeGroup {
        FreeGroup::new(2).unwrap()
    }

    #[test]
    fn parent_edges() {
        assert_eq!(edge_s(&word("a")).unwrap().to_string(), "{1,a}");
        assert_eq!(edge_s(&word("ab")).unwrap().to_string(), "{a,ab}");
        assert!(edge_s(&word("")).unwrap_err().to_string().contains("origin has no parent edge"));
    }

    #[test]
    fn parent_edge_map_is_a_bijection() {
        let g = g2();
        for r in 1..=4 {
            let ball = g.ball_unchecked(r);
            let edges: std::collections::BTreeSet<Edge> =
                ball.iter().filter(|x| !x.is_identity()).map(|x| edge_s(x).unwrap()).collect();
            assert_eq!(edges.len(), ball.len() - 1);
            assert_eq!(edges.len(), Basis::edges(g, r, &Limits::default()).unwrap().len());
        }
    }

    #[test]
    fn b_is_an_isometry_off_the_origin() {
        let g = g2();
        for r in 2..=5 {
            let b = op_b(g, r).unwrap();
            assert!(b.apply_label(&Label::Vertex(word(""))).is_empty());
            let bsb = b.adjoint().compose(&b).unwrap();
            let id = TruncatedOperator::identity(b.domain().clone());
            let p = TruncatedOperator::diagonal(b.domain().clone(), |x| {
                if x.word().is_identity() { Scalar::one() } else { Scalar::zero() }
            });
            assert!(bsb.add(&p).unwrap().agrees_on_interior(&id).unwrap());
            let bbs = b.compose(&b.adjoint()).unwrap();
            assert!(bbs.agrees_on_interior(&TruncatedOperator::identity(b.codomain().clone())).unwrap());
        }
    }

    #[test]
    fn index_of_b() {
        for r in 3..=5 {
            let rep = index_b(g2(), r).unwrap();
            assert_eq!((rep.kernel, rep.cokernel, rep.index), (1, 0, 1));
        }
    }

    #[test]
    fn defect_of_a_generator() {
        let g = g2();
        let c = equivariance_defect(g, &word("a"), 3).unwrap();
        assert_eq!(c.support.rank, 1);
        assert!(c.pass);
        let t = equivariance_defect_operator(g, &word("a"), 3).unwrap();
        let edge = Label::Edge(word("a"));
        assert_eq!(t.entry(&edge, &Label::Vertex(word(""))), Scalar::one());
        assert_eq!(t.entry(&edge, &Label::Vertex(word("a"))), Scalar::from(-1));
        let zero = equivariance_defect(g, &word(""), 3).unwrap();
        assert_eq!(zero.support.support_radius, None);
    }

    #[test]
    fn defect_rank_is_at_most_length() {
        let g = g2();
        for gamma in g.ball_unchecked(3) {
            let c = equivariance_defect(g, &gamma, 5).unwrap();
            assert!(c.pass, "{gamma}: {c:?}");
            assert_eq!(c.support.rank, gamma.len());
        }
    }

    #[test]
    fn w_display_values() {
        let g = g2();
        let a = RayContext::from_point(&point("(ab)"), 6);
        let w = op_w(g, &a, 4).unwrap();
        assert_eq!(w.apply_label(&Label::Vertex(word("a"))), vec![(Label::Vertex(word("")), Scalar::one())]);
        assert_eq!(w.apply_label(&Label::Vertex(word("b"))), vec![(Label::Vertex(word("b")), Scalar::one())]);
        assert!(w.apply_label(&Label::Vertex(word(""))).is_empty());
    }

    #[test]
    fn two_constructions_of_w_agree() {
        let g = g2();
        for p in g.periodic_points(1, 2) {
            let a = RayContext::from_point(&p, 5);
            assert_eq!(compare_w(g, &a, 4).unwrap().first_difference, None, "{p}");
        }
    }

    #[test]
    fn ray_depth_is_checked() {
        let a = RayContext::from_point(&point("(a)"), 3);
        assert!(op_w(g2(), &a, 4).is_err());
    }

    #[test]
    fn index_of_w() {
        for p in ["(ab)", "(B)", "a(Ba)"] {
            for r in 3..=5 {
                assert_eq!(index_w(g2(), &point(p), r).unwrap().index, 1);
            }
        }
    }

    #[test]
    fn w_is_locally_constant() {
        let g = g2();
        for x in g.ball_unchecked(3) {
            let c = w_local_constancy(g, &x, 1).unwrap();
            assert!(c.pass(), "{x}");
        }
    }

    #[test]
    fn w_equivariance() {
        let g = g2();
        let a = RayContext::from_point(&point("a(bA)"), 12);
        for gamma in g.ball_unchecked(2) {
            let c = w_equivariance_defect(g, &a, &gamma, 5).unwrap();
            assert!(c.pass, "{gamma}: {c:?}");
        }
    }

    #[test]
    fn wbar_display_cases() {
        let g = g2();
        let one = CylinderFunction::one(g);
        let chi_a = chi(g, &word("a")).unwrap();
        let out = wbar_column(g, &FunctionFamily::from([(word("a"), one.clone())]));
        assert_eq!(out[&word("")], chi_a);
        assert_eq!(out[&word("a")], one.sub(&chi_a));
        assert!(wbar_column(g, &FunctionFamily::from([(word(""), one)])).is_empty());
    }

    #[test]
    fn wbar_matches_pointwise_w() {
        let g = g2();
        let xi = FunctionFamily::from([
            (word(""), chi(g, &word("b")).unwrap()),
            (word("a"), CylinderFunction::one(g)),
            (word("ab"), chi(g, &word("aB")).unwrap().scale(&Scalar::from(3))),
            (word("B"), chi(g, &word("Ba")).unwrap()),
        ]);
        let out = wbar_column(g, &xi);
        for a in g.periodic_points(1, 2) {
            let at: BTreeMap<ReducedWord, Scalar> = out
                .iter()
                .map(|(k, f)| (k.clone(), f.eval(&a)))
                .filter(|(_, s)| !s.is_zero())
                .collect();
            assert_eq!(at, w_at_point(&a, &xi), "{a}");
        }
    }
}
