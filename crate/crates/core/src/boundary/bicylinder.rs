use std::fmt;

use serde_json::{json, Value};

use super::tree::{self, Node};
use super::{CylinderFunction, PointwiseOp};
use crate::error::{Error, Result};
use crate::free_group::{BoundaryPoint, FreeGroup, Letter, ReducedWord};
use crate::scalar::Scalar;

/// A locally constant function on `∂F_n × ∂F_n`.
///
/// Stored as a cylinder trie in the first variable whose leaves are cylinder tries in the second
/// variable; both levels are canonical, so equality of functions is structural equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BiCylinderFunction {
    group: FreeGroup,
    root: Node<Node<Scalar>>,
}

impl BiCylinderFunction {
    fn from_node(group: FreeGroup, root: Node<Node<Scalar>>) -> Self {
        BiCylinderFunction { group, root }
    }

    pub fn constant(group: FreeGroup, c: Scalar) -> Self {
        Self::from_node(group, Node::Leaf(Node::Leaf(c)))
    }

    pub fn zero(group: FreeGroup) -> Self {
        Self::constant(group, Scalar::zero())
    }

    pub fn one(group: FreeGroup) -> Self {
        Self::constant(group, Scalar::one())
    }

    /// `(f ⊗ g)(a, b) = f(a) g(b)`.
    pub fn tensor(f: &CylinderFunction, g: &CylinderFunction) -> Self {
        let inner = g.node();
        let root = f.node().map(&|v| {
            if v.is_zero() {
                Node::Leaf(Scalar::zero())
            } else {
                inner.map(&|w| v * w)
            }
        });
        Self::from_node(f.group(), root)
    }

    /// Builds the function with value `value(u, v)` on each block `C_u × C_v` at the given depths.
    pub fn from_fn(
        group: FreeGroup,
        depths: (usize, usize),
        value: impl Fn(&ReducedWord, &ReducedWord) -> Scalar,
    ) -> Self {
        let root = tree::build(&group, &ReducedWord::identity(), &mut |u| {
            (u.len() == depths.0).then(|| {
                Node::Leaf(CylinderFunction::from_fn(group, depths.1, |v| value(u, v)).node().clone())
            })
        });
        Self::from_node(group, root)
    }

    pub fn group(&self) -> FreeGroup {
        self.group
    }

    /// Minimal depths `(d₁, d₂)` at which the function is constant on every block.
    pub fn depths(&self) -> (usize, usize) {
        let mut d2 = 0;
        self.root
            .for_each_leaf(&self.group, &mut |_, h| d2 = d2.max(h.depth()));
        (self.root.depth(), d2)
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.root, Node::Leaf(Node::Leaf(v)) if v.is_zero())
    }

    pub fn eval(&self, a: &BoundaryPoint, b: &BoundaryPoint) -> Scalar {
        self.root
            .eval_stream(a.stream())
            .eval_stream(b.stream())
            .clone()
    }

    /// Value on the block `C_u × C_v` when the function is constant there.
    pub fn value_on(&self, u: &ReducedWord, v: &ReducedWord) -> Option<&Scalar> {
        self.root.leaf_at(u)?.leaf_at(v)
    }

    pub fn pointwise(&self, op: PointwiseOp, other: &Self) -> Self {
        let g = self.group;
        let f = |x: &Scalar, y: &Scalar| match op {
            PointwiseOp::Add => x + y,
            PointwiseOp::Sub => x - y,
            PointwiseOp::Mul => x * y,
        };
        let root = tree::zip(&g, None, &self.root, &other.root, &|p, q| {
            tree::zip(&g, None, p, q, &f)
        });
        Self::from_node(g, root)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.pointwise(PointwiseOp::Add, other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.pointwise(PointwiseOp::Sub, other)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.pointwise(PointwiseOp::Mul, other)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self::from_node(self.group, self.root.map(&|h| h.map(&|v| c * v)))
    }

    pub fn neg(&self) -> Self {
        Self::from_node(self.group, self.root.map(&|h| h.map(&|v| -v)))
    }

    pub fn star(&self) -> Self {
        Self::from_node(self.group, self.root.map(&|h| h.map(&Scalar::conj)))
    }

    /// `(a, b) ↦ F(γ⁻¹ a, δ⁻¹ b)`.
    pub fn translate_pair(&self, gamma: &ReducedWord, delta: &ReducedWord) -> Self {
        let g = self.group;
        let outer = tree::translate(&g, &self.root, gamma);
        let root = if delta.is_identity() {
            outer
        } else {
            outer.map(&|h| tree::translate(&g, h, delta))
        };
        Self::from_node(g, root)
    }

    /// The diagonal action `(a, b) ↦ F(γ⁻¹ a, γ⁻¹ b)`.
    pub fn translate(&self, gamma: &ReducedWord) -> Self {
        self.translate_pair(gamma, gamma)
    }

    /// `(a, b) ↦ F(b, a)`.
    pub fn flip(&self) -> Self {
        let g = self.group;
        let (_, d2) = self.depths();
        let root = tree::build(&g, &ReducedWord::identity(), &mut |v| {
            (v.len() == d2).then(|| {
                let slice = self.root.map(&|h| h.leaf_at(v).cloned().expect("depth reached"));
                Node::Leaf(slice)
            })
        });
        // Canonicalize: leaves are whole tries, so equal siblings merge only via `branch`.
        Self::from_node(g, root)
    }

    /// The function `a ↦ F(a, a)`.
    pub fn diagonal(&self) -> CylinderFunction {
        fn go(g: &FreeGroup, node: &Node<Node<Scalar>>, prefix: &ReducedWord) -> Node<Scalar> {
            match node {
                Node::Leaf(h) => h.at_word(prefix).clone(),
                Node::Branch(ch) => Node::branch(
                    ch.iter()
                        .zip(g.continuations(prefix.last()))
                        .map(|(c, l)| go(g, c, &prefix.extended(l)))
                        .collect(),
                ),
            }
        }
        CylinderFunction::from_node(self.group, go(&self.group, &self.root, &ReducedWord::identity()))
    }

    /// True iff every diagonal block `C_u × C_u` at the common depth carries the value 0, i.e.
    /// the function is compactly supported off the diagonal.
    pub fn vanishes_on_diagonal(&self) -> bool {
        self.diagonal().is_zero()
    }

    /// `b ↦ F(b, c)`.
    pub fn section_second(&self, c: &BoundaryPoint) -> CylinderFunction {
        let node = self.root.map(&|h| h.eval_stream(c.stream()).clone());
        CylinderFunction::from_node(self.group, node)
    }

    /// `b ↦ F(a, b)`.
    pub fn section_first(&self, a: &BoundaryPoint) -> CylinderFunction {
        CylinderFunction::from_node(self.group, self.root.eval_stream(a.stream()).clone())
    }

    fn require_off_diagonal(&self) -> Result<()> {
        if self.vanishes_on_diagonal() {
            Ok(())
        } else {
            Err(Error::domain("not compactly supported off the diagonal"))
        }
    }

    /// Extension of the second slot to a group element `y`, as a function of the first slot.
    ///
    /// `F̃(b, y) = F(b, c)` where `c` is the point of `C_y` that leaves `b` as early as possible:
    /// after `y` it takes the least letter differing from `b`'s next letter (when `b ∈ C_y`), then
    /// continues by least letters. For `|y|` at least the second depth this is just the block
    /// value at `y`; inside that ball it is the unique choice that keeps `F̃` continuous on
    /// `∂F_n × (F_n ∪ ∂F_n)` for every `F` vanishing on the diagonal, and it is linear and
    /// multiplicative in `F`. For `F = χ_γ ⊗ (1 − χ_γ)` it gives `χ_γ ⊗ (1 − χ̃_γ)`.
    pub fn extend_second(&self, y: &ReducedWord) -> Result<CylinderFunction> {
        self.require_off_diagonal()?;
        Ok(self.extend_second_unchecked(y))
    }

    pub(crate) fn extend_second_unchecked(&self, y: &ReducedWord) -> CylinderFunction {
        let g = self.group;
        let section = |avoid: Option<Letter>| self.section_second(&branch_point(&g, y, avoid));
        let default = section(None);
        let mut per_letter: Vec<Option<CylinderFunction>> = vec![None; g.degree()];
        let root = tree::build(&g, &ReducedWord::identity(), &mut |w| {
            if !(w.is_initial(y) || y.is_initial(w)) {
                return Some(default.node().at_word(w).clone());
            }
            if w.len() == y.len() + 1 {
                let l = w.last().expect("nonempty");
                let s = per_letter[l.code()].get_or_insert_with(|| section(Some(l)));
                return Some(s.node().at_word(w).clone());
            }
            None
        });
        CylinderFunction::from_node(g, root)
    }

    /// `F̃′(·, x) = F̃(x⁻¹ ·, x⁻¹)` as a cylinder function of the boundary variable.
    pub fn f_prime(&self, x: &ReducedWord) -> Result<CylinderFunction> {
        self.require_off_diagonal()?;
        Ok(self.f_prime_unchecked(x))
    }

    pub(crate) fn f_prime_unchecked(&self, x: &ReducedWord) -> CylinderFunction {
        self.extend_second_unchecked(&x.inverse()).translate(x)
    }

    pub fn to_json(&self) -> Value {
        let (d1, d2) = self.depths();
        let mut values = serde_json::Map::new();
        for u in self.group.sphere(d1) {
            for v in self.group.sphere(d2) {
                let x = self.value_on(&u, &v).expect("depth reached");
                values.insert(format!("{u},{v}"), json!(x.to_parts()));
            }
        }
        json!({ "depths": [d1, d2], "values": values })
    }
}

/// `y · ℓ · m · m · ...` with `ℓ` the least continuation of `y` other than `avoid`, and `m` the
/// least continuation of `ℓ` (which is then also its own least continuation).
fn branch_point(g: &FreeGroup, y: &ReducedWord, avoid: Option<Letter>) -> BoundaryPoint {
    let l = g
        .continuations(y.last())
        .find(|&l| Some(l) != avoid)
        .expect("degree is at least 4");
    let m = g.continuations(Some(l)).next().expect("nonempty");
    BoundaryPoint::new(&y.extended(l), &ReducedWord::letter(m)).expect("reduced by construction")
}

impl fmt::Display for BiCylinderFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        self.root.for_each_leaf(&self.group, &mut |u, h| {
            let inner = CylinderFunction::from_node(self.group, h.clone());
            if !inner.is_zero() {
                let outer = if u.is_identity() {
                    "1".to_string()
                } else {
                    format!("chi({u})")
                };
                terms.push(format!("tensor({outer}, {inner})"));
            }
        });
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl fmt::Debug for BiCylinderFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}
