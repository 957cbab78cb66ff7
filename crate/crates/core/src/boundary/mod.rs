//! Locally constant functions on the boundary and on pairs of boundary points.
//!
//! A [`CylinderFunction`] is constant on the cylinders `C_u` (boundary points beginning with the
//! word `u`) of some finite depth. Its extension to group elements, [`CylinderFunction::extend`],
//! reads off the cylinder value for words at least as long as the depth and is `0` on the ball
//! inside it; for an indicator `χ_γ` this is exactly `χ̃_γ(x) = [γ ∈ [e, x]]`.

mod bicylinder;
pub(crate) mod tree;

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::free_group::{BoundaryPoint, FreeGroup, ReducedWord};
use crate::limits::Limits;
use crate::scalar::Scalar;
use tree::Node;

pub use bicylinder::BiCylinderFunction;

/// Pointwise operations shared by one- and two-variable cylinder functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointwiseOp {
    Add,
    Sub,
    Mul,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CylinderFunction {
    group: FreeGroup,
    root: Node<Scalar>,
}

impl CylinderFunction {
    pub(crate) fn from_node(group: FreeGroup, root: Node<Scalar>) -> Self {
        CylinderFunction { group, root }
    }

    pub(crate) fn node(&self) -> &Node<Scalar> {
        &self.root
    }

    pub fn constant(group: FreeGroup, c: Scalar) -> Self {
        Self::from_node(group, Node::Leaf(c))
    }

    pub fn zero(group: FreeGroup) -> Self {
        Self::constant(group, Scalar::zero())
    }

    pub fn one(group: FreeGroup) -> Self {
        Self::constant(group, Scalar::one())
    }

    /// Indicator of the cylinder `C_u`; the constant `1` when `u = e`.
    pub fn indicator(group: FreeGroup, u: &ReducedWord) -> Self {
        let root = tree::build(&group, &ReducedWord::identity(), &mut |w| {
            if !w.is_initial(u) {
                Some(Node::Leaf(Scalar::zero()))
            } else if w.len() == u.len() {
                Some(Node::Leaf(Scalar::one()))
            } else {
                None
            }
        });
        Self::from_node(group, root)
    }

    /// Builds the function whose value on each depth-`depth` cylinder is `value(u)`.
    pub fn from_fn(group: FreeGroup, depth: usize, value: impl Fn(&ReducedWord) -> Scalar) -> Self {
        let root = tree::build(&group, &ReducedWord::identity(), &mut |w| {
            (w.len() == depth).then(|| Node::Leaf(value(w)))
        });
        Self::from_node(group, root)
    }

    pub fn group(&self) -> FreeGroup {
        self.group
    }

    /// Minimal depth at which the function is constant on every cylinder.
    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.root, Node::Leaf(v) if v.is_zero())
    }

    pub fn is_constant(&self) -> Option<&Scalar> {
        match &self.root {
            Node::Leaf(v) => Some(v),
            Node::Branch(_) => None,
        }
    }

    pub fn eval(&self, a: &BoundaryPoint) -> Scalar {
        self.root.eval_stream(a.stream()).clone()
    }

    /// Value on `C_u` when the function is constant there.
    pub fn value_on(&self, u: &ReducedWord) -> Option<&Scalar> {
        self.root.leaf_at(u)
    }

    /// Restriction to the cylinder `C_u`, as a function on the whole boundary that vanishes
    /// off `C_u`.
    pub fn restrict(&self, u: &ReducedWord) -> CylinderFunction {
        self.mul(&CylinderFunction::indicator(self.group, u))
    }

    /// The canonical extension `f̃` to group elements.
    pub fn extend(&self, x: &ReducedWord) -> Scalar {
        if x.len() < self.depth() {
            return Scalar::zero();
        }
        self.root
            .leaf_at(x)
            .cloned()
            .expect("a word at least as long as the depth reaches a leaf")
    }

    pub fn pointwise(&self, op: PointwiseOp, other: &CylinderFunction) -> CylinderFunction {
        debug_assert_eq!(self.group, other.group);
        let root = match op {
            PointwiseOp::Add => tree::zip(&self.group, None, &self.root, &other.root, &|a, b| a + b),
            PointwiseOp::Sub => tree::zip(&self.group, None, &self.root, &other.root, &|a, b| a - b),
            PointwiseOp::Mul => tree::zip(&self.group, None, &self.root, &other.root, &|a, b| a * b),
        };
        Self::from_node(self.group, root)
    }

    pub fn add(&self, other: &CylinderFunction) -> CylinderFunction {
        self.pointwise(PointwiseOp::Add, other)
    }

    pub fn sub(&self, other: &CylinderFunction) -> CylinderFunction {
        self.pointwise(PointwiseOp::Sub, other)
    }

    pub fn mul(&self, other: &CylinderFunction) -> CylinderFunction {
        self.pointwise(PointwiseOp::Mul, other)
    }

    pub fn scale(&self, c: &Scalar) -> CylinderFunction {
        Self::from_node(self.group, self.root.map(&|v| c * v))
    }

    pub fn neg(&self) -> CylinderFunction {
        Self::from_node(self.group, self.root.map(&|v| -v))
    }

    /// Complex conjugation, the involution of C(∂F_n).
    pub fn star(&self) -> CylinderFunction {
        Self::from_node(self.group, self.root.map(&Scalar::conj))
    }

    /// `γ · f`, i.e. `a ↦ f(γ⁻¹ a)`.
    pub fn translate(&self, gamma: &ReducedWord) -> CylinderFunction {
        Self::from_node(self.group, tree::translate(&self.group, &self.root, gamma))
    }

    /// Dense table of values at depth `depth` (at least the function's own depth).
    pub fn refine(&self, depth: usize, limits: &Limits) -> Result<DepthTable> {
        limits.check_depth(depth)?;
        if depth < self.depth() {
            return Err(Error::domain(format!(
                "cannot refine a depth-{} function to depth {depth}",
                self.depth()
            )));
        }
        let values = self
            .group
            .sphere(depth)
            .into_iter()
            .map(|u| {
                let v = self.root.leaf_at(&u).cloned().expect("depth reached");
                (u, v)
            })
            .collect();
        Ok(DepthTable {
            group: self.group,
            depth,
            values,
        })
    }

    /// Canonical leaves: the coarsest cylinders on which the function is constant.
    pub fn leaves(&self) -> Vec<(ReducedWord, Scalar)> {
        self.root.leaves(&self.group)
    }

    pub fn to_json(&self) -> Value {
        // Depth never exceeds the trie height, which construction already bounded.
        let table = self
            .refine(self.depth(), &Limits { max_depth: usize::MAX, ..Limits::default() })
            .expect("own depth is always refinable");
        table.to_json()
    }

    pub fn from_json(group: FreeGroup, value: &Value) -> Result<Self> {
        DepthTable::from_json(group, value).map(|t| t.canonicalize())
    }
}

impl fmt::Display for CylinderFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = self.is_constant() {
            return write!(f, "{c}");
        }
        let terms: Vec<String> = self
            .leaves()
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(u, v)| {
                if v.is_one() {
                    format!("chi({u})")
                } else {
                    format!("({v})*chi({u})")
                }
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl fmt::Debug for CylinderFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// `χ_γ`, the indicator of boundary points whose ray passes through `γ`.
pub fn chi(group: FreeGroup, gamma: &ReducedWord) -> Result<CylinderFunction> {
    if gamma.is_identity() {
        return Err(Error::domain("chi is defined only for nontrivial group elements"));
    }
    Ok(CylinderFunction::indicator(group, gamma))
}

/// `χ̃_γ(x) = 1` iff `γ ∈ [e, x]`.
pub fn chi_tilde(gamma: &ReducedWord, x: &ReducedWord) -> Scalar {
    if gamma.is_initial(x) {
        Scalar::one()
    } else {
        Scalar::zero()
    }
}

/// A cylinder function written out densely at a fixed depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthTable {
    group: FreeGroup,
    depth: usize,
    values: BTreeMap<ReducedWord, Scalar>,
}

impl DepthTable {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn values(&self) -> &BTreeMap<ReducedWord, Scalar> {
        &self.values
    }

    pub fn get(&self, u: &ReducedWord) -> Option<&Scalar> {
        self.values.get(u)
    }

    pub fn canonicalize(&self) -> CylinderFunction {
        CylinderFunction::from_fn(self.group, self.depth, |u| self.values[u].clone())
    }

    pub fn to_json(&self) -> Value {
        let values: serde_json::Map<String, Value> = self
            .values
            .iter()
            .map(|(u, v)| (u.to_string(), json!(v.to_parts())))
            .collect();
        json!({ "depth": self.depth, "values": values })
    }

    pub fn from_json(group: FreeGroup, value: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("depth table: {m}"));
        let depth = value
            .get("depth")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("missing depth"))? as usize;
        Limits::default().check_depth(depth)?;
        let obj = value
            .get("values")
            .and_then(Value::as_object)
            .ok_or_else(|| bad("missing values"))?;
        let mut values = BTreeMap::new();
        for (k, v) in obj {
            let u: ReducedWord = k.parse()?;
            if u.len() != depth || !group.contains(&u) {
                return Err(bad(&format!("word {k:?} does not name a depth-{depth} cylinder")));
            }
            let pair = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad("values are [re, im]"))?;
            let part = |x: &Value| match x {
                Value::String(s) => Ok(s.clone()),
                Value::Number(n) => Ok(n.to_string()),
                _ => Err(bad("components must be strings or integers")),
            };
            values.insert(u, Scalar::from_parts(&part(&pair[0])?, &part(&pair[1])?)?);
        }
        let expected = group.sphere(depth);
        if let Some(missing) = expected.iter().find(|u| !values.contains_key(u)) {
            return Err(bad(&format!("no value for cylinder {missing}")));
        }
        Ok(DepthTable { group, depth, values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::{point, word};

    fn g2() -> FreeGroup {
        FreeGroup::new(2).unwrap()
    }

    fn chi2(u: &str) -> CylinderFunction {
        chi(g2(), &word(u)).unwrap()
    }

    #[test]
    fn refine_constant() {
        let t = CylinderFunction::one(g2()).refine(2, &Limits::default()).unwrap();
        assert_eq!(t.values().len(), 12);
        assert!(t.values().values().all(Scalar::is_one));
    }

    #[test]
    fn refine_indicator_against_prefix_test() {
        let t = chi2("a").refine(2, &Limits::default()).unwrap();
        for (u, v) in t.values() {
            let expected = u.letters()[0] == word("a").letters()[0];
            assert_eq!(v.is_one(), expected, "{u}");
        }
        let ones: Vec<String> = t
            .values()
            .iter()
            .filter(|(_, v)| v.is_one())
            .map(|(u, _)| u.to_string())
            .collect();
        assert_eq!(ones, ["aa", "ab", "aB"]);
        assert_eq!(t.canonicalize(), chi2("a"));
    }

    #[test]
    fn refine_respects_limits() {
        let err = chi2("a").refine(9, &Limits::default()).unwrap_err();
        assert!(matches!(err, Error::Resource { limit: 8, .. }));
    }

    #[test]
    fn pointwise_examples() {
        assert!(chi2("a").mul(&chi2("b")).is_zero());
        let total = chi2("a").add(&chi2("b")).add(&chi2("A")).add(&chi2("B"));
        assert_eq!(total, CylinderFunction::one(g2()));
        assert_eq!(total.depth(), 0);
    }

    #[test]
    fn chi_and_chi_tilde() {
        assert!(chi(g2(), &ReducedWord::identity()).is_err());
        assert!(chi2("a").eval(&point("(ab)")).is_one());
        assert!(chi_tilde(&word("a"), &ReducedWord::identity()).is_zero());
        assert!(chi_tilde(&word("a"), &word("ab")).is_one());
    }

    #[test]
    fn extend_examples() {
        assert!(CylinderFunction::one(g2()).extend(&ReducedWord::identity()).is_one());
        assert!(chi2("a").extend(&word("a")).is_one());
        assert!(chi2("a").extend(&ReducedWord::identity()).is_zero());
    }

    #[test]
    fn translate_identity_and_inverse() {
        let f = chi2("aB").add(&chi2("b").scale(&Scalar::ratio(1, 2)));
        assert_eq!(f.translate(&ReducedWord::identity()), f);
        for g in ["a", "Ab", "bba"] {
            assert_eq!(f.translate(&word(g)).translate(&word(g).inverse()), f);
        }
    }

    #[test]
    fn display_lists_canonical_leaves() {
        let f = CylinderFunction::one(g2()).sub(&chi2("a"));
        assert_eq!(f.to_string(), "chi(A) + chi(b) + chi(B)");
        assert_eq!(CylinderFunction::zero(g2()).to_string(), "0");
    }

    #[test]
    fn json_round_trip() {
        let f = chi2("ab").scale(&Scalar::from_parts("1/3", "2").unwrap());
        let j = f.to_json();
        assert_eq!(j["depth"], 2);
        assert_eq!(j["values"]["ab"], json!(["1/3", "2"]));
        assert_eq!(CylinderFunction::from_json(g2(), &j).unwrap(), f);
    }

    #[test]
    fn json_rejects_incomplete_tables() {
        let j = json!({"depth": 1, "values": {"a": ["1", "0"]}});
        assert!(CylinderFunction::from_json(g2(), &j).is_err());
    }
}
