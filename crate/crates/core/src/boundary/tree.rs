//! Cylinder tries: locally constant data on the boundary stored along the Cayley tree.
//!
//! The root has one child per letter; any other node sits at a word ending in some letter `ℓ`
//! and has one child per continuation of `ℓ`. Branches whose children are equal leaves are
//! merged, so two tries represent the same function iff they are structurally equal.

use std::sync::Arc;

use crate::free_group::{FreeGroup, Letter, ReducedWord};

#[derive(Clone, PartialEq, Eq, Hash)]
pub(crate) enum Node<T> {
    Leaf(T),
    Branch(Arc<[Node<T>]>),
}

pub(crate) fn child_index(last: Option<Letter>, l: Letter) -> usize {
    match last {
        None => l.code(),
        Some(p) => {
            let banned = p.inverse().code();
            debug_assert_ne!(l.code(), banned);
            if l.code() < banned {
                l.code()
            } else {
                l.code() - 1
            }
        }
    }
}

impl<T: Clone + PartialEq> Node<T> {
    /// Builds a branch, collapsing it to a leaf when every child is the same leaf.
    pub(crate) fn branch(children: Vec<Node<T>>) -> Node<T> {
        if let Some(Node::Leaf(first)) = children.first() {
            if children
                .iter()
                .all(|c| matches!(c, Node::Leaf(v) if v == first))
            {
                return Node::Leaf(first.clone());
            }
        }
        Node::Branch(children.into())
    }

    pub(crate) fn depth(&self) -> usize {
        match self {
            Node::Leaf(_) => 0,
            Node::Branch(ch) => 1 + ch.iter().map(Node::depth).max().unwrap_or(0),
        }
    }

    /// Node reached from this one (sitting after `last`) by following `path`.
    pub(crate) fn subtree(&self, last: Option<Letter>, path: &[Letter]) -> &Node<T> {
        let mut node = self;
        let mut prev = last;
        for &l in path {
            match node {
                Node::Leaf(_) => return node,
                Node::Branch(ch) => {
                    node = &ch[child_index(prev, l)];
                    prev = Some(l);
                }
            }
        }
        node
    }

    pub(crate) fn at_word(&self, w: &ReducedWord) -> &Node<T> {
        self.subtree(None, w.letters())
    }

    /// Leaf hit by following an infinite stream from the root.
    pub(crate) fn eval_stream<I: Iterator<Item = Letter>>(&self, stream: I) -> &T {
        let mut node = self;
        let mut prev = None;
        let mut stream = stream;
        loop {
            match node {
                Node::Leaf(v) => return v,
                Node::Branch(ch) => {
                    let l = stream.next().expect("boundary streams are infinite");
                    node = &ch[child_index(prev, l)];
                    prev = Some(l);
                }
            }
        }
    }

    /// Value if the data is constant on the cylinder of `w`.
    pub(crate) fn leaf_at(&self, w: &ReducedWord) -> Option<&T> {
        match self.at_word(w) {
            Node::Leaf(v) => Some(v),
            Node::Branch(_) => None,
        }
    }

    pub(crate) fn map<U: Clone + PartialEq>(&self, f: &impl Fn(&T) -> U) -> Node<U> {
        match self {
            Node::Leaf(v) => Node::Leaf(f(v)),
            Node::Branch(ch) => Node::branch(ch.iter().map(|c| c.map(f)).collect()),
        }
    }

    /// Visits every leaf together with the word naming its cylinder.
    pub(crate) fn for_each_leaf(&self, g: &FreeGroup, f: &mut impl FnMut(&ReducedWord, &T)) {
        fn go<T: Clone + PartialEq>(
            node: &Node<T>,
            g: &FreeGroup,
            prefix: &ReducedWord,
            f: &mut impl FnMut(&ReducedWord, &T),
        ) {
            match node {
                Node::Leaf(v) => f(prefix, v),
                Node::Branch(ch) => {
                    for (c, l) in ch.iter().zip(g.continuations(prefix.last())) {
                        go(c, g, &prefix.extended(l), f);
                    }
                }
            }
        }
        go(self, g, &ReducedWord::identity(), f)
    }

    pub(crate) fn leaves(&self, g: &FreeGroup) -> Vec<(ReducedWord, T)> {
        let mut out = Vec::new();
        self.for_each_leaf(g, &mut |w, v| out.push((w.clone(), v.clone())));
        out
    }
}

/// Builds a trie top-down. `decide` returns the subtree at a prefix when it is determined there,
/// or `None` to split into children.
pub(crate) fn build<T: Clone + PartialEq>(
    g: &FreeGroup,
    prefix: &ReducedWord,
    decide: &mut impl FnMut(&ReducedWord) -> Option<Node<T>>,
) -> Node<T> {
    if let Some(node) = decide(prefix) {
        return node;
    }
    let children = g
        .continuations(prefix.last())
        .map(|l| build(g, &prefix.extended(l), decide))
        .collect();
    Node::branch(children)
}

/// Pointwise combination of two tries, refining leaves against branches as needed.
pub(crate) fn zip<T, U, V>(
    g: &FreeGroup,
    last: Option<Letter>,
    a: &Node<T>,
    b: &Node<U>,
    f: &impl Fn(&T, &U) -> V,
) -> Node<V>
where
    T: Clone + PartialEq,
    U: Clone + PartialEq,
    V: Clone + PartialEq,
{
    match (a, b) {
        (Node::Leaf(x), Node::Leaf(y)) => Node::Leaf(f(x, y)),
        _ => {
            let children = g
                .continuations(last)
                .enumerate()
                .map(|(i, l)| {
                    let ca = match a {
                        Node::Leaf(_) => a,
                        Node::Branch(ch) => &ch[i],
                    };
                    let cb = match b {
                        Node::Leaf(_) => b,
                        Node::Branch(ch) => &ch[i],
                    };
                    zip(g, Some(l), ca, cb, f)
                })
                .collect();
            Node::branch(children)
        }
    }
}

/// The trie of `a ↦ data(γ⁻¹ a)`.
pub(crate) fn translate<T: Clone + PartialEq>(
    g: &FreeGroup,
    root: &Node<T>,
    gamma: &ReducedWord,
) -> Node<T> {
    if gamma.is_identity() || matches!(root, Node::Leaf(_)) {
        return root.clone();
    }
    let h = gamma.inverse();
    build(g, &ReducedWord::identity(), &mut |w| {
        if w.is_identity() {
            return None;
        }
        let v = h.mul(w);
        let cancelled = (h.len() + w.len() - v.len()) / 2;
        // Once some letter of w survives, later letters of the stream never cancel.
        (cancelled < w.len()).then(|| root.at_word(&v).clone())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::word;

    fn g2() -> FreeGroup {
        FreeGroup::new(2).unwrap()
    }

    #[test]
    fn child_index_skips_the_cancelling_letter() {
        let a = Letter::from_code(0);
        // After `a`, the letters a, b, B occupy slots 0, 1, 2.
        assert_eq!(child_index(Some(a), Letter::from_code(0)), 0);
        assert_eq!(child_index(Some(a), Letter::from_code(2)), 1);
        assert_eq!(child_index(Some(a), Letter::from_code(3)), 2);
    }

    #[test]
    fn merging_makes_tries_canonical() {
        let g = g2();
        let t: Node<i32> = build(&g, &ReducedWord::identity(), &mut |w| {
            (w.len() == 2).then_some(Node::Leaf(7))
        });
        assert!(t == Node::Leaf(7));
    }

    #[test]
    fn translation_moves_cylinders() {
        let g = g2();
        let ind_a: Node<i32> = build(&g, &ReducedWord::identity(), &mut |w| match w.len() {
            0 => None,
            _ => Some(Node::Leaf((w.first() == word("a").first()) as i32)),
        });
        // a · χ_a is the indicator of the cylinder of "aa".
        let moved = translate(&g, &ind_a, &word("a"));
        assert_eq!(moved.leaf_at(&word("aa")), Some(&1));
        assert_eq!(moved.leaf_at(&word("ab")), Some(&0));
        assert_eq!(moved.leaf_at(&word("b")), Some(&0));
        assert!(moved.leaf_at(&word("a")).is_none());
    }
}
