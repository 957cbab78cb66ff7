//! Exact rank of sparse matrices over `Q(i)`.
//!
//! Vectors are scaled to Gaussian integers and reduced against an echelon basis keyed by pivot
//! (smallest nonzero index) using fraction-free row operations; the rational content is divided
//! out after every step so entries stay small.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
struct GaussInt {
    re: BigInt,
    im: BigInt,
}

impl GaussInt {
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn mul(&self, o: &GaussInt) -> GaussInt {
        GaussInt {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn sub(&self, o: &GaussInt) -> GaussInt {
        GaussInt {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

type SparseVec = BTreeMap<usize, GaussInt>;

/// Clears denominators; `None` for the zero vector.
fn integral(entries: &[(usize, Scalar)]) -> Option<SparseVec> {
    let mut den = BigInt::one();
    for (_, s) in entries {
        den = den.lcm(s.re().denom()).lcm(s.im().denom());
    }
    let v: SparseVec = entries
        .iter()
        .filter(|(_, s)| !s.is_zero())
        .map(|(i, s)| {
            let re = s.re().numer() * (&den / s.re().denom());
            let im = s.im().numer() * (&den / s.im().denom());
            (*i, GaussInt { re, im })
        })
        .collect();
    let mut v = v;
    remove_content(&mut v);
    (!v.is_empty()).then_some(v)
}

fn remove_content(v: &mut SparseVec) {
    let mut g = BigInt::zero();
    for x in v.values() {
        g = g.gcd(&x.re).gcd(&x.im);
        if g.is_one() {
            return;
        }
    }
    if g.is_zero() {
        return;
    }
    let g = g.abs();
    for x in v.values_mut() {
        x.re /= &g;
        x.im /= &g;
    }
}

/// Incrementally built echelon basis of a subspace of `Q(i)^N`.
#[derive(Debug, Default, Clone)]
pub struct EchelonBasis {
    rows: BTreeMap<usize, SparseVec>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds a vector given by its nonzero entries; returns whether the rank grew.
    pub fn insert(&mut self, entries: &[(usize, Scalar)]) -> bool {
        let Some(mut v) = integral(entries) else {
            return false;
        };
        loop {
            let (&p, _) = v.iter().next().expect("nonzero vector");
            let Some(b) = self.rows.get(&p) else {
                self.rows.insert(p, v);
                return true;
            };
            // v ← b_p·v − v_p·b, which clears index p.
            let bp = &b[&p];
            let vp = v[&p].clone();
            let mut next = SparseVec::new();
            for (i, x) in &v {
                next.insert(*i, bp.mul(x));
            }
            for (i, y) in b {
                let t = vp.mul(y);
                let entry = next
                    .remove(i)
                    .map(|x| x.sub(&t))
                    .unwrap_or_else(|| GaussInt { re: -t.re, im: -t.im });
                if !entry.is_zero() {
                    next.insert(*i, entry);
                }
            }
            next.retain(|_, x| !x.is_zero());
            if next.is_empty() {
                return false;
            }
            remove_content(&mut next);
            v = next;
        }
    }
}

/// Rank of the matrix whose columns (or rows) are the given sparse vectors.
pub fn rank<'a, I>(vectors: I) -> usize
where
    I: IntoIterator<Item = &'a [(usize, Scalar)]>,
{
    let mut basis = EchelonBasis::new();
    for v in vectors {
        basis.insert(v);
    }
    basis.rank()
}
