//! Dense algebraic parts of the crossed products `A = C(∂F_n) ⋊ F_n`, `A ⊙ A` and
//! `B = C₀(∂²F_n) ⋊ F_n`, together with the dual-element data `v`, `χ`, `w`.
//!
//! All three share one implementation, [`Crossed`], parameterized by a [`System`] that says how
//! group elements act on coefficients. An element is a finite map from group elements to
//! nonzero canonical coefficients, so equality of elements is equality of maps.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use serde::Serialize;
use serde_json::{json, Value};

use crate::boundary::{chi, BiCylinderFunction, CylinderFunction};
use crate::error::{Error, Result};
use crate::free_group::{bigeodesic, BoundaryPoint, FreeGroup, Letter, ReducedWord};
use crate::scalar::Scalar;

/// A coefficient algebra with a group acting on it by *-automorphisms.
pub trait System {
    type Key: Ord + Clone + fmt::Display + fmt::Debug;
    type Coeff: Clone + PartialEq + fmt::Display + fmt::Debug;

    fn identity() -> Self::Key;
    fn compose(a: &Self::Key, b: &Self::Key) -> Self::Key;
    fn inverse(a: &Self::Key) -> Self::Key;
    fn act(k: &Self::Key, c: &Self::Coeff) -> Self::Coeff;

    fn zero(g: FreeGroup) -> Self::Coeff;
    fn is_zero(c: &Self::Coeff) -> bool;
    fn add(a: &Self::Coeff, b: &Self::Coeff) -> Self::Coeff;
    fn sub(a: &Self::Coeff, b: &Self::Coeff) -> Self::Coeff;
    fn mul(a: &Self::Coeff, b: &Self::Coeff) -> Self::Coeff;
    fn star(c: &Self::Coeff) -> Self::Coeff;
    fn scale(c: &Self::Coeff, s: &Scalar) -> Self::Coeff;
    fn coeff_json(c: &Self::Coeff) -> Value;

    /// Membership of a coefficient in the coefficient algebra proper.
    fn admissible(_c: &Self::Coeff) -> bool {
        true
    }
}

/// `C(∂F_n)` with the translation action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundarySystem;

/// `C₀(∂²F_n)` with the diagonal translation action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairSystem;

/// `C(∂F_n) ⊗ C(∂F_n)` with `F_n × F_n` acting leg-wise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TensorSystem;

/// A group element of `F_n × F_n`, i.e. the unitary `u_γ ⊗ u_δ`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LegPair(pub ReducedWord, pub ReducedWord);

impl fmt::Display for LegPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

macro_rules! word_group {
    () => {
        type Key = ReducedWord;
        fn identity() -> ReducedWord {
            ReducedWord::identity()
        }
        fn compose(a: &ReducedWord, b: &ReducedWord) -> ReducedWord {
            a.mul(b)
        }
        fn inverse(a: &ReducedWord) -> ReducedWord {
            a.inverse()
        }
    };
}

macro_rules! coefficient_ops {
    ($ty:ty) => {
        type Coeff = $ty;
        fn zero(g: FreeGroup) -> $ty {
            <$ty>::zero(g)
        }
        fn is_zero(c: &$ty) -> bool {
            c.is_zero()
        }
        fn add(a: &$ty, b: &$ty) -> $ty {
            a.add(b)
        }
        fn sub(a: &$ty, b: &$ty) -> $ty {
            a.sub(b)
        }
        fn mul(a: &$ty, b: &$ty) -> $ty {
            a.mul(b)
        }
        fn star(c: &$ty) -> $ty {
            c.star()
        }
        fn scale(c: &$ty, s: &Scalar) -> $ty {
            c.scale(s)
        }
        fn coeff_json(c: &$ty) -> Value {
            c.to_json()
        }
    };
}

impl System for BoundarySystem {
    word_group!();
    coefficient_ops!(CylinderFunction);
    fn act(k: &ReducedWord, c: &CylinderFunction) -> CylinderFunction {
        c.translate(k)
    }
}

impl System for PairSystem {
    word_group!();
    coefficient_ops!(BiCylinderFunction);
    fn act(k: &ReducedWord, c: &BiCylinderFunction) -> BiCylinderFunction {
        c.translate(k)
    }
    fn admissible(c: &BiCylinderFunction) -> bool {
        c.vanishes_on_diagonal()
    }
}

impl System for TensorSystem {
    type Key = LegPair;
    coefficient_ops!(BiCylinderFunction);
    fn identity() -> LegPair {
        LegPair(ReducedWord::identity(), ReducedWord::identity())
    }
    fn compose(a: &LegPair, b: &LegPair) -> LegPair {
        LegPair(a.0.mul(&b.0), a.1.mul(&b.1))
    }
    fn inverse(a: &LegPair) -> LegPair {
        LegPair(a.0.inverse(), a.1.inverse())
    }
    fn act(k: &LegPair, c: &BiCylinderFunction) -> BiCylinderFunction {
        c.translate_pair(&k.0, &k.1)
    }
}

/// A finite sum `Σ c_k u_k` in the algebraic crossed product of a [`System`].
pub struct Crossed<S: System> {
    group: FreeGroup,
    terms: BTreeMap<S::Key, S::Coeff>,
    _system: PhantomData<S>,
}

/// Element of the dense subalgebra of `C(∂F_n) ⋊ F_n`.
pub type CrossedElement = Crossed<BoundarySystem>;
/// Element of the dense subalgebra of `C₀(∂²F_n) ⋊ F_n`.
pub type PairElement = Crossed<PairSystem>;
/// Element of the algebraic tensor product `A ⊙ A`.
pub type TensorElement = Crossed<TensorSystem>;

impl<S: System> Clone for Crossed<S> {
    fn clone(&self) -> Self {
        Crossed {
            group: self.group,
            terms: self.terms.clone(),
            _system: PhantomData,
        }
    }
}

impl<S: System> PartialEq for Crossed<S> {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.terms == other.terms
    }
}

impl<S: System> Crossed<S> {
    pub fn zero(group: FreeGroup) -> Self {
        Crossed {
            group,
            terms: BTreeMap::new(),
            _system: PhantomData,
        }
    }

    /// `c u_k`.
    pub fn monomial(group: FreeGroup, k: S::Key, c: S::Coeff) -> Self {
        let mut out = Self::zero(group);
        out.accumulate(k, c);
        out
    }

    pub fn from_terms(group: FreeGroup, terms: impl IntoIterator<Item = (S::Key, S::Coeff)>) -> Self {
        let mut out = Self::zero(group);
        for (k, c) in terms {
            out.accumulate(k, c);
        }
        out
    }

    fn accumulate(&mut self, k: S::Key, c: S::Coeff) {
        let sum = match self.terms.remove(&k) {
            Some(prev) => S::add(&prev, &c),
            None => c,
        };
        if !S::is_zero(&sum) {
            self.terms.insert(k, sum);
        }
    }

    pub fn group(&self) -> FreeGroup {
        self.group
    }

    pub fn terms(&self) -> &BTreeMap<S::Key, S::Coeff> {
        &self.terms
    }

    pub fn coefficient(&self, k: &S::Key) -> Option<&S::Coeff> {
        self.terms.get(k)
    }

    /// Coefficient at `k`, zero when absent.
    pub fn coefficient_or_zero(&self, k: &S::Key) -> S::Coeff {
        self.terms.get(k).cloned().unwrap_or_else(|| S::zero(self.group))
    }

    pub fn support(&self) -> impl Iterator<Item = &S::Key> {
        self.terms.keys()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.accumulate(k.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&Scalar::from(-1))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        Self::from_terms(
            self.group,
            self.terms.iter().map(|(k, c)| (k.clone(), S::scale(c, s))),
        )
    }

    /// `(f u_γ)(g u_δ) = f (γ·g) u_{γδ}`, extended bilinearly.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.group);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let c = S::mul(c1, &S::act(k1, c2));
                out.accumulate(S::compose(k1, k2), c);
            }
        }
        out
    }

    /// `(f u_γ)* = (γ⁻¹·f̄) u_{γ⁻¹}`.
    pub fn star(&self) -> Self {
        Self::from_terms(
            self.group,
            self.terms.iter().map(|(k, c)| {
                let inv = S::inverse(k);
                let coeff = S::act(&inv, &S::star(c));
                (inv, coeff)
            }),
        )
    }

    /// Left multiplication by the coefficient `c` (that is, by `c u_e`).
    pub fn left_coeff_mul(&self, c: &S::Coeff) -> Self {
        Self::from_terms(
            self.group,
            self.terms.iter().map(|(k, d)| (k.clone(), S::mul(c, d))),
        )
    }

    /// Checks that every coefficient lies in the coefficient algebra.
    pub fn check_invariants(&self) -> Result<()> {
        match self.terms.iter().find(|(_, c)| !S::admissible(c)) {
            None => Ok(()),
            Some((k, c)) => Err(Error::Invariant(format!(
                "coefficient at {k} is not compactly supported off the diagonal: {c}"
            ))),
        }
    }

    /// Least group element at which the two elements differ, with `self − other` there.
    pub fn first_difference(&self, other: &Self) -> Option<(S::Key, S::Coeff)> {
        let keys: std::collections::BTreeSet<&S::Key> =
            self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter().find_map(|k| {
            let d = S::sub(&self.coefficient_or_zero(k), &other.coefficient_or_zero(k));
            (!S::is_zero(&d)).then(|| (k.clone(), d))
        })
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(k, c)| json!({ "unitary": k.to_string(), "coefficient": S::coeff_json(c) }))
                .collect(),
        )
    }
}

impl<S: System> fmt::Display for Crossed<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| {
                // Leg pairs already print their own parentheses.
                let k = k.to_string();
                if k.starts_with('(') {
                    format!("({c})*u{k}")
                } else {
                    format!("({c})*u({k})")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<S: System> fmt::Debug for Crossed<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl CrossedElement {
    pub fn one(group: FreeGroup) -> Self {
        Self::unitary(group, ReducedWord::identity())
    }

    /// The group unitary `u_γ`.
    pub fn unitary(group: FreeGroup, gamma: ReducedWord) -> Self {
        Self::monomial(group, gamma, CylinderFunction::one(group))
    }

    /// `f u_e`.
    pub fn function(f: CylinderFunction) -> Self {
        Self::monomial(f.group(), ReducedWord::identity(), f)
    }
}

impl TensorElement {
    pub fn one(group: FreeGroup) -> Self {
        Self::monomial(group, TensorSystem::identity(), BiCylinderFunction::one(group))
    }

    /// `(f u_γ) ⊗ (g u_δ)`.
    pub fn simple(left: (&CylinderFunction, &ReducedWord), right: (&CylinderFunction, &ReducedWord)) -> Self {
        Self::monomial(
            left.0.group(),
            LegPair(left.1.clone(), right.1.clone()),
            BiCylinderFunction::tensor(left.0, right.0),
        )
    }

    /// Swaps the tensor legs.
    pub fn flip_sigma(&self) -> Self {
        Self::from_terms(
            self.group,
            self.terms
                .iter()
                .map(|(k, c)| (LegPair(k.1.clone(), k.0.clone()), c.flip())),
        )
    }
}

impl PairElement {
    /// `F u_γ`, rejecting coefficients that touch the diagonal.
    pub fn pair_monomial(gamma: ReducedWord, f: BiCylinderFunction) -> Result<Self> {
        if !f.vanishes_on_diagonal() {
            return Err(Error::domain("not compactly supported off the diagonal"));
        }
        Ok(Self::monomial(f.group(), gamma, f))
    }

    /// The inclusion `B → A ⊙ A`, `F u_γ ↦ F (u_γ ⊗ u_γ)`.
    pub fn include_i(&self) -> TensorElement {
        TensorElement::from_terms(
            self.group,
            self.terms
                .iter()
                .map(|(k, c)| (LegPair(k.clone(), k.clone()), c.clone())),
        )
    }

    /// The flip `(a, b) ↦ (b, a)` applied to every coefficient.
    pub fn bar_sigma(&self) -> Self {
        Self::from_terms(
            self.group,
            self.terms.iter().map(|(k, c)| (k.clone(), c.flip())),
        )
    }
}

/// `x + λ·1` in the unitization of a possibly non-unital crossed product.
pub struct Unitized<S: System> {
    pub scalar: Scalar,
    pub elem: Crossed<S>,
}

impl<S: System> Clone for Unitized<S> {
    fn clone(&self) -> Self {
        Unitized {
            scalar: self.scalar.clone(),
            elem: self.elem.clone(),
        }
    }
}

impl<S: System> PartialEq for Unitized<S> {
    fn eq(&self, other: &Self) -> bool {
        self.scalar == other.scalar && self.elem == other.elem
    }
}

impl<S: System> fmt::Debug for Unitized<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}", self.scalar, self.elem)
    }
}

impl<S: System> Unitized<S> {
    pub fn one(group: FreeGroup) -> Self {
        Unitized {
            scalar: Scalar::one(),
            elem: Crossed::zero(group),
        }
    }

    pub fn new(scalar: Scalar, elem: Crossed<S>) -> Self {
        Unitized { scalar, elem }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let elem = self
            .elem
            .mul(&other.elem)
            .add(&self.elem.scale(&other.scalar))
            .add(&other.elem.scale(&self.scalar));
        Unitized {
            scalar: &self.scalar * &other.scalar,
            elem,
        }
    }

    pub fn star(&self) -> Self {
        Unitized {
            scalar: self.scalar.conj(),
            elem: self.elem.star(),
        }
    }
}

/// `F_γ = χ_γ ⊗ (1 − χ_γ)`.
pub fn f_gamma(group: FreeGroup, gamma: &ReducedWord) -> Result<BiCylinderFunction> {
    let c = chi(group, gamma)?;
    Ok(BiCylinderFunction::tensor(&c, &CylinderFunction::one(group).sub(&c)))
}

/// `v = Σ_{|γ|=1} F_γ u_γ`, summed over all `2n` letters.
pub fn element_v(group: FreeGroup) -> PairElement {
    PairElement::from_terms(
        group,
        group.letters().map(|l| {
            let g = ReducedWord::letter(l);
            let f = f_gamma(group, &g).expect("letters are not the identity");
            (g, f)
        }),
    )
}

/// `χ = Σ_{|γ|=1} F_γ`, supported at the identity.
pub fn element_chi(group: FreeGroup) -> PairElement {
    let sum = group.letters().fold(BiCylinderFunction::zero(group), |acc, l| {
        acc.add(&f_gamma(group, &ReducedWord::letter(l)).expect("letters are not the identity"))
    });
    PairElement::monomial(group, ReducedWord::identity(), sum)
}

/// `w = v − χ`.
pub fn element_w(group: FreeGroup) -> PairElement {
    element_v(group).sub(&element_chi(group))
}

/// Outcome of one exact identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub pass: bool,
    /// First offending coefficient, as `unitary: coefficient of lhs − rhs`.
    pub discrepancy: Option<String>,
}

impl IdentityCheck {
    pub fn compare<S: System>(name: &str, lhs: &Crossed<S>, rhs: &Crossed<S>) -> Self {
        let discrepancy = lhs
            .first_difference(rhs)
            .map(|(k, c)| format!("{k}: {c}"));
        IdentityCheck {
            name: name.to_string(),
            pass: discrepancy.is_none(),
            discrepancy,
        }
    }

    fn compare_unitized<S: System>(name: &str, lhs: &Unitized<S>, rhs: &Unitized<S>) -> Self {
        if lhs.scalar != rhs.scalar {
            return IdentityCheck {
                name: name.to_string(),
                pass: false,
                discrepancy: Some(format!("scalar part {} != {}", lhs.scalar, rhs.scalar)),
            };
        }
        Self::compare(name, &lhs.elem, &rhs.elem)
    }

    fn invariant<S: System>(name: &str, x: &Crossed<S>) -> Self {
        let discrepancy = x.check_invariants().err().map(|e| e.to_string());
        IdentityCheck {
            name: name.to_string(),
            pass: discrepancy.is_none(),
            discrepancy,
        }
    }
}

/// A list of identity checks; passes iff all do.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub checks: Vec<IdentityCheck>,
}

impl Certificate {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| !c.pass)
    }
}

/// `v*v = vv* = χ`, `χ* = χ = χ²` and unitarity of `w + 1`, for the canonical `v`.
pub fn verify_v_identities(group: FreeGroup) -> Certificate {
    verify_v_identities_for(&element_v(group), &element_chi(group))
}

/// The same identities for a supplied `v` against a supplied `χ`.
pub fn verify_v_identities_for(v: &PairElement, chi: &PairElement) -> Certificate {
    let g = v.group();
    let vs = v.star();
    let w = v.sub(chi);
    let w1 = Unitized::new(Scalar::one(), w.clone());
    let one = Unitized::one(g);
    let vsv = vs.mul(v);
    let vvs = v.mul(&vs);
    Certificate {
        checks: vec![
            IdentityCheck::invariant("v in B", v),
            IdentityCheck::invariant("v*v in B", &vsv),
            IdentityCheck::compare("v*v = chi", &vsv, chi),
            IdentityCheck::compare("vv* = chi", &vvs, chi),
            IdentityCheck::compare("chi* = chi", &chi.star(), chi),
            IdentityCheck::compare("chi^2 = chi", &chi.mul(chi), chi),
            IdentityCheck::compare_unitized("(w+1)*(w+1) = 1", &w1.star().mul(&w1), &one),
            IdentityCheck::compare_unitized("(w+1)(w+1)* = 1", &w1.mul(&w1.star()), &one),
        ],
    }
}

/// `σ̄(v − χ) = v* − χ`.
pub fn verify_flip_symmetry(group: FreeGroup) -> Certificate {
    verify_flip_symmetry_for(&element_v(group), &element_chi(group))
}

pub fn verify_flip_symmetry_for(v: &PairElement, chi: &PairElement) -> Certificate {
    let lhs = v.sub(chi).bar_sigma();
    let rhs = v.star().sub(chi);
    Certificate {
        checks: vec![
            IdentityCheck::compare("bar_sigma(v - chi) = v* - chi", &lhs, &rhs),
            IdentityCheck::compare(
                "flip_sigma(i(w)) = i(bar_sigma(w))",
                &v.sub(chi).include_i().flip_sigma(),
                &lhs.include_i(),
            ),
        ],
    }
}

/// Both sides of the geodesic description of `v` at `(a, b)` for a letter `γ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeodesicAgreement {
    pub a: BoundaryPoint,
    pub b: BoundaryPoint,
    pub gamma: ReducedWord,
    /// Coefficient of `v` at `γ`, evaluated at `(a, b)`.
    pub tensor_value: bool,
    /// Whether the geodesic from `a` to `b` has `r(0) = e` and `r(−1) = γ`.
    pub geodesic_value: bool,
}

impl GeodesicAgreement {
    pub fn agree(&self) -> bool {
        self.tensor_value == self.geodesic_value
    }
}

pub fn geodesic_v_check(
    v: &PairElement,
    a: &BoundaryPoint,
    b: &BoundaryPoint,
    gamma: &ReducedWord,
) -> Result<GeodesicAgreement> {
    if gamma.len() != 1 {
        return Err(Error::domain(format!("{gamma} is not a generator")));
    }
    let window = bigeodesic(a, b, -1, 0)?;
    let geodesic_value = window.at(0).is_some_and(ReducedWord::is_identity)
        && window.at(-1) == Some(gamma);
    let value = v.coefficient_or_zero(gamma).eval(a, b);
    let tensor_value = if value.is_zero() {
        false
    } else if value.is_one() {
        true
    } else {
        return Err(Error::Invariant(format!("v takes the value {value} at ({a}, {b})")));
    };
    Ok(GeodesicAgreement {
        a: a.clone(),
        b: b.clone(),
        gamma: gamma.clone(),
        tensor_value,
        geodesic_value,
    })
}

/// Sweeps `geodesic_v_check` over one representative pair per pair of first-letter classes,
/// plus the supplied extra pairs, for every letter. Returns the disagreements.
pub fn geodesic_sweep(
    v: &PairElement,
    extra: &[(BoundaryPoint, BoundaryPoint)],
) -> Result<(usize, Vec<GeodesicAgreement>)> {
    let g = v.group();
    let mut pairs = Vec::new();
    for l1 in g.letters() {
        for l2 in g.letters() {
            pairs.push(class_representatives(g, l1, l2));
        }
    }
    pairs.extend(extra.iter().cloned());
    let mut checked = 0;
    let mut bad = Vec::new();
    for (a, b) in &pairs {
        for l in g.letters() {
            let r = geodesic_v_check(v, a, b, &ReducedWord::letter(l))?;
            checked += 1;
            if !r.agree() {
                bad.push(r);
            }
        }
    }
    Ok((checked, bad))
}

/// Distinct points beginning with `l1` and `l2`.
fn class_representatives(g: FreeGroup, l1: Letter, l2: Letter) -> (BoundaryPoint, BoundaryPoint) {
    let a = BoundaryPoint::constant(l1);
    if l1 != l2 {
        return (a, BoundaryPoint::constant(l2));
    }
    let other = g
        .continuations(Some(l1))
        .find(|&m| m != l1)
        .expect("degree is at least 4");
    let b = BoundaryPoint::new(&ReducedWord::letter(l1), &ReducedWord::letter(other))
        .expect("reduced by construction");
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::{point, word};

    fn g(n: usize) -> FreeGroup {
        FreeGroup::new(n).unwrap()
    }

    fn chi2(u: &str) -> CylinderFunction {
        chi(g(2), &word(u)).unwrap()
    }

    #[test]
    fn unitaries_multiply_as_the_group() {
        let gr = g(2);
        let x = CrossedElement::unitary(gr, word("ab"));
        let y = CrossedElement::unitary(gr, word("BA"));
        assert_eq!(x.mul(&y), CrossedElement::one(gr));
    }

    #[test]
    fn star_of_a_monomial() {
        let gr = g(2);
        let x = CrossedElement::monomial(gr, word("a"), chi2("a"));
        let s = x.star();
        assert_eq!(s.coefficient(&word("A")), Some(&chi2("a").translate(&word("A"))));
        assert_eq!(s.star(), x);
        // a⁻¹·χ_a = 1 − χ_A.
        assert_eq!(
            s.coefficient(&word("A")).unwrap(),
            &CylinderFunction::one(gr).sub(&chi2("A"))
        );
    }

    #[test]
    fn covariance_relation() {
        let gr = g(2);
        let u = CrossedElement::unitary(gr, word("aB"));
        let f = CrossedElement::function(chi2("b"));
        let lhs = u.mul(&f).mul(&u.star());
        assert_eq!(lhs, CrossedElement::function(chi2("b").translate(&word("aB"))));
    }

    #[test]
    fn v_identities_hold_in_ranks_two_and_three() {
        for n in [2, 3] {
            let cert = verify_v_identities(g(n));
            assert!(cert.pass(), "rank {n}: {:?}", cert.first_failure());
        }
    }

    #[test]
    fn v_coefficients() {
        let gr = g(2);
        let v = element_v(gr);
        assert_eq!(v.support().count(), 4);
        let expected = BiCylinderFunction::tensor(&chi2("a"), &CylinderFunction::one(gr).sub(&chi2("a")));
        assert_eq!(v.coefficient(&word("a")), Some(&expected));
        assert!(element_chi(gr).coefficient(&word("")).unwrap().vanishes_on_diagonal());
        assert_eq!(element_w(gr).add(&element_chi(gr)), v);
    }

    #[test]
    fn positive_generators_alone_fail() {
        let gr = g(2);
        let v: PairElement = PairElement::from_terms(
            gr,
            ["a", "b"].map(|s| (word(s), f_gamma(gr, &word(s)).unwrap())),
        );
        let chi = PairElement::from_terms(
            gr,
            [(
                word(""),
                f_gamma(gr, &word("a")).unwrap().add(&f_gamma(gr, &word("b")).unwrap()),
            )],
        );
        assert!(!verify_v_identities_for(&v, &chi).pass());
    }

    #[test]
    fn flip_symmetries() {
        let gr = g(2);
        assert!(verify_flip_symmetry(gr).pass());
        assert_eq!(element_chi(gr).bar_sigma(), element_chi(gr));
        for x in [element_v(gr), element_chi(gr), element_w(gr)] {
            assert_eq!(x.star().bar_sigma(), x.bar_sigma().star());
            assert_eq!(x.include_i().flip_sigma(), x.bar_sigma().include_i());
            assert_eq!(x.include_i().star(), x.star().include_i());
            let t = x.include_i();
            assert_eq!(t.flip_sigma().flip_sigma(), t);
        }
        assert_eq!(
            element_chi(gr).include_i().support().cloned().collect::<Vec<_>>(),
            vec![TensorSystem::identity()]
        );
    }

    #[test]
    fn perturbed_v_is_detected() {
        let gr = g(2);
        let mut terms: Vec<_> = element_v(gr).terms().clone().into_iter().collect();
        let cut = BiCylinderFunction::tensor(&chi2("a"), &chi2("b"));
        terms[0].1 = terms[0].1.sub(&cut);
        let v = PairElement::from_terms(gr, terms);
        let cert = verify_v_identities_for(&v, &element_chi(gr));
        assert!(!cert.pass());
        assert!(cert.first_failure().unwrap().discrepancy.is_some());
    }

    #[test]
    fn geodesic_description() {
        let gr = g(2);
        let v = element_v(gr);
        let r = geodesic_v_check(&v, &point("(a)"), &point("(b)"), &word("a")).unwrap();
        assert!(r.tensor_value && r.geodesic_value);
        let r = geodesic_v_check(&v, &point("(a)"), &point("a(b)"), &word("a")).unwrap();
        assert!(!r.tensor_value && !r.geodesic_value);
        let (checked, bad) = geodesic_sweep(&v, &[]).unwrap();
        assert_eq!(checked, 64);
        assert!(bad.is_empty(), "{bad:?}");
        let err = geodesic_v_check(&v, &point("(a)"), &point("(a)"), &word("a")).unwrap_err();
        assert!(err.to_string().contains("diagonal pair"));
    }

    #[test]
    fn pair_products_stay_off_diagonal() {
        let gr = g(2);
        let v = element_v(gr);
        let x = v.mul(&v).mul(&v.star());
        assert!(x.check_invariants().is_ok());
        assert!(PairElement::pair_monomial(word("a"), BiCylinderFunction::one(gr)).is_err());
    }
}
