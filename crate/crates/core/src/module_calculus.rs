//! The Hilbert module `A ⊗ ℓ²F_n` in its algebraic form: finitely supported maps `g ↦ ξ(g) ∈ A`,
//! written `Σ ξ(g) ⊗ e_g`, with right `A`-action `(ξ·a)(g) = ξ(g) a`.
//!
//! Operators are symbolic ([`ModuleOperator`]) and act exactly on such vectors; nothing is
//! truncated, so identities are checked on the infinite module, restricted only by the choice of
//! finitely many test vectors `χ_u ⊗ e_g`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::Serialize;

use crate::boundary::{chi, BiCylinderFunction, CylinderFunction};
use crate::crossed::{element_chi, element_v, CrossedElement, PairElement};
use crate::error::{Error, Result};
use crate::free_group::{FreeGroup, ReducedWord};
use crate::julg_valette::{wbar_column, FunctionFamily};
use crate::limits::Limits;
use crate::scalar::Scalar;

/// `Σ_g ξ(g) ⊗ e_g` with finitely many nonzero `ξ(g) ∈ A`.
#[derive(Clone, PartialEq)]
pub struct ModuleVector {
    group: FreeGroup,
    entries: BTreeMap<ReducedWord, CrossedElement>,
}

impl ModuleVector {
    pub fn zero(group: FreeGroup) -> Self {
        ModuleVector {
            group,
            entries: BTreeMap::new(),
        }
    }

    /// `a ⊗ e_g`.
    pub fn basis(g: ReducedWord, a: CrossedElement) -> Self {
        let mut out = Self::zero(a.group());
        out.accumulate(g, a);
        out
    }

    pub fn group(&self) -> FreeGroup {
        self.group
    }

    pub fn entries(&self) -> &BTreeMap<ReducedWord, CrossedElement> {
        &self.entries
    }

    pub fn get(&self, g: &ReducedWord) -> CrossedElement {
        self.entries
            .get(g)
            .cloned()
            .unwrap_or_else(|| CrossedElement::zero(self.group))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    fn accumulate(&mut self, g: ReducedWord, a: CrossedElement) {
        let sum = match self.entries.remove(&g) {
            Some(prev) => prev.add(&a),
            None => a,
        };
        if !sum.is_zero() {
            self.entries.insert(g, sum);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, a) in &other.entries {
            out.accumulate(g.clone(), a.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Scalar::from(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        self.map_entries(|_, a| a.scale(c))
    }

    /// `(ξ·a)(g) = ξ(g) a`.
    pub fn right_mul(&self, a: &CrossedElement) -> Self {
        self.map_entries(|_, x| x.mul(a))
    }

    fn map_entries(&self, f: impl Fn(&ReducedWord, &CrossedElement) -> CrossedElement) -> Self {
        self.relabel(|g, a| (g.clone(), f(g, a)))
    }

    fn relabel(&self, f: impl Fn(&ReducedWord, &CrossedElement) -> (ReducedWord, CrossedElement)) -> Self {
        let mut out = Self::zero(self.group);
        for (g, a) in &self.entries {
            let (h, b) = f(g, a);
            out.accumulate(h, b);
        }
        out
    }

    /// Least label where the vectors differ.
    pub fn first_difference(&self, other: &Self) -> Option<ReducedWord> {
        let labels: BTreeSet<&ReducedWord> = self.entries.keys().chain(other.entries.keys()).collect();
        labels.into_iter().find(|g| self.get(g) != other.get(g)).cloned()
    }
}

impl fmt::Display for ModuleVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(g, a)| format!("[{a}] (x) e_{g}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for ModuleVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `⟨ξ, η⟩ = Σ_g ξ(g)* η(g)`.
pub fn inner_product(xi: &ModuleVector, eta: &ModuleVector) -> CrossedElement {
    xi.entries
        .iter()
        .filter_map(|(g, a)| eta.entries.get(g).map(|b| a.star().mul(b)))
        .fold(CrossedElement::zero(xi.group), |acc, x| acc.add(&x))
}

/// `F̃′(·, y)` for every label `y` seen so far.
pub struct TauData {
    f: BiCylinderFunction,
    cache: Mutex<HashMap<ReducedWord, CylinderFunction>>,
}

impl TauData {
    fn f_prime(&self, y: &ReducedWord) -> CylinderFunction {
        if let Some(c) = self.cache.lock().expect("poisoned").get(y) {
            return c.clone();
        }
        let c = self.f.f_prime_unchecked(y);
        self.cache.lock().expect("poisoned").insert(y.clone(), c.clone());
        c
    }
}

/// A right-`A`-linear operator on `A ⊗ ℓ²F_n`.
#[derive(Clone)]
pub enum ModuleOperator {
    Identity,
    /// `a ⊗ e_x ↦ c a ⊗ e_x`.
    LeftMul(CrossedElement),
    /// `φ(f) = f ⊗ 1`.
    PhiF(CylinderFunction),
    /// `φ(γ) = u_γ ⊗ λ(γ)`: `a ⊗ e_x ↦ u_γ a ⊗ e_{γx}`.
    PhiGamma(ReducedWord),
    /// `a ⊗ e_y ↦ F̃′(·, y) a ⊗ e_y`.
    TauF(Arc<TauData>),
    /// `τ(γ) = 1 ⊗ ρ(γ)`: `a ⊗ e_x ↦ a ⊗ e_{xγ⁻¹}`.
    TauGamma(ReducedWord),
    /// `U(a ⊗ e_x) = u_x a ⊗ e_x`.
    Untwist,
    /// `U*(a ⊗ e_x) = u_x* a ⊗ e_x`.
    UntwistInverse,
    /// `1 ⊗ M_f̃`.
    ExtendedMult(CylinderFunction),
    /// `1 ⊗ M_{f̃∘ι}`.
    ExtendedMultInverted(CylinderFunction),
    /// `1 ⊗ λ(h)`: `a ⊗ e_x ↦ a ⊗ e_{hx}`.
    LeftTranslateLabels(ReducedWord),
    /// Fiberwise `W`, the reference descended Julg–Valette operator.
    Wbar,
    /// `(W̄*η)(g) = χ_g η(g′) + (1 − χ_g) η(g)` for `g ≠ e`, and `0` at `e`.
    WbarAdjoint,
    /// Closed form of `V̄`: `a ⊗ e_g ↦ χ_g a ⊗ e_{g′}` for `g ≠ e`.
    VbarClosed,
    /// `a ⊗ e_y ↦ Σ_ℓ χ_{yℓ} a ⊗ e_{yℓ}`.
    VbarClosedAdjoint,
    /// Closed form of `P̄`: multiplication by `χ_g` on the fiber at `g ≠ e`, identity at `e`.
    PbarClosed,
    Scaled(Scalar, Box<ModuleOperator>),
    Sum(Vec<ModuleOperator>),
    /// `Product([A, B])` is `A·B`.
    Product(Vec<ModuleOperator>),
    Named(String, Box<ModuleOperator>),
}

impl ModuleOperator {
    pub fn tau_f(f: &BiCylinderFunction) -> Result<ModuleOperator> {
        if !f.vanishes_on_diagonal() {
            return Err(Error::domain("not compactly supported off the diagonal"));
        }
        Ok(ModuleOperator::TauF(Arc::new(TauData {
            f: f.clone(),
            cache: Mutex::new(HashMap::new()),
        })))
    }

    pub fn named(name: impl Into<String>, op: ModuleOperator) -> Self {
        ModuleOperator::Named(name.into(), Box::new(op))
    }

    pub fn then(self, first: ModuleOperator) -> Self {
        ModuleOperator::Product(vec![self, first])
    }

    pub fn minus(self, other: ModuleOperator) -> Self {
        ModuleOperator::Sum(vec![self, ModuleOperator::Scaled(Scalar::from(-1), Box::new(other))])
    }

    pub fn apply(&self, xi: &ModuleVector) -> ModuleVector {
        use ModuleOperator::*;
        let g = xi.group;
        match self {
            Identity => xi.clone(),
            LeftMul(c) => xi.map_entries(|_, a| c.mul(a)),
            PhiF(f) => xi.map_entries(|_, a| a.left_coeff_mul(f)),
            PhiGamma(gamma) => {
                let u = CrossedElement::unitary(g, gamma.clone());
                xi.relabel(|x, a| (gamma.mul(x), u.mul(a)))
            }
            TauF(data) => xi.map_entries(|y, a| a.left_coeff_mul(&data.f_prime(y))),
            TauGamma(gamma) => {
                let inv = gamma.inverse();
                xi.relabel(|x, a| (x.mul(&inv), a.clone()))
            }
            Untwist => xi.map_entries(|x, a| CrossedElement::unitary(g, x.clone()).mul(a)),
            UntwistInverse => xi.map_entries(|x, a| CrossedElement::unitary(g, x.inverse()).mul(a)),
            ExtendedMult(f) => xi.map_entries(|x, a| a.scale(&f.extend(x))),
            ExtendedMultInverted(f) => xi.map_entries(|x, a| a.scale(&f.extend(&x.inverse()))),
            LeftTranslateLabels(h) => xi.relabel(|x, a| (h.mul(x), a.clone())),
            Wbar => apply_wbar(xi),
            VbarClosed => {
                let mut out = ModuleVector::zero(g);
                for (x, a) in &xi.entries {
                    if let Some(p) = x.parent() {
                        let c = chi(g, x).expect("x is not the identity");
                        out.accumulate(p, a.left_coeff_mul(&c));
                    }
                }
                out
            }
            WbarAdjoint => {
                let mut out = ModuleVector::zero(g);
                for (y, a) in &xi.entries {
                    for (child, c) in children_with_chi(g, y) {
                        out.accumulate(child, a.left_coeff_mul(&c));
                    }
                    if let Ok(c) = chi(g, y) {
                        let rest = CylinderFunction::one(g).sub(&c);
                        out.accumulate(y.clone(), a.left_coeff_mul(&rest));
                    }
                }
                out
            }
            VbarClosedAdjoint => {
                let mut out = ModuleVector::zero(g);
                for (y, a) in &xi.entries {
                    for (child, c) in children_with_chi(g, y) {
                        out.accumulate(child, a.left_coeff_mul(&c));
                    }
                }
                out
            }
            PbarClosed => xi.map_entries(|y, a| match chi(g, y) {
                Ok(c) => a.left_coeff_mul(&c),
                Err(_) => a.clone(),
            }),
            Scaled(c, op) => op.apply(xi).scale(c),
            Sum(ops) => ops
                .iter()
                .fold(ModuleVector::zero(g), |acc, op| acc.add(&op.apply(xi))),
            Product(ops) => ops.iter().rev().fold(xi.clone(), |v, op| op.apply(&v)),
            Named(_, op) => op.apply(xi),
        }
    }

    /// The adjoint with respect to the `A`-valued inner product.
    pub fn adjoint(&self) -> ModuleOperator {
        use ModuleOperator::*;
        match self {
            Identity => Identity,
            LeftMul(c) => LeftMul(c.star()),
            PhiF(f) => PhiF(f.star()),
            PhiGamma(gamma) => PhiGamma(gamma.inverse()),
            TauF(data) => ModuleOperator::tau_f(&data.f.star()).expect("conjugation keeps the diagonal zero"),
            TauGamma(gamma) => TauGamma(gamma.inverse()),
            Untwist => UntwistInverse,
            UntwistInverse => Untwist,
            ExtendedMult(f) => ExtendedMult(f.star()),
            ExtendedMultInverted(f) => ExtendedMultInverted(f.star()),
            LeftTranslateLabels(h) => LeftTranslateLabels(h.inverse()),
            Wbar => WbarAdjoint,
            WbarAdjoint => Wbar,
            VbarClosed => VbarClosedAdjoint,
            VbarClosedAdjoint => VbarClosed,
            PbarClosed => PbarClosed,
            Scaled(c, op) => Scaled(c.conj(), Box::new(op.adjoint())),
            Sum(ops) => Sum(ops.iter().map(ModuleOperator::adjoint).collect()),
            Product(ops) => Product(ops.iter().rev().map(ModuleOperator::adjoint).collect()),
            Named(name, op) => Named(format!("{name}*"), Box::new(op.adjoint())),
        }
    }
}

impl fmt::Display for ModuleOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ModuleOperator::*;
        match self {
            Identity => write!(f, "1"),
            LeftMul(c) => write!(f, "L[{c}]"),
            PhiF(x) => write!(f, "phi({x})"),
            PhiGamma(g) => write!(f, "phi(u({g}))"),
            TauF(d) => write!(f, "tau({})", d.f),
            TauGamma(g) => write!(f, "tau(u({g}))"),
            Untwist => write!(f, "U"),
            UntwistInverse => write!(f, "U*"),
            ExtendedMult(x) => write!(f, "1(x)M[{x}~]"),
            ExtendedMultInverted(x) => write!(f, "1(x)M[{x}~ o inv]"),
            LeftTranslateLabels(h) => write!(f, "1(x)lambda({h})"),
            Wbar => write!(f, "Wbar"),
            WbarAdjoint => write!(f, "Wbar*"),
            VbarClosed => write!(f, "Vbar_closed"),
            VbarClosedAdjoint => write!(f, "Vbar_closed*"),
            PbarClosed => write!(f, "Pbar_closed"),
            Scaled(c, op) => write!(f, "({c})*{op}"),
            Sum(ops) => {
                let parts: Vec<String> = ops.iter().map(|o| o.to_string()).collect();
                write!(f, "({})", parts.join(" + "))
            }
            Product(ops) => {
                let parts: Vec<String> = ops.iter().map(|o| o.to_string()).collect();
                write!(f, "{}", parts.join("·"))
            }
            Named(name, _) => write!(f, "{name}"),
        }
    }
}

impl fmt::Debug for ModuleOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn children_with_chi(g: FreeGroup, y: &ReducedWord) -> Vec<(ReducedWord, CylinderFunction)> {
    g.continuations(y.last())
        .map(|l| {
            let child = y.extended(l);
            let c = chi(g, &child).expect("child is not the identity");
            (child, c)
        })
        .collect()
}

/// Splits `ξ` by crossed-product unitary into families of boundary functions, applies `W`
/// fiberwise to each, and reassembles.
fn apply_wbar(xi: &ModuleVector) -> ModuleVector {
    let g = xi.group;
    let mut families: BTreeMap<ReducedWord, FunctionFamily> = BTreeMap::new();
    for (label, a) in &xi.entries {
        for (h, f) in a.terms() {
            families
                .entry(h.clone())
                .or_default()
                .insert(label.clone(), f.clone());
        }
    }
    let mut out = ModuleVector::zero(g);
    for (h, family) in families {
        for (label, f) in wbar_column(g, &family) {
            out.accumulate(label, CrossedElement::monomial(g, h.clone(), f));
        }
    }
    out
}

/// `τ(b) = Σ_γ τ(F_γ) τ(γ)` for `b = Σ_γ F_γ u_γ`.
pub fn tau(b: &PairElement) -> Result<ModuleOperator> {
    let terms = b
        .terms()
        .iter()
        .map(|(gamma, f)| Ok(ModuleOperator::tau_f(f)?.then(ModuleOperator::TauGamma(gamma.clone()))))
        .collect::<Result<Vec<_>>>()?;
    Ok(ModuleOperator::Sum(terms))
}

pub fn build_vbar(v: &PairElement) -> Result<ModuleOperator> {
    Ok(ModuleOperator::named("Vbar", tau(v)?))
}

pub fn build_pbar(chi: &PairElement) -> Result<ModuleOperator> {
    Ok(ModuleOperator::named("Pbar", tau(chi)?))
}

/// `F̄ = V̄ − P̄ + 1`.
pub fn build_fbar(v: &PairElement, chi: &PairElement) -> Result<ModuleOperator> {
    let op = ModuleOperator::Sum(vec![
        build_vbar(v)?,
        ModuleOperator::Scaled(Scalar::from(-1), Box::new(build_pbar(chi)?)),
        ModuleOperator::Identity,
    ]);
    Ok(ModuleOperator::named("Fbar", op))
}

/// Deliberate corruptions of `v`, used to confirm that the checks can fail.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub enum Mutation {
    #[default]
    None,
    /// Remove the `γ`-term of `v` before building `V̄`.
    DropVbarTerm(ReducedWord),
    /// Replace `F_γ` by `F_γ − χ_γ ⊗ χ_δ`, `δ` the least letter other than `γ`.
    PerturbV(ReducedWord),
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mutation::None => write!(f, "none"),
            Mutation::DropVbarTerm(g) => write!(f, "drop-vbar-term:{g}"),
            Mutation::PerturbV(g) => write!(f, "perturb-v:{g}"),
        }
    }
}

impl std::str::FromStr for Mutation {
    type Err = Error;
    /// `none`, `drop-vbar-term:<letter>` or `perturb-v:<letter>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown mutation {s:?}"));
        if s == "none" {
            return Ok(Mutation::None);
        }
        let (kind, letter) = s.split_once(':').ok_or_else(bad)?;
        let gamma: ReducedWord = letter.parse()?;
        match kind {
            "drop-vbar-term" => Ok(Mutation::DropVbarTerm(gamma)),
            "perturb-v" => Ok(Mutation::PerturbV(gamma)),
            _ => Err(bad()),
        }
    }
}

fn letter_of(group: FreeGroup, gamma: &ReducedWord) -> Result<()> {
    if gamma.len() != 1 || !group.contains(gamma) {
        return Err(Error::domain(format!("{gamma} is not a generator letter of F_{}", group.rank())));
    }
    Ok(())
}

/// `v` with the mutation applied.
pub fn mutated_v(group: FreeGroup, mutation: &Mutation) -> Result<PairElement> {
    let v = element_v(group);
    match mutation {
        Mutation::None => Ok(v),
        Mutation::DropVbarTerm(gamma) => {
            letter_of(group, gamma)?;
            let term = PairElement::monomial(group, gamma.clone(), v.coefficient_or_zero(gamma));
            Ok(v.sub(&term))
        }
        Mutation::PerturbV(gamma) => {
            letter_of(group, gamma)?;
            let delta = group
                .letters()
                .map(ReducedWord::letter)
                .find(|d| d != gamma)
                .expect("rank ≥ 1 gives two letters");
            let bump = BiCylinderFunction::tensor(&chi(group, gamma)?, &chi(group, &delta)?);
            Ok(v.sub(&PairElement::pair_monomial(gamma.clone(), bump)?))
        }
    }
}

/// The test vectors `χ_u ⊗ e_g`, `|u| ≤ depth`, `|g| ≤ radius`, ordered by `(g, u)` shortlex.
pub fn spanning_set(
    group: FreeGroup,
    radius: usize,
    depth: usize,
    limits: &Limits,
) -> Result<Vec<(ReducedWord, ReducedWord, ModuleVector)>> {
    limits.check_depth(depth)?;
    let labels = group.ball(radius, limits)?;
    let cylinders = group.ball(depth, limits)?;
    let mut out = Vec::with_capacity(labels.len() * cylinders.len());
    for g in &labels {
        for u in &cylinders {
            let a = CrossedElement::function(CylinderFunction::indicator(group, u));
            out.push((u.clone(), g.clone(), ModuleVector::basis(g.clone(), a)));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    /// Test vector `χ_u ⊗ e_g`.
    pub u: ReducedWord,
    pub g: ReducedWord,
    /// Least output label where the two sides differ.
    pub label: ReducedWord,
    pub lhs: String,
    pub rhs: String,
}

impl fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "on chi({}) (x) e_{} at label {}: {} != {}",
            self.u, self.g, self.label, self.lhs, self.rhs
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub checked: usize,
    /// Labels `g` of the test vectors on which the sides differ.
    pub failing_labels: BTreeSet<ReducedWord>,
    pub first: Option<Discrepancy>,
}

impl Comparison {
    pub fn exact(&self) -> bool {
        self.first.is_none()
    }

    /// Largest `|g|` among failing test vectors.
    pub fn support_radius(&self) -> Option<usize> {
        self.failing_labels.iter().map(ReducedWord::len).max()
    }
}

/// Applies both sides to every test vector; the first discrepancy is the least in `(g, u)` order.
pub fn compare_on(
    lhs: &ModuleOperator,
    rhs: &ModuleOperator,
    vectors: &[(ReducedWord, ReducedWord, ModuleVector)],
) -> Comparison {
    let results: Vec<Option<Discrepancy>> = vectors
        .par_iter()
        .map(|(u, g, xi)| {
            let l = lhs.apply(xi);
            let r = rhs.apply(xi);
            l.first_difference(&r).map(|label| Discrepancy {
                u: u.clone(),
                g: g.clone(),
                lhs: l.get(&label).to_string(),
                rhs: r.get(&label).to_string(),
                label,
            })
        })
        .collect();
    let failing_labels = results.iter().flatten().map(|d| d.g.clone()).collect();
    Comparison {
        checked: vectors.len(),
        failing_labels,
        first: results.into_iter().flatten().next(),
    }
}

/// `T(ξ a) = T(ξ) a` for every test vector and every `a`.
pub fn right_linear_on(
    op: &ModuleOperator,
    vectors: &[(ReducedWord, ReducedWord, ModuleVector)],
    elements: &[CrossedElement],
) -> bool {
    vectors.par_iter().all(|(_, _, xi)| {
        let t = op.apply(xi);
        elements.iter().all(|a| op.apply(&xi.right_mul(a)) == t.right_mul(a))
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Scope {
    pub depth: usize,
    pub radius: usize,
}

/// Equality of two operators on the spanning set; right-linearity extends it to the span.
#[derive(Debug, Clone, Serialize)]
pub struct EqualityCertificate {
    pub rank: usize,
    pub scope: Scope,
    pub mutation: String,
    pub checked: usize,
    pub pass: bool,
    pub discrepancy: Option<Discrepancy>,
}

/// `F̄ = W̄` on `{χ_u ⊗ e_g}`.
pub fn final_identity_check(
    group: FreeGroup,
    radius: usize,
    depth: usize,
    mutation: &Mutation,
) -> Result<EqualityCertificate> {
    let limits = Limits::from_env();
    let vectors = spanning_set(group, radius, depth, &limits)?;
    let fbar = build_fbar(&mutated_v(group, mutation)?, &element_chi(group))?;
    let cmp = compare_on(&fbar, &ModuleOperator::Wbar, &vectors);
    Ok(EqualityCertificate {
        rank: group.rank(),
        scope: Scope { depth, radius },
        mutation: mutation.to_string(),
        checked: cmp.checked,
        pass: cmp.exact(),
        discrepancy: cmp.first,
    })
}

/// Structural identities of `V̄` and `P̄`.
#[derive(Debug, Clone, Serialize)]
pub struct VbarReport {
    pub closed_form: Comparison,
    pub pbar_closed_form: Comparison,
    pub vbar_vbar_star: Comparison,
    /// Fails exactly at `g = e`, where `V̄` vanishes but `P̄` does not.
    pub vbar_star_vbar: Comparison,
    pub pass: bool,
}

pub fn vbar_identities(group: FreeGroup, radius: usize, depth: usize) -> Result<VbarReport> {
    let vectors = spanning_set(group, radius, depth, &Limits::from_env())?;
    let vbar = build_vbar(&element_v(group))?;
    let pbar = build_pbar(&element_chi(group))?;
    let closed_form = compare_on(&vbar, &ModuleOperator::VbarClosed, &vectors);
    let pbar_closed_form = compare_on(&pbar, &ModuleOperator::PbarClosed, &vectors);
    let vbar_vbar_star = compare_on(&vbar.clone().then(vbar.adjoint()), &pbar, &vectors);
    let vbar_star_vbar = compare_on(&vbar.adjoint().then(vbar.clone()), &pbar, &vectors);
    let only_identity: BTreeSet<ReducedWord> = [ReducedWord::identity()].into();
    let pass = closed_form.exact()
        && pbar_closed_form.exact()
        && vbar_vbar_star.exact()
        && vbar_star_vbar.failing_labels == only_identity;
    Ok(VbarReport {
        closed_form,
        pbar_closed_form,
        vbar_vbar_star,
        vbar_star_vbar,
        pass,
    })
}

/// Support profile of `x ↦ F̃′(·, x)(k(x) − f)` over `B_radius`, where `k` extends `f` to the ball.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdReport {
    pub radius: usize,
    /// One more than the largest `|x|` with nonzero discrepancy; `0` if it vanishes everywhere.
    pub threshold: usize,
    pub nonzero_labels: Vec<ReducedWord>,
    /// The outermost shell is clean, so the profile has stabilized inside the ball.
    pub pass: bool,
}

pub fn threshold_profile(
    f_pair: &BiCylinderFunction,
    f: &CylinderFunction,
    extension: impl Fn(&ReducedWord) -> Scalar + Sync,
    radius: usize,
) -> Result<ThresholdReport> {
    if !f_pair.vanishes_on_diagonal() {
        return Err(Error::domain("not compactly supported off the diagonal"));
    }
    let group = f.group();
    let labels = group.ball(radius, &Limits::from_env())?;
    let nonzero_labels: Vec<ReducedWord> = labels
        .par_iter()
        .filter(|x| {
            let diff = CylinderFunction::constant(group, extension(x)).sub(f);
            !f_pair.f_prime_unchecked(x).mul(&diff).is_zero()
        })
        .cloned()
        .collect();
    let threshold = nonzero_labels.iter().map(|x| x.len() + 1).max().unwrap_or(0);
    Ok(ThresholdReport {
        radius,
        threshold,
        pass: threshold <= radius,
        nonzero_labels,
    })
}

/// `F̃′(·, x)(f̃(x) − f) = 0` for `|x| ≥ r₀`.
pub fn decay_threshold_check(f_pair: &BiCylinderFunction, f: &CylinderFunction, radius: usize) -> Result<ThresholdReport> {
    threshold_profile(f_pair, f, |x| f.extend(x), radius)
}

/// `τ(b)(1 ⊗ M_f̃)` against `τ(b) φ(f)` for a monomial `b = F u_γ`.
#[derive(Debug, Clone, Serialize)]
pub struct IotaReport {
    pub b: String,
    pub f: String,
    pub scope: Scope,
    pub comparison: Comparison,
    /// Test labels predicted to fail by the threshold calculus, `{xγ : x nonzero}` within the ball.
    pub predicted: BTreeSet<ReducedWord>,
    pub threshold: ThresholdReport,
    pub pass: bool,
}

pub fn iota_check(b: &PairElement, f: &CylinderFunction, radius: usize, depth: usize) -> Result<IotaReport> {
    let group = f.group();
    let mut terms = b.terms().iter();
    let (Some((gamma, f_pair)), None) = (terms.next(), terms.next()) else {
        return Err(Error::domain("iota check needs a monomial F u_γ"));
    };
    let vectors = spanning_set(group, radius, depth, &Limits::from_env())?;
    let tb = tau(b)?;
    let lhs = tb.clone().then(ModuleOperator::ExtendedMult(f.clone()));
    let rhs = tb.then(ModuleOperator::PhiF(f.clone()));
    let comparison = compare_on(&lhs, &rhs, &vectors);
    // The test label g lands at x = gγ⁻¹, where the multiplier was f̃(g) = f̃(xγ).
    let threshold = threshold_profile(f_pair, f, |x| f.extend(&x.mul(gamma)), radius + gamma.len())?;
    let predicted: BTreeSet<ReducedWord> = threshold
        .nonzero_labels
        .iter()
        .map(|x| x.mul(gamma))
        .filter(|g| g.len() <= radius)
        .collect();
    let pass = threshold.pass && predicted == comparison.failing_labels;
    Ok(IotaReport {
        b: b.to_string(),
        f: f.to_string(),
        scope: Scope { depth, radius },
        comparison,
        predicted,
        threshold,
        pass,
    })
}

/// `b ∈ {F_ℓ, F_ℓ u_ℓ}` against `f ∈ {1, χ_ℓ, 1 − χ_ℓ}` over all letters `ℓ`.
pub fn iota_sweep(group: FreeGroup, radius: usize, depth: usize) -> Result<Vec<IotaReport>> {
    let letters: Vec<ReducedWord> = group.letters().map(ReducedWord::letter).collect();
    let mut bs = Vec::new();
    for l in &letters {
        let fl = crate::crossed::f_gamma(group, l)?;
        bs.push(PairElement::pair_monomial(ReducedWord::identity(), fl.clone())?);
        bs.push(PairElement::pair_monomial(l.clone(), fl)?);
    }
    let mut fs = vec![CylinderFunction::one(group)];
    for l in &letters {
        let c = chi(group, l)?;
        fs.push(CylinderFunction::one(group).sub(&c));
        fs.push(c);
    }
    let mut out = Vec::new();
    for b in &bs {
        for f in &fs {
            out.push(iota_check(b, f, radius, depth)?);
        }
    }
    Ok(out)
}

/// Generic small right-module elements `χ_u u_h`, `|u|, |h| ≤ 1`.
pub fn small_elements(group: FreeGroup) -> Vec<CrossedElement> {
    let words = group.ball(1, &Limits::default()).expect("radius 1 is always allowed");
    let mut out = Vec::new();
    for u in &words {
        for h in &words {
            out.push(CrossedElement::monomial(
                group,
                h.clone(),
                CylinderFunction::indicator(group, u),
            ));
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct UntwistReport {
    pub scope: Scope,
    /// `U*U = 1`, `UU* = 1` and `⟨Uξ, Uη⟩ = ⟨ξ, η⟩` on the test vectors.
    pub unitary: bool,
    pub right_linear: bool,
    /// `U (1 ⊗ λ(h)) U* = φ(h)` for letters `h`.
    pub left_regular: Vec<(ReducedWord, Comparison)>,
    /// `U (f₁u_γ ⊗ ρ(f₂u_γ)) U* = τ(F_γ) τ(γ)` up to the reported test labels.
    pub right_regular: Vec<(ReducedWord, Comparison)>,
    pub iota: Vec<IotaReport>,
    pub pass: bool,
}

pub fn untwist_check(group: FreeGroup, radius: usize, depth: usize) -> Result<UntwistReport> {
    let vectors = spanning_set(group, radius, depth, &Limits::from_env())?;
    let u = ModuleOperator::Untwist;
    let ustar = u.adjoint();
    let id = ModuleOperator::Identity;
    let elements = small_elements(group);
    // Test vectors carrying unitaries too, so U is probed beyond the functions.
    let twisted: Vec<(ReducedWord, ReducedWord, ModuleVector)> = vectors
        .iter()
        .filter(|(_, g, _)| g.len() <= 1)
        .flat_map(|(uu, g, xi)| elements.iter().map(move |a| (uu.clone(), g.clone(), xi.right_mul(a))))
        .collect();
    let isometry = compare_on(&ustar.clone().then(u.clone()), &id, &vectors).exact()
        && compare_on(&u.clone().then(ustar.clone()), &id, &vectors).exact()
        && compare_on(&ustar.clone().then(u.clone()), &id, &twisted).exact();
    let inner = twisted.par_iter().all(|(_, _, xi)| {
        twisted.iter().take(16).all(|(_, _, eta)| {
            inner_product(&u.apply(xi), &u.apply(eta)) == inner_product(xi, eta)
        })
    });
    let right_linear = right_linear_on(&u, &vectors, &elements);
    let ad_u = |op: ModuleOperator| ModuleOperator::Product(vec![u.clone(), op, ustar.clone()]);

    let letters: Vec<ReducedWord> = group.letters().map(ReducedWord::letter).collect();
    let left_regular: Vec<(ReducedWord, Comparison)> = letters
        .iter()
        .map(|h| {
            let lhs = ad_u(ModuleOperator::LeftTranslateLabels(h.clone()));
            (h.clone(), compare_on(&lhs, &ModuleOperator::PhiGamma(h.clone()), &vectors))
        })
        .collect();
    let mut right_regular = Vec::new();
    for gamma in &letters {
        let c = chi(group, gamma)?;
        let rest = CylinderFunction::one(group).sub(&c);
        let a1 = CrossedElement::monomial(group, gamma.clone(), c.clone());
        let a1_rho_a2 = ModuleOperator::Product(vec![
            ModuleOperator::LeftMul(a1),
            ModuleOperator::ExtendedMultInverted(rest.clone()),
            ModuleOperator::TauGamma(gamma.clone()),
        ]);
        let b = PairElement::pair_monomial(gamma.clone(), BiCylinderFunction::tensor(&c, &rest))?;
        right_regular.push((gamma.clone(), compare_on(&ad_u(a1_rho_a2), &tau(&b)?, &vectors)));
    }
    let iota = iota_sweep(group, radius, depth)?;
    let unitary = isometry && inner;
    let pass = unitary
        && right_linear
        && left_regular.iter().all(|(_, c)| c.exact())
        && right_regular
            .iter()
            .all(|(_, c)| c.support_radius().is_none_or(|r| r < radius))
        && iota.iter().all(|r| r.pass);
    Ok(UntwistReport {
        scope: Scope { depth, radius },
        unitary,
        right_linear,
        left_regular,
        right_regular,
        iota,
        pass,
    })
}

/// Relations between the ranges of `φ` and `τ`.
#[derive(Debug, Clone, Serialize)]
pub struct CommutationReport {
    /// `[φ(f), τ(F)] = 0` and `[φ(γ), τ(δ)] = 0`.
    pub exact: Vec<(String, Comparison)>,
    /// `[φ(γ), τ(F)]` and `τ(γ)τ(F)τ(γ)* − τ(γ·F)`, finite but nonzero in general.
    pub finite: Vec<(String, Comparison)>,
    pub pass: bool,
}

pub fn commutation_check(group: FreeGroup, radius: usize, depth: usize) -> Result<CommutationReport> {
    let vectors = spanning_set(group, radius, depth, &Limits::from_env())?;
    let letters: Vec<ReducedWord> = group.letters().map(ReducedWord::letter).collect();
    let commutator = |x: &ModuleOperator, y: &ModuleOperator| {
        (x.clone().then(y.clone()), y.clone().then(x.clone()))
    };
    let mut exact = Vec::new();
    let mut finite = Vec::new();
    for gamma in &letters {
        let f_pair = crate::crossed::f_gamma(group, gamma)?;
        let tf = ModuleOperator::tau_f(&f_pair)?;
        for delta in &letters {
            let pf = ModuleOperator::PhiF(chi(group, delta)?);
            let (l, r) = commutator(&pf, &tf);
            exact.push((format!("[phi(chi({delta})), tau(F_{gamma})]"), compare_on(&l, &r, &vectors)));
            let (l, r) = commutator(&ModuleOperator::PhiGamma(delta.clone()), &ModuleOperator::TauGamma(gamma.clone()));
            exact.push((format!("[phi(u({delta})), tau(u({gamma}))]"), compare_on(&l, &r, &vectors)));
            let (l, r) = commutator(&ModuleOperator::PhiGamma(delta.clone()), &tf);
            finite.push((format!("[phi(u({delta})), tau(F_{gamma})]"), compare_on(&l, &r, &vectors)));
            let conj = ModuleOperator::Product(vec![
                ModuleOperator::TauGamma(delta.clone()),
                tf.clone(),
                ModuleOperator::TauGamma(delta.inverse()),
            ]);
            let moved = ModuleOperator::tau_f(&f_pair.translate(delta))?;
            finite.push((format!("tau({delta})tau(F_{gamma})tau({delta})* - tau({delta}.F_{gamma})"), compare_on(&conj, &moved, &vectors)));
        }
    }
    let pass = exact.iter().all(|(_, c)| c.exact())
        && finite
            .iter()
            .all(|(_, c)| c.support_radius().is_none_or(|r| r < radius));
    Ok(CommutationReport { exact, finite, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::word;

    fn f2() -> FreeGroup {
        FreeGroup::new(2).unwrap()
    }

    fn fn_(g: FreeGroup, u: &str) -> CrossedElement {
        CrossedElement::function(CylinderFunction::indicator(g, &word(u)))
    }

    #[test]
    fn vbar_matches_closed_form_and_adjoints() {
        let report = vbar_identities(f2(), 3, 1).unwrap();
        assert!(report.closed_form.exact());
        assert!(report.pbar_closed_form.exact());
        assert!(report.vbar_vbar_star.exact());
        assert_eq!(
            report.vbar_star_vbar.failing_labels.iter().collect::<Vec<_>>(),
            vec![&ReducedWord::identity()]
        );
        assert!(report.pass);
    }

    #[test]
    fn fbar_on_display_vectors() {
        let g = f2();
        let fbar = build_fbar(&element_v(g), &element_chi(g)).unwrap();
        let one = CrossedElement::one(g);
        assert!(fbar.apply(&ModuleVector::basis(ReducedWord::identity(), one.clone())).is_zero());
        // F̄(1 ⊗ e_ab) = χ_ab ⊗ e_a + (1 − χ_ab) ⊗ e_ab.
        let out = fbar.apply(&ModuleVector::basis(word("ab"), one.clone()));
        let c = chi(g, &word("ab")).unwrap();
        let want = ModuleVector::basis(word("a"), CrossedElement::function(c.clone())).add(&ModuleVector::basis(
            word("ab"),
            CrossedElement::function(CylinderFunction::one(g).sub(&c)),
        ));
        assert_eq!(out, want);
    }

    #[test]
    fn final_identity_holds_and_mutations_fail() {
        let g = f2();
        let ok = final_identity_check(g, 3, 1, &Mutation::None).unwrap();
        assert!(ok.pass, "{:?}", ok.discrepancy);
        let dropped = final_identity_check(g, 3, 1, &Mutation::DropVbarTerm(word("a"))).unwrap();
        assert!(!dropped.pass);
        assert_eq!(dropped.discrepancy.unwrap().g, word("a"));
        let perturbed = final_identity_check(g, 3, 1, &Mutation::PerturbV(word("b"))).unwrap();
        assert!(!perturbed.pass);
        assert!(final_identity_check(g, 3, 1, &Mutation::PerturbV(word("ab"))).is_err());
        for m in [Mutation::None, Mutation::DropVbarTerm(word("A")), Mutation::PerturbV(word("b"))] {
            assert_eq!(m.to_string().parse::<Mutation>().unwrap(), m);
        }
        assert!("drop:a".parse::<Mutation>().is_err());
    }

    #[test]
    fn wbar_adjoint_is_an_adjoint() {
        let g = f2();
        let vectors = spanning_set(g, 2, 1, &Limits::default()).unwrap();
        for (_, _, xi) in &vectors {
            for (_, _, eta) in vectors.iter().step_by(5) {
                let lhs = inner_product(&ModuleOperator::Wbar.apply(xi), eta);
                let rhs = inner_product(xi, &ModuleOperator::WbarAdjoint.apply(eta));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn operators_are_right_linear() {
        let g = f2();
        let vectors = spanning_set(g, 2, 1, &Limits::default()).unwrap();
        let elements = small_elements(g);
        let ops = [
            build_fbar(&element_v(g), &element_chi(g)).unwrap(),
            ModuleOperator::Wbar,
            ModuleOperator::Untwist,
            ModuleOperator::PhiGamma(word("aB")),
            ModuleOperator::ExtendedMult(chi(g, &word("b")).unwrap()),
        ];
        for op in &ops {
            assert!(right_linear_on(op, &vectors, &elements), "{op}");
        }
    }

    #[test]
    fn decay_threshold_for_chi_a() {
        let g = f2();
        let f_pair = crate::crossed::f_gamma(g, &word("a")).unwrap();
        let r = decay_threshold_check(&f_pair, &chi(g, &word("a")).unwrap(), 5).unwrap();
        assert_eq!(r.nonzero_labels, vec![ReducedWord::identity()]);
        assert_eq!(r.threshold, 1);
        assert!(r.pass);
    }

    #[test]
    fn untwist_and_iota() {
        let report = untwist_check(f2(), 3, 1).unwrap();
        assert!(report.unitary);
        assert!(report.right_linear);
        assert!(report.left_regular.iter().all(|(_, c)| c.exact()));
        for r in &report.iota {
            assert!(r.pass, "{} {} {:?} {:?}", r.b, r.f, r.predicted, r.comparison.failing_labels);
        }
        assert!(report.pass);
    }

    #[test]
    fn commutation_ranges() {
        let report = commutation_check(f2(), 3, 1).unwrap();
        assert!(report.pass, "{:?}", report.exact.iter().find(|(_, c)| !c.exact()));
    }

    #[test]
    fn module_vector_algebra() {
        let g = f2();
        let xi = ModuleVector::basis(word("a"), fn_(g, "b"));
        assert!(xi.sub(&xi).is_zero());
        let inner = inner_product(&xi, &xi);
        assert_eq!(inner, fn_(g, "b"));
        assert_eq!(xi.right_mul(&fn_(g, "B")), ModuleVector::zero(g));
        assert!(ModuleOperator::tau_f(&BiCylinderFunction::one(g)).is_err());
    }
}
