//! Truncated operators on `ℓ²(B_R(e))` and on the edges inside `B_R(e)`.
//!
//! Every operator carries the bookkeeping needed to know which of its columns agree exactly with
//! the untruncated operator on the whole tree:
//!
//! * `valid`: columns of labels with norm `≤ valid` are exact;
//! * `growth`, `shrink`: every nonzero entry `(y, x)` of the untruncated operator satisfies
//!   `|x| − shrink ≤ |y| ≤ |x| + growth`;
//! * `propagation`: a bound on `d(x, y) = |x⁻¹y|` over nonzero entries, when one exists.
//!
//! Certificates only ever look at exact columns, so statements about small radii are exact
//! statements about the operators on `ℓ²F_n`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::boundary::CylinderFunction;
use crate::error::{Error, Result};
use crate::free_group::{FreeGroup, ReducedWord};
use crate::limits::Limits;
use crate::linalg;
use crate::scalar::Scalar;

/// A basis vector: a vertex `e_x`, or the edge `{x′, x}` keyed by its endpoint `x` farther from `e`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Vertex(ReducedWord),
    Edge(ReducedWord),
}

impl Label {
    pub fn norm(&self) -> usize {
        match self {
            Label::Vertex(x) | Label::Edge(x) => x.len(),
        }
    }

    pub fn word(&self) -> &ReducedWord {
        match self {
            Label::Vertex(x) | Label::Edge(x) => x,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Vertex(x) => write!(f, "e_{x}"),
            Label::Edge(x) => match x.parent() {
                Some(p) => write!(f, "e_{{{p},{x}}}"),
                None => write!(f, "e_{{?,{x}}}"),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    Vertices,
    Edges,
}

/// Vertices of `B_R`, or edges with both endpoints in `B_R`, in shortlex order of their keys.
#[derive(Debug)]
pub struct Basis {
    kind: BasisKind,
    group: FreeGroup,
    radius: usize,
    labels: Vec<Label>,
    index: HashMap<Label, usize>,
}

impl PartialEq for Basis {
    fn eq(&self, other: &Self) -> bool {
        (self.kind, self.group, self.radius) == (other.kind, other.group, other.radius)
    }
}

impl Basis {
    pub fn vertices(group: FreeGroup, radius: usize, limits: &Limits) -> Result<Arc<Basis>> {
        let words = group.ball(radius, limits)?;
        Ok(Self::build(BasisKind::Vertices, group, radius, words.into_iter().map(Label::Vertex)))
    }

    pub fn edges(group: FreeGroup, radius: usize, limits: &Limits) -> Result<Arc<Basis>> {
        let words = group.ball(radius, limits)?;
        Ok(Self::build(
            BasisKind::Edges,
            group,
            radius,
            words.into_iter().filter(|w| !w.is_identity()).map(Label::Edge),
        ))
    }

    fn build(kind: BasisKind, group: FreeGroup, radius: usize, labels: impl Iterator<Item = Label>) -> Arc<Basis> {
        let labels: Vec<Label> = labels.collect();
        let index = labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        Arc::new(Basis {
            kind,
            group,
            radius,
            labels,
            index,
        })
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn group(&self) -> FreeGroup {
        self.group
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &Label {
        &self.labels[i]
    }

    pub fn index_of(&self, l: &Label) -> Option<usize> {
        self.index.get(l).copied()
    }
}

type Column = Vec<(usize, Scalar)>;

/// A sparse exact matrix between two truncated bases, stored by columns.
#[derive(Clone)]
pub struct TruncatedOperator {
    domain: Arc<Basis>,
    codomain: Arc<Basis>,
    columns: Vec<Column>,
    valid: isize,
    growth: usize,
    shrink: usize,
    propagation: Option<usize>,
}

/// Bounds describing how far an operator moves labels; see the module documentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Spread {
    pub growth: usize,
    pub shrink: usize,
    pub propagation: Option<usize>,
}

impl Spread {
    pub fn symmetric(k: usize, propagation: Option<usize>) -> Self {
        Spread {
            growth: k,
            shrink: k,
            propagation,
        }
    }
}

fn normalize(mut col: BTreeMap<usize, Scalar>) -> Column {
    col.retain(|_, s| !s.is_zero());
    col.into_iter().collect()
}

impl TruncatedOperator {
    /// Builds an operator from its action on basis labels, given as a function computing the
    /// untruncated column. A column is exact iff none of its entries leaves the codomain; such
    /// escaping entries are dropped and lower `valid` below the norm of the offending column.
    pub fn from_exact_columns(
        domain: Arc<Basis>,
        codomain: Arc<Basis>,
        spread: Spread,
        column: impl Fn(&Label) -> Vec<(Label, Scalar)>,
    ) -> Self {
        let mut valid = domain.radius() as isize;
        let columns = domain
            .labels()
            .iter()
            .map(|x| {
                let mut col = BTreeMap::new();
                for (y, s) in column(x) {
                    match codomain.index_of(&y) {
                        Some(i) => {
                            let e: &mut Scalar = col.entry(i).or_insert_with(Scalar::zero);
                            *e += &s;
                        }
                        None => {
                            if !s.is_zero() {
                                valid = valid.min(x.norm() as isize - 1);
                            }
                        }
                    }
                }
                normalize(col)
            })
            .collect();
        TruncatedOperator {
            domain,
            codomain,
            columns,
            valid,
            growth: spread.growth,
            shrink: spread.shrink,
            propagation: spread.propagation,
        }
    }

    pub fn identity(basis: Arc<Basis>) -> Self {
        Self::diagonal(basis, |_| Scalar::one())
    }

    pub fn zero(domain: Arc<Basis>, codomain: Arc<Basis>) -> Self {
        let n = domain.len();
        let valid = domain.radius() as isize;
        TruncatedOperator {
            domain,
            codomain,
            columns: vec![Vec::new(); n],
            valid,
            growth: 0,
            shrink: 0,
            propagation: Some(0),
        }
    }

    pub fn diagonal(basis: Arc<Basis>, value: impl Fn(&Label) -> Scalar) -> Self {
        Self::from_exact_columns(basis.clone(), basis, Spread::symmetric(0, Some(0)), |x| {
            vec![(x.clone(), value(x))]
        })
    }

    pub fn domain(&self) -> &Arc<Basis> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<Basis> {
        &self.codomain
    }

    /// Largest norm up to which columns are exact (negative when none are).
    pub fn valid_radius(&self) -> isize {
        self.valid
    }

    pub fn spread(&self) -> Spread {
        Spread {
            growth: self.growth,
            shrink: self.shrink,
            propagation: self.propagation,
        }
    }

    pub fn column(&self, j: usize) -> &[(usize, Scalar)] {
        &self.columns[j]
    }

    pub fn entry(&self, row: &Label, col: &Label) -> Scalar {
        let (Some(i), Some(j)) = (self.codomain.index_of(row), self.domain.index_of(col)) else {
            return Scalar::zero();
        };
        self.columns[j]
            .iter()
            .find(|(r, _)| *r == i)
            .map(|(_, s)| s.clone())
            .unwrap_or_else(Scalar::zero)
    }

    /// Image of a basis vector, as labelled entries.
    pub fn apply_label(&self, col: &Label) -> Vec<(Label, Scalar)> {
        match self.domain.index_of(col) {
            Some(j) => self.columns[j]
                .iter()
                .map(|(i, s)| (self.codomain.label(*i).clone(), s.clone()))
                .collect(),
            None => Vec::new(),
        }
    }

    fn check_same(&self, a: &Basis, b: &Basis, what: &str) -> Result<()> {
        if a == b {
            Ok(())
        } else {
            Err(Error::BasisMismatch(format!(
                "{what}: {:?}(R={}) vs {:?}(R={})",
                a.kind(),
                a.radius(),
                b.kind(),
                b.radius()
            )))
        }
    }

    /// `self · other`.
    pub fn compose(&self, other: &TruncatedOperator) -> Result<TruncatedOperator> {
        self.check_same(&self.domain, &other.codomain, "composition")?;
        let columns = other
            .columns
            .iter()
            .map(|col| {
                let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
                for (k, s) in col {
                    for (i, t) in &self.columns[*k] {
                        let e = acc.entry(*i).or_insert_with(Scalar::zero);
                        *e += &(s * t);
                    }
                }
                normalize(acc)
            })
            .collect();
        Ok(TruncatedOperator {
            domain: other.domain.clone(),
            codomain: self.codomain.clone(),
            columns,
            valid: other.valid.min(self.valid - other.growth as isize),
            growth: self.growth + other.growth,
            shrink: self.shrink + other.shrink,
            propagation: self.propagation.zip(other.propagation).map(|(p, q)| p + q),
        })
    }

    fn combine(&self, other: &TruncatedOperator, sign: &Scalar) -> Result<TruncatedOperator> {
        self.check_same(&self.domain, &other.domain, "sum domain")?;
        self.check_same(&self.codomain, &other.codomain, "sum codomain")?;
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| {
                let mut acc: BTreeMap<usize, Scalar> = a.iter().cloned().collect();
                for (i, s) in b {
                    let e = acc.entry(*i).or_insert_with(Scalar::zero);
                    *e += &(sign * s);
                }
                normalize(acc)
            })
            .collect();
        Ok(TruncatedOperator {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            columns,
            valid: self.valid.min(other.valid),
            growth: self.growth.max(other.growth),
            shrink: self.shrink.max(other.shrink),
            propagation: self.propagation.zip(other.propagation).map(|(p, q)| p.max(q)),
        })
    }

    pub fn add(&self, other: &TruncatedOperator) -> Result<TruncatedOperator> {
        self.combine(other, &Scalar::one())
    }

    pub fn sub(&self, other: &TruncatedOperator) -> Result<TruncatedOperator> {
        self.combine(other, &Scalar::from(-1))
    }

    pub fn scale(&self, c: &Scalar) -> TruncatedOperator {
        let mut out = self.clone();
        for col in &mut out.columns {
            for (_, s) in col.iter_mut() {
                *s = c * s;
            }
            col.retain(|(_, s)| !s.is_zero());
        }
        out
    }

    /// Conjugate transpose; exact on columns of norm `≤ valid − shrink`.
    pub fn adjoint(&self) -> TruncatedOperator {
        let mut cols: Vec<BTreeMap<usize, Scalar>> = vec![BTreeMap::new(); self.codomain.len()];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, s) in col {
                cols[*i].insert(j, s.conj());
            }
        }
        TruncatedOperator {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            columns: cols.into_iter().map(normalize).collect(),
            valid: self.valid - self.shrink as isize,
            growth: self.shrink,
            shrink: self.growth,
            propagation: self.propagation,
        }
    }

    pub fn commutator(&self, other: &TruncatedOperator) -> Result<TruncatedOperator> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    /// Indices of domain labels whose columns are exact.
    pub fn certified_columns(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.domain.len()).filter(|&j| self.domain.label(j).norm() as isize <= self.valid)
    }

    /// Nonzero entries in exact columns, as `(row, col, value)`.
    pub fn certified_entries(&self) -> Vec<(Label, Label, Scalar)> {
        self.certified_columns()
            .flat_map(|j| {
                self.columns[j].iter().map(move |(i, s)| {
                    (self.codomain.label(*i).clone(), self.domain.label(j).clone(), s.clone())
                })
            })
            .collect()
    }

    /// Whether the exact columns of the two operators agree.
    pub fn agrees_on_interior(&self, other: &TruncatedOperator) -> Result<bool> {
        Ok(self.first_interior_difference(other)?.is_none())
    }

    /// First exact column (in basis order) where the operators differ.
    pub fn first_interior_difference(&self, other: &TruncatedOperator) -> Result<Option<Label>> {
        self.check_same(&self.domain, &other.domain, "comparison domain")?;
        self.check_same(&self.codomain, &other.codomain, "comparison codomain")?;
        let v = self.valid.min(other.valid);
        Ok((0..self.domain.len())
            .filter(|&j| self.domain.label(j).norm() as isize <= v)
            .find(|&j| self.columns[j] != other.columns[j])
            .map(|j| self.domain.label(j).clone()))
    }

    pub fn support_certificate(&self, description: impl Into<String>) -> SupportCertificate {
        let entries = self.certified_entries();
        let support_radius = entries
            .iter()
            .map(|(y, x, _)| y.norm().max(x.norm()))
            .max();
        let cols: Vec<&[(usize, Scalar)]> = self
            .certified_columns()
            .map(|j| self.columns[j].as_slice())
            .collect();
        SupportCertificate {
            description: description.into(),
            support_radius,
            rank: linalg::rank(cols),
            interior_radius: self.valid,
            nonzero_entries: entries.len(),
            exact: true,
            bound: None,
            pass: true,
        }
    }

    /// Crude float estimate of the operator norm by power iteration on `T*T`. Diagnostic only.
    pub fn norm_estimate(&self, iterations: usize) -> f64 {
        let n = self.domain.len();
        if n == 0 {
            return 0.0;
        }
        let to_f = |s: &Scalar| s.to_f64_pair();
        let mut x: Vec<(f64, f64)> = (0..n).map(|j| (1.0 + (j % 7) as f64 * 0.1, 0.0)).collect();
        let mut est = 0.0;
        for _ in 0..iterations {
            let mut y = vec![(0.0, 0.0); self.codomain.len()];
            for (j, col) in self.columns.iter().enumerate() {
                for (i, s) in col {
                    let (a, b) = to_f(s);
                    y[*i].0 += a * x[j].0 - b * x[j].1;
                    y[*i].1 += a * x[j].1 + b * x[j].0;
                }
            }
            let mut z = vec![(0.0, 0.0); n];
            for (j, col) in self.columns.iter().enumerate() {
                for (i, s) in col {
                    let (a, b) = to_f(s);
                    z[j].0 += a * y[*i].0 + b * y[*i].1;
                    z[j].1 += a * y[*i].1 - b * y[*i].0;
                }
            }
            let norm: f64 = z.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            let xn: f64 = x.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
            est = (norm / xn).sqrt();
            x = z.into_iter().map(|(a, b)| (a / norm, b / norm)).collect();
        }
        est
    }
}

impl fmt::Debug for TruncatedOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "TruncatedOperator {:?}(R={}) -> {:?}(R={}), valid {}",
            self.domain.kind(),
            self.domain.radius(),
            self.codomain.kind(),
            self.codomain.radius(),
            self.valid
        )?;
        for (j, col) in self.columns.iter().enumerate() {
            for (i, s) in col {
                writeln!(f, "  [{}, {}] = {s}", self.codomain.label(*i), self.domain.label(j))?;
            }
        }
        Ok(())
    }
}

/// Exact finite-support statement about an operator, restricted to its exact columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportCertificate {
    pub description: String,
    /// Largest `max(|x|, |y|)` over nonzero exact entries `(y, x)`; `None` for the zero operator.
    pub support_radius: Option<usize>,
    pub rank: usize,
    pub interior_radius: isize,
    pub nonzero_entries: usize,
    pub exact: bool,
    pub bound: Option<usize>,
    pub pass: bool,
}

impl SupportCertificate {
    /// Requires the support to lie in `B_bound`; with `bound = None`, requires the operator to
    /// vanish.
    pub fn require_within(mut self, bound: Option<usize>) -> Self {
        self.bound = bound;
        self.pass = match (self.support_radius, bound) {
            (None, _) => true,
            (Some(r), Some(b)) => r <= b,
            (Some(_), None) => false,
        };
        self
    }
}

fn vertices(group: FreeGroup, radius: usize) -> Result<Arc<Basis>> {
    Basis::vertices(group, radius, &Limits::from_env())
}

/// `M_f̃`, the multiplication operator by the canonical extension of `f`.
pub fn op_mult(f: &CylinderFunction, radius: usize) -> Result<TruncatedOperator> {
    let basis = vertices(f.group(), radius)?;
    Ok(TruncatedOperator::diagonal(basis, |x| f.extend(x.word())))
}

/// `M_{f̃∘ι}`, multiplication by `x ↦ f̃(x⁻¹)`.
pub fn op_mult_inverted(f: &CylinderFunction, radius: usize) -> Result<TruncatedOperator> {
    let basis = vertices(f.group(), radius)?;
    Ok(TruncatedOperator::diagonal(basis, |x| f.extend(&x.word().inverse())))
}

/// `λ(γ) e_x = e_{γx}`.
pub fn op_left(group: FreeGroup, gamma: &ReducedWord, radius: usize) -> Result<TruncatedOperator> {
    let basis = vertices(group, radius)?;
    Ok(TruncatedOperator::from_exact_columns(
        basis.clone(),
        basis,
        Spread::symmetric(gamma.len(), None),
        |x| vec![(Label::Vertex(gamma.mul(x.word())), Scalar::one())],
    ))
}

/// `ρ(γ) e_x = e_{xγ⁻¹}`.
pub fn op_right(group: FreeGroup, gamma: &ReducedWord, radius: usize) -> Result<TruncatedOperator> {
    let basis = vertices(group, radius)?;
    let inv = gamma.inverse();
    Ok(TruncatedOperator::from_exact_columns(
        basis.clone(),
        basis,
        Spread::symmetric(gamma.len(), Some(gamma.len())),
        |x| vec![(Label::Vertex(x.word().mul(&inv)), Scalar::one())],
    ))
}

/// `I e_x = e_{x⁻¹}`.
pub fn op_inversion(group: FreeGroup, radius: usize) -> Result<TruncatedOperator> {
    let basis = vertices(group, radius)?;
    Ok(TruncatedOperator::from_exact_columns(
        basis.clone(),
        basis,
        Spread::symmetric(0, None),
        |x| vec![(Label::Vertex(x.word().inverse()), Scalar::one())],
    ))
}

/// A monomial `f u_γ` of the crossed product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub f: CylinderFunction,
    pub gamma: ReducedWord,
}

impl Monomial {
    pub fn new(f: CylinderFunction, gamma: ReducedWord) -> Self {
        Monomial { f, gamma }
    }

    fn size(&self) -> usize {
        self.f.depth() + self.gamma.len()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})*u({})", self.f, self.gamma)
    }
}

/// `λ(f u_γ) = M_f̃ λ(γ)`.
pub fn op_lambda(x: &Monomial, radius: usize) -> Result<TruncatedOperator> {
    op_mult(&x.f, radius)?.compose(&op_left(x.f.group(), &x.gamma, radius)?)
}

/// `ρ(f u_γ) = M_{f̃∘ι} ρ(γ)`.
pub fn op_rho(x: &Monomial, radius: usize) -> Result<TruncatedOperator> {
    op_mult_inverted(&x.f, radius)?.compose(&op_right(x.f.group(), &x.gamma, radius)?)
}

/// `[M_f̃, ρ(γ)]`, certified to live in `B_{depth(f) + |γ| − 1}`.
pub fn mult_right_commutator(f: &CylinderFunction, gamma: &ReducedWord, radius: usize) -> Result<SupportCertificate> {
    let c = op_mult(f, radius)?.commutator(&op_right(f.group(), gamma, radius)?)?;
    let bound = (f.depth() + gamma.len()).checked_sub(1);
    Ok(c
        .support_certificate(format!("[M({f}), rho({gamma})]"))
        .require_within(bound))
}

/// Certificates for `[λ(x), ρ(y)]` and for the conjugation symmetry `I λ(x) ρ(y) I = ρ(x) λ(y)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommuteCertificate {
    pub commutator: SupportCertificate,
    pub conjugation_symmetric: bool,
}

impl CommuteCertificate {
    pub fn pass(&self) -> bool {
        self.commutator.pass && self.conjugation_symmetric
    }
}

pub fn lambda_rho_commute_check(x: &Monomial, y: &Monomial, radius: usize) -> Result<CommuteCertificate> {
    let needed = x.size() + y.size() + 2;
    if radius < needed {
        return Err(Error::Resource {
            what: "truncation radius for the commutation check",
            requested: needed,
            limit: radius,
        });
    }
    let g = x.f.group();
    let lx = op_lambda(x, radius)?;
    let ry = op_rho(y, radius)?;
    let c = lx.commutator(&ry)?;
    let cert = c
        .support_certificate(format!("[lambda({x}), rho({y})]"))
        .require_within(Some(x.size() + y.size()));
    let inv = op_inversion(g, radius)?;
    let lhs = inv.compose(&lx.compose(&ry)?)?.compose(&inv)?;
    let rhs = op_rho(x, radius)?.compose(&op_lambda(y, radius)?)?;
    Ok(CommuteCertificate {
        commutator: cert,
        conjugation_symmetric: lhs.agrees_on_interior(&rhs)?,
    })
}

/// Kernel and cokernel dimensions behind an index computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IndexReport {
    pub radius: usize,
    pub kernel: usize,
    pub cokernel: usize,
    pub index: i64,
}

/// `dim ker T − dim ker T*`, with `T` restricted to domain labels of norm `≤ r` and `T*` to
/// codomain labels of norm `≤ r`. Requires `T` to map the first span into the second.
pub fn exact_index(t: &TruncatedOperator, r: usize) -> Result<IndexReport> {
    let ts = t.adjoint();
    if r as isize > ts.valid_radius() {
        return Err(Error::Resource {
            what: "index radius",
            requested: r,
            limit: ts.valid_radius().max(0) as usize,
        });
    }
    let dom: Vec<usize> = (0..t.domain.len()).filter(|&j| t.domain.label(j).norm() <= r).collect();
    for &j in &dom {
        if let Some((i, _)) = t.columns[j].iter().find(|(i, _)| t.codomain.label(*i).norm() > r) {
            return Err(Error::domain(format!(
                "interior not invariant: {} is sent to {}",
                t.domain.label(j),
                t.codomain.label(*i)
            )));
        }
    }
    let cod: Vec<usize> = (0..ts.domain.len()).filter(|&j| ts.domain.label(j).norm() <= r).collect();
    let rank_t = linalg::rank(dom.iter().map(|&j| t.columns[j].as_slice()));
    let rank_ts = linalg::rank(cod.iter().map(|&j| ts.columns[j].as_slice()));
    let kernel = dom.len() - rank_t;
    let cokernel = cod.len() - rank_ts;
    Ok(IndexReport {
        radius: r,
        kernel,
        cokernel,
        index: kernel as i64 - cokernel as i64,
    })
}
