//! Reduced words, the Cayley tree, and eventually periodic boundary points of a free group.
//!
//! Generators are written `a`, `b`, `c`, ... and their inverses `A`, `B`, `C`, ...;
//! the identity is written `1`. A boundary point is written `head(period)`, e.g. `ab(ba)`
//! for the stream `abbababa...`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::limits::Limits;

/// Highest supported rank (letters `a`..`z`).
pub const MAX_RANK: usize = 26;

/// A generator or its inverse. Letters are ordered `a < A < b < B < ...`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u8);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Letter {
        assert!(generator < MAX_RANK, "generator index {generator} out of range");
        Letter((generator as u8) << 1 | inverse as u8)
    }

    /// Dense index in `0..2n`; inverse pairs are adjacent.
    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn from_code(code: usize) -> Letter {
        Letter::new(code >> 1, code & 1 == 1)
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn sign(self) -> i8 {
        if self.is_inverse() {
            -1
        } else {
            1
        }
    }

    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    pub fn to_char(self) -> char {
        let c = (b'a' + self.generator() as u8) as char;
        if self.is_inverse() {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        if c.is_ascii_lowercase() {
            Some(Letter::new((c as u8 - b'a') as usize, false))
        } else if c.is_ascii_uppercase() {
            Some(Letter::new((c as u8 - b'A') as usize, true))
        } else {
            None
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// A freely reduced word; the empty word is the identity.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ReducedWord(Vec<Letter>);

/// Free reduction of an arbitrary letter sequence.
pub fn reduce<I: IntoIterator<Item = Letter>>(seq: I) -> ReducedWord {
    let mut out: Vec<Letter> = Vec::new();
    for l in seq {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    ReducedWord(out)
}

impl ReducedWord {
    pub fn identity() -> Self {
        ReducedWord(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        ReducedWord(vec![l])
    }

    /// Wraps letters that are already known to be reduced.
    pub fn from_reduced(letters: Vec<Letter>) -> Result<Self> {
        if letters.windows(2).any(|w| w[0] == w[1].inverse()) {
            return Err(Error::domain("letter sequence is not reduced"));
        }
        Ok(ReducedWord(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    /// Largest generator index used, plus one.
    pub fn min_rank(&self) -> usize {
        self.0.iter().map(|l| l.generator() + 1).max().unwrap_or(0)
    }

    pub fn inverse(&self) -> ReducedWord {
        ReducedWord(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn mul(&self, other: &ReducedWord) -> ReducedWord {
        let mut k = 0;
        while k < self.len() && k < other.len() && self.0[self.len() - 1 - k] == other.0[k].inverse()
        {
            k += 1;
        }
        let mut out = Vec::with_capacity(self.len() + other.len() - 2 * k);
        out.extend_from_slice(&self.0[..self.len() - k]);
        out.extend_from_slice(&other.0[k..]);
        ReducedWord(out)
    }

    pub fn mul_letter(&self, l: Letter) -> ReducedWord {
        let mut out = self.0.clone();
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
        ReducedWord(out)
    }

    /// Word-metric distance |x⁻¹y|.
    pub fn distance(&self, other: &ReducedWord) -> usize {
        let common = self.common_prefix_len(other);
        self.len() + other.len() - 2 * common
    }

    pub fn common_prefix_len(&self, other: &ReducedWord) -> usize {
        self.0
            .iter()
            .zip(other.0.iter())
            .take_while(|(a, b)| a == b)
            .count()
    }

    /// First `k` letters (the whole word if shorter).
    pub fn prefix(&self, k: usize) -> ReducedWord {
        ReducedWord(self.0[..k.min(self.len())].to_vec())
    }

    /// The neighbour one step closer to the identity.
    pub fn parent(&self) -> Option<ReducedWord> {
        if self.is_empty() {
            None
        } else {
            Some(self.prefix(self.len() - 1))
        }
    }

    /// True iff `self` lies on the tree geodesic `[e, y]`, i.e. `y` begins with `self`.
    pub fn is_initial(&self, y: &ReducedWord) -> bool {
        y.0.starts_with(&self.0)
    }

    pub fn ends_with(&self, l: Letter) -> bool {
        self.last() == Some(l)
    }

    /// Appends a letter that does not cancel; panics otherwise.
    pub fn extended(&self, l: Letter) -> ReducedWord {
        assert_ne!(self.last(), Some(l.inverse()), "extension would cancel");
        let mut v = self.0.clone();
        v.push(l);
        ReducedWord(v)
    }
}

/// Shortlex: shorter words first, then lexicographic in letter order.
impl Ord for ReducedWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for ReducedWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl Serialize for ReducedWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parses a letter string without reducing it.
pub fn parse_letters(s: &str) -> Result<Vec<Letter>> {
    let s = s.trim();
    if s == "1" || s == "e" || s.is_empty() {
        return Ok(Vec::new());
    }
    s.chars()
        .map(|c| Letter::from_char(c).ok_or_else(|| Error::Parse(format!("bad letter {c:?} in {s:?}"))))
        .collect()
}

impl FromStr for ReducedWord {
    type Err = Error;
    /// Parses and freely reduces.
    fn from_str(s: &str) -> Result<Self> {
        Ok(reduce(parse_letters(s)?))
    }
}

/// Shorthand used throughout tests and fixtures; panics on malformed input.
pub fn word(s: &str) -> ReducedWord {
    s.parse().expect("malformed word literal")
}

/// The free group of a fixed rank, viewed through its Cayley tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FreeGroup {
    rank: usize,
}

impl FreeGroup {
    pub fn new(rank: usize) -> Result<Self> {
        if !(2..=MAX_RANK).contains(&rank) {
            return Err(Error::domain(format!(
                "rank must lie in 2..={MAX_RANK}, got {rank}"
            )));
        }
        Ok(FreeGroup { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of letters, 2n; also the degree of the Cayley tree.
    pub fn degree(&self) -> usize {
        2 * self.rank
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + Clone {
        (0..self.degree()).map(Letter::from_code)
    }

    /// Letters that may follow `last` without cancelling, in letter order.
    pub fn continuations(&self, last: Option<Letter>) -> impl Iterator<Item = Letter> + Clone {
        let banned = last.map(|l| l.inverse());
        self.letters().filter(move |l| Some(*l) != banned)
    }

    pub fn contains(&self, w: &ReducedWord) -> bool {
        w.min_rank() <= self.rank
    }

    /// All reduced words of length exactly `len`, in shortlex order.
    pub fn sphere(&self, len: usize) -> Vec<ReducedWord> {
        let mut layer = vec![ReducedWord::identity()];
        for _ in 0..len {
            layer = layer
                .iter()
                .flat_map(|w| self.continuations(w.last()).map(move |l| w.extended(l)))
                .collect();
        }
        layer
    }

    /// All reduced words of length at most `radius`, in shortlex order.
    pub fn ball(&self, radius: usize, limits: &Limits) -> Result<Vec<ReducedWord>> {
        limits.check_radius(self.rank, radius)?;
        Ok(self.ball_unchecked(radius))
    }

    /// All boundary points `head(period)` with `|head| ≤ max_head` and `|period| ≤ max_period`,
    /// deduplicated and sorted.
    pub fn periodic_points(&self, max_head: usize, max_period: usize) -> Vec<BoundaryPoint> {
        let heads = self.ball_unchecked(max_head);
        let mut out = std::collections::BTreeSet::new();
        for p in 1..=max_period {
            for period in self.sphere(p) {
                for head in &heads {
                    if let Ok(x) = BoundaryPoint::new(head, &period) {
                        out.insert(x);
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    pub(crate) fn ball_unchecked(&self, radius: usize) -> Vec<ReducedWord> {
        let mut out = vec![ReducedWord::identity()];
        let mut start = 0;
        for _ in 0..radius {
            let end = out.len();
            for i in start..end {
                let w = out[i].clone();
                for l in self.continuations(w.last()) {
                    out.push(w.extended(l));
                }
            }
            start = end;
        }
        out
    }
}

/// An eventually periodic point of the boundary: the stream `head · period · period · ...`.
///
/// Stored canonically (primitive period, shortest head) so equality of points is field equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundaryPoint {
    head: Vec<Letter>,
    period: Vec<Letter>,
}

impl BoundaryPoint {
    pub fn new(head: &ReducedWord, period: &ReducedWord) -> Result<Self> {
        let head = head.letters().to_vec();
        let period = period.letters().to_vec();
        if period.is_empty() {
            return Err(Error::domain("boundary point needs a nonempty period"));
        }
        let (p0, pl) = (period[0], period[period.len() - 1]);
        if pl == p0.inverse() {
            return Err(Error::domain("period is not cyclically reduced"));
        }
        if head.last() == Some(&p0.inverse()) {
            return Err(Error::domain("head cancels against the period"));
        }
        Ok(Self::canonical(head, period))
    }

    /// The stream `ℓ ℓ ℓ ...`.
    pub fn constant(l: Letter) -> Self {
        BoundaryPoint {
            head: Vec::new(),
            period: vec![l],
        }
    }

    fn canonical(mut head: Vec<Letter>, mut period: Vec<Letter>) -> Self {
        let p = period.len();
        let primitive = (1..=p)
            .filter(|q| p.is_multiple_of(*q))
            .find(|&q| (q..p).all(|i| period[i] == period[i - q]))
            .unwrap_or(p);
        period.truncate(primitive);
        while let Some(&h) = head.last() {
            if h != *period.last().unwrap() {
                break;
            }
            head.pop();
            period.rotate_right(1);
        }
        BoundaryPoint { head, period }
    }

    pub fn head(&self) -> ReducedWord {
        ReducedWord(self.head.clone())
    }

    pub fn period(&self) -> ReducedWord {
        ReducedWord(self.period.clone())
    }

    pub fn min_rank(&self) -> usize {
        self.head
            .iter()
            .chain(self.period.iter())
            .map(|l| l.generator() + 1)
            .max()
            .unwrap_or(0)
    }

    /// The infinite letter stream.
    pub fn stream(&self) -> impl Iterator<Item = Letter> + Clone + '_ {
        self.head
            .iter()
            .copied()
            .chain(self.period.iter().copied().cycle())
    }

    pub fn letter_at(&self, i: usize) -> Letter {
        if i < self.head.len() {
            self.head[i]
        } else {
            self.period[(i - self.head.len()) % self.period.len()]
        }
    }

    /// First `d` letters of the stream.
    pub fn prefix(&self, d: usize) -> ReducedWord {
        ReducedWord(self.stream().take(d).collect())
    }

    /// True iff `x` lies on the ray `[e, self)`.
    pub fn lies_on_ray(&self, x: &ReducedWord) -> bool {
        x.letters()
            .iter()
            .zip(self.stream())
            .all(|(a, b)| *a == b)
    }

    /// Length of the longest common prefix; `None` iff the points coincide.
    pub fn meet_len(&self, other: &BoundaryPoint) -> Option<usize> {
        if self == other {
            return None;
        }
        // Distinct eventually periodic streams differ before this bound.
        let bound = self.head.len().max(other.head.len()) + self.period.len() * other.period.len() + 1;
        (0..bound).find(|&i| self.letter_at(i) != other.letter_at(i))
    }

    /// Vertex where the rays towards the two points separate.
    pub fn meet(&self, other: &BoundaryPoint) -> Option<ReducedWord> {
        self.meet_len(other).map(|k| self.prefix(k))
    }

    /// Left translation `γ · self`.
    pub fn act(&self, gamma: &ReducedWord) -> BoundaryPoint {
        let w = gamma.letters();
        let mut k = 0;
        while k < w.len() && w[w.len() - 1 - k] == self.letter_at(k).inverse() {
            k += 1;
        }
        let (rest_head, period) = if k <= self.head.len() {
            (self.head[k..].to_vec(), self.period.clone())
        } else {
            let mut p = self.period.clone();
            let n = p.len();
            p.rotate_left((k - self.head.len()) % n);
            (Vec::new(), p)
        };
        let mut head = w[..w.len() - k].to_vec();
        head.extend(rest_head);
        Self::canonical(head, period)
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.head {
            write!(f, "{}", l.to_char())?;
        }
        write!(f, "(")?;
        for l in &self.period {
            write!(f, "{}", l.to_char())?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for BoundaryPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for BoundaryPoint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("boundary point must look like head(period): {s:?}"));
        let open = s.find('(').ok_or_else(bad)?;
        if !s.ends_with(')') {
            return Err(bad());
        }
        let head = parse_letters(&s[..open])?;
        let period = parse_letters(&s[open + 1..s.len() - 1])?;
        let head = ReducedWord::from_reduced(head)?;
        let period = ReducedWord::from_reduced(period)?;
        BoundaryPoint::new(&head, &period)
    }
}

/// Shorthand for boundary-point literals; panics on malformed input.
pub fn point(s: &str) -> BoundaryPoint {
    s.parse().expect("malformed boundary point literal")
}

/// A finite window `[lo, hi]` of the bi-infinite geodesic from `from` (at −∞) to `to` (at +∞).
///
/// Index 0 is the vertex of the geodesic nearest the identity, which is the meet of the two rays.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeodesicWindow {
    pub lo: i64,
    pub vertices: Vec<ReducedWord>,
    pub from: BoundaryPoint,
    pub to: BoundaryPoint,
}

impl GeodesicWindow {
    pub fn hi(&self) -> i64 {
        self.lo + self.vertices.len() as i64 - 1
    }

    pub fn at(&self, t: i64) -> Option<&ReducedWord> {
        if t < self.lo {
            return None;
        }
        self.vertices.get((t - self.lo) as usize)
    }

    /// Parameter at which the window visits `x`, if it does.
    pub fn position(&self, x: &ReducedWord) -> Option<i64> {
        self.vertices
            .iter()
            .position(|v| v == x)
            .map(|i| self.lo + i as i64)
    }
}

/// Longest window accepted by [`bigeodesic`].
pub const MAX_WINDOW: usize = 4096;

pub fn bigeodesic(a: &BoundaryPoint, b: &BoundaryPoint, lo: i64, hi: i64) -> Result<GeodesicWindow> {
    if lo > hi {
        return Err(Error::domain(format!("empty window [{lo}, {hi}]")));
    }
    let span = (hi - lo + 1) as usize;
    if span > MAX_WINDOW {
        return Err(Error::Resource {
            what: "geodesic window",
            requested: span,
            limit: MAX_WINDOW,
        });
    }
    let k = a
        .meet_len(b)
        .ok_or_else(|| Error::domain("diagonal pair has no connecting geodesic"))?;
    let vertices = (lo..=hi)
        .map(|t| {
            let steps = t.unsigned_abs() as usize;
            if t < 0 {
                a.prefix(k + steps)
            } else {
                b.prefix(k + steps)
            }
        })
        .collect();
    Ok(GeodesicWindow {
        lo,
        vertices,
        from: a.clone(),
        to: b.clone(),
    })
}

/// The geodesic from the vertex `y` towards the boundary point `a`, listing `extra` vertices past
/// the point where it joins the ray `[e, a)`.
pub fn ray_geodesic(y: &ReducedWord, a: &BoundaryPoint, extra: usize) -> Vec<ReducedWord> {
    let k = y
        .letters()
        .iter()
        .zip(a.stream())
        .take_while(|(l, m)| **l == *m)
        .count();
    let mut path: Vec<ReducedWord> = (k..=y.len()).rev().map(|i| y.prefix(i)).collect();
    path.extend((1..=extra).map(|j| a.prefix(k + j)));
    path
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce(parse_letters("aA").unwrap()), ReducedWord::identity());
        assert_eq!(reduce(parse_letters("abBa").unwrap()), word("aa"));
    }

    #[test]
    fn group_law_examples() {
        assert_eq!(word("ab").mul(&word("BA")), ReducedWord::identity());
        assert_eq!(word("aB").inverse(), word("bA"));
        assert_eq!(word("ab").distance(&word("aB")), 2);
    }

    #[test]
    fn ball_counts_match_closed_form() {
        let g = FreeGroup::new(2).unwrap();
        let limits = Limits::default();
        assert_eq!(g.ball(0, &limits).unwrap(), vec![ReducedWord::identity()]);
        for r in 1..=5usize {
            let n = 2u128;
            let expected = 1 + 2 * n * ((2 * n - 1).pow(r as u32) - 1) / (2 * n - 2);
            assert_eq!(g.ball(r, &limits).unwrap().len() as u128, expected);
        }
    }

    #[test]
    fn ball_is_shortlex_sorted() {
        let g = FreeGroup::new(2).unwrap();
        let b = g.ball(3, &Limits::default()).unwrap();
        assert!(b.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn ball_limit_is_enforced() {
        let g = FreeGroup::new(2).unwrap();
        assert!(matches!(
            g.ball(13, &Limits::default()),
            Err(Error::Resource { limit: 12, .. })
        ));
    }

    #[test]
    fn rank_must_be_at_least_two() {
        assert!(FreeGroup::new(1).is_err());
    }

    #[test]
    fn is_initial_examples() {
        assert!(word("a").is_initial(&word("ab")));
        assert!(!word("b").is_initial(&word("ab")));
        assert!(ReducedWord::identity().is_initial(&word("b")));
    }

    #[test]
    fn boundary_readout() {
        let p = point("(ab)");
        assert_eq!(p.prefix(3), word("aba"));
        assert!(p.lies_on_ray(&word("a")));
        assert!(!p.lies_on_ray(&word("b")));
    }

    #[test]
    fn boundary_canonical_form() {
        assert_eq!(point("ab(ab)"), point("(ab)"));
        assert_eq!(point("a(baba)"), point("(ab)"));
        assert_eq!(point("(abab)").period(), word("ab"));
        assert_eq!(point("ab(b)").to_string(), "a(b)");
        assert!("a(A)".parse::<BoundaryPoint>().is_err());
        assert!("(aB b)".parse::<BoundaryPoint>().is_err());
        assert!("(ab".parse::<BoundaryPoint>().is_err());
    }

    #[test]
    fn action_examples() {
        let p = point("(ab)");
        assert_eq!(p.act(&ReducedWord::identity()), p);
        assert_eq!(p.act(&word("A")), point("(ba)"));
        assert_eq!(point("(a)").act(&word("AAA")), point("(a)"));
        assert_eq!(point("b(a)").act(&word("aB")), point("(a)"));
    }

    #[test]
    fn bigeodesic_axis_of_a() {
        let g = bigeodesic(&point("(A)"), &point("(a)"), -3, 3).unwrap();
        for k in -3..=3i64 {
            let expected = if k >= 0 {
                word(&"a".repeat(k as usize))
            } else {
                word(&"A".repeat((-k) as usize))
            };
            assert_eq!(g.at(k).unwrap(), &expected);
        }
    }

    #[test]
    fn bigeodesic_passes_through_meet() {
        let a = point("(ab)");
        let b = point("ab(b)");
        assert_eq!(a.meet(&b), Some(word("ab")));
        let g = bigeodesic(&a, &b, -2, 2).unwrap();
        assert_eq!(g.at(0), Some(&word("ab")));
        let g = bigeodesic(&point("(a)"), &point("(b)"), -1, 1).unwrap();
        assert_eq!(g.position(&ReducedWord::identity()), Some(0));
    }

    #[test]
    fn diagonal_pair_rejected() {
        let err = bigeodesic(&point("(a)"), &point("a(a)"), 0, 1).unwrap_err();
        assert!(err.to_string().contains("diagonal"));
    }

    #[test]
    fn ray_geodesic_climbs_then_descends() {
        let path = ray_geodesic(&word("ab"), &point("(aB)"), 2);
        assert_eq!(path, vec![word("ab"), word("a"), word("aB"), word("aBa")]);
    }
}
