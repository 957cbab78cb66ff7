//! Text literals for functions and elements.
//!
//! ```text
//! sum    := tens (('+' | '-') tens)*
//! tens   := prod ['(x)' prod]
//! prod   := unary ('*' unary)*
//! unary  := '-' unary | atom
//! atom   := number ['/' number] | 'i' | 'chi(' word ')' | 'u(' word [',' word] ')'
//!         | 'tensor(' sum ',' sum ')' | '(' sum ')'
//! ```
//!
//! Words use `a A b B …`, with `1` or `e` for the identity. Values are promoted along
//! scalar → function → crossed → tensor and scalar → pair-function → pair/tensor.

use crate::boundary::{BiCylinderFunction, CylinderFunction};
use crate::crossed::{CrossedElement, LegPair, PairElement, TensorElement};
use crate::error::{Error, Result};
use crate::free_group::{FreeGroup, ReducedWord};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(String),
    Ident(String),
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Otimes,
}

fn lex(s: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        // "(x)" is the tensor sign unless it closes a call such as chi(x).
        let after_ident = matches!(out.last(), Some(Token::Ident(_)));
        if c == '(' && !after_ident && chars[i..].starts_with(&['(', 'x', ')']) {
            out.push(Token::Otimes);
            i += 3;
            continue;
        }
        match c {
            ' ' | '\t' | '\n' => {}
            '(' => out.push(Token::LParen),
            ')' => out.push(Token::RParen),
            ',' => out.push(Token::Comma),
            '+' => out.push(Token::Plus),
            '-' => out.push(Token::Minus),
            '*' => out.push(Token::Star),
            '/' => out.push(Token::Slash),
            '⊗' => out.push(Token::Otimes),
            c if c.is_ascii_digit() => {
                let start = i;
                while i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                    i += 1;
                }
                out.push(Token::Num(chars[start..=i].iter().collect()));
                // `3i` as printed by scalars.
                let imaginary = chars.get(i + 1) == Some(&'i')
                    && !chars.get(i + 2).is_some_and(|c| c.is_ascii_alphanumeric());
                if imaginary {
                    out.extend([Token::Star, Token::Ident("i".into())]);
                    i += 1;
                }
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i + 1 < chars.len() && chars[i + 1].is_ascii_alphanumeric() {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..=i].iter().collect()));
            }
            other => return Err(Error::Parse(format!("unexpected character {other:?} in {s:?}"))),
        }
        i += 1;
    }
    Ok(out)
}

#[derive(Debug, Clone)]
enum Value {
    Scalar(Scalar),
    Cyl(CylinderFunction),
    Bi(BiCylinderFunction),
    Crossed(CrossedElement),
    Pair(PairElement),
    Tensor(TensorElement),
}

impl Value {
    fn kind(&self) -> &'static str {
        match self {
            Value::Scalar(_) => "scalar",
            Value::Cyl(_) => "function",
            Value::Bi(_) => "pair function",
            Value::Crossed(_) => "crossed element",
            Value::Pair(_) => "pair element",
            Value::Tensor(_) => "tensor element",
        }
    }
}

struct Parser<'a> {
    group: FreeGroup,
    tokens: Vec<Token>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, msg: impl std::fmt::Display) -> Error {
        Error::Parse(format!("{msg} in {:?}", self.src))
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Token) -> Result<()> {
        match self.next() {
            Some(ref got) if *got == t => Ok(()),
            got => Err(self.err(format!("expected {t:?}, found {got:?}"))),
        }
    }

    fn sum(&mut self) -> Result<Value> {
        let mut acc = self.tens()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    let rhs = self.tens()?;
                    acc = self.add(acc, rhs)?;
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    let rhs = self.tens()?;
                    acc = self.add(acc, self.negate(rhs))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn tens(&mut self) -> Result<Value> {
        let lhs = self.prod()?;
        if self.peek() != Some(&Token::Otimes) {
            return Ok(lhs);
        }
        self.pos += 1;
        let rhs = self.prod()?;
        let (l, r) = (self.to_crossed(lhs)?, self.to_crossed(rhs)?);
        let mut out = TensorElement::zero(self.group);
        for (g, f) in l.terms() {
            for (h, k) in r.terms() {
                out = out.add(&TensorElement::simple((f, g), (k, h)));
            }
        }
        Ok(Value::Tensor(out))
    }

    fn prod(&mut self) -> Result<Value> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Token::Star) {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = self.mul(acc, rhs)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Value> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            let v = self.unary()?;
            return Ok(self.negate(v));
        }
        self.atom()
    }

    fn word(&mut self) -> Result<ReducedWord> {
        match self.next() {
            Some(Token::Ident(s)) => s.parse(),
            Some(Token::Num(s)) if s == "1" => Ok(ReducedWord::identity()),
            got => Err(self.err(format!("expected a word, found {got:?}"))),
        }
        .and_then(|w| {
            if self.group.contains(&w) {
                Ok(w)
            } else {
                Err(self.err(format!("{w} is not in F_{}", self.group.rank())))
            }
        })
    }

    fn atom(&mut self) -> Result<Value> {
        match self.next() {
            Some(Token::Num(n)) => {
                let mut q = Scalar::parse_rational(&n)?;
                if self.peek() == Some(&Token::Slash) {
                    self.pos += 1;
                    let Some(Token::Num(d)) = self.next() else {
                        return Err(self.err("expected a denominator"));
                    };
                    let d = Scalar::parse_rational(&d)?;
                    if num_traits::Zero::is_zero(&d) {
                        return Err(self.err("zero denominator"));
                    }
                    q /= d;
                }
                Ok(Value::Scalar(Scalar::from(q)))
            }
            Some(Token::LParen) => {
                let v = self.sum()?;
                self.expect(Token::RParen)?;
                Ok(v)
            }
            Some(Token::Ident(name)) => match name.as_str() {
                "i" => Ok(Value::Scalar(Scalar::i())),
                "chi" => {
                    self.expect(Token::LParen)?;
                    let w = self.word()?;
                    self.expect(Token::RParen)?;
                    Ok(Value::Cyl(CylinderFunction::indicator(self.group, &w)))
                }
                "u" => {
                    self.expect(Token::LParen)?;
                    let g = self.word()?;
                    if self.peek() == Some(&Token::Comma) {
                        self.pos += 1;
                        let h = self.word()?;
                        self.expect(Token::RParen)?;
                        return Ok(Value::Tensor(TensorElement::monomial(
                            self.group,
                            LegPair(g, h),
                            BiCylinderFunction::one(self.group),
                        )));
                    }
                    self.expect(Token::RParen)?;
                    Ok(Value::Crossed(CrossedElement::unitary(self.group, g)))
                }
                "tensor" => {
                    self.expect(Token::LParen)?;
                    let f = self.sum()?;
                    self.expect(Token::Comma)?;
                    let g = self.sum()?;
                    self.expect(Token::RParen)?;
                    let (f, g) = (self.to_cyl(f)?, self.to_cyl(g)?);
                    Ok(Value::Bi(BiCylinderFunction::tensor(&f, &g)))
                }
                other => Err(self.err(format!("unknown name {other:?}"))),
            },
            got => Err(self.err(format!("unexpected {got:?}"))),
        }
    }

    fn negate(&self, v: Value) -> Value {
        let m1 = Scalar::from(-1);
        match v {
            Value::Scalar(s) => Value::Scalar(-s),
            Value::Cyl(f) => Value::Cyl(f.neg()),
            Value::Bi(f) => Value::Bi(f.neg()),
            Value::Crossed(x) => Value::Crossed(x.scale(&m1)),
            Value::Pair(x) => Value::Pair(x.scale(&m1)),
            Value::Tensor(x) => Value::Tensor(x.scale(&m1)),
        }
    }

    fn to_cyl(&self, v: Value) -> Result<CylinderFunction> {
        match v {
            Value::Scalar(s) => Ok(CylinderFunction::constant(self.group, s)),
            Value::Cyl(f) => Ok(f),
            other => Err(self.err(format!("expected a function, found a {}", other.kind()))),
        }
    }

    fn to_crossed(&self, v: Value) -> Result<CrossedElement> {
        match v {
            Value::Crossed(x) => Ok(x),
            other => self.to_cyl(other).map(CrossedElement::function),
        }
    }

    fn to_bi(&self, v: Value) -> Result<BiCylinderFunction> {
        match v {
            Value::Scalar(s) => Ok(BiCylinderFunction::constant(self.group, s)),
            Value::Bi(f) => Ok(f),
            other => Err(self.err(format!("expected a pair function, found a {}", other.kind()))),
        }
    }

    fn to_tensor(&self, v: Value) -> Result<TensorElement> {
        match v {
            Value::Tensor(x) => Ok(x),
            other => Ok(TensorElement::monomial(
                self.group,
                LegPair(ReducedWord::identity(), ReducedWord::identity()),
                self.to_bi(other)?,
            )),
        }
    }

    fn to_pair(&self, v: Value) -> Result<PairElement> {
        match v {
            Value::Pair(x) => Ok(x),
            other => Ok(PairElement::monomial(self.group, ReducedWord::identity(), self.to_bi(other)?)),
        }
    }

    fn add(&self, a: Value, b: Value) -> Result<Value> {
        use Value::*;
        Ok(match (a, b) {
            (Scalar(x), Scalar(y)) => Scalar(&x + &y),
            (a @ (Scalar(_) | Cyl(_)), b @ (Scalar(_) | Cyl(_))) => Cyl(self.to_cyl(a)?.add(&self.to_cyl(b)?)),
            (a @ (Scalar(_) | Bi(_)), b @ (Scalar(_) | Bi(_))) => Bi(self.to_bi(a)?.add(&self.to_bi(b)?)),
            (a @ (Scalar(_) | Cyl(_) | Crossed(_)), b @ (Scalar(_) | Cyl(_) | Crossed(_))) => {
                Crossed(self.to_crossed(a)?.add(&self.to_crossed(b)?))
            }
            (a @ (Scalar(_) | Bi(_) | Pair(_)), b @ (Scalar(_) | Bi(_) | Pair(_))) => {
                Pair(self.to_pair(a)?.add(&self.to_pair(b)?))
            }
            (a @ (Scalar(_) | Bi(_) | Tensor(_)), b @ (Scalar(_) | Bi(_) | Tensor(_))) => {
                Tensor(self.to_tensor(a)?.add(&self.to_tensor(b)?))
            }
            (a, b) => return Err(self.err(format!("cannot add a {} and a {}", a.kind(), b.kind()))),
        })
    }

    fn mul(&self, a: Value, b: Value) -> Result<Value> {
        use Value::*;
        Ok(match (a, b) {
            (Scalar(x), Scalar(y)) => Scalar(&x * &y),
            (Scalar(s), Cyl(f)) | (Cyl(f), Scalar(s)) => Cyl(f.scale(&s)),
            (Scalar(s), Bi(f)) | (Bi(f), Scalar(s)) => Bi(f.scale(&s)),
            (Scalar(s), Crossed(x)) | (Crossed(x), Scalar(s)) => Crossed(x.scale(&s)),
            (Scalar(s), Pair(x)) | (Pair(x), Scalar(s)) => Pair(x.scale(&s)),
            (Scalar(s), Tensor(x)) | (Tensor(x), Scalar(s)) => Tensor(x.scale(&s)),
            (Cyl(f), Cyl(g)) => Cyl(f.mul(&g)),
            (Bi(f), Bi(g)) => Bi(f.mul(&g)),
            (a @ (Cyl(_) | Crossed(_)), b @ (Cyl(_) | Crossed(_))) => {
                Crossed(self.to_crossed(a)?.mul(&self.to_crossed(b)?))
            }
            // A pair function times group unitaries with scalar coefficients.
            (Bi(f), Crossed(x)) => {
                let mut out = PairElement::zero(self.group);
                for (g, c) in x.terms() {
                    let Some(s) = c.is_constant() else {
                        return Err(self.err("a pair function multiplies only scalar multiples of u(w)"));
                    };
                    out = out.add(&PairElement::monomial(self.group, g.clone(), f.scale(s)));
                }
                Pair(out)
            }
            (a @ (Bi(_) | Pair(_)), b @ (Bi(_) | Pair(_))) => Pair(self.to_pair(a)?.mul(&self.to_pair(b)?)),
            (a @ (Bi(_) | Tensor(_)), b @ (Bi(_) | Tensor(_))) => {
                Tensor(self.to_tensor(a)?.mul(&self.to_tensor(b)?))
            }
            (a, b) => return Err(self.err(format!("cannot multiply a {} by a {}", a.kind(), b.kind()))),
        })
    }
}

fn parse(group: FreeGroup, s: &str) -> Result<(Value, Parser<'_>)> {
    let mut p = Parser {
        group,
        tokens: lex(s)?,
        pos: 0,
        src: s,
    };
    if p.tokens.is_empty() {
        return Err(p.err("empty literal"));
    }
    let v = p.sum()?;
    if let Some(t) = p.peek() {
        return Err(p.err(format!("trailing {t:?}")));
    }
    Ok((v, p))
}

pub fn parse_scalar(s: &str) -> Result<Scalar> {
    // Scalars do not depend on the rank; any group will do.
    let group = FreeGroup::new(2)?;
    match parse(group, s)? {
        (Value::Scalar(x), _) => Ok(x),
        (other, p) => Err(p.err(format!("expected a scalar, found a {}", other.kind()))),
    }
}

/// `"chi(a)"`, `"1 - chi(a)"`, `"1/2*chi(ab) + i*chi(B)"`.
pub fn parse_cylinder(group: FreeGroup, s: &str) -> Result<CylinderFunction> {
    let (v, p) = parse(group, s)?;
    p.to_cyl(v)
}

/// `"tensor(chi(a), 1 - chi(a))"` and sums of such.
pub fn parse_bicylinder(group: FreeGroup, s: &str) -> Result<BiCylinderFunction> {
    let (v, p) = parse(group, s)?;
    p.to_bi(v)
}

/// `"chi(a)*u(a) + u(B)"`.
pub fn parse_crossed(group: FreeGroup, s: &str) -> Result<CrossedElement> {
    let (v, p) = parse(group, s)?;
    p.to_crossed(v)
}

/// `"tensor(chi(a), 1 - chi(a))*u(a)"`; coefficients must vanish on the diagonal.
pub fn parse_pair(group: FreeGroup, s: &str) -> Result<PairElement> {
    let (v, p) = parse(group, s)?;
    let x = p.to_pair(v)?;
    x.check_invariants()?;
    Ok(x)
}

/// `"chi(a)*u(a) (x) (1 - chi(a))*u(a) + …"` or `"(tensor(chi(a), chi(b)))*u(a,b)"`.
pub fn parse_tensor(group: FreeGroup, s: &str) -> Result<TensorElement> {
    let (v, p) = parse(group, s)?;
    p.to_tensor(v)
}
