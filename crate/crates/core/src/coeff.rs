//! Exact scalar coefficients: rational functions of the formal parameters
//! `n` (dimension), `w` (source weight) and `d` (symbol weight) over the
//! rationals.
//!
//! Values are kept in a canonical reduced form: numerator and denominator
//! share no factor and the denominator is monic in the lex order n > w > d.
//! Structural equality then decides mathematical equality.

use crate::error::Error;
use crate::poly::{gcd, rat_int, Rat, SPoly};
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub const NVARS: usize = 3;
pub const VAR_NAMES: [&str; NVARS] = ["n", "w", "d"];

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Param {
    N = 0,
    W = 1,
    D = 2,
}

impl Param {
    pub fn name(self) -> &'static str {
        VAR_NAMES[self as usize]
    }

    pub fn from_name(s: &str) -> Option<Param> {
        match s {
            "n" => Some(Param::N),
            "w" => Some(Param::W),
            "d" => Some(Param::D),
            _ => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Coefficient {
    num: SPoly,
    den: SPoly,
}

impl Coefficient {
    fn make(num: SPoly, den: SPoly) -> Result<Coefficient, Error> {
        if den.is_zero() {
            return Err(Error::MalformedCoefficient("zero denominator".into()));
        }
        Ok(Coefficient { num, den }.reduced())
    }

    fn reduced(self) -> Coefficient {
        if self.num.is_zero() {
            return Coefficient {
                num: SPoly::zero(NVARS),
                den: SPoly::one(NVARS),
            };
        }
        let g = gcd(&self.num, &self.den);
        let mut num = self.num.div_exact(&g).expect("gcd divides");
        let mut den = self.den.div_exact(&g).expect("gcd divides");
        // monic denominator
        let lc = den.leading_coeff();
        let inv = Rat::one() / lc;
        num = num.scale(&inv);
        den = den.scale(&inv);
        Coefficient { num, den }
    }

    pub fn zero() -> Coefficient {
        Coefficient {
            num: SPoly::zero(NVARS),
            den: SPoly::one(NVARS),
        }
    }

    pub fn one() -> Coefficient {
        Coefficient {
            num: SPoly::one(NVARS),
            den: SPoly::one(NVARS),
        }
    }

    pub fn int(v: i64) -> Coefficient {
        Coefficient {
            num: SPoly::constant(NVARS, rat_int(v)),
            den: SPoly::one(NVARS),
        }
    }

    pub fn rat(r: Rat) -> Coefficient {
        Coefficient {
            num: SPoly::constant(NVARS, r),
            den: SPoly::one(NVARS),
        }
    }

    pub fn frac(p: i64, q: i64) -> Coefficient {
        assert!(q != 0);
        Coefficient::rat(Rat::new(p.into(), q.into()))
    }

    pub fn var(p: Param) -> Coefficient {
        Coefficient {
            num: SPoly::var(NVARS, p as usize),
            den: SPoly::one(NVARS),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == SPoly::one(NVARS) && self.den == SPoly::one(NVARS)
    }

    pub fn numerator(&self) -> &SPoly {
        &self.num
    }

    pub fn denominator(&self) -> &SPoly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den == SPoly::one(NVARS)
    }

    /// True when the value involves none of the given parameters.
    pub fn is_free_of(&self, p: Param) -> bool {
        self.num.degree_in(p as usize) == 0 && self.den.degree_in(p as usize) == 0
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// The constant value, when `is_constant`.
    pub fn constant_value(&self) -> Option<Rat> {
        if self.is_constant() {
            Some(self.num.constant_part() / self.den.constant_part())
        } else {
            None
        }
    }

    pub fn inverse(&self) -> Result<Coefficient, Error> {
        if self.is_zero() {
            return Err(Error::MalformedCoefficient("division by zero".into()));
        }
        Coefficient::make(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: u32) -> Coefficient {
        let mut out = Coefficient::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Substitute parameters; unlisted parameters stay themselves.
    /// Fails when a denominator vanishes identically after substitution.
    pub fn substitute(&self, bindings: &[(Param, Coefficient)]) -> Result<Coefficient, Error> {
        let mut vals: Vec<Coefficient> = (0..NVARS)
            .map(|i| Coefficient::var(match i {
                0 => Param::N,
                1 => Param::W,
                _ => Param::D,
            }))
            .collect();
        for (p, c) in bindings {
            vals[*p as usize] = c.clone();
        }
        let num = subst_poly(&self.num, &vals)?;
        let den = subst_poly(&self.den, &vals)?;
        if den.is_zero() {
            return Err(Error::Pole {
                factor: render_poly(&self.den),
            });
        }
        num.try_div(&den)
    }

    /// Evaluate at rational parameter values (all three provided).
    pub fn eval(&self, n: &Rat, w: &Rat, d: &Rat) -> Result<Rat, Error> {
        let pt = vec![n.clone(), w.clone(), d.clone()];
        let den = self.den.eval_point(&pt);
        if den.is_zero() {
            return Err(Error::Pole {
                factor: render_poly(&self.den),
            });
        }
        Ok(self.num.eval_point(&pt) / den)
    }

    /// Exact division with error on zero divisor.
    pub fn try_div(&self, other: &Coefficient) -> Result<Coefficient, Error> {
        if other.is_zero() {
            return Err(Error::MalformedCoefficient("division by zero".into()));
        }
        Coefficient::make(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        )
    }

    pub fn render(&self) -> String {
        if self.is_polynomial() {
            render_poly(&self.num)
        } else {
            format!("({})/({})", render_poly(&self.num), render_poly(&self.den))
        }
    }

    pub fn parse(s: &str) -> Result<Coefficient, Error> {
        Parser::new(s).parse_all()
    }
}

fn subst_poly(p: &SPoly, vals: &[Coefficient]) -> Result<Coefficient, Error> {
    let mut acc = Coefficient::zero();
    for (m, c) in &p.terms {
        let mut t = Coefficient::rat(c.clone());
        for (i, &e) in m.iter().enumerate() {
            if e > 0 {
                t = &t * &vals[i].pow(e as u32);
            }
        }
        acc = &acc + &t;
    }
    Ok(acc)
}

impl Add for &Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: &Coefficient) -> Coefficient {
        Coefficient {
            num: self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            den: self.den.mul(&rhs.den),
        }
        .reduced()
    }
}

impl Sub for &Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: &Coefficient) -> Coefficient {
        Coefficient {
            num: self.num.mul(&rhs.den).sub(&rhs.num.mul(&self.den)),
            den: self.den.mul(&rhs.den),
        }
        .reduced()
    }
}

impl Mul for &Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: &Coefficient) -> Coefficient {
        Coefficient {
            num: self.num.mul(&rhs.num),
            den: self.den.mul(&rhs.den),
        }
        .reduced()
    }
}

impl Div for &Coefficient {
    type Output = Coefficient;
    fn div(self, rhs: &Coefficient) -> Coefficient {
        self.try_div(rhs).expect("division by zero coefficient")
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

fn render_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn render_poly(p: &SPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    // descending lex order
    for (i, (m, c)) in p.terms.iter().rev().enumerate() {
        let is_const_mono = m.iter().all(|&e| e == 0);
        let abs = c.abs();
        let sign = c.is_negative();
        if i == 0 {
            if sign {
                out.push('-');
            }
        } else if sign {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let mut parts: Vec<String> = Vec::new();
        if !abs.is_one() || is_const_mono {
            parts.push(render_rat(&abs));
        }
        for (v, &e) in m.iter().enumerate() {
            if e == 1 {
                parts.push(VAR_NAMES[v].into());
            } else if e > 1 {
                parts.push(format!("{}^{}", VAR_NAMES[v], e));
            }
        }
        out.push_str(&parts.join("*"));
    }
    out
}

// ---------------------------------------------------------------------------
// Parsing: expr := term (('+'|'-') term)*; term := unary (('*'|'/') unary)*;
// unary := '-'* atom ('^' uint)?; atom := number | param | '(' expr ')'
// ---------------------------------------------------------------------------

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Self {
        Parser {
            s: s.as_bytes(),
            pos: 0,
        }
    }

    fn parse_all(&mut self) -> Result<Coefficient, Error> {
        let c = self.expr()?;
        self.skip_ws();
        if self.pos != self.s.len() {
            return Err(Error::Parse(format!(
                "trailing input at byte {}",
                self.pos
            )));
        }
        Ok(c)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Coefficient, Error> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                b'-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Coefficient, Error> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                b'/' => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = acc.try_div(&rhs)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Coefficient, Error> {
        let mut neg = false;
        while let Some(c) = self.peek() {
            if c == b'-' {
                neg = !neg;
                self.pos += 1;
            } else if c == b'+' {
                self.pos += 1;
            } else {
                break;
            }
        }
        let mut a = self.atom()?;
        if let Some(b'^') = self.peek() {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(Error::Parse(format!("expected exponent at byte {}", start)));
            }
            let e: u32 = std::str::from_utf8(&self.s[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| Error::Parse("bad exponent".into()))?;
            a = a.pow(e);
        }
        Ok(if neg { -&a } else { a })
    }

    fn atom(&mut self) -> Result<Coefficient, Error> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(Error::Parse(format!(
                        "expected ')' at byte {}",
                        self.pos
                    )));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let v: i64 = std::str::from_utf8(&self.s[start..self.pos])
                    .unwrap()
                    .parse()
                    .map_err(|_| Error::Parse("integer overflow".into()))?;
                Ok(Coefficient::int(v))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.s.len()
                    && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                Param::from_name(name)
                    .map(Coefficient::var)
                    .ok_or_else(|| Error::Parse(format!("unknown parameter `{}`", name)))
            }
            other => Err(Error::Parse(format!(
                "unexpected input {:?} at byte {}",
                other.map(|b| b as char),
                self.pos
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n() -> Coefficient {
        Coefficient::var(Param::N)
    }
    fn w() -> Coefficient {
        Coefficient::var(Param::W)
    }
    fn d() -> Coefficient {
        Coefficient::var(Param::D)
    }

    #[test]
    fn normalize_cancels_common_factor() {
        // (n^2 - 4)/(n - 2) == n + 2
        let num = &(&n() * &n()) - &Coefficient::int(4);
        let den = &n() - &Coefficient::int(2);
        let c = num.try_div(&den).unwrap();
        assert_eq!(c, &n() + &Coefficient::int(2));
    }

    #[test]
    fn zero_over_anything_is_canonical_zero() {
        let c = Coefficient::zero().try_div(&(&n() + &w())).unwrap();
        assert_eq!(c, Coefficient::zero());
        assert!(c.is_polynomial());
    }

    #[test]
    fn expanded_equals_factored() {
        // ((d + n)(n + 2d)) expanded vs factored
        let f = &(&d() + &n()) * &(&n() + &(&Coefficient::int(2) * &d()));
        let expanded = Coefficient::parse("n^2 + 3*d*n + 2*d^2").unwrap();
        assert_eq!(f, expanded);
    }

    #[test]
    fn substitution_shifted_weight() {
        // substitute w' := w + d - 1 (ell = 0) into -w'(n + 2w' - 2)
        let wp = &(&w() + &d()) - &Coefficient::int(1);
        let expr_in_wp = |x: &Coefficient| -> Coefficient {
            let inner = &(&n() + &(&Coefficient::int(2) * x)) - &Coefficient::int(2);
            -&(x * &inner)
        };
        let direct = expr_in_wp(&wp);
        let symbolic = expr_in_wp(&w());
        let substituted = symbolic.substitute(&[(Param::W, wp)]).unwrap();
        assert_eq!(direct, substituted);
    }

    #[test]
    fn substitution_concrete_n() {
        let c = &(&n() + &d()) + &Coefficient::int(2);
        let out = c.substitute(&[(Param::N, Coefficient::int(4))]).unwrap();
        assert_eq!(out, &d() + &Coefficient::int(6));
    }

    #[test]
    fn substitution_vanishing_factor() {
        let c = &d() - &Coefficient::int(3);
        let out = c.substitute(&[(Param::D, Coefficient::int(3))]).unwrap();
        assert!(out.is_zero());
    }

    #[test]
    fn pole_detection_names_factor() {
        let c = Coefficient::one().try_div(&(&n() - &Coefficient::int(2))).unwrap();
        let err = c.substitute(&[(Param::N, Coefficient::int(2))]).unwrap_err();
        match err {
            Error::Pole { factor } => assert_eq!(factor, "n - 2"),
            other => panic!("expected pole error, got {other:?}"),
        }
    }

    #[test]
    fn parse_render_roundtrip() {
        for s in [
            "-(d-1)*(n+2*d+2)",
            "(n^2 + 3*d*n + 2*d^2)/(w - 1)",
            "0",
            "3/2",
            "-w^3 + 1/3*n",
        ] {
            let c = Coefficient::parse(s).unwrap();
            let rendered = c.render();
            let back = Coefficient::parse(&rendered).unwrap();
            assert_eq!(c, back, "roundtrip failed for `{s}` -> `{rendered}`");
        }
    }
}
