//! Sparse multivariate polynomials over the rationals.
//!
//! Shared between the formal coefficient ring (variables `n`, `w`, `d`) and
//! the coordinate evaluator (variables `x1..xn`). Exponent vectors are kept
//! at a fixed length per polynomial; the variable names live with the caller.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

pub type Rat = BigRational;

pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

pub fn rat_frac(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Exponent vector; ordering is lexicographic which gives the monomial order
/// used everywhere (leading monomial = maximal key).
pub type Mono = Vec<u16>;

/// Polynomial with rational coefficients; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct SPoly {
    pub nvars: usize,
    pub terms: BTreeMap<Mono, Rat>,
}

impl SPoly {
    pub fn zero(nvars: usize) -> Self {
        SPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = SPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        SPoly::constant(nvars, Rat::one())
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        let mut m = vec![0u16; nvars];
        m[idx] = 1;
        let mut p = SPoly::zero(nvars);
        p.terms.insert(m, Rat::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.keys().all(|m| m.iter().all(|&e| e == 0))
    }

    /// The constant term.
    pub fn constant_part(&self) -> Rat {
        self.terms
            .get(&vec![0; self.nvars])
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    pub fn add_term(&mut self, m: Mono, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &SPoly) -> SPoly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> SPoly {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = -v.clone();
        }
        out
    }

    pub fn sub(&self, other: &SPoly) -> SPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &SPoly) -> SPoly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = SPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Mono = ma.iter().zip(mb.iter()).map(|(a, b)| a + b).collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> SPoly {
        if c.is_zero() {
            return SPoly::zero(self.nvars);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.clone() * c;
        }
        out
    }

    pub fn pow(&self, e: u32) -> SPoly {
        let mut out = SPoly::one(self.nvars);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn degree_in(&self, var: usize) -> u16 {
        self.terms.keys().map(|m| m[var]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().map(|&e| e as u32).sum())
            .max()
            .unwrap_or(0)
    }

    /// Leading coefficient in the lex order.
    pub fn leading_coeff(&self) -> Rat {
        self.terms
            .iter()
            .next_back()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rat::zero)
    }

    /// Partial derivative.
    pub fn diff(&self, var: usize) -> SPoly {
        let mut out = SPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m[var];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2[var] = e - 1;
            out.add_term(m2, c * rat_int(e as i64));
        }
        out
    }

    /// Substitute values (as polynomials in the same ring) for each variable.
    pub fn eval_subst(&self, values: &[SPoly]) -> SPoly {
        assert_eq!(values.len(), self.nvars);
        let nv = values.first().map(|p| p.nvars).unwrap_or(self.nvars);
        let mut out = SPoly::zero(nv);
        for (m, c) in &self.terms {
            let mut t = SPoly::constant(nv, c.clone());
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&values[i].pow(e as u32));
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Evaluate at a rational point.
    pub fn eval_point(&self, point: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    t *= &point[i];
                }
            }
            acc += t;
        }
        acc
    }

    /// Exact division; returns None if `self` is not a multiple of `div`.
    pub fn div_exact(&self, div: &SPoly) -> Option<SPoly> {
        assert!(!div.is_zero());
        let mut rem = self.clone();
        let mut quot = SPoly::zero(self.nvars);
        let (dm, dc) = div.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone()))?;
        while !rem.is_zero() {
            let (rm, rc) = rem
                .terms
                .iter()
                .next_back()
                .map(|(m, c)| (m.clone(), c.clone()))
                .unwrap();
            let mut qm = vec![0u16; self.nvars];
            for i in 0..self.nvars {
                if rm[i] < dm[i] {
                    return None;
                }
                qm[i] = rm[i] - dm[i];
            }
            let qc = rc / &dc;
            let mut qt = SPoly::zero(self.nvars);
            qt.terms.insert(qm, qc);
            quot = quot.add(&qt);
            rem = rem.sub(&qt.mul(div));
        }
        Some(quot)
    }
}

// ---------------------------------------------------------------------------
// Multivariate gcd over the rationals (via integer primitive PRS).
// ---------------------------------------------------------------------------

fn int_content(p: &SPoly) -> BigInt {
    // p must have integer coefficients here
    let mut g = BigInt::zero();
    for c in p.terms.values() {
        g = num_integer::gcd(g, c.to_integer());
    }
    if g.is_zero() {
        BigInt::one()
    } else {
        g.abs()
    }
}

fn clear_denominators(p: &SPoly) -> SPoly {
    let mut l = BigInt::one();
    for c in p.terms.values() {
        l = num_integer::lcm(l, c.denom().clone());
    }
    p.scale(&Rat::from_integer(l))
}

/// Coefficient of v^k in p, viewed as a polynomial in variable v.
fn coeff_of(p: &SPoly, var: usize, k: u16) -> SPoly {
    let mut out = SPoly::zero(p.nvars);
    for (m, c) in &p.terms {
        if m[var] == k {
            let mut m2 = m.clone();
            m2[var] = 0;
            out.add_term(m2, c.clone());
        }
    }
    out
}

fn mul_var_pow(p: &SPoly, var: usize, k: u16) -> SPoly {
    let mut out = SPoly::zero(p.nvars);
    for (m, c) in &p.terms {
        let mut m2 = m.clone();
        m2[var] += k;
        out.add_term(m2, c.clone());
    }
    out
}

/// Content of p with respect to variable v: gcd of the v-coefficients.
fn content_wrt(p: &SPoly, var: usize) -> SPoly {
    let mut g = SPoly::zero(p.nvars);
    for k in 0..=p.degree_in(var) {
        let c = coeff_of(p, var, k);
        if !c.is_zero() {
            g = gcd(&g, &c);
        }
    }
    g
}

/// Pseudo-remainder of f by g in variable v; requires deg_v(g) > 0.
fn prem(f: &SPoly, g: &SPoly, var: usize) -> SPoly {
    let dg = g.degree_in(var);
    debug_assert!(dg > 0);
    let lg = coeff_of(g, var, dg);
    let mut r = f.clone();
    while !r.is_zero() {
        let dr = r.degree_in(var);
        if dr < dg {
            break;
        }
        let lr = coeff_of(&r, var, dr);
        r = r.mul(&lg).sub(&mul_var_pow(&lr.mul(g), var, dr - dg));
    }
    r
}

/// gcd of two polynomials over the rationals, normalized to have positive
/// leading coefficient and integer content 1. Returns a polynomial defined
/// up to that normalization; gcd(0,0) = 0.
pub fn gcd(a: &SPoly, b: &SPoly) -> SPoly {
    if a.is_zero() {
        return normalize_primitive(b);
    }
    if b.is_zero() {
        return normalize_primitive(a);
    }
    let a = clear_denominators(a);
    let b = clear_denominators(b);
    // pick the first variable appearing in either
    let var = (0..a.nvars).find(|&v| a.degree_in(v) > 0 || b.degree_in(v) > 0);
    let var = match var {
        None => {
            // both constants
            let g = num_integer::gcd(a.constant_part().to_integer(), b.constant_part().to_integer());
            return SPoly::constant(a.nvars, Rat::from_integer(g.abs()));
        }
        Some(v) => v,
    };
    let ca = content_wrt(&a, var);
    let cb = content_wrt(&b, var);
    let cont = gcd(&ca, &cb);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    // primitive PRS
    let (mut f, mut g) = if pa.degree_in(var) >= pb.degree_in(var) {
        (pa, pb)
    } else {
        (pb, pa)
    };
    loop {
        if g.is_zero() {
            break;
        }
        if g.degree_in(var) == 0 {
            // gcd of primitive parts is 1 in v
            f = SPoly::one(f.nvars);
            break;
        }
        let r = prem(&f, &g, var);
        f = g;
        g = if r.is_zero() {
            r
        } else {
            let c = content_wrt(&r, var);
            r.div_exact(&c).expect("content divides")
        };
    }
    let pp = normalize_primitive(&f);
    normalize_primitive(&cont.mul(&pp))
}

/// Scale so that coefficients are coprime integers and leading coefficient is
/// positive.
fn normalize_primitive(p: &SPoly) -> SPoly {
    if p.is_zero() {
        return p.clone();
    }
    let q = clear_denominators(p);
    let c = int_content(&q);
    let mut out = q.scale(&Rat::new(BigInt::one(), c));
    if out.leading_coeff().is_negative() {
        out = out.neg();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p_of(nvars: usize, terms: &[(&[u16], i64)]) -> SPoly {
        let mut p = SPoly::zero(nvars);
        for (m, c) in terms {
            p.add_term(m.to_vec(), rat_int(*c));
        }
        p
    }

    #[test]
    fn gcd_univariate_factor() {
        // (n^2 - 4) and (n - 2) share (n - 2)
        let a = p_of(1, &[(&[2], 1), (&[0], -4)]);
        let b = p_of(1, &[(&[1], 1), (&[0], -2)]);
        let g = gcd(&a, &b);
        assert_eq!(g, b);
    }

    #[test]
    fn gcd_multivariate() {
        // (n + w)^2 * (n - w) vs (n + w) * w
        let npw = p_of(2, &[(&[1, 0], 1), (&[0, 1], 1)]);
        let nmw = p_of(2, &[(&[1, 0], 1), (&[0, 1], -1)]);
        let w = p_of(2, &[(&[0, 1], 1)]);
        let a = npw.mul(&npw).mul(&nmw);
        let b = npw.mul(&w);
        let g = gcd(&a, &b);
        assert_eq!(g, npw);
    }

    #[test]
    fn div_exact_roundtrip() {
        let a = p_of(2, &[(&[1, 0], 1), (&[0, 1], 2), (&[0, 0], -3)]);
        let b = p_of(2, &[(&[1, 1], 5), (&[0, 0], 7)]);
        let prod = a.mul(&b);
        assert_eq!(prod.div_exact(&a).unwrap(), b);
        assert_eq!(prod.div_exact(&b).unwrap(), a);
    }
}
