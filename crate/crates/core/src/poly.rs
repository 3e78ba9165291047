//! Exact polynomials over the rationals.
//!
//! [`Poly`] is univariate in `t`; [`MPoly`] is sparse multivariate with
//! named variables. Both keep their coefficients normalized (no stored
//! zeros), so structural equality is polynomial equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn binom(n: usize, k: usize) -> Q {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Q::from_integer(acc)
}

/// `sum_k c[k] t^k`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    c: Vec<Q>,
}

impl Poly {
    pub fn new(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Self { c }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| q(x)).collect())
    }

    pub fn zero() -> Self {
        Self { c: Vec::new() }
    }

    pub fn constant(a: Q) -> Self {
        Self::new(vec![a])
    }

    /// `a t^k`.
    pub fn monomial(a: Q, k: usize) -> Self {
        let mut c = vec![Q::zero(); k + 1];
        c[k] = a;
        Self::new(c)
    }

    pub fn t() -> Self {
        Self::monomial(Q::one(), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.c.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }

    pub fn scale(&self, a: &Q) -> Self {
        Self::new(self.c.iter().map(|x| x * a).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(Q::one()), |acc, _| &acc * self)
    }

    pub fn eval(&self, t: &Q) -> Q {
        self.c.iter().rev().fold(Q::zero(), |acc, a| acc * t + a)
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, a| acc * t + a.to_f64().unwrap_or(f64::NAN))
    }

    /// Bernstein coefficients of degree `n >= deg` on `[0, 1]`.
    pub fn bernstein(&self, n: usize) -> Vec<Q> {
        (0..=n)
            .map(|k| {
                (0..=k.min(self.c.len().saturating_sub(1)))
                    .filter(|&i| i < self.c.len())
                    .fold(Q::zero(), |acc, i| acc + binom(k, i) / binom(n, i) * &self.c[i])
            })
            .collect()
    }

    /// True if `p >= 0` on `[0, 1]`, proven by nonnegative Bernstein
    /// coefficients after at most `depth` rounds of de Casteljau bisection.
    /// `false` means "not proven".
    pub fn nonnegative_on_unit_interval(&self, depth: usize) -> bool {
        let n = self.degree().unwrap_or(0);
        bernstein_nonneg(self.bernstein(n), depth)
    }

    pub fn nonpositive_on_unit_interval(&self, depth: usize) -> bool {
        (-self).nonnegative_on_unit_interval(depth)
    }

    /// True if `p > 0` on `[0, 1]`, proven by strictly positive Bernstein
    /// coefficients after at most `depth` rounds of bisection.
    pub fn positive_on_unit_interval(&self, depth: usize) -> bool {
        let n = self.degree().unwrap_or(0);
        !self.is_zero() && bernstein_pos(self.bernstein(n), depth)
    }

    /// Lowest power of `t` with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.c.iter().position(|a| !a.is_zero())
    }

    /// `p / t^k`, dropping the `k` lowest coefficients.
    pub fn shift_down(&self, k: usize) -> Poly {
        Poly::new(self.c.iter().skip(k).cloned().collect())
    }
}

/// Exact rational value of a double.
pub fn q_from_f64(x: f64) -> Option<Q> {
    Q::from_float(x)
}

fn bernstein_pos(b: Vec<Q>, depth: usize) -> bool {
    if b.iter().all(|x| x.is_positive()) {
        return true;
    }
    if !b[0].is_positive() || !b[b.len() - 1].is_positive() || depth == 0 {
        return false;
    }
    let (l, r) = de_casteljau_split(&b);
    bernstein_pos(l, depth - 1) && bernstein_pos(r, depth - 1)
}

fn bernstein_nonneg(b: Vec<Q>, depth: usize) -> bool {
    if b.iter().all(|x| !x.is_negative()) {
        return true;
    }
    // A negative endpoint value is a genuine sign violation.
    if b[0].is_negative() || b[b.len() - 1].is_negative() || depth == 0 {
        return false;
    }
    let (l, r) = de_casteljau_split(&b);
    bernstein_nonneg(l, depth - 1) && bernstein_nonneg(r, depth - 1)
}

fn de_casteljau_split(b: &[Q]) -> (Vec<Q>, Vec<Q>) {
    let n = b.len();
    let half = qr(1, 2);
    let mut work = b.to_vec();
    let mut left = vec![work[0].clone()];
    let mut right = vec![work[n - 1].clone()];
    for _ in 1..n {
        work = work.windows(2).map(|w| (&w[0] + &w[1]) * &half).collect();
        left.push(work[0].clone());
        right.push(work[work.len() - 1].clone());
    }
    right.reverse();
    (left, right)
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Q::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.c.iter().map(|x| -x).collect())
    }
}

fn fmt_q(a: &Q) -> String {
    if a.is_integer() {
        a.to_integer().to_string()
    } else {
        format!("{}/{}", a.numer(), a.denom())
    }
}

fn fmt_terms(terms: Vec<(Q, String)>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if terms.is_empty() {
        return write!(f, "0");
    }
    for (i, (a, mono)) in terms.iter().enumerate() {
        let neg = a.is_negative();
        let mag = a.abs();
        if i == 0 {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { "-" } else { "+" })?;
        }
        if mono.is_empty() {
            write!(f, "{}", fmt_q(&mag))?;
        } else if mag.is_one() {
            write!(f, "{mono}")?;
        } else {
            write!(f, "{}*{mono}", fmt_q(&mag))?;
        }
    }
    Ok(())
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(k, a)| {
                let mono = match k {
                    0 => String::new(),
                    1 => "t".to_string(),
                    _ => format!("t^{k}"),
                };
                (a.clone(), mono)
            })
            .collect();
        fmt_terms(terms, f)
    }
}

/// Sparse polynomial in the variables `vars`, keyed by exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, Q>,
}

impl MPoly {
    pub fn zero(vars: &[&str]) -> Self {
        Self { vars: vars.iter().map(|s| s.to_string()).collect(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &[&str], a: Q) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; vars.len()], a);
        p
    }

    pub fn var(vars: &[&str], name: &str) -> Self {
        let idx = vars.iter().position(|v| *v == name).unwrap_or_else(|| panic!("unknown variable {name}"));
        let mut e = vec![0; vars.len()];
        e[idx] = 1;
        let mut p = Self::zero(vars);
        p.add_term(e, Q::one());
        p
    }

    pub fn vars(&self) -> Vec<&str> {
        self.vars.iter().map(|s| s.as_str()).collect()
    }

    fn add_term(&mut self, e: Vec<u32>, a: Q) {
        if a.is_zero() {
            return;
        }
        let entry = self.terms.entry(e.clone()).or_insert_with(Q::zero);
        *entry += a;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    fn index(&self, name: &str) -> usize {
        self.vars.iter().position(|v| v == name).unwrap_or_else(|| panic!("unknown variable {name}"))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Q)> {
        self.terms.iter()
    }

    /// Coefficient of `name^k`, as a polynomial in the same variables.
    pub fn coeff_of(&self, name: &str, k: u32) -> MPoly {
        let i = self.index(name);
        let mut out = MPoly { vars: self.vars.clone(), terms: BTreeMap::new() };
        for (e, a) in &self.terms {
            if e[i] == k {
                let mut e2 = e.clone();
                e2[i] = 0;
                out.add_term(e2, a.clone());
            }
        }
        out
    }

    /// Smallest exponent of `name` over all terms that also involve one of
    /// `others` (`None` if no term does).
    pub fn min_degree_with(&self, name: &str, others: &[&str]) -> Option<u32> {
        let i = self.index(name);
        let idx: Vec<usize> = others.iter().map(|o| self.index(o)).collect();
        self.terms.keys().filter(|e| idx.iter().any(|&j| e[j] > 0)).map(|e| e[i]).min()
    }

    /// Whether `name` occurs in any term.
    pub fn involves(&self, name: &str) -> bool {
        let i = self.index(name);
        self.terms.keys().any(|e| e[i] > 0)
    }

    pub fn max_degree(&self, name: &str) -> u32 {
        let i = self.index(name);
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    /// Substitutes `name = value`.
    pub fn subs(&self, name: &str, value: &Q) -> MPoly {
        let i = self.index(name);
        let mut out = MPoly { vars: self.vars.clone(), terms: BTreeMap::new() };
        for (e, a) in &self.terms {
            let mut e2 = e.clone();
            let k = e2[i];
            e2[i] = 0;
            let mut f = Q::one();
            for _ in 0..k {
                f *= value;
            }
            out.add_term(e2, a * f);
        }
        out
    }

    pub fn scale(&self, a: &Q) -> MPoly {
        let mut out = MPoly { vars: self.vars.clone(), terms: BTreeMap::new() };
        for (e, b) in &self.terms {
            out.add_term(e.clone(), a * b);
        }
        out
    }

    /// Evaluates in floating point with the given variable values.
    pub fn eval_f64(&self, values: &[(&str, f64)]) -> f64 {
        let idx: Vec<(usize, f64)> = values.iter().map(|(n, v)| (self.index(n), *v)).collect();
        self.terms
            .iter()
            .map(|(e, a)| {
                let mut m = a.to_f64().unwrap_or(f64::NAN);
                for (k, &p) in e.iter().enumerate() {
                    if p > 0 {
                        let v = idx.iter().find(|(j, _)| *j == k).map(|x| x.1).unwrap_or(0.0);
                        m *= v.powi(p as i32);
                    }
                }
                m
            })
            .sum()
    }

    /// The univariate polynomial in `name` if no other variable occurs.
    pub fn to_poly(&self, name: &str) -> Option<Poly> {
        let i = self.index(name);
        let mut c: Vec<Q> = Vec::new();
        for (e, a) in &self.terms {
            if e.iter().enumerate().any(|(j, &p)| j != i && p > 0) {
                return None;
            }
            let k = e[i] as usize;
            if c.len() <= k {
                c.resize(k + 1, Q::zero());
            }
            c[k] += a;
        }
        Some(Poly::new(c))
    }

    /// Embeds a univariate polynomial in `name`.
    pub fn from_poly(vars: &[&str], name: &str, p: &Poly) -> MPoly {
        let t = MPoly::var(vars, name);
        let mut acc = MPoly::zero(vars);
        let mut pw = MPoly::constant(vars, Q::one());
        for a in p.coeffs() {
            acc = &acc + &pw.scale(a);
            pw = &pw * &t;
        }
        acc
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, o: &MPoly) -> MPoly {
        assert_eq!(self.vars, o.vars, "variable sets differ");
        let mut out = self.clone();
        for (e, a) in &o.terms {
            out.add_term(e.clone(), a.clone());
        }
        out
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, o: &MPoly) -> MPoly {
        self + &(-o)
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.scale(&q(-1))
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, o: &MPoly) -> MPoly {
        assert_eq!(self.vars, o.vars, "variable sets differ");
        let mut out = MPoly { vars: self.vars.clone(), terms: BTreeMap::new() };
        for (e1, a) in &self.terms {
            for (e2, b) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
                out.add_term(e, a * b);
            }
        }
        out
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Graded order, highest total degree last, for readable traces.
        let mut items: Vec<(&Vec<u32>, &Q)> = self.terms.iter().collect();
        items.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            da.cmp(&db).then_with(|| b.0.cmp(a.0))
        });
        let terms = items
            .into_iter()
            .map(|(e, a)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p > 0)
                    .map(|(i, &p)| if p == 1 { self.vars[i].clone() } else { format!("{}^{p}", self.vars[i]) })
                    .collect();
                (a.clone(), mono.join("*"))
            })
            .collect();
        fmt_terms(terms, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_display() {
        let t = Poly::t();
        let p = &(&t * &t) - &t.pow(4);
        assert_eq!(p.to_string(), "t^2 - t^4");
        assert_eq!(p.eval(&qr(1, 2)), qr(3, 16));
        assert_eq!(Poly::zero().to_string(), "0");
    }

    #[test]
    fn bernstein_sign_certificates() {
        let p = Poly::from_ints(&[0, 0, 1, 0, -1]);
        assert!(p.nonnegative_on_unit_interval(0));
        // (t - 1/2)^2 needs subdivision
        let h = &Poly::t() - &Poly::constant(qr(1, 2));
        let sq = &h * &h;
        assert!(sq.nonnegative_on_unit_interval(8));
        assert!(!Poly::from_ints(&[-1, 0, 4]).nonnegative_on_unit_interval(10));
    }

    #[test]
    fn bernstein_endpoints_are_values() {
        let p = Poly::from_ints(&[3, -2, 5, -7]);
        let b = p.bernstein(3);
        assert_eq!(b[0], q(3));
        assert_eq!(b[3], p.eval(&q(1)));
        assert_eq!(p.bernstein(5)[5], p.eval(&q(1)));
    }

    #[test]
    fn multivariate_coefficients() {
        let v = ["t", "a"];
        let t = MPoly::var(&v, "t");
        let a = MPoly::var(&v, "a");
        let p = &(&(&a * &t) + &(&t * &t)) + &MPoly::constant(&v, q(2));
        assert_eq!(p.coeff_of("t", 1), a);
        assert_eq!(p.coeff_of("t", 2), MPoly::constant(&v, q(1)));
        assert_eq!(p.subs("a", &q(3)).coeff_of("t", 1), MPoly::constant(&v, q(3)));
        assert_eq!(p.to_string(), "2 + t^2 + t*a");
        assert!(p.to_poly("t").is_none());
        assert_eq!(p.subs("a", &q(0)).to_poly("t").unwrap(), Poly::from_ints(&[2, 0, 1]));
    }

    #[test]
    fn strict_positivity_and_valuation() {
        let p = Poly::from_ints(&[0, 0, 0, 2, -1]);
        assert_eq!(p.valuation(), Some(3));
        let q2 = p.shift_down(3);
        assert_eq!(q2, Poly::from_ints(&[2, -1]));
        assert!(q2.positive_on_unit_interval(4));
        assert!(!Poly::from_ints(&[1, -1]).positive_on_unit_interval(10));
        assert_eq!(q_from_f64(0.5).unwrap(), qr(1, 2));
    }
}
