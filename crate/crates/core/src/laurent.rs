//! Exact Laurent polynomials in `a`, `q^{1/2}`, `t^{1/2}` with integer
//! coefficients, and invariants of the form `num / (1 - t)^d`.
//!
//! Exponents of `q` and `t` are stored doubled, so `q2 = -1` stands for
//! `q^{-1/2}`. Every coefficient operation is checked: overflow surfaces as
//! [`KhrError::Overflow`] from the `try_*` methods and as a panic from the
//! operator impls. Nothing ever wraps.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{KhrError, Result};

pub type Coeff = i64;

/// Exponent of a monomial `a^ea q^{q2/2} t^{t2/2}`.
///
/// The derived order is lexicographic on `(ea, q2, t2)`, which is the
/// canonical output order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ExponentTriple {
    pub ea: i64,
    pub q2: i64,
    pub t2: i64,
}

impl ExponentTriple {
    pub const ZERO: Self = Self { ea: 0, q2: 0, t2: 0 };

    pub const fn new(ea: i64, q2: i64, t2: i64) -> Self {
        Self { ea, q2, t2 }
    }

    pub fn checked_add(self, other: Self) -> Result<Self> {
        Ok(Self {
            ea: self.ea.checked_add(other.ea).ok_or(KhrError::Overflow)?,
            q2: self.q2.checked_add(other.q2).ok_or(KhrError::Overflow)?,
            t2: self.t2.checked_add(other.t2).ok_or(KhrError::Overflow)?,
        })
    }

    pub fn checked_sub(self, other: Self) -> Result<Self> {
        Ok(Self {
            ea: self.ea.checked_sub(other.ea).ok_or(KhrError::Overflow)?,
            q2: self.q2.checked_sub(other.q2).ok_or(KhrError::Overflow)?,
            t2: self.t2.checked_sub(other.t2).ok_or(KhrError::Overflow)?,
        })
    }

    /// Both half-powers odd: the monomial sits in odd homological degree.
    pub fn is_odd_homology(&self) -> bool {
        self.q2 % 2 != 0 && self.t2 % 2 != 0
    }

    pub fn is_parity_coherent(&self) -> bool {
        (self.q2 - self.t2) % 2 == 0
    }

    fn swapped(self) -> Self {
        Self { ea: self.ea, q2: self.t2, t2: self.q2 }
    }

    fn min(self, other: Self) -> Self {
        Self {
            ea: self.ea.min(other.ea),
            q2: self.q2.min(other.q2),
            t2: self.t2.min(other.t2),
        }
    }
}

/// `p = coeff * x^exponent * r`, the result of [`LaurentPoly::monomial_ratio`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialRatio {
    pub coeff: Coeff,
    pub exponent: ExponentTriple,
}

impl MonomialRatio {
    pub fn sign(&self) -> i8 {
        if self.coeff < 0 {
            -1
        } else {
            1
        }
    }
}

/// Sparse Laurent polynomial. No zero coefficients are ever stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<ExponentTriple, Coeff>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: Coeff) -> Self {
        Self::monomial(ExponentTriple::ZERO, c)
    }

    pub fn monomial(e: ExponentTriple, c: Coeff) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(e, c);
        }
        Self { terms }
    }

    /// `a^ea q^{q2/2} t^{t2/2}` with coefficient 1.
    pub fn mono(ea: i64, q2: i64, t2: i64) -> Self {
        Self::monomial(ExponentTriple::new(ea, q2, t2), 1)
    }

    pub fn a() -> Self {
        Self::mono(1, 0, 0)
    }

    /// `q^k` for an integer `k`.
    pub fn q_pow(k: i64) -> Self {
        Self::mono(0, 2 * k, 0)
    }

    /// `t^k` for an integer `k`.
    pub fn t_pow(k: i64) -> Self {
        Self::mono(0, 0, 2 * k)
    }

    /// `1 - t`.
    pub fn one_minus_t() -> Self {
        Self::from_terms([(ExponentTriple::ZERO, 1), (ExponentTriple::new(0, 0, 2), -1)])
            .expect("small literal")
    }

    /// Builds a polynomial from possibly repeated, possibly zero terms.
    pub fn from_terms<I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ExponentTriple, Coeff)>,
    {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c)?;
        }
        Ok(p)
    }

    fn add_term(&mut self, e: ExponentTriple, c: Coeff) -> Result<()> {
        if c == 0 {
            return Ok(());
        }
        let slot = self.terms.entry(e).or_insert(0);
        *slot = slot.checked_add(c).ok_or(KhrError::Overflow)?;
        if *slot == 0 {
            self.terms.remove(&e);
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: ExponentTriple) -> Coeff {
        self.terms.get(&e).copied().unwrap_or(0)
    }

    /// Terms in canonical (lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = (ExponentTriple, Coeff)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, *c))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.try_add_assign(other)?;
        Ok(out)
    }

    /// In-place `self += other`.
    pub fn try_add_assign(&mut self, other: &Self) -> Result<()> {
        for (e, c) in other.terms() {
            self.add_term(e, c)?;
        }
        Ok(())
    }

    pub fn try_neg(&self) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (e, c) in self.terms() {
            terms.insert(e, c.checked_neg().ok_or(KhrError::Overflow)?);
        }
        Ok(Self { terms })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.try_neg()?)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in other.terms() {
                let c = c1.checked_mul(c2).ok_or(KhrError::Overflow)?;
                out.add_term(e1.checked_add(e2)?, c)?;
            }
        }
        Ok(out)
    }

    pub fn try_pow(&self, k: u32) -> Result<Self> {
        let mut out = Self::one();
        for _ in 0..k {
            out = out.try_mul(self)?;
        }
        Ok(out)
    }

    /// Exchanges the roles of `q` and `t` in every term.
    pub fn swap_qt(&self) -> Self {
        Self {
            terms: self.terms().map(|(e, c)| (e.swapped(), c)).collect(),
        }
    }

    /// Substitutes `(qt)^{1/2} -> -(qt)^{1/2}`: terms with odd `q2` change sign.
    ///
    /// Fails if some term has a half-integer power of only one of `q`, `t`.
    pub fn euler_sign(&self) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (e, c) in self.terms() {
            if !e.is_parity_coherent() {
                return Err(KhrError::ParityMismatch {
                    term: Self::monomial(e, c).to_string(),
                });
            }
            let c = if e.q2 % 2 != 0 { c.checked_neg().ok_or(KhrError::Overflow)? } else { c };
            terms.insert(e, c);
        }
        Ok(Self { terms })
    }

    /// True iff only integer powers of `q` and `t` occur.
    pub fn is_even_series(&self) -> bool {
        self.terms.keys().all(|e| e.q2 % 2 == 0 && e.t2 % 2 == 0)
    }

    /// Finds `c, e` with `self = c * x^e * r`, if such a pair exists.
    ///
    /// Returns `None` when `self` or `r` is zero.
    pub fn monomial_ratio(&self, r: &Self) -> Option<MonomialRatio> {
        if self.len() != r.len() || self.is_zero() {
            return None;
        }
        // Multiplication by a monomial preserves the term order, so the
        // leading terms must correspond.
        let (pe, pc) = self.terms.iter().next_back()?;
        let (re, rc) = r.terms.iter().next_back()?;
        if pc % rc != 0 {
            return None;
        }
        let coeff = pc / rc;
        let exponent = pe.checked_sub(*re).ok()?;
        let candidate = r.try_mul(&Self::monomial(exponent, coeff)).ok()?;
        (candidate == *self).then_some(MonomialRatio { coeff, exponent })
    }

    /// Sum of the coefficients of the `a`-free terms, i.e. the value at
    /// `a = 0, q = t = 1`.
    pub fn specialize_count(&self) -> Result<Coeff> {
        self.terms()
            .filter(|(e, _)| e.ea == 0)
            .try_fold(0 as Coeff, |acc, (_, c)| acc.checked_add(c).ok_or(KhrError::Overflow))
    }

    /// Componentwise minimum of all exponents; zero for the zero polynomial.
    pub fn min_exponent(&self) -> ExponentTriple {
        self.terms
            .keys()
            .copied()
            .reduce(ExponentTriple::min)
            .unwrap_or(ExponentTriple::ZERO)
    }

    /// Exact quotient by `(1 - t)`.
    pub fn divide_exact_by_one_minus_t(&self) -> Result<Self> {
        // Split into classes that differ only in integer powers of t; within
        // a class, f = (1 - t) g forces g to be the running sum of f.
        let mut classes: BTreeMap<(i64, i64, i64), Vec<(i64, Coeff)>> = BTreeMap::new();
        for (e, c) in self.terms() {
            classes
                .entry((e.ea, e.q2, e.t2.rem_euclid(2)))
                .or_default()
                .push((e.t2, c));
        }
        let mut out = Self::zero();
        for ((ea, q2, _), mut class) in classes {
            class.sort_unstable();
            let mut acc: Coeff = 0;
            let mut iter = class.iter().peekable();
            let mut t2 = class[0].0;
            let last = class[class.len() - 1].0;
            while t2 <= last {
                if let Some((_, c)) = iter.next_if(|(k, _)| *k == t2) {
                    acc = acc.checked_add(*c).ok_or(KhrError::Overflow)?;
                }
                if t2 < last {
                    out.add_term(ExponentTriple::new(ea, q2, t2), acc)?;
                }
                t2 += 2;
            }
            if acc != 0 {
                return Err(KhrError::NotDivisible);
            }
        }
        Ok(out)
    }

    pub fn to_latex(&self) -> String {
        if self.len() > 1 {
            let m = self.min_exponent();
            if m != ExponentTriple::ZERO {
                let inner: Vec<_> = self
                    .terms()
                    .map(|(e, c)| (e.checked_sub(m).expect("exponent difference of present terms"), c))
                    .collect();
                let prefix = latex_monomial(m);
                return format!("{prefix}\\left({}\\right)", latex_sum(&inner));
            }
        }
        let terms: Vec<_> = self.terms().collect();
        latex_sum(&terms)
    }
}

fn latex_sum(terms: &[(ExponentTriple, Coeff)]) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (e, c)) in terms.iter().enumerate() {
        let mono = latex_monomial(*e);
        let mag = c.unsigned_abs();
        if i == 0 {
            if *c < 0 {
                out.push('-');
            }
        } else {
            out.push_str(if *c < 0 { " - " } else { " + " });
        }
        if mono.is_empty() {
            out.push_str(&mag.to_string());
        } else {
            if mag != 1 {
                out.push_str(&mag.to_string());
            }
            out.push_str(&mono);
        }
    }
    out
}

fn latex_half_power(var: &str, twice: i64) -> String {
    match twice {
        0 => String::new(),
        2 => var.to_string(),
        x if x % 2 == 0 => format!("{var}^{{{}}}", x / 2),
        x => format!("{var}^{{{x}/2}}"),
    }
}

fn latex_monomial(e: ExponentTriple) -> String {
    let mut out = String::new();
    match e.ea {
        0 => {}
        1 => out.push('a'),
        k => out.push_str(&format!("a^{{{k}}}")),
    }
    let (mut q2, mut t2) = (e.q2, e.t2);
    if e.is_odd_homology() {
        let s = if q2 + t2 < 0 { -1 } else { 1 };
        out.push_str(if s < 0 { "(qt)^{-1/2}" } else { "(qt)^{1/2}" });
        q2 -= s;
        t2 -= s;
    }
    out.push_str(&latex_half_power("q", q2));
    out.push_str(&latex_half_power("t", t2));
    out
}

fn text_half_power(var: &str, twice: i64) -> Option<String> {
    match twice {
        0 => None,
        2 => Some(var.to_string()),
        x if x % 2 == 0 => Some(format!("{var}^{}", x / 2)),
        x => Some(format!("{var}^({x}/2)")),
    }
}

fn text_monomial(e: ExponentTriple) -> String {
    let mut parts = Vec::new();
    match e.ea {
        0 => {}
        1 => parts.push("a".to_string()),
        k => parts.push(format!("a^{k}")),
    }
    parts.extend(text_half_power("q", e.q2));
    parts.extend(text_half_power("t", e.t2));
    parts.join("*")
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms().enumerate() {
            let mag = c.unsigned_abs();
            if i == 0 {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c < 0 { " - " } else { " + " })?;
            }
            let mono = text_monomial(e);
            match (mono.is_empty(), mag) {
                (true, _) => write!(f, "{mag}")?,
                (false, 1) => f.write_str(&mono)?,
                (false, _) => write!(f, "{mag}*{mono}")?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &'a LaurentPoly) -> LaurentPoly {
        self.try_add(rhs).expect("coefficient overflow")
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &rhs
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &'a LaurentPoly) -> LaurentPoly {
        self.try_sub(rhs).expect("coefficient overflow")
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &'a LaurentPoly) -> LaurentPoly {
        self.try_mul(rhs).expect("coefficient overflow")
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.try_neg().expect("coefficient overflow")
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    a: i64,
    q2: i64,
    t2: i64,
    c: String,
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.terms().map(|(e, c)| TermRepr {
            a: e.ea,
            q2: e.q2,
            t2: e.t2,
            c: c.to_string(),
        }))
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<TermRepr>::deserialize(d)?;
        let mut terms = BTreeMap::new();
        for t in raw {
            let c: Coeff = t.c.parse().map_err(D::Error::custom)?;
            if c == 0 {
                return Err(D::Error::custom("zero coefficient"));
            }
            if terms.insert(ExponentTriple::new(t.a, t.q2, t.t2), c).is_some() {
                return Err(D::Error::custom("duplicate exponent"));
            }
        }
        Ok(Self { terms })
    }
}

/// `num / (1 - t)^dpow`, kept in canonical form: when `dpow > 0` the
/// numerator is not divisible by `1 - t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Invariant {
    num: LaurentPoly,
    dpow: u32,
}

impl Invariant {
    pub fn new(num: LaurentPoly, dpow: u32) -> Self {
        Self::canonicalize(num, dpow)
    }

    pub fn polynomial(num: LaurentPoly) -> Self {
        Self { num, dpow: 0 }
    }

    pub fn zero() -> Self {
        Self::polynomial(LaurentPoly::zero())
    }

    /// `1 / (1 - t)`, the value of the unknot.
    pub fn unknot() -> Self {
        Self { num: LaurentPoly::one(), dpow: 1 }
    }

    /// Cancels common `(1 - t)` factors.
    pub fn canonicalize(mut num: LaurentPoly, mut dpow: u32) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        while dpow > 0 {
            match num.divide_exact_by_one_minus_t() {
                Ok(q) => {
                    num = q;
                    dpow -= 1;
                }
                Err(_) => break,
            }
        }
        Self { num, dpow }
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn one_minus_t_pow(&self) -> u32 {
        self.dpow
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Numerator over the denominator `(1 - t)^d`, for `d >= dpow`.
    pub fn numerator_over(&self, d: u32) -> Result<LaurentPoly> {
        if d < self.dpow {
            return Err(KhrError::Internal(format!(
                "cannot express denominator (1-t)^{} over (1-t)^{d}",
                self.dpow
            )));
        }
        self.num.try_mul(&LaurentPoly::one_minus_t().try_pow(d - self.dpow)?)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let d = self.dpow.max(other.dpow);
        let num = self.numerator_over(d)?.try_add(&other.numerator_over(d)?)?;
        Ok(Self::canonicalize(num, d))
    }

    pub fn try_mul_poly(&self, p: &LaurentPoly) -> Result<Self> {
        Ok(Self::canonicalize(self.num.try_mul(p)?, self.dpow))
    }

    pub fn map_numerator<F>(&self, f: F) -> Result<Self>
    where
        F: FnOnce(&LaurentPoly) -> Result<LaurentPoly>,
    {
        Ok(Self::canonicalize(f(&self.num)?, self.dpow))
    }

    pub fn is_even_series(&self) -> bool {
        self.num.is_even_series()
    }

    pub fn to_latex(&self) -> String {
        let num = self.num.to_latex();
        match self.dpow {
            0 => num,
            1 => format!("\\frac{{{num}}}{{1-t}}"),
            d => format!("\\frac{{{num}}}{{(1-t)^{{{d}}}}}"),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("invariant serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| KhrError::Parse(e.to_string()))
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.dpow {
            0 => write!(f, "{}", self.num),
            1 => write!(f, "({})/(1-t)", self.num),
            d => write!(f, "({})/(1-t)^{d}", self.num),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct InvariantRepr {
    num: LaurentPoly,
    one_minus_t_pow: u32,
}

impl Serialize for Invariant {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        InvariantRepr { num: self.num.clone(), one_minus_t_pow: self.dpow }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Invariant {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = InvariantRepr::deserialize(d)?;
        Ok(Self::canonicalize(r.num, r.one_minus_t_pow))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> LaurentPoly {
        LaurentPoly::q_pow(1)
    }
    fn t() -> LaurentPoly {
        LaurentPoly::t_pow(1)
    }
    fn a() -> LaurentPoly {
        LaurentPoly::a()
    }
    fn one() -> LaurentPoly {
        LaurentPoly::one()
    }
    fn trefoil() -> LaurentPoly {
        &(&q() + &t()) - &a()
    }

    #[test]
    fn add_examples() {
        assert_eq!(&(&q() + &t()) + &(-t()), q());
        assert_eq!(&trefoil() + &LaurentPoly::zero(), trefoil());
        assert_eq!(&(&q() - &a()) + &t(), trefoil());
    }

    #[test]
    fn mul_examples() {
        let lhs = &q() * &(&one() - &(&a() * &LaurentPoly::q_pow(-1)));
        assert_eq!(lhs, &q() - &a());
        assert_eq!(&LaurentPoly::mono(0, -1, -1) * &LaurentPoly::mono(0, 1, 1), one());
        let expected = LaurentPoly::from_terms([
            (ExponentTriple::ZERO, 1),
            (ExponentTriple::new(1, 0, 0), -1),
            (ExponentTriple::new(0, 0, 2), -1),
            (ExponentTriple::new(1, 0, 2), 1),
        ])
        .unwrap();
        assert_eq!(&(&one() - &a()) * &LaurentPoly::one_minus_t(), expected);
    }

    #[test]
    fn overflow_is_detected() {
        let big = LaurentPoly::constant(i64::MAX);
        assert_eq!(big.try_add(&one()), Err(KhrError::Overflow));
        assert_eq!(big.try_mul(&LaurentPoly::constant(2)), Err(KhrError::Overflow));
        assert_eq!(LaurentPoly::constant(i64::MIN).try_neg(), Err(KhrError::Overflow));
    }

    #[test]
    #[should_panic(expected = "coefficient overflow")]
    fn operator_overflow_panics() {
        let _ = LaurentPoly::constant(i64::MAX) + one();
    }

    #[test]
    fn swap_qt_examples() {
        assert_eq!((&q() + &t()).swap_qt(), &q() + &t());
        let p = &LaurentPoly::q_pow(2) + &(&q() * &t());
        assert_eq!(p.swap_qt(), &LaurentPoly::t_pow(2) + &(&q() * &t()));
        assert_eq!(trefoil().swap_qt(), trefoil());
    }

    #[test]
    fn euler_sign_examples() {
        let p = &one() + &(&q() * &t());
        assert_eq!(p.euler_sign().unwrap(), p);
        let odd = LaurentPoly::mono(1, -1, -1);
        assert_eq!(odd.euler_sign().unwrap(), -odd.clone());
        let p32 = &odd * &trefoil();
        assert_eq!(p32.euler_sign().unwrap(), -p32.clone());
        assert!(matches!(
            LaurentPoly::mono(0, 1, 0).euler_sign(),
            Err(KhrError::ParityMismatch { .. })
        ));
    }

    #[test]
    fn monomial_ratio_examples() {
        let r = LaurentPoly::monomial(ExponentTriple::new(0, 4, 0), 2)
            .monomial_ratio(&LaurentPoly::monomial(ExponentTriple::new(0, 2, 0), 2))
            .unwrap();
        assert_eq!(r, MonomialRatio { coeff: 1, exponent: ExponentTriple::new(0, 2, 0) });
        assert_eq!((&q() + &t()).monomial_ratio(&q()), None);
        let r = (&q() * &trefoil()).monomial_ratio(&trefoil()).unwrap();
        assert_eq!(r.exponent, ExponentTriple::new(0, 2, 0));
        assert_eq!(r.coeff, 1);
        let r = (-trefoil()).monomial_ratio(&trefoil()).unwrap();
        assert_eq!((r.sign(), r.exponent), (-1, ExponentTriple::ZERO));
        assert_eq!(LaurentPoly::zero().monomial_ratio(&q()), None);
        assert_eq!(q().monomial_ratio(&LaurentPoly::constant(2)), None);
    }

    #[test]
    fn even_series_examples() {
        assert!((&LaurentPoly::q_pow(-1) * &trefoil()).is_even_series());
        assert!(!LaurentPoly::mono(0, 1, 0).is_even_series());
        assert!(LaurentPoly::zero().is_even_series());
    }

    #[test]
    fn specialize_count_examples() {
        assert_eq!(trefoil().specialize_count().unwrap(), 2);
        assert_eq!(one().specialize_count().unwrap(), 1);
    }

    #[test]
    fn divide_by_one_minus_t() {
        let p = &trefoil() * &LaurentPoly::one_minus_t();
        assert_eq!(p.divide_exact_by_one_minus_t().unwrap(), trefoil());
        assert_eq!(trefoil().divide_exact_by_one_minus_t(), Err(KhrError::NotDivisible));
        // half-integer t powers form their own class
        let h = &LaurentPoly::mono(1, -1, -1) * &LaurentPoly::one_minus_t().try_pow(2).unwrap();
        assert_eq!(
            h.divide_exact_by_one_minus_t().unwrap(),
            &LaurentPoly::mono(1, -1, -1) * &LaurentPoly::one_minus_t()
        );
    }

    #[test]
    fn invariant_canonical_form() {
        let v = Invariant::new(LaurentPoly::one_minus_t(), 1);
        assert_eq!(v, Invariant::polynomial(one()));
        let v = Invariant::new(&trefoil() * &LaurentPoly::one_minus_t(), 2);
        assert_eq!(v.one_minus_t_pow(), 1);
        assert_eq!(v.numerator(), &trefoil());
        assert_eq!(Invariant::new(LaurentPoly::zero(), 3), Invariant::zero());
        let sum = Invariant::unknot().try_add(&Invariant::polynomial(-one())).unwrap();
        assert_eq!(sum, Invariant::new(t(), 1));
    }

    #[test]
    fn json_format() {
        let v = Invariant::new(&LaurentPoly::mono(1, -1, -1) * &trefoil(), 1);
        let s = v.to_json();
        assert_eq!(
            s,
            r#"{"num":[{"a":1,"q2":-1,"t2":1,"c":"1"},{"a":1,"q2":1,"t2":-1,"c":"1"},{"a":2,"q2":-1,"t2":-1,"c":"-1"}],"one_minus_t_pow":1}"#
        );
        assert_eq!(Invariant::from_json(&s).unwrap(), v);
        assert!(Invariant::from_json(r#"{"num":[{"a":0,"q2":0,"t2":0,"c":"0"}],"one_minus_t_pow":0}"#).is_err());
    }

    #[test]
    fn latex_rendering() {
        let v = Invariant::new(&LaurentPoly::mono(1, -1, -1) * &trefoil(), 1);
        assert_eq!(v.to_latex(), "\\frac{a(qt)^{-1/2}\\left(t + q - a\\right)}{1-t}");
        assert_eq!(Invariant::unknot().to_latex(), "\\frac{1}{1-t}");
        assert_eq!(LaurentPoly::mono(0, 3, 0).to_latex(), "q^{3/2}");
        assert_eq!(LaurentPoly::monomial(ExponentTriple::new(2, 4, -2), -3).to_latex(), "-3a^{2}q^{2}t^{-1}");
        assert_eq!(Invariant::zero().to_latex(), "0");
    }

    #[test]
    fn text_rendering() {
        let v = Invariant::new(&LaurentPoly::mono(1, -1, -1) * &trefoil(), 1);
        assert_eq!(v.to_string(), "(a*q^(-1/2)*t^(1/2) + a*q^(1/2)*t^(-1/2) - a^2*q^(-1/2)*t^(-1/2))/(1-t)");
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec(((-2i64..3, -4i64..5, -4i64..5), -20i64..20), 0..6).prop_map(|v| {
            LaurentPoly::from_terms(v.into_iter().map(|((a, q, t), c)| (ExponentTriple::new(a, q, t), c)))
                .unwrap()
        })
    }

    fn arb_coherent() -> impl Strategy<Value = LaurentPoly> {
        arb_poly().prop_map(|p| {
            LaurentPoly::from_terms(p.terms().filter(|(e, _)| e.is_parity_coherent())).unwrap()
        })
    }

    proptest! {
        #[test]
        fn ring_laws(p in arb_poly(), r in arb_poly(), s in arb_poly()) {
            prop_assert_eq!(&p + &r, &r + &p);
            prop_assert_eq!(&p * &r, &r * &p);
            prop_assert_eq!(&(&p + &r) + &s, &p + &(&r + &s));
            prop_assert_eq!(&(&p * &r) * &s, &p * &(&r * &s));
            prop_assert_eq!(&p * &(&r + &s), &(&p * &r) + &(&p * &s));
        }

        #[test]
        fn involutions(p in arb_coherent()) {
            prop_assert_eq!(p.swap_qt().swap_qt(), p.clone());
            prop_assert_eq!(p.euler_sign().unwrap().euler_sign().unwrap(), p);
        }

        #[test]
        fn json_round_trip(p in arb_poly(), d in 0u32..3) {
            let v = Invariant::new(p, d);
            let s = v.to_json();
            let back = Invariant::from_json(&s).unwrap();
            prop_assert_eq!(back.to_json(), s);
            prop_assert_eq!(back, v);
        }

        #[test]
        fn canonical_form_is_unique(p in arb_poly(), k in 0u32..3) {
            let v = Invariant::new(p.clone(), 1);
            let w = Invariant::new(&p * &LaurentPoly::one_minus_t().try_pow(k).unwrap(), 1 + k);
            prop_assert_eq!(&v, &w);
            if v.one_minus_t_pow() > 0 {
                prop_assert!(v.numerator().divide_exact_by_one_minus_t().is_err());
            }
        }

        #[test]
        fn specialize_count_matches_direct_sum(p in arb_poly()) {
            let direct: i64 = p.terms().filter(|(e, _)| e.ea == 0).map(|(_, c)| c).sum();
            prop_assert_eq!(p.specialize_count().unwrap(), direct);
        }

        #[test]
        fn monomial_ratio_recovers_multiplier(p in arb_poly(), e in (-2i64..3, -3i64..4, -3i64..4), c in prop::sample::select(vec![-3i64, -1, 1, 2])) {
            prop_assume!(!p.is_zero());
            let m = ExponentTriple::new(e.0, e.1, e.2);
            let r = (&p * &LaurentPoly::monomial(m, c)).monomial_ratio(&p).unwrap();
            prop_assert_eq!(r, MonomialRatio { coeff: c, exponent: m });
        }
    }
}
