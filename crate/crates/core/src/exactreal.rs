//! Exact real constants of the form `q_1 + q_2·√2 + q_3·√3 + q_5·√5 + …`.
//!
//! A [`RealConstant`] is a finite ℚ-linear combination of square roots of
//! squarefree positive integers. Because `{√m : m squarefree}` is linearly
//! independent over ℚ, the canonical term map is empty exactly when the value
//! is zero, and the sign of a nonzero value can always be found by refining
//! dyadic enclosures of the square roots until the enclosing interval excludes
//! zero. No floating point is involved in [`RealConstant::sign`] or
//! [`RealConstant::floor`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::{BigInt, Sign as BigSign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Three-valued sign, used both for reals and for positive-cone membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Negative,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "+")]
    Positive,
}

impl Sign {
    pub fn of_int(v: &BigInt) -> Sign {
        match v.sign() {
            BigSign::Minus => Sign::Negative,
            BigSign::NoSign => Sign::Zero,
            BigSign::Plus => Sign::Positive,
        }
    }

    pub fn of_rational(v: &Rational) -> Sign {
        if v.is_zero() {
            Sign::Zero
        } else if v.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn negate(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    pub fn to_i32(self) -> i32 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Negative => "-",
            Sign::Zero => "0",
            Sign::Positive => "+",
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

pub fn is_squarefree(m: u64) -> bool {
    if m == 0 {
        return false;
    }
    let mut n = m;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Splits `n > 0` as `a²·b` with `b` squarefree.
fn square_part(n: u64) -> (u64, u64) {
    let mut a = 1u64;
    let mut b = 1u64;
    let mut rest = n;
    let mut p = 2u64;
    while p * p <= rest {
        let mut e = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        a *= p.pow(e / 2);
        if e % 2 == 1 {
            b *= p;
        }
        p += 1;
    }
    (a, b * rest)
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::Parse(format!("malformed rational {text:?}"));
    let parse_int = |s: &str| -> Result<BigInt> {
        let s = s.trim();
        if s.is_empty() || s.contains('.') || s.contains('e') || s.contains('E') {
            return Err(bad());
        }
        s.parse::<BigInt>().map_err(|_| bad())
    };
    match t.split_once('/') {
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(Rational::new(parse_int(p)?, q))
        }
        None => Ok(Rational::from_integer(parse_int(t)?)),
    }
}

pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Dyadic enclosure of √m at `bits` fractional bits: returns `(s, exact)` with
/// `s = ⌊√m·2^bits⌋`; if `exact` the root is `s/2^bits`, otherwise it lies
/// strictly inside `(s, s+1)/2^bits`.
fn sqrt_scaled(m: u64, bits: u32) -> (BigInt, bool) {
    let scaled = BigInt::from(m) << (2 * bits as usize);
    let s = scaled.sqrt();
    let exact = &s * &s == scaled;
    (s, exact)
}

/// `Σ q_m √m` over squarefree keys `m`, in canonical form (no zero
/// coefficients, squarefree keys only).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RealConstant {
    terms: BTreeMap<u64, Rational>,
}

impl RealConstant {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::rational(Rational::one())
    }

    pub fn rational(q: Rational) -> Self {
        Self::term(q, 1)
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(rat_int(n))
    }

    /// `q·√m` for any positive `m`; square factors of `m` are pulled out.
    pub fn term(q: Rational, m: u64) -> Self {
        assert!(m > 0, "square root key must be positive");
        let (a, b) = square_part(m);
        let q = q * Rational::from_integer(BigInt::from(a));
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(b, q);
        }
        RealConstant { terms }
    }

    /// `√m`.
    pub fn sqrt(m: u64) -> Self {
        Self::term(Rational::one(), m)
    }

    /// Builds from raw `(key, coefficient)` pairs; keys must be squarefree.
    pub fn from_terms<I: IntoIterator<Item = (u64, Rational)>>(terms: I) -> Result<Self> {
        let mut out = RealConstant::zero();
        for (m, q) in terms {
            if !is_squarefree(m) {
                return Err(Error::InvalidInput(format!("key {m} is not a positive squarefree integer")));
            }
            out.add_term(m, q);
        }
        Ok(out)
    }

    fn add_term(&mut self, m: u64, q: Rational) {
        if q.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Rational::zero);
        *entry += q;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> &BTreeMap<u64, Rational> {
        &self.terms
    }

    pub fn keys(&self) -> impl Iterator<Item = u64> + '_ {
        self.terms.keys().copied()
    }

    pub fn coefficient(&self, m: u64) -> Rational {
        self.terms.get(&m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|&m| m == 1)
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.coefficient(1))
    }

    /// `s·a + t·b`.
    pub fn combine(a: &RealConstant, b: &RealConstant, s: &Rational, t: &Rational) -> RealConstant {
        let mut out = a.scale(s);
        if !t.is_zero() {
            for (&m, q) in &b.terms {
                out.add_term(m, q * t);
            }
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> RealConstant {
        if s.is_zero() {
            return RealConstant::zero();
        }
        RealConstant {
            terms: self.terms.iter().map(|(&m, q)| (m, q * s)).collect(),
        }
    }

    pub fn scale_int(&self, k: i64) -> RealConstant {
        self.scale(&rat_int(k))
    }

    pub fn div_by_rational(&self, s: &Rational) -> Result<RealConstant> {
        if s.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.scale(&s.recip()))
    }

    /// Integer coefficients after multiplying through by the positive lcm of
    /// the denominators.
    fn integer_form(&self) -> (BigInt, Vec<(u64, BigInt)>) {
        let den = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let coeffs = self
            .terms
            .iter()
            .map(|(&m, q)| (m, q.numer() * (&den / q.denom())))
            .collect();
        (den, coeffs)
    }

    /// Integer bounds `(lo, hi, den·2^bits, strict)` with
    /// `lo ≤ den·2^bits·value ≤ hi`; when `strict` (some irrational term is
    /// present) both inequalities are strict.
    fn scaled_bounds(coeffs: &[(u64, BigInt)], bits: u32) -> (BigInt, BigInt, bool) {
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        let mut strict = false;
        for (m, c) in coeffs {
            let (s, exact) = sqrt_scaled(*m, bits);
            if exact {
                let v = c * &s;
                lo += &v;
                hi += v;
            } else {
                strict = true;
                let s1 = &s + 1u32;
                if c.is_positive() {
                    lo += c * &s;
                    hi += c * &s1;
                } else {
                    lo += c * &s1;
                    hi += c * &s;
                }
            }
        }
        (lo, hi, strict)
    }

    pub fn sign(&self) -> Sign {
        if self.terms.is_empty() {
            return Sign::Zero;
        }
        if self.terms.len() == 1 {
            return Sign::of_rational(self.terms.values().next().unwrap());
        }
        let (_, coeffs) = self.integer_form();
        let mut bits = 32u32;
        loop {
            let (lo, hi, _) = Self::scaled_bounds(&coeffs, bits);
            if lo.is_positive() {
                return Sign::Positive;
            }
            if hi.is_negative() {
                return Sign::Negative;
            }
            bits *= 2;
        }
    }

    /// Greatest integer `≤ self`.
    pub fn floor(&self) -> BigInt {
        if let Some(q) = self.as_rational() {
            return q.floor().to_integer();
        }
        let (den, coeffs) = self.integer_form();
        let mut bits = 32u32;
        loop {
            let (lo, hi, _) = Self::scaled_bounds(&coeffs, bits);
            let scale = &den << bits as usize;
            let fl = lo.div_floor(&scale);
            // value is irrational, so lo < scale·value < hi strictly
            if hi <= (&fl + 1u32) * &scale {
                return fl;
            }
            bits *= 2;
        }
    }

    /// `self − ⌊self⌋ ∈ [0, 1)`.
    pub fn fract(&self) -> RealConstant {
        let fl = self.floor();
        self - &RealConstant::rational(Rational::from_integer(fl))
    }

    /// Closed rational enclosure `[lo, hi]` of width at most `2^-bits` times
    /// the sum of absolute coefficients.
    pub fn enclosure(&self, bits: u32) -> (Rational, Rational) {
        if self.terms.is_empty() {
            return (Rational::zero(), Rational::zero());
        }
        let (den, coeffs) = self.integer_form();
        let (lo, hi, _) = Self::scaled_bounds(&coeffs, bits);
        let scale = den << bits as usize;
        (Rational::new(lo, scale.clone()), Rational::new(hi, scale))
    }

    /// Compares with an exact rational.
    pub fn cmp_rational(&self, q: &Rational) -> Sign {
        (self - &RealConstant::rational(q.clone())).sign()
    }

    /// Display-only approximation.
    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(&m, q)| q.to_f64().unwrap_or(f64::NAN) * (m as f64).sqrt())
            .sum()
    }

    /// Sum of `coeffs[i]·values[i]` for integer coefficients.
    pub fn int_combination(values: &[RealConstant], coeffs: &[i64]) -> RealConstant {
        let mut out = RealConstant::zero();
        for (v, &c) in values.iter().zip(coeffs) {
            if c == 0 {
                continue;
            }
            let c = rat_int(c);
            for (&m, q) in &v.terms {
                out.add_term(m, q * &c);
            }
        }
        out
    }
}

/// Dimension of the ℚ-span of `values`.
pub fn q_rank(values: &[RealConstant]) -> usize {
    let mut keys: Vec<u64> = values.iter().flat_map(|v| v.keys()).collect();
    keys.sort_unstable();
    keys.dedup();
    let rows: Vec<Vec<Rational>> = values
        .iter()
        .map(|v| keys.iter().map(|&m| v.coefficient(m)).collect())
        .collect();
    crate::linalg::rational_rank(&rows)
}

impl Add for &RealConstant {
    type Output = RealConstant;
    fn add(self, rhs: &RealConstant) -> RealConstant {
        RealConstant::combine(self, rhs, &Rational::one(), &Rational::one())
    }
}

impl Sub for &RealConstant {
    type Output = RealConstant;
    fn sub(self, rhs: &RealConstant) -> RealConstant {
        RealConstant::combine(self, rhs, &Rational::one(), &-Rational::one())
    }
}

impl Add for RealConstant {
    type Output = RealConstant;
    fn add(self, rhs: RealConstant) -> RealConstant {
        &self + &rhs
    }
}

impl Sub for RealConstant {
    type Output = RealConstant;
    fn sub(self, rhs: RealConstant) -> RealConstant {
        &self - &rhs
    }
}

impl Neg for &RealConstant {
    type Output = RealConstant;
    fn neg(self) -> RealConstant {
        self.scale(&-Rational::one())
    }
}

impl Neg for RealConstant {
    type Output = RealConstant;
    fn neg(self) -> RealConstant {
        -&self
    }
}

impl From<Rational> for RealConstant {
    fn from(q: Rational) -> Self {
        RealConstant::rational(q)
    }
}

impl From<i64> for RealConstant {
    fn from(n: i64) -> Self {
        RealConstant::integer(n)
    }
}

impl fmt::Display for RealConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (&m, q)) in self.terms.iter().enumerate() {
            let (neg, mag) = if q.is_negative() { (true, -q) } else { (false, q.clone()) };
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m == 1 {
                f.write_str(&format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "√{m}")?;
            } else {
                write!(f, "{}√{m}", format_rational(&mag))?;
            }
        }
        Ok(())
    }
}

impl Serialize for RealConstant {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.terms.len()))?;
        for (m, q) in &self.terms {
            map.serialize_entry(&m.to_string(), &format_rational(q))?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for RealConstant {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ConstVisitor;

        impl<'de> Visitor<'de> for ConstVisitor {
            type Value = RealConstant;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str(r#"an object like {"1": "3/2", "2": "-1"}, a rational string, or an integer"#)
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> std::result::Result<RealConstant, A::Error> {
                let mut terms = Vec::new();
                while let Some((k, v)) = access.next_entry::<String, serde_json::Value>()? {
                    let m: u64 = k
                        .trim()
                        .parse()
                        .map_err(|_| de::Error::custom(format!("bad square-root key {k:?}")))?;
                    let q = match &v {
                        serde_json::Value::String(s) => parse_rational(s),
                        serde_json::Value::Number(n) if n.is_i64() => Ok(rat_int(n.as_i64().unwrap())),
                        _ => Err(Error::Parse(format!("coefficient {v} must be a \"p/q\" string"))),
                    }
                    .map_err(de::Error::custom)?;
                    terms.push((m, q));
                }
                RealConstant::from_terms(terms).map_err(de::Error::custom)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<RealConstant, E> {
                parse_rational(v).map(RealConstant::rational).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<RealConstant, E> {
                Ok(RealConstant::integer(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<RealConstant, E> {
                i64::try_from(v)
                    .map(RealConstant::integer)
                    .map_err(|_| E::custom("integer out of range"))
            }
        }

        deserializer.deserialize_any(ConstVisitor)
    }
}

/// `#[serde(with = ...)]` helper writing rationals as `"p/q"` strings.
pub mod rational_str {
    use super::{format_rational, parse_rational, Rational};
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(de::Error::custom)
    }
}
