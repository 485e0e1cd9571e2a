//! Laurent polynomials in the Lefschetz class `L`.
//!
//! Every motivic class computed by this crate lives in `Z[L, L^-1]`. The
//! polynomial type is generic over its coefficient ring so that the same code
//! serves the arbitrary-precision classes ([`crate::MotivicClass`]) and cheap
//! machine-integer scratch computations.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Coefficient ring of a [`LaurentPolynomial`].
pub trait Coefficient:
    Clone
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + fmt::Display
    + fmt::Debug
{
}

impl<T> Coefficient for T where
    T: Clone
        + PartialEq
        + PartialOrd
        + Zero
        + One
        + Neg<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + fmt::Display
        + fmt::Debug
{
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("evaluation at zero of a polynomial with negative exponents")]
    ZeroDenominator,
}

impl PolyError {
    pub fn name(&self) -> &'static str {
        match self {
            PolyError::ZeroDenominator => "ZeroDenominator",
        }
    }
}

/// An element of `R[L, L^-1]` stored as exponent -> non-zero coefficient.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPolynomial<C> {
    terms: BTreeMap<i64, C>,
}

impl<C: Coefficient> LaurentPolynomial<C> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::monomial(0, C::one())
    }

    /// The Lefschetz class `L`.
    pub fn lefschetz() -> Self {
        Self::monomial(1, C::one())
    }

    /// `L^exp`.
    pub fn lefschetz_power(exp: i64) -> Self {
        Self::monomial(exp, C::one())
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(exp: i64, coeff: C) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        Self { terms }
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, summing repeats.
    pub fn from_terms<I: IntoIterator<Item = (i64, C)>>(terms: I) -> Self {
        let mut out = Self::zero();
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    fn add_term(&mut self, exp: i64, coeff: C) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.remove(&exp) {
            Some(old) => {
                let sum = old + coeff;
                if !sum.is_zero() {
                    self.terms.insert(exp, sum);
                }
            }
            None => {
                self.terms.insert(exp, coeff);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exp: i64) -> C {
        self.terms.get(&exp).cloned().unwrap_or_else(C::zero)
    }

    /// Terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn has_nonnegative_coefficients(&self) -> bool {
        self.terms.values().all(|c| *c >= C::zero())
    }

    /// True when no negative exponent occurs.
    pub fn is_polynomial(&self) -> bool {
        self.min_exponent().is_none_or(|e| e >= 0)
    }

    pub fn scale(&self, factor: &C) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(e, c)| (*e, c.clone() * factor.clone())),
        )
    }

    /// Multiplies by `L^shift`.
    pub fn shift(&self, shift: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + shift, c.clone())).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Specializes `L` to `at`.
    pub fn evaluate<V>(&self, at: &V) -> Result<V, PolyError>
    where
        V: Clone + Zero + One + Mul<Output = V> + Div<Output = V> + From<C>,
    {
        if self.is_zero() {
            return Ok(V::zero());
        }
        if at.is_zero() && !self.is_polynomial() {
            return Err(PolyError::ZeroDenominator);
        }
        let mut acc = V::zero();
        for (e, c) in &self.terms {
            let power = if *e >= 0 {
                power_of(at, *e as u64)
            } else {
                V::one() / power_of(at, e.unsigned_abs())
            };
            acc = acc + V::from(c.clone()) * power;
        }
        Ok(acc)
    }

    /// LaTeX rendering with descending exponents, e.g. `\mathbb{L}^{3}+\mathbb{L}`.
    pub fn to_latex(&self) -> String {
        self.render("\\mathbb{L}", |e| format!("^{{{e}}}"), "")
    }

    fn render(&self, var: &str, sup: impl Fn(i64) -> String, sep: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let negative = *c < C::zero();
            let magnitude = if negative { -c.clone() } else { c.clone() };
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(sep);
                out.push(if negative { '-' } else { '+' });
                out.push_str(sep);
            }
            let unit = magnitude.is_one();
            match *e {
                0 => out.push_str(&magnitude.to_string()),
                1 if unit => out.push_str(var),
                1 => out.push_str(&format!("{magnitude}{var}")),
                _ if unit => out.push_str(&format!("{var}{}", sup(*e))),
                _ => out.push_str(&format!("{magnitude}{var}{}", sup(*e))),
            }
        }
        out
    }
}

fn power_of<V: Clone + One + Mul<Output = V>>(base: &V, mut exp: u64) -> V {
    let mut result = V::one();
    let mut b = base.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * b.clone();
        }
        exp >>= 1;
        if exp > 0 {
            b = b.clone() * b;
        }
    }
    result
}

impl<C: Coefficient> Default for LaurentPolynomial<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coefficient> fmt::Display for LaurentPolynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("L", |e| format!("^{e}"), " "))
    }
}

impl<C: Coefficient> fmt::Debug for LaurentPolynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPolynomial({self})")
    }
}

impl<C: Coefficient> Add<&LaurentPolynomial<C>> for &LaurentPolynomial<C> {
    type Output = LaurentPolynomial<C>;
    fn add(self, rhs: &LaurentPolynomial<C>) -> LaurentPolynomial<C> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<C: Coefficient> Add for LaurentPolynomial<C> {
    type Output = LaurentPolynomial<C>;
    fn add(mut self, rhs: LaurentPolynomial<C>) -> LaurentPolynomial<C> {
        self += &rhs;
        self
    }
}

impl<C: Coefficient> AddAssign<&LaurentPolynomial<C>> for LaurentPolynomial<C> {
    fn add_assign(&mut self, rhs: &LaurentPolynomial<C>) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl<C: Coefficient> Neg for &LaurentPolynomial<C> {
    type Output = LaurentPolynomial<C>;
    fn neg(self) -> LaurentPolynomial<C> {
        LaurentPolynomial {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

impl<C: Coefficient> Neg for LaurentPolynomial<C> {
    type Output = LaurentPolynomial<C>;
    fn neg(self) -> LaurentPolynomial<C> {
        -&self
    }
}

impl<C: Coefficient> Sub<&LaurentPolynomial<C>> for &LaurentPolynomial<C> {
    type Output = LaurentPolynomial<C>;
    fn sub(self, rhs: &LaurentPolynomial<C>) -> LaurentPolynomial<C> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl<C: Coefficient> Sub for LaurentPolynomial<C> {
    type Output = LaurentPolynomial<C>;
    fn sub(self, rhs: LaurentPolynomial<C>) -> LaurentPolynomial<C> {
        &self - &rhs
    }
}

impl<C: Coefficient> Mul<&LaurentPolynomial<C>> for &LaurentPolynomial<C> {
    type Output = LaurentPolynomial<C>;
    fn mul(self, rhs: &LaurentPolynomial<C>) -> LaurentPolynomial<C> {
        let mut out = LaurentPolynomial::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<C: Coefficient> Mul for LaurentPolynomial<C> {
    type Output = LaurentPolynomial<C>;
    fn mul(self, rhs: LaurentPolynomial<C>) -> LaurentPolynomial<C> {
        &self * &rhs
    }
}

impl<C: Coefficient> std::iter::Sum for LaurentPolynomial<C> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, p| acc + p)
    }
}

// JSON form: [[exponent, "coefficient"], ...] sorted by exponent.
impl<C: Coefficient> Serialize for LaurentPolynomial<C> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            seq.serialize_element(&(e, c.to_string()))?;
        }
        seq.end()
    }
}

impl<'de, C> Deserialize<'de> for LaurentPolynomial<C>
where
    C: Coefficient + FromStr,
    C::Err: fmt::Display,
{
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Coeff {
            Text(String),
            Int(i64),
        }
        let raw: Vec<(i64, Coeff)> = Vec::deserialize(deserializer)?;
        let mut out = Self::zero();
        for (e, c) in raw {
            let text = match c {
                Coeff::Text(s) => s,
                Coeff::Int(i) => i.to_string(),
            };
            let value = text.trim().parse::<C>().map_err(D::Error::custom)?;
            out.add_term(e, value);
        }
        Ok(out)
    }
}
