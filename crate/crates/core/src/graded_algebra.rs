//! Free graded-commutative polynomial algebras over the rationals.
//!
//! A [`GradedAlgebra`] fixes a list of generators together with a canonical
//! order. Elements ([`AlgElement`]) are sparse maps from canonical monomials to
//! nonzero rational coefficients; they carry no reference to the algebra, so the
//! algebra is passed explicitly to every sign-sensitive operation.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Render a rational as `a` or `a/b`.
pub fn fmt_q(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GradedGenerator {
    pub name: String,
    pub degree: i32,
}

impl GradedGenerator {
    pub fn new(name: impl Into<String>, degree: i32) -> Self {
        GradedGenerator {
            name: name.into(),
            degree,
        }
    }

    pub fn is_odd(&self) -> bool {
        self.degree.rem_euclid(2) == 1
    }
}

/// Product of generators in canonical order: `(position, exponent)` pairs with
/// strictly increasing positions. Odd generators always have exponent 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(u32, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn factors(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, pos: usize) -> u32 {
        match self.0.binary_search_by_key(&(pos as u32), |f| f.0) {
            Ok(i) => self.0[i].1,
            Err(_) => 0,
        }
    }

    /// Total number of factors counted with multiplicity.
    pub fn length(&self) -> u32 {
        self.0.iter().map(|f| f.1).sum()
    }
}

/// Sparse rational combination of canonical monomials.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AlgElement {
    terms: BTreeMap<Monomial, Q>,
}

impl AlgElement {
    pub fn zero() -> Self {
        AlgElement::default()
    }

    pub fn one() -> Self {
        AlgElement::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        AlgElement::monomial(Monomial::one(), c)
    }

    pub fn monomial(m: Monomial, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        AlgElement { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    /// The constant term, if the element is a pure scalar (zero counts).
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &AlgElement, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (m, a) in &other.terms {
            self.add_term(m.clone(), a * c);
        }
    }

    pub fn scale(&self, c: &Q) -> AlgElement {
        if c.is_zero() {
            return AlgElement::zero();
        }
        AlgElement {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    /// Keep only the monomials selected by `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Monomial) -> bool) -> AlgElement {
        AlgElement {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }
}

impl Add for &AlgElement {
    type Output = AlgElement;
    fn add(self, rhs: &AlgElement) -> AlgElement {
        let mut out = self.clone();
        out.add_scaled(rhs, &Q::one());
        out
    }
}

impl Sub for &AlgElement {
    type Output = AlgElement;
    fn sub(self, rhs: &AlgElement) -> AlgElement {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Q::one());
        out
    }
}

impl Neg for &AlgElement {
    type Output = AlgElement;
    fn neg(self) -> AlgElement {
        self.scale(&-Q::one())
    }
}

impl Add for AlgElement {
    type Output = AlgElement;
    fn add(self, rhs: AlgElement) -> AlgElement {
        &self + &rhs
    }
}

impl Sub for AlgElement {
    type Output = AlgElement;
    fn sub(self, rhs: AlgElement) -> AlgElement {
        &self - &rhs
    }
}

impl Neg for AlgElement {
    type Output = AlgElement;
    fn neg(self) -> AlgElement {
        -&self
    }
}

impl Mul<&Q> for &AlgElement {
    type Output = AlgElement;
    fn mul(self, rhs: &Q) -> AlgElement {
        self.scale(rhs)
    }
}

/// A free graded-commutative algebra on a fixed generator list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedAlgebra {
    /// Generators in canonical order.
    gens: Vec<GradedGenerator>,
    /// Canonical position of each generator in declaration order.
    declared: Vec<usize>,
    index: HashMap<String, usize>,
}

impl GradedAlgebra {
    /// Canonical order: degree descending, ties broken by declaration index.
    pub fn new(generators: Vec<GradedGenerator>) -> Result<Self> {
        let mut order: Vec<usize> = (0..generators.len()).collect();
        order.sort_by_key(|&i| (std::cmp::Reverse(generators[i].degree), i));
        Self::with_order(generators, &order)
    }

    /// Build with an explicit canonical order (`order[pos]` = declaration index).
    pub(crate) fn with_order(generators: Vec<GradedGenerator>, order: &[usize]) -> Result<Self> {
        let mut index = HashMap::new();
        for g in &generators {
            if index.insert(g.name.clone(), 0).is_some() {
                return Err(Error::DuplicateGenerator(g.name.clone()));
            }
        }
        let mut declared = vec![0; generators.len()];
        let mut gens = Vec::with_capacity(generators.len());
        for (pos, &decl) in order.iter().enumerate() {
            declared[decl] = pos;
            index.insert(generators[decl].name.clone(), pos);
            gens.push(generators[decl].clone());
        }
        Ok(GradedAlgebra { gens, declared, index })
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// Generators in canonical order.
    pub fn generators(&self) -> &[GradedGenerator] {
        &self.gens
    }

    /// Generators in declaration order.
    pub fn declared_generators(&self) -> Vec<&GradedGenerator> {
        self.declared.iter().map(|&p| &self.gens[p]).collect()
    }

    pub fn generator(&self, pos: usize) -> &GradedGenerator {
        &self.gens[pos]
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.position(name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn is_odd(&self, pos: usize) -> bool {
        self.gens[pos].is_odd()
    }

    /// The generator at `pos` as an element.
    pub fn var(&self, pos: usize) -> AlgElement {
        AlgElement::monomial(Monomial(vec![(pos as u32, 1)]), Q::one())
    }

    pub fn var_named(&self, name: &str) -> Result<AlgElement> {
        Ok(self.var(self.require(name)?))
    }

    pub fn monomial_degree(&self, m: &Monomial) -> i32 {
        m.0.iter().map(|&(p, e)| self.gens[p as usize].degree * e as i32).sum()
    }

    /// Whether the monomial has odd total degree.
    pub fn monomial_is_odd(&self, m: &Monomial) -> bool {
        m.0.iter()
            .filter(|&&(p, e)| self.is_odd(p as usize) && e % 2 == 1)
            .count()
            % 2
            == 1
    }

    /// Common degree of all monomials; `None` for zero or inhomogeneous elements.
    pub fn degree(&self, e: &AlgElement) -> Option<i32> {
        let mut it = e.terms.keys().map(|m| self.monomial_degree(m));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// True if every monomial has degree `deg` (the zero element qualifies).
    pub fn is_homogeneous_of(&self, e: &AlgElement, deg: i32) -> bool {
        e.terms.keys().all(|m| self.monomial_degree(m) == deg)
    }

    /// Product of canonical monomials: `None` if an odd generator repeats,
    /// otherwise the Koszul sign and the merged monomial.
    pub fn mul_monomials(&self, a: &Monomial, b: &Monomial) -> Option<(bool, Monomial)> {
        let mut odd_left = a.0.iter().filter(|f| self.is_odd(f.0 as usize)).count();
        let mut negative = false;
        let mut out = Vec::with_capacity(a.0.len() + b.0.len());
        let (mut i, mut j) = (0, 0);
        while i < a.0.len() || j < b.0.len() {
            let take_a = j == b.0.len() || (i < a.0.len() && a.0[i].0 < b.0[j].0);
            if take_a {
                if self.is_odd(a.0[i].0 as usize) {
                    odd_left -= 1;
                }
                out.push(a.0[i]);
                i += 1;
            } else if i < a.0.len() && a.0[i].0 == b.0[j].0 {
                if self.is_odd(a.0[i].0 as usize) {
                    return None;
                }
                out.push((a.0[i].0, a.0[i].1 + b.0[j].1));
                i += 1;
                j += 1;
            } else {
                if self.is_odd(b.0[j].0 as usize) && odd_left % 2 == 1 {
                    negative = !negative;
                }
                out.push(b.0[j]);
                j += 1;
            }
        }
        Some((negative, Monomial(out)))
    }

    pub fn mul(&self, a: &AlgElement, b: &AlgElement) -> AlgElement {
        let mut out = AlgElement::zero();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                if let Some((neg, m)) = self.mul_monomials(ma, mb) {
                    let c = ca * cb;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        out
    }

    /// Product of a list of elements, left to right.
    pub fn product<'a>(&self, factors: impl IntoIterator<Item = &'a AlgElement>) -> AlgElement {
        factors.into_iter().fold(AlgElement::one(), |acc, f| self.mul(&acc, f))
    }

    pub fn pow(&self, e: &AlgElement, n: u32) -> AlgElement {
        let mut out = AlgElement::one();
        for _ in 0..n {
            out = self.mul(&out, e);
        }
        out
    }

    /// Bring a raw sum of (coefficient, unordered generator-power word) to
    /// canonical form, applying Koszul signs and dropping odd squares.
    pub fn normalize<S: AsRef<str>>(&self, raw: &[(Q, Vec<(S, u32)>)]) -> Result<AlgElement> {
        let mut out = AlgElement::zero();
        for (c, word) in raw {
            let mut term = AlgElement::constant(c.clone());
            for (name, e) in word {
                let v = self.var_named(name.as_ref())?;
                term = self.mul(&term, &self.pow(&v, *e));
            }
            out.add_scaled(&term, &Q::one());
        }
        Ok(out)
    }

    /// Left partial derivative: removes the generator and picks up the sign
    /// of passing it over the preceding factors.
    pub fn partial(&self, e: &AlgElement, pos: usize) -> AlgElement {
        self.partial_impl(e, pos, true)
    }

    /// Right partial derivative: the sign comes from the factors after it.
    pub fn partial_right(&self, e: &AlgElement, pos: usize) -> AlgElement {
        self.partial_impl(e, pos, false)
    }

    fn partial_impl(&self, e: &AlgElement, pos: usize, left: bool) -> AlgElement {
        let odd = self.is_odd(pos);
        let mut out = AlgElement::zero();
        for (m, c) in &e.terms {
            let Ok(k) = m.0.binary_search_by_key(&(pos as u32), |f| f.0) else {
                continue;
            };
            let exp = m.0[k].1;
            let mut negative = false;
            if odd {
                let passed = if left { &m.0[..k] } else { &m.0[k + 1..] };
                let count = passed.iter().filter(|f| self.is_odd(f.0 as usize)).count();
                negative = count % 2 == 1;
            }
            let mut factors = m.0.clone();
            if exp == 1 {
                factors.remove(k);
            } else {
                factors[k].1 -= 1;
            }
            let coef = c * q(exp as i64);
            out.add_term(Monomial(factors), if negative { -coef } else { coef });
        }
        out
    }

    /// The derivation `Σ_i images[i]·∂_i` (left partials), i.e. the unique
    /// derivation taking generator `i` to `images[i]`.
    pub fn apply_derivation(&self, images: &[AlgElement], e: &AlgElement) -> AlgElement {
        let mut out = AlgElement::zero();
        for (pos, img) in images.iter().enumerate() {
            if img.is_zero() {
                continue;
            }
            let part = self.partial(e, pos);
            if !part.is_zero() {
                out.add_scaled(&self.mul(img, &part), &Q::one());
            }
        }
        out
    }

    /// Algebra map defined by generator images (indexed by canonical position),
    /// landing in `target`.
    pub fn substitute(&self, target: &GradedAlgebra, e: &AlgElement, images: &[AlgElement]) -> AlgElement {
        let mut out = AlgElement::zero();
        let mut powers: HashMap<(u32, u32), AlgElement> = HashMap::new();
        for (m, c) in &e.terms {
            let mut term = AlgElement::constant(c.clone());
            for &(p, exp) in &m.0 {
                let img = powers
                    .entry((p, exp))
                    .or_insert_with(|| target.pow(&images[p as usize], exp));
                term = target.mul(&term, img);
                if term.is_zero() {
                    break;
                }
            }
            out.add_scaled(&term, &Q::one());
        }
        out
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        let mut s = String::new();
        for (i, &(p, e)) in m.0.iter().enumerate() {
            if i > 0 {
                s.push('*');
            }
            s.push_str(&self.gens[p as usize].name);
            if e > 1 {
                let _ = write!(s, "^{e}");
            }
        }
        s
    }

    /// Human-readable rendering that the spec-file expression grammar reads back.
    pub fn format(&self, e: &AlgElement) -> String {
        if e.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (m, c)) in e.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if m.is_one() {
                s.push_str(&fmt_q(&abs));
            } else {
                if !abs.is_one() {
                    s.push_str(&fmt_q(&abs));
                    s.push('*');
                }
                s.push_str(&self.format_monomial(m));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg() -> GradedAlgebra {
        GradedAlgebra::new(vec![
            GradedGenerator::new("x", 0),
            GradedGenerator::new("y1", -1),
            GradedGenerator::new("y2", -1),
            GradedGenerator::new("w", -2),
        ])
        .unwrap()
    }

    #[test]
    fn canonical_order_follows_degree_then_declaration() {
        let a = GradedAlgebra::new(vec![
            GradedGenerator::new("b", -1),
            GradedGenerator::new("a", 0),
            GradedGenerator::new("c", -1),
        ])
        .unwrap();
        let names: Vec<_> = a.generators().iter().map(|g| g.name.as_str()).collect();
        assert_eq!(names, ["a", "b", "c"]);
        let decl: Vec<_> = a.declared_generators().iter().map(|g| g.name.as_str()).collect();
        assert_eq!(decl, ["b", "a", "c"]);
    }

    #[test]
    fn odd_generators_anticommute() {
        let a = alg();
        let e = a.normalize(&[(q(1), vec![("y2", 1), ("y1", 1)])]).unwrap();
        let f = a.normalize(&[(q(1), vec![("y1", 1), ("y2", 1)])]).unwrap();
        assert_eq!(e, -&f);
    }

    #[test]
    fn odd_square_vanishes() {
        let a = alg();
        assert!(a.normalize(&[(q(1), vec![("y1", 2)])]).unwrap().is_zero());
        let y = a.var_named("y1").unwrap();
        assert!(a.mul(&y, &y).is_zero());
    }

    #[test]
    fn even_and_odd_commute() {
        let a = alg();
        let e = a
            .normalize(&[(q(2), vec![("x", 1), ("y1", 1)]), (q(3), vec![("y1", 1), ("x", 1)])])
            .unwrap();
        let f = a.normalize(&[(q(5), vec![("x", 1), ("y1", 1)])]).unwrap();
        assert_eq!(e, f);
    }

    #[test]
    fn square_of_mixed_sum() {
        let a = alg();
        let p = a
            .normalize(&[(q(1), vec![("x", 1)]), (q(1), vec![("y1", 1), ("y2", 1)])])
            .unwrap();
        let expected = a
            .normalize(&[(q(1), vec![("x", 2)]), (q(2), vec![("x", 1), ("y1", 1), ("y2", 1)])])
            .unwrap();
        assert_eq!(a.mul(&p, &p), expected);
    }

    #[test]
    fn unknown_generator_is_reported() {
        let a = alg();
        let err = a.normalize(&[(q(1), vec![("nope", 1)])]).unwrap_err();
        assert!(matches!(err, Error::UnknownGenerator(n) if n == "nope"));
    }

    #[test]
    fn partial_derivatives() {
        let a = alg();
        let x = a.var_named("x").unwrap();
        let x2 = a.mul(&x, &x);
        assert_eq!(a.partial(&x2, 0), x.scale(&q(2)));
        let y1 = a.var_named("y1").unwrap();
        let y2 = a.var_named("y2").unwrap();
        let p = a.mul(&y1, &y2);
        assert_eq!(a.partial(&p, a.require("y1").unwrap()), y2);
        assert_eq!(a.partial(&p, a.require("y2").unwrap()), -&y1);
        assert_eq!(a.partial_right(&p, a.require("y1").unwrap()), -&y2);
        assert_eq!(a.partial_right(&p, a.require("y2").unwrap()), y1);
        assert!(a.partial(&AlgElement::constant(q(7)), 0).is_zero());
    }

    #[test]
    fn format_reads_naturally() {
        let a = alg();
        let e = a
            .normalize(&[
                (q_frac(-1, 2), vec![("x", 2), ("y1", 1)]),
                (q(3), vec![]),
                (q(1), vec![("w", 1)]),
            ])
            .unwrap();
        assert_eq!(a.format(&e), "3 - 1/2*x^2*y1 + w");
        assert_eq!(a.format(&AlgElement::zero()), "0");
    }
}
