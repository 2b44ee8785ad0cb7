//! The de Rham algebra of a presentation: polynomial forms with an internal
//! and a de Rham differential.
//!
//! Forms live in one graded-commutative algebra whose generators are the
//! generators `g` of the presentation followed by one-form symbols `dg`. The
//! symbol `dg` has internal degree `|g|` and weight 1, and commutes with the
//! parity of its total degree `|g| - 1`, so `dg∧dh = (-1)^{(|g|+1)(|h|+1)} dh∧dg`.
//! Coefficient functions always come first in canonical order.

use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed};

use crate::cdga::{CdgaMorphism, CdgaPresentation};
use crate::error::{Error, Result};
use crate::graded_algebra::{AlgElement, GradedAlgebra, GradedGenerator, Monomial, Q};
use crate::report::VerificationReport;

/// Element of the de Rham algebra. Weight and degree are read off through the
/// owning [`DeRham`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DeRhamForm(AlgElement);

impl DeRhamForm {
    pub fn zero() -> Self {
        DeRhamForm(AlgElement::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn scale(&self, c: &Q) -> Self {
        DeRhamForm(self.0.scale(c))
    }

    pub fn as_element(&self) -> &AlgElement {
        &self.0
    }
}

impl Add for &DeRhamForm {
    type Output = DeRhamForm;
    fn add(self, rhs: &DeRhamForm) -> DeRhamForm {
        DeRhamForm(&self.0 + &rhs.0)
    }
}

impl Sub for &DeRhamForm {
    type Output = DeRhamForm;
    fn sub(self, rhs: &DeRhamForm) -> DeRhamForm {
        DeRhamForm(&self.0 - &rhs.0)
    }
}

impl Neg for &DeRhamForm {
    type Output = DeRhamForm;
    fn neg(self) -> DeRhamForm {
        DeRhamForm(-&self.0)
    }
}

impl Add for DeRhamForm {
    type Output = DeRhamForm;
    fn add(self, rhs: DeRhamForm) -> DeRhamForm {
        &self + &rhs
    }
}

impl Sub for DeRhamForm {
    type Output = DeRhamForm;
    fn sub(self, rhs: DeRhamForm) -> DeRhamForm {
        &self - &rhs
    }
}

impl Neg for DeRhamForm {
    type Output = DeRhamForm;
    fn neg(self) -> DeRhamForm {
        -&self
    }
}

/// Vector field `Σ f_g ∂/∂g` with coefficients in the base algebra.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VectorField {
    terms: BTreeMap<usize, AlgElement>,
}

impl VectorField {
    pub fn zero() -> Self {
        VectorField::default()
    }

    /// The coordinate field `∂/∂g`.
    pub fn basis(pos: usize) -> Self {
        let mut v = VectorField::zero();
        v.add_term(pos, AlgElement::one());
        v
    }

    pub fn add_term(&mut self, pos: usize, coeff: AlgElement) {
        let entry = self.terms.entry(pos).or_default();
        *entry = &*entry + &coeff;
        if entry.is_zero() {
            self.terms.remove(&pos);
        }
    }

    pub fn with_term(mut self, pos: usize, coeff: AlgElement) -> Self {
        self.add_term(pos, coeff);
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &AlgElement)> {
        self.terms.iter().map(|(p, c)| (*p, c))
    }

    pub fn coefficient(&self, pos: usize) -> AlgElement {
        self.terms.get(&pos).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree `|f_g| - |g|` if all terms agree.
    pub fn degree(&self, alg: &GradedAlgebra) -> Option<i32> {
        let mut it = self
            .terms
            .iter()
            .map(|(&p, c)| alg.degree(c).map(|d| d - alg.generator(p).degree));
        let first = it.next()??;
        it.all(|d| d == Some(first)).then_some(first)
    }

    /// Action on functions through left partial derivatives.
    pub fn apply(&self, alg: &GradedAlgebra, f: &AlgElement) -> AlgElement {
        let mut out = AlgElement::zero();
        for (&p, c) in &self.terms {
            out.add_scaled(&alg.mul(c, &alg.partial(f, p)), &Q::one());
        }
        out
    }

    pub fn format(&self, alg: &GradedAlgebra) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (&p, c) in &self.terms {
            for (m, coeff) in c.terms() {
                let neg = coeff.is_negative();
                if s.is_empty() {
                    if neg {
                        s.push('-');
                    }
                } else {
                    s.push_str(if neg { " - " } else { " + " });
                }
                let mut factor = alg.format(&AlgElement::monomial(m.clone(), coeff.abs()));
                if factor == "1" {
                    factor.clear();
                } else {
                    factor.push('*');
                }
                s.push_str(&format!("{factor}d/d{}", alg.generator(p).name));
            }
        }
        s
    }
}

/// De Rham algebra of a presentation.
#[derive(Clone, Debug)]
pub struct DeRham {
    base: Arc<CdgaPresentation>,
    ext: GradedAlgebra,
    /// Internal differential on all extended generators.
    internal: Vec<AlgElement>,
    /// De Rham differential on all extended generators.
    exterior: Vec<AlgElement>,
}

impl DeRham {
    pub fn new(base: Arc<CdgaPresentation>) -> Result<Self> {
        let alg = base.algebra();
        let n = alg.len();
        let mut gens: Vec<GradedGenerator> = alg.generators().to_vec();
        for g in alg.generators() {
            gens.push(GradedGenerator::new(format!("d{}", g.name), g.degree - 1));
        }
        let order: Vec<usize> = (0..2 * n).collect();
        let ext = GradedAlgebra::with_order(gens, &order)?;
        let mut exterior = vec![AlgElement::zero(); 2 * n];
        for (pos, slot) in exterior.iter_mut().enumerate().take(n) {
            *slot = ext.var(n + pos);
        }
        let mut dr = DeRham {
            base,
            ext,
            internal: Vec::new(),
            exterior,
        };
        let mut internal = vec![AlgElement::zero(); 2 * n];
        for pos in 0..n {
            let dg = dr.base.d_image(pos).clone();
            internal[n + pos] = -&dr.ext.apply_derivation(&dr.exterior, &dg);
            internal[pos] = dg;
        }
        dr.internal = internal;
        Ok(dr)
    }

    pub fn presentation(&self) -> &Arc<CdgaPresentation> {
        &self.base
    }

    pub fn base_algebra(&self) -> &GradedAlgebra {
        self.base.algebra()
    }

    /// The algebra of forms (functions followed by one-form symbols).
    pub fn form_algebra(&self) -> &GradedAlgebra {
        &self.ext
    }

    fn n(&self) -> usize {
        self.base.algebra().len()
    }

    pub fn function(&self, f: &AlgElement) -> DeRhamForm {
        DeRhamForm(f.clone())
    }

    pub fn constant(&self, c: Q) -> DeRhamForm {
        DeRhamForm(AlgElement::constant(c))
    }

    /// The one-form symbol `d_dR g`.
    pub fn dg(&self, pos: usize) -> DeRhamForm {
        DeRhamForm(self.ext.var(self.n() + pos))
    }

    pub fn dg_named(&self, name: &str) -> Result<DeRhamForm> {
        Ok(self.dg(self.base_algebra().require(name)?))
    }

    pub fn var_named(&self, name: &str) -> Result<DeRhamForm> {
        Ok(DeRhamForm(self.base_algebra().var_named(name)?))
    }

    pub fn monomial_weight(&self, m: &Monomial) -> u32 {
        let n = self.n() as u32;
        m.factors().iter().filter(|f| f.0 >= n).map(|f| f.1).sum()
    }

    /// Internal degree of a monomial: total degree plus weight.
    pub fn monomial_degree(&self, m: &Monomial) -> i32 {
        self.ext.monomial_degree(m) + self.monomial_weight(m) as i32
    }

    /// Common weight of all terms; `None` for zero or mixed weights.
    pub fn weight(&self, f: &DeRhamForm) -> Option<u32> {
        let mut it = f.0.terms().map(|(m, _)| self.monomial_weight(m));
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    /// Common internal degree of all terms.
    pub fn degree(&self, f: &DeRhamForm) -> Option<i32> {
        let mut it = f.0.terms().map(|(m, _)| self.monomial_degree(m));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn is_bihomogeneous(&self, f: &DeRhamForm, weight: u32, degree: i32) -> bool {
        f.0.terms()
            .all(|(m, _)| self.monomial_weight(m) == weight && self.monomial_degree(m) == degree)
    }

    /// Weight-0 part viewed as a function.
    pub fn function_part(&self, f: &DeRhamForm) -> AlgElement {
        f.0.filter(|m| self.monomial_weight(m) == 0)
    }

    pub fn wedge(&self, a: &DeRhamForm, b: &DeRhamForm) -> DeRhamForm {
        DeRhamForm(self.ext.mul(&a.0, &b.0))
    }

    pub fn wedge_all<'a>(&self, factors: impl IntoIterator<Item = &'a DeRhamForm>) -> DeRhamForm {
        factors
            .into_iter()
            .fold(self.constant(Q::one()), |acc, f| self.wedge(&acc, f))
    }

    pub fn de_rham_d(&self, f: &DeRhamForm) -> DeRhamForm {
        DeRhamForm(self.ext.apply_derivation(&self.exterior, &f.0))
    }

    pub fn internal_d(&self, f: &DeRhamForm) -> DeRhamForm {
        DeRhamForm(self.ext.apply_derivation(&self.internal, &f.0))
    }

    /// Contraction `ι_V`, with the sign of `∂/∂(dg)` accumulated from the
    /// right so that `ι_V(f·dg) = f·V^g` for every coefficient `f`.
    pub fn contract(&self, v: &VectorField, f: &DeRhamForm) -> Result<DeRhamForm> {
        if !f.is_zero() && f.0.terms().all(|(m, _)| self.monomial_weight(m) == 0) {
            return Err(Error::WeightZero);
        }
        let n = self.n();
        let mut out = AlgElement::zero();
        for (p, c) in v.terms() {
            let part = self.ext.partial_right(&f.0, n + p);
            if !part.is_zero() {
                out.add_scaled(&self.ext.mul(c, &part), &Q::one());
            }
        }
        Ok(DeRhamForm(out))
    }

    /// Coefficient of `dg` in a one-form written as `Σ f_g dg`.
    pub fn one_form_coefficient(&self, f: &DeRhamForm, pos: usize) -> AlgElement {
        let part = self.ext.partial_right(&f.0, self.n() + pos);
        self.function_part(&DeRhamForm(part))
    }

    /// Pushforward of forms along an algebra map `β: A → B`
    /// (`self` is DR(A), `target` is DR(B)).
    pub fn pullback(&self, beta: &CdgaMorphism, target: &DeRham, f: &DeRhamForm) -> DeRhamForm {
        let n = self.n();
        let mut images = Vec::with_capacity(2 * n);
        for pos in 0..n {
            images.push(beta.image(pos).clone());
        }
        for pos in 0..n {
            let img = target.de_rham_d(&DeRhamForm(beta.image(pos).clone()));
            images.push(img.0);
        }
        DeRhamForm(self.ext.substitute(&target.ext, &f.0, &images))
    }

    pub fn format(&self, f: &DeRhamForm) -> String {
        self.ext.format(&f.0)
    }

    /// Wrap a raw element of the form algebra.
    pub fn form(&self, e: AlgElement) -> DeRhamForm {
        DeRhamForm(e)
    }

    /// `None` when zero, otherwise the rendered form (report witness helper).
    pub fn witness(&self, f: &DeRhamForm) -> Option<String> {
        (!f.is_zero()).then(|| self.format(f))
    }
}

/// How the higher relations of a path between closed sequences are signed:
/// `ω^{i+1} ∓ σ^{i+1} = d_dR α^i + d α^{i+1}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignConvention {
    #[default]
    Minus,
    Plus,
}

pub const DEFAULT_TRUNCATION: usize = 2;

/// Sequence `(ω^0, ω^1, …)` with `ω^i` of weight `p+i` and degree `k-i`,
/// zero beyond the stored entries, inspected up to index `truncation`.
#[derive(Clone, Debug)]
pub struct FormSequence {
    pub weight: u32,
    pub degree: i32,
    pub entries: Vec<DeRhamForm>,
    pub truncation: usize,
}

impl FormSequence {
    pub fn new(dr: &DeRham, weight: u32, degree: i32, entries: Vec<DeRhamForm>, truncation: usize) -> Result<Self> {
        for (i, e) in entries.iter().enumerate() {
            let (w, d) = (weight + i as u32, degree - i as i32);
            if !dr.is_bihomogeneous(e, w, d) {
                return Err(Error::WeightMismatch(format!(
                    "entry {i} should have weight {w} and degree {d}: {}",
                    dr.format(e)
                )));
            }
        }
        Ok(FormSequence {
            weight,
            degree,
            entries,
            truncation,
        })
    }

    pub fn entry(&self, i: usize) -> DeRhamForm {
        self.entries.get(i).cloned().unwrap_or_default()
    }
}

/// `dω^0 = 0` and `d_dR ω^i + d ω^{i+1} = 0` for `i < truncation`.
pub fn check_closed_sequence(dr: &DeRham, s: &FormSequence) -> VerificationReport {
    let mut report = VerificationReport::new();
    report.check("closed-sequence", "d(w0) = 0", || {
        dr.witness(&dr.internal_d(&s.entry(0)))
    });
    for i in 0..s.truncation {
        report.check("closed-sequence", format!("d_dR(w{i}) + d(w{}) = 0", i + 1), || {
            let r = &dr.de_rham_d(&s.entry(i)) + &dr.internal_d(&s.entry(i + 1));
            dr.witness(&r)
        });
    }
    report
}

/// Path `α` from `σ` to `ω`: `ω^0 - σ^0 = dα^0` and the higher relations.
pub fn check_path_equivalence(
    dr: &DeRham,
    omega: &FormSequence,
    sigma: &FormSequence,
    alpha: &[DeRhamForm],
    convention: SignConvention,
) -> VerificationReport {
    let mut report = VerificationReport::new();
    let a = |i: usize| alpha.get(i).cloned().unwrap_or_default();
    let truncation = omega.truncation.max(sigma.truncation);
    report.check("path", "w0 - s0 = d(a0)", || {
        let r = &(&omega.entry(0) - &sigma.entry(0)) - &dr.internal_d(&a(0));
        dr.witness(&r)
    });
    for i in 0..truncation {
        let name = match convention {
            SignConvention::Minus => format!("w{0} - s{0} = d_dR(a{1}) + d(a{0})", i + 1, i),
            SignConvention::Plus => format!("w{0} + s{0} = d_dR(a{1}) + d(a{0})", i + 1, i),
        };
        report.check("path", name, || {
            let lhs = match convention {
                SignConvention::Minus => &omega.entry(i + 1) - &sigma.entry(i + 1),
                SignConvention::Plus => &omega.entry(i + 1) + &sigma.entry(i + 1),
            };
            let rhs = &dr.de_rham_d(&a(i)) + &dr.internal_d(&a(i + 1));
            dr.witness(&(&lhs - &rhs))
        });
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_algebra::q;

    /// `ℚ[x][y, z]` with `|y| = |z| = -1`, `dz = x²`, `dy = 2x`.
    fn k_minus_one() -> DeRham {
        let alg = GradedAlgebra::new(vec![
            GradedGenerator::new("x", 0),
            GradedGenerator::new("y", -1),
            GradedGenerator::new("z", -1),
        ])
        .unwrap();
        let x = alg.var_named("x").unwrap();
        let mut images = BTreeMap::new();
        images.insert(alg.require("z").unwrap(), alg.mul(&x, &x));
        images.insert(alg.require("y").unwrap(), x.scale(&q(2)));
        DeRham::new(Arc::new(CdgaPresentation::new(alg, images).unwrap())).unwrap()
    }

    fn alpha0(dr: &DeRham) -> DeRhamForm {
        let y = dr.var_named("y").unwrap();
        &dr.dg_named("z").unwrap() + &dr.wedge(&y, &dr.dg_named("x").unwrap())
    }

    #[test]
    fn de_rham_basics() {
        let dr = k_minus_one();
        let x = dr.var_named("x").unwrap();
        let dx = dr.dg_named("x").unwrap();
        let dy = dr.dg_named("y").unwrap();
        assert_eq!(dr.de_rham_d(&dr.wedge(&x, &x)), dr.wedge(&x, &dx).scale(&q(2)));
        assert!(dr.de_rham_d(&dx).is_zero());
        assert_eq!(dr.de_rham_d(&alpha0(&dr)), dr.wedge(&dy, &dx));
        // dx has odd parity, dy even: they commute
        assert_eq!(dr.wedge(&dx, &dy), dr.wedge(&dy, &dx));
        assert!(dr.wedge(&dx, &dx).is_zero());
        assert!(!dr.wedge(&dy, &dy).is_zero());
        assert_eq!(dr.weight(&dr.de_rham_d(&alpha0(&dr))), Some(2));
        assert_eq!(dr.degree(&alpha0(&dr)), Some(-1));
    }

    #[test]
    fn internal_differential_on_one_forms() {
        let dr = k_minus_one();
        let y = dr.var_named("y").unwrap();
        let x = dr.var_named("x").unwrap();
        let dx = dr.dg_named("x").unwrap();
        let got = dr.internal_d(&dr.wedge(&y, &dx));
        assert_eq!(got, dr.wedge(&x, &dx).scale(&q(2)));
        assert!(dr.internal_d(&alpha0(&dr)).is_zero());
    }

    #[test]
    fn contraction_conventions() {
        let dr = k_minus_one();
        let a = dr.base_algebra();
        let (x, y, z) = (
            a.require("x").unwrap(),
            a.require("y").unwrap(),
            a.require("z").unwrap(),
        );
        let al = alpha0(&dr);
        assert_eq!(dr.contract(&VectorField::basis(z), &al).unwrap(), dr.constant(q(1)));
        assert!(dr.contract(&VectorField::basis(y), &al).unwrap().is_zero());
        let v = VectorField::basis(z)
            .with_term(z, a.var(y))
            .with_term(z, AlgElement::constant(q(-1)))
            .with_term(x, AlgElement::constant(q(-1)));
        assert!(dr.contract(&v, &al).unwrap().is_zero());
        assert_eq!(
            dr.contract(&VectorField::basis(x), &dr.var_named("x").unwrap()),
            Err(Error::WeightZero)
        );
    }

    #[test]
    fn closed_sequences() {
        let dr = k_minus_one();
        let w0 = dr.de_rham_d(&alpha0(&dr));
        let s = FormSequence::new(&dr, 2, -1, vec![w0.clone()], DEFAULT_TRUNCATION).unwrap();
        assert!(check_closed_sequence(&dr, &s).passed());
        let zero = FormSequence::new(&dr, 2, -1, vec![], DEFAULT_TRUNCATION).unwrap();
        assert!(check_closed_sequence(&dr, &zero).passed());
        // a repeated two-form in slot 1 has the wrong weight
        assert!(FormSequence::new(&dr, 2, -1, vec![w0.clone(), w0.clone()], 2).is_err());
        let bad = FormSequence::new(&dr, 0, 0, vec![DeRhamForm::zero(), dr.dg_named("y").unwrap()], 2).unwrap();
        let r = check_closed_sequence(&dr, &bad);
        let failed: Vec<_> = r.failures().map(|c| c.name.as_str()).collect();
        assert_eq!(failed, ["d_dR(w0) + d(w1) = 0"]);
    }

    #[test]
    fn path_equivalence() {
        let dr = k_minus_one();
        let w0 = dr.de_rham_d(&alpha0(&dr));
        let s = FormSequence::new(&dr, 2, -1, vec![w0.clone()], 2).unwrap();
        assert!(check_path_equivalence(&dr, &s, &s, &[], SignConvention::Minus).passed());
        let al = alpha0(&dr);
        let sigma = FormSequence::new(&dr, 1, -1, vec![al.clone()], 2).unwrap();
        let path = dr.wedge(&dr.var_named("z").unwrap(), &dr.dg_named("y").unwrap());
        let omega = FormSequence::new(&dr, 1, -1, vec![&al + &dr.internal_d(&path), dr.de_rham_d(&path)], 2).unwrap();
        assert!(
            check_path_equivalence(&dr, &omega, &sigma, std::slice::from_ref(&path), SignConvention::Minus).passed()
        );
        assert!(
            check_path_equivalence(&dr, &omega, &sigma, std::slice::from_ref(&path), SignConvention::Plus).passed()
        );
        let r = check_path_equivalence(&dr, &omega, &sigma, &[path.scale(&q(3))], SignConvention::Minus);
        let failed: Vec<_> = r.failures().map(|c| c.name.as_str()).collect();
        assert_eq!(failed, ["w0 - s0 = d(a0)", "w1 - s1 = d_dR(a0) + d(a1)"]);
    }
}
