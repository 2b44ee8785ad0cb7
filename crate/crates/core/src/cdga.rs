//! Presentations of commutative differential graded algebras and morphisms
//! between them.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graded_algebra::{AlgElement, GradedAlgebra};
use crate::report::VerificationReport;

/// A free graded algebra together with the differential of each generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CdgaPresentation {
    alg: GradedAlgebra,
    /// Differential images indexed by canonical position.
    d: Vec<AlgElement>,
}

impl CdgaPresentation {
    /// Validates that every image has degree `|g| + 1` and that degree-0
    /// generators are closed. Generators missing from `images` get `d = 0`.
    pub fn new(alg: GradedAlgebra, images: BTreeMap<usize, AlgElement>) -> Result<Self> {
        let mut d = vec![AlgElement::zero(); alg.len()];
        for (pos, img) in images {
            let g = alg.generator(pos);
            if g.degree == 0 && !img.is_zero() {
                return Err(Error::DegreeMismatch {
                    context: format!("d({}) on the degree-0 base", g.name),
                    expected: 1,
                    found: alg.format(&img),
                });
            }
            if !alg.is_homogeneous_of(&img, g.degree + 1) {
                return Err(Error::DegreeMismatch {
                    context: format!("d({})", g.name),
                    expected: g.degree + 1,
                    found: describe_degree(&alg, &img),
                });
            }
            d[pos] = img;
        }
        Ok(CdgaPresentation { alg, d })
    }

    /// Presentation with zero differential.
    pub fn trivial(alg: GradedAlgebra) -> Self {
        let d = vec![AlgElement::zero(); alg.len()];
        CdgaPresentation { alg, d }
    }

    pub fn algebra(&self) -> &GradedAlgebra {
        &self.alg
    }

    pub fn d_image(&self, pos: usize) -> &AlgElement {
        &self.d[pos]
    }

    pub fn d_images(&self) -> &[AlgElement] {
        &self.d
    }

    /// Extend the differential to all elements: `d = Σ_g d(g)·∂_g`.
    pub fn apply_d(&self, e: &AlgElement) -> AlgElement {
        self.alg.apply_derivation(&self.d, e)
    }

    /// `d(d(g)) = 0` on every generator.
    pub fn check_d_squared(&self) -> VerificationReport {
        let mut report = VerificationReport::new();
        for (pos, g) in self.alg.generators().iter().enumerate() {
            report.check("d-squared", format!("d^2({})", g.name), || {
                let dd = self.apply_d(&self.d[pos]);
                (!dd.is_zero()).then(|| self.alg.format(&dd))
            });
        }
        report
    }

    /// Degree-0 images of the differential; a point lies on the classical
    /// locus when all of them vanish there.
    pub fn classical_relations(&self) -> Vec<(usize, &AlgElement)> {
        self.alg
            .generators()
            .iter()
            .enumerate()
            .filter(|(_, g)| g.degree == -1)
            .map(|(pos, _)| (pos, &self.d[pos]))
            .collect()
    }
}

pub(crate) fn describe_degree(alg: &GradedAlgebra, e: &AlgElement) -> String {
    match alg.degree(e) {
        Some(d) => d.to_string(),
        None => format!("inhomogeneous element {}", alg.format(e)),
    }
}

/// Algebra map between presentations given on generators.
#[derive(Clone, Debug)]
pub struct CdgaMorphism {
    source: Arc<CdgaPresentation>,
    target: Arc<CdgaPresentation>,
    /// Images indexed by canonical position in the source.
    images: Vec<AlgElement>,
}

impl CdgaMorphism {
    pub fn new(
        source: Arc<CdgaPresentation>,
        target: Arc<CdgaPresentation>,
        images: BTreeMap<usize, AlgElement>,
    ) -> Result<Self> {
        let n = source.algebra().len();
        let mut imgs = vec![AlgElement::zero(); n];
        for (pos, img) in images {
            if pos >= n {
                return Err(Error::PresentationMismatch(format!(
                    "image given for generator {pos} outside the source"
                )));
            }
            let g = source.algebra().generator(pos);
            if !target.algebra().is_homogeneous_of(&img, g.degree) {
                return Err(Error::DegreeMismatch {
                    context: format!("image of {}", g.name),
                    expected: g.degree,
                    found: describe_degree(target.algebra(), &img),
                });
            }
            imgs[pos] = img;
        }
        Ok(CdgaMorphism {
            source,
            target,
            images: imgs,
        })
    }

    pub fn source(&self) -> &Arc<CdgaPresentation> {
        &self.source
    }

    pub fn target(&self) -> &Arc<CdgaPresentation> {
        &self.target
    }

    pub fn image(&self, pos: usize) -> &AlgElement {
        &self.images[pos]
    }

    pub fn images(&self) -> &[AlgElement] {
        &self.images
    }

    pub fn apply(&self, e: &AlgElement) -> AlgElement {
        self.source.algebra().substitute(self.target.algebra(), e, &self.images)
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &CdgaMorphism) -> Result<CdgaMorphism> {
        if self.target.as_ref() != next.source.as_ref() {
            return Err(Error::PresentationMismatch(
                "composition of morphisms with different middle presentations".into(),
            ));
        }
        let images = self.images.iter().map(|img| next.apply(img)).enumerate().collect();
        CdgaMorphism::new(self.source.clone(), next.target.clone(), images)
    }

    /// `d_target(m(g)) = m(d_source(g))` for each source generator.
    pub fn check_chain_map(&self) -> VerificationReport {
        let mut report = VerificationReport::new();
        let src = self.source.algebra();
        for (pos, g) in src.generators().iter().enumerate() {
            report.check("chain-map", format!("chain map on {}", g.name), || {
                let lhs = self.target.apply_d(&self.images[pos]);
                let rhs = self.apply(self.source.d_image(pos));
                let r = &lhs - &rhs;
                (!r.is_zero()).then(|| self.target.algebra().format(&r))
            });
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_algebra::{q, GradedGenerator};

    fn k_minus_one(h_coeff: i64) -> CdgaPresentation {
        let alg = GradedAlgebra::new(vec![
            GradedGenerator::new("x", 0),
            GradedGenerator::new("y", -1),
            GradedGenerator::new("z", -1),
        ])
        .unwrap();
        let x = alg.var_named("x").unwrap();
        let h = alg.mul(&x, &x).scale(&q(h_coeff));
        let dy = alg.partial(&h, 0);
        let mut images = BTreeMap::new();
        images.insert(alg.require("z").unwrap(), h);
        images.insert(alg.require("y").unwrap(), dy);
        CdgaPresentation::new(alg, images).unwrap()
    }

    #[test]
    fn worked_example_differential() {
        let p = k_minus_one(1);
        let a = p.algebra();
        let x = a.var_named("x").unwrap();
        let y = a.var_named("y").unwrap();
        let z = a.var_named("z").unwrap();
        let x2 = a.mul(&x, &x);
        assert_eq!(p.apply_d(&z), x2);
        assert_eq!(p.apply_d(&y), x.scale(&q(2)));
        let expected = &a.mul(&x.scale(&q(2)), &z) - &a.mul(&y, &x2);
        assert_eq!(p.apply_d(&a.mul(&y, &z)), expected);
        assert!(p.apply_d(&x2).is_zero());
        assert!(p.check_d_squared().passed());
    }

    #[test]
    fn wrong_degree_image_rejected() {
        let alg = GradedAlgebra::new(vec![GradedGenerator::new("y", -1), GradedGenerator::new("z", -1)]).unwrap();
        let y = alg.var_named("y").unwrap();
        let mut images = BTreeMap::new();
        images.insert(alg.require("z").unwrap(), y);
        let err = CdgaPresentation::new(alg, images).unwrap_err();
        assert!(matches!(err, Error::DegreeMismatch { expected: 0, .. }));
    }

    #[test]
    fn degree_zero_generators_are_closed() {
        let alg = GradedAlgebra::new(vec![GradedGenerator::new("x", 0)]).unwrap();
        let mut images = BTreeMap::new();
        images.insert(0, AlgElement::constant(q(1)));
        assert!(CdgaPresentation::new(alg, images).is_err());
    }

    #[test]
    fn perturbed_morphism_fails_on_the_perturbed_generator() {
        let p = Arc::new(k_minus_one(1));
        let a = p.algebra();
        let ident: BTreeMap<_, _> = (0..a.len()).map(|i| (i, a.var(i))).collect();
        let m = CdgaMorphism::new(p.clone(), p.clone(), ident.clone()).unwrap();
        assert!(m.check_chain_map().passed());
        let z = a.require("z").unwrap();
        let mut bent = ident;
        bent.insert(z, &a.var(z) + &a.var(a.require("y").unwrap()));
        let m = CdgaMorphism::new(p.clone(), p, bent).unwrap();
        let r = m.check_chain_map();
        assert!(!r.passed());
        let failed: Vec<_> = r.failures().map(|c| c.name.as_str()).collect();
        assert_eq!(failed, ["chain map on z"]);
    }
}
