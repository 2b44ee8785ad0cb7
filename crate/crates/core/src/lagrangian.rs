//! Source side of a Lagrangian (symplectic target) or Legendrian (contact
//! target) model: the cdga `B`, the map `β: A → B` and the forms `Λ`, `ψ`
//! and `h⁰ = d_dR Λ`, all driven by a superpotential `G ∈ B^k`.
//!
//! The contact case adds the image of `z`; see [`crate::legendrian`].

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::cdga::{describe_degree, CdgaMorphism, CdgaPresentation};
use crate::darboux::{
    build_contact_darboux, build_symplectic_darboux, minus_one_pow, top_index, DarbouxData, DarbouxSpec,
};
use crate::derham::{DeRham, DeRhamForm};
use crate::error::{Error, Result};
use crate::graded_algebra::{q, AlgElement, GradedAlgebra, GradedGenerator, Q};
use crate::report::VerificationReport;

/// `s = -⌊k/2⌋`, the top index of the `u`/`v` families.
pub fn source_top(k: i32) -> usize {
    (-k.div_euclid(2)) as usize
}

pub fn xt_name(i: usize, j: usize) -> String {
    if i == 0 {
        format!("xt{j}")
    } else {
        format!("xt{j}_m{i}")
    }
}

pub fn u_name(i: usize, j: usize) -> String {
    if i == 0 {
        format!("u{j}")
    } else {
        format!("u{j}_m{i}")
    }
}

/// Name of the generator of degree `k-1+i` paired with `u_j^{-i}`.
pub fn v_name(i: usize, j: usize) -> String {
    format!("v{j}_km{i}")
}

/// Generator layout of the source `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceShape {
    pub k: i32,
    /// Target counts, one `x̃` per target `x` (degree-0 ones included).
    pub m: Vec<usize>,
    /// `n[i]` = number of `u_j^{-i}` and of `v_j^{k-1+i}`, `0 ≤ i ≤ s`.
    pub n: Vec<usize>,
}

impl SourceShape {
    pub fn new(k: i32, m: Vec<usize>, n: Vec<usize>) -> Result<Self> {
        if k >= 0 || k % 2 == 0 {
            return Err(Error::UnsupportedShift(k));
        }
        if m.len() != top_index(k) + 1 {
            return Err(Error::ShapeMismatch(format!(
                "shift {k} needs {} target counts, got {}",
                top_index(k) + 1,
                m.len()
            )));
        }
        if n.len() != source_top(k) + 1 {
            return Err(Error::ShapeMismatch(format!(
                "shift {k} needs {} source counts, got {}",
                source_top(k) + 1,
                n.len()
            )));
        }
        Ok(SourceShape { k, m, n })
    }

    pub fn generators(&self) -> Vec<GradedGenerator> {
        let mut gens = Vec::new();
        for (i, &mi) in self.m.iter().enumerate() {
            for j in 1..=mi {
                gens.push(GradedGenerator::new(xt_name(i, j), -(i as i32)));
            }
        }
        for (i, &ni) in self.n.iter().enumerate() {
            for j in 1..=ni {
                gens.push(GradedGenerator::new(u_name(i, j), -(i as i32)));
            }
        }
        for (i, &ni) in self.n.iter().enumerate() {
            for j in 1..=ni {
                gens.push(GradedGenerator::new(v_name(i, j), self.k - 1 + i as i32));
            }
        }
        gens
    }

    pub fn algebra(&self) -> GradedAlgebra {
        GradedAlgebra::new(self.generators()).expect("generated names are distinct")
    }
}

/// Positions of the source coordinates.
#[derive(Clone, Debug)]
pub struct SourceCoordinates {
    /// `(i, j, position of x̃_j^{-i})`.
    pub xt: Vec<(usize, usize, usize)>,
    /// `(i, j, position of u_j^{-i}, position of v_j^{k-1+i})`.
    pub uv: Vec<(usize, usize, usize, usize)>,
}

impl SourceCoordinates {
    pub fn locate(shape: &SourceShape, alg: &GradedAlgebra) -> Result<Self> {
        let mut xt = Vec::new();
        for (i, &mi) in shape.m.iter().enumerate() {
            for j in 1..=mi {
                xt.push((i, j, alg.require(&xt_name(i, j))?));
            }
        }
        let mut uv = Vec::new();
        for (i, &ni) in shape.n.iter().enumerate() {
            for j in 1..=ni {
                uv.push((i, j, alg.require(&u_name(i, j))?, alg.require(&v_name(i, j))?));
            }
        }
        Ok(SourceCoordinates { xt, uv })
    }
}

/// Target Darboux data plus source counts and superpotential. The target is
/// symplectic for Lagrangian models and contact for Legendrian ones.
#[derive(Clone, Debug)]
pub struct LagrangianDarbouxSpec {
    pub target: DarbouxSpec,
    pub source: SourceShape,
    /// Superpotential over `source.algebra()`.
    pub superpotential: AlgElement,
}

pub type LegendrianDarbouxSpec = LagrangianDarbouxSpec;

impl LagrangianDarbouxSpec {
    pub fn new(target: DarbouxSpec, n: Vec<usize>, superpotential: AlgElement) -> Result<Self> {
        let source = SourceShape::new(target.shape.k, target.shape.m.clone(), n)?;
        let alg = source.algebra();
        if !alg.is_homogeneous_of(&superpotential, source.k) {
            return Err(Error::DegreeMismatch {
                context: "superpotential".into(),
                expected: source.k,
                found: describe_degree(&alg, &superpotential),
            });
        }
        Ok(LagrangianDarbouxSpec {
            target,
            source,
            superpotential,
        })
    }

    pub fn k(&self) -> i32 {
        self.source.k
    }
}

/// `β` on `x` and `y`: `x_j^{-i} ↦ x̃_j^{-i}` and
/// `y_j^{k+i} ↦ (-1)^{1-i} ∂G/∂x̃_j^{-i}`; `z` (if present) maps to 0 here.
fn beta_on_darboux_coordinates(spec: &LagrangianDarbouxSpec, target: &GradedAlgebra) -> Result<Vec<AlgElement>> {
    let src = spec.source.algebra();
    let shape = &spec.target.shape;
    let coords = crate::darboux::Coordinates::locate(shape, target)?;
    let mut images = vec![AlgElement::zero(); target.len()];
    for &(i, j, x, y) in &coords.pairs {
        let xt = src.require(&xt_name(i, j))?;
        images[x] = src.var(xt);
        images[y] = src
            .partial(&spec.superpotential, xt)
            .scale(&minus_one_pow(1 - i as i32));
    }
    Ok(images)
}

/// `Σ ∂G/∂u_j^{-i} · ∂G/∂v_j^{k-1+i} + β(H)`.
pub fn relative_master_equation_residual(spec: &LagrangianDarbouxSpec) -> Result<AlgElement> {
    let src = spec.source.algebra();
    let coords = SourceCoordinates::locate(&spec.source, &src)?;
    let g = &spec.superpotential;
    let mut out = AlgElement::zero();
    for &(_, _, u, v) in &coords.uv {
        out = &out + &src.mul(&src.partial(g, u), &src.partial(g, v));
    }
    let target = spec.target.shape.algebra();
    let images = beta_on_darboux_coordinates(spec, &target)?;
    Ok(&out + &target.substitute(&src, &spec.target.h, &images))
}

pub fn check_relative_master_equation(spec: &LagrangianDarbouxSpec) -> VerificationReport {
    let mut report = VerificationReport::new();
    match relative_master_equation_residual(spec) {
        Ok(r) => report.check("relative-master-equation", "sum dG/du * dG/dv + beta(H) = 0", || {
            (!r.is_zero()).then(|| spec.source.algebra().format(&r))
        }),
        Err(e) => report.fail_with_error(
            "relative-master-equation",
            "sum dG/du * dG/dv + beta(H) = 0",
            crate::report::error_class(&e),
            e.to_string(),
        ),
    }
    report
}

/// Built relative model. `β(z)` is nonzero only for contact targets.
#[derive(Clone, Debug)]
pub struct LagrangianDarbouxData {
    pub spec: LagrangianDarbouxSpec,
    pub target: DarbouxData,
    pub source: Arc<CdgaPresentation>,
    pub source_dr: DeRham,
    pub coords: SourceCoordinates,
    pub beta: CdgaMorphism,
    /// `Λ = Σ u_j^{-i} d_dR v_j^{k-1+i}`.
    pub lambda: DeRhamForm,
    /// `h⁰ = d_dR Λ`.
    pub h0: DeRhamForm,
    pub psi: DeRhamForm,
    /// `Σ (-1)^{1-k-i}(1-k-i)(-1)^{(1-i)k} v_j^{k-1+i} u_j^{-i}`.
    pub corrector: AlgElement,
}

impl LagrangianDarbouxData {
    pub fn k(&self) -> i32 {
        self.spec.k()
    }

    pub fn source_algebra(&self) -> &GradedAlgebra {
        self.source.algebra()
    }

    pub fn superpotential(&self) -> &AlgElement {
        &self.spec.superpotential
    }

    /// `β_*` of a target form.
    pub fn push(&self, f: &DeRhamForm) -> DeRhamForm {
        self.target.dr.pullback(&self.beta, &self.source_dr, f)
    }

    /// `β` of a target function.
    pub fn beta_of(&self, f: &AlgElement) -> AlgElement {
        self.beta.apply(f)
    }
}

/// Differential of `B`: `d x̃ = β(d x)`, `d u_j^{-i} = (-1)^{(1-i)k} ∂G/∂v_j^{k-1+i}`,
/// `d v_j^{k-1+i} = ∂G/∂u_j^{-i}`, zero on degree 0.
fn source_presentation(
    spec: &LagrangianDarbouxSpec,
    target: &DarbouxData,
    beta_xy: &[AlgElement],
) -> Result<CdgaPresentation> {
    let src = spec.source.algebra();
    let coords = SourceCoordinates::locate(&spec.source, &src)?;
    let g = &spec.superpotential;
    let k = spec.k();
    let mut images = BTreeMap::new();
    for &(i, _, pos) in &coords.xt {
        if i == 0 {
            continue;
        }
        let name = &src.generator(pos).name;
        let x = target.algebra().require(&name.replacen("xt", "x", 1))?;
        let dx = target.presentation.d_image(x);
        images.insert(pos, target.algebra().substitute(&src, dx, beta_xy));
    }
    for &(i, _, u, v) in &coords.uv {
        if i > 0 {
            images.insert(u, src.partial(g, v).scale(&minus_one_pow((1 - i as i32) * k)));
        }
        images.insert(v, src.partial(g, u));
    }
    CdgaPresentation::new(src, images)
}

pub(crate) fn corrector(spec: &LagrangianDarbouxSpec, src: &GradedAlgebra, coords: &SourceCoordinates) -> AlgElement {
    let k = spec.k();
    let mut out = AlgElement::zero();
    for &(i, _, u, v) in &coords.uv {
        let i = i as i32;
        let c = minus_one_pow(1 - k - i) * q((1 - k - i) as i64) * minus_one_pow((1 - i) * k);
        out.add_scaled(&src.mul(&src.var(v), &src.var(u)), &c);
    }
    out
}

/// Shared builder; `contact` selects the target flavour.
pub(crate) fn build_relative(spec: &LagrangianDarbouxSpec, contact: bool) -> Result<LagrangianDarbouxData> {
    if spec.target.shape.contact != contact {
        return Err(Error::ShapeMismatch(if contact {
            "Legendrian models need a contact target".into()
        } else {
            "Lagrangian models need a symplectic target".into()
        }));
    }
    let report = check_relative_master_equation(spec);
    if let Some(f) = report.failures().next() {
        return Err(Error::RelativeMasterEquationViolated(
            f.witness.clone().unwrap_or_default(),
        ));
    }
    let target = if contact {
        build_contact_darboux(&spec.target)?
    } else {
        build_symplectic_darboux(&spec.target)?
    };
    let mut images = beta_on_darboux_coordinates(spec, target.algebra())?;
    let source = Arc::new(source_presentation(spec, &target, &images)?);
    let src = source.algebra();
    let coords = SourceCoordinates::locate(&spec.source, src)?;
    let corrector = corrector(spec, src, &coords);
    let k = spec.k();

    if let Some(z) = target.z() {
        // (k-1)β(z) = G + Σ i x̃ ∂G/∂x̃ + d_B[corrector]
        let g = &spec.superpotential;
        let mut rhs = g + &source.apply_d(&corrector);
        for &(i, _, pos) in &coords.xt {
            let term = src.mul(&src.var(pos), &src.partial(g, pos));
            rhs.add_scaled(&term, &q(i as i64));
        }
        images[z] = rhs.scale(&(Q::from_integer((k - 1).into()).recip()));
    }
    let beta = CdgaMorphism::new(
        target.presentation.clone(),
        source.clone(),
        images.into_iter().enumerate().collect(),
    )?;
    let source_dr = DeRham::new(source.clone())?;

    let mut lambda = DeRhamForm::zero();
    let mut psi = DeRhamForm::zero();
    for &(i, _, u, v) in &coords.uv {
        let (uf, vf) = (source_dr.function(&src.var(u)), source_dr.function(&src.var(v)));
        lambda = &lambda + &source_dr.wedge(&uf, &source_dr.dg(v));
        let a = source_dr.wedge(&uf, &source_dr.dg(v)).scale(&q(-(i as i64)));
        let c = minus_one_pow((1 - i as i32) * k) * q((k - 1 + i as i32) as i64);
        let b = source_dr.wedge(&vf, &source_dr.dg(u)).scale(&c);
        psi = &(&psi + &a) + &b;
    }
    let h0 = source_dr.de_rham_d(&lambda);
    Ok(LagrangianDarbouxData {
        spec: spec.clone(),
        target,
        source,
        source_dr,
        coords,
        beta,
        lambda,
        h0,
        psi,
        corrector,
    })
}

pub fn build_lagrangian_model(spec: &LagrangianDarbouxSpec) -> Result<LagrangianDarbouxData> {
    build_relative(spec, false)
}

/// Identities common to both flavours: `d_B² = 0`, `β` a chain map,
/// `d_B G = -β(H + H₊)`, `d_dR G + d_B ψ = -β_*(φ + φ₊)`,
/// `d_dR ψ = (k-1) h⁰`, `d_B h⁰ = β_*(two-form)`, `d_dR h⁰ = 0`.
pub(crate) fn relative_identities(data: &LagrangianDarbouxData, group: &str) -> VerificationReport {
    let mut report = VerificationReport::new();
    report.extend(data.source.check_d_squared());
    report.extend(data.beta.check_chain_map());
    let dr = &data.source_dr;
    let src = data.source_algebra();
    let k1 = q(data.k() as i64 - 1);
    let g = dr.function(data.superpotential());
    report.check(group, "d_B G = -beta(H + H+)", || {
        let hh = data.target.h() + data.target.h_plus();
        let r = &data.source.apply_d(data.superpotential()) + &data.beta_of(&hh);
        (!r.is_zero()).then(|| src.format(&r))
    });
    report.check(group, "d_dR G + d_B psi = -beta_*(phi + phi+)", || {
        let lhs = &dr.de_rham_d(&g) + &dr.internal_d(&data.psi);
        let rhs = data.push(&(&data.target.phi + &data.target.phi_plus));
        dr.witness(&(&lhs + &rhs))
    });
    report.check(group, "d_dR psi = (k-1) h0", || {
        dr.witness(&(&dr.de_rham_d(&data.psi) - &data.h0.scale(&k1)))
    });
    report.check(group, "d_B h0 = beta_*(omega)", || {
        dr.witness(&(&dr.internal_d(&data.h0) - &data.push(&data.target.two_form())))
    });
    report.check(group, "d_dR h0 = 0", || dr.witness(&dr.de_rham_d(&data.h0)));
    report
}

pub fn verify_lagrangian_identities(data: &LagrangianDarbouxData) -> VerificationReport {
    relative_identities(data, "lagrangian")
}
