//! Shifted symplectic and contact Darboux models on the target side.
//!
//! For odd `k < 0` the target has generators `x_j^{-i}` and `y_j^{k+i}` for
//! `0 ≤ i ≤ ℓ = -⌊(k+1)/2⌋`, plus `z` of degree `k` in the contact case. A
//! Hamiltonian `H` of degree `k+1` (at most linear in the `y`) drives the
//! differential.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::cdga::{describe_degree, CdgaPresentation};
use crate::derham::{DeRham, DeRhamForm, VectorField};
use crate::error::{Error, Result};
use crate::graded_algebra::{q, AlgElement, GradedAlgebra, GradedGenerator, Q};
use crate::homcheck::{PointAssignment, QMatrix};
use crate::report::VerificationReport;

/// `ℓ = -⌊(k+1)/2⌋`.
pub fn top_index(k: i32) -> usize {
    (-(k + 1).div_euclid(2)) as usize
}

pub fn sign(odd: bool) -> Q {
    if odd {
        -Q::one()
    } else {
        Q::one()
    }
}

/// Parity of an integer exponent of `-1`.
pub fn minus_one_pow(e: i32) -> Q {
    sign(e.rem_euclid(2) == 1)
}

pub fn x_name(i: usize, j: usize) -> String {
    if i == 0 {
        format!("x{j}")
    } else {
        format!("x{j}_m{i}")
    }
}

pub fn y_name(i: usize, j: usize) -> String {
    format!("y{j}_km{i}")
}

pub const Z_NAME: &str = "z";

/// Generator layout of a Darboux target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DarbouxShape {
    pub k: i32,
    /// `m[i]` = number of `x_j^{-i}` (and of `y_j^{k+i}`).
    pub m: Vec<usize>,
    pub contact: bool,
}

impl DarbouxShape {
    pub fn new(k: i32, m: Vec<usize>, contact: bool) -> Result<Self> {
        if k >= 0 || k % 2 == 0 {
            return Err(Error::UnsupportedShift(k));
        }
        let l = top_index(k);
        if m.len() != l + 1 {
            return Err(Error::ShapeMismatch(format!(
                "shift {k} needs {} entries in m, got {}",
                l + 1,
                m.len()
            )));
        }
        Ok(DarbouxShape { k, m, contact })
    }

    pub fn top(&self) -> usize {
        self.m.len() - 1
    }

    /// `(i, j)` pairs in declaration order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, &mi) in self.m.iter().enumerate() {
            for j in 1..=mi {
                out.push((i, j));
            }
        }
        out
    }

    pub fn generators(&self) -> Vec<GradedGenerator> {
        let mut gens = Vec::new();
        for (i, j) in self.pairs() {
            gens.push(GradedGenerator::new(x_name(i, j), -(i as i32)));
        }
        for (i, j) in self.pairs() {
            gens.push(GradedGenerator::new(y_name(i, j), self.k + i as i32));
        }
        if self.contact {
            gens.push(GradedGenerator::new(Z_NAME, self.k));
        }
        gens
    }

    pub fn algebra(&self) -> GradedAlgebra {
        GradedAlgebra::new(self.generators()).expect("generated names are distinct")
    }
}

/// Positions of the Darboux coordinates inside a concrete algebra.
#[derive(Clone, Debug)]
pub struct Coordinates {
    /// `(i, j, x position, y position)`.
    pub pairs: Vec<(usize, usize, usize, usize)>,
    pub z: Option<usize>,
}

impl Coordinates {
    pub fn locate(shape: &DarbouxShape, alg: &GradedAlgebra) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, j) in shape.pairs() {
            pairs.push((i, j, alg.require(&x_name(i, j))?, alg.require(&y_name(i, j))?));
        }
        let z = if shape.contact {
            Some(alg.require(Z_NAME)?)
        } else {
            None
        };
        Ok(Coordinates { pairs, z })
    }
}

/// Input of the builders: shift, shape and Hamiltonian.
#[derive(Clone, Debug)]
pub struct DarbouxSpec {
    pub shape: DarbouxShape,
    /// Hamiltonian over `shape.algebra()`.
    pub h: AlgElement,
}

pub type ContactDarbouxSpec = DarbouxSpec;
pub type SymplecticDarbouxSpec = DarbouxSpec;

impl DarbouxSpec {
    pub fn new(shape: DarbouxShape, h: AlgElement) -> Result<Self> {
        let alg = shape.algebra();
        if !alg.is_homogeneous_of(&h, shape.k + 1) {
            return Err(Error::DegreeMismatch {
                context: "Hamiltonian".into(),
                expected: shape.k + 1,
                found: describe_degree(&alg, &h),
            });
        }
        if let Some(z) = alg.position(Z_NAME).filter(|_| shape.contact) {
            if !alg.partial(&h, z).is_zero() {
                return Err(Error::ShapeMismatch("the Hamiltonian may not involve z".into()));
            }
        }
        Ok(DarbouxSpec { shape, h })
    }
}

/// `H = H₊ + Σ H_j^{(1-i)}·y_j^{k+i}` with `H₊` and the coefficients free of `y`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub h_plus: AlgElement,
    /// `(i, j, H_j^{(1-i)})` for the nonzero coefficients.
    pub linear: Vec<(usize, usize, AlgElement)>,
}

pub fn decompose(alg: &GradedAlgebra, coords: &Coordinates, h: &AlgElement) -> Result<Decomposition> {
    let mut rest = h.clone();
    let mut linear = Vec::new();
    for &(i, j, _, y) in &coords.pairs {
        let c = alg.partial_right(h, y);
        for &(_, _, _, y2) in &coords.pairs {
            if !alg.partial(&c, y2).is_zero() {
                return Err(Error::ShapeMismatch(format!(
                    "Hamiltonian is not linear in the y variables ({} appears with {})",
                    alg.generator(y).name,
                    alg.generator(y2).name
                )));
            }
        }
        if !c.is_zero() {
            rest = &rest - &alg.mul(&c, &alg.var(y));
            linear.push((i, j, c));
        }
    }
    Ok(Decomposition { h_plus: rest, linear })
}

/// Summands `∂H/∂x_j^{-i} · ∂H/∂y_j^{k+i}` of the master equation, `i ≥ 1`.
pub fn master_equation_residual(alg: &GradedAlgebra, coords: &Coordinates, h: &AlgElement) -> AlgElement {
    master_equation_residual_split(alg, coords, h, h)
}

fn master_equation_residual_split(
    alg: &GradedAlgebra,
    coords: &Coordinates,
    hx: &AlgElement,
    hy: &AlgElement,
) -> AlgElement {
    let mut out = AlgElement::zero();
    for &(i, _, x, y) in &coords.pairs {
        if i == 0 {
            continue;
        }
        out = &out + &alg.mul(&alg.partial(hx, x), &alg.partial(hy, y));
    }
    out
}

pub fn check_master_equation(spec: &DarbouxSpec) -> VerificationReport {
    let alg = spec.shape.algebra();
    let coords = Coordinates::locate(&spec.shape, &alg).expect("shape algebra");
    let mut report = VerificationReport::new();
    report.check("master-equation", "sum dH/dx * dH/dy = 0", || {
        let r = master_equation_residual(&alg, &coords, &spec.h);
        (!r.is_zero()).then(|| alg.format(&r))
    });
    match decompose(&alg, &coords, &spec.h) {
        Err(e) => report.fail_with_error(
            "master-equation",
            "H linear in y",
            crate::report::error_class(&e),
            e.to_string(),
        ),
        Ok(dec) => {
            // the y-free and y-linear components after splitting off H₊
            let lin = &spec.h - &dec.h_plus;
            for (name, part) in [
                ("sum dH+/dx * dH/dy = 0", &dec.h_plus),
                ("sum dH_lin/dx * dH/dy = 0", &lin),
            ] {
                report.check("master-equation", name, || {
                    let r = master_equation_residual_split(&alg, &coords, part, &spec.h);
                    (!r.is_zero()).then(|| alg.format(&r))
                });
            }
        }
    }
    report
}

/// Differential of the Darboux presentation, without the master-equation gate.
pub fn darboux_presentation(spec: &DarbouxSpec) -> Result<CdgaPresentation> {
    let shape = &spec.shape;
    let alg = shape.algebra();
    let coords = Coordinates::locate(shape, &alg)?;
    let h = &spec.h;
    let mut images = BTreeMap::new();
    for &(i, _, x, y) in &coords.pairs {
        if i > 0 {
            images.insert(x, alg.partial(h, y));
        }
        images.insert(y, alg.partial(h, x));
    }
    if let Some(z) = coords.z {
        // -k dz = H + d[Σ (-1)^i i x y], with d known on x and y already
        let partial = CdgaPresentation::new(alg.clone(), images.clone())?;
        let mut corr = AlgElement::zero();
        for &(i, _, x, y) in &coords.pairs {
            let c = minus_one_pow(i as i32) * q(i as i64);
            corr.add_scaled(&alg.mul(&alg.var(x), &alg.var(y)), &c);
        }
        let rhs = h + &partial.apply_d(&corr);
        images.insert(z, rhs.scale(&(-Q::one() / q(shape.k as i64))));
    }
    CdgaPresentation::new(alg, images)
}

/// Built Darboux data; `z`-dependent fields are absent in the symplectic case.
#[derive(Clone, Debug)]
pub struct DarbouxData {
    pub spec: DarbouxSpec,
    pub presentation: Arc<CdgaPresentation>,
    pub dr: DeRham,
    pub coords: Coordinates,
    pub decomposition: Decomposition,
    /// `α₀ = d_dR z + Σ y d_dR x` (contact only).
    pub alpha0: Option<DeRhamForm>,
    /// `ω⁰ = Σ d_dR x ∧ d_dR y`.
    pub omega0: DeRhamForm,
    pub phi: DeRhamForm,
    pub phi_plus: DeRhamForm,
}

pub type ContactDarbouxData = DarbouxData;
pub type SymplecticDarbouxData = DarbouxData;

impl DarbouxData {
    pub fn k(&self) -> i32 {
        self.spec.shape.k
    }

    pub fn algebra(&self) -> &GradedAlgebra {
        self.presentation.algebra()
    }

    pub fn h(&self) -> &AlgElement {
        &self.spec.h
    }

    pub fn h_plus(&self) -> &AlgElement {
        &self.decomposition.h_plus
    }

    pub fn z(&self) -> Option<usize> {
        self.coords.z
    }

    /// `d_dR α₀` in the contact case, `ω⁰` in the symplectic case.
    pub fn two_form(&self) -> DeRhamForm {
        match &self.alpha0 {
            Some(a) => self.dr.de_rham_d(a),
            None => self.omega0.clone(),
        }
    }
}

fn build(spec: &DarbouxSpec) -> Result<DarbouxData> {
    let report = check_master_equation(spec);
    if let Some(f) = report.failures().next() {
        return Err(Error::MasterEquationViolated(f.witness.clone().unwrap_or_default()));
    }
    let presentation = Arc::new(darboux_presentation(spec)?);
    let dr = DeRham::new(presentation.clone())?;
    let alg = presentation.algebra();
    let coords = Coordinates::locate(&spec.shape, alg)?;
    let decomposition = decompose(alg, &coords, &spec.h)?;
    let k = spec.shape.k;

    let mut y_dx = DeRhamForm::zero();
    let mut omega0 = DeRhamForm::zero();
    let mut phi_explicit = DeRhamForm::zero();
    for &(i, _, x, y) in &coords.pairs {
        let (xf, yf) = (dr.function(&alg.var(x)), dr.function(&alg.var(y)));
        y_dx = &y_dx + &dr.wedge(&yf, &dr.dg(x));
        omega0 = &omega0 + &dr.wedge(&dr.dg(x), &dr.dg(y));
        let a = dr.wedge(&xf, &dr.dg(y)).scale(&q(-(i as i64)));
        let b = dr.wedge(&yf, &dr.dg(x)).scale(&q(k as i64 + i as i64));
        phi_explicit = &(&phi_explicit + &a) + &b;
    }
    let (alpha0, phi, phi_plus) = match coords.z {
        Some(z) => {
            let alpha0 = &dr.dg(z) + &y_dx;
            // φ = kα₀ - k d_dR z - d_dR[Σ (-1)^i i x y]
            let mut corr = AlgElement::zero();
            for &(i, _, x, y) in &coords.pairs {
                let c = minus_one_pow(i as i32) * q(i as i64);
                corr.add_scaled(&alg.mul(&alg.var(x), &alg.var(y)), &c);
            }
            let kq = q(k as i64);
            let phi = &(&alpha0.scale(&kq) - &dr.dg(z).scale(&kq)) - &dr.de_rham_d(&dr.function(&corr));
            let phi_plus = &dr.dg(z) - &alpha0;
            (Some(alpha0), phi, phi_plus)
        }
        None => (None, phi_explicit, -&y_dx),
    };
    Ok(DarbouxData {
        spec: spec.clone(),
        presentation,
        dr,
        coords,
        decomposition,
        alpha0,
        omega0,
        phi,
        phi_plus,
    })
}

pub fn build_contact_darboux(spec: &DarbouxSpec) -> Result<DarbouxData> {
    if !spec.shape.contact {
        return Err(Error::ShapeMismatch("contact builder needs the z generator".into()));
    }
    build(spec)
}

pub fn build_symplectic_darboux(spec: &DarbouxSpec) -> Result<DarbouxData> {
    if spec.shape.contact {
        return Err(Error::ShapeMismatch("symplectic builder takes no z generator".into()));
    }
    build(spec)
}

/// Identities shared by both flavours: `dH = 0`, `d_dR H + dφ = 0`,
/// `d_dR φ = k·(two-form)`, and the `H₊` companions.
fn common_identities(data: &DarbouxData, report: &mut VerificationReport, group: &str) {
    let dr = &data.dr;
    let p = &data.presentation;
    let k = q(data.k() as i64);
    let h = dr.function(data.h());
    let hp = dr.function(data.h_plus());
    let two = data.two_form();
    report.check(group, "dH = 0", || dr.witness(&dr.internal_d(&h)));
    report.check(group, "d_dR H + d phi = 0", || {
        dr.witness(&(&dr.de_rham_d(&h) + &dr.internal_d(&data.phi)))
    });
    report.check(group, "d_dR phi = k * d_dR alpha0", || {
        dr.witness(&(&dr.de_rham_d(&data.phi) - &two.scale(&k)))
    });
    report.check(group, "dH+ = 0", || {
        let r = p.apply_d(data.h_plus());
        (!r.is_zero()).then(|| p.algebra().format(&r))
    });
    report.check(group, "d_dR H+ + d phi+ = 0", || {
        dr.witness(&(&dr.de_rham_d(&hp) + &dr.internal_d(&data.phi_plus)))
    });
    report.check(group, "d_dR phi+ = -d_dR alpha0", || {
        dr.witness(&(&dr.de_rham_d(&data.phi_plus) + &two))
    });
}

pub fn verify_contact_identities(data: &DarbouxData) -> VerificationReport {
    let mut report = VerificationReport::new();
    let group = "contact";
    let (Some(alpha0), Some(z)) = (&data.alpha0, data.z()) else {
        report.fail_with_error(group, "contact data", "ShapeMismatch", "no z generator".into());
        return report;
    };
    let dr = &data.dr;
    let p = &data.presentation;
    report.extend(p.check_d_squared());
    common_identities(data, &mut report, group);
    report.check(group, "d alpha0 = 0", || dr.witness(&dr.internal_d(alpha0)));
    report.check(group, "dz = H+", || {
        let r = p.d_image(z) - data.h_plus();
        (!r.is_zero()).then(|| p.algebra().format(&r))
    });
    report.check(group, "i_(d/dz) alpha0 = 1", || {
        let c = dr.contract(&VectorField::basis(z), alpha0).expect("weight one");
        dr.witness(&(&c - &dr.constant(Q::one())))
    });
    report
}

pub fn verify_symplectic_identities(data: &DarbouxData) -> VerificationReport {
    let mut report = VerificationReport::new();
    report.extend(data.presentation.check_d_squared());
    common_identities(data, &mut report, "symplectic");
    let dr = &data.dr;
    report.check("symplectic", "d omega0 = 0", || {
        dr.witness(&dr.internal_d(&data.omega0))
    });
    report.check("symplectic", "d_dR omega0 = 0", || {
        dr.witness(&dr.de_rham_d(&data.omega0))
    });
    report
}

/// Fields spanning `ker α₀`: `∂/∂y` and `∂/∂x - c·∂/∂z`, with `c` solved from
/// `ι_{∂/∂x} α₀` and the result certified.
pub fn kernel_generators(data: &DarbouxData) -> Result<Vec<VectorField>> {
    let (Some(alpha0), Some(z)) = (&data.alpha0, data.z()) else {
        return Err(Error::ShapeMismatch("kernel of α₀ needs contact data".into()));
    };
    kernel_of_contact_form(&data.dr, alpha0, z, &coordinate_order(data))
}

/// x positions then y positions, pair by pair.
fn coordinate_order(data: &DarbouxData) -> Vec<usize> {
    let mut out: Vec<usize> = data.coords.pairs.iter().map(|p| p.2).collect();
    out.extend(data.coords.pairs.iter().map(|p| p.3));
    out
}

/// For a one-form whose contraction with `∂/∂z` is a nonzero constant `c`,
/// the fields `∂/∂g - c⁻¹(ι_{∂/∂g} α)·∂/∂z` for each listed `g`, each checked
/// to lie in the kernel.
pub fn kernel_of_contact_form(dr: &DeRham, alpha: &DeRhamForm, z: usize, coords: &[usize]) -> Result<Vec<VectorField>> {
    let reeb = dr.contract(&VectorField::basis(z), alpha)?;
    let c = dr
        .function_part(&reeb)
        .as_constant()
        .filter(|c| !c.is_zero() && dr.function(&AlgElement::constant(c.clone())) == reeb)
        .ok_or_else(|| {
            Error::ShapeMismatch(format!(
                "contraction with d/dz is {}, expected a nonzero constant",
                dr.format(&reeb)
            ))
        })?;
    let mut out = Vec::new();
    for &g in coords {
        let a = dr.function_part(&dr.contract(&VectorField::basis(g), alpha)?);
        let v = VectorField::basis(g).with_term(z, a.scale(&(-c.recip())));
        let check = dr.contract(&v, alpha)?;
        if !check.is_zero() {
            return Err(Error::ShapeMismatch(format!(
                "kernel certificate failed for {}: {}",
                v.format(dr.base_algebra()),
                dr.format(&check)
            )));
        }
        out.push(v);
    }
    Ok(out)
}

/// Matrix of `ι_V ι_W ω` over the given fields, evaluated at a point.
pub fn pairing_matrix(
    dr: &DeRham,
    omega: &DeRhamForm,
    fields: &[VectorField],
    point: &PointAssignment,
) -> Result<QMatrix> {
    let alg = dr.base_algebra();
    let resolved = point.resolve(alg)?;
    let mut m = QMatrix::zeros(fields.len(), fields.len());
    for (r, v) in fields.iter().enumerate() {
        let iv = dr.contract(v, omega)?;
        for (c, w) in fields.iter().enumerate() {
            if iv.is_zero() {
                continue;
            }
            let f = dr.function_part(&dr.contract(w, &iv)?);
            m.set(r, c, resolved.eval(&f));
        }
    }
    Ok(m)
}

/// Invertibility of the `d_dR α₀` pairing on `ker α₀` at each point.
pub fn check_nondegenerate_on_kernel(data: &DarbouxData, points: &[PointAssignment]) -> Result<VerificationReport> {
    let fields = kernel_generators(data)?;
    let two = data.two_form();
    check_pairing_at_points(&data.dr, &two, &fields, points, "kernel-pairing")
}

pub(crate) fn check_pairing_at_points(
    dr: &DeRham,
    two: &DeRhamForm,
    fields: &[VectorField],
    points: &[PointAssignment],
    group: &str,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    for p in points {
        p.check_on_locus(dr.presentation())?;
        let m = pairing_matrix(dr, two, fields, p)?;
        report.check(group, format!("pairing invertible at {p}"), || {
            let rank = m.rank();
            (rank != fields.len()).then(|| format!("rank {rank} of {}", fields.len()))
        });
    }
    Ok(report)
}
