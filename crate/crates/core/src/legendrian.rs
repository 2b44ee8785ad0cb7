//! Legendrian models in contact Darboux targets, the zero section of the
//! affine 1-jet space, and transfer to a point target.
//!
//! An isotropic structure on `β: A → B` consists of a one-form `Λ` on `B`
//! with `d_B Λ = -β_*(α)` and a lift `ρ` of the tangent map into `ker α`.
//! Non-degeneracy is certified twice: globally, by the constant block matrix
//! on the `u, v, y` directions, and at sampled points, by acyclicity of the
//! mapping cone of `χ_ρ: T_ρ → Ω¹_B[k-1]`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::cdga::{CdgaMorphism, CdgaPresentation};
use crate::darboux::kernel_of_contact_form;
use crate::derham::{DeRham, DeRhamForm, VectorField};
use crate::error::{Error, Result};
use crate::graded_algebra::{fmt_q, q, q_frac, AlgElement, GradedAlgebra, GradedGenerator, Q};
use crate::homcheck::{
    cotangent_complex, tangent_complex, ChainComplexQ, ComplexMap, PointAssignment, PointComplex, QMatrix,
};
use crate::lagrangian::{build_relative, relative_identities, LagrangianDarbouxData, LegendrianDarbouxSpec};
use crate::report::{error_class, VerificationReport};

/// Borrowed description of an isotropic structure on `β: A → B` for a
/// contact form `α` on `A`.
#[derive(Clone, Copy)]
pub struct IsotropicView<'a> {
    pub target_dr: &'a DeRham,
    pub alpha: &'a DeRhamForm,
    pub z: usize,
    pub beta: &'a CdgaMorphism,
    pub source_dr: &'a DeRham,
    pub lambda: &'a DeRhamForm,
    pub kernel: &'a KernelBasis,
    pub rho: &'a Rho,
    /// Degree of `Λ`, i.e. the shift of the target cotangent complex.
    pub lambda_degree: i32,
}

/// Fields spanning `ker α`, one per target generator other than `z`.
#[derive(Clone, Debug)]
pub struct KernelBasis {
    /// `(target generator, field)` in target canonical order.
    pub fields: Vec<(usize, VectorField)>,
}

impl KernelBasis {
    pub fn new(dr: &DeRham, alpha: &DeRhamForm, z: usize) -> Result<Self> {
        let coords: Vec<usize> = (0..dr.base_algebra().len()).filter(|&p| p != z).collect();
        let fields = kernel_of_contact_form(dr, alpha, z, &coords)?;
        Ok(KernelBasis {
            fields: coords.into_iter().zip(fields).collect(),
        })
    }

    pub fn index_of(&self, target_pos: usize) -> Option<usize> {
        self.fields.iter().position(|(p, _)| *p == target_pos)
    }
}

/// `ρ(∂/∂b) = Σ_a ∂_b β(a) · e_a`, the tangent map of `β` followed by the
/// projection along `∂/∂z` onto the kernel basis `e_a`.
/// `coefficients[b][i]` is the coefficient of the `i`-th kernel field.
#[derive(Clone, Debug)]
pub struct Rho {
    pub coefficients: Vec<Vec<AlgElement>>,
}

impl Rho {
    pub fn strict(beta: &CdgaMorphism, kernel: &KernelBasis) -> Self {
        let src = beta.target().algebra();
        let coefficients = (0..src.len())
            .map(|b| {
                kernel
                    .fields
                    .iter()
                    .map(|(a, _)| src.partial(beta.image(*a), b))
                    .collect()
            })
            .collect();
        Rho { coefficients }
    }

    /// Image of `∂/∂b` as a target field with coefficients in `B`.
    pub fn image(&self, b: usize, kernel: &KernelBasis) -> Vec<(usize, AlgElement)> {
        kernel
            .fields
            .iter()
            .zip(&self.coefficients[b])
            .filter(|(_, c)| !c.is_zero())
            .map(|((a, _), c)| (*a, c.clone()))
            .collect()
    }
}

/// Legendrian model: the relative data plus `ker α₀` and `ρ`.
#[derive(Clone, Debug)]
pub struct LegendrianDarbouxData {
    pub model: LagrangianDarbouxData,
    pub kernel: KernelBasis,
    pub rho: Rho,
}

impl LegendrianDarbouxData {
    pub fn k(&self) -> i32 {
        self.model.k()
    }

    pub fn alpha0(&self) -> &DeRhamForm {
        self.model.target.alpha0.as_ref().expect("contact target")
    }

    pub fn z(&self) -> usize {
        self.model.target.z().expect("contact target")
    }

    pub fn view(&self) -> IsotropicView<'_> {
        IsotropicView {
            target_dr: &self.model.target.dr,
            alpha: self.alpha0(),
            z: self.z(),
            beta: &self.model.beta,
            source_dr: &self.model.source_dr,
            lambda: &self.model.lambda,
            kernel: &self.kernel,
            rho: &self.rho,
            lambda_degree: self.k() - 1,
        }
    }
}

pub fn build_legendrian_model(spec: &LegendrianDarbouxSpec) -> Result<LegendrianDarbouxData> {
    let model = build_relative(spec, true)?;
    let alpha = model.target.alpha0.as_ref().expect("contact target");
    let kernel = KernelBasis::new(&model.target.dr, alpha, model.target.z().expect("contact target"))?;
    let rho = Rho::strict(&model.beta, &kernel);
    Ok(LegendrianDarbouxData { model, kernel, rho })
}

/// Relative identities plus `d_B Λ = -β_*(α₀)`, the corrector identity for
/// `Λ`, and `ρ` landing in the kernel.
pub fn verify_legendrian_identities(data: &LegendrianDarbouxData) -> VerificationReport {
    let mut report = VerificationReport::new();
    let m = &data.model;
    let dr = &m.source_dr;
    let group = "legendrian";
    report.extend(data.model.target.presentation.check_d_squared().prefixed("target "));
    report.extend(relative_identities(m, group));
    report.check(group, "d_B Lambda = -beta_*(alpha0)", || {
        dr.witness(&(&dr.internal_d(&m.lambda) + &m.push(data.alpha0())))
    });
    report.check(group, "(k-1) Lambda = psi + d_dR[corrector]", || {
        let rhs = &m.psi + &dr.de_rham_d(&dr.function(&m.corrector));
        dr.witness(&(&m.lambda.scale(&q(data.k() as i64 - 1)) - &rhs))
    });
    report.check(group, "d_B(d_dR Lambda) = beta_*(d_dR alpha0)", || {
        let lhs = dr.internal_d(&dr.de_rham_d(&m.lambda));
        dr.witness(&(&lhs - &m.push(&m.target.dr.de_rham_d(data.alpha0()))))
    });
    check_rho_in_kernel(&data.view(), &mut report, group);
    report
}

/// `ι_{ρ(∂/∂b)} β_*α = 0` for every source generator.
fn check_rho_in_kernel(view: &IsotropicView<'_>, report: &mut VerificationReport, group: &str) {
    let src = view.source_dr.base_algebra();
    for b in 0..src.len() {
        report.check(group, format!("rho(d/d{}) in ker alpha", src.generator(b).name), || {
            let mut total = AlgElement::zero();
            for (a, c) in view.rho.image(b, view.kernel) {
                let field = &view.kernel.fields[view.kernel.index_of(a).unwrap()].1;
                let contracted = view.target_dr.contract(field, view.alpha).ok()?;
                let f = view.target_dr.function_part(&contracted);
                total = &total + &src.mul(&c, &view.beta.apply(&f));
            }
            (!total.is_zero()).then(|| src.format(&total))
        });
    }
}

/// `ι_{∂/∂b} d_dR Λ` for every source generator.
fn lambda_contractions(view: &IsotropicView<'_>) -> Vec<DeRhamForm> {
    let dr = view.source_dr;
    let two = dr.de_rham_d(view.lambda);
    (0..dr.base_algebra().len())
        .map(|b| {
            if two.is_zero() {
                DeRhamForm::zero()
            } else {
                dr.contract(&VectorField::basis(b), &two).unwrap()
            }
        })
        .collect()
}

/// `β_*(ι_{e_a} d_dR α)` for every kernel field.
fn kernel_contractions(view: &IsotropicView<'_>) -> Vec<DeRhamForm> {
    let tdr = view.target_dr;
    let two = tdr.de_rham_d(view.alpha);
    view.kernel
        .fields
        .iter()
        .map(|(_, f)| {
            if two.is_zero() {
                return DeRhamForm::zero();
            }
            let c = tdr.contract(f, &two).unwrap();
            tdr.pullback(view.beta, view.source_dr, &c)
        })
        .collect()
}

/// Sign on the `T_B` columns of `χ_ρ`.
const LAMBDA_SIGN: i64 = 1;
/// Sign on the kernel columns of `χ_ρ`.
const KERNEL_SIGN: i64 = 1;

/// Point model of `χ_ρ: T_ρ → Ω¹_B[k-1]` with
/// `T_ρ^n = T_B^n ⊕ K^{n-1}` and `D = [[D_B, 0], [ρ, -D_K]]`.
pub struct ChiAtPoint {
    pub map: ComplexMap,
    pub tangent: PointComplex,
    pub kernel: PointComplex,
    pub cotangent: PointComplex,
}

pub fn chi_rho_at_point(view: &IsotropicView<'_>, point: &PointAssignment) -> Result<ChiAtPoint> {
    let source = view.source_dr.presentation();
    point.check_on_locus(source)?;
    let r = point.resolve(source.algebra())?;
    let eval = |e: &AlgElement| r.eval(e);
    let eval_target = |e: &AlgElement| r.eval(&view.beta.apply(e));

    let tb = tangent_complex(source, &eval)?;
    let ta = tangent_complex(view.beta.source(), &eval_target)?;
    let cot = cotangent_complex(view.source_dr, &eval, view.lambda_degree)?;
    let kernel = kernel_complex(view, &ta, &eval_target)?;

    let degrees: BTreeSet<i32> = tb
        .basis
        .keys()
        .copied()
        .chain(kernel.basis.keys().map(|n| n + 1))
        .chain(cot.basis.keys().copied())
        .collect();
    let tb_dim = |n: i32| tb.complex.dim(n);
    let k_dim = |n: i32| kernel.complex.dim(n);

    let rho_at = |n: i32| -> QMatrix {
        let mut m = QMatrix::zeros(k_dim(n), tb_dim(n));
        let (Some(cols), Some(rows)) = (tb.basis.get(&n), kernel.basis.get(&n)) else {
            return m;
        };
        for (c, &b) in cols.iter().enumerate() {
            for (r_, &a) in rows.iter().enumerate() {
                let i = view.kernel.index_of(a).unwrap();
                m.set(r_, c, eval(&view.rho.coefficients[b][i]));
            }
        }
        m
    };

    let mut dims = BTreeMap::new();
    let mut diffs = BTreeMap::new();
    for &n in &degrees {
        dims.insert(n, tb_dim(n) + k_dim(n - 1));
        let mut d = QMatrix::zeros(tb_dim(n + 1) + k_dim(n), tb_dim(n) + k_dim(n - 1));
        d.paste(0, 0, &tb.complex.d(n));
        d.paste(tb_dim(n + 1), 0, &rho_at(n));
        d.paste(tb_dim(n + 1), tb_dim(n), &kernel.complex.d(n - 1).scale(&-Q::one()));
        diffs.insert(n, d);
    }
    let t_rho = ChainComplexQ::new(dims, diffs)?;

    let lam = lambda_contractions(view);
    let ker = kernel_contractions(view);
    let row_of = |pos: usize| cot.locate(pos);
    let mut maps = BTreeMap::new();
    for &n in &degrees {
        let mut m = QMatrix::zeros(cot.complex.dim(n), t_rho.dim(n));
        let mut fill = |col: usize, form: &DeRhamForm, sign: &Q| {
            for h in 0..view.source_dr.base_algebra().len() {
                let v = eval(&view.source_dr.one_form_coefficient(form, h));
                if v.is_zero() {
                    continue;
                }
                match row_of(h) {
                    Some((deg, row)) if deg == n => m.set(row, col, sign * v),
                    _ => {}
                }
            }
        };
        if let Some(cols) = tb.basis.get(&n) {
            for (c, &b) in cols.iter().enumerate() {
                fill(c, &lam[b], &q(LAMBDA_SIGN));
            }
        }
        if let Some(cols) = kernel.basis.get(&(n - 1)) {
            for (c, &a) in cols.iter().enumerate() {
                fill(tb_dim(n) + c, &ker[view.kernel.index_of(a).unwrap()], &q(KERNEL_SIGN));
            }
        }
        maps.insert(n, m);
    }
    let map = ComplexMap::new(t_rho, cot.complex.clone(), maps)?;
    Ok(ChiAtPoint {
        map,
        tangent: tb,
        kernel,
        cotangent: cot,
    })
}

/// Restriction of the pulled-back tangent complex to the kernel fields,
/// certified to be a subcomplex.
fn kernel_complex(
    view: &IsotropicView<'_>,
    ta: &PointComplex,
    eval_target: &dyn Fn(&AlgElement) -> Q,
) -> Result<PointComplex> {
    let mut basis: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (a, _) in &view.kernel.fields {
        let (n, _) = ta.locate(*a).expect("target generator");
        basis.entry(n).or_default().push(*a);
    }
    // Each kernel field at the point as a vector of the tangent fiber.
    let vector = |a: usize| -> (i32, Vec<Q>) {
        let (n, _) = ta.locate(a).unwrap();
        let field = &view.kernel.fields[view.kernel.index_of(a).unwrap()].1;
        let mut v = vec![Q::zero(); ta.complex.dim(n)];
        for (g, c) in field.terms() {
            if let Some((m, i)) = ta.locate(g) {
                if m == n {
                    v[i] += eval_target(c);
                }
            }
        }
        (n, v)
    };
    let dims = basis.iter().map(|(&n, b)| (n, b.len())).collect();
    let mut diffs = BTreeMap::new();
    for (&n, cols) in &basis {
        let rows = basis.get(&(n + 1)).cloned().unwrap_or_default();
        let mut m = QMatrix::zeros(rows.len(), cols.len());
        for (c, &a) in cols.iter().enumerate() {
            let (_, v) = vector(a);
            let image = ta.complex.d(n).apply(&v);
            // coordinates along the non-z generators, then the certificate
            let mut rebuilt = vec![Q::zero(); image.len()];
            for (r, &b) in rows.iter().enumerate() {
                let (_, i) = ta.locate(b).unwrap();
                let coeff = image[i].clone();
                let (_, vb) = vector(b);
                for (x, y) in rebuilt.iter_mut().zip(&vb) {
                    *x += &coeff * y;
                }
                m.set(r, c, coeff);
            }
            if rebuilt != image {
                return Err(Error::ShapeMismatch(format!(
                    "kernel of the contact form is not a subcomplex in degree {n}"
                )));
            }
        }
        diffs.insert(n, m);
    }
    Ok(PointComplex {
        complex: ChainComplexQ::new(dims, diffs)?,
        basis,
    })
}

/// Constant blocks of `χ_ρ` in one degree of `T_ρ`: kernel `∂/∂y` columns
/// against `d_dR x̃` rows, and `∂/∂u, ∂/∂v` columns against `d_dR u, d_dR v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChiBlocks {
    pub degree: i32,
    pub y_columns: Vec<String>,
    pub x_rows: Vec<String>,
    pub y_block: QMatrix,
    pub uv_columns: Vec<String>,
    pub uv_rows: Vec<String>,
    pub uv_block: QMatrix,
}

impl ChiBlocks {
    pub fn is_signed_permutation(&self) -> bool {
        self.y_block.is_signed_permutation() && self.uv_block.is_signed_permutation()
    }
}

/// `(degree, column generator, column is a kernel field, row generator, value)`.
type BlockEntry = (i32, usize, bool, usize, Q);

/// Symbolic `χ_ρ` restricted to the subcomplex spanned by `∂/∂u`, `∂/∂v` and
/// the kernel fields `e_y`, one entry per (column generator, row generator).
fn c_block_entries(data: &LegendrianDarbouxData) -> Result<Vec<BlockEntry>> {
    let view = data.view();
    let src = data.model.source_algebra();
    let tgt = data.model.target.algebra();
    let shift = view.lambda_degree;
    let lam = lambda_contractions(&view);
    let ker = kernel_contractions(&view);
    let uv: Vec<usize> = data.model.coords.uv.iter().flat_map(|&(_, _, u, v)| [u, v]).collect();
    let ys: Vec<usize> = data.model.target.coords.pairs.iter().map(|p| p.3).collect();
    let mut out = Vec::new();
    let mut push = |deg: i32, col: usize, is_y: bool, form: &DeRhamForm, sign: i64| -> Result<()> {
        for h in 0..src.len() {
            let c = view.source_dr.one_form_coefficient(form, h);
            if c.is_zero() {
                continue;
            }
            let Some(v) = c.as_constant() else {
                return Err(Error::ShapeMismatch(format!(
                    "non-constant entry {} in the u, v, y block",
                    src.format(&c)
                )));
            };
            if src.generator(h).degree - shift != deg {
                return Err(Error::ShapeMismatch("block entry changes degree".into()));
            }
            out.push((deg, col, is_y, h, v * q(sign)));
        }
        Ok(())
    };
    for &b in &uv {
        push(-src.generator(b).degree, b, false, &lam[b], LAMBDA_SIGN)?;
    }
    for &y in &ys {
        let i = view.kernel.index_of(y).unwrap();
        push(-tgt.generator(y).degree + 1, y, true, &ker[i], KERNEL_SIGN)?;
    }
    Ok(out)
}

pub fn chi_rho_blocks(data: &LegendrianDarbouxData, degree: i32) -> Result<ChiBlocks> {
    let src = data.model.source_algebra();
    let tgt = data.model.target.algebra();
    let shift = data.k() - 1;
    let entries = c_block_entries(data)?;
    let ys: Vec<usize> = data
        .model
        .target
        .coords
        .pairs
        .iter()
        .map(|p| p.3)
        .filter(|&y| -tgt.generator(y).degree + 1 == degree)
        .collect();
    let xs: Vec<usize> = data
        .model
        .coords
        .xt
        .iter()
        .map(|p| p.2)
        .filter(|&x| src.generator(x).degree - shift == degree)
        .collect();
    let uv_cols: Vec<usize> = data
        .model
        .coords
        .uv
        .iter()
        .flat_map(|&(_, _, u, v)| [u, v])
        .filter(|&b| -src.generator(b).degree == degree)
        .collect();
    let uv_rows: Vec<usize> = data
        .model
        .coords
        .uv
        .iter()
        .flat_map(|&(_, _, u, v)| [u, v])
        .filter(|&b| src.generator(b).degree - shift == degree)
        .collect();
    if ys.is_empty() && xs.is_empty() && uv_cols.is_empty() && uv_rows.is_empty() {
        return Err(Error::DegreeOutOfRange(degree));
    }
    let block = |cols: &[usize], rows: &[usize], is_y: bool| {
        let mut m = QMatrix::zeros(rows.len(), cols.len());
        for (deg, col, y, row, v) in &entries {
            if *deg != degree || *y != is_y {
                continue;
            }
            if let (Some(c), Some(r)) = (cols.iter().position(|x| x == col), rows.iter().position(|x| x == row)) {
                m.set(r, c, v.clone());
            }
        }
        m
    };
    let names = |alg: &GradedAlgebra, v: &[usize]| v.iter().map(|&p| alg.generator(p).name.clone()).collect();
    Ok(ChiBlocks {
        degree,
        y_block: block(&ys, &xs, true),
        uv_block: block(&uv_cols, &uv_rows, false),
        y_columns: names(tgt, &ys),
        x_rows: names(src, &xs),
        uv_columns: names(src, &uv_cols),
        uv_rows: names(src, &uv_rows),
    })
}

/// Degrees of `T_ρ` in which the `u, v, y` subcomplex or its image lives.
fn block_degrees(data: &LegendrianDarbouxData) -> Vec<i32> {
    let src = data.model.source_algebra();
    let tgt = data.model.target.algebra();
    let shift = data.k() - 1;
    let mut out = BTreeSet::new();
    for &(_, _, u, v) in &data.model.coords.uv {
        for b in [u, v] {
            out.insert(-src.generator(b).degree);
            out.insert(src.generator(b).degree - shift);
        }
    }
    for p in &data.model.target.coords.pairs {
        out.insert(-tgt.generator(p.3).degree + 1);
    }
    for p in &data.model.coords.xt {
        out.insert(src.generator(p.2).degree - shift);
    }
    out.into_iter().collect()
}

/// Symbolic strict-isomorphism check on the `u, v, y` subcomplex plus cone
/// acyclicity of `χ_ρ` at each point.
pub fn check_legendrian_nondegeneracy(
    data: &LegendrianDarbouxData,
    points: &[PointAssignment],
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    let group = "non-degeneracy";
    match c_block_entries(data) {
        Err(e) => report.fail_with_error(group, "u, v, y block is constant", error_class(&e), e.to_string()),
        Ok(_) => {
            for n in block_degrees(data) {
                let blocks = chi_rho_blocks(data, n)?;
                report.check(group, format!("strict iso on C in degree {n}"), || {
                    let mut full = QMatrix::zeros(
                        blocks.x_rows.len() + blocks.uv_rows.len(),
                        blocks.y_columns.len() + blocks.uv_columns.len(),
                    );
                    full.paste(0, 0, &blocks.y_block);
                    full.paste(blocks.x_rows.len(), blocks.y_columns.len(), &blocks.uv_block);
                    if full.rows() != full.cols() {
                        return Some(format!("{}x{} block", full.rows(), full.cols()));
                    }
                    let det = full.determinant().ok()?;
                    if det.is_zero() || !blocks.is_signed_permutation() {
                        return Some(format!("determinant {} of {}", fmt_q(&det), full));
                    }
                    None
                });
            }
        }
    }
    report.extend(cone_checks(&data.view(), points, group)?);
    Ok(report)
}

fn cone_checks(view: &IsotropicView<'_>, points: &[PointAssignment], group: &str) -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    for p in points {
        point_on_locus(view.source_dr.presentation(), p)?;
        let name = format!("chi_rho cone acyclic at {p}");
        match chi_rho_at_point(view, p) {
            Ok(chi) => report.check(group, name, || {
                let out = chi.map.is_quasi_iso();
                (!out.holds).then(|| match out.witness {
                    Some((n, v)) => format!(
                        "class in degree {n}: [{}]",
                        v.iter().map(fmt_q).collect::<Vec<_>>().join(", ")
                    ),
                    None => "nonzero cohomology".into(),
                })
            }),
            Err(e) => report.fail_with_error(group, name, error_class(&e), e.to_string()),
        }
    }
    Ok(report)
}

fn point_on_locus(p: &CdgaPresentation, point: &PointAssignment) -> Result<()> {
    point.check_on_locus(p)
}

/// Zero section of the affine 1-jet space `Spec A(0)[y_j, z]`.
#[derive(Clone, Debug)]
pub struct ZeroSectionData {
    pub shift: i32,
    pub target: Arc<CdgaPresentation>,
    pub target_dr: DeRham,
    pub alpha: DeRhamForm,
    pub z: usize,
    pub source: Arc<CdgaPresentation>,
    pub source_dr: DeRham,
    pub beta: CdgaMorphism,
    pub lambda: DeRhamForm,
    pub kernel: KernelBasis,
    pub rho: Rho,
}

impl ZeroSectionData {
    pub fn view(&self) -> IsotropicView<'_> {
        IsotropicView {
            target_dr: &self.target_dr,
            alpha: &self.alpha,
            z: self.z,
            beta: &self.beta,
            source_dr: &self.source_dr,
            lambda: &self.lambda,
            kernel: &self.kernel,
            rho: &self.rho,
            lambda_degree: self.shift - 1,
        }
    }
}

/// Target with `|y_j| = |z| = shift`, `α = -d_dR z + Σ y_j d_dR x_j` and zero
/// differential; source `A(0)`, `β(x) = x`, `β(y) = β(z) = 0`, `Λ = 0`.
pub fn build_jet1_zero_section(m0: usize, shift: i32) -> Result<ZeroSectionData> {
    if shift >= 0 {
        return Err(Error::UnsupportedShift(shift));
    }
    let mut gens: Vec<GradedGenerator> = (1..=m0).map(|j| GradedGenerator::new(format!("x{j}"), 0)).collect();
    gens.extend((1..=m0).map(|j| GradedGenerator::new(format!("y{j}"), shift)));
    gens.push(GradedGenerator::new("z", shift));
    let target = Arc::new(CdgaPresentation::trivial(GradedAlgebra::new(gens)?));
    let ta = target.algebra();
    let target_dr = DeRham::new(target.clone())?;
    let z = ta.require("z")?;
    let mut alpha = -&target_dr.dg(z);
    for j in 1..=m0 {
        let (x, y) = (ta.require(&format!("x{j}"))?, ta.require(&format!("y{j}"))?);
        alpha = &alpha + &target_dr.wedge(&target_dr.function(&ta.var(y)), &target_dr.dg(x));
    }
    let source = Arc::new(CdgaPresentation::trivial(GradedAlgebra::new(
        (1..=m0).map(|j| GradedGenerator::new(format!("x{j}"), 0)).collect(),
    )?));
    let sa = source.algebra();
    let mut images = BTreeMap::new();
    for j in 1..=m0 {
        images.insert(ta.require(&format!("x{j}"))?, sa.var_named(&format!("x{j}"))?);
    }
    let beta = CdgaMorphism::new(target.clone(), source.clone(), images)?;
    let source_dr = DeRham::new(source.clone())?;
    let kernel = KernelBasis::new(&target_dr, &alpha, z)?;
    let rho = Rho::strict(&beta, &kernel);
    Ok(ZeroSectionData {
        shift,
        target,
        target_dr,
        alpha,
        z,
        source,
        source_dr,
        beta,
        lambda: DeRhamForm::zero(),
        kernel,
        rho,
    })
}

pub fn verify_zero_section(data: &ZeroSectionData, points: &[PointAssignment]) -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    let group = "zero-section";
    let view = data.view();
    let pulled = data.target_dr.pullback(&data.beta, &data.source_dr, &data.alpha);
    report.check(group, "beta_*(alpha) = 0", || data.source_dr.witness(&pulled));
    report.check(group, "d_B Lambda = -beta_*(alpha)", || {
        data.source_dr
            .witness(&(&data.source_dr.internal_d(&data.lambda) + &pulled))
    });
    report.extend(data.beta.check_chain_map());
    for (a, field) in &data.kernel.fields {
        let name = data.target.algebra().generator(*a).name.clone();
        report.check(group, format!("kernel field for {name} annihilates alpha"), || {
            let c = data.target_dr.contract(field, &data.alpha).ok()?;
            data.target_dr.witness(&c)
        });
    }
    check_rho_in_kernel(&view, &mut report, group);
    report.extend(cone_checks(&view, points, group)?);
    Ok(report)
}

/// Output of the point-target transfer.
#[derive(Clone, Debug)]
pub struct PointTargetTransfer {
    /// `ω = d_dR Λ` on `B`.
    pub omega: DeRhamForm,
    /// `B[t]` with `|t| = shift - 1` and `d t = 0`.
    pub extended: Arc<CdgaPresentation>,
    pub extended_dr: DeRham,
    /// `σ = d_dR t + Λ` on `B[t]`.
    pub sigma: DeRhamForm,
    pub t: usize,
    pub report: VerificationReport,
}

pub const POINT_TARGET_VARIABLE: &str = "t";

/// From `Λ` with `d_B Λ = 0`, the exact form `ω = d_dR Λ` and the one-form
/// `σ = d_dR t + Λ` on `B[t]`. Certifies `ι_{∂/∂t} σ = 1`, closedness of `ω`,
/// non-degeneracy of `ω` at each point, and that the pairing of `d_dR σ` on the
/// fields `∂/∂g - (ι_{∂/∂g} σ) ∂/∂t` matches the `ω` pairing on `∂/∂g`.
pub fn point_target_transfer(
    source: &Arc<CdgaPresentation>,
    lambda: &DeRhamForm,
    shift: i32,
    points: &[PointAssignment],
) -> Result<PointTargetTransfer> {
    let dr = DeRham::new(source.clone())?;
    let alg = source.algebra();
    if !dr.is_bihomogeneous(lambda, 1, shift - 1) {
        return Err(Error::DegreeMismatch {
            context: "point-target one-form".into(),
            expected: shift - 1,
            found: dr.format(lambda),
        });
    }
    let dl = dr.internal_d(lambda);
    if !dl.is_zero() {
        return Err(Error::NotClosed(dr.format(&dl)));
    }
    let omega = dr.de_rham_d(lambda);

    let mut gens = alg.declared_generators().into_iter().cloned().collect::<Vec<_>>();
    gens.push(GradedGenerator::new(POINT_TARGET_VARIABLE, shift - 1));
    let ext_alg = GradedAlgebra::new(gens)?;
    let into_ext: Vec<AlgElement> = (0..alg.len())
        .map(|p| ext_alg.var(ext_alg.position(&alg.generator(p).name).unwrap()))
        .collect();
    let images = (0..alg.len())
        .map(|p| {
            (
                ext_alg.position(&alg.generator(p).name).unwrap(),
                alg.substitute(&ext_alg, source.d_image(p), &into_ext),
            )
        })
        .collect();
    let extended = Arc::new(CdgaPresentation::new(ext_alg, images)?);
    let ext_dr = DeRham::new(extended.clone())?;
    let ea = extended.algebra();
    let t = ea.require(POINT_TARGET_VARIABLE)?;
    let inclusion = CdgaMorphism::new(
        source.clone(),
        extended.clone(),
        into_ext.iter().cloned().enumerate().collect(),
    )?;
    let lambda_ext = dr.pullback(&inclusion, &ext_dr, lambda);
    let sigma = &ext_dr.dg(t) + &lambda_ext;

    let mut report = VerificationReport::new();
    let group = "point-target";
    report.check(group, "i_(d/dt) sigma = 1", || {
        let c = ext_dr.contract(&VectorField::basis(t), &sigma).ok()?;
        ext_dr.witness(&(&c - &ext_dr.constant(Q::one())))
    });
    report.check(group, "d_dR omega = 0", || dr.witness(&dr.de_rham_d(&omega)));
    report.check(group, "d_B omega = 0", || dr.witness(&dr.internal_d(&omega)));

    let base: Vec<usize> = (0..alg.len()).collect();
    let ext_coords: Vec<usize> = base
        .iter()
        .map(|&p| ea.position(&alg.generator(p).name).unwrap())
        .collect();
    let kernel = kernel_of_contact_form(&ext_dr, &sigma, t, &ext_coords)?;
    let dsigma = ext_dr.de_rham_d(&sigma);
    let coordinate_fields: Vec<VectorField> = base.iter().map(|&p| VectorField::basis(p)).collect();
    for p in points {
        let ext_point = p.restricted_to(ea);
        let omega_pairing = crate::darboux::pairing_matrix(&dr, &omega, &coordinate_fields, p)?;
        let sigma_pairing = crate::darboux::pairing_matrix(&ext_dr, &dsigma, &kernel, &ext_point)?;
        report.check(
            group,
            format!("sigma-kernel pairing equals omega pairing at {p}"),
            || (omega_pairing != sigma_pairing).then(|| format!("{omega_pairing} vs {sigma_pairing}")),
        );
        let map = symplectic_map_at(&dr, &omega, shift - 1, p)?;
        let out = map.is_quasi_iso();
        if !out.holds {
            return Err(Error::DegenerateAtPoint(format!("{p}: omega pairing {omega_pairing}")));
        }
        report.check(group, format!("omega non-degenerate at {p}"), || None);
    }
    Ok(PointTargetTransfer {
        omega,
        extended,
        extended_dr: ext_dr,
        sigma,
        t,
        report,
    })
}

/// `T_B → Ω¹_B[shift]`, `V ↦ ι_V ω`, at a point.
fn symplectic_map_at(dr: &DeRham, omega: &DeRhamForm, shift: i32, point: &PointAssignment) -> Result<ComplexMap> {
    let p = dr.presentation();
    point.check_on_locus(p)?;
    let r = point.resolve(p.algebra())?;
    let eval = |e: &AlgElement| r.eval(e);
    let tb = tangent_complex(p, &eval)?;
    let cot = cotangent_complex(dr, &eval, shift)?;
    let n = p.algebra().len();
    let mut maps = BTreeMap::new();
    for (&deg, cols) in &tb.basis {
        let mut m = QMatrix::zeros(cot.complex.dim(deg), cols.len());
        for (c, &b) in cols.iter().enumerate() {
            if omega.is_zero() {
                continue;
            }
            let form = dr.contract(&VectorField::basis(b), omega)?;
            for h in 0..n {
                let v = eval(&dr.one_form_coefficient(&form, h));
                if v.is_zero() {
                    continue;
                }
                if let Some((d, row)) = cot.locate(h) {
                    if d == deg {
                        m.set(row, c, v);
                    }
                }
            }
        }
        maps.insert(deg, m);
    }
    ComplexMap::new(tb.complex, cot.complex, maps)
}

/// Up to `count` points of the classical locus drawn from a small rational
/// grid in random order.
pub fn sample_locus_points<R: Rng>(p: &CdgaPresentation, count: usize, rng: &mut R) -> Vec<PointAssignment> {
    let alg = p.algebra();
    let coords: Vec<String> = alg
        .generators()
        .iter()
        .filter(|g| g.degree == 0)
        .map(|g| g.name.clone())
        .collect();
    let grid = [q(0), q(1), q(-1), q(2), q(-2), q_frac(1, 2), q_frac(-1, 2), q(3)];
    let candidates: Vec<Vec<usize>> = if grid.len().pow(coords.len() as u32) <= 20_000 {
        let mut all = vec![vec![]];
        for _ in &coords {
            all = all
                .into_iter()
                .flat_map(|v: Vec<usize>| (0..grid.len()).map(move |i| [v.clone(), vec![i]].concat()))
                .collect();
        }
        all.shuffle(rng);
        all
    } else {
        (0..20_000)
            .map(|_| coords.iter().map(|_| rng.gen_range(0..grid.len())).collect())
            .collect()
    };
    let mut out = Vec::new();
    for c in candidates {
        let pt = PointAssignment::new(coords.iter().cloned().zip(c.iter().map(|&i| grid[i].clone())));
        if pt.check_on_locus(p).is_ok() && !out.contains(&pt) {
            out.push(pt);
            if out.len() == count {
                break;
            }
        }
    }
    out
}
