//! Build-and-verify pipelines per instance kind, and report rendering.

use std::fmt::Write as _;

use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::Serialize;

use super::spec_file::{sign_name, InstanceSpecFile, Kind};
use crate::cdga::CdgaPresentation;
use crate::darboux::{
    build_contact_darboux, build_symplectic_darboux, check_master_equation, check_nondegenerate_on_kernel,
    kernel_generators, verify_contact_identities, verify_symplectic_identities, DarbouxData, DarbouxSpec,
};
use crate::derham::{
    check_closed_sequence, check_path_equivalence, DeRham, DeRhamForm, FormSequence, SignConvention, VectorField,
    DEFAULT_TRUNCATION,
};
use crate::error::Result;
use crate::homcheck::PointAssignment;
use crate::lagrangian::{
    build_lagrangian_model, check_relative_master_equation, verify_lagrangian_identities, LagrangianDarbouxSpec,
};
use crate::legendrian::{
    build_jet1_zero_section, build_legendrian_model, check_legendrian_nondegeneracy, point_target_transfer,
    sample_locus_points, verify_legendrian_identities, verify_zero_section,
};
use crate::report::{error_class, CheckResult, Status, VerificationReport, SCHEMA_VERSION};

pub const DEFAULT_POINTS: usize = 5;

/// Resolved run options: flags over file options over defaults.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub points: usize,
    pub truncation: usize,
    pub sign_convention: SignConvention,
    pub seed: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            points: DEFAULT_POINTS,
            truncation: DEFAULT_TRUNCATION,
            sign_convention: SignConvention::Minus,
            seed: 0,
        }
    }
}

impl RunOptions {
    pub fn resolve(
        spec: &InstanceSpecFile,
        points: Option<usize>,
        truncation: Option<usize>,
        sign_convention: Option<SignConvention>,
        seed: u64,
    ) -> Self {
        let d = RunOptions::default();
        RunOptions {
            points: points.or(spec.options.points).unwrap_or(d.points),
            truncation: truncation.or(spec.options.truncation).unwrap_or(d.truncation),
            sign_convention: sign_convention
                .or(spec.options.sign_convention)
                .unwrap_or(d.sign_convention),
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

/// Everything one run produces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PipelineReport {
    pub schema_version: u32,
    pub kind: String,
    pub status: Status,
    pub seed: u64,
    pub truncation: usize,
    pub sign_convention: String,
    pub points: Vec<String>,
    pub summary: Summary,
    pub checks: Vec<CheckResult>,
}

impl PipelineReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_human(&self) -> String {
        let mut s = String::new();
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(
            s,
            "{}: {verdict} ({} passed, {} failed, {} skipped)",
            self.kind, self.summary.passed, self.summary.failed, self.summary.skipped
        );
        let width = self.checks.iter().map(|c| c.group.len()).max().unwrap_or(5).max(5);
        let _ = writeln!(s, "{:<7} {:<width$} CHECK", "STATUS", "GROUP");
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped => "skip",
            };
            let _ = writeln!(s, "{status:<7} {:<width$} {}", c.group, c.name);
            if c.status != Status::Pass {
                if let Some(w) = &c.witness {
                    let class = c.error_class.as_deref().map(|e| format!("[{e}] ")).unwrap_or_default();
                    let _ = writeln!(s, "{:<7} {:<width$}   {class}{w}", "", "");
                }
            }
        }
        s
    }
}

fn fail(report: &mut VerificationReport, group: &str, name: &str, e: &crate::Error) {
    report.fail_with_error(group, name, error_class(e), e.to_string());
}

/// Points from the file, or sampled from the classical locus of `p`.
fn choose_points(spec: &InstanceSpecFile, p: &CdgaPresentation, opts: &RunOptions) -> Vec<PointAssignment> {
    if !spec.points.is_empty() {
        return spec.points.clone();
    }
    let mut rng = StdRng::seed_from_u64(opts.seed);
    sample_locus_points(p, opts.points, &mut rng)
}

fn sequence_of(dr: &DeRham, form: &DeRhamForm, truncation: usize) -> Result<FormSequence> {
    let (weight, degree) = (dr.weight(form).unwrap_or(0), dr.degree(form).unwrap_or(0));
    FormSequence::new(dr, weight, degree, vec![form.clone()], truncation)
}

/// Run every check for the kind, in a fixed order.
pub fn run_pipeline(spec: &InstanceSpecFile, opts: &RunOptions) -> PipelineReport {
    let mut report = VerificationReport::new();
    let mut points = Vec::new();
    match spec.kind {
        Kind::SymplecticDarboux | Kind::ContactDarboux => darboux(spec, opts, &mut report, &mut points),
        Kind::Lagrangian | Kind::Legendrian => relative(spec, opts, &mut report, &mut points),
        Kind::Jet1ZeroSection => zero_section(spec, opts, &mut report, &mut points),
        Kind::PointTarget => point_target(spec, opts, &mut report, &mut points),
    }
    let count = |s: Status| report.checks.iter().filter(|c| c.status == s).count();
    PipelineReport {
        schema_version: SCHEMA_VERSION,
        kind: spec.kind.to_string(),
        status: if report.passed() { Status::Pass } else { Status::Fail },
        seed: opts.seed,
        truncation: opts.truncation,
        sign_convention: sign_name(opts.sign_convention).to_string(),
        points: points.iter().map(|p| p.to_string()).collect(),
        summary: Summary {
            passed: count(Status::Pass),
            failed: count(Status::Fail),
            skipped: count(Status::Skipped),
        },
        checks: report.checks,
    }
}

fn target_spec(spec: &InstanceSpecFile) -> Result<DarbouxSpec> {
    DarbouxSpec::new(spec.target_shape()?, spec.hamiltonian.clone().unwrap_or_default())
}

fn darboux(
    spec: &InstanceSpecFile,
    opts: &RunOptions,
    report: &mut VerificationReport,
    points: &mut Vec<PointAssignment>,
) {
    let contact = spec.kind == Kind::ContactDarboux;
    let ds = match target_spec(spec) {
        Ok(s) => s,
        Err(e) => return fail(report, "build", "Darboux specification", &e),
    };
    report.extend(check_master_equation(&ds));
    let built = if contact {
        build_contact_darboux(&ds)
    } else {
        build_symplectic_darboux(&ds)
    };
    let data = match built {
        Ok(d) => d,
        Err(e) => return fail(report, "build", "build Darboux model", &e),
    };
    report.extend(data.presentation.check_d_squared());
    if contact {
        report.extend(verify_contact_identities(&data));
        match kernel_generators(&data) {
            Ok(fields) => report.check(
                "kernel",
                format!("{} kernel fields annihilate alpha0", fields.len()),
                || None,
            ),
            Err(e) => fail(report, "kernel", "kernel fields annihilate alpha0", &e),
        }
    } else {
        report.extend(verify_symplectic_identities(&data));
    }
    match sequence_of(&data.dr, &data.two_form(), opts.truncation) {
        Ok(seq) => report.extend(check_closed_sequence(&data.dr, &seq)),
        Err(e) => fail(report, "closed-sequence", "two-form sequence", &e),
    }
    *points = choose_points(spec, &data.presentation, opts);
    let pairing = if contact {
        check_nondegenerate_on_kernel(&data, points)
    } else {
        symplectic_pairing(&data, points)
    };
    match pairing {
        Ok(r) => report.extend(r),
        Err(e) => fail(report, "pairing", "pairing at points", &e),
    }
}

fn symplectic_pairing(data: &DarbouxData, points: &[PointAssignment]) -> Result<VerificationReport> {
    let fields: Vec<VectorField> = (0..data.algebra().len()).map(VectorField::basis).collect();
    crate::darboux::check_pairing_at_points(&data.dr, &data.two_form(), &fields, points, "pairing")
}

fn relative(
    spec: &InstanceSpecFile,
    opts: &RunOptions,
    report: &mut VerificationReport,
    points: &mut Vec<PointAssignment>,
) {
    let ls = match target_spec(spec)
        .and_then(|t| LagrangianDarbouxSpec::new(t, spec.n.clone(), spec.superpotential.clone().unwrap_or_default()))
    {
        Ok(s) => s,
        Err(e) => return fail(report, "build", "source specification", &e),
    };
    report.extend(check_master_equation(&ls.target));
    report.extend(check_relative_master_equation(&ls));
    if spec.kind == Kind::Lagrangian {
        let data = match build_lagrangian_model(&ls) {
            Ok(d) => d,
            Err(e) => return fail(report, "build", "build Lagrangian model", &e),
        };
        report.extend(verify_lagrangian_identities(&data));
        // h is a path from beta_*(omega) to zero
        let pulled = data.push(&data.target.omega0);
        match (
            sequence_of(&data.source_dr, &pulled, opts.truncation),
            sequence_of(&data.source_dr, &DeRhamForm::zero(), opts.truncation),
        ) {
            (Ok(w), Ok(zero)) => report.extend(check_path_equivalence(
                &data.source_dr,
                &w,
                &zero,
                std::slice::from_ref(&data.h0),
                opts.sign_convention,
            )),
            (Err(e), _) | (_, Err(e)) => fail(report, "path", "isotropic path", &e),
        }
        return;
    }
    let data = match build_legendrian_model(&ls) {
        Ok(d) => d,
        Err(e) => return fail(report, "build", "build Legendrian model", &e),
    };
    report.extend(verify_legendrian_identities(&data));
    // d_dR Λ is a path from beta_*(d_dR alpha0) to zero
    let m = &data.model;
    let pulled = m.push(&m.target.dr.de_rham_d(data.alpha0()));
    match (
        sequence_of(&m.source_dr, &pulled, opts.truncation),
        sequence_of(&m.source_dr, &DeRhamForm::zero(), opts.truncation),
    ) {
        (Ok(w), Ok(zero)) => report.extend(check_path_equivalence(
            &m.source_dr,
            &w,
            &zero,
            &[m.source_dr.de_rham_d(&m.lambda)],
            opts.sign_convention,
        )),
        (Err(e), _) | (_, Err(e)) => fail(report, "path", "isotropic path", &e),
    }
    *points = choose_points(spec, &m.source, opts);
    match check_legendrian_nondegeneracy(&data, points) {
        Ok(r) => report.extend(r),
        Err(e) => fail(report, "non-degeneracy", "non-degeneracy", &e),
    }
}

fn zero_section(
    spec: &InstanceSpecFile,
    opts: &RunOptions,
    report: &mut VerificationReport,
    points: &mut Vec<PointAssignment>,
) {
    let m0 = spec.m.first().copied().unwrap_or(0);
    let data = match build_jet1_zero_section(m0, spec.shift) {
        Ok(d) => d,
        Err(e) => return fail(report, "build", "build zero section", &e),
    };
    *points = choose_points(spec, &data.source, opts);
    match verify_zero_section(&data, points) {
        Ok(r) => report.extend(r),
        Err(e) => fail(report, "zero-section", "zero section", &e),
    }
}

fn point_target(
    spec: &InstanceSpecFile,
    opts: &RunOptions,
    report: &mut VerificationReport,
    points: &mut Vec<PointAssignment>,
) {
    let source = match spec.point_target_source() {
        Ok(s) => s,
        Err(e) => return fail(report, "build", "source presentation", &e),
    };
    report.extend(source.check_d_squared());
    let dr = match DeRham::new(source.clone()) {
        Ok(dr) => dr,
        Err(e) => return fail(report, "build", "source de Rham algebra", &e),
    };
    let lambda = dr.form(spec.lambda.clone().unwrap_or_default());
    *points = choose_points(spec, &source, opts);
    match point_target_transfer(&source, &lambda, spec.shift, points) {
        Ok(t) => report.extend(t.report),
        Err(e) => fail(report, "point-target", "point-target transfer", &e),
    }
}
