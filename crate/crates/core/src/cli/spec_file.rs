//! Instance specification files.
//!
//! One `key = value` entry per line, `#` starts a comment:
//!
//! ```text
//! kind = legendrian
//! shift = -1
//! m = 1
//! n = 1 1
//! generators = x1:0 y1_km0:-1 z:-1
//! generators = xt1:0 u1:0 u1_m1:-1 v1_km0:-2 v1_km1:-1
//! H = 0
//! G = u1*v1_km1
//! point = u1=0, xt1=2
//! points = 5
//! ```
//!
//! Generator degrees are always declared and must agree with the generators
//! the kind builds from `shift`, `m` and `n`. Point-target files declare an
//! arbitrary free algebra, its differential as `d(name) = ...` lines and the
//! one-form as `Lambda = u*d(v)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Signed};

use super::expr::{evaluate, parse_expr, Pos};
use crate::cdga::CdgaPresentation;
use crate::darboux::DarbouxShape;
use crate::derham::{DeRham, SignConvention};
use crate::error::{Error, Result};
use crate::graded_algebra::{fmt_q, AlgElement, GradedAlgebra, GradedGenerator, Q};
use crate::homcheck::PointAssignment;
use crate::lagrangian::SourceShape;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Kind {
    SymplecticDarboux,
    ContactDarboux,
    Lagrangian,
    Legendrian,
    Jet1ZeroSection,
    PointTarget,
}

impl Kind {
    pub const ALL: [Kind; 6] = [
        Kind::SymplecticDarboux,
        Kind::ContactDarboux,
        Kind::Lagrangian,
        Kind::Legendrian,
        Kind::Jet1ZeroSection,
        Kind::PointTarget,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::SymplecticDarboux => "symplectic-darboux",
            Kind::ContactDarboux => "contact-darboux",
            Kind::Lagrangian => "lagrangian",
            Kind::Legendrian => "legendrian",
            Kind::Jet1ZeroSection => "jet1-zero-section",
            Kind::PointTarget => "point-target",
        }
    }

    fn keys(self) -> (&'static [&'static str], &'static [&'static str]) {
        // (required, optional) beyond kind/generators/points/options
        match self {
            Kind::SymplecticDarboux | Kind::ContactDarboux => (&["shift", "m", "H"], &[]),
            Kind::Lagrangian | Kind::Legendrian => (&["shift", "m", "n", "H", "G"], &[]),
            Kind::Jet1ZeroSection => (&["shift", "m"], &[]),
            Kind::PointTarget => (&["shift", "Lambda"], &["d"]),
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Kind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown kind `{s}`"))
    }
}

/// Run options a file may carry; command-line flags take precedence.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FileOptions {
    pub points: Option<usize>,
    pub truncation: Option<usize>,
    pub sign_convention: Option<SignConvention>,
}

/// A parsed, fully resolved instance.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceSpecFile {
    pub kind: Kind,
    pub shift: i32,
    pub m: Vec<usize>,
    pub n: Vec<usize>,
    /// Declared generators in file order.
    pub generators: Vec<(String, i32)>,
    /// Over the target algebra.
    pub hamiltonian: Option<AlgElement>,
    /// Over the source algebra.
    pub superpotential: Option<AlgElement>,
    /// Over the form algebra of the point-target source.
    pub lambda: Option<AlgElement>,
    /// Point-target differential, by generator name.
    pub differential: BTreeMap<String, AlgElement>,
    pub points: Vec<PointAssignment>,
    pub options: FileOptions,
}

fn shape_error(msg: impl Into<String>) -> Error {
    Error::ShapeMismatch(msg.into())
}

impl InstanceSpecFile {
    fn contact(&self) -> bool {
        matches!(self.kind, Kind::ContactDarboux | Kind::Legendrian)
    }

    pub fn target_shape(&self) -> Result<DarbouxShape> {
        DarbouxShape::new(self.shift, self.m.clone(), self.contact())
    }

    pub fn source_shape(&self) -> Result<SourceShape> {
        SourceShape::new(self.shift, self.m.clone(), self.n.clone())
    }

    /// Algebra that `H` lives in.
    pub fn target_algebra(&self) -> Result<GradedAlgebra> {
        Ok(self.target_shape()?.algebra())
    }

    /// Algebra that `G` lives in.
    pub fn source_algebra(&self) -> Result<GradedAlgebra> {
        Ok(self.source_shape()?.algebra())
    }

    /// Free algebra on the declared generators, in declaration order.
    pub fn declared_algebra(&self) -> Result<GradedAlgebra> {
        GradedAlgebra::new(
            self.generators
                .iter()
                .map(|(n, d)| GradedGenerator::new(n.clone(), *d))
                .collect(),
        )
    }

    /// Point-target source `B` with its declared differential.
    pub fn point_target_source(&self) -> Result<Arc<CdgaPresentation>> {
        let alg = self.declared_algebra()?;
        let images = self
            .differential
            .iter()
            .map(|(n, e)| Ok((alg.require(n)?, e.clone())))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Arc::new(CdgaPresentation::new(alg, images)?))
    }

    fn jet1_m0(&self) -> Result<usize> {
        match self.m.as_slice() {
            [m0] => Ok(*m0),
            _ => Err(shape_error(format!(
                "the 1-jet zero section takes a single count m, got {:?}",
                self.m
            ))),
        }
    }

    /// Generators the kind builds, which the declaration must match.
    fn expected_generators(&self) -> Result<Vec<GradedGenerator>> {
        Ok(match self.kind {
            Kind::SymplecticDarboux | Kind::ContactDarboux => self.target_shape()?.generators(),
            Kind::Lagrangian | Kind::Legendrian => {
                let mut g = self.target_shape()?.generators();
                g.extend(self.source_shape()?.generators());
                g
            }
            Kind::Jet1ZeroSection => {
                if self.shift >= 0 {
                    return Err(Error::UnsupportedShift(self.shift));
                }
                let m0 = self.jet1_m0()?;
                let mut g: Vec<_> = (1..=m0).map(|j| GradedGenerator::new(format!("x{j}"), 0)).collect();
                g.extend((1..=m0).map(|j| GradedGenerator::new(format!("y{j}"), self.shift)));
                g.push(GradedGenerator::new("z", self.shift));
                g
            }
            Kind::PointTarget => self
                .declared_algebra()?
                .declared_generators()
                .into_iter()
                .cloned()
                .collect(),
        })
    }

    /// Algebra whose degree-0 generators the points assign.
    pub fn point_algebra(&self) -> Result<GradedAlgebra> {
        match self.kind {
            Kind::SymplecticDarboux | Kind::ContactDarboux => self.target_algebra(),
            Kind::Lagrangian | Kind::Legendrian => self.source_algebra(),
            Kind::Jet1ZeroSection => GradedAlgebra::new(
                (1..=self.jet1_m0()?)
                    .map(|j| GradedGenerator::new(format!("x{j}"), 0))
                    .collect(),
            ),
            Kind::PointTarget => self.declared_algebra(),
        }
    }

    /// Canonical text; parsing it back yields an equal spec.
    pub fn serialize(&self) -> Result<String> {
        let mut s = String::new();
        let join = |v: &[usize]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
        let _ = writeln!(s, "kind = {}", self.kind);
        let _ = writeln!(s, "shift = {}", self.shift);
        if !self.m.is_empty() || self.kind != Kind::PointTarget {
            let _ = writeln!(s, "m = {}", join(&self.m));
        }
        if matches!(self.kind, Kind::Lagrangian | Kind::Legendrian) {
            let _ = writeln!(s, "n = {}", join(&self.n));
        }
        let gens: Vec<String> = self.generators.iter().map(|(n, d)| format!("{n}:{d}")).collect();
        let _ = writeln!(s, "generators = {}", gens.join(" "));
        if let Some(h) = &self.hamiltonian {
            let alg = self.target_algebra()?;
            let _ = writeln!(s, "H = {}", render(h, &|p| alg.generator(p).name.clone()));
        }
        if let Some(g) = &self.superpotential {
            let alg = self.source_algebra()?;
            let _ = writeln!(s, "G = {}", render(g, &|p| alg.generator(p).name.clone()));
        }
        if self.kind == Kind::PointTarget {
            let alg = self.declared_algebra()?;
            for (name, e) in &self.differential {
                let _ = writeln!(s, "d({name}) = {}", render(e, &|p| alg.generator(p).name.clone()));
            }
            if let Some(l) = &self.lambda {
                let n = alg.len();
                let name = |p: usize| {
                    if p < n {
                        alg.generator(p).name.clone()
                    } else {
                        format!("d({})", alg.generator(p - n).name)
                    }
                };
                let _ = writeln!(s, "Lambda = {}", render(l, &name));
            }
        }
        for p in &self.points {
            let parts: Vec<String> = p.values.iter().map(|(n, v)| format!("{n}={}", fmt_q(v))).collect();
            let _ = writeln!(s, "point = {}", parts.join(", "));
        }
        if let Some(c) = self.options.points {
            let _ = writeln!(s, "points = {c}");
        }
        if let Some(t) = self.options.truncation {
            let _ = writeln!(s, "truncation = {t}");
        }
        if let Some(c) = self.options.sign_convention {
            let _ = writeln!(s, "sign-convention = {}", sign_name(c));
        }
        Ok(s)
    }
}

pub fn sign_name(c: SignConvention) -> &'static str {
    match c {
        SignConvention::Minus => "minus",
        SignConvention::Plus => "plus",
    }
}

/// Same layout as `GradedAlgebra::format` with caller-chosen names.
fn render(e: &AlgElement, name: &dyn Fn(usize) -> String) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (m, c)) in e.terms().enumerate() {
        let abs = c.abs();
        match (i, c.is_negative()) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push_str(" - "),
            (_, false) => s.push_str(" + "),
        }
        if m.is_one() {
            s.push_str(&fmt_q(&abs));
            continue;
        }
        if !abs.is_one() {
            let _ = write!(s, "{}*", fmt_q(&abs));
        }
        let factors: Vec<String> = m
            .factors()
            .iter()
            .map(|&(p, k)| {
                if k > 1 {
                    format!("{}^{k}", name(p as usize))
                } else {
                    name(p as usize)
                }
            })
            .collect();
        s.push_str(&factors.join("*"));
    }
    s
}

struct Entry {
    key: String,
    key_pos: Pos,
    value: String,
    value_pos: Pos,
}

fn split_lines(text: &str) -> Result<Vec<Entry>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some(eq) = content.find('=') else {
            let col = content.len() - content.trim_start().len() + 1;
            return Err(Error::SyntaxError {
                line,
                column: col,
                message: "expected `key = value`".into(),
            });
        };
        // `point = a=1` splits at the first `=`, which always ends the key
        let key_raw = &content[..eq];
        let key = key_raw.trim().to_string();
        let key_col = key_raw.len() - key_raw.trim_start().len() + 1;
        if key.is_empty() {
            return Err(Error::SyntaxError {
                line,
                column: eq + 1,
                message: "missing key before `=`".into(),
            });
        }
        let rest = &content[eq + 1..];
        let lead = rest.len() - rest.trim_start().len();
        out.push(Entry {
            key,
            key_pos: Pos { line, column: key_col },
            value: rest.trim().to_string(),
            value_pos: Pos {
                line,
                column: eq + 2 + lead,
            },
        });
    }
    Ok(out)
}

fn syntax(p: Pos, msg: impl Into<String>) -> Error {
    Error::SyntaxError {
        line: p.line,
        column: p.column,
        message: msg.into(),
    }
}

/// Whitespace-separated words with their positions.
fn words(value: &str, at: Pos) -> Vec<(String, Pos)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in value.char_indices().chain(std::iter::once((value.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((
                    value[s..i].to_string(),
                    Pos {
                        line: at.line,
                        column: at.column + s,
                    },
                ));
                start = None;
            }
            _ => {}
        }
    }
    out
}

fn parse_int<T: FromStr>(s: &str, p: Pos, what: &str) -> Result<T> {
    s.parse()
        .map_err(|_| syntax(p, format!("expected {what}, found `{s}`")))
}

fn parse_rational(s: &str, p: Pos) -> Result<Q> {
    let bad = || syntax(p, format!("expected a rational number, found `{s}`"));
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num: num_bigint::BigInt = num.parse().map_err(|_| bad())?;
    let den: num_bigint::BigInt = den.parse().map_err(|_| bad())?;
    if den == num_bigint::BigInt::from(0) {
        return Err(syntax(p, "zero denominator"));
    }
    Ok(Q::new(num, den))
}

fn parse_point(value: &str, at: Pos) -> Result<PointAssignment> {
    let inner = value.trim();
    let (inner, offset) = match inner.strip_prefix('(') {
        Some(rest) => (
            rest.strip_suffix(')')
                .ok_or_else(|| syntax(at, "unbalanced parenthesis in point"))?,
            1,
        ),
        None => (inner, 0),
    };
    let mut values = BTreeMap::new();
    let mut col = offset;
    for part in inner.split(',') {
        let here = Pos {
            line: at.line,
            column: at.column + col + (part.len() - part.trim_start().len()),
        };
        col += part.len() + 1;
        if part.trim().is_empty() {
            if inner.trim().is_empty() {
                break;
            }
            return Err(syntax(here, "empty coordinate"));
        }
        let (name, v) = part
            .split_once('=')
            .ok_or_else(|| syntax(here, "expected `name=value`"))?;
        let name = name.trim();
        if values
            .insert(name.to_string(), parse_rational(v.trim(), here)?)
            .is_some()
        {
            return Err(syntax(here, format!("coordinate {name} given twice")));
        }
    }
    Ok(PointAssignment::new(values))
}

fn parse_sign(s: &str, p: Pos) -> Result<SignConvention> {
    match s {
        "minus" => Ok(SignConvention::Minus),
        "plus" => Ok(SignConvention::Plus),
        _ => Err(syntax(p, format!("sign-convention is `minus` or `plus`, found `{s}`"))),
    }
}

fn unknown(name: &str, p: Pos, slot: &str) -> Error {
    Error::UnknownGenerator(format!("{name} in {slot} at {}:{}", p.line, p.column))
}

fn check_degree(alg: &GradedAlgebra, e: &AlgElement, expected: i32, slot: &str, p: Pos) -> Result<()> {
    if alg.is_homogeneous_of(e, expected) {
        return Ok(());
    }
    let found = match alg.degree(e) {
        Some(d) => d.to_string(),
        None => "mixed degrees".into(),
    };
    Err(Error::DegreeMismatch {
        context: format!("{slot} at {}:{}", p.line, p.column),
        expected,
        found,
    })
}

/// Parse an expression over `alg`, rejecting one-form symbols.
fn function_slot(alg: &GradedAlgebra, e: &Entry, slot: &str) -> Result<AlgElement> {
    let expr = parse_expr(&e.value, e.value_pos)?;
    evaluate(
        &expr,
        alg,
        &|n, p| alg.position(n).ok_or_else(|| unknown(n, p, slot)),
        &|_, p| Err(syntax(p, format!("{slot} cannot contain one-form symbols"))),
    )
}

pub fn parse_spec_file(path: &std::path::Path) -> Result<InstanceSpecFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_spec(&text)
}

pub fn parse_spec(text: &str) -> Result<InstanceSpecFile> {
    let entries = split_lines(text)?;
    let end = Pos {
        line: text.lines().count() + 1,
        column: 1,
    };
    let mut single: BTreeMap<&str, &Entry> = BTreeMap::new();
    let mut gens: Vec<&Entry> = Vec::new();
    let mut points: Vec<&Entry> = Vec::new();
    let mut diffs: Vec<(String, Pos, &Entry)> = Vec::new();
    for e in &entries {
        match e.key.as_str() {
            "generators" => gens.push(e),
            "point" => points.push(e),
            k if k.starts_with("d(") && k.ends_with(')') => {
                let name = k[2..k.len() - 1].trim().to_string();
                let at = Pos {
                    line: e.key_pos.line,
                    column: e.key_pos.column + 2,
                };
                diffs.push((name, at, e));
            }
            k @ ("kind" | "shift" | "m" | "n" | "H" | "G" | "Lambda" | "points" | "truncation" | "sign-convention") => {
                if single.insert(k, e).is_some() {
                    return Err(syntax(e.key_pos, format!("`{k}` given twice")));
                }
            }
            k => return Err(syntax(e.key_pos, format!("unknown key `{k}`"))),
        }
    }
    let kind_entry = single.get("kind").ok_or_else(|| syntax(end, "missing `kind`"))?;
    let kind: Kind = kind_entry
        .value
        .parse()
        .map_err(|m: String| syntax(kind_entry.value_pos, m))?;

    let (required, optional) = kind.keys();
    for k in required {
        if !single.contains_key(k) {
            return Err(syntax(end, format!("{kind} needs `{k}`")));
        }
    }
    for (k, e) in &single {
        let general = matches!(*k, "kind" | "points" | "truncation" | "sign-convention");
        if !general && !required.contains(k) && !optional.contains(k) {
            return Err(syntax(e.key_pos, format!("`{k}` is not used by {kind}")));
        }
    }
    if !diffs.is_empty() && !optional.contains(&"d") {
        return Err(syntax(
            diffs[0].2.key_pos,
            format!("differentials are not declared for {kind}"),
        ));
    }
    if gens.is_empty() {
        return Err(syntax(end, "missing `generators`"));
    }

    let shift_e = single["shift"];
    let shift: i32 = parse_int(&shift_e.value, shift_e.value_pos, "an integer shift")?;
    let counts = |key: &str| -> Result<Vec<usize>> {
        match single.get(key) {
            None => Ok(Vec::new()),
            Some(e) => words(&e.value, e.value_pos)
                .iter()
                .map(|(w, p)| parse_int(w, *p, "a count"))
                .collect(),
        }
    };
    let m = counts("m")?;
    let n = counts("n")?;

    let mut generators = Vec::new();
    let mut seen = BTreeSet::new();
    for e in &gens {
        for (w, p) in words(&e.value, e.value_pos) {
            let (name, deg) = w
                .split_once(':')
                .ok_or_else(|| syntax(p, format!("expected `name:degree`, found `{w}`")))?;
            let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(syntax(p, format!("invalid generator name `{name}`")));
            }
            let deg_pos = Pos {
                line: p.line,
                column: p.column + name.len() + 1,
            };
            let deg: i32 = parse_int(deg, deg_pos, "an integer degree")?;
            if deg > 0 {
                return Err(syntax(deg_pos, "generator degrees must be nonpositive"));
            }
            if !seen.insert(name.to_string()) {
                return Err(Error::DuplicateGenerator(format!("{name} at {}:{}", p.line, p.column)));
            }
            generators.push((name.to_string(), deg));
        }
    }

    let mut spec = InstanceSpecFile {
        kind,
        shift,
        m,
        n,
        generators,
        hamiltonian: None,
        superpotential: None,
        lambda: None,
        differential: BTreeMap::new(),
        points: Vec::new(),
        options: FileOptions::default(),
    };

    // declared generators against the kind's own
    let expected = spec.expected_generators()?;
    let declared: BTreeMap<&str, i32> = spec.generators.iter().map(|(n, d)| (n.as_str(), *d)).collect();
    for g in &expected {
        match declared.get(g.name.as_str()) {
            None => {
                return Err(shape_error(format!(
                    "{kind} with these counts has generator {}, which is not declared",
                    g.name
                )))
            }
            Some(&d) if d != g.degree => {
                return Err(Error::DegreeMismatch {
                    context: format!("declared degree of {}", g.name),
                    expected: g.degree,
                    found: d.to_string(),
                })
            }
            _ => {}
        }
    }
    if declared.len() != expected.len() {
        let names: BTreeSet<&str> = expected.iter().map(|g| g.name.as_str()).collect();
        let extra: Vec<&str> = declared.keys().copied().filter(|n| !names.contains(n)).collect();
        return Err(shape_error(format!(
            "{kind} does not use the declared generators {}",
            extra.join(", ")
        )));
    }

    if let Some(e) = single.get("H") {
        let alg = spec.target_algebra()?;
        let h = function_slot(&alg, e, "H")?;
        check_degree(&alg, &h, shift + 1, "H", e.value_pos)?;
        spec.hamiltonian = Some(h);
    }
    if let Some(e) = single.get("G") {
        let alg = spec.source_algebra()?;
        let g = function_slot(&alg, e, "G")?;
        check_degree(&alg, &g, shift, "G", e.value_pos)?;
        spec.superpotential = Some(g);
    }
    if kind == Kind::PointTarget {
        let alg = spec.declared_algebra()?;
        for (name, at, e) in &diffs {
            let pos = alg.position(name).ok_or_else(|| unknown(name, *at, "a differential"))?;
            let img = function_slot(&alg, e, &format!("d({name})"))?;
            check_degree(
                &alg,
                &img,
                alg.generator(pos).degree + 1,
                &format!("d({name})"),
                e.value_pos,
            )?;
            if spec.differential.insert(name.clone(), img).is_some() {
                return Err(syntax(e.key_pos, format!("d({name}) given twice")));
            }
        }
        let e = single["Lambda"];
        let dr = DeRham::new(Arc::new(CdgaPresentation::trivial(alg.clone())))?;
        let n = alg.len();
        let expr = parse_expr(&e.value, e.value_pos)?;
        let lambda = evaluate(
            &expr,
            dr.form_algebra(),
            &|name, p| alg.position(name).ok_or_else(|| unknown(name, p, "Lambda")),
            &|name, p| {
                alg.position(name)
                    .map(|q| q + n)
                    .ok_or_else(|| unknown(name, p, "Lambda"))
            },
        )?;
        let form = dr.form(lambda.clone());
        if !form.is_zero() && !dr.is_bihomogeneous(&form, 1, shift - 1) {
            return Err(Error::DegreeMismatch {
                context: format!("Lambda at {}:{} (weight 1)", e.value_pos.line, e.value_pos.column),
                expected: shift - 1,
                found: match (dr.weight(&form), dr.degree(&form)) {
                    (Some(w), Some(d)) => format!("weight {w}, degree {d}"),
                    _ => "mixed weights or degrees".into(),
                },
            });
        }
        spec.lambda = Some(lambda);
    }

    let point_alg = spec.point_algebra()?;
    for e in &points {
        let p = parse_point(&e.value, e.value_pos)?;
        p.resolve(&point_alg)
            .map_err(|err| Error::InvalidPoint(format!("{err} at {}:{}", e.value_pos.line, e.value_pos.column)))?;
        spec.points.push(p);
    }
    if let Some(e) = single.get("points") {
        spec.options.points = Some(parse_int(&e.value, e.value_pos, "a point count")?);
    }
    if let Some(e) = single.get("truncation") {
        spec.options.truncation = Some(parse_int(&e.value, e.value_pos, "a truncation bound")?);
    }
    if let Some(e) = single.get("sign-convention") {
        spec.options.sign_convention = Some(parse_sign(&e.value, e.value_pos)?);
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_algebra::q;

    const CONTACT: &str = "kind = contact-darboux\nshift = -1\nm = 1\ngenerators = x1:0 y1_km0:-1 z:-1\nH = x1^2\n";

    #[test]
    fn contact_file() {
        let s = parse_spec(CONTACT).unwrap();
        let alg = s.target_algebra().unwrap();
        let x = alg.var_named("x1").unwrap();
        assert_eq!(s.hamiltonian.as_ref().unwrap(), &alg.mul(&x, &x));
        assert_eq!(parse_spec(&s.serialize().unwrap()).unwrap(), s);
        let zero = parse_spec(&CONTACT.replace("x1^2", "0")).unwrap();
        assert!(zero.hamiltonian.unwrap().is_zero());
    }

    #[test]
    fn input_errors() {
        let bad = parse_spec(&CONTACT.replace("x1^2", "y1_km0"));
        assert!(matches!(bad, Err(Error::DegreeMismatch { expected: 0, .. })), "{bad:?}");
        let bad = parse_spec(&CONTACT.replace("x1^2", "x1 +* 2"));
        assert!(
            matches!(bad, Err(Error::SyntaxError { line: 5, column: 9, .. })),
            "{bad:?}"
        );
        let bad = parse_spec(&CONTACT.replace("x1^2", "w"));
        assert!(
            matches!(bad, Err(Error::UnknownGenerator(ref m)) if m.contains("5:5")),
            "{bad:?}"
        );
        let bad = parse_spec(&CONTACT.replace("z:-1", "z:-2"));
        assert!(matches!(bad, Err(Error::DegreeMismatch { .. })), "{bad:?}");
        let bad = parse_spec(&CONTACT.replace(" z:-1", ""));
        assert!(matches!(bad, Err(Error::ShapeMismatch(_))), "{bad:?}");
        let bad = parse_spec(&CONTACT.replace("m = 1", "m = 1\nG = 0"));
        assert!(
            matches!(bad, Err(Error::SyntaxError { line: 4, column: 1, .. })),
            "{bad:?}"
        );
        let bad = parse_spec(&format!("{CONTACT}colour = red\n"));
        assert!(matches!(bad, Err(Error::SyntaxError { line: 6, .. })), "{bad:?}");
        let bad = parse_spec(&CONTACT.replace("shift = -1", "shift = -2"));
        assert!(matches!(bad, Err(Error::UnsupportedShift(-2))), "{bad:?}");
        let bad = parse_spec(&format!("{CONTACT}point = x1=1/0\n"));
        assert!(matches!(bad, Err(Error::SyntaxError { .. })), "{bad:?}");
        let bad = parse_spec(&format!("{CONTACT}point = y1_km0=1\n"));
        assert!(matches!(bad, Err(Error::InvalidPoint(_))), "{bad:?}");
    }

    #[test]
    fn point_target_file() {
        let text = "kind = point-target\nshift = -1\ngenerators = u:0 v:-2 w:-1 r:-1\n\
                    d(r) = 0\nLambda = u*d(v) + 1/2*d(w)*r\npoint = u=3\n";
        let s = parse_spec(text).unwrap();
        assert_eq!(s.points[0].values["u"], q(3));
        let again = parse_spec(&s.serialize().unwrap()).unwrap();
        assert_eq!(again, s);
        let bad = parse_spec(&text.replace("u*d(v)", "u*d(w)"));
        assert!(matches!(bad, Err(Error::DegreeMismatch { .. })), "{bad:?}");
    }
}
