//! Exact linear algebra over ℚ, point evaluation, and finite chain complexes
//! with cohomology and (quasi-)isomorphism queries.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::cdga::CdgaPresentation;
use crate::derham::{DeRham, DeRhamForm};
use crate::error::{Error, Result};
use crate::graded_algebra::{fmt_q, AlgElement, GradedAlgebra, Q};

/// Dense rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(QMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Q {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Q) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Q] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn scale(&self, s: &Q) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn mul(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let v = out.get(r, c) + a * b;
                        out.set(r, c, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Rows scaled to integers, for fraction-free elimination.
    fn integer_rows(&self) -> (Vec<Vec<BigInt>>, Q) {
        let mut scale = Q::one();
        let rows = (0..self.rows)
            .map(|r| {
                let l = self.row(r).iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
                scale *= Q::from_integer(l.clone());
                self.row(r)
                    .iter()
                    .map(|v| (v * Q::from_integer(l.clone())).to_integer())
                    .collect()
            })
            .collect();
        (rows, scale)
    }

    /// Bareiss elimination; returns (rank, determinant of the scaled matrix
    /// when square and full rank, with the sign of row swaps).
    fn bareiss(&self) -> (usize, BigInt, Q) {
        let (mut a, scale) = self.integer_rows();
        let (n, m) = (self.rows, self.cols);
        let mut prev = BigInt::one();
        let mut rank = 0;
        let mut negate = false;
        for col in 0..m {
            if rank == n {
                break;
            }
            let Some(p) = (rank..n).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            if p != rank {
                a.swap(p, rank);
                negate = !negate;
            }
            for r in rank + 1..n {
                for c in col + 1..m {
                    let v = &a[rank][col] * &a[r][c] - &a[r][col] * &a[rank][c];
                    a[r][c] = v / &prev;
                }
                a[r][col] = BigInt::zero();
            }
            prev = a[rank][col].clone();
            rank += 1;
        }
        let det = if n == m && rank == n {
            if negate {
                -prev
            } else {
                prev
            }
        } else {
            BigInt::zero()
        };
        (rank, det, scale)
    }

    pub fn rank(&self) -> usize {
        self.bareiss().0
    }

    pub fn determinant(&self) -> Result<Q> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        if self.rows == 0 {
            return Ok(Q::one());
        }
        let (_, det, scale) = self.bareiss();
        Ok(Q::from_integer(det) / scale)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Basis of the null space via reduced row echelon form.
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        let mut a: Vec<Vec<Q>> = (0..self.rows).map(|r| self.row(r).to_vec()).collect();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            let Some(p) = (row..self.rows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(p, row);
            let inv = Q::one() / a[row][col].clone();
            for v in a[row].iter_mut() {
                *v *= &inv;
            }
            for r in 0..self.rows {
                if r != row && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    let pivot_row = a[row].clone();
                    for (dst, p) in a[r].iter_mut().zip(&pivot_row) {
                        *dst -= p * &f;
                    }
                }
            }
            pivots.push(col);
            row += 1;
            if row == self.rows {
                break;
            }
        }
        let pivot_set: BTreeSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivot_set.contains(c)) {
            let mut v = vec![Q::zero(); self.cols];
            v[free] = Q::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[r][free].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Matrix with the given extra column appended.
    fn with_column(&self, v: &[Q]) -> QMatrix {
        let mut out = QMatrix::zeros(self.rows, self.cols + 1);
        for (r, vr) in v.iter().enumerate().take(self.rows) {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c).clone());
            }
            out.set(r, self.cols, vr.clone());
        }
        out
    }

    /// Place `block` with its top-left corner at `(r0, c0)`.
    pub fn paste(&mut self, r0: usize, c0: usize, block: &QMatrix) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r0 + r, c0 + c, block.get(r, c).clone());
            }
        }
    }

    /// Whether every column has exactly one nonzero entry equal to ±1 and
    /// every row likewise.
    pub fn is_signed_permutation(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let unit = |v: &Q| v.abs().is_one();
        let rows_ok = (0..self.rows).all(|r| {
            let nz: Vec<_> = self.row(r).iter().filter(|v| !v.is_zero()).collect();
            nz.len() == 1 && unit(nz[0])
        });
        let cols_ok = (0..self.cols).all(|c| (0..self.rows).filter(|&r| !self.get(r, c).is_zero()).count() == 1);
        rows_ok && cols_ok
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(r).iter().map(fmt_q).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Rational values for the degree-0 generators, by name. All other
/// generators evaluate to 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PointAssignment {
    pub values: BTreeMap<String, Q>,
}

impl PointAssignment {
    pub fn new(values: impl IntoIterator<Item = (String, Q)>) -> Self {
        PointAssignment {
            values: values.into_iter().collect(),
        }
    }

    /// Values by canonical position; every degree-0 generator must be given.
    pub fn resolve(&self, alg: &GradedAlgebra) -> Result<ResolvedPoint> {
        let mut values = vec![None; alg.len()];
        for (name, v) in &self.values {
            let pos = alg
                .position(name)
                .ok_or_else(|| Error::InvalidPoint(format!("unknown coordinate {name}")))?;
            if alg.generator(pos).degree != 0 {
                return Err(Error::InvalidPoint(format!("{name} is not a degree-0 generator")));
            }
            values[pos] = Some(v.clone());
        }
        for (pos, g) in alg.generators().iter().enumerate() {
            if g.degree == 0 && values[pos].is_none() {
                return Err(Error::InvalidPoint(format!("no value for {}", g.name)));
            }
        }
        Ok(ResolvedPoint { values })
    }

    /// Same coordinates restricted to the degree-0 generators of `alg`.
    pub fn restricted_to(&self, alg: &GradedAlgebra) -> PointAssignment {
        PointAssignment::new(
            self.values
                .iter()
                .filter(|(n, _)| alg.position(n).is_some_and(|p| alg.generator(p).degree == 0))
                .map(|(n, v)| (n.clone(), v.clone())),
        )
    }

    /// Error unless every degree-0 image of the differential vanishes here.
    pub fn check_on_locus(&self, p: &CdgaPresentation) -> Result<()> {
        let r = self.resolve(p.algebra())?;
        for (pos, img) in p.classical_relations() {
            let v = r.eval(img);
            if !v.is_zero() {
                return Err(Error::PointNotOnClassicalLocus {
                    point: self.to_string(),
                    generator: p.algebra().generator(pos).name.clone(),
                    value: fmt_q(&v),
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for PointAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|(n, v)| format!("{n}={}", fmt_q(v))).collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[derive(Clone, Debug)]
pub struct ResolvedPoint {
    values: Vec<Option<Q>>,
}

impl ResolvedPoint {
    pub fn eval(&self, e: &AlgElement) -> Q {
        let mut total = Q::zero();
        'terms: for (m, c) in e.terms() {
            let mut v = c.clone();
            for &(p, exp) in m.factors() {
                match &self.values[p as usize] {
                    Some(x) => v *= num_traits::pow(x.clone(), exp as usize),
                    None => continue 'terms,
                }
            }
            total += v;
        }
        total
    }
}

/// Finite complex of finite-dimensional rational vector spaces; `diffs[i]`
/// maps degree `i` to degree `i+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplexQ {
    dims: BTreeMap<i32, usize>,
    diffs: BTreeMap<i32, QMatrix>,
}

impl ChainComplexQ {
    pub fn new(dims: BTreeMap<i32, usize>, diffs: BTreeMap<i32, QMatrix>) -> Result<Self> {
        let dims: BTreeMap<i32, usize> = dims.into_iter().filter(|&(_, n)| n > 0).collect();
        let c = ChainComplexQ { dims, diffs };
        for (&i, m) in &c.diffs {
            if m.rows() != c.dim(i + 1) || m.cols() != c.dim(i) {
                return Err(Error::DimensionMismatch(format!(
                    "differential in degree {i} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    c.dim(i + 1),
                    c.dim(i)
                )));
            }
        }
        for &i in c.diffs.keys() {
            if !c.d(i + 1).mul(&c.d(i))?.is_zero() {
                return Err(Error::NotAComplex(i));
            }
        }
        Ok(c)
    }

    pub fn zero() -> Self {
        ChainComplexQ {
            dims: BTreeMap::new(),
            diffs: BTreeMap::new(),
        }
    }

    pub fn dim(&self, i: i32) -> usize {
        self.dims.get(&i).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &BTreeMap<i32, usize> {
        &self.dims
    }

    pub fn d(&self, i: i32) -> QMatrix {
        self.diffs
            .get(&i)
            .cloned()
            .unwrap_or_else(|| QMatrix::zeros(self.dim(i + 1), self.dim(i)))
    }

    pub fn degrees(&self) -> Vec<i32> {
        self.dims.keys().copied().collect()
    }

    /// `dim ker D_i - rank D_{i-1}` for each degree carrying a nonzero space.
    pub fn cohomology_ranks(&self) -> BTreeMap<i32, usize> {
        self.dims
            .iter()
            .map(|(&i, &n)| (i, n - self.d(i).rank() - self.d(i - 1).rank()))
            .collect()
    }

    pub fn is_acyclic(&self) -> bool {
        self.cohomology_ranks().values().all(|&r| r == 0)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .map(|(&i, &n)| if i.rem_euclid(2) == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }

    /// A cocycle in degree `i` that is not a coboundary, if one exists.
    pub fn nontrivial_class(&self, i: i32) -> Option<Vec<Q>> {
        let prev = self.d(i - 1);
        let base = prev.rank();
        self.d(i)
            .kernel()
            .into_iter()
            .find(|v| prev.with_column(v).rank() > base)
    }
}

/// Degree-wise linear maps between complexes; `maps[i]` goes from the source
/// in degree `i` to the target in degree `i`.
#[derive(Clone, Debug)]
pub struct ComplexMap {
    pub source: ChainComplexQ,
    pub target: ChainComplexQ,
    maps: BTreeMap<i32, QMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiIsoOutcome {
    pub holds: bool,
    /// Degree and cone coordinates of a nonzero class when `holds` is false.
    pub witness: Option<(i32, Vec<Q>)>,
}

impl ComplexMap {
    pub fn new(source: ChainComplexQ, target: ChainComplexQ, maps: BTreeMap<i32, QMatrix>) -> Result<Self> {
        let f = ComplexMap { source, target, maps };
        for (&i, m) in &f.maps {
            if m.rows() != f.target.dim(i) || m.cols() != f.source.dim(i) {
                return Err(Error::DimensionMismatch(format!("map in degree {i}")));
            }
        }
        let degrees: BTreeSet<i32> = f.source.dims.keys().chain(f.target.dims.keys()).copied().collect();
        for &i in &degrees {
            let lhs = f.target.d(i).mul(&f.map(i))?;
            let rhs = f.map(i + 1).mul(&f.source.d(i))?;
            if lhs != rhs {
                return Err(Error::NotAChainMap(i));
            }
        }
        Ok(f)
    }

    pub fn identity(c: &ChainComplexQ) -> Self {
        let maps = c.dims.iter().map(|(&i, &n)| (i, QMatrix::identity(n))).collect();
        ComplexMap {
            source: c.clone(),
            target: c.clone(),
            maps,
        }
    }

    pub fn map(&self, i: i32) -> QMatrix {
        self.maps
            .get(&i)
            .cloned()
            .unwrap_or_else(|| QMatrix::zeros(self.target.dim(i), self.source.dim(i)))
    }

    /// Cone with `cone^i = target^i ⊕ source^{i+1}` and
    /// `d(t, s) = (d t + f s, -d s)`.
    pub fn cone(&self) -> ChainComplexQ {
        let degrees: BTreeSet<i32> = self
            .target
            .dims
            .keys()
            .copied()
            .chain(self.source.dims.keys().map(|i| i - 1))
            .collect();
        let dim = |i: i32| self.target.dim(i) + self.source.dim(i + 1);
        let mut dims = BTreeMap::new();
        let mut diffs = BTreeMap::new();
        for &i in &degrees {
            dims.insert(i, dim(i));
            let (t0, s0) = (self.target.dim(i), self.source.dim(i + 1));
            let t1 = self.target.dim(i + 1);
            let mut m = QMatrix::zeros(dim(i + 1), dim(i));
            m.paste(0, 0, &self.target.d(i));
            m.paste(0, t0, &self.map(i + 1));
            m.paste(t1, t0, &self.source.d(i + 1).scale(&-Q::one()));
            let _ = s0;
            diffs.insert(i, m);
        }
        ChainComplexQ::new(dims, diffs).expect("cone of a chain map is a complex")
    }

    pub fn is_quasi_iso(&self) -> QuasiIsoOutcome {
        let cone = self.cone();
        for (&i, &r) in &cone.cohomology_ranks() {
            if r > 0 {
                return QuasiIsoOutcome {
                    holds: false,
                    witness: cone.nontrivial_class(i).map(|v| (i, v)),
                };
            }
        }
        QuasiIsoOutcome {
            holds: true,
            witness: None,
        }
    }

    pub fn is_strict_iso(&self) -> bool {
        let degrees: BTreeSet<i32> = self
            .source
            .dims
            .keys()
            .chain(self.target.dims.keys())
            .copied()
            .collect();
        degrees.iter().all(|&i| self.map(i).is_invertible())
    }
}

/// Fiber of a free module with one basis element per generator, as a
/// complex over ℚ. `basis[n]` lists generator positions in degree `n`.
#[derive(Clone, Debug)]
pub struct PointComplex {
    pub complex: ChainComplexQ,
    pub basis: BTreeMap<i32, Vec<usize>>,
}

impl PointComplex {
    /// Degree and index of a generator's basis element.
    pub fn locate(&self, pos: usize) -> Option<(i32, usize)> {
        self.basis
            .iter()
            .find_map(|(&n, b)| b.iter().position(|&p| p == pos).map(|i| (n, i)))
    }

    fn assemble(basis: BTreeMap<i32, Vec<usize>>, entry: impl Fn(usize, usize) -> Q) -> Result<PointComplex> {
        let dims = basis.iter().map(|(&n, b)| (n, b.len())).collect();
        let mut diffs = BTreeMap::new();
        for (&n, cols) in &basis {
            let Some(rows) = basis.get(&(n + 1)) else { continue };
            let mut m = QMatrix::zeros(rows.len(), cols.len());
            for (c, &g) in cols.iter().enumerate() {
                for (r, &h) in rows.iter().enumerate() {
                    m.set(r, c, entry(g, h));
                }
            }
            diffs.insert(n, m);
        }
        Ok(PointComplex {
            complex: ChainComplexQ::new(dims, diffs)?,
            basis,
        })
    }
}

/// `Ω¹[shift]` at a point: `d_dR g` sits in degree `|g| - shift`, with
/// differential `(-1)^shift` times the internal one.
pub fn cotangent_complex(dr: &DeRham, eval: &dyn Fn(&AlgElement) -> Q, shift: i32) -> Result<PointComplex> {
    let alg = dr.base_algebra();
    let mut basis: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (pos, g) in alg.generators().iter().enumerate() {
        basis.entry(g.degree - shift).or_default().push(pos);
    }
    let sign = if shift.rem_euclid(2) == 1 { -Q::one() } else { Q::one() };
    let images: Vec<DeRhamForm> = (0..alg.len()).map(|g| dr.internal_d(&dr.dg(g))).collect();
    PointComplex::assemble(basis, |g, h| {
        sign.clone() * eval(&dr.one_form_coefficient(&images[g], h))
    })
}

/// Tangent fiber: `∂/∂g` in degree `-|g|` with
/// `D(∂/∂g) = (-1)^{|g|} Σ_h ∂_g(d h) ∂/∂h`, the sign for which contraction
/// into the cotangent complex is a chain map.
pub fn tangent_complex(p: &CdgaPresentation, eval: &dyn Fn(&AlgElement) -> Q) -> Result<PointComplex> {
    let alg = p.algebra();
    let mut basis: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (pos, g) in alg.generators().iter().enumerate() {
        basis.entry(-g.degree).or_default().push(pos);
    }
    PointComplex::assemble(basis, |g, h| {
        let v = eval(&alg.partial(p.d_image(h), g));
        if alg.is_odd(g) {
            -v
        } else {
            v
        }
    })
}

/// Cotangent complex of a presentation at a point of its classical locus.
pub fn cotangent_at_point(p: &CdgaPresentation, point: &PointAssignment) -> Result<PointComplex> {
    point.check_on_locus(p)?;
    let r = point.resolve(p.algebra())?;
    let dr = DeRham::new(Arc::new(p.clone()))?;
    cotangent_complex(&dr, &|e| r.eval(e), 0)
}

/// Tangent complex of a presentation at a point of its classical locus.
pub fn tangent_at_point(p: &CdgaPresentation, point: &PointAssignment) -> Result<PointComplex> {
    point.check_on_locus(p)?;
    let r = point.resolve(p.algebra())?;
    tangent_complex(p, &|e| r.eval(e))
}
