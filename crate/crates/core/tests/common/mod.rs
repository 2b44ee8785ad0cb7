//! Independent oracles and fixture generators shared by the integration tests.
//!
//! The oracles deliberately avoid the library's multiplication and rank code:
//! products are computed on raw generator words sorted by adjacent swaps, and
//! ranks come from an integer Smith normal form.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeMap;
use std::sync::Arc;

use darboux_forge::cdga::CdgaPresentation;
use darboux_forge::darboux::{DarbouxShape, DarbouxSpec};
use darboux_forge::graded_algebra::{q, AlgElement, GradedAlgebra, GradedGenerator, Q};
use darboux_forge::homcheck::{ChainComplexQ, QMatrix};
use darboux_forge::lagrangian::{LegendrianDarbouxSpec, SourceShape};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

// ---------------------------------------------------------------------------
// word algebra

/// Polynomial as a map from sorted generator words to coefficients.
pub type Words = BTreeMap<Vec<usize>, Q>;

/// Sort a word by adjacent swaps, tracking the Koszul sign; `None` when an
/// odd generator repeats.
fn sort_word(alg: &GradedAlgebra, word: &[usize]) -> Option<(bool, Vec<usize>)> {
    let mut w = word.to_vec();
    let mut negative = false;
    for i in 0..w.len() {
        for j in 0..w.len() - 1 - i {
            if w[j] > w[j + 1] {
                if alg.is_odd(w[j]) && alg.is_odd(w[j + 1]) {
                    negative = !negative;
                }
                w.swap(j, j + 1);
            }
        }
    }
    if w.windows(2).any(|p| p[0] == p[1] && alg.is_odd(p[0])) {
        return None;
    }
    Some((negative, w))
}

fn add_word(out: &mut Words, alg: &GradedAlgebra, word: &[usize], c: Q) {
    if c.is_zero() {
        return;
    }
    if let Some((neg, w)) = sort_word(alg, word) {
        let entry = out.entry(w).or_insert_with(Q::zero);
        *entry += if neg { -c } else { c };
    }
}

fn clean(mut w: Words) -> Words {
    w.retain(|_, c| !c.is_zero());
    w
}

/// Library element to words.
pub fn words(e: &AlgElement) -> Words {
    let mut out = Words::new();
    for (m, c) in e.terms() {
        let mut w = Vec::new();
        for &(p, k) in m.factors() {
            w.extend(std::iter::repeat_n(p as usize, k as usize));
        }
        out.insert(w, c.clone());
    }
    out
}

pub fn mul(alg: &GradedAlgebra, a: &Words, b: &Words) -> Words {
    let mut out = Words::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            let w: Vec<usize> = wa.iter().chain(wb).copied().collect();
            add_word(&mut out, alg, &w, ca * cb);
        }
    }
    clean(out)
}

/// Derivation of parity `odd` determined by generator images, expanded term
/// by term on words.
pub fn derive(alg: &GradedAlgebra, images: &[Words], odd: bool, e: &Words) -> Words {
    let mut out = Words::new();
    for (w, c) in e {
        let mut prefix_odd = false;
        for i in 0..w.len() {
            let sign = if odd && prefix_odd { -c.clone() } else { c.clone() };
            for (iw, ic) in &images[w[i]] {
                let word: Vec<usize> = w[..i].iter().chain(iw).chain(&w[i + 1..]).copied().collect();
                add_word(&mut out, alg, &word, &sign * ic);
            }
            prefix_odd ^= alg.is_odd(w[i]);
        }
    }
    clean(out)
}

/// `d²` on each generator of a presentation, by word expansion.
pub fn d_squared_on_generators(p: &CdgaPresentation) -> Vec<Words> {
    let alg = p.algebra();
    let images: Vec<Words> = p.d_images().iter().map(words).collect();
    (0..alg.len()).map(|g| derive(alg, &images, true, &images[g])).collect()
}

// ---------------------------------------------------------------------------
// Smith normal form

fn to_integer_rows(m: &QMatrix) -> Vec<Vec<BigInt>> {
    (0..m.rows())
        .map(|r| {
            let row = m.row(r);
            let l = row.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            row.iter()
                .map(|c| (c * Q::from_integer(l.clone())).to_integer())
                .collect()
        })
        .collect()
}

/// Diagonal of the Smith normal form over the integers, after clearing row
/// denominators (which does not change the rank over the rationals).
pub fn smith_diagonal(m: &QMatrix) -> Vec<BigInt> {
    let mut a = to_integer_rows(m);
    let (rows, cols) = (m.rows(), m.cols());
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero absolute value in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for r in t..rows {
            for c in t..cols {
                if !a[r][c].is_zero() && best.is_none_or(|(br, bc)| a[r][c].abs() < a[br][bc].abs()) {
                    best = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = best else { break };
        a.swap(t, pr);
        for row in a.iter_mut() {
            row.swap(t, pc);
        }
        let mut clean_pivot = true;
        for r in t + 1..rows {
            let f = a[r][t].div_floor(&a[t][t]);
            for c in t..cols {
                let v = &a[t][c] * &f;
                a[r][c] -= v;
            }
            clean_pivot &= a[r][t].is_zero();
        }
        for c in t + 1..cols {
            let f = a[t][c].div_floor(&a[t][t]);
            for r in t..rows {
                let v = &a[r][t] * &f;
                a[r][c] -= v;
            }
            clean_pivot &= a[t][c].is_zero();
        }
        if !clean_pivot {
            continue;
        }
        // divisibility of the rest of the block
        let bad = (t + 1..rows)
            .flat_map(|r| (t + 1..cols).map(move |c| (r, c)))
            .find(|&(r, c)| !(&a[r][c] % &a[t][t]).is_zero());
        if let Some((r, _)) = bad {
            for c in t..cols {
                let v = a[r][c].clone();
                a[t][c] += v;
            }
            continue;
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

pub fn snf_rank(m: &QMatrix) -> usize {
    smith_diagonal(m).len()
}

/// Cohomology dimensions from Smith-normal-form ranks.
pub fn snf_cohomology(c: &ChainComplexQ) -> BTreeMap<i32, usize> {
    c.degrees()
        .into_iter()
        .map(|i| {
            let out = snf_rank(&c.d(i));
            let inc = snf_rank(&c.d(i - 1));
            (i, c.dim(i) - out - inc)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// random elements and fixtures

pub fn small_q<R: Rng>(rng: &mut R) -> Q {
    let choices = [
        q(1),
        q(-1),
        q(2),
        q(-2),
        q(3),
        Q::new(BigInt::from(1), BigInt::from(2)),
        Q::new(BigInt::from(-3), BigInt::from(2)),
    ];
    choices.choose(rng).unwrap().clone()
}

/// Monomials (as generator words) of total degree `degree` in the allowed
/// generators, with at most `max_len` factors.
pub fn monomials(alg: &GradedAlgebra, allowed: &[usize], degree: i32, max_len: usize) -> Vec<Vec<usize>> {
    fn go(
        alg: &GradedAlgebra,
        allowed: &[usize],
        start: usize,
        left: i32,
        len: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if left == 0 {
            out.push(cur.clone());
        }
        if len == 0 {
            return;
        }
        for i in start..allowed.len() {
            let g = allowed[i];
            let d = alg.generator(g).degree;
            if d < left || (d == 0 && left == 0 && cur.len() >= 2) {
                continue;
            }
            if alg.is_odd(g) && cur.last() == Some(&g) {
                continue;
            }
            cur.push(g);
            go(alg, allowed, i, left - d, len - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(alg, allowed, 0, degree, max_len, &mut Vec::new(), &mut out);
    out.sort();
    out.dedup();
    out
}

pub fn word_element(alg: &GradedAlgebra, w: &[usize], c: Q) -> AlgElement {
    w.iter()
        .fold(AlgElement::constant(c), |acc, &g| alg.mul(&acc, &alg.var(g)))
}

/// Random homogeneous element with up to `terms` terms.
pub fn random_element<R: Rng>(
    rng: &mut R,
    alg: &GradedAlgebra,
    allowed: &[usize],
    degree: i32,
    terms: usize,
) -> AlgElement {
    let mons = monomials(alg, allowed, degree, 3);
    let mut out = AlgElement::zero();
    if mons.is_empty() {
        return out;
    }
    for _ in 0..rng.gen_range(1..=terms) {
        let w = mons.choose(rng).unwrap();
        out = &out + &word_element(alg, w, small_q(rng));
    }
    out
}

/// Free algebra with 3 to 5 generators of degrees 0 to -3 (at least one of
/// degree 0) and random differential images; `d²` need not vanish.
pub fn random_presentation<R: Rng>(rng: &mut R) -> Arc<CdgaPresentation> {
    let count = rng.gen_range(3..=5);
    let gens: Vec<GradedGenerator> = (0..count)
        .map(|i| GradedGenerator::new(format!("g{i}"), if i == 0 { 0 } else { -rng.gen_range(0..=3) }))
        .collect();
    let alg = GradedAlgebra::new(gens).unwrap();
    let all: Vec<usize> = (0..alg.len()).collect();
    let mut images = BTreeMap::new();
    for g in 0..alg.len() {
        let d = alg.generator(g).degree;
        if d < 0 && rng.gen_bool(0.8) {
            images.insert(g, random_element(rng, &alg, &all, d + 1, 3));
        }
    }
    Arc::new(CdgaPresentation::new(alg, images).unwrap())
}

/// Random contact shape with `k ∈ {-1, -3, -5}` and counts at most 2, plus a
/// random Hamiltonian at most linear in the `y` variables.
pub fn random_contact_spec<R: Rng>(rng: &mut R) -> DarbouxSpec {
    let k = *[-1, -3, -5].choose(rng).unwrap();
    let top = (-(k + 1) / 2) as usize;
    let m: Vec<usize> = loop {
        let m: Vec<usize> = (0..=top).map(|_| rng.gen_range(0..=2)).collect();
        if m.iter().sum::<usize>() > 0 {
            break m;
        }
    };
    let shape = DarbouxShape::new(k, m, true).unwrap();
    let alg = shape.algebra();
    let xs: Vec<usize> = (0..alg.len())
        .filter(|&p| alg.generator(p).name.starts_with('x'))
        .collect();
    let ys: Vec<usize> = (0..alg.len())
        .filter(|&p| alg.generator(p).name.starts_with('y'))
        .collect();
    let mut h = random_element(rng, &alg, &xs, k + 1, 2);
    for _ in 0..rng.gen_range(1..=2) {
        let y = *ys.choose(rng).unwrap();
        let coeff = random_element(rng, &alg, &xs, k + 1 - alg.generator(y).degree, 2);
        h = &h + &alg.mul(&coeff, &alg.var(y));
    }
    DarbouxSpec::new(shape, h).unwrap()
}

/// Random polynomial in one variable of degree at most `deg`.
fn random_poly<R: Rng>(rng: &mut R, alg: &GradedAlgebra, x: usize, deg: u32) -> AlgElement {
    let mut out = AlgElement::zero();
    for e in 0..=deg {
        if rng.gen_bool(0.7) {
            out = &out + &alg.pow(&alg.var(x), e).scale(&small_q(rng));
        }
    }
    if out.is_zero() {
        AlgElement::one()
    } else {
        out
    }
}

/// Admissible shift -1 Legendrian data with `n = (1, 1)`:
/// `G = a·u⁻¹ + b·v⁻¹` where `a` and `b` share the root `r`, so the classical
/// locus contains the line `x̃ = r`; `H = -a·b` makes the relative equation
/// hold. Every other draw instead uses `a = 0` and a `u⁰`-dependent `b`.
pub fn random_legendrian_k1<R: Rng>(rng: &mut R) -> LegendrianDarbouxSpec {
    let shape = DarbouxShape::new(-1, vec![1], true).unwrap();
    let ta = shape.algebra();
    let sa = SourceShape::new(-1, vec![1], vec![1, 1]).unwrap().algebra();
    let (xt, u0, um1, vm1) = (
        sa.require("xt1").unwrap(),
        sa.require("u1").unwrap(),
        sa.require("u1_m1").unwrap(),
        sa.require("v1_km1").unwrap(),
    );
    let r = q(*[0i64, 1, -1].choose(rng).unwrap());
    let root = &sa.var(xt) - &AlgElement::constant(r);
    if rng.gen_bool(0.5) {
        let a = sa.mul(&root, &random_poly(rng, &sa, xt, 1));
        let b = sa.mul(&root, &random_poly(rng, &sa, xt, 1));
        let g = &sa.mul(&a, &sa.var(um1)) + &sa.mul(&b, &sa.var(vm1));
        // H(x) = -a(x)·b(x)
        let to_target = vec![ta.var(ta.require("x1").unwrap()); 1];
        let ab = sa.mul(&a, &b);
        let mut h = AlgElement::zero();
        for (m, c) in ab.terms() {
            let e = m.exponent(xt);
            h = &h + &ta.pow(&to_target[0], e).scale(&-c.clone());
        }
        let target = DarbouxSpec::new(shape, h).unwrap();
        LegendrianDarbouxSpec::new(target, vec![1, 1], g).unwrap()
    } else {
        let b = &sa.mul(&sa.var(u0), &random_poly(rng, &sa, xt, 1)) + &sa.mul(&root, &random_poly(rng, &sa, u0, 1));
        let g = sa.mul(&b, &sa.var(vm1));
        let target = DarbouxSpec::new(shape, AlgElement::zero()).unwrap();
        LegendrianDarbouxSpec::new(target, vec![1, 1], g).unwrap()
    }
}

/// Random sparse superpotential at shift -3 with `H = 0`; callers filter for
/// the relative equation.
pub fn random_legendrian_k3<R: Rng>(rng: &mut R) -> LegendrianDarbouxSpec {
    let shape = DarbouxShape::new(-3, vec![1, 1], true).unwrap();
    let sa = SourceShape::new(-3, vec![1, 1], vec![1, 1, 1]).unwrap().algebra();
    let all: Vec<usize> = (0..sa.len()).collect();
    let g = random_element(rng, &sa, &all, -3, 3);
    let target = DarbouxSpec::new(shape, AlgElement::zero()).unwrap();
    LegendrianDarbouxSpec::new(target, vec![1, 1, 1], g).unwrap()
}
