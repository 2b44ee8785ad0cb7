mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use common::*;
use darboux_forge::cdga::{CdgaMorphism, CdgaPresentation};
use darboux_forge::cli::{parse_spec, Kind};
use darboux_forge::darboux::{check_master_equation, darboux_presentation};
use darboux_forge::derham::{DeRham, DeRhamForm, VectorField};
use darboux_forge::graded_algebra::{q, AlgElement, GradedAlgebra, Q};
use darboux_forge::homcheck::{ChainComplexQ, ComplexMap, QMatrix};
use darboux_forge::legendrian::{build_legendrian_model, chi_rho_blocks};
use darboux_forge::Error;
use num_traits::Zero;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn homogeneous(rng: &mut StdRng, alg: &GradedAlgebra) -> (AlgElement, i32) {
    let all: Vec<usize> = (0..alg.len()).collect();
    let deg = -rng.gen_range(0..=4);
    (random_element(rng, alg, &all, deg, 4), deg)
}

fn koszul(a: i32, b: i32) -> Q {
    if a % 2 != 0 && b % 2 != 0 {
        q(-1)
    } else {
        q(1)
    }
}

proptest! {
    #![proptest_config(cfg(96))]

    #[test]
    fn product_matches_word_oracle(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let p = random_presentation(&mut rng);
        let alg = p.algebra();
        let (a, _) = homogeneous(&mut rng, alg);
        let (b, _) = homogeneous(&mut rng, alg);
        prop_assert_eq!(words(&alg.mul(&a, &b)), mul(alg, &words(&a), &words(&b)));
    }

    #[test]
    fn graded_commutative_and_associative(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let p = random_presentation(&mut rng);
        let alg = p.algebra();
        let (a, da) = homogeneous(&mut rng, alg);
        let (b, db) = homogeneous(&mut rng, alg);
        let (c, _) = homogeneous(&mut rng, alg);
        prop_assert_eq!(alg.mul(&a, &b), alg.mul(&b, &a).scale(&koszul(da, db)));
        prop_assert_eq!(alg.mul(&alg.mul(&a, &b), &c), alg.mul(&a, &alg.mul(&b, &c)));
        prop_assert_eq!(alg.mul(&AlgElement::one(), &a), a.clone());
    }

    #[test]
    fn differential_is_a_derivation(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let p = random_presentation(&mut rng);
        let alg = p.algebra();
        let (a, da) = homogeneous(&mut rng, alg);
        let (b, _) = homogeneous(&mut rng, alg);
        let lhs = p.apply_d(&alg.mul(&a, &b));
        let rhs = &alg.mul(&p.apply_d(&a), &b) + &alg.mul(&a, &p.apply_d(&b)).scale(&koszul(da, 1));
        prop_assert_eq!(&lhs, &rhs);
        let images: Vec<Words> = p.d_images().iter().map(words).collect();
        prop_assert_eq!(words(&p.apply_d(&a)), derive(alg, &images, true, &words(&a)));
    }

    #[test]
    fn partials_are_derivations(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let p = random_presentation(&mut rng);
        let alg = p.algebra();
        let (a, da) = homogeneous(&mut rng, alg);
        let (b, db) = homogeneous(&mut rng, alg);
        let g = rng.gen_range(0..alg.len());
        let dg = alg.generator(g).degree;
        let ab = alg.mul(&a, &b);
        let left = &alg.mul(&alg.partial(&a, g), &b) + &alg.mul(&a, &alg.partial(&b, g)).scale(&koszul(da, dg));
        prop_assert_eq!(alg.partial(&ab, g), left);
        let right = &alg.mul(&alg.partial_right(&a, g), &b).scale(&koszul(db, dg)) + &alg.mul(&a, &alg.partial_right(&b, g));
        prop_assert_eq!(alg.partial_right(&ab, g), right);
    }

    #[test]
    fn de_rham_anticommutes_with_internal(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let p = random_presentation(&mut rng);
        let dr = DeRham::new(p.clone()).unwrap();
        let fa = dr.form_algebra();
        let all: Vec<usize> = (0..fa.len()).collect();
        let deg = -rng.gen_range(-2..=3);
        let f = dr.form(random_element(&mut rng, fa, &all, deg, 4));
        let a = dr.de_rham_d(&dr.internal_d(&f));
        let b = dr.internal_d(&dr.de_rham_d(&f));
        prop_assert_eq!(a.as_element(), &-b.as_element());
        prop_assert!(dr.de_rham_d(&dr.de_rham_d(&f)).is_zero());
    }

    #[test]
    fn contraction_of_exact_forms(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let p = random_presentation(&mut rng);
        let dr = DeRham::new(p.clone()).unwrap();
        let alg = p.algebra();
        let (f, df_deg) = homogeneous(&mut rng, alg);
        let g = rng.gen_range(0..alg.len());
        let dg = alg.generator(g).degree;
        let c = small_q(&mut rng);
        let v = VectorField::basis(g).with_term(g, AlgElement::constant(c.clone() - q(1)));
        let df = dr.de_rham_d(&dr.function(&f));
        if df.is_zero() {
            return Ok(());
        }
        let lhs = dr.contract(&v, &df).unwrap();
        // d_dR f = Σ d_dR g·∂f/∂g with d_dR g of total degree |g|-1
        let sign = koszul(dg - 1, df_deg - dg);
        prop_assert_eq!(lhs, dr.function(&alg.partial(&f, g).scale(&(c * sign))));
    }

    #[test]
    fn contraction_is_a_derivation(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let p = random_presentation(&mut rng);
        let dr = DeRham::new(p.clone()).unwrap();
        let alg = p.algebra();
        let one_form = |rng: &mut StdRng| -> DeRhamForm {
            let (h, _) = homogeneous(rng, alg);
            dr.wedge(&dr.function(&h), &dr.dg(rng.gen_range(0..alg.len())))
        };
        let a = one_form(&mut rng);
        let b = one_form(&mut rng);
        let g = rng.gen_range(0..alg.len());
        let v = VectorField::basis(g);
        // right contraction: ι(a∧b) = ±ι(a)∧b + a∧ι(b), sign from b passing ∂g
        let fa = dr.form_algebra();
        let Some(db) = fa.degree(b.as_element()) else { return Ok(()) };
        let dv = alg.generator(g).degree - 1;
        let lhs = dr.contract(&v, &dr.wedge(&a, &b)).unwrap();
        let ia = dr.wedge(&dr.contract(&v, &a).unwrap(), &b).scale(&koszul(db, dv));
        let ib = dr.wedge(&a, &dr.contract(&v, &b).unwrap());
        prop_assert_eq!(lhs.as_element(), &(ia.as_element() + ib.as_element()));
    }

    #[test]
    fn morphism_composition(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let a = random_presentation(&mut rng);
        let random_map = |rng: &mut StdRng, src: &Arc<CdgaPresentation>, tgt: &Arc<CdgaPresentation>| {
            let ta = tgt.algebra();
            let all: Vec<usize> = (0..ta.len()).collect();
            let images: BTreeMap<usize, AlgElement> = (0..src.algebra().len())
                .map(|g| (g, random_element(rng, ta, &all, src.algebra().generator(g).degree, 2)))
                .collect();
            CdgaMorphism::new(src.clone(), tgt.clone(), images).unwrap()
        };
        let b = random_presentation(&mut rng);
        let c = random_presentation(&mut rng);
        let f = random_map(&mut rng, &a, &b);
        let g = random_map(&mut rng, &b, &c);
        let fg = f.then(&g).unwrap();
        let (e, _) = homogeneous(&mut rng, a.algebra());
        prop_assert_eq!(fg.apply(&e), g.apply(&f.apply(&e)));
        let (x, _) = homogeneous(&mut rng, a.algebra());
        prop_assert_eq!(f.apply(&a.algebra().mul(&e, &x)), b.algebra().mul(&f.apply(&e), &f.apply(&x)));
    }
}

proptest! {
    #![proptest_config(cfg(48))]

    #[test]
    fn master_equation_gives_square_zero(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let spec = random_contact_spec(&mut rng);
        let p = darboux_presentation(&spec).unwrap();
        let oracle_zero = d_squared_on_generators(&p).iter().all(|w| w.is_empty());
        if check_master_equation(&spec).passed() {
            prop_assert!(oracle_zero);
            let (e, _) = homogeneous(&mut rng, p.algebra());
            prop_assert!(p.apply_d(&p.apply_d(&e)).is_zero());
        }
        prop_assert_eq!(oracle_zero, p.check_d_squared().passed());
    }

    #[test]
    fn chi_blocks_ignore_superpotential(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let pair = if rng.gen_bool(0.5) {
            [random_legendrian_k1(&mut rng), random_legendrian_k1(&mut rng)]
        } else {
            [random_legendrian_k3(&mut rng), random_legendrian_k3(&mut rng)]
        };
        let built: Vec<_> = pair.iter().filter_map(|s| build_legendrian_model(s).ok()).collect();
        if built.len() < 2 {
            return Ok(());
        }
        let k = built[0].k();
        for n in k - 4..=4 {
            match (chi_rho_blocks(&built[0], n), chi_rho_blocks(&built[1], n)) {
                (Ok(a), Ok(b)) => {
                    prop_assert_eq!(&a.y_block, &b.y_block);
                    prop_assert_eq!(&a.uv_block, &b.uv_block);
                    prop_assert_eq!(&a.uv_rows, &b.uv_rows);
                    prop_assert_eq!(&a.x_rows, &b.x_rows);
                }
                (Err(Error::DegreeOutOfRange(_)), Err(Error::DegreeOutOfRange(_))) => {}
                (a, b) => prop_assert!(false, "degree {}: {:?} vs {:?}", n, a.err(), b.err()),
            }
        }
    }

    #[test]
    fn spec_files_round_trip(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let spec = random_contact_spec(&mut rng);
        let alg = spec.shape.algebra();
        let m: Vec<String> = spec.shape.m.iter().map(|c| c.to_string()).collect();
        let mut text = format!("kind = contact-darboux\nshift = {}\nm = {}\n", spec.shape.k, m.join(" "));
        for g in alg.generators() {
            text.push_str(&format!("generators = {}:{}\n", g.name, g.degree));
        }
        text.push_str(&format!("H = {}\n", alg.format(&spec.h)));
        let parsed = parse_spec(&text).unwrap();
        prop_assert_eq!(parsed.kind, Kind::ContactDarboux);
        prop_assert_eq!(parsed.hamiltonian.as_ref(), Some(&spec.h));
        let again = parse_spec(&parsed.serialize().unwrap()).unwrap();
        prop_assert_eq!(&again, &parsed);
        prop_assert_eq!(again.serialize().unwrap(), parsed.serialize().unwrap());
    }
}

// ---------------------------------------------------------------------------
// linear algebra

fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> QMatrix {
    let mut m = QMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            if rng.gen_bool(0.4) {
                m.set(r, c, small_q(rng));
            }
        }
    }
    m
}

/// Random invertible matrix and its inverse, as products of elementary moves.
fn random_gl(rng: &mut StdRng, n: usize) -> (QMatrix, QMatrix) {
    let mut g = QMatrix::identity(n);
    let mut inv = QMatrix::identity(n);
    if n < 2 {
        let s = small_q(rng);
        return (g.scale(&s), inv.scale(&(Q::from_integer(1.into()) / s)));
    }
    for _ in 0..3 * n {
        let r = rng.gen_range(0..n);
        let c = (r + rng.gen_range(1..n)) % n;
        let t = small_q(rng);
        let mut e = QMatrix::identity(n);
        e.set(r, c, t.clone());
        let mut e_inv = QMatrix::identity(n);
        e_inv.set(r, c, -t);
        g = e.mul(&g).unwrap();
        inv = inv.mul(&e_inv).unwrap();
    }
    (g, inv)
}

/// Standard complex with prescribed ranks, conjugated by random bases, plus
/// the map from the standard one.
fn random_complex(rng: &mut StdRng) -> (ChainComplexQ, ChainComplexQ, ComplexMap, BTreeMap<i32, usize>) {
    let lo = -rng.gen_range(0..3);
    let len = rng.gen_range(1..=4);
    let ranks: Vec<usize> = (0..len).map(|_| rng.gen_range(0..=2)).collect();
    let homology: Vec<usize> = (0..=len).map(|_| rng.gen_range(0..=2)).collect();
    let mut dims = BTreeMap::new();
    let mut expected = BTreeMap::new();
    for i in 0..=len {
        let inc = if i > 0 { ranks[i - 1] } else { 0 };
        let out = if i < len { ranks[i] } else { 0 };
        dims.insert(lo + i as i32, inc + out + homology[i]);
        expected.insert(lo + i as i32, homology[i]);
    }
    // basis of degree i: [image of d_{i-1} | complement mapped by d_i | homology]
    let mut std_d = BTreeMap::new();
    for i in 0..len {
        let (a, b) = (lo + i as i32, lo + i as i32 + 1);
        let mut m = QMatrix::zeros(dims[&b], dims[&a]);
        let inc = if i > 0 { ranks[i - 1] } else { 0 };
        for t in 0..ranks[i] {
            m.set(t, inc + t, q(1));
        }
        std_d.insert(a, m);
    }
    let standard = ChainComplexQ::new(dims.clone(), std_d.clone()).unwrap();
    let bases: BTreeMap<i32, (QMatrix, QMatrix)> = dims.iter().map(|(&i, &n)| (i, random_gl(rng, n))).collect();
    let diffs = std_d
        .iter()
        .map(|(&i, d)| (i, bases[&(i + 1)].0.mul(d).unwrap().mul(&bases[&i].1).unwrap()))
        .collect();
    let twisted = ChainComplexQ::new(dims, diffs).unwrap();
    let maps = bases.iter().map(|(&i, (g, _))| (i, g.clone())).collect();
    let iso = ComplexMap::new(standard.clone(), twisted.clone(), maps).unwrap();
    (standard, twisted, iso, expected)
}

fn nonzero(mut ranks: BTreeMap<i32, usize>) -> BTreeMap<i32, usize> {
    ranks.retain(|_, h| *h > 0);
    ranks
}

proptest! {
    #![proptest_config(cfg(128))]

    #[test]
    fn rank_matches_smith_form(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (r, c) = (rng.gen_range(0..6), rng.gen_range(0..6));
        let m = random_matrix(&mut rng, r, c);
        prop_assert_eq!(m.rank(), snf_rank(&m));
        prop_assert_eq!(m.transpose().rank(), m.rank());
        for v in m.kernel() {
            prop_assert!(m.apply(&v).iter().all(Zero::is_zero));
        }
        prop_assert_eq!(m.kernel().len(), c - m.rank());
    }

    #[test]
    fn cohomology_is_basis_independent(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (standard, twisted, iso, expected) = random_complex(&mut rng);
        let expected = nonzero(expected);
        prop_assert_eq!(&nonzero(standard.cohomology_ranks()), &expected);
        prop_assert_eq!(&nonzero(twisted.cohomology_ranks()), &expected);
        prop_assert_eq!(&nonzero(snf_cohomology(&twisted)), &expected);
        let euler: i64 = twisted.dims().iter().map(|(&i, &n)| if i % 2 == 0 { n as i64 } else { -(n as i64) }).sum();
        prop_assert_eq!(twisted.euler_characteristic(), euler);
        let h_euler: i64 = expected.iter().map(|(&i, &n)| if i % 2 == 0 { n as i64 } else { -(n as i64) }).sum();
        prop_assert_eq!(euler, h_euler);
        prop_assert!(iso.is_strict_iso());
        prop_assert!(iso.is_quasi_iso().holds);
        prop_assert!(iso.cone().is_acyclic());
        prop_assert!(ComplexMap::identity(&twisted).is_quasi_iso().holds);
    }

    #[test]
    fn zero_map_detects_cohomology(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (_, twisted, _, expected) = random_complex(&mut rng);
        let expected = nonzero(expected);
        let maps = twisted.dims().iter().map(|(&i, &n)| (i, QMatrix::zeros(n, n))).collect();
        let zero = ComplexMap::new(twisted.clone(), twisted.clone(), maps).unwrap();
        let nontrivial = expected.values().any(|&h| h > 0);
        let outcome = zero.is_quasi_iso();
        prop_assert_eq!(outcome.holds, !nontrivial);
        prop_assert_eq!(outcome.witness.is_some(), nontrivial);
        prop_assert_eq!(zero.is_strict_iso(), twisted.dims().values().all(|&n| n == 0));
    }
}
