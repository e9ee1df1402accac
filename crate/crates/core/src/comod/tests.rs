use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::algmod::Algebra;
use crate::catalog::{catalog_entwining, catalog_matrix, shift, super_flip_example};
use crate::coring::BasedCoring;
use crate::equiv::{roundtrip_ut, t_flat};
use crate::exactla::Matrix;

fn matrix2() -> Arc<Coring> {
    catalog_matrix(2, &Arc::new(Algebra::ground())).unwrap().based.coring.clone()
}

/// `Q^2` with `ρ(p_i) = Σ_j p_j ⊗ E_ji`.
fn row_comodule(c: &Arc<Coring>) -> Comodule {
    let rank = c.rank();
    let rho: Vec<SVec> = (0..2).map(|i| (0..2).map(|j| (j * rank + j * 2 + i, q(1))).collect()).collect();
    Comodule::new(c, Arc::new(ModuleSpace::free_right(c.algebra(), 2)), &rho).unwrap()
}

fn ids(n: usize) -> Vec<SVec> {
    (0..n).map(SVec::unit).collect()
}

fn complex(c: &Arc<Coring>, lo: i64, terms: Vec<Comodule>, deltas: Vec<Vec<SVec>>) -> Arc<ComoduleComplex> {
    Arc::new(ComoduleComplex::new(c.clone(), lo, terms, deltas).unwrap())
}

fn sample(src: &Arc<ComoduleComplex>, tgt: &Arc<ComoduleComplex>, degree: i64, depth: usize, seed: u64) -> ComplexMorphism {
    random_morphism(src, tgt, degree, depth, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[test]
fn regular_and_row_comodules() {
    let c = matrix2();
    assert!(check_comodule(&Comodule::regular(&c).unwrap()).all_pass());
    let p = row_comodule(&c);
    let r = check_comodule(&p);
    assert!(r.all_pass(), "{}", r.to_text());
    assert!(check_comodule(&Comodule::zero(&c)).all_pass());
}

#[test]
fn zero_coaction_fails_counitality() {
    let c = matrix2();
    let m = Comodule::new(&c, Arc::new(ModuleSpace::free_right(c.algebra(), 2)), &[SVec::new(), SVec::new()]).unwrap();
    let r = check_comodule(&m);
    assert!(r.passed("coassociativity"));
    assert!(!r.passed("counitality"));
}

#[test]
fn complexes() {
    let c = matrix2();
    let p = row_comodule(&c);
    assert!(check_complex(&ComoduleComplex::single(p.clone(), 0)).all_pass());
    let good = complex(&c, 0, vec![p.clone(), p.clone(), p.clone()], vec![ids(2), vec![SVec::new(); 2]]);
    assert!(check_complex(&good).all_pass());
    let bad = complex(&c, 0, vec![p.clone(), p.clone(), p.clone()], vec![ids(2), ids(2)]);
    let r = check_complex(&bad);
    assert!(!r.passed("delta_squared_zero"));
    assert!(r.get("delta_squared_zero").unwrap().witness.is_some());
    let proj = vec![SVec::unit(0), SVec::new()];
    let r = check_complex(&complex(&c, 0, vec![p.clone(), p], vec![proj]));
    assert!(!r.passed("delta_colinear"));
}

#[test]
fn identity_is_closed() {
    let c = matrix2();
    let p = row_comodule(&c);
    let x = complex(&c, -1, vec![p.clone(), p.clone(), Comodule::regular(&c).unwrap()], vec![ids(2), vec![SVec::new(); 2]]);
    assert!(dg_differential(&ComplexMorphism::identity(&x, 3)).is_zero());
}

#[test]
fn comodule_maps_are_closed() {
    let c = matrix2();
    let p = Arc::new(ComoduleComplex::single(row_comodule(&c), 0));
    let mut phi = ComplexMorphism::zero(&p, &p, 0, 2);
    phi.comps[0][0] = vec![SVec::single(0, q(3)), SVec::single(1, q(3))];
    assert!(dg_differential(&phi).is_zero());
    phi.comps[0][0] = vec![SVec::unit(0), SVec::new()];
    let d = dg_differential(&phi);
    assert_eq!(d.first_nonzero().map(|w| w.0), Some(1));
}

fn fixtures() -> (Arc<ComoduleComplex>, Arc<ComoduleComplex>, Arc<ComoduleComplex>) {
    let c = matrix2();
    let p = row_comodule(&c);
    let reg = Comodule::regular(&c).unwrap();
    let x = complex(&c, 0, vec![p.clone(), p.clone()], vec![ids(2)]);
    let y = complex(&c, -1, vec![reg.clone(), p.clone(), p.clone()], vec![vec![SVec::new(); 4], vec![SVec::new(); 2]]);
    let z = complex(&c, 0, vec![p.clone(), reg], vec![vec![SVec::new(); 2]]);
    (x, y, z)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn differential_squares_to_zero(seed in any::<u64>(), s in -1i64..=1) {
        let (x, y, _) = fixtures();
        let phi = sample(&x, &y, s, 2, seed);
        prop_assume!(!phi.is_zero());
        prop_assert!(dg_differential(&dg_differential(&phi)).is_zero());
    }

    #[test]
    fn differential_is_a_derivation(seed in any::<u64>(), s in -1i64..=1, t in -1i64..=1) {
        let (x, y, z) = fixtures();
        let phi = sample(&x, &y, s, 2, seed);
        let psi = sample(&y, &z, t, 2, seed.wrapping_add(1));
        let lhs = dg_differential(&dg_compose(&psi, &phi).unwrap());
        let a = dg_compose(&dg_differential(&psi), &phi).unwrap();
        let b = dg_compose(&psi, &dg_differential(&phi)).unwrap();
        let rhs = morphism_axpy(&a, &sign(t), &b);
        prop_assert_eq!(lhs.comps, rhs.comps);
    }

    #[test]
    fn composition_is_associative(seed in any::<u64>()) {
        let (x, y, z) = fixtures();
        let phi = sample(&x, &y, 0, 2, seed);
        let psi = sample(&y, &z, 1, 2, seed ^ 7);
        let chi = sample(&z, &x, -1, 2, seed ^ 11);
        let l = dg_compose(&chi, &dg_compose(&psi, &phi).unwrap()).unwrap();
        let r = dg_compose(&dg_compose(&chi, &psi).unwrap(), &phi).unwrap();
        prop_assert_eq!(l.comps, r.comps);
    }

    #[test]
    fn identity_is_a_unit(seed in any::<u64>()) {
        let (x, y, _) = fixtures();
        let phi = sample(&x, &y, 1, 2, seed);
        prop_assert_eq!(&dg_compose(&ComplexMorphism::identity(&y, 2), &phi).unwrap().comps, &phi.comps);
        prop_assert_eq!(&dg_compose(&phi, &ComplexMorphism::identity(&x, 2)).unwrap().comps, &phi.comps);
    }
}

#[test]
fn random_morphisms_are_generally_not_closed() {
    let (x, y, _) = fixtures();
    let hits = (0..8).filter(|&seed| !dg_differential(&sample(&x, &y, 0, 2, seed)).is_zero()).count();
    assert!(hits >= 6, "{hits}");
}

#[test]
fn strict_maps_compose_componentwise() {
    let (x, _, _) = fixtures();
    let mut f = ComplexMorphism::zero(&x, &x, 0, 1);
    let mut g = f.clone();
    f.comps[0] = vec![vec![SVec::single(0, q(2)), SVec::single(1, q(2))]; 2];
    g.comps[0] = vec![vec![SVec::single(0, q(5)), SVec::single(1, q(5))]; 2];
    let h = dg_compose(&g, &f).unwrap();
    assert_eq!(h.comps[0][0], vec![SVec::single(0, q(10)), SVec::single(1, q(10))]);
    assert!(h.comps[1].iter().flatten().all(SVec::is_zero));
}

#[test]
fn cone_of_zero_is_untwisted() {
    let c = matrix2();
    let p = Arc::new(ComoduleComplex::single(row_comodule(&c), 0));
    let cone = cone(&ComplexMorphism::zero(&p, &p, 0, 1)).unwrap();
    assert!(cone.report.all_pass(), "{}", cone.report.to_text());
    assert_eq!((cone.complex.lo(), cone.complex.hi()), (-1, 0));
    assert_eq!(cone.complex.delta(-1).unwrap(), &[SVec::new(), SVec::new()]);
}

#[test]
fn cone_of_identity_is_acyclic() {
    let c = matrix2();
    let p = Arc::new(ComoduleComplex::single(row_comodule(&c), 0));
    let cone = cone(&ComplexMorphism::identity(&p, 1)).unwrap();
    assert!(cone.report.all_pass(), "{}", cone.report.to_text());
    let d = cone.complex.delta(-1).unwrap();
    let m = Matrix::from_columns(cone.complex.rank(0), d);
    assert_eq!((m.rank(), cone.complex.rank(-1), cone.complex.rank(0)), (2, 2, 2));
}

#[test]
fn cone_errors() {
    let (x, y, _) = fixtures();
    let phi = ComplexMorphism::zero(&x, &y, 1, 1);
    assert_eq!(cone(&phi).unwrap_err(), ComodError::NotDegreeZero(1));
    let c = matrix2();
    let p = Arc::new(ComoduleComplex::single(row_comodule(&c), 0));
    let mut bad = ComplexMorphism::zero(&p, &p, 0, 1);
    bad.comps[0][0] = vec![SVec::unit(0), SVec::new()];
    assert!(matches!(cone(&bad), Err(ComodError::NotClosed(_))));
}

/// `dψ` for a random degree −1 morphism `ψ` concentrated in `k = 0`.
fn boundary(x: &Arc<ComoduleComplex>, seed: u64) -> ComplexMorphism {
    let mut psi = sample(x, x, -1, 2, seed);
    for k in 1..=2 {
        psi.comps[k].iter_mut().flatten().for_each(|v| *v = SVec::new());
    }
    dg_differential(&psi)
}

#[test]
fn cone_of_a_boundary_has_a_twisted_coaction() {
    let c = matrix2();
    let p = row_comodule(&c);
    let x = complex(&c, 0, vec![p.clone(), p], vec![vec![SVec::single(0, q(2)), SVec::single(1, q(2))]]);
    let mut twisted = 0;
    for seed in 0..6 {
        let phi = boundary(&x, seed);
        assert!(dg_differential(&phi).is_zero());
        if phi.comps[1].iter().flatten().any(|v| !v.is_zero()) {
            twisted += 1;
        }
        let cone = cone(&phi).unwrap();
        assert!(cone.report.all_pass(), "seed {seed}: {}", cone.report.to_text());
    }
    assert!(twisted > 0);
}

#[test]
fn cone_rejects_a_second_component_that_breaks_the_coaction() {
    let c = matrix2();
    let p = row_comodule(&c);
    let x = complex(&c, -1, vec![p.clone(), p.clone(), p], vec![vec![SVec::single(0, q(2)), SVec::single(1, q(2))], vec![SVec::new(); 2]]);
    let rejected = (0..6).filter(|s| matches!(cone(&dg_differential(&sample(&x, &x, -1, 2, *s))), Err(ComodError::ConeCoaction(_)))).count();
    assert!(rejected > 0);
}

fn regular_coaction(ent: &crate::catalog::Entwining) -> Vec<SVec> {
    ent.c.comul.clone()
}

#[test]
fn cone_over_entwining_differential() {
    let ent = super_flip_example();
    let data = catalog_entwining(&ent, &SVec::unit(0), 2, &regular_coaction(&ent), 1).unwrap();
    let cx = &data.complex;
    let c = cx.coring().clone();
    let m0 = Arc::new(ComoduleComplex::single(cx.term(0).unwrap().clone(), 0));
    let m1 = Arc::new(ComoduleComplex::single(cx.term(1).unwrap().clone(), 0));
    let mut phi = ComplexMorphism::zero(&m0, &m1, 0, 1);
    phi.comps[0][0] = cx.delta(0).unwrap().to_vec();
    let cone = cone(&phi).unwrap();
    assert!(cone.report.all_pass(), "{}", cone.report.to_text());
    assert!(Arc::ptr_eq(cone.complex.coring(), &c) || **cone.complex.coring() == *c);
}

fn matrix_based() -> BasedCoring {
    catalog_matrix(2, &Arc::new(Algebra::ground())).unwrap().based
}

#[test]
fn matrix_comodule_connection_is_cohesive() {
    let b = matrix_based();
    let c = b.coring.clone();
    let p = ComoduleComplex::single(row_comodule(&c), 0);
    let (z, r) = connection_from_complex(&p, &b.x, true, 3).unwrap();
    assert!(r.all_pass(), "{}", r.to_text());
    assert_eq!(z.components[1][0].len(), 2);
    let (_, r) = connection_from_complex(&p, &SVec::unit(0), false, 3).unwrap();
    assert!(r.all_pass(), "{}", r.to_text());
    assert_eq!(connection_from_complex(&p, &SVec::new(), true, 3).unwrap_err(), ComodError::NotBased);
}

#[test]
fn grouplike_coaction_gives_flat_connection() {
    let a = Arc::new(Algebra::ground());
    let b = catalog_matrix(1, &a).unwrap().based;
    let m = Comodule::regular(&b.coring).unwrap();
    let (z, r) = connection_from_complex(&ComoduleComplex::single(m, 0), &b.x, true, 2).unwrap();
    assert!(r.all_pass());
    assert!(z.components[1][0].iter().all(SVec::is_zero));
}

#[test]
fn assembled_derivative_matches_explicit_formula() {
    let b = matrix_based();
    let c = b.coring.clone();
    let p = row_comodule(&c);
    let x = SVec::unit(0).plus(&SVec::single(1, q(2)));
    let cx = complex(&c, 0, vec![p.clone(), p.clone()], vec![ids(2)]);
    let dmax = 3;
    let (z, r) = connection_from_complex(&cx, &x, false, dmax).unwrap();
    assert!(r.all_pass(), "{}", r.to_text());
    let t = z.cdga.t().clone();
    for l in 0..=1i64 {
        let term = cx.term(l).unwrap();
        let tw = z.tower(l).clone();
        for n in 1..=(dmax as i64 - l - 1) as usize {
            let total = l + n as i64;
            for qq in 0..tw.dim(n) {
                let (h, tup) = tw.tuple(n, qq);
                let cv = t.proj(tup);
                let s = sign(l);
                let mut rhs = SVec::new();
                if l == 0 {
                    let d = tw.tensor_t(0, &cx.apply_delta(0, &SVec::unit(h)), n, &cv);
                    rhs.add(&shift(&d, z.block_offset(total + 1, 1)));
                }
                let mut same = tw.tensor_t(1, &term.rho()[h], n, &cv).scaled(&s);
                for k in 1..=n {
                    let dk = c.delta_k(&t, n, k, &cv);
                    same.axpy(&(sign(k as i64) * &s), &tw.tensor_t(0, &SVec::unit(h), n + 1, &dk));
                }
                let cx_ = t.mul(n, &cv, 1, &x);
                same.axpy(&-sign(l + n as i64), &tw.tensor_t(0, &SVec::unit(h), n + 1, &cx_));
                rhs.add(&shift(&same, z.block_offset(total + 1, l)));
                let lhs = z.module.apply_d(total, &SVec::unit(z.block_offset(total, l) + qq));
                assert_eq!(lhs, rhs, "l = {l}, n = {n}, basis {qq}");
            }
        }
    }
    let _ = t_flat(&c, &x, dmax).unwrap();
}

#[test]
fn roundtrip_through_connections() {
    let b = matrix_based();
    let c = b.coring.clone();
    let p = row_comodule(&c);
    let cx = complex(&c, 0, vec![p.clone(), p], vec![vec![SVec::single(0, q(2)), SVec::single(1, q(2))]]);
    assert!(check_complex(&cx).all_pass());
    let (z, _) = connection_from_complex(&cx, &b.x, true, 3).unwrap();
    let (back, u) = complex_from_connection(&z).unwrap();
    let r = check_complex(&back);
    assert!(r.all_pass(), "{}", r.to_text());
    assert_eq!(back.deltas(), cx.deltas());
    let ut = roundtrip_ut(&b, 3).unwrap();
    assert_eq!(**ut.u.coring(), **u.coring());
    for l in 0..=1 {
        let (orig, new) = (cx.term(l).unwrap(), back.term(l).unwrap());
        let (to, tn) = (orig.tower(1), new.tower(1));
        for h in 0..orig.rank() {
            let mapped = extend_coring(&tn, &ut.phi.f1, &to, &orig.rho()[h]);
            assert_eq!(mapped, new.rho()[h]);
        }
    }
}

/// `(M ⊗ f)(y)` for `y ∈ M ⊗ C`.
fn extend_coring(target: &ModuleTower, f: &[SVec], src: &ModuleTower, y: &SVec) -> SVec {
    let mut out = SVec::new();
    for (qq, c) in y {
        let (h, t) = src.tuple(1, *qq);
        out.axpy(c, &target.tensor_t(0, &SVec::unit(h), 1, &f[t[0]]));
    }
    out
}

#[test]
fn higher_components_are_rejected() {
    let b = matrix_based();
    let c = b.coring.clone();
    let p = row_comodule(&c);
    let cx = complex(&c, 0, vec![p.clone(), p], vec![vec![SVec::new(); 2]]);
    let (z, _) = connection_from_complex(&cx, &b.x, true, 3).unwrap();
    let mut comps = z.components.clone();
    let t2 = z.tower(0).dim(2);
    assert!(t2 > 0);
    comps.push(vec![vec![SVec::new(); 2], vec![SVec::unit(0), SVec::new()]]);
    let z2 = ZConnection::new(z.cdga.clone(), 0, z.spaces.clone(), comps).unwrap();
    assert_eq!(complex_from_connection(&z2).unwrap_err(), ComodError::HigherComponentsPresent(2));
}

#[test]
fn flat_connection_gives_one_comodule() {
    let b = matrix_based();
    let c = b.coring.clone();
    let (z, _) = connection_from_complex(&ComoduleComplex::single(Comodule::regular(&c).unwrap(), 0), &b.x, true, 2).unwrap();
    let (back, _) = complex_from_connection(&z).unwrap();
    assert_eq!((back.lo(), back.hi()), (0, 0));
    assert!(check_complex(&back).all_pass());
}

#[test]
fn entwining_connection_is_integrable() {
    let ent = super_flip_example();
    let data = catalog_entwining(&ent, &SVec::unit(0), 2, &regular_coaction(&ent), 1).unwrap();
    let (_, r) = connection_from_complex(&data.complex, &data.based.x, true, 3).unwrap();
    assert!(r.all_pass(), "{}", r.to_text());
}

#[test]
fn cone_of_exact_nonstrict_morphism() {
    let c = matrix2();
    let p = row_comodule(&c);
    let reg = Comodule::regular(&c).unwrap();
    let m = complex(&c, 0, vec![p.clone(), reg.clone()], vec![vec![SVec::new(); 2]]);
    let n = complex(&c, 0, vec![reg, p], vec![vec![SVec::new(); 4]]);
    for seed in 0..4 {
        let phi = dg_differential(&sample(&m, &n, -1, 2, seed)).truncate(1);
        assert!(phi.comps[1].iter().flatten().any(|v| !v.is_zero()));
        let cone = cone(&phi).unwrap();
        assert!(cone.report.all_pass(), "{}", cone.report.to_text());
    }
}

#[test]
fn seeded_samples_pass() {
    let (x, _, _) = fixtures();
    let r = dg_sample_checks(&x, 9, 2, 5);
    assert!(r.all_pass(), "{}", r.to_text());
    assert_eq!(r.to_json(), dg_sample_checks(&x, 9, 2, 5).to_json());
}
