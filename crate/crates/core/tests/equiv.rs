use std::sync::Arc;

use coring::algmod::Algebra;
use coring::catalog::{catalog_comatrix, catalog_entwining, catalog_matrix, catalog_order, catalog_sweedler, super_flip_example, sweedler_element, EndoBasis};
use coring::cdga::{check_cdga_degreewise, check_cdga_morphism, compose_cdga_morphisms};
use coring::comod::{connection_from_complex, Comodule, ComoduleComplex};
use coring::coring::{check_coring_morphism, BasedCoring, CoringMorphism};
use coring::equiv::*;
use coring::exactla::{q, SVec};

fn ground() -> Arc<Algebra> {
    Arc::new(Algebra::ground())
}

/// `a ⊗ b` in degree two of a tensor algebra over `ℚ`.
fn pair(t: &coring::algmod::TensorAlgebra, a: usize, b: usize) -> SVec {
    t.mul(1, &SVec::unit(a), 1, &SVec::unit(b))
}

#[test]
fn zero_base_element_gives_flat_tensor_algebra() {
    let m = catalog_matrix(2, &ground()).unwrap();
    let f = t_flat(&m.based.coring, &SVec::new(), 4).unwrap();
    assert!(f.cdga.gamma().is_zero());
    assert!(f.report.all_pass(), "{}", f.report.to_text());
    assert!(check_cdga_degreewise(&f.cdga).all_pass());
    assert!(f.cdga.d0().iter().all(SVec::is_zero));
}

#[test]
fn matrix_curvature_n2() {
    let m = catalog_matrix(2, &ground()).unwrap();
    let f = t_flat(&m.based.coring, &m.based.x, 4).unwrap();
    let t = f.cdga.t();
    // E_ij is basis vector 2i + j
    assert_eq!(*f.cdga.gamma(), pair(t, 2, 1).neg());
    let b = t_based(&m.based, 4).unwrap();
    assert!(b.report.all_pass(), "{}", b.report.to_text());
    assert_eq!(b.cdga.gamma().apply(&b.inclusion(2)), pair(t, 2, 1).neg());
    // d E_12 = E_22 ⊗ E_12 − (E_11 ⊗ E_12 + E_12 ⊗ E_22) + E_12 ⊗ E_22
    let d = f.cdga.apply_d(1, &SVec::unit(1));
    assert_eq!(d, pair(t, 3, 1).minus(&pair(t, 0, 1)));
}

#[test]
fn matrix_curvature_n3() {
    let m = catalog_matrix(3, &ground()).unwrap();
    let f = t_flat(&m.based.coring, &m.based.x, 3).unwrap();
    let t = f.cdga.t();
    let e = |i: usize, j: usize| 3 * i + j;
    let want = pair(t, e(2, 0), e(0, 2)).plus(&pair(t, e(2, 1), e(1, 2))).neg();
    assert_eq!(*f.cdga.gamma(), want);
}

#[test]
fn order_curvature() {
    let a = ground();
    let c = catalog_order(&a, 2, &[(0, 0), (1, 1), (0, 1), (1, 0)], 0).unwrap();
    let f = t_flat(&c.based.coring, &c.based.x, 3).unwrap();
    let (p01, p10) = (c.pair_index(0, 1).unwrap(), c.pair_index(1, 0).unwrap());
    assert_eq!(*f.cdga.gamma(), pair(f.cdga.t(), p01, p10).neg());
}

#[test]
fn grouplike_points_are_flat() {
    let a = ground();
    let c = catalog_matrix(1, &a).unwrap();
    assert!(c.based.coring.is_grouplike(&c.based.x));
    assert!(t_flat(&c.based.coring, &c.based.x, 3).unwrap().cdga.gamma().is_zero());
    let m = catalog_matrix(2, &a).unwrap();
    let f = t_flat(&m.based.coring, &m.based.x, 3).unwrap();
    assert!(!f.cdga.gamma().is_zero());
    assert!(!m.based.coring.is_grouplike(&m.based.x));
    let alg = Arc::new(Algebra::matrix(2));
    let s = catalog_sweedler(&alg, &sweedler_element(&alg, &[(alg.unit().clone(), alg.unit().clone())]), 3).unwrap();
    assert!(s.flat.cdga.gamma().is_zero());
}

#[test]
fn sweedler_two_base_points() {
    let alg = Arc::new(Algebra::matrix(2));
    // E_11 ⊗ E_11 + E_21 ⊗ E_12 has ε = E_11 + E_22 = 1
    let x = sweedler_element(&alg, &[(SVec::unit(0), SVec::unit(0)), (SVec::unit(2), SVec::unit(1))]);
    let s = catalog_sweedler(&alg, &x, 3).unwrap();
    assert!(s.report.all_pass(), "{}", s.report.to_text());
    let b = t_based(&BasedCoring::new(s.coring.clone(), x).unwrap(), 3).unwrap();
    assert!(b.report.all_pass(), "{}", b.report.to_text());
    assert!(check_cdga_degreewise(&b.cdga).all_pass());
}

#[test]
fn base_point_change_is_a_morphism() {
    let m = catalog_matrix(2, &ground()).unwrap();
    let c = m.based.coring.clone();
    let (x, y, z) = (m.based.x.clone(), m.elem(0, 0), m.elem(0, 0).plus(&m.elem(0, 1)));
    let (fx, fy, fz) = (t_flat(&c, &x, 3).unwrap(), t_flat(&c, &y, 3).unwrap(), t_flat(&c, &z, 3).unwrap());
    let id = CoringMorphism::identity(&c);
    let g = t_morphism(&id, &fx, &fy);
    assert_eq!(g.omega, x.minus(&y));
    assert!(check_cdga_morphism(&g).all_pass());
    let h = t_morphism(&id, &fy, &fz);
    let comp = compose_cdga_morphisms(&h, &g).unwrap();
    assert!(check_cdga_morphism(&comp).all_pass());
    assert_eq!(comp.omega, t_morphism(&id, &fx, &fz).omega);
    let mut broken = g.clone();
    broken.omega = SVec::new();
    assert!(!check_cdga_morphism(&broken).all_pass());
}

#[test]
fn t_is_functorial() {
    let m = catalog_matrix(2, &ground()).unwrap();
    let c = m.based.coring.clone();
    // conjugation by the swap permutation
    let swap = |i: usize| [3, 2, 1, 0][i];
    let f = CoringMorphism { source: c.clone(), target: c.clone(), f0: vec![SVec::unit(0)], f1: (0..4).map(|i| SVec::unit(swap(i))).collect() };
    assert!(check_coring_morphism(&f).all_pass());
    let (x, y) = (m.based.x.clone(), m.elem(0, 0));
    let (fx, fy) = (t_flat(&c, &x, 3).unwrap(), t_flat(&c, &y, 3).unwrap());
    let tf = t_morphism(&f, &fx, &fy);
    assert!(check_cdga_morphism(&tf).all_pass());
    let ff = f.compose(&f);
    let lhs = t_morphism(&ff, &fx, &fx);
    let rhs = compose_cdga_morphisms(&t_morphism(&f, &fy, &fx), &tf).unwrap();
    assert_eq!((lhs.f1, lhs.omega), (rhs.f1, rhs.omega));
}

fn catalog_cdgas() -> Vec<(&'static str, Arc<coring::cdga::SemiFreeCdga>)> {
    let a = ground();
    let mut out = Vec::new();
    out.push(("matrix", t_based(&catalog_matrix(2, &a).unwrap().based, 3).unwrap().cdga));
    out.push(("trivial", t_based(&catalog_matrix(1, &a).unwrap().based, 3).unwrap().cdga));
    let alg = Arc::new(Algebra::matrix(2));
    let s = catalog_sweedler(&alg, &sweedler_element(&alg, &[(SVec::unit(0), SVec::unit(0)), (SVec::unit(2), SVec::unit(1))]), 3).unwrap();
    let x = s.flat.x.clone();
    out.push(("sweedler", t_based(&BasedCoring::new(s.coring, x).unwrap(), 3).unwrap().cdga));
    out
}

#[test]
fn tu_roundtrip_is_exact() {
    for (name, c) in catalog_cdgas() {
        let r = roundtrip_tu(&c, None).unwrap();
        assert!(r.all_pass(), "{name}: {}", r.to_text());
    }
}

#[test]
fn ut_roundtrip_and_naturality() {
    let a = ground();
    let m = catalog_matrix(2, &a).unwrap();
    let r = roundtrip_ut(&m.based, 3).unwrap();
    assert!(r.report.all_pass(), "{}", r.report.to_text());
    let o = catalog_order(&a, 3, &[(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)], 1).unwrap();
    let r2 = roundtrip_ut(&o.based, 3).unwrap();
    assert!(r2.report.all_pass(), "{}", r2.report.to_text());
    let c = m.based.coring.clone();
    let swap = |i: usize| [3, 2, 1, 0][i];
    let f = CoringMorphism { source: c.clone(), target: c.clone(), f0: vec![SVec::unit(0)], f1: (0..4).map(|i| SVec::unit(swap(i))).collect() };
    let other = roundtrip_ut(&BasedCoring::new(c.clone(), m.elem(0, 0)).unwrap(), 3).unwrap();
    let n = ut_naturality(&f, &r, &other).unwrap();
    assert!(n.all_pass(), "{}", n.to_text());
}

#[test]
fn d_variant_is_isomorphic() {
    for (name, c) in catalog_cdgas() {
        let d = d_variant_iso(&c).unwrap();
        assert!(d.report.all_pass(), "{name}: {}", d.report.to_text());
    }
}

#[test]
fn entwining_cdga_roundtrips() {
    let ent = super_flip_example();
    let data = catalog_entwining(&ent, &SVec::unit(0), 2, &ent.c.comul.clone(), 1).unwrap();
    let b = t_based(&data.based, 3).unwrap();
    assert!(check_cdga_degreewise(&b.cdga).all_pass());
    assert!(roundtrip_tu(&b.cdga, None).unwrap().all_pass());
    assert!(roundtrip_ut(&data.based, 3).unwrap().report.all_pass());
}

fn row_connection(d: usize) -> (BasedCoring, Vec<SVec>, Arc<coring::cdga::SemiFreeCdga>) {
    let m = catalog_matrix(2, &ground()).unwrap();
    let c = m.based.coring.clone();
    let rho: Vec<SVec> = (0..2).map(|i| (0..2).map(|j| (j * 4 + j * 2 + i, q(1))).collect()).collect();
    let p = Comodule::new(&c, Arc::new(coring::algmod::ModuleSpace::free_right(c.algebra(), 2)), &rho).unwrap();
    let (z, r) = connection_from_complex(&ComoduleComplex::single(p, 0), &m.based.x, true, d).unwrap();
    assert!(r.all_pass());
    (m.based, z.components[1][0].clone(), z.cdga.clone())
}

#[test]
fn pregalois_for_row_vectors() {
    let (_, nabla, cdga) = row_connection(3);
    let g = pregalois_theta(&cdga, 2, nabla, EndoBasis::scalars(2, &Algebra::ground()), None).unwrap();
    assert!(g.report.all_pass(), "{}", g.report.to_text());
    assert_eq!(g.comatrix.based.coring.rank(), 4);
}

#[test]
fn pregalois_errors() {
    let (_, nabla, cdga) = row_connection(3);
    let full = EndoBasis::full(2, &Algebra::ground());
    assert!(matches!(pregalois_theta(&cdga, 2, nabla.clone(), full, None), Err(EquivError::BNotClosed(_))));
    let mut bad = nabla;
    bad[0] = bad[0].scaled(&q(2));
    assert!(matches!(
        pregalois_theta(&cdga, 2, bad, EndoBasis::scalars(2, &Algebra::ground()), None),
        Err(EquivError::ConnectionNotIntegrable(_))
    ));
}

#[test]
fn comatrix_matches_matrix_coring() {
    let a = ground();
    let cm = catalog_comatrix(&a, 2, EndoBasis::scalars(2, &a), None).unwrap();
    let f = t_based(&cm.based, 3).unwrap();
    assert!(f.report.all_pass());
    assert!(check_cdga_degreewise(&f.cdga).all_pass());
    assert_eq!(cm.based.coring.rank(), catalog_matrix(2, &a).unwrap().based.coring.rank());
}
