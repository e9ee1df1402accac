use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::algmod::{Algebra, ModuleSpace};
use crate::catalog::{catalog_comatrix, catalog_matrix, catalog_sweedler, sweedler_element, EndoBasis, OrderCoring};
use crate::cdga::CurvedModule;
use crate::comod::{connection_from_complex, Comodule, ComoduleComplex};
use crate::equiv::{t_based, t_flat};
use crate::exactla::q;

fn ground() -> Arc<Algebra> {
    Arc::new(Algebra::ground())
}

fn matrix(n: usize) -> OrderCoring {
    catalog_matrix(n, &ground()).unwrap()
}

fn sweedler() -> (Arc<Coring>, SVec) {
    let alg = Arc::new(Algebra::matrix(2));
    // E_11 ⊗ E_11 + E_21 ⊗ E_12
    let x = sweedler_element(&alg, &[(SVec::unit(0), SVec::unit(0)), (SVec::unit(2), SVec::unit(1))]);
    (catalog_sweedler(&alg, &x, 2).unwrap().coring, x)
}

fn cofree(c: &Arc<Coring>) -> Contramodule {
    cofree_contramodule(c, &Arc::new(ModuleSpace::regular(c.algebra()))).unwrap()
}

fn identity(n: usize) -> Vec<SVec> {
    (0..n).map(SVec::unit).collect()
}

fn assert_reassembles(z: &ZDivergence) {
    let again = assemble_divergence(&z.components()).unwrap();
    for n in z.xi.lo()..z.xi.hi() {
        assert_eq!(again.cols(n), z.cols(n), "degree {n}");
    }
}

#[test]
fn cofree_contramodules() {
    let (s, _) = sweedler();
    for c in [matrix(1).based.coring, matrix(2).based.coring, s] {
        let r = check_contramodule(&cofree(&c));
        assert!(r.all_pass(), "{}", r.to_text());
    }
}

#[test]
fn zero_structure_map_is_not_counital() {
    let c = matrix(2).based.coring;
    let good = cofree(&c);
    let zero = Contramodule::new(c, good.m.clone(), vec![SVec::new(); good.alpha.len()]).unwrap();
    let r = check_contramodule(&zero);
    assert!(!r.passed("counitality"));
    assert!(r.passed("associativity"));
}

#[test]
fn xi_dimensions() {
    let m = matrix(2);
    let cdga = t_based(&m.based, 3).unwrap().cdga;
    let rv = cdga.v().rank();
    assert_eq!(rv, 3);
    let cf = cofree(&m.based.coring);
    let xi = build_xi(&cdga, 0, vec![cf.m.clone()]).unwrap();
    assert_eq!((xi.lo(), xi.hi()), (-3, 0));
    for n in -3..=0i64 {
        // Hom_ℚ(V^{⊗i}, M) with i = −n
        assert_eq!(xi.dim(n), rv.pow((-n) as u32) * 4, "degree {n}");
    }
    assert!(check_xi(&xi).all_pass());
    // a single point: C⁺ = 0 and Ξ is M itself
    let t = t_based(&matrix(1).based, 3).unwrap().cdga;
    assert_eq!(t.v().rank(), 0);
    let xi = build_xi(&t, 0, vec![Arc::new(ModuleSpace::free_right(t.algebra(), 2))]).unwrap();
    assert_eq!((0..=0).map(|n| xi.dim(n)).collect::<Vec<_>>(), vec![2]);
    assert_eq!(xi.dim(-1), 0);
}

#[test]
fn zero_components_over_a_flat_algebra() {
    let c = matrix(2).based.coring;
    let cdga = t_flat(&c, &SVec::new(), 3).unwrap().cdga;
    let xi = Arc::new(build_xi(&cdga, 0, vec![cofree(&c).m.clone()]).unwrap());
    let z = assemble_divergence(&DivergenceComponents::zero(xi)).unwrap();
    assert!(z.report.all_pass());
    assert!(check_integrable(&z).all_pass());
    assert_reassembles(&z);
}

#[test]
fn curved_module_divergence_regular() {
    let c = matrix(2).based.coring;
    let cdga = t_flat(&c, &SVec::new(), 3).unwrap().cdga;
    let d = divergence_from_curved_module(&CurvedModule::regular_right(&cdga)).unwrap();
    assert!(d.report.all_pass(), "{}", d.report.to_text());
    // d0 = 0 over ℚ, so the formula is well defined on all of Ξ
    let direct = d.direct.as_ref().unwrap();
    assert!(check_integrable(direct).all_pass());
    assert_reassembles(direct);
}

#[test]
fn curved_module_divergence_from_a_comodule() {
    let m = matrix(2);
    let c = m.based.coring.clone();
    let rho: Vec<SVec> = (0..2).map(|i| (0..2).map(|j| (j * 4 + j * 2 + i, q(1))).collect()).collect();
    let p = Comodule::new(&c, Arc::new(ModuleSpace::free_right(c.algebra(), 2)), &rho).unwrap();
    let (z, r) = connection_from_complex(&ComoduleComplex::single(p, 0), &m.based.x, true, 3).unwrap();
    assert!(r.all_pass());
    let d = divergence_from_curved_module(&z.module).unwrap();
    assert!(d.report.all_pass(), "{}", d.report.to_text());
}

#[test]
fn full_xi_is_not_integrable_when_curved() {
    let m = matrix(2);
    let cdga = t_based(&m.based, 3).unwrap().cdga;
    assert!(!cdga.gamma().is_zero());
    let point = CurvedModule::new(cdga, 0, vec![Arc::new(ModuleSpace::free_right(&ground(), 1))], vec![], vec![]).unwrap();
    let d = divergence_from_curved_module(&point).unwrap();
    assert!(d.report.all_pass(), "{}", d.report.to_text());
    assert_eq!(d.induced.rank(0), 1);
    let direct = d.direct.as_ref().unwrap();
    assert!(!check_integrable(direct).all_pass());
}

#[test]
fn direct_divergence_rejects_a_foreign_window() {
    let c = matrix(2).based.coring;
    let cdga = t_flat(&c, &SVec::new(), 2).unwrap().cdga;
    let xi = Arc::new(build_xi(&cdga, 1, vec![Arc::new(ModuleSpace::free_right(&ground(), 1))]).unwrap());
    assert!(direct_divergence(xi, &CurvedModule::regular_right(&cdga)).is_err());
}

fn prop46(cx: &ContramoduleComplex, x: &SVec, based: bool, d: usize) -> ContraDivergence {
    divergence_from_contramodule_complex(cx, x, based, d, Prop46Sign::Displayed).unwrap()
}

#[test]
fn contramodule_divergence_matrix() {
    let m = matrix(2);
    let cx = ContramoduleComplex::single(cofree(&m.based.coring), 0);
    for based in [false, true] {
        let d = prop46(&cx, &m.based.x, based, 3);
        assert!(d.report.all_pass(), "{}", d.report.to_text());
        assert!(d.report.get("divergence.integrable").is_some());
        assert_eq!(d.report.get("matches_displayed_formula").is_some(), !based);
        assert_reassembles(&d.divergence);
    }
}

#[test]
fn contramodule_divergence_two_terms() {
    let m = matrix(2);
    let t = cofree(&m.based.coring);
    let r = t.m.rank();
    let cx = ContramoduleComplex::new(-1, vec![t.clone(), t], vec![identity(r)]).unwrap();
    for based in [false, true] {
        let d = prop46(&cx, &m.based.x, based, 3);
        assert!(d.report.all_pass(), "{}", d.report.to_text());
    }
}

#[test]
fn contramodule_divergence_sweedler() {
    let (c, x) = sweedler();
    let cx = ContramoduleComplex::single(cofree(&c), 0);
    for based in [false, true] {
        let d = prop46(&cx, &x, based, 2);
        assert!(d.report.all_pass(), "{}", d.report.to_text());
    }
}

#[test]
fn the_other_degree_one_sign_is_not_integrable() {
    let m = matrix(2);
    let cx = ContramoduleComplex::single(cofree(&m.based.coring), 0);
    for based in [false, true] {
        let d = divergence_from_contramodule_complex(&cx, &m.based.x, based, 3, Prop46Sign::Stated).unwrap();
        assert!(d.report.passed("divergence.leibniz"));
        assert!(!d.report.passed("divergence.integrable"));
    }
}

#[test]
fn contramodule_divergence_errors() {
    let m = matrix(2);
    let t = cofree(&m.based.coring);
    let r = t.m.rank();
    let three = ContramoduleComplex::new(0, vec![t.clone(), t.clone(), t.clone()], vec![identity(r), identity(r)]).unwrap();
    assert!(matches!(
        divergence_from_contramodule_complex(&three, &m.based.x, false, 3, Prop46Sign::Displayed),
        Err(ContraError::NotComplex(_))
    ));
    let proj = (0..r).map(|i| if i == 0 { SVec::unit(0) } else { SVec::new() }).collect();
    let bad = ContramoduleComplex::new(0, vec![t.clone(), t.clone()], vec![proj]).unwrap();
    assert!(matches!(
        divergence_from_contramodule_complex(&bad, &m.based.x, false, 3, Prop46Sign::Displayed),
        Err(ContraError::NotContramoduleMap(_))
    ));
    let single = ContramoduleComplex::single(t, 0);
    assert!(matches!(
        divergence_from_contramodule_complex(&single, &SVec::new(), true, 3, Prop46Sign::Displayed),
        Err(ContraError::NotBased)
    ));
}

#[test]
fn comatrix_connection_oracle() {
    let a = ground();
    let cm = catalog_comatrix(&a, 2, EndoBasis::scalars(2, &a), None).unwrap();
    let cc = comatrix_left_connection(&cm, 3).unwrap();
    assert!(cc.report.all_pass());
    let (_, _, cols) = &cc.connection.components[0];
    let tp = cc.connection.tensor(0);
    let incl = &cc.based.split.cplus.inclusion;
    let kron = |c: &SVec, chi: usize| -> SVec { c.iter().map(|(i, v)| (i * 2 + chi, v.clone())).collect() };
    for chi in 0..2 {
        let mut lifted = SVec::new();
        for (qq, c) in &cols[chi] {
            let (v, m) = tp.rep(*qq);
            lifted.axpy(c, &kron(&incl[v], m));
        }
        // x ⊗ e*_χ − Σ_j (e*_χ ⊗ e_j) ⊗ e*_j
        let mut want = kron(&cm.based.x, chi);
        for j in 0..2 {
            want.sub(&kron(&cm.tensor(&SVec::unit(chi), &SVec::unit(j)), j));
        }
        assert_eq!(lifted, want, "row {chi}");
    }
    let dd = divergence_from_left_connection(&cc.connection).unwrap();
    assert!(dd.report.all_pass(), "{}", dd.report.to_text());
    assert!(check_integrable(&dd.divergence).all_pass());
}

#[test]
fn comatrix_connection_full_endomorphisms() {
    let a = ground();
    let cm = catalog_comatrix(&a, 2, EndoBasis::full(2, &a), None).unwrap();
    let cc = comatrix_left_connection(&cm, 3).unwrap();
    let dd = divergence_from_left_connection(&cc.connection).unwrap();
    assert!(dd.report.all_pass(), "{}", dd.report.to_text());
    // Hom_{M_2}(row vectors, M_2) is a column
    assert_eq!(dd.duals[0].dim(), 2);
}

#[test]
fn zero_left_connection() {
    let a = ground();
    let cm = catalog_comatrix(&a, 2, EndoBasis::scalars(2, &a), None).unwrap();
    let cc = comatrix_left_connection(&cm, 3).unwrap();
    let lc = &cc.connection;
    let zero = LeftConnection::new(lc.cdga.clone(), lc.b.clone(), 0, lc.left.clone(), lc.right.clone(), vec![]).unwrap();
    let dd = divergence_from_left_connection(&zero).unwrap();
    assert!(dd.report.all_pass());
    assert!(dd.components.cols(-1, 1).iter().all(SVec::is_zero));
}

#[test]
fn left_connection_must_be_right_b_linear() {
    let a = ground();
    // B = diagonal matrices
    let cm = catalog_comatrix(&a, 2, EndoBasis(vec![SVec::unit(0), SVec::unit(3)]), None).unwrap();
    let cc = comatrix_left_connection(&cm, 3).unwrap();
    let lc = &cc.connection;
    assert!(divergence_from_left_connection(lc).is_ok());
    let mut comps = lc.components.clone();
    assert!(!comps[0].2[1].is_zero());
    comps[0].2[0] = comps[0].2[0].plus(&comps[0].2[1]);
    let bad = LeftConnection::new(lc.cdga.clone(), lc.b.clone(), 0, lc.left.clone(), lc.right.clone(), comps).unwrap();
    assert!(matches!(divergence_from_left_connection(&bad), Err(ContraError::NotRightBLinear(_))));
}

#[test]
fn left_connection_shape_errors() {
    let a = ground();
    let cm = catalog_comatrix(&a, 2, EndoBasis::scalars(2, &a), None).unwrap();
    let cc = comatrix_left_connection(&cm, 3).unwrap();
    let lc = &cc.connection;
    let out = vec![(1, 3, lc.components[0].2.clone())];
    assert!(LeftConnection::new(lc.cdga.clone(), lc.b.clone(), 0, lc.left.clone(), lc.right.clone(), out).is_err());
    assert!(LeftConnection::new(lc.cdga.clone(), lc.b.clone(), 0, lc.left.clone(), vec![], vec![]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn any_base_element_gives_an_integrable_divergence(coeffs in proptest::collection::vec(-2i64..=2, 4)) {
        let m = matrix(2);
        let x: SVec = coeffs.iter().enumerate().filter(|(_, c)| **c != 0).map(|(i, c)| (i, q(*c))).collect();
        let cx = ContramoduleComplex::single(cofree(&m.based.coring), 0);
        let d = prop46(&cx, &x, false, 3);
        prop_assert!(d.report.all_pass(), "{}", d.report.to_text());
    }

    #[test]
    fn scaled_differentials_stay_integrable(s in -3i64..=3) {
        let m = matrix(2);
        let t = cofree(&m.based.coring);
        let r = t.m.rank();
        let delta = (0..r).map(|i| SVec::unit(i).scaled(&q(s))).collect();
        let cx = ContramoduleComplex::new(0, vec![t.clone(), t], vec![delta]).unwrap();
        let d = prop46(&cx, &m.based.x, true, 2);
        prop_assert!(d.report.all_pass(), "{}", d.report.to_text());
    }

    #[test]
    fn divergence_is_right_linear_on_random_elements(b in 0usize..16, a in 0usize..3, s in 1usize..3) {
        let m = matrix(2);
        let cx = ContramoduleComplex::single(cofree(&m.based.coring), 0);
        let d = prop46(&cx, &m.based.x, true, 3);
        let xi = &d.divergence.xi;
        let n = -3i64;
        let e = SVec::unit(b % xi.dim(n)).plus(&SVec::unit(0).scaled(&q(3)));
        let t = xi.cdga().t();
        let av = SVec::unit(a % t.dim(s)).plus(&SVec::unit(t.dim(s) - 1));
        let lhs = d.divergence.apply(n + s as i64, &xi.act(n, &e, s, &av));
        let mut rhs = xi.act(n + 1, &d.divergence.apply(n, &e), s, &av);
        rhs.sub(&xi.act(n, &e, s + 1, &xi.cdga().apply_d(s, &av)));
        prop_assert_eq!(lhs, rhs);
    }
}
