//! The functors between based corings and semi-free curved DGAs, their round
//! trips, and the pre-Galois morphism of a comatrix coring.

use std::sync::Arc;

use serde_json::json;

use crate::algmod::{AlgError, ModuleSpace, TensorAlgebra};
use crate::catalog::{catalog_comatrix, shift, CatalogError, Comatrix, EndoBasis};
use crate::cdga::{check_cdga_morphism, CdgaError, CdgaMorphism, SemiFreeCdga};
use crate::comod::ZConnection;
use crate::coring::{check_coring, check_coring_morphism, split_at, BasedCoring, Coring, CoringError, CoringMorphism, Split};
use crate::exactla::{Eliminator, SVec};
use crate::par;
use crate::report::{mismatch, Report};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EquivError {
    #[error(transparent)]
    Alg(#[from] AlgError),
    #[error(transparent)]
    Coring(#[from] CoringError),
    #[error(transparent)]
    Cdga(#[from] CdgaError),
    #[error("the element is not a base point")]
    NotBased,
    #[error("the morphism does not respect the counits: {0}")]
    NotCounital(String),
    #[error("P is not a progenerator: {0}")]
    NotProgenerator(String),
    #[error("B is not closed: {0}")]
    BNotClosed(String),
    #[error("the connection is not integrable: {0}")]
    ConnectionNotIntegrable(String),
    #[error("{0}")]
    Other(String),
}

/// `T♭(C, x)`: the tensor algebra of `C` with `d_x` and `γ_x = x ⊗ x − Δ(x)`.
#[derive(Clone, Debug)]
pub struct TFlatResult {
    pub cdga: Arc<SemiFreeCdga>,
    pub x: SVec,
    pub report: Report,
}

/// `d_x(c) = x ⊗ c + Σ_k (−1)^k Δ_k(c) + (−1)^{n+1} c ⊗ x` on `C^{⊗n}`.
pub fn dx_closed_form(coring: &Coring, t: &TensorAlgebra, n: usize, x: &SVec, c: &SVec) -> SVec {
    let mut out = t.mul(1, x, n, c);
    for k in 1..=n {
        let term = coring.delta_k(t, n, k, c);
        if k % 2 == 0 {
            out.add(&term);
        } else {
            out.sub(&term);
        }
    }
    let tail = t.mul(n, c, 1, x);
    if n % 2 == 0 {
        out.sub(&tail);
    } else {
        out.add(&tail);
    }
    out
}

pub fn t_flat(coring: &Arc<Coring>, x: &SVec, max_degree: usize) -> Result<TFlatResult, EquivError> {
    let cs = coring.c();
    if x.max_index().is_some_and(|m| m >= cs.rank()) {
        return Err(EquivError::Other("x is not an element of C".into()));
    }
    let dmax = max_degree.max(2);
    let t = Arc::new(TensorAlgebra::new(cs, dmax)?);
    let da = coring.algebra().dim();
    let d0: Vec<SVec> = (0..da).map(|k| cs.act_right_basis(x, k).minus(&cs.act_left_basis(k, x))).collect();
    let d1: Vec<SVec> = par::map_range(cs.rank(), |c| dx_closed_form(coring, &t, 1, x, &SVec::unit(c)));
    let gamma = t.mul(1, x, 1, x).minus(&coring.apply_delta(x));
    let cdga = SemiFreeCdga::from_projected(t.clone(), d0, d1, gamma)?;
    let mut report = Report::new();
    let mut bad = None;
    for n in 2..dmax {
        bad = par::find_first(t.dim(n), |qq| {
            let e = SVec::unit(qq);
            let lhs = cdga.apply_d(n, &e);
            let rhs = dx_closed_form(coring, &t, n, x, &e);
            (lhs != rhs).then(|| json!({"degree": n, "witness": mismatch("basis", qq, &lhs, &rhs)}))
        });
        if bad.is_some() {
            break;
        }
    }
    report.record_window("closed_form_matches_leibniz", 2, dmax as i64 - 1, bad);
    Ok(TFlatResult { cdga, x: x.clone(), report })
}

/// `T(C, x)`: the sub-CDGA `T_A(C⁺)` of `T♭(C, x)` for a base point `x`.
#[derive(Clone, Debug)]
pub struct TBasedResult {
    pub cdga: Arc<SemiFreeCdga>,
    pub split: Split,
    pub flat: TFlatResult,
    pub report: Report,
}

impl TBasedResult {
    /// The inclusion `T_A(C⁺)^n → T_A(C)^n`.
    pub fn inclusion(&self, n: usize) -> Vec<SVec> {
        let da = self.cdga.algebra().dim();
        let f0: Vec<SVec> = (0..da).map(SVec::unit).collect();
        self.cdga.t().map_cols(self.flat.cdga.t(), &f0, &self.split.cplus.inclusion, n)
    }
}

pub fn t_based(b: &BasedCoring, max_degree: usize) -> Result<TBasedResult, EquivError> {
    let coring = &b.coring;
    let split = split_at(b)?;
    let flat = t_flat(coring, &b.x, max_degree)?;
    let dmax = flat.cdga.max_degree();
    let cplus = &split.cplus;
    let tp = Arc::new(TensorAlgebra::new(&cplus.space, dmax)?);
    let tc = flat.cdga.t().clone();
    let in_cplus = |v: &SVec, what: &str| cplus.coords(v).ok_or_else(|| EquivError::Other(format!("{what} leaves C⁺")));
    let d0 = flat.cdga.d0().iter().map(|v| in_cplus(v, "d_x(a)")).collect::<Result<Vec<_>, _>>()?;
    // −(π^R ⊗ π^L) ∘ Δ
    let restricted = |v: &SVec| -> SVec {
        let mut out = SVec::new();
        for (qq, c) in v {
            let tu = tc.tuple(2, *qq);
            let l = split.pi_r_plus(&SVec::unit(tu[0]));
            let r = split.pi_l_plus(&SVec::unit(tu[1]));
            out.axpy(c, &tp.mul(1, &l, 1, &r));
        }
        out.neg()
    };
    let d1: Vec<SVec> = par::map_range(cplus.inclusion.len(), |y| restricted(&coring.apply_delta(&cplus.inclusion[y])));
    let gamma = restricted(&coring.apply_delta(&b.x));
    let cdga = SemiFreeCdga::from_projected(tp, d0, d1, gamma)?;
    let mut res = TBasedResult { cdga, split, flat, report: Report::new() };
    let mut report = Report::new();
    report.merge("split", res.split.report.clone());
    let incl2 = res.inclusion(2);
    let g = res.cdga.gamma().apply(&incl2);
    report.record("gamma_restricts", (g != *res.flat.cdga.gamma()).then(|| json!({"gamma": crate::report::vec_json(&g)})));
    let mut bad = None;
    let mut prev = res.inclusion(1);
    for n in 1..dmax {
        let next = res.inclusion(n + 1);
        bad = par::find_first(res.cdga.t().dim(n), |qq| {
            let lhs = res.cdga.apply_d(n, &SVec::unit(qq)).apply(&next);
            let rhs = res.flat.cdga.apply_d(n, &prev[qq]);
            (lhs != rhs).then(|| json!({"degree": n, "witness": mismatch("basis", qq, &lhs, &rhs)}))
        });
        if bad.is_some() {
            break;
        }
        prev = next;
    }
    report.record_window("restriction_matches_flat", 1, dmax as i64 - 1, bad);
    res.report = report;
    Ok(res)
}

/// `(T(f0, f1), f1(x) − y)`.
pub fn t_morphism(m: &CoringMorphism, fx: &TFlatResult, fy: &TFlatResult) -> CdgaMorphism {
    CdgaMorphism {
        source: fx.cdga.clone(),
        target: fy.cdga.clone(),
        f0: m.f0.clone(),
        f1: m.f1.clone(),
        omega: m.apply(&fx.x).minus(&fy.x),
    }
}

/// The based variant: `f1` restricted to `C⁺ → D⁺` and `ω = f1(x) − y ∈ D⁺`.
pub fn t_morphism_based(m: &CoringMorphism, bx: &TBasedResult, by: &TBasedResult) -> Result<CdgaMorphism, EquivError> {
    let dplus = &by.split.cplus;
    let f1 = bx
        .split
        .cplus
        .inclusion
        .iter()
        .enumerate()
        .map(|(i, c)| dplus.coords(&m.apply(c)).ok_or_else(|| EquivError::NotCounital(format!("f1 sends C⁺ basis {i} outside D⁺"))))
        .collect::<Result<Vec<_>, _>>()?;
    let w = m.apply(&bx.split.x).minus(&by.split.x);
    let omega = dplus.coords(&w).ok_or_else(|| EquivError::NotCounital("f1(x) − y is not in D⁺".into()))?;
    Ok(CdgaMorphism { source: bx.cdga.clone(), target: by.cdga.clone(), f0: m.f0.clone(), f1, omega })
}

/// `U(cdga)`: the coring `C(A, V)` on `Ax ⊕ V`, basis `[A, V]`, based at `x`.
#[derive(Clone, Debug)]
pub struct UResult {
    pub cdga: Arc<SemiFreeCdga>,
    pub based: BasedCoring,
    pub report: Report,
}

impl UResult {
    pub fn coring(&self) -> &Arc<Coring> {
        &self.based.coring
    }

    /// `v ∈ V` inside `C`.
    pub fn v(&self, v: &SVec) -> SVec {
        shift(v, self.cdga.algebra().dim())
    }
}

pub fn u_functor(cdga: &Arc<SemiFreeCdga>) -> Result<UResult, EquivError> {
    let alg = cdga.algebra().clone();
    let v = cdga.v();
    let (da, rv) = (alg.dim(), v.rank());
    let rank = da + rv;
    let left: Vec<Vec<SVec>> = (0..da)
        .map(|k| {
            (0..rank)
                .map(|m| if m < da { alg.basis_mul(k, m).clone() } else { shift(&v.act_left_basis(k, &SVec::unit(m - da)), da) })
                .collect()
        })
        .collect();
    let right: Vec<Vec<SVec>> = (0..da)
        .map(|k| {
            (0..rank)
                .map(|m| {
                    if m < da {
                        alg.basis_mul(m, k).plus(&shift(&v.act_left_basis(m, &cdga.d0()[k]), da))
                    } else {
                        shift(&v.act_right_basis(&SVec::unit(m - da), k), da)
                    }
                })
                .collect()
        })
        .collect();
    let cs = Arc::new(ModuleSpace::new(alg.clone(), rank, Some(left), Some(right))?);
    let unit = alg.unit();
    let lift_vv = |x: &SVec| -> SVec { cdga.lift2(x).iter().map(|(p, c)| (((p / rv) + da) * rank + da + p % rv, c.clone())).collect() };
    let gamma = cdga.lift2(cdga.gamma());
    let mut delta = Vec::with_capacity(rank);
    for m in 0..da {
        let mut out: SVec = unit.iter().map(|(u, c)| (m * rank + u, c.clone())).collect();
        for (p, c) in &gamma {
            let (i, j) = (p / rv, p % rv);
            for (i2, c2) in &v.act_left_basis(m, &SVec::unit(i)) {
                out.add_term((da + i2) * rank + da + j, &-(c * c2));
            }
        }
        delta.push(out);
    }
    for j in 0..rv {
        let mut out = SVec::new();
        for (u, c) in unit {
            out.add_term(u * rank + da + j, c);
            out.add_term((da + j) * rank + u, c);
        }
        out.sub(&lift_vv(&cdga.d1()[j]));
        delta.push(out);
    }
    let counit: Vec<SVec> = (0..rank).map(|m| if m < da { SVec::unit(m) } else { SVec::new() }).collect();
    let coring = Arc::new(Coring::new(cs, &delta, counit)?);
    let report = check_coring(&coring);
    let based = BasedCoring::new(coring, unit.clone())?;
    Ok(UResult { cdga: cdga.clone(), based, report })
}

/// `C(f)_1(ax + v) = f0(a) y + f0(a) ω + f1(v)`.
pub fn u_morphism(m: &CdgaMorphism, ua: &UResult, ub: &UResult) -> CoringMorphism {
    let db = ub.cdga.algebra().dim();
    let vb = ub.cdga.v();
    let mut f1: Vec<SVec> = m.f0.iter().map(|a| a.plus(&shift(&vb.act_left(a, &m.omega), db))).collect();
    f1.extend(m.f1.iter().map(|w| shift(w, db)));
    CoringMorphism { source: ua.coring().clone(), target: ub.coring().clone(), f0: m.f0.clone(), f1 }
}

/// Check `T(U(cdga)) = cdga` on the nose, and `T(U(f)) = f` on a sample morphism.
pub fn roundtrip_tu(cdga: &Arc<SemiFreeCdga>, sample: Option<&CdgaMorphism>) -> Result<Report, EquivError> {
    let mut r = Report::new();
    let u = u_functor(cdga)?;
    r.merge("u", u.report.clone());
    let tb = t_based(&u.based, cdga.max_degree())?;
    let (da, rv) = (cdga.algebra().dim(), cdga.v().rank());
    let incl = &tb.split.cplus.inclusion;
    let standard = incl.len() == rv && incl.iter().enumerate().all(|(j, v)| *v == SVec::unit(da + j));
    r.record("cplus_is_v", (!standard).then(|| json!({"cplus_rank": incl.len(), "v_rank": rv})));
    if standard {
        r.record("same_bimodule", (tb.cdga.v() != cdga.v()).then(|| json!("the actions on V differ")));
        r.record("same_d_on_a", (tb.cdga.d0() != cdga.d0()).then(|| json!("d(a) differs")));
        let d1 = (0..rv).find(|&j| tb.cdga.d1()[j] != cdga.d1()[j]);
        r.record("same_d_on_v", d1.map(|j| mismatch("basis", j, &tb.cdga.d1()[j], &cdga.d1()[j])));
        r.record("same_curvature", (tb.cdga.gamma() != cdga.gamma()).then(|| mismatch("gamma", 0, tb.cdga.gamma(), cdga.gamma())));
        r.record("equal", (*tb.cdga != **cdga).then(|| json!("T(U(A)) ≠ A")));
        let id = CdgaMorphism::identity(cdga);
        let m = sample.unwrap_or(&id);
        let (src, tgt) = (&m.source, &m.target);
        let us = if Arc::ptr_eq(src, cdga) { u.clone() } else { u_functor(src)? };
        let ut = if Arc::ptr_eq(tgt, cdga) { u.clone() } else { u_functor(tgt)? };
        let um = u_morphism(m, &us, &ut);
        let ts = if Arc::ptr_eq(src, cdga) { tb.clone() } else { t_based(&us.based, src.max_degree())? };
        let tt = if Arc::ptr_eq(tgt, cdga) { tb.clone() } else { t_based(&ut.based, tgt.max_degree())? };
        let tum = t_morphism_based(&um, &ts, &tt)?;
        let same = tum.f0 == m.f0 && tum.f1 == m.f1 && tum.omega == m.omega;
        r.record("morphism_roundtrip", (!same).then(|| json!("T(U(f)) ≠ f")));
    }
    Ok(r)
}

/// The isomorphisms `φ: C → U(T(C, x))` and `ψ` back.
#[derive(Clone, Debug)]
pub struct UtRoundtrip {
    pub based: TBasedResult,
    pub u: UResult,
    pub phi: CoringMorphism,
    pub psi: CoringMorphism,
    pub report: Report,
}

/// `φ(c) = ε(c) y + (c − ε(c) x)` and `ψ(a y + v) = a x + v`.
pub fn roundtrip_ut(b: &BasedCoring, max_degree: usize) -> Result<UtRoundtrip, EquivError> {
    let tb = t_based(b, max_degree)?;
    let u = u_functor(&tb.cdga)?;
    let coring = &b.coring;
    let da = coring.algebra().dim();
    let split = &tb.split;
    let phi_cols: Vec<SVec> = (0..coring.rank()).map(|j| coring.counit()[j].plus(&shift(&split.pi_l_plus(&SVec::unit(j)), da))).collect();
    let mut psi_cols: Vec<SVec> = (0..da).map(|i| coring.c().act_left_basis(i, &b.x)).collect();
    psi_cols.extend(split.cplus.inclusion.iter().cloned());
    let f0: Vec<SVec> = (0..da).map(SVec::unit).collect();
    let phi = CoringMorphism { source: coring.clone(), target: u.coring().clone(), f0: f0.clone(), f1: phi_cols };
    let psi = CoringMorphism { source: u.coring().clone(), target: coring.clone(), f0, f1: psi_cols };
    let mut r = Report::new();
    r.merge("u", u.report.clone());
    let pp = (0..coring.rank()).find(|&j| psi.apply(&phi.f1[j]) != SVec::unit(j));
    r.record("psi_after_phi_identity", pp.map(|j| json!({"basis": j})));
    let qq = (0..u.coring().rank()).find(|&j| phi.apply(&psi.f1[j]) != SVec::unit(j));
    r.record("phi_after_psi_identity", qq.map(|j| json!({"basis": j})));
    r.merge("phi", check_coring_morphism(&phi));
    r.merge("psi", check_coring_morphism(&psi));
    r.record("base_point", (phi.apply(&b.x) != u.based.x).then(|| json!("φ(x) ≠ y")));
    Ok(UtRoundtrip { based: tb, u, phi, psi, report: r })
}

/// `U(T(f)) ∘ φ_C = φ_D ∘ f` for a morphism of based corings.
pub fn ut_naturality(m: &CoringMorphism, cx: &UtRoundtrip, dy: &UtRoundtrip) -> Result<Report, EquivError> {
    let tm = t_morphism_based(m, &cx.based, &dy.based)?;
    let utm = u_morphism(&tm, &cx.u, &dy.u);
    let lhs = utm.compose(&cx.phi);
    let rhs = dy.phi.compose(m);
    let mut r = Report::new();
    let bad = (0..lhs.f1.len()).find(|&j| lhs.f1[j] != rhs.f1[j]);
    r.record("naturality", bad.map(|j| mismatch("basis", j, &lhs.f1[j], &rhs.f1[j])));
    Ok(r)
}

/// The right-module variant `D(A, V)` and its isomorphism `y a + v ↦ x a + v`
/// onto `C(A, V)`.
#[derive(Clone, Debug)]
pub struct DVariant {
    pub d: Arc<Coring>,
    pub u: UResult,
    pub iso: CoringMorphism,
    pub report: Report,
}

pub fn d_variant_iso(cdga: &Arc<SemiFreeCdga>) -> Result<DVariant, EquivError> {
    let alg = cdga.algebra().clone();
    let v = cdga.v();
    let (da, rv) = (alg.dim(), v.rank());
    let rank = da + rv;
    let left: Vec<Vec<SVec>> = (0..da)
        .map(|k| {
            (0..rank)
                .map(|m| {
                    if m < da {
                        alg.basis_mul(k, m).minus(&shift(&v.act_right_basis(&cdga.d0()[k], m), da))
                    } else {
                        shift(&v.act_left_basis(k, &SVec::unit(m - da)), da)
                    }
                })
                .collect()
        })
        .collect();
    let right: Vec<Vec<SVec>> = (0..da)
        .map(|k| {
            (0..rank)
                .map(|m| if m < da { alg.basis_mul(m, k).clone() } else { shift(&v.act_right_basis(&SVec::unit(m - da), k), da) })
                .collect()
        })
        .collect();
    let ds = Arc::new(ModuleSpace::new(alg.clone(), rank, Some(left), Some(right))?);
    let unit = alg.unit();
    let gamma = cdga.lift2(cdga.gamma());
    let mut delta = Vec::with_capacity(rank);
    for i in 0..da {
        let mut out: SVec = unit.iter().map(|(u, c)| (u * rank + i, c.clone())).collect();
        for (p, c) in &gamma {
            let (a, b) = (p / rv, p % rv);
            for (b2, c2) in &v.act_right_basis(&SVec::unit(b), i) {
                out.add_term((da + a) * rank + da + b2, &-(c * c2));
            }
        }
        delta.push(out);
    }
    for j in 0..rv {
        let mut out = SVec::new();
        for (u, c) in unit {
            out.add_term(u * rank + da + j, c);
            out.add_term((da + j) * rank + u, c);
        }
        for (p, c) in &cdga.lift2(&cdga.d1()[j]) {
            out.add_term((da + p / rv) * rank + da + p % rv, &-c.clone());
        }
        delta.push(out);
    }
    let counit: Vec<SVec> = (0..rank).map(|m| if m < da { SVec::unit(m) } else { SVec::new() }).collect();
    let d = Arc::new(Coring::new(ds, &delta, counit)?);
    let u = u_functor(cdga)?;
    let mut f1: Vec<SVec> = (0..da).map(|i| SVec::unit(i).plus(&shift(&cdga.d0()[i], da))).collect();
    f1.extend((0..rv).map(|j| SVec::unit(da + j)));
    let iso = CoringMorphism { source: d.clone(), target: u.coring().clone(), f0: (0..da).map(SVec::unit).collect(), f1 };
    let mut r = Report::new();
    r.merge("d", check_coring(&d));
    r.merge("iso", check_coring_morphism(&iso));
    let mut el = Eliminator::new(rank);
    for c in &iso.f1 {
        el.insert(c.clone());
    }
    r.record("bijective", (el.rank() != rank).then(|| json!({"rank": el.rank(), "dim": rank})));
    Ok(DVariant { d, u, iso, report: r })
}

/// The morphism `A(_B P_A, x) → cdga` of a cohesive module `P = A^n` in degree 0.
#[derive(Clone, Debug)]
pub struct Pregalois {
    pub comatrix: Comatrix,
    pub source: TBasedResult,
    pub theta: CdgaMorphism,
    pub report: Report,
}

impl Pregalois {
    /// `θ^L(c) = (ε ⊗ id)(χ ⊗ ∇(p))` on a basis vector of `C = P* ⊗_B P`.
    fn theta_l(cm: &Comatrix, conn: &ZConnection, cdga: &SemiFreeCdga, qi: usize) -> SVec {
        let (c, p) = cm.rep(qi);
        let tw = conn.tower(0);
        let mut out = SVec::new();
        for (qq, k) in &conn.components[1][0][p] {
            let (h, tu) = tw.tuple(1, *qq);
            let a = cm.evaluate(&SVec::unit(c), &SVec::unit(h));
            out.axpy(k, &cdga.v().act_left(&a, &SVec::unit(tu[0])));
        }
        out
    }
}

/// `θ0 = id`, `θ1 = θ^L|_{ker ε}`, `ω = θ^L(x)` with
/// `θ^L = (ε ⊗ id) ∘ (id ⊗ ∇)`; `nabla[p]` is `∇(p) ∈ P ⊗_A V` on the basis of `P = A^n`.
pub fn pregalois_theta(cdga: &Arc<SemiFreeCdga>, n: usize, nabla: Vec<SVec>, b: EndoBasis, x: Option<SVec>) -> Result<Pregalois, EquivError> {
    let alg = cdga.algebra().clone();
    let da = alg.dim();
    let p = Arc::new(ModuleSpace::free_right(&alg, n));
    let conn = ZConnection::new(cdga.clone(), 0, vec![p.clone()], vec![vec![vec![SVec::new(); n * da]], vec![nabla]])
        .map_err(|e| EquivError::Other(e.to_string()))?;
    let integ = conn.check();
    if !integ.all_pass() {
        let what = integ.failures().map(|c| c.check.clone()).collect::<Vec<_>>().join(", ");
        return Err(EquivError::ConnectionNotIntegrable(what));
    }
    let cm = catalog_comatrix(&alg, n, b, x).map_err(|e| match e {
        CatalogError::NotProgenerator(s) => EquivError::NotProgenerator(s),
        CatalogError::BNotClosed(s) => EquivError::BNotClosed(s),
        other => EquivError::Other(other.to_string()),
    })?;
    let tw = conn.tower(0);
    for (bi, s) in cm.b.0.iter().enumerate() {
        for h in 0..p.rank() {
            let sp = cm.endo_apply(s, &SVec::unit(h));
            let lhs = sp.apply(&conn.components[1][0]);
            let mut rhs = SVec::new();
            for (qq, k) in &conn.components[1][0][h] {
                let (hh, tu) = tw.tuple(1, *qq);
                rhs.axpy(k, &tw.tensor_t(0, &cm.endo_apply(s, &SVec::unit(hh)), 1, &SVec::unit(tu[0])));
            }
            if lhs != rhs {
                return Err(EquivError::BNotClosed(format!("d_S of B basis element {bi} is nonzero on P basis {h}")));
            }
        }
    }
    let source = t_based(&cm.based, cdga.max_degree())?;
    let coring = cm.based.coring.clone();
    let theta_l: Vec<SVec> = (0..coring.rank()).map(|qi| Pregalois::theta_l(&cm, &conn, cdga, qi)).collect();
    let f1: Vec<SVec> = source.split.cplus.inclusion.iter().map(|c| c.apply(&theta_l)).collect();
    let omega = cm.based.x.apply(&theta_l);
    let theta = CdgaMorphism { source: source.cdga.clone(), target: cdga.clone(), f0: (0..da).map(SVec::unit).collect(), f1, omega };
    let mut r = Report::new();
    r.merge("connection", integ);
    r.merge("theta", check_cdga_morphism(&theta));
    let theta_r = |v: &SVec| v.apply(&theta_l).minus(&coring.apply_counit(v).apply(cdga.d0()));
    let cs = coring.c();
    let lin = par::find_first(coring.rank() * da, |pp| {
        let (j, k) = (pp / da, pp % da);
        let lhs = theta_r(&cs.act_right_basis(&SVec::unit(j), k));
        let rhs = cdga.v().act_right_basis(&theta_r(&SVec::unit(j)), k);
        (lhs != rhs).then(|| json!({"basis": j, "alg": k}))
    });
    r.record("theta_r_right_linear", lin);
    let wr = theta_r(&cm.based.x);
    r.record("omega_left_equals_right", (wr != theta.omega).then(|| mismatch("x", 0, &theta.omega, &wr)));
    Ok(Pregalois { comatrix: cm, source, theta, report: r })
}
