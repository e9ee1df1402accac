use std::sync::Arc;

use serde_json::{json, Value};

use super::{
    add_signed, assemble_divergence, build_xi, check_contramodule_complex, check_integrable, check_xi, sign, ContraError,
    ContramoduleComplex, DivergenceComponents, XiModule, ZDivergence,
};
use crate::algmod::{tensor_over_a, Algebra, HomSpace, ModuleSpace, TensorProduct};
use crate::catalog::Comatrix;
use crate::cdga::{check_curved_module, induced_xi_module, CurvedBimodule, CurvedModule, GradedHom, Presentation, SemiFreeCdga};
use crate::coring::{BasedCoring, Split};
use crate::equiv::{t_based, t_flat, TBasedResult};
use crate::exactla::SVec;
use crate::par;
use crate::report::{vec_json, Report};

/// `(d_M ∘ ξ − (−1)^n ξ ∘ d)_j` on the basis of `A^j`, for each block `j` of `Ξ^{n+1}`.
fn ex43_parts(xi: &XiModule, m: &CurvedModule, n: i64, x: &SVec) -> Vec<(usize, Vec<SVec>)> {
    let cdga = xi.cdga();
    let t = cdga.t();
    let span = xi.span();
    xi.blocks(n + 1)
        .into_iter()
        .map(|(j, _)| {
            let p = n + j as i64;
            let cols = (0..t.dim(j))
                .map(|a| {
                    let ea = SVec::unit(a);
                    let mut v = if xi.block(n, j).is_some() { m.apply_d(p, &xi.eval(n, x, j, &ea)) } else { SVec::new() };
                    if j < span {
                        add_signed(&mut v, !sign(n), &xi.eval(n, x, j + 1, &cdga.apply_d(j, &ea)));
                    }
                    v
                })
                .collect();
            (j, cols)
        })
        .collect()
}

/// `ξ ↦ d_M ∘ ξ − (−1)^n ξ ∘ d` on all of `Ξ(A, M)`.
///
/// The result is right `A`-linear in each component only when
/// `ξ_j(b)·da = ξ_{j+1}(b·da)`; otherwise the first basis family where it
/// fails is returned.
pub fn direct_divergence(xi: Arc<XiModule>, m: &CurvedModule) -> Result<ZDivergence, Value> {
    if xi.mlo() != m.lo() || xi.mhi() != m.hi() {
        return Err(json!({"reason": "Ξ was built over a different window"}));
    }
    let mut nabla = Vec::new();
    for n in xi.lo()..xi.hi() {
        let cols = par::map_range(xi.dim(n), |b| xi.from_component_cols(n + 1, &ex43_parts(&xi, m, n, &SVec::unit(b))));
        let mut out = Vec::with_capacity(cols.len());
        for (b, c) in cols.into_iter().enumerate() {
            out.push(c.ok_or_else(|| json!({"degree": n, "basis": b, "reason": "not right A-linear"}))?);
        }
        nabla.push(out);
    }
    ZDivergence::new(xi, nabla).map_err(|e| json!({"reason": e.to_string()}))
}

/// The divergence of a curved module.
#[derive(Clone, Debug)]
pub struct CurvedModuleDivergence {
    pub xi: Arc<XiModule>,
    /// `Ξ_A(A•, M)`: graded `A•`-linear maps `A• → M` with `ξ ↦ d_M ξ − (−1)^{|ξ|} ξ d`.
    pub induced: CurvedModule,
    /// Images in `Ξ(A, M)` of the basis of `induced`, per degree.
    pub embedding: Vec<Vec<SVec>>,
    /// The same formula on all of `Ξ(A, M)`, when it is well defined there.
    pub direct: Result<ZDivergence, Value>,
    pub report: Report,
}

/// `d_M ∘ ξ − (−1)^n ξ ∘ d`, realized on the `A•`-linear families `Ξ_A(A•, M)`
/// and compared with the same formula on `Ξ(A, M)` through the embedding.
///
/// Integrability is the curvature check of `Ξ_A(A•, M)` as a curved module.
/// The embedding is compared on components `j < D`, where nothing truncated
/// enters.
pub fn divergence_from_curved_module(m: &CurvedModule) -> Result<CurvedModuleDivergence, ContraError> {
    let cdga = m.cdga();
    let t = cdga.t();
    let spaces = (m.lo()..=m.hi()).map(|p| m.space(p).clone()).collect();
    let xi = Arc::new(build_xi(cdga, m.lo(), spaces)?);
    let e = CurvedBimodule::regular(cdga);
    let (induced, irep) = induced_xi_module(&e, m)?;
    let pres = Arc::new(Presentation::of(e.as_right_module())?);
    let target = Arc::new(m.clone());
    let mut embedding = Vec::new();
    for n in induced.lo()..=induced.hi() {
        let h = GradedHom::new(&pres, &target, n)?;
        if h.dim() != induced.rank(n) {
            return Err(ContraError::Shape(format!("induced module degree {n} does not match its hom space")));
        }
        let col = par::map_range(h.dim(), |b| {
            let vals = h.vals(&SVec::unit(b));
            let parts: Vec<(usize, Vec<SVec>)> =
                xi.blocks(n).into_iter().map(|(i, _)| (i, (0..t.dim(i)).map(|a| h.eval(&vals, i as i64, &SVec::unit(a))).collect())).collect();
            xi.from_component_cols(n, &parts)
        });
        let col = col
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| ContraError::Shape(format!("an A•-linear family of degree {n} has a nonlinear component")))?;
        embedding.push(col);
    }
    let mut report = Report::new();
    report.merge("input", check_curved_module(m));
    report.merge("induced", irep);
    report.merge("integrable", check_curved_module(&induced));
    let span = xi.span();
    let rv = cdga.v().rank();
    let emb = |n: i64, v: &SVec| -> SVec {
        let mut out = SVec::new();
        for (b, c) in v {
            out.axpy(c, &embedding[(n - induced.lo()) as usize][*b]);
        }
        out
    };
    let mut bad_d = None;
    let mut bad_v = None;
    for n in induced.lo()..induced.hi() {
        if bad_d.is_none() {
            bad_d = par::find_first(induced.rank(n), |b| {
                let lhs = ex43_parts(&xi, m, n, &emb(n, &SVec::unit(b)));
                let img = emb(n + 1, &induced.apply_d(n, &SVec::unit(b)));
                lhs.iter()
                    .filter(|(j, _)| *j < span)
                    .find(|(j, cols)| *cols != xi.component_cols(n + 1, &img, *j))
                    .map(|(j, _)| json!({"degree": n, "basis": b, "component": j}))
            });
        }
        if bad_v.is_none() {
            bad_v = par::find_first(induced.rank(n) * rv, |p| {
                let (b, v) = (p / rv, p % rv);
                let lhs = xi.act(n, &emb(n, &SVec::unit(b)), 1, &SVec::unit(v));
                let rhs = emb(n + 1, &induced.vact(n)[p]);
                (0..span)
                    .find(|j| xi.component(n + 1, &lhs, *j) != xi.component(n + 1, &rhs, *j))
                    .map(|j| json!({"degree": n, "basis": b, "v": v, "component": j}))
            });
        }
    }
    report.record_window("embedding_intertwines_divergence", induced.lo(), induced.hi() - 1, bad_d);
    report.record_window("embedding_is_a_module_map", induced.lo(), induced.hi() - 1, bad_v);
    let direct = direct_divergence(xi.clone(), m);
    Ok(CurvedModuleDivergence { xi, induced, embedding, direct, report })
}

/// A left ℤ-connection on a graded `(A, B)`-bimodule `M^•` in degrees `lo..=hi`.
#[derive(Clone, Debug)]
pub struct LeftConnection {
    pub cdga: Arc<SemiFreeCdga>,
    pub b: Arc<Algebra>,
    pub lo: i64,
    /// `M^n` with its left `A`-action.
    pub left: Vec<Arc<ModuleSpace>>,
    /// The same spaces with their right `B`-action.
    pub right: Vec<Arc<ModuleSpace>>,
    /// `(k, n, cols)`: `∇^{k,n}: M^n → A^k ⊗_A M^{n−k+1}` in the basis of that tensor product.
    pub components: Vec<(usize, i64, Vec<SVec>)>,
    tensors: Vec<TensorProduct>,
}

impl LeftConnection {
    pub fn new(
        cdga: Arc<SemiFreeCdga>,
        b: Arc<Algebra>,
        lo: i64,
        left: Vec<Arc<ModuleSpace>>,
        right: Vec<Arc<ModuleSpace>>,
        components: Vec<(usize, i64, Vec<SVec>)>,
    ) -> Result<Self, ContraError> {
        if left.len() != right.len() || left.is_empty() {
            return Err(ContraError::Shape("one left and one right structure per degree".into()));
        }
        for (l, r) in left.iter().zip(&right) {
            if !l.has_left() || l.algebra() != cdga.algebra() || !r.has_right() || **r.algebra() != *b || l.rank() != r.rank() {
                return Err(ContraError::Shape("M must be a left A-module and a right B-module on one space".into()));
            }
        }
        let hi = lo + left.len() as i64 - 1;
        let mut tensors = Vec::new();
        for (k, n, cols) in &components {
            let j = n - *k as i64 + 1;
            if *k > cdga.max_degree() || *n < lo || *n > hi || j < lo || j > hi {
                return Err(ContraError::Shape(format!("∇^{{{k},{n}}} leaves the window")));
            }
            let tp = tensor_over_a(cdga.t().space(*k), &left[(j - lo) as usize])?;
            let dim = tp.space.rank();
            if cols.len() != left[(n - lo) as usize].rank() || cols.iter().any(|v| v.max_index().is_some_and(|m| m >= dim)) {
                return Err(ContraError::Shape(format!("∇^{{{k},{n}}} has the wrong shape")));
            }
            tensors.push(tp);
        }
        Ok(LeftConnection { cdga, b, lo, left, right, components, tensors })
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.left.len() as i64 - 1
    }

    /// `A^k ⊗_A M^{n−k+1}` for the `i`-th component.
    pub fn tensor(&self, i: usize) -> &TensorProduct {
        &self.tensors[i]
    }

    fn idx(&self, n: i64) -> usize {
        (n - self.lo) as usize
    }
}

/// Right `B`-linearity of every component, left `A`-linearity of the
/// components with `k ≠ 1`, and `∇^{1,n}(am) = a∇^{1,n}(m) + (−1)^n da ⊗ m`.
pub fn check_left_connection(lc: &LeftConnection) -> Report {
    let mut r = Report::new();
    let t = lc.cdga.t();
    let d0 = lc.cdga.d0();
    let (db, da) = (lc.b.dim(), lc.cdga.algebra().dim());
    let mut blin = None;
    let mut leib = None;
    for (i, (k, n, cols)) in lc.components.iter().enumerate() {
        let tp = lc.tensor(i);
        let j = lc.idx(n - *k as i64 + 1);
        let src = lc.idx(*n);
        let over = |v: &SVec, f: &dyn Fn(usize, usize) -> SVec| -> SVec {
            let mut out = SVec::new();
            for (q, c) in v {
                let (a, m) = tp.rep(*q);
                out.axpy(c, &f(a, m));
            }
            out
        };
        if blin.is_none() {
            blin = par::find_first(cols.len() * db, |p| {
                let (x, bb) = (p / db, p % db);
                let lhs = lc.right[src].act_right_basis(&SVec::unit(x), bb).apply(cols);
                let rhs = over(&cols[x], &|a, m| tp.tensor(&SVec::unit(a), &lc.right[j].act_right_basis(&SVec::unit(m), bb)));
                (lhs != rhs).then(|| json!({"k": k, "degree": n, "basis": x, "b": bb, "lhs": vec_json(&lhs), "rhs": vec_json(&rhs)}))
            });
        }
        if leib.is_none() {
            leib = par::find_first(cols.len() * da, |p| {
                let (x, a) = (p / da, p % da);
                let lhs = lc.left[src].act_left_basis(a, &SVec::unit(x)).apply(cols);
                let mut rhs = over(&cols[x], &|c, m| tp.tensor(&t.space(*k).act_left_basis(a, &SVec::unit(c)), &SVec::unit(m)));
                if *k == 1 {
                    add_signed(&mut rhs, sign(*n), &tp.tensor(&d0[a], &SVec::unit(x)));
                }
                (lhs != rhs).then(|| json!({"k": k, "degree": n, "basis": x, "alg": a, "lhs": vec_json(&lhs), "rhs": vec_json(&rhs)}))
            });
        }
    }
    r.record("right_b_linear", blin);
    r.record("left_leibniz", leib);
    r
}

/// The divergence dual to a left connection.
#[derive(Clone, Debug)]
pub struct DualDivergence {
    /// `Hom_B(M^n, B)` for `n = lo..=hi`; this is `N^{−n}`.
    pub duals: Vec<HomSpace>,
    pub components: DivergenceComponents,
    pub divergence: ZDivergence,
    pub report: Report,
}

/// `∇^{−n−1}_k = Hom_B(∇^{k,n}, B)` on `N^• = Hom_B(M^{−•}, B)`, read through
/// `Hom_B(A^k ⊗_A M^{n−k+1}, B) ≅ Hom_A(A^k, N^{−n+k−1})`, then assembled.
pub fn divergence_from_left_connection(lc: &LeftConnection) -> Result<DualDivergence, ContraError> {
    let mut report = check_left_connection(lc);
    if let Some(w) = report.get("right_b_linear").and_then(|c| c.witness.clone()) {
        return Err(ContraError::NotRightBLinear(w));
    }
    if let Some(w) = report.get("left_leibniz").and_then(|c| c.witness.clone()) {
        return Err(ContraError::NotLeftConnection(w));
    }
    let alg = lc.cdga.algebra();
    let breg = Arc::new(ModuleSpace::regular(&lc.b));
    let duals = lc.right.iter().map(|m| HomSpace::new(m, &breg)).collect::<Result<Vec<_>, _>>()?;
    let nspace = |n: i64| -> Arc<ModuleSpace> {
        let (h, l) = (&duals[lc.idx(n)], &lc.left[lc.idx(n)]);
        let action = (0..alg.dim())
            .map(|a| {
                (0..h.dim())
                    .map(|f| {
                        let cols: Vec<SVec> = (0..l.rank()).map(|x| h.eval(&SVec::unit(f), &l.act_left_basis(a, &SVec::unit(x)))).collect();
                        h.from_cols(&cols).expect("left A and right B actions commute")
                    })
                    .collect()
            })
            .collect();
        Arc::new(ModuleSpace::from_parts(alg.clone(), h.dim(), None, Some(action)))
    };
    let spaces = (-lc.hi()..=-lc.lo).map(|p| nspace(-p)).collect();
    let xi = Arc::new(build_xi(&lc.cdga, -lc.hi(), spaces)?);
    let comps = DivergenceComponents::from_fn(xi.clone(), |np, k, h| {
        let n = -np - 1;
        let Some(i) = lc.components.iter().position(|(kk, nn, _)| *kk == k && *nn == n) else { return SVec::new() };
        let (tp, cols) = (lc.tensor(i), &lc.components[i].2);
        let block = xi.block(np, k).expect("block of the component");
        let inner = &duals[lc.idx(n - k as i64 + 1)];
        let vals = block.vals(h);
        let img: Vec<SVec> = cols
            .iter()
            .map(|v| {
                let mut out = SVec::new();
                for (q, c) in v {
                    let (a, m) = tp.rep(*q);
                    out.axpy(c, &inner.eval(&block.eval_vals(&vals, &SVec::unit(a)), &SVec::unit(m)));
                }
                out
            })
            .collect();
        duals[lc.idx(n)].from_cols(&img).expect("right B-linearity was checked")
    });
    let divergence = assemble_divergence(&comps)?;
    report.merge("divergence", divergence.report.clone());
    Ok(DualDivergence { duals, components: comps, divergence, report })
}

/// The cohesive left module `P*` over `𝒜(_B P_A)` with `∇¹(χ) = x ⊗ χ − χ ⊗ e`.
#[derive(Clone, Debug)]
pub struct ComatrixConnection {
    pub based: TBasedResult,
    pub connection: LeftConnection,
    pub report: Report,
}

/// `P* = Hom_A(A^n, A)` with `∇¹(χ) = x ⊗ χ − Σ_j (χ ⊗ e_j) ⊗ e*_j` in
/// `C⁺ ⊗_A P*`, for the comatrix coring `C = P* ⊗_B P` and its dual-basis element.
pub fn comatrix_left_connection(cm: &Comatrix, max_degree: usize) -> Result<ComatrixConnection, ContraError> {
    let based = t_based(&cm.based, max_degree)?;
    let cdga = based.cdga.clone();
    let alg = cm.alg.clone();
    let balg = Arc::new(cm.b_algebra()?);
    let (d, r) = (alg.dim(), cm.p.rank());
    let shift = |v: &SVec, off: usize| -> SVec { v.iter().map(|(i, c)| (i + off, c.clone())).collect() };
    let left_act = (0..d).map(|k| (0..r).map(|row| shift(alg.basis_mul(k, row % d), (row / d) * d)).collect()).collect();
    let right_act = cm.b.0.iter().map(|s| (0..r).map(|row| cm.row_times_endo(&SVec::unit(row), s)).collect()).collect();
    let left = Arc::new(ModuleSpace::new(alg.clone(), r, Some(left_act), None)?);
    let right = Arc::new(ModuleSpace::new(balg.clone(), r, None, Some(right_act))?);
    let tp = tensor_over_a(cdga.t().space(1), &left)?;
    let split: &Split = &based.split;
    let coring = &cm.based.coring;
    let x = &cm.based.x;
    let mut lands = None;
    let mut cols = Vec::with_capacity(r);
    for row in 0..r {
        let chi = SVec::unit(row);
        let mut terms = vec![(x.clone(), chi.clone(), false)];
        for j in 0..cm.n {
            let ej = cm.unit_vector(j);
            terms.push((cm.tensor(&chi, &ej), ej, true));
        }
        let mut eps = SVec::new();
        let mut val = SVec::new();
        for (c, ch, neg) in &terms {
            add_signed(&mut eps, *neg, &left.act_left(&coring.apply_counit(c), ch));
            add_signed(&mut val, *neg, &tp.tensor(&split.pi_r_plus(c), ch));
        }
        if lands.is_none() && !eps.is_zero() {
            lands = Some(json!({"row": row, "counit_image": vec_json(&eps)}));
        }
        cols.push(val);
    }
    let mut report = Report::new();
    report.record("nabla_lands_in_c_plus", lands);
    let connection = LeftConnection::new(cdga, balg, 0, vec![left], vec![right], vec![(1, 0, cols)])?;
    Ok(ComatrixConnection { based, connection, report })
}

/// Sign of the degree one component in the construction from a contramodule complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prop46Sign {
    /// `∇^n_1(ξ) = (−1)^n (α_{n+1}(ξ) − ξ(x))`; assembling these reproduces the
    /// explicit formula for `∇^{n,m}`.
    Displayed,
    /// `∇^n_1(ξ) = (−1)^n (ξ(x) − α_{n+1}(ξ))`.
    Stated,
}

/// `∇^n_0 = δ^n`, `∇^n_1` as selected by `sign`, and `∇^n_k = 0` for `k ≥ 2`.
///
/// With `split`, `Ξ` is over `T(C, x)` and `∇^n_1` is precomposed with
/// `π^R_x: C → C⁺`.
pub fn prop46_components(
    xi: Arc<XiModule>,
    cx: &ContramoduleComplex,
    x: &SVec,
    split: Option<&Split>,
    sign_choice: Prop46Sign,
) -> DivergenceComponents {
    let unit = xi.cdga().t().unit();
    let rc = cx.coring().rank();
    let xi2 = xi.clone();
    DivergenceComponents::from_fn(xi, move |n, k, h| match k {
        0 => cx.apply_delta(n, &xi2.block(n, 0).expect("block").eval(h, &unit)),
        1 => {
            let block = xi2.block(n, 1).expect("block");
            let cols: Vec<SVec> = match split {
                None => block.to_cols(h),
                Some(s) => (0..rc).map(|c| block.eval(h, &s.pi_r_plus(&SVec::unit(c)))).collect(),
            };
            let at_x = x.apply(&cols);
            let alpha = cx.term(n + 1).apply_cols(&cols).expect("ξ is right A-linear");
            let v = match sign_choice {
                Prop46Sign::Displayed => alpha.minus(&at_x),
                Prop46Sign::Stated => at_x.minus(&alpha),
            };
            if sign(n) {
                v.neg()
            } else {
                v
            }
        }
        _ => SVec::new(),
    })
}

/// `∇^{n,m}(ξ)(c) = δ(ξ_m(c)) − (−1)^n ξ_{m+1}(x ⊗ c) + Σ_{k=1}^m (−1)^{k+n+1} ξ_{m+1}(Δ_k c)
/// + (−1)^{m+n} α(ξ_{m+1} c)` over `T^♭(C, x)`, on the basis of `C^{⊗m}` for each block `m` of `Ξ^{n+1}`.
pub fn prop46_display(xi: &XiModule, cx: &ContramoduleComplex, x: &SVec, n: i64, v: &SVec) -> Vec<(usize, Vec<SVec>)> {
    let t = xi.cdga().t();
    let coring = cx.coring();
    let span = xi.span();
    let rc = coring.rank();
    xi.blocks(n + 1)
        .into_iter()
        .map(|(m, _)| {
            let mi = m as i64;
            let cols = (0..t.dim(m))
                .map(|c| {
                    let ec = SVec::unit(c);
                    let mut out = cx.apply_delta(n + mi, &xi.eval(n, v, m, &ec));
                    if m < span && xi.block(n, m + 1).is_some() {
                        add_signed(&mut out, !sign(n), &xi.eval(n, v, m + 1, &t.mul(1, x, m, &ec)));
                        for k in 1..=m {
                            add_signed(&mut out, sign(k as i64 + n + 1), &xi.eval(n, v, m + 1, &coring.delta_k(t, m, k, &ec)));
                        }
                        let cols: Vec<SVec> = (0..rc).map(|y| xi.eval(n, v, m + 1, &t.mul(m, &ec, 1, &SVec::unit(y)))).collect();
                        let alpha = cx.term(n + mi + 1).apply_cols(&cols).expect("ξ_{m+1} c is right A-linear");
                        add_signed(&mut out, sign(mi + n), &alpha);
                    }
                    out
                })
                .collect();
            (m, cols)
        })
        .collect()
}

/// The divergence of a contramodule complex.
#[derive(Clone, Debug)]
pub struct ContraDivergence {
    pub cdga: Arc<SemiFreeCdga>,
    pub components: DivergenceComponents,
    pub divergence: ZDivergence,
    pub report: Report,
}

/// The divergence over `T^♭(C, x)`, or over `T(C, x)` when `based`, assembled
/// from [`prop46_components`] with the given sign.
pub fn divergence_from_contramodule_complex(
    cx: &ContramoduleComplex,
    x: &SVec,
    based: bool,
    max_degree: usize,
    sign_choice: Prop46Sign,
) -> Result<ContraDivergence, ContraError> {
    let cr = check_contramodule_complex(cx);
    if let Some(w) = cr.get("delta_squared_zero").and_then(|c| c.witness.clone()) {
        return Err(ContraError::NotComplex(w));
    }
    if let Some(f) = cr.failures().find(|c| c.check.starts_with("delta") && c.check != "delta_squared_zero") {
        return Err(ContraError::NotContramoduleMap(json!({"check": f.check, "witness": f.witness})));
    }
    if let Some(f) = cr.failures().next() {
        return Err(ContraError::Shape(format!("{} fails", f.check)));
    }
    let coring = cx.coring();
    let (cdga, split) = if based {
        if &coring.apply_counit(x) != coring.algebra().unit() {
            return Err(ContraError::NotBased);
        }
        let tb = t_based(&BasedCoring::new(coring.clone(), x.clone())?, max_degree)?;
        (tb.cdga, Some(tb.split))
    } else {
        (t_flat(coring, x, max_degree)?.cdga, None)
    };
    let spaces = cx.terms.iter().map(|t| t.m.clone()).collect();
    let xi = Arc::new(build_xi(&cdga, cx.lo, spaces)?);
    let comps = prop46_components(xi.clone(), cx, x, split.as_ref(), sign_choice);
    let divergence = assemble_divergence(&comps)?;
    let mut report = Report::new();
    report.merge("complex", cr);
    report.merge("xi", check_xi(&xi));
    report.merge("divergence", divergence.report.clone());
    report.merge("divergence", check_integrable(&divergence));
    if split.is_none() {
        let mut bad = None;
        for n in xi.lo()..xi.hi() {
            bad = par::find_first(xi.dim(n), |b| {
                let e = SVec::unit(b);
                let img = divergence.apply(n, &e);
                prop46_display(&xi, cx, x, n, &e)
                    .into_iter()
                    .find(|(m, cols)| *cols != xi.component_cols(n + 1, &img, *m))
                    .map(|(m, _)| json!({"degree": n, "basis": b, "component": m}))
            });
            if bad.is_some() {
                break;
            }
        }
        report.record_window("matches_displayed_formula", xi.lo(), xi.hi() - 1, bad);
    }
    Ok(ContraDivergence { cdga, components: comps, divergence, report })
}
