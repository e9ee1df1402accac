use std::sync::Arc;

use serde_json::json;

use super::{at_degree, CdgaError, SemiFreeCdga};
use crate::algmod::{Action, ModuleSpace};
use crate::exactla::SVec;
use crate::par;
use crate::report::Report;

/// A right module over `T_A(V)` in degrees `lo..=hi` with a degree one map `d`.
///
/// Each `M^n` is a right `A`-module; `V` acts through `vact[n]`, which sends
/// the pair `(m, v)` with index `m * rank(V) + v` to `M^{n+1}`. Higher degrees of
/// `T_A(V)` act by iterating. `d` is stored for degrees `lo..hi`.
#[derive(Clone, Debug)]
pub struct CurvedModule {
    cdga: Arc<SemiFreeCdga>,
    lo: i64,
    spaces: Vec<Arc<ModuleSpace>>,
    vact: Vec<Vec<SVec>>,
    d: Vec<Vec<SVec>>,
}

impl CurvedModule {
    pub fn new(
        cdga: Arc<SemiFreeCdga>,
        lo: i64,
        spaces: Vec<Arc<ModuleSpace>>,
        vact: Vec<Vec<SVec>>,
        d: Vec<Vec<SVec>>,
    ) -> Result<Self, CdgaError> {
        let steps = spaces.len().saturating_sub(1);
        if vact.len() != steps || d.len() != steps {
            return Err(CdgaError::Shape("one V-action and one differential per degree below the top".into()));
        }
        let rv = cdga.v().rank();
        for (i, s) in spaces.iter().enumerate() {
            if !s.has_right() || s.algebra() != cdga.algebra() {
                return Err(CdgaError::Shape(format!("degree {} is not a right module over A", lo + i as i64)));
            }
            if i < steps {
                let next = spaces[i + 1].rank();
                let out = |cols: &[SVec]| cols.iter().any(|c| c.max_index().is_some_and(|m| m >= next));
                if vact[i].len() != s.rank() * rv || out(&vact[i]) || d[i].len() != s.rank() || out(&d[i]) {
                    return Err(CdgaError::Shape(format!("maps out of degree {}", lo + i as i64)));
                }
            }
        }
        Ok(CurvedModule { cdga, lo, spaces, vact, d })
    }

    /// `(T_A(V), d)` in degrees `0..=D`.
    pub fn regular_right(cdga: &Arc<SemiFreeCdga>) -> Self {
        let t = cdga.t();
        let dm = cdga.max_degree();
        let rv = cdga.v().rank();
        let spaces = (0..=dm).map(|n| t.space(n).clone()).collect();
        let vact = (0..dm)
            .map(|n| par::map_range(t.dim(n) * rv, |p| t.append(n, &SVec::unit(p / rv), &SVec::unit(p % rv))))
            .collect();
        let d = (0..dm).map(|n| cdga.d(n).to_vec()).collect();
        CurvedModule { cdga: cdga.clone(), lo: 0, spaces, vact, d }
    }

    /// The zero module on `lo..=hi`.
    pub fn zero(cdga: &Arc<SemiFreeCdga>, lo: i64, hi: i64) -> Self {
        let n = (hi - lo + 1).max(0) as usize;
        let z = Arc::new(ModuleSpace::zero(cdga.algebra(), false, true));
        CurvedModule {
            cdga: cdga.clone(),
            lo,
            spaces: vec![z; n],
            vact: vec![Vec::new(); n.saturating_sub(1)],
            d: vec![Vec::new(); n.saturating_sub(1)],
        }
    }

    pub fn cdga(&self) -> &Arc<SemiFreeCdga> {
        &self.cdga
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.spaces.len() as i64 - 1
    }

    fn idx(&self, n: i64) -> usize {
        assert!(n >= self.lo && n <= self.hi(), "degree {n} outside the window {}..{}", self.lo, self.hi());
        (n - self.lo) as usize
    }

    pub fn in_window(&self, n: i64) -> bool {
        n >= self.lo && n <= self.hi()
    }

    pub fn space(&self, n: i64) -> &Arc<ModuleSpace> {
        &self.spaces[self.idx(n)]
    }

    /// Rank of `M^n`, zero outside the window.
    pub fn rank(&self, n: i64) -> usize {
        if self.in_window(n) {
            self.spaces[self.idx(n)].rank()
        } else {
            0
        }
    }

    pub fn vact(&self, n: i64) -> &[SVec] {
        &self.vact[self.idx(n)]
    }

    pub fn d(&self, n: i64) -> &[SVec] {
        &self.d[self.idx(n)]
    }

    pub fn apply_d(&self, n: i64, x: &SVec) -> SVec {
        x.apply(self.d(n))
    }

    fn act_v_basis(&self, n: i64, x: &SVec, v: usize) -> SVec {
        let rv = self.cdga.v().rank();
        let cols = self.vact(n);
        let mut out = SVec::new();
        for (m, c) in x {
            out.axpy(c, &cols[m * rv + v]);
        }
        out
    }

    /// `x · w` for `x ∈ M^n`, `w ∈ V`.
    pub fn act_v(&self, n: i64, x: &SVec, w: &SVec) -> SVec {
        let mut out = SVec::new();
        for (v, c) in w {
            out.axpy(c, &self.act_v_basis(n, x, *v));
        }
        out
    }

    /// `x · b` for `x ∈ M^n` and `b` of degree `k` in `T_A(V)`.
    pub fn act_t(&self, n: i64, x: &SVec, k: usize, b: &SVec) -> SVec {
        if k == 0 {
            return self.space(n).act_right(x, b);
        }
        let t = self.cdga.t();
        let mut out = SVec::new();
        for (q, c) in b {
            let mut y = x.clone();
            for (i, &v) in t.tuple(k, *q).iter().enumerate() {
                if y.is_zero() {
                    break;
                }
                y = self.act_v_basis(n + i as i64, &y, v);
            }
            out.axpy(c, &y);
        }
        out
    }
}

/// Balancing of the `V`-action and the Leibniz rule against generators of
/// degrees 0 and 1.
fn structure_checks(m: &CurvedModule, r: &mut Report) {
    let cdga = m.cdga();
    let alg = cdga.algebra();
    let v = cdga.v();
    let (da, rv) = (alg.dim(), v.rank());
    let (lo, hi) = (m.lo(), m.hi());
    let mut bal = None;
    for n in lo..hi {
        let rk = m.rank(n);
        bal = par::find_first(rk * da * rv, |p| {
            let (x, k, w) = (p / (da * rv), (p / rv) % da, p % rv);
            let ex = SVec::unit(x);
            let sp = m.space(n);
            let l1 = m.act_v(n, &sp.act_right_basis(&ex, k), &SVec::unit(w));
            let l2 = m.act_v(n, &ex, &v.act_left_basis(k, &SVec::unit(w)));
            if l1 != l2 {
                return Some(json!({"degree": n, "basis": x, "alg": k, "v": w, "side": "middle"}));
            }
            let r1 = m.act_v(n, &ex, &v.act_right_basis(&SVec::unit(w), k));
            let r2 = m.space(n + 1).act_right_basis(&m.act_v(n, &ex, &SVec::unit(w)), k);
            (r1 != r2).then(|| json!({"degree": n, "basis": x, "alg": k, "v": w, "side": "right"}))
        });
        if bal.is_some() {
            break;
        }
    }
    r.record_window("action_balanced", lo, hi - 1, bal);
    let mut l0 = None;
    for n in lo..hi {
        let rk = m.rank(n);
        l0 = par::find_first(rk * da, |p| {
            let (x, k) = (p / da, p % da);
            let ex = SVec::unit(x);
            let lhs = m.apply_d(n, &m.space(n).act_right_basis(&ex, k));
            let a = m.space(n + 1).act_right_basis(&m.apply_d(n, &ex), k);
            let b = m.act_v(n, &ex, &cdga.d0()[k]);
            let rhs = if n % 2 == 0 { a.plus(&b) } else { a.minus(&b) };
            (lhs != rhs).then(|| at_degree(n, "basis", x, &lhs, &rhs))
        });
        if l0.is_some() {
            break;
        }
    }
    r.record_window("leibniz_on_a", lo, hi - 1, l0);
    let mut l1 = None;
    for n in lo..hi - 1 {
        let rk = m.rank(n);
        l1 = par::find_first(rk * rv, |p| {
            let (x, w) = (p / rv, p % rv);
            let ex = SVec::unit(x);
            let ew = SVec::unit(w);
            let lhs = m.apply_d(n + 1, &m.act_v(n, &ex, &ew));
            let a = m.act_v(n + 1, &m.apply_d(n, &ex), &ew);
            let b = m.act_t(n, &ex, 2, &cdga.d1()[w]);
            let rhs = if n % 2 == 0 { a.plus(&b) } else { a.minus(&b) };
            (lhs != rhs).then(|| at_degree(n, "basis", x, &lhs, &rhs))
        });
        if l1.is_some() {
            break;
        }
    }
    r.record_window("leibniz_on_v", lo, hi - 2, l1);
}

/// Leibniz rule and `d_M² = −(·)γ` on every basis element where both sides
/// lie in the window.
pub fn check_curved_module(m: &CurvedModule) -> Report {
    let mut r = Report::new();
    let bad = m.spaces.iter().position(|s| s.check().is_err());
    r.record("right_modules", bad.map(|i| json!({"degree": m.lo() + i as i64})));
    structure_checks(m, &mut r);
    let gamma = m.cdga().gamma();
    let mut cf = None;
    for n in m.lo()..m.hi() - 1 {
        cf = par::find_first(m.rank(n), |x| {
            let ex = SVec::unit(x);
            let lhs = m.apply_d(n + 1, &m.apply_d(n, &ex));
            let rhs = m.act_t(n, &ex, 2, gamma).neg();
            (lhs != rhs).then(|| at_degree(n, "basis", x, &lhs, &rhs))
        });
        if cf.is_some() {
            break;
        }
    }
    r.record_window("curvature", m.lo(), m.hi() - 2, cf);
    r
}

/// A curved `(A•, B•)`-bimodule in degrees `lo..=hi`.
///
/// The right structure is a [`CurvedModule`] over `B•`; `left_a[n][k]` is the
/// action of the `k`-th basis element of `A` on `E^n` and `left_v[n]` sends
/// `(v, e)` with index `v * rank(E^n) + e` to `E^{n+1}`.
#[derive(Clone, Debug)]
pub struct CurvedBimodule {
    pub left: Arc<SemiFreeCdga>,
    right_module: CurvedModule,
    left_a: Vec<Action>,
    left_v: Vec<Vec<SVec>>,
}

impl CurvedBimodule {
    pub fn new(left: Arc<SemiFreeCdga>, right_module: CurvedModule, left_a: Vec<Action>, left_v: Vec<Vec<SVec>>) -> Result<Self, CdgaError> {
        let n = right_module.spaces.len();
        if left_a.len() != n || left_v.len() != n.saturating_sub(1) {
            return Err(CdgaError::Shape("left actions".into()));
        }
        Ok(CurvedBimodule { left, right_module, left_a, left_v })
    }

    /// `(T_A(V), d)` as a bimodule over itself.
    pub fn regular(cdga: &Arc<SemiFreeCdga>) -> Self {
        let t = cdga.t();
        let dm = cdga.max_degree();
        let rv = cdga.v().rank();
        let left_a = (0..=dm).map(|n| t.space(n).left().expect("tensor powers are bimodules").clone()).collect();
        let left_v = (0..dm)
            .map(|n| {
                let r = t.dim(n);
                par::map_range(rv * r, |p| t.mul(1, &SVec::unit(p / r), n, &SVec::unit(p % r)))
            })
            .collect();
        CurvedBimodule { left: cdga.clone(), right_module: CurvedModule::regular_right(cdga), left_a, left_v }
    }

    pub fn right(&self) -> &Arc<SemiFreeCdga> {
        self.right_module.cdga()
    }

    pub fn as_right_module(&self) -> &CurvedModule {
        &self.right_module
    }

    pub fn lo(&self) -> i64 {
        self.right_module.lo()
    }

    pub fn hi(&self) -> i64 {
        self.right_module.hi()
    }

    /// `a · e` for `a ∈ A`, `e ∈ E^n`.
    pub fn act_left_a(&self, n: i64, a: &SVec, e: &SVec) -> SVec {
        let act = &self.left_a[self.right_module.idx(n)];
        let mut out = SVec::new();
        for (k, c) in a {
            for (i, x) in e {
                out.axpy(&(c * x), &act[*k][*i]);
            }
        }
        out
    }

    fn act_left_v_basis(&self, n: i64, v: usize, e: &SVec) -> SVec {
        let i = self.right_module.idx(n);
        let r = self.right_module.spaces[i].rank();
        let mut out = SVec::new();
        for (j, x) in e {
            out.axpy(x, &self.left_v[i][v * r + j]);
        }
        out
    }

    /// `b · e` for `b` of degree `k` in `T_A(V)` and `e ∈ E^n`.
    pub fn act_left_t(&self, k: usize, b: &SVec, n: i64, e: &SVec) -> SVec {
        if k == 0 {
            return self.act_left_a(n, b, e);
        }
        let t = self.left.t();
        let mut out = SVec::new();
        for (q, c) in b {
            let mut y = e.clone();
            let tu = t.tuple(k, *q);
            for (i, &v) in tu.iter().enumerate().rev() {
                let deg = n + (tu.len() - 1 - i) as i64;
                y = self.act_left_v_basis(deg, v, &y);
            }
            out.axpy(c, &y);
        }
        out
    }
}

/// Right structure, left Leibniz rule, compatibility of the two actions and
/// `d_E² = γ_A e − e γ_B`.
pub fn check_curved_bimodule(e: &CurvedBimodule) -> Report {
    let mut r = Report::new();
    let m = e.as_right_module();
    structure_checks(m, &mut r);
    let (la, lb) = (e.left.clone(), e.right().clone());
    let (da, rva) = (la.algebra().dim(), la.v().rank());
    let (db, rvb) = (lb.algebra().dim(), lb.v().rank());
    let (lo, hi) = (e.lo(), e.hi());
    let mut comm = None;
    for n in lo..=hi {
        let rk = m.rank(n);
        comm = par::find_first(rk * da, |p| {
            let (x, k) = (p / da, p % da);
            let ex = SVec::unit(x);
            let ak = SVec::unit(k);
            for j in 0..db {
                let l = m.space(n).act_right_basis(&e.act_left_a(n, &ak, &ex), j);
                let rr = e.act_left_a(n, &ak, &m.space(n).act_right_basis(&ex, j));
                if l != rr {
                    return Some(json!({"degree": n, "basis": x, "left": k, "right": j}));
                }
            }
            if n < hi {
                for w in 0..rvb {
                    let ew = SVec::unit(w);
                    let l = m.act_v(n, &e.act_left_a(n, &ak, &ex), &ew);
                    let rr = e.act_left_a(n + 1, &ak, &m.act_v(n, &ex, &ew));
                    if l != rr {
                        return Some(json!({"degree": n, "basis": x, "left": k, "right_v": w}));
                    }
                }
            }
            None
        });
        if comm.is_some() {
            break;
        }
    }
    r.record_window("actions_commute_on_a", lo, hi, comm);
    let mut commv = None;
    for n in lo..hi {
        let rk = m.rank(n);
        commv = par::find_first(rk * rva, |p| {
            let (x, v) = (p / rva, p % rva);
            let ex = SVec::unit(x);
            for j in 0..db {
                let l = m.space(n + 1).act_right_basis(&e.act_left_v_basis(n, v, &ex), j);
                let rr = e.act_left_v_basis(n, v, &m.space(n).act_right_basis(&ex, j));
                if l != rr {
                    return Some(json!({"degree": n, "basis": x, "left_v": v, "right": j}));
                }
            }
            if n + 1 < hi {
                for w in 0..rvb {
                    let ew = SVec::unit(w);
                    let l = m.act_v(n + 1, &e.act_left_v_basis(n, v, &ex), &ew);
                    let rr = e.act_left_v_basis(n + 1, v, &m.act_v(n, &ex, &ew));
                    if l != rr {
                        return Some(json!({"degree": n, "basis": x, "left_v": v, "right_v": w}));
                    }
                }
            }
            None
        });
        if commv.is_some() {
            break;
        }
    }
    r.record_window("actions_commute_on_v", lo, hi - 1, commv);
    let mut l0 = None;
    for n in lo..hi {
        let rk = m.rank(n);
        l0 = par::find_first(rk * da, |p| {
            let (x, k) = (p / da, p % da);
            let ex = SVec::unit(x);
            let ak = SVec::unit(k);
            let lhs = m.apply_d(n, &e.act_left_a(n, &ak, &ex));
            let rhs = e.act_left_t(1, &la.d0()[k], n, &ex).plus(&e.act_left_a(n + 1, &ak, &m.apply_d(n, &ex)));
            (lhs != rhs).then(|| at_degree(n, "basis", x, &lhs, &rhs))
        });
        if l0.is_some() {
            break;
        }
    }
    r.record_window("left_leibniz_on_a", lo, hi - 1, l0);
    let mut l1 = None;
    for n in lo..hi - 1 {
        let rk = m.rank(n);
        l1 = par::find_first(rk * rva, |p| {
            let (x, v) = (p / rva, p % rva);
            let ex = SVec::unit(x);
            let lhs = m.apply_d(n + 1, &e.act_left_v_basis(n, v, &ex));
            let rhs = e.act_left_t(2, &la.d1()[v], n, &ex).minus(&e.act_left_v_basis(n + 1, v, &m.apply_d(n, &ex)));
            (lhs != rhs).then(|| at_degree(n, "basis", x, &lhs, &rhs))
        });
        if l1.is_some() {
            break;
        }
    }
    r.record_window("left_leibniz_on_v", lo, hi - 2, l1);
    let mut cf = None;
    for n in lo..hi - 1 {
        cf = par::find_first(m.rank(n), |x| {
            let ex = SVec::unit(x);
            let lhs = m.apply_d(n + 1, &m.apply_d(n, &ex));
            let rhs = e.act_left_t(2, la.gamma(), n, &ex).minus(&m.act_t(n, &ex, 2, lb.gamma()));
            (lhs != rhs).then(|| at_degree(n, "basis", x, &lhs, &rhs))
        });
        if cf.is_some() {
            break;
        }
    }
    r.record_window("curvature", lo, hi - 2, cf);
    r
}
