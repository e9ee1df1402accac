use std::sync::Arc;

use serde_json::json;

use super::{counit_slot, sign, Comodule, ComodError, ComoduleComplex};
use crate::algmod::{direct_sum, ModuleSpace, ModuleTower};
use crate::catalog::shift;
use crate::cdga::{check_curved_module, CurvedModule, SemiFreeCdga};
use crate::coring::BasedCoring;
use crate::equiv::{t_based, t_flat, u_functor, UResult};
use crate::exactla::SVec;
use crate::par;
use crate::report::Report;

/// A ℤ-connection on a graded right `A`-module `M^lo, …, M^hi` over a
/// semi-free curved DGA.
///
/// `components[k][l - lo]` holds `∇^{k,l}` on the basis of `M^l`, valued in
/// `M^{l-k+1} ⊗_A T^k`. The assembled covariant derivative lives on
/// `⊕_l M^l ⊗_A T^{n-l}` in total degrees `lo ..= lo + D`.
#[derive(Clone, Debug)]
pub struct ZConnection {
    pub cdga: Arc<SemiFreeCdga>,
    pub lo: i64,
    pub spaces: Vec<Arc<ModuleSpace>>,
    pub components: Vec<Vec<Vec<SVec>>>,
    towers: Vec<Arc<ModuleTower>>,
    /// Block offsets of `M^l ⊗ T^{n-l}` inside the assembled degree `n`.
    offsets: Vec<Vec<usize>>,
    pub module: CurvedModule,
}

impl ZConnection {
    pub fn new(cdga: Arc<SemiFreeCdga>, lo: i64, spaces: Vec<Arc<ModuleSpace>>, components: Vec<Vec<Vec<SVec>>>) -> Result<Self, ComodError> {
        let dmax = cdga.max_degree();
        if spaces.is_empty() {
            return Err(ComodError::Shape("a connection needs at least one degree".into()));
        }
        if components.is_empty() || components.len() > dmax + 1 {
            return Err(ComodError::Shape("components ∇^k for k = 0 ..= D".into()));
        }
        let t = cdga.t().clone();
        let towers = spaces
            .iter()
            .map(|s| ModuleTower::new(s, &t, dmax).map(Arc::new))
            .collect::<Result<Vec<_>, _>>()?;
        let hi = lo + spaces.len() as i64 - 1;
        for (k, ck) in components.iter().enumerate() {
            if ck.len() != spaces.len() {
                return Err(ComodError::Shape(format!("one ∇^{k} per degree")));
            }
            for (i, cols) in ck.iter().enumerate() {
                let l = lo + i as i64;
                let tl = l - k as i64 + 1;
                let bound = if tl >= lo && tl <= hi { towers[(tl - lo) as usize].dim(k) } else { 0 };
                if cols.len() != spaces[i].rank() || cols.iter().any(|v| v.max_index().is_some_and(|m| m >= bound)) {
                    return Err(ComodError::Shape(format!("∇^({k},{l}) has the wrong shape")));
                }
            }
        }
        let top = lo + dmax as i64;
        let mut offsets = Vec::new();
        let mut total_spaces = Vec::new();
        for n in lo..=top {
            let mut offs = Vec::new();
            let mut sp = ModuleSpace::zero(cdga.algebra(), false, true);
            for l in lo..=hi.min(n) {
                offs.push(sp.rank());
                sp = direct_sum(&sp, &towers[(l - lo) as usize].space((n - l) as usize).as_right());
            }
            offsets.push(offs);
            total_spaces.push(Arc::new(sp));
        }
        let rv = cdga.v().rank();
        let block = |n: i64, l: i64| offsets[(n - lo) as usize][(l - lo) as usize];
        let mut vact = Vec::new();
        let mut d = Vec::new();
        for n in lo..top {
            let rank = total_spaces[(n - lo) as usize].rank();
            let owner = |p: usize| -> (i64, usize) {
                let offs = &offsets[(n - lo) as usize];
                let i = offs.iter().rposition(|&o| o <= p).expect("a block");
                (lo + i as i64, p - offs[i])
            };
            vact.push(par::map_range(rank * rv, |p| {
                let ((l, y), v) = (owner(p / rv), p % rv);
                let j = (n - l) as usize;
                shift(&towers[(l - lo) as usize].append(j, &SVec::unit(y), &SVec::unit(v)), block(n + 1, l))
            }));
            d.push(par::map_range(rank, |p| {
                let (l, y) = owner(p);
                let j = (n - l) as usize;
                let tw = &towers[(l - lo) as usize];
                let (h, tup) = tw.tuple(j, y);
                let tvec = if j == 0 { t.unit() } else { t.proj(tup) };
                let mut out = SVec::new();
                for (k, ck) in components.iter().enumerate() {
                    let tl = l - k as i64 + 1;
                    if tl < lo || tl > hi || k + j > dmax {
                        continue;
                    }
                    let img = &ck[(l - lo) as usize][h];
                    if img.is_zero() {
                        continue;
                    }
                    let y = towers[(tl - lo) as usize].tensor_t(k, img, j, &tvec);
                    out.add(&shift(&y, block(n + 1, tl)));
                }
                if j >= 1 {
                    let dt = cdga.apply_d(j, &tvec);
                    let y = tw.tensor_t(0, &SVec::unit(h), j + 1, &dt);
                    out.axpy(&sign(l), &shift(&y, block(n + 1, l)));
                }
                out
            }));
        }
        let module = CurvedModule::new(cdga.clone(), lo, total_spaces, vact, d)?;
        Ok(ZConnection { cdga, lo, spaces, components, towers, offsets, module })
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.spaces.len() as i64 - 1
    }

    /// `M^l ⊗_A T^k`.
    pub fn tower(&self, l: i64) -> &Arc<ModuleTower> {
        &self.towers[(l - self.lo) as usize]
    }

    /// Position of `M^l ⊗ T^{n-l}` in the assembled degree `n`.
    pub fn block_offset(&self, n: i64, l: i64) -> usize {
        self.offsets[(n - self.lo) as usize][(l - self.lo) as usize]
    }

    /// Leibniz rule and integrability of the assembled covariant derivative.
    pub fn check(&self) -> Report {
        check_curved_module(&self.module)
    }
}

/// The ℤ-connection `∇^0 = δ`, `∇^1(m) = (−1)^l ρ_l(m) − (−1)^l m ⊗ x` of a
/// comodule complex, over `T♭(C, x)` or, when `based`, over `T(C, x)`.
pub fn connection_from_complex(c: &ComoduleComplex, x: &SVec, based: bool, max_degree: usize) -> Result<(ZConnection, Report), ComodError> {
    let coring = c.coring().clone();
    let mut report = Report::new();
    let (cdga, split) = if based {
        if coring.apply_counit(x) != *coring.algebra().unit() {
            return Err(ComodError::NotBased);
        }
        let b = BasedCoring::new(coring.clone(), x.clone())?;
        let r = t_based(&b, max_degree)?;
        (r.cdga, Some(r.split))
    } else {
        (t_flat(&coring, x, max_degree)?.cdga, None)
    };
    let t = cdga.t().clone();
    let spaces: Vec<Arc<ModuleSpace>> = c.terms().iter().map(|m| m.space().clone()).collect();
    let mut nabla1 = Vec::new();
    let mut off_cplus = None;
    for (i, m) in c.terms().iter().enumerate() {
        let l = c.lo() + i as i64;
        let tw = m.tower(1);
        let target = ModuleTower::new(m.space(), &t, 1)?;
        let cols: Vec<SVec> = (0..m.rank())
            .map(|h| {
                let mut y = m.rho()[h].clone();
                y.sub(&tw.tensor_t(0, &SVec::unit(h), 1, x));
                y = y.scaled(&sign(l));
                if off_cplus.is_none() && !counit_slot(&coring, &tw, 1, 1, &y).is_zero() && based {
                    off_cplus = Some(json!({"degree": l, "basis": h}));
                }
                let mut out = SVec::new();
                for (qq, cf) in &y {
                    let (hh, tup) = tw.tuple(1, *qq);
                    let w = match &split {
                        Some(s) => s.pi_l_plus(&SVec::unit(tup[0])),
                        None => SVec::unit(tup[0]),
                    };
                    out.axpy(cf, &target.tensor_t(0, &SVec::unit(hh), 1, &w));
                }
                out
            })
            .collect();
        nabla1.push(cols);
    }
    if based {
        report.record("nabla1_in_cplus", off_cplus);
    }
    let delta: Vec<Vec<SVec>> = (c.lo()..=c.hi())
        .map(|l| c.delta(l).map_or_else(|| vec![SVec::new(); c.rank(l)], <[SVec]>::to_vec))
        .collect();
    let z = ZConnection::new(cdga, c.lo(), spaces, vec![delta, nabla1])?;
    report.merge("connection", z.check());
    Ok((z, report))
}

/// The comodule complex `(M^l, ρ_l, ∇^{0,l})` over `U(cdga)` with
/// `ρ_l(m) = (−1)^l ∇^1(m) + m ⊗ x`.
pub fn complex_from_connection(z: &ZConnection) -> Result<(ComoduleComplex, UResult), ComodError> {
    for (k, ck) in z.components.iter().enumerate().skip(2) {
        if ck.iter().flatten().any(|v| !v.is_zero()) {
            return Err(ComodError::HigherComponentsPresent(k));
        }
    }
    let u = u_functor(&z.cdga)?;
    let coring = u.based.coring.clone();
    let x = u.based.x.clone();
    let da = z.cdga.algebra().dim();
    let mut terms = Vec::new();
    for (i, sp) in z.spaces.iter().enumerate() {
        let l = z.lo + i as i64;
        let zt = z.tower(l).clone();
        let n1 = z.components.get(1).map(|c| c[i].clone());
        let term = Comodule::with_tower(&coring, sp.clone(), |tw| {
            (0..sp.rank())
                .map(|h| {
                    let mut out = tw.tensor_t(0, &SVec::unit(h), 1, &x);
                    if let Some(n1) = &n1 {
                        for (qq, cf) in &n1[h] {
                            let (hh, tup) = zt.tuple(1, *qq);
                            out.axpy(&(cf * sign(l)), &tw.elem(hh, &[da + tup[0]]));
                        }
                    }
                    out
                })
                .collect()
        })?;
        terms.push(term);
    }
    let deltas = z.components[0][..z.spaces.len() - 1].to_vec();
    Ok((ComoduleComplex::new(coring, z.lo, terms, deltas)?, u))
}
