use std::sync::Arc;

use serde_json::json;

use super::{CdgaError, CurvedBimodule, CurvedModule};
use crate::algmod::ModuleSpace;
use crate::exactla::{Eliminator, SVec, TrackedEliminator};
use crate::par;
use crate::report::{vec_json, Report};

#[derive(Clone, Debug)]
struct Level {
    /// `(generator, basis index of T^{q − deg g})`; the id of a pair is its position.
    pairs: Vec<(usize, usize)>,
    elim: TrackedEliminator,
    relations: Vec<SVec>,
}

/// Generators of a truncated right `T_A(V)`-module and all linear relations
/// among their translates `g · t`, degree by degree.
#[derive(Clone, Debug)]
pub struct Presentation {
    lo: i64,
    gens: Vec<(i64, SVec)>,
    levels: Vec<Level>,
}

impl Presentation {
    pub fn of(m: &CurvedModule) -> Result<Self, CdgaError> {
        let t = m.cdga().t();
        let da = t.dim(0);
        if m.hi() - m.lo() > t.max_degree() as i64 {
            return Err(CdgaError::WindowTooNarrow(format!(
                "module window {}..{} is wider than the algebra truncation {}",
                m.lo(),
                m.hi(),
                t.max_degree()
            )));
        }
        let mut gens: Vec<(i64, SVec)> = Vec::new();
        let mut levels = Vec::new();
        for q in m.lo()..=m.hi() {
            let rank = m.rank(q);
            let mut pairs = Vec::new();
            for (g, (dg, _)) in gens.iter().enumerate() {
                let k = (q - dg) as usize;
                pairs.extend((0..t.dim(k)).map(|tb| (g, tb)));
            }
            let images = par::map_slice(&pairs, |&(g, tb)| {
                let (dg, ge) = &gens[g];
                m.act_t(*dg, ge, (q - dg) as usize, &SVec::unit(tb))
            });
            let mut elim = TrackedEliminator::new(rank);
            let mut relations = Vec::new();
            for img in images {
                if let Err(rel) = elim.insert(img) {
                    relations.push(rel);
                }
            }
            for i in 0..rank {
                let e = SVec::unit(i);
                if elim.contains(&e) {
                    continue;
                }
                let g = gens.len();
                gens.push((q, e.clone()));
                for a in 0..da {
                    pairs.push((g, a));
                    if let Err(rel) = elim.insert(m.space(q).act_right_basis(&e, a)) {
                        relations.push(rel);
                    }
                }
            }
            levels.push(Level { pairs, elim, relations });
        }
        Ok(Presentation { lo: m.lo(), gens, levels })
    }

    pub fn generators(&self) -> &[(i64, SVec)] {
        &self.gens
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.levels.len() as i64 - 1
    }

    /// Smallest and largest generator degree.
    pub fn generator_degrees(&self) -> Option<(i64, i64)> {
        let lo = self.gens.iter().map(|g| g.0).min()?;
        let hi = self.gens.iter().map(|g| g.0).max()?;
        Some((lo, hi))
    }

    fn level(&self, q: i64) -> &Level {
        &self.levels[(q - self.lo) as usize]
    }

    /// `x ∈ M^q` as a combination of pairs `(g, t)`.
    pub fn express(&self, q: i64, x: &SVec) -> Vec<(usize, usize, crate::exactla::Scalar)> {
        let lv = self.level(q);
        let ids = lv.elim.express(x).expect("generators span the module");
        ids.iter().map(|(id, c)| (lv.pairs[*id].0, lv.pairs[*id].1, c.clone())).collect()
    }

    pub fn relation_count(&self) -> usize {
        self.levels.iter().map(|l| l.relations.len()).sum()
    }
}

/// Graded right `T_A(V)`-linear maps of a fixed degree from a presented module
/// to a curved module, up to the target's truncation.
///
/// An element is given by its values on generators; relations in degrees whose
/// image would leave the target window cannot be imposed, in which case
/// `complete` is false.
#[derive(Clone, Debug)]
pub struct GradedHom {
    pub degree: i64,
    pres: Arc<Presentation>,
    target: Arc<CurvedModule>,
    offsets: Vec<usize>,
    free_pos: Vec<Option<usize>>,
    basis: Vec<Vec<SVec>>,
    pub complete: bool,
}

impl GradedHom {
    pub fn new(pres: &Arc<Presentation>, target: &Arc<CurvedModule>, degree: i64) -> Result<Self, CdgaError> {
        let mut offsets = Vec::with_capacity(pres.gens.len());
        let mut unknowns = 0;
        for (dg, _) in &pres.gens {
            if dg + degree > target.hi() {
                return Err(CdgaError::WindowTooNarrow(format!(
                    "a generator of degree {dg} has its degree {degree} image above the target window"
                )));
            }
            offsets.push(unknowns);
            unknowns += target.rank(dg + degree);
        }
        let mut el = Eliminator::new(unknowns);
        let mut complete = true;
        for (li, lv) in pres.levels.iter().enumerate() {
            let q = pres.lo + li as i64;
            if lv.relations.is_empty() || q + degree < target.lo() {
                continue;
            }
            if q + degree > target.hi() {
                complete = false;
                continue;
            }
            let rt = target.rank(q + degree);
            let rows = par::map_slice(&lv.relations, |rel| {
                let mut rows = vec![SVec::new(); rt];
                for (id, c) in rel {
                    let (g, tb) = lv.pairs[*id];
                    let dg = pres.gens[g].0;
                    let k = (q - dg) as usize;
                    for u in 0..target.rank(dg + degree) {
                        let img = target.act_t(dg + degree, &SVec::unit(u), k, &SVec::unit(tb));
                        for (row, x) in &img {
                            rows[*row].add_term(offsets[g] + u, &(c * x));
                        }
                    }
                }
                rows
            });
            for rs in rows {
                for r in rs {
                    el.insert(r);
                }
            }
        }
        let (free, kernel) = el.kernel();
        let mut free_pos = vec![None; unknowns];
        for (p, &f) in free.iter().enumerate() {
            free_pos[f] = Some(p);
        }
        let mut h = GradedHom { degree, pres: pres.clone(), target: target.clone(), offsets, free_pos, basis: Vec::new(), complete };
        h.basis = kernel.iter().map(|v| h.split(v)).collect();
        Ok(h)
    }

    fn split(&self, v: &SVec) -> Vec<SVec> {
        let mut vals = vec![SVec::new(); self.pres.gens.len()];
        for (u, c) in v {
            let g = self.offsets.partition_point(|&o| o <= *u) - 1;
            vals[g].add_term(u - self.offsets[g], c);
        }
        vals
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn presentation(&self) -> &Arc<Presentation> {
        &self.pres
    }

    pub fn target(&self) -> &Arc<CurvedModule> {
        &self.target
    }

    /// Values on generators of the element with coordinates `h`.
    pub fn vals(&self, h: &SVec) -> Vec<SVec> {
        let mut out = vec![SVec::new(); self.pres.gens.len()];
        for (b, c) in h {
            for (o, v) in out.iter_mut().zip(&self.basis[*b]) {
                o.axpy(c, v);
            }
        }
        out
    }

    pub fn coords(&self, vals: &[SVec]) -> SVec {
        let mut out = SVec::new();
        for (g, v) in vals.iter().enumerate() {
            for (u, c) in v {
                if let Some(p) = self.free_pos[self.offsets[g] + u] {
                    out.add_term(p, c);
                }
            }
        }
        out
    }

    /// Whether generator values satisfy every imposed relation.
    pub fn contains(&self, vals: &[SVec]) -> bool {
        self.vals(&self.coords(vals)) == vals
    }

    /// `f(x)` for `x` in degree `q` of the source.
    pub fn eval(&self, vals: &[SVec], q: i64, x: &SVec) -> SVec {
        let mut out = SVec::new();
        for (g, tb, c) in self.pres.express(q, x) {
            if vals[g].is_zero() {
                continue;
            }
            let dg = self.pres.gens[g].0;
            out.axpy(&c, &self.target.act_t(dg + self.degree, &vals[g], (q - dg) as usize, &SVec::unit(tb)));
        }
        out
    }
}

/// Graded hom spaces between curved modules with `d(f) = d_N f − (−1)^n f d_M`.
#[derive(Clone, Debug)]
pub struct HomComplex {
    pub lo: i64,
    pub homs: Vec<GradedHom>,
    /// `d[i]` maps the basis of degree `lo + i` to degree `lo + i + 1`.
    pub d: Vec<Vec<SVec>>,
    /// `(degree, rank of cohomology)` where both adjacent differentials are known.
    pub cohomology: Vec<(i64, usize)>,
    pub report: Report,
}

impl HomComplex {
    pub fn hi(&self) -> i64 {
        self.lo + self.homs.len() as i64 - 1
    }

    pub fn hom(&self, n: i64) -> &GradedHom {
        &self.homs[(n - self.lo) as usize]
    }

    pub fn cohomology_rank(&self, n: i64) -> Option<usize> {
        self.cohomology.iter().find(|c| c.0 == n).map(|c| c.1)
    }
}

/// `d(f)` on generator values, for `f` of degree `i` from `m` to `n`.
fn hom_differential(h: &GradedHom, m: &CurvedModule, n: &CurvedModule, vals: &[SVec]) -> Vec<SVec> {
    let i = h.degree;
    h.pres
        .gens
        .iter()
        .enumerate()
        .map(|(g, (dg, ge))| {
            let a = if vals[g].is_zero() { SVec::new() } else { n.apply_d(dg + i, &vals[g]) };
            let b = h.eval(vals, dg + 1, &m.apply_d(*dg, ge));
            if i % 2 == 0 {
                a.minus(&b)
            } else {
                a.plus(&b)
            }
        })
        .collect()
}

fn rank_of(cols: &[SVec], dim: usize) -> usize {
    let mut el = Eliminator::new(dim);
    for c in cols {
        el.insert(c.clone());
    }
    el.rank()
}

/// The hom complex between two curved modules over the same algebra.
pub fn hom_complex(m: &CurvedModule, n: &CurvedModule) -> Result<HomComplex, CdgaError> {
    let pres = Arc::new(Presentation::of(m)?);
    let target = Arc::new(n.clone());
    let mut report = Report::new();
    let Some((_, gmax)) = pres.generator_degrees() else {
        report.note("the source has no generators, so every hom space is zero");
        return Ok(HomComplex { lo: 0, homs: Vec::new(), d: Vec::new(), cohomology: Vec::new(), report });
    };
    if gmax >= m.hi() {
        return Err(CdgaError::WindowTooNarrow(format!("the source has generators in its top degree {gmax}")));
    }
    let (lo, hi) = (n.lo() - gmax, n.hi() - gmax);
    let homs = (lo..=hi).map(|i| GradedHom::new(&pres, &target, i)).collect::<Result<Vec<_>, _>>()?;
    let mut d = Vec::new();
    let mut closed = None;
    for i in lo..hi {
        let (h, h1) = (&homs[(i - lo) as usize], &homs[(i - lo + 1) as usize]);
        let cols = par::map_range(h.dim(), |b| {
            let img = hom_differential(h, m, n, &h.vals(&SVec::unit(b)));
            (h1.coords(&img), h1.contains(&img))
        });
        if closed.is_none() {
            closed = cols.iter().position(|c| !c.1).map(|b| json!({"degree": i, "basis": b}));
        }
        d.push(cols.into_iter().map(|c| c.0).collect::<Vec<_>>());
    }
    report.record_window("differential_preserves_linearity", lo, hi - 1, closed);
    let mut sq = None;
    for i in 0..d.len().saturating_sub(1) {
        sq = (0..d[i].len()).find_map(|b| {
            let dd = d[i][b].apply(&d[i + 1]);
            (!dd.is_zero()).then(|| json!({"degree": lo + i as i64, "basis": b, "d_squared": vec_json(&dd)}))
        });
        if sq.is_some() {
            break;
        }
    }
    report.record_window("d_squared_zero", lo, hi - 2, sq);
    if homs.iter().any(|h| !h.complete) {
        report.note("relations above the target window were not imposed on some hom spaces");
    }
    let mut cohomology = Vec::new();
    for i in lo..hi {
        let k = (i - lo) as usize;
        let dim = homs[k].dim();
        let kernel = dim - rank_of(&d[k], homs[k + 1].dim());
        let image = if k == 0 { 0 } else { rank_of(&d[k - 1], dim) };
        cohomology.push((i, kernel - image));
    }
    Ok(HomComplex { lo, homs, d, cohomology, report })
}

/// `Ξ_B(E, M)`: graded right `B•`-linear maps `E → M`, a curved `A•`-module
/// through the left action on `E`, with `d(ξ) = d_M ξ − (−1)^{|ξ|} ξ d_E`.
pub fn induced_xi_module(e: &CurvedBimodule, m: &CurvedModule) -> Result<(CurvedModule, Report), CdgaError> {
    let er = e.as_right_module();
    if er.cdga() != m.cdga() && **er.cdga() != **m.cdga() {
        return Err(CdgaError::DomainMismatch);
    }
    let pres = Arc::new(Presentation::of(er)?);
    let target = Arc::new(m.clone());
    let la = e.left.clone();
    let mut report = Report::new();
    let Some((_, gmax)) = pres.generator_degrees() else {
        return Ok((CurvedModule::zero(&la, 0, -1), report));
    };
    if gmax >= er.hi() {
        return Err(CdgaError::WindowTooNarrow(format!("E has generators in its top degree {gmax}")));
    }
    let (lo, hi) = (m.lo() - gmax, m.hi() - gmax);
    if lo > hi {
        return Err(CdgaError::WindowTooNarrow("the target window is empty".into()));
    }
    let homs = (lo..=hi).map(|i| GradedHom::new(&pres, &target, i)).collect::<Result<Vec<_>, _>>()?;
    if homs.iter().any(|h| !h.complete) {
        report.note("relations above the target window were not imposed on some degrees of Ξ");
    }
    let da = la.algebra().dim();
    let rva = la.v().rank();
    let gens = pres.gens.clone();
    let mut bad = None;
    let mut spaces = Vec::new();
    for h in &homs {
        let action: Vec<Vec<SVec>> = (0..da)
            .map(|k| {
                par::map_range(h.dim(), |b| {
                    let vals = h.vals(&SVec::unit(b));
                    let img: Vec<SVec> =
                        gens.iter().map(|(dg, ge)| h.eval(&vals, *dg, &e.act_left_a(*dg, &SVec::unit(k), ge))).collect();
                    h.coords(&img)
                })
            })
            .collect();
        spaces.push(Arc::new(ModuleSpace::from_parts(la.algebra().clone(), h.dim(), None, Some(action))));
    }
    let mut vact = Vec::new();
    let mut d = Vec::new();
    for i in lo..hi {
        let (h, h1) = (&homs[(i - lo) as usize], &homs[(i - lo + 1) as usize]);
        let va = par::map_range(h.dim() * rva, |p| {
            let (b, v) = (p / rva, p % rva);
            let vals = h.vals(&SVec::unit(b));
            let img: Vec<SVec> = gens
                .iter()
                .map(|(dg, ge)| h.eval(&vals, dg + 1, &e.act_left_t(1, &SVec::unit(v), *dg, ge)))
                .collect();
            (h1.coords(&img), h1.contains(&img))
        });
        let dd = par::map_range(h.dim(), |b| {
            let img = hom_differential(h, er, m, &h.vals(&SVec::unit(b)));
            (h1.coords(&img), h1.contains(&img))
        });
        if bad.is_none() && va.iter().chain(&dd).any(|x| !x.1) {
            bad = Some(json!({"degree": i}));
        }
        vact.push(va.into_iter().map(|x| x.0).collect());
        d.push(dd.into_iter().map(|x| x.0).collect());
    }
    report.record_window("xi_closed_under_action_and_d", lo, hi - 1, bad);
    let module = CurvedModule::new(la, lo, spaces, vact, d)?;
    Ok((module, report))
}

/// `M ⊗_{A•} E` with `d(m ⊗ e) = d_M(m) ⊗ e + (−1)^{|m|} m ⊗ d_E(e)`.
///
/// The output window is `lo(M) + lo(E) ..= min(hi(M) + lo(E), lo(M) + hi(E))`,
/// where every summand and every balancing relation is available.
pub fn induced_tensor_module(m: &CurvedModule, e: &CurvedBimodule) -> Result<CurvedModule, CdgaError> {
    let er = e.as_right_module();
    if **m.cdga() != *e.left {
        return Err(CdgaError::DomainMismatch);
    }
    let lb = er.cdga().clone();
    let (lo, hi) = (m.lo() + er.lo(), (m.hi() + er.lo()).min(m.lo() + er.hi()));
    if lo > hi {
        return Err(CdgaError::WindowTooNarrow("the output window is empty".into()));
    }
    let la = e.left.clone();
    let (da, rva) = (la.algebra().dim(), la.v().rank());
    let (db, rvb) = (lb.algebra().dim(), lb.v().rank());
    // blocks[p] lists (i, offset) for the summands M^i ⊗ E^{p−i}
    let blocks: Vec<Vec<(i64, usize)>> = (lo..=hi)
        .map(|p| {
            let mut off = 0;
            let mut out = Vec::new();
            for i in m.lo().max(p - er.hi())..=m.hi().min(p - er.lo()) {
                out.push((i, off));
                off += m.rank(i) * er.rank(p - i);
            }
            out
        })
        .collect();
    let plain_dim = |p: i64| blocks[(p - lo) as usize].iter().map(|&(i, o)| o + m.rank(i) * er.rank(p - i)).max().unwrap_or(0);
    let offset = |p: i64, i: i64| blocks[(p - lo) as usize].iter().find(|b| b.0 == i).map(|b| b.1);
    let pair = |p: i64, i: i64, x: &SVec, y: &SVec| -> SVec {
        let Some(o) = offset(p, i) else { return SVec::new() };
        let re = er.rank(p - i);
        let mut out = SVec::new();
        for (a, c) in x {
            for (b, d) in y {
                out.add_term(o + a * re + b, &(c * d));
            }
        }
        out
    };
    let mut quotients = Vec::new();
    for p in lo..=hi {
        let mut el = Eliminator::new(plain_dim(p));
        for &(i, _) in &blocks[(p - lo) as usize] {
            let j = p - i;
            let (rm, re) = (m.rank(i), er.rank(j));
            let rels = par::map_range(rm * re * da, |x| {
                let (a, b, k) = (x / (re * da), (x / da) % re, x % da);
                let (ea, eb, ek) = (SVec::unit(a), SVec::unit(b), SVec::unit(k));
                pair(p, i, &m.space(i).act_right_basis(&ea, k), &eb).minus(&pair(p, i, &ea, &e.act_left_a(j, &ek, &eb)))
            });
            for r in rels {
                el.insert(r);
            }
            if i < m.hi() && offset(p, i + 1).is_some() && j - 1 >= er.lo() {
                let j = j - 1;
                let re = er.rank(j);
                let rels = par::map_range(rm * re * rva, |x| {
                    let (a, b, v) = (x / (re * rva), (x / rva) % re, x % rva);
                    let (ea, eb, ev) = (SVec::unit(a), SVec::unit(b), SVec::unit(v));
                    pair(p, i + 1, &m.act_v(i, &ea, &ev), &eb).minus(&pair(p, i, &ea, &e.act_left_t(1, &ev, j, &eb)))
                });
                for r in rels {
                    el.insert(r);
                }
            }
        }
        quotients.push(el.quotient());
    }
    let rep = |p: i64, q: usize| -> (i64, SVec, SVec) {
        let r = quotients[(p - lo) as usize].reps[q];
        let &(i, o) = blocks[(p - lo) as usize].iter().rev().find(|b| b.1 <= r && m.rank(b.0) * er.rank(p - b.0) > 0 && r < b.1 + m.rank(b.0) * er.rank(p - b.0)).expect("representative lies in a block");
        let re = er.rank(p - i);
        (i, SVec::unit((r - o) / re), SVec::unit((r - o) % re))
    };
    let project = |p: i64, v: &SVec| quotients[(p - lo) as usize].project(v);
    let mut spaces = Vec::new();
    for p in lo..=hi {
        let dim = quotients[(p - lo) as usize].dim();
        let action = (0..db)
            .map(|k| {
                par::map_range(dim, |q| {
                    let (i, x, y) = rep(p, q);
                    project(p, &pair(p, i, &x, &er.space(p - i).act_right_basis(&y, k)))
                })
            })
            .collect();
        spaces.push(Arc::new(ModuleSpace::from_parts(lb.algebra().clone(), dim, None, Some(action))));
    }
    let mut vact = Vec::new();
    let mut d = Vec::new();
    for p in lo..hi {
        let dim = quotients[(p - lo) as usize].dim();
        vact.push(par::map_range(dim * rvb, |x| {
            let (q, w) = (x / rvb, x % rvb);
            let (i, a, b) = rep(p, q);
            project(p + 1, &pair(p + 1, i, &a, &er.act_v(p - i, &b, &SVec::unit(w))))
        }));
        d.push(par::map_range(dim, |q| {
            let (i, a, b) = rep(p, q);
            let first = pair(p + 1, i + 1, &m.apply_d(i, &a), &b);
            let second = pair(p + 1, i, &a, &er.apply_d(p - i, &b));
            let v = if i % 2 == 0 { first.plus(&second) } else { first.minus(&second) };
            project(p + 1, &v)
        }));
    }
    CurvedModule::new(lb, lo, spaces, vact, d)
}
