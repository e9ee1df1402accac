use std::sync::Arc;

use serde_json::json;

use crate::algmod::{Algebra, ModuleSpace};
use crate::comod::{Comodule, ComoduleComplex};
use crate::coring::{BasedCoring, Coring};
use crate::exactla::{q, SVec, Scalar};
use crate::report::{mismatch, Report};

use super::CatalogError;

/// A coalgebra over the rationals; `comul[i]` is indexed `j * dim + k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Coalgebra {
    pub dim: usize,
    pub comul: Vec<SVec>,
    pub counit: Vec<Scalar>,
}

impl Coalgebra {
    /// Functions on the group `Z/n`, `Δ(δ_g) = Σ_{h+k=g} δ_h ⊗ δ_k`.
    pub fn functions_on_cyclic(n: usize) -> Self {
        let comul = (0..n).map(|g| (0..n).map(|h| (h * n + (g + n - h) % n, q(1))).collect()).collect();
        let counit = (0..n).map(|g| if g == 0 { q(1) } else { q(0) }).collect();
        Coalgebra { dim: n, comul, counit }
    }

    /// The one-dimensional coalgebra spanned by a group-like element.
    pub fn point() -> Self {
        Coalgebra { dim: 1, comul: vec![SVec::unit(0)], counit: vec![q(1)] }
    }

    pub fn apply_counit(&self, c: &SVec) -> Scalar {
        c.iter().fold(Scalar::zero(), |acc, (i, x)| acc + x * &self.counit[*i])
    }

    pub fn check(&self) -> Report {
        let n = self.dim;
        let mut r = Report::new();
        let coassoc = (0..n).find_map(|i| {
            let mut lhs = SVec::new();
            let mut rhs = SVec::new();
            for (p, c) in &self.comul[i] {
                let (j, k) = (p / n, p % n);
                for (p2, c2) in &self.comul[j] {
                    lhs.add_term(p2 * n + k, &(c * c2));
                }
                for (p2, c2) in &self.comul[k] {
                    rhs.add_term(j * n * n + p2, &(c * c2));
                }
            }
            (lhs != rhs).then(|| mismatch("basis", i, &lhs, &rhs))
        });
        r.record("coassociative", coassoc);
        let counital = (0..n).find_map(|i| {
            let mut l = SVec::new();
            let mut rr = SVec::new();
            for (p, c) in &self.comul[i] {
                let (j, k) = (p / n, p % n);
                l.add_term(k, &(c * &self.counit[j]));
                rr.add_term(j, &(c * &self.counit[k]));
            }
            (l != SVec::unit(i) || rr != SVec::unit(i)).then(|| json!({"basis": i}))
        });
        r.record("counital", counital);
        r
    }
}

/// `(A, C, ψ)` with `ψ[c * dim(A) + a]` the image of `c ⊗ a` in `A ⊗ C`,
/// indexed `a' * dim(C) + c'`.
#[derive(Clone, Debug)]
pub struct Entwining {
    pub a: Arc<Algebra>,
    pub c: Coalgebra,
    pub psi: Vec<SVec>,
}

impl Entwining {
    /// `ψ(c ⊗ a)` for arbitrary `c ∈ C`, `a ∈ A`.
    pub fn psi(&self, c: &SVec, a: &SVec) -> SVec {
        let da = self.a.dim();
        let mut out = SVec::new();
        for (i, x) in c {
            for (j, y) in a {
                out.axpy(&(x * y), &self.psi[i * da + j]);
            }
        }
        out
    }

    /// The flip `c ⊗ a ↦ a ⊗ c`.
    pub fn flip(a: &Arc<Algebra>, c: Coalgebra) -> Self {
        let (da, dc) = (a.dim(), c.dim);
        let psi = (0..dc * da).map(|p| SVec::unit((p % da) * dc + p / da)).collect();
        Entwining { a: a.clone(), c, psi }
    }
}

/// `Q[Z/2]` entwined with functions on `Z/2` by the graded flip
/// `δ_j ⊗ g^i ↦ (−1)^{ij} g^i ⊗ δ_j`.
pub fn super_flip_example() -> Entwining {
    let a = Arc::new(Algebra::cyclic_group(2));
    let c = Coalgebra::functions_on_cyclic(2);
    let psi = (0..4)
        .map(|p| {
            let (j, i) = (p / 2, p % 2);
            SVec::single(i * 2 + j, if i * j == 1 { q(-1) } else { q(1) })
        })
        .collect();
    Entwining { a, c, psi }
}

/// The four faces of the bow-tie diagram, numbered multiplication, unit,
/// comultiplication, counit.
pub fn check_entwining(e: &Entwining) -> Report {
    let (da, dc) = (e.a.dim(), e.c.dim);
    let mut r = Report::new();
    r.merge("coalgebra", e.c.check());
    if e.psi.len() != da * dc || e.psi.iter().any(|v| v.max_index().is_some_and(|m| m >= da * dc)) {
        r.fail("shape", json!("ψ has the wrong size"));
        return r;
    }
    // (μ ⊗ id)(id ⊗ ψ)(ψ ⊗ id)
    let mult = (0..dc * da * da).find_map(|p| {
        let (c, a, b) = (p / (da * da), (p / da) % da, p % da);
        let lhs = e.psi(&SVec::unit(c), e.a.basis_mul(a, b));
        let mut rhs = SVec::new();
        for (x, k) in &e.psi[c * da + a] {
            let (a1, c1) = (x / dc, x % dc);
            for (y, k2) in &e.psi[c1 * da + b] {
                let (b1, c2) = (y / dc, y % dc);
                for (z, k3) in e.a.basis_mul(a1, b1) {
                    rhs.add_term(z * dc + c2, &(k * k2 * k3));
                }
            }
        }
        (lhs != rhs).then(|| json!({"c": c, "a": a, "b": b}))
    });
    r.record("bow_tie_1_multiplication", mult);
    let unit = (0..dc).find_map(|c| {
        let lhs = e.psi(&SVec::unit(c), e.a.unit());
        let rhs: SVec = e.a.unit().iter().map(|(u, k)| (u * dc + c, k.clone())).collect();
        (lhs != rhs).then(|| mismatch("c", c, &lhs, &rhs))
    });
    r.record("bow_tie_2_unit", unit);
    let comul = (0..dc * da).find_map(|p| {
        let (c, a) = (p / da, p % da);
        let mut lhs = SVec::new();
        for (x, k) in &e.psi[p] {
            let (a1, c1) = (x / dc, x % dc);
            for (y, k2) in &e.c.comul[c1] {
                lhs.add_term(a1 * dc * dc + y, &(k * k2));
            }
        }
        let mut rhs = SVec::new();
        for (y, k) in &e.c.comul[c] {
            let (c1, c2) = (y / dc, y % dc);
            for (x, k2) in &e.psi[c2 * da + a] {
                let (a1, c2p) = (x / dc, x % dc);
                for (z, k3) in &e.psi[c1 * da + a1] {
                    let (a2, c1p) = (z / dc, z % dc);
                    rhs.add_term(a2 * dc * dc + c1p * dc + c2p, &(k * k2 * k3));
                }
            }
        }
        (lhs != rhs).then(|| json!({"c": c, "a": a}))
    });
    r.record("bow_tie_3_comultiplication", comul);
    let counit = (0..dc * da).find_map(|p| {
        let (c, a) = (p / da, p % da);
        let mut lhs = SVec::new();
        for (x, k) in &e.psi[p] {
            lhs.add_term(x / dc, &(k * &e.c.counit[x % dc]));
        }
        let rhs = SVec::unit(a).scaled(&e.c.counit[c]);
        (lhs != rhs).then(|| json!({"c": c, "a": a}))
    });
    r.record("bow_tie_4_counit", counit);
    r
}

/// The coring `A ⊗ C` of an entwining with its comodule complex.
#[derive(Clone, Debug)]
pub struct EntwiningData {
    pub entwining: Entwining,
    /// Basis `a * dim(C) + c` for `e_a ⊗ c`.
    pub based: BasedCoring,
    pub e: SVec,
    pub complex: ComoduleComplex,
}

impl EntwiningData {
    /// `a ⊗ c` in the coring.
    pub fn elem(&self, a: &SVec, c: &SVec) -> SVec {
        let dc = self.entwining.c.dim;
        let mut out = SVec::new();
        for (i, x) in a {
            for (j, y) in c {
                out.add_term(i * dc + j, &(x * y));
            }
        }
        out
    }
}

/// Build `C(A, C, ψ)` based at `1 ⊗ e` and the complex `V ⊗ A^{⊗ l+1}`,
/// `l = 0 ..= max_l`, for a right `C`-comodule `V` with coaction
/// `v_coaction[v]` indexed `v' * dim(C) + c`.
pub fn catalog_entwining(
    ent: &Entwining,
    e: &SVec,
    v_rank: usize,
    v_coaction: &[SVec],
    max_l: usize,
) -> Result<EntwiningData, CatalogError> {
    let rep = check_entwining(ent);
    if let Some(f) = rep.failures().next() {
        let index = f.check.strip_prefix("bow_tie_").and_then(|s| s[..1].parse().ok()).unwrap_or(0);
        return Err(CatalogError::BowTieFailed { index, witness: json!({"check": f.check, "witness": f.witness}) });
    }
    if ent.c.apply_counit(e) != q(1) {
        return Err(CatalogError::Other("ε(e) ≠ 1".into()));
    }
    let alg = &ent.a;
    let (da, dc) = (alg.dim(), ent.c.dim);
    let rank = da * dc;
    let left: Vec<Vec<SVec>> = (0..da)
        .map(|k| {
            (0..rank)
                .map(|m| {
                    let (a, c) = (m / dc, m % dc);
                    alg.basis_mul(k, a).iter().map(|(u, x)| (u * dc + c, x.clone())).collect()
                })
                .collect()
        })
        .collect();
    let right: Vec<Vec<SVec>> = (0..da)
        .map(|k| {
            (0..rank)
                .map(|m| {
                    let (a, c) = (m / dc, m % dc);
                    let mut out = SVec::new();
                    for (x, y) in &ent.psi[c * da + k] {
                        let (a1, c1) = (x / dc, x % dc);
                        for (u, z) in alg.basis_mul(a, a1) {
                            out.add_term(u * dc + c1, &(y * z));
                        }
                    }
                    out
                })
                .collect()
        })
        .collect();
    let cs = Arc::new(ModuleSpace::new(alg.clone(), rank, Some(left), Some(right))?);
    let mut delta = Vec::with_capacity(rank);
    let mut counit = Vec::with_capacity(rank);
    for a in 0..da {
        for c in 0..dc {
            let mut v = SVec::new();
            for (p, x) in &ent.c.comul[c] {
                let (c1, c2) = (p / dc, p % dc);
                for (u, y) in alg.unit() {
                    v.add_term((a * dc + c1) * rank + u * dc + c2, &(x * y));
                }
            }
            delta.push(v);
            counit.push(SVec::unit(a).scaled(&ent.c.counit[c]));
        }
    }
    let coring = Arc::new(Coring::new(cs, &delta, counit)?);
    let x: SVec = alg.unit().iter().flat_map(|(u, k)| e.iter().map(move |(c, y)| (u * dc + c, k * y))).collect();
    let based = BasedCoring::new(coring.clone(), x)?;

    if v_coaction.len() != v_rank {
        return Err(CatalogError::Shape("V coaction".into()));
    }
    let mut terms = Vec::new();
    let mut deltas = Vec::new();
    for l in 0..=max_l {
        let width = da.pow(l as u32 + 1);
        let rank_m = v_rank * width;
        // right action on the last factor
        let right: Vec<Vec<SVec>> = (0..da)
            .map(|k| {
                (0..rank_m)
                    .map(|m| {
                        let (head, last) = (m / da, m % da);
                        alg.basis_mul(last, k).iter().map(|(u, x)| (head * da + u, x.clone())).collect()
                    })
                    .collect()
            })
            .collect();
        let mspace = Arc::new(ModuleSpace::new(alg.clone(), rank_m, None, Some(right))?);
        let rho: Vec<SVec> = (0..rank_m)
            .map(|m| {
                let (v, mut word) = (m / width, m % width);
                let mut factors = vec![0; l + 1];
                for f in factors.iter_mut().rev() {
                    *f = word % da;
                    word /= da;
                }
                // pass the coalgebra factor through the algebra factors from the left
                let mut out = SVec::new();
                for (p, k) in &v_coaction[v] {
                    let (v0, c) = (p / dc, p % dc);
                    let mut states = vec![(0usize, c, k.clone())];
                    for &a in &factors {
                        let mut next = Vec::new();
                        for (w, cc, kk) in states {
                            for (x, y) in &ent.psi[cc * da + a] {
                                next.push((w * da + x / dc, x % dc, &kk * y));
                            }
                        }
                        states = next;
                    }
                    for (w, cc, kk) in states {
                        for (u, y) in alg.unit() {
                            out.add_term((v0 * width + w) * rank + u * dc + cc, &(&kk * y));
                        }
                    }
                }
                out
            })
            .collect();
        terms.push(Comodule::new(&coring, mspace, &rho)?);
        if l < max_l {
            let wide = width * da;
            let cols: Vec<SVec> = (0..rank_m)
                .map(|m| {
                    let (v, word) = (m / width, m % width);
                    let mut out = SVec::new();
                    for k in 0..=l {
                        // insert 1 before the (k+1)-th factor
                        let tail_len = da.pow((l + 1 - k) as u32);
                        let (head, tail) = (word / tail_len, word % tail_len);
                        let sign = if k % 2 == 0 { q(1) } else { q(-1) };
                        for (u, y) in alg.unit() {
                            let idx = ((head * da + u) * tail_len) + tail;
                            out.add_term(v * wide + idx, &(&sign * y));
                        }
                    }
                    out
                })
                .collect();
            deltas.push(cols);
        }
    }
    let complex = ComoduleComplex::new(coring, 0, terms, deltas)?;
    Ok(EntwiningData { entwining: ent.clone(), based, e: e.clone(), complex })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comod::check_complex;
    use crate::coring::check_coring;

    fn regular_comodule(c: &Coalgebra) -> Vec<SVec> {
        c.comul.clone()
    }

    #[test]
    fn super_flip_is_entwining() {
        let ent = super_flip_example();
        assert!(check_entwining(&ent).all_pass(), "{}", check_entwining(&ent).to_text());
        let data = catalog_entwining(&ent, &SVec::unit(0), 2, &regular_comodule(&ent.c), 2).unwrap();
        assert!(check_coring(&data.based.coring).all_pass());
        let r = check_complex(&data.complex);
        assert!(r.all_pass(), "{}", r.to_text());
    }

    #[test]
    fn flip_with_point_is_trivial() {
        let a = Arc::new(Algebra::cyclic_group(2));
        let ent = Entwining::flip(&a, Coalgebra::point());
        let data = catalog_entwining(&ent, &SVec::unit(0), 1, &[SVec::unit(0)], 1).unwrap();
        assert_eq!(data.based.coring.rank(), 2);
        assert!(data.based.coring.is_grouplike(&data.based.x));
    }

    #[test]
    fn broken_sign_detected() {
        let mut ent = super_flip_example();
        ent.psi[1] = ent.psi[1].neg();
        match catalog_entwining(&ent, &SVec::unit(0), 2, &regular_comodule(&ent.c), 1) {
            Err(CatalogError::BowTieFailed { index, .. }) => assert!(index > 0),
            other => panic!("expected a bow-tie failure, got {other:?}"),
        }
    }
}
