//! Finitely presented modules over `A[x]` and Ext as finitely generated `k[x]`-modules.
//!
//! `A[x]^r` is flattened to `k[x]^{r d}` with index `j * d + l` for `b_l e_j`, matching
//! the convention used for free modules over `A`.

use std::sync::Arc;

use crate::algebra::{AlgebraElement, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::homology::ext_dims;
use crate::module::{module_from_presentation, FiniteModule};
use crate::poly::{Poly, PolyRing};
use crate::poly_matrix::{cokernel_invariants, kernel_over_poly, submodule_basis, InvariantFactorData, PolyMatrix};

/// An element of `A[x]`: one polynomial per basis element of `A`.
pub type PolyElement = Vec<Poly>;

pub const DEFAULT_RANK_BUDGET: usize = 512;
pub const DEFAULT_DEGREE_BUDGET: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PolyBudget {
    pub rank: usize,
    pub degree: usize,
}

impl Default for PolyBudget {
    fn default() -> Self {
        PolyBudget { rank: DEFAULT_RANK_BUDGET, degree: DEFAULT_DEGREE_BUDGET }
    }
}

/// `coker(A[x]^a -> A[x]^b)`; row `r` of `relations` is a relation in `A[x]^b`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyPresentedModule {
    algebra: Arc<FiniteAlgebra>,
    generators: usize,
    relations: Vec<Vec<PolyElement>>,
}

impl PolyPresentedModule {
    pub fn new(algebra: Arc<FiniteAlgebra>, generators: usize, relations: Vec<Vec<PolyElement>>) -> Result<Self> {
        let d = algebra.dim();
        if relations.iter().any(|r| r.len() != generators || r.iter().any(|a| a.len() != d)) {
            return Err(Error::DimensionMismatch(format!("relations must have {generators} entries of length {d}")));
        }
        Ok(PolyPresentedModule { algebra, generators, relations })
    }

    /// `A[x]^b`.
    pub fn free(algebra: Arc<FiniteAlgebra>, rank: usize) -> Self {
        PolyPresentedModule { algebra, generators: rank, relations: Vec::new() }
    }

    pub fn algebra(&self) -> &Arc<FiniteAlgebra> {
        &self.algebra
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relations(&self) -> &[Vec<PolyElement>] {
        &self.relations
    }

    fn ring(&self) -> PolyRing {
        PolyRing::new(self.algebra.field().clone())
    }

    fn flat_relations(&self) -> Vec<Vec<Poly>> {
        self.relations.iter().map(|r| r.iter().flatten().cloned().collect()).collect()
    }

    /// The presentation of the underlying `k[x]`-module, a `(b d) x (a d)` matrix.
    pub fn flattened_presentation(&self) -> PolyMatrix {
        let ring = self.ring();
        let cols = realize(&self.algebra, &ring, &self.flat_relations());
        PolyMatrix::from_columns(self.generators * self.algebra.dim(), &cols)
    }

    /// Invariant factors of the underlying `k[x]`-module.
    pub fn kx_structure(&self) -> InvariantFactorData {
        cokernel_invariants(&self.flattened_presentation(), &self.ring())
    }
}

/// `a * v` in a flattened free `A[x]`-module.
fn mul_vec(alg: &FiniteAlgebra, ring: &PolyRing, a: &[Poly], v: &[Poly]) -> Vec<Poly> {
    let d = alg.dim();
    let mut out = vec![Poly::zero(); v.len()];
    for (idx, p) in v.iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let (block, l) = (idx / d * d, idx % d);
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            let prod = ring.mul(ai, p);
            for &(k, c) in alg.basis_product(i, l).entries() {
                let slot = &mut out[block + k as usize];
                *slot = ring.add(slot, &ring.scale(&prod, c));
            }
        }
    }
    out
}

fn basis_mul(alg: &FiniteAlgebra, ring: &PolyRing, l: usize, v: &[Poly]) -> Vec<Poly> {
    let d = alg.dim();
    let mut out = vec![Poly::zero(); v.len()];
    for (idx, p) in v.iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let (block, m) = (idx / d * d, idx % d);
        for &(k, c) in alg.basis_product(l, m).entries() {
            let slot = &mut out[block + k as usize];
            *slot = ring.add(slot, &ring.scale(p, c));
        }
    }
    out
}

/// `k[x]`-generators of the `A[x]`-span of `cols`.
fn realize(alg: &FiniteAlgebra, ring: &PolyRing, cols: &[Vec<Poly>]) -> Vec<Vec<Poly>> {
    cols.iter().flat_map(|c| (0..alg.dim()).map(move |l| basis_mul(alg, ring, l, c))).collect()
}

/// A free resolution `... -> F_1 -> F_0 -> M` over `A[x]`, not necessarily minimal.
#[derive(Clone, Debug)]
pub struct PolyResolution {
    algebra: Arc<FiniteAlgebra>,
    ranks: Vec<usize>,
    differentials: Vec<Vec<Vec<Poly>>>,
    terminated: bool,
}

impl PolyResolution {
    /// Ranks of `F_0, F_1, ...` as far as computed.
    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn length(&self) -> usize {
        self.ranks.len() - 1
    }

    pub fn terminated(&self) -> bool {
        self.terminated
    }

    pub fn rank(&self, i: usize) -> usize {
        self.ranks.get(i).copied().unwrap_or(0)
    }

    /// Columns of `d_i : F_i -> F_{i-1}`, flattened.
    pub fn differential(&self, i: usize) -> &[Vec<Poly>] {
        &self.differentials[i - 1]
    }

    /// Entry `(row, col)` of `d_i`.
    pub fn entry(&self, i: usize, row: usize, col: usize) -> PolyElement {
        let d = self.algebra.dim();
        self.differentials[i - 1][col][row * d..(row + 1) * d].to_vec()
    }
}

pub fn resolution_over_ax(m: &PolyPresentedModule, length: usize) -> Result<PolyResolution> {
    resolve(m, length, PolyBudget::default(), false)
}

pub fn resolution_over_ax_with_budget(m: &PolyPresentedModule, length: usize, budget: PolyBudget) -> Result<PolyResolution> {
    resolve(m, length, budget, false)
}

/// A resolution with a redundant copy of the first relation in `F_1`.
pub fn padded_resolution_over_ax(m: &PolyPresentedModule, length: usize) -> Result<PolyResolution> {
    resolve(m, length, PolyBudget::default(), true)
}

fn check_budget(cols: &[Vec<Poly>], degree: usize, budget: PolyBudget) -> Result<()> {
    if cols.len() > budget.rank {
        return Err(Error::BudgetExceeded(format!("free rank {} in degree {degree} exceeds {}", cols.len(), budget.rank)));
    }
    let max = cols.iter().flatten().filter_map(Poly::degree).max().unwrap_or(0);
    if max > budget.degree {
        return Err(Error::BudgetExceeded(format!("x-degree {max} in degree {degree} exceeds {}", budget.degree)));
    }
    Ok(())
}

fn resolve(m: &PolyPresentedModule, length: usize, budget: PolyBudget, pad: bool) -> Result<PolyResolution> {
    let alg = Arc::clone(&m.algebra);
    let ring = m.ring();
    let d = alg.dim();
    let mut res = PolyResolution { algebra: Arc::clone(&alg), ranks: vec![m.generators], differentials: Vec::new(), terminated: false };
    if length == 0 {
        return Ok(res);
    }
    let mut current = m.flat_relations();
    if pad {
        current.push(current.first().cloned().unwrap_or_else(|| vec![Poly::zero(); m.generators * d]));
    }
    if m.generators == 0 || current.is_empty() {
        res.terminated = true;
        return Ok(res);
    }
    check_budget(&current, 1, budget)?;
    res.ranks.push(current.len());
    res.differentials.push(current.clone());
    for i in 2..=length {
        let rows = res.ranks[i - 2] * d;
        let realized = PolyMatrix::from_columns(rows, &realize(&alg, &ring, &current));
        let kernel = kernel_over_poly(&realized, &ring);
        if kernel.is_empty() {
            res.terminated = true;
            return Ok(res);
        }
        let gens = prune(&alg, &ring, res.ranks[i - 1] * d, kernel);
        check_budget(&gens, i, budget)?;
        res.ranks.push(gens.len());
        res.differentials.push(gens.clone());
        current = gens;
    }
    Ok(res)
}

/// Drops generators already in the `A[x]`-span of the earlier ones.
fn prune(alg: &FiniteAlgebra, ring: &PolyRing, rows: usize, candidates: Vec<Vec<Poly>>) -> Vec<Vec<Poly>> {
    let mut kept: Vec<Vec<Poly>> = Vec::new();
    for v in candidates {
        if !kept.is_empty() {
            let span = submodule_basis(rows, realize(alg, ring, &kept), ring);
            if span.contains(&v, ring) {
                continue;
            }
        }
        kept.push(v);
    }
    kept
}

/// `Ext^i_{A[x]}(M, N)` as a `k[x]`-module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtDecomposition {
    pub degree: usize,
    pub data: InvariantFactorData,
}

/// Lift of `Hom(d_{i+1}, N)` to `k[x]^{r_i b' d} -> k[x]^{r_{i+1} b' d}` as columns.
fn hom_differential(res: &PolyResolution, ring: &PolyRing, n_gens: usize, i: usize) -> Vec<Vec<Poly>> {
    let alg = &res.algebra;
    let d = alg.dim();
    let width = n_gens * d;
    let (src, dst) = (res.rank(i), if i < res.length() { res.rank(i + 1) } else { 0 });
    let mut cols = vec![vec![Poly::zero(); dst * width]; src * width];
    if dst == 0 {
        return cols;
    }
    for j in 0..dst {
        for jp in 0..src {
            let a = res.entry(i + 1, jp, j);
            if a.iter().all(Poly::is_zero) {
                continue;
            }
            for t in 0..width {
                let mut e = vec![Poly::zero(); width];
                e[t] = ring.one();
                let image = mul_vec(alg, ring, &a, &e);
                cols[jp * width + t][j * width..(j + 1) * width].clone_from_slice(&image);
            }
        }
    }
    cols
}

/// Generators of `(im Q_N)^{copies}` inside `k[x]^{copies b' d}`.
fn relation_block(q: &[Vec<Poly>], copies: usize, width: usize) -> Vec<Vec<Poly>> {
    let mut out = Vec::with_capacity(copies * q.len());
    for j in 0..copies {
        for col in q {
            let mut v = vec![Poly::zero(); copies * width];
            v[j * width..(j + 1) * width].clone_from_slice(col);
            out.push(v);
        }
    }
    out
}

pub fn ext_over_ax(m: &PolyPresentedModule, n: &PolyPresentedModule, bound: usize) -> Result<Vec<ExtDecomposition>> {
    ext_from_resolution(&resolution_over_ax(m, bound + 1)?, n, bound)
}

/// Ext from a given resolution of `M` of length at least `bound + 1` (or terminated).
pub fn ext_from_resolution(res: &PolyResolution, n: &PolyPresentedModule, bound: usize) -> Result<Vec<ExtDecomposition>> {
    if res.algebra != n.algebra {
        return Err(Error::InvalidModule("modules live over different algebras".into()));
    }
    if !res.terminated && res.length() < bound + 1 {
        return Err(Error::BudgetExceeded(format!("resolution of length {} cannot give Ext^{bound}", res.length())));
    }
    let ring = n.ring();
    let width = n.generators * n.algebra.dim();
    let q = realize(&n.algebra, &ring, &n.flat_relations());
    let mut out = Vec::with_capacity(bound + 1);
    let mut previous: Vec<Vec<Poly>> = Vec::new();
    for i in 0..=bound {
        let g = res.rank(i) * width;
        let delta = hom_differential(res, &ring, n.generators, i);
        let data = if g == 0 {
            InvariantFactorData::default()
        } else {
            let next_rank = if i < res.length() { res.rank(i + 1) } else { 0 };
            let cocycles: Vec<Vec<Poly>> = if next_rank == 0 || width == 0 {
                (0..g)
                    .map(|t| {
                        let mut e = vec![Poly::zero(); g];
                        e[t] = ring.one();
                        e
                    })
                    .collect()
            } else {
                let mut cols = delta.clone();
                cols.extend(relation_block(&q, next_rank, width));
                let stacked = PolyMatrix::from_columns(next_rank * width, &cols);
                kernel_over_poly(&stacked, &ring).into_iter().map(|v| v[..g].to_vec()).collect()
            };
            let z = submodule_basis(g, cocycles, &ring);
            let mut boundaries = previous.clone();
            boundaries.extend(relation_block(&q, res.rank(i), width));
            let coords: Vec<Vec<Poly>> = boundaries
                .iter()
                .map(|b| z.solve(b, &ring).expect("coboundaries and relations are cocycles"))
                .collect();
            cokernel_invariants(&PolyMatrix::from_columns(z.rank(), &coords), &ring)
        };
        out.push(ExtDecomposition { degree: i, data });
        previous = delta;
    }
    Ok(out)
}

/// `M ⊗ k[x]/(x - alpha)` as a module over `A`.
pub fn specialize(m: &PolyPresentedModule, alpha: FieldElement) -> Result<FiniteModule> {
    let ring = m.ring();
    let relations: Vec<Vec<AlgebraElement>> = m
        .relations
        .iter()
        .map(|r| r.iter().map(|a| a.iter().map(|p| ring.eval(p, alpha)).collect()).collect())
        .collect();
    module_from_presentation(&m.algebra, m.generators, &relations)
}

pub fn x_minus_alpha_is_nzd(m: &PolyPresentedModule, alpha: FieldElement) -> bool {
    m.kx_structure().torsion_roots_at(&m.ring(), alpha) == 0
}

/// Smallest field element that is no root of any torsion factor and not excluded.
pub fn choose_alpha(
    ring: &PolyRing,
    decompositions: &[ExtDecomposition],
    exclusions: &[FieldElement],
) -> Result<FieldElement> {
    let field = ring.field();
    let factors: Vec<&Poly> = decompositions.iter().flat_map(|e| e.data.torsion.iter()).collect();
    let bad = |a: FieldElement| exclusions.contains(&a) || factors.iter().any(|f| ring.eval(f, a).is_zero());
    if let Some(a) = field.elements().find(|&a| !bad(a)) {
        return Ok(a);
    }
    let lcm = factors.iter().fold(ring.one(), |acc, f| ring.lcm(&acc, f));
    let radical = ring.squarefree_part(&lcm)?;
    let mut excluded: Vec<FieldElement> =
        exclusions.iter().copied().filter(|&a| !ring.eval(&radical, a).is_zero()).collect();
    excluded.sort();
    excluded.dedup();
    let count = radical.degree().unwrap_or(0) as u64 + excluded.len() as u64;
    let (p, e) = (field.characteristic() as u64, field.degree());
    let mut target = e;
    while p.checked_pow(target).is_some_and(|q| q <= count) {
        target += e;
    }
    Err(Error::FieldTooSmall(target))
}

/// One degree of the specialization check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecializationRow {
    pub degree: usize,
    /// `dim Ext^i_A(M_alpha, N_alpha)`
    pub specialized: usize,
    /// `dim (E^i)_alpha`
    pub fiber: usize,
    /// `dim Tor_1^{k[x]}(E^{i+1}, k[x]/(x - alpha))`
    pub tor1: usize,
}

impl SpecializationRow {
    pub fn holds(&self) -> bool {
        self.specialized == self.fiber + self.tor1
    }
}

/// Checks `dim Ext^i_A(M_a, N_a) = dim (E^i)_a + dim Tor_1(E^{i+1}, k[x]/(x - a))` for
/// `i <= bound - 1`, the left side computed over `A` independently.
pub fn verify_specialization_identity(
    m: &PolyPresentedModule,
    n: &PolyPresentedModule,
    alpha: FieldElement,
    bound: usize,
) -> Result<Vec<SpecializationRow>> {
    for (name, module) in [("M", m), ("N", n)] {
        if !x_minus_alpha_is_nzd(module, alpha) {
            return Err(Error::NzdPreconditionFailed(name.into()));
        }
    }
    let ring = m.ring();
    let ext = ext_over_ax(m, n, bound)?;
    let top = bound.saturating_sub(1);
    let specialized = ext_dims(&specialize(m, alpha)?, &specialize(n, alpha)?, top)?;
    Ok((0..bound)
        .map(|i| SpecializationRow {
            degree: i,
            specialized: specialized.get(i),
            fiber: ext[i].data.fiber_dim(&ring, alpha),
            tor1: ext[i + 1].data.tor1_dim(&ring, alpha),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GaloisField;
    use crate::module::residue_module;

    fn f5() -> GaloisField {
        GaloisField::prime(5).unwrap()
    }

    fn field_algebra() -> Arc<FiniteAlgebra> {
        Arc::new(FiniteAlgebra::monomial_quotient(&f5(), &[], &[]).unwrap())
    }

    fn dual_numbers() -> Arc<FiniteAlgebra> {
        Arc::new(FiniteAlgebra::monomial_quotient(&f5(), &["y".to_string()], &[vec![2]]).unwrap())
    }

    fn constant(ring: &PolyRing, a: &[FieldElement]) -> PolyElement {
        a.iter().map(|&c| ring.constant(c)).collect()
    }

    /// `A[x]/(x - alpha)`
    fn point(alg: &Arc<FiniteAlgebra>, alpha: i64) -> PolyPresentedModule {
        let ring = PolyRing::new(alg.field().clone());
        let mut rel = vec![Poly::zero(); alg.dim()];
        rel[0] = ring.from_ints(&[-alpha, 1]);
        PolyPresentedModule::new(Arc::clone(alg), 1, vec![vec![rel]]).unwrap()
    }

    fn y_quotient(alg: &Arc<FiniteAlgebra>) -> PolyPresentedModule {
        let ring = PolyRing::new(alg.field().clone());
        let y = constant(&ring, alg.generator("y").unwrap());
        PolyPresentedModule::new(Arc::clone(alg), 1, vec![vec![y]]).unwrap()
    }

    #[test]
    fn koszul_resolution_and_ext() {
        let a = field_algebra();
        let m = point(&a, 0);
        let res = resolution_over_ax(&m, 4).unwrap();
        assert!(res.terminated());
        assert_eq!(res.ranks(), &[1, 1]);
        let ring = PolyRing::new(f5());
        let ext = ext_over_ax(&m, &m, 3).unwrap();
        let x = InvariantFactorData { torsion: vec![ring.x()], free_rank: 0 };
        assert_eq!(ext[0].data, x);
        assert_eq!(ext[1].data, x);
        assert!(ext[2].data.is_zero() && ext[3].data.is_zero());
    }

    #[test]
    fn periodic_resolution_and_free_ext() {
        let a = dual_numbers();
        let m = y_quotient(&a);
        let res = resolution_over_ax(&m, 5).unwrap();
        assert_eq!(res.ranks(), &[1; 6]);
        let ext = ext_over_ax(&m, &m, 5).unwrap();
        for e in &ext {
            assert_eq!(e.data, InvariantFactorData { torsion: vec![], free_rank: 1 });
        }
    }

    #[test]
    fn free_modules_have_no_higher_ext() {
        let a = dual_numbers();
        let free = PolyPresentedModule::free(Arc::clone(&a), 1);
        assert_eq!(resolution_over_ax(&free, 3).unwrap().length(), 0);
        let n = y_quotient(&a);
        let ext = ext_over_ax(&free, &n, 3).unwrap();
        assert_eq!(ext[0].data.free_rank, 1);
        assert!(ext[1..].iter().all(|e| e.data.is_zero()));
    }

    #[test]
    fn padding_does_not_change_ext() {
        let a = dual_numbers();
        let ring = PolyRing::new(f5());
        let y = a.generator("y").unwrap();
        let rel: PolyElement = vec![ring.from_ints(&[0, 1]), ring.constant(y[1])];
        let m = PolyPresentedModule::new(Arc::clone(&a), 1, vec![vec![rel]]).unwrap();
        let n = y_quotient(&a);
        let plain = ext_from_resolution(&resolution_over_ax(&m, 5).unwrap(), &n, 4).unwrap();
        let padded = ext_from_resolution(&padded_resolution_over_ax(&m, 5).unwrap(), &n, 4).unwrap();
        assert_eq!(plain, padded);
    }

    #[test]
    fn specializations() {
        let a = dual_numbers();
        let f = f5();
        let m = point(&a, 1);
        assert_eq!(specialize(&m, f.from_int(1)).unwrap().dim(), 2);
        assert!(specialize(&m, f.from_int(0)).unwrap().is_zero());
        let k = residue_module(&a).unwrap();
        for alpha in f.elements() {
            assert_eq!(specialize(&y_quotient(&a), alpha).unwrap(), k);
            assert!(x_minus_alpha_is_nzd(&y_quotient(&a), alpha));
        }
        assert!(x_minus_alpha_is_nzd(&PolyPresentedModule::free(Arc::clone(&a), 2), f.from_int(3)));
        assert!(!x_minus_alpha_is_nzd(&point(&a, 3), f.from_int(3)));
    }

    #[test]
    fn alpha_choice() {
        let ring = PolyRing::new(f5());
        let dec = |torsion: Vec<Poly>| ExtDecomposition { degree: 0, data: InvariantFactorData { torsion, free_rank: 0 } };
        let factors = vec![dec(vec![ring.x()]), dec(vec![ring.from_ints(&[-1, 1])])];
        assert_eq!(choose_alpha(&ring, &factors, &[]).unwrap(), ring.field().from_int(2));
        assert_eq!(choose_alpha(&ring, &[], &[]).unwrap(), FieldElement::ZERO);
        let r2 = PolyRing::new(GaloisField::prime(2).unwrap());
        let covering = vec![dec(vec![r2.x(), r2.from_ints(&[1, 1])])];
        assert_eq!(choose_alpha(&r2, &covering, &[]).unwrap_err(), Error::FieldTooSmall(2));
    }

    #[test]
    fn specialization_identity_examples() {
        let f = f5();
        let a = field_algebra();
        let m = point(&a, 0);
        let rows = verify_specialization_identity(&m, &m, f.from_int(1), 3).unwrap();
        assert!(rows.iter().all(|r| r.holds() && r.specialized == 0));
        assert_eq!(
            verify_specialization_identity(&m, &m, f.from_int(0), 3).unwrap_err(),
            Error::NzdPreconditionFailed("M".into())
        );
        let b = dual_numbers();
        let k = y_quotient(&b);
        let rows = verify_specialization_identity(&k, &k, f.from_int(2), 5).unwrap();
        for r in rows {
            assert!(r.holds());
            assert_eq!((r.specialized, r.fiber, r.tor1), (1, 1, 0));
        }
    }
}
