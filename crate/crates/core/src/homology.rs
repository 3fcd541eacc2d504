//! Minimal free resolutions over local algebras and the Ext/Tor dimension tables built on
//! them.
//!
//! A free module `A^b` is realized as `F^{d b}` with index `j * d + l` standing for
//! `b_l e_j`. A differential `d_i : F_i -> F_{i-1}` is stored by its columns, the images
//! of the basis `e_j` of `F_i`.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::algebra::{AlgebraElement, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::module::FiniteModule;
use crate::series::TruncatedSeries;
use crate::sparse::{kernel_of_columns, rank_of_columns, Echelon, SparseVec};

/// Default cap on `b_0 + b_1 + ...` for a single resolution.
pub const DEFAULT_BUDGET: usize = 20_000;

static VERIFIED: AtomicU64 = AtomicU64::new(0);

/// Number of resolutions that passed [`FreeResolution::verify`] in this process. Every
/// resolution returned by this module is verified before it is handed out.
pub fn verified_resolutions() -> u64 {
    VERIFIED.load(Ordering::Relaxed)
}

#[derive(Clone, Debug)]
pub struct FreeResolution {
    module: FiniteModule,
    betti: Vec<usize>,
    differentials: Vec<Vec<SparseVec>>,
    augmentation: Vec<Vec<FieldElement>>,
    syzygy_dims: Vec<usize>,
    terminated: bool,
}

impl FreeResolution {
    pub fn module(&self) -> &FiniteModule {
        &self.module
    }

    pub fn algebra(&self) -> &Arc<FiniteAlgebra> {
        self.module.algebra()
    }

    /// Highest degree whose free module is known.
    pub fn length(&self) -> usize {
        self.betti.len() - 1
    }

    /// `b_i`, or `None` past the computed range. After termination every later `b_i` is 0.
    pub fn betti(&self, i: usize) -> Option<usize> {
        match self.betti.get(i) {
            Some(&b) => Some(b),
            None if self.terminated => Some(0),
            None => None,
        }
    }

    pub fn betti_numbers(&self) -> &[usize] {
        &self.betti
    }

    /// True when a zero syzygy was reached (finite projective dimension).
    pub fn terminated(&self) -> bool {
        self.terminated
    }

    /// Columns of `d_i` for `1 <= i <= length`.
    pub fn differential(&self, i: usize) -> &[SparseVec] {
        &self.differentials[i - 1]
    }

    /// Entry `(row, col)` of `d_i` as an algebra element.
    pub fn differential_entry(&self, i: usize, row: usize, col: usize) -> AlgebraElement {
        let d = self.algebra().dim();
        let c = &self.differentials[i - 1][col];
        c.slice((row * d) as u32, ((row + 1) * d) as u32).to_dense(d)
    }

    /// Images in `M` of the basis of `F_0`.
    pub fn augmentation(&self) -> &[Vec<FieldElement>] {
        &self.augmentation
    }

    /// Checks `d d = 0`, minimality and exactness of the realization at every computed spot.
    pub fn verify(&self) -> Result<()> {
        let alg = self.algebra();
        let f = alg.field();
        let d = alg.dim();
        let local = alg.local_data().ok_or(Error::NotLocal)?;
        let n = self.module.dim();
        let fail = |msg: String| Err(Error::ResolutionCheck(msg));

        let eps_cols: Vec<SparseVec> = (0..self.betti[0])
            .flat_map(|j| (0..d).map(move |l| (j, l)))
            .map(|(j, l)| SparseVec::from_dense(&self.module.act(&alg.basis_vector(l), &self.augmentation[j])))
            .collect();
        let eps_rank = rank_of_columns(f, n, &eps_cols);
        if eps_rank != n {
            return fail(format!("augmentation has rank {eps_rank}, module dimension {n}"));
        }
        let mut prev_rank = eps_rank;
        for i in 1..=self.length() {
            let cols = self.differential(i);
            for (j, c) in cols.iter().enumerate() {
                let vanishes = if i == 1 {
                    let mut acc = vec![FieldElement::ZERO; n];
                    for &(idx, x) in c.entries() {
                        let (jj, l) = (idx as usize / d, idx as usize % d);
                        let v = self.module.act(&alg.basis_vector(l), &self.augmentation[jj]);
                        for (a, b) in acc.iter_mut().zip(v) {
                            *a = f.add(*a, f.mul(x, b));
                        }
                    }
                    acc.iter().all(|x| x.is_zero())
                } else {
                    apply_free_map(alg, self.differential(i - 1), c).is_zero()
                };
                if !vanishes {
                    return fail(format!("d_{} d_{i} is nonzero on generator {j}", i - 1));
                }
                for (row, entry) in blocks(c, d) {
                    if !local.contains(&entry) {
                        return fail(format!("d_{i} entry ({row}, {j}) is not in the maximal ideal"));
                    }
                }
            }
            let rank = rank_of_columns(f, d * self.betti[i - 1], &realize(alg, cols));
            let kernel_below = d * self.betti[i - 1] - prev_rank;
            if rank != kernel_below {
                return fail(format!("image of d_{i} has dimension {rank}, kernel below has {kernel_below}"));
            }
            prev_rank = rank;
        }
        if self.terminated && d * self.betti[self.length()] != prev_rank {
            return fail("last differential is not injective".into());
        }
        VERIFIED.fetch_add(1, Ordering::Relaxed);
        Ok(())
    }
}

/// `a * v` for `v` in a flattened free module.
pub(crate) fn mul_free(alg: &FiniteAlgebra, a: &[FieldElement], v: &SparseVec) -> SparseVec {
    let f = alg.field();
    let d = alg.dim();
    let mut entries = Vec::new();
    for &(idx, c) in v.entries() {
        let (block, l) = ((idx as usize / d) * d, idx as usize % d);
        for (i, &ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            let s = f.mul(c, ai);
            for &(k, x) in alg.basis_product(i, l).entries() {
                entries.push(((block as u32) + k, f.mul(s, x)));
            }
        }
    }
    SparseVec::from_entries(entries, f)
}

fn mul_basis_free(alg: &FiniteAlgebra, l: usize, v: &SparseVec) -> SparseVec {
    let f = alg.field();
    let d = alg.dim();
    let mut entries = Vec::with_capacity(v.nnz());
    for &(idx, c) in v.entries() {
        let (block, m) = ((idx as usize / d) * d, idx as usize % d);
        for &(k, x) in alg.basis_product(l, m).entries() {
            entries.push(((block as u32) + k, f.mul(c, x)));
        }
    }
    SparseVec::from_entries(entries, f)
}

/// The realization of a free map given by its columns: column `j * d + l` is `b_l * col_j`.
fn realize(alg: &FiniteAlgebra, cols: &[SparseVec]) -> Vec<SparseVec> {
    cols.iter().flat_map(|c| (0..alg.dim()).map(move |l| mul_basis_free(alg, l, c))).collect()
}

/// Applies the free map with columns `cols` to the flattened vector `v`.
fn apply_free_map(alg: &FiniteAlgebra, cols: &[SparseVec], v: &SparseVec) -> SparseVec {
    let f = alg.field();
    let d = alg.dim();
    let mut entries = Vec::new();
    for &(idx, c) in v.entries() {
        let (j, l) = (idx as usize / d, idx as usize % d);
        for &(k, x) in mul_basis_free(alg, l, &cols[j]).entries() {
            entries.push((k, f.mul(c, x)));
        }
    }
    SparseVec::from_entries(entries, f)
}

/// The nonzero `d`-blocks of a flattened vector, as algebra elements.
fn blocks(v: &SparseVec, d: usize) -> Vec<(usize, AlgebraElement)> {
    let mut out: Vec<(usize, AlgebraElement)> = Vec::new();
    for &(idx, c) in v.entries() {
        let row = idx as usize / d;
        if out.last().is_none_or(|b| b.0 != row) {
            out.push((row, vec![FieldElement::ZERO; d]));
        }
        out.last_mut().expect("just pushed").1[idx as usize % d] = c;
    }
    out
}

/// Minimal generators of the submodule spanned (over `F`) by `basis`, which is assumed to
/// be an `A`-submodule of the flattened free module of dimension `ambient`.
fn minimal_submodule_generators(alg: &FiniteAlgebra, basis: &[SparseVec], ambient: usize) -> Vec<SparseVec> {
    let local = alg.local_data().expect("checked local");
    let mut span = Echelon::new(alg.field(), ambient);
    for m in &local.max_ideal {
        for v in basis {
            span.insert(mul_free(alg, m, v));
        }
    }
    let mut gens = Vec::new();
    for v in basis {
        if span.rank() == basis.len() {
            break;
        }
        if span.contains(v) {
            continue;
        }
        for l in 0..alg.dim() {
            span.insert(mul_basis_free(alg, l, v));
        }
        gens.push(v.clone());
    }
    gens
}

pub fn minimal_resolution(m: &FiniteModule, bound: usize) -> Result<FreeResolution> {
    resolve(m, bound, DEFAULT_BUDGET, false)
}

pub fn minimal_resolution_with_budget(m: &FiniteModule, bound: usize, budget: usize) -> Result<FreeResolution> {
    resolve(m, bound, budget, false)
}

/// Like [`minimal_resolution`] but returns what was computed when the budget runs out.
pub fn partial_resolution(m: &FiniteModule, bound: usize, budget: usize) -> Result<FreeResolution> {
    resolve(m, bound, budget, true)
}

fn resolve(m: &FiniteModule, bound: usize, budget: usize, partial: bool) -> Result<FreeResolution> {
    let res = build(m, bound, budget, partial)?;
    res.verify()?;
    Ok(res)
}

fn build(m: &FiniteModule, bound: usize, budget: usize, partial: bool) -> Result<FreeResolution> {
    let alg = Arc::clone(m.algebra());
    let f = alg.field();
    let d = alg.dim();
    let gens0 = m.minimal_generators()?;
    let b0 = gens0.len();
    let mut res = FreeResolution {
        module: m.clone(),
        betti: vec![b0],
        differentials: Vec::new(),
        augmentation: gens0,
        syzygy_dims: Vec::new(),
        terminated: false,
    };
    if b0 > budget {
        return if partial {
            Ok(res)
        } else {
            Err(Error::BudgetExceeded(format!("b_0 = {b0} exceeds the budget {budget}")))
        };
    }
    let cols: Vec<SparseVec> = (0..b0)
        .flat_map(|j| (0..d).map(move |l| (j, l)))
        .map(|(j, l)| SparseVec::from_dense(&m.act(&alg.basis_vector(l), &res.augmentation[j])))
        .collect();
    let (mut syzygy, _) = kernel_of_columns(f, m.dim(), &cols);
    let mut total = b0;
    for i in 1..=bound {
        if syzygy.is_empty() {
            res.terminated = true;
            break;
        }
        let ambient = d * res.betti[i - 1];
        let gens = minimal_submodule_generators(&alg, &syzygy, ambient);
        total += gens.len();
        if total > budget {
            if partial {
                return Ok(res);
            }
            return Err(Error::BudgetExceeded(format!(
                "total rank {total} through degree {i} exceeds the budget {budget}"
            )));
        }
        res.syzygy_dims.push(syzygy.len());
        res.betti.push(gens.len());
        if i < bound {
            let (next, _) = kernel_of_columns(f, ambient, &realize(&alg, &gens));
            syzygy = next;
        }
        res.differentials.push(gens);
    }
    if bound == 0 && syzygy.is_empty() {
        res.terminated = true;
    }
    Ok(res)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DimKind {
    Ext,
    Tor,
}

/// Dimensions over the base field, indexed `0..=bound`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DimTable {
    pub kind: DimKind,
    pub dims: Vec<usize>,
}

impl DimTable {
    pub fn bound(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn get(&self, i: usize) -> usize {
        self.dims[i]
    }
}

impl fmt::Display for DimTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            DimKind::Ext => "Ext",
            DimKind::Tor => "Tor",
        };
        let body: Vec<String> = self.dims.iter().map(usize::to_string).collect();
        write!(f, "{name}[{}]", body.join(", "))
    }
}

/// Rank of the map induced by `d_i` on `Hom(F, N)` (cohomological) or `F ⊗ N` (homological).
fn induced_rank(res: &FreeResolution, n: &FiniteModule, i: usize, kind: DimKind) -> usize {
    if i == 0 || i > res.length() || n.dim() == 0 {
        return 0;
    }
    let alg = res.algebra();
    let f = alg.field();
    let d = alg.dim();
    let dim_n = n.dim();
    let (rows_free, cols_free) = (res.betti[i - 1], res.betti[i]);
    if rows_free == 0 || cols_free == 0 {
        return 0;
    }
    // Hom: columns indexed by (row j', t), placed in block j. Tensor: columns (j, t) in block j'.
    let num_cols = match kind {
        DimKind::Ext => rows_free * dim_n,
        DimKind::Tor => cols_free * dim_n,
    };
    let mut columns: Vec<Vec<(u32, FieldElement)>> = vec![Vec::new(); num_cols];
    for (j, c) in res.differential(i).iter().enumerate() {
        for (row, a) in blocks(c, d) {
            let op = n.action_of(&a);
            for t in 0..dim_n {
                let (col, block) = match kind {
                    DimKind::Ext => (row * dim_n + t, j),
                    DimKind::Tor => (j * dim_n + t, row),
                };
                for s in 0..dim_n {
                    let x = op.get(s, t);
                    if !x.is_zero() {
                        columns[col].push(((block * dim_n + s) as u32, x));
                    }
                }
            }
        }
    }
    let rows = match kind {
        DimKind::Ext => cols_free * dim_n,
        DimKind::Tor => rows_free * dim_n,
    };
    let cols: Vec<SparseVec> = columns.into_iter().map(|e| SparseVec::from_entries(e, f)).collect();
    rank_of_columns(f, rows, &cols)
}

fn same_algebra(m: &FiniteModule, n: &FiniteModule) -> Result<()> {
    if m.algebra() != n.algebra() {
        return Err(Error::InvalidModule("modules live over different algebras".into()));
    }
    Ok(())
}

/// `dim Ext^i(M, N)` for `i <= bound` from a resolution of length at least `bound + 1`
/// (or a terminated one).
pub fn ext_dims_from(res: &FreeResolution, n: &FiniteModule, bound: usize) -> Result<DimTable> {
    homology_dims(res, n, bound, DimKind::Ext)
}

pub fn tor_dims_from(res: &FreeResolution, n: &FiniteModule, bound: usize) -> Result<DimTable> {
    homology_dims(res, n, bound, DimKind::Tor)
}

fn homology_dims(res: &FreeResolution, n: &FiniteModule, bound: usize, kind: DimKind) -> Result<DimTable> {
    same_algebra(res.module(), n)?;
    if !res.terminated && res.length() < bound + 1 {
        return Err(Error::BudgetExceeded(format!(
            "resolution known through degree {}, degree {} needed",
            res.length(),
            bound + 1
        )));
    }
    let ranks: Vec<usize> = (0..=bound + 1).map(|i| induced_rank(res, n, i, kind)).collect();
    let dims = (0..=bound)
        .map(|i| n.dim() * res.betti(i).unwrap_or(0) - ranks[i] - ranks[i + 1])
        .collect();
    Ok(DimTable { kind, dims })
}

pub fn ext_dims(m: &FiniteModule, n: &FiniteModule, bound: usize) -> Result<DimTable> {
    same_algebra(m, n)?;
    ext_dims_from(&minimal_resolution(m, bound + 1)?, n, bound)
}

pub fn tor_dims(m: &FiniteModule, n: &FiniteModule, bound: usize) -> Result<DimTable> {
    same_algebra(m, n)?;
    tor_dims_from(&minimal_resolution(m, bound + 1)?, n, bound)
}

/// Largest `B' <= bound` for which the resolution determines degree `B'`.
pub fn determined_through(res: &FreeResolution, bound: usize) -> Option<usize> {
    if res.terminated() {
        Some(bound)
    } else {
        res.length().checked_sub(1).map(|b| b.min(bound))
    }
}

/// `sum b_i t^i` through `t^bound`.
pub fn poincare_truncation(m: &FiniteModule, bound: usize) -> Result<TruncatedSeries> {
    let res = minimal_resolution(m, bound)?;
    Ok(TruncatedSeries::from_u64(&(0..=bound).map(|i| res.betti(i).unwrap_or(0) as u64).collect::<Vec<_>>()))
}

/// `sum dim Tor_i(M, N) t^i` with dimensions over the base field.
pub fn poincare_pair(m: &FiniteModule, n: &FiniteModule, bound: usize) -> Result<TruncatedSeries> {
    let t = tor_dims(m, n, bound)?;
    Ok(TruncatedSeries::from_u64(&t.dims.iter().map(|&x| x as u64).collect::<Vec<_>>()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PSup {
    Determined(usize),
    AllZero,
    Undetermined,
}

/// Windowed evidence for `sup{i : Ext^i != 0}`: vanishing on `(B - w, B]` is taken as a sign
/// of eventual vanishing. This is a heuristic, not a proof.
pub fn p_sup_from_table(table: &DimTable, w: usize) -> PSup {
    let b = table.bound();
    assert!(w >= 1 && b > w, "window needs 1 <= w < B");
    if table.dims[b - w + 1..=b].iter().any(|&x| x > 0) {
        return PSup::Undetermined;
    }
    match (0..=b - w).rev().find(|&i| table.dims[i] > 0) {
        Some(p) => PSup::Determined(p),
        None => PSup::AllZero,
    }
}

pub fn p_sup_window(m: &FiniteModule, n: &FiniteModule, bound: usize, w: usize) -> Result<PSup> {
    Ok(p_sup_from_table(&ext_dims(m, n, bound)?, w))
}

/// Maximal runs `(n, t)`: `Ext^n != 0`, `Ext^{n+1..=n+t} = 0`, `Ext^{n+t+1} != 0`.
pub fn find_gaps_in(table: &DimTable) -> Vec<(usize, usize)> {
    let nonzero: Vec<usize> = (0..table.dims.len()).filter(|&i| table.dims[i] > 0).collect();
    nonzero.windows(2).filter(|w| w[1] - w[0] > 1).map(|w| (w[0], w[1] - w[0] - 1)).collect()
}

pub fn find_gaps(m: &FiniteModule, n: &FiniteModule, bound: usize) -> Result<Vec<(usize, usize)>> {
    Ok(find_gaps_in(&ext_dims(m, n, bound)?))
}
