//! Sparse vectors and incremental echelon bases.
//!
//! Realizations of free modules over local algebras become very large but stay sparse and
//! close to block diagonal, so ranks, kernels, spans and quotient normal forms on the hot
//! paths go through [`Echelon`] rather than dense elimination.

use crate::field::{FieldElement, GaloisField};

/// Sorted `(index, value)` pairs without zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec(Vec<(u32, FieldElement)>);

impl SparseVec {
    pub fn new() -> Self {
        SparseVec(Vec::new())
    }

    pub fn unit(i: usize) -> Self {
        SparseVec(vec![(i as u32, FieldElement::ONE)])
    }

    pub fn from_dense(v: &[FieldElement]) -> Self {
        SparseVec(v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, &c)| (i as u32, c)).collect())
    }

    /// Builds from unsorted entries, summing duplicates.
    pub fn from_entries(mut entries: Vec<(u32, FieldElement)>, f: &GaloisField) -> Self {
        entries.sort_unstable_by_key(|e| e.0);
        let mut out: Vec<(u32, FieldElement)> = Vec::with_capacity(entries.len());
        for (i, c) in entries {
            match out.last_mut() {
                Some(last) if last.0 == i => last.1 = f.add(last.1, c),
                _ => out.push((i, c)),
            }
        }
        out.retain(|e| !e.1.is_zero());
        SparseVec(out)
    }

    /// Appends an entry with index larger than all present ones.
    pub fn push(&mut self, i: u32, c: FieldElement) {
        debug_assert!(self.0.last().is_none_or(|l| l.0 < i));
        if !c.is_zero() {
            self.0.push((i, c));
        }
    }

    pub fn to_dense(&self, n: usize) -> Vec<FieldElement> {
        let mut v = vec![FieldElement::ZERO; n];
        for &(i, c) in &self.0 {
            v[i as usize] = c;
        }
        v
    }

    pub fn entries(&self) -> &[(u32, FieldElement)] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.0.len()
    }

    pub fn lead(&self) -> Option<(u32, FieldElement)> {
        self.0.first().copied()
    }

    pub fn get(&self, i: u32) -> FieldElement {
        match self.0.binary_search_by_key(&i, |e| e.0) {
            Ok(pos) => self.0[pos].1,
            Err(_) => FieldElement::ZERO,
        }
    }

    pub fn scale(&self, c: FieldElement, f: &GaloisField) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec(self.0.iter().map(|&(i, x)| (i, f.mul(x, c))).collect())
    }

    /// `self + c * other`
    pub fn axpy(&self, c: FieldElement, other: &SparseVec, f: &GaloisField) -> SparseVec {
        if c.is_zero() || other.is_zero() {
            return self.clone();
        }
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let (ia, ca) = a[i];
            let (ib, cb) = b[j];
            if ia < ib {
                out.push((ia, ca));
                i += 1;
            } else if ib < ia {
                out.push((ib, f.mul(c, cb)));
                j += 1;
            } else {
                let s = f.add(ca, f.mul(c, cb));
                if !s.is_zero() {
                    out.push((ia, s));
                }
                i += 1;
                j += 1;
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend(b[j..].iter().map(|&(ib, cb)| (ib, f.mul(c, cb))));
        SparseVec(out)
    }

    /// Shifts every index by `offset`.
    pub fn shifted(&self, offset: u32) -> SparseVec {
        SparseVec(self.0.iter().map(|&(i, c)| (i + offset, c)).collect())
    }

    /// Entries with index in `start..end`, reindexed from zero.
    pub fn slice(&self, start: u32, end: u32) -> SparseVec {
        let lo = self.0.partition_point(|e| e.0 < start);
        let hi = self.0.partition_point(|e| e.0 < end);
        SparseVec(self.0[lo..hi].iter().map(|&(i, c)| (i - start, c)).collect())
    }

    pub fn dot(&self, dense: &[FieldElement], f: &GaloisField) -> FieldElement {
        self.0.iter().fold(FieldElement::ZERO, |acc, &(i, c)| f.add(acc, f.mul(c, dense[i as usize])))
    }
}

const NO_PIVOT: u32 = u32::MAX;

/// An echelon basis of a subspace of `F^dim`: every stored vector has leading coefficient 1
/// and distinct leading indices. Optionally records, for each stored vector, the
/// combination of inserted vectors it came from.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: GaloisField,
    dim: usize,
    pivots: Vec<SparseVec>,
    combos: Option<Vec<SparseVec>>,
    slot: Vec<u32>,
}

impl Echelon {
    pub fn new(field: &GaloisField, dim: usize) -> Self {
        Echelon { field: field.clone(), dim, pivots: Vec::new(), combos: None, slot: vec![NO_PIVOT; dim] }
    }

    fn with_combos(field: &GaloisField, dim: usize) -> Self {
        let mut e = Self::new(field, dim);
        e.combos = Some(Vec::new());
        e
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn basis(&self) -> &[SparseVec] {
        &self.pivots
    }

    pub fn is_lead(&self, i: usize) -> bool {
        self.slot[i] != NO_PIVOT
    }

    /// Indices that are not leading indices: a basis of the quotient by this subspace.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.dim).filter(|&i| !self.is_lead(i)).collect()
    }

    fn reduce_lead_tracked(&self, mut v: SparseVec, mut combo: Option<SparseVec>) -> (SparseVec, Option<SparseVec>) {
        let f = &self.field;
        while let Some((i, c)) = v.lead() {
            let s = self.slot[i as usize];
            if s == NO_PIVOT {
                break;
            }
            let neg = f.neg(c);
            v = v.axpy(neg, &self.pivots[s as usize], f);
            if let (Some(cb), Some(all)) = (combo.as_mut(), self.combos.as_ref()) {
                *cb = cb.axpy(neg, &all[s as usize], f);
            }
        }
        (v, combo)
    }

    /// Reduces until the leading index is not a pivot; zero iff `v` lies in the span.
    pub fn reduce_lead(&self, v: SparseVec) -> SparseVec {
        self.reduce_lead_tracked(v, None).0
    }

    /// Normal form modulo the span: the result has no entry at any leading index.
    pub fn reduce_full(&self, v: &SparseVec) -> SparseVec {
        let f = &self.field;
        let mut v = v.clone();
        let mut pos = 0;
        while pos < v.0.len() {
            let (i, c) = v.0[pos];
            let s = self.slot[i as usize];
            if s == NO_PIVOT {
                pos += 1;
                continue;
            }
            // entries before `pos` are untouched since pivot entries are all >= i
            v = v.axpy(f.neg(c), &self.pivots[s as usize], f);
        }
        v
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce_lead(v.clone()).is_zero()
    }

    /// Adds `v` to the span. Returns `true` when the rank grew.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let v = self.reduce_lead(v);
        self.push_reduced(v, None)
    }

    fn push_reduced(&mut self, v: SparseVec, combo: Option<SparseVec>) -> bool {
        let Some((i, c)) = v.lead() else {
            return false;
        };
        let inv = self.field.inv(c);
        self.slot[i as usize] = self.pivots.len() as u32;
        self.pivots.push(v.scale(inv, &self.field));
        if let (Some(all), Some(cb)) = (self.combos.as_mut(), combo) {
            all.push(cb.scale(inv, &self.field));
        }
        true
    }
}

/// Rank of the matrix whose columns are `columns`, each living in `F^rows`.
pub fn rank_of_columns<'a>(field: &GaloisField, rows: usize, columns: impl IntoIterator<Item = &'a SparseVec>) -> usize {
    let mut e = Echelon::new(field, rows);
    for c in columns {
        e.insert(c.clone());
    }
    e.rank()
}

/// Kernel basis and rank of the matrix with the given columns.
pub fn kernel_of_columns(field: &GaloisField, rows: usize, columns: &[SparseVec]) -> (Vec<SparseVec>, usize) {
    let mut e = Echelon::with_combos(field, rows);
    let mut kernel = Vec::new();
    for (j, col) in columns.iter().enumerate() {
        let (v, combo) = e.reduce_lead_tracked(col.clone(), Some(SparseVec::unit(j)));
        if v.is_zero() {
            kernel.push(combo.expect("tracked"));
        } else {
            e.push_reduced(v, combo);
        }
    }
    let rank = e.rank();
    (kernel, rank)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axpy_merges_and_cancels() {
        let f = GaloisField::prime(3).unwrap();
        let a = SparseVec::from_dense(&[f.from_int(1), f.from_int(0), f.from_int(2)]);
        let b = SparseVec::from_dense(&[f.from_int(2), f.from_int(1), f.from_int(0)]);
        let s = a.axpy(f.one(), &b, &f);
        assert_eq!(s.to_dense(3), vec![f.from_int(0), f.from_int(1), f.from_int(2)]);
    }

    #[test]
    fn kernel_matches_dense() {
        let f = GaloisField::prime(5).unwrap();
        let cols: Vec<SparseVec> = [[1, 2, 0], [2, 4, 0], [0, 1, 1], [1, 3, 1]]
            .iter()
            .map(|c| SparseVec::from_dense(&c.iter().map(|&x| f.from_int(x)).collect::<Vec<_>>()))
            .collect();
        let (kernel, rank) = kernel_of_columns(&f, 3, &cols);
        assert_eq!(rank, 2);
        assert_eq!(kernel.len(), 2);
        for k in &kernel {
            let mut acc = SparseVec::new();
            for &(j, c) in k.entries() {
                acc = acc.axpy(c, &cols[j as usize], &f);
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn full_reduction_is_a_normal_form() {
        let f = GaloisField::prime(2).unwrap();
        let mut e = Echelon::new(&f, 4);
        e.insert(SparseVec::from_dense(&[f.one(), f.one(), f.zero(), f.zero()]));
        e.insert(SparseVec::from_dense(&[f.zero(), f.one(), f.one(), f.zero()]));
        let v = SparseVec::from_dense(&[f.one(), f.zero(), f.zero(), f.one()]);
        let r = e.reduce_full(&v);
        assert!(r.entries().iter().all(|&(i, _)| !e.is_lead(i as usize)));
        assert_eq!(e.complement(), vec![2, 3]);
        assert_eq!(r.to_dense(4), vec![f.zero(), f.zero(), f.one(), f.one()]);
    }
}
