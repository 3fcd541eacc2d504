//! Matrices over `k[x]`: column Hermite reduction, kernels, Smith normal form.

use crate::field::FieldElement;
use crate::poly::{Poly, PolyRing};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix { rows, cols, data: vec![Poly::zero(); rows * cols] }
    }

    pub fn identity(n: usize, ring: &PolyRing) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Poly>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        PolyMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_columns(rows: usize, columns: &[Vec<Poly>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, p) in col.iter().enumerate() {
                m.set(i, j, p.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        self.data[i * self.cols + j] = p;
    }

    pub fn column(&self, j: usize) -> Vec<Poly> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Poly>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.data.iter().filter_map(Poly::degree).max()
    }

    pub fn mul(&self, other: &PolyMatrix, ring: &PolyRing) -> PolyMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = PolyMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let s = ring.add(out.get(i, j), &ring.mul(a, b));
                        out.set(i, j, s);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Poly], ring: &PolyRing) -> Vec<Poly> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).fold(Poly::zero(), |acc, j| ring.add(&acc, &ring.mul(self.get(i, j), &v[j]))))
            .collect()
    }

    /// Substitutes `x := alpha` entrywise.
    pub fn evaluate(&self, ring: &PolyRing, alpha: FieldElement) -> crate::matrix::Matrix {
        let mut m = crate::matrix::Matrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, ring.eval(self.get(i, j), alpha));
            }
        }
        m
    }
}

/// Invariant factors and free rank of a finitely generated `k[x]`-module
/// `k[x]/(f_1) + ... + k[x]/(f_s) + k[x]^r`, with `f_1 | f_2 | ... | f_s` monic of degree >= 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct InvariantFactorData {
    pub torsion: Vec<Poly>,
    pub free_rank: usize,
}

impl InvariantFactorData {
    pub fn is_zero(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }

    /// Number of torsion factors vanishing at `alpha`.
    pub fn torsion_roots_at(&self, ring: &PolyRing, alpha: FieldElement) -> usize {
        self.torsion.iter().filter(|f| ring.eval(f, alpha).is_zero()).count()
    }

    /// `dim_k E/(x - alpha)E`.
    pub fn fiber_dim(&self, ring: &PolyRing, alpha: FieldElement) -> usize {
        self.free_rank + self.torsion_roots_at(ring, alpha)
    }

    /// `dim_k Tor_1^{k[x]}(E, k[x]/(x - alpha))`, the kernel of `x - alpha` on `E`.
    pub fn tor1_dim(&self, ring: &PolyRing, alpha: FieldElement) -> usize {
        self.torsion_roots_at(ring, alpha)
    }

    /// `dim_k` of the torsion part.
    pub fn torsion_dim(&self) -> usize {
        self.torsion.iter().map(|f| f.degree().unwrap_or(0)).sum()
    }
}

#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: PolyMatrix,
    pub d: PolyMatrix,
    pub v: PolyMatrix,
    /// The nonzero diagonal entries, monic, each dividing the next.
    pub diagonal: Vec<Poly>,
    /// Describes `coker(A) = k[x]^rows / A k[x]^cols`.
    pub invariants: InvariantFactorData,
}

fn min_degree_position(d: &[Vec<Poly>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, usize)> = None;
    for (i, row) in d.iter().enumerate().skip(t) {
        for (j, p) in row.iter().enumerate().skip(t) {
            if let Some(deg) = p.degree() {
                if best.is_none_or(|b| deg < b.2) {
                    best = Some((i, j, deg));
                }
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

fn row_axpy(rows: &mut [Vec<Poly>], target: usize, q: &Poly, source: usize, ring: &PolyRing) {
    // rows[target] -= q * rows[source]
    let src = rows[source].clone();
    for (t, s) in rows[target].iter_mut().zip(&src) {
        if !s.is_zero() {
            *t = ring.sub_mul(t, q, s);
        }
    }
}

fn col_axpy(rows: &mut [Vec<Poly>], target: usize, q: &Poly, source: usize, ring: &PolyRing) {
    for row in rows.iter_mut() {
        if !row[source].is_zero() {
            let s = row[source].clone();
            row[target] = ring.sub_mul(&row[target], q, &s);
        }
    }
}

fn swap_cols(rows: &mut [Vec<Poly>], a: usize, b: usize) {
    for row in rows.iter_mut() {
        row.swap(a, b);
    }
}

fn to_rows(m: &PolyMatrix) -> Vec<Vec<Poly>> {
    (0..m.rows).map(|i| (0..m.cols).map(|j| m.get(i, j).clone()).collect()).collect()
}

/// Smith normal form `D = U A V` with `U`, `V` invertible over `k[x]`.
pub fn smith_normal_form(a: &PolyMatrix, ring: &PolyRing) -> SmithForm {
    smith_impl(a, ring, true)
}

/// Only the invariant data of `coker(A)`, skipping the transforms.
pub fn cokernel_invariants(a: &PolyMatrix, ring: &PolyRing) -> InvariantFactorData {
    smith_impl(a, ring, false).invariants
}

fn smith_impl(a: &PolyMatrix, ring: &PolyRing, track: bool) -> SmithForm {
    let (m, n) = (a.rows, a.cols);
    let mut d = to_rows(a);
    let mut u = if track { to_rows(&PolyMatrix::identity(m, ring)) } else { Vec::new() };
    // V is kept transposed so column operations become row operations.
    let mut vt = if track { to_rows(&PolyMatrix::identity(n, ring)) } else { Vec::new() };

    let mut t = 0;
    while t < m.min(n) {
        let Some((pi, pj)) = min_degree_position(&d, t) else {
            break;
        };
        d.swap(t, pi);
        if track {
            u.swap(t, pi);
        }
        swap_cols(&mut d, t, pj);
        if track {
            vt.swap(t, pj);
        }
        loop {
            let mut moved = false;
            for i in t + 1..m {
                if d[i][t].is_zero() {
                    continue;
                }
                let q = ring.div_rem(&d[i][t], &d[t][t]).0;
                row_axpy(&mut d, i, &q, t, ring);
                if track {
                    row_axpy(&mut u, i, &q, t, ring);
                }
                if !d[i][t].is_zero() {
                    d.swap(t, i);
                    if track {
                        u.swap(t, i);
                    }
                    moved = true;
                    break;
                }
            }
            if moved {
                continue;
            }
            for j in t + 1..n {
                if d[t][j].is_zero() {
                    continue;
                }
                let q = ring.div_rem(&d[t][j], &d[t][t]).0;
                col_axpy(&mut d, j, &q, t, ring);
                if track {
                    row_axpy(&mut vt, j, &q, t, ring);
                }
                if !d[t][j].is_zero() {
                    swap_cols(&mut d, t, j);
                    if track {
                        vt.swap(t, j);
                    }
                    moved = true;
                    break;
                }
            }
            if moved {
                continue;
            }
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !ring.divides(&d[t][t], &d[i][j])));
            if let Some(i) = offender {
                let minus_one = ring.constant(ring.field().neg(FieldElement::ONE));
                row_axpy(&mut d, t, &minus_one, i, ring);
                if track {
                    row_axpy(&mut u, t, &minus_one, i, ring);
                }
                continue;
            }
            break;
        }
        let inv = ring.field().inv(d[t][t].lead());
        if inv != FieldElement::ONE {
            for p in d[t].iter_mut() {
                *p = ring.scale(p, inv);
            }
            if track {
                for p in u[t].iter_mut() {
                    *p = ring.scale(p, inv);
                }
            }
        }
        t += 1;
    }

    let diagonal: Vec<Poly> = (0..t).map(|i| d[i][i].clone()).collect();
    let invariants = InvariantFactorData {
        torsion: diagonal.iter().filter(|p| !p.is_constant()).cloned().collect(),
        free_rank: m - t,
    };
    let vmat = if track {
        let v = PolyMatrix::from_rows(vt);
        transpose(&v)
    } else {
        PolyMatrix::zeros(0, 0)
    };
    SmithForm {
        u: if track { PolyMatrix::from_rows(u) } else { PolyMatrix::zeros(0, 0) },
        d: PolyMatrix { rows: m, cols: n, data: d.into_iter().flatten().collect() },
        v: vmat,
        diagonal,
        invariants,
    }
}

fn transpose(m: &PolyMatrix) -> PolyMatrix {
    let mut t = PolyMatrix::zeros(m.cols, m.rows);
    for i in 0..m.rows {
        for j in 0..m.cols {
            t.set(j, i, m.get(i, j).clone());
        }
    }
    t
}

/// A submodule of `k[x]^rows` in lower column echelon form: basis column `t` vanishes above
/// its pivot row, and pivot rows strictly increase.
#[derive(Clone, Debug)]
pub struct ColumnEchelon {
    pub rows: usize,
    pub basis: Vec<Vec<Poly>>,
    pub pivot_rows: Vec<usize>,
}

impl ColumnEchelon {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Coefficients `c` with `sum c_t basis_t = v`, or `None` when `v` is not in the span.
    pub fn solve(&self, v: &[Poly], ring: &PolyRing) -> Option<Vec<Poly>> {
        let mut w = v.to_vec();
        let mut coeffs = Vec::with_capacity(self.basis.len());
        for (col, &r) in self.basis.iter().zip(&self.pivot_rows) {
            let (q, rem) = ring.div_rem(&w[r], &col[r]);
            if !rem.is_zero() {
                return None;
            }
            if !q.is_zero() {
                for (wi, ci) in w.iter_mut().zip(col) {
                    if !ci.is_zero() {
                        *wi = ring.sub_mul(wi, &q, ci);
                    }
                }
            }
            coeffs.push(q);
        }
        w.iter().all(Poly::is_zero).then_some(coeffs)
    }

    pub fn contains(&self, v: &[Poly], ring: &PolyRing) -> bool {
        self.solve(v, ring).is_some()
    }
}

/// Column reduction of the matrix with the given columns (each of length `rows`).
/// Returns the echelon basis of the column span and, when `track`, a basis of the kernel.
pub fn column_hermite(
    rows: usize,
    columns: Vec<Vec<Poly>>,
    ring: &PolyRing,
    track: bool,
) -> (ColumnEchelon, Vec<Vec<Poly>>) {
    let n = columns.len();
    let mut cols = columns;
    let mut trans: Vec<Vec<Poly>> = if track {
        (0..n)
            .map(|j| {
                let mut e = vec![Poly::zero(); n];
                e[j] = ring.one();
                e
            })
            .collect()
    } else {
        Vec::new()
    };
    let mut pivot_rows = Vec::new();
    let mut c = 0;
    for r in 0..rows {
        if c == n {
            break;
        }
        loop {
            let best = (c..n)
                .filter_map(|j| cols[j][r].degree().map(|d| (d, j)))
                .min();
            let Some((_, j)) = best else {
                break;
            };
            cols.swap(c, j);
            if track {
                trans.swap(c, j);
            }
            let mut clean = true;
            for j in c + 1..n {
                if cols[j][r].is_zero() {
                    continue;
                }
                let q = ring.div_rem(&cols[j][r], &cols[c][r]).0;
                let (head, tail) = cols.split_at_mut(j);
                for (t, s) in tail[0].iter_mut().zip(&head[c]) {
                    if !s.is_zero() {
                        *t = ring.sub_mul(t, &q, s);
                    }
                }
                if track {
                    let (head, tail) = trans.split_at_mut(j);
                    for (t, s) in tail[0].iter_mut().zip(&head[c]) {
                        if !s.is_zero() {
                            *t = ring.sub_mul(t, &q, s);
                        }
                    }
                }
                if !cols[j][r].is_zero() {
                    clean = false;
                }
            }
            if clean {
                pivot_rows.push(r);
                c += 1;
                break;
            }
        }
    }
    let kernel = if track { trans.split_off(c) } else { Vec::new() };
    cols.truncate(c);
    (ColumnEchelon { rows, basis: cols, pivot_rows }, kernel)
}

/// Generators (in fact a basis) of `{v : A v = 0}` over `k[x]`, each scaled so that its first
/// nonzero entry has leading coefficient 1.
pub fn kernel_over_poly(a: &PolyMatrix, ring: &PolyRing) -> Vec<Vec<Poly>> {
    let (_, kernel) = column_hermite(a.rows, a.columns(), ring, true);
    kernel
        .into_iter()
        .map(|v| {
            let lead = v.iter().find(|p| !p.is_zero()).map(Poly::lead).unwrap_or(FieldElement::ONE);
            let inv = ring.field().inv(lead);
            v.iter().map(|p| ring.scale(p, inv)).collect()
        })
        .collect()
}

/// Echelon basis of the submodule generated by `generators`.
pub fn submodule_basis(rows: usize, generators: Vec<Vec<Poly>>, ring: &PolyRing) -> ColumnEchelon {
    column_hermite(rows, generators, ring, false).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GaloisField;

    fn ring(p: u32) -> PolyRing {
        PolyRing::new(GaloisField::prime(p).unwrap())
    }

    #[test]
    fn identity_one_by_one() {
        let r = ring(5);
        let s = smith_normal_form(&PolyMatrix::from_rows(vec![vec![r.one()]]), &r);
        assert_eq!(s.diagonal, vec![r.one()]);
        assert_eq!(s.invariants, InvariantFactorData { torsion: vec![], free_rank: 0 });
    }

    #[test]
    fn coprime_diagonal_merges() {
        let r = ring(5);
        let a = PolyMatrix::from_rows(vec![
            vec![r.from_ints(&[-1, 1]), Poly::zero()],
            vec![Poly::zero(), r.from_ints(&[1, 1])],
        ]);
        let s = smith_normal_form(&a, &r);
        assert_eq!(s.diagonal, vec![r.one(), r.from_ints(&[-1, 0, 1])]);
        assert_eq!(s.u.mul(&a, &r).mul(&s.v, &r), s.d);
    }

    #[test]
    fn kernel_examples() {
        let r = ring(5);
        let x = r.x();
        let k = kernel_over_poly(&PolyMatrix::from_rows(vec![vec![x.clone(), x.clone()]]), &r);
        assert_eq!(k, vec![vec![r.one(), r.from_ints(&[-1])]]);
        assert!(kernel_over_poly(&PolyMatrix::from_rows(vec![vec![x.clone()]]), &r).is_empty());

        let r2 = ring(2);
        let k = kernel_over_poly(&PolyMatrix::from_rows(vec![vec![r2.x(), r2.one()]]), &r2);
        assert_eq!(k, vec![vec![r2.one(), r2.x()]]);
    }

    #[test]
    fn echelon_solves_members_only() {
        let r = ring(3);
        let x = r.x();
        let gens = vec![vec![x.clone(), r.one()], vec![Poly::zero(), x.clone()]];
        let ech = submodule_basis(2, gens, &r);
        assert!(ech.contains(&[r.mul(&x, &x), x.clone()], &r));
        assert!(!ech.contains(&[r.one(), Poly::zero()], &r));
    }
}
