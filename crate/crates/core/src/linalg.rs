//! Exact reduced row-echelon spans.
//!
//! [`EchelonBuilder`] keeps its rows fully reduced after every insertion, so a
//! candidate row only has to be reduced at the pivots where it is nonzero, and
//! the work per pivot is proportional to the number of free columns. For the
//! graded T-ideal components, whose codimension is small, this is what keeps
//! the computation cheap.

use crate::scalars::{FieldSpec, Scalar};

pub type SparseRow = Vec<(usize, Scalar)>;

const NONE: usize = usize::MAX;

#[derive(Clone, Debug)]
pub struct EchelonBuilder {
    field: FieldSpec,
    ncols: usize,
    rows: Vec<Vec<Scalar>>,
    pivot_row: Vec<usize>,
    free: Vec<usize>,
}

impl EchelonBuilder {
    pub fn new(field: FieldSpec, ncols: usize) -> Self {
        EchelonBuilder {
            field,
            ncols,
            rows: Vec::new(),
            pivot_row: vec![NONE; ncols],
            free: (0..ncols).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_full(&self) -> bool {
        self.free.is_empty()
    }

    /// Reduces `row` against the current basis; returns the remainder, which
    /// is supported on free columns only.
    fn reduce_dense(&self, row: &[(usize, Scalar)]) -> Vec<Scalar> {
        let zero = self.field.zero();
        let mut v = vec![zero; self.ncols];
        for (c, a) in row {
            v[*c] = v[*c].add(a);
        }
        for &(c, _) in row {
            let r = self.pivot_row[c];
            if r == NONE || v[c].is_zero() {
                continue;
            }
            let coef = std::mem::replace(&mut v[c], self.field.zero());
            let prow = &self.rows[r];
            for &j in &self.free {
                let e = &prow[j];
                if !e.is_zero() {
                    v[j] = v[j].sub(&coef.mul(e));
                }
            }
        }
        v
    }

    /// Adds `row` to the span; returns whether the rank grew.
    pub fn insert(&mut self, row: &[(usize, Scalar)]) -> bool {
        if self.free.is_empty() || row.is_empty() {
            return false;
        }
        let mut v = self.reduce_dense(row);
        let Some(pos) = self.free.iter().position(|&j| !v[j].is_zero()) else {
            return false;
        };
        let c0 = self.free[pos];
        let inv = v[c0].inv().expect("nonzero pivot");
        for &j in &self.free[pos..] {
            if !v[j].is_zero() {
                v[j] = v[j].mul(&inv);
            }
        }
        for prow in &mut self.rows {
            if prow[c0].is_zero() {
                continue;
            }
            let coef = prow[c0].clone();
            for &j in &self.free[pos..] {
                if !v[j].is_zero() {
                    prow[j] = prow[j].sub(&coef.mul(&v[j]));
                }
            }
        }
        self.free.remove(pos);
        self.pivot_row[c0] = self.rows.len();
        self.rows.push(v);
        true
    }

    pub fn contains(&self, row: &[(usize, Scalar)]) -> bool {
        let v = self.reduce_dense(row);
        self.free.iter().all(|&j| v[j].is_zero())
    }

    pub fn finish(self) -> Rref {
        let mut order: Vec<(usize, Vec<Scalar>)> = Vec::with_capacity(self.rows.len());
        let mut rows = self.rows;
        for c in 0..self.ncols {
            let r = self.pivot_row[c];
            if r != NONE {
                order.push((c, std::mem::take(&mut rows[r])));
            }
        }
        let (pivots, rows): (Vec<_>, Vec<_>) = order.into_iter().unzip();
        Rref::from_parts(self.field, self.ncols, pivots, rows)
    }
}

/// A subspace of `field^ncols` in canonical reduced row-echelon form.
///
/// Two spans over the same columns are equal iff their `Rref`s are equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    field: FieldSpec,
    ncols: usize,
    pivots: Vec<usize>,
    rows: Vec<Vec<Scalar>>,
    free: Vec<usize>,
    pivot_row: Vec<usize>,
}

impl Rref {
    fn from_parts(field: FieldSpec, ncols: usize, pivots: Vec<usize>, rows: Vec<Vec<Scalar>>) -> Self {
        let mut pivot_row = vec![NONE; ncols];
        for (i, &c) in pivots.iter().enumerate() {
            pivot_row[c] = i;
        }
        let free = (0..ncols).filter(|&c| pivot_row[c] == NONE).collect();
        Rref { field, ncols, pivots, rows, free, pivot_row }
    }

    pub fn zero(field: FieldSpec, ncols: usize) -> Self {
        Self::from_parts(field, ncols, Vec::new(), Vec::new())
    }

    pub fn full(field: FieldSpec, ncols: usize) -> Self {
        let rows = (0..ncols)
            .map(|i| {
                let mut r = vec![field.zero(); ncols];
                r[i] = field.one();
                r
            })
            .collect();
        Self::from_parts(field, ncols, (0..ncols).collect(), rows)
    }

    pub fn from_rows<'a>(field: FieldSpec, ncols: usize, rows: impl IntoIterator<Item = &'a SparseRow>) -> Self {
        let mut b = EchelonBuilder::new(field, ncols);
        for r in rows {
            b.insert(r);
        }
        b.finish()
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn codim(&self) -> usize {
        self.free.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn free_columns(&self) -> &[usize] {
        &self.free
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    pub fn sparse_rows(&self) -> Vec<SparseRow> {
        self.rows
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, a)| !a.is_zero()).map(|(j, a)| (j, a.clone())).collect())
            .collect()
    }

    /// Coordinates of `row` in the quotient by this span, indexed like
    /// [`Rref::free_columns`]. Zero iff `row` lies in the span.
    pub fn quotient_coords(&self, row: &[(usize, Scalar)]) -> Vec<Scalar> {
        let mut v = vec![self.field.zero(); self.ncols];
        for (c, a) in row {
            v[*c] = v[*c].add(a);
        }
        for &(c, _) in row {
            let r = self.pivot_row[c];
            if r == NONE || v[c].is_zero() {
                continue;
            }
            let coef = std::mem::replace(&mut v[c], self.field.zero());
            let prow = &self.rows[r];
            for &j in &self.free {
                let e = &prow[j];
                if !e.is_zero() {
                    v[j] = v[j].sub(&coef.mul(e));
                }
            }
        }
        self.free.iter().map(|&j| std::mem::replace(&mut v[j], self.field.zero())).collect()
    }

    pub fn contains(&self, row: &[(usize, Scalar)]) -> bool {
        self.quotient_coords(row).iter().all(Scalar::is_zero)
    }

    pub fn is_subspace_of(&self, other: &Rref) -> bool {
        self.ncols == other.ncols && self.sparse_rows().iter().all(|r| other.contains(r))
    }

    pub fn sum(&self, other: &Rref) -> Rref {
        let rows = self.sparse_rows().into_iter().chain(other.sparse_rows());
        let mut b = EchelonBuilder::new(self.field, self.ncols);
        for r in rows {
            b.insert(&r);
        }
        b.finish()
    }

    /// Basis of the kernel of the matrix whose rows are `self.rows`, i.e.
    /// of `{c : self * c = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<SparseRow> {
        self.free
            .iter()
            .map(|&f| {
                let mut v: SparseRow = vec![(f, self.field.one())];
                for (i, &p) in self.pivots.iter().enumerate() {
                    let e = &self.rows[i][f];
                    if !e.is_zero() {
                        v.push((p, e.neg()));
                    }
                }
                v.sort_by_key(|(j, _)| *j);
                v
            })
            .collect()
    }
}

/// Kernel of the linear map whose matrix has the given sparse rows.
pub fn kernel_of(field: FieldSpec, ncols: usize, rows: &[SparseRow]) -> Vec<SparseRow> {
    Rref::from_rows(field, ncols, rows.iter()).kernel()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Rational;

    fn q(n: i64) -> Scalar {
        FieldSpec::Q.from_i64(n)
    }

    fn row(v: &[i64]) -> SparseRow {
        v.iter().enumerate().filter(|(_, &a)| a != 0).map(|(j, &a)| (j, q(a))).collect()
    }

    #[test]
    fn canonical_regardless_of_order() {
        let rows = [row(&[1, 2, 3, 4]), row(&[2, 4, 7, 1]), row(&[0, 0, 1, -7]), row(&[3, 6, 10, 5])];
        let a = Rref::from_rows(FieldSpec::Q, 4, rows.iter());
        let b = Rref::from_rows(FieldSpec::Q, 4, rows.iter().rev());
        assert_eq!(a, b);
        assert_eq!(a.rank(), 2);
        assert_eq!(a.pivots(), &[0, 2]);
        assert_eq!(a.rows()[0][3], Scalar::Rat(Rational::from_int(25)));
    }

    #[test]
    fn membership_and_kernel() {
        let rows = [row(&[1, 1, 0]), row(&[0, 1, 1])];
        let s = Rref::from_rows(FieldSpec::Q, 3, rows.iter());
        assert!(s.contains(&row(&[1, 0, -1])));
        assert!(!s.contains(&row(&[1, 0, 0])));
        let k = s.kernel();
        assert_eq!(k.len(), 1);
        for r in &rows {
            let dot = r.iter().fold(q(0), |acc, (j, a)| {
                let kv = k[0].iter().find(|(i, _)| i == j).map(|(_, b)| b.clone()).unwrap_or(q(0));
                acc.add(&a.mul(&kv))
            });
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn rank_drops_mod_p() {
        let f5 = FieldSpec::new(5).unwrap();
        let rows: Vec<SparseRow> = vec![vec![(0, f5.from_i64(1)), (1, f5.from_i64(2))], vec![(0, f5.from_i64(3)), (1, f5.from_i64(1))]];
        // det = 1 - 6 = -5
        assert_eq!(Rref::from_rows(f5, 2, rows.iter()).rank(), 1);
    }
}
