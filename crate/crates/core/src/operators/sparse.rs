use std::collections::BTreeMap;

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::TruncatedBasis;

/// Entries at or below this magnitude are dropped after every operation.
pub const PRUNE: f64 = 1e-15;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// How an operator moves states between fixed-total sectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SectorShift {
    Preserves,
    RaisesByOne,
    LowersByOne,
    Mixed,
}

impl SectorShift {
    fn offset(self) -> Option<i64> {
        match self {
            SectorShift::Preserves => Some(0),
            SectorShift::RaisesByOne => Some(1),
            SectorShift::LowersByOne => Some(-1),
            SectorShift::Mixed => None,
        }
    }

    fn from_offset(offset: Option<i64>) -> Self {
        match offset {
            Some(0) => SectorShift::Preserves,
            Some(1) => SectorShift::RaisesByOne,
            Some(-1) => SectorShift::LowersByOne,
            _ => SectorShift::Mixed,
        }
    }

    /// Tag of a product `A·B` given the tags of `A` and `B`.
    pub fn compose(self, other: Self) -> Self {
        match (self.offset(), other.offset()) {
            (Some(a), Some(b)) => Self::from_offset(Some(a + b)),
            _ => SectorShift::Mixed,
        }
    }

    /// Tag of a sum of two operators.
    pub fn join(self, other: Self) -> Self {
        if self == other {
            self
        } else {
            SectorShift::Mixed
        }
    }

    pub fn adjoint(self) -> Self {
        Self::from_offset(self.offset().map(|o| -o))
    }

    /// Whether an entry mapping total `from` to total `to` is allowed.
    pub fn allows(self, from: usize, to: usize) -> bool {
        match self.offset() {
            Some(o) => to as i64 - from as i64 == o,
            None => true,
        }
    }
}

/// Complex sparse matrix on a truncated basis, stored row-wise with columns
/// sorted and unique. Zero-magnitude entries (≤ [`PRUNE`]) never appear.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
    shift: SectorShift,
}

impl SparseOperator {
    pub fn zeros(dim: usize, shift: SectorShift) -> Self {
        Self {
            dim,
            rows: vec![Vec::new(); dim],
            shift,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self::from_triplets(
            values.len(),
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| (i, i, Complex64::new(v, 0.0))),
            SectorShift::Preserves,
        )
    }

    /// Build from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(
        dim: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Complex64)>,
        shift: SectorShift,
    ) -> Self {
        let mut acc: Vec<BTreeMap<usize, Complex64>> = vec![BTreeMap::new(); dim];
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "entry ({r}, {c}) outside dimension {dim}");
            *acc[r].entry(c).or_insert(ZERO) += v;
        }
        let rows = acc
            .into_iter()
            .map(|row| row.into_iter().filter(|(_, v)| v.norm() > PRUNE).collect())
            .collect();
        Self { dim, rows, shift }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shift(&self) -> SectorShift {
        self.shift
    }

    pub fn with_shift(mut self, shift: SectorShift) -> Self {
        self.shift = shift;
        self
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, r: usize) -> &[(usize, Complex64)] {
        &self.rows[r]
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        match self.rows[r].binary_search_by_key(&c, |&(col, _)| col) {
            Ok(i) => self.rows[r][i].1,
            Err(_) => ZERO,
        }
    }

    pub fn is_real(&self) -> bool {
        self.entries().all(|(_, _, v)| v.im == 0.0)
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); self.dim];
        for (r, c, v) in self.entries() {
            rows[c].push((r, v.conj()));
        }
        // rows are filled in increasing r, so each is already sorted
        Self {
            dim: self.dim,
            rows,
            shift: self.shift.adjoint(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_triplets(
            self.dim,
            self.entries().map(|(r, c, v)| (r, c, v * factor)),
            self.shift,
        )
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// `self + factor·other`.
    pub fn axpy(&self, factor: Complex64, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let shift = if other.nnz() == 0 {
            self.shift
        } else if self.nnz() == 0 {
            other.shift
        } else {
            self.shift.join(other.shift)
        };
        Ok(Self::from_triplets(
            self.dim,
            self.entries()
                .chain(other.entries().map(|(r, c, v)| (r, c, v * factor))),
            shift,
        ))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    /// Sparse product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let mut rows = Vec::with_capacity(self.dim);
        let mut scratch = vec![ZERO; self.dim];
        let mut touched = vec![false; self.dim];
        let mut cols: Vec<usize> = Vec::new();
        for row in &self.rows {
            for &(k, a) in row {
                for &(c, b) in &other.rows[k] {
                    if !touched[c] {
                        touched[c] = true;
                        cols.push(c);
                    }
                    scratch[c] += a * b;
                }
            }
            cols.sort_unstable();
            let mut out = Vec::with_capacity(cols.len());
            for &c in &cols {
                let v = scratch[c];
                if v.norm() > PRUNE {
                    out.push((c, v));
                }
                scratch[c] = ZERO;
                touched[c] = false;
            }
            cols.clear();
            rows.push(out);
        }
        Ok(Self {
            dim: self.dim,
            rows,
            shift: self.shift.compose(other.shift),
        })
    }

    /// Leading `new_dim × new_dim` block. On a sector-ordered basis this is
    /// the compression `P_m X P_m` onto `D^(m)`.
    pub fn compress(&self, new_dim: usize) -> Self {
        assert!(new_dim <= self.dim);
        let rows = self.rows[..new_dim]
            .iter()
            .map(|row| row.iter().copied().filter(|&(c, _)| c < new_dim).collect())
            .collect();
        Self {
            dim: new_dim,
            rows,
            shift: self.shift,
        }
    }

    /// Keep only rows and columns inside `range` (same dimension).
    pub fn sandwich(&self, range: std::ops::Range<usize>) -> Self {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(r, row)| {
                if range.contains(&r) {
                    row.iter().copied().filter(|(c, _)| range.contains(c)).collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
        Self {
            dim: self.dim,
            rows,
            shift: self.shift,
        }
    }

    /// Square block on `range` as a dense matrix.
    pub fn dense_block(&self, range: std::ops::Range<usize>) -> Mat<Complex64> {
        let n = range.len();
        let mut out = Mat::<Complex64>::zeros(n, n);
        for r in range.clone() {
            for &(c, v) in &self.rows[r] {
                if range.contains(&c) {
                    out[(r - range.start, c - range.start)] = v;
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> Mat<Complex64> {
        self.dense_block(0..self.dim)
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(c, a)| a * v[c]).sum())
            .collect()
    }

    /// `⟨u|X|v⟩`.
    pub fn expectation(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        self.rows
            .iter()
            .enumerate()
            .map(|(r, row)| u[r].conj() * row.iter().map(|&(c, a)| a * v[c]).sum::<Complex64>())
            .sum()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest entrywise magnitude of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self
            .sub(other)?
            .entries()
            .map(|(_, _, v)| v.norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().map(|(_, _, v)| v.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries().map(|(_, _, v)| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |X − X†|` entrywise.
    pub fn hermitian_defect(&self) -> f64 {
        self.entries()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Whether every stored entry is compatible with the sector-shift tag.
    pub fn shift_consistent(&self, basis: &TruncatedBasis) -> bool {
        assert_eq!(basis.dim(), self.dim);
        self.entries()
            .all(|(r, c, _)| self.shift.allows(basis.total(c), basis.total(r)))
    }

    /// Tag recomputed from the stored entries.
    pub fn infer_shift(&self, basis: &TruncatedBasis) -> SectorShift {
        let mut offset: Option<Option<i64>> = None;
        for (r, c, _) in self.entries() {
            let o = basis.total(r) as i64 - basis.total(c) as i64;
            match offset {
                None => offset = Some(Some(o)),
                Some(Some(prev)) if prev != o => offset = Some(None),
                _ => {}
            }
        }
        match offset {
            None => SectorShift::Preserves,
            Some(o) => SectorShift::from_offset(o),
        }
    }
}

/// `X·Y − Y·X`.
pub fn commutator(x: &SparseOperator, y: &SparseOperator) -> Result<SparseOperator> {
    let xy = x.mul(y)?;
    let yx = y.mul(x)?;
    let mut out = xy.sub(&yx)?;
    out.shift = x.shift.compose(y.shift);
    Ok(out)
}
