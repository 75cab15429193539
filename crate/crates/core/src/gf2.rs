//! Dense linear algebra over GF(2).
//!
//! Rows are packed into `u64` words and reduced by word-level XOR. Elimination
//! always pivots on the first row (in current order) holding a set bit in the
//! pivot column, so reduced forms and extracted witnesses are reproducible.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{input_err, Result};

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A packed vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self { words: vec![0; words_for(len)], len }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.set(i, true);
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len, "bit {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len, "bit {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn and_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    pub fn or_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        let ones: u32 = self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum();
        ones & 1 == 1
    }

    /// Number of positions set in both vectors.
    pub fn and_count(&self, other: &BitVec) -> usize {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words.iter().enumerate().find(|(_, &w)| w != 0).map(|(k, w)| k * WORD + w.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut rest = w;
            core::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(k * WORD + bit)
            })
        })
    }

    /// Concatenation `self ++ other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Bits `start..start + len` as a new vector.
    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        let mut out = BitVec::zeros(len);
        for i in self.iter_ones().filter(|&i| i >= start && i < start + len) {
            out.set(i - start, true);
        }
        out
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: Vec<BitVec>,
    cols: usize,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows: vec![BitVec::zeros(cols); rows], cols }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from row vectors; every row must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(input_err!("row of length {} in a matrix with {cols} columns", bad.len()));
        }
        Ok(Self { rows, cols })
    }

    pub fn from_bools(rows: &[&[bool]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(cols, rows.iter().map(|r| BitVec::from_bools(r)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn row_vectors(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    pub fn push_row(&mut self, row: BitVec) -> Result<()> {
        if row.len() != self.cols {
            return Err(input_err!("row of length {} in a matrix with {} columns", row.len(), self.cols));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.iter_ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// `self · x`.
    pub fn mul_vec(&self, x: &BitVec) -> Result<BitVec> {
        if x.len() != self.cols {
            return Err(input_err!("vector of length {} against {} columns", x.len(), self.cols));
        }
        Ok(BitVec::from_bools(&self.rows.iter().map(|r| r.dot(x)).collect::<Vec<_>>()))
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows.len(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r:?}")?;
        }
        Ok(())
    }
}

/// Reduced row echelon form of `rows`, with an optional right-hand side
/// column carried through the same row operations. Returns the pivot column
/// of each leading row; rows past `pivots.len()` are zero in the matrix part.
fn rref(rows: &mut [BitVec], rhs: Option<&mut BitVec>, cols: usize) -> Vec<usize> {
    let mut rhs = rhs;
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows.len() {
            break;
        }
        let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, p);
        if let Some(b) = rhs.as_deref_mut() {
            let (x, y) = (b.get(rank), b.get(p));
            b.set(rank, y);
            b.set(p, x);
        }
        let (before, rest) = rows.split_at_mut(rank);
        let (pivot_row, after) = rest.split_first_mut().expect("pivot row exists");
        let pivot_row = &*pivot_row;
        for (off, row) in
            before.iter_mut().enumerate().chain(after.iter_mut().enumerate().map(|(k, r)| (rank + 1 + k, r)))
        {
            if row.get(col) {
                row.xor_assign(pivot_row);
                if let Some(b) = rhs.as_deref_mut() {
                    if b.get(rank) {
                        b.flip(off);
                    }
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    pivots
}

/// Dimension of the row space.
pub fn rank(m: &BitMatrix) -> usize {
    let mut rows = m.rows.clone();
    rref(&mut rows, None, m.cols).len()
}

/// Solves `a · x = b`. Returns `Ok(None)` when the system is inconsistent.
pub fn solve(a: &BitMatrix, b: &BitVec) -> Result<Option<BitVec>> {
    if b.len() != a.rows() {
        return Err(input_err!("right-hand side has length {} but the matrix has {} rows", b.len(), a.rows()));
    }
    let mut rows = a.rows.clone();
    let mut rhs = b.clone();
    let pivots = rref(&mut rows, Some(&mut rhs), a.cols);
    if (pivots.len()..rows.len()).any(|r| rhs.get(r)) {
        return Ok(None);
    }
    let mut x = BitVec::zeros(a.cols);
    for (r, &c) in pivots.iter().enumerate() {
        x.set(c, rhs.get(r));
    }
    Ok(Some(x))
}

/// Basis of `{x : a · x = 0}`, one vector per free column in increasing order.
pub fn nullspace(a: &BitMatrix) -> Vec<BitVec> {
    let mut rows = a.rows.clone();
    let pivots = rref(&mut rows, None, a.cols);
    let mut is_pivot = vec![false; a.cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    (0..a.cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut x = BitVec::zeros(a.cols);
            x.set(f, true);
            for (r, &c) in pivots.iter().enumerate() {
                if rows[r].get(f) {
                    x.set(c, true);
                }
            }
            x
        })
        .collect()
}

/// Incrementally built row basis that remembers, for every basis row, which
/// inserted vectors were combined to produce it. Used for repeated span
/// membership queries against a fixed generating set.
#[derive(Clone, Debug)]
pub struct SpanBasis {
    len: usize,
    capacity: usize,
    inserted: usize,
    /// (pivot column, reduced row, combination of inserted vectors)
    rows: Vec<(usize, BitVec, BitVec)>,
}

impl SpanBasis {
    /// Basis for vectors of length `len`, accepting up to `capacity` insertions.
    pub fn new(len: usize, capacity: usize) -> Self {
        Self { len, capacity, inserted: 0, rows: Vec::new() }
    }

    /// Basis that only tracks the span, not how members are combined.
    pub fn untracked(len: usize) -> Self {
        Self::new(len, 0)
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn vector_len(&self) -> usize {
        self.len
    }

    fn reduce_tracked(&self, v: &BitVec) -> (BitVec, BitVec) {
        let mut rest = v.clone();
        let mut combo = BitVec::zeros(self.capacity);
        for (pivot, row, row_combo) in &self.rows {
            if rest.get(*pivot) {
                rest.xor_assign(row);
                combo.xor_assign(row_combo);
            }
        }
        (rest, combo)
    }

    /// Inserts `v`; returns true when it enlarged the span.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        assert_eq!(v.len(), self.len, "vector length mismatch");
        let index = self.inserted;
        self.inserted += 1;
        let (rest, mut combo) = self.reduce_tracked(v);
        let Some(pivot) = rest.first_one() else {
            return false;
        };
        if self.capacity > 0 {
            assert!(index < self.capacity, "span basis capacity {} exceeded", self.capacity);
            combo.flip(index);
        }
        // keep the basis fully reduced on pivot columns so reduction is one pass
        for (_, row, row_combo) in self.rows.iter_mut() {
            if row.get(pivot) {
                row.xor_assign(&rest);
                row_combo.xor_assign(&combo);
            }
        }
        self.rows.push((pivot, rest, combo));
        true
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce_tracked(v).0.is_zero()
    }

    /// Indices of inserted vectors summing to `v`, ascending, if `v` lies in the span.
    pub fn express(&self, v: &BitVec) -> Option<Vec<usize>> {
        let (rest, combo) = self.reduce_tracked(v);
        rest.is_zero().then(|| combo.iter_ones().collect())
    }

    /// Reduced basis vectors.
    pub fn basis(&self) -> impl Iterator<Item = &BitVec> {
        self.rows.iter().map(|(_, r, _)| r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> BitMatrix {
        let rows = (0..rows)
            .map(|_| BitVec::from_bools(&(0..cols).map(|_| rng.random_bool(0.5)).collect::<Vec<_>>()))
            .collect();
        BitMatrix::from_rows(cols, rows).unwrap()
    }

    /// Size of the row span, by enumerating every subset of rows.
    fn span_size_brute(m: &BitMatrix) -> usize {
        let mut seen = alloc::collections::BTreeSet::new();
        for mask in 0u32..(1 << m.rows()) {
            let mut acc = BitVec::zeros(m.cols());
            for r in 0..m.rows() {
                if mask >> r & 1 == 1 {
                    acc.xor_assign(m.row(r));
                }
            }
            seen.insert(acc.to_bools());
        }
        seen.len()
    }

    #[test]
    fn rank_small_cases() {
        assert_eq!(rank(&BitMatrix::identity(2)), 2);
        let dup = BitMatrix::from_bools(&[&[true, true], &[true, true]]).unwrap();
        assert_eq!(rank(&dup), 1);
        assert_eq!(rank(&BitMatrix::zeros(3, 5)), 0);
    }

    #[test]
    fn rank_matches_span_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let m = random_matrix(&mut rng, 12, 16);
            let r = rank(&m);
            assert_eq!(1usize << r, span_size_brute(&m));
            assert_eq!(r + nullspace(&m).len(), m.cols());
        }
    }

    #[test]
    fn rank_twenty_by_thirty() {
        // row space is a subspace, so |span| = 2^rank; the span is sampled
        // through 2^16 subsets and must never exceed 2^rank distinct vectors
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let m = random_matrix(&mut rng, 20, 30);
        let r = rank(&m);
        assert!(r <= 20);
        let mut seen = alloc::collections::BTreeSet::new();
        for mask in 0u32..(1 << 16) {
            let mut acc = BitVec::zeros(30);
            for row in 0..16 {
                if mask >> row & 1 == 1 {
                    acc.xor_assign(m.row(row));
                }
            }
            seen.insert(acc.to_bools());
        }
        let r16 = rank(&BitMatrix::from_rows(30, m.row_vectors()[..16].to_vec()).unwrap());
        assert_eq!(seen.len(), 1 << r16);
        assert_eq!(r + nullspace(&m).len(), 30);
        assert_eq!(r, rank(&m.transpose()));
    }

    #[test]
    fn solve_identity_and_infeasible() {
        let b = BitVec::from_bools(&[true, false, true]);
        assert_eq!(solve(&BitMatrix::identity(3), &b).unwrap(), Some(b.clone()));
        let zero = BitMatrix::zeros(1, 2);
        assert_eq!(solve(&zero, &BitVec::from_bools(&[true])).unwrap(), None);
        assert!(solve(&zero, &BitVec::zeros(2)).is_err());
    }

    #[test]
    fn solve_constructed_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..25 {
            let a = random_matrix(&mut rng, 15, 25);
            let x0 = BitVec::from_bools(&(0..25).map(|_| rng.random_bool(0.5)).collect::<Vec<_>>());
            let b = a.mul_vec(&x0).unwrap();
            let x = solve(&a, &b).unwrap().expect("consistent system");
            assert_eq!(a.mul_vec(&x).unwrap(), b);
        }
    }

    #[test]
    fn nullspace_examples() {
        let a = BitMatrix::from_bools(&[&[true, true]]).unwrap();
        let ns = nullspace(&a);
        assert_eq!(ns, vec![BitVec::from_bools(&[true, true])]);
        assert!(nullspace(&BitMatrix::identity(4)).is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_matrix(&mut rng, 10, 18);
        let ns = nullspace(&a);
        assert_eq!(ns.len(), 18 - rank(&a));
        for v in &ns {
            assert!(a.mul_vec(v).unwrap().is_zero());
        }
    }

    #[test]
    fn span_basis_expresses_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = random_matrix(&mut rng, 8, 20);
        let mut basis = SpanBasis::new(20, 8);
        for r in m.row_vectors() {
            basis.insert(r);
        }
        assert_eq!(basis.dim(), rank(&m));
        let target = {
            let mut t = m.row(1).clone();
            t.xor_assign(m.row(4));
            t.xor_assign(m.row(7));
            t
        };
        let combo = basis.express(&target).unwrap();
        let mut acc = BitVec::zeros(20);
        for i in combo {
            acc.xor_assign(m.row(i));
        }
        assert_eq!(acc, target);
    }

    fn arb_matrix() -> impl Strategy<Value = BitMatrix> {
        (1usize..10, 1usize..14).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), c), r).prop_map(move |rows| {
                BitMatrix::from_rows(c, rows.iter().map(|b| BitVec::from_bools(b)).collect()).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in arb_matrix()) {
            prop_assert_eq!(rank(&m) + nullspace(&m).len(), m.cols());
            prop_assert!(rank(&m) <= m.rows().min(m.cols()));
        }

        #[test]
        fn rank_invariant_under_row_moves(m in arb_matrix(), swap in any::<(usize, usize)>()) {
            let mut rows = m.row_vectors().to_vec();
            let n = rows.len();
            rows.swap(swap.0 % n, swap.1 % n);
            rows.push(BitVec::zeros(m.cols()));
            let moved = BitMatrix::from_rows(m.cols(), rows).unwrap();
            prop_assert_eq!(rank(&m), rank(&moved));
        }

        #[test]
        fn solve_witness_iff_in_column_span(m in arb_matrix(), bits in proptest::collection::vec(any::<bool>(), 10)) {
            let b = BitVec::from_bools(&bits[..m.rows()]);
            let in_span = {
                let mut aug = m.transpose().row_vectors().to_vec();
                let before = rank(&BitMatrix::from_rows(m.rows(), aug.clone()).unwrap());
                aug.push(b.clone());
                before == rank(&BitMatrix::from_rows(m.rows(), aug).unwrap())
            };
            match solve(&m, &b).unwrap() {
                Some(x) => { prop_assert!(in_span); prop_assert_eq!(m.mul_vec(&x).unwrap(), b); }
                None => prop_assert!(!in_span),
            }
        }
    }
}
