//! Finite-field vectors and matrices, shift matrices, rank, and linear
//! solving — the substrate of the linear-deterministic channel model.
//!
//! Everything here is exact integer arithmetic modulo a prime `p`
//! (default 2); there is no floating point in this module. All operations
//! are pure and the types are freely shareable across threads.

use thiserror::Error;

/// Errors from finite-field linear algebra.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GfError {
    /// Two operands do not have compatible dimensions.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// Two operands live over different fields.
    #[error("field mismatch: p={0} vs p={1}")]
    FieldMismatch(u64, u64),
}

/// A dense matrix over the prime field `F_p`, stored row-major with all
/// entries reduced modulo `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GfMatrix {
    rows: usize,
    cols: usize,
    /// Field size; must be prime.
    p: u64,
    data: Vec<u64>,
}

/// Result of [`solve_determined`]: either a recovery matrix `R` with
/// `R * known = target`, or a witness that the target is not a linear
/// function of the known observations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solve {
    /// `R` reconstructs the target rows from the known rows for every seed.
    Determined(GfMatrix),
    /// The row space of the target is not contained in that of the known.
    Undetermined,
}

#[inline]
fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    (a + b) % p
}

#[inline]
fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    (a + p - b % p) % p
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    // p is small (fits comfortably in 32 bits in practice); u128 avoids
    // overflow without a dependency.
    ((a as u128 * b as u128) % p as u128) as u64
}

/// Multiplicative inverse modulo the prime `p` via Fermat's little theorem.
fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0, "zero has no inverse");
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = mul_mod(result, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    result
}

impl GfMatrix {
    /// All-zero `rows x cols` matrix over `F_p`.
    pub fn zero(rows: usize, cols: usize, p: u64) -> Self {
        GfMatrix {
            rows,
            cols,
            p,
            data: vec![0; rows * cols],
        }
    }

    /// `n x n` identity over `F_p`.
    pub fn identity(n: usize, p: u64) -> Self {
        let mut m = Self::zero(n, n, p);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Build from a row-major nested list (entries reduced mod `p`).
    pub fn from_rows(rows: &[Vec<u64>], p: u64) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let mut m = Self::zero(r, c, p);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
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

    pub fn field(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v % self.p;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    /// Matrix transpose.
    pub fn transpose(&self) -> GfMatrix {
        let mut t = GfMatrix::zero(self.cols, self.rows, self.p);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Elementwise sum; panics on dimension or field mismatch (internal
    /// callers always match shapes by construction).
    pub fn add(&self, other: &GfMatrix) -> GfMatrix {
        assert_eq!(self.p, other.p, "field mismatch");
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, &b) in out.data.iter_mut().zip(other.data.iter()) {
            *a = add_mod(*a, b, self.p);
        }
        out
    }

    /// Elementwise difference.
    pub fn sub(&self, other: &GfMatrix) -> GfMatrix {
        assert_eq!(self.p, other.p, "field mismatch");
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, &b) in out.data.iter_mut().zip(other.data.iter()) {
            *a = sub_mod(*a, b, self.p);
        }
        out
    }

    /// Additive inverse of every entry.
    pub fn neg(&self) -> GfMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = sub_mod(0, *a, self.p);
        }
        out
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &GfMatrix) -> GfMatrix {
        assert_eq!(self.p, other.p, "field mismatch");
        assert_eq!(
            self.cols, other.rows,
            "dimension mismatch in matrix product"
        );
        let mut out = GfMatrix::zero(self.rows, other.cols, self.p);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let v = add_mod(out.get(r, c), mul_mod(a, other.get(k, c), self.p), self.p);
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    /// Matrix–vector product.
    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in mat-vec");
        (0..self.rows)
            .map(|r| {
                let mut acc = 0u64;
                for c in 0..self.cols {
                    acc = add_mod(acc, mul_mod(self.get(r, c), v[c] % self.p, self.p), self.p);
                }
                acc
            })
            .collect()
    }

    /// Vertically stack `self` on top of `other` (equal column counts).
    pub fn stack(&self, other: &GfMatrix) -> GfMatrix {
        assert_eq!(self.p, other.p, "field mismatch");
        assert_eq!(self.cols, other.cols, "dimension mismatch in stack");
        let mut out = GfMatrix::zero(self.rows + other.rows, self.cols, self.p);
        out.data[..self.data.len()].copy_from_slice(&self.data);
        out.data[self.data.len()..].copy_from_slice(&other.data);
        out
    }

    /// Stack an arbitrary list of matrices (all with `cols` columns); an
    /// empty list yields a `0 x cols` matrix.
    pub fn stack_all(mats: &[&GfMatrix], cols: usize, p: u64) -> GfMatrix {
        let rows = mats.iter().map(|m| m.rows).sum();
        let mut out = GfMatrix::zero(rows, cols, p);
        let mut at = 0;
        for m in mats {
            assert_eq!(m.cols, cols, "dimension mismatch in stack");
            assert_eq!(m.p, p, "field mismatch");
            out.data[at..at + m.data.len()].copy_from_slice(&m.data);
            at += m.data.len();
        }
        out
    }

    /// A copy of rows `lo..hi` (0-based, half-open).
    pub fn row_slice(&self, lo: usize, hi: usize) -> GfMatrix {
        assert!(lo <= hi && hi <= self.rows);
        GfMatrix {
            rows: hi - lo,
            cols: self.cols,
            p: self.p,
            data: self.data[lo * self.cols..hi * self.cols].to_vec(),
        }
    }
}

/// The `n x n` down-shift matrix raised to the `k`-th power.
///
/// `S` has ones on the first subdiagonal, so `S x` moves every component of
/// `x` one level down, discarding the lowest. Conventions: `S^0 = I`,
/// `S^k = 0` for `k >= n`, and `S^{-k} = transpose(S^k)` (an up-shift);
/// exponents at or below `-n` likewise clamp to the zero matrix.
pub fn shift_matrix(n: usize, k: i64, p: u64) -> GfMatrix {
    assert!(n >= 1, "shift_matrix requires n >= 1");
    let mut m = GfMatrix::zero(n, n, p);
    if k.unsigned_abs() as usize >= n {
        return m;
    }
    if k >= 0 {
        // Down-shift: row r picks up component r - k.
        let k = k as usize;
        for r in k..n {
            m.set(r, r - k, 1);
        }
    } else {
        // Up-shift (transpose of the down-shift): row r picks up r + |k|.
        let k = (-k) as usize;
        for r in 0..n - k {
            m.set(r, r + k, 1);
        }
    }
    m
}

/// Row-echelon elimination; returns (rank, rref, transform) where
/// `transform * input = rref` restricted to the first `rank` rows, and the
/// pivot column of each of the first `rank` rows.
///
/// Pivoting order is deterministic: leftmost pivot column, topmost
/// remaining row.
fn row_reduce(m: &GfMatrix) -> (usize, GfMatrix, GfMatrix, Vec<usize>) {
    let p = m.p;
    let mut a = m.clone();
    let mut t = GfMatrix::identity(m.rows, p);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        // Topmost row at or below `row` with a nonzero entry in `col`.
        let Some(pr) = (row..a.rows).find(|&r| a.get(r, col) != 0) else {
            continue;
        };
        if pr != row {
            for c in 0..a.cols {
                let (x, y) = (a.get(row, c), a.get(pr, c));
                a.set(row, c, y);
                a.set(pr, c, x);
            }
            for c in 0..t.cols {
                let (x, y) = (t.get(row, c), t.get(pr, c));
                t.set(row, c, y);
                t.set(pr, c, x);
            }
        }
        // Normalize the pivot to 1.
        let inv = inv_mod(a.get(row, col), p);
        for c in 0..a.cols {
            a.set(row, c, mul_mod(a.get(row, c), inv, p));
        }
        for c in 0..t.cols {
            t.set(row, c, mul_mod(t.get(row, c), inv, p));
        }
        // Clear the column everywhere else (full reduction).
        for r in 0..a.rows {
            if r == row {
                continue;
            }
            let f = a.get(r, col);
            if f == 0 {
                continue;
            }
            for c in 0..a.cols {
                let v = sub_mod(a.get(r, c), mul_mod(f, a.get(row, c), p), p);
                a.set(r, c, v);
            }
            for c in 0..t.cols {
                let v = sub_mod(t.get(r, c), mul_mod(f, t.get(row, c), p), p);
                t.set(r, c, v);
            }
        }
        pivots.push(col);
        row += 1;
    }
    (row, a, t, pivots)
}

/// Rank over `F_p` via exact elimination.
pub fn rank(m: &GfMatrix) -> usize {
    row_reduce(m).0
}

/// Decide whether every row of `target` lies in the row space of `known`,
/// and if so return a recovery matrix `R` with `R * known = target`.
///
/// `known` and `target` must map the same seed (equal column counts).
pub fn solve_determined(known: &GfMatrix, target: &GfMatrix) -> Result<Solve, GfError> {
    if known.p != target.p {
        return Err(GfError::FieldMismatch(known.p, target.p));
    }
    if known.cols != target.cols {
        return Err(GfError::DimensionMismatch(format!(
            "known has {} columns, target has {}",
            known.cols, target.cols
        )));
    }
    let p = known.p;
    let (rank_k, rref, transform, pivots) = row_reduce(known);
    // Express each target row in the (fully reduced) pivot basis: the
    // coefficient on basis row i is the target entry at pivot column i.
    let mut recovery = GfMatrix::zero(target.rows, known.rows, p);
    for tr in 0..target.rows {
        let mut residual: Vec<u64> = (0..target.cols).map(|c| target.get(tr, c)).collect();
        let mut coeffs = vec![0u64; rank_k];
        for (i, &pc) in pivots.iter().enumerate() {
            let f = residual[pc];
            if f == 0 {
                continue;
            }
            coeffs[i] = f;
            for c in 0..target.cols {
                residual[c] = sub_mod(residual[c], mul_mod(f, rref.get(i, c), p), p);
            }
        }
        if residual.iter().any(|&v| v != 0) {
            return Ok(Solve::Undetermined);
        }
        // Recovery row = coeffs * transform (first rank_k rows of transform
        // map the original known rows onto the reduced basis).
        for c in 0..known.rows {
            let mut acc = 0;
            for (i, &f) in coeffs.iter().enumerate() {
                acc = add_mod(acc, mul_mod(f, transform.get(i, c), p), p);
            }
            recovery.set(tr, c, acc);
        }
    }
    Ok(Solve::Determined(recovery))
}
