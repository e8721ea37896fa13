//! Mechanical evaluation of entropies and (conditional) mutual informations
//! for the two variable families the analysis needs:
//!
//! * linear functions of independent uniform field vectors, where entropy is
//!   `rank * log2(p)`, and
//! * linear combinations of independent zero-mean circularly-symmetric
//!   complex Gaussians, where mutual information reduces to log-determinant
//!   ratios of covariance submatrices (the `log(pi*e)` constants cancel in
//!   every mutual information and are never materialized).
//!
//! Variables are always finite collections of named observables over an
//! explicit independent seed; systems are immutable after construction and
//! all queries are pure.

use crate::gf_linalg::{rank, GfMatrix};
use num_complex::Complex64;
use std::collections::BTreeMap;
use thiserror::Error;

/// Errors from information-measure evaluation.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum InfoError {
    #[error("unknown variable name: {0}")]
    UnknownVariable(String),
    /// A conditioning set has (numerically) zero covariance determinant.
    #[error("degenerate conditioning")]
    DegenerateConditioning,
}

/// Random variables that are linear maps of a concatenated independent
/// uniform seed over `F_p`.
#[derive(Debug, Clone)]
pub struct LinearRvSystem {
    /// Named independent uniform seed blocks and their lengths, in order.
    seed_dims: Vec<(String, usize)>,
    /// Named observables; every matrix has `seed_len` columns.
    variables: BTreeMap<String, GfMatrix>,
    seed_len: usize,
    p: u64,
}

impl LinearRvSystem {
    pub fn new(seed_dims: Vec<(String, usize)>, p: u64) -> Self {
        let seed_len = seed_dims.iter().map(|(_, d)| d).sum();
        LinearRvSystem {
            seed_dims,
            variables: BTreeMap::new(),
            seed_len,
            p,
        }
    }

    pub fn seed_len(&self) -> usize {
        self.seed_len
    }

    pub fn field(&self) -> u64 {
        self.p
    }

    /// Column offset of a named seed block within the concatenated seed.
    pub fn seed_offset(&self, name: &str) -> Option<usize> {
        let mut at = 0;
        for (n, d) in &self.seed_dims {
            if n == name {
                return Some(at);
            }
            at += d;
        }
        None
    }

    /// Register an observable as a linear map of the whole seed.
    pub fn define(&mut self, name: &str, map: GfMatrix) {
        assert_eq!(
            map.cols(),
            self.seed_len,
            "variable map must have one column per seed component"
        );
        assert_eq!(map.field(), self.p, "field mismatch");
        self.variables.insert(name.to_string(), map);
    }

    pub fn variable(&self, name: &str) -> Option<&GfMatrix> {
        self.variables.get(name)
    }

    fn stacked(&self, names: &[&str]) -> Result<GfMatrix, InfoError> {
        let mut mats = Vec::with_capacity(names.len());
        for &n in names {
            mats.push(
                self.variables
                    .get(n)
                    .ok_or_else(|| InfoError::UnknownVariable(n.to_string()))?,
            );
        }
        Ok(GfMatrix::stack_all(&mats, self.seed_len, self.p))
    }

    /// `H(targets | given)` in bits:
    /// `(rank(stack(targets, given)) - rank(stack(given))) * log2(p)`.
    pub fn cond_entropy(&self, targets: &[&str], given: &[&str]) -> Result<f64, InfoError> {
        let joint: Vec<&str> = targets.iter().chain(given.iter()).copied().collect();
        let joint_rank = rank(&self.stacked(&joint)?);
        let given_rank = rank(&self.stacked(given)?);
        Ok((joint_rank - given_rank) as f64 * (self.p as f64).log2())
    }

    /// `I(a; b | c) = H(a|c) - H(a|b,c)` in bits; always nonnegative.
    pub fn mutual_info(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64, InfoError> {
        let bc: Vec<&str> = b.iter().chain(c.iter()).copied().collect();
        Ok(self.cond_entropy(a, c)? - self.cond_entropy(a, &bc)?)
    }
}

/// Convenience wrappers mirroring the free-function operation names.
pub fn ld_cond_entropy(
    sys: &LinearRvSystem,
    targets: &[&str],
    given: &[&str],
) -> Result<f64, InfoError> {
    sys.cond_entropy(targets, given)
}

pub fn ld_mutual_info(
    sys: &LinearRvSystem,
    a: &[&str],
    b: &[&str],
    c: &[&str],
) -> Result<f64, InfoError> {
    sys.mutual_info(a, b, c)
}

/// Random variables that are complex linear combinations of independent
/// zero-mean circularly-symmetric complex Gaussian seeds.
#[derive(Debug, Clone)]
pub struct GaussRvSystem {
    /// Named independent seeds and their variances, in order.
    seeds: Vec<(String, f64)>,
    /// Named observables: one complex coefficient per seed.
    variables: BTreeMap<String, Vec<Complex64>>,
}

/// Pivot threshold below which a covariance determinant is treated as
/// singular rather than regularized.
const PIVOT_THRESHOLD: f64 = 1e-12;

/// Mutual informations are clamped to zero when they are negative by less
/// than this tolerance (pure floating-point round-off).
const CLAMP_TOLERANCE: f64 = 1e-9;

impl GaussRvSystem {
    pub fn new(seeds: Vec<(String, f64)>) -> Self {
        assert!(seeds.iter().all(|(_, v)| *v >= 0.0), "variances must be >= 0");
        GaussRvSystem {
            seeds,
            variables: BTreeMap::new(),
        }
    }

    pub fn seed_count(&self) -> usize {
        self.seeds.len()
    }

    fn seed_index(&self, name: &str) -> Option<usize> {
        self.seeds.iter().position(|(n, _)| n == name)
    }

    /// Register an observable from `(seed name, complex coefficient)` pairs.
    pub fn define(&mut self, name: &str, combo: &[(&str, Complex64)]) {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.seeds.len()];
        for (seed, c) in combo {
            let idx = self
                .seed_index(seed)
                .unwrap_or_else(|| panic!("unknown seed {seed}"));
            coeffs[idx] += c;
        }
        self.variables.insert(name.to_string(), coeffs);
    }

    /// Register an observable as an existing variable plus extra seed terms
    /// (used for chained definitions like a quantized observation).
    pub fn define_from(&mut self, name: &str, base: &str, extra: &[(&str, Complex64)]) {
        let mut coeffs = self
            .variables
            .get(base)
            .unwrap_or_else(|| panic!("unknown variable {base}"))
            .clone();
        for (seed, c) in extra {
            let idx = self
                .seed_index(seed)
                .unwrap_or_else(|| panic!("unknown seed {seed}"));
            coeffs[idx] += c;
        }
        self.variables.insert(name.to_string(), coeffs);
    }

    /// log2-determinant of the covariance of the named variables; empty set
    /// yields 0 (determinant 1). Errors if the matrix is singular at the
    /// pivot threshold.
    fn log2_det_cov(&self, names: &[&str]) -> Result<f64, InfoError> {
        let k = names.len();
        if k == 0 {
            return Ok(0.0);
        }
        let mut rows = Vec::with_capacity(k);
        for &n in names {
            rows.push(
                self.variables
                    .get(n)
                    .ok_or_else(|| InfoError::UnknownVariable(n.to_string()))?,
            );
        }
        // K[i][j] = sum_s var_s * a_i[s] * conj(a_j[s]), Hermitian PSD.
        let mut cov = vec![vec![Complex64::new(0.0, 0.0); k]; k];
        for i in 0..k {
            for j in 0..k {
                let mut acc = Complex64::new(0.0, 0.0);
                for (s, (_, var)) in self.seeds.iter().enumerate() {
                    acc += rows[i][s] * rows[j][s].conj() * var;
                }
                cov[i][j] = acc;
            }
        }
        // The matrix may carry very different scales across rows; normalize
        // the pivot test by the largest diagonal entry.
        let scale = (0..k)
            .map(|i| cov[i][i].re)
            .fold(0.0f64, f64::max)
            .max(1.0);
        // Hermitian elimination without pivot reordering: for PSD matrices a
        // vanishing leading pivot means a genuinely singular principal block.
        let mut log_det = 0.0f64;
        for i in 0..k {
            let pivot = cov[i][i].re;
            if pivot <= PIVOT_THRESHOLD * scale {
                return Err(InfoError::DegenerateConditioning);
            }
            log_det += pivot.log2();
            for r in i + 1..k {
                let f = cov[r][i] / pivot;
                for c in i..k {
                    let update = f * cov[i][c];
                    cov[r][c] -= update;
                }
            }
        }
        Ok(log_det)
    }

    /// `I(a; b | c)` in bits via the log-det identity
    /// `log|K_{a,c}| + log|K_{b,c}| - log|K_{a,b,c}| - log|K_c|`,
    /// clamped to 0 within tolerance.
    pub fn cond_mutual_info(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64, InfoError> {
        let ac: Vec<&str> = a.iter().chain(c.iter()).copied().collect();
        let bc: Vec<&str> = b.iter().chain(c.iter()).copied().collect();
        let abc: Vec<&str> = a.iter().chain(b.iter()).chain(c.iter()).copied().collect();
        let value =
            self.log2_det_cov(&ac)? + self.log2_det_cov(&bc)? - self.log2_det_cov(&abc)? - self.log2_det_cov(c)?;
        if value < 0.0 {
            if value < -CLAMP_TOLERANCE {
                // Genuine negativity would mean a broken covariance; the
                // identity guarantees nonnegativity up to round-off.
                debug_assert!(false, "mutual information {value} below clamp tolerance");
            }
            Ok(0.0)
        } else {
            Ok(value)
        }
    }
}

/// Free-function wrapper mirroring the operation name.
pub fn gauss_cond_mutual_info(
    sys: &GaussRvSystem,
    a: &[&str],
    b: &[&str],
    c: &[&str],
) -> Result<f64, InfoError> {
    sys.cond_mutual_info(a, b, c)
}

/// Exhaustive-enumeration entropy oracle for small binary systems: walks all
/// `p^seed_len` seeds and computes `H(targets | given)` from the empirical
/// (exact) joint distribution. Exponential; intended only for cross-checks
/// with total seed length at most ~16 over GF(2).
pub fn enumeration_cond_entropy(sys: &LinearRvSystem, targets: &[&str], given: &[&str]) -> f64 {
    let p = sys.field();
    let len = sys.seed_len();
    let total = (p as u128).pow(len as u32);
    assert!(total <= 1 << 20, "enumeration oracle limited to small seeds");
    let mut joint: BTreeMap<(Vec<u64>, Vec<u64>), u64> = BTreeMap::new();
    let mut marginal: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    let t_mat = {
        let mats: Vec<&GfMatrix> = targets.iter().map(|n| sys.variable(n).unwrap()).collect();
        GfMatrix::stack_all(&mats, len, p)
    };
    let g_mat = {
        let mats: Vec<&GfMatrix> = given.iter().map(|n| sys.variable(n).unwrap()).collect();
        GfMatrix::stack_all(&mats, len, p)
    };
    let mut seed = vec![0u64; len];
    for idx in 0..total {
        let mut rem = idx;
        for s in seed.iter_mut() {
            *s = (rem % p as u128) as u64;
            rem /= p as u128;
        }
        let t = t_mat.mul_vec(&seed);
        let g = g_mat.mul_vec(&seed);
        *joint.entry((g.clone(), t)).or_insert(0) += 1;
        *marginal.entry(g).or_insert(0) += 1;
    }
    let n = total as f64;
    fn h(counts: impl Iterator<Item = u64>, n: f64) -> f64 {
        counts
            .map(|c| {
                let q = c as f64 / n;
                -q * q.log2()
            })
            .sum()
    }
    h(joint.into_values(), n) - h(marginal.into_values(), n)
}
