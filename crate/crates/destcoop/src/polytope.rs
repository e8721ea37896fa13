//! Exact rational linear-inequality systems, Fourier–Motzkin elimination,
//! and linear maximization over the resulting polyhedra.
//!
//! Every constraint is `coeffs . x <= rhs` with arbitrary-precision rational
//! entries, so elimination and maximization are exact: no tolerance ever
//! enters a feasibility decision. Constraints are kept normalized to
//! coprime integer coefficients, which bounds coefficient growth during
//! elimination.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::HashMap;

/// Outcome of maximizing a linear objective over a constraint system.
#[derive(Debug, Clone, PartialEq)]
pub enum LpResult {
    /// Finite maximum, exact.
    Bounded(BigRational),
    /// The objective increases without bound over the feasible set.
    Unbounded,
    /// The feasible set is empty.
    Infeasible,
}

impl LpResult {
    /// Finite value as f64 (None for unbounded/infeasible).
    pub fn value(&self) -> Option<f64> {
        match self {
            LpResult::Bounded(v) => v.to_f64(),
            _ => None,
        }
    }
}

/// One inequality `coeffs . x <= rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<BigRational>,
    pub rhs: BigRational,
}

/// A conjunction of linear inequalities over a fixed variable count.
///
/// Variables are addressed by index; eliminating a variable keeps the index
/// space intact (the variable simply no longer appears), so constraint
/// coefficients never need reindexing.
#[derive(Debug, Clone, Default)]
pub struct ConstraintSystem {
    num_vars: usize,
    constraints: Vec<Constraint>,
}

fn big_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let mut a = a.abs();
    let mut b = b.abs();
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

fn big_lcm(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() || b.is_zero() {
        return BigInt::zero();
    }
    (a * b).abs() / big_gcd(a, b)
}

/// Scale a constraint so all entries are coprime integers (positive leading
/// scale, so the inequality direction is preserved).
fn normalize(mut coeffs: Vec<BigRational>, mut rhs: BigRational) -> Constraint {
    let mut denom_lcm = BigInt::one();
    for r in coeffs.iter().chain(std::iter::once(&rhs)) {
        denom_lcm = big_lcm(&denom_lcm, r.denom());
    }
    let scale = BigRational::from_integer(denom_lcm);
    for c in coeffs.iter_mut() {
        *c *= &scale;
    }
    rhs *= &scale;
    let mut g = BigInt::zero();
    for r in coeffs.iter().chain(std::iter::once(&rhs)) {
        g = big_gcd(&g, r.numer());
    }
    if !g.is_zero() && !g.is_one() {
        let shrink = BigRational::from_integer(g);
        for c in coeffs.iter_mut() {
            *c /= &shrink;
        }
        rhs /= &shrink;
    }
    Constraint { coeffs, rhs }
}

impl ConstraintSystem {
    pub fn new(num_vars: usize) -> Self {
        ConstraintSystem {
            num_vars,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Add `coeffs . x <= rhs` with exact rational entries.
    pub fn add_rational(&mut self, coeffs: Vec<BigRational>, rhs: BigRational) {
        assert_eq!(coeffs.len(), self.num_vars, "coefficient count mismatch");
        let c = normalize(coeffs, rhs);
        // Trivially true constant constraints carry no information.
        if c.coeffs.iter().all(|v| v.is_zero()) && !c.rhs.is_negative() {
            return;
        }
        self.constraints.push(c);
    }

    /// Add `coeffs . x <= rhs` from f64 values, converted exactly (every
    /// finite f64 is a rational; nothing is rounded).
    pub fn add(&mut self, coeffs: &[f64], rhs: f64) {
        let coeffs: Vec<BigRational> = coeffs
            .iter()
            .map(|&v| BigRational::from_float(v).expect("non-finite coefficient"))
            .collect();
        let rhs = BigRational::from_float(rhs).expect("non-finite rhs");
        self.add_rational(coeffs, rhs);
    }

    /// Add integer-coefficient constraint `coeffs . x <= rhs`.
    pub fn add_int(&mut self, coeffs: &[i64], rhs: i64) {
        let coeffs: Vec<BigRational> = coeffs
            .iter()
            .map(|&v| BigRational::from_integer(v.into()))
            .collect();
        self.add_rational(coeffs, BigRational::from_integer(rhs.into()));
    }

    /// Constrain a single variable to be nonnegative.
    pub fn add_nonneg(&mut self, var: usize) {
        let mut coeffs = vec![BigRational::zero(); self.num_vars];
        coeffs[var] = -BigRational::one();
        self.add_rational(coeffs, BigRational::zero());
    }

    /// Constrain every variable to be nonnegative.
    pub fn add_all_nonneg(&mut self) {
        for v in 0..self.num_vars {
            self.add_nonneg(v);
        }
    }

    /// Remove duplicate constraints and, among constraints with identical
    /// coefficient vectors, keep only the tightest right-hand side.
    fn dedup(&mut self) {
        let mut best: HashMap<Vec<BigRational>, BigRational> = HashMap::new();
        for c in self.constraints.drain(..) {
            match best.get_mut(&c.coeffs) {
                Some(rhs) => {
                    if c.rhs < *rhs {
                        *rhs = c.rhs;
                    }
                }
                None => {
                    best.insert(c.coeffs, c.rhs);
                }
            }
        }
        let mut items: Vec<Constraint> = best
            .into_iter()
            .map(|(coeffs, rhs)| Constraint { coeffs, rhs })
            .collect();
        // Deterministic order so downstream output is reproducible.
        items.sort_by(|a, b| (&a.coeffs, &a.rhs).cmp(&(&b.coeffs, &b.rhs)));
        self.constraints = items;
    }

    /// Eliminate one variable by Fourier–Motzkin: every pair of an upper and
    /// a lower bound on the variable combines into one new constraint; the
    /// projection onto the remaining variables is exact.
    pub fn fm_eliminate(&self, var: usize) -> ConstraintSystem {
        assert!(var < self.num_vars);
        let mut out = ConstraintSystem::new(self.num_vars);
        let mut pos: Vec<&Constraint> = Vec::new();
        let mut neg: Vec<&Constraint> = Vec::new();
        for c in &self.constraints {
            let a = &c.coeffs[var];
            if a.is_zero() {
                out.add_rational(c.coeffs.clone(), c.rhs.clone());
            } else if a.is_positive() {
                pos.push(c);
            } else {
                neg.push(c);
            }
        }
        for p in &pos {
            for n in &neg {
                // p scaled by 1/a_p plus n scaled by 1/(-a_n): the variable
                // cancels and both scalings are positive, so the direction
                // of the inequality is preserved.
                let ap = &p.coeffs[var];
                let an = &n.coeffs[var];
                let mut coeffs = Vec::with_capacity(self.num_vars);
                for i in 0..self.num_vars {
                    coeffs.push(&p.coeffs[i] / ap - &n.coeffs[i] / an);
                }
                let rhs = &p.rhs / ap - &n.rhs / an;
                out.add_rational(coeffs, rhs);
            }
        }
        out.dedup();
        out
    }

    /// True when some derived constant constraint `0 <= rhs` has negative
    /// rhs (the system is certainly empty). Complete only after all
    /// variables have been eliminated.
    fn has_constant_contradiction(&self) -> bool {
        self.constraints
            .iter()
            .any(|c| c.coeffs.iter().all(|v| v.is_zero()) && c.rhs.is_negative())
    }

    /// Exact maximum of `objective . x` over the system.
    ///
    /// Implemented by adjoining a fresh variable `t` with `t <= objective
    /// . x` and eliminating every original variable; the eliminated system
    /// is a set of bounds on `t` alone. Elimination order is chosen
    /// greedily to minimize the number of generated constraints (fewest
    /// upper-bound/lower-bound pairings first).
    pub fn max_linear(&self, objective: &[f64]) -> LpResult {
        let objective: Vec<BigRational> = objective
            .iter()
            .map(|&v| BigRational::from_float(v).expect("non-finite objective"))
            .collect();
        self.max_linear_rational(&objective)
    }

    /// As [`max_linear`](Self::max_linear) with exact rational objective.
    pub fn max_linear_rational(&self, objective: &[BigRational]) -> LpResult {
        assert_eq!(objective.len(), self.num_vars, "objective length mismatch");
        let t = self.num_vars;
        let mut sys = ConstraintSystem::new(self.num_vars + 1);
        for c in &self.constraints {
            let mut coeffs = c.coeffs.clone();
            coeffs.push(BigRational::zero());
            sys.add_rational(coeffs, c.rhs.clone());
        }
        // t - objective . x <= 0
        let mut coeffs: Vec<BigRational> = objective.iter().map(|v| -v).collect();
        coeffs.push(BigRational::one());
        sys.add_rational(coeffs, BigRational::zero());

        let mut remaining: Vec<usize> = (0..self.num_vars).collect();
        while let Some(pick_at) = {
            // Greedy heuristic: eliminate the variable whose removal
            // generates the fewest pairings.
            remaining
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    let (mut np, mut nn) = (0usize, 0usize);
                    for c in &sys.constraints {
                        if c.coeffs[v].is_positive() {
                            np += 1;
                        } else if c.coeffs[v].is_negative() {
                            nn += 1;
                        }
                    }
                    (np * nn, i)
                })
                .min()
                .map(|(_, i)| i)
        } {
            let var = remaining.swap_remove(pick_at);
            sys = sys.fm_eliminate(var);
            if sys.has_constant_contradiction() {
                return LpResult::Infeasible;
            }
        }

        // Only t remains. The adjoined constraint has +1 on t and every
        // derived constraint is a nonnegative combination, so no lower
        // bounds on t can appear: constraints are either constants (handled
        // above) or upper bounds a*t <= b with a > 0.
        let mut best: Option<BigRational> = None;
        for c in &sys.constraints {
            let a = &c.coeffs[t];
            if a.is_zero() {
                continue;
            }
            debug_assert!(a.is_positive(), "unexpected lower bound on objective");
            let bound = &c.rhs / a;
            best = Some(match best {
                Some(b) if b <= bound => b,
                _ => bound,
            });
        }
        match best {
            Some(v) => LpResult::Bounded(v),
            None => LpResult::Unbounded,
        }
    }
}

/// Solve the square rational system `a x = b`; `None` when singular.
fn solve_square(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = b.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot_row);
        let pivot = m[col][col].clone();
        for c in col..=n {
            m[col][c] = &m[col][c] / &pivot;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in col..=n {
                m[r][c] = &m[r][c] - &f * &m[col][c];
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

fn for_each_combination(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, acc: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if acc.len() == k {
            f(acc);
            return;
        }
        let need = k - acc.len();
        for i in start..=n.saturating_sub(need) {
            acc.push(i);
            rec(i + 1, n, k, acc, f);
            acc.pop();
        }
    }
    if k <= n {
        rec(0, n, k, &mut Vec::new(), f);
    }
}

fn satisfies(sys: &ConstraintSystem, x: &[BigRational]) -> bool {
    sys.constraints.iter().all(|c| {
        let lhs: BigRational = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        lhs <= c.rhs
    })
}

/// Reference maximizer by exhaustive vertex enumeration, independent of the
/// elimination code path; intended as a test oracle.
///
/// Requires a *pointed* feasible region: the system must include explicit
/// nonnegativity (or other vertex-forcing) constraints on every variable,
/// so that a nonempty region has at least one vertex. Exponential in the
/// constraint count; use only on small systems.
pub fn vertex_enumeration_max(sys: &ConstraintSystem, objective: &[f64]) -> LpResult {
    let objective: Vec<BigRational> = objective
        .iter()
        .map(|&v| BigRational::from_float(v).expect("non-finite objective"))
        .collect();
    let n = sys.num_vars();
    let m = sys.constraints.len();

    // Vertices: every feasible point where n linearly independent
    // constraints hold with equality.
    let mut best: Option<BigRational> = None;
    if n == 0 {
        best = (!sys.has_constant_contradiction()).then(BigRational::zero);
    }
    for_each_combination(m, n, &mut |subset| {
        let a: Vec<Vec<BigRational>> = subset
            .iter()
            .map(|&i| sys.constraints[i].coeffs.clone())
            .collect();
        let b: Vec<BigRational> = subset.iter().map(|&i| sys.constraints[i].rhs.clone()).collect();
        if let Some(x) = solve_square(&a, &b) {
            if satisfies(sys, &x) {
                let val: BigRational = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
                best = Some(match best.take() {
                    Some(b) if b >= val => b,
                    _ => val,
                });
            }
        }
    });
    let Some(best) = best else {
        return LpResult::Infeasible;
    };

    // Unboundedness: a recession direction d with coeffs . d <= 0 for every
    // constraint and objective . d > 0. Normalizing by sum(d) = 1 (valid
    // because nonnegativity constraints force d >= 0) gives a bounded
    // polytope whose vertices witness the maximal objective direction.
    let mut cone = ConstraintSystem::new(n);
    for c in &sys.constraints {
        cone.add_rational(c.coeffs.clone(), BigRational::zero());
    }
    let ones = vec![BigRational::one(); n];
    cone.add_rational(ones.clone(), BigRational::one());
    cone.add_rational(ones.iter().map(|v| -v).collect(), -BigRational::one());
    let mc = cone.constraints.len();
    let mut unbounded = false;
    for_each_combination(mc, n, &mut |subset| {
        if unbounded {
            return;
        }
        let a: Vec<Vec<BigRational>> = subset
            .iter()
            .map(|&i| cone.constraints[i].coeffs.clone())
            .collect();
        let b: Vec<BigRational> = subset.iter().map(|&i| cone.constraints[i].rhs.clone()).collect();
        if let Some(d) = solve_square(&a, &b) {
            if satisfies(&cone, &d) {
                let val: BigRational = objective.iter().zip(&d).map(|(c, v)| c * v).sum();
                if val.is_positive() {
                    unbounded = true;
                }
            }
        }
    });
    if unbounded {
        LpResult::Unbounded
    } else {
        LpResult::Bounded(best)
    }
}
