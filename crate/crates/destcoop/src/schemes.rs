//! Achievable-rate evaluation: block-Markov nulling closed forms (regime with
//! a weak cooperation link), compress-and-forward constraint generation
//! (strong cooperation link), the non-cooperative Han–Kobayashi fallback,
//! and the composition logic producing the final achievable sum-rate.
//!
//! Regime taxonomy on the level parameters (LD levels or `[log2 g^2]_+`):
//!
//! * regime (i): `nC <= min` of all four source-destination levels — the
//!   uncoded/superposition nulling scheme with anti-causal filtering;
//! * regime (ii): `min < nC <= min(n13, n24)` — achieved by running the
//!   regime-(i) scheme at the reduced cooperation level (the bound is flat
//!   there);
//! * regime (iii): `nC > min(n13, n24)` — compress-and-forward with
//!   quantize-bin-forward exchange, evaluated through the generic
//!   achievability region and Fourier–Motzkin elimination.

use crate::bounds::ld_bounds_int;
use crate::channel::{derive_levels, GaussChannel, LdChannel, LevelProfile};
use crate::gf_linalg::{shift_matrix, GfMatrix};
use crate::info_calc::{GaussRvSystem, InfoError, LinearRvSystem};
use crate::polytope::{ConstraintSystem, LpResult};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

/// Errors from achievability evaluation.
#[derive(Debug, Error, PartialEq)]
pub enum SchemeError {
    #[error("not regime (i): cooperation level exceeds the weakest link")]
    NotRegimeI,
    #[error("not regime (iii): cooperation level does not exceed min(n13, n24)")]
    NotRegimeIii,
    #[error(transparent)]
    Info(#[from] InfoError),
}

/// Case selection inside regime (i).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseTag {
    /// Both destinations relay; full nulling on both cross paths.
    A,
    /// Only destination 3 relays (source 2 runs plain superposition).
    B,
    /// Mirror image of `B`: only destination 4 relays.
    BSym,
    /// Cooperation does not help; non-cooperative operation.
    NoCoop,
}

/// Per-stream rate ceilings for one source: cooperative public (`U`),
/// cooperative private (`S`), immediately-decoded private (`Z↑`), and
/// lag-decoded private (`Z↓`).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct StreamRates {
    pub r_u: f64,
    pub r_s: f64,
    pub r_z_up: f64,
    pub r_z_dn: f64,
}

impl StreamRates {
    pub fn total(&self) -> f64 {
        self.r_u + self.r_s + self.r_z_up + self.r_z_dn
    }
}

/// A regime-(i) rate allocation: the per-stream ceilings actually used by
/// the coding scheme, the selected case, and the sum-rate credited to the
/// allocation.
///
/// For LD channels all entries are exact integers. The `sum` is the
/// closed-form achievable sum-rate (the value matched against the upper
/// bound); the per-stream ceilings are what the simulator instantiates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Regime1RateAllocation {
    pub case_tag: CaseTag,
    pub user1: StreamRates,
    pub user2: StreamRates,
    pub sum: f64,
}

#[inline]
fn pos(x: i64) -> i64 {
    x.max(0)
}

#[inline]
fn posf(x: f64) -> f64 {
    x.max(0.0)
}

/// Case selection for regime (i) at the channel's own cooperation level.
pub fn ld_case(ch: &LdChannel) -> CaseTag {
    let (n13, n23, n14, n24, nc) = (
        ch.n13 as i64,
        ch.n23 as i64,
        ch.n14 as i64,
        ch.n24 as i64,
        ch.n_c as i64,
    );
    let cross = n14 + n23;
    if cross >= n13 + nc && cross >= n24 + nc {
        CaseTag::NoCoop
    } else if cross < n13 + nc && cross < n24 + nc {
        CaseTag::A
    } else if cross < n13 + nc {
        CaseTag::B
    } else {
        CaseTag::BSym
    }
}

fn ld_mirror(ch: &LdChannel) -> LdChannel {
    LdChannel {
        n13: ch.n24,
        n23: ch.n14,
        n14: ch.n23,
        n24: ch.n13,
        ..*ch
    }
}

/// Stream ceilings for the user-1 side of case (a); user 2 is the mirror.
fn case_a_caps(ch: &LdChannel) -> StreamRates {
    let (n13, n23, n14, nc) = (ch.n13 as i64, ch.n23 as i64, ch.n14 as i64, ch.n_c as i64);
    StreamRates {
        r_u: pos(n14 - nc).min(nc) as f64,
        r_s: pos(nc - pos(n23 - (n13 - n14))) as f64,
        r_z_up: pos(n13 - n14 - n23) as f64,
        r_z_dn: pos(n23 - nc) as f64,
    }
}

/// Closed-form achievable sum for case (a): the minimum of the three terms
/// obtained after exploiting monotonicity in the cooperation level. Under
/// the case-(a) conditions this equals the upper bound.
fn case_a_sum(ch: &LdChannel) -> i64 {
    let (n13, n23, n14, n24, nc) = (
        ch.n13 as i64,
        ch.n23 as i64,
        ch.n14 as i64,
        ch.n24 as i64,
        ch.n_c as i64,
    );
    (2 * nc + n13 + n24 - n14 - n23)
        .min(n13 + n24 - n14)
        .min(n13 + n24 - n23)
}

/// Closed-form achievable sum for case (b) (destination 4 silent).
fn case_b_sum(ch: &LdChannel) -> i64 {
    let (n13, n23, n14, n24, nc) = (
        ch.n13 as i64,
        ch.n23 as i64,
        ch.n14 as i64,
        ch.n24 as i64,
        ch.n_c as i64,
    );
    (n13 + pos(n24 - n23))
        .min(n13 - n14 + n14.max(n24))
        .min(n13 + nc)
}

/// Stream ceilings for case (b). User 1 runs the full nulling stack; user 2
/// sends only `U2` and `Z↓2`, jointly constrained at destination 4.
fn case_b_caps(ch: &LdChannel) -> (StreamRates, StreamRates) {
    let (n13, n23, n14, n24, nc) = (
        ch.n13 as i64,
        ch.n23 as i64,
        ch.n14 as i64,
        ch.n24 as i64,
        ch.n_c as i64,
    );
    let r_u1 = pos(n14 - nc).min(pos(n14 - pos(n24 - n23)));
    let cap_u2 = nc.min(n23).min(n24);
    let joint = n24.max(n14) - pos(n24 - n23);
    // Maximize the joint cooperative-public throughput under the
    // destination-4 multiple-access constraint.
    let r_u2 = cap_u2.min(pos(joint - r_u1));
    let user1 = StreamRates {
        r_u: r_u1 as f64,
        r_s: pos(nc - pos(n23 - (n13 - n14))) as f64,
        r_z_up: pos(n13 - n14 - n23) as f64,
        r_z_dn: pos(n23 - nc) as f64,
    };
    let user2 = StreamRates {
        r_u: r_u2 as f64,
        r_s: 0.0,
        r_z_up: 0.0,
        r_z_dn: pos(n24 - n23) as f64,
    };
    (user1, user2)
}

fn mirror_alloc(a: Regime1RateAllocation) -> Regime1RateAllocation {
    Regime1RateAllocation {
        case_tag: match a.case_tag {
            CaseTag::B => CaseTag::BSym,
            CaseTag::BSym => CaseTag::B,
            other => other,
        },
        user1: a.user2,
        user2: a.user1,
        sum: a.sum,
    }
}

/// Non-cooperative LD sum-capacity: the bound minimum at zero cooperation
/// (its achievability without a cooperation link is classical).
pub fn ld_nocoop_sum(ch: &LdChannel) -> i64 {
    *ld_bounds_int(&ch.with_nc(0)).iter().min().unwrap()
}

/// Regime-(i) rate allocation and achievable sum for an LD channel.
///
/// Selects case (a) / (b) / mirrored-(b) / no-cooperation from the level
/// arithmetic, fills the per-stream ceilings (clamped at zero), and credits
/// the closed-form achievable sum for the selected case.
pub fn regime1_ld_rates(ch: &LdChannel) -> Result<Regime1RateAllocation, SchemeError> {
    if ch.n_c > ch.n_min() {
        return Err(SchemeError::NotRegimeI);
    }
    Ok(match ld_case(ch) {
        CaseTag::NoCoop => Regime1RateAllocation {
            case_tag: CaseTag::NoCoop,
            user1: StreamRates::default(),
            user2: StreamRates::default(),
            sum: ld_nocoop_sum(ch) as f64,
        },
        CaseTag::A => {
            let m = ld_mirror(ch);
            Regime1RateAllocation {
                case_tag: CaseTag::A,
                user1: case_a_caps(ch),
                user2: case_a_caps(&m),
                sum: case_a_sum(ch) as f64,
            }
        }
        CaseTag::B => {
            let (user1, user2) = case_b_caps(ch);
            Regime1RateAllocation {
                case_tag: CaseTag::B,
                user1,
                user2,
                sum: case_b_sum(ch) as f64,
            }
        }
        CaseTag::BSym => {
            let m = ld_mirror(ch);
            let (user1, user2) = case_b_caps(&m);
            mirror_alloc(Regime1RateAllocation {
                case_tag: CaseTag::B,
                user1,
                user2,
                sum: case_b_sum(&m) as f64,
            })
        }
    })
}

// ---------------------------------------------------------------------------
// Generic compress-and-forward region (both destinations relay quantized
// observations): constraint generation from any mutual-information oracle.
// ---------------------------------------------------------------------------

/// Rate-vector layout for the generic region:
/// `[r_U1, r_X1, r_U2, r_X2, r_3, r_4]`.
pub const T3_VARS: usize = 6;

/// Objective selecting the end-to-end sum-rate `r_U1+r_X1+r_U2+r_X2`.
pub const T3_SUM_OBJECTIVE: [f64; 6] = [1.0, 1.0, 1.0, 1.0, 0.0, 0.0];

struct T3Row {
    lhs: [i64; 6],
    a: &'static [&'static str],
    b: &'static [&'static str],
    c: &'static [&'static str],
    /// Subtract `I(Y4; V4 | X3, X4, U1, U2, Y3)` from the right-hand side
    /// (the bin-index budget of the relay's quantized codeword).
    slack: bool,
}

/// The fourteen destination-3 inequalities of the generic region; the
/// destination-4 set is produced by mirroring. Rows with `r_4` appearing on
/// both sides are stored with the cancellation already performed.
const T3_DEST3: [T3Row; 14] = [
    T3Row { lhs: [0, 1, 0, 0, 0, 0], a: &["X1"], b: &["Y3"], c: &["X4", "U1", "U2"], slack: false },
    T3Row { lhs: [0, 0, 1, 0, 0, 0], a: &["U2"], b: &["Y3", "V4"], c: &["X3", "X4", "U1"], slack: false },
    T3Row { lhs: [0, 0, 1, 0, 0, -1], a: &["U2"], b: &["Y3"], c: &["X3", "X4", "U1"], slack: true },
    T3Row { lhs: [1, 0, 0, 0, 0, 0], a: &["U1"], b: &["Y3", "V4"], c: &["X3", "X4", "U2"], slack: false },
    T3Row { lhs: [1, 0, 0, 0, 0, -1], a: &["U1"], b: &["Y3"], c: &["X3", "X4", "U2"], slack: true },
    T3Row { lhs: [0, 0, 0, 0, 0, 1], a: &["X4"], b: &["Y3"], c: &["U1", "U2"], slack: false },
    T3Row { lhs: [1, 0, 1, 0, 0, 0], a: &["U2", "U1"], b: &["Y3", "V4"], c: &["X3", "X4"], slack: false },
    T3Row { lhs: [1, 0, 1, 0, 0, -1], a: &["U2", "U1"], b: &["Y3"], c: &["X3", "X4"], slack: true },
    T3Row { lhs: [1, 0, 0, 0, 0, 1], a: &["X4", "U1"], b: &["Y3", "V4"], c: &["X3", "U2"], slack: false },
    T3Row { lhs: [1, 0, 0, 0, 0, 0], a: &["X4", "U1"], b: &["Y3"], c: &["X3", "U2"], slack: true },
    T3Row { lhs: [0, 0, 1, 0, 0, 1], a: &["U2", "X4"], b: &["Y3", "V4"], c: &["X3", "U1"], slack: false },
    T3Row { lhs: [0, 0, 1, 0, 0, 0], a: &["U2", "X4"], b: &["Y3"], c: &["X3", "U1"], slack: true },
    T3Row { lhs: [1, 0, 1, 0, 0, 1], a: &["U2", "X4", "U1"], b: &["Y3", "V4"], c: &["X3"], slack: false },
    T3Row { lhs: [1, 0, 1, 0, 0, 0], a: &["U2", "X4", "U1"], b: &["Y3"], c: &["X3"], slack: true },
];

fn mirror_name(n: &str) -> &'static str {
    match n {
        "U1" => "U2",
        "U2" => "U1",
        "X1" => "X2",
        "X2" => "X1",
        "X3" => "X4",
        "X4" => "X3",
        "Y3" => "Y4",
        "Y4" => "Y3",
        "V3" => "V4",
        "V4" => "V3",
        other => panic!("unknown variable {other}"),
    }
}

fn mirror_lhs(lhs: &[i64; 6]) -> [i64; 6] {
    [lhs[2], lhs[3], lhs[0], lhs[1], lhs[5], lhs[4]]
}

/// Build the full generic-region constraint system from a conditional
/// mutual-information oracle `eval(a, b, c) = I(a; b | c)` in bits.
pub fn theorem3_constraints<E>(mut eval: E) -> Result<ConstraintSystem, InfoError>
where
    E: FnMut(&[&str], &[&str], &[&str]) -> Result<f64, InfoError>,
{
    let iy4v4 = eval(&["Y4"], &["V4"], &["X3", "X4", "U1", "U2", "Y3"])?;
    let iy3v3 = eval(&["Y3"], &["V3"], &["X4", "X3", "U2", "U1", "Y4"])?;
    let mut sys = ConstraintSystem::new(T3_VARS);
    for row in &T3_DEST3 {
        // Destination-3 form.
        let rhs = eval(row.a, row.b, row.c)? - if row.slack { iy4v4 } else { 0.0 };
        let coeffs: Vec<f64> = row.lhs.iter().map(|&v| v as f64).collect();
        sys.add(&coeffs, rhs);
        // Mirrored destination-4 form.
        let a: Vec<&str> = row.a.iter().map(|n| mirror_name(n)).collect();
        let b: Vec<&str> = row.b.iter().map(|n| mirror_name(n)).collect();
        let c: Vec<&str> = row.c.iter().map(|n| mirror_name(n)).collect();
        let rhs = eval(&a, &b, &c)? - if row.slack { iy3v3 } else { 0.0 };
        let coeffs: Vec<f64> = mirror_lhs(&row.lhs).iter().map(|&v| v as f64).collect();
        sys.add(&coeffs, rhs);
    }
    sys.add_all_nonneg();
    Ok(sys)
}

/// The LD instantiation of the generic region: `U1, U2, X3, X4` uniform on
/// the full vector space, private parts `Z1`/`Z2` uniform on the levels
/// arriving below the cross links, and deterministic truncation test
/// channels for the quantizers.
pub fn ld_regime3_system(ch: &LdChannel) -> LinearRvSystem {
    let n = ch.n() as usize;
    let p = ch.p;
    let names = ["U1", "U2", "X3", "X4", "Z1", "Z2"];
    let mut sys = LinearRvSystem::new(
        names.iter().map(|s| (s.to_string(), n)).collect(),
        p,
    );
    let cols = sys.seed_len();
    let block = |sys: &LinearRvSystem, name: &str, zero_top: usize| -> GfMatrix {
        let off = sys.seed_offset(name).unwrap();
        let mut m = GfMatrix::zero(n, cols, p);
        for r in zero_top..n {
            m.set(r, off + r, 1);
        }
        m
    };
    let u1 = block(&sys, "U1", 0);
    let u2 = block(&sys, "U2", 0);
    let x3 = block(&sys, "X3", 0);
    let x4 = block(&sys, "X4", 0);
    let z1 = block(&sys, "Z1", (ch.n14 as usize).min(n));
    let z2 = block(&sys, "Z2", (ch.n23 as usize).min(n));
    let x1 = u1.add(&z1);
    let x2 = u2.add(&z2);
    let g = |lvl: u32| shift_matrix(n.max(1), n as i64 - lvl as i64, p);
    let y3 = g(ch.n13)
        .mul(&x1)
        .add(&g(ch.n23).mul(&x2))
        .add(&g(ch.n_c).mul(&x4));
    let y4 = g(ch.n14)
        .mul(&x1)
        .add(&g(ch.n24).mul(&x2))
        .add(&g(ch.n_c).mul(&x3));
    let v3 = shift_matrix(n.max(1), pos(ch.n13 as i64 - ch.n14 as i64), p).mul(&y3);
    let v4 = shift_matrix(n.max(1), pos(ch.n24 as i64 - ch.n23 as i64), p).mul(&y4);
    sys.define("U1", u1);
    sys.define("U2", u2);
    sys.define("X1", x1);
    sys.define("X2", x2);
    sys.define("X3", x3);
    sys.define("X4", x4);
    sys.define("Y3", y3);
    sys.define("Y4", y4);
    sys.define("V3", v3);
    sys.define("V4", v4);
    sys
}

/// Generic-region constraint system for the LD instantiation.
pub fn theorem3_constraints_ld(ch: &LdChannel) -> Result<ConstraintSystem, InfoError> {
    let sys = ld_regime3_system(ch);
    theorem3_constraints(|a, b, c| sys.mutual_info(a, b, c))
}

/// Result of the strong-cooperation evaluation for LD channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Regime3LdSum {
    /// Maximum sum-rate of the generic region (Fourier–Motzkin, exact).
    pub fm_sum: f64,
    /// Closed-form cross-check: `min(u2, u3, u4, u5)`.
    pub closed_form: i64,
}

/// Achievable sum for an LD channel whose cooperation level exceeds
/// `min(n13, n24)`: the generic region maximized exactly, with the
/// closed-form minimum returned alongside for cross-checking.
pub fn regime3_ld_sum(ch: &LdChannel) -> Result<Regime3LdSum, SchemeError> {
    if ch.n_c <= ch.n13.min(ch.n24) {
        return Err(SchemeError::NotRegimeIii);
    }
    let [_, u2, u3, u4, u5] = ld_bounds_int(ch);
    let closed_form = u2.min(u3).min(u4).min(u5);
    let sys = theorem3_constraints_ld(ch)?;
    let fm_sum = match sys.max_linear(&T3_SUM_OBJECTIVE) {
        LpResult::Bounded(v) => v.to_f64().unwrap_or(0.0),
        LpResult::Unbounded => f64::INFINITY,
        LpResult::Infeasible => 0.0,
    };
    Ok(Regime3LdSum { fm_sum, closed_form })
}

/// Overall LD achievable sum: best of the weak-cooperation scheme swept over
/// all reduced cooperation levels (monotonicity makes every reduced level
/// admissible) and the strong-cooperation scheme when it applies.
pub fn ld_achievable_sum(ch: &LdChannel) -> i64 {
    let mut best = 0i64;
    for nc in 0..=ch.n_c.min(ch.n_min()) {
        let alloc = regime1_ld_rates(&ch.with_nc(nc)).expect("regime (i) by construction");
        best = best.max(alloc.sum as i64);
    }
    if ch.n_c > ch.n13.min(ch.n24) {
        if let Ok(r3) = regime3_ld_sum(ch) {
            // The generic region is exact here; keep the closed form as a
            // debug-mode consistency assertion rather than a second source
            // of truth.
            debug_assert!(
                (r3.fm_sum - r3.closed_form as f64).abs() < 1e-9,
                "strong-cooperation region mismatch on {ch:?}: fm={} closed={}",
                r3.fm_sum,
                r3.closed_form
            );
            best = best.max(r3.fm_sum.round() as i64);
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Gaussian achievability.
// ---------------------------------------------------------------------------

/// Quantizer scale for destination 3: the amplitude at which source 1's
/// private signal is received there, relative to its level at destination 4.
pub fn alpha1(ch: &GaussChannel) -> f64 {
    (1f64.max(1f64.max(ch.g13 * ch.g13) / 1f64.max(ch.g14 * ch.g14))).sqrt()
}

/// Quantizer scale for destination 4 (mirror of [`alpha1`]).
pub fn alpha2(ch: &GaussChannel) -> f64 {
    (1f64.max(1f64.max(ch.g24 * ch.g24) / 1f64.max(ch.g23 * ch.g23))).sqrt()
}

/// The Gaussian instantiation of the generic region: unit-power sources
/// split evenly between public and private parts, private variances placed
/// at the noise level of the cross link, and additive Gaussian quantizers
/// with variances `alpha^2`.
pub fn gauss_regime3_system(ch: &GaussChannel) -> GaussRvSystem {
    // Public/private split: each source spends half its unit power on the
    // public part and at most half on the private part.
    let su = 0.5f64;
    let sz1 = 0.5 / 1f64.max(ch.g14 * ch.g14);
    let sz2 = 0.5 / 1f64.max(ch.g23 * ch.g23);
    let a1 = alpha1(ch);
    let a2 = alpha2(ch);
    let mut sys = GaussRvSystem::new(vec![
        ("U1".into(), su),
        ("U2".into(), su),
        ("Z1".into(), sz1),
        ("Z2".into(), sz2),
        ("X3".into(), 1.0),
        ("X4".into(), 1.0),
        ("N3".into(), 1.0),
        ("N4".into(), 1.0),
        ("Q3".into(), a1 * a1),
        ("Q4".into(), a2 * a2),
    ]);
    let re = |x: f64| Complex64::new(x, 0.0);
    let one = Complex64::new(1.0, 0.0);
    sys.define("U1", &[("U1", one)]);
    sys.define("U2", &[("U2", one)]);
    sys.define("X3", &[("X3", one)]);
    sys.define("X4", &[("X4", one)]);
    sys.define("X1", &[("U1", one), ("Z1", one)]);
    sys.define("X2", &[("U2", one), ("Z2", one)]);
    // The single residual phase is carried on the 1->4 cross gain.
    let g14 = Complex64::from_polar(ch.g14, ch.theta);
    sys.define(
        "Y3",
        &[
            ("U1", re(ch.g13)),
            ("Z1", re(ch.g13)),
            ("U2", re(ch.g23)),
            ("Z2", re(ch.g23)),
            ("X4", re(ch.g_c)),
            ("N3", one),
        ],
    );
    sys.define(
        "Y4",
        &[
            ("U1", g14),
            ("Z1", g14),
            ("U2", re(ch.g24)),
            ("Z2", re(ch.g24)),
            ("X3", re(ch.g_c)),
            ("N4", one),
        ],
    );
    sys.define_from("V3", "Y3", &[("Q3", one)]);
    sys.define_from("V4", "Y4", &[("Q4", one)]);
    sys
}

/// Generic-region constraint system for the Gaussian instantiation with
/// exact log-determinant mutual informations.
pub fn theorem3_constraints_gauss(ch: &GaussChannel) -> Result<ConstraintSystem, InfoError> {
    let sys = gauss_regime3_system(ch);
    theorem3_constraints(|a, b, c| sys.cond_mutual_info(a, b, c))
}

/// The surrogate closed-form constraint list for the Gaussian
/// strong-cooperation regime (level arithmetic with fixed bit slacks), as a
/// constraint system over the same rate-vector layout.
pub fn gauss_regime3_closed_system(ch: &GaussChannel) -> ConstraintSystem {
    let lv = derive_levels(ch);
    let a1 = alpha1(ch);
    let a2 = alpha2(ch);
    let log36 = 36f64.log2();

    // Joint public MI surrogates (pair and triple), forward orientation.
    let pair_cap = |g_own: f64, g_other_own: f64, g_cross_in: f64, g_cross_out: f64| -> f64 {
        // 1 + |g13/a1|^2 + |g24/a2|^2 + |g14/a2|^2 + |g23/a1|^2
        //   + |g13 g24 / (a1 a2)|^2 + |g14 g23 / (a1 a2)|^2
        //   - 2 |g13 g24 g14 g23| / (a1 a2)^2 cos(theta)
        let t13 = (g_own / a1).powi(2);
        let t24 = (g_other_own / a2).powi(2);
        let t14 = (g_cross_out / a2).powi(2);
        let t23 = (g_cross_in / a1).powi(2);
        let direct = (g_own * g_other_own / (a1 * a2)).powi(2);
        let cross = (g_cross_out * g_cross_in / (a1 * a2)).powi(2);
        let prod = (g_own * g_other_own * g_cross_out * g_cross_in).abs() / (a1 * a1 * a2 * a2);
        (1.0 + t13 + t24 + t14 + t23 + direct + cross - 2.0 * prod * ch.theta.cos()).log2()
    };
    let pair = pair_cap(ch.g13, ch.g24, ch.g23, ch.g14);
    let triple_extra_3 = (ch.g_c / a1).powi(2)
        + (ch.g_c * ch.g14 / (a1 * a2)).powi(2)
        + (ch.g_c * ch.g24 / (a1 * a2)).powi(2);
    let triple_extra_4 = (ch.g_c / a2).powi(2)
        + (ch.g_c * ch.g23 / (a1 * a2)).powi(2)
        + (ch.g_c * ch.g13 / (a1 * a2)).powi(2);
    let triple_base = 2f64.powf(pair) - 1.0;
    let triple_3 = (1.0 + triple_base + triple_extra_3).log2();
    let triple_4 = (1.0 + triple_base + triple_extra_4).log2();

    let mut sys = ConstraintSystem::new(T3_VARS);
    // Level shorthand for the destination-3 orientation and its mirror.
    struct L {
        n13: f64,
        n23: f64,
        n14: f64,
        n24: f64,
        nc: f64,
    }
    let fwd = L { n13: lv.n13, n23: lv.n23, n14: lv.n14, n24: lv.n24, nc: lv.n_c };
    let mir = L { n13: lv.n24, n23: lv.n14, n14: lv.n23, n24: lv.n13, nc: lv.n_c };
    // Variable layout [r_U1, r_X1, r_U2, r_X2, r_3, r_4]; `sel` maps the
    // orientation-local indices onto it.
    for (l, sel, triple) in [
        (&fwd, [0usize, 1, 2, 3, 4, 5], triple_3),
        (&mir, [2usize, 3, 0, 1, 5, 4], triple_4),
    ] {
        let d1 = posf(l.n13 - l.n14); // [n13 - n14]_+
        let d2 = posf(l.n24 - l.n23); // [n24 - n23]_+
        let mut add = |local: [f64; 6], rhs: f64| {
            let mut coeffs = [0.0; 6];
            for (i, &v) in local.iter().enumerate() {
                coeffs[sel[i]] += v;
            }
            sys.add(&coeffs, rhs);
        };
        // Local layout: [rU1, rX1, rU2, rX2, r3, r4].
        add([0.0, 1.0, 0.0, 0.0, 0.0, 0.0], d1 - 2.0);
        add(
            [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            (l.n13 - d1).max(l.n14 - d2) - log36,
        );
        add([1.0, 0.0, 0.0, 0.0, 0.0, -1.0], l.n13 - d1 - 3.0);
        add(
            [0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
            (l.n23 - d1).max(l.n24 - d2) - log36,
        );
        add([0.0, 0.0, 1.0, 0.0, 0.0, -1.0], posf(l.n23 - d1) - 3.0);
        add([0.0, 0.0, 0.0, 0.0, 0.0, 1.0], posf(l.nc - d1) - 1.0);
        add([1.0, 0.0, 1.0, 0.0, 0.0, 0.0], pair - log36);
        add(
            [1.0, 0.0, 1.0, 0.0, 0.0, -1.0],
            l.n13.max(l.n23) - d1 - 3.0,
        );
        add(
            [1.0, 0.0, 0.0, 0.0, 0.0, 1.0],
            (l.n13.max(l.nc) - d1).max(posf(l.n14 - d2) + posf(l.nc - d1)) - log36,
        );
        add([1.0, 0.0, 0.0, 0.0, 0.0, 0.0], l.n13 - d1 - 3.0);
        add(
            [0.0, 0.0, 1.0, 0.0, 0.0, 1.0],
            (l.n23.max(l.nc) - d1).max((l.n24 - d2) + posf(l.nc - d1)) - log36,
        );
        add([0.0, 0.0, 1.0, 0.0, 0.0, 0.0], posf(l.n23 - d1) - 3.0);
        add([1.0, 0.0, 1.0, 0.0, 0.0, 1.0], triple - log36);
        add(
            [1.0, 0.0, 1.0, 0.0, 0.0, 0.0],
            l.n13.max(l.n23).max(l.nc) - d1 - 3.0,
        );
    }
    sys.add_all_nonneg();
    sys
}

/// Result of the Gaussian strong-cooperation evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Regime3GaussSum {
    /// Exact-MI path: generic region with log-det mutual informations.
    pub exact_mi: f64,
    /// Printed closed-form path (level arithmetic with bit slacks).
    pub closed_form: f64,
    /// Final credited sum: the better of the two paths.
    pub sum: f64,
}

fn lp_sum(sys: &ConstraintSystem) -> f64 {
    match sys.max_linear(&T3_SUM_OBJECTIVE) {
        LpResult::Bounded(v) => v.to_f64().unwrap_or(0.0).max(0.0),
        LpResult::Unbounded => f64::INFINITY,
        // An empty region contributes nothing (never clamp constraint
        // right-hand sides upward to force feasibility).
        LpResult::Infeasible => 0.0,
    }
}

/// Achievable Gaussian sum in the strong-cooperation regime
/// (`nC > min(n13, n24)` on derived levels).
pub fn regime3_gauss_sum(ch: &GaussChannel) -> Result<Regime3GaussSum, SchemeError> {
    let lv = derive_levels(ch);
    if lv.n_c <= lv.n13.min(lv.n24) {
        return Err(SchemeError::NotRegimeIii);
    }
    let exact_mi = lp_sum(&theorem3_constraints_gauss(ch)?);
    let closed_form = lp_sum(&gauss_regime3_closed_system(ch));
    Ok(Regime3GaussSum {
        exact_mi,
        closed_form,
        sum: exact_mi.max(closed_form),
    })
}

// ---------------------------------------------------------------------------
// Gaussian weak-cooperation regime.
// ---------------------------------------------------------------------------

/// One evaluated rate constraint of the weak-cooperation Gaussian scheme:
/// the exact log-SINR form actually credited, and the level-arithmetic
/// integer surrogate it dominates (used only for consistency checks).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePair {
    pub log_form: f64,
    pub int_form: f64,
}

/// Outcome of the weak-cooperation Gaussian evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussRegime1Result {
    pub alloc: Regime1RateAllocation,
    pub sum: f64,
    /// Reduced cooperation gain actually used by the best grid point
    /// (0 when the non-cooperative fallback was selected).
    pub g_c_used: f64,
    /// True when the non-cooperative Han–Kobayashi fallback was credited.
    pub fallback: bool,
    /// Matched (log-form, integer-form) constraint values at the selected
    /// grid point.
    pub pairs: Vec<RatePair>,
}

const K9: f64 = 9.0;

/// Case-(a) log-SINR ceilings for the user-1 side at reduced cooperation
/// power `d = g_c^2`; user 2 is evaluated by mirroring the gains.
fn case_a_gauss_user(g13: f64, g23: f64, g14: f64, d: f64) -> (StreamRates, [f64; 5]) {
    let (p13, p23, p14) = (g13 * g13, g23 * g23, g14 * g14);
    let k = K9;
    let snr = |num: f64, den: f64| (1.0 + num / den).log2().max(0.0);
    let r_u_phase1 = snr(
        p13 / k,
        2.0 * p13 * d / (k * p14) + p13 / (k * p14) + 2.0 * p23 / (k * d) + 2.0 * p23 / k
            + 2.0 / k
            + 2.0,
    );
    let r_u_phase2 = snr(p14 / k, p14 / (k * d) + 2.0 / k + 2.0 / k + 2.0);
    let r_s = snr(
        p13 * d / (k * p14),
        2.0 * p23 / k + p13 / (k * p14) + 2.0 * p23 / (k * d) + 2.0 * p23 / k + 2.0 / k + 2.0,
    );
    let r_z_up = snr(
        p13 / (k * p14),
        2.0 * p23 / k + 2.0 * p23 / (k * d) + 2.0 * p23 / k + 2.0 / k + 2.0,
    );
    let r_z_dn = snr(p23 / (k * d), 2.0 / k + 2.0);
    (
        StreamRates {
            r_u: r_u_phase1.min(r_u_phase2),
            r_s,
            r_z_up,
            r_z_dn,
        },
        [r_u_phase1, r_u_phase2, r_s, r_z_up, r_z_dn],
    )
}

/// Integer-form surrogates for one user of case (a) at level parameters.
fn case_a_int_forms(n13: f64, n23: f64, n14: f64, nc: f64) -> [f64; 5] {
    [
        (n14 - nc) - 4.0,
        nc - 4.0,
        nc - posf(n23 - (n13 - n14)) - 4.0,
        posf(n13 - n14 - n23) - 4.0,
        posf(n23 - nc) - 5.0,
    ]
}

/// Case-(b) evaluation at reduced cooperation power `d`: returns the two
/// stream-rate sets, the joint public ceiling at destination 4, and the
/// matched surrogate list.
fn case_b_gauss(ch: &GaussChannel, d: f64) -> (StreamRates, StreamRates, f64, Vec<RatePair>) {
    let (p13, p23, p14, p24) = (
        ch.g13 * ch.g13,
        ch.g23 * ch.g23,
        ch.g14 * ch.g14,
        ch.g24 * ch.g24,
    );
    let k = K9;
    let snr = |num: f64, den: f64| (1.0 + num / den).log2().max(0.0);
    // Destination-3 constraints (two-phase decoding with residual forward).
    let den3 = p23 / (k * d) + p23 + 1.0;
    let r_u1_d3 = snr(
        p13 / k,
        2.0 * p13 * d / (k * p14) + p13 / (k * p14) + den3,
    );
    let r_s1 = snr(
        p13 * d / (k * p14),
        2.0 * p23 / k + p13 / (k * p14) + den3,
    );
    let r_z_up1 = snr(p13 / (k * p14), 2.0 * p23 / k + den3);
    let r_u2_d3 = snr(p23 / k, p23 / (k * d) + 2.0);
    let r_z_dn1 = snr(p23 / (k * d), 2.0);
    // Destination-4 constraints (single-phase joint public decoding).
    let den4 = p24 / (k * p23) + 1.0 / k + 3.0 / (2.0 * k) + 1.5;
    let r_u2_d4 = snr(p24 / k, den4);
    let r_u1_d4 = snr(p14 / k, den4);
    let joint = snr(p24 / k + p14 / k, den4);
    let r_z_dn2 = snr(p24 / (k * p23), 1.0 / k + 3.0 / (2.0 * k) + 1.5);

    let lv = derive_levels(&GaussChannel { g_c: d.sqrt(), ..*ch });
    let (n13, n23, n14, n24, nc) = (lv.n13, lv.n23, lv.n14, lv.n24, lv.n_c);
    let pairs = vec![
        RatePair { log_form: r_u1_d3, int_form: (n14 - nc) - 4.0 },
        RatePair { log_form: r_u2_d3, int_form: nc - 4.0 },
        RatePair { log_form: r_s1, int_form: nc - posf(n23 - (n13 - n14)) - 4.0 },
        RatePair { log_form: r_z_up1, int_form: posf(n13 - n14 - n23) - 4.0 },
        RatePair { log_form: r_z_dn1, int_form: posf(n23 - nc) - 5.0 },
        RatePair { log_form: r_u2_d4, int_form: n23.min(n24) - 5.0 },
        RatePair { log_form: r_u1_d4, int_form: (n14 - posf(n24 - n23)) - 5.0 },
        RatePair { log_form: joint, int_form: n24.max(n14) - posf(n24 - n23) - 5.0 },
        RatePair { log_form: r_z_dn2, int_form: posf(n24 - n23) - 4.0 },
    ];
    let user1 = StreamRates {
        r_u: r_u1_d3.min(r_u1_d4),
        r_s: r_s1,
        r_z_up: r_z_up1,
        r_z_dn: r_z_dn1,
    };
    let user2 = StreamRates {
        r_u: r_u2_d3.min(r_u2_d4),
        r_s: 0.0,
        r_z_up: 0.0,
        r_z_dn: r_z_dn2,
    };
    (user1, user2, joint, pairs)
}

fn gauss_mirror(ch: &GaussChannel) -> GaussChannel {
    GaussChannel {
        g13: ch.g24,
        g23: ch.g14,
        g14: ch.g23,
        g24: ch.g13,
        ..*ch
    }
}

/// Weak-cooperation Gaussian achievability. Implements the monotonicity
/// argument constructively: the cooperation gain is reduced to a grid of
/// candidates `g̃ ≤ min(gC, g14/2, g23/2, g13, g24)` (half-bit spacing on
/// the level scale), each grid point is evaluated under its own case
/// selection, and the best candidate wins. When no valid reduced gain
/// exists, or the cross structure leaves both nulling ratios large, the
/// non-cooperative Han–Kobayashi sum is credited instead.
pub fn regime1_gauss_rates(ch: &GaussChannel) -> GaussRegime1Result {
    let fallback = |sum: f64| GaussRegime1Result {
        alloc: Regime1RateAllocation {
            case_tag: CaseTag::NoCoop,
            user1: StreamRates::default(),
            user2: StreamRates::default(),
            sum,
        },
        sum,
        g_c_used: 0.0,
        fallback: true,
        pairs: Vec::new(),
    };
    let cap = ch
        .g_c
        .min(ch.g14 / 2.0)
        .min(ch.g23 / 2.0)
        .min(ch.g13)
        .min(ch.g24);
    let hk = hk_noncoop_sum(ch);
    if !(cap > 1.0) {
        return fallback(hk);
    }
    // Half-bit grid on the level scale nc = log2 g̃^2, endpoint included.
    let lmax = 2.0 * cap.log2();
    let mut levels: Vec<f64> = Vec::new();
    let mut l = 0.5f64;
    while l < lmax {
        levels.push(l);
        l += 0.5;
    }
    levels.push(lmax);

    let mut best: Option<GaussRegime1Result> = None;
    let mut saw_fallback_case = false;
    for nc in levels {
        let gt = 2f64.powf(nc / 2.0);
        let a1 = if ch.g13 > 0.0 {
            (ch.g14 * ch.g23 / (ch.g13 * gt)).abs()
        } else {
            f64::INFINITY
        };
        let a2 = if ch.g24 > 0.0 {
            (ch.g14 * ch.g23 / (ch.g24 * gt)).abs()
        } else {
            f64::INFINITY
        };
        let reduced = GaussChannel { g_c: gt, ..*ch };
        let candidate = if a1 < 0.5 && a2 < 0.5 {
            let (user1, logs1) = case_a_gauss_user(ch.g13, ch.g23, ch.g14, gt * gt);
            let (user2, logs2) = case_a_gauss_user(ch.g24, ch.g14, ch.g23, gt * gt);
            let lv = derive_levels(&reduced);
            let ints1 = case_a_int_forms(lv.n13, lv.n23, lv.n14, lv.n_c);
            let ints2 = case_a_int_forms(lv.n24, lv.n14, lv.n23, lv.n_c);
            let pairs = logs1
                .iter()
                .zip(ints1)
                .chain(logs2.iter().zip(ints2))
                .map(|(&log_form, int_form)| RatePair { log_form, int_form })
                .collect();
            let sum = user1.total() + user2.total();
            GaussRegime1Result {
                alloc: Regime1RateAllocation { case_tag: CaseTag::A, user1, user2, sum },
                sum,
                g_c_used: gt,
                fallback: false,
                pairs,
            }
        } else if a1 < 0.5 {
            let (user1, user2, joint, pairs) = case_b_gauss(&reduced, gt * gt);
            let u_sum = (user1.r_u + user2.r_u).min(joint);
            let sum = u_sum + user1.r_s + user1.r_z_up + user1.r_z_dn + user2.r_z_dn;
            GaussRegime1Result {
                alloc: Regime1RateAllocation { case_tag: CaseTag::B, user1, user2, sum },
                sum,
                g_c_used: gt,
                fallback: false,
                pairs,
            }
        } else if a2 < 0.5 {
            let mirrored = gauss_mirror(&reduced);
            let (m_user1, m_user2, joint, pairs) = case_b_gauss(&mirrored, gt * gt);
            let u_sum = (m_user1.r_u + m_user2.r_u).min(joint);
            let sum = u_sum + m_user1.r_s + m_user1.r_z_up + m_user1.r_z_dn + m_user2.r_z_dn;
            GaussRegime1Result {
                alloc: Regime1RateAllocation {
                    case_tag: CaseTag::BSym,
                    user1: m_user2,
                    user2: m_user1,
                    sum,
                },
                sum,
                g_c_used: gt,
                fallback: false,
                pairs,
            }
        } else {
            saw_fallback_case = true;
            continue;
        };
        if best.as_ref().map_or(true, |b| candidate.sum > b.sum) {
            best = Some(candidate);
        }
    }
    match best {
        Some(b) if !(saw_fallback_case && hk > b.sum) => b,
        _ => fallback(hk),
    }
}

/// Non-cooperative Han–Kobayashi sum-rate with the standard power split:
/// each source's private part is placed at the noise level of its cross
/// link (`P_private = min(1, 1/max(1, g_cross^2))`), the remainder is
/// public. Each destination jointly decodes its own private and public
/// parts and the interferer's public part, treating the interfering private
/// part as noise; the region is maximized exactly.
pub fn hk_noncoop_sum(ch: &GaussChannel) -> f64 {
    let p1_priv = 1f64.min(1.0 / 1f64.max(ch.g14 * ch.g14));
    let p2_priv = 1f64.min(1.0 / 1f64.max(ch.g23 * ch.g23));
    let p1_pub = 1.0 - p1_priv;
    let p2_pub = 1.0 - p2_priv;
    // Variables [R1_private, R1_public, R2_private, R2_public].
    let mut sys = ConstraintSystem::new(4);
    sys.add_all_nonneg();
    // (received power, variable index) of the streams decoded, per receiver.
    let rx3: [(f64, usize); 3] = [
        (ch.g13 * ch.g13 * p1_priv, 0),
        (ch.g13 * ch.g13 * p1_pub, 1),
        (ch.g23 * ch.g23 * p2_pub, 3),
    ];
    let n3 = 1.0 + ch.g23 * ch.g23 * p2_priv;
    let rx4: [(f64, usize); 3] = [
        (ch.g24 * ch.g24 * p2_priv, 2),
        (ch.g24 * ch.g24 * p2_pub, 3),
        (ch.g14 * ch.g14 * p1_pub, 1),
    ];
    let n4 = 1.0 + ch.g14 * ch.g14 * p1_priv;
    for (streams, noise) in [(rx3, n3), (rx4, n4)] {
        for mask in 1u32..8 {
            let mut coeffs = [0.0; 4];
            let mut power = 0.0;
            for (bit, &(p, var)) in streams.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    coeffs[var] += 1.0;
                    power += p;
                }
            }
            sys.add(&coeffs, (1.0 + power / noise).log2());
        }
    }
    match sys.max_linear(&[1.0, 1.0, 1.0, 1.0]) {
        LpResult::Bounded(v) => v.to_f64().unwrap_or(0.0).max(0.0),
        _ => 0.0,
    }
}

/// Which scheme produced the final Gaussian achievable sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GaussScheme {
    Regime1A,
    Regime1B,
    Regime3,
    Hk,
}

/// Final Gaussian achievable sum: the best of the weak-cooperation scheme
/// (with internal cooperation-gain reduction), the strong-cooperation
/// scheme when it applies, and the non-cooperative fallback.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussAchievable {
    pub sum: f64,
    pub scheme: GaussScheme,
    /// Weak-cooperation allocation when that scheme won.
    pub alloc: Option<Regime1RateAllocation>,
}

pub fn gauss_achievable_sum(ch: &GaussChannel) -> GaussAchievable {
    let mut best = GaussAchievable {
        sum: hk_noncoop_sum(ch),
        scheme: GaussScheme::Hk,
        alloc: None,
    };
    let r1 = regime1_gauss_rates(ch);
    if !r1.fallback && r1.sum > best.sum {
        best = GaussAchievable {
            sum: r1.sum,
            scheme: match r1.alloc.case_tag {
                CaseTag::A => GaussScheme::Regime1A,
                _ => GaussScheme::Regime1B,
            },
            alloc: Some(r1.alloc),
        };
    }
    let lv = derive_levels(ch);
    if lv.n_c > lv.n13.min(lv.n24) {
        if let Ok(r3) = regime3_gauss_sum(ch) {
            if r3.sum > best.sum {
                best = GaussAchievable {
                    sum: r3.sum,
                    scheme: GaussScheme::Regime3,
                    alloc: None,
                };
            }
        }
    }
    best
}

/// Convenience view of [`LevelProfile`] for reporting.
pub fn gauss_levels(ch: &GaussChannel) -> LevelProfile {
    derive_levels(ch)
}
