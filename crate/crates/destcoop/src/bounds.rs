//! Closed-form evaluation of the five sum-capacity upper bounds for both
//! channel models, plus the level-domain "primed" surrogate bounds used by
//! the Gaussian gap analysis.
//!
//! All logarithms are base 2 and all quantities are in bits per channel use.

use crate::channel::{derive_levels, GaussChannel, LdChannel, LevelProfile};
use serde::Serialize;

/// The five upper-bound values and their minimum. For LD inputs all entries
/// are exact integers (represented in f64, which is lossless in this range).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundSet {
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
    pub u4: f64,
    pub u5: f64,
    pub min_bound: f64,
}

impl BoundSet {
    fn new(u1: f64, u2: f64, u3: f64, u4: f64, u5: f64) -> Self {
        let min_bound = u1.min(u2).min(u3).min(u4).min(u5);
        BoundSet {
            u1,
            u2,
            u3,
            u4,
            u5,
            min_bound,
        }
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.u1, self.u2, self.u3, self.u4, self.u5]
    }
}

/// The five LD bounds as exact integers (same formulas as [`ld_bound_set`]).
pub fn ld_bounds_int(ch: &LdChannel) -> [i64; 5] {
    let (n13, n23, n14, n24, nc) = (
        ch.n13 as i64,
        ch.n23 as i64,
        ch.n14 as i64,
        ch.n24 as i64,
        ch.n_c as i64,
    );
    let u1 = (n13 - n14 + nc).max(n23).max(nc) + (n24 - n23 + nc).max(n14).max(nc);
    let u2 = n24.max(n23) + (n13.max(n23).max(nc) - n23);
    let u3 = n13.max(n14) + (n24.max(n14).max(nc) - n14);
    let u4 = n13.max(nc) + n24.max(nc);
    // Degenerate branch: one destination's observation is contained in the
    // other's.
    let u5 = if n13 - n23 != n14 - n24 {
        (n13 + n24).max(n14 + n23)
    } else {
        n13.max(n24).max(n14).max(n23)
    };
    [u1, u2, u3, u4, u5]
}

/// Linear-deterministic upper bounds (exact integer values).
pub fn ld_bound_set(ch: &LdChannel) -> BoundSet {
    let [u1, u2, u3, u4, u5] = ld_bounds_int(ch);
    BoundSet::new(u1 as f64, u2 as f64, u3 as f64, u4 as f64, u5 as f64)
}

/// Gaussian upper bounds, including both conditional branches of the first
/// bound (genie side-information bound) and the degenerate-free fifth bound
/// (MIMO cut-set with worst-case input correlation).
pub fn gaussian_bound_set(ch: &GaussChannel) -> BoundSet {
    let (g13, g23, g14, g24, gc) = (ch.g13, ch.g23, ch.g14, ch.g24, ch.g_c);

    let u1_first = if g14 > gc.max(1.0) {
        let s = g23 + gc + (g13 * gc / g14).abs();
        (1.0 + s * s + (g13 / g14) * (g13 / g14)).log2()
    } else {
        let s = g23 + gc + g13;
        (1.0 + s * s).log2()
    };
    let u1_second = if g23 > gc.max(1.0) {
        let s = g14 + gc + (g24 * gc / g23).abs();
        (1.0 + s * s + (g24 / g23) * (g24 / g23)).log2()
    } else {
        let s = g14 + gc + g24;
        (1.0 + s * s).log2()
    };
    let u1 = u1_first + u1_second;

    let u2 = {
        let s = g13 + g23 + gc;
        (1.0 + s * s).log2() + (1.0 + g24 * g24 / (g23 * g23).max(1.0)).log2()
    };
    let u3 = {
        let s = g24 + g14 + gc;
        (1.0 + s * s).log2() + (1.0 + g13 * g13 / (g14 * g14).max(1.0)).log2()
    };
    let u4 = {
        let a = g13 + gc;
        let b = g24 + gc;
        (1.0 + a * a).log2() + (1.0 + b * b).log2()
    };
    let u5 = {
        let sq = g13 * g13 + g24 * g24 + g14 * g14 + g23 * g23;
        let direct = g13 * g24;
        let cross = g14 * g23;
        // |a|^2 + |b|^2 - 2|ab|cos(theta) >= (|a|-|b|)^2 >= 0, so the inner
        // expression never drops below 1.
        let det = direct * direct + cross * cross - 2.0 * direct * cross * ch.theta.cos();
        (1.0 + 2.0 * sq + 4.0 * det).log2()
    };
    BoundSet::new(u1, u2, u3, u4, u5)
}

/// Level-domain formula for the first primed bound; shared with the LD
/// expression of the same shape.
fn primed_u1(lv: &LevelProfile) -> f64 {
    (lv.n13 - lv.n14 + lv.n_c).max(lv.n23).max(lv.n_c)
        + (lv.n24 - lv.n23 + lv.n_c).max(lv.n14).max(lv.n_c)
}

/// Primed surrogate bounds: level-domain formulas for the first four
/// (nominally within 7 bits of the minimum of the unprimed first four) and
/// the coefficient-1 variant of the fifth (within 2 bits of the unprimed
/// fifth; this one is a strict algebraic identity).
///
/// Note: the primed second and third bounds pair the link terms differently
/// from the canonical second and third bounds ([`ld_bound_set`] keeps the
/// canonical pairing); both forms are deliberately exposed verbatim. The
/// printed pairing places the cooperation level with the wrong link pair,
/// and on channels where the cooperation link dominates one user's links
/// the 7-bit envelope is measurably exceeded (see the acceptance suite);
/// re-pairing the terms canonically restores the envelope. Callers who
/// need a guaranteed envelope should use the canonical bounds directly.
pub fn gaussian_primed_bound_set(ch: &GaussChannel) -> BoundSet {
    let lv = derive_levels(ch);
    let u1 = primed_u1(&lv);
    let u2 = lv.n13.max(lv.n23) + (lv.n24.max(lv.n23).max(lv.n_c) - lv.n23);
    let u3 = lv.n24.max(lv.n14) + (lv.n13.max(lv.n14).max(lv.n_c) - lv.n14);
    let u4 = lv.n13.max(lv.n_c) + lv.n24.max(lv.n_c);
    let u5 = {
        let sq = ch.g13 * ch.g13 + ch.g24 * ch.g24 + ch.g14 * ch.g14 + ch.g23 * ch.g23;
        let direct = ch.g13 * ch.g24;
        let cross = ch.g14 * ch.g23;
        let det = direct * direct + cross * cross - 2.0 * direct * cross * ch.theta.cos();
        (1.0 + sq + det).log2()
    };
    BoundSet::new(u1, u2, u3, u4, u5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn ld_example_channels() {
        // Cooperation turns the sum-capacity 6 channel into an 8 channel.
        assert_eq!(ld_bounds_int(&LdChannel::new(5, 2, 2, 5, 1)), [8, 8, 8, 10, 10]);
        assert_eq!(ld_bound_set(&LdChannel::new(5, 2, 2, 5, 1)).min_bound, 8.0);
        assert_eq!(ld_bound_set(&LdChannel::new(5, 2, 2, 5, 0)).min_bound, 6.0);
        assert_eq!(ld_bounds_int(&LdChannel::new(2, 1, 1, 2, 3)), [8, 4, 4, 6, 4]);
        assert_eq!(ld_bound_set(&LdChannel::new(2, 1, 1, 2, 3)).min_bound, 4.0);
        assert_eq!(ld_bounds_int(&LdChannel::new(0, 0, 0, 0, 0)), [0; 5]);
        // Degenerate fifth bound: equal level differences.
        assert_eq!(ld_bounds_int(&LdChannel::new(3, 3, 3, 3, 0))[4], 3);
    }

    #[test]
    fn gaussian_examples() {
        // Cross-only channel: fourth bound reduces to twice the
        // cooperation-link capacity.
        let ch = GaussChannel::new(0.0, 3.0, 3.0, 0.0, 2.0, 0.7);
        assert_abs_diff_eq!(
            gaussian_bound_set(&ch).u4,
            2.0 * (1.0f64 + 4.0).log2(),
            epsilon = 1e-12
        );
        let ch = GaussChannel::new(10.0, 0.0, 0.0, 10.0, 0.0, 0.0);
        assert_abs_diff_eq!(
            gaussian_bound_set(&ch).u4,
            2.0 * 101f64.log2(),
            epsilon = 1e-12
        );
        let zero = GaussChannel::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        let b = gaussian_bound_set(&zero);
        assert_abs_diff_eq!(b.u5, 0.0);
        assert_abs_diff_eq!(b.min_bound, 0.0);
        // Product term cancels the determinant part at theta = 0.
        let ch = GaussChannel::new(1.0, 1.0, 1.0, 1.0, 0.0, 0.0);
        assert_abs_diff_eq!(gaussian_bound_set(&ch).u5, 9f64.log2(), epsilon = 1e-12);
    }

    #[test]
    fn primed_examples() {
        let ch = GaussChannel::new(4.0, 2.0, 2.0, 4.0, 2.0, 0.0);
        let b = gaussian_primed_bound_set(&ch);
        assert_abs_diff_eq!(b.u4, 8.0, epsilon = 1e-12);
        let small = GaussChannel::new(0.5, 1.0, 0.3, 0.9, 0.2, 0.0);
        assert_abs_diff_eq!(gaussian_primed_bound_set(&small).u1, 0.0);
    }

    fn arb_gauss() -> impl Strategy<Value = GaussChannel> {
        (
            0.0f64..40.0,
            0.0f64..40.0,
            0.0f64..40.0,
            0.0f64..40.0,
            0.0f64..40.0,
            0.0f64..std::f64::consts::TAU,
        )
            .prop_map(|(a, b, c, d, e, t)| GaussChannel::new(a, b, c, d, e, t))
    }

    proptest! {
        #[test]
        fn ld_bounds_nondecreasing_in_nc(
            n13 in 0u32..6, n23 in 0u32..6, n14 in 0u32..6, n24 in 0u32..6, nc in 0u32..8
        ) {
            let lo = ld_bounds_int(&LdChannel::new(n13, n23, n14, n24, nc));
            let hi = ld_bounds_int(&LdChannel::new(n13, n23, n14, n24, nc + 1));
            for i in 0..5 {
                prop_assert!(hi[i] >= lo[i]);
            }
            // The fifth bound never depends on the cooperation link.
            prop_assert_eq!(lo[4], hi[4]);
        }

        #[test]
        fn ld_u1_no_cooperation_form(
            n13 in 0u32..6, n23 in 0u32..6, n14 in 0u32..6, n24 in 0u32..6
        ) {
            let u1 = ld_bounds_int(&LdChannel::new(n13, n23, n14, n24, 0))[0];
            let (n13, n23, n14, n24) = (n13 as i64, n23 as i64, n14 as i64, n24 as i64);
            prop_assert_eq!(u1, (n13 - n14).max(n23).max(0) + (n24 - n23).max(n14).max(0));
        }

        #[test]
        fn gaussian_bounds_nonnegative(ch in arb_gauss()) {
            let b = gaussian_bound_set(&ch);
            for u in b.as_array() {
                prop_assert!(u >= 0.0);
            }
            prop_assert!(b.min_bound >= 0.0);
        }

        #[test]
        fn primed_constants_hold(ch in arb_gauss()) {
            let b = gaussian_bound_set(&ch);
            let p = gaussian_primed_bound_set(&ch);
            let min4 = b.u1.min(b.u2).min(b.u3).min(b.u4);
            let pmin4 = p.u1.min(p.u2).min(p.u3).min(p.u4);
            prop_assert!(pmin4 >= min4 - 7.0 - 1e-9);
            prop_assert!(p.u5 >= b.u5 - 2.0 - 1e-9);
        }
    }
}
