//! Channel parameter containers, Gaussian phase normalization, and the
//! Gaussian-to-level mapping used by the gap analysis.
//!
//! Both models are normalized: unit transmit power and unit noise variance
//! for the Gaussian channel, and reciprocity of the cooperation links built
//! in (a single `n_c`/`g_c` models both directions between the receivers).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Linear-deterministic channel: integer level exponents ("bits") for the
/// four source-destination links and the reciprocal cooperation link, plus
/// the field size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LdChannel {
    pub n13: u32,
    pub n23: u32,
    pub n14: u32,
    pub n24: u32,
    #[serde(rename = "nC")]
    pub n_c: u32,
    #[serde(default = "default_field")]
    pub p: u64,
}

fn default_field() -> u64 {
    2
}

impl LdChannel {
    pub fn new(n13: u32, n23: u32, n14: u32, n24: u32, n_c: u32) -> Self {
        LdChannel {
            n13,
            n23,
            n14,
            n24,
            n_c,
            p: 2,
        }
    }

    /// Signal vector dimension: the maximum of all level exponents.
    pub fn n(&self) -> u32 {
        self.n13
            .max(self.n23)
            .max(self.n14)
            .max(self.n24)
            .max(self.n_c)
    }

    /// The weakest of the four source-destination links.
    pub fn n_min(&self) -> u32 {
        self.n13.min(self.n23).min(self.n14).min(self.n24)
    }

    /// Same channel with a different cooperation-link strength.
    pub fn with_nc(&self, n_c: u32) -> Self {
        LdChannel { n_c, ..*self }
    }
}

/// Gaussian channel after phase normalization: nonnegative gain magnitudes
/// and the single residual phase `theta` in `[0, 2*pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussChannel {
    pub g13: f64,
    pub g23: f64,
    pub g14: f64,
    pub g24: f64,
    #[serde(rename = "gC")]
    pub g_c: f64,
    #[serde(default)]
    pub theta: f64,
}

impl GaussChannel {
    pub fn new(g13: f64, g23: f64, g14: f64, g24: f64, g_c: f64, theta: f64) -> Self {
        GaussChannel {
            g13,
            g23,
            g14,
            g24,
            g_c,
            theta,
        }
    }
}

/// Real-valued level profile `[log2 |g|^2]_+` of a Gaussian channel. Levels
/// are deliberately kept real; rounding to an [`LdChannel`] is a separate,
/// explicit operation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelProfile {
    pub n13: f64,
    pub n23: f64,
    pub n14: f64,
    pub n24: f64,
    pub n_c: f64,
}

impl LevelProfile {
    pub fn n_min(&self) -> f64 {
        self.n13.min(self.n23).min(self.n14).min(self.n24)
    }

    /// Floor each level to an integer LD channel (used only when
    /// instantiating deterministic simulations, never for bound values).
    pub fn floor_to_ld(&self) -> LdChannel {
        LdChannel::new(
            self.n13.floor() as u32,
            self.n23.floor() as u32,
            self.n14.floor() as u32,
            self.n24.floor() as u32,
            self.n_c.floor() as u32,
        )
    }
}

/// Channel description accepted by every command: exactly one of the two
/// models, as `{"ld": {...}}` or `{"gauss": {...}}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ChannelSpec {
    #[serde(rename = "ld")]
    Ld(LdChannel),
    #[serde(rename = "gauss")]
    Gauss(GaussChannel),
}

/// Reduce raw complex gains `(g13, g23, g14, g24, gC)` to the normalized
/// form: magnitudes plus the single phase
/// `theta = arg(g14) + arg(g23) - arg(g13) - arg(g24)`, in `[0, 2*pi)`.
///
/// All other phases can be absorbed into the inputs and outputs without
/// changing the capacity region, so `theta` is the only phase that matters.
pub fn normalize_gaussian(raw: [Complex64; 5]) -> GaussChannel {
    let [g13, g23, g14, g24, g_c] = raw;
    let mut theta = g14.arg() + g23.arg() - g13.arg() - g24.arg();
    theta = theta.rem_euclid(TAU);
    GaussChannel::new(g13.norm(), g23.norm(), g14.norm(), g24.norm(), g_c.norm(), theta)
}

/// Componentwise `[log2 g^2]_+`.
pub fn derive_levels(ch: &GaussChannel) -> LevelProfile {
    fn level(g: f64) -> f64 {
        if g.abs() <= 1.0 {
            0.0
        } else {
            2.0 * g.abs().log2()
        }
    }
    LevelProfile {
        n13: level(ch.g13),
        n23: level(ch.g23),
        n14: level(ch.g14),
        n24: level(ch.g24),
        n_c: level(ch.g_c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn all_real_positive_gives_zero_theta() {
        let ch = normalize_gaussian([re(1.0), re(2.0), re(3.0), re(4.0), re(5.0)]);
        assert_abs_diff_eq!(ch.theta, 0.0);
        assert_abs_diff_eq!(ch.g14, 3.0);
    }

    #[test]
    fn imaginary_g14_gives_half_pi() {
        let ch = normalize_gaussian([
            re(1.0),
            re(1.0),
            Complex64::new(0.0, 2.0),
            re(1.0),
            re(1.0),
        ]);
        assert_abs_diff_eq!(ch.theta, PI / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ch.g14, 2.0);
    }

    #[test]
    fn negative_g13_gives_pi() {
        let ch = normalize_gaussian([re(-1.0), re(1.0), re(1.0), re(1.0), re(1.0)]);
        assert_abs_diff_eq!(ch.theta, PI, epsilon = 1e-12);
    }

    #[test]
    fn normalization_is_idempotent() {
        let ch = normalize_gaussian([
            Complex64::from_polar(2.0, 0.3),
            Complex64::from_polar(1.5, 1.1),
            Complex64::from_polar(0.7, 2.0),
            Complex64::from_polar(3.0, 5.0),
            Complex64::from_polar(1.0, 0.2),
        ]);
        let again = normalize_gaussian([
            re(ch.g13),
            Complex64::from_polar(ch.g23, ch.theta / 2.0),
            Complex64::from_polar(ch.g14, ch.theta / 2.0),
            re(ch.g24),
            re(ch.g_c),
        ]);
        assert_abs_diff_eq!(again.theta, ch.theta, epsilon = 1e-12);
        assert_abs_diff_eq!(again.g13, ch.g13);
        assert_abs_diff_eq!(again.g23, ch.g23);
    }

    #[test]
    fn levels_clip_and_scale() {
        let ch = GaussChannel::new(2.0, 0.5, 10.0, 1.0, 0.0, 0.0);
        let lv = derive_levels(&ch);
        assert_abs_diff_eq!(lv.n13, 2.0);
        assert_abs_diff_eq!(lv.n23, 0.0);
        assert_abs_diff_eq!(lv.n14, 100f64.log2(), epsilon = 1e-12);
        assert_abs_diff_eq!(lv.n24, 0.0);
        assert_abs_diff_eq!(lv.n_c, 0.0);
    }

    #[test]
    fn levels_invariant_to_theta_and_monotone() {
        let a = GaussChannel::new(2.0, 3.0, 4.0, 5.0, 6.0, 0.0);
        let b = GaussChannel { theta: 1.0, ..a };
        assert_eq!(derive_levels(&a), derive_levels(&b));
        let c = GaussChannel { g13: 2.5, ..a };
        assert!(derive_levels(&c).n13 > derive_levels(&a).n13);
    }

    #[test]
    fn json_schema_round_trip() {
        let ld: ChannelSpec =
            serde_json::from_str(r#"{"ld":{"n13":5,"n23":2,"n14":2,"n24":5,"nC":1,"p":2}}"#)
                .unwrap();
        match ld {
            ChannelSpec::Ld(ch) => {
                assert_eq!(ch, LdChannel::new(5, 2, 2, 5, 1));
                assert_eq!(ch.n(), 5);
            }
            _ => panic!("expected ld"),
        }
        let gauss: ChannelSpec = serde_json::from_str(
            r#"{"gauss":{"g13":2.0,"g23":1.0,"g14":1.0,"g24":2.0,"gC":0.5,"theta":0.0}}"#,
        )
        .unwrap();
        let text = serde_json::to_string(&gauss).unwrap();
        let back: ChannelSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(gauss, back);
    }
}
