//! Acceptance gate: ten end-to-end criteria covering exactness of the LD
//! characterization, the Gaussian constant-gap guarantee, the information
//! and polytope oracles, the bit-exact simulator, and the emitted curve.
//! Each test prints one `ACCEPTANCE n: PASS` line (visible with
//! `--nocapture`); a red test is the corresponding FAIL.

use destcoop::bounds::{gaussian_bound_set, gaussian_primed_bound_set, ld_bound_set};
use destcoop::channel::{GaussChannel, LdChannel};
use destcoop::cli::{cmd_curve_fig2, cmd_verify_gauss_gap, cmd_verify_ld_sweep, sample_gauss_channels};
use destcoop::gf_linalg::GfMatrix;
use destcoop::info_calc::{enumeration_cond_entropy, GaussRvSystem, LinearRvSystem};
use destcoop::polytope::{vertex_enumeration_max, ConstraintSystem, LpResult};
use destcoop::schemes::{ld_case, regime1_ld_rates, regime3_ld_sum, CaseTag};
use destcoop::simulator::{
    build_example1_scheme, build_example2_scheme, build_regime1_scheme, compile_scheme,
    mask_messages,
};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn random_messages(len: usize, p: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    (0..len).map(|_| rng.gen_range(0..p)).collect()
}

/// Criterion 1: on every LD channel with levels in 0..=5 and cooperation in
/// 0..=8 (11,664 channels), the achievable sum equals the bound minimum,
/// within a two-minute budget.
#[test]
fn criterion_01_ld_sweep_exact() {
    let report = cmd_verify_ld_sweep(5, 8);
    assert_eq!(report.total, 11_664);
    assert!(
        report.mismatches.is_empty(),
        "mismatches: {:?}",
        &report.mismatches[..report.mismatches.len().min(5)]
    );
    assert!(
        report.runtime_ms < 120_000,
        "sweep took {} ms (budget 120000)",
        report.runtime_ms
    );
    println!(
        "ACCEPTANCE 1: PASS — {} channels exact in {} ms",
        report.total, report.runtime_ms
    );
}

/// Criterion 2: the hand-built weak-cooperation scheme on (5,2,2,5,1)
/// achieves rates (4,4) over 100 random seeds at horizon 20; the bound is 8
/// with cooperation and 6 without, so the scheme is exactly optimal.
#[test]
fn criterion_02_example1_scheme() {
    let ch = LdChannel::new(5, 2, 2, 5, 1);
    let scheme = build_example1_scheme(&ch, 20).unwrap();
    let compiled = compile_scheme(&scheme);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..100 {
        let messages = random_messages(scheme.seed_len, ch.p, &mut rng);
        let report = compiled.run(&messages, false);
        assert!(report.success, "decode failed: {:?}", report.failed_step);
        assert_eq!(report.achieved_rates, (4.0, 4.0));
    }
    assert_eq!(ld_bound_set(&ch).min_bound, 8.0);
    assert_eq!(ld_bound_set(&ch.with_nc(0)).min_bound, 6.0);
    println!("ACCEPTANCE 2: PASS — (4,4) over 100 seeds; bounds 8 (nC=1) and 6 (nC=0)");
}

/// Criterion 3: the strong-cooperation scheme on (2,1,1,2,3) achieves (2,2)
/// bit-exactly, and the generic compress-and-forward region projects to the
/// same sum of 4, exactly.
#[test]
fn criterion_03_example2_scheme() {
    let ch = LdChannel::new(2, 1, 1, 2, 3);
    let scheme = build_example2_scheme(&ch, 16).unwrap();
    let compiled = compile_scheme(&scheme);
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..100 {
        let messages = random_messages(scheme.seed_len, ch.p, &mut rng);
        let report = compiled.run(&messages, false);
        assert!(report.success, "decode failed: {:?}", report.failed_step);
        assert_eq!(report.achieved_rates, (2.0, 2.0));
    }
    let r3 = regime3_ld_sum(&ch).unwrap();
    assert_eq!(r3.fm_sum, 4.0);
    assert_eq!(r3.closed_form, 4);
    println!("ACCEPTANCE 3: PASS — (2,2) bit-exact; region sum 4 exact");
}

/// Criterion 4: over 10,000 seeded Gaussian channels (gains log-uniform in
/// [-10, 60] dB, phases uniform), bound minus achievable lies in [0, 43]
/// bits on every sample, within a ten-minute budget.
#[test]
fn criterion_04_gauss_gap() {
    let report = cmd_verify_gauss_gap(10_000, (-10.0, 60.0), 0);
    assert_eq!(report.total, 10_000);
    assert!(
        report.mismatches.is_empty(),
        "gap violations: {:?}",
        &report.mismatches[..report.mismatches.len().min(5)]
    );
    assert!(report.max_gap <= 43.0);
    assert!(
        report.runtime_ms < 600_000,
        "sweep took {} ms (budget 600000)",
        report.runtime_ms
    );
    println!(
        "ACCEPTANCE 4: PASS — 10000 samples, max gap {:.3} bits in {} ms",
        report.max_gap, report.runtime_ms
    );
}

/// Criterion 5: on the same sample set, the level-domain surrogate bounds
/// trail the true bounds by at most 7 bits (minimum of the first four) and
/// 2 bits (fifth).
///
/// KNOWN RED. The surrogate formulas are exposed exactly as printed in the
/// source material, and the printed second and third surrogates pair the
/// link terms differently from the canonical second and third bounds: the
/// cooperation level appears in the wrong max. On channels where the
/// cooperation link dominates one user's links, the printed second
/// surrogate drops below the 7-bit envelope (15 of 10,000 samples, worst
/// deficit ~2.56 bits beyond the constant). Re-pairing the terms to match
/// the canonical bounds satisfies the claim on every sample with >2.5 bits
/// to spare, confirming a transcription-level discrepancy in the source
/// rather than an implementation error. The check is kept faithful to the
/// stated claim instead of being weakened to pass.
#[test]
fn criterion_05_primed_surrogates() {
    let channels = sample_gauss_channels(10_000, (-10.0, 60.0), 0);
    let mut worst4 = f64::INFINITY;
    let mut worst5 = f64::INFINITY;
    let mut violations = 0usize;
    for ch in &channels {
        let b = gaussian_bound_set(ch);
        let p = gaussian_primed_bound_set(ch);
        let min4 = b.as_array()[..4].iter().cloned().fold(f64::INFINITY, f64::min);
        let pmin4 = p.as_array()[..4].iter().cloned().fold(f64::INFINITY, f64::min);
        worst4 = worst4.min(pmin4 - (min4 - 7.0));
        worst5 = worst5.min(p.u5 - (b.u5 - 2.0));
        if pmin4 < min4 - 7.0 - 1e-6 || p.u5 < b.u5 - 2.0 - 1e-6 {
            violations += 1;
        }
    }
    if violations == 0 {
        println!(
            "ACCEPTANCE 5: PASS — surrogate margins >= {:.4} (7-bit) and {:.4} (2-bit) on 10000 samples",
            worst4, worst5
        );
    } else {
        println!(
            "ACCEPTANCE 5: FAIL — {violations} of 10000 samples exceed the stated constants \
             (worst 7-bit margin {:.4}, worst 2-bit margin {:.4}); see test doc comment",
            worst4, worst5
        );
    }
    assert_eq!(
        violations, 0,
        "surrogate-bound constants exceeded on {violations} samples (worst 7-bit margin {worst4:.4})"
    );
}

/// Criterion 6: the rank-based conditional entropy agrees exactly with
/// exhaustive enumeration on 200 random GF(2) systems (seed length <= 10),
/// and the Gaussian log-det calculator satisfies the chain rule to 1e-9 on
/// 200 random systems.
#[test]
fn criterion_06_information_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for trial in 0..200 {
        let d1 = rng.gen_range(1..=5usize);
        let d2 = rng.gen_range(1..=(10 - d1).min(5));
        let mut sys = LinearRvSystem::new(vec![("A".into(), d1), ("B".into(), d2)], 2);
        let cols = sys.seed_len();
        let names = ["V", "W", "U"];
        for name in names {
            let rows = rng.gen_range(1..=4usize);
            let mut m = GfMatrix::zero(rows, cols, 2);
            for r in 0..rows {
                for c in 0..cols {
                    m.set(r, c, rng.gen_range(0..2));
                }
            }
            sys.define(name, m);
        }
        let (t, g): (&[&str], &[&str]) = match trial % 4 {
            0 => (&["V"], &["W"]),
            1 => (&["V", "W"], &["U"]),
            2 => (&["U"], &[]),
            _ => (&["W"], &["V", "U"]),
        };
        let rank_based = sys.cond_entropy(t, g).unwrap();
        let enumerated = enumeration_cond_entropy(&sys, t, g);
        assert_eq!(rank_based, enumerated, "trial {trial}");
    }
    for trial in 0..200 {
        let n = rng.gen_range(3..=6usize);
        let seeds: Vec<(String, f64)> = (0..n)
            .map(|i| (format!("S{i}"), rng.gen_range(0.1..2.0)))
            .collect();
        let mut g = GaussRvSystem::new(seeds.clone());
        for name in ["Y1", "Y2", "Y3"] {
            let combo: Vec<(String, Complex64)> = (0..n)
                .map(|i| {
                    (
                        format!("S{i}"),
                        Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)),
                    )
                })
                .collect();
            let refs: Vec<(&str, Complex64)> =
                combo.iter().map(|(s, c)| (s.as_str(), *c)).collect();
            g.define(name, &refs);
        }
        let joint = g.cond_mutual_info(&["Y1", "Y2"], &["Y3"], &[]).unwrap();
        let chain = g.cond_mutual_info(&["Y1"], &["Y3"], &[]).unwrap()
            + g.cond_mutual_info(&["Y2"], &["Y3"], &["Y1"]).unwrap();
        assert!(
            (joint - chain).abs() < 1e-9,
            "trial {trial}: chain rule violated by {}",
            (joint - chain).abs()
        );
    }
    println!("ACCEPTANCE 6: PASS — 200 exact GF(2) entropies, 200 chain rules to 1e-9");
}

fn random_system(rng: &mut ChaCha8Rng) -> (ConstraintSystem, Vec<f64>) {
    let n = rng.gen_range(1..=4usize);
    let m = rng.gen_range(1..=10usize);
    let mut sys = ConstraintSystem::new(n);
    for _ in 0..m {
        let coeffs: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
        sys.add_int(&coeffs, rng.gen_range(0..=6));
    }
    // Pointed region so vertex enumeration applies.
    sys.add_all_nonneg();
    let objective: Vec<f64> = (0..n).map(|_| rng.gen_range(-3..=3) as f64).collect();
    (sys, objective)
}

/// Criterion 7: Fourier-Motzkin-based maximization agrees with brute-force
/// vertex enumeration (exact rationals) on 500 random systems, and is
/// invariant to constraint order on 100.
#[test]
fn criterion_07_polytope_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..500 {
        let (sys, objective) = random_system(&mut rng);
        let fm = sys.max_linear(&objective);
        let vertex = vertex_enumeration_max(&sys, &objective);
        assert_eq!(fm, vertex, "trial {trial}");
    }
    for trial in 0..100 {
        let n = rng.gen_range(1..=4usize);
        let m = rng.gen_range(1..=10usize);
        let mut rows: Vec<(Vec<i64>, i64)> = (0..m)
            .map(|_| {
                (
                    (0..n).map(|_| rng.gen_range(-3..=3)).collect(),
                    rng.gen_range(0..=6),
                )
            })
            .collect();
        let objective: Vec<f64> = (0..n).map(|_| rng.gen_range(-3..=3) as f64).collect();
        let build = |rows: &[(Vec<i64>, i64)]| {
            let mut sys = ConstraintSystem::new(n);
            for (c, r) in rows {
                sys.add_int(c, *r);
            }
            sys.add_all_nonneg();
            sys.max_linear(&objective)
        };
        let before = build(&rows);
        rows.shuffle(&mut rng);
        let after = build(&rows);
        assert_eq!(before, after, "order-dependence at trial {trial}");
    }
    println!("ACCEPTANCE 7: PASS — 500 vertex-enumeration agreements, 100 order-invariance checks");
}

/// Criterion 8: on 50 random weak-cooperation channels where both relays
/// actively null (case where both cross paths are cancelled), seeding only
/// one user's cooperative-private stream leaves the other destination's
/// received signal identically zero at every time step, exactly.
#[test]
fn criterion_08_nulling_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    while checked < 50 {
        let ch = LdChannel::new(
            rng.gen_range(0..=6),
            rng.gen_range(0..=6),
            rng.gen_range(0..=6),
            rng.gen_range(0..=6),
            rng.gen_range(0..=6),
        );
        if ch.n_c > ch.n_min() || ld_case(&ch) != CaseTag::A {
            continue;
        }
        let alloc = regime1_ld_rates(&ch).unwrap();
        if alloc.user1.r_s < 1.0 || alloc.user2.r_s < 1.0 {
            continue; // nothing to null
        }
        let scheme = build_regime1_scheme(&ch, 14).unwrap();
        let compiled = compile_scheme(&scheme);
        let messages = random_messages(scheme.seed_len, ch.p, &mut rng);
        for (keep, other_y) in [(["s2"], &compiled.y3), (["s1"], &compiled.y4)] {
            let masked = mask_messages(&scheme, &messages, &keep);
            for (t, y) in other_y.iter().enumerate() {
                let v = y.mul_vec(&masked);
                assert!(
                    v.iter().all(|&x| x == 0),
                    "{keep:?}-only seed visible at t={} on {ch:?}: {v:?}",
                    t + 1
                );
            }
        }
        checked += 1;
    }
    println!("ACCEPTANCE 8: PASS — cross-talk nulling exact on 50 channels at every t");
}

/// Criterion 9: the emitted normalized-bound curve is piecewise linear with
/// slopes (2, 0, 1, 0), plateau values {1.5, 2.0} within 0.05, and
/// breakpoints near {0.25, 1.0, 1.5}.
#[test]
fn criterion_09_curve_shape() {
    let rows = cmd_curve_fig2(60.0, 0.01);
    let fit = |lo: f64, hi: f64| -> (f64, f64) {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|(a, _)| (lo..=hi).contains(a))
            .cloned()
            .collect();
        let n = pts.len() as f64;
        let (sx, sy): (f64, f64) = pts.iter().fold((0.0, 0.0), |s, p| (s.0 + p.0, s.1 + p.1));
        let (mx, my) = (sx / n, sy / n);
        let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
        let slope = sxy / sxx;
        (slope, my - slope * mx)
    };
    // Fit the four linear segments away from the kinks.
    let seg1 = fit(0.12, 0.23);
    let seg2 = fit(0.35, 0.85);
    let seg3 = fit(1.08, 1.42);
    let seg4 = fit(1.65, 2.0);
    assert!((seg1.0 - 2.0).abs() < 0.15, "segment-1 slope {}", seg1.0);
    assert!(seg2.0.abs() < 0.02, "segment-2 slope {}", seg2.0);
    assert!((seg3.0 - 1.0).abs() < 0.05, "segment-3 slope {}", seg3.0);
    assert!(seg4.0.abs() < 0.02, "segment-4 slope {}", seg4.0);
    // Plateau values.
    let plateau1 = seg2.1 + seg2.0 * 0.6;
    let plateau2 = seg4.1 + seg4.0 * 1.8;
    assert!((plateau1 - 1.5).abs() < 0.05, "plateau {plateau1}");
    assert!((plateau2 - 2.0).abs() < 0.05, "plateau {plateau2}");
    // Breakpoints: intersections of consecutive fitted segments.
    let meet = |a: (f64, f64), b: (f64, f64)| (b.1 - a.1) / (a.0 - b.0);
    let b1 = meet(seg1, seg2);
    let b2 = meet(seg2, seg3);
    let b3 = meet(seg3, seg4);
    assert!((b1 - 0.25).abs() < 0.06, "breakpoint {b1}");
    assert!((b2 - 1.0).abs() < 0.06, "breakpoint {b2}");
    assert!((b3 - 1.5).abs() < 0.06, "breakpoint {b3}");
    println!(
        "ACCEPTANCE 9: PASS — slopes ({:.3},{:.3},{:.3},{:.3}), plateaus ({:.3},{:.3}), breakpoints ({:.3},{:.3},{:.3})",
        seg1.0, seg2.0, seg3.0, seg4.0, plateau1, plateau2, b1, b2, b3
    );
}

/// Criterion 10: with both direct links absent and the cooperation links not
/// too strong relative to interference, the cooperation cut-set bound
/// evaluates to exactly 2 log2(1 + |gC|^2).
#[test]
fn criterion_10_cutset_degenerate() {
    for (gc2, gi2) in [(1.0, 8.0), (3.0, 15.0), (0.5, 2.0), (10.0, 500.0)] {
        let (gc, gi) = (gc2f(gc2), gc2f(gi2));
        assert!(
            (1.0 + gc2).powi(2) <= 1.0 + gi2 + gc2,
            "test parameters violate the premise"
        );
        let ch = GaussChannel::new(0.0, gi, gi, 0.0, gc, 0.9);
        let u4 = gaussian_bound_set(&ch).u4;
        let expected = 2.0 * (1.0 + gc2).log2();
        assert!(
            (u4 - expected).abs() < 1e-9,
            "u4 = {u4}, expected {expected}"
        );
    }
    println!("ACCEPTANCE 10: PASS — degenerate cut-set bound exact to 1e-9");
}

fn gc2f(sq: f64) -> f64 {
    sq.sqrt()
}
