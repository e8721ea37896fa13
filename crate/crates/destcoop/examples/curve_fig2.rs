//! Emit the normalized sum-capacity bound of the symmetric Gaussian channel
//! family as the cooperation-link strength sweeps from zero to twice the
//! direct-link strength (in exponent). The curve is piecewise linear with
//! slopes 2, 0, 1, 0: cooperation first buys two bits per cooperation bit,
//! then saturates, then helps again linearly, then saturates for good.
//!
//! Run with: `cargo run --example curve_fig2 > curve.csv`

use destcoop::cli::{cmd_curve_fig2, CURVE_HEADER_NOTE};

fn main() {
    print!("{CURVE_HEADER_NOTE}");
    println!("alpha,normalized_sum");
    for (alpha, value) in cmd_curve_fig2(60.0, 0.01) {
        println!("{alpha:.6},{value:.6}");
    }
}
