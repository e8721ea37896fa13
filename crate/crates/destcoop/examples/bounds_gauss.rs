//! Evaluate the Gaussian sum-capacity upper bounds and their level-domain
//! surrogate ("primed") counterparts, which trail the true bounds by at most
//! a few bits and connect the Gaussian model to the deterministic one.
//!
//! Run with: `cargo run --example bounds_gauss`

use destcoop::bounds::{gaussian_bound_set, gaussian_primed_bound_set};
use destcoop::channel::GaussChannel;

fn main() {
    let ch = GaussChannel::new(1000.0, 30.0, 30.0, 1000.0, 100.0, 0.7);
    println!("channel: {ch:?}\n");

    let b = gaussian_bound_set(&ch);
    let p = gaussian_primed_bound_set(&ch);
    println!("{:>4} {:>12} {:>12} {:>8}", "", "bound", "surrogate", "slack");
    for (i, (bi, pi)) in b.as_array().iter().zip(p.as_array()).enumerate() {
        println!("u{:<3} {bi:>12.4} {pi:>12.4} {:>8.4}", i + 1, bi - pi);
    }
    println!("\nmin bound: {:.4} bits/use", b.min_bound);
    println!("min surrogate: {:.4} bits/use", p.min_bound);

    // The fifth surrogate differs from the fifth bound only by the inner
    // coefficients (1 vs 2 and 4), so it can trail by at most 2 bits.
    assert!(p.u5 >= b.u5 - 2.0 - 1e-6);
    let min4 = b.as_array()[..4].iter().cloned().fold(f64::INFINITY, f64::min);
    let pmin4 = p.as_array()[..4].iter().cloned().fold(f64::INFINITY, f64::min);
    println!(
        "first-four minimum: bound {min4:.4}, surrogate {pmin4:.4} (deficit {:.4} bits)",
        min4 - pmin4
    );
    println!("u5 surrogate within its guaranteed 2 bits");
}
