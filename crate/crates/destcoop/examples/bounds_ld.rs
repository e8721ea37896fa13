//! Evaluate the five sum-capacity upper bounds on linear-deterministic
//! channels and show how the binding bound changes with the cooperation
//! level.
//!
//! Run with: `cargo run --example bounds_ld`

use destcoop::bounds::{ld_bound_set, ld_bounds_int};
use destcoop::channel::LdChannel;

fn main() {
    // A strong-interference-free channel: direct levels 5, cross levels 2.
    let base = LdChannel::new(5, 2, 2, 5, 0);
    println!("channel family n13=5 n23=2 n14=2 n24=5, sweeping nC:");
    println!("{:>3} {:>4} {:>4} {:>4} {:>4} {:>4} {:>9}", "nC", "u1", "u2", "u3", "u4", "u5", "min_bound");
    for nc in 0..=6 {
        let ch = base.with_nc(nc);
        let [u1, u2, u3, u4, u5] = ld_bounds_int(&ch);
        let min = ld_bound_set(&ch).min_bound;
        println!("{nc:>3} {u1:>4} {u2:>4} {u3:>4} {u4:>4} {u5:>4} {min:>9}");
    }

    // Cooperation stops helping once the cut-set style bounds saturate.
    let no_coop = ld_bound_set(&base).min_bound;
    let full = ld_bound_set(&base.with_nc(6)).min_bound;
    println!("\nbound without cooperation: {no_coop}, with nC=6: {full}");
    println!("cooperation gain: {} bits per channel use", full - no_coop);
}
