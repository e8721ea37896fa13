//! Work with the compress-and-forward achievable rate region directly: build
//! the full constraint system (fourteen inequalities per destination over six
//! rate variables, instantiated with exact rank-based mutual informations),
//! project it onto the sum-rate axis with Fourier-Motzkin elimination, and
//! cross-check the projection against brute-force vertex enumeration.
//!
//! Run with: `cargo run --example rate_region_fm`

use destcoop::channel::LdChannel;
use destcoop::polytope::{vertex_enumeration_max, LpResult};
use destcoop::schemes::theorem3_constraints_ld;

fn main() {
    let ch = LdChannel::new(2, 1, 1, 2, 3);
    let sys = theorem3_constraints_ld(&ch).expect("exact rank-based informations");
    println!(
        "constraint system: {} inequalities over {} variables",
        sys.constraints().len(),
        sys.num_vars()
    );

    // Sum of the four per-stream rates (the last two variables are the
    // compression rates of the two destinations).
    let objective = [1.0, 1.0, 1.0, 1.0, 0.0, 0.0];

    let fm = sys.max_linear(&objective);
    let vertex = vertex_enumeration_max(&sys, &objective);
    println!("Fourier-Motzkin projection max: {:?}", fm.value());
    println!("vertex-enumeration max:         {:?}", vertex.value());
    assert_eq!(fm, vertex, "the two exact methods must agree");

    match fm {
        LpResult::Bounded(v) => println!("\nachievable sum-rate: {v} bits/use"),
        other => println!("\nunexpected result: {other:?}"),
    }
}
