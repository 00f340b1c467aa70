//! Phase diagram of the extended QWZ model from the lattice invariant.
//!
//! Sweeps the potential mu, skipping the analytic gap-closing points
//! mu = +-1 and +-5, and prints the resulting piecewise-constant Chern
//! number: 0 for |mu| < 1 or |mu| > 5, +-1 for 1 < +-mu < 5.
//!
//! Run with: cargo run --release --example phase_diagram

use chernlink::invariants::{chern_lattice, chern_quadrature};
use chernlink::{QwzParams, SeparableModel};

fn main() {
    let boundaries = QwzParams::default().phase_boundaries();
    println!("gap closes at mu = {boundaries:?}\n");
    println!("{:>7} {:>8} {:>13}  phase", "mu", "lattice", "quadrature");

    let mut mu = -6.0;
    while mu <= 6.0 + 1e-9 {
        if boundaries.iter().all(|b| (mu - b).abs() > 0.1) {
            let m = SeparableModel::qwz(QwzParams::with_mu(mu));
            let c = chern_lattice(&m, 50).expect("gapped away from the boundaries");
            let q = chern_quadrature(&m, 200).unwrap();
            let bar = match c {
                1 => "####",
                -1 => "....",
                _ => "    ",
            };
            println!("{mu:>7.2} {c:>8} {q:>13.6}  |{bar}|");
        } else {
            println!("{mu:>7.2} {:>8} {:>13}  (boundary, skipped)", "-", "-");
        }
        mu += 0.5;
    }
}
