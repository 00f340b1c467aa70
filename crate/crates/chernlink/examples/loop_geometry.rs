//! Gauss linking numbers of discretized closed curves.
//!
//! A Hopf link, a separated (unlinked) pair, the chain loops of the QWZ
//! model in its topological and trivial phases, and the near-contact guard
//! that flags a phase boundary.
//!
//! Run with: cargo run --release --example loop_geometry

use chernlink::geom3::{gauss_linking, min_pairwise_distance, LoopSamples};
use chernlink::{QwzParams, SeparableModel, Vec3};

fn circle_xy(center: Vec3) -> LoopSamples {
    LoopSamples::from_fn(400, |k| center + Vec3::new(k.cos(), k.sin(), 0.0)).unwrap()
}

fn circle_xz(center: Vec3) -> LoopSamples {
    LoopSamples::from_fn(400, |k| center + Vec3::new(k.cos(), 0.0, k.sin())).unwrap()
}

fn chain_loops(mu: f64) -> (LoopSamples, LoopSamples) {
    let m = SeparableModel::qwz(QwzParams::with_mu(mu));
    (
        m.chain1().sample_loop(400).unwrap(),
        m.chain2().sample_loop(400).unwrap(),
    )
}

fn main() {
    let a = circle_xy(Vec3::ZERO);
    let b = circle_xz(Vec3::new(1.0, 0.0, 0.0));
    println!(
        "Hopf link:            L = {:+.6}",
        gauss_linking(&a, &b, 1e-6).unwrap()
    );
    println!(
        "reversed orientation: L = {:+.6}",
        gauss_linking(&a.reversed(), &b, 1e-6).unwrap()
    );

    let far = circle_xy(Vec3::new(10.0, 0.0, 0.0));
    println!(
        "separated circles:    L = {:+.6}",
        gauss_linking(&a, &far, 1e-6).unwrap()
    );

    for mu in [2.0, 0.0, -3.0] {
        let (l1, l2) = chain_loops(mu);
        println!(
            "QWZ loops, mu = {mu:>4}: L = {:+.6}   (loop separation {:.4})",
            gauss_linking(&l1, &l2, 1e-6).unwrap(),
            min_pairwise_distance(&l1, &l2)
        );
    }

    // at mu = 1 the loops touch: the linking integral refuses to answer
    let (l1, l2) = chain_loops(1.0);
    let m = SeparableModel::qwz(QwzParams::with_mu(1.0));
    let (gap, _) = m.refined_gap(256);
    println!("\nQWZ at mu = 1: loop contact distance (refined) = {gap:.2e}");
    match gauss_linking(&l1, &l2, 0.05) {
        Err(e) => println!("linking with eps_touch = 0.05 -> {e}"),
        Ok(l) => println!("unexpected value {l}"),
    }
}
