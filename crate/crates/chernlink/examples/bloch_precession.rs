//! Single-momentum quench anatomy: precession of the Bloch vector about
//! the chain field and the three observables that rebuild the loop point.
//!
//! Starting from the south pole, n(t) precesses about r_hat at the
//! bandwidth frequency omega = 2|r|. The long-time average tilts onto the
//! axis as -r_hat (r_hat.z); frequency, average and precession sense
//! combine into l = rho omega n_bar / (2|n_bar|) -> r.
//!
//! Run with: cargo run --release --example bloch_precession

use chernlink::quench::{
    average_bloch, estimate_frequency, precession_sign, steady_average, BlochTrajectory,
};
use chernlink::{QwzParams, SeparableModel, Vec3};

fn main() {
    let chain = SeparableModel::qwz(QwzParams::default());
    let k = 2.0 * std::f64::consts::PI * 10.5 / 50.0;
    let r = chain.chain1().bloch_vector(k);
    println!(
        "momentum k = {k:.4}, chain field r = ({:.4}, {:.4}, {:.4})",
        r.x, r.y, r.z
    );

    let traj = BlochTrajectory::simulate(r, 200.0, 0.01);
    println!("\nfirst quarter period of the trajectory:");
    let quarter = (std::f64::consts::PI / (4.0 * r.norm()) / 0.01) as usize;
    for i in (0..=quarter).step_by(quarter / 4) {
        let n = traj.samples[i];
        println!(
            "  t = {:6.3}: n = ({:+.4}, {:+.4}, {:+.4})",
            i as f64 * 0.01,
            n.x,
            n.y,
            n.z
        );
    }

    let omega = estimate_frequency(&traj).unwrap();
    let rho = precession_sign(&traj, 1e-3).unwrap();
    println!(
        "\nestimated omega = {omega:.8}   (bandwidth 2|r| = {:.8})",
        2.0 * r.norm()
    );
    println!(
        "precession sense rho = {rho:+}   (sign of r_hat . n0 = {:+.4})",
        r.normalized().unwrap().dot(Vec3::new(0.0, 0.0, -1.0))
    );

    println!("\nrunning average vs steady value -r_hat (r_hat . z):");
    let steady = steady_average(r).unwrap();
    for t in [5.0, 20.0, 80.0, 200.0] {
        let avg = average_bloch(r, t);
        println!(
            "  T = {t:6.1}: n_bar = ({:+.5}, {:+.5}, {:+.5})   |n_bar - steady| = {:.2e} (bound {:.2e})",
            avg.x, avg.y, avg.z,
            avg.distance(steady),
            2.0 / (2.0 * r.norm() * t)
        );
    }

    let n_bar = average_bloch(r, 200.0);
    let l = n_bar * (rho as f64 * omega / (2.0 * n_bar.norm()));
    println!(
        "\nreconstructed loop point l = ({:+.5}, {:+.5}, {:+.5})",
        l.x, l.y, l.z
    );
    println!(
        "chain field            r = ({:+.5}, {:+.5}, {:+.5})",
        r.x, r.y, r.z
    );
    println!("deviation |l - r| = {:.3e}", l.distance(r));
}
