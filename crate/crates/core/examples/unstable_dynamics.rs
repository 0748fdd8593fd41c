//! Closed R orbits, the S instability rate and the orbit integrals.

use diamond_cqm::dynamics::{crossover_length, integrate, lyapunov_estimate, orbit_data, EffectiveOp, PhaseState};
use diamond_cqm::ConformalModel;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = ConformalModel::new(1.0, 2.0)?;
    let orbit = orbit_data(&m, 2.0, false)?;
    println!("R orbit at E = 2: q in [{:.10}, {:.10}]", orbit.q_minus, orbit.q_plus);
    println!(
        "  period {:.12} (pi alpha = {:.12})",
        orbit.period,
        std::f64::consts::PI * m.alpha
    );
    println!(
        "  action {:.12} (pi alpha E - pi sqrt g = {:.12})",
        orbit.jacobi_action,
        std::f64::consts::PI * (m.alpha * 2.0 - 1.0)
    );

    let start = PhaseState {
        q: orbit.q_minus,
        p: 0.0,
        tau: 0.0,
    };
    let tr = integrate(&m, EffectiveOp::R, &start, orbit.period, 1e-11)?;
    let last = tr.samples.last().unwrap();
    println!(
        "  after one period: q = {:.10}, p = {:.2e}, drift {:.1e}",
        last.q, last.p, tr.max_energy_drift
    );

    for alpha in [0.5, 1.0, 2.0] {
        let m = ConformalModel::new(1.0, alpha)?;
        let q0 = crossover_length(&m);
        let est = lyapunov_estimate(
            &m,
            EffectiveOp::S,
            &PhaseState {
                q: q0,
                p: 0.0,
                tau: 0.0,
            },
            1e-6 * q0,
            12.0 * alpha,
        )?;
        println!(
            "S at alpha = {alpha}: lambda = {:.5}, 1/alpha = {:.5}",
            est.rate,
            1.0 / alpha
        );
    }
    Ok(())
}
