//! Finite-difference levels of R against 2n + mu + 1, and the S staircase.

use diamond_cqm::spectral::{eigenvalues, staircase, BoxDiscretization, Potential};
use diamond_cqm::ConformalModel;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for g in [1.0, 2.0] {
        let m = ConformalModel::new(g, 1.0)?;
        let b = BoxDiscretization::new(1e-3, 20.0, 4000, 4)?;
        let levels = eigenvalues(&m, Potential::R, &b, 6)?;
        println!("g = {g}");
        for (n, e) in levels.eigenvalues.iter().enumerate() {
            let exact = 2.0 * n as f64 + m.mu() + 1.0;
            println!(
                "  n = {n}: {e:.9}  exact {exact:.9}  rel {:.1e}",
                (e - exact).abs() / exact
            );
        }
    }

    let m = ConformalModel::new(1.0, 1.0)?;
    let b = BoxDiscretization::new(1e-3, 40.0, 8000, 4)?;
    println!("\nS in a box of length 40");
    for p in staircase(&m, Potential::S, &b, &[2.0, 6.0, 10.0, 14.0])? {
        println!("  E = {:>4}: N = {:>4}, smoothed rho = {:.6}", p.energy, p.count, p.rho);
    }
    Ok(())
}
