//! Classify the named generators and check the bracket relations.

use diamond_cqm::algebra::{bracket_table, classify, Generator, PhasePoint};
use diamond_cqm::ConformalModel;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = ConformalModel::new(1.0, 2.0)?;
    for (name, g) in [
        ("H", Generator::H),
        ("D", Generator::D),
        ("K", Generator::K),
        ("R", Generator::R),
        ("S", Generator::S),
    ] {
        let c = g.coeffs(&model);
        println!(
            "{name}: (u, v, w) = ({}, {}, {})  discriminant {:+.4}  {}",
            c.u,
            c.v,
            c.w,
            c.discriminant(),
            classify(&c)
        );
    }

    let points: Vec<PhasePoint> = (0..8)
        .map(|k| {
            let x = k as f64;
            PhasePoint {
                q: 0.5 + 0.3 * x,
                p: (x - 3.5) * 0.4,
                t: 0.2 * x - 0.7,
            }
        })
        .collect();
    println!();
    for row in bracket_table(&model, &points, 1e-5)? {
        println!("{:<22} max residual {:.2e}", row.relation, row.max_residual);
    }
    Ok(())
}
