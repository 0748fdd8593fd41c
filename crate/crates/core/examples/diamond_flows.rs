//! Killing-field flows inside an alpha = 2 diamond and the diamond-time map.

use diamond_cqm::frames::{rckf_flow, t_of_tau, tau_of_t, DiamondGeometry, KillingField, SpacetimeEvent};
use diamond_cqm::{algebra::cartan_weyl, ConformalModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let alpha = 2.0;
    let geo = DiamondGeometry::new(alpha)?;
    for r0 in [0.25, 0.75, 1.25, 1.75] {
        let curve = rckf_flow(&SpacetimeEvent { t: 0.0, r: r0 }, &geo, KillingField::SK, 15.0, 1e-10)?;
        let end = curve.last().unwrap();
        let max_sum = curve.iter().map(|p| p.t.abs() + p.r).fold(0.0, f64::max);
        println!(
            "r0 = {r0:.2}: {} steps, end (t, r) = ({:.6}, {:.3e}), max |t|+r = {max_sum:.12}",
            curve.len(),
            end.t,
            end.r
        );
    }

    let s = cartan_weyl(&ConformalModel::new(1.0, alpha)?).1;
    println!();
    for t in [0.0, 1.0, 1.9, 1.999] {
        let tau = tau_of_t(&s, t)?;
        println!("t = {t:<6} tau = {tau:>10.6}  back to t = {:.15}", t_of_tau(&s, tau)?);
    }
    Ok(())
}
