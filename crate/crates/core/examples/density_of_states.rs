//! Densities of states of S from the regularized, smooth, semiclassical and box routes.

use diamond_cqm::dos::{
    cutoff_constant, dos_digamma, dos_semiclassical, dos_series, dos_thomas_fermi, dos_thomas_fermi_box,
    SemiclassicalForm,
};
use diamond_cqm::spectral::{staircase, BoxDiscretization, Potential};
use diamond_cqm::ConformalModel;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = ConformalModel::new(1.0, 1.0)?;
    let l = 40.0 * m.length_scale();
    let c = cutoff_constant(&m, l);
    let energies = [5.0, 10.0, 15.0, 20.0];
    let b = BoxDiscretization::new(1e-3, l, 8000, 4)?;
    let stairs = staircase(&m, Potential::S, &b, &energies)?;

    println!("L = {l}, C = {c:.6}");
    println!(
        "{:>5} {:>10} {:>10} {:>10} {:>10} {:>12} {:>10}",
        "E", "digamma", "TF", "TF box", "staircase", "oscillatory", "series"
    );
    for (e, st) in energies.iter().zip(&stairs) {
        let osc = dos_semiclassical(&m, *e, SemiclassicalForm::PoleClosed, 1, None)?.rho;
        let series = dos_series(&m, *e, 200_000, c + 0.577_215_664_901_532_9, true)?.rho;
        println!(
            "{e:>5} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {osc:>12.3e} {series:>10.6}",
            dos_digamma(&m, *e, c)?.rho,
            dos_thomas_fermi(&m, *e, l)?.rho,
            dos_thomas_fermi_box(&m, *e, l)?.rho,
            st.rho,
        );
    }
    Ok(())
}
