//! Exact kernels, Green's-function poles, the trace identity and the diamond temperature.

use diamond_cqm::pathint::{
    diamond_temperature, partition_function, pole_scan, propagator, trace_z, KernelKind, PartitionMethod, TraceMethod,
    TraceOp,
};
use diamond_cqm::ConformalModel;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = ConformalModel::new(2.0, 1.0)?;
    for kind in [KernelKind::KR, KernelKind::KS, KernelKind::KREuclid] {
        let k = propagator(&m, kind, 1.0, 1.5, 0.7)?;
        println!(
            "{:<10} K(1, 1.5; 0.7) = {:.12e} {:+.12e} i",
            kind.label(),
            k.value.re,
            k.value.im
        );
    }

    let scan = pole_scan(&m, 0.5, 14.0, 0.05)?;
    println!(
        "\npoles of G_R: {:?}",
        scan.poles.iter().map(|e| format!("{e:.9}")).collect::<Vec<_>>()
    );
    println!("levels:       2n + mu + 1 with mu = {:.9}", m.mu());

    println!();
    for wt in [0.1, 1.0, 5.0] {
        let c = trace_z(&m, TraceOp::S, wt, TraceMethod::ClosedForm)?.re;
        let q = trace_z(&m, TraceOp::REuclid, wt, TraceMethod::Quadrature)?.re;
        let z = partition_function(&m, wt, PartitionMethod::EigenSum)?;
        println!(
            "wT = {wt}: closed {c:.15e}  quadrature {q:.15e}  eigen-sum {:.15e}",
            z.partition_value
        );
    }

    let d = diamond_temperature(&ConformalModel::new(1.0, 1.0)?);
    println!(
        "\nT_D = {:.15}, lambda_L = {}, bound = {}, ratio = {}",
        d.temperature, d.lyapunov, d.bound, d.ratio
    );
    Ok(())
}
