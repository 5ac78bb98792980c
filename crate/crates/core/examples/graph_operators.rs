//! Normalized adjacency, repeated convolution, variance reduction and
//! concentration reports on one SBM sample.

use xcsbm::graphops::{
    common_neighbor_concentration_report, convolve, degree_concentration_report, normalize, rho_profile,
    variance_reduction_estimate, NormMode,
};
use xcsbm::synthdata::{sample_xor_csbm, CsbmParams};

fn main() -> xcsbm::Result<()> {
    let (n, p, q) = (2000, 0.2, 0.1);
    let params = CsbmParams::with_separation(n, 4, 1.0, 1.0, p, q)?;
    let (ds, g) = sample_xor_csbm(&params, 3)?;

    let op = normalize(&g, NormMode::Row)?;
    let smoothed = convolve(&op, ds.x.view(), 2)?;
    let spread = |m: &ndarray::Array2<f64>| m.column(2).iter().map(|v| v * v).sum::<f64>() / n as f64;
    println!("noise variance along e3: raw {:.4}, after two convolutions {:.6}", spread(&ds.x), spread(&smoothed));

    let nodes: Vec<usize> = (0..10).map(|i| i * n / 10).collect();
    for k in 1..=3 {
        let rho = rho_profile(&g, k, &nodes)?;
        let mean = rho.iter().sum::<f64>() / rho.len() as f64;
        println!("rho({k}) mean over 10 nodes: {mean:.3e}  (n rho = {:.3})", mean * n as f64);
    }
    let delta = n as f64 / 2.0 * (p + q);
    let est = variance_reduction_estimate(&g, 2, 0, delta)?;
    println!("node 0, K=2: exact {:.3e}, path-count approximation {:.3e}", est.exact, est.delta_approx);

    for report in [
        degree_concentration_report(&g, p, q, 1.0),
        common_neighbor_concentration_report(&g, &ds.eps, p, q, 1.0),
    ] {
        println!(
            "{}: max relative deviation {:.3}, bound {:.3}, pass {}",
            report.quantity, report.max_rel_deviation, report.predicted_bound, report.pass
        );
    }
    Ok(())
}
