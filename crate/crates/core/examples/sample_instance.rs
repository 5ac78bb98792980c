//! Sample an XOR-CSBM instance and print its basic statistics.
//!
//! cargo run --example sample_instance -- [n] [gamma] [seed]

use xcsbm::synthdata::{class_means, sample_xor_csbm, CsbmParams};
use xcsbm::theory::bayes_classify;

fn main() -> xcsbm::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(1000);
    let gamma: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(2.0);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(7);

    let params = CsbmParams::with_separation(n, 4, gamma, 1.0, 0.2, 0.05)?;
    let (ds, g) = sample_xor_csbm(&params, seed)?;

    let ones = ds.eps.iter().filter(|&&e| e == 1).count();
    println!("n={n} d={} gamma={gamma} sigma={}", ds.d(), params.sigma);
    println!("class 1 fraction: {:.3}", ones as f64 / n as f64);
    println!("edges (with self-loops): {}", g.edge_count());
    let mean_deg = g.degrees().iter().sum::<usize>() as f64 / n as f64;
    println!("mean degree {mean_deg:.1}, expected {:.1}", n as f64 / 2.0 * (params.p + params.q) + 1.0);

    // signs cancel, so the per-class means sit near zero
    let (m0, m1) = class_means(&ds)?;
    println!("class means: {m0:.3} / {m1:.3}");

    let wrong = (0..n)
        .filter(|&i| bayes_classify(ds.x.row(i).as_slice().unwrap(), &params.mu, &params.nu) != ds.eps[i])
        .count();
    println!("Bayes rule error on features alone: {:.3}", wrong as f64 / n as f64);
    Ok(())
}
