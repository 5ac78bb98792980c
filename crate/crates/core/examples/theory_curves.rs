//! Tabulate the closed-form quantities: misclassification floor, exact Bayes
//! error, zeta, thresholds and predicted losses.

use xcsbm::theory::{bayes_error_rate, misclassification_floor, predicted_loss, thresholds, zeta};

fn main() -> xcsbm::Result<()> {
    println!("{:>5} {:>10} {:>12}", "K", "floor", "bayes error");
    for k in [0.0, 0.5, 1.0, 2.0, 3.0, 4.0] {
        println!("{k:>5} {:>10.5} {:>12.5}", misclassification_floor(k)?, bayes_error_rate(k)?);
    }

    println!("\nzeta(x, 1):");
    for x in [0.01, 0.1, 0.5, 1.0, 2.0] {
        println!("  x={x:<5} {:.6}", zeta(x, 1.0)?);
    }

    let (n, sigma) = (400, 0.5);
    for (p, q) in [(0.2, 0.02), (0.5, 0.1)] {
        let t = thresholds(n, p, q, sigma, 0.0)?;
        println!("\nthresholds n={n} p={p} q={q} sigma={sigma}");
        for (regime, gamma, k) in t.rows() {
            let loss = predicted_loss(regime, 1.0, 2.0 * gamma, sigma, p, q, n);
            println!(
                "  {:<9} gamma={gamma:.3} K={k:.3}  predicted loss at 2x threshold in [{:.3e}, {:.3e}]",
                regime.as_str(),
                loss.lower,
                loss.upper
            );
        }
    }
    Ok(())
}
