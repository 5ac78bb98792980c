//! The explicit Bayes-optimal networks: convolution placement after the first
//! layer does not change the logits, and the closed form agrees with forward.

use xcsbm::graphops::{normalize, NormMode};
use xcsbm::network::{ansatz_sign, build_ansatz, closed_form_logits, forward, max_relative_diff, PlacementPlan};
use xcsbm::synthdata::{sample_xor_csbm, CsbmParams};
use xcsbm::train::score;

fn main() -> xcsbm::Result<()> {
    let (p, q) = (0.05, 0.3);
    let params = CsbmParams::with_separation(300, 4, 1.0, 1.0, p, q)?;
    let (ds, g) = sample_xor_csbm(&params, 11)?;
    let op = normalize(&g, NormMode::Row)?;
    let labels = ds.labels_f64();
    let all: Vec<usize> = (0..ds.n()).collect();

    for total in [0usize, 1, 2] {
        let plans: Vec<Vec<usize>> = match total {
            0 => vec![vec![0, 0, 0]],
            1 => vec![vec![0, 1, 0], vec![0, 0, 1]],
            _ => vec![vec![0, 2, 0], vec![0, 1, 1], vec![0, 0, 2]],
        };
        let net = build_ansatz(3, 1.0, &params.mu, &params.nu, ansatz_sign(p, q, total))?;
        let reference = forward(&net, Some(&op), ds.x.view(), &PlacementPlan::new(plans[0].clone()))?;
        for k in plans {
            let plan = PlacementPlan::new(k);
            let f = forward(&net, Some(&op), ds.x.view(), &plan)?;
            let (acc, loss) = score(f.view(), labels.view(), &all)?;
            print!("{}: accuracy {acc:.3}, loss {loss:.4}, diff vs first {:.1e}", plan.label(), max_relative_diff(reference.view(), f.view()));
            if total > 0 {
                let cf = closed_form_logits(ds.x.view(), &g, total, 1.0, p, q, &params.mu, &params.nu)?;
                print!(", diff vs closed form {:.1e}", max_relative_diff(cf.view(), f.view()));
            }
            println!();
        }
    }
    Ok(())
}
