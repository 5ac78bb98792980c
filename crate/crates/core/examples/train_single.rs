//! Train one network on one XOR-CSBM instance, then save and reload it.
//!
//! cargo run --release --example train_single -- [arch] [K]

use xcsbm::experiment::parse_arch;
use xcsbm::network::Network;
use xcsbm::synthdata::{sample_xor_csbm, CsbmParams};
use xcsbm::train::{evaluate, init_network, split_nodes, train, TrainConfig};

fn main() -> xcsbm::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arch = parse_arch(args.first().map(String::as_str).unwrap_or("2L-01"))?;
    let k: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(2.0);
    let sigma = 0.5;
    let params = CsbmParams::with_separation(400, 4, k * sigma, sigma, 0.2, 0.02)?;
    let (ds, g) = sample_xor_csbm(&params, 1)?;

    let cfg = TrainConfig { record_history: true, ..TrainConfig::default() };
    let net = init_network(ds.d(), &arch.plan, &cfg, 1)?;
    let (trained, result) = train(&net, &ds, Some(&g), &arch.plan, &cfg, 1)?;
    for (epoch, loss) in result.history.iter().enumerate().step_by(100) {
        println!("epoch {epoch:>4}  train loss {loss:.4}");
    }
    println!(
        "{} at K={k}: train acc {:.3}, test acc {:.3}, test loss {:.4}",
        result.arch, result.train_acc, result.test_acc, result.test_loss
    );

    let path = std::env::temp_dir().join("xcsbm-train-single.txt");
    trained.save(&path)?;
    let reloaded = Network::load(&path)?;
    let (_, test) = split_nodes(ds.n(), cfg.train_fraction, 1)?;
    let (acc, _) = evaluate(&reloaded, &ds, Some(&g), &arch.plan, &test)?;
    println!("checkpoint {} reloaded, test acc {acc:.3}", path.display());
    Ok(())
}
