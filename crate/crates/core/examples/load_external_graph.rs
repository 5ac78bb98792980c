//! Write an instance to disk in the external-graph layout, load it back, and
//! compare networks with different convolution placements on it.

use xcsbm::experiment::{load_graph_dataset, parse_arch, write_instance};
use xcsbm::synthdata::{sample_xor_csbm, CsbmParams};
use xcsbm::train::{init_network, train, TrainConfig};

fn main() -> xcsbm::Result<()> {
    let dir = std::env::temp_dir().join("xcsbm-external");
    let params = CsbmParams::with_separation(300, 4, 1.0, 0.5, 0.2, 0.02)?;
    let (ds, g) = sample_xor_csbm(&params, 5)?;
    let paths = write_instance(&dir, &ds, &g)?;

    let (ds, g) = load_graph_dataset(&paths[0], &paths[1], &paths[2])?;
    println!("loaded {} nodes, {} features, {} edges", ds.n(), ds.d(), g.edge_count());

    let cfg = TrainConfig { epochs: 300, dropout: 0.5, ..TrainConfig::default() };
    for label in ["MLP2", "2L-10", "2L-01", "3L-011"] {
        let arch = parse_arch(label)?;
        let net = init_network(ds.d(), &arch.plan, &cfg, 0)?;
        let (_, res) = train(&net, &ds, Some(&g), &arch.plan, &cfg, 0)?;
        println!("{label:<7} test acc {:.3}", res.test_acc);
    }
    Ok(())
}
