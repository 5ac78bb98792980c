use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use xcsbm::experiment::sweep::{threshold_path, write_thresholds};
use xcsbm::experiment::{load_graph_dataset, parse_arch, run_sweep, verify_suite, write_instance, Scale, SweepConfig};
use xcsbm::rng::trial_seed;
use xcsbm::synthdata::{sample_xor_csbm, CsbmParams};
use xcsbm::theory::thresholds;
use xcsbm::train::{init_network, train};

#[derive(Parser)]
#[command(version, about = "XOR-CSBM experiments: sampling, sweeps, training and verification")]
struct Cli {
    /// JSON sweep configuration; omitted fields take their defaults
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the effective configuration as JSON and exit
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    cmd: Option<Cmd>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample one instance and write edges, features, labels and signs into --out (a directory)
    Gen {
        #[arg(long, default_value_t = 2.0)]
        k: f64,
    },
    /// Run the configured sweep and write the CSV plus threshold files
    Sweep,
    /// Run the verification suite; exits nonzero if a check fails
    Verify {
        #[arg(long, value_enum, default_value_t = ScaleArg::Quick)]
        scale: ScaleArg,
    },
    /// Train one architecture once and print the result as JSON
    Train {
        #[arg(long, default_value = "2L-01")]
        arch: String,
        #[arg(long, default_value_t = 2.0)]
        k: f64,
        /// External graph: edge list, features CSV and labels (all three required together)
        #[arg(long, requires_all = ["features", "labels"])]
        edges: Option<PathBuf>,
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Print the threshold set for every configured (p, q)
    Thresholds,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Quick,
    Full,
}

fn run(cli: Cli) -> xcsbm::Result<bool> {
    let mut cfg = match &cli.config {
        Some(path) => SweepConfig::load(path)?,
        None => SweepConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let (Some(out), Some(Cmd::Sweep)) = (&cli.out, &cli.cmd) {
        cfg.out = out.clone();
    }
    if cli.print_config {
        println!("{}", cfg.to_json());
        return Ok(true);
    }
    let Some(cmd) = cli.cmd else {
        eprintln!("no subcommand given; see --help");
        return Ok(false);
    };
    match cmd {
        Cmd::Gen { k } => {
            let (p, q) = cfg.pq[0];
            let params = CsbmParams::with_separation(cfg.n, cfg.d, k * cfg.sigma, cfg.sigma, p, q)?;
            let (ds, g) = sample_xor_csbm(&params, cfg.seed)?;
            let dir = cli.out.unwrap_or_else(|| PathBuf::from("instance"));
            for path in write_instance(&dir, &ds, &g)? {
                println!("{}", path.display());
            }
        }
        Cmd::Sweep => {
            let (rows, paths) = run_sweep(&cfg, cli.jobs)?;
            eprintln!("{} rows", rows.len());
            for path in paths {
                println!("{}", path.display());
            }
        }
        Cmd::Verify { scale } => {
            let scale = match scale {
                ScaleArg::Quick => Scale::Quick,
                ScaleArg::Full => Scale::Full,
            };
            let report = verify_suite(scale, cfg.seed);
            println!("{report}");
            if let Some(out) = cli.out {
                let json = serde_json::to_string_pretty(&report).expect("report serializes");
                std::fs::write(&out, json).map_err(|e| xcsbm::Error::Io { path: out.display().to_string(), source: e })?;
            }
            return Ok(report.passed());
        }
        Cmd::Train { arch, k, edges, features, labels } => {
            let arch = parse_arch(&arch)?;
            let (ds, g) = match (edges, features, labels) {
                (Some(e), Some(f), Some(l)) => load_graph_dataset(&e, &f, &l)?,
                _ => {
                    let (p, q) = cfg.pq[0];
                    let params = CsbmParams::with_separation(cfg.n, cfg.d, k * cfg.sigma, cfg.sigma, p, q)?;
                    sample_xor_csbm(&params, cfg.seed)?
                }
            };
            let seed = trial_seed(cfg.seed, 0, 0);
            let net = init_network(ds.d(), &arch.plan, &cfg.train, seed)?;
            let (net, result) = train(&net, &ds, Some(&g), &arch.plan, &cfg.train, seed)?;
            println!("{}", serde_json::to_string_pretty(&result).expect("result serializes"));
            if let Some(out) = cli.out {
                net.save(&out)?;
                eprintln!("checkpoint written to {}", out.display());
            }
        }
        Cmd::Thresholds => {
            for &(p, q) in &cfg.pq {
                let set = thresholds(cfg.n, p, q, cfg.sigma, cfg.threshold_epsilon)?;
                println!("# n={} p={p} q={q} sigma={}", cfg.n, cfg.sigma);
                println!("regime,gamma,K");
                for (regime, gamma, k) in set.rows() {
                    println!("{},{gamma},{k}", regime.as_str());
                }
                if let Some(out) = &cli.out {
                    let path = threshold_path(out, p, q);
                    write_thresholds(&path, cfg.n, p, q, cfg.sigma, cfg.threshold_epsilon)?;
                    eprintln!("wrote {}", path.display());
                }
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
