//! Sweeps over `K = |mu - nu| / sigma`, the verification suite, and file I/O.

pub mod config;
pub mod io;
pub mod sweep;
pub mod verify;

pub use config::{parse_arch, Arch, KGrid, Protocol, SweepConfig};
pub use io::{load_graph_dataset, write_instance};
pub use sweep::{crossing_k, mean_curves, run_sweep, run_sweep_rows, write_sweep_csv, CurvePoint, SweepRow, CSV_HEADER};
pub use verify::{verify_suite, CheckResult, Report, Scale};
