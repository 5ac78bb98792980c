//! Run the quick verification suite and print the report.

use xcsbm::experiment::{verify_suite, Scale};

fn main() {
    let report = verify_suite(Scale::Quick, 0);
    println!("{report}");
    if !report.passed() {
        std::process::exit(1);
    }
}
