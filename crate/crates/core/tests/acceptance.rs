//! One line per acceptance criterion; exits non-zero if any criterion fails.

use diamond_cqm::acceptance::run_all;

fn main() {
    let results = run_all(true);
    for r in &results {
        println!("{}", r.line());
    }
    let failed: Vec<u8> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    println!("{}/{} criteria passed", results.len() - failed.len(), results.len());
    if results.len() != 10 || !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
