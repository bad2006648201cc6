//! Runs the built-in invariant suite, the same checks as `mlrh selftest`.

fn main() {
    let results = mlrh::selftest::run();
    for r in &results {
        println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    let passed = results.iter().filter(|r| r.passed).count();
    println!("{passed}/{} invariants passed", results.len());
}
