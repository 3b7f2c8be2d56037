//! Run-to-run noise check for the benchmark harness.
//!
//! Timing-sensitive by nature, so it is ignored by default and meant for a
//! quiet machine: `cargo test --release --test bench_stability -- --ignored`.

use clhash::bench::{bench_run, SchemeRegistry};

#[test]
#[ignore = "timing-sensitive; run manually on a quiet machine"]
fn repeated_runs_agree_within_fifteen_percent() {
    let registry = SchemeRegistry::with_builtins(0x5AB1);
    let schemes = vec!["clhash".to_string()];
    let run = || {
        bench_run(&registry, &schemes, &[4096], 0x5AB1).unwrap()[0].ns_per_byte
    };
    let first = run();
    let second = run();
    let spread = (first - second).abs() / first.min(second);
    assert!(
        spread < 0.15,
        "ns/byte drifted {:.1}% between identical runs ({first:.4} vs {second:.4})",
        spread * 100.0
    );
}

#[test]
fn portable_multiplier_completes_the_default_sweep_shape() {
    // the portable path must run the same sweep; one point keeps it quick
    let registry = SchemeRegistry::with_builtins(0x5AB2);
    let schemes = vec!["clhash-portable".to_string()];
    let results = bench_run(&registry, &schemes, &[4096], 0x5AB2).unwrap();
    assert_eq!(results.len(), 1);
    assert!(results[0].ns_per_byte > 0.0);
}
