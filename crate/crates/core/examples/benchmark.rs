//! Shortest A* against privacy-aware selection on seeded synthetic worlds.
//!
//! `cargo run --example benchmark -- [worlds] [base_seed]`

use std::time::Instant;

use panav::pipeline::{run_benchmark, synthetic_suite, write_csv, Method};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let worlds: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);

    let t = Instant::now();
    let rows = run_benchmark(&synthetic_suite(worlds, seed), None)?;
    write_csv(&rows, std::io::stdout().lock())?;

    let mut wins = 0;
    for pair in rows.chunks(2) {
        let (ours, base) = (&pair[0], &pair[1]);
        assert_eq!((ours.method, base.method), (Method::PrivacyAware, Method::ShortestAstar));
        if let (Some(r0), Some(r1), Some(d0), Some(d1)) = (ours.p_risk, base.p_risk, ours.cell_distance, base.cell_distance) {
            if r0 < r1 && d0 > d1 {
                wins += 1;
            }
        }
    }
    eprintln!(
        "{wins}/{worlds} worlds: lower risk and longer route than shortest A* ({:.1} s)",
        t.elapsed().as_secs_f64()
    );
    Ok(())
}
