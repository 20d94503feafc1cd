//! The double integrator in three dimensions; logs one trajectory to CSV.
//!
//!     cargo run --example double_integrator_3d -- [out.csv]

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use visual_homing::sim::{run_rollout, Scenario};

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/triangle_double_integrator_3d.json");
    let scn = Scenario::load(&path).unwrap();
    for (i, s) in scn.initial_states.iter().enumerate() {
        let (log, summary) = run_rollout(&scn, s).unwrap();
        println!(
            "{i}: {} records, converged {} at {:?} s, min margin {:.3}",
            log.records.len(),
            summary.converged,
            summary.t_converge,
            summary.min_fov_margin
        );
        if i == 0 {
            let out = std::env::args().nth(1).unwrap_or_else(|| "trajectory_3d.csv".into());
            log.write_csv(BufWriter::new(File::create(&out).unwrap())).unwrap();
            println!("   wrote {out}");
        }
    }
}
