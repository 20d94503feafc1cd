//! Rolls out the damped double integrator from every start of the bundled
//! 2-D scenario and prints the summaries.

use std::path::Path;

use visual_homing::sim::{run_batch, Scenario};

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/triangle_double_integrator_2d.json");
    let scn = Scenario::load(&path).unwrap();
    for (s, summary) in scn.initial_states.iter().zip(run_batch(&scn).unwrap()) {
        println!(
            "start {:?}: converged {} at {:?} s, min fov margin {:.3} rad, {} violations, final error {:.2e} m",
            s.position().as_slice(),
            summary.converged,
            summary.t_converge,
            summary.min_fov_margin,
            summary.violation_intervals.len(),
            summary.final_position_error
        );
    }
}
