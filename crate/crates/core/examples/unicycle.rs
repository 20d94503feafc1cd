//! Steps a unicycle by hand with the controller and prints a coarse trace
//! of one rollout, then the batch summary of the bundled scenario.

use std::path::Path;

use visual_homing::dynamics::{unicycle_step, UnicycleController};
use visual_homing::sim::{run_batch, InitialState, Scenario};

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/triangle_unicycle_2d.json");
    let scn = Scenario::load(&path).unwrap();
    let InitialState::Unicycle(mut s) = scn.initial_states[0].clone() else {
        unreachable!("unicycle scenario")
    };
    let mut controller = UnicycleController::new(scn.gains, scn.dt);
    println!("{:>6} {:>9} {:>9} {:>8} {:>8} {:>8}", "t", "x0", "x1", "theta", "v", "omega");
    for n in 0..=6000 {
        let (cmd, _) = controller.command(&s, scn.field());
        if n % 500 == 0 {
            println!(
                "{:>6.1} {:>9.4} {:>9.4} {:>8.4} {:>8.4} {:>8.4}",
                n as f64 * scn.dt,
                s.x[0],
                s.x[1],
                s.theta,
                cmd.v,
                cmd.omega
            );
        }
        s = unicycle_step(&s, &cmd, scn.dt);
    }

    let summaries = run_batch(&scn).unwrap();
    let ok = summaries.iter().filter(|s| s.converged && s.violation_intervals.is_empty()).count();
    println!("{ok}/{} rollouts converged without leaving the field of view", summaries.len());
}
