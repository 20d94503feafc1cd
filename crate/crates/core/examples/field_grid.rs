//! Dumps the navigation field of the bundled 2-D scenario on a grid, the
//! same CSV the `field` subcommand writes.
//!
//!     cargo run --example field_grid -- [out.csv]

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use visual_homing::sim::{sample_field_grid, GridBounds, Scenario};

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/triangle_double_integrator_2d.json");
    let scn = Scenario::load(&path).unwrap();
    let bounds = GridBounds::new(-3.0, 7.0, -4.0, 7.0).unwrap();
    let grid = sample_field_grid(&scn, bounds, 51).unwrap();

    let undefined = grid.cells.iter().filter(|c| !c.sample.is_defined()).count();
    let outside = grid
        .cells
        .iter()
        .filter(|c| c.sample.fov_margin.is_some_and(|m| m < 0.0))
        .count();
    let strongest = grid.cells.iter().map(|c| c.sample.f.norm()).fold(0.0, f64::max);
    println!(
        "{} cells, {undefined} undefined, {outside} inside an obstacle set, max |f| = {strongest:.4}",
        grid.cells.len()
    );

    let out = std::env::args().nth(1).unwrap_or_else(|| "field_grid.csv".into());
    grid.write_csv(BufWriter::new(File::create(&out).unwrap())).unwrap();
    println!("wrote {out}");
}
