//! Traces isonormal curves (points where the normalized bearing sum equals
//! a fixed direction) across confocal k-ellipsoids of a four-landmark set,
//! and checks each sample against a direct Gauss-map inversion.
//!
//!     cargo run --example isonormal_curves

use std::f64::consts::PI;

use visual_homing::geometry::{
    focus_direction_set_contains, gauss_map_inverse, min_theta, trace_isonormal, LandmarkSet, UnitVector,
};
use visual_homing::vector;

fn main() {
    let p = LandmarkSet::from_rows(&[vec![0.0, 0.0], vec![3.0, 0.5], vec![1.0, 3.0], vec![-1.5, 2.0]]).unwrap();
    let r_min = min_theta(&p);
    println!("min theta {r_min:.6}");

    for n in 0..8 {
        let a = 2.0 * PI * n as f64 / 8.0;
        let v0 = UnitVector::new(vector(&[a.cos(), a.sin()])).unwrap();
        let through: Vec<usize> = (0..p.len()).filter(|&i| focus_direction_set_contains(&p, i, &v0)).collect();
        let curve = trace_isonormal(&p, &v0, 1.001 * r_min, 4.0 * r_min, 0.05 * r_min).unwrap();
        let worst = curve
            .samples
            .iter()
            .map(|s| s.residual.theta.max(s.residual.direction))
            .fold(0.0, f64::max);
        let last = curve.samples.last().unwrap();
        let direct = gauss_map_inverse(&p, &v0, last.r).unwrap();
        println!(
            "angle {:>5.1} deg: {:>3} samples, worst residual {worst:.1e}, passes foci {through:?}, \
             end {:?} (direct solve differs by {:.1e})",
            a.to_degrees(),
            curve.samples.len(),
            [last.point[0], last.point[1]],
            (&direct - &last.point).norm()
        );
    }
}
