//! Evaluates the tangential, normal and combined fields at a few points
//! around the home position.

use std::f64::consts::FRAC_PI_2;

use visual_homing::fields::{HomeSpec, NavigationField};
use visual_homing::geometry::LandmarkSet;
use visual_homing::vector;

fn main() {
    let p = LandmarkSet::from_rows(&[vec![0.0, 4.0], vec![2.0, 5.0], vec![4.0, 4.0]]).unwrap();
    let home = HomeSpec::from_home_position(&p, &vector(&[2.0, 1.0]), FRAC_PI_2).unwrap();
    println!(
        "v* = {:?}, widest desired angle {:.4} rad, epsilon bound {:.4}",
        home.v_star().as_slice(),
        home.max_desired_angle(),
        home.epsilon_bound()
    );
    let field = NavigationField::with_default_epsilon(p, home).unwrap();
    println!("epsilon = {:.4}", field.bump().epsilon());
    println!(
        "{:>14} {:>22} {:>22} {:>6} {:>6} {:>9} {:>6} {:>8}",
        "x", "f_t", "f_n", "g_t", "g_n", "delta", "pair", "margin"
    );
    for x in [[2.0, 1.0], [2.0, -1.0], [3.0, 1.0], [0.0, 0.0], [2.0, 3.0], [2.0, 4.2], [0.0, 4.0]] {
        let s = field.sample(&vector(&x));
        if !s.is_defined() {
            println!("{:>14} undefined (focus or median)", format!("{x:?}"));
            continue;
        }
        let pair = s.pair.unwrap();
        println!(
            "{:>14} {:>22} {:>22} {:>6.3} {:>6.3} {:>9.5} {:>6} {:>8.4}",
            format!("{x:?}"),
            format!("[{:.3}, {:.3}]", s.f_t[0], s.f_t[1]),
            format!("[{:.3}, {:.3}]", s.f_n[0], s.f_n[1]),
            s.g_t,
            s.g_n,
            pair.delta,
            format!("{},{}", pair.i, pair.j),
            s.fov_margin.unwrap()
        );
        assert!(s.f_t.dot(&s.f_n).abs() < 1e-10);
    }
}
