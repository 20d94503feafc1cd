//! Numerical look at the two Lyapunov functions: the bearing-sum level
//! ϑ along the flow of v, and V = ½‖v − v*‖² along the flow of f_t.

use std::f64::consts::FRAC_PI_2;

use visual_homing::fields::{tangential_field, v_field, HomeSpec};
use visual_homing::geometry::{geometric_median, theta_dist, LandmarkSet};
use visual_homing::{vector, Vector};

fn rk4(x: &Vector, h: f64, f: impl Fn(&Vector) -> Vector) -> Vector {
    let k1 = f(x);
    let k2 = f(&(x + &k1 * (h / 2.0)));
    let k3 = f(&(x + &k2 * (h / 2.0)));
    let k4 = f(&(x + &k3 * h));
    x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

fn main() {
    let p = LandmarkSet::from_rows(&[vec![0.0, 0.0], vec![4.0, 0.0], vec![1.0, 3.0]]).unwrap();
    let median = geometric_median(&p).point();

    // ẋ = v(x) descends ϑ at unit rate until it reaches the median.
    let dt = 1e-3;
    let mut x = vector(&[6.0, 5.0]);
    let mut t = 0.0;
    let mut worst_rise = f64::NEG_INFINITY;
    while (&x - &median).norm() > 2.0 * dt {
        let next = rk4(&x, dt, |y| v_field(y, &p).map_or(Vector::zeros(2), |v| v.into_vector()));
        worst_rise = worst_rise.max(theta_dist(&next, &p) - theta_dist(&x, &p));
        x = next;
        t += dt;
    }
    println!("flow of v reached the median after {t:.3} s; largest step change in theta {worst_rise:.3e}");

    // ẋ = f_t(x) drives v toward v*.
    let home = HomeSpec::from_home_position(&p, &vector(&[2.0, -3.0]), FRAC_PI_2 + 0.9).unwrap();
    let v_star = home.v_star().as_vector().clone();
    let lyap = |y: &Vector| 0.5 * (v_field(y, &p).unwrap().into_vector() - &v_star).norm_squared();
    let mut x = vector(&[-2.0, -1.0]);
    let dt = 1e-2;
    let v0 = lyap(&x);
    let mut monotone = true;
    let mut n = 0;
    while lyap(&x) > 1e-6 && n < 20_000 {
        let next = rk4(&x, dt, |y| tangential_field(y, &p, &home).unwrap());
        monotone &= lyap(&next) <= lyap(&x) + 1e-12;
        x = next;
        n += 1;
    }
    println!(
        "flow of f_t: V went from {v0:.3e} to {:.3e} in {:.2} s, monotone: {monotone}",
        lyap(&x),
        n as f64 * dt
    );
}
