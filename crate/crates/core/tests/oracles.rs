//! Library results against brute-force references.

mod common;

use std::f64::consts::PI;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use visual_homing::fields::{select_pair, HomeSpec};
use visual_homing::geometry::{focus_bearing_sum, focus_direction_set_contains, geometric_median, UnitVector};

#[test]
fn median_matches_coarse_grid_search() {
    const N: usize = 401;
    let mut rng = ChaCha8Rng::seed_from_u64(70);
    for trial in 0..10 {
        let foci = random_foci(&mut rng, 2, 3 + trial % 3, 4.0, 0.5);
        let m = geometric_median(&landmarks(&foci)).point();
        let m = [m[0], m[1]];
        let mut best = (f64::INFINITY, [0.0, 0.0]);
        for i in 0..N {
            for j in 0..N {
                let x = [-4.0 + 8.0 * i as f64 / (N - 1) as f64, -4.0 + 8.0 * j as f64 / (N - 1) as f64];
                let t = theta(&x, &foci);
                if t < best.0 {
                    best = (t, x);
                }
            }
        }
        assert!(theta(&m, &foci) <= best.0 + 1e-12, "trial {trial}");
        assert!(norm(&sub(&m, &best.1)) < 0.1, "trial {trial}: {m:?} vs {:?}", best.1);
    }
}

/// Just off focus `i` the bearing sum is `s + w` for a unit `w`. `v0` is
/// attained iff `v0 × (s + w(α))` changes sign at some `α` where
/// `v0 · (s + w) > 0`. `None` near tangency, where sampling is unreliable.
fn sampled_membership(s: &[f64], v0: &[f64], samples: usize) -> Option<bool> {
    let z = |a: f64| [s[0] + a.cos(), s[1] + a.sin()];
    let cross = |a: f64| v0[0] * z(a)[1] - v0[1] * z(a)[0];
    let mut found = false;
    for n in 0..samples {
        let (a0, a1) = (2.0 * PI * n as f64 / samples as f64, 2.0 * PI * (n + 1) as f64 / samples as f64);
        let (c0, c1) = (cross(a0), cross(a1));
        if c0.abs() < 1e-7 || c1.abs() < 1e-7 {
            return None;
        }
        if c0.signum() != c1.signum() {
            let a = a0 + (a1 - a0) * c0 / (c0 - c1);
            let along = dot(v0, &z(a));
            if along.abs() < 1e-6 {
                return None;
            }
            found |= along > 0.0;
        }
    }
    Some(found)
}

#[test]
fn focus_direction_sets_match_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let mut checked = [0usize; 2];
    for _ in 0..30 {
        let foci = random_foci(&mut rng, 2, 4, 3.0, 0.5);
        let p = landmarks(&foci);
        for i in 0..foci.len() {
            let s: Vec<f64> = focus_bearing_sum(&p, i).iter().copied().collect();
            for _ in 0..20 {
                let a: f64 = rng.gen_range(0.0..2.0 * PI);
                let v0 = [a.cos(), a.sin()];
                let Some(inside) = sampled_membership(&s, &v0, 4096) else {
                    continue;
                };
                let v0 = UnitVector::new(vector(&v0)).unwrap();
                assert_eq!(focus_direction_set_contains(&p, i, &v0), inside, "focus {i} of {foci:?}, v0 {v0:?}");
                checked[usize::from(inside)] += 1;
            }
        }
    }
    assert!(checked[0] > 200 && checked[1] > 200, "{checked:?}");
}

#[test]
fn pair_selection_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(72);
    for trial in 0..200 {
        let d = 2 + trial % 2;
        let foci = random_foci(&mut rng, d, 3 + trial % 3, 3.0, 0.5);
        let p = landmarks(&foci);
        let home_pt = random_point(&mut rng, d, 6.0);
        let Ok(home) = HomeSpec::from_home_position(&p, &vector(&home_pt), PI - 1e-3) else {
            continue;
        };
        let x = random_point(&mut rng, d, 6.0);
        if min_focus_distance(&x, &foci) < 1e-3 {
            continue;
        }
        let u: Vec<Vec<f64>> = foci.iter().map(|f| unit(&sub(f, &x))).collect();
        let us: Vec<Vec<f64>> = foci.iter().map(|f| unit(&sub(f, &home_pt))).collect();
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..foci.len() {
            for j in i + 1..foci.len() {
                let angle = dot(&us[i], &us[j]).clamp(-1.0, 1.0).acos();
                if angle <= 1e-9 {
                    continue;
                }
                let delta = dot(&u[i], &u[j]) - dot(&us[i], &us[j]);
                if best.is_none_or(|b| delta < b.2) {
                    best = Some((i, j, delta));
                }
            }
        }
        let (bi, bj, bd) = best.unwrap();
        let got = select_pair(&vector(&x), &p, &home).unwrap();
        assert_eq!((got.i, got.j), (bi, bj), "trial {trial}");
        assert!((got.delta - bd).abs() < 1e-12);
    }
}
