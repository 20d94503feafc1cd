//! Independent reference math for the integration and acceptance tests.
//! Plain slices only, no library types, so a bug in the library cannot
//! leak into its own oracle.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use visual_homing::geometry::LandmarkSet;
use visual_homing::Vector;

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|c| c * c).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn unit(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    a.iter().map(|c| c / n).collect()
}

/// Sum of distances to the foci.
pub fn theta(x: &[f64], foci: &[Vec<f64>]) -> f64 {
    foci.iter().map(|p| norm(&sub(x, p))).sum()
}

/// Sum of unit vectors from `x` toward each focus.
pub fn bearing_sum(x: &[f64], foci: &[Vec<f64>]) -> Vec<f64> {
    let mut s = vec![0.0; x.len()];
    for p in foci {
        let u = unit(&sub(p, x));
        for (a, b) in s.iter_mut().zip(&u) {
            *a += b;
        }
    }
    s
}

pub fn min_focus_distance(x: &[f64], foci: &[Vec<f64>]) -> f64 {
    foci.iter().map(|p| norm(&sub(x, p))).fold(f64::INFINITY, f64::min)
}

pub fn random_point(rng: &mut ChaCha8Rng, d: usize, half_width: f64) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(-half_width..half_width)).collect()
}

/// `k` foci in `[-h, h]^d`, pairwise at least `sep` apart.
pub fn random_foci(rng: &mut ChaCha8Rng, d: usize, k: usize, h: f64, sep: f64) -> Vec<Vec<f64>> {
    loop {
        let foci: Vec<Vec<f64>> = (0..k).map(|_| random_point(rng, d, h)).collect();
        let ok = (0..k).all(|i| (i + 1..k).all(|j| norm(&sub(&foci[i], &foci[j])) >= sep));
        if ok {
            return foci;
        }
    }
}

pub fn landmarks(foci: &[Vec<f64>]) -> LandmarkSet {
    LandmarkSet::from_rows(foci).expect("valid landmark set")
}

pub fn vector(a: &[f64]) -> Vector {
    Vector::from_column_slice(a)
}

/// Central-difference Jacobian of `f: R^d -> R^m`, columns by input axis.
pub fn fd_jacobian(f: impl Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let d = x.len();
    let m = f(x).len();
    let mut jac = vec![vec![0.0; d]; m];
    for c in 0..d {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[c] += h;
        xm[c] -= h;
        let (fp, fm) = (f(&xp), f(&xm));
        for r in 0..m {
            jac[r][c] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    jac
}

/// Frobenius norm of `a − b` relative to `‖b‖`.
pub fn rel_frobenius(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let mut diff = 0.0;
    let mut base = 0.0;
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            diff += (x - y) * (x - y);
            base += y * y;
        }
    }
    (diff / base.max(1e-300)).sqrt()
}

pub fn matrix_rows(m: &visual_homing::Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect()).collect()
}
