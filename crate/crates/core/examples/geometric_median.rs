//! Geometric median of a few landmark layouts, including the degenerate
//! collinear cases.

use visual_homing::geometry::{geometric_median, min_theta, theta_dist, LandmarkSet, MedianResult};

fn show(name: &str, rows: &[Vec<f64>]) {
    let p = LandmarkSet::from_rows(rows).expect("valid landmarks");
    let median = geometric_median(&p);
    match &median {
        MedianResult::UniquePoint(m) => println!("{name:>22}: point {:?}", m.as_slice()),
        MedianResult::Segment(a, b) => {
            println!("{name:>22}: segment {:?} .. {:?}", a.as_slice(), b.as_slice())
        }
    }
    println!("{:>22}  min theta = {:.12}", "", min_theta(&p));
    println!("{:>22}  theta(centroid) = {:.12}", "", theta_dist(&p.centroid(), &p));
}

fn main() {
    let h = 3f64.sqrt();
    show("equilateral", &[vec![-1.0, 0.0], vec![1.0, 0.0], vec![0.0, h]]);
    show("obtuse (focus wins)", &[vec![0.0, 4.0], vec![2.0, 5.0], vec![4.0, 4.0]]);
    show("four, general", &[vec![0.0, 0.0], vec![3.0, 0.5], vec![1.0, 3.0], vec![-1.5, 2.0]]);
    show("collinear, k = 3", &[vec![0.0, 0.0], vec![1.0, 1.0], vec![5.0, 5.0]]);
    show("collinear, k = 4", &[vec![0.0, 0.0], vec![1.0, 0.0], vec![3.0, 0.0], vec![7.0, 0.0]]);
    show(
        "tetrahedron (3-D)",
        &[
            vec![1.0, 1.0, 1.0],
            vec![1.0, -1.0, -1.0],
            vec![-1.0, 1.0, -1.0],
            vec![-1.0, -1.0, 1.0],
        ],
    );
}
