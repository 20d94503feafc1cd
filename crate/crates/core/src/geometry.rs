//! Landmark-relative geometry.
//!
//! Everything here is a pure function of a [`LandmarkSet`] and query points:
//! bearings, the distance sum `ϑ(x) = Σ‖x − pᵢ‖` with its gradient and
//! Hessian, the geometric median, k-ellipsoid membership and the isonormal
//! curves `{x : v(x) = v0}` where `v` is the normalized bearing sum.

use std::ops::Deref;

use crate::{HomingError, Matrix, Point, Result, Vector};

/// Distance below which two points are considered coincident (meters).
pub const COINCIDENCE_TOL: f64 = 1e-9;

/// Allowed deviation of a [`UnitVector`] norm from one.
pub const UNIT_TOL: f64 = 1e-12;

/// Relative singular value threshold for the collinearity test.
pub const COLLINEAR_TOL: f64 = 1e-9;

const MEDIAN_MAX_ITERS: usize = 10_000;
const MEDIAN_STEP_TOL: f64 = 1e-12;
const NEWTON_MAX_ITERS: usize = 100;
const DRIFT_MAX_ITERS: usize = 8;
const TRACE_MAX_DEPTH: u32 = 14;
/// Residual accepted by the Gauss-map inverse.
pub const GAUSS_MAP_TOL: f64 = 1e-8;

/// A direction in `R^d`, normalized to within [`UNIT_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector(Vector);

impl UnitVector {
    /// Wraps `dir`, refusing anything that is not already unit length.
    pub fn new(dir: Vector) -> Result<Self> {
        let norm = dir.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(HomingError::NotUnit { norm });
        }
        Ok(Self(dir))
    }

    pub fn normalize(v: &Vector) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(HomingError::ZeroVector);
        }
        Ok(Self(v / norm))
    }

    pub fn as_vector(&self) -> &Vector {
        &self.0
    }

    pub fn into_vector(self) -> Vector {
        self.0
    }
}

impl Deref for UnitVector {
    type Target = Vector;

    fn deref(&self) -> &Vector {
        &self.0
    }
}

/// The foci: `k ≥ 2` pairwise distinct points of a common dimension 2 or 3.
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkSet {
    foci: Vec<Point>,
}

impl LandmarkSet {
    pub fn new(foci: Vec<Point>) -> Result<Self> {
        if foci.len() < 2 {
            return Err(HomingError::InvalidLandmarks(format!(
                "need at least 2 landmarks, got {}",
                foci.len()
            )));
        }
        let dim = foci[0].len();
        if dim != 2 && dim != 3 {
            return Err(HomingError::InvalidLandmarks(format!(
                "dimension must be 2 or 3, got {dim}"
            )));
        }
        for (i, p) in foci.iter().enumerate() {
            if p.len() != dim {
                return Err(HomingError::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(HomingError::InvalidLandmarks(format!(
                    "landmark {i} has a non-finite coordinate"
                )));
            }
        }
        for i in 0..foci.len() {
            for j in i + 1..foci.len() {
                let distance = (&foci[i] - &foci[j]).norm();
                if distance <= COINCIDENCE_TOL {
                    return Err(HomingError::InvalidLandmarks(format!(
                        "landmarks {i} and {j} coincide (distance {distance:e})"
                    )));
                }
            }
        }
        Ok(Self { foci })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| Vector::from_column_slice(r)).collect())
    }

    pub fn len(&self) -> usize {
        self.foci.len()
    }

    pub fn is_empty(&self) -> bool {
        self.foci.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.foci[0].len()
    }

    pub fn foci(&self) -> &[Point] {
        &self.foci
    }

    pub fn centroid(&self) -> Point {
        let mut c = Vector::zeros(self.dim());
        for p in &self.foci {
            c += p;
        }
        c / self.len() as f64
    }

    /// Index of the focus within [`COINCIDENCE_TOL`] of `x`, if any.
    pub fn focus_at(&self, x: &Point) -> Option<usize> {
        self.foci
            .iter()
            .position(|p| (p - x).norm() <= COINCIDENCE_TOL)
    }

    /// Largest pairwise distance between foci.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                d = d.max((&self.foci[i] - &self.foci[j]).norm());
            }
        }
        d
    }
}

/// Unit vector pointing from `from` to `to`.
pub fn bearing(from: &Point, to: &Point) -> Result<UnitVector> {
    let diff = to - from;
    let distance = diff.norm();
    if !(distance > COINCIDENCE_TOL) {
        return Err(HomingError::CoincidentPoints { distance });
    }
    Ok(UnitVector(diff / distance))
}

/// `I − v vᵀ / ‖v‖²`, the orthogonal projector onto the complement of `v`.
pub fn projection_matrix(v: &Vector) -> Result<Matrix> {
    let n2 = v.norm_squared();
    if !(n2 > 0.0) || !n2.is_finite() {
        return Err(HomingError::ZeroVector);
    }
    let d = v.len();
    Ok(Matrix::identity(d, d) - v * v.transpose() / n2)
}

/// Sum of distances from `x` to every focus.
pub fn theta_dist(x: &Point, landmarks: &LandmarkSet) -> f64 {
    assert_eq!(x.len(), landmarks.dim(), "query dimension mismatch");
    landmarks.foci().iter().map(|p| (x - p).norm()).sum()
}

/// `Σ u(x, pᵢ)`, the (unnormalized) sum of bearings from `x` to the foci.
pub fn bearing_sum(x: &Point, landmarks: &LandmarkSet) -> Result<Vector> {
    assert_eq!(x.len(), landmarks.dim(), "query dimension mismatch");
    let mut sum = Vector::zeros(x.len());
    for (index, p) in landmarks.foci().iter().enumerate() {
        let diff = p - x;
        let d = diff.norm();
        if d <= COINCIDENCE_TOL {
            return Err(HomingError::AtFocus { index });
        }
        sum += diff / d;
    }
    Ok(sum)
}

/// Gradient of `ϑ`, equal to `−Σ u(x, pᵢ)`.
pub fn theta_gradient(x: &Point, landmarks: &LandmarkSet) -> Result<Vector> {
    Ok(-bearing_sum(x, landmarks)?)
}

/// Hessian of `ϑ`: `Σ P(u(x, pᵢ)) / ‖x − pᵢ‖`.
pub fn theta_hessian(x: &Point, landmarks: &LandmarkSet) -> Result<Matrix> {
    Ok(LocalFrame::at(x, landmarks)?.hessian)
}

/// Value, bearing sum and Hessian of `ϑ` at a point off the foci.
#[derive(Debug, Clone)]
pub(crate) struct LocalFrame {
    pub theta: f64,
    pub sum: Vector,
    pub hessian: Matrix,
}

impl LocalFrame {
    pub fn at(x: &Point, landmarks: &LandmarkSet) -> Result<Self> {
        assert_eq!(x.len(), landmarks.dim(), "query dimension mismatch");
        let d = x.len();
        let mut theta = 0.0;
        let mut sum = Vector::zeros(d);
        let mut hessian = Matrix::zeros(d, d);
        for (index, p) in landmarks.foci().iter().enumerate() {
            let diff = p - x;
            let dist = diff.norm();
            if dist <= COINCIDENCE_TOL {
                return Err(HomingError::AtFocus { index });
            }
            let u = diff / dist;
            theta += dist;
            for r in 0..d {
                hessian[(r, r)] += 1.0 / dist;
                for c in 0..d {
                    hessian[(r, c)] -= u[r] * u[c] / dist;
                }
            }
            sum += u;
        }
        Ok(Self {
            theta,
            sum,
            hessian,
        })
    }

    /// Jacobian of `v = sum/‖sum‖`, i.e. `−P(v) H / ‖sum‖`.
    pub fn direction_jacobian(&self) -> Option<Matrix> {
        let n = self.sum.norm();
        if n <= COINCIDENCE_TOL {
            return None;
        }
        let proj = projection_matrix(&self.sum).ok()?;
        Some(-(proj * &self.hessian) / n)
    }
}

/// Normalized bearing sum `v(x)`; `None` at a focus or where the sum vanishes.
pub fn bearing_sum_direction(x: &Point, landmarks: &LandmarkSet) -> Option<UnitVector> {
    let sum = bearing_sum(x, landmarks).ok()?;
    if sum.norm() <= COINCIDENCE_TOL {
        return None;
    }
    UnitVector::normalize(&sum).ok()
}

/// True when all foci lie on one line, judged by the second singular value
/// of the centered foci matrix relative to the first.
pub fn is_collinear(landmarks: &LandmarkSet) -> bool {
    let (k, d) = (landmarks.len(), landmarks.dim());
    if k == 2 {
        return true;
    }
    let c = landmarks.centroid();
    let m = Matrix::from_fn(k, d, |r, col| landmarks.foci()[r][col] - c[col]);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv.len() < 2 || sv[1] < COLLINEAR_TOL * sv[0]
}

/// Minimizer set of `ϑ`.
#[derive(Debug, Clone, PartialEq)]
pub enum MedianResult {
    UniquePoint(Point),
    /// Even number of collinear foci: every point between the two middle
    /// foci is a minimizer. Endpoints are in lexicographic order.
    Segment(Point, Point),
}

impl MedianResult {
    /// A minimizer of `ϑ`: the point itself, or the segment midpoint.
    pub fn point(&self) -> Point {
        match self {
            MedianResult::UniquePoint(p) => p.clone(),
            MedianResult::Segment(a, b) => (a + b) * 0.5,
        }
    }

    pub fn is_unique(&self) -> bool {
        matches!(self, MedianResult::UniquePoint(_))
    }
}

fn lexicographic_lt(a: &Point, b: &Point) -> bool {
    for (x, y) in a.iter().zip(b.iter()) {
        if x != y {
            return x < y;
        }
    }
    false
}

/// `Σ_{j≠i} u(pᵢ, pⱼ)`: the bearing sum seen from focus `i` excluding itself.
pub fn focus_bearing_sum(landmarks: &LandmarkSet, i: usize) -> Vector {
    let foci = landmarks.foci();
    let mut s = Vector::zeros(landmarks.dim());
    for (j, p) in foci.iter().enumerate() {
        if j != i {
            s += (p - &foci[i]) / (p - &foci[i]).norm();
        }
    }
    s
}

/// Geometric median of the foci.
///
/// Collinear inputs are resolved by ordering the foci along their line. Otherwise
/// foci are first tested against the subgradient optimality condition
/// `‖Σ_{j≠i} u(pᵢ, pⱼ)‖ ≤ 1`; if none qualifies, Weiszfeld iterations run
/// from the centroid and a few Newton steps polish the result.
pub fn geometric_median(landmarks: &LandmarkSet) -> MedianResult {
    let k = landmarks.len();
    let foci = landmarks.foci();

    if is_collinear(landmarks) {
        let c = landmarks.centroid();
        let mut dir = Vector::zeros(landmarks.dim());
        for p in foci {
            let offset = p - &c;
            if offset.norm() > dir.norm() {
                dir = offset;
            }
        }
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| (&foci[a] - &c).dot(&dir).total_cmp(&(&foci[b] - &c).dot(&dir)));
        if k % 2 == 1 {
            return MedianResult::UniquePoint(foci[order[k / 2]].clone());
        }
        let (a, b) = (&foci[order[k / 2 - 1]], &foci[order[k / 2]]);
        return if lexicographic_lt(b, a) {
            MedianResult::Segment(b.clone(), a.clone())
        } else {
            MedianResult::Segment(a.clone(), b.clone())
        };
    }

    for (i, p) in foci.iter().enumerate() {
        if focus_bearing_sum(landmarks, i).norm() <= 1.0 {
            return MedianResult::UniquePoint(p.clone());
        }
    }

    let scale = landmarks.diameter();
    let mut x = landmarks.centroid();
    for _ in 0..MEDIAN_MAX_ITERS {
        if let Some(i) = landmarks.focus_at(&x) {
            // Not optimal (checked above): step off along the descent direction.
            let s = focus_bearing_sum(landmarks, i);
            x = &foci[i] + &s * (1e-6 * scale / s.norm());
            continue;
        }
        let mut num = Vector::zeros(x.len());
        let mut den = 0.0;
        for p in foci {
            let w = 1.0 / (p - &x).norm();
            num += p * w;
            den += w;
        }
        let next = num / den;
        let step = (&next - &x).norm();
        x = next;
        if step < MEDIAN_STEP_TOL {
            break;
        }
    }

    // Weiszfeld is linearly convergent; Newton on ∇ϑ = 0 finishes the job.
    for _ in 0..20 {
        let Ok(frame) = LocalFrame::at(&x, landmarks) else {
            break;
        };
        if frame.sum.norm() <= 1e-14 * k as f64 {
            break;
        }
        let Some(delta) = frame.hessian.clone().lu().solve(&frame.sum) else {
            break;
        };
        let mut alpha = 1.0;
        let mut improved = false;
        while alpha > 1e-6 {
            let trial = &x + &delta * alpha;
            if let Ok(sum) = bearing_sum(&trial, landmarks) {
                if sum.norm() < frame.sum.norm() {
                    x = trial;
                    improved = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !improved {
            break;
        }
    }
    MedianResult::UniquePoint(x)
}

/// Membership in the sublevel set `Q(r) = {x : ϑ(x) ≤ r}`.
pub fn kellipsoid_contains(x: &Point, landmarks: &LandmarkSet, r: f64) -> bool {
    theta_dist(x, landmarks) <= r
}

/// Smallest value of `ϑ`, attained at the geometric median.
pub fn min_theta(landmarks: &LandmarkSet) -> f64 {
    theta_dist(&geometric_median(landmarks).point(), landmarks)
}

/// Orthonormal basis of the complement of `v0`, as columns.
fn complement_basis(v0: &Vector) -> Matrix {
    let d = v0.len();
    let mut basis: Vec<Vector> = Vec::with_capacity(d - 1);
    let mut candidates: Vec<usize> = (0..d).collect();
    candidates.sort_by(|&a, &b| v0[a].abs().total_cmp(&v0[b].abs()));
    for axis in candidates {
        if basis.len() == d - 1 {
            break;
        }
        let mut e = Vector::zeros(d);
        e[axis] = 1.0;
        e -= v0 * v0.dot(&e);
        for b in &basis {
            e -= b * b.dot(&e);
        }
        let n = e.norm();
        if n > 1e-6 {
            basis.push(e / n);
        }
    }
    Matrix::from_columns(&basis)
}

/// Residuals of a candidate isonormal point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsonormalResidual {
    /// `|ϑ(x) − r|`
    pub theta: f64,
    /// `‖v(x) − v0‖`
    pub direction: f64,
}

impl IsonormalResidual {
    fn within(&self, tol: f64) -> bool {
        self.theta <= tol && self.direction <= tol
    }
}

struct IsonormalProblem<'a> {
    landmarks: &'a LandmarkSet,
    v0: &'a UnitVector,
    basis: Matrix,
}

struct NewtonEval {
    residual: Vector,
    jacobian: Matrix,
    report: IsonormalResidual,
}

impl<'a> IsonormalProblem<'a> {
    fn new(landmarks: &'a LandmarkSet, v0: &'a UnitVector) -> Self {
        Self {
            landmarks,
            v0,
            basis: complement_basis(v0),
        }
    }

    /// Residual `[ϑ − r; Bᵀv]` and its Jacobian. `None` where `v` is
    /// undefined or points into the opposite half-space.
    fn eval(&self, x: &Point, r: f64) -> Option<NewtonEval> {
        let frame = LocalFrame::at(x, self.landmarks).ok()?;
        let n = frame.sum.norm();
        if n <= COINCIDENCE_TOL {
            return None;
        }
        let v = &frame.sum / n;
        if v.dot(self.v0) <= 0.0 {
            return None;
        }
        let d = x.len();
        let jv = frame.direction_jacobian()?;
        let mut residual = Vector::zeros(d);
        let mut jacobian = Matrix::zeros(d, d);
        residual[0] = frame.theta - r;
        jacobian.row_mut(0).copy_from(&(-frame.sum.transpose()));
        let tangential = self.basis.transpose() * &v;
        let tangential_jac = self.basis.transpose() * jv;
        for row in 0..d - 1 {
            residual[row + 1] = tangential[row];
            jacobian.row_mut(row + 1).copy_from(&tangential_jac.row(row));
        }
        let report = IsonormalResidual {
            theta: residual[0].abs(),
            direction: (&v - self.v0.as_vector()).norm(),
        };
        Some(NewtonEval {
            residual,
            jacobian,
            report,
        })
    }

    /// Damped Newton on `[ϑ − r; Bᵀv] = 0` starting from `x`.
    fn solve(&self, x: &Point, r: f64, max_iters: usize) -> Result<(Point, IsonormalResidual)> {
        let tight = 1e-13 * r.max(1.0);
        let mut x = x.clone();
        let mut current = self
            .eval(&x, r)
            .ok_or(HomingError::NoConvergence { residual: f64::INFINITY })?;
        for _ in 0..max_iters {
            if current.report.within(tight) {
                break;
            }
            let Some(step) = current.jacobian.clone().lu().solve(&(-&current.residual)) else {
                break;
            };
            let merit = current.residual.norm();
            let mut alpha = 1.0;
            let mut accepted = None;
            while alpha > 1e-12 {
                let trial = &x + &step * alpha;
                if let Some(eval) = self.eval(&trial, r) {
                    if eval.residual.norm() < merit * (1.0 - 1e-4 * alpha) {
                        accepted = Some((trial, eval));
                        break;
                    }
                }
                alpha *= 0.5;
            }
            match accepted {
                Some((trial, eval)) => {
                    x = trial;
                    current = eval;
                }
                None => break,
            }
        }
        if current.report.within(GAUSS_MAP_TOL) {
            Ok((x, current.report))
        } else {
            Err(HomingError::NoConvergence {
                residual: current.report.theta.max(current.report.direction),
            })
        }
    }

    /// `dζ/dr = −H⁻¹v0 / (ηᵀH⁻¹v0)` with `η = Σu`.
    fn tangent(&self, x: &Point, r: f64) -> Result<Vector> {
        let frame = LocalFrame::at(x, self.landmarks)?;
        let eig = frame.hessian.clone().symmetric_eigen();
        let max = eig.eigenvalues.max();
        let min = eig.eigenvalues.min();
        if !(min > 1e-12 * max) {
            return Err(HomingError::SingularHessian { r });
        }
        let hv = frame
            .hessian
            .cholesky()
            .ok_or(HomingError::SingularHessian { r })?
            .solve(self.v0.as_vector());
        let denom = frame.sum.dot(&hv);
        if !(denom.abs() > 0.0) {
            return Err(HomingError::SingularHessian { r });
        }
        Ok(-hv / denom)
    }

    fn rk4(&self, x: &Point, r: f64, h: f64) -> Result<Point> {
        let k1 = self.tangent(x, r)?;
        let k2 = self.tangent(&(x + &k1 * (h / 2.0)), r + h / 2.0)?;
        let k3 = self.tangent(&(x + &k2 * (h / 2.0)), r + h / 2.0)?;
        let k4 = self.tangent(&(x + &k3 * h), r + h)?;
        Ok(x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
    }

    /// Moves a point of the curve from level `r_from` to `r_to`, halving the
    /// step when the predictor or the corrector fails (typically when the
    /// curve passes through a focus).
    fn advance(&self, x: &Point, r_from: f64, r_to: f64, depth: u32) -> Result<(Point, IsonormalResidual)> {
        match self.rk4(x, r_from, r_to - r_from) {
            Ok(predicted) => {
                if let Ok(done) = self.solve(&predicted, r_to, DRIFT_MAX_ITERS) {
                    return Ok(done);
                }
            }
            Err(e @ HomingError::SingularHessian { .. }) => return Err(e),
            Err(_) => {}
        }
        if depth < TRACE_MAX_DEPTH {
            let mid = 0.5 * (r_from + r_to);
            let (xm, _) = self.advance(x, r_from, mid, depth + 1)?;
            return self.advance(&xm, mid, r_to, depth + 1);
        }
        // Continuation failed: solve the level directly.
        let seed = ray_seed(self.landmarks, self.v0, r_to);
        self.solve(&seed, r_to, NEWTON_MAX_ITERS)
    }
}

/// Point `m − c·v0` on the ray from the median opposite `v0` with `ϑ = r`.
fn ray_seed(landmarks: &LandmarkSet, v0: &UnitVector, r: f64) -> Point {
    let m = geometric_median(landmarks).point();
    let r_min = theta_dist(&m, landmarks);
    let at = |c: f64| &m - v0.as_vector() * c;
    // ϑ(m − c v0) ≥ k c − r_min, so this bound brackets the root.
    let (mut lo, mut hi) = (0.0, (r + r_min) / landmarks.len() as f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if theta_dist(&at(mid), landmarks) < r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi))
}

/// The unique point on the k-ellipsoid `ϑ = r` whose normalized bearing sum
/// equals `v0`.
pub fn gauss_map_inverse(landmarks: &LandmarkSet, v0: &UnitVector, r: f64) -> Result<Point> {
    gauss_map_inverse_with_residual(landmarks, v0, r).map(|(x, _)| x)
}

pub fn gauss_map_inverse_with_residual(
    landmarks: &LandmarkSet,
    v0: &UnitVector,
    r: f64,
) -> Result<(Point, IsonormalResidual)> {
    check_direction_dim(landmarks, v0)?;
    let r_min = min_theta(landmarks);
    if !(r > r_min) {
        return Err(HomingError::InvalidParameter(format!(
            "level r = {r} must exceed the minimum distance sum {r_min}"
        )));
    }
    let problem = IsonormalProblem::new(landmarks, v0);
    let seed = ray_seed(landmarks, v0, r);
    match problem.solve(&seed, r, NEWTON_MAX_ITERS) {
        Ok(found) => Ok(found),
        Err(_) => {
            // Walk along the curve from just above the minimum instead.
            let r_low = r_min + (r - r_min) * 1e-3;
            let start = ray_seed(landmarks, v0, r_low);
            let (x, _) = problem.solve(&start, r_low, NEWTON_MAX_ITERS)?;
            problem.advance(&x, r_low, r, 0)
        }
    }
}

fn check_direction_dim(landmarks: &LandmarkSet, v0: &UnitVector) -> Result<()> {
    if v0.len() != landmarks.dim() {
        return Err(HomingError::DimensionMismatch {
            expected: landmarks.dim(),
            got: v0.len(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsonormalSample {
    pub r: f64,
    pub point: Point,
    pub residual: IsonormalResidual,
}

/// Samples of `ξ_{v0} = {x : v(x) = v0}` ordered by the level `r = ϑ(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsonormalCurve {
    pub v0: UnitVector,
    pub samples: Vec<IsonormalSample>,
}

/// Default starting level for tracing: just above the minimum of `ϑ`, where
/// the curve's parametrization by `r` is regular.
pub fn default_r_start(landmarks: &LandmarkSet) -> f64 {
    min_theta(landmarks) * (1.0 + 1e-3)
}

/// Traces the isonormal curve for `v0` over `[r_start, r_end]` with level
/// spacing `step`, integrating the curve ODE with RK4 and re-projecting
/// onto `{ϑ = r, v = v0}` after each step.
pub fn trace_isonormal(
    landmarks: &LandmarkSet,
    v0: &UnitVector,
    r_start: f64,
    r_end: f64,
    step: f64,
) -> Result<IsonormalCurve> {
    check_direction_dim(landmarks, v0)?;
    if !(step > 0.0) || !step.is_finite() {
        return Err(HomingError::InvalidParameter(format!("step must be positive, got {step}")));
    }
    if !(r_end > r_start) || !r_end.is_finite() {
        return Err(HomingError::InvalidParameter(format!(
            "r_end ({r_end}) must exceed r_start ({r_start})"
        )));
    }
    let r_min = min_theta(landmarks);
    if !(r_start > r_min) {
        return Err(HomingError::InvalidParameter(format!(
            "r_start = {r_start} must exceed the minimum distance sum {r_min}"
        )));
    }

    let (seed, residual) = gauss_map_inverse_with_residual(landmarks, v0, r_start)
        .map_err(|e| HomingError::SeedFailure(e.to_string()))?;
    let problem = IsonormalProblem::new(landmarks, v0);
    let mut samples = vec![IsonormalSample {
        r: r_start,
        point: seed,
        residual,
    }];

    let mut n = 1u64;
    loop {
        let prev = samples.last().expect("seeded");
        let mut r = r_start + n as f64 * step;
        if r >= r_end - 1e-9 * step {
            r = r_end;
        }
        let (point, residual) = problem.advance(&prev.point, prev.r, r, 0)?;
        samples.push(IsonormalSample { r, point, residual });
        if r == r_end {
            break;
        }
        n += 1;
    }
    Ok(IsonormalCurve {
        v0: v0.clone(),
        samples,
    })
}

/// Whether focus `i` lies on the isonormal curve of `v0`: with
/// `s = Σ_{j≠i} u(pᵢ, pⱼ)`, checks for `t > 0` solving `‖t·v0 − s‖ = 1`.
///
/// Panics if `i` is out of range.
pub fn focus_direction_set_contains(landmarks: &LandmarkSet, i: usize, v0: &UnitVector) -> bool {
    assert!(i < landmarks.len(), "focus index {i} out of range");
    let s = focus_bearing_sum(landmarks, i);
    // t² − 2(v0·s)t + ‖s‖² − 1 = 0
    let b = v0.dot(&s);
    let disc = b * b - s.norm_squared() + 1.0;
    if disc < 0.0 {
        return false;
    }
    b + disc.sqrt() > 1e-12
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector;
    use approx::assert_relative_eq;

    fn pair() -> LandmarkSet {
        LandmarkSet::from_rows(&[vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap()
    }

    #[test]
    fn bearing_examples() {
        let b = bearing(&vector(&[0.0, 0.0]), &vector(&[1.0, 0.0])).unwrap();
        assert_eq!(b.as_vector(), &vector(&[1.0, 0.0]));
        assert!(matches!(
            bearing(&vector(&[1.0, 1.0]), &vector(&[1.0, 1.0])),
            Err(HomingError::CoincidentPoints { .. })
        ));
        let b = bearing(&vector(&[0.0, 0.0, 0.0]), &vector(&[1.0, 1.0, 1.0])).unwrap();
        for c in b.iter() {
            assert_relative_eq!(*c, 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        }
    }

    #[test]
    fn projection_examples() {
        let p = projection_matrix(&vector(&[0.0, 1.0])).unwrap();
        assert_eq!(p, Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
        let p = projection_matrix(&vector(&[1.0, 1.0])).unwrap();
        assert_relative_eq!(p, Matrix::from_row_slice(2, 2, &[0.5, -0.5, -0.5, 0.5]), epsilon = 1e-15);
        assert!(matches!(
            projection_matrix(&vector(&[0.0, 0.0])),
            Err(HomingError::ZeroVector)
        ));
    }

    #[test]
    fn unit_vector_refuses_non_unit() {
        assert!(UnitVector::new(vector(&[1.0, 1.0])).is_err());
        assert!(UnitVector::new(vector(&[0.6, 0.8])).is_ok());
        assert!(UnitVector::normalize(&vector(&[0.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn landmark_validation() {
        assert!(LandmarkSet::from_rows(&[vec![0.0, 0.0]]).is_err());
        assert!(LandmarkSet::from_rows(&[vec![0.0, 0.0], vec![0.0, 1e-12]]).is_err());
        assert!(LandmarkSet::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0, 0.0]]).is_err());
        assert!(LandmarkSet::from_rows(&[vec![0.0], vec![1.0]]).is_err());
        assert!(LandmarkSet::from_rows(&[vec![0.0, f64::NAN], vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn theta_examples() {
        let p = pair();
        assert_eq!(theta_dist(&vector(&[0.0, 0.0]), &p), 2.0);
        assert_eq!(theta_dist(&vector(&[1.0, 0.0]), &p), 2.0);
        let g = theta_gradient(&vector(&[0.0, 0.0]), &p).unwrap();
        assert_eq!(g, vector(&[0.0, 0.0]));
        let g = theta_gradient(&vector(&[0.0, 2.0]), &p).unwrap();
        assert_relative_eq!(g, vector(&[0.0, 4.0 / 5f64.sqrt()]), epsilon = 1e-15);
        assert!(matches!(
            theta_gradient(&vector(&[1.0, 0.0]), &p),
            Err(HomingError::AtFocus { index: 0 })
        ));
        assert!(theta_hessian(&vector(&[-1.0, 0.0]), &p).is_err());
    }

    #[test]
    fn hessian_matches_assembled_projections() {
        let p = pair();
        let x = vector(&[0.0, 1.0]);
        let h = theta_hessian(&x, &p).unwrap();
        let mut expected = Matrix::zeros(2, 2);
        for f in p.foci() {
            let u = bearing(&x, f).unwrap();
            expected += projection_matrix(&u).unwrap() / (f - &x).norm();
        }
        assert_relative_eq!(h, expected, epsilon = 1e-15);
        assert_relative_eq!(h.clone(), h.transpose());
        assert!(h.symmetric_eigen().eigenvalues.min() >= -1e-10);
    }

    #[test]
    fn hessian_singular_on_collinear_line() {
        let p = LandmarkSet::from_rows(&[vec![0.0, 0.0, 0.0], vec![1.0, 1.0, 1.0], vec![3.0, 3.0, 3.0]]).unwrap();
        let h = theta_hessian(&vector(&[-2.0, -2.0, -2.0]), &p).unwrap();
        assert!(h.symmetric_eigen().eigenvalues.min().abs() <= 1e-10);
        let h = theta_hessian(&vector(&[-2.0, 0.0, 1.0]), &p).unwrap();
        assert!(h.symmetric_eigen().eigenvalues.min() > 1e-6);
    }

    #[test]
    fn median_examples() {
        let s3 = 3f64.sqrt();
        let tri = LandmarkSet::from_rows(&[vec![0.0, 0.0], vec![2.0, 0.0], vec![1.0, s3]]).unwrap();
        let m = geometric_median(&tri);
        assert_relative_eq!(m.point(), vector(&[1.0, s3 / 3.0]), epsilon = 1e-10);

        assert_eq!(
            geometric_median(&pair()),
            MedianResult::Segment(vector(&[-1.0, 0.0]), vector(&[1.0, 0.0]))
        );
        let four = LandmarkSet::from_rows(&[vec![3.0, 3.0], vec![0.0, 0.0], vec![1.0, 1.0], vec![7.0, 7.0]]).unwrap();
        assert_eq!(
            geometric_median(&four),
            MedianResult::Segment(vector(&[1.0, 1.0]), vector(&[3.0, 3.0]))
        );
        let three = LandmarkSet::from_rows(&[vec![5.0, 0.0], vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(geometric_median(&three), MedianResult::UniquePoint(vector(&[1.0, 0.0])));
    }

    #[test]
    fn median_at_dominant_focus() {
        // Obtuse corner above 120°: the median is that vertex.
        let p = LandmarkSet::from_rows(&[vec![0.0, 0.0], vec![-5.0, 0.3], vec![5.0, 0.3]]).unwrap();
        assert_eq!(geometric_median(&p), MedianResult::UniquePoint(vector(&[0.0, 0.0])));
    }

    #[test]
    fn kellipsoid_membership() {
        let p = pair();
        assert!(kellipsoid_contains(&vector(&[0.0, 0.0]), &p, 2.0));
        for x in [[0.0, 0.0], [0.3, -0.2], [5.0, 5.0]] {
            assert!(!kellipsoid_contains(&vector(&x), &p, 1.999));
        }
    }

    #[test]
    fn gauss_map_inverse_on_ellipse() {
        let p = pair();
        let v0 = UnitVector::new(vector(&[0.0, -1.0])).unwrap();
        let x = gauss_map_inverse(&p, &v0, 4.0).unwrap();
        assert_relative_eq!(x, vector(&[0.0, 3f64.sqrt()]), epsilon = 1e-9);
        assert!(gauss_map_inverse(&p, &v0, 1.5).is_err());
        let along = UnitVector::new(vector(&[1.0, 0.0])).unwrap();
        let x = gauss_map_inverse(&p, &along, 6.0).unwrap();
        assert_relative_eq!(x, vector(&[-3.0, 0.0]), epsilon = 1e-9);
    }

    #[test]
    fn trace_on_bisector() {
        let p = pair();
        let v0 = UnitVector::new(vector(&[0.0, 1.0])).unwrap();
        let curve = trace_isonormal(&p, &v0, 2.002, 10.0, 0.25).unwrap();
        assert_eq!(curve.samples.first().unwrap().r, 2.002);
        assert_eq!(curve.samples.last().unwrap().r, 10.0);
        for s in &curve.samples {
            // v points up, so the curve is the lower half of the bisector.
            let y = -((s.r / 2.0).powi(2) - 1.0).sqrt();
            assert!(s.point[0].abs() <= 1e-9);
            assert_relative_eq!(s.point[1], y, epsilon = 1e-8);
            assert!(s.residual.direction <= 1e-6 && s.residual.theta <= 1e-6);
        }
        assert!(curve.samples.windows(2).all(|w| w[0].r < w[1].r));
    }

    #[test]
    fn trace_rejects_bad_ranges() {
        let p = pair();
        let v0 = UnitVector::new(vector(&[0.0, 1.0])).unwrap();
        assert!(trace_isonormal(&p, &v0, 2.0, 10.0, 0.1).is_err());
        assert!(trace_isonormal(&p, &v0, 3.0, 2.5, 0.1).is_err());
        assert!(trace_isonormal(&p, &v0, 3.0, 4.0, 0.0).is_err());
        let v3 = UnitVector::new(vector(&[0.0, 1.0, 0.0])).unwrap();
        assert!(trace_isonormal(&p, &v3, 3.0, 4.0, 0.1).is_err());
    }

    #[test]
    fn trace_along_collinear_line_reports_singular_hessian() {
        let p = pair();
        let v0 = UnitVector::new(vector(&[1.0, 0.0])).unwrap();
        assert!(matches!(
            trace_isonormal(&p, &v0, 3.0, 5.0, 0.5),
            Err(HomingError::SingularHessian { .. })
        ));
    }

    #[test]
    fn focus_direction_set_two_foci() {
        let p = pair();
        let s = UnitVector::normalize(&focus_bearing_sum(&p, 0)).unwrap();
        assert!(focus_direction_set_contains(&p, 0, &s));
        let minus = UnitVector::new(-s.as_vector()).unwrap();
        assert!(!focus_direction_set_contains(&p, 0, &minus));
    }

    #[test]
    fn collinearity() {
        assert!(is_collinear(&pair()));
        let tri = LandmarkSet::from_rows(&[vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        assert!(!is_collinear(&tri));
        let line = LandmarkSet::from_rows(&[vec![0.0, 0.0, 0.0], vec![1.0, 2.0, 3.0], vec![-2.0, -4.0, -6.0]]).unwrap();
        assert!(is_collinear(&line));
    }
}
