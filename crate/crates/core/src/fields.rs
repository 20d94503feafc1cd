//! Navigation fields built from bearings only.
//!
//! [`HomeSpec`] holds what the robot knows about home: the desired bearings,
//! their normalized sum `v*` and the desired pairwise cosines. At a query
//! point the robot computes `v` (normalized bearing sum), picks the landmark
//! pair whose cosine is most below its desired value, and blends
//!
//! * the tangential field `f_t = −P(v)v*`, tangent to the k-ellipsoid through
//!   the point, and
//! * the normal field `f_n = sign(δ)·v`, which moves toward or away from
//!   the landmarks,
//!
//! through the gains `g_t`, `g_n` into `f = g_t f_t° + g_n f_n°`.

use crate::geometry::{bearing, bearing_sum, LandmarkSet, LocalFrame, UnitVector, COINCIDENCE_TOL};
use crate::{HomingError, Matrix, Point, Result, Vector};

/// Minimum angle (radians) between two desired bearings for the pair to be
/// used in pair selection.
pub const ELIGIBLE_PAIR_ANGLE: f64 = 1e-9;

/// Non-oriented angle between two unit vectors, accurate near 0 and π.
pub fn angle_between(a: &Vector, b: &Vector) -> f64 {
    2.0 * (a - b).norm().atan2((a + b).norm())
}

/// The home location as seen from home: desired bearings and derived data.
#[derive(Debug, Clone, PartialEq)]
pub struct HomeSpec {
    desired_bearings: Vec<UnitVector>,
    v_star: UnitVector,
    desired_cosines: Matrix,
    eligible_pairs: Vec<(usize, usize)>,
    fov_angle: f64,
}

impl HomeSpec {
    pub fn from_bearings(desired_bearings: Vec<UnitVector>, fov_angle: f64) -> Result<Self> {
        let k = desired_bearings.len();
        if k < 2 {
            return Err(HomingError::InvalidParameter(format!(
                "need at least 2 desired bearings, got {k}"
            )));
        }
        let d = desired_bearings[0].len();
        if let Some(b) = desired_bearings.iter().find(|b| b.len() != d) {
            return Err(HomingError::DimensionMismatch { expected: d, got: b.len() });
        }
        if !(fov_angle > 0.0 && fov_angle < std::f64::consts::PI) {
            return Err(HomingError::InvalidParameter(format!(
                "field of view angle must lie in (0, π), got {fov_angle}"
            )));
        }
        let mut sum = Vector::zeros(d);
        for b in &desired_bearings {
            sum += b.as_vector();
        }
        if sum.norm() <= COINCIDENCE_TOL {
            return Err(HomingError::InfeasibleHome(
                "desired bearings sum to zero (home at the geometric median)".into(),
            ));
        }
        let v_star = UnitVector::normalize(&sum)?;
        let desired_cosines = Matrix::from_fn(k, k, |i, j| {
            if i == j {
                1.0
            } else {
                desired_bearings[i].dot(&desired_bearings[j])
            }
        });

        let mut eligible_pairs = Vec::new();
        let mut widest: f64 = 0.0;
        for i in 0..k {
            for j in i + 1..k {
                let angle = angle_between(&desired_bearings[i], &desired_bearings[j]);
                widest = widest.max(angle);
                if angle > ELIGIBLE_PAIR_ANGLE {
                    eligible_pairs.push((i, j));
                }
            }
        }
        if eligible_pairs.is_empty() {
            return Err(HomingError::NoEligiblePair);
        }
        if widest >= fov_angle {
            return Err(HomingError::InfeasibleHome(format!(
                "widest desired view angle {widest:.6} rad is not below the field of view {fov_angle:.6} rad"
            )));
        }
        Ok(Self {
            desired_bearings,
            v_star,
            desired_cosines,
            eligible_pairs,
            fov_angle,
        })
    }

    /// Desired bearings measured from `home`.
    pub fn from_home_position(landmarks: &LandmarkSet, home: &Point, fov_angle: f64) -> Result<Self> {
        if home.len() != landmarks.dim() {
            return Err(HomingError::DimensionMismatch {
                expected: landmarks.dim(),
                got: home.len(),
            });
        }
        let bearings = landmarks
            .foci()
            .iter()
            .map(|p| bearing(home, p))
            .collect::<Result<Vec<_>>>()
            .map_err(|_| HomingError::InfeasibleHome("home position coincides with a landmark".into()))?;
        Self::from_bearings(bearings, fov_angle)
    }

    pub fn desired_bearings(&self) -> &[UnitVector] {
        &self.desired_bearings
    }

    pub fn v_star(&self) -> &UnitVector {
        &self.v_star
    }

    pub fn desired_cosines(&self) -> &Matrix {
        &self.desired_cosines
    }

    pub fn eligible_pairs(&self) -> &[(usize, usize)] {
        &self.eligible_pairs
    }

    pub fn fov_angle(&self) -> f64 {
        self.fov_angle
    }

    pub fn len(&self) -> usize {
        self.desired_bearings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.desired_bearings.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.v_star.len()
    }

    /// Widest angle between two desired bearings.
    pub fn max_desired_angle(&self) -> f64 {
        let k = self.len();
        let mut widest: f64 = 0.0;
        for i in 0..k {
            for j in i + 1..k {
                widest = widest.max(angle_between(&self.desired_bearings[i], &self.desired_bearings[j]));
            }
        }
        widest
    }

    /// Strict upper bound on the bump width: the smallest gap between a
    /// desired pairwise cosine and `cos φ_FOV` over eligible pairs.
    pub fn epsilon_bound(&self) -> f64 {
        let cos_fov = self.fov_angle.cos();
        self.eligible_pairs
            .iter()
            .map(|&(i, j)| self.desired_cosines[(i, j)] - cos_fov)
            .fold(f64::INFINITY, f64::min)
    }

    /// Half the bound, clamped to `[1e-4, 0.5]`.
    pub fn default_epsilon(&self) -> f64 {
        (0.5 * self.epsilon_bound()).clamp(1e-4, 0.5)
    }
}

/// Width of the cubic bump in cosine units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpParams {
    epsilon: f64,
}

impl BumpParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(HomingError::InvalidParameter(format!(
                "bump width must be positive, got {epsilon}"
            )));
        }
        Ok(Self { epsilon })
    }

    /// Width validated against a home's bound.
    pub fn for_home(epsilon: f64, home: &HomeSpec) -> Result<Self> {
        let params = Self::new(epsilon)?;
        let bound = home.epsilon_bound();
        if !(epsilon < bound) {
            return Err(HomingError::InvalidParameter(format!(
                "bump width {epsilon} must be below {bound} so the transition band avoids the field of view obstacles"
            )));
        }
        Ok(params)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// C¹ cubic ramp: 0 for `x ≤ 0`, `3x²/ε² − 2x³/ε³` on `[0, ε]`, 1 beyond.
pub fn bump(x: f64, params: BumpParams) -> f64 {
    let eps = params.epsilon;
    if x <= 0.0 {
        0.0
    } else if x >= eps {
        1.0
    } else {
        let a2 = 3.0 / (eps * eps);
        let a3 = -2.0 / (eps * eps * eps);
        a2 * x * x + a3 * x * x * x
    }
}

/// `sign` with `sign(0) = 0`.
fn signum0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Norm below which a field component is treated as zero when normalizing.
/// Keeps `f(x*) = 0` exact despite rounding in `v·v* ≈ 1`.
const NORMALIZE_FLOOR: f64 = 1e-14;

fn normalized_or_zero(v: &Vector) -> Vector {
    let n = v.norm();
    if n > NORMALIZE_FLOOR && n.is_finite() {
        v / n
    } else {
        Vector::zeros(v.len())
    }
}

fn check_home(landmarks: &LandmarkSet, home: &HomeSpec) -> Result<()> {
    if home.len() != landmarks.len() {
        return Err(HomingError::InvalidParameter(format!(
            "{} desired bearings for {} landmarks",
            home.len(),
            landmarks.len()
        )));
    }
    if home.dim() != landmarks.dim() {
        return Err(HomingError::DimensionMismatch {
            expected: landmarks.dim(),
            got: home.dim(),
        });
    }
    Ok(())
}

/// Normalized bearing sum `v(x)`; `None` at foci and at the geometric median.
pub fn v_field(x: &Point, landmarks: &LandmarkSet) -> Option<UnitVector> {
    crate::geometry::bearing_sum_direction(x, landmarks)
}

/// Jacobian of `v(x)`: `−P(v)·H / ‖Σu‖`, with `H` the Hessian of the
/// distance sum.
pub fn v_jacobian(x: &Point, landmarks: &LandmarkSet) -> Result<Matrix> {
    LocalFrame::at(x, landmarks)?
        .direction_jacobian()
        .ok_or(HomingError::UndefinedBearingSum)
}

/// Chosen landmark pair and its cosine error `δᵢⱼ = uᵢᵀuⱼ − u*ᵢᵀu*ⱼ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSelection {
    pub i: usize,
    pub j: usize,
    pub delta: f64,
}

fn bearings_at(x: &Point, landmarks: &LandmarkSet) -> Result<Vec<Vector>> {
    landmarks
        .foci()
        .iter()
        .enumerate()
        .map(|(index, p)| {
            bearing(x, p)
                .map(UnitVector::into_vector)
                .map_err(|_| HomingError::AtFocus { index })
        })
        .collect()
}

fn select_from_bearings(bearings: &[Vector], home: &HomeSpec) -> PairSelection {
    let mut best: Option<PairSelection> = None;
    for &(i, j) in home.eligible_pairs() {
        let delta = bearings[i].dot(&bearings[j]) - home.desired_cosines[(i, j)];
        if best.is_none_or(|b| delta < b.delta) {
            best = Some(PairSelection { i, j, delta });
        }
    }
    best.expect("HomeSpec guarantees an eligible pair")
}

/// The eligible pair with the smallest `δᵢⱼ` at `x`; ties go to the
/// lexicographically first pair.
pub fn select_pair(x: &Point, landmarks: &LandmarkSet, home: &HomeSpec) -> Result<PairSelection> {
    check_home(landmarks, home)?;
    let bearings = bearings_at(x, landmarks)?;
    Ok(select_from_bearings(&bearings, home))
}

fn defined_v(x: &Point, landmarks: &LandmarkSet) -> Result<UnitVector> {
    let sum = bearing_sum(x, landmarks)?;
    if sum.norm() <= COINCIDENCE_TOL {
        return Err(HomingError::UndefinedBearingSum);
    }
    UnitVector::normalize(&sum)
}

/// `f_t(x) = −P(v)v*`.
pub fn tangential_field(x: &Point, landmarks: &LandmarkSet, home: &HomeSpec) -> Result<Vector> {
    check_home(landmarks, home)?;
    let v = defined_v(x, landmarks)?;
    Ok(tangential_from(&v, home.v_star()))
}

fn tangential_from(v: &Vector, v_star: &Vector) -> Vector {
    // −(I − v vᵀ) v*
    v * v.dot(v_star) - v_star
}

/// `f_n(x) = sign(δ)·v` for the selected pair, zero on the desired set.
pub fn normal_field(x: &Point, landmarks: &LandmarkSet, home: &HomeSpec) -> Result<Vector> {
    check_home(landmarks, home)?;
    let v = defined_v(x, landmarks)?;
    let pair = select_pair(x, landmarks, home)?;
    Ok(v.into_vector() * signum0(pair.delta))
}

fn gains_from(v: &Vector, v_star: &Vector, delta: f64, params: BumpParams) -> (f64, f64) {
    let c = v.dot(v_star);
    let g_t = (1.0 - c).max(0.0).sqrt().min(1.0);
    let g_n = c.max(0.0) * bump(delta, params) + bump(-delta, params);
    (g_t, g_n)
}

/// `g_t = min(1, √(1 − vᵀv*))`, `g_n = max(0, vᵀv*)·b(δ) + b(−δ)`.
pub fn gains(x: &Point, landmarks: &LandmarkSet, home: &HomeSpec, params: BumpParams) -> Result<(f64, f64)> {
    check_home(landmarks, home)?;
    let v = defined_v(x, landmarks)?;
    let pair = select_pair(x, landmarks, home)?;
    Ok(gains_from(&v, home.v_star(), pair.delta, params))
}

/// Signed cosine error of the selected pair: zero on the desired set,
/// negative inside it, positive outside.
pub fn desired_set_residual(x: &Point, landmarks: &LandmarkSet, home: &HomeSpec) -> Result<f64> {
    check_home(landmarks, home)?;
    defined_v(x, landmarks)?;
    Ok(select_pair(x, landmarks, home)?.delta)
}

/// `φ_FOV` minus the widest pairwise view angle; negative inside an
/// obstacle set.
pub fn fov_margin(x: &Point, landmarks: &LandmarkSet, fov_angle: f64) -> Result<f64> {
    let bearings = bearings_at(x, landmarks)?;
    Ok(fov_angle - widest_angle(&bearings))
}

fn widest_angle(bearings: &[Vector]) -> f64 {
    let mut widest: f64 = 0.0;
    for i in 0..bearings.len() {
        for j in i + 1..bearings.len() {
            widest = widest.max(angle_between(&bearings[i], &bearings[j]));
        }
    }
    widest
}

/// Everything the combined field computes at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    /// `None` where `v` is undefined (foci, geometric median).
    pub v: Option<UnitVector>,
    pub f_t: Vector,
    pub f_n: Vector,
    pub g_t: f64,
    pub g_n: f64,
    pub f: Vector,
    pub f_unit: Vector,
    /// `None` only at a focus.
    pub pair: Option<PairSelection>,
    /// `None` only at a focus.
    pub fov_margin: Option<f64>,
}

impl FieldSample {
    pub fn is_defined(&self) -> bool {
        self.v.is_some()
    }

    fn undefined(d: usize, pair: Option<PairSelection>, fov_margin: Option<f64>) -> Self {
        let zero = Vector::zeros(d);
        Self {
            v: None,
            f_t: zero.clone(),
            f_n: zero.clone(),
            g_t: 0.0,
            g_n: 0.0,
            f: zero.clone(),
            f_unit: zero,
            pair,
            fov_margin,
        }
    }
}

/// `f = g_t f_t° + g_n f_n°`, total: returns a zero field with the
/// undefined flag where `v` does not exist.
pub fn combined_field(x: &Point, landmarks: &LandmarkSet, home: &HomeSpec, params: BumpParams) -> FieldSample {
    assert_eq!(home.len(), landmarks.len(), "home/landmark count mismatch");
    assert_eq!(home.dim(), landmarks.dim(), "home/landmark dimension mismatch");
    let d = landmarks.dim();
    let Ok(bearings) = bearings_at(x, landmarks) else {
        return FieldSample::undefined(d, None, None);
    };
    let pair = select_from_bearings(&bearings, home);
    let margin = home.fov_angle() - widest_angle(&bearings);

    let mut sum = Vector::zeros(d);
    for b in &bearings {
        sum += b;
    }
    if sum.norm() <= COINCIDENCE_TOL {
        return FieldSample::undefined(d, Some(pair), Some(margin));
    }
    let norm = sum.norm();
    let v = sum / norm;
    let v_star = home.v_star().as_vector();
    let f_t = tangential_from(&v, v_star);
    let f_n = &v * signum0(pair.delta);
    let (g_t, g_n) = gains_from(&v, v_star, pair.delta, params);
    let f = normalized_or_zero(&f_t) * g_t + normalized_or_zero(&f_n) * g_n;
    let f_unit = normalized_or_zero(&f);
    FieldSample {
        v: Some(UnitVector::normalize(&v).expect("nonzero bearing sum")),
        f_t,
        f_n,
        g_t,
        g_n,
        f,
        f_unit,
        pair: Some(pair),
        fov_margin: Some(margin),
    }
}

/// Landmarks, home and bump width bundled for repeated evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct NavigationField {
    landmarks: LandmarkSet,
    home: HomeSpec,
    bump: BumpParams,
}

impl NavigationField {
    pub fn new(landmarks: LandmarkSet, home: HomeSpec, bump: BumpParams) -> Result<Self> {
        check_home(&landmarks, &home)?;
        let bump = BumpParams::for_home(bump.epsilon(), &home)?;
        Ok(Self { landmarks, home, bump })
    }

    pub fn with_default_epsilon(landmarks: LandmarkSet, home: HomeSpec) -> Result<Self> {
        let bump = BumpParams::new(home.default_epsilon())?;
        Self::new(landmarks, home, bump)
    }

    pub fn landmarks(&self) -> &LandmarkSet {
        &self.landmarks
    }

    pub fn home(&self) -> &HomeSpec {
        &self.home
    }

    pub fn bump(&self) -> BumpParams {
        self.bump
    }

    pub fn dim(&self) -> usize {
        self.landmarks.dim()
    }

    pub fn sample(&self, x: &Point) -> FieldSample {
        combined_field(x, &self.landmarks, &self.home, self.bump)
    }
}
