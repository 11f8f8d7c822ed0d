//! Sample-set construction and geometry: L-matrices, approximate diameter,
//! reflection, and the stretch/rotation data relating a sample set to an
//! inexact reflection of itself.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

/// Tolerance below which `1 - cos(theta)` is treated as zero (parallel
/// directions), and symmetrically `1 + cos(theta)` as antiparallel.
const PARALLEL_TOL: f64 = 1e-14;

/// A reference point plus nonzero direction vectors; the sample points are
/// `y0 + d_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    y0: Vector,
    dirs: Vec<Vector>,
}

impl SampleSet {
    pub fn new(y0: Vector, dirs: Vec<Vector>) -> Result<Self> {
        if y0.is_empty() {
            return Err(Error::InvalidInput("reference point must have dimension >= 1".into()));
        }
        if dirs.is_empty() {
            return Err(Error::InvalidInput("sample set needs at least one direction".into()));
        }
        if !y0.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidInput("reference point has non-finite coordinates".into()));
        }
        for (i, d) in dirs.iter().enumerate() {
            if d.len() != y0.len() {
                return Err(Error::InvalidInput(format!(
                    "direction {i} has dimension {} but the reference point has {}",
                    d.len(),
                    y0.len()
                )));
            }
            if !d.iter().all(|x| x.is_finite()) {
                return Err(Error::InvalidInput(format!("direction {i} has non-finite coordinates")));
            }
            if d.norm() == 0.0 {
                return Err(Error::InvalidInput(format!("direction {i} is zero")));
            }
        }
        Ok(Self { y0, dirs })
    }

    /// Builds the set from explicit sample points; directions are `p_i - y0`.
    pub fn from_points(y0: Vector, points: &[Vector]) -> Result<Self> {
        let dirs = points.iter().map(|p| p - &y0).collect();
        Self::new(y0, dirs)
    }

    pub fn y0(&self) -> &Vector {
        &self.y0
    }

    pub fn dirs(&self) -> &[Vector] {
        &self.dirs
    }

    /// Ambient dimension n.
    pub fn dim(&self) -> usize {
        self.y0.len()
    }

    /// Number of directions p.
    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: p >= 1
    }
}

/// A sample set together with the directions of an (inexact) reflection;
/// the reflected points are `y0 - tilde_d_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedPair {
    plus: SampleSet,
    tilde_dirs: Vec<Vector>,
}

impl AdaptedPair {
    pub fn new(plus: SampleSet, tilde_dirs: Vec<Vector>) -> Result<Self> {
        if tilde_dirs.len() != plus.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} reflected directions, got {}",
                plus.len(),
                tilde_dirs.len()
            )));
        }
        for (i, d) in tilde_dirs.iter().enumerate() {
            if d.len() != plus.dim() {
                return Err(Error::InvalidInput(format!("reflected direction {i} has wrong dimension")));
            }
            if !d.iter().all(|x| x.is_finite()) {
                return Err(Error::InvalidInput(format!("reflected direction {i} has non-finite coordinates")));
            }
            if d.norm() == 0.0 {
                return Err(Error::InvalidInput(format!("reflected direction {i} is zero")));
            }
        }
        Ok(Self { plus, tilde_dirs })
    }

    pub fn plus(&self) -> &SampleSet {
        &self.plus
    }

    pub fn tilde_dirs(&self) -> &[Vector] {
        &self.tilde_dirs
    }
}

/// Stretch ratios, rotation angles, rotation bases and matrices for an
/// [`AdaptedPair`].
#[derive(Debug, Clone)]
pub struct GeometryReport {
    /// Stretching parameters `k_i = |tilde_d_i| / |d_i|`.
    pub k: Vec<f64>,
    /// Rotation angles in `[0, pi)` radians.
    pub theta: Vec<f64>,
    /// Orthogonal bases `P_i`; row 1 is `d_i/|d_i|`, rows 1-2 span the
    /// rotation plane.
    pub bases: Vec<Matrix>,
    /// Rotation matrices `A_i = P_i^T A'_i P_i` mapping `d_i/|d_i|` to
    /// `tilde_d_i/|tilde_d_i|`.
    pub rotations: Vec<Matrix>,
    /// `max_i theta_i`.
    pub big_theta: f64,
    /// Diagonal matrix `diag(k_i^2)`.
    pub d: Matrix,
}

/// The L-matrix: columns are the directions `d_i`, in order.
pub fn l_matrix(s: &SampleSet) -> Matrix {
    let n = s.dim();
    let p = s.len();
    Matrix::from_fn(n, p, |r, c| s.dirs[c][r])
}

/// Approximate diameter: `max_i |d_i|`.
pub fn approx_diameter(s: &SampleSet) -> f64 {
    s.dirs.iter().map(|d| d.norm()).fold(0.0, f64::max)
}

/// The exact reflection `tilde_d_i = d_i`, i.e. reflected points `y0 - d_i`.
pub fn reflect(s: &SampleSet) -> AdaptedPair {
    let tilde = s.dirs.clone();
    AdaptedPair { plus: s.clone(), tilde_dirs: tilde }
}

/// Stretch and rotation geometry of an adapted pair.
///
/// The rotation basis comes from Gram-Schmidt on
/// `{d_i/|d_i|, tilde_d_i - proj(tilde_d_i)}`, extended to a full
/// orthonormal basis by orthonormalizing standard basis vectors in index
/// order; the construction is deterministic. Antiparallel pairs
/// (`theta_i = pi`) are refused because the rotation plane is not unique.
pub fn geometry(pair: &AdaptedPair) -> Result<GeometryReport> {
    let n = pair.plus.dim();
    let p = pair.plus.len();
    let mut k = Vec::with_capacity(p);
    let mut theta = Vec::with_capacity(p);
    let mut bases = Vec::with_capacity(p);
    let mut rotations = Vec::with_capacity(p);

    for i in 0..p {
        let d = &pair.plus.dirs[i];
        let dt = &pair.tilde_dirs[i];
        let nd = d.norm();
        let ndt = dt.norm();
        k.push(ndt / nd);

        let cos = (d.dot(dt) / (nd * ndt)).clamp(-1.0, 1.0);
        if 1.0 + cos <= PARALLEL_TOL {
            return Err(Error::DegenerateRotation { index: i });
        }
        if 1.0 - cos <= PARALLEL_TOL {
            theta.push(0.0);
            bases.push(Matrix::identity(n, n));
            rotations.push(Matrix::identity(n, n));
            continue;
        }

        // 0 < theta < pi, which forces n >= 2.
        let ang = cos.acos();
        theta.push(ang);
        let u = d / nd;
        let mut w = dt / ndt - cos * &u;
        w /= w.norm();
        let basis = orthonormal_basis(&u, &w);
        let givens = givens_block(n, ang);
        rotations.push(basis.transpose() * givens * &basis);
        bases.push(basis);
    }

    let big_theta = theta.iter().cloned().fold(0.0, f64::max);
    let d = Matrix::from_diagonal(&Vector::from_iterator(p, k.iter().map(|x| x * x)));
    Ok(GeometryReport { k, theta, bases, rotations, big_theta, d })
}

/// cos/sin block of angle `ang` in the leading 2x2, identity elsewhere.
fn givens_block(n: usize, ang: f64) -> Matrix {
    let mut g = Matrix::identity(n, n);
    let (s, c) = ang.sin_cos();
    g[(0, 0)] = c;
    g[(0, 1)] = -s;
    g[(1, 0)] = s;
    g[(1, 1)] = c;
    g
}

/// Orthogonal matrix with rows `u`, `w`, then standard basis vectors
/// orthonormalized in index order (candidates nearly inside the current
/// span are skipped; a second Gram-Schmidt pass keeps the result orthogonal
/// at machine precision).
fn orthonormal_basis(u: &Vector, w: &Vector) -> Matrix {
    let n = u.len();
    let mut rows: Vec<Vector> = vec![u.clone(), w.clone()];
    for j in 0..n {
        if rows.len() == n {
            break;
        }
        let mut cand = Vector::zeros(n);
        cand[j] = 1.0;
        for _pass in 0..2 {
            for r in &rows {
                let proj = r.dot(&cand);
                cand -= proj * r;
            }
        }
        let norm = cand.norm();
        if norm > 1e-8 {
            rows.push(cand / norm);
        }
    }
    debug_assert_eq!(rows.len(), n);
    Matrix::from_fn(n, n, |r, c| rows[r][c])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn v(data: &[f64]) -> Vector {
        Vector::from_row_slice(data)
    }

    fn set(y0: &[f64], dirs: &[&[f64]]) -> SampleSet {
        SampleSet::new(v(y0), dirs.iter().map(|d| v(d)).collect()).unwrap()
    }

    #[test]
    fn l_matrix_from_points() {
        let s = SampleSet::from_points(v(&[1.0, 1.0]), &[v(&[2.0, 1.0]), v(&[1.0, 3.0])]).unwrap();
        assert_eq!(l_matrix(&s), Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]));
    }

    #[test]
    fn l_matrix_one_dimensional() {
        let s = set(&[0.0], &[&[0.1]]);
        assert_eq!(l_matrix(&s), Matrix::from_row_slice(1, 1, &[0.1]));
    }

    #[test]
    fn l_matrix_columns_follow_direction_order() {
        let a = set(&[0.0, 0.0], &[&[1.0, 0.0], &[0.0, 2.0]]);
        let b = set(&[0.0, 0.0], &[&[0.0, 2.0], &[1.0, 0.0]]);
        let la = l_matrix(&a);
        let lb = l_matrix(&b);
        assert_eq!(la.column(0), lb.column(1));
        assert_eq!(la.column(1), lb.column(0));
    }

    #[test]
    fn diameter_is_max_norm_and_translation_invariant() {
        let s = set(&[0.0, 0.0], &[&[1.0, 0.0], &[0.0, 2.0]]);
        assert_eq!(approx_diameter(&s), 2.0);
        let t = set(&[5.0, -3.0], &[&[1.0, 0.0], &[0.0, 2.0]]);
        assert_eq!(approx_diameter(&t), 2.0);
        assert_eq!(approx_diameter(&set(&[0.0], &[&[0.1]])), 0.1);
    }

    #[test]
    fn rejects_zero_direction_and_dimension_mismatch() {
        assert!(SampleSet::new(v(&[0.0]), vec![v(&[0.0])]).is_err());
        assert!(SampleSet::new(v(&[0.0, 0.0]), vec![v(&[1.0])]).is_err());
        assert!(SampleSet::new(v(&[0.0]), vec![]).is_err());
    }

    #[test]
    fn reflect_gives_unit_stretch_zero_angles() {
        let s = set(&[0.3, -0.2], &[&[1.0, 0.0], &[0.5, 0.5]]);
        let pair = reflect(&s);
        assert_eq!(pair.tilde_dirs(), s.dirs());
        let geo = geometry(&pair).unwrap();
        assert!(geo.k.iter().all(|&k| k == 1.0));
        assert!(geo.theta.iter().all(|&t| t == 0.0));
        assert_eq!(geo.big_theta, 0.0);
        assert_eq!(geo.d, Matrix::identity(2, 2));
    }

    #[test]
    fn stretch_and_angle_example() {
        let s = set(&[0.0, 0.0], &[&[3.0, 4.0]]);
        let pair = AdaptedPair::new(s, vec![v(&[0.0, 10.0])]).unwrap();
        let geo = geometry(&pair).unwrap();
        assert_relative_eq!(geo.k[0], 2.0, epsilon = 1e-15);
        // inner product 40 / (5 * 10) = 0.8
        assert_relative_eq!(geo.theta[0], 0.8f64.acos(), epsilon = 1e-15);
    }

    #[test]
    fn quarter_turn_rotation_matrix() {
        let s = set(&[0.0, 0.0], &[&[1.0, 0.0]]);
        let pair = AdaptedPair::new(s, vec![v(&[0.0, 1.0])]).unwrap();
        let geo = geometry(&pair).unwrap();
        let a = &geo.rotations[0];
        assert_relative_eq!(a, &Matrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]), epsilon = 1e-15);
        assert_relative_eq!(a * v(&[1.0, 0.0]), v(&[0.0, 1.0]), epsilon = 1e-15);
    }

    #[test]
    fn antiparallel_is_degenerate() {
        let s = set(&[0.0, 0.0], &[&[1.0, 0.0]]);
        let pair = AdaptedPair::new(s, vec![v(&[-2.0, 0.0])]).unwrap();
        assert!(matches!(geometry(&pair), Err(Error::DegenerateRotation { index: 0 })));
        // 1-D antiparallel likewise
        let s1 = set(&[0.0], &[&[0.1]]);
        let pair1 = AdaptedPair::new(s1, vec![v(&[-0.2])]).unwrap();
        assert!(matches!(geometry(&pair1), Err(Error::DegenerateRotation { index: 0 })));
    }

    #[test]
    fn one_dimensional_parallel_is_fine() {
        let s = set(&[0.0], &[&[0.1]]);
        let pair = AdaptedPair::new(s, vec![v(&[0.2])]).unwrap();
        let geo = geometry(&pair).unwrap();
        assert_relative_eq!(geo.k[0], 2.0, epsilon = 1e-15);
        assert_eq!(geo.theta[0], 0.0);
        assert_eq!(geo.d, Matrix::from_row_slice(1, 1, &[4.0]));
    }

    fn unit_dirs_strategy(n: usize, p: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        proptest::collection::vec(proptest::collection::vec(-1.0f64..1.0, n), p).prop_filter(
            "directions must be nonzero and not antiparallel-degenerate",
            |dirs| dirs.iter().all(|d| d.iter().map(|x| x * x).sum::<f64>().sqrt() > 1e-3),
        )
    }

    proptest! {
        #[test]
        fn rotation_maps_directions(
            n in 2usize..=6,
            p in 1usize..=6,
            seed_dirs in unit_dirs_strategy(6, 6),
            seed_tilde in unit_dirs_strategy(6, 6),
        ) {
            let dirs: Vec<Vector> = (0..p).map(|i| Vector::from_row_slice(&seed_dirs[i][..n])).collect();
            let tilde: Vec<Vector> = (0..p).map(|i| Vector::from_row_slice(&seed_tilde[i][..n])).collect();
            prop_assume!(dirs.iter().all(|d| d.norm() > 1e-3));
            prop_assume!(tilde.iter().all(|d| d.norm() > 1e-3));
            // keep clear of the antiparallel degeneracy
            prop_assume!(dirs.iter().zip(&tilde).all(|(d, t)| d.dot(t) / (d.norm() * t.norm()) > -0.999));
            let s = SampleSet::new(Vector::zeros(n), dirs.clone()).unwrap();
            let pair = AdaptedPair::new(s, tilde.clone()).unwrap();
            let geo = geometry(&pair).unwrap();
            for i in 0..p {
                let a = &geo.rotations[i];
                let pbasis = &geo.bases[i];
                let eye = Matrix::identity(n, n);
                prop_assert!(crate::linalg::spectral_norm(&(a.transpose() * a - &eye)).unwrap() <= 1e-10);
                prop_assert!(crate::linalg::spectral_norm(&(pbasis.transpose() * pbasis - &eye)).unwrap() <= 1e-10);
                let mapped = a * (&dirs[i] / dirs[i].norm());
                let target = &tilde[i] / tilde[i].norm();
                prop_assert!((mapped - target).norm() <= 1e-10);
            }
        }

        #[test]
        fn stretch_and_angle_scale_invariant(
            scale in 0.01f64..100.0,
            dx in -1.0f64..1.0,
            dy in 0.1f64..1.0,
            tx in -1.0f64..1.0,
            ty in 0.1f64..1.0,
        ) {
            let s1 = SampleSet::new(Vector::zeros(2), vec![v(&[dx, dy])]).unwrap();
            let p1 = AdaptedPair::new(s1, vec![v(&[tx, ty])]).unwrap();
            let s2 = SampleSet::new(Vector::zeros(2), vec![v(&[dx * scale, dy * scale])]).unwrap();
            let p2 = AdaptedPair::new(s2, vec![v(&[tx * scale, ty * scale])]).unwrap();
            let g1 = geometry(&p1).unwrap();
            let g2 = geometry(&p2).unwrap();
            prop_assert!((g1.k[0] - g2.k[0]).abs() <= 1e-10 * g1.k[0].max(1.0));
            prop_assert!((g1.theta[0] - g2.theta[0]).abs() <= 1e-10);
        }
    }
}
