//! The (A, B) matrix pair realizing each simplex derivative in the common
//! form `(A^T)^dagger B f(Y)`, plus evaluation and the per-scheme difference
//! vectors.
//!
//! Point ordering is part of the public contract: `y0` first, then the plus
//! points `y0 + d_i` in direction order, then (for the centred kinds) the
//! reflected points in the same order. The B matrices assume exactly this
//! ordering.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{approx_diameter, geometry, l_matrix, AdaptedPair, GeometryReport, SampleSet};
use crate::linalg::{pinv, Matrix, Vector};

/// The three supported simplex derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SchemeKind {
    #[serde(rename = "GSG")]
    Gsg,
    #[serde(rename = "GCSG")]
    Gcsg,
    #[serde(rename = "GACSG")]
    Gacsg,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Gsg => "GSG",
            SchemeKind::Gcsg => "GCSG",
            SchemeKind::Gacsg => "GACSG",
        }
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gsg" => Ok(SchemeKind::Gsg),
            "gcsg" => Ok(SchemeKind::Gcsg),
            "gacsg" => Ok(SchemeKind::Gacsg),
            other => Err(Error::Parse(format!("unknown scheme `{other}` (expected gsg, gcsg, or gacsg)"))),
        }
    }
}

/// A built scheme: the matrices of the general form, the evaluation points
/// in contract order, and (for GACSG) the reflection geometry.
#[derive(Debug, Clone)]
pub struct SchemeMatrices {
    pub kind: SchemeKind,
    /// `n x z` matrix whose transpose gets pseudo-inverted.
    pub a: Matrix,
    /// `z x (q + 1)` matrix applied to the function values.
    pub b: Matrix,
    /// Evaluation points, length `q + 1`, in contract order.
    pub points: Vec<Vector>,
    pub z: usize,
    pub q: usize,
    pub p: usize,
    /// Stretch/rotation data; present only for GACSG.
    pub geometry: Option<GeometryReport>,
    y0: Vector,
    delta: f64,
}

impl SchemeMatrices {
    /// Ambient dimension n.
    pub fn dim(&self) -> usize {
        self.y0.len()
    }

    pub fn y0(&self) -> &Vector {
        &self.y0
    }

    /// Approximate diameter of the plus set, `max_i |d_i|`.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// JSON form with the wire field names `kind, A, B, points, z, q, p`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SchemeMatricesJson::from(self)).expect("scheme serialization cannot fail")
    }
}

/// Wire format of [`SchemeMatrices`]; matrices are row-major nested arrays.
#[derive(Debug, Serialize, Deserialize)]
struct SchemeMatricesJson {
    kind: SchemeKind,
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    b: Vec<Vec<f64>>,
    points: Vec<Vec<f64>>,
    z: usize,
    q: usize,
    p: usize,
}

fn matrix_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|r| m.row(r).iter().cloned().collect()).collect()
}

impl From<&SchemeMatrices> for SchemeMatricesJson {
    fn from(s: &SchemeMatrices) -> Self {
        Self {
            kind: s.kind,
            a: matrix_rows(&s.a),
            b: matrix_rows(&s.b),
            points: s.points.iter().map(|p| p.iter().cloned().collect()).collect(),
            z: s.z,
            q: s.q,
            p: s.p,
        }
    }
}

/// Function values at the scheme points, in the scheme's point order.
#[derive(Debug, Clone, PartialEq)]
pub struct FValues {
    values: Vec<f64>,
}

impl FValues {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("function value vector is empty".into()));
        }
        if let Some(bad) = values.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite function value {bad}")));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `f_M = max |f(y)|` over the sample set.
    pub fn f_max(&self) -> f64 {
        self.values.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    pub fn as_vector(&self) -> Vector {
        Vector::from_row_slice(&self.values)
    }
}

/// Fails with [`Error::NotPoised`] when A lacks full numerical rank.
fn check_poised(a: &Matrix, rank_rtol: f64) -> Result<()> {
    let r = pinv(a, rank_rtol)?;
    let full = a.nrows().min(a.ncols());
    if r.numerical_rank < full {
        let smax = r.singular_values[0];
        let smin = *r.singular_values.last().unwrap();
        let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
        return Err(Error::NotPoised { ratio, rtol: rank_rtol });
    }
    Ok(())
}

/// Generalized simplex gradient: `A = L`, `B = [-1 | I_p]`.
pub fn build_gsg(s: &SampleSet, rank_rtol: f64) -> Result<SchemeMatrices> {
    let p = s.len();
    let a = l_matrix(s);
    check_poised(&a, rank_rtol)?;
    let mut b = Matrix::zeros(p, p + 1);
    for i in 0..p {
        b[(i, 0)] = -1.0;
        b[(i, i + 1)] = 1.0;
    }
    let mut points = Vec::with_capacity(p + 1);
    points.push(s.y0().clone());
    points.extend(s.dirs().iter().map(|d| s.y0() + d));
    Ok(SchemeMatrices {
        kind: SchemeKind::Gsg,
        a,
        b,
        points,
        z: p,
        q: p,
        p,
        geometry: None,
        y0: s.y0().clone(),
        delta: approx_diameter(s),
    })
}

/// Generalized centred simplex gradient: `A = 2L`, `B = [0 | I_p | -I_p]`.
pub fn build_gcsg(s: &SampleSet, rank_rtol: f64) -> Result<SchemeMatrices> {
    let p = s.len();
    let a = l_matrix(s) * 2.0;
    check_poised(&a, rank_rtol)?;
    let mut b = Matrix::zeros(p, 2 * p + 1);
    for i in 0..p {
        b[(i, i + 1)] = 1.0;
        b[(i, p + i + 1)] = -1.0;
    }
    let mut points = Vec::with_capacity(2 * p + 1);
    points.push(s.y0().clone());
    points.extend(s.dirs().iter().map(|d| s.y0() + d));
    points.extend(s.dirs().iter().map(|d| s.y0() - d));
    Ok(SchemeMatrices {
        kind: SchemeKind::Gcsg,
        a,
        b,
        points,
        z: p,
        q: 2 * p,
        p,
        geometry: None,
        y0: s.y0().clone(),
        delta: approx_diameter(s),
    })
}

/// Generalized adapted centred simplex gradient: column i of `A` is
/// `k_i^2 d_i + tilde_d_i`, and row i of `B` is
/// `(1 - k_i^2, ..., k_i^2 at slot i, ..., -1 at slot p + i, ...)`.
pub fn build_gacsg(pair: &AdaptedPair, rank_rtol: f64) -> Result<SchemeMatrices> {
    let geo = geometry(pair)?;
    let s = pair.plus();
    let n = s.dim();
    let p = s.len();
    let mut a = Matrix::zeros(n, p);
    for i in 0..p {
        let k2 = geo.k[i] * geo.k[i];
        let col = k2 * &s.dirs()[i] + &pair.tilde_dirs()[i];
        a.set_column(i, &col);
    }
    check_poised(&a, rank_rtol)?;
    let mut b = Matrix::zeros(p, 2 * p + 1);
    for i in 0..p {
        let k2 = geo.k[i] * geo.k[i];
        b[(i, 0)] = 1.0 - k2;
        b[(i, i + 1)] = k2;
        b[(i, p + i + 1)] = -1.0;
    }
    let mut points = Vec::with_capacity(2 * p + 1);
    points.push(s.y0().clone());
    points.extend(s.dirs().iter().map(|d| s.y0() + d));
    points.extend(pair.tilde_dirs().iter().map(|d| s.y0() - d));
    Ok(SchemeMatrices {
        kind: SchemeKind::Gacsg,
        a,
        b,
        points,
        z: p,
        q: 2 * p,
        p,
        geometry: Some(geo),
        y0: s.y0().clone(),
        delta: approx_diameter(s),
    })
}

/// The simplex derivative `(A^T)^dagger B f(Y)`.
pub fn evaluate(sch: &SchemeMatrices, f: &FValues, rank_rtol: f64) -> Result<Vector> {
    let delta = delta_vector(sch, f)?;
    let at_pinv = pinv(&sch.a.transpose(), rank_rtol)?.pinv;
    Ok(at_pinv * delta)
}

/// The difference vector `B f(Y)`; entrywise this equals the per-scheme
/// delta vector of the defining formulas.
pub fn delta_vector(sch: &SchemeMatrices, f: &FValues) -> Result<Vector> {
    if f.len() != sch.q + 1 {
        return Err(Error::InvalidInput(format!(
            "expected {} function values for {}, got {}",
            sch.q + 1,
            sch.kind.name(),
            f.len()
        )));
    }
    Ok(&sch.b * f.as_vector())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DEFAULT_RANK_RTOL;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn v(data: &[f64]) -> Vector {
        Vector::from_row_slice(data)
    }

    fn set(y0: &[f64], dirs: &[&[f64]]) -> SampleSet {
        SampleSet::new(v(y0), dirs.iter().map(|d| v(d)).collect()).unwrap()
    }

    fn eval_at(sch: &SchemeMatrices, f: impl Fn(&Vector) -> f64) -> FValues {
        FValues::new(sch.points.iter().map(|p| f(p)).collect()).unwrap()
    }

    #[test]
    fn gsg_construction_canonical_basis() {
        let s = set(&[0.0, 0.0], &[&[1.0, 0.0], &[0.0, 1.0]]);
        let sch = build_gsg(&s, DEFAULT_RANK_RTOL).unwrap();
        assert_eq!(sch.a, Matrix::identity(2, 2));
        assert_eq!(sch.b, Matrix::from_row_slice(2, 3, &[-1.0, 1.0, 0.0, -1.0, 0.0, 1.0]));
        assert_eq!((sch.z, sch.q, sch.p), (2, 2, 2));
        assert_eq!(sch.points.len(), 3);
    }

    #[test]
    fn gsg_one_dimensional() {
        let s = set(&[0.0], &[&[0.1]]);
        let sch = build_gsg(&s, DEFAULT_RANK_RTOL).unwrap();
        assert_eq!(sch.a, Matrix::from_row_slice(1, 1, &[0.1]));
        assert_eq!(sch.b, Matrix::from_row_slice(1, 2, &[-1.0, 1.0]));
    }

    #[test]
    fn gsg_near_collinear_is_not_poised() {
        let s = set(&[0.0, 0.0], &[&[1.0, 0.0], &[1.0, 1e-15]]);
        assert!(matches!(build_gsg(&s, 1e-12), Err(Error::NotPoised { .. })));
    }

    #[test]
    fn gcsg_construction_one_dimensional() {
        let h = 0.25;
        let s = set(&[0.0], &[&[h]]);
        let sch = build_gcsg(&s, DEFAULT_RANK_RTOL).unwrap();
        assert_eq!(sch.a, Matrix::from_row_slice(1, 1, &[2.0 * h]));
        assert_eq!(sch.b, Matrix::from_row_slice(1, 3, &[0.0, 1.0, -1.0]));
        assert_eq!(sch.points, vec![v(&[0.0]), v(&[h]), v(&[-h])]);
    }

    #[test]
    fn gcsg_delta_ignores_reference_value() {
        let s = set(&[0.0, 0.0], &[&[0.1, 0.0], &[0.0, 0.1]]);
        let sch = build_gcsg(&s, DEFAULT_RANK_RTOL).unwrap();
        let f1 = eval_at(&sch, |x| x[0] * x[0] + x[1]);
        let mut raw = f1.values().to_vec();
        raw[0] += 1234.5; // the zero column of B must cancel f(y0)
        let f2 = FValues::new(raw).unwrap();
        assert_eq!(delta_vector(&sch, &f1).unwrap(), delta_vector(&sch, &f2).unwrap());
    }

    #[test]
    fn gacsg_one_dimensional_example() {
        let s = set(&[0.0], &[&[0.1]]);
        let pair = AdaptedPair::new(s, vec![v(&[0.2])]).unwrap();
        let sch = build_gacsg(&pair, DEFAULT_RANK_RTOL).unwrap();
        // k = 2, D = [4], A = k^2 d + d~ = 0.6, B = [1 - k^2, k^2, -1]
        assert_relative_eq!(sch.a[(0, 0)], 0.6, epsilon = 1e-15);
        assert_relative_eq!(sch.b, Matrix::from_row_slice(1, 3, &[-3.0, 4.0, -1.0]), epsilon = 1e-15);
        let geo = sch.geometry.as_ref().unwrap();
        assert_relative_eq!(geo.k[0], 2.0, epsilon = 1e-15);

        // f = x^3: delta = 4(0.001) - (-0.008) = 0.012; estimate = 0.012/0.6 = 0.02
        let f = eval_at(&sch, |x| x[0].powi(3));
        let d = delta_vector(&sch, &f).unwrap();
        assert_relative_eq!(d[0], 0.012, epsilon = 1e-15);
        let g = evaluate(&sch, &f, DEFAULT_RANK_RTOL).unwrap();
        assert_relative_eq!(g[0], 0.02, epsilon = 1e-14);
    }

    #[test]
    fn gacsg_with_exact_reflection_equals_gcsg() {
        let s = set(&[0.1, -0.2], &[&[0.3, 0.1], &[-0.05, 0.2]]);
        let pair = crate::geometry::reflect(&s);
        let acs = build_gacsg(&pair, DEFAULT_RANK_RTOL).unwrap();
        let cs = build_gcsg(&s, DEFAULT_RANK_RTOL).unwrap();
        assert_eq!(acs.a, cs.a);
        assert_eq!(acs.b, cs.b);
        assert_eq!(acs.points, cs.points);
    }

    #[test]
    fn evaluate_exact_on_linear() {
        let s = set(&[0.0, 0.0], &[&[1.0, 0.0], &[0.0, 1.0]]);
        let sch = build_gsg(&s, DEFAULT_RANK_RTOL).unwrap();
        let f = eval_at(&sch, |x| 3.0 * x[0] + 4.0 * x[1]);
        let g = evaluate(&sch, &f, DEFAULT_RANK_RTOL).unwrap();
        assert_relative_eq!(g, v(&[3.0, 4.0]), epsilon = 1e-14);
    }

    #[test]
    fn evaluate_forward_difference_of_square() {
        let s = set(&[0.0], &[&[0.1]]);
        let sch = build_gsg(&s, DEFAULT_RANK_RTOL).unwrap();
        let f = eval_at(&sch, |x| x[0] * x[0]);
        let g = evaluate(&sch, &f, DEFAULT_RANK_RTOL).unwrap();
        assert_relative_eq!(g[0], 0.1, epsilon = 1e-14);
    }

    #[test]
    fn evaluate_central_difference_of_cube() {
        let s = set(&[0.0], &[&[0.1]]);
        let sch = build_gcsg(&s, DEFAULT_RANK_RTOL).unwrap();
        let f = eval_at(&sch, |x| x[0].powi(3));
        let g = evaluate(&sch, &f, DEFAULT_RANK_RTOL).unwrap();
        assert_relative_eq!(g[0], 0.01, epsilon = 1e-15);
        // and the difference vector is 2 h^3
        let d = delta_vector(&sch, &f).unwrap();
        assert_relative_eq!(d[0], 0.002, epsilon = 1e-17);
    }

    #[test]
    fn delta_vector_of_constant_is_zero() {
        let s = set(&[0.5, 0.5], &[&[0.1, 0.0], &[0.0, 0.1]]);
        for sch in [build_gsg(&s, DEFAULT_RANK_RTOL).unwrap(), build_gcsg(&s, DEFAULT_RANK_RTOL).unwrap()] {
            let f = eval_at(&sch, |_| 7.25);
            assert_eq!(delta_vector(&sch, &f).unwrap(), Vector::zeros(sch.z));
        }
    }

    #[test]
    fn length_mismatch_is_invalid() {
        let s = set(&[0.0], &[&[0.1]]);
        let sch = build_gcsg(&s, DEFAULT_RANK_RTOL).unwrap();
        let f = FValues::new(vec![1.0, 2.0]).unwrap();
        assert!(matches!(evaluate(&sch, &f, DEFAULT_RANK_RTOL), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn scheme_json_field_names() {
        let s = set(&[0.0], &[&[0.1]]);
        let sch = build_gsg(&s, DEFAULT_RANK_RTOL).unwrap();
        let j = sch.to_json();
        assert_eq!(j["kind"], "GSG");
        assert_eq!(j["z"], 1);
        assert_eq!(j["q"], 1);
        assert_eq!(j["p"], 1);
        assert_eq!(j["A"][0][0], 0.1);
        assert_eq!(j["B"][0], serde_json::json!([-1.0, 1.0]));
        assert_eq!(j["points"].as_array().unwrap().len(), 2);
    }

    /// Random full-rank sample sets in n dimensions with p <= n directions.
    fn random_set(n: usize, p: usize, raw: &[f64]) -> Option<SampleSet> {
        let dirs: Vec<Vector> = (0..p)
            .map(|i| Vector::from_row_slice(&raw[i * n..(i + 1) * n]))
            .collect();
        if dirs.iter().any(|d| d.norm() < 1e-2) {
            return None;
        }
        SampleSet::new(Vector::zeros(n), dirs).ok()
    }

    proptest! {
        #[test]
        fn gsg_and_centred_kinds_exact_on_affine(
            n in 1usize..=5,
            p in 1usize..=5,
            raw in proptest::collection::vec(-1.0f64..1.0, 25),
            coeffs in proptest::collection::vec(-2.0f64..2.0, 5),
        ) {
            prop_assume!(p <= n);
            let Some(s) = random_set(n, p, &raw) else { return Ok(()); };
            let grad = Vector::from_row_slice(&coeffs[..n]);
            let f = |x: &Vector| 1.5 + grad.dot(x);

            for build in [build_gsg, build_gcsg] {
                let Ok(sch) = build(&s, DEFAULT_RANK_RTOL) else { return Ok(()); };
                let fv = FValues::new(sch.points.iter().map(&f).collect()).unwrap();
                let est = evaluate(&sch, &fv, DEFAULT_RANK_RTOL).unwrap();
                let proj = crate::linalg::col_projector(&sch.a).unwrap();
                let err = (&proj * &grad - &proj * est).norm();
                prop_assert!(err <= 1e-10 * grad.norm().max(1.0), "err = {err}");
            }
        }

        #[test]
        fn gcsg_is_average_of_two_gsgs(
            n in 1usize..=4,
            p in 1usize..=4,
            raw in proptest::collection::vec(-1.0f64..1.0, 16),
            c in proptest::collection::vec(-1.0f64..1.0, 4),
        ) {
            prop_assume!(p <= n);
            let Some(s) = random_set(n, p, &raw) else { return Ok(()); };
            let f = |x: &Vector| {
                let lin: f64 = x.iter().zip(&c).map(|(a, b)| a * b).sum();
                (x.norm_squared() * 0.5 + lin).sin()
            };
            let Ok(cs) = build_gcsg(&s, DEFAULT_RANK_RTOL) else { return Ok(()); };
            let fv = FValues::new(cs.points.iter().map(&f).collect()).unwrap();
            let est = evaluate(&cs, &fv, DEFAULT_RANK_RTOL).unwrap();

            let plus = build_gsg(&s, DEFAULT_RANK_RTOL).unwrap();
            let fv_plus = FValues::new(plus.points.iter().map(&f).collect()).unwrap();
            let g_plus = evaluate(&plus, &fv_plus, DEFAULT_RANK_RTOL).unwrap();

            let neg_dirs: Vec<Vector> = s.dirs().iter().map(|d| -d).collect();
            let s_minus = SampleSet::new(s.y0().clone(), neg_dirs).unwrap();
            let minus = build_gsg(&s_minus, DEFAULT_RANK_RTOL).unwrap();
            let fv_minus = FValues::new(minus.points.iter().map(&f).collect()).unwrap();
            let g_minus = evaluate(&minus, &fv_minus, DEFAULT_RANK_RTOL).unwrap();

            let avg = (g_plus + g_minus) * 0.5;
            prop_assert!((est.clone() - avg).norm() <= 1e-12 * est.norm().max(1.0));
        }

        #[test]
        fn evaluate_invariant_under_joint_scaling_for_affine(
            scale in 0.01f64..100.0,
            raw in proptest::collection::vec(-1.0f64..1.0, 4),
            coeffs in proptest::collection::vec(-2.0f64..2.0, 2),
        ) {
            let Some(s) = random_set(2, 2, &raw) else { return Ok(()); };
            let grad = Vector::from_row_slice(&coeffs[..2]);
            let f = |x: &Vector| grad.dot(x) - 0.75;
            let Ok(sch1) = build_gsg(&s, DEFAULT_RANK_RTOL) else { return Ok(()); };
            let scaled_dirs: Vec<Vector> = s.dirs().iter().map(|d| d * scale).collect();
            let s2 = SampleSet::new(s.y0().clone(), scaled_dirs).unwrap();
            let Ok(sch2) = build_gsg(&s2, DEFAULT_RANK_RTOL) else { return Ok(()); };
            let f1 = FValues::new(sch1.points.iter().map(&f).collect()).unwrap();
            let f2 = FValues::new(sch2.points.iter().map(&f).collect()).unwrap();
            let g1 = evaluate(&sch1, &f1, DEFAULT_RANK_RTOL).unwrap();
            let g2 = evaluate(&sch2, &f2, DEFAULT_RANK_RTOL).unwrap();
            prop_assert!((g1.clone() - g2).norm() <= 1e-12 * g1.norm().max(1.0));
        }

        #[test]
        fn delta_vector_matches_defining_formulas(
            raw in proptest::collection::vec(-1.0f64..1.0, 6),
            tilde_raw in proptest::collection::vec(0.05f64..1.0, 6),
            vals in proptest::collection::vec(-3.0f64..3.0, 7),
        ) {
            let Some(s) = random_set(3, 1, &raw) else { return Ok(()); };

            // GSG: f(y0 + d_i) - f(y0)
            let gsg = build_gsg(&s, DEFAULT_RANK_RTOL).unwrap();
            let f = FValues::new(vals[..2].to_vec()).unwrap();
            let d = delta_vector(&gsg, &f).unwrap();
            prop_assert!((d[0] - (vals[1] - vals[0])).abs() <= 1e-14);

            // GCSG: f(y0 + d_i) - f(y0 - d_i)
            let gcsg = build_gcsg(&s, DEFAULT_RANK_RTOL).unwrap();
            let f = FValues::new(vals[..3].to_vec()).unwrap();
            let d = delta_vector(&gcsg, &f).unwrap();
            prop_assert!((d[0] - (vals[1] - vals[2])).abs() <= 1e-14);

            // GACSG: k^2 (f(y0 + d_i) - f(y0)) - (f(y0 - d~_i) - f(y0))
            let tilde = vec![Vector::from_row_slice(&tilde_raw[..3])];
            let pair = AdaptedPair::new(s, tilde).unwrap();
            prop_assume!(crate::geometry::geometry(&pair).is_ok());
            let Ok(gacsg) = build_gacsg(&pair, DEFAULT_RANK_RTOL) else { return Ok(()); };
            let k2 = {
                let g = gacsg.geometry.as_ref().unwrap();
                g.k[0] * g.k[0]
            };
            let f = FValues::new(vals[..3].to_vec()).unwrap();
            let d = delta_vector(&gacsg, &f).unwrap();
            let direct = k2 * (vals[1] - vals[0]) - (vals[2] - vals[0]);
            prop_assert!((d[0] - direct).abs() <= 1e-14 * direct.abs().max(1.0));
        }
    }
}
