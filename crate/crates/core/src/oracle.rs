//! Test functions with analytic gradients, Hessians, and known Lipschitz
//! constants on a stated ball, plus the multiplicative noise model
//! `f_bar(x) = (1 + eps_x) f(x)`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, Matrix, Vector};
use crate::schemes::{FValues, SchemeMatrices};

type EvalFn = Arc<dyn Fn(&Vector) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;
type HessFn = Arc<dyn Fn(&Vector) -> Matrix + Send + Sync>;

/// Ball on which the Lipschitz constants of a test function are valid.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub center: Vector,
    pub radius: f64,
}

impl Region {
    pub fn contains(&self, x: &Vector) -> bool {
        (x - &self.center).norm() <= self.radius
    }
}

/// A black-box-evaluable function with analytic derivatives and known
/// Lipschitz constants on [`Region`].
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    dim: usize,
    eval: EvalFn,
    grad: GradFn,
    hess: HessFn,
    nu_grad: f64,
    nu_hess: f64,
    region: Region,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("nu_grad", &self.nu_grad)
            .field("nu_hess", &self.nu_hess)
            .field("region", &self.region)
            .finish()
    }
}

impl TestFunction {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &Vector) -> f64 {
        (self.eval)(x)
    }

    pub fn grad(&self, x: &Vector) -> Vector {
        (self.grad)(x)
    }

    pub fn hess(&self, x: &Vector) -> Matrix {
        (self.hess)(x)
    }

    /// Lipschitz constant of the gradient on the stated region.
    pub fn nu_grad(&self) -> f64 {
        self.nu_grad
    }

    /// Lipschitz constant of the Hessian on the stated region.
    pub fn nu_hess(&self) -> f64 {
        self.nu_hess
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    /// `f(x) = c^T x`, exact gradient everywhere.
    pub fn affine(c: Vector) -> Self {
        let dim = c.len();
        let grad_c = c.clone();
        let hess_dim = dim;
        Self {
            name: "affine".into(),
            dim,
            eval: Arc::new(move |x| c.dot(x)),
            grad: Arc::new(move |_| grad_c.clone()),
            hess: Arc::new(move |_| Matrix::zeros(hess_dim, hess_dim)),
            nu_grad: 0.0,
            nu_hess: 0.0,
            region: Region { center: Vector::zeros(dim), radius: f64::INFINITY },
        }
    }

    /// `f(x) = x^T H x / 2 + b^T x + c` with symmetric `H`; `nu_grad = |H|`.
    pub fn quad(name: &str, h: Matrix, b: Vector, c: f64) -> Result<Self> {
        if h.nrows() != h.ncols() || h.nrows() != b.len() {
            return Err(Error::InvalidInput("quadratic needs square H matching b".into()));
        }
        let nh = spectral_norm(&h)?;
        if spectral_norm(&(h.transpose() - &h))? > 1e-12 * nh.max(1.0) {
            return Err(Error::InvalidInput("quadratic H must be symmetric".into()));
        }
        let dim = b.len();
        let (he, hg, hh) = (h.clone(), h.clone(), h);
        let be = b.clone();
        Ok(Self {
            name: name.into(),
            dim,
            eval: Arc::new(move |x| 0.5 * x.dot(&(&he * x)) + be.dot(x) + c),
            grad: Arc::new(move |x| &hg * x + &b),
            hess: Arc::new(move |_| hh.clone()),
            nu_grad: nh,
            nu_hess: 0.0,
            region: Region { center: Vector::zeros(dim), radius: f64::INFINITY },
        })
    }

    /// `f(x) = x^3` in one dimension. The Hessian `6x` has global Lipschitz
    /// constant 6; the gradient `3x^2` has constant 6 on the unit ball.
    pub fn cubic1d() -> Self {
        Self {
            name: "cubic1d".into(),
            dim: 1,
            eval: Arc::new(|x| x[0].powi(3)),
            grad: Arc::new(|x| Vector::from_row_slice(&[3.0 * x[0] * x[0]])),
            hess: Arc::new(|x| Matrix::from_row_slice(1, 1, &[6.0 * x[0]])),
            nu_grad: 6.0,
            nu_hess: 6.0,
            region: Region { center: Vector::zeros(1), radius: 1.0 },
        }
    }

    /// `f(x) = sum_i exp(x_i)`. On the unit ball around the origin every
    /// derivative is bounded by `e`, so `nu_grad = nu_hess = e`.
    pub fn sum_exp(dim: usize) -> Self {
        Self {
            name: format!("sum-exp{dim}"),
            dim,
            eval: Arc::new(|x| x.iter().map(|v| v.exp()).sum()),
            grad: Arc::new(|x| x.map(|v| v.exp())),
            hess: Arc::new(|x| Matrix::from_diagonal(&x.map(|v| v.exp()))),
            nu_grad: std::f64::consts::E,
            nu_hess: std::f64::consts::E,
            region: Region { center: Vector::zeros(dim), radius: 1.0 },
        }
    }

    /// The 2-D Rosenbrock function on the ball of radius 0.5 around (1, 1).
    ///
    /// The Lipschitz constants were obtained by maximizing |hess| and the
    /// directional third derivative norm over a dense grid of the ball
    /// (sup |hess| = 2471.0, sup |D3f[u]| = 3665.3) and rounding up.
    pub fn rosenbrock2d() -> Self {
        Self {
            name: "rosenbrock2d".into(),
            dim: 2,
            eval: Arc::new(|x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)),
            grad: Arc::new(|x| {
                Vector::from_row_slice(&[
                    -2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] * x[0]),
                    200.0 * (x[1] - x[0] * x[0]),
                ])
            }),
            hess: Arc::new(|x| {
                Matrix::from_row_slice(2, 2, &[
                    2.0 - 400.0 * x[1] + 1200.0 * x[0] * x[0],
                    -400.0 * x[0],
                    -400.0 * x[0],
                    200.0,
                ])
            }),
            nu_grad: 2475.0,
            nu_hess: 3670.0,
            region: Region { center: Vector::from_row_slice(&[1.0, 1.0]), radius: 0.5 },
        }
    }
}

/// The built-in test functions.
pub fn builtin_registry() -> Vec<TestFunction> {
    let mut affine = TestFunction::affine(Vector::from_row_slice(&[3.0, 4.0]));
    affine.name = "affine".into();
    let quad = TestFunction::quad(
        "quad",
        Matrix::from_row_slice(1, 1, &[2.0]),
        Vector::zeros(1),
        0.0,
    )
    .expect("builtin quadratic is valid");
    vec![
        affine,
        quad,
        TestFunction::cubic1d(),
        TestFunction::sum_exp(2),
        TestFunction::sum_exp(3),
        TestFunction::rosenbrock2d(),
    ]
}

/// Looks a test function up by name in the built-in registry.
pub fn lookup(name: &str) -> Result<TestFunction> {
    builtin_registry()
        .into_iter()
        .find(|f| f.name() == name)
        .ok_or_else(|| Error::UnknownFunction(name.into()))
}

/// How the per-call perturbation `eps_x` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseMode {
    /// Exact values.
    Off,
    /// `eps_x = +eps` on every call.
    FixedPlus,
    /// Sign alternates with the call index.
    FixedAlternating,
    /// `eps_x ~ U[-eps, eps]`, derived statelessly from (seed, call index).
    UniformRandom { seed: u64 },
}

/// Which perturbation form is applied.
///
/// Multiplicative `(1 + eps_x) f(x)` is the primary model; the additive form
/// `f(x) + eps_x` is a non-default extra for harness experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseForm {
    #[default]
    Multiplicative,
    Additive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    level: f64,
    mode: NoiseMode,
    form: NoiseForm,
}

impl NoiseModel {
    pub fn off() -> Self {
        Self { level: 0.0, mode: NoiseMode::Off, form: NoiseForm::Multiplicative }
    }

    pub fn fixed_plus(level: f64) -> Result<Self> {
        Self::new(level, NoiseMode::FixedPlus)
    }

    pub fn fixed_alternating(level: f64) -> Result<Self> {
        Self::new(level, NoiseMode::FixedAlternating)
    }

    pub fn uniform(level: f64, seed: u64) -> Result<Self> {
        Self::new(level, NoiseMode::UniformRandom { seed })
    }

    fn new(level: f64, mode: NoiseMode) -> Result<Self> {
        if !(level >= 0.0 && level.is_finite()) {
            return Err(Error::InvalidInput(format!("noise level must be finite and >= 0, got {level}")));
        }
        Ok(Self { level, mode, form: NoiseForm::Multiplicative })
    }

    pub fn with_form(mut self, form: NoiseForm) -> Self {
        self.form = form;
        self
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn mode(&self) -> NoiseMode {
        self.mode
    }

    pub fn form(&self) -> NoiseForm {
        self.form
    }

    /// The perturbation for a given call index; always within `[-level, level]`.
    pub fn epsilon_for(&self, call_index: usize) -> f64 {
        match self.mode {
            NoiseMode::Off => 0.0,
            NoiseMode::FixedPlus => self.level,
            NoiseMode::FixedAlternating => {
                if call_index % 2 == 0 {
                    self.level
                } else {
                    -self.level
                }
            }
            NoiseMode::UniformRandom { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(call_index as u64);
                let u: f64 = rng.gen();
                self.level * (2.0 * u - 1.0)
            }
        }
    }
}

/// The computed function value `(1 + eps_x) f(x)` (or `f(x) + eps_x` in the
/// additive form), deterministic given (mode, seed, call index).
pub fn evaluate_noisy(tf: &TestFunction, x: &Vector, nm: &NoiseModel, call_index: usize) -> f64 {
    let f = tf.eval(x);
    let eps = nm.epsilon_for(call_index);
    match nm.form() {
        NoiseForm::Multiplicative => (1.0 + eps) * f,
        NoiseForm::Additive => f + eps,
    }
}

/// Evaluates a test function at each scheme point in order, applying the
/// noise model with the point index as the call index.
pub fn fvalues_for(sch: &SchemeMatrices, tf: &TestFunction, nm: &NoiseModel) -> Result<FValues> {
    if tf.dim() != sch.dim() {
        return Err(Error::InvalidInput(format!(
            "function `{}` has dimension {} but the scheme has {}",
            tf.name(),
            tf.dim(),
            sch.dim()
        )));
    }
    FValues::new(
        sch.points
            .iter()
            .enumerate()
            .map(|(i, pt)| evaluate_noisy(tf, pt, nm, i))
            .collect(),
    )
}
