//! Approximation-error and floating-point-error bounds for the simplex
//! derivative schemes, and the minimal sample-set diameter that balances
//! the two.
//!
//! All floating point bounds assume the pseudo-inverse comes from a mixed
//! forward-backward stable algorithm with stability constant `C` and that
//! computed function values satisfy `f_bar(x) = (1 + eps_x) f(x)` with
//! `|eps_x| <= eps_star`; `eps_star` may equally be a noise level.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GeometryReport;
use crate::linalg::{singular_values, spectral_norm, Matrix, DEFAULT_RANK_RTOL};
use crate::schemes::{SchemeKind, SchemeMatrices};

/// Scalar inputs to the bound formulas.
///
/// `norm_lhat_dagger` is the hat-norm of the theorem's own matrix divided by
/// the diameter: `L/Delta` for GSG, `L+/Delta` for GCSG, and
/// `(L+ D - L~)/Delta` for GACSG. It is always derived through the exact
/// identity `|(M/Delta)^dagger| = Delta |M^dagger|`, never by re-factorizing
/// a scaled matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundInputs {
    /// Lipschitz constant of the gradient (first-order bounds) or the
    /// Hessian (second-order bounds) on the relevant ball.
    pub nu: f64,
    /// `max |f(y)|` over the sample set.
    pub f_max: f64,
    /// Stability constant of the pseudo-inverse algorithm.
    pub stability_c: f64,
    /// Machine precision, or the noise level standing in for it.
    pub eps_star: f64,
    pub p: usize,
    pub q: usize,
    /// `|A^dagger|` of the scheme matrix A.
    pub norm_a_dagger: f64,
    /// Condition number `kappa(A) = |A^dagger| |A|`.
    pub kappa_a: f64,
    /// `|B|` of the scheme matrix B.
    pub norm_b: f64,
    /// See the type-level note.
    pub norm_lhat_dagger: f64,
}

impl BoundInputs {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        nu: f64,
        f_max: f64,
        stability_c: f64,
        eps_star: f64,
        p: usize,
        q: usize,
        norm_a_dagger: f64,
        kappa_a: f64,
        norm_b: f64,
        norm_lhat_dagger: f64,
    ) -> Result<Self> {
        let positives = [
            ("C", stability_c),
            ("|A^dagger|", norm_a_dagger),
            ("kappa(A)", kappa_a),
            ("|B|", norm_b),
            ("|Lhat^dagger|", norm_lhat_dagger),
        ];
        for (name, v) in positives {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} must be positive and finite, got {v}")));
            }
        }
        for (name, v) in [("nu", nu), ("f_M", f_max), ("eps_star", eps_star)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} must be nonnegative and finite, got {v}")));
            }
        }
        if p == 0 || q < p {
            return Err(Error::InvalidInput(format!("need p >= 1 and q >= p, got p = {p}, q = {q}")));
        }
        Ok(Self { nu, f_max, stability_c, eps_star, p, q, norm_a_dagger, kappa_a, norm_b, norm_lhat_dagger })
    }

    /// Derives the matrix-dependent inputs from a built scheme.
    pub fn for_scheme(sch: &SchemeMatrices, nu: f64, f_max: f64, stability_c: f64, eps_star: f64) -> Result<Self> {
        let s = singular_values(&sch.a)?;
        let smax = s[0];
        let smin = *s.last().unwrap();
        if smin <= DEFAULT_RANK_RTOL * smax {
            return Err(Error::NotPoised {
                ratio: if smax > 0.0 { smin / smax } else { 0.0 },
                rtol: DEFAULT_RANK_RTOL,
            });
        }
        let norm_a_dagger = 1.0 / smin;
        let kappa_a = smax / smin;
        let norm_b = spectral_norm(&sch.b)?;
        let delta = sch.delta();
        // GCSG's theorem matrix is L+ = A/2; the others' is A itself.
        let norm_lhat_dagger = match sch.kind {
            SchemeKind::Gcsg => 2.0 * delta * norm_a_dagger,
            SchemeKind::Gsg | SchemeKind::Gacsg => delta * norm_a_dagger,
        };
        Self::new(nu, f_max, stability_c, eps_star, sch.p, sch.q, norm_a_dagger, kappa_a, norm_b, norm_lhat_dagger)
    }

    /// `C * eps_star * kappa(A)`, which every stability-dependent bound
    /// requires to be below 1.
    fn stability_margin(&self) -> f64 {
        self.stability_c * self.eps_star * self.kappa_a
    }
}

/// The recurring stability factor
/// `sqrt(2) C kappa / (1 - C kappa eps) + (C + 1) / ((1 - C eps)(1 - C kappa eps))`.
fn stability_factor(inputs: &BoundInputs) -> Result<f64> {
    let margin = inputs.stability_margin();
    if margin >= 1.0 {
        return Err(Error::StabilityViolation { value: margin });
    }
    let c = inputs.stability_c;
    let eps = inputs.eps_star;
    let kappa = inputs.kappa_a;
    Ok(2f64.sqrt() * c * kappa / (1.0 - c * kappa * eps) + (c + 1.0) / ((1.0 - c * eps) * (1.0 - c * kappa * eps)))
}

fn require_positive_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidInput(format!("Delta must be positive and finite, got {delta}")));
    }
    Ok(())
}

/// GSG approximation bound `(nu sqrt(p) / 2) |Lhat^dagger| Delta` on the
/// projected gradient error.
pub fn gsg_approx_bound(inputs: &BoundInputs, delta: f64) -> Result<f64> {
    require_positive_delta(delta)?;
    Ok(0.5 * inputs.nu * (inputs.p as f64).sqrt() * inputs.norm_lhat_dagger * delta)
}

/// GCSG approximation bound `(nu sqrt(p) / 6) |(Lhat+)^dagger| Delta^2`.
pub fn gcsg_approx_bound(inputs: &BoundInputs, delta: f64) -> Result<f64> {
    require_positive_delta(delta)?;
    Ok(inputs.nu * (inputs.p as f64).sqrt() / 6.0 * inputs.norm_lhat_dagger * delta * delta)
}

/// Per-direction curvature constants of the GACSG bound, derived from the
/// Hessian expressed in each rotation basis.
#[derive(Debug, Clone)]
pub struct CurvatureData {
    /// Hessian at the reference point.
    pub h: Matrix,
    /// Per-direction `kappa_1^i`.
    pub kappa1: Vec<f64>,
    /// Per-direction `kappa_2^i`.
    pub kappa2: Vec<f64>,
    /// `K_1 = max_i kappa_1^i`.
    pub k1: f64,
    /// `K_2 = max_i kappa_2^i`.
    pub k2: f64,
}

/// Computes `h^i = P_i H P_i^T` per basis and the constants
/// `kappa_1^i = sqrt((h_11 - h_22)^2 + 4 h_12^2)` and `kappa_2^i` with its
/// sums over the trailing coordinates (empty in dimension <= 2).
pub fn curvature_constants(h: &Matrix, bases: &[Matrix]) -> Result<CurvatureData> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(Error::InvalidInput("Hessian must be square".into()));
    }
    let nh = spectral_norm(h)?;
    if spectral_norm(&(h.transpose() - h))? > 1e-12 * nh.max(1.0) {
        return Err(Error::InvalidInput("Hessian must be symmetric".into()));
    }
    if bases.is_empty() {
        return Err(Error::InvalidInput("need at least one rotation basis".into()));
    }
    let mut kappa1 = Vec::with_capacity(bases.len());
    let mut kappa2 = Vec::with_capacity(bases.len());
    for (i, p) in bases.iter().enumerate() {
        if p.nrows() != n || p.ncols() != n {
            return Err(Error::InvalidInput(format!("basis {i} has wrong dimensions")));
        }
        let eye = Matrix::identity(n, n);
        if spectral_norm(&(p.transpose() * p - eye))? > 1e-10 {
            return Err(Error::InvalidInput(format!("basis {i} is not orthogonal")));
        }
        let hi = p * h * p.transpose();
        let h11 = hi[(0, 0)];
        let h22 = if n >= 2 { hi[(1, 1)] } else { 0.0 };
        let h12 = if n >= 2 { hi[(0, 1)] } else { 0.0 };
        kappa1.push(((h11 - h22).powi(2) + 4.0 * h12 * h12).sqrt());
        let (mut s1, mut s2, mut s12) = (0.0, 0.0, 0.0);
        for l in 2..n {
            let a = hi[(0, l)];
            let b = hi[(1, l)];
            s1 += a * a;
            s2 += b * b;
            s12 += a * b;
        }
        kappa2.push((s1 + s2 + ((s1 - s2).powi(2) + 4.0 * s12 * s12).sqrt()).sqrt());
    }
    let k1 = kappa1.iter().cloned().fold(0.0, f64::max);
    let k2 = kappa2.iter().cloned().fold(0.0, f64::max);
    Ok(CurvatureData { h: h.clone(), kappa1, kappa2, k1, k2 })
}

/// GACSG approximation bound: a rotation term of order `Delta` plus a
/// curvature term of order `Delta^2`.
pub fn gacsg_approx_bound(
    inputs: &BoundInputs,
    geo: &GeometryReport,
    curv: &CurvatureData,
    delta: f64,
) -> Result<f64> {
    require_positive_delta(delta)?;
    let sqrt_p = (inputs.p as f64).sqrt();
    let g = inputs.norm_lhat_dagger;
    let max_k2 = geo.k.iter().map(|k| k * k).fold(0.0, f64::max);
    let max_sin = geo.theta.iter().map(|t| t.sin()).fold(0.0, f64::max);
    let max_sqrt_1mc = geo.theta.iter().map(|t| (1.0 - t.cos()).max(0.0).sqrt()).fold(0.0, f64::max);
    let max_k21k = geo.k.iter().map(|k| k * k * (1.0 + k)).fold(0.0, f64::max);
    let rotation = 0.5 * max_k2 * sqrt_p * (curv.k1 * max_sin + curv.k2 * max_sqrt_1mc) * g * delta;
    let curvature = inputs.nu / 6.0 * max_k21k * sqrt_p * g * delta * delta;
    Ok(rotation + curvature)
}

/// Bound on `|(A^T)^dagger - computed|` for a mixed forward-backward stable
/// pseudo-inverse.
pub fn pinv_fpe_bound(inputs: &BoundInputs) -> Result<f64> {
    let margin = inputs.stability_margin();
    if margin >= 1.0 {
        return Err(Error::StabilityViolation { value: margin });
    }
    let c = inputs.stability_c;
    let eps = inputs.eps_star;
    let kappa = inputs.kappa_a;
    Ok(c * inputs.norm_a_dagger * eps / (1.0 - c * kappa * eps)
        * (2f64.sqrt() * kappa + 1.0 / (1.0 - c * eps)))
}

/// Bound on the estimate shift caused by perturbed function values alone:
/// `sqrt(q + 1) f_M |A^dagger| |B| eps_star`.
pub fn feval_fpe_bound(inputs: &BoundInputs) -> f64 {
    ((inputs.q + 1) as f64).sqrt() * inputs.f_max * inputs.norm_a_dagger * inputs.norm_b * inputs.eps_star
}

/// Combined floating point bound covering both the pseudo-inverse
/// computation and the function evaluations.
pub fn combined_fpe_bound(inputs: &BoundInputs) -> Result<f64> {
    Ok(feval_fpe_bound(inputs) * stability_factor(inputs)?)
}

/// The structure-exploiting GSG bound `2 sqrt(p) f_M |L^dagger| eps_star *
/// (stability factor)`; strictly tighter than the general form for p >= 2.
pub fn gsg_tight_fpe_bound(inputs: &BoundInputs) -> Result<f64> {
    Ok(2.0 * (inputs.p as f64).sqrt() * inputs.f_max * inputs.norm_a_dagger * inputs.eps_star
        * stability_factor(inputs)?)
}

/// Closed-form value of `|B|` per scheme, next to the exact spectral norm.
///
/// For GSG and GCSG the closed forms (`sqrt(p + 1)` and `sqrt(2)`) are the
/// exact norms; for GACSG the closed form is the published upper bound
/// `sqrt(sum (1 - k_i^2)^2 + max(k_i^4 + 1))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BNorm {
    pub closed_form: f64,
    pub spectral: f64,
}

pub fn scheme_b_norm(sch: &SchemeMatrices) -> Result<BNorm> {
    let spectral = spectral_norm(&sch.b)?;
    let closed_form = match sch.kind {
        SchemeKind::Gsg => ((sch.p + 1) as f64).sqrt(),
        SchemeKind::Gcsg => 2f64.sqrt(),
        SchemeKind::Gacsg => {
            let geo = sch.geometry.as_ref().expect("GACSG schemes carry geometry");
            let sum: f64 = geo.k.iter().map(|k| (1.0 - k * k).powi(2)).sum();
            let max_k41: f64 = geo.k.iter().map(|k| k.powi(4) + 1.0).fold(0.0, f64::max);
            (sum + max_k41).sqrt()
        }
    };
    Ok(BNorm { closed_form, spectral })
}

/// The combined bound `kappa_ae Delta^N_ae + kappa_fpe Delta^-N_fpe` and its
/// unique minimizer.
///
/// Serialized with the wire keys `kappa_ae, N_ae, kappa_fpe, N_fpe, delta_min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundBreakdown {
    pub kappa_ae: f64,
    #[serde(rename = "N_ae")]
    pub n_ae: f64,
    pub kappa_fpe: f64,
    #[serde(rename = "N_fpe")]
    pub n_fpe: f64,
    pub delta_min: f64,
}

impl BoundBreakdown {
    pub fn new(kappa_ae: f64, n_ae: f64, kappa_fpe: f64, n_fpe: f64) -> Result<Self> {
        let dm = delta_min(kappa_ae, n_ae, kappa_fpe, n_fpe)?;
        Ok(Self { kappa_ae, n_ae, kappa_fpe, n_fpe, delta_min: dm })
    }

    pub fn total(&self, delta: f64) -> Result<f64> {
        total_bound(self, delta)
    }
}

/// `kappa_ae Delta^N_ae + kappa_fpe Delta^-N_fpe`.
pub fn total_bound(bb: &BoundBreakdown, delta: f64) -> Result<f64> {
    require_positive_delta(delta)?;
    Ok(bb.kappa_ae * delta.powf(bb.n_ae) + bb.kappa_fpe * delta.powf(-bb.n_fpe))
}

/// The unique minimizer `(N_fpe kappa_fpe / (N_ae kappa_ae))^(1 / (N_ae + N_fpe))`.
pub fn delta_min(kappa_ae: f64, n_ae: f64, kappa_fpe: f64, n_fpe: f64) -> Result<f64> {
    for (name, v) in [("kappa_ae", kappa_ae), ("kappa_fpe", kappa_fpe), ("N_fpe", n_fpe)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidInput(format!("{name} must be positive and finite, got {v}")));
        }
    }
    if !(n_ae >= 1.0 && n_ae.is_finite()) {
        return Err(Error::InvalidInput(format!("N_ae must be >= 1, got {n_ae}")));
    }
    Ok((n_fpe * kappa_fpe / (n_ae * kappa_ae)).powf(1.0 / (n_ae + n_fpe)))
}

/// Which term of the GACSG approximation bound dominates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GacsgRegime {
    /// Angles dominate: the order-`Delta` term is kept, `N_ae = 1`.
    RotationDominated,
    /// Curvature dominates: the order-`Delta^2` term is kept, `N_ae = 2`.
    CurvatureDominated,
}

impl std::str::FromStr for GacsgRegime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rotation" | "rotation-dominated" => Ok(GacsgRegime::RotationDominated),
            "curvature" | "curvature-dominated" => Ok(GacsgRegime::CurvatureDominated),
            other => Err(Error::Parse(format!("unknown regime `{other}` (expected rotation or curvature)"))),
        }
    }
}

/// Assembles the per-scheme `(kappa_ae, N_ae, kappa_fpe, N_fpe)` tuple of the
/// published minimal-diameter examples and returns the breakdown with its
/// minimizer.
///
/// `tight` switches the GSG floating point constant from the general
/// `(p + 1)` form to the structure-exploiting `2 sqrt(p)` form; it is
/// ignored for the other kinds. GACSG requires a `regime`; in the
/// rotation-dominated regime the curvature constants `K_1`, `K_2` enter the
/// leading coefficient, and when no [`CurvatureData`] is supplied the
/// bracket `(K_1 max sin + K_2 max sqrt(1 - cos))` defaults to 1, which is
/// the rough-estimate convention.
pub fn scheme_delta_min(
    sch: &SchemeMatrices,
    inputs: &BoundInputs,
    tight: bool,
    regime: Option<GacsgRegime>,
    curvature: Option<&CurvatureData>,
) -> Result<BoundBreakdown> {
    let sqrt_p = (inputs.p as f64).sqrt();
    let g = inputs.norm_lhat_dagger;
    let stab = stability_factor(inputs)?;
    let (kappa_ae, n_ae, kappa_fpe) = match sch.kind {
        SchemeKind::Gsg => {
            let m = if tight { 2.0 * sqrt_p } else { (inputs.p + 1) as f64 };
            (0.5 * inputs.nu * sqrt_p * g, 1.0, m * inputs.f_max * g * inputs.eps_star * stab)
        }
        SchemeKind::Gcsg => (
            inputs.nu * sqrt_p / 6.0 * g,
            2.0,
            ((4 * inputs.p + 2) as f64).sqrt() * inputs.f_max * g * inputs.eps_star * stab,
        ),
        SchemeKind::Gacsg => {
            let geo = sch.geometry.as_ref().expect("GACSG schemes carry geometry");
            let b_bound = scheme_b_norm(sch)?.closed_form;
            let base_fpe = ((2 * inputs.p + 1) as f64).sqrt() * inputs.f_max * b_bound * g * inputs.eps_star * stab;
            let max_k2 = geo.k.iter().map(|k| k * k).fold(0.0, f64::max);
            match regime.ok_or(Error::MissingRegime)? {
                GacsgRegime::CurvatureDominated => {
                    let max_k21k = geo.k.iter().map(|k| k * k * (1.0 + k)).fold(0.0, f64::max);
                    (inputs.nu / 3.0 * max_k21k * sqrt_p * g, 2.0, 2.0 * base_fpe)
                }
                GacsgRegime::RotationDominated => {
                    let bracket = match curvature {
                        Some(c) => {
                            let max_sin = geo.theta.iter().map(|t| t.sin()).fold(0.0, f64::max);
                            let max_sqrt =
                                geo.theta.iter().map(|t| (1.0 - t.cos()).max(0.0).sqrt()).fold(0.0, f64::max);
                            c.k1 * max_sin + c.k2 * max_sqrt
                        }
                        None => 1.0,
                    };
                    (max_k2 * sqrt_p * g * bracket, 1.0, base_fpe)
                }
            }
        }
    };
    BoundBreakdown::new(kappa_ae, n_ae, kappa_fpe, 1.0)
}
