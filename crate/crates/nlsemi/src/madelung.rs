//! Madelung transform between the complex wave function and hydrodynamic
//! variables (u, v), Riemann invariants for each model, and the catalog of
//! initial-data families.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::{NlsModel, Sign};
use crate::spectral::{spectral_derivative, PeriodicGrid, WaveField};
use crate::{Error, Result};

/// Density u = |ψ|² and velocity v sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MadelungState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// Density threshold below which the velocity is undefined (vacuum).
pub const VACUUM_THRESHOLD: f64 = 1e-10;

/// Hyperbolic (defocusing) or elliptic (focusing) branch of the
/// dispersionless system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Hyperbolic,
    Elliptic,
}

/// Riemann invariants of the dispersionless system; real-valued on the
/// hyperbolic branch (stored with zero imaginary part), complex-conjugate
/// pair on the elliptic branch.
#[derive(Debug, Clone)]
pub struct RiemannPair {
    pub r_plus: Vec<Complex64>,
    pub r_minus: Vec<Complex64>,
    /// Characteristic speeds λ± = v ± √(uV'(u)) (hyperbolic) or their
    /// elliptic analogue v ± i√(uV'(u)).
    pub lambda_plus: Vec<Complex64>,
    pub lambda_minus: Vec<Complex64>,
    pub branch: Branch,
}

/// The initial-data families studied by the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum InitialDataCase {
    /// ψ₀ = sech x for the cubic defocusing equation.
    CubicDefocSech,
    /// ψ₀ = sech x for the quintic defocusing equation.
    QuinticDefocSech,
    /// u = A sech²x, v = −B tanh²x (B ≤ A), quintic defocusing.
    QuinticDefocSymmetric { a: f64, b: f64 },
    /// u = A tanh⁴(x/B), v = 0, quintic defocusing.
    QuinticDefocDark { a: f64, b: f64 },
    /// ψ₀ = A₀ sech x, cubic focusing.
    CubicFocSech { a0: f64 },
    /// ψ₀ = A₀ sech x, quintic focusing.
    QuinticFocSech { a0: f64 },
    /// Asymmetric data from the hodograph solution x = F(r) + αℱ(r),
    /// quintic focusing; α = 0 reduces to u = sech x, v = −tanh x.
    QuinticFocAsym { alpha: f64 },
    /// u = tanh⁴x, v = 0, quintic focusing.
    QuinticFocDark,
    /// ψ₀ = sech x for the nonlocal defocusing equation.
    NonlocalDefocSech { eta: f64 },
    /// ψ₀ = sech x for the nonlocal focusing equation.
    NonlocalFocSech { eta: f64 },
}

impl InitialDataCase {
    pub fn validate(&self) -> Result<()> {
        use InitialDataCase::*;
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            QuinticDefocSymmetric { a, b } => {
                if !(a > 0.0) || b > a || b < 0.0 {
                    return bad(format!("symmetric case needs 0 ≤ B ≤ A, A > 0; got A={a}, B={b}"));
                }
            }
            QuinticDefocDark { a, b } => {
                if !(a > 0.0 && b > 0.0) {
                    return bad(format!("dark case needs A, B > 0; got A={a}, B={b}"));
                }
            }
            CubicFocSech { a0 } | QuinticFocSech { a0 } => {
                if !(a0 > 0.0) {
                    return bad(format!("A₀ must be positive, got {a0}"));
                }
            }
            QuinticFocAsym { alpha } => {
                if !alpha.is_finite() {
                    return bad(format!("α must be finite, got {alpha}"));
                }
            }
            NonlocalDefocSech { eta } | NonlocalFocSech { eta } => {
                if !(eta >= 0.0) {
                    return bad(format!("η must be ≥ 0, got {eta}"));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// The NLS model this case is evolved under.
    pub fn model(&self, epsilon: f64) -> NlsModel {
        use InitialDataCase::*;
        match *self {
            CubicDefocSech => NlsModel::cubic(Sign::Defocusing, epsilon),
            QuinticDefocSech | QuinticDefocSymmetric { .. } | QuinticDefocDark { .. } => {
                NlsModel::quintic(Sign::Defocusing, epsilon)
            }
            CubicFocSech { .. } => NlsModel::cubic(Sign::Focusing, epsilon),
            QuinticFocSech { .. } | QuinticFocAsym { .. } | QuinticFocDark => {
                NlsModel::quintic(Sign::Focusing, epsilon)
            }
            NonlocalDefocSech { eta } => NlsModel::nonlocal(Sign::Defocusing, eta, epsilon),
            NonlocalFocSech { eta } => NlsModel::nonlocal(Sign::Focusing, eta, epsilon),
        }
    }

    pub fn branch(&self) -> Branch {
        match self.model(1.0).sign {
            Sign::Defocusing => Branch::Hyperbolic,
            Sign::Focusing => Branch::Elliptic,
        }
    }

    /// Default periodic domain length: 40π for decaying data, 20π for
    /// tanh-type data (even, hence periodic up to exponentially small
    /// mismatch).
    pub fn default_length(&self) -> f64 {
        use InitialDataCase::*;
        match self {
            QuinticDefocDark { .. } | QuinticFocDark => 20.0 * std::f64::consts::PI,
            _ => 40.0 * std::f64::consts::PI,
        }
    }

    /// Closed-form initial (u, v) where available (all cases except the
    /// asymmetric family).
    pub fn initial_uv(&self, x: f64) -> Option<(f64, f64)> {
        use InitialDataCase::*;
        let sech2 = |y: f64| {
            let s = 1.0 / y.cosh();
            s * s
        };
        match *self {
            CubicDefocSech | QuinticDefocSech | NonlocalDefocSech { .. }
            | NonlocalFocSech { .. } => Some((sech2(x), 0.0)),
            QuinticDefocSymmetric { a, b } => {
                Some((a * sech2(x), -b * x.tanh() * x.tanh()))
            }
            QuinticDefocDark { a, b } => Some((a * (x / b).tanh().powi(4), 0.0)),
            CubicFocSech { a0 } | QuinticFocSech { a0 } => Some((a0 * a0 * sech2(x), 0.0)),
            QuinticFocDark => Some((x.tanh().powi(4), 0.0)),
            QuinticFocAsym { .. } => None,
        }
    }
}

/// u = |ψ|², v = ε·Im(ψ_x/ψ), with v set to zero in the vacuum
/// (u < 10⁻¹⁰).
pub fn uv_from_psi(psi: &WaveField, model: &NlsModel) -> MadelungState {
    let psi_x = spectral_derivative(psi, 1);
    let u: Vec<f64> = psi.values.iter().map(|p| p.norm_sqr()).collect();
    let v: Vec<f64> = psi
        .values
        .iter()
        .zip(&psi_x.values)
        .zip(&u)
        .map(|((p, px), &uu)| {
            if uu < VACUUM_THRESHOLD {
                0.0
            } else {
                model.epsilon * (px / p).im
            }
        })
        .collect();
    MadelungState { u, v }
}

/// Spectral antiderivative of real samples on the periodic grid:
/// W(x) with W' = f − mean(f), W(first node) = 0, plus the mean returned
/// separately.
pub(crate) fn spectral_antiderivative(grid: &PeriodicGrid, f: &[f64]) -> (Vec<f64>, f64) {
    let coeffs = crate::spectral::fft_forward(
        &f.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>(),
    );
    let mean = coeffs[0].re;
    let anti: Vec<Complex64> = coeffs
        .iter()
        .zip(&grid.wavenumbers)
        .map(|(c, &k)| {
            if k == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                c / Complex64::new(0.0, k)
            }
        })
        .collect();
    let w_raw = crate::spectral::fft_inverse(&anti);
    let w0 = w_raw[0].re;
    (w_raw.iter().map(|c| c.re - w0).collect(), mean)
}

/// ψ = √u · exp(i φ/ε) with φ the antiderivative of v anchored at
/// `x_anchor` (mean-zero part spectrally, mean as a linear term).
/// Fails with a seam-mismatch diagnostic when mean(v)·length/ε is not a
/// multiple of 2π within 10⁻⁶.
pub fn psi_from_uv(
    state: &MadelungState,
    grid: &Arc<PeriodicGrid>,
    model: &NlsModel,
    x_anchor: f64,
) -> Result<WaveField> {
    if state.u.iter().any(|&u| u < 0.0) {
        return Err(Error::InvalidParameter("negative density".into()));
    }
    let (w, mean) = spectral_antiderivative(grid, &state.v);
    let jump = mean * grid.length / model.epsilon;
    let wrapped = (jump / (2.0 * std::f64::consts::PI)).round() * 2.0 * std::f64::consts::PI;
    if (jump - wrapped).abs() > 1e-6 {
        return Err(Error::SeamMismatch(jump - wrapped));
    }
    // Anchor: φ(x_anchor) = 0, interpolating W at the anchor spectrally is
    // overkill; the anchor is snapped to the nearest node.
    let anchor_idx = grid
        .nodes
        .iter()
        .enumerate()
        .min_by(|a, b| {
            (a.1 - x_anchor)
                .abs()
                .partial_cmp(&(b.1 - x_anchor).abs())
                .unwrap()
        })
        .map(|(i, _)| i)
        .unwrap_or(0);
    let w_a = w[anchor_idx];
    let x_a = grid.nodes[anchor_idx];
    let values: Vec<Complex64> = grid
        .nodes
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let phase = (mean * (x - x_a) + w[i] - w_a) / model.epsilon;
            Complex64::from_polar(state.u[i].sqrt(), phase)
        })
        .collect();
    WaveField::from_values(grid.clone(), values)
}

/// Case-dispatched Riemann invariants and characteristic speeds.
pub fn riemann_invariants(state: &MadelungState, model: &NlsModel) -> Result<RiemannPair> {
    let branch = match model.sign {
        Sign::Defocusing => Branch::Hyperbolic,
        Sign::Focusing => Branch::Elliptic,
    };
    let n = state.u.len();
    let mut r_plus = Vec::with_capacity(n);
    let mut r_minus = Vec::with_capacity(n);
    let mut lambda_plus = Vec::with_capacity(n);
    let mut lambda_minus = Vec::with_capacity(n);
    for i in 0..n {
        let (u, v) = (state.u[i], state.v[i]);
        if branch == Branch::Hyperbolic && u <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "non-positive density u={u} at node {i} on the hyperbolic branch"
            )));
        }
        let q = (u.max(0.0) * model.potential_prime(u.max(0.0))).sqrt();
        match branch {
            Branch::Hyperbolic => {
                // Invariants: cubic r± = v ± 2√u; quintic r± = v ± u.
                let w = match model.power_s {
                    1 => 2.0 * u.sqrt(),
                    2 => u,
                    s => {
                        return Err(Error::UnsupportedCase(
                            format!("power_s={s}"),
                            "Riemann invariants implemented for s = 1, 2".into(),
                        ))
                    }
                };
                r_plus.push(Complex64::new(v + w, 0.0));
                r_minus.push(Complex64::new(v - w, 0.0));
                lambda_plus.push(Complex64::new(v + q, 0.0));
                lambda_minus.push(Complex64::new(v - q, 0.0));
            }
            Branch::Elliptic => {
                let w = match model.power_s {
                    1 => 2.0 * u.sqrt(),
                    2 => u,
                    s => {
                        return Err(Error::UnsupportedCase(
                            format!("power_s={s}"),
                            "Riemann invariants implemented for s = 1, 2".into(),
                        ))
                    }
                };
                r_plus.push(Complex64::new(v, w));
                r_minus.push(Complex64::new(v, -w));
                lambda_plus.push(Complex64::new(v, q));
                lambda_minus.push(Complex64::new(v, -q));
            }
        }
    }
    Ok(RiemannPair { r_plus, r_minus, lambda_plus, lambda_minus, branch })
}

// ---------------------------------------------------------------------------
// Asymmetric initial data: x = F(r) + αℱ(r) at t = 0.
// ---------------------------------------------------------------------------

/// F(r) = log( i(1−r)/(1+r) ), principal branch.
pub(crate) fn asym_f(r: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    ((i * (1.0 - r)) / (1.0 + r)).ln()
}

/// ℱ(r) = (r−1)·log(i(1−r)) − (1+r)·log(1+r), with ℱ' = F.
pub(crate) fn asym_f_script(r: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    (r - 1.0) * (i * (1.0 - r)).ln() - (1.0 + r) * (1.0 + r).ln()
}

/// F'(r) = −2/(1−r²).
pub(crate) fn asym_f_prime(r: Complex64) -> Complex64 {
    -2.0 / (1.0 - r * r)
}

/// Large-x expansions of r(x,0): three exponential orders.
pub(crate) fn asym_tail(alpha: f64, x: f64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    if x > 0.0 {
        // r = −1 + (2i)^{1−2α} e^{−x}
        //       + (2i)^{2−4α} e^{−2x} (−1/2 + 2α² log(2i) + α + αx).
        let l2i = (2.0 * i).ln();
        let c1 = ((1.0 - 2.0 * alpha) * l2i).exp();
        let c2 = ((2.0 - 4.0 * alpha) * l2i).exp();
        -1.0 + c1 * (-x).exp()
            + c2 * (-2.0 * x).exp()
                * (Complex64::new(-0.5 + alpha + alpha * x, 0.0) + 2.0 * alpha * alpha * l2i)
    } else {
        // r = 1 + i·2^{1+2α} e^{x}
        //       + 2^{2+4α} e^{2x} (−1/2 + 2α² ln 2 + αx − α).
        let ln2 = std::f64::consts::LN_2;
        let c1 = i * (2.0_f64).powf(1.0 + 2.0 * alpha);
        let c2 = (2.0_f64).powf(2.0 + 4.0 * alpha);
        1.0 + c1 * x.exp()
            + c2 * (2.0 * x).exp()
                * Complex64::new(-0.5 + 2.0 * alpha * alpha * ln2 + alpha * x - alpha, 0.0)
    }
}

/// Solve x = F(r) + αℱ(r) for r = v + iu by Newton continuation along an
/// ascending array of x values, seeded from the left tail.
pub(crate) fn asym_solve(alpha: f64, xs: &[f64]) -> Result<Vec<Complex64>> {
    let mut out = Vec::with_capacity(xs.len());
    let mut seed = asym_tail(alpha, xs[0].min(-10.0));
    for &x in xs {
        let mut r = seed;
        let mut ok = false;
        for _ in 0..60 {
            let fval = asym_f(r) + alpha * asym_f_script(r) - x;
            let fp = asym_f_prime(r) + alpha * asym_f(r);
            let step = fval / fp;
            r -= step;
            if step.norm() < 1e-14 * (1.0 + r.norm()) {
                ok = true;
                break;
            }
        }
        if !ok || !r.re.is_finite() || !r.im.is_finite() {
            return Err(Error::NewtonFailure(format!(
                "asymmetric data Newton stalled at x = {x}"
            )));
        }
        out.push(r);
        seed = r;
    }
    Ok(out)
}

/// (u, v) for the asymmetric case at every node of `xs` (ascending),
/// using the Newton solve for |x| ≤ 15 and the tail expansions beyond.
pub(crate) fn asym_uv(alpha: f64, xs: &[f64]) -> Result<MadelungState> {
    // Newton on the interior nodes as one ordered continuation sweep.
    let interior: Vec<f64> = xs.iter().copied().filter(|x| x.abs() <= 15.0).collect();
    let solved = asym_solve(alpha, &interior)?;
    let mut iter = interior.iter().zip(solved);
    let mut u = Vec::with_capacity(xs.len());
    let mut v = Vec::with_capacity(xs.len());
    for &x in xs {
        let r = if x.abs() <= 15.0 {
            iter.next().expect("interior node order").1
        } else {
            asym_tail(alpha, x)
        };
        u.push(r.im);
        v.push(r.re);
    }
    Ok(MadelungState { u, v })
}

/// Residual of the t = 0 hodograph equation for the asymmetric family at
/// one node (diagnostic used by tests and by `build_initial_data`).
pub(crate) fn asym_residual(alpha: f64, x: f64, u: f64, v: f64) -> f64 {
    let r = Complex64::new(v, u);
    (asym_f(r) + alpha * asym_f_script(r) - x).norm()
}

/// Construct ψ₀ for a case on the given grid.
pub fn build_initial_data(
    case: &InitialDataCase,
    grid: &Arc<PeriodicGrid>,
    model: &NlsModel,
) -> Result<WaveField> {
    case.validate()?;
    match case {
        InitialDataCase::QuinticFocAsym { alpha } => {
            let state = asym_uv(*alpha, &grid.nodes)?;
            // Residual gate on the Newton region.
            let worst = grid
                .nodes
                .iter()
                .zip(state.u.iter().zip(&state.v))
                .filter(|(&x, _)| x.abs() <= 15.0)
                .map(|(&x, (&u, &v))| asym_residual(*alpha, x, u, v))
                .fold(0.0_f64, f64::max);
            if worst > 1e-10 {
                return Err(Error::NewtonFailure(format!(
                    "asymmetric data residual {worst:.3e} exceeds 1e-10"
                )));
            }
            // Phase: v = −tanh x + v_d with v_d decaying; integrate the
            // tanh part in closed form and v_d spectrally.
            let v_d: Vec<f64> = grid
                .nodes
                .iter()
                .zip(&state.v)
                .map(|(&x, &vv)| vv + x.tanh())
                .collect();
            let (w, mean) = spectral_antiderivative(grid, &v_d);
            let x_a = grid.nodes[0];
            let values: Vec<Complex64> = grid
                .nodes
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    let integral_tanh = -(x.cosh().ln() - x_a.cosh().ln());
                    let phase =
                        (integral_tanh + mean * (x - x_a) + w[i] - w[0]) / model.epsilon;
                    Complex64::from_polar(state.u[i].max(0.0).sqrt(), phase)
                })
                .collect();
            WaveField::from_values(grid.clone(), values)
        }
        _ => {
            let state = MadelungState {
                u: grid
                    .nodes
                    .iter()
                    .map(|&x| case.initial_uv(x).expect("closed-form case").0)
                    .collect(),
                v: grid
                    .nodes
                    .iter()
                    .map(|&x| case.initial_uv(x).expect("closed-form case").1)
                    .collect(),
            };
            psi_from_uv(&state, grid, model, grid.nodes[0])
        }
    }
}
