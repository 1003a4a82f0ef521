//! Semiclassical (dispersionless) solutions of the NLS hydrodynamic
//! systems via characteristics and hodograph transforms, location of the
//! gradient catastrophe, and the asymptotic constants entering the local
//! Painlevé descriptions.
//!
//! Conventions.  The quasilinear systems are written in Riemann
//! invariants with `∂_t r_± = λ_± ∂_x r_±`, so the hodograph solution is
//! `x = −λ_± t + μ_±` and the characteristic variables near break-up are
//! `x_± = (x − x₀) + λ_±⁰ (t − t₀)` with `λ_±⁰ = −(v₀ ± √(u₀V'₀))`
//! (hyperbolic) or `λ_±⁰ = −(v₀ ± i√(u₀V'₀))` (elliptic), where
//! `V(u) = u^s/s`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::madelung::{Branch, InitialDataCase, MadelungState, RiemannPair};
use crate::quad::tanh_sinh;
use crate::{Error, Result};

type C = Complex64;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

const I: C = C::new(0.0, 1.0);

/// Which Riemann invariant undergoes the gradient catastrophe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BreakBranch {
    Plus,
    Minus,
    Elliptic,
}

/// Point of gradient catastrophe of the dispersionless system, together
/// with the local frame data used by the asymptotic formulas.
#[derive(Debug, Clone)]
pub struct CriticalPoint {
    pub x0: f64,
    pub t0: f64,
    pub u0: f64,
    pub v0: f64,
    /// Riemann invariants at the critical point (real for hyperbolic
    /// cases, complex-conjugate pair for elliptic cases).
    pub r_plus0: C,
    pub r_minus0: C,
    /// Characteristic-frame slopes λ_±⁰ = −(v₀ ± √(u₀V'₀)) (hyperbolic)
    /// or −(v₀ ± i√(u₀V'₀)) (elliptic).
    pub lambda_plus0: C,
    pub lambda_minus0: C,
    pub which_invariant_breaks: BreakBranch,
}

impl CriticalPoint {
    /// Structured text report with 12 significant digits.
    pub fn report(&self) -> String {
        let fmt_c = |z: C| {
            if z.im == 0.0 {
                format!("{:.12e}", z.re)
            } else {
                format!("{:.12e} {:+.12e}i", z.re, z.im)
            }
        };
        format!(
            "x0\t{:.12e}\nt0\t{:.12e}\nu0\t{:.12e}\nv0\t{:.12e}\nr_plus0\t{}\nr_minus0\t{}\nlambda_plus0\t{}\nlambda_minus0\t{}\nbreaks\t{}\n",
            self.x0,
            self.t0,
            self.u0,
            self.v0,
            fmt_c(self.r_plus0),
            fmt_c(self.r_minus0),
            fmt_c(self.lambda_plus0),
            fmt_c(self.lambda_minus0),
            match self.which_invariant_breaks {
                BreakBranch::Plus => "plus",
                BreakBranch::Minus => "minus",
                BreakBranch::Elliptic => "elliptic",
            }
        )
    }
}

/// Constants of the hyperbolic (defocusing) local description.
#[derive(Debug, Clone)]
pub struct HyperbolicConstants {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub rho: f64,
    pub sigma: f64,
    pub nu_plus: f64,
    pub nu_minus: f64,
}

/// Constants of the elliptic (focusing) local description.
#[derive(Debug, Clone)]
pub struct EllipticConstants {
    pub a_plus: C,
    /// C₊⁺ = (1/8i)/√(V'₀u₀) (nonlocal: −(1+4ηu₀)/(8i√u₀)).
    pub c_plus_plus: C,
    /// λ⁰₊,₊ = −3/4 − u₀V''₀/(4V'₀).
    pub lambda_pp0: C,
    /// Polar split a₊ = −i/(r e^{iψ}).
    pub r_mod: f64,
    pub psi_arg: f64,
}

fn case_name(case: &InitialDataCase) -> String {
    format!("{case:?}")
}

// ---------------------------------------------------------------------------
// Closed-form profile inverses (characteristic "F" functions)
// ---------------------------------------------------------------------------

/// F₊ for u = A sech²x + shift, v = −B tanh²x data on the right branch
/// (x > 0): F₊(r) = log((√(A+B) + √(A−r)) / √(B+r)), with
/// r₊ = −B + (A+B) sech²x.
#[cfg(test)]
fn sym_f_plus(a: f64, b: f64, r: f64) -> f64 {
    (((a + b).sqrt() + (a - r).sqrt()) / (b + r).sqrt()).ln()
}

/// dF₊/dr = −√(A+B) / (2√(A−r)(B+r)).
fn sym_df_plus(a: f64, b: f64, r: f64) -> f64 {
    -(a + b).sqrt() / (2.0 * (a - r).sqrt() * (b + r))
}

/// F₋ on the right branch for the same data:
/// F₋(r) = log((√(A−B) + √(A+r)) / √(−B−r)), with
/// r₋ = −B − (A−B) sech²x.
fn sym_f_minus(a: f64, b: f64, r: f64) -> f64 {
    (((a - b).sqrt() + (a + r).sqrt()) / (-b - r).sqrt()).ln()
}

/// dF₋/dr = √(A−B) / (2√(A+r)(−B−r)).
fn sym_df_minus(a: f64, b: f64, r: f64) -> f64 {
    (a - b).sqrt() / (2.0 * (a + r).sqrt() * (-b - r))
}

/// Dark defocusing data u = A tanh⁴(x/B): right-branch inverse of
/// r₊ = A tanh⁴(x/B), F₊(r) = B atanh((r/A)^{1/4}).
fn dark_f_plus(a: f64, b: f64, r: f64) -> f64 {
    b * (r / a).powf(0.25).atanh()
}

fn dark_df_plus(a: f64, b: f64, r: f64) -> f64 {
    let z = (r / a).powf(0.25);
    b / (4.0 * a * z.powi(3) * (1.0 - z * z))
}

/// Right-branch inverse of r₋ = −A tanh⁴(x/B):
/// F₋(r) = B atanh((−r/A)^{1/4}).
fn dark_f_minus(a: f64, b: f64, r: f64) -> f64 {
    b * (-r / a).powf(0.25).atanh()
}

#[cfg(test)]
fn dark_df_minus(a: f64, b: f64, r: f64) -> f64 {
    let z = (-r / a).powf(0.25);
    -b / (4.0 * a * z.powi(3) * (1.0 - z * z))
}

/// Quintic focusing sech: F(r) = log((A₀ − √(A₀²+ir)) / √(−ir)),
/// the inverse of the increasing (x<0) part of r₊(x,0) = iA₀² sech²x.
fn foc_sech_f(a0: f64, r: C) -> C {
    ((c(a0) - (c(a0 * a0) + I * r).sqrt()) / (-I * r).sqrt()).ln()
}

fn foc_sech_df(a0: f64, r: C) -> C {
    let w = (c(a0 * a0) + I * r).sqrt();
    -I / (2.0 * w * (c(a0) - w)) - 1.0 / (2.0 * r)
}

/// Asymmetric family: F(r) = log(i(1−r)) − log(1+r) and its primitive
/// ℱ(r) = (r−1)log(i(1−r)) − (1+r)log(1+r), so that ℱ' = F.
fn asym_f(r: C) -> C {
    (I * (c(1.0) - r)).ln() - (c(1.0) + r).ln()
}

fn asym_df(r: C) -> C {
    -2.0 / (c(1.0) - r * r)
}

fn asym_script_f(r: C) -> C {
    (r - c(1.0)) * (I * (c(1.0) - r)).ln() - (c(1.0) + r) * (c(1.0) + r).ln()
}

/// Dark focusing: F(r) = atanh((−ir)^{1/4}).
fn foc_dark_f(r: C) -> C {
    let z = (-I * r).powf(0.25);
    (((c(1.0) + z) / (c(1.0) - z)).ln()) * 0.5
}

fn foc_dark_df(r: C) -> C {
    let z = (-I * r).powf(0.25);
    -I / (4.0 * z.powi(3) * (c(1.0) - z * z))
}

// ---------------------------------------------------------------------------
// Tian–Ye hodograph data for the cubic defocusing equation
// ---------------------------------------------------------------------------

/// Closed-form (μ₊, μ₋) for ψ₀ = a sech x (Tian–Ye), valid on the branch
/// containing the break-up point (x < 0 for this symmetric datum; the
/// mirrored branch follows from the x → −x, v → −v symmetry).
fn tian_ye_mu_closed(a: f64, rp: f64, rm: f64) -> Result<(f64, f64)> {
    if !(rm < rp && rp < 2.0 * a && rm > -2.0 * a) {
        return Err(Error::InvalidParameter(format!(
            "Tian–Ye arguments must satisfy −2a < r₋ < r₊ < 2a, got ({rp}, {rm})"
        )));
    }
    let s = -((2.0 * a + rp).sqrt() + (2.0 * a + rm).sqrt()).ln()
        - ((2.0 * a - rp).sqrt() + (2.0 * a - rm).sqrt()).ln()
        + (rp - rm).ln();
    let d = (((2.0 * a + rp) * (2.0 * a + rm)).sqrt() - ((2.0 * a - rp) * (2.0 * a - rm)).sqrt())
        / (rp - rm);
    Ok((s + d, s - d))
}

/// (μ₊, μ₋) for the cubic-family defocusing cases (the nonlocal equation
/// shares the same dispersionless system).
pub fn tian_ye_mu(r_plus: f64, r_minus: f64, case: &InitialDataCase) -> Result<(f64, f64)> {
    match case {
        InitialDataCase::CubicDefocSech | InitialDataCase::NonlocalDefocSech { .. } => {
            tian_ye_mu_closed(1.0, r_plus, r_minus)
        }
        _ => Err(Error::UnsupportedCase(
            case_name(case),
            "the Tian–Ye formula applies to the cubic-family defocusing sech datum".into(),
        )),
    }
}

/// Independent quadrature evaluation of (μ₊, μ₋) for ψ₀ = a sech x:
/// μ_± = 2/(π(r₊−r₋)) (∫_{r₋}^{0} + ∫_{0}^{r₊}) √((τ−r_∓)/(r_±−τ)) θ'(τ) dτ
/// with θ'(τ) = ½ log((4a²−τ²)/τ²).  Used as an oracle for the closed
/// form; tolerance 10⁻¹⁰ per piece.
pub fn tian_ye_mu_quadrature(a: f64, rp: f64, rm: f64) -> Result<(f64, f64)> {
    if !(rm < 0.0 && 0.0 < rp && rp < 2.0 * a && rm > -2.0 * a) {
        return Err(Error::InvalidParameter(format!(
            "quadrature oracle needs r₋ < 0 < r₊ inside (−2a, 2a), got ({rp}, {rm})"
        )));
    }
    let tol = 1e-10;
    // θ'(τ) given the distance `d0` of τ from 0 (sign of τ irrelevant).
    let theta = |tau: f64, d0: f64| 0.5 * ((4.0 * a * a - tau * tau) / (d0 * d0)).ln();
    // μ₊ weight √((τ−r₋)/(r₊−τ)); singular at τ = r₊.
    let left_p = tanh_sinh(
        |tau, da, db| ((tau - rm) / (rp - tau)).sqrt() * theta(tau, db) * {
            let _ = da;
            1.0
        },
        rm,
        0.0,
        tol,
    )?;
    let right_p = tanh_sinh(
        |tau, da, db| (da.max(tau - rm) / db.max(f64::MIN_POSITIVE)).sqrt() * theta(tau, da),
        0.0,
        rp,
        tol,
    )?;
    // μ₋ weight √((τ−r₊)/(r₋−τ)) = √((r₊−τ)/(τ−r₋)); singular at τ = r₋.
    let left_m = tanh_sinh(
        |tau, da, db| ((rp - tau) / da.max(f64::MIN_POSITIVE)).sqrt() * theta(tau, db),
        rm,
        0.0,
        tol,
    )?;
    let right_m = tanh_sinh(
        |tau, da, db| {
            let _ = db;
            ((rp - tau) / (tau - rm)).sqrt() * theta(tau, da)
        },
        0.0,
        rp,
        tol,
    )?;
    // The integral representation parameterizes the mirror branch
    // (x > 0); our closed form lives on the branch through the break-up
    // point (x < 0), hence the overall sign.
    let pref = -2.0 / (std::f64::consts::PI * (rp - rm));
    Ok((pref * (left_p + right_p), pref * (left_m + right_m)))
}

// ---------------------------------------------------------------------------
// Generic Newton helpers
// ---------------------------------------------------------------------------

fn newton_system<F>(f: &F, y0: &[f64], max_iter: usize, tol: f64) -> Result<(Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut res = f(&y);
    let mut nrm = res.iter().map(|r| r * r).sum::<f64>().sqrt();
    for _ in 0..max_iter {
        if nrm < tol {
            return Ok((y, nrm));
        }
        // Forward-difference Jacobian.
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            let h = 1e-7 * (1.0 + y[j].abs());
            let mut yp = y.clone();
            yp[j] += h;
            let fp = f(&yp);
            for i in 0..n {
                jac[(i, j)] = (fp[i] - res[i]) / h;
            }
        }
        let rhs = DVector::from_iterator(n, res.iter().map(|r| -r));
        let Some(step) = jac.lu().solve(&rhs) else {
            return Err(Error::NewtonFailure("singular Jacobian".into()));
        };
        // Damped update: halve the step until the residual decreases.
        let mut lambda = 1.0_f64;
        loop {
            let trial: Vec<f64> = (0..n).map(|i| y[i] + lambda * step[i]).collect();
            let rt = f(&trial);
            let nt = rt.iter().map(|r| r * r).sum::<f64>().sqrt();
            if nt < nrm || lambda < 1.0 / 64.0 {
                y = trial;
                res = rt;
                nrm = nt;
                break;
            }
            lambda *= 0.5;
        }
    }
    if nrm < tol * 100.0 {
        return Ok((y, nrm));
    }
    Err(Error::NewtonFailure(format!(
        "no convergence: residual {nrm:.3e}"
    )))
}

fn newton_complex<F, G>(f: &F, df: &G, seed: C, tol: f64) -> Result<C>
where
    F: Fn(C) -> C,
    G: Fn(C) -> C,
{
    let mut r = seed;
    let mut val = f(r);
    for _ in 0..80 {
        if val.norm() < tol {
            return Ok(r);
        }
        let d = df(r);
        if d.norm() < 1e-300 {
            return Err(Error::NewtonFailure("vanishing derivative".into()));
        }
        let step = -val / d;
        let mut lambda = 1.0_f64;
        loop {
            let trial = r + lambda * step;
            let vt = f(trial);
            if vt.norm() < val.norm() || lambda < 1.0 / 64.0 {
                r = trial;
                val = vt;
                break;
            }
            lambda *= 0.5;
        }
    }
    if val.norm() < tol * 100.0 {
        return Ok(r);
    }
    Err(Error::NewtonFailure(format!(
        "complex Newton stalled at residual {:.3e}",
        val.norm()
    )))
}

/// Safeguarded scalar Newton/bisection for a monotone function.
fn newton_monotone<F, G>(f: &F, df: &G, seed: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    // Bracket the root by expanding around the seed.
    let f0 = f(seed);
    if f0.abs() < tol {
        return Ok(seed);
    }
    let mut step = 0.5;
    let (mut lo, mut hi);
    let mut found = None;
    for _ in 0..200 {
        let (cand, other) = if f0 > 0.0 {
            (seed - step, seed)
        } else {
            (seed + step, seed)
        };
        let fc = f(cand);
        if fc == 0.0 {
            return Ok(cand);
        }
        if fc.signum() != f0.signum() {
            found = Some(if cand < other { (cand, other) } else { (other, cand) });
            break;
        }
        step *= 1.6;
    }
    match found {
        Some((a, b)) => {
            lo = a;
            hi = b;
        }
        None => {
            return Err(Error::RootFailure(
                "could not bracket the characteristic foot point".into(),
            ))
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx.abs() < tol {
            return Ok(x);
        }
        if (f(lo) > 0.0) != (fx > 0.0) {
            hi = x;
        } else {
            lo = x;
        }
        let d = df(x);
        let mut next = if d.abs() > 1e-300 { x - fx / d } else { 0.5 * (lo + hi) };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() < 1e-16 * (1.0 + x.abs()) {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// Vectorized damped Newton for implicit hodograph systems
/// S_i({y}, x, t) = 0, sweeping the nodes in order and seeding each node
/// with its neighbor's root (continuation).  Returns the roots and the
/// final residual norms; nodes that fail to converge keep the nearest
/// converged neighbor's values and report their residual.
pub fn solve_hodograph_newton<F>(
    system: &F,
    guess: &[f64],
    xs: &[f64],
    t: f64,
) -> Result<(Vec<Vec<f64>>, Vec<f64>)>
where
    F: Fn(&[f64], f64, f64) -> Vec<f64>,
{
    let mut roots = Vec::with_capacity(xs.len());
    let mut residuals = Vec::with_capacity(xs.len());
    let mut seed = guess.to_vec();
    for &x in xs {
        let local = |y: &[f64]| system(y, x, t);
        match newton_system(&local, &seed, 50, 1e-12) {
            Ok((y, r)) => {
                seed = y.clone();
                roots.push(y);
                residuals.push(r);
            }
            Err(_) => {
                // Flagged node: carry the nearest converged neighbor.
                let res = local(&seed);
                residuals.push(res.iter().map(|v| v * v).sum::<f64>().sqrt());
                roots.push(seed.clone());
            }
        }
    }
    Ok((roots, residuals))
}

// ---------------------------------------------------------------------------
// Characteristic solutions (quintic cases)
// ---------------------------------------------------------------------------

/// Initial invariant profiles φ_±(ξ) for the decoupled quintic cases,
/// with derivatives (hyperbolic cases only).
fn quintic_profile(case: &InitialDataCase, plus: bool) -> Option<(impl Fn(f64) -> f64, impl Fn(f64) -> f64)> {
    use InitialDataCase::*;
    let (a, b, dark) = match *case {
        QuinticDefocSech => (1.0, 0.0, false),
        QuinticDefocSymmetric { a, b } => (a, b, false),
        QuinticDefocDark { a, b } => (a, b, true),
        _ => return None,
    };
    let sign = if plus { 1.0 } else { -1.0 };
    let phi = move |xi: f64| -> f64 {
        if dark {
            sign * a * (xi / b).tanh().powi(4)
        } else {
            let s2 = 1.0 / (xi.cosh() * xi.cosh());
            -b + sign * (a + sign * b) * s2
        }
    };
    let dphi = move |xi: f64| -> f64 {
        if dark {
            let th = (xi / b).tanh();
            let s2 = 1.0 - th * th;
            sign * 4.0 * a * th.powi(3) * s2 / b
        } else {
            let th = xi.tanh();
            let s2 = 1.0 - th * th;
            sign * (a + sign * b) * (-2.0) * th * s2
        }
    };
    Some((phi, dphi))
}

/// Solve the decoupled Riemann-wave equations of the quintic cases by
/// characteristics at time `t` on the nodes `x`.  Hyperbolic cases use
/// the foot-point form x = ξ + φ(ξ) t (monotone in ξ before break-up);
/// elliptic cases use a complex Newton iteration on x = r t + F(r).
pub fn solve_riemann_wave(case: &InitialDataCase, x: &[f64], t: f64) -> Result<RiemannPair> {
    use InitialDataCase::*;
    case.validate()?;
    let cp = find_critical_point(case)?;
    if t > cp.t0 * (1.0 + 1e-12) {
        return Err(Error::PastBreakup { t, t0: cp.t0 });
    }
    match case {
        QuinticDefocSech | QuinticDefocSymmetric { .. } | QuinticDefocDark { .. } => {
            let mut r_plus = Vec::with_capacity(x.len());
            let mut r_minus = Vec::with_capacity(x.len());
            for plus in [true, false] {
                let (phi, dphi) = quintic_profile(case, plus).unwrap();
                let out = if plus { &mut r_plus } else { &mut r_minus };
                let mut seed = x.first().copied().unwrap_or(0.0);
                for &xi in x {
                    let g = |s: f64| s + phi(s) * t - xi;
                    let dg = |s: f64| 1.0 + dphi(s) * t;
                    let foot = newton_monotone(&g, &dg, seed, 1e-13 * (1.0 + xi.abs()))?;
                    seed = foot;
                    out.push(c(phi(foot)));
                }
            }
            let lambda_plus: Vec<C> = r_plus.iter().map(|&r| r).collect();
            let lambda_minus: Vec<C> = r_minus.iter().map(|&r| r).collect();
            Ok(RiemannPair {
                r_plus,
                r_minus,
                lambda_plus,
                lambda_minus,
                branch: Branch::Hyperbolic,
            })
        }
        QuinticFocSech { .. } | QuinticFocAsym { .. } | QuinticFocDark => {
            let r = solve_elliptic_characteristic(case, x, t)?;
            let r_minus: Vec<C> = r.iter().map(|z| z.conj()).collect();
            let lambda_plus: Vec<C> = r.clone();
            let lambda_minus: Vec<C> = r_minus.clone();
            Ok(RiemannPair {
                r_plus: r,
                r_minus,
                lambda_plus,
                lambda_minus,
                branch: Branch::Elliptic,
            })
        }
        _ => Err(Error::UnsupportedCase(
            case_name(case),
            "characteristic solution applies to the decoupled quintic cases".into(),
        )),
    }
}

/// Characteristic relation x = r t + F(r) (+ αℱ(r)) for the elliptic
/// quintic cases, returned as (value, derivative-in-r) closures.
fn elliptic_relation(case: &InitialDataCase) -> Option<(Box<dyn Fn(C, f64, f64) -> C>, Box<dyn Fn(C, f64) -> C>)> {
    use InitialDataCase::*;
    match *case {
        QuinticFocSech { a0 } => Some((
            Box::new(move |r, t, x| r * t + foc_sech_f(a0, r) - x),
            Box::new(move |r, t| c(t) + foc_sech_df(a0, r)),
        )),
        QuinticFocAsym { alpha } => Some((
            Box::new(move |r, t, x| r * t + asym_f(r) + alpha * asym_script_f(r) - x),
            Box::new(move |r, t| c(t) + asym_df(r) + alpha * asym_f(r)),
        )),
        QuinticFocDark => Some((
            Box::new(move |r, t, x| r * t + foc_dark_f(r) - x),
            Box::new(move |r, t| c(t) + foc_dark_df(r)),
        )),
        _ => None,
    }
}

/// Whether the case's closed-form F covers x ≤ 0 (+1 means x ≥ 0); for
/// symmetric data the other side follows from u(−x) = u(x), v(−x) = −v(x).
fn elliptic_canonical_side(case: &InitialDataCase) -> Option<f64> {
    use InitialDataCase::*;
    match case {
        QuinticFocSech { .. } => Some(-1.0),
        QuinticFocDark => Some(1.0),
        _ => None,
    }
}

fn elliptic_seed(case: &InitialDataCase, x: f64) -> C {
    use InitialDataCase::*;
    match *case {
        QuinticFocSech { a0 } => {
            let s = 1.0 / x.cosh();
            C::new(0.0, (a0 * a0 * s * s).max(1e-8))
        }
        QuinticFocAsym { .. } => C::new(-x.tanh(), (1.0 / x.cosh()).max(1e-8)),
        QuinticFocDark => C::new(0.0, x.tanh().powi(4).max(1e-8).min(1.0 - 1e-8)),
        _ => unreachable!(),
    }
}

fn solve_elliptic_characteristic(case: &InitialDataCase, xs: &[f64], t: f64) -> Result<Vec<C>> {
    let (h, dh) = elliptic_relation(case).ok_or_else(|| {
        Error::UnsupportedCase(case_name(case), "not an elliptic quintic case".into())
    })?;
    let side = elliptic_canonical_side(case);
    let mut out = vec![C::new(0.0, 0.0); xs.len()];
    // Solve on the canonical side, sweeping outward-in with continuation;
    // mirrored nodes use r(−x) = −conj(r(x)) (u even, v odd).
    let canonical: Vec<(usize, f64, bool)> = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| match side {
            Some(s) if x * s < 0.0 => (i, -x, true),
            _ => (i, x, false),
        })
        .collect();
    // Order by distance from the break region: sweep from the far tail.
    let mut order: Vec<usize> = (0..canonical.len()).collect();
    order.sort_by(|&i, &j| {
        let a = canonical[i].1;
        let b = canonical[j].1;
        match side {
            Some(s) if s > 0.0 => b.partial_cmp(&a).unwrap(),
            Some(_) => a.partial_cmp(&b).unwrap(),
            None => a.partial_cmp(&b).unwrap(),
        }
    });
    let mut prev: Option<C> = None;
    for &k in &order {
        let (idx, xc, mirrored) = canonical[k];
        // Vacuum point: the invariant vanishes and stays put (its
        // characteristic speed is r itself).
        let r0 = elliptic_seed(case, xc);
        if r0.im <= 1e-8 + f64::EPSILON && {
            use InitialDataCase::*;
            match *case {
                QuinticFocSech { a0 } => (a0 / xc.cosh()).powi(2) < 1e-12,
                QuinticFocDark => xc.tanh().powi(4) < 1e-12,
                _ => false,
            }
        } {
            let exact = match *case {
                InitialDataCase::QuinticFocSech { a0 } => {
                    C::new(0.0, (a0 / xc.cosh()).powi(2))
                }
                InitialDataCase::QuinticFocDark => C::new(0.0, xc.tanh().powi(4)),
                _ => unreachable!(),
            };
            out[idx] = if mirrored { -exact.conj() } else { exact };
            continue;
        }
        let mut solved = None;
        let mut seeds = Vec::new();
        if let Some(p) = prev {
            seeds.push(p);
        }
        seeds.push(elliptic_seed(case, xc));
        'seed: for &s0 in &seeds {
            // Direct solve, then progressive t-continuation as fallback.
            for steps in [1usize, 8, 64] {
                let mut r = s0;
                let mut ok = true;
                for k in 1..=steps {
                    let tk = t * k as f64 / steps as f64;
                    match newton_complex(&|z| h(z, tk, xc), &|z| dh(z, tk), r, 1e-12) {
                        Ok(root) => r = root,
                        Err(_) => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok && r.im > 0.0 {
                    solved = Some(r);
                    break 'seed;
                }
            }
        }
        let r = match (solved, prev) {
            (Some(r), _) => r,
            // Flagged node near the catastrophe: carry the neighbor.
            (None, Some(p)) => p,
            (None, None) => {
                return Err(Error::NewtonFailure(format!(
                    "elliptic characteristic failed at x = {xc}"
                )))
            }
        };
        prev = Some(r);
        out[idx] = if mirrored { -r.conj() } else { r };
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Semiclassical evaluation
// ---------------------------------------------------------------------------

/// Evaluate the dispersionless solution (u, v) at time t on the nodes x.
/// Requests past the gradient catastrophe fail loudly.
pub fn eval_semiclassical(case: &InitialDataCase, x: &[f64], t: f64) -> Result<MadelungState> {
    use InitialDataCase::*;
    case.validate()?;
    let cp = find_critical_point(case)?;
    if t > cp.t0 * (1.0 + 1e-12) {
        return Err(Error::PastBreakup { t, t0: cp.t0 });
    }
    match case {
        QuinticDefocSech | QuinticDefocSymmetric { .. } | QuinticDefocDark { .. } => {
            let pair = solve_riemann_wave(case, x, t)?;
            let u = pair
                .r_plus
                .iter()
                .zip(&pair.r_minus)
                .map(|(p, m)| 0.5 * (p.re - m.re))
                .collect();
            let v = pair
                .r_plus
                .iter()
                .zip(&pair.r_minus)
                .map(|(p, m)| 0.5 * (p.re + m.re))
                .collect();
            Ok(MadelungState { u, v })
        }
        QuinticFocSech { .. } | QuinticFocAsym { .. } | QuinticFocDark => {
            let pair = solve_riemann_wave(case, x, t)?;
            let u = pair.r_plus.iter().map(|r| r.im).collect();
            let v = pair.r_plus.iter().map(|r| r.re).collect();
            Ok(MadelungState { u, v })
        }
        CubicDefocSech | NonlocalDefocSech { .. } => eval_cubic_defocusing(x, t),
        CubicFocSech { a0 } => eval_cubic_focusing(*a0, x, t),
        NonlocalFocSech { .. } => eval_cubic_focusing(1.0, x, t),
    }
}

/// Cubic defocusing semiclassical solution by a 2×2 Newton iteration on
/// the Tian–Ye hodograph equations
/// x = (3r₊+r₋)t/4 + μ₊ and x = (r₊+3r₋)t/4 + μ₋.
fn eval_cubic_defocusing(xs: &[f64], t: f64) -> Result<MadelungState> {
    let a = 1.0;
    if t == 0.0 {
        // The hodograph map is degenerate at the profile maximum; at
        // t = 0 the solution is the initial datum itself.
        let u = xs.iter().map(|&x| (a / x.cosh()).powi(2)).collect();
        let v = vec![0.0; xs.len()];
        return Ok(MadelungState { u, v });
    }
    let system = |y: &[f64], x: f64, tt: f64| -> Vec<f64> {
        let (rp, rm) = (y[0], y[1]);
        match tian_ye_mu_closed(a, rp, rm) {
            Ok((mp, mm)) => vec![
                0.25 * (3.0 * rp + rm) * tt + mp - x,
                0.25 * (rp + 3.0 * rm) * tt + mm - x,
            ],
            Err(_) => vec![1e6, 1e6],
        }
    };
    // The closed form covers the branch x < 0; mirror the right half
    // using u(−x) = u(x), v(−x) = −v(x), i.e. r₊(−x) = −r₋(x).
    let mut u = vec![0.0; xs.len()];
    let mut v = vec![0.0; xs.len()];
    let mut items: Vec<(usize, f64, bool)> = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| if x > 0.0 { (i, -x, true) } else { (i, x, false) })
        .collect();
    items.sort_by(|p, q| p.1.partial_cmp(&q.1).unwrap());
    let mut prev: Option<Vec<f64>> = None;
    for (idx, xc, mirrored) in items {
        let s0 = 2.0 * a / xc.cosh();
        if s0 < 1e-8 {
            // Vacuum tail: invariants collapse; (u, v) → (background, 0).
            u[idx] = (0.5 * s0).powi(2);
            v[idx] = 0.0;
            continue;
        }
        let mut solved = None;
        let mut seeds: Vec<Vec<f64>> = Vec::new();
        if let Some(p) = &prev {
            seeds.push(p.clone());
        }
        seeds.push(vec![s0, -s0]);
        'seed: for s in &seeds {
            for steps in [1usize, 10, 80] {
                let mut y = s.clone();
                let mut ok = true;
                for k in 1..=steps {
                    let tk = t * k as f64 / steps as f64;
                    match newton_system(&|z: &[f64]| system(z, xc, tk), &y, 50, 1e-12) {
                        Ok((root, _)) => y = root,
                        Err(_) => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok && y[0] > y[1] {
                    solved = Some(y);
                    break 'seed;
                }
            }
        }
        let y = match (solved, &prev) {
            (Some(y), _) => y,
            (None, Some(p)) => p.clone(),
            (None, None) => {
                return Err(Error::NewtonFailure(format!(
                    "cubic hodograph Newton failed at x = {xc}"
                )))
            }
        };
        let (rp, rm) = (y[0], y[1]);
        prev = Some(y);
        let uu = ((rp - rm) / 4.0).powi(2);
        let vv = 0.5 * (rp + rm);
        u[idx] = uu;
        v[idx] = if mirrored { -vv } else { vv };
    }
    Ok(MadelungState { u, v })
}

/// Cubic focusing semiclassical solution: per-node 2×2 Newton on
/// x = vt + Re arcsinh((−v/2+iA₀)/√u), 0 = tu − Re √((−v/2+iA₀)²+u),
/// continued from the t = 0 initial data.
fn eval_cubic_focusing(a0: f64, xs: &[f64], t: f64) -> Result<MadelungState> {
    let system = |y: &[f64], x: f64, tt: f64| -> Vec<f64> {
        let (uu, vv) = (y[0], y[1]);
        if uu <= 0.0 {
            return vec![1e6, 1e6];
        }
        let z = C::new(-0.5 * vv, a0);
        let g1 = vv * tt + (z / c(uu.sqrt())).asinh().re - x;
        let g2 = tt * uu - (z * z + c(uu)).sqrt().re;
        vec![g1, g2]
    };
    let mut u = vec![0.0; xs.len()];
    let mut v = vec![0.0; xs.len()];
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&i, &j| xs[i].partial_cmp(&xs[j]).unwrap());
    let mut prev: Option<Vec<f64>> = None;
    for &idx in &order {
        let x = xs[idx];
        let s = a0 / x.cosh();
        let u0 = (s * s).max(1e-12);
        let mut solved = None;
        let mut seeds: Vec<Vec<f64>> = Vec::new();
        if let Some(p) = &prev {
            seeds.push(p.clone());
        }
        seeds.push(vec![u0, 0.0]);
        'seed: for s0 in &seeds {
            for steps in [1usize, 10, 80] {
                let mut y = s0.clone();
                let mut ok = true;
                for k in 1..=steps {
                    let tk = t * k as f64 / steps as f64;
                    match newton_system(&|z: &[f64]| system(z, x, tk), &y, 50, 1e-12) {
                        Ok((root, _)) => y = root,
                        Err(_) => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok && y[0] > 0.0 {
                    solved = Some(y);
                    break 'seed;
                }
            }
        }
        let y = match (solved, &prev) {
            (Some(y), _) => y,
            (None, Some(p)) => p.clone(),
            (None, None) => {
                return Err(Error::NewtonFailure(format!(
                    "cubic focusing hodograph failed at x = {x}"
                )))
            }
        };
        u[idx] = y[0];
        v[idx] = y[1];
        prev = Some(y);
    }
    Ok(MadelungState { u, v })
}

// ---------------------------------------------------------------------------
// Critical points
// ---------------------------------------------------------------------------

fn lambda0(case: &InitialDataCase, u0: f64, v0: f64) -> (C, C) {
    // √(u₀ V'₀) with V = u^s/s: cubic-family √u₀, quintic u₀.
    let s = case.model(1.0).power_s;
    let speed = if s == 1 { u0.sqrt() } else { u0 };
    match case.branch() {
        Branch::Hyperbolic => (c(-(v0 + speed)), c(-(v0 - speed))),
        Branch::Elliptic => (
            C::new(-v0, -speed),
            C::new(-v0, speed),
        ),
    }
}

fn invariants0(case: &InitialDataCase, u0: f64, v0: f64) -> (C, C) {
    let s = case.model(1.0).power_s;
    let q = if s == 1 { 2.0 * u0.sqrt() } else { u0 };
    match case.branch() {
        Branch::Hyperbolic => (c(v0 + q), c(v0 - q)),
        Branch::Elliptic => (C::new(v0, q), C::new(v0, -q)),
    }
}

/// Locate the first gradient catastrophe of the case's dispersionless
/// solution: closed forms where available, otherwise a Newton solve of
/// the break-up system.
pub fn find_critical_point(case: &InitialDataCase) -> Result<CriticalPoint> {
    use InitialDataCase::*;
    case.validate()?;
    match *case {
        CubicDefocSech | NonlocalDefocSech { .. } => {
            let a: f64 = 1.0;
            let s33 = 33.0_f64.sqrt();
            let rp = (a / 3.0) * (6.0 - s33) * (2.0 * s33 + 6.0).sqrt();
            let rm = -(a / 3.0) * (2.0 * s33 + 6.0).sqrt();
            let t0 = 3.0 * 2.0_f64.sqrt() / (32.0 * a) * (69.0 + 11.0 * s33).sqrt();
            let (_, mm) = tian_ye_mu_closed(a, rp, rm)?;
            let x0 = 0.25 * (rp + 3.0 * rm) * t0 + mm;
            let u0 = ((rp - rm) / 4.0).powi(2);
            let v0 = 0.5 * (rp + rm);
            let (lp, lm) = lambda0(case, u0, v0);
            Ok(CriticalPoint {
                x0,
                t0,
                u0,
                v0,
                r_plus0: c(rp),
                r_minus0: c(rm),
                lambda_plus0: lp,
                lambda_minus0: lm,
                which_invariant_breaks: BreakBranch::Minus,
            })
        }
        QuinticDefocSech => symmetric_minus_break(1.0, 0.0, case),
        QuinticDefocSymmetric { a, b } => {
            if b == 0.0 {
                symmetric_minus_break(a, 0.0, case)
            } else {
                symmetric_plus_break(a, b, case)
            }
        }
        QuinticDefocDark { a, b } => dark_minus_break(a, b, case),
        CubicFocSech { a0 } => {
            let u0 = 2.0 * a0 * a0;
            let (rp0, rm0) = invariants0(case, u0, 0.0);
            let (lp, lm) = lambda0(case, u0, 0.0);
            Ok(CriticalPoint {
                x0: 0.0,
                t0: 1.0 / (2.0 * a0),
                u0,
                v0: 0.0,
                r_plus0: rp0,
                r_minus0: rm0,
                lambda_plus0: lp,
                lambda_minus0: lm,
                which_invariant_breaks: BreakBranch::Elliptic,
            })
        }
        NonlocalFocSech { .. } => {
            let base = find_critical_point(&CubicFocSech { a0: 1.0 })?;
            let (lp, lm) = lambda0(case, base.u0, base.v0);
            Ok(CriticalPoint {
                lambda_plus0: lp,
                lambda_minus0: lm,
                ..base
            })
        }
        QuinticFocSech { a0 } => {
            // u₀ = A₀² ū with 1/√ū = cos(1/(2√(ū−1))).
            let f = |ub: f64| 1.0 / ub.sqrt() - (1.0 / (2.0 * (ub - 1.0).sqrt())).cos();
            let (mut lo, mut hi) = (1.2, 3.0);
            if f(lo) <= 0.0 || f(hi) >= 0.0 {
                return Err(Error::RootFailure(
                    "quintic focusing break-up bracket failed".into(),
                ));
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let u0 = a0 * a0 * 0.5 * (lo + hi);
            let t0 = a0 / (2.0 * u0 * (u0 - a0 * a0).sqrt());
            let (rp0, rm0) = invariants0(case, u0, 0.0);
            let (lp, lm) = lambda0(case, u0, 0.0);
            Ok(CriticalPoint {
                x0: 0.0,
                t0,
                u0,
                v0: 0.0,
                r_plus0: rp0,
                r_minus0: rm0,
                lambda_plus0: lp,
                lambda_minus0: lm,
                which_invariant_breaks: BreakBranch::Elliptic,
            })
        }
        QuinticFocAsym { alpha } => asym_critical(alpha, case),
        QuinticFocDark => {
            // Unknowns (v, u, t): Im(rt + F(r)) = 0 and t + F'(r) = 0.
            let sys = |y: &[f64]| -> Vec<f64> {
                let r = C::new(y[0], y[1]);
                let t = y[2];
                let g = c(t) + foc_dark_df(r);
                vec![(r * t + foc_dark_f(r)).im, g.re, g.im]
            };
            // Seed from a coarse scan of the breaking condition along the
            // initial profile.
            let (y, res) = newton_system(&sys, &[0.5, 1.1, 0.9], 100, 1e-12)?;
            if res > 1e-10 {
                return Err(Error::RootFailure(format!(
                    "dark focusing break-up residual {res:.3e}"
                )));
            }
            let r0 = C::new(y[0], y[1]);
            let t0 = y[2];
            let x0 = (r0 * t0 + foc_dark_f(r0)).re;
            let (u0, v0) = (r0.im, r0.re);
            let (lp, lm) = lambda0(case, u0, v0);
            Ok(CriticalPoint {
                x0,
                t0,
                u0,
                v0,
                r_plus0: r0,
                r_minus0: r0.conj(),
                lambda_plus0: lp,
                lambda_minus0: lm,
                which_invariant_breaks: BreakBranch::Elliptic,
            })
        }
    }
}

/// Plus-invariant catastrophe of the symmetric quintic family
/// u = A sech²x, v = −B tanh²x (closed forms).
fn symmetric_plus_break(a: f64, b: f64, case: &InitialDataCase) -> Result<CriticalPoint> {
    let s3 = 3.0_f64.sqrt();
    let rp0 = (2.0 * a - b) / 3.0;
    let t0 = 3.0 * s3 / (4.0 * (a + b));
    let x0 = (s3 / 4.0) * (2.0 * a - b) / (a + b) + ((s3 + 1.0) / 2.0_f64.sqrt()).ln();
    // Transverse invariant r₋ at the break point from x₀ = r t₀ + F₋(r).
    let g = |r: f64| r * t0 + sym_f_minus(a, b, r) - x0;
    let dg = |r: f64| t0 + sym_df_minus(a, b, r);
    let rm0 = newton_monotone(&g, &dg, -0.5 * (a + b), 1e-13)?;
    let u0 = 0.5 * (rp0 - rm0);
    let v0 = 0.5 * (rp0 + rm0);
    let (lp, lm) = lambda0(case, u0, v0);
    Ok(CriticalPoint {
        x0,
        t0,
        u0,
        v0,
        r_plus0: c(rp0),
        r_minus0: c(rm0),
        lambda_plus0: lp,
        lambda_minus0: lm,
        which_invariant_breaks: BreakBranch::Plus,
    })
}

/// Minus-invariant catastrophe of the sech case (B = 0), the mirror
/// image x → −x, v → −v of the plus break.
fn symmetric_minus_break(a: f64, _b: f64, case: &InitialDataCase) -> Result<CriticalPoint> {
    let plus = symmetric_plus_break(a, 0.0, case)?;
    let u0 = plus.u0;
    let v0 = -plus.v0;
    let (lp, lm) = lambda0(case, u0, v0);
    Ok(CriticalPoint {
        x0: -plus.x0,
        t0: plus.t0,
        u0,
        v0,
        r_plus0: -plus.r_minus0,
        r_minus0: -plus.r_plus0,
        lambda_plus0: lp,
        lambda_minus0: lm,
        which_invariant_breaks: BreakBranch::Minus,
    })
}

/// Minus-invariant catastrophe of the dark quintic case
/// u = A tanh⁴(x/B), v = 0 (closed forms; break on the right branch).
fn dark_minus_break(a: f64, b: f64, case: &InitialDataCase) -> Result<CriticalPoint> {
    let s15 = 15.0_f64.sqrt();
    let rm0 = -9.0 * a / 25.0;
    let t0 = 25.0 * s15 * b / (72.0 * a);
    let x0 = rm0 * t0 + dark_f_minus(a, b, rm0);
    let g = |r: f64| r * t0 + dark_f_plus(a, b, r) - x0;
    let dg = |r: f64| t0 + dark_df_plus(a, b, r);
    let rp0 = newton_monotone(&g, &dg, 0.05 * a, 1e-13)?;
    let u0 = 0.5 * (rp0 - rm0);
    let v0 = 0.5 * (rp0 + rm0);
    let (lp, lm) = lambda0(case, u0, v0);
    Ok(CriticalPoint {
        x0,
        t0,
        u0,
        v0,
        r_plus0: c(rp0),
        r_minus0: c(rm0),
        lambda_plus0: lp,
        lambda_minus0: lm,
        which_invariant_breaks: BreakBranch::Minus,
    })
}

/// Elliptic umbilic point of the asymmetric family, by Newton on the
/// complex break-up conditions Im(rt + F + αℱ) = 0, t + F' + αF = 0,
/// continued in α from the closed α = 0 seed.
fn asym_critical(alpha: f64, case: &InitialDataCase) -> Result<CriticalPoint> {
    // α = 0 seed: v = 0, 2u/(1+u²) + arctan((1−u²)/(2u)) = 0.
    let f0 = |u: f64| 2.0 * u / (1.0 + u * u) + ((1.0 - u * u) / (2.0 * u)).atan();
    let (mut lo, mut hi) = (1.5, 3.5);
    if f0(lo) <= 0.0 || f0(hi) >= 0.0 {
        return Err(Error::RootFailure("asymmetric α=0 bracket failed".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f0(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u_seed = 0.5 * (lo + hi);
    let mut y = vec![0.0, u_seed, 2.0 / (1.0 + u_seed * u_seed)];
    let n_steps = (alpha.abs() / 0.05).ceil().max(1.0) as usize;
    for k in 0..=n_steps {
        let ak = alpha * k as f64 / n_steps as f64;
        let sys = |y: &[f64]| -> Vec<f64> {
            let r = C::new(y[0], y[1]);
            let t = y[2];
            let g = c(t) + asym_df(r) + ak * asym_f(r);
            vec![(r * t + asym_f(r) + ak * asym_script_f(r)).im, g.re, g.im]
        };
        let (ynew, res) = newton_system(&sys, &y, 100, 1e-12)?;
        if res > 1e-10 {
            return Err(Error::RootFailure(format!(
                "asymmetric break-up residual {res:.3e} at α = {ak}"
            )));
        }
        y = ynew;
    }
    let r0 = C::new(y[0], y[1]);
    let t0 = y[2];
    let x0 = (r0 * t0 + asym_f(r0) + alpha * asym_script_f(r0)).re;
    let (u0, v0) = (r0.im, r0.re);
    let (lp, lm) = lambda0(case, u0, v0);
    Ok(CriticalPoint {
        x0,
        t0,
        u0,
        v0,
        r_plus0: r0,
        r_minus0: r0.conj(),
        lambda_plus0: lp,
        lambda_minus0: lm,
        which_invariant_breaks: BreakBranch::Elliptic,
    })
}

// ---------------------------------------------------------------------------
// Asymptotic constants
// ---------------------------------------------------------------------------

fn signed_root7(x: f64) -> f64 {
    x.signum() * x.abs().powf(1.0 / 7.0)
}

/// Richardson-extrapolated central first derivative (step h and h/2).
fn richardson_d1<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64) -> f64 {
    let d_h = (f(x + h) - f(x - h)) / (2.0 * h);
    let d_h2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
    (4.0 * d_h2 - d_h) / 3.0
}

/// Third central difference with Richardson extrapolation.
#[cfg(test)]
fn richardson_d3<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64) -> f64 {
    let d3 = |h: f64| {
        (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h)
    };
    (4.0 * d3(0.5 * h) - d3(h)) / 3.0
}

/// Printed closed form of ∂³μ₋/∂r₋³ for the sech² cubic datum.
fn cubic_d3mu(a: f64, rp: f64, rm: f64) -> f64 {
    let q4 = (rm - rp).powi(4);
    let term = |sgn: f64| {
        // sgn = +1 selects the (2a − r) pair, −1 the (2a + r) pair.
        let num = ((2.0 * a - sgn * rp).powi(3) / (2.0 * a - sgn * rm).powi(5)).sqrt();
        let poly = 48.0 * a * a + 1.5 * rp * rp + 17.5 * rm * rm - 7.0 * rm * rp
            - sgn * 56.0 * a * rm
            + sgn * 8.0 * a * rp;
        num * poly
    };
    (term(1.0) - term(-1.0)) / (2.0 * q4)
}

/// α, β, γ, ρ, σ and the matching scales ν± for a hyperbolic case.
pub fn hyperbolic_constants(
    case: &InitialDataCase,
    cp: &CriticalPoint,
) -> Result<HyperbolicConstants> {
    use InitialDataCase::*;
    if case.branch() != Branch::Hyperbolic {
        return Err(Error::UnsupportedCase(
            case_name(case),
            "hyperbolic constants require a defocusing case".into(),
        ));
    }
    let u0 = cp.u0;
    let (alpha, beta, gamma, rho) = match *case {
        CubicDefocSech | NonlocalDefocSech { .. } => {
            let a = 1.0;
            let (rp, rm) = (cp.r_plus0.re, cp.r_minus0.re);
            let beta = -3.0 / (8.0 * u0.sqrt());
            let gamma = -cubic_d3mu(a, rp, rm);
            let mu_p = |r: f64| tian_ye_mu_closed(a, r, rm).map(|m| m.0).unwrap_or(f64::NAN);
            let alpha = richardson_d1(&mu_p, rp, 1e-3) + 0.75 * cp.t0;
            let rho = match *case {
                NonlocalDefocSech { eta } => (1.0 - 4.0 * eta * u0) / (16.0 * u0),
                _ => 1.0 / (16.0 * u0),
            };
            (alpha, beta, gamma, rho)
        }
        QuinticDefocSech | QuinticDefocSymmetric { .. } | QuinticDefocDark { .. } => {
            let (rp, rm) = (cp.r_plus0.re, cp.r_minus0.re);
            let beta = -1.0 / (rp - rm);
            let rho = 1.0 / (16.0 * u0 * u0);
            let (gamma, alpha) = quintic_gamma_alpha(case, cp)?;
            (alpha, beta, gamma, rho)
        }
        _ => unreachable!(),
    };
    let sigma = -rho;
    if rho.abs() < 1e-12 {
        return Err(Error::NonGeneric(
            case_name(case),
            "ρ = 0: the ε-correction degenerates and the P_I² description does not apply".into(),
        ));
    }
    if beta == 0.0 || gamma == 0.0 {
        return Err(Error::NonGeneric(
            case_name(case),
            "β or γ vanishes at the critical point".into(),
        ));
    }
    let nu_minus = signed_root7(beta.powi(3) / (12.0_f64.powi(3) * rho.powi(3) * gamma));
    let nu_plus = signed_root7(beta.powi(9) / (144.0 * rho * rho * gamma.powi(3)));
    Ok(HyperbolicConstants {
        alpha,
        beta,
        gamma,
        rho,
        sigma,
        nu_plus,
        nu_minus,
    })
}

/// Case-specific (γ, α) for the decoupled quintic families, from the
/// closed-form characteristic inverses:
/// γ = ∓F_b'''(r_b⁰) for the breaking invariant and
/// α = G'(r_tr⁰) + t₀ for the transverse one (branch through x₀).
fn quintic_gamma_alpha(case: &InitialDataCase, cp: &CriticalPoint) -> Result<(f64, f64)> {
    use InitialDataCase::*;
    let s3 = 3.0_f64.sqrt();
    match (*case, cp.which_invariant_breaks) {
        (QuinticDefocSech, BreakBranch::Minus) => {
            let (a, b): (f64, f64) = (1.0, 0.0);
            let gamma = 81.0 * s3 / (16.0 * (a + b).powi(3));
            // Mirror branch: the plus inverse through x₀ < 0 is −F₊.
            let alpha = -sym_df_plus(a, b, cp.r_plus0.re) + cp.t0;
            Ok((gamma, alpha))
        }
        (QuinticDefocSymmetric { a, b }, BreakBranch::Minus) => {
            let gamma = 81.0 * s3 / (16.0 * (a + b).powi(3));
            let alpha = -sym_df_plus(a, b, cp.r_plus0.re) + cp.t0;
            Ok((gamma, alpha))
        }
        (QuinticDefocSymmetric { a, b }, BreakBranch::Plus) => {
            let gamma = 81.0 * s3 / (16.0 * (a + b).powi(3));
            let alpha = sym_df_minus(a, b, cp.r_minus0.re) + cp.t0;
            Ok((gamma, alpha))
        }
        (QuinticDefocDark { a, b }, BreakBranch::Minus) => {
            let s15 = 15.0_f64.sqrt();
            let gamma = 78125.0 * s15 * b / (31104.0 * a.powi(3));
            let alpha = dark_df_plus(a, b, cp.r_plus0.re) + cp.t0;
            Ok((gamma, alpha))
        }
        _ => Err(Error::UnsupportedCase(
            case_name(case),
            "no closed-form constants for this break branch".into(),
        )),
    }
}

/// a₊, C₊⁺, λ⁰₊,₊ and the polar split a₊ = −i/(r e^{iψ}) for an
/// elliptic case.
pub fn elliptic_constants(case: &InitialDataCase, cp: &CriticalPoint) -> Result<EllipticConstants> {
    use InitialDataCase::*;
    if case.branch() != Branch::Elliptic {
        return Err(Error::UnsupportedCase(
            case_name(case),
            "elliptic constants require a focusing case".into(),
        ));
    }
    let u0 = cp.u0;
    let a_plus = match *case {
        CubicFocSech { a0 } => -I * u0.sqrt() / (4.0 * a0.powi(3)),
        NonlocalFocSech { .. } => -I * u0.sqrt() / 4.0,
        QuinticFocSech { a0 } => {
            I * (a0 / (4.0 * u0 * u0)) * (2.0 * a0 * a0 - 3.0 * u0)
                / (u0 - a0 * a0).powf(1.5)
        }
        QuinticFocAsym { alpha } => {
            let r = cp.r_plus0;
            let d = r * r - c(1.0);
            2.0 * (alpha * d - 2.0 * r) / (d * d)
        }
        QuinticFocDark => {
            let r = cp.r_plus0;
            let w = (-I * r).sqrt();
            -(c(1.0) / 16.0) * (c(3.0) - 5.0 * w) * (-I * r).powf(0.25)
                / (r * r * (w - c(1.0)) * (w - c(1.0)))
        }
        _ => unreachable!(),
    };
    if a_plus.norm() < 1e-14 {
        return Err(Error::NonGeneric(
            case_name(case),
            "a₊ = 0: degenerate elliptic umbilic point".into(),
        ));
    }
    let s = case.model(1.0).power_s;
    // V = u^s/s: V'₀ = u₀^{s−1}, V''₀ = (s−1) u₀^{s−2}.
    let (c_pp, lambda_pp) = match *case {
        NonlocalFocSech { eta } => (
            -(1.0 + 4.0 * eta * u0) / (8.0 * I * u0.sqrt()),
            c(-0.75),
        ),
        _ => {
            let vp = u0.powi(s as i32 - 1);
            let vpp = (s as f64 - 1.0) * u0.powi(s as i32 - 2);
            (
                -1.0 / (8.0 * I * (vp * u0).sqrt()),
                c(-0.75 - u0 * vpp / (4.0 * vp)),
            )
        }
    };
    let w = -I / a_plus;
    Ok(EllipticConstants {
        a_plus,
        c_plus_plus: c_pp,
        lambda_pp0: lambda_pp,
        r_mod: w.norm(),
        psi_arg: w.arg(),
    })
}
