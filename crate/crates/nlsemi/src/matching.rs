//! Universal local asymptotics near the point of gradient catastrophe:
//! the P_I²-based description of the Riemann invariants in the
//! hyperbolic (defocusing) case, the tritronquée-based description of
//! the Madelung fields in the elliptic (focusing) case, and
//! matching-zone comparison of the asymptotic formulas against the full
//! and semiclassical solutions.

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64 as C;

use crate::cheb::{barycentric_eval, ChebSegment};
use crate::hodograph::{
    elliptic_constants, find_critical_point, hyperbolic_constants, BreakBranch, CriticalPoint,
    EllipticConstants, HyperbolicConstants,
};
use crate::madelung::{Branch, InitialDataCase, MadelungState, RiemannPair};
use crate::painleve::{
    default_p12_segment, p12_series, solve_p1_tritronquee, P12Continuation, M_SERIES,
};
use crate::{Error, Result};

const I: C = C::new(0.0, 1.0);

/// Granularity of the P_I² cache in the slow variable T; the rounding
/// error is far below the O(ε^{4/7}) remainder of the formula.
const T_CACHE_STEP: f64 = 1e-3;

/// Beyond this fraction of the collocation half-length the P_I²
/// solution is taken from the optimally truncated far-field series
/// instead of the collocation values.
const SERIES_FRACTION: f64 = 0.7;

/// Minimum endpoint modulus of the tritronquée collocation segment, so
/// the boundary data from the asymptotic series are accurate.
const XI_MIN: f64 = 9.0;

/// Local frame at the critical point: the critical-point data, the
/// branch-specific asymptotic constants, and the semiclassical
/// parameter ε.
#[derive(Debug, Clone)]
pub struct LocalFrame {
    pub case: InitialDataCase,
    pub cp: CriticalPoint,
    pub constants: FrameConstants,
    pub epsilon: f64,
}

/// Constants of the local description: hyperbolic (α, β, γ, ρ, σ, ν±)
/// or elliptic (a₊ and its polar split).
#[derive(Debug, Clone)]
pub enum FrameConstants {
    Hyperbolic(HyperbolicConstants),
    Elliptic(EllipticConstants),
}

impl LocalFrame {
    /// Build the frame for a case: locate the critical point and
    /// compute the constants of the matching branch.
    pub fn new(case: &InitialDataCase, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        let cp = find_critical_point(case)?;
        let constants = match case.branch() {
            Branch::Hyperbolic => FrameConstants::Hyperbolic(hyperbolic_constants(case, &cp)?),
            Branch::Elliptic => FrameConstants::Elliptic(elliptic_constants(case, &cp)?),
        };
        Ok(LocalFrame {
            case: *case,
            cp,
            constants,
            epsilon,
        })
    }
}

/// Comparison of the full solution against the semiclassical and the
/// local Painlevé descriptions over a window.
#[derive(Debug, Clone)]
pub struct MatchReport {
    pub window: (f64, f64),
    pub sup_diff_semiclassical: f64,
    pub sup_diff_painleve: f64,
    /// Outermost sign changes of the error difference: the interval on
    /// which the Painlevé description beats the semiclassical one
    /// (None when it never does).
    pub crossover: Option<(f64, f64)>,
    /// Number of sign changes of the error difference inside the
    /// window; oscillation makes the inner changes ambiguous, so they
    /// are counted but not used for the crossover bounds.
    pub sign_changes: usize,
}

// ---------------------------------------------------------------------------
// Hyperbolic case: P_I² formula
// ---------------------------------------------------------------------------

/// Cache of P_I² collocation solutions keyed by the slow variable T
/// rounded to the cache grid; solves proceed in ascending T order so
/// the continuation chain stays short.
pub struct P12Cache {
    segment: ChebSegment,
    cont: Option<P12Continuation>,
    /// Nodal values of U and U_XX (collocation derivative) per T key.
    entries: BTreeMap<i64, (Vec<C>, Vec<C>)>,
}

impl P12Cache {
    pub fn new(segment: ChebSegment) -> Self {
        P12Cache {
            segment,
            cont: None,
            entries: BTreeMap::new(),
        }
    }

    fn half_length(&self) -> f64 {
        0.5 * (self.segment.endpoint_b.re - self.segment.endpoint_a.re)
    }

    fn ensure(&mut self, keys: &[i64]) -> Result<()> {
        let mut missing: Vec<i64> = keys
            .iter()
            .copied()
            .filter(|k| !self.entries.contains_key(k))
            .collect();
        missing.sort_unstable();
        missing.dedup();
        if missing.is_empty() {
            return Ok(());
        }
        if self.cont.is_none() {
            self.cont = Some(P12Continuation::new(&self.segment)?);
        }
        let cont = self.cont.as_mut().unwrap();
        for key in missing {
            let t = key as f64 * T_CACHE_STEP;
            let sol = cont.solve(t)?;
            let u = DVector::from_iterator(sol.values.len(), sol.values.iter().map(|z| z.re));
            let uxx = cont.dx() * (cont.dx() * &u);
            self.entries.insert(
                key,
                (
                    u.iter().map(|&v| C::new(v, 0.0)).collect(),
                    uxx.iter().map(|&v| C::new(v, 0.0)).collect(),
                ),
            );
        }
        Ok(())
    }
}

/// Characteristic speeds from the Riemann invariants for a hyperbolic
/// case: λ₊ = −(3r₊+r₋)/4, λ₋ = −(r₊+3r₋)/4 (cubic families) or
/// λ± = −r± (quintic families).
fn lambda_pair(case: &InitialDataCase, rp: f64, rm: f64) -> (f64, f64) {
    if case.model(1.0).power_s == 1 {
        (-(3.0 * rp + rm) / 4.0, -(rp + 3.0 * rm) / 4.0)
    } else {
        (-rp, -rm)
    }
}

/// Evaluate the P_I² local asymptotic representation of the Riemann
/// invariants at the points `xs` and time `t` near the critical point,
/// reusing cached P_I² solutions.
///
/// With x_± = x − x₀ + λ±⁰(t − t₀), X = ν₋x₋/ε^{6/7} and
/// T = ν₊x₊/ε^{4/7}, the breaking invariant is
/// r₋ = r₋⁰ + (ν₊ε^{2/7}/(βν₋)) U(X,T) and the transverse one
/// r₊ = r₊⁰ + ε^{4/7}[x₊/α − (σν₊ν₋/β) U_XX(X,T)].  When the plus
/// invariant breaks, the mirror map x → −x, r± → −r∓ reduces to the
/// same formula with relabelled characteristic coordinates.
pub fn p12_approx_with(
    frame: &LocalFrame,
    xs: &[f64],
    t: f64,
    cache: &mut P12Cache,
) -> Result<RiemannPair> {
    let hc = match &frame.constants {
        FrameConstants::Hyperbolic(hc) => hc,
        FrameConstants::Elliptic(_) => {
            return Err(Error::UnsupportedCase(
                format!("{:?}", frame.case),
                "the P_I² representation applies to hyperbolic (defocusing) frames".into(),
            ))
        }
    };
    let cp = &frame.cp;
    let plus_break = match cp.which_invariant_breaks {
        BreakBranch::Minus => false,
        BreakBranch::Plus => true,
        BreakBranch::Elliptic => {
            return Err(Error::UnsupportedCase(
                format!("{:?}", frame.case),
                "elliptic break points use the tritronquée formula".into(),
            ))
        }
    };
    let eps = frame.epsilon;
    let (e27, e47, e67) = (
        eps.powf(2.0 / 7.0),
        eps.powf(4.0 / 7.0),
        eps.powf(6.0 / 7.0),
    );
    let (lp0, lm0) = (cp.lambda_plus0.re, cp.lambda_minus0.re);
    let (rp0, rm0) = (cp.r_plus0.re, cp.r_minus0.re);
    let s1 = hc.nu_plus * e27 / (hc.beta * hc.nu_minus);
    let s2 = hc.sigma * hc.nu_plus * hc.nu_minus / hc.beta;
    let dt = t - cp.t0;

    // Fast variable X, slow variable T and the transverse coordinate
    // per evaluation point (relabelled for a plus break).
    let coords: Vec<(f64, f64, f64)> = xs
        .iter()
        .map(|&x| {
            let xp = x - cp.x0 + lp0 * dt;
            let xm = x - cp.x0 + lm0 * dt;
            if plus_break {
                (-hc.nu_minus * xp / e67, -hc.nu_plus * xm / e47, xm)
            } else {
                (hc.nu_minus * xm / e67, hc.nu_plus * xp / e47, xp)
            }
        })
        .collect();

    let half = cache.half_length();
    let keys: Vec<i64> = coords
        .iter()
        .filter(|&&(bx, _, _)| bx.abs() <= SERIES_FRACTION * half)
        .map(|&(_, bt, _)| (bt / T_CACHE_STEP).round() as i64)
        .collect();
    cache.ensure(&keys)?;

    let n = xs.len();
    let mut r_plus = Vec::with_capacity(n);
    let mut r_minus = Vec::with_capacity(n);
    let mut lam_plus = Vec::with_capacity(n);
    let mut lam_minus = Vec::with_capacity(n);
    for &(bx, bt, x_tr) in &coords {
        let key = (bt / T_CACHE_STEP).round() as i64;
        let t_r = key as f64 * T_CACHE_STEP;
        let (u, uxx) = if bx.abs() <= SERIES_FRACTION * half {
            let (uv, uxxv) = cache.entries.get(&key).unwrap();
            let y = bx / half;
            (barycentric_eval(uv, y).re, barycentric_eval(uxxv, y).re)
        } else {
            let vals = p12_series(bx, t_r, M_SERIES)?;
            (vals[0], vals[2])
        };
        // The non-breaking invariant keeps the physical hodograph
        // linearization x/α (so the formula limits to the hodograph
        // solution as ε → 0) plus the O(ε^{4/7}) dispersive correction.
        let (rp, rm) = if plus_break {
            (
                rp0 - s1 * u,
                rm0 + x_tr / hc.alpha + e47 * s2 * uxx,
            )
        } else {
            (
                rp0 + x_tr / hc.alpha - e47 * s2 * uxx,
                rm0 + s1 * u,
            )
        };
        let (lp, lm) = lambda_pair(&frame.case, rp, rm);
        r_plus.push(C::new(rp, 0.0));
        r_minus.push(C::new(rm, 0.0));
        lam_plus.push(C::new(lp, 0.0));
        lam_minus.push(C::new(lm, 0.0));
    }
    Ok(RiemannPair {
        r_plus,
        r_minus,
        lambda_plus: lam_plus,
        lambda_minus: lam_minus,
        branch: Branch::Hyperbolic,
    })
}

/// One-shot variant of [`p12_approx_with`] with a freshly built cache
/// sized from the largest |T| encountered.
pub fn p12_approx(frame: &LocalFrame, xs: &[f64], t: f64) -> Result<RiemannPair> {
    let hc = match &frame.constants {
        FrameConstants::Hyperbolic(hc) => hc,
        FrameConstants::Elliptic(_) => {
            return Err(Error::UnsupportedCase(
                format!("{:?}", frame.case),
                "the P_I² representation applies to hyperbolic (defocusing) frames".into(),
            ))
        }
    };
    let cp = &frame.cp;
    let eps = frame.epsilon;
    let e47 = eps.powf(4.0 / 7.0);
    let dt = t - cp.t0;
    let max_t = xs
        .iter()
        .map(|&x| {
            let (l_tr, sgn) = match cp.which_invariant_breaks {
                BreakBranch::Plus => (cp.lambda_minus0.re, -1.0),
                _ => (cp.lambda_plus0.re, 1.0),
            };
            (sgn * hc.nu_plus * (x - cp.x0 + l_tr * dt) / e47).abs()
        })
        .fold(0.0, f64::max);
    let mut cache = P12Cache::new(default_p12_segment(max_t));
    p12_approx_with(frame, xs, t, &mut cache)
}

// ---------------------------------------------------------------------------
// Elliptic case: tritronquée formula
// ---------------------------------------------------------------------------

/// The scale factors of the elliptic local formula: ξ = k·x₊ with
/// x₊ = x − x₀ + λ₊⁰(t−t₀), and the complex increment
/// Δ = v − v₀ + i√(V'₀/u₀)(u − u₀) = P·Ω(ξ).  The fifth roots take
/// the principal (positive real) root of the positive factor with the
/// phase ψ/5 (resp. 2ψ/5) from the polar split a₊ = −i/(r e^{iψ}).
fn p1_factors(frame: &LocalFrame) -> Result<(C, C, f64)> {
    let ec = match &frame.constants {
        FrameConstants::Elliptic(ec) => ec,
        FrameConstants::Hyperbolic(_) => {
            return Err(Error::UnsupportedCase(
                format!("{:?}", frame.case),
                "the tritronquée representation applies to elliptic (focusing) frames".into(),
            ))
        }
    };
    let u0 = frame.cp.u0;
    let eps = frame.epsilon;
    let (r, psi) = (ec.r_mod, ec.psi_arg);
    let (q_xi, q_d, scale_u) = if let InitialDataCase::NonlocalFocSech { eta } = frame.case {
        let m = 1.0 + 4.0 * eta * u0;
        (
            3.0 * u0 / (m * m),
            r * r * m / (27.0 * u0.sqrt()),
            u0.sqrt(),
        )
    } else {
        let s = frame.case.model(1.0).power_s as i32;
        let vp = u0.powi(s - 1);
        let vpp = (s - 1) as f64 * u0.powi(s - 2);
        let w = 3.0 * vp + u0 * vpp;
        (
            (u0 / vp) * w * w / 3.0,
            r * r / (9.0 * (u0 / vp).sqrt() * w),
            (u0 / vp).sqrt(),
        )
    };
    let k = -I * (q_xi * r / eps.powi(4)).powf(0.2) * (I * psi / 5.0).exp();
    let p = 6.0 * I * (eps * eps * q_d).powf(0.2) * (I * 2.0 * psi / 5.0).exp();
    Ok((k, p, scale_u))
}

/// The tritronquée argument ξ at a single point (x, t).
pub fn p1_xi(frame: &LocalFrame, x: f64, t: f64) -> Result<C> {
    let (k, _, _) = p1_factors(frame)?;
    let cc = -frame.cp.x0 + frame.cp.lambda_plus0 * (t - frame.cp.t0);
    Ok(k * (cc + x))
}

/// Evaluate the tritronquée local asymptotic representation near an
/// elliptic critical point: returns the Madelung increments
/// (u − u₀, v − v₀) at the points `xs` and time `t`.
///
/// The arguments ξ lie on a straight segment in ℂ; Ω is computed by
/// one collocation solve on that segment (extended so both endpoints
/// carry accurate series boundary data) and interpolated.
pub fn p1_approx(frame: &LocalFrame, xs: &[f64], t: f64) -> Result<MadelungState> {
    if xs.is_empty() {
        return Ok(MadelungState {
            u: vec![],
            v: vec![],
        });
    }
    let (k, p, scale_u) = p1_factors(frame)?;
    let cc = -frame.cp.x0 + frame.cp.lambda_plus0 * (t - frame.cp.t0);
    let kn = k.norm();

    // ξ(x) = k(x + cc): choose segment endpoints covering the data and
    // reaching |ξ| ≥ XI_MIN on both sides of the closest approach.
    let (x_lo, x_hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    let s_star = -cc.re;
    let w = (XI_MIN * XI_MIN / (kn * kn) - cc.im * cc.im).max(0.0).sqrt();
    let mut s_a = x_lo.min(s_star - w);
    let mut s_b = x_hi.max(s_star + w);
    if s_b - s_a < 1e-8 {
        s_a -= XI_MIN / kn;
        s_b += XI_MIN / kn;
    }
    let xi_a = k * (cc + s_a);
    let xi_b = k * (cc + s_b);
    let segment = ChebSegment::new(xi_a, xi_b, 256)?;
    let sol = solve_p1_tritronquee(&segment)?;
    let mid = 0.5 * (xi_a + xi_b);
    let half = 0.5 * (xi_b - xi_a);

    let mut du = Vec::with_capacity(xs.len());
    let mut dv = Vec::with_capacity(xs.len());
    for &x in xs {
        let xi = k * (cc + x);
        if xi.arg().abs() >= 0.8 * std::f64::consts::PI {
            return Err(Error::InvalidParameter(format!(
                "ξ = {xi} leaves the pole-free sector |arg ξ| < 4π/5"
            )));
        }
        let y = ((xi - mid) / half).re;
        let omega = barycentric_eval(&sol.values, y);
        let delta = p * omega;
        du.push(delta.im * scale_u);
        dv.push(delta.re);
    }
    Ok(MadelungState { u: du, v: dv })
}

// ---------------------------------------------------------------------------
// Matching zones
// ---------------------------------------------------------------------------

/// Pointwise error between two Madelung states at index j.
fn point_err(a: &MadelungState, b: &MadelungState, j: usize) -> f64 {
    let du = a.u[j] - b.u[j];
    let dv = a.v[j] - b.v[j];
    (du * du + dv * dv).sqrt()
}

/// Compare the full solution `nls` against the semiclassical solution
/// `semi` and the local Painlevé description `pain` on the common grid
/// `xs`, restricted to `window`: sup-norm errors and the outermost
/// crossover interval on which the Painlevé description is better.
pub fn matching_zone(
    xs: &[f64],
    nls: &MadelungState,
    semi: &MadelungState,
    pain: &MadelungState,
    window: (f64, f64),
) -> Result<MatchReport> {
    let n = xs.len();
    if nls.u.len() != n || semi.u.len() != n || pain.u.len() != n {
        return Err(Error::InvalidParameter(
            "matching_zone requires all fields on the same grid".into(),
        ));
    }
    let idx: Vec<usize> = (0..n)
        .filter(|&j| xs[j] >= window.0 && xs[j] <= window.1)
        .collect();
    if idx.is_empty() {
        return Err(Error::InvalidParameter(
            "matching window contains no grid points".into(),
        ));
    }
    let mut sup_semi = 0.0f64;
    let mut sup_pain = 0.0f64;
    let mut x_l = None;
    let mut x_r = None;
    let mut sign_changes = 0usize;
    let mut last_sign: Option<bool> = None;
    for &j in &idx {
        let es = point_err(nls, semi, j);
        let ep = point_err(nls, pain, j);
        sup_semi = sup_semi.max(es);
        sup_pain = sup_pain.max(ep);
        let better = ep < es;
        if better {
            if x_l.is_none() {
                x_l = Some(xs[j]);
            }
            x_r = Some(xs[j]);
        }
        if let Some(prev) = last_sign {
            if prev != better {
                sign_changes += 1;
            }
        }
        last_sign = Some(better);
    }
    Ok(MatchReport {
        window,
        sup_diff_semiclassical: sup_semi,
        sup_diff_painleve: sup_pain,
        crossover: x_l.zip(x_r),
        sign_changes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hodograph::eval_semiclassical;
    use crate::madelung::InitialDataCase::*;

    fn hyper(frame: &LocalFrame) -> &HyperbolicConstants {
        match &frame.constants {
            FrameConstants::Hyperbolic(hc) => hc,
            _ => panic!("expected hyperbolic constants"),
        }
    }

    #[test]
    fn frame_rejects_bad_epsilon() {
        assert!(LocalFrame::new(&QuinticDefocSech, 0.0).is_err());
        assert!(LocalFrame::new(&QuinticDefocSech, -0.1).is_err());
    }

    #[test]
    fn frame_rejects_nongeneric_nonlocal() {
        // At η = 1/(4u₀) the constant ρ vanishes and the hyperbolic
        // frame degenerates.
        let cp = find_critical_point(&CubicDefocSech).unwrap();
        let eta = 1.0 / (4.0 * cp.u0);
        match LocalFrame::new(&NonlocalDefocSech { eta }, 0.1) {
            Err(Error::NonGeneric(_, _)) => {}
            other => panic!("expected NonGeneric, got {other:?}"),
        }
    }

    #[test]
    fn p12_rejects_elliptic_frame() {
        let frame = LocalFrame::new(&CubicFocSech { a0: 1.0 }, 0.1).unwrap();
        assert!(p12_approx(&frame, &[0.0], 0.4).is_err());
    }

    #[test]
    fn p1_rejects_hyperbolic_frame() {
        let frame = LocalFrame::new(&QuinticDefocSech, 0.1).unwrap();
        assert!(p1_approx(&frame, &[0.0], 1.0).is_err());
    }

    /// Solve the prescribed (X, T) for (x, t) from the linear frame map.
    fn point_for(frame: &LocalFrame, bigx: f64, bigt: f64) -> (f64, f64) {
        let hc = hyper(frame);
        let cp = &frame.cp;
        let eps = frame.epsilon;
        let (e47, e67) = (eps.powf(4.0 / 7.0), eps.powf(6.0 / 7.0));
        let (lp, lm) = (cp.lambda_plus0.re, cp.lambda_minus0.re);
        // X = ν₋(dx + λ₋ dt)/ε^{6/7}, T = ν₊(dx + λ₊ dt)/ε^{4/7}.
        let a = bigx * e67 / hc.nu_minus;
        let b = bigt * e47 / hc.nu_plus;
        let dt = (b - a) / (lp - lm);
        let dx = a - lm * dt;
        (cp.x0 + dx, cp.t0 + dt)
    }

    #[test]
    fn p12_reduces_to_hodograph_normal_form_at_large_x() {
        // Large |X| at fixed T: the formula must limit to the cubic
        // normal form x₋ = βx₊R₋ − (γ/6)R₋³ of the breaking invariant.
        let frame = LocalFrame::new(&QuinticDefocSech, 0.05).unwrap();
        let hc = hyper(&frame).clone();
        let cp = frame.cp.clone();
        for &(bigx, bigt) in &[(-150.0, -0.5), (200.0, 0.4), (-300.0, 0.0)] {
            let (x, t) = point_for(&frame, bigx, bigt);
            let pair = p12_approx(&frame, &[x], t).unwrap();
            let r = pair.r_minus[0].re - cp.r_minus0.re;
            let dt = t - cp.t0;
            let xm = x - cp.x0 + cp.lambda_minus0.re * dt;
            let xp = x - cp.x0 + cp.lambda_plus0.re * dt;
            // Newton on the normal-form cubic from the formula value.
            let mut rr = r;
            for _ in 0..50 {
                let f = hc.beta * xp * rr - hc.gamma / 6.0 * rr * rr * rr - xm;
                let fp = hc.beta * xp - hc.gamma / 2.0 * rr * rr;
                rr -= f / fp;
            }
            assert!(
                (r - rr).abs() <= 1e-2 * rr.abs(),
                "X={bigx}: formula {r} vs normal form {rr}"
            );
        }
    }

    #[test]
    fn p12_translation_covariance() {
        let frame = LocalFrame::new(&QuinticDefocSech, 0.05).unwrap();
        let mut shifted = frame.clone();
        shifted.cp.x0 += 0.37;
        let (x, t) = point_for(&frame, -180.0, 0.25);
        let a = p12_approx(&frame, &[x], t).unwrap();
        let b = p12_approx(&shifted, &[x + 0.37], t).unwrap();
        assert!((a.r_minus[0] - b.r_minus[0]).norm() < 1e-13);
        assert!((a.r_plus[0] - b.r_plus[0]).norm() < 1e-13);
    }

    #[test]
    fn p12_plus_break_mirrors_sech_minus_break() {
        // The symmetric family with B → 0 breaks in the plus invariant
        // at the mirror image of the sech minus-break point; the two
        // representations must be mirror images: r₊(x) = −r₋(−x).
        let plus = LocalFrame::new(
            &QuinticDefocSymmetric { a: 1.0, b: 1e-11 },
            0.05,
        )
        .unwrap();
        assert_eq!(plus.cp.which_invariant_breaks, BreakBranch::Plus);
        let minus = LocalFrame::new(&QuinticDefocSech, 0.05).unwrap();
        assert!((plus.cp.x0 + minus.cp.x0).abs() < 1e-8);
        let (xm, t) = point_for(&minus, -150.0, 0.3);
        let a = p12_approx(&minus, &[xm], t).unwrap();
        let b = p12_approx(&plus, &[-xm], t).unwrap();
        assert!(
            (b.r_plus[0].re + a.r_minus[0].re).abs() < 1e-7,
            "{} vs {}",
            b.r_plus[0].re,
            -a.r_minus[0].re
        );
        assert!(
            (b.r_minus[0].re + a.r_plus[0].re).abs() < 1e-7,
            "{} vs {}",
            b.r_minus[0].re,
            -a.r_plus[0].re
        );
    }

    #[test]
    fn p12_value_at_the_break_point() {
        // At (x₀, t₀): X = T = 0 and the breaking invariant offset is
        // (ν₊ε^{2/7}/(βν₋))·U(0,0).
        let frame = LocalFrame::new(&QuinticDefocSech, 0.1).unwrap();
        let hc = hyper(&frame).clone();
        let mut cache = P12Cache::new(ChebSegment::real(-20.0, 20.0, 768).unwrap());
        let pair =
            p12_approx_with(&frame, &[frame.cp.x0], frame.cp.t0, &mut cache).unwrap();
        let scale = hc.nu_plus * 0.1f64.powf(2.0 / 7.0) / (hc.beta * hc.nu_minus);
        let u00 = (pair.r_minus[0].re - frame.cp.r_minus0.re) / scale;
        assert!((u00 - -0.4151721005).abs() < 1e-5, "U(0,0) = {u00}");
        // The transverse invariant offset is the O(ε^{4/7}) correction.
        let off = pair.r_plus[0].re - frame.cp.r_plus0.re;
        assert!(off.abs() < 0.1f64.powf(4.0 / 7.0), "r₊ offset {off}");
    }

    #[test]
    fn p1_xi_purely_imaginary_for_symmetric_data_at_t0() {
        // ψ = 0 for symmetric data, so at t = t₀ the argument ξ is
        // purely imaginary along the x-axis.
        let frame = LocalFrame::new(&CubicFocSech { a0: 1.0 }, 0.05).unwrap();
        for &x in &[-0.3, -0.05, 0.02, 0.4] {
            let xi = p1_xi(&frame, frame.cp.x0 + x, frame.cp.t0).unwrap();
            assert!(xi.re.abs() < 1e-12 * xi.norm().max(1.0), "xi = {xi}");
        }
    }

    #[test]
    fn p1_nonlocal_eta_zero_matches_cubic() {
        let cub = LocalFrame::new(&CubicFocSech { a0: 1.0 }, 0.1).unwrap();
        let non = LocalFrame::new(&NonlocalFocSech { eta: 0.0 }, 0.1).unwrap();
        let xs: Vec<f64> = (-5..=5).map(|j| j as f64 * 0.05).collect();
        let t = cub.cp.t0 - 0.02;
        let a = p1_approx(&cub, &xs, t).unwrap();
        let b = p1_approx(&non, &xs, t).unwrap();
        for j in 0..xs.len() {
            assert!((a.u[j] - b.u[j]).abs() < 1e-10);
            assert!((a.v[j] - b.v[j]).abs() < 1e-10);
        }
    }

    #[test]
    fn p1_conjugation_symmetry() {
        // The conjugated ("minus") version of the formula —
        // conj(P)·Ω(conj(ξ)) — must give the conjugate increment, so
        // the reconstructed fields are real.
        let frame = LocalFrame::new(&QuinticFocDark, 0.1).unwrap();
        let (k, p, scale_u) = p1_factors(&frame).unwrap();
        let t = frame.cp.t0 - 0.01;
        // A point with |ξ| large enough for the asymptotic series.
        let x = frame.cp.x0 + 14.0 / k.norm();
        let xi = p1_xi(&frame, x, t).unwrap();
        let inc = p1_approx(&frame, &[x], t).unwrap();
        let delta = C::new(inc.v[0], inc.u[0] / scale_u);
        let (omega_c, _) = crate::painleve::p1_series(xi.conj(), 40).unwrap();
        let delta_minus = p.conj() * omega_c;
        assert!(
            (delta_minus - delta.conj()).norm() < 1e-8 * delta.norm(),
            "{delta_minus} vs {}",
            delta.conj()
        );
    }

    #[test]
    fn p1_limits_to_semiclassical_in_annulus() {
        // In the annulus where |ξ| is large but the local expansion
        // still applies, the increment must follow the semiclassical
        // solution (elliptic hodograph square-root normal form).
        let case = CubicFocSech { a0: 1.0 };
        let frame = LocalFrame::new(&case, 1e-3).unwrap();
        let xs: Vec<f64> = vec![frame.cp.x0 + 0.06, frame.cp.x0 + 0.12];
        let inc = p1_approx(&frame, &xs, frame.cp.t0).unwrap();
        let semi = eval_semiclassical(&case, &xs, frame.cp.t0).unwrap();
        let mut rel = Vec::new();
        for j in 0..xs.len() {
            let du_ref = semi.u[j] - frame.cp.u0;
            let dv_ref = semi.v[j] - frame.cp.v0;
            let scale = (du_ref * du_ref + dv_ref * dv_ref).sqrt();
            let err = ((inc.u[j] - du_ref).powi(2) + (inc.v[j] - dv_ref).powi(2)).sqrt();
            // The residual is the next order of the local expansion,
            // O(|x−x₀|^{1/2}) relative.
            assert!(err < 0.3 * scale, "x offset {j}: err {err} vs scale {scale}");
            rel.push(err / scale);
        }
        assert!(rel[0] < rel[1], "no improvement toward the centre: {rel:?}");
    }

    #[test]
    fn matching_zone_identical_inputs_gives_empty_painleve_zone() {
        let xs: Vec<f64> = (0..21).map(|j| -1.0 + 0.1 * j as f64).collect();
        let f = MadelungState {
            u: xs.iter().map(|x| x.cos()).collect(),
            v: vec![0.0; xs.len()],
        };
        let pain = MadelungState {
            u: xs.iter().map(|x| x.cos() + 0.2).collect(),
            v: vec![0.0; xs.len()],
        };
        let rep = matching_zone(&xs, &f, &f, &pain, (-1.0, 1.0)).unwrap();
        assert!(rep.crossover.is_none());
        assert_eq!(rep.sup_diff_semiclassical, 0.0);
    }

    #[test]
    fn matching_zone_crossover_bounds() {
        let xs: Vec<f64> = (0..201).map(|j| -1.0 + 0.01 * j as f64).collect();
        let zero = vec![0.0; xs.len()];
        let nls = MadelungState {
            u: zero.clone(),
            v: zero.clone(),
        };
        let semi = MadelungState {
            u: xs.clone(),
            v: zero.clone(),
        };
        let pain = MadelungState {
            u: vec![0.3; xs.len()],
            v: zero,
        };
        let rep = matching_zone(&xs, &nls, &semi, &pain, (-1.0, 1.0)).unwrap();
        // The Painlevé error 0.3 beats |x| exactly for |x| > 0.3.
        let (xl, xr) = rep.crossover.unwrap();
        assert!((xl - -1.0).abs() < 1e-12 && (xr - 1.0).abs() < 1e-12);
        assert_eq!(rep.sign_changes, 2);
        assert!((rep.sup_diff_semiclassical - 1.0).abs() < 1e-12);
        assert!((rep.sup_diff_painleve - 0.3).abs() < 1e-12);
    }
}
