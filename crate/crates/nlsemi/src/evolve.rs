//! Stiff pseudospectral time integration of the semiclassical NLS family.
//!
//! The equation iεψ_t + (ε²/2)ψ_xx ± V(|ψ|²)ψ = 0 is advanced in Fourier
//! space as v̂_t = L v̂ + N̂(v) with the diagonal linear symbol
//! L_k = −iεk²/2.  Two schemes are provided:
//!
//! * a composite Runge–Kutta scheme: classical RK4 on the low-wavenumber
//!   modes (where |L_k|·dt is moderate) combined with a linearly implicit,
//!   A-stable, stiffly accurate third-order DIRK on the stiff
//!   high-wavenumber modes, sharing the RK4 stage abscissae and weights;
//! * an additive IMEX Runge–Kutta fallback (a 4-stage, third-order
//!   L-stable pair) treating all of L implicitly.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::model::NlsModel;
use crate::spectral::{krasny_filter_inplace, mass, nls_energy, PeriodicGrid, WaveField};
use crate::{Error, Result};

/// Time-stepping scheme selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    CompositeRk,
    Imex,
}

/// Stepper parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepperConfig {
    pub n_steps: usize,
    pub scheme: Scheme,
    /// Fraction of the maximal wavenumber below which modes are treated
    /// explicitly by the composite scheme.  `None` selects the largest
    /// fraction with |L_k|·dt ≤ 1 in the explicit region.
    pub cutoff_fraction: Option<f64>,
    pub krasny_threshold: f64,
    pub amplitude_cap: f64,
}

impl Default for StepperConfig {
    fn default() -> Self {
        StepperConfig {
            n_steps: 10_000,
            scheme: Scheme::CompositeRk,
            cutoff_fraction: None,
            krasny_threshold: 1e-12,
            amplitude_cap: 1e12,
        }
    }
}

impl StepperConfig {
    fn validate(&self) -> Result<()> {
        if self.n_steps == 0 {
            return Err(Error::InvalidParameter("n_steps must be ≥ 1".into()));
        }
        if let Some(f) = self.cutoff_fraction {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "cutoff_fraction must lie in (0,1], got {f}"
                )));
            }
        }
        if self.krasny_threshold < 0.0 {
            return Err(Error::NegativeThreshold(self.krasny_threshold));
        }
        Ok(())
    }
}

/// Record of an evolution run.
#[derive(Debug)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub snapshots: Vec<WaveField>,
    /// Relative energy drift |E(t)−E(0)|/|E(0)| per snapshot.
    pub delta_e: Vec<f64>,
    /// Relative mass drift per snapshot.
    pub delta_mass: Vec<f64>,
    pub blowup_time: Option<f64>,
    pub terminated_early: bool,
    /// True when ΔE exceeded the 10⁻⁶ accuracy gate at any snapshot.
    pub energy_gate_violated: bool,
}

/// Returns the last time with finite, bounded field values before a
/// detected blow-up, or `None` for a completed run.
pub fn detect_blowup(trace: &EvolutionTrace) -> Option<f64> {
    trace.blowup_time
}

/// Per-mode linear symbol −iεk²/2 (the Fourier symbol of (iε/2)∂ₓₓ).
pub fn linear_symbol(model: &NlsModel, grid: &PeriodicGrid) -> Vec<Complex64> {
    grid.wavenumbers
        .iter()
        .map(|&k| Complex64::new(0.0, -0.5 * model.epsilon * k * k))
        .collect()
}

/// Spectral solve of θ − ε²η θ_xx = u: θ̂_k = û_k/(1 + ε²ηk²).
pub fn solve_nonlocal_theta(u: &WaveField, model: &NlsModel) -> WaveField {
    let e2eta = model.epsilon * model.epsilon * model.eta;
    let coefficients: Vec<Complex64> = u
        .coefficients
        .iter()
        .zip(&u.grid.wavenumbers)
        .map(|(c, &k)| c / (1.0 + e2eta * k * k))
        .collect();
    WaveField::from_coefficients(u.grid.clone(), coefficients).expect("same grid size")
}

/// Shared FFT plans and scratch for the hot loop.
struct Workspace {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    phys: Vec<Complex64>,
    theta_buf: Vec<Complex64>,
    n: usize,
}

impl Workspace {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let scratch_len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        Workspace {
            fwd,
            inv,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            phys: vec![Complex64::new(0.0, 0.0); n],
            theta_buf: vec![Complex64::new(0.0, 0.0); n],
            n,
        }
    }

    fn to_physical(&mut self, coeffs: &[Complex64], out: &mut [Complex64]) {
        out.copy_from_slice(coeffs);
        self.inv.process_with_scratch(out, &mut self.scratch);
    }

    fn to_spectral_inplace(&mut self, buf: &mut [Complex64]) {
        self.fwd.process_with_scratch(buf, &mut self.scratch);
        let s = 1.0 / self.n as f64;
        for c in buf.iter_mut() {
            *c *= s;
        }
    }
}

/// Context owning everything needed to evaluate the nonlinear term and to
/// advance one step.
struct Stepper {
    model: NlsModel,
    symbol: Vec<Complex64>,
    /// Symbol restricted to the explicit (slow) modes, zero elsewhere.
    l_slow: Vec<Complex64>,
    /// Symbol restricted to the implicit (fast) modes, zero elsewhere.
    l_fast: Vec<Complex64>,
    wavenumbers: Vec<f64>,
    ws: Workspace,
    cfg: StepperConfig,
    dt: f64,
}

impl Stepper {
    fn new(grid: &PeriodicGrid, model: &NlsModel, cfg: &StepperConfig, dt: f64) -> Self {
        let symbol = linear_symbol(model, grid);
        let k_max = grid.wavenumbers.iter().fold(0.0_f64, |m, &k| m.max(k.abs()));
        let fraction = cfg.cutoff_fraction.unwrap_or_else(|| {
            if dt <= 0.0 {
                return 1.0;
            }
            // Explicit region must satisfy |L_k|·dt = (εk²/2)·dt ≤ 1.
            let k_cut = (2.0 / (model.epsilon * dt)).sqrt();
            (k_cut / k_max).clamp(1.0 / 64.0, 1.0)
        });
        let k_cut = fraction * k_max;
        let mut l_slow = symbol.clone();
        let mut l_fast = symbol.clone();
        for (i, &k) in grid.wavenumbers.iter().enumerate() {
            if k.abs() <= k_cut {
                l_fast[i] = Complex64::new(0.0, 0.0);
            } else {
                l_slow[i] = Complex64::new(0.0, 0.0);
            }
        }
        Stepper {
            model: *model,
            symbol,
            l_slow,
            l_fast,
            wavenumbers: grid.wavenumbers.clone(),
            ws: Workspace::new(grid.n_modes),
            cfg: cfg.clone(),
            dt,
        }
    }

    /// Nonlinear term in spectral space: N̂ of (i/ε)ρ θ ψ with θ either
    /// V(|ψ|²) or the nonlocal Helmholtz solve.
    fn nonlinear(&mut self, coeffs: &[Complex64], out: &mut Vec<Complex64>) {
        let n = self.ws.n;
        out.resize(n, Complex64::new(0.0, 0.0));
        // ψ in physical space.
        let mut phys = std::mem::take(&mut self.ws.phys);
        self.ws.to_physical(coeffs, &mut phys);
        let rho = self.model.sign.rho();
        let pref = Complex64::new(0.0, rho / self.model.epsilon);
        if self.model.eta == 0.0 {
            for (o, p) in out.iter_mut().zip(&phys) {
                let theta = self.model.potential(p.norm_sqr());
                *o = pref * theta * p;
            }
        } else {
            // θ − ε²η θ_xx = |ψ|², solved spectrally.
            let mut theta = std::mem::take(&mut self.ws.theta_buf);
            for (t, p) in theta.iter_mut().zip(&phys) {
                *t = Complex64::new(p.norm_sqr(), 0.0);
            }
            self.ws.to_spectral_inplace(&mut theta);
            let e2eta = self.model.epsilon * self.model.epsilon * self.model.eta;
            for (t, &k) in theta.iter_mut().zip(&self.wavenumbers) {
                *t /= 1.0 + e2eta * k * k;
            }
            // Back to physical space (unnormalized inverse of normalized
            // coefficients reproduces samples).
            self.ws.inv.process_with_scratch(&mut theta, &mut self.ws.scratch);
            for ((o, p), t) in out.iter_mut().zip(&phys).zip(&theta) {
                *o = pref * t.re * p;
            }
            self.ws.theta_buf = theta;
        }
        self.ws.phys = phys;
        self.ws.to_spectral_inplace(out);
    }

    /// Explicit right-hand side g(v̂) = L_slow v̂ + N̂(v̂) used by the
    /// composite scheme.
    fn g_rhs(&mut self, coeffs: &[Complex64], out: &mut Vec<Complex64>) {
        self.nonlinear(coeffs, out);
        for (o, (c, l)) in out.iter_mut().zip(coeffs.iter().zip(&self.l_slow)) {
            *o += l * c;
        }
    }

    fn step(&mut self, u: &mut Vec<Complex64>) {
        match self.cfg.scheme {
            Scheme::CompositeRk => self.step_composite(u),
            Scheme::Imex => self.step_imex(u),
        }
        if self.cfg.krasny_threshold > 0.0 {
            krasny_filter_inplace(u, self.cfg.krasny_threshold);
        }
    }

    /// Composite step: classical RK4 (weights b = [1/6,1/3,1/3,1/6]) on
    /// g = L_slow v + N(v), with the stiff part L_fast advanced by the
    /// diagonally implicit tableau
    ///   a_I = [0; 0,1/2; 1/2,−1/2,1/2; 1/6,1/3,1/3,1/6]
    /// sharing the same abscissae and weights (stiffly accurate, A-stable,
    /// order 3 on the stiff part, order 4 when L_fast = 0).
    fn step_composite(&mut self, u: &mut Vec<Complex64>) {
        let h = self.dt;
        let n = u.len();
        let zero = Complex64::new(0.0, 0.0);

        let mut g1 = Vec::new();
        let mut g2 = Vec::new();
        let mut g3 = Vec::new();
        let mut g4 = Vec::new();
        let mut y = vec![zero; n];

        // Stage 1: Y1 = u.
        self.g_rhs(u, &mut g1);
        let lf_y1: Vec<Complex64> = u.iter().zip(&self.l_fast).map(|(c, l)| l * c).collect();

        // Stage 2: Y2 = (u + h(g1/2)) / (1 − h L_f/2).
        for i in 0..n {
            let rhs = u[i] + h * 0.5 * g1[i];
            y[i] = rhs / (Complex64::new(1.0, 0.0) - h * 0.5 * self.l_fast[i]);
        }
        self.g_rhs(&y, &mut g2);
        let lf_y2: Vec<Complex64> = y.iter().zip(&self.l_fast).map(|(c, l)| l * c).collect();

        // Stage 3: Y3 = (u + h(g2/2 + L_f Y1/2 − L_f Y2/2)) / (1 − h L_f/2).
        for i in 0..n {
            let rhs = u[i] + h * (0.5 * g2[i] + 0.5 * lf_y1[i] - 0.5 * lf_y2[i]);
            y[i] = rhs / (Complex64::new(1.0, 0.0) - h * 0.5 * self.l_fast[i]);
        }
        self.g_rhs(&y, &mut g3);
        let lf_y3: Vec<Complex64> = y.iter().zip(&self.l_fast).map(|(c, l)| l * c).collect();

        // Stage 4: Y4 = (u + h(g3 + L_f Y1/6 + L_f Y2/3 + L_f Y3/3)) / (1 − h L_f/6).
        for i in 0..n {
            let rhs = u[i]
                + h * (g3[i]
                    + lf_y1[i] / 6.0
                    + lf_y2[i] / 3.0
                    + lf_y3[i] / 3.0);
            y[i] = rhs / (Complex64::new(1.0, 0.0) - h / 6.0 * self.l_fast[i]);
        }
        self.g_rhs(&y, &mut g4);
        let lf_y4: Vec<Complex64> = y.iter().zip(&self.l_fast).map(|(c, l)| l * c).collect();

        for i in 0..n {
            u[i] += h
                * ((g1[i] + lf_y1[i]) / 6.0
                    + (g2[i] + lf_y2[i]) / 3.0
                    + (g3[i] + lf_y3[i]) / 3.0
                    + (g4[i] + lf_y4[i]) / 6.0);
        }
    }

    /// Additive IMEX step (4 implicit stages, order 3, L-stable implicit
    /// part with diagonal 1/2), treating all of L implicitly and N
    /// explicitly.
    fn step_imex(&mut self, u: &mut Vec<Complex64>) {
        let h = self.dt;
        let n = u.len();
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);

        // Explicit tableau (5 abscissae, first stage is u itself).
        // a_E rows: [1/2], [11/18, 1/18], [5/6, −5/6, 1/2], [1/4, 7/4, 3/4, −7/4].
        // Implicit tableau rows (excluding the zero first column):
        // [1/2], [1/6, 1/2], [−1/2, 1/2, 1/2], [3/2, −3/2, 1/2, 1/2].
        // b_E = [1/4, 7/4, 3/4, −7/4, 0]; b_I = [0, 3/2, −3/2, 1/2, 1/2].
        let mut nl = vec![Vec::new(), Vec::new(), Vec::new(), Vec::new()];
        let mut ly: Vec<Vec<Complex64>> = Vec::with_capacity(4);
        let mut y = vec![zero; n];

        self.nonlinear(u, &mut nl[0]);

        // Stage 2.
        for i in 0..n {
            let rhs = u[i] + h * 0.5 * nl[0][i];
            y[i] = rhs / (one - h * 0.5 * self.symbol[i]);
        }
        self.nonlinear(&y, &mut nl[1]);
        ly.push(y.iter().zip(&self.symbol).map(|(c, l)| l * c).collect());

        // Stage 3.
        for i in 0..n {
            let rhs = u[i]
                + h * ((11.0 / 18.0) * nl[0][i] + (1.0 / 18.0) * nl[1][i]
                    + (1.0 / 6.0) * ly[0][i]);
            y[i] = rhs / (one - h * 0.5 * self.symbol[i]);
        }
        self.nonlinear(&y, &mut nl[2]);
        ly.push(y.iter().zip(&self.symbol).map(|(c, l)| l * c).collect());

        // Stage 4.
        for i in 0..n {
            let rhs = u[i]
                + h * ((5.0 / 6.0) * nl[0][i] - (5.0 / 6.0) * nl[1][i] + 0.5 * nl[2][i]
                    - 0.5 * ly[0][i]
                    + 0.5 * ly[1][i]);
            y[i] = rhs / (one - h * 0.5 * self.symbol[i]);
        }
        self.nonlinear(&y, &mut nl[3]);
        ly.push(y.iter().zip(&self.symbol).map(|(c, l)| l * c).collect());

        // Stage 5.
        for i in 0..n {
            let rhs = u[i]
                + h * (0.25 * nl[0][i] + 1.75 * nl[1][i] + 0.75 * nl[2][i] - 1.75 * nl[3][i]
                    + 1.5 * ly[0][i]
                    - 1.5 * ly[1][i]
                    + 0.5 * ly[2][i]);
            y[i] = rhs / (one - h * 0.5 * self.symbol[i]);
        }
        ly.push(y.iter().zip(&self.symbol).map(|(c, l)| l * c).collect());

        for i in 0..n {
            u[i] += h
                * (0.25 * nl[0][i] + 1.75 * nl[1][i] + 0.75 * nl[2][i] - 1.75 * nl[3][i]
                    + 1.5 * ly[0][i]
                    - 1.5 * ly[1][i]
                    + 0.5 * ly[2][i]
                    + 0.5 * ly[3][i]);
        }
    }
}

/// Advance one step (exposed for convergence tests).
pub fn composite_rk_step(
    psi: &WaveField,
    model: &NlsModel,
    dt: f64,
    cfg: &StepperConfig,
) -> Result<WaveField> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    cfg.validate()?;
    let mut stepper = Stepper::new(&psi.grid, model, cfg, dt);
    let mut u = psi.coefficients.clone();
    stepper.step(&mut u);
    WaveField::from_coefficients(psi.grid.clone(), u)
}

/// Evolve `psi0` to `t_end`, recording snapshots at the nearest completed
/// step to each requested time.
pub fn evolve(
    psi0: &WaveField,
    model: &NlsModel,
    t_end: f64,
    cfg: &StepperConfig,
    snapshot_times: &[f64],
) -> Result<EvolutionTrace> {
    cfg.validate()?;
    if t_end < 0.0 {
        return Err(Error::InvalidParameter(format!("t_end must be ≥ 0, got {t_end}")));
    }
    for &t in snapshot_times {
        if t < 0.0 || t > t_end + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "snapshot time {t} outside [0, {t_end}]"
            )));
        }
    }

    let e0 = nls_energy(psi0, model);
    let m0 = mass(psi0);

    let mut trace = EvolutionTrace {
        times: Vec::new(),
        snapshots: Vec::new(),
        delta_e: Vec::new(),
        delta_mass: Vec::new(),
        blowup_time: None,
        terminated_early: false,
        energy_gate_violated: false,
    };

    let record = |trace: &mut EvolutionTrace, t: f64, field: &WaveField| {
        let e = nls_energy(field, model);
        let m = mass(field);
        let de = if e0 != 0.0 { ((e - e0) / e0).abs() } else { (e - e0).abs() };
        let dm = if m0 != 0.0 { ((m - m0) / m0).abs() } else { (m - m0).abs() };
        if de > 1e-6 {
            trace.energy_gate_violated = true;
        }
        trace.times.push(t);
        trace.snapshots.push(field.clone());
        trace.delta_e.push(de);
        trace.delta_mass.push(dm);
    };

    if t_end == 0.0 {
        record(&mut trace, 0.0, psi0);
        return Ok(trace);
    }

    let dt = t_end / cfg.n_steps as f64;
    // Map each requested time to its nearest step index.
    let mut wanted: Vec<(usize, f64)> = snapshot_times
        .iter()
        .map(|&t| (((t / dt).round() as usize).min(cfg.n_steps), t))
        .collect();
    wanted.sort_by(|a, b| a.0.cmp(&b.0));
    let mut wanted_iter = wanted.into_iter().peekable();

    let mut stepper = Stepper::new(&psi0.grid, model, cfg, dt);
    let mut u = psi0.coefficients.clone();

    // Snapshots requested at step 0.
    while wanted_iter.peek().is_some_and(|&(s, _)| s == 0) {
        wanted_iter.next();
        record(&mut trace, 0.0, psi0);
    }

    for step in 1..=cfg.n_steps {
        stepper.step(&mut u);
        let finite = u.iter().all(|c| c.re.is_finite() && c.im.is_finite());
        let amp_ok = finite && {
            // Amplitude bound from coefficients: sup|ψ| ≤ Σ|û_k|; exact
            // check only when the cheap bound is exceeded.
            let bound: f64 = u.iter().map(|c| c.norm()).sum();
            if bound <= stepper.cfg.amplitude_cap {
                true
            } else {
                let field = WaveField::from_coefficients(psi0.grid.clone(), u.clone())?;
                field.max_abs() <= stepper.cfg.amplitude_cap
            }
        };
        if !finite || !amp_ok {
            trace.blowup_time = Some((step - 1) as f64 * dt);
            trace.terminated_early = true;
            return Ok(trace);
        }
        let mut field: Option<WaveField> = None;
        while wanted_iter.peek().is_some_and(|&(s, _)| s == step) {
            wanted_iter.next();
            if field.is_none() {
                field = Some(WaveField::from_coefficients(psi0.grid.clone(), u.clone())?);
            }
            record(&mut trace, step as f64 * dt, field.as_ref().unwrap());
        }
    }
    Ok(trace)
}
