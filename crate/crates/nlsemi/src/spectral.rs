//! Periodic grids, Fourier spectral differentiation, filtering and the
//! conserved functionals used to monitor evolution accuracy.

use std::cell::RefCell;
use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::model::NlsModel;
use crate::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Forward DFT, normalized so that coefficients are O(field amplitude).
pub(crate) fn fft_forward(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf = values.to_vec();
    PLANNER.with(|p| {
        let fft = p.borrow_mut().plan_fft_forward(n);
        fft.process(&mut buf);
    });
    let scale = 1.0 / n as f64;
    for c in &mut buf {
        *c *= scale;
    }
    buf
}

/// Inverse of [`fft_forward`].
pub(crate) fn fft_inverse(coefficients: &[Complex64]) -> Vec<Complex64> {
    let n = coefficients.len();
    let mut buf = coefficients.to_vec();
    PLANNER.with(|p| {
        let fft = p.borrow_mut().plan_fft_inverse(n);
        fft.process(&mut buf);
    });
    buf
}

/// Uniform periodic grid on [−length/2, length/2).
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicGrid {
    pub n_modes: usize,
    pub length: f64,
    /// Equispaced nodes x_j = −length/2 + j·length/n_modes.
    pub nodes: Vec<f64>,
    /// Wavenumbers 2π m / length in FFT layout (m = 0..n/2−1, −n/2..−1).
    pub wavenumbers: Vec<f64>,
}

/// Build a periodic grid; `n_modes` must be a power of two ≥ 8.
pub fn make_grid(n_modes: usize, length: f64) -> Result<PeriodicGrid> {
    if n_modes < 8 || !n_modes.is_power_of_two() {
        return Err(Error::BadGridSize(n_modes));
    }
    if !(length > 0.0) {
        return Err(Error::BadLength(length));
    }
    let h = length / n_modes as f64;
    let nodes = (0..n_modes).map(|j| -0.5 * length + j as f64 * h).collect();
    let k0 = 2.0 * std::f64::consts::PI / length;
    let half = n_modes / 2;
    let wavenumbers = (0..n_modes)
        .map(|m| {
            let m_signed = if m < half { m as i64 } else { m as i64 - n_modes as i64 };
            k0 * m_signed as f64
        })
        .collect();
    Ok(PeriodicGrid { n_modes, length, nodes, wavenumbers })
}

/// Complex periodic field with physical samples and matching Fourier
/// coefficients.
#[derive(Debug, Clone)]
pub struct WaveField {
    pub grid: Arc<PeriodicGrid>,
    pub values: Vec<Complex64>,
    pub coefficients: Vec<Complex64>,
}

impl WaveField {
    pub fn from_values(grid: Arc<PeriodicGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_modes {
            return Err(Error::InvalidParameter(format!(
                "field has {} samples but grid has {} nodes",
                values.len(),
                grid.n_modes
            )));
        }
        let coefficients = fft_forward(&values);
        Ok(WaveField { grid, values, coefficients })
    }

    pub fn from_coefficients(grid: Arc<PeriodicGrid>, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != grid.n_modes {
            return Err(Error::InvalidParameter(format!(
                "field has {} coefficients but grid has {} nodes",
                coefficients.len(),
                grid.n_modes
            )));
        }
        let values = fft_inverse(&coefficients);
        Ok(WaveField { grid, values, coefficients })
    }

    /// Sample a scalar function of x on the grid.
    pub fn from_fn(grid: Arc<PeriodicGrid>, f: impl Fn(f64) -> Complex64) -> Self {
        let values: Vec<Complex64> = grid.nodes.iter().map(|&x| f(x)).collect();
        let coefficients = fft_forward(&values);
        WaveField { grid, values, coefficients }
    }

    pub fn zero(grid: Arc<PeriodicGrid>) -> Self {
        let n = grid.n_modes;
        WaveField {
            grid,
            values: vec![Complex64::new(0.0, 0.0); n],
            coefficients: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// Max modulus over the trailing 10% of coefficients (both ends of the
    /// symmetric spectrum), relative to the max coefficient modulus.
    /// Values below 1e−5 indicate the field is resolved.
    pub fn resolution_diagnostic(&self) -> f64 {
        let n = self.grid.n_modes;
        let max_all = self
            .coefficients
            .iter()
            .map(|c| c.norm())
            .fold(0.0_f64, f64::max);
        if max_all == 0.0 {
            return 0.0;
        }
        // Highest |k| lives in the middle of the FFT-ordered spectrum.
        let band = n / 20;
        let half = n / 2;
        let tail_max = (half - band..half + band)
            .map(|m| self.coefficients[m].norm())
            .fold(0.0_f64, f64::max);
        tail_max / max_all
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0_f64, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// Differentiate by multiplying coefficients with (i·k)^order.
pub fn spectral_derivative(f: &WaveField, order: u32) -> WaveField {
    let coefficients: Vec<Complex64> = f
        .coefficients
        .iter()
        .zip(&f.grid.wavenumbers)
        .map(|(c, &k)| c * Complex64::new(0.0, k).powu(order))
        .collect();
    let values = fft_inverse(&coefficients);
    WaveField { grid: f.grid.clone(), values, coefficients }
}

/// Zero all Fourier coefficients with modulus below `threshold`.
pub fn krasny_filter(f: &WaveField, threshold: f64) -> Result<WaveField> {
    if threshold < 0.0 {
        return Err(Error::NegativeThreshold(threshold));
    }
    let coefficients: Vec<Complex64> = f
        .coefficients
        .iter()
        .map(|c| if c.norm() < threshold { Complex64::new(0.0, 0.0) } else { *c })
        .collect();
    let values = fft_inverse(&coefficients);
    Ok(WaveField { grid: f.grid.clone(), values, coefficients })
}

/// In-place Krasny filter on a raw coefficient buffer (hot path for the
/// time stepper).
pub(crate) fn krasny_filter_inplace(coefficients: &mut [Complex64], threshold: f64) {
    for c in coefficients.iter_mut() {
        if c.norm() < threshold {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}

/// Rectangle-rule quadrature of real samples over the periodic domain
/// (spectrally exact for resolved fields).
pub fn quadrature(grid: &PeriodicGrid, samples: impl Iterator<Item = f64>) -> f64 {
    let h = grid.length / grid.n_modes as f64;
    samples.sum::<f64>() * h
}

/// Energy E = ∫ (ε²/2)|ψ_x|² − ρ/(s(s+1)) |ψ|^{2s+2} dx with ρ = +1
/// focusing, −1 defocusing.
pub fn nls_energy(psi: &WaveField, model: &NlsModel) -> f64 {
    let psi_x = spectral_derivative(psi, 1);
    let eps2 = model.epsilon * model.epsilon;
    let rho = model.sign.rho();
    let s = model.power_s as f64;
    let pref = rho / (s * (s + 1.0));
    let integrand = psi
        .values
        .iter()
        .zip(&psi_x.values)
        .map(|(p, px)| {
            let u = p.norm_sqr();
            0.5 * eps2 * px.norm_sqr() - pref * u.powi(model.power_s as i32 + 1)
        });
    quadrature(&psi.grid, integrand)
}

/// Mass ∫|ψ|² dx.
pub fn mass(psi: &WaveField) -> f64 {
    quadrature(&psi.grid, psi.values.iter().map(|p| p.norm_sqr()))
}

/// Tab-separated snapshot: one row per node with x, Re ψ, Im ψ at 17
/// significant digits.
pub fn snapshot_table(psi: &WaveField) -> String {
    let mut out = String::with_capacity(psi.values.len() * 64);
    out.push_str("x\tre_psi\tim_psi\n");
    for (x, v) in psi.grid.nodes.iter().zip(&psi.values) {
        let _ = writeln!(out, "{:.16e}\t{:.16e}\t{:.16e}", x, v.re, v.im);
    }
    out
}

pub fn write_snapshot(psi: &WaveField, path: &std::path::Path) -> Result<()> {
    std::fs::write(path, snapshot_table(psi))?;
    Ok(())
}
