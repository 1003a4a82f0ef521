//! Model descriptor for the semiclassically scaled NLS family.

use serde::{Deserialize, Serialize};

/// Focusing (`+V`) or defocusing (`−V`) nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Focusing,
    Defocusing,
}

impl Sign {
    /// ρ = +1 focusing, −1 defocusing; the sign multiplying V(|ψ|²)ψ.
    pub fn rho(self) -> f64 {
        match self {
            Sign::Focusing => 1.0,
            Sign::Defocusing => -1.0,
        }
    }
}

/// Nonlinearity descriptor for
/// `i ε ψ_t + (ε²/2) ψ_xx + ρ θ ψ = 0` with
/// `θ = V(|ψ|²) = |ψ|^{2s}/s` locally, or, when `eta > 0`,
/// `θ − ε² η θ_xx = |ψ|²` (nonlocal cubic variant, s must be 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NlsModel {
    /// Power of the nonlinearity: 1 = cubic, 2 = quintic.
    pub power_s: u32,
    pub sign: Sign,
    /// Nonlocality parameter η ≥ 0; 0 means the local equation.
    pub eta: f64,
    /// Semiclassical (small-dispersion) parameter ε > 0.
    pub epsilon: f64,
}

impl NlsModel {
    pub fn new(power_s: u32, sign: Sign, epsilon: f64) -> Self {
        NlsModel { power_s, sign, eta: 0.0, epsilon }
    }

    pub fn cubic(sign: Sign, epsilon: f64) -> Self {
        Self::new(1, sign, epsilon)
    }

    pub fn quintic(sign: Sign, epsilon: f64) -> Self {
        Self::new(2, sign, epsilon)
    }

    pub fn nonlocal(sign: Sign, eta: f64, epsilon: f64) -> Self {
        NlsModel { power_s: 1, sign, eta, epsilon }
    }

    /// V(u) = u^s / s.
    pub fn potential(&self, u: f64) -> f64 {
        u.powi(self.power_s as i32) / self.power_s as f64
    }

    /// V'(u) = u^{s-1}.
    pub fn potential_prime(&self, u: f64) -> f64 {
        u.powi(self.power_s as i32 - 1)
    }

    /// V''(u) = (s−1) u^{s−2}.
    pub fn potential_second(&self, u: f64) -> f64 {
        let s = self.power_s as f64;
        if self.power_s == 1 {
            0.0
        } else {
            (s - 1.0) * u.powi(self.power_s as i32 - 2)
        }
    }

    /// True when the nonlocal smoothing length scale ε²η is no longer
    /// small compared to 1 and the nonlocal model leaves its intended
    /// regime.
    pub fn nonlocal_regime_warning(&self) -> bool {
        self.eta * self.epsilon * self.epsilon > 0.1
    }
}
