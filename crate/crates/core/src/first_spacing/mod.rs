//! The first spacing problem: the mean value
//!
//! ```text
//! G_q = ‖ Σ_{k∼K} Σ_{l∼L} a_{kl} e(l x₁ + kl x₂ + l√k x₃) ‖_{L^q_#(|x₁|≤1, |x₂|≤1, |x₃|≤1/(ηL√K))}
//! ```
//!
//! its quadrature, the Diophantine system that `G_4⁴` counts, the cone
//! parametrisation of the frequencies, plates, and the chain of bounds
//! leading to the upper estimate for `G_q`.
//!
//! `k ∼ K` means `k ∈ [K, 2K)` throughout, and likewise for `l`.

pub mod bounds;
pub mod cone;
pub mod quadrature;
pub mod system;

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::{Error, Result};

pub use bounds::{betas_solve, decoupling_d, e4_bound, gq_upper_bound, Betas, Bound, Decoupling};
pub use cone::{cone_map, plate_partition, ConePoint, Plate};
pub use quadrature::{gq_norm, gq_norm_converged, Convergence, Resolution};
pub use system::{count_system_star, count_unlocalized, SystemStarSpec};

/// Relative slack for the parameter inequalities, which are often equalities
/// (`η = 1/K`).
const ORDER_SLACK: f64 = 1e-12;

/// Which exponent bounds which diameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BetaConvention {
    /// `diam(k) ≤ η^{β₁}K`, `diam(l) ≤ η^{β₂}L`.
    #[default]
    Normative,
    /// `diam(k) ≤ η^{β₂}K`, `diam(l) ≤ η^{β₁}L`.
    Swapped,
}

impl BetaConvention {
    /// `(β_k, β_l)`: the exponents applied to the `k` and `l` diameters.
    pub fn split(&self, beta1: f64, beta2: f64) -> (f64, f64) {
        match self {
            BetaConvention::Normative => (beta1, beta2),
            BetaConvention::Swapped => (beta2, beta1),
        }
    }
}

/// `K`, `L`, `η`, `q` with `1 ≤ L < K ≤ 1/η ≤ KL` and `4 ≤ q ≤ 4.5`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacingConfig {
    k: u32,
    l: u32,
    eta: f64,
    q: f64,
}

impl SpacingConfig {
    pub fn new(k: u32, l: u32, eta: f64, q: f64) -> Result<Self> {
        let le = |a: f64, b: f64| a <= b * (1.0 + ORDER_SLACK);
        let inv = 1.0 / eta;
        if !(l >= 1 && l < k) {
            return Err(Error::domain("SpacingConfig", alloc::format!("need 1 ≤ L < K, got K={k}, L={l}")));
        }
        if !(eta > 0.0 && le(k as f64, inv) && le(inv, k as f64 * l as f64)) {
            return Err(Error::domain("SpacingConfig", alloc::format!("need K ≤ 1/η ≤ KL, got 1/η = {inv}")));
        }
        if !(4.0..=4.5).contains(&q) {
            return Err(Error::domain("SpacingConfig", alloc::format!("q = {q} is outside [4, 4.5]")));
        }
        Ok(SpacingConfig { k, l, eta, q })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn with_q(&self, q: f64) -> Result<Self> {
        SpacingConfig::new(self.k, self.l, self.eta, q)
    }

    /// Half-width `1/(ηL√K)` of the `x₃` range.
    pub fn x3_half_width(&self) -> f64 {
        1.0 / (self.eta * self.l as f64 * libm::sqrt(self.k as f64))
    }
}

/// Coefficients `a_{kl}`, `k ∈ [K, 2K)`, `l ∈ [L, 2L)`, stored `k`-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientGrid {
    k: u32,
    l: u32,
    values: Vec<Complex64>,
}

impl CoefficientGrid {
    /// Every `|a_{kl}| ≤ 1` (with a rounding allowance of `1e-12`).
    pub fn from_fn(k: u32, l: u32, mut f: impl FnMut(u32, u32) -> Complex64) -> Result<Self> {
        let mut values = Vec::with_capacity(k as usize * l as usize);
        for kk in k..2 * k {
            for ll in l..2 * l {
                let a = f(kk, ll);
                if !(a.norm() <= 1.0 + 1e-12) {
                    return Err(Error::domain("CoefficientGrid", alloc::format!("|a({kk},{ll})| = {} > 1", a.norm())));
                }
                values.push(a);
            }
        }
        Ok(CoefficientGrid { k, l, values })
    }

    pub fn ones(k: u32, l: u32) -> Self {
        CoefficientGrid {
            k,
            l,
            values: alloc::vec![Complex64::new(1.0, 0.0); k as usize * l as usize],
        }
    }

    pub fn zeros(k: u32, l: u32) -> Self {
        CoefficientGrid {
            k,
            l,
            values: alloc::vec![Complex64::new(0.0, 0.0); k as usize * l as usize],
        }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    /// `a_{kl}` for `k ∈ [K, 2K)`, `l ∈ [L, 2L)`.
    pub fn get(&self, k: u32, l: u32) -> Complex64 {
        self.values[((k - self.k) * self.l + (l - self.l)) as usize]
    }

    /// Every coefficient multiplied by `e(φ)`.
    pub fn rotated(&self, phi: f64) -> Self {
        let w = crate::numeric::e(phi);
        CoefficientGrid {
            k: self.k,
            l: self.l,
            values: self.values.iter().map(|a| a * w).collect(),
        }
    }
}
