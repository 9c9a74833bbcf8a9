//! The frequencies `(l, kl, l√k)` rescaled onto the light cone
//! `ξ₁² + ξ₂² = ξ₃²`, and their partition into plates.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::BetaConvention;
use crate::{Error, Result};

/// Image of a grid point `(k, l)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConePoint {
    pub xi1: f64,
    pub xi2: f64,
    pub xi3: f64,
    pub k: u32,
    pub l: u32,
}

impl ConePoint {
    /// `(ξ₃² − ξ₂² − ξ₁²) / ξ₃²`.
    pub fn cone_residual(&self) -> f64 {
        (self.xi3 * self.xi3 - self.xi2 * self.xi2 - self.xi1 * self.xi1) / (self.xi3 * self.xi3)
    }

    /// `(ξ₃ + ξ₂)/(ξ₃ − ξ₂) = k/K`, the circular coordinate.
    pub fn circular(&self) -> f64 {
        (self.xi3 + self.xi2) / (self.xi3 - self.xi2)
    }

    /// `ξ₃ − ξ₂ = l/L`, the null coordinate.
    pub fn null(&self) -> f64 {
        self.xi3 - self.xi2
    }
}

/// `ξ₁ = (l/L)√(k/K)`, `ξ₂ = (l/L)(k/K − 1)/2`, `ξ₃ = (l/L)(k/K + 1)/2`.
///
/// Accepts the closed ranges `k ∈ [K, 2K]`, `l ∈ [L, 2L]`.
pub fn cone_map(k: u32, l: u32, big_k: u32, big_l: u32) -> Result<ConePoint> {
    if big_k == 0 || big_l == 0 || !(big_k..=2 * big_k).contains(&k) || !(big_l..=2 * big_l).contains(&l) {
        return Err(Error::domain("cone_map", alloc::format!("({k}, {l}) is outside [K, 2K] × [L, 2L]")));
    }
    let s = l as f64 / big_l as f64;
    let t = k as f64 / big_k as f64;
    Ok(ConePoint {
        xi1: s * libm::sqrt(t),
        xi2: s * (t - 1.0) / 2.0,
        xi3: s * (t + 1.0) / 2.0,
        k,
        l,
    })
}

/// `ξ₃² − ξ₂² = ξ₁²` in exact rationals, using `ξ₁² = (l/L)²(k/K)`.
pub fn cone_identity_exact(k: u32, l: u32, big_k: u32, big_l: u32) -> bool {
    let r = |n: u32, d: u32| BigRational::new(BigInt::from(n), BigInt::from(d));
    let s = r(l, big_l);
    let t = r(k, big_k);
    let half = r(1, 2);
    let one = r(1, 1);
    let xi1_sq = &s * &s * &t;
    let xi2 = &s * (&t - &one) * &half;
    let xi3 = &s * (&t + &one) * &half;
    &xi3 * &xi3 - &xi2 * &xi2 == xi1_sq
}

/// A plate: its index and the grid points it holds.
#[derive(Debug, Clone, PartialEq)]
pub struct Plate {
    pub index: (u32, u32),
    pub members: Vec<(u32, u32)>,
    /// Smallest rectangle `[k_lo, k_hi] × [l_lo, l_hi]` holding the members.
    pub k_range: (u32, u32),
    pub l_range: (u32, u32),
}

impl Plate {
    /// Number of integers in the `k` and `l` ranges.
    pub fn extents(&self) -> (u32, u32) {
        (self.k_range.1 - self.k_range.0 + 1, self.l_range.1 - self.l_range.0 + 1)
    }
}

/// Constant in the rectangle-size check.
pub const PLATE_RECTANGLE_C: f64 = 4.0;

/// Cut the points into cells of width `η^{β_k}` in the circular coordinate
/// and `η^{β_l}` in the null coordinate (normative convention: `β_k = β₁`,
/// `β_l = β₂`). Plates are returned in index order.
///
/// Refuses when `η^{β_k}K < 1` or `η^{β_l}L < 1`.
pub fn plate_partition(
    points: &[ConePoint],
    big_k: u32,
    big_l: u32,
    eta: f64,
    beta1: f64,
    beta2: f64,
    convention: BetaConvention,
) -> Result<Vec<Plate>> {
    let (bk, bl) = convention.split(beta1, beta2);
    let wk = libm::pow(eta, bk);
    let wl = libm::pow(eta, bl);
    if wk * (big_k as f64) < 1.0 - 1e-12 || wl * (big_l as f64) < 1.0 - 1e-12 {
        return Err(Error::domain(
            "plate_partition",
            alloc::format!(
                "plates thinner than one grid step: η^β·K = {}, η^β·L = {}",
                wk * big_k as f64,
                wl * big_l as f64
            ),
        ));
    }
    let mut keyed: Vec<((u32, u32), (u32, u32))> = points
        .iter()
        .map(|p| {
            let i = libm::floor((p.circular() - 1.0) / wk + 1e-9).max(0.0) as u32;
            let j = libm::floor((p.null() - 1.0) / wl + 1e-9).max(0.0) as u32;
            ((i, j), (p.k, p.l))
        })
        .collect();
    keyed.sort_unstable();
    let mut plates: Vec<Plate> = Vec::new();
    for (index, (k, l)) in keyed {
        match plates.last_mut() {
            Some(p) if p.index == index => {
                p.members.push((k, l));
                p.k_range = (p.k_range.0.min(k), p.k_range.1.max(k));
                p.l_range = (p.l_range.0.min(l), p.l_range.1.max(l));
            }
            _ => plates.push(Plate {
                index,
                members: alloc::vec![(k, l)],
                k_range: (k, k),
                l_range: (l, l),
            }),
        }
    }
    Ok(plates)
}

/// Every plate fits in `C(1 + η^{β_k}K) × C(1 + η^{β_l}L)`.
pub fn plates_fit_rectangles(plates: &[Plate], big_k: u32, big_l: u32, eta: f64, beta1: f64, beta2: f64, convention: BetaConvention) -> bool {
    let (bk, bl) = convention.split(beta1, beta2);
    let max_k = PLATE_RECTANGLE_C * (1.0 + libm::pow(eta, bk) * big_k as f64);
    let max_l = PLATE_RECTANGLE_C * (1.0 + libm::pow(eta, bl) * big_l as f64);
    plates.iter().all(|p| {
        let (ek, el) = p.extents();
        ek as f64 <= max_k && el as f64 <= max_l
    })
}

/// The full grid `[K, 2K) × [L, 2L)` on the cone.
pub fn grid_points(big_k: u32, big_l: u32) -> Vec<ConePoint> {
    let mut out = Vec::with_capacity(big_k as usize * big_l as usize);
    for k in big_k..2 * big_k {
        for l in big_l..2 * big_l {
            out.push(cone_map(k, l, big_k, big_l).expect("grid point in range"));
        }
    }
    out
}
