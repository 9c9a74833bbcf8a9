//! Tensor midpoint rule for `G_q`.
//!
//! All `x₁` and `x₂` frequencies are integers, so those two coordinates are
//! averaged over a single period `[0, 1)`; `x₃` runs over the full
//! `[−1/(ηL√K), 1/(ηL√K)]`. For fixed `(x₂, x₃)` the sum factors as
//! `Σ_l e(l x₁) c_l` with `c_l = Σ_k a_{kl} z_k^l`, `z_k = e(k x₂ + √k x₃)`.

use alloc::vec::Vec;
use core::ops::Range;

use num_complex::Complex64;

use super::{CoefficientGrid, SpacingConfig};
use crate::numeric::e;
use crate::{Error, Result};

/// Sample counts along `x₁`, `x₂`, `x₃`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resolution {
    pub n: [usize; 3],
}

impl Resolution {
    /// Eight samples per period of the fastest frequency on each axis:
    /// `2L` on `x₁`, `4KL` on `x₂`, `2L√(2K)` on `x₃`.
    pub fn floor(cfg: &SpacingConfig) -> Resolution {
        let (k, l) = (cfg.k() as f64, cfg.l() as f64);
        let n3 = 8.0 * 2.0 * l * libm::sqrt(2.0 * k) * 2.0 * cfg.x3_half_width();
        Resolution {
            n: [16 * cfg.l() as usize, 32 * cfg.k() as usize * cfg.l() as usize, libm::ceil(n3 - 1e-9) as usize],
        }
    }

    pub fn doubled(&self) -> Resolution {
        Resolution { n: [2 * self.n[0], 2 * self.n[1], 2 * self.n[2]] }
    }

    pub fn points(&self) -> u64 {
        self.n.iter().map(|&n| n as u64).product()
    }
}

fn check_resolution(cfg: &SpacingConfig, res: &Resolution) -> Result<()> {
    let need = Resolution::floor(cfg);
    for axis in 0..3 {
        if res.n[axis] < need.n[axis] {
            return Err(Error::Resolution { axis: axis + 1, got: res.n[axis], need: need.n[axis] });
        }
    }
    Ok(())
}

fn check_grid(cfg: &SpacingConfig, coeffs: &CoefficientGrid) -> Result<()> {
    if coeffs.k() != cfg.k() || coeffs.l() != cfg.l() {
        return Err(Error::domain("gq_norm", "coefficient grid does not match K, L"));
    }
    Ok(())
}

/// `Σ |f|^q` over the `x₂` sample indices in `slab` (all `x₁`, `x₃`).
pub fn gq_slab_sum(cfg: &SpacingConfig, coeffs: &CoefficientGrid, res: &Resolution, slab: Range<usize>) -> Result<f64> {
    check_grid(cfg, coeffs)?;
    check_resolution(cfg, res)?;
    let (kk, ll) = (cfg.k(), cfg.l());
    let [n1, n2, n3] = res.n;
    let a3 = cfg.x3_half_width();
    let q = cfg.q();
    let roots: Vec<f64> = (kk..2 * kk).map(|k| libm::sqrt(k as f64)).collect();
    // e(l x₁) for every x₁ sample and l
    let mut x1_table = Vec::with_capacity(n1 * ll as usize);
    for i in 0..n1 {
        let x1 = (i as f64 + 0.5) / n1 as f64;
        for l in ll..2 * ll {
            x1_table.push(e(l as f64 * x1));
        }
    }
    let mut c = alloc::vec![Complex64::new(0.0, 0.0); ll as usize];
    let mut total = 0.0;
    for j in slab.start..slab.end.min(n2) {
        let x2 = (j as f64 + 0.5) / n2 as f64;
        for m in 0..n3 {
            let x3 = -a3 + (m as f64 + 0.5) * 2.0 * a3 / n3 as f64;
            c.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            for (ik, k) in (kk..2 * kk).enumerate() {
                let z = e(k as f64 * x2 + roots[ik] * x3);
                let mut zp = z.powu(ll);
                for (il, l) in (ll..2 * ll).enumerate() {
                    c[il] += coeffs.get(k, l) * zp;
                    zp *= z;
                }
            }
            for row in x1_table.chunks_exact(ll as usize) {
                let f: Complex64 = row.iter().zip(&c).map(|(w, cl)| w * cl).sum();
                let m2 = f.norm_sqr();
                total += if q == 4.0 { m2 * m2 } else { libm::pow(m2, q / 2.0) };
            }
        }
    }
    Ok(total)
}

/// Averaged `L^q` norm from a total of `|f|^q` samples.
pub fn gq_from_sum(total: f64, res: &Resolution, q: f64) -> f64 {
    libm::pow(total / res.points() as f64, 1.0 / q)
}

/// `G_q` at the given resolution, which must reach [`Resolution::floor`].
pub fn gq_norm(cfg: &SpacingConfig, coeffs: &CoefficientGrid, res: &Resolution) -> Result<f64> {
    let total = gq_slab_sum(cfg, coeffs, res, 0..res.n[1])?;
    Ok(gq_from_sum(total, res, cfg.q()))
}

/// `G_q` at a resolution and at double that resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convergence {
    pub coarse: f64,
    pub fine: f64,
}

impl Convergence {
    pub fn rel_change(&self) -> f64 {
        if self.fine == 0.0 {
            return if self.coarse == 0.0 { 0.0 } else { f64::INFINITY };
        }
        (self.fine - self.coarse).abs() / self.fine
    }
}

pub fn gq_norm_converged(cfg: &SpacingConfig, coeffs: &CoefficientGrid, res: &Resolution) -> Result<Convergence> {
    Ok(Convergence {
        coarse: gq_norm(cfg, coeffs, res)?,
        fine: gq_norm(cfg, coeffs, &res.doubled())?,
    })
}
