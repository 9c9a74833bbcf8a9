//! Exhaustive counting for the `n = 2` system
//!
//! ```text
//! l₁ + l₂ = l₃ + l₄
//! k₁l₁ + k₂l₂ = k₃l₃ + k₄l₄
//! |l₁√k₁ + l₂√k₂ − l₃√k₃ − l₄√k₄| ≤ w·ηL√K
//! ```
//!
//! with optional localisation `diam(k₁..k₄) ≤ η^{β₁}K`, `diam(l₁..l₄) ≤ η^{β₂}L`.
//!
//! Ordered pairs `(k₁, l₁, k₂, l₂)` are bucketed by the two exact sums and
//! sorted by the irrational one; matches inside the window are counted with
//! two pointers. Localisation is handled by inclusion–exclusion over the
//! smallest `k` and `l` a tuple uses.

use alloc::vec::Vec;
use core::ops::RangeInclusive;

use super::BetaConvention;
use crate::{Error, Result};

/// Absolute slack on the window, so that exact algebraic ties such as
/// `√8 = 2√2` are not lost to rounding.
pub const TIE_SLACK: f64 = 1e-9;

/// Parameters of the counting problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemStarSpec {
    pub n: u32,
    pub k: u32,
    pub l: u32,
    pub eta: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Multiplier of `ηL√K` in the window.
    pub w: f64,
    pub convention: BetaConvention,
}

impl SystemStarSpec {
    pub fn new(k: u32, l: u32, eta: f64, beta1: f64, beta2: f64) -> Self {
        SystemStarSpec {
            n: 2,
            k,
            l,
            eta,
            beta1,
            beta2,
            w: 1.0,
            convention: BetaConvention::Normative,
        }
    }

    /// `w·ηL√K`.
    pub fn window(&self) -> f64 {
        self.w * self.eta * self.l as f64 * libm::sqrt(self.k as f64)
    }

    /// Largest admissible integer diameters `(⌊η^{β_k}K⌋, ⌊η^{β_l}L⌋)`.
    pub fn diameters(&self) -> (u32, u32) {
        let (bk, bl) = self.convention.split(self.beta1, self.beta2);
        let dk = libm::floor(libm::pow(self.eta, bk) * self.k as f64 + 1e-9);
        let dl = libm::floor(libm::pow(self.eta, bl) * self.l as f64 + 1e-9);
        (dk.max(0.0) as u32, dl.max(0.0) as u32)
    }

    /// Localisation that cuts nothing: both diameters reach across the range.
    pub fn localization_vacuous(&self) -> bool {
        let (dk, dl) = self.diameters();
        dk + 1 >= self.k && dl + 1 >= self.l
    }

    fn validate(&self) -> Result<()> {
        if self.n != 2 {
            return Err(Error::Unsupported("exhaustive counting is implemented for n = 2 only"));
        }
        if self.k == 0 || self.l == 0 {
            return Err(Error::domain("SystemStarSpec", "K and L must be positive"));
        }
        if self.k > 1 << 20 || self.l > 1 << 20 {
            return Err(Error::domain("SystemStarSpec", "K or L too large for exhaustive counting"));
        }
        Ok(())
    }
}

/// A `k`-range and an `l`-range, inclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountBox {
    pub k: RangeInclusive<u32>,
    pub l: RangeInclusive<u32>,
}

/// Ordered 4-tuples with every `kᵢ ∈ b.k`, `lᵢ ∈ b.l` solving the system
/// with window `window`.
pub fn count_box(b: &CountBox, window: f64) -> u64 {
    let ks: Vec<u32> = b.k.clone().collect();
    let ls: Vec<u32> = b.l.clone().collect();
    if ks.is_empty() || ls.is_empty() {
        return 0;
    }
    let roots: Vec<f64> = ks.iter().map(|&k| libm::sqrt(k as f64)).collect();
    let mut pairs: Vec<(u64, f64)> = Vec::with_capacity(ks.len() * ks.len() * ls.len() * ls.len());
    for (i1, &k1) in ks.iter().enumerate() {
        for &l1 in &ls {
            let v1 = l1 as f64 * roots[i1];
            for (i2, &k2) in ks.iter().enumerate() {
                for &l2 in &ls {
                    let s = (l1 + l2) as u64;
                    let t = k1 as u64 * l1 as u64 + k2 as u64 * l2 as u64;
                    pairs.push(((s << 40) | t, v1 + l2 as f64 * roots[i2]));
                }
            }
        }
    }
    pairs.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let reach = window + TIE_SLACK;
    let mut total: u64 = 0;
    let mut start = 0;
    while start < pairs.len() {
        let key = pairs[start].0;
        let mut end = start;
        while end < pairs.len() && pairs[end].0 == key {
            end += 1;
        }
        let group = &pairs[start..end];
        // ordered pairs (i, j) with |vᵢ − vⱼ| ≤ reach: the diagonal plus twice the i < j ones
        let mut hi = 0;
        let mut above = 0u64;
        for i in 0..group.len() {
            if hi < i + 1 {
                hi = i + 1;
            }
            while hi < group.len() && group[hi].1 - group[i].1 <= reach {
                hi += 1;
            }
            above += (hi - i - 1) as u64;
        }
        total += group.len() as u64 + 2 * above;
        start = end;
    }
    total
}

/// The boxes and signs whose signed sum is the localised count.
pub fn localized_boxes(spec: &SystemStarSpec) -> Vec<(i64, CountBox)> {
    let (dk, dl) = spec.diameters();
    let k_terms = corner_terms(spec.k, dk);
    let l_terms = corner_terms(spec.l, dl);
    let mut out = Vec::with_capacity(k_terms.len() * l_terms.len());
    for (sk, kr) in &k_terms {
        for (sl, lr) in &l_terms {
            out.push((sk * sl, CountBox { k: kr.clone(), l: lr.clone() }));
        }
    }
    out
}

// Tuples whose smallest value is exactly `a` and whose spread is at most `d`:
// within [a, a+d] minus within [a+1, a+d]. A spread covering the whole range
// needs no correction.
fn corner_terms(base: u32, d: u32) -> Vec<(i64, RangeInclusive<u32>)> {
    let top = 2 * base - 1;
    if d + 1 >= base {
        return alloc::vec![(1, base..=top)];
    }
    let mut terms = Vec::with_capacity(2 * base as usize);
    for a in base..=top {
        let hi = (a + d).min(top);
        terms.push((1, a..=hi));
        if a < hi {
            terms.push((-1, a + 1..=hi));
        }
    }
    terms
}

/// Solutions without localisation.
pub fn count_unlocalized(n: u32, k: u32, l: u32, eta: f64, w: f64) -> Result<u64> {
    let spec = SystemStarSpec {
        n,
        w,
        ..SystemStarSpec::new(k, l, eta, 0.0, 0.0)
    };
    spec.validate()?;
    Ok(count_box(&CountBox { k: k..=2 * k - 1, l: l..=2 * l - 1 }, spec.window()))
}

/// Solutions with localisation.
pub fn count_system_star(spec: &SystemStarSpec) -> Result<u64> {
    spec.validate()?;
    let window = spec.window();
    let signed: i64 = localized_boxes(spec)
        .iter()
        .map(|(sign, b)| sign * count_box(b, window) as i64)
        .sum();
    u64::try_from(signed).map_err(|_| Error::domain("count_system_star", "negative inclusion-exclusion total"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(spec: &SystemStarSpec) -> u64 {
        let (k, l) = (spec.k, spec.l);
        let (dk, dl) = spec.diameters();
        let w = spec.window() + TIE_SLACK;
        let r = |x: u32| libm::sqrt(x as f64);
        let mut n = 0;
        for k1 in k..2 * k {
            for k2 in k..2 * k {
                for k3 in k..2 * k {
                    for k4 in k..2 * k {
                        let ks = [k1, k2, k3, k4];
                        let kd = ks.iter().max().unwrap() - ks.iter().min().unwrap();
                        if kd > dk {
                            continue;
                        }
                        for l1 in l..2 * l {
                            for l2 in l..2 * l {
                                for l3 in l..2 * l {
                                    let Some(l4) = (l1 + l2).checked_sub(l3) else { continue };
                                    if !(l..2 * l).contains(&l4) {
                                        continue;
                                    }
                                    let ls = [l1, l2, l3, l4];
                                    if ls.iter().max().unwrap() - ls.iter().min().unwrap() > dl {
                                        continue;
                                    }
                                    if k1 * l1 + k2 * l2 != k3 * l3 + k4 * l4 {
                                        continue;
                                    }
                                    let gap = l1 as f64 * r(k1) + l2 as f64 * r(k2) - l3 as f64 * r(k3) - l4 as f64 * r(k4);
                                    if gap.abs() <= w {
                                        n += 1;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        n
    }

    #[test]
    fn tiny_window_counts_permutations() {
        assert_eq!(count_unlocalized(2, 2, 1, 1e-15, 1.0).unwrap(), 6);
    }

    #[test]
    fn unsupported_n() {
        assert!(matches!(count_unlocalized(3, 4, 2, 0.25, 1.0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn matches_naive_enumeration() {
        for (k, l) in [(4, 1), (4, 2), (6, 3), (8, 2)] {
            for eta in [1.0 / k as f64, 2.0 / k as f64] {
                for (b1, b2) in [(0.0, 0.0), (0.5, 0.5), (1.0, 0.0), (0.5, 1.0), (1.0, 1.0)] {
                    for convention in [BetaConvention::Normative, BetaConvention::Swapped] {
                        let spec = SystemStarSpec { convention, ..SystemStarSpec::new(k, l, eta, b1, b2) };
                        assert_eq!(count_system_star(&spec).unwrap(), naive(&spec), "{spec:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn vacuous_localization_and_relaxed_window() {
        let (k, l) = (8, 4);
        let star = count_system_star(&SystemStarSpec::new(k, l, 0.125, 0.0, 0.0)).unwrap();
        let unloc = count_unlocalized(2, k, l, 0.125, 1.0).unwrap();
        assert_eq!(star, unloc);
        assert!(unloc >= (k * k * l * l) as u64);
        // window wider than any gap: only the two equalities matter
        let relaxed = count_unlocalized(2, k, l, 0.125, 1e6).unwrap();
        let mut exact = 0;
        for k1 in k..2 * k {
            for k2 in k..2 * k {
                for k3 in k..2 * k {
                    for k4 in k..2 * k {
                        for l1 in l..2 * l {
                            for l2 in l..2 * l {
                                for l3 in l..2 * l {
                                    let l4 = l1 + l2 - l3;
                                    if (l..2 * l).contains(&l4) && k1 * l1 + k2 * l2 == k3 * l3 + k4 * l4 {
                                        exact += 1;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        assert_eq!(relaxed, exact);
    }

    #[test]
    fn sub_unit_k_diameter_pins_k() {
        // η^{β₁}K < 1: all four k equal
        let spec = SystemStarSpec::new(8, 2, 0.05, 1.0, 0.0);
        assert_eq!(spec.diameters().0, 0);
        let n = count_system_star(&spec).unwrap();
        assert_eq!(n, naive(&spec));
        // each fixed k contributes the l-only solutions l₁+l₂ = l₃+l₄ (k cancels)
        let per_k: u64 = {
            let mut c = 0;
            for a in 2..4u32 {
                for b in 2..4u32 {
                    for x in 2..4u32 {
                        let y = a + b - x;
                        if (2..4).contains(&y) {
                            c += 1;
                        }
                    }
                }
            }
            c
        };
        assert_eq!(n, 8 * per_k);
    }

    #[test]
    fn localized_never_exceeds_unlocalized() {
        let unloc = count_unlocalized(2, 8, 2, 0.125, 1.0).unwrap();
        for (b1, b2) in [(0.5, 0.5), (1.0, 1.0), (0.5, 0.0)] {
            let star = count_system_star(&SystemStarSpec::new(8, 2, 0.125, b1, b2)).unwrap();
            assert!(star <= unloc);
        }
    }
}
