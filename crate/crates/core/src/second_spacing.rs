//! Minor-arc data for the phase `φ(m) = (T/M)F(m/M)`, the vectors
//! `x_{a/r} = (ā/r, āc/r, 1/√(μr³), κ/√(μr³))`, the `SL₂(ℤ)` matrix carrying
//! one arc to another, and brute-force counting of close pairs.
//!
//! For the families in [`crate::phase`] `F′ < 0 < F″` on `[1, 2]`, so `a/r`
//! is negative and `μ` is positive.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::ops::Range;

use crate::numeric::{bisect, dist_to_int, frac, gcd, round_half_even};
use crate::phase::PhaseFamily;
use crate::{Error, Result};

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    // returns (g, x, y) with a·x + b·y = g ≥ 0
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i128, 0i128);
    let (mut y0, mut y1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

/// `ā ∈ [0, r)` with `a·ā ≡ 1 (mod r)`.
pub fn mod_inverse(a: i64, r: u64) -> Result<u64> {
    if r == 0 {
        return Err(Error::NonInvertible { a, r });
    }
    let rr = r as i128;
    let (g, x, _) = ext_gcd((a as i128).rem_euclid(rr), rr);
    if g != 1 {
        return Err(Error::NonInvertible { a, r });
    }
    Ok(x.rem_euclid(rr) as u64)
}

/// The data attached to one reduced fraction `a/r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinorArcData {
    pub a: i64,
    pub r: u64,
    /// Nearest integer to the point where `φ′ = a/r`.
    pub m: i64,
    pub mu: f64,
    pub nu: f64,
    pub c: i64,
    pub kappa: f64,
    pub a_bar: u64,
    /// `|ν| > 1`: the nearest integer left the arc.
    pub boundary: bool,
}

/// `φ′(x) = (T/M²)F′(x/M)`.
pub fn phi_prime(family: &PhaseFamily, m: f64, t: f64, x: f64) -> f64 {
    t / (m * m) * family.derivative(1, x / m)
}

/// Closed range of `φ′` over `[M, 2M]`.
pub fn slope_range(family: &PhaseFamily, m: f64, t: f64) -> (f64, f64) {
    let (a, b) = (phi_prime(family, m, t, m), phi_prime(family, m, t, 2.0 * m));
    (a.min(b), a.max(b))
}

/// Build the arc data for `a/r`.
pub fn arc_data(a: i64, r: u64, family: &PhaseFamily, m: f64, t: f64) -> Result<MinorArcData> {
    let a_bar = mod_inverse(a, r)?;
    let slope = a as f64 / r as f64;
    let (lo, hi) = slope_range(family, m, t);
    if !(lo..=hi).contains(&slope) {
        return Err(Error::domain(
            "arc_data",
            alloc::format!("{a}/{r} is outside the slope range [{lo}, {hi}]"),
        ));
    }
    let root = bisect(|x| phi_prime(family, m, t, x) - slope, m, 2.0 * m, 1e-9 * m, 200)?.root;
    let mi = round_half_even(root);
    let u = mi / m;
    let mu = 0.5 * t / (m * m * m) * family.derivative(2, u);
    let nu = (phi_prime(family, m, t, mi) - slope) / (2.0 * mu);
    let value = r as f64 * (t / m) * family.value(u) - mu * nu * nu;
    let c = libm::floor(value);
    Ok(MinorArcData {
        a,
        r,
        m: mi as i64,
        mu,
        nu,
        c: c as i64,
        kappa: frac(value),
        a_bar,
        boundary: nu.abs() > 1.0,
    })
}

/// Every reduced `a/r` with `1 ≤ r ≤ r_max` and `a/r` in the slope range.
pub fn enumerate_arcs(family: &PhaseFamily, m: f64, t: f64, r_values: Range<u64>) -> Result<Vec<MinorArcData>> {
    let (lo, hi) = slope_range(family, m, t);
    let mut out = Vec::new();
    for r in r_values.start.max(1)..r_values.end {
        let a_lo = libm::ceil(lo * r as f64) as i64;
        let a_hi = libm::floor(hi * r as f64) as i64;
        for a in a_lo..=a_hi {
            if gcd(a.unsigned_abs(), r) == 1 {
                out.push(arc_data(a, r, family, m, t)?);
            }
        }
    }
    Ok(out)
}

/// `x_{a/r}` as computed, and with the first two entries reduced mod 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XVector {
    pub raw: [f64; 4],
    pub reduced: [f64; 4],
}

/// Requires `μ > 0`.
pub fn x_vector(d: &MinorArcData) -> Result<XVector> {
    if !(d.mu > 0.0) {
        return Err(Error::domain("x_vector", alloc::format!("μ = {} is not positive", d.mu)));
    }
    let r = d.r as f64;
    let s = libm::sqrt(d.mu * r * r * r);
    let ac = d.a_bar as i128 * d.c as i128;
    let raw = [d.a_bar as f64 / r, ac as f64 / r, 1.0 / s, d.kappa / s];
    let reduced = [
        raw[0],
        ac.rem_euclid(d.r as i128) as f64 / r,
        raw[2],
        raw[3],
    ];
    Ok(XVector { raw, reduced })
}

/// An integer matrix `[[α, β], [γ, δ]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnimodMatrix {
    pub alpha: i64,
    pub beta: i64,
    pub gamma: i64,
    pub delta: i64,
}

impl UnimodMatrix {
    pub fn det(&self) -> i128 {
        self.alpha as i128 * self.delta as i128 - self.beta as i128 * self.gamma as i128
    }

    pub fn apply(&self, a: i64, r: i64) -> (i128, i128) {
        (
            self.alpha as i128 * a as i128 + self.beta as i128 * r as i128,
            self.gamma as i128 * a as i128 + self.delta as i128 * r as i128,
        )
    }
}

fn in_gamma_window(gamma: i128, rr1: i128) -> bool {
    -rr1 < 2 * gamma && 2 * gamma <= rr1
}

fn narrow(v: i128) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::Overflow("pair_matrix"))
}

/// The unique `M ∈ SL₂(ℤ)` with `(a₁, r₁)ᵀ = M(a, r)ᵀ` and `−rr₁/2 < γ ≤ rr₁/2`.
///
/// With `U = [[a, u], [r, v]]`, `U₁ = [[a₁, u₁], [r₁, v₁]]` of determinant 1,
/// every solution is `U₁ [[1, t], [0, 1]] U⁻¹`; `t` is fixed by the window on
/// `γ = r₁v − rv₁ − t·rr₁`.
pub fn pair_matrix(a: i64, r: u64, a1: i64, r1: u64) -> Result<UnimodMatrix> {
    let (ai, ri, a1i, r1i) = (a as i128, r as i128, a1 as i128, r1 as i128);
    let (g, v, nu) = ext_gcd(ai, ri);
    if g != 1 || r == 0 {
        return Err(Error::NonInvertible { a, r });
    }
    let (g1, v1, nu1) = ext_gcd(a1i, r1i);
    if g1 != 1 || r1 == 0 {
        return Err(Error::NonInvertible { a: a1, r: r1 });
    }
    // a·v − r·u = 1
    let (u, u1) = (-nu, -nu1);
    let p = ri * r1i;
    let gamma0 = r1i * v - ri * v1;
    // smallest t with γ₀ − t·p ≤ p/2
    let t = -((p - 2 * gamma0).div_euclid(2 * p));
    let gamma = gamma0 - t * p;
    let alpha = a1i * v - (a1i * t + u1) * ri;
    let beta = (a1i * t + u1) * ai - a1i * u;
    let delta = (r1i * t + v1) * ai - r1i * u;
    let m = UnimodMatrix {
        alpha: narrow(alpha)?,
        beta: narrow(beta)?,
        gamma: narrow(gamma)?,
        delta: narrow(delta)?,
    };
    debug_assert!(in_gamma_window(gamma, p) && m.det() == 1 && m.apply(a, r as i64) == (a1i, r1i));
    Ok(m)
}

/// The same matrix found by trying every `γ` in the window.
pub fn pair_matrix_search(a: i64, r: u64, a1: i64, r1: u64) -> Option<UnimodMatrix> {
    let (ai, ri, a1i, r1i) = (a as i128, r as i128, a1 as i128, r1 as i128);
    let p = ri * r1i;
    let mut found = None;
    for gamma in (-p / 2 - 1)..=(p / 2) {
        if !in_gamma_window(gamma, p) {
            continue;
        }
        let num = r1i - gamma * ai;
        if num % ri != 0 {
            continue;
        }
        let delta = num / ri;
        // [[a, r], [δ, −γ]] (α, β)ᵀ = (a₁, 1)ᵀ, determinant −r₁
        let (an, bn) = (a1i * gamma + ri, delta * a1i - ai);
        if an % r1i != 0 || bn % r1i != 0 {
            continue;
        }
        let m = UnimodMatrix {
            alpha: (an / r1i) as i64,
            beta: (bn / r1i) as i64,
            gamma: gamma as i64,
            delta: delta as i64,
        };
        if m.det() == 1 && m.apply(a, r as i64) == (a1i, r1i) {
            if found.is_some() {
                return None;
            }
            found = Some(m);
        }
    }
    found
}

/// The four closeness thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairWindow {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
}

impl PairWindow {
    /// All positive, `Δ₁ < 1/2`.
    pub fn new(d1: f64, d2: f64, d3: f64, d4: f64) -> Result<Self> {
        if !(d1 > 0.0 && d2 > 0.0 && d3 > 0.0 && d4 > 0.0) || !(d1 < 0.5) {
            return Err(Error::domain("PairWindow", "need every Δ > 0 and Δ₁ < 1/2"));
        }
        Ok(PairWindow { d1, d2, d3, d4 })
    }

    /// `(1/(KL), 1/L, 1/(L√K), √K/L)`.
    pub fn preset(k: u32, l: u32) -> Result<Self> {
        let (k, l) = (k as f64, l as f64);
        PairWindow::new(1.0 / (k * l), 1.0 / l, 1.0 / (l * libm::sqrt(k)), libm::sqrt(k) / l)
    }

    /// `(1/2, 1/2, ∞, 1)`: every pair passes. Bypasses the `Δ₁ < 1/2` check.
    pub fn saturating() -> Self {
        PairWindow { d1: 0.5, d2: 0.5, d3: f64::INFINITY, d4: 1.0 }
    }
}

/// How `κ − κ₁` is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KappaDistance {
    #[default]
    Absolute,
    /// Distance on the circle `ℝ/ℤ`.
    Circular,
}

// ‖p/q − p₁/q₁‖ from integers, so it is exactly symmetric.
fn fraction_distance(p: i128, q: u64, p1: i128, q1: u64) -> f64 {
    let d = q as i128 * q1 as i128;
    let n = (p * q1 as i128 - p1 * q as i128).rem_euclid(d);
    n.min(d - n) as f64 / d as f64
}

/// First-coordinate distance `‖ā/r − ā₁/r₁‖`.
pub fn first_distance(x: &MinorArcData, y: &MinorArcData) -> f64 {
    fraction_distance(x.a_bar as i128, x.r, y.a_bar as i128, y.r)
}

/// Second-coordinate distance `‖āc/r − ā₁c₁/r₁‖`.
pub fn second_distance(x: &MinorArcData, y: &MinorArcData) -> f64 {
    let ac = |d: &MinorArcData| (d.a_bar as i128 * d.c as i128).rem_euclid(d.r as i128);
    fraction_distance(ac(x), x.r, ac(y), y.r)
}

fn passes(x: &MinorArcData, y: &MinorArcData, win: &PairWindow, kd: KappaDistance) -> bool {
    if first_distance(x, y) > win.d1 {
        return false;
    }
    if second_distance(x, y) > win.d2 {
        return false;
    }
    let ratio = (y.mu * libm::pow(y.r as f64, 3.0)) / (x.mu * libm::pow(x.r as f64, 3.0));
    if !((ratio - 1.0).abs() <= win.d3) {
        return false;
    }
    let dk = match kd {
        KappaDistance::Absolute => (x.kappa - y.kappa).abs(),
        KappaDistance::Circular => dist_to_int(x.kappa - y.kappa),
    };
    dk <= win.d4
}

/// Result of a close-pair count.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PairCount {
    /// Ordered pairs, including each arc with itself.
    pub count: u64,
    /// Counted pairs by the `γ` of their matrix.
    pub gamma_histogram: BTreeMap<i64, u64>,
    /// Counted pairs `(i, j)` whose matrix has `|γ| > Δ₁rr₁`.
    pub violations: Vec<(usize, usize)>,
}

impl PairCount {
    pub fn merge(mut self, other: PairCount) -> PairCount {
        self.count += other.count;
        for (g, n) in other.gamma_histogram {
            *self.gamma_histogram.entry(g).or_default() += n;
        }
        self.violations.extend(other.violations);
        self
    }
}

/// Count ordered pairs `(i, j)`, `i ∈ rows`, passing all four conditions.
pub fn count_close_pairs_rows(
    arcs: &[MinorArcData],
    win: &PairWindow,
    kd: KappaDistance,
    rows: Range<usize>,
) -> Result<PairCount> {
    arcs.iter().try_for_each(|d| x_vector(d).map(|_| ()))?;
    let mut out = PairCount::default();
    for i in rows.start..rows.end.min(arcs.len()) {
        for j in 0..arcs.len() {
            if !passes(&arcs[i], &arcs[j], win, kd) {
                continue;
            }
            out.count += 1;
            let m = pair_matrix(arcs[i].a, arcs[i].r, arcs[j].a, arcs[j].r)?;
            *out.gamma_histogram.entry(m.gamma).or_default() += 1;
            if m.gamma.unsigned_abs() as f64 > win.d1 * (arcs[i].r * arcs[j].r) as f64 * (1.0 + 1e-12) {
                out.violations.push((i, j));
            }
        }
    }
    Ok(out)
}

pub fn count_close_pairs(arcs: &[MinorArcData], win: &PairWindow, kd: KappaDistance) -> Result<PairCount> {
    count_close_pairs_rows(arcs, win, kd, 0..arcs.len())
}

/// Over all ordered pairs passing only the first condition, how many were
/// checked and which have `|γ| > Δ₁rr₁`.
pub fn gamma_audit(arcs: &[MinorArcData], d1: f64, rows: Range<usize>) -> Result<(u64, Vec<(usize, usize)>)> {
    let mut checked = 0;
    let mut bad = Vec::new();
    for i in rows.start..rows.end.min(arcs.len()) {
        for j in 0..arcs.len() {
            if first_distance(&arcs[i], &arcs[j]) > d1 {
                continue;
            }
            checked += 1;
            let m = pair_matrix(arcs[i].a, arcs[i].r, arcs[j].a, arcs[j].r)?;
            if m.gamma.unsigned_abs() as f64 > d1 * (arcs[i].r * arcs[j].r) as f64 * (1.0 + 1e-12) {
                bad.push((i, j));
            }
        }
    }
    Ok((checked, bad))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(1, 9).unwrap(), 1);
        assert_eq!(mod_inverse(3, 7).unwrap(), 5);
        assert_eq!(mod_inverse(-3, 7).unwrap(), 2);
        assert_eq!(mod_inverse(5, 1).unwrap(), 0);
        assert!(matches!(mod_inverse(4, 6), Err(Error::NonInvertible { a: 4, r: 6 })));
        for r in 1..=100u64 {
            for a in 0..r as i64 {
                if gcd(a as u64, r) == 1 {
                    let inv = mod_inverse(a, r).unwrap();
                    assert_eq!((a as u64 * inv) % r, 1 % r);
                }
            }
        }
    }

    #[test]
    fn arc_example() {
        let d = arc_data(-1, 2, &PhaseFamily::Reciprocal, 10.0, 100.0).unwrap();
        assert_eq!(d.m, 14);
        assert!(d.nu.abs() <= 1.0 && (0.0..1.0).contains(&d.kappa));
        let value = 2.0 * 10.0 * (10.0 / 14.0) - d.mu * d.nu * d.nu;
        assert!((d.c as f64 + d.kappa - value).abs() < 1e-12);
        assert!(arc_data(-2, 1, &PhaseFamily::Reciprocal, 10.0, 100.0).is_err());
    }

    #[test]
    fn exact_hit_gives_zero_nu() {
        // φ′(16) = −100/256 = −25/64 for M = 10, T = 100
        let d = arc_data(-25, 64, &PhaseFamily::Reciprocal, 10.0, 100.0).unwrap();
        assert_eq!(d.m, 16);
        assert!(d.nu.abs() < 1e-12);
    }

    #[test]
    fn x_vector_examples() {
        let d = MinorArcData { a: -1, r: 5, m: 40, mu: 0.3, nu: 0.1, c: 0, kappa: 0.0, a_bar: 1, boundary: false };
        let x = x_vector(&d).unwrap();
        let s = libm::sqrt(0.3 * 125.0);
        assert_eq!(x.raw, [0.2, 0.0, 1.0 / s, 0.0]);
        let bad = MinorArcData { mu: -0.1, ..d };
        assert!(x_vector(&bad).is_err());
    }

    #[test]
    fn pair_matrix_examples() {
        let id = pair_matrix(3, 7, 3, 7).unwrap();
        assert_eq!(id, UnimodMatrix { alpha: 1, beta: 0, gamma: 0, delta: 1 });
        let m = pair_matrix(1, 2, 1, 3).unwrap();
        assert_eq!(m, UnimodMatrix { alpha: 1, beta: 0, gamma: 1, delta: 1 });
        assert_eq!(pair_matrix_search(1, 2, 1, 3), Some(m));
        assert!(pair_matrix(2, 4, 1, 3).is_err());
    }

    #[test]
    fn pair_matrix_matches_search_small() {
        for r in 1..=9u64 {
            for a in -(r as i64)..=(r as i64) {
                if gcd(a.unsigned_abs(), r) != 1 {
                    continue;
                }
                for r1 in 1..=9u64 {
                    for a1 in -(r1 as i64)..=(r1 as i64) {
                        if gcd(a1.unsigned_abs(), r1) != 1 {
                            continue;
                        }
                        let m = pair_matrix(a, r, a1, r1).unwrap();
                        assert_eq!(Some(m), pair_matrix_search(a, r, a1, r1), "{a}/{r} → {a1}/{r1}");
                    }
                }
            }
        }
    }

    fn sample_arcs() -> Vec<MinorArcData> {
        enumerate_arcs(&PhaseFamily::Reciprocal, 32.0, 1e5, 8..12).unwrap()
    }

    #[test]
    fn window_extremes() {
        let arcs = sample_arcs();
        let n = arcs.len() as u64;
        let all = count_close_pairs(&arcs, &PairWindow::saturating(), KappaDistance::Absolute).unwrap();
        assert_eq!(all.count, n * n);
        assert!(all.violations.is_empty());
        let tiny = PairWindow::new(1e-15, 1e-15, 1e-15, 1e-15).unwrap();
        let same = count_close_pairs(&arcs, &tiny, KappaDistance::Absolute).unwrap();
        assert_eq!(same.count, n);
    }

    #[test]
    fn count_is_order_independent() {
        let arcs = sample_arcs();
        let win = PairWindow::new(0.05, 0.2, 0.5, 0.5).unwrap();
        let a = count_close_pairs(&arcs, &win, KappaDistance::Absolute).unwrap();
        let mut rev = arcs.clone();
        rev.reverse();
        let b = count_close_pairs(&rev, &win, KappaDistance::Absolute).unwrap();
        assert_eq!(a.count, b.count);
        assert_eq!(a.gamma_histogram, b.gamma_histogram);
        let split = count_close_pairs_rows(&arcs, &win, KappaDistance::Absolute, 0..10)
            .unwrap()
            .merge(count_close_pairs_rows(&arcs, &win, KappaDistance::Absolute, 10..arcs.len()).unwrap());
        assert_eq!(split.count, a.count);
        let circ = count_close_pairs(&arcs, &win, KappaDistance::Circular).unwrap();
        assert!(circ.count >= a.count);
    }
}
