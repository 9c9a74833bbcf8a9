//! The double exponential sum
//!
//! ```text
//! S = Σ_{H≤h≤2H} g(h/H) Σ_{M≤m≤2M} G(m/M) e((hT/M)·F(m/M))
//! ```
//!
//! together with the conditions on `F`, the Case A / Case B regions in
//! `(H, M, T)`, the derived parameter block `(N, R, K, L, η, Q₂)` and the
//! chain of upper-bound formulas for `S`.
//!
//! Relations written `≪`, `≫` or `∼` in the analytic argument carry an explicit
//! multiplicative margin here (default 1). Powers of `log T` are always kept
//! as explicit factors.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::first_spacing::bounds::gq_upper_bound;
use crate::numeric::e;
use crate::phase::PhaseFamily;
use crate::{Error, Result};

/// A weight on `[1, 2]`: constant, or piecewise linear through equally spaced
/// samples (first sample at 1, last at 2).
#[derive(Debug, Clone, PartialEq)]
pub enum Weight {
    Constant(f64),
    Table(Vec<f64>),
}

impl Default for Weight {
    fn default() -> Self {
        Weight::Constant(1.0)
    }
}

impl Weight {
    pub fn at(&self, u: f64) -> f64 {
        match self {
            Weight::Constant(c) => *c,
            Weight::Table(samples) => match samples.len() {
                0 => 0.0,
                1 => samples[0],
                n => {
                    let pos = ((u - 1.0) * (n - 1) as f64).clamp(0.0, (n - 1) as f64);
                    let i = (libm::floor(pos) as usize).min(n - 2);
                    let w = pos - i as f64;
                    samples[i] * (1.0 - w) + samples[i + 1] * w
                }
            },
        }
    }

    pub fn sup(&self) -> f64 {
        match self {
            Weight::Constant(c) => c.abs(),
            Weight::Table(samples) => samples.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    pub fn scaled(&self, by: f64) -> Weight {
        match self {
            Weight::Constant(c) => Weight::Constant(c * by),
            Weight::Table(samples) => Weight::Table(samples.iter().map(|v| v * by).collect()),
        }
    }
}

/// Parameters of `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct SumSpec {
    pub h: f64,
    pub m: f64,
    pub t: f64,
    pub family: PhaseFamily,
    pub g: Weight,
    pub big_g: Weight,
}

impl SumSpec {
    /// Unit weights. Requires `H ≥ 1`, `M ≥ 1`, `T ≥ M`.
    pub fn new(h: f64, m: f64, t: f64, family: PhaseFamily) -> Result<Self> {
        if !(h >= 1.0 && m >= 1.0 && t >= m && t.is_finite()) {
            return Err(Error::domain("SumSpec", "need H ≥ 1, M ≥ 1 and T ≥ M"));
        }
        Ok(SumSpec {
            h,
            m,
            t,
            family,
            g: Weight::default(),
            big_g: Weight::default(),
        })
    }

    pub fn with_weights(mut self, g: Weight, big_g: Weight) -> Self {
        self.g = g;
        self.big_g = big_g;
        self
    }

    /// The same sum with `T` replaced by `−T`; its value is the conjugate.
    pub fn mirrored(&self) -> SumSpec {
        SumSpec { t: -self.t, ..self.clone() }
    }

    fn h_range(&self) -> (i64, i64) {
        (libm::ceil(self.h) as i64, libm::floor(2.0 * self.h) as i64)
    }

    fn m_range(&self) -> (i64, i64) {
        (libm::ceil(self.m) as i64, libm::floor(2.0 * self.m) as i64)
    }

    /// Number of `(h, m)` terms.
    pub fn term_count(&self) -> u64 {
        let (h0, h1) = self.h_range();
        let (m0, m1) = self.m_range();
        ((h1 - h0 + 1).max(0) as u64) * ((m1 - m0 + 1).max(0) as u64)
    }

    /// `#terms · sup|g| · sup|G|`.
    pub fn trivial_bound(&self) -> f64 {
        self.term_count() as f64 * self.g.sup() * self.big_g.sup()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummationOrder {
    HOuter,
    MOuter,
}

/// Value of `S` and the largest phase that had to be reduced modulo 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumValue {
    pub value: Complex64,
    pub max_phase: f64,
}

impl SumValue {
    /// Phases beyond 2⁵³ have no fractional bits left in an `f64`.
    pub fn precision_limited(&self) -> bool {
        self.max_phase >= 9_007_199_254_740_992.0
    }
}

/// `S`, summed with `h` outermost.
pub fn eval_s(spec: &SumSpec) -> SumValue {
    eval_s_ordered(spec, SummationOrder::HOuter)
}

pub fn eval_s_ordered(spec: &SumSpec, order: SummationOrder) -> SumValue {
    let (h0, h1) = spec.h_range();
    let (m0, m1) = spec.m_range();
    let scale = spec.t / spec.m;
    let mut max_phase: f64 = 0.0;
    let mut term = |h: i64, m: i64| {
        let u = m as f64 / spec.m;
        let phase = h as f64 * scale * spec.family.value(u);
        max_phase = max_phase.max(phase.abs());
        e(phase) * (spec.g.at(h as f64 / spec.h) * spec.big_g.at(u))
    };
    let mut acc = Complex64::new(0.0, 0.0);
    match order {
        SummationOrder::HOuter => {
            for h in h0..=h1 {
                let mut inner = Complex64::new(0.0, 0.0);
                for m in m0..=m1 {
                    inner += term(h, m);
                }
                acc += inner;
            }
        }
        SummationOrder::MOuter => {
            for m in m0..=m1 {
                let mut inner = Complex64::new(0.0, 0.0);
                for h in h0..=h1 {
                    inner += term(h, m);
                }
                acc += inner;
            }
        }
    }
    SumValue { value: acc, max_phase }
}

/// The constants `C₁ … C₅` and `B₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionConstants {
    c: [f64; 5],
    b0: f64,
}

impl ConditionConstants {
    /// Each `Cᵢ ≥ 2`, `B₀ > 0`.
    pub fn new(c: [f64; 5], b0: f64) -> Result<Self> {
        if c.iter().any(|ci| !(*ci >= 2.0)) || !(b0 > 0.0) {
            return Err(Error::domain("ConditionConstants", "need every Cᵢ ≥ 2 and B₀ > 0"));
        }
        Ok(ConditionConstants { c, b0 })
    }

    /// `Cᵢ` for `i = 1..=5`.
    pub fn c(&self, i: usize) -> f64 {
        self.c[i - 1]
    }

    pub fn b0(&self) -> f64 {
        self.b0
    }
}

impl Default for ConditionConstants {
    /// Smallest round constants that all five phase families satisfy
    /// (grid-minimised: C₁, C₂ ≥ 16 from `1/(4z)`, C₃ ≥ 18.97 from
    /// `1/(z − 1/4)`, C₄ ≥ 170.7 from `1/(4z)`), with `C₅ = 3`, `B₀ = 1`.
    fn default() -> Self {
        ConditionConstants {
            c: [16.0, 16.0, 20.0, 192.0, 3.0],
            b0: 1.0,
        }
    }
}

/// Grid size used by [`check_f_conditions`].
pub const F_CONDITION_GRID: usize = 2001;

/// `C_r ≥ |F^{(r)}| ≥ 1/C_r` for `r = 1, 2, 3` and `|F′F‴ − 3F″²| ≥ 1/C₄` on a
/// grid over `[1, 2]`.
pub fn check_f_conditions(family: &PhaseFamily, c: &ConditionConstants) -> bool {
    (0..F_CONDITION_GRID).all(|i| {
        let z = 1.0 + i as f64 / (F_CONDITION_GRID - 1) as f64;
        let derivs_ok = (1..=3).all(|r| {
            let d = family.derivative(r, z).abs();
            let cr = c.c(r as usize);
            d <= cr && d >= 1.0 / cr
        });
        derivs_ok && family.curvature_form(z).abs() >= 1.0 / c.c(4)
    })
}

/// Smallest `(C₁, C₂, C₃, C₄)` that `family` satisfies on the grid, ignoring
/// the `≥ 2` floor.
pub fn minimal_constants(family: &PhaseFamily) -> [f64; 4] {
    let mut out = [0.0f64; 4];
    for i in 0..F_CONDITION_GRID {
        let z = 1.0 + i as f64 / (F_CONDITION_GRID - 1) as f64;
        for r in 1..=3u32 {
            let d = family.derivative(r, z).abs();
            out[r as usize - 1] = out[r as usize - 1].max(d).max(1.0 / d);
        }
        out[3] = out[3].max(1.0 / family.curvature_form(z).abs());
    }
    out
}

/// How the first Case A guard is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CaseAGuard {
    /// `M < T^{7/16}`.
    #[default]
    Symmetric,
    /// `M < T^{−7/16}` with the sign flipped, which is vacuous for `M ≥ 1`.
    Literal,
}

/// Which of the two regions `(H, M, T)` lies in. Both can hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaseLabels {
    pub a: bool,
    pub b: bool,
}

impl CaseLabels {
    pub fn label(&self) -> &'static str {
        match (self.a, self.b) {
            (true, true) => "A+B",
            (true, false) => "A",
            (false, true) => "B",
            (false, false) => "neither",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    A,
    B,
}

const LOG_A: f64 = 171.0 / 140.0;

/// Classify `(H, M, T)`. Case B uses `C₅` and `B₀` from `c`.
pub fn classify_case(h: f64, m: f64, t: f64, c: &ConditionConstants, guard: CaseAGuard) -> CaseLabels {
    let (lh, lm, lt) = (libm::log(h), libm::log(m), libm::log(t));
    let llt = libm::log(lt);
    let guard_exp = match guard {
        CaseAGuard::Symmetric => 7.0 / 16.0,
        CaseAGuard::Literal => -7.0 / 16.0,
    };
    let low_m = lm < guard_exp * lt;
    let high_m = lm > 9.0 / 16.0 * lt;
    let a1 = !low_m || lh >= -9.0 * lm + 4.0 * lt + LOG_A * llt;
    let a2 = !high_m || lh >= 11.0 * lm - 6.0 * lt + LOG_A * llt;
    let a3 = lh <= lm - 49.0 / 164.0 * lt;
    let b1 = lm <= libm::log(c.c(5)) + 0.5 * lt;
    let b2 = lh <= (35.0 / 69.0 * lm - 2.0 / 23.0 * lt).min(libm::log(c.b0()) + 1.5 * lm - 0.5 * lt);
    CaseLabels {
        a: a1 && a2 && a3,
        b: b1 && b2,
    }
}

/// `N` in Case A: `H (M/H)^{41/25} T^{−49/100} (log T)^{969/14000}`.
/// `with_log = false` drops the log power.
pub fn n_case_a(h: f64, m: f64, t: f64, with_log: bool) -> f64 {
    let log_part = if with_log { 969.0 / 14000.0 * libm::log(libm::log(t)) } else { 0.0 };
    libm::exp(libm::log(h) + 41.0 / 25.0 * (libm::log(m) - libm::log(h)) - 0.49 * libm::log(t) + log_part)
}

/// `N` in Case B: `min{M^{7/8}(log T)^{969/5600} / (T^{3/20} H^{29/40}), M² / (H^{1/3} T^{2/3})}`.
pub fn n_case_b(h: f64, m: f64, t: f64) -> f64 {
    let (lh, lm, lt) = (libm::log(h), libm::log(m), libm::log(t));
    let first = 7.0 / 8.0 * lm + 969.0 / 5600.0 * libm::log(lt) - 0.15 * lt - 29.0 / 40.0 * lh;
    let second = 2.0 * lm - lh / 3.0 - 2.0 / 3.0 * lt;
    libm::exp(first.min(second))
}

/// The derived parameter block at `Q = R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub h: f64,
    pub m: f64,
    pub t: f64,
    pub n: f64,
    pub r: f64,
    pub k: f64,
    pub l: f64,
    pub eta: f64,
    pub q_min: f64,
    pub q_max: f64,
    /// `R (H/R)^{39/119} (log(2H/R))^{−3/4}`; `None` when `2H ≤ R`.
    pub q2: Option<f64>,
    /// `R > H`.
    pub degenerate: bool,
}

impl DerivedParams {
    /// `K` and `L` at a general `Q`: `NQ/R²` and `HQ/R²`.
    pub fn k_l_at(&self, q: f64) -> (f64, f64) {
        let r2 = self.r * self.r;
        (self.n * q / r2, self.h * q / r2)
    }

    /// `L ≤ K ≤ 1/η ≤ KL`, with relative slack `rel` on each comparison.
    pub fn ordering_holds(&self, rel: f64) -> bool {
        let le = |a: f64, b: f64| a <= b * (1.0 + rel);
        le(self.l, self.k) && le(self.k, 1.0 / self.eta) && le(1.0 / self.eta, self.k * self.l)
    }
}

/// Build the parameter block for `case`, which `classify_case` must admit.
pub fn derive_params(
    h: f64,
    m: f64,
    t: f64,
    case: Case,
    c: &ConditionConstants,
    guard: CaseAGuard,
) -> Result<DerivedParams> {
    let labels = classify_case(h, m, t, c, guard);
    let admitted = match case {
        Case::A => labels.a,
        Case::B => labels.b,
    };
    if !admitted {
        return Err(Error::domain("derive_params", "(H, M, T) is not in the requested case"));
    }
    let n = match case {
        Case::A => n_case_a(h, m, t, true),
        Case::B => n_case_b(h, m, t),
    };
    let r = libm::sqrt(m * m * m / (n * t));
    let (k, l) = (n / r, h / r);
    let eta = r * r / (n * h);
    for (name, v) in [("N", n), ("R", r), ("K", k), ("L", l), ("eta", eta)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::domain("derive_params", alloc::format!("{name} = {v} is not positive")));
        }
    }
    let ratio = 2.0 * h / r;
    let q2 = if ratio > 1.0 {
        Some(r * libm::pow(h / r, 39.0 / 119.0) * libm::pow(libm::log(ratio), -0.75))
    } else {
        None
    };
    Ok(DerivedParams {
        h,
        m,
        t,
        n,
        r,
        k,
        l,
        eta,
        q_min: r,
        q_max: 3.0 * h,
        q2,
        degenerate: r > h,
    })
}

/// Elementary bound for `S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimpleBound {
    /// `H((HT/M²)^{−1} + M(HT/M³)^{1/2})`.
    pub full: f64,
    /// `H^{3/2} T^{1/2} / M^{1/2}`.
    pub simplified: f64,
}

/// Requires `M ≤ T^{1/2}`.
pub fn simple_bound(h: f64, m: f64, t: f64) -> Result<SimpleBound> {
    if m > libm::sqrt(t) {
        return Err(Error::domain("simple_bound", "need M ≤ T^{1/2}"));
    }
    let full = h * (m * m / (h * t) + m * libm::sqrt(h * t / (m * m * m)));
    let simplified = libm::pow(h, 1.5) * libm::sqrt(t) / libm::sqrt(m);
    Ok(SimpleBound { full, simplified })
}

fn check_q(q: f64, what: &'static str) -> Result<()> {
    if !(4.0..=4.5).contains(&q) {
        return Err(Error::domain(what, alloc::format!("q = {q} is outside [4, 4.5]")));
    }
    Ok(())
}

/// `N^{6−q} ≥ margin · H^{2q−6} (M³/T)^{4−q}`, evaluated in logarithms.
pub fn condition_n_check(h: f64, m: f64, t: f64, q: f64, n: f64, margin: f64) -> Result<bool> {
    check_q(q, "condition_n_check")?;
    let lhs = (6.0 - q) * libm::log(n);
    let rhs = libm::log(margin)
        + (2.0 * q - 6.0) * libm::log(h)
        + (4.0 - q) * (3.0 * libm::log(m) - libm::log(t));
    Ok(lhs >= rhs)
}

/// The same condition with the Case A value of `N` substituted:
///
/// `H^{(2q−6)/(6−q)+16/25} M^{(54−34q)/(25(6−q))} T^{(51q−106)/(100(6−q))}
///  ≤ margin^{−1/(6−q)} (log T)^{969/14000}`.
///
/// Substituting `H = M T^x` removes `M` and leaves
/// `q(136x + 51) < 216x + 106` as `T → ∞`.
pub fn condition_n_case_a(h: f64, m: f64, t: f64, q: f64, margin: f64) -> Result<bool> {
    check_q(q, "condition_n_case_a")?;
    let d = 6.0 - q;
    let lhs = ((2.0 * q - 6.0) / d + 16.0 / 25.0) * libm::log(h)
        + (54.0 - 34.0 * q) / (25.0 * d) * libm::log(m)
        + (51.0 * q - 106.0) / (100.0 * d) * libm::log(t);
    let rhs = -libm::log(margin) / d + 969.0 / 14000.0 * libm::log(libm::log(t));
    Ok(lhs <= rhs)
}

/// `H^{(2q−6)/(6−q)+16/25} M^{34/25} ≤ margin^{−1/(6−q)} T^{51/100} (log T)^{969/14000}`
/// in closed form. It is not equivalent
/// to [`condition_n_check`] at the Case A `N`; kept for comparison only.
pub fn condition_n_case_a_closed(h: f64, m: f64, t: f64, q: f64, margin: f64) -> Result<bool> {
    check_q(q, "condition_n_case_a_closed")?;
    let d = 6.0 - q;
    let lhs = ((2.0 * q - 6.0) / d + 16.0 / 25.0) * libm::log(h) + 34.0 / 25.0 * libm::log(m);
    let rhs = -libm::log(margin) / d + 0.51 * libm::log(t) + 969.0 / 14000.0 * libm::log(libm::log(t));
    Ok(lhs <= rhs)
}

/// What the reduction from the second case needs at one `(H, M, T)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaseTwoReport {
    /// `1 ≤ M ≤ T^{1/2}`, `H ≥ 1` and
    /// `max(T^{(7θ−2)/2}, M T^{2θ−1}) ≤ H ≤ M T^{−θ}`.
    pub in_range: bool,
    /// `H ≥ M^{−9} T⁴ (log T)^{171/140}`.
    pub case_one: bool,
    /// The Case B conditions with the given `C₅`, `B₀`.
    pub case_b: bool,
    /// `M^{−27/23} T^{53/92} < H < M^{−9} T⁴ (log T)^{171/140}`.
    pub window: bool,
}

impl CaseTwoReport {
    /// Only meaningful for points in range where the first case fails.
    pub fn applies(&self) -> bool {
        self.in_range && !self.case_one
    }

    pub fn holds(&self) -> bool {
        self.case_b && self.window
    }
}

/// Evaluated in logarithms with `θ = theta`.
pub fn case_two_reduction(h: f64, m: f64, t: f64, theta: f64, c: &ConditionConstants) -> CaseTwoReport {
    let (lh, lm, lt) = (libm::log(h), libm::log(m), libm::log(t));
    let case_one_line = -9.0 * lm + 4.0 * lt + LOG_A * libm::log(lt);
    let lower = ((7.0 * theta - 2.0) / 2.0 * lt).max(lm + (2.0 * theta - 1.0) * lt);
    let in_range = lm >= 0.0 && lm <= 0.5 * lt && lh >= 0.0 && lh >= lower && lh <= lm - theta * lt;
    CaseTwoReport {
        in_range,
        case_one: lh >= case_one_line,
        case_b: classify_case(h, m, t, c, CaseAGuard::Symmetric).b,
        window: -27.0 / 23.0 * lm + 53.0 / 92.0 * lt < lh && lh < case_one_line,
    }
}

/// Exponents of `N` in the middle form: the leading power and the power inside
/// the correction bracket. Both are negative for `4 ≤ q ≤ 4.5`.
pub fn middle_form_n_exponents(q: f64) -> (f64, f64) {
    let lead = 0.5 - 57.0 / (17.0 * q) - 2.0 * (q - 4.0) / (q * (q - 2.0));
    let inner = 1.5 - 4.0 / (q - 2.0);
    (lead, inner)
}

/// Bound on `S` as a function of `N`:
///
/// ```text
/// M^{5/2} T^{−1/2} (H²T/M³)^{11/(17q)} (TH/M³)^{1 − 2/q − (q−4)/(q(q−2))}
///   · N^{1/2 − 57/(17q) − 2(q−4)/(q(q−2))}
///   · (1 + (M³/(HT))^{2/(q−2)} T^{1/2} M^{−3/2} N^{3/2 − 4/(q−2)})^{1/q}
/// ```
///
/// The formula is evaluated for any `N > 0`; whether the bound applies is
/// the job of [`condition_n_check`].
pub fn bound_middle_form(h: f64, m: f64, t: f64, q: f64, n: f64) -> Result<f64> {
    check_q(q, "bound_middle_form")?;
    let (lh, lm, lt, ln) = (libm::log(h), libm::log(m), libm::log(t), libm::log(n));
    let (lead, inner) = middle_form_n_exponents(q);
    let e_th = 1.0 - 2.0 / q - (q - 4.0) / (q * (q - 2.0));
    let log_first = 2.5 * lm - 0.5 * lt
        + 11.0 / (17.0 * q) * (2.0 * lh + lt - 3.0 * lm)
        + e_th * (lt + lh - 3.0 * lm)
        + lead * ln;
    let corr = libm::exp(2.0 / (q - 2.0) * (3.0 * lm - lh - lt) + 0.5 * lt - 1.5 * lm + inner * ln);
    Ok(libm::exp(log_first) * libm::pow(1.0 + corr, 1.0 / q))
}

/// The same bound written in `R`, before `R = (M³/(NT))^{1/2}` is substituted:
///
/// `(MR/N) (H/R)^{22/(17q)} (NH/R²)^{1 − 2/q − (q−4)/(q(q−2))} (1 + (R²/(NH))^{2/(q−2)} N/R)^{1/q}`.
pub fn bound_at_q_equals_r(m: f64, h: f64, n: f64, r: f64, q: f64) -> Result<f64> {
    check_q(q, "bound_at_q_equals_r")?;
    let e_nh = 1.0 - 2.0 / q - (q - 4.0) / (q * (q - 2.0));
    let eta = r * r / (n * h);
    let corr = libm::pow(eta, 2.0 / (q - 2.0)) * n / r;
    Ok(m * r / n
        * libm::pow(h / r, 22.0 / (17.0 * q))
        * libm::pow(n * h / (r * r), e_nh)
        * libm::pow(1.0 + corr, 1.0 / q))
}

/// Exponents of the final `S/H` bound: `(H/M)^{a} T^{b} (1 + (H/M)^{c} T^{d})^{1/q}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinalFormExponents {
    pub hm: f64,
    pub t: f64,
    pub corr_hm: f64,
    pub corr_t: f64,
}

pub fn final_form_exponents(q: f64) -> FinalFormExponents {
    let w = (q - 4.0) / (q * (q - 2.0));
    FinalFormExponents {
        hm: -8.0 / 25.0 + 36.0 / (25.0 * q) + 7.0 / 25.0 * w,
        t: 51.0 / 200.0 + 29.0 / (100.0 * q) - w / 50.0,
        corr_hm: 14.0 / (25.0 * (q - 2.0)) - 24.0 / 25.0,
        corr_t: -1.0 / (25.0 * (q - 2.0)) - 47.0 / 200.0,
    }
}

/// Bound on `S/H` with every log power dropped.
pub fn bound_final_form(h: f64, m: f64, t: f64, q: f64) -> Result<f64> {
    check_q(q, "bound_final_form")?;
    let ex = final_form_exponents(q);
    let lhm = libm::log(h / m);
    let lt = libm::log(t);
    let corr = libm::exp(ex.corr_hm * lhm + ex.corr_t * lt);
    Ok(libm::exp(ex.hm * lhm + ex.t * lt) * libm::pow(1.0 + corr, 1.0 / q))
}

/// Ratio `middle(N_A)/H ÷ final` with the Case A `N` including its
/// `(log T)^{969/14000}`: the log power the final form hides.
pub fn hidden_log_factor(h: f64, m: f64, t: f64, q: f64) -> Result<f64> {
    Ok(bound_middle_form(h, m, t, q, n_case_a(h, m, t, true))? / h / bound_final_form(h, m, t, q)?)
}

/// Result of maximising the `S` bound over the `Q` grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QMaximum {
    pub value: f64,
    pub argmax_q: f64,
    pub argmax_index: usize,
}

/// `max_{Q ∈ grid[R, Q₂]} (R/Q)^{3−6/q} (MR/N) (H/R)^{22/(17q)} · G_q(Q)` over
/// `points` geometrically spaced values (`points = 1` evaluates `Q = R` only).
pub fn bw522_rhs<G: Fn(f64) -> Result<f64>>(
    params: &DerivedParams,
    q: f64,
    gq: G,
    points: usize,
) -> Result<QMaximum> {
    check_q(q, "bw522_rhs")?;
    let q2 = match params.q2 {
        Some(q2) if q2 >= params.r && points > 0 => q2,
        _ => return Err(Error::domain("bw522_rhs", "empty Q range: need R ≤ Q₂")),
    };
    let r = params.r;
    let fixed = params.m * r / params.n * libm::pow(params.h / r, 22.0 / (17.0 * q));
    let mut best = QMaximum { value: f64::NEG_INFINITY, argmax_q: r, argmax_index: 0 };
    for i in 0..points {
        let qq = if points == 1 {
            r
        } else {
            r * libm::pow(q2 / r, i as f64 / (points - 1) as f64)
        };
        let v = libm::pow(r / qq, 3.0 - 6.0 / q) * fixed * gq(qq)?;
        if v > best.value {
            best = QMaximum { value: v, argmax_q: qq, argmax_index: i };
        }
    }
    Ok(best)
}

/// [`bw522_rhs`] with the mean-value bound `G_q(K(Q), L(Q), η)` inserted.
pub fn bw522_with_mean_value_bound(params: &DerivedParams, q: f64, points: usize) -> Result<QMaximum> {
    bw522_rhs(
        params,
        q,
        |qq| {
            let (k, l) = params.k_l_at(qq);
            gq_upper_bound(k, l, params.eta, q).map(|b| b.value)
        },
        points,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const T12: f64 = 1e12;

    #[test]
    fn s_examples() {
        let spec = SumSpec::new(1.0, 1.0, 1.0, PhaseFamily::Reciprocal).unwrap();
        let s = eval_s(&spec).value;
        // e(1) + e(1/2) + e(2) + e(1) = 2
        assert!((s - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        let zero = spec.clone().with_weights(Weight::Constant(0.0), Weight::Constant(1.0));
        assert_eq!(eval_s(&zero).value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn s_conjugate_symmetry_and_orders() {
        let spec = SumSpec::new(7.3, 40.0, 5e4, PhaseFamily::ShiftedUp).unwrap();
        let s = eval_s(&spec).value;
        let mirrored = eval_s(&spec.mirrored()).value;
        assert!((mirrored - s.conj()).norm() < 1e-9 * s.norm().max(1.0));
        let by_m = eval_s_ordered(&spec, SummationOrder::MOuter).value;
        assert!((by_m - s).norm() <= 1e-9 * s.norm().max(1.0));
    }

    #[test]
    fn s_weights_are_linear() {
        let table = Weight::Table(vec![1.0, 0.5, -0.25, 0.75]);
        let spec = SumSpec::new(5.0, 30.0, 1e4, PhaseFamily::Reciprocal)
            .unwrap()
            .with_weights(table.clone(), Weight::Constant(1.0));
        let doubled = spec.clone().with_weights(table.scaled(2.0), Weight::Constant(1.0));
        let (a, b) = (eval_s(&spec).value, eval_s(&doubled).value);
        assert!((b - a * 2.0).norm() < 1e-12 * b.norm().max(1.0));
        assert!(eval_s(&spec).value.norm() <= spec.trivial_bound());
    }

    #[test]
    fn precision_flag() {
        let spec = SumSpec::new(1.0, 1.0, 1e17, PhaseFamily::Reciprocal).unwrap();
        assert!(eval_s(&spec).precision_limited());
        let small = SumSpec::new(1.0, 1.0, 10.0, PhaseFamily::Reciprocal).unwrap();
        assert!(!eval_s(&small).precision_limited());
    }

    #[test]
    fn f_condition_examples() {
        let recip = PhaseFamily::Reciprocal;
        let with_c4_11 = ConditionConstants::new([4.0, 4.0, 6.0, 11.0, 3.0], 1.0).unwrap();
        assert!(check_f_conditions(&recip, &with_c4_11));
        let with_c4_10 = ConditionConstants::new([4.0, 4.0, 6.0, 10.0, 3.0], 1.0).unwrap();
        assert!(!check_f_conditions(&recip, &with_c4_10));
        let c3_two = ConditionConstants::new([4.0, 4.0, 2.0, 11.0, 3.0], 1.0).unwrap();
        assert!(!check_f_conditions(&recip, &c3_two));
        let degenerate = ConditionConstants::new([2.0; 5], 1.0).unwrap();
        assert!(!check_f_conditions(&recip, &degenerate));
        assert!(ConditionConstants::new([1.5, 2.0, 2.0, 2.0, 2.0], 1.0).is_err());
        assert!(ConditionConstants::new([2.0; 5], 0.0).is_err());
    }

    #[test]
    fn f_condition_c1_window_for_reciprocal() {
        // |F′| = 1/z² runs over [1/4, 1]
        let m = minimal_constants(&PhaseFamily::Reciprocal);
        assert!((m[0] - 4.0).abs() < 1e-12);
        assert!((m[3] - 64.0 / 6.0).abs() < 1e-9);
    }

    #[test]
    fn default_constants_cover_every_family() {
        let c = ConditionConstants::default();
        for fam in PhaseFamily::all(1e4, 1e9) {
            assert!(check_f_conditions(&fam, &c), "{}", fam.name());
        }
    }

    #[test]
    fn four_four_eight_sixty_four_is_not_enough() {
        let c = ConditionConstants::new([4.0, 4.0, 8.0, 64.0, 3.0], 1.0).unwrap();
        let failing: Vec<_> = PhaseFamily::all(1e4, 1e9)
            .into_iter()
            .filter(|f| !check_f_conditions(f, &c))
            .map(|f| f.name())
            .collect();
        assert_eq!(failing, vec!["1/(z+1/4)", "1/(z-1/4)", "1/(4z)-M/(4T)", "1/(4z)+M/(4T)"]);
    }

    #[test]
    fn classify_examples() {
        let c = ConditionConstants::default();
        let labels = classify_case(10.0, 1e3, 1e6, &c, CaseAGuard::Symmetric);
        assert!(labels.a);
        // H ≤ M T^{−49/164} ≈ 16.1
        assert!(!classify_case(17.0, 1e3, 1e6, &c, CaseAGuard::Symmetric).a);
        assert!(classify_case(16.0, 1e3, 1e6, &c, CaseAGuard::Symmetric).a);
        // M > 3 T^{1/2}
        assert!(!classify_case(1.0, 3.1e3, 1e6, &c, CaseAGuard::Symmetric).b);
    }

    #[test]
    fn literal_guard_is_vacuous() {
        let c = ConditionConstants::default();
        // small M: symmetric guard demands the huge lower bound on H
        let (h, m, t) = (2.0, 1e4, 1e12);
        assert!(!classify_case(h, m, t, &c, CaseAGuard::Symmetric).a);
        assert!(classify_case(h, m, t, &c, CaseAGuard::Literal).a);
    }

    #[test]
    fn derived_block_case_a() {
        let m = libm::pow(T12, 0.45);
        let h = m * libm::pow(T12, -0.32);
        let p = derive_params(h, m, T12, Case::A, &ConditionConstants::default(), CaseAGuard::Symmetric).unwrap();
        assert!(p.ordering_holds(1e-12), "{p:?}");
        assert!((p.eta * p.k * p.l - 1.0).abs() < 1e-12);
        assert!(!p.degenerate);
        assert_eq!(p.q_min, p.r);
        let err = derive_params(h, m, T12, Case::B, &ConditionConstants::default(), CaseAGuard::Symmetric);
        assert_eq!(err.is_err(), !classify_case(h, m, T12, &ConditionConstants::default(), CaseAGuard::Symmetric).b);
    }

    #[test]
    fn degenerate_flag_found_by_scan() {
        // H just above T^{(7θ*−2)/2}; scan M upward until R > H.
        let theta = 0.314_483_175_974_061_4;
        let h = libm::pow(T12, (7.0 * theta - 2.0) / 2.0) * 1.01;
        let c = ConditionConstants::default();
        let mut found = None;
        for i in 0..=200 {
            let m = libm::pow(T12, 0.2 + 0.3 * i as f64 / 200.0);
            for case in [Case::A, Case::B] {
                if let Ok(p) = derive_params(h, m, T12, case, &c, CaseAGuard::Symmetric) {
                    assert_eq!(p.degenerate, p.r > p.h);
                    if p.degenerate && found.is_none() {
                        found = Some(p);
                    }
                }
            }
        }
        assert!(found.is_some());
    }

    #[test]
    fn case_two_examples() {
        let theta = 0.314_483_175_974_061_4;
        let c = ConditionConstants::new([16.0, 16.0, 20.0, 192.0, 3.0], 1.0).unwrap();
        // M = T^{0.425}, H = M T^{−0.32}: in range, first case fails
        let m = libm::pow(T12, 0.425);
        let r = case_two_reduction(m * libm::pow(T12, -0.32), m, T12, theta, &c);
        assert!(r.applies() && r.holds(), "{r:?}");
        // M = T^{0.45} lands in the first case
        let m = libm::pow(T12, 0.45);
        let r = case_two_reduction(m * libm::pow(T12, -0.32), m, T12, theta, &c);
        assert!(r.in_range && r.case_one && !r.applies());
        // H above M T^{−θ}
        assert!(!case_two_reduction(m * libm::pow(T12, -0.3), m, T12, theta, &c).in_range);
    }

    #[test]
    fn simple_bound_examples() {
        let b = simple_bound(10.0, 1e3, 1e6).unwrap();
        assert!((b.full - 1001.0).abs() < 1e-9);
        assert!((b.simplified - 1000.0).abs() < 1e-9);
        // H = M², T = M³ → both are M⁴ up to constants
        let m: f64 = 7.0;
        let s = simple_bound(m * m, m, m * m * m).unwrap();
        assert!((s.simplified - libm::pow(m, 4.0)).abs() < 1e-6 * s.simplified);
        assert!(s.full >= s.simplified && s.full <= 2.0 * s.simplified);
        assert!(simple_bound(1.0, 1e4, 1e6).is_err());
    }

    #[test]
    fn condition_n_examples() {
        // q = 4: N² ≥ margin H²
        assert!(condition_n_check(10.0, 1e3, 1e6, 4.0, 10.0, 1.0).unwrap());
        assert!(!condition_n_check(10.0, 1e3, 1e6, 4.0, 9.99, 1.0).unwrap());
        assert!(condition_n_check(10.0, 1e3, 1e6, 4.0, 20.5, 4.0).unwrap());
        assert!(!condition_n_check(10.0, 1e3, 1e6, 4.25, 1e9, f64::INFINITY).unwrap());
        assert!(condition_n_check(10.0, 1e3, 1e6, 3.9, 10.0, 1.0).is_err());
    }

    #[test]
    fn case_a_substitution_agrees() {
        let theta = 0.314_483_175_974_061_4;
        let m = libm::pow(T12, 0.45);
        for x in [-0.37, -0.35, -0.33, -theta] {
            let h = m * libm::pow(T12, x);
            for q in [4.0, 4.1, 4.2916, 4.5] {
                let n = n_case_a(h, m, T12, true);
                assert_eq!(
                    condition_n_check(h, m, T12, q, n, 1.0).unwrap(),
                    condition_n_case_a(h, m, T12, q, 1.0).unwrap(),
                    "x={x} q={q}"
                );
            }
        }
        let h = m * libm::pow(T12, -theta);
        let q = crate::exponents::q_of_x(-theta).unwrap();
        assert!(condition_n_check(h, m, T12, q, n_case_a(h, m, T12, true), 1.0).unwrap());
    }

    #[test]
    fn middle_form_matches_r_form() {
        let (h, m, t) = (30.0, 2e5, 1e12);
        for q in [4.0, 4.2, 4.5] {
            for n in [50.0, 300.0, 4e3] {
                let r = libm::sqrt(m * m * m / (n * t));
                let a = bound_middle_form(h, m, t, q, n).unwrap();
                let b = bound_at_q_equals_r(m, h, n, r, q).unwrap();
                assert!((a / b - 1.0).abs() < 1e-10, "q={q} n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn middle_form_decreases_in_n() {
        let (h, m, t) = (30.0, 2e5, 1e12);
        for q in [4.0, 4.25, 4.5] {
            for n in [4.0, 100.0, 1e4] {
                assert!(bound_middle_form(h, m, t, q, n / 2.0).unwrap() > bound_middle_form(h, m, t, q, n).unwrap());
            }
            let (lead, inner) = middle_form_n_exponents(q);
            assert!(lead < 0.0 && inner < 0.0);
        }
    }

    #[test]
    fn final_form_is_middle_form_at_case_a_n() {
        let m = libm::pow(T12, 0.45);
        for x in [-0.37, -0.33] {
            let h = m * libm::pow(T12, x);
            for q in [4.0, 4.25, 4.5] {
                let middle = bound_middle_form(h, m, T12, q, n_case_a(h, m, T12, false)).unwrap() / h;
                let fin = bound_final_form(h, m, T12, q).unwrap();
                assert!((middle / fin - 1.0).abs() < 1e-9, "x={x} q={q}");
                let hidden = hidden_log_factor(h, m, T12, q).unwrap();
                let (lead, _) = middle_form_n_exponents(q);
                // the leading N power carries the log into the bound; the bracket
                // adds at most a bounded correction
                let pure = libm::pow(libm::log(T12), 969.0 / 14000.0 * lead);
                assert!(hidden > 0.0 && (hidden / pure - 1.0).abs() < 0.05);
            }
        }
    }

    #[test]
    fn q_four_drops_the_fractional_correction() {
        let ex = final_form_exponents(4.0);
        assert!((ex.hm - 1.0 / 25.0).abs() < 1e-15);
        assert!((ex.t - 131.0 / 400.0).abs() < 1e-15);
        // H = M T^{−3/8}: exponent of T is x·hm + t = 5/16
        assert!((-0.375 * ex.hm + ex.t - 0.3125).abs() < 1e-15);
    }

    #[test]
    fn bw522_examples() {
        // H/R grows like T^{0.68x+0.255}; the Q range is empty until T is huge
        let t = 1e60;
        let m = libm::pow(t, 0.45);
        let h = m * libm::pow(t, -0.32);
        let p = derive_params(h, m, t, Case::A, &ConditionConstants::default(), CaseAGuard::Symmetric).unwrap();
        assert_eq!(bw522_rhs(&p, 4.0, |_| Ok(0.0), 16).unwrap().value, 0.0);
        let single = bw522_rhs(&p, 4.0, |_| Ok(3.0), 1).unwrap();
        // 22/(17q) at q = 4
        let want = p.m * p.r / p.n * libm::pow(p.h / p.r, 11.0 / 34.0) * 3.0;
        assert!((single.value / want - 1.0).abs() < 1e-12);
        for q in [4.0, 4.2, 4.4] {
            let best = bw522_with_mean_value_bound(&p, q, 64).unwrap();
            assert_eq!(best.argmax_index, 0, "q={q}");
        }
        let mut empty = p;
        empty.q2 = Some(p.r * 0.5);
        assert!(bw522_rhs(&empty, 4.0, |_| Ok(1.0), 4).is_err());
    }
}
