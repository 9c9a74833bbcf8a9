//! Circle and divisor error terms.
//!
//! `R(X) = #{(m, n) ∈ ℤ² : m² + n² ≤ X} − πX` and
//! `Δ(X) = Σ_{n≤X} d(n) − X ln X − (2γ − 1)X`.
//!
//! Integer parts are exact (`u128`, checked arithmetic, exact integer square
//! roots). Main terms are `f64`.

use alloc::vec;
use alloc::vec::Vec;

use crate::numeric::{EULER_GAMMA, PI, TAU};
use crate::{Error, Result};

/// Which lattice problem an error term belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Problem {
    Circle,
    Divisor,
}

/// One evaluated error term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSample {
    pub x: u64,
    /// Lattice count or divisor sum.
    pub exact: u128,
    pub main_term: f64,
    /// `exact − main_term`.
    pub error: f64,
}

/// `Σ_{n≤X} d(n)` via `2·Σ_{m≤⌊√X⌋} ⌊X/m⌋ − ⌊√X⌋²`.
pub fn divisor_sum(x: u64) -> Result<u128> {
    if x == 0 {
        return Err(Error::domain("divisor_sum", "X must be at least 1"));
    }
    let y = x.isqrt();
    let mut acc: u128 = 0;
    for m in 1..=y {
        acc = acc
            .checked_add(u128::from(x / m))
            .ok_or(Error::Overflow("divisor_sum"))?;
    }
    let y = u128::from(y);
    acc.checked_mul(2)
        .and_then(|s| s.checked_sub(y * y))
        .ok_or(Error::Overflow("divisor_sum"))
}

/// `#{(m, n) ∈ ℤ² : m² + n² ≤ X}` by rows: for each `m`, `2⌊√(X − m²)⌋ + 1` points.
pub fn lattice_count(x: u64) -> Result<u128> {
    let y = x.isqrt();
    let mut acc: u128 = 2 * u128::from(y) + 1;
    for m in 1..=y {
        let row = 2 * u128::from((x - m * m).isqrt()) + 1;
        acc = acc
            .checked_add(2 * row)
            .ok_or(Error::Overflow("lattice_count"))?;
    }
    Ok(acc)
}

/// `X ln X + (2γ − 1)X`.
pub fn divisor_main_term(x: u64) -> f64 {
    let xf = x as f64;
    xf * libm::log(xf) + (2.0 * EULER_GAMMA - 1.0) * xf
}

/// `πX`.
pub fn circle_main_term(x: u64) -> f64 {
    PI * x as f64
}

/// `Δ(X)`; needs `X ≥ 1`.
pub fn delta(x: u64) -> Result<f64> {
    Ok(sample(Problem::Divisor, x)?.error)
}

/// `R(X)`.
pub fn r_error(x: u64) -> Result<f64> {
    Ok(sample(Problem::Circle, x)?.error)
}

pub fn sample(problem: Problem, x: u64) -> Result<ErrorSample> {
    let (exact, main_term) = match problem {
        Problem::Divisor => (divisor_sum(x)?, divisor_main_term(x)),
        Problem::Circle => (lattice_count(x)?, circle_main_term(x)),
    };
    Ok(ErrorSample {
        x,
        exact,
        main_term,
        error: exact as f64 - main_term,
    })
}

/// Sawtooth `ψ(t) = {t} − 1/2`.
#[inline]
pub fn psi(t: f64) -> f64 {
    (t - libm::floor(t)) - 0.5
}

/// `ψ(num/den)` computed from the integer remainder, so exact hits on
/// integers are never blurred by division rounding.
#[inline]
fn psi_ratio(num: i128, den: i128) -> f64 {
    num.rem_euclid(den) as f64 / den as f64 - 0.5
}

/// Truncation length `Y` of the Fourier expansion of `ψ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SawtoothConfig {
    y: f64,
}

impl SawtoothConfig {
    pub fn new(y: f64) -> Result<Self> {
        if !y.is_finite() || y < 1.0 {
            return Err(Error::domain("SawtoothConfig", "Y must be finite and at least 1"));
        }
        Ok(SawtoothConfig { y })
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

/// Truncated Fourier series `−Σ_{1≤h≤Y} sin(2πht)/(πh)`, i.e. `−Im Σ e(ht)/(πh)`.
///
/// Residual against [`psi`] is `O(1/(1 + ‖t‖Y))`.
pub fn psi_truncated(t: f64, cfg: SawtoothConfig) -> f64 {
    let base = t - libm::floor(t);
    let terms = libm::floor(cfg.y) as u64;
    let mut acc = 0.0;
    for h in 1..=terms {
        let phase = (h as f64 * base) % 1.0;
        acc += libm::sin(TAU * phase) / (PI * h as f64);
    }
    -acc
}

/// Which recomposition of the circle error term to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CircleForm {
    /// Four sums, each over `1 ≤ m ≤ √X`, with the `X/(4m) − 1/4` sum
    /// appearing twice with opposite signs, so the bracket's last two
    /// terms cancel.
    Cancelling,
    /// `χ₄`-hyperbola form: `4m ± 1 ≤ √X` in the first two sums, and the last
    /// pair uses offsets `−1/4` and `+1/4`.
    #[default]
    Corrected,
}

/// Error term rebuilt from sawtooth sums. Differs from the exact error term
/// by a bounded amount.
///
/// * divisor: `−2 Σ_{m≤√X} ψ(X/m)`
/// * circle: `−4[Σψ(X/(4m+1)) − Σψ(X/(4m−1)) + Σψ(X/(4m) − 1/4) − Σψ(X/(4m) ± 1/4)]`
pub fn error_via_sawtooth(problem: Problem, x: u64, form: CircleForm) -> Result<f64> {
    if x == 0 {
        return Err(Error::domain("error_via_sawtooth", "X must be at least 1"));
    }
    let y = x.isqrt() as i128;
    let xi = x as i128;
    match problem {
        Problem::Divisor => Ok(-2.0 * (1..=y).map(|m| psi_ratio(xi, m)).sum::<f64>()),
        Problem::Circle => {
            let bracket = match form {
                CircleForm::Cancelling => {
                    let mut acc = 0.0;
                    for m in 1..=y {
                        acc += psi_ratio(xi, 4 * m + 1) - psi_ratio(xi, 4 * m - 1);
                        // ψ(X/(4m) − 1/4) = ψ((X − m)/(4m)), twice with opposite signs
                        acc += psi_ratio(xi - m, 4 * m) - psi_ratio(xi - m, 4 * m);
                    }
                    acc
                }
                CircleForm::Corrected => {
                    let mut acc = 0.0;
                    let mut d = 1;
                    while d <= y {
                        acc += psi_ratio(xi, d);
                        d += 4;
                    }
                    let mut d = 3;
                    while d <= y {
                        acc -= psi_ratio(xi, d);
                        d += 4;
                    }
                    for m in 1..=y {
                        acc += psi_ratio(xi - m, 4 * m) - psi_ratio(xi + m, 4 * m);
                    }
                    acc
                }
            };
            Ok(-4.0 * bracket)
        }
    }
}

/// Direct-enumeration tables, independent of the hyperbola and row methods.
pub mod enumerate {
    use super::*;

    /// `Σ_{n≤X} d(n)` for every `X ≤ n_max`, from a divisor sieve.
    pub fn divisor_sums_upto(n_max: usize) -> Vec<u64> {
        let mut d = vec![0u32; n_max + 1];
        for i in 1..=n_max {
            let mut j = i;
            while j <= n_max {
                d[j] += 1;
                j += i;
            }
        }
        let mut out = vec![0u64; n_max + 1];
        let mut acc = 0u64;
        for (i, di) in d.iter().enumerate() {
            acc += u64::from(*di);
            out[i] = acc;
        }
        out
    }

    /// Lattice count for every `X ≤ n_max`, by visiting each point of the
    /// enclosing square.
    pub fn lattice_counts_upto(n_max: usize) -> Vec<u64> {
        let r = (n_max as u64).isqrt() as i64;
        let mut hits = vec![0u64; n_max + 1];
        for m in -r..=r {
            for n in -r..=r {
                let s = (m * m + n * n) as usize;
                if s <= n_max {
                    hits[s] += 1;
                }
            }
        }
        let mut acc = 0;
        for h in hits.iter_mut() {
            acc += *h;
            *h = acc;
        }
        hits
    }
}
