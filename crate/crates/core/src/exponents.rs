//! The exponent pipeline: with `H = M·T^x`, the choice
//! `q(x) = 2/(5√((−1−8x)/(2(1−14x))) − 1) + 2`, the two side inequalities
//! that make the bound usable, and the resulting exponent
//!
//! ```text
//! E(x) = −(8/25)x − (1/200)(√(2(1−14x)) − 5√(−1−8x))² + 51/200
//! ```
//!
//! whose fixed point `E(−θ*) = θ*` defines `θ* = 0.31448…`.

use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::Zero;

use crate::numeric::{bisect, exact_rational, rat};
use crate::{Error, Result};

/// Lower end of the admissible `x` range.
pub const X_LO: f64 = -0.375;

/// Bracket for `−θ*`.
pub const BRACKET: (f64, f64) = (-0.35, -0.3);

const DOMAIN_SLACK: f64 = 1e-12;

/// Relative slack for float comparisons that are equalities at an endpoint.
const EDGE_SLACK: f64 = 1e-12;

/// `E(x)`, defined for `x ≤ −1/8`.
pub fn f_of_x(x: f64) -> f64 {
    let b = libm::sqrt(2.0 * (1.0 - 14.0 * x)) - 5.0 * libm::sqrt(-1.0 - 8.0 * x);
    -0.32 * x - b * b / 200.0 + 51.0 / 200.0
}

/// Root of `E(x) + x` on [`BRACKET`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaResult {
    pub theta_star: f64,
    /// `|E(−θ*) − θ*|`.
    pub residual: f64,
    /// Final bracket for `−θ*`.
    pub bracket: (f64, f64),
    pub iterations: u32,
}

/// Plain bisection; `tol ≥ 1e-14` bounds the final bracket width.
pub fn theta_star(tol: f64) -> Result<ThetaResult> {
    if !(tol >= 1e-14) {
        return Err(Error::domain("theta_star", alloc::format!("tol = {tol} is below 1e-14")));
    }
    let g = |x: f64| f_of_x(x) + x;
    let b = bisect(g, BRACKET.0, BRACKET.1, tol / 2.0, 200)?;
    Ok(ThetaResult {
        theta_star: -b.root,
        residual: g(b.root).abs(),
        bracket: (b.lo, b.hi),
        iterations: b.iterations,
    })
}

fn neg_theta() -> f64 {
    -theta_star(1e-14).expect("bracket has a sign change").theta_star
}

fn check_domain(x: f64, what: &'static str) -> Result<()> {
    if !(x >= X_LO - DOMAIN_SLACK && x <= neg_theta() + DOMAIN_SLACK) {
        return Err(Error::domain(what, alloc::format!("x = {x} is outside [−3/8, −θ*]")));
    }
    Ok(())
}

/// `x = −3/8`, where `q = 4` and several forms degenerate.
pub fn is_boundary(x: f64) -> bool {
    x == X_LO
}

fn root_ratio(x: f64) -> f64 {
    libm::sqrt((-1.0 - 8.0 * x) / (2.0 * (1.0 - 14.0 * x)))
}

/// `q(x)`; at `x = −3/8` this is exactly 4.
pub fn q_of_x(x: f64) -> Result<f64> {
    check_domain(x, "q_of_x")?;
    if is_boundary(x) {
        return Ok(4.0);
    }
    Ok(2.0 / (5.0 * root_ratio(x) - 1.0) + 2.0)
}

/// `E(x)` on the admissible range.
pub fn exponent_final(x: f64) -> Result<f64> {
    check_domain(x, "exponent_final")?;
    Ok(f_of_x(x))
}

/// `36x/(25q) + 29/(100q) + ((14x−1)/50)(q−4)/(q(q−2))`.
fn q_part(x: f64, q: f64) -> f64 {
    36.0 * x / (25.0 * q) + 29.0 / (100.0 * q) + (14.0 * x - 1.0) / 50.0 * (q - 4.0) / (q * (q - 2.0))
}

/// `|q-part + (1/200)(√(2(1−14x)) − 5√(−1−8x))²|`.
pub fn algebra_identity(x: f64) -> Result<f64> {
    let q = q_of_x(x)?;
    let b = libm::sqrt(2.0 * (1.0 - 14.0 * x)) - 5.0 * libm::sqrt(-1.0 - 8.0 * x);
    Ok((q_part(x, q) + b * b / 200.0).abs())
}

/// `−(8/25)x + 51/200 + q-part` at `q = q(x)`.
pub fn corollary_exponent(x: f64) -> Result<f64> {
    let q = q_of_x(x)?;
    Ok(-0.32 * x + 51.0 / 200.0 + q_part(x, q))
}

/// Each equivalent form of the first side inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ineq1Report {
    /// `(7x/25 − 1/50)/(41x/25 + 49/100) < (q−2)/(q−4)`.
    pub original: bool,
    /// The same with the right side written `1/(2 − 5√(…))`.
    pub original_radical: bool,
    /// `(7x/25 − 1/50)/(41x/25 + 49/100) − 1 < 2/(q−4)`.
    pub shifted: bool,
    /// `−17(8x+3)/(164x+49) < 2/(q−4)`.
    pub reduced: bool,
}

impl Ineq1Report {
    fn forms(&self) -> [bool; 4] {
        [self.original, self.original_radical, self.shifted, self.reduced]
    }

    pub fn holds(&self) -> bool {
        self.forms().iter().all(|&b| b)
    }

    pub fn consistent(&self) -> bool {
        self.forms().iter().all(|&b| b == self.original)
    }
}

/// At `q = 4` every right side is `+∞`.
pub fn check_ineq_1(x: f64) -> Result<Ineq1Report> {
    let q = q_of_x(x)?;
    let lhs = (0.28 * x - 0.02) / (1.64 * x + 0.49);
    if q == 4.0 {
        return Ok(Ineq1Report { original: true, original_radical: true, shifted: true, reduced: true });
    }
    let radical = 2.0 - 5.0 * root_ratio(x);
    let reduced_lhs = -17.0 * (8.0 * x + 3.0) / (164.0 * x + 49.0);
    Ok(Ineq1Report {
        original: lhs < (q - 2.0) / (q - 4.0),
        original_radical: radical > 0.0 && lhs < 1.0 / radical,
        shifted: lhs - 1.0 < 2.0 / (q - 4.0),
        reduced: reduced_lhs < 2.0 / (q - 4.0),
    })
}

/// Each equivalent form of the second side inequality. The last four are
/// evaluated in exact rational arithmetic at the exact value of `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ineq2Report {
    /// `(24x/25 + 47/200)/(7x/25 − 1/50) ≤ 2/(q−2)`.
    pub original: bool,
    /// `(248x+43)/(56x−4) ≤ 5√((−1−8x)/(2(1−14x)))`.
    pub cleared: bool,
    /// `((248x+43)/(56x−4))² ≤ 25(−1−8x)/(2(1−14x))`.
    pub squared: bool,
    /// `(248x+43)²(1−14x) ≤ 200(−1−8x)(1−14x)²`.
    pub cubic: bool,
    /// `(248x+43)² ≤ 200(−1−8x)(1−14x)`.
    pub quadratic: bool,
    /// `(8x+3)(4888x+683) ≤ 0`.
    pub factored: bool,
}

impl Ineq2Report {
    fn forms(&self) -> [bool; 6] {
        [self.original, self.cleared, self.squared, self.cubic, self.quadratic, self.factored]
    }

    pub fn holds(&self) -> bool {
        self.forms().iter().all(|&b| b)
    }

    pub fn consistent(&self) -> bool {
        self.forms().iter().all(|&b| b == self.factored)
    }
}

fn le_slack(a: f64, b: f64) -> bool {
    a <= b + EDGE_SLACK * a.abs().max(b.abs()).max(1.0)
}

pub fn check_ineq_2(x: f64) -> Result<Ineq2Report> {
    let q = q_of_x(x)?;
    let lhs = (0.96 * x + 0.235) / (0.28 * x - 0.02);
    let cleared_lhs = (248.0 * x + 43.0) / (56.0 * x - 4.0);
    let xr = exact_rational(x)?;
    let c = |n: i64| rat(n, 1);
    let a = c(248) * &xr + c(43);
    let d = c(56) * &xr - c(4);
    let u = c(-1) - c(8) * &xr;
    let v = c(1) - c(14) * &xr;
    let squared = {
        let left = (&a * &a) / (&d * &d);
        let right = c(25) * &u / (c(2) * &v);
        left <= right
    };
    let cubic = &a * &a * &v <= c(200) * &u * &v * &v;
    let quadratic = &a * &a <= c(200) * &u * &v;
    let factored = (c(8) * &xr + c(3)) * (c(4888) * &xr + c(683)) <= BigRational::zero();
    Ok(Ineq2Report {
        original: le_slack(lhs, 2.0 / (q - 2.0)),
        cleared: le_slack(cleared_lhs, 5.0 * root_ratio(x)),
        squared,
        cubic,
        quadratic,
        factored,
    })
}

/// `(248x+43)² − 200(−1−8x)(1−14x) − (8x+3)(4888x+683)`, exactly; zero for every `x`.
pub fn polynomial_identity_defect(x: f64) -> Result<BigRational> {
    let xr = exact_rational(x)?;
    let c = |n: i64| rat(n, 1);
    let a = c(248) * &xr + c(43);
    Ok(&a * &a
        - c(200) * (c(-1) - c(8) * &xr) * (c(1) - c(14) * &xr)
        - (c(8) * &xr + c(3)) * (c(4888) * &xr + c(683)))
}

/// [`polynomial_identity_defect`] is exactly zero.
pub fn polynomial_identity_holds(x: f64) -> Result<bool> {
    Ok(polynomial_identity_defect(x)?.is_zero())
}

/// `E(−3/8)` in exact arithmetic: the bracket is `(√12.5 − 5√2)² = 12.5`, so
/// `E = 3/25 − 1/16 + 51/200 = 5/16`.
pub fn exponent_at_lower_end_exact() -> BigRational {
    let x = rat(-3, 8);
    // √(2(1−14x)) = √12.5 = (5/2)√2 and 5√(−1−8x) = 5√2, so the bracket is
    // ((5/2 − 5)√2)² = (25/4)·2
    let bracket_sq = rat(25, 4) * rat(2, 1);
    debug_assert!(rat(2, 1) * (rat(1, 1) - rat(14, 1) * &x) == rat(25, 4) * rat(2, 1));
    rat(-8, 25) * &x - bracket_sq / rat(200, 1) + rat(51, 200)
}

/// Equally spaced points from `−3/8` to `−θ*`, both included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentGrid {
    pub x_lo: f64,
    pub x_hi: f64,
    pub points: usize,
}

impl ExponentGrid {
    pub fn new(points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::domain("ExponentGrid", "need at least two points"));
        }
        Ok(ExponentGrid { x_lo: X_LO, x_hi: neg_theta(), points })
    }

    pub fn step(&self) -> f64 {
        (self.x_hi - self.x_lo) / (self.points - 1) as f64
    }

    pub fn xs(&self) -> Vec<f64> {
        let mut v: Vec<f64> = (0..self.points).map(|i| self.x_lo + i as f64 * self.step()).collect();
        v[self.points - 1] = self.x_hi;
        v
    }
}

/// One row of the exponent curve against the diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub x: f64,
    pub f: f64,
    pub g: f64,
    pub f_plus_x: f64,
}

/// `points` equally spaced rows over `[lo, hi]`.
pub fn export_curve(lo: f64, hi: f64, points: usize) -> Result<Vec<CurveRow>> {
    if !(lo < hi && hi <= -0.125 && points >= 2) {
        return Err(Error::domain("export_curve", "need lo < hi ≤ −1/8 and at least two points"));
    }
    Ok((0..points)
        .map(|i| {
            let x = if i + 1 == points { hi } else { lo + i as f64 * (hi - lo) / (points - 1) as f64 };
            let f = f_of_x(x);
            CurveRow { x, f, g: -x, f_plus_x: f + x }
        })
        .collect())
}

/// Indices `i` where `f + x` changes sign between rows `i` and `i + 1`.
pub fn sign_changes(rows: &[CurveRow]) -> Vec<usize> {
    rows.windows(2)
        .enumerate()
        .filter(|(_, w)| (w[0].f_plus_x < 0.0) != (w[1].f_plus_x < 0.0))
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_examples() {
        let t = theta_star(1e-14).unwrap();
        assert!((t.theta_star - 0.314_483_175_974_1).abs() < 1e-10);
        assert!(t.residual < 1e-14);
        assert!(f_of_x(-0.35) - 0.35 < 0.0 && f_of_x(-0.3) - 0.3 > 0.0);
        assert!(theta_star(1e-15).is_err());
    }

    #[test]
    fn q_examples() {
        assert_eq!(q_of_x(-0.375).unwrap(), 4.0);
        // the closed form itself lands on 4 up to rounding
        assert!((2.0 / (5.0 * root_ratio(-0.375) - 1.0) + 2.0 - 4.0).abs() < 1e-12);
        let top = q_of_x(neg_theta()).unwrap();
        assert!((4.29..=4.30).contains(&top));
        assert!(q_of_x(-0.4).is_err());
        assert!(q_of_x(-0.3).is_err());
    }

    #[test]
    fn lower_end_is_five_sixteenths() {
        assert_eq!(exponent_at_lower_end_exact(), rat(5, 16));
        assert!((exponent_final(-0.375).unwrap() - 0.3125).abs() < 1e-12);
    }

    #[test]
    fn inequality_examples() {
        let lo = check_ineq_2(-0.375).unwrap();
        assert!(lo.factored && lo.holds() && lo.consistent());
        for x in [neg_theta(), -0.32] {
            let a = check_ineq_1(x).unwrap();
            let b = check_ineq_2(x).unwrap();
            assert!(a.holds() && a.consistent(), "{x}: {a:?}");
            assert!(b.holds() && b.consistent(), "{x}: {b:?}");
        }
    }

    #[test]
    fn polynomial_identity_is_exact() {
        for x in [-0.375, -0.36, -0.33, 0.5, 12.25] {
            assert!(polynomial_identity_defect(x).unwrap().is_zero());
        }
    }

    #[test]
    fn identity_examples() {
        for x in [-0.33, neg_theta(), -0.375, -0.375 + 1e-9] {
            assert!(algebra_identity(x).unwrap() < 1e-9, "{x}");
            assert!((corollary_exponent(x).unwrap() - exponent_final(x).unwrap()).abs() < 1e-9);
        }
        let t = theta_star(1e-14).unwrap().theta_star;
        assert!((corollary_exponent(-t).unwrap() - t).abs() < 1e-9);
    }

    #[test]
    fn curve_crosses_once_at_theta() {
        let rows = export_curve(-0.38, -0.3, 801).unwrap();
        let changes = sign_changes(&rows);
        assert_eq!(changes.len(), 1);
        let i = changes[0];
        let x = neg_theta();
        assert!(rows[i].x <= x && x <= rows[i + 1].x);
        assert!(rows.iter().all(|r| r.g == -r.x));
        assert!(rows[0].f_plus_x < 0.0);
    }

    #[test]
    fn grid_is_inclusive() {
        let g = ExponentGrid::new(11).unwrap();
        let xs = g.xs();
        assert_eq!(xs[0], -0.375);
        assert_eq!(xs[10], neg_theta());
    }
}
