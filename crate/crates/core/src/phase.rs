//! The five phase functions that arise when the circle and divisor sawtooth
//! sums are cut into dyadic pieces, with closed-form derivatives.

/// A phase function `F` on `[1, 2]`.
///
/// The two quarter families carry their constant offset `M/(4T)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseFamily {
    /// `1/z`
    Reciprocal,
    /// `1/(z + 1/4)`
    ShiftedUp,
    /// `1/(z − 1/4)`
    ShiftedDown,
    /// `1/(4z) − offset`
    QuarterMinus { offset: f64 },
    /// `1/(4z) + offset`
    QuarterPlus { offset: f64 },
}

impl PhaseFamily {
    /// `1/(4z) − M/(4T)`.
    pub fn quarter_minus(m: f64, t: f64) -> Self {
        PhaseFamily::QuarterMinus { offset: m / (4.0 * t) }
    }

    /// `1/(4z) + M/(4T)`.
    pub fn quarter_plus(m: f64, t: f64) -> Self {
        PhaseFamily::QuarterPlus { offset: m / (4.0 * t) }
    }

    /// All five families for given `M`, `T`.
    pub fn all(m: f64, t: f64) -> [PhaseFamily; 5] {
        [
            PhaseFamily::Reciprocal,
            PhaseFamily::ShiftedUp,
            PhaseFamily::ShiftedDown,
            PhaseFamily::quarter_minus(m, t),
            PhaseFamily::quarter_plus(m, t),
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            PhaseFamily::Reciprocal => "1/z",
            PhaseFamily::ShiftedUp => "1/(z+1/4)",
            PhaseFamily::ShiftedDown => "1/(z-1/4)",
            PhaseFamily::QuarterMinus { .. } => "1/(4z)-M/(4T)",
            PhaseFamily::QuarterPlus { .. } => "1/(4z)+M/(4T)",
        }
    }

    // F = scale / (z + shift) + constant
    fn shape(&self) -> (f64, f64, f64) {
        match *self {
            PhaseFamily::Reciprocal => (1.0, 0.0, 0.0),
            PhaseFamily::ShiftedUp => (1.0, 0.25, 0.0),
            PhaseFamily::ShiftedDown => (1.0, -0.25, 0.0),
            PhaseFamily::QuarterMinus { offset } => (0.25, 0.0, -offset),
            PhaseFamily::QuarterPlus { offset } => (0.25, 0.0, offset),
        }
    }

    /// `F(z)`.
    pub fn value(&self, z: f64) -> f64 {
        let (a, s, c) = self.shape();
        a / (z + s) + c
    }

    /// `F^{(order)}(z)` for `order ≤ 3`; `order = 0` is the value.
    pub fn derivative(&self, order: u32, z: f64) -> f64 {
        let (a, s, _) = self.shape();
        let w = z + s;
        match order {
            0 => self.value(z),
            1 => -a / (w * w),
            2 => 2.0 * a / (w * w * w),
            3 => -6.0 * a / (w * w * w * w),
            _ => panic!("derivatives above order 3 are not provided"),
        }
    }

    /// `F′F‴ − 3(F″)²`.
    pub fn curvature_form(&self, z: f64) -> f64 {
        let d1 = self.derivative(1, z);
        let d2 = self.derivative(2, z);
        let d3 = self.derivative(3, z);
        d1 * d3 - 3.0 * d2 * d2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn central_difference(f: impl Fn(f64) -> f64, z: f64, h: f64) -> f64 {
        (f(z + h) - f(z - h)) / (2.0 * h)
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for fam in PhaseFamily::all(1e3, 1e6) {
            for i in 0..=100 {
                let z = 1.0 + i as f64 / 100.0;
                for order in 1..=3 {
                    let analytic = fam.derivative(order, z);
                    let numeric = central_difference(|w| fam.derivative(order - 1, w), z, 1e-5);
                    let rel = ((analytic - numeric) / analytic).abs();
                    assert!(rel < 1e-6, "{} order {order} at {z}: {rel}", fam.name());
                }
            }
        }
    }

    #[test]
    fn reciprocal_curvature_closed_form() {
        for i in 0..=10 {
            let z = 1.0 + i as f64 / 10.0;
            let want = -6.0 / libm::pow(z, 6.0);
            assert!((PhaseFamily::Reciprocal.curvature_form(z) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn quarter_offsets() {
        let f = PhaseFamily::quarter_minus(10.0, 1000.0);
        assert!((f.value(1.0) - (0.25 - 0.0025)).abs() < 1e-15);
        let g = PhaseFamily::quarter_plus(10.0, 1000.0);
        assert!((g.value(2.0) - (0.125 + 0.0025)).abs() < 1e-15);
    }
}
