//! Decoupling constant, the `E_4` count bound, the choice of `(β₁, β₂)` and
//! the resulting upper bound for `G_q`.

use crate::{Error, Result};

/// ε-power used when a bound is compared against data.
pub const DEFAULT_EPS: f64 = 0.05;

/// A bound `value · base^ε`, with the ε-power kept separate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub value: f64,
    pub eps_base: f64,
}

impl Bound {
    pub fn with_eps(&self, eps: f64) -> f64 {
        self.value * libm::pow(self.eps_base, eps)
    }
}

/// The three terms of the decoupling constant and its two-term form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decoupling {
    pub terms: [f64; 3],
}

impl Decoupling {
    pub fn full(&self) -> f64 {
        self.terms.iter().sum()
    }

    /// The first two terms; for `q ≥ 4` the third never exceeds the second.
    pub fn simplified(&self) -> f64 {
        self.terms[0] + self.terms[1]
    }
}

/// `η^{−β(1/2−1/q)} + η^{−β(1−2/q)+1/q} + η^{−(β−1/2)(1−2/q)}` with `β = β₁ + β₂`.
pub fn decoupling_d(beta1: f64, beta2: f64, q: f64, eta: f64) -> Decoupling {
    let b = beta1 + beta2;
    Decoupling {
        terms: [
            libm::pow(eta, -b * (0.5 - 1.0 / q)),
            libm::pow(eta, -b * (1.0 - 2.0 / q) + 1.0 / q),
            libm::pow(eta, -(b - 0.5) * (1.0 - 2.0 / q)),
        ],
    }
}

/// `K^{1/4} L^{1/4} (η^{2(β₁+β₂)}K²L + η^{2β₁}K² + η^{2β₂}L²)^{1/4}`, ε-base `K`.
pub fn e4_bound(k: f64, l: f64, eta: f64, beta1: f64, beta2: f64) -> Bound {
    Bound {
        value: libm::pow(k * l * e4_bracket(k, l, eta, beta1, beta2), 0.25),
        eps_base: k,
    }
}

pub(crate) fn e4_bracket(k: f64, l: f64, eta: f64, beta1: f64, beta2: f64) -> f64 {
    libm::pow(eta, 2.0 * (beta1 + beta2)) * k * k * l
        + libm::pow(eta, 2.0 * beta1) * k * k
        + libm::pow(eta, 2.0 * beta2) * l * l
}

/// `(β₁, β₂)` with `β₁ + β₂ = 2/(q−2)` and `η^{β₁}K = η^{β₂}L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Betas {
    pub beta1: f64,
    pub beta2: f64,
}

impl Betas {
    pub fn sum(&self) -> f64 {
        self.beta1 + self.beta2
    }
}

/// Requires `q ≥ 4`, `0 < η < 1`, `L ≤ K`, and for `q > 4`
/// `(L/K)^{(q−2)/(q−4)} ≤ η`, which is `β₁ ≥ 1/2`.
pub fn betas_solve(k: f64, l: f64, eta: f64, q: f64) -> Result<Betas> {
    if !(q >= 4.0) {
        return Err(Error::domain("betas_solve", alloc::format!("q = {q} < 4")));
    }
    if !(eta > 0.0 && eta < 1.0) || !(l > 0.0 && l <= k) {
        return Err(Error::domain("betas_solve", "need 0 < η < 1 and 0 < L ≤ K"));
    }
    let ln_eta = libm::log(eta);
    if q > 4.0 {
        let lhs = (q - 2.0) / (q - 4.0) * libm::log(l / k);
        if lhs > ln_eta + 1e-12 * ln_eta.abs() {
            return Err(Error::domain(
                "betas_solve",
                alloc::format!("(L/K)^((q-2)/(q-4)) ≤ η fails: {} > {eta}", libm::exp(lhs)),
            ));
        }
    }
    let beta = 2.0 / (q - 2.0);
    let beta1 = (beta / 2.0 + libm::log(l / k) / (2.0 * ln_eta)).max(0.5);
    let betas = Betas { beta1, beta2: beta - beta1 };
    let product = libm::pow(eta, beta) * k * l;
    if product < 1.0 - 1e-12 {
        return Err(Error::domain("betas_solve", alloc::format!("η^β K L = {product} < 1")));
    }
    Ok(betas)
}

/// `η^{(q−4)/(q(q−2))} (KL)^{1−2/q} (1 + η^{2/(q−2)}K)^{1/q}`, ε-base `1/η`.
///
/// For `q > 4` the assumption of [`betas_solve`] is enforced.
pub fn gq_upper_bound(k: f64, l: f64, eta: f64, q: f64) -> Result<Bound> {
    if q > 4.0 {
        betas_solve(k, l, eta, q)?;
    } else if q < 4.0 {
        return Err(Error::domain("gq_upper_bound", alloc::format!("q = {q} < 4")));
    }
    let value = libm::pow(eta, (q - 4.0) / (q * (q - 2.0)))
        * libm::pow(k * l, 1.0 - 2.0 / q)
        * libm::pow(1.0 + libm::pow(eta, 2.0 / (q - 2.0)) * k, 1.0 / q);
    Ok(Bound { value, eps_base: 1.0 / eta })
}

/// `D · (η^{β}KL)^{1−4/q} · E_4^{4/q}` at the [`betas_solve`] choice, ε-powers dropped.
///
/// Equals `2((2 + η^{β}K)/(1 + η^{β}K))^{1/q}` times [`gq_upper_bound`].
pub fn interpolated_gq(k: f64, l: f64, eta: f64, q: f64) -> Result<f64> {
    let b = betas_solve(k, l, eta, q)?;
    let d = decoupling_d(b.beta1, b.beta2, q, eta).simplified();
    let e4 = e4_bound(k, l, eta, b.beta1, b.beta2).value;
    Ok(d * libm::pow(libm::pow(eta, b.sum()) * k * l, 1.0 - 4.0 / q) * libm::pow(e4, 4.0 / q))
}
