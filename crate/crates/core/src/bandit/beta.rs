//! Beta variates from a ratio of Gamma variates.
//!
//! The exact algorithm, so other implementations can reproduce the same
//! distribution (not the same bits):
//!
//! 1. `Gamma(a)` for `a >= 1` uses Marsaglia and Tsang: with `d = a - 1/3`
//!    and `c = 1 / sqrt(9 d)`, draw `x ~ N(0, 1)` and `u ~ U(0, 1)`, set
//!    `v = (1 + c x)^3`, reject when `v <= 0`, accept when
//!    `ln u < x^2 / 2 + d - d v + d ln v`, returning `d v`.
//! 2. `Gamma(a)` for `a < 1` boosts the shape: `G(a) = G(a + 1) * U^(1/a)`.
//! 3. `Beta(a, b) = X / (X + Y)` with independent `X ~ Gamma(a)`,
//!    `Y ~ Gamma(b)`; `X` is always drawn before `Y`.
//!
//! Everything is carried in log space, `Beta = 1 / (1 + exp(ln Y - ln X))`,
//! so shapes far below one (seeded priors reach `0.005`) never produce `0/0`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn check_shape<F: Scalar>(name: &str, value: F) -> Result<()> {
    if value.is_finite() && value > F::zero() {
        Ok(())
    } else {
        Err(Error::ParameterDomain(format!(
            "{name} must be finite and positive, got {value}"
        )))
    }
}

/// Natural log of one `Gamma(shape, 1)` draw. `shape` must be positive.
pub fn ln_gamma_variate<F: Scalar, R: Rng + ?Sized>(shape: F, rng: &mut R) -> F {
    let one = F::one();
    if shape < one {
        let boosted = ln_gamma_variate(shape + one, rng);
        let u = F::open01(rng);
        return boosted + u.ln() / shape;
    }
    let d = shape - F::of(1.0 / 3.0);
    let c = one / (F::of(9.0) * d).sqrt();
    let half = F::of(0.5);
    loop {
        let x = F::std_normal(rng);
        let t = one + c * x;
        if t <= F::zero() {
            continue;
        }
        let v = t * t * t;
        let u = F::open01(rng);
        let ln_v = v.ln();
        if u.ln() < half * x * x + d - d * v + d * ln_v {
            return d.ln() + ln_v;
        }
    }
}

/// One draw from `Beta(alpha, beta)`.
pub fn beta_sample<F: Scalar, R: Rng + ?Sized>(alpha: F, beta: F, rng: &mut R) -> Result<F> {
    check_shape("alpha", alpha)?;
    check_shape("beta", beta)?;
    Ok(beta_sample_unchecked(alpha, beta, rng))
}

#[inline]
pub(crate) fn beta_sample_unchecked<F: Scalar, R: Rng + ?Sized>(
    alpha: F,
    beta: F,
    rng: &mut R,
) -> F {
    let ln_x = ln_gamma_variate(alpha, rng);
    let ln_y = ln_gamma_variate(beta, rng);
    let z = ln_y - ln_x;
    // exp overflow drives the ratio to exactly zero, which is the right limit
    F::one() / (F::one() + z.exp())
}
