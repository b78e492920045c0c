use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    High,
    Critical,
    Low,
}

impl Regime {
    pub fn of(beta: f64) -> Regime {
        if beta < 1.0 {
            Regime::High
        } else if beta == 1.0 {
            Regime::Critical
        } else {
            Regime::Low
        }
    }
}

/// Nonnegative root of `x = tanh(βx + B)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub beta: f64,
    pub b: f64,
    pub t: f64,
    pub regime: Regime,
    /// `φ'(t) = 1 - β sech²(βt + B)`.
    pub derivative: f64,
}

impl FixedPoint {
    pub fn residual(&self) -> f64 {
        self.t - (self.beta * self.t + self.b).tanh()
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Return whichever end has the smaller residual.
    if f(lo).abs() <= f(hi).abs() {
        lo
    } else {
        hi
    }
}

/// Bracketed bisection on `[0, 1]`. With `B = 0` and `β > 1` the trivial root is
/// divided out and `φ(x)/x` is bisected instead.
pub fn fixed_point(beta: f64, b: f64) -> Result<FixedPoint> {
    if !(b >= 0.0 && b.is_finite() && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("fixed point needs finite beta and B >= 0, got ({beta}, {b})")));
    }
    let phi = |x: f64| x - (beta * x + b).tanh();
    let t = if b == 0.0 && beta <= 1.0 {
        0.0
    } else if b == 0.0 {
        bisect(|x: f64| 1.0 - (beta * x).tanh() / x, f64::MIN_POSITIVE, 1.0)
    } else {
        bisect(phi, 0.0, 1.0)
    };
    let sech = 1.0 / (beta * t + b).cosh();
    Ok(FixedPoint { beta, b, t, regime: Regime::of(beta), derivative: 1.0 - beta * sech * sech })
}
