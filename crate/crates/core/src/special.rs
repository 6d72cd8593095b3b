//! Overflow- and cancellation-safe hyperbolic helpers.

use std::f64::consts::LN_2;

/// Above this argument `sinh` is handled in log space.
pub const LOG_SPACE_THRESHOLD: f64 = 20.0;

/// Below this argument `sinh` uses its leading Taylor terms.
pub const TAYLOR_THRESHOLD: f64 = 1e-4;

/// `sinh(x)` for `x ≥ 0`, with the small-argument series `x(1 + x²/6)`.
pub fn sinh_pos(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < TAYLOR_THRESHOLD {
        x * (1.0 + x * x / 6.0)
    } else {
        x.sinh()
    }
}

/// `ln sinh(x)` for `x > 0`. Finite for every finite positive `x`.
pub fn ln_sinh(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x > LOG_SPACE_THRESHOLD {
        x + (-(-2.0 * x).exp()).ln_1p() - LN_2
    } else {
        sinh_pos(x).ln()
    }
}

/// `x coth x`, continuous at `x = 0` where it equals 1.
pub fn x_coth_x(x: f64) -> f64 {
    let a = x.abs();
    if a < TAYLOR_THRESHOLD {
        1.0 + a * a / 3.0
    } else {
        a / a.tanh()
    }
}
