//! Airy function Ai on [−40, 40].
//!
//! Right of x = 12 the large-x asymptotic series is summed directly. The
//! series also seeds Ai and Ai′ at 12, from where the ODE Ai″ = x·Ai is
//! carried leftwards by Taylor steps of length 1/4 down to −40; the knot
//! values are cached and any x is reached by one short Taylor step from
//! the nearest knot. Leftward propagation damps the Bi component, so
//! relative accuracy of the seed is preserved.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const AIRY_MIN: f64 = -40.0;
pub const AIRY_MAX: f64 = 40.0;
const ANCHOR: f64 = 12.0;
const KNOT_STEP: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AiryValues {
    pub x: f64,
    pub ai: f64,
    pub ai_prime: f64,
}

impl AiryValues {
    /// Ai″ implied by the ODE.
    pub fn ai_second(&self) -> f64 {
        self.x * self.ai
    }
}

/// Ai(x) and Ai′(x) for x in [−40, 40].
pub fn airy(x: f64) -> Result<AiryValues> {
    if !(AIRY_MIN..=AIRY_MAX).contains(&x) {
        return Err(Error::input(format!("Airy argument {x} outside [{AIRY_MIN}, {AIRY_MAX}]")));
    }
    Ok(airy_unbounded(x))
}

/// Same as [`airy`] but without the upper bound: beyond 40 the asymptotic
/// series keeps working until it underflows to zero. Used by kernels on
/// semi-infinite domains. Panics below −40.
pub(crate) fn airy_unbounded(x: f64) -> AiryValues {
    assert!(x >= AIRY_MIN, "Airy argument below {AIRY_MIN}");
    if x >= ANCHOR {
        let (ai, ai_prime) = asymptotic(x, usize::MAX);
        return AiryValues { x, ai, ai_prime };
    }
    let knots = knots();
    let idx = (((ANCHOR - x) / KNOT_STEP).round() as usize).min(knots.len() - 1);
    let x0 = ANCHOR - idx as f64 * KNOT_STEP;
    let (ai, ai_prime) = taylor_step(x0, knots[idx].0, knots[idx].1, x - x0);
    AiryValues { x, ai, ai_prime }
}

/// Ai and Ai′ from the asymptotic series
/// Ai ~ e^{−ζ}/(2√π x^{1/4}) Σ(−1)^k u_k ζ^{−k}, ζ = (2/3)x^{3/2}, summed up
/// to the smallest term or `max_terms` corrections.
pub(crate) fn asymptotic(x: f64, max_terms: usize) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let pre = (-zeta).exp() / (2.0 * std::f64::consts::PI.sqrt());
    let mut u = 1.0;
    let mut su = 1.0;
    let mut sv = 1.0;
    let mut last = f64::INFINITY;
    let mut k = 1usize;
    while k <= max_terms && k < 60 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        let term = u / zeta.powi(k as i32);
        if term >= last || term < 1e-18 {
            break;
        }
        last = term;
        let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
        su += sign * term;
        sv += sign * v / zeta.powi(k as i32);
        k += 1;
    }
    (pre * su / x.powf(0.25), -pre * x.powf(0.25) * sv)
}

/// Taylor expansion of the ODE solution with data (y, y′) at x0, evaluated
/// at x0 + h.
fn taylor_step(x0: f64, y: f64, dy: f64, h: f64) -> (f64, f64) {
    if h == 0.0 {
        return (y, dy);
    }
    // a_{k+2} = (x0·a_k + a_{k−1}) / ((k+2)(k+1))
    let mut a = [y, dy, 0.5 * x0 * y];
    let mut hp = h * h;
    let mut val = y + dy * h + a[2] * hp;
    let mut der = dy + 2.0 * a[2] * h;
    let scale = y.abs() + dy.abs();
    for k in 3..80 {
        let kf = k as f64;
        let next = (x0 * a[1] + a[0]) / (kf * (kf - 1.0));
        der += kf * next * hp;
        hp *= h;
        val += next * hp;
        a = [a[1], a[2], next];
        if k > 6 && (next * hp).abs() <= 1e-18 * scale && (a[1] * hp / h).abs() <= 1e-18 * scale {
            break;
        }
    }
    (val, der)
}

fn knots() -> &'static [(f64, f64)] {
    static KNOTS: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    KNOTS.get_or_init(|| {
        let count = ((ANCHOR - AIRY_MIN) / KNOT_STEP).round() as usize;
        let mut out = Vec::with_capacity(count + 1);
        let mut cur = asymptotic(ANCHOR, usize::MAX);
        out.push(cur);
        for i in 0..count {
            let x0 = ANCHOR - i as f64 * KNOT_STEP;
            cur = taylor_step(x0, cur.0, cur.1, -KNOT_STEP);
            out.push(cur);
        }
        out
    })
}
