//! exp(−iHt)v as a Chebyshev series, for long times on real operators.
//!
//! With H = c + r·Ĥ and the spectrum of Ĥ inside [−1, 1],
//!
//! ```text
//! exp(−iHt) = e^{−ict} [ J₀(rt) + 2 Σ_{k≥1} (−i)ᵏ Jₖ(rt) Tₖ(Ĥ) ]
//! ```
//!
//! The series needs about rt + O((rt)^{1/3}) terms. For a real operator the
//! recurrence runs in real arithmetic on the real and imaginary parts of v
//! separately.

use num_complex::Complex64 as C64;

use super::HermitianOp;
use crate::error::{Error, Result};

/// Relative widening of the spectral interval, so rounding never pushes an
/// eigenvalue of Ĥ outside [−1, 1].
const BOUND_MARGIN: f64 = 1e-8;

/// Bessel functions J₀(x) … J_K(x) for x ≥ 0 by Miller's backward recurrence,
/// truncated after the last order with |Jₖ| above `tolerance`.
pub fn bessel_sequence(x: f64, tolerance: f64) -> Vec<f64> {
    if x == 0.0 {
        return vec![1.0];
    }
    let start = (x + 30.0 + 15.0 * x.cbrt()) as usize + 1;
    let start = start + start % 2;
    let mut values = vec![0.0; start + 2];
    values[start] = 1e-300;
    for k in (1..=start).rev() {
        values[k - 1] = 2.0 * k as f64 / x * values[k] - values[k + 1];
        if values[k - 1].abs() > 1e250 {
            values[k - 1..].iter_mut().for_each(|v| *v *= 1e-250);
        }
    }
    // J₀ + 2 Σ J₂ₖ = 1.
    let sum = values[0] + 2.0 * values[2..].iter().step_by(2).sum::<f64>();
    values.iter_mut().for_each(|v| *v /= sum);
    let last = values
        .iter()
        .rposition(|v| v.abs() > tolerance)
        .unwrap_or(0);
    values.truncate(last + 1);
    values
}

/// exp(−iHt)v with 2-norm truncation error below `tolerance`·‖v‖.
///
/// Needs [`HermitianOp::spectral_bounds`].
pub fn chebyshev_evolve<O: HermitianOp + ?Sized>(
    op: &O,
    v: &[C64],
    t: f64,
    tolerance: f64,
) -> Result<Vec<C64>> {
    if v.len() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            found: v.len(),
        });
    }
    let (lo, hi) = op
        .spectral_bounds()
        .ok_or_else(|| Error::invalid("Chebyshev evolution needs spectral bounds for the operator"))?;
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::NonFinite("spectral bounds"));
    }
    let center = 0.5 * (lo + hi);
    let radius = (0.5 * (hi - lo)).max(f64::MIN_POSITIVE) * (1.0 + BOUND_MARGIN) + BOUND_MARGIN;
    // Tail of the series is bounded by 2Σ|Jₖ|, which decays faster than geometrically.
    let coefficients = bessel_sequence(radius * t, 0.1 * tolerance);
    let phase = C64::from_polar(1.0, -center * t);

    let out = if op.is_real() {
        let re: Vec<f64> = v.iter().map(|a| a.re).collect();
        let im: Vec<f64> = v.iter().map(|a| a.im).collect();
        let (re_even, re_odd) = real_series(op, &re, center, radius, &coefficients);
        let (im_even, im_odd) = real_series(op, &im, center, radius, &coefficients);
        // U(x + iy) = (Ex − iOx) + i(Ey − iOy) = (Ex + Oy) + i(Ey − Ox).
        (0..v.len())
            .map(|i| phase * C64::new(re_even[i] + im_odd[i], im_even[i] - re_odd[i]))
            .collect::<Vec<_>>()
    } else {
        complex_series(op, v, center, radius, &coefficients)
            .into_iter()
            .map(|a| phase * a)
            .collect()
    };
    if out.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(Error::NonFinite("Chebyshev evolution"));
    }
    Ok(out)
}

/// Even and odd parts E x = Σ_{k even} cₖ Tₖ x and O x = Σ_{k odd} cₖ Tₖ x,
/// where cₖ = (2 − δₖ₀)·Re or Im of (−i)ᵏ, folded into signs.
fn real_series<O: HermitianOp + ?Sized>(
    op: &O,
    x: &[f64],
    center: f64,
    radius: f64,
    coefficients: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let mut even: Vec<f64> = x.iter().map(|&a| coefficients[0] * a).collect();
    let mut odd = vec![0.0; n];
    if coefficients.len() == 1 || x.iter().all(|&a| a == 0.0) {
        return (even, odd);
    }
    let mut prev = x.to_vec();
    let mut cur = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    op.apply_real_into(&prev, &mut scratch);
    for i in 0..n {
        cur[i] = (scratch[i] - center * prev[i]) / radius;
    }
    for (k, &jk) in coefficients.iter().enumerate().skip(1) {
        if k > 1 {
            op.apply_real_into(&cur, &mut scratch);
            // T_{k} = 2ĤT_{k−1} − T_{k−2}, written over the older vector.
            for i in 0..n {
                prev[i] = 2.0 * (scratch[i] - center * cur[i]) / radius - prev[i];
            }
            std::mem::swap(&mut prev, &mut cur);
        }
        // (−i)ᵏ: 1, −i, −1, i for k mod 4 = 0, 1, 2, 3.
        let sign = if k % 4 < 2 { 2.0 } else { -2.0 };
        let target = if k % 2 == 0 { &mut even } else { &mut odd };
        target
            .iter_mut()
            .zip(&cur)
            .for_each(|(acc, &tk)| *acc += sign * jk * tk);
    }
    (even, odd)
}

fn complex_series<O: HermitianOp + ?Sized>(
    op: &O,
    x: &[C64],
    center: f64,
    radius: f64,
    coefficients: &[f64],
) -> Vec<C64> {
    let n = x.len();
    let mut acc: Vec<C64> = x.iter().map(|&a| a * coefficients[0]).collect();
    if coefficients.len() == 1 {
        return acc;
    }
    let mut prev = x.to_vec();
    let mut cur = vec![C64::new(0.0, 0.0); n];
    let mut scratch = vec![C64::new(0.0, 0.0); n];
    op.apply_into(&prev, &mut scratch);
    for i in 0..n {
        cur[i] = (scratch[i] - prev[i] * center) / radius;
    }
    let powers = [
        C64::new(2.0, 0.0),
        C64::new(0.0, -2.0),
        C64::new(-2.0, 0.0),
        C64::new(0.0, 2.0),
    ];
    for (k, &jk) in coefficients.iter().enumerate().skip(1) {
        if k > 1 {
            op.apply_into(&cur, &mut scratch);
            for i in 0..n {
                prev[i] = (scratch[i] - cur[i] * center) * (2.0 / radius) - prev[i];
            }
            std::mem::swap(&mut prev, &mut cur);
        }
        let c = powers[k % 4] * jk;
        acc.iter_mut().zip(&cur).for_each(|(a, &tk)| *a += c * tk);
    }
    acc
}
