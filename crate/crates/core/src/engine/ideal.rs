//! Closed-form output of the protocol with ideal (voltage-independent)
//! current sinks.
//!
//! With `I_i = i_min + w_i (i_max − i_min)` and `y = (1/M) Σ w_i x_i`:
//!
//! ```text
//! t_out = T · (a·y + b),   a = (i_max − i_min) / i_max,   b = i_min Σ x_i / (M · i_max)
//! ```
//!
//! When the capacitor and the phase-II current are both scaled by `K`
//! (`max_current_scale`), the output becomes `T · (a·y + b) / K`, saturating
//! at `T`.

use crate::device::CurrentRange;
use crate::error::{Error, Result};

/// `a·y + b` for one column, before the `T` factor and full-scale division.
fn normalized(weights: &[f64], x: &[f64], range: &CurrentRange) -> f64 {
    let m = x.len() as f64;
    let y = weights.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() / m;
    let b = range.i_min / (m * range.i_max) * x.iter().sum::<f64>();
    range.gain() * y + b
}

/// Ideal output pulse width for one column.
pub fn ideal_output(weights: &[f64], x: &[f64], range: &CurrentRange, t_window: f64) -> Result<f64> {
    ideal_output_scaled(weights, x, range, t_window, 1.0)
}

/// Ideal output pulse width with a reduced full-scale current.
pub fn ideal_output_scaled(
    weights: &[f64],
    x: &[f64],
    range: &CurrentRange,
    t_window: f64,
    scale: f64,
) -> Result<f64> {
    if weights.len() != x.len() || x.is_empty() {
        return Err(Error::contract("weights and inputs must have equal, non-zero length"));
    }
    Ok((t_window * normalized(weights, x, range) / scale).min(t_window))
}

/// Ideal signed differential output `t⁺ − t⁻ = a·T·(y⁺ − y⁻) / scale`. The
/// additive term `b` cancels. No saturation is applied: this is the value
/// the array is meant to compute.
pub fn ideal_differential(
    w_pos: &[f64],
    w_neg: &[f64],
    x: &[f64],
    range: &CurrentRange,
    t_window: f64,
    scale: f64,
) -> Result<f64> {
    if w_pos.len() != x.len() || w_neg.len() != x.len() || x.is_empty() {
        return Err(Error::contract("weights and inputs must have equal, non-zero length"));
    }
    Ok(t_window * (normalized(w_pos, x, range) - normalized(w_neg, x, range)) / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn table_gain() {
        let r = CurrentRange::new(25.8e-9, 136.9e-9).unwrap();
        assert_relative_eq!(r.gain(), 0.811_541_271_000_730_5, max_relative = 1e-12);
    }

    #[test]
    fn zero_minimum_current_is_ideal() {
        let r = CurrentRange::new(0.0, 1e-7).unwrap();
        let w = [0.2, 0.9, 0.5];
        let x = [1.0, 0.3, 0.6];
        let y = (0.2 + 0.27 + 0.3) / 3.0;
        assert_relative_eq!(ideal_output(&w, &x, &r, 16e-9).unwrap(), y * 16e-9, max_relative = 1e-12);
    }

    #[test]
    fn all_ones_fill_the_window() {
        let r = CurrentRange::new(25.8e-9, 136.9e-9).unwrap();
        let ones = [1.0; 7];
        assert_relative_eq!(ideal_output(&ones, &ones, &r, 32e-9).unwrap(), 32e-9, max_relative = 1e-12);
    }

    #[test]
    fn differential_cancels_additive_term() {
        let r = CurrentRange::new(30e-9, 120e-9).unwrap();
        let x = [0.5, 0.25, 1.0, 0.0];
        let wp = [0.9, 0.1, 0.4, 0.7];
        let wn = [0.3, 0.6, 0.2, 0.0];
        let want = r.gain() * 16e-9 * (0.3 - 0.125 + 0.2) / 4.0;
        assert_relative_eq!(
            ideal_differential(&wp, &wn, &x, &r, 16e-9, 1.0).unwrap(),
            want,
            max_relative = 1e-12
        );
    }

    #[test]
    fn differential_is_not_clipped() {
        let r = CurrentRange::new(25.8e-9, 136.9e-9).unwrap();
        let ones = [1.0; 4];
        let zeros = [0.0; 4];
        let t = ideal_differential(&ones, &zeros, &ones, &r, 16e-9, 0.5).unwrap();
        assert_relative_eq!(t, 2.0 * r.gain() * 16e-9, max_relative = 1e-12);
    }

    #[test]
    fn reduced_scale_saturates() {
        let r = CurrentRange::new(25.8e-9, 136.9e-9).unwrap();
        let ones = [1.0; 4];
        assert_eq!(ideal_output_scaled(&ones, &ones, &r, 16e-9, 0.5).unwrap(), 16e-9);
    }
}
