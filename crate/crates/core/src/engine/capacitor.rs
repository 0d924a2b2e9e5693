use super::design::DesignPoint;
use crate::error::{Error, Result};

/// Load capacitance that holds `max_current_scale · M · i_max` for one
/// window within the output swing.
pub fn size_capacitor(dp: &DesignPoint, i_max: f64) -> Result<f64> {
    capacitance_for(dp.m_rows, i_max, dp.t_window, dp.swing(), dp.max_current_scale)
}

pub fn capacitance_for(m_rows: usize, i_max: f64, t_window: f64, swing: f64, scale: f64) -> Result<f64> {
    if !(swing > 0.0) {
        return Err(Error::config(format!("output swing must be > 0, got {swing}")));
    }
    if !(i_max > 0.0 && t_window > 0.0 && scale > 0.0) {
        return Err(Error::config("capacitor sizing needs positive i_max, T and scale"));
    }
    Ok(scale * m_rows as f64 * i_max * t_window / swing)
}
