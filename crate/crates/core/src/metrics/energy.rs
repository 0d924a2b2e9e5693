//! Load-capacitor energy.

use crate::engine::ColumnTrace;

/// Energy drawn from the reset supply to restore one column:
/// `C · v_reset · ΔV_total`.
pub fn column_energy(capacitance: f64, v_reset: f64, total_excursion: f64) -> f64 {
    capacitance * v_reset * total_excursion
}

/// Summed energy of a set of columns.
pub fn capacitor_energy(traces: &[ColumnTrace], v_reset: f64) -> f64 {
    traces
        .iter()
        .map(|t| column_energy(t.capacitance, v_reset, t.total_excursion(v_reset)))
        .sum()
}
