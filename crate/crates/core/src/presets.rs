//! Named design points and sweep grids.
//!
//! The device blocks follow the operating conditions of the reference design
//! space exploration: a low gate drive (0.3 V) with a 2.5 kΩ on-state and a
//! high drive (0.5 V) with a 250 kΩ on-state, each at 120 nm and 240 nm gates.

use crate::device::{CellTopology, ContourSpec};
use crate::engine::DesignPoint;
use crate::metrics::{SweepGrid, SweepVar};

/// Gate-drive boundary between the low- and high-drive device windows.
pub const HIGH_DRIVE_THRESHOLD: f64 = 0.4;
/// Gate-drain coupling used by the exploration presets (F).
pub const TABLE1_COUPLING: f64 = 0.2e-15;

/// Column voltage at which the fixed-calibration presets program weights (V).
pub const NOMINAL_READ_POINT: f64 = 0.8;

pub const NAMES: [&str; 4] = ["table1", "fig5-swing", "fig8-lowcurrent", "contour-fig3"];

/// `(r_on, r_off)` of the RRAM window paired with a gate drive and length.
pub fn rram_window(v_gate: f64, l_gate: f64) -> (f64, f64) {
    let long = l_gate > 180e-9;
    match (v_gate >= HIGH_DRIVE_THRESHOLD, long) {
        (false, false) => (2.5e3, 2.5e6),
        (false, true) => (2.5e3, 10e6),
        (true, false) => (250e3, 2.25e6),
        (true, true) => (250e3, 2.375e6),
    }
}

/// Sets the gate drive together with its RRAM window.
pub fn apply_drive(dp: &mut DesignPoint, v_gate: f64) {
    dp.v_gate_on = v_gate;
    let (r_on, r_off) = rram_window(v_gate, dp.cell.mosfet.l_gate);
    dp.cell.rram.r_on = r_on;
    dp.cell.rram.r_off = r_off;
    dp.cell.rram.r0 = r_on;
}

/// Low- or high-drive device block at a gate length.
pub fn device_block(v_gate: f64, l_gate: f64) -> DesignPoint {
    let mut dp = DesignPoint::default();
    dp.cell.mosfet.l_gate = l_gate;
    apply_drive(&mut dp, v_gate);
    dp
}

/// Base point of the exploration grid: 0.3 V, 120 nm, β = 4, 16 ns,
/// with gate-drain coupling enabled.
pub fn table1() -> DesignPoint {
    let mut dp = device_block(0.3, 120e-9);
    dp.m_rows = 10;
    dp.n_cols = 10;
    dp.nonideal.c_gd_coupling = TABLE1_COUPLING;
    dp
}

/// The exploration grid: l_gate × drive × β × T × M (96 points).
pub fn table1_grid() -> SweepGrid {
    SweepGrid {
        axes: vec![
            (SweepVar::LGate, vec![120e-9, 240e-9]),
            (SweepVar::Drive, vec![0.3, 0.5]),
            (SweepVar::Beta, vec![4.0, 8.0]),
            (SweepVar::TWindow, vec![16e-9, 32e-9, 64e-9]),
            (SweepVar::Size, vec![10.0, 50.0, 100.0, 200.0]),
        ],
    }
}

/// Output swing study at the low drive.
pub fn fig5_swing() -> DesignPoint {
    let mut dp = table1();
    dp.m_rows = 16;
    dp.n_cols = 16;
    dp
}

pub fn fig5_grid() -> SweepGrid {
    SweepGrid {
        axes: vec![(SweepVar::Swing, vec![0.1, 0.2, 0.3, 0.4, 0.5])],
    }
}

/// Reduced full-scale current at a 0.2 V swing. Weights stay programmed at
/// the nominal 0.8 V read point when the swing is varied.
pub fn fig8_lowcurrent() -> DesignPoint {
    let mut dp = device_block(0.3, 120e-9);
    dp.v_th_neuron = dp.v_reset - 0.2;
    dp.v_cal = Some(NOMINAL_READ_POINT);
    dp
}

pub fn fig8_grid() -> SweepGrid {
    SweepGrid {
        axes: vec![
            (SweepVar::Drive, vec![0.3, 0.5]),
            (SweepVar::CurrentExponent, vec![1.0, 0.5, 1.0 / 3.0]),
            (SweepVar::Swing, vec![0.2, 0.3, 0.4]),
        ],
    }
}

/// Design whose cell and operating region feed the error contour map.
pub fn contour_fig3() -> DesignPoint {
    let mut dp = device_block(0.3, 120e-9);
    dp.cell.topology = CellTopology::SourceConnected;
    dp
}

/// Contour settings derived from a design point.
pub fn contour_spec(dp: &DesignPoint) -> ContourSpec {
    ContourSpec {
        v_gate: dp.v_gate_on,
        v_cal: dp.v_cal(),
        region: (dp.v_th_neuron, dp.v_reset),
        delta_v: crate::device::local_error::DEFAULT_DELTA_V,
    }
}

/// Design point and default sweep grid of a named preset.
pub fn by_name(name: &str) -> Option<(DesignPoint, Option<SweepGrid>)> {
    match name {
        "table1" => Some((table1(), Some(table1_grid()))),
        "fig5-swing" => Some((fig5_swing(), Some(fig5_grid()))),
        "fig8-lowcurrent" => Some((fig8_lowcurrent(), Some(fig8_grid()))),
        "contour-fig3" => Some((contour_fig3(), None)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_validates() {
        for name in NAMES {
            let (dp, grid) = by_name(name).unwrap();
            dp.validate().unwrap();
            if let Some(g) = grid {
                for point in g.points() {
                    let mut d = dp;
                    for (var, v) in point {
                        var.apply(&mut d, v);
                    }
                    d.validate().unwrap();
                }
            }
        }
        assert!(by_name("nope").is_none());
    }

    #[test]
    fn table1_grid_has_96_points() {
        assert_eq!(table1_grid().len(), 96);
    }

    #[test]
    fn drive_follows_gate_length() {
        let mut dp = device_block(0.3, 240e-9);
        assert_eq!(dp.cell.rram.r_off, 10e6);
        apply_drive(&mut dp, 0.5);
        assert_eq!((dp.cell.rram.r_on, dp.cell.rram.r_off), (250e3, 2.375e6));
    }
}
