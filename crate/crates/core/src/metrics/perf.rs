//! Area, energy and throughput of a complete VMM including its converters.
//!
//! The converter constants are calibrated, not derived: they place the
//! 200×200, 4-bit, 16 ns design near 1.5 POps/J. Per-conversion energies are
//! quoted at `reference_bits` and scale with the counter length,
//! `(P / P_ref) · 2^(P − P_ref)`; areas scale with the word width `P / P_ref`.

use serde::{Deserialize, Serialize};

use crate::engine::DesignPoint;
use crate::error::{Error, Result};

use super::run::SweepReport;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerfModel {
    /// Per input, per conversion (J).
    pub dtc_energy: f64,
    /// Per signed output, per conversion (J).
    pub tdc_energy: f64,
    /// Per signed output neuron latch and gating (J).
    pub neuron_energy: f64,
    pub dtc_area: f64,
    pub tdc_area: f64,
    pub neuron_area: f64,
    /// Load-capacitor density (F/m²).
    pub capacitor_density: f64,
    /// Added to the two-phase latency of each operation (s).
    pub conversion_overhead: f64,
    pub reference_bits: u32,
}

impl Default for PerfModel {
    fn default() -> Self {
        Self {
            dtc_energy: 30e-15,
            tdc_energy: 40e-15,
            neuron_energy: 5e-15,
            dtc_area: 25e-12,
            tdc_area: 60e-12,
            neuron_area: 8e-12,
            capacitor_density: 10e-3,
            conversion_overhead: 0.0,
            reference_bits: 4,
        }
    }
}

impl PerfModel {
    /// A model with free, zero-area converters.
    pub fn zero_io() -> Self {
        Self {
            dtc_energy: 0.0,
            tdc_energy: 0.0,
            neuron_energy: 0.0,
            dtc_area: 0.0,
            tdc_area: 0.0,
            neuron_area: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let values = [
            self.dtc_energy,
            self.tdc_energy,
            self.neuron_energy,
            self.dtc_area,
            self.tdc_area,
            self.neuron_area,
            self.conversion_overhead,
        ];
        if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::config("performance constants must be finite and >= 0"));
        }
        if !(self.capacitor_density > 0.0) {
            return Err(Error::config("capacitor_density must be > 0"));
        }
        if self.reference_bits == 0 {
            return Err(Error::config("reference_bits must be >= 1"));
        }
        Ok(())
    }

    fn energy_factor(&self, bits: u32) -> f64 {
        let r = f64::from(self.reference_bits);
        f64::from(bits) / r * 2f64.powf(f64::from(bits) - r)
    }

    fn area_factor(&self, bits: u32) -> f64 {
        f64::from(bits) / f64::from(self.reference_bits)
    }

    /// Converter and neuron energy per operation.
    pub fn io_energy(&self, dp: &DesignPoint) -> f64 {
        let f = self.energy_factor(dp.output_bits);
        dp.m_rows as f64 * self.dtc_energy * f + dp.n_cols as f64 * (self.tdc_energy * f + self.neuron_energy)
    }
}

/// Multiply and add per weight, two phases per operation.
pub fn ops_per_operation(dp: &DesignPoint) -> f64 {
    2.0 * dp.m_rows as f64 * dp.n_cols as f64
}

pub fn throughput(dp: &DesignPoint, perf: &PerfModel) -> f64 {
    ops_per_operation(dp) / (2.0 * dp.t_window + perf.conversion_overhead)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentShare {
    pub name: String,
    pub area: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceEstimate {
    pub area: f64,
    /// Energy of one operation (J).
    pub energy: f64,
    pub energy_efficiency: f64,
    pub throughput: f64,
    pub breakdown: Vec<ComponentShare>,
}

impl PerformanceEstimate {
    pub fn dominant_energy(&self) -> &ComponentShare {
        self.breakdown
            .iter()
            .max_by(|a, b| a.energy.total_cmp(&b.energy))
            .expect("breakdown is never empty")
    }

    pub fn dominant_area(&self) -> &ComponentShare {
        self.breakdown
            .iter()
            .max_by(|a, b| a.area.total_cmp(&b.area))
            .expect("breakdown is never empty")
    }

    pub fn share(&self, name: &str) -> Option<(f64, f64)> {
        self.breakdown
            .iter()
            .find(|c| c.name == name)
            .map(|c| (c.area / self.area, c.energy / self.energy))
    }
}

pub fn performance_estimate(dp: &DesignPoint, perf: &PerfModel, sim: &SweepReport) -> Result<PerformanceEstimate> {
    perf.validate()?;
    let m = dp.m_rows as f64;
    let n = dp.n_cols as f64;
    let ef = perf.energy_factor(dp.output_bits);
    let af = perf.area_factor(dp.output_bits);
    let breakdown = vec![
        ComponentShare {
            name: "load capacitors".into(),
            area: 2.0 * n * sim.capacitance / perf.capacitor_density,
            energy: sim.e_cl_total,
        },
        ComponentShare {
            name: "dtc".into(),
            area: m * perf.dtc_area * af,
            energy: m * perf.dtc_energy * ef,
        },
        ComponentShare {
            name: "tdc".into(),
            area: n * perf.tdc_area * af,
            energy: n * perf.tdc_energy * ef,
        },
        ComponentShare {
            name: "neuron".into(),
            area: n * perf.neuron_area,
            energy: n * perf.neuron_energy,
        },
    ];
    let area = breakdown.iter().map(|c| c.area).sum();
    let energy: f64 = breakdown.iter().map(|c| c.energy).sum();
    Ok(PerformanceEstimate {
        area,
        energy,
        energy_efficiency: ops_per_operation(dp) / energy,
        throughput: throughput(dp, perf),
        breakdown,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(c: f64, e: f64) -> SweepReport {
        SweepReport {
            capacitance: c,
            e_cl_total: e,
            ..SweepReport::default()
        }
    }

    #[test]
    fn headline_throughput() {
        let dp = DesignPoint {
            m_rows: 200,
            n_cols: 200,
            t_window: 16e-9,
            ..Default::default()
        };
        let t = throughput(&dp, &PerfModel::default());
        assert!((t - 2.5e12).abs() < 1e-3, "{t}");
    }

    #[test]
    fn zero_io_efficiency_is_capacitor_only() {
        let dp = DesignPoint {
            m_rows: 50,
            n_cols: 50,
            ..Default::default()
        };
        let est = performance_estimate(&dp, &PerfModel::zero_io(), &report(1e-12, 3e-12)).unwrap();
        assert_eq!(est.energy_efficiency, 5000.0 / 3e-12);
        assert_eq!(est.dominant_energy().name, "load capacitors");
    }

    #[test]
    fn reference_bits_scale_is_unity() {
        let p = PerfModel::default();
        assert_eq!(p.energy_factor(4), 1.0);
        assert_eq!(p.energy_factor(6), 6.0);
        assert_eq!(p.area_factor(2), 0.5);
    }

    #[test]
    fn negative_constants_rejected() {
        let p = PerfModel {
            tdc_energy: -1.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }
}
