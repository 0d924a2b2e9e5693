//! Characteristics of a programmed cell as a function of its weight.
//!
//! A family holds tabulated I(V) curves for cells programmed to a uniform
//! grid of weights. The curve of an arbitrary weight is the linear blend of
//! its two neighbours, which reproduces the programmed current at the
//! calibration point exactly and the voltage dependence to interpolation
//! accuracy. Building one column then costs `O(M · points)` instead of a
//! solver call per cell and grid point.

use super::characteristic::Characteristic;
use crate::device::{program_weight_in, BiasedCell, CellState, CurrentRange};
use crate::error::{Error, Result};
use crate::par::{map_range, Execution};

#[derive(Debug, Clone)]
pub struct CellFamily {
    levels: Vec<Characteristic>,
}

impl CellFamily {
    /// Tabulates `levels` weights `k / (levels − 1)` over `[0, v_max]`.
    #[allow(clippy::too_many_arguments)]
    pub fn build(
        template: &CellState,
        range: &CurrentRange,
        v_gate: f64,
        v_cal: f64,
        v_max: f64,
        points: usize,
        levels: usize,
        exec: Execution,
    ) -> Result<Self> {
        if levels < 2 {
            return Err(Error::config("a cell family needs at least 2 weight levels"));
        }
        let tables = map_range(exec, levels, |k| {
            let w = k as f64 / (levels - 1) as f64;
            let rram = program_weight_in(w, range, template, v_gate, v_cal, None)?;
            let cell = BiasedCell {
                cell: CellState { rram, ..*template },
                v_gate,
            };
            Characteristic::sample(&cell, v_max, points)
        });
        Ok(Self {
            levels: tables.into_iter().collect::<Result<_>>()?,
        })
    }

    pub fn levels(&self) -> usize {
        self.levels.len()
    }

    fn bracket(&self, w: f64) -> (usize, f64) {
        let s = w.clamp(0.0, 1.0) * (self.levels.len() - 1) as f64;
        let k = (s as usize).min(self.levels.len() - 2);
        (k, s - k as f64)
    }

    /// `total += factor · table(w)`.
    pub fn accumulate(&self, total: &mut Characteristic, w: f64, factor: f64) {
        let (k, theta) = self.bracket(w);
        if theta > 0.0 {
            total.add_scaled(&self.levels[k], factor * (1.0 - theta));
            total.add_scaled(&self.levels[k + 1], factor * theta);
        } else {
            total.add_scaled(&self.levels[k], factor);
        }
    }

    /// Blended characteristic of a cell programmed to `w`.
    pub fn table(&self, w: f64) -> Characteristic {
        let first = &self.levels[0];
        let mut t = Characteristic::zeros(first.v_max(), first.points()).expect("grid already validated");
        self.accumulate(&mut t, w, 1.0);
        t
    }
}
