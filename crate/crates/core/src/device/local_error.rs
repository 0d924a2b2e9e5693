//! Local CLM/DIBL error: `1 − I(V − ΔV) / I(V)`.

use serde::{Deserialize, Serialize};

use super::cell::{cell_current_range, BiasedCell, CellState, CurrentSink};
use super::program::program_weight_in;
use crate::error::{Error, Result};

pub const DEFAULT_DELTA_V: f64 = 1e-3;
/// Below this reference current the ratio is not reported.
pub const MIN_REFERENCE_CURRENT: f64 = 1e-15;

/// Local error of any current sink at `v_node`.
pub fn local_error<S: CurrentSink + ?Sized>(sink: &S, v_node: f64, delta_v: f64) -> Result<f64> {
    if !(delta_v > 0.0) || v_node - delta_v < 0.0 {
        return Err(Error::contract(format!(
            "need 0 < delta_v <= v_node, got delta_v={delta_v}, v_node={v_node}"
        )));
    }
    let i_ref = sink.sink_current(v_node)?;
    if i_ref < MIN_REFERENCE_CURRENT {
        return Err(Error::UndefinedRatio {
            current: i_ref,
            floor: MIN_REFERENCE_CURRENT,
        });
    }
    Ok(1.0 - sink.sink_current(v_node - delta_v)? / i_ref)
}

pub fn clm_dibl_error(cell: &CellState, v_gate: f64, v_node: f64, delta_v: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&v_node) || !(0.0..=1.0).contains(&v_gate) {
        return Err(Error::contract("v_gate and v_node must lie in [0, 1] V"));
    }
    local_error(&BiasedCell { cell: *cell, v_gate }, v_node, delta_v)
}

/// One point of an error contour map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourPoint {
    pub v_node: f64,
    pub weight: f64,
    pub r0: f64,
    /// `None` when the ratio is undefined at this point.
    pub error: Option<f64>,
    /// Whether `v_node` lies inside the column's operating swing.
    pub in_region: bool,
}

/// Evaluation settings for a contour map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    pub v_gate: f64,
    pub v_cal: f64,
    /// Operating swing `[v_low, v_high]`; points outside are flagged.
    pub region: (f64, f64),
    pub delta_v: f64,
}

/// Evaluates the local error over a `(v_node × weight)` grid. Cells are
/// programmed at `(v_gate, v_cal)`; row-major in `v_nodes`.
pub fn error_contour(
    template: &CellState,
    spec: &ContourSpec,
    v_nodes: &[f64],
    weights: &[f64],
) -> Result<Vec<ContourPoint>> {
    let range = cell_current_range(template, spec.v_gate, spec.v_cal)?;
    let programmed = weights
        .iter()
        .map(|&w| program_weight_in(w, &range, template, spec.v_gate, spec.v_cal, None))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(v_nodes.len() * weights.len());
    for &v_node in v_nodes {
        for (&weight, rram) in weights.iter().zip(&programmed) {
            let cell = CellState {
                rram: *rram,
                ..*template
            };
            let error = match clm_dibl_error(&cell, spec.v_gate, v_node, spec.delta_v) {
                Ok(e) => Some(e),
                Err(Error::UndefinedRatio { .. }) | Err(Error::Contract(_)) => None,
                Err(e) => return Err(e),
            };
            out.push(ContourPoint {
                v_node,
                weight,
                r0: rram.r0,
                error,
                in_region: v_node >= spec.region.0 && v_node <= spec.region.1,
            });
        }
    }
    Ok(out)
}

/// Mean local error over the in-region, defined points of a contour.
pub fn mean_error(points: &[ContourPoint]) -> Option<f64> {
    let vals: Vec<f64> = points
        .iter()
        .filter(|p| p.in_region)
        .filter_map(|p| p.error)
        .collect();
    if vals.is_empty() {
        None
    } else {
        Some(vals.iter().sum::<f64>() / vals.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::cell::ConstantSink;

    #[test]
    fn ideal_source_has_no_error() {
        assert_eq!(local_error(&ConstantSink(1e-7), 0.8, DEFAULT_DELTA_V).unwrap(), 0.0);
    }

    #[test]
    fn tiny_reference_current_is_undefined() {
        let r = local_error(&ConstantSink(1e-18), 0.8, DEFAULT_DELTA_V);
        assert!(matches!(r, Err(Error::UndefinedRatio { .. })));
    }

    #[test]
    fn delta_larger_than_node_rejected() {
        assert!(local_error(&ConstantSink(1e-7), 0.0005, 1e-3).is_err());
    }

    #[test]
    fn real_cell_error_is_small_and_positive() {
        let e = clm_dibl_error(&CellState::default(), 0.3, 0.8, DEFAULT_DELTA_V).unwrap();
        assert!(e > 0.0 && e < 0.01, "{e}");
    }

    #[test]
    fn contour_shape_and_flags() {
        let spec = ContourSpec {
            v_gate: 0.3,
            v_cal: 0.8,
            region: (0.7, 0.9),
            delta_v: DEFAULT_DELTA_V,
        };
        let pts = error_contour(&CellState::default(), &spec, &[0.5, 0.8], &[0.0, 1.0]).unwrap();
        assert_eq!(pts.len(), 4);
        assert!(!pts[0].in_region && pts[2].in_region);
        assert!(pts.iter().all(|p| p.error.is_some()));
    }
}
